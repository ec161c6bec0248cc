//! Parity certificates for the classes `Q_k`, the closure lemmas, the odd
//! volume obstruction and the depth lower bound for `max{0, x_1, …, x_n}`.

use std::sync::Arc;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{Int, Rat};
use crate::polytope::{Face, LatticePolytope};
use crate::subdivision::{subdivide_conv, subdivide_sum, verify_subdivision, CellKind, Lift, Subdivision};
use crate::tropical::{
    compile_with_trees, eval_network, sample_pk, simplex_tree, synthesize_network, ConstructionTree,
    IntegralNetwork, SampleParams,
};
use crate::volume::{binom_parity, normalized_volume, Parity};

/// `2^k`, saturating.
pub fn threshold(k: u32) -> usize {
    1usize.checked_shl(k).unwrap_or(usize::MAX)
}

/// Per-trial seed derived from a batch seed.
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    /// Every face of dimension at least `2^k` is listed.
    Full,
    /// Stops at the first odd face.
    ShortCircuit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceEntry {
    pub vertices: Vec<Vec<Int>>,
    pub direction: Vec<Rat>,
    pub dim: usize,
    pub volume: Int,
    pub parity: Parity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityCertificate {
    pub polytope: LatticePolytope,
    pub k: u32,
    pub mode: CheckMode,
    pub entries: Vec<FaceEntry>,
    pub member: bool,
    /// Index into `entries` of the first odd face.
    pub first_violation: Option<usize>,
}

fn entry(f: &Face) -> FaceEntry {
    let volume = normalized_volume(&f.polytope);
    FaceEntry {
        vertices: f.polytope.vertices().to_vec(),
        direction: f.direction.clone(),
        dim: f.dim,
        parity: Parity::of(&volume),
        volume,
    }
}

/// Membership in `Q_k`: every face of dimension `>= 2^k` has even volume.
pub fn check_qk(p: &LatticePolytope, k: u32) -> Result<ParityCertificate> {
    check_qk_with(p, k, CheckMode::Full)
}

pub fn check_qk_with(p: &LatticePolytope, k: u32, mode: CheckMode) -> Result<ParityCertificate> {
    let faces = p.faces_of_dim_at_least(threshold(k))?;
    let mut entries = Vec::with_capacity(faces.len());
    let mut first_violation = None;
    for f in &faces {
        let e = entry(f);
        let odd = e.parity == Parity::Odd;
        entries.push(e);
        if odd && first_violation.is_none() {
            first_violation = Some(entries.len() - 1);
            if mode == CheckMode::ShortCircuit {
                break;
            }
        }
    }
    Ok(ParityCertificate {
        polytope: p.clone(),
        k,
        mode,
        entries,
        member: first_violation.is_none(),
        first_violation,
    })
}

/// Why a cell of the lemma subdivision has even volume.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    /// `binom(i + j, i)` is even.
    EvenBinomial { i: usize, j: usize },
    /// The named provenance face ("F" or "G") has dimension `>= 2^k`, so its
    /// volume is even by membership; the volume is recorded.
    EvenFace { which: &'static str, dim: usize, volume: Int },
    /// No argument applies; the lemma audit fails.
    Unjustified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lemma {
    Sum,
    Conv,
}

impl Lemma {
    pub fn as_str(self) -> &'static str {
        match self {
            Lemma::Sum => "sum",
            Lemma::Conv => "conv",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellJustification {
    pub kind: CellKind,
    pub volume: Int,
    pub justification: Justification,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaAudit {
    pub lemma: Lemma,
    pub k: u32,
    pub dim: usize,
    /// Dimension the lemma needs: `2^k` for sums, `2^{k+1}` for hulls.
    pub required_dim: usize,
    /// False when the dimension is too small; no claim is made then.
    pub applies: bool,
    pub volume: Int,
    pub parity: Parity,
    pub cells: Vec<CellJustification>,
    pub subdivision_ok: bool,
    pub lift: Option<Lift>,
    pub passed: bool,
}

fn justify(lemma: Lemma, s: &Subdivision, k: u32) -> Vec<CellJustification> {
    let t = threshold(k);
    let face_even = |which: &'static str, f: &Face| {
        let v = normalized_volume(&f.polytope);
        (f.dim >= t && Parity::of(&v) == Parity::Even).then_some(Justification::EvenFace {
            which,
            dim: f.dim,
            volume: v,
        })
    };
    s.cells
        .iter()
        .map(|c| {
            let just = match (c.f.as_ref(), c.g.as_ref()) {
                (Some(f), Some(g)) => {
                    let binom = (lemma == Lemma::Sum
                        && binom_parity(f.dim as u64, g.dim as u64) == Parity::Even)
                        .then_some(Justification::EvenBinomial { i: f.dim, j: g.dim });
                    binom.or_else(|| face_even("F", f)).or_else(|| face_even("G", g))
                }
                (Some(f), None) => face_even("F", f),
                (None, Some(g)) => face_even("G", g),
                (None, None) => None,
            };
            CellJustification {
                kind: c.kind,
                volume: c.volume.clone(),
                justification: just.unwrap_or(Justification::Unjustified),
            }
        })
        .collect()
}

fn check_lemma(p: &LatticePolytope, q: &LatticePolytope, k: u32, lemma: Lemma, seed: u64) -> Result<LemmaAudit> {
    for (name, x) in [("P", p), ("Q", q)] {
        let cert = check_qk_with(x, k, CheckMode::ShortCircuit)?;
        if !cert.member {
            return Err(Error::Precondition(format!(
                "{name} is not in Q_{k}: a face of dimension {} has odd volume",
                cert.entries[cert.first_violation.expect("violation")].dim
            )));
        }
    }
    let (target, required_dim) = match lemma {
        Lemma::Sum => (p.minkowski_sum(q)?, threshold(k)),
        Lemma::Conv => (p.conv_union(q)?, threshold(k.saturating_add(1))),
    };
    let volume = normalized_volume(&target);
    let parity = Parity::of(&volume);
    let dim = target.dim();
    if dim < required_dim {
        return Ok(LemmaAudit {
            lemma,
            k,
            dim,
            required_dim,
            applies: false,
            volume,
            parity,
            cells: Vec::new(),
            subdivision_ok: true,
            lift: None,
            passed: true,
        });
    }
    let s = match lemma {
        Lemma::Sum => subdivide_sum(p, q, seed)?,
        Lemma::Conv => subdivide_conv(p, q, seed)?,
    };
    let subdivision_ok = verify_subdivision(&s).passed();
    let cells = justify(lemma, &s, k);
    let all_justified = cells
        .iter()
        .all(|c| c.justification != Justification::Unjustified);
    Ok(LemmaAudit {
        lemma,
        k,
        dim,
        required_dim,
        applies: true,
        passed: subdivision_ok && all_justified && parity == Parity::Even,
        volume,
        parity,
        cells,
        subdivision_ok,
        lift: Some(s.lift),
    })
}

/// For `P, Q ∈ Q_k` with `dim(P + Q) >= 2^k`, checks that `Vol(P + Q)` is even
/// and justifies every cell of a mixed subdivision.
pub fn check_lemma_sum(p: &LatticePolytope, q: &LatticePolytope, k: u32, seed: u64) -> Result<LemmaAudit> {
    check_lemma(p, q, k, Lemma::Sum, seed)
}

/// For `P, Q ∈ Q_k` with `dim conv(P ∪ Q) >= 2^{k+1}`, checks that the hull
/// has even volume and justifies every cell.
pub fn check_lemma_conv(p: &LatticePolytope, q: &LatticePolytope, k: u32, seed: u64) -> Result<LemmaAudit> {
    check_lemma(p, q, k, Lemma::Conv, seed)
}

/// Sampling bounds used by the batch checks for level `k`.
pub fn default_sample_params(k: u32) -> SampleParams {
    if k >= 2 {
        SampleParams {
            coord_range: 1,
            max_fanout: 2,
        }
    } else {
        SampleParams::default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialResult {
    pub index: u64,
    pub seed: u64,
    pub tree_depth: usize,
    pub polytope: LatticePolytope,
    pub certificate: ParityCertificate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThmEvenReport {
    pub k: u32,
    pub n: usize,
    pub seed: u64,
    pub params: SampleParams,
    pub trials: Vec<TrialResult>,
    pub members: usize,
    /// First sampled polytope outside `Q_k`.
    pub counterexample: Option<usize>,
}

impl ThmEvenReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none() && self.members == self.trials.len()
    }
}

/// Samples members of `P_k` in `R^n` and checks that each lies in `Q_k`.
pub fn verify_thm_even(k: u32, n: usize, trials: usize, seed: u64) -> Result<ThmEvenReport> {
    verify_thm_even_with(k, n, trials, seed, &default_sample_params(k))
}

pub fn verify_thm_even_with(
    k: u32,
    n: usize,
    trials: usize,
    seed: u64,
    params: &SampleParams,
) -> Result<ThmEvenReport> {
    let results: Vec<TrialResult> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let s = trial_seed(seed, i);
            let (tree, p) = sample_pk(k as usize, n, params, s)?;
            let certificate = check_qk(&p, k)?;
            Ok(TrialResult {
                index: i,
                seed: s,
                tree_depth: tree.depth(),
                polytope: p,
                certificate,
            })
        })
        .collect::<Result<_>>()?;
    let members = results.iter().filter(|r| r.certificate.member).count();
    let counterexample = results.iter().position(|r| !r.certificate.member);
    Ok(ThmEvenReport {
        k,
        n,
        seed,
        params: *params,
        trials: results,
        members,
        counterexample,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OddCell {
    pub index: usize,
    pub vertices: Vec<Vec<Int>>,
    pub volume: Int,
    pub f_dim: usize,
    pub g_dim: usize,
    /// Whether `G` is the whole simplex and the cell a translate of it.
    pub simplex_translate: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionReport {
    pub polytope: LatticePolytope,
    pub k: u32,
    pub sum: LatticePolytope,
    pub volume: Int,
    pub parity: Parity,
    pub lift: Lift,
    pub cell_count: usize,
    pub audit_passed: bool,
    pub odd_cells: Vec<OddCell>,
    /// Odd total, one odd cell of volume 1 that is a translate of the simplex.
    pub passed: bool,
}

/// For `P ∈ Q_k` in `R^{2^k}`, shows `Vol(P + Δ)` is odd and locates the
/// unique odd cell of a mixed subdivision.
pub fn parity_obstruction(p: &LatticePolytope, k: u32, seed: u64) -> Result<ObstructionReport> {
    let n = threshold(k);
    if p.ambient() != n {
        return Err(Error::Precondition(format!(
            "obstruction at level {k} needs ambient dimension {n}, got {}",
            p.ambient()
        )));
    }
    let cert = check_qk_with(p, k, CheckMode::ShortCircuit)?;
    if !cert.member {
        return Err(Error::Precondition(format!("polytope is not in Q_{k}")));
    }
    let delta = LatticePolytope::simplex(n)?;
    let s = subdivide_sum(p, &delta, seed)?;
    let audit_passed = verify_subdivision(&s).passed();
    let volume = normalized_volume(&s.target);
    let parity = Parity::of(&volume);
    let odd_cells: Vec<OddCell> = s
        .cells
        .iter()
        .enumerate()
        .filter(|(_, c)| Parity::of(&c.volume) == Parity::Odd)
        .map(|(i, c)| {
            let f = c.f.as_ref().expect("product cell");
            let g = c.g.as_ref().expect("product cell");
            let simplex_translate = g.polytope == delta
                && f.dim == 0
                && delta.translate(&f.polytope.vertices()[0]).ok().as_ref() == Some(&c.polytope);
            OddCell {
                index: i,
                vertices: c.polytope.vertices().to_vec(),
                volume: c.volume.clone(),
                f_dim: f.dim,
                g_dim: g.dim,
                simplex_translate,
            }
        })
        .collect();
    let passed = audit_passed
        && parity == Parity::Odd
        && odd_cells.len() == 1
        && odd_cells[0].volume == Int::from(1)
        && odd_cells[0].simplex_translate;
    Ok(ObstructionReport {
        polytope: p.clone(),
        k,
        sum: s.target.clone(),
        volume,
        parity,
        lift: s.lift,
        cell_count: s.cells.len(),
        audit_passed,
        odd_cells,
        passed,
    })
}

/// A network for `max{0, x_1, …, x_m}` with `⌈log₂(m + 1)⌉` hidden layers.
pub fn max_network(m: usize) -> Result<IntegralNetwork> {
    let zero = ConstructionTree::leaf(vec![Int::zero(); m]);
    synthesize_network(&simplex_tree(m), &zero)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessCheck {
    pub m: usize,
    pub network: IntegralNetwork,
    pub hidden_layers: usize,
    pub points_checked: usize,
    pub eval_ok: bool,
    /// Reduced positive Newton polytope of the compiled network.
    pub newton_polytope: Option<LatticePolytope>,
    pub newton_is_simplex: bool,
}

impl WitnessCheck {
    pub fn passed(&self) -> bool {
        self.eval_ok && self.newton_is_simplex
    }
}

/// Synthesizes the max network for `m` inputs, checks it on `points` seeded
/// random rational points and compares its Newton polytope with `Δ^m`.
pub fn check_max_witness(m: usize, points: usize, seed: u64) -> Result<WitnessCheck> {
    let network = max_network(m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut eval_ok = true;
    for _ in 0..points {
        let x: Vec<Rat> = (0..m)
            .map(|_| Rat::new(Int::from(rng.gen_range(-50i64..=50)), Int::from(rng.gen_range(1i64..=7))))
            .collect();
        let expected = x.iter().cloned().fold(Rat::zero(), Rat::max);
        eval_ok &= eval_network(&network, &x)? == vec![expected];
    }
    let compiled = compile_with_trees(&network)?;
    let newton_polytope = compiled[0].pair.reduce().map(|r| r.pos);
    let newton_is_simplex = newton_polytope.as_ref() == Some(&LatticePolytope::simplex(m)?);
    Ok(WitnessCheck {
        m,
        hidden_layers: network.hidden_layers(),
        network,
        points_checked: points,
        eval_ok,
        newton_polytope,
        newton_is_simplex,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifyOptions {
    pub trials: usize,
    pub eval_points: usize,
    pub seed: u64,
}

impl CertifyOptions {
    pub fn for_level(k: u32, seed: u64) -> Self {
        CertifyOptions {
            trials: if k >= 2 { 25 } else { 100 },
            eval_points: 100,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonRepresentabilityCertificate {
    pub k: u32,
    pub n: usize,
    pub options: CertifyOptions,
    /// (a) `max{0, x_1, …, x_n}` has Newton polytope `Δ^n`; the witness has
    /// `k + 1` hidden layers.
    pub witness: WitnessCheck,
    /// (b) sampled members of `P_k` lie in `Q_k`.
    pub thm_even: ThmEvenReport,
    /// (c) for each sample, `P + Δ^n` has odd volume.
    pub obstructions: Vec<ObstructionReport>,
    pub failure: Option<String>,
}

impl NonRepresentabilityCertificate {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }

    pub fn statement(&self) -> String {
        let terms = match self.n {
            1 => "x_1".to_string(),
            2 => "x_1, x_2".to_string(),
            n => format!("x_1, ..., x_{n}"),
        };
        format!(
            "max{{0, {terms}}} is not computed by any integral ReLU network with {k} hidden \
             layer(s) and is computed by the attached one with {k1}. Machine-checked here: the witness \
             network and its Newton polytope, membership in Q_{k} of {t} sampled members of P_{k}, \
             and odd volume of P + simplex for each of them. That P_{k} is contained in Q_{k} for \
             every member, and hence the claim for all networks, is the theorem whose per-instance \
             steps these checks replay.",
            k = self.k,
            k1 = self.k + 1,
            t = self.thm_even.trials.len(),
        )
    }
}

/// Builds the certificate that `max{0, x_1, …, x_{2^k}}` needs more than `k`
/// integral hidden layers, together with a `(k+1)`-layer witness.
pub fn certify_non_representability(k: u32, options: &CertifyOptions) -> Result<NonRepresentabilityCertificate> {
    let n = threshold(k);
    let witness = check_max_witness(n, options.eval_points, trial_seed(options.seed, u64::MAX))?;
    let thm_even = verify_thm_even(k, n, options.trials, options.seed)?;
    let obstructions: Vec<ObstructionReport> = thm_even
        .trials
        .par_iter()
        .filter(|t| t.certificate.member)
        .map(|t| parity_obstruction(&t.polytope, k, t.seed))
        .collect::<Result<_>>()?;
    let failure = if !witness.eval_ok {
        Some("witness network disagrees with the maximum".to_string())
    } else if !witness.newton_is_simplex {
        Some("witness Newton polytope is not the simplex".to_string())
    } else if witness.hidden_layers != k as usize + 1 {
        Some(format!("witness has {} hidden layers", witness.hidden_layers))
    } else if let Some(i) = thm_even.counterexample {
        Some(format!("sample {i} is not in Q_{k}"))
    } else if let Some(o) = obstructions.iter().position(|o| !o.passed) {
        Some(format!("obstruction failed for sample {o}"))
    } else {
        None
    };
    Ok(NonRepresentabilityCertificate {
        k,
        n,
        options: options.clone(),
        witness,
        thm_even,
        obstructions,
        failure,
    })
}

/// Parity ledger of `2Δ^{2^k}` at level `k`, reported without interpretation.
pub fn explore_double_simplex(k: u32) -> Result<ParityCertificate> {
    let p = LatticePolytope::simplex(threshold(k))?.dilate(&Int::from(2))?;
    check_qk(&p, k)
}

/// Tree for `x ↦ 0`, handy as the negative part of a synthesized network.
pub fn zero_tree(n: usize) -> Arc<ConstructionTree> {
    ConstructionTree::leaf(vec![Int::zero(); n])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::int_vec;

    fn poly(v: &[&[i64]]) -> LatticePolytope {
        LatticePolytope::from_points(&v.iter().map(|p| int_vec(p)).collect::<Vec<_>>()).unwrap()
    }

    fn two_simplex() -> LatticePolytope {
        poly(&[&[0, 0], &[2, 0], &[0, 2]])
    }

    #[test]
    fn check_qk_examples() {
        let c = check_qk(&LatticePolytope::simplex(2).unwrap(), 1).unwrap();
        assert!(!c.member);
        assert_eq!(c.first_violation, Some(0));
        let c = check_qk(&two_simplex(), 1).unwrap();
        assert!(c.member);
        assert_eq!(c.entries.len(), 1);
        assert_eq!(c.entries[0].volume, Int::from(4));
        assert!(check_qk(&poly(&[&[0, 0], &[3, 1]]), 1).unwrap().member);
        assert!(check_qk(&poly(&[&[4, 4]]), 1).unwrap().entries.is_empty());
    }

    #[test]
    fn short_circuit_stops_early() {
        let cube = poly(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 0], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]]);
        let full = check_qk(&cube, 0).unwrap();
        let short = check_qk_with(&cube, 0, CheckMode::ShortCircuit).unwrap();
        assert!(!full.member && !short.member);
        assert!(short.entries.len() < full.entries.len());
        assert_eq!(full.entries.len(), 1 + 6 + 12);
    }

    #[test]
    fn lemma_sum_examples() {
        let a = check_lemma_sum(&two_simplex(), &two_simplex(), 1, 3).unwrap();
        assert!(a.applies && a.passed, "{a:?}");
        let s1 = poly(&[&[0, 0], &[2, 0]]);
        let s2 = poly(&[&[0, 0], &[0, 2]]);
        let a = check_lemma_sum(&s1, &s2, 0, 3).unwrap();
        assert!(a.passed);
        assert_eq!(a.volume, Int::from(8));
        let u1 = poly(&[&[0, 0], &[1, 0]]);
        assert!(matches!(check_lemma_sum(&u1, &s2, 0, 3), Err(Error::Precondition(_))));
        let a = check_lemma_sum(&s1, &poly(&[&[1, 1]]), 1, 3).unwrap();
        assert!(!a.applies);
    }

    #[test]
    fn lemma_conv_example() {
        // Two points are in Q_0; their hull is a segment, dim 1 < 2.
        let a = check_lemma_conv(&poly(&[&[0, 0]]), &poly(&[&[1, 0]]), 0, 1).unwrap();
        assert!(!a.applies);
        let a = check_lemma_conv(&poly(&[&[0, 0], &[2, 0]]), &poly(&[&[0, 1]]), 0, 1).unwrap();
        assert!(a.applies && a.passed, "{a:?}");
        assert_eq!(a.volume, Int::from(2));
    }

    #[test]
    fn obstruction_examples() {
        let r = parity_obstruction(&poly(&[&[0, 0]]), 1, 0).unwrap();
        assert_eq!(r.volume, Int::from(1));
        assert!(r.passed);
        let r = parity_obstruction(&two_simplex(), 1, 0).unwrap();
        assert_eq!(r.volume, Int::from(9));
        assert!(r.passed, "{r:?}");
        let sq = poly(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        let r = parity_obstruction(&sq, 1, 0).unwrap();
        assert_eq!(r.parity, Parity::Odd);
        assert!(r.passed);
        assert!(matches!(
            parity_obstruction(&LatticePolytope::simplex(2).unwrap(), 1, 0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn thm_even_small() {
        assert!(verify_thm_even(0, 3, 5, 1).unwrap().passed());
        let r = verify_thm_even(1, 2, 20, 1).unwrap();
        assert!(r.passed());
        assert!(r.trials.iter().all(|t| t.tree_depth == 1));
    }

    #[test]
    fn witnesses() {
        for (m, layers) in [(1, 1), (2, 2), (4, 3)] {
            let w = check_max_witness(m, 30, 5).unwrap();
            assert_eq!(w.hidden_layers, layers);
            assert!(w.passed(), "m = {m}");
        }
    }

    #[test]
    fn certify_level_zero_and_one() {
        let c = certify_non_representability(0, &CertifyOptions::for_level(0, 1)).unwrap();
        assert!(c.passed(), "{:?}", c.failure);
        let opts = CertifyOptions {
            trials: 10,
            eval_points: 20,
            seed: 2,
        };
        let c = certify_non_representability(1, &opts).unwrap();
        assert!(c.passed(), "{:?}", c.failure);
        assert_eq!(c.witness.hidden_layers, 2);
    }

    #[test]
    fn double_simplex_is_even() {
        let c = explore_double_simplex(1).unwrap();
        assert!(c.member);
    }
}
