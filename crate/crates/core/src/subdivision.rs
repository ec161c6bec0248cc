//! Regular subdivisions of Minkowski sums and of convex hulls of unions.
//!
//! `P` is lifted flat to height 0 and `Q` along the affine function
//! `q ↦ α·q + β`. Projecting the lower faces of `P⁰ + Q^{α,β}` (resp.
//! `conv(P⁰ ∪ Q^{α,β})`) back down subdivides `P + Q` (resp. `conv(P ∪ Q)`).
//! For generic `(α, β)` every full-dimensional cell is an affine product
//! `F_c + G_c` (resp. a join `conv(F_c ∪ G_c)` or a face of `P` or `Q`),
//! where `F_c` minimizes `c` over `P` and `G_c` minimizes `c + α` over `Q`.
//!
//! Genericity is certified per instance: a candidate lift is accepted only if
//! every cell passes the dimension and reconstruction checks, otherwise a new
//! lift is drawn from a doubled range.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, kernel_lattice_basis, to_rat, Int, Mat, Rat};
use crate::lp::strict_feasible;
use crate::polytope::{Face, LatticePolytope};
use crate::volume::{binomial, normalized_volume};

const MAX_RETRIES: u32 = 32;
const INITIAL_RANGE: i64 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Operation {
    /// `P + Q`
    Sum,
    /// `conv(P ∪ Q)`
    Conv,
}

impl Operation {
    pub fn as_str(self) -> &'static str {
        match self {
            Operation::Sum => "sum",
            Operation::Conv => "conv",
        }
    }
}

/// Lifting parameters and the randomness used to find them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lift {
    /// Slope of the lift of `Q` in ambient coordinates.
    pub alpha: Vec<Int>,
    pub beta: Int,
    pub seed: u64,
    /// Number of rejected candidates before this one.
    pub retries: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellKind {
    Product,
    Join,
    PureP,
    PureQ,
}

impl CellKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CellKind::Product => "product",
            CellKind::Join => "join",
            CellKind::PureP => "pure-P",
            CellKind::PureQ => "pure-Q",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "product" => CellKind::Product,
            "join" => CellKind::Join,
            "pure-P" => CellKind::PureP,
            "pure-Q" => CellKind::PureQ,
            _ => return None,
        })
    }
}

/// A full-dimensional cell with its provenance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub polytope: LatticePolytope,
    pub kind: CellKind,
    /// `F_c`; absent for pure-Q cells.
    pub f: Option<Face>,
    /// `G_c`; absent for pure-P cells.
    pub g: Option<Face>,
    /// `c` such that the lifted cell minimizes `(c, 1)`.
    pub witness: Vec<Rat>,
    pub volume: Int,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subdivision {
    pub operation: Operation,
    pub p: LatticePolytope,
    pub q: LatticePolytope,
    pub target: LatticePolytope,
    pub cells: Vec<Cell>,
    pub lift: Lift,
}

/// Vertices (as points) of a rational polytope in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPolytope {
    ambient: usize,
    vertices: Vec<Vec<Rat>>,
}

fn common_denominator(points: &[Vec<Rat>]) -> Int {
    points
        .iter()
        .flatten()
        .fold(Int::from(1), |l, x| num_integer::Integer::lcm(&l, x.denom()))
}

impl RationalPolytope {
    pub fn from_points(points: &[Vec<Rat>]) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyInput("point list"))?;
        let n = first.len();
        let l = common_denominator(points);
        let scaled: Vec<Vec<Int>> = points
            .iter()
            .map(|p| {
                check_dim(n, p.len())?;
                Ok(p.iter().map(|x| (x * to_rat(&l)).to_integer()).collect())
            })
            .collect::<Result<_>>()?;
        let lattice = LatticePolytope::from_points(&scaled)?;
        Ok(RationalPolytope {
            ambient: n,
            vertices: unscale(lattice.vertices(), &l),
        })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn vertices(&self) -> &[Vec<Rat>] {
        &self.vertices
    }
}

fn unscale(points: &[Vec<Int>], l: &Int) -> Vec<Vec<Rat>> {
    points
        .iter()
        .map(|p| p.iter().map(|x| Rat::new(x.clone(), l.clone())).collect())
        .collect()
}

/// A lower face: its vertices and a witness `c` such that the face is the
/// set of minimizers of `(c, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerFace {
    pub vertices: Vec<Vec<Rat>>,
    pub witness: Vec<Rat>,
}

/// Maximal lower faces of a lifted polytope in `R^{n+1}` (the last
/// coordinate is the height).
pub fn lower_faces(r: &RationalPolytope) -> Result<Vec<LowerFace>> {
    if r.ambient < 1 {
        return Err(Error::Precondition("lifted polytope needs a height coordinate".into()));
    }
    let l = common_denominator(&r.vertices);
    let scaled: Vec<Vec<Int>> = r
        .vertices
        .iter()
        .map(|p| p.iter().map(|x| (x * to_rat(&l)).to_integer()).collect())
        .collect();
    let lattice = LatticePolytope::from_points_uncapped(&scaled)?;
    Ok(lattice_lower_faces(&lattice)
        .into_iter()
        .map(|(idx, witness)| {
            let pts: Vec<Vec<Int>> = idx.iter().map(|&i| lattice.vertices()[i].clone()).collect();
            LowerFace {
                vertices: unscale(&pts, &l),
                witness,
            }
        })
        .collect())
}

/// Lower faces as vertex-index sets with witnesses.
pub(crate) fn lattice_lower_faces(r: &LatticePolytope) -> Vec<(Vec<usize>, Vec<Rat>)> {
    let n1 = r.ambient();
    let h = n1 - 1;
    let all: Vec<usize> = (0..r.num_vertices()).collect();
    if r.dim() == 0 {
        return vec![(all, vec![Rat::zero(); h])];
    }
    // Whole polytope is a lower face iff the vertical direction is not in Lin(R).
    let v0 = &r.vertices()[0];
    let diffs: Vec<Vec<Rat>> = r.vertices()[1..]
        .iter()
        .map(|v| v.iter().zip(v0).map(|(a, b)| to_rat(&(a - b))).collect())
        .collect();
    let perp = kernel_lattice_basis(&Mat::from_rows(&diffs, n1).expect("consistent"));
    if let Some(w) = perp.vectors().iter().find(|w| !w[h].is_zero()) {
        let s = to_rat(&w[h]);
        let c = w[..h].iter().map(|x| to_rat(x) / &s).collect();
        return vec![(all, c)];
    }
    r.facets()
        .expect("positive dimension")
        .iter()
        .filter(|f| f.normal[h].is_positive())
        .map(|f| {
            let s = to_rat(&f.normal[h]);
            let c = f.normal[..h].iter().map(|x| to_rat(x) / &s).collect();
            (f.vertices.clone(), c)
        })
        .collect()
}

fn project(p: &[Int], pivots: &[usize]) -> Vec<Int> {
    pivots.iter().map(|&j| p[j].clone()).collect()
}

fn add_vec(a: &[Int], b: &[Int]) -> Vec<Int> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn target_of(p: &LatticePolytope, q: &LatticePolytope, op: Operation) -> Result<LatticePolytope> {
    match op {
        Operation::Sum => p.minkowski_sum(q),
        Operation::Conv => p.conv_union(q),
    }
}

/// Builds the subdivision for a given lift; `Ok(None)` if the lift is not
/// generic for this instance.
pub fn subdivide_with_lift(
    p: &LatticePolytope,
    q: &LatticePolytope,
    op: Operation,
    lift: Lift,
) -> Result<Option<Subdivision>> {
    check_dim(p.ambient(), q.ambient())?;
    check_dim(p.ambient(), lift.alpha.len())?;
    let target = target_of(p, q, op)?;
    let d = target.dim();
    let n = p.ambient();
    let zero = vec![Rat::zero(); n];
    let alpha_q: Vec<Rat> = lift.alpha.iter().map(to_rat).collect();
    let beta = to_rat(&lift.beta);

    let mut raw_cells: Vec<(Vec<Vec<Int>>, Vec<Rat>)> = Vec::new();
    if d == 0 {
        raw_cells.push((target.vertices().to_vec(), zero.clone()));
    } else {
        let pivots = target.pivot_coordinates().to_vec();
        let mut lifted: BTreeMap<Vec<Int>, Vec<Int>> = BTreeMap::new();
        match op {
            Operation::Sum => {
                for pv in p.vertices() {
                    for qv in q.vertices() {
                        let orig = add_vec(pv, qv);
                        let mut l = project(&orig, &pivots);
                        l.push(dot(&lift.alpha, qv) + &lift.beta);
                        lifted.insert(l, orig);
                    }
                }
            }
            Operation::Conv => {
                for pv in p.vertices() {
                    let mut l = project(pv, &pivots);
                    l.push(Int::zero());
                    lifted.insert(l, pv.clone());
                }
                for qv in q.vertices() {
                    let mut l = project(qv, &pivots);
                    l.push(dot(&lift.alpha, qv) + &lift.beta);
                    lifted.insert(l, qv.clone());
                }
            }
        }
        let pts: Vec<Vec<Int>> = lifted.keys().cloned().collect();
        let r = LatticePolytope::from_points_uncapped(&pts)?;
        for (idx, c) in lattice_lower_faces(&r) {
            let cell_pts: Vec<Vec<Int>> =
                idx.iter().map(|&i| lifted[&r.vertices()[i]].clone()).collect();
            let mut witness = zero.clone();
            for (k, &j) in pivots.iter().enumerate() {
                witness[j] = c[k].clone();
            }
            raw_cells.push((cell_pts, witness));
        }
    }

    let mut cells = Vec::with_capacity(raw_cells.len());
    for (pts, witness) in raw_cells {
        let polytope = LatticePolytope::from_points(&pts)?;
        let shifted: Vec<Rat> = witness.iter().zip(&alpha_q).map(|(a, b)| a + b).collect();
        let f = p.face_unchecked(&witness);
        let g = q.face_unchecked(&shifted);
        let kind = match op {
            Operation::Sum => CellKind::Product,
            Operation::Conv => {
                let mp = p.min_value(&witness);
                let mq = q.min_value(&shifted) + &beta;
                match mp.cmp(&mq) {
                    std::cmp::Ordering::Less => CellKind::PureP,
                    std::cmp::Ordering::Greater => CellKind::PureQ,
                    std::cmp::Ordering::Equal => CellKind::Join,
                }
            }
        };
        let (f, g) = match kind {
            CellKind::PureP => (Some(f), None),
            CellKind::PureQ => (None, Some(g)),
            _ => (Some(f), Some(g)),
        };
        if polytope.dim() != d || !kind_condition(kind, f.as_ref(), g.as_ref(), d) {
            return Ok(None);
        }
        if reconstruct(kind, f.as_ref(), g.as_ref())? != polytope {
            return Ok(None);
        }
        let volume = normalized_volume(&polytope);
        cells.push(Cell {
            polytope,
            kind,
            f,
            g,
            witness,
            volume,
        });
    }
    cells.sort_by(|a, b| a.polytope.cmp(&b.polytope));
    Ok(Some(Subdivision {
        operation: op,
        p: p.clone(),
        q: q.clone(),
        target,
        cells,
        lift,
    }))
}

fn kind_condition(kind: CellKind, f: Option<&Face>, g: Option<&Face>, d: usize) -> bool {
    match (kind, f, g) {
        (CellKind::Product, Some(f), Some(g)) => f.dim + g.dim == d,
        (CellKind::Join, Some(f), Some(g)) => f.dim + g.dim + 1 == d,
        (CellKind::PureP, Some(f), None) => f.dim == d,
        (CellKind::PureQ, None, Some(g)) => g.dim == d,
        _ => false,
    }
}

fn reconstruct(kind: CellKind, f: Option<&Face>, g: Option<&Face>) -> Result<LatticePolytope> {
    match (kind, f, g) {
        (CellKind::Product, Some(f), Some(g)) => f.polytope.minkowski_sum(&g.polytope),
        (CellKind::Join, Some(f), Some(g)) => f.polytope.conv_union(&g.polytope),
        (CellKind::PureP, Some(f), None) => Ok(f.polytope.clone()),
        (CellKind::PureQ, None, Some(g)) => Ok(g.polytope.clone()),
        _ => Err(Error::Precondition(format!(
            "cell of kind {} has inconsistent provenance",
            kind.as_str()
        ))),
    }
}

fn random_lift(target: &LatticePolytope, rng: &mut ChaCha8Rng, range: i64) -> (Vec<Int>, Int) {
    let mut alpha = vec![Int::zero(); target.ambient()];
    if target.dim() > 0 {
        for &j in target.pivot_coordinates() {
            alpha[j] = Int::from(rng.gen_range(-range..=range));
        }
    }
    let beta = Int::from(rng.gen_range(-range..=range));
    (alpha, beta)
}

fn generic_subdivision(
    p: &LatticePolytope,
    q: &LatticePolytope,
    op: Operation,
    seed: u64,
) -> Result<Subdivision> {
    check_dim(p.ambient(), q.ambient())?;
    let target = target_of(p, q, op)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut range = INITIAL_RANGE;
    for retries in 0..MAX_RETRIES {
        let (alpha, beta) = random_lift(&target, &mut rng, range);
        let lift = Lift {
            alpha,
            beta,
            seed,
            retries,
        };
        if let Some(s) = subdivide_with_lift(p, q, op, lift)? {
            return Ok(s);
        }
        range = range.saturating_mul(2);
    }
    Err(Error::GenericityFailure {
        retries: MAX_RETRIES,
    })
}

/// Draws lifts from the seeded generator until one is verified generic for
/// `op` on this instance.
pub fn choose_generic_lift(
    p: &LatticePolytope,
    q: &LatticePolytope,
    op: Operation,
    seed: u64,
) -> Result<Lift> {
    generic_subdivision(p, q, op, seed).map(|s| s.lift)
}

/// Subdivision of `P + Q` into affine products of faces.
pub fn subdivide_sum(p: &LatticePolytope, q: &LatticePolytope, seed: u64) -> Result<Subdivision> {
    generic_subdivision(p, q, Operation::Sum, seed)
}

/// Subdivision of `conv(P ∪ Q)` into joins of faces and faces of `P` or `Q`.
pub fn subdivide_conv(p: &LatticePolytope, q: &LatticePolytope, seed: u64) -> Result<Subdivision> {
    generic_subdivision(p, q, Operation::Conv, seed)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of [`verify_subdivision`], one entry per check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubdivisionAudit {
    pub checks: Vec<Check>,
}

impl SubdivisionAudit {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn check(name: &'static str, failures: Vec<String>) -> Check {
    Check {
        name,
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            "ok".into()
        } else {
            failures.join("; ")
        },
    }
}

/// Index set of the smallest face of `cell` containing the given vertices.
fn is_face(cell: &LatticePolytope, idx: &[usize]) -> bool {
    if idx.len() == cell.num_vertices() {
        return true;
    }
    let Ok(facets) = cell.facets() else {
        return false;
    };
    let mut c = vec![Rat::zero(); cell.ambient()];
    for f in facets {
        if idx.iter().all(|i| f.vertices.binary_search(i).is_ok()) {
            for (x, y) in c.iter_mut().zip(&f.normal) {
                *x += to_rat(y);
            }
        }
    }
    cell.argmin(&c) == idx
}

fn common_vertices(a: &LatticePolytope, b: &LatticePolytope) -> (Vec<usize>, Vec<usize>) {
    let mut ia = Vec::new();
    let mut ib = Vec::new();
    for (i, v) in a.vertices().iter().enumerate() {
        if let Ok(j) = b.vertices().binary_search(v) {
            ia.push(i);
            ib.push(j);
        }
    }
    (ia, ib)
}

fn separated_by_facet(a: &LatticePolytope, b: &LatticePolytope) -> bool {
    let Ok(facets) = a.facets() else {
        return false;
    };
    facets
        .iter()
        .any(|f| b.vertices().iter().all(|v| dot(&f.normal, v) <= f.offset))
}

fn interiors_meet(a: &LatticePolytope, b: &LatticePolytope, pivots: &[usize]) -> bool {
    if separated_by_facet(a, b) || separated_by_facet(b, a) {
        return false;
    }
    // Both cells are full-dimensional in the pivot coordinates of the target.
    let proj = |p: &LatticePolytope| {
        if pivots.len() == p.ambient() {
            return p.clone();
        }
        let pts: Vec<Vec<Int>> = p.vertices().iter().map(|v| project(v, pivots)).collect();
        LatticePolytope::from_points(&pts).expect("projection of a cell")
    };
    let (pa, pb) = (proj(a), proj(b));
    let (Ok(fa), Ok(fb)) = (pa.facets(), pb.facets()) else {
        return false;
    };
    let hs: Vec<(Vec<Rat>, Rat)> = fa
        .iter()
        .chain(fb)
        .map(|f| (f.normal.iter().map(to_rat).collect(), to_rat(&f.offset)))
        .collect();
    let mut centroid = vec![Rat::zero(); pivots.len()];
    for v in pa.vertices() {
        for (x, y) in centroid.iter_mut().zip(v) {
            *x += to_rat(y);
        }
    }
    let m = to_rat(&Int::from(pa.num_vertices()));
    for x in centroid.iter_mut() {
        *x /= &m;
    }
    strict_feasible(&hs, &centroid)
}

/// Checks volume additivity, pairwise intersections, the kind/dimension
/// conditions, provenance reconstruction, containment and the volume
/// divisibility of every cell.
pub fn verify_subdivision(s: &Subdivision) -> SubdivisionAudit {
    let d = s.target.dim();
    let mut checks = Vec::new();

    let total: Int = s.cells.iter().map(|c| normalized_volume(&c.polytope)).sum();
    let target_vol = normalized_volume(&s.target);
    let mut fails = Vec::new();
    if total != target_vol {
        fails.push(format!("cell volumes sum to {total}, target has {target_vol}"));
    }
    for (i, c) in s.cells.iter().enumerate() {
        let v = normalized_volume(&c.polytope);
        if v != c.volume {
            fails.push(format!("cell {i} records volume {} but has {v}", c.volume));
        }
    }
    checks.push(check("volume_additivity", fails));

    let pivots: Vec<usize> = if d > 0 {
        s.target.pivot_coordinates().to_vec()
    } else {
        Vec::new()
    };
    let pairs: Vec<(usize, usize)> = (0..s.cells.len())
        .flat_map(|i| (i + 1..s.cells.len()).map(move |j| (i, j)))
        .collect();
    let mut fails: Vec<String> = pairs
        .par_iter()
        .filter_map(|&(i, j)| {
            let (a, b) = (&s.cells[i].polytope, &s.cells[j].polytope);
            if d == 0 {
                return Some(format!("cells {i} and {j} both cover a point"));
            }
            let (ia, ib) = common_vertices(a, b);
            if !ia.is_empty() && !(is_face(a, &ia) && is_face(b, &ib)) {
                return Some(format!("cells {i} and {j} share vertices that are not a common face"));
            }
            if interiors_meet(a, b, &pivots) {
                return Some(format!("cells {i} and {j} overlap"));
            }
            None
        })
        .collect();
    fails.sort();
    checks.push(check("pairwise_intersections", fails));

    let mut fails = Vec::new();
    for (i, c) in s.cells.iter().enumerate() {
        if c.polytope.dim() != d {
            fails.push(format!("cell {i} has dimension {} != {d}", c.polytope.dim()));
        }
        let allowed = match s.operation {
            Operation::Sum => c.kind == CellKind::Product,
            Operation::Conv => c.kind != CellKind::Product,
        };
        if !allowed || !kind_condition(c.kind, c.f.as_ref(), c.g.as_ref(), d) {
            fails.push(format!("cell {i} violates the {} dimension condition", c.kind.as_str()));
        }
    }
    checks.push(check("cell_kinds", fails));

    let mut fails = Vec::new();
    let alpha: Vec<Rat> = s.lift.alpha.iter().map(to_rat).collect();
    for (i, c) in s.cells.iter().enumerate() {
        let shifted: Vec<Rat> = c.witness.iter().zip(&alpha).map(|(a, b)| a + b).collect();
        if let Some(f) = &c.f {
            if s.p.face_unchecked(&c.witness).polytope != f.polytope {
                fails.push(format!("cell {i}: F does not minimize the witness over P"));
            }
        }
        if let Some(g) = &c.g {
            if s.q.face_unchecked(&shifted).polytope != g.polytope {
                fails.push(format!("cell {i}: G does not minimize witness + alpha over Q"));
            }
        }
        match reconstruct(c.kind, c.f.as_ref(), c.g.as_ref()) {
            Ok(r) if r == c.polytope => {}
            Ok(_) => fails.push(format!("cell {i}: provenance does not reconstruct the cell")),
            Err(e) => fails.push(format!("cell {i}: {e}")),
        }
    }
    checks.push(check("provenance", fails));

    let mut fails = Vec::new();
    for (i, c) in s.cells.iter().enumerate() {
        for v in c.polytope.vertices() {
            let x: Vec<Rat> = v.iter().map(to_rat).collect();
            if !s.target.contains(&x).unwrap_or(false) {
                fails.push(format!("cell {i} has a vertex outside the target"));
                break;
            }
        }
    }
    checks.push(check("containment", fails));

    let mut fails = Vec::new();
    for (i, c) in s.cells.iter().enumerate() {
        let (Some(f), Some(g)) = (&c.f, &c.g) else {
            continue;
        };
        let vf = normalized_volume(&f.polytope);
        let vg = normalized_volume(&g.polytope);
        let den = match c.kind {
            CellKind::Product => binomial(d as u64, f.dim as u64) * vf * vg,
            _ => vf * vg,
        };
        if den.is_zero() || !(&c.volume % &den).is_zero() {
            fails.push(format!("cell {i}: volume {} not divisible by {den}", c.volume));
        }
    }
    checks.push(check("volume_divisibility", fails));

    SubdivisionAudit { checks }
}
