//! Property tests for the algebraic and geometric invariants.

use newton_core::certifier::{check_qk, parity_obstruction, CheckMode};
use newton_core::linalg::{
    det, det_int, hnf, in_lattice, int_vec, lin_lattice_basis, rat, to_rat, Int, LatticeBasis, Mat, Rat,
};
use newton_core::subdivision::{subdivide_conv, subdivide_sum, verify_subdivision, CellKind};
use newton_core::tropical::{
    compile_with_trees, eval_network, eval_pair, sample_network, sample_pk, synthesize_network,
    tree_to_polytope, ConstructionTree, NetworkParams, SampleParams,
};
use newton_core::volume::{
    affine_product_factor, binomial, join_factor, lattice_normalize_with, normalized_volume,
};
use newton_core::LatticePolytope;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn int_matrix(rows: usize, cols: usize, r: i64) -> impl Strategy<Value = Mat<Int>> {
    prop::collection::vec(prop::collection::vec(-r..=r, cols), rows).prop_map(move |m| {
        let rows: Vec<Vec<Int>> = m.iter().map(|row| int_vec(row)).collect();
        Mat::from_rows(&rows, cols).unwrap()
    })
}

fn point_set(n: usize, max_pts: usize, r: i64) -> impl Strategy<Value = Vec<Vec<Int>>> {
    prop::collection::vec(prop::collection::vec(-r..=r, n), 1..=max_pts)
        .prop_map(|pts| pts.iter().map(|p| int_vec(p)).collect())
}

fn polytope(n: usize, max_pts: usize, r: i64) -> impl Strategy<Value = LatticePolytope> {
    point_set(n, max_pts, r).prop_map(|pts| LatticePolytope::from_points(&pts).unwrap())
}

fn polytope_pair(max_n: usize) -> impl Strategy<Value = (LatticePolytope, LatticePolytope)> {
    (1..=max_n).prop_flat_map(|n| (polytope(n, 5, 2), polytope(n, 5, 2)))
}

fn direction(n: usize) -> impl Strategy<Value = Vec<Rat>> {
    prop::collection::vec((-5i64..=5, 1i64..=3), n)
        .prop_map(|v| v.into_iter().map(|(a, b)| rat(a, b)).collect())
}

/// Unimodular matrix as a product of elementary operations.
fn unimodular(n: usize) -> impl Strategy<Value = Mat<Int>> {
    prop::collection::vec((0..n, 0..n, -2i64..=2, any::<bool>()), 0..12).prop_map(move |ops| {
        let mut m: Mat<Int> = Mat::identity(n);
        for (i, j, c, swap) in ops {
            if swap {
                for col in 0..n {
                    let t = m[(i, col)].clone();
                    m[(i, col)] = m[(j, col)].clone();
                    m[(j, col)] = t;
                }
            } else if i != j {
                for col in 0..n {
                    let add = &m[(j, col)] * Int::from(c);
                    m[(i, col)] += add;
                }
            }
        }
        m
    })
}

fn min_over(p: &LatticePolytope, c: &[Rat]) -> Rat {
    p.min_value(c)
}

fn brute_force_in_lattice(v: &[Int], basis: &[Vec<Int>], c: i64) -> bool {
    let k = basis.len();
    let mut coeffs = vec![-c; k];
    loop {
        let mut s = vec![Int::zero(); v.len()];
        for (b, &a) in basis.iter().zip(&coeffs) {
            for (x, y) in s.iter_mut().zip(b) {
                *x += y * Int::from(a);
            }
        }
        if s == v {
            return true;
        }
        let mut i = 0;
        loop {
            if i == k {
                return false;
            }
            coeffs[i] += 1;
            if coeffs[i] <= c {
                break;
            }
            coeffs[i] = -c;
            i += 1;
        }
    }
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn hnf_is_a_unimodular_column_transform(m in (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| int_matrix(r, c, 6))) {
        let (h, u) = hnf(&m);
        prop_assert_eq!(m.mul(&u).unwrap(), h);
        prop_assert!(det_int(&u).unwrap().abs().is_one());
    }

    #[test]
    fn det_is_multiplicative(n in 1usize..=4, seed in any::<u64>()) {
        let mut rng = seed;
        let mut next = || { rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); ((rng >> 33) % 11) as i64 - 5 };
        let mut mk = || {
            let rows: Vec<Vec<Rat>> = (0..n).map(|_| (0..n).map(|_| rat(next(), 1)).collect()).collect();
            Mat::from_rows(&rows, n).unwrap()
        };
        let (a, b) = (mk(), mk());
        prop_assert_eq!(det(&a.mul(&b).unwrap()).unwrap(), det(&a).unwrap() * det(&b).unwrap());
    }

    #[test]
    fn in_lattice_matches_enumeration(
        basis in prop::collection::vec(prop::collection::vec(-2i64..=2, 2), 2),
        coeffs in prop::collection::vec(-2i64..=2, 2),
        noise in prop::collection::vec(-1i64..=1, 2),
    ) {
        let b: Vec<Vec<Int>> = basis.iter().map(|v| int_vec(v)).collect();
        let Ok(lb) = LatticeBasis::new(2, b.clone()) else { return Ok(()); };
        let mut v = vec![Int::zero(), Int::zero()];
        for (bv, &c) in b.iter().zip(&coeffs) {
            for (x, y) in v.iter_mut().zip(bv) { *x += y * Int::from(c); }
        }
        for (x, e) in v.iter_mut().zip(&noise) { *x += Int::from(*e); }
        // Coordinates of members are bounded by |det|-scaled entries; 12 covers them here.
        prop_assert_eq!(in_lattice(&v, &lb).unwrap(), brute_force_in_lattice(&v, &b, 12));
    }

    #[test]
    fn lin_lattice_basis_spans_differences(pts in (1usize..=4).prop_flat_map(|n| point_set(n, 6, 3))) {
        let b = lin_lattice_basis(&pts).unwrap();
        for p in &pts {
            let d: Vec<Int> = p.iter().zip(&pts[0]).map(|(a, c)| a - c).collect();
            prop_assert!(in_lattice(&d, &b).unwrap());
        }
        // Each basis vector is in the rational span of the differences.
        let n = pts[0].len();
        let diffs: Vec<Vec<Rat>> = pts.iter().map(|p| p.iter().zip(&pts[0]).map(|(a, c)| to_rat(&(a - c))).collect()).collect();
        let base_rank = newton_core::linalg::rank(&Mat::from_rows(&diffs, n).unwrap());
        prop_assert_eq!(base_rank, b.rank());
        for v in b.vectors() {
            let mut rows = diffs.clone();
            rows.push(v.iter().map(to_rat).collect());
            prop_assert_eq!(newton_core::linalg::rank(&Mat::from_rows(&rows, n).unwrap()), base_rank);
        }
    }
}

proptest! {
    #![proptest_config(config(96))]

    #[test]
    fn support_functions((p, q) in polytope_pair(4), seed in any::<u64>()) {
        let n = p.ambient();
        let c: Vec<Rat> = (0..n).map(|i| rat(((seed >> (8 * i)) % 9) as i64 - 4, 1 + ((seed >> (8 * i + 4)) % 3) as i64)).collect();
        let s = p.minkowski_sum(&q).unwrap();
        prop_assert_eq!(min_over(&s, &c), min_over(&p, &c) + min_over(&q, &c));
        let h = p.conv_union(&q).unwrap();
        prop_assert_eq!(min_over(&h, &c), min_over(&p, &c).min(min_over(&q, &c)));
    }

    #[test]
    fn faces_of_sums_are_sums_of_faces((p, q) in polytope_pair(3), c in direction(3)) {
        let c = &c[..p.ambient()];
        prop_assume!(c.iter().any(|x| !x.is_zero()));
        let s = p.minkowski_sum(&q).unwrap();
        let lhs = s.face_in_direction(c).unwrap().polytope;
        let rhs = p.face_in_direction(c).unwrap().polytope.minkowski_sum(&q.face_in_direction(c).unwrap().polytope).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn faces_of_faces_are_faces(p in polytope(3, 7, 2)) {
        let faces = p.faces_of_dim_at_least(0).unwrap();
        let set: std::collections::BTreeSet<_> = faces.iter().map(|f| f.polytope.clone()).collect();
        for f in faces.iter().filter(|f| f.dim >= 1) {
            for g in f.polytope.faces_of_dim_at_least(0).unwrap() {
                prop_assert!(set.contains(&g.polytope));
            }
        }
    }

    #[test]
    fn from_points_idempotent_and_equality(p in polytope(4, 8, 3)) {
        let again = LatticePolytope::from_points(p.vertices()).unwrap();
        prop_assert_eq!(&again, &p);
        for v in p.vertices() {
            prop_assert!(again.contains(&v.iter().map(to_rat).collect::<Vec<_>>()).unwrap());
        }
    }

    #[test]
    fn volume_is_unimodular_invariant(
        (p, u) in (1usize..=4).prop_flat_map(|n| (polytope(n, 7, 3), unimodular(n))),
        t in prop::collection::vec(-5i64..=5, 4),
    ) {
        let t = int_vec(&t[..p.ambient()]);
        let img = p.unimodular_image(&u, &t).unwrap();
        prop_assert_eq!(normalized_volume(&img), normalized_volume(&p));
    }

    #[test]
    fn volume_independent_of_lattice_basis((p, u) in (1usize..=4).prop_flat_map(|n| (polytope(n, 7, 3), unimodular(n)))) {
        let b = lin_lattice_basis(p.vertices()).unwrap();
        let r = b.rank();
        prop_assume!(r > 0);
        // Twist the basis by the leading r×r block of a unimodular matrix.
        let u = if r == u.rows() { u } else { Mat::identity(r) };
        let twisted: Vec<Vec<Int>> = (0..r)
            .map(|j| {
                let mut v = vec![Int::zero(); p.ambient()];
                for i in 0..r {
                    for (x, y) in v.iter_mut().zip(&b.vectors()[i]) {
                        *x += y * &u[(i, j)];
                    }
                }
                v
            })
            .collect();
        let tb = LatticeBasis::new(p.ambient(), twisted).unwrap();
        let (img, _) = lattice_normalize_with(&p, tb).unwrap();
        prop_assert_eq!(normalized_volume(&img), normalized_volume(&p));
    }

    #[test]
    fn volumes_are_positive_integers(p in polytope(4, 9, 4)) {
        prop_assert!(normalized_volume(&p) >= Int::one());
    }

    #[test]
    fn product_and_join_factors_are_exact((p, q) in polytope_pair(4)) {
        if p.minkowski_sum(&q).unwrap().dim() == p.dim() + q.dim() {
            prop_assert!(affine_product_factor(&p, &q).is_ok());
        }
        if p.conv_union(&q).unwrap().dim() == p.dim() + q.dim() + 1 {
            prop_assert!(join_factor(&p, &q).is_ok());
        }
    }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn subdivisions_are_sound((p, q) in polytope_pair(3), seed in any::<u64>()) {
        for s in [subdivide_sum(&p, &q, seed).unwrap(), subdivide_conv(&p, &q, seed).unwrap()] {
            let audit = verify_subdivision(&s);
            prop_assert!(audit.passed(), "{:?}", audit);
            let total: Int = s.cells.iter().map(|c| c.volume.clone()).sum();
            prop_assert_eq!(total, normalized_volume(&s.target));
            let d = s.target.dim() as u64;
            for c in &s.cells {
                if let (Some(f), Some(g)) = (&c.f, &c.g) {
                    let unit = normalized_volume(&f.polytope) * normalized_volume(&g.polytope);
                    let unit = if c.kind == CellKind::Product { unit * binomial(d, f.dim as u64) } else { unit };
                    prop_assert!((&c.volume % unit).is_zero());
                }
            }
        }
    }

    #[test]
    fn subdivision_is_deterministic((p, q) in polytope_pair(3), seed in any::<u64>()) {
        prop_assert_eq!(subdivide_sum(&p, &q, seed).unwrap(), subdivide_sum(&p, &q, seed).unwrap());
        prop_assert_eq!(subdivide_conv(&p, &q, seed).unwrap(), subdivide_conv(&p, &q, seed).unwrap());
    }

    #[test]
    fn compile_matches_forward_pass(seed in any::<u64>(), pts in prop::collection::vec(prop::collection::vec((-9i64..=9, 1i64..=4), 4), 5)) {
        let net = sample_network(&NetworkParams::default(), seed);
        let outs = compile_with_trees(&net).unwrap();
        for x in &pts {
            let x: Vec<Rat> = x[..net.input_dim()].iter().map(|&(a, b)| rat(a, b)).collect();
            let y = eval_network(&net, &x).unwrap();
            for (o, yi) in outs.iter().zip(&y) {
                prop_assert_eq!(&eval_pair(&o.pair, &x).unwrap(), yi);
            }
        }
        for o in &outs {
            prop_assert!(o.pos_tree.depth() <= net.hidden_layers());
            prop_assert!(o.neg_tree.depth() <= net.hidden_layers());
            prop_assert_eq!(&tree_to_polytope(&o.pos_tree).unwrap(), &o.pair.pos);
            prop_assert_eq!(&tree_to_polytope(&o.neg_tree).unwrap(), &o.pair.neg);
        }
    }

    #[test]
    fn networks_are_positively_homogeneous(seed in any::<u64>(), x in prop::collection::vec(-9i64..=9, 4), l in (0i64..=7, 1i64..=5)) {
        let net = sample_network(&NetworkParams::default(), seed);
        let x: Vec<Rat> = x[..net.input_dim()].iter().map(|&a| rat(a, 1)).collect();
        let lam = rat(l.0, l.1);
        let scaled: Vec<Rat> = x.iter().map(|v| v * &lam).collect();
        let lhs = eval_network(&net, &scaled).unwrap();
        let rhs: Vec<Rat> = eval_network(&net, &x).unwrap().into_iter().map(|v| v * &lam).collect();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn synthesis_round_trip(kg in 0usize..=2, kh in 0usize..=2, n in 1usize..=3, seed in any::<u64>(), pts in prop::collection::vec(prop::collection::vec((-9i64..=9, 1i64..=4), 3), 5)) {
        let params = SampleParams { coord_range: 2, max_fanout: 2 };
        let (g, gp) = sample_pk(kg, n, &params, seed).unwrap();
        let (h, hp) = sample_pk(kh, n, &params, seed ^ 1).unwrap();
        let net = synthesize_network(&g, &h).unwrap();
        prop_assert_eq!(net.hidden_layers(), kg.max(kh));
        let pair = &compile_with_trees(&net).unwrap()[0].pair;
        for x in &pts {
            let x: Vec<Rat> = x[..n].iter().map(|&(a, b)| rat(a, b)).collect();
            let support = |p: &LatticePolytope| p.vertices().iter().map(|v| newton_core::linalg::dot_int_rat(v, &x)).max().unwrap();
            let expected = support(&gp) - support(&hp);
            prop_assert_eq!(&eval_network(&net, &x).unwrap()[0], &expected);
            prop_assert_eq!(&eval_pair(pair, &x).unwrap(), &expected);
        }
    }

    #[test]
    fn qk_is_face_closed(k in 0u32..=1, n in 2usize..=3, seed in any::<u64>()) {
        let (_, p) = sample_pk(k as usize, n, &SampleParams { coord_range: 2, max_fanout: 2 }, seed).unwrap();
        let cert = check_qk(&p, k).unwrap();
        prop_assert!(cert.member);
        for f in p.faces_of_dim_at_least(0).unwrap() {
            prop_assert!(check_qk(&f.polytope, k).unwrap().member);
        }
    }

    #[test]
    fn qk_closure_under_sum_and_hull(k in 0u32..=1, seed in any::<u64>(), pts in prop::collection::vec(prop::collection::vec(-2i64..=2, 2), 1..=4)) {
        // Members: sampled P_k polytopes and doubled lattice polytopes.
        let params = SampleParams { coord_range: 2, max_fanout: 2 };
        let (_, p) = sample_pk(k as usize, 2, &params, seed).unwrap();
        let raw: Vec<Vec<Int>> = pts.iter().map(|v| int_vec(v)).collect();
        let q = LatticePolytope::from_points(&raw).unwrap().dilate(&Int::from(2)).unwrap();
        prop_assert!(check_qk(&p, k).unwrap().member);
        prop_assert!(check_qk(&q, k).unwrap().member);
        prop_assert!(check_qk(&p.minkowski_sum(&q).unwrap(), k).unwrap().member);
        prop_assert!(check_qk(&p.conv_union(&q).unwrap(), k + 1).unwrap().member);
    }

    #[test]
    fn obstruction_cell_is_a_unit_simplex(seed in any::<u64>()) {
        let (_, p) = sample_pk(1, 2, &SampleParams::default(), seed).unwrap();
        let r = parity_obstruction(&p, 1, seed).unwrap();
        prop_assert!(r.passed, "{:?}", r);
        prop_assert_eq!(r.odd_cells.len(), 1);
        prop_assert_eq!(&r.odd_cells[0].volume, &Int::one());
        prop_assert!(r.odd_cells[0].simplex_translate);
    }

    #[test]
    fn short_circuit_agrees_with_full(p in polytope(3, 7, 2), k in 0u32..=1) {
        let full = check_qk(&p, k).unwrap();
        let short = newton_core::certifier::check_qk_with(&p, k, CheckMode::ShortCircuit).unwrap();
        prop_assert_eq!(full.member, short.member);
        prop_assert_eq!(full.first_violation, short.first_violation);
    }
}

#[test]
fn trees_with_shared_children_dilate() {
    let seg = ConstructionTree::conv(
        ConstructionTree::leaf(int_vec(&[0, 0])),
        ConstructionTree::leaf(int_vec(&[1, 1])),
    );
    let t = ConstructionTree::sum(vec![seg.clone(), seg.clone(), seg], 2);
    let expected = LatticePolytope::from_points(&[int_vec(&[0, 0]), int_vec(&[3, 3])]).unwrap();
    assert_eq!(tree_to_polytope(&t).unwrap(), expected);
}
