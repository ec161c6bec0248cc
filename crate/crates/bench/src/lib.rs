//! Benchmark fixtures shared by the criterion targets.

use newton_core::tropical::sample_pk;
use newton_core::LatticePolytope;

/// Seeded member of `P_k` in `R^n` with the certifier's default bounds.
pub fn pk_member(k: usize, n: usize, seed: u64) -> LatticePolytope {
    let params = newton_core::certifier::default_sample_params(k as u32);
    sample_pk(k, n, &params, seed).expect("sample within caps").1
}

/// The dilated simplex `d·Δ^n`.
pub fn dilated_simplex(n: usize, d: i64) -> LatticePolytope {
    LatticePolytope::simplex(n)
        .and_then(|s| s.dilate(&d.into()))
        .expect("small simplex")
}
