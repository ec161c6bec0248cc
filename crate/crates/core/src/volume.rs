//! Normalized lattice volume.
//!
//! For a lattice polytope `P` of dimension `r`, pick a basis of the lattice
//! `Lin(P) ∩ Z^n`, express `P` in those coordinates and take `r!` times the
//! Euclidean volume of the image. The result is an integer, independent of
//! the chosen basis, and equals 1 for every unimodular simplex.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{det_int, inverse, lin_lattice_basis, to_rat, Int, LatticeBasis, Mat, Rat};
use crate::polytope::LatticePolytope;

/// Affine isomorphism from `Aff(P) ∩ Z^n` onto `Z^r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizationMap {
    basepoint: Vec<Int>,
    basis: LatticeBasis,
    pivots: Vec<usize>,
    // Inverse of the basis restricted to the pivot coordinates.
    solve: Mat<Rat>,
}

impl NormalizationMap {
    /// Map sending `basepoint + B y` to `y`. `basis` must span a lattice on
    /// whose rational span projection to `pivots` is injective.
    pub fn new(basepoint: Vec<Int>, basis: LatticeBasis, pivots: Vec<usize>) -> Result<Self> {
        check_dim(basis.ambient(), basepoint.len())?;
        check_dim(basis.rank(), pivots.len())?;
        let r = basis.rank();
        let mut m: Mat<Rat> = Mat::zeros(r, r);
        for (k, v) in basis.vectors().iter().enumerate() {
            for (i, &j) in pivots.iter().enumerate() {
                m[(i, k)] = to_rat(&v[j]);
            }
        }
        let solve = inverse(&m)?.ok_or_else(|| {
            Error::Precondition("basis is not injective on the pivot coordinates".into())
        })?;
        Ok(NormalizationMap {
            basepoint,
            basis,
            pivots,
            solve,
        })
    }

    pub fn basepoint(&self) -> &[Int] {
        &self.basepoint
    }

    pub fn basis(&self) -> &LatticeBasis {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.rank()
    }

    /// Lattice coordinates of `x`; fails if `x` is not a lattice point of the
    /// affine hull.
    pub fn apply(&self, x: &[Int]) -> Result<Vec<Int>> {
        check_dim(self.basepoint.len(), x.len())?;
        let diff: Vec<Int> = x.iter().zip(&self.basepoint).map(|(a, b)| a - b).collect();
        let rhs: Vec<Rat> = self.pivots.iter().map(|&j| to_rat(&diff[j])).collect();
        let y = self.solve.mul_vec(&rhs)?;
        if y.iter().any(|v| !v.is_integer()) {
            return Err(Error::Precondition("point is not in the normalized lattice".into()));
        }
        let y: Vec<Int> = y.iter().map(|v| v.to_integer()).collect();
        if self.unapply_diff(&y) != diff {
            return Err(Error::Precondition("point is not in the affine hull".into()));
        }
        Ok(y)
    }

    fn unapply_diff(&self, y: &[Int]) -> Vec<Int> {
        let mut out = vec![Int::zero(); self.basepoint.len()];
        for (v, c) in self.basis.vectors().iter().zip(y) {
            for (o, x) in out.iter_mut().zip(v) {
                *o += x * c;
            }
        }
        out
    }

    /// Inverse map `y ↦ basepoint + B y`.
    pub fn unapply(&self, y: &[Int]) -> Result<Vec<Int>> {
        check_dim(self.rank(), y.len())?;
        Ok(self
            .unapply_diff(y)
            .into_iter()
            .zip(&self.basepoint)
            .map(|(a, b)| a + b)
            .collect())
    }
}

/// Coordinates of `P` in a lattice basis of `Lin(P) ∩ Z^n`, based at its first vertex.
pub fn lattice_normalize(p: &LatticePolytope) -> Result<(LatticePolytope, NormalizationMap)> {
    let basis = lin_lattice_basis(p.vertices())?;
    lattice_normalize_with(p, basis)
}

/// As [`lattice_normalize`] with a caller-chosen lattice basis of `Lin(P) ∩ Z^n`.
pub fn lattice_normalize_with(
    p: &LatticePolytope,
    basis: LatticeBasis,
) -> Result<(LatticePolytope, NormalizationMap)> {
    check_dim(p.dim(), basis.rank())?;
    let pivots = if p.dim() == 0 {
        Vec::new()
    } else {
        p.pivot_coordinates().to_vec()
    };
    let map = NormalizationMap::new(p.vertices()[0].clone(), basis, pivots)?;
    let pts = p
        .vertices()
        .iter()
        .map(|v| map.apply(v))
        .collect::<Result<Vec<_>>>()?;
    let image = if p.dim() == 0 {
        LatticePolytope::point(Vec::new())
    } else {
        LatticePolytope::from_points(&pts)?
    };
    Ok((image, map))
}

/// Full-dimensional simplices (as vertex-index lists) with disjoint interiors
/// covering the polytope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangulation {
    pub simplices: Vec<Vec<usize>>,
}

/// Placing triangulation in canonical vertex order.
pub fn triangulate(p: &LatticePolytope) -> Triangulation {
    Triangulation {
        simplices: p.triangulation_simplices().to_vec(),
    }
}

fn simplex_det(p: &LatticePolytope, s: &[usize], pivots: &[usize]) -> Int {
    let v = p.vertices();
    let base = &v[s[0]];
    let rows: Vec<Vec<Int>> = s[1..]
        .iter()
        .map(|&i| pivots.iter().map(|&j| &v[i][j] - &base[j]).collect())
        .collect();
    let m = Mat::from_rows(&rows, pivots.len()).expect("square simplex matrix");
    det_int(&m).expect("square").abs()
}

/// Normalized volume `Vol(P)` (1 for a point).
pub fn normalized_volume(p: &LatticePolytope) -> Int {
    if p.dim() == 0 {
        return Int::one();
    }
    let pivots = p.pivot_coordinates();
    let projected: Int = p
        .triangulation_simplices()
        .iter()
        .map(|s| simplex_det(p, s, pivots))
        .sum();
    if p.dim() == p.ambient() {
        return projected;
    }
    // Projection to the pivot coordinates scales lattice volume by the index
    // of the projected lattice.
    let basis = lin_lattice_basis(p.vertices()).expect("nonempty");
    let mut m: Mat<Int> = Mat::zeros(p.dim(), p.dim());
    for (k, v) in basis.vectors().iter().enumerate() {
        for (i, &j) in pivots.iter().enumerate() {
            m[(i, k)] = v[j].clone();
        }
    }
    let index = det_int(&m).expect("square").abs();
    let (q, r) = projected.div_rem(&index);
    debug_assert!(r.is_zero());
    q
}

pub fn binomial(n: u64, k: u64) -> Int {
    if k > n {
        return Int::zero();
    }
    let k = k.min(n - k);
    let mut acc = Int::one();
    for i in 0..k {
        acc = acc * Int::from(n - i) / Int::from(i + 1);
    }
    acc
}

/// Parity of an integer quantity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(v: &Int) -> Parity {
        if v.is_even() {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

/// Parity of `binom(i + j, i)`: odd exactly when adding `i` and `j` in binary
/// produces no carry.
pub fn binom_parity(i: u64, j: u64) -> Parity {
    if i & j == 0 {
        Parity::Odd
    } else {
        Parity::Even
    }
}

fn exact_div(num: &Int, den: &Int) -> Result<Int> {
    let (q, r) = num.div_rem(den);
    if den.is_zero() || !r.is_zero() {
        return Err(Error::InexactDivision {
            numerator: num.to_string(),
            denominator: den.to_string(),
        });
    }
    Ok(q)
}

/// `Vol(P+Q) / (binom(i+j, i) Vol(P) Vol(Q))` for an affine product.
pub fn affine_product_factor(p: &LatticePolytope, q: &LatticePolytope) -> Result<Int> {
    let sum = p.minkowski_sum(q)?;
    let (i, j) = (p.dim(), q.dim());
    if sum.dim() != i + j {
        return Err(Error::NotAffineProduct {
            sum: sum.dim(),
            expected: i + j,
        });
    }
    let den = binomial((i + j) as u64, i as u64) * normalized_volume(p) * normalized_volume(q);
    exact_div(&normalized_volume(&sum), &den)
}

/// `Vol(conv(P ∪ Q)) / (Vol(P) Vol(Q))` for a join.
pub fn join_factor(p: &LatticePolytope, q: &LatticePolytope) -> Result<Int> {
    let hull = p.conv_union(q)?;
    let expected = p.dim() + q.dim() + 1;
    if hull.dim() != expected {
        return Err(Error::NotJoin {
            hull: hull.dim(),
            expected,
        });
    }
    let den = normalized_volume(p) * normalized_volume(q);
    exact_div(&normalized_volume(&hull), &den)
}
