//! Exact integer and rational linear algebra.
//!
//! Everything here works over `BigInt` / `BigRational`; no floating point is
//! ever involved. The lattice routines (Hermite normal form, integer kernels,
//! saturated lattices of linear hulls) are what the volume normalization and
//! the facet machinery are built on.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{check_dim, Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub fn to_rat(v: &Int) -> Rat {
    Rat::from_integer(v.clone())
}

pub fn int_vec(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| Int::from(x)).collect()
}

pub fn rat_vec(v: &[Int]) -> Vec<Rat> {
    v.iter().map(to_rat).collect()
}

pub fn dot<T>(a: &[T], b: &[T]) -> T
where
    T: Zero + Clone,
    for<'x> &'x T: std::ops::Mul<&'x T, Output = T>,
{
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x * y)
}

pub fn dot_int_rat(a: &[Int], b: &[Rat]) -> Rat {
    a.iter()
        .zip(b)
        .fold(Rat::zero(), |acc, (x, y)| acc + y * to_rat(x))
}

/// Greatest common divisor of a vector's entries (non-negative; zero for the zero vector).
pub fn content(v: &[Int]) -> Int {
    v.iter().fold(Int::zero(), |g, x| g.gcd(x))
}

/// Divides a nonzero integer vector by its content.
pub fn primitive(v: &[Int]) -> Vec<Int> {
    let g = content(v);
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

/// Clears denominators and divides by the content, preserving direction.
pub fn primitive_from_rat(v: &[Rat]) -> Vec<Int> {
    let l = v.iter().fold(Int::one(), |l, x| l.lcm(x.denom()));
    let scaled: Vec<Int> = v.iter().map(|x| (x * to_rat(&l)).to_integer()).collect();
    primitive(&scaled)
}

/// Extended Euclid: returns `(g, x, y)` with `x*a + y*b = g >= 0`.
pub fn ext_gcd(a: &Int, b: &Int) -> (Int, Int, Int) {
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (Int::one(), Int::zero());
    let (mut old_t, mut t) = (Int::zero(), Int::one());
    while !r.is_zero() {
        let q = old_r.div_floor(&r);
        let nr = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, nr);
        let ns = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, ns);
        let nt = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, nt);
    }
    if old_r.is_negative() {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut l = f.debug_list();
        for r in 0..self.rows {
            l.entry(&&self.data[r * self.cols..(r + 1) * self.cols]);
        }
        l.finish()
    }
}

impl<T: Clone> Mat<T> {
    pub fn from_rows(rows: &[Vec<T>], cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            check_dim(cols, r.len())?;
            data.extend(r.iter().cloned());
        }
        Ok(Mat {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds a matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(columns: &[Vec<T>], rows: usize) -> Result<Self>
    where
        T: Zero,
    {
        let mut m = Mat::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            check_dim(rows, c.len())?;
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        Ok(m)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self
    where
        T: Zero,
    {
        Mat {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self
    where
        T: Zero + One,
    {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self[(i, j)].clone());
            }
        }
        Mat {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> Mat<U> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T> Mat<T>
where
    T: Clone + Zero,
    for<'x> &'x T: std::ops::Mul<&'x T, Output = T>,
{
    pub fn mul(&self, other: &Mat<T>) -> Result<Mat<T>> {
        check_dim(self.cols, other.rows)?;
        let mut out: Mat<T> = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let p = a * &other[(k, j)];
                    out[(i, j)] = out[(i, j)].clone() + p;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        check_dim(self.cols, v.len())?;
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }
}

impl Mat<Rat> {
    /// Scales every row by the lcm of its denominators. Returns the integer
    /// matrix and the per-row scale factors.
    pub fn clear_denominators(&self) -> (Mat<Int>, Vec<Int>) {
        let mut scales = Vec::with_capacity(self.rows);
        let mut data = Vec::with_capacity(self.data.len());
        for i in 0..self.rows {
            let l = self.row(i).iter().fold(Int::one(), |l, x| l.lcm(x.denom()));
            for x in self.row(i) {
                data.push((x * to_rat(&l)).to_integer());
            }
            scales.push(l);
        }
        (
            Mat {
                rows: self.rows,
                cols: self.cols,
                data,
            },
            scales,
        )
    }
}

/// Fraction-free (Bareiss) determinant of an integer matrix.
pub fn det_int(m: &Mat<Int>) -> Result<Int> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(Int::one());
    }
    let mut a = m.clone();
    let mut sign = Int::one();
    let mut prev = Int::one();
    for k in 0..n - 1 {
        if a[(k, k)].is_zero() {
            match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                Some(i) => {
                    a.swap_rows(k, i);
                    sign = -sign;
                }
                None => return Ok(Int::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                a[(i, j)] = v / &prev;
            }
        }
        prev = a[(k, k)].clone();
    }
    Ok(sign * &a[(n - 1, n - 1)])
}

/// Exact determinant of a rational matrix: rows are scaled to integers and
/// the Bareiss determinant is divided by the product of the scales.
pub fn det(m: &Mat<Rat>) -> Result<Rat> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let (mi, scales) = m.clear_denominators();
    let d = det_int(&mi)?;
    let s = scales.iter().fold(Int::one(), |acc, x| acc * x);
    Ok(Rat::new(d, s))
}

/// Reduced row echelon form over Q; returns the form and its pivot columns.
pub fn rref(m: &Mat<Rat>) -> (Mat<Rat>, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        a.swap_rows(r, p);
        let inv = a[(r, c)].recip();
        for j in c..a.cols {
            a[(r, j)] = &a[(r, j)] * &inv;
        }
        for i in 0..a.rows {
            if i == r || a[(i, c)].is_zero() {
                continue;
            }
            let f = a[(i, c)].clone();
            for j in c..a.cols {
                let v = &a[(i, j)] - &f * &a[(r, j)];
                a[(i, j)] = v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank(m: &Mat<Rat>) -> usize {
    rref(m).1.len()
}

pub fn rank_int(m: &Mat<Int>) -> usize {
    rank(&m.map(to_rat))
}

/// Inverse of a square rational matrix, `None` when singular.
pub fn inverse(m: &Mat<Rat>) -> Result<Option<Mat<Rat>>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(Some(Mat::zeros(0, 0)));
    }
    let mut aug = Mat::zeros(n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug[(i, j)] = m[(i, j)].clone();
        }
        aug[(i, n + i)] = Rat::one();
    }
    let (r, piv) = rref(&aug);
    if piv.len() < n || piv[n - 1] >= n {
        return Ok(None);
    }
    let mut inv = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            inv[(i, j)] = r[(i, n + j)].clone();
        }
    }
    Ok(Some(inv))
}

/// Column Hermite normal form: returns `(H, U)` with `M·U = H`, `U` unimodular,
/// `H` lower column-echelon with positive pivots and entries left of each
/// pivot reduced into `[0, pivot)`.
pub fn hnf(m: &Mat<Int>) -> (Mat<Int>, Mat<Int>) {
    let n = m.cols;
    let mut h = m.clone();
    let mut u: Mat<Int> = Mat::identity(n);
    let mut p = 0;
    for i in 0..m.rows {
        if p == n {
            break;
        }
        for j in p + 1..n {
            if h[(i, j)].is_zero() {
                continue;
            }
            let a = h[(i, p)].clone();
            let b = h[(i, j)].clone();
            let (g, x, y) = ext_gcd(&a, &b);
            let ag = &a / &g;
            let bg = &b / &g;
            combine_cols(&mut h, p, j, &x, &y, &bg, &ag);
            combine_cols(&mut u, p, j, &x, &y, &bg, &ag);
        }
        if h[(i, p)].is_zero() {
            continue;
        }
        if h[(i, p)].is_negative() {
            negate_col(&mut h, p);
            negate_col(&mut u, p);
        }
        for l in 0..p {
            let q = h[(i, l)].div_floor(&h[(i, p)]);
            if !q.is_zero() {
                sub_col_multiple(&mut h, l, p, &q);
                sub_col_multiple(&mut u, l, p, &q);
            }
        }
        p += 1;
    }
    (h, u)
}

// (col_p, col_j) <- (x col_p + y col_j, -bg col_p + ag col_j); determinant x*ag + y*bg = 1.
fn combine_cols(m: &mut Mat<Int>, p: usize, j: usize, x: &Int, y: &Int, bg: &Int, ag: &Int) {
    for i in 0..m.rows {
        let cp = m[(i, p)].clone();
        let cj = m[(i, j)].clone();
        m[(i, p)] = x * &cp + y * &cj;
        m[(i, j)] = ag * &cj - bg * &cp;
    }
}

fn negate_col(m: &mut Mat<Int>, c: usize) {
    for i in 0..m.rows {
        let v = -&m[(i, c)];
        m[(i, c)] = v;
    }
}

fn sub_col_multiple(m: &mut Mat<Int>, target: usize, src: usize, q: &Int) {
    for i in 0..m.rows {
        let v = &m[(i, target)] - q * &m[(i, src)];
        m[(i, target)] = v;
    }
}

/// Linearly independent integer vectors generating a lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeBasis {
    ambient: usize,
    vectors: Vec<Vec<Int>>,
}

impl LatticeBasis {
    pub fn new(ambient: usize, vectors: Vec<Vec<Int>>) -> Result<Self> {
        for v in &vectors {
            check_dim(ambient, v.len())?;
        }
        let m = Mat::from_rows(&vectors, ambient)?;
        if rank_int(&m) != vectors.len() {
            return Err(Error::Precondition(
                "lattice basis vectors are linearly dependent".into(),
            ));
        }
        Ok(LatticeBasis { ambient, vectors })
    }

    pub fn standard(n: usize) -> Self {
        let vectors = (0..n)
            .map(|i| (0..n).map(|j| Int::from((i == j) as i64)).collect())
            .collect();
        LatticeBasis {
            ambient: n,
            vectors,
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<Int>] {
        &self.vectors
    }

    /// Matrix with the basis vectors as columns.
    pub fn matrix(&self) -> Mat<Int> {
        Mat::from_columns(&self.vectors, self.ambient).expect("basis vectors have ambient length")
    }

    /// Canonical basis of the same lattice (column HNF of the basis matrix).
    fn canonical(ambient: usize, vectors: Vec<Vec<Int>>) -> Self {
        if vectors.is_empty() {
            return LatticeBasis { ambient, vectors };
        }
        let m = Mat::from_columns(&vectors, ambient).expect("consistent lengths");
        let (h, _) = hnf(&m);
        let vectors = (0..h.cols)
            .map(|j| h.column(j))
            .filter(|c| c.iter().any(|x| !x.is_zero()))
            .collect();
        LatticeBasis { ambient, vectors }
    }

    /// Integer coordinates of `v` in this basis, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &[Int]) -> Result<Option<Vec<Int>>> {
        check_dim(self.ambient, v.len())?;
        let r = self.rank();
        if r == 0 {
            return Ok(v.iter().all(Zero::is_zero).then(Vec::new));
        }
        let m = self.matrix();
        let (h, u) = hnf(&m);
        let mut y: Vec<Int> = vec![Int::zero(); r];
        let mut row = 0;
        for c in 0..r {
            while row < h.rows && h[(row, c)].is_zero() {
                row += 1;
            }
            if row == h.rows {
                break;
            }
            let mut residual = v[row].clone();
            for (l, yl) in y.iter().enumerate().take(c) {
                residual -= &h[(row, l)] * yl;
            }
            let (q, rem) = residual.div_rem(&h[(row, c)]);
            if !rem.is_zero() {
                return Ok(None);
            }
            y[c] = q;
            row += 1;
        }
        if h.mul_vec(&y)? != v {
            return Ok(None);
        }
        // H = M U, so M (U y) = v.
        Ok(Some(u.mul_vec(&y)?))
    }
}

/// Tests whether `v` is an integer combination of the basis vectors.
pub fn in_lattice(v: &[Int], basis: &LatticeBasis) -> Result<bool> {
    Ok(basis.coordinates(v)?.is_some())
}

/// Basis of `{x in Z^n : A x = 0}` (saturated, not a finite-index sublattice).
pub fn kernel_lattice_basis(a: &Mat<Rat>) -> LatticeBasis {
    let n = a.cols();
    let (ai, _) = a.clear_denominators();
    let (h, u) = hnf(&ai);
    let vectors: Vec<Vec<Int>> = (0..n)
        .filter(|&j| (0..h.rows()).all(|i| h[(i, j)].is_zero()))
        .map(|j| u.column(j))
        .collect();
    LatticeBasis::canonical(n, vectors)
}

/// Basis of `Lin(points) ∩ Z^n`, where `Lin` is the span of pairwise differences.
pub fn lin_lattice_basis(points: &[Vec<Int>]) -> Result<LatticeBasis> {
    let first = points.first().ok_or(Error::EmptyInput("point list"))?;
    let n = first.len();
    let diffs: Vec<Vec<Rat>> = points[1..]
        .iter()
        .map(|p| {
            check_dim(n, p.len())?;
            Ok(p.iter().zip(first).map(|(a, b)| to_rat(&(a - b))).collect())
        })
        .collect::<Result<_>>()?;
    let d = Mat::from_rows(&diffs, n)?;
    if rank(&d) == 0 {
        return Ok(LatticeBasis {
            ambient: n,
            vectors: Vec::new(),
        });
    }
    // Lin^⊥ is the kernel of the difference matrix; Lin ∩ Z^n is the integer
    // kernel of a basis of Lin^⊥.
    let complement = kernel_lattice_basis(&d);
    let w = Mat::from_rows(
        &complement
            .vectors
            .iter()
            .map(|v| rat_vec(v))
            .collect::<Vec<_>>(),
        n,
    )?;
    Ok(kernel_lattice_basis(&w))
}

pub fn is_unimodular(m: &Mat<Int>) -> Result<bool> {
    Ok(det_int(m)?.abs().is_one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn imat(rows: &[&[i64]]) -> Mat<Int> {
        let cols = rows.first().map_or(0, |r| r.len());
        Mat::from_rows(&rows.iter().map(|r| int_vec(r)).collect::<Vec<_>>(), cols).unwrap()
    }

    fn qmat(rows: &[&[i64]]) -> Mat<Rat> {
        imat(rows).map(to_rat)
    }

    fn basis(vs: &[&[i64]]) -> LatticeBasis {
        let n = vs[0].len();
        LatticeBasis::new(n, vs.iter().map(|v| int_vec(v)).collect()).unwrap()
    }

    #[test]
    fn hnf_identity() {
        let (h, u) = hnf(&Mat::identity(2));
        assert_eq!(h, Mat::identity(2));
        assert_eq!(u, Mat::identity(2));
    }

    #[test]
    fn hnf_diagonal_fixed_point() {
        let m = imat(&[&[2, 0], &[0, 2]]);
        let (h, u) = hnf(&m);
        assert_eq!(h, m);
        assert!(is_unimodular(&u).unwrap());
    }

    #[test]
    fn hnf_generates_same_lattice() {
        // columns (2,1), (1,2)
        let m = imat(&[&[2, 1], &[1, 2]]);
        let (h, u) = hnf(&m);
        assert_eq!(m.mul(&u).unwrap(), h);
        assert!(is_unimodular(&u).unwrap());
        assert!(h[(0, 1)].is_zero(), "column echelon: {h:?}");
        assert_eq!(h[(0, 0)], int(1));
        assert_eq!(h[(1, 1)], int(3));
        // Oracle: every column of H is a small integer combination of M's columns
        // and vice versa.
        let reach = |a: &Mat<Int>, target: &[Int]| {
            (-6..=6).any(|x| {
                (-6..=6).any(|y| {
                    let c = [int(x), int(y)];
                    a.mul_vec(&c).unwrap() == target
                })
            })
        };
        for j in 0..2 {
            assert!(reach(&m, &h.column(j)));
            assert!(reach(&h, &m.column(j)));
        }
    }

    #[test]
    fn hnf_zero_matrix() {
        let m: Mat<Int> = Mat::zeros(2, 3);
        let (h, u) = hnf(&m);
        assert_eq!(h, m);
        assert!(is_unimodular(&u).unwrap());
    }

    #[test]
    fn lattice_membership_examples() {
        let b = basis(&[&[2, 1], &[1, 2]]);
        assert!(in_lattice(&int_vec(&[1, 2]), &b).unwrap());
        assert!(!in_lattice(&int_vec(&[1, 0]), &b).unwrap());
        assert!(in_lattice(&int_vec(&[0, 0]), &b).unwrap());
        assert!(in_lattice(&int_vec(&[0, 0, 0]), &LatticeBasis::new(3, vec![]).unwrap()).unwrap());
        assert!(matches!(
            in_lattice(&int_vec(&[1, 2, 3]), &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn dependent_basis_rejected() {
        assert!(LatticeBasis::new(2, vec![int_vec(&[1, 2]), int_vec(&[2, 4])]).is_err());
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_lattice_basis(&qmat(&[&[1, 1]]));
        assert_eq!(k.vectors(), &[int_vec(&[1, -1])]);
        let k = kernel_lattice_basis(&qmat(&[&[1, -2]]));
        assert_eq!(k.vectors(), &[int_vec(&[2, 1])]);
        let k = kernel_lattice_basis(&qmat(&[&[0, 0, 0]]));
        assert_eq!(k, LatticeBasis::standard(3));
        let k = kernel_lattice_basis(&qmat(&[&[1, 0], &[0, 1]]));
        assert_eq!(k.rank(), 0);
    }

    #[test]
    fn kernel_of_rational_row() {
        // x/2 + y/3 = 0  <=>  3x + 2y = 0
        let a = Mat::from_rows(&[vec![rat(1, 2), rat(1, 3)]], 2).unwrap();
        let k = kernel_lattice_basis(&a);
        assert_eq!(k.vectors(), &[int_vec(&[2, -3])]);
    }

    #[test]
    fn kernel_saturation_by_enumeration() {
        // Oracle: enumerate kernel points of [1, 1] and [1, -2] in [-3,3]^2 and
        // check each is generated by the computed basis with small coefficients.
        for row in [[1i64, 1], [1, -2], [2, 4]] {
            let a = qmat(&[&row]);
            let k = kernel_lattice_basis(&a);
            assert_eq!(k.rank(), 1);
            let g = &k.vectors()[0];
            for x in -3..=3i64 {
                for y in -3..=3i64 {
                    if row[0] * x + row[1] * y != 0 {
                        continue;
                    }
                    let hit = (-3..=3)
                        .any(|c| &g[0] * int(c) == int(x) && &g[1] * int(c) == int(y));
                    assert!(hit, "({x},{y}) not generated by {g:?}");
                }
            }
        }
    }

    #[test]
    fn lin_lattice_examples() {
        let b = lin_lattice_basis(&[int_vec(&[0, 0]), int_vec(&[2, 0])]).unwrap();
        assert_eq!(b.vectors(), &[int_vec(&[1, 0])]);
        let b = lin_lattice_basis(&[int_vec(&[0, 0]), int_vec(&[1, 1]), int_vec(&[2, 0])]).unwrap();
        assert_eq!(b, LatticeBasis::standard(2));
        let b = lin_lattice_basis(&[int_vec(&[4, 5])]).unwrap();
        assert_eq!(b.rank(), 0);
        let b = lin_lattice_basis(&[int_vec(&[0, 0]), int_vec(&[2, 4])]).unwrap();
        assert_eq!(b.vectors(), &[int_vec(&[1, 2])]);
        assert!(lin_lattice_basis(&[]).is_err());
    }

    #[test]
    fn lin_lattice_avoids_finite_index_trap() {
        // (2,1) and (1,2) span Q^2 but only an index-3 sublattice of Z^2.
        let b = lin_lattice_basis(&[int_vec(&[0, 0]), int_vec(&[2, 1]), int_vec(&[1, 2])]).unwrap();
        assert_eq!(b, LatticeBasis::standard(2));
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(det(&qmat(&[&[-1, 2], &[2, 1]])).unwrap(), to_rat(&int(-5)));
        assert_eq!(
            det(&qmat(&[&[-2, 0, 0], &[2, 1, -1], &[0, 1, 1]])).unwrap(),
            to_rat(&int(-4))
        );
        assert_eq!(det(&Mat::<Rat>::identity(4)).unwrap(), Rat::one());
        assert!(matches!(det(&qmat(&[&[1, 2]])), Err(Error::NotSquare { .. })));
        assert_eq!(det_int(&imat(&[&[0, 1], &[1, 0]])).unwrap(), int(-1));
        assert_eq!(det_int(&imat(&[&[1, 2], &[2, 4]])).unwrap(), int(0));
    }

    #[test]
    fn rational_determinant() {
        let m = Mat::from_rows(&[vec![rat(1, 2), rat(1, 3)], vec![rat(1, 4), rat(1, 5)]], 2).unwrap();
        // 1/10 - 1/12 = 1/60
        assert_eq!(det(&m).unwrap(), rat(1, 60));
    }

    #[test]
    fn rank_and_inverse() {
        assert_eq!(rank(&qmat(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]])), 2);
        let inv = inverse(&qmat(&[&[2, 1], &[1, 1]])).unwrap().unwrap();
        assert_eq!(inv, qmat(&[&[1, -1], &[-1, 2]]));
        assert!(inverse(&qmat(&[&[1, 2], &[2, 4]])).unwrap().is_none());
    }

    #[test]
    fn ext_gcd_signs() {
        for (a, b) in [(0i64, 5i64), (5, 0), (-4, 6), (7, -3), (0, -2)] {
            let (g, x, y) = ext_gcd(&int(a), &int(b));
            assert!(!g.is_negative());
            assert_eq!(&x * int(a) + &y * int(b), g);
        }
    }
}
