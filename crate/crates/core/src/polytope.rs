//! Lattice polytopes in vertex representation.
//!
//! A [`LatticePolytope`] is stored in canonical form: its vertex list is
//! minimal, sorted lexicographically and deduplicated, so structural equality
//! is geometric equality. Facets and a placing triangulation are computed on
//! demand inside the affine hull and cached.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use num_traits::{One, Signed, Zero};

use crate::error::{check_dim, Error, Result};
use crate::hull::hull;
use crate::linalg::{
    det_int, dot, dot_int_rat, inverse, primitive_from_rat, rat_vec, to_rat, Int, Mat, Rat,
};

/// Size limits on polytopes; exceeding them is reported as
/// [`Error::CapExceeded`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub max_ambient: usize,
    pub max_vertices: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_ambient: 8,
            max_vertices: 512,
        }
    }
}

static CAPS: OnceLock<Caps> = OnceLock::new();

impl Caps {
    /// Installs process-wide caps. Only the first call has an effect; returns
    /// whether it did.
    pub fn install(caps: Caps) -> bool {
        CAPS.set(caps).is_ok()
    }

    pub fn current() -> Caps {
        CAPS.get().copied().unwrap_or_default()
    }
}

/// Inward facet inequality `normal·x >= offset`, tight exactly on the facet.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Facet {
    /// Primitive integer normal lying in the linear hull of the polytope.
    pub normal: Vec<Int>,
    pub offset: Int,
    /// Indices (into the parent's vertex list) of the vertices on the facet.
    pub vertices: Vec<usize>,
}

#[derive(Debug)]
struct Geometry {
    /// Coordinates onto which projection is injective on the affine hull.
    pivots: Vec<usize>,
    facets: Vec<Facet>,
    /// Placing triangulation over vertex indices.
    simplices: Vec<Vec<usize>>,
}

/// Polytope with integral vertices, in canonical vertex form.
#[derive(Clone)]
pub struct LatticePolytope {
    ambient: usize,
    vertices: Vec<Vec<Int>>,
    dim: usize,
    geometry: OnceLock<Arc<Geometry>>,
}

impl PartialEq for LatticePolytope {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.vertices == other.vertices
    }
}

impl Eq for LatticePolytope {}

impl Hash for LatticePolytope {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ambient.hash(state);
        self.vertices.hash(state);
    }
}

impl PartialOrd for LatticePolytope {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LatticePolytope {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.ambient, &self.vertices).cmp(&(other.ambient, &other.vertices))
    }
}

impl fmt::Debug for LatticePolytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "conv{{")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "(")?;
            for (j, x) in v.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")?;
        }
        write!(f, "}}")
    }
}

/// A face of a polytope together with a direction `c` whose minimizers over
/// the parent are exactly the face's vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub polytope: LatticePolytope,
    pub direction: Vec<Rat>,
    pub dim: usize,
}

/// Rank and injective coordinate subset of the affine hull of `points`
/// (all differences are taken from the first point).
fn affine_pivots(points: &[Vec<Int>]) -> (usize, Vec<usize>) {
    let n = points[0].len();
    // Rows kept reduced: each row is zero in the pivot columns of the others.
    let mut rows: Vec<(usize, Vec<Int>)> = Vec::new();
    for p in &points[1..] {
        if rows.len() == n {
            break;
        }
        let mut v: Vec<Int> = p.iter().zip(&points[0]).map(|(a, b)| a - b).collect();
        for (c, r) in &rows {
            if v[*c].is_zero() {
                continue;
            }
            let f = v[*c].clone();
            let piv = &r[*c];
            v = v.iter().zip(r).map(|(x, y)| x * piv - &f * y).collect();
        }
        let Some(c) = v.iter().position(|x| !x.is_zero()) else {
            continue;
        };
        let g = crate::linalg::content(&v);
        let v: Vec<Int> = v.iter().map(|x| x / &g).collect();
        for (_, r) in rows.iter_mut() {
            if r[c].is_zero() {
                continue;
            }
            let f = r[c].clone();
            let piv = &v[c];
            let nr: Vec<Int> = r.iter().zip(&v).map(|(x, y)| x * piv - &f * y).collect();
            let g = crate::linalg::content(&nr);
            *r = nr.iter().map(|x| x / &g).collect();
        }
        rows.push((c, v));
    }
    let mut pivots: Vec<usize> = rows.iter().map(|(c, _)| *c).collect();
    pivots.sort_unstable();
    (rows.len(), pivots)
}

fn project(p: &[Int], pivots: &[usize]) -> Vec<Int> {
    pivots.iter().map(|&j| p[j].clone()).collect()
}

impl LatticePolytope {
    /// Convex hull of a nonempty list of integer points.
    pub fn from_points(points: &[Vec<Int>]) -> Result<Self> {
        Self::from_points_capped(points, Caps::current())
    }

    /// Hull of auxiliary point sets (lifts) that may exceed the user caps.
    pub(crate) fn from_points_uncapped(points: &[Vec<Int>]) -> Result<Self> {
        Self::from_points_capped(
            points,
            Caps {
                max_ambient: usize::MAX,
                max_vertices: usize::MAX,
            },
        )
    }

    fn from_points_capped(points: &[Vec<Int>], caps: Caps) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyInput("point list"))?;
        let n = first.len();
        for p in points {
            check_dim(n, p.len())?;
        }
        if n > caps.max_ambient {
            return Err(Error::CapExceeded {
                what: "ambient dimension",
                value: n,
                limit: caps.max_ambient,
            });
        }
        let set: BTreeSet<&Vec<Int>> = points.iter().collect();
        let pts: Vec<Vec<Int>> = set.into_iter().cloned().collect();
        if pts.len() == 1 {
            return Ok(Self::from_canonical(n, pts, 0));
        }
        let (r, pivots) = affine_pivots(&pts);
        if r == 0 {
            return Ok(Self::from_canonical(n, vec![pts[0].clone()], 0));
        }
        let projected: Vec<Vec<Int>> = pts.iter().map(|p| project(p, &pivots)).collect();
        let h = hull(&projected).expect("projection onto pivot coordinates is full-dimensional");
        let vertices: Vec<Vec<Int>> = h.vertices.iter().map(|&i| pts[i].clone()).collect();
        if vertices.len() > caps.max_vertices {
            return Err(Error::CapExceeded {
                what: "vertex count",
                value: vertices.len(),
                limit: caps.max_vertices,
            });
        }
        Ok(Self::from_canonical(n, vertices, r))
    }

    /// Builds a polytope from a list already known to be its sorted vertex set.
    pub(crate) fn from_canonical(ambient: usize, vertices: Vec<Vec<Int>>, dim: usize) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        LatticePolytope {
            ambient,
            vertices,
            dim,
            geometry: OnceLock::new(),
        }
    }

    pub fn point(p: Vec<Int>) -> Self {
        Self::from_canonical(p.len(), vec![p], 0)
    }

    /// The standard simplex `conv{0, e_1, ..., e_n}`.
    pub fn simplex(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("simplex dimension must be at least 1".into()));
        }
        let mut verts: Vec<Vec<Int>> = (0..n)
            .map(|i| (0..n).map(|j| Int::from((i == j) as i64)).collect())
            .collect();
        verts.push(vec![Int::zero(); n]);
        verts.sort();
        Ok(Self::from_canonical(n, verts, n))
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn vertices(&self) -> &[Vec<Int>] {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_point(&self) -> bool {
        self.vertices.len() == 1
    }

    fn geometry(&self) -> &Geometry {
        self.geometry.get_or_init(|| Arc::new(self.compute_geometry()))
    }

    fn compute_geometry(&self) -> Geometry {
        if self.dim == 0 {
            return Geometry {
                pivots: Vec::new(),
                facets: Vec::new(),
                simplices: vec![vec![0]],
            };
        }
        let (r, pivots) = affine_pivots(&self.vertices);
        debug_assert_eq!(r, self.dim);
        let projected: Vec<Vec<Int>> = self.vertices.iter().map(|p| project(p, &pivots)).collect();
        let h = hull(&projected).expect("canonical vertices span their affine hull");
        debug_assert_eq!(h.vertices.len(), self.vertices.len());
        let projector = (r < self.ambient).then(|| self.lin_projector(&pivots));
        let facets = h
            .facets
            .into_iter()
            .map(|f| {
                let normal = match &projector {
                    None => f.normal,
                    Some(pr) => {
                        let mut raw = vec![Rat::zero(); self.ambient];
                        for (k, &j) in pivots.iter().enumerate() {
                            raw[j] = to_rat(&f.normal[k]);
                        }
                        primitive_from_rat(&pr.mul_vec(&raw).expect("square projector"))
                    }
                };
                let offset = dot(&normal, &self.vertices[f.points[0]]);
                Facet {
                    normal,
                    offset,
                    vertices: f.points,
                }
            })
            .collect();
        Geometry {
            pivots,
            facets,
            simplices: h.simplices,
        }
    }

    /// Orthogonal projector onto `Lin(P)`, spanned by the differences.
    fn lin_projector(&self, pivots: &[usize]) -> Mat<Rat> {
        let n = self.ambient;
        let basis = self.lin_rational_basis(pivots.len());
        let b = Mat::from_rows(&basis, n).expect("basis rows have ambient length");
        let bt = b.transpose();
        let gram = b.mul(&bt).expect("conformable");
        let gi = inverse(&gram)
            .expect("square gram")
            .expect("basis is independent");
        bt.mul(&gi).and_then(|m| m.mul(&b)).expect("conformable")
    }

    fn lin_rational_basis(&self, r: usize) -> Vec<Vec<Rat>> {
        let v0 = &self.vertices[0];
        let mut basis: Vec<Vec<Rat>> = Vec::new();
        for v in &self.vertices[1..] {
            let diff: Vec<Rat> = v.iter().zip(v0).map(|(a, b)| to_rat(&(a - b))).collect();
            basis.push(diff);
            let m = Mat::from_rows(&basis, self.ambient).expect("consistent");
            if crate::linalg::rank(&m) < basis.len() {
                basis.pop();
            }
            if basis.len() == r {
                break;
            }
        }
        basis
    }

    /// Coordinate subset on which projection is injective on `Aff(P)`.
    pub fn pivot_coordinates(&self) -> &[usize] {
        &self.geometry().pivots
    }

    /// Irredundant inequality description within `Aff(P)`.
    pub fn facets(&self) -> Result<&[Facet]> {
        if self.dim == 0 {
            return Err(Error::Degenerate(0));
        }
        Ok(&self.geometry().facets)
    }

    /// Placing triangulation over vertex indices (`dim + 1` indices each).
    pub fn triangulation_simplices(&self) -> &[Vec<usize>] {
        &self.geometry().simplices
    }

    /// Indices of the vertices minimizing `c·x`.
    pub(crate) fn argmin(&self, c: &[Rat]) -> Vec<usize> {
        let vals: Vec<Rat> = self.vertices.iter().map(|v| dot_int_rat(v, c)).collect();
        let min = vals.iter().min().expect("nonempty polytope").clone();
        (0..vals.len()).filter(|&i| vals[i] == min).collect()
    }

    pub fn min_value(&self, c: &[Rat]) -> Rat {
        self.vertices
            .iter()
            .map(|v| dot_int_rat(v, c))
            .min()
            .expect("nonempty polytope")
    }

    /// Sub-polytope spanned by a subset of this polytope's vertices that is
    /// known to be a face.
    pub(crate) fn subface(&self, idx: &[usize]) -> LatticePolytope {
        let verts: Vec<Vec<Int>> = idx.iter().map(|&i| self.vertices[i].clone()).collect();
        let dim = if verts.len() == 1 {
            0
        } else {
            affine_pivots(&verts).0
        };
        Self::from_canonical(self.ambient, verts, dim)
    }

    /// Face minimizing `c·x`; `c` may be any vector (zero yields the polytope).
    pub(crate) fn face_unchecked(&self, c: &[Rat]) -> Face {
        let idx = self.argmin(c);
        let polytope = if idx.len() == self.vertices.len() {
            self.clone()
        } else {
            self.subface(&idx)
        };
        Face {
            dim: polytope.dim,
            polytope,
            direction: c.to_vec(),
        }
    }

    /// The face `argmin{c·x : x in P}`.
    pub fn face_in_direction(&self, c: &[Rat]) -> Result<Face> {
        check_dim(self.ambient, c.len())?;
        if c.iter().all(Zero::is_zero) {
            return Err(Error::ZeroDirection);
        }
        Ok(self.face_unchecked(c))
    }

    /// All faces of dimension at least `min_dim`, the polytope included, each
    /// exactly once. Ordered by decreasing dimension, then by vertex list.
    pub fn faces_of_dim_at_least(&self, min_dim: usize) -> Result<Vec<Face>> {
        if min_dim > self.dim {
            return Ok(Vec::new());
        }
        let whole = Face {
            polytope: self.clone(),
            direction: vec![Rat::zero(); self.ambient],
            dim: self.dim,
        };
        if self.dim == 0 || min_dim == self.dim {
            return Ok(vec![whole]);
        }
        let facets = &self.geometry().facets;
        let facet_sets: Vec<Vec<bool>> = facets
            .iter()
            .map(|f| {
                let mut m = vec![false; self.vertices.len()];
                for &i in &f.vertices {
                    m[i] = true;
                }
                m
            })
            .collect();
        let mut out = vec![whole];
        let mut level: BTreeSet<Vec<usize>> = BTreeSet::new();
        level.insert((0..self.vertices.len()).collect());
        let mut dim = self.dim;
        while dim > min_dim {
            let mut next: BTreeSet<Vec<usize>> = BTreeSet::new();
            for face in &level {
                let mut cands: BTreeSet<Vec<usize>> = BTreeSet::new();
                for fs in &facet_sets {
                    let inter: Vec<usize> = face.iter().copied().filter(|&i| fs[i]).collect();
                    if !inter.is_empty() && inter.len() < face.len() {
                        cands.insert(inter);
                    }
                }
                for c in &cands {
                    let dominated = cands
                        .iter()
                        .any(|o| o.len() > c.len() && c.iter().all(|i| o.binary_search(i).is_ok()));
                    if !dominated {
                        next.insert(c.clone());
                    }
                }
            }
            dim -= 1;
            for idx in &next {
                let mut direction = vec![Rat::zero(); self.ambient];
                for (f, fs) in facets.iter().zip(&facet_sets) {
                    if idx.iter().all(|&i| fs[i]) {
                        for (d, x) in direction.iter_mut().zip(&f.normal) {
                            *d += to_rat(x);
                        }
                    }
                }
                let verts = idx.iter().map(|&i| self.vertices[i].clone()).collect();
                out.push(Face {
                    polytope: Self::from_canonical(self.ambient, verts, dim),
                    direction,
                    dim,
                });
            }
            level = next;
        }
        Ok(out)
    }

    /// Minkowski sum `{p + q}`.
    pub fn minkowski_sum(&self, other: &Self) -> Result<Self> {
        check_dim(self.ambient, other.ambient)?;
        if other.is_point() {
            return Ok(self.translate_unchecked(&other.vertices[0]));
        }
        if self.is_point() {
            return Ok(other.translate_unchecked(&self.vertices[0]));
        }
        let mut pts = Vec::with_capacity(self.vertices.len() * other.vertices.len());
        for p in &self.vertices {
            for q in &other.vertices {
                pts.push(p.iter().zip(q).map(|(a, b)| a + b).collect());
            }
        }
        Self::from_points(&pts)
    }

    /// `conv(P ∪ Q)`.
    pub fn conv_union(&self, other: &Self) -> Result<Self> {
        check_dim(self.ambient, other.ambient)?;
        if self == other {
            return Ok(self.clone());
        }
        let pts: Vec<Vec<Int>> = self.vertices.iter().chain(&other.vertices).cloned().collect();
        Self::from_points(&pts)
    }

    fn translate_unchecked(&self, t: &[Int]) -> Self {
        let verts = self
            .vertices
            .iter()
            .map(|v| v.iter().zip(t).map(|(a, b)| a + b).collect())
            .collect();
        Self::from_canonical(self.ambient, verts, self.dim)
    }

    pub fn translate(&self, t: &[Int]) -> Result<Self> {
        check_dim(self.ambient, t.len())?;
        Ok(self.translate_unchecked(t))
    }

    /// Dilation `k·P` for `k >= 0` (vertex scaling; `0·P = {0}`).
    pub fn dilate(&self, k: &Int) -> Result<Self> {
        if k.is_negative() {
            return Err(Error::Precondition("dilation factor must be non-negative".into()));
        }
        if k.is_zero() {
            return Ok(Self::point(vec![Int::zero(); self.ambient]));
        }
        let verts = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|x| x * k).collect())
            .collect();
        Ok(Self::from_canonical(self.ambient, verts, self.dim))
    }

    /// Image under `x ↦ U x + t` for a unimodular `U`.
    pub fn unimodular_image(&self, u: &Mat<Int>, t: &[Int]) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::NotSquare {
                rows: u.rows(),
                cols: u.cols(),
            });
        }
        check_dim(self.ambient, u.rows())?;
        check_dim(self.ambient, t.len())?;
        let d = det_int(u)?;
        if !d.abs().is_one() {
            return Err(Error::NotUnimodular(d.to_string()));
        }
        let mut verts: Vec<Vec<Int>> = self
            .vertices
            .iter()
            .map(|v| {
                let w = u.mul_vec(v).expect("conformable");
                w.iter().zip(t).map(|(a, b)| a + b).collect()
            })
            .collect();
        verts.sort();
        Ok(Self::from_canonical(self.ambient, verts, self.dim))
    }

    /// Exact membership test for a rational point.
    pub fn contains(&self, x: &[Rat]) -> Result<bool> {
        check_dim(self.ambient, x.len())?;
        if self.dim == 0 {
            return Ok(rat_vec(&self.vertices[0]) == x);
        }
        // Aff(P) membership: x - v0 must lie in the span of the differences.
        if self.dim < self.ambient {
            let v0 = rat_vec(&self.vertices[0]);
            let mut rows = self.lin_rational_basis(self.dim);
            rows.push(x.iter().zip(&v0).map(|(a, b)| a - b).collect());
            let m = Mat::from_rows(&rows, self.ambient)?;
            if crate::linalg::rank(&m) > self.dim {
                return Ok(false);
            }
        }
        Ok(self
            .geometry()
            .facets
            .iter()
            .all(|f| dot_int_rat(&f.normal, x) >= to_rat(&f.offset)))
    }

    /// Whether `x` is one of the vertices.
    pub fn has_vertex(&self, x: &[Int]) -> bool {
        self.vertices.binary_search_by(|v| v.as_slice().cmp(x)).is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{int_vec, rat};

    pub(crate) fn poly(v: &[&[i64]]) -> LatticePolytope {
        LatticePolytope::from_points(&v.iter().map(|p| int_vec(p)).collect::<Vec<_>>()).unwrap()
    }

    fn rv(v: &[i64]) -> Vec<Rat> {
        rat_vec(&int_vec(v))
    }

    fn square() -> LatticePolytope {
        poly(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])
    }

    #[test]
    fn from_points_examples() {
        let p = poly(&[&[0, 0], &[1, 0], &[2, 0]]);
        assert_eq!(p.vertices(), &[int_vec(&[0, 0]), int_vec(&[2, 0])]);
        assert_eq!(p.dim(), 1);

        let t = poly(&[&[0, 0], &[1, 0], &[0, 1]]);
        assert_eq!(t, LatticePolytope::simplex(2).unwrap());

        let mut grid = Vec::new();
        for x in 0..3 {
            for y in 0..3 {
                grid.push(int_vec(&[x, y]));
            }
        }
        let g = LatticePolytope::from_points(&grid).unwrap();
        assert_eq!(g.num_vertices(), 4);
        assert!(LatticePolytope::from_points(&[]).is_err());
        assert!(LatticePolytope::from_points(&[int_vec(&[1]), int_vec(&[1, 2])]).is_err());
    }

    #[test]
    fn simplex_and_dim() {
        assert_eq!(LatticePolytope::simplex(1).unwrap().num_vertices(), 2);
        assert_eq!(LatticePolytope::simplex(2).unwrap().dim(), 2);
        let s4 = LatticePolytope::simplex(4).unwrap();
        assert_eq!((s4.num_vertices(), s4.dim()), (5, 4));
        assert!(LatticePolytope::simplex(0).is_err());
        assert_eq!(poly(&[&[3, 3]]).dim(), 0);
        assert_eq!(poly(&[&[0, 0], &[2, 4]]).dim(), 1);
    }

    #[test]
    fn minkowski_examples() {
        let p = poly(&[&[0, 0], &[-1, 2]]);
        assert_eq!(p.minkowski_sum(&poly(&[&[0, 0]])).unwrap(), p);
        let e1 = poly(&[&[0, 0], &[1, 0]]);
        let e2 = poly(&[&[0, 0], &[0, 1]]);
        assert_eq!(e1.minkowski_sum(&e2).unwrap(), square());
        let par = p.minkowski_sum(&poly(&[&[0, 0], &[2, 1]])).unwrap();
        assert_eq!(par, poly(&[&[0, 0], &[-1, 2], &[2, 1], &[1, 3]]));
        assert!(e1.minkowski_sum(&poly(&[&[0]])).is_err());
    }

    #[test]
    fn conv_union_examples() {
        let s = square();
        assert_eq!(s.conv_union(&s).unwrap(), s);
        assert_eq!(
            poly(&[&[0, 0]]).conv_union(&poly(&[&[1, 0]])).unwrap(),
            poly(&[&[0, 0], &[1, 0]])
        );
        let a = poly(&[&[0, 0], &[1, 0]]);
        let b = poly(&[&[0, 1], &[1, 1]]);
        assert_eq!(a.conv_union(&b).unwrap(), s);
    }

    #[test]
    fn face_in_direction_examples() {
        let t = LatticePolytope::simplex(2).unwrap();
        let f = t.face_in_direction(&rv(&[1, 1])).unwrap();
        assert_eq!(f.polytope, poly(&[&[0, 0]]));
        let f = t.face_in_direction(&rv(&[0, -1])).unwrap();
        assert_eq!((f.polytope.clone(), f.dim), (poly(&[&[0, 1]]), 0));
        let f = square().face_in_direction(&rv(&[1, 0])).unwrap();
        assert_eq!(f.dim, 1);
        assert_eq!(f.polytope, poly(&[&[0, 0], &[0, 1]]));
        assert_eq!(t.face_in_direction(&rv(&[0, 0])), Err(Error::ZeroDirection));
    }

    #[test]
    fn facet_examples() {
        let seg = poly(&[&[0], &[2]]);
        let mut fs: Vec<(Vec<Int>, Int)> = seg
            .facets()
            .unwrap()
            .iter()
            .map(|f| (f.normal.clone(), f.offset.clone()))
            .collect();
        fs.sort();
        assert_eq!(fs, vec![(int_vec(&[-1]), Int::from(-2)), (int_vec(&[1]), Int::from(0))]);

        let t = LatticePolytope::simplex(2).unwrap();
        let mut fs: Vec<(Vec<Int>, Int)> = t
            .facets()
            .unwrap()
            .iter()
            .map(|f| {
                assert_eq!(f.vertices.len(), 2);
                (f.normal.clone(), f.offset.clone())
            })
            .collect();
        fs.sort();
        assert_eq!(
            fs,
            vec![
                (int_vec(&[-1, -1]), Int::from(-1)),
                (int_vec(&[0, 1]), Int::from(0)),
                (int_vec(&[1, 0]), Int::from(0)),
            ]
        );
        let sq = square();
        assert_eq!(sq.facets().unwrap().len(), 4);
        assert!(sq.facets().unwrap().iter().all(|f| f.vertices.len() == 2));
        assert_eq!(poly(&[&[1, 1]]).facets(), Err(Error::Degenerate(0)));
    }

    #[test]
    fn facets_of_lower_dimensional_polytope_lie_in_lin() {
        // Segment from (0,0,0) to (2,4,0): facet normals are ±(1,2,0).
        let seg = poly(&[&[0, 0, 0], &[2, 4, 0]]);
        let normals: BTreeSet<Vec<Int>> =
            seg.facets().unwrap().iter().map(|f| f.normal.clone()).collect();
        assert_eq!(
            normals,
            [int_vec(&[1, 2, 0]), int_vec(&[-1, -2, 0])].into_iter().collect()
        );
    }

    #[test]
    fn face_enumeration_examples() {
        let t = LatticePolytope::simplex(2).unwrap();
        assert_eq!(t.faces_of_dim_at_least(2).unwrap().len(), 1);
        let f1 = t.faces_of_dim_at_least(1).unwrap();
        assert_eq!(f1.len(), 4);
        assert_eq!(f1.iter().filter(|f| f.dim == 1).count(), 3);
        assert_eq!(square().faces_of_dim_at_least(1).unwrap().len(), 5);
        assert_eq!(square().faces_of_dim_at_least(0).unwrap().len(), 9);
        let cube = poly(&[
            &[0, 0, 0],
            &[0, 0, 1],
            &[0, 1, 0],
            &[0, 1, 1],
            &[1, 0, 0],
            &[1, 0, 1],
            &[1, 1, 0],
            &[1, 1, 1],
        ]);
        let faces = cube.faces_of_dim_at_least(0).unwrap();
        let count = |d| faces.iter().filter(|f| f.dim == d).count();
        assert_eq!((count(0), count(1), count(2), count(3)), (8, 12, 6, 1));
        for f in &faces {
            if f.dim < 3 {
                assert_eq!(cube.face_in_direction(&f.direction).unwrap().polytope, f.polytope);
            }
        }
    }

    #[test]
    fn contains_and_images() {
        let t = LatticePolytope::simplex(2).unwrap();
        assert!(t.contains(&[rat(1, 3), rat(1, 3)]).unwrap());
        assert!(!t.contains(&rv(&[1, 1])).unwrap());
        assert_eq!(t.translate(&int_vec(&[0, 0])).unwrap(), t);
        let seg = poly(&[&[0, 0], &[2, 2]]);
        assert!(seg.contains(&rv(&[1, 1])).unwrap());
        assert!(!seg.contains(&rv(&[1, 0])).unwrap());
        let u = Mat::from_rows(&[int_vec(&[1, 1]), int_vec(&[0, 1])], 2).unwrap();
        let img = t.unimodular_image(&u, &int_vec(&[1, 0])).unwrap();
        assert_eq!(img, poly(&[&[1, 0], &[2, 0], &[2, 1]]));
        let bad = Mat::from_rows(&[int_vec(&[2, 0]), int_vec(&[0, 1])], 2).unwrap();
        assert!(matches!(
            t.unimodular_image(&bad, &int_vec(&[0, 0])),
            Err(Error::NotUnimodular(_))
        ));
    }

    #[test]
    fn vertex_cap_is_enforced() {
        // 600 points on the moment curve are all vertices.
        let pts: Vec<Vec<Int>> = (0..600i64).map(|t| int_vec(&[t, t * t])).collect();
        assert!(matches!(
            LatticePolytope::from_points(&pts),
            Err(Error::CapExceeded { what: "vertex count", .. })
        ));
    }
}
