//! Exact incremental (beneath-beyond) convex hull of full-dimensional
//! integer point sets.
//!
//! The boundary is kept as a simplicial complex while points are placed one
//! at a time in input order; every simplex created by placing a point over
//! its visible boundary facets is recorded, which yields the placing
//! triangulation as a by-product. Coplanar facets are merged at the end.
//!
//! Arithmetic runs in checked `i128` first and falls back to `BigInt` when
//! any intermediate overflows, so results are always exact.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::linalg::Int;

#[derive(Debug)]
struct Overflow;

type Checked<T> = std::result::Result<T, Overflow>;

trait Exact: Clone + Ord + Debug {
    fn to_int(&self) -> Int;
    fn zero() -> Self;
    fn from_small(v: i64) -> Self;
    fn add(&self, o: &Self) -> Checked<Self>;
    fn sub(&self, o: &Self) -> Checked<Self>;
    fn mul(&self, o: &Self) -> Checked<Self>;
    fn neg(&self) -> Checked<Self>;
    /// Division known to be exact.
    fn div_exact(&self, o: &Self) -> Self;
    fn gcd(&self, o: &Self) -> Self;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
}

impl Exact for i128 {
    fn to_int(&self) -> Int {
        Int::from(*self)
    }
    fn zero() -> Self {
        0
    }
    fn from_small(v: i64) -> Self {
        v as i128
    }
    fn add(&self, o: &Self) -> Checked<Self> {
        self.checked_add(*o).ok_or(Overflow)
    }
    fn sub(&self, o: &Self) -> Checked<Self> {
        self.checked_sub(*o).ok_or(Overflow)
    }
    fn mul(&self, o: &Self) -> Checked<Self> {
        self.checked_mul(*o).ok_or(Overflow)
    }
    fn neg(&self) -> Checked<Self> {
        self.checked_neg().ok_or(Overflow)
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
}

impl Exact for Int {
    fn to_int(&self) -> Int {
        self.clone()
    }
    fn zero() -> Self {
        <Int as Zero>::zero()
    }
    fn from_small(v: i64) -> Self {
        Int::from(v)
    }
    fn add(&self, o: &Self) -> Checked<Self> {
        Ok(self + o)
    }
    fn sub(&self, o: &Self) -> Checked<Self> {
        Ok(self - o)
    }
    fn mul(&self, o: &Self) -> Checked<Self> {
        Ok(self * o)
    }
    fn neg(&self) -> Checked<Self> {
        Ok(-self)
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

fn dot<S: Exact>(a: &[S], b: &[S]) -> Checked<S> {
    let mut acc = S::zero();
    for (x, y) in a.iter().zip(b) {
        acc = acc.add(&x.mul(y)?)?;
    }
    Ok(acc)
}

fn sub_vec<S: Exact>(a: &[S], b: &[S]) -> Checked<Vec<S>> {
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

/// Bareiss determinant.
fn det<S: Exact>(mut a: Vec<Vec<S>>) -> Checked<S> {
    let n = a.len();
    if n == 0 {
        return Ok(S::from_small(1));
    }
    let mut negate = false;
    let mut prev = S::from_small(1);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return Ok(S::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = a[i][j].mul(&a[k][k])?.sub(&a[i][k].mul(&a[k][j])?)?;
                a[i][j] = v.div_exact(&prev);
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        d.neg()
    } else {
        Ok(d)
    }
}

/// Rank by fraction-free elimination with content reduction.
fn rank<S: Exact>(rows: &[Vec<S>]) -> Checked<usize> {
    let mut a: Vec<Vec<S>> = rows.to_vec();
    let cols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..a.len() {
            if a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            let piv = a[r][c].clone();
            let mut row = Vec::with_capacity(cols);
            for j in 0..cols {
                row.push(a[i][j].mul(&piv)?.sub(&f.mul(&a[r][j])?)?);
            }
            normalize(&mut row);
            a[i] = row;
        }
        r += 1;
        if r == a.len() {
            break;
        }
    }
    Ok(r)
}

fn normalize<S: Exact>(v: &mut [S]) {
    let g = v.iter().fold(S::zero(), |g, x| g.gcd(x));
    if g.is_zero() || g == S::from_small(1) {
        return;
    }
    for x in v.iter_mut() {
        *x = x.div_exact(&g);
    }
}

#[derive(Clone, Debug)]
struct Plane<S> {
    normal: Vec<S>,
    offset: S,
}

/// Hyperplane through `d` affinely independent points in `S^d`, oriented so
/// that `interior / scale` lies strictly on the positive side.
fn plane<S: Exact>(pts: &[&Vec<S>], interior: &[S], scale: &S) -> Checked<Plane<S>> {
    let d = interior.len();
    let base = pts[0];
    let diffs: Vec<Vec<S>> = pts[1..]
        .iter()
        .map(|p| sub_vec(p, base))
        .collect::<Checked<_>>()?;
    let mut normal = Vec::with_capacity(d);
    for k in 0..d {
        let minor: Vec<Vec<S>> = diffs
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let m = det(minor)?;
        normal.push(if k % 2 == 1 { m.neg()? } else { m });
    }
    normalize(&mut normal);
    let mut offset = dot(&normal, base)?;
    let side = dot(&normal, interior)?.sub(&scale.mul(&offset)?)?;
    debug_assert!(!side.is_zero(), "interior point on a facet hyperplane");
    if side.is_negative() {
        normal = normal.iter().map(|x| x.neg()).collect::<Checked<_>>()?;
        offset = offset.neg()?;
    }
    Ok(Plane { normal, offset })
}

struct SimplexFacet<S> {
    verts: Vec<usize>,
    plane: Plane<S>,
}

/// A facet of the hull: inward primitive normal with `normal·x >= offset` on the
/// hull, equality exactly on the facet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct HullFacet {
    pub normal: Vec<Int>,
    pub offset: Int,
    /// Sorted indices of the input points lying on the facet.
    pub points: Vec<usize>,
}

#[derive(Clone, Debug)]
pub(crate) struct Hull {
    pub facets: Vec<HullFacet>,
    /// Sorted indices of the input points that are vertices.
    pub vertices: Vec<usize>,
    /// Placing triangulation: each simplex lists `d+1` input indices.
    pub simplices: Vec<Vec<usize>>,
}

/// Convex hull of distinct points spanning `R^d` affinely. Returns `None` when
/// the points are not full-dimensional (or fewer than `d+1`).
pub(crate) fn hull(points: &[Vec<Int>]) -> Option<Hull> {
    let small: Option<Vec<Vec<i128>>> = points
        .iter()
        .map(|p| {
            p.iter()
                .map(|x| x.to_i64().map(i128::from).filter(|v| v.abs() < (1 << 40)))
                .collect()
        })
        .collect();
    if let Some(pts) = small {
        match run(&pts) {
            Ok(h) => return h,
            Err(Overflow) => {}
        }
    }
    let pts: Vec<Vec<Int>> = points.to_vec();
    run(&pts).unwrap_or_else(|_| unreachable!("BigInt arithmetic cannot overflow"))
}

fn run<S: Exact>(pts: &[Vec<S>]) -> Checked<Option<Hull>> {
    let Some(first) = pts.first() else {
        return Ok(None);
    };
    let d = first.len();
    if d == 0 {
        return Ok(None);
    }

    // Initial simplex: greedily extend an affinely independent set.
    let mut chosen = vec![0usize];
    let mut diffs: Vec<Vec<S>> = Vec::new();
    for (i, p) in pts.iter().enumerate().skip(1) {
        let diff = sub_vec(p, first)?;
        diffs.push(diff);
        if rank(&diffs)? == diffs.len() {
            chosen.push(i);
            if chosen.len() == d + 1 {
                break;
            }
        } else {
            diffs.pop();
        }
    }
    if chosen.len() < d + 1 {
        return Ok(None);
    }

    let mut interior = vec![S::zero(); d];
    for &i in &chosen {
        for (acc, x) in interior.iter_mut().zip(&pts[i]) {
            *acc = acc.add(x)?;
        }
    }
    let scale = S::from_small(d as i64 + 1);

    let make_facet = |verts: Vec<usize>| -> Checked<SimplexFacet<S>> {
        let refs: Vec<&Vec<S>> = verts.iter().map(|&i| &pts[i]).collect();
        let plane = plane(&refs, &interior, &scale)?;
        Ok(SimplexFacet { verts, plane })
    };

    let mut facets: Vec<SimplexFacet<S>> = Vec::new();
    for skip in 0..chosen.len() {
        let verts: Vec<usize> = chosen
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != skip)
            .map(|(_, &i)| i)
            .collect();
        facets.push(make_facet(verts)?);
    }
    let mut simplices = vec![chosen.clone()];
    let mut is_chosen = vec![false; pts.len()];
    for &i in &chosen {
        is_chosen[i] = true;
    }

    for (pi, p) in pts.iter().enumerate() {
        if is_chosen[pi] {
            continue;
        }
        let mut visible = Vec::new();
        for (fi, f) in facets.iter().enumerate() {
            if dot(&f.plane.normal, p)? < f.plane.offset {
                visible.push(fi);
            }
        }
        if visible.is_empty() {
            continue;
        }
        let mut ridges: HashMap<Vec<usize>, usize> = HashMap::new();
        for &fi in &visible {
            let verts = &facets[fi].verts;
            let mut s = verts.clone();
            s.push(pi);
            s.sort_unstable();
            simplices.push(s);
            for k in 0..verts.len() {
                let ridge: Vec<usize> = verts
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, &v)| v)
                    .collect();
                *ridges.entry(ridge).or_insert(0) += 1;
            }
        }
        let mut horizon: Vec<Vec<usize>> = ridges
            .into_iter()
            .filter(|&(_, c)| c == 1)
            .map(|(r, _)| r)
            .collect();
        horizon.sort_unstable();
        let mut keep = vec![true; facets.len()];
        for &fi in &visible {
            keep[fi] = false;
        }
        let mut it = keep.iter();
        facets.retain(|_| *it.next().unwrap());
        for ridge in horizon {
            let mut verts = ridge;
            verts.push(pi);
            verts.sort_unstable();
            facets.push(make_facet(verts)?);
        }
    }

    // Merge coplanar simplicial facets.
    let mut planes: BTreeMap<(Vec<S>, S), ()> = BTreeMap::new();
    for f in &facets {
        planes.insert((f.plane.normal.clone(), f.plane.offset.clone()), ());
    }
    let mut out_facets = Vec::with_capacity(planes.len());
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); pts.len()];
    for (fi, (normal, offset)) in planes.keys().enumerate() {
        let mut on = Vec::new();
        for (i, p) in pts.iter().enumerate() {
            if dot(normal, p)? == *offset {
                on.push(i);
                incident[i].push(fi);
            }
        }
        out_facets.push((normal, offset, on));
    }
    let mut vertices = Vec::new();
    for (i, inc) in incident.iter().enumerate() {
        if inc.len() < d {
            continue;
        }
        let normals: Vec<Vec<S>> = inc.iter().map(|&fi| out_facets[fi].0.clone()).collect();
        if rank(&normals)? == d {
            vertices.push(i);
        }
    }
    let facets = out_facets
        .into_iter()
        .map(|(n, o, on)| HullFacet {
            normal: n.iter().map(Exact::to_int).collect(),
            offset: o.to_int(),
            points: on,
        })
        .collect();
    Ok(Some(Hull {
        facets,
        vertices,
        simplices,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::int_vec;

    fn pts(v: &[&[i64]]) -> Vec<Vec<Int>> {
        v.iter().map(|p| int_vec(p)).collect()
    }

    #[test]
    fn square_with_interior_and_edge_points() {
        let p = pts(&[&[0, 0], &[1, 0], &[2, 0], &[0, 2], &[2, 2], &[1, 1], &[2, 1]]);
        let h = hull(&p).unwrap();
        assert_eq!(h.vertices, vec![0, 2, 3, 4]);
        assert_eq!(h.facets.len(), 4);
        let bottom = h
            .facets
            .iter()
            .find(|f| f.normal == int_vec(&[0, 1]))
            .unwrap();
        assert_eq!(bottom.offset, Int::from(0));
        assert_eq!(bottom.points, vec![0, 1, 2]);
    }

    #[test]
    fn segment_in_one_dimension() {
        let p = pts(&[&[3], &[0], &[1]]);
        let h = hull(&p).unwrap();
        assert_eq!(h.vertices, vec![0, 1]);
        assert_eq!(h.facets.len(), 2);
    }

    #[test]
    fn lower_dimensional_input_rejected() {
        assert!(hull(&pts(&[&[0, 0], &[1, 1], &[2, 2]])).is_none());
    }

    #[test]
    fn cube_facets_and_triangulation() {
        let mut p = Vec::new();
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    p.push(int_vec(&[x, y, z]));
                }
            }
        }
        let h = hull(&p).unwrap();
        assert_eq!(h.vertices.len(), 8);
        assert_eq!(h.facets.len(), 6);
        for f in &h.facets {
            assert_eq!(f.points.len(), 4);
        }
        // Normalized volume of the unit cube is 3! = 6.
        let vol: i64 = h
            .simplices
            .iter()
            .map(|s| {
                let rows: Vec<Vec<Int>> = s[1..]
                    .iter()
                    .map(|&i| p[i].iter().zip(&p[s[0]]).map(|(a, b)| a - b).collect())
                    .collect();
                det(rows).unwrap().abs().to_i64().unwrap()
            })
            .sum();
        assert_eq!(vol, 6);
    }

    #[test]
    fn bigint_fallback_matches() {
        let big = Int::from(1i64 << 50);
        let p = vec![
            vec![Int::from(0), Int::from(0)],
            vec![big.clone(), Int::from(0)],
            vec![Int::from(0), big.clone()],
            vec![Int::from(1), Int::from(1)],
        ];
        let h = hull(&p).unwrap();
        assert_eq!(h.vertices, vec![0, 1, 2]);
        assert_eq!(h.facets.len(), 3);
    }
}
