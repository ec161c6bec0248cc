//! Small dense exact simplex solver, used to decide whether two polytopes
//! given by inequalities have intersecting interiors.

use num_traits::{One, Signed, Zero};

use crate::linalg::Rat;

/// Maximizes `c·z` subject to `A z <= b`, `z >= 0`, with `b >= 0` (so the
/// origin is feasible). Returns `None` if unbounded. Bland's rule.
pub(crate) fn maximize(a: &[Vec<Rat>], b: &[Rat], c: &[Rat]) -> Option<Rat> {
    let m = a.len();
    let n = c.len();
    debug_assert!(b.iter().all(|x| !x.is_negative()));
    // Tableau columns: n structural, m slack, rhs.
    let width = n + m + 1;
    let mut t: Vec<Vec<Rat>> = Vec::with_capacity(m + 1);
    for i in 0..m {
        let mut row = vec![Rat::zero(); width];
        row[..n].clone_from_slice(&a[i]);
        row[n + i] = Rat::one();
        row[width - 1] = b[i].clone();
        t.push(row);
    }
    // Objective row stores -c; optimal when no negative entries remain.
    let mut obj = vec![Rat::zero(); width];
    for (o, x) in obj.iter_mut().zip(c) {
        *o = -x;
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    loop {
        let Some(enter) = (0..width - 1).find(|&j| obj[j].is_negative()) else {
            return Some(obj[width - 1].clone());
        };
        let mut leave: Option<(usize, Rat)> = None;
        for i in 0..m {
            if !t[i][enter].is_positive() {
                continue;
            }
            let ratio = &t[i][width - 1] / &t[i][enter];
            let better = match &leave {
                None => true,
                Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let (r, _) = leave?;
        let piv = t[r][enter].clone();
        for x in t[r].iter_mut() {
            *x = &*x / &piv;
        }
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i == r || row[enter].is_zero() {
                continue;
            }
            let f = row[enter].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x -= &f * p;
            }
        }
        if !obj[enter].is_zero() {
            let f = obj[enter].clone();
            for (x, p) in obj.iter_mut().zip(&pivot_row) {
                *x -= &f * p;
            }
        }
        basis[r] = enter;
    }
}

/// Inequalities `a·y >= b` of two bounded regions; `inside` must be a point
/// strictly inside the first region. Decides whether some point satisfies
/// all inequalities of both regions strictly.
pub(crate) fn strict_feasible(halfspaces: &[(Vec<Rat>, Rat)], inside: &[Rat]) -> bool {
    let r = inside.len();
    let slack: Vec<Rat> = halfspaces
        .iter()
        .map(|(a, b)| {
            a.iter()
                .zip(inside)
                .fold(Rat::zero(), |acc, (x, y)| acc + x * y)
                - b
        })
        .collect();
    let t0 = slack.iter().min().cloned().unwrap_or_else(Rat::zero).min(Rat::zero());
    // Variables: u (r), v (r), tau; y = inside + u - v, t = t0 + tau.
    // a·y - t >= b  <=>  -a·u + a·v + tau <= slack - t0.
    let mut rows = Vec::with_capacity(halfspaces.len() + 1);
    let mut rhs = Vec::with_capacity(halfspaces.len() + 1);
    for ((a, _), s) in halfspaces.iter().zip(&slack) {
        let mut row: Vec<Rat> = a.iter().map(|x| -x).collect();
        row.extend(a.iter().cloned());
        row.push(Rat::one());
        rows.push(row);
        rhs.push(s - &t0);
    }
    let mut cap = vec![Rat::zero(); 2 * r];
    cap.push(Rat::one());
    rows.push(cap);
    rhs.push(Rat::one() - &t0);
    let mut c = vec![Rat::zero(); 2 * r];
    c.push(Rat::one());
    let best = maximize(&rows, &rhs, &c).expect("objective bounded by the cap row");
    (t0 + best).is_positive()
}
