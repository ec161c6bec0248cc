//! Bias-free integral ReLU networks and their Newton polytopes.
//!
//! A network computes `T^{(k+1)} ∘ σ ∘ T^{(k)} ∘ … ∘ σ ∘ T^{(1)}` with integer
//! matrices. Every output is a difference `g − h` of convex positively
//! homogeneous functions, recorded by their Newton polytopes and by
//! construction trees over `conv` and Minkowski sums.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot_int_rat, to_rat, Int, Mat, Rat};
use crate::polytope::LatticePolytope;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralNetwork {
    input_dim: usize,
    layers: Vec<Mat<Int>>,
}

impl IntegralNetwork {
    /// `layers[ℓ]` maps layer `ℓ` to layer `ℓ + 1`; the last one is the
    /// output map and every other one is followed by a ReLU.
    pub fn new(input_dim: usize, layers: Vec<Mat<Int>>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::MalformedNetwork("no layers".into()));
        }
        let mut width = input_dim;
        for (i, m) in layers.iter().enumerate() {
            if m.cols() != width {
                return Err(Error::MalformedNetwork(format!(
                    "layer {} has {} columns, previous width is {width}",
                    i + 1,
                    m.cols()
                )));
            }
            width = m.rows();
        }
        Ok(IntegralNetwork { input_dim, layers })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().expect("nonempty").rows()
    }

    pub fn hidden_layers(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn layers(&self) -> &[Mat<Int>] {
        &self.layers
    }

    pub fn widths(&self) -> Vec<usize> {
        std::iter::once(self.input_dim)
            .chain(self.layers.iter().map(|m| m.rows()))
            .collect()
    }
}

/// Exact forward pass.
pub fn eval_network(net: &IntegralNetwork, x: &[Rat]) -> Result<Vec<Rat>> {
    check_dim(net.input_dim, x.len())?;
    let mut v = x.to_vec();
    let last = net.layers.len() - 1;
    for (i, m) in net.layers.iter().enumerate() {
        let mut next: Vec<Rat> = (0..m.rows()).map(|r| dot_int_rat(m.row(r), &v)).collect();
        if i < last {
            for y in next.iter_mut() {
                if y.is_negative() {
                    *y = Rat::zero();
                }
            }
        }
        v = next;
    }
    Ok(v)
}

/// `f = g − h` with `pos = P_g`, `neg = P_h`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolytopePair {
    pub pos: LatticePolytope,
    pub neg: LatticePolytope,
}

fn support(p: &LatticePolytope, x: &[Rat]) -> Rat {
    p.vertices()
        .iter()
        .map(|v| dot_int_rat(v, x))
        .max()
        .expect("nonempty")
}

/// `max_{a ∈ pos} a·x − max_{b ∈ neg} b·x`.
pub fn eval_pair(pair: &PolytopePair, x: &[Rat]) -> Result<Rat> {
    check_dim(pair.pos.ambient(), x.len())?;
    check_dim(pair.neg.ambient(), x.len())?;
    Ok(support(&pair.pos, x) - support(&pair.neg, x))
}

impl PolytopePair {
    pub fn new(pos: LatticePolytope, neg: LatticePolytope) -> Result<Self> {
        check_dim(pos.ambient(), neg.ambient())?;
        Ok(PolytopePair { pos, neg })
    }

    pub fn ambient(&self) -> usize {
        self.pos.ambient()
    }

    /// Cancels `neg` from `pos` when `pos = D + neg` for a lattice polytope
    /// `D`, giving `(D, {0})`. Both pairs represent the same function.
    pub fn reduce(&self) -> Option<PolytopePair> {
        let n = self.ambient();
        let origin = LatticePolytope::point(vec![Int::zero(); n]);
        if self.neg == origin {
            return Some(self.clone());
        }
        let mut diffs = Vec::with_capacity(self.pos.num_vertices());
        let facets = if self.pos.is_point() {
            &[][..]
        } else {
            self.pos.facets().ok()?
        };
        for (i, v) in self.pos.vertices().iter().enumerate() {
            let mut c = vec![Rat::zero(); n];
            for f in facets.iter().filter(|f| f.vertices.binary_search(&i).is_ok()) {
                for (x, y) in c.iter_mut().zip(&f.normal) {
                    *x += to_rat(y);
                }
            }
            let w = self.neg.argmin(&c);
            if w.len() != 1 {
                return None;
            }
            let w = &self.neg.vertices()[w[0]];
            diffs.push(v.iter().zip(w).map(|(a, b)| a - b).collect::<Vec<Int>>());
        }
        let d = LatticePolytope::from_points(&diffs).ok()?;
        if d.minkowski_sum(&self.neg).ok()? == self.pos {
            Some(PolytopePair { pos: d, neg: origin })
        } else {
            None
        }
    }
}

/// Expression over `conv` and Minkowski sums; shared subtrees are `Arc`s.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ConstructionTree {
    Leaf(Vec<Int>),
    Conv(Arc<ConstructionTree>, Arc<ConstructionTree>),
    Sum(Vec<Arc<ConstructionTree>>),
}

type Memo<T> = HashMap<*const ConstructionTree, T>;

impl ConstructionTree {
    pub fn leaf(p: Vec<Int>) -> Arc<Self> {
        Arc::new(ConstructionTree::Leaf(p))
    }

    pub fn conv(a: Arc<Self>, b: Arc<Self>) -> Arc<Self> {
        Arc::new(ConstructionTree::Conv(a, b))
    }

    /// Sum node; a single child is returned as is and a sum of leaves is
    /// folded into one leaf. `n` is the ambient dimension (for empty sums).
    pub fn sum(children: Vec<Arc<Self>>, n: usize) -> Arc<Self> {
        if children.is_empty() {
            return Self::leaf(vec![Int::zero(); n]);
        }
        if children.len() == 1 {
            return children.into_iter().next().expect("one child");
        }
        if children.iter().all(|c| matches!(**c, ConstructionTree::Leaf(_))) {
            let mut acc = vec![Int::zero(); n];
            for c in &children {
                if let ConstructionTree::Leaf(p) = &**c {
                    for (a, b) in acc.iter_mut().zip(p) {
                        *a += b;
                    }
                }
            }
            return Self::leaf(acc);
        }
        Arc::new(ConstructionTree::Sum(children))
    }

    /// Alternation depth: leaves 0, each `Conv` adds one, sums add nothing.
    pub fn depth(&self) -> usize {
        fn go(t: &ConstructionTree, memo: &mut Memo<usize>) -> usize {
            let key = t as *const _;
            if let Some(&d) = memo.get(&key) {
                return d;
            }
            let d = match t {
                ConstructionTree::Leaf(_) => 0,
                ConstructionTree::Conv(a, b) => 1 + go(a, memo).max(go(b, memo)),
                ConstructionTree::Sum(cs) => cs.iter().map(|c| go(c, memo)).max().unwrap_or(0),
            };
            memo.insert(key, d);
            d
        }
        go(self, &mut HashMap::new())
    }

    /// Ambient dimension of the leaves.
    pub fn ambient(&self) -> usize {
        let mut t = self;
        loop {
            match t {
                ConstructionTree::Leaf(p) => return p.len(),
                ConstructionTree::Conv(a, _) => t = a,
                ConstructionTree::Sum(cs) => t = &cs[0],
            }
        }
    }

    /// Distinct nodes in post-order (children before parents).
    pub fn nodes(self: &Arc<Self>) -> Vec<Arc<ConstructionTree>> {
        fn go(t: &Arc<ConstructionTree>, seen: &mut Memo<()>, out: &mut Vec<Arc<ConstructionTree>>) {
            if seen.insert(Arc::as_ptr(t), ()).is_some() {
                return;
            }
            match &**t {
                ConstructionTree::Leaf(_) => {}
                ConstructionTree::Conv(a, b) => {
                    go(a, seen, out);
                    go(b, seen, out);
                }
                ConstructionTree::Sum(cs) => cs.iter().for_each(|c| go(c, seen, out)),
            }
            out.push(t.clone());
        }
        let mut out = Vec::new();
        go(self, &mut HashMap::new(), &mut out);
        out
    }
}

/// Evaluates a tree; repeated `Arc` children of a sum are dilated rather than
/// added one by one.
pub fn tree_to_polytope(tree: &ConstructionTree) -> Result<LatticePolytope> {
    fn go(t: &ConstructionTree, memo: &mut Memo<LatticePolytope>) -> Result<LatticePolytope> {
        let key = t as *const _;
        if let Some(p) = memo.get(&key) {
            return Ok(p.clone());
        }
        let p = match t {
            ConstructionTree::Leaf(v) => LatticePolytope::point(v.clone()),
            ConstructionTree::Conv(a, b) => go(a, memo)?.conv_union(&go(b, memo)?)?,
            ConstructionTree::Sum(cs) => {
                let mut counts: Vec<(&Arc<ConstructionTree>, i64)> = Vec::new();
                for c in cs {
                    match counts.iter_mut().find(|(d, _)| Arc::ptr_eq(d, c)) {
                        Some((_, k)) => *k += 1,
                        None => counts.push((c, 1)),
                    }
                }
                let mut acc: Option<LatticePolytope> = None;
                for (c, k) in counts {
                    let q = go(c, memo)?.dilate(&Int::from(k))?;
                    acc = Some(match acc {
                        None => q,
                        Some(a) => a.minkowski_sum(&q)?,
                    });
                }
                acc.ok_or(Error::EmptyInput("sum node"))?
            }
        };
        memo.insert(key, p.clone());
        Ok(p)
    }
    go(tree, &mut HashMap::new())
}

/// Pair of one output together with the trees that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledOutput {
    pub pair: PolytopePair,
    pub pos_tree: Arc<ConstructionTree>,
    pub neg_tree: Arc<ConstructionTree>,
}

#[derive(Clone)]
struct Node {
    pos: LatticePolytope,
    neg: LatticePolytope,
    pos_tree: Arc<ConstructionTree>,
    neg_tree: Arc<ConstructionTree>,
}

fn combine(row: &[Int], inputs: &[Node], n: usize) -> Result<Node> {
    let mut pos = LatticePolytope::point(vec![Int::zero(); n]);
    let mut neg = pos.clone();
    let mut pos_children = Vec::new();
    let mut neg_children = Vec::new();
    for (w, node) in row.iter().zip(inputs) {
        if w.is_zero() {
            continue;
        }
        let (to_pos, to_neg, tp, tn) = if w.is_positive() {
            (&node.pos, &node.neg, &node.pos_tree, &node.neg_tree)
        } else {
            (&node.neg, &node.pos, &node.neg_tree, &node.pos_tree)
        };
        let k = w.abs();
        pos = pos.minkowski_sum(&to_pos.dilate(&k)?)?;
        neg = neg.minkowski_sum(&to_neg.dilate(&k)?)?;
        let reps = usize::try_from(&k).map_err(|_| Error::MalformedNetwork("weight too large".into()))?;
        pos_children.extend(std::iter::repeat(tp.clone()).take(reps));
        neg_children.extend(std::iter::repeat(tn.clone()).take(reps));
    }
    Ok(Node {
        pos,
        neg,
        pos_tree: ConstructionTree::sum(pos_children, n),
        neg_tree: ConstructionTree::sum(neg_children, n),
    })
}

/// Newton-polytope pairs of every output, with construction trees of depth
/// at most the number of hidden layers.
pub fn compile_with_trees(net: &IntegralNetwork) -> Result<Vec<CompiledOutput>> {
    let n = net.input_dim;
    let origin = LatticePolytope::point(vec![Int::zero(); n]);
    let zero_tree = ConstructionTree::leaf(vec![Int::zero(); n]);
    let mut nodes: Vec<Node> = (0..n)
        .map(|i| {
            let mut e = vec![Int::zero(); n];
            e[i] = Int::from(1);
            Node {
                pos: LatticePolytope::point(e.clone()),
                neg: origin.clone(),
                pos_tree: ConstructionTree::leaf(e),
                neg_tree: zero_tree.clone(),
            }
        })
        .collect();
    let last = net.layers.len() - 1;
    for (l, m) in net.layers.iter().enumerate() {
        let mut next = Vec::with_capacity(m.rows());
        for r in 0..m.rows() {
            let mut node = combine(m.row(r), &nodes, n)?;
            if l < last {
                // max{g − h, 0} = max{g, h} − h
                node.pos = node.pos.conv_union(&node.neg)?;
                node.pos_tree = ConstructionTree::conv(node.pos_tree, node.neg_tree.clone());
            }
            next.push(node);
        }
        nodes = next;
    }
    Ok(nodes
        .into_iter()
        .map(|nd| CompiledOutput {
            pair: PolytopePair {
                pos: nd.pos,
                neg: nd.neg,
            },
            pos_tree: nd.pos_tree,
            neg_tree: nd.neg_tree,
        })
        .collect())
}

/// One pair per output coordinate.
pub fn compile(net: &IntegralNetwork) -> Result<Vec<PolytopePair>> {
    Ok(compile_with_trees(net)?.into_iter().map(|c| c.pair).collect())
}

/// Bounds for [`sample_pk`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleParams {
    /// Leaf coordinates are drawn from `[-coord_range, coord_range]`.
    pub coord_range: i64,
    /// Sum nodes have between 1 and `max_fanout` children.
    pub max_fanout: usize,
}

impl Default for SampleParams {
    fn default() -> Self {
        SampleParams {
            coord_range: 2,
            max_fanout: 3,
        }
    }
}

fn sample_tree(k: usize, n: usize, params: &SampleParams, rng: &mut ChaCha8Rng) -> Arc<ConstructionTree> {
    if k == 0 {
        let r = params.coord_range;
        return ConstructionTree::leaf((0..n).map(|_| Int::from(rng.gen_range(-r..=r))).collect());
    }
    let fanout = rng.gen_range(1..=params.max_fanout.max(1));
    let children = (0..fanout)
        .map(|_| {
            let a = sample_tree(k - 1, n, params, rng);
            let b = sample_tree(k - 1, n, params, rng);
            ConstructionTree::conv(a, b)
        })
        .collect();
    ConstructionTree::sum(children, n)
}

/// Random member of `P_k` in `R^n` with its tree of depth exactly `k`.
pub fn sample_pk(
    k: usize,
    n: usize,
    params: &SampleParams,
    seed: u64,
) -> Result<(Arc<ConstructionTree>, LatticePolytope)> {
    if n == 0 {
        return Err(Error::Precondition("ambient dimension must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tree = sample_tree(k, n, params, &mut rng);
    let p = tree_to_polytope(&tree)?;
    Ok((tree, p))
}

/// Bounds for [`sample_network`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NetworkParams {
    pub max_input_dim: usize,
    pub max_hidden_layers: usize,
    pub max_width: usize,
    pub max_outputs: usize,
    pub weight_range: i64,
}

impl Default for NetworkParams {
    fn default() -> Self {
        NetworkParams {
            max_input_dim: 4,
            max_hidden_layers: 3,
            max_width: 4,
            max_outputs: 2,
            weight_range: 3,
        }
    }
}

/// Random bias-free integral network within the given bounds.
pub fn sample_network(params: &NetworkParams, seed: u64) -> IntegralNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=params.max_input_dim.max(1));
    let hidden = rng.gen_range(0..=params.max_hidden_layers);
    let mut widths = vec![n];
    for _ in 0..hidden {
        widths.push(rng.gen_range(1..=params.max_width.max(1)));
    }
    widths.push(rng.gen_range(1..=params.max_outputs.max(1)));
    let r = params.weight_range;
    let layers = widths
        .windows(2)
        .map(|w| {
            let rows: Vec<Vec<Int>> = (0..w[1])
                .map(|_| (0..w[0]).map(|_| Int::from(rng.gen_range(-r..=r))).collect())
                .collect();
            Mat::from_rows(&rows, w[0]).expect("consistent widths")
        })
        .collect();
    IntegralNetwork::new(n, layers).expect("consistent widths")
}

type Form = BTreeMap<usize, Int>;

fn form_add(a: &Form, b: &Form, scale: i64) -> Form {
    let mut out = a.clone();
    for (i, v) in b {
        let e = out.entry(*i).or_insert_with(Int::zero);
        *e += v * Int::from(scale);
        if e.is_zero() {
            out.remove(i);
        }
    }
    out
}

fn form_neg(a: &Form) -> Form {
    a.iter().map(|(i, v)| (*i, -v)).collect()
}

/// Layered circuit under construction: `levels[ℓ]` lists the neurons of
/// hidden layer `ℓ` as forms over layer `ℓ − 1` (level 0 is the input).
struct Builder {
    levels: Vec<Vec<Form>>,
    index: Vec<HashMap<Vec<(usize, Int)>, usize>>,
}

impl Builder {
    /// ReLU neuron at `level + 1` fed by `form` (over `level`).
    fn neuron(&mut self, level: usize, form: &Form) -> usize {
        while self.levels.len() <= level + 1 {
            self.levels.push(Vec::new());
            self.index.push(HashMap::new());
        }
        let key: Vec<(usize, Int)> = form.iter().map(|(i, v)| (*i, v.clone())).collect();
        if let Some(&i) = self.index[level + 1].get(&key) {
            return i;
        }
        let i = self.levels[level + 1].len();
        self.levels[level + 1].push(form.clone());
        self.index[level + 1].insert(key, i);
        i
    }

    /// Same value one level up, via `σ(a) − σ(−a)`.
    fn forward(&mut self, level: usize, a: &Form) -> Form {
        if a.is_empty() {
            return Form::new();
        }
        let p = self.neuron(level, a);
        let m = self.neuron(level, &form_neg(a));
        let mut out = Form::new();
        out.insert(p, Int::from(1));
        *out.entry(m).or_insert_with(Int::zero) -= Int::from(1);
        out
    }

    fn lift(&mut self, mut level: usize, mut a: Form, target: usize) -> Form {
        while level < target {
            a = self.forward(level, &a);
            level += 1;
        }
        a
    }

    /// Form at `level = depth(t)` computing `x ↦ max_{v ∈ t} v·x`.
    fn build(&mut self, t: &Arc<ConstructionTree>, memo: &mut Memo<(usize, Form)>) -> (usize, Form) {
        if let Some(r) = memo.get(&Arc::as_ptr(t)) {
            return r.clone();
        }
        let r = match &**t {
            ConstructionTree::Leaf(p) => (
                0,
                p.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(i, v)| (i, v.clone()))
                    .collect(),
            ),
            ConstructionTree::Sum(cs) => {
                let parts: Vec<(usize, Form)> = cs.iter().map(|c| self.build(c, memo)).collect();
                let level = parts.iter().map(|p| p.0).max().unwrap_or(0);
                let mut acc = Form::new();
                for (l, f) in parts {
                    let f = self.lift(l, f, level);
                    acc = form_add(&acc, &f, 1);
                }
                (level, acc)
            }
            ConstructionTree::Conv(a, b) => {
                let (la, fa) = self.build(a, memo);
                let (lb, fb) = self.build(b, memo);
                let level = la.max(lb);
                let fa = self.lift(la, fa, level);
                let fb = self.lift(lb, fb, level);
                // max{a, b} = a + σ(b − a)
                let mut out = self.forward(level, &fa);
                let diff = form_add(&fb, &fa, -1);
                if !diff.is_empty() {
                    let j = self.neuron(level, &diff);
                    *out.entry(j).or_insert_with(Int::zero) += Int::from(1);
                    out.retain(|_, v| !v.is_zero());
                } else {
                    // Keep the level count even when both branches agree.
                    while self.levels.len() <= level + 1 {
                        self.levels.push(Vec::new());
                        self.index.push(HashMap::new());
                    }
                }
                (level + 1, out)
            }
        };
        memo.insert(Arc::as_ptr(t), r.clone());
        r
    }
}

/// Network with `max(depth g, depth h)` hidden layers computing
/// `x ↦ g(x) − h(x)`, where each tree stands for the maximum of `v·x` over its
/// polytope.
pub fn synthesize_network(
    g: &Arc<ConstructionTree>,
    h: &Arc<ConstructionTree>,
) -> Result<IntegralNetwork> {
    let n = g.ambient();
    check_dim(n, h.ambient())?;
    let mut b = Builder {
        levels: vec![Vec::new()],
        index: vec![HashMap::new()],
    };
    let mut memo = HashMap::new();
    let (lg, fg) = b.build(g, &mut memo);
    let (lh, fh) = b.build(h, &mut memo);
    let depth = lg.max(lh);
    let fg = b.lift(lg, fg, depth);
    let fh = b.lift(lh, fh, depth);
    let out = form_add(&fg, &fh, -1);
    while b.levels.len() <= depth {
        b.levels.push(Vec::new());
    }

    let mut widths = vec![n];
    widths.extend(b.levels[1..=depth].iter().map(|l| l.len()));
    let dense = |f: &Form, cols: usize| {
        let mut row = vec![Int::zero(); cols];
        for (i, v) in f {
            row[*i] = v.clone();
        }
        row
    };
    let mut layers = Vec::with_capacity(depth + 1);
    for l in 1..=depth {
        let rows: Vec<Vec<Int>> = b.levels[l].iter().map(|f| dense(f, widths[l - 1])).collect();
        layers.push(Mat::from_rows(&rows, widths[l - 1])?);
    }
    layers.push(Mat::from_rows(&[dense(&out, widths[depth])], widths[depth])?);
    IntegralNetwork::new(n, layers)
}

/// `conv{0, e_1, …, e_m}` as a balanced tree of depth `⌈log₂(m + 1)⌉`.
pub fn simplex_tree(m: usize) -> Arc<ConstructionTree> {
    let pts: Vec<Arc<ConstructionTree>> = (0..=m)
        .map(|i| {
            let mut v = vec![Int::zero(); m];
            if i > 0 {
                v[i - 1] = Int::from(1);
            }
            ConstructionTree::leaf(v)
        })
        .collect();
    fn balanced(xs: &[Arc<ConstructionTree>]) -> Arc<ConstructionTree> {
        if xs.len() == 1 {
            return xs[0].clone();
        }
        let mid = xs.len().div_ceil(2);
        ConstructionTree::conv(balanced(&xs[..mid]), balanced(&xs[mid..]))
    }
    balanced(&pts)
}
