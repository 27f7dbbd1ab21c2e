//! Comparison matrices on connected graphs.
//!
//! Absent comparisons are holes: they carry no coefficient and are never
//! touched by gauge actions. Inconsistency is measured through holonomy, the
//! ordered product of coefficients along a walk (`a[i][j]` for the step
//! `i -> j`, its inverse for `j -> i`).
//!
//! Walk enumeration only produces backtrack-reduced walks (no step
//! immediately undoing the previous one). Lengths count edges, so the empty
//! loop has length 0.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::gauge::GaugeVector;
use crate::group::{GroupElement, GroupSpec};
use crate::matrix::{upper_pairs, PCMatrix, WeightVector, DEFAULT_CONSISTENCY_TOL};

/// Default cap on the number of partial walks an enumeration may visit.
pub const DEFAULT_PATH_BUDGET: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct GraphPCMatrix {
    spec: GroupSpec,
    n: usize,
    /// Present coefficients `a[i][j]`, `i < j`.
    edges: BTreeMap<(usize, usize), GroupElement>,
    adjacency: Vec<Vec<usize>>,
}

/// A walk given by its node sequence. A single node is the empty walk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphPath {
    nodes: Vec<usize>,
}

impl GraphPath {
    pub fn new(nodes: Vec<usize>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidPath("a path has at least one node".into()));
        }
        Ok(GraphPath { nodes })
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    /// Number of traversed edges.
    pub fn len(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() == 1
    }

    pub fn reversed(&self) -> GraphPath {
        GraphPath { nodes: self.nodes.iter().rev().copied().collect() }
    }
}

impl GraphPCMatrix {
    /// Builds a graph matrix from `(i, j, a[i][j])` triples (0-based, either
    /// orientation). The graph must be connected with at most one edge per pair.
    pub fn new(spec: GroupSpec, n: usize, edges: Vec<(usize, usize, GroupElement)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no nodes".into()));
        }
        let mut map = BTreeMap::new();
        let mut adjacency = vec![Vec::new(); n];
        for (i, j, v) in edges {
            if i >= n || j >= n {
                return Err(Error::IndexOutOfRange { i, j, n });
            }
            if i == j {
                return Err(Error::InvalidGraph(format!("self-loop at node {}", i + 1)));
            }
            spec.validate(&v)?;
            let (key, value) = if i < j { ((i, j), v) } else { ((j, i), spec.inverse(&v)?) };
            if map.insert(key, value).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate edge {{{}, {}}}", key.0 + 1, key.1 + 1)));
            }
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        adjacency.iter_mut().for_each(|a| a.sort_unstable());
        let graph = GraphPCMatrix { spec, n, edges: map, adjacency };
        if graph.bfs_tree(0).iter().any(|p| p.is_none()) {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        Ok(graph)
    }

    /// The complete graph carrying every coefficient of `a`.
    pub fn from_pc_matrix(a: &PCMatrix) -> Result<Self> {
        let edges = upper_pairs(a.n()).map(|(i, j)| (i, j, a.upper(i, j).clone())).collect();
        Self::new(a.spec().clone(), a.n(), edges)
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Present coefficients `(i, j, a[i][j])`, `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &GroupElement)> {
        self.edges.iter().map(|(&(i, j), v)| (i, j, v))
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains_key(&(i.min(j), i.max(j)))
    }

    /// `a[i][j]` if the comparison is present, `None` for a hole.
    pub fn coefficient(&self, i: usize, j: usize) -> Result<Option<GroupElement>> {
        if i >= self.n || j >= self.n {
            return Err(Error::IndexOutOfRange { i, j, n: self.n });
        }
        if i == j {
            return Ok(Some(self.spec.identity()));
        }
        match self.edges.get(&(i.min(j), i.max(j))) {
            None => Ok(None),
            Some(v) if i < j => Ok(Some(v.clone())),
            Some(v) => self.spec.inverse(v).map(Some),
        }
    }

    fn step(&self, i: usize, j: usize) -> Result<GroupElement> {
        self.coefficient(i, j)?.ok_or_else(|| Error::InvalidPath(format!("no edge {{{}, {}}}", i + 1, j + 1)))
    }

    /// Parent pointers of the BFS tree from `root` (smallest neighbour first).
    fn bfs_tree(&self, root: usize) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.n];
        parent[root] = Some(root);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if parent[v].is_none() {
                    parent[v] = Some(u);
                    queue.push_back(v);
                }
            }
        }
        parent
    }

    /// Holonomies `P(u)` of the tree paths from node 0 to every node along
    /// the canonical spanning tree, plus the tree edges.
    fn tree_potentials(&self) -> Result<(Vec<GroupElement>, Vec<Option<usize>>)> {
        let parent = self.bfs_tree(0);
        let mut order = Vec::with_capacity(self.n);
        let mut queue = VecDeque::from([0usize]);
        let mut seen = vec![false; self.n];
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &v in &self.adjacency[u] {
                if !seen[v] && parent[v] == Some(u) {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        let mut potential = vec![self.spec.identity(); self.n];
        for &u in order.iter().skip(1) {
            let p = parent[u].expect("connected");
            potential[u] = self.spec.compose(&potential[p], &self.step(p, u)?)?;
        }
        Ok((potential, parent))
    }

    fn non_tree_edges<'a>(&'a self, parent: &'a [Option<usize>]) -> impl Iterator<Item = (usize, usize)> + 'a {
        self.edges
            .keys()
            .copied()
            .filter(move |&(i, j)| parent[i] != Some(j) && parent[j] != Some(i))
    }

    fn check_node(&self, s: usize) -> Result<()> {
        if s >= self.n {
            return Err(Error::IndexOutOfRange { i: s, j: s, n: self.n });
        }
        Ok(())
    }
}

/// Ordered product of the coefficients along `path`; identity for the empty path.
pub fn path_holonomy(a: &GraphPCMatrix, path: &GraphPath) -> Result<GroupElement> {
    let spec = a.spec();
    let mut h = spec.identity();
    if let Some(&bad) = path.nodes.iter().find(|&&v| v >= a.n) {
        return Err(Error::InvalidPath(format!("node {} out of range", bad + 1)));
    }
    for w in path.nodes.windows(2) {
        h = spec.compose(&h, &a.step(w[0], w[1])?)?;
    }
    Ok(h)
}

/// Generators of the holonomy group at `s`: one loop per edge outside the
/// canonical spanning tree (BFS from node 0), based at `s` through the tree.
/// Ordered by the non-tree edge `(i, j)`, `i < j`, each loop traversing it
/// from `i` to `j`.
pub fn holonomy_generators(a: &GraphPCMatrix, s: usize) -> Result<Vec<GroupElement>> {
    a.check_node(s)?;
    let spec = a.spec();
    let (potential, parent) = a.tree_potentials()?;
    let to_s = spec.inverse(&potential[s])?;
    a.non_tree_edges(&parent)
        .map(|(i, j)| {
            let at_root = spec.compose_all(&[
                potential[i].clone(),
                a.step(i, j)?,
                spec.inverse(&potential[j])?,
            ])?;
            spec.conjugate(&to_s, &at_root)
        })
        .collect()
}

/// Tree-path holonomy `h` from `s` to `t`; conjugating the generators at `t`
/// by `h` gives the generators at `s`.
pub fn conjugacy_witness(a: &GraphPCMatrix, s: usize, t: usize) -> Result<GroupElement> {
    a.check_node(s)?;
    a.check_node(t)?;
    let spec = a.spec();
    let (potential, _) = a.tree_potentials()?;
    spec.compose(&spec.inverse(&potential[s])?, &potential[t])
}

/// Trivial holonomy group, checked on the fundamental-cycle generators.
pub fn is_graph_consistent(a: &GraphPCMatrix, tol: f64) -> Result<bool> {
    for g in holonomy_generators(a, 0)? {
        if a.spec().deviation(&g)? > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Weights with `a[i][j] = lambda_i . lambda_j^-1` on every present edge,
/// normalized by `lambda_1 = e`. Fails on inconsistent input.
pub fn graph_weights(a: &GraphPCMatrix) -> Result<WeightVector> {
    if !is_graph_consistent(a, DEFAULT_CONSISTENCY_TOL)? {
        return Err(Error::InconsistentInput("the graph has nontrivial holonomy".into()));
    }
    let (potential, _) = a.tree_potentials()?;
    let lambda = potential.iter().map(|p| a.spec().inverse(p)).collect::<Result<Vec<_>>>()?;
    WeightVector::new(a.spec().clone(), lambda)
}

/// Adjoint action on present coefficients; holes stay holes.
pub fn graph_gauge_action(g: &GaugeVector, a: &GraphPCMatrix) -> Result<GraphPCMatrix> {
    if g.spec().kind() != a.spec().kind() {
        return Err(Error::SpecMismatch { expected: a.spec().to_string(), found: g.spec().to_string() });
    }
    if g.len() != a.n() {
        return Err(Error::Dimension(format!("gauge has {} entries, graph has {} nodes", g.len(), a.n())));
    }
    let spec = a.spec();
    let mut edges = BTreeMap::new();
    for (&(i, j), v) in &a.edges {
        let w = spec.compose_all(&[g.entries()[i].clone(), v.clone(), spec.inverse(&g.entries()[j])?])?;
        edges.insert((i, j), w);
    }
    Ok(GraphPCMatrix { spec: spec.clone(), n: a.n, edges, adjacency: a.adjacency.clone() })
}

/// A partial walk during level-by-level enumeration.
#[derive(Clone)]
struct Walk {
    at: usize,
    from: Option<usize>,
    holonomy: GroupElement,
}

/// Visits every backtrack-reduced walk from `s` of length `0..=max_len`,
/// level by level, calling `visit(length, walk)`.
fn enumerate_walks<F>(a: &GraphPCMatrix, s: usize, max_len: usize, budget: usize, mut visit: F) -> Result<()>
where
    F: FnMut(usize, &Walk) -> Result<()>,
{
    a.check_node(s)?;
    let spec = a.spec();
    let mut level = vec![Walk { at: s, from: None, holonomy: spec.identity() }];
    let mut visited = 1usize;
    visit(0, &level[0])?;
    for len in 1..=max_len {
        let mut next = Vec::new();
        for w in &level {
            for &v in a.neighbors(w.at) {
                if Some(v) == w.from {
                    continue;
                }
                visited += 1;
                if visited > budget {
                    return Err(Error::BudgetExceeded(budget));
                }
                let walk = Walk { at: v, from: Some(w.at), holonomy: spec.compose(&w.holonomy, &a.step(w.at, v)?)? };
                visit(len, &walk)?;
                next.push(walk);
            }
        }
        if next.is_empty() {
            break;
        }
        level = next;
    }
    Ok(())
}

/// Holonomies of reduced walks from `s` to `t` of length at most
/// `max_len`, deduplicated within the group tolerance, each with the
/// shortest length realizing it.
pub fn holonomy_set(
    a: &GraphPCMatrix,
    s: usize,
    t: usize,
    max_len: usize,
    budget: usize,
) -> Result<Vec<(GroupElement, usize)>> {
    a.check_node(t)?;
    let spec = a.spec();
    let mut found: Vec<(GroupElement, usize)> = Vec::new();
    enumerate_walks(a, s, max_len, budget, |len, w| {
        if w.at == t {
            let mut seen = false;
            for (h, _) in &found {
                if spec.deviation(&spec.divide(h, &w.holonomy)?)? <= spec.tolerance() {
                    seen = true;
                    break;
                }
            }
            if !seen {
                found.push((w.holonomy.clone(), len));
            }
        }
        Ok(())
    })?;
    Ok(found)
}

/// Shortest reduced loop at `s` (length at most `max_len`) whose holonomy
/// matches `h` within the group tolerance.
pub fn element_order(
    a: &GraphPCMatrix,
    s: usize,
    h: &GroupElement,
    max_len: usize,
    budget: usize,
) -> Result<Option<usize>> {
    let spec = a.spec();
    spec.validate(h)?;
    let mut best: Option<usize> = None;
    enumerate_walks(a, s, max_len, budget, |len, w| {
        if best.is_none() && w.at == s && spec.deviation(&spec.divide(&w.holonomy, h)?)? <= spec.tolerance() {
            best = Some(len);
        }
        Ok(())
    })?;
    Ok(best)
}

/// Coefficients `a_0, ..., a_N` of the ranked indicator: `a_n` is the worst
/// score among reduced loops at `s` of length exactly `n` (0 if none).
#[derive(Clone, Debug, PartialEq)]
pub struct RankedSeries {
    pub coefficients: Vec<f64>,
    pub max_length: usize,
}

impl fmt::Display for RankedSeries {
    /// Polynomial text, nonzero terms only: `0.5·X^3 + 0.2·X^4`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(k, c)| format!("{c}·X^{k}"))
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Default loop score `1 - exp(-deviation(h))`.
pub fn default_score(spec: &GroupSpec, h: &GroupElement) -> Result<f64> {
    Ok(1.0 - (-spec.deviation(h)?).exp())
}

pub fn ranked_kii<F>(a: &GraphPCMatrix, s: usize, max_len: usize, score: F, budget: usize) -> Result<RankedSeries>
where
    F: Fn(&GroupElement) -> Result<f64>,
{
    let at_identity = score(&a.spec().identity())?;
    if at_identity.abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("score of the identity must be 0, got {at_identity}")));
    }
    let mut coefficients = vec![0.0_f64; max_len + 1];
    enumerate_walks(a, s, max_len, budget, |len, w| {
        if len > 0 && w.at == s {
            coefficients[len] = coefficients[len].max(score(&w.holonomy)?);
        }
        Ok(())
    })?;
    Ok(RankedSeries { coefficients, max_length: max_len })
}
