//! Bidirected support graphs, the log-ratio edge 1-form, fundamental cycle
//! bases, affinities, exactness with potential reconstruction, cycle rank,
//! edge gating, and the lazy-walk spectral gap.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::kernel::{check_detailed_balance, Dist, Kernel};
use crate::matrix::Matrix;

/// Support structure of a kernel. Self-loops never contribute edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportGraph {
    pub vertex_count: usize,
    /// Unordered bidirected edges, stored as `(i, j)` with `i < j`.
    pub undirected_edges: Vec<(usize, usize)>,
    /// All ordered pairs with `P_ij > zero_tol`, `i != j`.
    pub directed_support: BTreeSet<(usize, usize)>,
    /// Component label per vertex, induced by the bidirected edges.
    pub components: Vec<usize>,
    pub component_count: usize,
    /// True when the directed support is symmetric as a set.
    pub rev_ok: bool,
    /// Directed edges whose reverse is missing.
    pub rev_violations: Vec<(usize, usize)>,
}

impl SupportGraph {
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let key = if i < j { (i, j) } else { (j, i) };
        self.undirected_edges.binary_search(&key).is_ok()
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(i, j) in &self.undirected_edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        for nbrs in &mut adj {
            nbrs.sort_unstable();
        }
        adj
    }
}

/// Builds the support graph; reversibility violations are reported as data,
/// not errors.
pub fn support_graph(p: &Kernel, zero_tol: f64) -> SupportGraph {
    let n = p.dim();
    let mut directed = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && p.entry(i, j) > zero_tol {
                directed.insert((i, j));
            }
        }
    }
    let mut undirected = Vec::new();
    let mut violations = Vec::new();
    for &(i, j) in &directed {
        if directed.contains(&(j, i)) {
            if i < j {
                undirected.push((i, j));
            }
        } else {
            violations.push((i, j));
        }
    }

    // Components over the bidirected edges; isolated vertices stand alone.
    let mut components = vec![usize::MAX; n];
    let mut adj = vec![Vec::new(); n];
    for &(i, j) in &undirected {
        adj[i].push(j);
        adj[j].push(i);
    }
    let mut component_count = 0;
    for start in 0..n {
        if components[start] != usize::MAX {
            continue;
        }
        let label = component_count;
        component_count += 1;
        let mut queue = vec![start];
        components[start] = label;
        while let Some(v) = queue.pop() {
            for &w in &adj[v] {
                if components[w] == usize::MAX {
                    components[w] = label;
                    queue.push(w);
                }
            }
        }
    }

    SupportGraph {
        vertex_count: n,
        undirected_edges: undirected,
        directed_support: directed,
        components,
        component_count,
        rev_ok: violations.is_empty(),
        rev_violations: violations,
    }
}

/// Antisymmetric edge weights on the bidirected support: one value stored
/// per unordered edge, negated when read against orientation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneForm {
    values: BTreeMap<(usize, usize), f64>,
}

impl OneForm {
    pub fn from_edge_values(values: BTreeMap<(usize, usize), f64>) -> Result<Self> {
        for &(i, j) in values.keys() {
            if i >= j {
                return Err(CoreError::ShapeMismatch {
                    context: format!("edge keys must satisfy i < j, got ({i}, {j})"),
                });
            }
        }
        Ok(Self { values })
    }

    /// Value on the oriented edge `i -> j`; antisymmetry is exact because
    /// only one orientation is stored.
    pub fn eval(&self, i: usize, j: usize) -> Result<f64> {
        if i < j {
            self.values.get(&(i, j)).copied().ok_or(CoreError::EdgeMissing { from: i, to: j })
        } else {
            self.values
                .get(&(j, i))
                .map(|v| -v)
                .ok_or(CoreError::EdgeMissing { from: i, to: j })
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.values.iter().map(|(&(i, j), &v)| (i, j, v))
    }

    pub fn edge_count(&self) -> usize {
        self.values.len()
    }
}

/// The log-ratio 1-form `a_ij = ln(P_ij / P_ji)` on bidirected support.
pub fn one_form(p: &Kernel, graph: &SupportGraph) -> Result<OneForm> {
    if !graph.rev_ok {
        let &(from, to) = graph.rev_violations.first().expect("rev_ok is false");
        return Err(CoreError::RevViolation { from, to });
    }
    let mut values = BTreeMap::new();
    for &(i, j) in &graph.undirected_edges {
        values.insert((i, j), (p.entry(i, j) / p.entry(j, i)).ln());
    }
    Ok(OneForm { values })
}

/// How the spanning forest behind a cycle basis is grown.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForestStrategy {
    Bfs,
    Dfs,
}

/// Spanning forest plus one fundamental cycle per chord.
///
///Each cycle is an oriented vertex sequence starting and ending at the same
/// vertex, traversing its chord first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleBasis {
    /// Parent of each vertex in the forest (roots map to themselves).
    pub parent: Vec<usize>,
    /// Forest edges as `(i, j)` with `i < j`.
    pub forest_edges: BTreeSet<(usize, usize)>,
    /// Non-tree edges, sorted lexicographically.
    pub chords: Vec<(usize, usize)>,
    /// Fundamental cycles, one per chord, chord traversed first.
    pub cycles: Vec<Vec<usize>>,
}

impl CycleBasis {
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }
}

/// Deterministic fundamental cycle basis: BFS forest from the lowest-index
/// root of each component, chords in lexicographic order.
pub fn cycle_basis(graph: &SupportGraph) -> CycleBasis {
    cycle_basis_with(graph, ForestStrategy::Bfs)
}

/// Cycle basis with an explicit forest strategy. Exactness is basis
/// independent, so BFS and DFS bases must agree on the null regime.
pub fn cycle_basis_with(graph: &SupportGraph, strategy: ForestStrategy) -> CycleBasis {
    let n = graph.vertex_count;
    let adj = graph.adjacency();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut visited = vec![false; n];
    let mut forest_edges = BTreeSet::new();

    for root in 0..n {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        match strategy {
            ForestStrategy::Bfs => {
                let mut queue = std::collections::VecDeque::from([root]);
                while let Some(v) = queue.pop_front() {
                    for &w in &adj[v] {
                        if !visited[w] {
                            visited[w] = true;
                            parent[w] = v;
                            forest_edges.insert(if v < w { (v, w) } else { (w, v) });
                            queue.push_back(w);
                        }
                    }
                }
            }
            ForestStrategy::Dfs => {
                let mut stack = vec![root];
                while let Some(v) = stack.pop() {
                    for &w in adj[v].iter().rev() {
                        if !visited[w] {
                            visited[w] = true;
                            parent[w] = v;
                            forest_edges.insert(if v < w { (v, w) } else { (w, v) });
                            stack.push(w);
                        }
                    }
                }
            }
        }
    }

    let chords: Vec<(usize, usize)> = graph
        .undirected_edges
        .iter()
        .copied()
        .filter(|e| !forest_edges.contains(e))
        .collect();

    let cycles = chords
        .iter()
        .map(|&(u, v)| {
            // Chord-first orientation: u -> v, then the tree path from v
            // back to u.
            let mut cycle = vec![u, v];
            cycle.extend(tree_path(&parent, v, u).into_iter().skip(1));
            cycle
        })
        .collect();

    CycleBasis { parent, forest_edges, chords, cycles }
}

/// Vertex path from `a` to `b` along the forest, inclusive of both ends.
fn tree_path(parent: &[usize], a: usize, b: usize) -> Vec<usize> {
    let ancestors = |mut v: usize| {
        let mut chain = vec![v];
        while parent[v] != v {
            v = parent[v];
            chain.push(v);
        }
        chain
    };
    let up_a = ancestors(a);
    let up_b = ancestors(b);
    let in_b: std::collections::HashSet<usize> = up_b.iter().copied().collect();
    let meet_idx = up_a
        .iter()
        .position(|v| in_b.contains(v))
        .expect("a and b share a component");
    let meet = up_a[meet_idx];
    let mut path: Vec<usize> = up_a[..=meet_idx].to_vec();
    let tail: Vec<usize> =
        up_b.iter().take_while(|&&v| v != meet).copied().collect();
    path.extend(tail.into_iter().rev());
    path
}

/// Signed sums of a 1-form around each basis cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffinityVector(pub Vec<f64>);

impl AffinityVector {
    pub fn all_within(&self, tol: f64) -> bool {
        self.0.iter().all(|a| a.abs() <= tol)
    }
}

pub fn affinities(a: &OneForm, basis: &CycleBasis) -> Result<AffinityVector> {
    let mut out = Vec::with_capacity(basis.cycles.len());
    for cycle in &basis.cycles {
        let mut acc = 0.0;
        for pair in cycle.windows(2) {
            acc += a.eval(pair[0], pair[1])?;
        }
        out.push(acc);
    }
    Ok(AffinityVector(out))
}

/// Exactness verdict with potential reconstruction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactnessReport {
    pub exact: bool,
    /// Tree-integrated potential, present only when exact. Roots sit at 0
    /// in each component.
    pub potential: Option<Vec<f64>>,
    /// Max over all edges of `|a_ij - (phi_j - phi_i)|` for the
    /// tree-integrated potential; concentrates on chords when not exact.
    pub max_residual: f64,
    pub affinities: AffinityVector,
}

/// Decides exactness by the basis affinities and reconstructs the potential
/// by integrating the 1-form along tree paths.
pub fn exactness(a: &OneForm, basis: &CycleBasis, graph: &SupportGraph, tol: f64) -> Result<ExactnessReport> {
    let aff = affinities(a, basis)?;
    let exact = aff.all_within(tol);

    let n = graph.vertex_count;
    let mut phi = vec![0.0; n];
    // Integrate along forest edges in BFS order from each root.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| depth(&basis.parent, v));
    for v in order {
        let p = basis.parent[v];
        if p != v {
            phi[v] = phi[p] + a.eval(p, v)?;
        }
    }

    let mut max_residual = 0.0f64;
    for &(i, j) in &graph.undirected_edges {
        let residual = (a.eval(i, j)? - (phi[j] - phi[i])).abs();
        max_residual = max_residual.max(residual);
    }

    if exact && max_residual > tol {
        return Err(CoreError::ShapeMismatch {
            context: format!(
                "all affinities within {tol} but tree-integrated residual is {max_residual}"
            ),
        });
    }

    Ok(ExactnessReport {
        exact,
        potential: exact.then_some(phi),
        max_residual,
        affinities: aff,
    })
}

fn depth(parent: &[usize], mut v: usize) -> usize {
    let mut d = 0;
    while parent[v] != v {
        v = parent[v];
        d += 1;
    }
    d
}

/// `beta_1 = |E| - |V| + c(G)`.
pub fn cycle_rank(graph: &SupportGraph) -> usize {
    graph.undirected_edges.len() + graph.component_count - graph.vertex_count
}

/// Deletes both orientations of the given unordered edges and renormalizes
/// rows. The cycle rank can only shrink; this is asserted.
pub fn gate_edges(
    p: &Kernel,
    delete: &BTreeSet<(usize, usize)>,
    zero_tol: f64,
) -> Result<Kernel> {
    let n = p.dim();
    let beta_before = cycle_rank(&support_graph(p, zero_tol));
    let mut rows = p.to_rows();
    for &(a, b) in delete {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        if i >= n || j >= n {
            return Err(CoreError::DimensionMismatch { expected: n, got: j + 1 });
        }
        rows[i][j] = 0.0;
        rows[j][i] = 0.0;
    }
    for (i, row) in rows.iter_mut().enumerate() {
        let sum: f64 = row.iter().sum();
        if sum <= zero_tol {
            return Err(CoreError::RowStarved { row: i });
        }
        if (sum - 1.0).abs() > 1e-13 {
            for v in row.iter_mut() {
                *v /= sum;
            }
        }
    }
    let gated = Kernel::from_matrix_unchecked(Matrix::from_rows(rows)?);
    let beta_after = cycle_rank(&support_graph(&gated, zero_tol));
    assert!(
        beta_after <= beta_before,
        "edge deletion increased cycle rank: {beta_before} -> {beta_after}"
    );
    Ok(gated)
}

const REVERSIBILITY_TOL: f64 = 1e-10;
const SYMMETRY_DEFECT_TOL: f64 = 1e-10;

/// Spectral gap `1 - lambda_2` of the lazy walk `(I + P)/2`, computed from
/// the pi-symmetrized matrix `D^{1/2} L D^{-1/2}` with `D = diag(pi)`.
pub fn spectral_gap(p: &Kernel, pi: &Dist) -> Result<f64> {
    let n = p.dim();
    if pi.len() != n {
        return Err(CoreError::DimensionMismatch { expected: n, got: pi.len() });
    }
    for i in 0..n {
        if pi.weight(i) <= 0.0 {
            return Err(CoreError::ZeroMassState { state: i });
        }
    }
    let db = check_detailed_balance(p, pi, REVERSIBILITY_TOL)?;
    if !db.reversible {
        return Err(CoreError::NotReversible { violation: db.max_violation });
    }
    if n == 1 {
        return Ok(1.0);
    }

    let mut sym = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let lazy = 0.5 * (if i == j { 1.0 + p.entry(i, j) } else { p.entry(i, j) });
            sym.set(i, j, (pi.weight(i) / pi.weight(j)).sqrt() * lazy);
        }
    }
    let mut defect = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            defect = defect.max((sym.get(i, j) - sym.get(j, i)).abs());
        }
    }
    if defect > SYMMETRY_DEFECT_TOL {
        return Err(CoreError::NotReversible { violation: defect });
    }
    let eigs = sym.symmetric_eigenvalues()?;
    let gap = 1.0 - eigs[1];
    Ok(gap.clamp(0.0, 1.0))
}
