use std::collections::VecDeque;
use std::fmt::Write;

use crate::abstraction::{NodeClass, Partition};
use crate::error::{Error, Result};
use crate::ratfun::TransferMatrix;

/// Directed topology of a module matrix: edge `from → to` iff `G[to][from] ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StructuralGraph {
    n: usize,
    out: Vec<Vec<usize>>,
}

impl StructuralGraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut out = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::DimensionMismatch(format!("edge ({a},{b}) outside {n} nodes")));
            }
            if a == b {
                return Err(Error::InvalidModel(format!("self-edge at node {}", a + 1)));
            }
            out[a].push(b);
        }
        for o in &mut out {
            o.sort_unstable();
            o.dedup();
        }
        Ok(Self { n, out })
    }

    /// Diagonal entries are ignored.
    pub fn from_matrix(g: &TransferMatrix) -> Self {
        let n = g.rows();
        let mut out = vec![Vec::new(); n];
        for (to, from) in g.support() {
            if to != from {
                out[from].push(to);
            }
        }
        for o in &mut out {
            o.sort_unstable();
        }
        Self { n, out }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.out[from].binary_search(&to).is_ok()
    }

    pub fn out_neighbors(&self, node: usize) -> &[usize] {
        &self.out[node]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.out.iter().enumerate().flat_map(|(a, o)| o.iter().map(move |&b| (a, b))).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    /// Nodes reachable from `sources` along at least one edge.
    pub fn reachable_from(&self, sources: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let mut queue: VecDeque<usize> = sources.iter().copied().collect();
        while let Some(a) = queue.pop_front() {
            for &b in &self.out[a] {
                if !seen[b] {
                    seen[b] = true;
                    queue.push_back(b);
                }
            }
        }
        seen
    }
}

fn mask(n: usize, nodes: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &i in nodes {
        m[i] = true;
    }
    m
}

/// Whether a path of at least one edge runs from `from` to `to` with every
/// intermediate node outside `blockers`. Endpoints are never blocked, a path
/// ends at its first visit of `to`, and `forbid_first_edge` removes one edge as
/// a first step.
pub fn path_exists_avoiding(
    g: &StructuralGraph,
    from: usize,
    to: usize,
    blockers: &[usize],
    forbid_first_edge: Option<(usize, usize)>,
) -> bool {
    let blocked = mask(g.n, blockers);
    search(g, from, to, |k| !blocked[k], forbid_first_edge)
}

fn search(
    g: &StructuralGraph,
    from: usize,
    to: usize,
    passable: impl Fn(usize) -> bool,
    forbid_first_edge: Option<(usize, usize)>,
) -> bool {
    let mut seen = vec![false; g.n];
    seen[from] = true;
    let mut queue = VecDeque::new();
    for &b in g.out_neighbors(from) {
        if forbid_first_edge == Some((from, b)) {
            continue;
        }
        if b == to {
            return true;
        }
        if passable(b) && !seen[b] {
            seen[b] = true;
            queue.push_back(b);
        }
    }
    while let Some(a) = queue.pop_front() {
        for &b in g.out_neighbors(a) {
            if b == to {
                return true;
            }
            if passable(b) && !seen[b] {
                seen[b] = true;
                queue.push_back(b);
            }
        }
    }
    false
}

/// Target module `i → j` with a candidate partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvarianceQuery {
    pub i: usize,
    pub j: usize,
    pub partition: Partition,
}

impl InvarianceQuery {
    pub fn new(i: usize, j: usize, partition: Partition) -> Result<Self> {
        if i == j {
            return Err(Error::InvalidPartition("input and output node coincide".into()));
        }
        let n = partition.node_count();
        if i >= n || j >= n {
            return Err(Error::InvalidPartition("target node out of range".into()));
        }
        if partition.class_of(i) != NodeClass::STilde || partition.class_of(j) != NodeClass::STilde {
            return Err(Error::InvalidPartition("both ends of the target module must be in S~".into()));
        }
        Ok(Self { i, j, partition })
    }

    /// `{j} ∪ L`
    pub fn j_set(&self) -> Vec<usize> {
        std::iter::once(self.j).chain(self.partition.l_set().iter().copied()).collect()
    }

    /// `V ∪ S̃ \ {j}`
    pub fn k_set(&self) -> Vec<usize> {
        let mut k: Vec<usize> = self.partition.v_set().to_vec();
        k.extend(self.partition.s_tilde().iter().filter(|&&s| s != self.j));
        k.sort_unstable();
        k
    }

    /// `S̃ \ {j}`
    pub fn d_j(&self) -> Vec<usize> {
        self.partition.s_tilde().iter().copied().filter(|&s| s != self.j).collect()
    }
}

/// Invariance of `G_ji` under immersion onto `s_tilde`: `i` kept, no parallel
/// path and no loop through `j` escaping `S̃ \ {j}`.
pub fn check_immersion_invariance(g: &StructuralGraph, i: usize, j: usize, s_tilde: &[usize]) -> bool {
    if i == j || !s_tilde.contains(&i) || !s_tilde.contains(&j) {
        return false;
    }
    let d: Vec<usize> = s_tilde.iter().copied().filter(|&s| s != j).collect();
    !path_exists_avoiding(g, i, j, &d, Some((i, j))) && !path_exists_avoiding(g, j, j, &d, None)
}

/// Invariance of `G_ji` under the generalized abstraction: every path from
/// `i` (other than the module itself) and every path from `j` into `{j} ∪ L`
/// must meet `V ∪ S̃ \ {j}`.
pub fn check_generalized_invariance(g: &StructuralGraph, q: &InvarianceQuery) -> bool {
    let (i, j) = (q.i, q.j);
    if q.partition.class_of(i) != NodeClass::STilde || q.partition.class_of(j) != NodeClass::STilde || i == j {
        return false;
    }
    let k = q.k_set();
    let k_without_i: Vec<usize> = k.iter().copied().filter(|&x| x != i).collect();
    q.j_set().into_iter().all(|t| {
        let forbid = (t == j).then_some((i, j));
        !path_exists_avoiding(g, i, t, &k_without_i, forbid) && !path_exists_avoiding(g, j, t, &k, None)
    })
}

/// Structural forms of the six conditions the invariance proof derives:
/// no edge `i → L`, no edge `j → L`, and no `Z̃`-only detour from `i` or `j`
/// into `L`, and from `i` or `j` back into `j`.
pub fn derived_conditions(g: &StructuralGraph, q: &InvarianceQuery) -> [bool; 6] {
    let z = mask(g.n, q.partition.z_tilde());
    let l = q.partition.l_set();
    let via_z = |from: usize, to: usize| {
        g.out_neighbors(from)
            .iter()
            .any(|&b| z[b] && (g.has_edge(b, to) || search(g, b, to, |k| z[k], None)))
    };
    [
        l.iter().all(|&t| !g.has_edge(q.i, t)),
        l.iter().all(|&t| !g.has_edge(q.j, t)),
        l.iter().all(|&t| !via_z(q.i, t)),
        l.iter().all(|&t| !via_z(q.j, t)),
        !via_z(q.i, q.j),
        !via_z(q.j, q.j),
    ]
}

/// Maximum number of internally vertex-disjoint paths from `sources` to
/// `sinks` whose intermediate nodes lie in `allowed`; each source and sink is
/// used at most once.
pub fn vertex_disjoint_paths(g: &StructuralGraph, sources: &[usize], sinks: &[usize], allowed: &[usize]) -> usize {
    let n = g.n;
    let is_src = mask(n, sources);
    let is_sink = mask(n, sinks);
    let is_mid: Vec<bool> = mask(n, allowed).iter().enumerate().map(|(k, &a)| a && !is_src[k] && !is_sink[k]).collect();
    // Node k splits into k_in = 2k and k_out = 2k+1; super source 2n, sink 2n+1.
    let (src, dst) = (2 * n, 2 * n + 1);
    let mut cap = vec![Vec::<(usize, i32)>::new(); 2 * n + 2];
    let add = |cap: &mut Vec<Vec<(usize, i32)>>, a: usize, b: usize| {
        cap[a].push((b, 1));
        cap[b].push((a, 0));
    };
    for k in 0..n {
        if is_src[k] {
            add(&mut cap, src, 2 * k + 1);
        }
        if is_sink[k] {
            add(&mut cap, 2 * k, dst);
        }
        if is_mid[k] {
            add(&mut cap, 2 * k, 2 * k + 1);
        }
    }
    for (a, b) in g.edges() {
        if (is_src[a] || is_mid[a]) && (is_sink[b] || is_mid[b]) {
            add(&mut cap, 2 * a + 1, 2 * b);
        }
    }
    let mut flow = 0;
    loop {
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; 2 * n + 2];
        let mut queue = VecDeque::from([src]);
        let mut reached = false;
        while let Some(a) = queue.pop_front() {
            if a == dst {
                reached = true;
                break;
            }
            for (idx, &(b, c)) in cap[a].iter().enumerate() {
                if c > 0 && b != src && prev[b].is_none() {
                    prev[b] = Some((a, idx));
                    queue.push_back(b);
                }
            }
        }
        if !reached {
            return flow;
        }
        let mut b = dst;
        while let Some((a, idx)) = prev[b] {
            cap[a][idx].1 -= 1;
            let back = cap[b].iter().position(|&(t, _)| t == a).expect("reverse edge");
            cap[b][back].1 += 1;
            b = a;
        }
        flow += 1;
    }
}

/// Graphviz rendering with one colour per partition class.
pub fn to_dot(g: &StructuralGraph, labels: &[String], partition: Option<&Partition>) -> String {
    let mut s = String::from("digraph network {\n  rankdir=LR;\n  node [shape=circle, style=filled, fillcolor=white];\n");
    for (k, label) in labels.iter().enumerate().take(g.n) {
        let colour = partition.map(|p| match p.class_of(k) {
            NodeClass::STilde => "lightblue",
            NodeClass::L => "palegreen",
            NodeClass::V => "orange",
            NodeClass::ZTilde => "lightgrey",
        });
        match colour {
            Some(c) => {
                let class = partition.map(|p| p.class_of(k).symbol()).unwrap_or_default();
                let _ = writeln!(s, "  \"{label}\" [fillcolor={c}, xlabel=\"{class}\"];");
            }
            None => {
                let _ = writeln!(s, "  \"{label}\";");
            }
        }
    }
    for (a, b) in g.edges() {
        let _ = writeln!(s, "  \"{}\" -> \"{}\";", labels[a], labels[b]);
    }
    s.push_str("}\n");
    s
}
