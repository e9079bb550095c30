use serde::Serialize;

use super::structure::{check_generalized_invariance, vertex_disjoint_paths, InvarianceQuery, StructuralGraph};
use crate::abstraction::Partition;
use crate::error::{Error, Result};

pub const DEFAULT_SELECTION_BUDGET: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectionOptions {
    pub max_results: usize,
    /// Upper bound on candidate partitions evaluated.
    pub budget: usize,
}

impl Default for SelectionOptions {
    fn default() -> Self {
        Self { max_results: 10, budget: DEFAULT_SELECTION_BUDGET }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelectionOutcome {
    #[serde(skip)]
    pub partitions: Vec<Partition>,
    pub evaluations: usize,
    pub budget_exhausted: bool,
}

/// Structural feasibility of a partition for the module `i → j`: the
/// invariance conditions hold and `V` reaches `L` along `|V|` vertex-disjoint
/// paths through `Z̃`.
pub fn is_feasible_selection(g: &StructuralGraph, i: usize, j: usize, p: &Partition) -> bool {
    let Ok(q) = InvarianceQuery::new(i, j, p.clone()) else {
        return false;
    };
    check_generalized_invariance(g, &q)
        && vertex_disjoint_paths(g, p.v_set(), p.l_set(), p.z_tilde()) == p.v_set().len()
}

/// Partitions leaving `G_ji` invariant, one per inclusion-minimal measured set
/// `S̃ ∪ L ⊆ measurable`, fewest measurements first.
pub fn select_nodes(
    g: &StructuralGraph,
    i: usize,
    j: usize,
    measurable: &[usize],
    max_results: usize,
) -> Result<Vec<Partition>> {
    let opts = SelectionOptions { max_results, ..SelectionOptions::default() };
    let out = select_nodes_with(g, i, j, measurable, &opts)?;
    Ok(out.partitions)
}

pub fn select_nodes_with(
    g: &StructuralGraph,
    i: usize,
    j: usize,
    measurable: &[usize],
    opts: &SelectionOptions,
) -> Result<SelectionOutcome> {
    let n = g.node_count();
    if i == j || i >= n || j >= n {
        return Err(Error::InvalidPartition("target module needs two distinct nodes".into()));
    }
    if !measurable.contains(&i) || !measurable.contains(&j) {
        return Err(Error::InvalidPartition("both ends of the target module must be measurable".into()));
    }
    let mut extra: Vec<usize> = measurable.iter().copied().filter(|&k| k != i && k != j && k < n).collect();
    extra.sort_unstable();
    extra.dedup();

    let reachable = g.reachable_from(&[i, j]);
    let mut search = Search { g, i, j, budget: opts.budget, evaluations: 0, reachable };
    let mut found: Vec<Vec<bool>> = Vec::new();
    let mut partitions = Vec::new();

    'sizes: for size in 0..=extra.len() {
        for combo in combinations(&extra, size) {
            let mut measured = vec![false; n];
            measured[i] = true;
            measured[j] = true;
            for &k in &combo {
                measured[k] = true;
            }
            if found.iter().any(|f| f.iter().zip(&measured).all(|(&a, &b)| !a || b)) {
                continue;
            }
            match search.best_for(&measured, &combo) {
                Some(p) => {
                    partitions.push(p);
                    found.push(measured);
                    if partitions.len() >= opts.max_results {
                        break 'sizes;
                    }
                }
                None if search.exhausted() => break 'sizes,
                None => {}
            }
        }
    }
    if partitions.is_empty() {
        return Err(Error::NoFeasibleSelection);
    }
    Ok(SelectionOutcome { partitions, evaluations: search.evaluations, budget_exhausted: search.exhausted() })
}

struct Search<'a> {
    g: &'a StructuralGraph,
    i: usize,
    j: usize,
    budget: usize,
    evaluations: usize,
    reachable: Vec<bool>,
}

impl Search<'_> {
    fn exhausted(&self) -> bool {
        self.evaluations >= self.budget
    }

    /// First feasible split of the measured set, ordered by `|V|`, then `|L|`,
    /// then `L` and `V` lexicographically.
    fn best_for(&mut self, measured: &[bool], others: &[usize]) -> Option<Partition> {
        let n = self.g.node_count();
        // Removed nodes unreachable from i and j cannot block anything.
        let candidates: Vec<usize> = (0..n).filter(|&k| !measured[k] && self.reachable[k]).collect();
        for v_size in 0..=others.len().min(candidates.len()) {
            for l_size in v_size..=others.len() {
                if v_size > l_size {
                    continue;
                }
                for l_set in combinations(others, l_size) {
                    if v_size > 0 && l_set.is_empty() {
                        continue;
                    }
                    let s_tilde: Vec<usize> =
                        (0..n).filter(|&k| measured[k] && !l_set.contains(&k)).collect();
                    for v_set in combinations(&candidates, v_size) {
                        if self.exhausted() {
                            return None;
                        }
                        self.evaluations += 1;
                        let z: Vec<usize> = (0..n).filter(|&k| !measured[k] && !v_set.contains(&k)).collect();
                        let Ok(p) = Partition::new(n, &s_tilde, &l_set, &v_set, &z) else {
                            continue;
                        };
                        if is_feasible_selection(self.g, self.i, self.j, &p) {
                            return Some(p);
                        }
                    }
                }
            }
        }
        None
    }
}

/// Size-`k` subsets of `items` in lexicographic order.
pub(crate) fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > items.len() {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&x| items[x]).collect());
        let Some(pos) = (0..k).rev().find(|&p| idx[p] != p + items.len() - k) else {
            return out;
        };
        idx[pos] += 1;
        for q in pos + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_are_lexicographic() {
        assert_eq!(combinations(&[1, 2, 3], 2), vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(combinations(&[1, 2], 0), vec![Vec::<usize>::new()]);
        assert!(combinations(&[1], 2).is_empty());
    }

    #[test]
    fn chain_needs_nothing_else() {
        let g = StructuralGraph::new(3, &[(0, 1), (2, 0)]).unwrap();
        let out = select_nodes(&g, 0, 1, &[0, 1, 2], 10).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].s_tilde(), &[0, 1]);
        assert!(out[0].l_set().is_empty() && out[0].v_set().is_empty());
    }

    #[test]
    fn unblockable_parallel_path() {
        // i → u → j with u not measurable and nothing to observe it through.
        let g = StructuralGraph::new(3, &[(0, 1), (0, 2), (2, 1)]).unwrap();
        assert_eq!(select_nodes(&g, 0, 1, &[0, 1], 5), Err(Error::NoFeasibleSelection));
        assert_eq!(select_nodes(&g, 0, 1, &[0, 1, 2], 5).unwrap()[0].s_tilde(), &[0, 1, 2]);
    }
}
