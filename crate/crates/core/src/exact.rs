//! Exact brute-force solvers for desk-scale instances. These enumerate every
//! root-containing connected node set and serve as ground truth for the
//! solvers' guarantees.

use std::collections::{BTreeSet, VecDeque};

use crate::graph::{NodeWeightedGraph, RootedTree};
use crate::prize::PrizeOracle;
use crate::{Error, Result};

/// Enumeration limit: `2^(n-1)` subsets are scanned.
pub const EXACT_NODE_LIMIT: usize = 18;
/// Limit for connected-subtree enumeration.
pub const SUBTREE_NODE_LIMIT: usize = 14;

/// What to optimize over root-containing connected sets.
#[derive(Debug, Clone)]
pub enum ExactProblem {
    /// Minimum cost set containing all terminals.
    SteinerSpan { terminals: BTreeSet<usize> },
    /// Maximum prize under a cost budget.
    Budget { budget: f64 },
    /// Minimum cost reaching a prize quota.
    Quota { quota: f64 },
}

#[derive(Debug, Clone)]
pub struct ExactResult {
    pub best_set: Option<BTreeSet<usize>>,
    pub best_value: f64,
    pub enumerated: u64,
}

fn connected_from_root(
    graph: &NodeWeightedGraph,
    root: usize,
    members: &[usize],
    in_set: &[bool],
) -> bool {
    let mut seen = vec![false; graph.node_count()];
    let mut queue = VecDeque::new();
    seen[root] = true;
    queue.push_back(root);
    let mut count = 1usize;
    while let Some(u) = queue.pop_front() {
        for &w in graph.out_neighbors(u) {
            if in_set[w] && !seen[w] {
                seen[w] = true;
                count += 1;
                queue.push_back(w);
            }
        }
    }
    count == members.len()
}

/// Scans all root-containing subsets whose induced subgraph is reachable from
/// the root and optimizes the given objective. Prizes come from `oracle` when
/// given, otherwise from the graph's additive node prizes. Ties go to the
/// lexicographically smallest set.
pub fn exact_optimum(
    graph: &NodeWeightedGraph,
    problem: &ExactProblem,
    oracle: Option<&PrizeOracle>,
) -> Result<ExactResult> {
    let n = graph.node_count();
    if n > EXACT_NODE_LIMIT {
        return Err(Error::SizeLimit(format!(
            "exact enumeration supports at most {EXACT_NODE_LIMIT} nodes, got {n}"
        )));
    }
    if let ExactProblem::SteinerSpan { terminals } = problem {
        for &t in terminals {
            graph.check_node(t)?;
        }
    }
    let root = graph.root();
    let others: Vec<usize> = (0..n).filter(|&v| v != root).collect();
    let k = others.len();
    let prize_of = |set: &BTreeSet<usize>| -> f64 {
        match oracle {
            Some(o) => o.eval(set),
            None => set.iter().map(|&v| graph.prize(v)).sum(),
        }
    };

    let mut best_set: Option<BTreeSet<usize>> = None;
    let mut best_value = 0.0f64;
    let mut enumerated = 0u64;
    let mut in_set = vec![false; n];
    let mut members: Vec<usize> = Vec::with_capacity(n);
    for i in 0..(1u64 << k) {
        // Gray-code order keeps successive subsets one flip apart.
        let mask = i ^ (i >> 1);
        enumerated += 1;
        members.clear();
        members.push(root);
        in_set.iter_mut().for_each(|b| *b = false);
        in_set[root] = true;
        for (bit, &v) in others.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                in_set[v] = true;
                members.push(v);
            }
        }
        if !connected_from_root(graph, root, &members, &in_set) {
            continue;
        }
        let cost: f64 = members.iter().map(|&v| graph.cost(v)).sum();
        let set: BTreeSet<usize> = members.iter().copied().collect();
        let candidate = match problem {
            ExactProblem::SteinerSpan { terminals } => {
                if terminals.iter().all(|t| set.contains(t)) {
                    Some(cost)
                } else {
                    None
                }
            }
            ExactProblem::Budget { budget } => {
                if cost <= *budget + 1e-9 {
                    Some(prize_of(&set))
                } else {
                    None
                }
            }
            ExactProblem::Quota { quota } => {
                if prize_of(&set) >= *quota - 1e-9 {
                    Some(cost)
                } else {
                    None
                }
            }
        };
        let Some(value) = candidate else { continue };
        let better = match (&best_set, problem) {
            (None, _) => true,
            (Some(_), ExactProblem::Budget { .. }) => value > best_value + 1e-12,
            (Some(_), _) => value < best_value - 1e-12,
        };
        let tie = best_set.is_some() && (value - best_value).abs() <= 1e-12;
        if better || (tie && Some(&set) < best_set.as_ref()) {
            best_set = Some(set);
            best_value = value;
        }
    }
    Ok(ExactResult {
        best_set,
        best_value,
        enumerated,
    })
}

/// Turns an exact result set into a tree (shortest-path arborescence over the
/// set), for use as a drop-in optimal solver in tests and reductions.
pub fn exact_tree(graph: &NodeWeightedGraph, result: &ExactResult) -> Result<Option<RootedTree>> {
    match &result.best_set {
        None => Ok(None),
        Some(set) => Ok(Some(crate::graph::build_arborescence(graph, set)?)),
    }
}

/// All nonempty subsets of the tree's members that induce a connected subtree
/// (connectivity over the tree's arcs, ignoring direction; any root).
pub fn enumerate_connected_subtrees(tree: &RootedTree) -> Result<Vec<BTreeSet<usize>>> {
    let members: Vec<usize> = tree.members().iter().copied().collect();
    let k = members.len();
    if k > SUBTREE_NODE_LIMIT {
        return Err(Error::SizeLimit(format!(
            "subtree enumeration supports at most {SUBTREE_NODE_LIMIT} nodes, got {k}"
        )));
    }
    let pos = |v: usize| members.iter().position(|&m| m == v).unwrap();
    // undirected adjacency within the tree
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (parent, child) in tree.arcs() {
        let (p, c) = (pos(parent), pos(child));
        adj[p].push(c);
        adj[c].push(p);
    }
    let mut out = Vec::new();
    for mask in 1usize..(1 << k) {
        let start = mask.trailing_zeros() as usize;
        let mut seen = 0usize;
        let mut stack = vec![start];
        seen |= 1 << start;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if mask >> w & 1 == 1 && seen >> w & 1 == 0 {
                    seen |= 1 << w;
                    stack.push(w);
                }
            }
        }
        if seen == mask {
            out.push(
                (0..k)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| members[i])
                    .collect(),
            );
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_arborescence;

    fn digraph(costs: &[f64], prizes: &[f64], arcs: &[(usize, usize)]) -> NodeWeightedGraph {
        let mut g = NodeWeightedGraph::new(costs.len(), true);
        for v in 0..costs.len() {
            g.set_cost(v, costs[v]).unwrap();
            g.set_prize(v, prizes[v]).unwrap();
        }
        for &(u, v) in arcs {
            g.add_arc(u, v).unwrap();
        }
        g
    }

    #[test]
    fn steiner_on_a_path_is_the_path() {
        let g = digraph(&[0.0, 2.0, 1.0], &[0.0; 3], &[(0, 1), (1, 2)]);
        let r = exact_optimum(
            &g,
            &ExactProblem::SteinerSpan {
                terminals: [2].into_iter().collect(),
            },
            None,
        )
        .unwrap();
        assert_eq!(r.best_set.unwrap().len(), 3);
        assert!((r.best_value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn loose_budget_collects_everything() {
        let g = digraph(&[0.0, 1.0, 1.0], &[0.0, 2.0, 3.0], &[(0, 1), (0, 2)]);
        let r = exact_optimum(&g, &ExactProblem::Budget { budget: 10.0 }, None).unwrap();
        assert!((r.best_value - 5.0).abs() < 1e-12);
        assert_eq!(r.best_set.unwrap().len(), 3);
    }

    #[test]
    fn tight_budget_takes_the_better_branch() {
        // diamond: afford only one of the two middle nodes
        let g = digraph(
            &[0.0, 1.0, 1.0, 5.0],
            &[0.0, 2.0, 3.0, 10.0],
            &[(0, 1), (0, 2), (1, 3), (2, 3)],
        );
        let r = exact_optimum(&g, &ExactProblem::Budget { budget: 1.0 }, None).unwrap();
        assert!((r.best_value - 3.0).abs() < 1e-12);
        assert_eq!(r.best_set.unwrap(), [0, 2].into_iter().collect());
    }

    #[test]
    fn quota_unreachable_reports_none() {
        let g = digraph(&[0.0, 1.0], &[0.0, 1.0], &[(0, 1)]);
        let r = exact_optimum(&g, &ExactProblem::Quota { quota: 5.0 }, None).unwrap();
        assert!(r.best_set.is_none());
    }

    #[test]
    fn subtree_counts_match_closed_forms() {
        // single node
        let g = digraph(&[0.0], &[0.0], &[]);
        let t = build_arborescence(&g, &[0].into_iter().collect()).unwrap();
        assert_eq!(enumerate_connected_subtrees(&t).unwrap().len(), 1);

        // path of 3: intervals, 3 + 2 + 1
        let g = digraph(&[0.0, 1.0, 1.0], &[0.0; 3], &[(0, 1), (1, 2)]);
        let t = build_arborescence(&g, &(0..3).collect()).unwrap();
        assert_eq!(enumerate_connected_subtrees(&t).unwrap().len(), 6);

        // star with 3 leaves: 2^3 center-containing + 3 leaf singletons
        let g = digraph(&[0.0, 1.0, 1.0, 1.0], &[0.0; 4], &[(0, 1), (0, 2), (0, 3)]);
        let t = build_arborescence(&g, &(0..4).collect()).unwrap();
        assert_eq!(enumerate_connected_subtrees(&t).unwrap().len(), 11);
    }

    #[test]
    fn budget_sweep_is_monotone() {
        let g = digraph(
            &[0.0, 1.0, 2.0, 1.5],
            &[0.5, 2.0, 1.0, 3.0],
            &[(0, 1), (1, 2), (0, 3)],
        );
        let mut last = -1.0;
        for b in [0.0, 1.0, 2.0, 3.0, 5.0] {
            let r = exact_optimum(&g, &ExactProblem::Budget { budget: b }, None).unwrap();
            assert!(r.best_value >= last - 1e-12);
            last = r.best_value;
        }
    }
}
