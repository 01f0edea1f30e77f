//! Shared helpers for the integration suites: a vertex-enumeration LP oracle
//! independent of the simplex path, random model generators, and instance
//! construction utilities.

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use nwsteiner::graph::{
    build_arborescence, prune_to_b_proper, InducedSubgraph, NodeWeightedGraph, RootedTree,
};
use nwsteiner::simplex::{LpModel, Relation, Sense};

const ORACLE_FEAS_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleOutcome {
    Infeasible,
    Optimal(f64),
}

/// Solves a small square system by Gaussian elimination with partial
/// pivoting. Returns `None` for (numerically) singular systems.
fn solve_square(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot =
            (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[pivot][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Brute-force LP optimum by enumerating candidate vertices: every choice of
/// `num_vars` tight constraints among the rows (as equalities) and the
/// variable bounds. Feasible bounded LPs attain their optimum at such a
/// vertex, so this is an independent ground truth for the simplex.
pub fn vertex_enumeration_opt(model: &LpModel) -> OracleOutcome {
    let nv = model.num_vars();
    // constraint id: 0..rows = rows, then lo bounds, then hi bounds
    let rows = model.rows();
    let m = rows.len();
    let total = m + 2 * nv;
    let mut combo: Vec<usize> = (0..nv).collect();
    let mut best: Option<f64> = None;
    let mut any_feasible = false;
    loop {
        // build the tight system for this combination
        let mut a: Vec<Vec<f64>> = Vec::with_capacity(nv);
        let mut b: Vec<f64> = Vec::with_capacity(nv);
        for &cid in &combo {
            if cid < m {
                a.push(rows[cid].coeffs.clone());
                b.push(rows[cid].rhs);
            } else if cid < m + nv {
                let v = cid - m;
                let mut row = vec![0.0; nv];
                row[v] = 1.0;
                a.push(row);
                b.push(model.bounds()[v].0);
            } else {
                let v = cid - m - nv;
                let mut row = vec![0.0; nv];
                row[v] = 1.0;
                a.push(row);
                b.push(model.bounds()[v].1);
            }
        }
        if let Some(x) = solve_square(&mut a, &mut b) {
            if point_feasible(model, &x) {
                any_feasible = true;
                let obj: f64 = model.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
                best = Some(match (best, model.sense) {
                    (None, _) => obj,
                    (Some(b), Sense::Maximize) => b.max(obj),
                    (Some(b), Sense::Minimize) => b.min(obj),
                });
            }
        }
        // next combination of nv ids out of total
        let mut i = nv;
        loop {
            if i == 0 {
                return match (any_feasible, best) {
                    (true, Some(v)) => OracleOutcome::Optimal(v),
                    _ => OracleOutcome::Infeasible,
                };
            }
            i -= 1;
            if combo[i] != i + total - nv {
                combo[i] += 1;
                for j in (i + 1)..nv {
                    combo[j] = combo[j - 1] + 1;
                }
                break;
            }
        }
    }
}

pub fn point_feasible(model: &LpModel, x: &[f64]) -> bool {
    for (v, &(lo, hi)) in model.bounds().iter().enumerate() {
        if x[v] < lo - ORACLE_FEAS_TOL || x[v] > hi + ORACLE_FEAS_TOL {
            return false;
        }
    }
    for row in model.rows() {
        let lhs: f64 = row.coeffs.iter().zip(x).map(|(c, v)| c * v).sum();
        let bad = match row.relation {
            Relation::Le => lhs > row.rhs + ORACLE_FEAS_TOL,
            Relation::Ge => lhs < row.rhs - ORACLE_FEAS_TOL,
            Relation::Eq => (lhs - row.rhs).abs() > ORACLE_FEAS_TOL,
        };
        if bad {
            return false;
        }
    }
    true
}

/// Random LP on `[0,1]` boxes with up to `max_vars` variables and `max_rows`
/// rows; coefficients on a quarter-unit grid to keep the oracle stable.
pub fn random_lp(rng: &mut StdRng, max_vars: usize, max_rows: usize) -> LpModel {
    let nv = rng.gen_range(1..=max_vars);
    let sense = if rng.gen_bool(0.5) {
        Sense::Maximize
    } else {
        Sense::Minimize
    };
    let mut model = LpModel::new(nv, sense);
    for v in 0..nv {
        model.objective[v] = rng.gen_range(-12..=12) as f64 / 4.0;
    }
    let rows = rng.gen_range(0..=max_rows);
    for _ in 0..rows {
        let coeffs: Vec<f64> = (0..nv)
            .map(|_| rng.gen_range(-8..=8) as f64 / 4.0)
            .collect();
        let relation = match rng.gen_range(0..6) {
            0 => Relation::Eq,
            1 | 2 => Relation::Ge,
            _ => Relation::Le,
        };
        let rhs = rng.gen_range(-1.0..2.5);
        model.add_row(coeffs, relation, rhs).unwrap();
    }
    model
}

/// A random rooted tree inside a B-proper pruned graph: nodes are kept with
/// probability `keep`, restricted to those reachable from the root inside
/// the kept set. Returns `None` when the result is too small or cheap.
pub fn random_subtree(
    sub: &InducedSubgraph,
    rng: &mut StdRng,
    keep: f64,
    min_nodes: usize,
    min_cost: f64,
) -> Option<RootedTree> {
    let g = &sub.graph;
    let root = g.root();
    let mut chosen: BTreeSet<usize> = (0..g.node_count())
        .filter(|&v| v == root || rng.gen_bool(keep))
        .collect();
    // keep only what stays reachable inside the chosen set
    let mut reached: BTreeSet<usize> = [root].into_iter().collect();
    let mut frontier = vec![root];
    while let Some(u) = frontier.pop() {
        for &w in g.out_neighbors(u) {
            if chosen.contains(&w) && reached.insert(w) {
                frontier.push(w);
            }
        }
    }
    chosen = reached;
    if chosen.len() < min_nodes {
        return None;
    }
    let tree = build_arborescence(g, &chosen).ok()?;
    if tree.cost() < min_cost {
        return None;
    }
    Some(tree)
}

/// Prunes a fresh random directed/undirected graph to be B-proper and
/// retries seeds until the pruned graph has at least `min_nodes` nodes.
pub fn b_proper_graph(
    rng: &mut StdRng,
    n: usize,
    directed: bool,
    bound: f64,
    cost_range: (f64, f64),
    min_nodes: usize,
) -> InducedSubgraph {
    loop {
        let mut g = NodeWeightedGraph::new(n, directed);
        for v in 1..n {
            g.set_cost(v, round2(rng.gen_range(cost_range.0..=cost_range.1)))
                .unwrap();
            g.set_prize(v, round2(rng.gen_range(0.1..=5.0))).unwrap();
        }
        if directed {
            for u in 0..n {
                for v in 0..n {
                    if u != v && rng.gen_bool(0.45) {
                        g.add_arc(u, v).unwrap();
                    }
                }
            }
        } else {
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.gen_bool(0.45) {
                        g.add_arc(u, v).unwrap();
                    }
                }
            }
        }
        let sub = prune_to_b_proper(&g, bound).unwrap();
        if sub.graph.node_count() >= min_nodes {
            return sub;
        }
    }
}

pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

pub fn seeded(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}
