//! Builders that translate tree-problem instances into flow-based LP
//! relaxations over capacity variables `x_v` and per-commodity arc flows
//! `f^v_{wu}`, plus the tree embedding used for bound certificates and the
//! exhaustive submodular separation routine with its row-generation driver.
//!
//! The flow encoding is the polynomial arc form: for every commodity
//! `v != r`, inflow into `v` equals `x_v`, flow out of any `w != v` is capped
//! by the capacity of `w` (times the node count for submodular models), and
//! flow is conserved at intermediate nodes. Commodity `v` only gets flow
//! variables on arcs that lie on some root-to-`v` walk, which cuts the
//! variable count sharply without changing feasibility.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{NodeWeightedGraph, RootedTree};
use crate::prize::PrizeOracle;
use crate::simplex::{solve_lp, LpModel, LpSolution, LpStatus, Relation, Sense, FEAS_TOL, OPT_TOL};
use crate::{Error, Result};

/// Capacities below this are treated as zero when reading LP solutions.
pub const SUPPORT_TOL: f64 = 1e-9;
/// Most nodes an exhaustive separation call will scan over.
pub const DEFAULT_SUPPORT_CAP: usize = 20;
/// Hard cap on separation/re-solve rounds.
pub const MAX_SEPARATION_ROUNDS: usize = 200;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ProblemKind {
    Dst,
    Budget,
    Quota,
    SubmodularBudget,
    SubmodularQuota,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BuildObjective {
    MaxPrize,
    MinCost,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum VarKind {
    Capacity {
        node: usize,
    },
    Flow {
        commodity: usize,
        from: usize,
        to: usize,
    },
}

/// Column layout of a relaxation: capacities first (column `v` is `x_v`),
/// then flow variables in (commodity, arc) order.
#[derive(Clone, Debug)]
pub struct VariableIndex {
    num_nodes: usize,
    flow: BTreeMap<(usize, usize, usize), usize>,
    flow_cols: Vec<(usize, usize, usize)>,
}

impl VariableIndex {
    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn columns(&self) -> usize {
        self.num_nodes + self.flow_cols.len()
    }

    pub fn capacity(&self, v: usize) -> usize {
        v
    }

    pub fn flow(&self, commodity: usize, from: usize, to: usize) -> Option<usize> {
        self.flow.get(&(commodity, from, to)).copied()
    }

    pub fn kind(&self, col: usize) -> VarKind {
        if col < self.num_nodes {
            VarKind::Capacity { node: col }
        } else {
            let (v, w, u) = self.flow_cols[col - self.num_nodes];
            VarKind::Flow {
                commodity: v,
                from: w,
                to: u,
            }
        }
    }
}

/// A concrete LP relaxation: the model, its column layout, and the instance
/// parameters it encodes.
#[derive(Clone, Debug)]
pub struct RelaxationBundle {
    pub model: LpModel,
    pub index: VariableIndex,
    pub kind: ProblemKind,
    pub budget: Option<f64>,
    pub quota: Option<f64>,
    /// `p_v` coefficients used in the prize rows (singleton prizes for
    /// submodular kinds, node prizes otherwise).
    pub node_prizes: Vec<f64>,
    /// Submodular constraint sets, in the order their rows were appended.
    pub cuts: Vec<BTreeSet<usize>>,
}

impl RelaxationBundle {
    /// The capacity part of a solution, snapped to `[0, 1]`.
    pub fn capacities(&self, solution: &LpSolution) -> Vec<f64> {
        let n = self.index.num_nodes;
        let mut x = solution.values[..n].to_vec();
        for v in x.iter_mut() {
            if *v < SUPPORT_TOL {
                *v = 0.0;
            }
            if *v > 1.0 - SUPPORT_TOL {
                *v = 1.0;
            }
        }
        x
    }

    /// Appends one submodular row `Σ_{v∈S} x_v p_v <= p(S)`.
    pub fn add_submodular_cut(
        &mut self,
        set: &BTreeSet<usize>,
        oracle: &PrizeOracle,
    ) -> Result<()> {
        let mut coeffs = vec![0.0; self.model.num_vars()];
        for &v in set {
            if v >= self.index.num_nodes {
                return Err(Error::InvalidInput(format!("cut node {v} out of range")));
            }
            coeffs[self.index.capacity(v)] = self.node_prizes[v];
        }
        self.model.add_row(coeffs, Relation::Le, oracle.eval(set))?;
        self.cuts.push(set.clone());
        Ok(())
    }
}

/// Arcs usable by commodity `v`: `(w, u)` with `w` reachable from the root,
/// `u` able to reach `v`, never leaving `v` or entering the root.
fn commodity_arcs(
    graph: &NodeWeightedGraph,
    reach_from_root: &BTreeSet<usize>,
    v: usize,
) -> Vec<(usize, usize)> {
    let back = graph.reachable_to(v);
    graph
        .arcs()
        .filter(|&(w, u)| {
            w != v && u != graph.root() && reach_from_root.contains(&w) && back.contains(&u)
        })
        .collect()
}

struct FlowSkeleton {
    index: VariableIndex,
    arcs_per_commodity: BTreeMap<usize, Vec<(usize, usize)>>,
}

fn build_flow_skeleton(graph: &NodeWeightedGraph) -> FlowSkeleton {
    let n = graph.node_count();
    let root = graph.root();
    let reach = graph.reachable_from(root);
    let mut flow = BTreeMap::new();
    let mut flow_cols = Vec::new();
    let mut arcs_per_commodity = BTreeMap::new();
    for v in 0..n {
        if v == root {
            continue;
        }
        let arcs = if reach.contains(&v) {
            commodity_arcs(graph, &reach, v)
        } else {
            Vec::new()
        };
        for &(w, u) in &arcs {
            let col = n + flow_cols.len();
            flow.insert((v, w, u), col);
            flow_cols.push((v, w, u));
        }
        arcs_per_commodity.insert(v, arcs);
    }
    FlowSkeleton {
        index: VariableIndex {
            num_nodes: n,
            flow,
            flow_cols,
        },
        arcs_per_commodity,
    }
}

/// Adds the three flow row families for every commodity. `capacity_coef` is 1
/// for the directed additive relaxations and `n` for the submodular ones.
fn add_flow_rows(
    model: &mut LpModel,
    graph: &NodeWeightedGraph,
    skel: &FlowSkeleton,
    capacity_coef: f64,
) -> Result<()> {
    let n = graph.node_count();
    let root = graph.root();
    let cols = skel.index.columns();
    for (&v, arcs) in &skel.arcs_per_commodity {
        // inflow into v equals x_v
        let mut row = vec![0.0; cols];
        row[skel.index.capacity(v)] = -1.0;
        for &(w, u) in arcs {
            if u == v {
                row[skel.index.flow(v, w, u).unwrap()] += 1.0;
            }
        }
        model.add_row(row, Relation::Eq, 0.0)?;
        // outflow of w capped by (coef * x_w), for every w != v
        for w in 0..n {
            if w == v {
                continue;
            }
            let mut row = vec![0.0; cols];
            let mut any = false;
            for &(a, b) in arcs {
                if a == w {
                    row[skel.index.flow(v, a, b).unwrap()] += 1.0;
                    any = true;
                }
            }
            if !any {
                continue;
            }
            row[skel.index.capacity(w)] = -capacity_coef;
            model.add_row(row, Relation::Le, 0.0)?;
        }
        // conservation at intermediate nodes
        for w in 0..n {
            if w == v || w == root {
                continue;
            }
            let mut row = vec![0.0; cols];
            let mut any = false;
            for &(a, b) in arcs {
                if a == w {
                    row[skel.index.flow(v, a, b).unwrap()] += 1.0;
                    any = true;
                }
                if b == w {
                    row[skel.index.flow(v, a, b).unwrap()] -= 1.0;
                    any = true;
                }
            }
            if any {
                model.add_row(row, Relation::Eq, 0.0)?;
            }
        }
    }
    Ok(())
}

fn budget_row(graph: &NodeWeightedGraph, cols: usize, bound: f64) -> (Vec<f64>, Relation, f64) {
    let mut row = vec![0.0; cols];
    for v in 0..graph.node_count() {
        row[v] = graph.cost(v);
    }
    (row, Relation::Le, bound)
}

fn quota_row(prizes: &[f64], cols: usize, quota: f64) -> (Vec<f64>, Relation, f64) {
    let mut row = vec![0.0; cols];
    row[..prizes.len()].copy_from_slice(prizes);
    (row, Relation::Ge, quota)
}

/// The directed additive relaxation. `MaxPrize` requires a budget (the
/// budget LP), `MinCost` requires a quota (the quota LP); passing both adds
/// both rows and zeroes the objective, producing the pure feasibility system.
pub fn build_const_drat(
    graph: &NodeWeightedGraph,
    budget: Option<f64>,
    quota: Option<f64>,
    objective: BuildObjective,
) -> Result<RelaxationBundle> {
    if !graph.is_directed() {
        return Err(Error::InvalidInput(
            "additive relaxation expects a directed graph".into(),
        ));
    }
    match objective {
        BuildObjective::MaxPrize if budget.is_none() => {
            return Err(Error::InvalidInput(
                "max-prize relaxation needs a budget".into(),
            ))
        }
        BuildObjective::MinCost if quota.is_none() => {
            return Err(Error::InvalidInput(
                "min-cost relaxation needs a quota".into(),
            ))
        }
        _ => {}
    }
    let skel = build_flow_skeleton(graph);
    let cols = skel.index.columns();
    let feasibility_mode = budget.is_some() && quota.is_some();
    let sense = match objective {
        BuildObjective::MaxPrize => Sense::Maximize,
        BuildObjective::MinCost => Sense::Minimize,
    };
    let mut model = LpModel::new(cols, sense);
    if !feasibility_mode {
        for v in 0..graph.node_count() {
            model.objective[v] = match objective {
                BuildObjective::MaxPrize => graph.prize(v),
                BuildObjective::MinCost => graph.cost(v),
            };
        }
    }
    if let Some(b) = budget {
        let (row, rel, rhs) = budget_row(graph, cols, b);
        model.add_row(row, rel, rhs)?;
    }
    if let Some(q) = quota {
        let (row, rel, rhs) = quota_row(graph.prizes(), cols, q);
        model.add_row(row, rel, rhs)?;
    }
    add_flow_rows(&mut model, graph, &skel, 1.0)?;
    let kind = if quota.is_some() && budget.is_none() {
        ProblemKind::Quota
    } else {
        ProblemKind::Budget
    };
    Ok(RelaxationBundle {
        model,
        index: skel.index,
        kind,
        budget,
        quota,
        node_prizes: graph.prizes().to_vec(),
        cuts: Vec::new(),
    })
}

/// The Steiner-tree relaxation: minimize `Σ x_v c_v` with every terminal's
/// capacity fixed at one, so each terminal must receive a full unit of flow.
pub fn build_lp_dst(
    graph: &NodeWeightedGraph,
    terminals: &BTreeSet<usize>,
) -> Result<RelaxationBundle> {
    if !graph.is_directed() {
        return Err(Error::InvalidInput(
            "steiner relaxation expects a directed graph".into(),
        ));
    }
    let reach = graph.reachable_from(graph.root());
    for &t in terminals {
        graph.check_node(t)?;
        if !reach.contains(&t) {
            return Err(Error::Infeasible(format!(
                "terminal {t} is unreachable from the root"
            )));
        }
    }
    let skel = build_flow_skeleton(graph);
    let cols = skel.index.columns();
    let mut model = LpModel::new(cols, Sense::Minimize);
    for v in 0..graph.node_count() {
        model.objective[v] = graph.cost(v);
    }
    for &t in terminals {
        model.set_bound(skel.index.capacity(t), 1.0, 1.0)?;
    }
    add_flow_rows(&mut model, graph, &skel, 1.0)?;
    Ok(RelaxationBundle {
        model,
        index: skel.index,
        kind: ProblemKind::Dst,
        budget: None,
        quota: None,
        node_prizes: graph.prizes().to_vec(),
        cuts: Vec::new(),
    })
}

/// The undirected submodular relaxation. The graph must be undirected (its
/// stored bidirection is the arc set the commodities flow on); outflow caps
/// carry coefficient `n` on `x_w`, and one prize row per set in `cuts` keeps
/// the capacity-weighted singleton prizes below the oracle value.
pub fn build_const_urst(
    graph: &NodeWeightedGraph,
    oracle: &PrizeOracle,
    budget: Option<f64>,
    quota: Option<f64>,
    objective: BuildObjective,
    cuts: &[BTreeSet<usize>],
) -> Result<RelaxationBundle> {
    if graph.is_directed() {
        return Err(Error::InvalidInput(
            "submodular relaxation expects an undirected graph".into(),
        ));
    }
    match objective {
        BuildObjective::MaxPrize if budget.is_none() => {
            return Err(Error::InvalidInput(
                "max-prize relaxation needs a budget".into(),
            ))
        }
        BuildObjective::MinCost if quota.is_none() => {
            return Err(Error::InvalidInput(
                "min-cost relaxation needs a quota".into(),
            ))
        }
        _ => {}
    }
    oracle.spot_check(200, 0x5eed)?;
    let prizes = oracle.singletons();
    let skel = build_flow_skeleton(graph);
    let cols = skel.index.columns();
    let feasibility_mode = budget.is_some() && quota.is_some();
    let sense = match objective {
        BuildObjective::MaxPrize => Sense::Maximize,
        BuildObjective::MinCost => Sense::Minimize,
    };
    let mut model = LpModel::new(cols, sense);
    if !feasibility_mode {
        for v in 0..graph.node_count() {
            model.objective[v] = match objective {
                BuildObjective::MaxPrize => prizes[v],
                BuildObjective::MinCost => graph.cost(v),
            };
        }
    }
    if let Some(b) = budget {
        let (row, rel, rhs) = budget_row(graph, cols, b);
        model.add_row(row, rel, rhs)?;
    }
    if let Some(q) = quota {
        let (row, rel, rhs) = quota_row(&prizes, cols, q);
        model.add_row(row, rel, rhs)?;
    }
    add_flow_rows(&mut model, graph, &skel, graph.node_count() as f64)?;
    let kind = if quota.is_some() && budget.is_none() {
        ProblemKind::SubmodularQuota
    } else {
        ProblemKind::SubmodularBudget
    };
    let mut bundle = RelaxationBundle {
        model,
        index: skel.index,
        kind,
        budget,
        quota,
        node_prizes: prizes,
        cuts: Vec::new(),
    };
    for set in cuts {
        bundle.add_submodular_cut(set, oracle)?;
    }
    Ok(bundle)
}

/// Embeds a tree as an integral assignment: `x_v = 1` on members and a unit
/// of commodity-`v` flow along the tree path from the root to each member.
/// Satisfies every flow row exactly; the budget/quota rows hold iff the
/// tree's cost/prize do.
pub fn embed_tree_as_lp_solution(tree: &RootedTree, bundle: &RelaxationBundle) -> Result<Vec<f64>> {
    let mut values = vec![0.0; bundle.model.num_vars()];
    for &v in tree.members() {
        values[bundle.index.capacity(v)] = 1.0;
    }
    for &v in tree.members() {
        if v == tree.root() {
            continue;
        }
        let mut child = v;
        while let Some(parent) = tree.parent_of(child) {
            let col = bundle.index.flow(v, parent, child).ok_or_else(|| {
                Error::ContractViolation(format!(
                    "no flow variable for commodity {v} on tree arc ({parent}, {child})"
                ))
            })?;
            values[col] = 1.0;
            child = parent;
        }
    }
    Ok(values)
}

/// Exhaustively searches subsets of the support of `x` for the most violated
/// submodular constraint. Sets containing zero-capacity nodes can only be
/// less violated, so the support search is complete. Returns the set and its
/// violation when the maximum exceeds the feasibility tolerance.
pub fn separate_submodular(
    x: &[f64],
    oracle: &PrizeOracle,
    support_cap: usize,
) -> Result<Option<(BTreeSet<usize>, f64)>> {
    let support: Vec<usize> = (0..x.len()).filter(|&v| x[v] > SUPPORT_TOL).collect();
    if support.len() > support_cap {
        return Err(Error::SizeLimit(format!(
            "separation support {} exceeds cap {support_cap}; raise the cap or shrink the instance",
            support.len()
        )));
    }
    let prizes: Vec<f64> = support.iter().map(|&v| oracle.singleton(v)).collect();
    let k = support.len();
    let mut best: Option<(BTreeSet<usize>, f64)> = None;
    for mask in 1usize..(1 << k) {
        let set: BTreeSet<usize> = (0..k)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| support[i])
            .collect();
        let lhs: f64 = (0..k)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| x[support[i]] * prizes[i])
            .sum();
        let violation = lhs - oracle.eval(&set);
        if violation > FEAS_TOL {
            match &best {
                Some((_, b)) if *b >= violation => {}
                _ => best = Some((set, violation)),
            }
        }
    }
    Ok(best)
}

/// One solved submodular relaxation after row generation converged.
#[derive(Debug)]
pub struct RowGenerationOutcome {
    pub bundle: RelaxationBundle,
    pub solution: LpSolution,
    pub rounds: usize,
}

/// Solve-separate-cut loop for the submodular relaxation. Starts from all
/// singleton rows, adds the support set of the first solve, then iterates
/// separation until no violated set remains (or the round cap trips).
pub fn solve_const_urst(
    graph: &NodeWeightedGraph,
    oracle: &PrizeOracle,
    budget: Option<f64>,
    quota: Option<f64>,
    objective: BuildObjective,
) -> Result<RowGenerationOutcome> {
    let singletons: Vec<BTreeSet<usize>> = (0..graph.node_count())
        .map(|v| [v].into_iter().collect())
        .collect();
    let mut bundle = build_const_urst(graph, oracle, budget, quota, objective, &singletons)?;
    let mut solution = solve_lp(&bundle.model)?;
    let mut rounds = 1usize;
    if solution.status != LpStatus::Optimal {
        return Ok(RowGenerationOutcome {
            bundle,
            solution,
            rounds,
        });
    }
    // seed the working set with the support of the first relaxed solve
    let x = bundle.capacities(&solution);
    let support: BTreeSet<usize> = (0..x.len()).filter(|&v| x[v] > SUPPORT_TOL).collect();
    if !support.is_empty() && !bundle.cuts.contains(&support) {
        bundle.add_submodular_cut(&support, oracle)?;
        solution = solve_lp(&bundle.model)?;
        rounds += 1;
    }
    loop {
        if solution.status != LpStatus::Optimal {
            return Ok(RowGenerationOutcome {
                bundle,
                solution,
                rounds,
            });
        }
        if rounds > MAX_SEPARATION_ROUNDS {
            return Err(Error::NumericalFailure(format!(
                "separation did not converge within {MAX_SEPARATION_ROUNDS} rounds"
            )));
        }
        let x = bundle.capacities(&solution);
        match separate_submodular(&x, oracle, DEFAULT_SUPPORT_CAP)? {
            None => {
                return Ok(RowGenerationOutcome {
                    bundle,
                    solution,
                    rounds,
                })
            }
            Some((set, violation)) => {
                if bundle.cuts.contains(&set) {
                    if violation > 10.0 * FEAS_TOL {
                        return Err(Error::NumericalFailure(format!(
                            "enforced cut still violated by {violation:.3e}"
                        )));
                    }
                    return Ok(RowGenerationOutcome {
                        bundle,
                        solution,
                        rounds,
                    });
                }
                bundle.add_submodular_cut(&set, oracle)?;
                solution = solve_lp(&bundle.model)?;
                rounds += 1;
            }
        }
    }
}

/// Checks an assignment against every row of the bundle's model.
pub fn assignment_feasible(bundle: &RelaxationBundle, values: &[f64]) -> bool {
    bundle.model.row_violations(values, OPT_TOL).is_empty()
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
    fn budget_lp_buys_the_profitable_node() {
        let g = digraph(&[0.0, 1.0], &[0.0, 5.0], &[(0, 1)]);
        let bundle = build_const_drat(&g, Some(1.0), None, BuildObjective::MaxPrize).unwrap();
        let sol = solve_lp(&bundle.model).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective_value - 5.0).abs() < 1e-6);
        let x = bundle.capacities(&sol);
        assert!((x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn budget_lp_goes_fractional_under_a_tight_budget() {
        let g = digraph(&[0.0, 1.0], &[0.0, 5.0], &[(0, 1)]);
        let bundle = build_const_drat(&g, Some(0.5), None, BuildObjective::MaxPrize).unwrap();
        let sol = solve_lp(&bundle.model).unwrap();
        assert!((sol.objective_value - 2.5).abs() < 1e-6);
        let x = bundle.capacities(&sol);
        assert!((x[1] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn zero_quota_costs_nothing() {
        let g = digraph(&[0.0, 3.0], &[0.0, 1.0], &[(0, 1)]);
        let bundle = build_const_drat(&g, None, Some(0.0), BuildObjective::MinCost).unwrap();
        let sol = solve_lp(&bundle.model).unwrap();
        assert!(sol.objective_value.abs() < 1e-7);
    }

    #[test]
    fn dst_lp_forced_single_path() {
        let g = digraph(&[0.0, 1.0], &[0.0, 0.0], &[(0, 1)]);
        let bundle = build_lp_dst(&g, &[1].into_iter().collect()).unwrap();
        let sol = solve_lp(&bundle.model).unwrap();
        assert!((sol.objective_value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn dst_lp_picks_the_cheap_branch() {
        // r -> a(1) -> t(0), r -> b(3) -> t(0)
        let g = digraph(
            &[0.0, 1.0, 3.0, 0.0],
            &[0.0; 4],
            &[(0, 1), (0, 2), (1, 3), (2, 3)],
        );
        let bundle = build_lp_dst(&g, &[3].into_iter().collect()).unwrap();
        let sol = solve_lp(&bundle.model).unwrap();
        assert!((sol.objective_value - 1.0).abs() < 1e-6);
        let x = bundle.capacities(&sol);
        assert!((x[1] - 1.0).abs() < 1e-6);
        assert!(x[2].abs() < 1e-6);
    }

    #[test]
    fn dst_lp_may_split_flow_between_equal_routes() {
        let g = digraph(
            &[0.0, 1.0, 1.0, 0.0],
            &[0.0; 4],
            &[(0, 1), (0, 2), (1, 3), (2, 3)],
        );
        let bundle = build_lp_dst(&g, &[3].into_iter().collect()).unwrap();
        let sol = solve_lp(&bundle.model).unwrap();
        assert!((sol.objective_value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn dst_unreachable_terminal_reported_before_solving() {
        let g = digraph(&[0.0, 1.0, 1.0], &[0.0; 3], &[(0, 1)]);
        assert!(matches!(
            build_lp_dst(&g, &[2].into_iter().collect()),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn tree_embedding_is_flow_feasible() {
        let g = digraph(
            &[0.0, 1.0, 2.0, 0.5],
            &[0.0, 1.0, 1.0, 4.0],
            &[(0, 1), (1, 2), (1, 3), (0, 3)],
        );
        let bundle = build_const_drat(&g, Some(10.0), None, BuildObjective::MaxPrize).unwrap();
        let tree = build_arborescence(&g, &[0, 1, 2].into_iter().collect()).unwrap();
        let values = embed_tree_as_lp_solution(&tree, &bundle).unwrap();
        assert!(assignment_feasible(&bundle, &values));
    }

    #[test]
    fn embedding_violates_only_an_undersized_budget() {
        let g = digraph(&[0.0, 2.0], &[0.0, 1.0], &[(0, 1)]);
        let tree = build_arborescence(&g, &[0, 1].into_iter().collect()).unwrap();
        let tight = build_const_drat(&g, Some(1.0), None, BuildObjective::MaxPrize).unwrap();
        let values = embed_tree_as_lp_solution(&tree, &tight).unwrap();
        let bad = tight.model.row_violations(&values, OPT_TOL);
        assert_eq!(bad.len(), 1); // exactly the budget row
        assert_eq!(bad[0].0, 0);
    }

    #[test]
    fn additive_separation_finds_nothing() {
        let oracle = PrizeOracle::additive(vec![1.0, 2.0, 3.0]);
        let x = vec![1.0, 0.5, 1.0];
        assert!(separate_submodular(&x, &oracle, 20).unwrap().is_none());
    }

    #[test]
    fn coverage_separation_finds_the_overlap() {
        let covers = vec![[0].into_iter().collect(), [0].into_iter().collect()];
        let oracle = PrizeOracle::coverage(covers, BTreeMap::new());
        let x = vec![1.0, 1.0];
        let (set, violation) = separate_submodular(&x, &oracle, 20).unwrap().unwrap();
        assert_eq!(set, [0, 1].into_iter().collect());
        assert!((violation - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_vector_separates_to_nothing() {
        let oracle = PrizeOracle::additive(vec![1.0, 1.0]);
        assert!(separate_submodular(&[0.0, 0.0], &oracle, 20)
            .unwrap()
            .is_none());
    }

    #[test]
    fn row_generation_terminates_and_is_submodular_feasible() {
        let mut g = NodeWeightedGraph::new(4, false);
        for v in 0..4 {
            g.set_cost(v, if v == 0 { 0.0 } else { 1.0 }).unwrap();
        }
        g.add_arc(0, 1).unwrap();
        g.add_arc(1, 2).unwrap();
        g.add_arc(0, 3).unwrap();
        // nodes 1 and 2 cover the same element; 3 covers another
        let covers = vec![
            BTreeSet::new(),
            [0].into_iter().collect(),
            [0].into_iter().collect(),
            [1].into_iter().collect(),
        ];
        let oracle = PrizeOracle::coverage(covers, BTreeMap::new());
        let out = solve_const_urst(&g, &oracle, Some(3.0), None, BuildObjective::MaxPrize).unwrap();
        assert_eq!(out.solution.status, LpStatus::Optimal);
        let x = out.bundle.capacities(&out.solution);
        assert!(separate_submodular(&x, &oracle, 20).unwrap().is_none());
        // everything fits in the budget, so the LP collects both elements
        assert!((out.solution.objective_value - 2.0).abs() < 1e-5);
    }
}
