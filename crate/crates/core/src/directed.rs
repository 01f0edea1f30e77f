//! Directed pipelines: Steiner-tree rounding, budgeted and quota solvers for
//! additive prizes, cost-window trimming, the cost-guessing loop, and the
//! quota-via-budget reduction.
//!
//! All pipelines follow the same shape: prune the graph to the working cost
//! bound, solve a flow relaxation, split the fractional support into
//! high/low-capacity tiers, and buy either the high tier (spanned through
//! relay nodes plus a small hitting set of gateways) or a prize-dense group
//! of the low tier via shortest paths. Over-budget trees are cut back to the
//! `[εB/2, (1+ε)B]` window by bundle search.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use crate::flow::{build_const_drat, build_lp_dst, BuildObjective};
use crate::graph::{
    build_arborescence, node_weighted_shortest_paths, prune_to_b_proper, NodeWeightedGraph,
    RootedTree,
};
use crate::hitting::{greedy_hitting_set, SetFamily};
use crate::simplex::{solve_lp, LpStatus};
use crate::{Error, Result};

/// Fractional support split at two capacity thresholds. `high`/`low` split at
/// `theta1`; `relay` (traversable for free in the rounding) and `gateway`
/// (candidate hitting-set elements) split at `theta2`.
#[derive(Debug, Clone)]
pub struct SupportPartition {
    pub x: Vec<f64>,
    pub support: BTreeSet<usize>,
    pub high: BTreeSet<usize>,
    pub low: BTreeSet<usize>,
    pub relay: BTreeSet<usize>,
    pub gateway: BTreeSet<usize>,
    pub theta1: f64,
    pub theta2: f64,
}

/// Threshold partition of the support of `x`. Comparisons use `>=` on the raw
/// values; callers snap LP noise first.
pub fn partition_support(x: &[f64], theta1: f64, theta2: f64) -> SupportPartition {
    let mut part = SupportPartition {
        x: x.to_vec(),
        support: BTreeSet::new(),
        high: BTreeSet::new(),
        low: BTreeSet::new(),
        relay: BTreeSet::new(),
        gateway: BTreeSet::new(),
        theta1,
        theta2,
    };
    for (v, &xv) in x.iter().enumerate() {
        if xv <= 0.0 {
            continue;
        }
        part.support.insert(v);
        if xv >= theta1 {
            part.high.insert(v);
        } else {
            part.low.insert(v);
        }
        if xv >= theta2 {
            part.relay.insert(v);
        } else {
            part.gateway.insert(v);
        }
    }
    part
}

/// How a set of targets gets covered: targets reachable through relay nodes
/// alone are `cheap`; the rest are `expensive` and are reached from a small
/// hitting set of gateway nodes.
#[derive(Debug, Clone)]
pub struct CoverPlan {
    pub cheap: BTreeSet<usize>,
    pub expensive: BTreeSet<usize>,
    /// per expensive target, the gateways from which it is reachable through
    /// relays only
    pub gateway_sets: BTreeMap<usize, BTreeSet<usize>>,
    pub hitters: BTreeSet<usize>,
    /// per expensive target, the chosen hitter
    pub attachments: BTreeMap<usize, usize>,
}

/// Classifies `targets` against the partition and plans the expensive-side
/// cover: gateway sets, a greedy hitting set over them, and per-target
/// attachments minimizing the gateway-to-target distance.
///
/// An expensive target with an empty gateway set means the capacities cannot
/// be flow-feasible; that is surfaced, not patched. The flow-counting lower
/// bound `|X_v| >= x_v / theta2` is checked on every gateway set.
pub fn expensive_cover(
    graph: &NodeWeightedGraph,
    part: &SupportPartition,
    targets: &BTreeSet<usize>,
) -> Result<CoverPlan> {
    let root = graph.root();
    let mut relay_r = part.relay.clone();
    relay_r.insert(root);
    let dm_relay = node_weighted_shortest_paths(graph, root, Some(&relay_r))?;
    let mut plan = CoverPlan {
        cheap: BTreeSet::new(),
        expensive: BTreeSet::new(),
        gateway_sets: BTreeMap::new(),
        hitters: BTreeSet::new(),
        attachments: BTreeMap::new(),
    };
    for &t in targets {
        graph.check_node(t)?;
        if dm_relay.reachable(t) {
            plan.cheap.insert(t);
        } else {
            plan.expensive.insert(t);
            plan.gateway_sets.insert(t, BTreeSet::new());
        }
    }
    if plan.expensive.is_empty() {
        return Ok(plan);
    }
    // distance from each gateway to each expensive target through relays
    let mut gate_dist: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for &w in &part.gateway {
        let mut allow = part.relay.clone();
        allow.insert(w);
        let dm = node_weighted_shortest_paths(graph, w, Some(&allow))?;
        for &v in &plan.expensive {
            if dm.reachable(v) {
                plan.gateway_sets.get_mut(&v).unwrap().insert(w);
                gate_dist.insert((w, v), dm.dist[v]);
            }
        }
    }
    for (&v, set) in &plan.gateway_sets {
        if set.is_empty() {
            return Err(Error::ContractViolation(format!(
                "no gateway reaches target {v}; the capacity vector cannot be flow-feasible"
            )));
        }
        let needed = part.x[v] / part.theta2;
        if (set.len() as f64) + 1e-6 < needed {
            return Err(Error::ContractViolation(format!(
                "gateway set of target {v} has {} elements, flow counting requires {needed:.3}",
                set.len()
            )));
        }
    }
    let family = SetFamily::new(
        plan.expensive
            .iter()
            .map(|v| plan.gateway_sets[v].clone())
            .collect(),
    )?;
    plan.hitters = greedy_hitting_set(&family);
    for &v in &plan.expensive {
        let w = plan.gateway_sets[&v]
            .iter()
            .filter(|w| plan.hitters.contains(w))
            .min_by(|a, b| {
                gate_dist[&(**a, v)]
                    .partial_cmp(&gate_dist[&(**b, v)])
                    .unwrap()
                    .then(a.cmp(b))
            })
            .copied()
            .ok_or_else(|| {
                Error::ContractViolation(format!("hitting set misses the gateway set of {v}"))
            })?;
        plan.attachments.insert(v, w);
    }
    Ok(plan)
}

/// Node set realizing the cover plan: shortest relay paths to cheap targets,
/// shortest root-to-hitter paths, and relay paths from each attachment to its
/// expensive target.
pub struct SpanOutcome {
    pub nodes: BTreeSet<usize>,
    pub plan: CoverPlan,
}

pub fn span_targets(
    graph: &NodeWeightedGraph,
    part: &SupportPartition,
    targets: &BTreeSet<usize>,
) -> Result<SpanOutcome> {
    let root = graph.root();
    let plan = expensive_cover(graph, part, targets)?;
    let mut nodes = BTreeSet::new();
    nodes.insert(root);
    let mut relay_r = part.relay.clone();
    relay_r.insert(root);
    let dm_relay = node_weighted_shortest_paths(graph, root, Some(&relay_r))?;
    for &t in &plan.cheap {
        nodes.extend(
            dm_relay
                .path_to(t)
                .expect("cheap targets are relay-reachable"),
        );
    }
    if !plan.expensive.is_empty() {
        let dm_full = node_weighted_shortest_paths(graph, root, None)?;
        for &w in &plan.hitters {
            let path = dm_full.path_to(w).ok_or(Error::Connectivity { node: w })?;
            nodes.extend(path);
        }
        for (&v, &w) in &plan.attachments {
            let mut allow = part.relay.clone();
            allow.insert(w);
            let dm = node_weighted_shortest_paths(graph, w, Some(&allow))?;
            nodes.extend(dm.path_to(v).expect("attachment was chosen reachable"));
        }
    }
    Ok(SpanOutcome { nodes, plan })
}

/// Which route produced a tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveBranch {
    /// spanned the whole high-capacity tier
    HighCapacitySpan,
    /// bought the best prize group of the low tier via shortest paths
    GroupedLowCapacity,
    /// single best-prize node reached by one shortest path
    MaxSingletonPath,
}

impl std::fmt::Display for SolveBranch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SolveBranch::HighCapacitySpan => "high-capacity-span",
            SolveBranch::GroupedLowCapacity => "grouped-low-capacity",
            SolveBranch::MaxSingletonPath => "max-singleton-path",
        };
        f.write_str(s)
    }
}

/// Intermediate quantities of a rounding run, kept for diagnostics and for
/// checking cost bounds from the outside.
#[derive(Debug, Clone)]
pub struct GoodTreeTrace {
    pub branch: SolveBranch,
    /// node count of the graph the rounding ran on
    pub pruned_nodes: usize,
    /// max root distance in that graph
    pub max_distance: f64,
    pub hitter_count: usize,
    pub group_size: usize,
    pub high_mass: f64,
    pub low_mass: f64,
}

/// Algorithm output: the tree plus everything needed to audit it. Violation
/// ratios are computed from the tree and the instance on demand, never
/// stored.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub tree: RootedTree,
    /// oracle prize for submodular solves, additive prize otherwise
    pub prize: f64,
    pub lp_bound: Option<f64>,
    pub budget: Option<f64>,
    pub quota: Option<f64>,
    pub epsilon: f64,
    pub guesses_tried: usize,
    pub wallclock_ms: u64,
    pub trace: Option<GoodTreeTrace>,
    /// prize-to-cost ratio handed to the trimmer, when trimming ran
    pub trim_input_ratio: Option<f64>,
}

impl SolveReport {
    /// `c(T)/B` when over budget, `1.0` when within (or no budget).
    pub fn budget_violation(&self) -> f64 {
        match self.budget {
            Some(b) if self.tree.cost() > b && b > 0.0 => self.tree.cost() / b,
            _ => 1.0,
        }
    }

    /// `p(T)/Q`, `1.0` when the quota is trivial or absent.
    pub fn quota_fraction(&self) -> f64 {
        match self.quota {
            Some(q) if q > 0.0 => self.prize / q,
            _ => 1.0,
        }
    }
}

/// Geometric cost guesses `c_min·(1+ε)^i` up to the first value at or above
/// `c_max`.
pub fn guess_cost_schedule(c_min: f64, c_max: f64, epsilon: f64) -> Result<Vec<f64>> {
    if !(c_min > 0.0) {
        return Err(Error::InvalidInput(format!(
            "schedule needs c_min > 0, got {c_min}"
        )));
    }
    if c_max < c_min {
        return Err(Error::InvalidInput("schedule needs c_min <= c_max".into()));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput("schedule needs epsilon > 0".into()));
    }
    let mut out = vec![c_min];
    let cap = ((c_max / c_min).ln() / (1.0 + epsilon).ln()).ceil() as usize + 4;
    while *out.last().unwrap() < c_max {
        let next = out.last().unwrap() * (1.0 + epsilon);
        out.push(next);
        if out.len() > cap {
            return Err(Error::NumericalFailure(
                "cost schedule did not terminate".into(),
            ));
        }
    }
    Ok(out)
}

fn min_positive_cost(graph: &NodeWeightedGraph, among: &BTreeSet<usize>) -> Option<f64> {
    among
        .iter()
        .map(|&v| graph.cost(v))
        .filter(|&c| c > 0.0)
        .fold(None, |acc, c| Some(acc.map_or(c, |a: f64| a.min(c))))
}

fn max_root_distance(graph: &NodeWeightedGraph) -> Result<f64> {
    let dm = node_weighted_shortest_paths(graph, graph.root(), None)?;
    Ok(dm
        .dist
        .iter()
        .copied()
        .filter(|d| d.is_finite())
        .fold(0.0, f64::max))
}

fn ceil_snap(y: f64) -> usize {
    if (y - y.round()).abs() < 1e-9 {
        y.round() as usize
    } else {
        y.ceil() as usize
    }
}

/// Rounds a feasible fractional solution of the additive relaxation (budget
/// `bound`, quota `quota`, max root distance `f_max`) into a tree carrying at
/// least half the quota. The high tier is spanned outright when it holds half
/// the capacity-weighted prize; otherwise the low tier is chunked into groups
/// of `2·ceil(|low|^(2/3))` by descending capacity and the best-prize group
/// is bought via shortest paths.
pub fn good_tree_from_fraction(
    graph: &NodeWeightedGraph,
    x: &[f64],
    bound: f64,
    quota: f64,
    f_max: f64,
) -> Result<(RootedTree, GoodTreeTrace)> {
    let n = graph.node_count();
    if x.len() != n {
        return Err(Error::InvalidInput(
            "capacity vector length mismatch".into(),
        ));
    }
    let fuzz = 1e-6;
    for (v, &xv) in x.iter().enumerate() {
        if !(-fuzz..=1.0 + fuzz).contains(&xv) {
            return Err(Error::ContractViolation(format!(
                "capacity x[{v}] = {xv} out of [0,1]"
            )));
        }
    }
    let lp_cost: f64 = (0..n).map(|v| x[v] * graph.cost(v)).sum();
    let lp_prize: f64 = (0..n).map(|v| x[v] * graph.prize(v)).sum();
    if lp_cost > bound * (1.0 + fuzz) + fuzz {
        return Err(Error::ContractViolation(format!(
            "capacities cost {lp_cost}, above the bound {bound}"
        )));
    }
    if lp_prize < quota * (1.0 - fuzz) - fuzz {
        return Err(Error::ContractViolation(format!(
            "capacities carry prize {lp_prize}, below the quota {quota}"
        )));
    }
    let nf = n as f64;
    let theta1 = nf.powf(-1.0 / 3.0);
    let theta2 = nf.powf(-2.0 / 3.0);
    let part = partition_support(x, theta1, theta2);
    let high_mass: f64 = part.high.iter().map(|&v| x[v] * graph.prize(v)).sum();
    let low_mass: f64 = part.low.iter().map(|&v| x[v] * graph.prize(v)).sum();

    let (tree, branch, hitter_count, group_size) = if high_mass >= quota / 2.0 {
        let span = span_targets(graph, &part, &part.high)?;
        let tree = build_arborescence(graph, &span.nodes)?;
        (
            tree,
            SolveBranch::HighCapacitySpan,
            span.plan.hitters.len(),
            0,
        )
    } else {
        let mut order: Vec<usize> = part.low.iter().copied().collect();
        order.sort_by(|&a, &b| x[b].partial_cmp(&x[a]).unwrap().then(a.cmp(&b)));
        if order.is_empty() {
            return Err(Error::ContractViolation(
                "no low-tier support although the high tier misses half the quota".into(),
            ));
        }
        let group_size = 2 * ceil_snap((order.len() as f64).powf(2.0 / 3.0)).max(1);
        let best_group = order
            .chunks(group_size)
            .max_by(|a, b| {
                let pa: f64 = a.iter().map(|&v| graph.prize(v)).sum();
                let pb: f64 = b.iter().map(|&v| graph.prize(v)).sum();
                pa.partial_cmp(&pb).unwrap()
            })
            .unwrap();
        let dm = node_weighted_shortest_paths(graph, graph.root(), None)?;
        let mut nodes = BTreeSet::new();
        nodes.insert(graph.root());
        for &v in best_group {
            let path = dm.path_to(v).ok_or(Error::Connectivity { node: v })?;
            nodes.extend(path);
        }
        let tree = build_arborescence(graph, &nodes)?;
        (tree, SolveBranch::GroupedLowCapacity, 0, best_group.len())
    };
    if tree.prize_additive() < quota / 2.0 - 1e-7 * (1.0 + quota) {
        return Err(Error::ContractViolation(format!(
            "rounded tree carries prize {}, below half the quota {quota}",
            tree.prize_additive()
        )));
    }
    let trace = GoodTreeTrace {
        branch,
        pruned_nodes: n,
        max_distance: f_max,
        hitter_count,
        group_size,
        high_mass,
        low_mass,
    };
    Ok((tree, trace))
}

/// Cuts an over-budget tree down to cost in `[εB/2, (1+ε)B]` while keeping
/// the prize-to-cost ratio within `ε/4` of the input ratio `gamma`, provided
/// every node cost is at most `εB/2`. Candidates are, for every tree node
/// `u`, the root-to-`u` shortest path joined with `u` plus a prefix of `u`'s
/// child subtrees in decreasing ratio order; the best in-window ratio wins.
/// A sub-bound best ratio under the small-cost proviso aborts loudly rather
/// than degrading.
pub fn trim_additive(
    tree: &RootedTree,
    graph: &NodeWeightedGraph,
    bound: f64,
    epsilon: f64,
    gamma: f64,
) -> Result<RootedTree> {
    let lo = epsilon * bound / 2.0;
    let hi = (1.0 + epsilon) * bound;
    let slack = 1e-9 * (1.0 + bound);
    if tree.cost() < lo - slack {
        return Err(Error::ContractViolation(format!(
            "trimming needs tree cost >= {lo}, got {}",
            tree.cost()
        )));
    }
    if tree.cost() <= hi + slack {
        return Ok(tree.clone());
    }
    let root = graph.root();
    let dm = node_weighted_shortest_paths(graph, root, None)?;
    let children = tree.children_map();
    // subtree members, costs, and prizes per node
    fn collect(
        u: usize,
        graph: &NodeWeightedGraph,
        children: &BTreeMap<usize, Vec<usize>>,
        members: &mut BTreeMap<usize, Vec<usize>>,
        cost: &mut BTreeMap<usize, f64>,
        prize: &mut BTreeMap<usize, f64>,
    ) {
        let mut acc = vec![u];
        let mut c = graph.cost(u);
        let mut p = graph.prize(u);
        for &k in &children[&u] {
            collect(k, graph, children, members, cost, prize);
            acc.extend(members[&k].iter().copied());
            c += cost[&k];
            p += prize[&k];
        }
        members.insert(u, acc);
        cost.insert(u, c);
        prize.insert(u, p);
    }
    let mut sub_members = BTreeMap::new();
    let mut sub_cost = BTreeMap::new();
    let mut sub_prize = BTreeMap::new();
    collect(
        tree.root(),
        graph,
        &children,
        &mut sub_members,
        &mut sub_cost,
        &mut sub_prize,
    );
    let set_cost = |s: &BTreeSet<usize>| -> f64 { s.iter().map(|&v| graph.cost(v)).sum() };
    let set_prize = |s: &BTreeSet<usize>| -> f64 { s.iter().map(|&v| graph.prize(v)).sum() };

    let mut best: Option<(f64, BTreeSet<usize>)> = None;
    let consider = |set: &BTreeSet<usize>, best: &mut Option<(f64, BTreeSet<usize>)>| {
        let c = set_cost(set);
        if c < lo - slack || c > hi + slack {
            return;
        }
        let p = set_prize(set);
        let ratio = if c > 0.0 {
            p / c
        } else if p > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        match best {
            Some((br, _)) if *br >= ratio => {}
            _ => *best = Some((ratio, set.clone())),
        }
    };
    for &u in tree.members() {
        let Some(path) = dm.path_to(u) else {
            return Err(Error::Connectivity { node: u });
        };
        let path: BTreeSet<usize> = path.into_iter().collect();
        let mut kids: Vec<usize> = children[&u].clone();
        kids.sort_by(|&a, &b| {
            // ratio descending via cross-multiplication, ties by id
            (sub_prize[&b] * sub_cost[&a])
                .partial_cmp(&(sub_prize[&a] * sub_cost[&b]))
                .unwrap()
                .then(a.cmp(&b))
        });
        let mut bundle: BTreeSet<usize> = path.clone();
        bundle.insert(u);
        consider(&bundle, &mut best);
        for k in kids {
            bundle.extend(sub_members[&k].iter().copied());
            consider(&bundle, &mut best);
        }
    }
    let Some((best_ratio, nodes)) = best else {
        return Err(Error::ContractViolation(format!(
            "no trim candidate lands in the cost window [{lo}, {hi}]"
        )));
    };
    let max_node_cost = tree
        .members()
        .iter()
        .map(|&v| graph.cost(v))
        .fold(0.0, f64::max);
    let ratio_floor = epsilon * gamma / 4.0;
    if max_node_cost <= lo + slack && best_ratio < ratio_floor * (1.0 - 1e-6) {
        return Err(Error::ContractViolation(format!(
            "trimmed ratio {best_ratio} is below the guaranteed {ratio_floor} with small node costs"
        )));
    }
    build_arborescence(graph, &nodes)
}

/// Steiner tree: runs the cost-guessing loop, prunes to each guess, solves
/// the Steiner relaxation, and rounds its support; keeps the cheapest tree
/// across guesses. The returned tree always spans every terminal.
pub fn solve_dst(
    graph: &NodeWeightedGraph,
    terminals: &BTreeSet<usize>,
    epsilon: f64,
) -> Result<SolveReport> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput("epsilon must be > 0".into()));
    }
    let started = Instant::now();
    let root = graph.root();
    let reach = graph.reachable_from(root);
    for &t in terminals {
        graph.check_node(t)?;
        if !reach.contains(&t) {
            return Err(Error::Infeasible(format!(
                "terminal {t} is unreachable from the root"
            )));
        }
    }
    if terminals.iter().all(|&t| t == root) {
        let tree = RootedTree::singleton(graph, root)?;
        let prize = tree.prize_additive();
        return Ok(SolveReport {
            tree,
            prize,
            lp_bound: Some(0.0),
            budget: None,
            quota: None,
            epsilon,
            guesses_tried: 0,
            wallclock_ms: started.elapsed().as_millis() as u64,
            trace: None,
            trim_input_ratio: None,
        });
    }
    let c_max: f64 = reach.iter().map(|&v| graph.cost(v)).sum();
    let schedule = match min_positive_cost(graph, &reach) {
        None => vec![0.0],
        Some(c_min) => guess_cost_schedule(c_min, c_max, epsilon)?,
    };
    let mut best: Option<(f64, RootedTree)> = None;
    // valid lower bound on the optimum: the relaxation on the least pruned
    // graph; tighter prunes only raise the LP value
    let mut lp_bound = f64::INFINITY;
    let mut guesses_tried = 0usize;
    for &g in &schedule {
        guesses_tried += 1;
        if g < graph.cost(root) {
            continue;
        }
        let sub = prune_to_b_proper(graph, g)?;
        let sub_terms: Option<BTreeSet<usize>> =
            terminals.iter().map(|&t| sub.from_parent[t]).collect();
        let Some(sub_terms) = sub_terms else { continue }; // a terminal fell outside this guess
        let bundle = build_lp_dst(&sub.graph, &sub_terms)?;
        let sol = solve_lp(&bundle.model)?;
        if sol.status != LpStatus::Optimal {
            continue;
        }
        lp_bound = lp_bound.min(sol.objective_value);
        let x = bundle.capacities(&sol);
        let theta = (sub.graph.node_count() as f64).sqrt().recip();
        let part = partition_support(&x, theta, theta);
        let span = span_targets(&sub.graph, &part, &sub_terms)?;
        let tree = build_arborescence(&sub.graph, &span.nodes)?;
        for &t in &sub_terms {
            if !tree.contains(t) {
                return Err(Error::ContractViolation(format!(
                    "rounded steiner tree misses terminal {t}"
                )));
            }
        }
        let orig = tree.translate(graph, &sub.to_parent)?;
        match &best {
            Some((c, _)) if *c <= orig.cost() => {}
            _ => best = Some((orig.cost(), orig)),
        }
    }
    let Some((_, tree)) = best else {
        return Err(Error::Infeasible(
            "no cost guess yielded a steiner tree".into(),
        ));
    };
    let lp_obj = lp_bound;
    let prize = tree.prize_additive();
    Ok(SolveReport {
        tree,
        prize,
        lp_bound: Some(lp_obj),
        budget: None,
        quota: None,
        epsilon,
        guesses_tried,
        wallclock_ms: started.elapsed().as_millis() as u64,
        trace: None,
        trim_input_ratio: None,
    })
}

/// Budgeted additive solver: prune to the budget, maximize the fractional
/// prize, round with the budget LP's objective as the quota target, and trim
/// if the rounded tree overshoots. The result always costs at most
/// `(1+ε)·B`.
pub fn solve_bdrat(graph: &NodeWeightedGraph, budget: f64, epsilon: f64) -> Result<SolveReport> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidInput("epsilon must be in (0, 1]".into()));
    }
    let started = Instant::now();
    let sub = prune_to_b_proper(graph, budget)?;
    let bundle = build_const_drat(&sub.graph, Some(budget), None, BuildObjective::MaxPrize)?;
    let sol = solve_lp(&bundle.model)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::NumericalFailure(format!(
            "budget relaxation reported {:?}",
            sol.status
        )));
    }
    let lp_obj = sol.objective_value;
    let mut trim_input_ratio = None;
    let mut trace = None;
    let tree_sub = if lp_obj <= 1e-12 {
        RootedTree::singleton(&sub.graph, sub.graph.root())?
    } else {
        let x = bundle.capacities(&sol);
        let f_max = max_root_distance(&sub.graph)?;
        let (rounded, t) = good_tree_from_fraction(&sub.graph, &x, budget, lp_obj, f_max)?;
        trace = Some(t);
        if rounded.cost() <= budget {
            rounded
        } else {
            let gamma = rounded.prize_additive() / rounded.cost();
            trim_input_ratio = Some(gamma);
            trim_additive(&rounded, &sub.graph, budget, epsilon, gamma)?
        }
    };
    if tree_sub.cost() > (1.0 + epsilon) * budget + 1e-9 * (1.0 + budget) {
        return Err(Error::ContractViolation(format!(
            "budgeted tree costs {}, above (1+eps)B = {}",
            tree_sub.cost(),
            (1.0 + epsilon) * budget
        )));
    }
    let tree = tree_sub.translate(graph, &sub.to_parent)?;
    let prize = tree.prize_additive();
    Ok(SolveReport {
        tree,
        prize,
        lp_bound: Some(lp_obj),
        budget: Some(budget),
        quota: Some(lp_obj),
        epsilon,
        guesses_tried: 0,
        wallclock_ms: started.elapsed().as_millis() as u64,
        trace,
        trim_input_ratio,
    })
}

/// Quota additive solver: guesses the optimal cost geometrically, prunes to
/// each guess, solves the cost-minimizing relaxation under the quota row, and
/// rounds; keeps the cheapest tree. The result carries at least half the
/// quota.
pub fn solve_qdrat(graph: &NodeWeightedGraph, quota: f64, epsilon: f64) -> Result<SolveReport> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput("epsilon must be > 0".into()));
    }
    let started = Instant::now();
    let root = graph.root();
    if quota <= 0.0 {
        let tree = RootedTree::singleton(graph, root)?;
        let prize = tree.prize_additive();
        return Ok(SolveReport {
            tree,
            prize,
            lp_bound: Some(0.0),
            budget: None,
            quota: Some(quota),
            epsilon,
            guesses_tried: 0,
            wallclock_ms: started.elapsed().as_millis() as u64,
            trace: None,
            trim_input_ratio: None,
        });
    }
    let reach = graph.reachable_from(root);
    let c_max: f64 = reach.iter().map(|&v| graph.cost(v)).sum();
    let schedule = match min_positive_cost(graph, &reach) {
        None => vec![0.0],
        Some(c_min) => guess_cost_schedule(c_min, c_max, epsilon)?,
    };
    let mut best: Option<(f64, RootedTree, GoodTreeTrace)> = None;
    let mut lp_bound = f64::INFINITY;
    let mut guesses_tried = 0usize;
    for &g in &schedule {
        guesses_tried += 1;
        if g < graph.cost(root) {
            continue;
        }
        let sub = prune_to_b_proper(graph, g)?;
        let bundle = build_const_drat(&sub.graph, None, Some(quota), BuildObjective::MinCost)?;
        let sol = solve_lp(&bundle.model)?;
        if sol.status != LpStatus::Optimal {
            continue;
        }
        lp_bound = lp_bound.min(sol.objective_value);
        let x = bundle.capacities(&sol);
        let f_max = max_root_distance(&sub.graph)?;
        let (tree, trace) =
            good_tree_from_fraction(&sub.graph, &x, sol.objective_value, quota, f_max)?;
        let orig = tree.translate(graph, &sub.to_parent)?;
        match &best {
            Some((c, _, _)) if *c <= orig.cost() => {}
            _ => best = Some((orig.cost(), orig, trace)),
        }
    }
    let Some((_, tree, trace)) = best else {
        return Err(Error::QuotaUnreachable(format!(
            "no cost guess admits prize {quota}"
        )));
    };
    let lp_obj = lp_bound;
    let prize = tree.prize_additive();
    Ok(SolveReport {
        tree,
        prize,
        lp_bound: Some(lp_obj),
        budget: None,
        quota: Some(quota),
        epsilon,
        guesses_tried,
        wallclock_ms: started.elapsed().as_millis() as u64,
        trace: Some(trace),
        trim_input_ratio: None,
    })
}

/// Turns any budget solver with approximation factor `alpha` into a quota
/// solver: sweep the budget geometrically from the smallest positive node
/// cost to the total cost, returning the first tree whose prize reaches
/// `quota / alpha`. The solver returns `None` for budgets it cannot serve.
pub fn quota_via_budget<F>(
    graph: &NodeWeightedGraph,
    quota: f64,
    mut budget_solver: F,
    epsilon: f64,
    alpha: f64,
) -> Result<SolveReport>
where
    F: FnMut(&NodeWeightedGraph, f64) -> Result<Option<RootedTree>>,
{
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput("epsilon must be > 0".into()));
    }
    if !(alpha >= 1.0) {
        return Err(Error::InvalidInput("alpha must be >= 1".into()));
    }
    let started = Instant::now();
    let total = graph.total_cost();
    let all: BTreeSet<usize> = (0..graph.node_count()).collect();
    let c_min = min_positive_cost(graph, &all).unwrap_or(0.0);
    let target = quota / alpha;
    let mut b = c_min;
    let mut iterations = 0usize;
    loop {
        iterations += 1;
        if let Some(tree) = budget_solver(graph, b)? {
            if tree.prize_additive() >= target - 1e-9 {
                let prize = tree.prize_additive();
                return Ok(SolveReport {
                    tree,
                    prize,
                    lp_bound: None,
                    budget: Some(b),
                    quota: Some(quota),
                    epsilon,
                    guesses_tried: iterations,
                    wallclock_ms: started.elapsed().as_millis() as u64,
                    trace: None,
                    trim_input_ratio: None,
                });
            }
        }
        if b >= total {
            return Err(Error::QuotaUnreachable(format!(
                "budget sweep reached the total cost {total} without prize {target}"
            )));
        }
        b = (b * (1.0 + epsilon)).min(total);
    }
}
