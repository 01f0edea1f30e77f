//! Undirected pipelines for monotone submodular prizes: the Klein–Ravi
//! spider-merge Steiner tree, budgeted and quota solvers driven by the
//! submodular flow relaxation, subtree decomposition at a cost granularity,
//! and the two-stage submodular trimmer.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use crate::directed::{partition_support, GoodTreeTrace, SolveBranch, SolveReport};
use crate::flow::solve_const_urst;
use crate::flow::BuildObjective;
use crate::graph::{
    build_arborescence, node_weighted_shortest_paths, prune_to_b_proper, shortest_paths_with_costs,
    NodeWeightedGraph, RootedTree,
};
use crate::prize::PrizeOracle;
use crate::simplex::LpStatus;
use crate::{Error, Result};

/// A spider considered by the merge loop: a center plus legs reaching
/// distinct components, with the incremental cost (already-purchased nodes
/// are free) divided by the number of legs.
#[derive(Debug, Clone)]
pub struct SpiderCandidate {
    pub center: usize,
    /// `(component id, path node list, incremental cost)` per leg
    pub legs: Vec<(usize, Vec<usize>, f64)>,
    pub ratio: f64,
}

/// Node-weighted Steiner tree by repeated minimum-ratio spider merges.
/// Purchased nodes cost zero in later distance computations; each merge
/// strictly reduces the component count, and the loop ends with one
/// component spanning every terminal.
pub fn klein_ravi_steiner(
    graph: &NodeWeightedGraph,
    terminals: &BTreeSet<usize>,
) -> Result<RootedTree> {
    if graph.is_directed() {
        return Err(Error::InvalidInput(
            "spider merging expects an undirected graph".into(),
        ));
    }
    let root = graph.root();
    if !terminals.contains(&root) {
        return Err(Error::InvalidInput(
            "terminal set must contain the root".into(),
        ));
    }
    let reach = graph.reachable_from(root);
    for &t in terminals {
        graph.check_node(t)?;
        if !reach.contains(&t) {
            return Err(Error::Connectivity { node: t });
        }
    }
    if terminals.len() == 1 {
        return RootedTree::singleton(graph, root);
    }
    let n = graph.node_count();
    let mut working: Vec<f64> = graph.costs().to_vec();
    let mut comps: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (i, &t) in terminals.iter().enumerate() {
        comps.insert(i, [t].into_iter().collect());
        working[t] = 0.0; // terminals sit in every solution
    }
    while comps.len() > 1 {
        let mut best: Option<SpiderCandidate> = None;
        for center in 0..n {
            let dm = shortest_paths_with_costs(graph, center, &working, None)?;
            // nearest node of each component, by (distance, node id)
            let mut legs: Vec<(usize, usize, f64)> = Vec::new(); // (comp, node, dist)
            for (&cid, members) in &comps {
                let mut pick: Option<(f64, usize)> = None;
                for &v in members {
                    if !dm.reachable(v) {
                        continue;
                    }
                    match pick {
                        Some((d, u)) if (d, u) <= (dm.dist[v], v) => {}
                        _ => pick = Some((dm.dist[v], v)),
                    }
                }
                if let Some((d, v)) = pick {
                    legs.push((cid, v, d));
                }
            }
            if legs.len() < 2 {
                continue;
            }
            // leg cost excludes the center, which is paid once
            legs.sort_by(|a, b| {
                (a.2 - working[center])
                    .partial_cmp(&(b.2 - working[center]))
                    .unwrap()
                    .then(a.0.cmp(&b.0))
            });
            let mut cum = working[center];
            for (k, &(_, _, d)) in legs.iter().enumerate() {
                cum += d - working[center];
                let touched = k + 1;
                if touched < 2 {
                    continue;
                }
                let ratio = cum / touched as f64;
                let better = match &best {
                    None => true,
                    Some(b) => {
                        ratio < b.ratio
                            || (ratio == b.ratio && (center, touched) < (b.center, b.legs.len()))
                    }
                };
                if better {
                    let chosen: Vec<(usize, Vec<usize>, f64)> = legs[..touched]
                        .iter()
                        .map(|&(cid, v, d)| {
                            (cid, dm.path_to(v).expect("leg endpoint is reachable"), d)
                        })
                        .collect();
                    best = Some(SpiderCandidate {
                        center,
                        legs: chosen,
                        ratio,
                    });
                }
            }
        }
        let Some(spider) = best else {
            return Err(Error::Infeasible(
                "no spider can merge the remaining components".into(),
            ));
        };
        // purchase the spider and merge the touched components
        let mut merged: BTreeSet<usize> = BTreeSet::new();
        let mut kept_id = usize::MAX;
        for (cid, path, _) in &spider.legs {
            kept_id = kept_id.min(*cid);
            if let Some(members) = comps.remove(cid) {
                merged.extend(members);
            }
            for &v in path {
                merged.insert(v);
                working[v] = 0.0;
            }
        }
        merged.insert(spider.center);
        working[spider.center] = 0.0;
        comps.insert(kept_id, merged);
    }
    let (_, nodes) = comps.into_iter().next().unwrap();
    let tree = build_arborescence(graph, &nodes)?;
    for &t in terminals {
        if !tree.contains(t) {
            return Err(Error::ContractViolation(format!(
                "spider tree misses terminal {t}"
            )));
        }
    }
    Ok(tree)
}

/// Cover of a tree by out-subtrees, each costing at most `m` plus its own
/// root's cost.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub subtrees: Vec<RootedTree>,
    pub m: f64,
}

/// Splits a tree into at most `5·floor(c(T)/m)` out-subtrees covering every
/// node, each of cost at most `m + c(root_i)`. Repeatedly takes a deepest
/// node whose children-side cost exceeds `m`, emits each oversized child
/// subtree on its own and first-fit-bins the rest (descending cost) into
/// groups hung off that node, then deletes what was emitted. Whatever
/// remains, if not already covered, is emitted rooted at the tree root.
pub fn decompose_tree(
    tree: &RootedTree,
    graph: &NodeWeightedGraph,
    m: f64,
) -> Result<Decomposition> {
    if !(m > 0.0) {
        return Err(Error::InvalidInput(format!(
            "decomposition granularity must be > 0, got {m}"
        )));
    }
    let depth = tree.depths();
    let children = tree.children_map();
    let mut alive: BTreeSet<usize> = tree.members().iter().copied().collect();
    let mut groups: Vec<(usize, BTreeSet<usize>)> = Vec::new();

    fn subtree_nodes(
        u: usize,
        children: &BTreeMap<usize, Vec<usize>>,
        alive: &BTreeSet<usize>,
    ) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack = vec![u];
        while let Some(v) = stack.pop() {
            if !alive.contains(&v) {
                continue;
            }
            out.insert(v);
            stack.extend(children[&v].iter().copied());
        }
        out
    }

    loop {
        // children-side cost per alive node
        let mut child_cost: BTreeMap<usize, f64> = BTreeMap::new();
        let mut order: Vec<usize> = alive.iter().copied().collect();
        order.sort_by_key(|v| std::cmp::Reverse(depth[v]));
        for &v in &order {
            let c: f64 = children[&v]
                .iter()
                .filter(|c| alive.contains(c))
                .map(|&c| child_cost[&c] + graph.cost(c))
                .sum();
            child_cost.insert(v, c);
        }
        let target = order
            .iter()
            .copied()
            .filter(|v| child_cost[v] > m)
            .max_by_key(|v| (depth[v], std::cmp::Reverse(*v)));
        let Some(u) = target else { break };
        let kids: Vec<usize> = children[&u]
            .iter()
            .copied()
            .filter(|c| alive.contains(c))
            .collect();
        let mut light: Vec<(usize, BTreeSet<usize>, f64)> = Vec::new();
        for k in kids {
            let nodes = subtree_nodes(k, &children, &alive);
            let cost: f64 = nodes.iter().map(|&v| graph.cost(v)).sum();
            if cost > m {
                // oversized subtree: its own children-side cost is <= m by
                // the deepest choice, so it satisfies the bound on its own
                groups.push((k, nodes.clone()));
                for &v in &nodes {
                    alive.remove(&v);
                }
            } else {
                light.push((k, nodes, cost));
            }
        }
        // first-fit by descending cost, ties by id
        light.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap().then(a.0.cmp(&b.0)));
        let mut bins: Vec<(BTreeSet<usize>, f64)> = Vec::new();
        for (_, nodes, cost) in light {
            let slot = bins.iter_mut().find(|(_, used)| *used + cost <= m + 1e-12);
            match slot {
                Some((set, used)) => {
                    set.extend(nodes.iter().copied());
                    *used += cost;
                }
                None => bins.push((nodes, cost)),
            }
        }
        for (set, _) in bins {
            let mut group = set.clone();
            group.insert(u);
            groups.push((u, group));
            for &v in &set {
                alive.remove(&v);
            }
        }
    }
    let covered: BTreeSet<usize> = groups.iter().flat_map(|(_, s)| s.iter().copied()).collect();
    if alive.iter().any(|v| !covered.contains(v)) {
        groups.push((tree.root(), alive.clone()));
    }

    let mut subtrees = Vec::new();
    for (group_root, nodes) in groups {
        let mut parent = BTreeMap::new();
        for &v in &nodes {
            if v == group_root {
                continue;
            }
            let p = tree
                .parent_of(v)
                .ok_or_else(|| Error::ContractViolation("group node lost its parent".into()))?;
            if !nodes.contains(&p) {
                return Err(Error::ContractViolation(format!(
                    "group around {group_root} is not connected at node {v}"
                )));
            }
            parent.insert(v, p);
        }
        subtrees.push(RootedTree::from_parent_map(graph, group_root, parent)?);
    }
    let deco = Decomposition { subtrees, m };
    validate_decomposition(tree, graph, &deco)?;
    Ok(deco)
}

fn validate_decomposition(
    tree: &RootedTree,
    graph: &NodeWeightedGraph,
    deco: &Decomposition,
) -> Result<()> {
    let mut covered = BTreeSet::new();
    for sub in &deco.subtrees {
        covered.extend(sub.members().iter().copied());
        let cap = deco.m + graph.cost(sub.root());
        if sub.cost() > cap + 1e-9 * (1.0 + cap) {
            return Err(Error::ContractViolation(format!(
                "subtree rooted at {} costs {}, above m + root cost = {cap}",
                sub.root(),
                sub.cost()
            )));
        }
    }
    if &covered != tree.members() {
        return Err(Error::ContractViolation(
            "decomposition does not cover the tree".into(),
        ));
    }
    let budget_ratio = (tree.cost() / deco.m).floor();
    let cap = if budget_ratio >= 1.0 {
        (5.0 * budget_ratio) as usize
    } else {
        1
    };
    if deco.subtrees.len() > cap {
        return Err(Error::ContractViolation(format!(
            "decomposition produced {} subtrees, cap is {cap}",
            deco.subtrees.len()
        )));
    }
    Ok(())
}

/// Which guarantee the submodular trimmer ended on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrimCondition {
    /// cost in `[εB/2, (1+ε)B]` with ratio at least `ε²γ/640`
    RatioWindow,
    /// cost at most `B` with prize at least `p(T)/(5h')`
    WithinBudget,
}

#[derive(Debug, Clone)]
pub struct TrimOutcome {
    pub tree: RootedTree,
    pub condition: TrimCondition,
}

/// Two-stage submodular trimmer. Stage one decomposes at `m = B`, takes the
/// best-prize piece, and attaches it to the root; if that already fits the
/// budget it is returned with the `p(T)/(5h')` guarantee. Otherwise the
/// (at most `2B`) tree is re-decomposed at `m = εB/2` and the best
/// prize-to-cost candidate inside the cost window wins, padding candidates
/// with their cheapest tree neighbors when they land under the window.
pub fn trim_submodular(
    tree: &RootedTree,
    graph: &NodeWeightedGraph,
    oracle: &PrizeOracle,
    bound: f64,
    epsilon: f64,
) -> Result<TrimOutcome> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidInput("epsilon must be in (0, 1]".into()));
    }
    let lo = epsilon * bound / 2.0;
    let hi = (1.0 + epsilon) * bound;
    let slack = 1e-9 * (1.0 + bound);
    let c_in = tree.cost();
    if c_in < lo - slack {
        return Err(Error::ContractViolation(format!(
            "submodular trimming needs tree cost >= {lo}, got {c_in}"
        )));
    }
    let p_in = oracle.eval(tree.members());
    let h_prime = (c_in / bound).max(1.0);
    if c_in <= bound + slack {
        return Ok(TrimOutcome {
            tree: tree.clone(),
            condition: TrimCondition::WithinBudget,
        });
    }
    let gamma = p_in / c_in;

    // stage one: decompose at m = B, keep the best-prize piece plus its path
    let deco = decompose_tree(tree, graph, bound)?;
    let dm = node_weighted_shortest_paths(graph, graph.root(), None)?;
    let mut best_piece: Option<(f64, BTreeSet<usize>)> = None;
    for sub in &deco.subtrees {
        let p = oracle.eval(sub.members());
        match &best_piece {
            Some((bp, _)) if *bp >= p => {}
            _ => best_piece = Some((p, sub.members().clone())),
        }
    }
    let (piece_prize, piece) = best_piece.expect("decomposition is never empty");
    let piece_root = deco
        .subtrees
        .iter()
        .find(|s| s.members() == &piece && oracle.eval(s.members()) == piece_prize)
        .map(|s| s.root())
        .unwrap();
    let mut joined = piece.clone();
    let path = dm
        .path_to(piece_root)
        .ok_or(Error::Connectivity { node: piece_root })?;
    joined.extend(path.iter().copied());
    let joined_cost: f64 = joined.iter().map(|&v| graph.cost(v)).sum();
    if joined_cost <= bound + slack {
        let out = build_arborescence(graph, &joined)?;
        let need = p_in / (5.0 * h_prime);
        if oracle.eval(out.members()) < need * (1.0 - 1e-6) {
            return Err(Error::ContractViolation(format!(
                "trimmed prize {} misses the p/(5h') floor {need}",
                oracle.eval(out.members())
            )));
        }
        return Ok(TrimOutcome {
            tree: out,
            condition: TrimCondition::WithinBudget,
        });
    }

    // stage two: the joined tree costs at most 2B; re-decompose at m = εB/2
    // and pick the best in-window candidate
    let joined_tree = build_arborescence(graph, &joined)?;
    let fine = decompose_tree(&joined_tree, graph, lo.min(joined_tree.cost()))?;
    // adjacency inside the joined tree for padding undersized candidates
    let mut adj: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (p, c) in joined_tree.arcs() {
        adj.entry(p).or_default().insert(c);
        adj.entry(c).or_default().insert(p);
    }
    let mut best: Option<(f64, BTreeSet<usize>)> = None;
    for sub in &fine.subtrees {
        let mut cand: BTreeSet<usize> = sub.members().clone();
        let path = dm
            .path_to(sub.root())
            .ok_or(Error::Connectivity { node: sub.root() })?;
        cand.extend(path);
        let mut cost: f64 = cand.iter().map(|&v| graph.cost(v)).sum();
        // grow with the cheapest tree neighbor until the window floor
        while cost < lo - slack {
            let next = cand
                .iter()
                .flat_map(|v| adj.get(v).into_iter().flatten())
                .filter(|w| !cand.contains(w))
                .min_by(|&&a, &&b| {
                    graph
                        .cost(a)
                        .partial_cmp(&graph.cost(b))
                        .unwrap()
                        .then(a.cmp(&b))
                })
                .copied();
            let Some(w) = next else { break };
            cand.insert(w);
            cost += graph.cost(w);
        }
        if cost < lo - slack || cost > hi + slack {
            continue;
        }
        let p = oracle.eval(&cand);
        let ratio = if cost > 0.0 { p / cost } else { f64::INFINITY };
        match &best {
            Some((br, _)) if *br >= ratio => {}
            _ => best = Some((ratio, cand)),
        }
    }
    let Some((ratio, nodes)) = best else {
        return Err(Error::ContractViolation(
            "no trim candidate lands in the cost window".into(),
        ));
    };
    let floor = epsilon * epsilon * gamma / 640.0;
    if ratio < floor * (1.0 - 1e-6) {
        return Err(Error::ContractViolation(format!(
            "trimmed ratio {ratio} misses the eps^2*gamma/640 floor {floor}"
        )));
    }
    let out = build_arborescence(graph, &nodes)?;
    Ok(TrimOutcome {
        tree: out,
        condition: TrimCondition::RatioWindow,
    })
}

/// Budgeted submodular solver: prune to the budget, solve the relaxation by
/// row generation, then either span the high-capacity tier with spider
/// merges (trimming if over budget) or take one shortest path to the best
/// singleton of the low tier. Cost never exceeds `(1+ε)·B`.
pub fn solve_burst(
    graph: &NodeWeightedGraph,
    oracle: &PrizeOracle,
    budget: f64,
    epsilon: f64,
) -> Result<SolveReport> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidInput("epsilon must be in (0, 1]".into()));
    }
    let started = Instant::now();
    let sub = prune_to_b_proper(graph, budget)?;
    let sub_oracle = oracle.restrict(&sub.to_parent)?;
    let out = solve_const_urst(
        &sub.graph,
        &sub_oracle,
        Some(budget),
        None,
        BuildObjective::MaxPrize,
    )?;
    if out.solution.status != LpStatus::Optimal {
        return Err(Error::NumericalFailure(format!(
            "budget relaxation reported {:?}",
            out.solution.status
        )));
    }
    let lp_obj = out.solution.objective_value;
    let n = sub.graph.node_count();
    let theta = (n as f64).sqrt().recip();
    let x = out.bundle.capacities(&out.solution);
    let part = partition_support(&x, theta, theta);
    let prizes = &out.bundle.node_prizes;
    let high_mass: f64 = part.high.iter().map(|&v| x[v] * prizes[v]).sum();
    let low_mass: f64 = part.low.iter().map(|&v| x[v] * prizes[v]).sum();
    let mut trim_input_ratio = None;
    let (tree_sub, branch) = if lp_obj <= 1e-12 {
        (
            RootedTree::singleton(&sub.graph, sub.graph.root())?,
            SolveBranch::MaxSingletonPath,
        )
    } else if high_mass >= lp_obj / 2.0 {
        let mut terminals = part.high.clone();
        terminals.insert(sub.graph.root());
        let spanned = klein_ravi_steiner(&sub.graph, &terminals)?;
        if spanned.cost() <= budget {
            (spanned, SolveBranch::HighCapacitySpan)
        } else {
            let gamma = sub_oracle.eval(spanned.members()) / spanned.cost();
            trim_input_ratio = Some(gamma);
            let trimmed = trim_submodular(&spanned, &sub.graph, &sub_oracle, budget, epsilon)?;
            (trimmed.tree, SolveBranch::HighCapacitySpan)
        }
    } else {
        let v = part
            .low
            .iter()
            .copied()
            .max_by(|&a, &b| prizes[a].partial_cmp(&prizes[b]).unwrap().then(b.cmp(&a)))
            .ok_or_else(|| {
                Error::ContractViolation("no low-tier support carries the missing prize".into())
            })?;
        let dm = node_weighted_shortest_paths(&sub.graph, sub.graph.root(), None)?;
        let nodes: BTreeSet<usize> = dm
            .path_to(v)
            .ok_or(Error::Connectivity { node: v })?
            .into_iter()
            .collect();
        (
            build_arborescence(&sub.graph, &nodes)?,
            SolveBranch::MaxSingletonPath,
        )
    };
    if tree_sub.cost() > (1.0 + epsilon) * budget + 1e-9 * (1.0 + budget) {
        return Err(Error::ContractViolation(format!(
            "budgeted submodular tree costs {}, above (1+eps)B",
            tree_sub.cost()
        )));
    }
    let f_max = {
        let dm = node_weighted_shortest_paths(&sub.graph, sub.graph.root(), None)?;
        dm.dist
            .iter()
            .copied()
            .filter(|d| d.is_finite())
            .fold(0.0, f64::max)
    };
    let tree = tree_sub.translate(graph, &sub.to_parent)?;
    let prize = oracle.eval(tree.members());
    Ok(SolveReport {
        tree,
        prize,
        lp_bound: Some(lp_obj),
        budget: Some(budget),
        quota: Some(lp_obj),
        epsilon,
        guesses_tried: 0,
        wallclock_ms: started.elapsed().as_millis() as u64,
        trace: Some(GoodTreeTrace {
            branch,
            pruned_nodes: n,
            max_distance: f_max,
            hitter_count: 0,
            group_size: 0,
            high_mass,
            low_mass,
        }),
        trim_input_ratio,
    })
}

/// Quota submodular solver: the cost-guessing loop around the quota form of
/// the relaxation. Each feasible guess yields either a spider-merged span of
/// the high tier (prize at least `Q/2`) or a single best-singleton path
/// (prize at least `Q/(2√n)`, cost at most the guess); the cheapest tree
/// across guesses is returned and the trace records which branch produced
/// it.
pub fn solve_qurst(
    graph: &NodeWeightedGraph,
    oracle: &PrizeOracle,
    quota: f64,
    epsilon: f64,
) -> Result<SolveReport> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput("epsilon must be > 0".into()));
    }
    let started = Instant::now();
    let root = graph.root();
    if quota <= 0.0 {
        let tree = RootedTree::singleton(graph, root)?;
        let prize = oracle.eval(tree.members());
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
    let c_min = reach
        .iter()
        .map(|&v| graph.cost(v))
        .filter(|&c| c > 0.0)
        .fold(f64::INFINITY, f64::min);
    let schedule = if c_min.is_finite() {
        crate::directed::guess_cost_schedule(c_min, c_max, epsilon)?
    } else {
        vec![0.0]
    };
    let mut guesses_tried = 0usize;
    let mut lp_bound = f64::INFINITY;
    let mut best: Option<(f64, RootedTree, GoodTreeTrace)> = None;
    for &g in &schedule {
        guesses_tried += 1;
        if g < graph.cost(root) {
            continue;
        }
        let sub = prune_to_b_proper(graph, g)?;
        let sub_oracle = oracle.restrict(&sub.to_parent)?;
        let out = solve_const_urst(
            &sub.graph,
            &sub_oracle,
            None,
            Some(quota),
            BuildObjective::MinCost,
        )?;
        if out.solution.status != LpStatus::Optimal {
            continue;
        }
        lp_bound = lp_bound.min(out.solution.objective_value);
        let n = sub.graph.node_count();
        let theta = (n as f64).sqrt().recip();
        let x = out.bundle.capacities(&out.solution);
        let part = partition_support(&x, theta, theta);
        let prizes = &out.bundle.node_prizes;
        let high_mass: f64 = part.high.iter().map(|&v| x[v] * prizes[v]).sum();
        let low_mass: f64 = part.low.iter().map(|&v| x[v] * prizes[v]).sum();
        let (tree_sub, branch) = if high_mass >= quota / 2.0 {
            let mut terminals = part.high.clone();
            terminals.insert(sub.graph.root());
            (
                klein_ravi_steiner(&sub.graph, &terminals)?,
                SolveBranch::HighCapacitySpan,
            )
        } else {
            let Some(v) = part
                .low
                .iter()
                .copied()
                .max_by(|&a, &b| prizes[a].partial_cmp(&prizes[b]).unwrap().then(b.cmp(&a)))
            else {
                continue;
            };
            let dm = node_weighted_shortest_paths(&sub.graph, sub.graph.root(), None)?;
            let nodes: BTreeSet<usize> = dm
                .path_to(v)
                .ok_or(Error::Connectivity { node: v })?
                .into_iter()
                .collect();
            (
                build_arborescence(&sub.graph, &nodes)?,
                SolveBranch::MaxSingletonPath,
            )
        };
        let f_max = {
            let dm = node_weighted_shortest_paths(&sub.graph, sub.graph.root(), None)?;
            dm.dist
                .iter()
                .copied()
                .filter(|d| d.is_finite())
                .fold(0.0, f64::max)
        };
        let orig = tree_sub.translate(graph, &sub.to_parent)?;
        let trace = GoodTreeTrace {
            branch,
            pruned_nodes: n,
            max_distance: f_max,
            hitter_count: 0,
            group_size: 0,
            high_mass,
            low_mass,
        };
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
    let prize = oracle.eval(tree.members());
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

#[cfg(test)]
mod tests {
    use super::*;

    fn ugraph(costs: &[f64], edges: &[(usize, usize)]) -> NodeWeightedGraph {
        let mut g = NodeWeightedGraph::new(costs.len(), false);
        for (v, &c) in costs.iter().enumerate() {
            g.set_cost(v, c).unwrap();
        }
        for &(u, v) in edges {
            g.add_arc(u, v).unwrap();
        }
        g
    }

    #[test]
    fn spider_trivial_cases() {
        let g = ugraph(&[0.0, 1.0, 2.0], &[(0, 1), (1, 2)]);
        let only_root = klein_ravi_steiner(&g, &[0].into_iter().collect()).unwrap();
        assert_eq!(only_root.len(), 1);

        let two = klein_ravi_steiner(&g, &[0, 2].into_iter().collect()).unwrap();
        assert_eq!(two.members(), &(0..3).collect());
        assert!((two.cost() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn spider_uses_the_hub() {
        // three terminals around a cheap hub; one spider should buy the hub
        let g = ugraph(
            &[0.0, 0.5, 1.0, 1.0, 1.0, 10.0, 10.0],
            &[
                (0, 1),
                (1, 2),
                (1, 3),
                (1, 4),
                (0, 5),
                (5, 2),
                (6, 3),
                (0, 6),
            ],
        );
        let terminals: BTreeSet<usize> = [0, 2, 3, 4].into_iter().collect();
        let tree = klein_ravi_steiner(&g, &terminals).unwrap();
        for &t in &terminals {
            assert!(tree.contains(t));
        }
        assert!(tree.contains(1));
        assert!(!tree.contains(5) && !tree.contains(6));
    }

    #[test]
    fn spider_disconnected_terminal_errors() {
        let g = ugraph(&[0.0, 1.0, 1.0], &[(0, 1)]);
        assert!(matches!(
            klein_ravi_steiner(&g, &[0, 2].into_iter().collect()),
            Err(Error::Connectivity { node: 2 })
        ));
    }

    #[test]
    fn decompose_whole_tree_when_granularity_covers_it() {
        let g = ugraph(&[0.0, 1.0, 1.0], &[(0, 1), (1, 2)]);
        let tree = build_arborescence(&g, &(0..3).collect()).unwrap();
        let deco = decompose_tree(&tree, &g, 5.0).unwrap();
        assert_eq!(deco.subtrees.len(), 1);
        assert_eq!(deco.subtrees[0].members(), tree.members());
    }

    #[test]
    fn decompose_star_bins_leaves() {
        // center cost 0 with six unit leaves at m = 2: three bins of two
        let mut costs = vec![0.0; 7];
        for c in costs.iter_mut().skip(1) {
            *c = 1.0;
        }
        let edges: Vec<(usize, usize)> = (1..7).map(|v| (0, v)).collect();
        let g = ugraph(&costs, &edges);
        let tree = build_arborescence(&g, &(0..7).collect()).unwrap();
        let deco = decompose_tree(&tree, &g, 2.0).unwrap();
        assert_eq!(deco.subtrees.len(), 3);
        for sub in &deco.subtrees {
            assert_eq!(sub.root(), 0);
            assert!(sub.cost() <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn decompose_path_counts() {
        let g = ugraph(&[1.0, 1.0, 1.0, 1.0], &[(0, 1), (1, 2), (2, 3)]);
        let tree = build_arborescence(&g, &(0..4).collect()).unwrap();
        let deco = decompose_tree(&tree, &g, 2.0).unwrap();
        assert!(deco.subtrees.len() <= 10); // 5 * floor(4/2)
        let all: BTreeSet<usize> = deco
            .subtrees
            .iter()
            .flat_map(|s| s.members().iter().copied())
            .collect();
        assert_eq!(all, (0..4).collect());
    }

    #[test]
    fn trim_submodular_within_budget_is_identity() {
        let g = ugraph(&[0.0, 1.0], &[(0, 1)]);
        let tree = build_arborescence(&g, &(0..2).collect()).unwrap();
        let oracle = PrizeOracle::additive(vec![0.0, 1.0]);
        let out = trim_submodular(&tree, &g, &oracle, 2.0, 1.0).unwrap();
        assert_eq!(out.condition, TrimCondition::WithinBudget);
        assert_eq!(out.tree.members(), tree.members());
    }

    #[test]
    fn trim_submodular_cuts_an_oversized_tree() {
        // B-proper star bigger than (1+eps)B
        let b = 2.0;
        let n = 8;
        let mut costs = vec![0.0; n];
        let mut prizes = vec![0.0; n];
        for v in 1..n {
            costs[v] = 1.0;
            prizes[v] = v as f64;
        }
        let edges: Vec<(usize, usize)> = (1..n).map(|v| (0, v)).collect();
        let g = ugraph(&costs, &edges);
        let tree = build_arborescence(&g, &(0..n).collect()).unwrap();
        let oracle = PrizeOracle::additive(prizes);
        let p_in = oracle.eval(tree.members());
        let gamma = p_in / tree.cost();
        let out = trim_submodular(&tree, &g, &oracle, b, 1.0).unwrap();
        match out.condition {
            TrimCondition::WithinBudget => {
                assert!(out.tree.cost() <= b + 1e-9);
                let h = tree.cost() / b;
                assert!(oracle.eval(out.tree.members()) >= p_in / (5.0 * h) * (1.0 - 1e-6));
            }
            TrimCondition::RatioWindow => {
                assert!(out.tree.cost() >= 0.5 * b - 1e-9 && out.tree.cost() <= 2.0 * b + 1e-9);
                let r = oracle.eval(out.tree.members()) / out.tree.cost();
                assert!(r >= gamma / 640.0 * (1.0 - 1e-6));
            }
        }
    }

    #[test]
    fn both_trimmers_meet_their_contracts_on_additive_prizes() {
        // a B-proper star too big for the window; the additive and the
        // submodular trimmer each deliver their own guarantee on it
        let b = 2.0;
        let n = 8;
        let mut g = NodeWeightedGraph::new(n, true);
        let mut prizes = vec![0.0; n];
        for v in 1..n {
            g.set_cost(v, 0.9).unwrap();
            g.set_prize(v, v as f64).unwrap();
            g.add_arc(0, v).unwrap();
            prizes[v] = v as f64;
        }
        let tree = build_arborescence(&g, &(0..n).collect()).unwrap();
        assert!(tree.cost() > (1.0 + 1.0) * b);
        let gamma = tree.prize_additive() / tree.cost();

        let direct = crate::directed::trim_additive(&tree, &g, b, 1.0, gamma).unwrap();
        assert!(direct.cost() >= 0.5 * b - 1e-9 && direct.cost() <= 2.0 * b + 1e-9);
        assert!(direct.prize_additive() / direct.cost() >= gamma / 4.0 * (1.0 - 1e-6));

        let oracle = PrizeOracle::additive(prizes);
        let sub = trim_submodular(&tree, &g, &oracle, b, 1.0).unwrap();
        let p_in = oracle.eval(tree.members());
        match sub.condition {
            TrimCondition::WithinBudget => {
                assert!(sub.tree.cost() <= b + 1e-9);
                let h = tree.cost() / b;
                assert!(oracle.eval(sub.tree.members()) >= p_in / (5.0 * h) * (1.0 - 1e-6));
            }
            TrimCondition::RatioWindow => {
                assert!(sub.tree.cost() >= 0.5 * b - 1e-9 && sub.tree.cost() <= 2.0 * b + 1e-9);
                let ratio = oracle.eval(sub.tree.members()) / sub.tree.cost();
                assert!(ratio >= gamma / 640.0 * (1.0 - 1e-6));
            }
        }
    }

    #[test]
    fn burst_all_coverage_behind_one_node() {
        // node 1 covers everything; expect a short path and full prize
        let g = ugraph(&[0.0, 1.0, 1.0], &[(0, 1), (1, 2)]);
        let covers = vec![
            BTreeSet::new(),
            [0, 1, 2].into_iter().collect(),
            [0].into_iter().collect(),
        ];
        let oracle = PrizeOracle::coverage(covers, BTreeMap::new());
        let report = solve_burst(&g, &oracle, 2.0, 0.5).unwrap();
        assert!(report.tree.contains(1));
        assert!((report.prize - 3.0).abs() < 1e-6);
        assert!(report.tree.cost() <= 3.0 + 1e-9);
    }

    #[test]
    fn burst_additive_respects_budget() {
        let g = ugraph(&[0.0, 1.0, 1.0, 1.0], &[(0, 1), (0, 2), (2, 3)]);
        let oracle = PrizeOracle::additive(vec![0.0, 5.0, 1.0, 4.0]);
        let report = solve_burst(&g, &oracle, 2.0, 0.5).unwrap();
        assert!(report.tree.cost() <= 3.0 + 1e-9); // (1+eps) * B
        assert!(report.prize > 0.0);
    }

    #[test]
    fn qurst_zero_quota_is_the_root() {
        let g = ugraph(&[0.0, 1.0], &[(0, 1)]);
        let oracle = PrizeOracle::additive(vec![0.0, 1.0]);
        let report = solve_qurst(&g, &oracle, 0.0, 0.5).unwrap();
        assert_eq!(report.tree.len(), 1);
    }

    #[test]
    fn qurst_single_high_prize_node() {
        let g = ugraph(&[0.0, 1.0, 3.0], &[(0, 1), (1, 2)]);
        let covers = vec![
            BTreeSet::new(),
            [0].into_iter().collect(),
            [1, 2].into_iter().collect(),
        ];
        let oracle = PrizeOracle::coverage(covers, BTreeMap::new());
        let report = solve_qurst(&g, &oracle, 2.0, 0.5).unwrap();
        // either branch must deliver its floor
        let n = 3f64;
        assert!(report.prize >= 2.0 / (2.0 * n.sqrt()) - 1e-9);
    }

    #[test]
    fn qurst_unreachable_quota_errors() {
        let g = ugraph(&[0.0, 1.0], &[(0, 1)]);
        let oracle = PrizeOracle::additive(vec![0.0, 1.0]);
        assert!(matches!(
            solve_qurst(&g, &oracle, 9.0, 0.5),
            Err(Error::QuotaUnreachable(_))
        ));
    }
}
