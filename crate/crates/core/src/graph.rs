//! Node-weighted graphs, node-weighted shortest paths, bound-based pruning,
//! and shortest-path arborescence extraction.
//!
//! Path and tree costs are sums of *node* costs with both endpoints included,
//! so `dist(r, r) = cost(r)` and the cost of a tree depends only on its member
//! set, not on which arcs realize it.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};

use crate::{Error, Result};

/// Absolute slack used when comparing accumulated path costs against a bound.
const DIST_EPS: f64 = 1e-9;

/// A directed or undirected graph with a nonnegative cost and prize per node
/// and a designated root. Undirected graphs store both orientations of every
/// edge, so all traversal code works on out-neighbors only.
#[derive(Debug, Clone)]
pub struct NodeWeightedGraph {
    directed: bool,
    root: usize,
    cost: Vec<f64>,
    prize: Vec<f64>,
    adj: Vec<Vec<usize>>,
    arcs: BTreeSet<(usize, usize)>,
}

impl NodeWeightedGraph {
    pub fn new(node_count: usize, directed: bool) -> Self {
        NodeWeightedGraph {
            directed,
            root: 0,
            cost: vec![0.0; node_count],
            prize: vec![0.0; node_count],
            adj: vec![Vec::new(); node_count],
            arcs: BTreeSet::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.cost.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn set_root(&mut self, r: usize) -> Result<()> {
        self.check_node(r)?;
        self.root = r;
        Ok(())
    }

    pub fn cost(&self, v: usize) -> f64 {
        self.cost[v]
    }

    pub fn prize(&self, v: usize) -> f64 {
        self.prize[v]
    }

    pub fn costs(&self) -> &[f64] {
        &self.cost
    }

    pub fn prizes(&self) -> &[f64] {
        &self.prize
    }

    pub fn set_cost(&mut self, v: usize, c: f64) -> Result<()> {
        self.check_node(v)?;
        if !(c >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "cost of node {v} must be >= 0, got {c}"
            )));
        }
        self.cost[v] = c;
        Ok(())
    }

    pub fn set_prize(&mut self, v: usize, p: f64) -> Result<()> {
        self.check_node(v)?;
        if !(p >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "prize of node {v} must be >= 0, got {p}"
            )));
        }
        self.prize[v] = p;
        Ok(())
    }

    /// Adds the arc `(u, v)`; undirected graphs get both orientations.
    /// Self-loops and parallel arcs are rejected.
    pub fn add_arc(&mut self, u: usize, v: usize) -> Result<()> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(Error::InvalidInput(format!("self-loop on node {u}")));
        }
        if self.arcs.contains(&(u, v)) {
            return Err(Error::InvalidInput(format!("duplicate arc ({u}, {v})")));
        }
        self.arcs.insert((u, v));
        self.adj[u].push(v);
        if !self.directed {
            self.arcs.insert((v, u));
            self.adj[v].push(u);
        }
        Ok(())
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.arcs.contains(&(u, v))
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// All stored arcs in sorted order (both orientations for undirected).
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.arcs.iter().copied()
    }

    pub fn total_cost(&self) -> f64 {
        self.cost.iter().sum()
    }

    pub fn total_prize(&self) -> f64 {
        self.prize.iter().sum()
    }

    pub fn check_node(&self, v: usize) -> Result<()> {
        if v >= self.node_count() {
            return Err(Error::InvalidInput(format!(
                "node id {v} out of range (node count {})",
                self.node_count()
            )));
        }
        Ok(())
    }

    /// Nodes reachable from `src` along arcs.
    pub fn reachable_from(&self, src: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(src);
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Nodes from which `dst` is reachable.
    pub fn reachable_to(&self, dst: usize) -> BTreeSet<usize> {
        let mut radj = vec![Vec::new(); self.node_count()];
        for &(u, v) in &self.arcs {
            radj[v].push(u);
        }
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(dst);
        queue.push_back(dst);
        while let Some(u) = queue.pop_front() {
            for &w in &radj[u] {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Induced subgraph on `keep`, which must contain the root. Node ids are
    /// renumbered densely in ascending order of the original ids.
    pub fn induce(&self, keep: &BTreeSet<usize>) -> Result<InducedSubgraph> {
        if !keep.contains(&self.root) {
            return Err(Error::InvalidInput(
                "induced subgraph must keep the root".into(),
            ));
        }
        let to_parent: Vec<usize> = keep.iter().copied().collect();
        for &v in &to_parent {
            self.check_node(v)?;
        }
        let mut from_parent = vec![None; self.node_count()];
        for (new, &old) in to_parent.iter().enumerate() {
            from_parent[old] = Some(new);
        }
        let mut graph = NodeWeightedGraph::new(to_parent.len(), self.directed);
        for (new, &old) in to_parent.iter().enumerate() {
            graph.cost[new] = self.cost[old];
            graph.prize[new] = self.prize[old];
        }
        graph.root = from_parent[self.root].unwrap();
        for &(u, v) in &self.arcs {
            if let (Some(nu), Some(nv)) = (from_parent[u], from_parent[v]) {
                // arcs() yields both orientations for undirected graphs;
                // insert each orientation once.
                if !graph.arcs.contains(&(nu, nv)) {
                    graph.arcs.insert((nu, nv));
                    graph.adj[nu].push(nv);
                }
            }
        }
        Ok(InducedSubgraph {
            graph,
            to_parent,
            from_parent,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.check_node(self.root)?;
        for v in 0..self.node_count() {
            if !(self.cost[v] >= 0.0) || !self.cost[v].is_finite() {
                return Err(Error::InvalidInput(format!("bad cost on node {v}")));
            }
            if !(self.prize[v] >= 0.0) || !self.prize[v].is_finite() {
                return Err(Error::InvalidInput(format!("bad prize on node {v}")));
            }
        }
        if !self.directed {
            for &(u, v) in &self.arcs {
                if !self.arcs.contains(&(v, u)) {
                    return Err(Error::InvalidInput(format!(
                        "undirected graph missing reverse of ({u}, {v})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Result of [`NodeWeightedGraph::induce`]: the subgraph plus id mappings in
/// both directions.
#[derive(Debug, Clone)]
pub struct InducedSubgraph {
    pub graph: NodeWeightedGraph,
    /// dense id in the subgraph -> id in the parent graph
    pub to_parent: Vec<usize>,
    /// id in the parent graph -> dense id, when kept
    pub from_parent: Vec<Option<usize>>,
}

/// Single-source node-weighted shortest path labels with predecessors.
#[derive(Debug, Clone)]
pub struct DistanceMap {
    pub source: usize,
    pub dist: Vec<f64>,
    pub pred: Vec<Option<usize>>,
}

impl DistanceMap {
    pub fn reachable(&self, v: usize) -> bool {
        self.dist[v].is_finite()
    }

    /// The node sequence of a shortest path `source -> v`, if `v` is reachable.
    pub fn path_to(&self, v: usize) -> Option<Vec<usize>> {
        if !self.reachable(v) {
            return None;
        }
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.pred[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Some(path)
    }
}

#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (dist, node)
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Label-setting shortest paths where a path's cost is the sum of the costs
/// of all its nodes, endpoints included. `allowed` restricts the search to an
/// induced node set (defaults to every node). Unreachable nodes get `+inf`.
/// Equal-cost ties keep the smaller predecessor id, so outputs are
/// deterministic.
pub fn node_weighted_shortest_paths(
    graph: &NodeWeightedGraph,
    source: usize,
    allowed: Option<&BTreeSet<usize>>,
) -> Result<DistanceMap> {
    shortest_paths_with_costs(graph, source, graph.costs(), allowed)
}

/// Same search with node costs overridden, for algorithms that discount
/// already-purchased nodes.
pub fn shortest_paths_with_costs(
    graph: &NodeWeightedGraph,
    source: usize,
    costs: &[f64],
    allowed: Option<&BTreeSet<usize>>,
) -> Result<DistanceMap> {
    graph.check_node(source)?;
    if costs.len() != graph.node_count() {
        return Err(Error::InvalidInput("cost override length mismatch".into()));
    }
    if let Some(set) = allowed {
        for &v in set {
            graph.check_node(v)?;
        }
        if !set.contains(&source) {
            return Err(Error::InvalidInput(format!(
                "source {source} not in the allowed node set"
            )));
        }
    }
    let n = graph.node_count();
    let inside = |v: usize| allowed.map_or(true, |s| s.contains(&v));
    let mut dist = vec![f64::INFINITY; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = costs[source];
    heap.push(HeapEntry {
        dist: dist[source],
        node: source,
    });
    while let Some(HeapEntry { dist: d, node: u }) = heap.pop() {
        if done[u] || d > dist[u] {
            continue;
        }
        done[u] = true;
        for &v in graph.out_neighbors(u) {
            if !inside(v) || done[v] {
                continue;
            }
            let cand = dist[u] + costs[v];
            if cand < dist[v] {
                dist[v] = cand;
                pred[v] = Some(u);
                heap.push(HeapEntry {
                    dist: cand,
                    node: v,
                });
            } else if cand == dist[v] {
                if let Some(p) = pred[v] {
                    if u < p {
                        pred[v] = Some(u);
                    }
                }
            }
        }
    }
    Ok(DistanceMap { source, dist, pred })
}

/// Keeps exactly the nodes within node-weighted distance `bound` of the root
/// (distances measured on the input graph) and returns the induced subgraph.
/// The root is always retained; a bound below the root's own cost is an
/// error because not even the trivial tree would fit.
pub fn prune_to_b_proper(graph: &NodeWeightedGraph, bound: f64) -> Result<InducedSubgraph> {
    let r = graph.root();
    if bound < graph.cost(r) - DIST_EPS {
        return Err(Error::Infeasible(format!(
            "bound {bound} is below the root cost {}",
            graph.cost(r)
        )));
    }
    let dm = node_weighted_shortest_paths(graph, r, None)?;
    let keep: BTreeSet<usize> = (0..graph.node_count())
        .filter(|&v| v == r || dm.dist[v] <= bound + DIST_EPS * (1.0 + bound.abs()))
        .collect();
    graph.induce(&keep)
}

/// An out-arborescence (or rooted tree in the undirected case): parent links
/// over a member set, with the member-cost and additive member-prize sums
/// cached. For submodular problems the cached prize is still the additive sum
/// of singleton prizes; oracle prizes are evaluated externally.
#[derive(Debug, Clone, PartialEq)]
pub struct RootedTree {
    root: usize,
    parent: BTreeMap<usize, usize>,
    members: BTreeSet<usize>,
    cost: f64,
    prize_additive: f64,
}

impl RootedTree {
    pub fn singleton(graph: &NodeWeightedGraph, node: usize) -> Result<Self> {
        graph.check_node(node)?;
        let mut members = BTreeSet::new();
        members.insert(node);
        Ok(RootedTree {
            root: node,
            parent: BTreeMap::new(),
            members,
            cost: graph.cost(node),
            prize_additive: graph.prize(node),
        })
    }

    /// Builds and fully validates a tree from parent links.
    pub fn from_parent_map(
        graph: &NodeWeightedGraph,
        root: usize,
        parent: BTreeMap<usize, usize>,
    ) -> Result<Self> {
        let mut members: BTreeSet<usize> = parent.keys().copied().collect();
        members.insert(root);
        for (&c, &p) in &parent {
            members.insert(p);
            graph.check_node(c)?;
            graph.check_node(p)?;
        }
        let cost = members.iter().map(|&v| graph.cost(v)).sum();
        let prize_additive = members.iter().map(|&v| graph.prize(v)).sum();
        let tree = RootedTree {
            root,
            parent,
            members,
            cost,
            prize_additive,
        };
        tree.validate(graph)?;
        Ok(tree)
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn members(&self) -> &BTreeSet<usize> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a tree always has at least its root
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.contains(&v)
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn prize_additive(&self) -> f64 {
        self.prize_additive
    }

    pub fn parent_of(&self, v: usize) -> Option<usize> {
        self.parent.get(&v).copied()
    }

    /// `(parent, child)` pairs in ascending child order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parent.iter().map(|(&c, &p)| (p, c))
    }

    pub fn children_map(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut map: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &v in &self.members {
            map.entry(v).or_default();
        }
        for (&c, &p) in &self.parent {
            map.entry(p).or_default().push(c);
        }
        map
    }

    /// Depth (arc count from the root) per member.
    pub fn depths(&self) -> BTreeMap<usize, usize> {
        let children = self.children_map();
        let mut depth = BTreeMap::new();
        let mut queue = VecDeque::new();
        depth.insert(self.root, 0usize);
        queue.push_back(self.root);
        while let Some(u) = queue.pop_front() {
            let d = depth[&u];
            for &c in &children[&u] {
                depth.insert(c, d + 1);
                queue.push_back(c);
            }
        }
        depth
    }

    /// Checks every structural invariant against the host graph: unique
    /// parentless root, acyclic parent links reaching the root, every link an
    /// arc of the graph, and cached sums matching a recount.
    pub fn validate(&self, graph: &NodeWeightedGraph) -> Result<()> {
        graph.check_node(self.root)?;
        if !self.members.contains(&self.root) {
            return Err(Error::ContractViolation("tree root is not a member".into()));
        }
        if self.parent.contains_key(&self.root) {
            return Err(Error::ContractViolation("tree root has a parent".into()));
        }
        for &v in &self.members {
            if v != self.root && !self.parent.contains_key(&v) {
                return Err(Error::ContractViolation(format!(
                    "member {v} has no parent"
                )));
            }
        }
        for (&c, &p) in &self.parent {
            if !self.members.contains(&p) || !self.members.contains(&c) {
                return Err(Error::ContractViolation(format!(
                    "parent link ({p} -> {c}) leaves the member set"
                )));
            }
            if !graph.has_arc(p, c) {
                return Err(Error::ContractViolation(format!(
                    "parent link ({p} -> {c}) is not an arc of the graph"
                )));
            }
        }
        // acyclicity + reachability: walk up from every member
        for &v in &self.members {
            let mut cur = v;
            let mut steps = 0usize;
            while cur != self.root {
                cur = match self.parent.get(&cur) {
                    Some(&p) => p,
                    None => {
                        return Err(Error::ContractViolation(format!(
                            "member {v} does not reach the root via parent links"
                        )))
                    }
                };
                steps += 1;
                if steps > self.members.len() {
                    return Err(Error::ContractViolation("cycle in parent links".into()));
                }
            }
        }
        let cost: f64 = self.members.iter().map(|&v| graph.cost(v)).sum();
        let prize: f64 = self.members.iter().map(|&v| graph.prize(v)).sum();
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()));
        if !close(cost, self.cost) || !close(prize, self.prize_additive) {
            return Err(Error::ContractViolation(
                "cached tree cost/prize out of date".into(),
            ));
        }
        Ok(())
    }

    /// Re-expresses a tree built inside an induced subgraph in the parent
    /// graph's ids.
    pub fn translate(
        &self,
        parent_graph: &NodeWeightedGraph,
        to_parent: &[usize],
    ) -> Result<RootedTree> {
        let mut parent = BTreeMap::new();
        for (&c, &p) in &self.parent {
            parent.insert(to_parent[c], to_parent[p]);
        }
        RootedTree::from_parent_map(parent_graph, to_parent[self.root], parent)
    }
}

/// Builds the shortest-path arborescence over exactly `node_set`, rooted at
/// the graph root. Distances are node-weighted and restricted to the induced
/// subgraph on `node_set`; every member must be reachable there.
pub fn build_arborescence(
    graph: &NodeWeightedGraph,
    node_set: &BTreeSet<usize>,
) -> Result<RootedTree> {
    let r = graph.root();
    if !node_set.contains(&r) {
        return Err(Error::InvalidInput("node set must contain the root".into()));
    }
    let dm = node_weighted_shortest_paths(graph, r, Some(node_set))?;
    let mut parent = BTreeMap::new();
    for &v in node_set {
        if v == r {
            continue;
        }
        match dm.pred[v] {
            Some(p) => {
                parent.insert(v, p);
            }
            None => return Err(Error::Connectivity { node: v }),
        }
    }
    RootedTree::from_parent_map(graph, r, parent)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph_from(directed: bool, costs: &[f64], arcs: &[(usize, usize)]) -> NodeWeightedGraph {
        let mut g = NodeWeightedGraph::new(costs.len(), directed);
        for (v, &c) in costs.iter().enumerate() {
            g.set_cost(v, c).unwrap();
        }
        for &(u, v) in arcs {
            g.add_arc(u, v).unwrap();
        }
        g
    }

    /// Brute-force shortest node-cost path by enumerating simple paths.
    fn brute_force_dist(
        g: &NodeWeightedGraph,
        src: usize,
        allowed: Option<&BTreeSet<usize>>,
    ) -> Vec<f64> {
        let n = g.node_count();
        let inside = |v: usize| allowed.map_or(true, |s| s.contains(&v));
        let mut best = vec![f64::INFINITY; n];
        if !inside(src) {
            return best;
        }
        let mut stack = vec![(src, vec![src], g.cost(src))];
        while let Some((u, path, c)) = stack.pop() {
            if c < best[u] {
                best[u] = c;
            }
            for &w in g.out_neighbors(u) {
                if inside(w) && !path.contains(&w) {
                    let mut p2 = path.clone();
                    p2.push(w);
                    stack.push((w, p2, c + g.cost(w)));
                }
            }
        }
        best
    }

    #[test]
    fn single_node_distance_is_own_cost() {
        let g = graph_from(true, &[0.0], &[]);
        let dm = node_weighted_shortest_paths(&g, 0, None).unwrap();
        assert_eq!(dm.dist[0], 0.0);
        let mut g2 = graph_from(true, &[2.5], &[]);
        g2.set_root(0).unwrap();
        let dm2 = node_weighted_shortest_paths(&g2, 0, None).unwrap();
        assert_eq!(dm2.dist[0], 2.5);
    }

    #[test]
    fn direct_arc_beats_detour() {
        // r(0)->a(1)->b(2) and r(0)->b(2): dist(b) = 2 via the direct arc
        let g = graph_from(true, &[0.0, 1.0, 2.0], &[(0, 1), (1, 2), (0, 2)]);
        let dm = node_weighted_shortest_paths(&g, 0, None).unwrap();
        assert_eq!(dm.dist[2], 2.0);
        assert_eq!(dm.pred[2], Some(0));
        assert_eq!(dm.path_to(2).unwrap(), vec![0, 2]);
    }

    #[test]
    fn allowed_set_excludes_nodes() {
        let g = graph_from(true, &[0.0, 1.0, 2.0], &[(0, 1), (1, 2), (0, 2)]);
        let allowed: BTreeSet<usize> = [0, 1].into_iter().collect();
        let dm = node_weighted_shortest_paths(&g, 0, Some(&allowed)).unwrap();
        assert!(dm.dist[2].is_infinite());
        assert_eq!(dm.dist[1], 1.0);
    }

    #[test]
    fn invalid_node_rejected() {
        let g = graph_from(true, &[0.0], &[]);
        assert!(node_weighted_shortest_paths(&g, 3, None).is_err());
    }

    #[test]
    fn dijkstra_matches_path_enumeration_on_random_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(42);
        for _ in 0..300 {
            let n = rng.gen_range(1..=8);
            let mut g = NodeWeightedGraph::new(n, rng.gen_bool(0.5));
            for v in 0..n {
                g.set_cost(v, (rng.gen_range(0..40) as f64) / 4.0).unwrap();
            }
            for u in 0..n {
                for v in 0..n {
                    if u != v && !g.has_arc(u, v) && rng.gen_bool(0.35) {
                        g.add_arc(u, v).unwrap();
                    }
                }
            }
            let dm = node_weighted_shortest_paths(&g, 0, None).unwrap();
            let brute = brute_force_dist(&g, 0, None);
            for v in 0..n {
                if brute[v].is_finite() {
                    assert!((dm.dist[v] - brute[v]).abs() < 1e-9, "dist mismatch at {v}");
                } else {
                    assert!(dm.dist[v].is_infinite());
                }
            }
        }
    }

    #[test]
    fn prune_keeps_nodes_within_bound() {
        // r(0)->a(1), bound 1 keeps both
        let g = graph_from(true, &[0.0, 1.0], &[(0, 1)]);
        let sub = prune_to_b_proper(&g, 1.0).unwrap();
        assert_eq!(sub.graph.node_count(), 2);

        // r(0)->a(5)->b(1), bound 2 keeps the root only
        let g = graph_from(true, &[0.0, 5.0, 1.0], &[(0, 1), (1, 2)]);
        let sub = prune_to_b_proper(&g, 2.0).unwrap();
        assert_eq!(sub.to_parent, vec![0]);

        // bound 0 keeps the root only
        let g = graph_from(true, &[0.0, 1.0, 2.0], &[(0, 1), (1, 2)]);
        let sub = prune_to_b_proper(&g, 0.0).unwrap();
        assert_eq!(sub.to_parent, vec![0]);
    }

    #[test]
    fn prune_below_root_cost_is_infeasible() {
        let g = graph_from(true, &[3.0, 1.0], &[(0, 1)]);
        assert!(matches!(
            prune_to_b_proper(&g, 1.0),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn prune_is_idempotent() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.gen_range(2..=9);
            let mut g = NodeWeightedGraph::new(n, true);
            for v in 1..n {
                g.set_cost(v, rng.gen_range(0..10) as f64).unwrap();
            }
            for u in 0..n {
                for v in 0..n {
                    if u != v && rng.gen_bool(0.3) && !g.has_arc(u, v) {
                        g.add_arc(u, v).unwrap();
                    }
                }
            }
            let bound = rng.gen_range(0..25) as f64;
            let once = prune_to_b_proper(&g, bound).unwrap();
            let twice = prune_to_b_proper(&once.graph, bound).unwrap();
            assert_eq!(once.graph.node_count(), twice.graph.node_count());
        }
    }

    #[test]
    fn arborescence_singleton_and_star() {
        let g = graph_from(true, &[0.0, 1.0, 2.0], &[(0, 1), (0, 2)]);
        let single = build_arborescence(&g, &[0].into_iter().collect()).unwrap();
        assert_eq!(single.cost(), 0.0);
        assert_eq!(single.len(), 1);

        let star = build_arborescence(&g, &[0, 1, 2].into_iter().collect()).unwrap();
        assert_eq!(star.cost(), 3.0);
        assert_eq!(star.parent_of(1), Some(0));
        assert_eq!(star.parent_of(2), Some(0));
        star.validate(&g).unwrap();
    }

    #[test]
    fn arborescence_prefers_cheaper_branch() {
        // diamond r->a->t, r->b->t with c(a) < c(b): t hangs off a
        let g = graph_from(
            true,
            &[0.0, 1.0, 4.0, 0.5],
            &[(0, 1), (0, 2), (1, 3), (2, 3)],
        );
        let tree = build_arborescence(&g, &[0, 1, 2, 3].into_iter().collect()).unwrap();
        assert_eq!(tree.parent_of(3), Some(1));
        tree.validate(&g).unwrap();
    }

    #[test]
    fn arborescence_reports_unreachable_member() {
        let g = graph_from(true, &[0.0, 1.0, 1.0], &[(0, 1)]);
        let err = build_arborescence(&g, &[0, 1, 2].into_iter().collect()).unwrap_err();
        assert_eq!(err, Error::Connectivity { node: 2 });
    }

    #[test]
    fn induced_subgraph_translates_back() {
        let g = graph_from(true, &[0.0, 1.0, 2.0, 3.0], &[(0, 1), (1, 3), (0, 2)]);
        let keep: BTreeSet<usize> = [0, 1, 3].into_iter().collect();
        let sub = g.induce(&keep).unwrap();
        let tree = build_arborescence(&sub.graph, &(0..3).collect()).unwrap();
        let back = tree.translate(&g, &sub.to_parent).unwrap();
        assert_eq!(back.members().len(), 3);
        assert!(back.contains(3));
        back.validate(&g).unwrap();
    }
}
