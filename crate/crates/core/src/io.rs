//! Instance and solution file formats, the random instance generator, and
//! the command-line surface (`solve`, `oracle`, `verify`, `gen`, `bench`,
//! `lp-dump`).
//!
//! Instance files are line-based UTF-8 with `#` comments and
//! whitespace-separated fields:
//!
//! ```text
//! steiner-instance v1
//! problem <dst|bdrat|qdrat|burst|qurst>
//! directed <true|false>
//! nodes <n>
//! v <id> <cost> <prize>          # one per node, ids declared here
//! a <u> <v>                      # directed arc (undirected files use `e`)
//! root <id>
//! budget <x> | quota <x>         # exactly one, per the problem kind
//! terminal <id>                  # dst only, zero or more
//! cover <id> <elem> ...          # submodular kinds; absent => additive
//! weight <elem> <w>              # element weight, defaults to 1
//! epsilon <x>                    # optional, default 0.5
//! ```
//!
//! Solution files list `status`, `cost`, `prize`, one `node <id>` per member
//! and one `arc <parent> <child>` per tree edge. `verify` recomputes
//! everything from scratch and exits nonzero on any mismatch.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::directed::{solve_bdrat, solve_dst, solve_qdrat, SolveReport};
use crate::exact::{exact_optimum, ExactProblem, ExactResult};
use crate::flow::{build_const_drat, build_const_urst, build_lp_dst, BuildObjective, VarKind};
use crate::graph::{NodeWeightedGraph, RootedTree};
use crate::prize::PrizeOracle;
use crate::simplex::{LpModel, Relation, Sense};
use crate::undirected::{solve_burst, solve_qurst};
use crate::{Error, Result};

pub const DEFAULT_EPSILON: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    Dst,
    BDrat,
    QDrat,
    BUrst,
    QUrst,
}

impl InstanceKind {
    pub fn tag(&self) -> &'static str {
        match self {
            InstanceKind::Dst => "dst",
            InstanceKind::BDrat => "bdrat",
            InstanceKind::QDrat => "qdrat",
            InstanceKind::BUrst => "burst",
            InstanceKind::QUrst => "qurst",
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        Ok(match tag {
            "dst" => InstanceKind::Dst,
            "bdrat" => InstanceKind::BDrat,
            "qdrat" => InstanceKind::QDrat,
            "burst" => InstanceKind::BUrst,
            "qurst" => InstanceKind::QUrst,
            _ => return Err(Error::InvalidInput(format!("unknown problem kind `{tag}`"))),
        })
    }

    pub fn directed(&self) -> bool {
        matches!(
            self,
            InstanceKind::Dst | InstanceKind::BDrat | InstanceKind::QDrat
        )
    }

    pub fn takes_budget(&self) -> bool {
        matches!(self, InstanceKind::BDrat | InstanceKind::BUrst)
    }

    pub fn takes_quota(&self) -> bool {
        matches!(self, InstanceKind::QDrat | InstanceKind::QUrst)
    }

    pub fn submodular(&self) -> bool {
        matches!(self, InstanceKind::BUrst | InstanceKind::QUrst)
    }
}

/// A parsed instance: the graph in dense ids plus all problem parameters.
/// Original node labels are kept for output.
#[derive(Debug, Clone)]
pub struct Instance {
    pub kind: InstanceKind,
    pub graph: NodeWeightedGraph,
    pub labels: Vec<u64>,
    pub terminals: BTreeSet<usize>,
    pub budget: Option<f64>,
    pub quota: Option<f64>,
    pub epsilon: f64,
    /// per-node element sets for coverage prizes; `None` means additive
    pub covers: Option<Vec<BTreeSet<usize>>>,
    pub weights: BTreeMap<usize, f64>,
}

impl Instance {
    pub fn oracle(&self) -> PrizeOracle {
        match &self.covers {
            Some(covers) => PrizeOracle::coverage(covers.clone(), self.weights.clone()),
            None => PrizeOracle::additive(self.graph.prizes().to_vec()),
        }
    }

    pub fn dense_of(&self, label: u64) -> Result<usize> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .ok_or_else(|| Error::InvalidInput(format!("unknown node id {label}")))
    }
}

/// 9-significant-digit scientific notation, the canonical real format.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.8e}")
}

fn parse_real(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| Error::InvalidInput(format!("line {line}: `{tok}` is not a number")))
}

fn parse_int(tok: &str, line: usize) -> Result<u64> {
    tok.parse::<u64>()
        .map_err(|_| Error::InvalidInput(format!("line {line}: `{tok}` is not an integer")))
}

/// Parses the instance format. Every malformed record reports its line
/// number; references to undeclared node ids and duplicate arcs are errors.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut kind: Option<InstanceKind> = None;
    let mut directed: Option<bool> = None;
    let mut node_count: Option<usize> = None;
    let mut labels: Vec<u64> = Vec::new();
    let mut by_label: BTreeMap<u64, usize> = BTreeMap::new();
    let mut costs: Vec<f64> = Vec::new();
    let mut prizes: Vec<f64> = Vec::new();
    let mut arcs: Vec<(usize, usize)> = Vec::new();
    let mut root: Option<usize> = None;
    let mut budget: Option<f64> = None;
    let mut quota: Option<f64> = None;
    let mut epsilon: Option<f64> = None;
    let mut terminals: BTreeSet<usize> = BTreeSet::new();
    let mut covers: Option<BTreeMap<usize, BTreeSet<usize>>> = None;
    let mut weights: BTreeMap<usize, f64> = BTreeMap::new();
    let mut saw_header = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if !saw_header {
            if toks != ["steiner-instance", "v1"] {
                return Err(Error::InvalidInput(format!(
                    "line {line_no}: expected header `steiner-instance v1`"
                )));
            }
            saw_header = true;
            continue;
        }
        let need = |n: usize| -> Result<()> {
            if toks.len() != n {
                return Err(Error::InvalidInput(format!(
                    "line {line_no}: `{}` record expects {} fields",
                    toks[0],
                    n - 1
                )));
            }
            Ok(())
        };
        let resolve = |tok: &str| -> Result<usize> {
            let label = parse_int(tok, line_no)?;
            by_label.get(&label).copied().ok_or_else(|| {
                Error::InvalidInput(format!(
                    "line {line_no}: node id {label} used before declaration"
                ))
            })
        };
        match toks[0] {
            "problem" => {
                need(2)?;
                kind = Some(InstanceKind::from_tag(toks[1])?);
            }
            "directed" => {
                need(2)?;
                directed = Some(match toks[1] {
                    "true" => true,
                    "false" => false,
                    other => {
                        return Err(Error::InvalidInput(format!(
                            "line {line_no}: directed must be true/false, got `{other}`"
                        )))
                    }
                });
            }
            "nodes" => {
                need(2)?;
                node_count = Some(parse_int(toks[1], line_no)? as usize);
            }
            "v" => {
                need(4)?;
                let n = node_count.ok_or_else(|| {
                    Error::InvalidInput(format!("line {line_no}: `v` before `nodes`"))
                })?;
                let label = parse_int(toks[1], line_no)?;
                if by_label.contains_key(&label) {
                    return Err(Error::InvalidInput(format!(
                        "line {line_no}: duplicate node id {label}"
                    )));
                }
                if labels.len() == n {
                    return Err(Error::InvalidInput(format!(
                        "line {line_no}: more than {n} node records"
                    )));
                }
                by_label.insert(label, labels.len());
                labels.push(label);
                costs.push(parse_real(toks[2], line_no)?);
                prizes.push(parse_real(toks[3], line_no)?);
            }
            "a" | "e" => {
                need(3)?;
                let dir = directed.ok_or_else(|| {
                    Error::InvalidInput(format!("line {line_no}: arc before `directed`"))
                })?;
                if (toks[0] == "a") != dir {
                    return Err(Error::InvalidInput(format!(
                        "line {line_no}: `{}` record does not match directedness",
                        toks[0]
                    )));
                }
                let u = resolve(toks[1])?;
                let v = resolve(toks[2])?;
                arcs.push((u, v));
            }
            "root" => {
                need(2)?;
                root = Some(resolve(toks[1])?);
            }
            "budget" => {
                need(2)?;
                if budget.is_some() {
                    return Err(Error::InvalidInput(format!(
                        "line {line_no}: duplicate budget"
                    )));
                }
                budget = Some(parse_real(toks[1], line_no)?);
            }
            "quota" => {
                need(2)?;
                if quota.is_some() {
                    return Err(Error::InvalidInput(format!(
                        "line {line_no}: duplicate quota"
                    )));
                }
                quota = Some(parse_real(toks[1], line_no)?);
            }
            "terminal" => {
                need(2)?;
                terminals.insert(resolve(toks[1])?);
            }
            "cover" => {
                if toks.len() < 2 {
                    return Err(Error::InvalidInput(format!(
                        "line {line_no}: `cover` needs a node id"
                    )));
                }
                let v = resolve(toks[1])?;
                let mut set = BTreeSet::new();
                for tok in &toks[2..] {
                    set.insert(parse_int(tok, line_no)? as usize);
                }
                let map = covers.get_or_insert_with(BTreeMap::new);
                if map.insert(v, set).is_some() {
                    return Err(Error::InvalidInput(format!(
                        "line {line_no}: duplicate cover for node {}",
                        toks[1]
                    )));
                }
            }
            "weight" => {
                need(3)?;
                let e = parse_int(toks[1], line_no)? as usize;
                weights.insert(e, parse_real(toks[2], line_no)?);
            }
            "epsilon" => {
                need(2)?;
                epsilon = Some(parse_real(toks[1], line_no)?);
            }
            other => {
                return Err(Error::InvalidInput(format!(
                    "line {line_no}: unknown record tag `{other}`"
                )));
            }
        }
    }
    if !saw_header {
        return Err(Error::InvalidInput("empty instance file".into()));
    }
    let kind = kind.ok_or_else(|| Error::InvalidInput("missing `problem` record".into()))?;
    let directed =
        directed.ok_or_else(|| Error::InvalidInput("missing `directed` record".into()))?;
    if directed != kind.directed() {
        return Err(Error::InvalidInput(format!(
            "problem {} requires directed {}",
            kind.tag(),
            kind.directed()
        )));
    }
    let n = node_count.ok_or_else(|| Error::InvalidInput("missing `nodes` record".into()))?;
    if labels.len() != n {
        return Err(Error::InvalidInput(format!(
            "expected {n} node records, found {}",
            labels.len()
        )));
    }
    let root = root.ok_or_else(|| Error::InvalidInput("missing `root` record".into()))?;
    if kind.takes_budget() && (budget.is_none() || quota.is_some()) {
        return Err(Error::InvalidInput(format!(
            "problem {} needs a budget and no quota",
            kind.tag()
        )));
    }
    if kind.takes_quota() && (quota.is_none() || budget.is_some()) {
        return Err(Error::InvalidInput(format!(
            "problem {} needs a quota and no budget",
            kind.tag()
        )));
    }
    if kind == InstanceKind::Dst && (budget.is_some() || quota.is_some()) {
        return Err(Error::InvalidInput(
            "dst instances take neither budget nor quota".into(),
        ));
    }
    if !terminals.is_empty() && kind != InstanceKind::Dst {
        return Err(Error::InvalidInput("terminal records are dst-only".into()));
    }
    if covers.is_some() && !kind.submodular() {
        return Err(Error::InvalidInput(
            "cover records need a submodular problem kind".into(),
        ));
    }
    let mut graph = NodeWeightedGraph::new(n, directed);
    for v in 0..n {
        graph.set_cost(v, costs[v])?;
        graph.set_prize(v, prizes[v])?;
    }
    for &(u, v) in &arcs {
        // undirected files list each edge once
        graph.add_arc(u, v)?;
    }
    graph.set_root(root)?;
    graph.validate()?;
    let covers = covers.map(|map| {
        (0..n)
            .map(|v| map.get(&v).cloned().unwrap_or_default())
            .collect::<Vec<_>>()
    });
    let mut instance = Instance {
        kind,
        graph,
        labels,
        terminals,
        budget,
        quota,
        epsilon: epsilon.unwrap_or(DEFAULT_EPSILON),
        covers,
        weights,
    };
    if instance.kind.submodular() {
        if let Some(covers) = &instance.covers {
            // graph prizes mirror the singleton coverage prizes
            let oracle = PrizeOracle::coverage(covers.clone(), instance.weights.clone());
            for v in 0..n {
                instance.graph.set_prize(v, oracle.singleton(v))?;
            }
        }
    }
    Ok(instance)
}

/// Canonical text form; `parse_instance` of the output reproduces the
/// instance exactly.
pub fn emit_instance(inst: &Instance) -> String {
    let mut out = String::new();
    let g = &inst.graph;
    out.push_str("steiner-instance v1\n");
    let _ = writeln!(out, "problem {}", inst.kind.tag());
    let _ = writeln!(out, "directed {}", g.is_directed());
    let _ = writeln!(out, "nodes {}", g.node_count());
    for v in 0..g.node_count() {
        let _ = writeln!(
            out,
            "v {} {} {}",
            inst.labels[v],
            fmt_real(g.cost(v)),
            fmt_real(g.prize(v))
        );
    }
    for (u, v) in g.arcs() {
        if g.is_directed() {
            let _ = writeln!(out, "a {} {}", inst.labels[u], inst.labels[v]);
        } else if u < v {
            let _ = writeln!(out, "e {} {}", inst.labels[u], inst.labels[v]);
        }
    }
    let _ = writeln!(out, "root {}", inst.labels[g.root()]);
    if let Some(b) = inst.budget {
        let _ = writeln!(out, "budget {}", fmt_real(b));
    }
    if let Some(q) = inst.quota {
        let _ = writeln!(out, "quota {}", fmt_real(q));
    }
    for &t in &inst.terminals {
        let _ = writeln!(out, "terminal {}", inst.labels[t]);
    }
    if let Some(covers) = &inst.covers {
        for (v, set) in covers.iter().enumerate() {
            if set.is_empty() {
                continue;
            }
            let elems: Vec<String> = set.iter().map(|e| e.to_string()).collect();
            let _ = writeln!(out, "cover {} {}", inst.labels[v], elems.join(" "));
        }
        for (&e, &w) in &inst.weights {
            let _ = writeln!(out, "weight {e} {}", fmt_real(w));
        }
    }
    let _ = writeln!(out, "epsilon {}", fmt_real(inst.epsilon));
    out
}

/// A solution in file form, in original node labels.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionFile {
    pub feasible: bool,
    pub cost: f64,
    pub prize: f64,
    pub nodes: Vec<u64>,
    pub arcs: Vec<(u64, u64)>,
}

impl SolutionFile {
    pub fn from_report(inst: &Instance, report: &SolveReport) -> SolutionFile {
        let tree = &report.tree;
        SolutionFile {
            feasible: true,
            cost: tree.cost(),
            prize: report.prize,
            nodes: tree.members().iter().map(|&v| inst.labels[v]).collect(),
            arcs: tree
                .arcs()
                .map(|(p, c)| (inst.labels[p], inst.labels[c]))
                .collect(),
        }
    }

    pub fn emit(&self) -> String {
        let mut out = String::new();
        out.push_str("solution v1\n");
        let _ = writeln!(
            out,
            "status {}",
            if self.feasible { "ok" } else { "infeasible" }
        );
        let _ = writeln!(out, "cost {}", fmt_real(self.cost));
        let _ = writeln!(out, "prize {}", fmt_real(self.prize));
        for &v in &self.nodes {
            let _ = writeln!(out, "node {v}");
        }
        for &(p, c) in &self.arcs {
            let _ = writeln!(out, "arc {p} {c}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<SolutionFile> {
        let mut feasible = None;
        let mut cost = None;
        let mut prize = None;
        let mut nodes = Vec::new();
        let mut arcs = Vec::new();
        let mut saw_header = false;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.is_empty() {
                continue;
            }
            if !saw_header {
                if toks != ["solution", "v1"] {
                    return Err(Error::InvalidInput(format!(
                        "line {line_no}: expected header `solution v1`"
                    )));
                }
                saw_header = true;
                continue;
            }
            match toks[0] {
                "status" if toks.len() == 2 => feasible = Some(toks[1] == "ok"),
                "cost" if toks.len() == 2 => cost = Some(parse_real(toks[1], line_no)?),
                "prize" if toks.len() == 2 => prize = Some(parse_real(toks[1], line_no)?),
                "node" if toks.len() == 2 => nodes.push(parse_int(toks[1], line_no)?),
                "arc" if toks.len() == 3 => {
                    arcs.push((parse_int(toks[1], line_no)?, parse_int(toks[2], line_no)?))
                }
                other => {
                    return Err(Error::InvalidInput(format!(
                        "line {line_no}: bad solution record `{other}`"
                    )))
                }
            }
        }
        Ok(SolutionFile {
            feasible: feasible
                .ok_or_else(|| Error::InvalidInput("solution missing `status`".into()))?,
            cost: cost.ok_or_else(|| Error::InvalidInput("solution missing `cost`".into()))?,
            prize: prize.ok_or_else(|| Error::InvalidInput("solution missing `prize`".into()))?,
            nodes,
            arcs,
        })
    }
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Reproducible random instance. The root is node 0 with cost 0, the root
/// reaches at least half the nodes (arcs re-rolled otherwise), and budget or
/// quota are drawn to make the instance nontrivial: roughly 30% of the total
/// cost and 40% of the total prize.
pub fn gen_random(
    kind: InstanceKind,
    n: usize,
    arc_density: f64,
    cost_range: (f64, f64),
    seed: u64,
) -> Result<Instance> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "instance needs at least one node".into(),
        ));
    }
    if !(arc_density > 0.0 && arc_density <= 1.0) {
        return Err(Error::InvalidInput("arc density must be in (0, 1]".into()));
    }
    if !(cost_range.0 >= 0.0 && cost_range.0 <= cost_range.1) {
        return Err(Error::InvalidInput("bad cost range".into()));
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let directed = kind.directed();
    let mut graph = NodeWeightedGraph::new(n, directed);
    for v in 1..n {
        graph.set_cost(v, round2(rng.gen_range(cost_range.0..=cost_range.1)))?;
        graph.set_prize(v, round2(rng.gen_range(0.0..=10.0)))?;
    }
    let mut tries = 0;
    loop {
        tries += 1;
        if tries > 200 {
            return Err(Error::InvalidInput(format!(
                "generation with seed {seed} never connected half the nodes"
            )));
        }
        let mut attempt = graph.clone();
        if directed {
            for u in 0..n {
                for v in 0..n {
                    if u != v && rng.gen_bool(arc_density) {
                        attempt.add_arc(u, v)?;
                    }
                }
            }
        } else {
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.gen_bool(arc_density) {
                        attempt.add_arc(u, v)?;
                    }
                }
            }
        }
        if attempt.reachable_from(0).len() * 2 >= n {
            graph = attempt;
            break;
        }
    }
    let reach = graph.reachable_from(0);
    let mut covers = None;
    let mut weights = BTreeMap::new();
    if kind.submodular() {
        let elems = n.max(2);
        let mut c: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for set in c.iter_mut().skip(1) {
            let k = rng.gen_range(0..=3usize);
            for _ in 0..k {
                set.insert(rng.gen_range(0..elems));
            }
        }
        for e in 0..elems {
            weights.insert(e, round2(rng.gen_range(0.5..=2.0)));
        }
        let oracle = PrizeOracle::coverage(c.clone(), weights.clone());
        for v in 0..n {
            graph.set_prize(v, oracle.singleton(v))?;
        }
        covers = Some(c);
    }
    let total_cost: f64 = graph.total_cost();
    let total_prize = match &covers {
        Some(c) => {
            let oracle = PrizeOracle::coverage(c.clone(), weights.clone());
            oracle.eval(&reach)
        }
        None => reach.iter().map(|&v| graph.prize(v)).sum(),
    };
    let mut terminals = BTreeSet::new();
    let mut budget = None;
    let mut quota = None;
    match kind {
        InstanceKind::Dst => {
            let reach_vec: Vec<usize> = reach.iter().copied().collect();
            let want = reach_vec.len().div_ceil(3).max(1);
            while terminals.len() < want {
                terminals.insert(reach_vec[rng.gen_range(0..reach_vec.len())]);
            }
        }
        InstanceKind::BDrat | InstanceKind::BUrst => {
            budget = Some(round2(0.3 * total_cost));
        }
        InstanceKind::QDrat | InstanceKind::QUrst => {
            quota = Some(round2(0.4 * total_prize));
        }
    }
    Ok(Instance {
        kind,
        graph,
        labels: (0..n as u64).collect(),
        terminals,
        budget,
        quota,
        epsilon: DEFAULT_EPSILON,
        covers,
        weights,
    })
}

/// Dispatches an instance to its pipeline.
pub fn solve_instance(inst: &Instance, epsilon_override: Option<f64>) -> Result<SolveReport> {
    let eps = epsilon_override.unwrap_or(inst.epsilon);
    match inst.kind {
        InstanceKind::Dst => solve_dst(&inst.graph, &inst.terminals, eps),
        InstanceKind::BDrat => solve_bdrat(&inst.graph, inst.budget.unwrap(), eps),
        InstanceKind::QDrat => solve_qdrat(&inst.graph, inst.quota.unwrap(), eps),
        InstanceKind::BUrst => solve_burst(&inst.graph, &inst.oracle(), inst.budget.unwrap(), eps),
        InstanceKind::QUrst => solve_qurst(&inst.graph, &inst.oracle(), inst.quota.unwrap(), eps),
    }
}

/// The exact problem matching an instance kind.
pub fn exact_problem(inst: &Instance) -> ExactProblem {
    match inst.kind {
        InstanceKind::Dst => ExactProblem::SteinerSpan {
            terminals: inst.terminals.clone(),
        },
        InstanceKind::BDrat | InstanceKind::BUrst => ExactProblem::Budget {
            budget: inst.budget.unwrap(),
        },
        InstanceKind::QDrat | InstanceKind::QUrst => ExactProblem::Quota {
            quota: inst.quota.unwrap(),
        },
    }
}

pub fn exact_for_instance(inst: &Instance) -> Result<ExactResult> {
    let oracle = if inst.kind.submodular() {
        Some(inst.oracle())
    } else {
        None
    };
    exact_optimum(&inst.graph, &exact_problem(inst), oracle.as_ref())
}

/// Rebuilds and revalidates a solution against its instance from scratch:
/// tree structure, recomputed cost and prize, and the problem constraint at
/// the guaranteed level (budget within `(1+ε)B`, quota within the bicriteria
/// floor, terminals spanned).
pub fn verify_solution(inst: &Instance, sol: &SolutionFile) -> Result<()> {
    if !sol.feasible {
        return Err(Error::ContractViolation(
            "solution is marked infeasible".into(),
        ));
    }
    let mut parent = BTreeMap::new();
    for &(p, c) in &sol.arcs {
        let p = inst.dense_of(p)?;
        let c = inst.dense_of(c)?;
        if parent.insert(c, p).is_some() {
            return Err(Error::ContractViolation(
                "node has two parents in the solution".into(),
            ));
        }
    }
    let tree = RootedTree::from_parent_map(&inst.graph, inst.graph.root(), parent)
        .map_err(|e| Error::ContractViolation(format!("solution is not a valid tree: {e}")))?;
    let stated: BTreeSet<usize> = sol
        .nodes
        .iter()
        .map(|&l| inst.dense_of(l))
        .collect::<Result<_>>()?;
    if &stated != tree.members() {
        return Err(Error::ContractViolation(
            "solution node list does not match its arcs".into(),
        ));
    }
    let tol = 1e-6;
    if (tree.cost() - sol.cost).abs() > tol * (1.0 + sol.cost.abs()) {
        return Err(Error::ContractViolation(format!(
            "stated cost {} but recomputed {}",
            sol.cost,
            tree.cost()
        )));
    }
    let prize = match inst.kind.submodular() {
        true => inst.oracle().eval(tree.members()),
        false => tree.prize_additive(),
    };
    if (prize - sol.prize).abs() > tol * (1.0 + sol.prize.abs()) {
        return Err(Error::ContractViolation(format!(
            "stated prize {} but recomputed {prize}",
            sol.prize
        )));
    }
    match inst.kind {
        InstanceKind::Dst => {
            for &t in &inst.terminals {
                if !tree.contains(t) {
                    return Err(Error::ContractViolation(format!(
                        "solution misses terminal {}",
                        inst.labels[t]
                    )));
                }
            }
        }
        InstanceKind::BDrat | InstanceKind::BUrst => {
            let b = inst.budget.unwrap();
            let cap = (1.0 + inst.epsilon) * b;
            if tree.cost() > cap + tol * (1.0 + cap) {
                return Err(Error::ContractViolation(format!(
                    "cost {} exceeds the allowed (1+eps)B = {cap}",
                    tree.cost()
                )));
            }
        }
        InstanceKind::QDrat => {
            let q = inst.quota.unwrap();
            if prize < q / 2.0 - tol * (1.0 + q) {
                return Err(Error::ContractViolation(format!(
                    "prize {prize} is below the guaranteed Q/2 = {}",
                    q / 2.0
                )));
            }
        }
        InstanceKind::QUrst => {
            let q = inst.quota.unwrap();
            let floor = q / (2.0 * (inst.graph.node_count() as f64).sqrt());
            if prize < floor - tol * (1.0 + q) {
                return Err(Error::ContractViolation(format!(
                    "prize {prize} is below the guaranteed Q/(2*sqrt(n)) = {floor}"
                )));
            }
        }
    }
    Ok(())
}

/// Plain-text dump of the LP a kind induces, with named columns.
pub fn lp_dump(inst: &Instance) -> Result<String> {
    let bundle = match inst.kind {
        InstanceKind::Dst => build_lp_dst(&inst.graph, &inst.terminals)?,
        InstanceKind::BDrat => {
            build_const_drat(&inst.graph, inst.budget, None, BuildObjective::MaxPrize)?
        }
        InstanceKind::QDrat => {
            build_const_drat(&inst.graph, None, inst.quota, BuildObjective::MinCost)?
        }
        InstanceKind::BUrst | InstanceKind::QUrst => {
            let oracle = inst.oracle();
            let singles: Vec<BTreeSet<usize>> = (0..inst.graph.node_count())
                .map(|v| [v].into_iter().collect())
                .collect();
            let (b, q, obj) = if inst.kind == InstanceKind::BUrst {
                (inst.budget, None, BuildObjective::MaxPrize)
            } else {
                (None, inst.quota, BuildObjective::MinCost)
            };
            build_const_urst(&inst.graph, &oracle, b, q, obj, &singles)?
        }
    };
    let name = |col: usize| -> String {
        match bundle.index.kind(col) {
            VarKind::Capacity { node } => format!("x{}", inst.labels[node]),
            VarKind::Flow {
                commodity,
                from,
                to,
            } => {
                format!(
                    "f{}_{}_{}",
                    inst.labels[commodity], inst.labels[from], inst.labels[to]
                )
            }
        }
    };
    let render = |coeffs: &[f64]| -> String {
        let mut parts = Vec::new();
        for (col, &c) in coeffs.iter().enumerate() {
            if c != 0.0 {
                parts.push(format!("{} {}", fmt_real(c), name(col)));
            }
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    };
    let model: &LpModel = &bundle.model;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# lp dump: {} | {} variables, {} rows",
        inst.kind.tag(),
        model.num_vars(),
        model.num_rows()
    );
    out.push_str(match model.sense {
        Sense::Maximize => "maximize\n",
        Sense::Minimize => "minimize\n",
    });
    let _ = writeln!(out, "obj: {}", render(&model.objective));
    out.push_str("subject to\n");
    for (i, row) in model.rows().iter().enumerate() {
        let rel = match row.relation {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        };
        let _ = writeln!(
            out,
            "r{i}: {} {rel} {}",
            render(&row.coeffs),
            fmt_real(row.rhs)
        );
    }
    out.push_str("bounds\n");
    for (col, &(lo, hi)) in model.bounds().iter().enumerate() {
        let _ = writeln!(out, "{} <= {} <= {}", fmt_real(lo), name(col), fmt_real(hi));
    }
    Ok(out)
}

/// One CSV row of a benchmark run.
#[derive(Debug, Clone)]
pub struct BenchRecord {
    pub instance: String,
    pub algorithm: String,
    pub n: usize,
    pub cost: f64,
    pub prize: f64,
    pub opt_cost: Option<f64>,
    pub opt_prize: Option<f64>,
    pub budget_violation: f64,
    pub quota_fraction: f64,
    pub lp_bound: Option<f64>,
    pub runtime_ms: u64,
    pub seed: Option<u64>,
}

pub const BENCH_CSV_HEADER: &str =
    "instance,algorithm,n,cost,prize,opt_cost,opt_prize,budget_violation,quota_fraction,lp_bound,runtime_ms,seed";

impl BenchRecord {
    pub fn csv_row(&self) -> String {
        let opt = |x: &Option<f64>| x.map(fmt_real).unwrap_or_default();
        let seed = self.seed.map(|s| s.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.instance,
            self.algorithm,
            self.n,
            fmt_real(self.cost),
            fmt_real(self.prize),
            opt(&self.opt_cost),
            opt(&self.opt_prize),
            fmt_real(self.budget_violation),
            fmt_real(self.quota_fraction),
            opt(&self.lp_bound),
            self.runtime_ms,
            seed
        )
    }
}

/// Solves one parsed instance and assembles its benchmark row.
pub fn bench_one(
    inst: &Instance,
    name: &str,
    with_oracle: bool,
    seed: Option<u64>,
) -> Result<BenchRecord> {
    let started = Instant::now();
    let report = solve_instance(inst, None)?;
    let runtime_ms = started.elapsed().as_millis() as u64;
    let (mut opt_cost, mut opt_prize) = (None, None);
    if with_oracle {
        let exact = exact_for_instance(inst)?;
        match inst.kind {
            InstanceKind::BDrat | InstanceKind::BUrst => opt_prize = Some(exact.best_value),
            _ => {
                if exact.best_set.is_some() {
                    opt_cost = Some(exact.best_value);
                }
            }
        }
    }
    Ok(BenchRecord {
        instance: name.to_string(),
        algorithm: inst.kind.tag().to_string(),
        n: inst.graph.node_count(),
        cost: report.tree.cost(),
        prize: report.prize,
        opt_cost,
        opt_prize,
        budget_violation: report.budget_violation(),
        quota_fraction: report.quota_fraction(),
        lp_bound: report.lp_bound,
        runtime_ms,
        seed,
    })
}

fn seed_from_name(name: &str) -> Option<u64> {
    let stem = name.strip_suffix(".steiner").unwrap_or(name);
    let pos = stem.rfind("_s")?;
    stem[pos + 2..].parse().ok()
}

fn read_file(path: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))
}

fn write_file(path: &str, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(|e| Error::Io(format!("{path}: {e}")))
}

const USAGE: &str = "usage:
  nwsteiner solve <instance> [--epsilon <e>] [--out <file>]
  nwsteiner oracle <instance>
  nwsteiner verify <instance> <solution>
  nwsteiner gen <kind> --n <n> --seed <s> [--density <d>] [--cost-min <a>]
            [--cost-max <b>] [--out <file>]
  nwsteiner bench <dir> --csv <out.csv> [--with-oracle]
  nwsteiner lp-dump <instance> --out <model.lp>";

fn take_flag(args: &mut Vec<String>, flag: &str) -> bool {
    if let Some(pos) = args.iter().position(|a| a == flag) {
        args.remove(pos);
        true
    } else {
        false
    }
}

fn take_opt(args: &mut Vec<String>, flag: &str) -> Result<Option<String>> {
    if let Some(pos) = args.iter().position(|a| a == flag) {
        if pos + 1 >= args.len() {
            return Err(Error::InvalidInput(format!("{flag} needs a value")));
        }
        let value = args.remove(pos + 1);
        args.remove(pos);
        Ok(Some(value))
    } else {
        Ok(None)
    }
}

fn run(args: &[String]) -> Result<()> {
    let mut args: Vec<String> = args.to_vec();
    if args.is_empty() {
        return Err(Error::InvalidInput(USAGE.into()));
    }
    let command = args.remove(0);
    match command.as_str() {
        "solve" => {
            let epsilon = take_opt(&mut args, "--epsilon")?
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|_| Error::InvalidInput("bad --epsilon value".into()))
                })
                .transpose()?;
            let out = take_opt(&mut args, "--out")?;
            let [path] = args.as_slice() else {
                return Err(Error::InvalidInput(USAGE.into()));
            };
            let inst = parse_instance(&read_file(path)?)?;
            let report = solve_instance(&inst, epsilon)?;
            let sol = SolutionFile::from_report(&inst, &report);
            let text = sol.emit();
            match out {
                Some(path) => {
                    write_file(&path, &text)?;
                    println!(
                        "solved {}: cost {} prize {} ({} ms)",
                        inst.kind.tag(),
                        fmt_real(sol.cost),
                        fmt_real(sol.prize),
                        report.wallclock_ms
                    );
                }
                None => print!("{text}"),
            }
            Ok(())
        }
        "oracle" => {
            let [path] = args.as_slice() else {
                return Err(Error::InvalidInput(USAGE.into()));
            };
            let inst = parse_instance(&read_file(path)?)?;
            let exact = exact_for_instance(&inst)?;
            match &exact.best_set {
                None => println!("infeasible (enumerated {})", exact.enumerated),
                Some(set) => {
                    let labels: Vec<String> =
                        set.iter().map(|&v| inst.labels[v].to_string()).collect();
                    println!(
                        "optimum {} over {{{}}} (enumerated {})",
                        fmt_real(exact.best_value),
                        labels.join(" "),
                        exact.enumerated
                    );
                }
            }
            Ok(())
        }
        "verify" => {
            let [inst_path, sol_path] = args.as_slice() else {
                return Err(Error::InvalidInput(USAGE.into()));
            };
            let inst = parse_instance(&read_file(inst_path)?)?;
            let sol = SolutionFile::parse(&read_file(sol_path)?)?;
            verify_solution(&inst, &sol)?;
            println!("ok");
            Ok(())
        }
        "gen" => {
            let n = take_opt(&mut args, "--n")?
                .ok_or_else(|| Error::InvalidInput("gen needs --n".into()))?
                .parse::<usize>()
                .map_err(|_| Error::InvalidInput("bad --n value".into()))?;
            let seed = take_opt(&mut args, "--seed")?
                .ok_or_else(|| Error::InvalidInput("gen needs --seed".into()))?
                .parse::<u64>()
                .map_err(|_| Error::InvalidInput("bad --seed value".into()))?;
            let density = take_opt(&mut args, "--density")?
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|_| Error::InvalidInput("bad --density".into()))
                })
                .transpose()?
                .unwrap_or(0.4);
            let cost_min = take_opt(&mut args, "--cost-min")?
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|_| Error::InvalidInput("bad --cost-min".into()))
                })
                .transpose()?
                .unwrap_or(0.5);
            let cost_max = take_opt(&mut args, "--cost-max")?
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|_| Error::InvalidInput("bad --cost-max".into()))
                })
                .transpose()?
                .unwrap_or(10.0);
            let out = take_opt(&mut args, "--out")?;
            let [kind] = args.as_slice() else {
                return Err(Error::InvalidInput(USAGE.into()));
            };
            let kind = InstanceKind::from_tag(kind)?;
            let inst = gen_random(kind, n, density, (cost_min, cost_max), seed)?;
            let text = emit_instance(&inst);
            let path = out.unwrap_or_else(|| format!("{}_n{}_s{}.steiner", kind.tag(), n, seed));
            write_file(&path, &text)?;
            println!("wrote {path}");
            Ok(())
        }
        "bench" => {
            let csv = take_opt(&mut args, "--csv")?
                .ok_or_else(|| Error::InvalidInput("bench needs --csv".into()))?;
            let with_oracle = take_flag(&mut args, "--with-oracle");
            let [dir] = args.as_slice() else {
                return Err(Error::InvalidInput(USAGE.into()));
            };
            let mut files: Vec<String> = std::fs::read_dir(dir)
                .map_err(|e| Error::Io(format!("{dir}: {e}")))?
                .filter_map(|entry| entry.ok())
                .map(|entry| entry.path())
                .filter(|p| p.extension().map_or(false, |e| e == "steiner"))
                .map(|p| p.to_string_lossy().into_owned())
                .collect();
            files.sort();
            if files.is_empty() {
                return Err(Error::InvalidInput(format!(
                    "no .steiner files under {dir}"
                )));
            }
            let mut rows = vec![BENCH_CSV_HEADER.to_string()];
            for path in &files {
                let name = Path::new(path)
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| path.clone());
                let inst = parse_instance(&read_file(path)?)?;
                let seed = seed_from_name(&format!("{name}.steiner"));
                let record = bench_one(&inst, &name, with_oracle, seed)?;
                rows.push(record.csv_row());
            }
            write_file(&csv, &(rows.join("\n") + "\n"))?;
            println!("wrote {} rows to {csv}", rows.len() - 1);
            Ok(())
        }
        "lp-dump" => {
            let out = take_opt(&mut args, "--out")?
                .ok_or_else(|| Error::InvalidInput("lp-dump needs --out".into()))?;
            let [path] = args.as_slice() else {
                return Err(Error::InvalidInput(USAGE.into()));
            };
            let inst = parse_instance(&read_file(path)?)?;
            write_file(&out, &lp_dump(&inst)?)?;
            println!("wrote {out}");
            Ok(())
        }
        _ => Err(Error::InvalidInput(USAGE.into())),
    }
}

/// CLI entry point. Exit codes: 0 success, 1 usage/input error, 2
/// infeasible, 3 numerical failure, 4 contract or verification failure.
pub fn run_command(args: &[String]) -> i32 {
    match run(args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_dst_instance_parses() {
        let text = "steiner-instance v1\nproblem dst\ndirected true\nnodes 1\nv 0 0.0 0.0\nroot 0\nterminal 0\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.kind, InstanceKind::Dst);
        assert_eq!(inst.terminals, [0].into_iter().collect());
        assert_eq!(inst.epsilon, DEFAULT_EPSILON);
    }

    #[test]
    fn budget_and_quota_together_rejected() {
        let text = "steiner-instance v1\nproblem bdrat\ndirected true\nnodes 1\nv 0 0.0 0.0\nroot 0\nbudget 1.0\nquota 1.0\n";
        assert!(parse_instance(text).is_err());
    }

    #[test]
    fn undeclared_node_rejected() {
        let text =
            "steiner-instance v1\nproblem dst\ndirected true\nnodes 1\nv 0 0.0 0.0\na 0 3\nroot 0\n";
        let err = parse_instance(text).unwrap_err();
        assert!(format!("{err}").contains("line 6"));
    }

    #[test]
    fn duplicate_arc_rejected() {
        let text = "steiner-instance v1\nproblem dst\ndirected true\nnodes 2\nv 0 0.0 0.0\nv 1 1.0 0.0\na 0 1\na 0 1\nroot 0\n";
        assert!(parse_instance(text).is_err());
    }

    #[test]
    fn unknown_tag_rejected() {
        let text = "steiner-instance v1\nproblem dst\ndirected true\nnodes 1\nv 0 0.0 0.0\nroot 0\nwhatever 3\n";
        assert!(parse_instance(text).is_err());
    }

    #[test]
    fn generated_instances_round_trip() {
        for (kind, seed) in [
            (InstanceKind::Dst, 11),
            (InstanceKind::BDrat, 12),
            (InstanceKind::QDrat, 13),
            (InstanceKind::BUrst, 14),
            (InstanceKind::QUrst, 15),
        ] {
            let inst = gen_random(kind, 7, 0.5, (0.5, 5.0), seed).unwrap();
            let text = emit_instance(&inst);
            let back = parse_instance(&text).unwrap();
            assert_eq!(text, emit_instance(&back), "canonical form must be stable");
            assert_eq!(inst.graph.node_count(), back.graph.node_count());
            assert_eq!(inst.budget, back.budget);
            assert_eq!(inst.quota, back.quota);
            assert_eq!(inst.terminals, back.terminals);
            assert_eq!(inst.covers, back.covers);
            let arcs_a: Vec<_> = inst.graph.arcs().collect();
            let arcs_b: Vec<_> = back.graph.arcs().collect();
            assert_eq!(arcs_a, arcs_b);
        }
    }

    #[test]
    fn generator_is_deterministic() {
        let a = emit_instance(&gen_random(InstanceKind::BDrat, 9, 0.4, (0.5, 10.0), 77).unwrap());
        let b = emit_instance(&gen_random(InstanceKind::BDrat, 9, 0.4, (0.5, 10.0), 77).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn full_density_directed_is_complete() {
        let inst = gen_random(InstanceKind::BDrat, 5, 1.0, (1.0, 2.0), 3).unwrap();
        assert_eq!(inst.graph.arcs().count(), 5 * 4);
    }

    #[test]
    fn single_node_instance_is_trivially_solvable() {
        let inst = gen_random(InstanceKind::QDrat, 1, 1.0, (0.5, 1.0), 5).unwrap();
        let report = solve_instance(&inst, None).unwrap();
        assert_eq!(report.tree.len(), 1);
    }

    #[test]
    fn verify_accepts_solver_output_and_rejects_tampering() {
        let inst = gen_random(InstanceKind::BDrat, 8, 0.5, (0.5, 5.0), 21).unwrap();
        let report = solve_instance(&inst, None).unwrap();
        let sol = SolutionFile::from_report(&inst, &report);
        verify_solution(&inst, &sol).unwrap();
        let mut bad = sol.clone();
        bad.cost += 1.0;
        assert!(verify_solution(&inst, &bad).is_err());
    }

    #[test]
    fn solution_round_trip() {
        let inst = gen_random(InstanceKind::QDrat, 6, 0.6, (0.5, 5.0), 9).unwrap();
        let report = solve_instance(&inst, None).unwrap();
        let sol = SolutionFile::from_report(&inst, &report);
        let back = SolutionFile::parse(&sol.emit()).unwrap();
        assert_eq!(sol, back);
    }
}
