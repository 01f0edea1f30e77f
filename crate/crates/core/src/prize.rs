//! Monotone submodular prize oracles and the tight-capacity (water-filling)
//! construction that certifies LP upper bounds for submodular instances.

use std::collections::{BTreeMap, BTreeSet};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::graph::RootedTree;
use crate::{Error, Result};

/// Largest node set an explicit-table oracle or the exhaustive subset
/// machinery accepts.
pub const SUBSET_SCAN_LIMIT: usize = 16;

/// A monotone non-decreasing submodular set function with `p(∅) = 0`.
///
/// Additive oracles sum per-node prizes; coverage oracles sum the weights of
/// the elements covered by a set; table oracles look up an explicit
/// `2^n`-entry table (small n only).
#[derive(Debug, Clone)]
pub enum PrizeOracle {
    Additive {
        prizes: Vec<f64>,
    },
    Coverage {
        covers: Vec<BTreeSet<usize>>,
        weights: BTreeMap<usize, f64>,
    },
    Table {
        node_count: usize,
        values: Vec<f64>,
    },
}

impl PrizeOracle {
    pub fn additive(prizes: Vec<f64>) -> Self {
        PrizeOracle::Additive { prizes }
    }

    /// `covers[v]` is the element set of node `v`; element weights default
    /// to 1 when absent from `weights`.
    pub fn coverage(covers: Vec<BTreeSet<usize>>, weights: BTreeMap<usize, f64>) -> Self {
        PrizeOracle::Coverage { covers, weights }
    }

    pub fn table(node_count: usize, values: Vec<f64>) -> Result<Self> {
        if node_count > SUBSET_SCAN_LIMIT {
            return Err(Error::SizeLimit(format!(
                "table oracle supports at most {SUBSET_SCAN_LIMIT} nodes, got {node_count}"
            )));
        }
        if values.len() != 1usize << node_count {
            return Err(Error::InvalidInput("table oracle needs 2^n values".into()));
        }
        Ok(PrizeOracle::Table { node_count, values })
    }

    pub fn node_count(&self) -> usize {
        match self {
            PrizeOracle::Additive { prizes } => prizes.len(),
            PrizeOracle::Coverage { covers, .. } => covers.len(),
            PrizeOracle::Table { node_count, .. } => *node_count,
        }
    }

    pub fn eval(&self, set: &BTreeSet<usize>) -> f64 {
        match self {
            PrizeOracle::Additive { prizes } => set.iter().map(|&v| prizes[v]).sum(),
            PrizeOracle::Coverage { covers, weights } => {
                let mut covered = BTreeSet::new();
                for &v in set {
                    covered.extend(covers[v].iter().copied());
                }
                covered
                    .iter()
                    .map(|e| weights.get(e).copied().unwrap_or(1.0))
                    .sum()
            }
            PrizeOracle::Table { values, .. } => {
                let mut mask = 0usize;
                for &v in set {
                    mask |= 1 << v;
                }
                values[mask]
            }
        }
    }

    pub fn singleton(&self, v: usize) -> f64 {
        let mut s = BTreeSet::new();
        s.insert(v);
        self.eval(&s)
    }

    /// Singleton prizes for all nodes, the `p_v` coefficients of the LPs.
    /// Cached once per instance by callers; oracle calls are treated as
    /// expensive.
    pub fn singletons(&self) -> Vec<f64> {
        (0..self.node_count()).map(|v| self.singleton(v)).collect()
    }

    /// The oracle restricted to a node subset; `to_parent[new] = old` maps
    /// dense subset ids back to this oracle's ids. Needed after pruning a
    /// graph, which renumbers nodes.
    pub fn restrict(&self, to_parent: &[usize]) -> Result<PrizeOracle> {
        match self {
            PrizeOracle::Additive { prizes } => Ok(PrizeOracle::Additive {
                prizes: to_parent.iter().map(|&v| prizes[v]).collect(),
            }),
            PrizeOracle::Coverage { covers, weights } => Ok(PrizeOracle::Coverage {
                covers: to_parent.iter().map(|&v| covers[v].clone()).collect(),
                weights: weights.clone(),
            }),
            PrizeOracle::Table { .. } => {
                let k = to_parent.len();
                if k > SUBSET_SCAN_LIMIT {
                    return Err(Error::SizeLimit("restricted table too large".into()));
                }
                let mut values = vec![0.0; 1usize << k];
                for (mask, slot) in values.iter_mut().enumerate() {
                    let set: BTreeSet<usize> = (0..k)
                        .filter(|i| mask >> i & 1 == 1)
                        .map(|i| to_parent[i])
                        .collect();
                    *slot = self.eval(&set);
                }
                PrizeOracle::table(k, values)
            }
        }
    }

    /// Spot-checks monotonicity and the diminishing-returns inequality on
    /// random `(S, a, b)` triples. Used where the oracle contract must hold
    /// before building constraints on top of it.
    pub fn spot_check(&self, samples: usize, seed: u64) -> Result<()> {
        let n = self.node_count();
        if n == 0 {
            return Ok(());
        }
        if (self.eval(&BTreeSet::new())).abs() > 1e-12 {
            return Err(Error::ContractViolation("oracle has p(empty) != 0".into()));
        }
        let mut rng = StdRng::seed_from_u64(seed);
        for _ in 0..samples {
            let mut s = BTreeSet::new();
            for v in 0..n {
                if rng.gen_bool(0.4) {
                    s.insert(v);
                }
            }
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            let mut sa = s.clone();
            sa.insert(a);
            if self.eval(&sa) < self.eval(&s) - 1e-9 {
                return Err(Error::ContractViolation(format!(
                    "oracle is not monotone at node {a}"
                )));
            }
            if a != b && !s.contains(&a) && !s.contains(&b) {
                let mut sb = s.clone();
                sb.insert(b);
                let mut sab = sa.clone();
                sab.insert(b);
                let lhs = self.eval(&sa) - self.eval(&s);
                let rhs = self.eval(&sab) - self.eval(&sb);
                if lhs < rhs - 1e-9 {
                    return Err(Error::ContractViolation(format!(
                        "oracle is not submodular at nodes {a}, {b}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Water-filling over the members of `tree`: starting from `x ≡ 1/n`
/// (n = member count), raise each variable in ascending node id to the
/// largest value keeping every constraint `Σ_{v∈S} x_v p_v ≤ p(S)` intact.
/// The result makes the constraint for the full member set tight, which is
/// what turns a feasible tree into a certificate for the submodular LPs.
///
/// Nodes with `p_v = 0` are skipped and keep their starting value. Member
/// count is capped at [`SUBSET_SCAN_LIMIT`] because every subset is scanned.
pub fn construct_tight_capacities(
    tree: &RootedTree,
    oracle: &PrizeOracle,
) -> Result<BTreeMap<usize, f64>> {
    let members: Vec<usize> = tree.members().iter().copied().collect();
    let k = members.len();
    if k > SUBSET_SCAN_LIMIT {
        return Err(Error::SizeLimit(format!(
            "tight-capacity construction supports at most {SUBSET_SCAN_LIMIT} members, got {k}"
        )));
    }
    let p: Vec<f64> = members.iter().map(|&v| oracle.singleton(v)).collect();
    // p(S) for every subset of the members, indexed by bitmask
    let mut pset = vec![0.0; 1usize << k];
    for mask in 1..(1usize << k) {
        let set: BTreeSet<usize> = (0..k)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| members[i])
            .collect();
        pset[mask] = oracle.eval(&set);
    }
    let mut x = vec![1.0 / k as f64; k];
    for i in 0..k {
        if p[i] <= 0.0 {
            continue;
        }
        // headroom of the tightest constraint through member i
        let mut raise = 1.0 - x[i];
        for mask in 0..(1usize << k) {
            if mask >> i & 1 == 0 {
                continue;
            }
            let lhs: f64 = (0..k)
                .filter(|j| mask >> j & 1 == 1)
                .map(|j| x[j] * p[j])
                .sum();
            let slack = (pset[mask] - lhs) / p[i];
            if slack < raise {
                raise = slack;
            }
        }
        x[i] += raise.max(0.0);
    }
    // the full-set constraint must now be tight
    let full = (1usize << k) - 1;
    let lhs: f64 = (0..k).map(|j| x[j] * p[j]).sum();
    if (lhs - pset[full]).abs() > 1e-9 * (1.0 + pset[full].abs()) {
        return Err(Error::ContractViolation(format!(
            "full-set constraint not tight after water filling: {lhs} vs {}",
            pset[full]
        )));
    }
    Ok(members.into_iter().zip(x).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_arborescence, NodeWeightedGraph};

    fn chain_tree(n: usize) -> (NodeWeightedGraph, RootedTree) {
        let mut g = NodeWeightedGraph::new(n, false);
        for v in 1..n {
            g.add_arc(v - 1, v).unwrap();
        }
        let tree = build_arborescence(&g, &(0..n).collect()).unwrap();
        (g, tree)
    }

    #[test]
    fn additive_eval() {
        let o = PrizeOracle::additive(vec![2.0, 3.0]);
        assert_eq!(o.eval(&[0, 1].into_iter().collect()), 5.0);
        assert_eq!(o.eval(&BTreeSet::new()), 0.0);
    }

    #[test]
    fn coverage_overlap_counts_once() {
        let covers = vec![[7].into_iter().collect(), [7].into_iter().collect()];
        let o = PrizeOracle::coverage(covers, BTreeMap::new());
        assert_eq!(o.eval(&[0, 1].into_iter().collect()), 1.0);
        assert_eq!(o.singleton(0), 1.0);
    }

    #[test]
    fn oracles_pass_spot_check() {
        PrizeOracle::additive(vec![1.0, 2.0, 0.0])
            .spot_check(200, 1)
            .unwrap();
        let covers = vec![
            [0, 1].into_iter().collect(),
            [1, 2].into_iter().collect(),
            [3].into_iter().collect(),
        ];
        PrizeOracle::coverage(covers, BTreeMap::new())
            .spot_check(200, 2)
            .unwrap();
    }

    #[test]
    fn non_submodular_table_fails_spot_check() {
        // p({0}) = p({1}) = 0 but p({0,1}) = 1 violates subadditivity
        let o = PrizeOracle::table(2, vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(o.spot_check(200, 3).is_err());
    }

    #[test]
    fn water_filling_additive_saturates() {
        let (_, tree) = chain_tree(3);
        let o = PrizeOracle::additive(vec![1.0, 2.0, 3.0]);
        let x = construct_tight_capacities(&tree, &o).unwrap();
        for (_, v) in x {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn water_filling_shared_element_splits() {
        // two nodes covering the same unit element start at 1/2 each and the
        // pair constraint is already tight, so nothing moves
        let (_, tree) = chain_tree(2);
        let covers = vec![[9].into_iter().collect(), [9].into_iter().collect()];
        let o = PrizeOracle::coverage(covers, BTreeMap::new());
        let x = construct_tight_capacities(&tree, &o).unwrap();
        assert!((x[&0] - 0.5).abs() < 1e-12);
        assert!((x[&1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn water_filling_single_node() {
        let (_, tree) = chain_tree(1);
        let o = PrizeOracle::additive(vec![4.0]);
        let x = construct_tight_capacities(&tree, &o).unwrap();
        assert!((x[&0] - 1.0).abs() < 1e-12);
        let zero = PrizeOracle::additive(vec![0.0]);
        let x0 = construct_tight_capacities(&tree, &zero).unwrap();
        assert!((x0[&0] - 1.0).abs() < 1e-12);
    }
}
