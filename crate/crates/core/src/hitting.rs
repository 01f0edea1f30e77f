//! Greedy hitting set with the `(M/R)·ln N` size guarantee.

use std::collections::BTreeSet;

use crate::{Error, Result};

/// A family of nonempty subsets over a universe of element ids.
#[derive(Debug, Clone)]
pub struct SetFamily {
    universe: BTreeSet<usize>,
    sets: Vec<BTreeSet<usize>>,
}

impl SetFamily {
    /// The universe is the union of the given sets. Empty sets are rejected.
    pub fn new(sets: Vec<BTreeSet<usize>>) -> Result<Self> {
        let mut universe = BTreeSet::new();
        for (i, s) in sets.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::InvalidInput(format!(
                    "set {i} in the family is empty"
                )));
            }
            universe.extend(s.iter().copied());
        }
        Ok(SetFamily { universe, sets })
    }

    pub fn universe_size(&self) -> usize {
        self.universe.len()
    }

    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }

    /// Smallest set size, the `R` in the size bound.
    pub fn min_set_size(&self) -> usize {
        self.sets.iter().map(|s| s.len()).min().unwrap_or(0)
    }

    pub fn sets(&self) -> &[BTreeSet<usize>] {
        &self.sets
    }
}

/// Greedy counter algorithm: each round picks the element contained in the
/// most not-yet-hit sets (ties to the smallest id) until every set is hit.
/// For `N >= 2` sets of size at least `R` over `M` elements the output has at
/// most `ceil((M/R)·ln N)` elements; a single-set family costs one element.
///
/// Counters are recomputed from scratch each round; the families here are
/// small and the recount keeps the code auditable.
pub fn greedy_hitting_set(family: &SetFamily) -> BTreeSet<usize> {
    let mut chosen = BTreeSet::new();
    let mut unhit: Vec<&BTreeSet<usize>> = family.sets.iter().collect();
    while !unhit.is_empty() {
        let mut best: Option<(usize, usize)> = None; // (count, element)
        for &e in &family.universe {
            let count = unhit.iter().filter(|s| s.contains(&e)).count();
            if count == 0 {
                continue;
            }
            best = match best {
                Some((bc, be)) if bc >= count => Some((bc, be)),
                _ => Some((count, e)),
            };
        }
        let (_, e) = best.expect("nonempty unhit sets always have a candidate");
        chosen.insert(e);
        unhit.retain(|s| !s.contains(&e));
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(sets: &[&[usize]]) -> SetFamily {
        SetFamily::new(sets.iter().map(|s| s.iter().copied().collect()).collect()).unwrap()
    }

    #[test]
    fn shared_element_hits_everything() {
        let f = fam(&[&[1, 2], &[2, 3], &[2]]);
        let hit = greedy_hitting_set(&f);
        assert_eq!(hit, [2].into_iter().collect());
    }

    #[test]
    fn single_set_takes_lowest_id() {
        let f = fam(&[&[5, 7]]);
        assert_eq!(greedy_hitting_set(&f), [5].into_iter().collect());
    }

    #[test]
    fn disjoint_sets_need_one_pick_each() {
        let f = fam(&[&[1], &[2], &[3]]);
        let hit = greedy_hitting_set(&f);
        assert_eq!(hit, [1, 2, 3].into_iter().collect());
        // (M/R)·ln N = 3·ln 3 ≈ 3.30 covers the 3 picks
        let bound =
            (f.universe_size() as f64 / f.min_set_size() as f64) * (f.num_sets() as f64).ln();
        assert!(hit.len() as f64 <= bound);
    }

    #[test]
    fn empty_family_is_empty_set() {
        let f = SetFamily::new(Vec::new()).unwrap();
        assert!(greedy_hitting_set(&f).is_empty());
    }

    #[test]
    fn empty_member_set_rejected() {
        assert!(SetFamily::new(vec![BTreeSet::new()]).is_err());
    }

    #[test]
    fn deterministic_on_repeat() {
        let f = fam(&[&[1, 4, 9], &[4, 6], &[2, 9, 6], &[1, 2]]);
        let a = greedy_hitting_set(&f);
        let b = greedy_hitting_set(&f);
        assert_eq!(a, b);
    }
}
