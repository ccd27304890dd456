//! Exhaustive submodule enumeration for finite modules.

use std::collections::BTreeSet;

use crate::module::{ModuleError, ModulePresentation, Submodule};

/// Every submodule of a finite module exactly once, in canonical-basis order.
///
/// Starts from the cyclic submodules `<x>` and closes under sums, so any
/// submodule (a finite sum of cyclic ones) is reached.
pub fn enumerate_submodules(m: &ModulePresentation, budget: usize) -> Result<Vec<Submodule>, ModuleError> {
    let elements = m.elements(budget)?;
    let mut cyclic: BTreeSet<Submodule> = BTreeSet::new();
    for x in &elements {
        cyclic.insert(m.span([x.coords().to_vec()])?);
    }
    let cyclic: Vec<Submodule> = cyclic.into_iter().collect();
    let mut seen: BTreeSet<Submodule> = cyclic.iter().cloned().collect();
    let mut frontier: Vec<Submodule> = cyclic.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for s in &frontier {
            for c in &cyclic {
                if c.is_contained_in(s)? {
                    continue;
                }
                let t = s.sum(c)?;
                if !seen.contains(&t) {
                    seen.insert(t.clone());
                    next.push(t);
                }
            }
        }
        frontier = next;
    }
    Ok(seen.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::DEFAULT_ELEMENT_BUDGET;
    use crate::ring::{divisors, is_prime, Ring};

    fn count(orders: &[u64]) -> usize {
        let m = ModulePresentation::direct_sum(Ring::Integers, orders);
        enumerate_submodules(&m, DEFAULT_ELEMENT_BUDGET).unwrap().len()
    }

    #[test]
    fn small_counts() {
        assert_eq!(count(&[4]), 3);
        assert_eq!(count(&[2, 2]), 5);
        assert_eq!(count(&[12]), 6);
        assert_eq!(count(&[1]), 1);
    }

    #[test]
    fn cyclic_counts_match_divisors() {
        for m in 2..=64 {
            assert_eq!(count(&[m]), divisors(m).len(), "Z/{m}");
        }
    }

    #[test]
    fn elementary_abelian_rank_two_has_p_plus_three() {
        for p in (2..=11).filter(|&p| is_prime(p)) {
            assert_eq!(count(&[p, p]), p as usize + 3, "Z/{p} ⊕ Z/{p}");
        }
    }

    #[test]
    fn output_is_sorted_and_distinct() {
        let m = ModulePresentation::direct_sum(Ring::Integers, &[2, 4]);
        let subs = enumerate_submodules(&m, 100).unwrap();
        assert!(subs.windows(2).all(|w| w[0] < w[1]));
        // subgroup count of Z/2 ⊕ Z/4
        assert_eq!(subs.len(), 8);
    }

    #[test]
    fn refuses_infinite_and_oversized_modules() {
        let free = ModulePresentation::ring_as_module(Ring::Integers);
        assert!(enumerate_submodules(&free, 100).is_err());
        let big = ModulePresentation::direct_sum(Ring::Integers, &[100, 100]);
        assert!(enumerate_submodules(&big, 1000).is_err());
    }
}
