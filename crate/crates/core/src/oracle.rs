//! Element-level recomputation of submodule arithmetic and purity.
//!
//! Modules are handled through a diagonal presentation `Z/d_1 ⊕ ... ⊕ Z/d_k`
//! with elements encoded in mixed radix. Submodules are explicit bitsets of
//! members. Nothing here touches normal forms or lattice bases except the
//! conversions to and from [`Submodule`].

use std::fmt;

use bitvec::prelude::*;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::module::{ModuleError, ModulePresentation, Submodule, DEFAULT_ELEMENT_BUDGET};
use crate::purity::{Outcome, PurityLevel, Verdict, Witness};
use crate::ring::{Ideal, QuantificationPolicy, Ring};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle needs a diagonal finite presentation")]
    NotDiagonal,
    #[error("module of {cardinality} elements exceeds the oracle budget {budget}")]
    OverBudget { cardinality: u128, budget: usize },
    #[error("element set is not closed under addition")]
    NotClosed,
    #[error("element sets live in different modules")]
    ParentMismatch,
    #[error("policy {0} does not apply to this module")]
    Policy(QuantificationPolicy),
    #[error(transparent)]
    Module(#[from] ModuleError),
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `Z/d_1 ⊕ ... ⊕ Z/d_k` as a finite set of coordinate tuples.
#[derive(Clone, Debug)]
pub struct OracleModule {
    presentation: ModulePresentation,
    orders: Vec<u64>,
    size: usize,
    exponent: u64,
}

impl OracleModule {
    pub fn new(m: &ModulePresentation) -> Result<Self, OracleError> {
        Self::with_budget(m, DEFAULT_ELEMENT_BUDGET)
    }

    /// Reads the orders `d_i` straight off a diagonal relation basis.
    pub fn with_budget(m: &ModulePresentation, budget: usize) -> Result<Self, OracleError> {
        let k = m.rank();
        let rel = m.relations().basis();
        if rel.rows() != k {
            return Err(OracleError::NotDiagonal);
        }
        let mut orders = Vec::with_capacity(k);
        for i in 0..k {
            for j in 0..k {
                if i != j && !rel.get(i, j).is_zero() {
                    return Err(OracleError::NotDiagonal);
                }
            }
            orders.push(rel.get(i, i).abs().to_u64().ok_or(OracleError::NotDiagonal)?);
        }
        let size: u128 = orders.iter().map(|&d| d as u128).product();
        if size > budget as u128 {
            return Err(OracleError::OverBudget {
                cardinality: size,
                budget,
            });
        }
        let exponent = orders.iter().fold(1, |acc, &d| acc / gcd(acc, d) * d);
        Ok(Self {
            presentation: m.clone(),
            orders,
            size: size as usize,
            exponent,
        })
    }

    pub fn presentation(&self) -> &ModulePresentation {
        &self.presentation
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    fn encode(&self, coords: &[u64]) -> usize {
        let mut idx = 0usize;
        for (c, &d) in coords.iter().zip(&self.orders) {
            idx = idx * d as usize + (c % d) as usize;
        }
        idx
    }

    fn decode(&self, mut idx: usize) -> Vec<u64> {
        let mut out = vec![0; self.orders.len()];
        for (slot, &d) in out.iter_mut().zip(&self.orders).rev() {
            *slot = (idx % d as usize) as u64;
            idx /= d as usize;
        }
        out
    }

    fn add(&self, a: usize, b: usize) -> usize {
        let (x, y) = (self.decode(a), self.decode(b));
        let s: Vec<u64> = x.iter().zip(&y).map(|(p, q)| p + q).collect();
        self.encode(&s)
    }

    fn times(&self, t: u64, a: usize) -> usize {
        let x = self.decode(a);
        let s: Vec<u64> = x.iter().zip(&self.orders).map(|(&p, &d)| (p * (t % d)) % d).collect();
        self.encode(&s)
    }

    fn reduce_coord(&self, v: &[BigInt]) -> Vec<u64> {
        v.iter()
            .zip(&self.orders)
            .map(|(c, &d)| {
                let d = BigInt::from(d);
                (((c % &d) + &d) % &d).to_u64().expect("reduced coordinate")
            })
            .collect()
    }

    fn empty(&self) -> BitVec {
        bitvec![0; self.size]
    }

    pub fn zero(&self) -> ElementSet<'_> {
        let mut members = self.empty();
        members.set(0, true);
        ElementSet { parent: self, members }
    }

    pub fn whole(&self) -> ElementSet<'_> {
        ElementSet {
            parent: self,
            members: bitvec![1; self.size],
        }
    }

    /// The subgroup generated by the given coordinate vectors.
    pub fn span(&self, generators: &[Vec<u64>]) -> ElementSet<'_> {
        let gens: Vec<usize> = generators.iter().map(|g| self.encode(g)).collect();
        let mut members = self.empty();
        members.set(0, true);
        let mut stack = vec![0usize];
        while let Some(x) = stack.pop() {
            for &g in &gens {
                let y = self.add(x, g);
                if !members[y] {
                    members.set(y, true);
                    stack.push(y);
                }
            }
        }
        ElementSet { parent: self, members }
    }

    /// Checks closure under addition before accepting a member list.
    pub fn from_members(&self, members: &[Vec<u64>]) -> Result<ElementSet<'_>, OracleError> {
        let mut bits = self.empty();
        for m in members {
            bits.set(self.encode(m), true);
        }
        let set = ElementSet {
            parent: self,
            members: bits,
        };
        if !set.contains_index(0) {
            return Err(OracleError::NotClosed);
        }
        for a in set.indices() {
            for b in set.indices() {
                if !set.contains_index(self.add(a, b)) {
                    return Err(OracleError::NotClosed);
                }
            }
        }
        Ok(set)
    }

    pub fn from_submodule(&self, n: &Submodule) -> Result<ElementSet<'_>, OracleError> {
        if n.parent() != &self.presentation {
            return Err(OracleError::ParentMismatch);
        }
        let gens: Vec<Vec<u64>> = n.lattice().rows().map(|r| self.reduce_coord(r)).collect();
        Ok(self.span(&gens))
    }
}

/// An explicit subgroup of an [`OracleModule`].
#[derive(Clone)]
pub struct ElementSet<'a> {
    parent: &'a OracleModule,
    members: BitVec,
}

impl PartialEq for ElementSet<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.parent, other.parent) && self.members == other.members
    }
}

impl Eq for ElementSet<'_> {}

impl fmt::Debug for ElementSet<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.elements()).finish()
    }
}

impl<'a> ElementSet<'a> {
    pub fn parent(&self) -> &'a OracleModule {
        self.parent
    }

    pub fn len(&self) -> usize {
        self.members.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.members.not_any()
    }

    fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter_ones()
    }

    fn contains_index(&self, i: usize) -> bool {
        self.members[i]
    }

    pub fn contains(&self, coords: &[u64]) -> bool {
        self.contains_index(self.parent.encode(coords))
    }

    pub fn elements(&self) -> Vec<Vec<u64>> {
        self.indices().map(|i| self.parent.decode(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.len() == 1
    }

    pub fn is_whole(&self) -> bool {
        self.members.all()
    }

    pub fn is_subset(&self, other: &ElementSet<'_>) -> bool {
        self.indices().all(|i| other.contains_index(i))
    }

    pub fn to_submodule(&self) -> Result<Submodule, OracleError> {
        let gens: Vec<Vec<BigInt>> = self
            .elements()
            .into_iter()
            .map(|v| v.into_iter().map(BigInt::from).collect())
            .collect();
        Ok(self.parent.presentation.span(gens)?)
    }
}

/// `{t·s : s ∈ S}` for the generator `t` of an ideal.
pub fn oracle_scale_by<'a>(t: u64, s: &ElementSet<'a>) -> ElementSet<'a> {
    let p = s.parent;
    let t = t % p.exponent;
    let mut members = p.empty();
    for i in s.indices() {
        members.set(p.times(t, i), true);
    }
    ElementSet { parent: p, members }
}

pub fn oracle_scale<'a>(ideal: &Ideal, s: &ElementSet<'a>) -> ElementSet<'a> {
    let t = ideal.generator() % BigInt::from(s.parent.exponent);
    oracle_scale_by(t.to_u64().expect("reduced generator"), s)
}

pub fn oracle_intersect<'a>(a: &ElementSet<'a>, b: &ElementSet<'a>) -> ElementSet<'a> {
    let mut members = a.members.clone();
    members &= b.members.as_bitslice();
    ElementSet {
        parent: a.parent,
        members,
    }
}

/// `{x + y : x ∈ A, y ∈ B}`.
pub fn oracle_sum<'a>(a: &ElementSet<'a>, b: &ElementSet<'a>) -> ElementSet<'a> {
    let p = a.parent;
    let mut members = p.empty();
    for x in a.indices() {
        for y in b.indices() {
            members.set(p.add(x, y), true);
        }
    }
    ElementSet { parent: p, members }
}

/// Ideal generators under `policy`, computed without the ring module.
fn oracle_proper_generators(
    ring: Ring,
    policy: QuantificationPolicy,
    module_exponent: u64,
) -> Result<Vec<u64>, OracleError> {
    match (ring, policy) {
        (Ring::Modular(m), QuantificationPolicy::Exhaustive) => {
            let m = m.get();
            Ok((2..=m).filter(|d| m % d == 0).collect())
        }
        (Ring::Integers, QuantificationPolicy::ResidueReduced { exponent }) => {
            if exponent == 0 || exponent % module_exponent != 0 {
                return Err(OracleError::Policy(policy));
            }
            Ok((0..exponent).map(|g| if g == 1 { exponent + 1 } else { g }).collect())
        }
        (Ring::Integers, QuantificationPolicy::Bounded { limit }) if limit >= 2 => {
            Ok(std::iter::once(0).chain(2..=limit).collect())
        }
        _ => Err(OracleError::Policy(policy)),
    }
}

/// Level-`n` purity over ordered tuples of proper ideals, by explicit sets.
pub fn oracle_is_n_pure(
    n: &ElementSet<'_>,
    level: PurityLevel,
    policy: QuantificationPolicy,
) -> Result<Verdict, OracleError> {
    let p = n.parent;
    let ring = p.presentation.ring();
    let gens = oracle_proper_generators(ring, policy, p.exponent)?;
    let whole = p.whole();
    let scaled_n: Vec<ElementSet<'_>> = gens.iter().map(|&g| oracle_scale_by(g, n)).collect();
    let arity = level.get() as usize;
    let mut failure = None;
    if arity == 1 {
        for (i, &g) in gens.iter().enumerate() {
            if scaled_n[i] != oracle_intersect(n, &oracle_scale_by(g, &whole)) {
                failure = Some(vec![g]);
                break;
            }
        }
    } else {
        let mut tuple = vec![0usize; arity];
        'outer: loop {
            let product = tuple.iter().fold(1u64, |acc, &i| {
                ((acc as u128 * (gens[i] % p.exponent) as u128) % p.exponent as u128) as u64
            });
            let lhs = oracle_scale_by(product, n);
            let mut rhs = oracle_scale_by(product, &whole);
            for &i in &tuple {
                rhs = oracle_intersect(&rhs, &scaled_n[i]);
            }
            if lhs != rhs {
                failure = Some(tuple.iter().map(|&i| gens[i]).collect());
                break;
            }
            // odometer over all ordered tuples
            for slot in tuple.iter_mut().rev() {
                *slot += 1;
                if *slot < gens.len() {
                    continue 'outer;
                }
                *slot = 0;
            }
            break;
        }
    }
    Ok(match failure {
        Some(w) => Verdict::fails(Witness::ideals(w.into_iter().map(|g| Ideal::new(ring, g)).collect())),
        None => match policy {
            QuantificationPolicy::Bounded { limit } if !(n.is_zero() || n.is_whole()) => Verdict::unknown(limit),
            _ => Verdict::holds(),
        },
    })
}

/// Compares the two sides of the level-`n` identity at `ideals` by explicit
/// sets; true when they differ.
pub fn oracle_replay(n: &ElementSet<'_>, ideals: &[Ideal]) -> bool {
    let p = n.parent;
    let whole = p.whole();
    let e = BigInt::from(p.exponent);
    let gens: Vec<u64> = ideals
        .iter()
        .map(|i| (i.generator() % &e).to_u64().expect("reduced generator"))
        .collect();
    if gens.len() == 1 {
        return oracle_scale_by(gens[0], n) != oracle_intersect(n, &oracle_scale_by(gens[0], &whole));
    }
    let product = gens
        .iter()
        .fold(1u64, |acc, &g| ((acc as u128 * g as u128) % p.exponent as u128) as u64);
    let mut rhs = oracle_scale_by(product, &whole);
    for &g in &gens {
        rhs = oracle_intersect(&rhs, &oracle_scale_by(g, n));
    }
    oracle_scale_by(product, n) != rhs
}

/// [`oracle_replay`] for `K/N` inside `M/N`, computed with cosets of `N` in
/// `M`; `n ⊆ k` is assumed.
pub fn oracle_replay_quotient(k: &ElementSet<'_>, n: &ElementSet<'_>, ideals: &[Ideal]) -> bool {
    let p = k.parent;
    let whole = p.whole();
    let e = BigInt::from(p.exponent);
    let gens: Vec<u64> = ideals
        .iter()
        .map(|i| (i.generator() % &e).to_u64().expect("reduced generator"))
        .collect();
    let lift = |t: u64, s: &ElementSet<'_>| {
        let scaled = oracle_scale_by(t, s);
        let mut members = oracle_sum(&scaled, n).members;
        members |= n.members.as_bitslice();
        ElementSet { parent: p, members }
    };
    if gens.len() == 1 {
        return lift(gens[0], k) != oracle_intersect(k, &lift(gens[0], &whole));
    }
    let product = gens
        .iter()
        .fold(1u64, |acc, &g| ((acc as u128 * g as u128) % p.exponent as u128) as u64);
    let mut rhs = lift(product, &whole);
    for &g in &gens {
        rhs = oracle_intersect(&rhs, &lift(g, k));
    }
    lift(product, k) != rhs
}

/// Outcome-only comparison helper used by scans.
pub fn outcomes_agree(a: &Verdict, b: &Verdict) -> bool {
    a.outcome() == b.outcome() && (a.outcome() != Outcome::Unknown || a.bound() == b.bound())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enumerate_submodules;
    use crate::purity::is_n_pure;

    fn z(m: u64) -> ModulePresentation {
        ModulePresentation::cyclic(Ring::modular(m).unwrap(), m)
    }

    fn level(n: u32) -> PurityLevel {
        PurityLevel::new(n).unwrap()
    }

    #[test]
    fn scale_example() {
        let m = z(4);
        let o = OracleModule::new(&m).unwrap();
        let n = o.span(&[vec![2]]);
        assert_eq!(n.elements(), vec![vec![0], vec![2]]);
        let two = Ideal::new(m.ring(), 2);
        assert!(oracle_scale(&two, &n).is_zero());
        assert_eq!(oracle_intersect(&n, &n), n);
        assert_eq!(oracle_sum(&o.zero(), &n), n);
    }

    #[test]
    fn three_z12() {
        let m = ModulePresentation::cyclic(Ring::Integers, 12);
        let o = OracleModule::new(&m).unwrap();
        let s = oracle_scale_by(3, &o.whole());
        assert_eq!(s.elements(), vec![vec![0], vec![3], vec![6], vec![9]]);
        let four = oracle_scale_by(4, &o.whole());
        assert!(oracle_intersect(&s, &four).is_zero());
        assert!(oracle_sum(&oracle_scale_by(2, &o.whole()), &s).is_whole());
    }

    #[test]
    fn purity_examples() {
        let ex = QuantificationPolicy::Exhaustive;
        let z4 = z(4);
        let o4 = OracleModule::new(&z4).unwrap();
        let n4 = o4.span(&[vec![2]]);
        assert!(oracle_is_n_pure(&n4, level(2), ex).unwrap().is_holds());
        let pure = oracle_is_n_pure(&n4, level(1), ex).unwrap();
        assert!(pure.is_fails());
        assert!(oracle_replay(&n4, &pure.witness().unwrap().ideals));
        let z8 = z(8);
        let o8 = OracleModule::new(&z8).unwrap();
        let n8 = o8.span(&[vec![2]]);
        assert!(oracle_is_n_pure(&n8, level(2), ex).unwrap().is_fails());
        assert!(oracle_is_n_pure(&n8, level(3), ex).unwrap().is_holds());
        for n in 1..=3 {
            assert!(oracle_is_n_pure(&o8.zero(), level(n), ex).unwrap().is_holds());
        }
    }

    #[test]
    fn round_trip_and_agreement() {
        let ex = QuantificationPolicy::Exhaustive;
        for orders in [vec![12], vec![2, 4], vec![3, 3], vec![2, 2]] {
            let ring = Ring::modular(orders.iter().product::<u64>()).unwrap();
            // over Z/(product) the module Z/a ⊕ Z/b is still diagonal
            let m = ModulePresentation::direct_sum(ring, &orders);
            let o = OracleModule::new(&m).unwrap();
            for s in enumerate_submodules(&m, 1000).unwrap() {
                let set = o.from_submodule(&s).unwrap();
                assert_eq!(set.to_submodule().unwrap(), s);
                for n in 1..=3 {
                    let a = oracle_is_n_pure(&set, level(n), ex).unwrap();
                    let b = is_n_pure(&s, level(n), ex).unwrap();
                    assert_eq!(a.outcome(), b.outcome(), "{m} {s} level {n}");
                }
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let free = ModulePresentation::ring_as_module(Ring::Integers);
        assert_eq!(OracleModule::new(&free).unwrap_err(), OracleError::NotDiagonal);
        let skew =
            ModulePresentation::new(Ring::Integers, 2, &crate::ExactMatrix::from_i64(2, &[&[2, 1], &[0, 4]])).unwrap();
        assert_eq!(OracleModule::new(&skew).unwrap_err(), OracleError::NotDiagonal);
        let big = ModulePresentation::direct_sum(Ring::Integers, &[200, 200]);
        assert!(matches!(OracleModule::new(&big), Err(OracleError::OverBudget { .. })));
        let o = OracleModule::new(&z(4)).unwrap();
        assert_eq!(o.from_members(&[vec![0], vec![1]]).unwrap_err(), OracleError::NotClosed);
        assert_eq!(o.from_members(&[vec![0], vec![2]]).unwrap().len(), 2);
    }
}
