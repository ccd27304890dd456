//! The base rings `Z` and `Z/mZ`, their (principal) ideals, and the policies
//! that turn "for all proper ideals" into a finite list.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u64),
    #[error("ideals live in different rings: {0} and {1}")]
    RingMismatch(Ring, Ring),
    #[error("policy {policy} cannot be used over {ring}")]
    PolicyMismatch { policy: QuantificationPolicy, ring: Ring },
    #[error("bounded policy requires a limit of at least 2, got {0}")]
    InvalidBound(u64),
}

/// A modulus `m >= 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Modulus(u64);

impl Modulus {
    pub fn new(m: u64) -> Result<Self, RingError> {
        if m < 2 {
            return Err(RingError::InvalidModulus(m));
        }
        Ok(Self(m))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ring {
    Integers,
    Modular(Modulus),
}

impl Ring {
    pub fn modular(m: u64) -> Result<Self, RingError> {
        Ok(Ring::Modular(Modulus::new(m)?))
    }

    pub fn modulus(self) -> Option<u64> {
        match self {
            Ring::Integers => None,
            Ring::Modular(m) => Some(m.get()),
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Ring::Modular(_))
    }

    /// Every ideal of the ring, unit ideal included. Only defined for finite rings.
    pub fn all_ideals(self) -> Option<Vec<Ideal>> {
        let m = self.modulus()?;
        Some(divisors(m).into_iter().map(|d| Ideal::new(self, d)).collect())
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Integers => write!(f, "Z"),
            Ring::Modular(m) => write!(f, "Z/{}", m.get()),
        }
    }
}

/// A principal ideal held by its canonical nonnegative generator.
///
/// Over `Z` the ideal is `gZ`. Over `Z/mZ` the generator divides `m`: `g = m`
/// is the zero ideal and `g = 1` the whole ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ideal {
    ring: Ring,
    generator: BigInt,
}

impl Ideal {
    pub fn new(ring: Ring, generator: impl Into<BigInt>) -> Self {
        let g: BigInt = generator.into();
        let generator = match ring {
            Ring::Integers => g.abs(),
            Ring::Modular(m) => g.gcd(&BigInt::from(m.get())),
        };
        Self { ring, generator }
    }

    /// Ideal generated by a finite set of elements.
    pub fn generated_by<I, T>(ring: Ring, gens: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        let g = gens.into_iter().fold(BigInt::zero(), |acc, x| acc.gcd(&x.into()));
        Self::new(ring, g)
    }

    pub fn zero(ring: Ring) -> Self {
        Self::new(ring, 0)
    }

    pub fn unit(ring: Ring) -> Self {
        Self::new(ring, 1)
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn generator(&self) -> &BigInt {
        &self.generator
    }

    pub fn is_zero(&self) -> bool {
        match self.ring {
            Ring::Integers => self.generator.is_zero(),
            Ring::Modular(m) => self.generator == BigInt::from(m.get()),
        }
    }

    pub fn is_proper(&self) -> bool {
        !self.generator.is_one()
    }

    pub fn product(&self, other: &Ideal) -> Result<Ideal, RingError> {
        if self.ring != other.ring {
            return Err(RingError::RingMismatch(self.ring, other.ring));
        }
        Ok(Ideal::new(self.ring, &self.generator * &other.generator))
    }

    /// Whether `self ⊆ other`.
    pub fn is_contained_in(&self, other: &Ideal) -> bool {
        if other.generator.is_zero() {
            return self.generator.is_zero();
        }
        self.generator.is_multiple_of(&other.generator)
    }

    /// Re-canonicalizes; the identity on any value built through [`Ideal::new`].
    pub fn canonical(&self) -> Ideal {
        Ideal::new(self.ring, self.generator.clone())
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "(0)")
        } else {
            write!(f, "({})", self.generator)
        }
    }
}

/// How "for every proper ideal" is materialized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QuantificationPolicy {
    /// Every proper ideal of a finite ring.
    Exhaustive,
    /// Ring `Z` acting on a finite module whose exponent divides `exponent`:
    /// the action of `rZ` depends only on `r mod exponent`, so one proper
    /// ideal per residue class is an exact stand-in for all of them.
    ResidueReduced { exponent: u64 },
    /// Ring `Z` acting on an infinite module: the ideals `(0), (2), ..., (limit)`.
    /// Predicates never report `Holds` from such a scan alone.
    Bounded { limit: u64 },
}

impl fmt::Display for QuantificationPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuantificationPolicy::Exhaustive => write!(f, "exhaustive"),
            QuantificationPolicy::ResidueReduced { exponent } => write!(f, "residue:{exponent}"),
            QuantificationPolicy::Bounded { limit } => write!(f, "bounded:{limit}"),
        }
    }
}

/// Materializes the proper ideals quantified over by `policy`.
///
/// Under `ResidueReduced { exponent: e }` the residue class of `1` is
/// represented by the proper ideal `(e + 1)`, every other residue `g` by `(g)`.
pub fn proper_ideals(ring: Ring, policy: QuantificationPolicy) -> Result<Vec<Ideal>, RingError> {
    match (ring, policy) {
        (Ring::Modular(m), QuantificationPolicy::Exhaustive) => {
            let m = m.get();
            // nontrivial divisors ascending, then the zero ideal
            Ok(divisors(m)
                .into_iter()
                .filter(|&d| d != 1)
                .map(|d| Ideal::new(ring, d))
                .collect())
        }
        (Ring::Integers, QuantificationPolicy::ResidueReduced { exponent }) => {
            if exponent == 0 {
                return Err(RingError::PolicyMismatch { policy, ring });
            }
            Ok((0..exponent)
                .map(|g| {
                    let rep = if g == 1 { exponent + 1 } else { g };
                    Ideal::new(ring, rep)
                })
                .collect())
        }
        (Ring::Integers, QuantificationPolicy::Bounded { limit }) => {
            if limit < 2 {
                return Err(RingError::InvalidBound(limit));
            }
            Ok(std::iter::once(0)
                .chain(2..=limit)
                .map(|g| Ideal::new(ring, g))
                .collect())
        }
        _ => Err(RingError::PolicyMismatch { policy, ring }),
    }
}

/// Ring elements a policy ranges over when quantifying over elements rather
/// than ideals (Ribenboim purity, absorbing conditions).
pub fn ring_elements(ring: Ring, policy: QuantificationPolicy) -> Result<Vec<BigInt>, RingError> {
    match (ring, policy) {
        (Ring::Modular(m), QuantificationPolicy::Exhaustive) => Ok((0..m.get()).map(BigInt::from).collect()),
        (Ring::Integers, QuantificationPolicy::ResidueReduced { exponent }) if exponent > 0 => {
            Ok((0..exponent).map(BigInt::from).collect())
        }
        (Ring::Integers, QuantificationPolicy::Bounded { limit }) => {
            if limit < 2 {
                return Err(RingError::InvalidBound(limit));
            }
            Ok((0..=limit).map(BigInt::from).collect())
        }
        _ => Err(RingError::PolicyMismatch { policy, ring }),
    }
}

/// Positive divisors of `n`, ascending. Trial division; moduli are small.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// `(p, e)` pairs of the prime factorization of a positive integer.
pub fn factorize(n: &BigInt) -> Vec<(u64, u32)> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p: u64 = 2;
    while BigInt::from(p) * BigInt::from(p) <= n {
        let bp = BigInt::from(p);
        let mut e = 0;
        while n.is_multiple_of(&bp) {
            n /= &bp;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > BigInt::one() {
        out.push((n.to_u64().expect("prime factor beyond u64"), 1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z(m: u64) -> Ring {
        Ring::modular(m).unwrap()
    }

    #[test]
    fn ideal_product_examples() {
        let r4 = z(4);
        assert!(Ideal::new(r4, 2).product(&Ideal::new(r4, 2)).unwrap().is_zero());
        let r12 = z(12);
        assert_eq!(
            Ideal::new(r12, 2).product(&Ideal::new(r12, 3)).unwrap(),
            Ideal::new(r12, 6)
        );
        let zero = Ideal::zero(Ring::Integers);
        assert!(zero.product(&Ideal::new(Ring::Integers, 7)).unwrap().is_zero());
        assert!(Ideal::new(r4, 2).product(&Ideal::new(r12, 2)).is_err());
    }

    #[test]
    fn properness() {
        assert!(!Ideal::unit(Ring::Integers).is_proper());
        assert!(Ideal::new(z(4), 2).is_proper());
        assert!(!Ideal::new(z(4), 5).is_proper());
        assert!(Ideal::zero(z(4)).is_proper());
        assert_eq!(Ideal::new(z(4), 0).generator(), &BigInt::from(4));
        assert_eq!(Ideal::new(Ring::Integers, -6).generator(), &BigInt::from(6));
    }

    #[test]
    fn proper_ideal_lists() {
        let twelve: Vec<BigInt> = proper_ideals(z(12), QuantificationPolicy::Exhaustive)
            .unwrap()
            .into_iter()
            .map(|i| i.generator().clone())
            .collect();
        assert_eq!(twelve, [2, 3, 4, 6, 12].map(BigInt::from).to_vec());
        let field = proper_ideals(z(7), QuantificationPolicy::Exhaustive).unwrap();
        assert_eq!(field.len(), 1);
        assert!(field[0].is_zero());
        let bounded = proper_ideals(Ring::Integers, QuantificationPolicy::Bounded { limit: 4 }).unwrap();
        assert_eq!(
            bounded.iter().map(|i| i.generator().clone()).collect::<Vec<_>>(),
            [0, 2, 3, 4].map(BigInt::from).to_vec()
        );
        let residue = proper_ideals(Ring::Integers, QuantificationPolicy::ResidueReduced { exponent: 4 }).unwrap();
        assert_eq!(
            residue.iter().map(|i| i.generator().clone()).collect::<Vec<_>>(),
            [0, 5, 2, 3].map(BigInt::from).to_vec()
        );
        assert!(residue.iter().all(Ideal::is_proper));
    }

    #[test]
    fn policy_ring_mismatches_are_errors() {
        assert!(proper_ideals(Ring::Integers, QuantificationPolicy::Exhaustive).is_err());
        assert!(proper_ideals(z(6), QuantificationPolicy::Bounded { limit: 5 }).is_err());
        assert!(proper_ideals(Ring::Integers, QuantificationPolicy::Bounded { limit: 1 }).is_err());
        assert!(Ring::modular(1).is_err());
    }

    #[test]
    fn factorization_and_divisors() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(factorize(&BigInt::from(360)), vec![(2, 3), (3, 2), (5, 1)]);
        assert!(is_prime(61) && !is_prime(63) && !is_prime(1));
    }

    proptest! {
        #[test]
        fn ideal_count_is_divisor_count(m in 2u64..200) {
            let all = z(m).all_ideals().unwrap();
            let proper = proper_ideals(z(m), QuantificationPolicy::Exhaustive).unwrap();
            prop_assert_eq!(all.len(), divisors(m).len());
            prop_assert_eq!(proper.len(), all.len() - 1);
        }

        #[test]
        fn product_laws(m in 2u64..120, a in 0i64..240, b in 0i64..240, c in 0i64..240) {
            let r = z(m);
            let (ia, ib, ic) = (Ideal::new(r, a), Ideal::new(r, b), Ideal::new(r, c));
            prop_assert_eq!(ia.product(&ib).unwrap(), ib.product(&ia).unwrap());
            prop_assert_eq!(
                ia.product(&ib).unwrap().product(&ic).unwrap(),
                ia.product(&ib.product(&ic).unwrap()).unwrap()
            );
            let p = ia.product(&ib).unwrap();
            prop_assert!(p.is_contained_in(&ia) && p.is_contained_in(&ib));
            if ia.is_proper() && ib.is_proper() {
                prop_assert!(p.is_proper());
            }
            prop_assert_eq!(ia.canonical(), ia);
        }
    }
}
