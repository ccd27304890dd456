//! Finitely generated modules as cokernels `Z^k / L_rel`, and their submodules
//! as intermediate lattices `L_rel ⊆ L_N ⊆ Z^k`.
//!
//! A `Z/mZ`-module is carried as the `Z`-presentation with the rows `m·e_i`
//! adjoined; the ring tag only changes which ideals are quantified over.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::lattice::{snf, LatticeBasis, LatticeError};
use crate::matrix::ExactMatrix;
use crate::ring::{is_prime, Ideal, Ring, RingError};

/// Default cap on the number of elements an enumeration may materialize.
pub const DEFAULT_ELEMENT_BUDGET: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuleError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("submodules belong to different modules")]
    ParentMismatch,
    #[error("lattice does not contain the relation lattice of its parent")]
    NotContained,
    #[error("module is infinite")]
    Infinite,
    #[error("module has {cardinality} elements, over the budget of {budget}")]
    OverBudget { cardinality: BigInt, budget: usize },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("({prime}) is not a maximal ideal of {ring}")]
    NotMaximal { prime: u64, ring: Ring },
    #[error("ideal over {ideal} applied to a module over {module}")]
    IdealRing { ideal: Ring, module: Ring },
}

#[derive(Debug)]
struct PresentationData {
    ring: Ring,
    rank: usize,
    relations: LatticeBasis,
    /// SNF invariant factors of the relations that exceed 1.
    torsion: Vec<BigInt>,
    free_rank: usize,
}

/// `M = Z^k / L_rel` over a base ring. Cheap to clone.
#[derive(Clone, Debug)]
pub struct ModulePresentation(Arc<PresentationData>);

impl PartialEq for ModulePresentation {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.ring == other.0.ring && self.0.rank == other.0.rank && self.0.relations == other.0.relations)
    }
}

impl Eq for ModulePresentation {}

impl Hash for ModulePresentation {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.ring.hash(state);
        self.0.relations.hash(state);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cardinality {
    Finite(BigInt),
    Infinite,
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinality::Finite(n) => write!(f, "{n}"),
            Cardinality::Infinite => write!(f, "infinite"),
        }
    }
}

/// Exponent of `Z^k / l`: 0 when the quotient has free rank, 1 when it is zero.
fn quotient_exponent(l: &LatticeBasis) -> BigInt {
    if l.rank() < l.ambient_rank() {
        return BigInt::zero();
    }
    snf(l.basis()).pop().unwrap_or_else(BigInt::one)
}

impl ModulePresentation {
    /// Builds `Z^rank / span(relations)` over `ring`.
    pub fn new(ring: Ring, rank: usize, relations: &ExactMatrix) -> Result<Self, ModuleError> {
        if relations.cols() != rank {
            return Err(LatticeError::LengthMismatch {
                expected: rank,
                found: relations.cols(),
            }
            .into());
        }
        Ok(Self::from_lattice(ring, LatticeBasis::span(relations)))
    }

    pub fn from_lattice(ring: Ring, relations: LatticeBasis) -> Self {
        let rank = relations.ambient_rank();
        let relations = match ring {
            Ring::Integers => relations,
            Ring::Modular(m) => relations
                .sum(&LatticeBasis::full(rank).scaled(&BigInt::from(m.get())))
                .expect("same ambient rank"),
        };
        let factors = snf(relations.basis());
        let free_rank = rank - factors.len();
        let torsion = factors.into_iter().filter(|d| !d.is_one()).collect();
        Self(Arc::new(PresentationData {
            ring,
            rank,
            relations,
            torsion,
            free_rank,
        }))
    }

    /// `Z/o_1 ⊕ ... ⊕ Z/o_k`; an order of 0 gives a free summand `Z`.
    pub fn direct_sum(ring: Ring, orders: &[u64]) -> Self {
        let k = orders.len();
        let rows: Vec<Vec<BigInt>> = orders
            .iter()
            .enumerate()
            .filter(|(_, &o)| o != 0)
            .map(|(i, &o)| {
                let mut r = vec![BigInt::zero(); k];
                r[i] = BigInt::from(o);
                r
            })
            .collect();
        Self::from_lattice(ring, LatticeBasis::span(&ExactMatrix::from_row_vecs(k, rows)))
    }

    pub fn cyclic(ring: Ring, order: u64) -> Self {
        Self::direct_sum(ring, &[order])
    }

    /// The base ring viewed as a module over itself.
    pub fn ring_as_module(ring: Ring) -> Self {
        Self::cyclic(ring, 0)
    }

    pub fn ring(&self) -> Ring {
        self.0.ring
    }

    pub fn rank(&self) -> usize {
        self.0.rank
    }

    pub fn relations(&self) -> &LatticeBasis {
        &self.0.relations
    }

    /// Invariant factors above 1, ascending and each dividing the next.
    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.0.torsion
    }

    pub fn free_rank(&self) -> usize {
        self.0.free_rank
    }

    pub fn is_finite(&self) -> bool {
        self.0.free_rank == 0
    }

    pub fn is_zero_module(&self) -> bool {
        self.is_finite() && self.0.torsion.is_empty()
    }

    /// Minimal number of generators.
    pub fn num_generators(&self) -> usize {
        self.0.free_rank + self.0.torsion.len()
    }

    pub fn is_cyclic(&self) -> bool {
        self.num_generators() <= 1
    }

    pub fn cardinality(&self) -> Cardinality {
        if self.is_finite() {
            Cardinality::Finite(self.0.torsion.iter().product())
        } else {
            Cardinality::Infinite
        }
    }

    /// Largest invariant factor; 0 for modules with free rank, 1 for the zero module.
    pub fn exponent(&self) -> BigInt {
        if !self.is_finite() {
            return BigInt::zero();
        }
        self.0.torsion.last().cloned().unwrap_or_else(BigInt::one)
    }

    /// Annihilator `Ann_R(M)`.
    pub fn annihilator(&self) -> Ideal {
        Ideal::new(self.ring(), self.exponent())
    }

    pub fn is_faithful(&self) -> bool {
        self.annihilator().is_zero()
    }

    pub fn element(&self, coords: &[BigInt]) -> Result<ModuleElement, ModuleError> {
        let coords = self.0.relations.reduce(coords)?;
        Ok(ModuleElement {
            parent: self.clone(),
            coords,
        })
    }

    /// Every element once, as canonical representatives in a fixed order.
    pub fn elements(&self, budget: usize) -> Result<Vec<ModuleElement>, ModuleError> {
        let Cardinality::Finite(card) = self.cardinality() else {
            return Err(ModuleError::Infinite);
        };
        if card > BigInt::from(budget) {
            return Err(ModuleError::OverBudget {
                cardinality: card,
                budget,
            });
        }
        // full rank HNF: pivot i sits in column i, representatives fill the box
        let bounds: Vec<u64> = self
            .0
            .relations
            .pivots()
            .into_iter()
            .map(|(_, p)| p.to_u64().expect("within budget"))
            .collect();
        let total = card.to_usize().expect("within budget");
        let mut out = Vec::with_capacity(total);
        let mut digits = vec![0u64; self.rank()];
        for _ in 0..total {
            out.push(ModuleElement {
                parent: self.clone(),
                coords: digits.iter().map(|&d| BigInt::from(d)).collect(),
            });
            for (d, &b) in digits.iter_mut().zip(&bounds).rev() {
                *d += 1;
                if *d < b {
                    break;
                }
                *d = 0;
            }
        }
        Ok(out)
    }

    pub fn zero_submodule(&self) -> Submodule {
        Submodule {
            parent: self.clone(),
            lattice: self.0.relations.clone(),
        }
    }

    pub fn whole(&self) -> Submodule {
        Submodule {
            parent: self.clone(),
            lattice: LatticeBasis::full(self.rank()),
        }
    }

    /// Submodule generated by `generators` (vectors in `Z^k`).
    pub fn span<I, R, T>(&self, generators: I) -> Result<Submodule, ModuleError>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        let gens = ExactMatrix::from_rows(self.rank(), generators)?;
        let lattice = LatticeBasis::span(&gens).sum(&self.0.relations)?;
        Ok(Submodule {
            parent: self.clone(),
            lattice,
        })
    }

    /// Submodule from a lattice, checking `L_rel ⊆ lattice`.
    pub fn submodule(&self, lattice: LatticeBasis) -> Result<Submodule, ModuleError> {
        if !lattice.contains_lattice(&self.0.relations)? {
            return Err(ModuleError::NotContained);
        }
        Ok(Submodule {
            parent: self.clone(),
            lattice,
        })
    }

    /// `M / N`, presented on the same generators.
    pub fn quotient(&self, n: &Submodule) -> Result<ModulePresentation, ModuleError> {
        if &n.parent != self {
            return Err(ModuleError::ParentMismatch);
        }
        Ok(ModulePresentation::from_lattice(self.ring(), n.lattice.clone()))
    }

    /// The localization of a finite module at the maximal ideal `(p)`, realized
    /// as its `p`-primary component `M / p^a M` where `p^a` is the `p`-part of
    /// the exponent. Over `Z/mZ` the local ring is `Z/p^v` with `p^v ‖ m`.
    pub fn localize(&self, p: u64) -> Result<Localization, ModuleError> {
        if !is_prime(p) {
            return Err(ModuleError::NotPrime(p));
        }
        if !self.is_finite() {
            return Err(ModuleError::Infinite);
        }
        let local_ring = match self.ring() {
            Ring::Integers => Ring::Integers,
            Ring::Modular(m) => {
                let v = valuation(&BigInt::from(m.get()), p);
                if v == 0 {
                    return Err(ModuleError::NotMaximal {
                        prime: p,
                        ring: self.ring(),
                    });
                }
                Ring::modular(p.pow(v))?
            }
        };
        let power = BigInt::from(p).pow(valuation(&self.exponent(), p));
        let relations = self.0.relations.sum(&LatticeBasis::full(self.rank()).scaled(&power))?;
        Ok(Localization {
            global: self.clone(),
            local: ModulePresentation::from_lattice(local_ring, relations),
            prime: p,
        })
    }
}

impl fmt::Display for ModulePresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.0.torsion.iter().map(|d| format!("Z/{d}")).collect();
        parts.extend(std::iter::repeat_n("Z".to_string(), self.0.free_rank));
        if parts.is_empty() {
            parts.push("0".to_string());
        }
        write!(f, "{} over {}", parts.join(" ⊕ "), self.0.ring)
    }
}

fn valuation(n: &BigInt, p: u64) -> u32 {
    if n.is_zero() {
        return 0;
    }
    let bp = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    while n.is_multiple_of(&bp) {
        n /= &bp;
        v += 1;
    }
    v
}

/// An element of a module, held by its canonical coset representative.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModuleElement {
    parent: ModulePresentation,
    coords: Vec<BigInt>,
}

impl ModuleElement {
    pub fn parent(&self) -> &ModulePresentation {
        &self.parent
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }
}

impl fmt::Display for ModuleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_vector(f, &self.coords)
    }
}

fn fmt_vector(f: &mut fmt::Formatter<'_>, v: &[BigInt]) -> fmt::Result {
    write!(f, "(")?;
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{x}")?;
    }
    write!(f, ")")
}

/// A submodule `N = L_N / L_rel`, stored by the canonical basis of `L_N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Submodule {
    parent: ModulePresentation,
    lattice: LatticeBasis,
}

impl PartialOrd for Submodule {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Submodule {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.lattice.cmp(&other.lattice)
    }
}

impl Submodule {
    pub fn parent(&self) -> &ModulePresentation {
        &self.parent
    }

    pub fn lattice(&self) -> &LatticeBasis {
        &self.lattice
    }

    pub fn ring(&self) -> Ring {
        self.parent.ring()
    }

    pub fn is_zero(&self) -> bool {
        &self.lattice == self.parent.relations()
    }

    pub fn is_whole(&self) -> bool {
        self.lattice.rank() == self.lattice.ambient_rank() && self.lattice.pivots().iter().all(|(_, p)| p.is_one())
    }

    fn same_parent(&self, other: &Submodule) -> Result<(), ModuleError> {
        if self.parent != other.parent {
            return Err(ModuleError::ParentMismatch);
        }
        Ok(())
    }

    pub fn contains(&self, v: &[BigInt]) -> Result<bool, ModuleError> {
        Ok(self.lattice.contains(v)?)
    }

    /// `self ⊆ other`.
    pub fn is_contained_in(&self, other: &Submodule) -> Result<bool, ModuleError> {
        self.same_parent(other)?;
        Ok(other.lattice.contains_lattice(&self.lattice)?)
    }

    /// `I·N`.
    pub fn scale(&self, ideal: &Ideal) -> Result<Submodule, ModuleError> {
        if ideal.ring() != self.ring() {
            return Err(ModuleError::IdealRing {
                ideal: ideal.ring(),
                module: self.ring(),
            });
        }
        Ok(self.scale_by(ideal.generator()))
    }

    /// `r·N` for a ring element given by an integer representative.
    pub fn scale_by(&self, r: &BigInt) -> Submodule {
        let lattice = self
            .lattice
            .scaled(r)
            .sum(self.parent.relations())
            .expect("same ambient rank");
        Submodule {
            parent: self.parent.clone(),
            lattice,
        }
    }

    pub fn intersect(&self, other: &Submodule) -> Result<Submodule, ModuleError> {
        self.same_parent(other)?;
        Ok(Submodule {
            parent: self.parent.clone(),
            lattice: self.lattice.intersect(&other.lattice)?,
        })
    }

    pub fn sum(&self, other: &Submodule) -> Result<Submodule, ModuleError> {
        self.same_parent(other)?;
        Ok(Submodule {
            parent: self.parent.clone(),
            lattice: self.lattice.sum(&other.lattice)?,
        })
    }

    /// `(N :_R M)`, the annihilator of `M/N`.
    pub fn colon(&self) -> Ideal {
        Ideal::new(self.ring(), quotient_exponent(&self.lattice))
    }

    /// `Ann_R(N)`.
    pub fn annihilator(&self) -> Ideal {
        self.as_module().annihilator()
    }

    /// `N` as a module in its own right, `Z^r / C` where `r` is the rank of
    /// `L_N` and `C` holds the coordinates of `L_rel` in the basis of `L_N`.
    pub fn as_module(&self) -> ModulePresentation {
        let r = self.lattice.rank();
        let rows: Vec<Vec<BigInt>> = self
            .parent
            .relations()
            .rows()
            .map(|row| self.lattice.coordinates(row).unwrap().expect("L_rel ⊆ L_N"))
            .collect();
        ModulePresentation::from_lattice(self.ring(), LatticeBasis::span(&ExactMatrix::from_row_vecs(r, rows)))
    }

    /// Re-expresses `self ⊆ ambient` as a submodule of `ambient_module`, which
    /// must be `ambient.as_module()`.
    pub fn relative_to(
        &self,
        ambient: &Submodule,
        ambient_module: &ModulePresentation,
    ) -> Result<Submodule, ModuleError> {
        self.same_parent(ambient)?;
        let mut rows = Vec::with_capacity(self.lattice.rank());
        for row in self.lattice.rows() {
            rows.push(ambient.lattice.coordinates(row)?.ok_or(ModuleError::NotContained)?);
        }
        ambient_module.span(rows)
    }

    /// Image under the identity map of `Z^k` into a module whose relations
    /// contain ours (a quotient or a localization).
    pub fn image_in(&self, target: &ModulePresentation) -> Result<Submodule, ModuleError> {
        let lattice = self.lattice.sum(target.relations())?;
        Ok(Submodule {
            parent: target.clone(),
            lattice,
        })
    }

    /// `NK = (N :_R M)(K :_R M)M`.
    pub fn product(&self, other: &Submodule) -> Result<Submodule, ModuleError> {
        self.same_parent(other)?;
        let ideal = self.colon().product(&other.colon())?;
        self.parent.whole().scale(&ideal)
    }

    pub fn cardinality(&self) -> Cardinality {
        self.as_module().cardinality()
    }
}

impl fmt::Display for Submodule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "span{{")?;
        for (i, row) in self.lattice.rows().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            fmt_vector(f, row)?;
        }
        write!(f, "}}")
    }
}

/// A localized module together with the transfer map for submodules.
#[derive(Clone, Debug)]
pub struct Localization {
    global: ModulePresentation,
    local: ModulePresentation,
    prime: u64,
}

impl Localization {
    pub fn module(&self) -> &ModulePresentation {
        &self.local
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    /// `N ↦ N_P`.
    pub fn transfer(&self, n: &Submodule) -> Result<Submodule, ModuleError> {
        if n.parent() != &self.global {
            return Err(ModuleError::ParentMismatch);
        }
        Ok(Submodule {
            parent: self.local.clone(),
            lattice: n.lattice.sum(self.local.relations())?,
        })
    }
}
