//! Decision procedures for purity notions and module-class predicates.
//!
//! Every predicate returns a [`Verdict`]. A `Fails` verdict carries the ideals,
//! ring elements or submodules at which the defining identity breaks. Under a
//! [`QuantificationPolicy::Bounded`] scan the absence of a witness only yields
//! `Unknown`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::enumerate::enumerate_submodules;
use crate::module::{ModuleError, ModulePresentation, Submodule, DEFAULT_ELEMENT_BUDGET};
use crate::ring::{is_prime, proper_ideals, ring_elements, Ideal, QuantificationPolicy, Ring, RingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PurityError {
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("purity level must be at least 1")]
    InvalidLevel,
    #[error("policy {policy} does not fit {module}: {reason}")]
    PolicyModule {
        policy: QuantificationPolicy,
        module: String,
        reason: &'static str,
    },
    #[error("operation needs a finite module")]
    InfiniteModule,
    #[error("operation needs a nonzero submodule")]
    ZeroSubmodule,
    #[error("precondition unmet: {0}")]
    PreconditionUnmet(&'static str),
    #[error("module is not a multiplication module")]
    NotMultiplication,
    #[error("module is not faithful")]
    NotFaithful,
    #[error("prime {0} listed more than once")]
    RepeatedPrime(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("exponent must be at least 1")]
    ZeroExponent,
    #[error("{0} is not square-free")]
    NotSquareFree(u64),
    #[error("{0} and {1} are not coprime")]
    NotCoprime(u64, u64),
    #[error("purity of some submodule is undecided under a bounded policy")]
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Holds,
    Fails,
    Unknown,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Holds => "holds",
            Outcome::Fails => "fails",
            Outcome::Unknown => "unknown",
        })
    }
}

/// The failing instance behind a `Fails` verdict.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Witness {
    pub ideals: Vec<Ideal>,
    pub ring_elements: Vec<BigInt>,
    pub submodules: Vec<Submodule>,
}

impl Witness {
    pub fn ideals(ideals: Vec<Ideal>) -> Self {
        Self {
            ideals,
            ..Self::default()
        }
    }

    pub fn with_submodule(mut self, n: Submodule) -> Self {
        self.submodules.insert(0, n);
        self
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.submodules.is_empty() {
            let s: Vec<String> = self.submodules.iter().map(ToString::to_string).collect();
            parts.push(format!("submodules {}", s.join(", ")));
        }
        if !self.ideals.is_empty() {
            let s: Vec<String> = self.ideals.iter().map(ToString::to_string).collect();
            parts.push(format!("ideals {}", s.join(", ")));
        }
        if !self.ring_elements.is_empty() {
            let s: Vec<String> = self.ring_elements.iter().map(ToString::to_string).collect();
            parts.push(format!("elements {}", s.join(", ")));
        }
        f.write_str(&parts.join("; "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    outcome: Outcome,
    witness: Option<Witness>,
    bound: Option<u64>,
}

impl Verdict {
    pub fn holds() -> Self {
        Self {
            outcome: Outcome::Holds,
            witness: None,
            bound: None,
        }
    }

    pub fn fails(witness: Witness) -> Self {
        Self {
            outcome: Outcome::Fails,
            witness: Some(witness),
            bound: None,
        }
    }

    pub fn unknown(bound: u64) -> Self {
        Self {
            outcome: Outcome::Unknown,
            witness: None,
            bound: Some(bound),
        }
    }

    pub fn outcome(&self) -> Outcome {
        self.outcome
    }

    pub fn witness(&self) -> Option<&Witness> {
        self.witness.as_ref()
    }

    pub fn bound(&self) -> Option<u64> {
        self.bound
    }

    pub fn is_holds(&self) -> bool {
        self.outcome == Outcome::Holds
    }

    pub fn is_fails(&self) -> bool {
        self.outcome == Outcome::Fails
    }

    pub fn is_unknown(&self) -> bool {
        self.outcome == Outcome::Unknown
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.outcome, &self.witness, self.bound) {
            (Outcome::Fails, Some(w), _) => write!(f, "fails ({w})"),
            (Outcome::Unknown, _, Some(b)) => write!(f, "unknown (no witness up to {b})"),
            (o, _, _) => write!(f, "{o}"),
        }
    }
}

/// Purity level `n`. Level 1 is Anderson–Fuller purity (`IN = N ∩ IM`); level
/// `n >= 2` is the `n`-ideal identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PurityLevel(u32);

impl PurityLevel {
    pub const PURE: PurityLevel = PurityLevel(1);
    pub const TWO: PurityLevel = PurityLevel(2);

    pub fn new(n: u32) -> Result<Self, PurityError> {
        if n == 0 {
            return Err(PurityError::InvalidLevel);
        }
        Ok(Self(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for PurityLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 1 {
            write!(f, "pure")
        } else {
            write!(f, "{}-pure", self.0)
        }
    }
}

/// The policy a module calls for: exhaustive over `Z/mZ`, residue-reduced for
/// finite `Z`-modules, bounded by `bound` otherwise.
pub fn auto_policy(m: &ModulePresentation, bound: u64) -> QuantificationPolicy {
    match m.ring() {
        Ring::Modular(_) => QuantificationPolicy::Exhaustive,
        Ring::Integers if m.is_finite() => QuantificationPolicy::ResidueReduced {
            exponent: m.exponent().to_u64().expect("desk-scale exponent"),
        },
        Ring::Integers => QuantificationPolicy::Bounded { limit: bound },
    }
}

/// A policy resolved against one module.
#[derive(Clone, Debug)]
struct Quantifier {
    policy: QuantificationPolicy,
    proper: Vec<Ideal>,
    elements: Vec<BigInt>,
    nonzero: Vec<Ideal>,
}

impl Quantifier {
    fn new(m: &ModulePresentation, policy: QuantificationPolicy) -> Result<Self, PurityError> {
        let ring = m.ring();
        let mismatch = |reason| PurityError::PolicyModule {
            policy,
            module: m.to_string(),
            reason,
        };
        if let QuantificationPolicy::ResidueReduced { exponent } = policy {
            if !m.is_finite() {
                return Err(mismatch("residue reduction needs a finite module"));
            }
            if exponent == 0 || !BigInt::from(exponent).is_multiple_of(&m.exponent()) {
                return Err(mismatch("residue modulus must be a multiple of the module exponent"));
            }
        }
        let proper = proper_ideals(ring, policy)?;
        let elements = ring_elements(ring, policy)?;
        let nonzero = match policy {
            QuantificationPolicy::Exhaustive => ring
                .all_ideals()
                .expect("finite ring")
                .into_iter()
                .filter(|i| !i.is_zero())
                .collect(),
            QuantificationPolicy::ResidueReduced { exponent } => (1..=exponent).map(|g| Ideal::new(ring, g)).collect(),
            QuantificationPolicy::Bounded { limit } => (1..=limit).map(|g| Ideal::new(ring, g)).collect(),
        };
        Ok(Self {
            policy,
            proper,
            elements,
            nonzero,
        })
    }

    fn bound(&self) -> Option<u64> {
        match self.policy {
            QuantificationPolicy::Bounded { limit } => Some(limit),
            _ => None,
        }
    }
}

/// The part of `g` that matters on a module of exponent `e`: `gX = gcd(g, e)X`
/// for every submodule `X`, since `g / gcd(g, e)` is a unit modulo the
/// exponent of `gcd(g, e)X`. Over infinite modules (`e = 0`) this is `|g|`.
fn action_key(g: &BigInt, e: &BigInt) -> BigInt {
    g.gcd(e)
}

/// Memoized `g ↦ g·N` for one submodule, keyed by action.
#[derive(Debug)]
struct Scaler {
    base: Submodule,
    exponent: BigInt,
    cache: HashMap<BigInt, Submodule>,
}

impl Scaler {
    fn new(base: Submodule, exponent: &BigInt) -> Self {
        Self {
            base,
            exponent: exponent.clone(),
            cache: HashMap::new(),
        }
    }

    fn get(&mut self, ideal: &Ideal) -> &Submodule {
        let key = action_key(ideal.generator(), &self.exponent);
        let base = &self.base;
        self.cache.entry(key).or_insert_with_key(|k| base.scale_by(k))
    }
}

/// Shared state for evaluating many predicates on submodules of one module:
/// the resolved quantifier, cached `I·M`, and memoized verdicts.
#[derive(Debug)]
pub struct PurityContext {
    module: ModulePresentation,
    quant: Quantifier,
    exponent: BigInt,
    /// One policy ideal per distinct nonzero action on `M`, in policy order.
    acting: Vec<Ideal>,
    whole: Scaler,
    memo: HashMap<(Submodule, u32), Verdict>,
}

impl PurityContext {
    pub fn new(m: &ModulePresentation, policy: QuantificationPolicy) -> Result<Self, PurityError> {
        let quant = Quantifier::new(m, policy)?;
        let exponent = m.exponent();
        let mut seen = std::collections::HashSet::new();
        let acting = quant
            .proper
            .iter()
            .filter(|i| {
                let key = action_key(i.generator(), &exponent);
                !key.is_zero() && key != exponent && seen.insert(key)
            })
            .cloned()
            .collect();
        Ok(Self {
            module: m.clone(),
            quant,
            whole: Scaler::new(m.whole(), &exponent),
            exponent,
            acting,
            memo: HashMap::new(),
        })
    }

    pub fn module(&self) -> &ModulePresentation {
        &self.module
    }

    pub fn policy(&self) -> QuantificationPolicy {
        self.quant.policy
    }

    /// Proper ideals quantified over, in policy order.
    pub fn proper_ideals(&self) -> &[Ideal] {
        &self.quant.proper
    }

    fn check_parent(&self, n: &Submodule) -> Result<(), PurityError> {
        if n.parent() != &self.module {
            return Err(ModuleError::ParentMismatch.into());
        }
        Ok(())
    }

    /// Turns "no witness found" into a verdict honest about the policy.
    fn conclude(&self, n: &Submodule, failure: Option<Witness>) -> Verdict {
        match failure {
            Some(w) => Verdict::fails(w),
            // zero and the whole module satisfy every identity for all ideals
            None => match self.quant.bound() {
                Some(b) if !(n.is_zero() || n.is_whole()) => Verdict::unknown(b),
                _ => Verdict::holds(),
            },
        }
    }

    /// Anderson–Fuller purity: `IN = N ∩ IM` for every ideal.
    pub fn pure(&mut self, n: &Submodule) -> Result<Verdict, PurityError> {
        self.check_parent(n)?;
        let mut scaled_n = Scaler::new(n.clone(), &self.exponent);
        let mut failure = None;
        for ideal in &self.acting {
            let lhs = scaled_n.get(ideal);
            let rhs = n.intersect(self.whole.get(ideal))?;
            if lhs != &rhs {
                failure = Some(Witness::ideals(vec![ideal.clone()]));
                break;
            }
        }
        Ok(self.conclude(n, failure))
    }

    /// Ribenboim purity: `rM ∩ N = rN` for every ring element.
    pub fn ribenboim(&mut self, n: &Submodule) -> Result<Verdict, PurityError> {
        self.check_parent(n)?;
        let mut failure = None;
        for r in &self.quant.elements {
            let lhs = n.scale_by(r);
            let rhs = n.intersect(&self.module.whole().scale_by(r))?;
            if lhs != rhs {
                failure = Some(Witness {
                    ring_elements: vec![r.clone()],
                    ..Witness::default()
                });
                break;
            }
        }
        Ok(self.conclude(n, failure))
    }

    /// Level-`n` purity (level 1 dispatches to [`PurityContext::pure`]).
    pub fn n_pure(&mut self, n: &Submodule, level: PurityLevel) -> Result<Verdict, PurityError> {
        self.check_parent(n)?;
        if let Some(v) = self.memo.get(&(n.clone(), level.get())) {
            return Ok(v.clone());
        }
        let verdict = if level.get() == 1 {
            self.pure(n)?
        } else {
            let failure = self.identity_failure(n, level.get() as usize, true)?;
            self.conclude(n, failure.map(Witness::ideals))
        };
        self.memo.insert((n.clone(), level.get()), verdict.clone());
        Ok(verdict)
    }

    /// Searches sorted multisets `I_1 ≤ ... ≤ I_arity` of proper ideals for a
    /// violation of `I_1⋯I_k N = I_1N ∩ ... ∩ I_kN [∩ (I_1⋯I_k)M]`; the last
    /// term is included when `with_ambient` is set.
    pub fn identity_failure(
        &mut self,
        n: &Submodule,
        arity: usize,
        with_ambient: bool,
    ) -> Result<Option<Vec<Ideal>>, PurityError> {
        self.check_parent(n)?;
        // an ideal killing M makes both sides zero
        let ideals = self.acting.clone();
        if ideals.is_empty() || arity == 0 {
            return Ok(None);
        }
        let mut scaled_n = Scaler::new(n.clone(), &self.exponent);
        let scaled_single: Vec<Submodule> = ideals.iter().map(|i| scaled_n.get(i).clone()).collect();
        let mut search = IdentitySearch {
            ideals: &ideals,
            scaled_single: &scaled_single,
            scaled_n: &mut scaled_n,
            whole: &mut self.whole,
            exponent: &self.exponent,
            arity,
            with_ambient,
            chosen: Vec::with_capacity(arity),
        };
        let unit = Ideal::unit(n.ring());
        search.descend(0, &unit, None)
    }
}

struct IdentitySearch<'a> {
    ideals: &'a [Ideal],
    scaled_single: &'a [Submodule],
    scaled_n: &'a mut Scaler,
    whole: &'a mut Scaler,
    exponent: &'a BigInt,
    arity: usize,
    with_ambient: bool,
    chosen: Vec<usize>,
}

impl IdentitySearch<'_> {
    fn descend(
        &mut self,
        start: usize,
        product: &Ideal,
        meet: Option<&Submodule>,
    ) -> Result<Option<Vec<Ideal>>, PurityError> {
        for idx in start..self.ideals.len() {
            let prod = product.product(&self.ideals[idx])?;
            if action_key(prod.generator(), self.exponent) == *self.exponent {
                // the product kills M in every extension, so both sides vanish
                continue;
            }
            let single = &self.scaled_single[idx];
            let inter = match meet {
                Some(m) => m.intersect(single)?,
                None => single.clone(),
            };
            self.chosen.push(idx);
            if self.chosen.len() == self.arity {
                let lhs = self.scaled_n.get(&prod).clone();
                let rhs = if self.with_ambient {
                    inter.intersect(self.whole.get(&prod))?
                } else {
                    inter
                };
                if lhs != rhs {
                    return Ok(Some(self.chosen.iter().map(|&i| self.ideals[i].clone()).collect()));
                }
            } else if let Some(w) = self.descend(idx, &prod, Some(&inter))? {
                return Ok(Some(w));
            }
            self.chosen.pop();
        }
        Ok(None)
    }
}

pub fn is_pure(n: &Submodule, policy: QuantificationPolicy) -> Result<Verdict, PurityError> {
    PurityContext::new(n.parent(), policy)?.pure(n)
}

pub fn is_ribenboim_pure(n: &Submodule, policy: QuantificationPolicy) -> Result<Verdict, PurityError> {
    PurityContext::new(n.parent(), policy)?.ribenboim(n)
}

pub fn is_n_pure(n: &Submodule, level: PurityLevel, policy: QuantificationPolicy) -> Result<Verdict, PurityError> {
    PurityContext::new(n.parent(), policy)?.n_pure(n, level)
}

fn all_submodules(m: &ModulePresentation) -> Result<Vec<Submodule>, PurityError> {
    if !m.is_finite() {
        return Err(PurityError::InfiniteModule);
    }
    Ok(enumerate_submodules(m, DEFAULT_ELEMENT_BUDGET)?)
}

/// Every submodule is `level`-pure.
pub fn is_fully_n_pure(
    m: &ModulePresentation,
    level: PurityLevel,
    policy: QuantificationPolicy,
) -> Result<Verdict, PurityError> {
    let subs = all_submodules(m)?;
    let mut ctx = PurityContext::new(m, policy)?;
    fully_n_pure_among(&mut ctx, &subs, level)
}

fn fully_n_pure_among(ctx: &mut PurityContext, subs: &[Submodule], level: PurityLevel) -> Result<Verdict, PurityError> {
    let mut unknown = None;
    for n in subs {
        let v = ctx.n_pure(n, level)?;
        match v.outcome() {
            Outcome::Fails => {
                let w = v.witness().cloned().unwrap_or_default();
                return Ok(Verdict::fails(w.with_submodule(n.clone())));
            }
            Outcome::Unknown => unknown = v.bound(),
            Outcome::Holds => {}
        }
    }
    Ok(match unknown {
        Some(b) => Verdict::unknown(b),
        None => Verdict::holds(),
    })
}

/// `N = (N :_R M)M` for every submodule `N`.
pub fn is_multiplication_module(m: &ModulePresentation) -> Result<Verdict, PurityError> {
    if !m.is_finite() {
        // cyclic modules are multiplication modules; nothing else is decidable here
        return if m.is_cyclic() {
            Ok(Verdict::holds())
        } else {
            Err(PurityError::InfiniteModule)
        };
    }
    let whole = m.whole();
    for n in all_submodules(m)? {
        if whole.scale(&n.colon())? != n {
            return Ok(Verdict::fails(Witness::default().with_submodule(n)));
        }
    }
    Ok(Verdict::holds())
}

/// `I·N_1 = I·N_2` forces `N_1 = N_2` for every nonzero ideal `I`.
pub fn is_fully_cancellation(m: &ModulePresentation, policy: QuantificationPolicy) -> Result<Verdict, PurityError> {
    let subs = all_submodules(m)?;
    let quant = Quantifier::new(m, policy)?;
    for ideal in &quant.nonzero {
        let mut images: HashMap<Submodule, &Submodule> = HashMap::new();
        for n in &subs {
            let image = n.scale_by(ideal.generator());
            if let Some(&earlier) = images.get(&image) {
                return Ok(Verdict::fails(Witness {
                    ideals: vec![ideal.clone()],
                    ring_elements: vec![],
                    submodules: vec![earlier.clone(), n.clone()],
                }));
            }
            images.insert(image, n);
        }
    }
    Ok(match quant.bound() {
        Some(b) => Verdict::unknown(b),
        None => Verdict::holds(),
    })
}

/// Ring-element generators realizing each ideal of a finite ring once; the
/// absorbing conditions depend on `a` only through the ideal `(a)`.
fn ideal_generators(ring: Ring) -> Result<Vec<BigInt>, PurityError> {
    let ideals = ring.all_ideals().ok_or(PurityError::PreconditionUnmet(
        "ring elements must range over a finite ring",
    ))?;
    Ok(ideals
        .into_iter()
        .map(|i| {
            if i.is_zero() {
                BigInt::zero()
            } else {
                i.generator().clone()
            }
        })
        .collect())
}

/// Weakly strongly 2-absorbing second: whenever `abM ⊄ K` and `abN ⊆ K`, then
/// `aN ⊆ K`, `bN ⊆ K`, or `ab ∈ Ann_R(N)`.
pub fn is_weakly_strongly_2_absorbing_second(n: &Submodule) -> Result<Verdict, PurityError> {
    if n.is_zero() {
        return Err(PurityError::ZeroSubmodule);
    }
    let m = n.parent();
    let gens = ideal_generators(m.ring())?;
    let subs = all_submodules(m)?;
    let whole = m.whole();
    let scaled: Vec<Submodule> = gens.iter().map(|g| n.scale_by(g)).collect();
    for (i, a) in gens.iter().enumerate() {
        for (j, b) in gens.iter().enumerate().skip(i) {
            let ab = a * b;
            let ab_n = n.scale_by(&ab);
            if ab_n.is_zero() {
                continue;
            }
            let ab_m = whole.scale_by(&ab);
            for k in &subs {
                if !ab_m.is_contained_in(k)?
                    && ab_n.is_contained_in(k)?
                    && !scaled[i].is_contained_in(k)?
                    && !scaled[j].is_contained_in(k)?
                {
                    return Ok(Verdict::fails(Witness {
                        ideals: vec![],
                        ring_elements: vec![a.clone(), b.clone()],
                        submodules: vec![n.clone(), k.clone()],
                    }));
                }
            }
        }
    }
    Ok(Verdict::holds())
}

/// `abN = aN ∩ bN ∩ abM` whenever `ab ∉ Ann_R(N)`, for a weakly strongly
/// 2-absorbing second submodule `N`.
pub fn check_wsas_identity(n: &Submodule) -> Result<Verdict, PurityError> {
    if !is_weakly_strongly_2_absorbing_second(n)?.is_holds() {
        return Err(PurityError::PreconditionUnmet(
            "submodule is not weakly strongly 2-absorbing second",
        ));
    }
    let m = n.parent();
    let whole = m.whole();
    let gens = ideal_generators(m.ring())?;
    for (i, a) in gens.iter().enumerate() {
        for b in &gens[i..] {
            let ab = a * b;
            let ab_n = n.scale_by(&ab);
            if ab_n.is_zero() {
                continue;
            }
            let rhs = n
                .scale_by(a)
                .intersect(&n.scale_by(b))?
                .intersect(&whole.scale_by(&ab))?;
            if rhs != ab_n {
                return Ok(Verdict::fails(Witness {
                    ideals: vec![],
                    ring_elements: vec![a.clone(), b.clone()],
                    submodules: vec![n.clone()],
                }));
            }
        }
    }
    Ok(Verdict::holds())
}

/// `p_1^{s_1}⋯p_t^{s_t} N = ∩ p_i^{s_i} N` for distinct primes.
pub fn check_pid_factorization(n: &Submodule, prime_powers: &[(u64, u32)]) -> Result<Verdict, PurityError> {
    let mut seen = Vec::new();
    for &(p, s) in prime_powers {
        if !is_prime(p) {
            return Err(PurityError::NotPrime(p));
        }
        if s == 0 {
            return Err(PurityError::ZeroExponent);
        }
        if seen.contains(&p) {
            return Err(PurityError::RepeatedPrime(p));
        }
        seen.push(p);
    }
    let powers: Vec<BigInt> = prime_powers.iter().map(|&(p, s)| BigInt::from(p).pow(s)).collect();
    let product: BigInt = powers.iter().product();
    let lhs = n.scale_by(&product);
    let mut rhs = n.clone();
    for q in &powers {
        rhs = rhs.intersect(&n.scale_by(q))?;
    }
    if lhs == rhs {
        Ok(Verdict::holds())
    } else {
        Ok(Verdict::fails(Witness {
            ideals: vec![],
            ring_elements: powers,
            submodules: vec![n.clone()],
        }))
    }
}

fn is_square_free(n: u64) -> bool {
    (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d * d))
}

/// `(aZ)(bZ)N = aN ∩ bN` for square-free coprime `a, b`.
pub fn check_coprime_product(n: &Submodule, a: u64, b: u64) -> Result<Verdict, PurityError> {
    for x in [a, b] {
        if x == 0 || !is_square_free(x) {
            return Err(PurityError::NotSquareFree(x));
        }
    }
    if a.gcd(&b) != 1 {
        return Err(PurityError::NotCoprime(a, b));
    }
    let (ba, bb) = (BigInt::from(a), BigInt::from(b));
    let lhs = n.scale_by(&(&ba * &bb));
    let rhs = n.scale_by(&ba).intersect(&n.scale_by(&bb))?;
    if lhs == rhs {
        Ok(Verdict::holds())
    } else {
        Ok(Verdict::fails(Witness {
            ideals: vec![],
            ring_elements: vec![ba, bb],
            submodules: vec![n.clone()],
        }))
    }
}

/// Pure submodules `N ⊆ K` with no pure `H` satisfying `N ⊂ H ⊂ K`. With
/// `strict` the vacuous candidate `N = K` is excluded.
pub fn maximal_pure_submodules(
    k: &Submodule,
    policy: QuantificationPolicy,
    strict: bool,
) -> Result<Vec<Submodule>, PurityError> {
    let m = k.parent();
    let subs = all_submodules(m)?;
    let mut ctx = PurityContext::new(m, policy)?;
    let mut pure_inside = Vec::new();
    for s in &subs {
        if s.is_contained_in(k)? {
            match ctx.pure(s)?.outcome() {
                Outcome::Holds => pure_inside.push(s.clone()),
                Outcome::Unknown => return Err(PurityError::Undecided),
                Outcome::Fails => {}
            }
        }
    }
    let mut out = Vec::new();
    for n in &pure_inside {
        if strict && n == k {
            continue;
        }
        let mut blocked = false;
        for h in &pure_inside {
            if h != n && h != k && n.is_contained_in(h)? {
                blocked = true;
                break;
            }
        }
        if !blocked {
            out.push(n.clone());
        }
    }
    Ok(out)
}

/// A `level`-pure `K ⊆ N` with no `level`-pure `K'` such that `K ⊂ K' ⊆ N`.
/// Among several maximal ones the least canonical basis wins.
pub fn maximal_n_pure_within(
    n: &Submodule,
    level: PurityLevel,
    policy: QuantificationPolicy,
) -> Result<Submodule, PurityError> {
    let m = n.parent();
    let subs = all_submodules(m)?;
    let mut ctx = PurityContext::new(m, policy)?;
    maximal_n_pure_among(&mut ctx, &subs, n, level)
}

/// [`maximal_n_pure_within`] against a precomputed submodule list and context.
pub fn maximal_n_pure_among(
    ctx: &mut PurityContext,
    subs: &[Submodule],
    n: &Submodule,
    level: PurityLevel,
) -> Result<Submodule, PurityError> {
    let mut candidates = Vec::new();
    for s in subs {
        if s.is_contained_in(n)? {
            match ctx.n_pure(s, level)?.outcome() {
                Outcome::Holds => candidates.push(s.clone()),
                Outcome::Unknown => return Err(PurityError::Undecided),
                Outcome::Fails => {}
            }
        }
    }
    let mut maximal = Vec::new();
    for c in &candidates {
        let mut dominated = false;
        for d in &candidates {
            if d != c && c.is_contained_in(d)? {
                dominated = true;
                break;
            }
        }
        if !dominated {
            maximal.push(c.clone());
        }
    }
    // zero is always pure, so the candidate set is never empty
    Ok(maximal.into_iter().min().expect("zero submodule is n-pure"))
}

/// `N_1⋯N_k := (N_1 :_R M)⋯(N_k :_R M) M`.
fn product_of(m: &ModulePresentation, colons: &[&Ideal]) -> Result<Submodule, PurityError> {
    let ring = m.ring();
    let mut ideal = Ideal::unit(ring);
    for c in colons {
        ideal = ideal.product(c)?;
    }
    Ok(m.whole().scale(&ideal)?)
}

/// Checks `N_1N_2⋯N_{n+1} = N_1N_2 ∩ ... ∩ N_1N_{n+1} ∩ N_2⋯N_{n+1}` over every
/// tuple of submodules, the product identity matching level `n`.
pub fn product_identity(m: &ModulePresentation, level: PurityLevel) -> Result<Verdict, PurityError> {
    product_identity_over(m, level, false)
}

/// [`product_identity`] with `N_2, ..., N_{n+1}` restricted to proper
/// submodules; `N_1` still ranges over all of them.
pub fn product_identity_proper_tail(m: &ModulePresentation, level: PurityLevel) -> Result<Verdict, PurityError> {
    product_identity_over(m, level, true)
}

fn product_identity_over(
    m: &ModulePresentation,
    level: PurityLevel,
    proper_tail: bool,
) -> Result<Verdict, PurityError> {
    let subs = all_submodules(m)?;
    let colons: Vec<Ideal> = subs.iter().map(Submodule::colon).collect();
    let tail_pool: Vec<usize> = (0..subs.len())
        .filter(|&i| !proper_tail || !subs[i].is_whole())
        .collect();
    if tail_pool.is_empty() {
        return Ok(Verdict::holds());
    }
    let tail_len = level.get() as usize;
    let mut tail = vec![0usize; tail_len];
    for first in 0..subs.len() {
        // sorted multisets for N_2..N_{n+1}; the identity is symmetric in them
        tail.iter_mut().for_each(|t| *t = 0);
        loop {
            let picked: Vec<usize> = tail.iter().map(|&t| tail_pool[t]).collect();
            let mut all: Vec<&Ideal> = vec![&colons[first]];
            all.extend(picked.iter().map(|&t| &colons[t]));
            let lhs = product_of(m, &all)?;
            let mut rhs = product_of(m, &all[1..])?;
            for &t in &picked {
                rhs = rhs.intersect(&product_of(m, &[&colons[first], &colons[t]])?)?;
            }
            if lhs != rhs {
                let mut w = Witness::default();
                w.submodules.push(subs[first].clone());
                w.submodules.extend(picked.iter().map(|&t| subs[t].clone()));
                return Ok(Verdict::fails(w));
            }
            if !next_multiset(&mut tail, tail_pool.len()) {
                break;
            }
        }
    }
    Ok(Verdict::holds())
}

/// Advances a non-decreasing index tuple; false once exhausted.
pub(crate) fn next_multiset(t: &mut [usize], n: usize) -> bool {
    let mut i = t.len();
    while i > 0 {
        i -= 1;
        if t[i] + 1 < n {
            let v = t[i] + 1;
            for x in &mut t[i..] {
                *x = v;
            }
            return true;
        }
    }
    false
}

/// For a multiplication module: the product identity holds for all tuples
/// exactly when the module is fully `level`-pure. `Holds` means the two sides
/// agree.
pub fn check_product_characterization(m: &ModulePresentation, level: PurityLevel) -> Result<Verdict, PurityError> {
    if !is_multiplication_module(m)?.is_holds() {
        return Err(PurityError::NotMultiplication);
    }
    let identity = product_identity(m, level)?;
    let fully = is_fully_n_pure(m, level, auto_policy(m, 16))?;
    if fully.is_unknown() {
        return Ok(fully);
    }
    if identity.is_holds() == fully.is_holds() {
        Ok(Verdict::holds())
    } else {
        let w = identity.witness().or(fully.witness()).cloned().unwrap_or_default();
        Ok(Verdict::fails(w))
    }
}

/// For a faithful multiplication module: `N` is `level`-pure in `M` exactly
/// when `(N :_R M)` is a `level`-pure ideal. `Holds` means the two agree.
pub fn check_colon_transfer(
    n: &Submodule,
    level: PurityLevel,
    policy: QuantificationPolicy,
) -> Result<Verdict, PurityError> {
    let m = n.parent();
    if !m.is_faithful() {
        return Err(PurityError::NotFaithful);
    }
    if !is_multiplication_module(m)?.is_holds() {
        return Err(PurityError::NotMultiplication);
    }
    let ring_module = ModulePresentation::ring_as_module(m.ring());
    let colon = n.colon();
    let ideal_sub = ring_module.span([[colon.generator().clone()]])?;
    let left = is_n_pure(n, level, policy)?;
    let right = is_n_pure(&ideal_sub, level, policy)?;
    if left.outcome() == right.outcome() {
        Ok(Verdict::holds())
    } else {
        let mut w = left.witness().or(right.witness()).cloned().unwrap_or_default();
        w.submodules = vec![n.clone(), ideal_sub];
        Ok(Verdict::fails(w))
    }
}

/// Replays a `Fails` witness of [`is_n_pure`] directly through the lattice
/// operations and reports whether the two sides really differ.
pub fn witness_breaks_identity(n: &Submodule, ideals: &[Ideal]) -> Result<bool, PurityError> {
    let m = n.parent();
    let mut product = Ideal::unit(n.ring());
    for i in ideals {
        product = product.product(i)?;
    }
    if ideals.len() == 1 {
        let i = &ideals[0];
        return Ok(n.scale(i)? != n.intersect(&m.whole().scale(i)?)?);
    }
    let mut rhs = m.whole().scale(&product)?;
    for i in ideals {
        rhs = rhs.intersect(&n.scale(i)?)?;
    }
    Ok(n.scale(&product)? != rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zm(m: u64) -> Ring {
        Ring::modular(m).unwrap()
    }

    fn cyclic(m: u64) -> ModulePresentation {
        ModulePresentation::cyclic(zm(m), m)
    }

    fn level(n: u32) -> PurityLevel {
        PurityLevel::new(n).unwrap()
    }

    const EX: QuantificationPolicy = QuantificationPolicy::Exhaustive;

    #[test]
    fn z4_two_is_two_pure_but_not_pure() {
        let m = cyclic(4);
        let n = m.span([[2]]).unwrap();
        let pure = is_pure(&n, EX).unwrap();
        assert!(pure.is_fails());
        assert_eq!(pure.witness().unwrap().ideals, vec![Ideal::new(zm(4), 2)]);
        assert!(is_n_pure(&n, level(2), EX).unwrap().is_holds());
        assert!(is_pure(&m.zero_submodule(), EX).unwrap().is_holds());
    }

    #[test]
    fn pure_direct_summand() {
        let m = ModulePresentation::direct_sum(zm(4), &[2, 4]);
        let n = m.span([[1, 0]]).unwrap();
        assert!(is_pure(&n, EX).unwrap().is_holds());
    }

    #[test]
    fn ribenboim_examples() {
        let m = cyclic(4);
        let n = m.span([[2]]).unwrap();
        let v = is_ribenboim_pure(&n, EX).unwrap();
        assert_eq!(v.witness().unwrap().ring_elements, vec![BigInt::from(2)]);
        assert!(is_ribenboim_pure(&m.zero_submodule(), EX).unwrap().is_holds());
        assert!(is_ribenboim_pure(&m.whole(), EX).unwrap().is_holds());
    }

    #[test]
    fn z8_two_is_three_pure_not_two_pure() {
        let m = cyclic(8);
        let n = m.span([[2]]).unwrap();
        let two = is_n_pure(&n, level(2), EX).unwrap();
        assert_eq!(two.witness().unwrap().ideals, vec![Ideal::new(zm(8), 2); 2]);
        assert!(witness_breaks_identity(&n, &two.witness().unwrap().ideals).unwrap());
        assert!(is_n_pure(&n, level(3), EX).unwrap().is_holds());
    }

    #[test]
    fn two_z_in_z_fails_under_bound() {
        let m = ModulePresentation::ring_as_module(Ring::Integers);
        let n = m.span([[2]]).unwrap();
        let v = is_n_pure(&n, level(2), QuantificationPolicy::Bounded { limit: 8 }).unwrap();
        assert_eq!(v.witness().unwrap().ideals, vec![Ideal::new(Ring::Integers, 2); 2]);
        // a submodule with no witness in range stays undecided
        let whole = is_n_pure(&m.whole(), level(2), QuantificationPolicy::Bounded { limit: 8 }).unwrap();
        assert!(whole.is_holds());
    }

    #[test]
    fn bounded_without_witness_is_unknown() {
        // Z ⊕ Z/2 with N = Z ⊕ 0 is a direct summand, so no witness exists
        let m = ModulePresentation::direct_sum(Ring::Integers, &[0, 2]);
        let n = m.span([[1, 0]]).unwrap();
        let v = is_n_pure(&n, level(2), QuantificationPolicy::Bounded { limit: 6 }).unwrap();
        assert!(v.is_unknown());
        assert_eq!(v.bound(), Some(6));
    }

    #[test]
    fn policy_mismatches_are_errors() {
        let m = cyclic(4);
        let n = m.whole();
        assert!(is_pure(&n, QuantificationPolicy::Bounded { limit: 4 }).is_err());
        let zfree = ModulePresentation::ring_as_module(Ring::Integers);
        assert!(is_pure(&zfree.whole(), QuantificationPolicy::ResidueReduced { exponent: 4 }).is_err());
        let z6 = ModulePresentation::cyclic(Ring::Integers, 6);
        assert!(is_pure(&z6.whole(), QuantificationPolicy::ResidueReduced { exponent: 4 }).is_err());
        assert!(is_pure(&z6.whole(), QuantificationPolicy::ResidueReduced { exponent: 12 }).is_ok());
        assert!(PurityLevel::new(0).is_err());
    }

    #[test]
    fn fully_pure_examples() {
        assert!(is_fully_n_pure(&cyclic(4), level(2), EX).unwrap().is_holds());
        let v = is_fully_n_pure(&cyclic(8), level(2), EX).unwrap();
        assert_eq!(v.witness().unwrap().submodules, vec![cyclic(8).span([[2]]).unwrap()]);
        let zero = ModulePresentation::cyclic(zm(5), 1);
        assert!(is_fully_n_pure(&zero, level(3), EX).unwrap().is_holds());
    }

    #[test]
    fn multiplication_examples() {
        assert!(is_multiplication_module(&cyclic(12)).unwrap().is_holds());
        let v4 = ModulePresentation::direct_sum(Ring::Integers, &[2, 2]);
        let v = is_multiplication_module(&v4).unwrap();
        assert!(v.is_fails());
        let zero = ModulePresentation::cyclic(Ring::Integers, 1);
        assert!(is_multiplication_module(&zero).unwrap().is_holds());
        let z = ModulePresentation::ring_as_module(Ring::Integers);
        assert!(is_multiplication_module(&z).unwrap().is_holds());
    }

    #[test]
    fn fully_cancellation_examples() {
        let v = is_fully_cancellation(&cyclic(4), EX).unwrap();
        let w = v.witness().unwrap();
        assert_eq!(w.ideals, vec![Ideal::new(zm(4), 2)]);
        let mut pair = w.submodules.clone();
        pair.sort();
        assert_eq!(pair, vec![cyclic(4).span([[2]]).unwrap(), cyclic(4).zero_submodule()]);
        assert!(is_fully_cancellation(&cyclic(7), EX).unwrap().is_holds());
        assert!(is_fully_cancellation(&ModulePresentation::cyclic(zm(3), 1), EX)
            .unwrap()
            .is_holds());
    }

    #[test]
    fn wsas_examples() {
        for p in [2, 3] {
            let m = cyclic(p);
            assert!(is_weakly_strongly_2_absorbing_second(&m.whole()).unwrap().is_holds());
            assert!(check_wsas_identity(&m.whole()).unwrap().is_holds());
        }
        let z4 = cyclic(4);
        assert!(is_weakly_strongly_2_absorbing_second(&z4.whole()).unwrap().is_holds());
        assert!(check_wsas_identity(&z4.whole()).unwrap().is_holds());
        assert_eq!(
            is_weakly_strongly_2_absorbing_second(&z4.zero_submodule()),
            Err(PurityError::ZeroSubmodule)
        );
        // 2Z/4: ab ranges over ideals; abN = 0 unless ab is a unit
        assert!(is_weakly_strongly_2_absorbing_second(&z4.span([[2]]).unwrap())
            .unwrap()
            .is_holds());
    }

    #[test]
    fn pid_factorization_examples() {
        let z12 = ModulePresentation::cyclic(Ring::Integers, 12);
        assert!(check_pid_factorization(&z12.whole(), &[(2, 2), (3, 1)])
            .unwrap()
            .is_holds());
        assert!(check_pid_factorization(&z12.whole(), &[(5, 3)]).unwrap().is_holds());
        let z8 = ModulePresentation::cyclic(Ring::Integers, 8);
        let n = z8.span([[2]]).unwrap();
        assert!(check_pid_factorization(&n, &[(2, 1), (3, 1)]).unwrap().is_holds());
        assert_eq!(
            check_pid_factorization(&n, &[(2, 1), (2, 2)]),
            Err(PurityError::RepeatedPrime(2))
        );
        assert_eq!(check_pid_factorization(&n, &[(4, 1)]), Err(PurityError::NotPrime(4)));
        assert!(check_coprime_product(&n, 2, 3).unwrap().is_holds());
        assert!(check_coprime_product(&n, 4, 3).is_err());
        assert!(check_coprime_product(&n, 6, 3).is_err());
    }

    #[test]
    fn maximal_pure_examples() {
        let z4 = cyclic(4);
        assert_eq!(
            maximal_pure_submodules(&z4.whole(), EX, true).unwrap(),
            vec![z4.zero_submodule()]
        );
        assert_eq!(
            maximal_pure_submodules(&z4.whole(), EX, false).unwrap(),
            vec![z4.whole(), z4.zero_submodule()]
        );
        assert_eq!(
            maximal_pure_submodules(&z4.zero_submodule(), EX, false).unwrap(),
            vec![z4.zero_submodule()]
        );
        let v = ModulePresentation::direct_sum(zm(2), &[2, 2]);
        let lines = maximal_pure_submodules(&v.whole(), EX, true).unwrap();
        assert_eq!(lines.len(), 3);
        assert!(lines
            .iter()
            .all(|l| l.cardinality() == crate::module::Cardinality::Finite(BigInt::from(2))));
    }

    #[test]
    fn maximal_n_pure_examples() {
        let z4 = cyclic(4);
        let n = z4.span([[2]]).unwrap();
        assert_eq!(maximal_n_pure_within(&n, level(2), EX).unwrap(), n);
        assert!(maximal_n_pure_within(&z4.zero_submodule(), level(2), EX)
            .unwrap()
            .is_zero());
        // inside 2Z/8 the 2-pure submodules are 0 and 4Z/8
        let z8 = cyclic(8);
        let k = maximal_n_pure_within(&z8.span([[2]]).unwrap(), level(2), EX).unwrap();
        assert_eq!(k, z8.span([[4]]).unwrap());
    }

    #[test]
    fn product_characterization_examples() {
        assert!(product_identity(&cyclic(4), level(2)).unwrap().is_holds());
        assert!(check_product_characterization(&cyclic(4), level(2)).unwrap().is_holds());
        assert!(product_identity(&cyclic(8), level(2)).unwrap().is_fails());
        assert!(check_product_characterization(&cyclic(8), level(2)).unwrap().is_holds());
        for n in 2..=4 {
            assert!(product_identity(&cyclic(5), level(n)).unwrap().is_holds());
            assert!(check_product_characterization(&cyclic(5), level(n)).unwrap().is_holds());
        }
        let v4 = ModulePresentation::direct_sum(zm(2), &[2, 2]);
        assert_eq!(
            check_product_characterization(&v4, level(2)),
            Err(PurityError::NotMultiplication)
        );
    }

    #[test]
    fn whole_module_in_the_tail_reduces_the_arity() {
        let z8 = cyclic(8);
        assert!(is_fully_n_pure(&z8, level(3), EX).unwrap().is_holds());
        let v = product_identity(&z8, level(3)).unwrap();
        assert!(v.witness().unwrap().submodules.iter().any(Submodule::is_whole));
        assert!(check_product_characterization(&z8, level(3)).unwrap().is_fails());
        assert!(product_identity_proper_tail(&z8, level(3)).unwrap().is_holds());
        assert!(product_identity_proper_tail(&z8, level(2)).unwrap().is_fails());
    }

    #[test]
    fn colon_transfer_examples() {
        let z12 = cyclic(12);
        assert!(check_colon_transfer(&z12.span([[2]]).unwrap(), level(2), EX)
            .unwrap()
            .is_holds());
        assert!(check_colon_transfer(&z12.zero_submodule(), level(3), EX)
            .unwrap()
            .is_holds());
        let z = ModulePresentation::ring_as_module(Ring::Integers);
        let b8 = QuantificationPolicy::Bounded { limit: 8 };
        let n = z.span([[2]]).unwrap();
        assert!(check_colon_transfer(&n, level(2), b8).unwrap().is_holds());
        assert!(is_n_pure(&n, level(2), b8).unwrap().is_fails());
        let not_faithful = ModulePresentation::cyclic(zm(12), 6);
        assert_eq!(
            check_colon_transfer(&not_faithful.whole(), level(2), EX),
            Err(PurityError::NotFaithful)
        );
    }

    #[test]
    fn multiset_iteration_counts() {
        let mut t = vec![0; 3];
        let mut count = 1;
        while next_multiset(&mut t, 4) {
            count += 1;
        }
        // C(4 + 3 - 1, 3)
        assert_eq!(count, 20);
    }
}
