//! Exhaustive scans of purity claims over families of finite modules, and
//! witness mining.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;
use thiserror::Error;

use crate::enumerate::enumerate_submodules;
use crate::module::{ModuleError, ModulePresentation, Submodule, DEFAULT_ELEMENT_BUDGET};
use crate::oracle::{oracle_is_n_pure, oracle_replay, oracle_replay_quotient, OracleError, OracleModule};
use crate::purity::{
    auto_policy, check_coprime_product, check_pid_factorization, check_product_characterization, check_wsas_identity,
    is_fully_cancellation, is_fully_n_pure, is_multiplication_module, is_weakly_strongly_2_absorbing_second,
    maximal_n_pure_among, maximal_pure_submodules, Outcome, PurityContext, PurityError, PurityLevel, Verdict,
};
use crate::ring::{factorize, is_prime, Ideal, Ring};

/// Bound used when a module calls for the bounded policy.
pub const DEFAULT_BOUND: u64 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScanError {
    #[error("unknown claim `{0}`")]
    UnknownClaim(String),
    #[error("unknown module family `{0}`")]
    UnknownFamily(String),
    #[error("unknown mining pattern `{0}`")]
    UnknownPattern(String),
    #[error(transparent)]
    Purity(#[from] PurityError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// A finite family of finite modules in a fixed order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModuleFamily {
    /// `Z/m` for `2 ≤ m ≤ max`.
    Cyclic { max: u64, over_integers: bool },
    /// `Z/a ⊕ Z/b` for `2 ≤ a ≤ b`, `ab ≤ max_product`, over `Z/lcm(a, b)`.
    Pairs { max_product: u64, over_integers: bool },
    /// `Z/p` for primes `p ≤ max`.
    Primes { max: u64, over_integers: bool },
}

impl ModuleFamily {
    pub fn over_integers(self) -> bool {
        match self {
            ModuleFamily::Cyclic { over_integers, .. }
            | ModuleFamily::Pairs { over_integers, .. }
            | ModuleFamily::Primes { over_integers, .. } => over_integers,
        }
    }

    pub fn modules(self) -> Vec<ModulePresentation> {
        let ring_for = |modulus: u64| {
            if self.over_integers() {
                Ring::Integers
            } else {
                Ring::modular(modulus).expect("modulus at least 2")
            }
        };
        match self {
            ModuleFamily::Cyclic { max, .. } => (2..=max).map(|m| ModulePresentation::cyclic(ring_for(m), m)).collect(),
            ModuleFamily::Primes { max, .. } => (2..=max)
                .filter(|&p| is_prime(p))
                .map(|p| ModulePresentation::cyclic(ring_for(p), p))
                .collect(),
            ModuleFamily::Pairs { max_product, .. } => {
                let mut out = Vec::new();
                for a in 2..=max_product {
                    for b in a..=max_product / a {
                        out.push(ModulePresentation::direct_sum(ring_for(a.lcm(&b)), &[a, b]));
                    }
                }
                out
            }
        }
    }
}

impl fmt::Display for ModuleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (name, bound) = match self {
            ModuleFamily::Cyclic { max, .. } => ("cyclic", max),
            ModuleFamily::Pairs { max_product, .. } => ("pairs", max_product),
            ModuleFamily::Primes { max, .. } => ("primes", max),
        };
        write!(f, "{name}:{bound}")?;
        if self.over_integers() {
            write!(f, "@Z")?;
        }
        Ok(())
    }
}

impl FromStr for ModuleFamily {
    type Err = ScanError;

    /// `cyclic:N`, `pairs:N` or `primes:N`, with an optional `@Z` suffix for
    /// the same modules over `Z`.
    fn from_str(s: &str) -> Result<Self, ScanError> {
        let bad = || ScanError::UnknownFamily(s.to_string());
        let (body, over_integers) = match s.strip_suffix("@Z") {
            Some(b) => (b, true),
            None => (s, false),
        };
        let (name, bound) = body.split_once(':').ok_or_else(bad)?;
        let bound: u64 = bound.parse().map_err(|_| bad())?;
        match name {
            "cyclic" => Ok(ModuleFamily::Cyclic {
                max: bound,
                over_integers,
            }),
            "pairs" => Ok(ModuleFamily::Pairs {
                max_product: bound,
                over_integers,
            }),
            "primes" => Ok(ModuleFamily::Primes {
                max: bound,
                over_integers,
            }),
            _ => Err(bad()),
        }
    }
}

/// The statements a scan can test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Claim {
    PureImplies2Pure,
    Hierarchy,
    SufficientProduct,
    SufficientScaledPure,
    Transitive,
    Hereditary,
    QuotientLifting,
    PidFactorization,
    SquarefreeCoprime,
    LocalGlobal,
    ChainClosure,
    FieldsFullyPure,
    OracleEquivalence,
    WitnessReplay,
    ColonTransfer,
    ProductCharacterization,
    MaximalNPure,
    WsasIdentity,
    Finiteness,
}

impl Claim {
    pub const ALL: [Claim; 19] = [
        Claim::PureImplies2Pure,
        Claim::Hierarchy,
        Claim::SufficientProduct,
        Claim::SufficientScaledPure,
        Claim::Transitive,
        Claim::Hereditary,
        Claim::QuotientLifting,
        Claim::PidFactorization,
        Claim::SquarefreeCoprime,
        Claim::LocalGlobal,
        Claim::ChainClosure,
        Claim::FieldsFullyPure,
        Claim::OracleEquivalence,
        Claim::WitnessReplay,
        Claim::ColonTransfer,
        Claim::ProductCharacterization,
        Claim::MaximalNPure,
        Claim::WsasIdentity,
        Claim::Finiteness,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Claim::PureImplies2Pure => "pure-implies-2pure",
            Claim::Hierarchy => "hierarchy",
            Claim::SufficientProduct => "sufficient-product",
            Claim::SufficientScaledPure => "sufficient-scaled-pure",
            Claim::Transitive => "transitive",
            Claim::Hereditary => "hereditary",
            Claim::QuotientLifting => "quotient-lifting",
            Claim::PidFactorization => "pid-factorization",
            Claim::SquarefreeCoprime => "squarefree-coprime",
            Claim::LocalGlobal => "local-global",
            Claim::ChainClosure => "chain-closure",
            Claim::FieldsFullyPure => "fields-fully-pure",
            Claim::OracleEquivalence => "oracle-equivalence",
            Claim::WitnessReplay => "witness-replay",
            Claim::ColonTransfer => "colon-transfer",
            Claim::ProductCharacterization => "product-characterization",
            Claim::MaximalNPure => "maximal-n-pure",
            Claim::WsasIdentity => "wsas-identity",
            Claim::Finiteness => "finiteness",
        }
    }

    /// Levels scanned when the caller does not choose.
    pub fn default_levels(self) -> Vec<u32> {
        match self {
            Claim::PureImplies2Pure => vec![2],
            Claim::Hierarchy | Claim::SufficientProduct | Claim::WitnessReplay | Claim::FieldsFullyPure => {
                (1..=4).collect()
            }
            Claim::OracleEquivalence | Claim::ChainClosure => (1..=3).collect(),
            Claim::LocalGlobal => vec![2],
            Claim::SufficientScaledPure
            | Claim::Transitive
            | Claim::Hereditary
            | Claim::QuotientLifting
            | Claim::ColonTransfer
            | Claim::ProductCharacterization
            | Claim::MaximalNPure => vec![2, 3],
            Claim::PidFactorization | Claim::SquarefreeCoprime | Claim::WsasIdentity | Claim::Finiteness => {
                vec![]
            }
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Claim {
    type Err = ScanError;

    fn from_str(s: &str) -> Result<Self, ScanError> {
        Claim::ALL
            .into_iter()
            .find(|c| c.id() == s)
            .ok_or_else(|| ScanError::UnknownClaim(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanLimits {
    /// Levels to scan; `None` takes [`Claim::default_levels`].
    pub levels: Option<Vec<u32>>,
    pub threads: usize,
    pub bound: u64,
    pub budget: usize,
}

impl Default for ScanLimits {
    fn default() -> Self {
        Self {
            levels: None,
            threads: 1,
            bound: DEFAULT_BOUND,
            budget: DEFAULT_ELEMENT_BUDGET,
        }
    }
}

/// One failing instance of a claim.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub claim: Claim,
    pub module: String,
    pub level: Option<u32>,
    pub submodules: Vec<String>,
    pub ideals: Vec<String>,
    pub detail: String,
    /// Whether the element oracle reproduces the failing identity at the
    /// reported ideals; `None` when the presentation is out of its reach or
    /// the claim carries no ideal witness.
    pub oracle_confirmed: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanReport {
    pub claim: Claim,
    pub family: ModuleFamily,
    pub levels: Vec<u32>,
    pub modules: usize,
    pub scanned_instances: u64,
    pub violations: Vec<Violation>,
    pub elapsed: Duration,
}

impl ScanReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

fn pool(threads: usize) -> Result<rayon::ThreadPool, ScanError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| ScanError::ThreadPool(e.to_string()))
}

fn levels_of(limits: &ScanLimits, claim: Claim) -> Result<Vec<PurityLevel>, ScanError> {
    let raw = limits.levels.clone().unwrap_or_else(|| claim.default_levels());
    Ok(raw.into_iter().map(PurityLevel::new).collect::<Result<_, _>>()?)
}

/// Tests `claim` on every instance of `family`.
pub fn conjecture_scan(claim: Claim, family: ModuleFamily, limits: &ScanLimits) -> Result<ScanReport, ScanError> {
    let start = Instant::now();
    let levels = levels_of(limits, claim)?;
    let modules = family.modules();
    let results: Vec<Result<(u64, Vec<Violation>), ScanError>> = pool(limits.threads)?.install(|| {
        modules
            .par_iter()
            .map(|m| {
                let mut scan = InstanceScan::new(m, limits)?;
                scan.run(claim, &levels)?;
                Ok((scan.count, scan.violations))
            })
            .collect()
    });
    let mut scanned = 0;
    let mut violations = Vec::new();
    for r in results {
        let (c, v) = r?;
        scanned += c;
        violations.extend(v);
    }
    Ok(ScanReport {
        claim,
        family,
        levels: levels.iter().map(|l| l.get()).collect(),
        modules: modules.len(),
        scanned_instances: scanned,
        violations,
        elapsed: start.elapsed(),
    })
}

/// Per-module state shared by all checks of one claim.
struct InstanceScan<'a> {
    module: &'a ModulePresentation,
    limits: &'a ScanLimits,
    ctx: PurityContext,
    subs: Vec<Submodule>,
    count: u64,
    violations: Vec<Violation>,
}

impl<'a> InstanceScan<'a> {
    fn new(module: &'a ModulePresentation, limits: &'a ScanLimits) -> Result<Self, ScanError> {
        Ok(Self {
            module,
            limits,
            ctx: PurityContext::new(module, auto_policy(module, limits.bound))?,
            subs: enumerate_submodules(module, limits.budget)?,
            count: 0,
            violations: Vec::new(),
        })
    }

    fn context_for(&self, m: &ModulePresentation) -> Result<PurityContext, ScanError> {
        Ok(PurityContext::new(m, auto_policy(m, self.limits.bound))?)
    }

    fn report(
        &mut self,
        claim: Claim,
        module: &ModulePresentation,
        level: Option<PurityLevel>,
        submodules: &[&Submodule],
        witness: Option<(&Submodule, &Verdict)>,
        detail: String,
    ) {
        let (ideals, confirmed) = match witness.and_then(|(n, v)| v.witness().map(|w| (n, w))) {
            Some((n, w)) if !w.ideals.is_empty() => {
                let confirmed = OracleModule::with_budget(n.parent(), self.limits.budget)
                    .ok()
                    .and_then(|o| o.from_submodule(n).ok().map(|s| oracle_replay(&s, &w.ideals)));
                (w.ideals.iter().map(ToString::to_string).collect(), confirmed)
            }
            _ => (Vec::new(), None),
        };
        self.violations.push(Violation {
            claim,
            module: module.to_string(),
            level: level.map(PurityLevel::get),
            submodules: submodules.iter().map(ToString::to_string).collect(),
            ideals,
            detail,
            oracle_confirmed: confirmed,
        });
    }

    fn run(&mut self, claim: Claim, levels: &[PurityLevel]) -> Result<(), ScanError> {
        match claim {
            Claim::PureImplies2Pure => self.implication_chain(claim, &[PurityLevel::PURE, PurityLevel::TWO]),
            Claim::Hierarchy => {
                let mut chain: Vec<PurityLevel> = levels.to_vec();
                chain.sort();
                if chain.first().is_some_and(|l| l.get() > 1) {
                    chain.insert(0, PurityLevel::new(chain[0].get() - 1)?);
                }
                self.implication_chain(claim, &chain)
            }
            Claim::SufficientProduct => self.sufficient_product(levels),
            Claim::SufficientScaledPure => self.sufficient_scaled_pure(levels),
            Claim::Transitive => self.transitive(levels),
            Claim::Hereditary => self.hereditary(levels),
            Claim::QuotientLifting => self.quotient_lifting(levels),
            Claim::PidFactorization => self.pid_factorization(),
            Claim::SquarefreeCoprime => self.squarefree_coprime(),
            Claim::LocalGlobal => self.local_global(levels),
            Claim::ChainClosure => self.chain_closure(levels),
            Claim::FieldsFullyPure => self.fields_fully_pure(levels),
            Claim::OracleEquivalence => self.oracle_equivalence(levels),
            Claim::WitnessReplay => self.witness_replay(levels),
            Claim::ColonTransfer => self.colon_transfer(levels),
            Claim::ProductCharacterization => self.product_characterization(levels),
            Claim::MaximalNPure => self.maximal_n_pure(levels),
            Claim::WsasIdentity => self.wsas_identity(),
            Claim::Finiteness => self.finiteness(),
        }
    }

    /// Consecutive levels: `chain[i]`-pure must imply `chain[i+1]`-pure.
    fn implication_chain(&mut self, claim: Claim, chain: &[PurityLevel]) -> Result<(), ScanError> {
        let subs = self.subs.clone();
        for n in &subs {
            for pair in chain.windows(2) {
                self.count += 1;
                let lower = self.ctx.n_pure(n, pair[0])?;
                let upper = self.ctx.n_pure(n, pair[1])?;
                if lower.is_holds() && upper.is_fails() {
                    let m = self.module;
                    self.report(
                        claim,
                        m,
                        Some(pair[1]),
                        &[n],
                        Some((n, &upper)),
                        format!("{} but not {}", pair[0], pair[1]),
                    );
                }
            }
        }
        Ok(())
    }

    fn sufficient_product(&mut self, levels: &[PurityLevel]) -> Result<(), ScanError> {
        let subs = self.subs.clone();
        for n in &subs {
            for &level in levels.iter().filter(|l| l.get() >= 2) {
                self.count += 1;
                let premise = self.ctx.identity_failure(n, level.get() as usize, false)?.is_none();
                let verdict = self.ctx.n_pure(n, level)?;
                if premise && verdict.is_fails() {
                    let m = self.module;
                    self.report(
                        Claim::SufficientProduct,
                        m,
                        Some(level),
                        &[n],
                        Some((n, &verdict)),
                        "product identity without the ambient term holds".into(),
                    );
                }
            }
        }
        Ok(())
    }

    fn sufficient_scaled_pure(&mut self, levels: &[PurityLevel]) -> Result<(), ScanError> {
        let subs = self.subs.clone();
        let ideals: Vec<Ideal> = self.ctx.proper_ideals().to_vec();
        for n in &subs {
            let mut premise = true;
            for i in &ideals {
                if !self.ctx.pure(&n.scale(i)?)?.is_holds() {
                    premise = false;
                    break;
                }
            }
            for &level in levels {
                self.count += 1;
                let verdict = self.ctx.n_pure(n, level)?;
                if premise && verdict.is_fails() {
                    let m = self.module;
                    self.report(
                        Claim::SufficientScaledPure,
                        m,
                        Some(level),
                        &[n],
                        Some((n, &verdict)),
                        "every IN is pure".into(),
                    );
                }
            }
        }
        Ok(())
    }

    /// Pairs `N ⊆ K` in enumeration order.
    fn nested_pairs(&self) -> Result<Vec<(Submodule, Submodule)>, ScanError> {
        let mut out = Vec::new();
        for k in &self.subs {
            for n in &self.subs {
                if n.is_contained_in(k)? {
                    out.push((n.clone(), k.clone()));
                }
            }
        }
        Ok(out)
    }

    fn transitive(&mut self, levels: &[PurityLevel]) -> Result<(), ScanError> {
        let subs = self.subs.clone();
        for k in &subs {
            let k_module = k.as_module();
            let mut k_ctx = self.context_for(&k_module)?;
            for n in &subs {
                if !n.is_contained_in(k)? {
                    continue;
                }
                let n_in_k = n.relative_to(k, &k_module)?;
                for &level in levels {
                    self.count += 1;
                    if !self.ctx.n_pure(k, level)?.is_holds() || !k_ctx.n_pure(&n_in_k, level)?.is_holds() {
                        continue;
                    }
                    let verdict = self.ctx.n_pure(n, level)?;
                    if verdict.is_fails() {
                        let m = self.module;
                        self.report(
                            Claim::Transitive,
                            m,
                            Some(level),
                            &[n, k],
                            Some((n, &verdict)),
                            "N is n-pure in K and K is n-pure in M".into(),
                        );
                    }
                }
            }
        }
        Ok(())
    }

    fn hereditary(&mut self, levels: &[PurityLevel]) -> Result<(), ScanError> {
        let oracle = OracleModule::with_budget(self.module, self.limits.budget).ok();
        for (n, k) in self.nested_pairs()? {
            let quotient = self.module.quotient(&n)?;
            let k_bar = k.image_in(&quotient)?;
            let mut q_ctx = self.context_for(&quotient)?;
            for &level in levels {
                self.count += 1;
                if !self.ctx.n_pure(&k, level)?.is_holds() {
                    continue;
                }
                let verdict = q_ctx.n_pure(&k_bar, level)?;
                if verdict.is_fails() {
                    let m = self.module;
                    self.report(
                        Claim::Hereditary,
                        m,
                        Some(level),
                        &[&n, &k],
                        Some((&k_bar, &verdict)),
                        format!("K is n-pure in M but K/N is not n-pure in {quotient}"),
                    );
                    // replay inside M, where the oracle presentation applies
                    if let (Some(o), Some(w)) = (&oracle, verdict.witness()) {
                        let confirmed =
                            oracle_replay_quotient(&o.from_submodule(&k)?, &o.from_submodule(&n)?, &w.ideals);
                        if let Some(v) = self.violations.last_mut() {
                            v.oracle_confirmed = Some(confirmed);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn quotient_lifting(&mut self, levels: &[PurityLevel]) -> Result<(), ScanError> {
        for (n, k) in self.nested_pairs()? {
            if !self.ctx.pure(&n)?.is_holds() {
                continue;
            }
            let quotient = self.module.quotient(&n)?;
            let k_bar = k.image_in(&quotient)?;
            let mut q_ctx = self.context_for(&quotient)?;
            for &level in levels {
                self.count += 1;
                if !q_ctx.n_pure(&k_bar, level)?.is_holds() {
                    continue;
                }
                let verdict = self.ctx.n_pure(&k, level)?;
                if verdict.is_fails() {
                    let m = self.module;
                    self.report(
                        Claim::QuotientLifting,
                        m,
                        Some(level),
                        &[&n, &k],
                        Some((&k, &verdict)),
                        "N pure and K/N n-pure".into(),
                    );
                }
            }
        }
        Ok(())
    }

    fn pid_factorization(&mut self) -> Result<(), ScanError> {
        // distinct primes from {2, 3, 5}, exponents 1 or 2
        let mut tuples: Vec<Vec<(u64, u32)>> = vec![vec![]];
        for p in [2u64, 3, 5] {
            let mut next = Vec::new();
            for t in &tuples {
                next.push(t.clone());
                for s in 1..=2 {
                    let mut u = t.clone();
                    u.push((p, s));
                    next.push(u);
                }
            }
            tuples = next;
        }
        tuples.retain(|t| !t.is_empty());
        let subs = self.subs.clone();
        for n in &subs {
            for t in &tuples {
                self.count += 1;
                let v = check_pid_factorization(n, t)?;
                if v.is_fails() {
                    let m = self.module;
                    let powers: Vec<String> = t.iter().map(|(p, s)| format!("{p}^{s}")).collect();
                    self.report(Claim::PidFactorization, m, None, &[n], None, powers.join("·"));
                }
            }
        }
        Ok(())
    }

    fn squarefree_coprime(&mut self) -> Result<(), ScanError> {
        let squarefree: Vec<u64> = (2..=30u64)
            .filter(|&x| factorize(&BigInt::from(x)).iter().all(|&(_, e)| e == 1))
            .collect();
        let subs = self.subs.clone();
        for n in &subs {
            for (i, &a) in squarefree.iter().enumerate() {
                for &b in &squarefree[i + 1..] {
                    if a.gcd(&b) != 1 {
                        continue;
                    }
                    self.count += 1;
                    if check_coprime_product(n, a, b)?.is_fails() {
                        let m = self.module;
                        self.report(Claim::SquarefreeCoprime, m, None, &[n], None, format!("a={a}, b={b}"));
                    }
                }
            }
        }
        Ok(())
    }

    fn local_global(&mut self, levels: &[PurityLevel]) -> Result<(), ScanError> {
        let primes: Vec<u64> = factorize(&self.module.exponent()).into_iter().map(|(p, _)| p).collect();
        let mut locals = Vec::new();
        for &p in &primes {
            let loc = self.module.localize(p)?;
            let ctx = self.context_for(loc.module())?;
            locals.push((loc, ctx));
        }
        let subs = self.subs.clone();
        for n in &subs {
            for &level in levels {
                self.count += 1;
                let global = self.ctx.n_pure(n, level)?;
                let mut local_ok = true;
                let mut local_failure = None;
                for (loc, ctx) in &mut locals {
                    let n_p = loc.transfer(n)?;
                    let v = ctx.n_pure(&n_p, level)?;
                    if !v.is_holds() {
                        local_ok = false;
                        if local_failure.is_none() {
                            local_failure = Some((loc.prime(), n_p, v));
                        }
                    }
                }
                if global.is_holds() != local_ok {
                    let m = self.module;
                    match (&global, local_failure) {
                        (g, _) if g.is_fails() => self.report(
                            Claim::LocalGlobal,
                            m,
                            Some(level),
                            &[n],
                            Some((n, g)),
                            "fails globally, holds at every prime".into(),
                        ),
                        (_, Some((p, n_p, v))) => self.report(
                            Claim::LocalGlobal,
                            m,
                            Some(level),
                            &[n, &n_p],
                            Some((&n_p, &v)),
                            format!("holds globally, {} at p={p}", v.outcome()),
                        ),
                        _ => self.report(Claim::LocalGlobal, m, Some(level), &[n], None, "undecided".into()),
                    }
                }
            }
        }
        Ok(())
    }

    fn chain_closure(&mut self, levels: &[PurityLevel]) -> Result<(), ScanError> {
        let subs = self.subs.clone();
        for &level in levels {
            let mut pure = Vec::new();
            for s in &subs {
                if self.ctx.n_pure(s, level)?.is_holds() {
                    pure.push(s.clone());
                }
            }
            // every two-step chain, its union being the larger member
            for a in &pure {
                for b in &pure {
                    if !a.is_contained_in(b)? {
                        continue;
                    }
                    self.count += 1;
                    let union = a.sum(b)?;
                    let v = self.ctx.n_pure(&union, level)?;
                    if !v.is_holds() {
                        let m = self.module;
                        self.report(
                            Claim::ChainClosure,
                            m,
                            Some(level),
                            &[a, b],
                            Some((&union, &v)),
                            "union".into(),
                        );
                    }
                }
            }
        }
        Ok(())
    }

    fn fields_fully_pure(&mut self, levels: &[PurityLevel]) -> Result<(), ScanError> {
        let is_field = matches!(self.module.ring(), Ring::Modular(m) if is_prime(m.get()));
        if !is_field {
            return Ok(());
        }
        for &level in levels {
            self.count += 1;
            let v = is_fully_n_pure(self.module, level, self.ctx.policy())?;
            if !v.is_holds() {
                let m = self.module;
                let subs: Vec<Submodule> = v.witness().map(|w| w.submodules.clone()).unwrap_or_default();
                let refs: Vec<&Submodule> = subs.iter().collect();
                self.report(Claim::FieldsFullyPure, m, Some(level), &refs, None, v.to_string());
            }
        }
        Ok(())
    }

    fn oracle_equivalence(&mut self, levels: &[PurityLevel]) -> Result<(), ScanError> {
        let oracle = OracleModule::with_budget(self.module, self.limits.budget)?;
        let policy = self.ctx.policy();
        let subs = self.subs.clone();
        for n in &subs {
            let set = oracle.from_submodule(n)?;
            if set.to_submodule()? != *n {
                let m = self.module;
                self.report(
                    Claim::OracleEquivalence,
                    m,
                    None,
                    &[n],
                    None,
                    "set round trip differs".into(),
                );
            }
            for &level in levels {
                self.count += 1;
                let lattice = self.ctx.n_pure(n, level)?;
                let elements = oracle_is_n_pure(&set, level, policy)?;
                if lattice.outcome() != elements.outcome() {
                    let m = self.module;
                    let which = if lattice.is_fails() { &lattice } else { &elements };
                    self.report(
                        Claim::OracleEquivalence,
                        m,
                        Some(level),
                        &[n],
                        Some((n, which)),
                        format!("lattice {}, oracle {}", lattice.outcome(), elements.outcome()),
                    );
                }
            }
        }
        Ok(())
    }

    fn witness_replay(&mut self, levels: &[PurityLevel]) -> Result<(), ScanError> {
        let oracle = OracleModule::with_budget(self.module, self.limits.budget).ok();
        let subs = self.subs.clone();
        for n in &subs {
            for &level in levels {
                let v = self.ctx.n_pure(n, level)?;
                let Some(w) = v.witness() else { continue };
                self.count += 1;
                let lattice_ok = crate::purity::witness_breaks_identity(n, &w.ideals)?;
                let oracle_ok = match &oracle {
                    Some(o) => oracle_replay(&o.from_submodule(n)?, &w.ideals),
                    None => true,
                };
                if !(lattice_ok && oracle_ok) {
                    let m = self.module;
                    self.report(
                        Claim::WitnessReplay,
                        m,
                        Some(level),
                        &[n],
                        Some((n, &v)),
                        format!("replay: lattice {lattice_ok}, oracle {oracle_ok}"),
                    );
                }
            }
        }
        Ok(())
    }

    fn colon_transfer(&mut self, levels: &[PurityLevel]) -> Result<(), ScanError> {
        if !self.module.is_faithful() || !is_multiplication_module(self.module)?.is_holds() {
            return Ok(());
        }
        let ring_module = ModulePresentation::ring_as_module(self.module.ring());
        if !ring_module.is_finite() {
            return Ok(());
        }
        let mut r_ctx = self.context_for(&ring_module)?;
        let subs = self.subs.clone();
        for n in &subs {
            let ideal = ring_module.span([[n.colon().generator().clone()]])?;
            for &level in levels {
                self.count += 1;
                let left = self.ctx.n_pure(n, level)?;
                let right = r_ctx.n_pure(&ideal, level)?;
                if left.outcome() != right.outcome() {
                    let m = self.module;
                    let w = if left.is_fails() { (n, &left) } else { (&ideal, &right) };
                    self.report(
                        Claim::ColonTransfer,
                        m,
                        Some(level),
                        &[n, &ideal],
                        Some(w),
                        format!("submodule {}, colon ideal {}", left.outcome(), right.outcome()),
                    );
                }
            }
        }
        Ok(())
    }

    fn product_characterization(&mut self, levels: &[PurityLevel]) -> Result<(), ScanError> {
        if !is_multiplication_module(self.module)?.is_holds() {
            return Ok(());
        }
        for &level in levels {
            self.count += 1;
            let v = check_product_characterization(self.module, level)?;
            if !v.is_holds() {
                let m = self.module;
                let subs: Vec<Submodule> = v.witness().map(|w| w.submodules.clone()).unwrap_or_default();
                let refs: Vec<&Submodule> = subs.iter().collect();
                self.report(
                    Claim::ProductCharacterization,
                    m,
                    Some(level),
                    &refs,
                    None,
                    "product identity and full purity disagree".into(),
                );
            }
        }
        Ok(())
    }

    fn maximal_n_pure(&mut self, levels: &[PurityLevel]) -> Result<(), ScanError> {
        let subs = self.subs.clone();
        for &level in levels {
            let mut pure = Vec::new();
            for s in &subs {
                pure.push(self.ctx.n_pure(s, level)?.is_holds());
            }
            for n in &subs {
                self.count += 1;
                let k = maximal_n_pure_among(&mut self.ctx, &subs, n, level)?;
                let k_idx = subs.iter().position(|s| s == &k);
                let mut problem = None;
                if !k.is_contained_in(n)? {
                    problem = Some("result not inside N".to_string());
                } else if !k_idx.is_some_and(|i| pure[i]) {
                    problem = Some("result not n-pure".to_string());
                } else {
                    for (s, &p) in subs.iter().zip(&pure) {
                        if p && s != &k && k.is_contained_in(s)? && s.is_contained_in(n)? {
                            problem = Some(format!("{s} is larger"));
                            break;
                        }
                    }
                }
                if let Some(d) = problem {
                    let m = self.module;
                    self.report(Claim::MaximalNPure, m, Some(level), &[n, &k], None, d);
                }
            }
        }
        Ok(())
    }

    fn wsas_identity(&mut self) -> Result<(), ScanError> {
        if !matches!(self.module.ring(), Ring::Modular(_)) {
            return Ok(());
        }
        let subs = self.subs.clone();
        for n in subs.iter().filter(|s| !s.is_zero()) {
            self.count += 1;
            if !is_weakly_strongly_2_absorbing_second(n)?.is_holds() {
                continue;
            }
            let v = check_wsas_identity(n)?;
            if !v.is_holds() {
                let m = self.module;
                let detail = v.witness().map(ToString::to_string).unwrap_or_default();
                self.report(Claim::WsasIdentity, m, None, &[n], None, detail);
            }
        }
        Ok(())
    }

    fn finiteness(&mut self) -> Result<(), ScanError> {
        let policy = self.ctx.policy();
        if !is_fully_cancellation(self.module, policy)?.is_holds() {
            return Ok(());
        }
        self.count += 1;
        let first = maximal_pure_submodules(&self.module.whole(), policy, true)?;
        let second = maximal_pure_submodules(&self.module.whole(), policy, true)?;
        if first != second || first.len() > self.subs.len() {
            let m = self.module;
            self.report(
                Claim::Finiteness,
                m,
                None,
                &[],
                None,
                format!("{} maximal pure", first.len()),
            );
        }
        Ok(())
    }
}

/// Patterns understood by [`witness_mine`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MinePattern {
    /// `n`-pure but not `(n-1)`-pure.
    NPureNotLower,
}

impl FromStr for MinePattern {
    type Err = ScanError;

    fn from_str(s: &str) -> Result<Self, ScanError> {
        match s {
            "n-pure-not-(n-1)-pure" | "n-pure-not-lower" => Ok(MinePattern::NPureNotLower),
            _ => Err(ScanError::UnknownPattern(s.to_string())),
        }
    }
}

impl fmt::Display for MinePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("n-pure-not-(n-1)-pure")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinedWitness {
    pub module: ModulePresentation,
    pub submodule: Submodule,
    pub level: PurityLevel,
    pub lower: Verdict,
}

/// All `(M, N)` in `family` where `N` is `level`-pure and not
/// `(level - 1)`-pure, in family order.
pub fn witness_mine(
    pattern: MinePattern,
    family: ModuleFamily,
    level: PurityLevel,
    limits: &ScanLimits,
) -> Result<Vec<MinedWitness>, ScanError> {
    let MinePattern::NPureNotLower = pattern;
    let lower = PurityLevel::new(level.get().saturating_sub(1).max(1))?;
    if lower == level {
        return Ok(Vec::new());
    }
    let modules = family.modules();
    let per_module: Vec<Result<Vec<MinedWitness>, ScanError>> = pool(limits.threads)?.install(|| {
        modules
            .par_iter()
            .map(|m| {
                let mut ctx = PurityContext::new(m, auto_policy(m, limits.bound))?;
                let mut found = Vec::new();
                for n in enumerate_submodules(m, limits.budget)? {
                    let low = ctx.n_pure(&n, lower)?;
                    if low.outcome() == Outcome::Fails && ctx.n_pure(&n, level)?.is_holds() {
                        found.push(MinedWitness {
                            module: m.clone(),
                            submodule: n,
                            level,
                            lower: low,
                        });
                    }
                }
                Ok(found)
            })
            .collect()
    });
    let mut out = Vec::new();
    for r in per_module {
        out.extend(r?);
    }
    Ok(out)
}
