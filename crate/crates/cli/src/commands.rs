use std::time::Instant;

use npure_core::enumerate::enumerate_submodules;
use npure_core::purity::{
    auto_policy, check_colon_transfer, check_coprime_product, check_pid_factorization, check_product_characterization,
    check_wsas_identity, is_fully_cancellation, is_fully_n_pure, is_multiplication_module, is_n_pure, is_pure,
    is_ribenboim_pure, is_weakly_strongly_2_absorbing_second, maximal_n_pure_within, maximal_pure_submodules, Outcome,
    PurityError, PurityLevel, Verdict,
};
use npure_core::scan::{conjecture_scan, witness_mine, Claim, MinePattern, ModuleFamily, ScanLimits, DEFAULT_BOUND};
use npure_core::{ModulePresentation, QuantificationPolicy, Submodule, DEFAULT_ELEMENT_BUDGET};

use crate::problem::{CheckKind, CheckSpec, PolicySpec, ProblemDescription};
use crate::report::{MachineReport, Timing, VerdictEntry, ViolationEntry};
use crate::CliError;

pub const DEFAULT_LEVEL: u32 = 2;

/// Flags shared by every command. Per-check fields in a problem file win
/// over these.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Options {
    pub level: Option<u32>,
    pub policy: Option<PolicySpec>,
    pub threads: usize,
    pub timing: bool,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            level: None,
            policy: None,
            threads: 1,
            timing: false,
        }
    }
}

impl Options {
    fn fingerprint(&self) -> String {
        let level = self.level.map(|n| n.to_string()).unwrap_or_else(|| "default".into());
        let policy = self.policy.map(|p| p.to_string()).unwrap_or_else(|| "auto".into());
        format!("n={level};policy={policy}")
    }

    fn limits(&self, levels: Option<Vec<u32>>) -> ScanLimits {
        ScanLimits {
            levels,
            threads: self.threads.max(1),
            ..ScanLimits::default()
        }
    }
}

fn finish(mut report: MachineReport, started: Instant, opts: &Options) -> MachineReport {
    if opts.timing {
        report.timing = Some(Timing {
            elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
        });
    }
    report
}

fn level_of(n: u32) -> Result<PurityLevel, CliError> {
    PurityLevel::new(n).map_err(|e| CliError::Input(e.to_string()))
}

fn check_err(check: &str) -> impl Fn(PurityError) -> CliError + '_ {
    move |e| CliError::Check {
        check: check.to_string(),
        reason: e.to_string(),
    }
}

struct Loaded {
    problem: ProblemDescription,
    module: ModulePresentation,
    named: Vec<(String, Submodule)>,
}

impl Loaded {
    fn new(problem: ProblemDescription) -> Result<Self, CliError> {
        let module = problem.module()?;
        let named = problem.named_submodules(&module)?;
        Ok(Self { problem, module, named })
    }

    fn submodule(&self, name: Option<&str>) -> Result<Submodule, CliError> {
        match name {
            None => Ok(self.module.whole()),
            Some(n) => self
                .named
                .iter()
                .find(|(k, _)| k == n)
                .map(|(_, s)| s.clone())
                .ok_or_else(|| CliError::Input(format!("no submodule named `{n}`"))),
        }
    }

    fn policy(&self, explicit: Option<PolicySpec>, bound: Option<u64>) -> Result<QuantificationPolicy, CliError> {
        match explicit {
            Some(p) => p.resolve(&self.module),
            None => Ok(auto_policy(&self.module, bound.unwrap_or(DEFAULT_BOUND))),
        }
    }
}

fn evaluate(loaded: &Loaded, spec: &CheckSpec, opts: &Options) -> Result<VerdictEntry, CliError> {
    let name = spec.display_name();
    let err = check_err(&name);
    let n = loaded.submodule(spec.submodule.as_deref())?;
    let m = &loaded.module;
    let level = level_of(spec.level.or(opts.level).unwrap_or(DEFAULT_LEVEL))?;
    let policy = loaded.policy(spec.policy.or(opts.policy), spec.bound)?;
    let verdict =
        |v: Result<Verdict, PurityError>| v.map(|v| VerdictEntry::from_verdict(name.clone(), &v)).map_err(&err);
    match spec.check {
        CheckKind::Pure => verdict(is_pure(&n, policy)),
        CheckKind::RibenboimPure => verdict(is_ribenboim_pure(&n, policy)),
        CheckKind::NPure => verdict(is_n_pure(&n, level, policy)),
        CheckKind::FullyNPure => verdict(is_fully_n_pure(m, level, policy)),
        CheckKind::Multiplication => verdict(is_multiplication_module(m)),
        CheckKind::FullyCancellation => verdict(is_fully_cancellation(m, policy)),
        CheckKind::Wsas => verdict(is_weakly_strongly_2_absorbing_second(&n)),
        CheckKind::WsasIdentity => verdict(check_wsas_identity(&n)),
        CheckKind::PidFactorization => {
            let pp = spec
                .prime_powers
                .as_deref()
                .ok_or_else(|| CliError::Input(format!("`{name}` needs prime_powers")))?;
            verdict(check_pid_factorization(&n, pp))
        }
        CheckKind::CoprimeProduct => {
            let (a, b) = spec
                .factors
                .ok_or_else(|| CliError::Input(format!("`{name}` needs factors")))?;
            verdict(check_coprime_product(&n, a, b))
        }
        CheckKind::ProductCharacterization => verdict(check_product_characterization(m, level)),
        CheckKind::ColonTransfer => verdict(check_colon_transfer(&n, level, policy)),
        CheckKind::MaximalNPure => {
            let k = maximal_n_pure_within(&n, level, policy).map_err(&err)?;
            let mut e = VerdictEntry::new(name.clone(), Outcome::Holds);
            e.result = Some(vec![k.to_string()]);
            Ok(e)
        }
        CheckKind::MaximalPure => {
            let strict = !spec.include_self.unwrap_or(false);
            let found = maximal_pure_submodules(&n, policy, strict).map_err(&err)?;
            let mut e = VerdictEntry::new(name.clone(), Outcome::Holds);
            e.detail = Some(format!("{} maximal pure submodules", found.len()));
            e.result = Some(found.iter().map(ToString::to_string).collect());
            Ok(e)
        }
    }
}

/// Runs every check of a problem file in file order.
pub fn run_check(problem: ProblemDescription, opts: &Options) -> Result<MachineReport, CliError> {
    let started = Instant::now();
    let loaded = Loaded::new(problem)?;
    if loaded.problem.checks.is_empty() {
        return Err(CliError::Input("the problem lists no checks".into()));
    }
    let canonical = format!("{}|{}", loaded.problem.to_json(), opts.fingerprint());
    let mut report = MachineReport::new("check", &canonical);
    for spec in &loaded.problem.checks {
        report.verdicts.push(evaluate(&loaded, spec, opts)?);
    }
    Ok(finish(report, started, opts))
}

/// Lists every submodule of the problem's module.
pub fn run_enumerate(problem: ProblemDescription, opts: &Options) -> Result<MachineReport, CliError> {
    let started = Instant::now();
    let loaded = Loaded::new(problem)?;
    let subs = enumerate_submodules(&loaded.module, DEFAULT_ELEMENT_BUDGET).map_err(|e| CliError::Check {
        check: "enumerate".into(),
        reason: e.to_string(),
    })?;
    let mut report = MachineReport::new("enumerate", &loaded.problem.to_json());
    let mut e = VerdictEntry::new(format!("submodules of {}", loaded.module), Outcome::Holds);
    e.detail = Some(format!("{} submodules", subs.len()));
    e.result = Some(subs.iter().map(ToString::to_string).collect());
    report.verdicts.push(e);
    Ok(finish(report, started, opts))
}

/// Maximal pure submodules of the named submodule, or of the whole module.
pub fn run_maximal_pure(
    problem: ProblemDescription,
    within: Option<&str>,
    include_self: bool,
    opts: &Options,
) -> Result<MachineReport, CliError> {
    let started = Instant::now();
    let loaded = Loaded::new(problem)?;
    let mut spec = CheckSpec::new(CheckKind::MaximalPure);
    spec.submodule = within.map(str::to_string);
    spec.include_self = Some(include_self);
    let canonical = format!(
        "{}|within={}|include_self={include_self}|{}",
        loaded.problem.to_json(),
        within.unwrap_or("M"),
        opts.fingerprint()
    );
    let mut report = MachineReport::new("maximal-pure", &canonical);
    report.verdicts.push(evaluate(&loaded, &spec, opts)?);
    Ok(finish(report, started, opts))
}

fn parse_family(family: &str) -> Result<ModuleFamily, CliError> {
    family
        .parse()
        .map_err(|e: npure_core::scan::ScanError| CliError::Input(e.to_string()))
}

/// Scans `claim` over `family`. `levels` overrides `--n` and the claim's
/// default levels.
pub fn run_scan(
    claim: &str,
    family: &str,
    levels: Option<Vec<u32>>,
    opts: &Options,
) -> Result<MachineReport, CliError> {
    let started = Instant::now();
    let claim: Claim = claim
        .parse()
        .map_err(|e: npure_core::scan::ScanError| CliError::Input(e.to_string()))?;
    let family = parse_family(family)?;
    let levels = levels.or_else(|| opts.level.map(|n| vec![n]));
    let limits = opts.limits(levels);
    let scan = conjecture_scan(claim, family, &limits).map_err(|e| CliError::Check {
        check: format!("scan {claim}"),
        reason: e.to_string(),
    })?;
    let levels: Vec<String> = scan.levels.iter().map(ToString::to_string).collect();
    let canonical = format!(
        "scan|{}|{}|levels={}|bound={}",
        claim.id(),
        family,
        levels.join(","),
        limits.bound
    );
    let mut report = MachineReport::new("scan", &canonical);
    let outcome = if scan.is_clean() {
        Outcome::Holds
    } else {
        Outcome::Fails
    };
    let mut e = VerdictEntry::new(format!("{} over {}", claim.id(), family), outcome);
    e.detail = Some(format!(
        "{} modules, {} instances, levels [{}], {} violations",
        scan.modules,
        scan.scanned_instances,
        levels.join(","),
        scan.violations.len()
    ));
    report.verdicts.push(e);
    report.violations = scan.violations.iter().map(ViolationEntry::from).collect();
    Ok(finish(report, started, opts))
}

/// Mines `(M, N)` pairs matching `pattern` at level `--n`.
pub fn run_mine(pattern: &str, family: &str, opts: &Options) -> Result<MachineReport, CliError> {
    let started = Instant::now();
    let pattern: MinePattern = pattern
        .parse()
        .map_err(|e: npure_core::scan::ScanError| CliError::Input(e.to_string()))?;
    let family = parse_family(family)?;
    let level = level_of(opts.level.unwrap_or(DEFAULT_LEVEL))?;
    let found = witness_mine(pattern, family, level, &opts.limits(None)).map_err(|e| CliError::Check {
        check: format!("mine {pattern}"),
        reason: e.to_string(),
    })?;
    let canonical = format!("mine|{pattern}|{family}|n={}", level.get());
    let mut report = MachineReport::new("mine", &canonical);
    let mut e = VerdictEntry::new(format!("{pattern} over {family}, n={}", level.get()), Outcome::Holds);
    e.detail = Some(format!("{} witnesses", found.len()));
    e.result = Some(
        found
            .iter()
            .map(|w| {
                let lower = w.lower.witness().map(|x| format!(" [{x}]")).unwrap_or_default();
                format!("{} in {}{lower}", w.submodule, w.module)
            })
            .collect(),
    );
    report.verdicts.push(e);
    Ok(finish(report, started, opts))
}
