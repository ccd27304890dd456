use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use npure_cli::problem::PolicySpec;
use npure_cli::{
    paper_suite_cases, run_check, run_enumerate, run_maximal_pure, run_mine, run_paper_suite, run_scan, CliError,
    Format, MachineReport, Options, ProblemDescription, EXIT_INPUT,
};

/// Decide purity, 2-purity and n-purity of submodules over Z and Z/mZ.
#[derive(Debug, Parser)]
#[command(name = "npure", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Purity level; checks default to 2.
    #[arg(long = "n", global = true)]
    level: Option<u32>,
    /// exhaustive, residue[:e] or bounded:B; chosen per module when absent.
    #[arg(long, global = true)]
    policy: Option<String>,
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Include elapsed time in the report.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Machine,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the checks listed in a problem file.
    Check { file: PathBuf },
    /// Reproduce the worked examples and proposition scans.
    PaperSuite,
    /// Test a claim on every instance of a module family.
    Scan {
        claim: String,
        #[arg(long, default_value = "cyclic:64")]
        family: String,
        /// Comma-separated levels; overrides --n.
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<u32>>,
    },
    /// Search a module family for submodules matching a pattern.
    Mine {
        pattern: String,
        #[arg(long, default_value = "cyclic:16")]
        family: String,
    },
    /// List every submodule of the module in a problem file.
    Enumerate { file: PathBuf },
    /// Maximal pure submodules of a named submodule (default: the whole module).
    MaximalPure {
        file: PathBuf,
        #[arg(long)]
        submodule: Option<String>,
        /// Count K itself as a candidate.
        #[arg(long)]
        include_self: bool,
    },
}

fn load(path: &Path) -> Result<ProblemDescription, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    ProblemDescription::parse(&text)
}

fn run(cli: Cli) -> Result<MachineReport, CliError> {
    let g = &cli.global;
    let opts = Options {
        level: g.level,
        policy: g.policy.as_deref().map(str::parse::<PolicySpec>).transpose()?,
        threads: g.threads,
        timing: g.timing,
    };
    match cli.command {
        Command::Check { file } => run_check(load(&file)?, &opts),
        Command::PaperSuite => run_paper_suite(&paper_suite_cases(), &opts),
        Command::Scan { claim, family, levels } => run_scan(&claim, &family, levels, &opts),
        Command::Mine { pattern, family } => run_mine(&pattern, &family, &opts),
        Command::Enumerate { file } => run_enumerate(load(&file)?, &opts),
        Command::MaximalPure {
            file,
            submodule,
            include_self,
        } => run_maximal_pure(load(&file)?, submodule.as_deref(), include_self, &opts),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    let format = match cli.global.format {
        FormatArg::Text => Format::Text,
        FormatArg::Machine => Format::Machine,
    };
    match run(cli) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(report.render(format).as_bytes());
            let _ = out.flush();
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("npure: {e}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
