use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qrl::bench::{run_bench, BenchConfig, BenchFamily};
use qrl::fuzz::bank::describe;
use qrl::fuzz::{
    campaign, run_differential, shrink, triggers, Bank, CampaignConfig, DiffConfig, FindingKind,
    GenParams, QuantPattern,
};
use qrl::oracle::{eval_elimination, eval_recursive, OracleLimits};
use qrl::qdimacs::{parse_qdimacs_bytes, write_qdimacs, ParseOptions};
use qrl::reducer::{decide_with, DecideOptions};
use qrl::trace::write_trace;
use qrl::{Error, Formula, ScanPolicy};

const EXIT_TRUE: u8 = 10;
const EXIT_FALSE: u8 = 20;
const EXIT_USAGE: u8 = 1;
const EXIT_FINDING: u8 = 2;
const EXIT_REFUSED: u8 = 3;

#[derive(Parser)]
#[command(name = "qrl", version, about = "Literal-closure reduction for QBF, with oracles and a differential fuzzer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct LimitArgs {
    /// Most variables the recursive oracle expands (default 30, or QRL_ORACLE_LIMITS)
    #[arg(long)]
    oracle_vars: Option<usize>,
    /// Most literals the elimination oracle may produce (default 10^6, or QRL_ORACLE_LIMITS)
    #[arg(long)]
    oracle_literals: Option<usize>,
}

impl LimitArgs {
    fn limits(self) -> qrl::Result<OracleLimits> {
        let mut l = OracleLimits::from_env()?;
        if let Some(v) = self.oracle_vars {
            l.max_vars = v;
        }
        if let Some(v) = self.oracle_literals {
            l.max_literals = v;
        }
        Ok(l)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide a QDIMACS formula by reduction
    Solve {
        file: PathBuf,
        /// ascending, descending or random:<seed>
        #[arg(long, default_value = "ascending")]
        policy: ScanPolicy,
        /// Write the reduction trace as JSON
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Answer FALSE as soon as an empty clause appears
        #[arg(long)]
        early_exit: bool,
        /// Accept repeated quantifier blocks and free variables
        #[arg(long)]
        lenient: bool,
    },
    /// Evaluate a formula with an exact oracle
    Oracle {
        file: PathBuf,
        /// recursive or elimination
        #[arg(long, default_value = "recursive")]
        method: String,
        #[arg(long)]
        lenient: bool,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Compare reduction and oracles on one formula and check all invariants
    Check {
        file: PathBuf,
        /// Persist the instance here if anything is flagged
        #[arg(long)]
        bank: Option<PathBuf>,
        #[arg(long)]
        lenient: bool,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Run a differential fuzzing campaign
    Fuzz {
        #[arg(long, default_value_t = 10)]
        vars: u32,
        #[arg(long, default_value_t = 20)]
        clauses: usize,
        /// Clause widths as <min>..<max> or a single number
        #[arg(long, default_value = "1..3")]
        widths: String,
        /// alternating, random:<p_universal> or fixed:<letters>
        #[arg(long, default_value = "random:0.5")]
        pattern: QuantPattern,
        #[arg(long, default_value_t = 1000)]
        count: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        bank: Option<PathBuf>,
        #[arg(long)]
        allow_tautologies: bool,
        #[arg(long)]
        allow_empty_clauses: bool,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Minimize a formula while a finding keeps triggering
    Shrink {
        file: PathBuf,
        /// Finding kind to preserve, e.g. verdict-mismatch or property-2-universal
        #[arg(long)]
        finding: FindingKind,
        /// Output file (standard output when omitted)
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        lenient: bool,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Measure decide on a growing instance family
    Bench {
        /// random-alternating, random-existential or chain
        #[arg(long, default_value = "random-alternating")]
        family: BenchFamily,
        #[arg(long, default_value_t = 10_000)]
        max_size: usize,
        #[arg(long, default_value_t = 8)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Internal(_) => EXIT_FINDING,
                Error::Refused(_) => EXIT_REFUSED,
                _ => EXIT_USAGE,
            })
        }
    }
}

fn read(path: &Path, lenient: bool) -> qrl::Result<Formula> {
    let bytes = fs::read(path)?;
    let options = if lenient {
        ParseOptions::lenient()
    } else {
        ParseOptions::strict()
    };
    parse_qdimacs_bytes(&bytes, options).map_err(|d| {
        Error::InvalidParams(format!("{}:{d}", path.display()))
    })
}

fn verdict_code(v: qrl::Verdict) -> u8 {
    if v.is_true() {
        EXIT_TRUE
    } else {
        EXIT_FALSE
    }
}

fn parse_widths(s: &str) -> qrl::Result<(usize, usize)> {
    let bad = || Error::InvalidParams(format!("widths must be <min>..<max>, got {s:?}"));
    let num = |x: &str| x.trim().parse::<usize>().map_err(|_| bad());
    match s.split_once("..") {
        Some((a, b)) => Ok((num(a)?, num(b.trim_start_matches('='))?)),
        None => num(s).map(|w| (w, w)),
    }
}

fn run(command: Command) -> qrl::Result<u8> {
    match command {
        Command::Solve {
            file,
            policy,
            trace,
            early_exit,
            lenient,
        } => {
            let f = read(&file, lenient)?;
            let t = decide_with(&f, DecideOptions { policy, early_exit })?;
            println!("s cnf {}", t.verdict.digit());
            if let Some(path) = trace {
                fs::write(path, write_trace(&t))?;
            }
            Ok(verdict_code(t.verdict))
        }
        Command::Oracle {
            file,
            method,
            lenient,
            limits,
        } => {
            let f = read(&file, lenient)?;
            let limits = limits.limits()?;
            let v = match method.as_str() {
                "recursive" => eval_recursive(&f, &limits)?,
                "elimination" => eval_elimination(&f, &limits)?,
                _ => return Err(Error::InvalidParams(format!("unknown oracle method {method:?}"))),
            };
            println!("s cnf {}", v.value.digit());
            println!("c method {} work {}", v.method, v.work);
            Ok(verdict_code(v.value))
        }
        Command::Check {
            file,
            bank,
            lenient,
            limits,
        } => {
            let f = read(&file, lenient)?;
            let config = DiffConfig {
                limits: limits.limits()?,
            };
            let r = run_differential(&f, &config)?;
            let outcome = r.oracle.as_ref().expect("full run includes the oracles");
            let show = |x: &Result<qrl::oracle::OracleVerdict, String>| match x {
                Ok(v) => v.value.to_string(),
                Err(_) => "REFUSED".to_string(),
            };
            match r.paper_verdict {
                Some(v) => println!("s cnf {}", v.digit()),
                None => println!("s cnf ?"),
            }
            println!("c decide {}", r.paper_verdict.map_or("ERROR".into(), |v| v.to_string()));
            for (policy, v) in &r.policy_verdicts {
                println!("c policy {policy} {v}");
            }
            println!("c oracle recursive {}", show(&outcome.recursive));
            println!("c oracle elimination {}", show(&outcome.elimination));
            println!("c property-checks {}", r.property_checks);
            println!("c rho-checks {}", r.rho_checks.len());
            for e in &r.internal_errors {
                println!("c internal {e}");
            }
            for k in FindingKind::ALL {
                let status = match r.findings.contains(&k) {
                    true if k.is_reported_only() => "violated (reported only)",
                    true => "VIOLATED",
                    false => "ok",
                };
                println!("c {k} {status}");
            }
            if outcome.recursive.is_err() || outcome.elimination.is_err() {
                return Ok(EXIT_REFUSED);
            }
            if let (Some(dir), false) = (bank, r.findings.is_empty()) {
                let meta = describe(&f, &config, None, None, None)?;
                let p = Bank::open(dir)?.persist(&f, &meta)?;
                println!("c banked {}", p.hash);
            }
            if r.findings.iter().all(|k| k.is_reported_only()) {
                Ok(0)
            } else {
                Ok(EXIT_FINDING)
            }
        }
        Command::Fuzz {
            vars,
            clauses,
            widths,
            pattern,
            count,
            seed,
            workers,
            bank,
            allow_tautologies,
            allow_empty_clauses,
            limits,
        } => {
            let (width_min, width_max) = parse_widths(&widths)?;
            let config = CampaignConfig {
                params: GenParams {
                    n_vars: vars,
                    n_clauses: clauses,
                    width_min,
                    width_max,
                    quant_pattern: pattern,
                    allow_tautologies,
                    allow_empty_clauses,
                    seed,
                },
                count,
                workers,
                bank,
                diff: DiffConfig {
                    limits: limits.limits()?,
                },
            };
            let report = campaign(&config)?;
            std::io::stdout().write_all(report.to_json()?.as_bytes())?;
            Ok(if report.findings.is_empty() { 0 } else { EXIT_FINDING })
        }
        Command::Shrink {
            file,
            finding,
            output,
            lenient,
            limits,
        } => {
            let f = read(&file, lenient)?;
            let config = DiffConfig {
                limits: limits.limits()?,
            };
            let g = shrink(&f, |g| triggers(g, finding, &config)).map_err(|e| match e {
                Error::Precondition(_) => {
                    Error::InvalidParams(format!("{} does not exhibit {finding}", file.display()))
                }
                e => e,
            })?;
            let text = write_qdimacs(&g)?;
            match output {
                Some(path) => fs::write(path, text)?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        Command::Bench {
            family,
            max_size,
            samples,
            seed,
        } => {
            let report = run_bench(&BenchConfig {
                family,
                max_size,
                samples,
                seed,
                ..BenchConfig::default()
            })?;
            let mut s = serde_json::to_string_pretty(&report)?;
            s.push('\n');
            std::io::stdout().write_all(s.as_bytes())?;
            Ok(0)
        }
    }
}
