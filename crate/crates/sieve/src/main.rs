use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use tetra_bridge::BackendConfig;
use tetra_cubic::{class_group, classgroup_report, period_polynomial, periods_report};
use tetrasieve::config::{config_path, load_config, ConfigFile, Settings, SieveFlags};
use tetrasieve::{
    classify_inertia, emit_report, emit_rows, run_sieve, verify_all, Mode, SieveOptions, SieveRun, Summary,
};

const EXIT_VERIFY: u8 = 2;
const EXIT_BACKEND: u8 = 3;
const EXIT_USAGE: u8 = 4;

#[derive(Parser)]
#[command(name = "tetrasieve", version, about = "Sieve for even tetrahedral 3-adic representations of prime conductor")]
struct Cli {
    /// TOML config file (default: $TETRASIEVE_CONFIG, then ./tetrasieve.toml if present)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run conditions 1-4 on every prime up to --max
    Sieve {
        #[arg(long)]
        max: u64,
        /// Query the backend for ray class data instead of the fixture store
        #[arg(long, conflicts_with = "fixtures")]
        live: bool,
        /// Fixture store directory
        #[arg(long)]
        fixtures: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
        /// table, csv or structured-text
        #[arg(long)]
        emit: Option<String>,
        /// Backend command line, e.g. "gp -q"
        #[arg(long)]
        backend: Option<String>,
        /// Backend timeout per prime, seconds
        #[arg(long)]
        timeout: Option<u64>,
        /// With --live, write fetched ray class data to this fixture store
        #[arg(long, requires = "live")]
        record: Option<PathBuf>,
        /// Compare every class group with the backend's
        #[arg(long)]
        cross_check: bool,
    },
    /// Recompute the dimension and group-theoretic claims
    Verify,
    /// Classify a tame inertia image by its trace
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        trace: i64,
        #[arg(long)]
        level: u32,
        #[arg(long)]
        prime: u64,
    },
    /// Period polynomial of the cubic subfield of Q(zeta_ell)
    Periods {
        #[arg(long)]
        prime: u64,
    },
    /// Class group of the cubic subfield of Q(zeta_ell)
    Classgroup {
        #[arg(long)]
        prime: u64,
        /// Also ask the backend and fail on disagreement
        #[arg(long)]
        cross_check: bool,
        #[arg(long)]
        backend: Option<String>,
    },
}

fn env(k: &str) -> Option<String> {
    std::env::var(k).ok()
}

fn settings(config: Option<&PathBuf>, flags: &SieveFlags) -> Result<Settings, String> {
    let (path, required) = config_path(config.map(PathBuf::as_path), &env);
    let (file, used): (ConfigFile, _) = load_config(&path, required).map_err(|e| e.to_string())?;
    Settings::resolve(flags, &env, &file, used).map_err(|e| e.to_string())
}

fn backend_of(s: &Settings) -> Result<BackendConfig, String> {
    let b = s
        .backend
        .as_ref()
        .ok_or("no backend configured (--backend, TETRASIEVE_BACKEND or `backend` in the config file)")?;
    BackendConfig::from_command_line(&b.value, Duration::from_secs(s.timeout.value)).map_err(|e| e.to_string())
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Sieve {
            max,
            live,
            fixtures,
            jobs,
            emit,
            backend,
            timeout,
            record,
            cross_check,
        } => {
            let flags = SieveFlags {
                fixtures,
                jobs,
                emit,
                backend,
                timeout,
            };
            let s = match settings(cli.config.as_ref(), &flags) {
                Ok(s) => s,
                Err(e) => return usage(e),
            };
            let needs_backend = live || cross_check;
            let backend = if needs_backend {
                match backend_of(&s) {
                    Ok(b) => Some(b),
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(EXIT_BACKEND);
                    }
                }
            } else {
                None
            };
            let mode = match (&backend, live) {
                (Some(b), true) => Mode::Live {
                    backend: b.clone(),
                    record,
                },
                _ => Mode::Fixtures(s.fixtures.value.clone()),
            };
            let mut meta = s.meta();
            meta.insert("mode".into(), if live { "live" } else { "fixtures" }.into());
            meta.insert("cross_check".into(), cross_check.to_string());
            let opts = SieveOptions {
                max,
                mode,
                jobs: s.jobs.value,
                cross_check: if cross_check { backend } else { None },
            };
            let reports = match run_sieve(&opts) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::FAILURE;
                }
            };
            let run = SieveRun { max, meta, reports };
            print!("{}", emit_report(&run, s.emit.value));
            let summary = Summary::of(&run.reports);
            if !summary.errors.is_empty() {
                eprintln!("errors for ell in {:?}", summary.errors);
                return ExitCode::from(EXIT_BACKEND);
            }
            if !summary.pending.is_empty() {
                eprintln!("pending backend for ell in {:?}", summary.pending);
            }
            ExitCode::SUCCESS
        }
        Command::Verify => {
            let rows = verify_all();
            print!("{}", emit_rows(&rows));
            if tetrasieve::all_pass(&rows) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VERIFY)
            }
        }
        Command::Classify { trace, level, prime } => match classify_inertia(trace, level, prime) {
            Ok(c) => {
                println!("trace: {trace} (residue {} mod 3^{})", c.trace, c.level);
                println!("ell: {}", c.ell);
                println!("branch: {}", c.branch);
                println!("explanation: {}", c.explanation);
                ExitCode::SUCCESS
            }
            Err(e) => {
                println!("rejected: {e}");
                ExitCode::from(EXIT_VERIFY)
            }
        },
        Command::Periods { prime } => match period_polynomial(prime) {
            Ok(f) => {
                print!("{}", periods_report(&f));
                ExitCode::SUCCESS
            }
            Err(e) => usage(e),
        },
        Command::Classgroup {
            prime,
            cross_check,
            backend,
        } => {
            let field = match period_polynomial(prime) {
                Ok(f) => f,
                Err(e) => return usage(e),
            };
            let cg = match class_group(&field) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::FAILURE;
                }
            };
            print!("{}", classgroup_report(&field, &cg));
            if cross_check {
                let flags = SieveFlags {
                    backend,
                    ..Default::default()
                };
                let checked = settings(cli.config.as_ref(), &flags)
                    .and_then(|s| backend_of(&s))
                    .and_then(|b| tetra_bridge::class_number(&b, prime).map_err(|e| e.to_string()));
                match checked {
                    Ok((h, _)) if h == cg.h => println!("cross_check: backend h = {h}, agrees"),
                    Ok((h, cyc)) => {
                        println!("cross_check: backend h = {h} {cyc:?}, MISMATCH");
                        return ExitCode::from(EXIT_VERIFY);
                    }
                    Err(e) => {
                        eprintln!("error: cross-check: {e}");
                        return ExitCode::from(EXIT_BACKEND);
                    }
                }
            }
            ExitCode::SUCCESS
        }
    }
}
