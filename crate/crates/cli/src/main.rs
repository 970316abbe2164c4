mod cache;
mod input;
mod render;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lyubeznik::combinatorics::SquareFreeIdeal;
use lyubeznik::invariants::{
    chi_engine, chi_faces, chi_inclusion_exclusion, generalized_lyubeznik, lyubeznik_table, minimal_prime_bound,
    property_suite, GLNQuery,
};
use lyubeznik::linalg::{FieldSpec, PrimeField, Rationals};
use lyubeznik::oracle::exhaustive_sweep;

use crate::cache::{digest, Cache};
use crate::input::{read_input, warn, Input};
use crate::render::{render, Format, Outcome};

/// A failure with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub const DISAGREEMENT: u8 = 1;
    pub const PARSE: u8 = 2;
    pub const SEMANTIC: u8 = 3;
    pub const SIZE_CAP: u8 = 4;

    pub fn parse(msg: impl Into<String>) -> Self {
        Failure {
            code: Self::PARSE,
            message: msg.into(),
        }
    }

    pub fn semantic(msg: impl Into<String>) -> Self {
        Failure {
            code: Self::SEMANTIC,
            message: msg.into(),
        }
    }

    pub fn from_core(e: lyubeznik::error::Error) -> Self {
        Failure {
            code: if e.is_size_cap() { Self::SIZE_CAP } else { Self::SEMANTIC },
            message: e.to_string(),
        }
    }

    pub fn context(mut self, what: &str) -> Self {
        self.message = format!("{what}: {}", self.message);
        self
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<lyubeznik::error::Error> for Failure {
    fn from(e: lyubeznik::error::Error) -> Self {
        Failure::from_core(e)
    }
}

/// Lyubeznik numbers, tables and characteristics of Stanley-Reisner rings.
#[derive(Parser, Debug)]
#[command(name = "lyubeznik", version)]
struct Cli {
    /// Coefficient field: `q` or `fp:<p>`.
    #[arg(long, global = true, default_value = "q")]
    field: FieldSpec,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Directory for cached results.
    #[arg(long, global = true, env = "LYUBEZNIK_CACHE_DIR")]
    cache: Option<PathBuf>,

    /// Ignore the cache for this run.
    #[arg(long, global = true)]
    no_cache: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lyubeznik characteristic.
    Chi {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Engine)]
        method: Method,
    },
    /// Generalized Lyubeznik number; steps are listed innermost first, the
    /// first index `k` standing for cohomological degree `n - k`.
    Lambda {
        file: PathBuf,
        /// Index of each step, in order.
        #[arg(long = "i", required = true)]
        i: Vec<usize>,
        /// Ideals of the outer steps, in order.
        #[arg(long)]
        ideal: Vec<PathBuf>,
    },
    /// Classical Lyubeznik table `λ_{i,j}`.
    Table { file: PathBuf },
    /// Upper bound for `λ^j_0` from sums of minimal primes.
    Bound {
        file: PathBuf,
        #[arg(long)]
        j: usize,
    },
    /// Randomized property suite; `--deep` adds the window oracle sweep.
    /// Checks always run over both the rationals and F_2.
    Check {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 5)]
        nmax: usize,
        #[arg(long)]
        deep: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Method {
    Engine,
    Faces,
    Ie,
    All,
}

impl Method {
    fn methods(self) -> Vec<&'static str> {
        match self {
            Method::Engine => vec!["engine"],
            Method::Faces => vec!["faces"],
            Method::Ie => vec!["inclusion-exclusion"],
            Method::All => vec!["engine", "faces", "inclusion-exclusion"],
        }
    }
}

fn canonical(ideal: &SquareFreeIdeal) -> String {
    let gens: Vec<String> = ideal.generators().iter().map(|g| format!("{:x}", g.bits())).collect();
    format!("n={};gens={}", ideal.n(), gens.join(","))
}

fn cache_key(command: &str, field: FieldSpec, params: &str, ideals: &[&SquareFreeIdeal]) -> String {
    let inputs: Vec<String> = ideals.iter().map(|i| canonical(i)).collect();
    let text = format!(
        "{} {}\n{command}\n{field}\n{params}\n{}",
        env!("CARGO_PKG_NAME"),
        env!("CARGO_PKG_VERSION"),
        inputs.join("\n")
    );
    digest(text.as_bytes())
}

fn chi_value(method: &str, input: &Input, field: FieldSpec) -> Result<i64, Failure> {
    let ideal = input.ideal();
    Ok(match method {
        "engine" => chi_engine(&ideal, field)?,
        "faces" => {
            let cx = input
                .complex()
                .ok_or_else(|| Failure::semantic("the unit ideal has no simplicial complex"))?;
            chi_faces(&cx)?
        }
        _ => chi_inclusion_exclusion(&ideal)?,
    })
}

struct Runner {
    field: FieldSpec,
    cache: Option<Cache>,
}

impl Runner {
    /// Looks `key` up in the cache, computing and storing it on a miss.
    fn cached(&self, key: &str, compute: impl FnOnce() -> Result<Outcome, Failure>) -> Result<Outcome, Failure> {
        if let Some(cache) = &self.cache {
            if let Some(body) = cache.lookup(key) {
                match serde_json::from_str(&body) {
                    Ok(outcome) => return Ok(outcome),
                    Err(_) => warn(&format!("cache entry {key} does not decode; recomputing")),
                }
            }
        }
        let outcome = compute()?;
        if let Some(cache) = &self.cache {
            let body = serde_json::to_string(&outcome).expect("outcomes serialize");
            if let Err(e) = cache.store(key, &body) {
                warn(&format!("could not write cache entry: {e}"));
            }
        }
        Ok(outcome)
    }

    fn run(&self, command: &Command) -> Result<Outcome, Failure> {
        let field = self.field;
        match command {
            Command::Chi { file, method } => {
                let input = read_input(file)?;
                let ideal = input.ideal();
                let mut values = Vec::new();
                for m in method.methods() {
                    let key = cache_key("chi", field, m, &[&ideal]);
                    let outcome = self.cached(&key, || {
                        Ok(Outcome::Chi {
                            values: vec![(m.to_string(), chi_value(m, &input, field)?)],
                        })
                    })?;
                    if let Outcome::Chi { values: v } = outcome {
                        values.extend(v);
                    }
                }
                Ok(Outcome::Chi { values })
            }
            Command::Lambda { file, i, ideal } => {
                if i.len() != ideal.len() + 1 {
                    return Err(Failure::parse(format!(
                        "{} indices for {} ideals; give one `--i` per ideal",
                        i.len(),
                        ideal.len() + 1
                    )));
                }
                let paths: Vec<&Path> = std::iter::once(file.as_path())
                    .chain(ideal.iter().map(PathBuf::as_path))
                    .collect();
                let ideals = paths
                    .iter()
                    .map(|p| read_input(p).map(|input| input.ideal()))
                    .collect::<Result<Vec<_>, _>>()?;
                let params: Vec<String> = i.iter().map(usize::to_string).collect();
                let refs: Vec<&SquareFreeIdeal> = ideals.iter().collect();
                let key = cache_key("lambda", field, &params.join(","), &refs);
                self.cached(&key, || {
                    let steps = ideals.iter().cloned().zip(i.iter().copied()).collect();
                    let value = generalized_lyubeznik(&GLNQuery { steps, field })?;
                    Ok(Outcome::Lambda {
                        indices: i.clone(),
                        value,
                    })
                })
            }
            Command::Table { file } => {
                let ideal = read_input(file)?.ideal();
                let key = cache_key("table", field, "", &[&ideal]);
                self.cached(&key, || {
                    let t = lyubeznik_table(&ideal, field)?;
                    Ok(Outcome::Table {
                        d: t.d,
                        entries: t.entries,
                    })
                })
            }
            Command::Bound { file, j } => {
                let ideal = read_input(file)?.ideal();
                let key = cache_key("bound", field, &j.to_string(), &[&ideal]);
                self.cached(&key, || {
                    Ok(Outcome::Bound {
                        j: *j,
                        value: minimal_prime_bound(&ideal, *j)?,
                    })
                })
            }
            Command::Check {
                seed,
                trials,
                nmax,
                deep,
            } => {
                let report = property_suite(*seed, *trials, *nmax)?;
                let oracle = if *deep {
                    let mut sweeps = Vec::new();
                    for spec in [FieldSpec::Rationals, FieldSpec::PrimeField(2)] {
                        let r = match spec {
                            FieldSpec::Rationals => exhaustive_sweep(4, 4, 4, 3, 2, &Rationals)?,
                            FieldSpec::PrimeField(p) => exhaustive_sweep(4, 4, 4, 3, 2, &PrimeField::new(p)?)?,
                        };
                        sweeps.push((spec, r));
                    }
                    Some(sweeps)
                } else {
                    None
                };
                Ok(Outcome::check(report, oracle))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cache = if cli.no_cache {
        None
    } else {
        cli.cache.as_deref().and_then(|dir| match Cache::open(dir) {
            Ok(c) => Some(c),
            Err(e) => {
                warn(&format!("cache directory {} unusable: {e}", dir.display()));
                None
            }
        })
    };
    let runner = Runner { field: cli.field, cache };
    match runner.run(&cli.command) {
        Ok(outcome) => {
            print!("{}", render(&outcome, cli.format, cli.field));
            if outcome.is_failure() {
                eprintln!("error: {}", outcome.failure_summary());
                ExitCode::from(Failure::DISAGREEMENT)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
