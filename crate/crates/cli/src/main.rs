//! `quadgenus`: sampling, conversion, verification and metric experiments
//! for bipartite quadrangulations of genus g.
//!
//! Exit codes: 0 ok, 1 invariant violation, 2 bad input, 3 resource guard.

mod commands;
mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use commands::{EnumerateKind, Experiment, Failure, Run, SampleKind, Suite, Via};
use manifest::{OutputDigest, RunManifest, SCHEMA_VERSION};
use quadgenus::sampling::{Mode, DEFAULT_EXACT_LIMIT};
use serde_json::json;

#[derive(Debug, Parser)]
#[command(name = "quadgenus", version, about)]
struct Cli {
    /// Worker threads; 0 uses one per core.
    #[arg(long, global = true, env = "QUADGENUS_THREADS", default_value_t = 0)]
    threads: usize,
    /// Where to write the run manifest. Defaults to `<out>.manifest.json`
    /// when `--out` is given, standard error otherwise.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw uniform labelled g-trees or pointed quadrangulations as JSON lines.
    Sample {
        #[arg(long)]
        genus: usize,
        #[arg(long)]
        size: usize,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, value_enum, default_value = "tree")]
        kind: SampleKind,
        #[arg(long, default_value_t = DEFAULT_EXACT_LIMIT)]
        exact_limit: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Map JSON lines between representations.
    Convert {
        #[arg(long, value_enum)]
        via: Via,
        /// Run the conversion backwards.
        #[arg(long)]
        inverse: bool,
        /// Sign of the root edge for the forward CMS direction.
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        epsilon: i8,
        /// Index of the opening sequence used by the forward Chapuy direction.
        #[arg(long, default_value_t = 0)]
        sequence: usize,
        /// Input file; standard input when absent.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check an invariant over every labelled g-tree up to a size.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        genus: usize,
        #[arg(long)]
        max_n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Metric experiments with CSV output.
    Experiment {
        #[arg(value_enum)]
        kind: Experiment,
        #[arg(long)]
        genus: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Ball centers per map (dimension).
        #[arg(long, default_value_t = 20)]
        centers: usize,
        /// Vertex pairs per map (twopoint).
        #[arg(long, default_value_t = 1)]
        pairs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List every object of a small size.
    Enumerate {
        #[arg(long, value_enum, default_value = "labelled")]
        kind: EnumerateKind,
        #[arg(long)]
        genus: usize,
        #[arg(long)]
        size: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum ModeArg {
    Exact,
    Asymptotic,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Sample { .. } => "sample",
            Command::Convert { .. } => "convert",
            Command::Verify { .. } => "verify",
            Command::Experiment { .. } => "experiment",
            Command::Enumerate { .. } => "enumerate",
        }
    }

    fn out(&self) -> Option<&Path> {
        match self {
            Command::Sample { out, .. }
            | Command::Convert { out, .. }
            | Command::Verify { out, .. }
            | Command::Experiment { out, .. }
            | Command::Enumerate { out, .. } => out.as_deref(),
        }
    }

    fn seed(&self) -> Option<u64> {
        match self {
            Command::Sample { seed, .. } | Command::Experiment { seed, .. } => Some(*seed),
            _ => None,
        }
    }

    fn config(&self) -> serde_json::Value {
        match self {
            Command::Sample { genus, size, mode, seed, count, kind, exact_limit, .. } => json!({
                "genus": genus, "size": size, "mode": format!("{mode:?}").to_lowercase(),
                "seed": seed, "count": count, "kind": kind, "exact_limit": exact_limit,
            }),
            Command::Convert { via, inverse, epsilon, sequence, input, .. } => json!({
                "via": via, "inverse": inverse, "epsilon": epsilon, "sequence": sequence,
                "input": input.as_ref().map(|p| p.display().to_string()),
            }),
            Command::Verify { suite, genus, max_n, .. } => json!({ "suite": suite, "genus": genus, "max_n": max_n }),
            Command::Experiment { kind, genus, sizes, reps, seed, centers, pairs, .. } => json!({
                "experiment": kind, "genus": genus, "sizes": sizes, "reps": reps,
                "seed": seed, "centers": centers, "pairs": pairs,
            }),
            Command::Enumerate { kind, genus, size, .. } => json!({ "kind": kind, "genus": genus, "size": size }),
        }
    }

    fn run(&self) -> Result<Run, Failure> {
        match self {
            Command::Sample { genus, size, mode, seed, count, kind, exact_limit, .. } => {
                commands::sample(&commands::SampleArgs {
                    genus: *genus,
                    size: *size,
                    mode: match mode {
                        ModeArg::Exact => Mode::Exact,
                        ModeArg::Asymptotic => Mode::Asymptotic,
                    },
                    seed: *seed,
                    count: *count,
                    kind: *kind,
                    exact_limit: *exact_limit,
                })
            }
            Command::Convert { via, inverse, epsilon, sequence, input, .. } => {
                let text = commands::read_input(input.as_deref())?;
                let args = commands::ConvertArgs { via: *via, inverse: *inverse, epsilon: *epsilon, sequence: *sequence };
                commands::convert(&args, &text)
            }
            Command::Verify { suite, genus, max_n, .. } => commands::verify(*suite, *genus, *max_n),
            Command::Experiment { kind, genus, sizes, reps, seed, centers, pairs, .. } => {
                commands::experiment(&commands::ExperimentArgs {
                    kind: *kind,
                    genus: *genus,
                    sizes: sizes.clone(),
                    reps: *reps,
                    seed: *seed,
                    centers: *centers,
                    pairs: *pairs,
                })
            }
            Command::Enumerate { kind, genus, size, .. } => commands::enumerate(*kind, *genus, *size),
        }
    }
}

fn write_output(out: Option<&Path>, data: &[u8]) -> Result<OutputDigest, Failure> {
    use std::io::Write;
    match out {
        Some(p) => {
            std::fs::write(p, data).map_err(|e| Failure { code: 2, message: format!("{}: {e}", p.display()) })?;
            Ok(OutputDigest::of(&p.display().to_string(), data))
        }
        None => {
            std::io::stdout().write_all(data)?;
            Ok(OutputDigest::of("-", data))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    if cli.threads > 0 {
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    let out = cli.command.out();
    let mut outputs = Vec::new();
    let result = cli.command.run().and_then(|run| {
        outputs.push(write_output(out, &run.output)?);
        Ok(run)
    });
    let (code, error, summary, schema) = match &result {
        Ok(run) => (run.status, None, run.summary.clone(), Some(run.schema.to_string())),
        Err(f) => (f.code, Some(f.message.clone()), serde_json::Value::Null, None),
    };
    if let Some(message) = &error {
        eprintln!("error: {message}");
    }
    let manifest = RunManifest {
        schema_version: SCHEMA_VERSION,
        command_line: std::env::args().collect(),
        command: cli.command.name().to_string(),
        config: cli.command.config(),
        seed: cli.command.seed(),
        rng_algorithm: quadgenus::RNG_ALGORITHM,
        library_version: env!("CARGO_PKG_VERSION"),
        threads: rayon::current_num_threads(),
        output_schema: schema,
        elapsed_seconds: start.elapsed().as_secs_f64(),
        outputs,
        summary,
        exit_code: code,
        error,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    let target = cli.manifest.clone().or_else(|| out.map(|p| {
        let mut s = p.as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    }));
    match target {
        Some(p) => {
            if let Err(e) = std::fs::write(&p, text) {
                eprintln!("error: cannot write manifest {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => eprint!("{text}"),
    }
    ExitCode::from(code as u8)
}
