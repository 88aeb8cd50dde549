//! `adjgeom`: rank-metric geometry, map classification and exhaustive
//! checks from the command line. Every command prints one JSON document.
//!
//! Exit codes: 0 success, 1 a property was violated, 2 usage or malformed
//! input, 3 a budget ran out before the work finished.

mod input;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use adjacency_core::classify::{classify, ClassificationResult, Verdict};
use adjacency_core::lemma_lab::{
    classify_stream, classify_stream_parallel, verify_lemma_with_budget, Checkpoint,
    EnumerationTask, LemmaGrid, LemmaId, LemmaReport, StreamOptions, CHECKPOINT_EVERY,
    DEFAULT_BUDGET,
};
use adjacency_core::maps::{
    check_preserver, make_degenerate_vec, tabulate, SpecDoc, StandardMapSpec, TableDoc,
    TabulatedMap,
};
use adjacency_core::matrix::distance;
use adjacency_core::{Error, Field};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use input::{parse_field, parse_json, parse_matrix, parse_shape, read_source};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Malformed(String),
    #[error("property violated")]
    Violation(Value),
    #[error("budget exhausted")]
    Budget(Value),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Violation(_) => 1,
            CliError::Budget(_) => 3,
            CliError::Core(Error::NotAPreserver(..) | Error::Counterexample(_)) => 1,
            _ => 2,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "adjgeom",
    version,
    about = "Adjacency geometry of matrix spaces over finite fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FieldArg {
    /// Field as p,k or p,k,c0,...,ck (modulus low-degree-first).
    #[arg(long, default_value = "2,1")]
    field: String,
}

#[derive(Subcommand)]
enum Command {
    /// Rank of a matrix.
    Rank {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long)]
        matrix: String,
    },
    /// Rank distance between two matrices.
    Distance {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// A shortest chain of adjacent matrices from A to B.
    Chain {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Generate a map.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Tabulate a standard map spec.
    Tabulate {
        /// Spec file, or - for stdin.
        #[arg(long, default_value = "-")]
        spec: String,
    },
    /// Check whether a map table preserves adjacency.
    Check {
        /// Table file, or - for stdin.
        #[arg(long, default_value = "-")]
        map: String,
    },
    /// Classify an adjacency preserver as standard or degenerate.
    Classify {
        /// Table file, or - for stdin.
        #[arg(long, default_value = "-")]
        map: String,
    },
    /// Exhaustively check the structural statements.
    Lemmas {
        #[command(flatten)]
        field: FieldArg,
        /// Statement id, e.g. 3.5, rank-additivity or eas.
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        id: Option<String>,
        #[arg(long)]
        all: bool,
        /// Instance budget per statement.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        max_instances: u64,
        /// Include wall times (makes output run-dependent).
        #[arg(long)]
        timings: bool,
    },
    /// Enumerate and classify every adjacency preserver between tiny spaces.
    Enumerate {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long, default_value = "2,2")]
        domain: String,
        #[arg(long, default_value = "2,2")]
        codomain: String,
        /// Drop the constraint that 0 maps to 0.
        #[arg(long)]
        free_zero: bool,
        /// Continue from a checkpoint file.
        #[arg(long)]
        resume: Option<PathBuf>,
        /// Write checkpoints to this file.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Wall-clock cap in seconds.
        #[arg(long, default_value_t = 600)]
        budget: u64,
        /// Worker threads; more than one splits the search tree.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// A random standard map spec.
    Standard {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long, default_value = "2,2")]
        domain: String,
        #[arg(long, default_value = "2,2")]
        codomain: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// The table of A -> vec(A) e_1, a degenerate preserver.
    Degenerate {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long, default_value = "2,2")]
        domain: String,
        /// Columns of the codomain.
        #[arg(long, default_value_t = 1)]
        cols: usize,
    },
}

fn read_table(path: &str) -> Result<TabulatedMap, CliError> {
    let doc: TableDoc = parse_json("map table", &read_source(path)?)?;
    Ok(TabulatedMap::from_doc(&doc)?)
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn run(cli: Cli) -> Result<Value, CliError> {
    match cli.command {
        Command::Rank { field, matrix } => {
            let f = parse_field(&field.field)?;
            Ok(json!({ "rank": parse_matrix(&f, &matrix)?.rank() }))
        }
        Command::Distance { field, a, b } => {
            let f = parse_field(&field.field)?;
            let d = distance(&parse_matrix(&f, &a)?, &parse_matrix(&f, &b)?)?;
            Ok(json!({ "distance": d }))
        }
        Command::Chain { field, a, b } => {
            let f = parse_field(&field.field)?;
            let (a, b) = (parse_matrix(&f, &a)?, parse_matrix(&f, &b)?);
            let chain = a.adjacency_chain(&b)?;
            Ok(json!({ "distance": chain.len() - 1, "chain": chain }))
        }
        Command::Gen(GenCommand::Standard {
            field,
            domain,
            codomain,
            seed,
        }) => {
            let f = parse_field(&field.field)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let spec = StandardMapSpec::random(
                &f,
                parse_shape(&domain)?,
                parse_shape(&codomain)?,
                &mut rng,
            )?;
            Ok(to_value(&spec))
        }
        Command::Gen(GenCommand::Degenerate {
            field,
            domain,
            cols,
        }) => {
            let f = parse_field(&field.field)?;
            let (m, n) = parse_shape(&domain)?;
            Ok(to_value(&make_degenerate_vec(&f, m, n, cols)?))
        }
        Command::Tabulate { spec } => {
            let doc: SpecDoc = parse_json("spec", &read_source(&spec)?)?;
            Ok(to_value(&tabulate(&StandardMapSpec::from_doc(&doc)?)?))
        }
        Command::Check { map } => {
            let report = check_preserver(&read_table(&map)?);
            if report.preserves_adjacency {
                Ok(to_value(&report))
            } else {
                Err(CliError::Violation(to_value(&report)))
            }
        }
        Command::Classify { map } => classify_command(&read_table(&map)?),
        Command::Lemmas {
            field,
            id,
            all,
            max_instances,
            timings,
        } => {
            let f = parse_field(&field.field)?;
            let ids = if all {
                LemmaId::ALL.to_vec()
            } else {
                vec![id
                    .expect("clap requires --id without --all")
                    .parse::<LemmaId>()?]
            };
            lemmas_command(&f, &ids, max_instances, timings)
        }
        Command::Enumerate {
            field,
            domain,
            codomain,
            free_zero,
            resume,
            checkpoint,
            budget,
            jobs,
        } => {
            let f = parse_field(&field.field)?;
            let task = EnumerationTask::new(
                &f,
                parse_shape(&domain)?,
                parse_shape(&codomain)?,
                !free_zero,
            );
            let resume = match resume {
                Some(path) => {
                    let cp: Checkpoint =
                        parse_json("checkpoint", &read_source(&path.to_string_lossy())?)?;
                    Some(cp)
                }
                None => None,
            };
            let options = StreamOptions {
                budget: Some(Duration::from_secs(budget)),
                resume,
                checkpoint_every: CHECKPOINT_EVERY,
            };
            enumerate_command(&task, &options, checkpoint, jobs)
        }
    }
}

fn classify_command(map: &TabulatedMap) -> Result<Value, CliError> {
    let result: ClassificationResult = match classify(map) {
        Ok(r) => r,
        Err(Error::NotAPreserver(i, j)) => {
            return Err(CliError::Violation(
                json!({ "error": "not_a_preserver", "pair": [i, j] }),
            ));
        }
        Err(Error::RecoveryFailed(reason) | Error::IncoherentCase(reason)) => {
            // a preserver that is neither degenerate nor standard
            return Err(CliError::Violation(
                json!({ "verdict": "neither", "reason": reason, "map": map }),
            ));
        }
        Err(e) => return Err(e.into()),
    };
    if let Verdict::Standard(spec) = &result.verdict {
        if &tabulate(spec)? != map {
            return Err(CliError::Violation(
                json!({ "verdict": "neither", "reason": "recovered spec does not reproduce the table" }),
            ));
        }
    }
    Ok(to_value(&result))
}

fn lemmas_command(
    field: &Field,
    ids: &[LemmaId],
    budget: u64,
    timings: bool,
) -> Result<Value, CliError> {
    let reports: Vec<LemmaReport> = ids
        .iter()
        .map(|&id| verify_lemma_with_budget(id, &LemmaGrid::default_for(id, field), budget))
        .collect::<Result<_, _>>()?;
    let violated = reports.iter().any(|r| !r.violations.is_empty());
    let incomplete = reports.iter().any(|r| !r.complete);
    let mut docs: Vec<Value> = reports.iter().map(to_value).collect();
    if !timings {
        for d in &mut docs {
            d.as_object_mut()
                .expect("report is an object")
                .remove("wall_time_ms");
        }
    }
    let doc = json!({ "reports": docs });
    if violated {
        Err(CliError::Violation(doc))
    } else if incomplete {
        Err(CliError::Budget(doc))
    } else {
        Ok(doc)
    }
}

fn enumerate_command(
    task: &EnumerationTask,
    options: &StreamOptions,
    checkpoint: Option<PathBuf>,
    jobs: usize,
) -> Result<Value, CliError> {
    let mut write_error = None;
    let mut write = |cp: &Checkpoint| {
        if let Some(path) = &checkpoint {
            let text = serde_json::to_string(cp).expect("serializable");
            if let Err(e) = fs::write(path, text + "\n") {
                write_error = Some(CliError::Usage(format!("writing {}: {e}", path.display())));
            }
        }
    };
    let outcome = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| CliError::Usage(format!("--jobs {jobs}: {e}")))?;
        pool.install(|| classify_stream_parallel(task, options, &mut write))
    } else {
        classify_stream(task, options, &mut write)
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(Error::Counterexample(detail)) => {
            return Err(CliError::Violation(
                json!({ "error": "counterexample", "detail": detail }),
            ));
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(e) = write_error {
        return Err(e);
    }
    let doc = to_value(&outcome.checkpoint);
    if outcome.summary().complete {
        Ok(doc)
    } else {
        Err(CliError::Budget(doc))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(doc) => {
            println!("{doc}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            match &e {
                CliError::Violation(doc) | CliError::Budget(doc) => println!("{doc}"),
                _ => println!("{}", json!({ "error": e.to_string() })),
            }
            eprintln!("adjgeom: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
