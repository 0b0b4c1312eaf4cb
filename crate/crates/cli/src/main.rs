//! `vinberg-lab`: exact reflectivity analysis of rank-4 hyperbolic lattices.
//!
//! Exit codes: 0 success, 1 golden mismatch in `classify --check`,
//! 2 malformed input, 3 wrong rank or signature, 4 budget exhausted.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use vinberg_lab_core::error::Error;
use vinberg_lab_core::lattice::QuadraticLattice;
use vinberg_lab_core::pipeline::{self, ClassifyOptions, Stage};
use vinberg_lab_core::vinberg::{self, RunStatus, VinbergConfig};
use vinberg_lab_core::{coxeter, io, local};

const GOLDEN_CHECK: &str = include_str!("../goldens/classify_check.json");

#[derive(Parser)]
#[command(name = "vinberg-lab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Discriminant, invariant factors, signature and maximality of a lattice.
    Invariants { file: PathBuf },
    /// Local and global anisotropy verdicts for a rank-4 lattice.
    Anisotropy { file: PathBuf },
    /// Run the root search and report the fundamental polyhedron data.
    Vinberg {
        file: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
        /// Write the Coxeter diagram as DOT to this path.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Run the root search and print the Coxeter diagram as DOT.
    Diagram {
        file: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run the candidate enumeration and the full classification.
    Classify {
        /// `enumerate` stops after the candidate table; `full` also runs
        /// the per-lattice analysis.
        #[arg(long, default_value = "full")]
        stage: String,
        /// Directory for report.json and per-lattice DOT files.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Compare the run against the versioned golden summary.
        #[arg(long)]
        check: bool,
        #[arg(long, default_value_t = 64)]
        max_roots: usize,
        #[arg(long, default_value_t = 1000)]
        max_height: u64,
    },
}

#[derive(Args)]
struct RunOpts {
    /// Comma-separated root norms, e.g. `1,2`.  Default: all admissible.
    #[arg(long, value_delimiter = ',')]
    norms: Vec<u64>,
    /// Comma-separated basic point coordinates, e.g. `1,0,0,0`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    basic_point: Vec<i64>,
    #[arg(long, default_value_t = 64)]
    max_roots: usize,
    #[arg(long, default_value_t = 10_000)]
    max_height: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::RankNotFour(_) | Error::NotHyperbolic => 3,
        _ => 2,
    }
}

fn read_lattice(path: &PathBuf) -> Result<io::NamedLattice, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
    io::parse_lattice(&text)
}

fn dispatch(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Invariants { file } => cmd_invariants(&file),
        Command::Anisotropy { file } => cmd_anisotropy(&file),
        Command::Vinberg { file, opts, dot } => cmd_vinberg(&file, &opts, dot.as_ref()),
        Command::Diagram { file, opts } => cmd_diagram(&file, &opts),
        Command::Classify { stage, out, check, max_roots, max_height } => {
            cmd_classify(&stage, out.as_ref(), check, max_roots, max_height)
        }
    }
}

fn cmd_invariants(file: &PathBuf) -> Result<ExitCode, Error> {
    let named = read_lattice(file)?;
    let l = &named.lattice;
    let sig = l.signature();
    let maxes = l.maximal_overlattices();
    let mut obj = Map::new();
    obj.insert("schema_version".into(), json!(pipeline::SCHEMA_VERSION));
    if let Some(name) = &named.name {
        obj.insert("name".into(), json!(name));
    }
    obj.insert("gram".into(), io::lattice_to_json(l, None)["gram"].clone());
    obj.insert("rank".into(), json!(l.rank()));
    obj.insert("discriminant".into(), io::bigint_to_json(&l.discriminant()));
    obj.insert(
        "invariant_factors".into(),
        Value::Array(
            l.invariant_factors()
                .0
                .iter()
                .map(io::bigint_to_json)
                .collect(),
        ),
    );
    obj.insert(
        "signature".into(),
        json!({"positives": sig.positives, "negatives": sig.negatives}),
    );
    obj.insert(
        "dual_quotient".into(),
        Value::Array(l.dual_quotient().iter().map(io::bigint_to_json).collect()),
    );
    obj.insert("is_maximal".into(), json!(l.is_maximal()));
    obj.insert(
        "maximal_overlattices".into(),
        Value::Array(
            maxes
                .iter()
                .map(|m| io::lattice_to_json(m, None))
                .collect(),
        ),
    );
    println!("{}", serde_json::to_string_pretty(&Value::Object(obj)).unwrap());
    Ok(ExitCode::SUCCESS)
}

fn cmd_anisotropy(file: &PathBuf) -> Result<ExitCode, Error> {
    let named = read_lattice(file)?;
    let l = &named.lattice;
    let mut places = Vec::new();
    let mut primes = vec![BigInt::from(2)];
    for p in local::prime_factors(&l.discriminant()) {
        if !primes.contains(&p) {
            primes.push(p);
        }
    }
    primes.sort();
    for p in primes {
        let place = local::Prime::Finite(p.clone());
        let verdict = local::is_anisotropic_local(l, &place)?;
        places.push(json!({"place": p.to_string(), "anisotropic": verdict}));
    }
    places.push(json!({
        "place": "infinity",
        "anisotropic": local::is_anisotropic_local(l, &local::Prime::Infinity)?,
    }));
    let global = local::is_anisotropic_global(l)?;
    let out = json!({
        "schema_version": pipeline::SCHEMA_VERSION,
        "name": named.name,
        "places": places,
        "anisotropic": global,
    });
    println!("{}", serde_json::to_string_pretty(&out).unwrap());
    Ok(ExitCode::SUCCESS)
}

fn run_from_opts(
    lattice: &Arc<QuadraticLattice>,
    opts: &RunOpts,
) -> Result<vinberg::VinbergRun, Error> {
    let config = VinbergConfig {
        basic_point: if opts.basic_point.is_empty() {
            None
        } else {
            Some(opts.basic_point.iter().map(|&x| BigInt::from(x)).collect())
        },
        allowed_norms: if opts.norms.is_empty() {
            None
        } else {
            Some(opts.norms.iter().copied().collect::<BTreeSet<u64>>())
        },
        max_roots: opts.max_roots,
        max_height: opts.max_height,
    };
    vinberg::run(lattice, &config)
}

fn run_report(
    named: &io::NamedLattice,
    run: &vinberg::VinbergRun,
) -> Result<(Value, String), Error> {
    let summary = pipeline::RunSummary::from_run(run, None);
    let diagram = coxeter::build_diagram(&run.roots)?;
    let dot = coxeter::emit_dot(&diagram);
    let mut obj = Map::new();
    obj.insert("schema_version".into(), json!(pipeline::SCHEMA_VERSION));
    if let Some(name) = &named.name {
        obj.insert("name".into(), json!(name));
    }
    obj.insert(
        "gram".into(),
        io::lattice_to_json(&named.lattice, None)["gram"].clone(),
    );
    obj.insert(
        "basic_point".into(),
        Value::Array(run.basic_point.iter().map(io::bigint_to_json).collect()),
    );
    obj.insert("run".into(), pipeline::run_summary_json(&summary));
    if run.status == RunStatus::FiniteVolume {
        obj.insert(
            "bad_reflections_finite".into(),
            json!(coxeter::bad_reflections_finite(&run.roots)?),
        );
        let combi = coxeter::polyhedron_combinatorics(&run.lattice, &run.roots)?;
        obj.insert(
            "polyhedron".into(),
            json!({
                "vertices": combi.vertices.iter().map(|v| json!({
                    "facets": v.active,
                    "vector": v.vector.iter().map(io::bigint_to_json).collect::<Vec<Value>>(),
                    "ideal": v.ideal,
                })).collect::<Vec<Value>>(),
                "edges": combi.edges,
            }),
        );
    }
    obj.insert("diagram_dot".into(), json!(dot));
    Ok((Value::Object(obj), dot))
}

fn cmd_vinberg(
    file: &PathBuf,
    opts: &RunOpts,
    dot_path: Option<&PathBuf>,
) -> Result<ExitCode, Error> {
    let named = read_lattice(file)?;
    let lattice = named.lattice.clone().shared();
    let run = run_from_opts(&lattice, opts)?;
    let (report, dot) = run_report(&named, &run)?;
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    if let Some(path) = dot_path {
        std::fs::write(path, dot)
            .map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(if run.status == RunStatus::BudgetExhausted {
        ExitCode::from(4)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_diagram(file: &PathBuf, opts: &RunOpts) -> Result<ExitCode, Error> {
    let named = read_lattice(file)?;
    let lattice = named.lattice.clone().shared();
    let run = run_from_opts(&lattice, opts)?;
    let diagram = coxeter::build_diagram(&run.roots)?;
    print!("{}", coxeter::emit_dot(&diagram));
    Ok(if run.status == RunStatus::BudgetExhausted {
        ExitCode::from(4)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_classify(
    stage: &str,
    out: Option<&PathBuf>,
    check: bool,
    max_roots: usize,
    max_height: u64,
) -> Result<ExitCode, Error> {
    let stage = match stage {
        "enumerate" => Stage::Enumerate,
        "full" => Stage::Full,
        other => {
            return Err(Error::Invalid(format!(
                "unknown stage {other:?}; use enumerate or full"
            )))
        }
    };
    let threads = std::env::var("VINBERG_LAB_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok());
    let opts = ClassifyOptions { stage, max_roots, max_height, threads };
    let report = pipeline::classify(&opts)?;
    let json = pipeline::report_json(&report);
    println!("{}", serde_json::to_string_pretty(&json).unwrap());
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)
            .map_err(|e| Error::Invalid(format!("cannot create {}: {e}", dir.display())))?;
        std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(&json).unwrap())
            .map_err(|e| Error::Invalid(format!("cannot write report: {e}")))?;
        for v in &report.verdicts {
            if let Some(dot) = &v.diagram_dot {
                let file = dir.join(format!(
                    "{}.dot",
                    v.name.replace(['(', ')'], "_").to_lowercase()
                ));
                std::fs::write(file, dot)
                    .map_err(|e| Error::Invalid(format!("cannot write diagram: {e}")))?;
            }
        }
    }
    if check {
        if stage != Stage::Full {
            return Err(Error::Invalid("--check requires --stage=full".into()));
        }
        let golden: Value = serde_json::from_str(GOLDEN_CHECK)
            .map_err(|e| Error::Invalid(format!("corrupt golden: {e}")))?;
        let summary = pipeline::check_summary_json(&report);
        if summary != golden {
            eprintln!("golden mismatch:\n  expected {golden}\n  got      {summary}");
            return Ok(ExitCode::from(1));
        }
        eprintln!("golden check passed");
    }
    Ok(ExitCode::SUCCESS)
}
