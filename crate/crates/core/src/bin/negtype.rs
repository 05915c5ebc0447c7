use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use negtype::cli::{
    parse_input, run_bench, run_gap, run_oracle_suite, BenchOptions, Family, Format, Generator,
    InputDocument, InputKind, OracleOptions, RunOptions,
};
use negtype::gap::{EnumOptions, GapOptions, Method, DEFAULT_BNB_BUDGET, DEFAULT_MAX_ENUM_N};
use negtype::{Error, Result, Tolerances};

#[derive(Parser)]
#[command(
    name = "negtype",
    version,
    about = "p-negative type classification and gap computation for finite metric spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a metric space and compute its p-negative type gap.
    Gap(GapArgs),
    /// Compare the pipeline against closed forms for known families.
    Oracle(OracleArgs),
    /// Time the hypercube enumeration on random-tree instances.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Machine,
}

#[derive(Clone, Copy, ValueEnum)]
enum InputFormat {
    Auto,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Enumerate,
    Opnorm,
    Binary,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    All,
    Discrete,
    Cycles,
    Trees,
}

#[derive(Args)]
struct Common {
    /// Output style.
    #[arg(long, value_enum, default_value = "text")]
    report: ReportFormat,
    /// Seed for every randomized step.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run the enumeration on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct GapArgs {
    /// Input file; reads stdin when omitted and no generator flag is given.
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "auto")]
    format: InputFormat,
    /// Discrete metric space on N points.
    #[arg(long, value_name = "N", group = "gen")]
    discrete: Option<usize>,
    /// Unit-weight cycle on N vertices.
    #[arg(long, value_name = "N", group = "gen")]
    cycle: Option<usize>,
    /// Weighted path; comma-separated edge weights.
    #[arg(long, value_name = "W1,W2,...", value_delimiter = ',', group = "gen")]
    path: Option<Vec<f64>>,
    /// Seeded random weighted tree on N vertices.
    #[arg(long, value_name = "N", group = "gen")]
    random_tree: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    weight_min: f64,
    #[arg(long, default_value_t = 10.0)]
    weight_max: f64,
    /// Exponent applied to the distances (overrides the document).
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, value_enum, default_value = "all")]
    method: MethodArg,
    /// Largest n for exhaustive enumeration.
    #[arg(long, default_value_t = DEFAULT_MAX_ENUM_N)]
    max_n: usize,
    /// Override all three numerical tolerances.
    #[arg(long)]
    tol: Option<f64>,
    /// Include the extremal vector y₀.
    #[arg(long)]
    witness: bool,
    /// Use branch-and-bound beyond --max-n.
    #[arg(long)]
    bnb: bool,
    /// Node budget for branch-and-bound.
    #[arg(long, default_value_t = DEFAULT_BNB_BUDGET)]
    bnb_budget: u64,
    /// Treat a matrix input as the matrix A itself.
    #[arg(long)]
    raw: bool,
    /// Report wall time.
    #[arg(long)]
    timing: bool,
    /// Check the gap inequality on N random vectors.
    #[arg(long, value_name = "N", default_value_t = 0)]
    check_inequality: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, value_enum, default_value = "all")]
    family: FamilyArg,
    /// Number of random trees.
    #[arg(long, default_value_t = 20)]
    trees: usize,
    /// Perturb one distance of the first instance (negative control).
    #[arg(long)]
    inject_fault: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BenchArgs {
    /// Sizes for the timed enumeration.
    #[arg(long, value_delimiter = ',', default_value = "16,20,24")]
    sizes: Vec<usize>,
    /// Sizes for the Gray-code versus naive comparison.
    #[arg(long, value_delimiter = ',', default_value = "8,10,12")]
    naive_sizes: Vec<usize>,
    /// Also run branch-and-bound with this node budget.
    #[arg(long)]
    bnb_budget: Option<u64>,
    #[command(flatten)]
    common: Common,
}

fn emit(
    style: ReportFormat,
    text: impl FnOnce() -> String,
    machine: impl FnOnce() -> String,
) -> Result<()> {
    let out = match style {
        ReportFormat::Text => text(),
        ReportFormat::Machine => machine() + "\n",
    };
    let mut stdout = std::io::stdout().lock();
    match stdout
        .write_all(out.as_bytes())
        .and_then(|_| stdout.flush())
    {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn gap_options(a: &GapArgs) -> GapOptions {
    GapOptions {
        method: match a.method {
            MethodArg::Enumerate => Method::Enumerate,
            MethodArg::Opnorm => Method::Opnorm,
            MethodArg::Binary => Method::Binary,
            MethodArg::All => Method::All,
        },
        enumeration: EnumOptions {
            max_n: a.max_n,
            parallel: !a.common.sequential,
        },
        bnb: a.bnb,
        bnb_budget: a.bnb_budget,
        tols: a.tol.map(Tolerances::uniform).unwrap_or_default(),
    }
}

fn read_document(a: &GapArgs) -> Result<InputDocument> {
    let generator = if let Some(n) = a.discrete {
        Some(Generator::Discrete(n))
    } else if let Some(n) = a.cycle {
        Some(Generator::Cycle(n))
    } else if let Some(w) = &a.path {
        Some(Generator::Path(w.clone()))
    } else {
        a.random_tree.map(|n| Generator::RandomTree {
            n,
            min: a.weight_min,
            max: a.weight_max,
            seed: a.common.seed,
        })
    };
    if let Some(g) = generator {
        if a.input.is_some() {
            return Err(Error::Parse(
                "give either an input file or a generator flag, not both".into(),
            ));
        }
        return Ok(InputDocument {
            kind: InputKind::Generator(g),
            p: None,
        });
    }
    let text = match &a.input {
        Some(path) if path.as_os_str() != "-" => std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    let format = match a.format {
        InputFormat::Auto => Format::Auto,
        InputFormat::Json => Format::Json,
        InputFormat::Csv => Format::Csv,
    };
    parse_input(&text, format)
}

fn cmd_gap(a: &GapArgs) -> Result<()> {
    let doc = read_document(a)?;
    let opts = RunOptions {
        gap: gap_options(a),
        p: a.p,
        raw: a.raw,
        witness: a.witness,
        timing: a.timing,
        inequality_trials: a.check_inequality,
        seed: a.common.seed,
    };
    let report = run_gap(&doc, &opts)?;
    for w in &report.diagnostics.warnings {
        eprintln!("warning: {w}");
    }
    if report.diagnostics.marginal.any() {
        eprintln!("warning: classification is numerically marginal; see diagnostics");
    }
    if report.cross_checks.certified == Some(false) {
        eprintln!("warning: branch-and-bound budget exhausted; beta is a lower bound");
    }
    emit(a.common.report, || report.to_text(), || report.to_machine())?;
    Ok(())
}

fn cmd_oracle(a: &OracleArgs) -> Result<()> {
    let opts = OracleOptions {
        family: match a.family {
            FamilyArg::All => Family::All,
            FamilyArg::Discrete => Family::Discrete,
            FamilyArg::Cycles => Family::Cycles,
            FamilyArg::Trees => Family::Trees,
        },
        seed: a.common.seed,
        trees: a.trees,
        inject_fault: a.inject_fault,
        gap: GapOptions {
            enumeration: EnumOptions {
                parallel: !a.common.sequential,
                ..Default::default()
            },
            ..Default::default()
        },
        ..Default::default()
    };
    let report = run_oracle_suite(&opts)?;
    emit(a.common.report, || report.to_text(), || report.to_machine())?;
    report.check()
}

fn cmd_bench(a: &BenchArgs) -> Result<()> {
    let report = run_bench(&BenchOptions {
        sizes: a.sizes.clone(),
        naive_sizes: a.naive_sizes.clone(),
        seed: a.common.seed,
        parallel: !a.common.sequential,
        bnb_budget: a.bnb_budget,
    })?;
    emit(a.common.report, || report.to_text(), || report.to_machine())?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gap(a) => cmd_gap(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
