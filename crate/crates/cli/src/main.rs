//! `twoblock`: parameters, certification and scans of two-block group
//! algebra codes.
//!
//! Exit status is 0 on success, 2 for unusable input and 3 when a computed
//! object violates an invariant that the theory guarantees.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use twoblock::bound::bt_bound;
use twoblock::certify::{self, CertifyError, CodeSpecFile, ScanSpec};
use twoblock::code::{SearchLimits, Strategy};
use twoblock::realnum::parse_rational;

#[derive(Parser)]
#[command(name = "twoblock", version, about = "Two-block group algebra codes on lattice quotients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print [[N, k, d]] of a code given as JSON.
    Params(CodeArgs),
    /// Run the full embedding, localization and bound pipeline on a code.
    Certify(CodeArgs),
    /// Sample random codes from a family and tabulate them.
    Scan(ScanArgs),
    /// Good basis and slab partition of a raw lattice.
    Lattice(LatticeArgs),
    /// Evaluate the distance bound for raw m, ρ, D and n.
    Bound(BoundArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// Largest weight certified by bounded searches.
    #[arg(long)]
    max_weight: Option<usize>,
    /// Largest kernel dimension searched exhaustively.
    #[arg(long)]
    kernel_dim_cap: Option<usize>,
    /// JSON by default; CSV is the default for `scan`.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write output here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    /// The spec file's limits, overridden by the flags.
    fn apply_to(&self, spec: &mut CodeSpecFile) {
        spec.max_weight = self.max_weight.or(spec.max_weight);
        spec.kernel_dim_cap = self.kernel_dim_cap.or(spec.kernel_dim_cap);
    }

    fn limits(&self) -> SearchLimits {
        let d = SearchLimits::default();
        SearchLimits {
            max_weight: self.max_weight.unwrap_or(d.max_weight),
            kernel_dim_cap: self.kernel_dim_cap.unwrap_or(d.kernel_dim_cap),
            ..d
        }
    }
}

#[derive(Args)]
struct CodeArgs {
    /// JSON file such as {"group":[3,3],"a":[[0,0],[1,0]],"b":[[0,0],[0,1]]}.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
    strategy: StrategyArg,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ScanArgs {
    /// JSON family description; the flags below override its fields.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long)]
    min_order: Option<i64>,
    #[arg(long)]
    max_order: Option<i64>,
    #[arg(long)]
    max_n: Option<usize>,
    #[arg(long)]
    weight: Option<usize>,
    #[arg(long)]
    count: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct LatticeArgs {
    /// JSON file {"basis": [[...], ...], "rho": "1"}.
    #[arg(long)]
    spec: PathBuf,
    /// Overrides the file's ρ; a rational such as 1, 3/2 or 0.75.
    #[arg(long)]
    rho: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long, default_value_t = 2)]
    m: u64,
    #[arg(long, default_value = "1")]
    rho: String,
    #[arg(long = "dim")]
    dim: usize,
    #[arg(long)]
    n: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Auto,
    Exhaust,
    Ascending,
    InfoSet,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Auto => Strategy::Auto,
            StrategyArg::Exhaust => Strategy::KernelExhaustion,
            StrategyArg::Ascending => Strategy::AscendingWeight,
            StrategyArg::InfoSet => Strategy::InformationSet,
        }
    }
}

enum Failure {
    Input(String),
    Internal(String),
}

impl From<CertifyError> for Failure {
    fn from(e: CertifyError) -> Self {
        match e {
            CertifyError::Input { .. } => Failure::Input(e.to_string()),
            CertifyError::Internal(_) => Failure::Internal(e.to_string()),
        }
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> Result<(), Failure> {
    let written = match out {
        Some(p) => fs::write(p, bytes),
        None => io::stdout().lock().write_all(bytes),
    };
    written.map_err(|e| Failure::Input(format!("cannot write output: {e}")))
}

fn json<T: Serialize>(value: &T, common: &Common) -> Result<(), Failure> {
    if common.format == Some(Format::Csv) {
        return Err(Failure::Input("--format csv is only available for scan".into()));
    }
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Internal(e.to_string()))?;
    text.push('\n');
    emit(&common.out, text.as_bytes())
}

fn rational(text: &str, what: &str) -> Result<BigRational, Failure> {
    parse_rational(text).ok_or_else(|| Failure::Input(format!("{what}: cannot parse {text:?} as a rational")))
}

/// Adds the layout version to reports that do not carry one.
#[derive(Serialize)]
struct Versioned<T> {
    format_version: u32,
    #[serde(flatten)]
    report: T,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeFile {
    basis: Vec<Vec<i64>>,
    #[serde(default)]
    rho: Option<serde_json::Value>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ScanFile {
    rank: Option<usize>,
    min_order: Option<i64>,
    max_order: Option<i64>,
    max_n: Option<usize>,
    weight: Option<usize>,
    count: Option<usize>,
    seed: Option<u64>,
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Params(args) => {
            let mut spec: CodeSpecFile = read_json(&args.spec)?;
            args.common.apply_to(&mut spec);
            let code = spec.build()?;
            let report = certify::code_params(&code, args.strategy.into(), &spec.limits(args.common.limits()))?;
            json(&report, &args.common)
        }
        Command::Certify(args) => {
            let mut spec: CodeSpecFile = read_json(&args.spec)?;
            args.common.apply_to(&mut spec);
            let report = certify::certify(&spec, &args.common.limits())?;
            json(&report, &args.common)
        }
        Command::Scan(args) => {
            let file: ScanFile = match &args.spec {
                Some(p) => read_json(p)?,
                None => ScanFile::default(),
            };
            let spec = ScanSpec {
                rank: args.rank.or(file.rank).unwrap_or(1),
                min_order: args.min_order.or(file.min_order).unwrap_or(2),
                max_order: args.max_order.or(file.max_order).unwrap_or(30),
                max_n: args.max_n.or(file.max_n),
                weight: args.weight.or(file.weight).unwrap_or(4),
                count: args.count.or(file.count).unwrap_or(100),
                seed: args.seed.or(file.seed).unwrap_or(0),
            };
            let rows = certify::scan(&spec, &args.common.limits())?;
            match args.common.format.unwrap_or(Format::Csv) {
                Format::Json => {
                    let mut text = serde_json::to_string_pretty(&rows).map_err(|e| Failure::Internal(e.to_string()))?;
                    text.push('\n');
                    emit(&args.common.out, text.as_bytes())
                }
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    if rows.is_empty() {
                        w.write_record(certify::SCAN_COLUMNS).map_err(|e| Failure::Internal(e.to_string()))?;
                    }
                    for r in &rows {
                        w.serialize(r).map_err(|e| Failure::Internal(e.to_string()))?;
                    }
                    let bytes = w.into_inner().map_err(|e| Failure::Internal(e.to_string()))?;
                    emit(&args.common.out, &bytes)
                }
            }
        }
        Command::Lattice(args) => {
            let file: LatticeFile = read_json(&args.spec)?;
            let rho_text = match (&args.rho, &file.rho) {
                (Some(r), _) => r.clone(),
                (None, Some(serde_json::Value::String(s))) => s.clone(),
                (None, Some(serde_json::Value::Number(n))) => n.to_string(),
                (None, Some(_)) => return Err(Failure::Input("rho: expected a number or a string".into())),
                (None, None) => "1".into(),
            };
            let rho = rational(&rho_text, "rho")?;
            let report = certify::lattice_report(&file.basis, &rho)?;
            json(&report, &args.common)
        }
        Command::Bound(args) => {
            let rho = rational(&args.rho, "rho")?;
            let report = bt_bound(args.m, &rho, args.dim, args.n).map_err(|e| Failure::Input(e.to_string()))?;
            json(&Versioned { format_version: certify::FORMAT_VERSION, report }, &args.common)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
