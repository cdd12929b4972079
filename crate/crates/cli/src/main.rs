//! `tstat`: command-line access to truncation functionals, leading terms,
//! simulation of the t statistic, rate reports and experiment manifests.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use tstat_core::experiment::{
    curve_csv, empirical_cdf_csv, empirical_values_csv, error_record, exit_code, functionals_csv, run_manifest,
    sha256_hex, with_header, DistributionRef, ExperimentManifest, Metadata,
};
use tstat_core::functionals::{compute_functionals, DEFAULT_ALPHA};
use tstat_core::leading_terms::{eval_term, Grid, TermKind};
use tstat_core::rates::{build_rate_report, DEFAULT_X0, DEFAULT_X1};
use tstat_core::simulation::{exact_t_distribution, simulate_t, EmpiricalDistribution, Variant};
use tstat_core::{DistributionCatalog, DistributionSpec, Result};

#[derive(Parser, Debug)]
#[command(
    name = "tstat",
    version,
    about = "Leading terms and convergence rates for Student's t statistic"
)]
struct Cli {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true, env = "TSTAT_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Inspect the distribution catalog.
    Dist {
        #[command(subcommand)]
        action: DistAction,
    },
    /// Truncation radius, rate functional and truncated moments.
    Functionals(FunctionalsArgs),
    /// Evaluate a leading term on a grid.
    LeadingTerm(LeadingTermArgs),
    /// Monte Carlo law of the t statistic.
    Simulate(SimulateArgs),
    /// Exact law of the t statistic for small discrete cases.
    Oracle(OracleArgs),
    /// Sup discrepancies against the normal law and the corrected approximation.
    Rates(RatesArgs),
    /// Run an experiment manifest.
    Run(RunArgs),
}

#[derive(Subcommand, Debug)]
enum DistAction {
    /// List catalog entries as JSON.
    List,
}

#[derive(Args, Debug)]
struct DistArg {
    /// Catalog name, or `student-t` together with --nu.
    #[arg(long)]
    dist: String,
    /// Degrees of freedom for `student-t`.
    #[arg(long)]
    nu: Option<f64>,
    /// Rescale the law by this factor.
    #[arg(long)]
    scale: Option<f64>,
}

impl DistArg {
    fn spec(&self) -> Result<DistributionSpec> {
        DistributionRef {
            name: self.dist.clone(),
            scale: self.scale,
            params: self.nu.into_iter().collect(),
        }
        .resolve(&DistributionCatalog::standard(), "dist")
    }

    fn json(&self) -> serde_json::Value {
        json!({ "dist": self.dist, "nu": self.nu, "scale": self.scale })
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum TableFormat {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct FunctionalsArgs {
    #[command(flatten)]
    dist: DistArg,
    /// Sample size.
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "json")]
    format: TableFormat,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum TermArg {
    Ln,
    Mn1,
    Mn2,
    Qn1,
    Ln1,
    Ln2,
    /// Studentized Edgeworth form.
    Edgeworth,
    /// Edgeworth form of the plain standardized mean.
    EdgeworthPlain,
}

impl From<TermArg> for TermKind {
    fn from(t: TermArg) -> Self {
        match t {
            TermArg::Ln => TermKind::Ln,
            TermArg::Mn1 => TermKind::Mn1,
            TermArg::Mn2 => TermKind::Mn2,
            TermArg::Qn1 => TermKind::Qn1,
            TermArg::Ln1 => TermKind::Ln1,
            TermArg::Ln2 => TermKind::Ln2,
            TermArg::Edgeworth => TermKind::EdgeworthStudent,
            TermArg::EdgeworthPlain => TermKind::EdgeworthPlain,
        }
    }
}

#[derive(Args, Debug)]
struct LeadingTermArgs {
    #[command(flatten)]
    dist: DistArg,
    /// Sample size.
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, value_enum)]
    term: TermArg,
    #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
    grid_min: f64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    grid_max: f64,
    #[arg(long, default_value_t = 0.005)]
    grid_step: f64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum VariantArg {
    DivisorN,
    DivisorNMinus1,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::DivisorN => Variant::DivisorN,
            VariantArg::DivisorNMinus1 => Variant::DivisorNMinus1,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum LawFormat {
    /// Sorted values with their mass, ±∞ rows first and last.
    Values,
    /// Empirical CDF on the default grid.
    Cdf,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    dist: DistArg,
    /// Sample size.
    #[arg(long)]
    n: u64,
    /// Monte Carlo replicates.
    #[arg(long)]
    replicates: u64,
    /// Base seed; output does not depend on --threads.
    #[arg(long)]
    seed: u64,
    #[arg(long, value_enum, default_value = "divisor-n")]
    variant: VariantArg,
    #[arg(long, value_enum, default_value = "values")]
    format: LawFormat,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    dist: DistArg,
    /// Sample size.
    #[arg(long)]
    n: u64,
    #[arg(long, value_enum, default_value = "divisor-n")]
    variant: VariantArg,
    #[arg(long, value_enum, default_value = "values")]
    format: LawFormat,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RatesArgs {
    #[command(flatten)]
    dist: DistArg,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    n_list: Vec<u64>,
    /// Monte Carlo replicates.
    #[arg(long)]
    replicates: u64,
    /// Base seed; output does not depend on --threads.
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_X0, allow_negative_numbers = true)]
    x0: f64,
    #[arg(long, default_value_t = DEFAULT_X1, allow_negative_numbers = true)]
    x1: f64,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "divisor-n")]
    variant: VariantArg,
    /// Directory receiving rates.csv and summary.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Path to a JSON manifest.
    manifest: PathBuf,
}

/// Hash of a command's parameters, recorded where a manifest hash would be.
fn params_hash(command: &str, params: &serde_json::Value) -> String {
    sha256_hex(json!({ "command": command, "params": params }).to_string().as_bytes())
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            fs::write(p, text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn law_body(emp: &EmpiricalDistribution, format: LawFormat) -> String {
    match format {
        LawFormat::Values => empirical_values_csv(emp),
        LawFormat::Cdf => empirical_cdf_csv(emp, &Grid::default()),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Dist {
            action: DistAction::List,
        } => {
            let text =
                serde_json::to_string_pretty(&DistributionCatalog::standard().manifest()).expect("catalog serializes");
            println!("{text}");
        }
        Command::Functionals(a) => {
            let d = a.dist.spec()?;
            let f = compute_functionals(&d, a.n, a.alpha)?;
            let hash = params_hash(
                "functionals",
                &json!({ "dist": a.dist.json(), "n": a.n, "alpha": a.alpha }),
            );
            let meta = Metadata::new("functionals", &hash, None);
            let body = match a.format {
                TableFormat::Json => serde_json::to_string_pretty(&f).expect("functionals serialize") + "\n",
                TableFormat::Csv => functionals_csv(std::slice::from_ref(&f)),
            };
            emit(a.out.as_deref(), &with_header(&meta, &body))?;
        }
        Command::LeadingTerm(a) => {
            let d = a.dist.spec()?;
            let grid = Grid::uniform(a.grid_min, a.grid_max, a.grid_step)?;
            let term = TermKind::from(a.term);
            let curve = eval_term(term, &d, a.n, a.alpha, &grid)?;
            let hash = params_hash(
                "leading-term",
                &json!({
                    "dist": a.dist.json(), "n": a.n, "alpha": a.alpha, "term": term.label(),
                    "grid": [a.grid_min, a.grid_max, a.grid_step]
                }),
            );
            emit(
                a.out.as_deref(),
                &with_header(&Metadata::new("curve", &hash, None), &curve_csv(&curve)),
            )?;
        }
        Command::Simulate(a) => {
            let d = a.dist.spec()?;
            let variant = Variant::from(a.variant);
            let emp = simulate_t(&d, a.n, a.replicates, a.seed, variant)?;
            let hash = params_hash(
                "simulate",
                &json!({
                    "dist": a.dist.json(), "n": a.n, "replicates": a.replicates,
                    "seed": a.seed, "variant": variant.label()
                }),
            );
            let meta = Metadata::new("t_law", &hash, Some(a.seed));
            emit(a.out.as_deref(), &with_header(&meta, &law_body(&emp, a.format)))?;
        }
        Command::Oracle(a) => {
            let d = a.dist.spec()?;
            let variant = Variant::from(a.variant);
            let emp = exact_t_distribution(&d, a.n, variant)?;
            let hash = params_hash(
                "oracle",
                &json!({ "dist": a.dist.json(), "n": a.n, "variant": variant.label() }),
            );
            let meta = Metadata::new("t_law", &hash, None);
            emit(a.out.as_deref(), &with_header(&meta, &law_body(&emp, a.format)))?;
        }
        Command::Rates(a) => {
            let d = a.dist.spec()?;
            let variant = Variant::from(a.variant);
            let report = build_rate_report(&d, &a.n_list, a.replicates, a.seed, a.x0, a.x1, a.alpha, variant)?;
            let hash = params_hash(
                "rates",
                &json!({
                    "dist": a.dist.json(), "n_list": a.n_list, "replicates": a.replicates, "seed": a.seed,
                    "x0": a.x0, "x1": a.x1, "alpha": a.alpha, "variant": variant.label()
                }),
            );
            fs::create_dir_all(&a.out)?;
            let seed = Some(a.seed);
            fs::write(
                a.out.join("rates.csv"),
                with_header(&Metadata::new("rates", &hash, seed), &report.to_csv()),
            )?;
            let summary = serde_json::to_string_pretty(&report.summary()).expect("summary serializes") + "\n";
            fs::write(
                a.out.join("summary.json"),
                with_header(&Metadata::new("rates_summary", &hash, seed), &summary),
            )?;
        }
        Command::Run(a) => {
            let manifest = ExperimentManifest::from_path(&a.manifest)?;
            let out = run_manifest(&manifest)?;
            for f in out.files {
                println!("{}", f.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!(
                "{}",
                json!({ "error": "validation", "field": "threads", "message": e.to_string() })
            );
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_record(&e));
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
