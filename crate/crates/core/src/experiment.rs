//! Experiment manifests and the file formats shared with the command line.
//!
//! Every output file starts with one line of JSON metadata (manifest hash,
//! seed, timestamp). Everything after that line depends only on the manifest,
//! so re-runs reproduce the bodies byte for byte.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::distributions::{DistributionCatalog, DistributionSpec};
use crate::error::{Error, Result};
use crate::functionals::{compute_functionals, TruncationFunctionals, DEFAULT_ALPHA};
use crate::leading_terms::{eval_term, CurveOnGrid, Grid, TermKind};
use crate::rates::{build_rate_report, check_points, RateReport, RateSummary, DEFAULT_X0, DEFAULT_X1};
use crate::simulation::{EmpiricalDistribution, Variant};

pub const SCHEMA_VERSION: u32 = 1;

/// A catalog entry by name, optionally rescaled. `params` is only accepted
/// for the `student-t` family, as `[nu]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionRef {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<f64>,
}

impl DistributionRef {
    pub fn named(name: &str) -> Self {
        Self {
            name: name.to_string(),
            scale: None,
            params: Vec::new(),
        }
    }

    pub fn resolve(&self, catalog: &DistributionCatalog, field: &str) -> Result<DistributionSpec> {
        if self.name == "student-t" {
            let [nu] = self.params[..] else {
                return Err(Error::invalid(
                    format!("{field}.params"),
                    "student-t takes exactly one parameter, nu",
                ));
            };
            let base = DistributionSpec::student_t(nu)
                .map_err(|e| Error::invalid(format!("{field}.params"), e.to_string()))?;
            return match self.scale {
                None => Ok(base),
                Some(c) => base
                    .scaled(c)
                    .map_err(|e| Error::invalid(format!("{field}.scale"), e.to_string())),
            };
        }
        if !self.params.is_empty() {
            return Err(Error::invalid(
                format!("{field}.params"),
                format!("{} takes no parameters", self.name),
            ));
        }
        catalog.resolve(&self.name, self.scale, &format!("{field}.name"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            min: -10.0,
            max: 10.0,
            step: 0.005,
        }
    }
}

impl GridSpec {
    /// The uniform grid with `±x0` and `x1` added.
    pub fn build(&self, x0: f64, x1: f64) -> Result<Grid> {
        let base = Grid::uniform(self.min, self.max, self.step)?;
        let mut pts = base.points().to_vec();
        pts.extend([-x0, x0, x1]);
        Grid::new(pts)
    }
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}
fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}
fn default_variant() -> Variant {
    Variant::DivisorN
}
fn default_x0() -> f64 {
    DEFAULT_X0
}
fn default_x1() -> f64 {
    DEFAULT_X1
}
fn default_terms() -> Vec<TermKind> {
    vec![TermKind::Ln]
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentManifest {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub distributions: Vec<DistributionRef>,
    pub n_list: Vec<u64>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub replicates: u64,
    /// Required whenever a rate report is requested.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_variant")]
    pub variant: Variant,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default = "default_x0")]
    pub x0: f64,
    #[serde(default = "default_x1")]
    pub x1: f64,
    /// Curves written per `(distribution, n)`.
    #[serde(default = "default_terms")]
    pub terms: Vec<TermKind>,
    #[serde(default = "default_true")]
    pub rates: bool,
    pub output_dir: PathBuf,
}

impl ExperimentManifest {
    /// All catalog entries with default settings.
    pub fn default_suite(n_list: Vec<u64>, replicates: u64, seed: u64, output_dir: PathBuf) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            distributions: DistributionCatalog::standard()
                .names()
                .iter()
                .map(|n| DistributionRef::named(n))
                .collect(),
            n_list,
            alpha: DEFAULT_ALPHA,
            replicates,
            seed: Some(seed),
            variant: Variant::DivisorN,
            grid: GridSpec::default(),
            x0: DEFAULT_X0,
            x1: DEFAULT_X1,
            terms: default_terms(),
            rates: true,
            output_dir,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid("manifest", e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::invalid("manifest", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    /// SHA-256 of the compact JSON serialization.
    pub fn hash(&self) -> String {
        sha256_hex(serde_json::to_string(self).expect("manifest serializes").as_bytes())
    }

    /// Resolves every distribution and checks every field.
    pub fn validate(&self) -> Result<Vec<DistributionSpec>> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::invalid(
                "schema_version",
                format!("expected {SCHEMA_VERSION}, got {}", self.schema_version),
            ));
        }
        if self.distributions.is_empty() {
            return Err(Error::invalid("distributions", "empty"));
        }
        let catalog = DistributionCatalog::standard();
        let dists = self
            .distributions
            .iter()
            .enumerate()
            .map(|(i, d)| d.resolve(&catalog, &format!("distributions[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        if self.n_list.is_empty() {
            return Err(Error::invalid("n_list", "empty"));
        }
        if let Some(n) = self.n_list.iter().find(|&&n| n < 2) {
            return Err(Error::invalid("n_list", format!("each n must be at least 2, got {n}")));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::invalid(
                "alpha",
                format!("alpha must lie in (0, 1], got {}", self.alpha),
            ));
        }
        check_points(self.x0, self.x1)?;
        self.grid.build(self.x0, self.x1)?;
        if self.rates {
            if self.seed.is_none() {
                return Err(Error::invalid("seed", "a seed is required for Monte Carlo steps"));
            }
            if self.replicates == 0 {
                return Err(Error::invalid("replicates", "rate reports need at least one replicate"));
            }
        }
        Ok(dists)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// First line of every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub kind: String,
    pub manifest_sha256: String,
    pub seed: Option<u64>,
    pub generated_unix: u64,
    pub tool_version: String,
}

impl Metadata {
    pub fn new(kind: &str, manifest_sha256: &str, seed: Option<u64>) -> Self {
        Self {
            kind: kind.to_string(),
            manifest_sha256: manifest_sha256.to_string(),
            seed,
            generated_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn line(&self) -> String {
        serde_json::to_string(self).expect("metadata serializes")
    }
}

/// Metadata line followed by the body.
pub fn with_header(meta: &Metadata, body: &str) -> String {
    format!("{}\n{body}", meta.line())
}

/// Everything after the metadata line.
pub fn body_of(text: &str) -> &str {
    text.split_once('\n').map_or("", |(_, b)| b)
}

pub const FUNCTIONALS_HEADER: &str = "dist,n,alpha,b_n,delta_n,d1,d2,d3,d4,nu,tau2,sigma_n2,B_n2,rho_n,u1,u2,u3,u4";

pub fn functionals_csv_row(f: &TruncationFunctionals) -> String {
    let c = f.delta_components;
    format!(
        "{},{},{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
        f.dist,
        f.n,
        f.alpha,
        f.b_n,
        f.delta_n,
        c.d1,
        c.d2,
        c.d3,
        c.d4,
        f.nu,
        f.tau2,
        f.sigma_n2,
        f.big_b_n2,
        f.rho_n,
        f.u[0],
        f.u[1],
        f.u[2],
        f.u[3]
    )
}

pub fn functionals_csv(rows: &[TruncationFunctionals]) -> String {
    let mut out = format!("{FUNCTIONALS_HEADER}\n");
    for f in rows {
        out.push_str(&functionals_csv_row(f));
        out.push('\n');
    }
    out
}

pub fn curve_csv(curve: &CurveOnGrid) -> String {
    let mut out = String::from("x,value\n");
    for (x, v) in curve.grid.iter().zip(&curve.values) {
        out.push_str(&format!("{x},{v:e}\n"));
    }
    out
}

/// Sorted finite values with their mass, bracketed by the ±∞ masses.
pub fn empirical_values_csv(emp: &EmpiricalDistribution) -> String {
    let mut out = String::from("value,mass\n");
    out.push_str(&format!("-inf,{:e}\n", emp.mass_neg_inf));
    for (v, m) in emp.atoms() {
        let m = if emp.weights.is_some() { m } else { 1.0 };
        out.push_str(&format!("{v:e},{m:e}\n"));
    }
    out.push_str(&format!("inf,{:e}\n", emp.mass_pos_inf));
    out
}

pub fn empirical_cdf_csv(emp: &EmpiricalDistribution, grid: &Grid) -> String {
    let mut out = String::from("x,cdf\n");
    for &x in grid.points() {
        out.push_str(&format!("{x},{:e}\n", emp.cdf(x)));
    }
    out
}

/// Machine-readable record of a failure.
pub fn error_record(e: &Error) -> serde_json::Value {
    match e {
        Error::Invalid { field, message } => serde_json::json!({
            "error": "validation", "field": field, "message": message
        }),
        Error::Quadrature { .. } | Error::Degenerate(_) => serde_json::json!({
            "error": "numerical", "message": e.to_string()
        }),
        Error::Io(m) => serde_json::json!({ "error": "io", "message": m }),
    }
}

/// 1 for validation failures, 2 for everything else.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_validation() {
        1
    } else {
        2
    }
}

/// Files written by [`run_manifest`], in write order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
}

fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect()
}

fn term_stem(term: TermKind) -> &'static str {
    match term {
        TermKind::Ln => "ln",
        TermKind::Mn1 => "mn1",
        TermKind::Mn2 => "mn2",
        TermKind::Qn1 => "qn1",
        TermKind::Ln1 => "ln1",
        TermKind::Ln2 => "ln2",
        TermKind::EdgeworthStudent => "edgeworth_student",
        TermKind::EdgeworthPlain => "edgeworth_plain",
        TermKind::EmpiricalCdf => "empirical_cdf",
    }
}

/// Writes `functionals.csv`, one curve file per `(distribution, n, term)`
/// under `curves/`, and when requested `rates_<dist>.csv` plus
/// `rates_summary.json`.
pub fn run_manifest(manifest: &ExperimentManifest) -> Result<RunOutput> {
    let dists = manifest.validate()?;
    let hash = manifest.hash();
    let seed = manifest.seed;
    let dir = &manifest.output_dir;
    fs::create_dir_all(dir.join("curves"))?;
    let grid = manifest.grid.build(manifest.x0, manifest.x1)?;
    let mut ns = manifest.n_list.clone();
    ns.sort_unstable();
    ns.dedup();

    let mut out = RunOutput::default();
    let mut write = |path: PathBuf, kind: &str, body: &str| -> Result<()> {
        fs::write(&path, with_header(&Metadata::new(kind, &hash, seed), body))?;
        out.files.push(path);
        Ok(())
    };

    let mut functionals = Vec::new();
    for d in &dists {
        for &n in &ns {
            functionals.push(compute_functionals(d, n, manifest.alpha)?);
        }
    }
    write(
        dir.join("functionals.csv"),
        "functionals",
        &functionals_csv(&functionals),
    )?;

    for d in &dists {
        for &n in &ns {
            for &term in &manifest.terms {
                let curve = eval_term(term, d, n, manifest.alpha, &grid)?;
                let path = dir
                    .join("curves")
                    .join(format!("{}_n{n}_{}.csv", file_stem(d.name()), term_stem(term)));
                write(path, "curve", &curve_csv(&curve))?;
            }
        }
    }

    if manifest.rates {
        let seed = seed.expect("validated");
        let mut summaries: Vec<RateSummary> = Vec::new();
        for d in &dists {
            let report: RateReport = build_rate_report(
                d,
                &ns,
                manifest.replicates,
                seed,
                manifest.x0,
                manifest.x1,
                manifest.alpha,
                manifest.variant,
            )?;
            write(
                dir.join(format!("rates_{}.csv", file_stem(d.name()))),
                "rates",
                &report.to_csv(),
            )?;
            summaries.push(report.summary());
        }
        let body = serde_json::to_string_pretty(&summaries).expect("summary serializes") + "\n";
        write(dir.join("rates_summary.json"), "rates_summary", &body)?;
    }
    Ok(out)
}
