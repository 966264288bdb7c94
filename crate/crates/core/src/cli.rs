//! Command-line front end with a content-addressed result cache.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::bergman::bounds::{geometric_bound_pipeline, spectral_lower_bound};
use crate::bergman::qexp::eigenform_coefficients;
use crate::bergman::{elementary_theta_coeffs, hecke_ratio, kernel_sum, theta_coefficient, Convention, KernelSumParams, QExpansion};
use crate::error::Error;
use crate::halfplane::{Frame, Point};
use crate::lattice::{count_norm_ball, count_profile, second_moment, trace_split_pairs, CountQuery, OrderSpec, Weighting};
use crate::quaternion::{count_quat, CartanParams, DivisionOrderModel, ImagQuadField, LatticeChoice};
use crate::weil::{fixed_by_u0, local_orbit_report, orbit_closure, FiniteModel, FiniteWeilFunction, OrbitGolden};

/// Version of the JSON output layout.
pub const SCHEMA: u32 = 1;
/// Part of every cache key; bump to invalidate stored results.
pub const CACHE_VERSION: &str = concat!("theta-moment-", env!("CARGO_PKG_VERSION"), "-c1");
/// Overrides `--cache-dir`.
pub const CACHE_ENV: &str = "THETA_MOMENT_CACHE";

/// Reals as decimal strings with 17 significant digits.
pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Parser, Debug, Clone)]
#[command(name = "theta-moment", version, about = "Kernel sums, lattice counts and local Weil orbits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Worker threads for the library's parallel loops.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThetaSource {
    /// Hecke cosets applied to the eigenform.
    Elementary,
    /// Geometric kernel sums.
    Kernel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConventionArg {
    Hyperbolic,
    Probability,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Hyperbolic => Convention::Hyperbolic,
            ConventionArg::Probability => Convention::Probability,
        }
    }
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// M(g, n; delta) for a single norm.
    Count(CountArgs),
    /// M(g, n; delta) for n <= N, with second moments.
    Profile(ProfileArgs),
    /// The kernel sum S(n; z, w).
    Kernel(KernelArgs),
    /// kappa(n) = S(n; z, w) / S(1; z, w).
    Hecke(HeckeArgs),
    /// Fourier coefficients of the theta kernel.
    Theta(ThetaArgs),
    /// Orbit of 1_R under the local Weil representation.
    WeilOrbit(WeilArgs),
    /// Spectral lower and geometric upper bounds.
    ReportBounds(BoundsArgs),
    /// Counts in the division order model.
    QuatCount(QuatArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CountArgs {
    #[arg(long, default_value = "full")]
    pub order: String,
    #[arg(long, default_value = "i", allow_hyphen_values = true)]
    pub z: String,
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ProfileArgs {
    #[arg(long, default_value = "full")]
    pub order: String,
    #[arg(long, default_value = "i", allow_hyphen_values = true)]
    pub z: String,
    #[arg(long = "N")]
    pub horizon: u64,
    #[arg(long, conflicts_with = "delta_grid")]
    pub delta: Option<f64>,
    /// `a:b:steps`, evenly spaced and inclusive.
    #[arg(long)]
    pub delta_grid: Option<String>,
    /// Add pair counts split by trace equality.
    #[arg(long)]
    pub trace_split: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct KernelArgs {
    #[arg(long, default_value = "full")]
    pub order: String,
    #[arg(long, default_value = "i", allow_hyphen_values = true)]
    pub z: String,
    #[arg(long, allow_hyphen_values = true)]
    pub w: Option<String>,
    #[arg(long, default_value_t = 12)]
    pub m: u32,
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct HeckeArgs {
    #[arg(long, default_value = "i", allow_hyphen_values = true)]
    pub z: String,
    #[arg(long, allow_hyphen_values = true)]
    pub w: Option<String>,
    #[arg(long, default_value_t = 12)]
    pub m: u32,
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ThetaArgs {
    #[arg(long, default_value = "i", allow_hyphen_values = true)]
    pub z: String,
    #[arg(long, default_value_t = 12)]
    pub m: u32,
    #[arg(long = "N")]
    pub horizon: u64,
    #[arg(long, value_enum, default_value_t = ThetaSource::Elementary)]
    pub source: ThetaSource,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct WeilArgs {
    #[arg(long)]
    pub p: u32,
    /// Exponent n of the local level p^n.
    #[arg(long, default_value_t = 1)]
    pub level: u32,
    #[arg(long)]
    pub ramified: bool,
    /// Use the carrier p^-j M_2 / p^j M_2 with this j instead of R^/R.
    #[arg(long = "box")]
    pub box_depth: Option<u32>,
    /// Write the orbit as a golden file.
    #[arg(long)]
    pub golden_out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BoundsArgs {
    #[arg(long, default_value = "i", allow_hyphen_values = true)]
    pub z: String,
    /// Weights; several give a trend table.
    #[arg(long, value_delimiter = ',', default_value = "12")]
    pub m: Vec<u32>,
    #[arg(long, default_value_t = 20)]
    pub tail: u64,
    #[arg(long, value_enum, default_value_t = ConventionArg::Probability)]
    pub convention: ConventionArg,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct QuatArgs {
    #[arg(long = "d-e", default_value_t = -19, allow_hyphen_values = true)]
    pub d_e: i64,
    #[arg(long = "d-b", default_value_t = 6)]
    pub d_b: u64,
    #[arg(long, conflicts_with = "horizon")]
    pub n: Option<u64>,
    #[arg(long = "N")]
    pub horizon: Option<u64>,
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
    #[arg(long, default_value = "suborder")]
    pub lattice: String,
}

enum Failure {
    Usage(String),
    Compute(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

fn point(s: &str) -> Result<Point, Failure> {
    s.parse::<Point>().map_err(|e| Failure::Usage(format!("--z/--w {s:?}: {e}")))
}

fn order(s: &str) -> Result<OrderSpec, Failure> {
    s.parse::<OrderSpec>().map_err(|e| Failure::Usage(format!("--order {s:?}: {e}")))
}

fn delta_grid(s: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, k] = parts[..] else {
        return usage(format!("--delta-grid {s:?} is not a:b:steps"));
    };
    let (a, b): (f64, f64) = match (a.parse(), b.parse()) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return usage(format!("--delta-grid {s:?} has non-numeric bounds")),
    };
    let k: usize = k.parse().map_err(|_| Failure::Usage(format!("--delta-grid {s:?} has a bad step count")))?;
    if k == 0 || !(a >= 0.0 && b >= a) {
        return usage(format!("--delta-grid {s:?} needs 0 <= a <= b and steps >= 1"));
    }
    if k == 1 {
        return Ok(vec![a]);
    }
    Ok((0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect())
}

/// A tabular view used for CSV output.
struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

struct Outcome {
    result: Value,
    table: Option<Table>,
}

fn canonical_point(s: &str) -> Result<String, Failure> {
    Ok(point(s)?.to_string())
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Count(_) => "count",
            Command::Profile(_) => "profile",
            Command::Kernel(_) => "kernel",
            Command::Hecke(_) => "hecke",
            Command::Theta(_) => "theta",
            Command::WeilOrbit(_) => "weil-orbit",
            Command::ReportBounds(_) => "report-bounds",
            Command::QuatCount(_) => "quat-count",
        }
    }

    /// Validate and canonicalize textual parameters.
    fn resolve(&self) -> Result<Command, Failure> {
        let mut c = self.clone();
        match &mut c {
            Command::Count(a) => {
                a.z = canonical_point(&a.z)?;
                a.order = order(&a.order)?.to_string();
            }
            Command::Profile(a) => {
                a.z = canonical_point(&a.z)?;
                a.order = order(&a.order)?.to_string();
                if a.delta.is_none() && a.delta_grid.is_none() {
                    a.delta = Some(0.0);
                }
                if let Some(g) = &a.delta_grid {
                    delta_grid(g)?;
                }
            }
            Command::Kernel(a) => {
                a.z = canonical_point(&a.z)?;
                a.w = Some(canonical_point(a.w.as_deref().unwrap_or(&a.z))?);
                a.order = order(&a.order)?.to_string();
            }
            Command::Hecke(a) => {
                a.z = canonical_point(&a.z)?;
                a.w = Some(canonical_point(a.w.as_deref().unwrap_or(&a.z))?);
            }
            Command::Theta(a) => a.z = canonical_point(&a.z)?,
            Command::ReportBounds(a) => {
                a.z = canonical_point(&a.z)?;
                if a.m.is_empty() {
                    return usage("--m needs at least one weight");
                }
            }
            Command::WeilOrbit(a) => {
                if a.ramified && a.level != 1 {
                    return usage("a ramified prime has level exponent 1");
                }
            }
            Command::QuatCount(a) => {
                a.lattice = match a.lattice.parse::<LatticeChoice>().map_err(|e| Failure::Usage(e.to_string()))? {
                    LatticeChoice::Suborder => "suborder".into(),
                    LatticeChoice::DualLattice => "dual".into(),
                };
                if a.n.is_none() && a.horizon.is_none() {
                    return usage("quat-count needs --n or --N");
                }
            }
        }
        Ok(c)
    }

    fn execute(&self) -> Result<Outcome, Failure> {
        match self {
            Command::Count(a) => {
                let q = CountQuery { order: order(&a.order)?, frame: Frame::from_point(&point(&a.z)?), n: a.n, delta: a.delta };
                let count = count_norm_ball(&q)?;
                Ok(Outcome {
                    result: json!({ "count": count }),
                    table: Some(Table { columns: vec!["n", "delta", "count"], rows: vec![vec![a.n.to_string(), real(a.delta), count.to_string()]] }),
                })
            }
            Command::Profile(a) => profile(a),
            Command::Kernel(a) => {
                let p = KernelSumParams::new(a.m, a.tol)?;
                let z = point(&a.z)?;
                let w = point(a.w.as_deref().unwrap_or(&a.z))?;
                let s = kernel_sum(a.n, &z, &w, &p, order(&a.order)?)?;
                Ok(complex_outcome(s, "s"))
            }
            Command::Hecke(a) => hecke(a),
            Command::Theta(a) => theta(a),
            Command::WeilOrbit(a) => weil(a),
            Command::ReportBounds(a) => bounds(a),
            Command::QuatCount(a) => quat(a),
        }
    }
}

fn complex_outcome(s: Complex64, name: &'static str) -> Outcome {
    Outcome {
        result: json!({ "re": real(s.re), "im": real(s.im), "abs": real(s.norm()) }),
        table: Some(Table { columns: vec!["quantity", "re", "im"], rows: vec![vec![name.into(), real(s.re), real(s.im)]] }),
    }
}

fn profile(a: &ProfileArgs) -> Result<Outcome, Failure> {
    let ord = order(&a.order)?;
    let frame = Frame::from_point(&point(&a.z)?);
    let deltas = match (&a.delta_grid, a.delta) {
        (Some(g), _) => delta_grid(g)?,
        (None, d) => vec![d.unwrap_or(0.0)],
    };
    let big_a = (ord.level() * ord.level()) as f64;
    let mut profiles = Vec::new();
    let mut columns = vec!["delta", "n", "count"];
    if a.trace_split {
        columns.extend(["pairs_equal_trace", "pairs_different_trace"]);
    }
    let mut rows = Vec::new();
    for d in deltas {
        let p = count_profile(ord, &frame, a.horizon, d)?;
        let split = if a.trace_split { Some(trace_split_pairs(ord, &frame, a.horizon, d)?) } else { None };
        for (k, c) in p.counts.iter().enumerate() {
            let mut row = vec![real(d), (k + 1).to_string(), c.to_string()];
            if let Some(s) = &split {
                row.push(s[k].0.to_string());
                row.push(s[k].1.to_string());
            }
            rows.push(row);
        }
        let mut entry = json!({
            "delta": real(d),
            "counts": p.counts,
            "second_moment": {
                "uniform": real(second_moment(&p, Weighting::Uniform)),
                "reciprocal": real(second_moment(&p, Weighting::Reciprocal)),
                "exp_tail": real(second_moment(&p, Weighting::ExpTail { a: big_a })),
            },
        });
        if let Some(s) = split {
            entry["pairs_equal_trace"] = json!(s.iter().map(|x| x.0).collect::<Vec<_>>());
            entry["pairs_different_trace"] = json!(s.iter().map(|x| x.1).collect::<Vec<_>>());
        }
        profiles.push(entry);
    }
    Ok(Outcome { result: json!({ "profiles": profiles }), table: Some(Table { columns, rows }) })
}

fn hecke(a: &HeckeArgs) -> Result<Outcome, Failure> {
    let p = KernelSumParams::new(a.m, a.tol)?;
    let z = point(&a.z)?;
    let w = point(a.w.as_deref().unwrap_or(&a.z))?;
    let k = hecke_ratio(a.n, &z, &w, &p)?;
    let coeffs = eigenform_coefficients(a.m, a.n as usize)?;
    let an = coeffs[a.n as usize - 1];
    let scale = (a.n as i128).pow(a.m / 2 - 1);
    let expect = an as f64 / scale as f64;
    Ok(Outcome {
        result: json!({
            "kappa": real(k.re),
            "kappa_im": real(k.im),
            "tau_over": format!("{an}/{scale}"),
            "tau_over_value": real(expect),
            "relative_error": real((k - expect).norm() / expect.abs().max(f64::MIN_POSITIVE)),
        }),
        table: Some(Table {
            columns: vec!["n", "kappa_re", "kappa_im", "tau_over"],
            rows: vec![vec![a.n.to_string(), real(k.re), real(k.im), format!("{an}/{scale}")]],
        }),
    })
}

fn theta(a: &ThetaArgs) -> Result<Outcome, Failure> {
    if a.horizon == 0 {
        return usage("--N must be at least 1");
    }
    let z = point(&a.z)?;
    let coeffs: Vec<Complex64> = match a.source {
        ThetaSource::Elementary => {
            let terms = crate::bergman::qexp::required_terms(a.m, 3f64.sqrt() / 2.0)?.max(60);
            let f = QExpansion::eigenform(a.m, terms)?;
            elementary_theta_coeffs(&f, &z, a.horizon as usize)?
        }
        ThetaSource::Kernel => {
            let p = KernelSumParams::new(a.m, a.tol)?;
            (1..=a.horizon).map(|n| theta_coefficient(n, &z, &z, &p, OrderSpec::Full)).collect::<crate::Result<_>>()?
        }
    };
    let rows: Vec<Vec<String>> =
        coeffs.iter().enumerate().map(|(k, c)| vec![(k + 1).to_string(), real(c.re), real(c.im)]).collect();
    Ok(Outcome {
        result: json!({
            "coefficients": coeffs.iter().map(|c| json!({"re": real(c.re), "im": real(c.im)})).collect::<Vec<_>>(),
        }),
        table: Some(Table { columns: vec!["n", "re", "im"], rows }),
    })
}

fn weil(a: &WeilArgs) -> Result<Outcome, Failure> {
    let model = match (a.ramified, a.box_depth) {
        (true, Some(_)) => return usage("--box applies to split primes"),
        (true, None) => FiniteModel::ramified(a.p)?,
        (false, None) => FiniteModel::eichler(a.p, a.level)?,
        (false, Some(j)) => FiniteModel::box_model(a.p, a.level, j)?,
    };
    let rep = local_orbit_report(&model)?;
    let seed = FiniteWeilFunction::indicator_order(&model);
    let fixed = fixed_by_u0(&seed)?;
    if let Some(path) = &a.golden_out {
        let golden = OrbitGolden::new(&model, orbit_closure(&seed)?);
        let text = serde_json::to_string_pretty(&golden).map_err(|e| Failure::Io(e.to_string()))?;
        std::fs::write(path, text + "\n").map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(Outcome {
        result: json!({
            "orbit_size": rep.orbit_size,
            "matches_prediction": rep.matches_prediction,
            "predicted_size": rep.predicted_size,
            "index": rep.index,
            "carrier": rep.carrier,
            "seed_fixed_by_u0": fixed,
            "model": model.to_string(),
            "geometry": model.geometry,
        }),
        table: Some(Table {
            columns: vec!["p", "n", "ramified", "orbit_size", "predicted_size", "matches_prediction"],
            rows: vec![vec![
                a.p.to_string(),
                model.n.to_string(),
                a.ramified.to_string(),
                rep.orbit_size.to_string(),
                rep.predicted_size.to_string(),
                rep.matches_prediction.to_string(),
            ]],
        }),
    })
}

fn bounds(a: &BoundsArgs) -> Result<Outcome, Failure> {
    let z = point(&a.z)?;
    let conv: Convention = a.convention.into();
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    for &m in &a.m {
        let s = spectral_lower_bound(&z, m, conv)?;
        let g = geometric_bound_pipeline(&z, m, OrderSpec::Full, a.tail)?;
        let ratio = g.value / s.value;
        let ok = s.value.is_finite() && s.value > 0.0 && g.value.is_finite() && g.value > 0.0;
        entries.push(json!({
            "m": m,
            "spectral_lower_bound": real(s.value),
            "log_spectral_lower_bound": real(s.log_value),
            "petersson_norm": real(s.petersson),
            "geometric_upper_bound": real(g.value),
            "ratio": real(ratio),
            "finite_and_positive": ok,
            "horizon": g.horizon,
            "delta_max": real(g.delta_max),
            "jumps": g.jumps,
            "elements": g.elements,
        }));
        rows.push(vec![m.to_string(), real(s.value), real(g.value), real(ratio), ok.to_string()]);
    }
    Ok(Outcome {
        result: json!({ "bounds": entries }),
        table: Some(Table { columns: vec!["m", "spectral_lower_bound", "geometric_upper_bound", "ratio", "finite_and_positive"], rows }),
    })
}

fn quat(a: &QuatArgs) -> Result<Outcome, Failure> {
    let field = ImagQuadField::new(a.d_e).map_err(|e| Failure::Usage(e.to_string()))?;
    let lattice = a.lattice.parse::<LatticeChoice>().map_err(|e| Failure::Usage(e.to_string()))?;
    let model = DivisionOrderModel::new(field, a.d_b, lattice).map_err(|e| Failure::Usage(e.to_string()))?;
    let cartan = CartanParams::new(a.lambda, a.theta).map_err(|e| Failure::Usage(e.to_string()))?;
    let norms: Vec<u64> = match (a.n, a.horizon) {
        (Some(n), _) => vec![n],
        (None, Some(h)) => (1..=h).collect(),
        (None, None) => return usage("quat-count needs --n or --N"),
    };
    let counts: Vec<u64> = norms.iter().map(|&n| count_quat(&model, &cartan, n, a.delta)).collect::<crate::Result<_>>()?;
    let rows = norms.iter().zip(&counts).map(|(n, c)| vec![n.to_string(), c.to_string()]).collect();
    let result = if a.n.is_some() { json!({ "count": counts[0] }) } else { json!({ "counts": counts }) };
    Ok(Outcome { result, table: Some(Table { columns: vec!["n", "count"], rows }) })
}

fn render(cli: &Cli, command: &Command, outcome: &Outcome) -> Result<Vec<u8>, Failure> {
    match cli.format {
        Format::Json => {
            let doc = json!({
                "schema": SCHEMA,
                "command": command.name(),
                "config": { "format": "json", "args": command },
                "result": outcome.result,
            });
            let mut s = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Io(e.to_string()))?;
            s.push('\n');
            Ok(s.into_bytes())
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let cfg = serde_json::to_string(command).map_err(|e| Failure::Io(e.to_string()))?;
            let io = |e: csv::Error| Failure::Io(e.to_string());
            match &outcome.table {
                Some(t) => {
                    w.write_record(&t.columns).map_err(io)?;
                    for r in &t.rows {
                        w.write_record(r).map_err(io)?;
                    }
                }
                None => {
                    w.write_record(["key", "value"]).map_err(io)?;
                    if let Value::Object(m) = &outcome.result {
                        for (k, v) in m {
                            w.write_record([k.as_str(), &v.to_string()]).map_err(io)?;
                        }
                    }
                }
            }
            let mut body = format!("# schema={SCHEMA} config={cfg}\n").into_bytes();
            body.extend(w.into_inner().map_err(|e| Failure::Io(e.to_string()))?);
            Ok(body)
        }
    }
}

/// A stored result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub version: String,
    pub key: String,
    pub created_at: u64,
    pub payload: String,
}

/// Directory-backed cache keyed by the hash of version, operation and parameters.
#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    /// Cache from `THETA_MOMENT_CACHE`, else the given directory.
    pub fn resolve(flag: Option<&Path>) -> Option<Self> {
        match std::env::var_os(CACHE_ENV) {
            Some(v) if !v.is_empty() => Some(Cache::new(PathBuf::from(v))),
            _ => flag.map(Cache::new),
        }
    }

    pub fn key(module: &str, operation: &str, params: &Value) -> String {
        let canon = json!({ "version": CACHE_VERSION, "module": module, "operation": operation, "params": params });
        hex::encode(Sha256::digest(canon.to_string().as_bytes()))
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// Stored entry for `key`; unreadable entries are deleted and reported as a miss.
    pub fn lookup(&self, key: &str) -> Option<CacheEntry> {
        let path = self.path(key);
        let text = std::fs::read_to_string(&path).ok()?;
        match serde_json::from_str::<CacheEntry>(&text) {
            Ok(e) if e.version == CACHE_VERSION && e.key == key => Some(e),
            Ok(_) => None,
            Err(err) => {
                log::warn!("dropping corrupt cache entry {}: {err}", path.display());
                let _ = std::fs::remove_file(&path);
                None
            }
        }
    }

    /// Write through a temporary file and an atomic rename.
    pub fn store(&self, key: &str, payload: &str) -> std::io::Result<()> {
        std::fs::create_dir_all(&self.dir)?;
        let created_at = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let entry = CacheEntry { version: CACHE_VERSION.into(), key: key.into(), created_at, payload: payload.into() };
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(serde_json::to_string(&entry).map_err(std::io::Error::other)?.as_bytes())?;
        tmp.persist(self.path(key)).map_err(|e| e.error)?;
        Ok(())
    }
}

fn module_of(command: &Command) -> &'static str {
    match command {
        Command::Count(_) | Command::Profile(_) => "lattice-count",
        Command::Kernel(_) | Command::Hecke(_) | Command::Theta(_) | Command::ReportBounds(_) => "bergman-theta",
        Command::WeilOrbit(_) => "weil-local",
        Command::QuatCount(_) => "quaternion-count",
    }
}

fn produce(cli: &Cli) -> Result<Vec<u8>, Failure> {
    let command = cli.command.resolve()?;
    let cache = Cache::resolve(cli.cache_dir.as_deref());
    let side_effects = matches!(&command, Command::WeilOrbit(a) if a.golden_out.is_some());
    let params = json!({ "format": cli.format, "args": command });
    let key = Cache::key(module_of(&command), command.name(), &params);
    if let (Some(c), false) = (&cache, side_effects) {
        if let Some(e) = c.lookup(&key) {
            return Ok(e.payload.into_bytes());
        }
    }
    let run = || -> Result<Vec<u8>, Failure> {
        let outcome = command.execute()?;
        render(cli, &command, &outcome)
    };
    let bytes = match cli.threads {
        Some(0) => return usage("--threads must be positive"),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Failure::Io(e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    if let Some(c) = &cache {
        let text = String::from_utf8(bytes.clone()).map_err(|e| Failure::Io(e.to_string()))?;
        if let Err(e) = c.store(&key, &text) {
            log::warn!("cache write failed: {e}");
        }
    }
    Ok(bytes)
}

/// Parse `argv` (including the program name), run, and return the exit code:
/// 0 on success, 2 on usage errors, 1 on computation errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match produce(&cli) {
        Ok(bytes) => {
            let written = match &cli.out {
                Some(p) => std::fs::write(p, &bytes).map_err(|e| format!("{}: {e}", p.display())),
                None => std::io::stdout().write_all(&bytes).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => 0,
                Err(e) => {
                    eprintln!("error: {e}");
                    1
                }
            }
        }
        Err(Failure::Usage(m)) => {
            eprintln!("usage error: {m}");
            2
        }
        Err(Failure::Compute(e @ Error::Domain(_))) => {
            eprintln!("usage error: {e}");
            2
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e}");
            1
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            1
        }
    }
}
