//! The `dunkl` command line: configuration, dispatch, and report output.
//!
//! Every flag has a config-file key of the same name (dashes become
//! underscores). A config file is flat `key = value` text, `#` starts a
//! comment, lists are comma-separated. Flags win over the file.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 configuration error,
//! 3 I/O error, 4 numerical failure.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::asymptotics::{self, AdmissibleCurvePair, AsympOptions};
use crate::error::DunklError;
use crate::geometry::{self, ConeSpec, RootScope};
use crate::kernel::{DunklKernel, EvalOptions, OrbitVector};
use crate::kernel1d;
use crate::rootsys::{Family, RootSystem};
use crate::verify::{self, ExponentVariant, VerificationReport, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "dunkl", version, about = "Dunkl kernels for finite reflection groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Roots, group order, γ_k and dual basis.
    Rootsys(RunArgs),
    /// All E_k(t x, g·y) for one (x, y, t).
    Eval(RunArgs),
    /// Sampled checks of the kernel bounds.
    Verify(RunArgs),
    /// Smallest covering cone Λ^p of C_δ.
    Cover(RunArgs),
    /// Limit vector of the normalized oscillatory kernel.
    Asymp(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Flat key = value configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub values: RunConfig,
}

/// Every setting, all optional; [`RunConfig::resolve`] fills defaults.
#[derive(Debug, Clone, Default, PartialEq, Args)]
pub struct RunConfig {
    /// z2n, a2, b2 or i2m.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Multiplicities, one per root orbit.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub k: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub y: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// Evaluate E_k(i t x, g·y).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub imaginary: Option<bool>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// all_positive or simple_only.
    #[arg(long)]
    pub scope: Option<String>,
    #[arg(long)]
    pub p_max: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// ez, boundedness, polytope, main, corollary, d1 or all.
    #[arg(long)]
    pub which: Option<String>,
    /// n or n_squared.
    #[arg(long)]
    pub variant: Option<String>,
    /// Group element index for the boundedness check.
    #[arg(long)]
    pub g: Option<usize>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub t0: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub d1: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub d2: Option<Vec<f64>>,
    #[arg(long)]
    pub rotation_rate: Option<f64>,
    /// JSON output file (also printed to stdout).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// CSV output file (sampled ratios or convergence table).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Include wall-clock runtimes in reports.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub timing: Option<bool>,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(PathBuf, std::io::Error),
    Dunkl(DunklError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io(..) => EXIT_IO,
            CliError::Dunkl(e) if e.is_numeric() => EXIT_NUMERIC,
            CliError::Dunkl(_) => EXIT_CONFIG,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Dunkl(e) => write!(f, "{e}"),
        }
    }
}

impl From<DunklError> for CliError {
    fn from(e: DunklError) -> Self {
        CliError::Dunkl(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn list(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

fn parse_list(key: &str, s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Config(format!("{key}: {e} in {p:?}")))
        })
        .collect()
}

fn parse_one<T: std::str::FromStr>(key: &str, s: &str) -> CliResult<T>
where
    T::Err: fmt::Display,
{
    s.trim()
        .parse()
        .map_err(|e| CliError::Config(format!("{key}: {e} in {s:?}")))
}

impl RunConfig {
    /// Parses flat `key = value` text.
    pub fn parse_kv(text: &str) -> CliResult<Self> {
        let mut c = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            let key = key.trim().replace('-', "_");
            let v = value.trim();
            match key.as_str() {
                "family" => c.family = Some(v.to_string()),
                "n" => c.n = Some(parse_one(&key, v)?),
                "m" => c.m = Some(parse_one(&key, v)?),
                "k" => c.k = Some(parse_list(&key, v)?),
                "x" => c.x = Some(parse_list(&key, v)?),
                "y" => c.y = Some(parse_list(&key, v)?),
                "t" => c.t = Some(parse_one(&key, v)?),
                "imaginary" => c.imaginary = Some(parse_one(&key, v)?),
                "delta" => c.delta = Some(parse_one(&key, v)?),
                "scope" => c.scope = Some(v.to_string()),
                "p_max" => c.p_max = Some(parse_one(&key, v)?),
                "seed" => c.seed = Some(parse_one(&key, v)?),
                "samples" => c.samples = Some(parse_one(&key, v)?),
                "which" => c.which = Some(v.to_string()),
                "variant" => c.variant = Some(v.to_string()),
                "g" => c.g = Some(parse_one(&key, v)?),
                "points" => c.points = Some(parse_one(&key, v)?),
                "t_max" => c.t_max = Some(parse_one(&key, v)?),
                "t0" => c.t0 = Some(parse_one(&key, v)?),
                "tol" => c.tol = Some(parse_one(&key, v)?),
                "rtol" => c.rtol = Some(parse_one(&key, v)?),
                "d1" => c.d1 = Some(parse_list(&key, v)?),
                "d2" => c.d2 = Some(parse_list(&key, v)?),
                "rotation_rate" => c.rotation_rate = Some(parse_one(&key, v)?),
                "output" => c.output = Some(PathBuf::from(v)),
                "csv" => c.csv = Some(PathBuf::from(v)),
                "timing" => c.timing = Some(parse_one(&key, v)?),
                other => {
                    return Err(CliError::Config(format!(
                        "line {}: unknown key {other:?}",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(c)
    }

    /// Inverse of [`RunConfig::parse_kv`]; unset keys are omitted.
    pub fn to_kv(&self) -> String {
        let mut out = Vec::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                out.push(format!("{k} = {v}"));
            }
        };
        put("family", self.family.clone());
        put("n", self.n.map(|v| v.to_string()));
        put("m", self.m.map(|v| v.to_string()));
        put("k", self.k.as_deref().map(list));
        put("x", self.x.as_deref().map(list));
        put("y", self.y.as_deref().map(list));
        put("t", self.t.map(|v| v.to_string()));
        put("imaginary", self.imaginary.map(|v| v.to_string()));
        put("delta", self.delta.map(|v| v.to_string()));
        put("scope", self.scope.clone());
        put("p_max", self.p_max.map(|v| v.to_string()));
        put("seed", self.seed.map(|v| v.to_string()));
        put("samples", self.samples.map(|v| v.to_string()));
        put("which", self.which.clone());
        put("variant", self.variant.clone());
        put("g", self.g.map(|v| v.to_string()));
        put("points", self.points.map(|v| v.to_string()));
        put("t_max", self.t_max.map(|v| v.to_string()));
        put("t0", self.t0.map(|v| v.to_string()));
        put("tol", self.tol.map(|v| v.to_string()));
        put("rtol", self.rtol.map(|v| v.to_string()));
        put("d1", self.d1.as_deref().map(list));
        put("d2", self.d2.as_deref().map(list));
        put("rotation_rate", self.rotation_rate.map(|v| v.to_string()));
        put("output", self.output.as_ref().map(|p| p.display().to_string()));
        put("csv", self.csv.as_ref().map(|p| p.display().to_string()));
        put("timing", self.timing.map(|v| v.to_string()));
        let mut s = out.join("\n");
        s.push('\n');
        s
    }

    /// Fields set in `over` replace those in `self`.
    pub fn merged(mut self, over: &RunConfig) -> RunConfig {
        macro_rules! take {
            ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f.clone(); } )* };
        }
        take!(
            family, n, m, k, x, y, t, imaginary, delta, scope, p_max, seed, samples, which,
            variant, g, points, t_max, t0, tol, rtol, d1, d2, rotation_rate, output, csv, timing
        );
        self
    }

    pub fn load(args: &RunArgs) -> CliResult<RunConfig> {
        let base = match &args.config {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| CliError::Io(p.clone(), e))?;
                RunConfig::parse_kv(&text)?
            }
            None => RunConfig::default(),
        };
        let c = base.merged(&args.values);
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> CliResult<()> {
        let positive = |name: &str, v: Option<f64>| match v {
            Some(v) if !(v > 0.0 && v.is_finite()) => {
                Err(CliError::Config(format!("{name} must be positive, got {v}")))
            }
            _ => Ok(()),
        };
        positive("delta", self.delta)?;
        positive("t_max", self.t_max)?;
        positive("t0", self.t0)?;
        positive("tol", self.tol)?;
        positive("rtol", self.rtol)?;
        if let Some(t) = self.t {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(CliError::Config(format!("t must be nonnegative, got {t}")));
            }
        }
        if self.samples == Some(0) {
            return Err(CliError::Config("samples must be at least 1".into()));
        }
        Ok(())
    }

    pub fn root_system(&self) -> CliResult<RootSystem> {
        let name = self.family.as_deref().unwrap_or("b2");
        let fam = Family::from_name(name, self.n.or(self.m))?;
        let k = match &self.k {
            Some(k) => k.clone(),
            None => vec![1.0; fam.orbit_count()],
        };
        Ok(RootSystem::build(fam, &k)?)
    }

    pub fn kernel(&self) -> CliResult<DunklKernel> {
        Ok(DunklKernel::new(self.root_system()?)?)
    }

    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or(0.3)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn samples(&self) -> usize {
        self.samples.unwrap_or(10_000)
    }

    pub fn timing(&self) -> bool {
        self.timing.unwrap_or(false)
    }

    pub fn cone_spec(&self) -> CliResult<ConeSpec> {
        let root_scope = match self.scope.as_deref().unwrap_or("all_positive") {
            "all_positive" => RootScope::AllPositive,
            "simple_only" => RootScope::SimpleOnly,
            s => return Err(CliError::Config(format!("unknown scope {s:?}"))),
        };
        Ok(ConeSpec {
            delta: self.delta(),
            root_scope,
        })
    }

    pub fn eval_options(&self) -> EvalOptions {
        let mut o = EvalOptions::default();
        if let Some(r) = self.rtol {
            o.ode.rtol = r;
        }
        o
    }

    fn vector(&self, name: &str, v: &Option<Vec<f64>>, rank: usize) -> CliResult<Option<Vec<f64>>> {
        match v {
            Some(v) if v.len() != rank => Err(CliError::Config(format!(
                "{name} has {} entries, the root system has rank {rank}",
                v.len()
            ))),
            other => Ok(other.clone()),
        }
    }
}

/// Writes `bytes` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Config(format!("{} is not a file path", path.display())))?
        .to_string_lossy()
        .into_owned();
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    let io = |e| CliError::Io(path.to_path_buf(), e);
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(bytes).map_err(io)?;
    f.sync_all().map_err(io)?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(e)
    })
}

fn orbit_json(v: &OrbitVector) -> Value {
    let mut m = Map::new();
    for (g, z) in v.iter().enumerate() {
        m.insert(g.to_string(), json!([z.re, z.im]));
    }
    Value::Object(m)
}

fn emit(cfg: &RunConfig, value: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Config(format!("serialization: {e}")))?;
    text.push('\n');
    if let Some(p) = &cfg.output {
        write_atomic(p, text.as_bytes())?;
    }
    print!("{text}");
    Ok(())
}

fn rootsys_json(ker: &DunklKernel) -> CliResult<Value> {
    let rs = &ker.rs;
    let mut mult = Map::new();
    for (name, k) in rs.orbit_names.iter().zip(&rs.multiplicities) {
        mult.insert(name.clone(), json!(k));
    }
    Ok(json!({
        "family": rs.family.name(),
        "name": rs.family.to_string(),
        "rank": rs.rank,
        "positive_roots": rs.positive_roots,
        "simple_roots": rs.simple_roots(),
        "multiplicities": mult,
        "gamma_k": rs.gamma_k(),
        "group_order": ker.order(),
        "dual_basis": rs.dual_basis()?,
        "elements": ker.group.elements.iter().map(|g| g.word.clone()).collect::<Vec<_>>(),
    }))
}

pub fn cmd_rootsys(cfg: &RunConfig) -> CliResult<i32> {
    let ker = cfg.kernel()?;
    emit(cfg, &rootsys_json(&ker)?)?;
    Ok(EXIT_OK)
}

pub fn cmd_eval(cfg: &RunConfig) -> CliResult<i32> {
    let ker = cfg.kernel()?;
    let n = ker.rs.rank;
    let x = cfg
        .vector("x", &cfg.x, n)?
        .ok_or_else(|| CliError::Config("eval needs --x".into()))?;
    let y = cfg
        .vector("y", &cfg.y, n)?
        .ok_or_else(|| CliError::Config("eval needs --y".into()))?;
    let t = cfg.t.unwrap_or(1.0);
    let imaginary = cfg.imaginary.unwrap_or(false);
    let w = if imaginary {
        Complex64::new(0.0, 1.0)
    } else {
        Complex64::new(1.0, 0.0)
    };
    let yc: Vec<Complex64> = y.iter().map(|&v| w * v).collect();
    let ev = ker.eval_orbit_with(&x, &yc, t, &cfg.eval_options())?;
    emit(
        cfg,
        &json!({
            "family": ker.rs.family.to_string(),
            "k": ker.rs.multiplicities,
            "x": x,
            "y": y,
            "t": t,
            "imaginary": imaginary,
            "scaled": ev.scaled,
            "scale_exponent": ev.scale_exponent,
            "values": orbit_json(&ev.result),
            "elements": ker.group.elements.iter().map(|g| g.word.clone()).collect::<Vec<_>>(),
        }),
    )?;
    Ok(EXIT_OK)
}

fn report_json(r: &VerificationReport, timing: bool) -> CliResult<Value> {
    let mut v = serde_json::to_value(r).map_err(|e| CliError::Config(e.to_string()))?;
    if !timing {
        if let Value::Object(m) = &mut v {
            m.remove("runtime_ms");
        }
    }
    Ok(v)
}

fn run_checks(cfg: &RunConfig, ker: &DunklKernel) -> CliResult<Vec<VerificationReport>> {
    let which = cfg.which.as_deref().unwrap_or("ez");
    let mut vc = VerifyConfig::new(cfg.samples(), cfg.seed());
    vc.keep_ratios = cfg.csv.is_some();
    if let Some(r) = cfg.rtol {
        vc.eval.ode.rtol = r;
    }
    let variant = match cfg.variant.as_deref().unwrap_or("n_squared") {
        "n" => ExponentVariant::N,
        "n_squared" | "n2" => ExponentVariant::NSquared,
        v => return Err(CliError::Config(format!("unknown variant {v:?}"))),
    };
    let names: Vec<&str> = if which == "all" {
        vec!["ez", "boundedness", "polytope", "main", "corollary"]
    } else {
        vec![which]
    };
    let polytope = || -> CliResult<geometry::Polytope> {
        let spec = cfg.cone_spec()?;
        Ok(geometry::lemma_covering(&ker.rs, &spec, cfg.p_max.unwrap_or(geometry::DEFAULT_P_MAX))?.polytope)
    };
    let mut out = Vec::new();
    for name in names {
        let r = match name {
            "ez" => verify::verify_ez(ker, &vc)?,
            "boundedness" => {
                let n = ker.rs.rank;
                let center = ker.rs.chamber_center()?;
                let x = cfg.vector("x", &cfg.x, n)?.unwrap_or_else(|| center.clone());
                let y = cfg.vector("y", &cfg.y, n)?.unwrap_or(center);
                verify::verify_lemma_boundedness(
                    ker,
                    &x,
                    &y,
                    cfg.g.unwrap_or(0),
                    cfg.t_max.unwrap_or(1e3),
                    cfg.points.unwrap_or(60),
                    &vc.eval,
                )?
            }
            "polytope" => verify::verify_lemma_polytope(ker, &polytope()?, variant, &vc)?,
            "main" => verify::verify_main_theorem(ker, &polytope()?, &vc)?,
            "corollary" => verify::verify_corollary_imaginary(ker, cfg.delta(), &vc)?,
            "d1" => {
                if ker.rs.rank != 1 {
                    return Err(CliError::Config("d1 needs --family z2n --n 1".into()));
                }
                kernel1d::check_d1_estimates(ker.rs.multiplicities[0], cfg.samples(), cfg.seed())?
            }
            other => return Err(CliError::Config(format!("unknown check {other:?}"))),
        };
        out.push(r);
    }
    Ok(out)
}

pub fn cmd_verify(cfg: &RunConfig) -> CliResult<i32> {
    let ker = cfg.kernel()?;
    let reports = run_checks(cfg, &ker)?;
    if let Some(p) = &cfg.csv {
        let mut s = String::new();
        for r in &reports {
            s.push_str(&format!("# {}\n", r.check_name));
            s.push_str(&r.ratios_csv());
        }
        write_atomic(p, s.as_bytes())?;
    }
    let items = reports
        .iter()
        .map(|r| report_json(r, cfg.timing()))
        .collect::<CliResult<Vec<_>>>()?;
    let value = if items.len() == 1 {
        items.into_iter().next().unwrap_or(Value::Null)
    } else {
        Value::Array(items)
    };
    emit(cfg, &value)?;
    Ok(if reports.iter().all(|r| r.pass) {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

pub fn cmd_cover(cfg: &RunConfig) -> CliResult<i32> {
    let rs = cfg.root_system()?;
    let spec = cfg.cone_spec()?;
    let cert = geometry::lemma_covering(&rs, &spec, cfg.p_max.unwrap_or(geometry::DEFAULT_P_MAX))?;
    let n = rs.rank;
    let mut nesting = BTreeMap::new();
    for p in 1..=10 {
        nesting.insert(p.to_string(), geometry::nesting_coefficient(n, p));
    }
    let mut v = serde_json::to_value(&cert).map_err(|e| CliError::Config(e.to_string()))?;
    v["family"] = json!(rs.family.to_string());
    v["root_scope"] = json!(spec.root_scope);
    v["nesting_coefficients"] = json!(nesting);
    emit(cfg, &v)?;
    Ok(EXIT_OK)
}

pub fn cmd_asymp(cfg: &RunConfig) -> CliResult<i32> {
    let ker = cfg.kernel()?;
    let n = ker.rs.rank;
    let center = ker.rs.chamber_center()?;
    let d1 = cfg.vector("d1", &cfg.d1, n)?.unwrap_or_else(|| center.clone());
    let d2 = cfg.vector("d2", &cfg.d2, n)?.unwrap_or(center);
    let mut opts = AsympOptions::default();
    if let Some(t) = cfg.t0 {
        opts.t0 = t;
    }
    if let Some(t) = cfg.t_max {
        opts.t_max = t;
    }
    if let Some(t) = cfg.tol {
        opts.tol = t;
    }
    if let Some(r) = cfg.rtol {
        opts.ode.rtol = r;
        opts.ode.atol = r * 1e-2;
        opts.eval.ode.rtol = r;
    }
    let rate = cfg.rotation_rate.unwrap_or(0.0);
    let curve = if rate > 0.0 {
        AdmissibleCurvePair::rotating(&ker, cfg.delta(), &d1, &d2, rate, opts.t0)?
    } else {
        AdmissibleCurvePair::ray(&ker, cfg.delta(), &d1, &d2)?
    };
    let est = asymptotics::estimate_v(&ker, &curve, &opts)?;
    if let Some(p) = &cfg.csv {
        write_atomic(p, est.table_csv().as_bytes())?;
    }
    emit(
        cfg,
        &json!({
            "family": ker.rs.family.to_string(),
            "k": ker.rs.multiplicities,
            "curve": curve,
            "v": orbit_json(&est.v),
            "norm": est.norm(),
            "tol": est.tol,
            "converged": est.converged,
            "tail_change": est.tail_change,
            "t_reached": est.table.last().map(|r| r.0),
        }),
    )?;
    Ok(EXIT_OK)
}

fn configure_threads() -> CliResult<()> {
    if let Ok(v) = std::env::var("DUNKL_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Config(format!("DUNKL_THREADS must be a positive integer, got {v:?}")))?;
        // A pool may already exist when called twice in one process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

pub fn dispatch(cli: &Cli) -> CliResult<i32> {
    configure_threads()?;
    let (args, f): (&RunArgs, fn(&RunConfig) -> CliResult<i32>) = match &cli.command {
        Command::Rootsys(a) => (a, cmd_rootsys),
        Command::Eval(a) => (a, cmd_eval),
        Command::Verify(a) => (a, cmd_verify),
        Command::Cover(a) => (a, cmd_cover),
        Command::Asymp(a) => (a, cmd_asymp),
    };
    let cfg = RunConfig::load(args)?;
    f(&cfg)
}

/// Parses `args`, runs the command, and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("dunkl: {e}");
            e.exit_code()
        }
    }
}
