//! Sampled verification of the kernel bounds. Every check is deterministic
//! in its seed: sample `i` draws from stream `i`, the reduction runs in index
//! order, so serial and parallel runs agree bitwise.
//!
//! "Bounded" is operationalized as: finite, below [`ABSOLUTE_CAP`], and the
//! supremum over `2N` samples exceeds the one over the first `N` by less than
//! [`STABILITY_LIMIT`].

use std::collections::BTreeMap;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{DunklError, Result};
use crate::geometry::{in_cone_delta, ConeSpec, Polytope};
use crate::kernel::{DunklKernel, EvalOptions};
use crate::linalg::{dot, scale};
use crate::sampling::{in_cone, log_uniform, sample_rng, unit_sphere};

pub const EZ_TOLERANCE: f64 = 1e-9;
pub const STABILITY_LIMIT: f64 = 1.1;
pub const ABSOLUTE_CAP: f64 = 1e6;
pub const POSITIVITY_FLOOR: f64 = -1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    #[serde(rename = "check")]
    pub check_name: String,
    pub family: String,
    pub k: Vec<f64>,
    pub gamma_k: f64,
    pub seed: u64,
    #[serde(rename = "samples")]
    pub sample_count: usize,
    #[serde(rename = "sup")]
    pub empirical_sup: f64,
    pub arg_sup: Value,
    pub margin: f64,
    pub pass: bool,
    pub runtime_ms: u64,
    pub details: BTreeMap<String, Value>,
    #[serde(skip)]
    pub ratios: Vec<f64>,
}

impl VerificationReport {
    pub fn new(check: &str, family: &str, k: Vec<f64>, gamma_k: f64, seed: u64, samples: usize) -> Self {
        VerificationReport {
            check_name: check.into(),
            family: family.into(),
            k,
            gamma_k,
            seed,
            sample_count: samples,
            empirical_sup: 0.0,
            arg_sup: Value::Null,
            margin: 0.0,
            pass: false,
            runtime_ms: 0,
            details: BTreeMap::new(),
            ratios: Vec::new(),
        }
    }

    fn for_kernel(check: &str, ker: &DunklKernel, seed: u64, samples: usize) -> Self {
        Self::new(
            check,
            &ker.rs.family.to_string(),
            ker.rs.multiplicities.clone(),
            ker.rs.gamma_k(),
            seed,
            samples,
        )
    }

    pub fn detail<V: Into<Value>>(&mut self, key: &str, value: V) {
        self.details.insert(key.into(), value.into());
    }

    pub fn set_runtime(&mut self, start: Instant) {
        self.runtime_ms = start.elapsed().as_millis() as u64;
    }

    /// Ratios as CSV: `index,ratio`.
    pub fn ratios_csv(&self) -> String {
        let mut s = String::from("index,ratio\n");
        for (i, r) in self.ratios.iter().enumerate() {
            s.push_str(&format!("{i},{r}\n"));
        }
        s
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub samples: usize,
    pub seed: u64,
    pub eval: EvalOptions,
    pub keep_ratios: bool,
}

impl VerifyConfig {
    pub fn new(samples: usize, seed: u64) -> Self {
        VerifyConfig {
            samples,
            seed,
            eval: EvalOptions::fast(),
            keep_ratios: false,
        }
    }
}

struct SampleOut {
    ratio: f64,
    min_value: f64,
    arg: Value,
}

struct Sampled {
    sup: f64,
    sup_half: f64,
    arg: Value,
    min_value: f64,
    ratios: Vec<f64>,
}

fn wrap(index: usize, arg: &Value, e: DunklError) -> DunklError {
    DunklError::Sample {
        index,
        input: arg.to_string(),
        source: Box::new(e),
    }
}

fn run_sampled<F>(total: usize, seed: u64, f: F) -> Result<Sampled>
where
    F: Fn(usize, &mut ChaCha8Rng) -> Result<SampleOut> + Sync,
{
    let outs: Vec<Result<SampleOut>> = (0..total)
        .into_par_iter()
        .map(|i| f(i, &mut sample_rng(seed, i as u64)))
        .collect();
    let half = total / 2;
    let mut s = Sampled {
        sup: f64::NEG_INFINITY,
        sup_half: f64::NEG_INFINITY,
        arg: Value::Null,
        min_value: f64::INFINITY,
        ratios: Vec::with_capacity(total),
    };
    for (i, out) in outs.into_iter().enumerate() {
        let out = out?;
        if out.ratio.is_nan() {
            return Err(wrap(i, &out.arg, DunklError::NonFinite("ratio".into())));
        }
        if i < half && out.ratio > s.sup_half {
            s.sup_half = out.ratio;
        }
        if out.ratio > s.sup {
            s.sup = out.ratio;
            s.arg = out.arg;
        }
        s.min_value = s.min_value.min(out.min_value);
        s.ratios.push(out.ratio);
    }
    Ok(s)
}

fn c_vec(v: &[f64], w: Complex64) -> Vec<Complex64> {
    v.iter().map(|&r| w * r).collect()
}

fn pair(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn omega_of(kind: usize) -> Complex64 {
    match kind {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        _ => Complex64::new(1.0, 1.0) / 2f64.sqrt(),
    }
}

/// `max_g |E_k(ωt x, g·y)| e^{-Re(ω) t ⟨x⁺,y⁺⟩}` and the maximizing `g`.
pub fn ez_ratio(
    ker: &DunklKernel,
    x: &[f64],
    y: &[f64],
    t: f64,
    omega: Complex64,
    opts: &EvalOptions,
) -> Result<(f64, usize)> {
    let ev = ker.eval_orbit_with(x, &c_vec(y, omega), t, opts)?;
    let xp = ker.group.orbit_rep_plus(&ker.rs, x)?;
    let yp = ker.group.orbit_rep_plus(&ker.rs, y)?;
    let e = omega.re * t * dot(&xp, &yp);
    Ok((0..ker.order())
        .map(|g| (ev.value_times_exp(g, e).norm(), g))
        .fold((f64::NEG_INFINITY, 0), |a, b| if b.0 > a.0 { b } else { a }))
}

/// `|E_k(zx, y)| ≤ e^{Re(z)⟨x⁺,y⁺⟩}` for `z ∈ {t, it, t(1+i)/√2}` and
/// `‖x‖‖y‖t ≤ 50`.
pub fn verify_ez(ker: &DunklKernel, cfg: &VerifyConfig) -> Result<VerificationReport> {
    let start = Instant::now();
    let n = ker.rs.rank;
    let s = run_sampled(cfg.samples, cfg.seed, |i, rng| {
        let rx = log_uniform(rng, 0.1, 10.0);
        let ry = log_uniform(rng, 0.1, 10.0);
        let x = scale(&unit_sphere(rng, n), rx);
        let y = scale(&unit_sphere(rng, n), ry);
        let tau = 50.0 * rng.gen::<f64>();
        let t = tau / (rx * ry);
        let kind = i % 3;
        let omega = omega_of(kind);
        let mut arg = json!({"x": x, "y": y, "t": t, "omega": pair(omega)});
        let (ratio, g) =
            ez_ratio(ker, &x, &y, t, omega, &cfg.eval).map_err(|e| wrap(i, &arg, e))?;
        arg["g"] = json!(g);
        Ok(SampleOut {
            ratio,
            min_value: ratio,
            arg,
        })
    })?;
    let mut r = VerificationReport::for_kernel("ez", ker, cfg.seed, cfg.samples);
    r.empirical_sup = s.sup;
    r.arg_sup = s.arg;
    r.margin = 1.0 + EZ_TOLERANCE - s.sup;
    r.pass = r.margin >= 0.0;
    let violations = s.ratios.iter().filter(|&&v| v > 1.0 + EZ_TOLERANCE).count();
    r.detail("violations", violations);
    if cfg.keep_ratios {
        r.ratios = s.ratios;
    }
    r.set_runtime(start);
    Ok(r)
}

/// `t^{γ_k} e^{-t⟨x,y⟩} E_k(tx, g·y)`.
pub fn lemma2_value(
    ker: &DunklKernel,
    x: &[f64],
    y: &[f64],
    g: usize,
    t: f64,
    opts: &EvalOptions,
) -> Result<f64> {
    let ev = ker.eval_orbit_with(x, &c_vec(y, Complex64::new(1.0, 0.0)), t, opts)?;
    let v = ev.value_times_exp(g, t * dot(x, y)).re;
    Ok(v * t.powf(ker.rs.gamma_k()))
}

/// Boundedness of `t ↦ t^{γ_k} e^{-t⟨x,y⟩} E_k(tx, g·y)` on a geometric
/// grid of `points` values in `[1e-3, t_max]`.
///
/// Passes when the values are finite and either the last decade does not
/// exceed the earlier supremum, or the last-decade increment is at most
/// half the one of the decade before (a plateau being approached).
pub fn verify_lemma_boundedness(
    ker: &DunklKernel,
    x: &[f64],
    y: &[f64],
    g: usize,
    t_max: f64,
    points: usize,
    opts: &EvalOptions,
) -> Result<VerificationReport> {
    let start = Instant::now();
    if g >= ker.order() {
        return Err(DunklError::InvalidArgument(format!("no group element {g}")));
    }
    if points < 2 || !(t_max > 1e-3) {
        return Err(DunklError::InvalidArgument(
            "boundedness grid needs at least 2 points and t_max > 1e-3".into(),
        ));
    }
    let lo: f64 = 1e-3;
    let ts: Vec<f64> = (0..points)
        .map(|j| lo * (t_max / lo).powf(j as f64 / (points - 1) as f64))
        .collect();
    let vals: Vec<Result<f64>> = ts
        .par_iter()
        .map(|&t| lemma2_value(ker, x, y, g, t, opts))
        .collect();
    let mut values = Vec::with_capacity(points);
    for (t, v) in ts.iter().zip(vals) {
        let v = v.map_err(|e| wrap(values.len(), &json!({"t": t}), e))?;
        values.push(v);
    }
    let mut sup = f64::NEG_INFINITY;
    let mut arg_t = 0.0;
    let mut sup_before = f64::NEG_INFINITY;
    let mut sup_last = f64::NEG_INFINITY;
    for (&t, &v) in ts.iter().zip(&values) {
        if v > sup {
            sup = v;
            arg_t = t;
        }
        if t < t_max / 10.0 {
            sup_before = sup_before.max(v);
        } else {
            sup_last = sup_last.max(v);
        }
    }
    let at = |t: f64| lemma2_value(ker, x, y, g, t, opts);
    let f2 = at(t_max / 100.0)?;
    let f1 = at(t_max / 10.0)?;
    let f0 = *values.last().unwrap_or(&f64::NAN);
    let delta_last = (f0 - f1).abs();
    let delta_prev = (f1 - f2).abs();
    let finite = values.iter().all(|v| v.is_finite());
    let flat = sup_last <= sup_before * (1.0 + 1e-9);
    let settling = delta_last <= 0.5 * delta_prev;
    let mut r = VerificationReport::for_kernel("lemma_boundedness", ker, 0, points);
    r.empirical_sup = sup;
    r.arg_sup = json!({"x": x, "y": y, "g": g, "t": arg_t});
    r.margin = sup_before * (1.0 + 1e-9) - sup_last;
    r.pass = finite && (flat || settling);
    r.detail("t_max", t_max);
    r.detail("sup_last_decade", sup_last);
    r.detail("sup_before_last_decade", sup_before);
    r.detail("delta_last_decade", delta_last);
    r.detail("delta_previous_decade", delta_prev);
    r.detail("value_at_t_max", f0);
    r.detail("value_at_t_min", values[0]);
    r.ratios = values;
    r.set_runtime(start);
    Ok(r)
}

/// Exponent normalizations of the product weight in the cone estimate:
/// `Π_{i,j} (x_i y_j)^{γ_k/n}` or `Π_{i,j} (x_i y_j)^{γ_k/n²}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentVariant {
    N,
    NSquared,
}

impl ExponentVariant {
    pub fn divisor(self, n: usize) -> f64 {
        match self {
            ExponentVariant::N => n as f64,
            ExponentVariant::NSquared => (n * n) as f64,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ExponentVariant::N => "n",
            ExponentVariant::NSquared => "n_squared",
        }
    }
}

/// Random point of `Λ` with norm log-uniform in `[lo, hi]`.
fn in_polytope(rng: &mut ChaCha8Rng, p: &Polytope, lo: f64, hi: f64) -> Vec<f64> {
    let r = log_uniform(rng, lo, hi);
    scale(&in_cone(rng, &p.generators), r)
}

/// `max_g E_k(x, g·y) Π_{i,j}(x_i y_j)^{γ_k/e} e^{-⟨x,y⟩}` and `min_g E_k(x, g·y) e^{-⟨x,y⟩}`.
pub fn polytope_ratio(
    ker: &DunklKernel,
    p: &Polytope,
    variant: ExponentVariant,
    x: &[f64],
    y: &[f64],
    opts: &EvalOptions,
) -> Result<(f64, usize, f64)> {
    let n = ker.rs.rank;
    let cx = p.coordinates(x);
    let cy = p.coordinates(y);
    if cx.iter().chain(&cy).any(|&c| c <= 0.0) {
        return Err(DunklError::InvalidArgument("sample outside the cone".into()));
    }
    let log_prod: f64 = cx.iter().chain(&cy).map(|c| c.ln()).sum();
    let log_w = n as f64 * ker.rs.gamma_k() / variant.divisor(n) * log_prod;
    orbit_ratio(ker, x, y, log_w, opts)
}

/// `max_g E_k(x, g·y) √(w_k(x) w_k(y)) e^{-⟨x,y⟩}`, argmax, and the
/// smallest `E_k(x, g·y) e^{-⟨x,y⟩}`.
pub fn main_ratio(
    ker: &DunklKernel,
    x: &[f64],
    y: &[f64],
    opts: &EvalOptions,
) -> Result<(f64, usize, f64)> {
    let log_w = 0.5 * (ker.rs.log_weight(x) + ker.rs.log_weight(y));
    if !log_w.is_finite() {
        return Err(DunklError::OnHyperplane);
    }
    orbit_ratio(ker, x, y, log_w, opts)
}

fn orbit_ratio(
    ker: &DunklKernel,
    x: &[f64],
    y: &[f64],
    log_factor: f64,
    opts: &EvalOptions,
) -> Result<(f64, usize, f64)> {
    let ev = ker.eval_orbit_with(x, &c_vec(y, Complex64::new(1.0, 0.0)), 1.0, opts)?;
    let e = dot(x, y);
    let mut best = (f64::NEG_INFINITY, 0);
    let mut min_value = f64::INFINITY;
    for g in 0..ker.order() {
        let v = ev.value_times_exp(g, e).re;
        min_value = min_value.min(v);
        let r = v * log_factor.exp();
        if r > best.0 {
            best = (r, g);
        }
    }
    Ok((best.0, best.1, min_value))
}

/// `max_g |E_k(ix, g·y)| √(w_k(x) w_k(y))`.
pub fn corollary_ratio(
    ker: &DunklKernel,
    x: &[f64],
    y: &[f64],
    opts: &EvalOptions,
) -> Result<(f64, usize)> {
    let log_w = 0.5 * (ker.rs.log_weight(x) + ker.rs.log_weight(y));
    if !log_w.is_finite() {
        return Err(DunklError::OnHyperplane);
    }
    let v = ker.eval_imaginary_with(x, y, 1.0, opts)?;
    Ok((0..ker.order())
        .map(|g| (v[g].norm() * log_w.exp(), g))
        .fold((f64::NEG_INFINITY, 0), |a, b| if b.0 > a.0 { b } else { a }))
}

/// Scales the worst sample by `s ∈ {2, 4, 8, 16}` in both arguments and
/// returns the largest ratio seen.
fn scale_probe<F>(arg: &Value, f: F) -> Result<f64>
where
    F: Fn(&[f64], &[f64]) -> Result<f64> + Sync,
{
    let x = vec_of(&arg["x"])?;
    let y = vec_of(&arg["y"])?;
    let vals: Vec<Result<f64>> = [2.0, 4.0, 8.0, 16.0]
        .par_iter()
        .map(|&s| f(&scale(&x, s), &scale(&y, s)))
        .collect();
    let mut m = f64::NEG_INFINITY;
    for v in vals {
        m = m.max(v?);
    }
    Ok(m)
}

fn vec_of(v: &Value) -> Result<Vec<f64>> {
    v.as_array()
        .and_then(|a| a.iter().map(Value::as_f64).collect())
        .ok_or_else(|| DunklError::InvalidArgument(format!("expected a vector, got {v}")))
}

fn stability_report(r: &mut VerificationReport, s: &Sampled, probe: Option<f64>) {
    let ratio = s.sup / s.sup_half;
    r.empirical_sup = s.sup;
    r.arg_sup = s.arg.clone();
    r.margin = STABILITY_LIMIT - ratio;
    let positive = s.min_value >= POSITIVITY_FLOOR;
    let probe_ok = probe.is_none_or(|p| p <= s.sup * STABILITY_LIMIT);
    r.pass = s.sup.is_finite() && ratio < STABILITY_LIMIT && s.sup < ABSOLUTE_CAP && positive && probe_ok;
    r.detail("sup_half", s.sup_half);
    r.detail("stability_ratio", ratio);
    r.detail("min_value", s.min_value);
    if let Some(p) = probe {
        r.detail("scaled_probe_sup", p);
    }
}

/// Cone estimate `E_k(x, g·y) ≤ c e^{⟨x,y⟩} / Π(x_i y_j)^{γ_k/e}` on `Λ`.
/// Evaluates `2N` samples with norms log-uniform in `[0.1, 30]`.
pub fn verify_lemma_polytope(
    ker: &DunklKernel,
    p: &Polytope,
    variant: ExponentVariant,
    cfg: &VerifyConfig,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let total = 2 * cfg.samples;
    let s = run_sampled(total, cfg.seed, |i, rng| {
        let x = in_polytope(rng, p, 0.1, 30.0);
        let y = in_polytope(rng, p, 0.1, 30.0);
        let mut arg = json!({"x": x, "y": y});
        let (ratio, g, min_value) =
            polytope_ratio(ker, p, variant, &x, &y, &cfg.eval).map_err(|e| wrap(i, &arg, e))?;
        arg["g"] = json!(g);
        Ok(SampleOut {
            ratio,
            min_value,
            arg,
        })
    })?;
    let probe = scale_probe(&s.arg, |x, y| {
        polytope_ratio(ker, p, variant, x, y, &cfg.eval).map(|r| r.0)
    })?;
    let mut r = VerificationReport::for_kernel("lemma_polytope", ker, cfg.seed, total);
    stability_report(&mut r, &s, Some(probe));
    r.arg_sup["variant"] = json!(variant.name());
    r.arg_sup["generators"] = json!(p.generators);
    r.detail("variant", variant.name());
    if cfg.keep_ratios {
        r.ratios = s.ratios;
    }
    r.set_runtime(start);
    Ok(r)
}

/// `E_k(x, g·y) ≤ C e^{⟨x,y⟩} / √(w_k(x) w_k(y))` on `Λ`, norms
/// log-uniform in `[0.1, 30]`, `2N` samples.
pub fn verify_main_theorem(
    ker: &DunklKernel,
    p: &Polytope,
    cfg: &VerifyConfig,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let total = 2 * cfg.samples;
    let s = run_sampled(total, cfg.seed, |i, rng| {
        let x = in_polytope(rng, p, 0.1, 30.0);
        let y = in_polytope(rng, p, 0.1, 30.0);
        let mut arg = json!({"x": x, "y": y});
        let (ratio, g, min_value) =
            main_ratio(ker, &x, &y, &cfg.eval).map_err(|e| wrap(i, &arg, e))?;
        arg["g"] = json!(g);
        Ok(SampleOut {
            ratio,
            min_value,
            arg,
        })
    })?;
    let probe = scale_probe(&s.arg, |x, y| main_ratio(ker, x, y, &cfg.eval).map(|r| r.0))?;
    let mut r = VerificationReport::for_kernel("main_theorem", ker, cfg.seed, total);
    stability_report(&mut r, &s, Some(probe));
    if cfg.keep_ratios {
        r.ratios = s.ratios;
    }
    r.set_runtime(start);
    Ok(r)
}

/// Uniform unit direction in `C_δ`: fold a sphere sample into the chamber
/// and reject outside the cone.
pub fn sample_cone_direction(
    ker: &DunklKernel,
    spec: &ConeSpec,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>> {
    for _ in 0..100_000 {
        let u = unit_sphere(rng, ker.rs.rank);
        let u = ker.group.orbit_rep_plus(&ker.rs, &u)?;
        if in_cone_delta(&ker.rs, spec, &u) {
            return Ok(u);
        }
    }
    Err(DunklError::EmptyCone { delta: spec.delta })
}

/// `|E_k(ix, g·y)| ≤ c / √(w_k(x) w_k(y))` on `C_δ`, norms log-uniform in
/// `[0.1, 100]`, `2N` samples.
pub fn verify_corollary_imaginary(
    ker: &DunklKernel,
    delta: f64,
    cfg: &VerifyConfig,
) -> Result<VerificationReport> {
    let start = Instant::now();
    if !(delta > 0.0) {
        return Err(DunklError::InvalidArgument("delta must be positive".into()));
    }
    let spec = ConeSpec::new(delta);
    let total = 2 * cfg.samples;
    let s = run_sampled(total, cfg.seed, |i, rng| {
        let x = scale(
            &sample_cone_direction(ker, &spec, rng).map_err(|e| wrap(i, &Value::Null, e))?,
            log_uniform(rng, 0.1, 100.0),
        );
        let y = scale(
            &sample_cone_direction(ker, &spec, rng).map_err(|e| wrap(i, &Value::Null, e))?,
            log_uniform(rng, 0.1, 100.0),
        );
        let mut arg = json!({"x": x, "y": y});
        let (ratio, g) = corollary_ratio(ker, &x, &y, &cfg.eval).map_err(|e| wrap(i, &arg, e))?;
        arg["g"] = json!(g);
        Ok(SampleOut {
            ratio,
            min_value: 0.0,
            arg,
        })
    })?;
    let mut r = VerificationReport::for_kernel("corollary_imaginary", ker, cfg.seed, total);
    stability_report(&mut r, &s, None);
    r.detail("delta", delta);
    if cfg.keep_ratios {
        r.ratios = s.ratios;
    }
    r.set_runtime(start);
    Ok(r)
}

/// Recomputes the ratio at a report's `arg_sup`.
pub fn reevaluate_arg_sup(
    ker: &DunklKernel,
    report: &VerificationReport,
    opts: &EvalOptions,
) -> Result<f64> {
    let a = &report.arg_sup;
    let x = vec_of(&a["x"])?;
    let y = vec_of(&a["y"])?;
    let g = a["g"]
        .as_u64()
        .ok_or_else(|| DunklError::InvalidArgument("arg_sup lacks g".into()))? as usize;
    match report.check_name.as_str() {
        "ez" => {
            let t = a["t"].as_f64().unwrap_or(f64::NAN);
            let w = vec_of(&a["omega"])?;
            let omega = Complex64::new(w[0], w[1]);
            let ev = ker.eval_orbit_with(&x, &c_vec(&y, omega), t, opts)?;
            let xp = ker.group.orbit_rep_plus(&ker.rs, &x)?;
            let yp = ker.group.orbit_rep_plus(&ker.rs, &y)?;
            Ok(ev.value_times_exp(g, omega.re * t * dot(&xp, &yp)).norm())
        }
        "lemma_boundedness" => {
            let t = a["t"].as_f64().unwrap_or(f64::NAN);
            lemma2_value(ker, &x, &y, g, t, opts)
        }
        "main_theorem" => {
            let log_w = 0.5 * (ker.rs.log_weight(&x) + ker.rs.log_weight(&y));
            let ev = ker.eval_orbit_with(&x, &c_vec(&y, Complex64::new(1.0, 0.0)), 1.0, opts)?;
            Ok(ev.value_times_exp(g, dot(&x, &y)).re * log_w.exp())
        }
        "lemma_polytope" => {
            let gens: Vec<Vec<f64>> = a["generators"]
                .as_array()
                .map(|v| v.iter().map(vec_of).collect::<Result<_>>())
                .transpose()?
                .unwrap_or_default();
            let p = Polytope::new(gens)?;
            let variant: ExponentVariant = serde_json::from_value(a["variant"].clone())
                .map_err(|e| DunklError::InvalidArgument(e.to_string()))?;
            let n = ker.rs.rank;
            let log_prod: f64 = p
                .coordinates(&x)
                .iter()
                .chain(&p.coordinates(&y))
                .map(|c| c.ln())
                .sum();
            let log_w = n as f64 * ker.rs.gamma_k() / variant.divisor(n) * log_prod;
            let ev = ker.eval_orbit_with(&x, &c_vec(&y, Complex64::new(1.0, 0.0)), 1.0, opts)?;
            Ok(ev.value_times_exp(g, dot(&x, &y)).re * log_w.exp())
        }
        "corollary_imaginary" => {
            let log_w = 0.5 * (ker.rs.log_weight(&x) + ker.rs.log_weight(&y));
            let v = ker.eval_imaginary_with(&x, &y, 1.0, opts)?;
            Ok(v[g].norm() * log_w.exp())
        }
        other => Err(DunklError::InvalidArgument(format!(
            "cannot re-evaluate check {other}"
        ))),
    }
}
