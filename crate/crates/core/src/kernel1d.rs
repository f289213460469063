//! Rank-one Dunkl kernel `E_k(z)` on `ℝ` with reflection `x ↦ -x`.
//!
//! The eigen equation `f'(z) + k (f(z) - f(-z)) / z = f(z)`, `f(0) = 1`,
//! gives `f = Σ a_m z^m` with `a_{m+1} = a_m / (m + 1 + 2k[m even])`. That
//! series is summed in double-double arithmetic and is the oracle for
//! everything else. Large arguments go to the general evaluator on `Z₂¹`.

use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ddouble::{Dd, DdComplex};
use crate::error::{DunklError, Result};
use crate::kernel::DunklKernel;
use crate::rootsys::{Family, RootSystem};
use crate::sampling::{log_uniform, sample_rng};
use crate::verify::VerificationReport;

pub const DEFAULT_RADIUS: f64 = 200.0;

/// Relative accuracy below which the series result is rejected.
pub const PRECISION_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Rank1Kernel {
    pub k: f64,
    pub truncation_tol: f64,
    pub max_terms: usize,
    pub radius: f64,
    general: DunklKernel,
}

impl Rank1Kernel {
    pub fn new(k: f64) -> Result<Self> {
        let rs = RootSystem::build(Family::Z2n { n: 1 }, &[k])?;
        Ok(Rank1Kernel {
            k,
            truncation_tol: 1e-17,
            max_terms: 10_000,
            radius: DEFAULT_RADIUS,
            general: DunklKernel::new(rs)?,
        })
    }

    /// The series oracle; fails beyond `radius` or when cancellation eats
    /// the double-double headroom.
    pub fn series(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() > self.radius {
            return Err(DunklError::InvalidArgument(format!(
                "|z| = {} exceeds the series radius {}",
                z.norm(),
                self.radius
            )));
        }
        let s = sum_series(z, self.k, self.truncation_tol, self.max_terms)?;
        if s.rel_error > PRECISION_FLOOR {
            return Err(DunklError::PrecisionLoss {
                modulus: z.norm(),
                estimate: s.rel_error,
            });
        }
        Ok(s.value)
    }

    /// `E_k(z)`, through the series when it is accurate and the general
    /// evaluator otherwise.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        match self.series(z) {
            Ok(v) => Ok(v),
            Err(DunklError::PrecisionLoss { .. }) | Err(DunklError::InvalidArgument(_)) => {
                self.eval_general(z)
            }
            Err(e) => Err(e),
        }
    }

    /// `E_k(z)` from the orbit ODE on `Z₂¹`.
    pub fn eval_general(&self, z: Complex64) -> Result<Complex64> {
        let ev = self.general.eval_orbit(&[1.0], &[z], 1.0)?;
        Ok(ev.value(0))
    }

    /// `E_k(z) e^{-|Re z|}`, finite for every `z`.
    pub fn eval_damped(&self, z: Complex64) -> Result<Complex64> {
        if z.re.abs() < 600.0 {
            if let Ok(v) = self.series(z) {
                return Ok(v * (-z.re.abs()).exp());
            }
        }
        let ev = self.general.eval_orbit(&[1.0], &[z], 1.0)?;
        Ok(ev.value_times_exp(0, z.re.abs()))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SeriesSum {
    pub value: Complex64,
    pub terms: usize,
    /// Estimated relative rounding error of the double-double sum.
    pub rel_error: f64,
}

/// Sums `Σ a_m z^m` in double-double arithmetic.
pub fn sum_series(z: Complex64, k: f64, tol: f64, max_terms: usize) -> Result<SeriesSum> {
    if !(k >= 0.0 && k.is_finite()) {
        return Err(DunklError::NegativeMultiplicity {
            orbit: "k".into(),
            value: k,
        });
    }
    if !z.is_finite() {
        return Err(DunklError::NonFinite(format!("argument {z}")));
    }
    let two_k = Dd::new(2.0 * k);
    let mut term = DdComplex::from_f64(1.0, 0.0);
    let mut sum = term;
    let mut abs_sum = 1.0;
    let mut small = 0;
    let zn = z.norm();
    for m in 0..max_terms {
        let mut den = Dd::new((m + 1) as f64);
        if m % 2 == 0 {
            den = den + two_k;
        }
        term = term.mul_f64_complex(z.re, z.im).div_dd(den);
        sum = sum + term;
        let t = term.norm_f64();
        abs_sum += t;
        let s = sum.norm_f64();
        if t <= tol * s && (m as f64) >= zn {
            small += 1;
            if small >= 3 {
                let value = Complex64::new(sum.re.to_f64(), sum.im.to_f64());
                let rounding = 4e-32 * (m + 2) as f64 * abs_sum / s;
                return Ok(SeriesSum {
                    value,
                    terms: m + 1,
                    rel_error: rounding + tol,
                });
            }
        } else {
            small = 0;
        }
    }
    Err(DunklError::NonConvergence {
        max_terms,
        modulus: zn,
    })
}

/// `E_k(z)` by the series with default settings.
pub fn e1_series(z: Complex64, k: f64) -> Result<Complex64> {
    let s = sum_series(z, k, 1e-17, 10_000)?;
    if s.rel_error > PRECISION_FLOOR {
        return Err(DunklError::PrecisionLoss {
            modulus: z.norm(),
            estimate: s.rel_error,
        });
    }
    Ok(s.value)
}

/// `a_0..=a_order`.
pub fn coefficients(k: f64, order: usize) -> Vec<f64> {
    let mut a = vec![1.0];
    for m in 0..order {
        let den = (m + 1) as f64 + if m % 2 == 0 { 2.0 * k } else { 0.0 };
        a.push(a[m] / den);
    }
    a
}

/// First parameter of the candidate closed forms `e^{z} ₁F₁(a, 2k+1, -2z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hyp1f1Variant {
    /// `a = 2k`
    AsPrinted,
    /// `a = k`
    Standard,
}

impl Hyp1f1Variant {
    pub fn first_param(self, k: f64) -> f64 {
        match self {
            Hyp1f1Variant::AsPrinted => 2.0 * k,
            Hyp1f1Variant::Standard => k,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Hyp1f1Variant::AsPrinted => "1F1(2k, 2k+1, -2xy)",
            Hyp1f1Variant::Standard => "1F1(k, 2k+1, -2xy)",
        }
    }
}

/// `e^{shift} ₁F₁(a, b, z)` for real `z`, via Kummer's transform when
/// `z < 0` so that the summed terms stay positive for `0 ≤ a ≤ b`.
pub fn hyp1f1_shifted(a: f64, b: f64, z: f64, shift: f64) -> Result<f64> {
    let (a, z, shift) = if z < 0.0 {
        (b - a, -z, shift + z)
    } else {
        (a, z, shift)
    };
    let mut term = 1.0;
    let mut sum = 1.0;
    let max_terms = 100_000;
    for m in 0..max_terms {
        let mf = m as f64;
        term *= (a + mf) / (b + mf) * z / (mf + 1.0);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && mf > z {
            return Ok(sum * shift.exp());
        }
    }
    Err(DunklError::NonConvergence {
        max_terms,
        modulus: z,
    })
}

pub fn hyp1f1(a: f64, b: f64, z: f64) -> Result<f64> {
    hyp1f1_shifted(a, b, z, 0.0)
}

/// Closed-form candidate `e^{xy} ₁F₁(a, 2k+1, -2xy)`.
pub fn e1_hyp1f1(x: f64, y: f64, k: f64, variant: Hyp1f1Variant) -> Result<f64> {
    if !(k > 0.0) {
        return Err(DunklError::InvalidArgument(format!(
            "closed form needs k > 0, got {k}"
        )));
    }
    let xy = x * y;
    hyp1f1_shifted(variant.first_param(k), 2.0 * k + 1.0, -2.0 * xy, xy)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Hyp1f1Reconciliation {
    pub samples: usize,
    pub as_printed_max_rel_err: f64,
    pub standard_max_rel_err: f64,
    pub tolerance: f64,
    /// Variants that agree with the series on every sample.
    pub matching: Vec<Hyp1f1Variant>,
}

/// Compares both closed forms with the series on the given `(x, y, k)`.
pub fn reconcile_hyp1f1(args: &[(f64, f64, f64)], tolerance: f64) -> Result<Hyp1f1Reconciliation> {
    let mut worst = [0.0f64; 2];
    let variants = [Hyp1f1Variant::AsPrinted, Hyp1f1Variant::Standard];
    for &(x, y, k) in args {
        let oracle = e1_series(Complex64::new(x * y, 0.0), k)?.re;
        for (w, v) in worst.iter_mut().zip(variants) {
            let f = e1_hyp1f1(x, y, k, v)?;
            *w = w.max(((f - oracle) / oracle).abs());
        }
    }
    let matching = variants
        .iter()
        .zip(worst)
        .filter(|(_, w)| *w <= tolerance)
        .map(|(v, _)| *v)
        .collect();
    Ok(Hyp1f1Reconciliation {
        samples: args.len(),
        as_printed_max_rel_err: worst[0],
        standard_max_rel_err: worst[1],
        tolerance,
        matching,
    })
}

/// Sampled sups of `|E_k(z)| |z|^k e^{-|z|}` and `|E_k(iz)| |z|^k` for
/// `z` log-uniform in `[0.1, 100]`, at `N` and `2N` samples.
pub fn check_d1_estimates(k: f64, sample_count: usize, seed: u64) -> Result<VerificationReport> {
    let start = Instant::now();
    let ker = Rank1Kernel::new(k)?;
    let total = 2 * sample_count;
    let mut real_sup = [0.0f64; 2];
    let mut imag_sup = [0.0f64; 2];
    let mut arg = [0.0f64; 2];
    for i in 0..total {
        let mut rng = sample_rng(seed, i as u64);
        let z = log_uniform(&mut rng, 0.1, 100.0);
        let re = ker.eval_damped(Complex64::new(z, 0.0))?.norm() * z.powf(k);
        let im = ker.eval(Complex64::new(0.0, z))?.norm() * z.powf(k);
        if !(re.is_finite() && im.is_finite()) {
            return Err(DunklError::NonFinite(format!("rank-one estimate at z = {z}")));
        }
        for half in 0..2 {
            if half == 0 && i >= sample_count {
                continue;
            }
            if re > real_sup[half] {
                real_sup[half] = re;
                if half == 1 {
                    arg[0] = z;
                }
            }
            if im > imag_sup[half] {
                imag_sup[half] = im;
                if half == 1 {
                    arg[1] = z;
                }
            }
        }
    }
    let real_change = (real_sup[1] - real_sup[0]) / real_sup[0];
    let imag_change = (imag_sup[1] - imag_sup[0]) / imag_sup[0];
    let pass = real_change < 0.1 && imag_change < 0.1;
    let mut report = VerificationReport::new("d1_estimates", "z2n", vec![k], k, seed, total);
    report.empirical_sup = real_sup[1].max(imag_sup[1]);
    report.arg_sup = serde_json::json!({
        "real_z": arg[0],
        "imaginary_z": arg[1],
    });
    report.margin = 0.1 - real_change.max(imag_change);
    report.pass = pass;
    report.set_runtime(start);
    report.detail("real_sup", real_sup[1]);
    report.detail("real_sup_half", real_sup[0]);
    report.detail("imaginary_sup", imag_sup[1]);
    report.detail("imaginary_sup_half", imag_sup[0]);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn value_at_zero_is_one() {
        for k in [0.0, 0.5, 3.0] {
            assert_eq!(e1_series(c(0.0, 0.0), k).unwrap(), c(1.0, 0.0));
        }
    }

    #[test]
    fn k_zero_is_exponential() {
        for z in [c(1.0, 0.0), c(-7.5, 0.0), c(0.0, 12.0), c(3.0, -4.0), c(30.0, 0.0)] {
            let v = e1_series(z, 0.0).unwrap();
            assert!((v - z.exp()).norm() <= 1e-12 * z.exp().norm(), "{z}");
        }
    }

    #[test]
    fn first_coefficients() {
        let k = 0.7;
        let a = coefficients(k, 3);
        assert_eq!(a[0], 1.0);
        assert!((a[1] - 1.0 / (1.0 + 2.0 * k)).abs() < 1e-16);
        assert!((a[2] - 1.0 / (2.0 * (1.0 + 2.0 * k))).abs() < 1e-16);
        let want3 = 1.0 / (2.0 * (1.0 + 2.0 * k) * (3.0 + 2.0 * k));
        assert!((a[3] - want3).abs() < 1e-16);
    }

    #[test]
    fn terms_decay_after_the_peak() {
        let k = 1.5;
        let z: f64 = 9.0;
        let a = coefficients(k, 80);
        let start = (z + 2.0 * k + 2.0).ceil() as usize;
        for m in start..80 {
            assert!(a[m + 1] * z.powi(m as i32 + 1) < a[m] * z.powi(m as i32));
        }
    }

    #[test]
    fn eigen_equation_residual() {
        let k = 0.8;
        let h = 1e-4;
        for i in 0..40 {
            let z = 0.1 + i as f64 * 0.25;
            let f = |s: f64| e1_series(c(s, 0.0), k).unwrap().re;
            let d = (f(z + h) - f(z - h)) / (2.0 * h);
            let res = d + k * (f(z) - f(-z)) / z - f(z);
            assert!(res.abs() < 1e-7 * f(z), "z={z} res={res}");
        }
    }

    #[test]
    fn real_values_are_positive() {
        for k in [0.2, 1.0, 2.5] {
            for z in [-40.0, -5.0, -0.3, 0.0, 2.0, 35.0] {
                assert!(e1_series(c(z, 0.0), k).unwrap().re > 0.0);
            }
        }
    }

    #[test]
    fn imaginary_cancellation_is_detected() {
        let err = e1_series(c(0.0, 150.0), 0.5).unwrap_err();
        assert!(matches!(err, DunklError::PrecisionLoss { .. }));
        let ker = Rank1Kernel::new(0.5).unwrap();
        let v = ker.eval(c(0.0, 150.0)).unwrap();
        assert!(v.norm() <= 1.0 && v.norm() > 0.0);
    }

    #[test]
    fn delegation_matches_series_near_the_switch() {
        let ker = Rank1Kernel::new(0.75).unwrap();
        for z in [c(25.0, 0.0), c(0.0, 30.0), c(-20.0, 10.0)] {
            let a = ker.series(z).unwrap();
            let b = ker.eval_general(z).unwrap();
            assert!((a - b).norm() <= 1e-10 * a.norm(), "{z}: {a} vs {b}");
        }
    }

    #[test]
    fn standard_closed_form_matches() {
        for k in [0.3, 0.5, 2.0] {
            for xy in [-3.0, 0.5, 1.0, 8.0] {
                let s = e1_series(c(xy, 0.0), k).unwrap().re;
                let f = e1_hyp1f1(xy, 1.0, k, Hyp1f1Variant::Standard).unwrap();
                assert!(((f - s) / s).abs() < 1e-12, "k={k} xy={xy}");
            }
        }
        let s = e1_series(c(1.0, 0.0), 0.5).unwrap().re;
        let f = e1_hyp1f1(1.0, 1.0, 0.5, Hyp1f1Variant::AsPrinted).unwrap();
        assert!(((f - s) / s).abs() > 1e-3);
    }

    #[test]
    fn closed_form_trivial_cases() {
        assert_eq!(hyp1f1(0.7, 2.0, 0.0).unwrap(), 1.0);
        assert!((hyp1f1(0.0, 2.0, -5.0).unwrap() - 1.0).abs() < 1e-14);
        let v = e1_hyp1f1(0.0, 3.0, 0.5, Hyp1f1Variant::AsPrinted).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        // 1F1(1, 2, z) = (e^z - 1) / z
        let z: f64 = -3.0;
        assert!((hyp1f1(1.0, 2.0, z).unwrap() - (z.exp() - 1.0) / z).abs() < 1e-14);
    }

    #[test]
    fn d1_estimates_are_stable() {
        let r = check_d1_estimates(0.5, 400, 11).unwrap();
        assert!(r.pass, "{r:?}");
        let r0 = check_d1_estimates(0.0, 100, 11).unwrap();
        assert!((r0.details["imaginary_sup"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    }
}
