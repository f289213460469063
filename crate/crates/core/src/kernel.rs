//! General-group Dunkl kernel.
//!
//! For fixed `x, y` put `f_g(t) = E_k(tx, g·y)`. The Dunkl operator in the
//! direction `x`, together with `E_k(σx, y) = E_k(x, σy)`, turns the eigen
//! equation into the orbit-coupled system
//!
//! ```text
//! f_g'(t) = ⟨x, g·y⟩ f_g(t) - (1/t) Σ_{υ∈R⁺} k(υ) (f_g(t) - f_{σ_υ g}(t)),
//! ```
//!
//! i.e. `t f' = t D f - L f` with `L = Σ k(υ)(I - P_{σ_υ})`. Writing
//! `f = Σ c_m t^m` gives `c_0 = 1` and `(mI + L) c_m = D c_{m-1}`.
//! Small arguments use that series; larger ones bootstrap it at `τ₀` and
//! continue with the ODE in the scaled variable `e^{-t⟨x⁺,y⁺⟩} f`.

use std::ops::{Index, IndexMut};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DunklError, Result};
use crate::linalg::{check_dim, dot_rc, norm, norm_c};
use crate::ode::{self, ComplexSystem, OdeOptions};
use crate::rootsys::{ReflectionGroup, RootSystem};

/// Values indexed by group element (position in [`ReflectionGroup::elements`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitVector(pub Vec<Complex64>);

impl OrbitVector {
    pub fn ones(n: usize) -> Self {
        OrbitVector(vec![Complex64::new(1.0, 0.0); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Complex64> {
        self.0.iter()
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest componentwise distance to `other`.
    pub fn max_dist(&self, other: &OrbitVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for OrbitVector {
    type Output = Complex64;
    fn index(&self, g: usize) -> &Complex64 {
        &self.0[g]
    }
}

impl IndexMut<usize> for OrbitVector {
    fn index_mut(&mut self, g: usize) -> &mut Complex64 {
        &mut self.0[g]
    }
}

/// `L = Σ_{υ∈R⁺} k(υ) (I - P_{σ_υ})` with `(P_σ c)_g = c_{σg}`.
#[derive(Debug, Clone)]
pub struct CouplingOperator {
    dim: usize,
    total_k: f64,
    terms: Vec<(f64, Vec<usize>)>,
    eigvals: Vec<f64>,
    eigvecs: DMatrix<f64>,
}

impl CouplingOperator {
    pub fn new(rs: &RootSystem, group: &ReflectionGroup) -> Self {
        let dim = group.order();
        let terms: Vec<(f64, Vec<usize>)> = group
            .left_reflect
            .iter()
            .enumerate()
            .filter(|(r, _)| rs.k(*r) != 0.0)
            .map(|(r, perm)| (rs.k(r), perm.clone()))
            .collect();
        let total_k = terms.iter().map(|(k, _)| k).sum();
        let mut op = CouplingOperator {
            dim,
            total_k,
            terms,
            eigvals: Vec::new(),
            eigvecs: DMatrix::zeros(0, 0),
        };
        let eig = SymmetricEigen::new(op.dense());
        op.eigvals = eig.eigenvalues.iter().copied().collect();
        op.eigvecs = eig.eigenvectors;
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (k, perm) in &self.terms {
            for g in 0..self.dim {
                m[(g, g)] += k;
                m[(g, perm[g])] -= k;
            }
        }
        m
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigvals
    }

    pub fn apply_into(&self, c: &[Complex64], out: &mut [Complex64]) {
        for g in 0..self.dim {
            let mut acc = c[g] * self.total_k;
            for (k, perm) in &self.terms {
                acc -= c[perm[g]] * *k;
            }
            out[g] = acc;
        }
    }

    pub fn apply(&self, c: &OrbitVector) -> OrbitVector {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        self.apply_into(&c.0, &mut out);
        OrbitVector(out)
    }

    /// Solves `(shift·I + L) c = rhs` through the cached eigendecomposition.
    pub fn solve_shifted(&self, shift: f64, rhs: &[Complex64]) -> Vec<Complex64> {
        if self.is_zero() {
            return rhs.iter().map(|v| v / shift).collect();
        }
        let n = self.dim;
        let q = &self.eigvecs;
        let mut coeff = vec![Complex64::new(0.0, 0.0); n];
        for (j, c) in coeff.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..n {
                acc += rhs[i] * q[(i, j)];
            }
            *c = acc / (shift + self.eigvals[j]);
        }
        (0..n)
            .map(|i| {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    acc += coeff[j] * q[(i, j)];
                }
                acc
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    /// Largest `t‖x‖‖y‖` summed by the series alone.
    pub series_radius: f64,
    /// Allowed cancellation in the series, as a natural log of the ratio
    /// between the largest term and the (scaled) result.
    pub cancellation_budget: f64,
    /// Relative size below which series terms are dropped.
    pub series_tol: f64,
    pub max_terms: usize,
    pub ode: OdeOptions,
}

/// Absolute ODE tolerance: the scaled orbit vector decays like a power of
/// `t`, so the error control has to be relative.
pub const KERNEL_ATOL: f64 = f64::MIN_POSITIVE;

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            series_radius: 40.0,
            cancellation_budget: 6.0,
            series_tol: 1e-17,
            max_terms: 5000,
            ode: OdeOptions {
                atol: KERNEL_ATOL,
                ..OdeOptions::default()
            },
        }
    }
}

impl EvalOptions {
    /// Looser ODE tolerances, for sampling harnesses.
    pub fn fast() -> Self {
        EvalOptions {
            ode: OdeOptions {
                rtol: 1e-10,
                atol: KERNEL_ATOL,
                ..OdeOptions::default()
            },
            ..EvalOptions::default()
        }
    }
}

/// All of `E_k(tx, g·y)` for one `(x, y, t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelEvaluation {
    pub x: Vec<f64>,
    pub y: Vec<Complex64>,
    pub t: f64,
    pub result: OrbitVector,
    /// When set, the kernel is `result · e^{scale_exponent}`.
    pub scaled: bool,
    pub scale_exponent: f64,
    /// `t⟨x⁺, (Re y)⁺⟩`, the exponent of the a-priori bound.
    pub chamber_exponent: f64,
    /// Whether the ODE continuation was used.
    pub used_ode: bool,
}

impl KernelEvaluation {
    /// Unscaled kernel value (may overflow to infinity when `scaled`).
    pub fn value(&self, g: usize) -> Complex64 {
        if self.scaled {
            self.result[g] * self.scale_exponent.exp()
        } else {
            self.result[g]
        }
    }

    pub fn values(&self) -> OrbitVector {
        OrbitVector((0..self.result.len()).map(|g| self.value(g)).collect())
    }

    /// `E_k(tx, g·y) · e^{-exponent}`, computed without overflow.
    pub fn value_times_exp(&self, g: usize, exponent: f64) -> Complex64 {
        let shift = if self.scaled { self.scale_exponent } else { 0.0 };
        self.result[g] * (shift - exponent).exp()
    }

    /// `E_k(tx, g·y) · e^{-t⟨x⁺,(Re y)⁺⟩}`, bounded by one in modulus.
    pub fn normalized(&self, g: usize) -> Complex64 {
        self.value_times_exp(g, self.chamber_exponent)
    }
}

/// Root system, group, and coupling operator, shared read-only by evaluations.
#[derive(Debug, Clone)]
pub struct DunklKernel {
    pub rs: RootSystem,
    pub group: ReflectionGroup,
    pub coupling: CouplingOperator,
}

struct ScaledOrbitOde<'a> {
    a: &'a [Complex64],
    shift: f64,
    coupling: &'a CouplingOperator,
}

impl ComplexSystem for ScaledOrbitOde<'_> {
    fn dim(&self) -> usize {
        self.a.len()
    }

    fn rhs(&self, tau: f64, y: &[Complex64], dy: &mut [Complex64]) {
        self.coupling.apply_into(y, dy);
        let inv = 1.0 / tau;
        for g in 0..y.len() {
            dy[g] = y[g] * (self.a[g] - self.shift) - dy[g] * inv;
        }
    }
}

impl DunklKernel {
    pub fn new(rs: RootSystem) -> Result<Self> {
        let group = ReflectionGroup::generate(&rs)?;
        let coupling = CouplingOperator::new(&rs, &group);
        Ok(DunklKernel {
            rs,
            group,
            coupling,
        })
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    /// `⟨x, g·y⟩` for every group element.
    pub fn pairings(&self, x: &[f64], y: &[Complex64]) -> Vec<Complex64> {
        self.group
            .elements
            .iter()
            .map(|g| dot_rc(x, &g.apply_c(y)))
            .collect()
    }

    /// Taylor coefficients `c_0..c_order` of `t ↦ E_k(tx, g·y)`.
    pub fn series_coefficients(
        &self,
        x: &[f64],
        y: &[Complex64],
        order: usize,
    ) -> Result<Vec<OrbitVector>> {
        self.check_inputs(x, y)?;
        let a = self.pairings(x, y);
        let mut out = vec![OrbitVector::ones(self.order())];
        for m in 1..=order {
            let prev = &out[m - 1];
            let rhs: Vec<Complex64> = prev.iter().zip(&a).map(|(c, d)| c * d).collect();
            out.push(OrbitVector(self.coupling.solve_shifted(m as f64, &rhs)));
        }
        Ok(out)
    }

    /// Sums the series at unit `t` for pairings `a` (already scaled by `t`).
    fn sum_series(&self, a: &[Complex64], opts: &EvalOptions) -> Result<Vec<Complex64>> {
        let n = a.len();
        let mut term = vec![Complex64::new(1.0, 0.0); n];
        let mut sum = term.clone();
        let mut small_run = 0;
        let mut rhs = vec![Complex64::new(0.0, 0.0); n];
        for m in 1..=opts.max_terms {
            for g in 0..n {
                rhs[g] = term[g] * a[g];
            }
            term = self.coupling.solve_shifted(m as f64, &rhs);
            let mut tmax: f64 = 0.0;
            let mut smax: f64 = 0.0;
            for g in 0..n {
                sum[g] += term[g];
                tmax = tmax.max(term[g].norm());
                smax = smax.max(sum[g].norm());
            }
            if tmax <= opts.series_tol * smax {
                small_run += 1;
                if small_run >= 3 {
                    return Ok(sum);
                }
            } else {
                small_run = 0;
            }
        }
        let modulus = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
        Err(DunklError::NonConvergence {
            max_terms: opts.max_terms,
            modulus,
        })
    }

    fn check_inputs(&self, x: &[f64], y: &[Complex64]) -> Result<()> {
        check_dim(self.rs.rank, x.len())?;
        check_dim(self.rs.rank, y.len())?;
        if x.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
            return Err(DunklError::NonFinite("kernel arguments".into()));
        }
        Ok(())
    }

    /// Right-hand side of the orbit ODE, `F'(t) = D F - L F / t`.
    pub fn orbit_derivative(
        &self,
        x: &[f64],
        y: &[Complex64],
        t: f64,
        f: &OrbitVector,
    ) -> OrbitVector {
        let a = self.pairings(x, y);
        let lf = self.coupling.apply(f);
        OrbitVector(
            (0..f.len())
                .map(|g| a[g] * f[g] - lf[g] / t)
                .collect(),
        )
    }

    pub fn eval_orbit(&self, x: &[f64], y: &[Complex64], t: f64) -> Result<KernelEvaluation> {
        self.eval_orbit_with(x, y, t, &EvalOptions::default())
    }

    /// `E_k(tx, g·y)` for all `g`.
    pub fn eval_orbit_with(
        &self,
        x: &[f64],
        y: &[Complex64],
        t: f64,
        opts: &EvalOptions,
    ) -> Result<KernelEvaluation> {
        self.check_inputs(x, y)?;
        if !(t.is_finite() && t >= 0.0) {
            return Err(DunklError::InvalidArgument(format!(
                "scale t must be finite and nonnegative, got {t}"
            )));
        }
        let nx = norm(x);
        let ny = norm_c(y);
        let tau = t * nx * ny;
        let mut done = KernelEvaluation {
            x: x.to_vec(),
            y: y.to_vec(),
            t,
            result: OrbitVector::ones(self.order()),
            scaled: false,
            scale_exponent: 0.0,
            chamber_exponent: 0.0,
            used_ode: false,
        };
        if tau == 0.0 {
            return Ok(done);
        }
        // Unit pairings; |a_g| <= 1.
        let xh: Vec<f64> = x.iter().map(|v| v / nx).collect();
        let yh: Vec<Complex64> = y.iter().map(|v| v / ny).collect();
        let a = self.pairings(&xh, &yh);
        let shift = a.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let gap = 1.0 - shift;
        let tau_switch = if gap * opts.series_radius <= opts.cancellation_budget {
            opts.series_radius
        } else {
            opts.series_radius.min(opts.cancellation_budget / gap)
        };

        let tau0 = tau.min(tau_switch);
        let a0: Vec<Complex64> = a.iter().map(|z| z * tau0).collect();
        let mut state = self.sum_series(&a0, opts)?;
        let damp = (-tau0 * shift).exp();
        for v in state.iter_mut() {
            *v *= damp;
        }
        if tau > tau0 {
            let sys = ScaledOrbitOde {
                a: &a,
                shift,
                coupling: &self.coupling,
            };
            ode::integrate(&sys, tau0, tau, &mut state, &opts.ode)?;
            done.used_ode = true;
        }
        if state.iter().any(|v| !v.is_finite()) {
            return Err(DunklError::NonFinite(format!(
                "kernel at x = {x:?}, y = {y:?}, t = {t}"
            )));
        }
        let exponent = tau * shift;
        done.chamber_exponent = exponent;
        if exponent > MAX_UNSCALED_EXPONENT {
            done.scaled = true;
            done.scale_exponent = exponent;
            done.result = OrbitVector(state);
        } else {
            let grow = exponent.exp();
            done.result = OrbitVector(state.into_iter().map(|v| v * grow).collect());
        }
        Ok(done)
    }

    /// `E_k(i t x, g·y)` for real `y`; each entry has modulus at most one.
    pub fn eval_imaginary(&self, x: &[f64], y: &[f64], t: f64) -> Result<OrbitVector> {
        self.eval_imaginary_with(x, y, t, &EvalOptions::default())
    }

    pub fn eval_imaginary_with(
        &self,
        x: &[f64],
        y: &[f64],
        t: f64,
        opts: &EvalOptions,
    ) -> Result<OrbitVector> {
        let yi: Vec<Complex64> = y.iter().map(|&v| Complex64::new(0.0, v)).collect();
        Ok(self.eval_orbit_with(x, &yi, t, opts)?.values())
    }
}

/// Above this exponent results are returned scaled.
pub const MAX_UNSCALED_EXPONENT: f64 = 700.0;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::Family;

    fn kernel(fam: Family, k: &[f64]) -> DunklKernel {
        DunklKernel::new(RootSystem::build(fam, k).unwrap()).unwrap()
    }

    fn real(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&r| Complex64::new(r, 0.0)).collect()
    }

    #[test]
    fn coupling_vanishes_for_zero_multiplicity() {
        let ker = kernel(Family::B2, &[0.0, 0.0]);
        assert!(ker.coupling.dense().amax() == 0.0);
    }

    #[test]
    fn coupling_rank_one_matrix() {
        let ker = kernel(Family::Z2n { n: 1 }, &[0.7]);
        let l = ker.coupling.dense();
        let want = DMatrix::from_row_slice(2, 2, &[0.7, -0.7, -0.7, 0.7]);
        assert!((l - want).amax() < 1e-15);
        let mut ev = ker.coupling.eigenvalues().to_vec();
        ev.sort_by(f64::total_cmp);
        assert!(ev[0].abs() < 1e-14 && (ev[1] - 1.4).abs() < 1e-14);
    }

    #[test]
    fn coupling_is_symmetric_psd_and_kills_constants() {
        let ker = kernel(Family::B2, &[0.8, 1.3]);
        let l = ker.coupling.dense();
        assert!((&l - l.transpose()).amax() < 1e-15);
        assert!(ker.coupling.eigenvalues().iter().all(|&e| e > -1e-12));
        let lc = ker.coupling.apply(&OrbitVector::ones(8));
        assert!(lc.norm_inf() < 1e-14);
    }

    #[test]
    fn shifted_solve_inverts() {
        let ker = kernel(Family::I2m { m: 5 }, &[0.4]);
        let rhs: Vec<Complex64> = (0..10)
            .map(|i| Complex64::new(i as f64 - 3.0, 0.5 * i as f64))
            .collect();
        for m in [1.0, 2.0, 17.0] {
            let c = ker.coupling.solve_shifted(m, &rhs);
            let lc = ker.coupling.apply(&OrbitVector(c.clone()));
            for g in 0..10 {
                assert!((c[g] * m + lc[g] - rhs[g]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn exponential_coefficients_for_k_zero() {
        let ker = kernel(Family::B2, &[0.0, 0.0]);
        let x = [0.7, -0.2];
        let y = real(&[0.3, 1.1]);
        let cs = ker.series_coefficients(&x, &y, 6).unwrap();
        let a = ker.pairings(&x, &y);
        let mut fact = 1.0;
        for (m, c) in cs.iter().enumerate() {
            if m > 0 {
                fact *= m as f64;
            }
            for g in 0..8 {
                let want = a[g].powi(m as i32) / fact;
                assert!((c[g] - want).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn exponential_reduction_through_the_ode() {
        let ker = kernel(Family::B2, &[0.0, 0.0]);
        let x = [0.9, 0.35];
        let y = real(&[-0.4, 1.0]);
        let ev = ker.eval_orbit(&x, &y, 60.0).unwrap();
        assert!(ev.used_ode);
        let a = ker.pairings(&x, &y);
        for g in 0..8 {
            let want = (a[g] * 60.0 - ev.chamber_exponent).exp();
            assert!((ev.normalized(g) - want).norm() < 1e-11, "{g}");
        }
    }

    #[test]
    fn zero_argument_gives_ones() {
        let ker = kernel(Family::A2, &[0.5]);
        let ev = ker.eval_orbit(&[0.0, 0.0], &real(&[1.0, 2.0]), 3.0).unwrap();
        assert_eq!(ev.result, OrbitVector::ones(6));
        let ev = ker.eval_orbit(&[1.0, 0.0], &real(&[1.0, 2.0]), 0.0).unwrap();
        assert_eq!(ev.result, OrbitVector::ones(6));
    }

    #[test]
    fn rejects_bad_inputs() {
        let ker = kernel(Family::A2, &[0.5]);
        assert!(matches!(
            ker.eval_orbit(&[1.0], &real(&[1.0, 2.0]), 1.0),
            Err(DunklError::DimensionMismatch { .. })
        ));
        assert!(ker.eval_orbit(&[1.0, 0.0], &real(&[1.0, 2.0]), -1.0).is_err());
        assert!(ker
            .eval_orbit(&[f64::NAN, 0.0], &real(&[1.0, 2.0]), 1.0)
            .is_err());
    }

    #[test]
    fn large_real_arguments_are_scaled() {
        let ker = kernel(Family::B2, &[1.0, 0.5]);
        let ev = ker.eval_orbit(&[3.0, 1.0], &real(&[3.0, 2.0]), 80.0).unwrap();
        assert!(ev.scaled);
        assert!((ev.scale_exponent - 80.0 * 11.0).abs() < 1e-9);
        for g in 0..8 {
            let v = ev.result[g];
            assert!(v.re > 0.0 && v.norm() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn series_and_ode_agree_where_both_apply() {
        let ker = kernel(Family::B2, &[1.0, 1.0]);
        let x = [0.8, 0.3];
        let y = real(&[0.6, -0.7]);
        let series_only = EvalOptions {
            cancellation_budget: 1e9,
            ..EvalOptions::default()
        };
        let early_ode = EvalOptions {
            series_radius: 4.0,
            ..EvalOptions::default()
        };
        let t = 12.0;
        let a = ker.eval_orbit_with(&x, &y, t, &series_only).unwrap();
        let b = ker.eval_orbit_with(&x, &y, t, &early_ode).unwrap();
        assert!(!a.used_ode && b.used_ode);
        for g in 0..8 {
            let rel = (a.value(g) - b.value(g)).norm() / a.value(g).norm();
            assert!(rel < 1e-6, "g={g} rel={rel}");
        }
    }
}
