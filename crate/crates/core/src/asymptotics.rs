//! The normalized oscillatory kernel
//!
//! ```text
//! F_g(x, y) = √(w_k(x) w_k(y)) e^{-i⟨x, g·y⟩} E_k(ix, g·y)
//! ```
//!
//! along curve pairs `t ↦ (κ₁(t), κ₂(t))` in `C_δ`, where it satisfies
//! `F' = A(t) F` with `A_{g, σ_α g} = Σ k(α) (⟨α,κ₁'⟩/⟨α,κ₁⟩ + ⟨α,gκ₂'⟩/⟨α,gκ₂⟩)
//! e^{-2i⟨α,κ₁⟩⟨α,gκ₂⟩/|α|²}`, and estimation of its limit `v_g`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{DunklError, Result};
use crate::geometry::{in_cone_delta, ConeSpec};
use crate::kernel::{DunklKernel, EvalOptions, OrbitVector};
use crate::linalg::{dot, norm, scale};
use crate::ode::{self, ComplexSystem, OdeOptions, OdeStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Ray,
    RotatingRay,
}

/// `κ_j(t) = t·d_j(t)`; for rotating rays `d_j` turns towards the chamber
/// center by the angle `rate·max(0, 1 - t_min/t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibleCurvePair {
    pub kind: CurveKind,
    pub directions: [Vec<f64>; 2],
    pub rotation_rate: f64,
    pub delta: f64,
    pub t_min: f64,
    #[serde(skip)]
    normals: [Vec<f64>; 2],
}

impl AdmissibleCurvePair {
    pub fn ray(ker: &DunklKernel, delta: f64, d1: &[f64], d2: &[f64]) -> Result<Self> {
        Self::build(ker, CurveKind::Ray, delta, d1, d2, 0.0, 1.0)
    }

    pub fn rotating(
        ker: &DunklKernel,
        delta: f64,
        d1: &[f64],
        d2: &[f64],
        rate: f64,
        t_min: f64,
    ) -> Result<Self> {
        Self::build(ker, CurveKind::RotatingRay, delta, d1, d2, rate, t_min)
    }

    fn build(
        ker: &DunklKernel,
        kind: CurveKind,
        delta: f64,
        d1: &[f64],
        d2: &[f64],
        rate: f64,
        t_min: f64,
    ) -> Result<Self> {
        let rs = &ker.rs;
        let spec = ConeSpec::new(delta);
        if !(0.0..std::f64::consts::PI).contains(&rate) || !(t_min > 0.0) {
            return Err(DunklError::InvalidArgument(format!(
                "rotation rate {rate} / t_min {t_min} out of range"
            )));
        }
        let center = rs.chamber_center()?;
        let center = scale(&center, 1.0 / norm(&center));
        let mut dirs = [Vec::new(), Vec::new()];
        let mut normals = [Vec::new(), Vec::new()];
        for (j, d) in [d1, d2].into_iter().enumerate() {
            crate::linalg::check_dim(rs.rank, d.len())?;
            let r = norm(d);
            if r == 0.0 {
                return Err(DunklError::ZeroVector);
            }
            let u = scale(d, 1.0 / r);
            let c = dot(&u, &center);
            let w: Vec<f64> = center.iter().zip(&u).map(|(a, b)| a - c * b).collect();
            let wn = norm(&w);
            let w = if kind == CurveKind::Ray || wn < 1e-12 {
                vec![0.0; rs.rank]
            } else {
                scale(&w, 1.0 / wn)
            };
            let end: Vec<f64> = u
                .iter()
                .zip(&w)
                .map(|(a, b)| a * rate.cos() + b * rate.sin())
                .collect();
            // C_δ is a convex cone, so the arc between the end directions stays inside.
            for v in [&u, &end] {
                if !in_cone_delta(rs, &spec, v) {
                    return Err(DunklError::InadmissibleCurve(format!(
                        "direction {v:?} is outside C_delta for delta = {delta}"
                    )));
                }
            }
            dirs[j] = u;
            normals[j] = w;
        }
        Ok(AdmissibleCurvePair {
            kind,
            directions: dirs,
            rotation_rate: if kind == CurveKind::Ray { 0.0 } else { rate },
            delta,
            t_min,
            normals,
        })
    }

    fn angle(&self, t: f64) -> (f64, f64) {
        if self.kind == CurveKind::Ray || t <= self.t_min {
            (0.0, 0.0)
        } else {
            (
                self.rotation_rate * (1.0 - self.t_min / t),
                self.rotation_rate * self.t_min / (t * t),
            )
        }
    }

    /// `κ_j(t)` and `κ_j'(t)`.
    pub fn point_and_velocity(&self, j: usize, t: f64) -> (Vec<f64>, Vec<f64>) {
        let (th, dth) = self.angle(t);
        let (s, c) = th.sin_cos();
        let u = &self.directions[j];
        let w = &self.normals[j];
        let d: Vec<f64> = u.iter().zip(w).map(|(a, b)| a * c + b * s).collect();
        let dp: Vec<f64> = u.iter().zip(w).map(|(a, b)| -a * s + b * c).collect();
        let p = scale(&d, t);
        let v = d.iter().zip(&dp).map(|(a, b)| a + t * dth * b).collect();
        (p, v)
    }

    pub fn point(&self, j: usize, t: f64) -> Vec<f64> {
        self.point_and_velocity(j, t).0
    }
}

/// `(F_g(x, y))_g`.
pub fn f_normalized(
    ker: &DunklKernel,
    x: &[f64],
    y: &[f64],
    opts: &EvalOptions,
) -> Result<OrbitVector> {
    let log_w = 0.5 * (ker.rs.log_weight(x) + ker.rs.log_weight(y));
    if !log_w.is_finite() {
        return Err(DunklError::OnHyperplane);
    }
    let w = log_w.exp();
    let e = ker.eval_imaginary_with(x, y, 1.0, opts)?;
    Ok(OrbitVector(
        ker.group
            .elements
            .iter()
            .enumerate()
            .map(|(g, el)| {
                let phase = dot(x, &el.apply(y));
                e[g] * Complex64::from_polar(w, -phase)
            })
            .collect(),
    ))
}

/// `A(t)` as a matrix-free operator.
struct FSystem<'a> {
    ker: &'a DunklKernel,
    curve: &'a AdmissibleCurvePair,
    /// `g⁻¹ α = sign · β` as `(β, sign)` for each `(α, g)`.
    root_map: Vec<Vec<(usize, f64)>>,
    active: Vec<usize>,
    norm2: Vec<f64>,
}

impl<'a> FSystem<'a> {
    fn new(ker: &'a DunklKernel, curve: &'a AdmissibleCurvePair) -> Result<Self> {
        let roots = &ker.rs.positive_roots;
        let mut root_map = Vec::with_capacity(roots.len());
        for a in roots {
            let mut row = Vec::with_capacity(ker.order());
            for g in 0..ker.order() {
                let v = ker.group.elements[ker.group.inverse[g]].apply(a);
                let found = roots.iter().enumerate().find_map(|(b, r)| {
                    if crate::linalg::max_abs_diff(r, &v) < 1e-9 {
                        Some((b, 1.0))
                    } else if r.iter().zip(&v).all(|(p, q)| (p + q).abs() < 1e-9) {
                        Some((b, -1.0))
                    } else {
                        None
                    }
                });
                row.push(found.ok_or_else(|| DunklError::NotARoot(v.clone()))?);
            }
            root_map.push(row);
        }
        let active = (0..roots.len()).filter(|&a| ker.rs.k(a) != 0.0).collect();
        let norm2 = roots.iter().map(|a| dot(a, a)).collect();
        Ok(FSystem {
            ker,
            curve,
            root_map,
            active,
            norm2,
        })
    }

    /// `⟨α, κ₁⟩, ⟨α, κ₁'⟩, ⟨α, κ₂⟩, ⟨α, κ₂'⟩` for every positive root.
    fn pairings(&self, t: f64) -> Result<[Vec<f64>; 4]> {
        let (k1, v1) = self.curve.point_and_velocity(0, t);
        let (k2, v2) = self.curve.point_and_velocity(1, t);
        let roots = &self.ker.rs.positive_roots;
        let out = [
            roots.iter().map(|a| dot(a, &k1)).collect::<Vec<_>>(),
            roots.iter().map(|a| dot(a, &v1)).collect(),
            roots.iter().map(|a| dot(a, &k2)).collect(),
            roots.iter().map(|a| dot(a, &v2)).collect(),
        ];
        if out[0].iter().chain(&out[2]).any(|&v| v.abs() < 1e-300) {
            return Err(DunklError::InadmissibleCurve(format!("curve meets a wall at t = {t}")));
        }
        Ok(out)
    }

    fn entries(&self, t: f64, mut visit: impl FnMut(usize, usize, Complex64)) -> Result<()> {
        let [p1, q1, p2, q2] = self.pairings(t)?;
        for &a in &self.active {
            let k = self.ker.rs.k(a);
            let r1 = q1[a] / p1[a];
            let perm = &self.ker.group.left_reflect[a];
            for (g, &(b, s)) in self.root_map[a].iter().enumerate() {
                let coeff = k * (r1 + q2[b] / p2[b]);
                let phase = -2.0 * p1[a] * s * p2[b] / self.norm2[a];
                visit(g, perm[g], Complex64::from_polar(coeff, phase));
            }
        }
        Ok(())
    }

    fn matrix(&self, t: f64) -> Result<DMatrix<Complex64>> {
        let n = self.ker.order();
        let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        self.entries(t, |g, h, v| m[(g, h)] += v)?;
        Ok(m)
    }

    /// Shortest local period of the phases, `min 2π/|dφ/dt|`.
    fn period(&self, t: f64) -> f64 {
        let Ok([p1, q1, p2, q2]) = self.pairings(t) else {
            return f64::INFINITY;
        };
        let mut rate: f64 = 0.0;
        for &a in &self.active {
            for &(b, _) in &self.root_map[a] {
                let d = 2.0 * (q1[a] * p2[b] + p1[a] * q2[b]) / self.norm2[a];
                rate = rate.max(d.abs());
            }
        }
        if rate == 0.0 {
            f64::INFINITY
        } else {
            2.0 * std::f64::consts::PI / rate
        }
    }
}

impl ComplexSystem for FSystem<'_> {
    fn dim(&self) -> usize {
        self.ker.order()
    }

    fn rhs(&self, t: f64, y: &[Complex64], dy: &mut [Complex64]) {
        dy.fill(Complex64::new(0.0, 0.0));
        if self
            .entries(t, |g, h, v| dy[g] += v * y[h])
            .is_err()
        {
            dy.fill(Complex64::new(f64::NAN, f64::NAN));
        }
    }

    fn max_step(&self, t: f64) -> f64 {
        PERIOD_FRACTION * self.period(t)
    }
}

/// Largest step as a fraction of the local oscillation period.
pub const PERIOD_FRACTION: f64 = 0.5;

pub fn ode_matrix_a(
    ker: &DunklKernel,
    curve: &AdmissibleCurvePair,
    t: f64,
) -> Result<DMatrix<Complex64>> {
    FSystem::new(ker, curve)?.matrix(t)
}

/// Local oscillation period of `A(t)`.
pub fn local_period(ker: &DunklKernel, curve: &AdmissibleCurvePair, t: f64) -> Result<f64> {
    Ok(FSystem::new(ker, curve)?.period(t))
}

#[derive(Debug, Clone, Copy)]
pub struct AsympOptions {
    pub t0: f64,
    pub t_max: f64,
    pub tol: f64,
    pub ode: OdeOptions,
    pub eval: EvalOptions,
}

impl Default for AsympOptions {
    fn default() -> Self {
        let ode = OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            ..OdeOptions::default()
        };
        AsympOptions {
            t0: 1.0,
            t_max: 1024.0,
            tol: 1e-2,
            ode,
            eval: EvalOptions::fast(),
        }
    }
}

/// `F(t1)` from `F(t0) = f0` by the ODE along the curve.
pub fn propagate(
    ker: &DunklKernel,
    curve: &AdmissibleCurvePair,
    t0: f64,
    t1: f64,
    f0: &OrbitVector,
    opts: &OdeOptions,
) -> Result<(OrbitVector, OdeStats)> {
    let sys = FSystem::new(ker, curve)?;
    let mut y = f0.0.clone();
    let stats = ode::integrate(&sys, t0, t1, &mut y, opts)?;
    Ok((OrbitVector(y), stats))
}

/// `F(t1)` starting from the directly evaluated `F(t0)`.
pub fn integrate_f(
    ker: &DunklKernel,
    curve: &AdmissibleCurvePair,
    t0: f64,
    t1: f64,
    opts: &AsympOptions,
) -> Result<(OrbitVector, OdeStats)> {
    let f0 = f_normalized(ker, &curve.point(0, t0), &curve.point(1, t0), &opts.eval)?;
    propagate(ker, curve, t0, t1, &f0, &opts.ode)
}

/// `F` evaluated directly from the kernel at curve parameter `t`.
pub fn f_on_curve(
    ker: &DunklKernel,
    curve: &AdmissibleCurvePair,
    t: f64,
    opts: &EvalOptions,
) -> Result<OrbitVector> {
    f_normalized(ker, &curve.point(0, t), &curve.point(1, t), opts)
}

#[derive(Debug, Clone, Serialize)]
pub struct VEstimate {
    pub v: OrbitVector,
    pub converged: bool,
    pub tol: f64,
    /// `(t_j, F(t_j))`, `t_j = t₀ 2^j`.
    pub table: Vec<(f64, OrbitVector)>,
    /// `(F(t_j) + F(t_{j+1})) / 2`.
    pub averages: Vec<OrbitVector>,
    /// Largest componentwise change between the last averages.
    pub tail_change: f64,
}

impl VEstimate {
    pub fn norm(&self) -> f64 {
        self.v.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `t, Re F_0, Im F_0, Re F_1, ...`
    pub fn table_csv(&self) -> String {
        let n = self.v.len();
        let mut s = String::from("t");
        for g in 0..n {
            s.push_str(&format!(",re_{g},im_{g}"));
        }
        s.push('\n');
        for (t, f) in &self.table {
            s.push_str(&t.to_string());
            for z in f.iter() {
                s.push_str(&format!(",{},{}", z.re, z.im));
            }
            s.push('\n');
        }
        s
    }
}

/// Limit of `F` along a curve pair, from pairwise averages at doubling `t`.
pub fn estimate_v(
    ker: &DunklKernel,
    curve: &AdmissibleCurvePair,
    opts: &AsympOptions,
) -> Result<VEstimate> {
    let n = ker.order();
    if ker.coupling.is_zero() {
        return Ok(VEstimate {
            v: OrbitVector::ones(n),
            converged: true,
            tol: opts.tol,
            table: vec![(opts.t0, OrbitVector::ones(n))],
            averages: vec![OrbitVector::ones(n)],
            tail_change: 0.0,
        });
    }
    let mut t = opts.t0;
    let mut f = f_on_curve(ker, curve, t, &opts.eval)?;
    let mut table = vec![(t, f.clone())];
    let mut averages: Vec<OrbitVector> = Vec::new();
    let mut tail_change = f64::INFINITY;
    let mut converged = false;
    while 2.0 * t <= opts.t_max * (1.0 + 1e-12) {
        let next = 2.0 * t;
        f = propagate(ker, curve, t, next, &f, &opts.ode)?.0;
        t = next;
        let prev = &table.last().expect("table starts non-empty").1;
        averages.push(OrbitVector(
            prev.iter().zip(f.iter()).map(|(a, b)| (a + b) * 0.5).collect(),
        ));
        table.push((t, f.clone()));
        let m = averages.len();
        if m >= 3 {
            tail_change = averages[m - 1]
                .max_dist(&averages[m - 2])
                .max(averages[m - 2].max_dist(&averages[m - 3]));
            if tail_change < opts.tol {
                converged = true;
                break;
            }
        }
    }
    let v = averages.last().cloned().unwrap_or(f);
    Ok(VEstimate {
        v,
        converged,
        tol: opts.tol,
        table,
        averages,
        tail_change,
    })
}

/// [`estimate_v`] for several curve pairs in parallel.
pub fn estimate_v_many(
    ker: &DunklKernel,
    curves: &[AdmissibleCurvePair],
    opts: &AsympOptions,
) -> Vec<Result<VEstimate>> {
    curves.par_iter().map(|c| estimate_v(ker, c, opts)).collect()
}
