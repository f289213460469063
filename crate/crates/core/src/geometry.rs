//! Chamber and cone geometry: `C`, `C_δ`, simplicial cones
//! `Λ_{v₁..vₙ} = {Σ x_i v_i : x_i > 0}`, and the covering `C_δ ⊂ Λ^{p₀}` with
//! `Λ^p` spanned by `v_{p,i} = λ_i + λ/p`, `λ = Σ λ_i`.
//!
//! In the basis `v_{p,i}` the coordinates of `x` are
//! `ℓ_i(x) = ⟨x, α_i⟩ - Σ_j ⟨x, α_j⟩ / (p + n)`.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{DunklError, Result};
use crate::linalg::{check_dim, checked_inverse, dot, from_columns, mat_vec, norm, scale};
use crate::rootsys::RootSystem;
use crate::sampling::{log_uniform, sample_rng, simplex_grid, simplex_grid_len};

pub const CONE_TOL: f64 = 1e-12;
pub const DEFAULT_P_MAX: usize = 64;
pub const DEFAULT_CAP_POINTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootScope {
    #[default]
    AllPositive,
    SimpleOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub delta: f64,
    pub root_scope: RootScope,
}

impl ConeSpec {
    pub fn new(delta: f64) -> Self {
        ConeSpec {
            delta,
            root_scope: RootScope::AllPositive,
        }
    }

    pub fn roots<'a>(&self, rs: &'a RootSystem) -> Vec<&'a [f64]> {
        match self.root_scope {
            RootScope::AllPositive => rs.positive_roots.iter().map(Vec::as_slice).collect(),
            RootScope::SimpleOnly => rs
                .simple
                .iter()
                .map(|&i| rs.positive_roots[i].as_slice())
                .collect(),
        }
    }
}

/// Open chamber test: every coordinate `⟨x, α_i⟩` in the dual basis is positive.
pub fn in_chamber(rs: &RootSystem, x: &[f64]) -> bool {
    rs.simple
        .iter()
        .all(|&i| dot(x, &rs.positive_roots[i]) > 0.0)
}

/// `min_α ⟨x/‖x‖, α⟩ - δ` over the roots in scope.
pub fn cone_margin(rs: &RootSystem, spec: &ConeSpec, x: &[f64]) -> f64 {
    let r = norm(x);
    spec.roots(rs)
        .iter()
        .map(|a| dot(x, a) / r)
        .fold(f64::INFINITY, f64::min)
        - spec.delta
}

pub fn in_cone_delta(rs: &RootSystem, spec: &ConeSpec, x: &[f64]) -> bool {
    let r = norm(x);
    if r == 0.0 || !in_chamber(rs, x) {
        return false;
    }
    spec.roots(rs)
        .iter()
        .all(|a| dot(x, a) >= spec.delta * r - CONE_TOL)
}

/// Open simplicial cone spanned by `n` independent vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    pub generators: Vec<Vec<f64>>,
    pub inverse: DMatrix<f64>,
}

impl Polytope {
    pub fn new(generators: Vec<Vec<f64>>) -> Result<Self> {
        let n = generators.len();
        for g in &generators {
            check_dim(n, g.len())?;
        }
        let inverse = checked_inverse(&from_columns(&generators), 1e-12)?;
        Ok(Polytope {
            generators,
            inverse,
        })
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn coordinates(&self, x: &[f64]) -> Vec<f64> {
        mat_vec(&self.inverse, x)
    }

    pub fn point(&self, coords: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.dim()];
        for (c, g) in coords.iter().zip(&self.generators) {
            for (xj, gj) in x.iter_mut().zip(g) {
                *xj += c * gj;
            }
        }
        x
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.coordinates(x).iter().all(|&c| c > 0.0)
    }

    pub fn gram(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| dot(&self.generators[i], &self.generators[j]))
    }
}

pub fn coordinates_in_basis(p: &Polytope, x: &[f64]) -> Vec<f64> {
    p.coordinates(x)
}

/// `x* = Σ |x_i| v_i`.
pub fn x_star(p: &Polytope, x: &[f64]) -> Vec<f64> {
    let c: Vec<f64> = p.coordinates(x).into_iter().map(f64::abs).collect();
    p.point(&c)
}

/// `Λ^p`, spanned by `v_{p,i} = λ_i + λ/p`.
pub fn covering_vectors(rs: &RootSystem, p: usize) -> Result<Polytope> {
    if p == 0 {
        return Err(DunklError::InvalidArgument("covering index p must be >= 1".into()));
    }
    let lam = rs.dual_basis()?;
    let n = rs.rank;
    let mut total = vec![0.0; n];
    for l in &lam {
        for (t, v) in total.iter_mut().zip(l) {
            *t += v;
        }
    }
    let gens = lam
        .iter()
        .map(|l| {
            l.iter()
                .zip(&total)
                .map(|(a, b)| a + b / p as f64)
                .collect()
        })
        .collect();
    Polytope::new(gens)
}

/// Coefficients of `v_{p,i}` in the basis `v_{p+1,j}`; row `i` holds `v_{p,i}`.
pub fn nesting_coefficients(rs: &RootSystem, p: usize) -> Result<DMatrix<f64>> {
    let a = covering_vectors(rs, p)?;
    let b = covering_vectors(rs, p + 1)?;
    let n = rs.rank;
    let mut m = DMatrix::zeros(n, n);
    for (i, v) in a.generators.iter().enumerate() {
        for (j, c) in b.coordinates(v).into_iter().enumerate() {
            m[(i, j)] = c;
        }
    }
    Ok(m)
}

/// Off-diagonal nesting coefficient obtained by solving the linear system.
pub fn nesting_coefficient(n: usize, p: usize) -> f64 {
    1.0 / (p as f64 * (n + p + 1) as f64)
}

/// The commonly quoted coefficient `1/(p(2p+1))`; equals [`nesting_coefficient`] only for `n = p`.
pub fn nesting_coefficient_displayed(p: usize) -> f64 {
    1.0 / (p as f64 * (2 * p + 1) as f64)
}

/// Smallest `p ≤ p_max` with `x ∈ Λ^p`.
pub fn covering_index(rs: &RootSystem, x: &[f64], p_max: usize) -> Option<usize> {
    let a: Vec<f64> = rs
        .simple
        .iter()
        .map(|&i| dot(x, &rs.positive_roots[i]))
        .collect();
    let s: f64 = a.iter().sum();
    let n = rs.rank as f64;
    (1..=p_max).find(|&p| a.iter().all(|&ai| ai - s / (p as f64 + n) > 0.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct CoveringCertificate {
    pub p0: usize,
    #[serde(skip)]
    pub polytope: Polytope,
    pub generators: Vec<Vec<f64>>,
    /// Certified lower bound on every coordinate over `Π_δ`.
    pub margin: f64,
    /// Smallest coordinate seen on the samples.
    pub sampled_min: f64,
    /// Smallest coordinate reached by the local descent.
    pub descent_min: f64,
    pub samples: usize,
    pub grid_resolution: usize,
    pub mesh: f64,
    pub delta: f64,
}

/// Unit directions of the relaxed cap and the mesh bound `h` of the grid.
pub fn sample_cap(
    rs: &RootSystem,
    spec: &ConeSpec,
    min_points: usize,
) -> Result<(Vec<Vec<f64>>, usize, f64)> {
    let lam = rs.dual_basis()?;
    let n = rs.rank;
    let lam_m = from_columns(&lam);
    let sv = lam_m.singular_values();
    let cond = sv.max() / sv.min();
    let roots = spec.roots(rs);
    let mut res = 8usize;
    loop {
        let h = 2.0 * n as f64 * cond / res as f64;
        let pts: Vec<Vec<f64>> = simplex_grid(n, res)
            .into_par_iter()
            .filter_map(|w| {
                let mut x = vec![0.0; n];
                for (wi, l) in w.iter().zip(&lam) {
                    for (xj, lj) in x.iter_mut().zip(l) {
                        *xj += *wi as f64 * lj;
                    }
                }
                let r = norm(&x);
                let u = scale(&x, 1.0 / r);
                roots
                    .iter()
                    .all(|a| dot(&u, a) >= spec.delta - norm(a) * h)
                    .then_some(u)
            })
            .collect();
        if pts.len() >= min_points {
            return Ok((pts, res, h));
        }
        let exact = pts
            .iter()
            .filter(|u| roots.iter().all(|a| dot(u, a) >= spec.delta))
            .count();
        if exact == 0 && h < 1e-3 {
            return Err(DunklError::EmptyCone { delta: spec.delta });
        }
        let grow = if pts.is_empty() {
            4.0
        } else {
            ((min_points as f64 / pts.len() as f64).powf(1.0 / (n as f64 - 1.0).max(1.0)) * 1.1)
                .clamp(1.2, 4.0)
        };
        res = ((res as f64) * grow).ceil() as usize;
        if simplex_grid_len(n, res) > 50_000_000 {
            return Err(DunklError::InvalidArgument(format!(
                "cap of C_δ at δ = {} too thin to sample",
                spec.delta
            )));
        }
    }
}

/// Finds the smallest `p` with `C_δ ⊂ Λ^p` and a certified margin.
pub fn lemma_covering(rs: &RootSystem, spec: &ConeSpec, p_max: usize) -> Result<CoveringCertificate> {
    lemma_covering_with(rs, spec, p_max, DEFAULT_CAP_POINTS)
}

pub fn lemma_covering_with(
    rs: &RootSystem,
    spec: &ConeSpec,
    p_max: usize,
    min_points: usize,
) -> Result<CoveringCertificate> {
    if !(spec.delta > 0.0) {
        return Err(DunklError::InvalidArgument("covering needs delta > 0".into()));
    }
    let (pts, res, h) = sample_cap(rs, spec, min_points)?;
    let n = rs.rank;
    let simple = rs.simple_roots();
    let pair: Vec<Vec<f64>> = pts
        .iter()
        .map(|u| simple.iter().map(|a| dot(u, a)).collect())
        .collect();
    for p in 1..=p_max {
        let denom = (p + n) as f64;
        let grads: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|d| simple[i][d] - simple.iter().map(|a| a[d]).sum::<f64>() / denom)
                    .collect()
            })
            .collect();
        let lip = grads.iter().map(|g| norm(g)).fold(0.0, f64::max);
        let (sampled_min, arg) = pair
            .par_iter()
            .enumerate()
            .map(|(j, a)| {
                let s: f64 = a.iter().sum();
                let m = a.iter().map(|ai| ai - s / denom).fold(f64::INFINITY, f64::min);
                (m, j)
            })
            .reduce(|| (f64::INFINITY, usize::MAX), |x, y| if y.0 < x.0 { y } else { x });
        let margin = sampled_min - lip * h;
        if margin > 0.0 {
            let polytope = covering_vectors(rs, p)?;
            let descent_min = descend(rs, spec, &grads, &pts[arg]);
            return Ok(CoveringCertificate {
                p0: p,
                generators: polytope.generators.clone(),
                polytope,
                margin,
                sampled_min,
                descent_min,
                samples: pts.len(),
                grid_resolution: res,
                mesh: h,
                delta: spec.delta,
            });
        }
    }
    Err(DunklError::CoveringNotFound { p_max })
}

/// Projected descent of `min_i ℓ_i` on the unit sphere inside `C_δ`.
fn descend(rs: &RootSystem, spec: &ConeSpec, grads: &[Vec<f64>], start: &[f64]) -> f64 {
    let value = |u: &[f64]| grads.iter().map(|g| dot(g, u)).fold(f64::INFINITY, f64::min);
    let center = match rs.chamber_center() {
        Ok(c) => c,
        Err(_) => return value(start),
    };
    let cu = scale(&center, 1.0 / norm(&center));
    let pull_inside = |mut u: Vec<f64>| {
        for _ in 0..60 {
            if cone_margin(rs, spec, &u) >= 0.0 {
                return Some(u);
            }
            u = u.iter().zip(&cu).map(|(a, b)| 0.9 * a + 0.1 * b).collect();
            let r = norm(&u);
            u = scale(&u, 1.0 / r);
        }
        None
    };
    let mut u = match pull_inside(start.to_vec()) {
        Some(u) => u,
        None => return value(start),
    };
    let mut best = value(&u);
    let mut step = 0.05;
    while step > 1e-12 {
        let i = (0..grads.len())
            .min_by(|&a, &b| dot(&grads[a], &u).total_cmp(&dot(&grads[b], &u)))
            .unwrap_or(0);
        let g = &grads[i];
        let gu = dot(g, &u);
        let tangent: Vec<f64> = g.iter().zip(&u).map(|(a, b)| a - gu * b).collect();
        let cand: Vec<f64> = u.iter().zip(&tangent).map(|(a, t)| a - step * t).collect();
        let r = norm(&cand);
        let cand = scale(&cand, 1.0 / r);
        match pull_inside(cand) {
            Some(c) if value(&c) < best => {
                best = value(&c);
                u = c;
            }
            _ => step *= 0.5,
        }
    }
    best
}

/// Enclosing cone used for the `H_{p,i}` constant: `Λ^q` with
/// `q = max(p₀(δ = 0.05), p + 1)`.
pub fn default_enclosing(rs: &RootSystem, p: usize) -> Result<Polytope> {
    let base = lemma_covering_with(rs, &ConeSpec::new(0.05), DEFAULT_P_MAX, 20_000)?;
    covering_vectors(rs, base.p0.max(p + 1))
}

#[derive(Debug, Clone, Serialize)]
pub struct HConstant {
    pub c: f64,
    pub c_half: f64,
    pub arg_coords: Vec<f64>,
    pub samples: usize,
    pub pinch: f64,
}

/// Sampled smallest `c` with `⟨x, α⟩ ≤ c (Π x_i)^{1/n}` over positive roots
/// and `x ∈ Λ` with coordinates pinched to `x_i / x_1 ∈ [1/pinch, pinch]`.
pub fn h_constant(
    rs: &RootSystem,
    enclosing: &Polytope,
    pinch: f64,
    samples: usize,
    seed: u64,
) -> Result<HConstant> {
    check_dim(rs.rank, enclosing.dim())?;
    for g in &enclosing.generators {
        if rs.positive_roots.iter().any(|a| dot(g, a) <= 0.0) {
            return Err(DunklError::UnboundedRatio(format!(
                "generator {g:?} lies on or beyond a chamber wall"
            )));
        }
    }
    let n = rs.rank;
    let eval = |i: usize| {
        let mut rng = sample_rng(seed, i as u64);
        let coords: Vec<f64> = (0..n)
            .map(|j| if j == 0 { 1.0 } else { log_uniform(&mut rng, 1.0 / pinch, pinch) })
            .collect();
        (h_ratio(rs, enclosing, &coords), coords)
    };
    let half = samples / 2;
    let results: Vec<(f64, Vec<f64>)> = (0..samples).into_par_iter().map(eval).collect();
    let mut c = 0.0;
    let mut c_half = 0.0;
    let mut arg = vec![1.0; n];
    for (i, (r, coords)) in results.into_iter().enumerate() {
        if !r.is_finite() {
            return Err(DunklError::UnboundedRatio(format!("at coordinates {coords:?}")));
        }
        if i < half && r > c_half {
            c_half = r;
        }
        if r > c {
            c = r;
            arg = coords;
        }
    }
    Ok(HConstant {
        c,
        c_half,
        arg_coords: arg,
        samples,
        pinch,
    })
}

/// `max_α ⟨x, α⟩ / (Π x_i)^{1/n}` for `x` with the given coordinates.
pub fn h_ratio(rs: &RootSystem, enclosing: &Polytope, coords: &[f64]) -> f64 {
    let x = enclosing.point(coords);
    let geo = coords.iter().map(|c| c.ln()).sum::<f64>() / coords.len() as f64;
    rs.positive_roots
        .iter()
        .map(|a| dot(&x, a))
        .fold(f64::NEG_INFINITY, f64::max)
        / geo.exp()
}
