//! Counter-based random sampling. Sample `i` of a run with seed `s` draws
//! from its own ChaCha stream, so results do not depend on evaluation order
//! or thread count, and the first `N` samples of a `2N` run coincide with an
//! `N` run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{norm, scale};

pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let (a, b) = (lo.ln(), hi.ln());
    (a + (b - a) * rng.gen::<f64>()).exp()
}

/// Uniform direction on the unit sphere of `ℝⁿ` (rejection from the cube).
pub fn unit_sphere<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = norm(&v);
        if r <= 1.0 && r > 1e-3 {
            return scale(&v, 1.0 / r);
        }
    }
}

/// Flat-Dirichlet weights on `n` generators.
pub fn dirichlet<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

/// Random unit vector of the open cone spanned by `generators`.
pub fn in_cone<R: Rng>(rng: &mut R, generators: &[Vec<f64>]) -> Vec<f64> {
    let n = generators[0].len();
    let w = dirichlet(rng, generators.len());
    let mut v = vec![0.0; n];
    for (wi, g) in w.iter().zip(generators) {
        for (vj, gj) in v.iter_mut().zip(g) {
            *vj += wi * gj;
        }
    }
    let r = norm(&v);
    scale(&v, 1.0 / r)
}

/// All compositions of `total` into `parts` nonnegative integers.
pub fn simplex_grid(parts: usize, total: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; parts];
    fn rec(i: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for v in 0..=left {
            cur[i] = v;
            rec(i + 1, left - v, cur, out);
        }
    }
    if parts > 0 {
        rec(0, total, &mut cur, &mut out);
    }
    out
}

/// Number of points of [`simplex_grid`].
pub fn simplex_grid_len(parts: usize, total: usize) -> usize {
    // C(total + parts - 1, parts - 1)
    let mut acc: u128 = 1;
    for j in 1..parts as u128 {
        acc = acc * (total as u128 + j) / j;
    }
    acc as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: f64 = sample_rng(7, 3).gen();
        let b: f64 = sample_rng(7, 3).gen();
        let c: f64 = sample_rng(7, 4).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn log_uniform_stays_in_range() {
        let mut rng = sample_rng(1, 0);
        for _ in 0..1000 {
            let v = log_uniform(&mut rng, 0.1, 30.0);
            assert!((0.1..=30.0).contains(&v));
        }
    }

    #[test]
    fn sphere_and_cone_samples_are_unit() {
        let mut rng = sample_rng(2, 0);
        let gens = vec![vec![1.0, 0.0], vec![1.0, 1.0]];
        for _ in 0..200 {
            assert!((norm(&unit_sphere(&mut rng, 3)) - 1.0).abs() < 1e-14);
            let v = in_cone(&mut rng, &gens);
            assert!((norm(&v) - 1.0).abs() < 1e-14);
            assert!(v[1] >= 0.0 && v[0] >= v[1]);
        }
    }

    #[test]
    fn grid_counts() {
        for (p, t) in [(1, 5), (2, 4), (3, 6), (4, 3)] {
            let g = simplex_grid(p, t);
            assert_eq!(g.len(), simplex_grid_len(p, t));
            assert!(g.iter().all(|c| c.iter().sum::<usize>() == t));
        }
    }
}
