use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use dunkl::asymptotics::{estimate_v, AdmissibleCurvePair, AsympOptions};
use dunkl::kernel1d::{e1_series, hyp1f1, Rank1Kernel};
use dunkl::{DunklKernel, Family, RootSystem};

fn rank_one(k: f64) -> DunklKernel {
    DunklKernel::new(RootSystem::build(Family::Z2n { n: 1 }, &[k]).unwrap()).unwrap()
}

/// `Γ(ν+1)(2/z)^ν J_ν(z)` from its power series.
fn j_normalized(nu: f64, z: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..200 {
        term *= -(z * z / 4.0) / (m as f64 * (m as f64 + nu));
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

#[test]
fn rank_one_bessel_form() {
    // E_k(iz) = j_{k-1/2}(z) + i z/(2k+1) j_{k+1/2}(z)
    for k in [0.3, 1.0, 2.5] {
        for z in [0.2, 1.0, 4.0, 9.0] {
            let want = Complex64::new(
                j_normalized(k - 0.5, z),
                z / (2.0 * k + 1.0) * j_normalized(k + 0.5, z),
            );
            let got = e1_series(Complex64::new(0.0, z), k).unwrap();
            assert!((got - want).norm() < 1e-12, "k={k} z={z}: {got} vs {want}");
        }
    }
}

#[test]
fn rank_one_hyp1f1_form() {
    // E_k(x) = e^x 1F1(k, 2k+1, -2x)
    for k in [0.5, 1.5, 3.0] {
        for x in [-3.0f64, -0.5, 0.7, 5.0] {
            let want = x.exp() * hyp1f1(k, 2.0 * k + 1.0, -2.0 * x).unwrap();
            let got = Rank1Kernel::new(k).unwrap().eval(Complex64::new(x, 0.0)).unwrap();
            assert!((got.re - want).abs() < 1e-12 * want.abs());
        }
    }
}

#[test]
fn rank_one_limit_vector() {
    // v_id = Γ(2k+1)/Γ(k+1) (2i)^{-k}, v_σ = conj(v_id)
    for k in [0.5, 1.0, 1.5] {
        let ker = rank_one(k);
        let curve = AdmissibleCurvePair::ray(&ker, 0.5, &[1.0], &[1.0]).unwrap();
        let opts = AsympOptions {
            tol: 1e-4,
            t_max: 4096.0,
            ..AsympOptions::default()
        };
        let est = estimate_v(&ker, &curve, &opts).unwrap();
        let mag = (ln_gamma(2.0 * k + 1.0) - ln_gamma(k + 1.0)).exp() * 2f64.powf(-k);
        let want = Complex64::from_polar(mag, -k * std::f64::consts::FRAC_PI_2);
        assert!((est.v[0] - want).norm() < 1e-3 * mag, "k={k}: {} vs {want}", est.v[0]);
        assert!((est.v[1] - want.conj()).norm() < 1e-3 * mag);
    }
}
