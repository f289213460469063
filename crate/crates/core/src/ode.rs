//! Dormand–Prince 8(5,3) integrator for complex linear systems.
//!
//! Allocation-free per step: the kernel and asymptotics modules march
//! millions of steps through oscillatory regimes, so all stage buffers are
//! allocated once per call. Step control follows Hairer's DOP853 (combined
//! fifth/third order error estimate, no PI stabilization).

use num_complex::Complex64;

use crate::error::{DunklError, Result};

/// A first-order system `y' = f(t, y)` on `ℂ^dim`.
pub trait ComplexSystem {
    fn dim(&self) -> usize;

    fn rhs(&self, t: f64, y: &[Complex64], dy: &mut [Complex64]);

    /// Upper bound on the step size at `t` (e.g. a fraction of a local period).
    fn max_step(&self, _t: f64) -> f64 {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Initial step; `0` selects one automatically.
    pub h_init: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-12,
            atol: 1e-14,
            max_steps: 50_000_000,
            h_init: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evals: usize,
}

const C: [f64; 12] = [
    0.0,
    0.526001519587677318785587544488e-1,
    0.789002279381515978178381316732e-1,
    0.118350341907227396726757197510,
    0.281649658092772603273242802490,
    0.333333333333333333333333333333,
    0.25,
    0.307692307692307692307692307692,
    0.651282051282051282051282051282,
    0.6,
    0.857142857142857142857142857142,
    1.0,
];

const A: [&[f64]; 12] = [
    &[],
    &[5.26001519587677318785587544488e-2],
    &[1.97250569845378994544595329183e-2, 5.91751709536136983633785987549e-2],
    &[2.95875854768068491816892993775e-2, 0.0, 8.87627564304205475450678981324e-2],
    &[
        2.41365134159266685502369798665e-1,
        0.0,
        -8.84549479328286085344864962717e-1,
        9.24834003261792003115737966543e-1,
    ],
    &[
        3.7037037037037037037037037037e-2,
        0.0,
        0.0,
        1.70828608729473871279604482173e-1,
        1.25467687566822425016691814123e-1,
    ],
    &[
        3.7109375e-2,
        0.0,
        0.0,
        1.70252211019544039314978060272e-1,
        6.02165389804559606850219397283e-2,
        -1.7578125e-2,
    ],
    &[
        3.70920001185047927108779319836e-2,
        0.0,
        0.0,
        1.70383925712239993810214054705e-1,
        1.07262030446373284651809199168e-1,
        -1.53194377486244017527936158236e-2,
        8.27378916381402288758473766002e-3,
    ],
    &[
        6.24110958716075717114429577812e-1,
        0.0,
        0.0,
        -3.36089262944694129406857109825,
        -8.68219346841726006818189891453e-1,
        2.75920996994467083049415600797e1,
        2.01540675504778934086186788979e1,
        -4.34898841810699588477366255144e1,
    ],
    &[
        4.77662536438264365890433908527e-1,
        0.0,
        0.0,
        -2.48811461997166764192642586468,
        -5.90290826836842996371446475743e-1,
        2.12300514481811942347288949897e1,
        1.52792336328824235832596922938e1,
        -3.32882109689848629194453265587e1,
        -2.03312017085086261358222928593e-2,
    ],
    &[
        -9.3714243008598732571704021658e-1,
        0.0,
        0.0,
        5.18637242884406370830023853209,
        1.09143734899672957818500254654,
        -8.14978701074692612513997267357,
        -1.85200656599969598641566180701e1,
        2.27394870993505042818970056734e1,
        2.49360555267965238987089396762,
        -3.0467644718982195003823669022,
    ],
    &[
        2.27331014751653820792359768449,
        0.0,
        0.0,
        -1.05344954667372501984066689879e1,
        -2.00087205822486249909675718444,
        -1.79589318631187989172765950534e1,
        2.79488845294199600508499808837e1,
        -2.85899827713502369474065508674,
        -8.87285693353062954433549289258,
        1.23605671757943030647266201528e1,
        6.43392746015763530355970484046e-1,
    ],
];

const B: [f64; 12] = [
    5.42937341165687622380535766363e-2,
    0.0,
    0.0,
    0.0,
    0.0,
    4.45031289275240888144113950566,
    1.89151789931450038304281599044,
    -5.8012039600105847814672114227,
    3.1116436695781989440891606237e-1,
    -1.52160949662516078556178806805e-1,
    2.01365400804030348374776537501e-1,
    4.47106157277725905176885569043e-2,
];

const ER: [f64; 12] = [
    0.1312004499419488073250102996e-1,
    0.0,
    0.0,
    0.0,
    0.0,
    -0.1225156446376204440720569753e1,
    -0.4957589496572501915214079952,
    0.1664377182454986536961530415e1,
    -0.3503288487499736816886487290,
    0.3341791187130174790297318841,
    0.8192320648511571246570742613e-1,
    -0.2235530786388629525884427845e-1,
];

const BHH: [f64; 3] = [
    0.244094488188976377952755905512,
    0.733846688281611857341361741547,
    0.220588235294117647058823529412e-1,
];

const SAFE: f64 = 0.9;
const FAC_MIN: f64 = 0.333;
const FAC_MAX: f64 = 6.0;

/// Integrates `y` in place from `t0` to `t1` (either direction).
pub fn integrate<S: ComplexSystem + ?Sized>(
    sys: &S,
    t0: f64,
    t1: f64,
    y: &mut [Complex64],
    opts: &OdeOptions,
) -> Result<OdeStats> {
    let n = sys.dim();
    assert_eq!(y.len(), n, "state length must match system dimension");
    let mut stats = OdeStats::default();
    if t0 == t1 {
        return Ok(stats);
    }
    let dir = (t1 - t0).signum();
    let zero = Complex64::new(0.0, 0.0);
    let mut k: Vec<Vec<Complex64>> = vec![vec![zero; n]; 12];
    let mut stage = vec![zero; n];
    let mut y_new = vec![zero; n];
    let mut k_next = vec![zero; n];

    let mut t = t0;
    sys.rhs(t, y, &mut k[0]);
    stats.evals += 1;

    let mut h = if opts.h_init > 0.0 {
        opts.h_init
    } else {
        initial_step(sys, t, y, &k[0], dir, opts, &mut stats)
    };
    h = h.min((t1 - t0).abs()).min(sys.max_step(t)) * dir;
    let mut reject = false;

    loop {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(DunklError::TooManySteps {
                max_steps: opts.max_steps,
                t,
                target: t1,
            });
        }
        if 0.1 * h.abs() <= t.abs() * f64::EPSILON {
            return Err(DunklError::StepUnderflow { t });
        }
        let mut last = false;
        if (t + 1.01 * h - t1) * dir > 0.0 {
            h = t1 - t;
            last = true;
        }

        for s in 1..12 {
            for i in 0..n {
                let mut acc = zero;
                for (j, &a) in A[s].iter().enumerate() {
                    if a != 0.0 {
                        acc += k[j][i] * a;
                    }
                }
                stage[i] = y[i] + acc * h;
            }
            sys.rhs(t + C[s] * h, &stage, &mut k[s]);
        }
        stats.evals += 11;

        let mut err = 0.0;
        let mut err2 = 0.0;
        for i in 0..n {
            let mut incr = zero;
            let mut e5 = zero;
            for s in 0..12 {
                if B[s] != 0.0 {
                    incr += k[s][i] * B[s];
                }
                if ER[s] != 0.0 {
                    e5 += k[s][i] * ER[s];
                }
            }
            y_new[i] = y[i] + incr * h;
            let sk = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
            let e3 = incr - k[0][i] * BHH[0] - k[8][i] * BHH[1] - k[11][i] * BHH[2];
            err2 += (e3.norm() / sk).powi(2);
            err += (e5.norm() / sk).powi(2);
        }
        let mut deno = err + 0.01 * err2;
        if deno <= 0.0 {
            deno = 1.0;
        }
        let err = h.abs() * err * (1.0 / (n as f64 * deno)).sqrt();
        if !err.is_finite() {
            return Err(DunklError::NonFinite(format!("ODE error estimate at t = {t}")));
        }

        let fac11 = err.powf(0.125);
        let fac = (fac11 / SAFE).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
        let mut h_new = h / fac;

        if err <= 1.0 {
            stats.accepted += 1;
            let t_new = if last { t1 } else { t + h };
            sys.rhs(t_new, &y_new, &mut k_next);
            stats.evals += 1;
            y.copy_from_slice(&y_new);
            std::mem::swap(&mut k[0], &mut k_next);
            t = t_new;
            if last {
                return Ok(stats);
            }
            let cap = sys.max_step(t);
            if h_new.abs() > cap {
                h_new = cap * dir;
            }
            if reject {
                h_new = dir * h_new.abs().min(h.abs());
            }
            reject = false;
        } else {
            stats.rejected += 1;
            h_new = h / (fac11 / SAFE).min(1.0 / FAC_MIN);
            reject = true;
        }
        h = h_new;
    }
}

fn initial_step<S: ComplexSystem + ?Sized>(
    sys: &S,
    t: f64,
    y: &[Complex64],
    f0: &[Complex64],
    dir: f64,
    opts: &OdeOptions,
    stats: &mut OdeStats,
) -> f64 {
    let n = y.len();
    let sk: Vec<f64> = y.iter().map(|v| opts.atol + opts.rtol * v.norm()).collect();
    let rms = |v: &[Complex64]| -> f64 {
        (v.iter()
            .zip(&sk)
            .map(|(a, s)| (a.norm() / s).powi(2))
            .sum::<f64>()
            / n as f64)
            .sqrt()
    };
    let dnf = rms(f0);
    let dny = rms(y);
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
        1e-6
    } else {
        0.01 * dny / dnf
    };
    h = h.min(sys.max_step(t));
    let y1: Vec<Complex64> = y.iter().zip(f0).map(|(a, b)| a + b * (h * dir)).collect();
    let mut f1 = vec![Complex64::new(0.0, 0.0); n];
    sys.rhs(t + h * dir, &y1, &mut f1);
    stats.evals += 1;
    let diff: Vec<Complex64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let der2 = rms(&diff) / h;
    let der12 = dnf.max(der2);
    let h1 = if der12 <= 1e-15 {
        (h * 1e-3).max(1e-6)
    } else {
        (0.01 / der12).powf(1.0 / 8.0)
    };
    (100.0 * h).min(h1)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Rotation {
        omega: f64,
    }

    impl ComplexSystem for Rotation {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, _t: f64, y: &[Complex64], dy: &mut [Complex64]) {
            dy[0] = Complex64::new(0.0, self.omega) * y[0];
        }
    }

    /// y' = -y/t + i y, exact solution y = e^{it} t0 y0 / t.
    struct Damped;

    impl ComplexSystem for Damped {
        fn dim(&self) -> usize {
            2
        }
        fn rhs(&self, t: f64, y: &[Complex64], dy: &mut [Complex64]) {
            for i in 0..2 {
                dy[i] = -y[i] / t + Complex64::new(0.0, 1.0 + i as f64) * y[i];
            }
        }
    }

    #[test]
    fn rotation_is_exact_to_tolerance() {
        let sys = Rotation { omega: 3.0 };
        let mut y = [Complex64::new(1.0, 0.0)];
        let stats = integrate(&sys, 0.0, 50.0, &mut y, &OdeOptions::default()).unwrap();
        let want = Complex64::new(0.0, 150.0).exp();
        assert!((y[0] - want).norm() < 1e-9, "{:?} vs {want}", y[0]);
        assert!(stats.accepted > 10);
    }

    #[test]
    fn damped_oscillator_forward_and_back() {
        let mut y = [Complex64::new(1.0, 0.0), Complex64::new(0.5, -0.5)];
        let y0 = y;
        integrate(&Damped, 1.0, 200.0, &mut y, &OdeOptions::default()).unwrap();
        for i in 0..2 {
            let w = 1.0 + i as f64;
            let want = y0[i] * Complex64::new(0.0, w * 199.0).exp() / 200.0;
            assert!((y[i] - want).norm() < 1e-11 * (1.0 + want.norm()) * 200.0);
        }
        integrate(&Damped, 200.0, 1.0, &mut y, &OdeOptions::default()).unwrap();
        for i in 0..2 {
            assert!((y[i] - y0[i]).norm() < 1e-9);
        }
    }

    #[test]
    fn step_budget_is_reported() {
        let sys = Rotation { omega: 100.0 };
        let mut y = [Complex64::new(1.0, 0.0)];
        let opts = OdeOptions {
            max_steps: 5,
            ..OdeOptions::default()
        };
        assert!(matches!(
            integrate(&sys, 0.0, 100.0, &mut y, &opts),
            Err(DunklError::TooManySteps { .. })
        ));
    }
}
