//! Dunkl kernels `E_k(x, y)` for finite reflection groups.
//!
//! The crate evaluates the whole orbit vector `(E_k(tx, g·y))_{g∈G}` at once,
//! either from the orbit-coupled power series or by continuing it with an
//! adaptive Runge–Kutta march, and ships a sampling harness that estimates
//! the constants in the standard kernel bounds:
//!
//! * `|E_k(zx, y)| ≤ e^{Re(z)⟨x⁺, y⁺⟩}`,
//! * `E_k(x, g·y) ≤ C e^{⟨x,y⟩} / √(w_k(x) w_k(y))` on simplicial cones inside the chamber,
//! * `|E_k(ix, g·y)| ≤ c / √(w_k(x) w_k(y))` on the truncated cones `C_δ`,
//!
//! together with the limit vector `v_g` of the normalized oscillatory kernel.
//!
//! Module map:
//!
//! | module | contents |
//! |---|---|
//! | [`rootsys`] | root systems, Weyl groups, `w_k`, orbit representatives |
//! | [`kernel1d`] | rank-one kernel: double-double series oracle and ₁F₁ forms |
//! | [`kernel`] | general-group evaluator (series + ODE continuation) |
//! | [`geometry`] | chamber, `C_δ`, simplicial cones and the covering search |
//! | [`verify`] | sampled verification of every bound |
//! | [`asymptotics`] | normalized kernel `F_g`, its ODE along curves, limit vectors |
//! | [`cli`] | configuration and the `dunkl` command-line front end |

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod kernel;
pub mod kernel1d;
pub mod linalg;
pub mod ode;
pub mod rootsys;
pub mod sampling;
pub mod verify;

mod ddouble;

pub use error::{DunklError, Result};
pub use kernel::{DunklKernel, EvalOptions, KernelEvaluation, OrbitVector};
pub use rootsys::{Family, GroupElement, ReflectionGroup, RootSystem};
