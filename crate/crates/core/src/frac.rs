//! Fractional powers of the backward-difference operators, the closed-form
//! fractional derivatives used as references, and quadrature oracles that are
//! kept independent of those closed forms.
//!
//! The fractional backward difference of order α ∈ (0, 1) is the discrete
//! convolution
//!
//! ```text
//! (∇_h^α f)(t_k) = h^{−α} · Σ_{j=0}^{k} (−1)^j C(α, j) f(t_{k−j}),
//! ```
//!
//! with the fractional binomial weights built by [`crate::specfn::gl_weights`].
//! Truncating at j = k extends the data by zero left of the origin, matching
//! the convention of the resolvents in [`crate::ops`]. The fractional extended
//! operator A_h^α is the linear interpolant of those nodal values.

use core::fmt;

use alloc::vec::Vec;

// Test builds link std, whose inherent f64 methods shadow these trait
// methods; non-test builds have no std and need the trait.
#[allow(unused_imports)]
use num_traits::Float;

use crate::grid::GridFn;
use crate::ops::{interpolate, OpsError};
use crate::quad::tanh_sinh_01;
use crate::specfn::{digamma_raw, gl_weights, ln_gamma_raw};

pub use crate::specfn::FracOrder;

/// Errors from the fractional operators and their quadrature oracles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FracError {
    /// Scalar argument outside its stated domain.
    Domain {
        what: &'static str,
        value: f64,
    },
    /// Quadrature refinement stalled before the target accuracy.
    QuadratureTolerance {
        estimate: f64,
        achieved_rel: f64,
        target_rel: f64,
    },
    Ops(OpsError),
}

impl fmt::Display for FracError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Domain { what, value } => write!(f, "{what}: {value} outside domain"),
            Self::QuadratureTolerance {
                estimate,
                achieved_rel,
                target_rel,
            } => write!(
                f,
                "quadrature stalled at relative error {achieved_rel:.3e} (target {target_rel:.0e}); estimate {estimate}"
            ),
            Self::Ops(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for FracError {}

impl From<OpsError> for FracError {
    fn from(e: OpsError) -> Self {
        Self::Ops(e)
    }
}

/// Fractional backward difference ∇_h^α at the grid nodes.
///
/// Expects data anchored at the origin (v_0 = 0) when it is to represent a
/// Hölder-space element.
pub fn frac_nabla(g: &GridFn, alpha: FracOrder) -> GridFn {
    let n = g.grid().n();
    let w = gl_weights(alpha, n);
    let w = w.as_slice();
    let v = g.values();
    let scale = g.grid().h().powf(-alpha.get());
    let mut out = Vec::with_capacity(v.len());
    for k in 0..v.len() {
        let mut acc = 0.0;
        for j in 0..=k {
            acc += w[j] * v[k - j];
        }
        out.push(scale * acc);
    }
    GridFn::new(g.grid(), out).expect("finite convolution")
}

/// Fractional extended operator A_h^α = I_h ∇_h^α evaluated at `x ∈ [0, 1]`.
///
/// Recomputes the nodal convolution; when evaluating at many points, call
/// [`frac_nabla`] once and interpolate the result instead.
pub fn frac_extended_nabla(g: &GridFn, alpha: FracOrder, x: f64) -> Result<f64, FracError> {
    Ok(interpolate(&frac_nabla(g, alpha), x)?)
}

const BALAKRISHNAN_TARGET: f64 = 1e-8;

/// Quadrature value of ∫_0^∞ λ^{α−1} (1 + λh)^{−(j+1)} dλ.
///
/// The substitution u = λh/(1+λh) maps the ray onto (0, 1) and leaves
/// h^{−α} · ∫_0^1 u^{α−1} (1−u)^{j−α} du, a doubly endpoint-singular but
/// integrable Beta integrand that the tanh-sinh rule absorbs. Serves as the
/// independent check of the closed form h^{−α} Γ(j+1−α) Γ(α) / Γ(j+1).
pub fn balakrishnan_weight_oracle(j: usize, alpha: FracOrder, h: f64) -> Result<f64, FracError> {
    if !(h > 0.0 && h < 1.0) {
        return Err(FracError::Domain {
            what: "balakrishnan_weight_oracle step",
            value: h,
        });
    }
    let a = alpha.get();
    let jf = j as f64;
    let q = tanh_sinh_01(|u, um1| u.powf(a - 1.0) * um1.powf(jf - a), 1e-10, 12);
    if q.rel_error > BALAKRISHNAN_TARGET {
        return Err(FracError::QuadratureTolerance {
            estimate: h.powf(-a) * q.value,
            achieved_rel: q.rel_error,
            target_rel: BALAKRISHNAN_TARGET,
        });
    }
    Ok(h.powf(-a) * q.value)
}

/// Closed-form fractional derivative of the power t^μ:
/// Γ(μ+1)/Γ(μ+1−α) · x^{μ−α}. Defined by continuity as 0 at x = 0.
pub fn exact_frac_deriv_power(mu: f64, alpha: FracOrder, x: f64) -> f64 {
    let a = alpha.get();
    assert!(mu > a, "exact_frac_deriv_power requires mu > alpha");
    assert!((0.0..=1.0).contains(&x));
    if x == 0.0 {
        return 0.0;
    }
    let c = (ln_gamma_raw(mu + 1.0) - ln_gamma_raw(mu + 1.0 - a)).exp();
    c * x.powf(mu - a)
}

/// Closed-form fractional derivative of t^μ ln t:
/// Γ(μ+1)/Γ(μ+1−α) · x^{μ−α} · (ln x + ψ(μ+1) − ψ(μ+1−α)).
/// Defined by continuity as 0 at x = 0 (the power dominates the logarithm).
pub fn exact_frac_deriv_power_log(mu: f64, alpha: FracOrder, x: f64) -> f64 {
    let a = alpha.get();
    assert!(mu > a, "exact_frac_deriv_power_log requires mu > alpha");
    assert!((0.0..=1.0).contains(&x));
    if x == 0.0 {
        return 0.0;
    }
    let c = (ln_gamma_raw(mu + 1.0) - ln_gamma_raw(mu + 1.0 - a)).exp();
    c * x.powf(mu - a) * (x.ln() + digamma_raw(mu + 1.0) - digamma_raw(mu + 1.0 - a))
}

/// The sample function t^μ ln t with its continuous extension 0 at t = 0.
pub fn power_log_value(mu: f64, x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.powf(mu) * x.ln()
    }
}

const RL_TARGET: f64 = 1e-8;

/// Quadrature oracle for the fractional derivative in integral form:
///
/// ```text
/// (1/Γ(1−α)) ∫_0^x (x − t)^{−α} f'(t) dt .
/// ```
///
/// The substitution s = (x−t)^{1−α} removes the kernel singularity at t = x,
/// leaving x^{1−α}/Γ(2−α) · ∫_0^1 f'(x·(1 − u^{1/(1−α)})) du, which tanh-sinh
/// refinement integrates even when f' itself blows up integrably at t = 0.
/// Independent of the gamma-based closed forms it validates.
pub fn rl_quadrature_oracle<F: Fn(f64) -> f64>(
    fprime: F,
    alpha: FracOrder,
    x: f64,
) -> Result<f64, FracError> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(FracError::Domain {
            what: "rl_quadrature_oracle point",
            value: x,
        });
    }
    let a = alpha.get();
    let power = 1.0 / (1.0 - a);
    let integrand = |u: f64, um1: f64| {
        // t = x·(1 − u^{1/(1−α)}), with the log taken on whichever of u, 1−u
        // is accurate.
        let ln_u = if u <= 0.5 { u.ln() } else { (-um1).ln_1p() };
        let t = (x * -(power * ln_u).exp_m1()).clamp(0.0, x);
        fprime(t)
    };
    let q = tanh_sinh_01(integrand, 1e-9, 12);
    let scale = x.powf(1.0 - a) / ln_gamma_raw(2.0 - a).exp();
    if q.rel_error > RL_TARGET {
        return Err(FracError::QuadratureTolerance {
            estimate: scale * q.value,
            achieved_rel: q.rel_error,
            target_rel: RL_TARGET,
        });
    }
    Ok(scale * q.value)
}
