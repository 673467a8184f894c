//! Numerical sectoriality audits.
//!
//! A family of operators is uniformly sectorial of angle ω when
//! ‖λ R(λ, ·)‖ stays bounded over all λ outside every larger sector
//! |arg λ| > ω′ > ω. The audits below measure the ratio
//! ‖λ R(λ, ·) g‖_β / ‖g‖_β on supplied λ samples and compare it against the
//! closed-form bounds that hold on the Hölder scale:
//!
//! * backward difference ∇_h:  −1/cos ω′,
//! * extended operator A_h:    −1/cos ω′ + 4.
//!
//! For the extended audit the test function must live on a refinement of the
//! operator grid — on the operator grid itself the interpolation defect
//! (I − I_h)g vanishes identically and the audit would degenerate to the
//! ∇_h case. The audit coarsens the sample grid by [`EXTENDED_REFINE`].

use alloc::vec::Vec;

// Test builds link std, whose inherent f64 methods shadow these trait
// methods; non-test builds have no std and need the trait.
#[allow(unused_imports)]
use num_traits::Float;

use super::{resolvent_nabla, ComplexGridFn, ComplexScalar, OpsError};
use crate::grid::{max_quotient_by, GridFn, HolderExponent, UniformGrid};
use crate::rng::SplitMix64;

/// Refinement factor between the sample grid and the operator grid in the
/// extended audit.
pub const EXTENDED_REFINE: usize = 4;

/// Which operator family the audit exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuditOperator {
    Nabla,
    Extended,
}

/// One measured sample: λ and ‖λ R(λ,·) g‖_β / ‖g‖_β.
#[derive(Debug, Clone, Copy)]
pub struct AuditSample {
    pub lambda: ComplexScalar,
    pub ratio: f64,
}

/// Result of a sectoriality audit over a sample set.
#[derive(Debug, Clone)]
pub struct SectorialAuditReport {
    pub omega_prime: f64,
    pub bound: f64,
    pub max_ratio: f64,
    pub samples: Vec<AuditSample>,
}

impl SectorialAuditReport {
    /// Bound check with a 1e-9 relative allowance for rounding.
    pub fn pass(&self) -> bool {
        self.max_ratio <= self.bound * (1.0 + 1e-9)
    }
}

/// The sectorial bound for a given operator and angle.
pub fn sectorial_bound(which: AuditOperator, omega_prime: f64) -> f64 {
    let base = -1.0 / omega_prime.cos();
    match which {
        AuditOperator::Nabla => base,
        AuditOperator::Extended => base + 4.0,
    }
}

/// Random polygonal test function anchored at the origin, values in [−1, 1).
pub fn random_holder_fn(grid: UniformGrid, rng: &mut SplitMix64) -> GridFn {
    let mut values = Vec::with_capacity(grid.num_nodes());
    values.push(0.0);
    for _ in 1..grid.num_nodes() {
        values.push(rng.next_symmetric());
    }
    GridFn::new(grid, values).expect("bounded values are finite")
}

fn check_outside_sector(lambda: ComplexScalar, omega_prime: f64) -> Result<(), OpsError> {
    if lambda.norm() == 0.0 || lambda.arg().abs() < omega_prime - 1e-12 {
        return Err(OpsError::SampleInsideSector {
            lambda,
            omega_prime,
        });
    }
    Ok(())
}

/// Measures ‖λ R(λ, ·) g‖_β / ‖g‖_β for every λ in `lambdas` and reports the
/// worst ratio together with the sectorial bound for `omega_prime`.
///
/// Preconditions: π/2 < ω′ ≤ π and every sample satisfies |arg λ| ≥ ω′.
pub fn sectorial_audit(
    which: AuditOperator,
    g: &GridFn,
    beta: HolderExponent,
    omega_prime: f64,
    lambdas: &[ComplexScalar],
) -> Result<SectorialAuditReport, OpsError> {
    if omega_prime <= core::f64::consts::FRAC_PI_2
        || omega_prime > core::f64::consts::PI
        || omega_prime.is_nan()
    {
        return Err(OpsError::InvalidAngle { omega_prime });
    }
    let bound = sectorial_bound(which, omega_prime);
    let norm = g.holder_seminorm(beta);

    let mut samples = Vec::with_capacity(lambdas.len());
    let mut max_ratio = 0.0f64;
    for &lambda in lambdas {
        check_outside_sector(lambda, omega_prime)?;
        let ratio = if norm == 0.0 {
            0.0
        } else {
            match which {
                AuditOperator::Nabla => nabla_ratio(lambda, g, beta, norm)?,
                AuditOperator::Extended => extended_ratio(lambda, g, beta, norm)?,
            }
        };
        max_ratio = max_ratio.max(ratio);
        samples.push(AuditSample { lambda, ratio });
    }

    Ok(SectorialAuditReport {
        omega_prime,
        bound,
        max_ratio,
        samples,
    })
}

fn nabla_ratio(
    lambda: ComplexScalar,
    g: &GridFn,
    beta: HolderExponent,
    norm: f64,
) -> Result<f64, OpsError> {
    let r = resolvent_nabla(lambda, g)?;
    let scaled: Vec<ComplexScalar> = r.values().iter().map(|&v| lambda * v).collect();
    let seminorm = max_quotient_by(&scaled, g.grid().h(), beta.get(), g.grid().n(), |a, b| {
        (a - b).norm()
    });
    Ok(seminorm / norm)
}

fn extended_ratio(
    lambda: ComplexScalar,
    g: &GridFn,
    beta: HolderExponent,
    norm: f64,
) -> Result<f64, OpsError> {
    let fine = g.grid();
    let factor = EXTENDED_REFINE;
    if fine.n() % factor != 0 || fine.n() / factor == 0 {
        return Err(OpsError::RefinementMismatch {
            n: fine.n(),
            factor,
        });
    }
    let coarse = UniformGrid::new(fine.h() * factor as f64)?;
    if coarse.n() != fine.n() / factor {
        return Err(OpsError::RefinementMismatch {
            n: fine.n(),
            factor,
        });
    }
    let coarse_values: Vec<f64> = (0..=coarse.n()).map(|k| g.value(k * factor)).collect();
    let g_coarse = GridFn::new(coarse, coarse_values)?;
    let r_coarse = resolvent_nabla(lambda, &g_coarse)?;

    // λ·R(λ, A_h) g on the fine nodes: the interpolated coarse resolvent plus
    // the interpolation defect of g itself (the 1/λ prefactor cancels).
    let mut values = Vec::with_capacity(fine.num_nodes());
    for m in 0..=fine.n() {
        let q = m / factor;
        let rem = m % factor;
        let (smooth, coarse_at) = if rem == 0 {
            (r_coarse.value(q), g_coarse.value(q))
        } else {
            let w = rem as f64 / factor as f64;
            (
                r_coarse.value(q + 1).scale(w) + r_coarse.value(q).scale(1.0 - w),
                w * g_coarse.value(q + 1) + (1.0 - w) * g_coarse.value(q),
            )
        };
        let defect = g.value(m) - coarse_at;
        values.push(lambda * smooth + ComplexScalar::new(defect, 0.0));
    }
    let fine_fn = ComplexGridFn::new(fine, values)?;
    Ok(fine_fn.holder_seminorm(beta) / norm)
}
