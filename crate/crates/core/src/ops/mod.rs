//! Discrete operators on grid functions: the backward difference, its
//! piecewise-linear (polygonal) extension, their resolvents, and the
//! numerical sectoriality audits built on top of them.
//!
//! The backward difference is
//!
//! ```text
//! (∇_h f)(x) = (f(x) − f(x−h)) / h        for x ≥ h,
//! (∇_h f)(x) = f(x) / h                   for 0 < x < h,
//! ```
//!
//! with the node-0 value taken as v_0/h, which vanishes for grid functions
//! anchored at the origin. The extended operator A_h is the polygonal line
//! through the nodal backward differences, A_h = I_h ∇_h, where I_h is the
//! linear interpolant. I_h commutes with ∇_h and is idempotent, so the
//! resolvent of A_h is I_h R(λ, ∇_h) + (1/λ)(I − I_h).

use alloc::vec::Vec;
use core::fmt;

// Test builds link std, whose inherent f64 methods shadow these trait
// methods; non-test builds have no std and need the trait.
#[allow(unused_imports)]
use num_traits::Float;

use crate::grid::{max_quotient_by, GridError, GridFn, HolderExponent, UniformGrid};
use num_complex::Complex;

mod audit;

pub use audit::{
    random_holder_fn, sectorial_audit, sectorial_bound, AuditOperator, AuditSample,
    SectorialAuditReport, EXTENDED_REFINE,
};

/// Scalar λ in the resolvent (λI − B)^{-1}.
pub type ComplexScalar = Complex<f64>;

/// Errors from operator evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OpsError {
    /// Evaluation point outside `[0, 1]`.
    Domain {
        x: f64,
    },
    /// λ makes the resolvent singular (λ = 1/h for ∇_h, additionally λ = 0 for A_h).
    SingularResolvent {
        lambda: ComplexScalar,
    },
    /// Audit sample falls inside the sector it is supposed to avoid.
    SampleInsideSector {
        lambda: ComplexScalar,
        omega_prime: f64,
    },
    /// Audit angle outside (π/2, π].
    InvalidAngle {
        omega_prime: f64,
    },
    /// Grid of the audit function cannot be coarsened by the refinement factor.
    RefinementMismatch {
        n: usize,
        factor: usize,
    },
    Grid(GridError),
}

impl fmt::Display for OpsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Domain { x } => write!(f, "evaluation point {x} outside [0, 1]"),
            Self::SingularResolvent { lambda } => {
                write!(f, "resolvent singular at lambda = {lambda}")
            }
            Self::SampleInsideSector {
                lambda,
                omega_prime,
            } => write!(
                f,
                "sample {lambda} lies inside the sector of angle {omega_prime}"
            ),
            Self::InvalidAngle { omega_prime } => {
                write!(f, "audit angle {omega_prime} outside (pi/2, pi]")
            }
            Self::RefinementMismatch { n, factor } => {
                write!(f, "grid with n = {n} is not a {factor}-fold refinement")
            }
            Self::Grid(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for OpsError {}

impl From<GridError> for OpsError {
    fn from(e: GridError) -> Self {
        Self::Grid(e)
    }
}

/// Complex-valued grid function, produced by the resolvents.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGridFn {
    grid: UniformGrid,
    values: Vec<ComplexScalar>,
}

impl ComplexGridFn {
    pub fn new(grid: UniformGrid, values: Vec<ComplexScalar>) -> Result<Self, GridError> {
        if values.len() != grid.num_nodes() {
            return Err(GridError::LengthMismatch {
                expected: grid.num_nodes(),
                got: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    #[inline]
    pub fn grid(&self) -> UniformGrid {
        self.grid
    }

    #[inline]
    pub fn values(&self) -> &[ComplexScalar] {
        &self.values
    }

    #[inline]
    pub fn value(&self, k: usize) -> ComplexScalar {
        self.values[k]
    }

    /// Hölder seminorm of the polygonal extension, with complex modulus in
    /// the numerator.
    pub fn holder_seminorm(&self, beta: HolderExponent) -> f64 {
        max_quotient_by(
            &self.values,
            self.grid.h(),
            beta.get(),
            self.grid.n(),
            |a, b| (a - b).norm(),
        )
    }
}

/// Backward difference: output\[k\] = (v_k − v_{k−1})/h for k ≥ 1,
/// output\[0\] = v_0/h.
pub fn nabla(g: &GridFn) -> GridFn {
    let h = g.grid().h();
    let v = g.values();
    let mut out = Vec::with_capacity(v.len());
    out.push(v[0] / h);
    for k in 1..v.len() {
        out.push((v[k] - v[k - 1]) / h);
    }
    GridFn::new(g.grid(), out).expect("finite input gives finite differences")
}

enum Location {
    Node(usize),
    /// Segment [t_{k−1}, t_k] with the convex weight of the right endpoint;
    /// weights outside [0, 1] extend the last segment linearly.
    Segment {
        k: usize,
        w_right: f64,
    },
}

fn locate(grid: UniformGrid, x: f64) -> Result<Location, OpsError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(OpsError::Domain { x });
    }
    if x == 0.0 {
        return Ok(Location::Node(0));
    }
    let n = grid.n();
    let guess = (x / grid.h()).floor() as usize;
    if guess <= n && grid.node(guess) == x {
        return Ok(Location::Node(guess));
    }
    // Points beyond t_n (possible when n·h < 1) extend the last segment.
    let k = (guess + 1).min(n);
    Ok(Location::Segment {
        k,
        w_right: (x - grid.node(k - 1)) / grid.h(),
    })
}

/// Piecewise-linear interpolant of the grid values at `x ∈ [0, 1]`:
/// ((x − t_{k−1})/h)·v_k + ((t_k − x)/h)·v_{k−1} on the covering segment.
pub fn interpolate(g: &GridFn, x: f64) -> Result<f64, OpsError> {
    match locate(g.grid(), x)? {
        Location::Node(k) => Ok(g.value(k)),
        Location::Segment { k, w_right } => {
            Ok(w_right * g.value(k) + (1.0 - w_right) * g.value(k - 1))
        }
    }
}

fn interpolate_complex(g: &ComplexGridFn, x: f64) -> Result<ComplexScalar, OpsError> {
    match locate(g.grid(), x)? {
        Location::Node(k) => Ok(g.value(k)),
        Location::Segment { k, w_right } => {
            Ok(g.value(k).scale(w_right) + g.value(k - 1).scale(1.0 - w_right))
        }
    }
}

/// Nodal values of the extended operator A_h = I_h ∇_h. They coincide with
/// [`nabla`]; the returned vertices together with [`interpolate`] realise
/// A_h f everywhere on `[0, 1]`.
pub fn extended_nabla(g: &GridFn) -> GridFn {
    nabla(g)
}

/// A_h f evaluated at an arbitrary point of `[0, 1]`.
pub fn extended_nabla_at(g: &GridFn, x: f64) -> Result<f64, OpsError> {
    interpolate(&nabla(g), x)
}

/// Resolvent of the backward difference at the grid nodes:
///
/// ```text
/// R(λ, ∇_h) f (t_k) = −h · Σ_{j=0}^{k} (1 − λh)^{−(j+1)} v_{k−j}
/// ```
///
/// The sum is truncated at j = k, which extends the data by zero left of the
/// origin and makes the resolvent identity (λI − ∇_h) R(λ, ∇_h) g = g hold
/// exactly on the grid. The partial sums are advanced by the one-step
/// recurrence r_k = q·(r_{k−1} − h·v_k) with q = (1 − λh)^{−1}, which is the
/// same convolution without explicit powers.
pub fn resolvent_nabla(lambda: ComplexScalar, g: &GridFn) -> Result<ComplexGridFn, OpsError> {
    let h = g.grid().h();
    let denom = ComplexScalar::new(1.0, 0.0) - lambda.scale(h);
    if denom.norm() == 0.0 {
        return Err(OpsError::SingularResolvent { lambda });
    }
    let q = denom.finv();
    let v = g.values();
    let mut out = Vec::with_capacity(v.len());
    let mut r = q.scale(-h * v[0]);
    out.push(r);
    for &vk in &v[1..] {
        r = q * (r - ComplexScalar::new(h * vk, 0.0));
        out.push(r);
    }
    Ok(ComplexGridFn {
        grid: g.grid(),
        values: out,
    })
}

/// Nodal values of the resolvent of A_h. Because the interpolation error
/// (I − I_h) vanishes at the nodes, these equal [`resolvent_nabla`]; the
/// off-node part needs a continuous representative, see
/// [`resolvent_extended_at`].
pub fn resolvent_extended(lambda: ComplexScalar, g: &GridFn) -> Result<ComplexGridFn, OpsError> {
    if lambda.norm() == 0.0 {
        return Err(OpsError::SingularResolvent { lambda });
    }
    resolvent_nabla(lambda, g)
}

/// R(λ, A_h) f at an arbitrary point, for data with a continuous
/// representative `f`:
///
/// ```text
/// R(λ, A_h) f (x) = I_h (R(λ, ∇_h) f)(x) + (1/λ)(f(x) − (I_h f)(x))
/// ```
pub fn resolvent_extended_at<F: Fn(f64) -> f64>(
    lambda: ComplexScalar,
    g: &GridFn,
    continuous: F,
    x: f64,
) -> Result<ComplexScalar, OpsError> {
    if lambda.norm() == 0.0 {
        return Err(OpsError::SingularResolvent { lambda });
    }
    let nodal = resolvent_nabla(lambda, g)?;
    let smooth = interpolate_complex(&nodal, x)?;
    let remainder = continuous(x) - interpolate(g, x)?;
    Ok(smooth + lambda.finv().scale(remainder))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridFn, HolderExponent, UniformGrid};
    use crate::rng::SplitMix64;
    use alloc::vec;

    fn beta(b: f64) -> HolderExponent {
        HolderExponent::new(b).unwrap()
    }

    #[test]
    fn nabla_basics() {
        let g = UniformGrid::new(0.25).unwrap();
        let id = GridFn::sample(g, |x| x).unwrap();
        let d = nabla(&id);
        assert_eq!(d.value(0), 0.0);
        for k in 1..=4 {
            assert!((d.value(k) - 1.0).abs() < 1e-15);
        }

        let sq = GridFn::sample(g, |x| x * x).unwrap();
        let d = nabla(&sq);
        assert!((d.value(2) - 0.75).abs() < 1e-15);

        let z = GridFn::zeros(g);
        assert!(nabla(&z).values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn interpolation_reproduces_nodes_and_midpoints() {
        let grid = UniformGrid::new(0.25).unwrap();
        let f = GridFn::sample(grid, |x| x * x * x - x).unwrap();
        for k in 0..=grid.n() {
            assert_eq!(interpolate(&f, grid.node(k)).unwrap(), f.value(k));
        }
        for k in 1..=grid.n() {
            let mid = 0.5 * (grid.node(k - 1) + grid.node(k));
            let want = 0.5 * (f.value(k - 1) + f.value(k));
            assert!((interpolate(&f, mid).unwrap() - want).abs() < 1e-15);
        }
        // Linear data reproduce exactly everywhere.
        let lin = GridFn::sample(grid, |x| 3.0 * x - 0.5).unwrap();
        let mut x = 0.0;
        while x <= 1.0 {
            assert!((interpolate(&lin, x).unwrap() - (3.0 * x - 0.5)).abs() < 1e-14);
            x += 0.013;
        }
        assert!(interpolate(&lin, -0.1).is_err());
        assert!(interpolate(&lin, 1.1).is_err());
    }

    #[test]
    fn interpolation_extends_past_last_node() {
        // h = 0.3 has n = 3, t_3 = 0.9 < 1; x ∈ (0.9, 1] extends the last segment.
        let grid = UniformGrid::new(0.3).unwrap();
        let lin = GridFn::sample(grid, |x| 2.0 * x + 1.0).unwrap();
        assert!((interpolate(&lin, 0.95).unwrap() - 2.9).abs() < 1e-14);
        assert!((interpolate(&lin, 1.0).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn extended_nabla_polygonal_values() {
        let grid = UniformGrid::new(0.25).unwrap();
        let id = GridFn::sample(grid, |x| x).unwrap();
        let a = extended_nabla(&id);
        assert_eq!(a.value(0), 0.0);
        assert!((a.value(1) - 1.0).abs() < 1e-15);

        // f = x², midpoint of [t_1, t_2]: average of the nodal differences.
        let sq = GridFn::sample(grid, |x| x * x).unwrap();
        let v = extended_nabla_at(&sq, 0.375).unwrap();
        assert!((v - 0.5).abs() < 1e-15, "{v}");
    }

    #[test]
    fn extended_nabla_operator_bound() {
        // ‖A_h g‖_β ≤ (2/h)·‖g‖_β for polygonal data.
        let mut rng = SplitMix64::new(9);
        for m in 3..=6 {
            let grid = UniformGrid::dyadic(m).unwrap();
            let g = random_holder_fn(grid, &mut rng);
            let b = beta(0.35);
            let lhs = extended_nabla(&g).holder_seminorm(b);
            let rhs = 2.0 / grid.h() * g.holder_seminorm(b);
            assert!(lhs <= rhs * (1.0 + 1e-12), "m={m}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn interpolant_commutes_with_nabla() {
        // I_h ∇_h and ∇_h I_h agree wherever both are defined: at nodes the
        // interpolant reproduces values, and mid-segment both reduce to
        // (v_k − v_{k−2})/(2h).
        let grid = UniformGrid::new(0.125).unwrap();
        let g = GridFn::sample(grid, |x| x * x * x - 0.3 * x).unwrap();
        let d = nabla(&g);
        for k in 2..=grid.n() {
            let mid = 0.5 * (grid.node(k - 1) + grid.node(k));
            let lhs = interpolate(&d, mid).unwrap();
            let rhs = (interpolate(&g, mid).unwrap() - interpolate(&g, mid - grid.h()).unwrap())
                / grid.h();
            assert!((lhs - rhs).abs() <= 1e-14, "k={k}: {lhs} vs {rhs}");
        }
        // Nodal equality is exact.
        for k in 0..=grid.n() {
            assert_eq!(interpolate(&d, grid.node(k)).unwrap(), d.value(k));
        }
    }

    #[test]
    fn interpolant_idempotent_at_nodes() {
        let grid = UniformGrid::new(0.2).unwrap();
        let g = GridFn::sample(grid, |x| (4.0 * x).sin()).unwrap();
        let once: Vec<f64> = (0..=grid.n())
            .map(|k| interpolate(&g, grid.node(k)).unwrap())
            .collect();
        let resampled = GridFn::new(grid, once.clone()).unwrap();
        let twice: Vec<f64> = (0..=grid.n())
            .map(|k| interpolate(&resampled, grid.node(k)).unwrap())
            .collect();
        assert_eq!(once, twice);
    }

    fn resolvent_identity_defect(lambda: ComplexScalar, g: &GridFn) -> f64 {
        let r = resolvent_nabla(lambda, g).unwrap();
        let h = g.grid().h();
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for k in 0..=g.grid().n() {
            let dr = if k == 0 {
                r.value(0).scale(1.0 / h)
            } else {
                (r.value(k) - r.value(k - 1)).scale(1.0 / h)
            };
            let lhs = lambda * r.value(k) - dr;
            worst = worst.max((lhs - ComplexScalar::new(g.value(k), 0.0)).norm());
            scale = scale.max(g.value(k).abs());
        }
        worst / scale.max(1e-300)
    }

    #[test]
    fn resolvent_satisfies_defining_identity() {
        let grid = UniformGrid::dyadic(6).unwrap();
        let mut rng = SplitMix64::new(3);
        let g = random_holder_fn(grid, &mut rng);
        for lambda in [
            ComplexScalar::new(-1.0, 0.0),
            ComplexScalar::new(-10.0, 0.0),
            ComplexScalar::new(3.0, 4.0),
        ] {
            let defect = resolvent_identity_defect(lambda, &g);
            assert!(defect <= 1e-10, "lambda={lambda}: defect {defect}");
        }
    }

    #[test]
    fn resolvent_zero_and_singularity() {
        let grid = UniformGrid::new(0.25).unwrap();
        let z = GridFn::zeros(grid);
        let r = resolvent_nabla(ComplexScalar::new(-2.0, 1.0), &z).unwrap();
        assert!(r.values().iter().all(|v| v.norm() == 0.0));

        let singular = ComplexScalar::new(4.0, 0.0); // 1/h
        let g = GridFn::sample(grid, |x| x).unwrap();
        assert!(matches!(
            resolvent_nabla(singular, &g),
            Err(OpsError::SingularResolvent { .. })
        ));
        assert!(matches!(
            resolvent_extended(ComplexScalar::new(0.0, 0.0), &g),
            Err(OpsError::SingularResolvent { .. })
        ));
    }

    #[test]
    fn resolvent_geometric_series_bound() {
        // ‖R(λ,∇_h)g‖_β ≤ h/(|1−λh|−1)·‖g‖_β whenever |1−λh| > 1.
        let grid = UniformGrid::dyadic(5).unwrap();
        let mut rng = SplitMix64::new(11);
        let g = random_holder_fn(grid, &mut rng);
        let b = beta(0.2);
        let norm = g.holder_seminorm(b);
        for lambda in [
            ComplexScalar::new(-3.0, 0.0),
            ComplexScalar::new(-0.5, 7.0),
            ComplexScalar::new(-40.0, -3.0),
        ] {
            let mag = (ComplexScalar::new(1.0, 0.0) - lambda.scale(grid.h())).norm();
            assert!(mag > 1.0);
            let r = resolvent_nabla(lambda, &g).unwrap();
            let bound = grid.h() / (mag - 1.0) * norm;
            let got = r.holder_seminorm(b);
            assert!(got <= bound * (1.0 + 1e-12), "{lambda}: {got} vs {bound}");
        }
    }

    #[test]
    fn extended_resolvent_matches_nodal_and_identity() {
        let grid = UniformGrid::dyadic(4).unwrap();
        let g = GridFn::sample(grid, |x| x.powf(0.6)).unwrap();
        let lambda = ComplexScalar::new(-2.0, 5.0);
        let rn = resolvent_nabla(lambda, &g).unwrap();
        let re = resolvent_extended(lambda, &g).unwrap();
        assert_eq!(rn.values(), re.values());

        // At the nodes the continuous remainder vanishes.
        let at_node = resolvent_extended_at(lambda, &g, |x| x.powf(0.6), grid.node(3)).unwrap();
        assert!((at_node - rn.value(3)).norm() < 1e-13);

        // Off the nodes, (I − I_h)f contributes 1/λ times the defect.
        let x = 0.4 * grid.h() + grid.node(2);
        let got = resolvent_extended_at(lambda, &g, |x| x.powf(0.6), x).unwrap();
        let defect = x.powf(0.6) - interpolate(&g, x).unwrap();
        let want = interpolate_complex(&rn, x).unwrap() + lambda.finv().scale(defect);
        assert!((got - want).norm() < 1e-14);
    }

    #[test]
    fn non_convergence_witness() {
        // For the cusp sample x^β the polygonal differences at x = h/2 stay
        // separated by at least (1/2)^{β−1} − 1/2 across all step sizes.
        let b = 0.4f64;
        let gap = 0.5f64.powf(b - 1.0) - 0.5;
        for m in 3..=10 {
            let fine = UniformGrid::dyadic(m + 1).unwrap();
            let coarse = UniformGrid::dyadic(m).unwrap();
            let f_c = GridFn::sample(coarse, |x| x.powf(b)).unwrap();
            let f_f = GridFn::sample(fine, |x| x.powf(b)).unwrap();
            let x = 0.5 * coarse.h();
            let a_c = extended_nabla_at(&f_c, x).unwrap();
            let a_f = extended_nabla_at(&f_f, x).unwrap();
            assert!(
                (a_c - a_f).abs() >= gap * (1.0 - 1e-12),
                "m={m}: {} < {gap}",
                (a_c - a_f).abs()
            );
        }
    }

    #[test]
    fn interpolation_remainder_bound() {
        // ‖f − I_h f‖_β ≤ 4·ω_β(f, h) measured on a 4× finer grid.
        let b = beta(0.1);
        for m in 4..=8 {
            let coarse = UniformGrid::dyadic(m).unwrap();
            let fine = UniformGrid::dyadic(m + 2).unwrap();
            let f = |x: f64| x * x;
            let f_c = GridFn::sample(coarse, f).unwrap();
            let f_f = GridFn::sample(fine, f).unwrap();
            let ih: Vec<f64> = (0..=fine.n())
                .map(|k| interpolate(&f_c, fine.node(k)).unwrap())
                .collect();
            let ih = GridFn::new(fine, ih).unwrap();
            let lhs = f_f.holder_error(&ih, b).unwrap();
            let omega = f_f.modulus(b, coarse.h());
            assert!(lhs <= 4.0 * omega * 1.05, "m={m}: {lhs} vs {}", 4.0 * omega);
        }
    }

    #[test]
    fn strong_convergence_of_extended_nabla() {
        // ‖f' − A_h f‖_β ≤ 6·ω_β(f', h), decreasing as h halves.
        let b = beta(0.1);
        for (f, fp) in [
            (
                (|x: f64| x * x) as fn(f64) -> f64,
                (|x: f64| 2.0 * x) as fn(f64) -> f64,
            ),
            (|x: f64| x.powf(2.5), |x: f64| 2.5 * x.powf(1.5)),
        ] {
            let mut prev = f64::INFINITY;
            for m in 4..=8 {
                let grid = UniformGrid::dyadic(m).unwrap();
                let g = GridFn::sample(grid, f).unwrap();
                let deriv = GridFn::sample(grid, fp).unwrap();
                let err = deriv.holder_error(&extended_nabla(&g), b).unwrap();
                let omega = deriv.modulus(b, grid.h());
                assert!(
                    err <= 6.0 * omega * (1.0 + 1e-12),
                    "m={m}: {err} vs {omega}"
                );
                assert!(err < prev, "m={m}: {err} !< {prev}");
                prev = err;
            }
        }
    }

    #[test]
    fn complex_seminorm_reduces_to_real() {
        let grid = UniformGrid::new(0.25).unwrap();
        let g = GridFn::sample(grid, |x| x * x - 0.5 * x).unwrap();
        let b = beta(0.3);
        let cplx = ComplexGridFn::new(
            grid,
            g.values()
                .iter()
                .map(|&v| ComplexScalar::new(v, 0.0))
                .collect(),
        )
        .unwrap();
        assert!((cplx.holder_seminorm(b) - g.holder_seminorm(b)).abs() < 1e-15);

        assert!(ComplexGridFn::new(grid, vec![ComplexScalar::new(0.0, 0.0); 2]).is_err());
    }
}
