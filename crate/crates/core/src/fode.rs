//! Implicit solver for fractional ordinary differential equations
//! D^α y = F(t, y), y(0) = 0, discretised with the fractional backward
//! difference, plus the convergence-table generators for the two benchmark
//! problems.
//!
//! Each step solves the scalar equation
//!
//! ```text
//! h^{−α} (w_0 y_k + Σ_{j=1}^{k} w_j y_{k−j}) = F(t_k, y_k)
//! ```
//!
//! by damped Newton iteration with a numerical derivative, falling back to
//! bisection on a sign-change bracket found by doubling. Accepted steps have
//! residual at most `newton_tol`.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

// Test builds link std, whose inherent f64 methods shadow these trait
// methods; non-test builds have no std and need the trait.
#[allow(unused_imports)]
use num_traits::Float;

use crate::frac::{exact_frac_deriv_power_log, frac_nabla, power_log_value, FracOrder};
use crate::grid::{GridError, GridFn, HolderExponent, UniformGrid};
use crate::specfn::{gl_weights, ln_gamma_raw};

/// Errors from problem construction and the step solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FodeError {
    /// Right-hand side undefined at the attempted point.
    RhsDomain {
        t: f64,
        y: f64,
    },
    /// Newton and the bisection fallback both failed at step `k`.
    StepFailure {
        k: usize,
        residual: f64,
    },
    /// The accepted root violates the admissible-state floor.
    StepOutOfDomain {
        k: usize,
        y: f64,
    },
    /// The problem has no exact solution attached.
    MissingExact,
    Grid(GridError),
}

impl fmt::Display for FodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::RhsDomain { t, y } => {
                write!(f, "right-hand side undefined at (t, y) = ({t}, {y})")
            }
            Self::StepFailure { k, residual } => {
                write!(f, "step {k} failed to converge; last residual {residual:e}")
            }
            Self::StepOutOfDomain { k, y } => {
                write!(f, "step {k} produced inadmissible state y = {y}")
            }
            Self::MissingExact => write!(f, "problem has no exact solution attached"),
            Self::Grid(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for FodeError {}

impl From<GridError> for FodeError {
    fn from(e: GridError) -> Self {
        Self::Grid(e)
    }
}

type Rhs = dyn Fn(f64, f64) -> Result<f64, FodeError> + Send + Sync;
type Exact = dyn Fn(f64) -> f64 + Send + Sync;

/// A fractional initial-value problem D^α y = F(t, y) with y(0) = 0.
///
/// The zero initial value is forced by the function space; problems with
/// nonzero data must be shifted before discretisation.
pub struct FodeProblem {
    alpha: FracOrder,
    rhs: Box<Rhs>,
    exact: Option<Box<Exact>>,
    y_floor: Option<f64>,
}

impl FodeProblem {
    pub fn new<F>(alpha: FracOrder, rhs: F) -> Self
    where
        F: Fn(f64, f64) -> Result<f64, FodeError> + Send + Sync + 'static,
    {
        Self {
            alpha,
            rhs: Box::new(rhs),
            exact: None,
            y_floor: None,
        }
    }

    /// Attaches a known exact solution for error measurement.
    pub fn with_exact<F>(mut self, exact: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.exact = Some(Box::new(exact));
        self
    }

    /// Restricts the admissible states to y ≥ floor. Newton iterates are
    /// projected onto the floor before the right-hand side sees them, and an
    /// accepted root may undershoot it by at most 1e-12.
    pub fn with_floor(mut self, floor: f64) -> Self {
        self.y_floor = Some(floor);
        self
    }

    pub fn alpha(&self) -> FracOrder {
        self.alpha
    }

    pub fn initial_value(&self) -> f64 {
        0.0
    }

    pub fn rhs(&self, t: f64, y: f64) -> Result<f64, FodeError> {
        (self.rhs)(t, y)
    }

    pub fn exact_at(&self, t: f64) -> Option<f64> {
        self.exact.as_ref().map(|f| f(t))
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }
}

const FLOOR_SLACK: f64 = 1e-12;

struct StepEquation<'a> {
    problem: &'a FodeProblem,
    t: f64,
    /// h^{−α} w_0 (the coefficient of y_k).
    lead: f64,
    /// h^{−α} Σ_{j≥1} w_j y_{k−j}.
    history: f64,
}

impl StepEquation<'_> {
    fn residual(&self, y: f64) -> Result<f64, FodeError> {
        let y_eval = match self.problem.y_floor {
            Some(floor) => y.max(floor),
            None => y,
        };
        Ok(self.lead * y + self.history - self.problem.rhs(self.t, y_eval)?)
    }
}

fn newton_step(eq: &StepEquation<'_>, start: f64, tol: f64, max_iter: usize) -> Option<f64> {
    let mut y = start;
    let mut r = eq.residual(y).ok()?;
    for _ in 0..max_iter {
        if r.abs() <= tol {
            return Some(y);
        }
        let d = 1e-7 * y.abs().max(1.0);
        let (rp, rm) = (eq.residual(y + d).ok()?, eq.residual(y - d).ok()?);
        let deriv = (rp - rm) / (2.0 * d);
        if !deriv.is_finite() || deriv == 0.0 {
            return None;
        }
        // Damping: halve the Newton step until the residual decreases.
        let mut step = r / deriv;
        let mut improved = false;
        for _ in 0..40 {
            let cand = y - step;
            if let Ok(rc) = eq.residual(cand) {
                if rc.abs() < r.abs() {
                    y = cand;
                    r = rc;
                    improved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !improved {
            return None;
        }
    }
    if r.abs() <= tol {
        Some(y)
    } else {
        None
    }
}

fn bisection_step(eq: &StepEquation<'_>, center: f64, tol: f64) -> Option<f64> {
    // Grow the bracket [center − r, center + r] until the residual changes
    // sign. The radius is capped at 2^40: far beyond that, additive terms of
    // the residual start to be absorbed by rounding and a rootless equation
    // would look solvable.
    let mut radius = 1.0;
    let mut bracket = None;
    for _ in 0..40 {
        let (lo, hi) = (center - radius, center + radius);
        if let (Ok(rl), Ok(rh)) = (eq.residual(lo), eq.residual(hi)) {
            if rl == 0.0 {
                return Some(lo);
            }
            if rh == 0.0 {
                return Some(hi);
            }
            if rl * rh < 0.0 {
                bracket = Some((lo, hi, rl));
                break;
            }
        }
        radius *= 2.0;
    }
    let (mut lo, mut hi, rl) = bracket?;
    let mut sign_lo = rl.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let rm = eq.residual(mid).ok()?;
        if rm.abs() <= tol {
            return Some(mid);
        }
        if rm.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo).abs() <= f64::EPSILON * mid.abs().max(1.0) {
            break;
        }
        sign_lo = eq.residual(lo).ok()?.signum();
    }
    None
}

/// Marches the implicit fractional scheme over the grid.
pub fn solve_gl_implicit(
    problem: &FodeProblem,
    grid: UniformGrid,
    newton_tol: f64,
    max_iter: usize,
) -> Result<GridFn, FodeError> {
    assert!(newton_tol > 0.0, "newton_tol must be positive");
    let n = grid.n();
    let alpha = problem.alpha();
    let weights = gl_weights(alpha, n);
    let w = weights.as_slice();
    let scale = grid.h().powf(-alpha.get());

    let mut y = Vec::with_capacity(n + 1);
    y.push(problem.initial_value());
    for k in 1..=n {
        let t = grid.node(k);
        let mut history = 0.0;
        for j in 1..=k {
            history += w[j] * y[k - j];
        }
        let eq = StepEquation {
            problem,
            t,
            lead: scale * w[0],
            history: scale * history,
        };
        let start = y[k - 1];
        let root = match newton_step(&eq, start, newton_tol, max_iter) {
            Some(root) => root,
            None => match bisection_step(&eq, start, newton_tol) {
                Some(root) => root,
                None => {
                    let residual = eq.residual(start).unwrap_or(f64::NAN);
                    return Err(FodeError::StepFailure { k, residual });
                }
            },
        };
        let accepted = match problem.y_floor {
            Some(floor) if root < floor - FLOOR_SLACK => {
                return Err(FodeError::StepOutOfDomain { k, y: root })
            }
            Some(floor) => root.max(floor),
            None => root,
        };
        y.push(accepted);
    }
    Ok(GridFn::new(grid, y)?)
}

/// The stiff benchmark problem
///
/// ```text
/// D^α y = 40320/Γ(9−α)·t^{8−α} − 3·Γ(5+α/2)/Γ(5−α/2)·t^{4−α/2}
///         + (9/4)·Γ(α+1) + ((3/2)·t^{α/2} − t^4)^3 − y^{3/2},   y(0) = 0,
/// ```
///
/// with exact solution y(t) = t^8 − 3t^{4+α/2} + (9/4)t^α. The y^{3/2} term
/// is undefined for negative states, so the problem carries a zero floor;
/// values in (−1e−12, 0) are clamped to zero, anything lower is a domain error.
pub fn example2_problem(alpha: FracOrder) -> FodeProblem {
    let a = alpha.get();
    let c_power = 40320.0 / ln_gamma_raw(9.0 - a).exp();
    let c_mid = 3.0 * (ln_gamma_raw(5.0 + 0.5 * a) - ln_gamma_raw(5.0 - 0.5 * a)).exp();
    let c_const = 2.25 * ln_gamma_raw(a + 1.0).exp();
    let rhs = move |t: f64, y: f64| -> Result<f64, FodeError> {
        if y < -FLOOR_SLACK {
            return Err(FodeError::RhsDomain { t, y });
        }
        let y = y.max(0.0);
        let cubic = 1.5 * t.powf(0.5 * a) - t.powi(4);
        Ok(c_power * t.powf(8.0 - a) - c_mid * t.powf(4.0 - 0.5 * a)
            + c_const
            + cubic * cubic * cubic
            - y.powf(1.5))
    };
    let exact = move |t: f64| t.powi(8) - 3.0 * t.powf(4.0 + 0.5 * a) + 2.25 * t.powf(a);
    FodeProblem::new(alpha, rhs)
        .with_exact(exact)
        .with_floor(0.0)
}

/// One row of a convergence table: step, Hölder exponent, Hölderian error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub h: f64,
    pub beta: HolderExponent,
    pub error: f64,
}

/// Which benchmark a convergence table reproduces.
pub enum TableSpec {
    /// Fractional derivative of t^μ ln t against its closed form.
    Example1 {
        mu: f64,
        alpha: FracOrder,
        beta: HolderExponent,
    },
    /// The stiff initial-value problem of [`example2_problem`].
    Example2 {
        alpha: FracOrder,
        beta: HolderExponent,
        newton_tol: f64,
        max_iter: usize,
    },
}

fn error_row(
    exact: &GridFn,
    approx: &GridFn,
    beta: HolderExponent,
) -> Result<ConvergenceRow, FodeError> {
    Ok(ConvergenceRow {
        h: exact.grid().h(),
        beta,
        error: exact.holder_error(approx, beta)?,
    })
}

/// Runs one benchmark across the supplied steps, one row per step.
pub fn convergence_table(
    spec: &TableSpec,
    h_list: &[f64],
) -> Result<Vec<ConvergenceRow>, FodeError> {
    let mut rows = Vec::with_capacity(h_list.len());
    for &h in h_list {
        let grid = UniformGrid::new(h)?;
        let row = match spec {
            TableSpec::Example1 { mu, alpha, beta } => {
                let f = GridFn::sample(grid, |x| power_log_value(*mu, x))?;
                let approx = frac_nabla(&f, *alpha);
                let exact = GridFn::sample(grid, |x| exact_frac_deriv_power_log(*mu, *alpha, x))?;
                error_row(&exact, &approx, *beta)?
            }
            TableSpec::Example2 {
                alpha,
                beta,
                newton_tol,
                max_iter,
            } => {
                let problem = example2_problem(*alpha);
                let approx = solve_gl_implicit(&problem, grid, *newton_tol, *max_iter)?;
                let exact = GridFn::sample(grid, |t| problem.exact_at(t).expect("attached"))?;
                error_row(&exact, &approx, *beta)?
            }
        };
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frac::rl_quadrature_oracle;

    fn order(a: f64) -> FracOrder {
        FracOrder::new(a).unwrap()
    }

    fn beta(b: f64) -> HolderExponent {
        HolderExponent::new(b).unwrap()
    }

    #[test]
    fn zero_rhs_gives_zero_solution() {
        let problem = FodeProblem::new(order(0.5), |_, _| Ok(0.0));
        let grid = UniformGrid::dyadic(5).unwrap();
        let y = solve_gl_implicit(&problem, grid, 1e-12, 50).unwrap();
        for k in 0..=grid.n() {
            assert!(y.value(k).abs() <= 1e-12, "k={k}: {}", y.value(k));
        }
    }

    #[test]
    fn linear_problem_reproduces_identity() {
        // D^α y = t^{1−α}/Γ(2−α) has exact solution y = t; the right-hand
        // side does not involve y, so the scheme inverts the fractional
        // difference directly.
        for &a in &[0.3, 0.5, 0.7] {
            let alpha = order(a);
            let c = 1.0 / ln_gamma_raw(2.0 - a).exp();
            let problem =
                FodeProblem::new(alpha, move |t: f64, _| Ok(c * t.powf(1.0 - a))).with_exact(|t| t);
            let mut prev = f64::INFINITY;
            for m in [4u32, 5, 6] {
                let grid = UniformGrid::dyadic(m).unwrap();
                let y = solve_gl_implicit(&problem, grid, 1e-12, 50).unwrap();
                let mut worst = 0.0f64;
                for k in 0..=grid.n() {
                    worst = worst.max((y.value(k) - grid.node(k)).abs());
                }
                assert!(worst < prev, "m={m}: {worst} !< {prev}");
                prev = worst;
            }
            assert!(prev < 0.02, "alpha={a}: final error {prev}");
        }
    }

    #[test]
    fn accepted_steps_meet_residual_tolerance() {
        let alpha = order(0.5);
        let problem = example2_problem(alpha);
        let grid = UniformGrid::dyadic(6).unwrap();
        let tol = 1e-12;
        let y = solve_gl_implicit(&problem, grid, tol, 50).unwrap();

        let w = gl_weights(alpha, grid.n());
        let scale = grid.h().powf(-alpha.get());
        for k in 1..=grid.n() {
            let mut acc = 0.0;
            for j in 0..=k {
                acc += w.get(j) * y.value(k - j);
            }
            let residual = scale * acc - problem.rhs(grid.node(k), y.value(k)).unwrap();
            assert!(residual.abs() <= tol, "k={k}: {residual:e}");
        }
    }

    #[test]
    fn example2_exact_solution_endpoints() {
        for &a in &[0.25, 0.5, 0.75] {
            let problem = example2_problem(order(a));
            assert_eq!(problem.exact_at(0.0).unwrap(), 0.0);
            assert!((problem.exact_at(1.0).unwrap() - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn example2_rhs_consistent_with_quadrature() {
        // Along the exact solution the right-hand side equals the fractional
        // derivative of the solution, checked through the quadrature oracle
        // applied to y'(t).
        let a = 0.5;
        let alpha = order(a);
        let problem = example2_problem(alpha);
        let y_prime = move |t: f64| {
            8.0 * t.powi(7) - 3.0 * (4.0 + 0.5 * a) * t.powf(3.0 + 0.5 * a)
                + 2.25 * a * t.powf(a - 1.0)
        };
        for &t in &[0.25, 0.5, 0.75] {
            let lhs = problem.rhs(t, problem.exact_at(t).unwrap()).unwrap();
            let rhs = rl_quadrature_oracle(y_prime, alpha, t).unwrap();
            assert!(
                (lhs - rhs).abs() <= 1e-5 * lhs.abs().max(1.0),
                "t={t}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn example2_rhs_guards_negative_states() {
        let problem = example2_problem(order(0.5));
        assert!(problem.rhs(0.5, -1e-13).is_ok());
        assert!(matches!(
            problem.rhs(0.5, -1e-6),
            Err(FodeError::RhsDomain { .. })
        ));
    }

    #[test]
    fn example2_endpoint_value_converges() {
        let problem = example2_problem(order(0.5));
        let mut prev = f64::INFINITY;
        for m in [5u32, 6, 7] {
            let grid = UniformGrid::dyadic(m).unwrap();
            let y = solve_gl_implicit(&problem, grid, 1e-12, 50).unwrap();
            let mut worst = 0.0f64;
            for k in 0..=grid.n() {
                worst = worst.max((y.value(k) - problem.exact_at(grid.node(k)).unwrap()).abs());
            }
            assert!(worst < prev, "m={m}: {worst} !< {prev}");
            prev = worst;
            if m == 7 {
                assert!((y.value(grid.n()) - 0.25).abs() < 0.05);
            }
        }
    }

    #[test]
    fn convergence_rows_zero_for_identical_inputs() {
        let grid = UniformGrid::dyadic(4).unwrap();
        let f = GridFn::sample(grid, |x| x.powf(1.3)).unwrap();
        let row = error_row(&f, &f, beta(0.1)).unwrap();
        assert_eq!(row.error, 0.0);
        assert_eq!(row.h, grid.h());
    }

    #[test]
    fn example1_table_is_deterministic() {
        let spec = TableSpec::Example1 {
            mu: 1.5,
            alpha: order(0.3),
            beta: beta(0.1),
        };
        let hs = [0.25, 0.125];
        let a = convergence_table(&spec, &hs).unwrap();
        let b = convergence_table(&spec, &hs).unwrap();
        assert_eq!(a, b);
        assert!(a[1].error < a[0].error);
    }

    #[test]
    fn solver_rejects_unsolvable_rhs() {
        // Residual never changes sign and Newton cannot descend: lead·y + 0
        // − (−2 − y²)… choose F so that c·y − F(t,y) has no root: F(t,y) =
        // c·y + 1 keeps the residual at −1 identically.
        let grid = UniformGrid::dyadic(3).unwrap();
        let c = grid.h().powf(-0.5);
        let problem = FodeProblem::new(order(0.5), move |_, y: f64| Ok(c * y + 1.0));
        let err = solve_gl_implicit(&problem, grid, 1e-12, 50).unwrap_err();
        assert!(matches!(err, FodeError::StepFailure { k: 1, .. }));
    }
}
