//! The five subcommands: weight dumps, the two golden convergence tables,
//! fractional-derivative evaluation, and the audit suites.

use std::fmt::Write as _;

use fracnabla::fode::{convergence_table, ConvergenceRow, TableSpec};
use fracnabla::frac::{
    exact_frac_deriv_power, exact_frac_deriv_power_log, frac_nabla, power_log_value,
};
use fracnabla::grid::{GridFn, HolderExponent, UniformGrid};
use fracnabla::ops::{
    interpolate, random_holder_fn, sectorial_audit, AuditOperator, ComplexScalar,
};
use fracnabla::rng::SplitMix64;
use fracnabla::specfn::{gl_weights, ln_gamma, phi_alpha_bound, phi_alpha_residual};
use fracnabla::FracOrder;

use crate::csvio::{self, fmt_f64, fmt_h};
use crate::{CliError, OutputFormat};

fn frac_order(alpha: f64) -> Result<FracOrder, CliError> {
    FracOrder::new(alpha).map_err(|e| CliError::Usage(format!("--alpha: {e}")))
}

fn holder(beta: f64) -> Result<HolderExponent, CliError> {
    HolderExponent::new(beta).map_err(|e| CliError::Usage(format!("--beta: {e}")))
}

fn dyadic(m: u32) -> Result<UniformGrid, CliError> {
    if m == 0 {
        return Err(CliError::Usage("--h-exp must be at least 1".into()));
    }
    UniformGrid::dyadic(m).map_err(|e| CliError::Usage(format!("--h-exp {m}: {e}")))
}

fn write_out(path: &str, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("writing {path}: {e}")))
}

pub fn cmd_weights(alpha: f64, n: usize, out: &str) -> Result<(), CliError> {
    let w = gl_weights(frac_order(alpha)?, n);
    let mut text = String::from("j,w_j\n");
    for (j, wj) in w.as_slice().iter().enumerate() {
        let _ = writeln!(text, "{j},{}", fmt_f64(*wj));
    }
    write_out(out, &text)
}

fn run_table(
    spec_for: impl Fn(f64) -> Result<TableSpec, CliError>,
    betas: &[f64],
    h_exponents: &[u32],
    format: OutputFormat,
    out: &str,
) -> Result<(), CliError> {
    if betas.is_empty() {
        return Err(CliError::Usage("at least one --beta is required".into()));
    }
    if h_exponents.is_empty() {
        return Err(CliError::Usage("at least one --h-exp is required".into()));
    }
    let h_list: Vec<f64> = h_exponents.iter().map(|&m| 0.5f64.powi(m as i32)).collect();
    for (&m, &h) in h_exponents.iter().zip(&h_list) {
        if m == 0 || h <= 0.0 {
            return Err(CliError::Usage(format!("--h-exp {m} out of range")));
        }
    }
    let mut columns = Vec::with_capacity(betas.len());
    for &b in betas {
        let spec = spec_for(b)?;
        let rows = convergence_table(&spec, &h_list)
            .map_err(|e| CliError::Numeric(format!("table generation failed: {e}")))?;
        let tagged: Vec<(u32, ConvergenceRow)> = h_exponents.iter().copied().zip(rows).collect();
        columns.push(tagged);
    }
    let text = match format {
        OutputFormat::Csv => {
            // h-major layout, one row per (h, beta).
            let mut interleaved = Vec::new();
            for i in 0..h_exponents.len() {
                for col in &columns {
                    interleaved.push(col[i]);
                }
            }
            csvio::table_csv(&interleaved)
        }
        OutputFormat::Markdown => csvio::table_markdown(betas, &columns),
    };
    write_out(out, &text)
}

pub fn cmd_table1(
    mu: f64,
    alpha: f64,
    beta: f64,
    h_exponents: &[u32],
    format: OutputFormat,
    out: &str,
) -> Result<(), CliError> {
    let alpha = frac_order(alpha)?;
    if mu <= alpha.get() {
        return Err(CliError::Usage(format!(
            "--mu must exceed --alpha (got mu = {mu}, alpha = {})",
            alpha.get()
        )));
    }
    run_table(
        |b| {
            Ok(TableSpec::Example1 {
                mu,
                alpha,
                beta: holder(b)?,
            })
        },
        &[beta],
        h_exponents,
        format,
        out,
    )
}

pub fn cmd_table2(
    alpha: f64,
    betas: &[f64],
    h_exponents: &[u32],
    newton_tol: f64,
    format: OutputFormat,
    out: &str,
) -> Result<(), CliError> {
    let alpha = frac_order(alpha)?;
    if newton_tol <= 0.0 || newton_tol.is_nan() {
        return Err(CliError::Usage("--newton-tol must be positive".into()));
    }
    run_table(
        |b| {
            Ok(TableSpec::Example2 {
                alpha,
                beta: holder(b)?,
                newton_tol,
                max_iter: 50,
            })
        },
        betas,
        h_exponents,
        format,
        out,
    )
}

type ExactFn = Box<dyn Fn(f64) -> f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivFunction {
    Power,
    PowerLog,
    CsvInput,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivMode {
    /// Nodal values of the fractional backward difference.
    NablaAlpha,
    /// The interpolated operator, sampled at nodes and segment midpoints.
    ExtendedAlpha,
}

pub fn cmd_frac_deriv(
    function: DerivFunction,
    input: Option<&str>,
    mu: f64,
    alpha: f64,
    h_exponent: u32,
    mode: DerivMode,
    out: &str,
) -> Result<(), CliError> {
    let alpha = frac_order(alpha)?;
    let a = alpha.get();

    let (g, exact): (GridFn, Option<ExactFn>) = match function {
        DerivFunction::Power => {
            if mu <= a {
                return Err(CliError::Usage(format!(
                    "--mu must exceed --alpha (got mu = {mu}, alpha = {a})"
                )));
            }
            let grid = dyadic(h_exponent)?;
            let g = GridFn::sample(grid, |x| x.powf(mu))
                .map_err(|e| CliError::Numeric(format!("sampling t^{mu}: {e}")))?;
            (
                g,
                Some(Box::new(move |x| exact_frac_deriv_power(mu, alpha, x))),
            )
        }
        DerivFunction::PowerLog => {
            if mu <= a {
                return Err(CliError::Usage(format!(
                    "--mu must exceed --alpha (got mu = {mu}, alpha = {a})"
                )));
            }
            let grid = dyadic(h_exponent)?;
            let g = GridFn::sample(grid, |x| power_log_value(mu, x))
                .map_err(|e| CliError::Numeric(format!("sampling t^{mu} ln t: {e}")))?;
            (
                g,
                Some(Box::new(move |x| exact_frac_deriv_power_log(mu, alpha, x))),
            )
        }
        DerivFunction::CsvInput => {
            let path = input.ok_or_else(|| {
                CliError::Usage("--input is required with --function csv-input".into())
            })?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("reading {path}: {e}")))?;
            (csvio::parse_gridfn_csv(&text)?, None)
        }
    };

    let nodal = frac_nabla(&g, alpha);
    let grid = nodal.grid();
    // Evaluation points: nodes, plus segment midpoints in extended mode where
    // the polygonal extension actually differs from the nodal data.
    let mut points: Vec<f64> = Vec::new();
    for k in 0..=grid.n() {
        points.push(grid.node(k));
        if mode == DerivMode::ExtendedAlpha && k < grid.n() {
            points.push(0.5 * (grid.node(k) + grid.node(k + 1)));
        }
    }

    let mut text = String::new();
    if exact.is_some() {
        text.push_str("t,approx,exact,pointwise_error\n");
    } else {
        text.push_str("t,approx\n");
    }
    for &x in &points {
        let approx = interpolate(&nodal, x)
            .map_err(|e| CliError::Numeric(format!("evaluation at {x}: {e}")))?;
        match &exact {
            Some(f) => {
                let want = f(x);
                let _ = writeln!(
                    text,
                    "{},{},{},{}",
                    fmt_f64(x),
                    fmt_f64(approx),
                    fmt_f64(want),
                    fmt_f64((approx - want).abs())
                );
            }
            None => {
                let _ = writeln!(text, "{},{}", fmt_f64(x), fmt_f64(approx));
            }
        }
    }
    write_out(out, &text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuditKind {
    SectorialNabla,
    SectorialExtended,
    Balakrishnan,
    GammaLemma,
}

/// Runs one audit over its built-in sample set, writes per-case margins and
/// reports failure when any case breaks its bound.
pub fn cmd_audit(kind: AuditKind, beta: f64, seed: u64, out: &str) -> Result<(), CliError> {
    let (text, failures) = match kind {
        AuditKind::SectorialNabla => sectorial_csv(AuditOperator::Nabla, beta, seed)?,
        AuditKind::SectorialExtended => sectorial_csv(AuditOperator::Extended, beta, seed)?,
        AuditKind::Balakrishnan => balakrishnan_csv()?,
        AuditKind::GammaLemma => gamma_lemma_csv()?,
    };
    write_out(out, &text)?;
    if failures > 0 {
        return Err(CliError::Numeric(format!(
            "{failures} audit case(s) failed; see {out}"
        )));
    }
    Ok(())
}

const AUDIT_RAYS: [(f64, usize); 3] = [
    (0.6 * std::f64::consts::PI, 34),
    (0.75 * std::f64::consts::PI, 33),
    (std::f64::consts::PI, 33),
];
const AUDIT_FUNCTIONS: usize = 20;

fn sectorial_csv(which: AuditOperator, beta: f64, seed: u64) -> Result<(String, usize), CliError> {
    let beta = holder(beta)?;
    let grid = match which {
        AuditOperator::Nabla => dyadic(6)?,
        // Extended audit samples live on the 4x refinement of the h = 2^-6
        // operator grid.
        AuditOperator::Extended => dyadic(8)?,
    };
    let mut rng = SplitMix64::new(seed);
    let functions: Vec<GridFn> = (0..AUDIT_FUNCTIONS)
        .map(|_| random_holder_fn(grid, &mut rng))
        .collect();

    let mut text = String::from("re_lambda,im_lambda,ratio,bound,pass\n");
    let mut failures = 0usize;
    for (omega, count) in AUDIT_RAYS {
        let lambdas: Vec<ComplexScalar> = (0..count)
            .map(|i| {
                let t = i as f64 / (count - 1) as f64;
                ComplexScalar::from_polar(10.0f64.powf(-2.0 + 6.0 * t), omega)
            })
            .collect();
        // One row per lambda: the worst ratio across the sample functions.
        let mut worst = vec![0.0f64; lambdas.len()];
        let mut bound = 0.0;
        for g in &functions {
            let report = sectorial_audit(which, g, beta, omega, &lambdas)
                .map_err(|e| CliError::Numeric(format!("audit failed: {e}")))?;
            bound = report.bound;
            for (w, s) in worst.iter_mut().zip(&report.samples) {
                *w = w.max(s.ratio);
            }
        }
        for (lambda, ratio) in lambdas.iter().zip(worst) {
            let pass = ratio <= bound * (1.0 + 1e-9);
            if !pass {
                failures += 1;
            }
            let _ = writeln!(
                text,
                "{},{},{},{},{}",
                fmt_f64(lambda.re),
                fmt_f64(lambda.im),
                fmt_f64(ratio),
                fmt_f64(bound),
                pass
            );
        }
    }
    Ok((text, failures))
}

fn balakrishnan_csv() -> Result<(String, usize), CliError> {
    use fracnabla::frac::balakrishnan_weight_oracle;
    const TOL: f64 = 1e-6;
    let mut text = String::from("j,alpha,h,quadrature,closed_form,rel_error,pass\n");
    let mut failures = 0usize;
    for &a in &[0.2, 0.5, 0.8] {
        let alpha = frac_order(a)?;
        for &(m, h) in &[(4u32, 0.0625f64), (8, 0.00390625)] {
            let _ = m;
            for j in 0..=50usize {
                let quad = balakrishnan_weight_oracle(j, alpha, h)
                    .map_err(|e| CliError::Numeric(format!("quadrature failed: {e}")))?;
                let jf = j as f64;
                let closed = h.powf(-a)
                    * (ln_gamma(jf + 1.0 - a).unwrap() + ln_gamma(a).unwrap()
                        - ln_gamma(jf + 1.0).unwrap())
                    .exp();
                let rel = (quad - closed).abs() / closed;
                let pass = rel <= TOL;
                if !pass {
                    failures += 1;
                }
                let _ = writeln!(
                    text,
                    "{j},{},{},{},{},{},{pass}",
                    fmt_f64(a),
                    fmt_h(m),
                    fmt_f64(quad),
                    fmt_f64(closed),
                    fmt_f64(rel)
                );
            }
        }
    }
    Ok((text, failures))
}

fn gamma_lemma_csv() -> Result<(String, usize), CliError> {
    let mut text = String::from("m,alpha,phi,bound,pass\n");
    let mut failures = 0usize;
    for a10 in 1..=9u32 {
        let a = a10 as f64 / 10.0;
        let alpha = frac_order(a)?;
        for m in 1..=10_000usize {
            let phi = phi_alpha_residual(m, alpha);
            let bound = phi_alpha_bound(m, alpha);
            let pass = phi.abs() <= bound;
            if !pass {
                failures += 1;
            }
            let _ = writeln!(
                text,
                "{m},{},{},{},{pass}",
                fmt_f64(a),
                fmt_f64(phi),
                fmt_f64(bound)
            );
        }
    }
    Ok((text, failures))
}
