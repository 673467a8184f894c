//! CSV and markdown emitters plus the `t,value` grid-function reader.
//!
//! CSV floats carry 17 significant digits so files round-trip losslessly;
//! the markdown emitters round to 7 decimals to match the usual table
//! presentation. All output is built in memory and written in one call,
//! which keeps reruns byte-identical.

use std::fmt::Write as _;

use fracnabla::fode::ConvergenceRow;
use fracnabla::grid::{GridFn, UniformGrid};

use crate::CliError;

/// Full-precision rendering: 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Seven decimals, the table display convention.
pub fn fmt_table(v: f64) -> String {
    format!("{v:.7}")
}

pub fn fmt_h(exponent: u32) -> String {
    format!("2^-{exponent}")
}

/// Parses `t,value` rows into a grid function. The nodes must start at 0 and
/// be uniformly spaced; errors carry the 1-based line number.
pub fn parse_gridfn_csv(text: &str) -> Result<GridFn, CliError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "t,value" => {}
        Some((_, header)) => {
            return Err(CliError::Usage(format!(
                "line 1: expected header 't,value', found '{header}'"
            )))
        }
        None => return Err(CliError::Usage("empty input file".into())),
    }

    let mut ts = Vec::new();
    let mut values = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let (t_str, v_str) = match (fields.next(), fields.next(), fields.next()) {
            (Some(t), Some(v), None) => (t, v),
            _ => {
                return Err(CliError::Usage(format!(
                    "line {lineno}: expected two comma-separated fields"
                )))
            }
        };
        let t: f64 = t_str.trim().parse().map_err(|_| {
            CliError::Usage(format!("line {lineno}: cannot parse t value '{t_str}'"))
        })?;
        let v: f64 = v_str
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("line {lineno}: cannot parse value '{v_str}'")))?;
        ts.push((lineno, t));
        values.push(v);
    }
    if ts.len() < 2 {
        return Err(CliError::Usage("need at least two data rows".into()));
    }
    if ts[0].1 != 0.0 {
        return Err(CliError::Usage(format!(
            "line {}: first node must be t = 0",
            ts[0].0
        )));
    }
    let h = ts[1].1;
    if !(h > 0.0 && h < 1.0) {
        return Err(CliError::Usage(format!(
            "line {}: implied step {h} outside (0, 1)",
            ts[1].0
        )));
    }
    for (k, &(lineno, t)) in ts.iter().enumerate() {
        let expected = k as f64 * h;
        if (t - expected).abs() > 1e-12 * expected.abs().max(1.0) {
            return Err(CliError::Usage(format!(
                "line {lineno}: node {t} breaks the uniform spacing (expected {expected})"
            )));
        }
    }
    let grid =
        UniformGrid::new(h).map_err(|e| CliError::Usage(format!("invalid grid step {h}: {e}")))?;
    if grid.num_nodes() != values.len() {
        return Err(CliError::Usage(format!(
            "{} rows do not fill the grid with step {h} ({} nodes expected)",
            values.len(),
            grid.num_nodes()
        )));
    }
    GridFn::new(grid, values).map_err(|e| CliError::Usage(format!("invalid samples: {e}")))
}

/// Convergence rows as `h,beta,error` with h rendered as `2^-m`.
pub fn table_csv(rows: &[(u32, ConvergenceRow)]) -> String {
    let mut out = String::from("h,beta,error\n");
    for (m, row) in rows {
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt_h(*m),
            fmt_f64(row.beta.get()),
            fmt_f64(row.error)
        );
    }
    out
}

/// Markdown table with one error column per Hölder exponent, rows per step.
pub fn table_markdown(betas: &[f64], columns: &[Vec<(u32, ConvergenceRow)>]) -> String {
    let mut out = String::from("| h |");
    for b in betas {
        let _ = write!(out, " Error (beta = {b}) |");
    }
    out.push('\n');
    out.push_str("|---|");
    for _ in betas {
        out.push_str("---|");
    }
    out.push('\n');
    let steps = columns[0].len();
    for i in 0..steps {
        let _ = write!(out, "| {} |", fmt_h(columns[0][i].0));
        for col in columns {
            let _ = write!(out, " {} |", fmt_table(col[i].1.error));
        }
        out.push('\n');
    }
    out
}
