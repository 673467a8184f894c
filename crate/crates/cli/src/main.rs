//! `fracnabla` — fractional backward-difference operators on `[0, 1]`:
//! golden convergence tables, operator evaluation, and numerical audits.
//!
//! Exit codes: 0 on success, 1 when a numeric check fails, 2 on usage or
//! input errors, 3 on I/O errors.

use std::process::ExitCode;

mod commands;
mod csvio;

use commands::{AuditKind, DerivFunction, DerivMode};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Numeric(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numeric(m) | CliError::Io(m) => m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Markdown,
}

fn print_usage() {
    eprintln!("Usage: fracnabla <subcommand> [flags]");
    eprintln!();
    eprintln!("Subcommands:");
    eprintln!("  weights      Fractional binomial weights w_j, CSV `j,w_j`");
    eprintln!("               --alpha A --n N --out PATH");
    eprintln!("  table1       Hölder errors of the fractional difference of t^mu ln t");
    eprintln!("               [--mu 1.5] [--alpha 0.3] [--beta 0.1] [--h-exp M]... --out PATH");
    eprintln!("  table2       Hölder errors of the implicit fractional ODE solve");
    eprintln!("               [--alpha 0.5] [--beta 0.1 --beta 0.01] [--h-exp M]...");
    eprintln!("               [--newton-tol 1e-12] --out PATH");
    eprintln!("  frac-deriv   Apply the fractional operator to a sampled function");
    eprintln!("               --function power|power-log|csv-input [--input PATH]");
    eprintln!("               [--mu 1.0] [--alpha 0.5] [--h-exp 8]");
    eprintln!("               [--mode nabla-alpha|extended-alpha] --out PATH");
    eprintln!("  audit        Run a numerical invariant suite, CSV of per-case margins");
    eprintln!("               <sectorial-nabla|sectorial-extended|balakrishnan|gamma-lemma>");
    eprintln!("               [--beta 0.1] [--seed 42] --out PATH");
    eprintln!();
    eprintln!("Common flags:");
    eprintln!("  --h-exp M        step h = 2^-M; repeat the flag for several steps");
    eprintln!("  --format csv|md  table output format (default csv)");
    eprintln!("  --out PATH       output file (required)");
}

struct ArgParser {
    args: Vec<String>,
    pos: usize,
}

impl ArgParser {
    fn new(args: Vec<String>) -> Self {
        Self { args, pos: 0 }
    }

    fn next(&mut self) -> Option<String> {
        let v = self.args.get(self.pos).cloned();
        if v.is_some() {
            self.pos += 1;
        }
        v
    }

    fn value_for(&mut self, flag: &str) -> Result<String, CliError> {
        self.next()
            .ok_or_else(|| CliError::Usage(format!("flag {flag} requires a value")))
    }

    fn parse_f64(&mut self, flag: &str) -> Result<f64, CliError> {
        let raw = self.value_for(flag)?;
        raw.parse()
            .map_err(|_| CliError::Usage(format!("flag {flag}: cannot parse '{raw}' as a number")))
    }

    fn parse_u32(&mut self, flag: &str) -> Result<u32, CliError> {
        let raw = self.value_for(flag)?;
        raw.parse().map_err(|_| {
            CliError::Usage(format!("flag {flag}: cannot parse '{raw}' as an integer"))
        })
    }

    fn parse_usize(&mut self, flag: &str) -> Result<usize, CliError> {
        let raw = self.value_for(flag)?;
        raw.parse().map_err(|_| {
            CliError::Usage(format!("flag {flag}: cannot parse '{raw}' as an integer"))
        })
    }

    fn parse_u64(&mut self, flag: &str) -> Result<u64, CliError> {
        let raw = self.value_for(flag)?;
        raw.parse().map_err(|_| {
            CliError::Usage(format!("flag {flag}: cannot parse '{raw}' as an integer"))
        })
    }
}

fn parse_format(raw: &str) -> Result<OutputFormat, CliError> {
    match raw {
        "csv" => Ok(OutputFormat::Csv),
        "md" => Ok(OutputFormat::Markdown),
        other => Err(CliError::Usage(format!(
            "--format must be csv or md, got '{other}'"
        ))),
    }
}

fn require_out(out: Option<String>) -> Result<String, CliError> {
    out.ok_or_else(|| CliError::Usage("--out is required".into()))
}

fn run(args: Vec<String>) -> Result<(), CliError> {
    let mut parser = ArgParser::new(args);
    let sub = match parser.next() {
        Some(s) => s,
        None => return Err(CliError::Usage("missing subcommand".into())),
    };

    match sub.as_str() {
        "weights" => {
            let (mut alpha, mut n, mut out) = (None, None, None);
            while let Some(flag) = parser.next() {
                match flag.as_str() {
                    "--alpha" => alpha = Some(parser.parse_f64("--alpha")?),
                    "--n" => n = Some(parser.parse_usize("--n")?),
                    "--out" => out = Some(parser.value_for("--out")?),
                    other => return Err(CliError::Usage(format!("unknown flag '{other}'"))),
                }
            }
            let alpha = alpha.ok_or_else(|| CliError::Usage("--alpha is required".into()))?;
            let n = n.ok_or_else(|| CliError::Usage("--n is required".into()))?;
            commands::cmd_weights(alpha, n, &require_out(out)?)
        }
        "table1" => {
            let (mut mu, mut alpha, mut beta) = (1.5, 0.3, 0.1);
            let mut h_exponents: Vec<u32> = Vec::new();
            let mut format = OutputFormat::Csv;
            let mut out = None;
            while let Some(flag) = parser.next() {
                match flag.as_str() {
                    "--mu" => mu = parser.parse_f64("--mu")?,
                    "--alpha" => alpha = parser.parse_f64("--alpha")?,
                    "--beta" => beta = parser.parse_f64("--beta")?,
                    "--h-exp" => h_exponents.push(parser.parse_u32("--h-exp")?),
                    "--format" => format = parse_format(&parser.value_for("--format")?)?,
                    "--out" => out = Some(parser.value_for("--out")?),
                    other => return Err(CliError::Usage(format!("unknown flag '{other}'"))),
                }
            }
            if h_exponents.is_empty() {
                h_exponents = (6..=12).collect();
            }
            commands::cmd_table1(mu, alpha, beta, &h_exponents, format, &require_out(out)?)
        }
        "table2" => {
            let mut alpha = 0.5;
            let mut betas: Vec<f64> = Vec::new();
            let mut h_exponents: Vec<u32> = Vec::new();
            let mut newton_tol = 1e-12;
            let mut format = OutputFormat::Csv;
            let mut out = None;
            while let Some(flag) = parser.next() {
                match flag.as_str() {
                    "--alpha" => alpha = parser.parse_f64("--alpha")?,
                    "--beta" => betas.push(parser.parse_f64("--beta")?),
                    "--h-exp" => h_exponents.push(parser.parse_u32("--h-exp")?),
                    "--newton-tol" => newton_tol = parser.parse_f64("--newton-tol")?,
                    "--format" => format = parse_format(&parser.value_for("--format")?)?,
                    "--out" => out = Some(parser.value_for("--out")?),
                    other => return Err(CliError::Usage(format!("unknown flag '{other}'"))),
                }
            }
            if betas.is_empty() {
                betas = vec![0.1, 0.01];
            }
            if h_exponents.is_empty() {
                h_exponents = (7..=13).collect();
            }
            commands::cmd_table2(
                alpha,
                &betas,
                &h_exponents,
                newton_tol,
                format,
                &require_out(out)?,
            )
        }
        "frac-deriv" => {
            let mut function = None;
            let mut input = None;
            let (mut mu, mut alpha, mut h_exp) = (1.0, 0.5, 8u32);
            let mut mode = DerivMode::NablaAlpha;
            let mut out = None;
            while let Some(flag) = parser.next() {
                match flag.as_str() {
                    "--function" => {
                        function = Some(match parser.value_for("--function")?.as_str() {
                            "power" => DerivFunction::Power,
                            "power-log" => DerivFunction::PowerLog,
                            "csv-input" => DerivFunction::CsvInput,
                            other => return Err(CliError::Usage(format!(
                                "--function must be power, power-log or csv-input, got '{other}'"
                            ))),
                        })
                    }
                    "--input" => input = Some(parser.value_for("--input")?),
                    "--mu" => mu = parser.parse_f64("--mu")?,
                    "--alpha" => alpha = parser.parse_f64("--alpha")?,
                    "--h-exp" => h_exp = parser.parse_u32("--h-exp")?,
                    "--mode" => {
                        mode = match parser.value_for("--mode")?.as_str() {
                            "nabla-alpha" => DerivMode::NablaAlpha,
                            "extended-alpha" => DerivMode::ExtendedAlpha,
                            other => {
                                return Err(CliError::Usage(format!(
                                    "--mode must be nabla-alpha or extended-alpha, got '{other}'"
                                )))
                            }
                        }
                    }
                    "--out" => out = Some(parser.value_for("--out")?),
                    other => return Err(CliError::Usage(format!("unknown flag '{other}'"))),
                }
            }
            let function =
                function.ok_or_else(|| CliError::Usage("--function is required".into()))?;
            commands::cmd_frac_deriv(
                function,
                input.as_deref(),
                mu,
                alpha,
                h_exp,
                mode,
                &require_out(out)?,
            )
        }
        "audit" => {
            let kind = match parser.next().as_deref() {
                Some("sectorial-nabla") => AuditKind::SectorialNabla,
                Some("sectorial-extended") => AuditKind::SectorialExtended,
                Some("balakrishnan") => AuditKind::Balakrishnan,
                Some("gamma-lemma") => AuditKind::GammaLemma,
                Some(other) => {
                    return Err(CliError::Usage(format!("unknown audit '{other}'")))
                }
                None => {
                    return Err(CliError::Usage(
                        "audit requires one of: sectorial-nabla, sectorial-extended, balakrishnan, gamma-lemma".into(),
                    ))
                }
            };
            let (mut beta, mut seed, mut out) = (0.1, 42u64, None);
            while let Some(flag) = parser.next() {
                match flag.as_str() {
                    "--beta" => beta = parser.parse_f64("--beta")?,
                    "--seed" => seed = parser.parse_u64("--seed")?,
                    "--out" => out = Some(parser.value_for("--out")?),
                    other => return Err(CliError::Usage(format!("unknown flag '{other}'"))),
                }
            }
            commands::cmd_audit(kind, beta, seed, &require_out(out)?)
        }
        "--help" | "-h" | "help" => {
            print_usage();
            Ok(())
        }
        other => Err(CliError::Usage(format!("unknown subcommand '{other}'"))),
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fracnabla: {}", e.message());
            if matches!(e, CliError::Usage(_)) {
                eprintln!();
                print_usage();
            }
            ExitCode::from(e.exit_code())
        }
    }
}
