//! The `gsep` command line.
//!
//! Exit codes: 0 success without a witness, 3 a witness was found, 1 input
//! error, 2 numerical failure.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::gaussian::CovarianceMatrix;
use crate::io::{
    digest, emit_grid, format_real, parse_state_structure, ParseError, ParsedState, ReportDocument,
};
use crate::scaling::{
    default_ppt_pattern, minor_report, ppt_test, regularized_minors, ScalingVector,
};
use crate::scan::{scan_slice, SlicePlan, DEFAULT_RESOLUTION};
use crate::witness::{minimize_negativity, MinimizeOptions, Verdict};
use crate::{PHYSICALITY_TOL, WITNESS_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_WITNESS: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "gsep",
    version,
    about = "Partial-scaling entanglement tests for Gaussian states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check admissibility (pure specs) and the uncertainty relation.
    Validate { spec: PathBuf },
    /// Evaluate the determinant and shifted minors at one lambda.
    Eval {
        spec: PathBuf,
        /// Comma-separated scaling parameters, one per mode.
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
    /// Partial transpose test (lambda = +-1 per mode).
    Ppt {
        spec: PathBuf,
        /// Signs per mode, e.g. `+,-,-`; defaults to + on mode 1, - elsewhere.
        #[arg(long, allow_hyphen_values = true)]
        pattern: Option<String>,
    },
    /// Grid scan over a two-dimensional slice, written as CSV.
    Scan {
        spec: PathBuf,
        /// Pin mode i to value v (repeat for every non-axis mode).
        #[arg(long = "fix", value_name = "I=V", allow_hyphen_values = true)]
        fix: Vec<String>,
        /// Free axes as `a,b` (1-based mode indices).
        #[arg(long)]
        axes: String,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search the whole lambda box for a witness and report the depth.
    Analyze {
        spec: PathBuf,
        /// Coarse pre-scan points per axis.
        #[arg(long, default_value_t = 11)]
        grid: usize,
        #[arg(long, default_value_t = 32)]
        starts: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Numerical(String),
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        match e {
            ParseError::Validation(inner) => inner.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_INPUT
                }
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
        Err(Failure::Numerical(msg)) => {
            let _ = writeln!(err, "numerical failure: {msg}");
            EXIT_NUMERICAL
        }
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &PathBuf) -> Result<(String, ParsedState), Failure> {
    let text = read(path)?;
    let state = parse_state_structure(&text)?;
    Ok((text, state))
}

/// Covariance for commands that tolerate unphysical input with a warning.
fn covariance_with_warning(
    state: &ParsedState,
    err: &mut dyn Write,
) -> Result<CovarianceMatrix, Failure> {
    let sigma = state.covariance()?;
    let p = sigma.check_physicality(PHYSICALITY_TOL);
    if !p.passed() {
        writeln!(
            err,
            "warning: covariance violates the uncertainty relation (smallest eigenvalue {:e})",
            p.min_eigenvalue
        )?;
    }
    Ok(sigma)
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Input(format!("invalid {what} value {t:?}")))
        })
        .collect()
}

fn parse_pattern(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|t| match t.trim() {
            "+" | "+1" | "1" => Ok(1.0),
            "-" | "-1" => Ok(-1.0),
            other => Err(Failure::Input(format!("invalid pattern entry {other:?}"))),
        })
        .collect()
}

fn parse_fix(text: &str) -> Result<(usize, f64), Failure> {
    let bad = || Failure::Input(format!("invalid --fix {text:?}, expected I=V"));
    let (i, v) = text.split_once('=').ok_or_else(bad)?;
    Ok((
        i.trim().parse().map_err(|_| bad())?,
        v.trim().parse().map_err(|_| bad())?,
    ))
}

fn parse_axes(text: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::Input(format!("invalid --axes {text:?}, expected a,b"));
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

fn check_modes(state: &ParsedState, found: usize, what: &str) -> Result<(), Failure> {
    if found != state.modes() {
        return Err(Failure::Input(format!(
            "{what} has {found} entries but the state has {} modes",
            state.modes()
        )));
    }
    Ok(())
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format_real(*v))
        .collect::<Vec<_>>()
        .join(",")
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match command {
        Command::Validate { spec } => validate(&spec, out),
        Command::Eval { spec, lambda } => eval(&spec, &lambda, out, err),
        Command::Ppt { spec, pattern } => ppt(&spec, pattern.as_deref(), out, err),
        Command::Scan {
            spec,
            fix,
            axes,
            grid,
            out: path,
        } => scan(&spec, &fix, &axes, grid, path.as_ref(), out, err),
        Command::Analyze {
            spec,
            grid,
            starts,
            seed,
            json,
        } => {
            let opts = MinimizeOptions {
                grid,
                starts,
                seed,
                ..MinimizeOptions::default()
            };
            analyze(&spec, &opts, json, out)
        }
    }
}

fn validate(spec: &PathBuf, out: &mut dyn Write) -> Outcome {
    let (_, state) = load(spec)?;
    writeln!(out, "modes: {}", state.modes())?;
    if let ParsedState::Pure(p) = &state {
        match p.validate() {
            Ok(()) => {
                writeln!(out, "admissible: yes")?;
                writeln!(
                    out,
                    "exponent determinant: {}",
                    format_real(p.exponent_matrix().determinant())
                )?;
                writeln!(
                    out,
                    "normalization: {}",
                    format_real(p.normalization_constant()?)
                )?;
            }
            Err(e) => {
                writeln!(out, "admissible: no")?;
                return Err(Failure::Input(e.to_string()));
            }
        }
    }
    let sigma = state.covariance()?;
    let p = sigma.check_physicality(PHYSICALITY_TOL);
    writeln!(
        out,
        "min eigenvalue of sigma + (i/2)Omega: {}",
        format_real(p.min_eigenvalue)
    )?;
    writeln!(out, "physical: {}", if p.passed() { "yes" } else { "no" })?;
    if p.passed() {
        Ok(EXIT_OK)
    } else {
        Err(Failure::Input(format!(
            "covariance violates the uncertainty relation (smallest eigenvalue {:e})",
            p.min_eigenvalue
        )))
    }
}

fn eval(spec: &PathBuf, lambda: &str, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let (_, state) = load(spec)?;
    let values = parse_list(lambda, "lambda")?;
    check_modes(&state, values.len(), "--lambda")?;
    let lambda = ScalingVector::new(values)?;
    let sigma = covariance_with_warning(&state, err)?;
    let n = sigma.modes();

    let reg = regularized_minors(&sigma, &lambda)?;
    let raw = if lambda.has_zero() {
        None
    } else {
        Some(minor_report(&sigma, &lambda, WITNESS_TOL)?)
    };
    writeln!(out, "lambda: {}", join(lambda.as_slice()))?;
    match &raw {
        Some(r) => writeln!(out, "sigma: {}", format_real(r.full_determinant()))?,
        None => writeln!(out, "sigma: undefined (lambda has a zero entry)")?,
    }
    writeln!(out, "sigma_reg: {}", format_real(reg[n - 1]))?;
    for (k, r) in reg.iter().enumerate() {
        let raw_text = raw
            .as_ref()
            .map(|m| format_real(m.minors[k]))
            .unwrap_or_else(|| "undefined".into());
        writeln!(
            out,
            "minor order {}: raw {} regularized {}",
            n + 1 + k,
            raw_text,
            format_real(*r)
        )?;
    }
    let witnessed = reg.iter().any(|&m| m < -WITNESS_TOL);
    writeln!(out, "witnessed: {}", if witnessed { "yes" } else { "no" })?;
    Ok(if witnessed { EXIT_WITNESS } else { EXIT_OK })
}

fn ppt(spec: &PathBuf, pattern: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let (_, state) = load(spec)?;
    let pattern = match pattern {
        Some(p) => parse_pattern(p)?,
        None => default_ppt_pattern(state.modes()),
    };
    check_modes(&state, pattern.len(), "--pattern")?;
    let sigma = covariance_with_warning(&state, err)?;
    let r = ppt_test(&sigma, &pattern, WITNESS_TOL)?;
    let signs: Vec<&str> = pattern
        .iter()
        .map(|&s| if s > 0.0 { "+" } else { "-" })
        .collect();
    writeln!(out, "pattern: {}", signs.join(","))?;
    for (k, m) in r.report.minors.iter().enumerate() {
        writeln!(
            out,
            "minor order {}: {}",
            r.report.first_order() + k,
            format_real(*m)
        )?;
    }
    writeln!(
        out,
        "witnessed: {}",
        if r.report.witnessed { "yes" } else { "no" }
    )?;
    if let Some(separable) = r.separable {
        writeln!(
            out,
            "verdict: {}",
            if separable { "separable" } else { "entangled" }
        )?;
    }
    Ok(if r.report.witnessed {
        EXIT_WITNESS
    } else {
        EXIT_OK
    })
}

fn scan(
    spec: &PathBuf,
    fix: &[String],
    axes: &str,
    grid: usize,
    path: Option<&PathBuf>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let (_, state) = load(spec)?;
    let fixed = fix
        .iter()
        .map(|f| parse_fix(f))
        .collect::<Result<Vec<_>, _>>()?;
    let plan = SlicePlan::new(state.modes(), parse_axes(axes)?, &fixed, grid)?;
    let sigma = covariance_with_warning(&state, err)?;
    let result = scan_slice(&sigma, &plan)?;
    let csv = emit_grid(&result);
    let s = &result.summary;
    let summary = format!(
        "min sigma_reg {} at ({}, {}); max {}; negative fraction {}",
        format_real(s.min_regularized),
        s.argmin.0,
        s.argmin.1,
        format_real(s.max_regularized),
        s.negative_fraction
    );
    match path {
        Some(p) => {
            std::fs::write(p, csv)
                .map_err(|e| Failure::Input(format!("cannot write {}: {e}", p.display())))?;
            writeln!(out, "{summary}")?;
        }
        None => {
            out.write_all(csv.as_bytes())?;
            writeln!(err, "{summary}")?;
        }
    }
    Ok(if s.negative_fraction > 0.0 {
        EXIT_WITNESS
    } else {
        EXIT_OK
    })
}

fn analyze(spec: &PathBuf, opts: &MinimizeOptions, json: bool, out: &mut dyn Write) -> Outcome {
    let (text, state) = load(spec)?;
    let sigma = state.covariance()?;
    let result = minimize_negativity(&sigma, opts)?;
    let report = ReportDocument::new(digest(&text), &result, opts);
    if json {
        writeln!(out, "{}", report.to_json())?;
    } else {
        writeln!(out, "verdict: {}", report.verdict)?;
        writeln!(out, "depth: {}", format_real(report.depth))?;
        writeln!(out, "best lambda: {}", join(&report.best_lambda))?;
        writeln!(out, "sigma_reg at best: {}", format_real(report.best_value))?;
        match &report.minors {
            Some(m) => writeln!(out, "minors at best: {}", join(m))?,
            None => writeln!(out, "minors at best: undefined (lambda has a zero entry)")?,
        }
        writeln!(
            out,
            "regularized minors at best: {}",
            join(&report.regularized_minors)
        )?;
        writeln!(
            out,
            "search: {}^{} coarse grid, {} starts, seed {}",
            report.parameters.effective_grid, report.modes, opts.starts, opts.seed
        )?;
    }
    Ok(if result.verdict == Verdict::EntangledWitnessed {
        EXIT_WITNESS
    } else {
        EXIT_OK
    })
}
