//! Command dispatch for the `cnp` binary.
//!
//! Exit codes: 0 success, 2 parse error, 3 invalid state, 4 audit failure,
//! 5 unsupported mode count, 6 invalid parameter or operation, 7 internal
//! numerical cross-check failure, 8 I/O error.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::audit::{run_audit, AuditConfig, AuditKind, StateFamily};
use crate::error::{Error, Result};
use crate::invariants::{minor_invariants, partial_transpose, symplectic_eigenvalues};
use crate::io::{parse_network_file, parse_state_file, read_state_matrix, state_to_json};
use crate::polarity::{total_cnp, PolarityReport};
use crate::state::{make_state, validate, StateSpec};
use crate::symplectic::apply;

pub const EXIT_AUDIT_FAILED: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "cnp", version, about = "Classical-nonclassical polarity of Gaussian states")]
pub struct Cli {
    /// Emit machine-readable JSON at full precision.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateKindArg {
    Vacuum,
    Thermal,
    SqueezedThermal,
    Tmsv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AuditKindArg {
    Conservation,
    Theorem1,
    Theorem2,
    Oracle,
    PptConsistency,
    Biseparable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Pure,
    Mixed,
    Product,
    Biseparable,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a standard state as a state file.
    StateMake {
        kind: StateKindArg,
        #[arg(long, default_value_t = 1)]
        modes: usize,
        #[arg(long, default_value_t = 0.0)]
        r: f64,
        #[arg(long, default_value_t = 0.0)]
        phi: f64,
        #[arg(long = "nth", default_value_t = 0.0)]
        n_th: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Report symmetry, positivity and uncertainty checks for a state file.
    StateValidate { state: PathBuf },
    /// Symplectic invariants and eigenvalues, optionally after partial transposition.
    Invariants {
        state: PathBuf,
        #[arg(long)]
        pt: Option<usize>,
    },
    /// Polarity report of a state.
    Cnp { state: PathBuf },
    /// Propagate a state through a network and write the resulting state file.
    Apply {
        state: PathBuf,
        network: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a randomized audit; exits with status 4 if any trial fails.
    Audit {
        kind: AuditKindArg,
        #[arg(long, default_value_t = 2)]
        modes: usize,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        family: Option<FamilyArg>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        r_max: Option<f64>,
        #[arg(long)]
        nth_max: Option<f64>,
    },
}

/// Formats with 7 significant digits.
pub fn sig7(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-4..7).contains(&exp) {
        format!("{x:.6e}")
    } else {
        format!("{x:.*}", (6 - exp) as usize)
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    writeln!(out, "{text}")?;
    Ok(())
}

fn write_or_print(out: &mut dyn Write, path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => Ok(fs::write(p, format!("{text}\n"))?),
        None => emit(out, text),
    }
}

fn polarity_table(rep: &PolarityReport) -> String {
    let mut s = String::from("single-mode CNP\n");
    for (m, v) in rep.single.iter().enumerate() {
        s += &format!("  mode {m:<6} {:>14}\n", sig7(*v));
    }
    if !rep.pairs.is_empty() {
        s += "pair CNP (reduced two-mode states)\n";
        for (&(a, b), v) in &rep.pairs {
            let class = rep.classifications[&crate::polarity::Bipartition::Pair(a, b)];
            s += &format!("  {:<11} {:>14}  {class}\n", format!("{a}-{b}"), sig7(*v));
        }
    }
    if !rep.bipartite.is_empty() {
        s += "bipartite CNP (mode : rest)\n";
        for (&m, v) in &rep.bipartite {
            let class = rep.classifications[&crate::polarity::Bipartition::Split(m)];
            s += &format!("  {:<11} {:>14}  {class}\n", format!("{m}:rest"), sig7(*v));
        }
    }
    s += &format!("total                    {:>14}\n", sig7(rep.total));
    s += &format!("total (closed form)      {:>14}", sig7(rep.total_closed_form));
    s
}

/// Executes `cli`, writing reports to `out`. Returns the exit status on
/// success paths (0, or 4 for a failed audit).
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::StateMake { kind, modes, r, phi, n_th, output } => {
            let spec = match kind {
                StateKindArg::Vacuum => StateSpec::Vacuum,
                StateKindArg::Thermal => StateSpec::Thermal { n_th: *n_th },
                StateKindArg::SqueezedThermal => StateSpec::SqueezedThermal { r: *r, phi: *phi, n_th: *n_th },
                StateKindArg::Tmsv => StateSpec::Tmsv { r: *r },
            };
            let modes = if *kind == StateKindArg::Tmsv { 2 } else { *modes };
            let state = make_state(&spec, modes)?;
            write_or_print(out, output.as_ref(), &state_to_json(&state))?;
            Ok(0)
        }
        Command::StateValidate { state } => {
            let (matrix, _) = read_state_matrix(&fs::read_to_string(state)?)?;
            let report = validate(&matrix)?;
            if cli.json {
                let v = json!({
                    "symmetric": report.symmetric,
                    "positive": report.positive,
                    "uncertainty_ok": report.uncertainty_ok,
                    "nu_min": report.nu_min,
                    "valid": report.is_valid(),
                });
                emit(out, &serde_json::to_string_pretty(&v).expect("json"))?;
            } else {
                emit(
                    out,
                    &format!(
                        "symmetric       {}\npositive        {}\nuncertainty_ok  {}\nnu_min          {}",
                        report.symmetric,
                        report.positive,
                        report.uncertainty_ok,
                        sig7(report.nu_min)
                    ),
                )?;
            }
            match report.failure() {
                None => Ok(0),
                Some(what) => Err(Error::InvalidCovariance(format!("{what} check failed"))),
            }
        }
        Command::Invariants { state, pt } => {
            let st = parse_state_file(state)?;
            let matrix = match pt {
                Some(m) => partial_transpose(st.matrix(), *m)?,
                None => st.matrix().clone(),
            };
            let inv = minor_invariants(&matrix)?;
            let nus = symplectic_eigenvalues(&matrix)?;
            if cli.json {
                let v = json!({
                    "modes": st.n_modes(),
                    "transposed_mode": pt,
                    "invariants": inv.values,
                    "symplectic_eigenvalues": nus,
                });
                emit(out, &serde_json::to_string_pretty(&v).expect("json"))?;
            } else {
                let mark = if pt.is_some() { "~" } else { "" };
                let mut s = String::new();
                for (k, v) in inv.values.iter().enumerate() {
                    s += &format!("I{mark}_{k}   {:>14}\n", sig7(*v));
                }
                let nu_txt: Vec<String> = nus.iter().map(|v| sig7(*v)).collect();
                s += &format!("nu{mark}    {}", nu_txt.join("  "));
                emit(out, &s)?;
            }
            Ok(0)
        }
        Command::Cnp { state } => {
            let rep = total_cnp(&parse_state_file(state)?)?;
            if cli.json {
                emit(out, &serde_json::to_string_pretty(&rep).expect("json"))?;
            } else {
                emit(out, &polarity_table(&rep))?;
            }
            Ok(0)
        }
        Command::Apply { state, network, output } => {
            let st = parse_state_file(state)?;
            let net = parse_network_file(network, Some(st.n_modes()))?;
            let result = apply(&st, &net)?;
            write_or_print(out, output.as_ref(), &state_to_json(&result))?;
            Ok(0)
        }
        Command::Audit { kind, modes, trials, seed, depth, family, tol, r_max, nth_max } => {
            let kind = match kind {
                AuditKindArg::Conservation => AuditKind::Conservation,
                AuditKindArg::Theorem1 => AuditKind::Theorem1,
                AuditKindArg::Theorem2 => AuditKind::Theorem2,
                AuditKindArg::Oracle => AuditKind::Oracle,
                AuditKindArg::PptConsistency => AuditKind::PptConsistency,
                AuditKindArg::Biseparable => AuditKind::Biseparable,
            };
            let mut cfg = AuditConfig::new(kind, *modes);
            cfg.trials = *trials;
            cfg.seed = *seed;
            if let Some(d) = depth {
                cfg.depth = *d;
            }
            if let Some(f) = family {
                cfg.family = match f {
                    FamilyArg::Pure => StateFamily::Pure,
                    FamilyArg::Mixed => StateFamily::Mixed,
                    FamilyArg::Product => StateFamily::Product,
                    FamilyArg::Biseparable => StateFamily::Biseparable,
                };
            }
            if let Some(t) = tol {
                cfg.tol = *t;
            }
            if let Some(r) = r_max {
                cfg.r_max = *r;
            }
            if let Some(n) = nth_max {
                cfg.nth_max = *n;
            }
            let rep = run_audit(&cfg)?;
            if cli.json {
                emit(out, &serde_json::to_string_pretty(&rep).expect("json"))?;
            } else {
                let mut s = format!(
                    "audit {} ({} modes, {} trials, seed {})\nmax abs drift  {}\nmax rel drift  {}\nfailures       {}\n",
                    rep.kind,
                    cfg.n_modes,
                    rep.trials_run,
                    cfg.seed,
                    sig7(rep.max_abs_drift),
                    sig7(rep.max_rel_drift),
                    rep.failures.len()
                );
                for f in rep.failures.iter().take(10) {
                    s += &format!("  trial {} seed {} [{}]: {}\n", f.trial, f.seed, f.fingerprint, f.reason);
                }
                for note in &rep.notes {
                    s += &format!("note: {note}\n");
                }
                s += if rep.passed { "PASSED" } else { "FAILED" };
                emit(out, &s)?;
            }
            Ok(if rep.passed { 0 } else { EXIT_AUDIT_FAILED })
        }
    }
}
