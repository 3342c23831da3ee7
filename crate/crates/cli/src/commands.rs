use std::f64::consts::PI;

use khl_core::{
    ac_decay_probe, crosscheck_kernel, discretize, fill_metrics, hankel_section, hilbert_alt,
    hilbert_shifted, hs_divergence_scan, jacobi_eigen, lambda_of_mu, make_grid, parity_split,
    run_trace_trials, FillReport, KernelSpec, QuadRule, SectionBuilder, SymMatrix, TestFunction,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{
    AcProbeArgs, CrosscheckArgs, DivergenceArgs, FillScanArgs, OperatorKind, ParityArgs, RuleArg,
    SpectrumArgs, SsfArgs,
};
use crate::error::{CliError, ErrCtx};
use crate::report::{csv_table, fmt_float, CommandOutput, ConfigEcho};

fn operator_name(kind: OperatorKind) -> &'static str {
    match kind {
        OperatorKind::A0 => "a0",
        OperatorKind::A1 => "a1",
        OperatorKind::Kmu => "kmu",
        OperatorKind::Hilbert => "hilbert",
        OperatorKind::HilbertAlt => "hilbert-alt",
        OperatorKind::HankelSymbol => "hankel-symbol",
    }
}

fn reject_flag(given: bool, flag: &str, op: &str) -> Result<(), CliError> {
    if given {
        Err(CliError::Config(format!(
            "--{flag} does not apply to operator {op}"
        )))
    } else {
        Ok(())
    }
}

fn require_flag<T: Copy>(value: Option<T>, flag: &str, op: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Config(format!("operator {op} requires --{flag}")))
}

/// Shared operator selection used by `spectrum` and `fill-scan`: the
/// matrix at size `n`, its natural spectral interval, and the echo fields
/// actually consumed.
struct BuiltOperator {
    matrix: SymMatrix,
    interval: (f64, f64),
    echo_p: Option<f64>,
    echo_mu: Option<f64>,
    echo_length: Option<f64>,
    echo_rule: Option<String>,
}

fn build_operator(
    kind: OperatorKind,
    p: Option<f64>,
    mu: Option<f64>,
    length: Option<f64>,
    rule: Option<&RuleArg>,
    n: usize,
) -> Result<BuiltOperator, CliError> {
    let op = operator_name(kind);
    match kind {
        OperatorKind::Hilbert | OperatorKind::HilbertAlt => {
            reject_flag(mu.is_some(), "mu", op)?;
            reject_flag(length.is_some(), "L", op)?;
            reject_flag(rule.is_some(), "rule", op)?;
            let p = p.unwrap_or(0.0);
            let matrix = match kind {
                OperatorKind::Hilbert => hilbert_shifted(p, n).ctx("hilbert_shifted")?,
                _ => hilbert_alt(p, n).ctx("hilbert_alt")?,
            };
            Ok(BuiltOperator {
                matrix,
                interval: (0.0, PI),
                echo_p: Some(p),
                echo_mu: None,
                echo_length: None,
                echo_rule: None,
            })
        }
        OperatorKind::HankelSymbol => {
            reject_flag(p.is_some(), "p", op)?;
            reject_flag(mu.is_some(), "mu", op)?;
            reject_flag(length.is_some(), "L", op)?;
            reject_flag(rule.is_some(), "rule", op)?;
            Ok(BuiltOperator {
                matrix: hankel_section(n).ctx("hankel_section")?,
                interval: (-1.0, 1.0),
                echo_p: None,
                echo_mu: None,
                echo_length: None,
                echo_rule: None,
            })
        }
        OperatorKind::A0 | OperatorKind::A1 | OperatorKind::Kmu => {
            reject_flag(p.is_some(), "p", op)?;
            let length = require_flag(length, "L", op)?;
            let (spec, interval, echo_mu) = match kind {
                OperatorKind::A0 => (KernelSpec::A0, (0.0, 1.0), None),
                OperatorKind::A1 => (KernelSpec::A1, (0.0, 1.0), None),
                _ => {
                    let mu = require_flag(mu, "mu", op)?;
                    (KernelSpec::kmu(mu).ctx("kmu")?, (-1.0, 1.0), Some(mu))
                }
            };
            if kind != OperatorKind::Kmu {
                reject_flag(mu.is_some(), "mu", op)?;
            }
            let quad = rule.map_or(QuadRule::Midpoint, |r| r.0.clone());
            let grid = make_grid(length, n, quad.clone()).ctx("make_grid")?;
            Ok(BuiltOperator {
                matrix: discretize(&spec, &grid).ctx("discretize")?,
                interval,
                echo_p: None,
                echo_mu,
                echo_length: Some(length),
                echo_rule: Some(quad.to_string()),
            })
        }
    }
}

pub fn cmd_spectrum(args: &SpectrumArgs) -> Result<CommandOutput, CliError> {
    let built = build_operator(
        args.operator,
        args.p,
        args.mu,
        args.length,
        args.rule.as_ref(),
        args.size,
    )?;
    let dec = jacobi_eigen(&built.matrix, args.tol, args.max_sweeps).ctx("jacobi_eigen")?;
    let fill = fill_metrics(&dec, built.interval.0, built.interval.1).ctx("fill_metrics")?;
    let csv = csv_table(
        "index,eigenvalue",
        dec.eigenvalues()
            .iter()
            .enumerate()
            .map(|(i, &l)| format!("{i},{}", fmt_float(l))),
    );
    let config = ConfigEcho {
        operator: Some(operator_name(args.operator).into()),
        p: built.echo_p,
        mu: built.echo_mu,
        length: built.echo_length,
        size: Some(args.size),
        rule: built.echo_rule,
        tol: Some(args.tol),
        max_sweeps: Some(args.max_sweeps),
        ..ConfigEcho::default()
    };
    CommandOutput::new("spectrum", config, &fill, csv)
}

#[derive(Debug, Serialize)]
struct ParityPayload {
    half: usize,
    off_max: f64,
    even_deviation: f64,
    odd_deviation: f64,
    spectrum_union_mismatch: f64,
}

pub fn cmd_parity_check(args: &ParityArgs) -> Result<CommandOutput, CliError> {
    let n = args.half;
    if n == 0 {
        return Err(CliError::Config("--N must be at least 1".into()));
    }
    let section = hankel_section(2 * n).ctx("hankel_section")?;
    let split = parity_split(&section).ctx("parity_split")?;
    let even_ref = hilbert_alt(0.5, n).ctx("hilbert_alt")?.scale(1.0 / PI);
    let odd_ref = hilbert_alt(-0.5, n).ctx("hilbert_alt")?.scale(-1.0 / PI);
    let even_deviation = split.even.max_abs_diff(&even_ref).ctx("max_abs_diff")?;
    let odd_deviation = split.odd.max_abs_diff(&odd_ref).ctx("max_abs_diff")?;

    let full = jacobi_eigen(&section, args.tol, args.max_sweeps).ctx("jacobi_eigen")?;
    let even = jacobi_eigen(&split.even, args.tol, args.max_sweeps).ctx("jacobi_eigen")?;
    let odd = jacobi_eigen(&split.odd, args.tol, args.max_sweeps).ctx("jacobi_eigen")?;
    let mut union: Vec<f64> = even
        .eigenvalues()
        .iter()
        .chain(odd.eigenvalues())
        .copied()
        .collect();
    union.sort_by(f64::total_cmp);
    let spectrum_union_mismatch = full
        .eigenvalues()
        .iter()
        .zip(&union)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let payload = ParityPayload {
        half: n,
        off_max: split.off_max,
        even_deviation,
        odd_deviation,
        spectrum_union_mismatch,
    };
    let csv = csv_table(
        "half,off_max,even_deviation,odd_deviation,spectrum_union_mismatch",
        std::iter::once(format!(
            "{},{},{},{},{}",
            n,
            fmt_float(payload.off_max),
            fmt_float(payload.even_deviation),
            fmt_float(payload.odd_deviation),
            fmt_float(payload.spectrum_union_mismatch),
        )),
    );
    let config = ConfigEcho {
        size: Some(n),
        tol: Some(args.tol),
        max_sweeps: Some(args.max_sweeps),
        ..ConfigEcho::default()
    };
    CommandOutput::new("parity-check", config, &payload, csv)
}

#[derive(Debug, Serialize)]
struct SsfPayload {
    max_abs_diff: f64,
    records: Vec<khl_core::TrialRecord>,
}

pub fn cmd_ssf_demo(args: &SsfArgs, seed: u64) -> Result<CommandOutput, CliError> {
    let records =
        run_trace_trials(args.trials, args.dim, args.degree, seed).ctx("run_trace_trials")?;
    let max_abs_diff = records
        .iter()
        .map(|r| r.check.abs_diff)
        .fold(0.0, f64::max);
    let csv = csv_table(
        "trial,seed,coupling,lhs,rhs,abs_diff,interlacing_violation",
        records.iter().map(|r| {
            format!(
                "{},{},{},{},{},{},{}",
                r.trial,
                r.seed,
                fmt_float(r.coupling),
                fmt_float(r.check.lhs),
                fmt_float(r.check.rhs),
                fmt_float(r.check.abs_diff),
                fmt_float(r.interlacing_violation),
            )
        }),
    );
    let payload = SsfPayload {
        max_abs_diff,
        records,
    };
    let config = ConfigEcho {
        size: Some(args.dim),
        seed: Some(seed),
        trials: Some(args.trials),
        degree: Some(args.degree),
        ..ConfigEcho::default()
    };
    CommandOutput::new("ssf-demo", config, &payload, csv)
}

pub fn cmd_divergence(args: &DivergenceArgs) -> Result<CommandOutput, CliError> {
    let lambda = lambda_of_mu(args.mu).ctx("lambda_of_mu")?;
    let nodes_per_unit = 10.0 * lambda.sqrt().max(1.0);
    let scan =
        hs_divergence_scan(args.mu, &args.lengths, nodes_per_unit).ctx("hs_divergence_scan")?;
    let csv = csv_table(
        "L,ln_L,frob_sq",
        scan.lengths
            .iter()
            .zip(&scan.frob_sq)
            .map(|(&l, &f)| format!("{},{},{}", fmt_float(l), fmt_float(l.ln()), fmt_float(f))),
    );
    let config = ConfigEcho {
        mu: Some(args.mu),
        lengths: Some(args.lengths.clone()),
        ..ConfigEcho::default()
    };
    CommandOutput::new("divergence", config, &scan, csv)
}

pub fn cmd_crosscheck(args: &CrosscheckArgs) -> Result<CommandOutput, CliError> {
    let quad = args
        .rule
        .as_ref()
        .map_or(QuadRule::Midpoint, |r| r.0.clone());
    let grid = make_grid(args.length, args.size, quad.clone()).ctx("make_grid")?;
    // default probes: three gaussians spread over the window, widths scaled
    // so each has negligible mass beyond the truncation
    let centers = [args.length / 20.0, args.length / 8.0, args.length / 4.0];
    let width = args.length / 40.0;
    let mut tests = Vec::new();
    for (i, &cf) in centers.iter().enumerate() {
        for &cg in &centers[i..] {
            tests.push((
                TestFunction::gaussian(cf, width).ctx("gaussian")?,
                TestFunction::gaussian(cg, width).ctx("gaussian")?,
            ));
        }
    }
    let report = crosscheck_kernel(args.mu, &grid, &tests).ctx("crosscheck_kernel")?;
    let csv = csv_table(
        "pair,projection_form,kernel_form,discrepancy,discrepancy_flipped",
        report.pairs.iter().enumerate().map(|(i, p)| {
            format!(
                "{},{},{},{},{}",
                i,
                fmt_float(p.projection_form),
                fmt_float(p.kernel_form),
                fmt_float(p.discrepancy),
                fmt_float(p.discrepancy_flipped),
            )
        }),
    );
    let config = ConfigEcho {
        mu: Some(args.mu),
        length: Some(args.length),
        size: Some(args.size),
        rule: Some(quad.to_string()),
        ..ConfigEcho::default()
    };
    CommandOutput::new("crosscheck", config, &report, csv)
}

#[derive(Debug, Serialize)]
struct SizedFill {
    size: usize,
    fill: FillReport,
}

#[derive(Debug, Serialize)]
struct FillScanPayload {
    operator: String,
    reports: Vec<SizedFill>,
}

pub fn cmd_fill_scan(args: &FillScanArgs) -> Result<CommandOutput, CliError> {
    // validate the flag combination once up front, off the scan path
    let probe = build_operator(
        args.operator,
        args.p,
        args.mu,
        args.length,
        args.rule.as_ref(),
        *args.sizes.iter().min().expect("clap requires sizes"),
    )?;
    let reports: Vec<SizedFill> = args
        .sizes
        .par_iter()
        .map(|&n| {
            let built = build_operator(
                args.operator,
                args.p,
                args.mu,
                args.length,
                args.rule.as_ref(),
                n,
            )?;
            let dec = jacobi_eigen(&built.matrix, args.tol, args.max_sweeps).ctx("jacobi_eigen")?;
            let fill =
                fill_metrics(&dec, built.interval.0, built.interval.1).ctx("fill_metrics")?;
            Ok(SizedFill { size: n, fill })
        })
        .collect::<Result<_, CliError>>()?;
    let payload = FillScanPayload {
        operator: operator_name(args.operator).into(),
        reports,
    };
    let csv = csv_table(
        "size,min_eig,max_eig,max_gap,count_outside",
        payload.reports.iter().map(|r| {
            format!(
                "{},{},{},{},{}",
                r.size,
                fmt_float(r.fill.min_eig),
                fmt_float(r.fill.max_eig),
                fmt_float(r.fill.max_gap),
                r.fill.count_outside,
            )
        }),
    );
    let config = ConfigEcho {
        operator: Some(operator_name(args.operator).into()),
        p: probe.echo_p,
        mu: probe.echo_mu,
        length: probe.echo_length,
        rule: probe.echo_rule,
        sizes: Some(args.sizes.clone()),
        tol: Some(args.tol),
        max_sweeps: Some(args.max_sweeps),
        ..ConfigEcho::default()
    };
    CommandOutput::new("fill-scan", config, &payload, csv)
}

pub fn cmd_ac_probe(args: &AcProbeArgs) -> Result<CommandOutput, CliError> {
    let op = operator_name(args.operator);
    let builder = match args.operator {
        OperatorKind::HankelSymbol => {
            reject_flag(args.p.is_some(), "p", op)?;
            reject_flag(args.mu.is_some(), "mu", op)?;
            reject_flag(args.length.is_some(), "L", op)?;
            SectionBuilder::Hankel
        }
        OperatorKind::Hilbert => {
            reject_flag(args.mu.is_some(), "mu", op)?;
            reject_flag(args.length.is_some(), "L", op)?;
            SectionBuilder::Hilbert {
                p: args.p.unwrap_or(0.0),
            }
        }
        OperatorKind::Kmu => {
            reject_flag(args.p.is_some(), "p", op)?;
            SectionBuilder::Kmu {
                mu: require_flag(args.mu, "mu", op)?,
                length: require_flag(args.length, "L", op)?,
            }
        }
        _ => {
            return Err(CliError::Config(format!(
                "operator {op} has no growing-section family; use hankel-symbol, hilbert, or kmu"
            )))
        }
    };
    let report = ac_decay_probe(&builder, &args.sizes, 0).ctx("ac_decay_probe")?;
    let csv = csv_table(
        "size,max_atom",
        report
            .sizes
            .iter()
            .zip(&report.max_atoms)
            .map(|(&n, &a)| format!("{n},{}", fmt_float(a))),
    );
    let config = ConfigEcho {
        operator: Some(op.into()),
        p: match builder {
            SectionBuilder::Hilbert { p } => Some(p),
            _ => None,
        },
        mu: args.mu,
        length: args.length,
        sizes: Some(args.sizes.clone()),
        ..ConfigEcho::default()
    };
    CommandOutput::new("ac-probe", config, &report, csv)
}
