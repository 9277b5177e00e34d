//! Parameter sweeps over a nested command, emitted as one CSV table.
//!
//! Rows evaluate concurrently (over the batch helper, so the `parallel`
//! feature of the core crate governs threading) but are emitted in grid
//! order, so output is deterministic regardless of completion order.

use clap::Parser;
use serde_json::Value;
use torusphase::batch::map_batch;

use crate::args::{Cli, Command, SweepArgs};
use crate::commands;
use crate::error::CliError;
use crate::report::{csv_cell, emit, flatten, Report};

const PARAMS: &[&str] = &[
    "c", "a", "theta0", "phi0", "p", "q", "n", "epsilon", "sigma",
];
const INTEGER_PARAMS: &[&str] = &["p", "q", "n"];

fn sweep_values(args: &SweepArgs) -> Result<Vec<f64>, CliError> {
    if !PARAMS.contains(&args.param.as_str()) {
        return Err(CliError::Validation(format!(
            "--param: unknown parameter '{}' (expected one of {})",
            args.param,
            PARAMS.join(", ")
        )));
    }
    if args.steps < 2 {
        return Err(CliError::Validation(format!(
            "--steps: {} (need at least 2 grid points)",
            args.steps
        )));
    }
    if !(args.from.is_finite() && args.to.is_finite()) {
        return Err(CliError::Validation(
            "--from/--to: bounds must be finite".into(),
        ));
    }
    let n = args.steps;
    let values: Vec<f64> = (0..n)
        .map(|i| args.from + (args.to - args.from) * i as f64 / (n - 1) as f64)
        .collect();
    if INTEGER_PARAMS.contains(&args.param.as_str()) {
        for v in &values {
            if (v - v.round()).abs() > 1e-9 || *v < 0.0 {
                return Err(CliError::Validation(format!(
                    "--param {}: integer parameter swept over a non-integer grid (value {v})",
                    args.param
                )));
            }
        }
    }
    Ok(values)
}

fn apply_param(cmd: &mut Command, name: &str, value: f64) -> Result<(), CliError> {
    let unsupported = |what: &str| {
        Err(CliError::Validation(format!(
            "--param {name}: not a parameter of the nested '{what}' command"
        )))
    };
    macro_rules! loop_field {
        ($args:expr) => {{
            let la = &mut $args.loop_args;
            match name {
                "c" => la.c = value,
                "a" => la.a = value,
                "theta0" => la.theta0 = value,
                "phi0" => la.phi0 = value,
                "p" => la.p = Some(value.round() as u32),
                "q" => la.q = Some(value.round() as u32),
                "sigma" => la.a = la.c / value,
                _ => return unsupported("loop"),
            }
            Ok(())
        }};
    }
    match cmd {
        Command::Hannay(args) => loop_field!(args),
        Command::Simulate(args) => {
            if name == "epsilon" {
                args.epsilon = Some(value);
                args.omega_max = None;
                Ok(())
            } else {
                loop_field!(args)
            }
        }
        Command::Berry(args) => {
            if name == "n" {
                args.n = value.round() as u32;
                Ok(())
            } else {
                loop_field!(args)
            }
        }
        Command::Compare(args) => {
            if name == "n" {
                args.n = value.round() as u32;
                Ok(())
            } else {
                loop_field!(args)
            }
        }
        Command::Spectrum(args) => {
            match name {
                "c" => args.c = value,
                "a" => args.a = value,
                "p" => args.p = value.round() as u32,
                "q" => args.q = value.round() as u32,
                "sigma" => args.a = args.c / value,
                _ => return unsupported("spectrum"),
            }
            Ok(())
        }
        Command::Sweep(_) => Err(CliError::Validation(
            "sweep: nested sweeps are not supported".into(),
        )),
    }
}

fn run_nested(cmd: &Command) -> Result<Report, CliError> {
    match cmd {
        Command::Hannay(args) => commands::run_hannay(args),
        Command::Simulate(args) => commands::run_simulate(args),
        Command::Berry(args) => commands::run_berry(args),
        Command::Spectrum(args) => commands::run_spectrum(args),
        Command::Compare(args) => commands::run_compare(args),
        Command::Sweep(_) => Err(CliError::Validation(
            "sweep: nested sweeps are not supported".into(),
        )),
    }
}

pub fn run_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let values = sweep_values(args)?;
    let mut argv = vec!["torusphase".to_string()];
    argv.extend(args.command.iter().cloned());
    let nested = Cli::try_parse_from(&argv)
        .map_err(|e| CliError::Validation(format!("nested command: {e}")))?
        .command;
    if matches!(nested, Command::Sweep(_)) {
        return Err(CliError::Validation(
            "sweep: nested sweeps are not supported".into(),
        ));
    }
    // Fail fast if the parameter does not apply at all.
    {
        let mut probe = nested.clone();
        apply_param(&mut probe, &args.param, values[0])?;
    }

    let rows: Vec<(f64, Result<Value, CliError>)> = map_batch(&values, |&v| {
        let mut cmd = nested.clone();
        let report = apply_param(&mut cmd, &args.param, v)
            .and_then(|_| run_nested(&cmd))
            .map(|r| r.result);
        (v, report)
    });

    let header_fields: Vec<String> = rows
        .iter()
        .find_map(|(_, r)| r.as_ref().ok())
        .map(|result| {
            let mut flat = Vec::new();
            flatten("", result, &mut flat);
            flat.into_iter().map(|(k, _)| k).collect()
        })
        .unwrap_or_default();

    if header_fields.is_empty() {
        // Every row failed; report the first failure.
        let (_, first) = rows.into_iter().next().expect("at least two rows");
        return Err(first.err().expect("all rows failed"));
    }

    let mut csv = String::new();
    csv.push_str(&args.param);
    for key in &header_fields {
        csv.push(',');
        csv.push_str(key);
    }
    csv.push_str(",error\n");
    for (value, row) in &rows {
        csv.push_str(&crate::report::sig15(*value).to_string());
        match row {
            Ok(result) => {
                let mut flat = Vec::new();
                flatten("", result, &mut flat);
                for key in &header_fields {
                    csv.push(',');
                    if let Some((_, v)) = flat.iter().find(|(k, _)| k == key) {
                        csv.push_str(&csv_cell(v));
                    }
                }
                csv.push_str(",\n");
            }
            Err(err) => {
                for _ in &header_fields {
                    csv.push(',');
                }
                csv.push(',');
                csv.push_str(&csv_cell(&Value::String(err.to_string())));
                csv.push('\n');
            }
        }
    }

    emit(&csv, args.out.as_deref())
}
