//! CLI error classification and the exit-code contract:
//! 0 success, 2 validation, 3 numerics, 4 I/O.

use std::fmt;

use torusphase::Error as CoreError;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numerics(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerics(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(msg) | CliError::Numerics(msg) | CliError::Io(msg) => {
                f.write_str(msg)
            }
        }
    }
}

/// Flag spelling for a core parameter name, so error messages point at the
/// offending command-line flag.
fn flag_for(name: &str) -> &'static str {
    match name {
        "axis" => "--axis",
        "panels" => "--quad-panels",
        "rel_tol" => "--quad-rel-tol",
        "abs_tol" => "--quad-rel-tol",
        "refinement_checks" => "--quad-checks",
        "step" | "t_end" | "record_stride" => "--steps-per-circuit",
        "hbar" => "--hbar",
        "n" => "--n",
        "grid_size" => "--grid",
        "k" => "--k",
        "p0" => "--p0",
        "length" => "--c/--a",
        "period" => "--grid",
        _ => "--",
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        match &err {
            CoreError::InvalidShape { .. } => CliError::Validation(format!("--c/--a: {err}")),
            CoreError::InvalidLoop { .. } => {
                CliError::Validation(format!("--loop/--theta0/--phi0/--p/--q: {err}"))
            }
            CoreError::InvalidProtocol { .. } => CliError::Validation(format!(
                "--protocol/--epsilon/--omega-max/--winding: {err}"
            )),
            CoreError::InvalidParameter { name, .. } => {
                CliError::Validation(format!("{}: {err}", flag_for(name)))
            }
            CoreError::QuadratureNonConvergence { .. }
            | CoreError::OdeNonFinite { .. }
            | CoreError::Eigen { .. } => CliError::Numerics(err.to_string()),
        }
    }
}
