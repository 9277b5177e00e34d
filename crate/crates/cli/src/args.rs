//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use torusphase::numerics::QuadratureConfig;
use torusphase::{LoopSpec, TorusShape, Vec3};

use crate::error::CliError;
use crate::report::num;

#[derive(Parser, Debug, Clone)]
#[command(
    name = "torusphase",
    version,
    about = "Hannay angles and Berry phases for noncontractible loops on a revolving torus"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Hannay angle: closed form vs. anholonomy line integral
    Hannay(HannayArgs),
    /// Adiabatic rotating-frame simulation of the anholonomy shift
    Simulate(SimulateArgs),
    /// Berry phase: closed form vs. loop quadrature
    Berry(BerryArgs),
    /// Knot energies and modes from the periodic-potential eigenproblem
    Spectrum(SpectrumArgs),
    /// Berry-Hannay comparison via the derivative relation
    Compare(CompareArgs),
    /// Sweep one parameter of a nested command, emitting CSV
    Sweep(SweepArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopKind {
    Toroidal,
    Poloidal,
    Knot,
}

impl LoopKind {
    pub fn name(self) -> &'static str {
        match self {
            LoopKind::Toroidal => "toroidal",
            LoopKind::Poloidal => "poloidal",
            LoopKind::Knot => "knot",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisName {
    X,
    Y,
    Z,
}

impl AxisName {
    pub fn vec(self) -> Vec3 {
        match self {
            AxisName::X => Vec3::X,
            AxisName::Y => Vec3::Y,
            AxisName::Z => Vec3::Z,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AxisName::X => "x",
            AxisName::Y => "y",
            AxisName::Z => "z",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolKind {
    Sin2,
    Trapezoid,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormatKind {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct LoopArgs {
    /// Loop family on the torus
    #[arg(long = "loop", value_enum)]
    pub loop_kind: LoopKind,
    /// Toroidal (center-line) radius c
    #[arg(long, default_value_t = 2.0)]
    pub c: f64,
    /// Poloidal (tube) radius a; requires 0 < a < c
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// Fixed poloidal angle of a toroidal loop (radians)
    #[arg(long, default_value_t = 0.0)]
    pub theta0: f64,
    /// Fixed toroidal angle of a poloidal loop (radians)
    #[arg(long, default_value_t = 0.0)]
    pub phi0: f64,
    /// Knot toroidal winding count p
    #[arg(long)]
    pub p: Option<u32>,
    /// Knot poloidal winding count q
    #[arg(long)]
    pub q: Option<u32>,
}

impl LoopArgs {
    pub fn resolve(&self) -> Result<(LoopSpec, TorusShape), CliError> {
        let shape = TorusShape::new(self.c, self.a)?;
        let spec = match self.loop_kind {
            LoopKind::Toroidal => LoopSpec::toroidal(self.theta0)?,
            LoopKind::Poloidal => LoopSpec::poloidal(self.phi0)?,
            LoopKind::Knot => {
                let p = self.p.ok_or_else(|| {
                    CliError::Validation("--p: required for --loop knot".into())
                })?;
                let q = self.q.ok_or_else(|| {
                    CliError::Validation("--q: required for --loop knot".into())
                })?;
                LoopSpec::knot(p, q)?
            }
        };
        Ok((spec, shape))
    }

    pub fn input_value(&self) -> Value {
        let mut v = json!({
            "loop": self.loop_kind.name(),
            "c": num(self.c),
            "a": num(self.a),
        });
        let map = v.as_object_mut().unwrap();
        match self.loop_kind {
            LoopKind::Toroidal => {
                map.insert("theta0".into(), num(self.theta0));
            }
            LoopKind::Poloidal => {
                map.insert("phi0".into(), num(self.phi0));
            }
            LoopKind::Knot => {
                map.insert("p".into(), json!(self.p));
                map.insert("q".into(), json!(self.q));
            }
        }
        v
    }
}

#[derive(Args, Debug, Clone)]
pub struct QuadArgs {
    /// Initial quadrature panel count (even)
    #[arg(long = "quad-panels", default_value_t = 4096)]
    pub quad_panels: usize,
    /// Relative quadrature tolerance under panel doubling
    #[arg(long = "quad-rel-tol", default_value_t = 1e-10)]
    pub quad_rel_tol: f64,
    /// Panel doublings attempted before reporting non-convergence
    #[arg(long = "quad-checks", default_value_t = 3)]
    pub quad_checks: usize,
}

impl QuadArgs {
    pub fn config(&self) -> QuadratureConfig {
        QuadratureConfig {
            panels: self.quad_panels,
            refinement_checks: self.quad_checks,
            rel_tol: self.quad_rel_tol,
            ..Default::default()
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Report format
    #[arg(long, value_enum, default_value_t = FormatKind::Json)]
    pub format: FormatKind,
    /// Write the report to this path instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Display angles in degrees (conversion applies to output only)
    #[arg(long)]
    pub degrees: bool,
}

#[derive(Args, Debug, Clone)]
pub struct HannayArgs {
    #[command(flatten)]
    pub loop_args: LoopArgs,
    /// Reporting axis for the anholonomy integral
    #[arg(long, value_enum)]
    pub axis: Option<AxisName>,
    /// Windings about x̂
    #[arg(long)]
    pub n1: Option<i32>,
    /// Windings about ŷ
    #[arg(long)]
    pub n2: Option<i32>,
    /// Windings about ẑ
    #[arg(long)]
    pub n3: Option<i32>,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub loop_args: LoopArgs,
    /// Rotation axis (single-axis runs)
    #[arg(long, value_enum, default_value_t = AxisName::Z)]
    pub axis: AxisName,
    /// Adiabaticity parameter ε = Ω_max L / (2π p₀); mutually exclusive with --omega-max
    #[arg(long, conflicts_with = "omega_max")]
    pub epsilon: Option<f64>,
    /// Peak angular speed Ω_max
    #[arg(long = "omega-max")]
    pub omega_max: Option<f64>,
    /// Accumulated rotation ∫ Ω dt (radians)
    #[arg(long, default_value_t = std::f64::consts::TAU)]
    pub winding: f64,
    /// Ramp shape of Ω(t)
    #[arg(long, value_enum, default_value_t = ProtocolKind::Sin2)]
    pub protocol: ProtocolKind,
    /// Initial arc speed of the particle
    #[arg(long, default_value_t = 1.0)]
    pub p0: f64,
    /// Integrator steps per particle circuit
    #[arg(long = "steps-per-circuit", default_value_t = 200)]
    pub steps_per_circuit: usize,
    /// Sequential winding counts about x̂ then ŷ (overrides --axis/--winding)
    #[arg(long)]
    pub n1: Option<i32>,
    /// See --n1
    #[arg(long)]
    pub n2: Option<i32>,
    /// Request a protocol that starts at nonzero Ω (always rejected: the
    /// averaging step needs Ω(0) = 0)
    #[arg(long = "omega-start-nonzero")]
    pub omega_start_nonzero: bool,
    /// Write the sampled trajectory (t, s, p, omega) as CSV
    #[arg(long = "trajectory-out")]
    pub trajectory_out: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct BerryArgs {
    #[command(flatten)]
    pub loop_args: LoopArgs,
    /// Axis for the numeric line-integral route
    #[arg(long, value_enum, default_value_t = AxisName::Z)]
    pub axis: AxisName,
    /// Quantum number n
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    /// Reduced Planck constant
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    /// Poloidal winding about x̂
    #[arg(long)]
    pub n1: Option<i32>,
    /// Poloidal winding about ŷ
    #[arg(long)]
    pub n2: Option<i32>,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct SpectrumArgs {
    /// Toroidal (center-line) radius c
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Poloidal (tube) radius a
    #[arg(long, default_value_t = 0.01)]
    pub a: f64,
    /// Knot toroidal winding count p
    #[arg(long, default_value_t = 2)]
    pub p: u32,
    /// Knot poloidal winding count q
    #[arg(long, default_value_t = 3)]
    pub q: u32,
    /// Reduced Planck constant
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    /// Grid points of the periodic discretization
    #[arg(long, default_value_t = 2048)]
    pub grid: usize,
    /// Number of eigenpairs to return
    #[arg(long, default_value_t = 6)]
    pub k: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct CompareArgs {
    #[command(flatten)]
    pub loop_args: LoopArgs,
    /// Quantum number n
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    /// Reduced Planck constant
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    /// Poloidal winding about x̂
    #[arg(long)]
    pub n1: Option<i32>,
    /// Poloidal winding about ŷ
    #[arg(long)]
    pub n2: Option<i32>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    /// Parameter to sweep: c, a, theta0, phi0, p, q, n, epsilon, or sigma
    #[arg(long)]
    pub param: String,
    #[arg(long)]
    pub from: f64,
    #[arg(long)]
    pub to: f64,
    /// Number of grid points (at least 2)
    #[arg(long)]
    pub steps: usize,
    /// Write the CSV to this path instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Nested command and flags, e.g. `-- hannay --loop toroidal --c 2 --a 1`
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, required = true)]
    pub command: Vec<String>,
}
