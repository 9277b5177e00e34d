//! Report builders for the single-computation subcommands.

use std::f64::consts::TAU;

use serde_json::{json, Map, Value};
use torusphase::classical::{
    anholonomy_integral_with, hannay_angle_analytic, hannay_angle_numeric_with, RotationAxis,
};
use torusphase::dynamics::{
    adiabatic_config, averaged_shift_prediction, simulate, simulate_sequence, ProtocolShape,
    RotationProtocol, SimResult,
};
use torusphase::geometry::Curve;
use torusphase::quantum::{
    berry_phase_analytic, berry_phase_numeric_with, hannay_from_berry, knot_rotor_energy,
    knot_spectrum, KnotQuantumProblem, QuantumConfig,
};
use torusphase::{LoopSpec, Vec3};

use crate::args::{
    AxisName, BerryArgs, CompareArgs, HannayArgs, LoopKind, ProtocolKind, SimulateArgs,
    SpectrumArgs,
};
use crate::error::CliError;
use crate::report::{emit, meta_block, num, sig15, vec3_value, Report};

impl ProtocolKind {
    fn shape(self) -> ProtocolShape {
        match self {
            ProtocolKind::Sin2 => ProtocolShape::Sin2,
            ProtocolKind::Trapezoid => ProtocolShape::Trapezoid,
        }
    }

    fn name(self) -> &'static str {
        match self {
            ProtocolKind::Sin2 => "sin2",
            ProtocolKind::Trapezoid => "trapezoid",
        }
    }
}

/// Resolve the (axis, windings) pair: explicit windings win; otherwise one
/// winding about the requested axis, defaulting to ẑ for toroidal loops and
/// knots and x̂ for poloidal loops.
fn resolve_rotation(
    kind: LoopKind,
    axis: Option<AxisName>,
    n1: Option<i32>,
    n2: Option<i32>,
    n3: Option<i32>,
) -> Result<(RotationAxis, (i32, i32, i32)), CliError> {
    let windings_given = n1.is_some() || n2.is_some() || n3.is_some();
    let windings = if windings_given {
        (n1.unwrap_or(0), n2.unwrap_or(0), n3.unwrap_or(0))
    } else {
        let default_axis = axis.unwrap_or(match kind {
            LoopKind::Poloidal => AxisName::X,
            _ => AxisName::Z,
        });
        match default_axis {
            AxisName::X => (1, 0, 0),
            AxisName::Y => (0, 1, 0),
            AxisName::Z => (0, 0, 1),
        }
    };
    let report_axis = match axis {
        Some(name) => name.vec(),
        None => {
            if windings.0 != 0 {
                Vec3::X
            } else if windings.1 != 0 {
                Vec3::Y
            } else {
                Vec3::Z
            }
        }
    };
    Ok((RotationAxis::new(report_axis, windings)?, windings))
}

pub fn run_hannay(args: &HannayArgs) -> Result<Report, CliError> {
    let (spec, shape) = args.loop_args.resolve()?;
    let (rot, windings) =
        resolve_rotation(args.loop_args.loop_kind, args.axis, args.n1, args.n2, args.n3)?;
    let cfg = args.quad.config();

    let analytic = hannay_angle_analytic(&spec, &shape, &rot)?;
    let numeric = hannay_angle_numeric_with(&spec, &shape, &rot, &cfg)?;
    let rel_diff = (numeric.angle - analytic).abs() / analytic.abs().max(f64::MIN_POSITIVE);

    let mut input = args.loop_args.input_value();
    {
        let map = input.as_object_mut().unwrap();
        map.insert(
            "axis".into(),
            json!(args.axis.map(AxisName::name).unwrap_or("auto")),
        );
        map.insert("n1".into(), json!(windings.0));
        map.insert("n2".into(), json!(windings.1));
        map.insert("n3".into(), json!(windings.2));
    }

    Ok(Report {
        input,
        result: json!({
            "length": num(numeric.length),
            "areas": vec3_value(numeric.areas),
            "anholonomy": num(numeric.anholonomy_integral),
            "displacement": num(numeric.displacement),
            "angle_analytic": num(analytic),
            "angle_numeric": num(numeric.angle),
            "rel_diff": num(rel_diff),
        }),
        angle_keys: &["angle_analytic", "angle_numeric"],
        meta: meta_block(args.quad.quad_rel_tol, args.quad.quad_panels),
    })
}

fn protocol_phases(args: &SimulateArgs, length: f64) -> Result<Vec<RotationProtocol>, CliError> {
    let shape = args.protocol.shape();
    let peak = match (args.epsilon, args.omega_max) {
        (Some(eps), None) => {
            if !(eps > 0.0) {
                return Err(CliError::Validation(format!(
                    "--epsilon: {eps} must be positive"
                )));
            }
            eps * TAU * args.p0.abs() / length
        }
        (None, Some(peak)) => peak,
        (None, None) => 1e-2 * TAU * args.p0.abs() / length,
        (Some(_), Some(_)) => unreachable!("clap enforces the conflict"),
    };

    let n1 = args.n1.unwrap_or(0);
    let n2 = args.n2.unwrap_or(0);
    if n1 != 0 || n2 != 0 {
        let mut phases = Vec::new();
        for (n, axis) in [(n1, Vec3::X), (n2, Vec3::Y)] {
            if n != 0 {
                let signed_axis = if n < 0 { -axis } else { axis };
                phases.push(RotationProtocol::new(
                    signed_axis,
                    shape,
                    peak,
                    n.unsigned_abs() as f64 * args.winding,
                )?);
            }
        }
        Ok(phases)
    } else {
        Ok(vec![RotationProtocol::new(
            args.axis.vec(),
            shape,
            peak,
            args.winding,
        )?])
    }
}

fn trajectory_csv(result: &SimResult) -> String {
    let mut out = String::from("t,s,p,omega\n");
    for sample in &result.samples {
        out.push_str(&format!(
            "{},{},{},{}\n",
            sig15(sample.t),
            sig15(sample.s),
            sig15(sample.p),
            sig15(sample.omega)
        ));
    }
    out
}

pub fn run_simulate(args: &SimulateArgs) -> Result<Report, CliError> {
    if args.omega_start_nonzero {
        return Err(CliError::Validation(
            "--omega-start-nonzero: rotation protocols must start from rest (Ω(0) = 0), so this \
             request cannot be honored"
                .into(),
        ));
    }
    if args.p0 == 0.0 || !args.p0.is_finite() {
        return Err(CliError::Validation(format!(
            "--p0: {} must be nonzero and finite",
            args.p0
        )));
    }
    let (spec, shape) = args.loop_args.resolve()?;
    let curve = Curve::new(spec, shape);
    let length = curve.arc_length()?;
    let phases = protocol_phases(args, length)?;

    let result = if phases.len() == 1 {
        let cfg = adiabatic_config(&phases[0], args.p0, length, args.steps_per_circuit);
        simulate(&spec, &shape, &phases[0], args.p0, &cfg)?
    } else {
        simulate_sequence(&spec, &shape, &phases, args.p0, args.steps_per_circuit)?
    };

    let mut analytic_shift = 0.0;
    for proto in &phases {
        analytic_shift += averaged_shift_prediction(&spec, &shape, proto)?;
    }
    let analytic_angle = TAU * analytic_shift / length;
    let abs_error = (result.angle - analytic_angle).abs();
    let rel_error = if analytic_angle != 0.0 {
        Some(abs_error / analytic_angle.abs())
    } else {
        None
    };

    if let Some(path) = &args.trajectory_out {
        std::fs::write(path, trajectory_csv(&result)).map_err(|e| {
            CliError::Io(format!("--trajectory-out {}: {e}", path.display()))
        })?;
    }

    let mut input = args.loop_args.input_value();
    {
        let map = input.as_object_mut().unwrap();
        map.insert("axis".into(), json!(args.axis.name()));
        map.insert("epsilon".into(), num(result.adiabaticity));
        map.insert("winding".into(), num(args.winding));
        map.insert("protocol".into(), json!(args.protocol.name()));
        map.insert("p0".into(), num(args.p0));
        map.insert("steps_per_circuit".into(), json!(args.steps_per_circuit));
        map.insert("n1".into(), json!(args.n1.unwrap_or(0)));
        map.insert("n2".into(), json!(args.n2.unwrap_or(0)));
    }

    let mut result_map = Map::new();
    result_map.insert("length".into(), num(result.length));
    result_map.insert("shift".into(), num(result.shift));
    result_map.insert("angle".into(), num(result.angle));
    result_map.insert("epsilon".into(), num(result.adiabaticity));
    result_map.insert("analytic_angle".into(), num(analytic_angle));
    result_map.insert("abs_error".into(), num(abs_error));
    result_map.insert(
        "rel_error".into(),
        rel_error.map(num).unwrap_or(Value::Null),
    );
    result_map.insert("baseline_s".into(), num(result.baseline_final.s));
    result_map.insert("duration".into(), num(result.final_state.t));

    Ok(Report {
        input,
        result: Value::Object(result_map),
        angle_keys: &["angle", "analytic_angle"],
        meta: meta_block(1e-10, 4096),
    })
}

pub fn run_berry(args: &BerryArgs) -> Result<Report, CliError> {
    let (spec, shape) = args.loop_args.resolve()?;
    let qc = QuantumConfig::new(args.hbar, args.n)?;
    let cfg = args.quad.config();
    let windings = match args.loop_args.loop_kind {
        LoopKind::Poloidal => (args.n1.unwrap_or(1), args.n2.unwrap_or(0)),
        _ => (args.n1.unwrap_or(0), args.n2.unwrap_or(0)),
    };

    let analytic = berry_phase_analytic(&spec, &shape, &qc, windings)?;
    let numeric = berry_phase_numeric_with(&spec, &shape, &qc, args.axis.vec(), &cfg)?;
    let abs_diff = (numeric - analytic).abs();

    let mut input = args.loop_args.input_value();
    {
        let map = input.as_object_mut().unwrap();
        map.insert("axis".into(), json!(args.axis.name()));
        map.insert("n".into(), json!(args.n));
        map.insert("hbar".into(), num(args.hbar));
        map.insert("n1".into(), json!(windings.0));
        map.insert("n2".into(), json!(windings.1));
    }

    let length = Curve::new(spec, shape).arc_length()?;
    Ok(Report {
        input,
        result: json!({
            "length": num(length),
            "gamma_analytic": num(analytic),
            "gamma_numeric": num(numeric),
            "abs_diff": num(abs_diff),
            "rel_diff": num(abs_diff / analytic.abs().max(f64::MIN_POSITIVE)),
        }),
        angle_keys: &["gamma_analytic", "gamma_numeric"],
        meta: meta_block(args.quad.quad_rel_tol, args.quad.quad_panels),
    })
}

pub fn run_spectrum(args: &SpectrumArgs) -> Result<Report, CliError> {
    let shape = torusphase::TorusShape::new(args.c, args.a)?;
    let prob = KnotQuantumProblem::new(shape, args.p, args.q, args.hbar, args.grid)?;
    let spectrum = knot_spectrum(&prob, args.k)?;
    let levels = spectrum.distinct_levels(1e-3);
    let rotor: Vec<Value> = (1..levels.len().max(2))
        .map(|n| num(knot_rotor_energy(&prob, n as u32)))
        .collect();

    Ok(Report {
        input: json!({
            "c": num(args.c),
            "a": num(args.a),
            "p": args.p,
            "q": args.q,
            "hbar": num(args.hbar),
            "grid": args.grid,
            "k": args.k,
        }),
        result: json!({
            "sigma": num(prob.sigma()),
            "omega": num(prob.omega()),
            "energies": spectrum.energies.iter().map(|&e| num(e)).collect::<Vec<_>>(),
            "distinct_levels": levels.iter().map(|&e| num(e)).collect::<Vec<_>>(),
            "degeneracy_pairs": spectrum.degeneracy_pairs,
            "rotor_reference": rotor,
        }),
        angle_keys: &[],
        meta: meta_block(1e-10, 4096),
    })
}

pub fn run_compare(args: &CompareArgs) -> Result<Report, CliError> {
    let (spec, shape) = args.loop_args.resolve()?;
    let qc = QuantumConfig::new(args.hbar, args.n)?;
    let windings = match args.loop_args.loop_kind {
        LoopKind::Poloidal => (args.n1.unwrap_or(1), args.n2.unwrap_or(0)),
        _ => (args.n1.unwrap_or(0), args.n2.unwrap_or(0)),
    };

    let res = hannay_from_berry(&spec, &shape, &qc, windings)?;
    let qc_next = QuantumConfig::new(args.hbar, args.n + 1)?;
    let gamma_next = berry_phase_analytic(&spec, &shape, &qc_next, windings)?;

    let mut input = args.loop_args.input_value();
    {
        let map = input.as_object_mut().unwrap();
        map.insert("n".into(), json!(args.n));
        map.insert("hbar".into(), num(args.hbar));
        map.insert("n1".into(), json!(windings.0));
        map.insert("n2".into(), json!(windings.1));
    }

    let mut result = Map::new();
    result.insert("gamma_n".into(), num(res.gamma));
    result.insert("gamma_n_plus_1".into(), num(gamma_next));
    result.insert("hannay_from_berry".into(), num(res.hannay_from_berry));
    result.insert("classical_angle".into(), num(res.classical_angle));
    result.insert("ratio".into(), num(res.ratio));
    if matches!(spec, LoopSpec::Poloidal { .. }) {
        // The semiclassical route exceeds the classical one by c/a here.
        result.insert("mismatch_factor_c_over_a".into(), num(args.loop_args.c / args.loop_args.a));
    }

    Ok(Report {
        input,
        result: Value::Object(result),
        angle_keys: &[
            "gamma_n",
            "gamma_n_plus_1",
            "hannay_from_berry",
            "classical_angle",
        ],
        meta: meta_block(1e-10, 4096),
    })
}

/// Anholonomy line integral with explicit quadrature control; used by the
/// sweep error-path tests and exposed through `hannay`.
pub fn checked_anholonomy(
    spec: &LoopSpec,
    shape: &torusphase::TorusShape,
    axis: Vec3,
    cfg: &torusphase::numerics::QuadratureConfig,
) -> Result<f64, CliError> {
    Ok(anholonomy_integral_with(spec, shape, axis, cfg)?)
}

/// Emit a finished report in the requested format.
pub fn finish(mut report: Report, output: &crate::args::OutputArgs) -> Result<(), CliError> {
    if output.degrees {
        report.convert_to_degrees();
    }
    let text = match output.format {
        crate::args::FormatKind::Json => report.to_json_string(),
        crate::args::FormatKind::Csv => report.to_csv_string(),
    };
    emit(&text, output.out.as_deref())
}
