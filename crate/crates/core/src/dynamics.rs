//! Rotating-frame Newtonian dynamics for a particle constrained to a loop on
//! a revolving torus, and the loop-averaged shift predictions it converges to.
//!
//! The tangential equation of motion is
//!
//! ```text
//! s̈ = t · (Ω² r - (Ω · r) Ω - Ω̇ × r)
//! ```
//!
//! with the Coriolis force omitted: it is normal to the constrained path and
//! never enters the tangential projection. The anholonomy shift is extracted
//! by a paired baseline run (identical initial conditions, Ω ≡ 0) so that
//! integrator bias cancels to first order.

use std::f64::consts::TAU;

use crate::geometry::{Curve, LoopSpec, TorusShape};
use crate::numerics::{integrate_periodic, solve_ode, OdeConfig, QuadratureConfig};
use crate::vec3::Vec3;
use crate::{Error, Result};

/// Ramp shape of the rotation protocol. Both shapes start and end at zero
/// angular velocity, which the averaging step requires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProtocolShape {
    /// Ω(t) = Ω_max sin²(π t / T).
    #[default]
    Sin2,
    /// Linear ramp up over T/3, plateau T/3, ramp down over T/3.
    Trapezoid,
}

/// Time-dependent rotation of the torus about a fixed axis.
///
/// The duration is derived from the peak rate and the target winding so that
/// ∫₀ᵀ Ω dt equals `target_winding` exactly.
#[derive(Debug, Clone, Copy)]
pub struct RotationProtocol {
    pub axis: Vec3,
    /// Ω_max (rad / time unit).
    pub peak: f64,
    /// Total protocol duration T.
    pub duration: f64,
    pub shape: ProtocolShape,
    /// ∫₀ᵀ Ω dt, typically 2π per winding.
    pub target_winding: f64,
}

impl RotationProtocol {
    /// Protocol with a given peak rate, normalized to the target winding.
    pub fn new(axis: Vec3, shape: ProtocolShape, peak: f64, target_winding: f64) -> Result<Self> {
        if !axis.is_finite() || !axis.is_unit(1e-12) {
            return Err(Error::InvalidProtocol {
                reason: format!("|axis| = {} (must be 1 within 1e-12)", axis.norm()),
            });
        }
        if !(peak > 0.0 && peak.is_finite()) {
            return Err(Error::InvalidProtocol {
                reason: format!("peak rate {peak} must be positive"),
            });
        }
        if !(target_winding != 0.0 && target_winding.is_finite()) {
            return Err(Error::InvalidProtocol {
                reason: format!("target winding {target_winding} must be nonzero"),
            });
        }
        let duration = match shape {
            ProtocolShape::Sin2 => 2.0 * target_winding / peak,
            ProtocolShape::Trapezoid => 3.0 * target_winding / (2.0 * peak),
        };
        if !(duration > 0.0) {
            return Err(Error::InvalidProtocol {
                reason: "winding and peak rate must have the same sign".into(),
            });
        }
        Ok(RotationProtocol {
            axis,
            peak,
            duration,
            shape,
            target_winding,
        })
    }

    /// Protocol sized by the adiabaticity parameter ε = Ω_max L / (2π p₀).
    pub fn from_epsilon(
        axis: Vec3,
        shape: ProtocolShape,
        epsilon: f64,
        target_winding: f64,
        p0: f64,
        length: f64,
    ) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidProtocol {
                reason: format!("epsilon {epsilon} must be positive"),
            });
        }
        let peak = epsilon * TAU * p0.abs() / length;
        RotationProtocol::new(axis, shape, peak, target_winding)
    }

    /// The identically-zero protocol over `duration` (no rotation at all).
    pub fn zero(duration: f64) -> Self {
        RotationProtocol {
            axis: Vec3::Z,
            peak: 0.0,
            duration,
            shape: ProtocolShape::Sin2,
            target_winding: 0.0,
        }
    }

    /// |Ω|(t); zero at the endpoints and outside [0, duration].
    pub fn omega_mag(&self, t: f64) -> f64 {
        if t <= 0.0 || t >= self.duration || self.peak == 0.0 {
            return 0.0;
        }
        match self.shape {
            ProtocolShape::Sin2 => {
                let s = (std::f64::consts::PI * t / self.duration).sin();
                self.peak * s * s
            }
            ProtocolShape::Trapezoid => {
                let third = self.duration / 3.0;
                if t < third {
                    self.peak * t / third
                } else if t < 2.0 * third {
                    self.peak
                } else {
                    self.peak * (self.duration - t) / third
                }
            }
        }
    }

    /// d|Ω|/dt (t); zero outside [0, duration].
    pub fn omega_dot_mag(&self, t: f64) -> f64 {
        if t < 0.0 || t > self.duration || self.peak == 0.0 {
            return 0.0;
        }
        match self.shape {
            ProtocolShape::Sin2 => {
                let arg = std::f64::consts::PI * t / self.duration;
                self.peak * std::f64::consts::PI / self.duration * (2.0 * arg).sin()
            }
            ProtocolShape::Trapezoid => {
                let third = self.duration / 3.0;
                if t < third {
                    self.peak / third
                } else if t < 2.0 * third {
                    0.0
                } else {
                    -self.peak / third
                }
            }
        }
    }

    pub fn omega(&self, t: f64) -> Vec3 {
        self.axis * self.omega_mag(t)
    }

    pub fn omega_dot(&self, t: f64) -> Vec3 {
        self.axis * self.omega_dot_mag(t)
    }
}

/// Five-point Gauss-Legendre on [a, b]; exact through degree 9, used for the
/// cumulative arc-length table and start-of-interval corrections.
fn gauss5<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    const X: [f64; 5] = [
        -0.906179845938664,
        -0.5384693101056831,
        0.0,
        0.5384693101056831,
        0.906179845938664,
    ];
    const W: [f64; 5] = [
        0.23692688505618908,
        0.47862867049936647,
        0.5688888888888889,
        0.47862867049936647,
        0.23692688505618908,
    ];
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    half * X
        .iter()
        .zip(W)
        .map(|(&x, w)| w * f(mid + half * x))
        .sum::<f64>()
}

/// Monotone cubic (Fritsch-Carlson) interpolant of u as a function of arc
/// length for one period of a knot, with periodic end slopes.
#[derive(Debug, Clone)]
struct ArcTable {
    s_nodes: Vec<f64>,
    u_nodes: Vec<f64>,
    slopes: Vec<f64>,
    length: f64,
}

impl ArcTable {
    const NODES: usize = 8192;

    fn build(curve: &Curve) -> ArcTable {
        let m = Self::NODES;
        let h = TAU / m as f64;
        let speed = |u: f64| curve.speed(u);
        let mut s_nodes = Vec::with_capacity(m + 1);
        let mut u_nodes = Vec::with_capacity(m + 1);
        let mut s = 0.0;
        for j in 0..=m {
            s_nodes.push(s);
            u_nodes.push(j as f64 * h);
            if j < m {
                s += gauss5(&speed, j as f64 * h, (j + 1) as f64 * h);
            }
        }
        let length = s_nodes[m];

        // Fritsch-Carlson slopes for u(s); du/ds = 1/speed is periodic, so
        // the end slopes use wrapped neighbors.
        let delta: Vec<f64> =
            (0..m).map(|j| (u_nodes[j + 1] - u_nodes[j]) / (s_nodes[j + 1] - s_nodes[j])).collect();
        let hs: Vec<f64> = (0..m).map(|j| s_nodes[j + 1] - s_nodes[j]).collect();
        let fc = |h1: f64, h2: f64, d1: f64, d2: f64| -> f64 {
            if d1 * d2 <= 0.0 {
                0.0
            } else {
                let w1 = 2.0 * h2 + h1;
                let w2 = h2 + 2.0 * h1;
                (w1 + w2) / (w1 / d1 + w2 / d2)
            }
        };
        let mut slopes = vec![0.0; m + 1];
        for j in 0..=m {
            let (h1, d1) = if j == 0 {
                (hs[m - 1], delta[m - 1])
            } else {
                (hs[j - 1], delta[j - 1])
            };
            let (h2, d2) = if j == m { (hs[0], delta[0]) } else { (hs[j], delta[j]) };
            slopes[j] = fc(h1, h2, d1, d2);
        }

        ArcTable {
            s_nodes,
            u_nodes,
            slopes,
            length,
        }
    }

    fn param_of_arc(&self, s: f64) -> f64 {
        let s = s.rem_euclid(self.length);
        let idx = match self
            .s_nodes
            .binary_search_by(|probe| probe.total_cmp(&s))
        {
            Ok(i) => i.min(self.s_nodes.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.s_nodes.len() - 2),
        };
        let h = self.s_nodes[idx + 1] - self.s_nodes[idx];
        let t = (s - self.s_nodes[idx]) / h;
        let (y0, y1) = (self.u_nodes[idx], self.u_nodes[idx + 1]);
        let (d0, d1) = (self.slopes[idx], self.slopes[idx + 1]);
        // Cubic Hermite basis.
        let t2 = t * t;
        let t3 = t2 * t;
        y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + d0 * h * (t3 - 2.0 * t2 + t)
            + y1 * (-2.0 * t3 + 3.0 * t2)
            + d1 * h * (t3 - t2)
    }

}

/// Arc-length parameterization of a loop: exact linear map for the constant
/// speed families, interpolation table for knots.
#[derive(Debug, Clone)]
enum ArcParam {
    Linear { speed: f64 },
    Table(Box<ArcTable>),
}

/// A loop prepared for dynamics: geometry plus the s ↔ u maps.
#[derive(Debug, Clone)]
pub struct LoopDynamics {
    curve: Curve,
    length: f64,
    arc: ArcParam,
}

impl LoopDynamics {
    pub fn new(loop_spec: &LoopSpec, shape: &TorusShape) -> Result<Self> {
        let curve = Curve::new(*loop_spec, *shape);
        match loop_spec {
            LoopSpec::Toroidal { .. } | LoopSpec::Poloidal { .. } => {
                let speed = curve.speed(0.0);
                Ok(LoopDynamics {
                    curve,
                    length: TAU * speed,
                    arc: ArcParam::Linear { speed },
                })
            }
            LoopSpec::Knot { .. } => {
                let table = ArcTable::build(&curve);
                Ok(LoopDynamics {
                    length: table.length,
                    arc: ArcParam::Table(Box::new(table)),
                    curve,
                })
            }
        }
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    /// Curve parameter u for arc position s (s taken mod L).
    pub fn param_of_arc(&self, s: f64) -> f64 {
        match &self.arc {
            ArcParam::Linear { speed } => (s / speed).rem_euclid(TAU),
            ArcParam::Table(table) => table.param_of_arc(s),
        }
    }

    /// Arc position s ∈ [0, L) for curve parameter u.
    pub fn arc_of_param(&self, u: f64) -> f64 {
        match &self.arc {
            ArcParam::Linear { speed } => u.rem_euclid(TAU) * speed,
            ArcParam::Table(table) => {
                let u = u.rem_euclid(TAU);
                let m = ArcTable::NODES;
                let h = TAU / m as f64;
                let j = ((u / h) as usize).min(m - 1);
                table.s_nodes[j] + gauss5(&|x| self.curve.speed(x), j as f64 * h, u)
            }
        }
    }

    /// Tangential Euler-force acceleration s̈ at arc position `s`.
    pub fn tangential_force(&self, s: f64, omega: Vec3, omega_dot: Vec3) -> f64 {
        let u = self.param_of_arc(s);
        let r = self.curve.position(u);
        let t = self.curve.unit_tangent(u);
        let omega_sq = omega.dot(omega);
        t.dot(r * omega_sq - omega * omega.dot(r) - omega_dot.cross(r))
    }
}

/// One-shot evaluation of the tangential Euler force. For repeated calls
/// (inside an integrator) build a [`LoopDynamics`] once instead: the knot
/// variant precomputes its arc-length table on construction.
pub fn euler_force(
    loop_spec: &LoopSpec,
    shape: &TorusShape,
    s: f64,
    omega: Vec3,
    omega_dot: Vec3,
) -> Result<f64> {
    Ok(LoopDynamics::new(loop_spec, shape)?.tangential_force(s, omega, omega_dot))
}

/// Phase-space state of the constrained particle.
#[derive(Debug, Clone, Copy)]
pub struct SimState {
    /// Arc position, cumulative (not reduced mod L).
    pub s: f64,
    /// Arc speed ṡ.
    pub p: f64,
    pub t: f64,
}

/// One recorded sample of a run.
#[derive(Debug, Clone, Copy)]
pub struct SimSample {
    pub t: f64,
    pub s: f64,
    pub p: f64,
    /// |Ω|(t) of the driving protocol.
    pub omega: f64,
}

/// Outcome of a paired (rotating vs. baseline) run.
#[derive(Debug, Clone)]
pub struct SimResult {
    pub final_state: SimState,
    pub baseline_final: SimState,
    /// s(T) - s_baseline(T).
    pub shift: f64,
    /// 2π · shift / L.
    pub angle: f64,
    /// ε = Ω_max L / (2π p₀).
    pub adiabaticity: f64,
    /// Loop length L used for the angle conversion.
    pub length: f64,
    /// Samples of the rotating run at the configured stride.
    pub samples: Vec<SimSample>,
}

/// Step size and duration sized for an adiabatic run: `steps_per_circuit`
/// integrator steps per particle circuit, integrating over the protocol.
pub fn adiabatic_config(
    proto: &RotationProtocol,
    p0: f64,
    length: f64,
    steps_per_circuit: usize,
) -> OdeConfig {
    let circuit_time = length / p0.abs().max(f64::MIN_POSITIVE);
    let step = circuit_time / steps_per_circuit.max(1) as f64;
    let n_steps = (proto.duration / step).ceil().max(1.0);
    OdeConfig {
        step,
        t_end: proto.duration,
        record_stride: ((n_steps as usize) / 1024).max(1),
    }
}

/// Integrate the rotating-frame dynamics and a zero-rotation baseline from
/// the same initial conditions, and report the anholonomy shift.
///
/// `p0` is the initial arc speed (> 0); s₀ = 0. The run warns when the
/// adiabaticity parameter exceeds 0.1.
pub fn simulate(
    loop_spec: &LoopSpec,
    shape: &TorusShape,
    proto: &RotationProtocol,
    p0: f64,
    cfg: &OdeConfig,
) -> Result<SimResult> {
    let dynamics = LoopDynamics::new(loop_spec, shape)?;
    simulate_prepared(&dynamics, proto, SimState { s: 0.0, p: p0, t: 0.0 }, cfg)
}

fn simulate_prepared(
    dynamics: &LoopDynamics,
    proto: &RotationProtocol,
    start: SimState,
    cfg: &OdeConfig,
) -> Result<SimResult> {
    if start.p == 0.0 || !start.p.is_finite() {
        return Err(Error::InvalidParameter {
            name: "p0",
            reason: "initial speed must be nonzero and finite".into(),
        });
    }
    if cfg.t_end + 1e-12 < proto.duration {
        return Err(Error::InvalidParameter {
            name: "t_end",
            reason: format!(
                "{} is shorter than the protocol duration {}",
                cfg.t_end, proto.duration
            ),
        });
    }
    if cfg.t_end / cfg.step < 1e3 {
        return Err(Error::InvalidParameter {
            name: "step",
            reason: format!(
                "only {:.0} steps over the run; adiabatic runs need at least 1000",
                cfg.t_end / cfg.step
            ),
        });
    }
    let length = dynamics.length();
    let epsilon = proto.peak * length / (TAU * start.p.abs());
    if epsilon > 0.1 {
        log::warn!("adiabaticity parameter epsilon = {epsilon:.3} exceeds 0.1; the loop-averaged prediction may not apply");
    }

    let rotating = solve_ode(
        |t, y: &[f64; 2]| {
            let force = dynamics.tangential_force(y[0], proto.omega(t), proto.omega_dot(t));
            [y[1], force]
        },
        [start.s, start.p],
        cfg,
    )?;
    let baseline = solve_ode(|_, y: &[f64; 2]| [y[1], 0.0], [start.s, start.p], cfg)?;

    let [s_rot, p_rot] = rotating.final_state();
    let [s_base, p_base] = baseline.final_state();
    let shift = s_rot - s_base;
    let samples = rotating
        .times
        .iter()
        .zip(&rotating.states)
        .map(|(&t, &[s, p])| SimSample {
            t: start.t + t,
            s,
            p,
            omega: proto.omega_mag(t),
        })
        .collect();

    Ok(SimResult {
        final_state: SimState {
            s: s_rot,
            p: p_rot,
            t: start.t + rotating.final_time(),
        },
        baseline_final: SimState {
            s: s_base,
            p: p_base,
            t: start.t + baseline.final_time(),
        },
        shift,
        angle: TAU * shift / length,
        adiabaticity: epsilon,
        length,
        samples,
    })
}

/// Run protocols back to back (rotating and baseline runs both chained),
/// e.g. n₁ windings about x̂ followed by n₂ about ŷ for a poloidal loop.
/// Shifts accumulate; the reported ε is the largest over the phases.
pub fn simulate_sequence(
    loop_spec: &LoopSpec,
    shape: &TorusShape,
    protos: &[RotationProtocol],
    p0: f64,
    steps_per_circuit: usize,
) -> Result<SimResult> {
    if protos.is_empty() {
        return Err(Error::InvalidProtocol {
            reason: "protocol sequence is empty".into(),
        });
    }
    let dynamics = LoopDynamics::new(loop_spec, shape)?;
    let length = dynamics.length();
    let mut rot_state = SimState { s: 0.0, p: p0, t: 0.0 };
    let mut base_state = SimState { s: 0.0, p: p0, t: 0.0 };
    let mut samples = Vec::new();
    let mut epsilon: f64 = 0.0;
    for proto in protos {
        let cfg = adiabatic_config(proto, p0, length, steps_per_circuit);
        let phase = simulate_prepared(&dynamics, proto, rot_state, &cfg)?;
        // The baseline leg must restart from its own chain, not the rotating
        // one; rerun it from base_state.
        let base = solve_ode(|_, y: &[f64; 2]| [y[1], 0.0], [base_state.s, base_state.p], &cfg)?;
        let [s_base, p_base] = base.final_state();
        base_state = SimState {
            s: s_base,
            p: p_base,
            t: base_state.t + cfg.t_end,
        };
        rot_state = phase.final_state;
        epsilon = epsilon.max(phase.adiabaticity);
        samples.extend(phase.samples);
    }
    let shift = rot_state.s - base_state.s;
    Ok(SimResult {
        final_state: rot_state,
        baseline_final: base_state,
        shift,
        angle: TAU * shift / length,
        adiabaticity: epsilon,
        length,
        samples,
    })
}

/// Loop-averaged prediction of the shift: Δs = -(W / L) ∮ (ê × r) · dr,
/// the time kernel ∫ (T - t') Ω̇ dt' reducing to the winding W = ∫ Ω dt
/// because Ω(0) = 0. Only the Ω̇ force term survives the s-average; the Ω²
/// terms average to zero over every loop family.
pub fn averaged_shift_prediction(
    loop_spec: &LoopSpec,
    shape: &TorusShape,
    proto: &RotationProtocol,
) -> Result<f64> {
    let curve = Curve::new(*loop_spec, *shape);
    let length = curve.arc_length()?;
    // Surviving force term per unit Ω̇, integrated over arc length:
    // ∮ t·(ê × r) ds = ∮ (ê × r) · dr.
    let survivor = integrate_periodic(
        |u| proto.axis.cross(curve.position(u)).dot(curve.derivative(u)),
        TAU,
        &QuadratureConfig::default(),
    )?;
    Ok(-proto.target_winding * survivor / length)
}
