//! Hannay angles from the action/line-integral framework: analytic closed
//! forms for the three loop families plus direct quadrature of the
//! anholonomy line integral ∮ (ŵ × r) · dr.
//!
//! Noncontractible loops enclose no area, so no Stokes conversion is used
//! anywhere: the "projected area" route and the line-integral route are both
//! line integrals, related by the scalar triple-product identity
//! ∮ (ŵ × r) · dr = 2 ŵ · A with A = ½ ∮ r × dr.

use std::f64::consts::{PI, TAU};

use crate::geometry::{knot_length_approx, Curve, LoopSpec, TorusShape};
use crate::numerics::{integrate_periodic, QuadratureConfig};
use crate::vec3::Vec3;
use crate::{Error, Result};

/// A rotation of the torus: reporting axis plus integer winding counts
/// (full 2π revolutions accumulated about x, y, z).
#[derive(Debug, Clone, Copy)]
pub struct RotationAxis {
    /// Unit vector; the axis the anholonomy integral is reported for.
    pub axis: Vec3,
    /// (n₁, n₂, n₃): windings about x̂, ŷ, ẑ.
    pub windings: (i32, i32, i32),
}

impl RotationAxis {
    pub fn new(axis: Vec3, windings: (i32, i32, i32)) -> Result<Self> {
        if !axis.is_finite() || !axis.is_unit(1e-12) {
            return Err(Error::InvalidParameter {
                name: "axis",
                reason: format!("|axis| = {} (must be 1 within 1e-12)", axis.norm()),
            });
        }
        Ok(RotationAxis { axis, windings })
    }

    /// Single winding about x̂.
    pub fn about_x(n: i32) -> Self {
        RotationAxis {
            axis: Vec3::X,
            windings: (n, 0, 0),
        }
    }

    /// Single winding about ŷ.
    pub fn about_y(n: i32) -> Self {
        RotationAxis {
            axis: Vec3::Y,
            windings: (0, n, 0),
        }
    }

    /// Single winding about ẑ.
    pub fn about_z(n: i32) -> Self {
        RotationAxis {
            axis: Vec3::Z,
            windings: (0, 0, n),
        }
    }
}

/// Which length enters the knot's Hannay-angle denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KnotLength {
    /// Exact arc length by quadrature (default).
    #[default]
    Exact,
    /// Max/min average of the speed integrand (closed-form approximation).
    MinMaxAverage,
}

/// Everything the line-integral route produces for one loop and rotation.
#[derive(Debug, Clone, Copy)]
pub struct HannayResult {
    /// Loop length L.
    pub length: f64,
    /// Projected-area vector A = ½ ∮ r × dr.
    pub areas: Vec3,
    /// ∮ (ŵ × r) · dr for the reporting axis, per unit angular speed.
    pub anholonomy_integral: f64,
    /// Displacement along the loop, angle · L / 2π.
    pub displacement: f64,
    /// Hannay angle (cumulative radians, not reduced mod 2π).
    pub angle: f64,
}

/// ∮ (axis × r) · dr over one period by quadrature. Equals 2 axis · A.
pub fn anholonomy_integral(loop_spec: &LoopSpec, shape: &TorusShape, axis: Vec3) -> Result<f64> {
    anholonomy_integral_with(loop_spec, shape, axis, &QuadratureConfig::default())
}

pub fn anholonomy_integral_with(
    loop_spec: &LoopSpec,
    shape: &TorusShape,
    axis: Vec3,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !axis.is_finite() || !axis.is_unit(1e-12) {
        return Err(Error::InvalidParameter {
            name: "axis",
            reason: format!("|axis| = {} (must be 1 within 1e-12)", axis.norm()),
        });
    }
    let curve = Curve::new(*loop_spec, *shape);
    integrate_periodic(
        |u| axis.cross(curve.position(u)).dot(curve.derivative(u)),
        TAU,
        cfg,
    )
}

/// Winding-weighted sum of per-axis anholonomy integrals.
fn winding_anholonomy(
    loop_spec: &LoopSpec,
    shape: &TorusShape,
    rot: &RotationAxis,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let (n1, n2, n3) = rot.windings;
    let mut total = 0.0;
    for (n, axis) in [(n1, Vec3::X), (n2, Vec3::Y), (n3, Vec3::Z)] {
        if n != 0 {
            total += n as f64 * anholonomy_integral_with(loop_spec, shape, axis, cfg)?;
        }
    }
    Ok(total)
}

/// The per-family constant relating the anholonomy integral to the angle.
///
/// The circle families follow the hoop rule ΔΘ = -(4π²/L²) ∮ (ŵ × r) · dr;
/// the knot closed form carries half that constant, and the numeric route
/// matches it so the two stay comparable (the dynamics module recovers the
/// unhalved shift that the equations of motion actually produce).
fn angle_prefactor(loop_spec: &LoopSpec, length: f64) -> f64 {
    match loop_spec {
        LoopSpec::Knot { .. } => -2.0 * PI * PI / (length * length),
        _ => -4.0 * PI * PI / (length * length),
    }
}

/// Closed-form Hannay angle.
///
/// Toroidal loops give -2π per ẑ winding for every ring torus; poloidal
/// loops give -2π (n₁ sin φ₀ - n₂ cos φ₀); knots give
/// -(2π²/L²) p (2c² + a²) π per ẑ winding.
pub fn hannay_angle_analytic(
    loop_spec: &LoopSpec,
    shape: &TorusShape,
    rot: &RotationAxis,
) -> Result<f64> {
    hannay_angle_analytic_opts(loop_spec, shape, rot, KnotLength::Exact)
}

/// As [`hannay_angle_analytic`], selecting which knot length to use.
pub fn hannay_angle_analytic_opts(
    loop_spec: &LoopSpec,
    shape: &TorusShape,
    rot: &RotationAxis,
    knot_length: KnotLength,
) -> Result<f64> {
    let (n1, n2, n3) = rot.windings;
    match *loop_spec {
        LoopSpec::Toroidal { .. } => Ok(-TAU * n3 as f64),
        LoopSpec::Poloidal { phi0 } => {
            Ok(-TAU * (n1 as f64 * phi0.sin() - n2 as f64 * phi0.cos()))
        }
        LoopSpec::Knot { p, q } => {
            let length = match knot_length {
                KnotLength::Exact => Curve::new(*loop_spec, *shape).arc_length()?,
                KnotLength::MinMaxAverage => knot_length_approx(shape, p, q),
            };
            let loop_integral =
                p as f64 * (2.0 * shape.c() * shape.c() + shape.a() * shape.a()) * PI;
            Ok(-2.0 * PI * PI / (length * length) * loop_integral * n3 as f64)
        }
    }
}

/// Hannay angle by direct quadrature of the anholonomy line integrals,
/// returning the full [`HannayResult`].
pub fn hannay_angle_numeric(
    loop_spec: &LoopSpec,
    shape: &TorusShape,
    rot: &RotationAxis,
) -> Result<HannayResult> {
    hannay_angle_numeric_with(loop_spec, shape, rot, &QuadratureConfig::default())
}

pub fn hannay_angle_numeric_with(
    loop_spec: &LoopSpec,
    shape: &TorusShape,
    rot: &RotationAxis,
    cfg: &QuadratureConfig,
) -> Result<HannayResult> {
    let curve = Curve::new(*loop_spec, *shape);
    let length = curve.arc_length_with(cfg)?;
    let areas = curve.projected_areas_with(cfg)?;
    let anholonomy = anholonomy_integral_with(loop_spec, shape, rot.axis, cfg)?;
    let angle =
        angle_prefactor(loop_spec, length) * winding_anholonomy(loop_spec, shape, rot, cfg)?;
    Ok(HannayResult {
        length,
        areas,
        anholonomy_integral: anholonomy,
        displacement: angle * length / TAU,
        angle,
    })
}

/// Displacement along the loop for a unit-winding rotation about `axis`:
/// d = -4π (A · ŵ) / L.
pub fn displacement_from_areas(areas: Vec3, axis: Vec3, length: f64) -> Result<f64> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "length",
            reason: format!("{length} (must be positive)"),
        });
    }
    if !axis.is_finite() || !axis.is_unit(1e-12) {
        return Err(Error::InvalidParameter {
            name: "axis",
            reason: format!("|axis| = {} (must be 1 within 1e-12)", axis.norm()),
        });
    }
    Ok(-4.0 * PI * areas.dot(axis) / length)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape21() -> TorusShape {
        TorusShape::new(2.0, 1.0).unwrap()
    }

    #[test]
    fn toroidal_anholonomy_is_twice_the_circle_area() {
        for theta0 in [0.0, 0.9, 2.4] {
            let spec = LoopSpec::toroidal(theta0).unwrap();
            let r = 2.0 + theta0.cos();
            let v = anholonomy_integral(&spec, &shape21(), Vec3::Z).unwrap();
            assert!((v - TAU * r * r).abs() < 1e-9, "theta0 {theta0}: {v}");
        }
    }

    #[test]
    fn poloidal_anholonomy_about_x() {
        let spec = LoopSpec::poloidal(PI / 2.0).unwrap();
        let v = anholonomy_integral(&spec, &shape21(), Vec3::X).unwrap();
        assert!((v - TAU).abs() < 1e-10, "got {v}");
    }

    #[test]
    fn knot_anholonomy_about_z() {
        let spec = LoopSpec::knot(2, 3).unwrap();
        let v = anholonomy_integral(&spec, &shape21(), Vec3::Z).unwrap();
        assert!((v - 18.0 * PI).abs() < 1e-8, "got {v}");
    }

    #[test]
    fn triple_product_identity_for_random_axes() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let shape = shape21();
        let specs = [
            LoopSpec::toroidal(1.0).unwrap(),
            LoopSpec::poloidal(0.6).unwrap(),
            LoopSpec::knot(2, 3).unwrap(),
        ];
        for spec in specs {
            let areas = Curve::new(spec, shape).projected_areas().unwrap();
            for _ in 0..10 {
                let axis = loop {
                    let v = Vec3::new(
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                    );
                    if v.norm() > 0.1 {
                        break v.normalized();
                    }
                };
                let lhs = anholonomy_integral(&spec, &shape, axis).unwrap();
                let rhs = 2.0 * axis.dot(areas);
                assert!(
                    (lhs - rhs).abs() <= 1e-8 * rhs.abs().max(1e-6),
                    "{spec:?}: lhs {lhs} rhs {rhs}"
                );
            }
        }
    }

    #[test]
    fn analytic_reference_angles() {
        let toroidal = LoopSpec::toroidal(0.0).unwrap();
        let v = hannay_angle_analytic(&toroidal, &shape21(), &RotationAxis::about_z(1)).unwrap();
        assert!((v + TAU).abs() < 1e-12);

        // n1 sin phi0 = n2 cos phi0 kills the poloidal angle.
        let poloidal = LoopSpec::poloidal(PI / 4.0).unwrap();
        let rot = RotationAxis::new(Vec3::X, (1, 1, 0)).unwrap();
        let v = hannay_angle_analytic(&poloidal, &shape21(), &rot).unwrap();
        assert!(v.abs() < 1e-12, "got {v}");

        let poloidal = LoopSpec::poloidal(PI / 2.0).unwrap();
        let v = hannay_angle_analytic(&poloidal, &shape21(), &RotationAxis::about_x(1)).unwrap();
        assert!((v + TAU).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn toroidal_angle_is_universal() {
        for c in [1.5, 2.0, 4.0] {
            for frac in [0.2, 0.5, 0.9] {
                for theta0 in [0.0, 1.0, 2.0, 4.0] {
                    let shape = TorusShape::new(c, frac * c).unwrap();
                    let spec = LoopSpec::toroidal(theta0).unwrap();
                    let v =
                        hannay_angle_analytic(&spec, &shape, &RotationAxis::about_z(1)).unwrap();
                    assert!((v + TAU).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn numeric_matches_reference_cases() {
        let toroidal = LoopSpec::toroidal(PI / 2.0).unwrap();
        let res = hannay_angle_numeric(&toroidal, &shape21(), &RotationAxis::about_z(1)).unwrap();
        assert!((res.angle + TAU).abs() < 1e-8, "got {}", res.angle);

        let poloidal = LoopSpec::poloidal(0.0).unwrap();
        let res = hannay_angle_numeric(&poloidal, &shape21(), &RotationAxis::about_x(1)).unwrap();
        assert!(res.angle.abs() < 1e-10, "got {}", res.angle);

        let knot = LoopSpec::knot(2, 3).unwrap();
        let res = hannay_angle_numeric(&knot, &shape21(), &RotationAxis::about_z(1)).unwrap();
        let length = Curve::new(knot, shape21()).arc_length().unwrap();
        let expect = -2.0 * PI * PI / (length * length) * 18.0 * PI;
        assert!((res.angle - expect).abs() < 1e-10, "got {}", res.angle);
    }

    #[test]
    fn numeric_agrees_with_analytic_on_parameter_grid() {
        for c in [1.5, 2.0, 3.0] {
            for a in [0.3, 0.7, 1.0] {
                for param in [0.3, 1.2, 2.5] {
                    let shape = TorusShape::new(c, a).unwrap();
                    for (spec, rot) in [
                        (LoopSpec::toroidal(param).unwrap(), RotationAxis::about_z(1)),
                        (LoopSpec::poloidal(param).unwrap(), RotationAxis::about_x(1)),
                        (
                            LoopSpec::poloidal(param).unwrap(),
                            RotationAxis::new(Vec3::Y, (1, 2, 0)).unwrap(),
                        ),
                    ] {
                        let analytic = hannay_angle_analytic(&spec, &shape, &rot).unwrap();
                        let numeric = hannay_angle_numeric(&spec, &shape, &rot).unwrap().angle;
                        let denom = analytic.abs().max(1e-9);
                        assert!(
                            ((numeric - analytic) / denom).abs() < 1e-6,
                            "{spec:?} c={c} a={a}: analytic {analytic}, numeric {numeric}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn knot_numeric_agrees_with_analytic() {
        for (p, q) in [(2u32, 3u32), (3, 2), (1, 2)] {
            let spec = LoopSpec::knot(p, q).unwrap();
            let rot = RotationAxis::about_z(1);
            let analytic = hannay_angle_analytic(&spec, &shape21(), &rot).unwrap();
            let numeric = hannay_angle_numeric(&spec, &shape21(), &rot).unwrap().angle;
            assert!(
                ((numeric - analytic) / analytic).abs() < 1e-6,
                "({p},{q}): analytic {analytic}, numeric {numeric}"
            );
        }
    }

    #[test]
    fn approximate_knot_length_shifts_the_angle_consistently() {
        let spec = LoopSpec::knot(2, 3).unwrap();
        let rot = RotationAxis::about_z(1);
        let exact = hannay_angle_analytic_opts(&spec, &shape21(), &rot, KnotLength::Exact).unwrap();
        let approx =
            hannay_angle_analytic_opts(&spec, &shape21(), &rot, KnotLength::MinMaxAverage)
                .unwrap();
        let l_exact = Curve::new(spec, shape21()).arc_length().unwrap();
        let l_approx = knot_length_approx(&shape21(), 2, 3);
        let expect = exact * (l_exact / l_approx).powi(2);
        assert!((approx - expect).abs() < 1e-10);
    }

    #[test]
    fn displacement_reference_cases() {
        // Circle of radius R in the xy-plane about z: d = -2 pi R.
        let r = 1.7;
        let areas = Vec3::new(0.0, 0.0, PI * r * r);
        let d = displacement_from_areas(areas, Vec3::Z, TAU * r).unwrap();
        assert!((d + TAU * r).abs() < 1e-12);

        // Axis orthogonal to the area vector.
        let d = displacement_from_areas(areas, Vec3::X, TAU * r).unwrap();
        assert!(d.abs() < 1e-14);

        // Toroidal loop at theta0 = 0 on (2, 1): d = -6 pi.
        let curve = Curve::new(LoopSpec::toroidal(0.0).unwrap(), shape21());
        let d = displacement_from_areas(
            curve.projected_areas().unwrap(),
            Vec3::Z,
            curve.arc_length().unwrap(),
        )
        .unwrap();
        assert!((d + 6.0 * PI).abs() < 1e-9, "got {d}");
    }

    #[test]
    fn angle_depends_on_axis_only_through_projected_area() {
        // Adding any component orthogonal to A leaves the displacement
        // unchanged (evaluated at the formula level, renormalizing the axis).
        let areas = Vec3::new(0.4, -1.1, 2.2);
        let axis = Vec3::new(1.0, 2.0, -0.5).normalized();
        let base = displacement_from_areas(areas, axis, 5.0).unwrap();
        let orthogonal = areas.cross(Vec3::new(0.3, 0.9, -0.2)).normalized();
        let tilted = (axis + orthogonal * 0.7).normalized();
        let scale = axis.dot(areas) / tilted.dot(areas);
        let d = displacement_from_areas(areas, tilted, 5.0).unwrap() * scale;
        assert!((d - base).abs() < 1e-10);
    }

    #[test]
    fn result_invariants_hold() {
        let spec = LoopSpec::poloidal(1.1).unwrap();
        let rot = RotationAxis::new(Vec3::X, (2, 1, 0)).unwrap();
        let res = hannay_angle_numeric(&spec, &shape21(), &rot).unwrap();
        assert!((res.angle - TAU * res.displacement / res.length).abs() < 1e-12);
        let expect = 2.0 * rot.axis.dot(res.areas);
        assert!((res.anholonomy_integral - expect).abs() < 1e-8 * expect.abs().max(1.0));
    }

    #[test]
    fn start_point_shift_leaves_invariants_unchanged() {
        // Shift the parameter origin in the raw integrands; length, areas,
        // and anholonomy must not move.
        let curve = Curve::new(LoopSpec::knot(2, 3).unwrap(), shape21());
        let cfg = QuadratureConfig::default();
        for u0 in [0.0, 0.37, 2.9] {
            let length = integrate_periodic(|u| curve.speed(u + u0), TAU, &cfg).unwrap();
            assert!((length - curve.arc_length().unwrap()).abs() < 1e-10);
            let az = integrate_periodic(
                |u| 0.5 * curve.position(u + u0).cross(curve.derivative(u + u0)).z,
                TAU,
                &cfg,
            )
            .unwrap();
            assert!((az - 9.0 * PI).abs() < 1e-9, "u0 {u0}: {az}");
        }
    }

    #[test]
    fn non_unit_axis_is_rejected() {
        let spec = LoopSpec::toroidal(0.0).unwrap();
        let bad = Vec3::new(0.0, 0.0, 2.0);
        assert!(anholonomy_integral(&spec, &shape21(), bad).is_err());
        assert!(RotationAxis::new(bad, (0, 0, 1)).is_err());
    }
}
