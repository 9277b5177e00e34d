//! The ring-torus embedding and the three loop families (toroidal, poloidal,
//! (p, q) knots) as parametric curves with tangents, arc lengths, and
//! projected areas.
//!
//! All curves use a single parameter `u` with period 2π: one pass of `u`
//! closes the loop. For the knot the toroidal and poloidal angles advance as
//! `p u` and `q u` respectively, so the curve winds `p` times the long way
//! and `q` times the short way around the torus.

use std::f64::consts::{PI, TAU};

use crate::numerics::{integrate_periodic, QuadratureConfig};
use crate::vec3::Vec3;
use crate::{Error, Result};

/// Ring-torus radii: `c` is the toroidal (center-line) radius, `a` the
/// poloidal (tube) radius, with 0 < a < c so the surface does not
/// self-intersect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusShape {
    c: f64,
    a: f64,
}

impl TorusShape {
    pub fn new(c: f64, a: f64) -> Result<Self> {
        if !(c.is_finite() && a.is_finite() && a > 0.0 && a < c) {
            return Err(Error::InvalidShape { c, a });
        }
        Ok(TorusShape { c, a })
    }

    /// Toroidal circle radius.
    pub fn c(&self) -> f64 {
        self.c
    }

    /// Poloidal circle radius.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Aspect ratio σ = c/a > 1.
    pub fn sigma(&self) -> f64 {
        self.c / self.a
    }

    /// Signed residual of the surface equation (√(x²+y²) − c)² + z² = a²;
    /// zero for points on the torus.
    pub fn surface_residual(&self, point: Vec3) -> f64 {
        let rho = (point.x * point.x + point.y * point.y).sqrt();
        (rho - self.c).powi(2) + point.z * point.z - self.a * self.a
    }
}

/// Which closed curve on the torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LoopSpec {
    /// Fixed poloidal angle θ₀: a circle the long way around the axis.
    Toroidal { theta0: f64 },
    /// Fixed toroidal angle φ₀: a circle the short way around the tube.
    Poloidal { phi0: f64 },
    /// (p, q) torus knot with gcd(p, q) = 1.
    Knot { p: u32, q: u32 },
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl LoopSpec {
    /// Toroidal loop at poloidal angle `theta0` (reduced mod 2π).
    pub fn toroidal(theta0: f64) -> Result<Self> {
        if !theta0.is_finite() {
            return Err(Error::InvalidLoop {
                reason: format!("theta0 = {theta0} is not finite"),
            });
        }
        Ok(LoopSpec::Toroidal {
            theta0: theta0.rem_euclid(TAU),
        })
    }

    /// Poloidal loop at toroidal angle `phi0` (reduced mod 2π).
    pub fn poloidal(phi0: f64) -> Result<Self> {
        if !phi0.is_finite() {
            return Err(Error::InvalidLoop {
                reason: format!("phi0 = {phi0} is not finite"),
            });
        }
        Ok(LoopSpec::Poloidal {
            phi0: phi0.rem_euclid(TAU),
        })
    }

    /// (p, q) knot; requires p, q ≥ 1 and gcd(p, q) = 1.
    pub fn knot(p: u32, q: u32) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidLoop {
                reason: format!("knot indices must be positive, got ({p}, {q})"),
            });
        }
        if gcd(p, q) != 1 {
            return Err(Error::InvalidLoop {
                reason: format!("knot indices ({p}, {q}) are not coprime"),
            });
        }
        Ok(LoopSpec::Knot { p, q })
    }

    /// Winding ratio ω = q/p for knots, 0 for the circle families.
    pub fn omega(&self) -> f64 {
        match self {
            LoopSpec::Knot { p, q } => *q as f64 / *p as f64,
            _ => 0.0,
        }
    }
}

/// A point on a loop: parameter, position, unit tangent, and |dr/du|.
#[derive(Debug, Clone, Copy)]
pub struct CurvePoint {
    pub u: f64,
    pub position: Vec3,
    pub tangent: Vec3,
    pub speed: f64,
}

/// A loop bound to a torus shape; the home of all per-curve geometry.
#[derive(Debug, Clone, Copy)]
pub struct Curve {
    pub loop_spec: LoopSpec,
    pub shape: TorusShape,
}

impl Curve {
    pub fn new(loop_spec: LoopSpec, shape: TorusShape) -> Self {
        Curve { loop_spec, shape }
    }

    /// Position on the torus surface at parameter `u` (reduced mod 2π).
    pub fn position(&self, u: f64) -> Vec3 {
        let u = u.rem_euclid(TAU);
        let (c, a) = (self.shape.c, self.shape.a);
        match self.loop_spec {
            LoopSpec::Toroidal { theta0 } => {
                let r = c + a * theta0.cos();
                Vec3::new(r * u.cos(), r * u.sin(), a * theta0.sin())
            }
            LoopSpec::Poloidal { phi0 } => {
                let r = c + a * u.cos();
                Vec3::new(r * phi0.cos(), r * phi0.sin(), a * u.sin())
            }
            LoopSpec::Knot { p, q } => {
                let (phi, theta) = (p as f64 * u, q as f64 * u);
                let r = c + a * theta.cos();
                Vec3::new(r * phi.cos(), r * phi.sin(), a * theta.sin())
            }
        }
    }

    /// dr/du at parameter `u`.
    pub fn derivative(&self, u: f64) -> Vec3 {
        let u = u.rem_euclid(TAU);
        let (c, a) = (self.shape.c, self.shape.a);
        match self.loop_spec {
            LoopSpec::Toroidal { theta0 } => {
                let r = c + a * theta0.cos();
                Vec3::new(-r * u.sin(), r * u.cos(), 0.0)
            }
            LoopSpec::Poloidal { phi0 } => Vec3::new(
                -a * u.sin() * phi0.cos(),
                -a * u.sin() * phi0.sin(),
                a * u.cos(),
            ),
            LoopSpec::Knot { p, q } => {
                let (pf, qf) = (p as f64, q as f64);
                let (phi, theta) = (pf * u, qf * u);
                let r = c + a * theta.cos();
                let dr = -a * qf * theta.sin();
                Vec3::new(
                    dr * phi.cos() - pf * r * phi.sin(),
                    dr * phi.sin() + pf * r * phi.cos(),
                    a * qf * theta.cos(),
                )
            }
        }
    }

    /// |dr/du| at parameter `u`; strictly positive for valid loops.
    pub fn speed(&self, u: f64) -> f64 {
        match self.loop_spec {
            LoopSpec::Toroidal { theta0 } => self.shape.c + self.shape.a * theta0.cos(),
            LoopSpec::Poloidal { .. } => self.shape.a,
            LoopSpec::Knot { p, q } => {
                let (pf, qf) = (p as f64, q as f64);
                let r = self.shape.c + self.shape.a * (qf * u.rem_euclid(TAU)).cos();
                (self.shape.a * self.shape.a * qf * qf + pf * pf * r * r).sqrt()
            }
        }
    }

    /// Unit tangent, oriented with increasing `u`.
    pub fn unit_tangent(&self, u: f64) -> Vec3 {
        self.derivative(u) * (1.0 / self.speed(u))
    }

    pub fn point(&self, u: f64) -> CurvePoint {
        let u = u.rem_euclid(TAU);
        CurvePoint {
            u,
            position: self.position(u),
            tangent: self.unit_tangent(u),
            speed: self.speed(u),
        }
    }

    /// Total loop length: closed form for the circle families, quadrature of
    /// |dr/du| over one period for knots.
    pub fn arc_length(&self) -> Result<f64> {
        self.arc_length_with(&QuadratureConfig::default())
    }

    pub fn arc_length_with(&self, cfg: &QuadratureConfig) -> Result<f64> {
        match self.loop_spec {
            LoopSpec::Toroidal { theta0 } => {
                Ok(TAU * (self.shape.c + self.shape.a * theta0.cos()))
            }
            LoopSpec::Poloidal { .. } => Ok(TAU * self.shape.a),
            LoopSpec::Knot { .. } => integrate_periodic(|u| self.speed(u), TAU, cfg),
        }
    }

    /// Signed projected-area vector A = ½ ∮ r × dr, componentwise the areas
    /// of the loop's projections onto the coordinate planes.
    pub fn projected_areas(&self) -> Result<Vec3> {
        self.projected_areas_with(&QuadratureConfig::default())
    }

    pub fn projected_areas_with(&self, cfg: &QuadratureConfig) -> Result<Vec3> {
        let half_cross = |u: f64| self.position(u).cross(self.derivative(u)) * 0.5;
        Ok(Vec3::new(
            integrate_periodic(|u| half_cross(u).x, TAU, cfg)?,
            integrate_periodic(|u| half_cross(u).y, TAU, cfg)?,
            integrate_periodic(|u| half_cross(u).z, TAU, cfg)?,
        ))
    }
}

/// Closed-form approximation of the (p, q) knot length: π a (√(q² + p²(n+1)²)
/// + √(q² + p²(n−1)²)) with n = c/a, the average of the extreme values of the
/// speed integrand.
pub fn knot_length_approx(shape: &TorusShape, p: u32, q: u32) -> f64 {
    let (pf, qf) = (p as f64, q as f64);
    let n = shape.c / shape.a;
    PI * shape.a
        * ((qf * qf + pf * pf * (n + 1.0).powi(2)).sqrt()
            + (qf * qf + pf * pf * (n - 1.0).powi(2)).sqrt())
}

/// Metric factor f(φ) = a²ω² + (c + a cos ωφ)² of the knot Hamiltonian
/// H = p_φ²/(2 f), with ω = q/p and φ the toroidal angle (φ = p u).
pub fn metric_factor(shape: &TorusShape, p: u32, q: u32, phi: f64) -> f64 {
    let omega = q as f64 / p as f64;
    let r = shape.c + shape.a * (omega * phi).cos();
    shape.a * shape.a * omega * omega + r * r
}

/// f, f′, f″ with respect to φ, in closed form.
pub fn metric_factor_derivatives(shape: &TorusShape, p: u32, q: u32, phi: f64) -> (f64, f64, f64) {
    let omega = q as f64 / p as f64;
    let (a, c) = (shape.a, shape.c);
    let (s, co) = (omega * phi).sin_cos();
    let r = c + a * co;
    let f = a * a * omega * omega + r * r;
    let fp = -2.0 * a * omega * s * r;
    let fpp = -2.0 * a * omega * omega * (co * r - a * s * s);
    (f, fp, fpp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape21() -> TorusShape {
        TorusShape::new(2.0, 1.0).unwrap()
    }

    fn approx(a: Vec3, b: Vec3, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn shape_rejects_non_ring_tori() {
        assert!(TorusShape::new(1.0, 1.0).is_err());
        assert!(TorusShape::new(1.0, 2.0).is_err());
        assert!(TorusShape::new(-1.0, -2.0).is_err());
        assert!(TorusShape::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn knot_requires_coprime_indices() {
        assert!(LoopSpec::knot(2, 4).is_err());
        assert!(LoopSpec::knot(0, 3).is_err());
        assert!(LoopSpec::knot(2, 3).is_ok());
        assert!(LoopSpec::knot(1, 1).is_ok());
    }

    #[test]
    fn position_at_reference_parameters() {
        let toroidal = Curve::new(LoopSpec::toroidal(0.0).unwrap(), shape21());
        assert!(approx(toroidal.position(0.0), Vec3::new(3.0, 0.0, 0.0), 1e-14));

        let poloidal = Curve::new(LoopSpec::poloidal(0.0).unwrap(), shape21());
        assert!(approx(
            poloidal.position(PI / 2.0),
            Vec3::new(2.0, 0.0, 1.0),
            1e-14
        ));

        let knot = Curve::new(LoopSpec::knot(2, 3).unwrap(), shape21());
        assert!(approx(knot.position(0.0), Vec3::new(3.0, 0.0, 0.0), 1e-14));
    }

    #[test]
    fn tangent_at_reference_parameters() {
        let toroidal = Curve::new(LoopSpec::toroidal(0.0).unwrap(), shape21());
        assert!(approx(toroidal.unit_tangent(0.0), Vec3::Y, 1e-14));

        let poloidal = Curve::new(LoopSpec::poloidal(0.0).unwrap(), shape21());
        assert!(approx(poloidal.unit_tangent(0.0), Vec3::Z, 1e-14));
    }

    #[test]
    fn knot_tangent_matches_finite_difference() {
        let curve = Curve::new(LoopSpec::knot(2, 3).unwrap(), shape21());
        let h = 1e-6;
        for k in 0..50 {
            let u = 0.113 + 0.12 * k as f64;
            let fd = (curve.position(u + h) - curve.position(u - h)) * (1.0 / (2.0 * h));
            let fd_unit = fd.normalized();
            assert!(
                approx(curve.unit_tangent(u), fd_unit, 1e-8),
                "mismatch at u = {u}"
            );
        }
    }

    #[test]
    fn arc_lengths_of_circle_families() {
        let toroidal = Curve::new(LoopSpec::toroidal(0.0).unwrap(), shape21());
        assert!((toroidal.arc_length().unwrap() - 6.0 * PI).abs() < 1e-12);

        let poloidal = Curve::new(LoopSpec::poloidal(1.234).unwrap(), shape21());
        assert!((poloidal.arc_length().unwrap() - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn knot_arc_length_matches_simpson_oracle() {
        let curve = Curve::new(LoopSpec::knot(2, 3).unwrap(), shape21());
        let value = curve.arc_length().unwrap();
        // Independent oracle: composite Simpson of the explicit integrand
        // sqrt(9 + 4 (2 + cos 3u)^2) at 2^16 panels.
        let n = 1 << 16;
        let h = TAU / n as f64;
        let f = |u: f64| (9.0 + 4.0 * (2.0 + (3.0 * u).cos()).powi(2)).sqrt();
        let mut sum = 0.0;
        for i in 0..=n {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            sum += w * f(i as f64 * h);
        }
        let oracle = sum * h / 3.0;
        assert!(
            ((value - oracle) / oracle).abs() < 1e-9,
            "value {value}, oracle {oracle}"
        );
    }

    #[test]
    fn knot_length_approx_reference_values() {
        let shape = shape21();
        let expect = PI * (45.0_f64.sqrt() + 13.0_f64.sqrt());
        assert!((knot_length_approx(&shape, 2, 3) - expect).abs() < 1e-12);
        let expect11 = PI * (10.0_f64.sqrt() + 2.0_f64.sqrt());
        assert!((knot_length_approx(&shape, 1, 1) - expect11).abs() < 1e-12);
    }

    #[test]
    fn knot_length_approx_brackets_exact_length() {
        for (p, q) in [(2u32, 3u32), (3, 2), (1, 2), (5, 2)] {
            let curve = Curve::new(LoopSpec::knot(p, q).unwrap(), shape21());
            let exact = curve.arc_length().unwrap();
            let approx = knot_length_approx(&shape21(), p, q);
            let delta = (approx - exact).abs() / exact;
            println!("knot ({p},{q}): exact {exact:.6}, approx {approx:.6}, delta {delta:.4}");
            assert!(delta < 0.05, "({p},{q}) approximation off by {delta}");
        }
    }

    #[test]
    fn projected_areas_of_the_three_families() {
        let toroidal = Curve::new(LoopSpec::toroidal(0.7).unwrap(), shape21());
        let r = 2.0 + 0.7_f64.cos();
        let areas = toroidal.projected_areas().unwrap();
        assert!(areas.x.abs() < 1e-12 && areas.y.abs() < 1e-12);
        assert!((areas.z - PI * r * r).abs() < 1e-10);

        let poloidal = Curve::new(LoopSpec::poloidal(PI / 2.0).unwrap(), shape21());
        let areas = poloidal.projected_areas().unwrap();
        assert!(approx(areas, Vec3::new(PI, 0.0, 0.0), 1e-10));
        assert!(areas.z.abs() < 1e-12);

        let knot = Curve::new(LoopSpec::knot(2, 3).unwrap(), shape21());
        let areas = knot.projected_areas().unwrap();
        assert!(approx(areas, Vec3::new(0.0, 0.0, 9.0 * PI), 1e-9));
    }

    #[test]
    fn metric_factor_substitutions() {
        let shape = shape21();
        let omega: f64 = 1.5;
        let at0 = metric_factor(&shape, 2, 3, 0.0);
        assert!((at0 - (omega * omega + 9.0)).abs() < 1e-12);
        let at_pi = metric_factor(&shape, 2, 3, PI / omega);
        assert!((at_pi - (omega * omega + 1.0)).abs() < 1e-12);

        let thin = TorusShape::new(1.0, 0.01).unwrap();
        let v = metric_factor(&thin, 2, 3, 0.0);
        assert!((v - 1.020325).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn metric_factor_derivatives_match_finite_differences() {
        let shape = shape21();
        let h = 1e-4;
        for k in 0..20 {
            let phi = 0.17 + 0.31 * k as f64;
            let (f, fp, fpp) = metric_factor_derivatives(&shape, 2, 3, phi);
            let f0 = metric_factor(&shape, 2, 3, phi);
            let fm = metric_factor(&shape, 2, 3, phi - h);
            let fpl = metric_factor(&shape, 2, 3, phi + h);
            assert!((f - f0).abs() < 1e-12);
            assert!((fp - (fpl - fm) / (2.0 * h)).abs() < 1e-6);
            assert!((fpp - (fpl - 2.0 * f0 + fm) / (h * h)).abs() < 1e-4);
        }
    }

    #[test]
    fn closure_and_surface_membership() {
        let shape = shape21();
        let curves = [
            Curve::new(LoopSpec::toroidal(1.1).unwrap(), shape),
            Curve::new(LoopSpec::poloidal(2.3).unwrap(), shape),
            Curve::new(LoopSpec::knot(2, 3).unwrap(), shape),
        ];
        for curve in curves {
            // Period reduction makes closure exact.
            assert_eq!(curve.position(0.0), curve.position(TAU));
            for k in 0..1000 {
                let u = TAU * k as f64 / 1000.0;
                let res = shape.surface_residual(curve.position(u));
                assert!(res.abs() < 1e-10, "residual {res} at u = {u}");
            }
        }
    }
}
