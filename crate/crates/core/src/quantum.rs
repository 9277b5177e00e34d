//! Semiclassical Berry phases for the three loop families, the knot's
//! periodic-potential spectral problem, and the Berry-Hannay derivative
//! relation ΔΘ = -ħ ∂γ_n/∂n.
//!
//! Sign conventions follow each family's closed form as printed; the
//! Berry-Hannay comparison is made at the magnitude level (`ratio` in
//! [`BerryResult`]), which is also how the poloidal c/a mismatch between the
//! classical and semiclassical routes is quantified.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};

use crate::classical::{hannay_angle_analytic, RotationAxis};
use crate::geometry::{metric_factor_derivatives, Curve, LoopSpec, TorusShape};
use crate::numerics::{generalized_eigs, integrate_periodic, EigenProblem, QuadratureConfig};
use crate::vec3::Vec3;
use crate::{Error, Result};

/// ħ and the quantum number n of the state under transport.
#[derive(Debug, Clone, Copy)]
pub struct QuantumConfig {
    pub hbar: f64,
    pub n: u32,
}

impl QuantumConfig {
    pub fn new(hbar: f64, n: u32) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "hbar",
                reason: format!("{hbar} (must be positive)"),
            });
        }
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: "quantum number must be at least 1".into(),
            });
        }
        Ok(QuantumConfig { hbar, n })
    }
}

impl Default for QuantumConfig {
    fn default() -> Self {
        QuantumConfig { hbar: 1.0, n: 1 }
    }
}

/// The knot's effective 1-D quantum problem on the periodic u-grid.
#[derive(Debug, Clone, Copy)]
pub struct KnotQuantumProblem {
    pub shape: TorusShape,
    pub p: u32,
    pub q: u32,
    pub hbar: f64,
    pub grid_size: usize,
}

impl KnotQuantumProblem {
    pub fn new(shape: TorusShape, p: u32, q: u32, hbar: f64, grid_size: usize) -> Result<Self> {
        LoopSpec::knot(p, q)?;
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "hbar",
                reason: format!("{hbar} (must be positive)"),
            });
        }
        if grid_size < 256 {
            return Err(Error::InvalidParameter {
                name: "grid_size",
                reason: format!("{grid_size} (must be at least 256)"),
            });
        }
        Ok(KnotQuantumProblem {
            shape,
            p,
            q,
            hbar,
            grid_size,
        })
    }

    /// Winding ratio ω = q/p.
    pub fn omega(&self) -> f64 {
        self.q as f64 / self.p as f64
    }

    /// Aspect ratio σ = c/a.
    pub fn sigma(&self) -> f64 {
        self.shape.sigma()
    }

    /// Dimensionless eigenvalue λ = 8c²E / (ħ²ω²).
    pub fn lambda(&self, energy: f64) -> f64 {
        8.0 * self.shape.c() * self.shape.c() * energy / (self.hbar * self.hbar * self.omega().powi(2))
    }
}

/// Spectrum of the knot problem: energies ascending, mode functions Σ and
/// ψ = √f Σ on the u-grid, and the indices of near-degenerate ± pairs.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub energies: Vec<f64>,
    /// Σ modes, mass-orthonormal on the grid.
    pub sigma_modes: Vec<Vec<f64>>,
    /// ψ = √f Σ on the grid.
    pub psi_modes: Vec<Vec<f64>>,
    /// Consecutive index pairs whose relative gap is below 1e-4.
    pub degeneracy_pairs: Vec<(usize, usize)>,
    /// Grid nodes in u ∈ [0, 2π).
    pub grid_u: Vec<f64>,
}

impl SpectrumResult {
    /// Energies with near-degenerate pairs merged (averaged), e.g. the
    /// distinct levels E₀, E₁, E₂, ... of the thin-torus rotor.
    pub fn distinct_levels(&self, rel_tol: f64) -> Vec<f64> {
        let mut levels: Vec<f64> = Vec::new();
        let mut i = 0;
        while i < self.energies.len() {
            let mut j = i + 1;
            let mut sum = self.energies[i];
            while j < self.energies.len()
                && (self.energies[j] - self.energies[i]).abs()
                    <= rel_tol * self.energies[i].abs().max(1e-12)
            {
                sum += self.energies[j];
                j += 1;
            }
            levels.push(sum / (j - i) as f64);
            i = j;
        }
        levels
    }
}

/// Berry phase and its Hannay-angle comparison for one loop.
#[derive(Debug, Clone, Copy)]
pub struct BerryResult {
    /// γ_n at the configured quantum number.
    pub gamma: f64,
    pub n: u32,
    /// -ħ (γ_{n+1} - γ_n); exact since γ_n is linear in n.
    pub hannay_from_berry: f64,
    /// Classical Hannay angle of the same loop and windings.
    pub classical_angle: f64,
    /// |hannay_from_berry| / |classical_angle|.
    pub ratio: f64,
}

/// The geometric coupling (ŵ × ŝ) · r̂ between the rotation and the particle
/// direction: unit tangent ŝ at parameter u crossed into the axis, projected
/// on the unit position vector.
pub fn coupling_factor(
    loop_spec: &LoopSpec,
    shape: &TorusShape,
    u: f64,
    axis: Vec3,
) -> Result<f64> {
    if !axis.is_finite() || !axis.is_unit(1e-12) {
        return Err(Error::InvalidParameter {
            name: "axis",
            reason: format!("|axis| = {} (must be 1 within 1e-12)", axis.norm()),
        });
    }
    let curve = Curve::new(*loop_spec, *shape);
    let r = curve.position(u);
    let t = curve.unit_tangent(u);
    Ok(axis.cross(t).dot(r) / r.norm())
}

/// Closed-form Berry phase, with each family's printed overall sign.
///
/// - Toroidal: γ_n = [4πnA/L²]·[L/√(c² + a² + 2ca cos θ₀)] (pre-expansion).
/// - Poloidal: γ_n = -(4πnĀ/L²)(n₁ sin φ₀ - n₂ cos φ₀)·(2πc/a).
/// - Knot: γ_n = -πn/p (thin-torus disc approximation, warns below σ = 10).
pub fn berry_phase_analytic(
    loop_spec: &LoopSpec,
    shape: &TorusShape,
    qc: &QuantumConfig,
    windings: (i32, i32),
) -> Result<f64> {
    let n = qc.n as f64;
    let (c, a) = (shape.c(), shape.a());
    match *loop_spec {
        LoopSpec::Toroidal { theta0 } => {
            let r = c + a * theta0.cos();
            let denom = (c * c + a * a + 2.0 * c * a * theta0.cos()).sqrt();
            let area = PI * r * r;
            let length = TAU * r;
            Ok(4.0 * PI * n * area / (length * length) * (length / denom))
        }
        LoopSpec::Poloidal { phi0 } => {
            let (n1, n2) = windings;
            let area = PI * a * a;
            let length = TAU * a;
            Ok(-(4.0 * PI * n * area / (length * length))
                * (n1 as f64 * phi0.sin() - n2 as f64 * phi0.cos())
                * (TAU * c / a))
        }
        LoopSpec::Knot { p, .. } => {
            if shape.sigma() < 10.0 {
                log::warn!(
                    "knot Berry phase uses the thin-torus disc approximation; sigma = {:.2} < 10",
                    shape.sigma()
                );
            }
            Ok(-PI * n / p as f64)
        }
    }
}

/// Berry phase by quadrature over the loop, following each family's
/// reduction with exact geometry (no thin-torus truncation).
///
/// The circle families integrate the coupling factor along arc length,
/// γ_n = -(2πn/L) ∮ (ŵ × ŝ) · r̂ ds, which reproduces the toroidal closed
/// form identically. The knot uses the projected-area reduction
/// γ_n = -(4π²n/L²)(ŵ · A) with A and L from quadrature.
pub fn berry_phase_numeric(
    loop_spec: &LoopSpec,
    shape: &TorusShape,
    qc: &QuantumConfig,
    axis: Vec3,
) -> Result<f64> {
    berry_phase_numeric_with(loop_spec, shape, qc, axis, &QuadratureConfig::default())
}

pub fn berry_phase_numeric_with(
    loop_spec: &LoopSpec,
    shape: &TorusShape,
    qc: &QuantumConfig,
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
    let length = curve.arc_length_with(cfg)?;
    let n = qc.n as f64;
    match loop_spec {
        LoopSpec::Toroidal { .. } | LoopSpec::Poloidal { .. } => {
            let integral = integrate_periodic(
                |u| {
                    let r = curve.position(u);
                    let t = curve.unit_tangent(u);
                    axis.cross(t).dot(r) / r.norm() * curve.speed(u)
                },
                TAU,
                cfg,
            )?;
            Ok(-TAU * n / length * integral)
        }
        LoopSpec::Knot { .. } => {
            let areas = curve.projected_areas_with(cfg)?;
            Ok(-4.0 * PI * PI * n / (length * length) * axis.dot(areas))
        }
    }
}

/// Effective potential U(φ) = (2ff″ - f′²)/(12f²) + 2Ef/ħ² of the knot's
/// Schrödinger problem, from closed-form derivatives of the metric factor.
pub fn knot_potential(prob: &KnotQuantumProblem, phi: f64, energy: f64) -> f64 {
    let (f, fp, fpp) = metric_factor_derivatives(&prob.shape, prob.p, prob.q, phi);
    (2.0 * f * fpp - fp * fp) / (12.0 * f * f) + 2.0 * energy * f / (prob.hbar * prob.hbar)
}

/// Thin-torus form of the potential: U ≈ λω²/4 - (ω²/3σ) cos(ωφ).
pub fn knot_potential_thin(prob: &KnotQuantumProblem, phi: f64, energy: f64) -> f64 {
    let omega = prob.omega();
    let lambda = prob.lambda(energy);
    lambda * omega * omega / 4.0 - omega * omega / (3.0 * prob.sigma()) * (omega * phi).cos()
}

/// Assemble and solve the knot's spectral problem on the periodic u-grid:
/// -(1/p²) Σ″(u) - V_q Σ = (2f/ħ²) E Σ with V_q the quantum-potential part
/// of the effective potential.
pub fn knot_spectrum(prob: &KnotQuantumProblem, k: usize) -> Result<SpectrumResult> {
    let n = prob.grid_size;
    if k == 0 || k > n / 4 {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: format!("{k} (must be between 1 and grid_size/4 = {})", n / 4),
        });
    }
    let h = TAU / n as f64;
    let pf = prob.p as f64;
    let inv_p2_h2 = 1.0 / (pf * pf * h * h);

    let mut stiffness = DMatrix::zeros(n, n);
    let mut mass = DVector::zeros(n);
    let mut f_grid = vec![0.0; n];
    let mut grid_u = vec![0.0; n];
    for j in 0..n {
        let u = j as f64 * h;
        let phi = pf * u;
        let (f, fp, fpp) = metric_factor_derivatives(&prob.shape, prob.p, prob.q, phi);
        let v_q = (2.0 * f * fpp - fp * fp) / (12.0 * f * f);
        stiffness[(j, j)] = 2.0 * inv_p2_h2 - v_q;
        stiffness[(j, (j + 1) % n)] = -inv_p2_h2;
        stiffness[((j + 1) % n, j)] = -inv_p2_h2;
        mass[j] = 2.0 * f / (prob.hbar * prob.hbar);
        f_grid[j] = f;
        grid_u[j] = u;
    }

    let eigenproblem = EigenProblem::new(stiffness, mass, TAU)?;
    let pairs = generalized_eigs(&eigenproblem, k)?;

    let energies: Vec<f64> = pairs.iter().map(|p| p.value).collect();
    let sigma_modes: Vec<Vec<f64>> = pairs
        .iter()
        .map(|p| p.vector.iter().copied().collect())
        .collect();
    let psi_modes: Vec<Vec<f64>> = sigma_modes
        .iter()
        .map(|s| {
            s.iter()
                .zip(&f_grid)
                .map(|(v, f)| v * f.sqrt())
                .collect()
        })
        .collect();
    let degeneracy_pairs = (1..energies.len())
        .filter(|&i| {
            (energies[i] - energies[i - 1]).abs() <= 1e-4 * energies[i].abs().max(1e-12)
        })
        .map(|i| (i - 1, i))
        .collect();

    Ok(SpectrumResult {
        energies,
        sigma_modes,
        psi_modes,
        degeneracy_pairs,
        grid_u,
    })
}

/// Thin-torus rotor energy E_n = n²ħ²ω²/(2c²q²) the knot spectrum approaches
/// as σ → ∞.
pub fn knot_rotor_energy(prob: &KnotQuantumProblem, n: u32) -> f64 {
    let omega = prob.omega();
    let c = prob.shape.c();
    (n as f64 * prob.hbar * omega).powi(2) / (2.0 * c * c * (prob.q as f64).powi(2))
}

/// Hannay angle recovered from the Berry phase by the derivative relation,
/// evaluated as the forward difference -ħ(γ_{n+1} - γ_n), with the classical
/// angle of the same loop for comparison.
pub fn hannay_from_berry(
    loop_spec: &LoopSpec,
    shape: &TorusShape,
    qc: &QuantumConfig,
    windings: (i32, i32),
) -> Result<BerryResult> {
    let gamma = berry_phase_analytic(loop_spec, shape, qc, windings)?;
    let qc_next = QuantumConfig::new(qc.hbar, qc.n + 1)?;
    let gamma_next = berry_phase_analytic(loop_spec, shape, &qc_next, windings)?;
    let hfb = -qc.hbar * (gamma_next - gamma);

    let rot = match loop_spec {
        LoopSpec::Poloidal { .. } => {
            let (n1, n2) = windings;
            let axis = if n1 != 0 { Vec3::X } else { Vec3::Y };
            RotationAxis::new(axis, (n1, n2, 0))?
        }
        _ => RotationAxis::about_z(1),
    };
    let classical = hannay_angle_analytic(loop_spec, shape, &rot)?;
    Ok(BerryResult {
        gamma,
        n: qc.n,
        hannay_from_berry: hfb,
        classical_angle: classical,
        ratio: hfb.abs() / classical.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape21() -> TorusShape {
        TorusShape::new(2.0, 1.0).unwrap()
    }

    #[test]
    fn toroidal_coupling_is_minus_one_at_theta_zero() {
        let spec = LoopSpec::toroidal(0.0).unwrap();
        for k in 0..10 {
            let u = 0.63 * k as f64;
            let v = coupling_factor(&spec, &shape21(), u, Vec3::Z).unwrap();
            assert!((v + 1.0).abs() < 1e-12, "u = {u}: {v}");
        }
    }

    #[test]
    fn poloidal_coupling_has_no_z_component() {
        let spec = LoopSpec::poloidal(PI / 2.0).unwrap();
        for k in 0..10 {
            let u = 0.63 * k as f64;
            let v = coupling_factor(&spec, &shape21(), u, Vec3::Z).unwrap();
            assert!(v.abs() < 1e-14, "u = {u}: {v}");
        }
    }

    #[test]
    fn knot_coupling_approaches_minus_one_on_a_thin_torus() {
        let shape = TorusShape::new(100.0, 1.0).unwrap();
        let spec = LoopSpec::knot(2, 3).unwrap();
        for k in 0..40 {
            let u = 0.157 * k as f64;
            let v = coupling_factor(&spec, &shape, u, Vec3::Z).unwrap();
            assert!((v + 1.0).abs() < 0.05, "u = {u}: {v}");
        }
    }

    #[test]
    fn analytic_berry_reference_values() {
        let qc = QuantumConfig::default();
        let toroidal = LoopSpec::toroidal(0.0).unwrap();
        let v = berry_phase_analytic(&toroidal, &shape21(), &qc, (0, 0)).unwrap();
        assert!((v - TAU).abs() < 1e-12, "got {v}");

        let poloidal = LoopSpec::poloidal(PI / 2.0).unwrap();
        let v = berry_phase_analytic(&poloidal, &shape21(), &qc, (1, 0)).unwrap();
        assert!((v + 4.0 * PI).abs() < 1e-12, "got {v}");

        let knot = LoopSpec::knot(2, 3).unwrap();
        let v = berry_phase_analytic(&knot, &shape21(), &qc, (0, 0)).unwrap();
        assert!((v + PI / 2.0).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn gamma_is_linear_in_n() {
        let shape = shape21();
        let specs = [
            LoopSpec::toroidal(0.9).unwrap(),
            LoopSpec::poloidal(1.3).unwrap(),
            LoopSpec::knot(2, 3).unwrap(),
        ];
        for spec in specs {
            let mut slopes = Vec::new();
            for n in 1..5 {
                let a = berry_phase_analytic(&spec, &shape, &QuantumConfig::new(1.0, n).unwrap(), (1, 0))
                    .unwrap();
                let b = berry_phase_analytic(
                    &spec,
                    &shape,
                    &QuantumConfig::new(1.0, n + 1).unwrap(),
                    (1, 0),
                )
                .unwrap();
                slopes.push(b - a);
            }
            for w in slopes.windows(2) {
                assert!((w[1] - w[0]).abs() < 1e-10, "{spec:?}: slopes {slopes:?}");
            }
        }
    }

    #[test]
    fn numeric_toroidal_matches_analytic_exactly() {
        let qc = QuantumConfig::default();
        for theta0 in [0.0, 0.7, 2.1] {
            let spec = LoopSpec::toroidal(theta0).unwrap();
            let analytic = berry_phase_analytic(&spec, &shape21(), &qc, (0, 0)).unwrap();
            let numeric = berry_phase_numeric(&spec, &shape21(), &qc, Vec3::Z).unwrap();
            assert!(
                (numeric - analytic).abs() < 1e-8,
                "theta0 {theta0}: {numeric} vs {analytic}"
            );
        }
    }

    #[test]
    fn numeric_toroidal_respects_the_truncated_expansion_bound() {
        // Exact pre-expansion form vs. first-order truncation: the
        // difference is bounded by the printed correction term itself.
        let shape = TorusShape::new(10.0, 1.0).unwrap();
        let theta0 = PI / 3.0;
        let spec = LoopSpec::toroidal(theta0).unwrap();
        let qc = QuantumConfig::new(1.0, 2).unwrap();
        let numeric = berry_phase_numeric(&spec, &shape, &qc, Vec3::Z).unwrap();
        let r = 10.0 + theta0.cos();
        let correction = (theta0.sin() / r).powi(2) / 2.0;
        let truncated = TAU * qc.n as f64 * (1.0 - correction);
        assert!(
            (numeric - truncated).abs() <= TAU * qc.n as f64 * correction,
            "numeric {numeric}, truncated {truncated}"
        );
    }

    #[test]
    fn numeric_poloidal_vanishes_about_z() {
        let qc = QuantumConfig::default();
        let spec = LoopSpec::poloidal(0.8).unwrap();
        let v = berry_phase_numeric(&spec, &shape21(), &qc, Vec3::Z).unwrap();
        assert!(v.abs() < 1e-10, "got {v}");
    }

    #[test]
    fn numeric_toroidal_vanishes_for_transverse_axes() {
        let qc = QuantumConfig::default();
        let spec = LoopSpec::toroidal(1.2).unwrap();
        for axis in [Vec3::X, Vec3::Y] {
            let v = berry_phase_numeric(&spec, &shape21(), &qc, axis).unwrap();
            assert!(v.abs() < 1e-10, "axis {axis:?}: {v}");
        }
    }

    #[test]
    fn knot_numeric_approaches_the_disc_approximation() {
        let qc = QuantumConfig::default();
        let spec = LoopSpec::knot(2, 3).unwrap();
        let shape = TorusShape::new(1.0, 0.01).unwrap();
        let numeric = berry_phase_numeric(&spec, &shape, &qc, Vec3::Z).unwrap();
        let analytic = berry_phase_analytic(&spec, &shape, &qc, (0, 0)).unwrap();
        assert!(
            ((numeric - analytic) / analytic).abs() < 0.01,
            "numeric {numeric} vs analytic {analytic}"
        );
        // x and y axes decouple exactly (zero projected areas).
        for axis in [Vec3::X, Vec3::Y] {
            let v = berry_phase_numeric(&spec, &shape, &qc, axis).unwrap();
            assert!(v.abs() < 1e-10, "axis {axis:?}: {v}");
        }
    }

    #[test]
    fn exact_potential_reduces_to_thin_torus_form() {
        let shape = TorusShape::new(1.0, 0.01).unwrap();
        let prob = KnotQuantumProblem::new(shape, 2, 3, 1.0, 512).unwrap();
        let sigma = prob.sigma();
        // At E = 0 the difference is the quantum-potential truncation error,
        // O(1/sigma^2) uniformly in phi.
        let mut worst = 0.0_f64;
        for k in 0..500 {
            let phi = 4.0 * PI * k as f64 / 500.0;
            let d = (knot_potential(&prob, phi, 0.0) - knot_potential_thin(&prob, phi, 0.0)).abs();
            worst = worst.max(d);
        }
        assert!(
            worst < 10.0 / (sigma * sigma),
            "max deviation {worst:.3e} vs bound {:.3e}",
            10.0 / (sigma * sigma)
        );
    }

    #[test]
    fn thin_potential_substitution_value() {
        let shape = TorusShape::new(1.0, 0.01).unwrap();
        let prob = KnotQuantumProblem::new(shape, 2, 3, 1.0, 512).unwrap();
        let omega: f64 = 1.5;
        let expect = prob.lambda(0.125) * omega * omega / 4.0 - omega * omega / (3.0 * 100.0);
        let v = knot_potential_thin(&prob, 0.0, 0.125);
        assert!((v - expect).abs() < 1e-12);
        // lambda is sigma-independent: 8 c^2 E / (hbar^2 omega^2).
        assert!((prob.lambda(0.125) - 8.0 * 0.125 / 2.25).abs() < 1e-12);
    }

    #[test]
    fn vanishing_metric_modulation_kills_the_quantum_potential() {
        // As a -> 0 the metric factor is constant and the quantum-potential
        // part of U vanishes; probe with a tiny but valid tube radius.
        let shape = TorusShape::new(1.0, 1e-9).unwrap();
        let prob = KnotQuantumProblem::new(shape, 2, 3, 1.0, 512).unwrap();
        for phi in [0.0, 1.0, 2.5] {
            let v = knot_potential(&prob, phi, 0.0);
            assert!(v.abs() < 1e-9, "phi {phi}: {v}");
        }
    }

    #[test]
    fn knot_spectrum_matches_the_rotor_at_moderate_grid() {
        let shape = TorusShape::new(1.0, 0.01).unwrap();
        let prob = KnotQuantumProblem::new(shape, 2, 3, 1.0, 512).unwrap();
        let spectrum = knot_spectrum(&prob, 5).unwrap();
        let levels = spectrum.distinct_levels(1e-3);
        assert!(levels[0].abs() < 1e-3, "ground level {}", levels[0]);
        assert!(
            (levels[1] / 0.125 - 1.0).abs() < 0.02,
            "E1 = {}",
            levels[1]
        );
        assert!((levels[2] / 0.5 - 1.0).abs() < 0.02, "E2 = {}", levels[2]);
        // n^2 scaling between the first two excited levels.
        assert!((levels[2] / levels[1] - 4.0).abs() < 0.08);
        // The +- partners of each excited level are flagged degenerate.
        assert!(spectrum.degeneracy_pairs.contains(&(1, 2)));
        assert!(spectrum.degeneracy_pairs.contains(&(3, 4)));
    }

    #[test]
    fn knot_modes_are_cos_sin_pairs_on_the_grid() {
        let shape = TorusShape::new(1.0, 0.01).unwrap();
        let prob = KnotQuantumProblem::new(shape, 2, 3, 1.0, 512).unwrap();
        let spectrum = knot_spectrum(&prob, 3).unwrap();
        // Project the first excited pair onto cos(u), sin(u); nearly all
        // power should live in that mode.
        for idx in [1usize, 2] {
            let mode = &spectrum.sigma_modes[idx];
            let n = mode.len() as f64;
            let (mut c1, mut s1, mut total) = (0.0, 0.0, 0.0);
            for (j, v) in mode.iter().enumerate() {
                let u = spectrum.grid_u[j];
                c1 += v * u.cos();
                s1 += v * u.sin();
                total += v * v;
            }
            let power = (c1 * c1 + s1 * s1) / (n / 2.0);
            assert!(power / total > 0.999, "mode {idx}: power fraction {}", power / total);
        }
    }

    #[test]
    fn thin_torus_energy_error_shrinks_with_sigma() {
        for sigma in [50.0, 100.0, 200.0] {
            let shape = TorusShape::new(1.0, 1.0 / sigma).unwrap();
            let prob = KnotQuantumProblem::new(shape, 2, 3, 1.0, 512).unwrap();
            let spectrum = knot_spectrum(&prob, 3).unwrap();
            let e1 = spectrum.distinct_levels(1e-3)[1];
            let rotor = knot_rotor_energy(&prob, 1);
            let rel = (e1 / rotor - 1.0).abs();
            assert!(rel <= 10.0 / sigma, "sigma {sigma}: rel {rel}");
        }
    }

    #[test]
    fn berry_hannay_reference_ratios() {
        let qc = QuantumConfig::default();

        let toroidal = LoopSpec::toroidal(0.0).unwrap();
        let res = hannay_from_berry(&toroidal, &shape21(), &qc, (0, 0)).unwrap();
        assert!((res.hannay_from_berry + TAU).abs() < 1e-12);
        assert!((res.ratio - 1.0).abs() < 1e-12);

        // Poloidal mismatch by exactly c/a.
        for (c, a) in [(2.0, 1.0), (5.0, 1.0), (10.0, 1.0)] {
            let shape = TorusShape::new(c, a).unwrap();
            let spec = LoopSpec::poloidal(PI / 2.0).unwrap();
            let res = hannay_from_berry(&spec, &shape, &qc, (1, 0)).unwrap();
            assert!(
                (res.ratio - c / a).abs() < 1e-6 * (c / a),
                "(c,a)=({c},{a}): ratio {}",
                res.ratio
            );
        }

        // Knot: both routes give magnitude pi/p in the thin-torus limit.
        let knot = LoopSpec::knot(2, 3).unwrap();
        let thin = TorusShape::new(1.0, 0.01).unwrap();
        let res = hannay_from_berry(&knot, &thin, &qc, (0, 0)).unwrap();
        assert!((res.hannay_from_berry - PI / 2.0).abs() < 1e-12);
        assert!((res.ratio - 1.0).abs() < 0.05, "ratio {}", res.ratio);
    }

    #[test]
    fn berry_hannay_slope_is_n_independent() {
        let qc1 = QuantumConfig::new(1.0, 1).unwrap();
        let qc3 = QuantumConfig::new(1.0, 3).unwrap();
        let spec = LoopSpec::poloidal(0.9).unwrap();
        let a = hannay_from_berry(&spec, &shape21(), &qc1, (1, 1)).unwrap();
        let b = hannay_from_berry(&spec, &shape21(), &qc3, (1, 1)).unwrap();
        assert!((a.hannay_from_berry - b.hannay_from_berry).abs() < 1e-10);
    }
}
