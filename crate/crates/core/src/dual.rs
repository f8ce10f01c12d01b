//! Two solenoids behind the slits.
//!
//! Two situations are modelled. In the classical one both solenoids carry
//! their currents at once and the fluxes simply add. In the mixture one a
//! single internal electron sits in wire 1 with probability `|c₁|²` or in
//! wire 2 with probability `|c₂|²`, so the external electron sees flux `Φ₁`
//! or `Φ₂` and every observable becomes a two-point distribution whose mean
//! is the `|c_k|²`-weighted combination.

use num_complex::Complex64;

use crate::error::{Error, Result, Violations};
use crate::physics::{
    fringe_shift, phase_shift, ApparatusGeometry, Clearance, PhysicalConstants, Solenoid,
};

/// Tolerance on `|c₁|² + |c₂|² = 1`. Inputs outside it are rejected.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Amplitudes of the internal electron being captured in wire 1 or wire 2.
///
/// Only the moduli enter any observable; the phases are kept so callers can
/// check that they do not matter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchAmplitudes {
    c1: Complex64,
    c2: Complex64,
}

impl BranchAmplitudes {
    pub fn new(c1: Complex64, c2: Complex64) -> Result<Self> {
        let mut v = Violations::new();
        v.check(c1.is_finite() && c2.is_finite(), || {
            "amplitudes must be finite".to_string()
        });
        let total = c1.norm_sqr() + c2.norm_sqr();
        v.check((total - 1.0).abs() <= NORMALIZATION_TOLERANCE, || {
            format!("|c1|^2 + |c2|^2 = {total:e}, must equal 1 within {NORMALIZATION_TOLERANCE:e}")
        });
        v.into_result()?;
        Ok(Self { c1, c2 })
    }

    /// Real amplitudes `(√p₁, √(1−p₁))`.
    pub fn from_probability(p1: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p1) {
            return Err(Error::invalid(format!("branch probability {p1} outside [0, 1]")));
        }
        Self::new(Complex64::new(p1.sqrt(), 0.0), Complex64::new((1.0 - p1).sqrt(), 0.0))
    }

    /// `c₁ = c₂ = 1/√2`.
    pub fn balanced() -> Self {
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { c1: a, c2: a }
    }

    pub fn c1(&self) -> Complex64 {
        self.c1
    }

    pub fn c2(&self) -> Complex64 {
        self.c2
    }

    /// `[|c₁|², |c₂|²]`.
    pub fn weights(&self) -> [f64; 2] {
        [self.c1.norm_sqr(), self.c2.norm_sqr()]
    }

    /// Both amplitudes multiplied by (possibly different) unit phases.
    pub fn rephased(&self, theta1: f64, theta2: f64) -> Self {
        Self {
            c1: self.c1 * Complex64::from_polar(1.0, theta1),
            c2: self.c2 * Complex64::from_polar(1.0, theta2),
        }
    }
}

/// Two solenoids side by side between the slit paths, too close together
/// for the external electron to pass between them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualSolenoidConfig {
    solenoids: [Solenoid; 2],
    geometry: ApparatusGeometry,
    constants: PhysicalConstants,
}

impl DualSolenoidConfig {
    pub fn new(
        solenoid1: Solenoid,
        solenoid2: Solenoid,
        geometry: ApparatusGeometry,
        constants: PhysicalConstants,
    ) -> Result<Self> {
        let span = solenoid1.radius() + solenoid2.radius();
        geometry.clearance(span).map_err(|_| {
            Error::invalid(format!(
                "slit_separation {} m must exceed 2·(R1 + R2) = {} m",
                geometry.slit_separation(),
                2.0 * span
            ))
        })?;
        Ok(Self {
            solenoids: [solenoid1, solenoid2],
            geometry,
            constants,
        })
    }

    /// Classical special case: both solenoids energized with opposite
    /// fields `±β/2`.
    pub fn antisymmetric_classical(
        beta: f64,
        radius: f64,
        geometry: ApparatusGeometry,
        constants: PhysicalConstants,
    ) -> Result<Self> {
        Self::new(
            Solenoid::new(beta / 2.0, radius)?,
            Solenoid::new(-beta / 2.0, radius)?,
            geometry,
            constants,
        )
    }

    /// Mixture special case: the branch fields are `±β` at full strength,
    /// since in each branch only one wire holds the internal electron.
    pub fn antisymmetric_branches(
        beta: f64,
        radius: f64,
        geometry: ApparatusGeometry,
        constants: PhysicalConstants,
    ) -> Result<Self> {
        Self::new(
            Solenoid::new(beta, radius)?,
            Solenoid::new(-beta, radius)?,
            geometry,
            constants,
        )
    }

    pub fn solenoid(&self, branch: usize) -> &Solenoid {
        &self.solenoids[branch]
    }

    pub fn solenoids(&self) -> &[Solenoid; 2] {
        &self.solenoids
    }

    pub fn geometry(&self) -> &ApparatusGeometry {
        &self.geometry
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }

    pub fn clearance(&self) -> Clearance {
        // validated in `new`
        self.geometry
            .clearance(self.solenoids[0].radius() + self.solenoids[1].radius())
            .unwrap_or(Clearance::Marginal)
    }

    /// `[Φ₁, Φ₂]`.
    pub fn fluxes(&self) -> [f64; 2] {
        [self.solenoids[0].flux(), self.solenoids[1].flux()]
    }

    fn branch_phase(&self, flux: f64) -> f64 {
        phase_shift(&self.constants, flux)
    }

    fn branch_shift(&self, flux: f64) -> f64 {
        fringe_shift(&self.constants, &self.geometry, flux)
    }
}

/// Phase difference and fringe translation of the external electron.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Totals {
    pub phase: f64,
    pub shift: f64,
}

/// One of the two possible results of the mixture experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureOutcome {
    /// 1 or 2.
    pub branch_index: u8,
    pub probability: f64,
    pub branch_flux: f64,
    pub branch_phase: f64,
    pub branch_shift: f64,
}

pub fn classical_total_flux(flux1: f64, flux2: f64) -> f64 {
    flux1 + flux2
}

/// Both solenoids energized at once: per-solenoid phases and shifts add.
pub fn classical_totals(config: &DualSolenoidConfig) -> Totals {
    let [f1, f2] = config.fluxes();
    Totals {
        phase: config.branch_phase(f1) + config.branch_phase(f2),
        shift: config.branch_shift(f1) + config.branch_shift(f2),
    }
}

fn weighted(amplitudes: &BranchAmplitudes, a: f64, b: f64) -> f64 {
    let [w1, w2] = amplitudes.weights();
    w1 * a + w2 * b
}

/// `|c₁|²Φ₁ + |c₂|²Φ₂`.
pub fn mixture_flux(amplitudes: &BranchAmplitudes, flux1: f64, flux2: f64) -> f64 {
    weighted(amplitudes, flux1, flux2)
}

/// `|c₁|²B₁ + |c₂|²B₂`.
pub fn mixture_field(amplitudes: &BranchAmplitudes, field1: f64, field2: f64) -> f64 {
    weighted(amplitudes, field1, field2)
}

/// Expected phase difference and fringe translation over the two branches.
pub fn mixture_expectations(config: &DualSolenoidConfig, amplitudes: &BranchAmplitudes) -> Totals {
    let [f1, f2] = config.fluxes();
    Totals {
        phase: weighted(amplitudes, config.branch_phase(f1), config.branch_phase(f2)),
        shift: weighted(amplitudes, config.branch_shift(f1), config.branch_shift(f2)),
    }
}

/// The two-point distribution of outcomes, branch 1 first.
pub fn outcome_distribution(
    config: &DualSolenoidConfig,
    amplitudes: &BranchAmplitudes,
) -> [MixtureOutcome; 2] {
    let weights = amplitudes.weights();
    let fluxes = config.fluxes();
    std::array::from_fn(|k| MixtureOutcome {
        branch_index: k as u8 + 1,
        probability: weights[k],
        branch_flux: fluxes[k],
        branch_phase: config.branch_phase(fluxes[k]),
        branch_shift: config.branch_shift(fluxes[k]),
    })
}
