//! Physical constants, apparatus geometry and the single-solenoid
//! Aharonov-Bohm relations.
//!
//! All quantities are SI. The electron charge is stored as a positive
//! magnitude and inserted into the formulas literally, so the sign of every
//! phase and fringe displacement follows the sign of the enclosed flux.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result, Violations};

/// Elementary charge (C), exact in the 2019 SI.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Electron mass (kg), CODATA 2018.
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
/// Planck constant (J·s), exact in the 2019 SI.
pub const PLANCK: f64 = 6.626_070_15e-34;

/// The constants entering the phase and fringe formulas.
///
/// `planck` is always derived as `2π · reduced_planck`, so the two can never
/// drift apart by more than one rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    electron_charge: f64,
    electron_mass: f64,
    reduced_planck: f64,
    planck: f64,
}

impl PhysicalConstants {
    /// CODATA 2018 values.
    pub fn codata2018() -> Self {
        Self {
            electron_charge: ELEMENTARY_CHARGE,
            electron_mass: ELECTRON_MASS,
            reduced_planck: PLANCK / TAU,
            planck: PLANCK,
        }
    }

    /// Custom constants. Useful for synthetic units and for checking that a
    /// result does not depend on ħ.
    pub fn new(electron_charge: f64, electron_mass: f64, reduced_planck: f64) -> Result<Self> {
        let mut v = Violations::new();
        for (name, value) in [
            ("electron_charge", electron_charge),
            ("electron_mass", electron_mass),
            ("reduced_planck", reduced_planck),
        ] {
            v.check(value.is_finite() && value > 0.0, || {
                format!("{name} must be finite and > 0, got {value}")
            });
        }
        v.into_result()?;
        Ok(Self {
            electron_charge,
            electron_mass,
            reduced_planck,
            planck: TAU * reduced_planck,
        })
    }

    pub fn electron_charge(&self) -> f64 {
        self.electron_charge
    }

    pub fn electron_mass(&self) -> f64 {
        self.electron_mass
    }

    pub fn reduced_planck(&self) -> f64 {
        self.reduced_planck
    }

    pub fn planck(&self) -> f64 {
        self.planck
    }

    /// Same constants with ħ (and h) multiplied by `factor`.
    pub fn with_planck_scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.electron_charge,
            self.electron_mass,
            self.reduced_planck * factor,
        )
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::codata2018()
    }
}

/// Two-slit apparatus: diaphragm-to-screen distance `L`, slit separation `d`
/// and the speed `v` of the external electron.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApparatusGeometry {
    screen_distance: f64,
    slit_separation: f64,
    electron_speed: f64,
}

/// How comfortably a solenoid fits between the two slit paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clearance {
    /// `d ≥ 10 R`.
    Ample,
    /// `2R < d < 10R`: accepted, but the thin-solenoid picture is strained.
    Marginal,
}

impl ApparatusGeometry {
    pub fn new(screen_distance: f64, slit_separation: f64, electron_speed: f64) -> Result<Self> {
        let mut v = Violations::new();
        for (name, value) in [
            ("screen_distance", screen_distance),
            ("slit_separation", slit_separation),
            ("electron_speed", electron_speed),
        ] {
            v.check(value.is_finite() && value > 0.0, || {
                format!("{name} must be finite and > 0, got {value}")
            });
        }
        v.into_result()?;
        Ok(Self {
            screen_distance,
            slit_separation,
            electron_speed,
        })
    }

    pub fn screen_distance(&self) -> f64 {
        self.screen_distance
    }

    pub fn slit_separation(&self) -> f64 {
        self.slit_separation
    }

    pub fn electron_speed(&self) -> f64 {
        self.electron_speed
    }

    /// Distance between neighbouring bright fringes on the screen, `λL/d`.
    pub fn fringe_period(&self, constants: &PhysicalConstants) -> f64 {
        de_broglie_wavelength(constants, self) * self.screen_distance / self.slit_separation
    }

    /// Checks that a solenoid of the given radius sits between the slit
    /// paths. `d ≤ 2R` is rejected; `d < 10R` is reported as marginal.
    pub fn clearance(&self, radius: f64) -> Result<Clearance> {
        let d = self.slit_separation;
        if d <= 2.0 * radius {
            return Err(Error::invalid(format!(
                "slit_separation {d} m must exceed twice the solenoid radius {radius} m"
            )));
        }
        if d < 10.0 * radius {
            log::warn!("slit separation {d} m is less than ten solenoid radii ({radius} m)");
            Ok(Clearance::Marginal)
        } else {
            Ok(Clearance::Ample)
        }
    }
}

/// A long thin solenoid with a uniform interior field along z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Solenoid {
    field: f64,
    radius: f64,
}

impl Solenoid {
    /// `field` is signed (orientation along z); `radius` must be positive.
    pub fn new(field: f64, radius: f64) -> Result<Self> {
        let mut v = Violations::new();
        v.check(field.is_finite(), || format!("field must be finite, got {field}"));
        v.check(radius.is_finite() && radius > 0.0, || {
            format!("radius must be finite and > 0, got {radius}")
        });
        v.into_result()?;
        Ok(Self { field, radius })
    }

    /// Solenoid whose base area is exactly `area` (radius `√(S/π)`).
    pub fn with_area(field: f64, area: f64) -> Result<Self> {
        if !(area.is_finite() && area > 0.0) {
            return Err(Error::invalid(format!("area must be finite and > 0, got {area}")));
        }
        Self::new(field, (area / PI).sqrt())
    }

    pub fn field(&self) -> f64 {
        self.field
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Base area `S = πR²`.
    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    pub fn flux(&self) -> f64 {
        flux(self)
    }
}

/// de Broglie wavelength `h/(m v)` of the external electron.
pub fn de_broglie_wavelength(constants: &PhysicalConstants, geometry: &ApparatusGeometry) -> f64 {
    constants.planck / (constants.electron_mass * geometry.electron_speed)
}

/// Magnetic flux through the solenoid base, `B·πR²`.
pub fn flux(solenoid: &Solenoid) -> f64 {
    solenoid.field * solenoid.area()
}

/// Aharonov-Bohm phase difference `eΦ/ħ` between the two slit paths.
pub fn phase_shift(constants: &PhysicalConstants, flux: f64) -> f64 {
    constants.electron_charge * flux / constants.reduced_planck
}

/// Flux that produces the given phase difference; inverse of [`phase_shift`].
pub fn flux_for_phase(constants: &PhysicalConstants, phase: f64) -> f64 {
    phase * constants.reduced_planck / constants.electron_charge
}

/// Fringe translation on the screen, `−(L/d)(λ/2π)(eΦ/ħ)`.
pub fn fringe_shift(constants: &PhysicalConstants, geometry: &ApparatusGeometry, flux: f64) -> f64 {
    let lever = geometry.screen_distance / geometry.slit_separation;
    let reduced_wavelength = de_broglie_wavelength(constants, geometry) / TAU;
    -lever * reduced_wavelength * phase_shift(constants, flux)
}

/// The same translation written without Planck's constant,
/// `−(L/d)(e/m)(Φ/v)`.
pub fn fringe_shift_classical_form(
    constants: &PhysicalConstants,
    geometry: &ApparatusGeometry,
    flux: f64,
) -> f64 {
    let lever = geometry.screen_distance / geometry.slit_separation;
    let charge_to_mass = constants.electron_charge / constants.electron_mass;
    -lever * charge_to_mass * (flux / geometry.electron_speed)
}

/// Distance in units in the last place between two doubles of the same sign.
pub fn ulp_distance(a: f64, b: f64) -> u64 {
    if a == b {
        return 0;
    }
    if a.is_sign_negative() != b.is_sign_negative() {
        return u64::MAX;
    }
    let (x, y) = (a.abs().to_bits(), b.abs().to_bits());
    x.abs_diff(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn geometry() -> ApparatusGeometry {
        ApparatusGeometry::new(1.0, 1.0e-5, 1.0e6).unwrap()
    }

    #[test]
    fn planck_is_two_pi_reduced_planck() {
        let c = PhysicalConstants::codata2018();
        assert!(ulp_distance(c.planck(), TAU * c.reduced_planck()) <= 1);
        let c = PhysicalConstants::new(1.0, 2.0, 3.0).unwrap();
        assert_eq!(c.planck(), TAU * 3.0);
    }

    #[test]
    fn constants_reject_non_positive_and_report_all() {
        match PhysicalConstants::new(0.0, -1.0, f64::NAN) {
            Err(Error::Validation(msgs)) => assert_eq!(msgs.len(), 3),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn wavelength_unit_momentum() {
        // m·v = h in synthetic units
        let c = PhysicalConstants::new(1.0, 1.0, 1.0 / TAU).unwrap();
        let g = ApparatusGeometry::new(1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(de_broglie_wavelength(&c, &g), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn wavelength_codata_reference() {
        let c = PhysicalConstants::codata2018();
        // h/(m v) at 1e6 m/s, evaluated at 40 digits
        assert_relative_eq!(
            de_broglie_wavelength(&c, &geometry()),
            7.273_895_103_253_709e-10,
            max_relative = 1e-14
        );
    }

    #[test]
    fn wavelength_halves_when_speed_doubles() {
        let c = PhysicalConstants::codata2018();
        let g2 = ApparatusGeometry::new(1.0, 1.0e-5, 2.0e6).unwrap();
        assert_eq!(
            de_broglie_wavelength(&c, &g2),
            de_broglie_wavelength(&c, &geometry()) / 2.0
        );
    }

    #[test]
    fn geometry_rejects_non_positive_speed() {
        assert!(matches!(
            ApparatusGeometry::new(1.0, 1.0e-5, 0.0),
            Err(Error::Validation(_))
        ));
        assert!(ApparatusGeometry::new(1.0, 1.0e-5, -3.0).is_err());
    }

    #[test]
    fn flux_examples() {
        assert_eq!(Solenoid::new(0.0, 1.0).unwrap().flux(), 0.0);
        let unit = Solenoid::new(1.0, 1.0 / PI.sqrt()).unwrap();
        assert_relative_eq!(unit.flux(), 1.0, max_relative = 1e-15);
        let s = Solenoid::new(0.02, 1.0e-4).unwrap();
        assert_relative_eq!(s.flux(), 6.283_185_307_179_586e-10, max_relative = 1e-14);
        assert_eq!(Solenoid::new(-0.02, 1.0e-4).unwrap().flux(), -s.flux());
    }

    #[test]
    fn solenoid_rejects_bad_radius() {
        assert!(Solenoid::new(1.0, 0.0).is_err());
        assert!(Solenoid::new(1.0, -1.0).is_err());
        assert!(Solenoid::with_area(1.0, 0.0).is_err());
    }

    #[test]
    fn phase_examples() {
        let c = PhysicalConstants::codata2018();
        assert_eq!(phase_shift(&c, 0.0), 0.0);
        let hbar_over_e = c.reduced_planck() / c.electron_charge();
        assert_relative_eq!(phase_shift(&c, hbar_over_e), 1.0, max_relative = 2e-16);
        let h_over_e = c.planck() / c.electron_charge();
        assert_relative_eq!(phase_shift(&c, h_over_e), TAU, max_relative = 4e-16);
        assert_relative_eq!(
            phase_shift(&c, flux_for_phase(&c, 0.7)),
            0.7,
            max_relative = 4e-16
        );
    }

    #[test]
    fn fringe_shift_reference_value() {
        let c = PhysicalConstants::codata2018();
        let g = geometry();
        // −(L/d)(e/m)(Φ/v) at 40 digits
        let expected = -3.517_640_021_544_327e-5;
        assert_relative_eq!(fringe_shift(&c, &g, 2.0e-15), expected, max_relative = 1e-14);
        assert_relative_eq!(
            fringe_shift_classical_form(&c, &g, 2.0e-15),
            expected,
            max_relative = 1e-14
        );
        assert_eq!(fringe_shift(&c, &g, 0.0), 0.0);
        assert_eq!(fringe_shift_classical_form(&c, &g, 0.0), 0.0);
        assert_eq!(fringe_shift(&c, &g, -2.0e-15), -fringe_shift(&c, &g, 2.0e-15));
    }

    #[test]
    fn planck_scaling_leaves_classical_form_untouched() {
        let c = PhysicalConstants::codata2018();
        let g = geometry();
        let scaled = c.with_planck_scaled(10.0).unwrap();
        assert_eq!(
            fringe_shift_classical_form(&c, &g, 1e-15),
            fringe_shift_classical_form(&scaled, &g, 1e-15)
        );
        assert!(ulp_distance(fringe_shift(&c, &g, 1e-15), fringe_shift(&scaled, &g, 1e-15)) <= 8);
    }

    #[test]
    fn clearance_levels() {
        let g = geometry();
        assert_eq!(g.clearance(1e-7).unwrap(), Clearance::Ample);
        assert_eq!(g.clearance(2e-6).unwrap(), Clearance::Marginal);
        assert!(g.clearance(5e-6).is_err());
    }

    #[test]
    fn fringe_period_matches_wavelength_lever() {
        let c = PhysicalConstants::codata2018();
        let g = geometry();
        assert_relative_eq!(
            g.fringe_period(&c),
            7.273_895_103_253_709e-10 * 1.0e5,
            max_relative = 1e-14
        );
    }
}
