//! Run configuration: a TOML file with SI units throughout.
//!
//! Every key is optional at parse time. Each command resolves only the
//! sections it needs and reports every missing or invalid key at once.

use std::path::{Path, PathBuf};

use ab_mixture::dual::{BranchAmplitudes, DualSolenoidConfig};
use ab_mixture::experiment::DEFAULT_BOOTSTRAP_RESAMPLES;
use ab_mixture::pattern::{two_slit_pattern, ScreenGrid};
use ab_mixture::physics::{ApparatusGeometry, PhysicalConstants, Solenoid};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_OUTPUT_DIR: &str = "abmix-out";

/// A 64-bit seed. TOML integers are signed, so seeds above `i64::MAX` are
/// written as decimal strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SeedRepr", into = "SeedRepr")]
pub struct Seed(pub u64);

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SeedRepr {
    Int(i64),
    Text(String),
}

impl TryFrom<SeedRepr> for Seed {
    type Error = String;

    fn try_from(r: SeedRepr) -> Result<Self, String> {
        match r {
            SeedRepr::Int(i) => u64::try_from(i)
                .map(Seed)
                .map_err(|_| format!("seed must be non-negative, got {i}")),
            SeedRepr::Text(s) => s
                .trim()
                .parse()
                .map(Seed)
                .map_err(|_| format!("seed {s:?} is not an unsigned 64-bit integer")),
        }
    }
}

impl From<Seed> for SeedRepr {
    fn from(s: Seed) -> Self {
        match i64::try_from(s.0) {
            Ok(i) => SeedRepr::Int(i),
            Err(_) => SeedRepr::Text(s.0.to_string()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<Seed>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_electrons: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bootstrap_resamples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub envelope_width: Option<f64>,
    /// Not echoed: where artifacts land does not affect them.
    #[serde(skip_serializing)]
    pub output_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constants: Option<ConstantsSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometrySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solenoid1: Option<SolenoidSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solenoid2: Option<SolenoidSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<AmplitudesSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub screen: Option<ScreenSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub current: Option<CurrentSection>,
}

/// Overrides of the CODATA 2018 values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSection {
    pub electron_charge: Option<f64>,
    pub electron_mass: Option<f64>,
    pub reduced_planck: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub screen_distance: Option<f64>,
    pub slit_separation: Option<f64>,
    pub electron_speed: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolenoidSection {
    pub field: Option<f64>,
    pub radius: Option<f64>,
}

/// Branch amplitudes as `[re, im]` pairs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudesSection {
    pub c1: Option<[f64; 2]>,
    pub c2: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScreenSection {
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurrentMode {
    /// Two Gaussian branch packets superposed with `[amplitudes]`.
    Packets,
    /// One normalized plane wave.
    PlaneWave,
    /// One real Gaussian packet.
    Real,
}

/// Internal-electron wavefunction spec for the `current` command.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurrentSection {
    pub mode: Option<CurrentMode>,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_electrons: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wavenumber: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch1: Option<PacketSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch2: Option<PacketSection>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketSection {
    pub center: Option<f64>,
    pub width: Option<f64>,
    pub wavenumber: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Validation(vec![e.message().to_string()]))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration always serializes")
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
    }

    pub fn resolver(&self) -> Resolver<'_> {
        Resolver { config: self, problems: Vec::new() }
    }
}

/// Builds validated model types from a [`RunConfig`], collecting every
/// problem instead of stopping at the first.
pub struct Resolver<'a> {
    config: &'a RunConfig,
    problems: Vec<String>,
}

impl<'a> Resolver<'a> {
    fn require<T: Copy>(&mut self, value: Option<T>, key: &str) -> Option<T> {
        if value.is_none() {
            self.problems.push(format!("missing key `{key}`"));
        }
        value
    }

    fn absorb<T>(&mut self, context: &str, r: ab_mixture::Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(ab_mixture::Error::Validation(msgs)) => {
                self.problems.extend(msgs.into_iter().map(|m| format!("{context}: {m}")));
                None
            }
            Err(e) => {
                self.problems.push(format!("{context}: {e}"));
                None
            }
        }
    }

    pub fn problem(&mut self, msg: impl Into<String>) {
        self.problems.push(msg.into());
    }

    pub fn constants(&mut self) -> Option<PhysicalConstants> {
        let codata = PhysicalConstants::codata2018();
        let Some(s) = &self.config.constants else {
            return Some(codata);
        };
        let r = PhysicalConstants::new(
            s.electron_charge.unwrap_or(codata.electron_charge()),
            s.electron_mass.unwrap_or(codata.electron_mass()),
            s.reduced_planck.unwrap_or(codata.reduced_planck()),
        );
        self.absorb("constants", r)
    }

    pub fn geometry(&mut self) -> Option<ApparatusGeometry> {
        let s = self.config.geometry.clone().unwrap_or_default();
        let l = self.require(s.screen_distance, "geometry.screen_distance");
        let d = self.require(s.slit_separation, "geometry.slit_separation");
        let v = self.require(s.electron_speed, "geometry.electron_speed");
        let (l, d, v) = (l?, d?, v?);
        self.absorb("geometry", ApparatusGeometry::new(l, d, v))
    }

    pub fn solenoid(&mut self, index: usize) -> Option<Solenoid> {
        let (section, name) = match index {
            1 => (&self.config.solenoid1, "solenoid1"),
            _ => (&self.config.solenoid2, "solenoid2"),
        };
        let s = section.clone().unwrap_or_default();
        let field = self.require(s.field, &format!("{name}.field"));
        let radius = self.require(s.radius, &format!("{name}.radius"));
        let (field, radius) = (field?, radius?);
        self.absorb(name, Solenoid::new(field, radius))
    }

    pub fn dual(&mut self) -> Option<(DualSolenoidConfig, PhysicalConstants, ApparatusGeometry)> {
        let c = self.constants();
        let g = self.geometry();
        let s1 = self.solenoid(1);
        let s2 = self.solenoid(2);
        let (c, g, s1, s2) = (c?, g?, s1?, s2?);
        let cfg = self.absorb("solenoids", DualSolenoidConfig::new(s1, s2, g, c))?;
        Some((cfg, c, g))
    }

    pub fn amplitudes(&mut self) -> Option<BranchAmplitudes> {
        let s = self.config.amplitudes.clone().unwrap_or_default();
        let c1 = self.require(s.c1, "amplitudes.c1");
        let c2 = self.require(s.c2, "amplitudes.c2");
        let (c1, c2) = (c1?, c2?);
        self.absorb(
            "amplitudes",
            BranchAmplitudes::new(Complex64::new(c1[0], c1[1]), Complex64::new(c2[0], c2[1])),
        )
    }

    /// Screen and envelope width, checked against the fringe period of
    /// `(constants, geometry)`.
    pub fn screen(
        &mut self,
        constants: Option<&PhysicalConstants>,
        geometry: Option<&ApparatusGeometry>,
    ) -> Option<(ScreenGrid, f64)> {
        let s = self.config.screen.clone().unwrap_or_default();
        let x_min = self.require(s.x_min, "screen.x_min");
        let x_max = self.require(s.x_max, "screen.x_max");
        let n = self.require(s.n, "screen.n");
        let width = self.require(self.config.envelope_width, "envelope_width");
        let (x_min, x_max, n, width) = (x_min?, x_max?, n?, width?);
        let screen = self.absorb("screen", ScreenGrid::new(x_min, x_max, n))?;
        let (c, g) = (constants?, geometry?);
        self.absorb("screen", two_slit_pattern(c, g, 0.0, &screen, width))?;
        Some((screen, width))
    }

    pub fn n_electrons(&mut self) -> Option<usize> {
        let n = self.require(self.config.n_electrons, "n_electrons")?;
        if n == 0 {
            self.problem("n_electrons must be at least 1");
            return None;
        }
        Some(n)
    }

    pub fn seed(&mut self) -> Option<u64> {
        self.require(self.config.seed, "seed").map(|s| s.0)
    }

    pub fn bootstrap_resamples(&self) -> usize {
        self.config.bootstrap_resamples.unwrap_or(DEFAULT_BOOTSTRAP_RESAMPLES)
    }

    pub fn current(&mut self) -> Option<CurrentSection> {
        let s = self.config.current.clone().unwrap_or_default();
        self.require(s.mode, "current.mode");
        self.require(s.x_min, "current.x_min");
        self.require(s.x_max, "current.x_max");
        self.require(s.n, "current.n");
        if s.n_electrons == Some(0) {
            self.problem("current.n_electrons must be at least 1");
        }
        match s.mode {
            Some(CurrentMode::Packets) => {
                for (name, p) in [("branch1", &s.branch1), ("branch2", &s.branch2)] {
                    let p = p.clone().unwrap_or_default();
                    self.require(p.center, &format!("current.{name}.center"));
                    self.require(p.width, &format!("current.{name}.width"));
                    self.require(p.wavenumber, &format!("current.{name}.wavenumber"));
                }
            }
            Some(CurrentMode::PlaneWave) => {
                self.require(s.wavenumber, "current.wavenumber");
            }
            Some(CurrentMode::Real) => {
                self.require(s.center, "current.center");
                self.require(s.width, "current.width");
            }
            None => {}
        }
        Some(s)
    }

    /// Fails with every collected problem, or returns `value`.
    pub fn finish<T>(self, value: Option<T>) -> Result<T, CliError> {
        match value {
            Some(v) if self.problems.is_empty() => Ok(v),
            _ if self.problems.is_empty() => {
                Err(CliError::Validation(vec!["incomplete configuration".into()]))
            }
            _ => Err(CliError::Validation(self.problems)),
        }
    }
}
