//! Internal-electron wavefunctions on a uniform 1-D grid along the wire
//! coordinate η, and the electric current density they carry.
//!
//! With a 1-D wavefunction of dimension m^(-1/2) the current
//! `j = (iħe/2m)(ψ ∂ψ* − ψ* ∂ψ)` has the dimension of an electric current
//! (A). The overall sign uses the positive charge magnitude `e`, so a plane
//! wave `e^{ikη}` with `k > 0` carries a positive current `eħk/m · |ψ|²`.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::dual::BranchAmplitudes;
use crate::error::{Error, Result, Violations};
use crate::physics::PhysicalConstants;

/// Minimum number of samples; the boundary stencils need three points and
/// the interior needs room to be meaningful.
pub const MIN_SAMPLES: usize = 8;
/// `|Σ|ψ|²dη − 1|` below which a wavefunction counts as normalized.
pub const NORM_TOLERANCE: f64 = 1e-9;
/// Threshold for both the inner-product and the pointwise non-interference
/// tests.
pub const INTERFERENCE_TOLERANCE: f64 = 1e-9;
/// Allowed imaginary residue of the current bracket, relative to
/// `(eħ/2m)·max|ψ|·max|∂ψ|`.
pub const REALITY_TOLERANCE: f64 = 1e-12;

/// Uniform sampling of the wire coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub origin: f64,
    pub spacing: f64,
    pub len: usize,
}

impl Grid {
    pub fn new(origin: f64, spacing: f64, len: usize) -> Result<Self> {
        let mut v = Violations::new();
        v.check(origin.is_finite(), || format!("grid origin must be finite, got {origin}"));
        v.check(spacing.is_finite() && spacing > 0.0, || {
            format!("grid spacing must be finite and > 0, got {spacing}")
        });
        v.check(len >= MIN_SAMPLES, || {
            format!("grid needs at least {MIN_SAMPLES} samples, got {len}")
        });
        v.into_result()?;
        Ok(Self { origin, spacing, len })
    }

    /// `len` points covering `[start, end]` inclusive.
    pub fn spanning(start: f64, end: f64, len: usize) -> Result<Self> {
        if !(end > start) || len < 2 {
            return Err(Error::invalid(format!(
                "cannot span [{start}, {end}] with {len} points"
            )));
        }
        Self::new(start, (end - start) / (len - 1) as f64, len)
    }

    pub fn position(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.spacing
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(|i| self.position(i))
    }

    pub fn length(&self) -> f64 {
        (self.len - 1) as f64 * self.spacing
    }
}

/// A sampled complex wavefunction.
#[derive(Debug, Clone, PartialEq)]
pub struct GridWavefunction {
    grid: Grid,
    samples: Vec<Complex64>,
}

impl GridWavefunction {
    pub fn new(origin: f64, spacing: f64, samples: Vec<Complex64>) -> Result<Self> {
        let grid = Grid::new(origin, spacing, samples.len())?;
        if samples.iter().any(|z| !z.is_finite()) {
            return Err(Error::invalid("wavefunction samples must be finite"));
        }
        Ok(Self { grid, samples })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new(grid.origin, grid.spacing, grid.positions().map(f).collect())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `Σ|ψ_i|² dη`.
    pub fn norm_sqr(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.spacing
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOLERANCE
    }

    /// Rescaled so that `Σ|ψ|²dη = 1`.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if n <= 0.0 {
            return Err(Error::invalid("cannot normalize a zero wavefunction"));
        }
        Ok(self.scaled(Complex64::new(1.0 / n.sqrt(), 0.0)))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|z| z.conj()).collect(),
        }
    }

    fn ensure_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::invalid(format!(
                "grid mismatch: {:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }

    /// Second-order finite-difference derivative: central in the interior,
    /// one-sided three-point at both ends.
    pub fn derivative(&self) -> Vec<Complex64> {
        let psi = &self.samples;
        let n = psi.len();
        let inv_2h = 1.0 / (2.0 * self.grid.spacing);
        let mut d = Vec::with_capacity(n);
        d.push((-3.0 * psi[0] + 4.0 * psi[1] - psi[2]) * inv_2h);
        d.extend(psi.windows(3).map(|w| (w[2] - w[0]) * inv_2h));
        d.push((3.0 * psi[n - 1] - 4.0 * psi[n - 2] + psi[n - 3]) * inv_2h);
        d
    }
}

/// Gaussian wavepacket `exp(−(η−η₀)²/2σ²) · e^{ik(η−η₀)}`, normalized on the
/// grid.
///
/// The amplitude width `σ` is chosen so that two packets with centres `s`
/// apart have overlap `exp(−s²/4σ²)` (for equal carriers).
pub fn gaussian_packet(grid: Grid, center: f64, width: f64, wavenumber: f64) -> Result<GridWavefunction> {
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::invalid(format!("packet width must be > 0, got {width}")));
    }
    GridWavefunction::from_fn(grid, |x| {
        let u = x - center;
        Complex64::from_polar((-0.5 * (u / width).powi(2)).exp(), wavenumber * u)
    })?
    .normalized()
}

/// Plane wave `e^{ikη}/√(N dη)`, normalized on the grid.
pub fn plane_wave(grid: Grid, wavenumber: f64) -> Result<GridWavefunction> {
    let amplitude = 1.0 / (grid.len as f64 * grid.spacing).sqrt();
    GridWavefunction::from_fn(grid, |x| Complex64::from_polar(amplitude, wavenumber * (x - grid.origin)))
}

/// Real (current-free) Gaussian bump, normalized on the grid.
pub fn real_packet(grid: Grid, center: f64, width: f64) -> Result<GridWavefunction> {
    gaussian_packet(grid, center, width, 0.0)
}

/// `c₁ψ₁ + c₂ψ₂`. The branches must be individually normalized; the result
/// is normalized only when they do not overlap.
pub fn superpose(
    amplitudes: &BranchAmplitudes,
    psi1: &GridWavefunction,
    psi2: &GridWavefunction,
) -> Result<GridWavefunction> {
    psi1.ensure_same_grid(psi2)?;
    let mut v = Violations::new();
    v.check(psi1.is_normalized(), || {
        format!("branch 1 norm is {}, expected 1", psi1.norm_sqr())
    });
    v.check(psi2.is_normalized(), || {
        format!("branch 2 norm is {}, expected 1", psi2.norm_sqr())
    });
    v.into_result()?;
    let (c1, c2) = (amplitudes.c1(), amplitudes.c2());
    Ok(GridWavefunction {
        grid: psi1.grid,
        samples: psi1
            .samples
            .iter()
            .zip(&psi2.samples)
            .map(|(a, b)| c1 * a + c2 * b)
            .collect(),
    })
}

/// Discrete inner product `Σ ψ₁*_i ψ₂_i dη`.
pub fn overlap(psi1: &GridWavefunction, psi2: &GridWavefunction) -> Result<Complex64> {
    psi1.ensure_same_grid(psi2)?;
    let sum: Complex64 = psi1
        .samples
        .iter()
        .zip(&psi2.samples)
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(sum * psi1.grid.spacing)
}

/// Measured cross terms between two branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceCheck {
    pub overlap: Complex64,
    /// `max_i |ψ₁_i ψ₂_i| / (max|ψ₁| · max|ψ₂|)`.
    pub pointwise: f64,
}

impl InterferenceCheck {
    pub fn non_interfering(&self) -> bool {
        self.overlap.norm() < INTERFERENCE_TOLERANCE && self.pointwise < INTERFERENCE_TOLERANCE
    }
}

pub fn interference(psi1: &GridWavefunction, psi2: &GridWavefunction) -> Result<InterferenceCheck> {
    let overlap = overlap(psi1, psi2)?;
    let peak = |s: &[Complex64]| s.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let scale = peak(&psi1.samples) * peak(&psi2.samples);
    let cross = psi1
        .samples
        .iter()
        .zip(&psi2.samples)
        .map(|(a, b)| (a * b).norm())
        .fold(0.0, f64::max);
    let pointwise = if scale > 0.0 { cross / scale } else { 0.0 };
    Ok(InterferenceCheck { overlap, pointwise })
}

/// `true` when both the overlap and every pointwise product `ψ₁*ψ₂` vanish
/// to within [`INTERFERENCE_TOLERANCE`].
pub fn non_interfering(psi1: &GridWavefunction, psi2: &GridWavefunction) -> Result<bool> {
    Ok(interference(psi1, psi2)?.non_interfering())
}

/// Real current density sampled on a wavefunction's grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentDensity {
    grid: Grid,
    values: Vec<f64>,
}

impl CurrentDensity {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// Pointwise `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::invalid("current densities live on different grids"));
        }
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }

    pub fn max_abs_difference(&self, other: &Self) -> Result<f64> {
        Ok(self.combine(1.0, other, -1.0)?.max_abs())
    }
}

/// `j = (iħe/2m)(ψ ∂ψ* − ψ* ∂ψ)` with second-order finite differences.
pub fn current_density(psi: &GridWavefunction, constants: &PhysicalConstants) -> Result<CurrentDensity> {
    let prefactor = constants.reduced_planck() * constants.electron_charge()
        / (2.0 * constants.electron_mass());
    let i_factor = Complex64::new(0.0, prefactor);
    let dpsi = psi.derivative();

    let mut values = Vec::with_capacity(psi.len());
    let mut residue: f64 = 0.0;
    for (p, d) in psi.samples.iter().zip(&dpsi) {
        let bracket = p * d.conj() - p.conj() * d;
        let j = i_factor * bracket;
        residue = residue.max(j.im.abs());
        values.push(j.re);
    }

    let peak = |s: &[Complex64]| s.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let bound = REALITY_TOLERANCE * prefactor * peak(&psi.samples) * peak(&dpsi);
    if residue > bound {
        return Err(Error::Precondition(format!(
            "current density has imaginary residue {residue:e} above {bound:e}"
        )));
    }
    Ok(CurrentDensity {
        grid: psi.grid,
        values,
    })
}

/// Both sides of the mixture decomposition of the current.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureCurrent {
    pub branch: [CurrentDensity; 2],
    /// Current of the superposed state.
    pub total: CurrentDensity,
    /// `|c₁|²j₁ + |c₂|²j₂`.
    pub mixture: CurrentDensity,
    pub max_abs_deviation: f64,
}

/// Computes both sides of the decomposition without checking that the
/// branches are non-interfering, so the cross term can be inspected.
pub fn decompose_current(
    amplitudes: &BranchAmplitudes,
    psi1: &GridWavefunction,
    psi2: &GridWavefunction,
    constants: &PhysicalConstants,
) -> Result<MixtureCurrent> {
    let total = current_density(&superpose(amplitudes, psi1, psi2)?, constants)?;
    let j1 = current_density(psi1, constants)?;
    let j2 = current_density(psi2, constants)?;
    let [w1, w2] = amplitudes.weights();
    let mixture = j1.combine(w1, &j2, w2)?;
    let max_abs_deviation = total.max_abs_difference(&mixture)?;
    Ok(MixtureCurrent {
        branch: [j1, j2],
        total,
        mixture,
        max_abs_deviation,
    })
}

/// Checks that the current of `c₁ψ₁ + c₂ψ₂` equals `|c₁|²j₁ + |c₂|²j₂`.
///
/// Refuses to run when the branches overlap: the decomposition only holds
/// when the cross terms `ψ₁*ψ₂` vanish.
pub fn mixture_current_check(
    amplitudes: &BranchAmplitudes,
    psi1: &GridWavefunction,
    psi2: &GridWavefunction,
    constants: &PhysicalConstants,
) -> Result<MixtureCurrent> {
    let check = interference(psi1, psi2)?;
    if !check.non_interfering() {
        return Err(Error::Precondition(format!(
            "branches interfere: non-interference condition psi1* psi2 = 0 violated \
             (|overlap| = {:e}, pointwise = {:e}, tolerance {INTERFERENCE_TOLERANCE:e})",
            check.overlap.norm(),
            check.pointwise
        )));
    }
    decompose_current(amplitudes, psi1, psi2, constants)
}

/// Current carried by `n` independent electrons in the same state.
pub fn ensemble_current(n: u64, j: &CurrentDensity) -> Result<CurrentDensity> {
    if n == 0 {
        return Err(Error::invalid("ensemble size must be at least 1"));
    }
    Ok(j.scaled(n as f64))
}

/// Writes `eta,re_psi,im_psi` rows with a header.
pub fn write_wavefunction_table<W: Write>(psi: &GridWavefunction, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["eta", "re_psi", "im_psi"])?;
    for (x, z) in psi.grid.positions().zip(&psi.samples) {
        w.write_record([x.to_string(), z.re.to_string(), z.im.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a table written by [`write_wavefunction_table`]. The grid is
/// recovered from the first two `eta` values.
pub fn read_wavefunction_table<R: Read>(input: R) -> Result<GridWavefunction> {
    let mut r = csv::Reader::from_reader(input);
    let mut etas = Vec::new();
    let mut samples = Vec::new();
    for row in r.records() {
        let row = row?;
        let field = |i: usize| -> Result<f64> {
            row.get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::invalid(format!("bad numeric field {i} in row {row:?}")))
        };
        etas.push(field(0)?);
        samples.push(Complex64::new(field(1)?, field(2)?));
    }
    if etas.len() < 2 {
        return Err(Error::invalid("wavefunction table needs at least two rows"));
    }
    GridWavefunction::new(etas[0], etas[1] - etas[0], samples)
}

/// Writes `eta,j_a` rows with a header.
pub fn write_current_table<W: Write>(j: &CurrentDensity, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["eta", "j_a"])?;
    for (x, v) in j.grid.positions().zip(&j.values) {
        w.write_record([x.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn constants() -> PhysicalConstants {
        PhysicalConstants::codata2018()
    }

    // 1 µm wire segment, 1 nm packets
    fn grid(n: usize) -> Grid {
        Grid::spanning(-0.5e-6, 0.5e-6, n).unwrap()
    }

    #[test]
    fn grid_requires_eight_points_and_positive_spacing() {
        assert!(Grid::new(0.0, 1.0, 7).is_err());
        assert!(Grid::new(0.0, 0.0, 8).is_err());
        match Grid::new(f64::NAN, -1.0, 3) {
            Err(Error::Validation(v)) => assert_eq!(v.len(), 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pure_branch_superposition_is_branch_one() {
        let g = grid(512);
        let p1 = gaussian_packet(g, -1e-7, 2e-8, 3e8).unwrap();
        let p2 = gaussian_packet(g, 1e-7, 2e-8, -3e8).unwrap();
        let pure = BranchAmplitudes::from_probability(1.0).unwrap();
        assert_eq!(superpose(&pure, &p1, &p2).unwrap(), p1);
    }

    #[test]
    fn disjoint_superposition_stays_normalized() {
        let g = grid(1024);
        let p1 = gaussian_packet(g, -2e-7, 1.5e-8, 0.0).unwrap();
        let p2 = gaussian_packet(g, 2e-7, 1.5e-8, 0.0).unwrap();
        let s = superpose(&BranchAmplitudes::balanced(), &p1, &p2).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-9);
        assert!(s.is_normalized());
    }

    #[test]
    fn identical_branches_double_the_norm() {
        let g = grid(1024);
        let p = gaussian_packet(g, 0.0, 3e-8, 1e8).unwrap();
        let s = superpose(&BranchAmplitudes::balanced(), &p, &p).unwrap();
        // |c1 + c2|² = 2
        assert_relative_eq!(s.norm_sqr(), 2.0, max_relative = 1e-12);
        assert!(!s.is_normalized());
    }

    #[test]
    fn superpose_rejects_unnormalized_and_mismatched() {
        let g = grid(256);
        let p = gaussian_packet(g, 0.0, 3e-8, 0.0).unwrap();
        let doubled = p.scaled(Complex64::new(2.0, 0.0));
        assert!(superpose(&BranchAmplitudes::balanced(), &p, &doubled).is_err());
        let other = gaussian_packet(grid(257), 0.0, 3e-8, 0.0).unwrap();
        assert!(superpose(&BranchAmplitudes::balanced(), &p, &other).is_err());
        assert!(overlap(&p, &other).is_err());
    }

    #[test]
    fn overlap_examples() {
        let g = grid(2048);
        let sigma = 1e-8;
        let p1 = gaussian_packet(g, -6.0 * sigma, sigma, 0.0).unwrap();
        assert_relative_eq!(overlap(&p1, &p1).unwrap().re, 1.0, epsilon = 1e-9);
        let p2 = gaussian_packet(g, 6.0 * sigma, sigma, 0.0).unwrap();
        // analytic bound exp(−144/4) ≈ 2.3e-16
        assert!(overlap(&p1, &p2).unwrap().norm() < 1e-12);
        let rotated = p1.scaled(Complex64::i());
        let ov = overlap(&p1, &rotated).unwrap();
        assert!((ov - Complex64::i()).norm() < 1e-9);
        assert!(non_interfering(&p1, &p2).unwrap());
        assert!(!non_interfering(&p1, &rotated).unwrap());
    }

    #[test]
    fn real_wavefunction_carries_no_current() {
        let p = real_packet(grid(512), 1e-8, 4e-8).unwrap();
        let j = current_density(&p, &constants()).unwrap();
        assert!(j.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn plane_wave_current_matches_closed_form() {
        let g = grid(4096);
        let k = 2.0e8;
        let psi = plane_wave(g, k).unwrap();
        let c = constants();
        let j = current_density(&psi, &c).unwrap();
        let amp2 = 1.0 / (g.len as f64 * g.spacing);
        let exact = c.electron_charge() * c.reduced_planck() * k / c.electron_mass() * amp2;
        // one-sided end stencils dominate: (k h)²/3 relative
        let kh = k * g.spacing;
        for v in j.values() {
            assert!((v - exact).abs() <= exact * kh * kh / 2.0, "{v} vs {exact}");
        }
    }

    #[test]
    fn conjugation_reverses_current() {
        let p = gaussian_packet(grid(512), 0.0, 5e-8, 1.5e8).unwrap();
        let j = current_density(&p, &constants()).unwrap();
        let jc = current_density(&p.conj(), &constants()).unwrap();
        for (a, b) in j.values().iter().zip(jc.values()) {
            assert_eq!(*a, -*b);
        }
    }

    #[test]
    fn decomposition_with_pure_branch_equals_branch_current() {
        let g = grid(1024);
        let p1 = gaussian_packet(g, -2e-7, 2e-8, 2e8).unwrap();
        let p2 = gaussian_packet(g, 2e-7, 2e-8, -2e8).unwrap();
        let pure = BranchAmplitudes::from_probability(1.0).unwrap();
        let m = mixture_current_check(&pure, &p1, &p2, &constants()).unwrap();
        assert_eq!(m.total, m.branch[0]);
        assert_eq!(m.max_abs_deviation, 0.0);
    }

    #[test]
    fn overlapping_branches_are_refused_and_show_cross_term() {
        let g = grid(1024);
        let p1 = gaussian_packet(g, -2e-8, 3e-8, 2e8).unwrap();
        let p2 = gaussian_packet(g, 2e-8, 3e-8, -2e8).unwrap();
        let a = BranchAmplitudes::balanced();
        match mixture_current_check(&a, &p1, &p2, &constants()) {
            Err(Error::Precondition(msg)) => assert!(msg.contains("non-interference")),
            other => panic!("expected refusal, got {other:?}"),
        }
        let raw = decompose_current(&a, &p1, &p2, &constants()).unwrap();
        let scale = raw.branch[0].max_abs().max(raw.branch[1].max_abs());
        assert!(raw.max_abs_deviation > 1e-3 * scale);
    }

    #[test]
    fn ensemble_scaling() {
        let psi = plane_wave(grid(64), 1e8).unwrap();
        let j = current_density(&psi, &constants()).unwrap();
        assert_eq!(ensemble_current(1, &j).unwrap(), j);
        let ten = ensemble_current(10, &j).unwrap();
        for (a, b) in ten.values().iter().zip(j.values()) {
            assert_eq!(*a, 10.0 * b);
        }
        assert!(ensemble_current(0, &j).is_err());
    }

    #[test]
    fn wavefunction_table_layout() {
        let psi = GridWavefunction::new(
            0.5,
            0.25,
            (0..8).map(|i| Complex64::new(i as f64, 1.0 - i as f64)).collect(),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_wavefunction_table(&psi, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("eta,re_psi,im_psi"));
        assert_eq!(lines.next(), Some("0.5,0,1"));
        assert_eq!(lines.next(), Some("0.75,1,0"));
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn phases_matter_only_through_moduli() {
        let g = grid(2048);
        let p1 = gaussian_packet(g, -2e-7, 1.5e-8, 2e8).unwrap();
        let p2 = gaussian_packet(g, 2e-7, 1.5e-8, -2e8).unwrap();
        let a = BranchAmplitudes::new(
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.8),
        )
        .unwrap();
        let m = mixture_current_check(&a, &p1, &p2, &constants()).unwrap();
        let m2 = mixture_current_check(&a.rephased(1.0, -2.0), &p1, &p2, &constants()).unwrap();
        assert!(m.total.max_abs_difference(&m2.total).unwrap() <= 1e-12 * m.total.max_abs());
    }
}
