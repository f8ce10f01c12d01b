//! Two-slit intensity patterns on the detection screen, incoherent mixtures
//! of them, and fringe shift / visibility estimation.
//!
//! The synthesized pattern is the standard far-field form
//! `I(x) = [1 + cos(2πx/P + Δφ)] · exp(−x²/2w²)` with fringe period
//! `P = λL/d`. The phase enters with a `+` sign so that the bright fringe
//! nearest the centre sits at `x = −(P/2π)Δφ`, which is exactly
//! [`fringe_shift`](crate::physics::fringe_shift) for the flux producing
//! `Δφ`.

use std::f64::consts::TAU;
use std::io::Write;

use crate::error::{Error, Result, Violations};
use crate::physics::{ApparatusGeometry, PhysicalConstants};

/// Minimum fringe visibility for a shift to be measurable.
pub const MIN_VISIBILITY: f64 = 0.05;
/// Probability-sum tolerance for incoherent mixtures.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;
/// Minimum screen span, in fringe periods.
pub const MIN_PERIODS_ON_SCREEN: f64 = 4.0;
/// Envelope level (relative to its peak) below which samples are ignored by
/// the estimators.
const ENVELOPE_FLOOR: f64 = 1e-3;

/// `n` equally spaced screen positions from `x_min` to `x_max`. Sample `i`
/// stands for the bin `[x_i − dx/2, x_i + dx/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScreenGrid {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl ScreenGrid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        let mut v = Violations::new();
        v.check(x_min.is_finite() && x_max.is_finite(), || {
            "screen bounds must be finite".to_string()
        });
        v.check(x_max > x_min, || {
            format!("screen x_max ({x_max}) must exceed x_min ({x_min})")
        });
        v.check(n >= 2, || format!("screen needs at least 2 samples, got {n}"));
        v.into_result()?;
        Ok(Self { x_min, x_max, n })
    }

    /// Symmetric screen `[−half_width, half_width]`.
    pub fn centered(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    pub fn span(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn position(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.position(i))
    }

    /// Bin holding `x`, if it lies on the screen.
    pub fn bin_of(&self, x: f64) -> Option<usize> {
        let t = ((x - self.x_min) / self.dx()).round();
        (t >= 0.0 && t < self.n as f64).then_some(t as usize)
    }
}

/// Sampled screen intensity, usable as an unnormalized probability density.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityPattern {
    screen: ScreenGrid,
    intensity: Vec<f64>,
    fringe_period: Option<f64>,
    label: String,
}

impl IntensityPattern {
    pub fn new(screen: ScreenGrid, intensity: Vec<f64>) -> Result<Self> {
        let mut v = Violations::new();
        v.check(intensity.len() == screen.len(), || {
            format!(
                "pattern has {} samples but the screen has {}",
                intensity.len(),
                screen.len()
            )
        });
        v.check(intensity.iter().all(|&i| i.is_finite() && i >= 0.0), || {
            "intensities must be finite and non-negative".to_string()
        });
        v.check(intensity.iter().sum::<f64>() * screen.dx() > 0.0, || {
            "pattern has zero total intensity".to_string()
        });
        v.into_result()?;
        Ok(Self {
            screen,
            intensity,
            fringe_period: None,
            label: String::new(),
        })
    }

    /// Detection counts binned on `screen`. Positions off the screen are
    /// dropped.
    pub fn histogram(screen: ScreenGrid, detections: &[f64]) -> Result<Self> {
        let mut counts = vec![0.0; screen.len()];
        for &x in detections {
            if let Some(i) = screen.bin_of(x) {
                counts[i] += 1.0;
            }
        }
        Self::new(screen, counts)
    }

    /// Records the fringe period `λL/d`; the estimators need it.
    pub fn with_fringe_period(mut self, period: f64) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::invalid(format!("fringe period must be > 0, got {period}")));
        }
        self.fringe_period = Some(period);
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn screen(&self) -> &ScreenGrid {
        &self.screen
    }

    pub fn intensity(&self) -> &[f64] {
        &self.intensity
    }

    pub fn fringe_period(&self) -> Option<f64> {
        self.fringe_period
    }

    /// Free-form description of how the pattern was produced.
    pub fn label(&self) -> &str {
        &self.label
    }

    /// `Σ I_i dx`.
    pub fn mass(&self) -> f64 {
        self.intensity.iter().sum::<f64>() * self.screen.dx()
    }

    fn require_period(&self) -> Result<f64> {
        self.fringe_period.ok_or_else(|| {
            Error::invalid("pattern carries no fringe period; attach one with with_fringe_period")
        })
    }

    /// Writes `x_m,<value_column>` rows with a header.
    pub fn write_csv<W: Write>(&self, value_column: &str, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x_m", value_column])?;
        for (x, v) in self.screen.positions().zip(&self.intensity) {
            w.write_record([x.to_string(), v.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Far-field two-slit pattern with the Aharonov-Bohm phase `phase` inserted
/// between the two paths, under a Gaussian envelope of standard deviation
/// `envelope_width` centred at `x = 0`.
pub fn two_slit_pattern(
    constants: &PhysicalConstants,
    geometry: &ApparatusGeometry,
    phase: f64,
    screen: &ScreenGrid,
    envelope_width: f64,
) -> Result<IntensityPattern> {
    let period = geometry.fringe_period(constants);
    let mut v = Violations::new();
    v.check(envelope_width.is_finite() && envelope_width > 0.0, || {
        format!("envelope width must be > 0, got {envelope_width}")
    });
    v.check(phase.is_finite(), || format!("phase must be finite, got {phase}"));
    v.check(screen.span() >= MIN_PERIODS_ON_SCREEN * period, || {
        format!(
            "screen span {} m is narrower than {MIN_PERIODS_ON_SCREEN} fringe periods ({} m)",
            screen.span(),
            MIN_PERIODS_ON_SCREEN * period
        )
    });
    v.into_result()?;

    let k = TAU / period;
    let intensity = screen
        .positions()
        .map(|x| (1.0 + (k * x + phase).cos()) * (-0.5 * (x / envelope_width).powi(2)).exp())
        .collect();
    Ok(IntensityPattern::new(*screen, intensity)?
        .with_fringe_period(period)?
        .with_label(format!("two-slit, phase {phase:?} rad")))
}

/// Incoherent mixture `p₁I₁ + p₂I₂`.
pub fn mixture_pattern(
    p1: f64,
    pattern1: &IntensityPattern,
    p2: f64,
    pattern2: &IntensityPattern,
) -> Result<IntensityPattern> {
    let mut v = Violations::new();
    v.check(pattern1.screen == pattern2.screen, || {
        "mixture components live on different screens".to_string()
    });
    v.check((0.0..=1.0).contains(&p1) && (0.0..=1.0).contains(&p2), || {
        format!("probabilities ({p1}, {p2}) must lie in [0, 1]")
    });
    v.check((p1 + p2 - 1.0).abs() <= PROBABILITY_TOLERANCE, || {
        format!("probabilities sum to {}, expected 1", p1 + p2)
    });
    v.into_result()?;

    let intensity = pattern1
        .intensity
        .iter()
        .zip(&pattern2.intensity)
        .map(|(a, b)| p1 * a + p2 * b)
        .collect();
    let mut mixed = IntensityPattern::new(pattern1.screen, intensity)?.with_label(format!(
        "mixture {p1:?}·[{}] + {p2:?}·[{}]",
        pattern1.label, pattern2.label
    ));
    if let (Some(a), Some(b)) = (pattern1.fringe_period, pattern2.fringe_period) {
        if a == b {
            mixed = mixed.with_fringe_period(a)?;
        }
    }
    Ok(mixed)
}

/// Result of comparing a pattern against a reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeEstimate {
    /// Estimated translation of the pattern relative to the reference (m).
    pub shift: f64,
    /// Fringe visibility of the pattern, in `[0, 1]`.
    pub visibility: f64,
    /// One-sigma uncertainty of `shift` (m). Zero for noise-free patterns.
    pub uncertainty: f64,
}

/// Cumulative integral of the piecewise-linear interpolant through
/// `values`, evaluated at fractional index `t`. Zero before the first
/// sample, constant after the last.
struct LinearIntegral<'a> {
    values: &'a [f64],
    cumulative: Vec<f64>,
}

impl<'a> LinearIntegral<'a> {
    fn new(values: &'a [f64]) -> Self {
        let mut cumulative = Vec::with_capacity(values.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in values.windows(2) {
            acc += 0.5 * (w[0] + w[1]);
            cumulative.push(acc);
        }
        Self { values, cumulative }
    }

    fn at(&self, t: f64) -> f64 {
        let last = self.values.len() - 1;
        if t <= 0.0 {
            return 0.0;
        }
        if t >= last as f64 {
            return self.cumulative[last];
        }
        let i = t.floor() as usize;
        let f = t - i as f64;
        let (a, b) = (self.values[i], self.values[i + 1]);
        self.cumulative[i] + a * f + 0.5 * (b - a) * f * f
    }
}

/// Moving average over a window of `width` samples (fractional widths are
/// integrated exactly on the linear interpolant).
fn box_smooth(values: &[f64], width: f64) -> Vec<f64> {
    let integral = LinearIntegral::new(values);
    let half = 0.5 * width;
    (0..values.len())
        .map(|i| {
            let t = i as f64;
            (integral.at(t + half) - integral.at(t - half)) / width
        })
        .collect()
}

/// Slowly varying envelope of a fringe pattern: two passes of a one-period
/// box filter (a triangular kernel), which removes the fringe term and its
/// leading leakage through the envelope slope.
fn fringe_envelope(values: &[f64], period_bins: f64) -> Vec<f64> {
    box_smooth(&box_smooth(values, period_bins), period_bins)
}

/// Envelope-normalized fringe signal `I/E − 1` and the envelope itself.
/// Samples within one period of the screen edge, or where the envelope is
/// negligible, are zeroed in both.
struct FringeSignal {
    fringe: Vec<f64>,
    envelope: Vec<f64>,
}

impl FringeSignal {
    fn new(intensity: &[f64], period_bins: f64) -> Self {
        let n = intensity.len();
        let mut envelope = fringe_envelope(intensity, period_bins);
        let margin = period_bins.ceil() as usize;
        let peak = envelope
            .iter()
            .enumerate()
            .filter(|(i, _)| *i >= margin && *i + margin < n)
            .fold(0.0f64, |m, (_, &e)| m.max(e));
        let floor = ENVELOPE_FLOOR * peak;
        let mut fringe = vec![0.0; n];
        for i in 0..n {
            let inside = i >= margin && i + margin < n;
            if inside && envelope[i] > floor && envelope[i] > 0.0 {
                fringe[i] = intensity[i] / envelope[i] - 1.0;
            } else {
                envelope[i] = 0.0;
            }
        }
        Self { fringe, envelope }
    }
}

/// Fringe visibility `(I_max − I_min)/(I_max + I_min)` of the envelope-
/// normalized pattern over the two periods around the screen centre. The
/// extremes are those of the least-squares sinusoid `a + b cos kx + c sin kx`
/// at the known fringe wavenumber, which places them between grid samples
/// where necessary.
pub fn visibility(pattern: &IntensityPattern) -> Result<f64> {
    let period = pattern.require_period()?;
    let screen = pattern.screen;
    let period_bins = period / screen.dx();
    let signal = FringeSignal::new(&pattern.intensity, period_bins);
    let centre = 0.5 * (screen.x_min + screen.x_max);
    let k = TAU / period;

    // normal equations for (a, b, c)
    let mut m = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    let mut used = 0usize;
    for (i, x) in screen.positions().enumerate() {
        let u = x - centre;
        if u.abs() > period || signal.envelope[i] == 0.0 {
            continue;
        }
        let basis = [1.0, (k * u).cos(), (k * u).sin()];
        let y = 1.0 + signal.fringe[i];
        for r in 0..3 {
            rhs[r] += basis[r] * y;
            for c in 0..3 {
                m[r][c] += basis[r] * basis[c];
            }
        }
        used += 1;
    }
    if used < 3 {
        return Err(Error::Precondition(
            "too few usable samples in the central two fringe periods".to_string(),
        ));
    }
    let [a, b, c] = solve3(m, rhs).ok_or_else(|| {
        Error::Precondition("degenerate fringe fit in the central two periods".to_string())
    })?;
    if a <= 0.0 {
        return Ok(0.0);
    }
    Ok((b.hypot(c) / a).clamp(0.0, 1.0))
}

fn solve3(m: [[f64; 3]; 3], rhs: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&m);
    if d.abs() < 1e-300 {
        return None;
    }
    let mut out = [0.0; 3];
    for (col, slot) in out.iter_mut().enumerate() {
        let mut mc = m;
        for r in 0..3 {
            mc[r][col] = rhs[r];
        }
        *slot = det(&mc) / d;
    }
    Some(out)
}

/// Estimates how far `pattern` is translated relative to `reference`.
///
/// Both patterns are divided by their own fringe envelopes, and the
/// resulting fringe signals are cross-correlated (weighted by the reference
/// envelope, indices wrapping around the screen). The correlation peak
/// nearest zero lag is refined by quadratic interpolation. Because fringes
/// repeat every period, the search covers lags up to half a period either
/// way (and never more than half the screen).
pub fn estimate_shift(pattern: &IntensityPattern, reference: &IntensityPattern) -> Result<FringeEstimate> {
    if pattern.screen != reference.screen {
        return Err(Error::invalid("pattern and reference live on different screens"));
    }
    let period = reference.require_period()?;
    let reference_visibility = visibility(reference)?;
    if reference_visibility <= MIN_VISIBILITY {
        return Err(Error::Precondition(format!(
            "unmeasurable shift: reference visibility {reference_visibility:.4} is below {MIN_VISIBILITY}"
        )));
    }
    let pattern_visibility = visibility(&pattern.clone().with_fringe_period(period)?)?;
    if pattern_visibility <= MIN_VISIBILITY {
        return Err(Error::Precondition(format!(
            "unmeasurable shift: pattern visibility {pattern_visibility:.4} is below {MIN_VISIBILITY}"
        )));
    }

    let dx = reference.screen.dx();
    let n = reference.screen.len();
    let period_bins = period / dx;
    let r = FringeSignal::new(&reference.intensity, period_bins);
    let p = FringeSignal::new(&pattern.intensity, period_bins);

    let max_lag = ((0.5 * period_bins).ceil() as isize).min(n as isize / 2 - 1).max(1);
    let correlation = |lag: isize| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            let w = r.envelope[i];
            if w == 0.0 {
                continue;
            }
            let j = (i as isize + lag).rem_euclid(n as isize) as usize;
            acc += w * r.fringe[i] * p.fringe[j];
        }
        acc
    };
    let lags: Vec<isize> = (-max_lag - 1..=max_lag + 1).collect();
    let values: Vec<f64> = lags.iter().map(|&l| correlation(l)).collect();

    // peak over the interior lags; ties resolve toward zero lag
    let mut best = 1usize;
    for idx in 1..values.len() - 1 {
        let better = values[idx] > values[best]
            || (values[idx] == values[best] && lags[idx].abs() < lags[best].abs());
        if better {
            best = idx;
        }
    }
    let (y0, y1, y2) = (values[best - 1], values[best], values[best + 1]);
    let curvature = y0 - 2.0 * y1 + y2;
    let offset = if curvature.abs() > 0.0 {
        (0.5 * (y0 - y2) / curvature).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    let shift = (lags[best] as f64 + offset) * dx;
    Ok(FringeEstimate {
        shift: shift.clamp(-0.5 * reference.screen.span(), 0.5 * reference.screen.span()),
        visibility: pattern_visibility,
        uncertainty: 0.0,
    })
}
