//! Seeded Monte Carlo run of the mixture experiment.
//!
//! For every external electron the branch is drawn first (branch 1 when
//! `u < |c₁|²`), then a detection position from that branch's two-slit
//! pattern. Electron `i` uses words `4i..4i+4` of stream 0, so the run can
//! be split into shards at any boundary and still produce the same
//! detections. Bootstrap resampling for branch `k` uses stream `k`
//! (1 or 2) and the pooled bootstrap uses stream 3.

use std::fmt::Write as _;

use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::dual::{outcome_distribution, BranchAmplitudes, DualSolenoidConfig, MixtureOutcome};
use crate::error::{Error, Result};
use crate::pattern::{estimate_shift, two_slit_pattern, FringeEstimate, IntensityPattern, ScreenGrid};
use crate::physics::fringe_shift;
use crate::sampling::{rng_for, uniform, DetectionSampler, RNG_ALGORITHM};

/// Report layout version.
pub const REPORT_FORMAT_VERSION: u32 = 1;
pub const DEFAULT_BOOTSTRAP_RESAMPLES: usize = 200;

const WORDS_PER_ELECTRON: u128 = 4;
const POOLED_STREAM: u64 = 3;

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSetup {
    pub config: DualSolenoidConfig,
    pub amplitudes: BranchAmplitudes,
    pub screen: ScreenGrid,
    pub envelope_width: f64,
    pub n_electrons: usize,
    pub seed: u64,
    /// Zero disables the bootstrap; uncertainties are then reported as NaN.
    pub bootstrap_resamples: usize,
}

/// Shift estimate for one group of detections.
#[derive(Debug, Clone, PartialEq)]
pub enum BranchEstimate {
    Measured(FringeEstimate),
    NoDetections,
    Unmeasurable(String),
}

impl BranchEstimate {
    pub fn measured(&self) -> Option<&FringeEstimate> {
        match self {
            BranchEstimate::Measured(e) => Some(e),
            _ => None,
        }
    }

    fn status(&self) -> &'static str {
        match self {
            BranchEstimate::Measured(_) => "measured",
            BranchEstimate::NoDetections => "no_detections",
            BranchEstimate::Unmeasurable(_) => "unmeasurable",
        }
    }
}

/// Per-branch results.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchReport {
    pub outcome: MixtureOutcome,
    pub count: usize,
    pub estimate: BranchEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub setup: ExperimentSetup,
    pub fringe_period: f64,
    pub branches: [BranchReport; 2],
    /// All detections together, as an observer who cannot see the branch
    /// would record them.
    pub pooled: BranchEstimate,
    /// `Σ (n_k/n) Δx̂_k` over the branch-separated estimates.
    pub mean_shift: Option<f64>,
    pub mean_shift_uncertainty: Option<f64>,
    /// `|c₁|²Δx₁ + |c₂|²Δx₂`.
    pub expected_mean_shift: f64,
    /// Detection positions per branch, in electron order.
    pub detections: [Vec<f64>; 2],
}

impl ExperimentReport {
    pub fn counts(&self) -> [usize; 2] {
        [self.branches[0].count, self.branches[1].count]
    }

    /// Histogram of the pooled detections on the experiment screen.
    pub fn pooled_histogram(&self) -> Result<IntensityPattern> {
        let all: Vec<f64> = self.detections.iter().flatten().copied().collect();
        Ok(IntensityPattern::histogram(self.setup.screen, &all)?
            .with_fringe_period(self.fringe_period)?
            .with_label("pooled detections"))
    }

    /// Histogram of one branch's detections (`branch` is 0 or 1).
    pub fn branch_histogram(&self, branch: usize) -> Result<IntensityPattern> {
        Ok(
            IntensityPattern::histogram(self.setup.screen, &self.detections[branch])?
                .with_fringe_period(self.fringe_period)?
                .with_label(format!("branch {} detections", branch + 1)),
        )
    }

    /// Flat `key = value` text, one entry per line, fixed key order.
    /// Floats use the shortest representation that round-trips.
    pub fn to_text(&self) -> String {
        let s = &self.setup;
        let k = s.config.constants();
        let g = s.config.geometry();
        let mut out = String::new();
        let mut put = |key: &str, value: String| {
            let _ = writeln!(out, "{key} = {value}");
        };
        put("format_version", REPORT_FORMAT_VERSION.to_string());
        put("rng.algorithm", format!("\"{RNG_ALGORITHM}\""));
        put("rng.seed", s.seed.to_string());
        put("config.constants.electron_charge", format!("{:?}", k.electron_charge()));
        put("config.constants.electron_mass", format!("{:?}", k.electron_mass()));
        put("config.constants.reduced_planck", format!("{:?}", k.reduced_planck()));
        put("config.geometry.screen_distance", format!("{:?}", g.screen_distance()));
        put("config.geometry.slit_separation", format!("{:?}", g.slit_separation()));
        put("config.geometry.electron_speed", format!("{:?}", g.electron_speed()));
        for (i, sol) in s.config.solenoids().iter().enumerate() {
            put(&format!("config.solenoid{}.field", i + 1), format!("{:?}", sol.field()));
            put(&format!("config.solenoid{}.radius", i + 1), format!("{:?}", sol.radius()));
        }
        let (c1, c2) = (s.amplitudes.c1(), s.amplitudes.c2());
        put("config.amplitudes.c1_re", format!("{:?}", c1.re));
        put("config.amplitudes.c1_im", format!("{:?}", c1.im));
        put("config.amplitudes.c2_re", format!("{:?}", c2.re));
        put("config.amplitudes.c2_im", format!("{:?}", c2.im));
        put("config.screen.x_min", format!("{:?}", s.screen.x_min()));
        put("config.screen.x_max", format!("{:?}", s.screen.x_max()));
        put("config.screen.n", s.screen.len().to_string());
        put("config.envelope_width", format!("{:?}", s.envelope_width));
        put("config.n_electrons", s.n_electrons.to_string());
        put("config.bootstrap_resamples", s.bootstrap_resamples.to_string());
        put("derived.fringe_period", format!("{:?}", self.fringe_period));
        put("derived.screen_dx", format!("{:?}", s.screen.dx()));
        for b in &self.branches {
            let p = format!("branch{}", b.outcome.branch_index);
            put(&format!("{p}.probability"), format!("{:?}", b.outcome.probability));
            put(&format!("{p}.flux"), format!("{:?}", b.outcome.branch_flux));
            put(&format!("{p}.phase"), format!("{:?}", b.outcome.branch_phase));
            put(&format!("{p}.expected_shift"), format!("{:?}", b.outcome.branch_shift));
            put(&format!("{p}.count"), b.count.to_string());
            put_estimate(&mut put, &p, &b.estimate);
        }
        put_estimate(&mut put, "pooled", &self.pooled);
        put("mixture.expected_shift", format!("{:?}", self.expected_mean_shift));
        put("mixture.mean_shift", optional(self.mean_shift));
        put("mixture.mean_shift_uncertainty", optional(self.mean_shift_uncertainty));
        out
    }
}

fn optional(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| format!("{x:?}"))
}

fn put_estimate(put: &mut impl FnMut(&str, String), prefix: &str, e: &BranchEstimate) {
    put(&format!("{prefix}.status"), e.status().to_string());
    let m = e.measured();
    put(&format!("{prefix}.shift"), optional(m.map(|e| e.shift)));
    put(&format!("{prefix}.visibility"), optional(m.map(|e| e.visibility)));
    put(&format!("{prefix}.uncertainty"), optional(m.map(|e| e.uncertainty)));
}

/// Shift of a set of detections against `reference`, with a bootstrap
/// standard error from `resamples` resamples drawn on `(seed, stream)`.
pub fn estimate_shift_from_detections(
    detections: &[f64],
    reference: &IntensityPattern,
    resamples: usize,
    seed: u64,
    stream: u64,
) -> Result<FringeEstimate> {
    let period = reference
        .fringe_period()
        .ok_or_else(|| Error::invalid("reference pattern carries no fringe period"))?;
    let screen = *reference.screen();
    let histogram = |xs: &[f64]| -> Result<IntensityPattern> {
        IntensityPattern::histogram(screen, xs)?.with_fringe_period(period)
    };
    let mut estimate = estimate_shift(&histogram(detections)?, reference)?;

    if resamples == 0 {
        estimate.uncertainty = f64::NAN;
        return Ok(estimate);
    }
    let mut rng = rng_for(seed, stream);
    let n = detections.len();
    let mut draws = vec![0.0; n];
    let mut shifts = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        for slot in draws.iter_mut() {
            let idx = ((uniform(&mut rng) * n as f64) as usize).min(n - 1);
            *slot = detections[idx];
        }
        if let Ok(e) = histogram(&draws).and_then(|h| estimate_shift(&h, reference)) {
            shifts.push(e.shift);
        }
    }
    estimate.uncertainty = sample_std(&shifts);
    Ok(estimate)
}

fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let ss: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

fn classify(
    detections: &[f64],
    reference: &IntensityPattern,
    resamples: usize,
    seed: u64,
    stream: u64,
) -> BranchEstimate {
    if detections.is_empty() {
        return BranchEstimate::NoDetections;
    }
    match estimate_shift_from_detections(detections, reference, resamples, seed, stream) {
        Ok(e) => BranchEstimate::Measured(e),
        Err(err) => BranchEstimate::Unmeasurable(err.to_string()),
    }
}

/// Draws the branch and position of electrons `start..end`.
fn simulate_range(
    seed: u64,
    start: usize,
    end: usize,
    branch1_weight: f64,
    samplers: &[DetectionSampler; 2],
) -> Vec<(u8, f64)> {
    let mut rng: ChaCha20Rng = rng_for(seed, 0);
    rng.set_word_pos(start as u128 * WORDS_PER_ELECTRON);
    (start..end)
        .map(|_| {
            let branch = if uniform(&mut rng) < branch1_weight { 0u8 } else { 1u8 };
            let x = samplers[branch as usize].sample(&mut rng);
            (branch, x)
        })
        .collect()
}

/// Reference single-threaded run.
pub fn run_experiment(setup: &ExperimentSetup) -> Result<ExperimentReport> {
    run_experiment_sharded(setup, 1)
}

/// Same as [`run_experiment`] with the electrons split across `shards`
/// contiguous ranges simulated in parallel. The report does not depend on
/// the shard count.
pub fn run_experiment_sharded(setup: &ExperimentSetup, shards: usize) -> Result<ExperimentReport> {
    if setup.n_electrons == 0 {
        return Err(Error::invalid("n_electrons must be at least 1"));
    }
    if shards == 0 {
        return Err(Error::invalid("shard count must be at least 1"));
    }
    let config = &setup.config;
    let constants = config.constants();
    let geometry = config.geometry();
    let outcomes = outcome_distribution(config, &setup.amplitudes);
    let patterns = [
        two_slit_pattern(constants, geometry, outcomes[0].branch_phase, &setup.screen, setup.envelope_width)?,
        two_slit_pattern(constants, geometry, outcomes[1].branch_phase, &setup.screen, setup.envelope_width)?,
    ];
    let reference = two_slit_pattern(constants, geometry, 0.0, &setup.screen, setup.envelope_width)?;
    let samplers = [DetectionSampler::new(&patterns[0])?, DetectionSampler::new(&patterns[1])?];
    let fringe_period = geometry.fringe_period(constants);

    let n = setup.n_electrons;
    let per_shard = n.div_ceil(shards);
    let chunks: Vec<Vec<(u8, f64)>> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let start = (s * per_shard).min(n);
            let end = ((s + 1) * per_shard).min(n);
            simulate_range(setup.seed, start, end, outcomes[0].probability, &samplers)
        })
        .collect();

    let mut detections: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for (branch, x) in chunks.into_iter().flatten() {
        detections[branch as usize].push(x);
    }

    let b = setup.bootstrap_resamples;
    let estimates: Vec<BranchEstimate> = (0..2)
        .map(|k| classify(&detections[k], &reference, b, setup.seed, k as u64 + 1))
        .collect();
    let pooled_detections: Vec<f64> = detections.iter().flatten().copied().collect();
    let pooled = classify(&pooled_detections, &reference, b, setup.seed, POOLED_STREAM);

    let counts = [detections[0].len(), detections[1].len()];
    let freq = counts.map(|c| c as f64 / n as f64);
    let (mean_shift, mean_shift_uncertainty) = {
        let mut mean = Some(0.0);
        let mut var = 0.0;
        for k in 0..2 {
            if counts[k] == 0 {
                continue;
            }
            match estimates[k].measured() {
                Some(e) => {
                    mean = mean.map(|m| m + freq[k] * e.shift);
                    var += (freq[k] * e.uncertainty).powi(2);
                }
                None => mean = None,
            }
        }
        if let (Some(a), Some(c)) = (estimates[0].measured(), estimates[1].measured()) {
            // branch-frequency noise
            var += (a.shift - c.shift).powi(2) * freq[0] * freq[1] / n as f64;
        }
        (mean, mean.map(|_| var.sqrt()))
    };

    let expected_mean_shift = outcomes[0].probability * outcomes[0].branch_shift
        + outcomes[1].probability * outcomes[1].branch_shift;
    debug_assert_eq!(
        outcomes[0].branch_shift,
        fringe_shift(constants, geometry, outcomes[0].branch_flux)
    );

    let mut estimates = estimates.into_iter();
    let branches = [0, 1].map(|k| BranchReport {
        outcome: outcomes[k],
        count: counts[k],
        estimate: estimates.next().unwrap_or(BranchEstimate::NoDetections),
    });

    Ok(ExperimentReport {
        setup: setup.clone(),
        fringe_period,
        branches,
        pooled,
        mean_shift,
        mean_shift_uncertainty,
        expected_mean_shift,
        detections,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::{ApparatusGeometry, PhysicalConstants};

    fn setup(amplitudes: BranchAmplitudes, n: usize, seed: u64) -> ExperimentSetup {
        let c = PhysicalConstants::codata2018();
        let g = ApparatusGeometry::new(1.0, 1.0e-5, 1.0e6).unwrap();
        let period = g.fringe_period(&c);
        let config = DualSolenoidConfig::antisymmetric_branches(2.0e-4, 1.0e-6, g, c).unwrap();
        ExperimentSetup {
            config,
            amplitudes,
            screen: ScreenGrid::centered(50.0 * period, 1024).unwrap(),
            envelope_width: 30.0 * period,
            n_electrons: n,
            seed,
            bootstrap_resamples: 10,
        }
    }

    #[test]
    fn pure_branch_never_visits_branch_two() {
        let r = run_experiment(&setup(BranchAmplitudes::from_probability(1.0).unwrap(), 2000, 5)).unwrap();
        assert_eq!(r.counts(), [2000, 0]);
        assert_eq!(r.branches[1].estimate, BranchEstimate::NoDetections);
        assert!(r.to_text().contains("branch2.status = no_detections"));
    }

    #[test]
    fn counts_add_up() {
        let r = run_experiment(&setup(BranchAmplitudes::from_probability(0.3).unwrap(), 3001, 8)).unwrap();
        assert_eq!(r.counts()[0] + r.counts()[1], 3001);
    }

    #[test]
    fn shard_count_does_not_change_report() {
        let s = setup(BranchAmplitudes::balanced(), 4000, 77);
        let reference = run_experiment(&s).unwrap();
        for shards in [2, 3, 8] {
            let r = run_experiment_sharded(&s, shards).unwrap();
            assert_eq!(r, reference);
            assert_eq!(r.to_text(), reference.to_text());
        }
    }

    #[test]
    fn rejects_empty_runs() {
        assert!(run_experiment(&setup(BranchAmplitudes::balanced(), 0, 1)).is_err());
        assert!(run_experiment_sharded(&setup(BranchAmplitudes::balanced(), 10, 1), 0).is_err());
    }
}
