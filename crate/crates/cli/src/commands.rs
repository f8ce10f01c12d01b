//! The five subcommands. Each resolves and validates its configuration
//! first, computes, then returns the printed text and the staged files.

use std::fmt::Write as _;

use ab_mixture::current::{
    current_density, ensemble_current, gaussian_packet, mixture_current_check, plane_wave,
    real_packet, write_current_table, CurrentDensity, Grid,
};
use ab_mixture::dual::{
    classical_total_flux, classical_totals, mixture_expectations, mixture_field, mixture_flux,
    outcome_distribution,
};
use ab_mixture::experiment::{run_experiment_sharded, BranchEstimate, ExperimentSetup};
use ab_mixture::pattern::{mixture_pattern, two_slit_pattern, visibility, IntensityPattern, ScreenGrid};
use ab_mixture::physics::{
    de_broglie_wavelength, fringe_shift, fringe_shift_classical_form, phase_shift,
};

use crate::config::{CurrentMode, RunConfig};
use crate::error::CliError;
use crate::output::{Artifacts, Table};

pub struct Outcome {
    pub text: String,
    pub artifacts: Artifacts,
}

impl Outcome {
    fn printed(text: String) -> Self {
        Self { text, artifacts: Artifacts::default() }
    }
}

fn pattern_csv(p: &IntensityPattern, column: &str) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    p.write_csv(column, &mut buf)?;
    Ok(buf)
}

/// `x_m,count` over the screen bins. Unlike a pattern, an empty branch
/// yields an all-zero table.
fn counts_csv(screen: &ScreenGrid, detections: &[f64]) -> Result<Vec<u8>, CliError> {
    let mut counts = vec![0u64; screen.len()];
    for &x in detections {
        if let Some(i) = screen.bin_of(x) {
            counts[i] += 1;
        }
    }
    let table = |e: csv::Error| CliError::Io(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x_m", "count"]).map_err(table)?;
    for (x, c) in screen.positions().zip(counts) {
        w.write_record([x.to_string(), c.to_string()]).map_err(table)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

fn current_csv(j: &CurrentDensity) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    write_current_table(j, &mut buf)?;
    Ok(buf)
}

pub fn phase(config: &RunConfig, csv: bool) -> Result<Outcome, CliError> {
    let mut r = config.resolver();
    let c = r.constants();
    let g = r.geometry();
    let s = r.solenoid(1);
    if let (Some(g), Some(s)) = (&g, &s) {
        if let Err(ab_mixture::Error::Validation(msgs)) = g.clearance(s.radius()) {
            msgs.into_iter().for_each(|m| r.problem(format!("solenoid1: {m}")));
        }
    }
    let (c, g, s) = r.finish(c.zip(g).zip(s).map(|((c, g), s)| (c, g, s)))?;

    let flux = s.flux();
    let mut t = Table::default();
    t.row("wavelength", de_broglie_wavelength(&c, &g), "m");
    t.row("flux", flux, "Wb");
    t.row("phase_shift", phase_shift(&c, flux), "rad");
    t.row("fringe_shift", fringe_shift(&c, &g, flux), "m");
    t.row("fringe_shift_classical_form", fringe_shift_classical_form(&c, &g, flux), "m");
    t.row("fringe_period", g.fringe_period(&c), "m");
    finish_table(t, csv, "phase.csv")
}

pub fn classical(config: &RunConfig, csv: bool) -> Result<Outcome, CliError> {
    let mut r = config.resolver();
    let v = r.dual();
    let (cfg, _, _) = r.finish(v)?;

    let [f1, f2] = cfg.fluxes();
    let totals = classical_totals(&cfg);
    let mut t = Table::default();
    t.row("flux1", f1, "Wb");
    t.row("flux2", f2, "Wb");
    t.row("total_flux", classical_total_flux(f1, f2), "Wb");
    t.row("phase_shift", totals.phase, "rad");
    t.row("fringe_shift", totals.shift, "m");
    finish_table(t, csv, "classical.csv")
}

fn finish_table(t: Table, csv: bool, name: &str) -> Result<Outcome, CliError> {
    let mut out = Outcome::printed(t.render());
    if csv {
        out.artifacts.add(name, t.to_csv()?);
    }
    Ok(out)
}

pub fn mixture(config: &RunConfig, csv: bool) -> Result<Outcome, CliError> {
    let mut r = config.resolver();
    let dual = r.dual();
    let amps = r.amplitudes();
    let screen = if csv {
        let (c, g) = (dual.as_ref().map(|d| &d.1), dual.as_ref().map(|d| &d.2));
        r.screen(c, g).map(Some)
    } else {
        Some(None)
    };
    let ((cfg, c, g), amps, screen) =
        r.finish(dual.zip(amps).zip(screen).map(|((d, a), s)| (d, a, s)))?;

    let outcomes = outcome_distribution(&cfg, &amps);
    let means = mixture_expectations(&cfg, &amps);
    let [f1, f2] = cfg.fluxes();
    let mut t = Table::default();
    for o in &outcomes {
        let k = o.branch_index;
        t.row(format!("branch{k}.probability"), o.probability, "1");
        t.row(format!("branch{k}.flux"), o.branch_flux, "Wb");
        t.row(format!("branch{k}.phase_shift"), o.branch_phase, "rad");
        t.row(format!("branch{k}.fringe_shift"), o.branch_shift, "m");
    }
    let fields = [cfg.solenoid(0).field(), cfg.solenoid(1).field()];
    t.row("mean.field", mixture_field(&amps, fields[0], fields[1]), "T");
    t.row("mean.flux", mixture_flux(&amps, f1, f2), "Wb");
    t.row("mean.phase_shift", means.phase, "rad");
    t.row("mean.fringe_shift", means.shift, "m");

    let mut artifacts = Artifacts::default();
    if let Some((screen, width)) = screen {
        let branch = |o: &ab_mixture::dual::MixtureOutcome| {
            two_slit_pattern(&c, &g, o.branch_phase, &screen, width)
        };
        let p1 = branch(&outcomes[0])?;
        let p2 = branch(&outcomes[1])?;
        let mixed = mixture_pattern(outcomes[0].probability, &p1, outcomes[1].probability, &p2)?;
        t.row("branch1.visibility", visibility(&p1)?, "1");
        t.row("branch2.visibility", visibility(&p2)?, "1");
        t.row("mixture.visibility", visibility(&mixed)?, "1");
        artifacts.add("pattern_branch1.csv", pattern_csv(&p1, "intensity")?);
        artifacts.add("pattern_branch2.csv", pattern_csv(&p2, "intensity")?);
        artifacts.add("pattern_mixture.csv", pattern_csv(&mixed, "intensity")?);
        artifacts.add("mixture.csv", t.to_csv()?);
    }
    Ok(Outcome { text: t.render(), artifacts })
}

pub fn experiment(config: &RunConfig) -> Result<Outcome, CliError> {
    let mut r = config.resolver();
    let dual = r.dual();
    let amps = r.amplitudes();
    let screen = {
        let (c, g) = (dual.as_ref().map(|d| &d.1), dual.as_ref().map(|d| &d.2));
        r.screen(c, g)
    };
    let n = r.n_electrons();
    let seed = r.seed();
    let resamples = r.bootstrap_resamples();
    let setup = dual.zip(amps).zip(screen).zip(n).zip(seed).map(
        |(((((cfg, _, _), amplitudes), (screen, envelope_width)), n_electrons), seed)| {
            ExperimentSetup {
                config: cfg,
                amplitudes,
                screen,
                envelope_width,
                n_electrons,
                seed,
                bootstrap_resamples: resamples,
            }
        },
    );
    let setup = r.finish(setup)?;

    let shards = std::thread::available_parallelism().map_or(1, |n| n.get());
    let report = run_experiment_sharded(&setup, shards)?;

    let mut artifacts = Artifacts::default();
    artifacts.add("report.txt", report.to_text().into_bytes());
    let pooled: Vec<f64> = report.detections.iter().flatten().copied().collect();
    artifacts.add("histogram.csv", counts_csv(&setup.screen, &pooled)?);
    for (k, xs) in report.detections.iter().enumerate() {
        artifacts.add(&format!("histogram_branch{}.csv", k + 1), counts_csv(&setup.screen, xs)?);
    }

    let mut text = String::new();
    let describe = |e: &BranchEstimate| match e {
        BranchEstimate::Measured(m) => {
            format!("shift {:.6e} m ± {:.2e} m, visibility {:.4}", m.shift, m.uncertainty, m.visibility)
        }
        BranchEstimate::NoDetections => "no detections".to_string(),
        BranchEstimate::Unmeasurable(why) => format!("unmeasurable ({why})"),
    };
    for (k, b) in report.branches.iter().enumerate() {
        let _ = writeln!(
            text,
            "branch{}: {} electrons, expected shift {:.6e} m, {}",
            k + 1,
            b.count,
            b.outcome.branch_shift,
            describe(&b.estimate)
        );
    }
    let _ = writeln!(text, "pooled: {}", describe(&report.pooled));
    match (report.mean_shift, report.mean_shift_uncertainty) {
        (Some(m), Some(u)) => {
            let _ = writeln!(text, "mean shift: {m:.6e} m ± {u:.2e} m (expected {:.6e} m)", report.expected_mean_shift);
        }
        _ => {
            let _ = writeln!(text, "mean shift: unavailable (expected {:.6e} m)", report.expected_mean_shift);
        }
    }
    Ok(Outcome { text, artifacts })
}

pub fn current(config: &RunConfig) -> Result<Outcome, CliError> {
    let mut r = config.resolver();
    let c = r.constants();
    let spec = r.current();
    let amps = match spec.as_ref().and_then(|s| s.mode) {
        Some(CurrentMode::Packets) => r.amplitudes().map(Some),
        _ => Some(None),
    };
    let (c, spec, amps) = r.finish(c.zip(spec).zip(amps).map(|((c, s), a)| (c, s, a)))?;
    // keys were checked by the resolver; grid and packet values are checked here
    let grid = Grid::spanning(spec.x_min.unwrap(), spec.x_max.unwrap(), spec.n.unwrap())?;
    let n = spec.n_electrons.unwrap_or(1);

    let mut t = Table::default();
    let mut artifacts = Artifacts::default();
    match spec.mode.unwrap() {
        CurrentMode::Packets => {
            let (b1, b2) = (spec.branch1.unwrap(), spec.branch2.unwrap());
            let packet = |p: &crate::config::PacketSection| {
                gaussian_packet(grid, p.center.unwrap(), p.width.unwrap(), p.wavenumber.unwrap())
            };
            let psi1 = packet(&b1)?;
            let psi2 = packet(&b2)?;
            let amps = amps.expect("packets mode resolves amplitudes");
            let m = mixture_current_check(&amps, &psi1, &psi2, &c)?;
            let total = ensemble_current(n, &m.total)?;
            let scale = m.branch[0].max_abs().max(m.branch[1].max_abs());
            t.row("max_abs_current", total.max_abs(), "A");
            t.row("max_abs_deviation", m.max_abs_deviation, "A");
            t.row("relative_deviation", m.max_abs_deviation / scale, "1");
            artifacts.add("current.csv", current_csv(&total)?);
            artifacts.add("current_branches.csv", branches_csv(&m.branch, &m.mixture, n)?);
        }
        CurrentMode::PlaneWave => {
            let k = spec.wavenumber.unwrap();
            let psi = plane_wave(grid, k)?;
            let j = current_density(&psi, &c)?;
            let density = 1.0 / (grid.len as f64 * grid.spacing);
            let exact = c.electron_charge() * c.reduced_planck() * k / c.electron_mass() * density;
            let deviation = j.values().iter().fold(0.0f64, |m, v| m.max((v - exact).abs()));
            // central-difference truncation is (k·dη)²/6 relative; the
            // one-sided end stencils are within twice that
            let bound = exact.abs() * (k * grid.spacing).powi(2) / 3.0;
            t.row("analytic_current", n as f64 * exact, "A");
            t.row("max_abs_deviation", n as f64 * deviation, "A");
            t.row("deviation_bound", n as f64 * bound, "A");
            artifacts.add("current.csv", current_csv(&ensemble_current(n, &j)?)?);
        }
        CurrentMode::Real => {
            let psi = real_packet(grid, spec.center.unwrap(), spec.width.unwrap())?;
            let j = ensemble_current(n, &current_density(&psi, &c)?)?;
            t.row("max_abs_current", j.max_abs(), "A");
            artifacts.add("current.csv", current_csv(&j)?);
        }
    }
    Ok(Outcome { text: t.render(), artifacts })
}

fn branches_csv(branch: &[CurrentDensity; 2], mixture: &CurrentDensity, n: u64) -> Result<Vec<u8>, CliError> {
    let table = |e: csv::Error| CliError::Io(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["eta", "j_branch1_a", "j_branch2_a", "j_mixture_a"]).map_err(table)?;
    let scale = n as f64;
    let rows = branch[0]
        .grid()
        .positions()
        .zip(branch[0].values())
        .zip(branch[1].values())
        .zip(mixture.values());
    for (((x, a), b), m) in rows {
        let cells = [x, scale * a, scale * b, scale * m].map(|v| v.to_string());
        w.write_record(&cells).map_err(table)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}
