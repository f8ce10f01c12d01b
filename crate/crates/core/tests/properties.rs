use std::f64::consts::PI;

use ab_mixture::current::{
    current_density, gaussian_packet, mixture_current_check, read_wavefunction_table,
    write_wavefunction_table, Grid, GridWavefunction,
};
use ab_mixture::dual::{
    classical_totals, mixture_expectations, mixture_field, mixture_flux, outcome_distribution,
    BranchAmplitudes, DualSolenoidConfig,
};
use ab_mixture::physics::{
    fringe_shift, fringe_shift_classical_form, phase_shift, ulp_distance, ApparatusGeometry,
    PhysicalConstants, Solenoid,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn log_range(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

fn geometry() -> impl Strategy<Value = ApparatusGeometry> {
    (log_range(0.05, 20.0), log_range(1e-7, 1e-3), log_range(1e3, 1e8))
        .prop_map(|(l, d, v)| ApparatusGeometry::new(l, d, v).unwrap())
}

fn flux() -> impl Strategy<Value = f64> {
    (log_range(1e-18, 1e-12), any::<bool>()).prop_map(|(m, neg)| if neg { -m } else { m })
}

fn amplitudes() -> impl Strategy<Value = BranchAmplitudes> {
    (0.0..=1.0f64, -PI..PI, -PI..PI).prop_map(|(p, t1, t2)| {
        BranchAmplitudes::from_probability(p).unwrap().rephased(t1, t2)
    })
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn fringe_shift_forms_agree_to_a_few_ulp(g in geometry(), phi in flux()) {
        let c = PhysicalConstants::codata2018();
        let a = fringe_shift(&c, &g, phi);
        let b = fringe_shift_classical_form(&c, &g, phi);
        prop_assert!(ulp_distance(a, b) <= 4, "{a:e} vs {b:e}: {} ulp", ulp_distance(a, b));
    }

    #[test]
    fn fringe_shift_ignores_planck_scale(g in geometry(), phi in flux()) {
        let c = PhysicalConstants::codata2018();
        let base = fringe_shift(&c, &g, phi);
        for k in [0.1, 1.0, 10.0] {
            let scaled = fringe_shift(&c.with_planck_scaled(k).unwrap(), &g, phi);
            prop_assert!(ulp_distance(base, scaled) <= 8);
        }
    }

    #[test]
    fn phase_is_linear_and_odd(a in -3.0..3.0f64, b in -3.0..3.0f64, f1 in flux(), f2 in flux()) {
        let c = PhysicalConstants::codata2018();
        let lhs = phase_shift(&c, a * f1 + b * f2);
        let rhs = a * phase_shift(&c, f1) + b * phase_shift(&c, f2);
        let scale = (a * phase_shift(&c, f1)).abs() + (b * phase_shift(&c, f2)).abs();
        prop_assert!((lhs - rhs).abs() <= 8.0 * f64::EPSILON * scale);
        prop_assert_eq!(phase_shift(&c, -f1), -phase_shift(&c, f1));
    }

    #[test]
    fn mixture_flux_is_convex(amps in amplitudes(), f1 in flux(), f2 in flux()) {
        let m = mixture_flux(&amps, f1, f2);
        let slack = 4.0 * f64::EPSILON * f1.abs().max(f2.abs());
        prop_assert!(m >= f1.min(f2) - slack && m <= f1.max(f2) + slack);
    }

    #[test]
    fn only_moduli_matter(p in 0.0..=1.0f64, t1 in -PI..PI, t2 in -PI..PI, b1 in -1e-3..1e-3f64, b2 in -1e-3..1e-3f64) {
        let c = PhysicalConstants::codata2018();
        let g = ApparatusGeometry::new(1.0, 1e-5, 1e6).unwrap();
        let cfg = DualSolenoidConfig::new(
            Solenoid::new(b1, 1e-6).unwrap(),
            Solenoid::new(b2, 1e-6).unwrap(),
            g,
            c,
        ).unwrap();
        let a = BranchAmplitudes::from_probability(p).unwrap();
        let r = a.rephased(t1, t2);
        // tolerance relative to the largest term, not the possibly cancelled sum
        let close = |x: f64, y: f64, scale: f64| (x - y).abs() <= 8.0 * f64::EPSILON * scale;
        let field_scale = b1.abs().max(b2.abs());
        prop_assert!(close(mixture_field(&a, b1, b2), mixture_field(&r, b1, b2), field_scale));
        let (f1, f2) = (b1 * PI * 1e-12, b2 * PI * 1e-12);
        prop_assert!(close(mixture_flux(&a, f1, f2), mixture_flux(&r, f1, f2), f1.abs().max(f2.abs())));
        let (o, or) = (outcome_distribution(&cfg, &a), outcome_distribution(&cfg, &r));
        let phase_scale = o[0].branch_phase.abs().max(o[1].branch_phase.abs());
        let shift_scale = o[0].branch_shift.abs().max(o[1].branch_shift.abs());
        let (m, mr) = (mixture_expectations(&cfg, &a), mixture_expectations(&cfg, &r));
        prop_assert!(close(m.phase, mr.phase, phase_scale) && close(m.shift, mr.shift, shift_scale));
        for k in 0..2 {
            prop_assert!(close(o[k].probability, or[k].probability, 1.0));
            prop_assert_eq!(o[k].branch_shift, or[k].branch_shift);
        }
    }

    #[test]
    fn outcome_mean_matches_expectations(amps in amplitudes(), b1 in -1e-3..1e-3f64, b2 in -1e-3..1e-3f64) {
        let c = PhysicalConstants::codata2018();
        let g = ApparatusGeometry::new(1.0, 1e-5, 1e6).unwrap();
        let cfg = DualSolenoidConfig::new(
            Solenoid::new(b1, 1e-6).unwrap(),
            Solenoid::new(b2, 2e-6).unwrap(),
            g,
            c,
        ).unwrap();
        let o = outcome_distribution(&cfg, &amps);
        let psum: f64 = o.iter().map(|x| x.probability).sum();
        prop_assert!((psum - 1.0).abs() <= 1e-12);
        let mean_phase: f64 = o.iter().map(|x| x.probability * x.branch_phase).sum();
        let mean_shift: f64 = o.iter().map(|x| x.probability * x.branch_shift).sum();
        let m = mixture_expectations(&cfg, &amps);
        let scale_p = o.iter().map(|x| x.branch_phase.abs()).fold(0.0, f64::max);
        let scale_s = o.iter().map(|x| x.branch_shift.abs()).fold(0.0, f64::max);
        prop_assert!((mean_phase - m.phase).abs() <= 1e-12 * scale_p);
        prop_assert!((mean_shift - m.shift).abs() <= 1e-12 * scale_s);
    }

    #[test]
    fn global_phase_leaves_current_unchanged(theta in -PI..PI, k in -4e8..4e8f64) {
        let c = PhysicalConstants::codata2018();
        let g = Grid::spanning(-0.5e-6, 0.5e-6, 512).unwrap();
        let psi = gaussian_packet(g, 0.0, 5e-8, k).unwrap();
        let j = current_density(&psi, &c).unwrap();
        let jr = current_density(&psi.scaled(Complex64::from_polar(1.0, theta)), &c).unwrap();
        let scale = j.max_abs().max(1e-300);
        prop_assert!(j.max_abs_difference(&jr).unwrap() <= 1e-12 * scale);
        let jc = current_density(&psi.conj(), &c).unwrap();
        for (a, b) in j.values().iter().zip(jc.values()) {
            prop_assert_eq!(*a, -*b);
        }
    }

    #[test]
    fn disjoint_branches_decompose(p in 0.0..=1.0f64, t in -PI..PI, k1 in -4e8..4e8f64, k2 in -4e8..4e8f64, sep in 12.0..20.0f64) {
        let c = PhysicalConstants::codata2018();
        let g = Grid::spanning(-0.5e-6, 0.5e-6, 2048).unwrap();
        let sigma = 1.5e-8;
        let psi1 = gaussian_packet(g, -0.5 * sep * sigma, sigma, k1).unwrap();
        let psi2 = gaussian_packet(g, 0.5 * sep * sigma, sigma, k2).unwrap();
        let a = BranchAmplitudes::from_probability(p).unwrap().rephased(0.0, t);
        let m = mixture_current_check(&a, &psi1, &psi2, &c).unwrap();
        let scale = m.branch[0].max_abs().max(m.branch[1].max_abs());
        prop_assert!(m.max_abs_deviation <= 1e-9 * scale);
    }

    #[test]
    fn wavefunction_table_round_trips(values in prop::collection::vec((-1e3..1e3f64, -1e3..1e3f64), 8..40), origin in -1.0..1.0f64, spacing in 1e-3..1.0f64) {
        let samples: Vec<Complex64> = values.iter().map(|&(r, i)| Complex64::new(r, i)).collect();
        let psi = GridWavefunction::new(origin, spacing, samples).unwrap();
        let mut buf = Vec::new();
        write_wavefunction_table(&psi, &mut buf).unwrap();
        let back = read_wavefunction_table(buf.as_slice()).unwrap();
        prop_assert_eq!(back.samples(), psi.samples());
        prop_assert_eq!(back.grid().origin, origin);
        prop_assert!((back.grid().spacing - spacing).abs() <= 1e-12 * spacing.max(origin.abs()));
    }
}

#[test]
fn classical_and_mixture_differ_for_generic_fluxes() {
    let c = PhysicalConstants::codata2018();
    let g = ApparatusGeometry::new(1.0, 1e-5, 1e6).unwrap();
    let cfg = DualSolenoidConfig::new(
        Solenoid::new(3e-4, 1e-6).unwrap(),
        Solenoid::new(1e-4, 1e-6).unwrap(),
        g,
        c,
    )
    .unwrap();
    let classical = classical_totals(&cfg);
    let mixture = mixture_expectations(&cfg, &BranchAmplitudes::balanced());
    assert_ne!(classical.phase, mixture.phase);
    assert_ne!(classical.shift, mixture.shift);
    // the mixture is the half-weighted sum here
    assert!((mixture.phase - 0.5 * classical.phase).abs() <= 1e-12 * classical.phase.abs());

    // equal fluxes: mixture mean equals either branch
    let twin = DualSolenoidConfig::new(
        Solenoid::new(3e-4, 1e-6).unwrap(),
        Solenoid::new(3e-4, 1e-6).unwrap(),
        g,
        c,
    )
    .unwrap();
    let o = outcome_distribution(&twin, &BranchAmplitudes::balanced());
    let m = mixture_expectations(&twin, &BranchAmplitudes::balanced());
    assert!((m.phase - o[0].branch_phase).abs() <= 1e-15 * m.phase.abs());
}

#[test]
fn classical_zero_and_mixture_two_point_from_same_magnitude() {
    let c = PhysicalConstants::codata2018();
    let g = ApparatusGeometry::new(1.0, 1e-5, 1e6).unwrap();
    for beta in [1e-5, 2e-4, 7e-3] {
        let cl = DualSolenoidConfig::antisymmetric_classical(beta, 1e-6, g, c).unwrap();
        let t = classical_totals(&cl);
        assert_eq!((t.phase, t.shift), (0.0, 0.0));
        let mx = DualSolenoidConfig::antisymmetric_branches(beta, 1e-6, g, c).unwrap();
        let [o1, o2] = outcome_distribution(&mx, &BranchAmplitudes::balanced());
        assert!(o1.branch_phase > 0.0 && o1.branch_shift.abs() > 0.0);
        assert_eq!(o2.branch_phase, -o1.branch_phase);
    }
}
