use nief_core::doppler::{velocity_average, DopplerConfig};
use nief_core::dressed::{cascade_transform, probe_r2, probe_r4, saturated_populations, SaturatedPopulations};
use nief_core::lics::{self, ContinuumCoupling, LicsDetunings};
use nief_core::model::{unsaturated_populations, Branching, CoherenceWidths, FieldSpec, LevelRates, RelaxationSpec};
use nief_core::relaxation::{f_interference, wigner6j};
use nief_core::spectra::{spectrum, sum_rule, wide_grid, Probe, SUM_RULE_NORMALIZATION};
use nief_core::Complex64;
use nief_oracle::angular::sixj_by_3j_contraction;
use nief_oracle::density::{ladder_probe, probe_amplitudes, strong_field_populations};
use nief_oracle::quadrature::adaptive_integrate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn polar(rng: &mut ChaCha8Rng, max: f64) -> Complex64 {
    Complex64::from_polar(rng.random_range(0.0..max), rng.random_range(0.0..std::f64::consts::TAU))
}

fn draw(rng: &mut ChaCha8Rng) -> (RelaxationSpec, FieldSpec) {
    let mut rate = || rng.random_range(0.1..10.0);
    let gamma = LevelRates::new(rate(), rate(), rate(), rate());
    let width = CoherenceWidths { lg: rate(), ng: rate(), nm: rate(), lm: rate(), ln: rate(), gm: rate() };
    let split = |rng: &mut ChaCha8Rng, total: f64| {
        let a = rng.random_range(0.0..total);
        let b = rng.random_range(0.0..total - a);
        (a, b)
    };
    let (gn, gl) = split(rng, gamma.g);
    let (mn, ml) = split(rng, gamma.m);
    let pump = LevelRates::new(
        rng.random_range(0.0..1.0),
        rng.random_range(0.0..1.0),
        rng.random_range(0.0..1.0),
        rng.random_range(0.0..1.0),
    );
    let relax = RelaxationSpec { gamma, branch: Branching { gn, gl, mn, ml }, width, pump };
    let mut fields = FieldSpec::resonant([0.0; 4]);
    for d in &mut fields.detuning {
        *d = rng.random_range(-20.0..20.0);
    }
    fields.rabi = [
        polar(rng, 5.0),
        Complex64::from_polar(1e-3, rng.random_range(0.0..6.0)),
        polar(rng, 5.0),
        Complex64::from_polar(1e-3, rng.random_range(0.0..6.0)),
    ];
    (relax, fields)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn probe_amplitudes_match_direct_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..300 {
        let (relax, fields) = draw(&mut rng);
        let pops = unsaturated_populations(&relax);
        let sat = saturated_populations(&relax, &fields, &pops).unwrap();
        let (o2, o4, _) = probe_amplitudes(&relax, &fields, &sat.r).unwrap();
        worst = worst.max(rel(probe_r2(&relax, &fields, &sat).unwrap(), o2));
        worst = worst.max(rel(probe_r4(&relax, &fields, &sat).unwrap(), o4));
    }
    assert!(worst <= 1e-8, "worst relative error {worst:e}");
}

#[test]
fn saturated_populations_match_direct_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..300 {
        let (relax, fields) = draw(&mut rng);
        let pops = unsaturated_populations(&relax);
        let sat = saturated_populations(&relax, &fields, &pops).unwrap();
        let direct = strong_field_populations(&relax, &fields).unwrap();
        let scale = pops.n.g.abs() + pops.n.n.abs() + pops.n.m.abs() + pops.n.l.abs();
        for (a, b) in [(sat.r.g, direct.r.g), (sat.r.n, direct.r.n), (sat.r.m, direct.r.m), (sat.r.l, direct.r.l)] {
            assert!((a - b).abs() <= 1e-10 * scale, "{a} vs {b}");
        }
        for k in 0..4 {
            assert!((sat.dr[k] - direct.dr[k]).abs() <= 1e-10 * scale);
        }
    }
}

#[test]
fn cascade_map_reproduces_the_ladder() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..200 {
        let (relax, mut fields) = draw(&mut rng);
        fields.rabi[2] = Complex64::new(0.0, 0.0);
        let r = LevelRates::new(
            rng.random_range(0.0..1.0),
            rng.random_range(0.0..1.0),
            rng.random_range(0.0..1.0),
            rng.random_range(0.0..1.0),
        );
        let ladder = ladder_probe(&relax, &fields, &r).unwrap();
        let sat = SaturatedPopulations::from_levels(r);
        let mapped = probe_r2(&relax, &cascade_transform(&fields), &sat).unwrap();
        assert!(rel(mapped, ladder) <= 1e-10, "{mapped} vs {ladder}");
    }
}

#[test]
fn sum_rule_normalisation_from_quadrature() {
    let integral = adaptive_integrate(|x| 1.0 / (1.0 + x * x), f64::NEG_INFINITY, f64::INFINITY, 1e-12).unwrap();
    assert!((SUM_RULE_NORMALIZATION * integral.value - 1.0).abs() < 1e-10);
}

#[test]
fn strongly_driven_spectrum_integral_matches_quadrature() {
    let relax = RelaxationSpec {
        gamma: LevelRates::new(1.0, 1.0, 1.0, 1.0),
        branch: Branching::default(),
        width: CoherenceWidths::uniform(1.0),
        pump: LevelRates::new(0.0, 1.0, 0.0, 0.3),
    };
    let fields = FieldSpec::resonant([3.0, 1e-3, 0.0, 1e-3]).with_detuning(0, 1.5);
    let pops = unsaturated_populations(&relax);
    let sat = saturated_populations(&relax, &fields, &pops).unwrap();
    let quad = adaptive_integrate(
        |x| {
            let f = fields.with_detuning(1, x);
            (-Complex64::i() * probe_r2(&relax, &f, &sat).unwrap() / f.rabi[1]).re
        },
        f64::NEG_INFINITY,
        f64::INFINITY,
        1e-10,
    )
    .unwrap();
    let grid = wide_grid(50.0, 0.01, 1e4, 1.01).unwrap();
    let spec = spectrum(&relax, &fields, &pops, &grid, Probe::R2).unwrap();
    let rule = sum_rule(&spec, sat.dr[1], 1.0).unwrap();
    assert!((SUM_RULE_NORMALIZATION * quad.value - sat.dr[1]).abs() < 1e-8);
    assert!(rule.rel_error < 1e-3, "{rule:?}");
}

#[test]
fn sixj_matches_contraction() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut checked = 0;
    while checked < 300 {
        let j: Vec<f64> = (0..6).map(|_| rng.random_range(0..=8) as f64 / 2.0).collect();
        let a = wigner6j(j[0], j[1], j[2], j[3], j[4], j[5]).unwrap();
        let b = sixj_by_3j_contraction(j[0], j[1], j[2], j[3], j[4], j[5]).unwrap();
        assert!((a - b).abs() <= 1e-10, "{j:?}: {a} vs {b}");
        if a != 0.0 {
            checked += 1;
        }
    }
}

#[test]
fn interference_profile_integrates_to_zero() {
    for (g, g1, delta) in [(1.0, 1.0, 0.0), (0.3, 2.0, 1.5), (5.0, 0.2, -4.0)] {
        let e =
            adaptive_integrate(|x| f_interference(x, g, g1, delta), f64::NEG_INFINITY, f64::INFINITY, 1e-11).unwrap();
        assert!(e.value.abs() < 1e-8, "{e:?}");
    }
}

#[test]
fn voigt_average_matches_quadrature() {
    let lorentz = |v: f64| Complex64::new(1.0, 0.0) / Complex64::new(1.0, 0.7 - 2.0 * v);
    let u = 1.0;
    let gh = velocity_average(|v| Ok(lorentz(v)), &DopplerConfig::new(u)).unwrap();
    let weight = |v: f64| (-(v * v) / (u * u)).exp() / (std::f64::consts::PI.sqrt() * u);
    let re = adaptive_integrate(|v| weight(v) * lorentz(v).re, f64::NEG_INFINITY, f64::INFINITY, 1e-13).unwrap();
    let im = adaptive_integrate(|v| weight(v) * lorentz(v).im, f64::NEG_INFINITY, f64::INFINITY, 1e-13).unwrap();
    let want = Complex64::new(re.value, im.value);
    assert!(rel(gh, want) <= 1e-8, "{gh} vs {want}");
}

#[test]
fn lics_dual_expressions_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..2000 {
        let mut u = |lo: f64, hi: f64| rng.random_range(lo..hi);
        let c = ContinuumCoupling {
            k1: u(0.0, 1.0),
            k2: u(0.0, 1.0),
            k3: u(0.0, 1.0),
            k4: u(0.0, 1.0),
            g_ll: u(0.0, 5.0),
            g_nn: u(0.0, 5.0),
            g_mn: u(0.0, 5.0),
            q_nl: u(-5.0, 5.0),
            q_ln: u(-5.0, 5.0),
            q_gl: u(-5.0, 5.0),
            q_ng: u(-5.0, 5.0),
            q_gn: u(-5.0, 5.0),
        };
        let d = LicsDetunings {
            x_l: u(-10.0, 10.0),
            x_n: u(-10.0, 10.0),
            y_l: u(-10.0, 10.0),
            y_n: u(-10.0, 10.0),
            z_gm: u(-10.0, 10.0),
            z_mu: u(-10.0, 10.0),
        };
        let a = lics::chi3_ratio(&c, &d).unwrap();
        let (br, bi) = nief_oracle::lics::chi3_ratio(&c, &d);
        assert!((a - Complex64::new(br, bi)).norm() <= 1e-12 * a.norm().max(1.0));
        let a = lics::alpha1_ratio(&c, &d).unwrap();
        assert!((a - nief_oracle::lics::alpha1_ratio(&c, &d)).abs() <= 1e-12 * a.abs().max(1.0));
        let a = lics::alpha_mu_ratio(&c, &d).unwrap();
        assert!((a - nief_oracle::lics::alpha_mu_ratio(&c, &d)).abs() <= 1e-12 * a.abs().max(1.0));
    }
}
