//! Probe spectra and the figures of merit built on them.

use std::f64::consts::FRAC_1_PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dressed::{coupling_factors, denominators, probe_r2, probe_r4, saturated_populations, SaturatedPopulations};
use crate::error::{Error, Result};
use crate::model::{FieldSpec, Populations, RelaxationSpec};

/// Measure normalisation of the integrated-intensity identity: the integral of
/// `Re(−i r/G)` over the probe detuning equals `π Δr`, so the reported integral
/// carries a factor `1/π`. Fixed by integrating the bare Lorentzian with the
/// adaptive-quadrature oracle.
pub const SUM_RULE_NORMALIZATION: f64 = FRAC_1_PI;

/// Required ratio of grid half-span to the widest linewidth for [`sum_rule`].
pub const SUM_RULE_SPAN_FACTOR: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Probe {
    #[default]
    R2,
    R4,
}

impl Probe {
    /// Index of the probe detuning in [`FieldSpec::detuning`].
    pub fn index(self) -> usize {
        match self {
            Probe::R2 => 1,
            Probe::R4 => 3,
        }
    }

    /// Index into `Δr`.
    pub fn dr_index(self) -> usize {
        self.index()
    }

    pub fn amplitude(
        self,
        relax: &RelaxationSpec,
        fields: &FieldSpec,
        sat: &SaturatedPopulations,
    ) -> Result<Complex64> {
        match self {
            Probe::R2 => probe_r2(relax, fields, sat),
            Probe::R4 => probe_r4(relax, fields, sat),
        }
    }

    /// Normalised response `−i r/G` at the given field set.
    pub fn response(self, relax: &RelaxationSpec, fields: &FieldSpec, sat: &SaturatedPopulations) -> Result<Complex64> {
        let g = fields.rabi[self.index()];
        if g.norm() == 0.0 {
            return Err(Error::ZeroReference { what: "probe Rabi frequency" });
        }
        Ok(-Complex64::i() * self.amplitude(relax, fields, sat)? / g)
    }
}

/// Normalised complex probe response on an ordered detuning grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrum {
    grid: Vec<f64>,
    response: Vec<Complex64>,
    absorption: Vec<f64>,
    refraction: Vec<f64>,
}

impl ComplexSpectrum {
    pub fn new(grid: Vec<f64>, response: Vec<Complex64>) -> Result<Self> {
        check_grid(&grid)?;
        if grid.len() != response.len() {
            return Err(Error::InvalidGrid("response length differs from grid length"));
        }
        let absorption = response.iter().map(|z| z.re).collect();
        let refraction = response.iter().map(|z| z.im).collect();
        Ok(Self { grid, response, absorption, refraction })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn response(&self) -> &[Complex64] {
        &self.response
    }

    pub fn absorption(&self) -> &[f64] {
        &self.absorption
    }

    pub fn refraction(&self) -> &[f64] {
        &self.refraction
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

pub fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("grid is empty"));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidGrid("grid contains non-finite values"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("grid is not strictly increasing"));
    }
    Ok(())
}

/// Evenly spaced grid including both end points.
pub fn linear_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::InvalidGrid("need at least two grid points"));
    }
    if !(max > min) {
        return Err(Error::InvalidGrid("grid max must exceed min"));
    }
    let step = (max - min) / (points - 1) as f64;
    Ok((0..points).map(|i| if i == points - 1 { max } else { min + step * i as f64 }).collect())
}

/// Symmetric grid that is uniform with spacing `step` on `[−core, core]` and
/// grows geometrically by `growth` per point out to `±outer`.
pub fn wide_grid(core: f64, step: f64, outer: f64, growth: f64) -> Result<Vec<f64>> {
    if !(core > 0.0 && step > 0.0 && outer > core && growth > 1.0) {
        return Err(Error::InvalidGrid("wide grid needs 0 < core < outer, step > 0, growth > 1"));
    }
    let n = (core / step).ceil() as usize;
    let h = core / n as f64;
    let mut right: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    let mut x = core;
    let mut dx = h;
    while x < outer {
        dx *= growth;
        x = (x + dx).min(outer);
        right.push(x);
    }
    let mut grid: Vec<f64> = right.iter().skip(1).rev().map(|x| -x).collect();
    grid.extend(right);
    Ok(grid)
}

/// Probe spectrum with the saturated populations computed from `pops`.
pub fn spectrum(
    relax: &RelaxationSpec,
    fields: &FieldSpec,
    pops: &Populations,
    grid: &[f64],
    probe: Probe,
) -> Result<ComplexSpectrum> {
    let sat = saturated_populations(relax, fields, pops)?;
    spectrum_with(relax, fields, &sat, grid, probe)
}

/// Probe spectrum with explicitly supplied populations.
pub fn spectrum_with(
    relax: &RelaxationSpec,
    fields: &FieldSpec,
    sat: &SaturatedPopulations,
    grid: &[f64],
    probe: Probe,
) -> Result<ComplexSpectrum> {
    check_grid(grid)?;
    let mut f = *fields;
    let response = grid
        .iter()
        .map(|&omega| {
            f.detuning[probe.index()] = omega;
            probe.response(relax, &f, sat)
        })
        .collect::<Result<Vec<_>>>()?;
    ComplexSpectrum::new(grid.to_vec(), response)
}

/// Trapezoid rule over `grid` plus analytic `c/Ω²` tails fitted on the outer
/// 10% of the grid span at each end.
pub fn integrate_with_tails(grid: &[f64], values: &[f64]) -> f64 {
    let body: f64 = grid.windows(2).zip(values.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum();
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    let band = 0.1 * (hi - lo);
    let fit = |pred: &dyn Fn(f64) -> bool| {
        let (mut num, mut den) = (0.0, 0.0);
        for (&x, &y) in grid.iter().zip(values) {
            if pred(x) && x != 0.0 {
                let w = 1.0 / (x * x);
                num += y * w;
                den += w * w;
            }
        }
        if den > 0.0 {
            num / den
        } else {
            0.0
        }
    };
    let c_hi = fit(&|x| x >= hi - band);
    let c_lo = fit(&|x| x <= lo + band);
    let mut tails = 0.0;
    if hi > 0.0 {
        tails += c_hi / hi;
    }
    if lo < 0.0 {
        tails += c_lo / -lo;
    }
    body + tails
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SumRule {
    pub integral: f64,
    pub expected: f64,
    pub rel_error: f64,
}

/// Normalised integrated absorption of `spec`, compared with `expected` (the
/// population difference of the probe transition).
pub fn sum_rule(spec: &ComplexSpectrum, expected: f64, max_linewidth: f64) -> Result<SumRule> {
    let grid = spec.grid();
    let half_span = (-grid[0]).min(grid[grid.len() - 1]);
    let required = SUM_RULE_SPAN_FACTOR * max_linewidth;
    if !(half_span >= required) {
        return Err(Error::GridTooNarrow { half_span, required });
    }
    let integral = SUM_RULE_NORMALIZATION * integrate_with_tails(grid, spec.absorption());
    let rel_error = (integral - expected).abs() / expected.abs().max(1e-12);
    Ok(SumRule { integral, expected, rel_error })
}

/// Absorption at probe 4 normalised to the undriven line-centre peak, with
/// field 3 off.
pub fn normalized_alpha4(
    relax: &RelaxationSpec,
    fields: &FieldSpec,
    sat: &SaturatedPopulations,
    pops: &Populations,
    omega4: f64,
) -> Result<f64> {
    let dn4 = pops.dn[3];
    if dn4 == 0.0 {
        return Err(Error::ZeroReference { what: "Δn_4" });
    }
    let f = fields.with_detuning(3, omega4);
    let d = denominators(relax, &f);
    let c = coupling_factors(relax, &f);
    let ratio = (relax.width.lm / d.p4) * (sat.dr[3] - c.g[0] * sat.dr[0]) / (dn4 * (1.0 + c.g[3]));
    Ok(ratio.re)
}

/// Far-detuned two-term form of [`normalized_alpha4`]: the Lorentzian wing of
/// the probe line plus the Raman-type term centred at `Ω_4 = Ω_1`.
pub fn raman_asymptote(
    relax: &RelaxationSpec,
    fields: &FieldSpec,
    sat: &SaturatedPopulations,
    pops: &Populations,
    omega4: f64,
) -> f64 {
    let w = &relax.width;
    let r = &sat.r;
    let dn4 = pops.n.l - pops.n.m;
    let o2 = omega4 * omega4;
    let raman_detuning = omega4 - fields.detuning[0];
    let wing = w.lm * w.lm * (r.l - r.m) / (dn4 * o2);
    let raman = w.gm * w.lm / (w.gm * w.gm + raman_detuning * raman_detuning) * fields.rabi[0].norm_sqr() * (r.m - r.g)
        / (o2 * dn4);
    wing - raman
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Condition {
    pub holds: bool,
    pub margin: f64,
}

/// Gain-without-inversion / transparency condition at probe 4 for resonant
/// driving (`Ω_1 = Ω_4 = 0`).
pub fn awi_condition(relax: &RelaxationSpec, fields: &FieldSpec, sat: &SaturatedPopulations) -> Condition {
    let w = &relax.width;
    let r = &sat.r;
    let margin = fields.rabi[0].norm_sqr() * (r.l - r.g) / (w.lg * w.gm) - (r.l - r.m);
    Condition { holds: margin >= 0.0, margin }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    Gain,
    Transparency,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WindowClass {
    /// Gain while the probe transition is not inverted.
    #[serde(rename = "AWI")]
    Awi,
    #[serde(rename = "inverted")]
    Inverted,
    #[serde(rename = "EIT-like")]
    EitLike,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
    pub kind: WindowKind,
    pub class: WindowClass,
    /// Gain windows: largest gain `−min(absorption)`. Transparency windows:
    /// largest absorption removed relative to the undriven reference.
    pub depth: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct WindowReport {
    pub intervals: Vec<Window>,
}

impl WindowReport {
    pub fn gain_count(&self) -> usize {
        self.intervals.iter().filter(|w| w.kind == WindowKind::Gain).count()
    }

    pub fn transparency_count(&self) -> usize {
        self.intervals.iter().filter(|w| w.kind == WindowKind::Transparency).count()
    }

    /// Largest gain over all gain windows, 0 when there is none.
    pub fn deepest_gain(&self) -> f64 {
        self.intervals.iter().filter(|w| w.kind == WindowKind::Gain).map(|w| w.depth).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WindowOptions {
    /// Threshold as a fraction of the undriven peak absorption.
    pub rel_tol: f64,
}

impl Default for WindowOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-6 }
    }
}

/// Find gain and transparency windows of `spec` against the undriven
/// `reference` on the same grid. `probe_dr` is the saturated population
/// difference of the probe transition (positive means not inverted).
pub fn detect_windows(
    spec: &ComplexSpectrum,
    reference: &ComplexSpectrum,
    probe_dr: f64,
    opts: WindowOptions,
) -> Result<WindowReport> {
    if spec.grid() != reference.grid() {
        return Err(Error::InvalidGrid("reference spectrum must share the grid"));
    }
    let peak = reference.absorption().iter().fold(0.0_f64, |m, a| m.max(a.abs()));
    let tol = opts.rel_tol * peak;
    let grid = spec.grid();
    let abs = spec.absorption();
    let refa = reference.absorption();

    let classify = |j: usize| -> Option<WindowKind> {
        if abs[j] < -tol {
            Some(WindowKind::Gain)
        } else if abs[j].abs() < tol && refa[j] > 10.0 * tol {
            Some(WindowKind::Transparency)
        } else {
            None
        }
    };

    let mut intervals = Vec::new();
    let mut j = 0;
    while j < grid.len() {
        let Some(kind) = classify(j) else {
            j += 1;
            continue;
        };
        let start = j;
        while j + 1 < grid.len() && classify(j + 1) == Some(kind) {
            j += 1;
        }
        let range = start..=j;
        let (class, depth) = match kind {
            WindowKind::Gain => {
                let class = if probe_dr > 0.0 { WindowClass::Awi } else { WindowClass::Inverted };
                (class, range.clone().map(|i| -abs[i]).fold(f64::MIN, f64::max))
            }
            WindowKind::Transparency => {
                (WindowClass::EitLike, range.clone().map(|i| refa[i] - abs[i].abs()).fold(f64::MIN, f64::max))
            }
        };
        intervals.push(Window { lo: grid[start], hi: grid[j], kind, class, depth });
        j += 1;
    }
    Ok(WindowReport { intervals })
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;
    use crate::model::{unsaturated_populations, Branching, CoherenceWidths, LevelRates};

    fn bare(dn2_pump: f64) -> (RelaxationSpec, FieldSpec) {
        let relax = RelaxationSpec {
            gamma: LevelRates::new(1.0, 1.0, 1.0, 1.0),
            branch: Branching::default(),
            width: CoherenceWidths::uniform(1.0),
            pump: LevelRates::new(0.0, dn2_pump, 0.0, 0.0),
        };
        (relax, FieldSpec::resonant([0.0, 1e-3, 0.0, 1e-3]))
    }

    #[test]
    fn undriven_lorentzian_pair() {
        let (relax, fields) = bare(0.7);
        let pops = unsaturated_populations(&relax);
        let grid = linear_grid(-5.0, 5.0, 101).unwrap();
        let s = spectrum(&relax, &fields, &pops, &grid, Probe::R2).unwrap();
        for (j, &x) in grid.iter().enumerate() {
            assert_relative_eq!(s.absorption()[j], 0.7 / (1.0 + x * x), max_relative = 1e-14);
            assert_relative_eq!(s.refraction()[j], -0.7 * x / (1.0 + x * x), epsilon = 1e-15);
        }
        assert_eq!(s.absorption()[50], 0.7);
        // Kramers–Kronig parity
        for j in 0..50 {
            assert!((s.absorption()[j] - s.absorption()[100 - j]).abs() <= 1e-12);
            assert!((s.refraction()[j] + s.refraction()[100 - j]).abs() <= 1e-12);
        }
    }

    #[test]
    fn sign_convention_lock() {
        let (relax, fields) = bare(1.0);
        let pops = unsaturated_populations(&relax);
        let s = spectrum(&relax, &fields, &pops, &[0.0], Probe::R2).unwrap();
        assert!(s.absorption()[0] > 0.0);
    }

    #[test]
    fn grid_checks() {
        assert!(check_grid(&[]).is_err());
        assert!(check_grid(&[0.0, 0.0]).is_err());
        assert!(linear_grid(0.0, 1.0, 1).is_err());
        let g = wide_grid(10.0, 0.1, 1e4, 1.05).unwrap();
        check_grid(&g).unwrap();
        assert_eq!(g[0], -1e4);
        assert_eq!(*g.last().unwrap(), 1e4);
    }

    #[test]
    fn sum_rule_for_bare_line() {
        let (relax, fields) = bare(1.0);
        let mut relax = relax;
        relax.pump = LevelRates::new(1.0, 0.0, 0.0, 0.0);
        let pops = unsaturated_populations(&relax);
        assert_eq!(pops.dn[1], -1.0);
        let grid = wide_grid(20.0, 0.01, 1e4, 1.01).unwrap();
        let s = spectrum(&relax, &fields, &pops, &grid, Probe::R2).unwrap();
        let rule = sum_rule(&s, pops.dn[1], 1.0).unwrap();
        assert!(rule.rel_error < 1e-3, "{rule:?}");
        assert!(matches!(sum_rule(&s, -1.0, 100.0), Err(Error::GridTooNarrow { .. })));
    }

    #[test]
    fn empty_populations_integrate_to_zero() {
        let (mut relax, fields) = bare(0.0);
        relax.pump = LevelRates::default();
        let pops = unsaturated_populations(&relax);
        let grid = wide_grid(20.0, 0.1, 1e4, 1.05).unwrap();
        let s = spectrum(&relax, &fields, &pops, &grid, Probe::R2).unwrap();
        assert_eq!(sum_rule(&s, 0.0, 1.0).unwrap().integral, 0.0);
    }

    #[test]
    fn normalized_alpha4_reference_points() {
        let mut relax = bare(0.0).0;
        relax.pump = LevelRates::new(0.0, 0.0, 0.0, 1.0);
        relax.width.lm = 2.0;
        let fields = FieldSpec::resonant([0.0, 0.0, 0.0, 1e-3]);
        let pops = unsaturated_populations(&relax);
        let sat = saturated_populations(&relax, &fields, &pops).unwrap();
        assert_relative_eq!(normalized_alpha4(&relax, &fields, &sat, &pops, 0.0).unwrap(), 1.0);
        assert_relative_eq!(normalized_alpha4(&relax, &fields, &sat, &pops, 2.0).unwrap(), 0.5);

        let mut empty = relax;
        empty.pump = LevelRates::default();
        let pops = unsaturated_populations(&empty);
        assert!(matches!(normalized_alpha4(&empty, &fields, &sat, &pops, 0.0), Err(Error::ZeroReference { .. })));
    }

    #[test]
    fn awi_margin_examples() {
        let relax = RelaxationSpec {
            gamma: LevelRates::new(1.0, 1.0, 1.0, 1.0),
            branch: Branching::default(),
            width: CoherenceWidths { lg: 2.0, gm: 0.5, ..CoherenceWidths::uniform(1.0) },
            pump: LevelRates::default(),
        };
        // r_l = r_g
        let sat = SaturatedPopulations::from_levels(LevelRates::new(0.5, 0.0, 0.2, 0.5));
        let c = awi_condition(&relax, &FieldSpec::resonant([3.0, 0.0, 0.0, 0.0]), &sat);
        assert_relative_eq!(c.margin, -0.3);
        assert!(!c.holds);
        // boundary: r_l − r_g = 1, r_l − r_m = 1, |G_1|² = Γ_lg Γ_gm
        let sat = SaturatedPopulations::from_levels(LevelRates::new(0.0, 0.0, 0.0, 1.0));
        let c = awi_condition(&relax, &FieldSpec::resonant([1.0, 0.0, 0.0, 0.0]), &sat);
        assert_eq!(c.margin, 0.0);
        assert!(c.holds);
    }

    #[test]
    fn raman_term_vanishes_without_raman_inversion() {
        let relax = bare(0.0).0;
        let sat = SaturatedPopulations::from_levels(LevelRates::new(0.3, 0.0, 0.3, 0.9));
        let pops = Populations::from_levels(LevelRates::new(0.3, 0.0, 0.2, 1.0));
        let fields = FieldSpec::resonant([4.0, 0.0, 0.0, 1e-3]).with_detuning(0, 500.0);
        let o4 = 500.0;
        let v = raman_asymptote(&relax, &fields, &sat, &pops, o4);
        assert_relative_eq!(v, (0.9 - 0.3) / (0.8 * o4 * o4), max_relative = 1e-15);
    }

    #[test]
    fn undriven_reference_has_no_windows() {
        let (relax, fields) = bare(1.0);
        let pops = unsaturated_populations(&relax);
        let grid = linear_grid(-10.0, 10.0, 201).unwrap();
        let s = spectrum(&relax, &fields, &pops, &grid, Probe::R2).unwrap();
        let rep = detect_windows(&s, &s, pops.dn[1], WindowOptions::default()).unwrap();
        assert!(rep.intervals.is_empty());
    }

    #[test]
    fn windows_are_disjoint_runs() {
        let grid = linear_grid(0.0, 9.0, 10).unwrap();
        let reference = ComplexSpectrum::new(grid.clone(), vec![Complex64::from(1.0); 10]).unwrap();
        let vals = [0.5, -0.1, -0.3, 0.5, 0.0, 0.0, 0.5, -0.2, 0.5, 0.5];
        let s = ComplexSpectrum::new(grid, vals.iter().map(|&x| Complex64::from(x)).collect()).unwrap();
        let rep = detect_windows(&s, &reference, 1.0, WindowOptions { rel_tol: 1e-3 }).unwrap();
        assert_eq!(rep.intervals.len(), 3);
        assert_eq!((rep.intervals[0].lo, rep.intervals[0].hi), (1.0, 2.0));
        assert_eq!(rep.intervals[0].class, WindowClass::Awi);
        assert_relative_eq!(rep.intervals[0].depth, 0.3);
        assert_eq!(rep.intervals[1].kind, WindowKind::Transparency);
        assert_eq!((rep.intervals[1].lo, rep.intervals[1].hi), (4.0, 5.0));
        assert_eq!(rep.intervals[2].lo, 7.0);
        assert_eq!(rep.gain_count(), 2);
        assert_relative_eq!(rep.deepest_gain(), 0.3);
        let inverted = detect_windows(&s, &reference, -1.0, WindowOptions { rel_tol: 1e-3 }).unwrap();
        assert_eq!(inverted.intervals[0].class, WindowClass::Inverted);
    }
}
