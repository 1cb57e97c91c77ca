//! Closed-form strong-field solution for the probe amplitudes `r_2`, `r_4`.
//!
//! The strong fields (1 and 3) are treated exactly, the probes (2 and 4) to
//! first order. Populations saturate through the `α` parameters; the probe
//! coherences are dressed by the `g_k` (field 1) and `v_k` (field 3) factors,
//! which include the feedback of the four-wave-mixing sidebands.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{FieldSpec, LevelRates, Populations, RelaxationSpec};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Guard on `|R_2|`, `|R_4|` denominators.
pub const DEGENERATE_TOL: f64 = 1e-14;
/// Guard on the saturation determinant.
pub const SINGULAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Denominators {
    pub p1: Complex64,
    pub p2: Complex64,
    pub p3: Complex64,
    pub p4: Complex64,
    pub p12: Complex64,
    pub p43: Complex64,
    pub p32: Complex64,
    pub p41: Complex64,
    pub d2: Complex64,
    pub d4: Complex64,
}

pub fn denominators(relax: &RelaxationSpec, fields: &FieldSpec) -> Denominators {
    let w = &relax.width;
    let [o1, o2, o3, o4] = fields.detuning;
    let c = Complex64::new;
    Denominators {
        p1: c(w.lg, o1),
        p2: c(w.ng, o2),
        p3: c(w.nm, o3),
        p4: c(w.lm, o4),
        p12: c(w.ln, o1 - o2),
        p43: c(w.ln, o4 - o3),
        p32: c(w.gm, o3 - o2),
        p41: c(w.gm, o4 - o1),
        d2: c(w.ng, o1 + o3 - o4),
        d4: c(w.lm, o1 - o2 + o3),
    }
}

/// Dressing factors `g_1..g_8` (∝ |G_1|²) and `v_1..v_8` (∝ |G_3|²).
/// Index 0 holds `g_1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingFactors {
    pub g: [Complex64; 8],
    pub v: [Complex64; 8],
}

pub fn coupling_factors(relax: &RelaxationSpec, fields: &FieldSpec) -> CouplingFactors {
    factors_from(&denominators(relax, fields), fields)
}

fn factors_from(d: &Denominators, fields: &FieldSpec) -> CouplingFactors {
    let s1 = Complex64::from(fields.rabi[0].norm_sqr());
    let s3 = Complex64::from(fields.rabi[2].norm_sqr());
    let (p1c, p3c) = (d.p1.conj(), d.p3.conj());
    let (p12c, p32c) = (d.p12.conj(), d.p32.conj());
    let (d2c, d4c) = (d.d2.conj(), d.d4.conj());
    CouplingFactors {
        g: [
            s1 / (d.p41 * p1c),
            s1 / (p12c * d.p2),
            s1 / (p12c * p1c),
            s1 / (d.p41 * d.p4),
            s1 / (d.p43 * d2c),
            s1 / (d.p41 * d2c),
            s1 / (p32c * d4c),
            s1 / (p12c * d4c),
        ],
        v: [
            s3 / (d.p43 * p3c),
            s3 / (p32c * d.p2),
            s3 / (p32c * p3c),
            s3 / (d.p43 * d.p4),
            s3 / (d.p41 * d2c),
            s3 / (d.p43 * d2c),
            s3 / (p12c * d4c),
            s3 / (p32c * d4c),
        ],
    }
}

/// Field-saturated populations together with the parameters that produce them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturatedPopulations {
    /// `Δr_1..Δr_4`.
    pub dr: [f64; 4],
    pub r: LevelRates,
    pub alpha1: f64,
    pub alpha3: f64,
    pub alpha1_0: f64,
    pub alpha3_0: f64,
    /// Branching ratios `a_1..a_3` (field 1 side).
    pub a: [f64; 3],
    /// Branching ratios `b_1..b_3` (field 3 side).
    pub b: [f64; 3],
}

impl SaturatedPopulations {
    /// Prescribed level populations with no saturation bookkeeping. Useful
    /// when the populations come from elsewhere (another model, a
    /// measurement, a velocity class computed separately).
    pub fn from_levels(r: LevelRates) -> Self {
        Self {
            dr: crate::model::population_differences(&r),
            r,
            alpha1: 0.0,
            alpha3: 0.0,
            alpha1_0: 0.0,
            alpha3_0: 0.0,
            a: [0.0; 3],
            b: [0.0; 3],
        }
    }
}

/// Branching ratios `(a, b)` of the rate equations.
pub fn branching_ratios(relax: &RelaxationSpec) -> ([f64; 3], [f64; 3]) {
    let g = &relax.gamma;
    let br = &relax.branch;
    let sa = g.l + g.g - br.gl;
    let a1 = br.gn * g.l / (g.n * sa);
    let a3 = (g.g - br.gl) / sa;
    let a2 = g.l * (g.n - br.gn) / (g.n * sa);
    let sb = g.m + g.n - br.mn;
    let b1 = br.ml * g.n / (g.l * sb);
    let b2 = (g.m - br.mn) / sb;
    let b3 = g.n * (g.l - br.ml) / (g.l * sb);
    ([a1, a2, a3], [b1, b2, b3])
}

pub fn saturated_populations(
    relax: &RelaxationSpec,
    fields: &FieldSpec,
    pops: &Populations,
) -> Result<SaturatedPopulations> {
    let g = &relax.gamma;
    let br = &relax.branch;
    let w = &relax.width;
    let d = denominators(relax, fields);

    let alpha1_0 = 2.0 * (g.l + g.g - br.gl) / (g.l * g.g * w.lg) * fields.rabi[0].norm_sqr();
    let alpha3_0 = 2.0 * (g.m + g.n - br.mn) / (g.m * g.n * w.nm) * fields.rabi[2].norm_sqr();
    let alpha1 = alpha1_0 * w.lg * w.lg / d.p1.norm_sqr();
    let alpha3 = alpha3_0 * w.nm * w.nm / d.p3.norm_sqr();
    let (a, b) = branching_ratios(relax);
    let [a1, a2, a3] = a;
    let [b1, b2, b3] = b;

    let [dn1, dn2, dn3, dn4] = pops.dn;
    let det = (1.0 + alpha1) * (1.0 + alpha3) - a1 * alpha1 * b1 * alpha3;
    if det.abs() < SINGULAR_TOL {
        return Err(Error::SingularSaturation { det });
    }
    let dr1 = ((1.0 + alpha3) * dn1 + b1 * alpha3 * dn3) / det;
    let dr3 = ((1.0 + alpha1) * dn3 + a1 * alpha1 * dn1) / det;
    let dr2 = dn2 - b2 * alpha3 * dr3 - a2 * alpha1 * dr1;
    let dr4 = dn4 - a3 * alpha1 * dr1 - b3 * alpha3 * dr3;

    let n = &pops.n;
    let s1 = alpha1 * dr1;
    let s3 = alpha3 * dr3;
    let r = LevelRates {
        m: n.m + (1.0 - b2) * s3,
        g: n.g + (1.0 - a3) * s1,
        n: n.n - b2 * s3 + a1 * s1,
        l: n.l + b1 * s3 - a3 * s1,
    };

    Ok(SaturatedPopulations { dr: [dr1, dr2, dr3, dr4], r, alpha1, alpha3, alpha1_0, alpha3_0, a, b })
}

/// Strong-field coherences `(r_1, r_3)`.
pub fn strong_coherences(
    relax: &RelaxationSpec,
    fields: &FieldSpec,
    sat: &SaturatedPopulations,
) -> (Complex64, Complex64) {
    let d = denominators(relax, fields);
    (I * fields.rabi[0] * sat.dr[0] / d.p1, I * fields.rabi[2] * sat.dr[2] / d.p3)
}

fn check(what: &'static str, z: Complex64) -> Result<()> {
    let magnitude = z.norm();
    if magnitude < DEGENERATE_TOL || !magnitude.is_finite() {
        return Err(Error::DegenerateDenominator { what, magnitude });
    }
    Ok(())
}

/// Probe amplitude `r_2 = iG_2 R_2 / P_2`.
pub fn probe_r2(relax: &RelaxationSpec, fields: &FieldSpec, sat: &SaturatedPopulations) -> Result<Complex64> {
    let d = denominators(relax, fields);
    let CouplingFactors { g, v } = factors_from(&d, fields);
    let [dr1, dr2, dr3, _] = sat.dr;
    let one = Complex64::from(1.0);

    let num = dr2 * (one + g[6] + v[6]) - v[2] * (one + v[6] - g[7]) * dr3 - g[2] * (one + g[6] - v[7]) * dr1;
    let den = (one + g[1] + v[1]) + (g[6] + g[1] * (g[6] - v[7]) + v[6] + v[1] * (v[6] - g[7]));
    check("R_2", den)?;
    Ok(I * fields.rabi[1] * (num / den) / d.p2)
}

/// Probe amplitude `r_4 = iG_4 R_4 / P_4`.
pub fn probe_r4(relax: &RelaxationSpec, fields: &FieldSpec, sat: &SaturatedPopulations) -> Result<Complex64> {
    let d = denominators(relax, fields);
    let CouplingFactors { g, v } = factors_from(&d, fields);
    let [dr1, _, dr3, dr4] = sat.dr;
    let one = Complex64::from(1.0);

    let num = dr4 * (one + v[4] + g[4]) - g[0] * (one + g[4] - v[5]) * dr1 - v[0] * (one + v[4] - g[5]) * dr3;
    let den = (one + g[3] + v[3]) + (v[4] + v[3] * (v[4] - g[5]) + g[4] + g[3] * (g[4] - v[5]));
    check("R_4", den)?;
    Ok(I * fields.rabi[3] * (num / den) / d.p4)
}

/// Three-level (Λ/V) form of `r_2`, valid when `G_3 = 0`.
pub fn reduced_r2(relax: &RelaxationSpec, fields: &FieldSpec, sat: &SaturatedPopulations) -> Result<Complex64> {
    let d = denominators(relax, fields);
    let s1 = fields.rabi[0].norm_sqr();
    let g2 = s1 / (d.p12.conj() * d.p2);
    let g3 = s1 / (d.p12.conj() * d.p1.conj());
    let den = 1.0 + g2;
    check("1 + g_2", den)?;
    Ok(I * fields.rabi[1] / d.p2 * (sat.dr[1] - g3 * sat.dr[0]) / den)
}

/// Three-level (Λ/V) form of `r_4`, valid when `G_3 = 0`.
pub fn reduced_r4(relax: &RelaxationSpec, fields: &FieldSpec, sat: &SaturatedPopulations) -> Result<Complex64> {
    let d = denominators(relax, fields);
    let s1 = fields.rabi[0].norm_sqr();
    let g1 = s1 / (d.p41 * d.p1.conj());
    let g4 = s1 / (d.p41 * d.p4);
    let den = 1.0 + g4;
    check("1 + g_4", den)?;
    Ok(I * fields.rabi[3] / d.p4 * (sat.dr[3] - g1 * sat.dr[0]) / den)
}

/// Map the double-loop field set onto the cascade ordering: the strong-field
/// detunings `Ω_1`, `Ω_3` change sign, probes are untouched. Involutive.
pub fn cascade_transform(fields: &FieldSpec) -> FieldSpec {
    let mut out = *fields;
    out.detuning[0] = -out.detuning[0];
    out.detuning[2] = -out.detuning[2];
    out
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;
    use crate::model::{unsaturated_populations, Branching, CoherenceWidths};

    fn unit_relax() -> RelaxationSpec {
        RelaxationSpec {
            gamma: LevelRates::new(1.0, 1.0, 1.0, 1.0),
            branch: Branching::default(),
            width: CoherenceWidths::uniform(1.0),
            pump: LevelRates::new(0.0, 1.0, 0.0, 0.5),
        }
    }

    #[test]
    fn resonant_denominators_are_real_halfwidths() {
        let mut r = unit_relax();
        r.width = CoherenceWidths { lg: 1.0, ng: 2.0, nm: 3.0, lm: 4.0, ln: 5.0, gm: 6.0 };
        let d = denominators(&r, &FieldSpec::resonant([1.0; 4]));
        assert_eq!(d.p1, Complex64::new(1.0, 0.0));
        assert_eq!(d.p12, Complex64::new(5.0, 0.0));
        assert_eq!(d.p41, Complex64::new(6.0, 0.0));
        assert_eq!(d.d2, Complex64::new(2.0, 0.0));
        assert_eq!(d.d4, Complex64::new(4.0, 0.0));
    }

    #[test]
    fn two_photon_resonance_makes_p12_real() {
        let f = FieldSpec::resonant([1.0; 4]).with_detuning(0, 3.7).with_detuning(1, 3.7);
        assert_eq!(denominators(&unit_relax(), &f).p12.im, 0.0);
    }

    #[test]
    fn denominators_at_staggered_detunings() {
        let mut f = FieldSpec::resonant([1.0; 4]);
        f.detuning = [1.0, 2.0, 3.0, 4.0];
        let d = denominators(&unit_relax(), &f);
        assert_eq!(d.p12, Complex64::new(1.0, -1.0));
        assert_eq!(d.d4, Complex64::new(1.0, 2.0));
        assert_eq!(d.d2, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn null_fields_null_factors() {
        let f = FieldSpec::resonant([0.0, 1.0, 2.0, 1.0]);
        let c = coupling_factors(&unit_relax(), &f);
        assert!(c.g.iter().all(|z| *z == Complex64::from(0.0)));
        assert!(c.v.iter().any(|z| z.norm() > 0.0));
        let f = FieldSpec::resonant([2.0, 1.0, 0.0, 1.0]);
        let c = coupling_factors(&unit_relax(), &f);
        assert!(c.v.iter().all(|z| *z == Complex64::from(0.0)));
    }

    #[test]
    fn unit_parameters_give_unit_g1() {
        let c = coupling_factors(&unit_relax(), &FieldSpec::resonant([1.0, 0.0, 0.0, 0.0]));
        assert_eq!(c.g[0], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn factors_scale_with_intensity() {
        let mut f = FieldSpec::resonant([0.7, 1.0, 0.3, 1.0]);
        f.detuning = [0.3, -1.2, 2.0, 0.5];
        let a = coupling_factors(&unit_relax(), &f);
        f.rabi[0] *= 2.0;
        let b = coupling_factors(&unit_relax(), &f);
        for k in 0..8 {
            assert_relative_eq!(b.g[k].re, 4.0 * a.g[k].re, max_relative = 1e-15);
            assert_relative_eq!(b.g[k].im, 4.0 * a.g[k].im, max_relative = 1e-15);
            assert_eq!(a.v[k], b.v[k]);
        }
    }

    #[test]
    fn zero_field_saturation_is_identity() {
        let r = unit_relax();
        let pops = unsaturated_populations(&r);
        let sat = saturated_populations(&r, &FieldSpec::resonant([0.0, 1.0, 0.0, 1.0]), &pops).unwrap();
        assert_eq!(sat.dr, pops.dn);
        assert_eq!(sat.r, pops.n);
    }

    #[test]
    fn decoupled_two_level_saturation() {
        // γ_gn = 0 makes a_1 = 0; G_3 = 0 makes α_3 = 0
        let r = unit_relax();
        let pops = unsaturated_populations(&r);
        let f = FieldSpec::resonant([1.3, 0.0, 0.0, 0.0]).with_detuning(0, 0.4);
        let sat = saturated_populations(&r, &f, &pops).unwrap();
        assert_eq!(sat.alpha3, 0.0);
        assert_relative_eq!(sat.dr[0], pops.dn[0] / (1.0 + sat.alpha1), max_relative = 1e-15);
        assert!(sat.alpha1 <= sat.alpha1_0);
    }

    #[test]
    fn bare_probe_is_lorentzian() {
        let r = unit_relax();
        let pops = unsaturated_populations(&r);
        let f = FieldSpec::resonant([0.0, 0.01, 0.0, 0.02]).with_detuning(1, 0.7).with_detuning(3, -0.3);
        let sat = saturated_populations(&r, &f, &pops).unwrap();
        let d = denominators(&r, &f);
        let r2 = probe_r2(&r, &f, &sat).unwrap();
        let want = I * f.rabi[1] * pops.dn[1] / d.p2;
        assert_relative_eq!((r2 - want).norm(), 0.0, epsilon = 1e-18);
        let r4 = probe_r4(&r, &f, &sat).unwrap();
        let want = I * f.rabi[3] * pops.dn[3] / d.p4;
        assert_relative_eq!((r4 - want).norm(), 0.0, epsilon = 1e-18);
    }

    #[test]
    fn full_form_reduces_without_second_drive() {
        let r = unit_relax();
        let pops = unsaturated_populations(&r);
        let mut f = FieldSpec::resonant([2.5, 1e-3, 0.0, 1e-3]);
        f.detuning = [0.8, -0.4, 1.1, 2.0];
        let sat = saturated_populations(&r, &f, &pops).unwrap();
        let a = probe_r2(&r, &f, &sat).unwrap();
        let b = reduced_r2(&r, &f, &sat).unwrap();
        assert_relative_eq!((a - b).norm() / b.norm(), 0.0, epsilon = 1e-14);
        let a = probe_r4(&r, &f, &sat).unwrap();
        let b = reduced_r4(&r, &f, &sat).unwrap();
        assert_relative_eq!((a - b).norm() / b.norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn cascade_map_is_an_involution() {
        let mut f = FieldSpec::resonant([1.0; 4]);
        assert_eq!(cascade_transform(&f), f);
        f.detuning = [0.5, -1.5, 2.5, 3.5];
        assert_eq!(cascade_transform(&cascade_transform(&f)), f);
        assert_eq!(cascade_transform(&f).detuning, [-0.5, -1.5, -2.5, 3.5]);
    }

    #[test]
    fn branching_ratios_sum_to_one() {
        let mut r = unit_relax();
        r.gamma = LevelRates::new(2.0, 3.0, 4.0, 5.0);
        r.branch = Branching { gn: 0.5, gl: 1.0, mn: 1.5, ml: 2.0 };
        let (a, b) = branching_ratios(&r);
        assert_relative_eq!(a.iter().sum::<f64>(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(b.iter().sum::<f64>(), 1.0, max_relative = 1e-15);
        assert!(a.iter().chain(b.iter()).all(|x| (0.0..=1.0).contains(x)));
    }
}
