//! Triple-resonance frequency mixing `ω_s = ω_1 + ω_2 + ω_3` dressed by two
//! strong fields.
//!
//! Level 0 is the ground state; field 1 (weak) drives 1–0, the strong fields
//! drive 2–1 (`g2`) and 3–2 (`g3`), and the generated or probe field at `ω_s`
//! closes the loop on 3–0. All detunings are normalised to the halfwidth of
//! the corresponding transition. `x` detunings belong to the probe branch,
//! `y` detunings to the branch reached through `ω_s`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MixingConfig {
    pub g2: f64,
    pub g3: f64,
    pub x1: f64,
    pub x02: f64,
    pub xs: f64,
    pub y1: f64,
    pub y02: f64,
    pub ys: f64,
    /// `ω_s` is generated rather than applied: the `y` detunings are ignored
    /// and `D_0i = P_0i`.
    pub generated_mode: bool,
    /// Local-field shifts of the one-photon resonances 1–0 and 3–0.
    pub c1: f64,
    pub cs: f64,
}

impl Default for MixingConfig {
    fn default() -> Self {
        Self {
            g2: 0.0,
            g3: 0.0,
            x1: 0.0,
            x02: 0.0,
            xs: 0.0,
            y1: 0.0,
            y02: 0.0,
            ys: 0.0,
            generated_mode: true,
            c1: 0.0,
            cs: 0.0,
        }
    }
}

impl MixingConfig {
    pub fn check(&self) -> Result<()> {
        for (name, v) in [("g2", self.g2), ("g3", self.g3)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter { name, reason: "must be finite and >= 0" });
            }
        }
        let rest = [self.x1, self.x02, self.xs, self.y1, self.y02, self.ys, self.c1, self.cs];
        if rest.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter { name: "detuning", reason: "must be finite" });
        }
        Ok(())
    }

    /// `(P_01, P_02, P_03)` and `(D_01, D_02, D_03)`.
    pub fn denominators(&self) -> ([Complex64; 3], [Complex64; 3]) {
        let p = [self.x1, self.x02, self.xs].map(|x| Complex64::new(1.0, x));
        let d = if self.generated_mode { p } else { [self.y1, self.y02, self.ys].map(|y| Complex64::new(1.0, y)) };
        (p, d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixingResult {
    pub f1: Complex64,
    pub fs: Complex64,
    pub f: Complex64,
    /// `χ_1/χ_1⁰ = f_1/P_01`.
    pub chi1_ratio: Complex64,
    /// `χ_s/χ_s⁰ = f_s/P_03`.
    pub chis_ratio: Complex64,
    /// `χ^NL/χ_0^NL = f/(P_01 P_02 D_03)`.
    pub chi_nl_ratio: Complex64,
    /// `g2 g3 |χ^NL/χ_0^NL|²`.
    pub power_figure: f64,
}

fn inv(what: &'static str, z: Complex64) -> Result<Complex64> {
    let magnitude = z.norm();
    if magnitude < TOL || !magnitude.is_finite() {
        return Err(Error::DegenerateDenominator { what, magnitude });
    }
    Ok(z.inv())
}

pub fn dressing_factors(cfg: &MixingConfig) -> Result<MixingResult> {
    cfg.check()?;
    let one = Complex64::from(1.0);
    let ([p01, p02, p03], [d01, d02, d03]) = cfg.denominators();
    let (g2, g3) = (cfg.g2, cfg.g3);

    let inner1 = one + g3 * inv("P_02 D_03", p02 * d03)?;
    let f1 = inv("f_1", one + g2 * inv("P_01 P_02 (1 + g_3/P_02 D_03)", p01 * p02 * inner1)?)?;
    let inners = one + g2 * inv("D_02 D_01", d02 * d01)?;
    let fs = inv("f_s", one + g3 * inv("P_03 D_02 (1 + g_2/D_02 D_01)", p03 * d02 * inners)?)?;
    let f = f1 * inv("f / f_1", one + g3 * inv("D_03 P_02", d03 * p02)?)?;

    let chi1_ratio = f1 / p01;
    let chis_ratio = fs / p03;
    let chi_nl_ratio = f / (p01 * p02 * d03);
    Ok(MixingResult {
        f1,
        fs,
        f,
        chi1_ratio,
        chis_ratio,
        chi_nl_ratio,
        power_figure: g2 * g3 * chi_nl_ratio.norm_sqr(),
    })
}

/// Additive form `[1 + g2/(D_02 D_01) + g3/(D_03 P_02)]^{−1}`; coincides with
/// [`MixingResult::f`] when `D_0i = P_0i`.
pub fn combined_factor(cfg: &MixingConfig) -> Result<Complex64> {
    cfg.check()?;
    let ([_, p02, _], [d01, d02, d03]) = cfg.denominators();
    let den = 1.0 + cfg.g2 * inv("D_02 D_01", d02 * d01)? + cfg.g3 * inv("D_03 P_02", d03 * p02)?;
    inv("f", den)
}

/// Red shift of the one-photon resonances by the Lorentz local field. The
/// two- and three-photon detunings are untouched.
pub fn apply_local_field(cfg: &MixingConfig) -> MixingConfig {
    MixingConfig { x1: cfg.x1 + cfg.c1, xs: cfg.xs + cfg.cs, ..*cfg }
}

/// Dimensionless Lorentz local-field shift `N |d|² / (3 ε₀ ħ Γ)` from SI
/// number density (m⁻³), dipole moment (C·m) and halfwidth (rad/s).
pub fn local_field_shift(number_density: f64, dipole_moment: f64, halfwidth: f64) -> f64 {
    const EPSILON_0: f64 = 8.854_187_812_8e-12;
    const HBAR: f64 = 1.054_571_817e-34;
    number_density * dipole_moment * dipole_moment / (3.0 * EPSILON_0 * HBAR * halfwidth)
}

/// Gain in `|χ^NL|²` from tuning one undressed branch from `x_off` onto
/// resonance.
pub fn resonance_enhancement(x_off: f64) -> Result<f64> {
    if !(x_off.is_finite() && x_off != 0.0) {
        return Err(Error::InvalidParameter { name: "x_off", reason: "must be finite and nonzero" });
    }
    let at =
        |x1: f64| dressing_factors(&MixingConfig { x1, ..MixingConfig::default() }).map(|r| r.chi_nl_ratio.norm_sqr());
    Ok(at(0.0)? / at(x_off)?)
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;

    #[test]
    fn undressed_factors_are_one() {
        let cfg = MixingConfig { x1: 3.0, x02: -2.0, xs: 0.5, generated_mode: false, y1: 1.0, ..Default::default() };
        let r = dressing_factors(&cfg).unwrap();
        let one = Complex64::from(1.0);
        assert_eq!((r.f1, r.fs, r.f), (one, one, one));
        assert_eq!(r.power_figure, 0.0);
    }

    #[test]
    fn unit_strong_field_arithmetic() {
        let r = dressing_factors(&MixingConfig { g2: 1.0, ..Default::default() }).unwrap();
        assert_eq!(r.f1, Complex64::from(0.5));
        assert_eq!(r.f, Complex64::from(0.5));
        assert_eq!(r.fs, Complex64::from(1.0));
    }

    #[test]
    fn generated_mode_ignores_y() {
        let base = MixingConfig { g2: 2.0, g3: 3.0, x1: 0.4, x02: -1.0, xs: 2.0, ..Default::default() };
        let a = dressing_factors(&MixingConfig { y1: 9.0, y02: 9.0, ys: 9.0, ..base }).unwrap();
        let b = dressing_factors(&MixingConfig { generated_mode: false, y1: 0.4, y02: -1.0, ys: 2.0, ..base }).unwrap();
        assert_eq!(a.fs, b.fs);
        assert_eq!(a.f, b.f);
        let c = combined_factor(&base).unwrap();
        assert_relative_eq!((a.f - c).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn local_field() {
        let cfg = MixingConfig { x1: -2.0, c1: 2.0, xs: 1.0, x02: 5.0, ..Default::default() };
        let s = apply_local_field(&cfg);
        assert_eq!(s.x1, 0.0);
        assert_eq!(s.xs, 1.0);
        assert_eq!(s.x02, 5.0);
        let zero = MixingConfig { c1: 0.0, cs: 0.0, ..cfg };
        assert_eq!(apply_local_field(&zero), zero);
    }

    #[test]
    fn enhancement_values() {
        assert_relative_eq!(resonance_enhancement(1.0).unwrap(), 2.0, max_relative = 1e-15);
        let e = resonance_enhancement(1e3).unwrap();
        assert!((e / 1e6 - 1.0).abs() < 2e-3);
        assert!(resonance_enhancement(0.0).is_err());
    }

    #[test]
    fn transparency_with_conversion_witness() {
        let cfg = MixingConfig { g2: 99.0, x02: 20.0, ..Default::default() };
        let r = dressing_factors(&cfg).unwrap();
        assert!(r.chi1_ratio.re <= 0.1);
        assert!(r.f.norm() >= 0.1);
    }
}
