//! Interference produced by relaxation alone.
//!
//! Two pieces: the absorption lineshape of a doublet of transitions
//! `m → n` and `m1 → n1` coupled by a spontaneous cascade (`m1 → m`,
//! `n1 → n`), whose interference term can make the medium amplify without
//! population inversion; and the driving coherence of a four-wave-mixing
//! process whose `Ω = 0` resonance appears only when collisions break the
//! balance of spontaneous relaxation rates.
//!
//! Absorption values are reported without the `λ²/4π` prefactor; see
//! [`absorption_prefactor`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A nonnegative half-integer stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(u32);

impl HalfInt {
    pub fn from_doubled(twice: u32) -> Self {
        Self(twice)
    }

    pub fn new(value: f64) -> Result<Self> {
        let twice = 2.0 * value;
        if !value.is_finite() || value < 0.0 || (twice - twice.round()).abs() > 1e-9 || twice > 1e6 {
            return Err(Error::NonHalfInteger { value });
        }
        Ok(Self(twice.round() as u32))
    }

    pub fn doubled(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

const MAX_FACTORIAL: usize = 170;

fn factorial(n: i64) -> f64 {
    use std::sync::OnceLock;
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let t = TABLE.get_or_init(|| {
        let mut t = vec![1.0; MAX_FACTORIAL + 1];
        for i in 1..=MAX_FACTORIAL {
            t[i] = t[i - 1] * i as f64;
        }
        t
    });
    t[n as usize]
}

/// Triangle condition on doubled momenta, including integer perimeter.
pub fn triangle(a: u32, b: u32, c: u32) -> bool {
    let (a, b, c) = (a as i64, b as i64, c as i64);
    (a + b + c) % 2 == 0 && c <= a + b && c >= (a - b).abs()
}

fn delta(a: i64, b: i64, c: i64) -> f64 {
    // doubled arguments; all sums below are even by the triangle check
    (factorial((a + b - c) / 2) * factorial((a - b + c) / 2) * factorial((-a + b + c) / 2)
        / factorial((a + b + c) / 2 + 1))
    .sqrt()
}

/// Wigner 6j symbol `{j1 j2 j3; j4 j5 j6}` on doubled momenta.
pub fn wigner6j_doubled(j: [u32; 6]) -> Result<f64> {
    let [j1, j2, j3, j4, j5, j6] = j;
    if !(triangle(j1, j2, j3) && triangle(j1, j5, j6) && triangle(j4, j2, j6) && triangle(j4, j5, j3)) {
        return Ok(0.0);
    }
    let [j1, j2, j3, j4, j5, j6] = j.map(|x| x as i64);
    let a = [j1 + j2 + j3, j1 + j5 + j6, j4 + j2 + j6, j4 + j5 + j3].map(|x| x / 2);
    let b = [j1 + j2 + j4 + j5, j2 + j3 + j5 + j6, j3 + j1 + j6 + j4].map(|x| x / 2);
    let t_min = *a.iter().max().unwrap();
    let t_max = *b.iter().min().unwrap();
    if t_max + 1 > MAX_FACTORIAL as i64 {
        return Err(Error::InvalidParameter { name: "angular momentum", reason: "too large for exact factorials" });
    }
    let mut sum = 0.0;
    for t in t_min..=t_max {
        let den: f64 =
            a.iter().map(|&x| factorial(t - x)).product::<f64>() * b.iter().map(|&x| factorial(x - t)).product::<f64>();
        let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * factorial(t + 1) / den;
    }
    Ok(sum * delta(j1, j2, j3) * delta(j1, j5, j6) * delta(j4, j2, j6) * delta(j4, j5, j3))
}

/// Wigner 6j symbol `{j1 j2 j3; j4 j5 j6}`.
pub fn wigner6j(j1: f64, j2: f64, j3: f64, j4: f64, j5: f64, j6: f64) -> Result<f64> {
    let mut d = [0; 6];
    for (slot, v) in d.iter_mut().zip([j1, j2, j3, j4, j5, j6]) {
        *slot = HalfInt::new(v)?.doubled();
    }
    wigner6j_doubled(d)
}

/// Doublet of interfering transitions `m → n` and `m1 → n1` with cascade
/// channels `m1 → m` and `n1 → n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CascadeDoublet {
    pub a_mn: f64,
    pub a_m1n1: f64,
    pub a_m1m: f64,
    pub a_n1n: f64,
    pub j_m: f64,
    pub j_n: f64,
    pub j_m1: f64,
    pub j_n1: f64,
    /// Halfwidth of `m → n`.
    pub gamma: f64,
    /// Halfwidth of `m1 → n1`.
    pub gamma1: f64,
    /// Splitting `ω_m1n1 − ω_mn`.
    pub delta: f64,
    pub rho_m: f64,
    pub rho_n: f64,
    pub rho_m1: f64,
    pub rho_n1: f64,
    #[serde(default)]
    pub lambda: f64,
}

impl CascadeDoublet {
    pub fn check(&self) -> Result<()> {
        for (name, a) in [("A_mn", self.a_mn), ("A_m1n1", self.a_m1n1), ("A_m1m", self.a_m1m), ("A_n1n", self.a_n1n)] {
            if !(a.is_finite() && a >= 0.0) {
                return Err(Error::InvalidParameter { name, reason: "must be finite and >= 0" });
            }
        }
        for (name, g) in [("Γ", self.gamma), ("Γ_1", self.gamma1)] {
            if !(g.is_finite() && g > 0.0) {
                return Err(Error::InvalidParameter { name, reason: "must be finite and > 0" });
            }
        }
        let [m, n, m1, n1] = self.momenta()?;
        for (a, b) in [(m, n), (m1, n1), (m1, m), (n1, n)] {
            if !dipole_allowed(a, b) {
                return Err(Error::InvalidParameter { name: "J", reason: "every transition must be dipole allowed" });
            }
        }
        Ok(())
    }

    /// `[J_m, J_n, J_m1, J_n1]` as exact half-integers.
    pub fn momenta(&self) -> Result<[HalfInt; 4]> {
        Ok([HalfInt::new(self.j_m)?, HalfInt::new(self.j_n)?, HalfInt::new(self.j_m1)?, HalfInt::new(self.j_n1)?])
    }

    /// `(2J_m + 1)(ρ_n − ρ_m)`.
    pub fn n_nm(&self) -> f64 {
        (2.0 * self.j_m + 1.0) * (self.rho_n - self.rho_m)
    }

    /// `(2J_m1 + 1)(ρ_n1 − ρ_m1)`.
    pub fn n_n1m1(&self) -> f64 {
        (2.0 * self.j_m1 + 1.0) * (self.rho_n1 - self.rho_m1)
    }
}

/// `|J_a − J_b| ≤ 1 ≤ J_a + J_b` with integer difference.
pub fn dipole_allowed(a: HalfInt, b: HalfInt) -> bool {
    let (a, b) = (a.doubled() as i64, b.doubled() as i64);
    (a - b) % 2 == 0 && (a - b).abs() <= 2 && a + b >= 2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interference {
    pub k: f64,
    pub c: f64,
}

/// Angular factor `K` and rate factor `C` of the interference term.
pub fn interference_coefficients(d: &CascadeDoublet) -> Result<Interference> {
    if !(d.a_m1n1 > 0.0) {
        return Err(Error::ZeroReferenceA { value: d.a_m1n1 });
    }
    let c = (d.a_m1m * d.a_n1n * d.a_mn / d.a_m1n1).sqrt();
    let [m, n, m1, n1] = d.momenta()?;
    Ok(Interference { k: angular_factor(m, n, m1, n1)?, c })
}

/// `K = (−1)^{J_m + J_n1} √(2J_m+1) √(2J_n1+1) {J_m J_n 1; J_n1 J_m1 1}`.
pub fn angular_factor(m: HalfInt, n: HalfInt, m1: HalfInt, n1: HalfInt) -> Result<f64> {
    let parity = (m.doubled() + n1.doubled()) / 2;
    let sign = if parity % 2 == 0 { 1.0 } else { -1.0 };
    let sixj = wigner6j_doubled([m.doubled(), n.doubled(), 2, n1.doubled(), m1.doubled(), 2])?;
    Ok(sign * ((m.doubled() + 1) as f64).sqrt() * ((n1.doubled() + 1) as f64).sqrt() * sixj)
}

/// Interference profile `Re{ΓΓ_1/((Γ − iΩ)(Γ_1 − i(Ω − Δ)))}`; integrates to zero.
pub fn f_interference(omega: f64, gamma: f64, gamma1: f64, delta: f64) -> f64 {
    let s = omega - delta;
    gamma * gamma1 * (gamma * gamma1 - omega * s) / ((gamma * gamma + omega * omega) * (gamma1 * gamma1 + s * s))
}

/// `λ²/4π`.
pub fn absorption_prefactor(lambda: f64) -> f64 {
    lambda * lambda / (4.0 * std::f64::consts::PI)
}

/// Absorption index of the doublet in units of `λ²/4π`.
pub fn cascade_alpha(d: &CascadeDoublet, omega: f64) -> Result<f64> {
    d.check()?;
    let Interference { k, c } = interference_coefficients(d)?;
    let (g, g1) = (d.gamma, d.gamma1);
    let s = omega - d.delta;
    let first = d.n_nm() * d.a_mn * g / (g * g + omega * omega);
    let second =
        d.n_n1m1() * d.a_m1n1 * (g1 / (g1 * g1 + s * s) + k * c / (g * g1) * f_interference(omega, g, g1, d.delta));
    Ok(first + second)
}

/// Far-wing (`|Ω| ≫ Δ`) form of [`cascade_alpha`].
pub fn cascade_alpha_wing(d: &CascadeDoublet, omega: f64) -> Result<f64> {
    d.check()?;
    let Interference { k, c } = interference_coefficients(d)?;
    Ok((d.n_nm() * d.a_mn * d.gamma + d.n_n1m1() * d.a_m1n1 * (d.gamma1 - k * c)) / (omega * omega))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Margin {
    pub holds: bool,
    /// Left minus right side of the inequality.
    pub margin: f64,
    /// Right side, for judging the relative size of the margin.
    pub rhs: f64,
}

/// Gain in the far wings: `K > 0` and `(KC/Γ_1 − 1) N_1 A_1 Γ_1 > N A Γ`.
pub fn awi_wing_condition(d: &CascadeDoublet) -> Result<Margin> {
    d.check()?;
    let Interference { k, c } = interference_coefficients(d)?;
    let rhs = d.n_nm() * d.a_mn * d.gamma;
    let margin = (k * c / d.gamma1 - 1.0) * d.n_n1m1() * d.a_m1n1 * d.gamma1 - rhs;
    Ok(Margin { holds: k > 0.0 && margin > 0.0, margin, rhs })
}

/// Gain at line centre for a degenerate doublet: `K ≤ 0`, `Δ = 0` and
/// `(|K|C/Γ − 1) N_1 A_1 Γ > N A Γ_1`.
pub fn awi_center_condition(d: &CascadeDoublet) -> Result<Margin> {
    d.check()?;
    let Interference { k, c } = interference_coefficients(d)?;
    let rhs = d.n_nm() * d.a_mn * d.gamma1;
    let margin = (k.abs() * c / d.gamma - 1.0) * d.n_n1m1() * d.a_m1n1 * d.gamma - rhs;
    Ok(Margin { holds: k <= 0.0 && d.delta == 0.0 && margin > 0.0, margin, rhs })
}

/// Relaxation rates and detunings of the collision-sensitive mixing scheme:
/// ground level `g`, excited levels `n`, `n'`, fields detuned by `Ω_1` from
/// `n–g` and `Ω_2` from `n'–g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FwmRates {
    pub gamma_ng: f64,
    pub gamma_n1g: f64,
    pub gamma_nn1: f64,
    pub omega1: f64,
    pub omega2: f64,
}

impl FwmRates {
    /// Dephasing-free halfwidths from level decay rates.
    pub fn spontaneous(gamma_g: f64, gamma_n: f64, gamma_n1: f64, omega1: f64, omega2: f64) -> Self {
        Self {
            gamma_ng: 0.5 * (gamma_n + gamma_g),
            gamma_n1g: 0.5 * (gamma_n1 + gamma_g),
            gamma_nn1: 0.5 * (gamma_n + gamma_n1),
            omega1,
            omega2,
        }
    }

    /// Raman detuning `Ω = Ω_2 − Ω_1` of the `n–n'` coherence.
    pub fn omega(&self) -> f64 {
        self.omega2 - self.omega1
    }

    pub fn check(&self) -> Result<()> {
        for (name, g) in [("Γ_ng", self.gamma_ng), ("Γ_n'g", self.gamma_n1g), ("Γ_nn'", self.gamma_nn1)] {
            if !(g.is_finite() && g > 0.0) {
                return Err(Error::InvalidParameter { name, reason: "must be finite and > 0" });
            }
        }
        Ok(())
    }
}

/// `Γ_nn' − Γ_n'g − Γ_ng`: zero for purely spontaneous relaxation into a
/// stable ground level.
pub fn collision_resonance_amplitude(r: &FwmRates) -> f64 {
    r.gamma_nn1 - r.gamma_n1g - r.gamma_ng
}

/// `1 − i(Γ_nn' − Γ_n'g − Γ_ng)/(Ω + iΓ_nn')`.
pub fn fwm_bracket(r: &FwmRates) -> Complex64 {
    let i = Complex64::i();
    1.0 - i * collision_resonance_amplitude(r) / Complex64::new(r.omega(), r.gamma_nn1)
}

/// Driving coherence of the `n–n'` transition up to a constant factor.
pub fn fwm_coherence(r: &FwmRates) -> Result<Complex64> {
    r.check()?;
    let a = Complex64::new(r.omega2, r.gamma_n1g);
    let b = Complex64::new(r.omega1, -r.gamma_ng);
    Ok(fwm_bracket(r) / (a * b))
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;

    #[test]
    fn sixj_special_values() {
        assert_eq!(wigner6j(0.0, 0.0, 0.0, 0.0, 0.0, 0.0).unwrap(), 1.0);
        assert_eq!(wigner6j(2.0, 1.0, 1.0, 0.0, 1.0, 2.0).unwrap(), 0.0);
        assert_relative_eq!(wigner6j(1.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap(), 1.0 / 6.0, max_relative = 1e-14);
        assert_relative_eq!(wigner6j(0.5, 0.5, 1.0, 0.5, 0.5, 0.0).unwrap(), 0.5, max_relative = 1e-14);
        assert!(matches!(wigner6j(0.3, 0.0, 0.0, 0.0, 0.0, 0.0), Err(Error::NonHalfInteger { .. })));
        assert!(wigner6j(-1.0, 0.0, 0.0, 0.0, 0.0, 0.0).is_err());
    }

    fn doublet() -> CascadeDoublet {
        CascadeDoublet {
            a_mn: 1.0,
            a_m1n1: 1.0,
            a_m1m: 1.0,
            a_n1n: 1.0,
            j_m: 1.0,
            j_n: 0.0,
            j_m1: 0.0,
            j_n1: 1.0,
            gamma: 1.0,
            gamma1: 1.0,
            delta: 0.0,
            rho_m: 0.0,
            rho_n: 1.0,
            rho_m1: 0.0,
            rho_n1: 1.0,
            lambda: 0.0,
        }
    }

    #[test]
    fn coefficients() {
        let mut d = doublet();
        for a in [&mut d.a_mn, &mut d.a_m1n1, &mut d.a_m1m, &mut d.a_n1n] {
            *a = 4.0;
        }
        let ic = interference_coefficients(&d).unwrap();
        assert_eq!(ic.c, 4.0);
        // {1 0 1; 1 0 1} = 1/3, sign (−1)^2, √3√3
        assert_relative_eq!(ic.k, 1.0, max_relative = 1e-14);
        d.a_m1n1 = 0.0;
        assert!(matches!(interference_coefficients(&d), Err(Error::ZeroReferenceA { .. })));
    }

    #[test]
    fn interference_profile() {
        assert_relative_eq!(f_interference(0.0, 1.3, 0.7, 0.0), 1.0, max_relative = 1e-15);
        let (g, g1) = (1.3, 0.7);
        let w = 1e4;
        assert_relative_eq!(f_interference(w, g, g1, 0.2), -g * g1 / (w * w), max_relative = 1e-4);
    }

    #[test]
    fn no_interference_means_two_lorentzians() {
        let mut d = doublet();
        d.a_m1m = 0.0;
        d.delta = 0.5;
        let om = 0.3;
        let want = d.n_nm() * d.a_mn * d.gamma / (d.gamma.powi(2) + om * om)
            + d.n_n1m1() * d.a_m1n1 * d.gamma1 / (d.gamma1.powi(2) + (om - d.delta).powi(2));
        assert_relative_eq!(cascade_alpha(&d, om).unwrap(), want, max_relative = 1e-15);
    }

    #[test]
    fn margins() {
        let mut d = doublet();
        d.rho_n1 = 0.0;
        let w = awi_wing_condition(&d).unwrap();
        assert!(!w.holds);
        assert_eq!(w.margin, -w.rhs);
        // equality: K = 1, C = 2, Γ_1 = 1 gives (2 − 1) N_1 A_1 = N A Γ
        let mut d = doublet();
        d.a_m1m = 4.0;
        assert_eq!(d.n_nm(), 3.0);
        assert_eq!(d.n_n1m1(), 1.0);
        d.rho_n = 1.0 / 3.0;
        let w = awi_wing_condition(&d).unwrap();
        assert_relative_eq!(w.margin, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn transitions_must_be_allowed() {
        let mut d = doublet();
        d.j_n = 3.0;
        assert!(cascade_alpha(&d, 0.0).is_err());
        assert!(!dipole_allowed(HalfInt::new(0.0).unwrap(), HalfInt::new(0.0).unwrap()));
        assert!(!dipole_allowed(HalfInt::new(0.5).unwrap(), HalfInt::new(1.0).unwrap()));
        assert!(dipole_allowed(HalfInt::new(0.5).unwrap(), HalfInt::new(0.5).unwrap()));
    }

    #[test]
    fn spontaneous_balance_removes_the_resonance() {
        for om in [-10.0, -0.5, 0.0, 0.3, 7.0] {
            let r = FwmRates::spontaneous(0.0, 1.0, 2.5, 0.2, 0.2 + om);
            assert_eq!(collision_resonance_amplitude(&r), 0.0);
            assert_eq!(fwm_bracket(&r), Complex64::from(1.0));
        }
        let r = FwmRates::spontaneous(0.4, 1.0, 2.5, 0.0, 0.0);
        assert_relative_eq!(collision_resonance_amplitude(&r), -0.4, max_relative = 1e-15);
    }

    #[test]
    fn dephasing_opens_the_resonance() {
        let mut r = FwmRates::spontaneous(0.0, 1.0, 1.0, 0.0, 0.0);
        let eps = 0.05;
        r.gamma_nn1 += eps;
        assert_relative_eq!(collision_resonance_amplitude(&r), eps, max_relative = 1e-13);
        let dev = (fwm_bracket(&r) - 1.0).norm();
        assert_relative_eq!(dev, eps / r.gamma_nn1, max_relative = 1e-13);
        r.omega2 = 1e9;
        assert!((fwm_bracket(&r) - 1.0).norm() < 1e-9);
    }

    #[test]
    fn bracket_matches_difference_of_poles() {
        let r = FwmRates { gamma_ng: 0.7, gamma_n1g: 1.1, gamma_nn1: 0.4, omega1: 0.3, omega2: -1.2 };
        let i = Complex64::i();
        let a = r.omega2 + i * r.gamma_n1g;
        let b = r.omega1 - i * r.gamma_ng;
        let diff = (1.0 / a - 1.0 / b) / (r.omega() + i * r.gamma_nn1);
        let prod = fwm_coherence(&r).unwrap();
        assert_relative_eq!((diff + prod).norm(), 0.0, epsilon = 1e-14);
    }
}
