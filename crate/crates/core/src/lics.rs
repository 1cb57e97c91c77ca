//! Laser-induced continuum structure in resonant four-wave mixing.
//!
//! A strong field couples the intermediate levels `l`, `n` to an ionization
//! continuum. Its effect enters through induced widths `γ_ij`, shifts
//! `δ_ij`, their Fano ratios `q_ij = δ_ij/γ_ij`, the degeneracy factors
//! `k_1..k_4` and the saturation ratios `g_ll`, `g_nn`, `g_mn`. These are
//! inputs; computing them from continuum matrix elements needs atomic
//! structure data.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ContinuumCoupling {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub g_ll: f64,
    pub g_nn: f64,
    pub g_mn: f64,
    pub q_nl: f64,
    pub q_ln: f64,
    pub q_gl: f64,
    pub q_ng: f64,
    pub q_gn: f64,
}

impl ContinuumCoupling {
    pub fn beta_l(&self) -> f64 {
        self.g_ll / (1.0 + self.g_ll)
    }

    pub fn beta_n(&self) -> f64 {
        self.g_nn / (1.0 + self.g_nn)
    }

    pub fn check(&self) -> Result<()> {
        for (name, k) in [("k1", self.k1), ("k2", self.k2), ("k3", self.k3), ("k4", self.k4)] {
            if !(0.0..=1.0).contains(&k) {
                return Err(Error::InvalidParameter { name, reason: "must lie in [0, 1]" });
            }
        }
        for (name, g) in [("g_ll", self.g_ll), ("g_nn", self.g_nn), ("g_mn", self.g_mn)] {
            if !(g.is_finite() && g >= 0.0) {
                return Err(Error::InvalidParameter { name, reason: "must be finite and >= 0" });
            }
        }
        let q = [self.q_nl, self.q_ln, self.q_gl, self.q_ng, self.q_gn];
        if q.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter { name: "q", reason: "must be finite" });
        }
        Ok(())
    }
}

/// Normalised detunings. `z_gm` and `z_mu` are the imaginary parts of
/// `D_gm = 1 + i z_gm` and `p_gm = 1 + i z_mu`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct LicsDetunings {
    pub x_l: f64,
    pub x_n: f64,
    pub y_l: f64,
    pub y_n: f64,
    pub z_gm: f64,
    pub z_mu: f64,
}

impl LicsDetunings {
    pub fn d_gm(&self) -> Complex64 {
        Complex64::new(1.0, self.z_gm)
    }

    pub fn p_gm(&self) -> Complex64 {
        Complex64::new(1.0, self.z_mu)
    }
}

/// Fano ratio `q = δ/γ`.
pub fn fano_q(delta: f64, gamma: f64) -> Result<f64> {
    if gamma == 0.0 {
        return Err(Error::ZeroWidth);
    }
    Ok(delta / gamma)
}

/// Induced widths entering the degeneracy factors.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct InducedWidths {
    pub gl: f64,
    pub lg: f64,
    pub ln: f64,
    pub nl: f64,
    pub gn: f64,
    pub ng: f64,
    pub gg: f64,
    pub ll: f64,
    pub nn: f64,
}

/// `[k_1, k_2, k_3, k_4]` from the induced widths.
pub fn degeneracy_factors(w: &InducedWidths) -> Result<[f64; 4]> {
    let ratio = |num: f64, den: f64| if den == 0.0 { Err(Error::ZeroWidth) } else { Ok(num / den) };
    Ok([
        ratio(w.gl * w.ln, w.gn * w.nn)?,
        ratio(w.nl * w.ln, w.ll * w.nn)?,
        ratio(w.gl * w.lg, w.gg * w.ll)?,
        ratio(w.gn * w.ng, w.gg * w.nn)?,
    ])
}

fn inv(what: &'static str, z: Complex64) -> Result<Complex64> {
    let magnitude = z.norm();
    if magnitude < TOL || !magnitude.is_finite() {
        return Err(Error::DegenerateDenominator { what, magnitude });
    }
    Ok(z.inv())
}

fn one_minus_iq(q: f64) -> Complex64 {
    Complex64::new(1.0, -q)
}

/// Continuum-modified numerator of the mixing susceptibility.
pub fn k_factor(c: &ContinuumCoupling, d: &LicsDetunings) -> Result<Complex64> {
    let num = one_minus_iq(c.q_nl) * one_minus_iq(c.q_gl);
    let den = one_minus_iq(c.q_ng) * Complex64::new(1.0, d.x_l);
    Ok(1.0 - c.k1 * c.beta_l() * num * inv("K", den)?)
}

/// Continuum-modified amplitude of the absorption correction at `ω_μ`.
pub fn a_factor(c: &ContinuumCoupling, d: &LicsDetunings) -> Result<Complex64> {
    let num = one_minus_iq(c.q_ln) * one_minus_iq(c.q_gl);
    let den = one_minus_iq(c.q_gn) * Complex64::new(1.0, d.y_l);
    Ok(1.0 - c.k1 * c.beta_l() * num * inv("A", den)?)
}

fn resonance_factor(c: &ContinuumCoupling, detuning_l: f64, detuning_n: f64, pole: Complex64) -> Result<Complex64> {
    let gnn = 1.0 + c.g_nn;
    let ql = one_minus_iq(c.q_nl);
    let body = Complex64::new(1.0, detuning_n) + c.g_mn * inv("D (1 + g_nn)", pole * gnn)?
        - c.k2 * c.beta_l() * c.beta_n() * ql * ql * inv("1 + i x_l", Complex64::new(1.0, detuning_l))?;
    Ok(gnn * body)
}

/// `X`: the probe-branch two-photon resonance denominator.
pub fn x_factor(c: &ContinuumCoupling, d: &LicsDetunings) -> Result<Complex64> {
    resonance_factor(c, d.x_l, d.x_n, d.d_gm())
}

/// `Y`: `X` with `(x_l, x_n, D_gm)` replaced by `(y_l, y_n, p_gm)`.
pub fn y_factor(c: &ContinuumCoupling, d: &LicsDetunings) -> Result<Complex64> {
    resonance_factor(c, d.y_l, d.y_n, d.p_gm())
}

/// `χ^(3)(ω_μ)/χ_0μ^(3) = K/(D_gm X)`.
pub fn chi3_ratio(c: &ContinuumCoupling, d: &LicsDetunings) -> Result<Complex64> {
    c.check()?;
    let k = k_factor(c, d)?;
    let x = x_factor(c, d)?;
    Ok(k * inv("D_gm X", d.d_gm() * x)?)
}

/// `α(ω_1)/α_01 = Re{[1 − g_mn/(D_gm X)]/D_gm}`.
pub fn alpha1_ratio(c: &ContinuumCoupling, d: &LicsDetunings) -> Result<f64> {
    c.check()?;
    let x = x_factor(c, d)?;
    let dg = d.d_gm();
    Ok(((1.0 - c.g_mn * inv("D_gm X", dg * x)?) * inv("D_gm", dg)?).re)
}

/// The Fano window term `k_3 β_l (y_l + q_gl)²/(1 + y_l²)`.
pub fn fano_window(c: &ContinuumCoupling, d: &LicsDetunings) -> f64 {
    let s = d.y_l + c.q_gl;
    c.k3 * c.beta_l() * s * s / (1.0 + d.y_l * d.y_l)
}

/// `α(ω_μ)/α_0μ`.
pub fn alpha_mu_ratio(c: &ContinuumCoupling, d: &LicsDetunings) -> Result<f64> {
    c.check()?;
    let a = a_factor(c, d)?;
    let y = y_factor(c, d)?;
    let q = one_minus_iq(c.q_gn);
    let last = c.k4 * c.g_nn * a * a * q * q * inv("Y", y)?;
    Ok(1.0 - c.k3 * c.beta_l() + fano_window(c, d) - last.re)
}
