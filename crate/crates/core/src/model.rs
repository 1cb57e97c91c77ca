//! Parameters of the four-level double-loop scheme and zero-field populations.
//!
//! Levels are labelled `g`, `n`, `m`, `l`. The two strong fields drive the
//! `l–g` (field 1) and `n–m` (field 3) transitions, the two probes sit on
//! `n–g` (field 2) and `l–m` (field 4). All quantities are dimensionless:
//! rates, detunings and Rabi frequencies are in units of one reference rate.
//!
//! Symbol table (sign conventions):
//!
//! | symbol | meaning |
//! |--------|---------|
//! | `Δn_1 = n_l − n_g` | strong transition 1 |
//! | `Δn_2 = n_n − n_g` | probe transition 2; absorption > 0 iff `Δr_2 > 0` |
//! | `Δn_3 = n_n − n_m` | strong transition 3 |
//! | `Δn_4 = n_l − n_m` | probe transition 4; absorption > 0 iff `Δr_4 > 0` |
//!
//! With these conventions `n` is the lower level of probe 2 and `l` the lower
//! level of probe 4: pumping only `n` makes probe 2 absorbing.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation, Violations};

/// One real number per level.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LevelRates {
    pub g: f64,
    pub n: f64,
    pub m: f64,
    pub l: f64,
}

impl LevelRates {
    pub const fn new(g: f64, n: f64, m: f64, l: f64) -> Self {
        Self { g, n, m, l }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::new(self.g * c, self.n * c, self.m * c, self.l * c)
    }

    fn named(&self) -> [(&'static str, f64); 4] {
        [("g", self.g), ("n", self.n), ("m", self.m), ("l", self.l)]
    }
}

/// Partial relaxation rates between levels of the scheme. Only the channels
/// that feed the rate equations exist: `g → n`, `g → l`, `m → n`, `m → l`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Branching {
    pub gn: f64,
    pub gl: f64,
    pub mn: f64,
    pub ml: f64,
}

/// Homogeneous halfwidths `Γ_ij` of every coherence in the scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceWidths {
    pub lg: f64,
    pub ng: f64,
    pub nm: f64,
    pub lm: f64,
    pub ln: f64,
    pub gm: f64,
}

impl CoherenceWidths {
    pub const fn uniform(w: f64) -> Self {
        Self { lg: w, ng: w, nm: w, lm: w, ln: w, gm: w }
    }

    fn named(&self) -> [(&'static str, f64, char, char); 6] {
        [
            ("lg", self.lg, 'l', 'g'),
            ("ng", self.ng, 'n', 'g'),
            ("nm", self.nm, 'n', 'm'),
            ("lm", self.lm, 'l', 'm'),
            ("ln", self.ln, 'l', 'n'),
            ("gm", self.gm, 'g', 'm'),
        ]
    }

    pub fn max(&self) -> f64 {
        self.named().iter().map(|x| x.1).fold(f64::MIN, f64::max)
    }
}

/// Decay, branching, coherence widths and incoherent pumps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelaxationSpec {
    /// Total decay rate `Γ_i` of each level.
    pub gamma: LevelRates,
    #[serde(default)]
    pub branch: Branching,
    pub width: CoherenceWidths,
    /// Incoherent pump rate `q_i` into each level.
    #[serde(default)]
    pub pump: LevelRates,
}

impl RelaxationSpec {
    /// Closed, dephasing-free widths `Γ_ij = (Γ_i + Γ_j)/2` for the given level rates.
    pub fn natural_widths(gamma: LevelRates) -> CoherenceWidths {
        let h = |a: f64, b: f64| 0.5 * (a + b);
        CoherenceWidths {
            lg: h(gamma.l, gamma.g),
            ng: h(gamma.n, gamma.g),
            nm: h(gamma.n, gamma.m),
            lm: h(gamma.l, gamma.m),
            ln: h(gamma.l, gamma.n),
            gm: h(gamma.g, gamma.m),
        }
    }

    fn level(&self, c: char) -> f64 {
        match c {
            'g' => self.gamma.g,
            'n' => self.gamma.n,
            'm' => self.gamma.m,
            _ => self.gamma.l,
        }
    }
}

/// Field parameters: detunings `Ω_1..Ω_4`, complex Rabi frequencies
/// `G_1..G_4`, and signed wave-vector projections `k_1..k_4` (so that `k_i v`
/// is a rate for velocity `v`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub detuning: [f64; 4],
    pub rabi: [Complex64; 4],
    #[serde(default = "unit_k")]
    pub k: [f64; 4],
}

fn unit_k() -> [f64; 4] {
    [1.0; 4]
}

impl FieldSpec {
    /// Resonant fields with real Rabi frequencies.
    pub fn resonant(rabi: [f64; 4]) -> Self {
        Self { detuning: [0.0; 4], rabi: rabi.map(|x| Complex64::new(x, 0.0)), k: unit_k() }
    }

    pub fn with_detuning(mut self, index: usize, value: f64) -> Self {
        self.detuning[index] = value;
        self
    }

    pub fn with_rabi(mut self, index: usize, value: Complex64) -> Self {
        self.rabi[index] = value;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SchemeTopology {
    /// Λ and V three-level subsystems embedded in the four-level loop.
    #[default]
    #[serde(rename = "double-loop", alias = "double")]
    Double,
    #[serde(rename = "cascade")]
    Cascade,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValidationMode {
    /// Additionally require `Γ_ij ≥ (Γ_i + Γ_j)/2`.
    Strict,
    #[default]
    Lenient,
}

/// A relaxation/field parameter set that has passed [`validate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrivenSystem {
    pub relax: RelaxationSpec,
    pub fields: FieldSpec,
}

/// Check every parameter invariant and collect all violations.
pub fn validate(relax: &RelaxationSpec, fields: &FieldSpec, mode: ValidationMode) -> Result<DrivenSystem> {
    let mut out = Vec::new();

    for (name, v) in level_names(&relax.gamma, "Γ") {
        if !v.is_finite() {
            out.push(Violation::NonFinite { name });
        } else if v <= 0.0 {
            out.push(Violation::NonPositiveRate { name, value: v });
        }
    }
    for (name, v) in level_names(&relax.pump, "q") {
        if !v.is_finite() {
            out.push(Violation::NonFinite { name });
        } else if v < 0.0 {
            out.push(Violation::NegativeRate { name, value: v });
        }
    }
    let b = relax.branch;
    for (name, v) in [("γ_gn", b.gn), ("γ_gl", b.gl), ("γ_mn", b.mn), ("γ_ml", b.ml)] {
        if !v.is_finite() {
            out.push(Violation::NonFinite { name });
        } else if v < 0.0 {
            out.push(Violation::NegativeRate { name, value: v });
        }
    }
    for (level, sum, total) in [('g', b.gn + b.gl, relax.gamma.g), ('m', b.mn + b.ml, relax.gamma.m)] {
        if sum > total {
            out.push(Violation::BranchExceedsTotal { level, sum, total });
        }
    }
    for (name, v, i, j) in relax.width.named() {
        let name = width_name(name);
        if !v.is_finite() {
            out.push(Violation::NonFinite { name });
        } else if v <= 0.0 {
            out.push(Violation::NonPositiveRate { name, value: v });
        } else if mode == ValidationMode::Strict {
            let bound = 0.5 * (relax.level(i) + relax.level(j));
            if v < bound {
                out.push(Violation::CoherenceWidthTooSmall { name: short_width_name(name), value: v, bound });
            }
        }
    }
    for (i, name) in ["Ω_1", "Ω_2", "Ω_3", "Ω_4"].into_iter().enumerate() {
        if !fields.detuning[i].is_finite() {
            out.push(Violation::NonFinite { name });
        }
    }
    for (i, name) in ["G_1", "G_2", "G_3", "G_4"].into_iter().enumerate() {
        if !fields.rabi[i].is_finite() {
            out.push(Violation::NonFinite { name });
        }
    }
    for (i, name) in ["k_1", "k_2", "k_3", "k_4"].into_iter().enumerate() {
        if !fields.k[i].is_finite() {
            out.push(Violation::NonFinite { name });
        }
    }

    if out.is_empty() {
        Ok(DrivenSystem { relax: *relax, fields: *fields })
    } else {
        Err(Error::Invalid(Violations(out)))
    }
}

fn level_names(r: &LevelRates, prefix: &str) -> [(&'static str, f64); 4] {
    let names: [&'static str; 4] =
        if prefix == "Γ" { ["Γ_g", "Γ_n", "Γ_m", "Γ_l"] } else { ["q_g", "q_n", "q_m", "q_l"] };
    let vals = r.named();
    [(names[0], vals[0].1), (names[1], vals[1].1), (names[2], vals[2].1), (names[3], vals[3].1)]
}

fn width_name(short: &'static str) -> &'static str {
    match short {
        "lg" => "Γ_lg",
        "ng" => "Γ_ng",
        "nm" => "Γ_nm",
        "lm" => "Γ_lm",
        "ln" => "Γ_ln",
        _ => "Γ_gm",
    }
}

fn short_width_name(long: &'static str) -> &'static str {
    &long[long.len() - 2..]
}

/// Zero-field (unsaturated) populations and population differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Populations {
    pub n: LevelRates,
    /// `Δn_1..Δn_4`.
    pub dn: [f64; 4],
}

impl Populations {
    pub fn from_levels(n: LevelRates) -> Self {
        Self { n, dn: population_differences(&n) }
    }
}

/// `[r_l − r_g, r_n − r_g, r_n − r_m, r_l − r_m]`.
pub fn population_differences(r: &LevelRates) -> [f64; 4] {
    [r.l - r.g, r.n - r.g, r.n - r.m, r.l - r.m]
}

/// Pump/decay balance with all fields off.
pub fn unsaturated_populations(relax: &RelaxationSpec) -> Populations {
    let RelaxationSpec { gamma, branch, pump, .. } = relax;
    let m = pump.m / gamma.m;
    let g = pump.g / gamma.g;
    let n = (pump.n + branch.gn * g + branch.mn * m) / gamma.n;
    let l = (pump.l + branch.gl * g + branch.ml * m) / gamma.l;
    Populations::from_levels(LevelRates::new(g, n, m, l))
}
