//! Direct steady-state solutions of the density-matrix equations of the
//! four-level double loop `g–l–m–n`.
//!
//! Every coherence obeys `P ρ_ab = −i[V, ρ]_ab` at its own combination
//! frequency, with the hermitian coupling `V(l,g) = G_1`, `V(n,g) = G_2`,
//! `V(n,m) = G_3`, `V(l,m) = G_4`. To first order in the probes (2 and 4)
//! this gives two closed four-amplitude blocks.
//!
//! | unknown | coherence | oscillates at | width |
//! |---------|-----------|---------------|-------|
//! | `r_2`   | `ρ_ng`  | `Ω_2`             | `Γ_ng` |
//! | `r_12*` | `ρ_nl`  | `Ω_2 − Ω_1`       | `Γ_ln` |
//! | `r_32*` | `ρ_mg`  | `Ω_2 − Ω_3`       | `Γ_gm` |
//! | `r~_4*` | `ρ_ml`  | `Ω_2 − Ω_1 − Ω_3` | `Γ_lm` |
//! | `r_4`   | `ρ_lm`  | `Ω_4`             | `Γ_lm` |
//! | `r_41`  | `ρ_gm`  | `Ω_4 − Ω_1`       | `Γ_gm` |
//! | `r_43`  | `ρ_ln`  | `Ω_4 − Ω_3`       | `Γ_ln` |
//! | `r~_2*` | `ρ_gn`  | `Ω_4 − Ω_1 − Ω_3` | `Γ_ng` |
//!
//! Rows of the `r_4` block are the complex conjugates of rows of the `r_2`
//! block with the roles of the two loops exchanged.

use nalgebra::{DMatrix, DVector};
use nief_core::model::{FieldSpec, LevelRates, RelaxationSpec};
use num_complex::Complex64;

use crate::linear::{LinearSystem, Solution};
use crate::{OracleError, Result};

pub const PROBE_LABELS: [&str; 8] = ["r_2", "r_12*", "r_32*", "r~_4*", "r_4", "r_41", "r_43", "r~_2*"];

/// Strong-field coherences `r_1 = ρ_lg`, `r_3 = ρ_nm` for given populations.
pub fn strong_coherences(relax: &RelaxationSpec, fields: &FieldSpec, r: &LevelRates) -> (Complex64, Complex64) {
    let i = Complex64::i();
    let w = &relax.width;
    let p1 = Complex64::new(w.lg, fields.detuning[0]);
    let p3 = Complex64::new(w.nm, fields.detuning[2]);
    (i * fields.rabi[0] * (r.l - r.g) / p1, i * fields.rabi[2] * (r.n - r.m) / p3)
}

/// First-order probe system at fixed level populations `r`.
pub fn assemble_probe_system(relax: &RelaxationSpec, fields: &FieldSpec, r: &LevelRates) -> Result<LinearSystem> {
    let i = Complex64::i();
    let zero = Complex64::new(0.0, 0.0);
    let w = &relax.width;
    let [o1, o2, o3, o4] = fields.detuning;
    let [g1, g2, g3, g4] = fields.rabi;
    let (r1, r3) = strong_coherences(relax, fields, r);
    let c = Complex64::new;

    let p2 = c(w.ng, o2);
    let p12c = c(w.ln, o1 - o2).conj();
    let p32c = c(w.gm, o3 - o2).conj();
    let d4c = c(w.lm, o1 - o2 + o3).conj();
    let p4 = c(w.lm, o4);
    let p41 = c(w.gm, o4 - o1);
    let p43 = c(w.ln, o4 - o3);
    let d2c = c(w.ng, o1 + o3 - o4).conj();

    let mut m = DMatrix::from_element(8, 8, zero);
    let mut b = DVector::from_element(8, zero);

    // r_2 block
    m[(0, 0)] = p2;
    m[(0, 1)] = -i * g1;
    m[(0, 2)] = i * g3;
    b[0] = i * g2 * (r.n - r.g);

    m[(1, 0)] = -i * g1.conj();
    m[(1, 1)] = p12c;
    m[(1, 3)] = i * g3;
    b[1] = -i * r1.conj() * g2;

    m[(2, 0)] = i * g3.conj();
    m[(2, 2)] = p32c;
    m[(2, 3)] = -i * g1;
    b[2] = i * g2 * r3.conj();

    m[(3, 1)] = i * g3.conj();
    m[(3, 2)] = -i * g1.conj();
    m[(3, 3)] = d4c;

    // r_4 block
    m[(4, 4)] = p4;
    m[(4, 5)] = i * g1;
    m[(4, 6)] = -i * g3;
    b[4] = i * g4 * (r.l - r.m);

    m[(5, 4)] = i * g1.conj();
    m[(5, 5)] = p41;
    m[(5, 7)] = -i * g3;
    b[5] = i * r1.conj() * g4;

    m[(6, 4)] = -i * g3.conj();
    m[(6, 6)] = p43;
    m[(6, 7)] = i * g1;
    b[6] = -i * g4 * r3.conj();

    m[(7, 5)] = -i * g3.conj();
    m[(7, 6)] = i * g1.conj();
    m[(7, 7)] = d2c;

    LinearSystem::new(m, b, PROBE_LABELS.to_vec())
}

/// Probe amplitudes `(r_2, r_4)` by direct solve at populations `r`.
pub fn probe_amplitudes(
    relax: &RelaxationSpec,
    fields: &FieldSpec,
    r: &LevelRates,
) -> Result<(Complex64, Complex64, Solution)> {
    let sol = assemble_probe_system(relax, fields, r)?.solve()?;
    Ok((sol.values[0], sol.values[4], sol))
}

/// Steady state of the strong fields alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrongFieldState {
    pub r: LevelRates,
    /// `[r_l − r_g, r_n − r_g, r_n − r_m, r_l − r_m]`.
    pub dr: [f64; 4],
    pub r1: Complex64,
    pub r3: Complex64,
    pub condition: f64,
}

/// Populations and strong coherences from the coupled rate and coherence
/// equations, solved as one real 8×8 system in
/// `(r_g, r_n, r_m, r_l, Re r_1, Im r_1, Re r_3, Im r_3)`.
///
/// `W_1 = 2 Re{i G_1* r_1}` is the net rate into `l` out of `g`, `W_3` the
/// same into `n` out of `m`.
pub fn strong_field_populations(relax: &RelaxationSpec, fields: &FieldSpec) -> Result<StrongFieldState> {
    let gm = &relax.gamma;
    let br = &relax.branch;
    let q = &relax.pump;
    let w = &relax.width;
    let (g1r, g1i) = (fields.rabi[0].re, fields.rabi[0].im);
    let (g3r, g3i) = (fields.rabi[2].re, fields.rabi[2].im);
    let (a1, b1) = (w.lg, fields.detuning[0]);
    let (a3, b3) = (w.nm, fields.detuning[2]);
    const G: usize = 0;
    const N: usize = 1;
    const M: usize = 2;
    const L: usize = 3;
    const X1: usize = 4;
    const Y1: usize = 5;
    const X3: usize = 6;
    const Y3: usize = 7;

    let mut m = DMatrix::<f64>::zeros(8, 8);
    let mut rhs = DVector::<f64>::zeros(8);

    // Γ_g r_g = q_g − W_1
    m[(0, G)] = gm.g;
    m[(0, X1)] = 2.0 * g1i;
    m[(0, Y1)] = -2.0 * g1r;
    rhs[0] = q.g;
    // Γ_l r_l = q_l + γ_gl r_g + γ_ml r_m + W_1
    m[(1, L)] = gm.l;
    m[(1, G)] = -br.gl;
    m[(1, M)] = -br.ml;
    m[(1, X1)] = -2.0 * g1i;
    m[(1, Y1)] = 2.0 * g1r;
    rhs[1] = q.l;
    // Γ_m r_m = q_m − W_3
    m[(2, M)] = gm.m;
    m[(2, X3)] = 2.0 * g3i;
    m[(2, Y3)] = -2.0 * g3r;
    rhs[2] = q.m;
    // Γ_n r_n = q_n + γ_gn r_g + γ_mn r_m + W_3
    m[(3, N)] = gm.n;
    m[(3, G)] = -br.gn;
    m[(3, M)] = -br.mn;
    m[(3, X3)] = -2.0 * g3i;
    m[(3, Y3)] = 2.0 * g3r;
    rhs[3] = q.n;
    // P_1 r_1 = i G_1 (r_l − r_g), real and imaginary parts
    m[(4, X1)] = a1;
    m[(4, Y1)] = -b1;
    m[(4, L)] = g1i;
    m[(4, G)] = -g1i;
    m[(5, X1)] = b1;
    m[(5, Y1)] = a1;
    m[(5, L)] = -g1r;
    m[(5, G)] = g1r;
    // P_3 r_3 = i G_3 (r_n − r_m)
    m[(6, X3)] = a3;
    m[(6, Y3)] = -b3;
    m[(6, N)] = g3i;
    m[(6, M)] = -g3i;
    m[(7, X3)] = b3;
    m[(7, Y3)] = a3;
    m[(7, N)] = -g3r;
    m[(7, M)] = g3r;

    let lu = m.clone().lu();
    let inv = lu.try_inverse().ok_or(OracleError::IllConditioned { cond: f64::INFINITY })?;
    let norm1 = |a: &DMatrix<f64>| (0..8).map(|j| a.column(j).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let condition = norm1(&m) * norm1(&inv);
    if !(condition < crate::linear::MAX_CONDITION) {
        return Err(OracleError::IllConditioned { cond: condition });
    }
    let x = lu.solve(&rhs).ok_or(OracleError::IllConditioned { cond: condition })?;
    let r = LevelRates::new(x[G], x[N], x[M], x[L]);
    Ok(StrongFieldState {
        r,
        dr: [r.l - r.g, r.n - r.g, r.n - r.m, r.l - r.m],
        r1: Complex64::new(x[X1], x[Y1]),
        r3: Complex64::new(x[X3], x[Y3]),
        condition,
    })
}

/// Three-level ladder `n < g < l` with the strong field on `g–l` and the
/// probe on `n–g`, at fixed populations. Returns the probe coherence.
///
/// `G_1'` drives `g–l` at detuning `Ω_1'` with strong coherence
/// `iG_1'(r_g − r_l)/(Γ_lg + iΩ_1')`; the probe drives `n–g` at `Ω_2`. The
/// two-photon coherence `ρ_nl` oscillates at `Ω_1' + Ω_2`.
pub fn ladder_probe(relax: &RelaxationSpec, fields: &FieldSpec, r: &LevelRates) -> Result<Complex64> {
    let i = Complex64::i();
    let w = &relax.width;
    let (g1, g2) = (fields.rabi[0], fields.rabi[1]);
    let (o1, o2) = (fields.detuning[0], fields.detuning[1]);
    let r1 = i * g1 * (r.g - r.l) / Complex64::new(w.lg, o1);
    let p2 = Complex64::new(w.ng, o2);
    let pnl = Complex64::new(w.ln, o2 + o1);
    // p2 r2 − i ρ_nl G1* = iG2 (r_n − r_g);  −i r2 G1 + pnl ρ_nl = −i G2 r1
    let m = DMatrix::from_row_slice(2, 2, &[p2, -i * g1.conj(), -i * g1, pnl]);
    let b = DVector::from_vec(vec![i * g2 * (r.n - r.g), -i * g2 * r1]);
    let sol = LinearSystem::new(m, b, vec!["r_2", "rho_nl"])?.solve()?;
    Ok(sol.values[0])
}

#[cfg(test)]
mod tests {
    use nief_core::model::{Branching, CoherenceWidths};

    use super::*;

    fn relax() -> RelaxationSpec {
        RelaxationSpec {
            gamma: LevelRates::new(1.0, 1.5, 2.0, 0.5),
            branch: Branching { gn: 0.3, gl: 0.2, mn: 0.4, ml: 0.6 },
            width: CoherenceWidths { lg: 1.2, ng: 0.8, nm: 1.1, lm: 0.9, ln: 1.4, gm: 0.7 },
            pump: LevelRates::new(0.1, 0.5, 0.3, 0.2),
        }
    }

    #[test]
    fn undriven_probe_is_diagonal() {
        let f = FieldSpec::resonant([0.0, 1e-3, 0.0, 1e-3]).with_detuning(1, 0.4);
        let r = LevelRates::new(0.1, 0.6, 0.2, 0.3);
        let sys = assemble_probe_system(&relax(), &f, &r).unwrap();
        assert_eq!(sys.len(), 8);
        for i in 0..8 {
            for j in 0..8 {
                if i != j {
                    assert_eq!(sys.matrix[(i, j)].norm(), 0.0);
                }
            }
        }
        let (r2, _, _) = probe_amplitudes(&relax(), &f, &r).unwrap();
        let want = Complex64::i() * 1e-3 * 0.5 / Complex64::new(0.8, 0.4);
        assert!((r2 - want).norm() < 1e-18);
    }

    #[test]
    fn zero_field_populations_balance_rates() {
        let rx = relax();
        let s = strong_field_populations(&rx, &FieldSpec::resonant([0.0; 4])).unwrap();
        let q = rx.pump;
        assert!((s.r.g - q.g / rx.gamma.g).abs() < 1e-15);
        assert!((s.r.m - q.m / rx.gamma.m).abs() < 1e-15);
        let n = (q.n + rx.branch.gn * s.r.g + rx.branch.mn * s.r.m) / rx.gamma.n;
        assert!((s.r.n - n).abs() < 1e-15);
        assert_eq!(s.r1, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn closed_two_level_saturation() {
        // l decays only to g's feeding chain: two-level limit with γ_gl = 0
        let mut rx = relax();
        rx.branch = Branching::default();
        rx.pump = LevelRates::new(0.0, 0.0, 0.0, 1.0);
        let f = FieldSpec::resonant([0.8, 0.0, 0.0, 0.0]);
        let s = strong_field_populations(&rx, &f).unwrap();
        let dn = 1.0 / rx.gamma.l;
        let g = rx.gamma;
        let alpha = 2.0 * (g.l + g.g) / (g.l * g.g * rx.width.lg) * 0.64;
        assert!((s.dr[0] - dn / (1.0 + alpha)).abs() < 1e-14);
    }
}
