//! Maxwell velocity averaging by Gauss–Hermite quadrature.
//!
//! A response evaluated for atoms moving with velocity `v` is obtained by
//! shifting every detuning `Ω_i → Ω_i − k_i v`. The average is taken against
//! `exp(−v²/u²)/(√π u)` along the common beam axis.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dressed::saturated_populations;
use crate::error::{Error, Result};
use crate::model::{FieldSpec, Populations, RelaxationSpec};
use crate::spectra::{check_grid, ComplexSpectrum, Probe};

pub const DEFAULT_ORDER: usize = 64;
pub const DEFAULT_MAX_ORDER: usize = 512;
pub const DEFAULT_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DopplerConfig {
    /// Thermal velocity; `k_i u` is a rate.
    pub u: f64,
    /// Starting quadrature order (even).
    pub order: usize,
    /// Largest order reached by doubling before giving up.
    pub max_order: usize,
    /// Accepted relative change between successive orders.
    pub rel_tol: f64,
}

impl Default for DopplerConfig {
    fn default() -> Self {
        Self { u: 0.0, order: DEFAULT_ORDER, max_order: DEFAULT_MAX_ORDER, rel_tol: DEFAULT_REL_TOL }
    }
}

impl DopplerConfig {
    pub fn new(u: f64) -> Self {
        Self { u, ..Self::default() }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.u.is_finite() && self.u >= 0.0) {
            return Err(Error::InvalidDoppler("thermal velocity must be finite and >= 0"));
        }
        if self.order < 2 || self.order % 2 != 0 {
            return Err(Error::InvalidDoppler("quadrature order must be an even integer >= 2"));
        }
        if self.max_order < self.order {
            return Err(Error::InvalidDoppler("max_order must be >= order"));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidDoppler("rel_tol must be > 0"));
        }
        Ok(())
    }
}

/// Nodes and normalised weights (summing to 1) for `∫ f(x) e^{−x²} dx / √π`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Cached Gauss–Hermite rule of the given order.
pub fn hermite_rule(order: usize) -> Arc<HermiteRule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<HermiteRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(rule) = cache.lock().unwrap().get(&order) {
        return Arc::clone(rule);
    }
    let rule = Arc::new(compute_rule(order));
    cache.lock().unwrap().entry(order).or_insert(rule).clone()
}

/// Orthonormal Hermite recurrence at `z`. Returns `(p_n, p_{n−1}, log_scale)`
/// with the true values equal to the returned ones times `exp(log_scale)`.
fn hermite_pair(n: usize, z: f64) -> (f64, f64, f64) {
    const PIM4: f64 = 0.751_125_544_464_942_5;
    let (mut p1, mut p2) = (PIM4, 0.0);
    let mut log_scale = 0.0;
    for j in 0..n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
        if p1.abs() > 1e150 {
            p1 *= 1e-150;
            p2 *= 1e-150;
            log_scale += 150.0 * std::f64::consts::LN_10;
        }
    }
    (p1, p2, log_scale)
}

fn compute_rule(n: usize) -> HermiteRule {
    let nf = n as f64;
    let mut x = jacobi_eigenvalues(n);
    x.sort_by(|a, b| b.total_cmp(a));
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = x[i];
        for _ in 0..20 {
            let (p1, p2, _) = hermite_pair(n, z);
            let z1 = z;
            z = z1 - p1 / ((2.0 * nf).sqrt() * p2);
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        let (_, p2, s) = hermite_pair(n, z);
        let pp = (2.0 * nf).sqrt() * p2;
        x[i] = z;
        w[i] = 2.0 * (-2.0 * s).exp() / (pp * pp);
    }
    // enforce exact symmetry
    for i in 0..n / 2 {
        let z = 0.5 * (x[i] - x[n - 1 - i]);
        let wi = 0.5 * (w[i] + w[n - 1 - i]);
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    let total: f64 = w.iter().sum();
    for wi in &mut w {
        *wi /= total;
    }
    HermiteRule { nodes: x, weights: w }
}

/// Eigenvalues of the symmetric tridiagonal Jacobi matrix of the Hermite
/// recurrence (zero diagonal, off-diagonal `√(i/2)`), by implicit QL.
fn jacobi_eigenvalues(n: usize) -> Vec<f64> {
    let mut d = vec![0.0_f64; n];
    let mut e: Vec<f64> = (1..=n).map(|i| if i < n { (i as f64 / 2.0).sqrt() } else { 0.0 }).collect();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 100, "tridiagonal QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0_f64, 1.0_f64, 0.0_f64);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d
}

/// Detunings seen by atoms moving with velocity `v`.
pub fn shifted_fields(fields: &FieldSpec, v: f64) -> FieldSpec {
    let mut out = *fields;
    for i in 0..4 {
        out.detuning[i] -= fields.k[i] * v;
    }
    out
}

fn average_at(order: usize, u: f64, f: &dyn Fn(f64) -> Result<Complex64>) -> Result<Complex64> {
    let rule = hermite_rule(order);
    let mut acc = Complex64::new(0.0, 0.0);
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        if w == 0.0 {
            continue;
        }
        acc += w * f(u * x)?;
    }
    Ok(acc)
}

/// Maxwell average of `f(v)`. The order doubles from `cfg.order` until two
/// successive results agree to `cfg.rel_tol`.
pub fn velocity_average<F>(f: F, cfg: &DopplerConfig) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    cfg.check()?;
    if cfg.u == 0.0 {
        return f(0.0);
    }
    let mut order = cfg.order;
    let mut prev = average_at(order, cfg.u, &f)?;
    let mut rel_change = f64::INFINITY;
    while order * 2 <= cfg.max_order {
        order *= 2;
        let next = average_at(order, cfg.u, &f)?;
        let diff = (next - prev).norm();
        rel_change = if diff == 0.0 { 0.0 } else { diff / next.norm() };
        if rel_change <= cfg.rel_tol {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::NonConvergent { order, rel_change })
}

/// Velocity-averaged probe response `−i r/G` at one set of fields. Saturation
/// is recomputed for every velocity class.
pub fn averaged_response(
    relax: &RelaxationSpec,
    fields: &FieldSpec,
    pops: &Populations,
    probe: Probe,
    cfg: &DopplerConfig,
) -> Result<Complex64> {
    velocity_average(
        |v| {
            let f = shifted_fields(fields, v);
            let sat = saturated_populations(relax, &f, pops)?;
            probe.response(relax, &f, &sat)
        },
        cfg,
    )
}

/// Velocity-averaged probe spectrum.
pub fn averaged_spectrum(
    relax: &RelaxationSpec,
    fields: &FieldSpec,
    pops: &Populations,
    grid: &[f64],
    probe: Probe,
    cfg: &DopplerConfig,
) -> Result<ComplexSpectrum> {
    check_grid(grid)?;
    let response = grid
        .iter()
        .map(|&omega| averaged_response(relax, &fields.with_detuning(probe.index(), omega), pops, probe, cfg))
        .collect::<Result<Vec<_>>>()?;
    ComplexSpectrum::new(grid.to_vec(), response)
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;

    #[test]
    fn weights_are_normalised_at_every_order() {
        for order in [2, 4, 8, 16, 32, 64, 128, 256, 512] {
            let rule = hermite_rule(order);
            let sum: f64 = rule.weights.iter().sum();
            assert!((sum - 1.0).abs() <= 1e-14, "order {order}: {sum}");
            assert!(rule.nodes.windows(2).all(|p| p[0] > p[1]), "order {order}");
        }
    }

    #[test]
    fn low_order_rule_is_exact() {
        let rule = hermite_rule(2);
        assert_relative_eq!(rule.nodes[0], 0.5_f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(rule.weights[0], 0.5, max_relative = 1e-14);
    }

    #[test]
    fn second_and_fourth_moments() {
        for order in [16, 512] {
            let rule = hermite_rule(order);
            let m2: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * x * x).sum();
            let m4: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * x.powi(4)).sum();
            assert_relative_eq!(m2, 0.5, max_relative = 1e-12);
            assert_relative_eq!(m4, 0.75, max_relative = 1e-12);
        }
    }

    #[test]
    fn constant_is_preserved() {
        let c = Complex64::new(2.5, -1.0);
        for u in [0.0, 0.3, 50.0] {
            let avg = velocity_average(|_| Ok(c), &DopplerConfig::new(u)).unwrap();
            assert_relative_eq!((avg - c).norm(), 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn shifts() {
        let mut f = FieldSpec::resonant([1.0; 4]);
        f.detuning = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(shifted_fields(&f, 0.0), f);
        let s = shifted_fields(&f, 2.7);
        assert_eq!(s.detuning[0] - s.detuning[1], f.detuning[0] - f.detuning[1]);
        f.k = [1.0, -1.0, 1.0, 1.0];
        let s = shifted_fields(&f, 1.0);
        assert_eq!(s.detuning[0] - s.detuning[1], f.detuning[0] - f.detuning[1] - 2.0);
    }

    #[test]
    fn bad_configs() {
        let f = |_: f64| Ok(Complex64::from(1.0));
        assert!(velocity_average(f, &DopplerConfig { order: 3, ..DopplerConfig::new(1.0) }).is_err());
        assert!(velocity_average(f, &DopplerConfig::new(-1.0)).is_err());
        let err = velocity_average(
            |v| Ok(Complex64::from(1.0 / (1e-6 + v * v))),
            &DopplerConfig { max_order: 128, ..DopplerConfig::new(1.0) },
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonConvergent { order: 128, .. }));
    }
}
