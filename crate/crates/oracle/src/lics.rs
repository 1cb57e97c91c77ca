//! Continuum-structure ratios evaluated term by term in real arithmetic,
//! with every product of `(1 − iq)` factors expanded by hand.

use nief_core::lics::{ContinuumCoupling, LicsDetunings};

#[derive(Debug, Clone, Copy, PartialEq)]
struct Cx {
    re: f64,
    im: f64,
}

fn cx(re: f64, im: f64) -> Cx {
    Cx { re, im }
}

fn mul(a: Cx, b: Cx) -> Cx {
    cx(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re)
}

fn div(a: Cx, b: Cx) -> Cx {
    let d = b.re * b.re + b.im * b.im;
    cx((a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d)
}

fn scale(s: f64, a: Cx) -> Cx {
    cx(s * a.re, s * a.im)
}

fn sub(a: Cx, b: Cx) -> Cx {
    cx(a.re - b.re, a.im - b.im)
}

fn add(a: Cx, b: Cx) -> Cx {
    cx(a.re + b.re, a.im + b.im)
}

/// `(1 − i p)(1 − i q) = (1 − pq) − i(p + q)`.
fn pair(p: f64, q: f64) -> Cx {
    cx(1.0 - p * q, -(p + q))
}

/// `(1 − i q)(1 + i x) = (1 + qx) + i(x − q)`.
fn mixed(q: f64, x: f64) -> Cx {
    cx(1.0 + q * x, x - q)
}

fn beta(g: f64) -> f64 {
    g / (1.0 + g)
}

fn resonance(c: &ContinuumCoupling, dl: f64, dn: f64, z: f64) -> Cx {
    let bl = beta(c.g_ll);
    let bn = beta(c.g_nn);
    let s = 1.0 + c.g_nn;
    // g_mn / ((1 + iz)(1 + g_nn)) = g_mn (1 − iz) / ((1 + z²) s)
    let t2 = cx(c.g_mn / ((1.0 + z * z) * s), -c.g_mn * z / ((1.0 + z * z) * s));
    // (1 − i q)² / (1 + i dl) = [(1 − q²) − 2iq](1 − i dl)/(1 + dl²)
    let q = c.q_nl;
    let num = cx(1.0 - q * q, -2.0 * q);
    let t3 = scale(c.k2 * bl * bn / (1.0 + dl * dl), mul(num, cx(1.0, -dl)));
    scale(s, sub(add(cx(1.0, dn), t2), t3))
}

pub fn k_factor(c: &ContinuumCoupling, d: &LicsDetunings) -> (f64, f64) {
    let r = sub(cx(1.0, 0.0), scale(c.k1 * beta(c.g_ll), div(pair(c.q_nl, c.q_gl), mixed(c.q_ng, d.x_l))));
    (r.re, r.im)
}

pub fn chi3_ratio(c: &ContinuumCoupling, d: &LicsDetunings) -> (f64, f64) {
    let (kr, ki) = k_factor(c, d);
    let x = resonance(c, d.x_l, d.x_n, d.z_gm);
    let r = div(cx(kr, ki), mul(cx(1.0, d.z_gm), x));
    (r.re, r.im)
}

pub fn alpha1_ratio(c: &ContinuumCoupling, d: &LicsDetunings) -> f64 {
    let x = resonance(c, d.x_l, d.x_n, d.z_gm);
    let dg = cx(1.0, d.z_gm);
    let inner = sub(cx(1.0, 0.0), div(cx(c.g_mn, 0.0), mul(dg, x)));
    div(inner, dg).re
}

pub fn alpha_mu_ratio(c: &ContinuumCoupling, d: &LicsDetunings) -> f64 {
    let bl = beta(c.g_ll);
    let a = sub(cx(1.0, 0.0), scale(c.k1 * bl, div(pair(c.q_ln, c.q_gl), mixed(c.q_gn, d.y_l))));
    let y = resonance(c, d.y_l, d.y_n, d.z_mu);
    let q = c.q_gn;
    let qq = cx(1.0 - q * q, -2.0 * q);
    let last = scale(c.k4 * c.g_nn, div(mul(mul(a, a), qq), y)).re;
    let w = (d.y_l + c.q_gl) * (d.y_l + c.q_gl) / (1.0 + d.y_l * d.y_l);
    1.0 - c.k3 * bl + c.k3 * bl * w - last
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_coupling() {
        let c = ContinuumCoupling::default();
        let d = LicsDetunings::default();
        assert_eq!(chi3_ratio(&c, &d), (1.0, 0.0));
        assert_eq!(alpha1_ratio(&c, &d), 1.0);
        assert_eq!(alpha_mu_ratio(&c, &d), 1.0);
    }
}
