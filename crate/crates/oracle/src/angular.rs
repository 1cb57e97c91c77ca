//! 3j symbols by their finite sum and 6j symbols by full contraction of four
//! 3j symbols over all magnetic quantum numbers.
//!
//! Momenta and projections are doubled integers throughout.

use crate::{OracleError, Result};

fn fact(n: i64) -> f64 {
    (2..=n).map(|k| k as f64).product()
}

fn doubled(value: f64) -> Result<i64> {
    let t = 2.0 * value;
    if !value.is_finite() || value < 0.0 || (t - t.round()).abs() > 1e-9 {
        return Err(OracleError::NonHalfInteger { value });
    }
    Ok(t.round() as i64)
}

/// 3j symbol `(j1 j2 j3; m1 m2 m3)` with doubled arguments.
pub fn wigner3j_doubled(j1: i64, j2: i64, j3: i64, m1: i64, m2: i64, m3: i64) -> f64 {
    if m1 + m2 + m3 != 0 {
        return 0.0;
    }
    if (j1 + j2 + j3) % 2 != 0 || j3 > j1 + j2 || j3 < (j1 - j2).abs() {
        return 0.0;
    }
    for (j, m) in [(j1, m1), (j2, m2), (j3, m3)] {
        if m.abs() > j || (j + m) % 2 != 0 {
            return 0.0;
        }
    }
    let h = |x: i64| x / 2;
    let tri = fact(h(j1 + j2 - j3)) * fact(h(j1 - j2 + j3)) * fact(h(-j1 + j2 + j3)) / fact(h(j1 + j2 + j3) + 1);
    let proj =
        fact(h(j1 + m1)) * fact(h(j1 - m1)) * fact(h(j2 + m2)) * fact(h(j2 - m2)) * fact(h(j3 + m3)) * fact(h(j3 - m3));
    let k_min = 0.max(h(j2 - j3 - m1)).max(h(j1 - j3 + m2));
    let k_max = h(j1 + j2 - j3).min(h(j1 - m1)).min(h(j2 + m2));
    let mut sum = 0.0;
    for k in k_min..=k_max {
        let den = fact(k)
            * fact(h(j3 - j2 + m1) + k)
            * fact(h(j3 - j1 - m2) + k)
            * fact(h(j1 + j2 - j3) - k)
            * fact(h(j1 - m1) - k)
            * fact(h(j2 + m2) - k);
        sum += if k % 2 == 0 { 1.0 } else { -1.0 } / den;
    }
    let phase = h(j1 - j2 - m3);
    let sign = if phase.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sign * (tri * proj).sqrt() * sum
}

/// 3j symbol with ordinary (half-integer) arguments.
pub fn wigner3j(j1: f64, j2: f64, j3: f64, m1: f64, m2: f64, m3: f64) -> Result<f64> {
    let js = [doubled(j1)?, doubled(j2)?, doubled(j3)?];
    let ms = [m1, m2, m3].map(|m| (2.0 * m).round() as i64);
    if [m1, m2, m3].iter().any(|m| ((2.0 * m) - (2.0 * m).round()).abs() > 1e-9) {
        return Err(OracleError::NonHalfInteger { value: m1 });
    }
    Ok(wigner3j_doubled(js[0], js[1], js[2], ms[0], ms[1], ms[2]))
}

fn projections(j: i64) -> impl Iterator<Item = i64> {
    (0..=j).map(move |k| -j + 2 * k)
}

/// `{j1 j2 j3; j4 j5 j6} = Σ (−1)^{Σ(j−m)} (j1 j2 j3; −m1 −m2 −m3)
/// (j1 j5 j6; m1 −m5 m6) (j4 j2 j6; m4 m2 −m6) (j4 j5 j3; −m4 m5 m3)`.
pub fn sixj_by_3j_contraction(j1: f64, j2: f64, j3: f64, j4: f64, j5: f64, j6: f64) -> Result<f64> {
    let [j1, j2, j3, j4, j5, j6] = [doubled(j1)?, doubled(j2)?, doubled(j3)?, doubled(j4)?, doubled(j5)?, doubled(j6)?];
    let mut sum = 0.0;
    for m1 in projections(j1) {
        for m2 in projections(j2) {
            let m3 = -m1 - m2;
            if m3.abs() > j3 {
                continue;
            }
            let a = wigner3j_doubled(j1, j2, j3, -m1, -m2, -m3);
            if a == 0.0 {
                continue;
            }
            for m5 in projections(j5) {
                let m6 = m5 - m1;
                let m4 = m6 - m2;
                if m6.abs() > j6 || m4.abs() > j4 {
                    continue;
                }
                let b = wigner3j_doubled(j1, j5, j6, m1, -m5, m6);
                let c = wigner3j_doubled(j4, j2, j6, m4, m2, -m6);
                let d = wigner3j_doubled(j4, j5, j3, -m4, m5, m3);
                let phase = (j1 - m1 + j2 - m2 + j3 - m3 + j4 - m4 + j5 - m5 + j6 - m6) / 2;
                let sign = if phase.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                sum += sign * a * b * c * d;
            }
        }
    }
    Ok(sum)
}
