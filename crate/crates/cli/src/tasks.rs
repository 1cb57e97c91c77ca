//! One function per computation task. Each returns the CSV table, the JSON
//! summary and the scalar metrics a sweep collects.

use nief_core::doppler::averaged_response;
use nief_core::dressed::{cascade_transform, saturated_populations, SaturatedPopulations};
use nief_core::lics::{self, LicsDetunings};
use nief_core::mixing::{apply_local_field, dressing_factors, MixingConfig};
use nief_core::model::{unsaturated_populations, validate, FieldSpec, LevelRates, SchemeTopology};
use nief_core::relaxation::{
    absorption_prefactor, awi_center_condition, awi_wing_condition, cascade_alpha, cascade_alpha_wing,
    collision_resonance_amplitude, f_interference, fwm_bracket, fwm_coherence, interference_coefficients, FwmRates,
};
use nief_core::spectra::{
    awi_condition, detect_windows, linear_grid, sum_rule, ComplexSpectrum, Probe, SUM_RULE_SPAN_FACTOR,
};
use nief_core::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{LicsScan, MixingScan, ScenarioConfig, Task};
use crate::error::RunError;
use crate::output::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Metrics {
    pub window_count: Option<usize>,
    pub deepest_gain: Option<f64>,
    pub sum_rule_residual: Option<f64>,
    pub power_figure: Option<f64>,
    pub f1_min_position: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: Table,
    pub summary: Value,
    pub metrics: Metrics,
}

/// Evaluate `f` on every grid point in parallel; results keep grid order and
/// the first failure in grid order is reported.
pub fn par_map<T, E, F>(grid: &[f64], f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(f64) -> Result<T, E> + Sync,
{
    let results: Vec<Result<T, E>> = grid.par_iter().map(|&x| f(x)).collect();
    results.into_iter().collect()
}

pub fn run_task(cfg: &ScenarioConfig) -> Result<Outcome, RunError> {
    match cfg.task {
        Task::Probe => probe(cfg),
        Task::Mixing => mixing(cfg),
        Task::Lics => lics_task(cfg),
        Task::Cascade => cascade(cfg),
        Task::Fwm => fwm(cfg),
        Task::Sweep | Task::Selftest => unreachable!("dispatched by the caller"),
    }
}

fn grid_of(cfg: &ScenarioConfig) -> Result<Vec<f64>, RunError> {
    let g = cfg.require(&cfg.grid, "grid")?;
    Ok(linear_grid(g.min, g.max, g.points)?)
}

fn argmin(grid: &[f64], v: &[f64]) -> (f64, f64) {
    let mut best = (grid[0], v[0]);
    for (&x, &y) in grid.iter().zip(v) {
        if y < best.1 {
            best = (x, y);
        }
    }
    best
}

fn argmax(grid: &[f64], v: &[f64]) -> (f64, f64) {
    let neg: Vec<f64> = v.iter().map(|y| -y).collect();
    let (x, y) = argmin(grid, &neg);
    (x, -y)
}

fn levels(r: &LevelRates) -> Value {
    json!({ "g": r.g, "n": r.n, "m": r.m, "l": r.l })
}

fn probe(cfg: &ScenarioConfig) -> Result<Outcome, RunError> {
    let relax = cfg.require(&cfg.relaxation, "relaxation")?;
    let fields = cfg.require(&cfg.fields, "fields")?;
    let sys = validate(relax, fields, cfg.validation)?;
    let relax = sys.relax;
    let fields = match cfg.scheme {
        SchemeTopology::Double => sys.fields,
        SchemeTopology::Cascade => cascade_transform(&sys.fields),
    };
    let probe: Probe = cfg.probe.into();
    let grid = grid_of(cfg)?;
    let doppler = match cfg.doppler {
        Some(d) => {
            d.check()?;
            Some(d)
        }
        None => None,
    };

    let pops = unsaturated_populations(&relax);
    let sat = saturated_populations(&relax, &fields, &pops)?;
    let undriven = fields.with_rabi(0, Complex64::new(0.0, 0.0)).with_rabi(2, Complex64::new(0.0, 0.0));
    let bare = SaturatedPopulations::from_levels(pops.n);

    let sweep_line = |f: &FieldSpec, s: &SaturatedPopulations| -> Result<ComplexSpectrum, RunError> {
        let response = par_map(&grid, |x| {
            let f = f.with_detuning(probe.index(), x);
            match &doppler {
                Some(d) => averaged_response(&relax, &f, &pops, probe, d),
                None => probe.response(&relax, &f, s),
            }
        })?;
        Ok(ComplexSpectrum::new(grid.clone(), response)?)
    };
    let spec = sweep_line(&fields, &sat)?;
    let reference = sweep_line(&undriven, &bare)?;

    let probe_dr = sat.dr[probe.dr_index()];
    let windows = detect_windows(&spec, &reference, probe_dr, cfg.windows.unwrap_or_default())?;
    let half_span = (-grid[0]).min(grid[grid.len() - 1]);
    let rule = if doppler.is_none() && half_span >= SUM_RULE_SPAN_FACTOR * relax.width.max() {
        Some(sum_rule(&spec, probe_dr, relax.width.max())?)
    } else {
        None
    };

    let mut table = Table::new(&["omega", "absorption", "refraction"]);
    for j in 0..grid.len() {
        table.push(vec![grid[j].into(), spec.absorption()[j].into(), spec.refraction()[j].into()]);
    }
    let (peak_at, peak) = argmax(&grid, spec.absorption());
    let awi = (probe == Probe::R4).then(|| awi_condition(&relax, &fields, &sat));
    let summary = json!({
        "probe": match probe { Probe::R2 => "r2", Probe::R4 => "r4" },
        "scheme": cfg.scheme,
        "points": grid.len(),
        "doppler": doppler,
        "populations": {
            "unsaturated": levels(&pops.n),
            "saturated": levels(&sat.r),
            "saturated_differences": sat.dr,
        },
        "peak": { "omega": peak_at, "absorption": peak },
        "windows": windows.intervals,
        "gain_count": windows.gain_count(),
        "transparency_count": windows.transparency_count(),
        "deepest_gain": windows.deepest_gain(),
        "sum_rule": rule,
        "resonant_awi_condition": awi,
    });
    Ok(Outcome {
        table,
        summary,
        metrics: Metrics {
            window_count: Some(windows.intervals.len()),
            deepest_gain: Some(windows.deepest_gain()),
            sum_rule_residual: rule.map(|r| r.rel_error),
            ..Metrics::default()
        },
    })
}

fn mixing(cfg: &ScenarioConfig) -> Result<Outcome, RunError> {
    let section = cfg.require(&cfg.mixing, "mixing")?;
    section.config.check()?;
    let grid = grid_of(cfg)?;
    let base = section.config;
    let at = |x: f64| {
        let mut c: MixingConfig = base;
        match section.scan {
            MixingScan::X1 => c.x1 = x,
            MixingScan::X02 => c.x02 = x,
            MixingScan::Xs => c.xs = x,
            MixingScan::Omega1 => {
                c.x1 = base.x1 + x;
                c.x02 = base.x02 + x;
            }
        }
        dressing_factors(&apply_local_field(&c))
    };
    let results = par_map(&grid, at)?;

    let mut table =
        Table::new(&["x", "f1_re", "f1_im", "f_re", "f_im", "chi1_absorption", "chi_nl_abs2", "power_figure"]);
    for (&x, r) in grid.iter().zip(&results) {
        table.push(vec![
            x.into(),
            r.f1.re.into(),
            r.f1.im.into(),
            r.f.re.into(),
            r.f.im.into(),
            r.chi1_ratio.re.into(),
            r.chi_nl_ratio.norm_sqr().into(),
            r.power_figure.into(),
        ]);
    }
    let abs_f1: Vec<f64> = results.iter().map(|r| r.f1.norm()).collect();
    let power: Vec<f64> = results.iter().map(|r| r.power_figure).collect();
    let (f1_at, f1_min) = argmin(&grid, &abs_f1);
    let (p_at, p_max) = argmax(&grid, &power);
    let summary = json!({
        "scan": section.scan,
        "points": grid.len(),
        "local_field": { "c1": base.c1, "cs": base.cs },
        "f1_min": { "x": f1_at, "abs_f1": f1_min },
        "power_figure_max": { "x": p_at, "value": p_max },
    });
    Ok(Outcome {
        table,
        summary,
        metrics: Metrics { power_figure: Some(p_max), f1_min_position: Some(f1_at), ..Metrics::default() },
    })
}

fn lics_task(cfg: &ScenarioConfig) -> Result<Outcome, RunError> {
    let section = cfg.require(&cfg.lics, "lics")?;
    section.coupling.check()?;
    let grid = grid_of(cfg)?;
    let c = section.coupling;
    let at = |x: f64| -> Result<(Complex64, f64, f64, f64), RunError> {
        let mut d: LicsDetunings = section.detunings;
        match section.scan {
            LicsScan::XL => d.x_l = x,
            LicsScan::XN => d.x_n = x,
            LicsScan::YL => d.y_l = x,
            LicsScan::YN => d.y_n = x,
            LicsScan::ZGm => d.z_gm = x,
            LicsScan::ZMu => d.z_mu = x,
        }
        Ok((
            lics::chi3_ratio(&c, &d)?,
            lics::alpha1_ratio(&c, &d)?,
            lics::alpha_mu_ratio(&c, &d)?,
            lics::fano_window(&c, &d),
        ))
    };
    let rows = par_map(&grid, at)?;
    let mut table = Table::new(&["x", "chi3_re", "chi3_im", "alpha1", "alpha_mu", "fano_window"]);
    for (&x, r) in grid.iter().zip(&rows) {
        table.push(vec![x.into(), r.0.re.into(), r.0.im.into(), r.1.into(), r.2.into(), r.3.into()]);
    }
    let alpha_mu: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let chi3: Vec<f64> = rows.iter().map(|r| r.0.norm()).collect();
    let (mu_at, mu_min) = argmin(&grid, &alpha_mu);
    let (chi_at, chi_max) = argmax(&grid, &chi3);
    let summary = json!({
        "scan": section.scan,
        "points": grid.len(),
        "alpha_mu_min": { "x": mu_at, "value": mu_min },
        "chi3_abs_max": { "x": chi_at, "value": chi_max },
    });
    Ok(Outcome { table, summary, metrics: Metrics::default() })
}

fn gain_runs(v: &[f64]) -> usize {
    let mut count = 0;
    let mut inside = false;
    for &a in v {
        if a < 0.0 && !inside {
            count += 1;
        }
        inside = a < 0.0;
    }
    count
}

fn cascade(cfg: &ScenarioConfig) -> Result<Outcome, RunError> {
    let d = cfg.require(&cfg.cascade, "cascade")?;
    d.check()?;
    let grid = grid_of(cfg)?;
    let coeff = interference_coefficients(d)?;
    let rows = par_map(&grid, |w| -> Result<(f64, f64, f64), RunError> {
        Ok((cascade_alpha(d, w)?, cascade_alpha_wing(d, w)?, f_interference(w, d.gamma, d.gamma1, d.delta)))
    })?;
    let mut table = Table::new(&["omega", "alpha", "alpha_wing", "interference"]);
    for (&w, r) in grid.iter().zip(&rows) {
        table.push(vec![w.into(), r.0.into(), r.1.into(), r.2.into()]);
    }
    let alpha: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let (min_at, min) = argmin(&grid, &alpha);
    let deepest = (-min).max(0.0);
    let summary = json!({
        "points": grid.len(),
        "k": coeff.k,
        "c": coeff.c,
        "prefactor": absorption_prefactor(d.lambda),
        "wing_condition": awi_wing_condition(d)?,
        "center_condition": awi_center_condition(d)?,
        "alpha_min": { "omega": min_at, "value": min },
        "gain_count": gain_runs(&alpha),
    });
    Ok(Outcome {
        table,
        summary,
        metrics: Metrics { window_count: Some(gain_runs(&alpha)), deepest_gain: Some(deepest), ..Metrics::default() },
    })
}

fn fwm(cfg: &ScenarioConfig) -> Result<Outcome, RunError> {
    let base = *cfg.require(&cfg.fwm, "fwm")?;
    base.check()?;
    let grid = grid_of(cfg)?;
    let rows = par_map(&grid, |o2| -> Result<(f64, Complex64, Complex64), RunError> {
        let r = FwmRates { omega2: o2, ..base };
        Ok((r.omega(), fwm_bracket(&r), fwm_coherence(&r)?))
    })?;
    let mut table =
        Table::new(&["omega2", "raman_detuning", "bracket_re", "bracket_im", "coherence_re", "coherence_im"]);
    for (&o2, r) in grid.iter().zip(&rows) {
        table.push(vec![o2.into(), r.0.into(), r.1.re.into(), r.1.im.into(), r.2.re.into(), r.2.im.into()]);
    }
    let deviation: Vec<f64> = rows.iter().map(|r| (r.1 - 1.0).norm()).collect();
    let (dev_at, dev_max) = argmax(&grid, &deviation);
    let amplitude = collision_resonance_amplitude(&base);
    let summary = json!({
        "points": grid.len(),
        "resonance_amplitude": amplitude,
        "resonance_present": amplitude != 0.0,
        "bracket_deviation_max": { "omega2": dev_at, "value": dev_max },
    });
    Ok(Outcome { table, summary, metrics: Metrics::default() })
}

pub fn metrics_cells(m: &Metrics) -> Vec<Cell> {
    vec![
        m.window_count.map_or(Cell::Empty, Cell::from),
        m.deepest_gain.into(),
        m.sum_rule_residual.into(),
        m.power_figure.into(),
        m.f1_min_position.into(),
    ]
}
