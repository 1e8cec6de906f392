//! Parameter sweeps over one or two axes, tabulating classifier output and,
//! optionally, a short simulation per grid point.

use crate::config::{Scenario, SweepAxis};
use crate::run::{classify_scenario, prepare, RunError};
use expanse_core::classifier::thresholds;
use expanse_core::solver::FieldState;
use num_complex::Complex64;
use rayon::prelude::*;
use std::fmt::Write as _;

pub const DEFAULT_MAX_POINTS: usize = 10_000;
pub const SWEEPABLE: [&str; 5] = ["p", "sigma", "a1", "omega", "lambda"];

fn axis_values(sc: &Scenario, name: &str, axis: &SweepAxis) -> Result<Vec<f64>, RunError> {
    if !SWEEPABLE.contains(&axis.param.as_str()) {
        return Err(sc
            .field_error(
                &format!("sweep.{name}.param"),
                format!("`{}` is not one of {}", axis.param, SWEEPABLE.join(", ")),
            )
            .into());
    }
    match (&axis.values, &axis.linspace) {
        (Some(v), None) => Ok(v.iter().map(|x| x.0).collect()),
        (None, Some((a, b, count))) => Ok(match *count {
            0 => Vec::new(),
            1 => vec![a.0],
            c => (0..c).map(|i| a.0 + (b.0 - a.0) * i as f64 / (c - 1) as f64).collect(),
        }),
        _ => Err(sc
            .field_error(
                &format!("sweep.{name}"),
                "give exactly one of `values` or `linspace`",
            )
            .into()),
    }
}

fn set_param(sc: &mut Scenario, param: &str, v: f64) {
    match param {
        "p" => sc.spec.p = v,
        "sigma" => sc.spec.sigma = v,
        "a1" => sc.spec.a1 = v,
        "omega" => sc.spec.omega = v,
        "lambda" => sc.spec.lambda = Complex64::new(v, 0.0),
        _ => unreachable!("axis names are checked beforehand"),
    }
}

fn row(sc: &Scenario, simulate: bool) -> Vec<String> {
    let t = thresholds(&sc.spec.problem());
    let opt = |v: Option<f64>| v.map_or("none".to_string(), |x| format!("{x}"));
    let mut cols = vec![
        format!("{}", t.p_crit),
        opt(t.p1_crit),
        t.p0_crit.to_string(),
        t.q_mu0.map_or("none".into(), |q| q.to_string()),
        t.t0.to_string(),
        t.s0.to_string(),
    ];
    match classify_scenario(sc) {
        Ok(r) => cols.extend([
            r.theorem1.local_wellposed.to_string(),
            r.fired_label(),
            r.corollary_label(),
            r.a_full_window.map_or("none".into(), |a| a.to_string()),
        ]),
        Err(RunError::Rejected { .. }) => {
            cols.extend(["false", "rejected", "none", "none"].map(String::from))
        }
        Err(_) => cols.extend(["false", "error", "none", "none"].map(String::from)),
    }
    if simulate {
        cols.extend(match simulate_point(sc) {
            Ok((status, s)) => [status, format!("{s:.16e}")],
            Err(RunError::Rejected { .. }) => ["rejected".into(), "nan".into()],
            Err(_) => ["error".into(), "nan".into()],
        });
    }
    cols
}

fn simulate_point(sc: &Scenario) -> Result<(String, f64), RunError> {
    let prep = prepare(sc, None)?;
    let mut state = FieldState::new(prep.grid, prep.u0)?;
    let summary = prep.solver.evolve(&mut state, prep.s_end, |_| {})?;
    Ok((summary.status.label().to_string(), summary.s_final))
}

/// Builds the sweep table as tab-separated text. An empty axis yields a
/// header-only table.
pub fn sweep_table(sc: &Scenario) -> Result<String, RunError> {
    let sw = sc
        .sweep
        .as_ref()
        .ok_or_else(|| sc.field_error("sweep", "missing [sweep] table"))?;
    let x = sw
        .x
        .as_ref()
        .ok_or_else(|| sc.field_error("sweep.x", "missing x axis"))?;
    let xs = axis_values(sc, "x", x)?;
    let (y_name, ys) = match &sw.y {
        Some(y) => (Some(y.param.clone()), Some(axis_values(sc, "y", y)?)),
        None => (None, None),
    };
    let cap = sw.max_points.unwrap_or(DEFAULT_MAX_POINTS);
    let total = xs.len() * ys.as_ref().map_or(1, Vec::len);
    if total > cap {
        return Err(sc
            .field_error("sweep", format!("{total} points exceed the cap of {cap}"))
            .into());
    }

    let mut points: Vec<Vec<f64>> = Vec::with_capacity(total);
    for &xv in &xs {
        match &ys {
            Some(ys) => points.extend(ys.iter().map(|&yv| vec![xv, yv])),
            None => points.push(vec![xv]),
        }
    }
    let mut header: Vec<String> = vec![x.param.clone()];
    header.extend(y_name.clone());
    header.extend(
        ["p_crit", "p1_crit", "p0_crit", "q_mu0", "T0", "S0", "local_wellposed", "fired_condition", "corollary", "A_inf"]
            .map(String::from),
    );
    if sw.simulate {
        header.extend(["status", "s_final"].map(String::from));
    }
    let params: Vec<String> = std::iter::once(x.param.clone()).chain(y_name).collect();
    let rows: Vec<Vec<String>> = points
        .par_iter()
        .map(|pt| {
            let mut local = sc.clone();
            for (name, &v) in params.iter().zip(pt) {
                set_param(&mut local, name, v);
            }
            let mut cols: Vec<String> = pt.iter().map(|v| format!("{v}")).collect();
            cols.extend(row(&local, sw.simulate));
            cols
        })
        .collect();

    let mut out = header.join("\t");
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{}", r.join("\t"));
    }
    Ok(out)
}
