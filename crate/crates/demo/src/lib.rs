//! Browser bindings for the closed-form models. Each export returns text the
//! page drops straight into the DOM: an SVG chart or a CSV table.

use std::fmt::Write as _;

use rowswap::analytic::{juggernaut, outlier_time, storage_comparison, sweep_rounds};
use rowswap::report::{self, human};
use rowswap::{AttackPlan, DefenseConfig, DefenseKind, DramGeometry, TimingParams};
use wasm_bindgen::prelude::*;

fn timing(ddr5: bool) -> TimingParams {
    if ddr5 {
        TimingParams::ddr5()
    } else {
        TimingParams::ddr4()
    }
}

/// Attack time against bias rounds for RRS, with SRS as a flat reference.
/// Returns the SVG, a newline, then a one-line summary.
pub fn attack_curve_text(t_rh: u32, swap_rate: u32, n_max: u32, ddr5: bool) -> Result<String, String> {
    let t = timing(ddr5);
    let g = DramGeometry::ddr4();
    let rrs = DefenseConfig::with_swap_rate(DefenseKind::Rrs, t_rh, swap_rate).map_err(|e| e.to_string())?;
    let srs = DefenseConfig { kind: DefenseKind::Srs, ..rrs };
    let sweep = sweep_rounds(&t, &g, &rrs, u64::from(n_max)).map_err(|e| e.to_string())?;
    let pts: Vec<(f64, f64)> = sweep.feasible().map(|x| (x.rounds as f64, x.at_time)).collect();
    let mut series = vec![("RRS".to_string(), pts)];
    let mut summary = match sweep.argmin() {
        Some(b) => format!("RRS breaks in {} at N={} (k={}, G={})", human(b.at_time), b.rounds, b.k, b.guesses),
        None => format!("no feasible N up to {n_max}"),
    };
    if let Ok(s) = juggernaut(&t, &g, &srs, &AttackPlan::juggernaut(0)) {
        let last = sweep.feasibility_limit().unwrap_or(u64::from(n_max)) as f64;
        series.push(("SRS".to_string(), vec![(0.0, s.at_time), (last, s.at_time)]));
        write!(summary, "; SRS holds for {}", human(s.at_time)).unwrap();
    }
    let title = format!("T_RH={t_rh}, T_S={}", rrs.t_s);
    Ok(format!("{}\n{summary}", report::attack_time_chart(&title, &series).trim_end()))
}

/// Scale-SRS outlier horizons for m = 1..=m_max rows, as CSV.
pub fn outlier_table_text(t_rh: u32, swap_rate: u32, m_max: u32, ddr5: bool) -> Result<String, String> {
    let t = timing(ddr5);
    let g = DramGeometry::ddr4();
    let cfg = DefenseConfig::with_swap_rate(DefenseKind::ScaleSrs, t_rh, swap_rate).map_err(|e| e.to_string())?;
    let k = u64::from(cfg.outlier_swap_limit);
    let rows = (1..=u64::from(m_max.max(1)))
        .map(|m| outlier_time(&t, &g, &cfg, k, m))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    // readable horizon appended as a last column
    let mut out = String::new();
    for (i, line) in report::outliers_csv(&rows).lines().enumerate() {
        let extra = if i == 0 { "every".to_string() } else { human(rows[i - 1].time_to_appear) };
        writeln!(out, "{line},{extra}").unwrap();
    }
    Ok(out)
}

/// Per-structure storage of RRS against Scale-SRS, as CSV.
pub fn storage_table_text(t_rh: u32, ddr5: bool) -> Result<String, String> {
    let (rrs, scale) = storage_comparison(&timing(ddr5), t_rh).map_err(|e| e.to_string())?;
    Ok(report::storage_csv(&rrs, &scale))
}

#[wasm_bindgen]
pub fn attack_curve(t_rh: u32, swap_rate: u32, n_max: u32, ddr5: bool) -> Result<String, JsError> {
    attack_curve_text(t_rh, swap_rate, n_max, ddr5).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn outlier_table(t_rh: u32, swap_rate: u32, m_max: u32, ddr5: bool) -> Result<String, JsError> {
    outlier_table_text(t_rh, swap_rate, m_max, ddr5).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn storage_table(t_rh: u32, ddr5: bool) -> Result<String, JsError> {
    storage_table_text(t_rh, ddr5).map_err(|e| JsError::new(&e))
}
