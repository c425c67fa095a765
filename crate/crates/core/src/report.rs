//! CSV tables and SVG charts.
//!
//! Floats are written with Rust's shortest round-trip formatting, so output
//! is byte-stable across runs and platforms.

use std::fmt::Write as _;

use crate::analytic::{AnalyticError, AttackAnalysis, OutlierAnalysis, StorageReport};
use crate::engine::EpochReport;
use crate::montecarlo::McPoint;

pub const ANALYZE_HEADER: &str = "n,k,g,p_success,at_time_s";
pub const OUTLIERS_HEADER: &str = "k_swaps,m,guesses,expected_rows_k,p_m,time_to_appear_s";
pub const MONTECARLO_HEADER: &str = "n,analytic_s,mc_mean_s,mc_p50_s,mc_p90_s,mc_p99_s,iterations,seed";
pub const STORAGE_HEADER: &str = "structure,rrs_bits,rrs_bytes,scale_srs_bits,scale_srs_bytes,ratio";
pub const SIMULATE_HEADER: &str = "seed,epoch,max_physical_acts,hottest_row,breached,swaps,unswap_swaps,pins,\
evictions,place_back_steps,place_back_burst,deferred_place_backs,demand_acts,latent_acts,absorbed_acts,counter_acts,\
failed_mitigations,guesses,bias_acts,act_time_ns,overhead_time_ns,idle_time_ns,overrun_time_ns";

fn num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:e}")
    }
}

/// One row per N. Infeasible N keep their k and G with `p_success = 0`
/// and `at_time_s = inf`.
pub fn analyze_csv(points: &[(u64, Result<AttackAnalysis, AnalyticError>)]) -> String {
    let mut out = String::from(ANALYZE_HEADER);
    out.push('\n');
    for (n, r) in points {
        match r {
            Ok(a) => writeln!(out, "{n},{},{},{},{}", a.k, a.guesses, num(a.p_success), num(a.at_time)),
            Err(AnalyticError::Infeasible { k, guesses, .. }) => writeln!(out, "{n},{k},{guesses},0,inf"),
            Err(_) => continue,
        }
        .unwrap();
    }
    out
}

pub fn outliers_csv(rows: &[OutlierAnalysis]) -> String {
    let mut out = String::from(OUTLIERS_HEADER);
    out.push('\n');
    for o in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            o.k_swaps,
            o.m,
            o.guesses,
            num(o.expected_rows_k),
            num(o.p_m),
            num(o.time_to_appear)
        )
        .unwrap();
    }
    out
}

pub fn montecarlo_csv(points: &[McPoint]) -> String {
    let mut out = String::from(MONTECARLO_HEADER);
    out.push('\n');
    for p in points {
        let r = &p.run;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            p.n,
            num(p.analytic.at_time),
            num(r.mean_s),
            num(r.p50_s),
            num(r.p90_s),
            num(r.p99_s),
            r.iterations,
            r.master_seed
        )
        .unwrap();
    }
    out
}

/// Structure-by-structure comparison with a closing `total` row. `ratio` is
/// RRS over Scale-SRS, empty where Scale-SRS needs nothing.
pub fn storage_csv(rrs: &StorageReport, scale: &StorageReport) -> String {
    let mut out = String::from(STORAGE_HEADER);
    out.push('\n');
    let mut line = |name: &str, a: u64, b: u64| {
        let ratio = if b == 0 { String::new() } else { format!("{:.4}", a as f64 / b as f64) };
        writeln!(out, "{name},{a},{},{b},{},{ratio}", a.div_ceil(8), b.div_ceil(8)).unwrap();
    };
    for row in &rrs.rows {
        line(row.structure, row.bits, scale.bits_of(row.structure));
    }
    line("total", rrs.total_bits(), scale.total_bits());
    out
}

pub fn simulate_csv(runs: &[(u64, Vec<EpochReport>)]) -> String {
    let mut out = String::from(SIMULATE_HEADER);
    out.push('\n');
    for (seed, reports) in runs {
        for (e, r) in reports.iter().enumerate() {
            writeln!(
                out,
                "{seed},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                e + 1,
                r.max_physical_acts,
                r.hottest_row,
                r.breached,
                r.swaps,
                r.unswap_swaps,
                r.pins,
                r.evictions,
                r.place_back_steps,
                r.place_back_burst,
                r.deferred_place_backs,
                r.demand_acts,
                r.latent_acts,
                r.absorbed_acts,
                r.counter_acts,
                r.failed_mitigations,
                r.guesses,
                r.bias_acts.map(|b| b.to_string()).unwrap_or_default(),
                r.act_time.as_nanos(),
                r.overhead_time.as_nanos(),
                r.idle_time.as_nanos(),
                r.overrun_time.as_nanos()
            )
            .unwrap();
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// Line chart with a log-scale y axis. Points with non-positive or
/// non-finite y break the line.
#[derive(Debug, Clone, PartialEq)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Labelled horizontal reference lines, in y units.
    pub markers: Vec<(f64, String)>,
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const W: f64 = 800.0;
const H: f64 = 480.0;
const ML: f64 = 80.0;
const MR: f64 = 150.0;
const MT: f64 = 40.0;
const MB: f64 = 56.0;

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    mag * if f <= 1.0 {
        1.0
    } else if f <= 2.0 {
        2.0
    } else if f <= 5.0 {
        5.0
    } else {
        10.0
    }
}

impl LineChart {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            series: Vec::new(),
            markers: Vec::new(),
        }
    }

    pub fn series(mut self, name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        self.series.push(Series { name: name.into(), points });
        self
    }

    pub fn marker(mut self, y: f64, label: impl Into<String>) -> Self {
        self.markers.push((y, label.into()));
        self
    }

    fn usable(p: &(f64, f64)) -> bool {
        p.0.is_finite() && p.1.is_finite() && p.1 > 0.0
    }

    pub fn render(&self) -> String {
        let pts = self.series.iter().flat_map(|s| s.points.iter()).filter(|p| Self::usable(p));
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (0.0, 1.0, 1.0, 10.0);
        }
        if x1 <= x0 {
            x1 = x0 + 1.0;
        }
        let (ly0, mut ly1) = (y0.log10().floor(), y1.log10().ceil());
        if ly1 <= ly0 {
            ly1 = ly0 + 1.0;
        }
        let pw = W - ML - MR;
        let ph = H - MT - MB;
        let sx = |x: f64| ML + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| MT + ph - (y.log10() - ly0) / (ly1 - ly0) * ph;

        let mut s = String::new();
        writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        )
        .unwrap();
        writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
        writeln!(
            s,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            ML + pw / 2.0,
            esc(&self.title)
        )
        .unwrap();

        // y decades
        let decade_stride = ((ly1 - ly0) / 10.0).ceil().max(1.0) as i64;
        let mut d = ly0 as i64;
        while d as f64 <= ly1 {
            let y = sy(10f64.powi(d as i32));
            writeln!(s, r##"<line x1="{ML}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e0e0e0"/>"##, ML + pw).unwrap();
            writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{d}</text>"#, ML - 6.0, y + 4.0).unwrap();
            d += decade_stride;
        }
        // x ticks
        let step = nice_step(x1 - x0);
        let mut x = (x0 / step).ceil() * step;
        while x <= x1 + step * 1e-9 {
            let px = sx(x);
            writeln!(s, r##"<line x1="{px:.2}" y1="{MT}" x2="{px:.2}" y2="{:.2}" stroke="#f0f0f0"/>"##, MT + ph)
                .unwrap();
            writeln!(s, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, MT + ph + 18.0, x).unwrap();
            x += step;
        }
        writeln!(s, r##"<rect x="{ML}" y="{MT}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##).unwrap();
        writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            ML + pw / 2.0,
            H - 14.0,
            esc(&self.x_label)
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
            MT + ph / 2.0,
            MT + ph / 2.0,
            esc(&self.y_label)
        )
        .unwrap();

        for (y, label) in &self.markers {
            if y.is_nan() || *y <= 0.0 || y.log10() < ly0 || y.log10() > ly1 {
                continue;
            }
            let py = sy(*y);
            writeln!(
                s,
                r##"<line x1="{ML}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#888" stroke-dasharray="4 3"/>"##,
                ML + pw
            )
            .unwrap();
            writeln!(s, r##"<text x="{:.2}" y="{:.2}" fill="#555">{}</text>"##, ML + pw + 4.0, py + 4.0, esc(label))
                .unwrap();
        }

        for (i, series) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let mut segment: Vec<String> = Vec::new();
            let flush = |seg: &mut Vec<String>, s: &mut String| {
                if !seg.is_empty() {
                    writeln!(
                        s,
                        r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                        seg.join(" ")
                    )
                    .unwrap();
                    seg.clear();
                }
            };
            for p in &series.points {
                if Self::usable(p) {
                    segment.push(format!("{:.2},{:.2}", sx(p.0), sy(p.1)));
                } else {
                    flush(&mut segment, &mut s);
                }
            }
            flush(&mut segment, &mut s);
            let ly = MT + 16.0 + 18.0 * i as f64;
            writeln!(
                s,
                r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
                ML + pw + 10.0,
                ML + pw + 30.0
            )
            .unwrap();
            writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, ML + pw + 34.0, ly + 4.0, esc(&series.name)).unwrap();
        }
        s.push_str("</svg>\n");
        s
    }
}

/// Seconds in the largest unit that keeps the value at least 1.
pub fn human(secs: f64) -> String {
    if !secs.is_finite() {
        return "never".into();
    }
    let units = [
        (crate::analytic::SECONDS_PER_YEAR, "y"),
        (86_400.0, "d"),
        (3600.0, "h"),
        (60.0, "min"),
        (1.0, "s"),
        (1e-3, "ms"),
        (1e-6, "µs"),
    ];
    for (scale, unit) in units {
        if secs >= scale {
            return format!("{:.3} {unit}", secs / scale);
        }
    }
    format!("{secs:e} s")
}

/// Attack time (seconds) against N, with hour/day/year markers.
pub fn attack_time_chart(title: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let mut c = LineChart::new(title, "rounds N", "attack time (s)")
        .marker(3600.0, "1 hour")
        .marker(86400.0, "1 day")
        .marker(crate::analytic::SECONDS_PER_YEAR, "1 year");
    for (name, pts) in series {
        c = c.series(name.clone(), pts.clone());
    }
    c.render()
}
