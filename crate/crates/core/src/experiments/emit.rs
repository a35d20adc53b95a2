use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::ExperimentReport;
use crate::{Error, Result};

pub const CSV_HEADER: &str = "n,statistic,empirical,target,se,z,runtime_ms";

/// CSV text; with `runtime` false the last column is left empty.
pub fn render_csv(report: &ExperimentReport, runtime: bool) -> Result<String> {
    if report.rows.is_empty() {
        return Err(Error::Precondition("empty report".into()));
    }
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in &report.rows {
        write!(s, "{},{},{:e},{:e},{:e},{:e},", r.n, r.statistic.replace(',', ";"), r.empirical, r.target, r.se, r.z).unwrap();
        if runtime {
            write!(s, "{}", r.runtime_ms).unwrap();
        }
        s.push('\n');
    }
    Ok(s)
}

/// Log-log plot of |empirical − target| against n, one series per statistic.
pub fn render_svg(report: &ExperimentReport) -> Result<String> {
    if report.rows.is_empty() {
        return Err(Error::Precondition("empty report".into()));
    }
    let mut series: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    for r in &report.rows {
        let resid = (r.empirical - r.target).abs();
        let y = if resid.is_finite() && resid > 0.0 { resid } else { 1e-16 };
        series.entry(&r.statistic).or_default().push(((r.n as f64).log10(), y.log10()));
    }
    let pts = series.values().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 - x0 < 1e-9 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-9 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let (w, h, pad) = (640.0, 420.0, 60.0);
    let sx = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);
    let palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"];
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#).unwrap();
    writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<path d="M{pad} {pad} V{} H{}" stroke="black" fill="none"/>"#,
        h - pad,
        w - pad
    )
    .unwrap();
    writeln!(s, r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">log10 n</text>"#, w / 2.0, h - 15.0).unwrap();
    writeln!(s, r#"<text x="15" y="{}" font-size="12" transform="rotate(-90 15 {})" text-anchor="middle">log10 |empirical - target|</text>"#, h / 2.0, h / 2.0).unwrap();
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = palette[i % palette.len()];
        let d: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        writeln!(s, r#"<g class="series" data-statistic="{name}">"#).unwrap();
        writeln!(s, r#"<polyline points="{}" stroke="{color}" fill="none"/>"#, d.join(" ")).unwrap();
        for &(x, y) in pts {
            writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, sx(x), sy(y)).unwrap();
        }
        writeln!(s, r#"<text x="{}" y="{}" font-size="11" fill="{color}">{name}</text>"#, w - pad + 5.0 - 120.0, pad + 14.0 * i as f64).unwrap();
        writeln!(s, "</g>").unwrap();
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Writes `<dir>/<stem>.csv` and `<dir>/<stem>.svg`.
pub fn emit(report: &ExperimentReport, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
    let csv = render_csv(report, true)?;
    let svg = render_svg(report)?;
    std::fs::create_dir_all(dir)?;
    let (a, b) = (dir.join(format!("{stem}.csv")), dir.join(format!("{stem}.svg")));
    std::fs::write(&a, csv)?;
    std::fs::write(&b, svg)?;
    Ok((a, b))
}
