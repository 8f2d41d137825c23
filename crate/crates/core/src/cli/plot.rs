//! SVG panels, one file per panel: `<scenario>_<panel>.svg`.
//!
//! * barrier-comparison: (a, b) `Q_σ(t)` for the asymmetric and symmetric
//!   barrier, (c, d) total density heatmaps over `(t, i)`.
//! * direction-flip: (a, b) `Q_σ(t)` for each configuration.
//! * alpha-scan: `Q_σ` heatmaps over `(t, α)`; (a, b) spin up and down for the
//!   first configuration, (c, d) for the second.

use std::path::{Path, PathBuf};

use plotters::prelude::*;

use crate::basis::Spin;
use crate::scenarios::{AlphaScan, Run, ScenarioKind, ScenarioOutput};

const SIZE: (u32, u32) = (800, 500);
/// Heatmaps are thinned to at most this many time columns.
const MAX_COLUMNS: usize = 200;
const UP_COLOR: RGBColor = RGBColor(31, 119, 180);
const DN_COLOR: RGBColor = RGBColor(255, 127, 14);

type PlotResult<T> = std::result::Result<T, Box<dyn std::error::Error>>;

fn lerp(a: RGBColor, b: RGBColor, s: f64) -> RGBColor {
    let mix = |x: u8, y: u8| (x as f64 + (y as f64 - x as f64) * s.clamp(0.0, 1.0)).round() as u8;
    RGBColor(mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

/// White to dark blue on `[0, max]`.
fn sequential(v: f64, max: f64) -> RGBColor {
    lerp(WHITE, RGBColor(8, 48, 107), if max > 0.0 { v / max } else { 0.0 })
}

/// Blue through white to red, symmetric about zero.
fn diverging(v: f64, max: f64) -> RGBColor {
    let s = if max > 0.0 { v / max } else { 0.0 };
    if s < 0.0 {
        lerp(WHITE, RGBColor(33, 102, 172), -s)
    } else {
        lerp(WHITE, RGBColor(178, 24, 43), s)
    }
}

fn charge_panel(path: &Path, title: &str, run: &Run) -> PlotResult<()> {
    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE)?;
    let t_max = run.records.last().map_or(1.0, |r| r.t).max(f64::MIN_POSITIVE);
    let q_max =
        run.records.iter().flat_map(|r| [r.charge_up.abs(), r.charge_dn.abs()]).fold(0.0, f64::max).max(1e-3) * 1.1;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 22))
        .margin(15)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(0.0..t_max, -q_max..q_max)?;
    chart.configure_mesh().x_desc("t (1/J)").y_desc("Q").draw()?;
    for (spin, color) in [(Spin::Up, UP_COLOR), (Spin::Down, DN_COLOR)] {
        let name = if spin == Spin::Up { "Q_up" } else { "Q_dn" };
        chart
            .draw_series(LineSeries::new(run.records.iter().map(|r| (r.t, r.charge(spin))), color.stroke_width(2)))?
            .label(name)
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
    }
    chart.configure_series_labels().background_style(WHITE.mix(0.8)).border_style(BLACK).draw()?;
    root.present()?;
    Ok(())
}

fn density_panel(path: &Path, title: &str, run: &Run) -> PlotResult<()> {
    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE)?;
    let sites = run.records.first().map_or(0, |r| r.density.len());
    let stride = run.records.len().div_ceil(MAX_COLUMNS).max(1);
    let dt = run.records.get(1).map_or(1.0, |r| r.t) * stride as f64;
    let t_max = run.records.last().map_or(1.0, |r| r.t) + dt;
    let max = run.records.iter().flat_map(|r| r.density.iter().copied()).fold(0.0, f64::max);
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 22))
        .margin(15)
        .x_label_area_size(40)
        .y_label_area_size(50)
        .build_cartesian_2d(0.0..t_max, 0.5..sites as f64 + 0.5)?;
    chart.configure_mesh().disable_mesh().x_desc("t (1/J)").y_desc("site").draw()?;
    chart.draw_series(run.records.iter().step_by(stride).flat_map(|r| {
        r.density.iter().enumerate().map(move |(i, &n)| {
            let y = i as f64 + 1.0;
            Rectangle::new([(r.t, y - 0.5), (r.t + dt, y + 0.5)], sequential(n, max).filled())
        })
    }))?;
    root.present()?;
    Ok(())
}

fn scan_panel(path: &Path, title: &str, scan: &AlphaScan, spin: Spin) -> PlotResult<()> {
    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE)?;
    let alphas: Vec<f64> = scan.points.iter().map(|p| p.alpha).collect();
    let half = |k: usize| {
        let lo = if k > 0 { (alphas[k] - alphas[k - 1]) / 2.0 } else { f64::INFINITY };
        let hi = if k + 1 < alphas.len() { (alphas[k + 1] - alphas[k]) / 2.0 } else { f64::INFINITY };
        let w = lo.min(hi);
        if w.is_finite() {
            w
        } else {
            0.05
        }
    };
    let len = scan.points.first().map_or(0, |p| p.run.records.len());
    let stride = len.div_ceil(MAX_COLUMNS).max(1);
    let dt = scan.points.first().and_then(|p| p.run.records.get(1)).map_or(1.0, |r| r.t) * stride as f64;
    let t_max = scan.points.first().and_then(|p| p.run.records.last()).map_or(1.0, |r| r.t) + dt;
    let max =
        scan.points.iter().flat_map(|p| p.run.records.iter().map(move |r| r.charge(spin).abs())).fold(0.0, f64::max);
    let a_lo = alphas.first().copied().unwrap_or(0.0) - half(0);
    let a_hi = alphas.last().copied().unwrap_or(1.0) + half(alphas.len().saturating_sub(1));
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 22))
        .margin(15)
        .x_label_area_size(40)
        .y_label_area_size(50)
        .build_cartesian_2d(0.0..t_max, a_lo..a_hi)?;
    chart.configure_mesh().disable_mesh().x_desc("t (1/J)").y_desc("alpha").draw()?;
    chart.draw_series(scan.points.iter().enumerate().flat_map(|(k, p)| {
        let w = half(k);
        p.run.records.iter().step_by(stride).map(move |r| {
            Rectangle::new([(r.t, p.alpha - w), (r.t + dt, p.alpha + w)], diverging(r.charge(spin), max).filled())
        })
    }))?;
    root.present()?;
    Ok(())
}

/// Draws every panel of a scenario into `dir`; returns the files written.
pub fn emit_plots(dir: &Path, kind: ScenarioKind, output: &ScenarioOutput) -> PlotResult<Vec<PathBuf>> {
    let file = |panel: &str| dir.join(format!("{}_{panel}.svg", kind.name()));
    let mut written = Vec::new();
    match output {
        ScenarioOutput::BarrierComparison(c) => {
            let asym = format!("alpha = {}", c.asymmetric.alpha);
            let sym = format!("alpha = {}", c.symmetric.alpha);
            let panels: [(&str, String, &Run, bool); 4] = [
                ("a", format!("(a) transferred charge, {asym}"), &c.asymmetric, false),
                ("b", format!("(b) transferred charge, {sym}"), &c.symmetric, false),
                ("c", format!("(c) site density, {asym}"), &c.asymmetric, true),
                ("d", format!("(d) site density, {sym}"), &c.symmetric, true),
            ];
            for (panel, title, run, density) in panels {
                let path = file(panel);
                if density {
                    density_panel(&path, &title, run)?;
                } else {
                    charge_panel(&path, &title, run)?;
                }
                written.push(path);
            }
        }
        ScenarioOutput::DirectionFlip(runs) => {
            for (run, panel) in runs.iter().zip(["a", "b", "c", "d"]) {
                let path = file(panel);
                charge_panel(&path, &format!("({panel}) config {}, alpha = {}", run.label, run.alpha), run)?;
                written.push(path);
            }
        }
        ScenarioOutput::AlphaScan(scans) => {
            let panels = ["a", "b", "c", "d"];
            for (k, scan) in scans.iter().enumerate() {
                for (j, spin) in Spin::BOTH.into_iter().enumerate() {
                    let panel = panels[(2 * k + j) % 4];
                    let path = file(panel);
                    let title = format!("({panel}) config {}, Q_{}", scan.config, spin.label());
                    scan_panel(&path, &title, scan, spin)?;
                    written.push(path);
                }
            }
        }
        ScenarioOutput::Custom(run) => {
            for (panel, density) in [("a", false), ("b", true)] {
                let path = file(panel);
                if density {
                    density_panel(&path, "(b) site density", run)?;
                } else {
                    charge_panel(&path, "(a) transferred charge", run)?;
                }
                written.push(path);
            }
        }
    }
    Ok(written)
}
