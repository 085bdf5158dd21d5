//! Minimal self-contained SVG line charts for sweep results: one series per
//! method, x the swept value, y the mean Kendall tau. No rendering
//! dependencies; the output is deterministic for a fixed result.

use std::fs;
use std::path::Path;

use super::{Method, SweepResult};
use crate::error::Result;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 160.0;
const MARGIN_TOP: f64 = 20.0;
const MARGIN_BOTTOM: f64 = 55.0;

const PALETTE: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

/// Write the chart for a sweep result.
pub fn emit_plot(result: &SweepResult, path: &Path) -> Result<()> {
    fs::write(path, render(result))?;
    Ok(())
}

fn axis_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let finite: Vec<f64> = values.filter(|v| v.is_finite()).collect();
    if finite.is_empty() {
        return (0.0, 1.0);
    }
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

pub(crate) fn render(result: &SweepResult) -> String {
    let mut methods: Vec<Method> = Vec::new();
    for c in &result.cells {
        if !methods.contains(&c.method) {
            methods.push(c.method);
        }
    }

    let (xmin, xmax) = axis_range(result.cells.iter().map(|c| c.grid_value));
    let (ymin, ymax) = axis_range(result.cells.iter().map(|c| c.mean_tau));
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - xmin) / (xmax - xmin) * plot_w;
    let sy = |y: f64| HEIGHT - MARGIN_BOTTOM - (y - ymin) / (ymax - ymin) * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"12\">\n"
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));

    // Axes.
    let x0 = MARGIN_LEFT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    svg.push_str(&format!(
        "  <line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{:.2}\" y2=\"{y0:.2}\" stroke=\"black\"/>\n",
        WIDTH - MARGIN_RIGHT
    ));
    svg.push_str(&format!(
        "  <line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x0:.2}\" y2=\"{MARGIN_TOP:.2}\" stroke=\"black\"/>\n"
    ));

    // Ticks: every distinct grid value when few, else five even steps.
    let mut xticks: Vec<f64> = result.cells.iter().map(|c| c.grid_value).collect();
    xticks.sort_by(f64::total_cmp);
    xticks.dedup();
    if xticks.len() > 8 {
        xticks = (0..5)
            .map(|i| xmin + (xmax - xmin) * i as f64 / 4.0)
            .collect();
    }
    for &x in &xticks {
        let px = sx(x);
        svg.push_str(&format!(
            "  <line x1=\"{px:.2}\" y1=\"{y0:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
            y0 + 5.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{x}</text>\n",
            y0 + 20.0
        ));
    }
    for i in 0..5 {
        let y = ymin + (ymax - ymin) * i as f64 / 4.0;
        let py = sy(y);
        svg.push_str(&format!(
            "  <line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{x0:.2}\" y2=\"{py:.2}\" stroke=\"black\"/>\n",
            x0 - 5.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{y:.2}</text>\n",
            x0 - 8.0,
            py + 4.0
        ));
    }

    // Axis labels.
    svg.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>\n",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 12.0,
        result.parameter
    ));
    svg.push_str(&format!(
        "  <text x=\"16\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2})\">mean kendall tau</text>\n",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    ));

    // One polyline plus markers per method; cells with no successful trials
    // (NaN mean) are skipped.
    for (mi, &method) in methods.iter().enumerate() {
        let color = PALETTE[mi % PALETTE.len()];
        let pts: Vec<(f64, f64)> = result
            .cells
            .iter()
            .filter(|c| c.method == method && c.mean_tau.is_finite())
            .map(|c| (sx(c.grid_value), sy(c.mean_tau)))
            .collect();
        if pts.len() > 1 {
            let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            svg.push_str(&format!(
                "  <polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
                path.join(" ")
            ));
        }
        for (x, y) in &pts {
            svg.push_str(&format!(
                "  <circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"{color}\"/>\n"
            ));
        }
        // Legend entry.
        let ly = MARGIN_TOP + 16.0 + 18.0 * mi as f64;
        svg.push_str(&format!(
            "  <rect x=\"{:.2}\" y=\"{:.2}\" width=\"14\" height=\"4\" fill=\"{color}\"/>\n",
            WIDTH - MARGIN_RIGHT + 12.0,
            ly - 4.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{ly:.2}\">{method}</text>\n",
            WIDTH - MARGIN_RIGHT + 32.0
        ));
    }

    svg.push_str("</svg>\n");
    svg
}
