//! Minimal deterministic SVG charts.
//!
//! Output is a pure function of the input data: coordinates are formatted
//! with fixed precision, there are no timestamps or random identifiers, and
//! panels lay out on a fixed grid. That keeps plot artifacts byte-identical
//! across reruns, which the pipeline's idempotence contract requires.

use std::fmt::Write as _;

/// Line/area colors shared across charts (one per topic when stacked).
pub const PALETTE: [&str; 8] = [
    "#4269d0", "#efb118", "#ff725c", "#6cc5b0", "#3ca951", "#ff8ab7", "#a463f2", "#97bbf5",
];

pub const POSITIVE_COLOR: &str = "#3ca951";
pub const NEGATIVE_COLOR: &str = "#ff725c";
pub const ACCENT_COLOR: &str = "#4269d0";
pub const MUTED_COLOR: &str = "#9498a0";

/// One drawable layer of a panel, in paint order.
pub enum Element {
    /// Filled region between two polylines sharing an x grid.
    Band {
        lower: Vec<(f64, f64)>,
        upper: Vec<(f64, f64)>,
        color: &'static str,
        opacity: f64,
    },
    Line {
        points: Vec<(f64, f64)>,
        color: &'static str,
        dashed: bool,
        width: f64,
    },
    Markers {
        points: Vec<(f64, f64)>,
        color: &'static str,
        radius: f64,
    },
}

impl Element {
    fn points(&self) -> Box<dyn Iterator<Item = (f64, f64)> + '_> {
        match self {
            Element::Band { lower, upper, .. } => {
                Box::new(lower.iter().chain(upper.iter()).copied())
            }
            Element::Line { points, .. } | Element::Markers { points, .. } => {
                Box::new(points.iter().copied())
            }
        }
    }
}

/// One chart: axes, layers, and an optional legend.
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub elements: Vec<Element>,
    /// (label, color) pairs drawn top-right, in order.
    pub legend: Vec<(String, &'static str)>,
}

const MARGIN_LEFT: f64 = 58.0;
const MARGIN_RIGHT: f64 = 14.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 44.0;

/// Renders panels on a `cols`-wide grid into a standalone SVG document.
pub fn render(panels: &[Panel], cols: usize, panel_w: f64, panel_h: f64) -> String {
    let cols = cols.max(1);
    let rows = panels.len().div_ceil(cols);
    let total_w = panel_w * cols as f64;
    let total_h = panel_h * rows.max(1) as f64;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{total_w:.2}\" height=\"{total_h:.2}\" \
         viewBox=\"0 0 {total_w:.2} {total_h:.2}\" font-family=\"Helvetica,Arial,sans-serif\">"
    );
    let _ = writeln!(
        svg,
        "<rect width=\"{total_w:.2}\" height=\"{total_h:.2}\" fill=\"#ffffff\"/>"
    );
    for (i, panel) in panels.iter().enumerate() {
        let x0 = (i % cols) as f64 * panel_w;
        let y0 = (i / cols) as f64 * panel_h;
        let _ = writeln!(svg, "<g transform=\"translate({x0:.2},{y0:.2})\">");
        render_panel(&mut svg, panel, panel_w, panel_h);
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    svg
}

fn render_panel(svg: &mut String, panel: &Panel, w: f64, h: f64) {
    let (x_range, y_range) = data_ranges(panel);
    let plot_w = w - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = h - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - x_range.0) / (x_range.1 - x_range.0) * plot_w;
    let sy = |y: f64| MARGIN_TOP + (y_range.1 - y) / (y_range.1 - y_range.0) * plot_h;

    let (x_step, x_ticks) = nice_ticks(x_range.0, x_range.1, 6);
    let (y_step, y_ticks) = nice_ticks(y_range.0, y_range.1, 5);

    // Horizontal gridlines behind the data.
    for &t in &y_ticks {
        let y = sy(t);
        let _ = writeln!(
            svg,
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#e3e5e8\" stroke-width=\"1\"/>",
            MARGIN_LEFT,
            w - MARGIN_RIGHT
        );
    }

    for element in &panel.elements {
        match element {
            Element::Band {
                lower,
                upper,
                color,
                opacity,
            } => {
                if lower.len() < 2 || lower.len() != upper.len() {
                    continue;
                }
                let mut d = String::new();
                for (i, &(x, y)) in lower.iter().enumerate() {
                    let cmd = if i == 0 { 'M' } else { 'L' };
                    let _ = write!(d, "{cmd}{:.2},{:.2} ", sx(x), sy(y));
                }
                for &(x, y) in upper.iter().rev() {
                    let _ = write!(d, "L{:.2},{:.2} ", sx(x), sy(y));
                }
                d.push('Z');
                let _ = writeln!(
                    svg,
                    "<path d=\"{d}\" fill=\"{color}\" fill-opacity=\"{opacity:.2}\" stroke=\"none\"/>"
                );
            }
            Element::Line {
                points,
                color,
                dashed,
                width,
            } => {
                if points.len() < 2 {
                    for &(x, y) in points {
                        let _ = writeln!(
                            svg,
                            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.50\" fill=\"{color}\"/>",
                            sx(x),
                            sy(y)
                        );
                    }
                    continue;
                }
                let dash = if *dashed {
                    " stroke-dasharray=\"5 3\""
                } else {
                    ""
                };
                let mut pts = String::new();
                for &(x, y) in points {
                    let _ = write!(pts, "{:.2},{:.2} ", sx(x), sy(y));
                }
                let _ = writeln!(
                    svg,
                    "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"{width:.2}\"{dash} points=\"{}\"/>",
                    pts.trim_end()
                );
            }
            Element::Markers {
                points,
                color,
                radius,
            } => {
                for &(x, y) in points {
                    let _ = writeln!(
                        svg,
                        "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{radius:.2}\" fill=\"{color}\"/>",
                        sx(x),
                        sy(y)
                    );
                }
            }
        }
    }

    // Axes.
    let _ = writeln!(
        svg,
        "<line x1=\"{l:.2}\" y1=\"{b:.2}\" x2=\"{r:.2}\" y2=\"{b:.2}\" stroke=\"#444444\" stroke-width=\"1\"/>",
        l = MARGIN_LEFT,
        r = w - MARGIN_RIGHT,
        b = h - MARGIN_BOTTOM
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{l:.2}\" y1=\"{t:.2}\" x2=\"{l:.2}\" y2=\"{b:.2}\" stroke=\"#444444\" stroke-width=\"1\"/>",
        l = MARGIN_LEFT,
        t = MARGIN_TOP,
        b = h - MARGIN_BOTTOM
    );

    for &t in &x_ticks {
        let x = sx(t);
        let y = h - MARGIN_BOTTOM;
        let _ = writeln!(
            svg,
            "<line x1=\"{x:.2}\" y1=\"{y:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#444444\" stroke-width=\"1\"/>",
            y + 4.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{x:.2}\" y=\"{:.2}\" font-size=\"10\" fill=\"#333333\" text-anchor=\"middle\">{}</text>",
            y + 16.0,
            fmt_tick(t, x_step)
        );
    }
    for &t in &y_ticks {
        let y = sy(t);
        let _ = writeln!(
            svg,
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{l:.2}\" y2=\"{y:.2}\" stroke=\"#444444\" stroke-width=\"1\"/>",
            MARGIN_LEFT - 4.0,
            l = MARGIN_LEFT
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\" fill=\"#333333\" text-anchor=\"end\">{}</text>",
            MARGIN_LEFT - 7.0,
            y + 3.5,
            fmt_tick(t, y_step)
        );
    }

    // Title and axis labels.
    let _ = writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"18.00\" font-size=\"13\" fill=\"#111111\" text-anchor=\"middle\">{}</text>",
        w / 2.0,
        escape(&panel.title)
    );
    let _ = writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" fill=\"#333333\" text-anchor=\"middle\">{}</text>",
        MARGIN_LEFT + plot_w / 2.0,
        h - 10.0,
        escape(&panel.x_label)
    );
    let _ = writeln!(
        svg,
        "<text x=\"14.00\" y=\"{:.2}\" font-size=\"11\" fill=\"#333333\" text-anchor=\"middle\" \
         transform=\"rotate(-90 14.00 {0:.2})\">{1}</text>",
        MARGIN_TOP + plot_h / 2.0,
        escape(&panel.y_label)
    );

    // Legend, top-right inside the plot area.
    for (i, (label, color)) in panel.legend.iter().enumerate() {
        let y = MARGIN_TOP + 12.0 + i as f64 * 14.0;
        let x1 = w - MARGIN_RIGHT - 130.0;
        let _ = writeln!(
            svg,
            "<line x1=\"{x1:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"{color}\" stroke-width=\"3\"/>",
            x1 + 16.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\" fill=\"#333333\">{}</text>",
            x1 + 21.0,
            y + 3.5,
            escape(label)
        );
    }
}

/// Data spans with padding; degenerate spans widen so scales stay finite.
fn data_ranges(panel: &Panel) -> ((f64, f64), (f64, f64)) {
    let mut x = (f64::INFINITY, f64::NEG_INFINITY);
    let mut y = (f64::INFINITY, f64::NEG_INFINITY);
    for element in &panel.elements {
        for (px, py) in element.points() {
            if px.is_finite() {
                x = (x.0.min(px), x.1.max(px));
            }
            if py.is_finite() {
                y = (y.0.min(py), y.1.max(py));
            }
        }
    }
    if !x.0.is_finite() {
        x = (0.0, 1.0);
    }
    if !y.0.is_finite() {
        y = (0.0, 1.0);
    }
    if x.0 == x.1 {
        x = (x.0 - 0.5, x.1 + 0.5);
    }
    if y.0 == y.1 {
        y = (y.0 - 0.5, y.1 + 0.5);
    }
    let pad = (y.1 - y.0) * 0.06;
    ((x.0, x.1), (y.0 - pad, y.1 + pad))
}

/// Tick positions on a 1/2/5 × 10^k step covering [min, max].
fn nice_ticks(min: f64, max: f64, target: usize) -> (f64, Vec<f64>) {
    let raw = (max - min) / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|s| raw <= *s)
        .unwrap_or(10.0 * mag);
    let mut ticks = Vec::new();
    let mut t = (min / step).ceil() * step;
    while t <= max + step * 1e-9 {
        // Snap values like 1979.9999999 back onto the grid.
        let snapped = (t / step).round() * step;
        ticks.push(if snapped == 0.0 { 0.0 } else { snapped });
        t += step;
    }
    (step, ticks)
}

fn fmt_tick(value: f64, step: f64) -> String {
    if step >= 1.0 {
        format!("{value:.0}")
    } else {
        let decimals = (-step.log10().floor()) as usize;
        format!("{value:.decimals$}")
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
