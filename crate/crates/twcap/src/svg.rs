//! Minimal SVG rendering of rate-region frontiers. Presentational output
//! only; the CSV files are the machine-readable artifacts.

use std::fmt::Write;

use crate::frontier::Frontier;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 30.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 60.0;

pub(crate) struct Series<'a> {
    pub name: &'a str,
    pub color: &'a str,
    pub dashed: bool,
    pub frontier: &'a Frontier,
}

/// Renders labeled frontiers into a fixed 800x600 viewbox.
pub(crate) fn render(series: &[Series<'_>]) -> String {
    let mut xmax = 0.0f64;
    let mut ymax = 0.0f64;
    for s in series {
        xmax = xmax.max(s.frontier.max_r1());
        ymax = ymax.max(s.frontier.max_r2());
    }
    if xmax <= 0.0 {
        xmax = 1.0;
    }
    if ymax <= 0.0 {
        ymax = 1.0;
    }
    xmax *= 1.05;
    ymax *= 1.05;
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = move |r1: f64| MARGIN_L + r1 / xmax * plot_w;
    let sy = move |r2: f64| MARGIN_T + plot_h - r2 / ymax * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="13">"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    // axes
    let _ = writeln!(
        out,
        r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black"/>"#,
        MARGIN_L,
        MARGIN_T + plot_h,
        MARGIN_L + plot_w,
        MARGIN_T + plot_h
    );
    let _ = writeln!(
        out,
        r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black"/>"#,
        MARGIN_L,
        MARGIN_T,
        MARGIN_L,
        MARGIN_T + plot_h
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">R1 (bits/use)</text>"#,
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">R2 (bits/use)</text>"#,
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0
    );
    // tick marks at the quarter points
    for i in 0..=4 {
        let fx = xmax * i as f64 / 4.0;
        let fy = ymax * i as f64 / 4.0;
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="11">{:.3}</text>"#,
            sx(fx),
            MARGIN_T + plot_h + 18.0,
            fx
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-size="11">{:.3}</text>"#,
            MARGIN_L - 6.0,
            sy(fy) + 4.0,
            fy
        );
    }
    // regions
    for s in series {
        let mut pts = String::new();
        let vs = s.frontier.vertices();
        if let Some(first) = vs.first() {
            if first.r1 > 0.0 {
                let _ = write!(pts, "{:.2},{:.2} ", sx(0.0), sy(first.r2));
            }
        }
        for v in vs {
            let _ = write!(pts, "{:.2},{:.2} ", sx(v.r1), sy(v.r2));
        }
        if let Some(last) = vs.last() {
            if last.r2 > 0.0 {
                let _ = write!(pts, "{:.2},{:.2} ", sx(last.r1), sy(0.0));
            }
        }
        let dash = if s.dashed {
            r#" stroke-dasharray="6 4""#
        } else {
            ""
        };
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.8"{dash}/>"#,
            pts.trim_end(),
            s.color
        );
    }
    // legend
    for (i, s) in series.iter().enumerate() {
        let y = MARGIN_T + 16.0 + 18.0 * i as f64;
        let x = MARGIN_L + plot_w - 170.0;
        let dash = if s.dashed {
            r#" stroke-dasharray="6 4""#
        } else {
            ""
        };
        let _ = writeln!(
            out,
            r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{}" stroke-width="1.8"{dash}/>"#,
            x,
            y - 4.0,
            x + 26.0,
            y - 4.0,
            s.color
        );
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, x + 32.0, y, s.name);
    }
    out.push_str("</svg>\n");
    out
}
