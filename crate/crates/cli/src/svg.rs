//! Static SVG rendering of histogram comparisons: the aggregate score in a
//! wide top panel, the six sub-scores in a 3x2 grid below.

use std::fmt::Write;

use ers_core::corpus::HistogramReport;

const COLORS: [&str; 2] = ["#1f77b4", "#ff7f0e"];
const WIDTH: f64 = 960.0;
const TOP_HEIGHT: f64 = 300.0;
const CELL_HEIGHT: f64 = 240.0;
const LEGEND_HEIGHT: f64 = 40.0;
const MARGIN: (f64, f64, f64, f64) = (56.0, 16.0, 30.0, 44.0); // left, right, top, bottom

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn panel_title(field: &str) -> String {
    match field {
        "ers" => "EasyRead score".to_string(),
        other => {
            let name = other.trim_start_matches("s_");
            let mut chars = name.chars();
            match chars.next() {
                Some(c) => c.to_uppercase().chain(chars).collect::<String>() + " score",
                None => other.to_string(),
            }
        }
    }
}

/// Rounds a percentage axis maximum up to a readable tick step.
fn nice_ceiling(max: f64) -> (f64, f64) {
    let max = max.max(1.0);
    let raw_step = max / 4.0;
    let magnitude = 10f64.powf(raw_step.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * magnitude)
        .find(|s| *s >= raw_step)
        .unwrap_or(10.0 * magnitude);
    ((max / step).ceil() * step, step)
}

fn panel(out: &mut String, report: &HistogramReport, x0: f64, y0: f64, w: f64, h: f64) {
    let (ml, mr, mt, mb) = MARGIN;
    let (px, py) = (x0 + ml, y0 + mt);
    let (pw, ph) = (w - ml - mr, h - mt - mb);
    let peak = report.percentages.iter().flatten().cloned().fold(0.0, f64::max);
    let (ymax, ystep) = nice_ceiling(peak);
    let sx = |v: f64| px + v * pw;
    let sy = |v: f64| py + ph - v / ymax * ph;

    let _ = writeln!(out, r#"<g class="panel" data-field="{}">"#, escape(&report.field));
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="14" text-anchor="middle">{}</text>"#,
        px + pw / 2.0,
        y0 + 18.0,
        escape(&panel_title(&report.field))
    );

    let mut tick = 0.0;
    while tick <= ymax + 1e-9 {
        let y = sy(tick);
        let _ = writeln!(
            out,
            r##"<line x1="{px:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" font-size="10" text-anchor="end">{}</text>"##,
            px + pw,
            px - 4.0,
            y + 3.0,
            tick
        );
        tick += ystep;
    }
    for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="middle">{}</text>"#,
            sx(t),
            py + ph + 14.0,
            t
        );
    }

    for (series, color) in COLORS.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<g class="series" data-label="{}" fill="{color}" fill-opacity="0.55">"#,
            escape(&report.labels[series])
        );
        for (i, pct) in report.percentages[series].iter().enumerate() {
            if *pct <= 0.0 {
                continue;
            }
            let (lo, hi) = (report.edges[i], report.edges[i + 1]);
            let top = sy(*pct);
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/>"#,
                sx(lo),
                top,
                (sx(hi) - sx(lo)).max(0.5),
                py + ph - top
            );
        }
        let _ = writeln!(out, "</g>");
    }

    let _ = writeln!(
        out,
        r#"<rect x="{px:.1}" y="{py:.1}" width="{pw:.1}" height="{ph:.1}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">score</text>"#,
        px + pw / 2.0,
        py + ph + 30.0
    );
    let (lx, ly) = (x0 + 14.0, py + ph / 2.0);
    let _ = writeln!(
        out,
        r#"<text x="{lx:.1}" y="{ly:.1}" font-size="11" text-anchor="middle" transform="rotate(-90 {lx:.1} {ly:.1})">percentage of images</text>"#
    );
    let _ = writeln!(out, "</g>");
}

/// Renders the seven-panel figure. `reports[0]` is the aggregate.
pub fn render(reports: &[HistogramReport]) -> String {
    let rows = reports.len().saturating_sub(1).div_ceil(2);
    let height = LEGEND_HEIGHT + TOP_HEIGHT + rows as f64 * CELL_HEIGHT;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);

    if let Some(first) = reports.first() {
        let _ = writeln!(out, r#"<g class="legend">"#);
        for (i, label) in first.labels.iter().enumerate() {
            let x = 70.0 + i as f64 * 260.0;
            let _ = writeln!(
                out,
                r#"<rect x="{x}" y="14" width="14" height="14" fill="{}" fill-opacity="0.55"/><text x="{}" y="26" font-size="13">{}</text>"#,
                COLORS[i],
                x + 20.0,
                escape(label)
            );
        }
        let _ = writeln!(out, "</g>");
        panel(&mut out, first, 0.0, LEGEND_HEIGHT, WIDTH, TOP_HEIGHT);
    }
    for (i, report) in reports.iter().skip(1).enumerate() {
        let (col, row) = (i % 2, i / 2);
        let x0 = col as f64 * WIDTH / 2.0;
        let y0 = LEGEND_HEIGHT + TOP_HEIGHT + row as f64 * CELL_HEIGHT;
        panel(&mut out, report, x0, y0, WIDTH / 2.0, CELL_HEIGHT);
    }
    out.push_str("</svg>\n");
    out
}
