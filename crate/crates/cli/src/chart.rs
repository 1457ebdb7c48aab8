//! Minimal standalone SVG line charts.
//!
//! Each series is emitted as a `<g>` carrying its raw data in a
//! `data-points="x,y x,y"` attribute next to the drawn polyline, so the data
//! behind a chart can be recovered from the document itself.

use std::fmt::Write as _;

use negspan_core::metrics::format_fp;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(usize, f64)>,
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Formats the `data-points` attribute value for a series.
pub fn data_points(points: &[(usize, f64)]) -> String {
    points
        .iter()
        .map(|(x, y)| format!("{x},{}", format_fp(*y)))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Renders `series` against the x positions `xs` (every tick is drawn even if
/// no series has a point there).
pub fn line_chart(title: &str, x_label: &str, y_label: &str, xs: &[usize], series: &[Series]) -> String {
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let all_x = xs.iter().copied().chain(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (x_min, x_max) = all_x.fold((usize::MAX, 0), |(lo, hi), x| (lo.min(x), hi.max(x)));
    let (x_min, x_max) = if x_min > x_max { (0, 1) } else { (x_min, x_max) };
    let y_max = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .fold(0.0_f64, f64::max);
    let y_top = if y_max > 0.0 { y_max * 1.1 } else { 1.0 };

    let px = |x: usize| {
        if x_max == x_min {
            LEFT + plot_w / 2.0
        } else {
            LEFT + plot_w * (x - x_min) as f64 / (x_max - x_min) as f64
        }
    };
    let py = |y: f64| TOP + plot_h * (1.0 - y / y_top);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(title)
    );

    // axes
    let (x0, y0, x1, y1) = (LEFT, TOP + plot_h, LEFT + plot_w, TOP);
    let _ = writeln!(
        svg,
        r#"<g class="axes" stroke="black" fill="none"><line x1="{x0:.1}" y1="{y0:.1}" x2="{x1:.1}" y2="{y0:.1}"/><line x1="{x0:.1}" y1="{y0:.1}" x2="{x0:.1}" y2="{y1:.1}"/></g>"#
    );
    for &x in xs {
        let _ = writeln!(
            svg,
            r#"<g class="xtick"><line x1="{0:.1}" y1="{1:.1}" x2="{0:.1}" y2="{2:.1}" stroke="black"/><text x="{0:.1}" y="{3:.1}" text-anchor="middle">{4}</text></g>"#,
            px(x),
            y0,
            y0 + 5.0,
            y0 + 18.0,
            x
        );
    }
    for i in 0..=5 {
        let value = y_top * i as f64 / 5.0;
        let _ = writeln!(
            svg,
            r##"<g class="ytick"><line x1="{0:.1}" y1="{1:.1}" x2="{2:.1}" y2="{1:.1}" stroke="#dddddd"/><text x="{3:.1}" y="{4:.1}" text-anchor="end">{5:.0}</text></g>"##,
            x0,
            py(value),
            x1,
            x0 - 6.0,
            py(value) + 4.0,
            value
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 14.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{0:.1}" text-anchor="middle" transform="rotate(-90 16 {0:.1})">{1}</text>"#,
        TOP + plot_h / 2.0,
        escape(y_label)
    );

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(
            svg,
            r#"<g class="series" data-series="{}" data-points="{}" stroke="{color}" fill="{color}">"#,
            escape(&s.label),
            data_points(&s.points)
        );
        let coords: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.1},{:.1}", px(x), py(y)))
            .collect();
        if coords.len() > 1 {
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke-width="2" points="{}"/>"#,
                coords.join(" ")
            );
        }
        for &(x, y) in &s.points {
            let _ = writeln!(svg, r#"<circle cx="{:.1}" cy="{:.1}" r="3"/>"#, px(x), py(y));
        }
        let ly = TOP + 16.0 * i as f64;
        let lx = LEFT + plot_w + 16.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke-width="2"/><text x="{:.1}" y="{:.1}" stroke="none" fill="black">{}</text>"#,
            lx + 18.0,
            lx + 24.0,
            ly + 4.0,
            escape(&s.label)
        );
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    svg
}

/// Reads back `(label, data-points)` pairs from a chart made by [`line_chart`].
pub fn parse_series(svg: &str) -> Vec<(String, Vec<(usize, f64)>)> {
    let attr = |line: &str, name: &str| -> Option<String> {
        let key = format!("{name}=\"");
        let start = line.find(&key)? + key.len();
        let end = line[start..].find('"')? + start;
        Some(line[start..end].to_string())
    };
    svg.lines()
        .filter(|l| l.starts_with("<g class=\"series\""))
        .filter_map(|l| {
            let label = attr(l, "data-series")?
                .replace("&quot;", "\"")
                .replace("&gt;", ">")
                .replace("&lt;", "<")
                .replace("&amp;", "&");
            let points = attr(l, "data-points")?
                .split_whitespace()
                .filter_map(|p| {
                    let (x, y) = p.split_once(',')?;
                    Some((x.parse().ok()?, y.parse().ok()?))
                })
                .collect();
            Some((label, points))
        })
        .collect()
}
