//! Self-contained SVG line and bar charts, no external assets.
//!
//! Output is deterministic: fixed viewport, fixed palette, coordinates
//! rounded to two decimals. Points that cannot be placed (non-finite, or
//! non-positive on a log axis) are dropped and counted in the returned
//! metadata.

use std::fmt::Write as _;

use crate::error::{Error, Result};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 160.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;

const PALETTE: &[&str] = &[
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

/// One named curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(name: &str, points: Vec<(f64, f64)>) -> Self {
        Self {
            name: name.to_string(),
            points,
        }
    }
}

/// Axis configuration of a chart.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AxesSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_log: bool,
    pub y_log: bool,
}

/// A rendered document plus emission metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct SvgDocument {
    pub content: String,
    /// Points dropped because they were non-finite or outside the log domain.
    pub dropped_points: usize,
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if !(1e-3..1e5).contains(&a) {
        format!("{v:.1e}")
    } else if a >= 100.0 {
        format!("{v:.0}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// Render a line chart with one polyline per series.
pub fn emit_svg(series: &[Series], axes: &AxesSpec) -> Result<SvgDocument> {
    let placeable = |&(x, y): &(f64, f64)| {
        x.is_finite() && y.is_finite() && (!axes.x_log || x > 0.0) && (!axes.y_log || y > 0.0)
    };
    let mut dropped = 0usize;
    let kept: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            let k: Vec<_> = s.points.iter().filter(|p| placeable(p)).copied().collect();
            dropped += s.points.len() - k.len();
            k
        })
        .collect();

    let total: usize = kept.iter().map(Vec::len).sum();
    if total < 2 {
        return Err(Error::EmptyData(format!(
            "need at least 2 plottable points, have {total}"
        )));
    }

    let tx = |v: f64| if axes.x_log { v.log10() } else { v };
    let ty = |v: f64| if axes.y_log { v.log10() } else { v };
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for pts in &kept {
        for &(x, y) in pts {
            x_min = x_min.min(tx(x));
            x_max = x_max.max(tx(x));
            y_min = y_min.min(ty(y));
            y_max = y_max.max(ty(y));
        }
    }
    if x_max == x_min {
        x_max = x_min + 1.0;
    }
    if y_max == y_min {
        y_max = y_min + 1.0;
    }
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let px = |x: f64| MARGIN_L + (tx(x) - x_min) / (x_max - x_min) * plot_w;
    let py = |y: f64| MARGIN_T + plot_h - (ty(y) - y_min) / (y_max - y_min) * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, "<!-- dropped {dropped} unplottable points -->");
    let _ = writeln!(
        out,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="22" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        MARGIN_L + plot_w / 2.0,
        escape(&axes.title)
    );

    // frame and ticks
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="black"/>"#
    );
    const N_TICKS: usize = 5;
    for i in 0..=N_TICKS {
        let f = i as f64 / N_TICKS as f64;
        let xv = x_min + f * (x_max - x_min);
        let xpix = MARGIN_L + f * plot_w;
        let label = tick_label(if axes.x_log { 10f64.powf(xv) } else { xv });
        let _ = writeln!(
            out,
            r##"<line x1="{xpix:.2}" y1="{:.2}" x2="{xpix:.2}" y2="{:.2}" stroke="#cccccc"/>"##,
            MARGIN_T,
            MARGIN_T + plot_h
        );
        let _ = writeln!(
            out,
            r#"<text x="{xpix:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{label}</text>"#,
            MARGIN_T + plot_h + 16.0
        );
        let yv = y_min + f * (y_max - y_min);
        let ypix = MARGIN_T + plot_h - f * plot_h;
        let label = tick_label(if axes.y_log { 10f64.powf(yv) } else { yv });
        let _ = writeln!(
            out,
            r##"<line x1="{MARGIN_L}" y1="{ypix:.2}" x2="{:.2}" y2="{ypix:.2}" stroke="#cccccc"/>"##,
            MARGIN_L + plot_w
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{label}</text>"#,
            MARGIN_L - 6.0,
            ypix + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 10.0,
        escape(&axes.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.2}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 16 {0:.2})">{1}</text>"#,
        MARGIN_T + plot_h / 2.0,
        escape(&axes.y_label)
    );

    for (i, (s, pts)) in series.iter().zip(&kept).enumerate() {
        if pts.is_empty() {
            continue;
        }
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.8" points="{}"/>"#,
            coords.join(" ")
        );
        // legend entry
        let ly = MARGIN_T + 14.0 + i as f64 * 18.0;
        let lx = WIDTH - MARGIN_R + 10.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="1.8"/>"#,
            lx + 22.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12">{}</text>"#,
            lx + 28.0,
            ly + 4.0,
            escape(&s.name)
        );
    }
    out.push_str("</svg>\n");
    Ok(SvgDocument {
        content: out,
        dropped_points: dropped,
    })
}

/// Render labelled horizontal share bars (values in [0, 1]).
pub fn emit_share_bars(title: &str, bars: &[(String, f64)]) -> Result<SvgDocument> {
    if bars.is_empty() {
        return Err(Error::EmptyData("no bars to draw".into()));
    }
    let row_h = 26.0;
    let height = MARGIN_T + bars.len() as f64 * row_h + 30.0;
    let bar_left = 240.0;
    let bar_w = WIDTH - bar_left - 90.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height:.2}" viewBox="0 0 {WIDTH} {height:.2}">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{height:.2}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    for (i, (label, share)) in bars.iter().enumerate() {
        let y = MARGIN_T + i as f64 * row_h;
        let w = (share.clamp(0.0, 1.0)) * bar_w;
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="end">{}</text>"#,
            bar_left - 8.0,
            y + 15.0,
            escape(label)
        );
        let _ = writeln!(
            out,
            r#"<rect x="{bar_left}" y="{y:.2}" width="{w:.2}" height="18" fill="{color}"/>"#
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12">{:.1}%</text>"#,
            bar_left + w + 6.0,
            y + 15.0,
            share * 100.0
        );
    }
    out.push_str("</svg>\n");
    Ok(SvgDocument {
        content: out,
        dropped_points: 0,
    })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points_one_polyline() {
        let doc = emit_svg(
            &[Series::new("a", vec![(0.0, 1.0), (1.0, 2.0)])],
            &AxesSpec::default(),
        )
        .unwrap();
        assert_eq!(doc.content.matches("<polyline").count(), 1);
        let points_attr = doc
            .content
            .split("points=\"")
            .nth(1)
            .unwrap()
            .split('"')
            .next()
            .unwrap();
        assert_eq!(points_attr.split(' ').count(), 2);
        assert_eq!(doc.dropped_points, 0);
    }

    #[test]
    fn log_axis_drops_nonpositive_points() {
        let axes = AxesSpec {
            y_log: true,
            ..AxesSpec::default()
        };
        let doc = emit_svg(
            &[Series::new("a", vec![(0.0, 0.0), (1.0, 10.0), (2.0, 100.0)])],
            &axes,
        )
        .unwrap();
        assert_eq!(doc.dropped_points, 1);
        assert!(doc.content.contains("dropped 1 unplottable points"));
    }

    #[test]
    fn empty_data_is_an_error() {
        assert!(emit_svg(&[], &AxesSpec::default()).is_err());
        assert!(emit_svg(&[Series::new("a", vec![(1.0, 1.0)])], &AxesSpec::default()).is_err());
    }

    #[test]
    fn three_series_three_polylines() {
        let mk = |k: f64| Series::new("s", (0..10).map(|i| (i as f64, k * i as f64)).collect());
        let doc = emit_svg(&[mk(1.0), mk(2.0), mk(3.0)], &AxesSpec::default()).unwrap();
        assert_eq!(doc.content.matches("<polyline").count(), 3);
    }

    #[test]
    fn emission_is_deterministic() {
        let series = [Series::new("a", vec![(0.1, 5.0), (3.0, 9.0), (7.0, 2.0)])];
        let axes = AxesSpec {
            title: "t".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            x_log: false,
            y_log: false,
        };
        let a = emit_svg(&series, &axes).unwrap();
        let b = emit_svg(&series, &axes).unwrap();
        assert_eq!(a.content, b.content);
    }

    #[test]
    fn share_bars_render_each_row() {
        let doc = emit_share_bars(
            "shares",
            &[("snspd".into(), 0.766), ("modulator".into(), 0.128)],
        )
        .unwrap();
        assert_eq!(doc.content.matches("<rect").count(), 3); // background + 2 bars
        assert!(doc.content.contains("76.6%"));
    }
}
