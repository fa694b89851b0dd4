//! Hand-written SVG for the correlation bar chart and the batch heatmap.
//! Numbers are printed at fixed precision so output is byte-stable.

use std::fmt::Write as _;

use crate::correlation::{BatchSimilarityMatrix, CorrelationReport};

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Diverging ramp: -1 blue, 0 white, +1 red.
fn diverging(v: f64) -> String {
    let v = v.clamp(-1.0, 1.0);
    let fade = |x: f64| (255.0 * (1.0 - x)).round() as u8;
    let (r, g, b) = if v >= 0.0 {
        (255, fade(v), fade(v))
    } else {
        (fade(-v), fade(-v), 255)
    };
    format!("#{r:02x}{g:02x}{b:02x}")
}

const BAR_W: f64 = 28.0;
const PLOT_H: f64 = 240.0;
const MARGIN: f64 = 50.0;
const LABEL_H: f64 = 110.0;

/// Bars in report order (descending s), y axis fixed to [-1, 1].
pub fn correlation_bar_chart(report: &CorrelationReport) -> String {
    let n = report.entries.len();
    let width = 2.0 * MARGIN + BAR_W * n.max(1) as f64;
    let height = MARGIN + PLOT_H + LABEL_H;
    let zero = MARGIN + PLOT_H / 2.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.1}" height="{height:.1}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="14">Texture correlation with CPS ({})</text>"#,
        width / 2.0,
        report.sign_convention.as_str()
    );
    for tick in [-1.0f64, -0.5, 0.0, 0.5, 1.0] {
        let y = zero - tick * PLOT_H / 2.0;
        let _ = writeln!(
            out,
            r##"<line x1="{MARGIN:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#cccccc"/><text x="{:.1}" y="{:.1}" text-anchor="end">{tick:.1}</text>"##,
            width - MARGIN,
            MARGIN - 4.0,
            y + 4.0
        );
    }
    for (i, e) in report.entries.iter().enumerate() {
        let x = MARGIN + BAR_W * i as f64 + 3.0;
        let len = e.s.abs() * PLOT_H / 2.0;
        let y = if e.s >= 0.0 { zero - len } else { zero };
        let fill = if e.s >= 0.0 { "#c0392b" } else { "#2e6fb7" };
        let _ = writeln!(
            out,
            r#"<rect x="{x:.1}" y="{y:.1}" width="{:.1}" height="{len:.1}" fill="{fill}"><title>{} {:.4}</title></rect>"#,
            BAR_W - 6.0,
            escape(&e.texture_id),
            e.s
        );
        let lx = x + (BAR_W - 6.0) / 2.0;
        let ly = MARGIN + PLOT_H + 8.0;
        let _ = writeln!(
            out,
            r#"<text x="{lx:.1}" y="{ly:.1}" transform="rotate(60 {lx:.1} {ly:.1})">{}</text>"#,
            escape(&e.texture_id)
        );
    }
    let _ = writeln!(
        out,
        r##"<line x1="{MARGIN:.1}" y1="{zero:.1}" x2="{:.1}" y2="{zero:.1}" stroke="#000000"/>"##,
        width - MARGIN
    );
    out.push_str("</svg>\n");
    out
}

const CELL: f64 = 22.0;

/// Square heatmap in the matrix's own row order; cells show the value on hover.
pub fn similarity_heatmap(m: &BatchSimilarityMatrix) -> String {
    let n = m.len();
    let left = 110.0;
    let top = 110.0;
    let size = left + CELL * n as f64 + 20.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size:.1}" height="{size:.1}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="18" text-anchor="middle" font-size="14">Batch profile similarity (CPS increasing)</text>"#,
        size / 2.0
    );
    for (i, id) in m.class_ids().iter().enumerate() {
        let c = CELL * i as f64 + CELL / 2.0;
        let id = escape(id);
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{id}</text>"#,
            left - 4.0,
            top + c + 4.0
        );
        let (x, y) = (left + c + 4.0, top - 4.0);
        let _ = writeln!(
            out,
            r#"<text x="{x:.1}" y="{y:.1}" transform="rotate(-60 {x:.1} {y:.1})">{id}</text>"#
        );
    }
    for i in 0..n {
        for j in 0..n {
            let v = m.get(i, j);
            let _ = writeln!(
                out,
                r#"<rect x="{:.1}" y="{:.1}" width="{CELL:.1}" height="{CELL:.1}" fill="{}"><title>{} / {}: {v:.4}</title></rect>"#,
                left + CELL * j as f64,
                top + CELL * i as f64,
                diverging(v),
                escape(&m.class_ids()[i]),
                escape(&m.class_ids()[j])
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlation::{SignConvention, TextureCorrelation};

    #[test]
    fn ramp_endpoints() {
        assert_eq!(diverging(1.0), "#ff0000");
        assert_eq!(diverging(0.0), "#ffffff");
        assert_eq!(diverging(-1.0), "#0000ff");
    }

    #[test]
    fn diagonal_is_hottest() {
        let m = BatchSimilarityMatrix::new(vec!["a".into(), "b".into()], vec![1.0, 0.3, 0.3, 1.0]).unwrap();
        let svg = similarity_heatmap(&m);
        assert_eq!(svg.matches("fill=\"#ff0000\"").count(), 2);
    }

    #[test]
    fn one_bar_per_texture_and_escaped_ids() {
        let report = CorrelationReport {
            sign_convention: SignConvention::Similarity,
            entries: vec![
                TextureCorrelation { texture_id: "a<b".into(), s: 0.5, degenerate: false },
                TextureCorrelation { texture_id: "c".into(), s: -0.25, degenerate: false },
            ],
        };
        let svg = correlation_bar_chart(&report);
        assert_eq!(svg.matches("<rect").count(), 2);
        assert!(svg.contains("a&lt;b 0.5000"));
        assert!(!svg.contains("a<b"));
    }
}
