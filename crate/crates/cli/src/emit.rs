//! CSV, JSON and SVG output.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::CliError;

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Run(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                out.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output values serialize") + "\n"
}

/// RFC 4180 CSV with a header row taken from the field names.
pub fn to_csv<T: Serialize>(rows: &[T], header: &[&str]) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header).map_err(|e| CliError::Run(e.to_string()))?;
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Run(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Run(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

const SIZE: f64 = 480.0;
const MARGIN: f64 = 48.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn header(w: f64, h: f64) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

fn bounds<'a>(points: impl Iterator<Item = &'a [f64; 2]>) -> Option<([f64; 2], [f64; 2])> {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in points {
        if p[0].is_finite() && p[1].is_finite() {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
    }
    (lo[0] <= hi[0]).then_some((lo, hi))
}

/// Closed curves drawn at equal scale, one colour per curve.
pub fn svg_curves(curves: &[(&str, &[[f64; 2]])]) -> String {
    let mut s = header(SIZE, SIZE);
    let Some((lo, hi)) = bounds(curves.iter().flat_map(|(_, c)| c.iter())) else {
        return s + "</svg>\n";
    };
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let cx = 0.5 * (lo[0] + hi[0]);
    let cy = 0.5 * (lo[1] + hi[1]);
    for (i, (label, c)) in curves.iter().enumerate() {
        let pts: Vec<String> = c
            .iter()
            .map(|p| format!("{:.3},{:.3}", SIZE / 2.0 + (p[0] - cx) * scale, SIZE / 2.0 - (p[1] - cy) * scale))
            .collect();
        let color = COLORS[i % COLORS.len()];
        let _ = writeln!(s, "<polygon points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>", pts.join(" "));
        let _ = writeln!(
            s,
            "<text x=\"{MARGIN}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{color}\">{}</text>",
            18.0 + 14.0 * i as f64,
            escape(label)
        );
    }
    s + "</svg>\n"
}

/// Line plot of named `(x, y)` series sharing one pair of axes.
pub fn svg_series(title: &str, xlabel: &str, series: &[(&str, Vec<[f64; 2]>)]) -> String {
    let (w, h) = (SIZE * 1.4, SIZE);
    let mut s = header(w, h);
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">{}</text>",
        w / 2.0,
        escape(title)
    );
    let Some((lo, hi)) = bounds(series.iter().flat_map(|(_, c)| c.iter())) else {
        return s + "</svg>\n";
    };
    let sx = (w - 2.0 * MARGIN) / (hi[0] - lo[0]).max(1e-300);
    let sy = (h - 2.0 * MARGIN) / (hi[1] - lo[1]).max(1e-300);
    let px = |x: f64| MARGIN + (x - lo[0]) * sx;
    let py = |y: f64| h - MARGIN - (y - lo[1]) * sy;
    let _ = writeln!(
        s,
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>",
        w - 2.0 * MARGIN,
        h - 2.0 * MARGIN
    );
    if lo[1] < 0.0 && hi[1] > 0.0 {
        let _ = writeln!(
            s,
            "<line x1=\"{MARGIN}\" y1=\"{y:.3}\" x2=\"{}\" y2=\"{y:.3}\" stroke=\"#aaa\" stroke-dasharray=\"4 3\"/>",
            w - MARGIN,
            y = py(0.0)
        );
    }
    let label = |s: &mut String, x: f64, y: f64, anchor: &str, text: String| {
        let _ = writeln!(
            s,
            "<text x=\"{x:.1}\" y=\"{y:.1}\" text-anchor=\"{anchor}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
            escape(&text)
        );
    };
    label(&mut s, MARGIN, h - MARGIN + 16.0, "start", format!("{:.4}", lo[0]));
    label(&mut s, w - MARGIN, h - MARGIN + 16.0, "end", format!("{:.4}", hi[0]));
    label(&mut s, w / 2.0, h - 10.0, "middle", xlabel.to_string());
    label(&mut s, MARGIN - 4.0, h - MARGIN, "end", format!("{:.4}", lo[1]));
    label(&mut s, MARGIN - 4.0, MARGIN + 10.0, "end", format!("{:.4}", hi[1]));
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = pts
            .iter()
            .filter(|p| p[0].is_finite() && p[1].is_finite())
            .map(|p| format!("{:.3},{:.3}", px(p[0]), py(p[1])))
            .collect();
        let _ = writeln!(s, "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>", path.join(" "));
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{color}\">{}</text>",
            MARGIN + 8.0,
            MARGIN + 16.0 + 14.0 * i as f64,
            escape(name)
        );
    }
    s + "</svg>\n"
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        a: f64,
        b: Option<f64>,
        c: &'static str,
    }

    #[test]
    fn csv_quotes_and_blanks() {
        let rows = [Row { a: 1.5, b: None, c: "x,y" }, Row { a: 2.0, b: Some(3.0), c: "z" }];
        let text = to_csv(&rows, &["a", "b", "c"]).unwrap();
        assert_eq!(text, "a,b,c\n1.5,,\"x,y\"\n2.0,3.0,z\n");
    }

    #[test]
    fn svg_is_well_formed_enough() {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let s = svg_curves(&[("a<b", &sq)]);
        assert!(s.starts_with("<?xml") && s.ends_with("</svg>\n"));
        assert!(s.contains("a&lt;b") && s.contains("<polygon"));
        let p = svg_series("t", "x", &[("f", vec![[0.0, -1.0], [1.0, 1.0]])]);
        assert!(p.contains("<polyline") && p.contains("stroke-dasharray"));
        assert!(svg_curves(&[]).ends_with("</svg>\n"));
    }
}
