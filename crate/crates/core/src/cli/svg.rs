//! Minimal SVG rendering of val f along the skeleton edges. The data stays
//! exact up to this point; coordinates become floating point only here,
//! which is presentation, not computation.

use crate::splitting::SkeletonReport;
use crate::valfield::QRat;
use std::fmt::Write as _;

fn to_f(q: QRat) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

pub fn render(rep: &SkeletonReport) -> String {
    let panel_w = 360.0;
    let panel_h = 200.0;
    let margin = 40.0;
    let n = rep.edges.len().max(1);
    let width = panel_w + 2.0 * margin;
    let height = (panel_h + margin) * n as f64 + margin;

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    )
    .unwrap();
    writeln!(
        s,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    )
    .unwrap();

    for (i, er) in rep.edges.iter().enumerate() {
        let oy = margin + (panel_h + margin) * i as f64;
        let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
        for &(r, v) in &er.samples {
            let (x, y) = (to_f(r), to_f(v));
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
        if !xmin.is_finite() {
            continue;
        }
        if (ymax - ymin).abs() < 1e-12 {
            ymin -= 1.0;
            ymax += 1.0;
        }
        let sx = |x: f64| margin + (x - xmin) / (xmax - xmin) * panel_w;
        let sy = |y: f64| oy + panel_h - (y - ymin) / (ymax - ymin) * panel_h;

        writeln!(
            s,
            r##"<rect x="{margin}" y="{oy}" width="{panel_w}" height="{panel_h}" fill="none" stroke="#999"/>"##
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{margin}" y="{}" font-size="11" font-family="monospace">edge {} [{} — {}]</text>"#,
            oy - 6.0,
            i,
            xml_escape(&er.from),
            xml_escape(&er.to)
        )
        .unwrap();

        let mut path = String::new();
        for (k, pc) in er.pieces.iter().enumerate() {
            let x0 = to_f(pc.lo);
            let y0 = to_f(pc.value_lo);
            let x1 = to_f(pc.hi);
            let y1 = y0 + to_f(pc.slope) * (x1 - x0);
            if k == 0 {
                write!(path, "M {} {} ", sx(x0), sy(y0)).unwrap();
            }
            write!(path, "L {} {} ", sx(x1), sy(y1)).unwrap();
        }
        writeln!(
            s,
            r##"<path d="{path}" fill="none" stroke="#1f5fbf" stroke-width="1.5"/>"##
        )
        .unwrap();
        for &(r, v) in &er.samples {
            writeln!(
                s,
                r##"<circle cx="{}" cy="{}" r="2" fill="#d04a35"/>"##,
                sx(to_f(r)),
                sy(to_f(v))
            )
            .unwrap();
        }
    }
    writeln!(s, "</svg>").unwrap();
    s
}

fn xml_escape(t: &str) -> String {
    t.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
