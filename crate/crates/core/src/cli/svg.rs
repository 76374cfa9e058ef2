//! Deterministic SVG rendering of one slice, optionally with its labels.

use std::fmt::Write;

use crate::geometry::{Label, Point, Rect};
use crate::lattice::{LabelMap, LatticeSample, Region};

const SIZE: f64 = 640.0;
const PAD: f64 = 40.0;

struct Frame {
    bounds: Rect,
    scale: f64,
}

impl Frame {
    fn new(bounds: Rect) -> Self {
        let scale = (SIZE - 2.0 * PAD) / bounds.width().max(bounds.height());
        Self { bounds, scale }
    }

    fn map(&self, p: Point) -> (f64, f64) {
        (
            PAD + (p.x - self.bounds.min.x) * self.scale,
            SIZE - PAD - (p.y - self.bounds.min.y) * self.scale,
        )
    }
}

/// Scatter plot of a slice. With a label map, each labelled point is
/// annotated with `(k1,k2)` and the basis vectors are drawn from `λ₀,₀`.
pub fn render(region: &Region, sample: &LatticeSample, labels: Option<&LabelMap>) -> String {
    let frame = Frame::new(region.bounds());
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(
        s,
        r#"<defs><marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="6" markerHeight="6" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="crimson"/></marker></defs>"#
    );
    let _ = writeln!(s, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    for (rect, style) in [
        (region.bounds(), r#"fill="none" stroke="black""#),
        (region.inner(), r#"fill="none" stroke="gray" stroke-dasharray="4 3""#),
    ] {
        let (x0, y1) = frame.map(rect.min);
        let (x1, y0) = frame.map(rect.max);
        let _ = writeln!(
            s,
            r#"<rect x="{x0:.3}" y="{y0:.3}" width="{:.3}" height="{:.3}" {style}/>"#,
            x1 - x0,
            y1 - y0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{PAD}" y="{:.3}" font-family="monospace" font-size="12">hbar = {}</text>"#,
        PAD * 0.6,
        sample.hbar()
    );
    let _ = writeln!(s, r#"<g fill="steelblue">"#);
    for p in sample.points() {
        let (x, y) = frame.map(*p);
        let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="2.5"/>"#);
    }
    let _ = writeln!(s, "</g>");
    if let Some(map) = labels {
        let _ = writeln!(s, r#"<g font-family="monospace" font-size="7" fill="black">"#);
        for e in map.entries() {
            let (x, y) = frame.map(e.point);
            let _ = writeln!(
                s,
                r#"<text x="{:.3}" y="{:.3}">({},{})</text>"#,
                x + 3.0,
                y - 3.0,
                e.k.k1,
                e.k.k2
            );
        }
        let _ = writeln!(s, "</g>");
        if let Some(o) = map.basepoint() {
            let (x0, y0) = frame.map(o);
            for k in [Label::new(1, 0), Label::new(0, 1)] {
                if let Some(p) = map.get(k) {
                    let (x1, y1) = frame.map(p);
                    let _ = writeln!(
                        s,
                        r#"<line x1="{x0:.3}" y1="{y0:.3}" x2="{x1:.3}" y2="{y1:.3}" stroke="crimson" stroke-width="1.5" marker-end="url(#arrow)"/>"#
                    );
                }
            }
        }
    }
    s.push_str("</svg>\n");
    s
}
