//! SVG drawings of a curve projected to two coordinates.
//!
//! Rays are drawn as arrows of a fixed length, one and a half times the
//! median length of the drawn finite edges, with an open arrowhead. Edges of
//! weight above one carry their weight as a label. Pixel positions are
//! derived from the exact coordinates with `f64`, used for drawing only.

use std::fmt::Write;

use tropicurve::curve::TropicalCurve;
use tropicurve::rational::{to_f64, ExtRational};

const SIZE: f64 = 480.0;
const MARGIN: f64 = 32.0;

fn finite_pair(coords: &[ExtRational], proj: (usize, usize)) -> Option<(f64, f64)> {
    Some((to_f64(coords[proj.0].finite()?), to_f64(coords[proj.1].finite()?)))
}

enum Mark {
    Segment { a: (f64, f64), b: (f64, f64), weight: u64 },
    Arrow { a: (f64, f64), dir: (f64, f64), weight: u64 },
}

/// Renders the curve in coordinates `proj`; both must be below `curve.dim()`.
pub fn render(curve: &TropicalCurve, proj: (usize, usize)) -> String {
    let mut marks = Vec::new();
    for e in curve.edges() {
        let (Ok(u), Ok(v)) = (curve.vertex(&e.from), curve.vertex(&e.to)) else {
            continue;
        };
        let dir = (e.direction[proj.0] as f64, e.direction[proj.1] as f64);
        match (finite_pair(&u.coords, proj), finite_pair(&v.coords, proj)) {
            (Some(a), Some(b)) if a != b => marks.push(Mark::Segment { a, b, weight: e.weight }),
            (Some(a), None) if dir != (0.0, 0.0) => marks.push(Mark::Arrow { a, dir, weight: e.weight }),
            (None, Some(b)) if dir != (0.0, 0.0) => marks.push(Mark::Arrow { a: b, dir: (-dir.0, -dir.1), weight: e.weight }),
            _ => {}
        }
    }
    let mut lengths: Vec<f64> = marks
        .iter()
        .filter_map(|m| match m {
            Mark::Segment { a, b, .. } => Some(((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt()),
            Mark::Arrow { .. } => None,
        })
        .collect();
    lengths.sort_by(f64::total_cmp);
    let median = match lengths.len() {
        0 => 1.0,
        n if n % 2 == 1 => lengths[n / 2],
        n => (lengths[n / 2 - 1] + lengths[n / 2]) / 2.0,
    };
    let ray_len = 1.5 * median;

    // endpoints in curve coordinates
    let mut segs: Vec<((f64, f64), (f64, f64), u64, bool)> = Vec::new();
    for m in &marks {
        match m {
            Mark::Segment { a, b, weight } => segs.push((*a, *b, *weight, false)),
            Mark::Arrow { a, dir, weight } => {
                let n = (dir.0 * dir.0 + dir.1 * dir.1).sqrt();
                let b = (a.0 + ray_len * dir.0 / n, a.1 + ray_len * dir.1 / n);
                segs.push((*a, b, *weight, true));
            }
        }
    }
    let mut points: Vec<(f64, f64)> = segs.iter().flat_map(|s| [s.0, s.1]).collect();
    points.extend(curve.vertices().iter().filter_map(|v| finite_pair(&v.coords, proj)));
    if points.is_empty() {
        points.push((0.0, 0.0));
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in &points {
        x0 = x0.min(p.0);
        x1 = x1.max(p.0);
        y0 = y0.min(p.1);
        y1 = y1.max(p.1);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-9);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let px = |p: (f64, f64)| (MARGIN + (p.0 - x0) * scale, SIZE - MARGIN - (p.1 - y0) * scale);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#);
    let _ = writeln!(
        s,
        r#"<defs><marker id="head" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="8" markerHeight="8" orient="auto-start-reverse"><path d="M 1 1 L 9 5 L 1 9" fill="none" stroke="black"/></marker></defs>"#
    );
    let _ = writeln!(s, r#"<g stroke="black" stroke-width="1.5" fill="none">"#);
    for (a, b, _, arrow) in &segs {
        let (p, q) = (px(*a), px(*b));
        let head = if *arrow { r#" marker-end="url(#head)""# } else { "" };
        let _ = writeln!(s, r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"{head}/>"#, p.0, p.1, q.0, q.1);
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g fill="black">"#);
    for v in curve.vertices() {
        if let Some(p) = finite_pair(&v.coords, proj) {
            let p = px(p);
            let _ = writeln!(s, r#"<circle cx="{:.3}" cy="{:.3}" r="2.5"/>"#, p.0, p.1);
        }
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g font-family="sans-serif" font-size="12" fill="crimson">"#);
    for (a, b, w, _) in &segs {
        if *w > 1 {
            let m = px(((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0));
            let _ = writeln!(s, r#"<text class="weight" x="{:.3}" y="{:.3}">{w}</text>"#, m.0 + 4.0, m.1 - 4.0);
        }
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}
