//! The Tate curve in symmetric honeycomb form.
//!
//! The finite skeleton is a circle of circumference `3c` through `q1, q2, q3`
//! with a spoke of length `c/2` from each `q_i` to `p_i`, and `p4, p5, p6`
//! at the midpoints of the arcs. Both coordinates are witnesses for the
//! shadows of their divisors; their lifts attach nine rays
//! `x11, x12, x21, x22, x31, x32, x4, x5, x6`.

use std::collections::BTreeMap;

use num_traits::Signed;
use serde_json::json;

use crate::divisor::{construct_pl_with_divisor, Divisor};
use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeId, ExtendedGraph, MetricGraph, Point, VertexId};
use crate::pl::RayPiece;
use crate::rational::{format_rational, int, Rational};
use crate::tropicalize::{tropicalize, Embedding, Tropicalization};

pub struct TateDemo {
    pub embedding: Embedding,
    pub tropicalization: Tropicalization,
}

const ARCS: [(&str, &str); 6] = [("q1", "p6"), ("p6", "q2"), ("q2", "p4"), ("p4", "q3"), ("q3", "p5"), ("p5", "q1")];
const SPOKES: [(&str, &str); 3] = [("q1", "p1"), ("q2", "p2"), ("q3", "p3")];

/// Rays with their attachment point and eventual slopes of the two
/// coordinates, read off from the divisors of `f1` and `f2`.
const RAYS: [(&str, &str, i64, i64); 9] = [
    ("x11", "p1", 1, 1),
    ("x12", "p1", 0, -1),
    ("x21", "p2", -1, 0),
    ("x22", "p2", 1, 1),
    ("x31", "p3", -1, 0),
    ("x32", "p3", 0, -1),
    ("x4", "p4", -1, 0),
    ("x5", "p5", 0, -1),
    ("x6", "p6", 1, 1),
];

/// The finite skeleton for arc parameter `c`.
pub fn tate_skeleton(c: &Rational) -> Result<MetricGraph> {
    if !c.is_positive() {
        return Err(Error::Config(format!("c must be positive, got {}", format_rational(c))));
    }
    let half = c / int(2);
    let vertices = ["q1", "q2", "q3", "p1", "p2", "p3", "p4", "p5", "p6"].map(VertexId::new).to_vec();
    let edges = ARCS
        .iter()
        .chain(SPOKES.iter())
        .map(|(a, b)| Edge {
            id: EdgeId::new(format!("{a}{b}")),
            from: VertexId::new(*a),
            to: VertexId::new(*b),
            length: half.clone(),
        })
        .collect();
    MetricGraph::new(vertices, edges)
}

/// Shadow of `div(f_k)` on the finite skeleton: minus the sum of the ray
/// slopes at each attachment point.
fn shadow(k: usize) -> Divisor {
    let mut d = Divisor::new();
    for (_, at, s1, s2) in RAYS {
        let s = if k == 0 { s1 } else { s2 };
        d.add_point(Point::vertex(at), -s);
    }
    d
}

pub fn tate_demo(c: &Rational) -> Result<TateDemo> {
    let finite = tate_skeleton(c)?;
    let q1 = Point::vertex("q1");
    let rays = RAYS
        .iter()
        .map(|(id, at, _, _)| (EdgeId::new(*id), Point::vertex(*at), VertexId::new(format!("{id}:inf"))))
        .collect();
    let skeleton = ExtendedGraph::new(finite.clone(), rays)?;
    let mut coords = Vec::new();
    for k in 0..2 {
        let f = construct_pl_with_divisor(&finite, &shadow(k), &q1, &int(0))?;
        let mut pieces = BTreeMap::new();
        for (id, at, s1, s2) in RAYS {
            let anchor = f.value_at(&finite, &Point::vertex(at))?;
            pieces.insert(EdgeId::new(id), RayPiece { anchor, slope: if k == 0 { s1 } else { s2 } });
        }
        coords.push(f.with_rays(pieces));
    }
    let embedding = Embedding::new(skeleton, coords)?
        .record("tate", json!({ "c": format_rational(c), "lift": "lift-assumed" }));
    let tropicalization = tropicalize(&embedding)?;
    Ok(TateDemo { embedding, tropicalization })
}
