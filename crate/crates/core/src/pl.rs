//! Piecewise linear functions with integer slopes on (extended) metric graphs.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, ExtendedGraph, MetricGraph, Point, VertexId};
use crate::rational::{as_integer, int, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Breakpoint {
    pub offset: Rational,
    pub value: Rational,
}

impl Breakpoint {
    pub fn new(offset: Rational, value: Rational) -> Self {
        Breakpoint { offset, value }
    }
}

/// Behaviour on an infinite ray: value at the attachment vertex and the
/// constant slope toward infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RayPiece {
    pub anchor: Rational,
    pub slope: i64,
}

/// One linear stretch of an edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub start: Rational,
    pub end: Rational,
    pub value: Rational,
    pub slope: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PlFunction {
    edges: BTreeMap<EdgeId, Vec<Breakpoint>>,
    rays: BTreeMap<EdgeId, RayPiece>,
}

fn interpolate(bps: &[Breakpoint], x: &Rational) -> Rational {
    for w in bps.windows(2) {
        if x >= &w[0].offset && x <= &w[1].offset {
            let t = (x - &w[0].offset) / (&w[1].offset - &w[0].offset);
            return &w[0].value + t * (&w[1].value - &w[0].value);
        }
    }
    bps.last().map(|b| b.value.clone()).unwrap_or_else(Rational::zero)
}

/// Drops interior breakpoints where the slope does not change.
fn simplify(bps: Vec<Breakpoint>) -> Vec<Breakpoint> {
    if bps.len() <= 2 {
        return bps;
    }
    let mut out: Vec<Breakpoint> = vec![bps[0].clone()];
    for i in 1..bps.len() - 1 {
        let prev = out.last().unwrap();
        let cur = &bps[i];
        let next = &bps[i + 1];
        let s1 = (&cur.value - &prev.value) / (&cur.offset - &prev.offset);
        let s2 = (&next.value - &cur.value) / (&next.offset - &cur.offset);
        if s1 != s2 {
            out.push(cur.clone());
        }
    }
    out.push(bps.last().unwrap().clone());
    out
}

impl PlFunction {
    pub fn from_parts(edges: BTreeMap<EdgeId, Vec<Breakpoint>>, rays: BTreeMap<EdgeId, RayPiece>) -> Self {
        PlFunction {
            edges: edges.into_iter().map(|(k, v)| (k, simplify(v))).collect(),
            rays,
        }
    }

    pub fn constant(graph: &ExtendedGraph, c: Rational) -> Self {
        let edges = graph
            .finite()
            .edges()
            .iter()
            .map(|e| {
                (
                    e.id.clone(),
                    vec![Breakpoint::new(int(0), c.clone()), Breakpoint::new(e.length.clone(), c.clone())],
                )
            })
            .collect();
        let rays = graph
            .rays()
            .iter()
            .map(|r| (r.id.clone(), RayPiece { anchor: c.clone(), slope: 0 }))
            .collect();
        PlFunction { edges, rays }
    }

    /// Linear on every edge with the given vertex values; rays get the given
    /// slopes (zero when absent).
    pub fn from_vertex_values(
        graph: &ExtendedGraph,
        values: &BTreeMap<VertexId, Rational>,
        ray_slopes: &BTreeMap<EdgeId, i64>,
    ) -> Self {
        let edges = graph
            .finite()
            .edges()
            .iter()
            .map(|e| {
                (
                    e.id.clone(),
                    vec![
                        Breakpoint::new(int(0), values[&e.from].clone()),
                        Breakpoint::new(e.length.clone(), values[&e.to].clone()),
                    ],
                )
            })
            .collect();
        let rays = graph
            .rays()
            .iter()
            .map(|r| {
                (
                    r.id.clone(),
                    RayPiece {
                        anchor: values[&r.attach].clone(),
                        slope: ray_slopes.get(&r.id).copied().unwrap_or(0),
                    },
                )
            })
            .collect();
        PlFunction { edges, rays }
    }

    pub fn edge_breakpoints(&self, e: &EdgeId) -> Option<&[Breakpoint]> {
        self.edges.get(e).map(|v| v.as_slice())
    }

    pub fn edge_map(&self) -> &BTreeMap<EdgeId, Vec<Breakpoint>> {
        &self.edges
    }

    pub fn ray_map(&self) -> &BTreeMap<EdgeId, RayPiece> {
        &self.rays
    }

    pub fn ray(&self, id: &EdgeId) -> Option<&RayPiece> {
        self.rays.get(id)
    }

    pub fn ray_slope(&self, id: &EdgeId) -> i64 {
        self.rays.get(id).map_or(0, |r| r.slope)
    }

    /// Checks that the function lives on `graph`: every edge described,
    /// breakpoints spanning the edge, integer slopes, continuity at vertices.
    pub fn validate(&self, graph: &ExtendedGraph) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidFunction(m));
        let finite = graph.finite();
        if self.edges.len() != finite.edges().len() {
            return bad("edge set does not match the graph".into());
        }
        let mut vertex_values: BTreeMap<VertexId, Rational> = BTreeMap::new();
        for e in finite.edges() {
            let Some(bps) = self.edges.get(&e.id) else {
                return bad(format!("missing edge {}", e.id));
            };
            if bps.len() < 2 || !bps[0].offset.is_zero() || bps.last().unwrap().offset != e.length {
                return bad(format!("breakpoints do not span edge {}", e.id));
            }
            for w in bps.windows(2) {
                if w[0].offset >= w[1].offset {
                    return bad(format!("breakpoints not increasing on {}", e.id));
                }
                let s = (&w[1].value - &w[0].value) / (&w[1].offset - &w[0].offset);
                if !s.is_integer() {
                    return bad(format!("non-integer slope {s} on {}", e.id));
                }
            }
            for (v, val) in [(&e.from, &bps[0].value), (&e.to, &bps.last().unwrap().value)] {
                if let Some(prev) = vertex_values.get(v) {
                    if prev != val {
                        return bad(format!("discontinuous at vertex {v}"));
                    }
                } else {
                    vertex_values.insert(v.clone(), val.clone());
                }
            }
        }
        if self.rays.len() != graph.rays().len() {
            return bad("ray set does not match the graph".into());
        }
        for r in graph.rays() {
            let Some(piece) = self.rays.get(&r.id) else {
                return bad(format!("missing ray {}", r.id));
            };
            if let Some(val) = vertex_values.get(&r.attach) {
                if val != &piece.anchor {
                    return bad(format!("ray {} anchor disagrees with vertex {}", r.id, r.attach));
                }
            } else {
                vertex_values.insert(r.attach.clone(), piece.anchor.clone());
            }
        }
        Ok(())
    }

    pub fn vertex_value(&self, graph: &MetricGraph, v: &VertexId) -> Option<Rational> {
        for e in graph.edges() {
            if let Some(bps) = self.edges.get(&e.id) {
                if &e.from == v {
                    return Some(bps[0].value.clone());
                }
                if &e.to == v {
                    return Some(bps.last().unwrap().value.clone());
                }
            }
        }
        // a bare point: the value sits on the rays, or is zero without any
        if graph.edges().is_empty() && graph.has_vertex(v) {
            return Some(self.rays.values().next().map(|r| r.anchor.clone()).unwrap_or_default());
        }
        None
    }

    /// Value at a finite point of `graph` (in canonical form).
    pub fn value_at(&self, graph: &MetricGraph, p: &Point) -> Result<Rational> {
        match p {
            Point::Vertex(v) => self
                .vertex_value(graph, v)
                .ok_or_else(|| Error::UnknownVertex(v.0.clone())),
            Point::OnEdge(e, t) => {
                let bps = self.edges.get(e).ok_or_else(|| Error::UnknownEdge(e.0.clone()))?;
                Ok(interpolate(bps, t))
            }
            Point::AtInfinity(v) => Err(Error::UnknownVertex(v.0.clone())),
        }
    }

    pub fn segments(&self, e: &EdgeId) -> Vec<Segment> {
        self.edges
            .get(e)
            .map(|bps| {
                bps.windows(2)
                    .map(|w| {
                        let s = (&w[1].value - &w[0].value) / (&w[1].offset - &w[0].offset);
                        Segment {
                            start: w[0].offset.clone(),
                            end: w[1].offset.clone(),
                            value: w[0].value.clone(),
                            slope: as_integer(&s).expect("validated integer slope"),
                        }
                    })
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Slope leaving `from` (offset 0) and slope leaving `to` (offset length).
    pub fn end_slopes(&self, e: &EdgeId) -> (i64, i64) {
        let segs = self.segments(e);
        (segs[0].slope, -segs.last().unwrap().slope)
    }

    /// Interior offsets of `e` where the function bends.
    pub fn interior_breaks(&self, e: &EdgeId) -> Vec<Rational> {
        self.edges
            .get(e)
            .map(|bps| bps[1..bps.len() - 1].iter().map(|b| b.offset.clone()).collect())
            .unwrap_or_default()
    }

    /// All finite points where the function is not linear on an edge.
    pub fn interior_break_points(&self) -> Vec<Point> {
        self.edges
            .iter()
            .flat_map(|(e, bps)| {
                bps[1..bps.len() - 1]
                    .iter()
                    .map(move |b| Point::OnEdge(e.clone(), b.offset.clone()))
            })
            .collect()
    }

    fn combine(&self, other: &PlFunction, sign: i64) -> Result<PlFunction> {
        if self.edges.keys().ne(other.edges.keys()) || self.rays.keys().ne(other.rays.keys()) {
            return Err(Error::InvalidFunction("functions live on different graphs".into()));
        }
        let sg = int(sign);
        let mut edges = BTreeMap::new();
        for (e, a) in &self.edges {
            let b = &other.edges[e];
            let mut offsets: Vec<Rational> = a.iter().chain(b.iter()).map(|x| x.offset.clone()).collect();
            offsets.sort();
            offsets.dedup();
            let bps = offsets
                .into_iter()
                .map(|o| {
                    let v = interpolate(a, &o) + &sg * interpolate(b, &o);
                    Breakpoint::new(o, v)
                })
                .collect();
            edges.insert(e.clone(), simplify(bps));
        }
        let rays = self
            .rays
            .iter()
            .map(|(id, r)| {
                let o = &other.rays[id];
                (
                    id.clone(),
                    RayPiece {
                        anchor: &r.anchor + &sg * &o.anchor,
                        slope: r.slope + sign * o.slope,
                    },
                )
            })
            .collect();
        Ok(PlFunction { edges, rays })
    }

    pub fn add(&self, other: &PlFunction) -> Result<PlFunction> {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &PlFunction) -> Result<PlFunction> {
        self.combine(other, -1)
    }

    pub fn add_constant(&self, c: &Rational) -> PlFunction {
        PlFunction {
            edges: self
                .edges
                .iter()
                .map(|(e, bps)| {
                    (
                        e.clone(),
                        bps.iter().map(|b| Breakpoint::new(b.offset.clone(), &b.value + c)).collect(),
                    )
                })
                .collect(),
            rays: self
                .rays
                .iter()
                .map(|(id, r)| (id.clone(), RayPiece { anchor: &r.anchor + c, slope: r.slope }))
                .collect(),
        }
    }

    /// Restricts to the finite part (drops ray data).
    pub fn finite_part(&self) -> PlFunction {
        PlFunction {
            edges: self.edges.clone(),
            rays: BTreeMap::new(),
        }
    }

    /// Same function with explicit ray data.
    pub fn with_rays(&self, rays: BTreeMap<EdgeId, RayPiece>) -> PlFunction {
        PlFunction {
            edges: self.edges.clone(),
            rays,
        }
    }

    /// Re-expresses the function on a descendant of `old` (subdivided edges,
    /// split rays, extra rays). Rays unknown to the function get slope zero.
    pub fn transport(&self, old: &ExtendedGraph, new: &ExtendedGraph) -> Result<PlFunction> {
        let mut edges = BTreeMap::new();
        for e in new.finite().edges() {
            if let Some(bps) = self.edges.get(&e.id) {
                edges.insert(e.id.clone(), bps.clone());
                continue;
            }
            let (src, start) = new
                .finite()
                .origin_in(&e.id, |id| self.edges.contains_key(id) || self.rays.contains_key(id))
                .ok_or_else(|| Error::InvalidFunction(format!("cannot locate edge {} in the old graph", e.id)))?;
            let end = &start + &e.length;
            let bps = if let Some(src_bps) = self.edges.get(&src) {
                let mut pts = vec![Breakpoint::new(int(0), interpolate(src_bps, &start))];
                for b in src_bps.iter().filter(|b| b.offset > start && b.offset < end) {
                    pts.push(Breakpoint::new(&b.offset - &start, b.value.clone()));
                }
                pts.push(Breakpoint::new(e.length.clone(), interpolate(src_bps, &end)));
                pts
            } else {
                let piece = &self.rays[&src];
                let old_start = old.ray(&src)?.start.clone();
                let s = int(piece.slope);
                let at = |x: &Rational| &piece.anchor + &s * (x - &old_start);
                vec![Breakpoint::new(int(0), at(&start)), Breakpoint::new(e.length.clone(), at(&end))]
            };
            edges.insert(e.id.clone(), simplify(bps));
        }
        let mut rays = BTreeMap::new();
        for r in new.rays() {
            let piece = match self.rays.get(&r.id) {
                Some(p) => {
                    let old_start = old.ray(&r.id)?.start.clone();
                    RayPiece {
                        anchor: &p.anchor + int(p.slope) * (&r.start - old_start),
                        slope: p.slope,
                    }
                }
                None => {
                    let tmp = PlFunction { edges: edges.clone(), rays: BTreeMap::new() };
                    let anchor = tmp
                        .vertex_value(new.finite(), &r.attach)
                        .or_else(|| self.vertex_value(new.finite(), &r.attach))
                        .ok_or_else(|| Error::UnknownVertex(r.attach.0.clone()))?;
                    RayPiece { anchor, slope: 0 }
                }
            };
            rays.insert(r.id.clone(), piece);
        }
        Ok(PlFunction { edges, rays })
    }

    /// Whether the function vanishes identically on the finite part and all rays.
    pub fn is_zero(&self) -> bool {
        self.edges.values().all(|b| b.iter().all(|x| x.value.is_zero()))
            && self.rays.values().all(|r| r.anchor.is_zero() && r.slope == 0)
    }

    /// Maximum absolute value on the finite part.
    pub fn sup_norm(&self) -> Rational {
        self.edges
            .values()
            .flat_map(|b| b.iter().map(|x| x.value.abs()))
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, GraphPoint};
    use crate::rational::rat;

    fn path(len: i64) -> ExtendedGraph {
        let g = MetricGraph::new(
            vec![VertexId::new("a"), VertexId::new("b")],
            vec![Edge {
                id: EdgeId::new("e"),
                from: VertexId::new("a"),
                to: VertexId::new("b"),
                length: int(len),
            }],
        )
        .unwrap();
        ExtendedGraph::from_finite(g)
    }

    fn ramp() -> PlFunction {
        let mut edges = BTreeMap::new();
        edges.insert(
            EdgeId::new("e"),
            vec![
                Breakpoint::new(int(0), int(0)),
                Breakpoint::new(int(1), int(1)),
                Breakpoint::new(int(2), int(1)),
            ],
        );
        PlFunction::from_parts(edges, BTreeMap::new())
    }

    #[test]
    fn validates_integer_slopes() {
        let g = path(2);
        ramp().validate(&g).unwrap();
        let mut edges = BTreeMap::new();
        edges.insert(
            EdgeId::new("e"),
            vec![Breakpoint::new(int(0), int(0)), Breakpoint::new(int(2), int(1))],
        );
        let half = PlFunction::from_parts(edges, BTreeMap::new());
        assert!(matches!(half.validate(&g), Err(Error::InvalidFunction(_))));
    }

    #[test]
    fn transport_through_subdivision() {
        let g = path(2);
        let f = ramp();
        let h = g.subdivide_many(&[GraphPoint::new("e", rat(1, 2))]).unwrap();
        let t = f.transport(&g, &h).unwrap();
        t.validate(&h).unwrap();
        let p = h.finite().transport(&Point::on_edge("e", rat(3, 2))).unwrap();
        assert_eq!(t.value_at(h.finite(), &p).unwrap(), int(1));
        let p = h.finite().transport(&Point::on_edge("e", rat(1, 4))).unwrap();
        assert_eq!(t.value_at(h.finite(), &p).unwrap(), rat(1, 4));
    }

    #[test]
    fn arithmetic() {
        let f = ramp();
        let two = f.add(&f).unwrap();
        assert_eq!(two.value_at(path(2).finite(), &Point::on_edge("e", rat(1, 2))).unwrap(), int(1));
        assert!(f.sub(&f).unwrap().is_zero());
        let c = f.add_constant(&int(3));
        assert_eq!(c.segments(&EdgeId::new("e")).len(), 2);
    }
}
