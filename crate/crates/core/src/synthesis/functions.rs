//! Edge functions (ramps along one edge) and vertex functions (tents on two
//! edges at a vertex), each with pillar trapezoids on a spanning-tree
//! complement.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::Zero;
use serde_json::json;

use crate::divisor::{cor34_certificate, divisor_of_finite, Divisor, PillarSet};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, MetricGraph, Point, VertexId};
use crate::pl::{Breakpoint, PlFunction};
use crate::rational::{format_rational, int, Rational};
use crate::tropicalize::{extend_embedding_with, Embedding, ExtendOptions};

/// A new coordinate before it is attached: its values on the finite part,
/// its slopes on existing rays, and the divisor whose points receive new
/// rays.
#[derive(Debug, Clone, PartialEq)]
pub struct Construction {
    pub kind: String,
    pub target: String,
    pub function: PlFunction,
    pub ray_slopes: BTreeMap<EdgeId, i64>,
    pub divisor: Divisor,
    pub pillars: Vec<PillarSet>,
}

impl Construction {
    /// Adds the coordinate, attaching one ray per divisor point.
    pub fn apply(&self, emb: &Embedding) -> Result<Embedding> {
        let opts = ExtendOptions { allow_shared_attachments: true, label: None, ray_slopes: self.ray_slopes.clone() };
        let out = extend_embedding_with(emb, &self.function, &opts)?;
        let pillars: Vec<String> = self.pillars.iter().map(super::pillars::describe).collect();
        Ok(out.record(
            self.kind.clone(),
            json!({ "target": self.target, "coordinate": emb.dim(), "pillars": pillars, "lift": "lift-assumed" }),
        ))
    }
}

/// Function on the finite part built edge by edge.
fn build(g: &MetricGraph, mut profile: impl FnMut(&crate::graph::Edge) -> Vec<(Rational, Rational)>) -> PlFunction {
    let edges = g
        .edges()
        .iter()
        .map(|e| (e.id.clone(), profile(e).into_iter().map(|(o, v)| Breakpoint::new(o, v)).collect()))
        .collect();
    PlFunction::from_parts(edges, BTreeMap::new())
}

fn flat(e: &crate::graph::Edge, c: &Rational) -> Vec<(Rational, Rational)> {
    vec![(Rational::zero(), c.clone()), (e.length.clone(), c.clone())]
}

/// Sum of the trapezoids `p1 - p2 - p3 + p4` of the pillar sets: zero off
/// `[p1, p4]`, slope one up to `p2`, flat, slope minus one down to `p4`.
pub fn trapezoids(g: &MetricGraph, pillars: &[PillarSet]) -> Result<PlFunction> {
    let mut by_edge: BTreeMap<EdgeId, Vec<[Rational; 4]>> = BTreeMap::new();
    for p in pillars {
        if !g.validate_pillar_points(&p.edge, &p.points)? {
            return Err(Error::InvalidPillars(format!("points on {} are not pillar points", p.edge)));
        }
        let mut o: Vec<Rational> = p.points.iter().map(|x| x.offset.clone()).collect();
        o.sort();
        by_edge.entry(p.edge.clone()).or_default().push([o[0].clone(), o[1].clone(), o[2].clone(), o[3].clone()]);
    }
    let zero = Rational::zero();
    Ok(build(g, |e| {
        let Some(traps) = by_edge.get(&e.id) else { return flat(e, &zero) };
        let mut traps = traps.clone();
        traps.sort();
        let mut bps = vec![(zero.clone(), zero.clone())];
        for [a, b, c, d] in traps {
            let h = &b - &a;
            bps.extend([(a, zero.clone()), (b, h.clone()), (c, h), (d, zero.clone())]);
        }
        bps.push((e.length.clone(), zero.clone()));
        bps.dedup_by(|x, y| x.0 == y.0);
        bps
    }))
}

/// Adds the trapezoids to `main` and checks, through the pillar
/// certificate, that the result is the witness for its divisor.
fn with_pillars(g: &MetricGraph, main: &PlFunction, pillars: &[PillarSet]) -> Result<PlFunction> {
    let f = main.add(&trapezoids(g, pillars)?)?;
    let d = divisor_of_finite(g, main);
    let w = cor34_certificate(g, &d, pillars).map_err(|e| Error::PillarFailure(e.to_string()))?;
    let diff = f.sub(&w)?;
    let mut values = diff.edge_map().values().flatten().map(|b| &b.value);
    let first = values.next().cloned().unwrap_or_default();
    if values.any(|v| v != &first) {
        return Err(Error::PillarFailure("pillar witness differs from the construction".into()));
    }
    Ok(f)
}

fn finish(
    kind: &str,
    target: String,
    g: &MetricGraph,
    function: PlFunction,
    ray_slopes: BTreeMap<EdgeId, i64>,
    extra: &[(VertexId, i64)],
    pillars: &[PillarSet],
) -> Result<Construction> {
    let mut divisor = divisor_of_finite(g, &function);
    for (v, c) in extra {
        divisor.add_point(Point::Vertex(v.clone()), *c);
    }
    for (p, c) in divisor.terms() {
        if c.abs() != 1 {
            return Err(Error::NonSimplePoint(format!("{p} has coefficient {c} in {kind} for {target}")));
        }
    }
    Ok(Construction { kind: kind.into(), target, function, ray_slopes, divisor, pillars: pillars.to_vec() })
}

/// Vertices reachable from `start` without using edge `skip`.
fn reach(g: &MetricGraph, start: &VertexId, skip: &EdgeId) -> BTreeSet<VertexId> {
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(v) = queue.pop_front() {
        for e in g.edges().iter().filter(|e| &e.id != skip && (e.from == v || e.to == v)) {
            let w = e.other_end(&v).clone();
            if seen.insert(w.clone()) {
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Ramp along a finite edge `e = [v, w]` whose far end `w` is cut off from
/// the core by `e`: zero on the side of `v`, slope one along `e`, constant
/// beyond `w`. Its divisor is `v - w` plus the pillar patterns.
pub fn edge_function_finite(
    emb: &Embedding,
    e: &EdgeId,
    core: &BTreeSet<VertexId>,
    pillars: &[PillarSet],
) -> Result<Construction> {
    let g = emb.skeleton().finite();
    let edge = g.edge(e)?.clone();
    if edge.from == edge.to {
        return Err(Error::NotSeparated(e.0.clone()));
    }
    let side_from = reach(g, &edge.from, e);
    if side_from.contains(&edge.to) {
        return Err(Error::NotSeparated(e.0.clone()));
    }
    let from_in_core = side_from.iter().any(|v| core.contains(v));
    let (v, far) = if from_in_core {
        (edge.from.clone(), reach(g, &edge.to, e))
    } else {
        (edge.to.clone(), side_from)
    };
    if far.iter().any(|x| core.contains(x)) {
        return Err(Error::NotSeparated(e.0.clone()));
    }
    let len = edge.length.clone();
    let zero = Rational::zero();
    let ramp = build(g, |x| {
        if x.id == *e {
            if x.from == v {
                vec![(zero.clone(), zero.clone()), (len.clone(), len.clone())]
            } else {
                vec![(zero.clone(), len.clone()), (len.clone(), zero.clone())]
            }
        } else if far.contains(&x.from) {
            flat(x, &len)
        } else {
            flat(x, &zero)
        }
    });
    let f = with_pillars(g, &ramp, pillars)?;
    finish("edge-finite", e.0.clone(), g, f, BTreeMap::new(), &[], pillars)
}

/// Slope one along the ray `e` toward its infinite end and zero on the
/// finite part apart from the pillar trapezoids. The zero sits at the
/// attachment vertex.
pub fn edge_function_infinite(emb: &Embedding, e: &EdgeId, pillars: &[PillarSet]) -> Result<Construction> {
    let sk = emb.skeleton();
    let ray = sk.ray(e)?.clone();
    let g = sk.finite();
    let zero = build(g, |x| flat(x, &Rational::zero()));
    let f = with_pillars(g, &zero, pillars)?;
    finish(
        "edge-infinite",
        e.0.clone(),
        g,
        f,
        BTreeMap::from([(e.clone(), 1)]),
        &[(ray.attach.clone(), 1)],
        pillars,
    )
}

/// Offsets along `e` measured from its endpoint `v`.
fn from_vertex(g: &MetricGraph, e: &EdgeId, v: &VertexId) -> Result<(Rational, bool)> {
    let edge = g.edge(e)?;
    if edge.from == edge.to {
        return Err(Error::Config(format!("edge {e} is a loop")));
    }
    if &edge.from == v {
        Ok((edge.length.clone(), true))
    } else if &edge.to == v {
        Ok((edge.length.clone(), false))
    } else {
        Err(Error::Config(format!("edge {e} does not meet {v}")))
    }
}

/// Default tent width at `v` on the edges `e0` and `e1`.
pub fn default_delta(g: &MetricGraph, e0: &EdgeId, e1: &EdgeId) -> Result<Rational> {
    let a = g.edge(e0)?.length.clone();
    let b = g.edge(e1)?.length.clone();
    Ok(a.min(b) / int(8))
}

/// The tent at `v`: rises with slope one into `e1` for `delta`, stays flat
/// for `delta`, returns to zero over `delta`; the mirror image with the
/// opposite sign on `e0`. Zero elsewhere. Six simple divisor points, none
/// at `v`.
pub fn vertex_function(
    emb: &Embedding,
    v: &VertexId,
    e0: &EdgeId,
    e1: &EdgeId,
    delta: Option<Rational>,
    pillars: &[PillarSet],
) -> Result<Construction> {
    if e0 == e1 {
        return Err(Error::EqualEdges);
    }
    let g = emb.skeleton().finite();
    let (l0, fwd0) = from_vertex(g, e0, v)?;
    let (l1, fwd1) = from_vertex(g, e1, v)?;
    let delta = match delta {
        Some(d) => d,
        None => default_delta(g, e0, e1)?,
    };
    if delta <= Rational::zero() || &delta * int(3) >= l0.clone().min(l1.clone()) {
        return Err(Error::NoRoom(format!("{v} with width {}", format_rational(&delta))));
    }
    let zero = Rational::zero();
    let tent = |len: &Rational, fwd: bool, sign: i64| -> Vec<(Rational, Rational)> {
        let h = &delta * int(sign);
        let pts = [
            (zero.clone(), zero.clone()),
            (delta.clone(), h.clone()),
            (&delta * int(2), h),
            (&delta * int(3), zero.clone()),
            (len.clone(), zero.clone()),
        ];
        if fwd {
            pts.to_vec()
        } else {
            pts.iter().rev().map(|(o, y)| (len - o, y.clone())).collect()
        }
    };
    let main = build(g, |x| {
        if &x.id == e1 {
            tent(&l1, fwd1, 1)
        } else if &x.id == e0 {
            tent(&l0, fwd0, -1)
        } else {
            flat(x, &zero)
        }
    });
    let f = with_pillars(g, &main, pillars)?;
    finish("vertex", format!("{v}:{e0}:{e1}"), g, f, BTreeMap::new(), &[], pillars)
}

/// Support of the tent, for pillar avoidance: `(edge, from, to)` offsets.
pub fn tent_support(g: &MetricGraph, v: &VertexId, e: &EdgeId, delta: &Rational) -> Result<(EdgeId, Rational, Rational)> {
    let (len, fwd) = from_vertex(g, e, v)?;
    let span = delta * int(3);
    Ok(if fwd { (e.clone(), Rational::zero(), span) } else { (e.clone(), &len - span, len) })
}
