//! Sample skeleta and embeddings: trees, circles with spokes, theta graphs,
//! dumbbells and a few others, bare or with raw coordinates.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeId, ExtendedGraph, MetricGraph, Point, VertexId};
use crate::pl::{Breakpoint, PlFunction, RayPiece};
use crate::rational::{int, rat, Rational};
use crate::synthesis::tate::tate_demo;
use crate::tropicalize::Embedding;

fn graph(vertices: &[&str], edges: &[(&str, &str, &str, Rational)]) -> MetricGraph {
    MetricGraph::new(
        vertices.iter().map(|v| VertexId::new(*v)).collect(),
        edges
            .iter()
            .map(|(id, a, b, l)| Edge { id: EdgeId::new(*id), from: VertexId::new(*a), to: VertexId::new(*b), length: l.clone() })
            .collect(),
    )
    .expect("fixture graph")
}

fn bare(g: MetricGraph, rays: &[&str]) -> Embedding {
    let rays = rays
        .iter()
        .enumerate()
        .map(|(i, at)| (EdgeId::new(format!("r{i}")), Point::vertex(*at), VertexId::new(format!("r{i}:inf"))))
        .collect();
    Embedding::new(ExtendedGraph::new(g, rays).expect("fixture rays"), vec![]).expect("fixture")
}

/// Coordinates that are linear on every edge with the given vertex values,
/// made harmonic by attaching, for each coordinate, unit rays that carry
/// the missing slope at each vertex.
pub fn harmonize(g: MetricGraph, values: &[Vec<(&str, i64)>]) -> Result<Embedding> {
    let vals: Vec<BTreeMap<VertexId, Rational>> = values
        .iter()
        .map(|vs| {
            let mut m: BTreeMap<VertexId, Rational> = g.vertices().iter().map(|v| (v.clone(), Rational::zero())).collect();
            for (v, x) in vs {
                m.insert(VertexId::new(*v), int(*x));
            }
            m
        })
        .collect();
    let mut rays = Vec::new();
    let mut ray_slopes: Vec<BTreeMap<EdgeId, i64>> = vec![BTreeMap::new(); vals.len()];
    for (k, m) in vals.iter().enumerate() {
        for v in g.vertices() {
            let mut out = Rational::zero();
            for e in g.edges() {
                if &e.from == v {
                    out += (&m[&e.to] - &m[&e.from]) / &e.length;
                }
                if &e.to == v {
                    out += (&m[&e.from] - &m[&e.to]) / &e.length;
                }
            }
            if !out.is_integer() {
                return Err(Error::Config(format!("coordinate {k} has a fractional slope at {v}")));
            }
            let s: i64 = out.to_integer().try_into().map_err(|_| Error::Config("slope overflow".into()))?;
            for j in 0..s.abs() {
                let id = EdgeId::new(format!("h{k}.{v}.{j}"));
                rays.push((id.clone(), Point::Vertex(v.clone()), VertexId::new(format!("{id}:inf"))));
                ray_slopes[k].insert(id, -s.signum());
            }
        }
    }
    let sk = ExtendedGraph::new(g.clone(), rays)?;
    let coords = vals
        .iter()
        .zip(&ray_slopes)
        .map(|(m, slopes)| {
            let edges = g
                .edges()
                .iter()
                .map(|e| {
                    (
                        e.id.clone(),
                        vec![Breakpoint::new(int(0), m[&e.from].clone()), Breakpoint::new(e.length.clone(), m[&e.to].clone())],
                    )
                })
                .collect();
            let rays = sk
                .rays()
                .iter()
                .map(|r| (r.id.clone(), RayPiece { anchor: m[&r.attach].clone(), slope: slopes.get(&r.id).copied().unwrap_or(0) }))
                .collect();
            PlFunction::from_parts(edges, rays)
        })
        .collect();
    Embedding::new(sk, coords)
}

fn circle_with_spokes(spokes: usize) -> MetricGraph {
    let mut vs = vec!["a", "b"];
    let names = ["s0", "s1", "s2", "s3"];
    vs.extend(names.iter().take(spokes));
    let mut es = vec![("top", "a", "b", int(3)), ("bot", "b", "a", int(2))];
    let feet = ["a", "b", "a", "b"];
    let ids = ["k0", "k1", "k2", "k3"];
    for i in 0..spokes {
        es.push((ids[i], feet[i], names[i], rat(3, 2)));
    }
    graph(&vs, &es)
}

fn theta(lengths: [Rational; 3]) -> MetricGraph {
    let [x, y, z] = lengths;
    graph(&["a", "b"], &[("t0", "a", "b", x), ("t1", "a", "b", y), ("t2", "a", "b", z)])
}

fn dumbbell() -> MetricGraph {
    graph(
        &["a", "a2", "b", "b2"],
        &[
            ("la", "a", "a2", int(1)),
            ("lb", "a2", "a", int(1)),
            ("bar", "a", "b", int(2)),
            ("ra", "b", "b2", int(1)),
            ("rb", "b2", "b", int(1)),
        ],
    )
}

/// Named sample embeddings.
pub fn suite() -> Vec<(String, Embedding)> {
    let path = graph(&["a", "b", "c"], &[("e0", "a", "b", int(1)), ("e1", "b", "c", int(2))]);
    let star = graph(&["o", "x", "y", "z"], &[("ox", "o", "x", int(1)), ("oy", "o", "y", int(1)), ("oz", "o", "z", int(2))]);
    let caterpillar = graph(
        &["a", "b", "c", "d", "x", "y"],
        &[
            ("ab", "a", "b", int(1)),
            ("bc", "b", "c", rat(1, 2)),
            ("cd", "c", "d", int(1)),
            ("bx", "b", "x", int(1)),
            ("cy", "c", "y", rat(3, 2)),
        ],
    );
    let triangle = graph(&["a", "b", "c"], &[("ab", "a", "b", int(1)), ("bc", "b", "c", int(1)), ("ca", "c", "a", int(1))]);
    let k4 = graph(
        &["a", "b", "c", "d"],
        &[
            ("ab", "a", "b", int(1)),
            ("ac", "a", "c", int(1)),
            ("ad", "a", "d", int(1)),
            ("bc", "b", "c", int(1)),
            ("bd", "b", "d", int(1)),
            ("cd", "c", "d", int(1)),
        ],
    );
    let point = graph(&["o"], &[]);
    let tate = tate_demo(&int(1)).expect("tate");
    let mut out: Vec<(String, Embedding)> = vec![
        ("tree-path".into(), bare(path.clone(), &[])),
        ("tree-star".into(), bare(star.clone(), &[])),
        ("tree-caterpillar-rays".into(), bare(caterpillar, &["a", "d", "x"])),
        ("tree-star-folded".into(), harmonize(star.clone(), &[vec![("x", 1), ("y", 1), ("z", 2)]]).expect("star")),
        (
            "tree-star-folded-plane".into(),
            harmonize(star.clone(), &[vec![("x", 1), ("y", 1), ("z", 2)], vec![("z", 2)]]).expect("star"),
        ),
        ("tree-path-arclength".into(), harmonize(path, &[vec![("b", 1), ("c", 3)]]).expect("path")),
        ("point-rays".into(), bare(point, &["o", "o", "o"])),
        ("circle".into(), bare(circle_with_spokes(0), &[])),
        ("circle-spoke".into(), bare(circle_with_spokes(1), &["s0"])),
        ("circle-three-spokes".into(), bare(circle_with_spokes(3), &[])),
        ("circle-folded".into(), harmonize(circle_with_spokes(0), &[vec![("b", 6)]]).expect("circle")),
        ("circle-spokes-raw".into(), harmonize(circle_with_spokes(2), &[vec![("b", 6), ("s0", 3), ("s1", 6)]]).expect("spokes")),
        ("triangle-rays".into(), bare(triangle.clone(), &["a", "b", "c"])),
        ("triangle-raw".into(), harmonize(triangle, &[vec![("b", 1), ("c", 1)], vec![("c", 1)]]).expect("triangle")),
        ("theta".into(), bare(theta([int(1), int(1), int(1)]), &[])),
        ("theta-uneven-rays".into(), bare(theta([int(1), rat(1, 2), int(2)]), &["a", "b"])),
        ("theta-folded".into(), harmonize(theta([int(1), int(1), int(1)]), &[vec![("b", 1)]]).expect("theta")),
        ("dumbbell".into(), bare(dumbbell(), &[])),
        ("dumbbell-rays".into(), bare(dumbbell(), &["a2", "b2"])),
        ("dumbbell-raw".into(), harmonize(dumbbell(), &[vec![("a2", 1), ("b", 2), ("b2", 3)]]).expect("dumbbell")),
        ("k4".into(), bare(k4, &[])),
        ("tate".into(), tate.embedding.clone()),
        ("tate-first-coordinate".into(), tate.embedding.project(&[0]).expect("projection")),
    ];
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}
