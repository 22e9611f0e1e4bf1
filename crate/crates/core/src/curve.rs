//! Weighted rational 1-complexes in `[-inf, +inf]^n`, with balancing and the
//! smoothness lint.
//!
//! Finite vertices have all coordinates finite. An infinite vertex is the end
//! of one or more rays; its infinite coordinates are exactly the support of
//! the ray direction, with matching signs.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{content, int, ExtRational, Rational};
use crate::snf::elementary_divisors;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TropVertex {
    pub id: String,
    pub coords: Vec<ExtRational>,
}

impl TropVertex {
    pub fn is_infinite(&self) -> bool {
        self.coords.iter().any(|c| c.finite().is_none())
    }

    pub fn finite_coords(&self) -> Option<Vec<Rational>> {
        self.coords.iter().map(|c| c.finite().cloned()).collect()
    }
}

/// Edge from `from` to `to`. `direction` is the primitive outgoing vector at
/// `from`; `length` is the lattice length, absent for rays.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TropEdge {
    pub id: String,
    pub from: String,
    pub to: String,
    pub direction: Vec<i64>,
    pub weight: u64,
    pub length: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropicalCurve {
    dim: usize,
    vertices: Vec<TropVertex>,
    edges: Vec<TropEdge>,
    index: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BalancingReport {
    pub balanced: bool,
    /// Nonzero weighted direction sums, by finite vertex id.
    pub defects: BTreeMap<String, Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SingularReason {
    /// The directions span a lattice of the wrong rank.
    RankDefect { rank: usize, expected: usize },
    /// Right rank, but some elementary divisor exceeds one.
    NotSaturated { elementary_divisors: Vec<String> },
    /// An infinite vertex where several rays meet.
    InfiniteValence { valence: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexCheck {
    pub vertex: String,
    pub smooth: bool,
    pub elementary_divisors: Vec<String>,
    pub reason: Option<SingularReason>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SingularVertex {
    pub vertex: String,
    pub reason: SingularReason,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SmoothReport {
    pub smooth: bool,
    pub singular_vertices: Vec<SingularVertex>,
    pub heavy_edges: Vec<String>,
}

impl TropicalCurve {
    /// Validates and sorts vertices and edges by id.
    pub fn new(dim: usize, mut vertices: Vec<TropVertex>, mut edges: Vec<TropEdge>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyCoordinates);
        }
        vertices.sort();
        edges.sort();
        let mut index = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if v.coords.len() != dim {
                return Err(Error::InvalidCurve(format!("vertex {} has {} coordinates", v.id, v.coords.len())));
            }
            if index.insert(v.id.clone(), i).is_some() {
                return Err(Error::DuplicateId(v.id.clone()));
            }
        }
        let mut ids = BTreeSet::new();
        let mut used = vec![false; vertices.len()];
        for e in &edges {
            if !ids.insert(&e.id) {
                return Err(Error::DuplicateId(e.id.clone()));
            }
            let a = *index.get(&e.from).ok_or_else(|| Error::UnknownVertex(e.from.clone()))?;
            let b = *index.get(&e.to).ok_or_else(|| Error::UnknownVertex(e.to.clone()))?;
            used[a] = true;
            used[b] = true;
            check_edge_geometry(dim, &vertices[a], &vertices[b], e)?;
        }
        for (v, u) in vertices.iter().zip(&used) {
            if v.is_infinite() && !u {
                return Err(Error::InvalidCurve(format!("infinite vertex {} has no edge", v.id)));
            }
        }
        let curve = TropicalCurve { dim, vertices, edges, index };
        curve.check_connected()?;
        Ok(curve)
    }

    fn check_connected(&self) -> Result<()> {
        let finite: Vec<usize> = (0..self.vertices.len()).filter(|&i| !self.vertices[i].is_infinite()).collect();
        let Some(&start) = finite.first() else {
            return Err(Error::InvalidCurve("no finite vertex".into()));
        };
        let mut seen = vec![false; self.vertices.len()];
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for e in &self.edges {
                let (a, b) = (self.index[&e.from], self.index[&e.to]);
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        if seen.iter().all(|&s| s) {
            Ok(())
        } else {
            Err(Error::InvalidCurve("curve is disconnected".into()))
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[TropVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[TropEdge] {
        &self.edges
    }

    pub fn vertex(&self, id: &str) -> Result<&TropVertex> {
        self.index
            .get(id)
            .map(|&i| &self.vertices[i])
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn edge(&self, id: &str) -> Result<&TropEdge> {
        self.edges
            .binary_search_by(|e| e.id.as_str().cmp(id))
            .map(|i| &self.edges[i])
            .map_err(|_| Error::UnknownEdge(id.to_string()))
    }

    /// Adjacent edges of `v` with their outgoing directions at `v`.
    pub fn outgoing(&self, v: &str) -> Vec<(&TropEdge, Vec<i64>)> {
        let mut out = Vec::new();
        for e in &self.edges {
            if e.from == v {
                out.push((e, e.direction.clone()));
            }
            if e.to == v {
                out.push((e, e.direction.iter().map(|x| -x).collect()));
            }
        }
        out
    }

    pub fn valence(&self, v: &str) -> usize {
        self.outgoing(v).len()
    }

    pub fn check_balancing(&self) -> BalancingReport {
        let mut defects = BTreeMap::new();
        for v in self.vertices.iter().filter(|v| !v.is_infinite()) {
            let mut sum = vec![0i64; self.dim];
            for (e, d) in self.outgoing(&v.id) {
                for (s, x) in sum.iter_mut().zip(d) {
                    *s += e.weight as i64 * x;
                }
            }
            if sum.iter().any(|&x| x != 0) {
                defects.insert(v.id.clone(), sum);
            }
        }
        BalancingReport { balanced: defects.is_empty(), defects }
    }

    /// Rays of the local cone at `v`: distinct outgoing directions with
    /// summed weights.
    pub fn local_cone(&self, v: &str) -> Result<Vec<(Vec<i64>, u64)>> {
        let vertex = self.vertex(v)?;
        if vertex.is_infinite() {
            return Err(Error::InvalidCurve(format!("{v} is an infinite vertex")));
        }
        let mut cone: BTreeMap<Vec<i64>, u64> = BTreeMap::new();
        for (e, d) in self.outgoing(v) {
            *cone.entry(d).or_insert(0) += e.weight;
        }
        Ok(cone.into_iter().collect())
    }

    pub fn check_vertex_smooth(&self, v: &str) -> Result<VertexCheck> {
        let vertex = self.vertex(v)?;
        let out = self.outgoing(v);
        if vertex.is_infinite() {
            let smooth = out.len() == 1;
            return Ok(VertexCheck {
                vertex: v.to_string(),
                smooth,
                elementary_divisors: Vec::new(),
                reason: (!smooth).then_some(SingularReason::InfiniteValence { valence: out.len() }),
            });
        }
        let rows: Vec<Vec<i64>> = out.into_iter().map(|(_, d)| d).collect();
        let (smooth, divisors, reason) = lattice_check(&rows);
        Ok(VertexCheck {
            vertex: v.to_string(),
            smooth,
            elementary_divisors: divisors,
            reason,
        })
    }

    pub fn check_edge_smooth(&self, e: &str) -> Result<bool> {
        Ok(self.edge(e)?.weight == 1)
    }

    pub fn check_smooth(&self) -> SmoothReport {
        let mut singular_vertices = Vec::new();
        for v in &self.vertices {
            let check = self.check_vertex_smooth(&v.id).expect("vertex exists");
            if let Some(reason) = check.reason {
                singular_vertices.push(SingularVertex { vertex: v.id.clone(), reason });
            }
        }
        let heavy_edges: Vec<String> = self.edges.iter().filter(|e| e.weight != 1).map(|e| e.id.clone()).collect();
        SmoothReport {
            smooth: singular_vertices.is_empty() && heavy_edges.is_empty(),
            singular_vertices,
            heavy_edges,
        }
    }

    /// Applies an integer matrix to every coordinate vector and direction.
    /// Only meaningful for unimodular `m` on curves without infinite
    /// vertices; used to test invariance of the smoothness lint.
    pub fn transform(&self, m: &[Vec<i64>]) -> Result<TropicalCurve> {
        let apply = |x: &[i64]| -> Vec<i64> { m.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect() };
        let vertices = self
            .vertices
            .iter()
            .map(|v| {
                let c = v
                    .finite_coords()
                    .ok_or_else(|| Error::InvalidCurve("cannot transform infinite vertex".into()))?;
                let coords = m
                    .iter()
                    .map(|row| ExtRational::Finite(row.iter().zip(&c).map(|(a, b)| int(*a) * b).sum()))
                    .collect();
                Ok(TropVertex { id: v.id.clone(), coords })
            })
            .collect::<Result<Vec<_>>>()?;
        let edges = self
            .edges
            .iter()
            .map(|e| TropEdge { direction: apply(&e.direction), ..e.clone() })
            .collect();
        TropicalCurve::new(m.len(), vertices, edges)
    }
}

/// Smoothness of a finite vertex from its outgoing directions: rank one less
/// than the valence and all elementary divisors equal to one.
pub fn lattice_check(rows: &[Vec<i64>]) -> (bool, Vec<String>, Option<SingularReason>) {
    let ed: Vec<BigInt> = elementary_divisors(rows);
    let strings: Vec<String> = ed.iter().map(|d| d.to_string()).collect();
    let expected = rows.len().saturating_sub(1);
    if ed.len() != expected || rows.is_empty() {
        return (false, strings, Some(SingularReason::RankDefect { rank: ed.len(), expected }));
    }
    if ed.iter().any(|d| !d.is_one()) {
        return (
            false,
            strings.clone(),
            Some(SingularReason::NotSaturated { elementary_divisors: strings }),
        );
    }
    (true, strings, None)
}

fn check_edge_geometry(dim: usize, a: &TropVertex, b: &TropVertex, e: &TropEdge) -> Result<()> {
    let bad = |msg: &str| Error::InvalidCurve(format!("edge {}: {msg}", e.id));
    if e.direction.len() != dim {
        return Err(bad("direction has wrong dimension"));
    }
    if e.weight == 0 {
        return Err(bad("weight must be positive"));
    }
    if content(&e.direction) != 1 {
        return Err(bad("direction is not primitive"));
    }
    let pa = a.finite_coords().ok_or_else(|| bad("tail must be a finite vertex"))?;
    match (b.finite_coords(), &e.length) {
        (Some(pb), Some(len)) => {
            if !len.is_positive() {
                return Err(bad("length must be positive"));
            }
            for i in 0..dim {
                if pb[i] != &pa[i] + len * int(e.direction[i]) {
                    return Err(bad("endpoints do not match direction and length"));
                }
            }
        }
        (None, None) => {
            for i in 0..dim {
                let ok = match e.direction[i].signum() {
                    0 => b.coords[i] == ExtRational::Finite(pa[i].clone()),
                    1 => b.coords[i] == ExtRational::PlusInfinity,
                    _ => b.coords[i] == ExtRational::MinusInfinity,
                };
                if !ok {
                    return Err(bad("infinite endpoint does not match ray direction"));
                }
            }
        }
        _ => return Err(bad("length must be present exactly for finite edges")),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(id: &str, c: &[i64]) -> TropVertex {
        TropVertex { id: id.into(), coords: c.iter().map(|&x| ExtRational::Finite(int(x))).collect() }
    }

    /// Star of rays from the origin.
    pub(crate) fn star(dirs: &[(Vec<i64>, u64)]) -> TropicalCurve {
        let mut vertices = vec![fin("o", &[0, 0])];
        let mut edges = Vec::new();
        for (i, (d, w)) in dirs.iter().enumerate() {
            let coords = d
                .iter()
                .map(|&x| match x.signum() {
                    0 => ExtRational::Finite(int(0)),
                    1 => ExtRational::PlusInfinity,
                    _ => ExtRational::MinusInfinity,
                })
                .collect();
            vertices.push(TropVertex { id: format!("inf{i}"), coords });
            edges.push(TropEdge {
                id: format!("r{i}"),
                from: "o".into(),
                to: format!("inf{i}"),
                direction: d.clone(),
                weight: *w,
                length: None,
            });
        }
        TropicalCurve::new(2, vertices, edges).unwrap()
    }

    #[test]
    fn fig1_left_is_smooth_and_balanced() {
        let c = star(&[(vec![-1, 0], 1), (vec![0, -1], 1), (vec![1, 1], 1)]);
        assert!(c.check_balancing().balanced);
        assert!(c.check_vertex_smooth("o").unwrap().smooth);
        assert!(c.check_smooth().smooth);
    }

    #[test]
    fn fig1_middle_and_right() {
        let c = star(&[(vec![1, 0], 1), (vec![-1, 0], 1), (vec![0, 1], 1), (vec![0, -1], 1)]);
        assert!(c.check_balancing().balanced);
        let r = c.check_vertex_smooth("o").unwrap();
        assert_eq!(r.reason, Some(SingularReason::RankDefect { rank: 2, expected: 3 }));
        let c = star(&[(vec![2, -1], 1), (vec![-1, 2], 1), (vec![-1, -1], 1)]);
        assert!(c.check_balancing().balanced);
        let r = c.check_vertex_smooth("o").unwrap();
        assert_eq!(r.elementary_divisors, vec!["1", "3"]);
        assert!(matches!(r.reason, Some(SingularReason::NotSaturated { .. })));
    }

    #[test]
    fn unbalanced_defect() {
        let c = star(&[(vec![1, 0], 1), (vec![-1, 0], 2)]);
        let r = c.check_balancing();
        assert_eq!(r.defects["o"], vec![-1, 0]);
        assert!(!c.check_edge_smooth("r1").unwrap());
    }

    #[test]
    fn rays_meeting_at_infinity() {
        let vertices = vec![
            fin("a", &[0, 0]),
            fin("b", &[0, 1]),
            TropVertex { id: "inf".into(), coords: vec![ExtRational::PlusInfinity, ExtRational::Finite(int(0))] },
        ];
        // two parallel rays at heights 0 and 1 cannot share an infinite vertex
        let edges = vec![
            TropEdge { id: "r".into(), from: "a".into(), to: "inf".into(), direction: vec![1, 0], weight: 1, length: None },
            TropEdge { id: "s".into(), from: "b".into(), to: "inf".into(), direction: vec![1, 0], weight: 1, length: None },
        ];
        assert!(TropicalCurve::new(2, vertices.clone(), edges).is_err());
        let edges = vec![
            TropEdge { id: "ab".into(), from: "a".into(), to: "b".into(), direction: vec![0, 1], weight: 1, length: Some(int(1)) },
            TropEdge { id: "r".into(), from: "a".into(), to: "inf".into(), direction: vec![1, 0], weight: 1, length: None },
            TropEdge { id: "s".into(), from: "a".into(), to: "inf".into(), direction: vec![1, 0], weight: 1, length: None },
        ];
        let c = TropicalCurve::new(2, vertices, edges).unwrap();
        let r = c.check_smooth();
        assert!(r.singular_vertices.iter().any(|s| s.vertex == "inf"
            && s.reason == SingularReason::InfiniteValence { valence: 2 }));
        assert_eq!(c.local_cone("a").unwrap(), vec![(vec![0, 1], 1), (vec![1, 0], 2)]);
    }
}
