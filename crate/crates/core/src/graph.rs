//! Metric graphs with exact rational edge lengths, and extended graphs carrying
//! infinite leaf rays.
//!
//! Graphs are immutable. Subdividing returns a new graph that remembers how the
//! old edges were cut, so points and functions expressed against an earlier
//! graph in the same lineage can be transported with [`MetricGraph::transport`].

use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};
use std::cmp::Reverse;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub String);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub String);

impl VertexId {
    pub fn new(s: impl Into<String>) -> Self {
        VertexId(s.into())
    }
}

impl EdgeId {
    pub fn new(s: impl Into<String>) -> Self {
        EdgeId(s.into())
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub from: VertexId,
    pub to: VertexId,
    pub length: Rational,
}

impl Edge {
    pub fn other_end(&self, v: &VertexId) -> &VertexId {
        if &self.from == v {
            &self.to
        } else {
            &self.from
        }
    }
}

/// A location on an edge given by its offset from the `from` endpoint.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GraphPoint {
    pub edge: EdgeId,
    pub offset: Rational,
}

impl GraphPoint {
    pub fn new(edge: impl Into<String>, offset: Rational) -> Self {
        GraphPoint {
            edge: EdgeId(edge.into()),
            offset,
        }
    }
}

/// Canonical form of a point: vertices are never written as edge offsets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Vertex(VertexId),
    OnEdge(EdgeId, Rational),
    /// The infinite end of a ray, named by its leaf vertex.
    AtInfinity(VertexId),
}

impl Point {
    pub fn vertex(id: impl Into<String>) -> Self {
        Point::Vertex(VertexId(id.into()))
    }

    pub fn on_edge(edge: impl Into<String>, offset: Rational) -> Self {
        Point::OnEdge(EdgeId(edge.into()), offset)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Point::AtInfinity(_))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Vertex(v) => write!(f, "{v}"),
            Point::OnEdge(e, t) => write!(f, "{e}@{t}"),
            Point::AtInfinity(v) => write!(f, "{v}(inf)"),
        }
    }
}

/// Record of one cut edge: where it was cut and what replaced it.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Cut {
    edge: Edge,
    cuts: Vec<Rational>,
    pieces: Vec<EdgeId>,
    vertices: Vec<VertexId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    From,
    To,
}

/// One half-edge at a vertex: the edge index and which end sits at the vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Incidence {
    pub edge: usize,
    pub end: End,
}

#[derive(Debug, Clone)]
pub struct MetricGraph {
    vertices: Vec<VertexId>,
    edges: Vec<Edge>,
    edge_index: BTreeMap<EdgeId, usize>,
    vertex_index: BTreeMap<VertexId, usize>,
    history: BTreeMap<EdgeId, Cut>,
    origins: BTreeMap<EdgeId, (EdgeId, Rational)>,
}

impl PartialEq for MetricGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}

impl Eq for MetricGraph {}

impl MetricGraph {
    /// Validates and builds a connected metric graph. Loop edges are cut at
    /// their midpoint so that every point has a unique `(edge, offset)` form.
    pub fn new(vertices: Vec<VertexId>, edges: Vec<Edge>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut vset = BTreeSet::new();
        for v in &vertices {
            if !vset.insert(v.clone()) {
                return Err(Error::DuplicateId(v.0.clone()));
            }
        }
        let mut eset = BTreeSet::new();
        for e in &edges {
            if !eset.insert(e.id.clone()) {
                return Err(Error::DuplicateId(e.id.0.clone()));
            }
            if !e.length.is_positive() {
                return Err(Error::NonpositiveLength(e.id.0.clone()));
            }
            for v in [&e.from, &e.to] {
                if !vset.contains(v) {
                    return Err(Error::DanglingEndpoint {
                        edge: e.id.0.clone(),
                        vertex: v.0.clone(),
                    });
                }
            }
        }
        let mut g = Self::assemble(vertices, edges, BTreeMap::new(), BTreeMap::new());
        if !g.is_connected() {
            return Err(Error::DisconnectedGraph);
        }
        let loops: Vec<GraphPoint> = g
            .edges
            .iter()
            .filter(|e| e.from == e.to)
            .map(|e| GraphPoint {
                edge: e.id.clone(),
                offset: &e.length / Rational::from_integer(2.into()),
            })
            .collect();
        if !loops.is_empty() {
            g = g.subdivide_many(&loops)?;
        }
        Ok(g)
    }

    fn assemble(
        mut vertices: Vec<VertexId>,
        mut edges: Vec<Edge>,
        history: BTreeMap<EdgeId, Cut>,
        origins: BTreeMap<EdgeId, (EdgeId, Rational)>,
    ) -> Self {
        vertices.sort();
        edges.sort_by(|a, b| a.id.cmp(&b.id));
        let edge_index = edges.iter().enumerate().map(|(i, e)| (e.id.clone(), i)).collect();
        let vertex_index = vertices.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        MetricGraph {
            vertices,
            edges,
            edge_index,
            vertex_index,
            history,
            origins,
        }
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: &EdgeId) -> Result<&Edge> {
        self.edge_index
            .get(id)
            .map(|&i| &self.edges[i])
            .ok_or_else(|| Error::UnknownEdge(id.0.clone()))
    }

    pub fn edge_position(&self, id: &EdgeId) -> Option<usize> {
        self.edge_index.get(id).copied()
    }

    pub fn vertex_position(&self, id: &VertexId) -> Option<usize> {
        self.vertex_index.get(id).copied()
    }

    pub fn has_vertex(&self, id: &VertexId) -> bool {
        self.vertex_index.contains_key(id)
    }

    pub fn has_edge(&self, id: &EdgeId) -> bool {
        self.edge_index.contains_key(id)
    }

    /// True if the id names a current edge or one that was cut in an ancestor.
    pub fn knows_edge(&self, id: &EdgeId) -> bool {
        self.has_edge(id) || self.history.contains_key(id)
    }

    pub fn betti_number(&self) -> usize {
        self.edges.len() + 1 - self.vertices.len()
    }

    pub fn total_length(&self) -> Rational {
        self.edges.iter().map(|e| e.length.clone()).sum()
    }

    pub fn incidences(&self) -> Vec<Vec<Incidence>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for (i, e) in self.edges.iter().enumerate() {
            adj[self.vertex_index[&e.from]].push(Incidence { edge: i, end: End::From });
            adj[self.vertex_index[&e.to]].push(Incidence { edge: i, end: End::To });
        }
        adj
    }

    pub fn degree(&self, v: &VertexId) -> usize {
        self.edges
            .iter()
            .map(|e| usize::from(&e.from == v) + usize::from(&e.to == v))
            .sum()
    }

    fn is_connected(&self) -> bool {
        let adj = self.incidences();
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for inc in &adj[v] {
                let e = &self.edges[inc.edge];
                let w = self.vertex_index[e.other_end(&self.vertices[v])];
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Resolves an edge offset (possibly against an edge that has since been
    /// cut) into canonical form on this graph.
    pub fn canonical(&self, p: &GraphPoint) -> Result<Point> {
        let (edge, len) = if let Some(e) = self.edge_position(&p.edge) {
            let e = &self.edges[e];
            (e.clone(), e.length.clone())
        } else if let Some(cut) = self.history.get(&p.edge) {
            (cut.edge.clone(), cut.edge.length.clone())
        } else {
            return Err(Error::UnknownEdge(p.edge.0.clone()));
        };
        if p.offset.is_negative() || p.offset > len {
            return Err(Error::OffsetOutOfRange {
                edge: p.edge.0.clone(),
                offset: format_rational(&p.offset),
            });
        }
        if p.offset.is_zero() {
            return Ok(Point::Vertex(edge.from));
        }
        if p.offset == len {
            return Ok(Point::Vertex(edge.to));
        }
        match self.history.get(&p.edge) {
            None => Ok(Point::OnEdge(p.edge.clone(), p.offset.clone())),
            Some(cut) => {
                let mut start = Rational::zero();
                for (i, c) in cut.cuts.iter().enumerate() {
                    if &p.offset == c {
                        return Ok(Point::Vertex(cut.vertices[i].clone()));
                    }
                    if &p.offset < c {
                        return self.canonical(&GraphPoint {
                            edge: cut.pieces[i].clone(),
                            offset: &p.offset - &start,
                        });
                    }
                    start = c.clone();
                }
                self.canonical(&GraphPoint {
                    edge: cut.pieces.last().unwrap().clone(),
                    offset: &p.offset - &start,
                })
            }
        }
    }

    /// Carries a point of an ancestor graph over to this graph.
    pub fn transport(&self, p: &Point) -> Result<Point> {
        match p {
            Point::OnEdge(e, t) => self.canonical(&GraphPoint {
                edge: e.clone(),
                offset: t.clone(),
            }),
            Point::Vertex(v) => {
                if self.has_vertex(v) {
                    Ok(p.clone())
                } else {
                    Err(Error::UnknownVertex(v.0.clone()))
                }
            }
            Point::AtInfinity(_) => Ok(p.clone()),
        }
    }

    /// Checks that a canonical point lies on this graph's finite part.
    pub fn check_point(&self, p: &Point) -> Result<()> {
        match p {
            Point::Vertex(v) if self.has_vertex(v) => Ok(()),
            Point::Vertex(v) => Err(Error::UnknownVertex(v.0.clone())),
            Point::OnEdge(e, t) => {
                let edge = self.edge(e)?;
                if t.is_positive() && t < &edge.length {
                    Ok(())
                } else {
                    Err(Error::OffsetOutOfRange {
                        edge: e.0.clone(),
                        offset: format_rational(t),
                    })
                }
            }
            Point::AtInfinity(v) => Err(Error::UnknownVertex(v.0.clone())),
        }
    }

    /// The current edge and start offset of each piece an ancestor edge was cut
    /// into. For a current edge this is the edge itself at offset zero.
    pub fn pieces_of(&self, id: &EdgeId) -> Result<Vec<(EdgeId, Rational)>> {
        if self.has_edge(id) {
            return Ok(vec![(id.clone(), Rational::zero())]);
        }
        let cut = self
            .history
            .get(id)
            .ok_or_else(|| Error::UnknownEdge(id.0.clone()))?;
        let mut out = Vec::new();
        let mut start = Rational::zero();
        for (i, piece) in cut.pieces.iter().enumerate() {
            for (e, s) in self.pieces_of(piece)? {
                out.push((e, &start + s));
            }
            if i < cut.cuts.len() {
                start = cut.cuts[i].clone();
            }
        }
        Ok(out)
    }

    /// Where a current edge sits inside some ancestor edge, following the cut
    /// history until `known` accepts an edge id.
    pub fn origin_in(&self, id: &EdgeId, known: impl Fn(&EdgeId) -> bool) -> Option<(EdgeId, Rational)> {
        let mut cur = id.clone();
        let mut offset = Rational::zero();
        loop {
            if known(&cur) {
                return Some((cur, offset));
            }
            let (parent, start) = self.origins.get(&cur)?;
            offset += start;
            cur = parent.clone();
        }
    }

    /// Subdivides at a single interior point.
    pub fn subdivide_at(&self, p: &GraphPoint) -> Result<(MetricGraph, VertexId)> {
        match self.canonical(p)? {
            Point::OnEdge(e, t) => {
                let g = self.subdivide_many(&[GraphPoint { edge: e.clone(), offset: t.clone() }])?;
                let v = match g.transport(&Point::OnEdge(e, t))? {
                    Point::Vertex(v) => v,
                    _ => unreachable!("subdivision point must become a vertex"),
                };
                Ok((g, v))
            }
            _ => Err(Error::PointIsVertex),
        }
    }

    /// Subdivides at every listed point; points that are already vertices are
    /// ignored.
    pub fn subdivide_many(&self, points: &[GraphPoint]) -> Result<MetricGraph> {
        let mut per_edge: BTreeMap<EdgeId, BTreeSet<Rational>> = BTreeMap::new();
        for p in points {
            if let Point::OnEdge(e, t) = self.canonical(p)? {
                per_edge.entry(e).or_default().insert(t);
            }
        }
        if per_edge.is_empty() {
            return Ok(self.clone());
        }
        let mut vertices = self.vertices.clone();
        let mut edges = Vec::new();
        let mut history = self.history.clone();
        let mut origins = self.origins.clone();
        for e in &self.edges {
            let Some(cuts) = per_edge.get(&e.id) else {
                edges.push(e.clone());
                continue;
            };
            let cuts: Vec<Rational> = cuts.iter().cloned().collect();
            let new_vertices: Vec<VertexId> = cuts
                .iter()
                .map(|c| VertexId(format!("{}@{}", e.id, c)))
                .collect();
            let pieces: Vec<EdgeId> = (0..=cuts.len())
                .map(|i| EdgeId(format!("{}#{}", e.id, i)))
                .collect();
            for v in &new_vertices {
                if self.has_vertex(v) {
                    return Err(Error::DuplicateId(v.0.clone()));
                }
            }
            let mut bounds = vec![Rational::zero()];
            bounds.extend(cuts.iter().cloned());
            bounds.push(e.length.clone());
            let mut ends = vec![e.from.clone()];
            ends.extend(new_vertices.iter().cloned());
            ends.push(e.to.clone());
            for i in 0..pieces.len() {
                if self.has_edge(&pieces[i]) || history.contains_key(&pieces[i]) {
                    return Err(Error::DuplicateId(pieces[i].0.clone()));
                }
                edges.push(Edge {
                    id: pieces[i].clone(),
                    from: ends[i].clone(),
                    to: ends[i + 1].clone(),
                    length: &bounds[i + 1] - &bounds[i],
                });
                origins.insert(pieces[i].clone(), (e.id.clone(), bounds[i].clone()));
            }
            vertices.extend(new_vertices.iter().cloned());
            history.insert(
                e.id.clone(),
                Cut {
                    edge: e.clone(),
                    cuts,
                    pieces,
                    vertices: new_vertices,
                },
            );
        }
        Ok(Self::assemble(vertices, edges, history, origins))
    }

    /// Offset of an interior point within `e` (the point must not be a vertex).
    fn offset_on(&self, e: &EdgeId, p: &Point) -> Result<Rational> {
        match p {
            Point::OnEdge(pe, t) if pe == e => Ok(t.clone()),
            _ => Err(Error::PointsNotOnEdge(e.0.clone())),
        }
    }

    /// Distance measured inside the open edge, which can exceed the graph
    /// distance.
    pub fn edge_distance(&self, e: &EdgeId, p: &GraphPoint, q: &GraphPoint) -> Result<Rational> {
        self.edge(e)?;
        let p = self.canonical(p)?;
        let q = self.canonical(q)?;
        let a = self.offset_on(e, &p)?;
        let b = self.offset_on(e, &q)?;
        Ok((a - b).abs())
    }

    /// Shortest-path distance between two points of the metric realization.
    pub fn distance(&self, p: &GraphPoint, q: &GraphPoint) -> Result<Rational> {
        let p = self.canonical(p)?;
        let q = self.canonical(q)?;
        self.point_distance(&p, &q)
    }

    pub fn point_distance(&self, p: &Point, q: &Point) -> Result<Rational> {
        self.check_point(p)?;
        self.check_point(q)?;
        let starts = self.anchors(p)?;
        let dist = self.dijkstra(&starts);
        let mut best: Option<Rational> = None;
        let mut consider = |d: Rational| {
            if best.as_ref().map_or(true, |b| &d < b) {
                best = Some(d);
            }
        };
        for (v, d) in self.anchors(q)? {
            if let Some(dv) = &dist[v] {
                consider(dv + d);
            }
        }
        if let (Point::OnEdge(e1, t1), Point::OnEdge(e2, t2)) = (p, q) {
            if e1 == e2 {
                consider((t1 - t2).abs());
            }
        }
        if p == q {
            consider(Rational::zero());
        }
        Ok(best.expect("connected graph"))
    }

    fn anchors(&self, p: &Point) -> Result<Vec<(usize, Rational)>> {
        Ok(match p {
            Point::Vertex(v) => vec![(self.vertex_index[v], Rational::zero())],
            Point::OnEdge(e, t) => {
                let edge = self.edge(e)?;
                vec![
                    (self.vertex_index[&edge.from], t.clone()),
                    (self.vertex_index[&edge.to], &edge.length - t),
                ]
            }
            Point::AtInfinity(v) => return Err(Error::UnknownVertex(v.0.clone())),
        })
    }

    fn dijkstra(&self, starts: &[(usize, Rational)]) -> Vec<Option<Rational>> {
        let adj = self.incidences();
        let mut dist: Vec<Option<Rational>> = vec![None; self.vertices.len()];
        let mut heap = BinaryHeap::new();
        for (v, d) in starts {
            if dist[*v].as_ref().map_or(true, |x| d < x) {
                dist[*v] = Some(d.clone());
                heap.push(Reverse((d.clone(), *v)));
            }
        }
        while let Some(Reverse((d, v))) = heap.pop() {
            if dist[v].as_ref().is_some_and(|x| &d > x) {
                continue;
            }
            for inc in &adj[v] {
                let e = &self.edges[inc.edge];
                let w = self.vertex_index[e.other_end(&self.vertices[v])];
                let nd = &d + &e.length;
                if dist[w].as_ref().map_or(true, |x| &nd < x) {
                    dist[w] = Some(nd.clone());
                    heap.push(Reverse((nd, w)));
                }
            }
        }
        dist
    }

    /// Decides whether `edges` is the complement of a spanning tree.
    pub fn spanning_tree_complement(&self, edges: &[EdgeId]) -> Result<TreeCheck> {
        let chosen: BTreeSet<&EdgeId> = edges.iter().collect();
        let g = self.betti_number();
        if chosen.len() != g || edges.len() != g {
            return Err(Error::WrongCardinality {
                expected: g,
                got: chosen.len(),
            });
        }
        for e in &chosen {
            self.edge(e)?;
        }
        let mut uf = UnionFind::new(self.vertices.len());
        let mut tree = Vec::new();
        for e in self.edges.iter().filter(|e| !chosen.contains(&e.id)) {
            let a = self.vertex_index[&e.from];
            let b = self.vertex_index[&e.to];
            if !uf.union(a, b) {
                let mut cycle = self.tree_path(&tree, &e.from, &e.to);
                cycle.push(e.id.clone());
                return Ok(TreeCheck {
                    is_complement: false,
                    certificate: TreeCertificate::Cycle(cycle),
                });
            }
            tree.push(e.id.clone());
        }
        let root = uf.find(0);
        let unreachable: Vec<VertexId> = (0..self.vertices.len())
            .filter(|&v| uf.find(v) != root)
            .map(|v| self.vertices[v].clone())
            .collect();
        if !unreachable.is_empty() {
            return Ok(TreeCheck {
                is_complement: false,
                certificate: TreeCertificate::Disconnected(unreachable),
            });
        }
        Ok(TreeCheck {
            is_complement: true,
            certificate: TreeCertificate::SpanningTree(tree),
        })
    }

    /// Edges of the unique path between two vertices in a forest.
    fn tree_path(&self, forest: &[EdgeId], from: &VertexId, to: &VertexId) -> Vec<EdgeId> {
        let mut adj: BTreeMap<&VertexId, Vec<(&EdgeId, &VertexId)>> = BTreeMap::new();
        for id in forest {
            let e = &self.edges[self.edge_index[id]];
            adj.entry(&e.from).or_default().push((&e.id, &e.to));
            adj.entry(&e.to).or_default().push((&e.id, &e.from));
        }
        let mut prev: BTreeMap<&VertexId, (&EdgeId, &VertexId)> = BTreeMap::new();
        let mut queue = VecDeque::from([from]);
        let mut seen = BTreeSet::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                break;
            }
            for &(e, w) in adj.get(v).map(|x| x.as_slice()).unwrap_or(&[]) {
                if seen.insert(w) {
                    prev.insert(w, (e, v));
                    queue.push_back(w);
                }
            }
        }
        let mut path = Vec::new();
        let mut cur = to;
        while cur != from {
            let (e, p) = prev[cur];
            path.push(e.clone());
            cur = p;
        }
        path.reverse();
        path
    }

    /// A canonical spanning tree: breadth first from the least vertex, taking
    /// incident edges in id order.
    pub fn canonical_spanning_tree(&self) -> Vec<EdgeId> {
        let adj = self.incidences();
        let mut seen = vec![false; self.vertices.len()];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        let mut tree = Vec::new();
        while let Some(v) = queue.pop_front() {
            let mut incs = adj[v].clone();
            incs.sort_by_key(|i| i.edge);
            for inc in incs {
                let e = &self.edges[inc.edge];
                let w = self.vertex_index[e.other_end(&self.vertices[v])];
                if !seen[w] {
                    seen[w] = true;
                    tree.push(e.id.clone());
                    queue.push_back(w);
                }
            }
        }
        tree.sort();
        tree
    }

    /// All complements of spanning trees, in lexicographic order of the sorted
    /// edge index sets. Stops after `limit` sets.
    pub fn spanning_tree_complements(&self, limit: usize) -> Vec<Vec<EdgeId>> {
        let g = self.betti_number();
        let m = self.edges.len();
        let mut out = Vec::new();
        let mut combo: Vec<usize> = (0..g).collect();
        loop {
            let set: Vec<EdgeId> = combo.iter().map(|&i| self.edges[i].id.clone()).collect();
            if self
                .spanning_tree_complement(&set)
                .map(|c| c.is_complement)
                .unwrap_or(false)
            {
                out.push(set);
                if out.len() >= limit {
                    return out;
                }
            }
            // next combination
            let mut i = g;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if combo[i] < m - g + i {
                    combo[i] += 1;
                    for j in i + 1..g {
                        combo[j] = combo[j - 1] + 1;
                    }
                    break;
                }
            }
            if g == 0 {
                return out;
            }
        }
    }

    /// Checks four points of `e` for the pillar pattern: interior, strictly
    /// monotone along the edge, and equal outer gaps.
    pub fn validate_pillar_points(&self, e: &EdgeId, pts: &[GraphPoint; 4]) -> Result<bool> {
        self.edge(e)?;
        let mut offsets = Vec::with_capacity(4);
        for p in pts {
            match self.canonical(p)? {
                Point::OnEdge(pe, t) if &pe == e => offsets.push(t),
                _ => return Err(Error::PointNotInterior(e.0.clone())),
            }
        }
        let increasing = offsets.windows(2).all(|w| w[0] < w[1]);
        let decreasing = offsets.windows(2).all(|w| w[0] > w[1]);
        if !(increasing || decreasing) {
            return Ok(false);
        }
        let gap1 = (&offsets[1] - &offsets[0]).abs();
        let gap2 = (&offsets[3] - &offsets[2]).abs();
        Ok(gap1 == gap2)
    }

    /// Vertices and edges remaining after repeatedly pruning leaf vertices.
    /// For a tree this returns the least vertex alone.
    pub fn core(&self) -> (BTreeSet<VertexId>, BTreeSet<EdgeId>) {
        let mut alive_v: BTreeSet<VertexId> = self.vertices.iter().cloned().collect();
        let mut alive_e: BTreeSet<EdgeId> = self.edges.iter().map(|e| e.id.clone()).collect();
        loop {
            let mut deg: BTreeMap<&VertexId, usize> = alive_v.iter().map(|v| (v, 0)).collect();
            for e in self.edges.iter().filter(|e| alive_e.contains(&e.id)) {
                *deg.get_mut(&e.from).unwrap() += 1;
                *deg.get_mut(&e.to).unwrap() += 1;
            }
            let leaves: Vec<VertexId> = deg
                .iter()
                .filter(|(_, &d)| d <= 1)
                .map(|(v, _)| (*v).clone())
                .collect();
            if leaves.is_empty() || alive_v.len() == 1 {
                break;
            }
            if leaves.len() == alive_v.len() {
                // a single edge remains: keep its least endpoint
                let keep = leaves[0].clone();
                alive_e.clear();
                alive_v = BTreeSet::from([keep]);
                break;
            }
            for v in &leaves {
                alive_v.remove(v);
            }
            alive_e.retain(|id| {
                let e = &self.edges[self.edge_index[id]];
                alive_v.contains(&e.from) && alive_v.contains(&e.to)
            });
        }
        (alive_v, alive_e)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeCertificate {
    SpanningTree(Vec<EdgeId>),
    Cycle(Vec<EdgeId>),
    Disconnected(Vec<VertexId>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeCheck {
    pub is_complement: bool,
    pub certificate: TreeCertificate,
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != r {
            let n = self.parent[c];
            self.parent[c] = r;
            c = n;
        }
        r
    }

    /// Returns false if already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// An infinite leaf edge `[attach, leaf]`. `start` is the distance from the
/// point where the ray was originally attached, which grows when the initial
/// stretch of the ray is turned into a finite edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ray {
    pub id: EdgeId,
    pub attach: VertexId,
    pub leaf: VertexId,
    pub start: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedGraph {
    finite: MetricGraph,
    rays: Vec<Ray>,
}

impl ExtendedGraph {
    pub fn new(finite: MetricGraph, rays: Vec<(EdgeId, Point, VertexId)>) -> Result<Self> {
        ExtendedGraph {
            finite,
            rays: Vec::new(),
        }
        .with_rays(rays)
    }

    pub fn from_finite(finite: MetricGraph) -> Self {
        ExtendedGraph {
            finite,
            rays: Vec::new(),
        }
    }

    pub fn finite(&self) -> &MetricGraph {
        &self.finite
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    pub fn ray(&self, id: &EdgeId) -> Result<&Ray> {
        self.rays
            .iter()
            .find(|r| &r.id == id)
            .ok_or_else(|| Error::UnknownEdge(id.0.clone()))
    }

    pub fn ray_by_leaf(&self, leaf: &VertexId) -> Option<&Ray> {
        self.rays.iter().find(|r| &r.leaf == leaf)
    }

    pub fn is_ray(&self, id: &EdgeId) -> bool {
        self.rays.iter().any(|r| &r.id == id)
    }

    pub fn betti_number(&self) -> usize {
        self.finite.betti_number()
    }

    /// Attaches further rays, subdividing the finite part where a ray is
    /// attached at an interior point.
    pub fn with_rays(&self, new: Vec<(EdgeId, Point, VertexId)>) -> Result<Self> {
        let cuts: Vec<GraphPoint> = new
            .iter()
            .filter_map(|(_, p, _)| match p {
                Point::OnEdge(e, t) => Some(GraphPoint {
                    edge: e.clone(),
                    offset: t.clone(),
                }),
                _ => None,
            })
            .collect();
        let finite = self.finite.subdivide_many(&cuts)?;
        let mut rays = self.rays.clone();
        let mut ids: BTreeSet<EdgeId> = rays.iter().map(|r| r.id.clone()).collect();
        let mut leaves: BTreeSet<VertexId> = rays.iter().map(|r| r.leaf.clone()).collect();
        for (id, p, leaf) in new {
            if finite.knows_edge(&id) || !ids.insert(id.clone()) {
                return Err(Error::DuplicateId(id.0));
            }
            if finite.has_vertex(&leaf) || !leaves.insert(leaf.clone()) {
                return Err(Error::DuplicateId(leaf.0));
            }
            let attach = match finite.transport(&p)? {
                Point::Vertex(v) => v,
                other => {
                    return Err(Error::InvalidEmbedding(format!(
                        "ray {id} cannot attach at {other}"
                    )))
                }
            };
            rays.push(Ray {
                id,
                attach,
                leaf,
                start: Rational::zero(),
            });
        }
        rays.sort_by(|a, b| a.id.cmp(&b.id));
        Ok(ExtendedGraph { finite, rays })
    }

    /// Same rays, finite part subdivided at the given points.
    pub fn subdivide_many(&self, points: &[GraphPoint]) -> Result<Self> {
        let finite = self.finite.subdivide_many(points)?;
        Ok(ExtendedGraph {
            finite,
            rays: self.rays.clone(),
        })
    }

    /// Turns the first `length` of a ray into a finite edge named `{ray}#0`
    /// ending at a new vertex `{ray}@{start+length}`.
    pub fn split_ray(&self, id: &EdgeId, length: &Rational) -> Result<(Self, EdgeId)> {
        if !length.is_positive() {
            return Err(Error::NonpositiveLength(id.0.clone()));
        }
        let ray = self.ray(id)?.clone();
        let new_start = &ray.start + length;
        let vertex = VertexId(format!("{}@{}", ray.id, new_start));
        let mut k = 0;
        let edge_id = loop {
            let cand = EdgeId(format!("{}~{}", ray.id, k));
            if !self.finite.knows_edge(&cand) {
                break cand;
            }
            k += 1;
        };
        let mut vertices = self.finite.vertices.clone();
        vertices.push(vertex.clone());
        let mut edges = self.finite.edges.clone();
        edges.push(Edge {
            id: edge_id.clone(),
            from: ray.attach.clone(),
            to: vertex.clone(),
            length: length.clone(),
        });
        let mut origins = self.finite.origins.clone();
        origins.insert(edge_id.clone(), (ray.id.clone(), ray.start.clone()));
        let finite = MetricGraph::assemble(vertices, edges, self.finite.history.clone(), origins);
        let rays = self
            .rays
            .iter()
            .map(|r| {
                if r.id == ray.id {
                    Ray {
                        id: r.id.clone(),
                        attach: vertex.clone(),
                        leaf: r.leaf.clone(),
                        start: new_start.clone(),
                    }
                } else {
                    r.clone()
                }
            })
            .collect();
        Ok((ExtendedGraph { finite, rays }, edge_id))
    }

    /// Sets the `start` of the named rays, as read back from a file.
    pub fn with_ray_starts(mut self, starts: &BTreeMap<EdgeId, Rational>) -> Result<Self> {
        for (id, s) in starts {
            if s.is_negative() {
                return Err(Error::NonpositiveLength(id.0.clone()));
            }
            let r = self.rays.iter_mut().find(|r| &r.id == id).ok_or_else(|| Error::UnknownEdge(id.0.clone()))?;
            r.start = s.clone();
        }
        Ok(self)
    }

    /// Rays attached at a vertex.
    pub fn rays_at<'a>(&'a self, v: &'a VertexId) -> impl Iterator<Item = &'a Ray> + 'a {
        self.rays.iter().filter(move |r| &r.attach == v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn v(s: &str) -> VertexId {
        VertexId::new(s)
    }

    fn edge(id: &str, a: &str, b: &str, len: Rational) -> Edge {
        Edge {
            id: EdgeId::new(id),
            from: v(a),
            to: v(b),
            length: len,
        }
    }

    pub(crate) fn theta() -> MetricGraph {
        MetricGraph::new(
            vec![v("a"), v("b")],
            vec![
                edge("e1", "a", "b", int(1)),
                edge("e2", "a", "b", int(2)),
                edge("e3", "a", "b", int(3)),
            ],
        )
        .unwrap()
    }

    fn circle(len: i64) -> MetricGraph {
        MetricGraph::new(vec![v("o")], vec![edge("c", "o", "o", int(len))]).unwrap()
    }

    #[test]
    fn path_and_loop_betti() {
        let path = MetricGraph::new(vec![v("a"), v("b")], vec![edge("e", "a", "b", int(1))]).unwrap();
        assert_eq!(path.betti_number(), 0);
        let c = circle(3);
        assert_eq!(c.betti_number(), 1);
        assert_eq!(c.edges().len(), 2);
    }

    #[test]
    fn rejects_invalid_graphs() {
        let disc = MetricGraph::new(
            vec![v("a"), v("b"), v("c"), v("d")],
            vec![edge("e", "a", "b", int(1)), edge("f", "c", "d", int(1))],
        );
        assert_eq!(disc.unwrap_err(), Error::DisconnectedGraph);
        let neg = MetricGraph::new(vec![v("a"), v("b")], vec![edge("e", "a", "b", int(0))]);
        assert!(matches!(neg, Err(Error::NonpositiveLength(_))));
        let dangling = MetricGraph::new(vec![v("a")], vec![edge("e", "a", "z", int(1))]);
        assert!(matches!(dangling, Err(Error::DanglingEndpoint { .. })));
    }

    #[test]
    fn subdivision_examples() {
        let path = MetricGraph::new(vec![v("a"), v("b")], vec![edge("e", "a", "b", int(2))]).unwrap();
        let (g, m) = path.subdivide_at(&GraphPoint::new("e", int(1))).unwrap();
        assert_eq!(g.edges().len(), 2);
        assert!(g.edges().iter().all(|e| e.length == int(1)));
        assert_eq!(g.betti_number(), 0);
        assert_eq!(g.transport(&Point::on_edge("e", int(1))).unwrap(), Point::Vertex(m));

        // loop of length 3 cut at offset 1: a 2-cycle with lengths 1 and 2
        let c = circle(3);
        let (g, _) = c.subdivide_at(&GraphPoint::new("c", int(1))).unwrap();
        let mut lens: Vec<Rational> = g.edges().iter().map(|e| e.length.clone()).collect();
        lens.sort();
        assert_eq!(lens, vec![rat(1, 2), int(1), rat(3, 2)]);
        assert_eq!(g.betti_number(), 1);

        assert_eq!(
            path.subdivide_at(&GraphPoint::new("e", int(0))).unwrap_err(),
            Error::PointIsVertex
        );
    }

    #[test]
    fn distance_examples() {
        let path = MetricGraph::new(vec![v("a"), v("b")], vec![edge("e", "a", "b", int(5))]).unwrap();
        let d = path
            .distance(&GraphPoint::new("e", int(0)), &GraphPoint::new("e", int(5)))
            .unwrap();
        assert_eq!(d, int(5));
        let c = circle(3);
        let p = GraphPoint::new("c", int(0));
        let q = GraphPoint::new("c", int(2));
        assert_eq!(c.distance(&p, &q).unwrap(), int(1));
        assert_eq!(c.distance(&q, &q).unwrap(), int(0));
    }

    #[test]
    fn edge_distance_examples() {
        let path = MetricGraph::new(vec![v("a"), v("b")], vec![edge("e", "a", "b", int(3))]).unwrap();
        let e = EdgeId::new("e");
        let d = path
            .edge_distance(&e, &GraphPoint::new("e", rat(1, 2)), &GraphPoint::new("e", rat(5, 2)))
            .unwrap();
        assert_eq!(d, int(2));
        let d = path
            .edge_distance(&e, &GraphPoint::new("e", rat(1, 3)), &GraphPoint::new("e", rat(5, 6)))
            .unwrap();
        assert_eq!(d, rat(1, 2));
        let d = path
            .edge_distance(&e, &GraphPoint::new("e", int(1)), &GraphPoint::new("e", int(1)))
            .unwrap();
        assert_eq!(d, int(0));
        // the loop version: along-edge distance 2 while graph distance is 1
        let mut c = MetricGraph::new(vec![v("a"), v("b")], vec![
            edge("x", "a", "b", int(3)),
            edge("y", "b", "a", rat(1, 100)),
        ])
        .unwrap();
        c = c.subdivide_many(&[]).unwrap();
        let x = EdgeId::new("x");
        let p = GraphPoint::new("x", rat(1, 2));
        let q = GraphPoint::new("x", rat(5, 2));
        assert_eq!(c.edge_distance(&x, &p, &q).unwrap(), int(2));
        assert!(c.distance(&p, &q).unwrap() < int(2));
        assert!(matches!(
            c.edge_distance(&x, &p, &GraphPoint::new("y", rat(1, 200))),
            Err(Error::PointsNotOnEdge(_))
        ));
    }

    #[test]
    fn spanning_tree_complements_of_theta() {
        let g = theta();
        let ids: Vec<EdgeId> = g.edges().iter().map(|e| e.id.clone()).collect();
        // brute force: every pair of the three parallel edges
        for i in 0..3 {
            for j in i + 1..3 {
                let r = g.spanning_tree_complement(&[ids[i].clone(), ids[j].clone()]).unwrap();
                assert!(r.is_complement);
            }
        }
        assert_eq!(g.spanning_tree_complements(100).len(), 3);
        assert!(matches!(
            g.spanning_tree_complement(&[ids[0].clone(), ids[0].clone()]),
            Err(Error::WrongCardinality { .. })
        ));
        let c = circle(3);
        let only: Vec<EdgeId> = vec![c.edges()[0].id.clone()];
        assert!(c.spanning_tree_complement(&only).unwrap().is_complement);
    }

    #[test]
    fn pillar_examples() {
        let g = MetricGraph::new(vec![v("a"), v("b")], vec![edge("e", "a", "b", int(10))]).unwrap();
        let e = EdgeId::new("e");
        let pts = |o: [i64; 4]| o.map(|x| GraphPoint::new("e", int(x)));
        assert!(g.validate_pillar_points(&e, &pts([1, 2, 7, 8])).unwrap());
        assert!(!g.validate_pillar_points(&e, &pts([1, 3, 5, 6])).unwrap());
        assert!(!g.validate_pillar_points(&e, &pts([1, 2, 8, 7])).unwrap());
        assert!(g.validate_pillar_points(&e, &pts([8, 7, 2, 1])).unwrap());
        assert!(matches!(
            g.validate_pillar_points(&e, &pts([0, 2, 7, 8])),
            Err(Error::PointNotInterior(_))
        ));
    }

    #[test]
    fn core_prunes_trees() {
        let g = MetricGraph::new(
            vec![v("a"), v("b"), v("c")],
            vec![edge("l", "a", "a", int(2)), edge("s", "a", "b", int(1)), edge("t", "b", "c", int(1))],
        )
        .unwrap();
        let (vs, es) = g.core();
        assert_eq!(es.len(), 2);
        assert!(vs.contains(&v("a")));
        assert!(!vs.contains(&v("b")));
        let path = MetricGraph::new(vec![v("a"), v("b")], vec![edge("e", "a", "b", int(1))]).unwrap();
        let (vs, es) = path.core();
        assert_eq!(vs.len(), 1);
        assert!(es.is_empty());
    }

    #[test]
    fn ray_split_keeps_identity() {
        let path = MetricGraph::new(vec![v("a"), v("b")], vec![edge("e", "a", "b", int(1))]).unwrap();
        let x = ExtendedGraph::new(path, vec![(EdgeId::new("r"), Point::on_edge("e", rat(1, 2)), v("r_inf"))]).unwrap();
        assert_eq!(x.finite().edges().len(), 2);
        let (y, fe) = x.split_ray(&EdgeId::new("r"), &int(2)).unwrap();
        assert_eq!(y.finite().edge(&fe).unwrap().length, int(2));
        assert_eq!(y.ray(&EdgeId::new("r")).unwrap().start, int(2));
        assert_eq!(y.finite().betti_number(), 0);
    }
}
