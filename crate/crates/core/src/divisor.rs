//! Divisors on metric graphs: divisors of PL functions, principality with
//! witnesses, break divisors, and the pillar-corrected certificate used when
//! lifting divisors.
//!
//! Principality is decided by exact linear algebra on the cycle space: the
//! divisor fixes the slopes on a spanning tree, the circulation around each
//! fundamental cycle must vanish, and the resulting unique flow has to be
//! integral.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, ExtendedGraph, GraphPoint, MetricGraph, Point, Ray, VertexId};
use crate::linalg::{inverse, mat_vec, Matrix};
use crate::pl::{Breakpoint, PlFunction};
use crate::rational::{ceil, floor, int, Rational};

/// Finite formal integer combination of points. Zero coefficients are never
/// stored.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash, PartialOrd, Ord)]
pub struct Divisor {
    terms: BTreeMap<Point, i64>,
}

impl Divisor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Point, i64)>) -> Self {
        let mut d = Divisor::new();
        for (p, c) in terms {
            d.add_point(p, c);
        }
        d
    }

    pub fn point(p: Point) -> Self {
        Self::from_terms([(p, 1)])
    }

    pub fn add_point(&mut self, p: Point, c: i64) {
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(p.clone()).or_insert(0);
        *entry += c;
        if *entry == 0 {
            self.terms.remove(&p);
        }
    }

    pub fn coefficient(&self, p: &Point) -> i64 {
        self.terms.get(p).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> &BTreeMap<Point, i64> {
        &self.terms
    }

    pub fn degree(&self) -> i64 {
        self.terms.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_effective(&self) -> bool {
        self.terms.values().all(|&c| c > 0)
    }

    pub fn support(&self) -> impl Iterator<Item = &Point> {
        self.terms.keys()
    }

    /// Part supported on finite points.
    pub fn finite_part(&self) -> Divisor {
        Divisor {
            terms: self
                .terms
                .iter()
                .filter(|(p, _)| !p.is_infinite())
                .map(|(p, c)| (p.clone(), *c))
                .collect(),
        }
    }

    pub fn transport(&self, graph: &MetricGraph) -> Result<Divisor> {
        let mut out = Divisor::new();
        for (p, c) in &self.terms {
            out.add_point(graph.transport(p)?, *c);
        }
        Ok(out)
    }

    /// Interior support points, as cut locations for subdividing.
    pub fn cut_points(&self) -> Vec<GraphPoint> {
        self.terms
            .keys()
            .filter_map(|p| match p {
                Point::OnEdge(e, t) => Some(GraphPoint {
                    edge: e.clone(),
                    offset: t.clone(),
                }),
                _ => None,
            })
            .collect()
    }
}

impl Add for &Divisor {
    type Output = Divisor;
    fn add(self, rhs: &Divisor) -> Divisor {
        let mut out = self.clone();
        for (p, c) in &rhs.terms {
            out.add_point(p.clone(), *c);
        }
        out
    }
}

impl Sub for &Divisor {
    type Output = Divisor;
    fn sub(self, rhs: &Divisor) -> Divisor {
        self + &(-rhs)
    }
}

impl Neg for &Divisor {
    type Output = Divisor;
    fn neg(self) -> Divisor {
        Divisor {
            terms: self.terms.iter().map(|(p, c)| (p.clone(), -c)).collect(),
        }
    }
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (p, c) in &self.terms {
            let sign = if *c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            if !first {
                f.write_str(" ")?;
            }
            if mag == 1 {
                write!(f, "{sign}{p}")?;
            } else {
                write!(f, "{sign}{mag}*{p}")?;
            }
            first = false;
        }
        Ok(())
    }
}

fn divisor_on(finite: &MetricGraph, rays: &[Ray], f: &PlFunction) -> Divisor {
    let mut d = Divisor::new();
    for e in finite.edges() {
        let segs = f.segments(&e.id);
        for w in segs.windows(2) {
            d.add_point(Point::OnEdge(e.id.clone(), w[1].start.clone()), w[1].slope - w[0].slope);
        }
        let (out_from, out_to) = f.end_slopes(&e.id);
        d.add_point(Point::Vertex(e.from.clone()), out_from);
        d.add_point(Point::Vertex(e.to.clone()), out_to);
    }
    for r in rays {
        let s = f.ray_slope(&r.id);
        d.add_point(Point::Vertex(r.attach.clone()), s);
        d.add_point(Point::AtInfinity(r.leaf.clone()), -s);
    }
    d
}

/// Sum of outgoing slopes at every point. A leaf ray with eventual slope `s`
/// toward infinity contributes `-s` at its infinite vertex.
pub fn divisor_of(graph: &ExtendedGraph, f: &PlFunction) -> Divisor {
    divisor_on(graph.finite(), graph.rays(), f)
}

/// [`divisor_of`] for a function on a finite graph.
pub fn divisor_of_finite(graph: &MetricGraph, f: &PlFunction) -> Divisor {
    divisor_on(graph, &[], f)
}

/// Spanning tree, fundamental cycles and tree flows for a finite graph.
struct CycleSystem<'a> {
    graph: &'a MetricGraph,
    order: Vec<usize>,
    parent: Vec<Option<(usize, usize)>>,
    cycles: Vec<Vec<(usize, i64)>>,
}

impl<'a> CycleSystem<'a> {
    /// `complement` lists edge indices outside the tree; it must be the
    /// complement of a spanning tree.
    fn new(graph: &'a MetricGraph, complement: &[usize]) -> Self {
        let n = graph.vertices().len();
        let skip: BTreeSet<usize> = complement.iter().copied().collect();
        let adj = graph.incidences();
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        let mut order = vec![0usize];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for inc in &adj[v] {
                if skip.contains(&inc.edge) {
                    continue;
                }
                let e = &graph.edges()[inc.edge];
                let w = graph.vertex_position(e.other_end(&graph.vertices()[v])).unwrap();
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some((v, inc.edge));
                    order.push(w);
                    queue.push_back(w);
                }
            }
        }
        let mut sys = CycleSystem {
            graph,
            order,
            parent,
            cycles: Vec::new(),
        };
        sys.cycles = complement.iter().map(|&e| sys.fundamental_cycle(e)).collect();
        sys
    }

    fn canonical(graph: &'a MetricGraph) -> Self {
        let tree: BTreeSet<EdgeId> = graph.canonical_spanning_tree().into_iter().collect();
        let complement: Vec<usize> = graph
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| !tree.contains(&e.id))
            .map(|(i, _)| i)
            .collect();
        Self::new(graph, &complement)
    }

    fn depth(&self, mut v: usize) -> usize {
        let mut d = 0;
        while let Some((p, _)) = self.parent[v] {
            v = p;
            d += 1;
        }
        d
    }

    /// Signed edges of the cycle through complement edge `e`, oriented along `e`.
    fn fundamental_cycle(&self, e: usize) -> Vec<(usize, i64)> {
        let edge = &self.graph.edges()[e];
        let a = self.graph.vertex_position(&edge.from).unwrap();
        let b = self.graph.vertex_position(&edge.to).unwrap();
        let mut cycle = vec![(e, 1)];
        // walk from b back to a through the tree
        let (mut x, mut y) = (b, a);
        let (mut dx, mut dy) = (self.depth(x), self.depth(y));
        let mut tail = Vec::new();
        while x != y {
            if dx >= dy {
                let (p, pe) = self.parent[x].unwrap();
                // traversing x -> p
                let sign = if self.graph.vertex_position(&self.graph.edges()[pe].from) == Some(x) { 1 } else { -1 };
                cycle.push((pe, sign));
                x = p;
                dx -= 1;
            } else {
                let (p, pe) = self.parent[y].unwrap();
                // traversed later as p -> y
                let sign = if self.graph.vertex_position(&self.graph.edges()[pe].from) == Some(p) { 1 } else { -1 };
                tail.push((pe, sign));
                y = p;
                dy -= 1;
            }
        }
        tail.reverse();
        cycle.extend(tail);
        cycle
    }

    /// Flow supported on the tree whose outgoing slopes sum to `div` at each
    /// vertex. `div` must have total zero.
    fn tree_flow(&self, div: &[Rational]) -> Vec<Rational> {
        let m = self.graph.edges().len();
        let mut flow = vec![Rational::zero(); m];
        let mut sub: Vec<Rational> = div.to_vec();
        for &v in self.order.iter().rev() {
            if let Some((p, e)) = self.parent[v] {
                let net = sub[v].clone();
                // outgoing at v toward p must absorb the subtree sum
                let from_is_p = self.graph.vertex_position(&self.graph.edges()[e].from) == Some(p);
                flow[e] = if from_is_p { -net.clone() } else { net.clone() };
                sub[p] += net;
            }
        }
        flow
    }

    fn circulations(&self, flow: &[Rational]) -> Vec<Rational> {
        self.cycles
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&(e, s)| &flow[e] * int(s) * &self.graph.edges()[e].length)
                    .sum()
            })
            .collect()
    }

    fn gram(&self) -> Matrix {
        let g = self.cycles.len();
        let lens: Vec<&Rational> = self.graph.edges().iter().map(|e| &e.length).collect();
        let dense: Vec<BTreeMap<usize, i64>> = self.cycles.iter().map(|c| c.iter().copied().collect()).collect();
        (0..g)
            .map(|j| {
                (0..g)
                    .map(|k| {
                        dense[j]
                            .iter()
                            .filter_map(|(e, s)| dense[k].get(e).map(|t| int(s * t) * lens[*e]))
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }

    /// The unique flow with divergence `div` and zero circulation.
    fn harmonic_flow(&self, div: &[Rational]) -> Vec<Rational> {
        let mut flow = self.tree_flow(div);
        if self.cycles.is_empty() {
            return flow;
        }
        let c = self.circulations(&flow);
        let inv = inverse(&self.gram()).expect("cycle gram matrix is positive definite");
        let y = mat_vec(&inv, &c);
        for (j, cyc) in self.cycles.iter().enumerate() {
            for &(e, s) in cyc {
                flow[e] -= &y[j] * int(s);
            }
        }
        flow
    }

    /// Vertex potentials of a zero-circulation flow, with the root at `base`.
    fn potentials(&self, flow: &[Rational], base: Rational) -> Vec<Rational> {
        let mut val = vec![Rational::zero(); self.graph.vertices().len()];
        val[self.order[0]] = base;
        for &v in &self.order[1..] {
            let (p, e) = self.parent[v].unwrap();
            let edge = &self.graph.edges()[e];
            let from_is_p = self.graph.vertex_position(&edge.from) == Some(p);
            let delta = &flow[e] * &edge.length;
            val[v] = if from_is_p { &val[p] + delta } else { &val[p] - delta };
        }
        val
    }
}

fn vertex_vector(graph: &MetricGraph, d: &Divisor) -> Result<Vec<Rational>> {
    let mut v = vec![Rational::zero(); graph.vertices().len()];
    for (p, c) in d.terms() {
        match p {
            Point::Vertex(id) => {
                let i = graph
                    .vertex_position(id)
                    .ok_or_else(|| Error::UnknownVertex(id.0.clone()))?;
                v[i] += int(*c);
            }
            other => {
                return Err(Error::InvalidFunction(format!(
                    "divisor point {other} is not a vertex of the refined graph"
                )))
            }
        }
    }
    Ok(v)
}

/// Writes a function on a subdivision of `coarse` back onto `coarse`'s edges.
pub fn collapse_to(fine: &MetricGraph, f: &PlFunction, coarse: &MetricGraph) -> Result<PlFunction> {
    let mut edges = BTreeMap::new();
    for e in coarse.edges() {
        let mut bps: Vec<Breakpoint> = Vec::new();
        for (piece, start) in fine.pieces_of(&e.id)? {
            let src = f
                .edge_breakpoints(&piece)
                .ok_or_else(|| Error::UnknownEdge(piece.0.clone()))?;
            for b in src {
                let off = &start + &b.offset;
                if bps.last().is_some_and(|l| l.offset == off) {
                    continue;
                }
                bps.push(Breakpoint::new(off, b.value.clone()));
            }
        }
        edges.insert(e.id.clone(), bps);
    }
    Ok(PlFunction::from_parts(edges, BTreeMap::new()))
}

/// Outcome of a principality test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Principality {
    /// A function whose divisor is the input, normalized at the basepoint.
    Principal(PlFunction),
    /// The unique zero-circulation flow has a non-integer slope on this edge.
    NotPrincipal { edge: EdgeId, slope: Rational },
}

impl Principality {
    pub fn is_principal(&self) -> bool {
        matches!(self, Principality::Principal(_))
    }

    pub fn witness(&self) -> Option<&PlFunction> {
        match self {
            Principality::Principal(f) => Some(f),
            _ => None,
        }
    }
}

fn solve_principal(graph: &MetricGraph, d: &Divisor, basepoint: &Point, value: &Rational) -> Result<Principality> {
    if d.degree() != 0 {
        return Err(Error::NonzeroDegree(d.degree()));
    }
    for p in d.support() {
        graph.check_point(p)?;
    }
    graph.check_point(basepoint)?;
    let mut cuts = d.cut_points();
    if let Point::OnEdge(e, t) = basepoint {
        cuts.push(GraphPoint { edge: e.clone(), offset: t.clone() });
    }
    let fine = graph.subdivide_many(&cuts)?;
    let fd = d.transport(&fine)?;
    let sys = CycleSystem::canonical(&fine);
    let flow = sys.harmonic_flow(&vertex_vector(&fine, &fd)?);
    for (i, s) in flow.iter().enumerate() {
        if !s.is_integer() {
            let piece = &fine.edges()[i].id;
            let edge = fine
                .origin_in(piece, |id| graph.has_edge(id))
                .map(|(e, _)| e)
                .unwrap_or_else(|| piece.clone());
            return Ok(Principality::NotPrincipal { edge, slope: s.clone() });
        }
    }
    let pot = sys.potentials(&flow, Rational::zero());
    let base_v = match fine.transport(basepoint)? {
        Point::Vertex(v) => v,
        _ => unreachable!("basepoint is a vertex after refinement"),
    };
    let shift = value - &pot[fine.vertex_position(&base_v).unwrap()];
    let values: BTreeMap<VertexId, Rational> = fine
        .vertices()
        .iter()
        .zip(pot)
        .map(|(v, x)| (v.clone(), x + &shift))
        .collect();
    let f_fine = PlFunction::from_vertex_values(&ExtendedGraph::from_finite(fine.clone()), &values, &BTreeMap::new());
    Ok(Principality::Principal(collapse_to(&fine, &f_fine, graph)?))
}

/// Least vertex id, the default normalization point.
pub fn default_basepoint(graph: &MetricGraph) -> Point {
    Point::Vertex(graph.vertices()[0].clone())
}

/// Decides whether `d` is principal; on success the witness takes the value
/// zero at the default basepoint.
pub fn is_principal(graph: &MetricGraph, d: &Divisor) -> Result<Principality> {
    solve_principal(graph, d, &default_basepoint(graph), &Rational::zero())
}

/// The unique function with divisor `d` and the given value at `basepoint`.
pub fn construct_pl_with_divisor(
    graph: &MetricGraph,
    d: &Divisor,
    basepoint: &Point,
    value: &Rational,
) -> Result<PlFunction> {
    match solve_principal(graph, d, basepoint, value)? {
        Principality::Principal(f) => Ok(f),
        Principality::NotPrincipal { edge, slope } => Err(Error::NotPrincipal(format!(
            "slope {slope} on edge {edge} is not an integer"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BreakCheck {
    pub is_break: bool,
    /// Complement edges with the point assigned to each, when `is_break`.
    pub certificate: Option<Vec<(EdgeId, Point)>>,
}

fn point_on_closed_edge(graph: &MetricGraph, p: &Point, e: &EdgeId) -> bool {
    match p {
        Point::OnEdge(pe, _) => pe == e,
        Point::Vertex(v) => graph
            .edge(e)
            .map(|edge| &edge.from == v || &edge.to == v)
            .unwrap_or(false),
        Point::AtInfinity(_) => false,
    }
}

/// Perfect matching of points to edges (Kuhn's algorithm).
fn match_points(graph: &MetricGraph, points: &[Point], edges: &[EdgeId]) -> Option<Vec<usize>> {
    fn augment(
        i: usize,
        adj: &[Vec<usize>],
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for &j in &adj[i] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if owner[j].is_none() || augment(owner[j].unwrap(), adj, seen, owner) {
                owner[j] = Some(i);
                return true;
            }
        }
        false
    }
    let adj: Vec<Vec<usize>> = points
        .iter()
        .map(|p| (0..edges.len()).filter(|&j| point_on_closed_edge(graph, p, &edges[j])).collect())
        .collect();
    let mut owner = vec![None; edges.len()];
    for i in 0..points.len() {
        let mut seen = vec![false; edges.len()];
        if !augment(i, &adj, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut assign = vec![0; points.len()];
    for (j, o) in owner.iter().enumerate() {
        if let Some(i) = o {
            assign[*i] = j;
        }
    }
    Some(assign)
}

/// Whether `b` is a break divisor: effective of degree `g` with its points
/// distributed one per edge over the complement of some spanning tree.
pub fn is_break_divisor(graph: &MetricGraph, b: &Divisor) -> Result<BreakCheck> {
    for p in b.support() {
        graph.check_point(p)?;
    }
    let g = graph.betti_number();
    let no = Ok(BreakCheck { is_break: false, certificate: None });
    if !b.is_effective() || b.degree() != g as i64 {
        return no;
    }
    if g == 0 {
        return Ok(BreakCheck { is_break: true, certificate: Some(Vec::new()) });
    }
    let points: Vec<Point> = b
        .terms()
        .iter()
        .flat_map(|(p, c)| std::iter::repeat(p.clone()).take(*c as usize))
        .collect();
    let candidates: Vec<EdgeId> = graph
        .edges()
        .iter()
        .filter(|e| points.iter().any(|p| point_on_closed_edge(graph, p, &e.id)))
        .map(|e| e.id.clone())
        .collect();
    if candidates.len() < g {
        return no;
    }
    let mut combo: Vec<usize> = (0..g).collect();
    loop {
        let set: Vec<EdgeId> = combo.iter().map(|&i| candidates[i].clone()).collect();
        if graph.spanning_tree_complement(&set)?.is_complement {
            if let Some(assign) = match_points(graph, &points, &set) {
                let cert = points
                    .iter()
                    .zip(assign)
                    .map(|(p, j)| (set[j].clone(), p.clone()))
                    .collect();
                return Ok(BreakCheck { is_break: true, certificate: Some(cert) });
            }
        }
        let mut i = g;
        loop {
            if i == 0 {
                return no;
            }
            i -= 1;
            if combo[i] < candidates.len() - g + i {
                combo[i] += 1;
                for j in i + 1..g {
                    combo[j] = combo[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Maps a point of a subdivision back to canonical form on the coarse graph.
fn coarsen(fine: &MetricGraph, coarse: &MetricGraph, p: &Point) -> Result<Point> {
    match p {
        Point::Vertex(v) if coarse.has_vertex(v) => Ok(p.clone()),
        Point::Vertex(v) => {
            let e = fine
                .edges()
                .iter()
                .find(|e| &e.from == v)
                .ok_or_else(|| Error::UnknownVertex(v.0.clone()))?;
            coarsen(fine, coarse, &Point::OnEdge(e.id.clone(), Rational::zero()))
        }
        Point::OnEdge(e, t) => {
            let (orig, start) = fine
                .origin_in(e, |id| coarse.has_edge(id))
                .ok_or_else(|| Error::UnknownEdge(e.0.clone()))?;
            coarse.canonical(&GraphPoint { edge: orig, offset: start + t })
        }
        Point::AtInfinity(_) => Ok(p.clone()),
    }
}

/// The break divisor `B` equivalent to a degree-`g` divisor `d`, together
/// with `F` such that `div(F) = d - B`.
///
/// Each spanning tree complement `e_1..e_g` spans a cell `{p_1 + .. + p_g :
/// p_i in e_i}`. Moving `p_i` a distance `t_i` from the tail of `e_i` changes
/// the cycle circulations by exactly `t`, so `d - B` is principal iff
/// `t = Q k - c` for an integer vector `k`, where `Q` is the cycle length
/// matrix and `c` the circulation of a tree flow. The integer vectors that can
/// land in the box `prod [0, l_i]` are enumerated directly.
pub fn break_divisor_decompose(graph: &MetricGraph, d: &Divisor) -> Result<(Divisor, PlFunction)> {
    let g = graph.betti_number();
    if d.degree() != g as i64 {
        return Err(Error::WrongDegree { expected: g as i64, got: d.degree() });
    }
    for p in d.support() {
        graph.check_point(p)?;
    }
    if g == 0 {
        let f = construct_pl_with_divisor(graph, d, &default_basepoint(graph), &Rational::zero())?;
        return Ok((Divisor::new(), f));
    }
    let fine = graph.subdivide_many(&d.cut_points())?;
    let fd = d.transport(&fine)?;
    let base = vertex_vector(&fine, &fd)?;
    for complement in fine.spanning_tree_complements(usize::MAX) {
        let idx: Vec<usize> = complement.iter().map(|e| fine.edge_position(e).unwrap()).collect();
        let sys = CycleSystem::new(&fine, &idx);
        let mut div = base.clone();
        for &e in &idx {
            let tail = fine.vertex_position(&fine.edges()[e].from).unwrap();
            div[tail] -= Rational::one();
        }
        let c = sys.circulations(&sys.tree_flow(&div));
        let q = sys.gram();
        let qinv = inverse(&q).expect("positive definite");
        let lens: Vec<Rational> = idx.iter().map(|&e| fine.edges()[e].length.clone()).collect();
        let centre = mat_vec(&qinv, &c);
        let ranges: Vec<(BigInt, BigInt)> = (0..g)
            .map(|j| {
                let mut lo = centre[j].clone();
                let mut hi = centre[j].clone();
                for i in 0..g {
                    let x = &qinv[j][i] * &lens[i];
                    if x.is_negative() {
                        lo += x;
                    } else {
                        hi += x;
                    }
                }
                (ceil(&lo), floor(&hi))
            })
            .collect();
        if ranges.iter().any(|(lo, hi)| lo > hi) {
            continue;
        }
        let mut k: Vec<BigInt> = ranges.iter().map(|r| r.0.clone()).collect();
        loop {
            let kr: Vec<Rational> = k.iter().map(|x| Rational::from_integer(x.clone())).collect();
            let t: Vec<Rational> = mat_vec(&q, &kr).into_iter().zip(&c).map(|(a, b)| a - b).collect();
            if t.iter().zip(&lens).all(|(ti, li)| !ti.is_negative() && ti <= li) {
                let mut b = Divisor::new();
                for (i, &e) in idx.iter().enumerate() {
                    let p = fine.canonical(&GraphPoint {
                        edge: fine.edges()[e].id.clone(),
                        offset: t[i].clone(),
                    })?;
                    b.add_point(coarsen(&fine, graph, &p)?, 1);
                }
                let f = construct_pl_with_divisor(graph, &(d - &b), &default_basepoint(graph), &Rational::zero())?;
                return Ok((b, f));
            }
            // odometer over the integer box
            let mut j = 0;
            loop {
                if j == g {
                    break;
                }
                if k[j] < ranges[j].1 {
                    k[j] += 1;
                    break;
                }
                k[j] = ranges[j].0.clone();
                j += 1;
            }
            if j == g {
                break;
            }
        }
    }
    Err(Error::NotPrincipal("no break divisor found; cell search exhausted".into()))
}

/// Pillar points on one complement edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PillarSet {
    pub edge: EdgeId,
    pub points: [GraphPoint; 4],
}

impl PillarSet {
    /// The principal pattern `p1 - p2 - p3 + p4`.
    pub fn divisor(&self, graph: &MetricGraph) -> Result<Divisor> {
        let mut d = Divisor::new();
        for (p, c) in self.points.iter().zip([1, -1, -1, 1]) {
            d.add_point(graph.canonical(p)?, c);
        }
        Ok(d)
    }
}

/// Witness for `d + sum(p_i1 + p_i4) - sum(p_i2 + p_i3)` after checking the
/// complement edges and pillar sets.
pub fn cor34_certificate(graph: &MetricGraph, d: &Divisor, pillars: &[PillarSet]) -> Result<PlFunction> {
    let edges: Vec<EdgeId> = pillars.iter().map(|p| p.edge.clone()).collect();
    match graph.spanning_tree_complement(&edges) {
        Ok(c) if c.is_complement => {}
        Ok(_) | Err(Error::WrongCardinality { .. }) => return Err(Error::NotComplement),
        Err(e) => return Err(e),
    }
    let mut total = d.clone();
    for p in pillars {
        let ok = graph
            .validate_pillar_points(&p.edge, &p.points)
            .map_err(|e| Error::InvalidPillars(e.to_string()))?;
        if !ok {
            return Err(Error::InvalidPillars(format!("points on {} are not pillar points", p.edge)));
        }
        total = &total + &p.divisor(graph)?;
    }
    construct_pl_with_divisor(graph, &total, &default_basepoint(graph), &Rational::zero())
}

/// Slope of an integral flow value, for reporting.
pub fn slope_as_i64(r: &Rational) -> Option<i64> {
    if r.is_integer() {
        r.to_integer().to_i64()
    } else {
        None
    }
}
