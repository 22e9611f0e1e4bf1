//! Images of extended skeleta under tuples of coordinate functions.
//!
//! An [`Embedding`] is a skeleton together with harmonic PL coordinates.
//! [`tropicalize`] refines every edge at the breakpoints of all coordinates,
//! maps each linear piece to a segment or ray, and resolves overlaps into a
//! weighted tropical curve whose weights are the summed stretching factors.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Signed;
use serde_json::Value;

use crate::arrangement::{elementary, Arrangement, Interval, Line};
use crate::curve::{TropEdge, TropVertex, TropicalCurve};
use crate::divisor::{divisor_of, Divisor};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, ExtendedGraph, GraphPoint, Point, VertexId};
use crate::pl::{PlFunction, RayPiece};
use crate::rational::{content, int, ExtRational, Rational};

/// One recorded pipeline step.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub step: String,
    pub params: Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    skeleton: ExtendedGraph,
    coords: Vec<PlFunction>,
    provenance: Vec<Provenance>,
}

impl Embedding {
    /// Checks that every coordinate is a PL function on `skeleton` whose
    /// divisor lives at the infinite vertices.
    pub fn new(skeleton: ExtendedGraph, coords: Vec<PlFunction>) -> Result<Self> {
        for (k, f) in coords.iter().enumerate() {
            f.validate(&skeleton)
                .map_err(|e| Error::InvalidEmbedding(format!("coordinate {k}: {e}")))?;
            let d = divisor_of(&skeleton, f).finite_part();
            if let Some((p, _)) = d.terms().iter().next() {
                return Err(Error::InvalidEmbedding(format!("coordinate {k} is not harmonic at {p}")));
            }
        }
        Ok(Embedding { skeleton, coords, provenance: Vec::new() })
    }

    pub fn skeleton(&self) -> &ExtendedGraph {
        &self.skeleton
    }

    pub fn coords(&self) -> &[PlFunction] {
        &self.coords
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn record(mut self, step: impl Into<String>, params: Value) -> Self {
        self.provenance.push(Provenance { step: step.into(), params });
        self
    }

    pub fn with_provenance(mut self, provenance: Vec<Provenance>) -> Self {
        self.provenance = provenance;
        self
    }

    /// Image of a finite vertex.
    pub fn vertex_image(&self, v: &VertexId) -> Result<Vec<Rational>> {
        let p = Point::Vertex(v.clone());
        self.coords.iter().map(|f| f.value_at(self.skeleton.finite(), &p)).collect()
    }

    /// Image of any point of the extended skeleton.
    pub fn point_image(&self, p: &Point) -> Result<Vec<ExtRational>> {
        match p {
            Point::AtInfinity(leaf) => {
                let ray = self
                    .skeleton
                    .ray_by_leaf(leaf)
                    .ok_or_else(|| Error::UnknownVertex(leaf.0.clone()))?;
                Ok(self
                    .coords
                    .iter()
                    .map(|f| {
                        let piece = f.ray(&ray.id).expect("validated");
                        match piece.slope.signum() {
                            0 => ExtRational::Finite(piece.anchor.clone()),
                            1 => ExtRational::PlusInfinity,
                            _ => ExtRational::MinusInfinity,
                        }
                    })
                    .collect())
            }
            _ => {
                let p = self.skeleton.finite().transport(p)?;
                self.coords
                    .iter()
                    .map(|f| f.value_at(self.skeleton.finite(), &p).map(ExtRational::Finite))
                    .collect()
            }
        }
    }

    /// Whether the coordinates fail to separate the finite vertices.
    pub fn is_raw(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.skeleton
            .finite()
            .vertices()
            .iter()
            .any(|v| !seen.insert(self.vertex_image(v).expect("vertex of skeleton")))
    }

    /// Keeps the listed coordinates, in order.
    pub fn project(&self, keep: &[usize]) -> Result<Embedding> {
        let coords = keep
            .iter()
            .map(|&k| {
                self.coords
                    .get(k)
                    .cloned()
                    .ok_or_else(|| Error::Config(format!("no coordinate {k}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Embedding { skeleton: self.skeleton.clone(), coords, provenance: self.provenance.clone() })
    }

    /// Appends a coordinate already defined on the current skeleton.
    pub fn push_coordinate(&self, f: PlFunction) -> Result<Embedding> {
        let mut coords = self.coords.clone();
        coords.push(f);
        Ok(Embedding::new(self.skeleton.clone(), coords)?.with_provenance(self.provenance.clone()))
    }

    /// Re-expresses the coordinates on a refinement of the skeleton.
    pub fn refine(&self, skeleton: ExtendedGraph) -> Result<Embedding> {
        let coords = self
            .coords
            .iter()
            .map(|f| f.transport(&self.skeleton, &skeleton))
            .collect::<Result<Vec<_>>>()?;
        Ok(Embedding { skeleton, coords, provenance: self.provenance.clone() })
    }
}

/// Integer factor by which a piece with these coordinate slopes is stretched.
pub fn stretching_factor(slopes: &[i64]) -> Result<u64> {
    let g = content(slopes);
    if g == 0 {
        Err(Error::ContractedEdge)
    } else {
        Ok(g as u64)
    }
}

/// A maximal linear stretch of a skeleton edge or ray.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub edge: EdgeId,
    pub is_ray: bool,
    /// Offsets on the edge; rays are measured from their attachment vertex
    /// and have no end.
    pub start: Rational,
    pub end: Option<Rational>,
    pub from: Point,
    pub to: Point,
    pub slopes: Vec<i64>,
    /// Zero for contracted pieces.
    pub stretch: u64,
    pub image_edges: Vec<String>,
}

impl Piece {
    pub fn label(&self) -> String {
        match &self.end {
            Some(end) => format!("{}[{},{}]", self.edge, self.start, end),
            None => format!("{}[{},inf)", self.edge, self.start),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeMap {
    pub pieces: Vec<Piece>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tropicalization {
    pub curve: TropicalCurve,
    pub map: EdgeMap,
    geometry: Geometry,
}

#[derive(Debug, Clone, PartialEq)]
struct Geometry {
    /// Image of each piece's start point.
    starts: Vec<Vec<Rational>>,
    /// Line index and interval for each non-contracted piece.
    placed: Vec<Option<(usize, Interval)>>,
    lines: Vec<Line>,
    members: Vec<Vec<usize>>,
    crossings: Vec<(usize, usize, Rational, Rational)>,
}

fn collect_pieces(emb: &Embedding) -> Result<(Vec<Piece>, Vec<Vec<Rational>>)> {
    let g = emb.skeleton.finite();
    let mut pieces = Vec::new();
    let mut starts = Vec::new();
    for e in g.edges() {
        let segs: Vec<_> = emb.coords.iter().map(|f| f.segments(&e.id)).collect();
        let mut cuts: BTreeSet<Rational> = BTreeSet::new();
        cuts.insert(int(0));
        cuts.insert(e.length.clone());
        for s in &segs {
            for seg in s {
                cuts.insert(seg.start.clone());
            }
        }
        let cuts: Vec<Rational> = cuts.into_iter().collect();
        let mut cursor = vec![0usize; segs.len()];
        for w in cuts.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            let mut slopes = Vec::with_capacity(segs.len());
            let mut start = Vec::with_capacity(segs.len());
            for (k, s) in segs.iter().enumerate() {
                while s[cursor[k]].end <= *a {
                    cursor[k] += 1;
                }
                let seg = &s[cursor[k]];
                slopes.push(seg.slope);
                start.push(&seg.value + int(seg.slope) * (a - &seg.start));
            }
            let stretch = content(&slopes) as u64;
            pieces.push(Piece {
                edge: e.id.clone(),
                is_ray: false,
                start: a.clone(),
                end: Some(b.clone()),
                from: g.canonical(&GraphPoint { edge: e.id.clone(), offset: a.clone() })?,
                to: g.canonical(&GraphPoint { edge: e.id.clone(), offset: b.clone() })?,
                slopes,
                stretch,
                image_edges: Vec::new(),
            });
            starts.push(start);
        }
    }
    for r in emb.skeleton.rays() {
        let parts: Vec<&RayPiece> = emb.coords.iter().map(|f| f.ray(&r.id).expect("validated")).collect();
        let slopes: Vec<i64> = parts.iter().map(|p| p.slope).collect();
        pieces.push(Piece {
            edge: r.id.clone(),
            is_ray: true,
            start: int(0),
            end: None,
            from: Point::Vertex(r.attach.clone()),
            to: Point::AtInfinity(r.leaf.clone()),
            stretch: content(&slopes) as u64,
            slopes,
            image_edges: Vec::new(),
        });
        starts.push(parts.iter().map(|p| p.anchor.clone()).collect());
    }
    Ok((pieces, starts))
}

fn place(piece: &Piece, start: &[Rational]) -> Option<(Line, Interval)> {
    if piece.stretch == 0 {
        return None;
    }
    let (line, forward) = Line::through(start, &piece.slopes);
    let t0 = line.tau(start);
    let iv = match &piece.end {
        Some(end) => {
            let len = (end - &piece.start) * int(piece.stretch as i64);
            if forward {
                Interval { lo: Some(t0.clone()), hi: Some(t0 + len) }
            } else {
                Interval { lo: Some(&t0 - len), hi: Some(t0) }
            }
        }
        None if forward => Interval { lo: Some(t0), hi: None },
        None => Interval { lo: None, hi: Some(t0) },
    };
    Some((line, iv))
}

fn infinite_end(line: &Line, toward_plus: bool) -> Vec<ExtRational> {
    line.base
        .iter()
        .zip(&line.dir)
        .map(|(b, &d)| {
            let s = if toward_plus { d.signum() } else { -d.signum() };
            match s {
                0 => ExtRational::Finite(b.clone()),
                1 => ExtRational::PlusInfinity,
                _ => ExtRational::MinusInfinity,
            }
        })
        .collect()
}

/// A point at infinity: the limit pattern, then the ray direction and the
/// base of its line. Rays in the same direction on different lines end at
/// different boundary points, as in a toric compactification whose fan
/// contains the ray directions.
type InfKey = (Vec<ExtRational>, Vec<i64>, Vec<Rational>);

fn inf_key(line: &Line, toward_plus: bool) -> InfKey {
    let dir = if toward_plus { line.dir.clone() } else { line.dir.iter().map(|x| -x).collect() };
    (infinite_end(line, toward_plus), dir, line.base.clone())
}

/// The weighted image of the skeleton and the piece-to-edge map.
pub fn tropicalize(emb: &Embedding) -> Result<Tropicalization> {
    if emb.coords.is_empty() {
        return Err(Error::EmptyCoordinates);
    }
    let n = emb.dim();
    let (mut pieces, starts) = collect_pieces(emb)?;
    let mut items = Vec::new();
    let mut owner = Vec::new();
    for (i, p) in pieces.iter().enumerate() {
        if let Some(x) = place(p, &starts[i]) {
            items.push(x);
            owner.push(i);
        }
    }
    let arr = Arrangement::build(items);

    // cut every line at item ends and crossings, then sum weights
    let mut cuts: Vec<BTreeSet<Rational>> = vec![BTreeSet::new(); arr.lines.len()];
    for (l, iv) in &arr.items {
        cuts[*l].extend(iv.lo.iter().cloned());
        cuts[*l].extend(iv.hi.iter().cloned());
    }
    for (a, b, t, u) in &arr.crossings {
        cuts[*a].insert(t.clone());
        cuts[*b].insert(u.clone());
    }
    let mut elem: Vec<Vec<(Interval, u64)>> = Vec::with_capacity(arr.lines.len());
    for (l, members) in arr.members.iter().enumerate() {
        let weighted: Vec<(Interval, u64)> = members
            .iter()
            .map(|&i| (arr.items[i].1.clone(), pieces[owner[i]].stretch))
            .collect();
        let c: Vec<Rational> = cuts[l].iter().cloned().collect();
        elem.push(elementary(&weighted, &c));
    }

    // degree of each finite point among elementary edges
    let mut degree: BTreeMap<Vec<Rational>, usize> = BTreeMap::new();
    for (l, list) in elem.iter().enumerate() {
        for (iv, _) in list {
            for t in iv.lo.iter().chain(iv.hi.iter()) {
                *degree.entry(arr.lines[l].at(t)).or_insert(0) += 1;
            }
        }
    }
    // merge straight 2-valent points of equal weight
    let mut merged: Vec<Vec<(Interval, u64)>> = Vec::with_capacity(elem.len());
    for (l, list) in elem.into_iter().enumerate() {
        let mut out: Vec<(Interval, u64)> = Vec::new();
        for (iv, w) in list {
            if let Some((last, lw)) = out.last_mut() {
                if let (Some(h), Some(lo)) = (&last.hi, &iv.lo) {
                    let unbounded = last.lo.is_none() && iv.hi.is_none();
                    if h == lo && *lw == w && !unbounded && degree[&arr.lines[l].at(h)] == 2 {
                        last.hi = iv.hi;
                        continue;
                    }
                }
            }
            out.push((iv, w));
        }
        merged.push(out);
    }

    // vertices, named by sorted coordinates
    let mut finite_pts: BTreeSet<Vec<Rational>> = BTreeSet::new();
    let mut infinite_pts: BTreeSet<InfKey> = BTreeSet::new();
    for (l, list) in merged.iter().enumerate() {
        let line = &arr.lines[l];
        for (iv, _) in list {
            match &iv.lo {
                Some(t) => {
                    finite_pts.insert(line.at(t));
                }
                None => {
                    infinite_pts.insert(inf_key(line, false));
                }
            }
            match &iv.hi {
                Some(t) => {
                    finite_pts.insert(line.at(t));
                }
                None => {
                    infinite_pts.insert(inf_key(line, true));
                }
            }
        }
    }
    if finite_pts.is_empty() {
        let v = emb.skeleton.finite().vertices()[0].clone();
        finite_pts.insert(emb.vertex_image(&v)?);
    }
    let fin_name: BTreeMap<Vec<Rational>, String> =
        finite_pts.iter().enumerate().map(|(i, p)| (p.clone(), format!("v{i}"))).collect();
    let inf_name: BTreeMap<InfKey, String> =
        infinite_pts.iter().enumerate().map(|(i, p)| (p.clone(), format!("inf{i}"))).collect();

    // edges, ordered by endpoints then direction
    struct Raw {
        from: String,
        to: String,
        direction: Vec<i64>,
        weight: u64,
        length: Option<Rational>,
        line: usize,
        span: Interval,
    }
    let mut raw: Vec<Raw> = Vec::new();
    for (l, list) in merged.iter().enumerate() {
        let line = &arr.lines[l];
        for (iv, w) in list {
            let (from, to, direction, length) = match (&iv.lo, &iv.hi) {
                (Some(a), Some(b)) => (
                    fin_name[&line.at(a)].clone(),
                    fin_name[&line.at(b)].clone(),
                    line.dir.clone(),
                    Some(b - a),
                ),
                (Some(a), None) => (
                    fin_name[&line.at(a)].clone(),
                    inf_name[&inf_key(line, true)].clone(),
                    line.dir.clone(),
                    None,
                ),
                (None, Some(b)) => (
                    fin_name[&line.at(b)].clone(),
                    inf_name[&inf_key(line, false)].clone(),
                    line.dir.iter().map(|x| -x).collect(),
                    None,
                ),
                (None, None) => {
                    return Err(Error::InvalidEmbedding("image contains a full line".into()));
                }
            };
            raw.push(Raw { from, to, direction, weight: *w, length, line: l, span: iv.clone() });
        }
    }
    let vkey = |s: &str| -> (bool, usize) {
        let inf = s.starts_with("inf");
        let digits = s.trim_start_matches("inf").trim_start_matches('v');
        (inf, digits.parse().unwrap_or(0))
    };
    raw.sort_by(|a, b| {
        (vkey(&a.from), vkey(&a.to), &a.direction).cmp(&(vkey(&b.from), vkey(&b.to), &b.direction))
    });
    let mut by_line: Vec<Vec<(usize, Interval)>> = vec![Vec::new(); arr.lines.len()];
    let mut edges = Vec::with_capacity(raw.len());
    for (i, r) in raw.iter().enumerate() {
        by_line[r.line].push((i, r.span.clone()));
        edges.push(TropEdge {
            id: format!("e{i}"),
            from: r.from.clone(),
            to: r.to.clone(),
            direction: r.direction.clone(),
            weight: r.weight,
            length: r.length.clone(),
        });
    }
    for (k, (l, iv)) in arr.items.iter().enumerate() {
        let piece = &mut pieces[owner[k]];
        piece.image_edges = by_line[*l]
            .iter()
            .filter(|(_, span)| iv.covers(span))
            .map(|(i, _)| format!("e{i}"))
            .collect();
    }
    let vertices: Vec<TropVertex> = fin_name
        .iter()
        .map(|(p, id)| TropVertex { id: id.clone(), coords: p.iter().cloned().map(ExtRational::Finite).collect() })
        .chain(inf_name.iter().map(|(p, id)| TropVertex { id: id.clone(), coords: p.0.clone() }))
        .collect();
    let curve = TropicalCurve::new(n, vertices, edges)?;
    let balance = curve.check_balancing();
    if !balance.balanced {
        let ids: Vec<&str> = balance.defects.keys().map(|s| s.as_str()).collect();
        return Err(Error::Unbalanced(ids.join(", ")));
    }
    let mut placed = vec![None; pieces.len()];
    for (k, (l, iv)) in arr.items.iter().enumerate() {
        placed[owner[k]] = Some((*l, iv.clone()));
    }
    let members = arr
        .members
        .iter()
        .map(|m| m.iter().map(|&k| owner[k]).collect())
        .collect();
    Ok(Tropicalization {
        curve,
        map: EdgeMap { pieces },
        geometry: Geometry { starts, placed, lines: arr.lines, members, crossings: arr.crossings },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FaithfulnessReport {
    pub fully_faithful: bool,
    pub contracted: Vec<String>,
    /// Pairs of pieces whose images meet away from common endpoints.
    pub collisions: Vec<(String, String)>,
    pub stretched: Vec<String>,
    pub heavy_edges: Vec<String>,
}

impl Tropicalization {
    /// Image of a piece endpoint (`end = false` for the start).
    fn endpoint_image(&self, i: usize, end: bool) -> Option<Vec<Rational>> {
        let p = &self.map.pieces[i];
        if !end {
            return Some(self.geometry.starts[i].clone());
        }
        let len = p.end.as_ref()? - &p.start;
        Some(
            self.geometry.starts[i]
                .iter()
                .zip(&p.slopes)
                .map(|(x, s)| x + &len * int(*s))
                .collect(),
        )
    }

    /// Images of the skeleton points shared by two pieces.
    fn shared_images(&self, a: usize, b: usize) -> Vec<Vec<Rational>> {
        let (pa, pb) = (&self.map.pieces[a], &self.map.pieces[b]);
        let mut out = Vec::new();
        for (x, ex) in [(&pa.from, false), (&pa.to, true)] {
            if matches!(x, Point::AtInfinity(_)) {
                continue;
            }
            if x == &pb.from || x == &pb.to {
                if let Some(img) = self.endpoint_image(a, ex) {
                    out.push(img);
                }
            }
        }
        out
    }

    /// Full faithfulness: no contraction, injective on the extended skeleton,
    /// all stretching factors and weights one.
    pub fn faithfulness(&self) -> FaithfulnessReport {
        let mut report = FaithfulnessReport::default();
        let pieces = &self.map.pieces;
        for p in pieces {
            if p.stretch == 0 {
                report.contracted.push(p.label());
            } else if p.stretch > 1 {
                report.stretched.push(p.label());
            }
        }
        report.heavy_edges = self.curve.edges().iter().filter(|e| e.weight > 1).map(|e| e.id.clone()).collect();
        let geo = &self.geometry;
        let mut collide = |a: usize, b: usize| {
            let (x, y) = (pieces[a].label(), pieces[b].label());
            report.collisions.push(if x <= y { (x, y) } else { (y, x) });
        };
        for (l, members) in geo.members.iter().enumerate() {
            let mut sorted: Vec<usize> = members.clone();
            let lo_key = |i: &usize| geo.placed[*i].as_ref().unwrap().1.lo.clone();
            sorted.sort_by_key(lo_key);
            for (k, &a) in sorted.iter().enumerate() {
                let ia = &geo.placed[a].as_ref().unwrap().1;
                for &b in &sorted[k + 1..] {
                    let ib = &geo.placed[b].as_ref().unwrap().1;
                    if let (Some(h), Some(lo)) = (&ia.hi, &ib.lo) {
                        if lo > h {
                            break;
                        }
                    }
                    let Some(common) = ia.meet(ib) else { continue };
                    let ok = common.is_point() && {
                        let at = geo.lines[l].at(common.lo.as_ref().unwrap());
                        self.shared_images(a, b).contains(&at)
                    };
                    if !ok {
                        collide(a, b);
                    }
                }
            }
        }
        for (la, lb, t, u) in &geo.crossings {
            let at = geo.lines[*la].at(t);
            let on_a: Vec<usize> = geo.members[*la]
                .iter()
                .copied()
                .filter(|&i| geo.placed[i].as_ref().unwrap().1.contains(t))
                .collect();
            let on_b: Vec<usize> = geo.members[*lb]
                .iter()
                .copied()
                .filter(|&i| geo.placed[i].as_ref().unwrap().1.contains(u))
                .collect();
            for &a in &on_a {
                for &b in &on_b {
                    if !self.shared_images(a, b).contains(&at) {
                        collide(a, b);
                    }
                }
            }
        }
        report.collisions.sort();
        report.collisions.dedup();
        report.fully_faithful = report.contracted.is_empty()
            && report.collisions.is_empty()
            && report.stretched.is_empty()
            && report.heavy_edges.is_empty();
        report
    }
}

/// Tropicalizes and checks full faithfulness.
pub fn is_fully_faithful(emb: &Embedding) -> Result<FaithfulnessReport> {
    Ok(tropicalize(emb)?.faithfulness())
}

/// Whether a coordinate has only simple zeros and poles, all at infinite
/// vertices.
pub fn is_faithful_function(emb: &Embedding, f: &PlFunction) -> bool {
    let d = divisor_of(&emb.skeleton, f);
    d.terms().iter().all(|(p, c)| p.is_infinite() && c.abs() == 1)
}

/// Controls [`extend_embedding_with`].
#[derive(Debug, Clone, Default)]
pub struct ExtendOptions {
    /// Allow new rays at points where rays are already attached.
    pub allow_shared_attachments: bool,
    /// Prefix for new ray ids; defaults to `x{k}` for coordinate `k`.
    pub label: Option<String>,
    /// Slopes of the new coordinate on existing rays (zero when absent).
    pub ray_slopes: BTreeMap<EdgeId, i64>,
}

/// Adds the coordinate `f`, given on the finite part with simple zeros and
/// poles, attaching a new ray at each point of its divisor.
pub fn extend_embedding(emb: &Embedding, f: &PlFunction) -> Result<Embedding> {
    extend_embedding_with(emb, f, &ExtendOptions::default())
}

pub fn extend_embedding_with(emb: &Embedding, f: &PlFunction, opts: &ExtendOptions) -> Result<Embedding> {
    let finite_only = ExtendedGraph::from_finite(emb.skeleton.finite().clone());
    f.finite_part()
        .validate(&finite_only)
        .map_err(|e| Error::InvalidEmbedding(e.to_string()))?;
    let f = f.finite_part();
    let mut d: Divisor = divisor_of(&finite_only, &f);
    for (id, s) in &opts.ray_slopes {
        let r = emb.skeleton.ray(id)?;
        d.add_point(Point::Vertex(r.attach.clone()), *s);
    }
    for (p, c) in d.terms() {
        if c.abs() != 1 {
            return Err(Error::NonSimplePoint(format!("{p} has coefficient {c}")));
        }
        if !opts.allow_shared_attachments {
            if let Point::Vertex(v) = p {
                if emb.skeleton.rays_at(v).next().is_some() {
                    return Err(Error::DivisorCollision(format!("a ray is already attached at {p}")));
                }
            }
        }
    }
    let k = emb.coords.len();
    let prefix = opts.label.clone().unwrap_or_else(|| format!("x{k}"));
    let mut new_rays = Vec::new();
    let mut signs = BTreeMap::new();
    for (j, (p, c)) in d.terms().iter().enumerate() {
        let mut id = EdgeId(format!("{prefix}.{j}"));
        while emb.skeleton.finite().knows_edge(&id) || emb.skeleton.is_ray(&id) {
            id = EdgeId(format!("{}'", id.0));
        }
        let leaf = VertexId(format!("{}:inf", id.0));
        signs.insert(id.clone(), -c);
        new_rays.push((id, p.clone(), leaf));
    }
    let skeleton = emb.skeleton.with_rays(new_rays)?;
    let mut refined = emb.refine(skeleton.clone())?;
    let base = f.transport(&finite_only, &ExtendedGraph::from_finite(skeleton.finite().clone()))?;
    let mut rays = BTreeMap::new();
    for r in skeleton.rays() {
        let anchor = base
            .vertex_value(skeleton.finite(), &r.attach)
            .ok_or_else(|| Error::UnknownVertex(r.attach.0.clone()))?;
        let slope = signs.get(&r.id).or_else(|| opts.ray_slopes.get(&r.id)).copied().unwrap_or(0);
        rays.insert(r.id.clone(), RayPiece { anchor, slope });
    }
    refined.coords.push(base.with_rays(rays));
    let out = Embedding::new(refined.skeleton, refined.coords)?.with_provenance(refined.provenance);
    // new rays are stretched by exactly one
    for id in signs.keys() {
        let slopes: Vec<i64> = out.coords.iter().map(|g| g.ray_slope(id)).collect();
        if stretching_factor(&slopes)? != 1 {
            return Err(Error::InvalidEmbedding(format!("new ray {id} is stretched")));
        }
    }
    Ok(out)
}
