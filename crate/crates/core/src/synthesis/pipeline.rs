//! The two refinement pipelines.
//!
//! `fully_faithful_pipeline` first makes the core injective with unit
//! stretch (stage 0), then adds one edge function per offending edge outside
//! the core until the faithfulness certificate passes. `smoothing_pipeline`
//! resolves singular image vertices one at a time with vertex functions.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde_json::{json, Value};

use crate::divisor::{divisor_of_finite, Divisor, PillarSet};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, ExtendedGraph, MetricGraph, VertexId};
use crate::pl::{Breakpoint, PlFunction};
use crate::rational::{format_rational, int, Rational};
use crate::tropicalize::{tropicalize, Embedding, FaithfulnessReport};

use super::functions::{edge_function_finite, edge_function_infinite, tent_support, vertex_function, Construction};
use super::pillars::{select_pillars_with, PillarLedger, PillarOptions, PillarTarget};

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    /// Rounds of edge functions, and vertices resolved while smoothing.
    pub budget: usize,
    pub pillars: PillarOptions,
    /// Explicit core edges; the pruned core of the finite part when absent.
    pub core: Option<BTreeSet<EdgeId>>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { budget: 64, pillars: PillarOptions::default(), core: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineStep {
    pub construction: String,
    pub target: String,
    /// Index of the coordinate this step added.
    pub coordinate: usize,
    /// The added coordinate on the skeleton right after the step.
    pub function: PlFunction,
    pub pillars: Vec<PillarSet>,
    pub status: Value,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PipelineReport {
    pub pipeline: String,
    pub core: Vec<EdgeId>,
    pub steps: Vec<PipelineStep>,
    /// Singular image vertex counts, before smoothing and after each vertex.
    pub singular_counts: Vec<usize>,
    pub certificate: Value,
}

fn faithfulness_json(r: &FaithfulnessReport) -> Value {
    json!({
        "fully_faithful": r.fully_faithful,
        "contracted": r.contracted,
        "collisions": r.collisions,
        "stretched": r.stretched,
        "heavy_edges": r.heavy_edges,
    })
}

/// Edge id of a piece label `id[a,b]`.
fn label_edge(label: &str) -> EdgeId {
    EdgeId::new(label.rfind('[').map_or(label, |i| &label[..i]))
}

fn labels(r: &FaithfulnessReport) -> Vec<Vec<&str>> {
    let mut out: Vec<Vec<&str>> = Vec::new();
    out.extend(r.contracted.iter().map(|x| vec![x.as_str()]));
    out.extend(r.stretched.iter().map(|x| vec![x.as_str()]));
    out.extend(r.collisions.iter().map(|(a, b)| vec![a.as_str(), b.as_str()]));
    out
}

fn faithfulness(emb: &Embedding) -> Result<Option<FaithfulnessReport>> {
    if emb.dim() == 0 {
        return Ok(None);
    }
    Ok(Some(tropicalize(emb)?.faithfulness()))
}

/// Core vertices and edges of the finite part.
pub fn core_of(g: &MetricGraph, explicit: Option<&BTreeSet<EdgeId>>) -> Result<(BTreeSet<VertexId>, BTreeSet<EdgeId>)> {
    let Some(edges) = explicit else { return Ok(g.core()) };
    let mut vertices = BTreeSet::new();
    for id in edges {
        let e = g.edge(id)?;
        vertices.insert(e.from.clone());
        vertices.insert(e.to.clone());
    }
    if vertices.is_empty() {
        vertices.insert(g.vertices().iter().min().cloned().ok_or(Error::EmptyGraph)?);
    }
    Ok((vertices, edges.clone()))
}

fn plain(kind: &str, target: String, g: &MetricGraph, f: PlFunction) -> Construction {
    let divisor = divisor_of_finite(g, &f);
    Construction { kind: kind.into(), target, function: f, ray_slopes: BTreeMap::new(), divisor, pillars: Vec::new() }
}

/// Apply a construction and log it.
fn step(cur: &Embedding, c: &Construction, report: &mut PipelineReport, status: Value) -> Result<Embedding> {
    let next = c.apply(cur)?;
    let k = cur.dim();
    report.steps.push(PipelineStep {
        construction: c.kind.clone(),
        target: c.target.clone(),
        coordinate: k,
        function: next.coords()[k].clone(),
        pillars: c.pillars.clone(),
        status,
    });
    Ok(next)
}

/// The stage-0 coordinates on the finite graph `g`, all zero at the core
/// vertices except the bumps:
/// for each core edge of length `16u` a pair of profiles
/// `T1 = 0,4u,4u,0,0` and `T2 = 0,0,6u,6u,0` at offsets `0,4u,8u,12u,16u`
/// and `0,3u,9u,10u,16u`; then for each core vertex except the least a bump
/// of height `h` that is flat within `h` of the vertex and falls off with
/// slope one. Trees hanging off the core carry the value at their root.
fn stage0_functions(g: &MetricGraph, core_v: &BTreeSet<VertexId>, core_e: &BTreeSet<EdgeId>) -> Vec<(String, PlFunction)> {
    let mut root: BTreeMap<VertexId, VertexId> = core_v.iter().map(|v| (v.clone(), v.clone())).collect();
    let mut frontier: Vec<VertexId> = core_v.iter().cloned().collect();
    while let Some(v) = frontier.pop() {
        for e in g.edges().iter().filter(|e| !core_e.contains(&e.id) && (e.from == v || e.to == v)) {
            let w = e.other_end(&v).clone();
            if !root.contains_key(&w) {
                root.insert(w.clone(), root[&v].clone());
                frontier.push(w);
            }
        }
    }
    let zero = Rational::zero();
    let flat = |e: &crate::graph::Edge, c: &Rational| vec![Breakpoint::new(zero.clone(), c.clone()), Breakpoint::new(e.length.clone(), c.clone())];
    let make = |profile: &dyn Fn(&crate::graph::Edge) -> Option<Vec<(Rational, Rational)>>, c_off: &dyn Fn(&crate::graph::Edge) -> Rational| {
        let edges = g
            .edges()
            .iter()
            .map(|e| {
                let bps = match profile(e) {
                    Some(p) => p.into_iter().map(|(o, v)| Breakpoint::new(o, v)).collect(),
                    None => flat(e, &c_off(e)),
                };
                (e.id.clone(), bps)
            })
            .collect();
        PlFunction::from_parts(edges, BTreeMap::new())
    };
    let mut out = Vec::new();
    for id in core_e {
        let len = g.edge(id).expect("core edge").length.clone();
        let u = &len / int(16);
        let at = |k: i64, h: i64| (&u * int(k), &u * int(h));
        let t1 = vec![at(0, 0), at(4, 4), at(8, 4), at(12, 0), at(16, 0)];
        let t2 = vec![at(0, 0), at(3, 0), at(9, 6), at(10, 6), at(16, 0)];
        for (name, p) in [("T1", t1), ("T2", t2)] {
            let f = make(&|e| (e.id == *id).then(|| p.clone()), &|_| zero.clone());
            out.push((format!("{name}:{id}"), f));
        }
    }
    let Some(lmin) = core_e.iter().map(|id| g.edge(id).expect("core edge").length.clone()).min() else {
        return out;
    };
    let h = &lmin / int(8);
    for v in core_v.iter().skip(1) {
        let bump = |e: &crate::graph::Edge| -> Option<Vec<(Rational, Rational)>> {
            if !core_e.contains(&e.id) || (e.from != *v && e.to != *v) {
                return None;
            }
            let l = &e.length;
            let p = vec![(zero.clone(), h.clone()), (h.clone(), h.clone()), (&h * int(2), zero.clone()), (l.clone(), zero.clone())];
            Some(if e.from == *v { p } else { p.into_iter().rev().map(|(o, y)| (l - o, y)).collect() })
        };
        let off = |e: &crate::graph::Edge| if root.get(&e.from) == Some(v) && !core_e.contains(&e.id) { h.clone() } else { zero.clone() };
        out.push((format!("bump:{v}"), make(&bump, &off)));
    }
    out
}

/// Whether some failure involves core pieces only.
fn core_failures(g: &MetricGraph, r: &FaithfulnessReport, core_e: &BTreeSet<EdgeId>) -> Vec<String> {
    let in_core = |l: &str| g.origin_in(&label_edge(l), |id| core_e.contains(id)).is_some();
    labels(r)
        .into_iter()
        .filter(|ls| ls.iter().all(|l| in_core(l)))
        .map(|ls| ls.join(" / "))
        .collect()
}

/// Refines `emb` until its tropicalization is fully faithful.
pub fn fully_faithful_pipeline(emb: &Embedding, opts: &PipelineOptions) -> Result<(Embedding, PipelineReport)> {
    let sk0 = emb.skeleton().clone();
    let g0 = sk0.finite().clone();
    let (core_v, core_e) = core_of(&g0, opts.core.as_ref())?;
    let mut report = PipelineReport {
        pipeline: "fully_faithful".into(),
        core: core_e.iter().cloned().collect(),
        ..Default::default()
    };
    let hanging: BTreeSet<EdgeId> = g0.edges().iter().map(|e| e.id.clone()).filter(|e| !core_e.contains(e)).collect();
    let rays0: BTreeSet<EdgeId> = sk0.rays().iter().map(|r| r.id.clone()).collect();
    let targets: BTreeSet<EdgeId> = hanging.iter().chain(rays0.iter()).cloned().collect();
    if core_e.is_empty() && targets.is_empty() && emb.dim() == 0 {
        return Err(Error::Config("the skeleton has no edges to embed".into()));
    }
    let mut cur = emb.clone();
    let mut ledger = PillarLedger::new(&g0);

    let first = faithfulness(&cur)?;
    let needs_stage0 = match &first {
        Some(r) if r.fully_faithful => {
            report.certificate = json!({ "fully_faithful": true, "stage0": false, "rounds": 0, "faithfulness": faithfulness_json(r) });
            return Ok((cur, report));
        }
        Some(r) => !core_failures(&g0, r, &core_e).is_empty(),
        None => !core_e.is_empty(),
    };
    if needs_stage0 {
        for (name, f) in stage0_functions(&g0, &core_v, &core_e) {
            let f = f.transport(&sk0, cur.skeleton())?.finite_part();
            let c = plain("stage0", name, cur.skeleton().finite(), f);
            cur = step(&cur, &c, &mut report, json!({}))?;
        }
        if let Some(r) = faithfulness(&cur)? {
            let bad = core_failures(cur.skeleton().finite(), &r, &core_e);
            if !bad.is_empty() {
                return Err(Error::Stage0Failure(format!("core still not injective with unit stretch: {}", bad.join("; "))));
            }
        }
    }

    let mut treated: BTreeSet<EdgeId> = BTreeSet::new();
    let mut rounds = 0;
    loop {
        let status = faithfulness(&cur)?;
        if let Some(r) = &status {
            if r.fully_faithful {
                report.certificate = json!({
                    "fully_faithful": true,
                    "stage0": needs_stage0,
                    "rounds": rounds,
                    "edge_functions": treated.iter().map(|e| e.0.clone()).collect::<Vec<_>>(),
                    "stretching_factors": "all 1",
                    "faithfulness": faithfulness_json(r),
                });
                return Ok((cur, report));
            }
        }
        if rounds >= opts.budget {
            let detail = status.as_ref().map(faithfulness_json).unwrap_or(Value::Null);
            return Err(Error::CertificateFailure(format!("budget of {} rounds used up: {detail}", opts.budget)));
        }
        rounds += 1;
        let g = cur.skeleton().finite();
        let mut involved: BTreeSet<EdgeId> = BTreeSet::new();
        if let Some(r) = &status {
            for l in labels(r).into_iter().flatten() {
                let id = label_edge(l);
                if let Some((e, _)) = g.origin_in(&id, |x| targets.contains(x)) {
                    involved.insert(e);
                }
            }
        }
        involved.retain(|e| !treated.contains(e));
        if involved.is_empty() {
            involved = targets.difference(&treated).cloned().collect();
        }
        if involved.is_empty() {
            let detail = status.as_ref().map(faithfulness_json).unwrap_or(Value::Null);
            return Err(Error::CertificateFailure(format!("every edge function is in place but the certificate fails: {detail}")));
        }
        for e in involved {
            let target = PillarTarget { label: e.0.clone(), avoid_image: vec![e.clone()], avoid: Vec::new() };
            let cfg = select_pillars_with(&cur, &[target], &mut ledger, &opts.pillars)?;
            let sets = &cfg.choices[0].sets;
            let c = if rays0.contains(&e) {
                edge_function_infinite(&cur, &e, sets)?
            } else {
                edge_function_finite(&cur, &e, &core_v, sets)?
            };
            cur = step(&cur, &c, &mut report, json!({ "round": rounds, "complement": cfg.choices[0].complement }))?;
            treated.insert(e);
        }
    }
}

/// Images of the finite vertices.
fn vertex_images(emb: &Embedding) -> BTreeMap<Vec<Rational>, VertexId> {
    let sk = emb.skeleton();
    let g = sk.finite();
    let mut per: BTreeMap<VertexId, Vec<Rational>> = BTreeMap::new();
    for (k, f) in emb.coords().iter().enumerate() {
        for e in g.edges() {
            if let Some(bps) = f.edge_breakpoints(&e.id) {
                for (v, b) in [(&e.from, bps.first()), (&e.to, bps.last())] {
                    let slot = per.entry(v.clone()).or_insert_with(|| vec![Rational::zero(); emb.dim()]);
                    slot[k] = b.expect("breakpoints").value.clone();
                }
            }
        }
        for r in sk.rays() {
            let slot = per.entry(r.attach.clone()).or_insert_with(|| vec![Rational::zero(); emb.dim()]);
            slot[k] = f.ray(&r.id).map(|p| p.anchor.clone()).unwrap_or_default();
        }
    }
    per.into_iter().map(|(v, x)| (x, v)).collect()
}

/// Outgoing tangent edges at `v` with their slope vectors.
fn tangents(emb: &Embedding, v: &VertexId) -> Vec<(EdgeId, bool, Vec<i64>)> {
    let sk = emb.skeleton();
    let mut out = Vec::new();
    for e in sk.finite().edges() {
        for (end, at_from) in [(&e.from, true), (&e.to, false)] {
            if end == v {
                let dir = emb
                    .coords()
                    .iter()
                    .map(|f| {
                        let s = f.segments(&e.id);
                        if at_from { s[0].slope } else { -s.last().unwrap().slope }
                    })
                    .collect();
                out.push((e.id.clone(), false, dir));
            }
        }
    }
    for r in sk.rays_at(v) {
        out.push((r.id.clone(), true, emb.coords().iter().map(|f| f.ray_slope(&r.id)).collect()));
    }
    out
}

fn singular_count(emb: &Embedding) -> Result<(usize, Vec<(String, Vec<Rational>)>, bool)> {
    let t = tropicalize(emb)?;
    let report = t.curve.check_smooth();
    let mut finite = Vec::new();
    let mut infinite = false;
    for s in &report.singular_vertices {
        let v = t.curve.vertex(&s.vertex)?;
        match v.finite_coords() {
            Some(x) => finite.push((s.vertex.clone(), x)),
            None => infinite = true,
        }
    }
    Ok((report.singular_vertices.len() + report.heavy_edges.len(), finite, infinite))
}

/// Refines a fully faithful embedding until its tropicalization is smooth.
/// Embeddings that are not fully faithful go through
/// [`fully_faithful_pipeline`] first.
pub fn smoothing_pipeline(emb: &Embedding, opts: &PipelineOptions) -> Result<(Embedding, PipelineReport)> {
    let (mut cur, mut report) = match faithfulness(emb)? {
        Some(r) if r.fully_faithful => (emb.clone(), PipelineReport::default()),
        _ => fully_faithful_pipeline(emb, opts)?,
    };
    let faithful_certificate = std::mem::take(&mut report.certificate);
    report.pipeline = "smoothing".into();
    let mut ledger = PillarLedger::new(cur.skeleton().finite());
    let (mut count, mut singular, mut at_infinity) = singular_count(&cur)?;
    report.singular_counts.push(count);
    let mut resolved = Vec::new();
    while count > 0 {
        if resolved.len() >= opts.budget {
            return Err(Error::CertificateFailure(format!("budget of {} vertices used up with {count} singular left", opts.budget)));
        }
        let Some((image_id, coords)) = singular.first().cloned() else {
            let why = if at_infinity { "a point at infinity" } else { "a heavy edge" };
            return Err(Error::CertificateFailure(format!("singular locus at {why} in a fully faithful image")));
        };
        let images = vertex_images(&cur);
        let v = images
            .get(&coords)
            .cloned()
            .ok_or_else(|| Error::CertificateFailure(format!("singular vertex {image_id} is not the image of a skeleton vertex")))?;
        // rays become short finite edges so the tents fit
        let finite_len = tangents(&cur, &v)
            .iter()
            .filter(|t| !t.1)
            .map(|t| cur.skeleton().finite().edge(&t.0).map(|e| e.length.clone()))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .min()
            .unwrap_or_else(|| int(1));
        let mut sk = cur.skeleton().clone();
        for (id, is_ray, _) in tangents(&cur, &v) {
            if is_ray {
                sk = sk.split_ray(&id, &finite_len)?.0;
            }
        }
        if sk != *cur.skeleton() {
            cur = cur.refine(sk)?;
        }
        let mut tans = tangents(&cur, &v);
        tans.sort_by(|a, b| a.2.cmp(&b.2).then(a.0.cmp(&b.0)));
        let g = cur.skeleton().finite().clone();
        let delta = tans
            .iter()
            .map(|t| g.edge(&t.0).map(|e| e.length.clone()))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .min()
            .expect("singular vertex has edges")
            / int(8);
        let e0 = tans[0].0.clone();
        let support = tans.iter().map(|t| tent_support(&g, &v, &t.0, &delta)).collect::<Result<Vec<_>>>()?;
        let targets: Vec<PillarTarget> = tans[1..]
            .iter()
            .map(|t| PillarTarget { label: format!("{v}:{}", t.0), avoid_image: Vec::new(), avoid: support.clone() })
            .collect();
        let snapshot = cur.clone();
        let cfg = select_pillars_with(&snapshot, &targets, &mut ledger, &opts.pillars)?;
        for (t, choice) in tans[1..].iter().zip(&cfg.choices) {
            let c = vertex_function(&snapshot, &v, &e0, &t.0, Some(delta.clone()), &choice.sets)?;
            let c = rebase(&c, snapshot.skeleton(), cur.skeleton())?;
            let status = json!({ "vertex": v.0, "image": image_id, "e0": e0.0, "delta": format_rational(&delta) });
            cur = step(&cur, &c, &mut report, status)?;
        }
        let (next, next_singular, next_inf) = singular_count(&cur)?;
        if next >= count {
            return Err(Error::MonotonicityViolation(format!("{count} singular before resolving {v}, {next} after")));
        }
        if let Some(last) = report.steps.last_mut() {
            last.status["singular_after"] = json!(next);
        }
        resolved.push(v.0.clone());
        count = next;
        singular = next_singular;
        at_infinity = next_inf;
        report.singular_counts.push(count);
    }
    let t = tropicalize(&cur)?;
    let smooth = t.curve.check_smooth();
    let faithful = t.faithfulness();
    report.certificate = json!({
        "smooth": smooth.smooth,
        "balanced": t.curve.check_balancing().balanced,
        "resolved_vertices": resolved,
        "singular_counts": report.singular_counts,
        "faithfulness": faithfulness_json(&faithful),
        "fully_faithful_stage": faithful_certificate,
    });
    if !smooth.smooth {
        return Err(Error::CertificateFailure("smoothing finished with singular vertices".into()));
    }
    Ok((cur, report))
}

/// Moves a construction built on `old` onto its refinement `new`.
fn rebase(c: &Construction, old: &ExtendedGraph, new: &ExtendedGraph) -> Result<Construction> {
    if old == new {
        return Ok(c.clone());
    }
    let old_finite = ExtendedGraph::from_finite(old.finite().clone());
    let new_finite = ExtendedGraph::from_finite(new.finite().clone());
    let function = c.function.transport(&old_finite, &new_finite)?.finite_part();
    let divisor: Divisor = c.divisor.transport(new.finite())?;
    Ok(Construction { function, divisor, ..c.clone() })
}
