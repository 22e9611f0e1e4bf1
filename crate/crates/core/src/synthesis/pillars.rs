//! Choosing pillar points for the constructions.
//!
//! For every construction we pick a spanning-tree complement of the current
//! finite graph and, on each of its edges, four pillar points inside a free
//! gap. Gaps are cut down geometrically (halves, quarters, ...) until the
//! image of the pillar interval avoids the images we were asked to avoid.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::divisor::PillarSet;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, GraphPoint, MetricGraph, UnionFind};
use crate::rational::{format_rational, int, rat, Rational};
use crate::tropicalize::Embedding;

use super::image::{any_meet, edge_image, full_image};

/// What one construction needs from its pillar intervals.
#[derive(Debug, Clone, Default)]
pub struct PillarTarget {
    pub label: String,
    /// Skeleton edges or rays whose image the intervals must not meet.
    pub avoid_image: Vec<EdgeId>,
    /// Stretches `(edge, from, to)` of the current finite graph the
    /// intervals must not meet, e.g. the support of the construction.
    pub avoid: Vec<(EdgeId, Rational, Rational)>,
}

/// Search budget: `depth` halving levels per gap and `attempts` complement
/// choices per target.
#[derive(Debug, Clone, Copy)]
pub struct PillarOptions {
    pub depth: u32,
    pub attempts: usize,
}

impl Default for PillarOptions {
    fn default() -> Self {
        PillarOptions { depth: 4, attempts: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PillarChoice {
    pub label: String,
    pub complement: Vec<EdgeId>,
    pub sets: Vec<PillarSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PillarConfig {
    pub choices: Vec<PillarChoice>,
}

impl PillarConfig {
    /// Re-checks the pillar pattern on every edge, the complement property,
    /// and pairwise disjointness of the intervals `[p1, p4]` on `graph`.
    pub fn check(&self, graph: &MetricGraph) -> Result<()> {
        let mut ledger = PillarLedger::new(graph);
        for c in &self.choices {
            if graph.betti_number() > 0 {
                let tc = graph.spanning_tree_complement(&c.complement)?;
                if !tc.is_complement {
                    return Err(Error::NotComplement);
                }
            }
            for s in &c.sets {
                if !graph.validate_pillar_points(&s.edge, &s.points)? {
                    return Err(Error::InvalidPillars(format!("{} on {}", c.label, s.edge)));
                }
                let (a, b) = (&s.points[0].offset, &s.points[3].offset);
                if ledger.blocked(graph, &s.edge).iter().any(|(x, y)| x <= b && a <= y) {
                    return Err(Error::InvalidPillars(format!("{} overlaps an earlier interval on {}", c.label, s.edge)));
                }
                ledger.reserve(graph, &s.edge, a, b);
            }
        }
        Ok(())
    }
}

/// Intervals already taken by pillars, kept on the edges of a base graph so
/// that later subdivisions do not lose them.
#[derive(Debug, Clone, Default)]
pub struct PillarLedger {
    base: BTreeSet<EdgeId>,
    used: BTreeMap<EdgeId, Vec<(Rational, Rational)>>,
}

impl PillarLedger {
    pub fn new(base: &MetricGraph) -> Self {
        PillarLedger { base: base.edges().iter().map(|e| e.id.clone()).collect(), used: BTreeMap::new() }
    }

    fn locate(&self, graph: &MetricGraph, e: &EdgeId) -> (EdgeId, Rational) {
        graph.origin_in(e, |id| self.base.contains(id)).unwrap_or_else(|| (e.clone(), Rational::zero()))
    }

    /// Marks `[a, b]` of the current edge `e` as used.
    pub fn reserve(&mut self, graph: &MetricGraph, e: &EdgeId, a: &Rational, b: &Rational) {
        let (root, off) = self.locate(graph, e);
        self.used.entry(root).or_default().push((&off + a, &off + b));
    }

    /// Used intervals meeting the current edge `e`, in its own offsets.
    pub fn blocked(&self, graph: &MetricGraph, e: &EdgeId) -> Vec<(Rational, Rational)> {
        let (root, off) = self.locate(graph, e);
        let Ok(len) = graph.edge(e).map(|x| x.length.clone()) else { return Vec::new() };
        self.used
            .get(&root)
            .into_iter()
            .flatten()
            .map(|(a, b)| (a - &off, b - &off))
            .filter(|(a, b)| b >= &Rational::zero() && a <= &len)
            .collect()
    }

    /// Number of reserved intervals.
    pub fn len(&self) -> usize {
        self.used.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Open gaps of `[0, len]` left by closed `blocked` intervals, longest first.
fn gaps(len: &Rational, mut blocked: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    blocked.sort();
    let mut out = Vec::new();
    let mut cursor = Rational::zero();
    for (a, b) in blocked {
        if a > cursor {
            out.push((cursor.clone(), a.clone()));
        }
        if b > cursor {
            cursor = b;
        }
    }
    if &cursor < len {
        out.push((cursor, len.clone()));
    }
    out.sort_by(|x, y| (&y.1 - &y.0).cmp(&(&x.1 - &x.0)).then(x.0.cmp(&y.0)));
    out
}

fn edge_gaps(
    graph: &MetricGraph,
    ledger: &PillarLedger,
    target: &PillarTarget,
    e: &EdgeId,
) -> Vec<(Rational, Rational)> {
    let len = graph.edge(e).expect("edge of graph").length.clone();
    let mut blocked = ledger.blocked(graph, e);
    blocked.extend(target.avoid.iter().filter(|(x, _, _)| x == e).map(|(_, a, b)| (a.clone(), b.clone())));
    gaps(&len, blocked)
}

/// Complement of a spanning tree that grows through the edges with the least
/// free room first, so that the roomiest edges are left over.
fn roomy_complement(graph: &MetricGraph, room: &BTreeMap<EdgeId, Option<Rational>>) -> Vec<EdgeId> {
    let mut order: Vec<&crate::graph::Edge> = graph.edges().iter().collect();
    order.sort_by(|a, b| room[&a.id].cmp(&room[&b.id]).then(a.id.cmp(&b.id)));
    let mut uf = UnionFind::new(graph.vertices().len());
    let mut out = Vec::new();
    for e in order {
        let a = graph.vertex_position(&e.from).unwrap();
        let b = graph.vertex_position(&e.to).unwrap();
        if !uf.union(a, b) {
            out.push(e.id.clone());
        }
    }
    out.sort();
    out
}

fn place(
    emb: &Embedding,
    e: &EdgeId,
    gaps: &[(Rational, Rational)],
    avoid: &[Vec<super::image::ImagePiece>],
    depth: u32,
) -> Option<[Rational; 4]> {
    for (alpha, beta) in gaps {
        let width = beta - alpha;
        for level in 0..=depth {
            let parts = 1i64 << level;
            let w = &width / int(parts);
            for j in 0..parts {
                let lo = alpha + &w * int(j);
                let pts = [1, 2, 5, 6].map(|k| &lo + &w * rat(k, 8));
                let img = edge_image(emb, e, &pts[0], &pts[3]);
                if avoid.iter().all(|a| !any_meet(&img, a)) {
                    return Some(pts);
                }
            }
        }
    }
    None
}

/// Pillar choice for each target against a fresh ledger.
pub fn select_pillars(emb: &Embedding, targets: &[PillarTarget], opts: &PillarOptions) -> Result<PillarConfig> {
    let mut ledger = PillarLedger::new(emb.skeleton().finite());
    select_pillars_with(emb, targets, &mut ledger, opts)
}

/// Like [`select_pillars`], also avoiding and then extending `ledger`.
pub fn select_pillars_with(
    emb: &Embedding,
    targets: &[PillarTarget],
    ledger: &mut PillarLedger,
    opts: &PillarOptions,
) -> Result<PillarConfig> {
    let graph = emb.skeleton().finite();
    let mut config = PillarConfig::default();
    for target in targets {
        if graph.betti_number() == 0 {
            config.choices.push(PillarChoice { label: target.label.clone(), complement: Vec::new(), sets: Vec::new() });
            continue;
        }
        let avoid = target
            .avoid_image
            .iter()
            .map(|e| full_image(emb, e))
            .collect::<Result<Vec<_>>>()?;
        let mut dead: BTreeSet<EdgeId> = BTreeSet::new();
        let mut found = None;
        for _ in 0..opts.attempts.max(1) {
            let all_gaps: BTreeMap<EdgeId, Vec<(Rational, Rational)>> =
                graph.edges().iter().map(|e| (e.id.clone(), edge_gaps(graph, ledger, target, &e.id))).collect();
            let room = all_gaps
                .iter()
                .map(|(id, g)| {
                    let r = if dead.contains(id) { None } else { g.first().map(|(a, b)| b - a) };
                    (id.clone(), r)
                })
                .collect();
            let complement = roomy_complement(graph, &room);
            let mut sets = Vec::new();
            let mut failed = None;
            for e in &complement {
                let placed = if dead.contains(e) { None } else { place(emb, e, &all_gaps[e], &avoid, opts.depth) };
                match placed {
                    Some(pts) => sets.push(PillarSet { edge: e.clone(), points: pts.map(|t| GraphPoint::new(e.0.clone(), t)) }),
                    None => {
                        failed = Some(e.clone());
                        break;
                    }
                }
            }
            match failed {
                None => {
                    found = Some((complement, sets));
                    break;
                }
                Some(e) => {
                    if !dead.insert(e) {
                        break;
                    }
                }
            }
        }
        let Some((complement, sets)) = found else {
            return Err(Error::PillarSearchExhausted(format!(
                "{}: no spanning-tree complement with free pillar room (unusable edges: {}; avoiding images of {}; depth {}, attempts {})",
                target.label,
                dead.iter().map(|e| e.0.as_str()).collect::<Vec<_>>().join(","),
                target.avoid_image.iter().map(|e| e.0.as_str()).collect::<Vec<_>>().join(","),
                opts.depth,
                opts.attempts
            )));
        };
        for s in &sets {
            ledger.reserve(graph, &s.edge, &s.points[0].offset, &s.points[3].offset);
        }
        config.choices.push(PillarChoice { label: target.label.clone(), complement, sets });
    }
    Ok(config)
}

/// Human-readable form of a pillar set.
pub fn describe(set: &PillarSet) -> String {
    let pts: Vec<String> = set.points.iter().map(|p| format_rational(&p.offset)).collect();
    format!("{}@({})", set.edge, pts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, ExtendedGraph, VertexId};

    fn v(s: &str) -> VertexId {
        VertexId::new(s)
    }

    fn circle() -> MetricGraph {
        MetricGraph::new(
            vec![v("a"), v("b")],
            vec![
                Edge { id: EdgeId::new("top"), from: v("a"), to: v("b"), length: int(4) },
                Edge { id: EdgeId::new("bot"), from: v("a"), to: v("b"), length: int(2) },
            ],
        )
        .unwrap()
    }

    #[test]
    fn gap_arithmetic() {
        let g = gaps(&int(10), vec![(int(2), int(3)), (int(1), int(2)), (int(7), int(8))]);
        assert_eq!(g, vec![(int(3), int(7)), (int(8), int(10)), (int(0), int(1))]);
        assert!(gaps(&int(1), vec![(int(0), int(1))]).is_empty());
    }

    #[test]
    fn circle_single_target() {
        let emb = Embedding::new(ExtendedGraph::from_finite(circle()), vec![]).unwrap();
        let cfg = select_pillars(&emb, &[PillarTarget { label: "t".into(), ..Default::default() }], &PillarOptions::default())
            .unwrap();
        let set = &cfg.choices[0].sets[0];
        // the longer arc is left over, pillars at 1/8, 2/8, 5/8, 6/8 of it
        assert_eq!(set.edge, EdgeId::new("top"));
        let offs: Vec<Rational> = set.points.iter().map(|p| p.offset.clone()).collect();
        assert_eq!(offs, vec![rat(1, 2), int(1), rat(5, 2), int(3)]);
        cfg.check(emb.skeleton().finite()).unwrap();
    }

    #[test]
    fn tree_needs_nothing() {
        let g = MetricGraph::new(
            vec![v("a"), v("b")],
            vec![Edge { id: EdgeId::new("e"), from: v("a"), to: v("b"), length: int(1) }],
        )
        .unwrap();
        let emb = Embedding::new(ExtendedGraph::from_finite(g), vec![]).unwrap();
        let cfg = select_pillars(&emb, &[PillarTarget::default()], &PillarOptions::default()).unwrap();
        assert!(cfg.choices[0].sets.is_empty());
    }

    #[test]
    fn repeated_targets_shrink_or_exhaust() {
        let emb = Embedding::new(ExtendedGraph::from_finite(circle()), vec![]).unwrap();
        let targets: Vec<PillarTarget> =
            (0..6).map(|i| PillarTarget { label: format!("t{i}"), ..Default::default() }).collect();
        let cfg = select_pillars(&emb, &targets, &PillarOptions::default()).unwrap();
        cfg.check(emb.skeleton().finite()).unwrap();
        // a constant coordinate maps everything to one point, so condition ii
        // can never hold
        let flat = Embedding::new(
            ExtendedGraph::from_finite(circle()),
            vec![crate::pl::PlFunction::constant(&ExtendedGraph::from_finite(circle()), int(0))],
        )
        .unwrap();
        let t = PillarTarget { label: "e".into(), avoid_image: vec![EdgeId::new("bot")], avoid: vec![] };
        let err = select_pillars(&flat, &[t], &PillarOptions { depth: 2, attempts: 3 });
        assert!(matches!(err, Err(Error::PillarSearchExhausted(_))));
    }
}
