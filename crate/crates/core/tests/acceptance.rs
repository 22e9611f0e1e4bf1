//! Acceptance run: one line per criterion with its verdict and timing.
//! Runs without the default harness so the lines are always printed.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use common::*;
use tropicurve::curve::{SingularReason, TropEdge, TropVertex, TropicalCurve};
use tropicurve::divisor::{break_divisor_decompose, construct_pl_with_divisor, default_basepoint, divisor_of_finite, Divisor};
use tropicurve::fixtures::suite;
use tropicurve::graph::{EdgeId, MetricGraph};
use tropicurve::io::write_curve;
use tropicurve::rational::{int, rat, ExtRational};
use tropicurve::synthesis::{fully_faithful_pipeline, smoothing_pipeline, tate_demo, PipelineOptions};
use tropicurve::tropicalize::{stretching_factor, tropicalize, Embedding};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

/// First Betti number of the part of the curve with finite vertices.
fn bounded_betti(c: &TropicalCurve) -> usize {
    let finite: Vec<&str> = c.vertices().iter().filter(|v| !v.is_infinite()).map(|v| v.id.as_str()).collect();
    let index: BTreeMap<&str, usize> = finite.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut parent: Vec<usize> = (0..finite.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    let mut edges = 0;
    for e in c.edges() {
        if let (Some(&a), Some(&b)) = (index.get(e.from.as_str()), index.get(e.to.as_str())) {
            edges += 1;
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
    }
    let comps = (0..finite.len()).filter(|&i| find(&mut parent, i) == i).count();
    edges + comps - finite.len()
}

fn criterion_1() -> Check {
    let demo = tate_demo(&int(1)).map_err(|e| e.to_string())?;
    let c = &demo.tropicalization.curve;
    ensure(c.dim() == 2, "ambient dimension is not 2")?;
    let mut dirs: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    for e in c.edges().iter().filter(|e| e.length.is_none()) {
        *dirs.entry(e.direction.clone()).or_default() += 1;
    }
    let want: BTreeMap<Vec<i64>, usize> = [(vec![1, 1], 3), (vec![-1, 0], 3), (vec![0, -1], 3)].into_iter().collect();
    ensure(dirs == want, format!("ray directions {dirs:?}"))?;
    ensure(bounded_betti(c) == 1, "bounded part is not a single cycle")?;
    ensure(c.edges().iter().all(|e| e.weight == 1), "an edge has weight above one")?;
    ensure(c.check_smooth().smooth, "not smooth")?;
    ensure(demo.tropicalization.faithfulness().fully_faithful, "not fully faithful")?;
    let finite_v = c.vertices().iter().filter(|v| !v.is_infinite()).count();
    let golden = include_str!("../../cli/tests/golden/tate_curve.json");
    ensure(write_curve(c) == golden, "coordinates differ from the golden file")?;
    Ok(format!("9 rays, {finite_v} finite vertices, genus 1, golden match"))
}

fn star(dirs: &[[i64; 2]]) -> TropicalCurve {
    let mut vertices = vec![TropVertex { id: "v".into(), coords: vec![ExtRational::Finite(int(0)); 2] }];
    let mut edges = Vec::new();
    for (i, d) in dirs.iter().enumerate() {
        let coords = d
            .iter()
            .map(|&x| match x.signum() {
                0 => ExtRational::Finite(int(0)),
                1 => ExtRational::PlusInfinity,
                _ => ExtRational::MinusInfinity,
            })
            .collect();
        vertices.push(TropVertex { id: format!("w{i}"), coords });
        edges.push(TropEdge { id: format!("r{i}"), from: "v".into(), to: format!("w{i}"), direction: d.to_vec(), weight: 1, length: None });
    }
    TropicalCurve::new(2, vertices, edges).unwrap()
}

fn criterion_2() -> Check {
    let left = star(&[[-1, 0], [0, -1], [1, 1]]);
    let l = left.check_vertex_smooth("v").map_err(|e| e.to_string())?;
    ensure(l.smooth && left.check_balancing().balanced, "left vertex is not smooth")?;
    let middle = star(&[[1, 0], [-1, 0], [0, 1], [0, -1]]);
    let m = middle.check_vertex_smooth("v").map_err(|e| e.to_string())?;
    ensure(
        m.reason == Some(SingularReason::RankDefect { rank: 2, expected: 3 }),
        format!("middle vertex: {:?}", m.reason),
    )?;
    let right = star(&[[2, -1], [-1, 2], [-1, -1]]);
    let r = right.check_vertex_smooth("v").map_err(|e| e.to_string())?;
    ensure(
        r.reason == Some(SingularReason::NotSaturated { elementary_divisors: vec!["1".into(), "3".into()] }),
        format!("right vertex: {:?}", r.reason),
    )?;
    Ok("smooth / rank 2 of 3 / elementary divisor 3".into())
}

/// Every divisor of degree `g` in the family, checked against brute force.
fn break_oracle(g: &MetricGraph, family: &[Divisor]) -> Result<usize, String> {
    let breaks = lattice_break_divisors(g, 4);
    for d in family {
        let hits: Vec<&Divisor> = breaks.iter().filter(|b| aj_principal(g, &(d - *b))).collect();
        if hits.len() != 1 {
            return Err(format!("{} lattice break divisors for {d:?}", hits.len()));
        }
        let (b, _) = break_divisor_decompose(g, d).map_err(|e| e.to_string())?;
        if &b != hits[0] {
            return Err(format!("decomposition of {d:?} gave {b:?}, brute force {:?}", hits[0]));
        }
    }
    Ok(family.len())
}

fn criterion_3() -> Check {
    let mut checked = 0;
    // circles of length 1..4: every p + q - r on the quarter lattice
    for len in 1..=4 {
        let g = MetricGraph::new(vec![v("o")], vec![edge("c", "o", "o", int(len))]).unwrap();
        let pts = lattice_points(&g, 4);
        let mut family = BTreeSet::new();
        for p in &pts {
            for q in &pts {
                for r in &pts {
                    family.insert(Divisor::from_terms([(p.clone(), 1), (q.clone(), 1), (r.clone(), -1)]));
                }
            }
        }
        checked += break_oracle(&g, &family.into_iter().collect::<Vec<_>>())?;
    }
    // theta graph with lengths 1/2, 3/4, 5/4: every p + q + r - s
    let g = MetricGraph::new(
        vec![v("a"), v("b")],
        vec![edge("e1", "a", "b", rat(1, 2)), edge("e2", "a", "b", rat(3, 4)), edge("e3", "a", "b", rat(5, 4))],
    )
    .unwrap();
    let pts = lattice_points(&g, 4);
    let mut family = BTreeSet::new();
    for (i, p) in pts.iter().enumerate() {
        for (j, q) in pts.iter().enumerate().skip(i) {
            for r in pts.iter().skip(j) {
                for s in &pts {
                    family.insert(Divisor::from_terms([(p.clone(), 1), (q.clone(), 1), (r.clone(), 1), (s.clone(), -1)]));
                }
            }
        }
    }
    checked += break_oracle(&g, &family.into_iter().collect::<Vec<_>>())?;
    Ok(format!("{checked} divisors, each with exactly one lattice break divisor"))
}

fn criterion_4() -> Check {
    let mut r = runner(1000);
    let count = std::cell::Cell::new(0usize);
    r.run(&arb_graph_and_function(), |(g, f)| {
        let d = divisor_of_finite(&g, &f);
        let h = construct_pl_with_divisor(&g, &d, &default_basepoint(&g), &int(0)).map_err(|e| proptest::test_runner::TestCaseError::fail(e.to_string()))?;
        proptest::prop_assert_eq!(divisor_of_finite(&g, &h), d);
        count.set(count.get() + 1);
        Ok(())
    })
    .map_err(|e| e.to_string())?;
    Ok(format!("{} principal divisors round-trip exactly", count.get()))
}

/// Every ray of `after` that `before` lacks has stretching factor one.
fn new_rays_unit(before: &Embedding, after: &Embedding) -> Result<usize, String> {
    let old: BTreeSet<&EdgeId> = before.skeleton().rays().iter().map(|r| &r.id).collect();
    let mut n = 0;
    for r in after.skeleton().rays().iter().filter(|r| !old.contains(&r.id)) {
        let slopes: Vec<i64> = after.coords().iter().map(|f| f.ray_slope(&r.id)).collect();
        let s = stretching_factor(&slopes).map_err(|e| e.to_string())?;
        ensure(s == 1, format!("ray {} has stretching factor {s}", r.id))?;
        n += 1;
    }
    Ok(n)
}

fn criterion_5() -> Check {
    let fixtures = suite();
    ensure(fixtures.len() >= 20, "fewer than 20 fixtures")?;
    let opts = PipelineOptions::default();
    let mut rays = 0;
    for (name, emb) in &fixtures {
        let ctx = |e: String| format!("{name}: {e}");
        let (ff, _) = fully_faithful_pipeline(emb, &opts).map_err(|e| ctx(e.to_string()))?;
        let t = tropicalize(&ff).map_err(|e| ctx(e.to_string()))?;
        let report = t.faithfulness();
        ensure(report.fully_faithful, ctx(format!("not fully faithful: {report:?}")))?;
        ensure(report.stretched.is_empty(), ctx("a piece is stretched".into()))?;
        rays += new_rays_unit(emb, &ff).map_err(ctx)?;

        let (sm, rep) = smoothing_pipeline(emb, &opts).map_err(|e| ctx(e.to_string()))?;
        let t = tropicalize(&sm).map_err(|e| ctx(e.to_string()))?;
        ensure(t.curve.check_smooth().smooth, ctx("not smooth".into()))?;
        ensure(t.faithfulness().stretched.is_empty(), ctx("a piece is stretched".into()))?;
        ensure(
            rep.singular_counts.windows(2).all(|w| w[1] < w[0]) && rep.singular_counts.last() == Some(&0),
            ctx(format!("singular counts {:?}", rep.singular_counts)),
        )?;
        rays += new_rays_unit(emb, &sm).map_err(ctx)?;
    }
    Ok(format!("{} skeleta, {rays} added rays with stretching factor 1", fixtures.len()))
}

fn criterion_6() -> Check {
    let mut r = runner(500);
    let count = std::cell::Cell::new(0usize);
    r.run(&arb_harmonic_embedding(), |emb| {
        let t = tropicalize(&emb).map_err(|e| proptest::test_runner::TestCaseError::fail(e.to_string()))?;
        proptest::prop_assert!(t.curve.check_balancing().balanced);
        count.set(count.get() + 1);
        Ok(())
    })
    .map_err(|e| e.to_string())?;
    Ok(format!("{} random embeddings balanced", count.get()))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Check, Duration); 6] = [
        (1, "Tate curve reproduction", criterion_1, Duration::from_secs(1)),
        (2, "smoothness lint on the three star vertices", criterion_2, Duration::from_millis(100)),
        (3, "break divisor uniqueness against brute force", criterion_3, Duration::from_secs(30)),
        (4, "principality round trip", criterion_4, Duration::from_secs(10)),
        (5, "pipeline certificates on the fixture suite", criterion_5, Duration::from_secs(60)),
        (6, "balancing of random embeddings", criterion_6, Duration::from_secs(20)),
    ];
    let mut all = true;
    for (n, name, f, limit) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let verdict = match outcome {
            Ok(detail) if took <= limit => format!("PASS  {detail}"),
            Ok(detail) => format!("FAIL  over time limit; {detail}"),
            Err(e) => format!("FAIL  {e}"),
        };
        all &= verdict.starts_with("PASS");
        println!("criterion {n} ({name}): {verdict} [{took:.2?} of {limit:?}]");
    }
    let note = if all { "PASS  analytic claims out of scope; their combinatorial shadows are criteria 1-6" } else { "FAIL  some shadow criterion failed" };
    println!("criterion 7 (scope note): {note}");
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
