//! Generators and brute-force oracles shared by the integration tests. The
//! oracles avoid the library's own algorithms: principality is decided by
//! the Abel-Jacobi pairing against fundamental cycles, break divisors by
//! enumerating spanning trees and lattice points.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::{One, Zero};
use proptest::prelude::*;

use tropicurve::divisor::Divisor;
use tropicurve::graph::{Edge, EdgeId, GraphPoint, MetricGraph, Point, VertexId};
use tropicurve::pl::{Breakpoint, PlFunction};
use tropicurve::fixtures::harmonize;
use tropicurve::rational::{int, rat, Rational};
use tropicurve::tropicalize::Embedding;

pub fn v(s: &str) -> VertexId {
    VertexId::new(s)
}

pub fn edge(id: &str, a: &str, b: &str, len: Rational) -> Edge {
    Edge { id: EdgeId::new(id), from: v(a), to: v(b), length: len }
}

/// Union-find check that the edges with indices outside `removed` form a
/// spanning tree.
fn is_tree_complement(g: &MetricGraph, removed: &BTreeSet<usize>) -> bool {
    let n = g.vertices().len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut joined = 0;
    for (i, e) in g.edges().iter().enumerate() {
        if removed.contains(&i) {
            continue;
        }
        let a = find(&mut parent, g.vertex_position(&e.from).unwrap());
        let b = find(&mut parent, g.vertex_position(&e.to).unwrap());
        if a == b {
            return false;
        }
        parent[a] = b;
        joined += 1;
    }
    joined + 1 == n
}

fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if m < k {
        return vec![];
    }
    let mut out = subsets(m - 1, k);
    for mut s in subsets(m - 1, k - 1) {
        s.push(m - 1);
        out.push(s);
    }
    out
}

/// Points of the closed edge `e` at offsets in `(1/den) Z`, canonical.
pub fn lattice_points_on(g: &MetricGraph, e: &Edge, den: i64) -> Vec<Point> {
    let mut out = Vec::new();
    let mut k = 0;
    loop {
        let t = rat(k, den);
        if t > e.length {
            break;
        }
        out.push(g.canonical(&GraphPoint { edge: e.id.clone(), offset: t }).unwrap());
        k += 1;
    }
    out
}

/// Every lattice point of the graph, sorted.
pub fn lattice_points(g: &MetricGraph, den: i64) -> Vec<Point> {
    let mut set: BTreeSet<Point> = g.edges().iter().flat_map(|e| lattice_points_on(g, e, den)).collect();
    set.extend(g.vertices().iter().map(|x| Point::Vertex(x.clone())));
    set.into_iter().collect()
}

/// All break divisors supported on the lattice: one point on each closed
/// edge of a spanning tree complement.
pub fn lattice_break_divisors(g: &MetricGraph, den: i64) -> Vec<Divisor> {
    let gen = g.betti_number();
    let mut out: BTreeSet<Divisor> = BTreeSet::new();
    for set in subsets(g.edges().len(), gen) {
        if !is_tree_complement(g, &set.iter().copied().collect()) {
            continue;
        }
        let choices: Vec<Vec<Point>> = set.iter().map(|&i| lattice_points_on(g, &g.edges()[i], den)).collect();
        let mut idx = vec![0usize; choices.len()];
        loop {
            out.insert(Divisor::from_terms(idx.iter().zip(&choices).map(|(&j, c)| (c[j].clone(), 1))));
            let mut k = 0;
            loop {
                if k == idx.len() {
                    break;
                }
                idx[k] += 1;
                if idx[k] < choices[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
    }
    out.into_iter().collect()
}

/// Gaussian elimination over the rationals for a square nonsingular system.
fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Vec<Rational> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero()).expect("nonsingular");
        a.swap(c, p);
        b.swap(c, p);
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[c][c];
                for k in c..n {
                    let x = &f * &a[c][k];
                    a[r][k] -= x;
                }
                let x = &f * &b[c];
                b[r] -= x;
            }
        }
    }
    (0..n).map(|i| &b[i] / &a[i][i]).collect()
}

/// Abel-Jacobi test: `d` is principal iff it has degree zero and its
/// pairing with the fundamental cycles lies in the period lattice.
pub fn aj_principal(g: &MetricGraph, d: &Divisor) -> bool {
    if d.degree() != 0 {
        return false;
    }
    let m = g.edges().len();
    let n = g.vertices().len();
    // BFS tree and signed edge chains from the root
    let root = 0;
    let mut chain: Vec<Option<Vec<Rational>>> = vec![None; n];
    chain[root] = Some(vec![Rational::zero(); m]);
    let mut tree = BTreeSet::new();
    let mut queue = VecDeque::from([root]);
    while let Some(x) = queue.pop_front() {
        for (i, e) in g.edges().iter().enumerate() {
            let (a, b) = (g.vertex_position(&e.from).unwrap(), g.vertex_position(&e.to).unwrap());
            let (next, sign) = if a == x { (b, 1) } else if b == x { (a, -1) } else { continue };
            if chain[next].is_none() {
                let mut c = chain[x].clone().unwrap();
                c[i] += int(sign) * &e.length;
                chain[next] = Some(c);
                tree.insert(i);
                queue.push_back(next);
            }
        }
    }
    // fundamental cycles as edge coefficient vectors
    let cycles: Vec<Vec<Rational>> = (0..m)
        .filter(|i| !tree.contains(i))
        .map(|i| {
            let e = &g.edges()[i];
            let (a, b) = (g.vertex_position(&e.from).unwrap(), g.vertex_position(&e.to).unwrap());
            let ca = chain[a].as_ref().unwrap();
            let cb = chain[b].as_ref().unwrap();
            (0..m)
                .map(|k| {
                    let along = if k == i { Rational::one() } else { Rational::zero() };
                    // a -> b along e, then back to the root and out to a
                    along + (&ca[k] - &cb[k]) / &g.edges()[k].length
                })
                .collect()
        })
        .collect();
    let gen = cycles.len();
    if gen == 0 {
        return true;
    }
    let len: Vec<Rational> = g.edges().iter().map(|e| e.length.clone()).collect();
    let pair = |chain: &[Rational], cyc: &[Rational]| -> Rational { (0..m).map(|k| &chain[k] * &cyc[k]).sum() };
    let gram: Vec<Vec<Rational>> = cycles
        .iter()
        .map(|a| cycles.iter().map(|b| (0..m).map(|k| &a[k] * &b[k] * &len[k]).sum()).collect())
        .collect();
    let mut aj = vec![Rational::zero(); gen];
    for (p, c) in d.terms() {
        let path = match p {
            Point::Vertex(x) => chain[g.vertex_position(x).unwrap()].clone().unwrap(),
            Point::OnEdge(e, t) => {
                let i = g.edge_position(e).unwrap();
                let mut c = chain[g.vertex_position(&g.edges()[i].from).unwrap()].clone().unwrap();
                c[i] += t;
                c
            }
            Point::AtInfinity(_) => panic!("finite divisors only"),
        };
        for j in 0..gen {
            aj[j] += int(*c) * pair(&path, &cycles[j]);
        }
    }
    solve(gram, aj).iter().all(|x| x.is_integer())
}

/// A connected graph on up to four vertices with at most six edges and
/// lengths with denominators up to three. Loops are allowed.
pub fn arb_graph() -> impl Strategy<Value = MetricGraph> {
    (1usize..=4)
        .prop_flat_map(|n| {
            let tree = proptest::collection::vec((0usize..64, 1i64..=6, 1i64..=3), n - 1);
            let extra = proptest::collection::vec((0usize..4, 0usize..4, 1i64..=6, 1i64..=3), 0..=(7 - n).min(3));
            (Just(n), tree, extra)
        })
        .prop_map(|(n, tree, extra)| {
            let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
            let mut edges = Vec::new();
            for (i, (pick, p, q)) in tree.into_iter().enumerate() {
                let child = i + 1;
                let parent = pick % child;
                edges.push(edge(&format!("t{i}"), &names[parent], &names[child], rat(p, q)));
            }
            for (i, (a, b, p, q)) in extra.into_iter().enumerate() {
                edges.push(edge(&format!("x{i}"), &names[a % n], &names[b % n], rat(p, q)));
            }
            MetricGraph::new(names.iter().map(|s| v(s)).collect(), edges).unwrap()
        })
}

/// A PL function with integer slopes on `g`: values at the vertices, and on
/// every edge a two-piece profile with a random breakpoint and slopes.
pub fn pl_function(g: &MetricGraph, values: &[i64], shapes: &[(i64, i64, i64)]) -> PlFunction {
    let n = g.vertices().len();
    // vertex values: integer combinations chosen along a BFS tree
    let mut val: Vec<Option<Rational>> = vec![None; n];
    val[0] = Some(int(values[0]));
    let mut queue = VecDeque::from([0usize]);
    let mut tree_slope: BTreeMap<usize, i64> = BTreeMap::new();
    while let Some(x) = queue.pop_front() {
        for (i, e) in g.edges().iter().enumerate() {
            let (a, b) = (g.vertex_position(&e.from).unwrap(), g.vertex_position(&e.to).unwrap());
            let (next, sign) = if a == x { (b, 1) } else if b == x { (a, -1) } else { continue };
            if val[next].is_none() {
                let s = values[(i + 1) % values.len()];
                tree_slope.insert(i, s * sign);
                val[next] = Some(val[x].clone().unwrap() + int(s * sign) * &e.length);
                queue.push_back(next);
            }
        }
    }
    let mut edges = BTreeMap::new();
    for (i, e) in g.edges().iter().enumerate() {
        let a = val[g.vertex_position(&e.from).unwrap()].clone().unwrap();
        let b = val[g.vertex_position(&e.to).unwrap()].clone().unwrap();
        let (num, den, kink) = shapes[i % shapes.len()];
        let l = &e.length;
        let mean = (&b - &a) / l;
        // s1 on [0, x], s2 on [x, l] with s1 > mean > s2 or both equal mean
        let bps = if mean.is_integer() && kink == 0 {
            vec![Breakpoint::new(int(0), a.clone()), Breakpoint::new(l.clone(), b.clone())]
        } else {
            let s1 = mean.floor() + int(1 + kink.abs());
            let s2 = mean.ceil() - int(1 + (num + den).rem_euclid(3));
            let x = (&b - &a - &s2 * l) / (&s1 - &s2);
            vec![Breakpoint::new(int(0), a.clone()), Breakpoint::new(x.clone(), &a + &s1 * &x), Breakpoint::new(l.clone(), b.clone())]
        };
        edges.insert(e.id.clone(), bps);
    }
    PlFunction::from_parts(edges, BTreeMap::new())
}

pub fn arb_graph_and_function() -> impl Strategy<Value = (MetricGraph, PlFunction)> {
    (
        arb_graph(),
        proptest::collection::vec(-3i64..=3, 1..8),
        proptest::collection::vec((-3i64..=3, 1i64..=4, 0i64..=2), 1..8),
    )
        .prop_map(|(g, values, shapes)| {
            let f = pl_function(&g, &values, &shapes);
            (g, f)
        })
}

/// `k x k` minors gcd, from which the elementary divisors follow.
pub fn determinantal_divisors(rows: &[Vec<i64>]) -> Vec<i128> {
    fn det(m: &[Vec<i128>]) -> i128 {
        match m.len() {
            0 => 1,
            1 => m[0][0],
            n => (0..n)
                .map(|j| {
                    let minor: Vec<Vec<i128>> = m[1..].iter().map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| *x).collect()).collect();
                    let s = if j % 2 == 0 { 1 } else { -1 };
                    s * m[0][j] * det(&minor)
                })
                .sum(),
        }
    }
    fn gcd(a: i128, b: i128) -> i128 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    let r = rows.len();
    let c = rows.first().map(|x| x.len()).unwrap_or(0);
    let mut out = Vec::new();
    for k in 1..=r.min(c) {
        let mut g = 0;
        for rs in subsets(r, k) {
            for cs in subsets(c, k) {
                let m: Vec<Vec<i128>> = rs.iter().map(|&i| cs.iter().map(|&j| rows[i][j] as i128).collect()).collect();
                g = gcd(g, det(&m));
            }
        }
        if g == 0 {
            break;
        }
        out.push(g);
    }
    out
}

/// Random unimodular matrix as a product of elementary operations.
pub fn unimodular(n: usize, ops: &[(usize, usize, i64, bool)]) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    for &(i, j, k, swap) in ops {
        let (i, j) = (i % n, j % n);
        if swap {
            m.swap(i, j);
        } else if i != j {
            for c in 0..n {
                m[i][c] += k * m[j][c];
            }
        } else {
            for c in 0..n {
                m[i][c] = -m[i][c];
            }
        }
    }
    m
}

/// A random graph with one to three harmonic coordinates, linear on each
/// edge, made harmonic by unit rays.
pub fn arb_harmonic_embedding() -> impl Strategy<Value = Embedding> {
    (arb_graph(), proptest::collection::vec(proptest::collection::vec(-2i64..=2, 4), 1..=3)).prop_map(|(g, coords)| {
        // multiples of every numerator keep all slopes integral
        let l: i64 = g
            .edges()
            .iter()
            .map(|e| i64::try_from(e.length.numer().clone()).unwrap())
            .fold(1, |a, b| num_integer::Integer::lcm(&a, &b));
        let names: Vec<String> = g.vertices().iter().map(|x| x.0.clone()).collect();
        let values: Vec<Vec<(&str, i64)>> = coords
            .iter()
            .map(|c| names.iter().zip(c).map(|(n, k)| (n.as_str(), k * l)).collect())
            .collect();
        harmonize(g.clone(), &values).unwrap()
    })
}
