//! The `tropicurve/1` JSON formats.
//!
//! Every document is an object whose first field is `"schema"`. Rationals are
//! strings `"p/q"` or `"p"`; extended coordinates may also be `"+inf"` or
//! `"-inf"`. Output is pretty printed with a fixed field order, so writing
//! what was read gives the same bytes once the input is canonical.
//!
//! Structural mistakes are reported as [`Error::ParseAt`] with the line and
//! column of the offending value.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Map, Value};

use crate::curve::{TropEdge, TropVertex, TropicalCurve};
use crate::divisor::{Divisor, PillarSet};
use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeId, ExtendedGraph, GraphPoint, MetricGraph, Point, VertexId};
use crate::pl::{Breakpoint, PlFunction, RayPiece};
use crate::rational::{parse_rational, ExtRational, Rational};
use crate::synthesis::PipelineReport;
use crate::tropicalize::{Embedding, Provenance};

pub const SCHEMA: &str = "tropicurve/1";

/// A parsed document of any kind.
#[derive(Debug, Clone)]
pub enum Document {
    Graph(ExtendedGraph),
    Divisor(Divisor),
    Function(PlFunction),
    Embedding(Embedding),
    Curve(TropicalCurve),
    Core(BTreeSet<EdgeId>),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Graph(_) => "graph",
            Document::Divisor(_) => "divisor",
            Document::Function(_) => "function",
            Document::Embedding(_) => "embedding",
            Document::Curve(_) => "curve",
            Document::Core(_) => "core",
        }
    }
}

// ---------------------------------------------------------------- writing

fn r(x: &Rational) -> Value {
    Value::String(x.to_string())
}

fn doc(kind: &str, body: Value) -> Value {
    let mut m = Map::new();
    m.insert("schema".into(), SCHEMA.into());
    m.insert("kind".into(), kind.into());
    if let Value::Object(b) = body {
        m.extend(b);
    }
    Value::Object(m)
}

/// Pretty JSON with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}

pub fn point_value(p: &Point) -> Value {
    match p {
        Point::Vertex(v) => json!({ "vertex": v.0 }),
        Point::OnEdge(e, t) => json!({ "edge": e.0, "offset": r(t) }),
        Point::AtInfinity(v) => json!({ "infinity": v.0 }),
    }
}

pub fn graph_value(g: &ExtendedGraph) -> Value {
    let f = g.finite();
    let edges: Vec<Value> = f
        .edges()
        .iter()
        .map(|e| json!({ "id": e.id.0, "from": e.from.0, "to": e.to.0, "length": r(&e.length) }))
        .collect();
    let rays: Vec<Value> = g
        .rays()
        .iter()
        .map(|ray| {
            let mut m = Map::new();
            m.insert("id".into(), ray.id.0.clone().into());
            m.insert("attach".into(), json!({ "vertex": ray.attach.0 }));
            m.insert("leaf".into(), ray.leaf.0.clone().into());
            if ray.start != Rational::default() {
                m.insert("start".into(), r(&ray.start));
            }
            Value::Object(m)
        })
        .collect();
    json!({
        "vertices": f.vertices().iter().map(|v| v.0.clone()).collect::<Vec<_>>(),
        "edges": edges,
        "infinite_edges": rays,
    })
}

pub fn divisor_value(d: &Divisor) -> Value {
    Value::Array(d.terms().iter().map(|(p, c)| json!({ "point": point_value(p), "coeff": c })).collect())
}

pub fn function_value(f: &PlFunction) -> Value {
    let edges: Map<String, Value> = f
        .edge_map()
        .iter()
        .map(|(e, bps)| (e.0.clone(), Value::Array(bps.iter().map(|b| json!([r(&b.offset), r(&b.value)])).collect())))
        .collect();
    let rays: Map<String, Value> = f
        .ray_map()
        .iter()
        .map(|(e, p)| (e.0.clone(), json!({ "anchor": r(&p.anchor), "eventual_slope": p.slope })))
        .collect();
    json!({ "edges": edges, "infinite_edges": rays })
}

pub fn embedding_value(emb: &Embedding) -> Value {
    json!({
        "skeleton": graph_value(emb.skeleton()),
        "coords": emb.coords().iter().map(function_value).collect::<Vec<_>>(),
        "provenance": emb.provenance().iter().map(|p| json!({ "step": p.step, "params": p.params })).collect::<Vec<_>>(),
    })
}

pub fn curve_value(c: &TropicalCurve) -> Value {
    let vertices: Vec<Value> = c
        .vertices()
        .iter()
        .map(|v| json!({ "id": v.id, "coords": v.coords.iter().map(|x| x.to_string()).collect::<Vec<_>>() }))
        .collect();
    let edges: Vec<Value> = c
        .edges()
        .iter()
        .map(|e| {
            let mut m = Map::new();
            m.insert("id".into(), e.id.clone().into());
            m.insert("from".into(), e.from.clone().into());
            m.insert("to".into(), e.to.clone().into());
            m.insert("direction".into(), json!(e.direction));
            m.insert("weight".into(), e.weight.into());
            if let Some(l) = &e.length {
                m.insert("length".into(), r(l));
            }
            Value::Object(m)
        })
        .collect();
    json!({ "dim": c.dim(), "vertices": vertices, "edges": edges })
}

pub fn pillar_value(p: &PillarSet) -> Value {
    json!({ "edge": p.edge.0, "offsets": p.points.iter().map(|q| r(&q.offset)).collect::<Vec<_>>() })
}

pub fn report_value(rep: &PipelineReport) -> Value {
    let steps: Vec<Value> = rep
        .steps
        .iter()
        .map(|s| {
            json!({
                "construction": s.construction,
                "target": s.target,
                "coordinate": s.coordinate,
                "function": function_value(&s.function),
                "pillars": s.pillars.iter().map(pillar_value).collect::<Vec<_>>(),
                "status": s.status,
            })
        })
        .collect();
    json!({
        "pipeline": rep.pipeline,
        "core": rep.core.iter().map(|e| e.0.clone()).collect::<Vec<_>>(),
        "steps": steps,
        "singular_counts": rep.singular_counts,
        "certificate": rep.certificate,
    })
}

pub fn write_graph(g: &ExtendedGraph) -> String {
    render(&doc("graph", graph_value(g)))
}

pub fn write_divisor(d: &Divisor) -> String {
    render(&doc("divisor", json!({ "terms": divisor_value(d) })))
}

pub fn write_function(f: &PlFunction) -> String {
    render(&doc("function", function_value(f)))
}

pub fn write_embedding(emb: &Embedding) -> String {
    render(&doc("embedding", embedding_value(emb)))
}

pub fn write_curve(c: &TropicalCurve) -> String {
    render(&doc("curve", curve_value(c)))
}

pub fn write_core(edges: &BTreeSet<EdgeId>) -> String {
    render(&doc("core", json!({ "edges": edges.iter().map(|e| e.0.clone()).collect::<Vec<_>>() })))
}

pub fn write_report(rep: &PipelineReport) -> String {
    render(&doc("pipeline_report", report_value(rep)))
}

/// Any JSON body wrapped as a versioned document of the given kind.
pub fn write_document(kind: &str, body: Value) -> String {
    render(&doc(kind, body))
}

// ---------------------------------------------------------------- reading

#[derive(Debug, Clone)]
enum Seg {
    Key(String),
    Index(usize),
}

struct Fail {
    path: Vec<Seg>,
    message: String,
}

type Res<T> = std::result::Result<T, Fail>;

#[derive(Clone)]
struct Node<'v> {
    v: &'v Value,
    path: Vec<Seg>,
}

impl<'v> Node<'v> {
    fn fail<T>(&self, message: impl Into<String>) -> Res<T> {
        Err(Fail { path: self.path.clone(), message: message.into() })
    }

    fn child(&self, seg: Seg, v: &'v Value) -> Node<'v> {
        let mut path = self.path.clone();
        path.push(seg);
        Node { v, path }
    }

    fn opt(&self, k: &str) -> Res<Option<Node<'v>>> {
        match self.v {
            Value::Object(m) => Ok(m.get(k).map(|v| self.child(Seg::Key(k.into()), v))),
            _ => self.fail("expected an object"),
        }
    }

    fn field(&self, k: &str) -> Res<Node<'v>> {
        match self.opt(k)? {
            Some(n) => Ok(n),
            None => self.fail(format!("missing field {k:?}")),
        }
    }

    fn items(&self) -> Res<Vec<Node<'v>>> {
        match self.v {
            Value::Array(a) => Ok(a.iter().enumerate().map(|(i, v)| self.child(Seg::Index(i), v)).collect()),
            _ => self.fail("expected an array"),
        }
    }

    fn entries(&self) -> Res<Vec<(String, Node<'v>)>> {
        match self.v {
            Value::Object(m) => Ok(m.iter().map(|(k, v)| (k.clone(), self.child(Seg::Key(k.clone()), v))).collect()),
            _ => self.fail("expected an object"),
        }
    }

    fn str(&self) -> Res<&'v str> {
        match self.v {
            Value::String(s) => Ok(s),
            _ => self.fail("expected a string"),
        }
    }

    fn rational(&self) -> Res<Rational> {
        let s = self.str()?;
        parse_rational(s).or_else(|e| self.fail(strip(e)))
    }

    fn ext(&self) -> Res<ExtRational> {
        let s = self.str()?;
        ExtRational::parse(s).or_else(|e| self.fail(strip(e)))
    }

    fn int(&self) -> Res<i64> {
        match self.v.as_i64() {
            Some(x) => Ok(x),
            None => self.fail("expected an integer"),
        }
    }

    fn ints(&self) -> Res<Vec<i64>> {
        self.items()?.iter().map(Node::int).collect()
    }

    fn strings(&self) -> Res<Vec<String>> {
        self.items()?.iter().map(|n| n.str().map(str::to_owned)).collect()
    }

    /// Wraps a semantic error from a constructor at this node.
    fn lift<T>(&self, r: Result<T>) -> Res<T> {
        r.or_else(|e| self.fail(e.to_string()))
    }
}

fn strip(e: Error) -> String {
    match e {
        Error::Parse(m) => m,
        other => other.to_string(),
    }
}

fn read_point(n: &Node) -> Res<Point> {
    if let Some(v) = n.opt("vertex")? {
        return Ok(Point::Vertex(VertexId(v.str()?.into())));
    }
    if let Some(v) = n.opt("infinity")? {
        return Ok(Point::AtInfinity(VertexId(v.str()?.into())));
    }
    let e = n.field("edge")?.str()?;
    let t = n.field("offset")?.rational()?;
    Ok(Point::OnEdge(EdgeId(e.into()), t))
}

fn read_graph(n: &Node) -> Res<ExtendedGraph> {
    let vertices = n.field("vertices")?.strings()?.into_iter().map(VertexId).collect();
    let mut edges = Vec::new();
    for e in n.field("edges")?.items()? {
        edges.push(Edge {
            id: EdgeId(e.field("id")?.str()?.into()),
            from: VertexId(e.field("from")?.str()?.into()),
            to: VertexId(e.field("to")?.str()?.into()),
            length: e.field("length")?.rational()?,
        });
    }
    let finite = n.lift(MetricGraph::new(vertices, edges))?;
    let mut rays = Vec::new();
    let mut starts = BTreeMap::new();
    if let Some(list) = n.opt("infinite_edges")? {
        for ray in list.items()? {
            let id = EdgeId(ray.field("id")?.str()?.into());
            let at = ray.field("attach")?;
            let p = read_point(&at)?;
            let p = match p {
                Point::OnEdge(e, t) => at.lift(finite.canonical(&GraphPoint { edge: e, offset: t }))?,
                other => other,
            };
            let leaf = match ray.opt("leaf")? {
                Some(l) => VertexId(l.str()?.into()),
                None => VertexId(format!("{}:inf", id.0)),
            };
            if let Some(s) = ray.opt("start")? {
                starts.insert(id.clone(), s.rational()?);
            }
            rays.push((id, p, leaf));
        }
    }
    let g = n.lift(ExtendedGraph::new(finite, rays))?;
    n.lift(g.with_ray_starts(&starts))
}

fn read_divisor_terms(n: &Node) -> Res<Divisor> {
    let mut d = Divisor::new();
    for t in n.items()? {
        d.add_point(read_point(&t.field("point")?)?, t.field("coeff")?.int()?);
    }
    Ok(d)
}

fn read_function(n: &Node) -> Res<PlFunction> {
    let mut edges = BTreeMap::new();
    for (id, bps) in n.field("edges")?.entries()? {
        let mut out = Vec::new();
        for b in bps.items()? {
            let pair = b.items()?;
            if pair.len() != 2 {
                return b.fail("a breakpoint is a pair [offset, value]");
            }
            out.push(Breakpoint::new(pair[0].rational()?, pair[1].rational()?));
        }
        edges.insert(EdgeId(id), out);
    }
    let mut rays = BTreeMap::new();
    if let Some(list) = n.opt("infinite_edges")? {
        for (id, p) in list.entries()? {
            let anchor = p.field("anchor")?.rational()?;
            let slope = p.field("eventual_slope")?.int()?;
            rays.insert(EdgeId(id), RayPiece { anchor, slope });
        }
    }
    Ok(PlFunction::from_parts(edges, rays))
}

fn read_embedding(n: &Node) -> Res<Embedding> {
    let sk = read_graph(&n.field("skeleton")?)?;
    let coords_node = n.field("coords")?;
    let mut coords = Vec::new();
    for c in coords_node.items()? {
        let f = read_function(&c)?;
        c.lift(f.validate(&sk))?;
        coords.push(f);
    }
    let mut prov = Vec::new();
    if let Some(list) = n.opt("provenance")? {
        for p in list.items()? {
            let params = p.opt("params")?.map(|x| x.v.clone()).unwrap_or(Value::Null);
            prov.push(Provenance { step: p.field("step")?.str()?.into(), params });
        }
    }
    Ok(coords_node.lift(Embedding::new(sk, coords))?.with_provenance(prov))
}

fn read_curve(n: &Node) -> Res<TropicalCurve> {
    let mut vertices = Vec::new();
    for v in n.field("vertices")?.items()? {
        let coords = v.field("coords")?.items()?.iter().map(Node::ext).collect::<Res<Vec<_>>>()?;
        vertices.push(TropVertex { id: v.field("id")?.str()?.into(), coords });
    }
    let dim = match n.opt("dim")? {
        Some(d) => usize::try_from(d.int()?).or_else(|_| d.fail("negative dimension"))?,
        None => vertices.first().map(|v| v.coords.len()).unwrap_or(0),
    };
    let mut edges = Vec::new();
    for e in n.field("edges")?.items()? {
        let weight = e.opt("weight")?.map(|w| w.int()).transpose()?.unwrap_or(1);
        if weight < 1 {
            return e.fail("weights are positive");
        }
        edges.push(TropEdge {
            id: e.field("id")?.str()?.into(),
            from: e.field("from")?.str()?.into(),
            to: e.field("to")?.str()?.into(),
            direction: e.field("direction")?.ints()?,
            weight: weight as u64,
            length: e.opt("length")?.map(|l| l.rational()).transpose()?,
        });
    }
    n.lift(TropicalCurve::new(dim, vertices, edges))
}

fn read_core(n: &Node) -> Res<BTreeSet<EdgeId>> {
    Ok(n.field("edges")?.strings()?.into_iter().map(EdgeId).collect())
}

/// Kind named in the document, or guessed from its fields.
fn kind_of(n: &Node) -> Res<String> {
    if let Some(k) = n.opt("kind")? {
        return Ok(k.str()?.into());
    }
    let has = |k: &str| matches!(n.v, Value::Object(m) if m.contains_key(k));
    Ok(if has("skeleton") {
        "embedding"
    } else if has("terms") {
        "divisor"
    } else if has("dim") || has("vertices") && matches!(n.v.get("vertices"), Some(Value::Array(a)) if a.first().is_some_and(Value::is_object)) {
        "curve"
    } else if has("vertices") {
        "graph"
    } else if has("edges") {
        "function"
    } else {
        return n.fail("cannot tell what kind of document this is");
    }
    .into())
}

fn read_document(n: &Node) -> Res<Document> {
    match n.opt("schema")? {
        Some(s) if s.str()? == SCHEMA => {}
        Some(s) => return s.fail(format!("unsupported schema, expected {SCHEMA:?}")),
        None => return n.fail(format!("missing field \"schema\" (expected {SCHEMA:?})")),
    }
    let kind = kind_of(n)?;
    Ok(match kind.as_str() {
        "graph" => Document::Graph(read_graph(n)?),
        "divisor" => Document::Divisor(read_divisor_terms(&n.field("terms")?)?),
        "function" => Document::Function(read_function(n)?),
        "embedding" => Document::Embedding(read_embedding(n)?),
        "curve" => Document::Curve(read_curve(n)?),
        "core" => Document::Core(read_core(n)?),
        other => return n.field("kind")?.fail(format!("unknown kind {other:?}")),
    })
}

/// Byte offset of the value at `path`, found by walking the source text.
fn locate(src: &str, path: &[Seg]) -> usize {
    let b = src.as_bytes();
    let ws = |mut i: usize| {
        while i < b.len() && b[i].is_ascii_whitespace() {
            i += 1;
        }
        i
    };
    fn skip_string(b: &[u8], mut i: usize) -> usize {
        i += 1;
        while i < b.len() && b[i] != b'"' {
            i += if b[i] == b'\\' { 2 } else { 1 };
        }
        i + 1
    }
    fn skip_value(b: &[u8], mut i: usize) -> usize {
        match b.get(i) {
            Some(b'"') => skip_string(b, i),
            Some(b'{') | Some(b'[') => {
                let mut depth = 0;
                while i < b.len() {
                    match b[i] {
                        b'"' => {
                            i = skip_string(b, i);
                            continue;
                        }
                        b'{' | b'[' => depth += 1,
                        b'}' | b']' => {
                            depth -= 1;
                            if depth == 0 {
                                return i + 1;
                            }
                        }
                        _ => {}
                    }
                    i += 1;
                }
                i
            }
            _ => {
                while i < b.len() && !matches!(b[i], b',' | b'}' | b']') && !b[i].is_ascii_whitespace() {
                    i += 1;
                }
                i
            }
        }
    }
    let mut i = ws(0);
    for seg in path {
        match seg {
            Seg::Key(k) => {
                if b.get(i) != Some(&b'{') {
                    return i;
                }
                i = ws(i + 1);
                loop {
                    if b.get(i) != Some(&b'"') {
                        return i;
                    }
                    let end = skip_string(b, i);
                    let key: Option<String> = serde_json::from_str(&src[i..end.min(src.len())]).ok();
                    i = ws(end);
                    i = ws(i + 1); // colon
                    if key.as_deref() == Some(k.as_str()) {
                        break;
                    }
                    i = ws(skip_value(b, i));
                    if b.get(i) == Some(&b',') {
                        i = ws(i + 1);
                    }
                }
            }
            Seg::Index(n) => {
                if b.get(i) != Some(&b'[') {
                    return i;
                }
                i = ws(i + 1);
                for _ in 0..*n {
                    i = ws(skip_value(b, i));
                    if b.get(i) == Some(&b',') {
                        i = ws(i + 1);
                    }
                }
            }
        }
    }
    i
}

fn line_col(src: &str, at: usize) -> (usize, usize) {
    let before = &src[..at.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0) + 1;
    (line, column)
}

fn describe(path: &[Seg]) -> String {
    let mut s = String::new();
    for seg in path {
        match seg {
            Seg::Key(k) if s.is_empty() => s.push_str(k),
            Seg::Key(k) => {
                s.push('.');
                s.push_str(k);
            }
            Seg::Index(i) => s.push_str(&format!("[{i}]")),
        }
    }
    s
}

/// Parses a document of any kind.
pub fn parse_document(src: &str) -> Result<Document> {
    let v: Value = serde_json::from_str(src).map_err(|e| Error::ParseAt { line: e.line(), column: e.column(), message: e.to_string() })?;
    let root = Node { v: &v, path: Vec::new() };
    read_document(&root).map_err(|f| {
        let (line, column) = line_col(src, locate(src, &f.path));
        let at = describe(&f.path);
        let message = if at.is_empty() { f.message } else { format!("{at}: {}", f.message) };
        Error::ParseAt { line, column, message }
    })
}

fn wrong(expected: &str, got: &Document) -> Error {
    Error::ParseAt { line: 1, column: 1, message: format!("expected a {expected} document, found a {}", got.kind()) }
}

pub fn parse_graph(src: &str) -> Result<ExtendedGraph> {
    match parse_document(src)? {
        Document::Graph(g) => Ok(g),
        Document::Embedding(e) => Ok(e.skeleton().clone()),
        other => Err(wrong("graph", &other)),
    }
}

pub fn parse_divisor(src: &str) -> Result<Divisor> {
    match parse_document(src)? {
        Document::Divisor(d) => Ok(d),
        other => Err(wrong("divisor", &other)),
    }
}

pub fn parse_function(src: &str) -> Result<PlFunction> {
    match parse_document(src)? {
        Document::Function(f) => Ok(f),
        other => Err(wrong("function", &other)),
    }
}

pub fn parse_embedding(src: &str) -> Result<Embedding> {
    match parse_document(src)? {
        Document::Embedding(e) => Ok(e),
        other => Err(wrong("embedding", &other)),
    }
}

pub fn parse_curve(src: &str) -> Result<TropicalCurve> {
    match parse_document(src)? {
        Document::Curve(c) => Ok(c),
        other => Err(wrong("curve", &other)),
    }
}

pub fn parse_core(src: &str) -> Result<BTreeSet<EdgeId>> {
    match parse_document(src)? {
        Document::Core(c) => Ok(c),
        other => Err(wrong("core", &other)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::suite;
    use crate::synthesis::tate_demo;
    use crate::rational::int;

    #[test]
    fn embeddings_round_trip() {
        for (name, emb) in suite() {
            let s = write_embedding(&emb);
            let back = parse_embedding(&s).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(back.coords(), emb.coords(), "{name}");
            assert_eq!(write_embedding(&back), s, "{name}");
        }
    }

    #[test]
    fn curve_round_trip() {
        let t = tate_demo(&int(1)).unwrap();
        let s = write_curve(&t.tropicalization.curve);
        let back = parse_curve(&s).unwrap();
        assert_eq!(back, t.tropicalization.curve);
        assert_eq!(write_curve(&back), s);
    }

    #[test]
    fn loops_are_canonicalized_once() {
        let src = r#"{"schema": "tropicurve/1", "vertices": ["o"], "edges": [{"id": "c", "from": "o", "to": "o", "length": "3"}]}"#;
        let g = parse_graph(src).unwrap();
        assert_eq!(g.finite().edges().len(), 2);
        let once = write_graph(&g);
        assert_eq!(write_graph(&parse_graph(&once).unwrap()), once);
    }

    #[test]
    fn interior_attachment_subdivides() {
        let src = r#"{"schema": "tropicurve/1", "vertices": ["a", "b"],
            "edges": [{"id": "e", "from": "a", "to": "b", "length": "2"}],
            "infinite_edges": [{"id": "r", "attach": {"edge": "e", "offset": "1/2"}}]}"#;
        let g = parse_graph(src).unwrap();
        assert_eq!(g.finite().edges().len(), 2);
        assert_eq!(g.rays()[0].leaf, VertexId::new("r:inf"));
    }

    #[test]
    fn bad_rational_has_a_location() {
        let src = "{\"schema\": \"tropicurve/1\",\n \"vertices\": [\"a\", \"b\"],\n \"edges\": [{\"id\": \"e\", \"from\": \"a\", \"to\": \"b\", \"length\": \"1/0\"}]}";
        match parse_graph(src) {
            Err(Error::ParseAt { line, column, message }) => {
                assert_eq!(line, 3);
                assert_eq!(column, 58);
                assert!(message.contains("edges[0].length"), "{message}");
                assert!(message.contains("zero denominator"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_graph("{\"schema\": "), Err(Error::ParseAt { .. })));
        let decimal = src.replace("1/0", "0.5");
        assert!(matches!(parse_graph(&decimal), Err(Error::ParseAt { .. })));
    }

    #[test]
    fn schema_is_required() {
        let src = r#"{"vertices": ["a"], "edges": []}"#;
        assert!(matches!(parse_graph(src), Err(Error::ParseAt { .. })));
        let other = r#"{"schema": "tropicurve/2", "vertices": ["a"], "edges": []}"#;
        assert!(matches!(parse_graph(other), Err(Error::ParseAt { .. })));
    }

    #[test]
    fn divisor_round_trip() {
        let d = Divisor::from_terms([(Point::vertex("a"), 2), (Point::on_edge("e", int(1)), -1)]);
        let s = write_divisor(&d);
        assert_eq!(parse_divisor(&s).unwrap(), d);
    }
}
