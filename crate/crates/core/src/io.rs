//! JSON documents for graphs, functions, complexes, barcodes, certificates,
//! transport records and reports.
//!
//! Documents are exact: every scalar is a `Rational` written as `"p/q"` (or
//! `"p"`), and `+∞` as `"inf"`. Parsing also accepts JSON numbers and
//! decimal strings. Keys are emitted in sorted order, so equal values give
//! byte-identical documents.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde_json::{json, Map, Value};

use crate::barcode::{Bar, Barcode};
use crate::cone_calculus::{ConeTransportRecord, Lemma, StageTrace};
use crate::density::{DensityReport, DensityTrace, SoloReport, WGenerator};
use crate::gf2::BitMat;
use crate::graph::{Edge, GraphPoint, MetricGraph};
use crate::interleave::{Certificate, DistanceResult, Mode, StalkBound};
use crate::scalar::Ext;
use crate::tamefn::{EdgeFn, Seg, TameFunction};
use crate::twisted::{Generator, TwistedComplex};
use crate::Rational;

pub const SCHEMA_PREFIX: &str = "conedensity/";
pub const TOOL_NAME: &str = "conedensity";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Schema {
    Graph,
    TameFn,
    Complex,
    Barcode,
    Cert,
    Record,
    Report,
}

impl Schema {
    pub const ALL: [Schema; 7] = [Schema::Graph, Schema::TameFn, Schema::Complex, Schema::Barcode, Schema::Cert, Schema::Record, Schema::Report];

    pub fn tag(&self) -> &'static str {
        match self {
            Schema::Graph => "conedensity/graph@1",
            Schema::TameFn => "conedensity/tamefn@1",
            Schema::Complex => "conedensity/cx@1",
            Schema::Barcode => "conedensity/barcode@1",
            Schema::Cert => "conedensity/cert@1",
            Schema::Record => "conedensity/record@1",
            Schema::Report => "conedensity/report@1",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.tag() == tag)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IoErrorKind {
    Syntax(String),
    Schema { expected: String, found: String },
    Missing,
    Type(&'static str),
    Number(String),
    Dangling(String),
    Invalid(String),
}

/// A parse failure located by a JSON pointer into the document.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct IoError {
    pub path: String,
    pub kind: IoErrorKind,
}

impl fmt::Display for IoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = if self.path.is_empty() { "/" } else { &self.path };
        match &self.kind {
            IoErrorKind::Syntax(m) => write!(f, "malformed JSON: {m}"),
            IoErrorKind::Schema { expected, found } => write!(f, "at {at}: expected schema {expected}, found {found}"),
            IoErrorKind::Missing => write!(f, "at {at}: missing field"),
            IoErrorKind::Type(t) => write!(f, "at {at}: expected {t}"),
            IoErrorKind::Number(s) => write!(f, "at {at}: {s:?} is not a rational number"),
            IoErrorKind::Dangling(s) => write!(f, "at {at}: dangling reference to {s}"),
            IoErrorKind::Invalid(m) => write!(f, "at {at}: {m}"),
        }
    }
}

/// A position in a document being read.
#[derive(Clone, Copy)]
struct Node<'a> {
    value: &'a Value,
    path: &'a str,
}

struct Owned<'a> {
    value: &'a Value,
    path: String,
}

impl<'a> Owned<'a> {
    fn node(&self) -> Node<'_> {
        Node { value: self.value, path: &self.path }
    }
}

impl<'a> Node<'a> {
    fn err(&self, kind: IoErrorKind) -> IoError {
        IoError { path: self.path.to_string(), kind }
    }

    fn field(&self, name: &str) -> Result<Owned<'a>, IoError> {
        let path = format!("{}/{}", self.path, name);
        match self.value.as_object() {
            Some(m) => match m.get(name) {
                Some(v) => Ok(Owned { value: v, path }),
                None => Err(IoError { path, kind: IoErrorKind::Missing }),
            },
            None => Err(self.err(IoErrorKind::Type("object"))),
        }
    }

    fn opt_field(&self, name: &str) -> Option<Owned<'a>> {
        self.value.get(name).map(|v| Owned { value: v, path: format!("{}/{}", self.path, name) })
    }

    fn items(&self) -> Result<Vec<Owned<'a>>, IoError> {
        let arr = self.value.as_array().ok_or_else(|| self.err(IoErrorKind::Type("array")))?;
        Ok(arr.iter().enumerate().map(|(i, v)| Owned { value: v, path: format!("{}/{}", self.path, i) }).collect())
    }

    fn str(&self) -> Result<&'a str, IoError> {
        self.value.as_str().ok_or_else(|| self.err(IoErrorKind::Type("string")))
    }

    fn int(&self) -> Result<i64, IoError> {
        self.value.as_i64().ok_or_else(|| self.err(IoErrorKind::Type("integer")))
    }

    fn index(&self, len: usize, what: &str) -> Result<usize, IoError> {
        let i = self.value.as_u64().ok_or_else(|| self.err(IoErrorKind::Type("nonnegative integer")))?;
        if (i as usize) < len {
            Ok(i as usize)
        } else {
            Err(self.err(IoErrorKind::Dangling(format!("{what} {i}"))))
        }
    }

    fn ext(&self) -> Result<Ext<Rational>, IoError> {
        match self.value {
            Value::String(s) if s == "inf" || s == "+inf" => Ok(Ext::Inf),
            _ => Ok(Ext::Finite(self.rational()?)),
        }
    }

    fn rational(&self) -> Result<Rational, IoError> {
        let text = match self.value {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            _ => return Err(self.err(IoErrorKind::Type("rational"))),
        };
        parse_rational(&text).ok_or_else(|| self.err(IoErrorKind::Number(text)))
    }
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"-0.125"`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).ok()?;
        let q = BigInt::from_str(q.trim()).ok()?;
        return (!q.is_zero()).then(|| Rational::new(p, q));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all = format!("{int}{frac}");
    let num = BigInt::from_str(if all.is_empty() { "0" } else { &all }).ok()?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10u8);
    let mut r = Rational::from_integer(num);
    if scale >= 0 {
        r *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -r } else { r })
}

pub fn rational_text(r: &Rational) -> String {
    r.to_string()
}

fn rat(r: &Rational) -> Value {
    Value::String(rational_text(r))
}

fn ext(e: &Ext<Rational>) -> Value {
    match e {
        Ext::Finite(r) => rat(r),
        Ext::Inf => Value::String("inf".into()),
    }
}

pub fn parse_json(bytes: &[u8]) -> Result<Value, IoError> {
    let text = std::str::from_utf8(bytes).map_err(|e| IoError { path: String::new(), kind: IoErrorKind::Syntax(e.to_string()) })?;
    serde_json::from_str(text).map_err(|e| IoError { path: String::new(), kind: IoErrorKind::Syntax(e.to_string()) })
}

/// Canonical text: sorted keys, two-space indentation, trailing newline.
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn root(v: &Value) -> Node<'_> {
    Node { value: v, path: "" }
}

/// The schema tag of a document.
pub fn schema_of(v: &Value) -> Result<Schema, IoError> {
    let n = root(v);
    let tag = n.field("schema")?;
    let s = tag.node().str()?;
    Schema::from_tag(s).ok_or_else(|| tag.node().err(IoErrorKind::Schema { expected: "a conedensity schema".into(), found: s.into() }))
}

fn expect_schema(v: &Value, schema: Schema) -> Result<(), IoError> {
    let found = schema_of(v)?;
    if found == schema {
        Ok(())
    } else {
        Err(IoError { path: "/schema".into(), kind: IoErrorKind::Schema { expected: schema.tag().into(), found: found.tag().into() } })
    }
}

fn tagged(schema: Schema, mut body: Map<String, Value>) -> Value {
    body.insert("schema".into(), Value::String(schema.tag().into()));
    Value::Object(body)
}

fn object(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("payload builders return objects"),
    }
}

// Graphs.

pub fn graph_payload(g: &MetricGraph<Rational>) -> Value {
    let edges: Vec<Value> = g
        .edges()
        .iter()
        .map(|e| json!({"a": g.name(e.a), "b": g.name(e.b), "len": rat(&e.len)}))
        .collect();
    json!({"vertices": g.names(), "edges": edges})
}

fn read_graph(n: Node<'_>) -> Result<MetricGraph<Rational>, IoError> {
    let vs = n.field("vertices")?;
    let mut names = Vec::new();
    for item in vs.node().items()? {
        names.push(item.node().str()?.to_string());
    }
    if names.is_empty() {
        return Err(vs.node().err(IoErrorKind::Invalid("graph has no vertices".into())));
    }
    let es = n.field("edges")?;
    let mut edges = Vec::new();
    for item in es.node().items()? {
        let e = item.node();
        let mut ends = [0usize; 2];
        for (slot, key) in ends.iter_mut().zip(["a", "b"]) {
            let f = e.field(key)?;
            let name = f.node().str()?;
            *slot = names.iter().position(|x| x == name).ok_or_else(|| f.node().err(IoErrorKind::Dangling(format!("vertex {name:?}"))))?;
        }
        let lf = e.field("len")?;
        let len = lf.node().rational()?;
        if !len.is_positive() {
            return Err(lf.node().err(IoErrorKind::Invalid("edge length must be positive".into())));
        }
        if ends[0] == ends[1] {
            return Err(e.err(IoErrorKind::Invalid("self-loop".into())));
        }
        edges.push(Edge { a: ends[0], b: ends[1], len });
    }
    MetricGraph::from_parts(names, edges).map_err(|err| n.err(IoErrorKind::Invalid(err.to_string())))
}

pub fn emit_graph(g: &MetricGraph<Rational>) -> Value {
    tagged(Schema::Graph, object(graph_payload(g)))
}

pub fn parse_graph(v: &Value) -> Result<MetricGraph<Rational>, IoError> {
    expect_schema(v, Schema::Graph)?;
    read_graph(root(v))
}

// Points.

pub fn point_payload(g: &MetricGraph<Rational>, p: &GraphPoint<Rational>) -> Value {
    match p {
        GraphPoint::Vertex(v) => json!({"vertex": g.name(*v)}),
        GraphPoint::OnEdge { edge, offset } => json!({"edge": edge, "offset": rat(offset)}),
    }
}

fn read_point(n: Node<'_>, g: &MetricGraph<Rational>) -> Result<GraphPoint<Rational>, IoError> {
    if let Some(v) = n.opt_field("vertex") {
        let name = v.node().str()?;
        return g.vertex(name).map(GraphPoint::Vertex).ok_or_else(|| v.node().err(IoErrorKind::Dangling(format!("vertex {name:?}"))));
    }
    let e = n.field("edge")?;
    let edge = e.node().index(g.edge_count(), "edge")?;
    let o = n.field("offset")?;
    let offset = o.node().rational()?;
    g.point_on_edge(edge, offset).map_err(|err| o.node().err(IoErrorKind::Invalid(err.to_string())))
}

/// Parses a point given as a vertex name or `edge:offset`.
pub fn parse_point_spec(g: &MetricGraph<Rational>, spec: &str) -> Option<GraphPoint<Rational>> {
    if let Some(v) = g.vertex(spec) {
        return Some(GraphPoint::Vertex(v));
    }
    let (e, o) = spec.split_once(':')?;
    g.point_on_edge(e.parse().ok()?, parse_rational(o)?).ok()
}

// Functions.

fn edge_payload(ef: &EdgeFn<Rational>) -> Value {
    let knots: Vec<Value> = ef.knots.iter().map(|(t, v)| json!([rat(t), ext(v)])).collect();
    let segs: Vec<Value> = ef
        .segs
        .iter()
        .map(|s| match s {
            Seg::Inf => Value::String("inf".into()),
            Seg::Lin(l, r) => json!([rat(l), rat(r)]),
        })
        .collect();
    json!({"knots": knots, "segs": segs})
}

pub fn function_payload(f: &TameFunction<Rational>) -> Value {
    let vertex: Vec<Value> = f.vertex_values().iter().map(ext).collect();
    let edges: Vec<Value> = f.edge_fns().iter().map(edge_payload).collect();
    json!({"vertex": vertex, "edges": edges})
}

fn read_function(n: Node<'_>, g: &Arc<MetricGraph<Rational>>) -> Result<TameFunction<Rational>, IoError> {
    let vf = n.field("vertex")?;
    let items = vf.node().items()?;
    if items.len() != g.vertex_count() {
        return Err(vf.node().err(IoErrorKind::Invalid(format!("{} vertex values for {} vertices", items.len(), g.vertex_count()))));
    }
    let vertex = items.iter().map(|i| i.node().ext()).collect::<Result<Vec<_>, _>>()?;
    let ef = n.field("edges")?;
    let items = ef.node().items()?;
    if items.len() != g.edge_count() {
        return Err(ef.node().err(IoErrorKind::Invalid(format!("{} edge entries for {} edges", items.len(), g.edge_count()))));
    }
    let mut edges = Vec::new();
    let mut interior = Vec::new();
    let mut simple = true;
    for item in &items {
        let e = item.node();
        if e.value.is_array() {
            let mut pts = Vec::new();
            for p in e.items()? {
                let pair = p.node().items()?;
                if pair.len() != 2 {
                    return Err(p.node().err(IoErrorKind::Type("[offset, value] pair")));
                }
                pts.push((pair[0].node().rational()?, pair[1].node().ext()?));
            }
            interior.push(pts);
        } else {
            simple = false;
            let mut knots = Vec::new();
            for k in e.field("knots")?.node().items()? {
                let pair = k.node().items()?;
                if pair.len() != 2 {
                    return Err(k.node().err(IoErrorKind::Type("[offset, value] pair")));
                }
                knots.push((pair[0].node().rational()?, pair[1].node().ext()?));
            }
            let mut segs = Vec::new();
            for s in e.field("segs")?.node().items()? {
                let sn = s.node();
                if sn.value.as_str() == Some("inf") {
                    segs.push(Seg::Inf);
                } else {
                    let pair = sn.items()?;
                    if pair.len() != 2 {
                        return Err(sn.err(IoErrorKind::Type("\"inf\" or [left, right]")));
                    }
                    segs.push(Seg::Lin(pair[0].node().rational()?, pair[1].node().rational()?));
                }
            }
            edges.push(EdgeFn { knots, segs });
        }
    }
    let bad = |err: crate::tamefn::TameError| n.err(IoErrorKind::Invalid(err.to_string()));
    if simple {
        TameFunction::from_breakpoints(g.clone(), vertex, interior).map_err(bad)
    } else if interior.is_empty() {
        TameFunction::from_parts(g.clone(), vertex, edges).map_err(bad)
    } else {
        Err(ef.node().err(IoErrorKind::Invalid("mixed edge formats".into())))
    }
}

pub fn emit_function(f: &TameFunction<Rational>) -> Value {
    let mut body = object(function_payload(f));
    body.insert("graph".into(), graph_payload(f.graph()));
    tagged(Schema::TameFn, body)
}

pub fn parse_function(v: &Value) -> Result<TameFunction<Rational>, IoError> {
    expect_schema(v, Schema::TameFn)?;
    let n = root(v);
    let g = Arc::new(read_graph(n.field("graph")?.node())?);
    read_function(n, &g)
}

// Complexes.

pub fn complex_payload(c: &TwistedComplex<Rational>) -> Value {
    let gens: Vec<Value> = c.gens().iter().map(|g| json!({"fn": function_payload(&g.fun), "deg": g.deg})).collect();
    let diff: Vec<Value> = c.diff().entries().into_iter().map(|(i, j)| json!([i, j])).collect();
    json!({"graph": graph_payload(c.graph()), "generators": gens, "diff": diff})
}

fn read_complex_on(n: Node<'_>, g: &Arc<MetricGraph<Rational>>) -> Result<TwistedComplex<Rational>, IoError> {
    let shared = match n.opt_field("functions") {
        Some(fs) => fs.node().items()?.iter().map(|f| read_function(f.node(), g)).collect::<Result<Vec<_>, _>>()?,
        None => Vec::new(),
    };
    let mut gens = Vec::new();
    for item in n.field("generators")?.node().items()? {
        let gn = item.node();
        let fun = match gn.opt_field("ref") {
            Some(r) => shared[r.node().index(shared.len(), "function")?].clone(),
            None => read_function(gn.field("fn")?.node(), g)?,
        };
        let deg = gn.field("deg")?.node().int()?;
        gens.push(Generator::new(fun, deg));
    }
    let n_gens = gens.len();
    let mut diff = BitMat::zeros(n_gens, n_gens);
    for item in n.field("diff")?.node().items()? {
        let pair = item.node().items()?;
        if pair.len() != 2 {
            return Err(item.node().err(IoErrorKind::Type("[target, source] pair")));
        }
        let i = pair[0].node().index(n_gens, "generator")?;
        let j = pair[1].node().index(n_gens, "generator")?;
        diff.set(i, j, true);
    }
    TwistedComplex::new(g.clone(), gens, diff).map_err(|err| n.err(IoErrorKind::Invalid(err.to_string())))
}

fn read_complex(n: Node<'_>) -> Result<TwistedComplex<Rational>, IoError> {
    let g = Arc::new(read_graph(n.field("graph")?.node())?);
    read_complex_on(n, &g)
}

pub fn emit_complex(c: &TwistedComplex<Rational>) -> Value {
    tagged(Schema::Complex, object(complex_payload(c)))
}

pub fn parse_complex(v: &Value) -> Result<TwistedComplex<Rational>, IoError> {
    expect_schema(v, Schema::Complex)?;
    read_complex(root(v))
}

/// Reads a complex, or a single-generator complex from a function document.
pub fn parse_sheaf(v: &Value) -> Result<TwistedComplex<Rational>, IoError> {
    match schema_of(v)? {
        Schema::TameFn => {
            let f = parse_function(v)?;
            TwistedComplex::single(f, 0).map_err(|err| IoError { path: String::new(), kind: IoErrorKind::Invalid(err.to_string()) })
        }
        _ => parse_complex(v),
    }
}

// Barcodes.

pub fn barcode_payload(b: &Barcode<Rational>) -> Value {
    let bars: Vec<Value> = b.bars().iter().map(|x| json!({"birth": rat(&x.birth), "death": ext(&x.death), "deg": x.deg})).collect();
    json!({"bars": bars})
}

fn read_barcode(n: Node<'_>) -> Result<Barcode<Rational>, IoError> {
    let mut bars = Vec::new();
    let bf = n.field("bars")?;
    for item in bf.node().items()? {
        let b = item.node();
        bars.push(Bar::new(b.field("birth")?.node().rational()?, b.field("death")?.node().ext()?, b.field("deg")?.node().int()?));
    }
    Barcode::new(bars).map_err(|err| bf.node().err(IoErrorKind::Invalid(err.to_string())))
}

pub fn emit_barcode(b: &Barcode<Rational>) -> Value {
    tagged(Schema::Barcode, object(barcode_payload(b)))
}

pub fn parse_barcode(v: &Value) -> Result<Barcode<Rational>, IoError> {
    expect_schema(v, Schema::Barcode)?;
    read_barcode(root(v))
}

// Certificates.

fn matrix_payload(m: &BitMat) -> Value {
    let entries: Vec<Value> = m.entries().into_iter().map(|(i, j)| json!([i, j])).collect();
    json!({"rows": m.rows(), "cols": m.cols(), "entries": entries})
}

fn read_matrix(n: Node<'_>) -> Result<BitMat, IoError> {
    let rows = n.field("rows")?.node().int()?.max(0) as usize;
    let cols = n.field("cols")?.node().int()?.max(0) as usize;
    let mut m = BitMat::zeros(rows, cols);
    for item in n.field("entries")?.node().items()? {
        let pair = item.node().items()?;
        if pair.len() != 2 {
            return Err(item.node().err(IoErrorKind::Type("[row, col] pair")));
        }
        m.set(pair[0].node().index(rows, "row")?, pair[1].node().index(cols, "column")?, true);
    }
    Ok(m)
}

pub fn certificate_payload(c: &Certificate<Rational>) -> Value {
    json!({
        "a": rat(&c.a),
        "b": rat(&c.b),
        "u": matrix_payload(&c.u),
        "v": matrix_payload(&c.v),
        "h_f": matrix_payload(&c.h_f),
        "h_g": matrix_payload(&c.h_g),
    })
}

fn read_certificate(n: Node<'_>) -> Result<Certificate<Rational>, IoError> {
    Ok(Certificate {
        a: n.field("a")?.node().rational()?,
        b: n.field("b")?.node().rational()?,
        u: read_matrix(n.field("u")?.node())?,
        v: read_matrix(n.field("v")?.node())?,
        h_f: read_matrix(n.field("h_f")?.node())?,
        h_g: read_matrix(n.field("h_g")?.node())?,
    })
}

/// A certificate document carries the two complexes it relates.
pub fn emit_certificate(f: &TwistedComplex<Rational>, g: &TwistedComplex<Rational>, c: &Certificate<Rational>) -> Value {
    let mut body = object(certificate_payload(c));
    body.insert("f".into(), complex_payload(f));
    body.insert("g".into(), complex_payload(g));
    tagged(Schema::Cert, body)
}

pub struct CertDoc {
    pub f: TwistedComplex<Rational>,
    pub g: TwistedComplex<Rational>,
    pub certificate: Certificate<Rational>,
}

pub fn parse_certificate(v: &Value) -> Result<CertDoc, IoError> {
    expect_schema(v, Schema::Cert)?;
    let n = root(v);
    Ok(CertDoc { f: read_complex(n.field("f")?.node())?, g: read_complex(n.field("g")?.node())?, certificate: read_certificate(n)? })
}

// Transport records.

fn lemma_from(name: &str) -> Option<Lemma> {
    [Lemma::ReplaceSource, Lemma::TransportCone, Lemma::TransportTower, Lemma::SumCertificates].into_iter().find(|l| l.name() == name)
}

fn trace_payload(t: &[StageTrace<Rational>]) -> Value {
    Value::Array(t.iter().map(|s| json!({"a": rat(&s.replacement.0), "b": rat(&s.replacement.1), "total": rat(&s.total)})).collect())
}

/// Refuses records whose certificate does not replay.
pub fn emit_record(r: &ConeTransportRecord<Rational>) -> Result<Value, EmitError> {
    r.verify().map_err(|e| EmitError::Certificate(e.to_string()))?;
    Ok(tagged(
        Schema::Record,
        object(json!({
            "lemma": r.lemma.name(),
            "epsilon": rat(&r.epsilon),
            "bound": rat(&r.bound),
            "input": complex_payload(&r.input),
            "output": complex_payload(&r.output),
            "certificate": certificate_payload(&r.certificate),
            "trace": trace_payload(&r.trace),
        })),
    ))
}

pub fn parse_record(v: &Value) -> Result<ConeTransportRecord<Rational>, IoError> {
    expect_schema(v, Schema::Record)?;
    let n = root(v);
    let lf = n.field("lemma")?;
    let name = lf.node().str()?;
    let lemma = lemma_from(name).ok_or_else(|| lf.node().err(IoErrorKind::Invalid(format!("unknown lemma {name:?}"))))?;
    let mut trace = Vec::new();
    for item in n.field("trace")?.node().items()? {
        let t = item.node();
        trace.push(StageTrace {
            replacement: (t.field("a")?.node().rational()?, t.field("b")?.node().rational()?),
            total: t.field("total")?.node().rational()?,
        });
    }
    Ok(ConeTransportRecord {
        lemma,
        epsilon: n.field("epsilon")?.node().rational()?,
        bound: n.field("bound")?.node().rational()?,
        input: read_complex(n.field("input")?.node())?,
        output: read_complex(n.field("output")?.node())?,
        certificate: read_certificate(n.field("certificate")?.node())?,
        trace,
    })
}

// Reports.

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EmitError {
    #[error("refusing to emit a failing certificate: {0}")]
    Certificate(String),
}

fn tool(replay: &str) -> Value {
    json!({"name": TOOL_NAME, "version": TOOL_VERSION, "replay": replay})
}

fn stalk_payload(g: &MetricGraph<Rational>, s: &StalkBound<Rational>) -> Value {
    json!({
        "point": point_payload(g, &s.point),
        "f_bars": barcode_payload(&s.f_bars),
        "g_bars": barcode_payload(&s.g_bars),
        "value": ext(&s.value),
    })
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Exact => "exact",
        Mode::Bounds => "bounds",
    }
}

fn measured_payload(g: &MetricGraph<Rational>, d: &DistanceResult<Rational>) -> Map<String, Value> {
    let mut m = object(json!({
        "mode": mode_name(d.mode),
        "lower": ext(&d.lower),
        "upper": ext(&d.upper),
        "undecided": d.undecided,
        "stalks": d.stalks.iter().map(|s| stalk_payload(g, s)).collect::<Vec<_>>(),
    }));
    if let Some(s) = &d.infeasible_below {
        m.insert("infeasible_below".into(), rat(s));
    }
    if let Some(v) = d.value() {
        m.insert("value".into(), ext(v));
    }
    m
}

/// Distance report between two complexes; embeds the certificate attaining
/// the upper bound, which must replay.
pub fn emit_distance_report(
    f: &TwistedComplex<Rational>,
    g: &TwistedComplex<Rational>,
    d: &DistanceResult<Rational>,
    replay: &str,
) -> Result<Value, EmitError> {
    let mut body = measured_payload(f.graph(), d);
    if let Some(c) = &d.certificate {
        c.verify(f, g).map_err(|e| EmitError::Certificate(e.to_string()))?;
        body.insert("certificate".into(), certificate_payload(c));
    }
    body.insert("kind".into(), Value::String("distance".into()));
    body.insert("f".into(), complex_payload(f));
    body.insert("g".into(), complex_payload(g));
    body.insert("tool".into(), tool(replay));
    Ok(tagged(Schema::Report, body))
}

fn wgen_payload(g: &MetricGraph<Rational>, w: &WGenerator<Rational>) -> Value {
    json!({"x": point_payload(g, &w.x), "a": rat(&w.a), "deg": w.deg})
}

fn density_trace_payload(g: &MetricGraph<Rational>, t: &DensityTrace<Rational>) -> Value {
    json!({
        "fixed_point": t.fixed_point,
        "mesh": rat(&t.mesh),
        "cech": {
            "pieces": t.pieces,
            "nerve_cells": t.nerve_cells,
            "c0": t.c0_len,
            "c1": t.c1_len,
            "exactness_points": t.exactness_points,
        },
        "tree": {
            "root": if t.fixed_point { Value::Null } else { Value::String(g.name(t.root).to_string()) },
            "cells": t.tree_cells,
            "shift": rat(&t.tree_shift),
        },
        "stalks": t.centers.iter().zip(&t.spreads).zip(&t.barcodes).map(|((c, s), b)| json!({
            "center": point_payload(g, c),
            "spread": rat(s),
            "barcode": barcode_payload(b),
        })).collect::<Vec<_>>(),
        "transport": trace_payload(&t.transport),
    })
}

pub fn emit_density_report(r: &DensityReport<Rational>, replay: &str) -> Result<Value, EmitError> {
    r.verify().map_err(|e| EmitError::Certificate(e.to_string()))?;
    let g = r.fine_input.graph();
    let layers: Vec<Value> = r.layers.iter().map(|l| Value::Array(l.iter().map(|w| wgen_payload(g, w)).collect())).collect();
    Ok(tagged(
        Schema::Report,
        object(json!({
            "kind": "densify",
            "tool": tool(replay),
            "epsilon": rat(&r.epsilon),
            "input": complex_payload(&r.input),
            "fine_input": complex_payload(&r.fine_input),
            "output": complex_payload(&r.output),
            "layers": layers,
            "layer_count": r.layer_count(),
            "certificate": certificate_payload(&r.certificate),
            "certified": rat(&r.certificate.total()),
            "bound": rat(&r.bound),
            "measured": Value::Object(measured_payload(g, &r.measured)),
            "trace": density_trace_payload(g, &r.trace),
        })),
    ))
}

/// One corpus item checked against the wrapped generators of its graph.
pub struct IrdimItem<'a> {
    pub name: String,
    pub graph: &'a MetricGraph<Rational>,
    pub family: &'a [WGenerator<Rational>],
    pub report: &'a SoloReport<Rational>,
}

pub fn emit_irdim_report(epsilon: &Rational, items: &[IrdimItem<'_>], replay: &str) -> Value {
    let entries: Vec<Value> = items
        .iter()
        .map(|it| {
            let chains: Vec<Value> = it
                .report
                .chains
                .iter()
                .map(|c| json!({"from": c.from, "to": c.to, "length": rat(&c.length), "steps": c.steps.len() - 1, "max_step": rat(&c.max_step), "ok": c.ok}))
                .collect();
            let corpus: Vec<Value> = it
                .report
                .corpus
                .iter()
                .map(|e| json!({"layers": e.layers, "certified": e.certified.as_ref().map_or(Value::Null, rat), "ok": e.ok}))
                .collect();
            json!({
                "name": it.name,
                "graph": graph_payload(it.graph),
                "family": it.family.iter().map(|w| wgen_payload(it.graph, w)).collect::<Vec<_>>(),
                "chains": chains,
                "approximations": corpus,
                "failures": it.report.failures,
                "two_layers_suffice": it.report.two_layers_suffice,
            })
        })
        .collect();
    let all = items.iter().all(|it| it.report.two_layers_suffice && it.report.failures.is_empty());
    tagged(
        Schema::Report,
        object(json!({
            "kind": "irdim",
            "tool": tool(replay),
            "epsilon": rat(epsilon),
            "items": entries,
            "dimension_bound_holds": all,
        })),
    )
}

// Replay.

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Parse(#[from] IoError),
    #[error("certificate does not replay: {0}")]
    Certificate(String),
}

/// What a successful replay established.
#[derive(Clone, Debug, PartialEq)]
pub struct Verified {
    pub schema: Schema,
    pub kind: String,
    /// Certified total, when the document carries a certificate.
    pub total: Option<Rational>,
    pub bound: Option<Rational>,
}

fn failed(e: impl fmt::Display) -> VerifyError {
    VerifyError::Certificate(e.to_string())
}

/// Replays every certificate in a document from its serialized data alone.
pub fn verify_document(v: &Value) -> Result<Verified, VerifyError> {
    let schema = schema_of(v)?;
    let n = root(v);
    match schema {
        Schema::Cert => {
            let doc = parse_certificate(v)?;
            doc.certificate.verify(&doc.f, &doc.g).map_err(failed)?;
            Ok(Verified { schema, kind: "certificate".into(), total: Some(doc.certificate.total()), bound: None })
        }
        Schema::Record => {
            let r = parse_record(v)?;
            r.verify().map_err(failed)?;
            Ok(Verified { schema, kind: r.lemma.name().into(), total: Some(r.certificate.total()), bound: Some(r.bound) })
        }
        Schema::Report => {
            let kf = n.field("kind")?;
            match kf.node().str()? {
                "densify" => verify_density(n),
                "distance" => verify_distance(n),
                "irdim" => {
                    let holds = n.field("dimension_bound_holds")?;
                    match holds.node().value.as_bool() {
                        Some(true) => Ok(Verified { schema, kind: "irdim".into(), total: None, bound: None }),
                        Some(false) => Err(VerifyError::Certificate("some corpus item needs more than two layers".into())),
                        None => Err(holds.node().err(IoErrorKind::Type("boolean")).into()),
                    }
                }
                other => Err(kf.node().err(IoErrorKind::Invalid(format!("unknown report kind {other:?}"))).into()),
            }
        }
        _ => {
            match schema {
                Schema::Graph => parse_graph(v).map(|_| ())?,
                Schema::TameFn => parse_function(v).map(|_| ())?,
                Schema::Complex => parse_complex(v).map(|_| ())?,
                _ => parse_barcode(v).map(|_| ())?,
            }
            Ok(Verified { schema, kind: "document".into(), total: None, bound: None })
        }
    }
}

fn verify_density(n: Node<'_>) -> Result<Verified, VerifyError> {
    let fine = read_complex(n.field("fine_input")?.node())?;
    let out_f = n.field("output")?;
    let output = read_complex_on(out_f.node(), fine.graph())?;
    let cert = read_certificate(n.field("certificate")?.node())?;
    let bound = n.field("bound")?.node().rational()?;
    cert.verify(&fine, &output).map_err(failed)?;
    if cert.total() > bound {
        return Err(VerifyError::Certificate(format!("total {} exceeds bound {}", cert.total(), bound)));
    }
    let lf = n.field("layers")?;
    let mut k = 0;
    let layers = lf.node().items()?;
    for layer in &layers {
        for item in layer.node().items()? {
            let w = item.node();
            let x = read_point(w.field("x")?.node(), fine.graph())?;
            let wg = WGenerator::new(x, w.field("a")?.node().rational()?, w.field("deg")?.node().int()?);
            if output.gens().get(k) != Some(&wg.generator(fine.graph())) {
                return Err(VerifyError::Certificate(format!("layer generator {k} does not match the output")));
            }
            k += 1;
        }
    }
    if k != output.len() {
        return Err(VerifyError::Certificate("layers do not cover the output".into()));
    }
    Ok(Verified { schema: Schema::Report, kind: format!("densify ({} layers)", layers.len()), total: Some(cert.total()), bound: Some(bound) })
}

fn verify_distance(n: Node<'_>) -> Result<Verified, VerifyError> {
    let f = read_complex(n.field("f")?.node())?;
    let g = read_complex_on(n.field("g")?.node(), f.graph())?;
    let upper = n.field("upper")?.node().ext()?;
    let lower = n.field("lower")?.node().ext()?;
    if lower > upper {
        return Err(VerifyError::Certificate("lower bound exceeds upper bound".into()));
    }
    let total = match n.opt_field("certificate") {
        Some(c) => {
            let cert = read_certificate(c.node())?;
            cert.verify(&f, &g).map_err(failed)?;
            if Ext::Finite(cert.total()) != upper {
                return Err(VerifyError::Certificate("certificate total differs from the upper bound".into()));
            }
            Some(cert.total())
        }
        None if upper.is_finite() => return Err(VerifyError::Certificate("finite upper bound without a certificate".into())),
        None => None,
    };
    Ok(Verified { schema: Schema::Report, kind: "distance".into(), total, bound: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interleave::{distance_exact, DEFAULT_CAP};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn p2() -> Arc<MetricGraph<Rational>> {
        Arc::new(MetricGraph::path(&[q(1, 1)]))
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("3/4"), Some(q(3, 4)));
        assert_eq!(parse_rational("-0.125"), Some(q(-1, 8)));
        assert_eq!(parse_rational("2"), Some(q(2, 1)));
        assert_eq!(parse_rational("1e-2"), Some(q(1, 100)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(rational_text(&q(6, 8)), "3/4");
    }

    #[test]
    fn graph_documents() {
        let doc = json!({"schema": "conedensity/graph@1", "vertices": ["v0", "v1"], "edges": [{"a": "v0", "b": "v1", "len": "0.5"}]});
        let g = parse_graph(&doc).unwrap();
        assert_eq!(g.edge(0).len, q(1, 2));
        assert_eq!(parse_graph(&emit_graph(&g)).unwrap(), g);
        let bad = json!({"schema": "conedensity/graph@1", "vertices": ["v0", "v1"], "edges": [{"a": "v0", "b": "v1", "len": "0"}]});
        assert_eq!(parse_graph(&bad).unwrap_err().path, "/edges/0/len");
        let dangling = json!({"schema": "conedensity/graph@1", "vertices": ["v0"], "edges": [{"a": "v0", "b": "v9", "len": 1}]});
        assert!(matches!(parse_graph(&dangling).unwrap_err().kind, IoErrorKind::Dangling(_)));
        let wrong = json!({"schema": "conedensity/cx@1"});
        assert_eq!(parse_graph(&wrong).unwrap_err().path, "/schema");
    }

    #[test]
    fn complex_round_trip() {
        let g = p2();
        let f0 = TameFunction::constant(g.clone(), q(0, 1));
        let f1 = TameFunction::distance_cone(g.clone(), &GraphPoint::Vertex(1), q(1, 2), q(1, 1));
        let c = TwistedComplex::new(g, vec![Generator::new(f0, 0), Generator::new(f1, 1)], BitMat::from_entries(2, 2, [(1, 0)])).unwrap();
        let doc = emit_complex(&c);
        let back = parse_complex(&doc).unwrap();
        assert_eq!(back, c);
        assert_eq!(to_canonical_string(&emit_complex(&back)), to_canonical_string(&doc));
        let mut dangling = doc.clone();
        dangling["diff"] = json!([[5, 0]]);
        let err = parse_complex(&dangling).unwrap_err();
        assert_eq!(err.path, "/diff/0/0");
        assert!(matches!(err.kind, IoErrorKind::Dangling(_)));
        let mut by_ref = doc.clone();
        by_ref["functions"] = json!([function_payload(&c.gens()[0].fun)]);
        by_ref["generators"][0] = json!({"ref": 0, "deg": 0});
        assert_eq!(parse_complex(&by_ref).unwrap(), c);
        by_ref["generators"][0] = json!({"ref": 3, "deg": 0});
        assert!(matches!(parse_complex(&by_ref).unwrap_err().kind, IoErrorKind::Dangling(_)));
    }

    #[test]
    fn breakpoint_functions() {
        let doc = json!({
            "schema": "conedensity/tamefn@1",
            "graph": {"vertices": ["v0", "v1"], "edges": [{"a": "v0", "b": "v1", "len": "1"}]},
            "vertex": ["0", "inf"],
            "edges": [[["1/2", "1/2"]]],
        });
        let f = parse_function(&doc).unwrap();
        assert_eq!(f.value_at(&GraphPoint::Vertex(1)), Ext::Inf);
        assert_eq!(parse_function(&emit_function(&f)).unwrap(), f);
    }

    #[test]
    fn distance_report_replays() {
        let g = p2();
        let c = TwistedComplex::single(TameFunction::constant(g, q(0, 1)), 0).unwrap();
        let d = distance_exact(&c, &c, DEFAULT_CAP).unwrap();
        let doc = emit_distance_report(&c, &c, &d, "conedensity distance a.json a.json --exact").unwrap();
        assert_eq!(doc["value"], json!("0"));
        assert_eq!(doc["certificate"]["a"], json!("0"));
        let v = verify_document(&doc).unwrap();
        assert_eq!(v.total, Some(q(0, 1)));
        let mut broken = doc.clone();
        broken["certificate"]["u"]["entries"] = json!([]);
        assert!(matches!(verify_document(&broken), Err(VerifyError::Certificate(_))));
    }
}
