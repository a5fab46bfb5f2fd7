//! Lower semicontinuous piecewise-linear functions on metric graphs.
//!
//! A function is stored per edge as a sorted list of knots `(offset, value)`
//! together with one segment per gap between consecutive knots. A segment is
//! either `+∞` on its open interior or linear with given one-sided limits, so
//! jumps are allowed. Lower semicontinuity means every knot value is at most
//! the limits of the adjacent segments. The canonical form merges collinear
//! continuous segments and runs of `+∞`; two functions are equal iff their
//! canonical forms are.
//!
//! The epigraph calculus lives here too: pointwise order, restriction to a
//! closed region, the slope-`r` inf-convolution over a radius-`s` ball and
//! the Lipschitz envelope.

use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{GraphPoint, MetricGraph, Region, Subdivision};
use crate::scalar::{cmp, half, Ext, Scalar, Threshold};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TameError {
    #[error("functions live on different graphs")]
    GraphMismatch,
    #[error("function is identically +inf")]
    EmptySheaf,
    #[error("function is not {0}-Lipschitz")]
    NonLipschitz(String),
    #[error("malformed function data on {location}: {reason}")]
    Malformed { location: String, reason: String },
}

/// Open segment between two knots.
#[derive(Clone, Debug, PartialEq)]
pub enum Seg<S> {
    Inf,
    /// Linear with the given left and right limits.
    Lin(S, S),
}

impl<S: Scalar> Seg<S> {
    fn left(&self) -> Ext<S> {
        match self {
            Seg::Inf => Ext::Inf,
            Seg::Lin(l, _) => Ext::Finite(l.clone()),
        }
    }

    fn right(&self) -> Ext<S> {
        match self {
            Seg::Inf => Ext::Inf,
            Seg::Lin(_, r) => Ext::Finite(r.clone()),
        }
    }
}

/// Restriction of a function to one edge, parametrized by offset from `a`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeFn<S> {
    pub knots: Vec<(S, Ext<S>)>,
    pub segs: Vec<Seg<S>>,
}

fn lerp<S: Scalar>(x0: &S, v0: &S, x1: &S, v1: &S, t: &S) -> S {
    v0.clone() + (v1.clone() - v0.clone()) * (t.clone() - x0.clone()) / (x1.clone() - x0.clone())
}

impl<S: Scalar> EdgeFn<S> {
    pub fn infinite(len: S) -> Self {
        EdgeFn { knots: vec![(S::zero(), Ext::Inf), (len, Ext::Inf)], segs: vec![Seg::Inf] }
    }

    pub fn line(len: S, v0: S, v1: S) -> Self {
        EdgeFn {
            knots: vec![(S::zero(), Ext::Finite(v0.clone())), (len, Ext::Finite(v1.clone()))],
            segs: vec![Seg::Lin(v0, v1)],
        }
    }

    pub fn len(&self) -> &S {
        &self.knots.last().unwrap().0
    }

    fn locate(&self, t: &S) -> Result<usize, usize> {
        self.knots.binary_search_by(|(o, _)| cmp(o, t))
    }

    pub fn value_at(&self, t: &S) -> Ext<S> {
        match self.locate(t) {
            Ok(i) => self.knots[i].1.clone(),
            Err(i) => {
                let (o0, o1) = (&self.knots[i - 1].0, &self.knots[i].0);
                match &self.segs[i - 1] {
                    Seg::Inf => Ext::Inf,
                    Seg::Lin(l, r) => Ext::Finite(lerp(o0, l, o1, r, t)),
                }
            }
        }
    }

    /// Inserts knots at the given offsets (within `[0, len]`).
    pub fn refine(&self, offsets: &[S]) -> EdgeFn<S> {
        let mut ts: Vec<S> = offsets.to_vec();
        ts.sort_by(cmp);
        ts.dedup();
        let mut knots = Vec::with_capacity(self.knots.len() + ts.len());
        let mut segs = Vec::with_capacity(self.segs.len() + ts.len());
        let mut it = ts.into_iter().peekable();
        for i in 0..self.knots.len() {
            knots.push(self.knots[i].clone());
            if i + 1 == self.knots.len() {
                break;
            }
            let (o0, o1) = (&self.knots[i].0, &self.knots[i + 1].0);
            while it.peek().is_some_and(|t| t <= o0) {
                it.next();
            }
            let mut cur = self.segs[i].clone();
            while let Some(t) = it.peek().filter(|t| *t < o1).cloned() {
                it.next();
                match &cur {
                    Seg::Inf => {
                        knots.push((t, Ext::Inf));
                        segs.push(Seg::Inf);
                    }
                    Seg::Lin(l, r) => {
                        let v = lerp(o0, &self.segs_left_value(i), o1, &self.segs_right_value(i), &t);
                        knots.push((t, Ext::Finite(v.clone())));
                        segs.push(Seg::Lin(l.clone(), v.clone()));
                        cur = Seg::Lin(v, r.clone());
                    }
                }
            }
            segs.push(cur);
        }
        EdgeFn { knots, segs }
    }

    fn segs_left_value(&self, i: usize) -> S {
        match &self.segs[i] {
            Seg::Lin(l, _) => l.clone(),
            Seg::Inf => unreachable!(),
        }
    }

    fn segs_right_value(&self, i: usize) -> S {
        match &self.segs[i] {
            Seg::Lin(_, r) => r.clone(),
            Seg::Inf => unreachable!(),
        }
    }

    fn offsets(&self) -> Vec<S> {
        self.knots.iter().map(|k| k.0.clone()).collect()
    }

    fn common(&self, other: &EdgeFn<S>) -> (EdgeFn<S>, EdgeFn<S>) {
        (self.refine(&other.offsets()), other.refine(&self.offsets()))
    }

    /// Merges redundant knots.
    pub fn canonical(self) -> EdgeFn<S> {
        let n = self.knots.len();
        let mut knots: Vec<(S, Ext<S>)> = Vec::with_capacity(n);
        let mut segs: Vec<Seg<S>> = Vec::with_capacity(n);
        knots.push(self.knots[0].clone());
        for i in 0..self.segs.len() {
            let seg = self.segs[i].clone();
            let next = self.knots[i + 1].clone();
            if let Some(prev) = segs.last() {
                let (ko, kv) = knots.last().unwrap().clone();
                let removable = match (prev, &seg, &kv) {
                    (Seg::Inf, Seg::Inf, Ext::Inf) => true,
                    (Seg::Lin(pl, pr), Seg::Lin(nl, nr), Ext::Finite(v))
                        if pr == v && nl == v && knots.len() >= 2 => {
                            let o0 = &knots[knots.len() - 2].0;
                            let o2 = &next.0;
                            let s1 = (pr.clone() - pl.clone()) / (ko.clone() - o0.clone());
                            let s2 = (nr.clone() - nl.clone()) / (o2.clone() - ko.clone());
                            s1 == s2
                        }
                    _ => false,
                };
                if removable {
                    knots.pop();
                    let merged = match (segs.pop().unwrap(), seg) {
                        (Seg::Lin(l, _), Seg::Lin(_, r)) => Seg::Lin(l, r),
                        _ => Seg::Inf,
                    };
                    segs.push(merged);
                    knots.push(next);
                    continue;
                }
            }
            segs.push(seg);
            knots.push(next);
        }
        EdgeFn { knots, segs }
    }

    pub fn min_with(&self, other: &EdgeFn<S>) -> EdgeFn<S> {
        let (a, b) = self.common(other);
        let mut knots = Vec::with_capacity(a.knots.len() * 2);
        let mut segs = Vec::with_capacity(a.segs.len() * 2);
        for i in 0..a.knots.len() {
            knots.push((a.knots[i].0.clone(), a.knots[i].1.clone().min(b.knots[i].1.clone())));
            if i + 1 == a.knots.len() {
                break;
            }
            match (&a.segs[i], &b.segs[i]) {
                (Seg::Inf, s) | (s, Seg::Inf) => segs.push(s.clone()),
                (Seg::Lin(la, ra), Seg::Lin(lb, rb)) => {
                    let dl = la.clone() - lb.clone();
                    let dr = ra.clone() - rb.clone();
                    if !dl.is_positive() && !dr.is_positive() {
                        segs.push(a.segs[i].clone());
                    } else if !dl.is_negative() && !dr.is_negative() {
                        segs.push(b.segs[i].clone());
                    } else {
                        let (o0, o1) = (&a.knots[i].0, &a.knots[i + 1].0);
                        let frac = dl.clone() / (dl.clone() - dr);
                        let t = o0.clone() + (o1.clone() - o0.clone()) * frac.clone();
                        let v = la.clone() + (ra.clone() - la.clone()) * frac;
                        let (first, second) = if dl.is_negative() { (la, rb) } else { (lb, ra) };
                        segs.push(Seg::Lin(first.clone(), v.clone()));
                        knots.push((t, Ext::Finite(v.clone())));
                        segs.push(Seg::Lin(v, second.clone()));
                    }
                }
            }
        }
        EdgeFn { knots, segs }.canonical()
    }

    /// The part over `[lo, hi]`, re-based to start at offset 0.
    pub fn restrict(&self, lo: &S, hi: &S) -> EdgeFn<S> {
        let r = self.refine(&[lo.clone(), hi.clone()]);
        let i0 = r.locate(lo).unwrap();
        let i1 = r.locate(hi).unwrap();
        EdgeFn {
            knots: r.knots[i0..=i1].iter().map(|(o, v)| (o.clone() - lo.clone(), v.clone())).collect(),
            segs: r.segs[i0..i1].to_vec(),
        }
        .canonical()
    }

    fn add(&self, c: &S) -> EdgeFn<S> {
        EdgeFn {
            knots: self.knots.iter().map(|(o, v)| (o.clone(), v.add(c))).collect(),
            segs: self
                .segs
                .iter()
                .map(|s| match s {
                    Seg::Inf => Seg::Inf,
                    Seg::Lin(l, r) => Seg::Lin(l.clone() + c.clone(), r.clone() + c.clone()),
                })
                .collect(),
        }
    }

    fn validate(&self, len: &S, va: &Ext<S>, vb: &Ext<S>) -> Result<(), String> {
        if self.knots.len() < 2 || self.segs.len() + 1 != self.knots.len() {
            return Err("knot/segment count mismatch".into());
        }
        if !self.knots[0].0.is_zero() || self.len() != len {
            return Err("knots must start at 0 and end at the edge length".into());
        }
        if self.knots.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err("knot offsets must be strictly increasing".into());
        }
        if &self.knots[0].1 != va || &self.knots.last().unwrap().1 != vb {
            return Err("endpoint knots disagree with vertex values".into());
        }
        for (i, s) in self.segs.iter().enumerate() {
            if self.knots[i].1 > s.left() || self.knots[i + 1].1 > s.right() {
                return Err(format!("not lower semicontinuous at segment {i}"));
            }
        }
        Ok(())
    }
}

fn pair_threshold<S: Scalar>(f: &Ext<S>, g: &Ext<S>) -> Threshold<S> {
    match (f, g) {
        (Ext::Finite(x), Ext::Finite(y)) => Threshold::Finite(x.clone() - y.clone()),
        (Ext::Inf, Ext::Finite(_)) => Threshold::PosInf,
        (_, Ext::Inf) => Threshold::NegInf,
    }
}

/// A tame function on a metric graph.
#[derive(Clone, Debug)]
pub struct TameFunction<S> {
    graph: Arc<MetricGraph<S>>,
    vertex: Vec<Ext<S>>,
    edges: Vec<EdgeFn<S>>,
}

impl<S: Scalar> PartialEq for TameFunction<S> {
    fn eq(&self, other: &Self) -> bool {
        same_graph(&self.graph, &other.graph) && self.vertex == other.vertex && self.edges == other.edges
    }
}

pub(crate) fn same_graph<S: Scalar>(a: &Arc<MetricGraph<S>>, b: &Arc<MetricGraph<S>>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl<S: Scalar> TameFunction<S> {
    /// Builds a function from raw data, validating and canonicalizing it.
    pub fn from_parts(graph: Arc<MetricGraph<S>>, vertex: Vec<Ext<S>>, edges: Vec<EdgeFn<S>>) -> Result<Self, TameError> {
        if vertex.len() != graph.vertex_count() || edges.len() != graph.edge_count() {
            return Err(TameError::Malformed { location: "function".into(), reason: "size mismatch with graph".into() });
        }
        for (k, ef) in edges.iter().enumerate() {
            let e = graph.edge(k);
            ef.validate(&e.len, &vertex[e.a], &vertex[e.b])
                .map_err(|reason| TameError::Malformed { location: format!("edge {k}"), reason })?;
        }
        let edges = edges.into_iter().map(EdgeFn::canonical).collect();
        Ok(TameFunction { graph, vertex, edges })
    }

    /// Builds a continuous-interpolation function from vertex values and
    /// interior breakpoints; a gap with an infinite end is `+∞` inside.
    pub fn from_breakpoints(
        graph: Arc<MetricGraph<S>>,
        vertex: Vec<Ext<S>>,
        interior: Vec<Vec<(S, Ext<S>)>>,
    ) -> Result<Self, TameError> {
        if vertex.len() != graph.vertex_count() || interior.len() != graph.edge_count() {
            return Err(TameError::Malformed { location: "function".into(), reason: "size mismatch with graph".into() });
        }
        let mut edges = Vec::with_capacity(interior.len());
        for (k, pts) in interior.into_iter().enumerate() {
            let e = graph.edge(k);
            let mut knots = vec![(S::zero(), vertex[e.a].clone())];
            knots.extend(pts);
            knots.push((e.len.clone(), vertex[e.b].clone()));
            let segs = knots
                .windows(2)
                .map(|w| match (&w[0].1, &w[1].1) {
                    (Ext::Finite(x), Ext::Finite(y)) => Seg::Lin(x.clone(), y.clone()),
                    _ => Seg::Inf,
                })
                .collect();
            edges.push(EdgeFn { knots, segs });
        }
        Self::from_parts(graph, vertex, edges)
    }

    pub fn constant(graph: Arc<MetricGraph<S>>, c: S) -> Self {
        let vertex = vec![Ext::Finite(c.clone()); graph.vertex_count()];
        let edges = graph.edges().iter().map(|e| EdgeFn::line(e.len.clone(), c.clone(), c.clone())).collect();
        TameFunction { graph, vertex, edges }
    }

    pub fn infinite(graph: Arc<MetricGraph<S>>) -> Self {
        let vertex = vec![Ext::Inf; graph.vertex_count()];
        let edges = graph.edges().iter().map(|e| EdgeFn::infinite(e.len.clone())).collect();
        TameFunction { graph, vertex, edges }
    }

    /// Value `a` at `p`, `+∞` elsewhere.
    pub fn skyscraper(graph: Arc<MetricGraph<S>>, p: &GraphPoint<S>, a: S) -> Self {
        let mut f = Self::infinite(graph);
        match p {
            GraphPoint::Vertex(v) => {
                f.vertex[*v] = Ext::Finite(a.clone());
                for &k in f.graph.clone().incident(*v) {
                    let e = f.graph.edge(k);
                    let ef = &mut f.edges[k];
                    if e.a == *v {
                        ef.knots[0].1 = Ext::Finite(a.clone());
                    }
                    if e.b == *v {
                        ef.knots[1].1 = Ext::Finite(a.clone());
                    }
                }
            }
            GraphPoint::OnEdge { edge, offset } => {
                let len = f.graph.edge(*edge).len.clone();
                f.edges[*edge] = EdgeFn {
                    knots: vec![(S::zero(), Ext::Inf), (offset.clone(), Ext::Finite(a)), (len, Ext::Inf)],
                    segs: vec![Seg::Inf, Seg::Inf],
                };
            }
        }
        f
    }

    /// The cone `a + r·d(·, p)`, built directly from the metric.
    pub fn distance_cone(graph: Arc<MetricGraph<S>>, p: &GraphPoint<S>, a: S, r: S) -> Self {
        let vertex = (0..graph.vertex_count())
            .map(|w| Ext::Finite(a.clone() + r.clone() * graph.dist_to_vertex(p, w)))
            .collect();
        let mut edges = Vec::with_capacity(graph.edge_count());
        for (k, e) in graph.edges().iter().enumerate() {
            let da = graph.dist_to_vertex(p, e.a);
            let db = graph.dist_to_vertex(p, e.b);
            let via_a = EdgeFn::line(e.len.clone(), da.clone(), da + e.len.clone());
            let via_b = EdgeFn::line(e.len.clone(), db.clone() + e.len.clone(), db);
            let mut d = via_a.min_with(&via_b);
            if let GraphPoint::OnEdge { edge, offset } = p {
                if *edge == k {
                    let direct = EdgeFn {
                        knots: vec![
                            (S::zero(), Ext::Finite(offset.clone())),
                            (offset.clone(), Ext::zero()),
                            (e.len.clone(), Ext::Finite(e.len.clone() - offset.clone())),
                        ],
                        segs: vec![
                            Seg::Lin(offset.clone(), S::zero()),
                            Seg::Lin(S::zero(), e.len.clone() - offset.clone()),
                        ],
                    };
                    d = d.min_with(&direct);
                }
            }
            let scaled = EdgeFn {
                knots: d.knots.iter().map(|(o, v)| (o.clone(), Ext::Finite(a.clone() + r.clone() * v.finite().unwrap().clone()))).collect(),
                segs: d
                    .segs
                    .iter()
                    .map(|s| match s {
                        Seg::Lin(l, rr) => Seg::Lin(a.clone() + r.clone() * l.clone(), a.clone() + r.clone() * rr.clone()),
                        Seg::Inf => unreachable!(),
                    })
                    .collect(),
            };
            edges.push(scaled.canonical());
        }
        TameFunction { graph, vertex, edges }
    }

    pub fn graph(&self) -> &Arc<MetricGraph<S>> {
        &self.graph
    }

    pub fn vertex_values(&self) -> &[Ext<S>] {
        &self.vertex
    }

    pub fn edge_fns(&self) -> &[EdgeFn<S>] {
        &self.edges
    }

    pub fn value_at(&self, p: &GraphPoint<S>) -> Ext<S> {
        match p {
            GraphPoint::Vertex(v) => self.vertex[*v].clone(),
            GraphPoint::OnEdge { edge, offset } => self.edges[*edge].value_at(offset),
        }
    }

    pub fn is_identically_inf(&self) -> bool {
        self.vertex.iter().all(|v| !v.is_finite())
            && self.edges.iter().all(|e| e.knots.iter().all(|k| !k.1.is_finite()) && e.segs.iter().all(|s| *s == Seg::Inf))
    }

    pub fn is_finite(&self) -> bool {
        self.vertex.iter().all(Ext::is_finite) && self.edges.iter().all(|e| e.segs.iter().all(|s| matches!(s, Seg::Lin(..))))
    }

    fn check_same(&self, other: &Self) -> Result<(), TameError> {
        if same_graph(&self.graph, &other.graph) {
            Ok(())
        } else {
            Err(TameError::GraphMismatch)
        }
    }

    /// `self(x) ≤ other(x)` for every `x`.
    pub fn pointwise_leq(&self, other: &Self) -> Result<bool, TameError> {
        self.check_same(other)?;
        if self.vertex.iter().zip(&other.vertex).any(|(a, b)| a > b) {
            return Ok(false);
        }
        for (fa, fb) in self.edges.iter().zip(&other.edges) {
            let (a, b) = fa.common(fb);
            if a.knots.iter().zip(&b.knots).any(|(x, y)| x.1 > y.1) {
                return Ok(false);
            }
            for (sa, sb) in a.segs.iter().zip(&b.segs) {
                if sa.left() > sb.left() || sa.right() > sb.right() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Least `c` with `other + c ≥ self` everywhere.
    pub fn sup_difference(&self, other: &Self) -> Result<Threshold<S>, TameError> {
        self.check_same(other)?;
        let mut best = Threshold::NegInf;
        for (a, b) in self.vertex.iter().zip(&other.vertex) {
            best = best.max(pair_threshold(a, b));
        }
        for (fa, fb) in self.edges.iter().zip(&other.edges) {
            let (a, b) = fa.common(fb);
            for (x, y) in a.knots.iter().zip(&b.knots) {
                best = best.max(pair_threshold(&x.1, &y.1));
            }
            for (sa, sb) in a.segs.iter().zip(&b.segs) {
                best = best.max(pair_threshold(&sa.left(), &sb.left()));
                best = best.max(pair_threshold(&sa.right(), &sb.right()));
            }
            if best == Threshold::PosInf {
                break;
            }
        }
        Ok(best)
    }

    pub fn translate(&self, c: &S) -> Self {
        TameFunction {
            graph: self.graph.clone(),
            vertex: self.vertex.iter().map(|v| v.add(c)).collect(),
            edges: self.edges.iter().map(|e| e.add(c)).collect(),
        }
    }

    /// `self ∨ ι_Z`: unchanged on `z`, `+∞` off it.
    pub fn tensor_indicator(&self, z: &Region<S>) -> Self {
        let vertex = self
            .vertex
            .iter()
            .zip(&z.vertices)
            .map(|(v, &inside)| if inside { v.clone() } else { Ext::Inf })
            .collect();
        let mut edges = Vec::with_capacity(self.edges.len());
        for (ef, iv) in self.edges.iter().zip(&z.intervals) {
            let cuts: Vec<S> = iv.iter().flat_map(|(lo, hi)| [lo.clone(), hi.clone()]).collect();
            let r = ef.refine(&cuts);
            let inside = |t: &S| iv.iter().any(|(lo, hi)| lo <= t && t <= hi);
            let knots = r.knots.iter().map(|(o, v)| (o.clone(), if inside(o) { v.clone() } else { Ext::Inf })).collect();
            let segs = r
                .segs
                .iter()
                .enumerate()
                .map(|(i, s)| if inside(&half(&(r.knots[i].0.clone() + r.knots[i + 1].0.clone()))) { s.clone() } else { Seg::Inf })
                .collect();
            edges.push(EdgeFn { knots, segs }.canonical());
        }
        TameFunction { graph: self.graph.clone(), vertex, edges }
    }

    /// Whether the function is finite, continuous and `r`-Lipschitz.
    pub fn is_lipschitz(&self, r: &S) -> bool {
        if !self.vertex.iter().all(Ext::is_finite) {
            return false;
        }
        self.edges.iter().all(|ef| {
            ef.segs.iter().enumerate().all(|(i, s)| match s {
                Seg::Inf => false,
                Seg::Lin(l, rr) => {
                    let (o0, v0) = &ef.knots[i];
                    let (o1, v1) = &ef.knots[i + 1];
                    v0 == &Ext::Finite(l.clone())
                        && v1 == &Ext::Finite(rr.clone())
                        && (rr.clone() - l.clone()).abs() <= r.clone() * (o1.clone() - o0.clone())
                }
            })
        })
    }

    /// Minimum value and the knots attaining it.
    pub fn minimum(&self) -> Option<(S, Vec<GraphPoint<S>>)> {
        let mut best: Option<S> = None;
        let mut at = Vec::new();
        let mut consider = |v: &Ext<S>, p: GraphPoint<S>| {
            if let Ext::Finite(x) = v {
                match &best {
                    Some(b) if x > b => {}
                    Some(b) if x == b => at.push(p),
                    _ => {
                        best = Some(x.clone());
                        at = vec![p];
                    }
                }
            }
        };
        for (v, val) in self.vertex.iter().enumerate() {
            consider(val, GraphPoint::Vertex(v));
        }
        for (k, ef) in self.edges.iter().enumerate() {
            for (o, val) in &ef.knots[1..ef.knots.len() - 1] {
                consider(val, GraphPoint::OnEdge { edge: k, offset: o.clone() });
            }
        }
        best.map(|b| (b, at))
    }

    /// If the function is a cone `a + r·d(·, x)`, returns `(x, a)`.
    pub fn as_cone(&self, r: &S) -> Option<(GraphPoint<S>, S)> {
        if !self.is_finite() {
            return None;
        }
        let (a, pts) = self.minimum()?;
        pts.into_iter().find(|p| Self::distance_cone(self.graph.clone(), p, a.clone(), r.clone()) == *self).map(|p| (p, a))
    }

    /// The closed set `{x : f(x) < ∞}`.
    pub fn domain(&self) -> Region<S> {
        let mut region = Region::empty(&self.graph);
        for (v, val) in self.vertex.iter().enumerate() {
            region.vertices[v] = val.is_finite();
        }
        for (k, ef) in self.edges.iter().enumerate() {
            for (i, (o, val)) in ef.knots.iter().enumerate() {
                if val.is_finite() {
                    region.intervals[k].push((o.clone(), o.clone()));
                }
                if i < ef.segs.len() && matches!(ef.segs[i], Seg::Lin(..)) {
                    region.intervals[k].push((o.clone(), ef.knots[i + 1].0.clone()));
                }
            }
        }
        region.normalize();
        region
    }

    /// Number of connected components of `{x : f(x) < ∞}`.
    pub fn domain_components(&self) -> usize {
        self.domain().components()
    }

    /// Restrictions of the function to each component of its domain.
    pub fn split_components(&self) -> Vec<Self> {
        self.domain().component_regions().iter().map(|r| self.tensor_indicator(r)).collect()
    }

    /// Transfers the function onto a subdivision of its graph.
    pub fn relocate(&self, fine: &Arc<MetricGraph<S>>, sub: &Subdivision<S>) -> Self {
        let mut vertex = vec![Ext::Inf; fine.vertex_count()];
        vertex[..self.vertex.len()].clone_from_slice(&self.vertex);
        let mut edges = vec![EdgeFn::infinite(S::one()); fine.edge_count()];
        for (k, se) in sub.pieces.iter().enumerate() {
            let ef = &self.edges[k];
            let mut lo = S::zero();
            for &ne in &se.new_edges {
                let hi = lo.clone() + se.step.clone();
                let part = ef.restrict(&lo, &hi);
                let b = fine.edge(ne).b;
                vertex[b] = part.knots.last().unwrap().1.clone();
                edges[ne] = part;
                lo = hi;
            }
        }
        TameFunction { graph: fine.clone(), vertex, edges }
    }

    /// `(Λ_{s,r} f)(x) = min { f(y) + r·d(x,y) : d(x,y) ≤ s }`; `s = None`
    /// means an unbounded radius.
    pub fn inf_convolution(&self, s: Option<&S>, r: &S) -> Self {
        if s.is_some_and(|s| s.is_zero()) || self.graph.edge_count() == 0 {
            return self.clone();
        }
        let g = &self.graph;
        let sources = self.sources();
        let vertex: Vec<Ext<S>> = (0..g.vertex_count())
            .into_par_iter()
            .map(|w| {
                let mut best = Ext::Inf;
                for src in &sources {
                    for route in routes_to_vertex(g, w, src) {
                        if let Some(pts) = solve_route(src, &route, s, r, &S::zero()) {
                            best = best.min(Ext::Finite(pts[0].1.clone()));
                        }
                    }
                }
                best
            })
            .collect();
        let edges: Vec<EdgeFn<S>> = (0..g.edge_count())
            .into_par_iter()
            .map(|k| {
                let e = g.edge(k);
                let mut env = EdgeFn::infinite(e.len.clone());
                for src in &sources {
                    for route in routes_to_edge(g, k, src) {
                        if let Some(pts) = solve_route(src, &route, s, r, &e.len) {
                            env = env.min_with(&partial_fn(&pts, &e.len));
                        }
                    }
                }
                debug_assert_eq!(env.knots[0].1, vertex[e.a]);
                debug_assert_eq!(env.knots.last().unwrap().1, vertex[e.b]);
                env
            })
            .collect();
        TameFunction { graph: g.clone(), vertex, edges }
    }

    /// The Pasch–Hausdorff envelope `Π_r = Λ_{∞,r}`.
    pub fn lipschitz_envelope(&self, r: &S) -> Result<Self, TameError> {
        if self.is_identically_inf() {
            return Err(TameError::EmptySheaf);
        }
        if self.is_lipschitz(r) {
            return Ok(self.clone());
        }
        Ok(self.inf_convolution(None, r))
    }

    fn sources(&self) -> Vec<Source<S>> {
        let mut out = Vec::new();
        for (v, val) in self.vertex.iter().enumerate() {
            if let Ext::Finite(x) = val {
                out.push(Source { at: SourceAt::Vertex(v), lo: S::zero(), hi: S::zero(), v0: x.clone(), slope: S::zero() });
            }
        }
        for (k, ef) in self.edges.iter().enumerate() {
            let n = ef.knots.len();
            for (o, val) in &ef.knots[1..n - 1] {
                if let Ext::Finite(x) = val {
                    out.push(Source { at: SourceAt::Edge(k), lo: o.clone(), hi: o.clone(), v0: x.clone(), slope: S::zero() });
                }
            }
            for (i, s) in ef.segs.iter().enumerate() {
                if let Seg::Lin(l, r) = s {
                    let (o0, o1) = (&ef.knots[i].0, &ef.knots[i + 1].0);
                    out.push(Source {
                        at: SourceAt::Edge(k),
                        lo: o0.clone(),
                        hi: o1.clone(),
                        v0: l.clone(),
                        slope: (r.clone() - l.clone()) / (o1.clone() - o0.clone()),
                    });
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
enum SourceAt {
    Vertex(usize),
    Edge(usize),
}

/// A closed piece of the function: value `v0 + slope·(τ − lo)` for
/// `τ ∈ [lo, hi]` on an edge, or a single vertex value.
#[derive(Clone, Debug)]
struct Source<S> {
    at: SourceAt,
    lo: S,
    hi: S,
    v0: S,
    slope: S,
}

/// A path shape from target parameter `t` to source parameter `τ` of
/// length `c + α t + β τ`, optionally valid only for `τ ≤ t` or `τ ≥ t`.
#[derive(Clone, Debug)]
struct Route<S> {
    c: S,
    alpha: i8,
    beta: i8,
    order: Option<std::cmp::Ordering>,
}

fn sign<S: Scalar>(k: i8) -> S {
    match k {
        1 => S::one(),
        -1 => -S::one(),
        _ => S::zero(),
    }
}

fn entries<S: Scalar>(g: &MetricGraph<S>, src: &Source<S>) -> Vec<(usize, S, i8)> {
    match src.at {
        SourceAt::Vertex(v) => vec![(v, S::zero(), 0)],
        SourceAt::Edge(k) => {
            let e = g.edge(k);
            vec![(e.a, S::zero(), 1), (e.b, e.len.clone(), -1)]
        }
    }
}

fn routes_to_vertex<S: Scalar>(g: &MetricGraph<S>, w: usize, src: &Source<S>) -> Vec<Route<S>> {
    entries(g, src)
        .into_iter()
        .map(|(v, c1, beta)| Route { c: c1 + g.vdist(w, v).clone(), alpha: 0, beta, order: None })
        .collect()
}

fn routes_to_edge<S: Scalar>(g: &MetricGraph<S>, k: usize, src: &Source<S>) -> Vec<Route<S>> {
    let e = g.edge(k);
    let mut out = Vec::with_capacity(6);
    for (x, c0, alpha) in [(e.a, S::zero(), 1i8), (e.b, e.len.clone(), -1i8)] {
        for (v, c1, beta) in entries(g, src) {
            out.push(Route { c: c0.clone() + c1 + g.vdist(x, v).clone(), alpha, beta, order: None });
        }
    }
    if matches!(src.at, SourceAt::Edge(j) if j == k) {
        out.push(Route { c: S::zero(), alpha: 1, beta: -1, order: Some(std::cmp::Ordering::Less) });
        out.push(Route { c: S::zero(), alpha: -1, beta: 1, order: Some(std::cmp::Ordering::Greater) });
    }
    out
}

/// Line `p + k t`.
#[derive(Clone, Debug)]
struct LineT<S> {
    p: S,
    k: S,
}

impl<S: Scalar> LineT<S> {
    fn at(&self, t: &S) -> S {
        self.p.clone() + self.k.clone() * t.clone()
    }
}

/// Minimizes `v(τ) + r·route(t, τ)` over admissible `τ` for every target
/// parameter `t ∈ [0, len]`. Returns the knots `(t, value)` of the resulting
/// continuous piecewise-linear function on its (closed) interval of
/// feasibility, or `None` if infeasible everywhere.
fn solve_route<S: Scalar>(src: &Source<S>, route: &Route<S>, s: Option<&S>, r: &S, len: &S) -> Option<Vec<(S, S)>> {
    let alpha: S = sign(route.alpha);
    let beta: S = sign(route.beta);
    // v(τ) = q0 + m τ with q0 the value extrapolated to τ = 0.
    let m = src.slope.clone();
    let q0 = src.v0.clone() - m.clone() * src.lo.clone();
    let mut lowers = vec![LineT { p: src.lo.clone(), k: S::zero() }];
    let mut uppers = vec![LineT { p: src.hi.clone(), k: S::zero() }];
    match route.order {
        Some(std::cmp::Ordering::Less) => uppers.push(LineT { p: S::zero(), k: S::one() }),
        Some(std::cmp::Ordering::Greater) => lowers.push(LineT { p: S::zero(), k: S::one() }),
        _ => {}
    }
    // t-only constraints `A t + B ≤ 0`.
    let mut tcons: Vec<(S, S)> = Vec::new();
    if let Some(s) = s {
        match route.beta {
            1 => uppers.push(LineT { p: s.clone() - route.c.clone(), k: -alpha.clone() }),
            -1 => lowers.push(LineT { p: route.c.clone() - s.clone(), k: alpha.clone() }),
            _ => tcons.push((alpha.clone(), route.c.clone() - s.clone())),
        }
    }
    for l in &lowers {
        for u in &uppers {
            tcons.push((l.k.clone() - u.k.clone(), l.p.clone() - u.p.clone()));
        }
    }
    let mut t0 = S::zero();
    let mut t1 = len.clone();
    for (a, b) in tcons {
        if a.is_zero() {
            if b.is_positive() {
                return None;
            }
        } else {
            let x = -b / a.clone();
            if a.is_positive() {
                if x < t1 {
                    t1 = x;
                }
            } else if x > t0 {
                t0 = x;
            }
        }
    }
    if t0 > t1 {
        return None;
    }
    let kappa = m + r.clone() * beta;
    let family = if kappa.is_negative() { &uppers } else { &lowers };
    let pick = |t: &S| -> S {
        let mut vals = family.iter().map(|l| l.at(t));
        let first = vals.next().unwrap();
        if kappa.is_negative() {
            vals.fold(first, |a, b| if b < a { b } else { a })
        } else {
            vals.fold(first, |a, b| if b > a { b } else { a })
        }
    };
    let base = q0 + r.clone() * route.c.clone();
    let value = |t: &S| base.clone() + r.clone() * alpha.clone() * t.clone() + kappa.clone() * pick(t);
    let mut ts = vec![t0.clone(), t1.clone()];
    for (i, a) in family.iter().enumerate() {
        for b in &family[i + 1..] {
            if a.k != b.k {
                let x = (b.p.clone() - a.p.clone()) / (a.k.clone() - b.k.clone());
                if x > t0 && x < t1 {
                    ts.push(x);
                }
            }
        }
    }
    ts.sort_by(cmp);
    ts.dedup();
    Some(ts.into_iter().map(|t| {
        let v = value(&t);
        (t, v)
    }).collect())
}

/// Embeds a function given on `[t0, t1] ⊆ [0, len]` by its knots into an
/// edge function that is `+∞` elsewhere.
fn partial_fn<S: Scalar>(pts: &[(S, S)], len: &S) -> EdgeFn<S> {
    let mut knots = Vec::with_capacity(pts.len() + 2);
    let mut segs = Vec::with_capacity(pts.len() + 2);
    if pts[0].0.is_positive() {
        knots.push((S::zero(), Ext::Inf));
        segs.push(Seg::Inf);
    }
    for (i, (t, v)) in pts.iter().enumerate() {
        knots.push((t.clone(), Ext::Finite(v.clone())));
        if i + 1 < pts.len() {
            segs.push(Seg::Lin(v.clone(), pts[i + 1].1.clone()));
        }
    }
    if &pts.last().unwrap().0 < len {
        segs.push(Seg::Inf);
        knots.push((len.clone(), Ext::Inf));
    }
    if knots.len() == 1 {
        // A single point at an endpoint of a zero-length range cannot occur
        // for edges, which have positive length.
        unreachable!("edge of zero length");
    }
    EdgeFn { knots, segs }
}
