//! Finite metric graphs, points on them, subdivision and Čech covers.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::scalar::{cmp, half, min, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("graph has no vertices")]
    Empty,
    #[error("duplicate vertex id {0:?}")]
    DuplicateVertex(String),
    #[error("unknown vertex id {0:?}")]
    UnknownVertex(String),
    #[error("edge {0} has non-positive length")]
    NonPositiveLength(usize),
    #[error("edge {0} is a self-loop")]
    SelfLoop(usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("point offset {offset} outside the open edge {edge}")]
    OffsetOutOfRange { edge: usize, offset: String },
    #[error("unknown edge {0}")]
    UnknownEdge(usize),
    #[error("cover nerve violation at {subset:?}: {reason}")]
    NerveViolation { subset: Vec<usize>, reason: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge<S> {
    pub a: usize,
    pub b: usize,
    pub len: S,
}

/// Connected finite graph with positive edge lengths and its geodesic metric.
#[derive(Clone, Debug)]
pub struct MetricGraph<S> {
    names: Vec<String>,
    edges: Vec<Edge<S>>,
    index: HashMap<String, usize>,
    incident: Vec<Vec<usize>>,
    dist: Vec<Vec<S>>,
}

impl<S: Scalar> PartialEq for MetricGraph<S> {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.edges == other.edges
    }
}

/// A point of a metric graph: a vertex or an interior point of an edge.
#[derive(Clone, Debug, PartialEq)]
pub enum GraphPoint<S> {
    Vertex(usize),
    OnEdge { edge: usize, offset: S },
}

impl<S: Scalar> MetricGraph<S> {
    pub fn new(names: Vec<String>, edges: Vec<(String, String, S)>) -> Result<Self, GraphError> {
        let mut index = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertex(n.clone()));
            }
        }
        let mut es = Vec::with_capacity(edges.len());
        for (a, b, len) in edges {
            let ia = *index.get(&a).ok_or_else(|| GraphError::UnknownVertex(a.clone()))?;
            let ib = *index.get(&b).ok_or_else(|| GraphError::UnknownVertex(b.clone()))?;
            es.push(Edge { a: ia, b: ib, len });
        }
        Self::from_parts(names, es)
    }

    pub fn from_parts(names: Vec<String>, edges: Vec<Edge<S>>) -> Result<Self, GraphError> {
        if names.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut index = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertex(n.clone()));
            }
        }
        let mut incident = vec![Vec::new(); names.len()];
        for (k, e) in edges.iter().enumerate() {
            if e.a >= names.len() || e.b >= names.len() {
                return Err(GraphError::UnknownEdge(k));
            }
            if !e.len.is_positive() {
                return Err(GraphError::NonPositiveLength(k));
            }
            if e.a == e.b {
                return Err(GraphError::SelfLoop(k));
            }
            incident[e.a].push(k);
            incident[e.b].push(k);
        }
        let mut g = MetricGraph { names, edges, index, incident, dist: Vec::new() };
        let mut dist = Vec::with_capacity(g.names.len());
        for v in 0..g.names.len() {
            let d = g.dijkstra(v);
            if d.iter().any(Option::is_none) {
                return Err(GraphError::Disconnected);
            }
            dist.push(d.into_iter().map(Option::unwrap).collect());
        }
        g.dist = dist;
        Ok(g)
    }

    /// The one-point space.
    pub fn point() -> Self {
        Self::from_parts(vec!["pt".into()], Vec::new()).expect("point graph is valid")
    }

    /// Path graph `v0 – v1 – … – vn` with the given edge lengths.
    pub fn path(lengths: &[S]) -> Self {
        let names = (0..=lengths.len()).map(|i| format!("v{i}")).collect();
        let edges = lengths.iter().enumerate().map(|(i, l)| Edge { a: i, b: i + 1, len: l.clone() }).collect();
        Self::from_parts(names, edges).expect("path graph is valid")
    }

    /// Cycle graph on `lengths.len() ≥ 2` vertices.
    pub fn cycle(lengths: &[S]) -> Self {
        let n = lengths.len();
        let names = (0..n).map(|i| format!("v{i}")).collect();
        let edges = lengths.iter().enumerate().map(|(i, l)| Edge { a: i, b: (i + 1) % n, len: l.clone() }).collect();
        Self::from_parts(names, edges).expect("cycle graph is valid")
    }

    fn dijkstra(&self, src: usize) -> Vec<Option<S>> {
        let n = self.names.len();
        let mut d: Vec<Option<S>> = vec![None; n];
        let mut done = vec![false; n];
        d[src] = Some(S::zero());
        loop {
            let mut best: Option<usize> = None;
            for v in 0..n {
                if done[v] {
                    continue;
                }
                if let Some(dv) = &d[v] {
                    if best.is_none_or(|b| dv < d[b].as_ref().unwrap()) {
                        best = Some(v);
                    }
                }
            }
            let Some(u) = best else { break };
            done[u] = true;
            let du = d[u].clone().unwrap();
            for &k in &self.incident[u] {
                let e = &self.edges[k];
                let w = if e.a == u { e.b } else { e.a };
                let cand = du.clone() + e.len.clone();
                if d[w].as_ref().is_none_or(|dw| &cand < dw) {
                    d[w] = Some(cand);
                }
            }
        }
        d
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn edges(&self) -> &[Edge<S>] {
        &self.edges
    }

    pub fn edge(&self, k: usize) -> &Edge<S> {
        &self.edges[k]
    }

    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    /// Vertex-to-vertex geodesic distance.
    pub fn vdist(&self, u: usize, v: usize) -> &S {
        &self.dist[u][v]
    }

    /// Builds a point on edge `edge` at `offset` from its `a` endpoint,
    /// normalizing endpoint offsets to vertices.
    pub fn point_on_edge(&self, edge: usize, offset: S) -> Result<GraphPoint<S>, GraphError> {
        let e = self.edges.get(edge).ok_or(GraphError::UnknownEdge(edge))?;
        if offset.is_zero() {
            Ok(GraphPoint::Vertex(e.a))
        } else if offset == e.len {
            Ok(GraphPoint::Vertex(e.b))
        } else if offset.is_negative() || offset > e.len {
            Err(GraphError::OffsetOutOfRange { edge, offset: offset.to_string() })
        } else {
            Ok(GraphPoint::OnEdge { edge, offset })
        }
    }

    pub fn check_point(&self, p: &GraphPoint<S>) -> Result<(), GraphError> {
        match p {
            GraphPoint::Vertex(v) if *v < self.names.len() => Ok(()),
            GraphPoint::Vertex(v) => Err(GraphError::UnknownVertex(v.to_string())),
            GraphPoint::OnEdge { edge, offset } => {
                let e = self.edges.get(*edge).ok_or(GraphError::UnknownEdge(*edge))?;
                if offset.is_positive() && offset < &e.len {
                    Ok(())
                } else {
                    Err(GraphError::OffsetOutOfRange { edge: *edge, offset: offset.to_string() })
                }
            }
        }
    }

    pub fn midpoint(&self, edge: usize) -> GraphPoint<S> {
        GraphPoint::OnEdge { edge, offset: half(&self.edges[edge].len) }
    }

    /// Distance from a point to a vertex.
    pub fn dist_to_vertex(&self, p: &GraphPoint<S>, w: usize) -> S {
        match p {
            GraphPoint::Vertex(v) => self.dist[*v][w].clone(),
            GraphPoint::OnEdge { edge, offset } => {
                let e = &self.edges[*edge];
                min(
                    offset.clone() + self.dist[e.a][w].clone(),
                    e.len.clone() - offset.clone() + self.dist[e.b][w].clone(),
                )
            }
        }
    }

    /// Exact geodesic distance.
    pub fn distance(&self, p: &GraphPoint<S>, q: &GraphPoint<S>) -> S {
        match q {
            GraphPoint::Vertex(w) => self.dist_to_vertex(p, *w),
            GraphPoint::OnEdge { edge, offset } => {
                let e = &self.edges[*edge];
                let via = min(
                    offset.clone() + self.dist_to_vertex(p, e.a),
                    e.len.clone() - offset.clone() + self.dist_to_vertex(p, e.b),
                );
                match p {
                    GraphPoint::OnEdge { edge: pe, offset: po } if pe == edge => {
                        min(via, (po.clone() - offset.clone()).abs())
                    }
                    _ => via,
                }
            }
        }
    }

    /// Largest distance from vertex `v` to any point of the graph.
    pub fn eccentricity(&self, v: usize) -> S {
        let mut best = S::zero();
        for e in &self.edges {
            // The farthest point of an edge is where its two routes meet.
            let far = half(&(self.dist[v][e.a].clone() + self.dist[v][e.b].clone() + e.len.clone()));
            if far > best {
                best = far;
            }
        }
        best
    }

    /// Splits every edge into `ceil(len / mesh)` equal pieces.
    pub fn subdivide(&self, mesh: &S) -> (MetricGraph<S>, Subdivision<S>) {
        assert!(mesh.is_positive(), "mesh must be positive");
        let mut names = self.names.clone();
        let mut taken: BTreeSet<String> = names.iter().cloned().collect();
        let mut edges = Vec::new();
        let mut pieces = Vec::with_capacity(self.edges.len());
        for (k, e) in self.edges.iter().enumerate() {
            let mut n = 1usize;
            while e.len.clone() / S::from_usize(n).unwrap() > *mesh {
                n += 1;
            }
            let step = e.len.clone() / S::from_usize(n).unwrap();
            let mut prev = e.a;
            let mut ids = Vec::with_capacity(n);
            for j in 1..=n {
                let next = if j == n {
                    e.b
                } else {
                    let mut nm = format!("e{k}.{j}");
                    while taken.contains(&nm) {
                        nm.push('\'');
                    }
                    taken.insert(nm.clone());
                    names.push(nm);
                    names.len() - 1
                };
                ids.push(edges.len());
                edges.push(Edge { a: prev, b: next, len: step.clone() });
                prev = next;
            }
            pieces.push(SubdividedEdge { new_edges: ids, step });
        }
        let g = MetricGraph::from_parts(names, edges).expect("subdivision of a valid graph is valid");
        (g, Subdivision { pieces })
    }

    /// Cover by closed stars of vertices in the barycentric subdivision.
    ///
    /// Piece `v` is the vertex `v` together with the closed half of every
    /// incident edge; two pieces meet exactly in the midpoints of the edges
    /// joining them.
    pub fn star_cover(&self) -> Result<CechCover<S>, GraphError> {
        let n = self.names.len();
        let mut pieces = Vec::with_capacity(n);
        let mut radius = Vec::with_capacity(n);
        for v in 0..n {
            let mut r = Region::empty(self);
            r.vertices[v] = true;
            let mut rad = S::zero();
            for &k in &self.incident[v] {
                let e = &self.edges[k];
                let h = half(&e.len);
                if h > rad {
                    rad = h.clone();
                }
                if e.a == v {
                    r.intervals[k].push((S::zero(), h));
                } else {
                    r.intervals[k].push((h, e.len.clone()));
                }
            }
            r.normalize();
            pieces.push(r);
            radius.push(rad);
        }
        let mut nerve = Vec::new();
        let mut nonempty_pairs = BTreeSet::new();
        for i in 0..n {
            for j in i + 1..n {
                let r = pieces[i].intersect(&pieces[j]);
                if r.is_empty() {
                    continue;
                }
                if r.components() != 1 {
                    return Err(GraphError::NerveViolation {
                        subset: vec![i, j],
                        reason: "pairwise intersection is disconnected".into(),
                    });
                }
                nonempty_pairs.insert((i, j));
                nerve.push(NerveCell { subset: vec![i, j], region: r });
            }
        }
        for &(i, j) in &nonempty_pairs {
            for k in j + 1..n {
                if nonempty_pairs.contains(&(i, k)) && nonempty_pairs.contains(&(j, k)) {
                    let r = pieces[i].intersect(&pieces[j]).intersect(&pieces[k]);
                    if !r.is_empty() {
                        return Err(GraphError::NerveViolation {
                            subset: vec![i, j, k],
                            reason: "triple intersection is nonempty".into(),
                        });
                    }
                }
            }
        }
        let centers = (0..n).map(GraphPoint::Vertex).collect();
        Ok(CechCover { pieces, centers, radius, nerve })
    }
}

#[derive(Clone, Debug)]
pub struct SubdividedEdge<S> {
    pub new_edges: Vec<usize>,
    pub step: S,
}

/// Bookkeeping from `subdivide`: which new edges make up each old edge.
#[derive(Clone, Debug)]
pub struct Subdivision<S> {
    pub pieces: Vec<SubdividedEdge<S>>,
}

impl<S: Scalar> Subdivision<S> {
    /// Relocates a point of the old graph onto the subdivided graph.
    pub fn relocate(&self, fine: &MetricGraph<S>, p: &GraphPoint<S>) -> GraphPoint<S> {
        match p {
            GraphPoint::Vertex(v) => GraphPoint::Vertex(*v),
            GraphPoint::OnEdge { edge, offset } => {
                let se = &self.pieces[*edge];
                let mut j = 0usize;
                let mut start = S::zero();
                while j + 1 < se.new_edges.len() && start.clone() + se.step.clone() <= *offset {
                    start = start + se.step.clone();
                    j += 1;
                }
                fine.point_on_edge(se.new_edges[j], offset.clone() - start)
                    .expect("relocated offset lies on the piece")
            }
        }
    }
}

/// Closed subset of a graph made of vertices and closed edge intervals.
#[derive(Clone, Debug, PartialEq)]
pub struct Region<S> {
    pub vertices: Vec<bool>,
    /// Per edge, sorted disjoint closed intervals `[lo, hi]` of offsets.
    pub intervals: Vec<Vec<(S, S)>>,
    lens: Vec<S>,
    ends: Vec<(usize, usize)>,
}

impl<S: Scalar> Region<S> {
    pub fn empty(g: &MetricGraph<S>) -> Self {
        Region {
            vertices: vec![false; g.vertex_count()],
            intervals: vec![Vec::new(); g.edge_count()],
            lens: g.edges.iter().map(|e| e.len.clone()).collect(),
            ends: g.edges.iter().map(|e| (e.a, e.b)).collect(),
        }
    }

    pub fn whole(g: &MetricGraph<S>) -> Self {
        let mut r = Self::empty(g);
        r.vertices.iter_mut().for_each(|v| *v = true);
        for (k, e) in g.edges.iter().enumerate() {
            r.intervals[k].push((S::zero(), e.len.clone()));
        }
        r
    }

    pub fn single(g: &MetricGraph<S>, p: &GraphPoint<S>) -> Self {
        let mut r = Self::empty(g);
        match p {
            GraphPoint::Vertex(v) => r.vertices[*v] = true,
            GraphPoint::OnEdge { edge, offset } => r.intervals[*edge].push((offset.clone(), offset.clone())),
        }
        r.normalize();
        r
    }

    /// Sorts, merges, and adds endpoint vertices of intervals touching them.
    pub fn normalize(&mut self) {
        for (k, iv) in self.intervals.iter_mut().enumerate() {
            iv.sort_by(|x, y| cmp(&x.0, &y.0));
            let mut out: Vec<(S, S)> = Vec::with_capacity(iv.len());
            for (lo, hi) in iv.drain(..) {
                match out.last_mut() {
                    Some(last) if lo <= last.1 => {
                        if hi > last.1 {
                            last.1 = hi;
                        }
                    }
                    _ => out.push((lo, hi)),
                }
            }
            if out.first().is_some_and(|x| x.0.is_zero()) {
                self.vertices[self.ends[k].0] = true;
            }
            if out.last().is_some_and(|x| x.1 == self.lens[k]) {
                self.vertices[self.ends[k].1] = true;
            }
            *iv = out;
        }
        for (k, &(a, b)) in self.ends.iter().enumerate() {
            let iv = &mut self.intervals[k];
            if self.vertices[a] && iv.first().is_none_or(|x| !x.0.is_zero()) {
                iv.insert(0, (S::zero(), S::zero()));
            }
            if self.vertices[b] && iv.last().is_none_or(|x| x.1 != self.lens[k]) {
                iv.push((self.lens[k].clone(), self.lens[k].clone()));
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        !self.vertices.iter().any(|&v| v) && self.intervals.iter().all(Vec::is_empty)
    }

    pub fn contains(&self, p: &GraphPoint<S>) -> bool {
        match p {
            GraphPoint::Vertex(v) => self.vertices[*v],
            GraphPoint::OnEdge { edge, offset } => {
                self.intervals[*edge].iter().any(|(lo, hi)| lo <= offset && offset <= hi)
            }
        }
    }

    pub fn intersect(&self, other: &Region<S>) -> Region<S> {
        let mut r = Region {
            vertices: self.vertices.iter().zip(&other.vertices).map(|(a, b)| *a && *b).collect(),
            intervals: Vec::with_capacity(self.intervals.len()),
            lens: self.lens.clone(),
            ends: self.ends.clone(),
        };
        for (x, y) in self.intervals.iter().zip(&other.intervals) {
            let mut out = Vec::new();
            for (a0, a1) in x {
                for (b0, b1) in y {
                    let lo = if a0 > b0 { a0.clone() } else { b0.clone() };
                    let hi = if a1 < b1 { a1.clone() } else { b1.clone() };
                    if lo <= hi {
                        out.push((lo, hi));
                    }
                }
            }
            r.intervals.push(out);
        }
        r.normalize();
        r
    }

    /// Number of connected components.
    pub fn components(&self) -> usize {
        self.component_regions().len()
    }

    /// The connected components, in order of their first vertex or interval.
    pub fn component_regions(&self) -> Vec<Region<S>> {
        let nv = self.vertices.len();
        let mut nodes = nv;
        let mut owner: Vec<Vec<usize>> = Vec::with_capacity(self.intervals.len());
        for iv in &self.intervals {
            owner.push((nodes..nodes + iv.len()).collect());
            nodes += iv.len();
        }
        let mut parent: Vec<usize> = (0..nodes).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (k, iv) in self.intervals.iter().enumerate() {
            let (a, b) = self.ends[k];
            for (idx, (lo, hi)) in iv.iter().enumerate() {
                let me = owner[k][idx];
                if lo.is_zero() {
                    let (x, y) = (find(&mut parent, me), find(&mut parent, a));
                    parent[x] = y;
                }
                if *hi == self.lens[k] {
                    let (x, y) = (find(&mut parent, me), find(&mut parent, b));
                    parent[x] = y;
                }
            }
        }
        let mut label: Vec<usize> = Vec::new();
        let mut out: Vec<Region<S>> = Vec::new();
        let blank = Region {
            vertices: vec![false; nv],
            intervals: vec![Vec::new(); self.intervals.len()],
            lens: self.lens.clone(),
            ends: self.ends.clone(),
        };
        let mut slot = |root: usize, out: &mut Vec<Region<S>>| -> usize {
            match label.iter().position(|&r| r == root) {
                Some(i) => i,
                None => {
                    label.push(root);
                    out.push(blank.clone());
                    out.len() - 1
                }
            }
        };
        for v in 0..nv {
            if self.vertices[v] {
                let i = slot(find(&mut parent, v), &mut out);
                out[i].vertices[v] = true;
            }
        }
        for (k, iv) in self.intervals.iter().enumerate() {
            for (idx, range) in iv.iter().enumerate() {
                let i = slot(find(&mut parent, owner[k][idx]), &mut out);
                out[i].intervals[k].push(range.clone());
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct NerveCell<S> {
    pub subset: Vec<usize>,
    pub region: Region<S>,
}

/// A closed cover together with its nonempty intersections.
#[derive(Clone, Debug)]
pub struct CechCover<S> {
    pub pieces: Vec<Region<S>>,
    /// A designated point of each piece; every point of the piece is within
    /// `radius` of it.
    pub centers: Vec<GraphPoint<S>>,
    pub radius: Vec<S>,
    /// Nonempty pairwise intersections (no triple intersections exist).
    pub nerve: Vec<NerveCell<S>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn unit_cycle(n: usize) -> MetricGraph<Rational> {
        MetricGraph::cycle(&vec![q(1, 1); n])
    }

    #[test]
    fn distances_on_small_graphs() {
        let c3 = unit_cycle(3);
        assert_eq!(c3.distance(&GraphPoint::Vertex(0), &GraphPoint::Vertex(2)), q(1, 1));
        let p2 = MetricGraph::path(&[q(1, 1)]);
        let mid = p2.midpoint(0);
        assert_eq!(p2.distance(&mid, &GraphPoint::Vertex(1)), q(1, 2));
        assert_eq!(p2.distance(&mid, &mid), q(0, 1));
        assert_eq!(p2.eccentricity(0), q(1, 1));
        assert_eq!(c3.eccentricity(0), q(3, 2));
    }

    #[test]
    fn same_edge_points_use_the_shorter_route() {
        let c2 = MetricGraph::cycle(&[q(1, 1), q(1, 4)]);
        let p = GraphPoint::OnEdge { edge: 0, offset: q(1, 8) };
        let r = GraphPoint::OnEdge { edge: 0, offset: q(7, 8) };
        assert_eq!(c2.distance(&p, &r), q(1, 2));
    }

    #[test]
    fn validation_errors() {
        let v = |s: &str| s.to_string();
        assert_eq!(
            MetricGraph::new(vec![v("a"), v("b")], vec![(v("a"), v("b"), q(0, 1))]).unwrap_err(),
            GraphError::NonPositiveLength(0)
        );
        assert_eq!(
            MetricGraph::<Rational>::new(vec![v("a"), v("b")], vec![]).unwrap_err(),
            GraphError::Disconnected
        );
        assert_eq!(
            MetricGraph::new(vec![v("a")], vec![(v("a"), v("a"), q(1, 1))]).unwrap_err(),
            GraphError::SelfLoop(0)
        );
    }

    #[test]
    fn subdivision_examples() {
        let p2 = MetricGraph::path(&[q(1, 1)]);
        let (same, _) = p2.subdivide(&q(1, 1));
        assert_eq!(same, p2);
        let (fine, sub) = p2.subdivide(&q(1, 2));
        assert_eq!(fine.vertex_count(), 3);
        assert!(fine.edges().iter().all(|e| e.len == q(1, 2)));
        let mid = sub.relocate(&fine, &p2.midpoint(0));
        assert!(matches!(mid, GraphPoint::Vertex(_)));

        let c3 = unit_cycle(3);
        let (c6, _) = c3.subdivide(&q(1, 2));
        assert_eq!(c6.vertex_count(), 6);
        assert_eq!(c6.vdist(0, 1), &q(1, 1));
    }

    #[test]
    fn star_cover_of_c6() {
        let (c6, _) = unit_cycle(3).subdivide(&q(1, 2));
        let cover = c6.star_cover().unwrap();
        assert_eq!(cover.pieces.len(), 6);
        assert_eq!(cover.nerve.len(), 6);
        for cell in &cover.nerve {
            assert_eq!(cell.region.components(), 1);
        }
    }

    #[test]
    fn star_cover_of_p2_meets_at_the_midpoint() {
        let p2 = MetricGraph::path(&[q(1, 1)]);
        let cover = p2.star_cover().unwrap();
        assert_eq!(cover.pieces.len(), 2);
        assert_eq!(cover.nerve.len(), 1);
        assert!(cover.nerve[0].region.contains(&p2.midpoint(0)));
        assert!(!cover.nerve[0].region.contains(&GraphPoint::Vertex(0)));
    }

    #[test]
    fn parallel_edges_are_rejected() {
        let c2 = MetricGraph::cycle(&[q(1, 1), q(1, 1)]);
        assert!(matches!(c2.star_cover(), Err(GraphError::NerveViolation { .. })));
    }
}
