//! Stalks, barcodes of point-base complexes and bottleneck distances.
//!
//! On the one-point base a generator is a ray `[a, ∞)`. A finite bar `[a, b)`
//! of degree `d` is realized by the two-generator complex `(a, d−1) → (b, d)`;
//! an infinite bar `[a, ∞)` of degree `d` by the single generator `(a, d)`.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::gf2::{BitMat, BitVec};
use crate::graph::{GraphPoint, MetricGraph};
use crate::interleave::Certificate;
use crate::scalar::{cmp, half, Ext, Scalar};
use crate::tamefn::{TameError, TameFunction};
use crate::twisted::{Generator, TwistedComplex, TwistedError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BarcodeError {
    #[error("bar {0} has birth not below death")]
    Inverted(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bar<S> {
    pub birth: S,
    pub death: Ext<S>,
    pub deg: i64,
}

impl<S: Scalar> Bar<S> {
    pub fn new(birth: S, death: Ext<S>, deg: i64) -> Self {
        Bar { birth, death, deg }
    }

    pub fn is_finite(&self) -> bool {
        self.death.is_finite()
    }

    pub fn half_length(&self) -> Ext<S> {
        match &self.death {
            Ext::Finite(d) => Ext::Finite(half(&(d.clone() - self.birth.clone()))),
            Ext::Inf => Ext::Inf,
        }
    }

    /// Degree in which the bar is visible in stalk cohomology.
    pub fn live_degree(&self) -> i64 {
        if self.is_finite() {
            self.deg - 1
        } else {
            self.deg
        }
    }

    pub fn contains(&self, t: &S) -> bool {
        self.birth <= *t && Ext::Finite(t.clone()) < self.death
    }

    pub fn shifted(&self, s: &S) -> Self {
        Bar { birth: self.birth.clone() + s.clone(), death: self.death.add(s), deg: self.deg }
    }
}

/// Multiset of bars kept in canonical order `(deg, birth, death)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Barcode<S> {
    bars: Vec<Bar<S>>,
}

fn bar_order<S: Scalar>(x: &Bar<S>, y: &Bar<S>) -> std::cmp::Ordering {
    x.deg
        .cmp(&y.deg)
        .then_with(|| cmp(&x.birth, &y.birth))
        .then_with(|| x.death.partial_cmp(&y.death).expect("total order"))
}

impl<S: Scalar> Barcode<S> {
    pub fn new(mut bars: Vec<Bar<S>>) -> Result<Self, BarcodeError> {
        if let Some(i) = bars.iter().position(|b| Ext::Finite(b.birth.clone()) >= b.death) {
            return Err(BarcodeError::Inverted(i));
        }
        bars.sort_by(bar_order);
        Ok(Barcode { bars })
    }

    pub fn empty() -> Self {
        Barcode { bars: Vec::new() }
    }

    pub fn bars(&self) -> &[Bar<S>] {
        &self.bars
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn shifted(&self, s: &S) -> Self {
        Barcode { bars: self.bars.iter().map(|b| b.shifted(s)).collect() }
    }

    pub fn degrees(&self) -> Vec<i64> {
        let mut d: Vec<i64> = self.bars.iter().map(|b| b.deg).collect();
        d.dedup();
        d
    }

    fn in_degree(&self, d: i64) -> Vec<&Bar<S>> {
        self.bars.iter().filter(|b| b.deg == d).collect()
    }

    /// Rank of stalk cohomology in degree `k` at level `t`.
    pub fn betti(&self, k: i64, t: &S) -> usize {
        self.bars.iter().filter(|b| b.live_degree() == k && b.contains(t)).count()
    }
}

fn point_graph<S: Scalar>() -> Arc<MetricGraph<S>> {
    Arc::new(MetricGraph::point())
}

fn is_point_base<S: Scalar>(g: &MetricGraph<S>) -> bool {
    g.vertex_count() == 1 && g.edge_count() == 0
}

/// The stalk at `x` as a point-base complex.
pub fn stalk_complex<S: Scalar>(f: &TwistedComplex<S>, x: &GraphPoint<S>) -> Result<TwistedComplex<S>, TwistedError> {
    f.graph().check_point(x).map_err(|e| TameError::Malformed { location: "stalk point".into(), reason: e.to_string() })?;
    let pt = point_graph();
    let mut keep = Vec::new();
    let mut gens = Vec::new();
    for (i, g) in f.gens().iter().enumerate() {
        if let Ext::Finite(a) = g.fun.value_at(x) {
            keep.push(i);
            gens.push(Generator::new(TameFunction::skyscraper(pt.clone(), &GraphPoint::Vertex(0), a), g.deg));
        }
    }
    Ok(TwistedComplex::assemble(pt, gens, f.diff().select(&keep, &keep)))
}

/// Generators realizing `bars` at the point `x`, in bar order.
pub fn cone_tower_from_barcode<S: Scalar>(graph: &Arc<MetricGraph<S>>, bars: &Barcode<S>, x: &GraphPoint<S>) -> TwistedComplex<S> {
    let sky = |a: &S, d: i64| Generator::new(TameFunction::skyscraper(graph.clone(), x, a.clone()), d);
    let mut gens = Vec::new();
    let mut entries = Vec::new();
    for b in bars.bars() {
        match &b.death {
            Ext::Inf => gens.push(sky(&b.birth, b.deg)),
            Ext::Finite(d) => {
                gens.push(sky(&b.birth, b.deg - 1));
                gens.push(sky(d, b.deg));
                entries.push((gens.len() - 1, gens.len() - 2));
            }
        }
    }
    let n = gens.len();
    TwistedComplex::assemble(graph.clone(), gens, BitMat::from_entries(n, n, entries))
}

/// A point-base complex split into its bars.
#[derive(Clone, Debug)]
pub struct Decomposition<S> {
    pub barcode: Barcode<S>,
    /// `cone_tower_from_barcode` of `barcode` at the point.
    pub tower: TwistedComplex<S>,
    /// Certificate at shifts `(0, 0)` from the input to `tower`.
    pub certificate: Certificate<S>,
}

struct Pair {
    birth: usize,
    death: usize,
}

/// Persistence reduction of a point-base complex.
pub fn gabriel_decompose<S: Scalar>(c: &TwistedComplex<S>) -> Result<Decomposition<S>, TwistedError> {
    if !is_point_base(c.graph()) {
        return Err(TameError::Malformed { location: "base".into(), reason: "not a point".into() }.into());
    }
    let n = c.len();
    let level = |k: usize| c.gens()[k].fun.value_at(&GraphPoint::Vertex(0)).finite().expect("nonempty generator").clone();
    let levels: Vec<S> = (0..n).map(level).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| cmp(&levels[x], &levels[y]).then(c.gens()[x].deg.cmp(&c.gens()[y].deg)));
    // Homological boundary in sorted coordinates: column q has its row p when
    // δ sends order[p] to order[q]; always p < q.
    let mut r: Vec<BitVec> = (0..n)
        .map(|q| BitVec::from_indices(n, (0..n).filter(|&p| c.diff().get(order[q], order[p]))))
        .collect();
    let mut v: Vec<BitVec> = (0..n).map(|q| BitVec::unit(n, q)).collect();
    let mut low_owner: HashMap<usize, usize> = HashMap::new();
    for q in 0..n {
        while let Some(l) = r[q].ones().last() {
            match low_owner.get(&l) {
                Some(&p) => {
                    let (rp, vp) = (r[p].clone(), v[p].clone());
                    r[q].xor_assign(&rp);
                    v[q].xor_assign(&vp);
                }
                None => {
                    low_owner.insert(l, q);
                    break;
                }
            }
        }
    }
    let mut pairs: Vec<Pair> = low_owner.iter().map(|(&l, &q)| Pair { birth: l, death: q }).collect();
    pairs.sort_by_key(|p| p.death);
    let essential: Vec<usize> = (0..n).filter(|&k| r[k].is_zero() && !low_owner.contains_key(&k)).collect();

    let lv = |p: usize| &levels[order[p]];
    let dg = |p: usize| c.gens()[order[p]].deg;
    // (bar, basis columns in sorted coordinates)
    let mut kept: Vec<(Bar<S>, Vec<BitVec>)> = Vec::new();
    let mut dropped: Vec<Pair> = Vec::new();
    for p in pairs {
        if lv(p.birth) == lv(p.death) {
            dropped.push(p);
        } else {
            let bar = Bar::new(lv(p.birth).clone(), Ext::Finite(lv(p.death).clone()), dg(p.death));
            kept.push((bar, vec![r[p.death].clone(), v[p.death].clone()]));
        }
    }
    for k in essential {
        kept.push((Bar::new(lv(k).clone(), Ext::Inf, dg(k)), vec![v[k].clone()]));
    }
    kept.sort_by(|x, y| bar_order(&x.0, &y.0));
    let m: usize = kept.iter().map(|k| k.1.len()).sum();
    let mut cols: Vec<BitVec> = kept.iter().flat_map(|k| k.1.iter().cloned()).collect();
    let mut kill = Vec::new();
    for p in &dropped {
        cols.push(r[p.death].clone());
        cols.push(v[p.death].clone());
        kill.push((cols.len() - 2, cols.len() - 1));
    }
    // Rows back to input order.
    let mut inv = vec![0; n];
    for (p, &k) in order.iter().enumerate() {
        inv[k] = p;
    }
    let q_sorted = BitMat::from_columns(n, &cols);
    let q_input = q_sorted.select(&inv, &(0..n).collect::<Vec<_>>());
    let psi = q_input.transpose();
    let psi_inv = psi.inverse().expect("unitriangular change of basis");
    let keep_idx: Vec<usize> = (0..m).collect();
    let all: Vec<usize> = (0..n).collect();
    let u = psi.select(&keep_idx, &all);
    let v_map = psi_inv.select(&all, &keep_idx);
    let k = BitMat::from_entries(n, n, kill);
    let h_f = psi_inv.mul(&k).mul(&psi);
    let barcode = Barcode { bars: kept.into_iter().map(|k| k.0).collect() };
    let tower = cone_tower_from_barcode(c.graph(), &barcode, &GraphPoint::Vertex(0));
    let certificate = Certificate { a: S::zero(), b: S::zero(), u, v: v_map, h_f, h_g: BitMat::zeros(m, m) };
    debug_assert!(certificate.verify(c, &tower).is_ok(), "decomposition certificate fails");
    Ok(Decomposition { barcode, tower, certificate })
}

fn bar_cost<S: Scalar>(x: &Bar<S>, y: &Bar<S>) -> Ext<S> {
    let db = (x.birth.clone() - y.birth.clone()).abs();
    match (&x.death, &y.death) {
        (Ext::Inf, Ext::Inf) => Ext::Finite(db),
        (Ext::Finite(p), Ext::Finite(q)) => {
            let dd = (p.clone() - q.clone()).abs();
            Ext::Finite(if dd > db { dd } else { db })
        }
        _ => Ext::Inf,
    }
}

/// Kuhn augmenting paths on an adjacency list.
fn perfect_matching(adj: &[Vec<usize>], right: usize) -> bool {
    fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &w in &adj[u] {
            if !seen[w] {
                seen[w] = true;
                if owner[w].is_none_or(|o| augment(o, adj, seen, owner)) {
                    owner[w] = Some(u);
                    return true;
                }
            }
        }
        false
    }
    let mut owner = vec![None; right];
    (0..adj.len()).all(|u| augment(u, adj, &mut vec![false; right], &mut owner))
}

fn feasible<S: Scalar>(xs: &[&Bar<S>], ys: &[&Bar<S>], delta: &S) -> bool {
    let (n, m) = (xs.len(), ys.len());
    let ok = |c: Ext<S>| c.finite().is_some_and(|c| c <= delta);
    // Left: xs then diagonal copies of ys. Right: ys then diagonal copies of xs.
    let mut adj = vec![Vec::new(); n + m];
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in ys.iter().enumerate() {
            if ok(bar_cost(x, y)) {
                adj[i].push(j);
            }
        }
        if ok(x.half_length()) {
            adj[i].push(m + i);
        }
    }
    for (j, y) in ys.iter().enumerate() {
        if ok(y.half_length()) {
            adj[n + j].push(j);
        }
        adj[n + j].extend((0..n).map(|i| m + i));
    }
    perfect_matching(&adj, n + m)
}

fn bottleneck_degree<S: Scalar>(xs: &[&Bar<S>], ys: &[&Bar<S>]) -> Ext<S> {
    let mut cands = vec![S::zero()];
    for x in xs {
        for y in ys {
            cands.extend(bar_cost(x, y).finite().cloned());
        }
    }
    cands.extend(xs.iter().chain(ys).filter_map(|b| b.half_length().finite().cloned()));
    cands.sort_by(cmp);
    cands.dedup();
    let (mut lo, mut hi) = (0, cands.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(xs, ys, &cands[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    cands.get(lo).map_or(Ext::Inf, |c| Ext::Finite(c.clone()))
}

/// Bottleneck distance, per degree, maximized over degrees.
pub fn bottleneck<S: Scalar>(b1: &Barcode<S>, b2: &Barcode<S>) -> Ext<S> {
    let mut degs: Vec<i64> = b1.degrees().into_iter().chain(b2.degrees()).collect();
    degs.sort_unstable();
    degs.dedup();
    degs.iter().map(|&d| bottleneck_degree(&b1.in_degree(d), &b2.in_degree(d))).fold(Ext::zero(), Ext::max)
}

/// `min_s 2·max(|s|, d_B(B1, B2 + s))`: the interleaving distance in sum
/// form between point-base complexes, where an asymmetric `(a, b)` pair is
/// a symmetric interleaving against a translate.
pub fn gamma_bottleneck<S: Scalar>(b1: &Barcode<S>, b2: &Barcode<S>) -> Ext<S> {
    let mut deltas = Vec::new();
    let mut halves = Vec::new();
    for x in b1.bars() {
        for y in b2.bars().iter().filter(|y| y.deg == x.deg) {
            deltas.push(x.birth.clone() - y.birth.clone());
            if let (Ext::Finite(p), Ext::Finite(q)) = (&x.death, &y.death) {
                deltas.push(p.clone() - q.clone());
            }
        }
    }
    for b in b1.bars().iter().chain(b2.bars()) {
        halves.extend(b.half_length().finite().cloned());
    }
    deltas.sort_by(cmp);
    deltas.dedup();
    halves.sort_by(cmp);
    halves.dedup();
    let mut cands = vec![S::zero()];
    for (i, d) in deltas.iter().enumerate() {
        cands.push(d.clone());
        cands.push(half(d));
        for e in &deltas[i + 1..] {
            cands.push(half(&(d.clone() + e.clone())));
        }
        for h in &halves {
            cands.push(d.clone() + h.clone());
            cands.push(d.clone() - h.clone());
        }
    }
    for h in &halves {
        cands.push(h.clone());
        cands.push(-h.clone());
    }
    cands.sort_by(|x, y| cmp(&x.abs(), &y.abs()).then_with(|| cmp(x, y)));
    cands.dedup();
    let mut best = Ext::Inf;
    for s in cands {
        let floor = Ext::Finite(s.abs() + s.abs());
        if floor >= best {
            break;
        }
        let d = bottleneck(b1, &b2.shifted(&s));
        let g = match d {
            Ext::Finite(d) => Ext::Finite(d.clone() + d).max(floor),
            Ext::Inf => Ext::Inf,
        };
        best = best.min(g);
    }
    best
}
