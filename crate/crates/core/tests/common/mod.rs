#![allow(dead_code)]

use std::sync::Arc;

use conedensity::barcode::{cone_tower_from_barcode, Bar, Barcode};
use conedensity::density::WGenerator;
use conedensity::gf2::BitMat;
use conedensity::interleave::Certificate;
use conedensity::tamefn::TameFunction;
use conedensity::twisted::{Generator, TwistedComplex};
use conedensity::{Ext, GraphPoint, MetricGraph, Rational};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Cx = TwistedComplex<Rational>;
pub type G = Arc<MetricGraph<Rational>>;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn int(n: i64) -> Rational {
    q(n, 1)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn point() -> G {
    Arc::new(MetricGraph::point())
}

pub fn path(lens: &[Rational]) -> G {
    Arc::new(MetricGraph::path(lens))
}

pub fn unit_path(edges: usize) -> G {
    path(&vec![int(1); edges])
}

pub fn unit_cycle(n: usize) -> G {
    Arc::new(MetricGraph::cycle(&vec![int(1); n]))
}

pub fn single(f: TameFunction<Rational>, deg: i64) -> Cx {
    TwistedComplex::single(f, deg).unwrap()
}

pub fn cone(g: &G, x: GraphPoint<Rational>, a: Rational) -> TameFunction<Rational> {
    WGenerator::new(x, a, 0).function(g)
}

/// Random barcode with at most `max_bars` bars, levels in `0..=top`.
pub fn random_barcode(r: &mut ChaCha8Rng, max_bars: usize, top: i64) -> Barcode<Rational> {
    let n = r.gen_range(0..=max_bars);
    let bars = (0..n)
        .map(|_| {
            let birth = r.gen_range(0..top);
            let deg = r.gen_range(-1..=1);
            if r.gen_bool(0.3) {
                Bar::new(int(birth), Ext::Inf, deg)
            } else {
                Bar::new(int(birth), Ext::Finite(int(r.gen_range(birth + 1..=top))), deg)
            }
        })
        .collect();
    Barcode::new(bars).unwrap()
}

/// Number of generators the tower of `b` uses.
pub fn tower_size(b: &Barcode<Rational>) -> usize {
    b.bars().iter().map(|x| if x.is_finite() { 2 } else { 1 }).sum()
}

/// Random barcode whose tower has at most `max_gens` generators.
pub fn random_barcode_gens(r: &mut ChaCha8Rng, max_gens: usize, top: i64) -> Barcode<Rational> {
    loop {
        let b = random_barcode(r, max_gens, top);
        if tower_size(&b) <= max_gens {
            return b;
        }
    }
}

/// Conjugates the differential by a random unitriangular filtered basis
/// change, scrambling the barcode structure without changing it.
pub fn scramble(r: &mut ChaCha8Rng, c: &Cx) -> Cx {
    let n = c.len();
    let mut p = BitMat::identity(n);
    for i in 0..n {
        for j in 0..i {
            let (gi, gj) = (&c.gens()[i], &c.gens()[j]);
            if gi.deg == gj.deg && gj.fun.pointwise_leq(&gi.fun).unwrap() && r.gen_bool(0.5) {
                p.set(i, j, true);
            }
        }
    }
    let pinv = p.inverse().expect("unitriangular");
    let d = p.mul(c.diff()).mul(&pinv);
    TwistedComplex::new(c.graph().clone(), c.gens().to_vec(), d).expect("conjugation keeps the complex valid")
}

/// A random point-base complex together with the barcode it was planted with.
pub fn random_point_complex(r: &mut ChaCha8Rng, max_gens: usize, top: i64) -> (Cx, Barcode<Rational>) {
    let b = random_barcode_gens(r, max_gens, top);
    let c = cone_tower_from_barcode(&point(), &b, &GraphPoint::Vertex(0));
    let mut order: Vec<usize> = (0..c.len()).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, r.gen_range(0..=i));
    }
    let shuffled = TwistedComplex::new(
        c.graph().clone(),
        order.iter().map(|&i| c.gens()[i].clone()).collect(),
        c.diff().select(&order, &order),
    )
    .unwrap();
    (scramble(r, &shuffled), b)
}

pub fn random_graph(r: &mut ChaCha8Rng) -> G {
    match r.gen_range(0..4) {
        0 => unit_path(1),
        1 => path(&[int(1), q(1, 2)]),
        2 => Arc::new(MetricGraph::cycle(&[int(1), int(1), int(1)])),
        _ => unit_path(3),
    }
}

pub fn random_point_on(r: &mut ChaCha8Rng, g: &MetricGraph<Rational>) -> GraphPoint<Rational> {
    if g.edge_count() == 0 || r.gen_bool(0.5) {
        return GraphPoint::Vertex(r.gen_range(0..g.vertex_count()));
    }
    let e = r.gen_range(0..g.edge_count());
    let t = q(r.gen_range(1..4), 4) * g.edge(e).len.clone();
    g.point_on_edge(e, t).unwrap()
}

/// Random continuous piecewise-linear function; infinite values appear
/// with probability `p_inf` at vertices.
pub fn random_tame(r: &mut ChaCha8Rng, g: &G, p_inf: f64) -> TameFunction<Rational> {
    loop {
        let vertex: Vec<Ext<Rational>> =
            (0..g.vertex_count()).map(|_| if r.gen_bool(p_inf) { Ext::Inf } else { Ext::Finite(q(r.gen_range(0..9), 2)) }).collect();
        let interior = g
            .edges()
            .iter()
            .map(|e| {
                let k = r.gen_range(0..3);
                let mut ts: Vec<i64> = (0..k).map(|_| r.gen_range(1..8)).collect();
                ts.sort_unstable();
                ts.dedup();
                ts.into_iter().map(|t| (q(t, 8) * e.len.clone(), Ext::Finite(q(r.gen_range(0..9), 2)))).collect()
            })
            .collect();
        let f = TameFunction::from_breakpoints(g.clone(), vertex, interior).unwrap();
        if !f.is_identically_inf() {
            return f;
        }
    }
}

/// A random generator: a cone, a shifted constant or a skyscraper.
pub fn random_generator_fn(r: &mut ChaCha8Rng, g: &G) -> TameFunction<Rational> {
    let a = q(r.gen_range(0..6), 2);
    match r.gen_range(0..3) {
        0 => cone(g, random_point_on(r, g), a),
        1 => TameFunction::constant(g.clone(), a),
        _ => TameFunction::skyscraper(g.clone(), &random_point_on(r, g), a),
    }
}

/// Direct sum of singles and contractible-free pairs `x → y` with `x ≤ y`,
/// then scrambled.
pub fn random_graph_complex(r: &mut ChaCha8Rng, g: &G, max_blocks: usize) -> Cx {
    let blocks = r.gen_range(1..=max_blocks);
    let mut parts = Vec::new();
    for _ in 0..blocks {
        let x = random_generator_fn(r, g);
        let deg = r.gen_range(0..=1);
        if r.gen_bool(0.4) {
            let y = match r.gen_range(0..2) {
                0 => x.translate(&q(r.gen_range(1..4), 2)),
                _ => TameFunction::constant(g.clone(), int(100)).translate(&int(0)),
            };
            let y = if x.pointwise_leq(&y).unwrap() { y } else { x.translate(&int(1)) };
            parts.push(
                TwistedComplex::new(g.clone(), vec![Generator::new(x, deg - 1), Generator::new(y, deg)], BitMat::from_entries(2, 2, [(1, 0)]))
                    .unwrap(),
            );
        } else {
            parts.push(single(x, deg));
        }
    }
    let refs: Vec<&Cx> = parts.iter().collect();
    let c = TwistedComplex::direct_sum(g.clone(), &refs).unwrap();
    scramble(r, &c)
}

/// `F′ = T_{−t} F` with the identity certificate `F′ ↔ F` at `(0, t)`.
pub fn planted_translate(c: &Cx, t: &Rational) -> (Cx, Certificate<Rational>) {
    let n = c.len();
    let lowered = c.translate(&-t.clone());
    let cert = Certificate { a: int(0), b: t.clone(), u: BitMat::identity(n), v: BitMat::identity(n), h_f: BitMat::zeros(n, n), h_g: BitMat::zeros(n, n) };
    (lowered, cert)
}

/// `F′ = F ⊕ (x → y)` with a short acyclic pair of length `delta`, and the
/// projection/inclusion certificate `F′ ↔ F` at `(0, delta)`.
pub fn planted_pair(r: &mut ChaCha8Rng, c: &Cx, delta: &Rational) -> (Cx, Certificate<Rational>) {
    let g = c.graph().clone();
    let x = random_generator_fn(r, &g);
    let y = x.translate(delta);
    let deg = r.gen_range(0..=1);
    let pair = TwistedComplex::new(g.clone(), vec![Generator::new(x, deg - 1), Generator::new(y, deg)], BitMat::from_entries(2, 2, [(1, 0)])).unwrap();
    let bigger = TwistedComplex::direct_sum(g, &[c, &pair]).unwrap();
    let n = c.len();
    let u = BitMat::from_entries(n, n + 2, (0..n).map(|i| (i, i)));
    let v = BitMat::from_entries(n + 2, n, (0..n).map(|i| (i, i)));
    let h_f = BitMat::from_entries(n + 2, n + 2, [(n, n + 1)]);
    let cert = Certificate { a: int(0), b: delta.clone(), u, v, h_f, h_g: BitMat::zeros(n, n) };
    (bigger, cert)
}

/// A random `F′ ↔ F` certificate at `(0, b)` with `b ≤ eps`.
pub fn planted_source(r: &mut ChaCha8Rng, c: &Cx, eps: &Rational) -> (Cx, Certificate<Rational>) {
    let steps = r.gen_range(1..=4);
    let t = eps.clone() * q(r.gen_range(0..=steps), steps);
    if r.gen_bool(0.5) {
        planted_translate(c, &t)
    } else {
        let delta = if t == int(0) { eps.clone() } else { t };
        planted_pair(r, c, &delta)
    }
}

/// A degree-0 chain map `F → G` with `G = T_t F ⊕ R`.
pub fn random_target(r: &mut ChaCha8Rng, f: &Cx, extra_blocks: usize) -> (Cx, BitMat) {
    let g = f.graph().clone();
    let t = q(r.gen_range(0..3), 2);
    let rest = random_graph_complex(r, &g, extra_blocks.max(1));
    let target = TwistedComplex::direct_sum(g, &[&f.translate(&t), &rest]).unwrap();
    let n = f.len();
    (target, BitMat::from_entries(n + rest.len(), n, (0..n).map(|i| (i, i))))
}

/// 1-Lipschitz fixtures on path graphs and the unit hexagon.
pub fn corpus() -> Vec<(&'static str, Cx)> {
    let mut out = Vec::new();
    let p2 = unit_path(1);
    let p3 = unit_path(2);
    let p4 = path(&[int(1), q(1, 2), int(1)]);
    let c6 = unit_cycle(6);
    let zero = |g: &G| TameFunction::constant(g.clone(), int(0));
    let v = GraphPoint::Vertex;
    out.push(("p2-zero", single(zero(&p2), 0)));
    out.push(("p2-cone", single(cone(&p2, v(0), int(0)), 0)));
    let pair = |g: &G, lo: TameFunction<Rational>, hi: TameFunction<Rational>| {
        TwistedComplex::new(g.clone(), vec![Generator::new(lo, 0), Generator::new(hi, 1)], BitMat::from_entries(2, 2, [(1, 0)])).unwrap()
    };
    out.push(("p2-cone-pair", pair(&p2, zero(&p2), cone(&p2, v(1), int(0)))));
    out.push(("p3-zero", single(zero(&p3), 0)));
    let tent = TameFunction::from_breakpoints(p3.clone(), vec![Ext::Finite(int(0)), Ext::Finite(q(1, 2)), Ext::Finite(int(0))], vec![vec![], vec![]]).unwrap();
    out.push(("p3-tent", single(tent, 0)));
    out.push(("p3-midpoint-cone", single(cone(&p3, p3.midpoint(1), int(1)), 0)));
    let sum = TwistedComplex::direct_sum(p4.clone(), &[&single(zero(&p4), 0), &single(cone(&p4, v(3), int(1)), 1)]).unwrap();
    out.push(("p4-sum", sum));
    out.push(("c6-zero", single(zero(&c6), 0)));
    out.push(("c6-cone", single(cone(&c6, v(0), int(0)), 0)));
    let saw = TameFunction::from_breakpoints(
        c6.clone(),
        (0..6).map(|i| Ext::Finite(if i % 2 == 0 { int(0) } else { q(1, 2) })).collect(),
        vec![vec![]; 6],
    )
    .unwrap();
    out.push(("c6-sawtooth", single(saw, 0)));
    let half = TameFunction::from_breakpoints(
        c6.clone(),
        [0, 1, 2, 3, 2, 1].iter().map(|&k| Ext::Finite(q(k, 2))).collect(),
        vec![vec![]; 6],
    )
    .unwrap();
    out.push(("c6-half-slope", single(half, 0)));
    out.push(("c6-cone-pair", pair(&c6, zero(&c6), cone(&c6, v(3), int(0)))));
    out
}
