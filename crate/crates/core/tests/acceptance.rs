//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use conedensity::barcode::{cone_tower_from_barcode, gabriel_decompose, gamma_bottleneck, stalk_complex};
use conedensity::cone_calculus::{replace_source, sum_certificates, transport_cone, transport_tower, ConeTower};
use conedensity::density::{densify, sample_points, w_distance, WGenerator};
use conedensity::interleave::{distance_bounds, distance_exact, stalk_bound, DEFAULT_CAP};
use conedensity::io;
use conedensity::twisted::{mapping_cone, TwistedComplex};
use conedensity::{Ext, GraphPoint, Rational};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn epsilon(r: &mut ChaCha8Rng) -> Rational {
    [q(1, 4), q(1, 2), int(1)][r.gen_range(0..3)].clone()
}

/// A random source complex: point base half of the time.
fn random_source(r: &mut ChaCha8Rng) -> Cx {
    if r.gen_bool(0.5) {
        random_point_complex(r, 4, 6).0
    } else {
        let g = random_graph(r);
        random_graph_complex(r, &g, 2)
    }
}

fn is_point(c: &Cx) -> bool {
    c.graph().edge_count() == 0 && c.graph().vertex_count() == 1
}

/// Measured distance never exceeds the certified one; exact on a point.
fn measured_within(f: &Cx, g: &Cx, cert: &conedensity::interleave::Certificate<Rational>) -> Result<(), String> {
    let total = Ext::Finite(cert.total());
    if is_point(f) {
        let d = distance_exact(f, g, DEFAULT_CAP).map_err(|e| e.to_string())?;
        if d.undecided {
            return Ok(());
        }
        ensure(d.upper <= total, || format!("exact distance {:?} above certified {}", d.upper, cert.total()))
    } else {
        let d = distance_bounds(f, g, &sample_points(f.graph()), DEFAULT_CAP, 2, Some(cert)).map_err(|e| e.to_string())?;
        ensure(d.lower <= d.upper && d.upper <= total, || format!("bounds [{:?}, {:?}] vs certified {}", d.lower, d.upper, cert.total()))
    }
}

fn isometry() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    for i in 0..100 {
        let (f, bf) = random_point_complex(&mut r, 12, 8);
        let (g, bg) = random_point_complex(&mut r, 12, 8);
        ensure(gabriel_decompose(&f).map_err(|e| e.to_string())?.barcode == bf, || format!("instance {i}: barcode of F not recovered"))?;
        let d = distance_exact(&f, &g, DEFAULT_CAP).map_err(|e| e.to_string())?;
        let oracle = gamma_bottleneck(&bf, &bg);
        ensure(!d.undecided && d.value() == Some(&oracle), || format!("instance {i}: exact {:?} vs barcode oracle {:?}", d.value(), oracle))?;
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(60), || format!("took {t:?}"))?;
    Ok(format!("100 instances, {t:.1?}"))
}

fn replace_source_bound() -> Outcome {
    let mut r = rng(2);
    let mut worst = int(0);
    for i in 0..200 {
        let eps = epsilon(&mut r);
        let f = random_source(&mut r);
        let (g, fmap) = random_target(&mut r, &f, 1);
        let (f2, cert_u) = planted_source(&mut r, &f, &eps);
        let t = replace_source(&f, &g, &fmap, &f2, &cert_u).map_err(|e| format!("instance {i}: {e}"))?;
        t.record.verify().map_err(|e| format!("instance {i}: {e}"))?;
        let total = t.record.certificate.total();
        ensure(total <= int(4) * eps.clone(), || format!("instance {i}: total {total} above 4·{eps}"))?;
        measured_within(&t.record.input, &t.record.output, &t.record.certificate).map_err(|e| format!("instance {i}: {e}"))?;
        let ratio = total / eps;
        if ratio > worst {
            worst = ratio;
        }
    }
    Ok(format!("200 instances, worst total/ε = {worst}"))
}

fn transport_bounds() -> Outcome {
    let mut r = rng(3);
    let (mut worst_cone, mut worst_tower) = (int(0), int(0));
    for i in 0..100 {
        let eps = epsilon(&mut r);
        let f = random_source(&mut r);
        let (g, fmap) = random_target(&mut r, &f, 1);
        let (f2, cf) = planted_source(&mut r, &f, &eps);
        let (g2, cg) = planted_source(&mut r, &g, &eps);
        let (cf, cg) = (cf.reverse(), cg.reverse());
        let t = transport_cone(&f, &g, &fmap, &f2, &g2, &cf, &cg).map_err(|e| format!("instance {i}: {e}"))?;
        t.record.verify().map_err(|e| format!("instance {i}: {e}"))?;
        let total = t.record.certificate.total();
        ensure(total <= int(8) * eps.clone(), || format!("instance {i}: cone total {total} above 8·{eps}"))?;
        let tower = ConeTower { base: f.clone(), stages: vec![(g.clone(), fmap.clone())] };
        let (_, rec) = transport_tower(&tower, &[(f2, cf), (g2, cg)]).map_err(|e| format!("instance {i}: {e}"))?;
        rec.verify().map_err(|e| format!("instance {i}: {e}"))?;
        let tt = rec.certificate.total();
        ensure(tt <= int(8) * eps.clone(), || format!("instance {i}: tower total {tt} above 8·{eps}"))?;
        worst_cone = worst_cone.max(total / eps.clone());
        worst_tower = worst_tower.max(tt / eps);
    }
    Ok(format!("100 towers, worst total/ε: cone {worst_cone}, tower {worst_tower}"))
}

fn sum_bound() -> Outcome {
    let mut r = rng(4);
    for i in 0..100 {
        let eps = epsilon(&mut r);
        let g = if r.gen_bool(0.5) { point() } else { random_graph(&mut r) };
        let blocks = r.gen_range(2..=4);
        let mut data = Vec::new();
        for _ in 0..blocks {
            let f = if is_point_graph(&g) { random_point_complex(&mut r, 4, 6).0 } else { random_graph_complex(&mut r, &g, 2) };
            let (f2, c) = planted_source(&mut r, &f, &eps);
            data.push((f2, f, c));
        }
        let pairs: Vec<_> = data.iter().map(|(a, b, c)| (a, b, c)).collect();
        let rec = sum_certificates(&pairs).map_err(|e| format!("instance {i}: {e}"))?;
        rec.verify().map_err(|e| format!("instance {i}: {e}"))?;
        let total = rec.certificate.total();
        ensure(total <= int(2) * eps.clone(), || format!("instance {i}: total {total} above 2·{eps}"))?;
    }
    Ok("100 sums".into())
}

fn is_point_graph(g: &G) -> bool {
    g.edge_count() == 0 && g.vertex_count() == 1
}

fn gabriel_round_trip() -> Outcome {
    let mut r = rng(5);
    let pt = point();
    for i in 0..200 {
        let b = random_barcode(&mut r, 10, 8);
        let tower = cone_tower_from_barcode(&pt, &b, &GraphPoint::Vertex(0));
        let back = gabriel_decompose(&tower).map_err(|e| e.to_string())?.barcode;
        ensure(back == b, || format!("instance {i}: tower round trip changed the barcode"))?;
        let scrambled = scramble(&mut r, &tower);
        let dec = gabriel_decompose(&scrambled).map_err(|e| e.to_string())?;
        ensure(dec.barcode == b, || format!("instance {i}: scrambled round trip changed the barcode"))?;
        dec.certificate.verify(&scrambled, &dec.tower).map_err(|e| format!("instance {i}: {e}"))?;
    }
    Ok("200 barcodes".into())
}

fn stalk_lower_bound() -> Outcome {
    let mut r = rng(6);
    let mut decided = 0;
    for i in 0..100 {
        let g = random_graph(&mut r);
        let f = random_graph_complex(&mut r, &g, 2);
        let h = random_graph_complex(&mut r, &g, 2);
        let d = distance_exact(&f, &h, DEFAULT_CAP).map_err(|e| e.to_string())?;
        if d.undecided {
            continue;
        }
        decided += 1;
        for x in sample_points(&g) {
            let s = stalk_bound(&f, &h, &x).map_err(|e| e.to_string())?;
            ensure(s.value <= d.upper, || format!("instance {i}: stalk bound {:?} at {x:?} above exact {:?}", s.value, d.upper))?;
        }
    }
    for i in 0..50 {
        let (f, _) = random_point_complex(&mut r, 8, 8);
        let (h, _) = random_point_complex(&mut r, 8, 8);
        let d = distance_exact(&f, &h, DEFAULT_CAP).map_err(|e| e.to_string())?;
        let s = stalk_bound(&f, &h, &GraphPoint::Vertex(0)).map_err(|e| e.to_string())?;
        ensure(Some(&s.value) == d.value(), || format!("point instance {i}: stalk {:?} vs exact {:?}", s.value, d.value()))?;
    }
    Ok(format!("{decided}/100 graph pairs decided, 50 point pairs equal"))
}

fn density() -> Outcome {
    let start = Instant::now();
    let corpus = corpus();
    let mut lines = Vec::new();
    for (name, f) in &corpus {
        for eps in [q(1, 4), q(1, 8)] {
            let bound = int(80) * eps.clone();
            let rep = densify(f, &eps).map_err(|e| format!("{name} at {eps}: {e}"))?;
            rep.verify().map_err(|e| format!("{name} at {eps}: {e}"))?;
            ensure(rep.layer_count() == 2, || format!("{name} at {eps}: {} layers", rep.layer_count()))?;
            let all_w = rep.output.gens().iter().all(|g| WGenerator::recognize(g).is_some());
            ensure(all_w, || format!("{name} at {eps}: output has a non-wrapped generator"))?;
            let total = rep.certificate.total();
            ensure(total <= bound, || format!("{name} at {eps}: certified {total} above {bound}"))?;
            ensure(rep.measured.upper <= Ext::Finite(bound.clone()), || format!("{name} at {eps}: measured upper {:?}", rep.measured.upper))?;
            lines.push(format!("{name}@{eps}: {total}"));
        }
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(300), || format!("took {t:?}"))?;
    Ok(format!("{} fixtures x 2 epsilons in {t:.1?} [{}]", corpus.len(), lines.join(", ")))
}

fn wrapped_geometry() -> Outcome {
    let mut r = rng(8);
    for i in 0..50 {
        let g = random_graph(&mut r);
        let (x, y) = (random_point_on(&mut r, &g), random_point_on(&mut r, &g));
        let (a, b) = (q(r.gen_range(0..8), 2), q(r.gen_range(0..8), 2));
        let d = distance_exact(&single(cone(&g, x.clone(), a.clone()), 0), &single(cone(&g, y.clone(), b.clone()), 0), DEFAULT_CAP)
            .map_err(|e| e.to_string())?;
        let closed = w_distance(&g, &x, &a, &y, &b);
        ensure(d.value() == Some(&Ext::Finite(closed.clone())), || format!("instance {i}: exact {:?} vs closed form {closed}", d.value()))?;
    }
    for i in 0..50 {
        let eps = if i % 2 == 0 { q(1, 2) } else { q(1, 4) };
        let g = random_graph(&mut r);
        let x = random_point_on(&mut r, &g);
        let y = loop {
            let y = random_point_on(&mut r, &g);
            if g.distance(&x, &y) < eps {
                break y;
            }
        };
        let a = q(r.gen_range(0..8), 4);
        let b = a.clone() + eps.clone() * q(r.gen_range(-7..=7), 8);
        let d = distance_exact(&single(cone(&g, x, a), 0), &single(cone(&g, y, b), 0), DEFAULT_CAP).map_err(|e| e.to_string())?;
        ensure(d.upper < Ext::Finite(int(2) * eps.clone()), || format!("near instance {i}: {:?} not below 2·{eps}", d.upper))?;
    }
    Ok("50 closed-form checks, 50 near pairs".into())
}

fn envelope_algebra() -> Outcome {
    let mut r = rng(9);
    let radii = [q(0, 1), q(1, 4), q(1, 2), int(1)];
    for i in 0..100 {
        let g = random_graph(&mut r);
        let f = random_tame(&mut r, &g, 0.2);
        let s1 = radii[r.gen_range(0..4)].clone();
        let s2 = radii[r.gen_range(0..4)].clone();
        let slope = if r.gen_bool(0.5) { int(1) } else { q(1, 2) };
        let twice = f.inf_convolution(Some(&s1), &slope).inf_convolution(Some(&s2), &slope);
        let once = f.inf_convolution(Some(&(s1.clone() + s2.clone())), &slope);
        ensure(twice == once, || format!("instance {i}: semigroup law fails for radii {s1}, {s2}"))?;
        let p = f.lipschitz_envelope(&int(1)).map_err(|e| e.to_string())?;
        ensure(p.lipschitz_envelope(&int(1)).map_err(|e| e.to_string())? == p, || format!("instance {i}: envelope not idempotent"))?;
    }
    Ok("100 functions".into())
}

fn suite_reports() -> Vec<String> {
    let mut out = Vec::new();
    for (name, f) in corpus().into_iter().filter(|(n, _)| ["p2-cone-pair", "p3-tent", "c6-zero"].contains(n)) {
        let rep = densify(&f, &q(1, 4)).unwrap_or_else(|e| panic!("{name}: {e}"));
        out.push(io::to_canonical_string(&io::emit_density_report(&rep, "conedensity verify report.json").unwrap()));
    }
    let mut r = rng(10);
    for _ in 0..5 {
        let (f, _) = random_point_complex(&mut r, 6, 6);
        let (g, _) = random_point_complex(&mut r, 6, 6);
        let d = distance_exact(&f, &g, DEFAULT_CAP).unwrap();
        out.push(io::to_canonical_string(&io::emit_distance_report(&f, &g, &d, "conedensity verify d.json").unwrap()));
    }
    let g = unit_cycle(3);
    let f = random_graph_complex(&mut r, &g, 2);
    let h = random_graph_complex(&mut r, &g, 2);
    let d = distance_bounds(&f, &h, &sample_points(&g), DEFAULT_CAP, 3, None).unwrap();
    out.push(io::to_canonical_string(&io::emit_distance_report(&f, &h, &d, "conedensity verify d.json").unwrap()));
    out
}

fn determinism() -> Outcome {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| e.to_string())?;
        Ok::<_, String>(pool.install(suite_reports))
    };
    let one = run(1)?;
    let four = run(4)?;
    ensure(one.len() == four.len(), || "different report counts".into())?;
    for (i, (a, b)) in one.iter().zip(&four).enumerate() {
        ensure(a == b, || format!("report {i} differs between 1 and 4 threads"))?;
    }
    let bytes: usize = one.iter().map(|s| s.len()).sum();
    Ok(format!("{} reports, {bytes} bytes identical", one.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("isometry on a point", isometry),
        ("source replacement within 4ε", replace_source_bound),
        ("cone and tower transport within 8ε", transport_bounds),
        ("sums within 2ε", sum_bound),
        ("barcode round trip", gabriel_round_trip),
        ("stalk lower bound", stalk_lower_bound),
        ("end-to-end density within 80ε", density),
        ("wrapped generator geometry", wrapped_geometry),
        ("envelope algebra", envelope_algebra),
        ("determinism across thread counts", determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", k + 1);
            }
        }
    }
    let _ = (mapping_cone::<Rational>, stalk_complex::<Rational>, TwistedComplex::<Rational>::empty);
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
