//! Interleavings, certificates and the interleaving distance.
//!
//! A certificate between `F` and `G` at shifts `(a, b)` consists of degree-0
//! chain maps `u: F → T_a G`, `v: G → T_b F` and degree −1 homotopies with
//! `v u + τ = D(h_F)` and `u v + τ = D(h_G)`, where `D(h) = δh + hδ` and the
//! τ-maps are identity matrices.

use rayon::prelude::*;
use thiserror::Error;

use crate::barcode::{gamma_bottleneck, stalk_complex, Barcode};
use crate::gf2::{BitMat, BitVec, ColumnSolver};
use crate::graph::GraphPoint;
use crate::scalar::{Ext, Scalar, Threshold};
use crate::tamefn::TameError;
use crate::twisted::{check_entries, hom_differential, thresholds, HomComplex, TwistedComplex, TwistedError};

/// Default cap on the number of enumerated cohomology classes.
pub const DEFAULT_CAP: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertError {
    #[error(transparent)]
    Twisted(#[from] TwistedError),
    #[error("negative shift")]
    NegativeShift,
    #[error("{map}: {source}")]
    Map { map: &'static str, source: TwistedError },
    #[error("{0} is not a chain map")]
    NotChainMap(&'static str),
    #[error("{0} does not witness the homotopy to τ")]
    Homotopy(&'static str),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate<S> {
    pub a: S,
    pub b: S,
    pub u: BitMat,
    pub v: BitMat,
    pub h_f: BitMat,
    pub h_g: BitMat,
}

impl<S: Scalar> Certificate<S> {
    pub fn total(&self) -> S {
        self.a.clone() + self.b.clone()
    }

    /// Replays every condition from scratch.
    pub fn verify(&self, f: &TwistedComplex<S>, g: &TwistedComplex<S>) -> Result<(), CertError> {
        if self.a.is_negative() || self.b.is_negative() {
            return Err(CertError::NegativeShift);
        }
        let ab = self.total();
        let wrap = |map: &'static str| move |source| CertError::Map { map, source };
        check_entries(f, g, &self.a, 0, &self.u).map_err(wrap("u"))?;
        check_entries(g, f, &self.b, 0, &self.v).map_err(wrap("v"))?;
        check_entries(f, f, &ab, -1, &self.h_f).map_err(wrap("h_F"))?;
        check_entries(g, g, &ab, -1, &self.h_g).map_err(wrap("h_G"))?;
        if !hom_differential(f, g, &self.u).is_zero() {
            return Err(CertError::NotChainMap("u"));
        }
        if !hom_differential(g, f, &self.v).is_zero() {
            return Err(CertError::NotChainMap("v"));
        }
        if self.v.mul(&self.u).add(&BitMat::identity(f.len())) != hom_differential(f, f, &self.h_f) {
            return Err(CertError::Homotopy("h_F"));
        }
        if self.u.mul(&self.v).add(&BitMat::identity(g.len())) != hom_differential(g, g, &self.h_g) {
            return Err(CertError::Homotopy("h_G"));
        }
        Ok(())
    }

    pub fn identity(n: usize) -> Self {
        Certificate {
            a: S::zero(),
            b: S::zero(),
            u: BitMat::identity(n),
            v: BitMat::identity(n),
            h_f: BitMat::zeros(n, n),
            h_g: BitMat::zeros(n, n),
        }
    }

    /// The same data read as a certificate from `G` to `F`.
    pub fn reverse(&self) -> Self {
        Certificate {
            a: self.b.clone(),
            b: self.a.clone(),
            u: self.v.clone(),
            v: self.u.clone(),
            h_f: self.h_g.clone(),
            h_g: self.h_f.clone(),
        }
    }

    /// `self: F ↔ G` followed by `next: G ↔ H`.
    pub fn compose(&self, next: &Certificate<S>) -> Self {
        Certificate {
            a: self.a.clone() + next.a.clone(),
            b: self.b.clone() + next.b.clone(),
            u: next.u.mul(&self.u),
            v: self.v.mul(&next.v),
            h_f: self.h_f.add(&self.v.mul(&next.h_f).mul(&self.u)),
            h_g: next.h_g.add(&next.u.mul(&self.h_g).mul(&next.v)),
        }
    }

    /// Block-diagonal certificate between direct sums.
    pub fn sum(parts: &[&Certificate<S>]) -> Self {
        let pick = |sel: fn(&Certificate<S>) -> &BitMat| -> BitMat {
            BitMat::block_diag(&parts.iter().map(|c| sel(c)).collect::<Vec<_>>())
        };
        let max = |sel: fn(&Certificate<S>) -> &S| -> S {
            parts.iter().map(|c| sel(c).clone()).fold(S::zero(), |m, x| if x > m { x } else { m })
        };
        Certificate {
            a: max(|c| &c.a),
            b: max(|c| &c.b),
            u: pick(|c| &c.u),
            v: pick(|c| &c.v),
            h_f: pick(|c| &c.h_f),
            h_g: pick(|c| &c.h_g),
        }
    }

    /// Same maps read at larger shifts.
    pub fn widen(&self, a: S, b: S) -> Self {
        debug_assert!(a >= self.a && b >= self.b);
        Certificate { a, b, ..self.clone() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Decision<S> {
    Feasible(Certificate<S>),
    Infeasible,
    Undecided,
}

/// Threshold tables shared by every decision between a fixed pair.
pub struct Interleaver<'a, S> {
    f: &'a TwistedComplex<S>,
    g: &'a TwistedComplex<S>,
    fg: Vec<Vec<Threshold<S>>>,
    gf: Vec<Vec<Threshold<S>>>,
    ff: Vec<Vec<Threshold<S>>>,
    gg: Vec<Vec<Threshold<S>>>,
    cap: u64,
}

fn pattern<S: Scalar>(thr: &[Vec<Threshold<S>>], cols: usize, c: &S) -> BitMat {
    crate::twisted::allowed_at(thr, cols, c)
}

fn clipped<S: Scalar>(thr: &[Vec<Threshold<S>>]) -> Vec<S> {
    let mut v: Vec<S> = thr.iter().flatten().filter_map(Threshold::clipped).collect();
    v.push(S::zero());
    sort_unique(v)
}

fn sort_unique<S: Scalar>(mut v: Vec<S>) -> Vec<S> {
    v.sort_by(crate::scalar::cmp);
    v.dedup();
    v
}

impl<'a, S: Scalar> Interleaver<'a, S> {
    pub fn new(f: &'a TwistedComplex<S>, g: &'a TwistedComplex<S>, cap: u64) -> Result<Self, TwistedError> {
        Ok(Interleaver {
            f,
            g,
            fg: thresholds(f, g)?,
            gf: thresholds(g, f)?,
            ff: thresholds(f, f)?,
            gg: thresholds(g, g)?,
            cap,
        })
    }

    /// Clipped thresholds for `u`, for `v`, and for the homotopies.
    pub fn shift_sets(&self) -> (Vec<S>, Vec<S>, Vec<S>) {
        let mut s = clipped(&self.ff);
        s.extend(clipped(&self.gg));
        (clipped(&self.fg), clipped(&self.gf), sort_unique(s))
    }

    /// Decides whether an interleaving exists at `(a, b)`.
    pub fn decide(&self, a: &S, b: &S) -> Decision<S> {
        let (f, g) = (self.f, self.g);
        let ab = a.clone() + b.clone();
        let hfg = HomComplex::new(f, g, pattern(&self.fg, f.len(), a));
        let hgf = HomComplex::new(g, f, pattern(&self.gf, g.len(), b));
        let hff = HomComplex::new(f, f, pattern(&self.ff, f.len(), &ab));
        let hgg = HomComplex::new(g, g, pattern(&self.gg, g.len(), &ab));
        let qfg = hfg.cohomology(0);
        let qgf = hgf.cohomology(0);
        let qff = hff.cohomology(0);
        let qgg = hgg.cohomology(0);
        let zs: Vec<BitMat> = qfg.reps().iter().map(|z| hfg.to_mat(0, z)).collect();
        let ws: Vec<BitMat> = qgf.reps().iter().map(|w| hgf.to_mat(0, w)).collect();
        let coords = |h: &HomComplex, q: &crate::gf2::Quotient, m: &BitMat| -> BitVec {
            q.coords(&h.to_vec(0, m).expect("composite of allowed maps is allowed")).expect("composite of cycles is a cycle")
        };
        let t_f = coords(&hff, &qff, &BitMat::identity(f.len()));
        let t_g = coords(&hgg, &qgg, &BitMat::identity(g.len()));
        // nf[k][l] = [w_k z_l] in H^0(F, T_{a+b} F); ng[k][l] = [z_l w_k].
        let nf: Vec<Vec<BitVec>> = ws.iter().map(|w| zs.iter().map(|z| coords(&hff, &qff, &w.mul(z))).collect()).collect();
        let ng: Vec<Vec<BitVec>> = ws.iter().map(|w| zs.iter().map(|z| coords(&hgg, &qgg, &z.mul(w))).collect()).collect();
        let (p, q) = (zs.len(), ws.len());
        // Enumerate the smaller side; the other side enters linearly.
        let enum_z = p <= q;
        let free = if enum_z { p } else { q };
        let total: u128 = 1u128 << free.min(127);
        let limit = total.min(self.cap as u128);
        let rhs = t_f.concat(&t_g);
        for mask in 0..limit {
            let chosen = BitVec::from_indices(free, (0..free).filter(|i| mask >> i & 1 == 1));
            let other = if enum_z { q } else { p };
            let mut cols = Vec::with_capacity(other);
            for o in 0..other {
                let mut cf = BitVec::zeros(t_f.len());
                let mut cg = BitVec::zeros(t_g.len());
                for e in chosen.ones() {
                    let (k, l) = if enum_z { (o, e) } else { (e, o) };
                    cf.xor_assign(&nf[k][l]);
                    cg.xor_assign(&ng[k][l]);
                }
                cols.push(cf.concat(&cg));
            }
            let sys = BitMat::from_columns(rhs.len(), &cols);
            let Some(sol) = ColumnSolver::new(&sys).solve(&rhs) else { continue };
            let (x, y) = if enum_z { (chosen, sol) } else { (sol, chosen) };
            let u = combine(&zs, &x, g.len(), f.len());
            let v = combine(&ws, &y, f.len(), g.len());
            let h_f = hff.solve_boundary(0, &v.mul(&u).add(&BitMat::identity(f.len())));
            let h_g = hgg.solve_boundary(0, &u.mul(&v).add(&BitMat::identity(g.len())));
            let (Some(h_f), Some(h_g)) = (h_f, h_g) else {
                unreachable!("cohomology coordinates vanish but no homotopy found")
            };
            return Decision::Feasible(Certificate { a: a.clone(), b: b.clone(), u, v, h_f, h_g });
        }
        if limit < total {
            Decision::Undecided
        } else {
            Decision::Infeasible
        }
    }
}

fn combine(basis: &[BitMat], coeffs: &BitVec, rows: usize, cols: usize) -> BitMat {
    coeffs.ones().fold(BitMat::zeros(rows, cols), |m, i| m.add(&basis[i]))
}

/// Decides the existence of an interleaving at `(a, b)`.
pub fn check_interleaving<S: Scalar>(
    f: &TwistedComplex<S>,
    g: &TwistedComplex<S>,
    a: &S,
    b: &S,
    cap: u64,
) -> Result<Decision<S>, TwistedError> {
    assert!(!a.is_negative() && !b.is_negative(), "shifts must be nonnegative");
    Ok(Interleaver::new(f, g, cap)?.decide(a, b))
}

/// Every nonnegative value at which some allowed-hom pattern changes.
pub fn critical_shifts<S: Scalar>(f: &TwistedComplex<S>, g: &TwistedComplex<S>) -> Result<Vec<S>, TwistedError> {
    let (a, b, s) = Interleaver::new(f, g, 0)?.shift_sets();
    Ok(sort_unique(a.into_iter().chain(b).chain(s).collect()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Bounds,
}

/// Stalk barcodes used for a lower bound.
#[derive(Clone, Debug, PartialEq)]
pub struct StalkBound<S> {
    pub point: GraphPoint<S>,
    pub f_bars: Barcode<S>,
    pub g_bars: Barcode<S>,
    pub value: Ext<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistanceResult<S> {
    pub mode: Mode,
    pub lower: Ext<S>,
    pub upper: Ext<S>,
    /// Certificate attaining `upper` when it is finite.
    pub certificate: Option<Certificate<S>>,
    /// Largest candidate total proved infeasible.
    pub infeasible_below: Option<S>,
    pub stalks: Vec<StalkBound<S>>,
    /// Some cell hit the enumeration cap.
    pub undecided: bool,
}

impl<S: Scalar> DistanceResult<S> {
    pub fn value(&self) -> Option<&Ext<S>> {
        (self.mode == Mode::Exact).then_some(&self.upper)
    }
}

enum Level<S> {
    Feasible(Certificate<S>),
    Infeasible,
    Undecided,
}

struct Search<S> {
    upper: Option<Certificate<S>>,
    infeasible: Option<usize>,
    undecided: bool,
}

impl<'a, S: Scalar> Interleaver<'a, S> {
    /// Tests every `(a, σ − a)` with `a` a `u`-threshold; these dominate all
    /// other splits of `σ`.
    fn level(&self, us: &[S], sigma: &S) -> Level<S> {
        let cells: Vec<&S> = us.iter().filter(|a| *a <= sigma).collect();
        let results: Vec<Decision<S>> = cells.par_iter().map(|a| self.decide(a, &(sigma.clone() - (*a).clone()))).collect();
        let mut undecided = false;
        for r in results {
            match r {
                Decision::Feasible(c) => return Level::Feasible(c),
                Decision::Undecided => undecided = true,
                Decision::Infeasible => {}
            }
        }
        if undecided {
            Level::Undecided
        } else {
            Level::Infeasible
        }
    }

    /// Binary search over candidate totals, spending at most `budget` levels.
    /// `known` is a total already known to be feasible.
    fn search(&self, budget: usize, known: Option<&S>) -> (Vec<S>, Search<S>) {
        let (us, vs, ss) = self.shift_sets();
        let mut sigmas: Vec<S> = ss;
        for a in &us {
            for b in &vs {
                sigmas.push(a.clone() + b.clone());
            }
        }
        let sigmas = sort_unique(sigmas);
        let top = sigmas.len() - 1;
        let mut st = Search { upper: None, infeasible: None, undecided: false };
        let mut spent = 0;
        // Feasibility anywhere implies feasibility at the top candidate, where
        // every pattern is maximal.
        let mut hi = match known {
            Some(t) => sigmas.iter().rposition(|s| s <= t).unwrap_or(0),
            None => {
                if budget == 0 {
                    return (sigmas, st);
                }
                spent += 1;
                match self.level(&us, &sigmas[top]) {
                    Level::Feasible(c) => st.upper = Some(c),
                    Level::Infeasible => st.infeasible = Some(top),
                    Level::Undecided => st.undecided = true,
                }
                if st.upper.is_none() {
                    return (sigmas, st);
                }
                top
            }
        };
        let mut lo = 0;
        while lo < hi {
            if spent >= budget {
                break;
            }
            spent += 1;
            let mid = (lo + hi) / 2;
            match self.level(&us, &sigmas[mid]) {
                Level::Feasible(c) => {
                    st.upper = Some(c);
                    hi = mid;
                }
                Level::Infeasible => {
                    st.infeasible = Some(mid);
                    lo = mid + 1;
                }
                Level::Undecided => {
                    st.undecided = true;
                    break;
                }
            }
        }
        (sigmas, st)
    }
}

fn assemble_result<S: Scalar>(sigmas: &[S], st: Search<S>, floor: Ext<S>, stalks: Vec<StalkBound<S>>) -> DistanceResult<S> {
    let upper = st.upper.as_ref().map_or(Ext::Inf, |c| Ext::Finite(c.total()));
    let search_lower = match st.infeasible {
        Some(i) if i + 1 < sigmas.len() => Ext::Finite(sigmas[i + 1].clone()),
        Some(_) => Ext::Inf,
        None => Ext::zero(),
    };
    let lower = search_lower.max(floor).min(upper.clone());
    let mode = if lower == upper { Mode::Exact } else { Mode::Bounds };
    DistanceResult {
        mode,
        lower,
        upper,
        certificate: st.upper,
        infeasible_below: st.infeasible.map(|i| sigmas[i].clone()),
        stalks,
        undecided: st.undecided,
    }
}

/// Exact interleaving distance by monotone search over candidate totals.
pub fn distance_exact<S: Scalar>(f: &TwistedComplex<S>, g: &TwistedComplex<S>, cap: u64) -> Result<DistanceResult<S>, TwistedError> {
    let il = Interleaver::new(f, g, cap)?;
    let (sigmas, st) = il.search(usize::MAX, None);
    Ok(assemble_result(&sigmas, st, Ext::zero(), Vec::new()))
}

/// Stalk barcodes at `x` and their shift-optimized bottleneck value.
pub fn stalk_bound<S: Scalar>(f: &TwistedComplex<S>, g: &TwistedComplex<S>, x: &GraphPoint<S>) -> Result<StalkBound<S>, TwistedError> {
    let f_bars = crate::barcode::gabriel_decompose(&stalk_complex(f, x)?)?.barcode;
    let g_bars = crate::barcode::gabriel_decompose(&stalk_complex(g, x)?)?.barcode;
    let value = gamma_bottleneck(&f_bars, &g_bars);
    Ok(StalkBound { point: x.clone(), f_bars, g_bars, value })
}

/// Sandwich bounds: stalk lower bound, and the best certificate found within
/// `budget` search levels (or the supplied hint).
pub fn distance_bounds<S: Scalar>(
    f: &TwistedComplex<S>,
    g: &TwistedComplex<S>,
    samples: &[GraphPoint<S>],
    cap: u64,
    budget: usize,
    hint: Option<&Certificate<S>>,
) -> Result<DistanceResult<S>, TwistedError> {
    let stalks: Result<Vec<_>, _> = samples.par_iter().map(|x| stalk_bound(f, g, x)).collect();
    let stalks = stalks?;
    let floor = stalks.iter().map(|s| s.value.clone()).fold(Ext::zero(), Ext::max);
    let hint = hint.filter(|c| c.verify(f, g).is_ok());
    let (sigmas, mut st) = if budget == 0 {
        (Vec::new(), Search { upper: None, infeasible: None, undecided: false })
    } else {
        Interleaver::new(f, g, cap)?.search(budget, hint.map(|c| c.total()).as_ref())
    };
    if let Some(h) = hint {
        if st.upper.as_ref().is_none_or(|c| c.total() > h.total()) {
            st.upper = Some(h.clone());
        }
    }
    Ok(assemble_result(&sigmas, st, floor, stalks))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TranslationKind {
    Tau,
    Wrapped,
}

/// Model of the wrapped translation: generator-wise `Λ_{c,r}` then `+c`.
pub fn wrapped_translate<S: Scalar>(c: &TwistedComplex<S>, shift: &S, r: &S) -> Result<TwistedComplex<S>, TwistedError> {
    for (i, g) in c.gens().iter().enumerate() {
        if !g.fun.is_lipschitz(r) {
            return Err(TameError::NonLipschitz(format!("generator {i}")).into());
        }
    }
    c.map_functions(|f| Ok(f.inf_convolution(Some(shift), r).translate(shift)))
}

/// Translation through either code path.
pub fn translate_by<S: Scalar>(kind: TranslationKind, c: &TwistedComplex<S>, shift: &S) -> Result<TwistedComplex<S>, TwistedError> {
    match kind {
        TranslationKind::Tau => Ok(c.translate(shift)),
        TranslationKind::Wrapped => wrapped_translate(c, shift, &S::one()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::twisted::point_complex;
    use crate::Rational;
    use std::sync::Arc;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn bar(a: i64) -> TwistedComplex<Rational> {
        point_complex(&[(q(a), 0)], BitMat::zeros(1, 1)).unwrap()
    }

    fn cone(g: &Arc<crate::MetricGraph<Rational>>, v: usize, a: i64) -> TwistedComplex<Rational> {
        let f = crate::TameFunction::distance_cone(g.clone(), &GraphPoint::Vertex(v), q(a), q(1));
        TwistedComplex::single(f, 0).unwrap()
    }

    #[test]
    fn interleaving_examples() {
        let (f, g) = (bar(0), bar(3));
        match check_interleaving(&f, &f, &q(0), &q(0), DEFAULT_CAP).unwrap() {
            Decision::Feasible(c) => {
                assert_eq!(c.u, BitMat::identity(1));
                c.verify(&f, &f).unwrap();
            }
            d => panic!("{d:?}"),
        }
        match check_interleaving(&f, &g, &q(0), &q(3), DEFAULT_CAP).unwrap() {
            Decision::Feasible(c) => c.verify(&f, &g).unwrap(),
            d => panic!("{d:?}"),
        }
        assert_eq!(check_interleaving(&f, &g, &q(0), &q(2), DEFAULT_CAP).unwrap(), Decision::Infeasible);
    }

    #[test]
    fn critical_shift_examples() {
        assert_eq!(critical_shifts(&bar(0), &bar(3)).unwrap(), vec![q(0), q(3)]);
        assert!(critical_shifts(&bar(2), &bar(2)).unwrap().contains(&q(0)));
        let g = Arc::new(crate::MetricGraph::path(&[q(1)]));
        assert_eq!(critical_shifts(&cone(&g, 0, 0), &cone(&g, 1, 0)).unwrap(), vec![q(0), q(1)]);
    }

    #[test]
    fn distance_examples() {
        let f = bar(0);
        assert_eq!(distance_exact(&f, &f, DEFAULT_CAP).unwrap().value(), Some(&Ext::Finite(q(0))));
        let r = distance_exact(&f, &bar(3), DEFAULT_CAP).unwrap();
        assert_eq!(r.value(), Some(&Ext::Finite(q(3))));
        r.certificate.unwrap().verify(&f, &bar(3)).unwrap();
        let g = Arc::new(crate::MetricGraph::path(&[q(1)]));
        let r = distance_exact(&cone(&g, 0, 0), &cone(&g, 1, 0), DEFAULT_CAP).unwrap();
        assert_eq!(r.value(), Some(&Ext::Finite(q(2))));
        let empty = TwistedComplex::empty(f.graph().clone());
        assert_eq!(distance_exact(&f, &empty, DEFAULT_CAP).unwrap().value(), Some(&Ext::Inf));
    }

    #[test]
    fn bounds_examples() {
        let f = bar(0);
        let pt = [GraphPoint::Vertex(0)];
        let r = distance_bounds(&f, &f, &pt, DEFAULT_CAP, usize::MAX, None).unwrap();
        assert_eq!((r.lower.clone(), r.upper.clone()), (Ext::zero(), Ext::zero()));
        let r = distance_bounds(&f, &bar(3), &pt, DEFAULT_CAP, usize::MAX, None).unwrap();
        assert_eq!((r.lower, r.upper), (Ext::Finite(q(3)), Ext::Finite(q(3))));
        let g = Arc::new(crate::MetricGraph::path(&[q(1)]));
        let (c0, c1) = (cone(&g, 0, 0), cone(&g, 0, 1));
        let pts = [GraphPoint::Vertex(0), GraphPoint::Vertex(1)];
        let r = distance_bounds(&c0, &c1, &pts, DEFAULT_CAP, usize::MAX, None).unwrap();
        assert_eq!((r.lower, r.upper), (Ext::Finite(q(1)), Ext::Finite(q(1))));
    }

    #[test]
    fn certificate_algebra() {
        let (f, g, h) = (bar(0), bar(1), bar(3));
        let c1 = match check_interleaving(&f, &g, &q(0), &q(1), DEFAULT_CAP).unwrap() {
            Decision::Feasible(c) => c,
            d => panic!("{d:?}"),
        };
        let c2 = match check_interleaving(&g, &h, &q(0), &q(2), DEFAULT_CAP).unwrap() {
            Decision::Feasible(c) => c,
            d => panic!("{d:?}"),
        };
        let c = c1.compose(&c2);
        c.verify(&f, &h).unwrap();
        assert_eq!(c.total(), q(3));
        c.reverse().verify(&h, &f).unwrap();
        let fs = TwistedComplex::direct_sum(f.graph().clone(), &[&f, &g]).unwrap();
        let gs = TwistedComplex::direct_sum(f.graph().clone(), &[&g, &h]).unwrap();
        Certificate::sum(&[&c1, &c2]).verify(&fs, &gs).unwrap();
        Certificate::<Rational>::identity(2).verify(&fs, &fs).unwrap();
        assert!(Certificate::<Rational>::identity(1).verify(&f, &g).is_err());
    }

    #[test]
    fn wrapped_translation_examples() {
        let g = Arc::new(crate::MetricGraph::path(&[q(1), q(2)]));
        let w = cone(&g, 1, 2);
        let t = wrapped_translate(&w, &q(3), &q(1)).unwrap();
        assert_eq!(t, cone(&g, 1, 5));
        assert_eq!(wrapped_translate(&w, &q(0), &q(1)).unwrap(), w);
        let sky = TwistedComplex::single(crate::TameFunction::skyscraper(g.clone(), &GraphPoint::Vertex(0), q(0)), 0).unwrap();
        assert!(wrapped_translate(&sky, &q(1), &q(1)).is_err());
        for c in [q(0), q(1), Rational::new(5.into(), 2.into())] {
            assert_eq!(translate_by(TranslationKind::Tau, &w, &c).unwrap(), translate_by(TranslationKind::Wrapped, &w, &c).unwrap());
        }
    }
}
