//! Twisted complexes of epigraph generators over GF(2).
//!
//! The hom space between two generators is one-dimensional when the source
//! function lies below the target function and zero otherwise; composition of
//! basis morphisms is the basis morphism. Grading is cohomological and the
//! shift `[1]` lowers every generator degree by one. Matrices are indexed
//! `[target][source]`.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::gf2::{BitMat, BitVec, ColumnSolver, Quotient};
use crate::graph::{GraphPoint, MetricGraph};
use crate::scalar::{Scalar, Threshold};
use crate::tamefn::{same_graph, TameError, TameFunction};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TwistedError {
    #[error(transparent)]
    Tame(#[from] TameError),
    #[error("complexes live on different graphs")]
    GraphMismatch,
    #[error("invalid complex: {0}")]
    Invalid(ValidationReport),
    #[error("matrix has shape {got:?}, expected {expected:?}")]
    Shape { got: (usize, usize), expected: (usize, usize) },
    #[error("entry ({0}, {1}) is not an allowed morphism")]
    NotAllowed(usize, usize),
    #[error("map does not commute with the differentials")]
    NotChainMap,
}

#[derive(Clone, Debug)]
pub struct Generator<S> {
    pub fun: TameFunction<S>,
    pub deg: i64,
}

impl<S: Scalar> PartialEq for Generator<S> {
    fn eq(&self, other: &Self) -> bool {
        self.deg == other.deg && self.fun == other.fun
    }
}

impl<S: Scalar> Generator<S> {
    pub fn new(fun: TameFunction<S>, deg: i64) -> Self {
        Generator { fun, deg }
    }
}

/// Hom rule between generators: `Some(degree)` when one-dimensional.
pub fn hom_rule<S: Scalar>(g1: &Generator<S>, g2: &Generator<S>) -> Result<Option<i64>, TameError> {
    Ok(g1.fun.pointwise_leq(&g2.fun)?.then_some(g1.deg - g2.deg))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    EmptyGenerator(usize),
    DisconnectedEpigraph(usize),
    GraphMismatch(usize),
    Degree { target: usize, source: usize },
    Containment { target: usize, source: usize },
    SquareNonzero { target: usize, source: usize },
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(|v| format!("{v:?}")).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// A finite family of generators with a square-zero differential.
#[derive(Clone, Debug)]
pub struct TwistedComplex<S> {
    graph: Arc<MetricGraph<S>>,
    gens: Vec<Generator<S>>,
    diff: BitMat,
}

impl<S: Scalar> PartialEq for TwistedComplex<S> {
    fn eq(&self, other: &Self) -> bool {
        same_graph(&self.graph, &other.graph) && self.gens == other.gens && self.diff == other.diff
    }
}

/// Checks the generator and differential invariants.
pub fn validate<S: Scalar>(graph: &Arc<MetricGraph<S>>, gens: &[Generator<S>], diff: &BitMat) -> ValidationReport {
    let mut report = ValidationReport::default();
    for (i, g) in gens.iter().enumerate() {
        if !same_graph(graph, g.fun.graph()) {
            report.violations.push(Violation::GraphMismatch(i));
            continue;
        }
        match g.fun.domain_components() {
            0 => report.violations.push(Violation::EmptyGenerator(i)),
            1 => {}
            _ => report.violations.push(Violation::DisconnectedEpigraph(i)),
        }
    }
    if !report.is_valid() {
        return report;
    }
    for (i, j) in diff.entries() {
        if gens[i].deg != gens[j].deg + 1 {
            report.violations.push(Violation::Degree { target: i, source: j });
        } else if !gens[j].fun.pointwise_leq(&gens[i].fun).unwrap_or(false) {
            report.violations.push(Violation::Containment { target: i, source: j });
        }
    }
    for (i, k) in diff.mul(diff).entries() {
        report.violations.push(Violation::SquareNonzero { target: i, source: k });
    }
    report
}

impl<S: Scalar> TwistedComplex<S> {
    pub fn new(graph: Arc<MetricGraph<S>>, gens: Vec<Generator<S>>, diff: BitMat) -> Result<Self, TwistedError> {
        let n = gens.len();
        if (diff.rows(), diff.cols()) != (n, n) {
            return Err(TwistedError::Shape { got: (diff.rows(), diff.cols()), expected: (n, n) });
        }
        let report = validate(&graph, &gens, &diff);
        if !report.is_valid() {
            return Err(TwistedError::Invalid(report));
        }
        Ok(TwistedComplex { graph, gens, diff })
    }

    /// Builds a complex whose invariants hold by construction.
    pub(crate) fn assemble(graph: Arc<MetricGraph<S>>, gens: Vec<Generator<S>>, diff: BitMat) -> Self {
        debug_assert!(validate(&graph, &gens, &diff).is_valid(), "constructor broke an invariant");
        TwistedComplex { graph, gens, diff }
    }

    pub fn empty(graph: Arc<MetricGraph<S>>) -> Self {
        TwistedComplex { graph, gens: Vec::new(), diff: BitMat::zeros(0, 0) }
    }

    pub fn single(fun: TameFunction<S>, deg: i64) -> Result<Self, TwistedError> {
        let g = fun.graph().clone();
        Self::new(g, vec![Generator::new(fun, deg)], BitMat::zeros(1, 1))
    }

    pub fn graph(&self) -> &Arc<MetricGraph<S>> {
        &self.graph
    }

    pub fn gens(&self) -> &[Generator<S>] {
        &self.gens
    }

    pub fn diff(&self) -> &BitMat {
        &self.diff
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.gens.iter().map(|g| g.deg).collect()
    }

    pub fn validate(&self) -> ValidationReport {
        validate(&self.graph, &self.gens, &self.diff)
    }

    /// `C[k]`: every degree lowered by `k`.
    pub fn shift(&self, k: i64) -> Self {
        let gens = self.gens.iter().map(|g| Generator::new(g.fun.clone(), g.deg - k)).collect();
        TwistedComplex { graph: self.graph.clone(), gens, diff: self.diff.clone() }
    }

    /// `T_c C`: every generator function raised by `c`.
    pub fn translate(&self, c: &S) -> Self {
        let gens = self.gens.iter().map(|g| Generator::new(g.fun.translate(c), g.deg)).collect();
        TwistedComplex { graph: self.graph.clone(), gens, diff: self.diff.clone() }
    }

    /// Applies `op` to every generator function, keeping the differential.
    pub fn map_functions(
        &self,
        op: impl Fn(&TameFunction<S>) -> Result<TameFunction<S>, TameError> + Sync,
    ) -> Result<Self, TwistedError> {
        let funs: Result<Vec<_>, _> = self.gens.par_iter().map(|g| op(&g.fun)).collect();
        let gens = funs?.into_iter().zip(&self.gens).map(|(f, g)| Generator::new(f, g.deg)).collect();
        Self::new(self.graph.clone(), gens, self.diff.clone())
    }

    pub fn direct_sum(graph: Arc<MetricGraph<S>>, parts: &[&TwistedComplex<S>]) -> Result<Self, TwistedError> {
        if parts.iter().any(|p| !same_graph(&graph, &p.graph)) {
            return Err(TwistedError::GraphMismatch);
        }
        let gens = parts.iter().flat_map(|p| p.gens.iter().cloned()).collect();
        let diffs: Vec<&BitMat> = parts.iter().map(|p| &p.diff).collect();
        Ok(TwistedComplex { graph, gens, diff: BitMat::block_diag(&diffs) })
    }

    /// Splits generators with disconnected epigraphs into their components,
    /// distributing differential entries over allowed component pairs.
    pub fn split_components(graph: Arc<MetricGraph<S>>, gens: Vec<Generator<S>>, diff: &BitMat) -> Result<Self, TwistedError> {
        let mut owner = Vec::new();
        let mut out = Vec::new();
        for (i, g) in gens.iter().enumerate() {
            for part in g.fun.split_components() {
                owner.push(i);
                out.push(Generator::new(part, g.deg));
            }
        }
        let mut d = BitMat::zeros(out.len(), out.len());
        for a in 0..out.len() {
            for b in 0..out.len() {
                if diff.get(owner[a], owner[b]) && out[b].fun.pointwise_leq(&out[a].fun)? {
                    d.set(a, b, true);
                }
            }
        }
        Self::new(graph, out, d)
    }
}

/// `thr[i][j] = sup(source_j − target_i)`: the least shift `c` for which
/// `source_j → T_c target_i` is allowed.
pub fn thresholds<S: Scalar>(source: &TwistedComplex<S>, target: &TwistedComplex<S>) -> Result<Vec<Vec<Threshold<S>>>, TwistedError> {
    if !same_graph(&source.graph, &target.graph) {
        return Err(TwistedError::GraphMismatch);
    }
    Ok(target
        .gens
        .par_iter()
        .map(|t| source.gens.iter().map(|s| s.fun.sup_difference(&t.fun).expect("same graph")).collect())
        .collect())
}

/// Allowed-entry pattern at shift `c` from a threshold table.
pub fn allowed_at<S: Scalar>(thr: &[Vec<Threshold<S>>], cols: usize, c: &S) -> BitMat {
    let mut m = BitMat::zeros(thr.len(), cols);
    for (i, row) in thr.iter().enumerate() {
        for (j, t) in row.iter().enumerate() {
            if t.admits(c) {
                m.set(i, j, true);
            }
        }
    }
    m
}

/// Allowed entries of one degree, with their positions.
type DegreeBasis = (Vec<(usize, usize)>, HashMap<(usize, usize), usize>);

/// The graded GF(2) complex `Hom(F, T_c G)` with differential
/// `D(φ) = δ_G φ + φ δ_F`, described by an allowed-entry pattern.
#[derive(Clone, Debug)]
pub struct HomComplex {
    fdeg: Vec<i64>,
    gdeg: Vec<i64>,
    fdiff: BitMat,
    gdiff_t: BitMat,
    allow: BitMat,
    bases: HashMap<i64, DegreeBasis>,
}

impl HomComplex {
    pub fn new<S: Scalar>(f: &TwistedComplex<S>, g: &TwistedComplex<S>, allow: BitMat) -> Self {
        assert_eq!((allow.rows(), allow.cols()), (g.len(), f.len()));
        let fdeg = f.degrees();
        let gdeg = g.degrees();
        let mut bases: HashMap<i64, DegreeBasis> = HashMap::new();
        for (i, j) in allow.entries() {
            let k = gdeg[i] - fdeg[j];
            let e = bases.entry(k).or_default();
            e.1.insert((i, j), e.0.len());
            e.0.push((i, j));
        }
        HomComplex { fdeg, gdeg, fdiff: f.diff.clone(), gdiff_t: g.diff.transpose(), allow, bases }
    }

    pub fn allowed(&self) -> &BitMat {
        &self.allow
    }

    pub fn degrees(&self) -> Vec<i64> {
        let mut ks: Vec<i64> = self.bases.keys().copied().collect();
        ks.sort_unstable();
        ks
    }

    pub fn basis(&self, k: i64) -> &[(usize, usize)] {
        self.bases.get(&k).map_or(&[], |b| &b.0)
    }

    pub fn dim(&self, k: i64) -> usize {
        self.basis(k).len()
    }

    /// Matrix of `D: Hom^k → Hom^{k+1}`.
    pub fn differential(&self, k: i64) -> BitMat {
        let src = self.basis(k);
        let tgt = self.bases.get(&(k + 1));
        let mut m = BitMat::zeros(tgt.map_or(0, |t| t.0.len()), src.len());
        let Some((_, index)) = tgt else { return m };
        for (c, &(i, j)) in src.iter().enumerate() {
            for ip in self.gdiff_t.row(i).ones() {
                m.flip(index[&(ip, j)], c);
            }
            for jp in self.fdiff.row(j).ones() {
                m.flip(index[&(i, jp)], c);
            }
        }
        m
    }

    /// Coordinates of a map of degree `k`; `None` if it uses a forbidden entry.
    pub fn to_vec(&self, k: i64, m: &BitMat) -> Option<BitVec> {
        let b = self.bases.get(&k);
        let mut v = BitVec::zeros(b.map_or(0, |b| b.0.len()));
        for e in m.entries() {
            let idx = b?.1.get(&e)?;
            v.set(*idx, true);
        }
        Some(v)
    }

    pub fn to_mat(&self, k: i64, v: &BitVec) -> BitMat {
        let basis = self.basis(k);
        BitMat::from_entries(self.gdeg.len(), self.fdeg.len(), v.ones().map(|c| basis[c]))
    }

    /// `dim H^k`.
    pub fn cohomology_dim(&self, k: i64) -> usize {
        let out = self.differential(k).rank();
        let inc = self.differential(k - 1).rank();
        self.dim(k) - out - inc
    }

    /// `H^k` as a quotient of cycles by boundaries, in `Hom^k` coordinates.
    pub fn cohomology(&self, k: i64) -> Quotient {
        let cycles = ColumnSolver::new(&self.differential(k)).kernel().to_vec();
        let inc = self.differential(k - 1);
        let boundaries: Vec<BitVec> = (0..inc.cols()).map(|j| inc.column(j)).collect();
        Quotient::new(self.dim(k), &boundaries, &cycles)
    }

    /// Solves `D h = φ` for `h` of degree `k − 1`.
    pub fn solve_boundary(&self, k: i64, phi: &BitMat) -> Option<BitMat> {
        let v = self.to_vec(k, phi)?;
        let d = self.differential(k - 1);
        let h = ColumnSolver::new(&d).solve(&v)?;
        Some(self.to_mat(k - 1, &h))
    }
}

/// `Hom(F, T_c G)` under τ-translation.
pub fn hom_complex<S: Scalar>(f: &TwistedComplex<S>, g: &TwistedComplex<S>, c: &S) -> Result<HomComplex, TwistedError> {
    let thr = thresholds(f, g)?;
    Ok(HomComplex::new(f, g, allowed_at(&thr, f.len(), c)))
}

/// `δ_G φ + φ δ_F`.
pub fn hom_differential<S: Scalar>(f: &TwistedComplex<S>, g: &TwistedComplex<S>, phi: &BitMat) -> BitMat {
    g.diff.mul(phi).add(&phi.mul(&f.diff))
}

/// Checks that `φ: F → T_c G` has the right shape, degree `k` and allowed
/// entries.
pub fn check_map<S: Scalar>(
    f: &TwistedComplex<S>,
    g: &TwistedComplex<S>,
    thr: &[Vec<Threshold<S>>],
    c: &S,
    k: i64,
    phi: &BitMat,
) -> Result<(), TwistedError> {
    if (phi.rows(), phi.cols()) != (g.len(), f.len()) {
        return Err(TwistedError::Shape { got: (phi.rows(), phi.cols()), expected: (g.len(), f.len()) });
    }
    for (i, j) in phi.entries() {
        if g.gens[i].deg != f.gens[j].deg + k || !thr[i][j].admits(c) {
            return Err(TwistedError::NotAllowed(i, j));
        }
    }
    Ok(())
}

/// Same as [`check_map`], computing thresholds only at the nonzero entries.
pub fn check_entries<S: Scalar>(f: &TwistedComplex<S>, g: &TwistedComplex<S>, c: &S, k: i64, phi: &BitMat) -> Result<(), TwistedError> {
    if !same_graph(&f.graph, &g.graph) {
        return Err(TwistedError::GraphMismatch);
    }
    if (phi.rows(), phi.cols()) != (g.len(), f.len()) {
        return Err(TwistedError::Shape { got: (phi.rows(), phi.cols()), expected: (g.len(), f.len()) });
    }
    let entries = phi.entries();
    let bad = entries
        .par_iter()
        .find_first(|&&(i, j)| {
            g.gens[i].deg != f.gens[j].deg + k || !f.gens[j].fun.sup_difference(&g.gens[i].fun).expect("same graph").admits(c)
        })
        .copied();
    match bad {
        Some((i, j)) => Err(TwistedError::NotAllowed(i, j)),
        None => Ok(()),
    }
}

/// Checks a degree-0 chain map `φ: F → T_c G`.
pub fn check_chain_map<S: Scalar>(f: &TwistedComplex<S>, g: &TwistedComplex<S>, c: &S, phi: &BitMat) -> Result<(), TwistedError> {
    check_entries(f, g, c, 0, phi)?;
    if hom_differential(f, g, phi).is_zero() {
        Ok(())
    } else {
        Err(TwistedError::NotChainMap)
    }
}

/// Mapping cone of a degree-0 chain map `φ: F → G`: generators `F[1] ⊔ G`
/// with differential `[[δ_F, 0], [φ, δ_G]]`.
pub fn mapping_cone<S: Scalar>(f: &TwistedComplex<S>, g: &TwistedComplex<S>, phi: &BitMat) -> Result<TwistedComplex<S>, TwistedError> {
    check_chain_map(f, g, &S::zero(), phi)?;
    Ok(mapping_cone_unchecked(f, g, phi))
}

pub(crate) fn mapping_cone_unchecked<S: Scalar>(f: &TwistedComplex<S>, g: &TwistedComplex<S>, phi: &BitMat) -> TwistedComplex<S> {
    let (n, m) = (f.len(), g.len());
    let mut gens: Vec<Generator<S>> = f.shift(1).gens;
    gens.extend(g.gens.iter().cloned());
    let mut d = BitMat::zeros(n + m, n + m);
    d.put(0, 0, &f.diff);
    d.put(n, 0, phi);
    d.put(n, n, &g.diff);
    TwistedComplex::assemble(f.graph.clone(), gens, d)
}

/// Canonical maps `G → Cone(φ)` and `Cone(φ) → F[1]`.
pub fn cone_fiber_maps(n: usize, m: usize) -> (BitMat, BitMat) {
    let incl = BitMat::from_entries(n + m, m, (0..m).map(|i| (n + i, i)));
    let proj = BitMat::from_entries(n, n + m, (0..n).map(|i| (i, i)));
    (incl, proj)
}

/// The τ-map `C → T_c C`.
pub fn tau(n: usize) -> BitMat {
    BitMat::identity(n)
}

/// Whether the degree-0 chain map `φ: F → T_c G` is null-homotopic, with a
/// witness `h` satisfying `φ = δ_G h + h δ_F`.
pub fn is_null_homotopic<S: Scalar>(
    f: &TwistedComplex<S>,
    g: &TwistedComplex<S>,
    c: &S,
    phi: &BitMat,
) -> Result<Option<BitMat>, TwistedError> {
    check_chain_map(f, g, c, phi)?;
    Ok(hom_complex(f, g, c)?.solve_boundary(0, phi))
}

/// Maps of the fiber sequence `Cone(u) → Cone(f∘u) → Cone(f)` for
/// composable `u: F′ → F`, `f: F → G`, with a null-homotopy of the composite.
pub struct Octahedron<S> {
    pub cone_u: TwistedComplex<S>,
    pub cone_fu: TwistedComplex<S>,
    pub cone_f: TwistedComplex<S>,
    pub alpha: BitMat,
    pub beta: BitMat,
    pub homotopy: BitMat,
}

pub fn octahedron<S: Scalar>(
    fp: &TwistedComplex<S>,
    f: &TwistedComplex<S>,
    g: &TwistedComplex<S>,
    u: &BitMat,
    fm: &BitMat,
) -> Result<Octahedron<S>, TwistedError> {
    let fu = fm.mul(u);
    let cone_u = mapping_cone(fp, f, u)?;
    let cone_fu = mapping_cone(fp, g, &fu)?;
    let cone_f = mapping_cone(f, g, fm)?;
    let (a, b, c) = (fp.len(), f.len(), g.len());
    let mut alpha = BitMat::zeros(a + c, a + b);
    alpha.put(0, 0, &BitMat::identity(a));
    alpha.put(a, a, fm);
    let mut beta = BitMat::zeros(b + c, a + c);
    beta.put(0, 0, u);
    beta.put(b, a, &BitMat::identity(c));
    let mut homotopy = BitMat::zeros(b + c, a + b);
    homotopy.put(0, a, &BitMat::identity(b));
    Ok(Octahedron { cone_u, cone_fu, cone_f, alpha, beta, homotopy })
}

/// Complex on the one-point graph with generators `[a_i, ∞)` in degree `d_i`.
pub fn point_complex<S: Scalar>(levels: &[(S, i64)], diff: BitMat) -> Result<TwistedComplex<S>, TwistedError> {
    let g = Arc::new(MetricGraph::point());
    let gens = levels
        .iter()
        .map(|(a, d)| Generator::new(TameFunction::skyscraper(g.clone(), &GraphPoint::Vertex(0), a.clone()), *d))
        .collect();
    TwistedComplex::new(g, gens, diff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn bar(a: i64) -> TwistedComplex<Rational> {
        point_complex(&[(q(a), 0)], BitMat::zeros(1, 1)).unwrap()
    }

    /// `[a, ∞)` in degree −1 mapping to `[b, ∞)` in degree 0.
    fn interval(a: i64, b: i64) -> TwistedComplex<Rational> {
        point_complex(&[(q(a), -1), (q(b), 0)], BitMat::from_entries(2, 2, [(1, 0)])).unwrap()
    }

    #[test]
    fn hom_rule_examples() {
        let (x, y) = (bar(0), bar(3));
        let (a, b) = (&x.gens()[0], &y.gens()[0]);
        assert_eq!(hom_rule(a, b).unwrap(), Some(0));
        assert_eq!(hom_rule(b, a).unwrap(), None);
        let g = Arc::new(MetricGraph::path(&[q(1)]));
        let s0 = Generator::new(TameFunction::skyscraper(g.clone(), &GraphPoint::Vertex(0), q(0)), 0);
        let s1 = Generator::new(TameFunction::skyscraper(g.clone(), &GraphPoint::Vertex(1), q(0)), 0);
        assert_eq!(hom_rule(&s0, &s1).unwrap(), None);
        let c0 = Generator::new(TameFunction::distance_cone(g.clone(), &GraphPoint::Vertex(0), q(0), q(1)), 0);
        let c1 = Generator::new(TameFunction::distance_cone(g.clone(), &GraphPoint::Vertex(1), q(1), q(1)), 0);
        assert_eq!(hom_rule(&c0, &c1).unwrap(), Some(0));
    }

    #[test]
    fn validate_examples() {
        assert!(bar(0).validate().is_valid());
        let bad = point_complex(&[(q(1), -1), (q(0), 0)], BitMat::from_entries(2, 2, [(1, 0)]));
        assert!(matches!(bad, Err(TwistedError::Invalid(r)) if r.violations == vec![Violation::Containment { target: 1, source: 0 }]));
        let sq = point_complex(
            &[(q(0), -1), (q(0), 0), (q(0), 1)],
            BitMat::from_entries(3, 3, [(1, 0), (2, 1)]),
        );
        assert!(matches!(sq, Err(TwistedError::Invalid(r)) if r.violations == vec![Violation::SquareNonzero { target: 2, source: 0 }]));
    }

    #[test]
    fn hom_complex_examples() {
        let a = bar(0);
        let h = hom_complex(&a, &a, &q(0)).unwrap();
        assert_eq!(h.cohomology_dim(0), 1);
        assert_eq!(h.degrees(), vec![0]);

        let i = interval(0, 1);
        let h = hom_complex(&i, &i, &q(0)).unwrap();
        assert_eq!(h.cohomology_dim(0), 1);
        for k in [-1, 1] {
            assert_eq!(h.cohomology_dim(k), 0);
        }

        let b = bar(3).shift(1);
        let h = hom_complex(&a, &b, &q(0)).unwrap();
        assert_eq!(h.dim(0), 0);
    }

    #[test]
    fn cone_examples() {
        let a = bar(0);
        let id = BitMat::identity(1);
        let c = mapping_cone(&a, &a, &id).unwrap();
        let n = c.len();
        assert!(is_null_homotopic(&c, &c, &q(0), &BitMat::identity(n)).unwrap().is_some());
        assert!(is_null_homotopic(&a, &a, &q(0), &id).unwrap().is_none());
        assert!(is_null_homotopic(&a, &a, &q(0), &BitMat::zeros(1, 1)).unwrap().is_some());

        let r = mapping_cone(&bar(0), &bar(1), &id).unwrap();
        assert_eq!(r.degrees(), vec![-1, 0]);
        assert!(mapping_cone(&bar(1), &bar(0), &id).is_err());

        let z = mapping_cone(&a, &bar(2), &BitMat::zeros(1, 1)).unwrap();
        assert!(z.diff().is_zero());
    }

    #[test]
    fn translate_and_shift_compose() {
        let i = interval(0, 2);
        assert_eq!(i.shift(1).shift(-1), i);
        assert_eq!(i.translate(&q(1)).translate(&q(2)), i.translate(&q(3)));
        assert_eq!(i.translate(&q(0)), i);
        let t = tau(i.len());
        check_chain_map(&i, &i.translate(&q(2)), &q(0), &t).unwrap();
        assert_eq!(t.mul(&t), t);
    }

    #[test]
    fn octahedral_composite_is_null_homotopic() {
        let fp = interval(0, 1);
        let f = interval(1, 2);
        let g = interval(0, 1).translate(&q(2));
        let u = BitMat::identity(2);
        let fm = BitMat::identity(2);
        let o = octahedron(&fp, &f, &g, &u, &fm).unwrap();
        check_chain_map(&o.cone_u, &o.cone_fu, &q(0), &o.alpha).unwrap();
        check_chain_map(&o.cone_fu, &o.cone_f, &q(0), &o.beta).unwrap();
        let comp = o.beta.mul(&o.alpha);
        assert_eq!(hom_differential(&o.cone_u, &o.cone_f, &o.homotopy), comp);
        assert!(is_null_homotopic(&o.cone_u, &o.cone_f, &q(0), &comp).unwrap().is_some());
    }
}
