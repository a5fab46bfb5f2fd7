//! Certificate-producing cone transformations.
//!
//! Every operation returns a [`ConeTransportRecord`] whose certificate is
//! replayed before it is handed out.

use crate::gf2::BitMat;
use crate::interleave::{CertError, Certificate};
use crate::scalar::Scalar;
use crate::twisted::{mapping_cone, TwistedComplex, TwistedError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lemma {
    ReplaceSource,
    TransportCone,
    TransportTower,
    SumCertificates,
}

impl Lemma {
    /// Claimed constant in front of `ε`.
    pub fn constant<S: Scalar>(&self, n: usize) -> S {
        let k: u64 = match self {
            Lemma::ReplaceSource => 4,
            Lemma::TransportCone => 8,
            Lemma::TransportTower => 8u64.pow(n as u32),
            Lemma::SumCertificates => 2,
        };
        S::from_u64(k).expect("small integer")
    }

    pub fn name(&self) -> &'static str {
        match self {
            Lemma::ReplaceSource => "replace_source",
            Lemma::TransportCone => "transport_cone",
            Lemma::TransportTower => "transport_tower",
            Lemma::SumCertificates => "sum_certificates",
        }
    }
}

/// One stage of a transported tower.
#[derive(Clone, Debug, PartialEq)]
pub struct StageTrace<S> {
    /// Shifts `(a_i, b_i)` of the replacement certificate used at this stage.
    pub replacement: (S, S),
    /// Certified total after the stage.
    pub total: S,
}

#[derive(Clone, Debug)]
pub struct ConeTransportRecord<S> {
    pub lemma: Lemma,
    pub epsilon: S,
    pub bound: S,
    pub input: TwistedComplex<S>,
    pub output: TwistedComplex<S>,
    pub certificate: Certificate<S>,
    pub trace: Vec<StageTrace<S>>,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum TransportError {
    #[error(transparent)]
    Twisted(#[from] TwistedError),
    #[error("input certificate {index} fails: {source}")]
    Input { index: usize, source: CertError },
    #[error("output certificate fails: {0}")]
    Output(CertError),
    #[error("certified total {total} exceeds the bound {bound}")]
    Bound { total: String, bound: String },
    #[error("malformed tower: {0}")]
    Tower(String),
}

impl<S: Scalar> ConeTransportRecord<S> {
    /// Replays the certificate and checks it against the claimed bound.
    pub fn verify(&self) -> Result<(), TransportError> {
        self.certificate.verify(&self.input, &self.output).map_err(TransportError::Output)?;
        if self.certificate.total() > self.bound {
            return Err(TransportError::Bound { total: self.certificate.total().to_string(), bound: self.bound.to_string() });
        }
        Ok(())
    }

    fn checked(self) -> Result<Self, TransportError> {
        self.verify()?;
        Ok(self)
    }
}

fn check_input<S: Scalar>(index: usize, c: &Certificate<S>, f: &TwistedComplex<S>, g: &TwistedComplex<S>) -> Result<(), TransportError> {
    c.verify(f, g).map_err(|source| TransportError::Input { index, source })
}

fn larger<S: Scalar>(x: S, y: S) -> S {
    if y > x {
        y
    } else {
        x
    }
}

/// The transported map `f′ = u_G f v_F` with its source and target.
#[derive(Clone, Debug)]
pub struct TransportedMap<S> {
    /// `T_{−b_F} F′`.
    pub source: TwistedComplex<S>,
    /// `T_{a_G} G′`.
    pub target: TwistedComplex<S>,
    pub map: BitMat,
}

/// Cone data for `f: F → G` moved along `F ↔ F′` and `G ↔ G′`.
pub struct Transport<S> {
    pub map: TransportedMap<S>,
    pub record: ConeTransportRecord<S>,
}

/// Builds `Cone(f′)` and a certificate against `Cone(f)` at `(m, m)` with
/// `m = max(a_F + b_F, a_G + b_G)`.
pub fn transport_cone<S: Scalar>(
    f: &TwistedComplex<S>,
    g: &TwistedComplex<S>,
    fmap: &BitMat,
    f2: &TwistedComplex<S>,
    g2: &TwistedComplex<S>,
    cert_f: &Certificate<S>,
    cert_g: &Certificate<S>,
) -> Result<Transport<S>, TransportError> {
    check_input(0, cert_f, f, f2)?;
    check_input(1, cert_g, g, g2)?;
    let epsilon = larger(cert_f.total(), cert_g.total());
    transport_unchecked(f, g, fmap, f2, g2, cert_f, cert_g, Lemma::TransportCone, epsilon)
}

#[allow(clippy::too_many_arguments)]
fn transport_unchecked<S: Scalar>(
    f: &TwistedComplex<S>,
    g: &TwistedComplex<S>,
    fmap: &BitMat,
    f2: &TwistedComplex<S>,
    g2: &TwistedComplex<S>,
    cf: &Certificate<S>,
    cg: &Certificate<S>,
    lemma: Lemma,
    epsilon: S,
) -> Result<Transport<S>, TransportError> {
    let cone = mapping_cone(f, g, fmap)?;
    let src = f2.translate(&-cf.b.clone());
    let tgt = g2.translate(&cg.a);
    let fprime = cg.u.mul(fmap).mul(&cf.v);
    let cone2 = mapping_cone(&src, &tgt, &fprime)?;
    let (nf, ng, nf2, ng2) = (f.len(), g.len(), f2.len(), g2.len());

    let mut phi = BitMat::zeros(nf2 + ng2, nf + ng);
    phi.put(0, 0, &cf.u);
    phi.put(nf2, 0, &cg.u.mul(fmap).mul(&cf.h_f));
    phi.put(nf2, nf, &cg.u);
    let mut psi = BitMat::zeros(nf + ng, nf2 + ng2);
    psi.put(0, 0, &cf.v);
    psi.put(nf, 0, &cg.h_f.mul(fmap).mul(&cf.v));
    psi.put(nf, nf2, &cg.v);

    let mut h1 = BitMat::zeros(nf + ng, nf + ng);
    h1.put(0, 0, &cf.h_f);
    h1.put(nf, 0, &cg.h_f.mul(fmap).mul(&cf.h_f));
    h1.put(nf, nf, &cg.h_f);

    // Homotopies on the far side corrected to a coherent form.
    let hf2 = cf.h_g.add(&cf.u.mul(&cf.h_f).mul(&cf.v)).add(&cf.u.mul(&cf.v).mul(&cf.h_g));
    let hg2 = cg.h_g.add(&cg.u.mul(&cg.h_f).mul(&cg.v)).add(&cg.h_g.mul(&cg.u).mul(&cg.v));
    let m1 = cf.h_f.mul(&cf.v).add(&cf.v.mul(&cf.h_g));
    let m2 = cg.u.mul(&cg.h_f).add(&cg.h_g.mul(&cg.u));
    let z2 = cg.u.mul(fmap).mul(&cf.h_f).mul(&m1).add(&m2.mul(&cg.h_f).mul(fmap).mul(&cf.v));
    let mut h2 = BitMat::zeros(nf2 + ng2, nf2 + ng2);
    h2.put(0, 0, &hf2);
    h2.put(nf2, 0, &z2);
    h2.put(nf2, nf2, &hg2);

    let m = larger(cf.total(), cg.total());
    let certificate = Certificate { a: m.clone(), b: m, u: phi, v: psi, h_f: h1, h_g: h2 };
    let bound = lemma.constant::<S>(1) * epsilon.clone();
    let record = ConeTransportRecord {
        lemma,
        epsilon,
        bound,
        input: cone,
        output: cone2,
        certificate,
        trace: vec![],
    }
    .checked()?;
    Ok(Transport { map: TransportedMap { source: src, target: tgt, map: fprime }, record })
}

/// Replaces the source of `f: F → G` along `u: F′ → F`, given a certificate
/// `F′ ↔ F` at `(0, ε)` whose forward map is `u`.
pub fn replace_source<S: Scalar>(
    f: &TwistedComplex<S>,
    g: &TwistedComplex<S>,
    fmap: &BitMat,
    f2: &TwistedComplex<S>,
    cert_u: &Certificate<S>,
) -> Result<Transport<S>, TransportError> {
    check_input(0, cert_u, f2, f)?;
    if !cert_u.a.is_zero() {
        return Err(TransportError::Input {
            index: 0,
            source: CertError::Map { map: "u", source: TwistedError::NotAllowed(0, 0) },
        });
    }
    let id = Certificate::identity(g.len());
    let epsilon = cert_u.b.clone();
    transport_unchecked(f, g, fmap, f2, g, &cert_u.reverse(), &id, Lemma::ReplaceSource, epsilon)
}

/// An iterated cone `C_0 = G_0`, `C_k = Cone(f_k: C_{k−1} → G_k)`.
#[derive(Clone, Debug)]
pub struct ConeTower<S> {
    pub base: TwistedComplex<S>,
    pub stages: Vec<(TwistedComplex<S>, BitMat)>,
}

impl<S: Scalar> ConeTower<S> {
    pub fn depth(&self) -> usize {
        self.stages.len()
    }

    /// `C_0, …, C_n`.
    pub fn levels(&self) -> Result<Vec<TwistedComplex<S>>, TwistedError> {
        let mut out = vec![self.base.clone()];
        for (g, f) in &self.stages {
            let next = mapping_cone(out.last().expect("nonempty"), g, f)?;
            out.push(next);
        }
        Ok(out)
    }

    pub fn total(&self) -> Result<TwistedComplex<S>, TwistedError> {
        Ok(self.levels()?.pop().expect("nonempty"))
    }
}

/// Transports a tower along replacements `G_i ↔ G′_i`, one cone at a time.
/// Returns the transported map of every stage; the last record output is
/// the transported total complex.
pub fn transport_tower<S: Scalar>(
    tower: &ConeTower<S>,
    replacements: &[(TwistedComplex<S>, Certificate<S>)],
) -> Result<(Vec<TransportedMap<S>>, ConeTransportRecord<S>), TransportError> {
    let n = tower.depth();
    if replacements.len() != n + 1 {
        return Err(TransportError::Tower(format!("{} replacements for {} blocks", replacements.len(), n + 1)));
    }
    let levels = tower.levels()?;
    let blocks: Vec<&TwistedComplex<S>> = std::iter::once(&tower.base).chain(tower.stages.iter().map(|s| &s.0)).collect();
    for (i, ((g2, c), g)) in replacements.iter().zip(&blocks).enumerate() {
        check_input(i, c, g, g2)?;
    }
    let epsilon = replacements.iter().map(|r| r.1.total()).fold(S::zero(), larger);
    let (base2, cert0) = &replacements[0];
    let mut acc = cert0.clone();
    let mut current = base2.clone();
    let mut maps = Vec::new();
    let mut trace = vec![StageTrace { replacement: (cert0.a.clone(), cert0.b.clone()), total: acc.total() }];
    for (k, (g, f)) in tower.stages.iter().enumerate() {
        let (g2, cg) = &replacements[k + 1];
        let eps_k = larger(acc.total(), cg.total());
        let t = transport_unchecked(&levels[k], g, f, &current, g2, &acc, cg, Lemma::TransportCone, eps_k)?;
        current = t.record.output;
        acc = t.record.certificate;
        maps.push(t.map);
        trace.push(StageTrace { replacement: (cg.a.clone(), cg.b.clone()), total: acc.total() });
    }
    let record = ConeTransportRecord {
        lemma: Lemma::TransportTower,
        epsilon: epsilon.clone(),
        bound: Lemma::TransportTower.constant::<S>(n) * epsilon,
        input: levels[n].clone(),
        output: current,
        certificate: acc,
        trace,
    }
    .checked()?;
    Ok((maps, record))
}

/// Block-diagonal certificate between direct sums.
pub fn sum_certificates<S: Scalar>(pairs: &[(&TwistedComplex<S>, &TwistedComplex<S>, &Certificate<S>)]) -> Result<ConeTransportRecord<S>, TransportError> {
    let Some(first) = pairs.first() else {
        return Err(TransportError::Tower("empty sum".into()));
    };
    for (i, (f, g, c)) in pairs.iter().enumerate() {
        check_input(i, c, f, g)?;
    }
    let graph = first.0.graph().clone();
    let fs: Vec<&TwistedComplex<S>> = pairs.iter().map(|p| p.0).collect();
    let gs: Vec<&TwistedComplex<S>> = pairs.iter().map(|p| p.1).collect();
    let certs: Vec<&Certificate<S>> = pairs.iter().map(|p| p.2).collect();
    let epsilon = certs.iter().map(|c| c.total()).fold(S::zero(), larger);
    ConeTransportRecord {
        lemma: Lemma::SumCertificates,
        epsilon: epsilon.clone(),
        bound: Lemma::SumCertificates.constant::<S>(1) * epsilon,
        input: TwistedComplex::direct_sum(graph.clone(), &fs)?,
        output: TwistedComplex::direct_sum(graph, &gs)?,
        certificate: Certificate::sum(&certs),
        trace: vec![],
    }
    .checked()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interleave::{check_interleaving, distance_exact, Decision, DEFAULT_CAP};
    use crate::twisted::point_complex;
    use crate::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn qq(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn ray(a: Rational) -> TwistedComplex<Rational> {
        point_complex(&[(a, 0)], BitMat::zeros(1, 1)).unwrap()
    }

    fn cert(f: &TwistedComplex<Rational>, g: &TwistedComplex<Rational>, a: Rational, b: Rational) -> Certificate<Rational> {
        match check_interleaving(f, g, &a, &b, DEFAULT_CAP).unwrap() {
            Decision::Feasible(c) => c,
            d => panic!("{d:?}"),
        }
    }

    #[test]
    fn replace_source_identity() {
        let f = ray(q(0));
        let g = ray(q(2));
        let t = replace_source(&f, &g, &BitMat::identity(1), &f, &Certificate::identity(1)).unwrap();
        assert_eq!(t.record.output, t.record.input);
        assert_eq!(t.record.certificate.total(), q(0));
    }

    #[test]
    fn replace_source_bars() {
        let eps = qq(1, 4);
        let f = ray(q(0));
        let f2 = ray(eps.clone());
        let g = ray(q(0));
        // u: F′ → F needs F′ ≤ F, so read the pair the other way round.
        let (f, f2) = (f2, f);
        let c = cert(&f2, &f, q(0), eps.clone());
        let fmap = BitMat::zeros(1, 1);
        let t = replace_source(&f, &g, &fmap, &f2, &c).unwrap();
        assert!(t.record.certificate.total() <= q(4) * eps.clone());
        let d = distance_exact(&t.record.input, &t.record.output, DEFAULT_CAP).unwrap();
        assert!(d.upper <= crate::Ext::Finite(t.record.certificate.total()));
    }

    #[test]
    fn transport_identity_and_shift() {
        let f = ray(q(0));
        let g = ray(q(1));
        let fmap = BitMat::identity(1);
        let id = Certificate::identity(1);
        let t = transport_cone(&f, &g, &fmap, &f, &g, &id, &id).unwrap();
        assert_eq!(t.map.map, fmap);
        assert_eq!(t.record.certificate.total(), q(0));

        let h = qq(1, 2);
        let f2 = ray(h.clone());
        let g2 = ray(q(1) + h.clone());
        let cf = cert(&f, &f2, q(0), h.clone());
        let cg = cert(&g, &g2, q(0), h.clone());
        let t = transport_cone(&f, &g, &fmap, &f2, &g2, &cf, &cg).unwrap();
        assert!(t.record.certificate.total() <= q(8) * h);
    }

    #[test]
    fn tower_base_case_and_one_step() {
        let g0 = ray(q(0));
        let g1 = ray(q(1));
        let base_only = ConeTower { base: g0.clone(), stages: vec![] };
        let h = qq(1, 4);
        let g0p = ray(h.clone());
        let c0 = cert(&g0, &g0p, q(0), h.clone());
        let (_, rec) = transport_tower(&base_only, &[(g0p.clone(), c0.clone())]).unwrap();
        assert_eq!(rec.certificate, c0);
        assert_eq!(rec.bound, h);

        let tower = ConeTower { base: g0.clone(), stages: vec![(g1.clone(), BitMat::identity(1))] };
        let g1p = ray(q(1) + h.clone());
        let c1 = cert(&g1, &g1p, q(0), h.clone());
        let (maps, rec) = transport_tower(&tower, &[(g0p, c0), (g1p, c1)]).unwrap();
        assert_eq!(rec.output, mapping_cone(&maps[0].source, &maps[0].target, &maps[0].map).unwrap());
        assert!(rec.certificate.total() <= q(8) * h);
        assert_eq!(rec.trace.len(), 2);
    }

    #[test]
    fn sum_examples() {
        let pairs: Vec<(TwistedComplex<Rational>, TwistedComplex<Rational>)> =
            (0..3).map(|i| (ray(q(i)), ray(q(i) + qq(1, 2)))).collect();
        let certs: Vec<Certificate<Rational>> = pairs.iter().map(|(f, g)| cert(f, g, q(0), qq(1, 2))).collect();
        let args: Vec<_> = pairs.iter().zip(&certs).map(|((f, g), c)| (f, g, c)).collect();
        let rec = sum_certificates(&args).unwrap();
        assert!(rec.certificate.total() <= q(1));
        let same = ray(q(0));
        let id = Certificate::identity(1);
        let rec = sum_certificates(&[(&same, &same, &id)]).unwrap();
        assert_eq!(rec.certificate.total(), q(0));
    }
}
