//! Approximation of 1-Lipschitz complexes by iterated cones of wrapped
//! generators `a + d(·, x)`.
//!
//! All comparisons happen after projection to the 1-Lipschitz class.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::barcode::{cone_tower_from_barcode, gabriel_decompose, stalk_complex, Barcode};
use crate::cone_calculus::{sum_certificates, transport_tower, ConeTower, StageTrace, TransportError};
use crate::gf2::BitMat;
use crate::graph::{CechCover, GraphError, GraphPoint, MetricGraph, Region};
use crate::interleave::{distance_bounds, CertError, Certificate, DistanceResult, DEFAULT_CAP};
use crate::scalar::Scalar;
use crate::tamefn::{TameError, TameFunction};
use crate::twisted::{mapping_cone, Generator, TwistedComplex, TwistedError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Input,
    Cover,
    Cech,
    Tree,
    Stalk,
    Transport,
    Output,
    Measure,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Input => "input",
            Stage::Cover => "cover",
            Stage::Cech => "cech",
            Stage::Tree => "tree",
            Stage::Stalk => "stalk",
            Stage::Transport => "transport",
            Stage::Output => "output",
            Stage::Measure => "measure",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum DensityError {
    #[error("epsilon must be positive")]
    Epsilon,
    #[error("generator {0} is not 1-Lipschitz and finite")]
    NotLipschitz(usize),
    #[error("cover piece {0} is empty")]
    EmptyPiece(usize),
    #[error("cover misses {0}")]
    Uncovered(String),
    #[error("piece radius {radius} exceeds {epsilon}")]
    Radius { radius: String, epsilon: String },
    #[error("stalk of the augmented cone is not acyclic at {0}")]
    NotExact(String),
    #[error("[{stage}] {message}")]
    Stage { stage: Stage, message: String },
}

fn at<E: fmt::Display>(stage: Stage) -> impl Fn(E) -> DensityError {
    move |e| DensityError::Stage { stage, message: e.to_string() }
}

/// The wrapped generator `a + d(·, x)` in degree `deg`.
#[derive(Clone, Debug, PartialEq)]
pub struct WGenerator<S> {
    pub x: GraphPoint<S>,
    pub a: S,
    pub deg: i64,
}

impl<S: Scalar> WGenerator<S> {
    pub fn new(x: GraphPoint<S>, a: S, deg: i64) -> Self {
        WGenerator { x, a, deg }
    }

    pub fn function(&self, graph: &Arc<MetricGraph<S>>) -> TameFunction<S> {
        TameFunction::distance_cone(graph.clone(), &self.x, self.a.clone(), S::one())
    }

    pub fn generator(&self, graph: &Arc<MetricGraph<S>>) -> Generator<S> {
        Generator::new(self.function(graph), self.deg)
    }

    /// Reads a generator back as a wrapped generator, if it is one.
    pub fn recognize(g: &Generator<S>) -> Option<Self> {
        g.fun.as_cone(&S::one()).map(|(x, a)| WGenerator { x, a, deg: g.deg })
    }
}

/// Generator-wise 1-Lipschitz envelope.
pub fn project<S: Scalar>(c: &TwistedComplex<S>) -> Result<TwistedComplex<S>, TwistedError> {
    c.map_functions(|f| f.lipschitz_envelope(&S::one()))
}

/// Interleaving distance between `W_(x,a)` and `W_(y,b)`.
pub fn w_distance<S: Scalar>(graph: &MetricGraph<S>, x: &GraphPoint<S>, a: &S, y: &GraphPoint<S>, b: &S) -> S {
    let d = graph.distance(x, y);
    let gap = (a.clone() - b.clone()).abs();
    if gap <= d {
        d.clone() + d
    } else {
        gap + d
    }
}

/// `F ⊗ ι_Z` with generators split into connected pieces; `owner[i]` is the
/// generator of `F` that piece `i` came from.
#[derive(Clone, Debug)]
pub struct Restriction<S> {
    pub complex: TwistedComplex<S>,
    pub owner: Vec<usize>,
}

pub fn restrict<S: Scalar>(f: &TwistedComplex<S>, z: &Region<S>) -> Result<Restriction<S>, TwistedError> {
    let mut owner = Vec::new();
    let mut gens = Vec::new();
    for (k, g) in f.gens().iter().enumerate() {
        for part in g.fun.tensor_indicator(z).split_components() {
            owner.push(k);
            gens.push(Generator::new(part, g.deg));
        }
    }
    let n = gens.len();
    let mut d = BitMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if f.diff().get(owner[i], owner[j]) && gens[j].fun.pointwise_leq(&gens[i].fun)? {
                d.set(i, j, true);
            }
        }
    }
    let complex = TwistedComplex::new(f.graph().clone(), gens, d)?;
    Ok(Restriction { complex, owner })
}

/// The one-step Čech tower of `F` over a cover with only pairwise overlaps.
#[derive(Clone, Debug)]
pub struct CechTower<S> {
    pub pieces: Vec<Restriction<S>>,
    pub cells: Vec<Restriction<S>>,
    /// `⊕_i F ⊗ ι_{U_i}`.
    pub c0: TwistedComplex<S>,
    /// `⊕_{i<j} F ⊗ ι_{U_ij}`.
    pub c1: TwistedComplex<S>,
    /// Restriction map `C_0 → C_1`.
    pub restriction: BitMat,
    /// `Cone(C_0 → C_1)[−1]`.
    pub total: TwistedComplex<S>,
    /// `F → total`.
    pub augmentation: BitMat,
    /// Points where the stalk of `Cone(augmentation)` was checked acyclic.
    pub checked: Vec<GraphPoint<S>>,
}

impl<S: Scalar> CechTower<S> {
    /// Positions of each piece's generators inside `c0`.
    pub fn piece_offsets(&self) -> Vec<usize> {
        offsets(self.pieces.iter().map(|p| p.complex.len()))
    }

    pub fn cell_offsets(&self) -> Vec<usize> {
        offsets(self.cells.iter().map(|p| p.complex.len()))
    }
}

fn offsets(lens: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut out = vec![0];
    for l in lens {
        out.push(out.last().unwrap() + l);
    }
    out
}

/// Checks that every piece is nonempty and that the pieces cover the graph.
pub fn check_cover<S: Scalar>(graph: &MetricGraph<S>, cover: &CechCover<S>) -> Result<(), DensityError> {
    for (i, p) in cover.pieces.iter().enumerate() {
        if p.is_empty() || p.vertices.len() != graph.vertex_count() || p.intervals.len() != graph.edge_count() {
            return Err(DensityError::EmptyPiece(i));
        }
    }
    for v in 0..graph.vertex_count() {
        if !cover.pieces.iter().any(|p| p.vertices[v]) {
            return Err(DensityError::Uncovered(graph.name(v).to_string()));
        }
    }
    for (k, e) in graph.edges().iter().enumerate() {
        let mut spans: Vec<(S, S)> = cover.pieces.iter().flat_map(|p| p.intervals[k].iter().cloned()).collect();
        spans.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("total order"));
        let mut reach = S::zero();
        for (lo, hi) in spans {
            if lo > reach {
                break;
            }
            if hi > reach {
                reach = hi;
            }
        }
        if reach < e.len {
            return Err(DensityError::Uncovered(format!("edge {k} beyond offset {reach}")));
        }
    }
    for cell in &cover.nerve {
        if cell.subset.len() != 2 || cell.subset.iter().any(|&i| i >= cover.pieces.len()) {
            return Err(DensityError::Stage { stage: Stage::Cover, message: format!("nerve cell {:?} is not a pair", cell.subset) });
        }
    }
    Ok(())
}

/// Vertices and edge midpoints.
pub fn sample_points<S: Scalar>(graph: &MetricGraph<S>) -> Vec<GraphPoint<S>> {
    let mut out: Vec<GraphPoint<S>> = (0..graph.vertex_count()).map(GraphPoint::Vertex).collect();
    out.extend((0..graph.edge_count()).map(|k| graph.midpoint(k)));
    out
}

pub fn cech_tower<S: Scalar>(
    f: &TwistedComplex<S>,
    cover: &CechCover<S>,
    samples: &[GraphPoint<S>],
) -> Result<CechTower<S>, DensityError> {
    let graph = f.graph().clone();
    check_cover(&graph, cover)?;
    let pieces: Result<Vec<_>, _> = cover.pieces.par_iter().map(|z| restrict(f, z)).collect();
    let pieces = pieces.map_err(at(Stage::Cech))?;
    let cells: Result<Vec<_>, _> = cover.nerve.par_iter().map(|c| restrict(f, &c.region)).collect();
    let cells = cells.map_err(at(Stage::Cech))?;
    let c0 = TwistedComplex::direct_sum(graph.clone(), &pieces.iter().map(|p| &p.complex).collect::<Vec<_>>()).map_err(at(Stage::Cech))?;
    let c1 = TwistedComplex::direct_sum(graph.clone(), &cells.iter().map(|p| &p.complex).collect::<Vec<_>>()).map_err(at(Stage::Cech))?;
    let po = offsets(pieces.iter().map(|p| p.complex.len()));
    let co = offsets(cells.iter().map(|p| p.complex.len()));
    let mut restriction = BitMat::zeros(c1.len(), c0.len());
    for (e, cell) in cover.nerve.iter().enumerate() {
        for &i in &cell.subset {
            for (bi, &kb) in cells[e].owner.iter().enumerate() {
                for (ai, &ka) in pieces[i].owner.iter().enumerate() {
                    let (row, col) = (co[e] + bi, po[i] + ai);
                    if ka == kb && c0.gens()[col].fun.pointwise_leq(&c1.gens()[row].fun).map_err(at(Stage::Cech))? {
                        restriction.set(row, col, true);
                    }
                }
            }
        }
    }
    let total = mapping_cone(&c0, &c1, &restriction).map_err(at(Stage::Cech))?.shift(-1);
    let mut augmentation = BitMat::zeros(total.len(), f.len());
    for (i, p) in pieces.iter().enumerate() {
        for (ai, &k) in p.owner.iter().enumerate() {
            augmentation.set(po[i] + ai, k, true);
        }
    }
    let aug_cone = mapping_cone(f, &total, &augmentation).map_err(at(Stage::Cech))?;
    let exact: Result<Vec<bool>, TwistedError> = samples
        .par_iter()
        .map(|x| Ok(gabriel_decompose(&stalk_complex(&aug_cone, x)?)?.barcode.is_empty()))
        .collect();
    let exact = exact.map_err(at(Stage::Cech))?;
    if let Some(i) = exact.iter().position(|ok| !ok) {
        return Err(DensityError::NotExact(format!("{:?}", samples[i])));
    }
    Ok(CechTower { pieces, cells, c0, c1, restriction, total, augmentation, checked: samples.to_vec() })
}

/// A shortest-path spanning tree of the nerve rooted at a graph center.
/// Piece `v` is the star of vertex `v`.
#[derive(Clone, Debug, PartialEq)]
pub struct NerveTree {
    pub root: usize,
    /// Nerve cells used, in increasing order.
    pub cells: Vec<usize>,
    /// `parent[v] = (parent piece, nerve cell)`.
    pub parent: Vec<Option<(usize, usize)>>,
}

impl NerveTree {
    pub fn new<S: Scalar>(graph: &MetricGraph<S>, cover: &CechCover<S>) -> Result<Self, DensityError> {
        let n = cover.pieces.len();
        if n != graph.vertex_count() || cover.centers.iter().enumerate().any(|(i, c)| c != &GraphPoint::Vertex(i)) {
            return Err(DensityError::Stage { stage: Stage::Tree, message: "cover is not a vertex-star cover".into() });
        }
        let root = (0..n)
            .map(|v| (graph.eccentricity(v), v))
            .min_by(|x, y| x.partial_cmp(y).expect("total order"))
            .map(|p| p.1)
            .ok_or(DensityError::EmptyPiece(0))?;
        let mut parent = vec![None; n];
        for (e, cell) in cover.nerve.iter().enumerate() {
            let (i, j) = (cell.subset[0], cell.subset[1]);
            let joins = |k: &&usize| {
                let ed = graph.edge(**k);
                (ed.a, ed.b) == (i, j) || (ed.a, ed.b) == (j, i)
            };
            let Some(len) = graph.incident(i).iter().find(joins).map(|&k| graph.edge(k).len.clone()) else {
                continue;
            };
            for (child, up) in [(i, j), (j, i)] {
                if child != root && graph.vdist(root, up).clone() + len.clone() == *graph.vdist(root, child) && parent[child].is_none() {
                    parent[child] = Some((up, e));
                }
            }
        }
        if let Some(v) = (0..n).find(|&v| v != root && parent[v].is_none()) {
            return Err(DensityError::Uncovered(format!("piece {v} is not reachable in the nerve")));
        }
        let mut cells: Vec<usize> = parent.iter().flatten().map(|p| p.1).collect();
        cells.sort_unstable();
        Ok(NerveTree { root, cells, parent })
    }

    /// Pieces in the subtree hanging below each tree cell, indexed like `cells`.
    pub fn subtrees(&self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut children = vec![Vec::new(); n];
        for (v, p) in self.parent.iter().enumerate() {
            if let Some((up, _)) = p {
                children[*up].push(v);
            }
        }
        self.cells
            .iter()
            .map(|&e| {
                let child = (0..n).find(|&v| matches!(self.parent[v], Some((_, c)) if c == e)).expect("tree cell");
                let mut out = Vec::new();
                let mut queue = VecDeque::from([child]);
                while let Some(v) = queue.pop_front() {
                    out.push(v);
                    queue.extend(children[v].iter().copied());
                }
                out.sort_unstable();
                out
            })
            .collect()
    }
}

/// The projected tree tower and the contraction certificate `F ↔ ΠTot_tree`.
#[derive(Clone, Debug)]
pub struct TreeStage<S> {
    pub tree: NerveTree,
    /// `Π(F ⊗ ι_{U_i})`, one per piece.
    pub pieces: Vec<TwistedComplex<S>>,
    /// `Π(F ⊗ ι_{U_e})`, one per tree cell.
    pub cells: Vec<TwistedComplex<S>>,
    pub tower: ConeTower<S>,
    /// `ΠTot_tree`.
    pub total: TwistedComplex<S>,
    pub certificate: Certificate<S>,
}

fn threshold_of<S: Scalar>(source: &TameFunction<S>, target: &TameFunction<S>) -> Result<Option<S>, TameError> {
    Ok(source.sup_difference(target)?.clipped())
}

pub fn tree_stage<S: Scalar>(f: &TwistedComplex<S>, cover: &CechCover<S>, tower: &CechTower<S>) -> Result<TreeStage<S>, DensityError> {
    let n = f.len();
    for (i, r) in tower.pieces.iter().chain(&tower.cells).enumerate() {
        if r.owner != (0..n).collect::<Vec<_>>() {
            return Err(DensityError::Stage { stage: Stage::Tree, message: format!("restriction {i} splits a generator") });
        }
    }
    let tree = NerveTree::new(f.graph(), cover)?;
    let pieces: Result<Vec<_>, _> = tower.pieces.par_iter().map(|p| project(&p.complex)).collect();
    let pieces = pieces.map_err(at(Stage::Tree))?;
    let cells: Result<Vec<_>, _> = tree.cells.par_iter().map(|&e| project(&tower.cells[e].complex)).collect();
    let cells = cells.map_err(at(Stage::Tree))?;
    let graph = f.graph().clone();
    let c0 = TwistedComplex::direct_sum(graph.clone(), &pieces.iter().collect::<Vec<_>>()).map_err(at(Stage::Tree))?;
    let c1 = TwistedComplex::direct_sum(graph.clone(), &cells.iter().collect::<Vec<_>>()).map_err(at(Stage::Tree))?;
    let rows: Vec<usize> = tree.cells.iter().flat_map(|&e| (e * n..(e + 1) * n).collect::<Vec<_>>()).collect();
    let all: Vec<usize> = (0..c0.len()).collect();
    let restriction = tower.restriction.select(&rows, &all);
    let cone = mapping_cone(&c0, &c1, &restriction).map_err(at(Stage::Tree))?;
    let total = cone.shift(-1);
    let n0 = c0.len();
    let m = total.len();
    let root = tree.root;
    let mut u = BitMat::zeros(m, n);
    for i in 0..pieces.len() {
        for k in 0..n {
            u.set(i * n + k, k, true);
        }
    }
    let mut v = BitMat::zeros(n, m);
    let mut h_g = BitMat::zeros(m, m);
    let mut b = S::zero();
    let mut need = |src: &TameFunction<S>, dst: &TameFunction<S>| -> Result<(), DensityError> {
        match threshold_of(src, dst).map_err(at(Stage::Tree))? {
            Some(t) if t > b => b = t,
            Some(_) => {}
            None => return Err(DensityError::Stage { stage: Stage::Tree, message: "contraction entry is never allowed".into() }),
        }
        Ok(())
    };
    for k in 0..n {
        v.set(k, root * n + k, true);
        need(&pieces[root].gens()[k].fun, &f.gens()[k].fun)?;
    }
    for (t, sub) in tree.subtrees().iter().enumerate() {
        for &piece in sub {
            for k in 0..n {
                h_g.set(piece * n + k, n0 + t * n + k, true);
                need(&cells[t].gens()[k].fun, &pieces[piece].gens()[k].fun)?;
            }
        }
    }
    let certificate = Certificate { a: S::zero(), b, u, v, h_f: BitMat::zeros(n, n), h_g };
    certificate.verify(f, &total).map_err(at(Stage::Tree))?;
    Ok(TreeStage { tree, pieces, cells, tower: ConeTower { base: c0, stages: vec![(c1, restriction)] }, total, certificate })
}

/// A projected piece replaced by the wrapped generators of its stalk.
#[derive(Clone, Debug)]
pub struct StalkReplacement<S> {
    pub center: GraphPoint<S>,
    /// Largest shift needed between the piece and its stalk cones.
    pub spread: S,
    pub barcode: Barcode<S>,
    /// Projected barcode tower at the center.
    pub tower: TwistedComplex<S>,
    /// `Π(piece) ↔ tower`.
    pub certificate: Certificate<S>,
}

/// Replaces `Π(piece)` by the projected barcode tower of its stalk at
/// `center`. `radius` bounds the distance from `center` to the piece.
pub fn stalk_replace<S: Scalar>(
    piece: &TwistedComplex<S>,
    center: &GraphPoint<S>,
    radius: &S,
    epsilon: &S,
) -> Result<StalkReplacement<S>, DensityError> {
    if radius > epsilon {
        return Err(DensityError::Radius { radius: radius.to_string(), epsilon: epsilon.to_string() });
    }
    let graph = piece.graph().clone();
    let stalk = stalk_complex(piece, center).map_err(at(Stage::Stalk))?;
    if stalk.len() != piece.len() {
        return Err(DensityError::Stage { stage: Stage::Stalk, message: format!("center {center:?} lies outside a generator") });
    }
    let dec = gabriel_decompose(&stalk).map_err(at(Stage::Stalk))?;
    let proj = project(piece).map_err(at(Stage::Stalk))?;
    let gens = piece
        .gens()
        .iter()
        .map(|g| {
            let a = g.fun.value_at(center).finite().expect("finite at center").clone();
            Generator::new(TameFunction::distance_cone(graph.clone(), center, a, S::one()), g.deg)
        })
        .collect();
    let cones = TwistedComplex::new(graph.clone(), gens, piece.diff().clone()).map_err(at(Stage::Stalk))?;
    let mut spread = S::zero();
    for (p, c) in proj.gens().iter().zip(cones.gens()) {
        match c.fun.sup_difference(&p.fun).map_err(at(Stage::Stalk))?.clipped() {
            Some(t) if t > spread => spread = t,
            Some(_) => {}
            None => return Err(DensityError::Stage { stage: Stage::Stalk, message: "stalk cone never dominates the piece".into() }),
        }
    }
    let n = piece.len();
    let diagonal = Certificate {
        a: S::zero(),
        b: spread.clone(),
        u: BitMat::identity(n),
        v: BitMat::identity(n),
        h_f: BitMat::zeros(n, n),
        h_g: BitMat::zeros(n, n),
    };
    let tower = project(&cone_tower_from_barcode(&graph, &dec.barcode, center)).map_err(at(Stage::Stalk))?;
    let certificate = diagonal.compose(&dec.certificate);
    certificate.verify(&proj, &tower).map_err(at(Stage::Stalk))?;
    Ok(StalkReplacement { center: center.clone(), spread, barcode: dec.barcode, tower, certificate })
}

#[derive(Clone, Debug)]
pub struct DensifyOptions {
    pub cap: u64,
    /// Largest `|F| + |C|` for which the measured upper bound is searched
    /// for; larger pairs rely on the certificate alone.
    pub search_limit: usize,
}

impl Default for DensifyOptions {
    fn default() -> Self {
        DensifyOptions { cap: DEFAULT_CAP, search_limit: 12 }
    }
}

/// What each stage of `densify` produced.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityTrace<S> {
    pub fixed_point: bool,
    pub mesh: S,
    pub pieces: usize,
    pub nerve_cells: usize,
    pub c0_len: usize,
    pub c1_len: usize,
    pub exactness_points: usize,
    pub root: usize,
    pub tree_cells: Vec<usize>,
    /// Shift of the tree-contraction certificate.
    pub tree_shift: S,
    pub centers: Vec<GraphPoint<S>>,
    pub spreads: Vec<S>,
    pub barcodes: Vec<Barcode<S>>,
    pub transport: Vec<StageTrace<S>>,
}

#[derive(Clone, Debug)]
pub struct DensityReport<S> {
    pub epsilon: S,
    /// The input on its original graph.
    pub input: TwistedComplex<S>,
    /// The input moved to the subdivided graph; the certificate starts here.
    pub fine_input: TwistedComplex<S>,
    pub trace: DensityTrace<S>,
    pub output: TwistedComplex<S>,
    /// Wrapped generators of the output by cone layer.
    pub layers: Vec<Vec<WGenerator<S>>>,
    pub certificate: Certificate<S>,
    pub bound: S,
    pub measured: DistanceResult<S>,
}

impl<S: Scalar> DensityReport<S> {
    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    /// Replays the certificate and the bound.
    pub fn verify(&self) -> Result<(), CertError> {
        self.certificate.verify(&self.fine_input, &self.output)?;
        if self.certificate.total() > self.bound {
            return Err(CertError::Homotopy("total exceeds bound"));
        }
        Ok(())
    }
}

/// `10·8ⁿ` with `n = 1`.
pub fn density_constant<S: Scalar>() -> S {
    S::from_u64(80).expect("small integer")
}

pub fn densify<S: Scalar>(f: &TwistedComplex<S>, epsilon: &S) -> Result<DensityReport<S>, DensityError> {
    densify_with(f, epsilon, &DensifyOptions::default())
}

pub fn densify_with<S: Scalar>(f: &TwistedComplex<S>, epsilon: &S, opts: &DensifyOptions) -> Result<DensityReport<S>, DensityError> {
    if !epsilon.is_positive() {
        return Err(DensityError::Epsilon);
    }
    if let Some(i) = f.gens().iter().position(|g| !g.fun.is_lipschitz(&S::one())) {
        return Err(DensityError::NotLipschitz(i));
    }
    let bound = density_constant::<S>() * epsilon.clone();
    let wgens: Option<Vec<WGenerator<S>>> = f.gens().iter().map(WGenerator::recognize).collect();
    if let Some(w) = wgens {
        let trace = DensityTrace {
            fixed_point: true,
            mesh: epsilon.clone(),
            pieces: 0,
            nerve_cells: 0,
            c0_len: 0,
            c1_len: 0,
            exactness_points: 0,
            root: 0,
            tree_cells: Vec::new(),
            tree_shift: S::zero(),
            centers: Vec::new(),
            spreads: Vec::new(),
            barcodes: Vec::new(),
            transport: Vec::new(),
        };
        let certificate = Certificate::identity(f.len());
        return finish(f.clone(), f.clone(), f.clone(), vec![w, Vec::new()], certificate, epsilon, bound, trace, opts);
    }

    let (fine, sub) = f.graph().subdivide(epsilon);
    let fine = Arc::new(fine);
    let relocated = f.gens().iter().map(|g| Generator::new(g.fun.relocate(&fine, &sub), g.deg)).collect();
    let fine_input = TwistedComplex::new(fine.clone(), relocated, f.diff().clone()).map_err(at(Stage::Input))?;
    let cover = fine.star_cover().map_err(|e: GraphError| at(Stage::Cover)(e))?;
    let tower = cech_tower(&fine_input, &cover, &sample_points(&fine))?;
    let tree = tree_stage(&fine_input, &cover, &tower)?;

    let mut jobs: Vec<(&TwistedComplex<S>, GraphPoint<S>, S)> = Vec::new();
    for (i, p) in tree.pieces.iter().enumerate() {
        jobs.push((p, cover.centers[i].clone(), cover.radius[i].clone()));
    }
    for (t, &e) in tree.tree.cells.iter().enumerate() {
        let cell = &cover.nerve[e];
        let (i, j) = (cell.subset[0], cell.subset[1]);
        let k = fine
            .incident(i)
            .iter()
            .copied()
            .find(|&k| {
                let ed = fine.edge(k);
                (ed.a, ed.b) == (i, j) || (ed.a, ed.b) == (j, i)
            })
            .ok_or_else(|| DensityError::Stage { stage: Stage::Stalk, message: format!("nerve cell {e} has no edge") })?;
        jobs.push((&tree.cells[t], fine.midpoint(k), S::zero()));
    }
    // Stalks are taken of the unprojected pieces, which agree with the
    // projected ones at their centers.
    let raw: Vec<&TwistedComplex<S>> = tower.pieces.iter().map(|p| &p.complex).chain(tree.tree.cells.iter().map(|&e| &tower.cells[e].complex)).collect();
    let reps: Result<Vec<StalkReplacement<S>>, DensityError> = jobs
        .par_iter()
        .zip(raw.par_iter())
        .map(|((_, x, r), piece)| stalk_replace(piece, x, r, epsilon))
        .collect();
    let reps = reps?;
    let np = tree.pieces.len();
    let layer = |range: std::ops::Range<usize>, blocks: &[TwistedComplex<S>]| -> Result<(TwistedComplex<S>, Certificate<S>), DensityError> {
        let pairs: Vec<_> = blocks.iter().zip(&reps[range]).map(|(b, r)| (b, &r.tower, &r.certificate)).collect();
        let rec = sum_certificates(&pairs).map_err(|e: TransportError| at(Stage::Transport)(e))?;
        Ok((rec.output, rec.certificate))
    };
    let w0 = layer(0..np, &tree.pieces)?;
    let w1 = layer(np..reps.len(), &tree.cells)?;
    let (_, record) = transport_tower(&tree.tower, &[w0, w1]).map_err(|e| at(Stage::Transport)(e))?;
    let output = record.output.shift(-1);
    let certificate = tree.certificate.compose(&record.certificate);
    let split = tree.tower.base.len();
    let recognize = |gens: &[Generator<S>]| -> Result<Vec<WGenerator<S>>, DensityError> {
        gens.iter()
            .map(|g| WGenerator::recognize(g).ok_or_else(|| DensityError::Stage { stage: Stage::Output, message: "output generator is not a wrapped cone".into() }))
            .collect()
    };
    let layers = vec![recognize(&output.gens()[..split])?, recognize(&output.gens()[split..])?];
    let trace = DensityTrace {
        fixed_point: false,
        mesh: epsilon.clone(),
        pieces: cover.pieces.len(),
        nerve_cells: cover.nerve.len(),
        c0_len: tower.c0.len(),
        c1_len: tower.c1.len(),
        exactness_points: tower.checked.len(),
        root: tree.tree.root,
        tree_cells: tree.tree.cells.clone(),
        tree_shift: tree.certificate.b.clone(),
        centers: reps.iter().map(|r| r.center.clone()).collect(),
        spreads: reps.iter().map(|r| r.spread.clone()).collect(),
        barcodes: reps.iter().map(|r| r.barcode.clone()).collect(),
        transport: record.trace.clone(),
    };
    finish(f.clone(), fine_input, output, layers, certificate, epsilon, bound, trace, opts)
}

#[allow(clippy::too_many_arguments)]
fn finish<S: Scalar>(
    input: TwistedComplex<S>,
    fine_input: TwistedComplex<S>,
    output: TwistedComplex<S>,
    layers: Vec<Vec<WGenerator<S>>>,
    certificate: Certificate<S>,
    epsilon: &S,
    bound: S,
    trace: DensityTrace<S>,
    opts: &DensifyOptions,
) -> Result<DensityReport<S>, DensityError> {
    certificate.verify(&fine_input, &output).map_err(at(Stage::Output))?;
    if certificate.total() > bound {
        return Err(DensityError::Stage {
            stage: Stage::Output,
            message: format!("certified total {} exceeds {}", certificate.total(), bound),
        });
    }
    let samples: Vec<GraphPoint<S>> = (0..fine_input.graph().vertex_count()).map(GraphPoint::Vertex).collect();
    let budget = if fine_input.len() + output.len() <= opts.search_limit { usize::MAX } else { 0 };
    let measured = distance_bounds(&fine_input, &output, &samples, opts.cap, budget, Some(&certificate)).map_err(at(Stage::Measure))?;
    Ok(DensityReport { epsilon: epsilon.clone(), input, fine_input, trace, output, layers, certificate, bound, measured })
}

/// A chain of wrapped generators joining two members of a family.
#[derive(Clone, Debug, PartialEq)]
pub struct Chain<S> {
    pub from: usize,
    pub to: usize,
    /// `max(d(x, y), |a − b|)`.
    pub length: S,
    pub steps: Vec<(GraphPoint<S>, S)>,
    pub max_step: S,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusEntry<S> {
    pub index: usize,
    pub layers: usize,
    pub certified: Option<S>,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SoloReport<S> {
    pub epsilon: S,
    pub chains: Vec<Chain<S>>,
    pub corpus: Vec<CorpusEntry<S>>,
    pub failures: Vec<String>,
    /// Every corpus item is approximated by a two-layer cone.
    pub two_layers_suffice: bool,
}

/// A vertex reachable from a point: `(vertex, (edge, offset), distance)`.
type Exit<S> = (usize, Option<(usize, S)>, S);

/// Turning points of a shortest path from `x` to `y`, as edge segments
/// `(edge, from offset, to offset)`.
fn geodesic<S: Scalar>(graph: &MetricGraph<S>, x: &GraphPoint<S>, y: &GraphPoint<S>) -> Vec<(usize, S, S)> {
    let ends = |p: &GraphPoint<S>| -> Vec<Exit<S>> {
        match p {
            GraphPoint::Vertex(v) => vec![(*v, None, S::zero())],
            GraphPoint::OnEdge { edge, offset } => {
                let e = graph.edge(*edge);
                vec![(e.a, Some((*edge, offset.clone())), offset.clone()), (e.b, Some((*edge, offset.clone())), e.len.clone() - offset.clone())]
            }
        }
    };
    let total = graph.distance(x, y);
    if let (GraphPoint::OnEdge { edge: e1, offset: o1 }, GraphPoint::OnEdge { edge: e2, offset: o2 }) = (x, y) {
        if e1 == e2 && (o1.clone() - o2.clone()).abs() == total {
            return vec![(*e1, o1.clone(), o2.clone())];
        }
    }
    let mut segs = Vec::new();
    for (vx, ex, dx) in ends(x) {
        for (vy, ey, dy) in ends(y) {
            if dx.clone() + graph.vdist(vx, vy).clone() + dy.clone() != total {
                continue;
            }
            if let Some((k, o)) = ex {
                let end = if graph.edge(k).a == vx { S::zero() } else { graph.edge(k).len.clone() };
                segs.push((k, o, end));
            }
            let mut v = vx;
            while v != vy {
                let (k, w) = graph
                    .incident(v)
                    .iter()
                    .map(|&k| (k, if graph.edge(k).a == v { graph.edge(k).b } else { graph.edge(k).a }))
                    .find(|&(k, w)| graph.edge(k).len.clone() + graph.vdist(w, vy).clone() == *graph.vdist(v, vy))
                    .expect("shortest path step");
                let e = graph.edge(k);
                segs.push(if e.a == v { (k, S::zero(), e.len.clone()) } else { (k, e.len.clone(), S::zero()) });
                v = w;
            }
            if let Some((k, o)) = ey {
                let start = if graph.edge(k).a == vy { S::zero() } else { graph.edge(k).len.clone() };
                segs.push((k, start, o));
            }
            return segs;
        }
    }
    unreachable!("some endpoint pair realizes the distance")
}

/// The point at distance `t` from the start of a segment path.
fn walk<S: Scalar>(graph: &MetricGraph<S>, segs: &[(usize, S, S)], mut t: S) -> GraphPoint<S> {
    for (k, lo, hi) in segs {
        let len = (hi.clone() - lo.clone()).abs();
        if t <= len {
            let off = if hi >= lo { lo.clone() + t } else { lo.clone() - t };
            return graph.point_on_edge(*k, off).expect("offset on edge");
        }
        t = t - len;
    }
    match segs.last() {
        Some((k, _, hi)) => graph.point_on_edge(*k, hi.clone()).expect("offset on edge"),
        None => unreachable!("empty path handled by caller"),
    }
}

/// Joins `(x, a)` to `(y, b)` by `⌊L/ε⌋ + 1` equal steps along a geodesic.
pub fn chain<S: Scalar>(graph: &MetricGraph<S>, x: &GraphPoint<S>, a: &S, y: &GraphPoint<S>, b: &S, epsilon: &S) -> Vec<(GraphPoint<S>, S)> {
    let d = graph.distance(x, y);
    let gap = (b.clone() - a.clone()).abs();
    let length = if gap > d { gap } else { d.clone() };
    let mut k: u64 = 1;
    while S::from_u64(k).unwrap() * epsilon.clone() <= length {
        k += 1;
    }
    let segs = if d.is_zero() { Vec::new() } else { geodesic(graph, x, y) };
    (0..=k)
        .map(|i| {
            let s = S::from_u64(i).unwrap() / S::from_u64(k).unwrap();
            let p = if segs.is_empty() { x.clone() } else { walk(graph, &segs, d.clone() * s.clone()) };
            (p, a.clone() + (b.clone() - a.clone()) * s)
        })
        .collect()
}

pub fn solo_approximator_check<S: Scalar>(
    graph: &Arc<MetricGraph<S>>,
    gens: &[WGenerator<S>],
    corpus: &[TwistedComplex<S>],
    epsilon: &S,
) -> SoloReport<S> {
    let mut failures = Vec::new();
    let two = S::one() + S::one();
    let mut pairs = Vec::new();
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            pairs.push((i, j));
        }
    }
    let chains: Vec<Chain<S>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (g, h) = (&gens[i], &gens[j]);
            let steps = chain(graph, &g.x, &g.a, &h.x, &h.a, epsilon);
            let max_step = steps
                .windows(2)
                .map(|w| w_distance(graph, &w[0].0, &w[0].1, &w[1].0, &w[1].1))
                .fold(S::zero(), |m, s| if s > m { s } else { m });
            let d = graph.distance(&g.x, &h.x);
            let gap = (g.a.clone() - h.a.clone()).abs();
            let length = if gap > d { gap } else { d };
            let ok = g.deg == h.deg && max_step < two.clone() * epsilon.clone();
            Chain { from: i, to: j, length, steps, max_step, ok }
        })
        .collect();
    for c in chains.iter().filter(|c| !c.ok) {
        failures.push(format!("chain {}-{} has a step of {}", c.from, c.to, c.max_step));
    }
    let entries: Vec<CorpusEntry<S>> = corpus
        .par_iter()
        .enumerate()
        .map(|(index, c)| match densify(c, epsilon) {
            Ok(r) => {
                let ok = r.verify().is_ok() && r.layer_count() == 2;
                CorpusEntry { index, layers: r.layer_count(), certified: Some(r.certificate.total()), ok }
            }
            Err(_) => CorpusEntry { index, layers: 0, certified: None, ok: false },
        })
        .collect();
    for e in entries.iter().filter(|e| !e.ok) {
        failures.push(format!("corpus item {} is not approximated by two layers", e.index));
    }
    let two_layers_suffice = entries.iter().all(|e| e.ok);
    SoloReport { epsilon: epsilon.clone(), chains, corpus: entries, failures, two_layers_suffice }
}
