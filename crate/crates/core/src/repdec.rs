//! Isotypic decomposition of a real orthogonal representation.
//!
//! The decomposition works purely with group averages:
//!
//! 1. The fixed subspace (trivial summand) is the range of `(1/|G|) Σ ρ(g)`.
//! 2. The rest is split by eigenspaces of averaged random symmetric
//!    operators, which lie in the commutant. A subspace is irreducible once
//!    its symmetric commutant is one-dimensional.
//! 3. Each irreducible gets a Frobenius–Schur type from the dimension of its
//!    full commutant (1, 2 or 4), and irreducibles are grouped into isotypic
//!    components by testing whether averaged random maps between them vanish.
//! 4. Within a component, commutant structure maps turn the first copy into a
//!    right D-module with a D-orthonormal basis; averaged intertwiners carry
//!    that basis to the other copies. The result identifies the component
//!    with `Mat_{n×m}(D)`, on which `G` acts by left multiplication.

use std::cmp::Ordering;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dalg::{AlgebraTag, DMatrix, DScalar, RealificationChart};
use crate::error::{Error, Result};
use crate::group::{restrict, OrthogonalAction, Representation};
use crate::linalg::{
    canonical_basis, cluster_sorted, gaussian_matrix, null_space, polar_factor, random_symmetric,
    symmetric_eigen_sorted, RealMatrix, RealVector,
};

/// Relative gap below which eigenvalues of an invariant sample are merged.
pub const EIGEN_CLUSTER_TOL: f64 = 1e-7;
/// Invariant samples drawn per refinement round.
pub const SAMPLES_PER_ROUND: usize = 5;
/// Refinement rounds before giving up on a subspace.
pub const MAX_ROUNDS: usize = 4;
/// A split whose smallest relative eigenvalue gap reaches this is taken at once.
const COMFORTABLE_GAP: f64 = 1e-3;
const STRUCTURE_TOL: f64 = 1e-8;
const STRUCTURE_RETRIES: usize = 8;

/// One isotypic component `V_i ≅ Mat_{n×m}(D)`.
#[derive(Clone, Debug)]
pub struct IsotypicComponent {
    real_basis: RealMatrix,
    fs_tag: AlgebraTag,
    n: usize,
    m: usize,
    rho: Vec<DMatrix>,
}

impl IsotypicComponent {
    /// Orthonormal columns in ambient coordinates, ordered by the
    /// realification chart of `Mat_{n×m}(D)`.
    pub fn real_basis(&self) -> &RealMatrix {
        &self.real_basis
    }

    pub fn fs_tag(&self) -> AlgebraTag {
        self.fs_tag
    }

    /// D-dimension of the irreducible.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Multiplicity of the irreducible.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim_real(&self) -> usize {
        self.n * self.m * self.fs_tag.dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.real_basis.nrows()
    }

    pub fn chart(&self) -> RealificationChart {
        RealificationChart::new(self.fs_tag, self.n, self.m)
    }

    /// `ρ_i(g) ∈ O_D(n)` for every group element, in group order.
    pub fn rho(&self) -> &[DMatrix] {
        &self.rho
    }

    pub fn projector(&self) -> RealMatrix {
        &self.real_basis * self.real_basis.transpose()
    }

    /// Ambient basis of copy `c` (columns `c·n·d .. (c+1)·n·d`).
    pub fn copy_basis(&self, c: usize) -> RealMatrix {
        let k = self.n * self.fs_tag.dim();
        self.real_basis.columns(c * k, k).into_owned()
    }

    /// Component coordinates of the orthogonal projection of `v`.
    pub fn project(&self, v: &RealVector) -> Result<RealVector> {
        if v.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                found: v.len(),
            });
        }
        Ok(self.real_basis.tr_mul(v))
    }

    /// D-matrix of a vector given in component coordinates.
    pub fn to_matrix(&self, coords: &RealVector) -> Result<DMatrix> {
        DMatrix::from_realified(self.fs_tag, self.n, self.m, coords.as_slice())
    }

    /// `chart(π_{V_i}(v))`.
    pub fn matrix_of(&self, v: &RealVector) -> Result<DMatrix> {
        self.to_matrix(&self.project(v)?)
    }

    /// Ambient vector corresponding to a D-matrix.
    pub fn lift(&self, m: &DMatrix) -> Result<RealVector> {
        if m.tag() != self.fs_tag {
            return Err(Error::TagMismatch(self.fs_tag, m.tag()));
        }
        if m.rows() != self.n || m.cols() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.n * self.m,
                found: m.rows() * m.cols(),
            });
        }
        Ok(&self.real_basis * RealVector::from_vec(m.realify_vector()))
    }

    /// Largest `‖chart(g·w) − ρ_i(g)·chart(w)‖` over the given group
    /// elements and probe vectors (component coordinates).
    pub fn intertwining_residual<A: OrthogonalAction + ?Sized>(
        &self,
        action: &A,
        elements: &[usize],
        probes: &[RealVector],
    ) -> f64 {
        let mut worst = 0.0f64;
        for &g in elements {
            let rg = self.rho[g].realify_operator();
            for w in probes {
                let amb = &self.real_basis * w;
                let moved = self.real_basis.tr_mul(&(&action.matrices()[g] * amb));
                let mut lhs = RealVector::zeros(w.len());
                // ρ_i(g) acts on each column block of the realified matrix
                let k = rg.nrows();
                for c in 0..self.m {
                    let block = w.rows(c * k, k);
                    lhs.rows_mut(c * k, k).copy_from(&(&rg * block));
                }
                worst = worst.max((moved - lhs).amax());
            }
        }
        worst
    }
}

/// The isotypic decomposition of an orthogonal representation.
#[derive(Clone, Debug)]
pub struct Decomposition {
    ambient_dim: usize,
    components: Vec<IsotypicComponent>,
    trivial_basis: RealMatrix,
    seed: u64,
}

impl Decomposition {
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn components(&self) -> &[IsotypicComponent] {
        &self.components
    }

    pub fn component(&self, i: usize) -> Result<&IsotypicComponent> {
        self.components.get(i).ok_or(Error::UnknownComponent(i))
    }

    pub fn trivial_multiplicity(&self) -> usize {
        self.trivial_basis.ncols()
    }

    /// Orthonormal basis of the fixed subspace.
    pub fn trivial_basis(&self) -> &RealMatrix {
        &self.trivial_basis
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn nontrivial_indices(&self) -> Vec<usize> {
        (0..self.components.len()).collect()
    }

    /// Columns of the selected components' bases, concatenated in order.
    pub fn subspace_basis(&self, indices: &[usize]) -> Result<RealMatrix> {
        let mut cols = Vec::new();
        for &i in indices {
            let c = self.component(i)?;
            cols.extend(c.real_basis.column_iter().map(|col| col.into_owned()));
        }
        Ok(if cols.is_empty() {
            RealMatrix::zeros(self.ambient_dim, 0)
        } else {
            RealMatrix::from_columns(&cols)
        })
    }
}

/// `(1/|G|) Σ ρ(g) S ρ(g)ᵀ` for a random symmetric `S`; lies in the commutant.
pub fn invariant_symmetric_sample<A: OrthogonalAction + ?Sized>(action: &A, seed: u64) -> RealMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = random_symmetric(&mut rng, action.dim());
    average_conjugate(action, action, &s)
}

/// `(1/|G|) Σ ρ_to(g) R ρ_from(g)ᵀ`, the projection of `R` onto
/// `Hom_G(from, to)`.
pub fn averaged_map<A, B>(to: &A, from: &B, r: &RealMatrix) -> RealMatrix
where
    A: OrthogonalAction + ?Sized,
    B: OrthogonalAction + ?Sized,
{
    average_conjugate(to, from, r)
}

fn average_conjugate<A, B>(to: &A, from: &B, r: &RealMatrix) -> RealMatrix
where
    A: OrthogonalAction + ?Sized,
    B: OrthogonalAction + ?Sized,
{
    let mut acc = RealMatrix::zeros(to.dim(), from.dim());
    for (gt, gf) in to.matrices().iter().zip(from.matrices()) {
        acc += gt * r * gf.transpose();
    }
    acc / to.order() as f64
}

/// Dimension of the symmetric part of the commutant, from
/// `(1/|G|) Σ (tr ρ(g)² + tr ρ(g²)) / 2`.
pub fn symmetric_commutant_dim<A: OrthogonalAction + ?Sized>(action: &A) -> f64 {
    let total: f64 = action
        .matrices()
        .iter()
        .map(|g| {
            let t = g.trace();
            let t2 = g.component_mul(&g.transpose()).sum();
            (t * t + t2) / 2.0
        })
        .sum();
    total / action.order() as f64
}

/// Orthonormal basis (as flattened column-major `k×k` matrices) of the
/// commutant, from the null space of `A ↦ [ρ(s), A]` over the generators.
pub fn commutant_basis<A: OrthogonalAction + ?Sized>(action: &A) -> Vec<RealMatrix> {
    let k = action.dim();
    let gens = action.generator_indices();
    let mut sys = RealMatrix::zeros(k * k * gens.len().max(1), k * k);
    for (s, &gi) in gens.iter().enumerate() {
        let g = &action.matrices()[gi];
        // vec(GA − AG) = (I⊗G − Gᵀ⊗I) vec(A), column-major vec
        for a in 0..k {
            for b in 0..k {
                let col = b * k + a;
                for i in 0..k {
                    // (G A)_{i b} picks A_{a b} with weight G_{i a}
                    sys[(s * k * k + b * k + i, col)] += g[(i, a)];
                    // (A G)_{a j} picks A_{a b} with weight G_{b j}
                    sys[(s * k * k + i * k + a, col)] -= g[(b, i)];
                }
            }
        }
    }
    let ns = null_space(&sys, 1e-6);
    ns.column_iter()
        .map(|c| RealMatrix::from_column_slice(k, k, c.as_slice()))
        .collect()
}

/// Frobenius–Schur type of an irreducible invariant subspace with
/// orthonormal basis `basis`.
pub fn fs_type<A: OrthogonalAction + ?Sized>(action: &A, basis: &RealMatrix) -> Result<AlgebraTag> {
    let rep = restrict(action, basis);
    let dim = commutant_basis(&rep).len();
    match AlgebraTag::from_dim(dim) {
        Some(tag) if basis.ncols().is_multiple_of(tag.dim()) => Ok(tag),
        _ => Err(Error::UnexpectedCommutantDim(dim)),
    }
}

fn is_irreducible(rep: &Representation) -> bool {
    (symmetric_commutant_dim(rep) - 1.0).abs() < 0.25
}

/// Splits the invariant subspace spanned by `basis` into irreducible
/// invariant subspaces (each returned with a canonical orthonormal basis).
pub fn split_irreducibles<A: OrthogonalAction + ?Sized>(
    action: &A,
    basis: &RealMatrix,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<RealMatrix>> {
    let mut work = Vec::new();
    if basis.ncols() > 0 {
        work.push(basis.clone());
    }
    let mut out = Vec::new();
    while let Some(w) = work.pop() {
        let rep = restrict(action, &w);
        if is_irreducible(&rep) {
            out.push(canonical_basis(&w));
            continue;
        }
        let mut best: Option<(f64, Vec<RealMatrix>)> = None;
        'rounds: for _ in 0..MAX_ROUNDS {
            for _ in 0..SAMPLES_PER_ROUND {
                let s = random_symmetric(rng, rep.dim());
                let t = average_conjugate(&rep, &rep, &s);
                let (vals, vecs) = symmetric_eigen_sorted(&t);
                let clusters = cluster_sorted(&vals, EIGEN_CLUSTER_TOL);
                if clusters.len() < 2 {
                    continue;
                }
                let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let gap = clusters
                    .windows(2)
                    .map(|p| (vals[p[1].start] - vals[p[0].end - 1]) / scale)
                    .fold(f64::INFINITY, f64::min);
                if best.as_ref().is_none_or(|(g, _)| gap > *g) {
                    let pieces = clusters.iter().map(|r| &w * vecs.columns(r.start, r.len())).collect();
                    best = Some((gap, pieces));
                }
                if gap >= COMFORTABLE_GAP {
                    break 'rounds;
                }
            }
            if best.is_some() {
                break;
            }
        }
        match best {
            Some((gap, pieces)) => {
                log::trace!("split dim {} into {} pieces (gap {gap:.2e})", w.ncols(), pieces.len());
                work.extend(pieces);
            }
            None => return Err(Error::DegenerateSplit { dim: w.ncols() }),
        }
    }
    Ok(out)
}

/// Compares two real arrays lexicographically, treating entries within
/// `tol` as equal.
fn lex_cmp(a: &[f64], b: &[f64], tol: f64) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > tol {
            return x.total_cmp(y);
        }
    }
    a.len().cmp(&b.len())
}

fn projector_key(basis: &RealMatrix) -> Vec<f64> {
    let p = basis * basis.transpose();
    let mut key: Vec<f64> = p.diagonal().iter().copied().collect();
    key.extend(p.iter().copied());
    key
}

fn equivalent(a: &Representation, b: &Representation, rng: &mut ChaCha8Rng) -> bool {
    if a.dim() != b.dim() {
        return false;
    }
    (0..2).any(|_| {
        let r = gaussian_matrix(rng, b.dim(), a.dim());
        let m = average_conjugate(b, a, &r);
        m.norm() > 1e-6 * r.norm()
    })
}

fn skew_sample(rep: &Representation, rng: &mut ChaCha8Rng) -> RealMatrix {
    let r = gaussian_matrix(rng, rep.dim(), rep.dim());
    let a = average_conjugate(rep, rep, &r);
    (&a - a.transpose()) * 0.5
}

fn square_plus_identity(j: &RealMatrix) -> f64 {
    let k = j.nrows();
    (j * j + RealMatrix::identity(k, k)).amax()
}

/// Right-multiplication operators `R_X` for `X ∈ 𝓘_D` on one irreducible
/// copy, satisfying `R_{XY} = R_Y R_X`.
fn structure_maps(rep: &Representation, tag: AlgebraTag, rng: &mut ChaCha8Rng) -> Result<Vec<RealMatrix>> {
    let k = rep.dim();
    let id = RealMatrix::identity(k, k);
    if tag == AlgebraTag::Real {
        return Ok(vec![id]);
    }
    let mut last_residual = f64::INFINITY;
    for _ in 0..STRUCTURE_RETRIES {
        let mut j = polar_factor(&skew_sample(rep, rng));
        let res_j = square_plus_identity(&j);
        if res_j > STRUCTURE_TOL {
            last_residual = res_j;
            continue;
        }
        if tag == AlgebraTag::Complex {
            // sign fixed so the largest entry of the first column is positive
            let (r, _) = j.column(0).iamax_full();
            if j[(r, 0)] < 0.0 {
                j = -j;
            }
            return Ok(vec![id, j]);
        }
        let s2 = skew_sample(rep, rng);
        let coeff = j.dot(&s2) / j.dot(&j);
        let kk = polar_factor(&(&s2 - &j * coeff));
        let res = square_plus_identity(&kk).max((&j * &kk + &kk * &j).amax());
        if res > STRUCTURE_TOL {
            last_residual = res;
            continue;
        }
        let k_unit = &kk * &j;
        return Ok(vec![id, j, kk, k_unit]);
    }
    Err(Error::StructureMapFailure {
        residual: last_residual,
    })
}

/// D-orthonormal basis `e_1..e_n` of a right D-module given by its
/// structure maps, returned as the real matrix whose column `X·n + j` is
/// `e_j·X`.
fn d_orthonormal_basis(units: &[RealMatrix]) -> RealMatrix {
    let k = units[0].nrows();
    let d = units.len();
    let n = k / d;
    let mut es: Vec<RealVector> = Vec::with_capacity(n);
    let mut used = vec![false; k];
    for _ in 0..n {
        let resid: Vec<RealVector> = (0..k)
            .map(|c| {
                let mut v = RealVector::zeros(k);
                v[c] = 1.0;
                for e in &es {
                    for r in units {
                        let q = r * e;
                        let coef = q.dot(&v);
                        v.axpy(-coef, &q, 1.0);
                    }
                }
                v
            })
            .collect();
        let norms: Vec<f64> = resid.iter().map(|v| v.norm()).collect();
        let best = (0..k).filter(|&c| !used[c]).map(|c| norms[c]).fold(0.0f64, f64::max);
        let pick = (0..k)
            .find(|&c| !used[c] && norms[c] >= best * (1.0 - 1e-6))
            .expect("candidate exists");
        used[pick] = true;
        es.push(&resid[pick] / norms[pick]);
    }
    let mut out = RealMatrix::zeros(k, k);
    for (x, r) in units.iter().enumerate() {
        for (j, e) in es.iter().enumerate() {
            out.set_column(x * n + j, &(r * e));
        }
    }
    out
}

/// Builds the D-coordinate chart for an isotypic component given the
/// ambient bases of its irreducible copies. Returns the component with
/// `ρ_i(g)` for every group element.
pub fn build_chart<A: OrthogonalAction + ?Sized>(
    action: &A,
    copies: &[RealMatrix],
    tag: AlgebraTag,
    seed: u64,
) -> Result<IsotypicComponent> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    build_chart_with(action, copies, tag, &mut rng)
}

fn build_chart_with<A: OrthogonalAction + ?Sized>(
    action: &A,
    copies: &[RealMatrix],
    tag: AlgebraTag,
    rng: &mut ChaCha8Rng,
) -> Result<IsotypicComponent> {
    let first = copies
        .first()
        .ok_or_else(|| Error::Invalid("component without copies".into()))?;
    let k = first.ncols();
    let d = tag.dim();
    if k % d != 0 || copies.iter().any(|c| c.ncols() != k) {
        return Err(Error::Invalid(format!("copy dimensions incompatible with {tag}")));
    }
    let n = k / d;
    let rep1 = restrict(action, first);
    let units = structure_maps(&rep1, tag, rng)?;
    let e = d_orthonormal_basis(&units);
    let base1 = first * &e;

    let mut cols: Vec<RealMatrix> = vec![base1.clone()];
    for copy in &copies[1..] {
        let rep_c = restrict(action, copy);
        let r = gaussian_matrix(rng, k, k);
        let phi = polar_factor(&average_conjugate(&rep_c, &rep1, &r));
        cols.push(copy * phi * &e);
    }
    let mut real_basis = RealMatrix::zeros(action.dim(), k * copies.len());
    for (c, b) in cols.iter().enumerate() {
        real_basis.columns_mut(c * k, k).copy_from(b);
    }

    let rho = action
        .matrices()
        .iter()
        .map(|g| {
            let rg = base1.transpose() * g * &base1;
            DMatrix::from_fn(tag, n, n, |i, j| {
                let mut c = [0.0; 4];
                for &x in tag.units() {
                    c[x.index()] = rg[(x.index() * n + i, j)];
                }
                DScalar::from_slice(tag, &c)
            })
        })
        .collect();

    Ok(IsotypicComponent {
        real_basis,
        fs_tag: tag,
        n,
        m: copies.len(),
        rho,
    })
}

/// Decomposes the whole ambient representation.
pub fn decompose<A: OrthogonalAction + ?Sized>(action: &A, seed: u64) -> Result<Decomposition> {
    let id = RealMatrix::identity(action.dim(), action.dim());
    decompose_subspace(action, &id, seed)
}

/// Decomposes the invariant subspace spanned by the orthonormal columns of
/// `basis`.
pub fn decompose_subspace<A: OrthogonalAction + ?Sized>(
    action: &A,
    basis: &RealMatrix,
    seed: u64,
) -> Result<Decomposition> {
    let ambient_dim = action.dim();
    if basis.nrows() != ambient_dim {
        return Err(Error::DimensionMismatch {
            expected: ambient_dim,
            found: basis.nrows(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rep = restrict(action, basis);
    let fixed = rep
        .matrices()
        .iter()
        .fold(RealMatrix::zeros(rep.dim(), rep.dim()), |acc, g| acc + g)
        / rep.order() as f64;
    let (vals, vecs) = symmetric_eigen_sorted(&fixed);
    let triv: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > 0.5).collect();
    let rest: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] <= 0.5).collect();
    let pick = |idx: &[usize]| {
        let sel = RealMatrix::from_fn(vecs.nrows(), idx.len(), |r, c| vecs[(r, idx[c])]);
        basis * sel
    };
    let trivial_basis = if triv.is_empty() {
        RealMatrix::zeros(ambient_dim, 0)
    } else {
        canonical_basis(&pick(&triv))
    };
    let nontrivial = pick(&rest);

    let irreducibles = split_irreducibles(action, &nontrivial, &mut rng)?;

    // group irreducibles into isotypic classes
    let mut classes: Vec<(AlgebraTag, Representation, Vec<RealMatrix>)> = Vec::new();
    for w in irreducibles {
        let tag = fs_type(action, &w)?;
        let rep_w = restrict(action, &w);
        let mut placed = false;
        for (ctag, crep, members) in classes.iter_mut() {
            if *ctag == tag && equivalent(crep, &rep_w, &mut rng) {
                members.push(w.clone());
                placed = true;
                break;
            }
        }
        if !placed {
            classes.push((tag, rep_w, vec![w]));
        }
    }

    let mut components = Vec::with_capacity(classes.len());
    for (tag, _, mut copies) in classes {
        copies.sort_by(|a, b| lex_cmp(&projector_key(a), &projector_key(b), 1e-6));
        components.push(build_chart_with(action, &copies, tag, &mut rng)?);
    }
    let keys: Vec<Vec<f64>> = components.iter().map(|c| projector_key(&c.real_basis)).collect();
    let mut order: Vec<usize> = (0..components.len()).collect();
    order.sort_by(|&a, &b| {
        let (ca, cb) = (&components[a], &components[b]);
        (ca.n * ca.fs_tag.dim(), ca.fs_tag.dim(), ca.m)
            .cmp(&(cb.n * cb.fs_tag.dim(), cb.fs_tag.dim(), cb.m))
            .then_with(|| lex_cmp(&keys[a], &keys[b], 1e-6))
    });
    let mut slots: Vec<Option<IsotypicComponent>> = components.into_iter().map(Some).collect();
    let components = order
        .into_iter()
        .map(|i| slots[i].take().expect("each slot once"))
        .collect();

    Ok(Decomposition {
        ambient_dim,
        components,
        trivial_basis,
        seed,
    })
}
