//! Finite groups of real orthogonal matrices, enumerated from generators.

use std::collections::{HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{orthogonality_residual, RealMatrix, RealVector};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ORDER: usize = 100_000;

/// Anything that acts on `ℝ^dim` through a finite list of orthogonal
/// matrices indexed by the elements of a group. Averages over the group are
/// averages over this list, with multiplicity.
pub trait OrthogonalAction {
    fn dim(&self) -> usize;
    fn matrices(&self) -> &[RealMatrix];

    /// Indices into `matrices()` of a generating set.
    fn generator_indices(&self) -> &[usize];

    fn order(&self) -> usize {
        self.matrices().len()
    }
}

/// Generators of a matrix group, validated to be orthogonal.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    pub dim: usize,
    pub generators: Vec<RealMatrix>,
    pub tol: f64,
}

impl GeneratorSet {
    pub fn new(dim: usize, generators: Vec<RealMatrix>, tol: f64) -> Result<Self> {
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::Invalid(format!("tolerance must be positive, got {tol}")));
        }
        for (index, g) in generators.iter().enumerate() {
            if g.nrows() != dim || g.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: g.nrows().max(g.ncols()),
                });
            }
            let residual = orthogonality_residual(g);
            if residual > tol {
                return Err(Error::NonOrthogonalGenerator { index, residual });
            }
        }
        Ok(GeneratorSet { dim, generators, tol })
    }
}

/// Near-duplicate lookup for real arrays under the max-norm. Items are
/// bucketed by a quantized generic linear functional; a query probes its own
/// cell and both neighbours, then confirms candidates entrywise.
#[derive(Clone, Debug)]
pub(crate) struct ProximityIndex {
    weights: Vec<f64>,
    cell: f64,
    tol: f64,
    buckets: HashMap<i64, Vec<usize>>,
}

impl ProximityIndex {
    pub(crate) fn new(len: usize, tol: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(0x006f_7262_6974);
        let weights = (0..len).map(|_| rng.random_range(1.0..2.0)).collect();
        // keys of two items within `tol` differ by at most 2·len·tol
        let cell = (4.0 * len as f64 * tol).max(1e-6);
        ProximityIndex {
            weights,
            cell,
            tol,
            buckets: HashMap::new(),
        }
    }

    fn key(&self, x: &[f64]) -> i64 {
        let s: f64 = self.weights.iter().zip(x).map(|(w, v)| w * v).sum();
        (s / self.cell).floor() as i64
    }

    pub(crate) fn find<'a>(&self, x: &[f64], items: impl Fn(usize) -> &'a [f64]) -> Option<usize> {
        let k = self.key(x);
        for probe in [k, k - 1, k + 1] {
            if let Some(ids) = self.buckets.get(&probe) {
                for &id in ids {
                    let y = items(id);
                    if x.iter().zip(y).all(|(a, b)| (a - b).abs() <= self.tol) {
                        return Some(id);
                    }
                }
            }
        }
        None
    }

    pub(crate) fn insert(&mut self, id: usize, x: &[f64]) {
        let k = self.key(x);
        self.buckets.entry(k).or_default().push(id);
    }
}

/// A fully enumerated finite group of orthogonal matrices.
///
/// Element 0 is the identity. `words[k]` lists generator indices whose
/// left-to-right product is element `k`.
#[derive(Clone, Debug)]
pub struct FiniteMatrixGroup {
    dim: usize,
    tol: f64,
    elements: Vec<RealMatrix>,
    words: Vec<Vec<usize>>,
    generators: Vec<usize>,
    index: ProximityIndex,
}

impl OrthogonalAction for FiniteMatrixGroup {
    fn dim(&self) -> usize {
        self.dim
    }

    fn matrices(&self) -> &[RealMatrix] {
        &self.elements
    }

    fn generator_indices(&self) -> &[usize] {
        &self.generators
    }
}

/// Breadth-first closure of the generators under left multiplication.
pub fn enumerate_closure(gens: &GeneratorSet, max_order: usize) -> Result<FiniteMatrixGroup> {
    let dim = gens.dim;
    let mut group = FiniteMatrixGroup {
        dim,
        tol: gens.tol,
        elements: Vec::new(),
        words: Vec::new(),
        generators: Vec::new(),
        index: ProximityIndex::new(dim * dim, gens.tol),
    };
    group.push(RealMatrix::identity(dim, dim), Vec::new());
    if max_order == 0 {
        return Err(Error::OrderCapExceeded { max_order });
    }
    let mut queue = VecDeque::from([0usize]);
    while let Some(cur) = queue.pop_front() {
        for (s, g) in gens.generators.iter().enumerate() {
            let prod = g * &group.elements[cur];
            if group.index_of(&prod).is_none() {
                if group.elements.len() == max_order {
                    return Err(Error::OrderCapExceeded { max_order });
                }
                let mut word = vec![s];
                word.extend_from_slice(&group.words[cur]);
                let id = group.push(prod, word);
                queue.push_back(id);
            }
        }
    }
    group.generators = gens
        .generators
        .iter()
        .map(|g| group.index_of(g).expect("generators lie in their closure"))
        .collect();
    log::debug!("enumerated group of order {} in dimension {}", group.order(), dim);
    Ok(group)
}

impl FiniteMatrixGroup {
    fn push(&mut self, m: RealMatrix, word: Vec<usize>) -> usize {
        let id = self.elements.len();
        self.index.insert(id, m.as_slice());
        self.elements.push(m);
        self.words.push(word);
        id
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn elements(&self) -> &[RealMatrix] {
        &self.elements
    }

    pub fn element(&self, k: usize) -> &RealMatrix {
        &self.elements[k]
    }

    pub fn word(&self, k: usize) -> &[usize] {
        &self.words[k]
    }

    pub fn index_of(&self, m: &RealMatrix) -> Option<usize> {
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return None;
        }
        self.index.find(m.as_slice(), |id| self.elements[id].as_slice())
    }

    /// Index of `elements[a] · elements[b]`.
    pub fn product_index(&self, a: usize, b: usize) -> usize {
        let p = &self.elements[a] * &self.elements[b];
        self.index_of(&p).expect("group is closed under products")
    }

    pub fn inverse_index(&self, a: usize) -> usize {
        self.index_of(&self.elements[a].transpose())
            .expect("group is closed under inverses")
    }

    /// The left regular representation `L_g e_h = e_{gh}` as a group of
    /// permutation matrices, with elements and generators in the same order.
    pub fn regular_representation(&self) -> FiniteMatrixGroup {
        let n = self.order();
        let mut out = FiniteMatrixGroup {
            dim: n,
            tol: self.tol,
            elements: Vec::with_capacity(n),
            words: self.words.clone(),
            generators: self.generators.clone(),
            index: ProximityIndex::new(n * n, self.tol),
        };
        for g in 0..n {
            let mut m = RealMatrix::zeros(n, n);
            for h in 0..n {
                m[(self.product_index(g, h), h)] = 1.0;
            }
            out.index.insert(g, m.as_slice());
            out.elements.push(m);
        }
        out
    }
}

/// The images of a group under a (not necessarily faithful) orthogonal
/// representation, one matrix per group element.
#[derive(Clone, Debug)]
pub struct Representation {
    dim: usize,
    matrices: Vec<RealMatrix>,
    generators: Vec<usize>,
}

impl OrthogonalAction for Representation {
    fn dim(&self) -> usize {
        self.dim
    }

    fn matrices(&self) -> &[RealMatrix] {
        &self.matrices
    }

    fn generator_indices(&self) -> &[usize] {
        &self.generators
    }
}

impl Representation {
    pub fn new(dim: usize, matrices: Vec<RealMatrix>, generators: Vec<usize>) -> Self {
        Representation {
            dim,
            matrices,
            generators,
        }
    }
}

impl From<&FiniteMatrixGroup> for Representation {
    fn from(g: &FiniteMatrixGroup) -> Self {
        Representation::new(g.dim, g.elements.clone(), g.generators.clone())
    }
}

/// Restriction `g ↦ Bᵀ ρ(g) B` to the invariant subspace spanned by the
/// orthonormal columns of `basis`.
pub fn restrict<A: OrthogonalAction + ?Sized>(action: &A, basis: &RealMatrix) -> Representation {
    let bt = basis.transpose();
    let matrices = action.matrices().iter().map(|g| &bt * g * basis).collect();
    Representation::new(basis.ncols(), matrices, action.generator_indices().to_vec())
}

pub fn act(g: &RealMatrix, v: &RealVector) -> Result<RealVector> {
    if g.ncols() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: g.ncols(),
            found: v.len(),
        });
    }
    Ok(g * v)
}

/// Distinct points of the orbit `Gv`, in group-element order, deduplicated
/// within `tol` in the max-norm.
pub fn orbit_points<A: OrthogonalAction + ?Sized>(action: &A, v: &RealVector, tol: f64) -> Result<Vec<RealVector>> {
    if v.len() != action.dim() {
        return Err(Error::DimensionMismatch {
            expected: action.dim(),
            found: v.len(),
        });
    }
    let mut index = ProximityIndex::new(v.len(), tol);
    let mut points: Vec<RealVector> = Vec::new();
    for g in action.matrices() {
        let p = g * v;
        if index.find(p.as_slice(), |id| points[id].as_slice()).is_none() {
            index.insert(points.len(), p.as_slice());
            points.push(p);
        }
    }
    Ok(points)
}

/// Number of group elements fixing `v` within `tol`.
pub fn stabilizer_order<A: OrthogonalAction + ?Sized>(action: &A, v: &RealVector, tol: f64) -> usize {
    action
        .matrices()
        .iter()
        .filter(|g| ((*g) * v - v).amax() <= tol)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rot(theta: f64) -> RealMatrix {
        let (s, c) = theta.sin_cos();
        RealMatrix::from_row_slice(2, 2, &[c, -s, s, c])
    }

    fn gens(dim: usize, g: Vec<RealMatrix>) -> GeneratorSet {
        GeneratorSet::new(dim, g, DEFAULT_TOL).unwrap()
    }

    fn s3_standard() -> FiniteMatrixGroup {
        let refl = RealMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        enumerate_closure(&gens(2, vec![rot(2.0 * std::f64::consts::PI / 3.0), refl]), 100).unwrap()
    }

    #[test]
    fn cyclic_four() {
        let g = enumerate_closure(&gens(2, vec![rot(std::f64::consts::FRAC_PI_2)]), 100).unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(g.element(0), &RealMatrix::identity(2, 2));
        assert_eq!(g.word(2), &[0, 0]);
        assert_eq!(g.generator_indices(), &[1]);
    }

    #[test]
    fn s3_order_and_closure() {
        let g = s3_standard();
        assert_eq!(g.order(), 6);
        for a in 0..6 {
            assert!(orthogonality_residual(g.element(a)) < 1e-12);
            let mut image: Vec<usize> = (0..6).map(|b| g.product_index(a, b)).collect();
            image.sort();
            assert_eq!(image, (0..6).collect::<Vec<_>>());
            assert_eq!(g.product_index(a, g.inverse_index(a)), 0);
        }
        for a in 0..6 {
            for b in 0..6 {
                if a != b {
                    assert!((g.element(a) - g.element(b)).amax() > 1e-3);
                }
            }
        }
    }

    #[test]
    fn irrational_rotation_hits_cap() {
        let err = enumerate_closure(&gens(2, vec![rot(1.0)]), 10_000).unwrap_err();
        assert!(matches!(err, Error::OrderCapExceeded { max_order: 10_000 }));
    }

    #[test]
    fn non_orthogonal_generator_rejected() {
        let bad = RealMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(matches!(
            GeneratorSet::new(2, vec![bad], DEFAULT_TOL),
            Err(Error::NonOrthogonalGenerator { index: 0, .. })
        ));
        assert!(GeneratorSet::new(3, vec![rot(0.5)], DEFAULT_TOL).is_err());
    }

    #[test]
    fn orbits() {
        let c4 = enumerate_closure(&gens(2, vec![rot(std::f64::consts::FRAC_PI_2)]), 100).unwrap();
        let pts = orbit_points(&c4, &RealVector::from_vec(vec![1.0, 0.0]), 1e-9).unwrap();
        assert_eq!(pts.len(), 4);
        for expected in [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]] {
            let e = RealVector::from_row_slice(&expected);
            assert!(pts.iter().any(|p| (p - &e).amax() < 1e-12));
        }

        let s3 = s3_standard();
        let fixed = RealVector::from_vec(vec![1.0, 0.0]);
        let pts = orbit_points(&s3, &fixed, 1e-9).unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!(pts.len() * stabilizer_order(&s3, &fixed, 1e-9), 6);

        let trivial = enumerate_closure(&gens(3, vec![]), 10).unwrap();
        let v = RealVector::from_vec(vec![0.6, 0.0, 0.8]);
        assert_eq!(orbit_points(&trivial, &v, 1e-9).unwrap(), vec![v.clone()]);
        assert!(orbit_points(&trivial, &RealVector::zeros(2), 1e-9).is_err());
        assert!(act(s3.element(1), &RealVector::zeros(3)).is_err());
    }

    #[test]
    fn orbit_stabilizer_on_generic_vector() {
        let s3 = s3_standard();
        let v = RealVector::from_vec(vec![0.28, 0.96]);
        assert_eq!(orbit_points(&s3, &v, 1e-9).unwrap().len(), 6);
        assert_eq!(stabilizer_order(&s3, &v, 1e-9), 1);
    }

    #[test]
    fn regular_representation_permutes() {
        let g = s3_standard();
        let reg = g.regular_representation();
        assert_eq!(reg.dim(), 6);
        assert_eq!(reg.order(), 6);
        for a in 0..6 {
            for b in 0..6 {
                let lhs = reg.element(g.product_index(a, b));
                let rhs = reg.element(a) * reg.element(b);
                assert_eq!(lhs, &rhs);
            }
        }
    }
}
