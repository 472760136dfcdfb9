//! Construction and classification of 2-design orbits.
//!
//! Inside an isotypic component `Mat_{n×m}(D)`, the orbit of `M` is a
//! 2-design exactly when `M̄ᵀM = (1/m)·I_m`. Across components, the pieces
//! must additionally carry weights `‖π_{V_i}(v)‖² = dim V_i / dim V`.

use serde::Serialize;

use crate::dalg::{random_d_unitary, DMatrix};
use crate::error::{Error, Result};
use crate::linalg::{RealMatrix, RealVector};
use crate::repdec::Decomposition;

/// Where the `O_D(n)` element for one component comes from.
#[derive(Clone, Debug)]
pub enum UnitarySource {
    /// Draw `U` with [`random_d_unitary`].
    Seed(u64),
    Matrix(DMatrix),
}

/// `π_{n,m}(U)`: the first `m` columns of `U`.
pub fn column_projection(u: &DMatrix, m: usize) -> DMatrix {
    u.first_columns(m)
}

/// `(1/√m)·π_{n,m}(U)`, of Frobenius norm one when `U ∈ O_D(n)`.
pub fn isotypic_matrix(u: &DMatrix, m: usize) -> DMatrix {
    column_projection(u, m).scaled(1.0 / (m as f64).sqrt())
}

fn resolve(dec: &Decomposition, index: usize, source: &UnitarySource) -> Result<DMatrix> {
    let c = dec.component(index)?;
    if c.m() > c.n() {
        return Err(Error::MultiplicityExceedsDimension {
            component: index,
            n: c.n(),
            m: c.m(),
        });
    }
    let u = match source {
        UnitarySource::Seed(s) => random_d_unitary(c.fs_tag(), c.n(), *s),
        UnitarySource::Matrix(u) => u.clone(),
    };
    if u.tag() != c.fs_tag() {
        return Err(Error::TagMismatch(c.fs_tag(), u.tag()));
    }
    if u.rows() != c.n() || u.cols() != c.n() {
        return Err(Error::DimensionMismatch {
            expected: c.n(),
            found: u.rows(),
        });
    }
    let resid = u.gram().max_abs_diff(&DMatrix::identity(c.fs_tag(), c.n()));
    if resid > 1e-9 {
        return Err(Error::Invalid(format!("U is not in O_D(n) (residual {resid:.3e})")));
    }
    Ok(u)
}

/// Unit vector in component `index` (ambient coordinates) whose orbit is a
/// 2-design in that component.
pub fn construct_isotypic_design(dec: &Decomposition, index: usize, source: &UnitarySource) -> Result<RealVector> {
    let u = resolve(dec, index, source)?;
    let c = dec.component(index)?;
    c.lift(&isotypic_matrix(&u, c.m()))
}

#[derive(Clone, Debug)]
pub struct GlobalDesign {
    pub vector: RealVector,
    /// Orthonormal basis of the selected subrepresentation `V`.
    pub target_basis: RealMatrix,
    pub components: Vec<usize>,
    /// `√(dim V_i / dim V)` per selected component.
    pub weights: Vec<f64>,
}

/// `v = Σ √(dim V_i / dim V)·lift((1/√m_i)·π_{n_i,m_i}(U_i))` over the
/// selected components.
pub fn construct_global_design(dec: &Decomposition, selection: &[(usize, UnitarySource)]) -> Result<GlobalDesign> {
    if selection.is_empty() {
        return Err(Error::Invalid("no components selected".into()));
    }
    let components: Vec<usize> = selection.iter().map(|(i, _)| *i).collect();
    for (k, i) in components.iter().enumerate() {
        if components[..k].contains(i) {
            return Err(Error::Invalid(format!("component {i} selected twice")));
        }
    }
    let dims: Vec<usize> = components
        .iter()
        .map(|&i| dec.component(i).map(|c| c.dim_real()))
        .collect::<Result<_>>()?;
    let total: usize = dims.iter().sum();
    let mut vector = RealVector::zeros(dec.ambient_dim());
    let mut weights = Vec::with_capacity(selection.len());
    for ((i, src), dim) in selection.iter().zip(&dims) {
        let w = (*dim as f64 / total as f64).sqrt();
        vector.axpy(w, &construct_isotypic_design(dec, *i, src)?, 1.0);
        weights.push(w);
    }
    Ok(GlobalDesign {
        vector,
        target_basis: dec.subspace_basis(&components)?,
        components,
        weights,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentClassification {
    pub index: usize,
    /// `chart(π_{V_i}(v))`.
    pub matrix: DMatrix,
    pub scale_observed: f64,
    pub scale_expected: f64,
    /// `‖gram(M_i/‖M_i‖_F) − (1/m_i)·I‖_max`, absent when the projection
    /// vanishes.
    pub gram_residual: Option<f64>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationResult {
    pub components: Vec<ComponentClassification>,
    /// Norm of the part of `v` outside the target subrepresentation.
    pub outside_residual: f64,
    pub tol: f64,
    pub overall_pass: bool,
}

/// Tests the two structural conditions for `Gv` to be a 2-design in the
/// subrepresentation `V = ⊕_{i ∈ targets} V_i`: each `M_i` has scaled
/// identity gram, and each component carries weight `dim V_i / dim V`.
pub fn classify_orbit(
    dec: &Decomposition,
    targets: &[usize],
    v: &RealVector,
    tol: f64,
) -> Result<ClassificationResult> {
    if v.len() != dec.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: dec.ambient_dim(),
            found: v.len(),
        });
    }
    let norm = v.norm();
    if norm.is_nan() || (norm - 1.0).abs() > tol {
        return Err(Error::NotUnitVector { norm, tol });
    }
    let total: usize = targets
        .iter()
        .map(|&i| dec.component(i).map(|c| c.dim_real()))
        .sum::<Result<usize>>()?;
    let mut outside = v.clone();
    let mut components = Vec::with_capacity(targets.len());
    for &i in targets {
        let c = dec.component(i)?;
        let coords = c.project(v)?;
        outside -= c.real_basis() * &coords;
        let matrix = c.to_matrix(&coords)?;
        let scale_observed = coords.norm();
        let scale_expected = (c.dim_real() as f64 / total as f64).sqrt();
        let gram_residual = (scale_observed > tol).then(|| {
            let target = DMatrix::identity(c.fs_tag(), c.m()).scaled(1.0 / c.m() as f64);
            matrix.scaled(1.0 / scale_observed).gram().max_abs_diff(&target)
        });
        let pass = (scale_observed - scale_expected).abs() <= tol && gram_residual.is_some_and(|r| r <= tol);
        components.push(ComponentClassification {
            index: i,
            matrix,
            scale_observed,
            scale_expected,
            gram_residual,
            pass,
        });
    }
    let outside_residual = outside.norm();
    let overall_pass = !components.is_empty() && outside_residual <= tol && components.iter().all(|c| c.pass);
    Ok(ClassificationResult {
        components,
        outside_residual,
        tol,
        overall_pass,
    })
}
