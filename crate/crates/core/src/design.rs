//! Moment tests for spherical 1- and 2-design orbits.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{restrict, OrthogonalAction};
use crate::linalg::{gaussian_matrix, gaussian_vector, RealMatrix, RealVector};

pub const DEFAULT_DESIGN_TOL: f64 = 1e-9;

fn check_len<A: OrthogonalAction + ?Sized>(action: &A, v: &RealVector) -> Result<()> {
    if v.len() != action.dim() {
        return Err(Error::DimensionMismatch {
            expected: action.dim(),
            found: v.len(),
        });
    }
    Ok(())
}

/// `(1/|G|) Σ g·v`.
pub fn first_moment<A: OrthogonalAction + ?Sized>(action: &A, v: &RealVector) -> Result<RealVector> {
    check_len(action, v)?;
    let mut acc = RealVector::zeros(v.len());
    for g in action.matrices() {
        acc += g * v;
    }
    Ok(acc / action.order() as f64)
}

/// `(1/|G|) Σ (g·v)(g·v)ᵀ`.
pub fn second_moment<A: OrthogonalAction + ?Sized>(action: &A, v: &RealVector) -> Result<RealMatrix> {
    check_len(action, v)?;
    let n = v.len();
    let mut acc = RealMatrix::zeros(n, n);
    for g in action.matrices() {
        let w = g * v;
        acc.ger(1.0, &w, &w, 1.0);
    }
    Ok(acc / action.order() as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DesignReport {
    pub dim: usize,
    pub group_order: usize,
    /// `‖(1/|G|) Σ g·v‖`. This is also the norm of the fixed-space component of `v`.
    pub first_moment_norm: f64,
    /// `‖SM − I/dim‖_max`.
    pub second_moment_deviation: f64,
    pub is_1_design: bool,
    pub is_2_design: bool,
    pub tol: f64,
    pub trivial_overlap_warning: bool,
}

fn report<A: OrthogonalAction + ?Sized>(action: &A, v: &RealVector, tol: f64) -> Result<DesignReport> {
    let norm = v.norm();
    if norm.is_nan() || (norm - 1.0).abs() > tol {
        return Err(Error::NotUnitVector { norm, tol });
    }
    let dim = action.dim();
    let m1 = first_moment(action, v)?;
    let sm = second_moment(action, v)?;
    let dev = (sm - RealMatrix::identity(dim, dim) / dim as f64).amax();
    let m1n = m1.norm();
    let is_1 = m1n <= tol;
    if m1n > tol {
        log::warn!("orbit meets the fixed subspace (first moment norm {m1n:.3e})");
    }
    Ok(DesignReport {
        dim,
        group_order: action.order(),
        first_moment_norm: m1n,
        second_moment_deviation: dev,
        is_1_design: is_1,
        is_2_design: is_1 && dev <= tol,
        tol,
        trivial_overlap_warning: m1n > tol,
    })
}

/// Moment test on the whole ambient space.
pub fn check_design<A: OrthogonalAction + ?Sized>(action: &A, v: &RealVector, tol: f64) -> Result<DesignReport> {
    report(action, v, tol)
}

/// Coordinates of `v` in the orthonormal columns of `basis`, provided `v`
/// lies in their span.
pub fn subspace_coordinates(basis: &RealMatrix, v: &RealVector, tol: f64) -> Result<RealVector> {
    if basis.nrows() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.nrows(),
            found: v.len(),
        });
    }
    let w = basis.tr_mul(v);
    let residual = (v - basis * &w).norm();
    if residual > tol.max(1e-12) * 10.0 {
        return Err(Error::NotInSubspace { residual });
    }
    Ok(w)
}

/// Moment test inside the invariant subspace spanned by `basis`: the sphere
/// is `S(V)` and the target second moment is `I_V / dim V`.
pub fn check_design_in<A: OrthogonalAction + ?Sized>(
    action: &A,
    basis: &RealMatrix,
    v: &RealVector,
    tol: f64,
) -> Result<DesignReport> {
    let w = subspace_coordinates(basis, v, tol)?;
    let rep = restrict(action, basis);
    report(&rep, &w, tol)
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectionReport {
    /// `π_W(v)/‖π_W(v)‖` in ambient coordinates.
    pub w_normalized: Vec<f64>,
    pub norm_sq_observed: f64,
    /// `dim W / dim V`.
    pub norm_sq_expected: f64,
    pub norm_ok: bool,
    pub sub_report: DesignReport,
}

/// Projects `v` (a design in a space of real dimension `dim_v`) onto the
/// invariant subspace `W` spanned by `w_basis` and re-checks the design
/// condition there.
pub fn project_design<A: OrthogonalAction + ?Sized>(
    action: &A,
    v: &RealVector,
    w_basis: &RealMatrix,
    dim_v: usize,
    tol: f64,
) -> Result<ProjectionReport> {
    check_len(action, v)?;
    let p = w_basis * w_basis.tr_mul(v);
    let nsq = p.norm_squared();
    if nsq.sqrt() <= tol {
        return Err(Error::ZeroProjection);
    }
    let w = p / nsq.sqrt();
    let expected = w_basis.ncols() as f64 / dim_v as f64;
    let sub = check_design_in(action, w_basis, &w, tol)?;
    Ok(ProjectionReport {
        w_normalized: w.iter().copied().collect(),
        norm_sq_observed: nsq,
        norm_sq_expected: expected,
        norm_ok: (nsq - expected).abs() <= tol,
        sub_report: sub,
    })
}

/// `x = Σ √(dim V_i / dim V)·x_i` for unit designs `x_i` in mutually
/// orthogonal invariant subspaces (given by orthonormal bases).
pub fn combine_designs<A: OrthogonalAction + ?Sized>(
    action: &A,
    parts: &[(RealMatrix, RealVector)],
    tol: f64,
) -> Result<RealVector> {
    let total: usize = parts.iter().map(|(b, _)| b.ncols()).sum();
    let mut x = RealVector::zeros(action.dim());
    for (i, (basis, xi)) in parts.iter().enumerate() {
        let ok = match check_design_in(action, basis, xi, tol) {
            Ok(r) => r.is_2_design,
            Err(Error::NotUnitVector { .. }) | Err(Error::NotInSubspace { .. }) => false,
            Err(e) => return Err(e),
        };
        if !ok {
            return Err(Error::ComponentNotDesign { index: i });
        }
        x.axpy((basis.ncols() as f64 / total as f64).sqrt(), xi, 1.0);
    }
    Ok(x)
}

/// Averages random quadratics `f(x) = xᵀAx + bᵀx + c` over the orbit and
/// compares with the exact sphere average `tr(A)/n + c`. Returns the
/// largest absolute discrepancy.
pub fn polynomial_average_check<A: OrthogonalAction + ?Sized>(
    action: &A,
    v: &RealVector,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    check_len(action, v)?;
    let n = v.len();
    let points: Vec<RealVector> = action.matrices().iter().map(|g| g * v).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let a = gaussian_matrix(&mut rng, n, n);
        let b = gaussian_vector(&mut rng, n);
        let c: f64 = StandardNormal.sample(&mut rng);
        let avg = points.iter().map(|x| x.dot(&(&a * x)) + b.dot(x) + c).sum::<f64>() / points.len() as f64;
        let exact = a.trace() / n as f64 + c;
        worst = worst.max((avg - exact).abs());
    }
    Ok(worst)
}

/// [`polynomial_average_check`] on the sphere of the subspace spanned by `basis`.
pub fn polynomial_average_check_in<A: OrthogonalAction + ?Sized>(
    action: &A,
    basis: &RealMatrix,
    v: &RealVector,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    let w = subspace_coordinates(basis, v, 1e-9)?;
    polynomial_average_check(&restrict(action, basis), &w, trials, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fixture_group;
    use crate::group::{enumerate_closure, GeneratorSet};
    use crate::linalg::random_unit_vector;
    use crate::repdec::decompose;
    use proptest::prelude::*;

    fn e(n: usize, i: usize) -> RealVector {
        let mut v = RealVector::zeros(n);
        v[i] = 1.0;
        v
    }

    #[test]
    fn moment_examples() {
        let c2 = fixture_group("c2_antipodal").unwrap();
        assert_eq!(first_moment(&c2, &e(2, 0)).unwrap().norm(), 0.0);
        assert_eq!(
            second_moment(&c2, &e(2, 0)).unwrap(),
            RealMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0])
        );
        let c4 = fixture_group("c4").unwrap();
        assert!((second_moment(&c4, &e(2, 0)).unwrap() - RealMatrix::identity(2, 2) * 0.5).amax() < 1e-15);
        let triv = enumerate_closure(&GeneratorSet::new(3, vec![], 1e-9).unwrap(), 10).unwrap();
        let v = RealVector::from_vec(vec![0.2, 0.3, -0.1]);
        assert_eq!(first_moment(&triv, &v).unwrap(), v);
        assert!(first_moment(&c4, &e(3, 0)).is_err());
    }

    #[test]
    fn design_examples() {
        let c4 = fixture_group("c4").unwrap();
        let r = check_design(&c4, &e(2, 0), 1e-9).unwrap();
        assert!(r.is_1_design && r.is_2_design && !r.trivial_overlap_warning);

        let c2 = fixture_group("c2_antipodal").unwrap();
        let r = check_design(&c2, &e(2, 0), 1e-9).unwrap();
        assert!(r.is_1_design && !r.is_2_design);
        assert!((r.second_moment_deviation - 0.5).abs() < 1e-15);

        let q8 = fixture_group("q8").unwrap();
        let sm = second_moment(&q8, &e(4, 0)).unwrap();
        assert!((sm - RealMatrix::identity(4, 4) * 0.25).amax() < 1e-12);
        assert!(check_design(&q8, &e(4, 0), 1e-9).unwrap().is_2_design);

        assert!(matches!(
            check_design(&c4, &RealVector::zeros(2), 1e-9),
            Err(Error::NotUnitVector { .. })
        ));
    }

    #[test]
    fn trivial_overlap_fails_first_moment() {
        let s3 = fixture_group("s3_permutation").unwrap();
        let v = RealVector::from_vec(vec![1.0, 0.0, 0.0]);
        let r = check_design(&s3, &v, 1e-9).unwrap();
        assert!(r.trivial_overlap_warning && !r.is_1_design && !r.is_2_design);
        assert!((r.first_moment_norm - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        // the orbit {e1, e2, e3} is a tight frame; only the first moment fails
        assert!(r.second_moment_deviation < 1e-15);
    }

    #[test]
    fn projection_norms_and_combination() {
        let g = fixture_group("dic3").unwrap();
        let dec = decompose(&g, 0).unwrap();
        let (b1, b2) = (dec.subspace_basis(&[0]).unwrap(), dec.subspace_basis(&[1]).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // multiplicity one: every unit vector in a component is a design
        let x1 = &b1 * random_unit_vector(&mut rng, 2);
        let x2 = &b2 * random_unit_vector(&mut rng, 4);
        let x = combine_designs(&g, &[(b1.clone(), x1.clone()), (b2.clone(), x2.clone())], 1e-9).unwrap();
        assert!((x.norm() - 1.0).abs() < 1e-12);
        assert!(check_design(&g, &x, 1e-9).unwrap().is_2_design);
        let p = project_design(&g, &x, &b1, 6, 1e-9).unwrap();
        assert!((p.norm_sq_observed - 1.0 / 3.0).abs() < 1e-12 && p.norm_ok);
        assert!(p.sub_report.is_2_design);
        let p = project_design(&g, &x, &b2, 6, 1e-9).unwrap();
        assert!((p.norm_sq_expected - 2.0 / 3.0).abs() < 1e-15 && p.norm_ok);

        let full = RealMatrix::identity(6, 6);
        let p = project_design(&g, &x, &full, 6, 1e-9).unwrap();
        assert_eq!(p.sub_report, check_design(&g, &x, 1e-9).unwrap());
        assert!(matches!(
            project_design(&g, &x1, &b2, 6, 1e-9),
            Err(Error::ZeroProjection)
        ));

        let single = combine_designs(&g, &[(b1.clone(), x1.clone())], 1e-9).unwrap();
        assert!((single - &x1).amax() < 1e-15);
        let bad = combine_designs(&g, &[(b1.clone(), x1.clone()), (b2.clone(), x1.clone())], 1e-9);
        assert!(matches!(bad, Err(Error::ComponentNotDesign { index: 1 })));
    }

    #[test]
    fn polynomial_oracle_examples() {
        let c4 = fixture_group("c4").unwrap();
        assert!(polynomial_average_check(&c4, &e(2, 0), 100, 0).unwrap() <= 1e-10);
        let c2 = fixture_group("c2_antipodal").unwrap();
        assert!(polynomial_average_check(&c2, &e(2, 0), 100, 0).unwrap() > 1e-3);
        assert_eq!(polynomial_average_check(&c2, &e(2, 0), 0, 0).unwrap(), 0.0);
    }

    #[test]
    fn multiplicity_one_components_always_give_designs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for name in ["c4", "s3_standard", "q8", "dic3", "icosahedral"] {
            let g = fixture_group(name).unwrap();
            let dec = decompose(&g, 0).unwrap();
            for (i, c) in dec.components().iter().enumerate() {
                if c.m() != 1 {
                    continue;
                }
                let b = dec.subspace_basis(&[i]).unwrap();
                for _ in 0..50 {
                    let v = &b * random_unit_vector(&mut rng, b.ncols());
                    assert!(check_design_in(&g, &b, &v, 1e-9).unwrap().is_2_design, "{name}");
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn second_moment_trace_is_norm_squared(xs in proptest::collection::vec(-3.0f64..3.0, 4)) {
            let g = fixture_group("q8").unwrap();
            let v = RealVector::from_vec(xs);
            let sm = second_moment(&g, &v).unwrap();
            prop_assert!((sm.trace() - v.norm_squared()).abs() < 1e-12 * (1.0 + v.norm_squared()));
            prop_assert!((&sm - sm.transpose()).amax() == 0.0);
        }

        #[test]
        fn report_is_orbit_invariant(seed in 0u64..1000, k in 0usize..12) {
            let g = fixture_group("dic3").unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v = random_unit_vector(&mut rng, 6);
            let gv = &g.elements()[k] * &v;
            let a = check_design(&g, &v, 1e-9).unwrap();
            let b = check_design(&g, &gv, 1e-9).unwrap();
            prop_assert_eq!(a.is_2_design, b.is_2_design);
            prop_assert!((a.first_moment_norm - b.first_moment_norm).abs() < 1e-12);
            prop_assert!((a.second_moment_deviation - b.second_moment_deviation).abs() < 1e-12);
        }
    }
}
