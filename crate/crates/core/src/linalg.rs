//! Real dense linear algebra helpers on top of nalgebra.

use nalgebra as na;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub type RealMatrix = na::DMatrix<f64>;
pub type RealVector = na::DVector<f64>;

/// Orthogonal polar factor `U Vᵀ` of `A = U Σ Vᵀ`.
pub fn polar_factor(a: &RealMatrix) -> RealMatrix {
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested Vᵀ");
    u * vt
}

/// Eigenpairs of a symmetric matrix, eigenvalues ascending.
pub fn symmetric_eigen_sorted(t: &RealMatrix) -> (Vec<f64>, RealMatrix) {
    let sym = (t + t.transpose()) * 0.5;
    let eig = na::SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = RealMatrix::from_fn(t.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// Splits sorted values into runs where consecutive gaps are at most
/// `rel_tol · scale`, with `scale = max(|v|, 1e-300)`.
pub fn cluster_sorted(vals: &[f64], rel_tol: f64) -> Vec<std::ops::Range<usize>> {
    if vals.is_empty() {
        return Vec::new();
    }
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..vals.len() {
        if vals[i] - vals[i - 1] > rel_tol * scale {
            out.push(start..i);
            start = i;
        }
    }
    out.push(start..vals.len());
    out
}

/// Orthonormal basis of `{x : A x = 0}`, from the eigenvectors of `AᵀA` whose
/// eigenvalues fall below `rel_tol² · λ_max`.
pub fn null_space(a: &RealMatrix, rel_tol: f64) -> RealMatrix {
    let ata = a.transpose() * a;
    let (vals, vecs) = symmetric_eigen_sorted(&ata);
    let top = vals.last().copied().unwrap_or(0.0).max(1e-300);
    let keep: Vec<usize> = (0..vals.len())
        .filter(|&i| vals[i] <= rel_tol * rel_tol * top)
        .collect();
    RealMatrix::from_fn(a.ncols(), keep.len(), |r, c| vecs[(r, keep[c])])
}

/// Gram–Schmidt that picks, at each step, the candidate column with the
/// largest residual (lowest index among near-ties). Candidates whose residual
/// falls below `drop_tol` are skipped. Returns at most `limit` columns.
pub fn pivoted_orthonormalize(cands: &RealMatrix, limit: usize, drop_tol: f64) -> RealMatrix {
    let n = cands.nrows();
    let mut resid: Vec<RealVector> = (0..cands.ncols()).map(|j| cands.column(j).into_owned()).collect();
    let mut used = vec![false; resid.len()];
    let mut basis: Vec<RealVector> = Vec::new();
    while basis.len() < limit {
        let norms: Vec<f64> = resid.iter().map(|r| r.norm()).collect();
        let best = norms
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .fold(0.0f64, |m, (_, &v)| m.max(v));
        if best <= drop_tol {
            break;
        }
        let pick = (0..resid.len())
            .find(|&j| !used[j] && norms[j] >= best * (1.0 - 1e-6))
            .expect("a maximal candidate exists");
        used[pick] = true;
        let q = &resid[pick] / norms[pick];
        for (j, r) in resid.iter_mut().enumerate() {
            if !used[j] {
                let c = q.dot(r);
                r.axpy(-c, &q, 1.0);
            }
        }
        basis.push(q);
    }
    let mut out = RealMatrix::zeros(n, basis.len());
    for (j, q) in basis.iter().enumerate() {
        out.set_column(j, q);
    }
    reorthonormalize(&out)
}

/// One extra Gram–Schmidt sweep on already nearly orthonormal columns.
pub fn reorthonormalize(b: &RealMatrix) -> RealMatrix {
    let mut out = b.clone();
    for j in 0..out.ncols() {
        let mut v = out.column(j).into_owned();
        for i in 0..j {
            let q = out.column(i).into_owned();
            let c = q.dot(&v);
            v.axpy(-c, &q, 1.0);
        }
        let nrm = v.norm();
        out.set_column(j, &(v / nrm));
    }
    out
}

/// A basis of `span(b)` determined only by the subspace: pivoted
/// Gram–Schmidt on the projections of the ambient coordinate vectors.
pub fn canonical_basis(b: &RealMatrix) -> RealMatrix {
    let p = b * b.transpose();
    pivoted_orthonormalize(&p, b.ncols(), 1e-8)
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> RealMatrix {
    RealMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> RealVector {
    RealVector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

pub fn random_symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize) -> RealMatrix {
    let g = gaussian_matrix(rng, n, n);
    (&g + g.transpose()) * 0.5
}

/// Uniformly distributed unit vector.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> RealVector {
    loop {
        let v = gaussian_vector(rng, n);
        let nrm = v.norm();
        if nrm > 1e-12 {
            return v / nrm;
        }
    }
}

/// `‖AᵀA − I‖_max`.
pub fn orthogonality_residual(a: &RealMatrix) -> f64 {
    let n = a.ncols();
    (a.transpose() * a - RealMatrix::identity(n, n)).amax()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn polar_of_scaled_rotation() {
        let r = RealMatrix::from_row_slice(2, 2, &[0.0, -3.0, 3.0, 0.0]);
        let p = polar_factor(&r);
        assert!((p - r / 3.0).amax() < 1e-14);
    }

    #[test]
    fn clusters() {
        let v = [1.0, 1.0 + 1e-12, 2.0, 3.0, 3.0];
        assert_eq!(cluster_sorted(&v, 1e-7), vec![0..2, 2..3, 3..5]);
        assert!(cluster_sorted(&[], 1e-7).is_empty());
    }

    #[test]
    fn null_space_of_rank_one() {
        let a = RealMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let ns = null_space(&a, 1e-8);
        assert_eq!(ns.ncols(), 2);
        assert!((a * ns).amax() < 1e-14);
    }

    #[test]
    fn canonical_basis_ignores_spanning_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = gaussian_matrix(&mut rng, 5, 2);
        let q1 = g.clone().qr().q();
        let rot = RealMatrix::from_row_slice(2, 2, &[0.6, -0.8, 0.8, 0.6]);
        let q2 = &q1 * rot;
        let c1 = canonical_basis(&q1);
        let c2 = canonical_basis(&q2);
        assert!((c1 - c2).amax() < 1e-12);
    }

    #[test]
    fn canonical_basis_of_coordinate_plane_is_identity() {
        let b = RealMatrix::from_row_slice(3, 2, &[0.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
        let c = canonical_basis(&b);
        assert!((c - RealMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0])).amax() < 1e-15);
    }
}
