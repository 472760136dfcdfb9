//! Matrix-coefficient functions and numerical orthogonality checks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dalg::{random_scalar, right_mult_operator, tau, AlgebraTag, DMatrix, DScalar, Unit};
use crate::error::{Error, Result};
use crate::group::OrthogonalAction;
use crate::linalg::RealMatrix;
use crate::repdec::IsotypicComponent;

/// Default residual tolerance for group-sum identities.
pub const DEFAULT_SCHUR_TOL: f64 = 1e-9;

/// `1e-9`, scaled by `√|G|` once `|G| > 1000`.
pub fn default_tolerance(order: usize) -> f64 {
    if order > 1000 {
        DEFAULT_SCHUR_TOL * (order as f64).sqrt()
    } else {
        DEFAULT_SCHUR_TOL
    }
}

/// All D-valued coefficient functions `g ↦ ρ_ij(g)` of one irreducible.
#[derive(Clone, Debug)]
pub struct CoefficientTable {
    tag: AlgebraTag,
    n: usize,
    values: Vec<DMatrix>,
}

impl CoefficientTable {
    pub fn tag(&self) -> AlgebraTag {
        self.tag
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.values.len()
    }

    /// `ρ_ij(g)` over the group, in group order.
    pub fn function(&self, i: usize, j: usize) -> Vec<DScalar> {
        self.values.iter().map(|m| m.get(i, j)).collect()
    }

    /// `ρ_ij^(X)(g)` over the group.
    pub fn real_function(&self, i: usize, j: usize, x: Unit) -> Vec<f64> {
        self.values.iter().map(|m| m.get(i, j).coeff(x)).collect()
    }

    /// Largest `|Σ_X ρ_ij^(X)(g)·X − ρ_ij(g)|` over all entries.
    pub fn reconstruction_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for m in &self.values {
            for v in m.entries() {
                let mut acc = DScalar::zero(self.tag);
                for &x in self.tag.units() {
                    acc += DScalar::unit(self.tag, x).expect("unit in algebra") * v.coeff(x);
                }
                worst = worst.max(acc.max_abs_diff(v));
            }
        }
        worst
    }

    /// Copy of the table with one real coefficient function multiplied by
    /// `factor` (used to probe that the checks detect corruption).
    pub fn with_scaled_function(&self, i: usize, j: usize, x: Unit, factor: f64) -> Self {
        let mut out = self.clone();
        for m in &mut out.values {
            let mut c = m.get(i, j).coeffs();
            c[x.index()] *= factor;
            m.set(i, j, DScalar::from_slice(self.tag, &c));
        }
        out
    }

    /// The normalized family `f_(i,j) = √n·ρ_ij`, indexed `i·n + j`.
    pub fn normalized_family(&self) -> Vec<Vec<DScalar>> {
        let s = (self.n as f64).sqrt();
        let mut fam = Vec::with_capacity(self.n * self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                fam.push(self.function(i, j).iter().map(|v| v.scale(s)).collect());
            }
        }
        fam
    }
}

pub fn coefficient_table(rho: &[DMatrix]) -> Result<CoefficientTable> {
    let first = rho
        .first()
        .ok_or_else(|| Error::Invalid("empty representation".into()))?;
    let (tag, n) = (first.tag(), first.rows());
    for m in rho {
        if m.tag() != tag {
            return Err(Error::TagMismatch(tag, m.tag()));
        }
        if m.rows() != n || m.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.rows().max(m.cols()),
            });
        }
    }
    Ok(CoefficientTable {
        tag,
        n,
        values: rho.to_vec(),
    })
}

pub fn component_table(component: &IsotypicComponent) -> CoefficientTable {
    CoefficientTable {
        tag: component.fs_tag(),
        n: component.n(),
        values: component.rho().to_vec(),
    }
}

/// `⟨f₁, f₂⟩_G = (1/|G|) Σ f₁(g)·conj(f₂(g))`.
pub fn inner_product_g(f1: &[DScalar], f2: &[DScalar]) -> Result<DScalar> {
    if f1.len() != f2.len() {
        return Err(Error::DimensionMismatch {
            expected: f1.len(),
            found: f2.len(),
        });
    }
    let Some(first) = f1.first() else {
        return Err(Error::Invalid("functions on an empty group".into()));
    };
    let tag = first.tag();
    let mut acc = DScalar::zero(tag);
    for (a, b) in f1.iter().zip(f2) {
        acc += a.try_mul(&b.conj())?;
    }
    Ok(acc.scale(1.0 / f1.len() as f64))
}

/// Outcome of an orthogonality check.
#[derive(Clone, Debug, Serialize)]
pub struct OrthogonalityReport {
    pub max_residual: f64,
    /// Where the largest residual occurs. For real checks this is
    /// `[i, j, X, k, l, Y]`; for D-valued checks `[α, β, Z]`.
    pub argmax: Vec<usize>,
    pub tol: f64,
    pub pass: bool,
}

impl OrthogonalityReport {
    fn new(tol: f64) -> Self {
        OrthogonalityReport {
            max_residual: 0.0,
            argmax: Vec::new(),
            tol,
            pass: true,
        }
    }

    fn record(&mut self, residual: f64, at: &[usize]) {
        if residual > self.max_residual || (residual.is_nan() && !self.max_residual.is_nan()) {
            self.max_residual = residual;
            self.argmax = at.to_vec();
        }
    }

    fn finish(mut self) -> Self {
        self.pass = self.max_residual <= self.tol;
        self
    }
}

/// Checks `⟨ρ_ij^(X), ρ_kl^(Y)⟩ = (1/nd)·δ_ik δ_jl δ_XY` for all index pairs.
pub fn verify_schur_real(table: &CoefficientTable, tol: f64) -> OrthogonalityReport {
    let n = table.n;
    let d = table.tag.dim();
    let order = table.order();
    // rows of F are the real coefficient functions, indexed ((i·n + j)·d + X)
    let mut f = RealMatrix::zeros(n * n * d, order);
    for (g, m) in table.values.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                let c = m.get(i, j).coeffs();
                for x in 0..d {
                    f[((i * n + j) * d + x, g)] = c[x];
                }
            }
        }
    }
    let gram = &f * f.transpose() / order as f64;
    let target = 1.0 / (n * d) as f64;
    let mut rep = OrthogonalityReport::new(tol);
    for a in 0..gram.nrows() {
        for b in 0..gram.ncols() {
            let want = if a == b { target } else { 0.0 };
            let (ij, x) = (a / d, a % d);
            let (kl, y) = (b / d, b % d);
            rep.record((gram[(a, b)] - want).abs(), &[ij / n, ij % n, x, kl / n, kl % n, y]);
        }
    }
    rep.finish()
}

/// Checks `⟨f_α, f_β^[Z]⟩_G = δ_αβ δ_1Z` on the normalized family.
pub fn verify_schur_d(table: &CoefficientTable, tol: f64) -> OrthogonalityReport {
    check_d_condition(&table.normalized_family(), table.tag, tol)
}

fn check_d_condition(family: &[Vec<DScalar>], tag: AlgebraTag, tol: f64) -> OrthogonalityReport {
    let mut rep = OrthogonalityReport::new(tol);
    for (a, fa) in family.iter().enumerate() {
        for (b, fb) in family.iter().enumerate() {
            for &z in tag.units() {
                let conj: Vec<DScalar> = fb.iter().map(|v| tau(z, v).expect("unit in algebra")).collect();
                let ip = inner_product_g(fa, &conj).expect("equal lengths");
                let want = if a == b && z == Unit::One {
                    DScalar::one(tag)
                } else {
                    DScalar::zero(tag)
                };
                rep.record(ip.max_abs_diff(&want), &[a, b, z.index()]);
            }
        }
    }
    rep.finish()
}

fn check_real_condition(family: &[Vec<DScalar>], tag: AlgebraTag, tol: f64) -> OrthogonalityReport {
    let d = tag.dim();
    let mut rep = OrthogonalityReport::new(tol);
    for (a, fa) in family.iter().enumerate() {
        for (b, fb) in family.iter().enumerate() {
            for &x in tag.units() {
                for &y in tag.units() {
                    let s: f64 = fa.iter().zip(fb).map(|(u, v)| u.coeff(x) * v.coeff(y)).sum();
                    let ip = s / fa.len() as f64;
                    let want = if a == b && x == y { 1.0 / d as f64 } else { 0.0 };
                    rep.record((ip - want).abs(), &[a, x.index(), b, y.index()]);
                }
            }
        }
    }
    rep.finish()
}

/// Both formulations of orthonormality, evaluated independently on one family.
#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    pub real: OrthogonalityReport,
    pub d_valued: OrthogonalityReport,
}

impl EquivalenceReport {
    pub fn agree(&self) -> bool {
        self.real.pass == self.d_valued.pass
    }
}

pub fn equivalence_reports(family: &[Vec<DScalar>], tol: f64) -> Result<EquivalenceReport> {
    let tag = family
        .iter()
        .flatten()
        .next()
        .map(|v| v.tag())
        .unwrap_or(AlgebraTag::Real);
    if let Some(len) = family.first().map(Vec::len) {
        if let Some(bad) = family.iter().find(|f| f.len() != len) {
            return Err(Error::DimensionMismatch {
                expected: len,
                found: bad.len(),
            });
        }
    }
    if let Some(v) = family.iter().flatten().find(|v| v.tag() != tag) {
        return Err(Error::TagMismatch(tag, v.tag()));
    }
    Ok(EquivalenceReport {
        real: check_real_condition(family, tag, tol),
        d_valued: check_d_condition(family, tag, tol),
    })
}

/// True when the real and D-valued orthonormality conditions hold or fail
/// together on `family`.
pub fn verify_equivalence_roundtrip(family: &[Vec<DScalar>], tol: f64) -> Result<bool> {
    Ok(equivalence_reports(family, tol)?.agree())
}

/// `count` Gaussian scalars in `tag`, reproducible from `seed`.
pub fn sample_scalars(tag: AlgebraTag, count: usize, seed: u64) -> Vec<DScalar> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_scalar(tag, &mut rng)).collect()
}

/// Trace-formula check for right multiplication by `λ` on one component.
#[derive(Clone, Debug, Serialize)]
pub struct TraceReport {
    /// `|tr_ℝ(R_λ) − n·m·d·Re(λ)|`, worst over the sampled `λ`.
    pub trace_residual: f64,
    /// `‖ρ(s)R_λ − R_λρ(s)‖_max` over generators, worst over the sampled `λ`.
    pub commutator_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Builds the ambient operator of right multiplication by each `λ` on the
/// component and checks its real trace and that it commutes with `G`.
pub fn verify_trace_formula<A: OrthogonalAction + ?Sized>(
    action: &A,
    component: &IsotypicComponent,
    lambdas: &[DScalar],
    tol: f64,
) -> Result<TraceReport> {
    let (n, m, tag) = (component.n(), component.m(), component.fs_tag());
    let k = n * tag.dim();
    let basis = component.real_basis();
    let mut trace_residual = 0.0f64;
    let mut commutator_residual = 0.0f64;
    for lambda in lambdas {
        if lambda.tag() != tag {
            return Err(Error::TagMismatch(tag, lambda.tag()));
        }
        let block = right_mult_operator(lambda, n);
        let mut local = RealMatrix::zeros(k * m, k * m);
        for c in 0..m {
            local.view_mut((c * k, c * k), (k, k)).copy_from(&block);
        }
        let amb = basis * &local * basis.transpose();
        let expected = (n * m * tag.dim()) as f64 * lambda.re();
        trace_residual = trace_residual.max((amb.trace() - expected).abs());
        for &s in action.generator_indices() {
            let g = &action.matrices()[s];
            commutator_residual = commutator_residual.max((g * &amb - &amb * g).amax());
        }
    }
    Ok(TraceReport {
        trace_residual,
        commutator_residual,
        tol,
        pass: trace_residual <= tol && commutator_residual <= tol,
    })
}
