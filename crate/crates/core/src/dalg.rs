//! Arithmetic over the real division algebras ℝ, ℂ and ℍ.
//!
//! Every scalar is stored as four real coefficients against the basis
//! `(1, i, j, k)`; a [`AlgebraTag`] records which of the three algebras the
//! value lives in, and coefficients outside that algebra are always zero.
//! Quaternion products follow the Hamilton convention `ij = k`.
//!
//! Matrices over D are realified with a fixed chart (see
//! [`RealificationChart`]): an `n × m` matrix becomes a vector of length
//! `n·m·d` ordered column-major over the matrix columns, then by basis unit,
//! then by row. For a single column this is the unit-major, row-minor order
//! `e_j·X ↦ X·n + j`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::RealMatrix;

/// One of ℝ, ℂ, ℍ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AlgebraTag {
    Real,
    Complex,
    Quaternion,
}

impl AlgebraTag {
    /// Real dimension `d` of the algebra.
    pub const fn dim(self) -> usize {
        match self {
            AlgebraTag::Real => 1,
            AlgebraTag::Complex => 2,
            AlgebraTag::Quaternion => 4,
        }
    }

    /// The standard real basis, in the fixed order `(1, i, j, k)`.
    pub fn units(self) -> &'static [Unit] {
        &Unit::ALL[..self.dim()]
    }

    pub fn contains(self, unit: Unit) -> bool {
        unit.index() < self.dim()
    }

    pub fn from_dim(d: usize) -> Option<Self> {
        match d {
            1 => Some(AlgebraTag::Real),
            2 => Some(AlgebraTag::Complex),
            4 => Some(AlgebraTag::Quaternion),
            _ => None,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            AlgebraTag::Real => "R",
            AlgebraTag::Complex => "C",
            AlgebraTag::Quaternion => "H",
        }
    }
}

impl fmt::Display for AlgebraTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// A standard basis element of ℍ (and of ℝ, ℂ by restriction).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Unit {
    One,
    I,
    J,
    K,
}

impl Unit {
    pub const ALL: [Unit; 4] = [Unit::One, Unit::I, Unit::J, Unit::K];

    pub const fn index(self) -> usize {
        match self {
            Unit::One => 0,
            Unit::I => 1,
            Unit::J => 2,
            Unit::K => 3,
        }
    }

    pub fn from_index(i: usize) -> Option<Unit> {
        Unit::ALL.get(i).copied()
    }

    /// Product of two basis units as `(sign, unit)`, so that `XY = sign·Z`.
    pub fn product(self, other: Unit) -> (f64, Unit) {
        use Unit::*;
        match (self, other) {
            (One, u) | (u, One) => (1.0, u),
            (I, I) | (J, J) | (K, K) => (-1.0, One),
            (I, J) => (1.0, K),
            (J, I) => (-1.0, K),
            (J, K) => (1.0, I),
            (K, J) => (-1.0, I),
            (K, I) => (1.0, J),
            (I, K) => (-1.0, J),
        }
    }
}

fn hamilton(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

/// A value in ℝ, ℂ or ℍ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DScalar {
    tag: AlgebraTag,
    coeffs: [f64; 4],
}

impl DScalar {
    pub fn new(tag: AlgebraTag, coeffs: [f64; 4]) -> Result<Self> {
        if coeffs[tag.dim()..].iter().any(|&c| c != 0.0) {
            return Err(Error::CoefficientsOutsideAlgebra(tag));
        }
        Ok(DScalar { tag, coeffs })
    }

    /// Builds a scalar from its first `d` coefficients.
    pub fn from_slice(tag: AlgebraTag, coeffs: &[f64]) -> Self {
        let mut c = [0.0; 4];
        c[..tag.dim()].copy_from_slice(&coeffs[..tag.dim()]);
        DScalar { tag, coeffs: c }
    }

    pub fn real(tag: AlgebraTag, x: f64) -> Self {
        DScalar {
            tag,
            coeffs: [x, 0.0, 0.0, 0.0],
        }
    }

    pub fn zero(tag: AlgebraTag) -> Self {
        Self::real(tag, 0.0)
    }

    pub fn one(tag: AlgebraTag) -> Self {
        Self::real(tag, 1.0)
    }

    pub fn unit(tag: AlgebraTag, unit: Unit) -> Result<Self> {
        if !tag.contains(unit) {
            return Err(Error::NotABasisElement { tag, unit });
        }
        let mut coeffs = [0.0; 4];
        coeffs[unit.index()] = 1.0;
        Ok(DScalar { tag, coeffs })
    }

    pub fn tag(&self) -> AlgebraTag {
        self.tag
    }

    pub fn coeffs(&self) -> [f64; 4] {
        self.coeffs
    }

    /// Real coefficient along a basis unit.
    pub fn coeff(&self, unit: Unit) -> f64 {
        self.coeffs[unit.index()]
    }

    pub fn re(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn conj(&self) -> Self {
        let c = self.coeffs;
        DScalar {
            tag: self.tag,
            coeffs: [c[0], -c[1], -c[2], -c[3]],
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        let c = self.coeffs;
        DScalar {
            tag: self.tag,
            coeffs: [s * c[0], s * c[1], s * c[2], s * c[3]],
        }
    }

    pub fn inverse(&self) -> Self {
        self.conj().scale(1.0 / self.norm_sqr())
    }

    pub fn try_mul(&self, rhs: &DScalar) -> Result<Self> {
        if self.tag != rhs.tag {
            return Err(Error::TagMismatch(self.tag, rhs.tag));
        }
        Ok(DScalar {
            tag: self.tag,
            coeffs: hamilton(&self.coeffs, &rhs.coeffs),
        })
    }

    /// Largest coefficient-wise absolute difference.
    pub fn max_abs_diff(&self, other: &DScalar) -> f64 {
        self.coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for DScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["", "i", "j", "k"];
        write!(f, "{}", self.coeffs[0])?;
        for (c, name) in self.coeffs.iter().zip(names).take(self.tag.dim()).skip(1) {
            if *c < 0.0 {
                write!(f, " - {}{name}", -c)?;
            } else {
                write!(f, " + {c}{name}")?;
            }
        }
        Ok(())
    }
}

fn assert_same(a: AlgebraTag, b: AlgebraTag) {
    assert_eq!(a, b, "mixed algebra tags in DScalar arithmetic");
}

impl Add for DScalar {
    type Output = DScalar;
    fn add(self, rhs: DScalar) -> DScalar {
        assert_same(self.tag, rhs.tag);
        let mut c = self.coeffs;
        for (x, y) in c.iter_mut().zip(rhs.coeffs.iter()) {
            *x += y;
        }
        DScalar {
            tag: self.tag,
            coeffs: c,
        }
    }
}

impl AddAssign for DScalar {
    fn add_assign(&mut self, rhs: DScalar) {
        *self = *self + rhs;
    }
}

impl Sub for DScalar {
    type Output = DScalar;
    fn sub(self, rhs: DScalar) -> DScalar {
        self + (-rhs)
    }
}

impl Neg for DScalar {
    type Output = DScalar;
    fn neg(self) -> DScalar {
        self.scale(-1.0)
    }
}

/// Panics on mixed tags; use [`d_mul`] for a checked product.
impl Mul for DScalar {
    type Output = DScalar;
    fn mul(self, rhs: DScalar) -> DScalar {
        assert_same(self.tag, rhs.tag);
        DScalar {
            tag: self.tag,
            coeffs: hamilton(&self.coeffs, &rhs.coeffs),
        }
    }
}

impl Mul<f64> for DScalar {
    type Output = DScalar;
    fn mul(self, rhs: f64) -> DScalar {
        self.scale(rhs)
    }
}

/// Checked product in D.
pub fn d_mul(x: &DScalar, y: &DScalar) -> Result<DScalar> {
    x.try_mul(y)
}

/// Partial conjugation τ_X: identity for `X = 1`, complex conjugation for
/// `X = i` in ℂ, and the sandwich `v ↦ X v X⁻¹` in ℍ.
pub fn tau(x: Unit, v: &DScalar) -> Result<DScalar> {
    let tag = v.tag();
    if !tag.contains(x) {
        return Err(Error::NotABasisElement { tag, unit: x });
    }
    Ok(match (tag, x) {
        (_, Unit::One) => *v,
        (AlgebraTag::Complex, Unit::I) => v.conj(),
        _ => {
            let u = DScalar::unit(tag, x)?;
            u * *v * u.conj()
        }
    })
}

/// `Σ_X X · conj(τ_Y(X))`, which equals `d·δ_{1Y}`.
pub fn tau_sum(y: Unit, tag: AlgebraTag) -> Result<DScalar> {
    let mut acc = DScalar::zero(tag);
    for &x in tag.units() {
        let xs = DScalar::unit(tag, x)?;
        acc += xs * tau(y, &xs)?.conj();
    }
    Ok(acc)
}

/// Recovers the real component function `f^(X)` from the partial conjugates
/// `f^[Y]` via `f^(X) = (1/d) Σ_Y (τ_X(Y)/Y) · conj(X) · f^[Y]`.
pub fn component_inversion(f: &[DScalar], x: Unit) -> Result<Vec<f64>> {
    let Some(first) = f.first() else {
        return Ok(Vec::new());
    };
    let tag = first.tag();
    if !tag.contains(x) {
        return Err(Error::NotABasisElement { tag, unit: x });
    }
    let d = tag.dim() as f64;
    let xbar = DScalar::unit(tag, x)?.conj();
    // τ_X(Y)/Y is ±1 for basis units
    let signs: Vec<(Unit, f64)> = tag
        .units()
        .iter()
        .map(|&y| {
            let ys = DScalar::unit(tag, y).expect("unit in algebra");
            (y, tau(x, &ys).expect("unit in algebra").coeff(y))
        })
        .collect();
    f.iter()
        .map(|v| {
            if v.tag() != tag {
                return Err(Error::TagMismatch(tag, v.tag()));
            }
            let mut acc = DScalar::zero(tag);
            for &(y, s) in &signs {
                acc += (xbar * tau(y, v)?).scale(s);
            }
            Ok(acc.re() / d)
        })
        .collect()
}

/// `Σ_X X T X̄` over the quaternion units. Equals `4·Re(T)`.
pub fn quaternion_sandwich_sum(t: &DScalar) -> Result<DScalar> {
    if t.tag() != AlgebraTag::Quaternion {
        return Err(Error::TagMismatch(AlgebraTag::Quaternion, t.tag()));
    }
    let mut acc = DScalar::zero(AlgebraTag::Quaternion);
    for &x in AlgebraTag::Quaternion.units() {
        let xs = DScalar::unit(AlgebraTag::Quaternion, x)?;
        acc += xs * *t * xs.conj();
    }
    Ok(acc)
}

/// Index layout used to identify `Mat_{rows×cols}(D)` with `ℝ^{rows·cols·d}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RealificationChart {
    pub tag: AlgebraTag,
    pub rows: usize,
    pub cols: usize,
}

impl RealificationChart {
    pub fn new(tag: AlgebraTag, rows: usize, cols: usize) -> Self {
        RealificationChart { tag, rows, cols }
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols * self.tag.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Real coordinate of the `unit` coefficient of entry `(row, col)`.
    pub fn index(&self, row: usize, col: usize, unit: Unit) -> usize {
        (col * self.tag.dim() + unit.index()) * self.rows + row
    }
}

/// A dense matrix over D, stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DMatrix {
    tag: AlgebraTag,
    rows: usize,
    cols: usize,
    data: Vec<DScalar>,
}

impl DMatrix {
    pub fn zeros(tag: AlgebraTag, rows: usize, cols: usize) -> Self {
        DMatrix {
            tag,
            rows,
            cols,
            data: vec![DScalar::zero(tag); rows * cols],
        }
    }

    pub fn identity(tag: AlgebraTag, n: usize) -> Self {
        let mut m = Self::zeros(tag, n, n);
        for i in 0..n {
            m.set(i, i, DScalar::one(tag));
        }
        m
    }

    pub fn from_fn(tag: AlgebraTag, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> DScalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let v = f(i, j);
                assert_same(tag, v.tag());
                data.push(v);
            }
        }
        DMatrix { tag, rows, cols, data }
    }

    /// Embeds a real matrix.
    pub fn from_real(tag: AlgebraTag, m: &RealMatrix) -> Self {
        Self::from_fn(tag, m.nrows(), m.ncols(), |i, j| DScalar::real(tag, m[(i, j)]))
    }

    pub fn tag(&self) -> AlgebraTag {
        self.tag
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> DScalar {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: DScalar) {
        assert_same(self.tag, v.tag());
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[DScalar] {
        &self.data
    }

    pub fn hermitian_adjoint(&self) -> Self {
        Self::from_fn(self.tag, self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn try_mul(&self, rhs: &DMatrix) -> Result<Self> {
        if self.tag != rhs.tag {
            return Err(Error::TagMismatch(self.tag, rhs.tag));
        }
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        Ok(Self::from_fn(self.tag, self.rows, rhs.cols, |i, j| {
            let mut acc = DScalar::zero(self.tag);
            for s in 0..self.cols {
                acc += self.get(i, s) * rhs.get(s, j);
            }
            acc
        }))
    }

    /// `M̄ᵀ M`.
    pub fn gram(&self) -> Self {
        self.hermitian_adjoint().try_mul(self).expect("shapes agree")
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(DScalar::norm_sqr).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        DMatrix {
            tag: self.tag,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.scale(s)).collect(),
        }
    }

    /// Entrywise right multiplication `M·λ`.
    pub fn right_scaled(&self, lambda: &DScalar) -> Self {
        Self::from_fn(self.tag, self.rows, self.cols, |i, j| self.get(i, j) * *lambda)
    }

    pub fn first_columns(&self, m: usize) -> Self {
        Self::from_fn(self.tag, self.rows, m.min(self.cols), |i, j| self.get(i, j))
    }

    /// Largest coefficient-wise difference; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &DMatrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols || self.tag != other.tag {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }

    pub fn chart(&self) -> RealificationChart {
        RealificationChart::new(self.tag, self.rows, self.cols)
    }

    pub fn realify_vector(&self) -> Vec<f64> {
        let chart = self.chart();
        let mut out = vec![0.0; chart.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = self.get(i, j);
                for &u in self.tag.units() {
                    out[chart.index(i, j, u)] = v.coeff(u);
                }
            }
        }
        out
    }

    pub fn from_realified(tag: AlgebraTag, rows: usize, cols: usize, coords: &[f64]) -> Result<Self> {
        let chart = RealificationChart::new(tag, rows, cols);
        if coords.len() != chart.len() {
            return Err(Error::DimensionMismatch {
                expected: chart.len(),
                found: coords.len(),
            });
        }
        Ok(Self::from_fn(tag, rows, cols, |i, j| {
            let mut c = [0.0; 4];
            for &u in tag.units() {
                c[u.index()] = coords[chart.index(i, j, u)];
            }
            DScalar::from_slice(tag, &c)
        }))
    }

    /// Real matrix of `v ↦ A·v` from `D^cols` to `D^rows`, with products of
    /// basis units normalized to `+𝓘_D` and the sign carried into the entry.
    pub fn realify_operator(&self) -> RealMatrix {
        let d = self.tag.dim();
        let out_chart = RealificationChart::new(self.tag, self.rows, 1);
        let in_chart = RealificationChart::new(self.tag, self.cols, 1);
        let mut r = RealMatrix::zeros(self.rows * d, self.cols * d);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                for &x in self.tag.units() {
                    let ax = a.coeff(x);
                    if ax == 0.0 {
                        continue;
                    }
                    for &y in self.tag.units() {
                        let (s, z) = x.product(y);
                        r[(out_chart.index(i, 0, z), in_chart.index(k, 0, y))] += s * ax;
                    }
                }
            }
        }
        r
    }
}

/// Real matrix of right multiplication `v ↦ v·λ` on `D^n`.
pub fn right_mult_operator(lambda: &DScalar, n: usize) -> RealMatrix {
    let tag = lambda.tag();
    let chart = RealificationChart::new(tag, n, 1);
    let mut r = RealMatrix::zeros(chart.len(), chart.len());
    for k in 0..n {
        for &y in tag.units() {
            let prod = DScalar::unit(tag, y).expect("unit in algebra") * *lambda;
            for &z in tag.units() {
                r[(chart.index(k, 0, z), chart.index(k, 0, y))] = prod.coeff(z);
            }
        }
    }
    r
}

/// Real trace of right multiplication by `λ` on `D^n`, computed from the
/// realified matrix (not from the closed form `n·d·Re(λ)`).
pub fn right_mult_real_trace(lambda: &DScalar, n: usize) -> f64 {
    right_mult_operator(lambda, n).trace()
}

/// `Σ_i conj(u_i) v_i` for column vectors over D.
fn d_inner(u: &[DScalar], v: &[DScalar]) -> DScalar {
    let mut acc = DScalar::zero(u[0].tag());
    for (a, b) in u.iter().zip(v) {
        acc += a.conj() * *b;
    }
    acc
}

/// A matrix in `O_D(n)` drawn from Gaussian entries followed by D-valued
/// modified Gram–Schmidt on the columns. Deterministic for a fixed seed.
pub fn random_d_unitary(tag: AlgebraTag, n: usize, seed: u64) -> DMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_d_unitary_with(tag, n, &mut rng)
}

pub fn random_d_unitary_with<R: rand::Rng + ?Sized>(tag: AlgebraTag, n: usize, rng: &mut R) -> DMatrix {
    assert!(n >= 1, "O_D(n) needs n >= 1");
    let d = tag.dim();
    let mut cols: Vec<Vec<DScalar>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<DScalar> = (0..n)
            .map(|_| {
                let c: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
                DScalar::from_slice(tag, &c)
            })
            .collect();
        // two passes keep the columns orthogonal to roundoff
        for _ in 0..2 {
            for u in &cols {
                let p = d_inner(u, &v);
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi = *vi - *ui * p;
                }
            }
        }
        let norm = v.iter().map(DScalar::norm_sqr).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        cols.push(v.into_iter().map(|x| x.scale(1.0 / norm)).collect());
    }
    DMatrix::from_fn(tag, n, n, |i, j| cols[j][i])
}

/// Gaussian random scalar with unit-variance coefficients.
pub fn random_scalar<R: rand::Rng + ?Sized>(tag: AlgebraTag, rng: &mut R) -> DScalar {
    let c: Vec<f64> = (0..tag.dim()).map(|_| StandardNormal.sample(rng)).collect();
    DScalar::from_slice(tag, &c)
}

/// Gaussian random matrix with unit-variance real coefficients.
pub fn random_dmatrix<R: rand::Rng + ?Sized>(tag: AlgebraTag, rows: usize, cols: usize, rng: &mut R) -> DMatrix {
    DMatrix::from_fn(tag, rows, cols, |_, _| random_scalar(tag, rng))
}
