//! Dense complex square matrices.
//!
//! `Matrix` is the operator carrier for every other module. It wraps a
//! `nalgebra::DMatrix<Complex64>` and only admits square, finite data.
//! Block helpers use the "level-major" layout shared by the dilation code:
//! the `(a, b)` block of size `bs` occupies rows `a*bs..(a+1)*bs` and
//! columns `b*bs..(b+1)*bs`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Vector = DVector<C64>;

/// Upper limit on `|t|·‖A‖₁` accepted by [`Matrix::expm`].
pub const EXPM_NORM_CAP: f64 = 700.0;
/// Negative-eigenvalue dust tolerated (and clamped) by [`Matrix::psd_sqrt`].
pub const PSD_TOL: f64 = 1e-10;
/// Reciprocal condition number below which [`Matrix::solve`] refuses.
const SINGULAR_RCOND: f64 = 1e-14;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Clone, PartialEq)]
pub struct Matrix(DMatrix<C64>);

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{}", self.0)
    }
}

/// Eigenvalues with one eigenvector and residual `‖Ax − λx‖` per entry.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<C64>,
    pub eigenvectors: Vec<Vector>,
    pub residuals: Vec<f64>,
    pub tol: f64,
}

impl Spectrum {
    /// Distinct eigenvalues with `| |λ| − 1 | ≤ tol`, merged within `tol`.
    pub fn unimodular(&self, tol: f64) -> Vec<C64> {
        let mut out: Vec<C64> = Vec::new();
        for &lam in &self.eigenvalues {
            if (lam.norm() - 1.0).abs() <= tol && !out.iter().any(|m| (m - lam).norm() <= tol) {
                out.push(lam);
            }
        }
        out
    }
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Matrix(DMatrix::identity(n, n))
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        Matrix(DMatrix::from_fn(n, n, |i, j| f(i, j)))
    }

    /// Wraps a nalgebra matrix after checking it is square and finite.
    pub fn from_inner(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        if !m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
        }
        Ok(Matrix(m))
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
        }
        Self::from_inner(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| c64(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        Matrix::from_fn(n, |i, j| if i == j { entries[i] } else { C64::new(0.0, 0.0) })
    }

    pub fn diag_real(entries: &[f64]) -> Self {
        let e: Vec<C64> = entries.iter().map(|&x| c64(x, 0.0)).collect();
        Self::diag(&e)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.0[(i, j)] = v;
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn adjoint(&self) -> Matrix {
        Matrix(self.0.adjoint())
    }

    pub fn scale(&self, c: C64) -> Matrix {
        Matrix(&self.0 * c)
    }

    pub fn scale_re(&self, x: f64) -> Matrix {
        self.scale(c64(x, 0.0))
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// `A^k` by repeated squaring.
    pub fn pow(&self, mut k: u32) -> Matrix {
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.dim());
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `(A + A*)/2`.
    pub fn hermitian_part(&self) -> Matrix {
        Matrix((&self.0 + self.0.adjoint()) * c64(0.5, 0.0))
    }

    /// Standard Kronecker product: index `(i, k)` maps to `i*other.dim() + k`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        Matrix(self.0.kronecker(&other.0))
    }

    /// Copy of block `(bi, bj)` with block size `bs`.
    pub fn block(&self, bi: usize, bj: usize, bs: usize) -> Matrix {
        Matrix(self.0.view((bi * bs, bj * bs), (bs, bs)).into_owned())
    }

    pub fn set_block(&mut self, bi: usize, bj: usize, m: &Matrix) {
        let bs = m.dim();
        self.0.view_mut((bi * bs, bj * bs), (bs, bs)).copy_from(&m.0);
    }

    pub fn block_diag(blocks: &[Matrix]) -> Matrix {
        let total: usize = blocks.iter().map(Matrix::dim).sum();
        let mut out = Matrix::zeros(total);
        let mut off = 0;
        for b in blocks {
            let d = b.dim();
            out.0.view_mut((off, off), (d, d)).copy_from(&b.0);
            off += d;
        }
        out
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        &self.0 * v
    }

    pub fn fro_norm(&self) -> f64 {
        self.0.norm()
    }

    /// Induced 1-norm (max column sum); cheap upper bound for the spectral norm up to √n.
    pub fn one_norm(&self) -> f64 {
        self.0
            .column_iter()
            .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Singular values, descending.
    pub fn singular_values(&self) -> Vec<f64> {
        if self.dim() == 0 {
            return Vec::new();
        }
        let svd = SVD::new(self.0.clone(), false, false);
        svd.singular_values.iter().copied().collect()
    }

    /// Spectral norm (largest singular value).
    pub fn op_norm(&self) -> f64 {
        if self.0.iter().all(|z| *z == C64::new(0.0, 0.0)) {
            return 0.0;
        }
        self.singular_values().first().copied().unwrap_or(0.0)
    }

    pub fn min_singular_value(&self) -> f64 {
        self.singular_values().last().copied().unwrap_or(0.0)
    }

    /// `‖self − other‖` in the spectral norm.
    pub fn dist(&self, other: &Matrix) -> f64 {
        (self - other).op_norm()
    }

    /// `e^{tA}`.
    ///
    /// Fails instead of returning infinities when `|t|·‖A‖₁` exceeds [`EXPM_NORM_CAP`].
    pub fn expm(&self, t: f64) -> Result<Matrix> {
        self.expm_with_cap(t, EXPM_NORM_CAP)
    }

    pub fn expm_with_cap(&self, t: f64, cap: f64) -> Result<Matrix> {
        if !t.is_finite() || !self.is_finite() {
            return Err(Error::InvalidArgument("expm of non-finite input".into()));
        }
        let norm = t.abs() * self.one_norm();
        if norm > cap {
            return Err(Error::ExpOverflow { norm, cap });
        }
        if t == 0.0 || norm == 0.0 {
            return Ok(Matrix::identity(self.dim()));
        }
        let e = (&self.0 * c64(t, 0.0)).exp();
        let out = Matrix(e);
        if !out.is_finite() {
            return Err(Error::ExpOverflow { norm, cap });
        }
        Ok(out)
    }

    /// Eigen-decomposition of a Hermitian matrix (eigenvalues ascending).
    fn hermitian_eigen(&self) -> (Vec<f64>, DMatrix<C64>) {
        let herm = self.hermitian_part();
        let eig = SymmetricEigen::new(herm.0);
        let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
        let n = self.dim();
        let vecs = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, idx[c])]);
        (vals, vecs)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        self.hermitian_eigen().0
    }

    /// Largest eigenvalue of `(A + A*)/2`; `≤ 0` iff `A` is dissipative.
    pub fn max_hermitian_eigenvalue(&self) -> f64 {
        self.hermitian_eigenvalues()
            .last()
            .copied()
            .unwrap_or(f64::NEG_INFINITY)
    }

    /// Positive square root of a PSD matrix. Eigenvalues in `[−PSD_TOL, 0)` are clamped
    /// to 0, and so are positive eigenvalues at roundoff level, whose square roots
    /// would otherwise turn `1e−16` dust into `1e−8` entries.
    pub fn psd_sqrt(&self) -> Result<Matrix> {
        let scale = 1.0 + self.fro_norm();
        let skew = (self - &self.adjoint()).fro_norm();
        if skew > PSD_TOL * scale {
            return Err(Error::NotPsd(format!("not Hermitian (‖P − P*‖ = {skew:.3e})")));
        }
        let (vals, vecs) = self.hermitian_eigen();
        if let Some(&min) = vals.first() {
            if min < -PSD_TOL * scale {
                return Err(Error::NotPsd(format!("eigenvalue {min:.3e} < 0")));
            }
        }
        let dust = 8.0 * vals.len() as f64 * f64::EPSILON * scale;
        let roots = DVector::from_iterator(
            vals.len(),
            vals.iter().map(|&v| c64(if v <= dust { 0.0 } else { v.sqrt() }, 0.0)),
        );
        let q = &vecs * DMatrix::from_diagonal(&roots) * vecs.adjoint();
        Ok(Matrix(q).hermitian_part())
    }

    /// Solves `A X = B`.
    pub fn solve(&self, b: &Matrix) -> Result<Matrix> {
        if b.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: b.dim(),
            });
        }
        let sv = self.singular_values();
        let (smax, smin) = (sv.first().copied().unwrap_or(0.0), sv.last().copied().unwrap_or(0.0));
        if smin <= SINGULAR_RCOND * smax || smax == 0.0 {
            let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
            return Err(Error::Singular { cond });
        }
        let x = self
            .0
            .clone()
            .lu()
            .solve(&b.0)
            .ok_or(Error::Singular { cond: smax / smin })?;
        Ok(Matrix(x))
    }

    /// Condition number `σ_max/σ_min` in the spectral norm.
    pub fn condition_estimate(&self) -> f64 {
        let sv = self.singular_values();
        match (sv.first(), sv.last()) {
            (Some(&a), Some(&b)) if b > 0.0 => a / b,
            _ => f64::INFINITY,
        }
    }

    pub fn inverse(&self) -> Result<Matrix> {
        self.solve(&Matrix::identity(self.dim()))
    }

    /// Orthonormal basis of the approximate kernel `{x : ‖Ax‖ ≤ tol‖x‖}`.
    pub fn null_space(&self, tol: f64) -> Vec<Vector> {
        let n = self.dim();
        if n == 0 {
            return Vec::new();
        }
        let svd = SVD::new(self.0.clone(), false, true);
        let v_t = svd.v_t.expect("v_t requested");
        (0..n)
            .filter(|&k| svd.singular_values[k] <= tol)
            .map(|k| v_t.row(k).adjoint())
            .collect()
    }

    /// Eigenvalues from a complex Schur form, each paired with the right singular
    /// vector of `A − λI` for its smallest singular value.
    pub fn point_spectrum(&self, tol: f64) -> Result<Spectrum> {
        let n = self.dim();
        let schur = Schur::try_new(self.0.clone(), f64::EPSILON, 10_000)
            .ok_or_else(|| Error::NoConvergence("Schur iteration limit reached".into()))?;
        let (_, t) = schur.unpack();
        for j in 0..n.saturating_sub(1) {
            let sub = t[(j + 1, j)].norm();
            if sub > 1e-8 * (1.0 + t.norm()) {
                return Err(Error::NoConvergence(format!(
                    "Schur form not triangular (subdiagonal {sub:.3e})"
                )));
            }
        }
        let mut spec = Spectrum {
            eigenvalues: Vec::with_capacity(n),
            eigenvectors: Vec::with_capacity(n),
            residuals: Vec::with_capacity(n),
            tol,
        };
        for k in 0..n {
            let lam = t[(k, k)];
            let shifted = self - &Matrix::identity(n).scale(lam);
            let svd = SVD::new(shifted.0.clone(), false, true);
            let v_t = svd.v_t.expect("v_t requested");
            let (kmin, _) = svd
                .singular_values
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
            let x: Vector = v_t.row(kmin).adjoint();
            let residual = (shifted.apply(&x)).norm();
            if residual > tol {
                return Err(Error::NoConvergence(format!(
                    "eigenpair residual {residual:.3e} exceeds tolerance {tol:.3e} at λ = {lam}"
                )));
            }
            spec.eigenvalues.push(lam);
            spec.eigenvectors.push(x);
            spec.residuals.push(residual);
        }
        Ok(spec)
    }
}

impl<'a> Mul<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &'a Matrix) -> Matrix {
        Matrix(&self.0 * &rhs.0)
    }
}

impl Mul for Matrix {
    type Output = Matrix;
    fn mul(self, rhs: Matrix) -> Matrix {
        Matrix(self.0 * rhs.0)
    }
}

impl<'a> Add<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn add(self, rhs: &'a Matrix) -> Matrix {
        Matrix(&self.0 + &rhs.0)
    }
}

impl Add for Matrix {
    type Output = Matrix;
    fn add(self, rhs: Matrix) -> Matrix {
        Matrix(self.0 + rhs.0)
    }
}

impl<'a> Sub<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &'a Matrix) -> Matrix {
        Matrix(&self.0 - &rhs.0)
    }
}

impl Sub for Matrix {
    type Output = Matrix;
    fn sub(self, rhs: Matrix) -> Matrix {
        Matrix(self.0 - rhs.0)
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix(-&self.0)
    }
}

/// Rectangular operator between spaces of different dimension (`rows × cols`).
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap(DMatrix<C64>);

impl LinearMap {
    pub fn from_inner(m: DMatrix<C64>) -> Self {
        LinearMap(m)
    }

    /// Coordinate embedding `C^cols → C^rows` placing `x` at `offset..offset+cols`.
    pub fn coordinate_embedding(rows: usize, cols: usize, offset: usize) -> Self {
        assert!(offset + cols <= rows, "embedding does not fit");
        LinearMap(DMatrix::from_fn(rows, cols, |i, j| {
            if i == offset + j {
                c64(1.0, 0.0)
            } else {
                c64(0.0, 0.0)
            }
        }))
    }

    /// Vertical stack of `k` copies of `self`.
    pub fn stack(&self, k: usize) -> LinearMap {
        let (r, c) = self.0.shape();
        LinearMap(DMatrix::from_fn(r * k, c, |i, j| self.0[(i % r, j)]))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn adjoint(&self) -> LinearMap {
        LinearMap(self.0.adjoint())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearMap) -> LinearMap {
        LinearMap(&self.0 * &other.0)
    }

    /// `self ∘ m` for a square `m` on the domain.
    pub fn then_square(&self, m: &Matrix) -> LinearMap {
        LinearMap(&self.0 * &m.0)
    }

    /// `m ∘ self` for a square `m` on the codomain.
    pub fn after_square(&self, m: &Matrix) -> LinearMap {
        LinearMap(&m.0 * &self.0)
    }

    /// The composite as a square matrix; panics unless `rows == cols`.
    pub fn to_square(&self) -> Matrix {
        assert_eq!(self.rows(), self.cols(), "map is not square");
        Matrix(self.0.clone())
    }

    /// `L* X L` for square `X` on the codomain.
    pub fn compress(&self, x: &Matrix) -> Matrix {
        Matrix(self.0.adjoint() * &x.0 * &self.0)
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        &self.0 * v
    }

    /// Spectral norm.
    pub fn op_norm(&self) -> f64 {
        let svd = SVD::new(self.0.clone(), false, false);
        svd.singular_values.iter().copied().fold(0.0, f64::max)
    }

    pub fn dist(&self, other: &LinearMap) -> f64 {
        LinearMap(&self.0 - &other.0).op_norm()
    }
}

/// Product `M_1 · M_2 ⋯ M_k` of a non-empty sequence; identity of size `n` if empty.
pub fn product<'a>(n: usize, factors: impl IntoIterator<Item = &'a Matrix>) -> Matrix {
    factors
        .into_iter()
        .fold(Matrix::identity(n), |acc, m| &acc * m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn series_exp(a: &Matrix, t: f64, terms: usize) -> Matrix {
        let n = a.dim();
        let at = a.scale_re(t);
        let mut term = Matrix::identity(n);
        let mut sum = Matrix::identity(n);
        for k in 1..terms {
            term = (&term * &at).scale_re(1.0 / k as f64);
            sum = &sum + &term;
        }
        sum
    }

    #[test]
    fn expm_zero_is_identity() {
        let e = Matrix::zeros(3).expm(7.0).unwrap();
        assert_eq!(e, Matrix::identity(3));
    }

    #[test]
    fn expm_scalar() {
        let e = Matrix::diag_real(&[-1.0]).expm(1.0).unwrap();
        assert!((e.get(0, 0) - c64((-1.0f64).exp(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn expm_rotation_matches_series() {
        let a = Matrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap();
        let oracle = series_exp(&a, FRAC_PI_2, 30);
        let expected = Matrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap();
        assert!(oracle.dist(&expected) < 1e-14);
        let e = a.expm(FRAC_PI_2).unwrap();
        assert!(e.dist(&oracle) < 1e-13);
    }

    #[test]
    fn expm_overflow_is_an_error() {
        let a = Matrix::diag_real(&[1.0, 2.0]);
        assert!(matches!(a.expm(1e4), Err(Error::ExpOverflow { .. })));
    }

    #[test]
    fn psd_sqrt_cases() {
        assert!(Matrix::identity(3).psd_sqrt().unwrap().dist(&Matrix::identity(3)) < 1e-14);
        let q = Matrix::diag_real(&[4.0, 9.0]).psd_sqrt().unwrap();
        assert!(q.dist(&Matrix::diag_real(&[2.0, 3.0])) < 1e-14);
    }

    #[test]
    fn psd_sqrt_clamps_dust_and_rejects_non_psd() {
        let dust = Matrix::diag_real(&[1.0, -1e-13]);
        let q = dust.psd_sqrt().unwrap();
        assert!(q.get(1, 1).norm() == 0.0);
        assert!(matches!(Matrix::diag_real(&[1.0, -0.5]).psd_sqrt(), Err(Error::NotPsd(_))));
        let skew = Matrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        assert!(matches!(skew.psd_sqrt(), Err(Error::NotPsd(_))));
    }

    #[test]
    fn op_norm_cases() {
        assert_eq!(Matrix::zeros(2).op_norm(), 0.0);
        assert!((Matrix::diag_real(&[3.0, -1.0]).op_norm() - 3.0).abs() < 1e-14);
        let th: f64 = 0.3;
        let u = Matrix::from_real_rows(&[&[th.cos(), -th.sin()], &[th.sin(), th.cos()]]).unwrap();
        assert!((&u.adjoint() * &u).dist(&Matrix::identity(2)) < 1e-15);
        assert!((u.op_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn solve_cases() {
        let b = Matrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        assert!(Matrix::identity(2).solve(&b).unwrap().dist(&b) < 1e-15);
        let x = Matrix::diag_real(&[2.0]).solve(&Matrix::identity(1)).unwrap();
        assert!((x.get(0, 0) - c64(0.5, 0.0)).norm() < 1e-15);
        let sing = Matrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]).unwrap();
        assert!(matches!(sing.solve(&b), Err(Error::Singular { .. })));
    }

    #[test]
    fn spectrum_identity_and_diagonal() {
        let s = Matrix::identity(3).point_spectrum(1e-10).unwrap();
        assert_eq!(s.eigenvalues.len(), 3);
        assert!(s.eigenvalues.iter().all(|l| (l - c64(1.0, 0.0)).norm() < 1e-14));

        let d = Matrix::diag(&[c64(0.0, 1.0), c64(0.0, -1.0)]);
        let s = d.point_spectrum(1e-10).unwrap();
        let mut ims: Vec<f64> = s.eigenvalues.iter().map(|l| l.im).collect();
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + 1.0).abs() < 1e-14 && (ims[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn spectrum_companion_golden_ratio() {
        // companion matrix of z² − z − 1; roots from the quadratic formula
        let c = Matrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 1.0]]).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let psi = (1.0 - 5f64.sqrt()) / 2.0;
        let s = c.point_spectrum(1e-10).unwrap();
        let mut re: Vec<f64> = s.eigenvalues.iter().map(|l| l.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] - psi).abs() < 1e-13);
        assert!((re[1] - phi).abs() < 1e-13);
        assert!(s.residuals.iter().all(|&r| r <= 1e-10));
    }

    #[test]
    fn complex_spectrum_of_rotation() {
        let th = PI / 5.0;
        let r = Matrix::from_real_rows(&[&[th.cos(), -th.sin()], &[th.sin(), th.cos()]]).unwrap();
        let s = r.point_spectrum(1e-10).unwrap();
        assert_eq!(s.unimodular(1e-10).len(), 2);
    }

    #[test]
    fn pow_and_kron() {
        let a = Matrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        let a5 = a.pow(5);
        assert_eq!(a5.get(0, 1), c64(5.0, 0.0));
        let k = Matrix::identity(2).kron(&a);
        assert_eq!(k.block(1, 1, 2), a);
        assert_eq!(k.block(0, 1, 2), Matrix::zeros(2));
    }
}
