//! Truncated Schäffer / Sz.-Nagy dilations and the free unitary dilations built from
//! them.
//!
//! Coordinates on `H ⊗ ℂ^M` are level-major: entry `level·n + i`. The unitary
//! dilation lives on two copies of that space; the second copy starts at `n·M`.
//! The isometry annihilates the deepest level `M − 1`, so every exactness statement
//! holds on levels `0..M−2`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::{c64, product, LinearMap, Matrix, Vector, C64};
use crate::semigroup::{
    poly_apply, poly_coeffs, yosida_from_cogenerator, ContractionSemigroup, YosidaConstants,
};

/// Slack allowed on `‖S‖ ≤ 1`.
pub const CONTRACTION_TOL: f64 = 1e-10;
/// Lower bound on `σ_min(1 − Û)` for the continuous dilation.
pub const RESOLVENT_SIGMA_MIN: f64 = 1e-10;
/// Agreement required between the direct solve and the block assembly of `(1 − Û)^{-1}`.
pub const BLOCK_ASSEMBLY_TOL: f64 = 1e-10;

/// Defect `D_S = √(1 − S*S)` and the truncated isometry `𝔚_S`.
fn isometry_parts(s: &Matrix, depth: usize) -> Result<(Matrix, Matrix)> {
    if depth < 2 {
        return Err(Error::InvalidArgument(format!("depth {depth} must be at least 2")));
    }
    let norm = s.op_norm();
    if norm > 1.0 + CONTRACTION_TOL {
        return Err(Error::NotContraction { norm });
    }
    let n = s.dim();
    let id = Matrix::identity(n);
    let defect = (&id - &(&s.adjoint() * s)).hermitian_part().psd_sqrt()?;
    let mut w = Matrix::zeros(n * depth);
    w.set_block(0, 0, s);
    w.set_block(1, 0, &defect);
    for level in 1..depth - 1 {
        w.set_block(level + 1, level, &id);
    }
    Ok((w, defect))
}

/// `𝔚 = S⊗E₀₀ + D_S⊗E₁₀ + 1⊗Σ_{1≤l≤M−2} E_{l+1,l}` on `H ⊗ ℂ^M`.
pub fn nagy_isometry(s: &Matrix, depth: usize) -> Result<Matrix> {
    isometry_parts(s, depth).map(|(w, _)| w)
}

/// The truncated Schäffer / Sz.-Nagy construction for one contraction.
#[derive(Clone, Debug)]
pub struct TruncatedDilation {
    contraction: Matrix,
    depth: usize,
    defect: Matrix,
    w: Matrix,
    u_hat: Matrix,
    r0: LinearMap,
    r1: LinearMap,
}

/// `Û = [[𝔚, 1 − 𝔚𝔚*], [0, 𝔚*]]` together with its embeddings.
pub fn nagy_unitary(s: &Matrix, depth: usize) -> Result<TruncatedDilation> {
    TruncatedDilation::new(s, depth)
}

/// Residuals of the structural invariants of a [`TruncatedDilation`].
#[derive(Clone, Debug, PartialEq)]
pub struct DilationInvariants {
    /// `max(‖r₀*r₀ − 1‖, ‖r₁*r₁ − 1‖)`.
    pub embeddings: f64,
    /// `‖𝔚*𝔚 − 1⊗diag(1,…,1,0)‖`.
    pub partial_isometry: f64,
    /// Largest entry of the lower-left block of `Û`.
    pub lower_left: f64,
    /// `‖Q(Û*Û − 1)Q‖` with `Q` removing the deepest level of the first copy.
    pub unitarity_off_boundary: f64,
    /// `max(‖r₁*Ûr₁ − S‖, ‖r₀*𝔚r₀ − S‖)`.
    pub compression: f64,
}

impl DilationInvariants {
    pub fn max(&self) -> f64 {
        [
            self.embeddings,
            self.partial_isometry,
            self.lower_left,
            self.unitarity_off_boundary,
            self.compression,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

impl TruncatedDilation {
    pub fn new(s: &Matrix, depth: usize) -> Result<Self> {
        let (w, defect) = isometry_parts(s, depth)?;
        let n = s.dim();
        let big = n * depth;
        let ww = &w * &w.adjoint();
        let mut u_hat = Matrix::zeros(2 * big);
        u_hat.set_block(0, 0, &w);
        u_hat.set_block(0, 1, &(&Matrix::identity(big) - &ww));
        u_hat.set_block(1, 1, &w.adjoint());
        Ok(Self {
            contraction: s.clone(),
            depth,
            defect,
            w,
            u_hat,
            r0: LinearMap::coordinate_embedding(big, n, 0),
            r1: LinearMap::coordinate_embedding(2 * big, n, 0),
        })
    }

    pub fn base_dim(&self) -> usize {
        self.contraction.dim()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn contraction(&self) -> &Matrix {
        &self.contraction
    }

    pub fn defect(&self) -> &Matrix {
        &self.defect
    }

    pub fn isometry(&self) -> &Matrix {
        &self.w
    }

    pub fn unitary(&self) -> &Matrix {
        &self.u_hat
    }

    pub fn r0(&self) -> &LinearMap {
        &self.r0
    }

    pub fn r1(&self) -> &LinearMap {
        &self.r1
    }

    /// Dimension `2·n·M` of the dilation space.
    pub fn dilated_dim(&self) -> usize {
        self.u_hat.dim()
    }

    pub fn invariants(&self) -> DilationInvariants {
        let n = self.base_dim();
        let big = n * self.depth;
        let id_n = Matrix::identity(n);
        let embeddings = self
            .r0
            .compress(&Matrix::identity(big))
            .dist(&id_n)
            .max(self.r1.compress(&Matrix::identity(2 * big)).dist(&id_n));

        let levels: Vec<f64> = (0..self.depth)
            .map(|l| if l + 1 < self.depth { 1.0 } else { 0.0 })
            .collect();
        let target = Matrix::diag_real(&levels).kron(&id_n);
        let partial_isometry = (&self.w.adjoint() * &self.w).dist(&target);

        let lower_left = self.u_hat.block(1, 0, big).inner().iter().map(|z| z.norm()).fold(0.0, f64::max);

        let keep: Vec<f64> = (0..2 * big)
            .map(|k| if (big - n..big).contains(&k) { 0.0 } else { 1.0 })
            .collect();
        let q = Matrix::diag_real(&keep);
        let gram = &(&self.u_hat.adjoint() * &self.u_hat) - &Matrix::identity(2 * big);
        let unitarity_off_boundary = (&(&q * &gram) * &q).op_norm();

        let compression = self
            .r1
            .compress(&self.u_hat)
            .dist(&self.contraction)
            .max(self.r0.compress(&self.w).dist(&self.contraction));

        DilationInvariants {
            embeddings,
            partial_isometry,
            lower_left,
            unitarity_off_boundary,
            compression,
        }
    }
}

fn check_index(index: usize, len: usize) -> Result<()> {
    if index >= len {
        Err(Error::IndexOutOfRange { index, len })
    } else {
        Ok(())
    }
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        Err(Error::DimensionMismatch { expected: a, got: b })
    } else {
        Ok(())
    }
}

fn common_dim<'a>(mut dims: impl Iterator<Item = usize>) -> Result<usize> {
    let first = dims
        .next()
        .ok_or_else(|| Error::InvalidArgument("empty family".into()))?;
    for d in dims {
        check_lengths(first, d)?;
    }
    Ok(first)
}

/// Families whose words can be evaluated both on the base space and on the dilation.
pub trait WordDilation {
    type Letter;

    fn base_dim(&self) -> usize;

    fn dilated_dim(&self) -> usize;

    /// The embedding `r` of the base space into the dilation space.
    fn embedding(&self) -> &LinearMap;

    /// `Π T_{i_k}(x_k)` in word order (first letter leftmost).
    fn base_word(&self, word: &[Self::Letter]) -> Result<Matrix>;

    /// `Π U_{i_k}(x_k)` in word order.
    fn dilated_word(&self, word: &[Self::Letter]) -> Result<Matrix>;

    /// `‖Π T − r*(Π U)r‖`.
    fn word_residual(&self, word: &[Self::Letter]) -> Result<f64> {
        let lhs = self.base_word(word)?;
        let rhs = self.embedding().compress(&self.dilated_word(word)?);
        Ok(lhs.dist(&rhs))
    }
}

/// Common-depth dilations of a family of contractions.
#[derive(Clone, Debug)]
pub struct DiscreteFreeDilation {
    members: Vec<TruncatedDilation>,
}

impl DiscreteFreeDilation {
    pub fn new(family: &[Matrix], depth: usize) -> Result<Self> {
        common_dim(family.iter().map(Matrix::dim))?;
        let members = family
            .iter()
            .map(|s| TruncatedDilation::new(s, depth))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { members })
    }

    pub fn members(&self) -> &[TruncatedDilation] {
        &self.members
    }

    pub fn depth(&self) -> usize {
        self.members[0].depth()
    }
}

impl WordDilation for DiscreteFreeDilation {
    /// `(index, power)`.
    type Letter = (usize, u32);

    fn base_dim(&self) -> usize {
        self.members[0].base_dim()
    }

    fn dilated_dim(&self) -> usize {
        self.members[0].dilated_dim()
    }

    fn embedding(&self) -> &LinearMap {
        self.members[0].r1()
    }

    fn base_word(&self, word: &[(usize, u32)]) -> Result<Matrix> {
        let mut acc = Matrix::identity(self.base_dim());
        for &(i, p) in word {
            check_index(i, self.members.len())?;
            acc = &acc * &self.members[i].contraction().pow(p);
        }
        Ok(acc)
    }

    fn dilated_word(&self, word: &[(usize, u32)]) -> Result<Matrix> {
        let mut acc = Matrix::identity(self.dilated_dim());
        for &(i, p) in word {
            check_index(i, self.members.len())?;
            acc = &acc * &self.members[i].unitary().pow(p);
        }
        Ok(acc)
    }
}

/// `‖Π S_{i_k}^{n_k} − r₁*(Π Û_{i_k}^{n_k})r₁‖`.
///
/// The identity is exact once `M ≥ 2 + Σ n_k`; smaller depths are still evaluated.
pub fn verify_discrete_word(family: &[Matrix], indices: &[usize], powers: &[u32], depth: usize) -> Result<f64> {
    check_lengths(indices.len(), powers.len())?;
    for &i in indices {
        check_index(i, family.len())?;
    }
    let dil = DiscreteFreeDilation::new(family, depth)?;
    let word: Vec<(usize, u32)> = indices.iter().copied().zip(powers.iter().copied()).collect();
    dil.word_residual(&word)
}

/// One eigenvalue row of [`point_spectrum_transfer`].
#[derive(Clone, Debug)]
pub struct EigenTransfer {
    pub eigenvalue: C64,
    pub eigenvector: Vector,
    /// `‖Û r₁ξ − λ r₁ξ‖`.
    pub transfer_residual: f64,
    /// `‖D_S ξ‖`.
    pub defect_residual: f64,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct SpectrumTransferReport {
    pub rows: Vec<EigenTransfer>,
    pub tol: f64,
}

impl SpectrumTransferReport {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }
}

/// Transfers each unimodular eigenpair of `S` to the dilation and reports residuals.
///
/// An eigenvalue counts as unimodular when `||λ| − 1| ≤ tol`. Each distinct such
/// eigenvalue contributes one row per vector of an orthonormal eigenspace basis.
pub fn point_spectrum_transfer(s: &Matrix, depth: usize, tol: f64) -> Result<SpectrumTransferReport> {
    let dil = TruncatedDilation::new(s, depth)?;
    let n = s.dim();
    let spec = s.point_spectrum(1e-8 * (1.0 + s.op_norm()))?;
    let mut distinct: Vec<(C64, Vector)> = Vec::new();
    for (lam, x) in spec.eigenvalues.iter().zip(&spec.eigenvectors) {
        if (lam.norm() - 1.0).abs() > tol {
            continue;
        }
        if distinct.iter().all(|(mu, _)| (mu - lam).norm() > 1e-8) {
            distinct.push((*lam, x.clone()));
        }
    }
    let scale = tol * s.op_norm().max(1.0);
    let mut rows = Vec::new();
    for (lam, fallback) in distinct {
        let shifted = s - &Matrix::identity(n).scale(lam);
        let mut basis = shifted.null_space(1e-8 * (1.0 + s.op_norm()));
        if basis.is_empty() {
            basis.push(fallback);
        }
        for x in basis {
            let lifted = dil.r1().apply(&x);
            let transfer_residual = (dil.unitary().apply(&lifted) - &lifted * lam).norm();
            let defect_residual = dil.defect().apply(&x).norm();
            let bound = scale * x.norm();
            rows.push(EigenTransfer {
                eigenvalue: lam,
                eigenvector: x,
                transfer_residual,
                defect_residual,
                passed: transfer_residual <= bound && defect_residual <= bound,
            });
        }
    }
    Ok(SpectrumTransferReport { rows, tol })
}

/// `(1 − Û)^{-1}` assembled blockwise from `D̃`, `L` and `P = 𝔚𝔚*`.
///
/// `1 − 𝔚 = D̃^{-1} − L` with `D̃ = (1−V)^{-1}⊗E₀₀ + Σ_{l≥1} 1⊗E_{ll}` and
/// `L = D_V⊗E₁₀ + Σ_{1≤l≤M−2} 1⊗E_{l+1,l}`. `L` is nilpotent, so
/// `X = (1 − 𝔚)^{-1} = Σ_{k<M} (D̃L)^k D̃` is a finite sum, and
/// `(1 − Û)^{-1} = [[X, X(1 − P)X*], [0, X*]]`.
pub fn block_resolvent(dil: &TruncatedDilation) -> Result<Matrix> {
    let n = dil.base_dim();
    let m = dil.depth();
    let big = n * m;
    let id_n = Matrix::identity(n);
    let mut d_tilde = Matrix::identity(big);
    d_tilde.set_block(0, 0, &(&id_n - dil.contraction()).inverse()?);
    let mut l = Matrix::zeros(big);
    l.set_block(1, 0, dil.defect());
    for level in 1..m - 1 {
        l.set_block(level + 1, level, &id_n);
    }
    let dl = &d_tilde * &l;
    let mut term = d_tilde.clone();
    let mut x = d_tilde;
    for _ in 1..m {
        term = &dl * &term;
        x = &x + &term;
    }
    let w = dil.isometry();
    let p = w * &w.adjoint();
    let upper = &(&x * &(&Matrix::identity(big) - &p)) * &x.adjoint();
    let mut out = Matrix::zeros(2 * big);
    out.set_block(0, 0, &x);
    out.set_block(0, 1, &upper);
    out.set_block(1, 1, &x.adjoint());
    Ok(out)
}

/// Dilation of a contraction semigroup through its co-generator.
#[derive(Clone, Debug)]
pub struct ContinuousDilation {
    underlying: TruncatedDilation,
    resolvent: Matrix,
    generator: Matrix,
    block_residual: f64,
}

impl ContinuousDilation {
    pub fn underlying(&self) -> &TruncatedDilation {
        &self.underlying
    }

    /// The dilated co-generator `V`.
    pub fn cogenerator(&self) -> &Matrix {
        self.underlying.contraction()
    }

    /// `B = 1 − 2(1 − Û)^{-1}`.
    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    /// `(1 − Û)^{-1}` from the direct solve.
    pub fn resolvent(&self) -> &Matrix {
        &self.resolvent
    }

    /// Distance between the direct solve and [`block_resolvent`].
    pub fn block_residual(&self) -> f64 {
        self.block_residual
    }

    pub fn r1(&self) -> &LinearMap {
        self.underlying.r1()
    }

    /// `exp(tB)`.
    pub fn evaluate(&self, t: f64) -> Result<Matrix> {
        self.generator.expm(t)
    }
}

/// `V = cogenerator(T)`, `Û = nagy_unitary(V, M)`, `B = 1 − 2(1 − Û)^{-1}`.
pub fn continuous_dilation(t: &ContractionSemigroup, depth: usize) -> Result<ContinuousDilation> {
    let v = t.cogenerator()?;
    let underlying = TruncatedDilation::new(&v, depth)?;
    let big = underlying.dilated_dim();
    let one_minus = &Matrix::identity(big) - underlying.unitary();
    let sigma = one_minus.min_singular_value();
    if sigma <= RESOLVENT_SIGMA_MIN {
        return Err(Error::Singular {
            cond: one_minus.op_norm() / sigma.max(f64::MIN_POSITIVE),
        });
    }
    let resolvent = one_minus.inverse()?;
    let assembled = block_resolvent(&underlying)?;
    let block_residual = resolvent.dist(&assembled);
    if block_residual > BLOCK_ASSEMBLY_TOL * resolvent.op_norm().max(1.0) {
        return Err(Error::Inconsistent {
            what: "block assembly of (1 − Û)^{-1}",
            residual: block_residual,
        });
    }
    let generator = &Matrix::identity(big) - &resolvent.scale_re(2.0);
    Ok(ContinuousDilation {
        underlying,
        resolvent,
        generator,
        block_residual,
    })
}

/// Common-depth continuous dilations of a family of semigroups.
#[derive(Clone, Debug)]
pub struct ContinuousFreeDilation {
    semigroups: Vec<ContractionSemigroup>,
    members: Vec<ContinuousDilation>,
}

impl ContinuousFreeDilation {
    pub fn new(family: &[ContractionSemigroup], depth: usize) -> Result<Self> {
        common_dim(family.iter().map(ContractionSemigroup::dim))?;
        let members = family
            .iter()
            .map(|t| continuous_dilation(t, depth))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            semigroups: family.to_vec(),
            members,
        })
    }

    pub fn semigroups(&self) -> &[ContractionSemigroup] {
        &self.semigroups
    }

    pub fn members(&self) -> &[ContinuousDilation] {
        &self.members
    }

    pub fn depth(&self) -> usize {
        self.members[0].underlying().depth()
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("time {t} must be finite and non-negative")))
    }
}

impl WordDilation for ContinuousFreeDilation {
    /// `(index, time)`.
    type Letter = (usize, f64);

    fn base_dim(&self) -> usize {
        self.semigroups[0].dim()
    }

    fn dilated_dim(&self) -> usize {
        self.members[0].underlying().dilated_dim()
    }

    fn embedding(&self) -> &LinearMap {
        self.members[0].r1()
    }

    fn base_word(&self, word: &[(usize, f64)]) -> Result<Matrix> {
        let mut acc = Matrix::identity(self.base_dim());
        for &(i, t) in word {
            check_index(i, self.semigroups.len())?;
            check_time(t)?;
            acc = &acc * &self.semigroups[i].evaluate(t)?;
        }
        Ok(acc)
    }

    fn dilated_word(&self, word: &[(usize, f64)]) -> Result<Matrix> {
        let mut acc = Matrix::identity(self.dilated_dim());
        for &(i, t) in word {
            check_index(i, self.members.len())?;
            check_time(t)?;
            acc = &acc * &self.members[i].evaluate(t)?;
        }
        Ok(acc)
    }
}

fn zip_word(indices: &[usize], times: &[f64], len: usize) -> Result<Vec<(usize, f64)>> {
    check_lengths(indices.len(), times.len())?;
    for (&i, &t) in indices.iter().zip(times) {
        check_index(i, len)?;
        check_time(t)?;
    }
    Ok(indices.iter().copied().zip(times.iter().copied()).collect())
}

/// `‖Π T_{i_k}(t_k) − r₁*(Π exp(t_k B_{i_k}))r₁‖`.
pub fn verify_continuous_word(
    family: &[ContractionSemigroup],
    indices: &[usize],
    times: &[f64],
    depth: usize,
) -> Result<f64> {
    let word = zip_word(indices, times, family.len())?;
    ContinuousFreeDilation::new(family, depth)?.word_residual(&word)
}

/// Outcome of [`verify_poly_transport`].
#[derive(Clone, Debug, PartialEq)]
pub struct PolyTransportReport {
    /// `‖Π p_k(V_{i_k}) − r₁*(Π p_k(Û_{i_k}))r₁‖`.
    pub residual: f64,
    /// `Σ_k` certified tail bound of `p_k`.
    pub tail_bound_sum: f64,
    /// `‖Π T^{(λ)}_{i_k}(t_k) − r₁*(Π U^{(λ)}_{i_k}(t_k))r₁‖` where `U^{(λ)}` uses the
    /// Yosida approximant written through `Û`.
    pub yosida_word_residual: f64,
}

/// Checks that degree-`n` Maclaurin polynomials of the Yosida semigroups commute with
/// compression along a word, and compares the Yosida-level word on both sides.
pub fn verify_poly_transport(
    family: &[ContractionSemigroup],
    indices: &[usize],
    times: &[f64],
    lambda: f64,
    degree: usize,
    depth: usize,
) -> Result<PolyTransportReport> {
    let word = zip_word(indices, times, family.len())?;
    if depth <= degree * word.len() + 1 {
        return Err(Error::InvalidArgument(format!(
            "depth {depth} must exceed degree·letters + 1 = {}",
            degree * word.len() + 1
        )));
    }
    let c = YosidaConstants::new(lambda)?;
    let dil = DiscreteFreeDilation::new(
        &family.iter().map(|t| t.cogenerator()).collect::<Result<Vec<_>>>()?,
        depth,
    )?;
    let n = dil.base_dim();
    let big = dil.dilated_dim();
    let r1 = dil.embedding();

    let mut base = Matrix::identity(n);
    let mut lifted = Matrix::identity(big);
    let mut yosida_base = Matrix::identity(n);
    let mut yosida_lifted = Matrix::identity(big);
    let mut tail_bound_sum = 0.0;
    for &(i, t) in &word {
        let member = &dil.members()[i];
        let p = poly_coeffs(t, &c, degree);
        tail_bound_sum += p.tail_bound;
        base = &base * &poly_apply(&p, member.contraction());
        lifted = &lifted * &poly_apply(&p, member.unitary());
        yosida_base = &yosida_base * &yosida_from_cogenerator(member.contraction(), &c)?.expm(t)?;
        yosida_lifted = &yosida_lifted * &yosida_from_cogenerator(member.unitary(), &c)?.expm(t)?;
    }
    Ok(PolyTransportReport {
        residual: base.dist(&r1.compress(&lifted)),
        tail_bound_sum,
        yosida_word_residual: yosida_base.dist(&r1.compress(&yosida_lifted)),
    })
}

/// `max_x ‖U(x)r − rV(x)‖` over paired samples `(V(x), U(x))`.
pub fn intertwine_check(samples: &[(Matrix, Matrix)], r: &LinearMap) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (v, u) in samples {
        check_lengths(r.cols(), v.dim())?;
        check_lengths(r.rows(), u.dim())?;
        let defect = (&v.adjoint() * v).dist(&Matrix::identity(v.dim()));
        if defect > CONTRACTION_TOL {
            return Err(Error::InvalidArgument(format!(
                "sample is not isometric (‖V*V − 1‖ = {defect:.3e})"
            )));
        }
        worst = worst.max(r.after_square(u).dist(&r.then_square(v)));
    }
    Ok(worst)
}

/// Extends orthonormal columns to an orthonormal basis of `ℂ^dim`.
fn complete_basis(columns: &[Vector], dim: usize) -> DMatrix<C64> {
    let mut basis: Vec<Vector> = columns.to_vec();
    for k in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut e = Vector::zeros(dim);
        e[k] = c64(1.0, 0.0);
        // two passes of Gram–Schmidt keep the basis orthonormal to roundoff
        for _ in 0..2 {
            for b in &basis {
                let coeff = b.dotc(&e);
                e -= b * coeff;
            }
        }
        let norm = e.norm();
        if norm > 1e-6 {
            basis.push(e / c64(norm, 0.0));
        }
    }
    DMatrix::from_columns(&basis)
}

/// Orthonormal basis of `span{a, b}`.
fn span_basis(a: &Vector, b: &Vector) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::new();
    for v in [a, b] {
        let mut e = v.clone();
        for _ in 0..2 {
            for u in &out {
                let coeff = u.dotc(&e);
                e -= u * coeff;
            }
        }
        let norm = e.norm();
        if norm > 1e-12 * v.norm().max(1.0) {
            out.push(e / c64(norm, 0.0));
        }
    }
    out
}

/// Outcome of [`weak_approx_pairing`].
#[derive(Clone, Debug, PartialEq)]
pub struct PairingReport {
    /// `max_x |⟨𝒯(x)ξ, η⟩ − ⟨w_p*𝒰(x)w_p εξ, εη⟩|`.
    pub pairing_residual: f64,
    /// `max_x ‖𝒯(x) − r*𝒰(x)r‖ · ‖ξ‖‖η‖`.
    pub word_bound: f64,
    /// `max(‖w_p*w_p − 1‖, ‖w_p p − r ε* p‖)`.
    pub completion_residual: f64,
}

/// Weak approximation of a free semigroup word family by a conjugated unitary family.
///
/// The base space is identified with a subspace of the dilation space through the
/// coordinate isometry `ε` onto the last `n` coordinates. With `p` the projection
/// onto `span{εξ, εη}`, `w_p` is a unitary completion of the partial isometry
/// `r ε* p`, and the approximating family is `w_p* 𝒰(·) w_p`.
pub fn weak_approx_pairing<D: WordDilation>(
    dil: &D,
    xi: &Vector,
    eta: &Vector,
    words: &[Vec<D::Letter>],
) -> Result<PairingReport> {
    let n = dil.base_dim();
    let big = dil.dilated_dim();
    check_lengths(n, xi.len())?;
    check_lengths(n, eta.len())?;
    if xi.norm() == 0.0 || eta.norm() == 0.0 {
        return Err(Error::InvalidArgument("ξ and η must be nonzero".into()));
    }
    let eps = LinearMap::coordinate_embedding(big, n, big - n);
    let r = dil.embedding();
    let xi_big = eps.apply(xi);
    let eta_big = eps.apply(eta);

    let domain = span_basis(&xi_big, &eta_big);
    let image: Vec<Vector> = domain.iter().map(|u| r.apply(&eps.adjoint().apply(u))).collect();
    let dom = complete_basis(&domain, big);
    let img = complete_basis(&image, big);
    let w_p = Matrix::from_inner(&img * dom.adjoint())?;

    let p_inner = domain
        .iter()
        .fold(DMatrix::<C64>::zeros(big, big), |acc, u| acc + u * u.adjoint());
    let p = Matrix::from_inner(p_inner)?;
    let partial = r.compose(&eps.adjoint()).then_square(&p);
    let completion_residual = (&w_p.adjoint() * &w_p)
        .dist(&Matrix::identity(big))
        .max(LinearMap::from_inner((&w_p * &p).into_inner()).dist(&partial));

    let scale = xi.norm() * eta.norm();
    let mut pairing_residual: f64 = 0.0;
    let mut word_bound: f64 = 0.0;
    for word in words {
        let t = dil.base_word(word)?;
        let u = dil.dilated_word(word)?;
        let lhs = eta.dotc(&t.apply(xi));
        let conjugated = product(big, [&w_p.adjoint(), &u, &w_p]);
        let rhs = eta_big.dotc(&conjugated.apply(&xi_big));
        pairing_residual = pairing_residual.max((lhs - rhs).norm());
        word_bound = word_bound.max(t.dist(&r.compress(&u)) * scale);
    }
    Ok(PairingReport {
        pairing_residual,
        word_bound,
        completion_residual,
    })
}
