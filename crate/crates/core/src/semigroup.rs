//! Contraction semigroups with bounded generators and their co-generators.
//!
//! For a dissipative generator `A` the co-generator is the Cayley-type transform
//! `V = (A + 1)(A − 1)^{-1} = 1 − 2(1 − A)^{-1}`, a contraction without eigenvalue 1.
//! The Yosida approximants `A^{(λ)} = λ²(λ − A)^{-1} − λ` can be written purely in
//! terms of `V`, and `exp(tA^{(λ)})` is a holomorphic function of `V` whose Maclaurin
//! polynomials are computed here with a certified tail bound.

use crate::error::{Error, Result};
use crate::matrix::{c64, Matrix, Vector, C64};

/// Tolerance on the largest eigenvalue of the Hermitian part of a generator.
pub const DISSIPATIVE_TOL: f64 = 1e-10;
const SPOT_CHECK_TIMES: [f64; 4] = [0.25, 1.0, 4.0, 16.0];

/// `T(t) = exp(tA)` for a bounded dissipative generator `A`.
#[derive(Clone, Debug)]
pub struct ContractionSemigroup {
    generator: Matrix,
}

impl ContractionSemigroup {
    pub fn new(generator: Matrix) -> Result<Self> {
        let max_eig = generator.max_hermitian_eigenvalue();
        if max_eig > DISSIPATIVE_TOL {
            return Err(Error::NotDissipative { max_eig });
        }
        for &t in &SPOT_CHECK_TIMES {
            // skip the spot check where the cap would trip; the Hermitian-part test already decided
            if let Ok(e) = generator.expm(t) {
                let norm = e.op_norm();
                if norm > 1.0 + DISSIPATIVE_TOL {
                    return Err(Error::NotDissipative { max_eig });
                }
            }
        }
        Ok(Self { generator })
    }

    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    /// `A + A* = 0` within tolerance, i.e. `T` extends to a unitary group.
    pub fn is_unitary_group(&self) -> bool {
        let a = &self.generator;
        (a + &a.adjoint()).op_norm() <= DISSIPATIVE_TOL * (1.0 + a.op_norm())
    }

    /// `T(t)` for `t ≥ 0`.
    pub fn evaluate(&self, t: f64) -> Result<Matrix> {
        if t < 0.0 {
            return Err(Error::InvalidArgument(format!("negative time {t}")));
        }
        self.generator.expm(t)
    }

    /// `T(t)` for any real `t`; negative times need a unitary group.
    pub fn evaluate_signed(&self, t: f64) -> Result<Matrix> {
        if t < 0.0 && !self.is_unitary_group() {
            return Err(Error::InvalidArgument(format!(
                "negative time {t} on a non-unitary semigroup"
            )));
        }
        self.generator.expm(t)
    }

    /// Co-generator `V = (A + 1)(A − 1)^{-1}`, cross-checked against `1 − 2(1 − A)^{-1}`.
    pub fn cogenerator(&self) -> Result<Matrix> {
        let a = &self.generator;
        let id = Matrix::identity(a.dim());
        let inv_a_minus_one = (a - &id).inverse().map_err(|_| Error::NotDissipative {
            max_eig: a.max_hermitian_eigenvalue(),
        })?;
        let cayley = &(a + &id) * &inv_a_minus_one;
        let resolvent_form = &id - &(&id - a).inverse()?.scale_re(2.0);
        let gap = cayley.dist(&resolvent_form);
        if gap > 1e-10 * (1.0 + a.op_norm()) {
            return Err(Error::Inconsistent {
                what: "co-generator closed forms disagree",
                residual: gap,
            });
        }
        Ok(cayley)
    }

    /// `R(A, λ) = (λ − A)^{-1}` by direct solve.
    pub fn resolvent(&self, lambda: C64) -> Result<Matrix> {
        let n = self.dim();
        (&Matrix::identity(n).scale(lambda) - &self.generator).inverse()
    }
}

/// Inverse co-generator transform `A = 1 − 2(1 − V)^{-1}`.
pub fn generator_from_cogenerator(v: &Matrix) -> Result<Matrix> {
    let id = Matrix::identity(v.dim());
    let w = (&id - v)
        .inverse()
        .map_err(|_| Error::CogeneratorEigenvalueOne)?;
    Ok(&id - &w.scale_re(2.0))
}

/// `γ = (λ+1)/(λ−1)`, `α = λ/(λ−1)`, `β = 2α²` for `λ > 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct YosidaConstants {
    pub lambda: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl YosidaConstants {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 1.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("Yosida parameter {lambda} must exceed 1")));
        }
        let alpha = lambda / (lambda - 1.0);
        Ok(Self {
            lambda,
            gamma: (lambda + 1.0) / (lambda - 1.0),
            alpha,
            beta: 2.0 * alpha * alpha,
        })
    }
}

/// `α·1 − β(γ·1 − V)^{-1}`: the Yosida approximant expressed through a co-generator.
pub fn yosida_from_cogenerator(v: &Matrix, c: &YosidaConstants) -> Result<Matrix> {
    let n = v.dim();
    let id = Matrix::identity(n);
    let res = (&id.scale_re(c.gamma) - v).inverse()?;
    Ok(&id.scale_re(c.alpha) - &res.scale_re(c.beta))
}

/// `A^{(λ)} = λ²R(A, λ) − λ`, cross-checked against the co-generator form.
pub fn yosida_generator(t: &ContractionSemigroup, c: &YosidaConstants) -> Result<Matrix> {
    let n = t.dim();
    let lam = c.lambda;
    let direct = &t.resolvent(c64(lam, 0.0))?.scale_re(lam * lam) - &Matrix::identity(n).scale_re(lam);
    let via_v = yosida_from_cogenerator(&t.cogenerator()?, c)?;
    let gap = direct.dist(&via_v);
    if gap > 1e-10 * (1.0 + direct.op_norm()) {
        return Err(Error::Inconsistent {
            what: "Yosida approximant forms disagree",
            residual: gap,
        });
    }
    Ok(direct)
}

/// `T^{(λ)}(t) = exp(t·A^{(λ)})`.
pub fn yosida_semigroup(t_sg: &ContractionSemigroup, c: &YosidaConstants, t: f64) -> Result<Matrix> {
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!("negative time {t}")));
    }
    yosida_generator(t_sg, c)?.expm(t)
}

/// Maclaurin polynomial of `f(z) = exp(t(α − β/(γ − z)))` with a tail estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyApprox {
    pub t: f64,
    pub constants: YosidaConstants,
    pub coeffs: Vec<f64>,
    /// Upper bound for `Σ_{k>n} |c_k|`.
    pub tail_bound: f64,
}

impl PolyApprox {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Scalar evaluation of the truncated series.
    pub fn eval_scalar(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(c64(0.0, 0.0), |acc, &ck| acc * z + c64(ck, 0.0))
    }
}

/// The function the polynomial approximates, evaluated directly.
pub fn yosida_symbol(t: f64, c: &YosidaConstants, z: C64) -> C64 {
    (c64(c.alpha, 0.0) - c64(c.beta, 0.0) / (c64(c.gamma, 0.0) - z)).scale(t).exp()
}

/// Coefficients `c_0..c_n` of `exp(g(z))`, `g(z) = t(α − β/(γ − z))`.
///
/// Uses `(k+1)c_{k+1} = Σ_{j≤k} (j+1) g_{j+1} c_{k−j}` with `g_0 = t(α − β/γ)` and
/// `g_j = −tβγ^{−(j+1)}`. The tail bound is the Cauchy estimate on the circle of
/// radius `r = (1+γ)/2` with `M(r) = exp(t(α + β/(γ − r)))`, summed geometrically.
pub fn poly_coeffs(t: f64, c: &YosidaConstants, n: usize) -> PolyApprox {
    assert!(t >= 0.0, "poly_coeffs needs t ≥ 0");
    if t == 0.0 {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[0] = 1.0;
        return PolyApprox {
            t,
            constants: *c,
            coeffs,
            tail_bound: 0.0,
        };
    }
    let g0 = t * (c.alpha - c.beta / c.gamma);
    // gd[j] = (j+1) g_{j+1}
    let gd: Vec<f64> = (0..n)
        .map(|j| (j as f64 + 1.0) * (-t * c.beta * c.gamma.powi(-(j as i32 + 2))))
        .collect();
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(g0.exp());
    for k in 0..n {
        let s: f64 = (0..=k).map(|j| gd[j] * coeffs[k - j]).sum();
        coeffs.push(s / (k as f64 + 1.0));
    }
    let r = 0.5 * (1.0 + c.gamma);
    let m = (t * (c.alpha + c.beta / (c.gamma - r))).exp();
    let tail_bound = m * r.powi(-(n as i32 + 1)) / (1.0 - 1.0 / r);
    PolyApprox {
        t,
        constants: *c,
        coeffs,
        tail_bound,
    }
}

/// `p(V) = Σ c_k V^k` by Horner's rule. Expects `‖V‖ ≤ 1`.
pub fn poly_apply(p: &PolyApprox, v: &Matrix) -> Matrix {
    let n = v.dim();
    let id = Matrix::identity(n);
    p.coeffs.iter().rev().fold(Matrix::zeros(n), |acc, &ck| {
        &(&acc * v) + &id.scale_re(ck)
    })
}

/// Composite Gauss–Legendre settings for [`resolvent_via_laplace`].
#[derive(Clone, Copy, Debug)]
pub struct QuadratureSpec {
    pub tol: f64,
    pub nodes_per_panel: usize,
    pub max_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            nodes_per_panel: 12,
            max_panels: 4096,
        }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Newton iteration on `P_n`).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `R(A, λ) = ∫₀^∞ e^{−λt} T(t) dt` by composite Gauss–Legendre on `[0, T_max]`.
///
/// `T_max` makes the neglected tail `e^{−Re λ·T_max}/Re λ` at most `tol/2`. Panels are
/// doubled until two successive estimates differ by at most `tol/2`.
pub fn resolvent_via_laplace(
    t_sg: &ContractionSemigroup,
    lambda: C64,
    quad: &QuadratureSpec,
) -> Result<Matrix> {
    let re = lambda.re;
    if re <= 0.0 {
        return Err(Error::InvalidArgument(format!("Re λ = {re} must be positive")));
    }
    let t_max = ((2.0 / (quad.tol * re)).ln() / re).max(1.0 / re);
    let (x, w) = gauss_legendre(quad.nodes_per_panel);
    let estimate = |panels: usize| -> Result<Matrix> {
        let h = t_max / panels as f64;
        let step = t_sg.generator().expm(h)?;
        let mut start = Matrix::identity(t_sg.dim());
        let mut acc = Matrix::zeros(t_sg.dim());
        for p in 0..panels {
            let a = p as f64 * h;
            for (xi, wi) in x.iter().zip(&w) {
                let local = 0.5 * h * (xi + 1.0);
                let tt = a + local;
                let weight = (-lambda * tt).exp() * (0.5 * h * wi);
                let node = &t_sg.generator().expm(local)? * &start;
                acc = &acc + &node.scale(weight);
            }
            start = &step * &start;
        }
        Ok(acc)
    };
    let mut panels = (t_max.ceil() as usize).max(1);
    let mut prev = estimate(panels)?;
    loop {
        let next_panels = panels * 2;
        if next_panels > quad.max_panels {
            let achieved = prev.dist(&estimate(panels / 2)?);
            return Err(Error::QuadratureBudget {
                achieved,
                target: quad.tol,
            });
        }
        let next = estimate(next_panels)?;
        if next.dist(&prev) <= 0.5 * quad.tol {
            return Ok(next);
        }
        prev = next;
        panels = next_panels;
    }
}

/// Adjacent-point continuity moduli of an indexed generator family.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuityReport {
    /// `max_{t, ξ} ‖(T_ω(t) − T_ω'(t))ξ‖` per adjacent pair `(ω, ω')`.
    pub semigroup_modulus: Vec<f64>,
    /// `max_ξ ‖(V_ω − V_ω')ξ‖` per adjacent pair.
    pub cogenerator_modulus: Vec<f64>,
}

/// Diagnostic moduli for the family `ω ↦ A(ω)` sampled on a sorted grid.
pub fn continuity_moduli(
    family: &[(f64, Matrix)],
    t_grid: &[f64],
    probes: &[Vector],
) -> Result<ContinuityReport> {
    if family.windows(2).any(|w| w[0].0 > w[1].0) {
        return Err(Error::InvalidArgument("family grid must be sorted".into()));
    }
    if probes.iter().any(|p| p.norm() == 0.0) {
        return Err(Error::InvalidArgument("probe vectors must be nonzero".into()));
    }
    let sgs = family
        .iter()
        .map(|(_, a)| ContractionSemigroup::new(a.clone()))
        .collect::<Result<Vec<_>>>()?;
    let cogens = sgs.iter().map(|s| s.cogenerator()).collect::<Result<Vec<_>>>()?;
    let mut report = ContinuityReport {
        semigroup_modulus: Vec::new(),
        cogenerator_modulus: Vec::new(),
    };
    for k in 1..sgs.len() {
        let mut sg_mod: f64 = 0.0;
        for &t in t_grid {
            let d = &sgs[k].evaluate(t)? - &sgs[k - 1].evaluate(t)?;
            for xi in probes {
                sg_mod = sg_mod.max(d.apply(xi).norm());
            }
        }
        let dv = &cogens[k] - &cogens[k - 1];
        let v_mod = probes.iter().map(|xi| dv.apply(xi).norm()).fold(0.0, f64::max);
        report.semigroup_modulus.push(sg_mod);
        report.cogenerator_modulus.push(v_mod);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_dissipative, random_vector, rng};

    fn sg(a: Matrix) -> ContractionSemigroup {
        ContractionSemigroup::new(a).unwrap()
    }

    #[test]
    fn evaluate_basic() {
        assert_eq!(sg(Matrix::zeros(2)).evaluate(5.0).unwrap(), Matrix::identity(2));
        let e = sg(Matrix::identity(2).scale_re(-1.0)).evaluate(1.0).unwrap();
        assert!(e.dist(&Matrix::identity(2).scale_re((-1.0f64).exp())) < 1e-15);
        assert!(sg(Matrix::zeros(1)).evaluate(-1.0).is_err());
    }

    #[test]
    fn rejects_non_dissipative() {
        let err = ContractionSemigroup::new(Matrix::diag_real(&[0.1, -1.0])).unwrap_err();
        assert!(matches!(err, Error::NotDissipative { .. }));
    }

    #[test]
    fn semigroup_law() {
        let mut r = rng(3);
        for _ in 0..10 {
            let s = sg(random_dissipative(3, 2.0, &mut r));
            let lhs = &s.evaluate(0.7).unwrap() * &s.evaluate(1.1).unwrap();
            assert!(lhs.dist(&s.evaluate(1.8).unwrap()) <= 1e-10);
        }
    }

    #[test]
    fn cogenerator_examples() {
        let v = sg(Matrix::zeros(2)).cogenerator().unwrap();
        assert!(v.dist(&Matrix::identity(2).scale_re(-1.0)) < 1e-15);
        let v = sg(Matrix::identity(2).scale_re(-1.0)).cogenerator().unwrap();
        assert!(v.op_norm() < 1e-15);
        let v = sg(Matrix::identity(1).scale(c64(0.0, 1.0))).cogenerator().unwrap();
        let mobius = (c64(0.0, 1.0) + 1.0) / (c64(0.0, 1.0) - 1.0);
        assert!((v.get(0, 0) - mobius).norm() < 1e-15);
        assert!((mobius - c64(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn generator_round_trip() {
        let a = generator_from_cogenerator(&Matrix::identity(2).scale_re(-1.0)).unwrap();
        assert!(a.op_norm() < 1e-15);
        let a = generator_from_cogenerator(&Matrix::zeros(2)).unwrap();
        assert!(a.dist(&Matrix::identity(2).scale_re(-1.0)) < 1e-15);
        assert_eq!(
            generator_from_cogenerator(&Matrix::identity(2)).unwrap_err(),
            Error::CogeneratorEigenvalueOne
        );
    }

    #[test]
    fn yosida_constants() {
        let c = YosidaConstants::new(2.0).unwrap();
        assert_eq!((c.gamma, c.alpha, c.beta), (3.0, 2.0, 8.0));
        assert!(YosidaConstants::new(1.0).is_err());
    }

    #[test]
    fn yosida_minus_identity_hand_value() {
        let c = YosidaConstants::new(2.0).unwrap();
        let s = sg(Matrix::identity(2).scale_re(-1.0));
        // λ²/(λ+1) − λ = 4/3 − 2 and α − β/γ = 2 − 8/3
        let expected = Matrix::identity(2).scale_re(-2.0 / 3.0);
        assert!(yosida_generator(&s, &c).unwrap().dist(&expected) < 1e-14);
        let v = s.cogenerator().unwrap();
        assert!(yosida_from_cogenerator(&v, &c).unwrap().dist(&expected) < 1e-14);
        let e = yosida_semigroup(&s, &c, 1.0).unwrap();
        assert!(e.dist(&Matrix::identity(2).scale_re((-2.0f64 / 3.0).exp())) < 1e-14);
        assert_eq!(yosida_semigroup(&s, &c, 0.0).unwrap(), Matrix::identity(2));
    }

    #[test]
    fn yosida_of_zero_generator() {
        let s = sg(Matrix::zeros(3));
        for lam in [1.5, 10.0, 1e3] {
            let c = YosidaConstants::new(lam).unwrap();
            assert!(yosida_generator(&s, &c).unwrap().op_norm() < 1e-12);
        }
    }

    #[test]
    fn yosida_neumann_bound() {
        let mut r = rng(17);
        for _ in 0..10 {
            let a = random_dissipative(3, 2.0, &mut r);
            let c = YosidaConstants::new(1e3).unwrap();
            let ay = yosida_generator(&sg(a.clone()), &c).unwrap();
            let na = a.op_norm();
            assert!(ay.dist(&a) <= 10.0 * na * na / 1e3);
        }
    }

    #[test]
    fn poly_coeffs_trivial_time() {
        let c = YosidaConstants::new(2.0).unwrap();
        let p = poly_coeffs(0.0, &c, 5);
        assert_eq!(p.coeffs, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(p.tail_bound, 0.0);
    }

    #[test]
    fn poly_coeffs_leading_term() {
        let c = YosidaConstants::new(2.0).unwrap();
        for t in [0.1, 1.0, 3.0] {
            let p = poly_coeffs(t, &c, 3);
            assert!((p.coeffs[0] - (-2.0 * t / 3.0).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn poly_coeffs_match_direct_evaluation() {
        let c = YosidaConstants::new(2.0).unwrap();
        let p = poly_coeffs(1.0, &c, 20);
        let z = c64(0.5, 0.0);
        assert!((p.eval_scalar(z) - yosida_symbol(1.0, &c, z)).norm() < 1e-8);
    }

    #[test]
    fn poly_tail_non_increasing() {
        let c = YosidaConstants::new(3.0).unwrap();
        let tails: Vec<f64> = (0..40).map(|n| poly_coeffs(1.0, &c, n).tail_bound).collect();
        assert!(tails.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn poly_apply_degenerate() {
        let c = YosidaConstants::new(2.0).unwrap();
        let p = poly_coeffs(1.0, &c, 0);
        let v = crate::random::random_contraction(2, 1, 0.0);
        assert!(poly_apply(&p, &v).dist(&Matrix::identity(2).scale_re(p.coeffs[0])) < 1e-15);
        let p = poly_coeffs(1.0, &c, 6);
        assert!(poly_apply(&p, &Matrix::zeros(2)).dist(&Matrix::identity(2).scale_re(p.coeffs[0])) < 1e-15);
    }

    #[test]
    fn poly_apply_within_tail() {
        let c = YosidaConstants::new(2.0).unwrap();
        let mut r = rng(23);
        for _ in 0..5 {
            let s = sg(random_dissipative(2, 1.5, &mut r));
            let v = s.cogenerator().unwrap();
            let p = poly_coeffs(1.0, &c, 40);
            let target = yosida_semigroup(&s, &c, 1.0).unwrap();
            assert!(poly_apply(&p, &v).dist(&target) <= p.tail_bound + 1e-10);
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(5);
        let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((integral - 2.0 / 9.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn laplace_scalar_cases() {
        let q = QuadratureSpec::default();
        let r = resolvent_via_laplace(&sg(Matrix::identity(2).scale_re(-1.0)), c64(1.0, 0.0), &q).unwrap();
        assert!(r.dist(&Matrix::identity(2).scale_re(0.5)) < 1e-10);
        let r = resolvent_via_laplace(&sg(Matrix::zeros(2)), c64(2.0, 0.0), &q).unwrap();
        assert!(r.dist(&Matrix::identity(2).scale_re(0.5)) < 1e-10);
        assert!(resolvent_via_laplace(&sg(Matrix::zeros(1)), c64(0.0, 1.0), &q).is_err());
    }

    #[test]
    fn laplace_budget_error() {
        let q = QuadratureSpec {
            tol: 1e-14,
            nodes_per_panel: 2,
            max_panels: 8,
        };
        let err = resolvent_via_laplace(&sg(Matrix::zeros(1)), c64(1.0, 0.0), &q).unwrap_err();
        assert!(matches!(err, Error::QuadratureBudget { .. }));
    }

    #[test]
    fn continuity_constant_family_is_zero() {
        let mut r = rng(2);
        let a = random_dissipative(2, 1.0, &mut r);
        let fam: Vec<(f64, Matrix)> = (0..4).map(|k| (k as f64 * 0.25, a.clone())).collect();
        let probes = vec![random_vector(2, &mut r)];
        let rep = continuity_moduli(&fam, &[0.0, 0.5, 1.0], &probes).unwrap();
        assert!(rep.semigroup_modulus.iter().all(|&m| m == 0.0));
        assert!(rep.cogenerator_modulus.iter().all(|&m| m == 0.0));
    }

    #[test]
    fn continuity_affine_family_is_lipschitz() {
        // ‖T_ω(t) − T_ω'(t)‖ ≤ t‖A₁‖Δω by Duhamel, and ‖V_ω − V_ω'‖ ≤ 2‖A₁‖Δω since
        // ‖(1 − A)^{-1}‖ ≤ 1 for dissipative A
        let mut r = rng(3);
        let a0 = random_dissipative(2, 1.0, &mut r);
        let a1 = crate::random::random_skew(2, 1.5, &mut r);
        let grid: Vec<f64> = (0..9).map(|k| k as f64 / 8.0).collect();
        let fam: Vec<(f64, Matrix)> = grid.iter().map(|&w| (w, &a0 + &a1.scale_re(w))).collect();
        let t_grid = [0.0, 0.5, 1.0, 2.0];
        let probes = vec![random_vector(2, &mut r), random_vector(2, &mut r)];
        let rep = continuity_moduli(&fam, &t_grid, &probes).unwrap();
        let t_max = 2.0f64;
        let c = t_max.max(2.0) * a1.op_norm();
        for k in 0..rep.semigroup_modulus.len() {
            let dw = grid[k + 1] - grid[k];
            assert!(rep.semigroup_modulus[k] <= c * dw + 1e-14);
            assert!(rep.cogenerator_modulus[k] <= c * dw + 1e-14);
        }
    }

    #[test]
    fn continuity_detects_jump() {
        let mut r = rng(4);
        let a = random_dissipative(2, 1.0, &mut r);
        let b = &random_dissipative(2, 1.0, &mut r) - &Matrix::identity(2);
        let fam = vec![(0.0, a), (1e-3, b)];
        let probes = vec![random_vector(2, &mut r)];
        let rep = continuity_moduli(&fam, &[0.5, 1.0], &probes).unwrap();
        assert!(rep.semigroup_modulus[0] > 0.05);
        assert!(rep.cogenerator_modulus[0] > 0.05);
    }
}
