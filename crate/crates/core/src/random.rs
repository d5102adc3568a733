//! Seeded random operators. Every generator is deterministic in its seed.

use nalgebra::{DMatrix, SVD};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::{c64, Matrix, Vector, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Complex Ginibre draw with entry variance `1/dim`.
pub fn ginibre(dim: usize, rng: &mut impl Rng) -> Matrix {
    let s = 1.0 / (dim as f64).sqrt();
    Matrix::from_fn(dim, |_, _| gaussian(rng) * s)
}

pub fn random_vector(dim: usize, rng: &mut impl Rng) -> Vector {
    let v = Vector::from_fn(dim, |_, _| gaussian(rng));
    let n = v.norm();
    v / c64(n, 0.0)
}

/// Contraction with `‖S‖ ≤ 1 − margin`, obtained by clamping the singular values of
/// a Ginibre draw.
pub fn random_contraction(dim: usize, seed: u64, margin: f64) -> Matrix {
    assert!(dim >= 1, "dim must be positive");
    assert!((0.0..1.0).contains(&margin), "margin must lie in [0, 1)");
    let mut r = rng(seed);
    let g = ginibre(dim, &mut r);
    let cap = (1.0 - margin) * (1.0 - 4.0 * f64::EPSILON);
    clamp_singular_values(&g, cap)
}

pub(crate) fn clamp_singular_values(g: &Matrix, cap: f64) -> Matrix {
    let svd = SVD::new(g.inner().clone(), true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let s = DMatrix::from_diagonal(&svd.singular_values.map(|x| c64(x.min(cap), 0.0)));
    let out = Matrix::from_inner(u * s * v_t).expect("finite");
    let norm = out.op_norm();
    if norm > cap {
        out.scale_re(cap / norm)
    } else {
        out
    }
}

/// Haar-distributed unitary (QR of a Ginibre draw with phase correction).
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> Matrix {
    let g = ginibre(dim, rng);
    let qr = g.inner().clone().qr();
    let q = qr.q();
    let r = qr.r();
    let phases = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            let d = r[(i, i)];
            if d.norm() > 0.0 {
                d / c64(d.norm(), 0.0)
            } else {
                c64(1.0, 0.0)
            }
        } else {
            c64(0.0, 0.0)
        }
    });
    Matrix::from_inner(q * phases).expect("finite")
}

/// Unitary `Q diag(e^{iθ_k}) Q*` with prescribed eigen-angles.
pub fn unitary_with_angles(angles: &[f64], seed: u64) -> Matrix {
    let mut r = rng(seed);
    let q = random_unitary(angles.len(), &mut r);
    let d = Matrix::diag(&angles.iter().map(|&t| C64::from_polar(1.0, t)).collect::<Vec<_>>());
    &(&q * &d) * &q.adjoint()
}

/// Hermitian matrix with spectral norm `norm`.
pub fn random_hermitian(dim: usize, norm: f64, rng: &mut impl Rng) -> Matrix {
    let h = ginibre(dim, rng).hermitian_part();
    let n = h.op_norm();
    if n == 0.0 {
        h
    } else {
        h.scale_re(norm / n)
    }
}

/// Dissipative generator `K − FF*/2` (K skew-Hermitian) rescaled to spectral norm `norm`.
pub fn random_dissipative(dim: usize, norm: f64, rng: &mut impl Rng) -> Matrix {
    let g = ginibre(dim, rng);
    let k = (&g - &g.adjoint()).scale_re(0.5);
    let f = ginibre(dim, rng);
    let a = &k - &(&f * &f.adjoint()).scale_re(0.5);
    let n = a.op_norm();
    if n == 0.0 {
        a
    } else {
        a.scale_re(norm / n)
    }
}

/// Skew-Hermitian generator `iH` with `‖H‖ = norm`.
pub fn random_skew(dim: usize, norm: f64, rng: &mut impl Rng) -> Matrix {
    random_hermitian(dim, norm, rng).scale(c64(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contraction_margin_zero() {
        for seed in 0..20 {
            let s = random_contraction(3, seed, 0.0);
            assert!(s.op_norm() <= 1.0);
        }
    }

    #[test]
    fn contraction_is_deterministic() {
        assert_eq!(random_contraction(4, 11, 0.2), random_contraction(4, 11, 0.2));
        assert_ne!(random_contraction(4, 11, 0.2), random_contraction(4, 12, 0.2));
    }

    #[test]
    fn contraction_margin_sweep() {
        for seed in 0..100 {
            let dim = 1 + (seed as usize % 4);
            assert!(random_contraction(dim, seed, 0.1).op_norm() <= 0.9);
        }
    }

    #[test]
    fn unitary_and_dissipative() {
        let mut r = rng(5);
        let u = random_unitary(4, &mut r);
        assert!((&u.adjoint() * &u).dist(&Matrix::identity(4)) < 1e-13);
        let a = random_dissipative(3, 2.0, &mut r);
        assert!(a.max_hermitian_eigenvalue() <= 1e-14);
        assert!((a.op_norm() - 2.0).abs() < 1e-12);
    }
}
