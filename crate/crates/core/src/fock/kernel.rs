use num_complex::Complex64;

use super::basis::ModeSet;
use super::operator::{CVector, FockOperator, FockVector};
use crate::error::{Error, Result};

/// Holomorphic arguments `(z_1, …, z_N)` at which kernels are evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentPoint(Vec<Complex64>);

impl CoherentPoint {
    pub fn new(values: Vec<Complex64>) -> Self {
        Self(values)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn values(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Bilinear (not Hermitian) contraction `Σ z_j w_j`.
    pub fn dot(&self, other: &CoherentPoint) -> Complex64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// Image under a real mode rotation, `z ↦ g z`.
    pub fn rotated(&self, g: &nalgebra::DMatrix<f64>) -> CoherentPoint {
        let n = self.0.len();
        CoherentPoint(
            (0..n)
                .map(|i| (0..n).map(|j| self.0[j] * g[(i, j)]).sum())
                .collect(),
        )
    }

    pub fn scaled(&self, s: f64) -> CoherentPoint {
        CoherentPoint(self.0.iter().map(|z| z * s).collect())
    }
}

/// Basis functions `φ_n(z) = Π z_i^{n_i}/√(n_i!)` for every basis state,
/// accumulated through the parent recurrence `φ_n = φ_{n−e_j} z_j/√n_j`.
pub fn basis_functions(modes: &ModeSet, z: &CoherentPoint) -> Result<CVector> {
    if z.len() != modes.num_modes() {
        return Err(Error::DimensionMismatch {
            expected: modes.num_modes(),
            found: z.len(),
        });
    }
    let mut phi = CVector::zeros(modes.dim());
    phi[0] = Complex64::new(1.0, 0.0);
    for idx in 1..modes.dim() {
        let (parent, j) = modes.parent(idx).expect("non-vacuum state has a parent");
        let nj = modes.multi_index(idx).get(j) as f64;
        phi[idx] = phi[parent] * z.values()[j] / nj.sqrt();
    }
    Ok(phi)
}

/// Holomorphic kernel `Σ_{m,n} φ_m(a*) O_{mn} φ_n(a)` of a truncated operator.
pub fn kernel_eval(op: &FockOperator, astar: &CoherentPoint, a: &CoherentPoint) -> Result<Complex64> {
    let left = basis_functions(op.modes(), astar)?;
    let right = basis_functions(op.modes(), a)?;
    let mr = op.matrix() * right;
    Ok(left.iter().zip(mr.iter()).map(|(l, r)| l * r).sum())
}

/// Wave function `ψ(a*) = Σ_n c_n φ_n(a*)`.
pub fn wavefunction(psi: &FockVector, astar: &CoherentPoint) -> Result<Complex64> {
    let phi = basis_functions(psi.modes(), astar)?;
    Ok(phi.iter().zip(psi.coeffs().iter()).map(|(p, c)| p * c).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::enumerate_basis;
    use std::sync::Arc;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_kernel_at_origin_is_one() {
        let modes = Arc::new(enumerate_basis(3, 4));
        let id = FockOperator::identity(modes);
        let z = CoherentPoint::zeros(3);
        assert_eq!(kernel_eval(&id, &z, &z).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn identity_kernel_is_truncated_exponential() {
        for cutoff in [0usize, 1, 3, 6] {
            let modes = Arc::new(enumerate_basis(1, cutoff));
            let id = FockOperator::identity(modes);
            let z = CoherentPoint::new(vec![c(0.5, 0.0)]);
            let got = kernel_eval(&id, &z, &z).unwrap();
            let mut series = 0.0;
            let mut term = 1.0;
            for n in 0..=cutoff {
                if n > 0 {
                    term *= 0.25 / n as f64;
                }
                series += term;
            }
            assert!((got - c(series, 0.0)).norm() < 1e-15);
            let tail = 0.25f64.exp() - series;
            assert!((got.re - 0.25f64.exp()).abs() <= tail + 1e-15);
        }
    }

    #[test]
    fn multi_mode_identity_kernel_matches_degree_truncated_series() {
        let modes = Arc::new(enumerate_basis(2, 5));
        let id = FockOperator::identity(modes);
        let astar = CoherentPoint::new(vec![c(0.3, -0.2), c(-0.1, 0.4)]);
        let a = CoherentPoint::new(vec![c(0.2, 0.1), c(0.5, -0.3)]);
        let s = astar.dot(&a);
        // Σ_{k≤Λ} s^k / k!
        let mut term = c(1.0, 0.0);
        let mut series = term;
        for k in 1..=5 {
            term = term * s / k as f64;
            series += term;
        }
        assert!((kernel_eval(&id, &astar, &a).unwrap() - series).norm() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let modes = Arc::new(enumerate_basis(2, 2));
        let id = FockOperator::identity(modes);
        let bad = CoherentPoint::zeros(3);
        assert!(kernel_eval(&id, &bad, &CoherentPoint::zeros(2)).is_err());
    }
}
