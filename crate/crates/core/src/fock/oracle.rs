//! Quadrature check of the holomorphic scalar product.
//!
//! With `a_j = x_j + i y_j`, the measure `(2πi)^{-1} da*_j da_j e^{-a*_j a_j}`
//! becomes `π^{-1} e^{-x_j² - y_j²} dx_j dy_j`, which a Gauss–Hermite product
//! rule integrates exactly for polynomial wave functions of low enough degree.

use num_complex::Complex64;

use super::kernel::{basis_functions, CoherentPoint};
use super::operator::FockVector;
use crate::error::{Error, Result};
use crate::quadrature::gauss_hermite;

pub const MAX_ORACLE_MODES: usize = 3;

fn integrate(psi1: &FockVector, psi2: &FockVector, order: usize) -> Result<Complex64> {
    let modes = psi1.modes();
    let n = modes.num_modes();
    let rule = gauss_hermite(order);
    let dims = 2 * n;
    let total = order.pow(dims as u32);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut digits = vec![0usize; dims];
    let mut point = vec![Complex64::new(0.0, 0.0); n];
    for _ in 0..total {
        let mut weight = 1.0;
        for j in 0..n {
            let x = rule.nodes[digits[2 * j]];
            let y = rule.nodes[digits[2 * j + 1]];
            weight *= rule.weights[digits[2 * j]] * rule.weights[digits[2 * j + 1]];
            // a* = x − i y
            point[j] = Complex64::new(x, -y);
        }
        let phi = basis_functions(modes, &CoherentPoint::new(point.clone()))?;
        let f1: Complex64 = phi.iter().zip(psi1.coeffs().iter()).map(|(p, c)| p * c).sum();
        let f2: Complex64 = phi.iter().zip(psi2.coeffs().iter()).map(|(p, c)| p * c).sum();
        sum += f1.conj() * f2 * weight;

        for d in digits.iter_mut() {
            *d += 1;
            if *d < order {
                break;
            }
            *d = 0;
        }
    }
    Ok(sum / std::f64::consts::PI.powi(n as i32))
}

/// Evaluates `⟨ψ1|ψ2⟩` by Gauss–Hermite quadrature over the real and
/// imaginary parts of every mode.
///
/// The integral is repeated at `order + 2`; if the two disagree by more than
/// `1e-10` relative to the result the order is rejected as too low.
pub fn scalar_product_quadrature_oracle(psi1: &FockVector, psi2: &FockVector, order: usize) -> Result<Complex64> {
    let n = psi1.modes().num_modes();
    if n > MAX_ORACLE_MODES {
        return Err(Error::OracleUnsupported(n));
    }
    if !psi1.modes().same_as(psi2.modes()) {
        return Err(Error::ModeSetMismatch);
    }
    let value = integrate(psi1, psi2, order)?;
    let check = integrate(psi1, psi2, order + 2)?;
    let discrepancy = (value - check).norm();
    if discrepancy > 1e-10 * (1.0 + value.norm()) {
        return Err(Error::QuadratureOrderTooLow { order, discrepancy });
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::enumerate_basis;
    use std::sync::Arc;

    #[test]
    fn monomials_are_orthonormal_single_mode() {
        let modes = Arc::new(enumerate_basis(1, 4));
        for i in 0..modes.dim() {
            for j in 0..modes.dim() {
                let a = FockVector::basis_state(modes.clone(), i);
                let b = FockVector::basis_state(modes.clone(), j);
                let got = scalar_product_quadrature_oracle(&a, &b, 6).unwrap();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((got - Complex64::new(expected, 0.0)).norm() < 1e-12, "<{i}|{j}> = {got}");
            }
        }
    }

    #[test]
    fn vacuum_norm_two_modes() {
        let modes = Arc::new(enumerate_basis(2, 2));
        let v = FockVector::vacuum(modes);
        let got = scalar_product_quadrature_oracle(&v, &v, 3).unwrap();
        assert!((got.re - 1.0).abs() < 1e-13 && got.im.abs() < 1e-13);
    }

    #[test]
    fn too_many_modes_rejected() {
        let modes = Arc::new(enumerate_basis(4, 1));
        let v = FockVector::vacuum(modes);
        assert!(matches!(
            scalar_product_quadrature_oracle(&v, &v, 2),
            Err(Error::OracleUnsupported(4))
        ));
    }

    #[test]
    fn low_order_is_flagged() {
        // degree-4 monomial squared needs order ≥ 5 per real direction
        let modes = Arc::new(enumerate_basis(1, 4));
        let v = FockVector::basis_state(modes, 4);
        assert!(matches!(
            scalar_product_quadrature_oracle(&v, &v, 2),
            Err(Error::QuadratureOrderTooLow { .. })
        ));
    }
}
