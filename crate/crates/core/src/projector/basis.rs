use std::sync::Arc;

use num_complex::Complex64;

use super::kernels::son_normalization_inverse_square;
use crate::error::{Error, Result};
use crate::fock::{enumerate_basis, max_abs, CMatrix, FockOperator, FockVector, LadderPoly, ModeSet};

/// Orthonormal basis of gauge-invariant states built from invariant monomials.
#[derive(Debug, Clone)]
pub struct PhysicalBasis {
    pub modes: Arc<ModeSet>,
    pub vectors: Vec<FockVector>,
    /// Exponents of the invariant monomial behind each vector.
    pub labels: Vec<Vec<u32>>,
}

impl PhysicalBasis {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Largest `‖Ĝ_a v‖_max` over basis vectors and constraints.
    pub fn max_constraint_residual(&self, constraints: &[FockOperator]) -> Result<f64> {
        let mut worst = 0.0f64;
        for v in &self.vectors {
            for g in constraints {
                let out = g.apply(v)?;
                worst = worst.max(out.coeffs().iter().fold(0.0, |acc, z| acc.max(z.norm())));
            }
        }
        Ok(worst)
    }

    /// `max |⟨v_i|v_j⟩ − δ_ij|`.
    pub fn gram_defect(&self) -> f64 {
        let m = self.matrix();
        let gram = m.adjoint() * &m;
        max_abs(&(gram - CMatrix::identity(self.len(), self.len())))
    }

    /// Basis vectors as the columns of a matrix.
    pub fn matrix(&self) -> CMatrix {
        let cols: Vec<_> = self.vectors.iter().map(|v| v.coeffs().clone()).collect();
        if cols.is_empty() {
            return CMatrix::zeros(self.modes.dim(), 0);
        }
        CMatrix::from_columns(&cols)
    }

    /// `Σ_n |v_n⟩⟨v_n|`.
    pub fn projector(&self) -> FockOperator {
        let m = self.matrix();
        let q = &m * m.adjoint();
        FockOperator::new(self.modes.clone(), q, Some(0)).unwrap_or_else(|_| {
            // vectors are degree-homogeneous, so the product cannot leave the band
            unreachable!("physical basis projector left its degree band")
        })
    }
}

/// `c_n (â†·â†)^n |0⟩` for every `2n ≤ Λ`.
pub fn physical_basis_son(num_modes: usize, cutoff: usize) -> Result<PhysicalBasis> {
    if num_modes < 2 {
        return Err(Error::InvalidGenerators(format!("SO(N) needs N ≥ 2, got {num_modes}")));
    }
    let modes = Arc::new(enumerate_basis(num_modes, cutoff));
    physical_basis_son_on(&modes)
}

/// As [`physical_basis_son`], on an existing mode set.
pub fn physical_basis_son_on(modes: &Arc<ModeSet>) -> Result<PhysicalBasis> {
    let num_modes = modes.num_modes();
    let pair = (0..num_modes).fold(LadderPoly::zero(), |acc, j| {
        acc.add(&LadderPoly::create(j).mul(&LadderPoly::create(j)))
    });
    let raise = pair.compress(modes);
    let mut current = FockVector::vacuum(modes.clone());
    let mut vectors = Vec::new();
    let mut labels = Vec::new();
    let mut n = 0usize;
    while 2 * n <= modes.cutoff() {
        let c = 1.0 / son_normalization_inverse_square(n, num_modes).sqrt();
        let coeffs = current.coeffs() * Complex64::new(c, 0.0);
        vectors.push(FockVector::new(modes.clone(), coeffs)?);
        labels.push(vec![n as u32]);
        current = raise.apply(&current)?;
        n += 1;
    }
    Ok(PhysicalBasis {
        modes: modes.clone(),
        vectors,
        labels,
    })
}

