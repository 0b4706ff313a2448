use nalgebra::{ComplexField, DMatrix, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::basis::physical_basis_son_on;
use super::haar::HaarQuadrature;
use crate::error::{Error, Result};
use crate::fock::{induced_rotation, max_abs, CMatrix, FockOperator, FockVector};
use crate::models::{constraint_operators, GaugeModel, ModeLayout};

/// Relative singular-value threshold for the constraint null space.
pub const NULLSPACE_RELATIVE_THRESHOLD: f64 = 1e-8;
/// Singular values within this factor of the threshold are ambiguous.
pub const AMBIGUITY_FACTOR: f64 = 10.0;

/// How the projector is constructed.
#[derive(Debug, Clone)]
pub enum ProjectorMethod {
    /// Orthonormal basis of `∩_a ker Ĝ_a` in every degree block.
    Nullspace,
    /// `Σ_nodes w_g T_g` with `T_g` the induced Fock-space rotation.
    GroupAverage(HaarQuadrature),
    /// Outer products of the invariant-monomial basis (SO(N) vector model).
    ClosedFormBasis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectorMethodKind {
    Nullspace,
    GroupAverage,
    ClosedFormBasis,
}

impl ProjectorMethod {
    pub fn kind(&self) -> ProjectorMethodKind {
        match self {
            ProjectorMethod::Nullspace => ProjectorMethodKind::Nullspace,
            ProjectorMethod::GroupAverage(_) => ProjectorMethodKind::GroupAverage,
            ProjectorMethod::ClosedFormBasis => ProjectorMethodKind::ClosedFormBasis,
        }
    }
}

/// Singular-value gap of the constraint map in one degree block.
#[derive(Debug, Clone, Serialize)]
pub struct BlockSpectrumGap {
    pub degree: usize,
    pub null_dim: usize,
    /// Largest singular value counted as zero.
    pub largest_null: f64,
    /// Smallest singular value counted as nonzero.
    pub smallest_nonnull: Option<f64>,
    pub threshold: f64,
}

/// A projector matrix with provenance.
#[derive(Debug, Clone)]
pub struct ProjectorBundle {
    pub operator: FockOperator,
    pub method: ProjectorMethodKind,
    /// Per-block singular-value diagnostics, null-space method only.
    pub gaps: Vec<BlockSpectrumGap>,
    /// Null-space vectors per degree block, null-space method only.
    pub block_vectors: Vec<CMatrix>,
}

/// Violations of the projector laws, all as entrywise max-norms.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProjectorLaws {
    pub idempotency: f64,
    pub hermiticity: f64,
    pub annihilation_left: f64,
    pub annihilation_right: f64,
    pub off_block: f64,
}

impl ProjectorLaws {
    pub fn worst(&self) -> f64 {
        self.idempotency
            .max(self.hermiticity)
            .max(self.annihilation_left)
            .max(self.annihilation_right)
            .max(self.off_block)
    }
}

fn null_space<T: ComplexField<RealField = f64>>(stacked: DMatrix<T>, degree: usize) -> Result<(Vec<usize>, SVD<T, nalgebra::Dyn, nalgebra::Dyn>, BlockSpectrumGap)> {
    let svd = SVD::new(stacked, false, true);
    let sigma = &svd.singular_values;
    let sigma_max = sigma.iter().cloned().fold(0.0, f64::max);
    let threshold = NULLSPACE_RELATIVE_THRESHOLD * sigma_max;
    let mut null = Vec::new();
    let mut largest_null = 0.0f64;
    let mut smallest_nonnull: Option<f64> = None;
    for (i, &s) in sigma.iter().enumerate() {
        if sigma_max > 0.0 && s > threshold / AMBIGUITY_FACTOR && s < threshold * AMBIGUITY_FACTOR {
            return Err(Error::RankAmbiguity {
                degree,
                singular_value: s,
                threshold,
            });
        }
        if s <= threshold {
            null.push(i);
            largest_null = largest_null.max(s);
        } else {
            smallest_nonnull = Some(smallest_nonnull.map_or(s, |m| m.min(s)));
        }
    }
    let gap = BlockSpectrumGap {
        degree,
        null_dim: null.len(),
        largest_null,
        smallest_nonnull,
        threshold,
    };
    Ok((null, svd, gap))
}

fn nullspace_projector(model: &GaugeModel) -> Result<ProjectorBundle> {
    let modes = model.modes().clone();
    let constraints = constraint_operators(model);
    let dim = modes.dim();
    let mut q = CMatrix::zeros(dim, dim);
    let mut gaps = Vec::new();
    let mut block_vectors = Vec::new();
    let all_real = constraints
        .iter()
        .all(|g| g.matrix().iter().all(|z| z.im == 0.0));
    for degree in 0..=modes.cutoff() {
        let range = modes.block(degree);
        let size = range.len();
        let blocks: Vec<CMatrix> = constraints.iter().map(|g| g.block(degree, degree)).collect();
        let rows = size * blocks.len().max(1);
        // columns of `vectors` span the joint kernel of the block
        let (vectors, gap) = if blocks.is_empty() {
            let gap = BlockSpectrumGap {
                degree,
                null_dim: size,
                largest_null: 0.0,
                smallest_nonnull: None,
                threshold: 0.0,
            };
            (CMatrix::identity(size, size), gap)
        } else if all_real {
            let stacked = DMatrix::<f64>::from_fn(rows, size, |r, c| blocks[r / size][(r % size, c)].re);
            let (null, svd, gap) = null_space(stacked, degree)?;
            let v_t = svd.v_t.expect("right singular vectors requested");
            let cols: Vec<_> = null
                .iter()
                .map(|&i| v_t.row(i).transpose().map(|x| Complex64::new(x, 0.0)))
                .collect();
            (columns_or_empty(cols, size), gap)
        } else {
            let stacked = CMatrix::from_fn(rows, size, |r, c| blocks[r / size][(r % size, c)]);
            let (null, svd, gap) = null_space(stacked, degree)?;
            let v_t = svd.v_t.expect("right singular vectors requested");
            let cols: Vec<_> = null.iter().map(|&i| v_t.row(i).adjoint()).collect();
            (columns_or_empty(cols, size), gap)
        };
        let block_q = &vectors * vectors.adjoint();
        q.view_mut((range.start, range.start), (size, size)).copy_from(&block_q);
        gaps.push(gap);
        block_vectors.push(vectors);
    }
    Ok(ProjectorBundle {
        operator: FockOperator::new(modes, q, Some(0))?,
        method: ProjectorMethodKind::Nullspace,
        gaps,
        block_vectors,
    })
}

fn columns_or_empty(cols: Vec<nalgebra::DVector<Complex64>>, size: usize) -> CMatrix {
    if cols.is_empty() {
        CMatrix::zeros(size, 0)
    } else {
        CMatrix::from_columns(&cols)
    }
}

fn group_average_projector(model: &GaugeModel, quad: &HaarQuadrature) -> Result<ProjectorBundle> {
    quad.check_group(model)?;
    let modes = model.modes().clone();
    let dim = modes.dim();
    let mut q = CMatrix::zeros(dim, dim);
    for node in quad.nodes() {
        let g = model.lift_rotation(&node.rotation);
        let t = induced_rotation(&modes, &g)?;
        q += t.matrix() * Complex64::new(node.weight, 0.0);
    }
    Ok(ProjectorBundle {
        operator: FockOperator::new(modes, q, Some(0))?,
        method: ProjectorMethodKind::GroupAverage,
        gaps: Vec::new(),
        block_vectors: Vec::new(),
    })
}

fn closed_form_basis_projector(model: &GaugeModel) -> Result<ProjectorBundle> {
    if !matches!(model.layout(), ModeLayout::Vector { .. }) {
        return Err(Error::Unsupported(
            "closed-form basis projector is only available for the SO(N) vector model".into(),
        ));
    }
    let basis = physical_basis_son_on(model.modes())?;
    Ok(ProjectorBundle {
        operator: basis.projector(),
        method: ProjectorMethodKind::ClosedFormBasis,
        gaps: Vec::new(),
        block_vectors: Vec::new(),
    })
}

/// Builds the projector onto the gauge-invariant subspace.
pub fn projector_matrix(model: &GaugeModel, method: &ProjectorMethod) -> Result<ProjectorBundle> {
    match method {
        ProjectorMethod::Nullspace => nullspace_projector(model),
        ProjectorMethod::GroupAverage(quad) => group_average_projector(model, quad),
        ProjectorMethod::ClosedFormBasis => closed_form_basis_projector(model),
    }
}

/// `Qψ`.
pub fn apply_projector(q: &ProjectorBundle, psi: &FockVector) -> Result<FockVector> {
    q.operator.apply(psi)
}

impl ProjectorBundle {
    pub fn modes(&self) -> &std::sync::Arc<crate::fock::ModeSet> {
        self.operator.modes()
    }

    /// Physical dimension per degree block (rounded block traces for the
    /// quadrature and basis methods).
    pub fn block_dimensions(&self) -> Vec<usize> {
        if !self.gaps.is_empty() {
            return self.gaps.iter().map(|g| g.null_dim).collect();
        }
        (0..=self.modes().cutoff())
            .map(|k| self.operator.block(k, k).trace().re.round().max(0.0) as usize)
            .collect()
    }

    pub fn physical_dimension(&self) -> usize {
        self.block_dimensions().iter().sum()
    }

    /// Orthonormal basis of the image of `Q` restricted to degrees
    /// `≤ max_degree`, as matrix columns in the full space.
    pub fn image_basis(&self, max_degree: usize) -> CMatrix {
        let modes = self.modes();
        let top = max_degree.min(modes.cutoff());
        let mut cols = Vec::new();
        for k in 0..=top {
            let range = modes.block(k);
            let vectors = if let Some(v) = self.block_vectors.get(k) {
                v.clone()
            } else {
                let block = self.operator.block(k, k);
                let eig = block.symmetric_eigen();
                let picked: Vec<_> = (0..eig.eigenvalues.len())
                    .filter(|&i| eig.eigenvalues[i] > 0.5)
                    .map(|i| eig.eigenvectors.column(i).into_owned())
                    .collect();
                columns_or_empty(picked, range.len())
            };
            for c in 0..vectors.ncols() {
                let mut full = nalgebra::DVector::<Complex64>::zeros(modes.dim());
                full.rows_mut(range.start, range.len()).copy_from(&vectors.column(c));
                cols.push(full);
            }
        }
        columns_or_empty(cols, modes.dim())
    }

    /// Projector laws, evaluated block by block.
    pub fn laws(&self, constraints: &[FockOperator]) -> ProjectorLaws {
        let modes = self.modes();
        let mut laws = ProjectorLaws {
            idempotency: 0.0,
            hermiticity: 0.0,
            annihilation_left: 0.0,
            annihilation_right: 0.0,
            off_block: self.operator.off_band_magnitude(0),
        };
        for k in 0..=modes.cutoff() {
            let q = self.operator.block(k, k);
            laws.idempotency = laws.idempotency.max(max_abs(&(&q * &q - &q)));
            laws.hermiticity = laws.hermiticity.max(max_abs(&(q.adjoint() - &q)));
            for g in constraints {
                let gb = g.block(k, k);
                laws.annihilation_left = laws.annihilation_left.max(max_abs(&(&gb * &q)));
                laws.annihilation_right = laws.annihilation_right.max(max_abs(&(&q * &gb)));
            }
        }
        laws
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{LadderPoly, ModeSet};
    use crate::models::{so_n_vector_model, su2_ym_model, PotentialSpec};
    use std::sync::Arc;

    fn vector_model(n: usize, cutoff: usize) -> GaugeModel {
        so_n_vector_model(n, cutoff, PotentialSpec::Harmonic).unwrap()
    }

    #[test]
    fn so2_block_dimensions() {
        let q = projector_matrix(&vector_model(2, 4), &ProjectorMethod::Nullspace).unwrap();
        assert_eq!(q.block_dimensions(), vec![1, 0, 1, 0, 1]);
    }

    #[test]
    fn so3_total_physical_dimension() {
        let q = projector_matrix(&vector_model(3, 4), &ProjectorMethod::Nullspace).unwrap();
        assert_eq!(q.physical_dimension(), 3);
    }

    #[test]
    fn ym_degree_two_has_six_invariants() {
        let model = su2_ym_model(2, 1.0).unwrap();
        let q = projector_matrix(&model, &ProjectorMethod::Nullspace).unwrap();
        assert_eq!(q.block_dimensions(), vec![1, 0, 6]);
    }

    #[test]
    fn three_methods_agree_for_so3() {
        let model = vector_model(3, 4);
        let null = projector_matrix(&model, &ProjectorMethod::Nullspace).unwrap();
        let quad = HaarQuadrature::exact_for_model(&model).unwrap();
        let avg = projector_matrix(&model, &ProjectorMethod::GroupAverage(quad)).unwrap();
        let basis = projector_matrix(&model, &ProjectorMethod::ClosedFormBasis).unwrap();
        assert!(null.operator.max_diff(&avg.operator).unwrap() < 1e-12);
        assert!(null.operator.max_diff(&basis.operator).unwrap() < 1e-12);
        let constraints = constraint_operators(&model);
        for q in [&null, &avg, &basis] {
            assert!(q.laws(&constraints).worst() < 1e-12);
        }
    }

    #[test]
    fn apply_projector_examples() {
        let model = vector_model(2, 4);
        let q = projector_matrix(&model, &ProjectorMethod::Nullspace).unwrap();
        let modes: Arc<ModeSet> = model.modes().clone();
        let vac = FockVector::vacuum(modes.clone());
        let out = apply_projector(&q, &vac).unwrap();
        assert!((out.coeffs() - vac.coeffs()).camax() < 1e-14);

        let single = FockVector::basis_state(modes.clone(), modes.index_of_occupations(&[1, 0]).unwrap());
        assert!(apply_projector(&q, &single).unwrap().norm() < 1e-14);

        let pair = (0..2).fold(LadderPoly::zero(), |acc, j| {
            acc.add(&LadderPoly::create(j).mul(&LadderPoly::create(j)))
        });
        let invariant = pair.compress(&modes).apply(&vac).unwrap();
        let out = apply_projector(&q, &invariant).unwrap();
        assert!((out.coeffs() - invariant.coeffs()).camax() < 1e-12);
    }

    #[test]
    fn closed_form_basis_rejects_matrix_layout() {
        let model = su2_ym_model(2, 1.0).unwrap();
        assert!(matches!(
            projector_matrix(&model, &ProjectorMethod::ClosedFormBasis),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn image_basis_spans_physical_states() {
        let model = vector_model(3, 4);
        let q = projector_matrix(&model, &ProjectorMethod::Nullspace).unwrap();
        let b = q.image_basis(4);
        assert_eq!(b.ncols(), 3);
        let b2 = q.image_basis(2);
        assert_eq!(b2.ncols(), 2);
        let gram = b.adjoint() * &b;
        assert!(max_abs(&(gram - CMatrix::identity(3, 3))) < 1e-12);
    }
}
