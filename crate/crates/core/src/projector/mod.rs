//! The projector `Q` onto gauge-invariant states: closed-form kernels,
//! Haar group averaging, and the exact constraint null space.

mod audit;
mod basis;
mod haar;
mod kernels;
mod matrix;

pub use audit::{ym_closed_form_audit, YmAudit, YmAuditPoint, YmDegreeComparison};
pub use basis::{physical_basis_son, physical_basis_son_on, PhysicalBasis};
pub use haar::{euler_rotation, random_rotation, rotation_2d, HaarNode, HaarQuadrature, HaarRule};
pub use kernels::{
    kernel_closed_form_son, kernel_closed_form_son_partial, kernel_closed_form_son_with, kernel_group_average, kernel_su2_ym_closed_form,
    son_normalization_inverse_square, son_truncation_tail, ym_diagonal_coefficient, ym_offdiagonal_coefficient, GroupAverage,
    SeriesControl, YmClosedForm, YM_PREFACTOR,
};
pub use matrix::{
    apply_projector, projector_matrix, BlockSpectrumGap, ProjectorBundle, ProjectorLaws, ProjectorMethod,
    ProjectorMethodKind, AMBIGUITY_FACTOR, NULLSPACE_RELATIVE_THRESHOLD,
};
