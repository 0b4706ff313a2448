//! Comparison of the product-Bessel Yang–Mills kernel against the
//! group-averaged projector.
//!
//! The closed form is treated as a hypothesis: its value, its factors and
//! its homogeneous parts are tabulated next to the group average and the
//! truncated null-space projector, and the discrepancy is reported rather
//! than asserted away.

use num_complex::Complex64;
use serde::Serialize;

use super::haar::HaarQuadrature;
use super::kernels::{
    kernel_group_average, kernel_su2_ym_closed_form, ym_diagonal_coefficient, ym_offdiagonal_coefficient,
    ym_xi_squared, YmClosedForm, OFFDIAGONAL_PAIRS, YM_PREFACTOR,
};
use super::matrix::ProjectorBundle;
use crate::error::{Error, Result};
use crate::fock::{basis_functions, CoherentPoint};
use crate::models::{GaugeModel, ModeLayout};

#[derive(Debug, Clone, Serialize)]
pub struct YmAuditPoint {
    pub closed_form: YmClosedForm,
    pub group_average: Complex64,
    pub abs_diff: f64,
    pub rel_diff: f64,
    /// Relative difference after dividing the closed form by its value at
    /// the origin.
    pub normalized_rel_diff: f64,
}

/// Homogeneous part of degree `d` (in `a*`) of both kernels, worst case
/// over the audit points.
#[derive(Debug, Clone, Serialize)]
pub struct YmDegreeComparison {
    pub degree: usize,
    pub physical_dim: usize,
    pub max_abs_diff: f64,
    pub max_rel_diff: f64,
    pub max_normalized_abs_diff: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct YmAudit {
    pub origin_closed_form: f64,
    pub origin_group_average: f64,
    pub points: Vec<YmAuditPoint>,
    pub degrees: Vec<YmDegreeComparison>,
    pub max_rel_diff: f64,
    pub max_normalized_rel_diff: f64,
    /// Whether the closed form matches the group average at every point to
    /// `agreement_tolerance`.
    pub agrees: bool,
    pub agreement_tolerance: f64,
}

/// Homogeneous parts of the closed form up to `max_degree`.
fn closed_form_by_degree(astar: &CoherentPoint, a: &CoherentPoint, max_degree: usize) -> Vec<Complex64> {
    let xi2 = ym_xi_squared(astar, a);
    let max_power = max_degree / 2;
    // polynomial in t with t^k ↔ a*-degree 2k
    let mut poly = vec![Complex64::new(0.0, 0.0); max_power + 1];
    poly[0] = Complex64::new(YM_PREFACTOR, 0.0);
    let mut factors: Vec<Vec<Complex64>> = Vec::new();
    for i in 0..3 {
        factors.push(
            (0..=max_power)
                .map(|k| xi2[i][i].powu(k as u32) * ym_diagonal_coefficient(k))
                .collect(),
        );
    }
    for &(i, j) in &OFFDIAGONAL_PAIRS {
        factors.push(
            (0..=max_power)
                .map(|k| xi2[i][j].powu(k as u32) * ym_offdiagonal_coefficient(k))
                .collect(),
        );
    }
    for f in factors {
        let mut next = vec![Complex64::new(0.0, 0.0); max_power + 1];
        for (p, &x) in poly.iter().enumerate() {
            for (q, &y) in f.iter().enumerate() {
                if p + q <= max_power {
                    next[p + q] += x * y;
                }
            }
        }
        poly = next;
    }
    (0..=max_degree)
        .map(|d| if d % 2 == 0 { poly[d / 2] } else { Complex64::new(0.0, 0.0) })
        .collect()
}

/// Homogeneous parts of the truncated projector kernel.
fn projector_by_degree(q: &ProjectorBundle, astar: &CoherentPoint, a: &CoherentPoint) -> Result<Vec<Complex64>> {
    let modes = q.modes();
    let left = basis_functions(modes, astar)?;
    let right = basis_functions(modes, a)?;
    Ok((0..=modes.cutoff())
        .map(|d| {
            let range = modes.block(d);
            let block = q.operator.block(d, d);
            let l = left.rows(range.start, range.len());
            let r = right.rows(range.start, range.len());
            let br = &block * r;
            l.iter().zip(br.iter()).map(|(x, y)| x * y).sum()
        })
        .collect())
}

/// Runs the comparison at the origin and at every supplied point.
pub fn ym_closed_form_audit(
    model: &GaugeModel,
    projector: &ProjectorBundle,
    quad: &HaarQuadrature,
    points: &[(CoherentPoint, CoherentPoint)],
    agreement_tolerance: f64,
) -> Result<YmAudit> {
    if model.layout() != (ModeLayout::Matrix { rows: 3, cols: 3 }) {
        return Err(Error::Unsupported("the Yang–Mills audit needs the 3×3 matrix layout".into()));
    }
    let zero = CoherentPoint::zeros(9);
    let origin_closed = kernel_su2_ym_closed_form(&zero, &zero)?;
    let origin_avg = kernel_group_average(&zero, &zero, model, quad)?.value;
    let norm = origin_closed.normalization_at_origin;

    let cutoff = model.cutoff();
    let dims = projector.block_dimensions();
    let mut degrees: Vec<YmDegreeComparison> = (0..=cutoff)
        .map(|d| YmDegreeComparison {
            degree: d,
            physical_dim: dims[d],
            max_abs_diff: 0.0,
            max_rel_diff: 0.0,
            max_normalized_abs_diff: 0.0,
        })
        .collect();

    let mut audit_points = Vec::with_capacity(points.len());
    for (astar, a) in points {
        let closed = kernel_su2_ym_closed_form(astar, a)?;
        let avg = kernel_group_average(astar, a, model, quad)?.value;
        let abs_diff = (closed.value - avg).norm();
        let rel_diff = abs_diff / avg.norm().max(f64::MIN_POSITIVE);
        let normalized_rel_diff = (closed.value / norm - avg).norm() / avg.norm().max(f64::MIN_POSITIVE);

        let cf_parts = closed_form_by_degree(astar, a, cutoff);
        let q_parts = projector_by_degree(projector, astar, a)?;
        for (entry, (cf, qp)) in degrees.iter_mut().zip(cf_parts.iter().zip(&q_parts)) {
            let diff = (cf - qp).norm();
            entry.max_abs_diff = entry.max_abs_diff.max(diff);
            entry.max_rel_diff = entry.max_rel_diff.max(diff / qp.norm().max(cf.norm()).max(f64::MIN_POSITIVE));
            entry.max_normalized_abs_diff = entry.max_normalized_abs_diff.max((cf / norm - qp).norm());
        }

        audit_points.push(YmAuditPoint {
            closed_form: closed,
            group_average: avg,
            abs_diff,
            rel_diff,
            normalized_rel_diff,
        });
    }

    let max_rel_diff = audit_points.iter().map(|p| p.rel_diff).fold(0.0, f64::max);
    let max_normalized_rel_diff = audit_points
        .iter()
        .map(|p| p.normalized_rel_diff)
        .fold(0.0, f64::max);
    let origin_diff = (origin_closed.value.re - origin_avg.re).abs();
    Ok(YmAudit {
        origin_closed_form: origin_closed.value.re,
        origin_group_average: origin_avg.re,
        agrees: origin_diff <= agreement_tolerance && max_rel_diff <= agreement_tolerance,
        points: audit_points,
        degrees,
        max_rel_diff,
        max_normalized_rel_diff,
        agreement_tolerance,
    })
}
