//! Pointwise evaluation of the projector kernel `Q(a*, a)`.

use num_complex::Complex64;
use serde::Serialize;

use super::haar::HaarQuadrature;
use crate::error::{Error, Result};
use crate::fock::CoherentPoint;
use crate::models::{GaugeModel, ModeLayout};

/// Absolute tolerance and term cap for the kernel power series.
#[derive(Debug, Clone, Copy)]
pub struct SeriesControl {
    pub tolerance: f64,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            tolerance: 1e-17,
            max_terms: 10_000,
        }
    }
}

/// Sums `Σ_k t_k` where `t_0 = first` and `t_k = t_{k−1}·ratio(k)`, stopping
/// once the terms are past their peak and below `tol·max(1, |sum|)`.
fn sum_series(first: Complex64, ratio: impl Fn(usize) -> Complex64, control: SeriesControl) -> Result<Complex64> {
    let mut term = first;
    let mut sum = first;
    for k in 1..control.max_terms {
        let r = ratio(k);
        term *= r;
        sum += term;
        if r.norm() < 1.0 && term.norm() <= control.tolerance * sum.norm().max(1.0) {
            return Ok(sum);
        }
        if term == Complex64::new(0.0, 0.0) {
            return Ok(sum);
        }
    }
    Err(Error::SeriesNotConverged {
        terms: control.max_terms,
        last_term: term.norm(),
    })
}

/// `c_n^{-2} = 4^n n! Γ(n + N/2)/Γ(N/2)` for the SO(N) physical basis.
pub fn son_normalization_inverse_square(n: usize, num_modes: usize) -> f64 {
    let half = num_modes as f64 / 2.0;
    (0..n).fold(1.0, |acc, k| acc * 4.0 * (k + 1) as f64 * (k as f64 + half))
}

/// Closed-form SO(N) projector kernel, summed as the single-valued series
/// `Σ_n c_n² (uv)^n` with `u = a*·a*`, `v = a·a`.
pub fn kernel_closed_form_son(astar: &CoherentPoint, a: &CoherentPoint, num_modes: usize) -> Result<Complex64> {
    kernel_closed_form_son_with(astar, a, num_modes, SeriesControl::default())
}

pub fn kernel_closed_form_son_with(
    astar: &CoherentPoint,
    a: &CoherentPoint,
    num_modes: usize,
    control: SeriesControl,
) -> Result<Complex64> {
    for p in [astar, a] {
        if p.len() != num_modes {
            return Err(Error::DimensionMismatch {
                expected: num_modes,
                found: p.len(),
            });
        }
    }
    let w = astar.dot(astar) * a.dot(a);
    let half = num_modes as f64 / 2.0;
    sum_series(
        Complex64::new(1.0, 0.0),
        |k| w / (4.0 * k as f64 * (k as f64 - 1.0 + half)),
        control,
    )
}

/// The series truncated after `(uv)^{⌊max_degree/2⌋}`, which is the exact
/// kernel of the projector on the space truncated at `max_degree`.
pub fn kernel_closed_form_son_partial(
    astar: &CoherentPoint,
    a: &CoherentPoint,
    num_modes: usize,
    max_degree: usize,
) -> Result<Complex64> {
    for p in [astar, a] {
        if p.len() != num_modes {
            return Err(Error::DimensionMismatch {
                expected: num_modes,
                found: p.len(),
            });
        }
    }
    let w = astar.dot(astar) * a.dot(a);
    let half = num_modes as f64 / 2.0;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..=max_degree / 2 {
        term *= w / (4.0 * k as f64 * (k as f64 - 1.0 + half));
        sum += term;
    }
    Ok(sum)
}

/// Upper bound on `|full − partial|` over `|uv| ≤ bound`; all terms are
/// positive at real `uv = bound`, where the tail is largest.
pub fn son_truncation_tail(num_modes: usize, max_degree: usize, bound: f64) -> Result<f64> {
    let mut v = vec![Complex64::new(0.0, 0.0); num_modes];
    v[0] = Complex64::new(bound.powf(0.25), 0.0);
    let z = CoherentPoint::new(v);
    let full = kernel_closed_form_son(&z, &z, num_modes)?;
    let partial = kernel_closed_form_son_partial(&z, &z, num_modes, max_degree)?;
    Ok((full - partial).re.abs())
}

/// The product-Bessel Yang–Mills kernel evaluated term by term, with each
/// factor reported separately.
#[derive(Debug, Clone, Serialize)]
pub struct YmClosedForm {
    pub value: Complex64,
    /// `ξ_ii^{-1/2} I_{1/2}(ξ_ii)` for `i = 1, 2, 3`.
    pub diagonal_factors: [Complex64; 3],
    /// `ξ_ij^{-2} I_2(2ξ_ij)` for `(i, j) = (1,2), (1,3), (2,3)`.
    pub offdiagonal_factors: [Complex64; 3],
    /// Value of the formula at `a* = a = 0`.
    pub normalization_at_origin: f64,
}

pub const YM_PREFACTOR: f64 = 5.568_327_996_831_708; // π^{3/2}
pub(crate) const OFFDIAGONAL_PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// `Γ(k + 3/2)` by upward recurrence from `Γ(3/2) = √π/2`.
fn gamma_k_three_halves(k: usize) -> f64 {
    (0..k).fold(std::f64::consts::PI.sqrt() / 2.0, |acc, j| acc * (j as f64 + 1.5))
}

/// Series coefficients of `ξ^{-1/2} I_{1/2}(ξ)` in powers of `ξ²`.
pub fn ym_diagonal_coefficient(k: usize) -> f64 {
    let factorial = (1..=k).fold(1.0, |acc, j| acc * j as f64);
    std::f64::consts::FRAC_1_SQRT_2 / (4f64.powi(k as i32) * factorial * gamma_k_three_halves(k))
}

/// Series coefficients of `ξ^{-2} I_2(2ξ)` in powers of `ξ²`.
pub fn ym_offdiagonal_coefficient(k: usize) -> f64 {
    let fk = (1..=k).fold(1.0, |acc, j| acc * j as f64);
    let fk2 = fk * (k + 1) as f64 * (k + 2) as f64;
    1.0 / (fk * fk2)
}

/// Gram entries `(zᵀz)_{ij} = Σ_a z_{ai} z_{aj}` for a 9-mode point.
pub(crate) fn ym_gram(z: &CoherentPoint) -> [[Complex64; 3]; 3] {
    let layout = ModeLayout::Matrix { rows: 3, cols: 3 };
    let mut g = [[Complex64::new(0.0, 0.0); 3]; 3];
    for (i, row) in g.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = (0..3)
                .map(|a| z.values()[layout.mode(a, i)] * z.values()[layout.mode(a, j)])
                .sum();
        }
    }
    g
}

/// `ξ_ij² = (a*ᵀa*)_ij (aᵀa)_ij`.
pub(crate) fn ym_xi_squared(astar: &CoherentPoint, a: &CoherentPoint) -> [[Complex64; 3]; 3] {
    let left = ym_gram(astar);
    let right = ym_gram(a);
    let mut out = [[Complex64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = left[i][j] * right[i][j];
        }
    }
    out
}

/// The Yang–Mills product-Bessel kernel with its constants taken as written,
/// each factor summed as an even power series in `ξ_ij`.
pub fn kernel_su2_ym_closed_form(astar: &CoherentPoint, a: &CoherentPoint) -> Result<YmClosedForm> {
    for p in [astar, a] {
        if p.len() != 9 {
            return Err(Error::DimensionMismatch {
                expected: 9,
                found: p.len(),
            });
        }
    }
    let control = SeriesControl::default();
    let xi2 = ym_xi_squared(astar, a);
    let mut diagonal_factors = [Complex64::new(0.0, 0.0); 3];
    for (i, f) in diagonal_factors.iter_mut().enumerate() {
        let s = xi2[i][i];
        *f = sum_series(
            Complex64::new(ym_diagonal_coefficient(0), 0.0),
            |k| s / (4.0 * k as f64 * (k as f64 + 0.5)),
            control,
        )?;
    }
    let mut offdiagonal_factors = [Complex64::new(0.0, 0.0); 3];
    for (f, &(i, j)) in offdiagonal_factors.iter_mut().zip(&OFFDIAGONAL_PAIRS) {
        let s = xi2[i][j];
        *f = sum_series(
            Complex64::new(ym_offdiagonal_coefficient(0), 0.0),
            |k| s / (k as f64 * (k + 2) as f64),
            control,
        )?;
    }
    let value = diagonal_factors
        .iter()
        .chain(&offdiagonal_factors)
        .fold(Complex64::new(YM_PREFACTOR, 0.0), |acc, f| acc * f);
    let normalization_at_origin =
        YM_PREFACTOR * ym_diagonal_coefficient(0).powi(3) * ym_offdiagonal_coefficient(0).powi(3);
    Ok(YmClosedForm {
        value,
        diagonal_factors,
        offdiagonal_factors,
        normalization_at_origin,
    })
}

/// Quadrature estimate of the group-averaged kernel.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GroupAverage {
    pub value: Complex64,
    /// Standard error of the mean, for Monte Carlo rules only.
    pub std_error: Option<f64>,
}

/// `Q(a*, a) = ∫ dμ(g) exp(Σ_i ⟨a*_i, T_g a_i⟩)` on the rule's nodes.
pub fn kernel_group_average(
    astar: &CoherentPoint,
    a: &CoherentPoint,
    model: &GaugeModel,
    quad: &HaarQuadrature,
) -> Result<GroupAverage> {
    quad.check_group(model)?;
    let n = model.modes().num_modes();
    for p in [astar, a] {
        if p.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.len(),
            });
        }
    }
    let samples: Vec<(f64, Complex64)> = quad
        .nodes()
        .iter()
        .map(|node| {
            let g = model.lift_rotation(&node.rotation);
            (node.weight, astar.dot(&a.rotated(&g)).exp())
        })
        .collect();
    let value: Complex64 = samples.iter().map(|(w, f)| f * *w).sum();
    let std_error = quad.is_monte_carlo().then(|| {
        let m = samples.len() as f64;
        if samples.len() < 2 {
            return f64::INFINITY;
        }
        let var: f64 = samples.iter().map(|(_, f)| (f - value).norm_sqr()).sum::<f64>() / (m - 1.0);
        (var / m).sqrt()
    });
    Ok(GroupAverage { value, std_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{so_n_vector_model, PotentialSpec};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn normalization_values() {
        assert_eq!(son_normalization_inverse_square(0, 5), 1.0);
        assert!((son_normalization_inverse_square(1, 3) - 6.0).abs() < 1e-14);
        assert!((son_normalization_inverse_square(2, 2) - 64.0).abs() < 1e-14);
    }

    #[test]
    fn partial_sum_matches_truncated_projector() {
        use crate::fock::kernel_eval;
        use crate::projector::{projector_matrix, ProjectorMethod};
        let model = so_n_vector_model(3, 6, PotentialSpec::Harmonic).unwrap();
        let q = projector_matrix(&model, &ProjectorMethod::Nullspace).unwrap();
        let astar = CoherentPoint::new(vec![c(0.7, 0.2), c(-0.3, 0.5), c(0.1, -0.6)]);
        let a = CoherentPoint::new(vec![c(0.4, -0.1), c(0.2, 0.3), c(-0.5, 0.2)]);
        let partial = kernel_closed_form_son_partial(&astar, &a, 3, 6).unwrap();
        let direct = kernel_eval(&q.operator, &astar, &a).unwrap();
        assert!((partial - direct).norm() < 1e-13);
        let full = kernel_closed_form_son(&astar, &a, 3).unwrap();
        let w = (astar.dot(&astar) * a.dot(&a)).norm();
        assert!((full - partial).norm() <= son_truncation_tail(3, 6, w).unwrap() * (1.0 + 1e-9));
    }

    #[test]
    fn closed_form_at_zero_uv_is_one() {
        let astar = CoherentPoint::new(vec![c(1.0, 0.0), c(0.0, 1.0)]); // u = 0
        let a = CoherentPoint::new(vec![c(0.3, 0.2), c(-0.1, 0.5)]);
        assert_eq!(kernel_closed_form_son(&astar, &a, 2).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn so2_closed_form_is_i0_series() {
        let astar = CoherentPoint::new(vec![c(0.7, -0.4), c(0.2, 0.9)]);
        let a = CoherentPoint::new(vec![c(-0.3, 0.5), c(1.1, 0.1)]);
        let got = kernel_closed_form_son(&astar, &a, 2).unwrap();
        // I_0(2ξ) = Σ ξ^{2k}/(k!)², ξ² = uv/4 with an explicit principal sqrt
        let xi = (astar.dot(&astar) * a.dot(&a)).sqrt() / 2.0;
        let mut sum = c(0.0, 0.0);
        let mut fact = 1.0;
        for k in 0..60 {
            if k > 0 {
                fact *= k as f64;
            }
            sum += xi.powu(2 * k as u32) / (fact * fact);
        }
        assert!((got - sum).norm() < 1e-14 * sum.norm().max(1.0));
    }

    #[test]
    fn series_cap_is_reported() {
        let big = CoherentPoint::new(vec![c(1e5, 0.0), c(0.0, 0.0)]);
        let control = SeriesControl {
            tolerance: 1e-17,
            max_terms: 100,
        };
        assert!(matches!(
            kernel_closed_form_son_with(&big, &big, 2, control),
            Err(Error::SeriesNotConverged { .. })
        ));
    }

    #[test]
    fn group_average_trivial_at_origin() {
        let model = so_n_vector_model(2, 2, PotentialSpec::Harmonic).unwrap();
        for pts in [1, 3, 8] {
            let q = HaarQuadrature::so2_trapezoid(pts).unwrap();
            let z = CoherentPoint::zeros(2);
            assert_eq!(kernel_group_average(&z, &z, &model, &q).unwrap().value, c(1.0, 0.0));
        }
    }

    #[test]
    fn so2_group_average_matches_closed_form() {
        let model = so_n_vector_model(2, 2, PotentialSpec::Harmonic).unwrap();
        let q = HaarQuadrature::so2_trapezoid(40).unwrap();
        let astar = CoherentPoint::new(vec![c(0.6, -0.2), c(0.1, 0.8)]);
        let a = CoherentPoint::new(vec![c(-0.4, 0.3), c(0.7, 0.2)]);
        let avg = kernel_group_average(&astar, &a, &model, &q).unwrap();
        let closed = kernel_closed_form_son(&astar, &a, 2).unwrap();
        assert!((avg.value - closed).norm() < 1e-13);
        assert!(avg.std_error.is_none());
    }

    #[test]
    fn group_mismatch_rejected() {
        let model = so_n_vector_model(3, 2, PotentialSpec::Harmonic).unwrap();
        let q = HaarQuadrature::so2_trapezoid(4).unwrap();
        let z = CoherentPoint::zeros(3);
        assert!(matches!(
            kernel_group_average(&z, &z, &model, &q),
            Err(Error::GroupMismatch { .. })
        ));
    }

    #[test]
    fn ym_factor_series_match_elementary_closed_forms() {
        // ξ^{-1/2} I_{1/2}(ξ) = √(2/π) sinh ξ / ξ
        let s = c(0.8, -0.6);
        let xi = s.sqrt();
        let expected = (2.0 / std::f64::consts::PI).sqrt() * xi.sinh() / xi;
        let series: Complex64 = (0..40).map(|k| s.powu(k as u32) * ym_diagonal_coefficient(k)).sum();
        assert!((series - expected).norm() < 1e-14);
        assert!((YM_PREFACTOR - std::f64::consts::PI.powf(1.5)).abs() < 1e-14);
    }

    #[test]
    fn ym_closed_form_origin_value() {
        let z = CoherentPoint::zeros(9);
        let q = kernel_su2_ym_closed_form(&z, &z).unwrap();
        // π^{3/2}·(√(2/π))³·(1/2)³ = 2^{3/2}/8
        let expected = 2f64.powf(1.5) / 8.0;
        assert!((q.value.re - expected).abs() < 1e-14);
        assert!((q.normalization_at_origin - expected).abs() < 1e-14);
    }
}
