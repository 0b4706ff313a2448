//! Gauge-invariant time evolution in the truncated Fock space.
//!
//! Everything here works on coefficient matrices in the orthonormal number
//! basis, so composing kernels is a matrix product and no phase-space
//! quadrature is involved.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{kernel_eval, matmul, max_abs, CMatrix, CoherentPoint, FockOperator};
use crate::models::Hamiltonian;
use crate::projector::ProjectorBundle;

/// Entrywise tolerance for `H† = H`, relative to `max(1, ‖H‖_max)`.
pub const HERMITICITY_TOLERANCE: f64 = 1e-10;
/// Entrywise tolerance for `[H, Q] = 0`, relative to `max(1, ‖H‖_max)`.
pub const COMMUTATOR_TOLERANCE: f64 = 1e-10;
/// Eigenvalues closer than this are merged into one level.
pub const DEGENERACY_TOLERANCE: f64 = 1e-8;
/// `|Q(a*,a)|` below this multiple of `|exp(a*·a)|` counts as a kernel zero.
pub const KERNEL_ZERO_RELATIVE: f64 = 1e-12;
/// Norm² outside the certified band below which a level is certified.
pub const LEAKAGE_TOLERANCE: f64 = 1e-10;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolutionMethod {
    SpectralFull,
    SpectralProjected,
    /// `(Q(1 − iεH)Q)^M`.
    Sliced,
    /// `(exp(−iεH)Q)^M`, a diagnostic free of integrator error.
    SlicedExact,
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub operator: FockOperator,
    pub time: f64,
    pub method: EvolutionMethod,
    pub slices: Option<usize>,
    /// Highest degree on which entries agree with the untruncated evolution.
    pub truncation_band: usize,
}

/// Uniform partition of `[0, t]` into `M` slices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SliceSchedule {
    total_time: f64,
    num_slices: usize,
}

impl SliceSchedule {
    pub fn new(total_time: f64, num_slices: usize) -> Result<Self> {
        if num_slices == 0 {
            return Err(Error::InvalidSchedule("number of slices must be positive".into()));
        }
        if !(total_time.is_finite() && total_time > 0.0) {
            return Err(Error::InvalidSchedule(format!(
                "total time must be positive and finite, got {total_time}"
            )));
        }
        Ok(Self {
            total_time,
            num_slices,
        })
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn num_slices(&self) -> usize {
        self.num_slices
    }

    pub fn epsilon(&self) -> f64 {
        self.total_time / self.num_slices as f64
    }
}

/// Ascending eigenvalues and orthonormal eigenvectors of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: DVector<f64>,
    pub vectors: CMatrix,
}

impl Eigensystem {
    /// Uses the real symmetric solver when the input has no imaginary part.
    pub fn hermitian(m: &CMatrix) -> Self {
        let n = m.nrows();
        let (values, vectors) = if m.iter().all(|z| z.im == 0.0) {
            let eig = DMatrix::<f64>::from_fn(n, n, |r, c| m[(r, c)].re).symmetric_eigen();
            (eig.eigenvalues, eig.eigenvectors.map(|x| Complex64::new(x, 0.0)))
        } else {
            let eig = m.clone().symmetric_eigen();
            (eig.eigenvalues, eig.eigenvectors)
        };
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        Self {
            values: DVector::from_iterator(n, order.iter().map(|&i| values[i])),
            vectors: CMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `Σ_k f(E_k) |v_k⟩⟨v_k|`.
    pub fn function(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (k, &e) in self.values.iter().enumerate() {
            let fe = f(e);
            for z in scaled.column_mut(k).iter_mut() {
                *z *= fe;
            }
        }
        matmul(&scaled, &self.vectors.adjoint())
    }

    /// `exp(−iHt)`.
    pub fn propagator(&self, t: f64) -> CMatrix {
        if t == 0.0 {
            let n = self.vectors.nrows();
            return CMatrix::identity(n, n);
        }
        self.function(|e| (-I * e * t).exp())
    }
}

fn scale_of(h: &FockOperator) -> f64 {
    h.max_norm().max(1.0)
}

fn check_hermitian(h: &Hamiltonian) -> Result<()> {
    let deviation = h.operator.hermiticity_defect();
    if deviation > HERMITICITY_TOLERANCE * scale_of(&h.operator) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

fn check_same_space(h: &Hamiltonian, q: &ProjectorBundle) -> Result<()> {
    if h.modes().same_as(q.modes()) {
        Ok(())
    } else {
        Err(Error::ModeSetMismatch)
    }
}

/// `‖[H, Q]‖_max`, failing when it exceeds the commutator tolerance.
pub fn check_commutes(h: &Hamiltonian, q: &ProjectorBundle) -> Result<f64> {
    check_same_space(h, q)?;
    let hm = h.operator.matrix();
    let qm = q.operator.matrix();
    let deviation = max_abs(&(matmul(hm, qm) - matmul(qm, hm)));
    if deviation > COMMUTATOR_TOLERANCE * scale_of(&h.operator) {
        return Err(Error::CommutatorViolation { deviation });
    }
    Ok(deviation)
}

/// Diagonalized Hamiltonian, reusable across many evolution times.
#[derive(Debug, Clone)]
pub struct Propagator {
    hamiltonian: Hamiltonian,
    eigen: Eigensystem,
}

impl Propagator {
    pub fn new(h: &Hamiltonian) -> Result<Self> {
        check_hermitian(h)?;
        Ok(Self {
            hamiltonian: h.clone(),
            eigen: Eigensystem::hermitian(h.operator.matrix()),
        })
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }

    pub fn eigensystem(&self) -> &Eigensystem {
        &self.eigen
    }

    pub fn matrix(&self, t: f64) -> CMatrix {
        self.eigen.propagator(t)
    }

    pub fn full(&self, t: f64) -> Result<EvolutionResult> {
        Ok(EvolutionResult {
            operator: FockOperator::new(self.hamiltonian.modes().clone(), self.matrix(t), None)?,
            time: t,
            method: EvolutionMethod::SpectralFull,
            slices: None,
            truncation_band: self.hamiltonian.certified_band(),
        })
    }

    /// `U_t Q`, after checking that `H` preserves the physical subspace.
    pub fn physical(&self, q: &ProjectorBundle, t: f64) -> Result<EvolutionResult> {
        check_commutes(&self.hamiltonian, q)?;
        let u = matmul(&self.matrix(t), q.operator.matrix());
        Ok(EvolutionResult {
            operator: FockOperator::new(self.hamiltonian.modes().clone(), u, None)?,
            time: t,
            method: EvolutionMethod::SpectralProjected,
            slices: None,
            truncation_band: self.hamiltonian.certified_band(),
        })
    }
}

/// `U_t = exp(−iHt)` by eigendecomposition.
pub fn evolve_full(h: &Hamiltonian, t: f64) -> Result<EvolutionResult> {
    Propagator::new(h)?.full(t)
}

/// `U^ph_t = U_t Q`.
pub fn evolve_physical(h: &Hamiltonian, q: &ProjectorBundle, t: f64) -> Result<EvolutionResult> {
    Propagator::new(h)?.physical(q, t)
}

/// A (possibly degenerate) energy level.
#[derive(Debug, Clone, Serialize)]
pub struct EnergyLevel {
    pub energy: f64,
    pub degeneracy: usize,
    /// Total norm² of the level's eigenvectors on degrees above the band.
    pub band_leakage: f64,
    pub certified: bool,
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    pub levels: Vec<EnergyLevel>,
    pub energies: Vec<f64>,
    /// Eigenvectors in the full truncated space, one column per energy.
    pub states: CMatrix,
    pub band: usize,
}

impl Spectrum {
    pub fn certified_levels(&self) -> impl Iterator<Item = &EnergyLevel> {
        self.levels.iter().filter(|l| l.certified)
    }

    pub fn ground_energy(&self) -> Option<f64> {
        self.energies.first().copied()
    }

    /// `Σ_E e^{−iEt} |ψ_E⟩⟨ψ_E|`.
    pub fn evolution(&self, t: f64) -> CMatrix {
        let mut scaled = self.states.clone();
        for (k, &e) in self.energies.iter().enumerate() {
            let phase = (-I * e * t).exp();
            for z in scaled.column_mut(k).iter_mut() {
                *z *= phase;
            }
        }
        matmul(&scaled, &self.states.adjoint())
    }
}

fn build_spectrum(values: &[f64], states: CMatrix, h: &Hamiltonian) -> Spectrum {
    let modes = h.modes();
    let band = h.certified_band();
    let band_end = modes.block(band.min(modes.cutoff())).end;
    let leakage: Vec<f64> = (0..states.ncols())
        .map(|c| states.column(c).rows_range(band_end..).norm_squared())
        .collect();
    let mut levels: Vec<EnergyLevel> = Vec::new();
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && values[end] - values[start] <= DEGENERACY_TOLERANCE {
            end += 1;
        }
        let group = &values[start..end];
        let band_leakage: f64 = leakage[start..end].iter().sum();
        levels.push(EnergyLevel {
            energy: group.iter().sum::<f64>() / group.len() as f64,
            degeneracy: group.len(),
            band_leakage,
            certified: band_leakage <= LEAKAGE_TOLERANCE,
        });
        start = end;
    }
    Spectrum {
        levels,
        energies: values.to_vec(),
        states,
        band,
    }
}

/// Spectrum of `H` restricted to the image of `Q`.
pub fn physical_spectrum(h: &Hamiltonian, q: &ProjectorBundle) -> Result<Spectrum> {
    check_same_space(h, q)?;
    let basis = q.image_basis(q.modes().cutoff());
    let reduced = sandwich(&basis, h.operator.matrix());
    let reduced = (&reduced + reduced.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = Eigensystem::hermitian(&reduced);
    let states = matmul(&basis, &eig.vectors);
    Ok(build_spectrum(eig.values.as_slice(), states, h))
}

/// Spectrum of `H` on the whole truncated space.
pub fn full_spectrum(h: &Hamiltonian) -> Result<Spectrum> {
    check_hermitian(h)?;
    let eig = Eigensystem::hermitian(h.operator.matrix());
    Ok(build_spectrum(eig.values.as_slice(), eig.vectors, h))
}

/// Kernel ratio `(HQ)(a*,a) / Q(a*,a)` with `HQ` and `QHQ` precomputed.
#[derive(Debug, Clone)]
pub struct EffectiveHamiltonian {
    hq: FockOperator,
    qhq: FockOperator,
    q: FockOperator,
}

impl EffectiveHamiltonian {
    pub fn new(h: &Hamiltonian, q: &ProjectorBundle) -> Result<Self> {
        let hq = h.operator.compose(&q.operator)?;
        Ok(Self {
            qhq: q.operator.compose(&hq)?,
            hq,
            q: q.operator.clone(),
        })
    }

    pub fn projector_kernel(&self, astar: &CoherentPoint, a: &CoherentPoint) -> Result<Complex64> {
        kernel_eval(&self.q, astar, a)
    }

    pub fn eval(&self, astar: &CoherentPoint, a: &CoherentPoint) -> Result<Complex64> {
        let den = kernel_eval(&self.q, astar, a)?;
        let threshold = KERNEL_ZERO_RELATIVE * astar.dot(a).exp().norm();
        if den.norm() < threshold {
            return Err(Error::KernelZero {
                value: den.norm(),
                threshold,
            });
        }
        Ok(kernel_eval(&self.hq, astar, a)? / den)
    }

    /// `K_ε(a*,a) = Q(a*,a) − iε (QHQ)(a*,a)`.
    pub fn short_time_kernel_eval(&self, eps: f64, astar: &CoherentPoint, a: &CoherentPoint) -> Result<Complex64> {
        check_epsilon(eps)?;
        Ok(kernel_eval(&self.q, astar, a)? - I * eps * kernel_eval(&self.qhq, astar, a)?)
    }

    /// Single-slice kernel identity at one point: returns
    /// `(K_ε(a*,a), Q(a*,a) exp(−iε H_ef(a*,a)))`.
    pub fn single_slice(&self, eps: f64, astar: &CoherentPoint, a: &CoherentPoint) -> Result<(Complex64, Complex64)> {
        let lhs = self.short_time_kernel_eval(eps, astar, a)?;
        let rhs = self.projector_kernel(astar, a)? * (-I * eps * self.eval(astar, a)?).exp();
        Ok((lhs, rhs))
    }
}

pub fn h_ef_eval(
    h: &Hamiltonian,
    q: &ProjectorBundle,
    astar: &CoherentPoint,
    a: &CoherentPoint,
) -> Result<Complex64> {
    EffectiveHamiltonian::new(h, q)?.eval(astar, a)
}

fn check_epsilon(eps: f64) -> Result<()> {
    if eps.is_finite() && eps >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSchedule(format!("slice length must be non-negative, got {eps}")))
    }
}

/// `K_ε = Q(1 − iεH)Q`.
pub fn short_time_kernel(h: &Hamiltonian, q: &ProjectorBundle, eps: f64) -> Result<FockOperator> {
    check_same_space(h, q)?;
    check_epsilon(eps)?;
    let qm = q.operator.matrix();
    let step = qm - matmul(h.operator.matrix(), qm) * (I * eps);
    FockOperator::new(h.modes().clone(), matmul(qm, &step), None)
}

/// `B† M B`.
fn sandwich(b: &CMatrix, m: &CMatrix) -> CMatrix {
    matmul(&b.adjoint(), &matmul(m, b))
}

fn matrix_power(m: &CMatrix, mut exponent: usize) -> CMatrix {
    let n = m.nrows();
    let mut result = CMatrix::identity(n, n);
    let mut base = m.clone();
    while exponent > 0 {
        if exponent & 1 == 1 {
            result = matmul(&result, &base);
        }
        exponent >>= 1;
        if exponent > 0 {
            base = matmul(&base, &base);
        }
    }
    result
}

fn scaled_columns(m: &CMatrix, factors: impl Fn(usize) -> Complex64) -> CMatrix {
    let mut out = m.clone();
    for c in 0..out.ncols() {
        let f = factors(c);
        for z in out.column_mut(c).iter_mut() {
            *z *= f;
        }
    }
    out
}

/// Dynamics expressed in an orthonormal basis `B` of the image of `Q`.
///
/// With `Q = BB†`, `Q(1 − iεH)Q = B(1 − iε B†HB)B†` and
/// `(exp(−iεH)Q)^M = U_ε B (B† U_ε B)^{M−1} B†`, so every power is taken in
/// the physical dimension and only the certified rows are expanded.
#[derive(Debug, Clone)]
pub struct PhysicalFrame {
    prop: Propagator,
    basis: CMatrix,
    reduced_h: CMatrix,
    /// `V† B` with `V` the eigenvectors of `H`.
    eigen_basis: CMatrix,
    band_end: usize,
}

impl PhysicalFrame {
    pub fn new(prop: &Propagator, q: &ProjectorBundle) -> Result<Self> {
        let h = prop.hamiltonian();
        check_same_space(h, q)?;
        let modes = q.modes();
        let basis = q.image_basis(modes.cutoff());
        let reduced_h = sandwich(&basis, h.operator.matrix());
        let eigen_basis = matmul(&prop.eigensystem().vectors.adjoint(), &basis);
        let band_end = modes.block(h.certified_band().min(modes.cutoff())).end;
        Ok(Self {
            prop: prop.clone(),
            basis,
            reduced_h,
            eigen_basis,
            band_end,
        })
    }

    pub fn physical_dimension(&self) -> usize {
        self.basis.ncols()
    }

    fn band_basis(&self) -> CMatrix {
        self.basis.rows(0, self.band_end).into_owned()
    }

    /// Rows of `U_t B` inside the certified band.
    fn evolved_basis_band(&self, t: f64) -> CMatrix {
        let eig = self.prop.eigensystem();
        let v_band = eig.vectors.rows(0, self.band_end).into_owned();
        let phased = scaled_columns(&v_band, |k| (-I * eig.values[k] * t).exp());
        matmul(&phased, &self.eigen_basis)
    }

    /// `B† U_t B`.
    fn reduced_propagator(&self, t: f64) -> CMatrix {
        let eig = self.prop.eigensystem();
        let left = self.eigen_basis.adjoint();
        let phased = scaled_columns(&left, |k| (-I * eig.values[k] * t).exp());
        matmul(&phased, &self.eigen_basis)
    }

    fn euler_reduced(&self, eps: f64) -> CMatrix {
        let r = self.physical_dimension();
        CMatrix::identity(r, r) - &self.reduced_h * (I * eps)
    }

    /// `U^ph_t` restricted to the certified band.
    pub fn target_band(&self, t: f64) -> CMatrix {
        matmul(&self.evolved_basis_band(t), &self.band_basis().adjoint())
    }

    /// `K_ε^M` restricted to the certified band.
    pub fn sliced_band(&self, schedule: SliceSchedule) -> CMatrix {
        let bb = self.band_basis();
        let p = matrix_power(&self.euler_reduced(schedule.epsilon()), schedule.num_slices());
        matmul(&matmul(&bb, &p), &bb.adjoint())
    }

    /// `(exp(−iεH)Q)^M` restricted to the certified band.
    pub fn sliced_exact_band(&self, schedule: SliceSchedule) -> CMatrix {
        let eps = schedule.epsilon();
        let p = matrix_power(&self.reduced_propagator(eps), schedule.num_slices() - 1);
        matmul(&matmul(&self.evolved_basis_band(eps), &p), &self.band_basis().adjoint())
    }

    /// `‖K_ε − exp(−iεH) Q‖_max` on the certified band.
    pub fn local_defect(&self, eps: f64) -> Result<f64> {
        check_epsilon(eps)?;
        let bb = self.band_basis();
        let k = matmul(&matmul(&bb, &self.euler_reduced(eps)), &bb.adjoint());
        Ok(max_abs(&(k - self.target_band(eps))))
    }

    pub fn global_defect(&self, schedule: SliceSchedule) -> f64 {
        max_abs(&(self.sliced_band(schedule) - self.target_band(schedule.total_time())))
    }

    pub fn exact_slices_defect(&self, schedule: SliceSchedule) -> f64 {
        max_abs(&(self.sliced_exact_band(schedule) - self.target_band(schedule.total_time())))
    }
}

/// `‖K_ε − exp(−iεH) Q‖_max` on the certified band.
pub fn local_defect(prop: &Propagator, q: &ProjectorBundle, eps: f64) -> Result<f64> {
    PhysicalFrame::new(prop, q)?.local_defect(eps)
}

/// `K_ε^M` with `ε = t/M`, powered in the physical frame.
pub fn sliced_evolution(h: &Hamiltonian, q: &ProjectorBundle, schedule: SliceSchedule) -> Result<EvolutionResult> {
    check_same_space(h, q)?;
    let b = q.image_basis(q.modes().cutoff());
    let r = b.ncols();
    let reduced = CMatrix::identity(r, r) - sandwich(&b, h.operator.matrix()) * (I * schedule.epsilon());
    let k = matmul(&matmul(&b, &matrix_power(&reduced, schedule.num_slices())), &b.adjoint());
    Ok(EvolutionResult {
        operator: FockOperator::new(h.modes().clone(), k, None)?,
        time: schedule.total_time(),
        method: EvolutionMethod::Sliced,
        slices: Some(schedule.num_slices()),
        truncation_band: h.certified_band(),
    })
}

/// `(exp(−iεH) Q)^M`.
pub fn sliced_exact_evolution(
    prop: &Propagator,
    q: &ProjectorBundle,
    schedule: SliceSchedule,
) -> Result<EvolutionResult> {
    let h = prop.hamiltonian();
    check_same_space(h, q)?;
    let b = q.image_basis(q.modes().cutoff());
    let u = prop.matrix(schedule.epsilon());
    let ub = matmul(&u, &b);
    let reduced = matmul(&b.adjoint(), &ub);
    let k = matmul(&matmul(&ub, &matrix_power(&reduced, schedule.num_slices() - 1)), &b.adjoint());
    Ok(EvolutionResult {
        operator: FockOperator::new(h.modes().clone(), k, None)?,
        time: schedule.total_time(),
        method: EvolutionMethod::SlicedExact,
        slices: Some(schedule.num_slices()),
        truncation_band: h.certified_band(),
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LadderPoint {
    pub slices: usize,
    pub epsilon: f64,
    pub defect: f64,
}

/// Least-squares fit of `defect ≈ C ε^order` in log-log coordinates.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OrderFit {
    pub order: f64,
    pub constant: f64,
    pub points: usize,
}

pub fn fit_order(points: &[LadderPoint]) -> Result<OrderFit> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.defect > 0.0 && p.epsilon > 0.0)
        .map(|p| (p.epsilon.ln(), p.defect.ln()))
        .collect();
    if usable.len() < 2 {
        return Err(Error::InvalidSchedule(
            "order fit needs at least two points with positive defect".into(),
        ));
    }
    let n = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidSchedule("order fit needs distinct slice lengths".into()));
    }
    let order = sxy / sxx;
    Ok(OrderFit {
        order,
        constant: (my - order * mx).exp(),
        points: usable.len(),
    })
}

/// Defect ladders of the sliced evolution against `U^ph_t`.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceStudy {
    pub time: f64,
    pub band: usize,
    /// `‖K_ε^M − U^ph_t‖_max` on the band.
    pub global: Vec<LadderPoint>,
    /// `‖K_ε − exp(−iεH)Q‖_max` on the band.
    pub local: Vec<LadderPoint>,
    /// `‖(exp(−iεH)Q)^M − U^ph_t‖_max` on the band.
    pub exact_slices: Vec<LadderPoint>,
    pub global_fit: OrderFit,
    pub local_fit: OrderFit,
}

pub fn convergence_study(
    h: &Hamiltonian,
    q: &ProjectorBundle,
    time: f64,
    slice_counts: &[usize],
) -> Result<ConvergenceStudy> {
    let prop = Propagator::new(h)?;
    check_commutes(h, q)?;
    let frame = PhysicalFrame::new(&prop, q)?;
    let mut global = Vec::new();
    let mut local = Vec::new();
    let mut exact_slices = Vec::new();
    for &m in slice_counts {
        let schedule = SliceSchedule::new(time, m)?;
        let eps = schedule.epsilon();
        let point = |defect| LadderPoint {
            slices: m,
            epsilon: eps,
            defect,
        };
        global.push(point(frame.global_defect(schedule)));
        local.push(point(frame.local_defect(eps)?));
        exact_slices.push(point(frame.exact_slices_defect(schedule)));
    }
    Ok(ConvergenceStudy {
        time,
        band: h.certified_band(),
        global_fit: fit_order(&global)?,
        local_fit: fit_order(&local)?,
        global,
        local,
        exact_slices,
    })
}
