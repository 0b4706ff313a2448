//! Builders for the SO(N) vector model and SU(2) Yang–Mills mechanics.
//!
//! Both models are quantized in the holomorphic representation: constraints
//! are `Ĝ_a = T^a_{bc} â†_b â_c` (summed over a multiplicity index for the
//! matrix model) and the Hamiltonian is `Σ p²/2 + V(x)`. Every operator is
//! the exact compression of the corresponding polynomial in ladder operators
//! onto the truncated space.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{enumerate_basis, FockOperator, LadderPoly, ModeSet};

/// Real antisymmetric generators `T^a` with structure constants
/// `[T^a, T^b] = f_abc T^c`.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    dim_rep: usize,
    generators: Vec<DMatrix<f64>>,
    // f[a * n² + b * n + c]
    structure_constants: Vec<f64>,
}

impl GeneratorSet {
    /// Validates antisymmetry and closure before accepting the set.
    pub fn new(generators: Vec<DMatrix<f64>>, structure_constants: Vec<f64>) -> Result<Self> {
        let set = Self::new_unchecked(generators, structure_constants)?;
        let asym = set.antisymmetry_defect();
        if asym != 0.0 {
            return Err(Error::InvalidGenerators(format!(
                "generator not antisymmetric (defect {asym:e})"
            )));
        }
        let closure = set.algebra_defect();
        if closure > 1e-12 {
            return Err(Error::InvalidGenerators(format!(
                "commutators do not close on the structure constants (defect {closure:e})"
            )));
        }
        Ok(set)
    }

    /// Accepts the data with shape checks only; used for negative controls.
    pub fn new_unchecked(generators: Vec<DMatrix<f64>>, structure_constants: Vec<f64>) -> Result<Self> {
        let count = generators.len();
        let dim_rep = generators.first().map(|g| g.nrows()).unwrap_or(0);
        if generators.iter().any(|g| g.nrows() != dim_rep || g.ncols() != dim_rep) {
            return Err(Error::InvalidGenerators("generators have inconsistent shapes".into()));
        }
        if structure_constants.len() != count * count * count {
            return Err(Error::InvalidGenerators(format!(
                "expected {} structure constants, got {}",
                count * count * count,
                structure_constants.len()
            )));
        }
        Ok(Self {
            dim_rep,
            generators,
            structure_constants,
        })
    }

    pub fn dim_rep(&self) -> usize {
        self.dim_rep
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[DMatrix<f64>] {
        &self.generators
    }

    pub fn generator(&self, a: usize) -> &DMatrix<f64> {
        &self.generators[a]
    }

    pub fn f(&self, a: usize, b: usize, c: usize) -> f64 {
        let n = self.len();
        self.structure_constants[a * n * n + b * n + c]
    }

    pub fn antisymmetry_defect(&self) -> f64 {
        self.generators
            .iter()
            .map(|t| (t + t.transpose()).amax())
            .fold(0.0, f64::max)
    }

    /// `max |[T^a,T^b] − f_abc T^c|` over all pairs.
    pub fn algebra_defect(&self) -> f64 {
        let n = self.len();
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                let ta = &self.generators[a];
                let tb = &self.generators[b];
                let mut diff = ta * tb - tb * ta;
                for c in 0..n {
                    diff -= &self.generators[c] * self.f(a, b, c);
                }
                worst = worst.max(diff.amax());
            }
        }
        worst
    }

    /// Largest violation of total antisymmetry `f_abc = −f_bac = −f_acb`.
    pub fn structure_antisymmetry_defect(&self) -> f64 {
        let n = self.len();
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    worst = worst
                        .max((self.f(a, b, c) + self.f(b, a, c)).abs())
                        .max((self.f(a, b, c) + self.f(a, c, b)).abs());
                }
            }
        }
        worst
    }
}

/// The `N(N−1)/2` generators of so(N).
///
/// For `N ≠ 3` these are `E_ij − E_ji` with `i < j` in lexicographic order.
/// For `N = 3` the same elementary matrices are oriented as the rotation
/// generators `(T^a)_{bc} = −ε_abc`, so that `f_abc = ε_abc`.
pub fn so_n_generators(n: usize) -> Result<GeneratorSet> {
    if n < 2 {
        return Err(Error::InvalidGenerators(format!("so(N) needs N ≥ 2, got {n}")));
    }
    let mut generators = Vec::new();
    if n == 3 {
        for a in 0..3 {
            let mut t = DMatrix::zeros(3, 3);
            for b in 0..3 {
                for c in 0..3 {
                    t[(b, c)] = -levi_civita(a, b, c);
                }
            }
            generators.push(t);
        }
    } else {
        for i in 0..n {
            for j in (i + 1)..n {
                let mut t = DMatrix::zeros(n, n);
                t[(i, j)] = 1.0;
                t[(j, i)] = -1.0;
                generators.push(t);
            }
        }
    }
    let count = generators.len();
    // the elementary generators are Frobenius-orthogonal with norm² = 2
    let mut f = vec![0.0; count * count * count];
    for a in 0..count {
        for b in 0..count {
            let comm = &generators[a] * &generators[b] - &generators[b] * &generators[a];
            for c in 0..count {
                f[a * count * count + b * count + c] = comm.dot(&generators[c]) / 2.0;
            }
        }
    }
    GeneratorSet::new(generators, f)
}

fn levi_civita(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// How the abstract variables of a model map onto Fock modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModeLayout {
    /// `x_i` ↦ mode `i`.
    Vector { n: usize },
    /// `x_{ai}` ↦ mode `a·cols + i`; the gauge group acts on the row index `a`.
    Matrix { rows: usize, cols: usize },
}

impl ModeLayout {
    pub fn num_modes(&self) -> usize {
        match *self {
            ModeLayout::Vector { n } => n,
            ModeLayout::Matrix { rows, cols } => rows * cols,
        }
    }

    pub fn rep_dim(&self) -> usize {
        match *self {
            ModeLayout::Vector { n } => n,
            ModeLayout::Matrix { rows, .. } => rows,
        }
    }

    /// Number of copies of the representation ("particles").
    pub fn multiplicity(&self) -> usize {
        match *self {
            ModeLayout::Vector { .. } => 1,
            ModeLayout::Matrix { cols, .. } => cols,
        }
    }

    pub fn mode(&self, rep_index: usize, copy: usize) -> usize {
        match *self {
            ModeLayout::Vector { .. } => rep_index,
            ModeLayout::Matrix { cols, .. } => rep_index * cols + copy,
        }
    }
}

/// The potential `V(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialSpec {
    /// `V = x²/2`.
    Harmonic,
    /// `V = Σ_k c_k (x²)^k` with `coefficients[k-1] = c_k`, where `x²` is
    /// `Tr xᵀx` for the matrix layout.
    PolynomialInX2 { coefficients: Vec<f64> },
    /// `V = g²/4 [(Tr xᵀx)² − Tr (xᵀx)²]`.
    YangMillsQuartic { coupling: f64 },
}

impl PotentialSpec {
    /// Polynomial degree in `x`.
    pub fn degree(&self) -> usize {
        match self {
            PotentialSpec::Harmonic => 2,
            PotentialSpec::PolynomialInX2 { coefficients } => {
                2 * coefficients.iter().rposition(|&c| c != 0.0).map_or(0, |k| k + 1)
            }
            PotentialSpec::YangMillsQuartic { .. } => 4,
        }
    }
}

/// The single gauge group family supported here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GaugeGroup {
    SO(usize),
}

impl std::fmt::Display for GaugeGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GaugeGroup::SO(n) => write!(f, "SO({n})"),
        }
    }
}

/// A gauge model on a truncated Fock space.
#[derive(Debug, Clone)]
pub struct GaugeModel {
    modes: Arc<ModeSet>,
    generators: GeneratorSet,
    layout: ModeLayout,
    potential: PotentialSpec,
    group: GaugeGroup,
}

impl GaugeModel {
    pub fn new(
        modes: Arc<ModeSet>,
        generators: GeneratorSet,
        layout: ModeLayout,
        potential: PotentialSpec,
        group: GaugeGroup,
    ) -> Result<Self> {
        if layout.num_modes() != modes.num_modes() {
            return Err(Error::LayoutInconsistent(format!(
                "layout has {} modes, mode set has {}",
                layout.num_modes(),
                modes.num_modes()
            )));
        }
        if layout.rep_dim() != generators.dim_rep() {
            return Err(Error::LayoutInconsistent(format!(
                "generators act on dimension {}, layout representation has {}",
                generators.dim_rep(),
                layout.rep_dim()
            )));
        }
        Ok(Self {
            modes,
            generators,
            layout,
            potential,
            group,
        })
    }

    pub fn modes(&self) -> &Arc<ModeSet> {
        &self.modes
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.generators
    }

    pub fn layout(&self) -> ModeLayout {
        self.layout
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    pub fn group(&self) -> GaugeGroup {
        self.group
    }

    pub fn cutoff(&self) -> usize {
        self.modes.cutoff()
    }

    /// Highest degree on which truncated products of `H` are exact.
    pub fn certified_band(&self) -> usize {
        self.cutoff().saturating_sub(self.potential.degree())
    }

    /// Lifts a group element in the defining representation to the mode
    /// space (`g` for the vector layout, `g ⊗ 1` for the matrix layout).
    pub fn lift_rotation(&self, g: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.layout.num_modes();
        let mult = self.layout.multiplicity();
        let mut out = DMatrix::zeros(n, n);
        for a in 0..self.layout.rep_dim() {
            for b in 0..self.layout.rep_dim() {
                for i in 0..mult {
                    out[(self.layout.mode(a, i), self.layout.mode(b, i))] = g[(a, b)];
                }
            }
        }
        out
    }

    /// Classical potential at a real configuration (mode ordering).
    pub fn classical_potential(&self, x: &[f64]) -> f64 {
        let x2: f64 = x.iter().map(|v| v * v).sum();
        match &self.potential {
            PotentialSpec::Harmonic => x2 / 2.0,
            PotentialSpec::PolynomialInX2 { coefficients } => coefficients
                .iter()
                .enumerate()
                .map(|(k, c)| c * x2.powi(k as i32 + 1))
                .sum(),
            PotentialSpec::YangMillsQuartic { coupling } => {
                let rows = self.layout.rep_dim();
                let cols = self.layout.multiplicity();
                let mut tr_sq = 0.0;
                for i in 0..cols {
                    for j in 0..cols {
                        let m: f64 = (0..rows)
                            .map(|a| x[self.layout.mode(a, i)] * x[self.layout.mode(a, j)])
                            .sum();
                        tr_sq += m * m;
                    }
                }
                coupling * coupling / 4.0 * (x2 * x2 - tr_sq)
            }
        }
    }
}

/// SO(N) vector model with `N` modes.
pub fn so_n_vector_model(n: usize, cutoff: usize, potential: PotentialSpec) -> Result<GaugeModel> {
    if matches!(potential, PotentialSpec::YangMillsQuartic { .. }) {
        return Err(Error::Unsupported("Yang–Mills potential needs the matrix layout".into()));
    }
    GaugeModel::new(
        Arc::new(enumerate_basis(n, cutoff)),
        so_n_generators(n)?,
        ModeLayout::Vector { n },
        potential,
        GaugeGroup::SO(n),
    )
}

/// SU(2) Yang–Mills mechanics: nine modes `x_{ai}`, isotopic SO(3) acting on
/// the row index `a`, quartic potential with coupling `g`.
pub fn su2_ym_model(cutoff: usize, coupling: f64) -> Result<GaugeModel> {
    GaugeModel::new(
        Arc::new(enumerate_basis(9, cutoff)),
        so_n_generators(3)?,
        ModeLayout::Matrix { rows: 3, cols: 3 },
        PotentialSpec::YangMillsQuartic { coupling },
        GaugeGroup::SO(3),
    )
}

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// `Ĝ_a = Σ_i T^a_{bc} â†_{bi} â_{ci}` as ladder polynomials.
pub fn constraint_polys(model: &GaugeModel) -> Vec<LadderPoly> {
    let layout = model.layout();
    let gens = model.generators();
    (0..gens.len())
        .map(|a| {
            let t = gens.generator(a);
            let mut poly = LadderPoly::zero();
            for b in 0..layout.rep_dim() {
                for c in 0..layout.rep_dim() {
                    if t[(b, c)] == 0.0 {
                        continue;
                    }
                    for i in 0..layout.multiplicity() {
                        let term = LadderPoly::create(layout.mode(b, i))
                            .mul(&LadderPoly::annihilate(layout.mode(c, i)))
                            .scale(real(t[(b, c)]));
                        poly = poly.add(&term);
                    }
                }
            }
            poly
        })
        .collect()
}

/// Constraint operators `Ĝ_a`; degree-preserving and anti-Hermitian.
pub fn constraint_operators(model: &GaugeModel) -> Vec<FockOperator> {
    constraint_polys(model)
        .iter()
        .map(|p| p.compress(model.modes()))
        .collect()
}

fn squared_norm(model: &GaugeModel) -> LadderPoly {
    (0..model.modes().num_modes()).fold(LadderPoly::zero(), |acc, j| {
        acc.add(&LadderPoly::position(j).pow(2))
    })
}

/// `V(x)` as a ladder polynomial.
pub fn potential_poly(model: &GaugeModel) -> LadderPoly {
    match model.potential() {
        PotentialSpec::Harmonic => squared_norm(model).scale(real(0.5)),
        PotentialSpec::PolynomialInX2 { coefficients } => {
            let x2 = squared_norm(model);
            let mut power = LadderPoly::identity();
            let mut v = LadderPoly::zero();
            for &c in coefficients {
                power = power.mul(&x2);
                if c != 0.0 {
                    v = v.add(&power.scale(real(c)));
                }
            }
            v
        }
        PotentialSpec::YangMillsQuartic { coupling } => {
            let layout = model.layout();
            let rows = layout.rep_dim();
            let cols = layout.multiplicity();
            let x2 = squared_norm(model);
            // (xᵀx)_{ij} = Σ_a x_{ai} x_{aj}
            let gram = |i: usize, j: usize| {
                (0..rows).fold(LadderPoly::zero(), |acc, a| {
                    acc.add(&LadderPoly::position(layout.mode(a, i)).mul(&LadderPoly::position(layout.mode(a, j))))
                })
            };
            let mut tr_sq = LadderPoly::zero();
            for i in 0..cols {
                for j in 0..cols {
                    let m = gram(i, j);
                    tr_sq = tr_sq.add(&m.mul(&m));
                }
            }
            x2.mul(&x2)
                .add(&tr_sq.scale(real(-1.0)))
                .scale(real(coupling * coupling / 4.0))
        }
    }
}

/// `H = Σ p²/2 + V(x)` as a ladder polynomial.
pub fn hamiltonian_poly(model: &GaugeModel) -> LadderPoly {
    let kinetic = (0..model.modes().num_modes()).fold(LadderPoly::zero(), |acc, j| {
        acc.add(&LadderPoly::momentum(j).pow(2))
    });
    kinetic.scale(real(0.5)).add(&potential_poly(model))
}

/// A Hamiltonian together with the degree of its potential.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    pub operator: FockOperator,
    pub potential_degree: usize,
}

impl Hamiltonian {
    /// Wraps an operator with no truncation-band information beyond the
    /// quadratic kinetic term.
    pub fn from_operator(operator: FockOperator, potential_degree: usize) -> Self {
        Self {
            operator,
            potential_degree,
        }
    }

    pub fn modes(&self) -> &Arc<ModeSet> {
        self.operator.modes()
    }

    pub fn certified_band(&self) -> usize {
        self.modes()
            .cutoff()
            .saturating_sub(self.potential_degree.max(2))
    }
}

/// Builds `H = Σ p²/2 + V` with the `−y_a G^a` term dropped.
pub fn hamiltonian(model: &GaugeModel) -> Result<Hamiltonian> {
    let degree = model.potential().degree().max(2);
    if degree > model.cutoff() {
        return Err(Error::TruncationUnsafe {
            degree,
            cutoff: model.cutoff(),
        });
    }
    Ok(Hamiltonian {
        operator: hamiltonian_poly(model).compress(model.modes()),
        potential_degree: degree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::FockVector;

    fn ops_max_diff(a: &FockOperator, b: &FockOperator) -> f64 {
        a.max_diff(b).unwrap()
    }

    #[test]
    fn so2_is_abelian() {
        let g = so_n_generators(2).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.f(0, 0, 0), 0.0);
    }

    #[test]
    fn so3_structure_constants_are_levi_civita() {
        let g = so_n_generators(3).unwrap();
        assert_eq!(g.len(), 3);
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    assert_eq!(g.f(a, b, c), levi_civita(a, b, c));
                }
            }
        }
    }

    #[test]
    fn so4_closure_by_direct_commutators() {
        let g = so_n_generators(4).unwrap();
        assert_eq!(g.len(), 6);
        // oracle: expand each commutator in the elementary basis by reading
        // off the (i, j) entry with i < j
        let pairs: Vec<(usize, usize)> = (0..4).flat_map(|i| ((i + 1)..4).map(move |j| (i, j))).collect();
        for a in 0..6 {
            for b in 0..6 {
                let comm = g.generator(a) * g.generator(b) - g.generator(b) * g.generator(a);
                let mut rebuilt = DMatrix::<f64>::zeros(4, 4);
                for (c, &(i, j)) in pairs.iter().enumerate() {
                    rebuilt += g.generator(c) * comm[(i, j)];
                }
                assert!((comm - rebuilt).amax() < 1e-15);
            }
        }
        assert!(g.algebra_defect() < 1e-15);
        assert_eq!(g.structure_antisymmetry_defect(), 0.0);
    }

    #[test]
    fn broken_generators_are_rejected() {
        let good = so_n_generators(3).unwrap();
        let mut f = good.structure_constants.clone();
        f[1 * 9 + 2 * 3] += 0.5;
        assert!(GeneratorSet::new(good.generators.clone(), f.clone()).is_err());
        let broken = GeneratorSet::new_unchecked(good.generators.clone(), f).unwrap();
        assert!(broken.algebra_defect() > 0.1);
    }

    #[test]
    fn so2_constraint_annihilates_vacuum_and_has_imaginary_spectrum() {
        let model = so_n_vector_model(2, 3, PotentialSpec::Harmonic).unwrap();
        let g = constraint_operators(&model);
        assert_eq!(g.len(), 1);
        let out = g[0].apply(&FockVector::vacuum(model.modes().clone())).unwrap();
        assert_eq!(out.norm(), 0.0);

        // degree-1 block is [[0, -1], [1, 0]] up to orientation: eigenvalues ±i
        let block = g[0].block(1, 1);
        let trace = block[(0, 0)] + block[(1, 1)];
        let det = block[(0, 0)] * block[(1, 1)] - block[(0, 1)] * block[(1, 0)];
        // λ² − tr λ + det = 0
        let disc = (trace * trace - det * 4.0).sqrt();
        let l1 = (trace + disc) / 2.0;
        let l2 = (trace - disc) / 2.0;
        let mut ims = [l1.im, l2.im];
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + 1.0).abs() < 1e-14 && (ims[1] - 1.0).abs() < 1e-14);
        assert!(l1.re.abs() < 1e-14 && l2.re.abs() < 1e-14);
    }

    #[test]
    fn constraint_algebra_and_anti_hermiticity() {
        for model in [
            so_n_vector_model(3, 4, PotentialSpec::Harmonic).unwrap(),
            so_n_vector_model(4, 3, PotentialSpec::Harmonic).unwrap(),
            su2_ym_model(2, 1.0).unwrap(),
        ] {
            let g = constraint_operators(&model);
            let gens = model.generators();
            for a in 0..g.len() {
                assert_eq!(g[a].degree_shift(), Some(0));
                assert_eq!(g[a].off_band_magnitude(0), 0.0);
                assert_eq!(ops_max_diff(&g[a].adjoint(), &g[a].scale(real(-1.0))), 0.0);
                for b in 0..g.len() {
                    let mut rhs = FockOperator::zeros(model.modes().clone());
                    for c in 0..g.len() {
                        rhs = rhs.add(&g[c].scale(real(gens.f(a, b, c)))).unwrap();
                    }
                    let lhs = g[a].commutator(&g[b]).unwrap();
                    assert!(ops_max_diff(&lhs, &rhs) <= 1e-12);
                }
                // traceless per degree block
                for k in 0..=model.cutoff() {
                    assert!(g[a].block(k, k).trace().norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn ym_has_nine_modes_three_constraints_annihilating_vacuum() {
        let model = su2_ym_model(2, 0.5).unwrap();
        assert_eq!(model.modes().num_modes(), 9);
        let g = constraint_operators(&model);
        assert_eq!(g.len(), 3);
        let vac = FockVector::vacuum(model.modes().clone());
        for op in &g {
            assert_eq!(op.apply(&vac).unwrap().norm(), 0.0);
        }
    }

    #[test]
    fn harmonic_hamiltonian_is_number_operator_plus_zero_point() {
        let n = 3;
        let model = so_n_vector_model(n, 5, PotentialSpec::Harmonic).unwrap();
        let h = hamiltonian(&model).unwrap();
        let modes = model.modes();
        for idx in 0..modes.dim() {
            for col in 0..modes.dim() {
                let expected = if idx == col {
                    modes.multi_index(idx).degree() as f64 + n as f64 / 2.0
                } else {
                    0.0
                };
                assert!((h.operator.matrix()[(idx, col)] - real(expected)).norm() < 1e-13);
            }
        }
        assert!((h.operator.matrix()[(0, 0)].re - 1.5).abs() < 1e-14);
    }

    #[test]
    fn hamiltonian_commutes_with_constraints() {
        let quartic = PotentialSpec::PolynomialInX2 {
            coefficients: vec![0.5, 0.3],
        };
        for model in [
            so_n_vector_model(2, 6, quartic.clone()).unwrap(),
            so_n_vector_model(3, 5, quartic).unwrap(),
            su2_ym_model(4, 0.7).unwrap(),
        ] {
            let h = hamiltonian(&model).unwrap();
            assert!(h.operator.hermiticity_defect() < 1e-13);
            for g in constraint_operators(&model) {
                let comm = h.operator.commutator(&g).unwrap();
                assert!(comm.max_norm_within(h.certified_band()) <= 1e-10);
                // exact compression keeps the whole matrix gauge invariant
                assert!(comm.max_norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn potential_degree_above_cutoff_is_unsafe() {
        let model = su2_ym_model(3, 1.0).unwrap();
        assert!(matches!(hamiltonian(&model), Err(Error::TruncationUnsafe { .. })));
    }

    #[test]
    fn ym_potential_vanishes_on_parallel_columns() {
        let model = su2_ym_model(4, 1.3).unwrap();
        let u = [0.3, -1.2, 0.7];
        let v = [1.1, 0.4, -0.5];
        let mut x = vec![0.0; 9];
        for a in 0..3 {
            for i in 0..3 {
                x[a * 3 + i] = u[a] * v[i];
            }
        }
        assert!(model.classical_potential(&x).abs() < 1e-14);
        // generic configuration is strictly positive
        let y: Vec<f64> = (0..9).map(|k| (k as f64 * 0.37).sin()).collect();
        assert!(model.classical_potential(&y) > 1e-3);
    }
}
