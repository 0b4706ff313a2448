use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::basis::ModeSet;
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A state in the truncated holomorphic representation, stored by its
/// coefficients in the orthonormal number basis.
#[derive(Debug, Clone)]
pub struct FockVector {
    modes: Arc<ModeSet>,
    coeffs: CVector,
}

impl FockVector {
    pub fn new(modes: Arc<ModeSet>, coeffs: CVector) -> Result<Self> {
        if coeffs.len() != modes.dim() {
            return Err(Error::DimensionMismatch {
                expected: modes.dim(),
                found: coeffs.len(),
            });
        }
        Ok(Self { modes, coeffs })
    }

    pub fn zeros(modes: Arc<ModeSet>) -> Self {
        let coeffs = CVector::zeros(modes.dim());
        Self { modes, coeffs }
    }

    /// The number state with index `idx`.
    pub fn basis_state(modes: Arc<ModeSet>, idx: usize) -> Self {
        let mut v = Self::zeros(modes);
        v.coeffs[idx] = ONE;
        v
    }

    pub fn vacuum(modes: Arc<ModeSet>) -> Self {
        Self::basis_state(modes, 0)
    }

    pub fn modes(&self) -> &Arc<ModeSet> {
        &self.modes
    }

    pub fn coeffs(&self) -> &CVector {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> CVector {
        self.coeffs
    }

    /// Coefficient-space inner product `Σ conj(c1) c2`.
    pub fn inner(&self, other: &FockVector) -> Result<Complex64> {
        if !self.modes.same_as(&other.modes) {
            return Err(Error::ModeSetMismatch);
        }
        Ok(self.coeffs.dotc(&other.coeffs))
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }
}

/// A linear operator on a truncated Fock space.
///
/// When `degree_shift` is `Some(d)`, the operator maps the degree-`k` block
/// into the degree-`k + d` block and every other entry is exactly zero.
#[derive(Debug, Clone)]
pub struct FockOperator {
    modes: Arc<ModeSet>,
    matrix: CMatrix,
    degree_shift: Option<i32>,
}

impl FockOperator {
    /// Wraps a matrix, verifying that entries outside a declared degree band
    /// are exactly zero.
    pub fn new(modes: Arc<ModeSet>, matrix: CMatrix, degree_shift: Option<i32>) -> Result<Self> {
        let dim = modes.dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        let op = Self {
            modes,
            matrix,
            degree_shift,
        };
        if let Some(shift) = degree_shift {
            let leak = op.off_band_magnitude(shift);
            if leak != 0.0 {
                return Err(Error::BandViolation {
                    shift,
                    magnitude: leak,
                });
            }
        }
        Ok(op)
    }

    pub fn identity(modes: Arc<ModeSet>) -> Self {
        let dim = modes.dim();
        Self {
            modes,
            matrix: CMatrix::identity(dim, dim),
            degree_shift: Some(0),
        }
    }

    pub fn zeros(modes: Arc<ModeSet>) -> Self {
        let dim = modes.dim();
        Self {
            modes,
            matrix: CMatrix::zeros(dim, dim),
            degree_shift: None,
        }
    }

    pub fn modes(&self) -> &Arc<ModeSet> {
        &self.modes
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn degree_shift(&self) -> Option<i32> {
        self.degree_shift
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Largest entry magnitude outside the band of the given shift.
    pub fn off_band_magnitude(&self, shift: i32) -> f64 {
        let mut worst = 0.0f64;
        for col in 0..self.dim() {
            let k = self.modes.degree_of(col) as i32;
            for row in 0..self.dim() {
                let target = self.modes.degree_of(row) as i32;
                if target != k + shift {
                    worst = worst.max(self.matrix[(row, col)].norm());
                }
            }
        }
        worst
    }

    fn check_compatible(&self, other: &FockOperator) -> Result<()> {
        if self.modes.same_as(&other.modes) {
            Ok(())
        } else {
            Err(Error::ModeSetMismatch)
        }
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &FockOperator) -> Result<FockOperator> {
        self.check_compatible(other)?;
        let degree_shift = match (self.degree_shift, other.degree_shift) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        Ok(FockOperator {
            modes: self.modes.clone(),
            matrix: matmul(&self.matrix, &other.matrix),
            degree_shift,
        })
    }

    pub fn add(&self, other: &FockOperator) -> Result<FockOperator> {
        self.check_compatible(other)?;
        let degree_shift = match (self.degree_shift, other.degree_shift) {
            (Some(a), Some(b)) if a == b => Some(a),
            _ => None,
        };
        Ok(FockOperator {
            modes: self.modes.clone(),
            matrix: &self.matrix + &other.matrix,
            degree_shift,
        })
    }

    pub fn sub(&self, other: &FockOperator) -> Result<FockOperator> {
        self.add(&other.scale(-ONE))
    }

    pub fn scale(&self, factor: Complex64) -> FockOperator {
        FockOperator {
            modes: self.modes.clone(),
            matrix: &self.matrix * factor,
            degree_shift: self.degree_shift,
        }
    }

    pub fn adjoint(&self) -> FockOperator {
        FockOperator {
            modes: self.modes.clone(),
            matrix: self.matrix.adjoint(),
            degree_shift: self.degree_shift.map(|d| -d),
        }
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &FockOperator) -> Result<FockOperator> {
        self.compose(other)?.sub(&other.compose(self)?)
    }

    pub fn apply(&self, v: &FockVector) -> Result<FockVector> {
        if !self.modes.same_as(v.modes()) {
            return Err(Error::ModeSetMismatch);
        }
        FockVector::new(self.modes.clone(), &self.matrix * v.coeffs())
    }

    pub fn max_norm(&self) -> f64 {
        max_abs(&self.matrix)
    }

    /// `max |self − other|` entrywise.
    pub fn max_diff(&self, other: &FockOperator) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(max_abs(&(&self.matrix - &other.matrix)))
    }

    /// `max |self† − self|` entrywise.
    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(self.matrix.adjoint() - &self.matrix))
    }

    /// Maximum entry over rows and columns whose degree is at most `max_degree`.
    pub fn max_norm_within(&self, max_degree: usize) -> f64 {
        let end = self.modes.block(max_degree.min(self.modes.cutoff())).end;
        max_abs(&self.matrix.view((0, 0), (end, end)).into_owned())
    }

    /// The `(row_degree, col_degree)` block as a dense matrix.
    pub fn block(&self, row_degree: usize, col_degree: usize) -> CMatrix {
        let r = self.modes.block(row_degree);
        let c = self.modes.block(col_degree);
        self.matrix
            .view((r.start, c.start), (r.len(), c.len()))
            .into_owned()
    }
}

/// `a·b` through real products; purely real factors skip their imaginary part.
pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    let (re, im) = match (ai, bi) {
        (None, None) => (&ar * &br, None),
        (None, Some(bi)) => (&ar * &br, Some(&ar * &bi)),
        (Some(ai), None) => (&ar * &br, Some(&ai * &br)),
        (Some(ai), Some(bi)) => (&ar * &br - &ai * &bi, Some(&ar * &bi + &ai * &br)),
    };
    match im {
        None => re.map(|x| Complex64::new(x, 0.0)),
        Some(im) => re.zip_map(&im, Complex64::new),
    }
}

fn split(m: &CMatrix) -> (DMatrix<f64>, Option<DMatrix<f64>>) {
    let re = m.map(|z| z.re);
    if m.iter().all(|z| z.im == 0.0) {
        (re, None)
    } else {
        (re, Some(m.map(|z| z.im)))
    }
}

/// Largest entry magnitude.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// A single ladder operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ladder {
    Create(usize),
    Annihilate(usize),
}

/// A polynomial in ladder operators, stored as a sum of words.
///
/// The word `[A, B, C]` stands for the product `A·B·C`, so `C` acts first.
/// Words are applied to number states on the untruncated Fock space and only
/// the final state is tested against the cutoff, so [`LadderPoly::compress`]
/// yields the exact compression `P·O·P` of the operator onto the truncated
/// space.
#[derive(Debug, Clone, Default)]
pub struct LadderPoly {
    terms: BTreeMap<Vec<Ladder>, Complex64>,
}

impl LadderPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::constant(ONE)
    }

    pub fn constant(c: Complex64) -> Self {
        let mut p = Self::zero();
        p.push(Vec::new(), c);
        p
    }

    pub fn create(mode: usize) -> Self {
        let mut p = Self::zero();
        p.push(vec![Ladder::Create(mode)], ONE);
        p
    }

    pub fn annihilate(mode: usize) -> Self {
        let mut p = Self::zero();
        p.push(vec![Ladder::Annihilate(mode)], ONE);
        p
    }

    /// `x_j = (a_j + a†_j)/√2`.
    pub fn position(mode: usize) -> Self {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::annihilate(mode).add(&Self::create(mode)).scale(s)
    }

    /// `p_j = (a_j − a†_j)/(i√2)`.
    pub fn momentum(mode: usize) -> Self {
        let s = Complex64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2);
        Self::annihilate(mode)
            .add(&Self::create(mode).scale(-ONE))
            .scale(s)
    }

    fn push(&mut self, word: Vec<Ladder>, c: Complex64) {
        let entry = self.terms.entry(word).or_insert(ZERO);
        *entry += c;
    }

    pub fn add(&self, other: &LadderPoly) -> LadderPoly {
        let mut out = self.clone();
        for (w, &c) in &other.terms {
            out.push(w.clone(), c);
        }
        out.prune()
    }

    pub fn scale(&self, c: Complex64) -> LadderPoly {
        LadderPoly {
            terms: self.terms.iter().map(|(w, &v)| (w.clone(), v * c)).collect(),
        }
        .prune()
    }

    pub fn mul(&self, other: &LadderPoly) -> LadderPoly {
        let mut out = LadderPoly::zero();
        for (w1, &c1) in &self.terms {
            for (w2, &c2) in &other.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                out.push(w, c1 * c2);
            }
        }
        out.prune()
    }

    pub fn pow(&self, exponent: usize) -> LadderPoly {
        (0..exponent).fold(LadderPoly::identity(), |acc, _| acc.mul(self))
    }

    fn prune(mut self) -> Self {
        self.terms.retain(|_, c| *c != ZERO);
        self
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Length of the longest word.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    /// Common degree shift of all words, if they share one.
    pub fn homogeneous_shift(&self) -> Option<i32> {
        let mut shifts = self.terms.keys().map(|w| {
            w.iter()
                .map(|l| match l {
                    Ladder::Create(_) => 1,
                    Ladder::Annihilate(_) => -1,
                })
                .sum::<i32>()
        });
        let first = shifts.next().unwrap_or(0);
        shifts.all(|s| s == first).then_some(first)
    }

    /// Exact compression onto the truncated space.
    pub fn compress(&self, modes: &Arc<ModeSet>) -> FockOperator {
        let dim = modes.dim();
        let mut matrix = CMatrix::zeros(dim, dim);
        let mut occ = vec![0u32; modes.num_modes()];
        for col in 0..dim {
            for (word, &c) in &self.terms {
                occ.copy_from_slice(modes.multi_index(col).occupations());
                let mut amp = 1.0f64;
                let mut alive = true;
                for op in word.iter().rev() {
                    match *op {
                        Ladder::Create(j) => {
                            occ[j] += 1;
                            amp *= (occ[j] as f64).sqrt();
                        }
                        Ladder::Annihilate(j) => {
                            if occ[j] == 0 {
                                alive = false;
                                break;
                            }
                            amp *= (occ[j] as f64).sqrt();
                            occ[j] -= 1;
                        }
                    }
                }
                if !alive {
                    continue;
                }
                let degree: u32 = occ.iter().sum();
                if degree as usize > modes.cutoff() {
                    continue;
                }
                if let Some(row) = modes.index_of_occupations(&occ) {
                    matrix[(row, col)] += c * amp;
                }
            }
        }
        FockOperator {
            modes: modes.clone(),
            matrix,
            degree_shift: self.homogeneous_shift(),
        }
    }
}

/// Truncated annihilation and creation operators `(â_j, â†_j)` for every mode.
pub fn ladder_operators(modes: &Arc<ModeSet>) -> (Vec<FockOperator>, Vec<FockOperator>) {
    let n = modes.num_modes();
    let annihilators = (0..n).map(|j| LadderPoly::annihilate(j).compress(modes)).collect();
    let creators = (0..n).map(|j| LadderPoly::create(j).compress(modes)).collect();
    (annihilators, creators)
}

/// Truncated position and momentum operators `(x_j, p_j)`.
pub fn position_momentum(modes: &Arc<ModeSet>) -> (Vec<FockOperator>, Vec<FockOperator>) {
    let n = modes.num_modes();
    let xs = (0..n).map(|j| LadderPoly::position(j).compress(modes)).collect();
    let ps = (0..n).map(|j| LadderPoly::momentum(j).compress(modes)).collect();
    (xs, ps)
}

/// The operator induced on the Fock space by a real orthogonal mode rotation
/// `g`, i.e. `ψ(a*) ↦ ψ(gᵀ a*)`; it maps `â†_k` to `Σ_i g_ik â†_i`.
///
/// Columns are built degree by degree from the parent state, so the result is
/// exact and degree-preserving.
pub fn induced_rotation(modes: &Arc<ModeSet>, g: &DMatrix<f64>) -> Result<FockOperator> {
    let n = modes.num_modes();
    if g.nrows() != n || g.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: g.nrows(),
        });
    }
    let dim = modes.dim();
    let mut matrix = CMatrix::zeros(dim, dim);
    matrix[(0, 0)] = ONE;
    for degree in 1..=modes.cutoff() {
        let lower = modes.block(degree - 1);
        for col in modes.block(degree) {
            let (parent, j) = modes.parent(col).expect("non-vacuum state has a parent");
            let nj = modes.multi_index(col).get(j) as f64;
            let scale = 1.0 / nj.sqrt();
            for src in lower.clone() {
                let amp = matrix[(src, parent)];
                if amp == ZERO {
                    continue;
                }
                let occ = modes.multi_index(src);
                for i in 0..n {
                    let gij = g[(i, j)];
                    if gij == 0.0 {
                        continue;
                    }
                    let target = modes.raised(src, i).expect("raise stays within cutoff");
                    let raise_amp = ((occ.get(i) + 1) as f64).sqrt();
                    matrix[(target, col)] += amp * (gij * raise_amp * scale);
                }
            }
        }
    }
    Ok(FockOperator {
        modes: modes.clone(),
        matrix,
        degree_shift: Some(0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::enumerate_basis;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn single_mode_ladder_amplitudes() {
        let modes = Arc::new(enumerate_basis(1, 2));
        let (a, adag) = ladder_operators(&modes);
        let m = a[0].matrix();
        assert_eq!(m[(0, 1)], c(1.0));
        assert!((m[(1, 2)] - c(2f64.sqrt())).norm() < 1e-15);
        assert_eq!(a[0].degree_shift(), Some(-1));
        assert_eq!(adag[0].degree_shift(), Some(1));
        // nothing above the cutoff
        assert_eq!(adag[0].matrix().column(2).iter().filter(|z| z.norm() > 0.0).count(), 0);
    }

    #[test]
    fn canonical_commutator_below_cutoff() {
        let modes = Arc::new(enumerate_basis(3, 4));
        let (a, adag) = ladder_operators(&modes);
        for j in 0..3 {
            let comm = a[j].commutator(&adag[j]).unwrap();
            let band = modes.block(3).end;
            for r in 0..band {
                for col in 0..band {
                    let expected = if r == col { ONE } else { ZERO };
                    assert!((comm.matrix()[(r, col)] - expected).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn creation_on_vacuum() {
        let modes = Arc::new(enumerate_basis(3, 2));
        let (_, adag) = ladder_operators(&modes);
        let out = adag[0].apply(&FockVector::vacuum(modes.clone())).unwrap();
        let target = modes.index_of_occupations(&[1, 0, 0]).unwrap();
        for (i, z) in out.coeffs().iter().enumerate() {
            let expected = if i == target { 1.0 } else { 0.0 };
            assert_eq!(z.re, expected);
            assert_eq!(z.im, 0.0);
        }
    }

    #[test]
    fn position_momentum_properties() {
        let modes = Arc::new(enumerate_basis(1, 4));
        let (xs, ps) = position_momentum(&modes);
        let x2 = xs[0].compose(&xs[0]).unwrap();
        assert!((x2.matrix()[(0, 0)] - c(0.5)).norm() < 1e-15);
        assert!(ps[0].hermiticity_defect() < 1e-15);
        assert!(xs[0].hermiticity_defect() < 1e-15);

        let modes = Arc::new(enumerate_basis(2, 5));
        let (xs, _) = position_momentum(&modes);
        let comm = xs[0].commutator(&xs[1]).unwrap();
        assert!(comm.max_norm_within(3) < 1e-14);
    }

    #[test]
    fn composition_adds_degree_shifts() {
        let modes = Arc::new(enumerate_basis(2, 3));
        let (a, adag) = ladder_operators(&modes);
        let prod = adag[0].compose(&adag[1]).unwrap().compose(&a[0]).unwrap();
        assert_eq!(prod.degree_shift(), Some(1));
        assert_eq!(prod.off_band_magnitude(1), 0.0);
    }

    #[test]
    fn band_violation_is_rejected() {
        let modes = Arc::new(enumerate_basis(1, 2));
        let mut m = CMatrix::zeros(3, 3);
        m[(0, 2)] = ONE;
        assert!(matches!(
            FockOperator::new(modes, m, Some(0)),
            Err(Error::BandViolation { .. })
        ));
    }

    #[test]
    fn compression_matches_truncated_products_inside_band() {
        // x^2 from truncated matrices agrees with the exact compression away
        // from the top block
        let modes = Arc::new(enumerate_basis(2, 4));
        let (xs, _) = position_momentum(&modes);
        let truncated = xs[0].compose(&xs[0]).unwrap();
        let exact = LadderPoly::position(0).pow(2).compress(&modes);
        let band = modes.block(3).end;
        for r in 0..band {
            for col in 0..band {
                assert!((truncated.matrix()[(r, col)] - exact.matrix()[(r, col)]).norm() < 1e-14);
            }
        }
        // the top block differs: truncation drops the a·a† contribution
        let top = modes.block(4).start;
        assert!((truncated.matrix()[(top, top)] - exact.matrix()[(top, top)]).norm() > 0.1);
    }

    #[test]
    fn induced_rotation_is_unitary_and_matches_adjoint_action() {
        let modes = Arc::new(enumerate_basis(2, 4));
        let theta: f64 = 0.7;
        let g = DMatrix::from_row_slice(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()]);
        let u = induced_rotation(&modes, &g).unwrap();
        let uu = u.adjoint().compose(&u).unwrap();
        assert!(uu.max_diff(&FockOperator::identity(modes.clone())).unwrap() < 1e-13);

        // U â†_k U† = Σ_i g_ik â†_i on degrees where both sides are untruncated
        let (_, adag) = ladder_operators(&modes);
        for k in 0..2 {
            let lhs = u.compose(&adag[k]).unwrap().compose(&u.adjoint()).unwrap();
            let mut rhs = FockOperator::zeros(modes.clone());
            for i in 0..2 {
                rhs = rhs.add(&adag[i].scale(c(g[(i, k)]))).unwrap();
            }
            assert!(lhs.max_diff(&rhs).unwrap() < 1e-13);
        }
    }
}
