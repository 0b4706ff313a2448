//! Quadrature rules for normalized Haar measure on SO(2), SO(3) and SO(N).

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{GaugeGroup, GaugeModel};
use crate::quadrature::{gauss_legendre, periodic_trapezoid};

/// How nodes on the group are generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum HaarRule {
    /// SO(2): equally spaced angles.
    Trapezoid { points: usize },
    /// SO(3): `R = R_z(α) R_y(β) R_z(γ)` with trapezoid rules in α, γ and
    /// Gauss–Legendre in `cos β`.
    EulerProduct { angle_points: usize, beta_points: usize },
    /// SO(N): QR of seeded Gaussian matrices with sign-fixed diagonal.
    MonteCarlo { samples: usize, seed: u64 },
}

/// A weighted group element in the defining representation.
#[derive(Debug, Clone)]
pub struct HaarNode {
    pub weight: f64,
    pub rotation: DMatrix<f64>,
}

/// Quadrature rule for averaging over a compact rotation group.
#[derive(Debug, Clone)]
pub struct HaarQuadrature {
    group: GaugeGroup,
    rule: HaarRule,
    nodes: Vec<HaarNode>,
}

pub fn rotation_2d(theta: f64) -> DMatrix<f64> {
    let (s, c) = theta.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

fn rot_z(t: f64) -> DMatrix<f64> {
    let (s, c) = t.sin_cos();
    DMatrix::from_row_slice(3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0])
}

fn rot_y(t: f64) -> DMatrix<f64> {
    let (s, c) = t.sin_cos();
    DMatrix::from_row_slice(3, 3, &[c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c])
}

/// ZYZ Euler rotation.
pub fn euler_rotation(alpha: f64, beta: f64, gamma: f64) -> DMatrix<f64> {
    rot_z(alpha) * rot_y(beta) * rot_z(gamma)
}

/// Haar-random element of SO(n).
pub fn random_rotation<R: rand::Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let gauss: DMatrix<f64> = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let qr = gauss.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    // Haar on O(n) → Haar on SO(n)
    if q.determinant() < 0.0 {
        for i in 0..n {
            q[(i, 0)] = -q[(i, 0)];
        }
    }
    q
}

impl HaarQuadrature {
    pub fn so2_trapezoid(points: usize) -> Result<Self> {
        if points == 0 {
            return Err(Error::Config("trapezoid rule needs at least one point".into()));
        }
        let rule = periodic_trapezoid(points);
        let nodes = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&t, &w)| HaarNode {
                weight: w,
                rotation: rotation_2d(t),
            })
            .collect();
        Ok(Self {
            group: GaugeGroup::SO(2),
            rule: HaarRule::Trapezoid { points },
            nodes,
        })
    }

    /// Product rule over Euler angles with weight `sin β/(8π²)`.
    pub fn so3_euler(angle_points: usize, beta_points: usize) -> Result<Self> {
        if angle_points == 0 || beta_points == 0 {
            return Err(Error::Config("Euler product rule needs positive orders".into()));
        }
        let angles = periodic_trapezoid(angle_points);
        let beta = gauss_legendre(beta_points);
        let mut nodes = Vec::with_capacity(angle_points * angle_points * beta_points);
        for (&a, &wa) in angles.nodes.iter().zip(&angles.weights) {
            for (&x, &wb) in beta.nodes.iter().zip(&beta.weights) {
                let b = x.acos();
                for (&c, &wc) in angles.nodes.iter().zip(&angles.weights) {
                    nodes.push(HaarNode {
                        weight: wa * wc * wb / 2.0,
                        rotation: euler_rotation(a, b, c),
                    });
                }
            }
        }
        Ok(Self {
            group: GaugeGroup::SO(3),
            rule: HaarRule::EulerProduct {
                angle_points,
                beta_points,
            },
            nodes,
        })
    }

    pub fn so_n_montecarlo(n: usize, samples: usize, seed: u64) -> Result<Self> {
        if samples == 0 {
            return Err(Error::Config("Monte Carlo rule needs at least one sample".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = 1.0 / samples as f64;
        let nodes = (0..samples)
            .map(|_| HaarNode {
                weight: w,
                rotation: random_rotation(n, &mut rng),
            })
            .collect();
        Ok(Self {
            group: GaugeGroup::SO(n),
            rule: HaarRule::MonteCarlo { samples, seed },
            nodes,
        })
    }

    /// Deterministic rule that averages every polynomial of degree
    /// ≤ `degree` in the group matrix entries exactly.
    ///
    /// Entries of `R` are trigonometric polynomials of degree one in each
    /// angle, so a degree-`k` monomial needs trapezoid rules with more than
    /// `k` points; after the α and γ averages only Legendre polynomials of
    /// degree ≤ `k` in `cos β` survive.
    pub fn exact_for_degree(group: GaugeGroup, degree: usize) -> Result<Self> {
        match group {
            GaugeGroup::SO(2) => Self::so2_trapezoid(degree + 1),
            GaugeGroup::SO(3) => Self::so3_euler(degree + 1, degree / 2 + 1),
            GaugeGroup::SO(n) => Err(Error::Unsupported(format!(
                "no deterministic exact rule for SO({n}); use Monte Carlo"
            ))),
        }
    }

    /// Rule exact for every block of the model's truncated space.
    pub fn exact_for_model(model: &GaugeModel) -> Result<Self> {
        Self::exact_for_degree(model.group(), model.cutoff())
    }

    pub fn group(&self) -> GaugeGroup {
        self.group
    }

    pub fn rule(&self) -> &HaarRule {
        &self.rule
    }

    pub fn nodes(&self) -> &[HaarNode] {
        &self.nodes
    }

    pub fn is_monte_carlo(&self) -> bool {
        matches!(self.rule, HaarRule::MonteCarlo { .. })
    }

    pub fn check_group(&self, model: &GaugeModel) -> Result<()> {
        if self.group == model.group() {
            Ok(())
        } else {
            Err(Error::GroupMismatch {
                quadrature: self.group.to_string(),
                model: model.group().to_string(),
            })
        }
    }

    pub fn weight_sum(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }

    /// Max-norm of the averaged defining representation; it vanishes for an
    /// exact rule because the defining representation has no invariant
    /// vectors.
    pub fn averaged_rep_norm(&self) -> f64 {
        let GaugeGroup::SO(n) = self.group;
        let mut avg = DMatrix::<f64>::zeros(n, n);
        for node in &self.nodes {
            avg += &node.rotation * node.weight;
        }
        avg.amax()
    }
}
