//! One-dimensional Gauss rules via the Golub–Welsch eigenvalue method.

use nalgebra::{DMatrix, SymmetricEigen};

/// Nodes and weights of a one-dimensional quadrature rule.
#[derive(Debug, Clone)]
pub struct Rule1d {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn golub_welsch(off_diagonal: impl Fn(usize) -> f64, n: usize, mu0: f64) -> Rule1d {
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = off_diagonal(k);
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Rule1d {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

/// Gauss–Legendre rule on [-1, 1]; exact for polynomials of degree ≤ 2n−1.
pub fn gauss_legendre(n: usize) -> Rule1d {
    assert!(n >= 1, "Gauss-Legendre needs at least one node");
    golub_welsch(
        |k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        },
        n,
        2.0,
    )
}

/// Gauss–Hermite rule for the weight `exp(-x^2)` on the real line.
pub fn gauss_hermite(n: usize) -> Rule1d {
    assert!(n >= 1, "Gauss-Hermite needs at least one node");
    golub_welsch(|k| (k as f64 / 2.0).sqrt(), n, std::f64::consts::PI.sqrt())
}

/// Equally weighted periodic trapezoid nodes on [0, 2π); exact for trigonometric
/// polynomials of degree < n.
pub fn periodic_trapezoid(n: usize) -> Rule1d {
    assert!(n >= 1, "trapezoid rule needs at least one node");
    let h = 2.0 * std::f64::consts::PI / n as f64;
    Rule1d {
        nodes: (0..n).map(|k| k as f64 * h).collect(),
        weights: vec![1.0 / n as f64; n],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let rule = gauss_legendre(4);
        // ∫ x^6 dx over [-1,1] = 2/7
        let got: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(x, w)| w * x.powi(6))
            .sum();
        assert!((got - 2.0 / 7.0).abs() < 1e-14);
    }

    #[test]
    fn hermite_moments() {
        let rule = gauss_hermite(6);
        let m0: f64 = rule.weights.iter().sum();
        let m2: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(x, w)| w * x * x)
            .sum();
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert!((m0 - sqrt_pi).abs() < 1e-13);
        assert!((m2 - sqrt_pi / 2.0).abs() < 1e-13);
    }

    #[test]
    fn trapezoid_kills_low_frequencies() {
        let rule = periodic_trapezoid(5);
        for freq in 1..5 {
            let s: f64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(t, w)| w * (freq as f64 * t).cos())
                .sum();
            assert!(s.abs() < 1e-14);
        }
    }
}
