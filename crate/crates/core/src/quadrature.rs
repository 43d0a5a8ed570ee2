//! Gauss-Legendre quadrature on [-1, 1].

use nalgebra::{DMatrix, SymmetricEigen};

/// Nodes and weights of an `order`-point Gauss-Legendre rule.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Golub-Welsch start, polished with Newton steps on `P_n`.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be positive");
        let n = order;
        let mut jac = DMatrix::<f64>::zeros(n, n);
        for k in 1..n {
            let kf = k as f64;
            let b = kf / (4.0 * kf * kf - 1.0).sqrt();
            jac[(k - 1, k)] = b;
            jac[(k, k - 1)] = b;
        }
        let eig = SymmetricEigen::new(jac);
        let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());

        let mut weights = Vec::with_capacity(n);
        for x in nodes.iter_mut() {
            for _ in 0..3 {
                let (p, dp) = legendre_with_derivative(n, *x);
                *x -= p / dp;
            }
            let (_, dp) = legendre_with_derivative(n, *x);
            weights.push(2.0 / ((1.0 - *x * *x) * dp * dp));
        }
        GaussLegendre { nodes, weights }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 32, 128, 256] {
            let q = GaussLegendre::new(n);
            let s: f64 = q.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n} sum={s}");
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let q = GaussLegendre::new(6);
        for deg in 0..12 {
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            let got = q.integrate(|x| x.powi(deg));
            assert!((got - exact).abs() < 1e-14, "deg={deg}");
        }
    }

    #[test]
    fn three_point_nodes() {
        let q = GaussLegendre::new(3);
        let r = (0.6f64).sqrt();
        assert!((q.nodes[0] + r).abs() < 1e-15);
        assert!(q.nodes[1].abs() < 1e-15);
        assert!((q.weights[1] - 8.0 / 9.0).abs() < 1e-15);
    }
}
