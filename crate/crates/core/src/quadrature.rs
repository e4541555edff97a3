//! Gauss–Legendre rules on the reference segment `[-1, 1]` and their tensor
//! products on the reference square `[-1, 1]²`.

use crate::polynomials::legendre;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuadDomain {
    Segment,
    Square,
}

/// Points and positive weights. Segment points are stored as `[s, 0.0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub domain: QuadDomain,
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Integrates `f` over the reference domain.
    pub fn integrate(&self, mut f: impl FnMut([f64; 2]) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&pt, &w)| w * f(pt))
            .sum()
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "a Gauss rule needs at least one point");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// `n` points per direction on the given reference domain.
pub fn quadrature_rule(n: usize, domain: QuadDomain) -> QuadratureRule {
    let (nodes, weights) = gauss_legendre(n);
    match domain {
        QuadDomain::Segment => QuadratureRule {
            domain,
            points: nodes.iter().map(|&s| [s, 0.0]).collect(),
            weights,
        },
        QuadDomain::Square => {
            let mut points = Vec::with_capacity(n * n);
            let mut w2 = Vec::with_capacity(n * n);
            for (j, &eta) in nodes.iter().enumerate() {
                for (i, &xi) in nodes.iter().enumerate() {
                    points.push([xi, eta]);
                    w2.push(weights[i] * weights[j]);
                }
            }
            QuadratureRule {
                domain,
                points,
                weights: w2,
            }
        }
    }
}
