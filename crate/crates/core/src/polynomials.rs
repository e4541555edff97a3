//! One-dimensional polynomial families on `[-1, 1]`.

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
pub fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (vals, ders) = legendre_table(n, x);
    (vals[n], ders[n])
}

/// `P_0..=P_n` and their derivatives at `x`.
pub fn legendre_table(n: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    let mut p = vec![0.0; n + 1];
    let mut dp = vec![0.0; n + 1];
    p[0] = 1.0;
    if n >= 1 {
        p[1] = x;
        dp[1] = 1.0;
    }
    for k in 1..n {
        let kf = k as f64;
        p[k + 1] = ((2.0 * kf + 1.0) * x * p[k] - kf * p[k - 1]) / (kf + 1.0);
        dp[k + 1] = dp[k - 1] + (2.0 * kf + 1.0) * p[k];
    }
    (p, dp)
}

/// Legendre polynomials scaled to unit `L2(-1, 1)` norm.
pub fn orthonormal_legendre_table(n: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    let (mut p, mut dp) = legendre_table(n, x);
    for k in 0..=n {
        let s = ((2 * k + 1) as f64 / 2.0).sqrt();
        p[k] *= s;
        dp[k] *= s;
    }
    (p, dp)
}

/// Gauss–Lobatto–Legendre nodes for degree `r`: `r + 1` ascending points
/// including both endpoints. Degree 0 uses the midpoint.
pub fn gll_nodes(r: usize) -> Vec<f64> {
    match r {
        0 => return vec![0.0],
        1 => return vec![-1.0, 1.0],
        _ => {}
    }
    let mut nodes = vec![0.0; r + 1];
    nodes[0] = -1.0;
    nodes[r] = 1.0;
    let rr = (r * (r + 1)) as f64;
    for i in 1..r {
        // interior nodes are the roots of P_r'
        let mut x = -(std::f64::consts::PI * i as f64 / r as f64).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(r, x);
            let d2p = (2.0 * x * dp - rr * p) / (1.0 - x * x);
            let dx = dp / d2p;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
    }
    for i in 0..=r / 2 {
        let a = 0.5 * (nodes[r - i] - nodes[i]);
        nodes[i] = -a;
        nodes[r - i] = a;
    }
    if r % 2 == 0 {
        nodes[r / 2] = 0.0;
    }
    nodes
}

/// Lagrange interpolation basis on a fixed node set.
#[derive(Debug, Clone)]
pub struct LagrangeBasis {
    nodes: Vec<f64>,
    denoms: Vec<f64>,
}

impl LagrangeBasis {
    pub fn new(nodes: Vec<f64>) -> Self {
        let denoms = (0..nodes.len())
            .map(|j| {
                nodes
                    .iter()
                    .enumerate()
                    .filter(|&(m, _)| m != j)
                    .map(|(_, &xm)| nodes[j] - xm)
                    .product()
            })
            .collect();
        Self { nodes, denoms }
    }

    /// Nodal basis of degree `r` at the GLL points.
    pub fn gll(r: usize) -> Self {
        Self::new(gll_nodes(r))
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Values and first derivatives of every basis function at `x`.
    pub fn eval(&self, x: f64) -> (Vec<f64>, Vec<f64>) {
        let n = self.nodes.len();
        let mut vals = vec![0.0; n];
        let mut ders = vec![0.0; n];
        let diffs: Vec<f64> = self.nodes.iter().map(|&xm| x - xm).collect();
        for j in 0..n {
            let mut v = 1.0;
            for (m, d) in diffs.iter().enumerate() {
                if m != j {
                    v *= d;
                }
            }
            vals[j] = v / self.denoms[j];
            let mut dsum = 0.0;
            for k in 0..n {
                if k == j {
                    continue;
                }
                let mut prod = 1.0;
                for (m, d) in diffs.iter().enumerate() {
                    if m != j && m != k {
                        prod *= d;
                    }
                }
                dsum += prod;
            }
            ders[j] = dsum / self.denoms[j];
        }
        (vals, ders)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_known_values() {
        let (p, dp) = legendre(2, 0.5);
        assert!((p - (1.5 * 0.25 - 0.5)).abs() < 1e-15);
        assert!((dp - 1.5).abs() < 1e-15);
        let (p3, _) = legendre(3, 1.0);
        assert!((p3 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gll_nodes_are_roots_of_derivative() {
        for r in 2..=10 {
            let nodes = gll_nodes(r);
            assert_eq!(nodes.len(), r + 1);
            for &x in &nodes[1..r] {
                let (_, dp) = legendre(r, x);
                assert!(dp.abs() < 1e-11, "r={r} x={x} dp={dp}");
            }
            assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        }
        let n3 = gll_nodes(2);
        assert_eq!(n3, vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn lagrange_is_cardinal_and_reproduces_polynomials() {
        let basis = LagrangeBasis::gll(5);
        for (i, &xi) in basis.nodes().iter().enumerate() {
            let (v, _) = basis.eval(xi);
            for (j, vj) in v.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((vj - expect).abs() < 1e-13);
            }
        }
        // interpolate x^3 - 2x and compare value and slope
        let f = |x: f64| x.powi(3) - 2.0 * x;
        let df = |x: f64| 3.0 * x * x - 2.0;
        let coeffs: Vec<f64> = basis.nodes().iter().map(|&x| f(x)).collect();
        for &x in &[-0.9, -0.3, 0.1, 0.77] {
            let (v, d) = basis.eval(x);
            let val: f64 = v.iter().zip(&coeffs).map(|(a, b)| a * b).sum();
            let der: f64 = d.iter().zip(&coeffs).map(|(a, b)| a * b).sum();
            assert!((val - f(x)).abs() < 1e-13);
            assert!((der - df(x)).abs() < 1e-12);
        }
    }
}
