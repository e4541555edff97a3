//! Reference-element bases on `[-1, 1]²` and their tabulations.
//!
//! * `Q_r`: tensor-product Lagrange basis at Gauss–Lobatto nodes.
//! * `RT_r = P_{r+1,r} × P_{r,r+1}`: the first component is `L_i(ξ) P_j(η)`
//!   with `L_i` the degree `r + 1` Gauss–Lobatto Lagrange basis and `P_j`
//!   orthonormal Legendre, the second component is the mirror image. Only
//!   the `L_i` attached to `ξ = ±1` see an edge, so `4(r + 1)` members carry a
//!   normal trace on exactly one edge and the rest are interior bubbles.
//! * Edge traces: orthonormal Legendre per edge (discontinuous) or Lobatto
//!   nodal with shared vertex nodes (continuous).
//!
//! Tables are stored point-major: entry `(point k, basis b)` lives at
//! `k * dim + b`.

use crate::polynomials::{orthonormal_legendre_table, LagrangeBasis};
use crate::quadrature::QuadratureRule;

/// Reference edges in counterclockwise order. Edge `e` runs from vertex `e`
/// to vertex `e + 1` of `(-1,-1), (1,-1), (1,1), (-1,1)`.
pub const REF_EDGE_NORMALS: [[f64; 2]; 4] = [[0.0, -1.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]];

/// Point on reference edge `edge` at local parameter `s ∈ [-1, 1]`.
pub fn ref_edge_point(edge: usize, s: f64) -> [f64; 2] {
    match edge {
        0 => [s, -1.0],
        1 => [1.0, s],
        2 => [-s, 1.0],
        3 => [-1.0, -s],
        _ => panic!("reference square has four edges, got {edge}"),
    }
}

pub fn scalar_dim(r: usize) -> usize {
    (r + 1) * (r + 1)
}

pub fn rt_dim(r: usize) -> usize {
    2 * (r + 1) * (r + 2)
}

#[derive(Debug, Clone)]
pub struct ScalarBasis {
    degree: usize,
    lagrange: LagrangeBasis,
}

impl ScalarBasis {
    pub fn new(degree: usize) -> Self {
        Self {
            degree,
            lagrange: LagrangeBasis::gll(degree),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        scalar_dim(self.degree)
    }

    /// Reference nodes, x fastest.
    pub fn nodes(&self) -> Vec<[f64; 2]> {
        let n = self.lagrange.nodes();
        let mut out = Vec::with_capacity(self.dim());
        for &y in n {
            for &x in n {
                out.push([x, y]);
            }
        }
        out
    }

    pub fn eval(&self, p: [f64; 2]) -> (Vec<f64>, Vec<[f64; 2]>) {
        let (vx, dx) = self.lagrange.eval(p[0]);
        let (vy, dy) = self.lagrange.eval(p[1]);
        let n = self.degree + 1;
        let mut vals = Vec::with_capacity(n * n);
        let mut grads = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                vals.push(vx[i] * vy[j]);
                grads.push([dx[i] * vy[j], vx[i] * dy[j]]);
            }
        }
        (vals, grads)
    }

    pub fn tabulate(&self, points: &[[f64; 2]]) -> ScalarBasisSet {
        let dim = self.dim();
        let mut values = Vec::with_capacity(points.len() * dim);
        let mut gradients = Vec::with_capacity(points.len() * dim);
        for &p in points {
            let (v, g) = self.eval(p);
            values.extend(v);
            gradients.extend(g);
        }
        ScalarBasisSet {
            degree: self.degree,
            dim,
            npoints: points.len(),
            values,
            gradients,
        }
    }
}

/// `Q_r` values and reference gradients at a point set.
#[derive(Debug, Clone)]
pub struct ScalarBasisSet {
    pub degree: usize,
    pub dim: usize,
    pub npoints: usize,
    pub values: Vec<f64>,
    pub gradients: Vec<[f64; 2]>,
}

impl ScalarBasisSet {
    pub fn values_at(&self, k: usize) -> &[f64] {
        &self.values[k * self.dim..(k + 1) * self.dim]
    }

    pub fn gradients_at(&self, k: usize) -> &[[f64; 2]] {
        &self.gradients[k * self.dim..(k + 1) * self.dim]
    }
}

/// Which tensor factor carries the Lobatto (edge-attached) direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RtMember {
    /// 0: `(L_i(ξ) P_j(η), 0)`, 1: `(0, P_i(ξ) L_j(η))`.
    pub component: usize,
    pub i: usize,
    pub j: usize,
    /// Reference edge carrying the normal trace, `None` for interior members.
    pub edge: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RtBasis {
    degree: usize,
    lobatto: LagrangeBasis,
    members: Vec<RtMember>,
}

impl RtBasis {
    pub fn new(degree: usize) -> Self {
        let r = degree;
        let mut members = Vec::with_capacity(rt_dim(r));
        // edge members, counterclockwise, ordered along the edge parameter
        for k in 0..=r {
            members.push(RtMember { component: 1, i: k, j: 0, edge: Some(0) });
        }
        for k in 0..=r {
            members.push(RtMember { component: 0, i: r + 1, j: k, edge: Some(1) });
        }
        for k in 0..=r {
            members.push(RtMember { component: 1, i: k, j: r + 1, edge: Some(2) });
        }
        for k in 0..=r {
            members.push(RtMember { component: 0, i: 0, j: k, edge: Some(3) });
        }
        for j in 0..=r {
            for i in 1..=r {
                members.push(RtMember { component: 0, i, j, edge: None });
            }
        }
        for j in 1..=r {
            for i in 0..=r {
                members.push(RtMember { component: 1, i, j, edge: None });
            }
        }
        debug_assert_eq!(members.len(), rt_dim(r));
        Self {
            degree,
            lobatto: LagrangeBasis::gll(r + 1),
            members,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[RtMember] {
        &self.members
    }

    /// Values and reference divergences at `p`.
    pub fn eval(&self, p: [f64; 2]) -> (Vec<[f64; 2]>, Vec<f64>) {
        let r = self.degree;
        let (lx, dlx) = self.lobatto.eval(p[0]);
        let (ly, dly) = self.lobatto.eval(p[1]);
        let px = orthonormal_legendre_table(r, p[0]).0;
        let py = orthonormal_legendre_table(r, p[1]).0;
        let mut vals = Vec::with_capacity(self.dim());
        let mut divs = Vec::with_capacity(self.dim());
        for m in &self.members {
            if m.component == 0 {
                vals.push([lx[m.i] * py[m.j], 0.0]);
                divs.push(dlx[m.i] * py[m.j]);
            } else {
                vals.push([0.0, px[m.i] * ly[m.j]]);
                divs.push(px[m.i] * dly[m.j]);
            }
        }
        (vals, divs)
    }

    pub fn tabulate(&self, points: &[[f64; 2]]) -> VectorBasisSet {
        let dim = self.dim();
        let mut values = Vec::with_capacity(points.len() * dim);
        let mut divergences = Vec::with_capacity(points.len() * dim);
        for &p in points {
            let (v, d) = self.eval(p);
            values.extend(v);
            divergences.extend(d);
        }
        VectorBasisSet {
            degree: self.degree,
            dim,
            npoints: points.len(),
            values,
            divergences,
        }
    }
}

/// `RT_r` values and reference divergences at a point set.
#[derive(Debug, Clone)]
pub struct VectorBasisSet {
    pub degree: usize,
    pub dim: usize,
    pub npoints: usize,
    pub values: Vec<[f64; 2]>,
    pub divergences: Vec<f64>,
}

impl VectorBasisSet {
    pub fn values_at(&self, k: usize) -> &[[f64; 2]] {
        &self.values[k * self.dim..(k + 1) * self.dim]
    }

    pub fn divergences_at(&self, k: usize) -> &[f64] {
        &self.divergences[k * self.dim..(k + 1) * self.dim]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TraceContinuity {
    /// Independent polynomials on each edge.
    Discontinuous,
    /// Continuous around the element boundary; vertex nodes are shared.
    VertexContinuous,
}

/// One-edge trace basis evaluated at points of the edge parameter.
///
/// For the continuous variant, member 0 is attached to the edge start
/// (`s = -1`), member `r` to the edge end, members in between vanish at
/// both vertices.
#[derive(Debug, Clone)]
pub struct EdgeBasisSet {
    pub degree: usize,
    pub continuity: TraceContinuity,
    /// Functions per edge.
    pub per_edge: usize,
    pub npoints: usize,
    pub values: Vec<f64>,
}

impl EdgeBasisSet {
    /// Dimension of the trace space on the boundary of one quadrilateral.
    pub fn boundary_dim(&self) -> usize {
        match self.continuity {
            TraceContinuity::Discontinuous => 4 * (self.degree + 1),
            TraceContinuity::VertexContinuous => 4 * self.degree,
        }
    }

    pub fn values_at(&self, k: usize) -> &[f64] {
        &self.values[k * self.per_edge..(k + 1) * self.per_edge]
    }
}

/// Evaluates one edge's trace basis at arbitrary edge parameters.
#[derive(Debug, Clone)]
pub struct TraceBasis {
    degree: usize,
    continuity: TraceContinuity,
    lagrange: Option<LagrangeBasis>,
}

impl TraceBasis {
    pub fn new(degree: usize, continuity: TraceContinuity) -> Self {
        let lagrange = match continuity {
            TraceContinuity::Discontinuous => None,
            TraceContinuity::VertexContinuous => {
                assert!(degree >= 1, "continuous traces need degree >= 1");
                Some(LagrangeBasis::gll(degree))
            }
        };
        Self {
            degree,
            continuity,
            lagrange,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn continuity(&self) -> TraceContinuity {
        self.continuity
    }

    pub fn per_edge(&self) -> usize {
        self.degree + 1
    }

    pub fn eval(&self, s: f64) -> Vec<f64> {
        match &self.lagrange {
            None => orthonormal_legendre_table(self.degree, s).0,
            Some(l) => l.eval(s).0,
        }
    }

    pub fn tabulate(&self, params: &[f64]) -> EdgeBasisSet {
        let mut values = Vec::with_capacity(params.len() * self.per_edge());
        for &s in params {
            values.extend(self.eval(s));
        }
        EdgeBasisSet {
            degree: self.degree,
            continuity: self.continuity,
            per_edge: self.per_edge(),
            npoints: params.len(),
            values,
        }
    }
}

pub fn scalar_basis(r: usize, rule: &QuadratureRule) -> ScalarBasisSet {
    ScalarBasis::new(r).tabulate(&rule.points)
}

pub fn rt_basis(r: usize, rule: &QuadratureRule) -> VectorBasisSet {
    RtBasis::new(r).tabulate(&rule.points)
}

/// Trace basis tabulated at the Gauss points of `rule` (a segment rule).
pub fn trace_basis(r: usize, continuity: TraceContinuity, rule: &QuadratureRule) -> EdgeBasisSet {
    let params: Vec<f64> = rule.points.iter().map(|p| p[0]).collect();
    TraceBasis::new(r, continuity).tabulate(&params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{quadrature_rule, QuadDomain};
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};

    fn gram<F: Fn(usize, usize, usize) -> f64>(dim: usize, rule: &QuadratureRule, f: F) -> DMatrix<f64> {
        let mut g = DMatrix::zeros(dim, dim);
        for (k, &w) in rule.weights.iter().enumerate() {
            for a in 0..dim {
                for b in 0..dim {
                    g[(a, b)] += w * f(k, a, b);
                }
            }
        }
        g
    }

    #[test]
    fn dimensions() {
        let rule = quadrature_rule(3, QuadDomain::Square);
        assert_eq!(scalar_basis(1, &rule).dim, 4);
        assert_eq!(scalar_basis(4, &rule).dim, 25);
        assert_eq!(rt_basis(0, &rule).dim, 4);
        assert_eq!(rt_basis(1, &rule).dim, 12);
        assert_eq!(rt_basis(4, &rule).dim, 60);
        for r in 0..=6 {
            assert_eq!(ScalarBasis::new(r).dim(), (r + 1) * (r + 1));
            assert_eq!(RtBasis::new(r).dim(), 2 * (r + 1) * (r + 2));
        }
        let seg = quadrature_rule(3, QuadDomain::Segment);
        assert_eq!(trace_basis(1, TraceContinuity::Discontinuous, &seg).boundary_dim(), 8);
        assert_eq!(trace_basis(2, TraceContinuity::VertexContinuous, &seg).boundary_dim(), 8);
    }

    #[test]
    fn nodal_partition_of_unity() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for r in 1..=6 {
            let b = ScalarBasis::new(r);
            for _ in 0..20 {
                let p = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
                let (v, g) = b.eval(p);
                assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                let gs = g.iter().fold([0.0, 0.0], |a, x| [a[0] + x[0], a[1] + x[1]]);
                assert!(gs[0].abs() < 1e-10 && gs[1].abs() < 1e-10);
            }
        }
    }

    #[test]
    fn bilinear_interpolation_reproduces_xy() {
        let b = ScalarBasis::new(1);
        let coeffs: Vec<f64> = b.nodes().iter().map(|n| n[0] * n[1]).collect();
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..50 {
            let p = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let (v, _) = b.eval(p);
            let val: f64 = v.iter().zip(&coeffs).map(|(a, c)| a * c).sum();
            assert!((val - p[0] * p[1]).abs() < 1e-13);
        }
    }

    #[test]
    fn rt_divergence_matches_finite_differences() {
        let h = 1e-5;
        for r in 0..=4 {
            let b = RtBasis::new(r);
            for &p in &[[0.1, -0.3], [0.55, 0.42], [-0.7, 0.8]] {
                let (_, div) = b.eval(p);
                let (xp, _) = b.eval([p[0] + h, p[1]]);
                let (xm, _) = b.eval([p[0] - h, p[1]]);
                let (yp, _) = b.eval([p[0], p[1] + h]);
                let (ym, _) = b.eval([p[0], p[1] - h]);
                for m in 0..b.dim() {
                    let fd = (xp[m][0] - xm[m][0] + yp[m][1] - ym[m][1]) / (2.0 * h);
                    assert!((fd - div[m]).abs() < 1e-6, "r={r} m={m}: {fd} vs {}", div[m]);
                }
            }
        }
    }

    #[test]
    fn rt_edge_members_have_single_edge_normal_trace() {
        let rule = quadrature_rule(8, QuadDomain::Segment);
        for r in 0..=4 {
            let b = RtBasis::new(r);
            let edge_members = b.members().iter().filter(|m| m.edge.is_some()).count();
            assert_eq!(edge_members, 4 * (r + 1));
            for e in 0..4 {
                for &pt in &rule.points {
                    let (v, _) = b.eval(ref_edge_point(e, pt[0]));
                    let n = REF_EDGE_NORMALS[e];
                    for (m, mem) in b.members().iter().enumerate() {
                        let flux = v[m][0] * n[0] + v[m][1] * n[1];
                        if mem.edge != Some(e) {
                            assert!(flux.abs() < 1e-13, "r={r} e={e} m={m}");
                        }
                    }
                }
            }
        }
    }

    /// Least-squares fit of `samples` onto `basis` columns; returns max residual.
    fn fit_residual(basis: &DMatrix<f64>, samples: &[f64]) -> f64 {
        let rhs = nalgebra::DVector::from_column_slice(samples);
        let svd = basis.clone().svd(true, true);
        let c = svd.solve(&rhs, 1e-14).unwrap();
        (basis * c - rhs).amax()
    }

    #[test]
    fn rt_divergence_lies_in_q_r() {
        for r in 0..=5 {
            let b = RtBasis::new(r);
            let q = ScalarBasis::new(r);
            let rule = quadrature_rule(r + 3, QuadDomain::Square);
            let qt = q.tabulate(&rule.points);
            let bt = b.tabulate(&rule.points);
            let vand = DMatrix::from_fn(rule.len(), qt.dim, |k, j| qt.values_at(k)[j]);
            for m in 0..b.dim() {
                let samples: Vec<f64> = (0..rule.len()).map(|k| bt.divergences_at(k)[m]).collect();
                let scale = samples.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
                let res = fit_residual(&vand, &samples) / scale;
                assert!(res < 1e-10, "r={r} m={m} res={res:e}");
            }
        }
    }

    #[test]
    fn rt_normal_trace_has_degree_r() {
        let seg = quadrature_rule(10, QuadDomain::Segment);
        for r in 0..=5 {
            let b = RtBasis::new(r);
            let leg = TraceBasis::new(r, TraceContinuity::Discontinuous);
            let vand = DMatrix::from_fn(seg.len(), r + 1, |k, j| leg.eval(seg.points[k][0])[j]);
            for e in 0..4 {
                let n = REF_EDGE_NORMALS[e];
                for m in 0..b.dim() {
                    let samples: Vec<f64> = seg
                        .points
                        .iter()
                        .map(|pt| {
                            let (v, _) = b.eval(ref_edge_point(e, pt[0]));
                            v[m][0] * n[0] + v[m][1] * n[1]
                        })
                        .collect();
                    assert!(fit_residual(&vand, &samples) < 1e-12, "r={r} e={e} m={m}");
                }
            }
        }
    }

    #[test]
    fn legendre_trace_mass_is_diagonal() {
        let seg = quadrature_rule(6, QuadDomain::Segment);
        let t = trace_basis(1, TraceContinuity::Discontinuous, &seg);
        let g = gram(2, &seg, |k, a, b| t.values_at(k)[a] * t.values_at(k)[b]);
        assert!(g[(0, 1)].abs() < 1e-14 && g[(1, 0)].abs() < 1e-14);
        let t4 = trace_basis(4, TraceContinuity::Discontinuous, &seg);
        let g4 = gram(5, &seg, |k, a, b| t4.values_at(k)[a] * t4.values_at(k)[b]);
        for a in 0..5 {
            for b in 0..5 {
                if a != b {
                    assert!(g4[(a, b)].abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn continuous_trace_vertex_nodes() {
        let t = TraceBasis::new(3, TraceContinuity::VertexContinuous);
        let a = t.eval(-1.0);
        let b = t.eval(1.0);
        assert!((a[0] - 1.0).abs() < 1e-14 && a[1..].iter().all(|v| v.abs() < 1e-14));
        assert!((b[3] - 1.0).abs() < 1e-14 && b[..3].iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn gram_matrices_are_nonsingular() {
        for r in 0..=6 {
            let rule = quadrature_rule(r + 3, QuadDomain::Square);
            let s = scalar_basis(r, &rule);
            let g = gram(s.dim, &rule, |k, a, b| s.values_at(k)[a] * s.values_at(k)[b]);
            let v = rt_basis(r, &rule);
            let gv = gram(v.dim, &rule, |k, a, b| {
                let (x, y) = (v.values_at(k)[a], v.values_at(k)[b]);
                x[0] * y[0] + x[1] * y[1]
            });
            for m in [g, gv] {
                let d = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] / (m[(i, i)] * m[(j, j)]).sqrt());
                let sv = d.singular_values();
                assert!(sv.min() > 1e-10, "r={r}: {}", sv.min());
            }
        }
    }
}
