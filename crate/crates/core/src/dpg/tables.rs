//! Reference tabulations shared by all elements of one discretization.

use crate::basis::{
    ref_edge_point, RtBasis, ScalarBasis, ScalarBasisSet, TraceBasis, TraceContinuity, VectorBasisSet,
    EdgeBasisSet, REF_EDGE_NORMALS,
};
use crate::quadrature::{quadrature_rule, QuadDomain, QuadratureRule};

/// Tabulations at the element and edge quadrature points, built once and
/// then shared read-only between element workers.
#[derive(Debug, Clone)]
pub struct ReferenceTables {
    pub trial_degree: usize,
    pub test_degree: usize,
    pub rule: QuadratureRule,
    pub edge_rule: QuadratureRule,
    pub trial_scalar: ScalarBasisSet,
    pub trial_rt: VectorBasisSet,
    pub test_scalar: ScalarBasisSet,
    pub test_rt: VectorBasisSet,
    /// Test scalar basis on each reference edge, at the edge rule points.
    pub test_scalar_edge: [ScalarBasisSet; 4],
    /// Reference normal component `q̂ · n̂` of the test RT basis on each
    /// reference edge, point-major.
    pub test_rt_flux_edge: [Vec<f64>; 4],
    /// Continuous degree `p + 1` trace basis at the edge rule points.
    pub kinematic_trace: EdgeBasisSet,
    /// Per-edge Legendre degree `p` trace basis at the edge rule points.
    pub flux_trace: EdgeBasisSet,
}

impl ReferenceTables {
    pub fn new(trial_degree: usize, test_degree: usize, quad_points: usize) -> Self {
        let rule = quadrature_rule(quad_points, QuadDomain::Square);
        let edge_rule = quadrature_rule(quad_points, QuadDomain::Segment);
        let trial_scalar = ScalarBasis::new(trial_degree).tabulate(&rule.points);
        let trial_rt = RtBasis::new(trial_degree).tabulate(&rule.points);
        let test_s = ScalarBasis::new(test_degree);
        let test_v = RtBasis::new(test_degree);
        let test_scalar = test_s.tabulate(&rule.points);
        let test_rt = test_v.tabulate(&rule.points);

        let edge_points =
            |e: usize| -> Vec<[f64; 2]> { edge_rule.points.iter().map(|p| ref_edge_point(e, p[0])).collect() };
        let test_scalar_edge = std::array::from_fn(|e| test_s.tabulate(&edge_points(e)));
        let test_rt_flux_edge = std::array::from_fn(|e| {
            let n = REF_EDGE_NORMALS[e];
            let t = test_v.tabulate(&edge_points(e));
            t.values.iter().map(|v| v[0] * n[0] + v[1] * n[1]).collect()
        });
        let params: Vec<f64> = edge_rule.points.iter().map(|p| p[0]).collect();
        let kinematic_trace = TraceBasis::new(trial_degree + 1, TraceContinuity::VertexContinuous).tabulate(&params);
        let flux_trace = TraceBasis::new(trial_degree, TraceContinuity::Discontinuous).tabulate(&params);

        Self {
            trial_degree,
            test_degree,
            rule,
            edge_rule,
            trial_scalar,
            trial_rt,
            test_scalar,
            test_rt,
            test_scalar_edge,
            test_rt_flux_edge,
            kinematic_trace,
            flux_trace,
        }
    }

    pub fn n_quad(&self) -> usize {
        self.rule.len()
    }

    pub fn n_edge_quad(&self) -> usize {
        self.edge_rule.len()
    }
}
