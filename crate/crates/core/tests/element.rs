use dpg_plate::basis::{ref_edge_point, RtBasis, REF_EDGE_NORMALS};
use dpg_plate::benchmark::{chinosi_load, l2_projection};
use dpg_plate::dpg::{condense_element, condense_normal, element_load, normal_equations, ReferenceTables, TestLayout};
use dpg_plate::mesh::piola_transform;
use dpg_plate::quadrature::{quadrature_rule, QuadDomain};
use dpg_plate::*;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};

fn plate(t: f64) -> MaterialParams {
    MaterialParams::new(t, 0.3, 5.0 / 6.0).unwrap()
}

fn trapezoids() -> Mesh {
    generate_mesh(2, MeshKind::Trapezoidal, 0.25).unwrap()
}

fn no_load(_: f64, _: f64) -> f64 {
    0.0
}

fn load(x: f64, y: f64) -> f64 {
    chinosi_load(x, y, 0.3)
}

fn random_vector(n: usize, seed: u64) -> DVector<f64> {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
}

#[test]
fn element_dimensions_at_degree_one() {
    let mesh = trapezoids();
    let solver = DpgSolver::new(&mesh, plate(0.1), DpgConfig::default()).unwrap();
    let sys = solver.element_system(0, &Sources::pressure(&load)).unwrap();
    assert_eq!((sys.b.nrows(), sys.b.ncols()), (280, 100));
    assert_eq!(sys.n_interior(), 52);
    assert_eq!(sys.n_trace(), 48);
    let g = sys.gram.to_full(&sys.test);
    assert_eq!((g.nrows(), g.ncols()), (280, 280));
    assert_eq!(sys.test.block_sizes(), [60, 120, 25, 50, 25]);
    assert_eq!(sys.load.len(), 280);
}

#[test]
fn gram_is_symmetric_positive_definite() {
    let mesh = trapezoids();
    let solver = DpgSolver::new(&mesh, plate(0.1), DpgConfig::default()).unwrap();
    for e in 0..mesh.num_elements() {
        let sys = solver.element_system(e, &Sources::pressure(&no_load)).unwrap();
        let g = sys.gram.to_full(&sys.test);
        assert!((&g - g.transpose()).amax() < 1e-14 * g.amax());
        let eig = SymmetricEigen::new(g).eigenvalues;
        assert!(eig.min() > 0.0, "element {e}: min eigenvalue {}", eig.min());
    }
}

#[test]
fn h1_gram_of_unit_function_is_area() {
    let mesh = trapezoids();
    let solver = DpgSolver::new(&mesh, plate(0.1), DpgConfig::default()).unwrap();
    for e in 0..mesh.num_elements() {
        let sys = solver.element_system(e, &Sources::pressure(&no_load)).unwrap();
        let ones = DVector::from_element(sys.test.n_scalar(), 1.0);
        let area = (ones.transpose() * &sys.gram.h1 * &ones)[(0, 0)];
        assert!((area - mesh.elements[e].area()).abs() < 1e-13 * area, "{area}");
    }
}

#[test]
fn unit_deflection_with_matching_trace_is_annihilated() {
    // (w, ∇·q) − ⟨ŵ, q·n⟩ vanishes for w = ŵ = 1.
    let mesh = trapezoids();
    let solver = DpgSolver::new(&mesh, plate(0.1), DpgConfig::default()).unwrap();
    let l = solver.trial;
    for e in 0..mesh.num_elements() {
        let sys = solver.element_system(e, &Sources::pressure(&no_load)).unwrap();
        let mut u = DVector::zeros(l.n_total());
        u.rows_mut(l.w(), l.n_scalar()).fill(1.0);
        let kin = l.n_interior() + l.kinematic(0);
        u.rows_mut(kin, l.n_kinematic_local()).fill(1.0);
        let bu = &sys.b * &u;
        assert!(bu.amax() < 1e-13, "element {e}: {}", bu.amax());

        // the same holds for each rotation component on its τ row
        for c in 0..2 {
            let mut u = DVector::zeros(l.n_total());
            u.rows_mut(l.psi(c), l.n_scalar()).fill(1.0);
            let kin = l.n_interior() + l.kinematic(1 + c);
            u.rows_mut(kin, l.n_kinematic_local()).fill(1.0);
            let bu = &sys.b * &u;
            let tau = bu.rows(sys.test.tau(c), sys.test.n_rt());
            assert!(tau.amax() < 1e-13, "element {e}, component {c}: {}", tau.amax());
        }
    }
}

#[test]
fn rotation_moment_pairs_with_asymmetry_test_block() {
    // With M = J the s rows are (M, sJ)_K = 2∫_K s.
    let mesh = trapezoids();
    let solver = DpgSolver::new(&mesh, plate(0.1), DpgConfig::default()).unwrap();
    let j = |_: f64, _: f64| FieldValues {
        m: [[0.0, 1.0], [-1.0, 0.0]],
        ..Default::default()
    };
    let proj = l2_projection(&solver, &j).unwrap();
    let l = solver.trial;
    for e in 0..mesh.num_elements() {
        let sys = solver.element_system(e, &Sources::pressure(&no_load)).unwrap();
        let mut u = DVector::zeros(l.n_total());
        u.rows_mut(0, l.n_interior()).copy_from(&proj.interior[e]);
        let bu = &sys.b * &u;
        let ones = DVector::from_element(sys.test.n_scalar(), 1.0);
        let expect = (&sys.gram.l2 * ones) * 2.0;
        let got = bu.rows(sys.test.s(), sys.test.n_scalar());
        assert!((got - &expect).amax() < 1e-12, "element {e}");
    }
}

#[test]
fn compliance_block_matches_physical_space_assembly() {
    // Independent evaluation: Piola-map every basis function pointwise and
    // integrate C⁻¹M : τ in physical coordinates with a finer rule.
    let mesh = trapezoids();
    let mat = plate(0.1);
    let solver = DpgSolver::new(&mesh, mat, DpgConfig::default()).unwrap();
    let (trial_rt, test_rt) = (RtBasis::new(1), RtBasis::new(4));
    let rule = quadrature_rule(12, QuadDomain::Square);
    let l = solver.trial;
    let te = solver.test;
    for e in [0, 3] {
        let sys = solver.element_system(e, &Sources::pressure(&no_load)).unwrap();
        let elem = &mesh.elements[e];
        let mut oracle = DMatrix::<f64>::zeros(2 * te.n_rt(), 2 * l.n_rt());
        for (k, &p) in rule.points.iter().enumerate() {
            let map = elem.map(p);
            let w = rule.weights[k] * map.det;
            let (v, _) = trial_rt.eval(p);
            let (q, _) = test_rt.eval(p);
            let v: Vec<_> = v.iter().map(|&v| piola_transform(elem, p, v)).collect();
            let q: Vec<_> = q.iter().map(|&q| piola_transform(elem, p, q)).collect();
            for m_row in 0..2 {
                for (a, va) in v.iter().enumerate() {
                    let mut m = [[0.0; 2]; 2];
                    m[m_row] = *va;
                    let cm = compliance_inverse(m, mat.poisson);
                    for t_row in 0..2 {
                        for (b, qb) in q.iter().enumerate() {
                            oracle[(t_row * te.n_rt() + b, m_row * l.n_rt() + a)] +=
                                w * (cm[t_row][0] * qb[0] + cm[t_row][1] * qb[1]);
                        }
                    }
                }
            }
        }
        let block = sys.b.view((te.tau(0), l.m(0)), (2 * te.n_rt(), 2 * l.n_rt()));
        let diff = (block - &oracle).amax() / oracle.amax();
        // The element integrand is rational on trapezoids; both rules are
        // inexact there, so only quadrature-level agreement is expected.
        let tol = if mesh.elements[e].is_affine { 1e-12 } else { 1e-6 };
        assert!(diff < tol, "element {e}: {diff:e}");
    }
}

#[test]
fn piola_preserves_weighted_edge_fluxes() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    let mesh = trapezoids();
    let basis = RtBasis::new(1);
    let seg = quadrature_rule(10, QuadDomain::Segment);
    let coeffs: Vec<f64> = (0..basis.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let gamma: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
    let g = |s: f64| gamma[0] + gamma[1] * s + gamma[2] * s * s;
    let q_hat = |p: [f64; 2]| {
        let (v, _) = basis.eval(p);
        v.iter().zip(&coeffs).fold([0.0, 0.0], |acc, (v, c)| [acc[0] + c * v[0], acc[1] + c * v[1]])
    };
    let tangents = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
    for elem in &mesh.elements {
        for e in 0..4 {
            let (mut physical, mut reference) = (0.0, 0.0);
            for (k, pt) in seg.points.iter().enumerate() {
                let p = ref_edge_point(e, pt[0]);
                let w = seg.weights[k];
                let qh = q_hat(p);
                let n = REF_EDGE_NORMALS[e];
                reference += w * (qh[0] * n[0] + qh[1] * n[1]) * g(pt[0]);
                let map = elem.map(p);
                let t = tangents[e];
                let dx = [
                    map.jac[0][0] * t[0] + map.jac[0][1] * t[1],
                    map.jac[1][0] * t[0] + map.jac[1][1] * t[1],
                ];
                let n_ds = [dx[1], -dx[0]];
                let q = piola_transform(elem, p, qh);
                physical += w * (q[0] * n_ds[0] + q[1] * n_ds[1]) * g(pt[0]);
            }
            assert!((physical - reference).abs() < 1e-12, "{physical} vs {reference}");
        }
    }
}

fn worst_load_error(mesh: &Mesh, points: usize) -> f64 {
    let test = TestLayout::new(4);
    let coarse = ReferenceTables::new(1, 4, points);
    let fine = ReferenceTables::new(1, 4, 30);
    let mut worst: f64 = 0.0;
    for e in 0..mesh.num_elements() {
        let a = element_load(mesh, e, &test, &Sources::pressure(&load), &coarse).unwrap();
        let b = element_load(mesh, e, &test, &Sources::pressure(&load), &fine).unwrap();
        let z = b.rows(test.z(), test.n_scalar()).amax();
        assert_eq!(z, b.amax(), "pressure loads only the z block");
        worst = worst.max((&a - &b).amax() / b.amax());
    }
    worst
}

#[test]
fn load_agrees_with_refined_quadrature() {
    let default_points = DpgConfig::default().quadrature_points();
    for n in [1, 2, 4] {
        let mesh = generate_mesh(n, MeshKind::Uniform, 0.0).unwrap();
        let rel = worst_load_error(&mesh, default_points);
        assert!(rel < 1e-10, "uniform N={n}: {rel:e}");
    }
    // On trapezoids the pulled-back load has one more degree than the
    // default rule integrates exactly.
    let mesh = trapezoids();
    assert!(worst_load_error(&mesh, default_points) < 1e-5);
    assert!(worst_load_error(&mesh, default_points + 1) < 1e-10);
}

#[test]
fn unit_load_on_unit_element_gives_area() {
    let mesh = generate_mesh(1, MeshKind::Uniform, 0.0).unwrap();
    let test = TestLayout::new(4);
    let tables = ReferenceTables::new(1, 4, 6);
    let one = |_: f64, _: f64| 1.0;
    let l = element_load(&mesh, 0, &test, &Sources::pressure(&one), &tables).unwrap();
    let total: f64 = l.rows(test.z(), test.n_scalar()).sum();
    assert!((total - 1.0).abs() < 1e-14);
    let zero = element_load(&mesh, 0, &test, &Sources::pressure(&no_load), &tables).unwrap();
    assert_eq!(zero.amax(), 0.0);
}

#[test]
fn normal_equations_measure_the_residual_in_the_dual_norm() {
    let mesh = trapezoids();
    let solver = DpgSolver::new(&mesh, plate(0.1), DpgConfig::default()).unwrap();
    let sys = solver.element_system(1, &Sources::pressure(&load)).unwrap();
    let factors = sys.gram.factor(1).unwrap();
    let ne = normal_equations(&sys, &factors);
    let g_inv = sys.gram.to_full(&sys.test).try_inverse().unwrap();
    for seed in 0..5 {
        let u = random_vector(sys.trial.n_total(), seed);
        let bu = &sys.b * &u;
        let lhs = (u.transpose() * &ne.matrix * &u)[(0, 0)];
        let dense = (bu.transpose() * &g_inv * &bu)[(0, 0)];
        let whitened = factors.whiten(&sys.test, &DMatrix::from_column_slice(bu.len(), 1, bu.as_slice()));
        let rhs = whitened.norm_squared();
        assert!((lhs - rhs).abs() < 1e-9 * rhs, "{lhs} vs {rhs}");
        assert!((dense - rhs).abs() < 1e-9 * rhs, "{dense} vs {rhs}");
    }
}

#[test]
fn orthogonal_and_normal_condensation_agree() {
    let mesh = trapezoids();
    let solver = DpgSolver::new(&mesh, plate(0.1), DpgConfig::default()).unwrap();
    for e in 0..mesh.num_elements() {
        let sys = solver.element_system(e, &Sources::pressure(&load)).unwrap();
        let qr = condense_element(&sys, e).unwrap();
        let ne = normal_equations(&sys, &sys.gram.factor(e).unwrap());
        let normal = condense_normal(&ne, sys.n_interior(), e).unwrap();
        let scale = qr.schur.amax();
        assert!((&qr.schur - &normal.schur).amax() < 1e-8 * scale);
        assert!((&qr.rhs - &normal.rhs).amax() < 1e-8 * qr.rhs.amax());
        assert!((&qr.schur - qr.schur.transpose()).amax() < 1e-10 * scale);
        let eig = SymmetricEigen::new(qr.schur.clone()).eigenvalues;
        assert!(eig.min() > -1e-10 * scale, "Schur complement must be semidefinite");
    }
}

#[test]
fn zero_load_and_zero_traces_recover_zero_fields() {
    let mesh = trapezoids();
    let solver = DpgSolver::new(&mesh, plate(0.01), DpgConfig::default()).unwrap();
    let sys = solver.element_system(2, &Sources::pressure(&no_load)).unwrap();
    let cond = condense_element(&sys, 2).unwrap();
    assert_eq!(cond.rhs.amax(), 0.0);
    let fields = cond.recovery.interior(&DVector::zeros(sys.n_trace()));
    assert_eq!(fields.amax(), 0.0);
}
