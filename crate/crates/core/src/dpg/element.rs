//! Element matrices of the ultra-weak form and the broken test-space Gram
//! matrix.
//!
//! Shear force `V` and the rows of the moment `M` are Piola-mapped from
//! `RT_p`; test functions `q` and the rows of `τ` are Piola-mapped from
//! `RT_r`. Several blocks become geometry-free after the change of
//! variables, e.g. `(V, ∇z)_K = ∫ V̂ · ∇̂ẑ` and `(w, ∇·q)_K = ∫ ŵ ∇̂·q̂`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::layout::{TestLayout, TrialLayout};
use super::tables::ReferenceTables;
use crate::error::{DpgError, Result};
use crate::material::{MaterialParams, Tensor2};
use crate::mesh::{Mesh, PointMap};

#[inline]
fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Diagonal blocks of the element Gram matrix. The `q` block is shared by
/// both rows of `τ`, the `z` block by both components of `φ`.
#[derive(Debug, Clone)]
pub struct GramBlocks {
    /// `(q, δq) + (∇·q, ∇·δq)`
    pub hdiv: DMatrix<f64>,
    /// `(z, δz) + (∇z, ∇δz)`
    pub h1: DMatrix<f64>,
    /// `(s, δs)`
    pub l2: DMatrix<f64>,
}

impl GramBlocks {
    /// The full block-diagonal test Gram matrix, ordered as [`TestLayout`].
    pub fn to_full(&self, test: &TestLayout) -> DMatrix<f64> {
        let n = test.n_total();
        let mut g = DMatrix::zeros(n, n);
        let (v, s) = (test.n_rt(), test.n_scalar());
        for off in [test.q(), test.tau(0), test.tau(1)] {
            g.view_mut((off, off), (v, v)).copy_from(&self.hdiv);
        }
        for off in [test.z(), test.phi(0), test.phi(1)] {
            g.view_mut((off, off), (s, s)).copy_from(&self.h1);
        }
        g.view_mut((test.s(), test.s()), (s, s)).copy_from(&self.l2);
        g
    }

    pub fn factor(&self, elem: usize) -> Result<GramFactors> {
        let chol = |m: &DMatrix<f64>, block| {
            Cholesky::new(m.clone()).ok_or(DpgError::IndefiniteGram { elem, block })
        };
        Ok(GramFactors {
            hdiv: chol(&self.hdiv, "H(div)")?,
            h1: chol(&self.h1, "H1")?,
            l2: chol(&self.l2, "L2")?,
        })
    }
}

/// Cholesky factors of the three distinct Gram blocks.
#[derive(Debug, Clone)]
pub struct GramFactors {
    hdiv: Cholesky<f64, Dyn>,
    h1: Cholesky<f64, Dyn>,
    l2: Cholesky<f64, Dyn>,
}

impl GramFactors {
    /// `G⁻¹ X` for a matrix with one row per test function.
    pub fn solve(&self, test: &TestLayout, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = x.clone();
        for (off, len, chol) in self.blocks(test) {
            let mut rows = out.rows_mut(off, len);
            chol.solve_mut(&mut rows);
        }
        out
    }

    /// `L⁻¹ X` with `G = L Lᵀ`, so that `(L⁻¹X)ᵀ(L⁻¹X) = Xᵀ G⁻¹ X`.
    pub fn whiten(&self, test: &TestLayout, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = x.clone();
        for (off, len, chol) in self.blocks(test) {
            let mut rows = out.rows_mut(off, len);
            chol.l_dirty().solve_lower_triangular_mut(&mut rows);
        }
        out
    }

    fn blocks(&self, test: &TestLayout) -> [(usize, usize, &Cholesky<f64, Dyn>); 7] {
        let (v, s) = (test.n_rt(), test.n_scalar());
        [
            (test.q(), v, &self.hdiv),
            (test.tau(0), v, &self.hdiv),
            (test.tau(1), v, &self.hdiv),
            (test.z(), s, &self.h1),
            (test.phi(0), s, &self.h1),
            (test.phi(1), s, &self.h1),
            (test.s(), s, &self.l2),
        ]
    }

    pub fn solve_vec(&self, test: &TestLayout, x: &DVector<f64>) -> DVector<f64> {
        let m = DMatrix::from_column_slice(x.len(), 1, x.as_slice());
        let y = self.solve(test, &m);
        DVector::from_column_slice(y.as_slice())
    }
}

/// Everything one element contributes before condensation.
#[derive(Debug, Clone)]
pub struct ElementSystem {
    /// Test × trial matrix. Trace columns already carry the edge orientation
    /// signs, so they refer directly to the global skeleton unknowns.
    pub b: DMatrix<f64>,
    pub gram: GramBlocks,
    pub load: DVector<f64>,
    pub trial: TrialLayout,
    pub test: TestLayout,
}

impl ElementSystem {
    pub fn n_interior(&self) -> usize {
        self.trial.n_interior()
    }

    pub fn n_trace(&self) -> usize {
        self.trial.n_trace()
    }
}

/// Maps and determinants at the element quadrature points.
pub(crate) fn element_maps(mesh: &Mesh, elem_id: usize, tables: &ReferenceTables) -> Result<Vec<PointMap>> {
    let elem = &mesh.elements[elem_id];
    tables
        .rule
        .points
        .iter()
        .map(|&p| {
            let m = elem.map(p);
            if m.det > 0.0 {
                Ok(m)
            } else {
                Err(DpgError::SingularGeometry { elem: elem_id, det: m.det })
            }
        })
        .collect()
}

/// Test × trial matrix `B_K` of the ultra-weak bilinear form on one element.
pub fn element_b_matrix(
    mesh: &Mesh,
    elem_id: usize,
    trial: &TrialLayout,
    test: &TestLayout,
    mat: &MaterialParams,
    tables: &ReferenceTables,
) -> Result<DMatrix<f64>> {
    let maps = element_maps(mesh, elem_id, tables)?;
    let n_int = trial.n_interior();
    let mut b = DMatrix::<f64>::zeros(test.n_total(), trial.n_total());
    let shear_c = mat.shear_compliance();
    let lambda = mat.poisson / (1.0 + mat.poisson);

    let (ntr_v, ntr_s) = (trial.n_rt(), trial.n_scalar());
    let (nte_v, nte_s) = (test.n_rt(), test.n_scalar());
    let mut jv = vec![[0.0; 2]; ntr_v];
    let mut jq = vec![[0.0; 2]; nte_v];

    for (k, map) in maps.iter().enumerate() {
        let wk = tables.rule.weights[k];
        let det = map.det;
        let v_hat = tables.trial_rt.values_at(k);
        let s_tr = tables.trial_scalar.values_at(k);
        let q_hat = tables.test_rt.values_at(k);
        let q_div = tables.test_rt.divergences_at(k);
        let z_val = tables.test_scalar.values_at(k);
        let z_grad = tables.test_scalar.gradients_at(k);
        for (a, v) in v_hat.iter().enumerate() {
            jv[a] = map.apply(*v);
        }
        for (b_, q) in q_hat.iter().enumerate() {
            jq[b_] = map.apply(*q);
        }
        let cw = wk / det;

        // q rows
        for a in 0..ntr_v {
            let col = trial.v() + a;
            for bq in 0..nte_v {
                b[(test.q() + bq, col)] += shear_c * cw * dot(jq[bq], jv[a]);
            }
        }
        for a in 0..ntr_s {
            let sa = wk * s_tr[a];
            for bq in 0..nte_v {
                b[(test.q() + bq, trial.w() + a)] += sa * q_div[bq];
                b[(test.q() + bq, trial.psi(0) + a)] += sa * jq[bq][0];
                b[(test.q() + bq, trial.psi(1) + a)] += sa * jq[bq][1];
            }
        }

        // τ rows
        for i in 0..2 {
            let row0 = test.tau(i);
            for m in 0..2 {
                let col0 = trial.m(m);
                for a in 0..ntr_v {
                    for bq in 0..nte_v {
                        let mut val = -6.0 * lambda * jv[a][m] * jq[bq][i];
                        if m == i {
                            val += 6.0 * dot(jv[a], jq[bq]);
                        }
                        b[(row0 + bq, col0 + a)] += cw * val;
                    }
                }
            }
            let rsign = if i == 0 { 1.0 } else { -1.0 };
            let other = 1 - i;
            for a in 0..ntr_s {
                let sa = wk * s_tr[a];
                for bq in 0..nte_v {
                    b[(row0 + bq, trial.psi(i) + a)] += sa * q_div[bq];
                    b[(row0 + bq, trial.r() + a)] += rsign * sa * jq[bq][other];
                }
            }
        }

        // z, φ and s rows
        for a in 0..ntr_v {
            let vh = v_hat[a];
            for bz in 0..nte_s {
                b[(test.z() + bz, trial.v() + a)] += wk * dot(vh, z_grad[bz]);
                b[(test.phi(0) + bz, trial.v() + a)] -= wk * jv[a][0] * z_val[bz];
                b[(test.phi(1) + bz, trial.v() + a)] -= wk * jv[a][1] * z_val[bz];
                b[(test.phi(0) + bz, trial.m(0) + a)] += wk * dot(vh, z_grad[bz]);
                b[(test.phi(1) + bz, trial.m(1) + a)] += wk * dot(vh, z_grad[bz]);
                b[(test.s() + bz, trial.m(0) + a)] += wk * z_val[bz] * jv[a][1];
                b[(test.s() + bz, trial.m(1) + a)] -= wk * z_val[bz] * jv[a][0];
            }
        }
    }

    // skeleton terms
    let elem = &mesh.elements[elem_id];
    let p = trial.degree;
    let n_eq = tables.n_edge_quad();
    for (le, &ge) in elem.edge_ids.iter().enumerate() {
        let geo = mesh.edge_geometry(ge, elem_id)?;
        debug_assert_eq!(geo.local_edge, le);
        let half = 0.5 * geo.length;
        let sigma = geo.outward_sign;
        let (start_v, end_v) = if geo.reversed { ((le + 1) % 4, le) } else { (le, (le + 1) % 4) };
        let kin_col = |node: usize| -> usize {
            if node == 0 {
                trial.kinematic_vertex(start_v)
            } else if node == p + 1 {
                trial.kinematic_vertex(end_v)
            } else {
                trial.kinematic_edge_node(le, node)
            }
        };
        let qn_all = &tables.test_rt_flux_edge[le];
        let ze_tab = &tables.test_scalar_edge[le];
        for k in 0..n_eq {
            let kg = if geo.reversed { n_eq - 1 - k } else { k };
            let wk = tables.edge_rule.weights[k];
            let kin = tables.kinematic_trace.values_at(kg);
            let flux = tables.flux_trace.values_at(kg);
            let qn = &qn_all[k * nte_v..(k + 1) * nte_v];
            let ze = ze_tab.values_at(k);
            for (node, &kv) in kin.iter().enumerate() {
                let local = kin_col(node);
                let c = -wk * kv;
                for comp in 0..3 {
                    let col = n_int + trial.kinematic(comp) + local;
                    let row0 = match comp {
                        0 => test.q(),
                        1 => test.tau(0),
                        _ => test.tau(1),
                    };
                    for bq in 0..nte_v {
                        b[(row0 + bq, col)] += c * qn[bq];
                    }
                }
            }
            for (j, &fv) in flux.iter().enumerate() {
                let local = trial.flux_edge(le, j);
                let c = -sigma * half * wk * fv;
                for comp in 0..3 {
                    let col = n_int + trial.flux(comp) + local;
                    let row0 = match comp {
                        0 => test.z(),
                        1 => test.phi(0),
                        _ => test.phi(1),
                    };
                    for bz in 0..nte_s {
                        b[(row0 + bz, col)] += c * ze[bz];
                    }
                }
            }
        }
    }
    Ok(b)
}

/// Gram blocks of the broken standard test norm on one element.
pub fn element_gram(mesh: &Mesh, elem_id: usize, tables: &ReferenceTables) -> Result<GramBlocks> {
    let maps = element_maps(mesh, elem_id, tables)?;
    let nv = tables.test_rt.dim;
    let ns = tables.test_scalar.dim;
    let mut hdiv = DMatrix::<f64>::zeros(nv, nv);
    let mut h1 = DMatrix::<f64>::zeros(ns, ns);
    let mut l2 = DMatrix::<f64>::zeros(ns, ns);
    let mut jq = vec![[0.0; 2]; nv];
    let mut gz = vec![[0.0; 2]; ns];
    for (k, map) in maps.iter().enumerate() {
        let wk = tables.rule.weights[k];
        let det = map.det;
        let q_hat = tables.test_rt.values_at(k);
        let div = tables.test_rt.divergences_at(k);
        let z = tables.test_scalar.values_at(k);
        for (a, q) in q_hat.iter().enumerate() {
            jq[a] = map.apply(*q);
        }
        for (a, g) in tables.test_scalar.gradients_at(k).iter().enumerate() {
            gz[a] = map.push_gradient(*g);
        }
        let cw = wk / det;
        for a in 0..nv {
            for b in a..nv {
                let v = cw * (dot(jq[a], jq[b]) + div[a] * div[b]);
                hdiv[(a, b)] += v;
            }
        }
        let dw = wk * det;
        for a in 0..ns {
            for b in a..ns {
                let m = dw * z[a] * z[b];
                l2[(a, b)] += m;
                h1[(a, b)] += m + dw * dot(gz[a], gz[b]);
            }
        }
    }
    for m in [&mut hdiv, &mut h1, &mut l2] {
        m.fill_lower_triangle_with_upper_triangle();
    }
    Ok(GramBlocks { hdiv, h1, l2 })
}

/// Right-hand sides of the four plate equations,
/// `κ⁻¹t²V − ∇w + ψ = f`, `C⁻¹M − ∇ψ + rJ = F`, `−∇·V = p`, `−∇·M − V = g`.
/// The physical problem has only the pressure `p`.
#[derive(Clone, Copy)]
pub struct Sources<'a> {
    pub pressure: &'a (dyn Fn(f64, f64) -> f64 + Sync),
    pub shear: Option<&'a (dyn Fn(f64, f64) -> [f64; 2] + Sync)>,
    pub curvature: Option<&'a (dyn Fn(f64, f64) -> Tensor2 + Sync)>,
    pub moment: Option<&'a (dyn Fn(f64, f64) -> [f64; 2] + Sync)>,
}

impl<'a> Sources<'a> {
    pub fn pressure(p: &'a (dyn Fn(f64, f64) -> f64 + Sync)) -> Self {
        Self {
            pressure: p,
            shear: None,
            curvature: None,
            moment: None,
        }
    }
}

impl std::fmt::Debug for Sources<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Sources")
            .field("shear", &self.shear.is_some())
            .field("curvature", &self.curvature.is_some())
            .field("moment", &self.moment.is_some())
            .finish()
    }
}

/// Load vector `(f, q)_K + (F, τ)_K + (p, z)_K + (g, φ)_K`.
pub fn element_load(
    mesh: &Mesh,
    elem_id: usize,
    test: &TestLayout,
    sources: &Sources<'_>,
    tables: &ReferenceTables,
) -> Result<DVector<f64>> {
    let maps = element_maps(mesh, elem_id, tables)?;
    let mut l = DVector::zeros(test.n_total());
    for (k, map) in maps.iter().enumerate() {
        let wk = tables.rule.weights[k];
        let (x, y) = (map.x[0], map.x[1]);
        let z = tables.test_scalar.values_at(k);
        let c = wk * map.det * (sources.pressure)(x, y);
        if c != 0.0 {
            for (a, za) in z.iter().enumerate() {
                l[test.z() + a] += c * za;
            }
        }
        if let Some(g) = sources.moment {
            let g = g(x, y);
            for (a, za) in z.iter().enumerate() {
                l[test.phi(0) + a] += wk * map.det * g[0] * za;
                l[test.phi(1) + a] += wk * map.det * g[1] * za;
            }
        }
        let q_hat = tables.test_rt.values_at(k);
        if let Some(f) = sources.shear {
            let f = f(x, y);
            for (a, q) in q_hat.iter().enumerate() {
                l[test.q() + a] += wk * dot(f, map.apply(*q));
            }
        }
        if let Some(ft) = sources.curvature {
            let ft = ft(x, y);
            for (a, q) in q_hat.iter().enumerate() {
                let jq = map.apply(*q);
                l[test.tau(0) + a] += wk * dot(ft[0], jq);
                l[test.tau(1) + a] += wk * dot(ft[1], jq);
            }
        }
    }
    Ok(l)
}

pub fn element_system(
    mesh: &Mesh,
    elem_id: usize,
    trial: &TrialLayout,
    test: &TestLayout,
    mat: &MaterialParams,
    sources: &Sources<'_>,
    tables: &ReferenceTables,
) -> Result<ElementSystem> {
    Ok(ElementSystem {
        b: element_b_matrix(mesh, elem_id, trial, test, mat, tables)?,
        gram: element_gram(mesh, elem_id, tables)?,
        load: element_load(mesh, elem_id, test, sources, tables)?,
        trial: *trial,
        test: *test,
    })
}
