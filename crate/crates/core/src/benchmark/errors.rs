//! `L2` errors of discrete fields against closed-form fields.

use std::fmt;

use nalgebra::{Cholesky, DVector};
use rayon::prelude::*;

use super::exact::PlateField;
use crate::dpg::{DpgSolver, FieldValues, SolutionFields};
use crate::error::{DpgError, Result};
use crate::mesh::Mesh;
use crate::quadrature::{quadrature_rule, QuadDomain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    Shear,
    Moment,
    Deflection,
    Rotation,
    Vorticity,
}

impl Quantity {
    pub const ALL: [Quantity; 5] = [
        Quantity::Shear,
        Quantity::Moment,
        Quantity::Deflection,
        Quantity::Rotation,
        Quantity::Vorticity,
    ];

    /// The four quantities reported in rate tables.
    pub const REPORTED: [Quantity; 4] = [Quantity::Shear, Quantity::Moment, Quantity::Deflection, Quantity::Rotation];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Shear => "V",
            Quantity::Moment => "M",
            Quantity::Deflection => "w",
            Quantity::Rotation => "psi",
            Quantity::Vorticity => "r",
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    fn squared(self, f: &FieldValues) -> f64 {
        match self {
            Quantity::Shear => f.v[0] * f.v[0] + f.v[1] * f.v[1],
            Quantity::Moment => f.m.iter().flatten().map(|v| v * v).sum(),
            Quantity::Deflection => f.w * f.w,
            Quantity::Rotation => f.psi[0] * f.psi[0] + f.psi[1] * f.psi[1],
            Quantity::Vorticity => f.r * f.r,
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn difference(a: &FieldValues, b: &FieldValues) -> FieldValues {
    let mut m = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a.m[i][j] - b.m[i][j];
        }
    }
    FieldValues {
        v: [a.v[0] - b.v[0], a.v[1] - b.v[1]],
        m,
        w: a.w - b.w,
        psi: [a.psi[0] - b.psi[0], a.psi[1] - b.psi[1]],
        r: a.r - b.r,
    }
}

/// Exact norms below this are treated as zero.
pub const ZERO_NORM: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantityError {
    pub quantity: Quantity,
    pub abs_error: f64,
    pub exact_norm: f64,
    /// `None` when the exact field vanishes.
    pub rel_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub n: usize,
    pub h: f64,
    pub errors: Vec<QuantityError>,
}

impl ErrorReport {
    pub fn get(&self, q: Quantity) -> &QuantityError {
        self.errors.iter().find(|e| e.quantity == q).expect("all quantities are reported")
    }

    pub fn rel(&self, q: Quantity) -> Result<f64> {
        self.get(q)
            .rel_error
            .ok_or(DpgError::ZeroExactNorm { quantity: q.name() })
    }
}

/// Element-wise Gauss quadrature with `quad_points` per direction of the
/// squared differences, evaluated at physical points.
pub fn l2_errors(
    fields: &SolutionFields,
    exact: &dyn PlateField,
    mesh: &Mesh,
    quad_points: usize,
) -> Result<ErrorReport> {
    let rule = quadrature_rule(quad_points, QuadDomain::Square);
    let per_elem: Vec<[f64; 10]> = (0..mesh.num_elements())
        .into_par_iter()
        .map(|e| {
            let mut acc = [0.0; 10];
            for (p, wq) in rule.points.iter().zip(&rule.weights) {
                let map = mesh.elements[e].map(*p);
                if map.det <= 0.0 {
                    return Err(DpgError::SingularGeometry { elem: e, det: map.det });
                }
                let dw = wq * map.det;
                let ex = exact.values(map.x[0], map.x[1]);
                let diff = difference(&fields.eval(mesh, e, *p), &ex);
                for q in Quantity::ALL {
                    acc[q.index()] += dw * q.squared(&diff);
                    acc[5 + q.index()] += dw * q.squared(&ex);
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    // fixed summation order
    let mut total = [0.0; 10];
    for a in &per_elem {
        for (t, v) in total.iter_mut().zip(a) {
            *t += v;
        }
    }
    let errors = Quantity::ALL
        .iter()
        .map(|&q| {
            let abs_error = total[q.index()].sqrt();
            let exact_norm = total[5 + q.index()].sqrt();
            QuantityError {
                quantity: q,
                abs_error,
                exact_norm,
                rel_error: (exact_norm > ZERO_NORM).then(|| abs_error / exact_norm),
            }
        })
        .collect();
    Ok(ErrorReport {
        n: mesh.n,
        h: mesh.h,
        errors,
    })
}

/// Element-wise `L2` projection of the interior fields onto the trial
/// spaces. Skeleton coefficients are left at zero.
pub fn l2_projection(solver: &DpgSolver<'_>, exact: &dyn PlateField) -> Result<SolutionFields> {
    let t = &solver.tables;
    let l = solver.trial;
    let (nv, ns) = (l.n_rt(), l.n_scalar());
    let interior: Vec<DVector<f64>> = (0..solver.mesh.num_elements())
        .into_par_iter()
        .map(|e| {
            let mass = solver.field_mass(e)?;
            let mut rhs = DVector::zeros(l.n_interior());
            for (k, p) in t.rule.points.iter().enumerate() {
                let map = solver.mesh.elements[e].map(*p);
                let wk = t.rule.weights[k];
                let f = exact.values(map.x[0], map.x[1]);
                for (a, v) in t.trial_rt.values_at(k).iter().enumerate() {
                    let jv = map.apply(*v);
                    let dot = |u: [f64; 2]| u[0] * jv[0] + u[1] * jv[1];
                    rhs[l.v() + a] += wk * dot(f.v);
                    rhs[l.m(0) + a] += wk * dot(f.m[0]);
                    rhs[l.m(1) + a] += wk * dot(f.m[1]);
                }
                for (a, s) in t.trial_scalar.values_at(k).iter().enumerate() {
                    let c = wk * map.det * s;
                    rhs[l.w() + a] += c * f.w;
                    rhs[l.psi(0) + a] += c * f.psi[0];
                    rhs[l.psi(1) + a] += c * f.psi[1];
                    rhs[l.r() + a] += c * f.r;
                }
            }
            debug_assert_eq!(l.n_interior(), 3 * nv + 4 * ns);
            let chol = Cholesky::new(mass).ok_or(DpgError::SingularInterior { elem: e })?;
            Ok(chol.solve(&rhs))
        })
        .collect::<Result<_>>()?;
    Ok(SolutionFields::new(l, interior, vec![0.0; solver.numbering.n_dofs()]))
}
