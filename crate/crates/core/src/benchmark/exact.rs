//! Closed-form plate fields, the clamped-plate benchmark load and a
//! finite-difference residual check of the strong equations.

use super::poly::Poly2;
use crate::dpg::FieldValues;
use crate::error::{DpgError, Result};
use crate::material::{compliance_inverse, MaterialParams, Tensor2};

/// Anything that can be evaluated as a full set of plate fields.
pub trait PlateField: Sync {
    fn values(&self, x: f64, y: f64) -> FieldValues;
}

impl<F: Fn(f64, f64) -> FieldValues + Sync> PlateField for F {
    fn values(&self, x: f64, y: f64) -> FieldValues {
        self(x, y)
    }
}

/// Pressure of the clamped square plate benchmark.
pub fn chinosi_load(x: f64, y: f64, nu: f64) -> f64 {
    let ax = 5.0 * x * x - 5.0 * x + 1.0;
    let ay = 5.0 * y * y - 5.0 * y + 1.0;
    let t1 = 12.0 * y * (y - 1.0) * ax * (2.0 * y * y * (y - 1.0) * (y - 1.0) + x * (x - 1.0) * ay);
    let t2 = 12.0 * x * (x - 1.0) * ay * (2.0 * x * x * (x - 1.0) * (x - 1.0) + y * (y - 1.0) * ax);
    (t1 + t2) / (12.0 * (1.0 - nu * nu))
}

fn chinosi_load_poly(nu: f64) -> Poly2 {
    let x = Poly2::x();
    let y = Poly2::y();
    let xm = Poly2::in_x(&[-1.0, 1.0]);
    let ym = Poly2::in_y(&[-1.0, 1.0]);
    let ax = Poly2::in_x(&[1.0, -5.0, 5.0]);
    let ay = Poly2::in_y(&[1.0, -5.0, 5.0]);
    let t1 = &(&(&y * &ym) * &ax) * &(&(&(&y * &y) * &(&ym * &ym)).scale(2.0) + &(&(&x * &xm) * &ay));
    let t2 = &(&(&x * &xm) * &ay) * &(&(&(&x * &x) * &(&xm * &xm)).scale(2.0) + &(&(&y * &ym) * &ax));
    (&t1 + &t2).scale(1.0 / (1.0 - nu * nu))
}

/// Plate fields given by polynomials. `w` and `ψ` are primary; `V`, `M`,
/// `r` follow from the first two equations, and the last two define the
/// pressure and moment sources the fields satisfy.
#[derive(Debug, Clone)]
pub struct ExactSolution {
    pub material: MaterialParams,
    pub w: Poly2,
    pub psi: [Poly2; 2],
    pub v: [Poly2; 2],
    pub m: [[Poly2; 2]; 2],
    pub r: Poly2,
    /// `−∇·V`
    pub pressure: Poly2,
    /// `−∇·M − V`
    pub moment_source: [Poly2; 2],
}

impl ExactSolution {
    /// Builds `V = κt⁻²(∇w − ψ)`, `M = C ε(ψ)`, `r = (∂₂ψ₁ − ∂₁ψ₂)/2`.
    pub fn from_potentials(w: Poly2, psi: [Poly2; 2], material: MaterialParams) -> Self {
        let k = 1.0 / material.shear_compliance();
        let v = [(&w.dx() - &psi[0]).scale(k), (&w.dy() - &psi[1]).scale(k)];
        let e11 = psi[0].dx();
        let e22 = psi[1].dy();
        let e12 = (&psi[0].dy() + &psi[1].dx()).scale(0.5);
        let nu = material.poisson;
        let tr = (&e11 + &e22).scale(nu / (1.0 - nu));
        let m11 = (&e11 + &tr).scale(1.0 / 6.0);
        let m22 = (&e22 + &tr).scale(1.0 / 6.0);
        let m12 = e12.scale(1.0 / 6.0);
        let r = (&psi[0].dy() - &psi[1].dx()).scale(0.5);
        let pressure = -&(&v[0].dx() + &v[1].dy());
        let moment_source = [
            -&(&(&m11.dx() + &m12.dy()) + &v[0]),
            -&(&(&m12.dx() + &m22.dy()) + &v[1]),
        ];
        Self {
            material,
            w,
            psi,
            v,
            m: [[m11, m12.clone()], [m12, m22]],
            r,
            pressure,
            moment_source,
        }
    }

    /// Benchmark candidate with correction coefficient `c`, before the
    /// overall scale is fixed.
    pub fn chinosi_candidate(material: MaterialParams, c: f64) -> Self {
        let x = Poly2::x();
        let y = Poly2::y();
        let xm = Poly2::in_x(&[-1.0, 1.0]);
        let ym = Poly2::in_y(&[-1.0, 1.0]);
        let bx = &x * &xm; // x(x−1)
        let by = &y * &ym;
        let bx3 = bx.pow(3);
        let by3 = by.pow(3);
        let ax = Poly2::in_x(&[1.0, -5.0, 5.0]);
        let ay = Poly2::in_y(&[1.0, -5.0, 5.0]);
        let psi1 = &(&by3 * &bx.pow(2)) * &Poly2::in_x(&[-1.0, 2.0]);
        let psi2 = &(&bx3 * &by.pow(2)) * &Poly2::in_y(&[-1.0, 2.0]);
        let corr = &(&(&by3 * &bx) * &ax) + &(&(&bx3 * &by) * &ay);
        let w = &(&bx3 * &by3).scale(1.0 / 3.0) + &corr.scale(c);
        Self::from_potentials(w, [psi1, psi2], material)
    }

    /// The benchmark solution: correction coefficient and scale are fitted
    /// against the strong equations with [`chinosi_load`], and the result
    /// must pass [`residual_oracle`] on a 101×101 grid below `1e-8`.
    pub fn chinosi(material: MaterialParams) -> Result<Self> {
        material.validate()?;
        let nu = material.poisson;
        let load = move |x: f64, y: f64| chinosi_load(x, y, nu);
        let grid = interior_grid(21);

        // −∇·M − V is affine in c
        let moment_res = |c: f64| -> Vec<f64> {
            let f = Self::chinosi_candidate(material, c);
            grid.iter()
                .flat_map(|&(x, y)| residual_components(&f, &load, &material, x, y).moment)
                .collect()
        };
        let c = affine_least_squares(&moment_res(0.0), &moment_res(1.0));
        let base = Self::chinosi_candidate(material, c);

        // −∇·(sV) − p is affine in the scale s
        let pressure_res = |s: f64| -> Vec<f64> {
            let f = base.scaled(s);
            grid.iter()
                .map(|&(x, y)| residual_components(&f, &load, &material, x, y).pressure)
                .collect()
        };
        let s = affine_least_squares(&pressure_res(0.0), &pressure_res(1.0));
        let mut exact = base.scaled(s);
        exact.pressure = chinosi_load_poly(nu);

        let residual = residual_oracle(&exact, &load, &material, 101);
        if !(residual < CHINOSI_GATE) {
            return Err(DpgError::ResidualGate {
                residual,
                tolerance: CHINOSI_GATE,
            });
        }
        // the gate bounds what is left of −∇·M − V; the benchmark has no
        // moment source
        exact.moment_source = [Poly2::zero(), Poly2::zero()];
        Ok(exact)
    }

    pub fn scaled(&self, s: f64) -> Self {
        let sc = |p: &Poly2| p.scale(s);
        Self {
            material: self.material,
            w: sc(&self.w),
            psi: [sc(&self.psi[0]), sc(&self.psi[1])],
            v: [sc(&self.v[0]), sc(&self.v[1])],
            m: [[sc(&self.m[0][0]), sc(&self.m[0][1])], [sc(&self.m[1][0]), sc(&self.m[1][1])]],
            r: sc(&self.r),
            pressure: sc(&self.pressure),
            moment_source: [sc(&self.moment_source[0]), sc(&self.moment_source[1])],
        }
    }

    pub fn pressure_at(&self, x: f64, y: f64) -> f64 {
        self.pressure.eval(x, y)
    }

    pub fn moment_source_at(&self, x: f64, y: f64) -> [f64; 2] {
        [self.moment_source[0].eval(x, y), self.moment_source[1].eval(x, y)]
    }
}

/// Gate tolerance for the benchmark fields.
pub const CHINOSI_GATE: f64 = 1e-8;

impl PlateField for ExactSolution {
    fn values(&self, x: f64, y: f64) -> FieldValues {
        let e = |p: &Poly2| p.eval(x, y);
        FieldValues {
            v: [e(&self.v[0]), e(&self.v[1])],
            m: [[e(&self.m[0][0]), e(&self.m[0][1])], [e(&self.m[1][0]), e(&self.m[1][1])]],
            w: e(&self.w),
            psi: [e(&self.psi[0]), e(&self.psi[1])],
            r: e(&self.r),
        }
    }
}

/// Minimizer of `‖r(θ)‖` for `r` affine in `θ`, from samples at 0 and 1.
fn affine_least_squares(r0: &[f64], r1: &[f64]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (a, b) in r0.iter().zip(r1) {
        let d = b - a;
        num += a * d;
        den += d * d;
    }
    if den == 0.0 {
        0.0
    } else {
        -num / den
    }
}

/// `n × n` grid of interior points `((i+1)/(n+1), (j+1)/(n+1))`, x fastest.
pub fn interior_grid(n: usize) -> Vec<(f64, f64)> {
    let h = 1.0 / (n + 1) as f64;
    (0..n)
        .flat_map(|j| (0..n).map(move |i| ((i + 1) as f64 * h, (j + 1) as f64 * h)))
        .collect()
}

/// Residuals of the four strong equations at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StrongResiduals {
    /// `κ⁻¹t²V − ∇w + ψ`
    pub shear: [f64; 2],
    /// `C⁻¹M − ∇ψ + rJ`
    pub curvature: Tensor2,
    /// `−∇·V − p`
    pub pressure: f64,
    /// `−∇·M − V`
    pub moment: [f64; 2],
}

impl StrongResiduals {
    pub fn max_abs(&self) -> f64 {
        let all = [
            self.shear[0],
            self.shear[1],
            self.curvature[0][0],
            self.curvature[0][1],
            self.curvature[1][0],
            self.curvature[1][1],
            self.pressure,
            self.moment[0],
            self.moment[1],
        ];
        all.iter().fold(0.0, |a, v| a.max(v.abs()))
    }
}

const FD_STEP: f64 = 1e-5;
const N_FLAT: usize = 11;

fn flatten(f: &FieldValues) -> [f64; N_FLAT] {
    [
        f.v[0], f.v[1], f.m[0][0], f.m[0][1], f.m[1][0], f.m[1][1], f.w, f.psi[0], f.psi[1], f.r, 0.0,
    ]
}

/// Richardson-extrapolated central difference of every field component in
/// direction `dir` (0 = x, 1 = y).
fn fd_derivative(f: &dyn PlateField, x: f64, y: f64, dir: usize) -> FieldValues {
    let central = |h: f64| -> [f64; N_FLAT] {
        let (dx, dy) = if dir == 0 { (h, 0.0) } else { (0.0, h) };
        let p = flatten(&f.values(x + dx, y + dy));
        let m = flatten(&f.values(x - dx, y - dy));
        let mut out = [0.0; N_FLAT];
        for i in 0..N_FLAT {
            out[i] = (p[i] - m[i]) / (2.0 * h);
        }
        out
    };
    let d1 = central(FD_STEP);
    let d2 = central(0.5 * FD_STEP);
    let mut d = [0.0; N_FLAT];
    for i in 0..N_FLAT {
        d[i] = (4.0 * d2[i] - d1[i]) / 3.0;
    }
    FieldValues {
        v: [d[0], d[1]],
        m: [[d[2], d[3]], [d[4], d[5]]],
        w: d[6],
        psi: [d[7], d[8]],
        r: d[9],
    }
}

/// Strong-form residuals at `(x, y)`; derivatives by finite differences of
/// the field evaluator only.
pub fn residual_components(
    fields: &dyn PlateField,
    load: &dyn Fn(f64, f64) -> f64,
    material: &MaterialParams,
    x: f64,
    y: f64,
) -> StrongResiduals {
    let f = fields.values(x, y);
    let fx = fd_derivative(fields, x, y, 0);
    let fy = fd_derivative(fields, x, y, 1);
    let sc = material.shear_compliance();
    let shear = [sc * f.v[0] - fx.w + f.psi[0], sc * f.v[1] - fy.w + f.psi[1]];
    let cm = compliance_inverse(f.m, material.poisson);
    // (∇ψ)_ij = ∂_j ψ_i, J = [[0, 1], [−1, 0]]
    let grad_psi = [[fx.psi[0], fy.psi[0]], [fx.psi[1], fy.psi[1]]];
    let rj = [[0.0, f.r], [-f.r, 0.0]];
    let mut curvature = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            curvature[i][j] = cm[i][j] - grad_psi[i][j] + rj[i][j];
        }
    }
    let pressure = -(fx.v[0] + fy.v[1]) - load(x, y);
    let moment = [
        -(fx.m[0][0] + fy.m[0][1]) - f.v[0],
        -(fx.m[1][0] + fy.m[1][1]) - f.v[1],
    ];
    StrongResiduals {
        shear,
        curvature,
        pressure,
        moment,
    }
}

/// Max absolute strong-form residual over a `resolution × resolution`
/// interior grid.
pub fn residual_oracle(
    fields: &dyn PlateField,
    load: &dyn Fn(f64, f64) -> f64,
    material: &MaterialParams,
    resolution: usize,
) -> f64 {
    interior_grid(resolution)
        .into_iter()
        .map(|(x, y)| residual_components(fields, load, material, x, y).max_abs())
        .fold(0.0, f64::max)
}
