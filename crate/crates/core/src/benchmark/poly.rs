//! Dense bivariate polynomials `Σ c_ij xⁱ yʲ`.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct Poly2 {
    /// Coefficient of `xⁱ yʲ` at `i * (deg_y + 1) + j`.
    coeffs: Vec<f64>,
    deg_x: usize,
    deg_y: usize,
}

impl Poly2 {
    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self {
            coeffs: vec![c],
            deg_x: 0,
            deg_y: 0,
        }
    }

    pub fn x() -> Self {
        Self::monomial(1.0, 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(1.0, 0, 1)
    }

    pub fn monomial(c: f64, i: usize, j: usize) -> Self {
        let mut p = Self::with_degrees(i, j);
        p.set(i, j, c);
        p
    }

    /// `Σ cᵢ xⁱ` from coefficients in increasing degree.
    pub fn in_x(c: &[f64]) -> Self {
        let mut p = Self::with_degrees(c.len().saturating_sub(1), 0);
        for (i, &v) in c.iter().enumerate() {
            p.set(i, 0, v);
        }
        p
    }

    /// `Σ cⱼ yʲ` from coefficients in increasing degree.
    pub fn in_y(c: &[f64]) -> Self {
        Self::in_x(c).swap_xy()
    }

    fn with_degrees(deg_x: usize, deg_y: usize) -> Self {
        Self {
            coeffs: vec![0.0; (deg_x + 1) * (deg_y + 1)],
            deg_x,
            deg_y,
        }
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i > self.deg_x || j > self.deg_y {
            0.0
        } else {
            self.coeffs[i * (self.deg_y + 1) + j]
        }
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.coeffs[i * (self.deg_y + 1) + j] = v;
    }

    /// Degrees in `x` and `y` after dropping zero leading coefficients.
    pub fn degrees(&self) -> (usize, usize) {
        let mut dx = 0;
        let mut dy = 0;
        for i in 0..=self.deg_x {
            for j in 0..=self.deg_y {
                if self.coeff(i, j) != 0.0 {
                    dx = dx.max(i);
                    dy = dy.max(j);
                }
            }
        }
        (dx, dy)
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let mut acc = 0.0;
        for i in (0..=self.deg_x).rev() {
            let mut row = 0.0;
            for j in (0..=self.deg_y).rev() {
                row = row * y + self.coeff(i, j);
            }
            acc = acc * x + row;
        }
        acc
    }

    pub fn dx(&self) -> Self {
        if self.deg_x == 0 {
            return Self::zero();
        }
        let mut p = Self::with_degrees(self.deg_x - 1, self.deg_y);
        for i in 1..=self.deg_x {
            for j in 0..=self.deg_y {
                p.set(i - 1, j, i as f64 * self.coeff(i, j));
            }
        }
        p
    }

    pub fn dy(&self) -> Self {
        self.swap_xy().dx().swap_xy()
    }

    /// `p(y, x)`.
    pub fn swap_xy(&self) -> Self {
        let mut p = Self::with_degrees(self.deg_y, self.deg_x);
        for i in 0..=self.deg_x {
            for j in 0..=self.deg_y {
                p.set(j, i, self.coeff(i, j));
            }
        }
        p
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
            ..self.clone()
        }
    }

    pub fn laplacian(&self) -> Self {
        &self.dx().dx() + &self.dy().dy()
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        let mut p = Self::with_degrees(self.deg_x.max(other.deg_x), self.deg_y.max(other.deg_y));
        for i in 0..=p.deg_x {
            for j in 0..=p.deg_y {
                p.set(i, j, self.coeff(i, j) + sign * other.coeff(i, j));
            }
        }
        p
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::constant(1.0), |acc, _| &acc * self)
    }
}

impl Add for &Poly2 {
    type Output = Poly2;
    fn add(self, rhs: &Poly2) -> Poly2 {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &Poly2 {
    type Output = Poly2;
    fn sub(self, rhs: &Poly2) -> Poly2 {
        self.combine(rhs, -1.0)
    }
}

impl Neg for &Poly2 {
    type Output = Poly2;
    fn neg(self) -> Poly2 {
        self.scale(-1.0)
    }
}

impl Mul for &Poly2 {
    type Output = Poly2;
    fn mul(self, rhs: &Poly2) -> Poly2 {
        let mut p = Poly2::with_degrees(self.deg_x + rhs.deg_x, self.deg_y + rhs.deg_y);
        for i in 0..=self.deg_x {
            for j in 0..=self.deg_y {
                let a = self.coeff(i, j);
                if a == 0.0 {
                    continue;
                }
                for k in 0..=rhs.deg_x {
                    for l in 0..=rhs.deg_y {
                        let idx = (i + k) * (p.deg_y + 1) + j + l;
                        p.coeffs[idx] += a * rhs.coeff(k, l);
                    }
                }
            }
        }
        p
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly2 {
            type Output = Poly2;
            fn $m(self, rhs: Poly2) -> Poly2 {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
