//! Sampling discrete fields on uniform grids for contour plots.

use dpg_plate::{DpgError, FieldValues, Mesh, SolutionFields};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldQuantity {
    V1,
    V2,
    M11,
    M12,
    M22,
    /// `ψ₁`; on symmetric solutions `ψ₂(x, y) = ψ₁(y, x)`.
    Psi1,
    W,
}

impl FieldQuantity {
    pub const ALL: [FieldQuantity; 7] = [
        FieldQuantity::V1,
        FieldQuantity::V2,
        FieldQuantity::M11,
        FieldQuantity::M12,
        FieldQuantity::M22,
        FieldQuantity::Psi1,
        FieldQuantity::W,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FieldQuantity::V1 => "V1",
            FieldQuantity::V2 => "V2",
            FieldQuantity::M11 => "M11",
            FieldQuantity::M12 => "M12",
            FieldQuantity::M22 => "M22",
            FieldQuantity::Psi1 => "psi1",
            FieldQuantity::W => "w",
        }
    }

    /// Fields whose traces vanish on a clamped boundary.
    pub fn is_clamped(self) -> bool {
        matches!(self, FieldQuantity::Psi1 | FieldQuantity::W)
    }

    pub fn pick(self, f: &FieldValues) -> f64 {
        match self {
            FieldQuantity::V1 => f.v[0],
            FieldQuantity::V2 => f.v[1],
            FieldQuantity::M11 => f.m[0][0],
            FieldQuantity::M12 => f.m[0][1],
            FieldQuantity::M22 => f.m[1][1],
            FieldQuantity::Psi1 => f.psi[0],
            FieldQuantity::W => f.w,
        }
    }
}

/// Samples on the `resolution × resolution` grid `(i, j) / (resolution − 1)`,
/// row-major with `x` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSampleGrid {
    pub quantity: FieldQuantity,
    pub resolution: usize,
    pub values: Vec<f64>,
}

impl FieldSampleGrid {
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 / (self.resolution - 1) as f64
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i + self.resolution * j]
    }

    /// `x,y,value` rows in grid order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,value\n");
        for j in 0..self.resolution {
            for i in 0..self.resolution {
                out.push_str(&format!("{},{},{}\n", self.coord(i), self.coord(j), self.get(i, j)));
            }
        }
        out
    }
}

pub fn emit_field_grid(
    fields: &SolutionFields,
    mesh: &Mesh,
    quantity: FieldQuantity,
    resolution: usize,
) -> Result<FieldSampleGrid, DpgError> {
    if resolution < 2 {
        return Err(DpgError::InvalidDiscretization("grid resolution must be at least 2".into()));
    }
    let h = 1.0 / (resolution - 1) as f64;
    let mut values = Vec::with_capacity(resolution * resolution);
    for j in 0..resolution {
        for i in 0..resolution {
            let x = [i as f64 * h, j as f64 * h];
            if quantity.is_clamped() && on_boundary(x) {
                // The kinematic traces carry the clamped condition on ∂Ω.
                values.push(0.0);
            } else {
                values.push(quantity.pick(&fields.eval_at(mesh, x)?));
            }
        }
    }
    Ok(FieldSampleGrid {
        quantity,
        resolution,
        values,
    })
}

fn on_boundary(x: [f64; 2]) -> bool {
    x.iter().any(|&c| c <= 0.0 || c >= 1.0)
}
