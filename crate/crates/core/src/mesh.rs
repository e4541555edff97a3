//! Structured quadrilateral meshes of the unit square.
//!
//! Elements are the images of the reference square `[-1, 1]²` under bilinear
//! maps. Every skeleton edge carries a global orientation: it runs
//! counterclockwise around its lower-numbered neighbour (`left_elem`) and
//! its unit normal points out of that element.

use std::io::{self, Write};

use crate::error::{DpgError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeshKind {
    Uniform,
    Trapezoidal,
}

impl std::str::FromStr for MeshKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "trapezoidal" => Ok(Self::Trapezoidal),
            other => Err(format!("unknown mesh kind `{other}` (expected uniform|trapezoidal)")),
        }
    }
}

impl std::fmt::Display for MeshKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Uniform => "uniform",
            Self::Trapezoidal => "trapezoidal",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vertex {
    pub x: f64,
    pub y: f64,
}

/// A convex quadrilateral with counterclockwise vertices.
///
/// `map_coeffs = [a0, a1, a2, a3, b0, b1, b2, b3]` with
/// `x = a0 + a1 ξ + a2 η + a3 ξη`, `y = b0 + b1 ξ + b2 η + b3 ξη`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadElement {
    pub vertex_ids: [usize; 4],
    pub edge_ids: [usize; 4],
    pub map_coeffs: [f64; 8],
    pub is_affine: bool,
}

/// Physical point, Jacobian `J[i][j] = ∂x_i/∂ξ_j` and its determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMap {
    pub x: [f64; 2],
    pub jac: [[f64; 2]; 2],
    pub det: f64,
}

impl PointMap {
    /// `J⁻ᵀ g`: maps a reference gradient to the physical gradient.
    pub fn push_gradient(&self, g: [f64; 2]) -> [f64; 2] {
        let j = &self.jac;
        [
            (j[1][1] * g[0] - j[1][0] * g[1]) / self.det,
            (-j[0][1] * g[0] + j[0][0] * g[1]) / self.det,
        ]
    }

    /// `J q̂` (the Piola map without the `1/det J` factor).
    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        let j = &self.jac;
        [j[0][0] * v[0] + j[0][1] * v[1], j[1][0] * v[0] + j[1][1] * v[1]]
    }

    /// Contravariant Piola transform `J q̂ / det J`.
    pub fn piola(&self, v: [f64; 2]) -> [f64; 2] {
        let jv = self.apply(v);
        [jv[0] / self.det, jv[1] / self.det]
    }
}

impl QuadElement {
    pub fn from_vertices(vertex_ids: [usize; 4], pts: [[f64; 2]; 4]) -> Self {
        let mut c = [0.0; 8];
        for d in 0..2 {
            let (p0, p1, p2, p3) = (pts[0][d], pts[1][d], pts[2][d], pts[3][d]);
            c[4 * d] = 0.25 * (p0 + p1 + p2 + p3);
            c[4 * d + 1] = 0.25 * (-p0 + p1 + p2 - p3);
            c[4 * d + 2] = 0.25 * (-p0 - p1 + p2 + p3);
            c[4 * d + 3] = 0.25 * (p0 - p1 + p2 - p3);
        }
        let scale = c[1].abs().max(c[2].abs()).max(c[5].abs()).max(c[6].abs());
        let is_affine = c[3].abs() <= 1e-14 * scale && c[7].abs() <= 1e-14 * scale;
        Self {
            vertex_ids,
            edge_ids: [usize::MAX; 4],
            map_coeffs: c,
            is_affine,
        }
    }

    pub fn map(&self, p: [f64; 2]) -> PointMap {
        map_to_physical(self, p)
    }

    /// Physical vertex `k` (counterclockwise).
    pub fn vertex(&self, k: usize) -> [f64; 2] {
        const REF: [[f64; 2]; 4] = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];
        self.map(REF[k]).x
    }

    /// Shoelace area.
    pub fn area(&self) -> f64 {
        let v: Vec<[f64; 2]> = (0..4).map(|k| self.vertex(k)).collect();
        0.5 * (0..4)
            .map(|k| {
                let (a, b) = (v[k], v[(k + 1) % 4]);
                a[0] * b[1] - b[0] * a[1]
            })
            .sum::<f64>()
    }

    pub fn diameter(&self) -> f64 {
        let v: Vec<[f64; 2]> = (0..4).map(|k| self.vertex(k)).collect();
        let mut d: f64 = 0.0;
        for a in 0..4 {
            for b in a + 1..4 {
                d = d.max((v[a][0] - v[b][0]).hypot(v[a][1] - v[b][1]));
            }
        }
        d
    }

    /// Newton inversion of the bilinear map. Returns the reference point if
    /// it lies in `[-1 - tol, 1 + tol]²`.
    pub fn inverse_map(&self, x: [f64; 2], tol: f64) -> Option<[f64; 2]> {
        let mut p = [0.0, 0.0];
        for _ in 0..50 {
            let m = self.map(p);
            let r = [m.x[0] - x[0], m.x[1] - x[1]];
            let j = m.jac;
            let dx = [(j[1][1] * r[0] - j[0][1] * r[1]) / m.det, (-j[1][0] * r[0] + j[0][0] * r[1]) / m.det];
            p = [p[0] - dx[0], p[1] - dx[1]];
            if dx[0].abs().max(dx[1].abs()) < 1e-15 {
                break;
            }
            if p[0].abs() > 10.0 || p[1].abs() > 10.0 {
                return None;
            }
        }
        let inside = p[0].abs() <= 1.0 + tol && p[1].abs() <= 1.0 + tol;
        inside.then(|| [p[0].clamp(-1.0, 1.0), p[1].clamp(-1.0, 1.0)])
    }
}

/// Bilinear map, Jacobian and determinant at reference point `p`.
pub fn map_to_physical(elem: &QuadElement, p: [f64; 2]) -> PointMap {
    let c = &elem.map_coeffs;
    let (xi, eta) = (p[0], p[1]);
    let x = [
        c[0] + c[1] * xi + c[2] * eta + c[3] * xi * eta,
        c[4] + c[5] * xi + c[6] * eta + c[7] * xi * eta,
    ];
    let jac = [[c[1] + c[3] * eta, c[2] + c[3] * xi], [c[5] + c[7] * eta, c[6] + c[7] * xi]];
    let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
    PointMap { x, jac, det }
}

/// Contravariant Piola transform of a reference vector value.
pub fn piola_transform(elem: &QuadElement, p: [f64; 2], v: [f64; 2]) -> [f64; 2] {
    elem.map(p).piola(v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    /// Start and end vertex, counterclockwise with respect to `left_elem`.
    pub vertex_ids: [usize; 2],
    pub left_elem: usize,
    pub right_elem: Option<usize>,
    /// Local edge numbers in the left and right element.
    pub local_index: [usize; 2],
    pub global_normal: [f64; 2],
    pub is_boundary: bool,
}

/// Geometry of an edge as seen from one adjacent element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeGeometry {
    pub length: f64,
    /// `+1` if the global normal is this element's outward normal.
    pub outward_sign: f64,
    /// Local edge number inside the element.
    pub local_edge: usize,
    /// Start and end points along the element's counterclockwise direction.
    pub start: [f64; 2],
    pub end: [f64; 2],
    /// The element traverses the edge against its global direction, so the
    /// global edge parameter is the negated local one.
    pub reversed: bool,
}

impl EdgeGeometry {
    /// Physical point at local edge parameter `s ∈ [-1, 1]`.
    pub fn point(&self, s: f64) -> [f64; 2] {
        let t = 0.5 * (1.0 + s);
        [
            self.start[0] + t * (self.end[0] - self.start[0]),
            self.start[1] + t * (self.end[1] - self.start[1]),
        ]
    }

    /// Global edge parameter for local parameter `s`.
    pub fn global_param(&self, s: f64) -> f64 {
        if self.reversed {
            -s
        } else {
            s
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Vertex>,
    pub vertex_on_boundary: Vec<bool>,
    pub elements: Vec<QuadElement>,
    pub edges: Vec<Edge>,
    pub n: usize,
    pub kind: MeshKind,
    pub distortion: f64,
    pub h: f64,
}

/// Builds the `N × N` mesh of `(0, 1)²`.
///
/// Trapezoidal meshes keep the vertical grid lines and shift each interior
/// vertex vertically by `±distortion / N` in a checkerboard pattern, so every
/// element row becomes a row of alternating trapezoids.
pub fn generate_mesh(n: usize, kind: MeshKind, distortion: f64) -> Result<Mesh> {
    if n == 0 {
        return Err(DpgError::InvalidMesh("N must be at least 1".into()));
    }
    if kind == MeshKind::Trapezoidal && !(0.0..0.5).contains(&distortion) {
        return Err(DpgError::InvalidMesh(format!(
            "distortion must lie in [0, 0.5), got {distortion}"
        )));
    }
    let nf = n as f64;
    let vid = |i: usize, j: usize| i + (n + 1) * j;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    let mut vertex_on_boundary = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            let boundary = i == 0 || j == 0 || i == n || j == n;
            let mut y = j as f64 / nf;
            if kind == MeshKind::Trapezoidal && !boundary {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                y += sign * distortion / nf;
            }
            vertices.push(Vertex { x: i as f64 / nf, y });
            vertex_on_boundary.push(boundary);
        }
    }

    let mut elements = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let ids = [vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)];
            let pts = ids.map(|v| [vertices[v].x, vertices[v].y]);
            let elem_id = elements.len();
            check_convex(elem_id, &pts)?;
            elements.push(QuadElement::from_vertices(ids, pts));
        }
    }

    // Edges are created on first encounter, which is always from the
    // lower-numbered neighbour.
    let mut edges: Vec<Edge> = Vec::with_capacity(2 * n * (n + 1));
    let mut lookup = std::collections::HashMap::with_capacity(2 * n * (n + 1));
    for (e, elem) in elements.iter_mut().enumerate() {
        for k in 0..4 {
            let a = elem.vertex_ids[k];
            let b = elem.vertex_ids[(k + 1) % 4];
            let key = (a.min(b), a.max(b));
            let id = match lookup.get(&key) {
                Some(&id) => {
                    let edge: &mut Edge = &mut edges[id];
                    edge.right_elem = Some(e);
                    edge.local_index[1] = k;
                    edge.is_boundary = false;
                    id
                }
                None => {
                    let (pa, pb) = (vertices[a], vertices[b]);
                    let (tx, ty) = (pb.x - pa.x, pb.y - pa.y);
                    let len = tx.hypot(ty);
                    edges.push(Edge {
                        vertex_ids: [a, b],
                        left_elem: e,
                        right_elem: None,
                        local_index: [k, usize::MAX],
                        global_normal: [ty / len, -tx / len],
                        is_boundary: true,
                    });
                    lookup.insert(key, edges.len() - 1);
                    edges.len() - 1
                }
            };
            elem.edge_ids[k] = id;
        }
    }

    let h = elements.iter().map(QuadElement::diameter).fold(0.0, f64::max);
    Ok(Mesh {
        vertices,
        vertex_on_boundary,
        elements,
        edges,
        n,
        kind,
        distortion: if kind == MeshKind::Trapezoidal { distortion } else { 0.0 },
        h,
    })
}

fn check_convex(elem: usize, pts: &[[f64; 2]; 4]) -> Result<()> {
    for k in 0..4 {
        let a = pts[k];
        let b = pts[(k + 1) % 4];
        let c = pts[(k + 2) % 4];
        let cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
        if cross <= 0.0 {
            return Err(DpgError::NonConvexElement {
                elem,
                vertex: (k + 1) % 4,
                cross,
            });
        }
    }
    Ok(())
}

impl Mesh {
    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Geometry of edge `edge_id` seen from element `elem_id`.
    pub fn edge_geometry(&self, edge_id: usize, elem_id: usize) -> Result<EdgeGeometry> {
        let edge = self
            .edges
            .get(edge_id)
            .ok_or(DpgError::EdgeNotAdjacent { edge: edge_id, elem: elem_id })?;
        let (local_edge, outward_sign, reversed) = if edge.left_elem == elem_id {
            (edge.local_index[0], 1.0, false)
        } else if edge.right_elem == Some(elem_id) {
            (edge.local_index[1], -1.0, true)
        } else {
            return Err(DpgError::EdgeNotAdjacent { edge: edge_id, elem: elem_id });
        };
        let elem = &self.elements[elem_id];
        let a = elem.vertex_ids[local_edge];
        let b = elem.vertex_ids[(local_edge + 1) % 4];
        let (pa, pb) = (self.vertices[a], self.vertices[b]);
        Ok(EdgeGeometry {
            length: (pb.x - pa.x).hypot(pb.y - pa.y),
            outward_sign,
            local_edge,
            start: [pa.x, pa.y],
            end: [pb.x, pb.y],
            reversed,
        })
    }

    /// Element containing `x` together with the reference coordinates.
    pub fn locate(&self, x: [f64; 2], tol: f64) -> Option<(usize, [f64; 2])> {
        // structured grid: start from the column/row guess, then scan neighbours
        let n = self.n;
        let ci = ((x[0] * n as f64).floor() as isize).clamp(0, n as isize - 1);
        let cj = ((x[1] * n as f64).floor() as isize).clamp(0, n as isize - 1);
        for dj in [0isize, -1, 1, -2, 2] {
            for di in [0isize, -1, 1] {
                let (i, j) = (ci + di, cj + dj);
                if i < 0 || j < 0 || i >= n as isize || j >= n as isize {
                    continue;
                }
                let e = i as usize + n * j as usize;
                if let Some(p) = self.elements[e].inverse_map(x, tol) {
                    return Some((e, p));
                }
            }
        }
        self.elements
            .iter()
            .enumerate()
            .find_map(|(e, el)| el.inverse_map(x, tol).map(|p| (e, p)))
    }

    /// Plain-text listing: `v <x> <y>` lines then `q <v0> <v1> <v2> <v3>` lines.
    pub fn write_text<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# {} mesh, N = {}, distortion = {}", self.kind, self.n, self.distortion)?;
        for v in &self.vertices {
            writeln!(w, "v {} {}", v.x, v.y)?;
        }
        for e in &self.elements {
            let [a, b, c, d] = e.vertex_ids;
            writeln!(w, "q {a} {b} {c} {d}")?;
        }
        Ok(())
    }
}
