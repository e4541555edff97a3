//! Trial and test space layouts and the global numbering of skeleton unknowns.

use crate::basis::{rt_dim, scalar_dim};
use crate::mesh::Mesh;

/// Per-element column layout of the trial space of degree `p`.
///
/// Interior columns come first: `V`, the two rows of `M` (each in `RT_p`),
/// then `w`, `ψ₁`, `ψ₂`, `r` (each in `Q_p`). Trace columns follow:
/// `ŵ`, `ψ̂₁`, `ψ̂₂` (continuous, degree `p + 1`) and `V̂_n`, `M̂_n₁`, `M̂_n₂`
/// (per-edge Legendre, degree `p`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialLayout {
    pub degree: usize,
}

impl TrialLayout {
    pub fn new(degree: usize) -> Self {
        Self { degree }
    }

    pub fn n_rt(&self) -> usize {
        rt_dim(self.degree)
    }

    pub fn n_scalar(&self) -> usize {
        scalar_dim(self.degree)
    }

    pub fn v(&self) -> usize {
        0
    }

    /// Offset of row `row` of `M`.
    pub fn m(&self, row: usize) -> usize {
        (1 + row) * self.n_rt()
    }

    pub fn w(&self) -> usize {
        3 * self.n_rt()
    }

    pub fn psi(&self, comp: usize) -> usize {
        3 * self.n_rt() + (1 + comp) * self.n_scalar()
    }

    pub fn r(&self) -> usize {
        3 * self.n_rt() + 3 * self.n_scalar()
    }

    pub fn n_interior(&self) -> usize {
        3 * self.n_rt() + 4 * self.n_scalar()
    }

    /// Continuous trace functions touching one element: 4 vertices plus `p`
    /// interior nodes per edge.
    pub fn n_kinematic_local(&self) -> usize {
        4 * (self.degree + 1)
    }

    /// Per-edge Legendre functions on one element boundary.
    pub fn n_flux_local(&self) -> usize {
        4 * (self.degree + 1)
    }

    /// Local trace column (relative to the trace block) of `ŵ` / `ψ̂_c`.
    /// `comp = 0` is `ŵ`, `1, 2` are the rotation components.
    pub fn kinematic(&self, comp: usize) -> usize {
        comp * self.n_kinematic_local()
    }

    /// Local trace column (relative to the trace block) of `V̂_n` (`comp = 0`)
    /// or `M̂_n` components (`comp = 1, 2`).
    pub fn flux(&self, comp: usize) -> usize {
        3 * self.n_kinematic_local() + comp * self.n_flux_local()
    }

    pub fn n_trace(&self) -> usize {
        3 * self.n_kinematic_local() + 3 * self.n_flux_local()
    }

    pub fn n_total(&self) -> usize {
        self.n_interior() + self.n_trace()
    }

    /// Column of vertex `k` or of edge-interior node `j ∈ 1..=p` of edge `e`
    /// inside one kinematic block.
    pub fn kinematic_vertex(&self, k: usize) -> usize {
        k
    }

    pub fn kinematic_edge_node(&self, edge: usize, node: usize) -> usize {
        debug_assert!((1..=self.degree).contains(&node));
        4 + edge * self.degree + (node - 1)
    }

    pub fn flux_edge(&self, edge: usize, j: usize) -> usize {
        edge * (self.degree + 1) + j
    }
}

/// Per-element row layout of the enriched test space of degree `r`:
/// `q`, the two rows of `τ` (each in `RT_r`), then `z`, `φ₁`, `φ₂`, `s`
/// (each in `Q_r`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TestLayout {
    pub degree: usize,
}

impl TestLayout {
    pub fn new(degree: usize) -> Self {
        Self { degree }
    }

    pub fn n_rt(&self) -> usize {
        rt_dim(self.degree)
    }

    pub fn n_scalar(&self) -> usize {
        scalar_dim(self.degree)
    }

    pub fn q(&self) -> usize {
        0
    }

    pub fn tau(&self, row: usize) -> usize {
        (1 + row) * self.n_rt()
    }

    pub fn z(&self) -> usize {
        3 * self.n_rt()
    }

    pub fn phi(&self, comp: usize) -> usize {
        3 * self.n_rt() + (1 + comp) * self.n_scalar()
    }

    pub fn s(&self) -> usize {
        3 * self.n_rt() + 3 * self.n_scalar()
    }

    pub fn n_total(&self) -> usize {
        3 * self.n_rt() + 4 * self.n_scalar()
    }

    /// Sizes of the five diagonal blocks of the Gram matrix
    /// `(q, τ, z, φ, s)`.
    pub fn block_sizes(&self) -> [usize; 5] {
        let (v, s) = (self.n_rt(), self.n_scalar());
        [v, 2 * v, s, 2 * s, s]
    }
}

/// Counts of global skeleton unknowns per trace quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SkeletonCounts {
    pub deflection: usize,
    pub rotation: usize,
    pub shear: usize,
    pub moment: usize,
}

impl SkeletonCounts {
    pub fn total(&self) -> usize {
        self.deflection + self.rotation + self.shear + self.moment
    }
}

/// Global numbering of skeleton unknowns with the clamped `ŵ`, `ψ̂` degrees
/// of freedom on `∂Ω` removed.
///
/// Global order: `ŵ` (interior vertices, then interior-edge nodes), `ψ̂₁`,
/// `ψ̂₂` with the same pattern, `V̂_n` on every edge, then `M̂_n₁`, `M̂_n₂`.
#[derive(Debug, Clone)]
pub struct SkeletonNumbering {
    pub layout: TrialLayout,
    pub counts: SkeletonCounts,
    /// For each element, the global index of every local trace column, or
    /// `None` where the clamped condition eliminates it.
    pub element_dofs: Vec<Vec<Option<usize>>>,
    /// Global index of each edge's first `V̂_n` coefficient.
    pub edge_flux_offset: Vec<usize>,
}

impl SkeletonNumbering {
    pub fn new(mesh: &Mesh, layout: TrialLayout) -> Self {
        let p = layout.degree;
        let mut vertex_dof = vec![None; mesh.vertices.len()];
        let mut n_kin = 0;
        for (v, &boundary) in mesh.vertex_on_boundary.iter().enumerate() {
            if !boundary {
                vertex_dof[v] = Some(n_kin);
                n_kin += 1;
            }
        }
        let mut edge_node_dof = vec![None; mesh.edges.len()];
        for (e, edge) in mesh.edges.iter().enumerate() {
            if !edge.is_boundary && p > 0 {
                edge_node_dof[e] = Some(n_kin);
                n_kin += p;
            }
        }
        let n_edges = mesh.edges.len();
        let shear_base = 3 * n_kin;
        let moment_base = shear_base + n_edges * (p + 1);
        let edge_flux_offset: Vec<usize> = (0..n_edges).map(|e| shear_base + e * (p + 1)).collect();
        let counts = SkeletonCounts {
            deflection: n_kin,
            rotation: 2 * n_kin,
            shear: n_edges * (p + 1),
            moment: 2 * n_edges * (p + 1),
        };

        let element_dofs = mesh
            .elements
            .iter()
            .enumerate()
            .map(|(ei, elem)| {
                let mut dofs = vec![None; layout.n_trace()];
                for comp in 0..3 {
                    let base = layout.kinematic(comp);
                    let shift = comp * n_kin;
                    for k in 0..4 {
                        dofs[base + layout.kinematic_vertex(k)] =
                            vertex_dof[elem.vertex_ids[k]].map(|d| d + shift);
                    }
                    for (le, &ge) in elem.edge_ids.iter().enumerate() {
                        for node in 1..=p {
                            dofs[base + layout.kinematic_edge_node(le, node)] =
                                edge_node_dof[ge].map(|d| d + shift + node - 1);
                        }
                    }
                }
                for (le, &ge) in elem.edge_ids.iter().enumerate() {
                    for j in 0..=p {
                        let local = layout.flux_edge(le, j);
                        dofs[layout.flux(0) + local] = Some(shear_base + ge * (p + 1) + j);
                        dofs[layout.flux(1) + local] = Some(moment_base + ge * (p + 1) + j);
                        dofs[layout.flux(2) + local] =
                            Some(moment_base + counts.shear + ge * (p + 1) + j);
                    }
                }
                debug_assert!(mesh.elements[ei].edge_ids.iter().all(|&e| e < n_edges));
                dofs
            })
            .collect();

        Self {
            layout,
            counts,
            element_dofs,
            edge_flux_offset,
        }
    }

    pub fn n_dofs(&self) -> usize {
        self.counts.total()
    }
}
