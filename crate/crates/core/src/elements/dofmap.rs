//! Global DOF numbering for the three spaces, with essential boundary DOFs
//! eliminated at build time.
//!
//! Because shape functions on both sides of an edge are dual to the same
//! global functionals, a shared edge DOF maps to the same global index from
//! both adjacent triangles with no sign bookkeeping.

use crate::mesh::{BoundaryTags, Mesh};

#[derive(Clone, Debug)]
pub struct DofMap {
    dim_displacement: usize,
    dim_flux: usize,
    dim_pressure: usize,
    /// 3 slots per edge; None on clamped (Γ_d) edges.
    displacement_dofs: Vec<Option<usize>>,
    /// 1 slot per edge; None on no-flow (Γ_f) edges.
    flux_dofs: Vec<Option<usize>>,
}

impl DofMap {
    pub fn build(mesh: &Mesh, tags: &BoundaryTags) -> DofMap {
        let n_edges = mesh.num_edges();
        let mut displacement_dofs = vec![None; 3 * n_edges];
        let mut flux_dofs = vec![None; n_edges];
        let mut next_u = 0;
        let mut next_z = 0;
        for e in 0..n_edges {
            if !tags.is_gamma_d(e) {
                for k in 0..3 {
                    displacement_dofs[3 * e + k] = Some(next_u);
                    next_u += 1;
                }
            }
            if !tags.is_gamma_f(e) {
                flux_dofs[e] = Some(next_z);
                next_z += 1;
            }
        }
        DofMap {
            dim_displacement: next_u,
            dim_flux: next_z,
            dim_pressure: mesh.num_triangles(),
            displacement_dofs,
            flux_dofs,
        }
    }

    pub fn dim_displacement(&self) -> usize {
        self.dim_displacement
    }

    pub fn dim_flux(&self) -> usize {
        self.dim_flux
    }

    pub fn dim_pressure(&self) -> usize {
        self.dim_pressure
    }

    /// Global DOFs of the three displacement functionals on an edge:
    /// constant normal moment, affine normal moment, tangential mean.
    pub fn displacement_edge_dofs(&self, edge: usize) -> [Option<usize>; 3] {
        [
            self.displacement_dofs[3 * edge],
            self.displacement_dofs[3 * edge + 1],
            self.displacement_dofs[3 * edge + 2],
        ]
    }

    pub fn flux_edge_dof(&self, edge: usize) -> Option<usize> {
        self.flux_dofs[edge]
    }

    /// Local-to-global table for the 9 displacement DOFs of a triangle,
    /// ordered edge-major to match the local basis.
    pub fn displacement_local(&self, mesh: &Mesh, tri: usize) -> [Option<usize>; 9] {
        let mut out = [None; 9];
        for (j, &(e, _)) in mesh.triangle_edges[tri].iter().enumerate() {
            let dofs = self.displacement_edge_dofs(e);
            out[3 * j..3 * j + 3].copy_from_slice(&dofs);
        }
        out
    }

    /// Local-to-global table for the 3 flux DOFs of a triangle.
    pub fn flux_local(&self, mesh: &Mesh, tri: usize) -> [Option<usize>; 3] {
        let mut out = [None; 3];
        for (j, &(e, _)) in mesh.triangle_edges[tri].iter().enumerate() {
            out[j] = self.flux_edge_dof(e);
        }
        out
    }
}
