//! The edge consistency functional: the pairing of a tensor's normal trace
//! with the interelement jumps of a displacement-space function.
//!
//! Each adjacent triangle contributes with its orientation sign, which
//! reproduces the jump on interior edges and the outward-normal trace on
//! boundary edges, matching the elementwise integration-by-parts identity.

use crate::elements::Discretization;
use crate::geometry::{Mat2, Vec2};
use crate::linalg::DenseVector;
use crate::verify::ManufacturedCase;

/// E(sigma(t), v) summed over all edges, with sigma the exact total stress.
pub fn consistency_functional(
    disc: &Discretization,
    case: &ManufacturedCase,
    t: f64,
    v: &DenseVector,
) -> f64 {
    let load = assemble_edge_pairing_load(disc, |x| case.stress(x, t));
    load.dot(v)
}

/// The vector l with l_i = E(tensor, phi_i), assembled edge by edge.
pub fn assemble_edge_pairing_load(
    disc: &Discretization,
    tensor: impl Fn(Vec2) -> Mat2,
) -> DenseVector {
    let mesh = &disc.mesh;
    let mut out = DenseVector::zeros(disc.dofs.dim_displacement());
    for e in 0..mesh.num_edges() {
        let [p, q] = mesh.edge_endpoints(e);
        let n = mesh.edge_normal(e);
        let points = disc.edge_quad.on_segment(p, q);
        for (slot, slot_sign) in [(0usize, 1.0), (1usize, -1.0)] {
            let Some(tri) = mesh.edge_triangles[e][slot] else {
                continue;
            };
            let locals = disc.dofs.displacement_local(mesh, tri);
            for &(x, _, w) in &points {
                let traction = tensor(x).apply(n);
                let vals = disc.mtw[tri].eval(x);
                for (i, dof) in locals.iter().enumerate() {
                    if let Some(g) = dof {
                        out[*g] += slot_sign * w * traction.dot(vals[i]);
                    }
                }
            }
        }
    }
    out
}

/// Same pairing against an arbitrary tensor field and a fixed function.
pub fn edge_pairing(disc: &Discretization, tensor: impl Fn(Vec2) -> Mat2, v: &DenseVector) -> f64 {
    assemble_edge_pairing_load(disc, tensor).dot(v)
}

/// The broken H1 seminorm of a displacement coefficient vector.
pub fn broken_h1_norm(disc: &Discretization, v: &DenseVector) -> f64 {
    let mesh = &disc.mesh;
    let mut total = 0.0;
    for tri in 0..mesh.num_triangles() {
        for (x, w) in disc.quad_forms.physical(mesh.triangle_vertices(tri)) {
            let g = disc.displacement_gradient_at(tri, v, x);
            total += w * g.frob_dot(g);
        }
    }
    total.sqrt()
}
