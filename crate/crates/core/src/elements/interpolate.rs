//! Interpolation operators onto the three discrete spaces: DOF-functional
//! interpolation for the displacement and flux elements and the elementwise
//! L2 projection for pressures. Eliminated boundary DOFs stay zero.

use crate::elements::Discretization;
use crate::geometry::Vec2;
use crate::linalg::DenseVector;

/// Edge-moment interpolation into the displacement space.
pub fn interpolate_mtw(disc: &Discretization, v: impl Fn(Vec2) -> Vec2) -> DenseVector {
    let mesh = &disc.mesh;
    let mut out = DenseVector::zeros(disc.dofs.dim_displacement());
    for e in 0..mesh.num_edges() {
        let dofs = disc.dofs.displacement_edge_dofs(e);
        if dofs[0].is_none() {
            continue;
        }
        let [p, q] = mesh.edge_endpoints(e);
        let n = mesh.edge_normal(e);
        let t = mesh.edge_tangent(e);
        let mut m = [0.0; 3];
        for (x, s, w) in disc.edge_quad.on_segment(p, q) {
            let val = v(x);
            m[0] += w * val.dot(n);
            m[1] += w * val.dot(n) * s;
            m[2] += w * val.dot(t);
        }
        for k in 0..3 {
            out[dofs[k].unwrap()] = m[k];
        }
    }
    out
}

/// Edge-flux interpolation into the Raviart–Thomas space.
pub fn interpolate_rt0(disc: &Discretization, w_field: impl Fn(Vec2) -> Vec2) -> DenseVector {
    let mesh = &disc.mesh;
    let mut out = DenseVector::zeros(disc.dofs.dim_flux());
    for e in 0..mesh.num_edges() {
        let Some(dof) = disc.dofs.flux_edge_dof(e) else {
            continue;
        };
        let [p, q] = mesh.edge_endpoints(e);
        let n = mesh.edge_normal(e);
        let mut flux = 0.0;
        for (x, _, w) in disc.edge_quad.on_segment(p, q) {
            flux += w * w_field(x).dot(n);
        }
        out[dof] = flux;
    }
    out
}

/// Elementwise mean: the orthogonal L2 projection onto piecewise constants.
pub fn project_p0(disc: &Discretization, q: impl Fn(Vec2) -> f64) -> DenseVector {
    let mesh = &disc.mesh;
    let mut out = DenseVector::zeros(disc.dofs.dim_pressure());
    for tri in 0..mesh.num_triangles() {
        let area = mesh.triangle_area(tri);
        let mut integral = 0.0;
        for (x, w) in disc.quad_data.physical(mesh.triangle_vertices(tri)) {
            integral += w * q(x);
        }
        out[tri] = integral / area;
    }
    out
}
