//! Lowest-order Raviart–Thomas local space: per triangle, three functions of
//! the form a + b x, dual to edge-normal flux DOFs in the global edge frame.

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::mesh::Mesh;

#[derive(Clone, Debug)]
pub struct Rt0LocalBasis {
    pub tri: usize,
    /// Per local edge: (opposite vertex, coefficient); phi(x) = c (x - v_opp).
    funcs: [(Vec2, f64); 3],
    divergences: [f64; 3],
}

impl Rt0LocalBasis {
    pub fn build(mesh: &Mesh, tri: usize) -> Result<Rt0LocalBasis> {
        let area = mesh.triangle_area(tri);
        if !(area > 0.0) || !area.is_finite() {
            return Err(Error::DegenerateOrFlippedTriangle { tri, area });
        }
        let verts = mesh.triangle_vertices(tri);
        let mut funcs = [(Vec2::ZERO, 0.0); 3];
        let mut divergences = [0.0; 3];
        for (local_edge, &(_, sign)) in mesh.triangle_edges[tri].iter().enumerate() {
            // Dual to the integral flux DOF: the normal distance from the
            // opposite vertex to the edge line is 2|T|/|E|, which cancels the
            // edge length in the flux integral.
            let c = sign / (2.0 * area);
            funcs[local_edge] = (verts[local_edge], c);
            divergences[local_edge] = 2.0 * c;
        }
        Ok(Rt0LocalBasis {
            tri,
            funcs,
            divergences,
        })
    }

    pub fn eval(&self, x: Vec2) -> [Vec2; 3] {
        let mut out = [Vec2::ZERO; 3];
        for i in 0..3 {
            let (opp, c) = self.funcs[i];
            out[i] = (x - opp).scale(c);
        }
        out
    }

    pub fn divergences(&self) -> &[f64; 3] {
        &self.divergences
    }
}

/// The three local flux functionals of a triangle applied to a vector field:
/// per edge, the integral of the normal component in the global frame.
pub fn rt0_flux_functionals(
    mesh: &Mesh,
    tri: usize,
    edge_rule: &crate::elements::quadrature::EdgeQuadRule,
    w_field: impl Fn(Vec2) -> Vec2,
) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (local_edge, &(e, _)) in mesh.triangle_edges[tri].iter().enumerate() {
        let [p, q] = mesh.edge_endpoints(e);
        let n = mesh.edge_normal(e);
        for (x, _, w) in edge_rule.on_segment(p, q) {
            out[local_edge] += w * w_field(x).dot(n);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::quadrature::{EdgeQuadRule, QuadRule};

    #[test]
    fn edge_flux_duality_with_global_normals() {
        let mesh = Mesh::structured(2).unwrap();
        let rule = EdgeQuadRule::new(10).unwrap();
        for tri in 0..mesh.num_triangles() {
            let basis = Rt0LocalBasis::build(&mesh, tri).unwrap();
            for (i, &(ei, _)) in mesh.triangle_edges[tri].iter().enumerate() {
                for (j, &(ej, _)) in mesh.triangle_edges[tri].iter().enumerate() {
                    let [p, q] = mesh.edge_endpoints(ej);
                    let n = mesh.edge_normal(ej);
                    let flux: f64 = rule
                        .on_segment(p, q)
                        .iter()
                        .map(|&(x, _, w)| w * basis.eval(x)[i].dot(n))
                        .sum();
                    let expect = if ei == ej { 1.0 } else { 0.0 };
                    assert!((flux - expect).abs() < 1e-12, "tri {tri} ({i},{j}): {flux}");
                }
            }
        }
    }

    #[test]
    fn divergences_follow_orientation_pattern() {
        let mesh = Mesh::structured(1).unwrap();
        for tri in 0..mesh.num_triangles() {
            let area = mesh.triangle_area(tri);
            let basis = Rt0LocalBasis::build(&mesh, tri).unwrap();
            for (i, &(_, sign)) in mesh.triangle_edges[tri].iter().enumerate() {
                assert!((basis.divergences()[i] - sign / area).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn signed_fluxes_integrate_divergence() {
        // For a smooth field, the signed sum of its three flux DOFs equals
        // the integral of its divergence over the triangle.
        let mesh = Mesh::structured(2).unwrap();
        let edge_rule = EdgeQuadRule::new(10).unwrap();
        let tri_rule = QuadRule::new(10).unwrap();
        let w_field = |x: Vec2| Vec2::new((1.3 * x.x + 0.2 * x.y).sin(), (x.x * x.y).cos());
        let div_w = |x: Vec2| 1.3 * (1.3 * x.x + 0.2 * x.y).cos() - x.x * (x.x * x.y).sin();
        for tri in 0..mesh.num_triangles() {
            let mut signed_flux = 0.0;
            for &(e, sign) in &mesh.triangle_edges[tri] {
                let [p, q] = mesh.edge_endpoints(e);
                let n = mesh.edge_normal(e);
                let flux: f64 = edge_rule
                    .on_segment(p, q)
                    .iter()
                    .map(|&(x, _, w)| w * w_field(x).dot(n))
                    .sum();
                signed_flux += sign * flux;
            }
            let div_integral: f64 = tri_rule
                .physical(mesh.triangle_vertices(tri))
                .iter()
                .map(|&(x, w)| w * div_w(x))
                .sum();
            assert!((signed_flux - div_integral).abs() < 1e-9, "tri {tri}");
        }
    }
}
