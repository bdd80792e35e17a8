//! Reference/physical element machinery: quadrature, local bases for the
//! displacement and flux spaces, DOF numbering, and interpolation operators.

mod dofmap;
mod interpolate;
mod mtw;
pub mod quadrature;
mod rt0;

pub use dofmap::DofMap;
pub use interpolate::{interpolate_mtw, interpolate_rt0, project_p0};
pub use mtw::{mtw_dof_functionals, MtwLocalBasis};
pub use quadrature::{EdgeQuadRule, QuadRule};
pub use rt0::{rt0_flux_functionals, Rt0LocalBasis};

use crate::error::Result;
use crate::geometry::{Mat2, Vec2};
use crate::linalg::DenseVector;
use crate::mesh::{BoundarySpec, BoundaryTags, Mesh};

/// Quadrature degree used for stiffness, mass, and coupling integrals.
pub const FORM_QUAD_DEGREE: usize = 6;
/// Quadrature degree used for loads, interpolation moments, and error norms.
pub const DATA_QUAD_DEGREE: usize = 10;
/// Degree of the edge rule used for DOF moments and edge pairings. Higher
/// than the data degree so the truncation error of interpolation moments on
/// coarse meshes stays below the commuting-diagram tolerances.
pub const EDGE_QUAD_DEGREE: usize = 14;

/// A mesh with boundary tags, DOF numbering, per-element bases, and the
/// quadrature rules shared by assembly and verification.
///
/// Everything is immutable after construction and safe to share across
/// threads.
pub struct Discretization {
    pub mesh: Mesh,
    pub tags: BoundaryTags,
    pub dofs: DofMap,
    pub mtw: Vec<MtwLocalBasis>,
    pub rt0: Vec<Rt0LocalBasis>,
    pub quad_forms: QuadRule,
    pub quad_data: QuadRule,
    pub edge_quad: EdgeQuadRule,
}

impl Discretization {
    pub fn build(mesh: Mesh, spec: &BoundarySpec) -> Result<Discretization> {
        let tags = BoundaryTags::build(&mesh, spec)?;
        let dofs = DofMap::build(&mesh, &tags);
        let edge_quad = EdgeQuadRule::new(EDGE_QUAD_DEGREE)?;
        let mut mtw = Vec::with_capacity(mesh.num_triangles());
        let mut rt0 = Vec::with_capacity(mesh.num_triangles());
        for tri in 0..mesh.num_triangles() {
            mtw.push(MtwLocalBasis::build(&mesh, tri, &edge_quad)?);
            rt0.push(Rt0LocalBasis::build(&mesh, tri)?);
        }
        Ok(Discretization {
            mesh,
            tags,
            dofs,
            mtw,
            rt0,
            quad_forms: QuadRule::new(FORM_QUAD_DEGREE)?,
            quad_data: QuadRule::new(DATA_QUAD_DEGREE)?,
            edge_quad,
        })
    }

    pub fn structured(n: usize, spec: &BoundarySpec) -> Result<Discretization> {
        Discretization::build(Mesh::structured(n)?, spec)
    }

    /// Value of the discrete displacement field on a triangle.
    pub fn displacement_at(&self, tri: usize, coeffs: &DenseVector, x: Vec2) -> Vec2 {
        let locals = self.dofs.displacement_local(&self.mesh, tri);
        let values = self.mtw[tri].eval(x);
        let mut out = Vec2::ZERO;
        for (i, dof) in locals.iter().enumerate() {
            if let Some(g) = dof {
                out = out + values[i].scale(coeffs[*g]);
            }
        }
        out
    }

    /// Gradient of the discrete displacement field on a triangle.
    pub fn displacement_gradient_at(&self, tri: usize, coeffs: &DenseVector, x: Vec2) -> Mat2 {
        let locals = self.dofs.displacement_local(&self.mesh, tri);
        let grads = self.mtw[tri].eval_gradients(x);
        let mut out = Mat2::ZERO;
        for (i, dof) in locals.iter().enumerate() {
            if let Some(g) = dof {
                out = out + grads[i] * coeffs[*g];
            }
        }
        out
    }

    /// Elementwise-constant divergence of the discrete displacement field.
    pub fn displacement_divergence(&self, tri: usize, coeffs: &DenseVector) -> f64 {
        let locals = self.dofs.displacement_local(&self.mesh, tri);
        let divs = self.mtw[tri].divergences();
        locals
            .iter()
            .enumerate()
            .filter_map(|(i, dof)| dof.map(|g| divs[i] * coeffs[g]))
            .sum()
    }

    /// Value of the discrete flux field on a triangle.
    pub fn flux_at(&self, tri: usize, coeffs: &DenseVector, x: Vec2) -> Vec2 {
        let locals = self.dofs.flux_local(&self.mesh, tri);
        let values = self.rt0[tri].eval(x);
        let mut out = Vec2::ZERO;
        for (i, dof) in locals.iter().enumerate() {
            if let Some(g) = dof {
                out = out + values[i].scale(coeffs[*g]);
            }
        }
        out
    }

    /// Elementwise-constant divergence of the discrete flux field.
    pub fn flux_divergence(&self, tri: usize, coeffs: &DenseVector) -> f64 {
        let locals = self.dofs.flux_local(&self.mesh, tri);
        let divs = self.rt0[tri].divergences();
        locals
            .iter()
            .enumerate()
            .filter_map(|(i, dof)| dof.map(|g| divs[i] * coeffs[g]))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn disc(n: usize) -> Discretization {
        Discretization::structured(n, &BoundarySpec::default()).unwrap()
    }

    #[test]
    fn mtw_interpolation_reproduces_linears() {
        // Constants and rigid rotations are vector linears, hence members of
        // the local space; interpolation must reproduce them pointwise on
        // every triangle whose DOFs are not clamped away.
        let d = disc(4);
        let fields: [fn(Vec2) -> Vec2; 2] = [|_| Vec2::new(1.0, 0.0), |x| Vec2::new(x.y, -x.x)];
        for (fi, f) in fields.iter().enumerate() {
            let coeffs = interpolate_mtw(&d, f);
            let mut checked = 0;
            for tri in 0..d.mesh.num_triangles() {
                let interior = d
                    .dofs
                    .displacement_local(&d.mesh, tri)
                    .iter()
                    .all(|g| g.is_some());
                if !interior {
                    continue;
                }
                checked += 1;
                for (x, _) in d.quad_forms.physical(d.mesh.triangle_vertices(tri)) {
                    let vh = d.displacement_at(tri, &coeffs, x);
                    let v = f(x);
                    assert!(
                        (vh - v).norm() < 1e-12,
                        "field {fi}, tri {tri}: {:?} vs {:?}",
                        vh,
                        v
                    );
                }
            }
            assert!(checked >= 8, "only {checked} fully interior triangles");
        }
    }

    #[test]
    fn rt0_interpolation_reproduces_members() {
        let d = disc(2);
        let fields: [fn(Vec2) -> Vec2; 2] = [|_| Vec2::new(1.0, 0.0), |x| x];
        for f in fields {
            let coeffs = interpolate_rt0(&d, f);
            for tri in 0..d.mesh.num_triangles() {
                for (x, _) in d.quad_forms.physical(d.mesh.triangle_vertices(tri)) {
                    let wh = d.flux_at(tri, &coeffs, x);
                    assert!((wh - f(x)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn zero_field_interpolates_to_zero() {
        let d = disc(2);
        let coeffs = interpolate_mtw(&d, |_| Vec2::ZERO);
        assert!(coeffs.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn p0_projection_of_constant_and_linear() {
        let d = disc(2);
        let c = project_p0(&d, |_| 3.5);
        assert!(c.iter().all(|&v| (v - 3.5).abs() < 1e-13));

        // The mean of a linear is its centroid value; on the triangle with
        // vertices (0,0), (1,0), (0,1) the mean of x is 1/3.
        let means = project_p0(&d, |x| x.x);
        for tri in 0..d.mesh.num_triangles() {
            let verts = d.mesh.triangle_vertices(tri);
            let centroid_x = (verts[0].x + verts[1].x + verts[2].x) / 3.0;
            assert!((means[tri] - centroid_x).abs() < 1e-13);
        }
        let lower_left = means[0];
        let expect = (0.0 + 0.5 + 0.5) / 3.0;
        assert!((lower_left - expect).abs() < 1e-13);
    }

    #[test]
    fn mtw_commuting_property_elementwise() {
        // div (interpolant of v) has the elementwise mean of div v, for v
        // vanishing on the clamped boundary.
        let d = disc(4);
        let v = |x: Vec2| {
            let s = (PI * x.x).sin() * (PI * x.y).sin();
            Vec2::new(s, s)
        };
        let div_v = |x: Vec2| {
            PI * (PI * x.x).cos() * (PI * x.y).sin() + PI * (PI * x.x).sin() * (PI * x.y).cos()
        };
        let coeffs = interpolate_mtw(&d, v);
        let mut scale = 0.0f64;
        let mut worst = 0.0f64;
        for tri in 0..d.mesh.num_triangles() {
            let area = d.mesh.triangle_area(tri);
            let dh = d.displacement_divergence(tri, &coeffs) * area;
            let exact: f64 = d
                .quad_data
                .physical(d.mesh.triangle_vertices(tri))
                .iter()
                .map(|&(x, w)| w * div_v(x))
                .sum();
            scale = scale.max(exact.abs());
            worst = worst.max((dh - exact).abs());
        }
        assert!(
            worst <= 1e-9 * scale.max(1e-14),
            "worst {worst}, scale {scale}"
        );
    }

    #[test]
    fn rt0_commuting_property_elementwise() {
        let d = disc(4);
        let w = |x: Vec2| {
            Vec2::new(
                PI * (PI * x.x).cos() * (PI * x.y).sin(),
                PI * (PI * x.x).sin() * (PI * x.y).cos(),
            )
        };
        let div_w = |x: Vec2| -2.0 * PI * PI * (PI * x.x).sin() * (PI * x.y).sin();
        let coeffs = interpolate_rt0(&d, w);
        let mut scale = 0.0f64;
        let mut worst = 0.0f64;
        for tri in 0..d.mesh.num_triangles() {
            let area = d.mesh.triangle_area(tri);
            let dh = d.flux_divergence(tri, &coeffs) * area;
            let exact: f64 = d
                .quad_data
                .physical(d.mesh.triangle_vertices(tri))
                .iter()
                .map(|&(x, w)| w * div_w(x))
                .sum();
            scale = scale.max(exact.abs());
            worst = worst.max((dh - exact).abs());
        }
        assert!(
            worst <= 1e-9 * scale.max(1e-14),
            "worst {worst}, scale {scale}"
        );
    }

    #[test]
    fn interpolation_errors_decay_first_order() {
        let v = |x: Vec2| {
            let s = (PI * x.x).sin() * (PI * x.y).sin();
            Vec2::new(s, s)
        };
        let mut errors_u = Vec::new();
        let mut errors_z = Vec::new();
        let mut errors_p = Vec::new();
        for n in [4usize, 8, 16] {
            let d = disc(n);
            let cu = interpolate_mtw(&d, v);
            let cz = interpolate_rt0(&d, v);
            let cp = project_p0(&d, |x| (PI * x.x).sin() * (PI * x.y).sin());
            let mut eu = 0.0;
            let mut ez = 0.0;
            let mut ep = 0.0;
            for tri in 0..d.mesh.num_triangles() {
                for (x, w) in d.quad_data.physical(d.mesh.triangle_vertices(tri)) {
                    let du = d.displacement_at(tri, &cu, x) - v(x);
                    let dz = d.flux_at(tri, &cz, x) - v(x);
                    let dp = cp[tri] - (PI * x.x).sin() * (PI * x.y).sin();
                    eu += w * du.dot(du);
                    ez += w * dz.dot(dz);
                    ep += w * dp * dp;
                }
            }
            errors_u.push(eu.sqrt());
            errors_z.push(ez.sqrt());
            errors_p.push(ep.sqrt());
        }
        for errs in [&errors_u, &errors_z, &errors_p] {
            for k in 1..errs.len() {
                let rate = (errs[k - 1] / errs[k]).log2();
                assert!(rate >= 0.9, "rate {rate} from {errs:?}");
            }
        }
    }

    #[test]
    fn global_conformity_of_random_member() {
        // A random coefficient vector defines one global function: the edge
        // moments seen from the two adjacent triangles must coincide.
        use rand::{RngExt, SeedableRng};
        let d = disc(3);
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let coeffs: DenseVector = (0..d.dofs.dim_displacement())
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        for e in 0..d.mesh.num_edges() {
            if d.mesh.is_boundary_edge(e) {
                continue;
            }
            let [plus, minus] = d.mesh.edge_triangles[e];
            let (ta, tb) = (plus.unwrap(), minus.unwrap());
            let [p, q] = d.mesh.edge_endpoints(e);
            let n = d.mesh.edge_normal(e);
            let t = d.mesh.edge_tangent(e);
            let mut moments = [0.0f64; 3];
            for (x, s, w) in d.edge_quad.on_segment(p, q) {
                let jump = d.displacement_at(ta, &coeffs, x) - d.displacement_at(tb, &coeffs, x);
                moments[0] += w * jump.dot(n);
                moments[1] += w * jump.dot(n) * s;
                moments[2] += w * jump.dot(t);
            }
            for m in moments {
                assert!(m.abs() <= 1e-10, "edge {e}: moment mismatch {m}");
            }
        }
    }
}
