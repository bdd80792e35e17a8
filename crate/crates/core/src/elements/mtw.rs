//! The Mardal–Tai–Winther local space.
//!
//! On each triangle the space is the set of vector cubics with elementwise
//! constant divergence and edgewise affine normal traces; its nine degrees of
//! freedom are two normal moments (against 1 and the affine edge parameter)
//! and the tangential mean per edge, all taken in the global edge frame.
//!
//! Shape functions are constructed directly on the physical triangle: an
//! 11x20 constraint matrix carves the local space out of the 20-dimensional
//! vector cubics, and a 9x9 duality solve makes the nullspace basis dual to
//! the DOF functionals.

use crate::elements::quadrature::EdgeQuadRule;
use crate::error::{Error, Result};
use crate::geometry::{Mat2, Vec2};
use crate::mesh::Mesh;
use nalgebra::DMatrix;

/// Monomial exponents (i, j) for x^i y^j up to degree 3.
const MONO: [(i32, i32); 10] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
];

const N_SHAPE: usize = 9;
const N_COEFF: usize = 20;
const N_CONSTRAINT: usize = 11;
const COND_LIMIT: f64 = 1e8;

/// Shape functions of one triangle, stored as monomial coefficients in
/// centroid-scaled local coordinates.
#[derive(Clone, Debug)]
pub struct MtwLocalBasis {
    pub tri: usize,
    centroid: Vec2,
    scale: f64,
    /// coeffs[i][k*10 + m]: shape i, component k, monomial m.
    coeffs: [[f64; N_COEFF]; N_SHAPE],
    divergences: [f64; N_SHAPE],
}

impl MtwLocalBasis {
    pub fn build(mesh: &Mesh, tri: usize, edge_rule: &EdgeQuadRule) -> Result<MtwLocalBasis> {
        let verts = mesh.triangle_vertices(tri);
        let centroid = (verts[0] + verts[1] + verts[2]).scale(1.0 / 3.0);
        let scale = mesh.triangle_edges[tri]
            .iter()
            .map(|&(e, _)| mesh.edge_length(e))
            .fold(0.0f64, f64::max);

        let constraints = constraint_matrix(mesh, tri, centroid, scale, edge_rule);
        let nullspace = nullspace_basis(&constraints, tri)?;

        // Duality: evaluate the nine DOF functionals on the nullspace basis.
        let mut dof_matrix = DMatrix::<f64>::zeros(N_SHAPE, N_SHAPE);
        for (j, psi) in nullspace.iter().enumerate() {
            let dofs = evaluate_dofs(mesh, tri, centroid, scale, edge_rule, psi);
            for i in 0..N_SHAPE {
                dof_matrix[(i, j)] = dofs[i];
            }
        }

        let svd = dof_matrix.clone().svd(false, false);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        let cond = smax / smin.max(f64::MIN_POSITIVE);
        if !(cond <= COND_LIMIT) {
            return Err(Error::DegenerateTriangle { tri, cond });
        }

        let inv = dof_matrix
            .lu()
            .solve(&DMatrix::identity(N_SHAPE, N_SHAPE))
            .ok_or(Error::DegenerateTriangle { tri, cond })?;

        let mut coeffs = [[0.0; N_COEFF]; N_SHAPE];
        for i in 0..N_SHAPE {
            for k in 0..N_SHAPE {
                let c = inv[(k, i)];
                for m in 0..N_COEFF {
                    coeffs[i][m] += c * nullspace[k][m];
                }
            }
        }

        let mut divergences = [0.0; N_SHAPE];
        for i in 0..N_SHAPE {
            // The constraints zero every non-constant divergence term, so the
            // divergence is (d/dx of the x-linear term + d/dy of the y-linear
            // term) / scale.
            divergences[i] = (coeffs[i][1] + coeffs[i][10 + 2]) / scale;
        }

        Ok(MtwLocalBasis {
            tri,
            centroid,
            scale,
            coeffs,
            divergences,
        })
    }

    /// Values of the nine shape functions at a physical point.
    pub fn eval(&self, x: Vec2) -> [Vec2; N_SHAPE] {
        let local = (x - self.centroid).scale(1.0 / self.scale);
        let mono = monomials(local);
        let mut out = [Vec2::ZERO; N_SHAPE];
        for i in 0..N_SHAPE {
            let mut vx = 0.0;
            let mut vy = 0.0;
            for m in 0..10 {
                vx += self.coeffs[i][m] * mono[m];
                vy += self.coeffs[i][10 + m] * mono[m];
            }
            out[i] = Vec2::new(vx, vy);
        }
        out
    }

    /// Gradients of the nine shape functions at a physical point; row i of
    /// each matrix is the gradient of component i.
    pub fn eval_gradients(&self, x: Vec2) -> [Mat2; N_SHAPE] {
        let local = (x - self.centroid).scale(1.0 / self.scale);
        let (dx, dy) = monomial_derivatives(local);
        let inv_scale = 1.0 / self.scale;
        let mut out = [Mat2::ZERO; N_SHAPE];
        for i in 0..N_SHAPE {
            let mut g = [[0.0; 2]; 2];
            for m in 0..10 {
                g[0][0] += self.coeffs[i][m] * dx[m];
                g[0][1] += self.coeffs[i][m] * dy[m];
                g[1][0] += self.coeffs[i][10 + m] * dx[m];
                g[1][1] += self.coeffs[i][10 + m] * dy[m];
            }
            out[i] = Mat2::new(g[0][0], g[0][1], g[1][0], g[1][1]) * inv_scale;
        }
        out
    }

    /// Elementwise-constant divergences of the nine shape functions.
    pub fn divergences(&self) -> &[f64; N_SHAPE] {
        &self.divergences
    }
}

fn monomials(p: Vec2) -> [f64; 10] {
    let mut out = [0.0; 10];
    for (m, &(i, j)) in MONO.iter().enumerate() {
        out[m] = p.x.powi(i) * p.y.powi(j);
    }
    out
}

fn monomial_derivatives(p: Vec2) -> ([f64; 10], [f64; 10]) {
    let (x, y) = (p.x, p.y);
    let dx = [
        0.0,
        1.0,
        0.0,
        2.0 * x,
        y,
        0.0,
        3.0 * x * x,
        2.0 * x * y,
        y * y,
        0.0,
    ];
    let dy = [
        0.0,
        0.0,
        1.0,
        0.0,
        x,
        2.0 * y,
        0.0,
        x * x,
        2.0 * x * y,
        3.0 * y * y,
    ];
    (dx, dy)
}

fn legendre2(s: f64) -> f64 {
    1.5 * s * s - 0.5
}

fn legendre3(s: f64) -> f64 {
    2.5 * s * s * s - 1.5 * s
}

/// Rows: 5 forcing the divergence into the constants, then for each edge the
/// degree-2 and degree-3 Legendre moments of the normal trace.
fn constraint_matrix(
    mesh: &Mesh,
    tri: usize,
    centroid: Vec2,
    scale: f64,
    edge_rule: &EdgeQuadRule,
) -> DMatrix<f64> {
    let mut a = DMatrix::<f64>::zeros(N_CONSTRAINT, N_COEFF);

    // div v in local coordinates; coefficients of x, y, x^2, xy, y^2 vanish.
    a[(0, 3)] = 2.0;
    a[(0, 10 + 4)] = 1.0;
    a[(1, 4)] = 1.0;
    a[(1, 10 + 5)] = 2.0;
    a[(2, 6)] = 3.0;
    a[(2, 10 + 7)] = 1.0;
    a[(3, 7)] = 2.0;
    a[(3, 10 + 8)] = 2.0;
    a[(4, 8)] = 1.0;
    a[(4, 10 + 9)] = 3.0;

    for (local_edge, &(e, _)) in mesh.triangle_edges[tri].iter().enumerate() {
        let [p, q] = mesh.edge_endpoints(e);
        let n = mesh.edge_normal(e);
        for (x, s, w) in edge_rule.on_segment(p, q) {
            let mono = monomials((x - centroid).scale(1.0 / scale));
            // Normalize by edge length to keep rows O(1).
            let w = w / mesh.edge_length(e);
            for m in 0..10 {
                a[(5 + 2 * local_edge, m)] += w * mono[m] * n.x * legendre2(s);
                a[(5 + 2 * local_edge, 10 + m)] += w * mono[m] * n.y * legendre2(s);
                a[(5 + 2 * local_edge + 1, m)] += w * mono[m] * n.x * legendre3(s);
                a[(5 + 2 * local_edge + 1, 10 + m)] += w * mono[m] * n.y * legendre3(s);
            }
        }
    }
    a
}

/// Orthonormal basis of the nullspace of the constraint matrix, via the
/// projector onto the complement of its row space.
fn nullspace_basis(a: &DMatrix<f64>, tri: usize) -> Result<Vec<[f64; N_COEFF]>> {
    let svd = a.transpose().svd(true, false);
    let smax = svd.singular_values.max();
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > smax * 1e-10)
        .count();
    if rank != N_CONSTRAINT {
        return Err(Error::ConstraintRankDeficient {
            tri,
            rank,
            expected: N_CONSTRAINT,
        });
    }
    let u = svd.u.as_ref().expect("svd with u requested");
    let projector = DMatrix::<f64>::identity(N_COEFF, N_COEFF) - u * u.transpose();
    let eig = nalgebra::SymmetricEigen::new(projector);

    let mut basis = Vec::with_capacity(N_SHAPE);
    for k in 0..N_COEFF {
        if eig.eigenvalues[k] > 0.5 {
            let col = eig.eigenvectors.column(k);
            let mut v = [0.0; N_COEFF];
            for m in 0..N_COEFF {
                v[m] = col[m];
            }
            basis.push(v);
        }
    }
    if basis.len() != N_SHAPE {
        return Err(Error::ConstraintRankDeficient {
            tri,
            rank: N_COEFF - basis.len(),
            expected: N_CONSTRAINT,
        });
    }
    Ok(basis)
}

/// The nine DOF functionals applied to a polynomial given by coefficients.
fn evaluate_dofs(
    mesh: &Mesh,
    tri: usize,
    centroid: Vec2,
    scale: f64,
    edge_rule: &EdgeQuadRule,
    coeffs: &[f64; N_COEFF],
) -> [f64; N_SHAPE] {
    let eval = |x: Vec2| -> Vec2 {
        let mono = monomials((x - centroid).scale(1.0 / scale));
        let mut vx = 0.0;
        let mut vy = 0.0;
        for m in 0..10 {
            vx += coeffs[m] * mono[m];
            vy += coeffs[10 + m] * mono[m];
        }
        Vec2::new(vx, vy)
    };
    mtw_dof_functionals(mesh, tri, edge_rule, eval)
}

/// The nine local DOF functionals of a triangle applied to a vector field:
/// per edge, the normal moments against 1 and the affine parameter and the
/// tangential mean, ordered edge-major.
pub fn mtw_dof_functionals(
    mesh: &Mesh,
    tri: usize,
    edge_rule: &EdgeQuadRule,
    v: impl Fn(Vec2) -> Vec2,
) -> [f64; N_SHAPE] {
    let mut out = [0.0; N_SHAPE];
    for (local_edge, &(e, _)) in mesh.triangle_edges[tri].iter().enumerate() {
        let [p, q] = mesh.edge_endpoints(e);
        let n = mesh.edge_normal(e);
        let t = mesh.edge_tangent(e);
        for (x, s, w) in edge_rule.on_segment(p, q) {
            let val = v(x);
            out[3 * local_edge] += w * val.dot(n);
            out[3 * local_edge + 1] += w * val.dot(n) * s;
            out[3 * local_edge + 2] += w * val.dot(t);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Mesh;

    fn single_triangle() -> Mesh {
        Mesh::from_raw(
            vec![
                Vec2::new(0.1, 0.2),
                Vec2::new(0.9, 0.3),
                Vec2::new(0.4, 0.8),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap()
    }

    fn build(mesh: &Mesh, tri: usize) -> MtwLocalBasis {
        let rule = EdgeQuadRule::new(10).unwrap();
        MtwLocalBasis::build(mesh, tri, &rule).unwrap()
    }

    #[test]
    fn nullspace_dimension_is_nine() {
        let mesh = single_triangle();
        let rule = EdgeQuadRule::new(10).unwrap();
        let verts = mesh.triangle_vertices(0);
        let centroid = (verts[0] + verts[1] + verts[2]).scale(1.0 / 3.0);
        let a = constraint_matrix(&mesh, 0, centroid, 1.0, &rule);
        let basis = nullspace_basis(&a, 0).unwrap();
        assert_eq!(basis.len(), 9);
        assert_eq!(N_COEFF - N_CONSTRAINT, 9);
    }

    #[test]
    fn dof_duality_is_identity() {
        let mesh = Mesh::structured(2).unwrap();
        let rule = EdgeQuadRule::new(10).unwrap();
        for tri in 0..mesh.num_triangles() {
            let basis = build(&mesh, tri);
            for i in 0..9 {
                let coeffs = basis.coeffs[i];
                let dofs = evaluate_dofs(&mesh, tri, basis.centroid, basis.scale, &rule, &coeffs);
                for j in 0..9 {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (dofs[j] - expect).abs() < 1e-10,
                        "tri {tri}: dof {j} of shape {i} = {}",
                        dofs[j]
                    );
                }
            }
        }
    }

    #[test]
    fn divergence_constant_on_element() {
        let mesh = single_triangle();
        let basis = build(&mesh, 0);
        let rule = crate::elements::quadrature::QuadRule::new(6).unwrap();
        let max_div = basis
            .divergences()
            .iter()
            .fold(0.0f64, |m, d| m.max(d.abs()));
        for (x, _) in rule.physical(mesh.triangle_vertices(0)) {
            let grads = basis.eval_gradients(x);
            for i in 0..9 {
                let div = grads[i].trace();
                assert!(
                    (div - basis.divergences()[i]).abs() <= 1e-10 * max_div.max(1.0),
                    "shape {i}: div {div} vs {}",
                    basis.divergences()[i]
                );
            }
        }
    }

    #[test]
    fn normal_trace_is_edge_affine() {
        let mesh = single_triangle();
        let basis = build(&mesh, 0);
        let rule = EdgeQuadRule::new(10).unwrap();
        let scale: f64 = 1.0;
        for &(e, _) in &mesh.triangle_edges[0] {
            let [p, q] = mesh.edge_endpoints(e);
            let n = mesh.edge_normal(e);
            for i in 0..9 {
                let mut m2 = 0.0;
                let mut m3 = 0.0;
                for (x, s, w) in rule.on_segment(p, q) {
                    let v = basis.eval(x)[i];
                    m2 += w * v.dot(n) * legendre2(s);
                    m3 += w * v.dot(n) * legendre3(s);
                }
                assert!(m2.abs() <= 1e-10 * scale, "quadratic moment {m2}");
                assert!(m3.abs() <= 1e-10 * scale, "cubic moment {m3}");
            }
        }
    }

    #[test]
    fn degenerate_triangle_detected() {
        let mesh = Mesh::from_raw(
            vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(1.0, 0.0),
                Vec2::new(0.5, 1e-9),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let rule = EdgeQuadRule::new(10).unwrap();
        assert!(MtwLocalBasis::build(&mesh, 0, &rule).is_err());
    }
}
