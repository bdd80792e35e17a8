//! Global matrix and vector assembly for the three-field system.
//!
//! Divergence couplings are computed from the cached elementwise-constant
//! divergences rather than quadrature. Essential boundary conditions are
//! handled by DOF elimination in the numbering, never by penalties.

use crate::elements::Discretization;
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::linalg::{CsrMatrix, DenseVector};

/// Material parameters of the isotropic model. The Biot–Willis constant is
/// fixed to one and the hydraulic conductivity to the identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaterialParams {
    /// Shear modulus, > 0.
    pub mu: f64,
    /// Volumetric Lamé parameter, > 0.
    pub lambda: f64,
    /// Constrained specific storage coefficient, >= 0 (zero allowed).
    pub c0: f64,
}

impl MaterialParams {
    pub fn new(mu: f64, lambda: f64, c0: f64) -> Result<MaterialParams> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::InvalidParameter {
                name: "mu",
                value: mu,
            });
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter {
                name: "lambda",
                value: lambda,
            });
        }
        if !(c0 >= 0.0) || !c0.is_finite() {
            return Err(Error::InvalidParameter {
                name: "c0",
                value: c0,
            });
        }
        Ok(MaterialParams { mu, lambda, c0 })
    }
}

impl Default for MaterialParams {
    fn default() -> Self {
        MaterialParams {
            mu: 1.0,
            lambda: 1.0,
            c0: 1.0,
        }
    }
}

/// The five global matrices of the semidiscrete system.
#[derive(Clone, Debug)]
pub struct DiscreteOperators {
    /// Elasticity form on the displacement space.
    pub a_uu: CsrMatrix,
    /// L2 mass on the flux space.
    pub a_zz: CsrMatrix,
    /// Storage mass on the pressure space, diagonal with entries c0 |T|.
    pub a_pp: CsrMatrix,
    /// Divergence coupling pressure x displacement.
    pub b_up: CsrMatrix,
    /// Divergence coupling pressure x flux.
    pub b_zp: CsrMatrix,
    pub params: MaterialParams,
}

impl DiscreteOperators {
    pub fn assemble(disc: &Discretization, params: MaterialParams) -> DiscreteOperators {
        DiscreteOperators {
            a_uu: assemble_elasticity(disc, params),
            a_zz: assemble_rt_mass(disc),
            a_pp: assemble_pressure_mass(disc, params.c0),
            b_up: assemble_div_coupling_u(disc),
            b_zp: assemble_div_coupling_z(disc),
            params,
        }
    }
}

/// Elasticity bilinear form 2 mu (eps(u), eps(v)) + lambda (div u, div v).
pub fn assemble_elasticity(disc: &Discretization, params: MaterialParams) -> CsrMatrix {
    let mesh = &disc.mesh;
    let n = disc.dofs.dim_displacement();
    let mut trip = Vec::new();
    for tri in 0..mesh.num_triangles() {
        let locals = disc.dofs.displacement_local(mesh, tri);
        let basis = &disc.mtw[tri];
        let divs = basis.divergences();
        let area = mesh.triangle_area(tri);
        let mut local = [[0.0; 9]; 9];
        for (x, w) in disc.quad_forms.physical(mesh.triangle_vertices(tri)) {
            let grads = basis.eval_gradients(x);
            let eps: Vec<_> = grads.iter().map(|g| g.sym()).collect();
            for i in 0..9 {
                for j in 0..=i {
                    local[i][j] += w * 2.0 * params.mu * eps[i].frob_dot(eps[j]);
                }
            }
        }
        for i in 0..9 {
            for j in 0..=i {
                local[i][j] += params.lambda * divs[i] * divs[j] * area;
            }
        }
        for i in 0..9 {
            let Some(gi) = locals[i] else { continue };
            for j in 0..9 {
                let Some(gj) = locals[j] else { continue };
                let v = if j <= i { local[i][j] } else { local[j][i] };
                trip.push((gi, gj, v));
            }
        }
    }
    CsrMatrix::from_triplets(n, n, &trip)
}

/// Gram matrix of the broken H1 seminorm (full gradient contraction).
pub fn assemble_grad_gram(disc: &Discretization) -> CsrMatrix {
    assemble_displacement_gram(disc, |gi, gj| gi.frob_dot(*gj))
}

/// Gram matrix of the broken symmetric-gradient seminorm.
pub fn assemble_eps_gram(disc: &Discretization) -> CsrMatrix {
    assemble_displacement_gram(disc, |gi, gj| gi.sym().frob_dot(gj.sym()))
}

fn assemble_displacement_gram(
    disc: &Discretization,
    form: impl Fn(&crate::geometry::Mat2, &crate::geometry::Mat2) -> f64,
) -> CsrMatrix {
    let mesh = &disc.mesh;
    let n = disc.dofs.dim_displacement();
    let mut trip = Vec::new();
    for tri in 0..mesh.num_triangles() {
        let locals = disc.dofs.displacement_local(mesh, tri);
        let basis = &disc.mtw[tri];
        let mut local = [[0.0; 9]; 9];
        for (x, w) in disc.quad_forms.physical(mesh.triangle_vertices(tri)) {
            let grads = basis.eval_gradients(x);
            for i in 0..9 {
                for j in 0..=i {
                    local[i][j] += w * form(&grads[i], &grads[j]);
                }
            }
        }
        for i in 0..9 {
            let Some(gi) = locals[i] else { continue };
            for j in 0..9 {
                let Some(gj) = locals[j] else { continue };
                let v = if j <= i { local[i][j] } else { local[j][i] };
                trip.push((gi, gj, v));
            }
        }
    }
    CsrMatrix::from_triplets(n, n, &trip)
}

/// L2 mass matrix of the flux space.
pub fn assemble_rt_mass(disc: &Discretization) -> CsrMatrix {
    let mesh = &disc.mesh;
    let n = disc.dofs.dim_flux();
    let mut trip = Vec::new();
    for tri in 0..mesh.num_triangles() {
        let locals = disc.dofs.flux_local(mesh, tri);
        let basis = &disc.rt0[tri];
        let mut local = [[0.0; 3]; 3];
        for (x, w) in disc.quad_forms.physical(mesh.triangle_vertices(tri)) {
            let vals = basis.eval(x);
            for i in 0..3 {
                for j in 0..=i {
                    local[i][j] += w * vals[i].dot(vals[j]);
                }
            }
        }
        for i in 0..3 {
            let Some(gi) = locals[i] else { continue };
            for j in 0..3 {
                let Some(gj) = locals[j] else { continue };
                let v = if j <= i { local[i][j] } else { local[j][i] };
                trip.push((gi, gj, v));
            }
        }
    }
    CsrMatrix::from_triplets(n, n, &trip)
}

/// H(div) Gram matrix of the flux space: (w, w') + (div w, div w').
pub fn assemble_rt_hdiv_gram(disc: &Discretization) -> CsrMatrix {
    let mesh = &disc.mesh;
    let n = disc.dofs.dim_flux();
    let mut trip = Vec::new();
    for tri in 0..mesh.num_triangles() {
        let locals = disc.dofs.flux_local(mesh, tri);
        let basis = &disc.rt0[tri];
        let divs = basis.divergences();
        let area = mesh.triangle_area(tri);
        let mut local = [[0.0; 3]; 3];
        for (x, w) in disc.quad_forms.physical(mesh.triangle_vertices(tri)) {
            let vals = basis.eval(x);
            for i in 0..3 {
                for j in 0..=i {
                    local[i][j] += w * vals[i].dot(vals[j]);
                }
            }
        }
        for i in 0..3 {
            for j in 0..=i {
                local[i][j] += divs[i] * divs[j] * area;
            }
        }
        for i in 0..3 {
            let Some(gi) = locals[i] else { continue };
            for j in 0..3 {
                let Some(gj) = locals[j] else { continue };
                let v = if j <= i { local[i][j] } else { local[j][i] };
                trip.push((gi, gj, v));
            }
        }
    }
    CsrMatrix::from_triplets(n, n, &trip)
}

/// Storage mass on piecewise constants: diagonal entries c0 |T|.
pub fn assemble_pressure_mass(disc: &Discretization, c0: f64) -> CsrMatrix {
    let mesh = &disc.mesh;
    let n = disc.dofs.dim_pressure();
    let trip: Vec<_> = (0..mesh.num_triangles())
        .map(|tri| (tri, tri, c0 * mesh.triangle_area(tri)))
        .collect();
    CsrMatrix::from_triplets(n, n, &trip)
}

/// Plain L2 mass on piecewise constants: diagonal entries |T|.
pub fn assemble_pressure_l2_mass(disc: &Discretization) -> CsrMatrix {
    assemble_pressure_mass(disc, 1.0)
}

/// Coupling (q, div v) with rows over pressures, columns over displacements.
pub fn assemble_div_coupling_u(disc: &Discretization) -> CsrMatrix {
    let mesh = &disc.mesh;
    let mut trip = Vec::new();
    for tri in 0..mesh.num_triangles() {
        let locals = disc.dofs.displacement_local(mesh, tri);
        let divs = disc.mtw[tri].divergences();
        let area = mesh.triangle_area(tri);
        for (i, dof) in locals.iter().enumerate() {
            if let Some(g) = dof {
                trip.push((tri, *g, divs[i] * area));
            }
        }
    }
    CsrMatrix::from_triplets(
        disc.dofs.dim_pressure(),
        disc.dofs.dim_displacement(),
        &trip,
    )
}

/// Coupling (q, div w) with rows over pressures, columns over fluxes.
pub fn assemble_div_coupling_z(disc: &Discretization) -> CsrMatrix {
    let mesh = &disc.mesh;
    let mut trip = Vec::new();
    for tri in 0..mesh.num_triangles() {
        let locals = disc.dofs.flux_local(mesh, tri);
        let divs = disc.rt0[tri].divergences();
        let area = mesh.triangle_area(tri);
        for (i, dof) in locals.iter().enumerate() {
            if let Some(g) = dof {
                trip.push((tri, *g, divs[i] * area));
            }
        }
    }
    CsrMatrix::from_triplets(disc.dofs.dim_pressure(), disc.dofs.dim_flux(), &trip)
}

/// Load vector (f, phi_i) over the displacement space.
pub fn assemble_load(disc: &Discretization, f: impl Fn(Vec2) -> Vec2) -> DenseVector {
    let mesh = &disc.mesh;
    let mut out = DenseVector::zeros(disc.dofs.dim_displacement());
    for tri in 0..mesh.num_triangles() {
        let locals = disc.dofs.displacement_local(mesh, tri);
        let basis = &disc.mtw[tri];
        for (x, w) in disc.quad_data.physical(mesh.triangle_vertices(tri)) {
            let vals = basis.eval(x);
            let fx = f(x);
            for (i, dof) in locals.iter().enumerate() {
                if let Some(g) = dof {
                    out[*g] += w * fx.dot(vals[i]);
                }
            }
        }
    }
    out
}

/// Source vector (g, chi_i) over the pressure space.
pub fn assemble_source(disc: &Discretization, g: impl Fn(Vec2) -> f64) -> DenseVector {
    let mesh = &disc.mesh;
    let mut out = DenseVector::zeros(disc.dofs.dim_pressure());
    for tri in 0..mesh.num_triangles() {
        for (x, w) in disc.quad_data.physical(mesh.triangle_vertices(tri)) {
            out[tri] += w * g(x);
        }
    }
    out
}
