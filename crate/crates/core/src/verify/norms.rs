//! Error norms in the topologies of the a priori estimates: the broken H1
//! seminorm for the displacement and L2 norms for pressure and flux, with
//! the maximum taken over every stored time level including the initial one.

use crate::elements::Discretization;
use crate::timestep::SystemState;
use crate::verify::ManufacturedCase;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ErrorNorms {
    pub u_h1: f64,
    pub p_l2: f64,
    pub z_l2: f64,
}

impl ErrorNorms {
    pub fn max(self, other: ErrorNorms) -> ErrorNorms {
        ErrorNorms {
            u_h1: self.u_h1.max(other.u_h1),
            p_l2: self.p_l2.max(other.p_l2),
            z_l2: self.z_l2.max(other.z_l2),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.u_h1.is_finite() && self.p_l2.is_finite() && self.z_l2.is_finite()
    }
}

/// Errors of a single state against the exact solution at its time.
pub fn state_error(
    disc: &Discretization,
    case: &ManufacturedCase,
    state: &SystemState,
) -> ErrorNorms {
    let mesh = &disc.mesh;
    let t = state.t;
    let mut eu = 0.0;
    let mut ep = 0.0;
    let mut ez = 0.0;
    for tri in 0..mesh.num_triangles() {
        let p_h = state.p[tri];
        for (x, w) in disc.quad_data.physical(mesh.triangle_vertices(tri)) {
            let du =
                case.displacement_gradient(x, t) - disc.displacement_gradient_at(tri, &state.u, x);
            let dp = case.pressure(x, t) - p_h;
            let dz = case.flux(x, t) - disc.flux_at(tri, &state.z, x);
            eu += w * du.frob_dot(du);
            ep += w * dp * dp;
            ez += w * dz.dot(dz);
        }
    }
    ErrorNorms {
        u_h1: eu.sqrt(),
        p_l2: ep.sqrt(),
        z_l2: ez.sqrt(),
    }
}

/// Maximum-in-time errors over a trajectory.
pub fn error_norms(
    disc: &Discretization,
    case: &ManufacturedCase,
    states: &[SystemState],
) -> ErrorNorms {
    states
        .iter()
        .map(|s| state_error(disc, case, s))
        .fold(ErrorNorms::default(), ErrorNorms::max)
}
