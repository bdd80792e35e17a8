//! Closed-form exact solutions with their induced sources.
//!
//! Both built-in cases live on the unit square with the whole boundary
//! clamped and drained. The sources are linear in the material parameters,
//! and that linearity is what the finite-difference residual check exploits:
//! it verifies the identities at unit-scale parameters where the
//! finite-difference roundoff floor is far below the tolerance.

use crate::assembly::MaterialParams;
use crate::error::{Error, Result};
use crate::geometry::{Mat2, Vec2};
use rand::{RngExt, SeedableRng};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug)]
enum CaseKind {
    /// u = e^{-t} (sin pi x sin pi y, sin pi x sin pi y), p = e^{-t} sin pi x sin pi y.
    Smooth,
    /// u = e^{-t} curl (x(1-x)y(1-y))^2 (divergence-free), same pressure.
    DivFree,
}

/// A manufactured exact solution: evaluators for the three fields, their
/// derivatives, and the body force / fluid source they induce.
#[derive(Clone, Debug)]
pub struct ManufacturedCase {
    pub name: &'static str,
    pub params: MaterialParams,
    kind: CaseKind,
}

/// Looks up a built-in case by name.
pub fn builtin_case(name: &str, params: MaterialParams) -> Result<ManufacturedCase> {
    match name {
        "smooth" => Ok(ManufacturedCase {
            name: "smooth",
            params,
            kind: CaseKind::Smooth,
        }),
        "divfree" => Ok(ManufacturedCase {
            name: "divfree",
            params,
            kind: CaseKind::DivFree,
        }),
        other => Err(Error::UnknownCase(other.to_string())),
    }
}

/// b(x) = (x(1-x))^2 and its first four derivatives.
fn bubble(x: f64) -> [f64; 5] {
    [
        x * x * (1.0 - x) * (1.0 - x),
        2.0 * x - 6.0 * x * x + 4.0 * x * x * x,
        2.0 - 12.0 * x + 12.0 * x * x,
        -12.0 + 24.0 * x,
        24.0,
    ]
}

impl ManufacturedCase {
    pub fn displacement(&self, x: Vec2, t: f64) -> Vec2 {
        let e = (-t).exp();
        match self.kind {
            CaseKind::Smooth => {
                let s = (PI * x.x).sin() * (PI * x.y).sin();
                Vec2::new(e * s, e * s)
            }
            CaseKind::DivFree => {
                let b = bubble(x.x);
                let c = bubble(x.y);
                Vec2::new(e * b[0] * c[1], -e * b[1] * c[0])
            }
        }
    }

    /// Gradient of the displacement; row i holds the gradient of component i.
    pub fn displacement_gradient(&self, x: Vec2, t: f64) -> Mat2 {
        let e = (-t).exp();
        match self.kind {
            CaseKind::Smooth => {
                let sx = PI * (PI * x.x).cos() * (PI * x.y).sin();
                let sy = PI * (PI * x.x).sin() * (PI * x.y).cos();
                Mat2::new(e * sx, e * sy, e * sx, e * sy)
            }
            CaseKind::DivFree => {
                let b = bubble(x.x);
                let c = bubble(x.y);
                Mat2::new(
                    e * b[1] * c[1],
                    e * b[0] * c[2],
                    -e * b[2] * c[0],
                    -e * b[1] * c[1],
                )
            }
        }
    }

    fn displacement_laplacian(&self, x: Vec2, t: f64) -> Vec2 {
        let e = (-t).exp();
        match self.kind {
            CaseKind::Smooth => {
                let s = (PI * x.x).sin() * (PI * x.y).sin();
                Vec2::new(-2.0 * PI * PI * e * s, -2.0 * PI * PI * e * s)
            }
            CaseKind::DivFree => {
                let b = bubble(x.x);
                let c = bubble(x.y);
                Vec2::new(
                    e * (b[2] * c[1] + b[0] * c[3]),
                    -e * (b[3] * c[0] + b[1] * c[2]),
                )
            }
        }
    }

    fn grad_div_displacement(&self, x: Vec2, t: f64) -> Vec2 {
        let e = (-t).exp();
        match self.kind {
            CaseKind::Smooth => {
                let s = (PI * x.x).sin() * (PI * x.y).sin();
                let cc = (PI * x.x).cos() * (PI * x.y).cos();
                let v = PI * PI * e * (cc - s);
                Vec2::new(v, v)
            }
            CaseKind::DivFree => Vec2::ZERO,
        }
    }

    pub fn divergence(&self, x: Vec2, t: f64) -> f64 {
        self.displacement_gradient(x, t).trace()
    }

    fn divergence_rate(&self, x: Vec2, t: f64) -> f64 {
        // Both cases decay as e^{-t}, so time derivatives flip the sign.
        -self.divergence(x, t)
    }

    pub fn pressure(&self, x: Vec2, t: f64) -> f64 {
        (-t).exp() * (PI * x.x).sin() * (PI * x.y).sin()
    }

    fn pressure_rate(&self, x: Vec2, t: f64) -> f64 {
        -self.pressure(x, t)
    }

    pub fn pressure_gradient(&self, x: Vec2, t: f64) -> Vec2 {
        let e = (-t).exp();
        Vec2::new(
            e * PI * (PI * x.x).cos() * (PI * x.y).sin(),
            e * PI * (PI * x.x).sin() * (PI * x.y).cos(),
        )
    }

    /// The flux unknown equals the pressure gradient.
    pub fn flux(&self, x: Vec2, t: f64) -> Vec2 {
        self.pressure_gradient(x, t)
    }

    pub fn flux_divergence(&self, x: Vec2, t: f64) -> f64 {
        -2.0 * PI * PI * self.pressure(x, t)
    }

    /// Body force induced by the exact solution.
    pub fn body_force(&self, x: Vec2, t: f64) -> Vec2 {
        self.body_force_with(self.params, x, t)
    }

    fn body_force_with(&self, params: MaterialParams, x: Vec2, t: f64) -> Vec2 {
        let lap = self.displacement_laplacian(x, t);
        let gdiv = self.grad_div_displacement(x, t);
        let gp = self.pressure_gradient(x, t);
        gp - lap.scale(params.mu) - gdiv.scale(params.mu + params.lambda)
    }

    /// Fluid source induced by the exact solution.
    pub fn fluid_source(&self, x: Vec2, t: f64) -> f64 {
        self.fluid_source_with(self.params, x, t)
    }

    fn fluid_source_with(&self, params: MaterialParams, x: Vec2, t: f64) -> f64 {
        params.c0 * self.pressure_rate(x, t) + self.divergence_rate(x, t)
            - self.flux_divergence(x, t)
    }

    /// Total stress 2 mu eps(u) + lambda div u I - p I.
    pub fn stress(&self, x: Vec2, t: f64) -> Mat2 {
        let eps = self.displacement_gradient(x, t).sym();
        let div = self.divergence(x, t);
        let p = self.pressure(x, t);
        let mut s = eps * (2.0 * self.params.mu);
        let diag = self.params.lambda * div - p;
        s.rows[0][0] += diag;
        s.rows[1][1] += diag;
        s
    }

    /// Maximum relative residual of the strong equations at random samples,
    /// with the sources recomputed from u and p by central finite
    /// differences (step 1e-5). Checked at two unit-scale parameter sets;
    /// the sources are linear in the parameters.
    pub fn strong_form_residual(&self, samples: usize, seed: u64) -> f64 {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let probes = [
            MaterialParams {
                mu: 1.0,
                lambda: 1.0,
                c0: 1.0,
            },
            MaterialParams {
                mu: 2.0,
                lambda: 3.0,
                c0: 0.5,
            },
        ];
        let h = 1e-5;
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let x = Vec2::new(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
            let t = rng.random_range(0.0..1.0);

            let u = |x: Vec2, t: f64| self.displacement(x, t);
            let p = |x: Vec2, t: f64| self.pressure(x, t);
            let ex = Vec2::new(h, 0.0);
            let ey = Vec2::new(0.0, h);

            let lap_fd = {
                let c = u(x, t);
                let xx = u(x + ex, t) + u(x - ex, t) - c.scale(2.0);
                let yy = u(x + ey, t) + u(x - ey, t) - c.scale(2.0);
                (xx + yy).scale(1.0 / (h * h))
            };
            let div_fd = |x: Vec2, t: f64| {
                (u(x + ex, t).x - u(x - ex, t).x + u(x + ey, t).y - u(x - ey, t).y) / (2.0 * h)
            };
            let grad_div_fd = Vec2::new(
                (div_fd(x + ex, t) - div_fd(x - ex, t)) / (2.0 * h),
                (div_fd(x + ey, t) - div_fd(x - ey, t)) / (2.0 * h),
            );
            let grad_p_fd = Vec2::new(
                (p(x + ex, t) - p(x - ex, t)) / (2.0 * h),
                (p(x + ey, t) - p(x - ey, t)) / (2.0 * h),
            );
            let lap_p_fd = (p(x + ex, t) + p(x - ex, t) + p(x + ey, t) + p(x - ey, t)
                - 4.0 * p(x, t))
                / (h * h);
            let p_rate_fd = (p(x, t + h) - p(x, t - h)) / (2.0 * h);
            let div_rate_fd = (div_fd(x, t + h) - div_fd(x, t - h)) / (2.0 * h);

            // The flux must be the pressure gradient.
            let z_res = (self.flux(x, t) - grad_p_fd).norm();
            worst = worst.max(z_res / (1.0 + self.flux(x, t).norm()));

            for params in probes {
                let f_fd = grad_p_fd
                    - lap_fd.scale(params.mu)
                    - grad_div_fd.scale(params.mu + params.lambda);
                let f = self.body_force_with(params, x, t);
                worst = worst.max((f_fd - f).norm() / (1.0 + f.norm()));

                let g_fd = params.c0 * p_rate_fd + div_rate_fd - lap_p_fd;
                let g = self.fluid_source_with(params, x, t);
                worst = worst.max((g_fd - g).abs() / (1.0 + g.abs()));
            }
        }
        worst
    }

    /// Maximum of |u| on the clamped boundary and |p| on the drained
    /// boundary over sampled boundary points (both are the whole boundary
    /// for the built-in cases).
    pub fn boundary_residual(&self, samples_per_side: usize) -> f64 {
        let mut worst = 0.0f64;
        for k in 0..samples_per_side {
            let s = (k as f64 + 0.5) / samples_per_side as f64;
            for x in [
                Vec2::new(s, 0.0),
                Vec2::new(1.0, s),
                Vec2::new(s, 1.0),
                Vec2::new(0.0, s),
            ] {
                for t in [0.0, 0.37, 1.0] {
                    worst = worst.max(self.displacement(x, t).norm());
                    worst = worst.max(self.pressure(x, t).abs());
                }
            }
        }
        worst
    }
}
