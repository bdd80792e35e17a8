//! Compatible initial data and the implicit time loop.
//!
//! Each step solves one monolithic saddle-point system; the step matrix is
//! constant in time, so its factorization is computed once and reused. The
//! Crank–Nicolson variant averages every non-difference term over the two
//! time levels and shares the same matrix structure with half the step in
//! the flux-divergence block.

use crate::assembly::DiscreteOperators;
use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, DenseVector, Factorization};

/// Coefficients of the three fields at one time level.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemState {
    pub t: f64,
    pub u: DenseVector,
    pub z: DenseVector,
    pub p: DenseVector,
}

impl SystemState {
    pub fn zeros(ops: &DiscreteOperators, t: f64) -> SystemState {
        SystemState {
            t,
            u: DenseVector::zeros(ops.a_uu.nrows()),
            z: DenseVector::zeros(ops.a_zz.nrows()),
            p: DenseVector::zeros(ops.a_pp.nrows()),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.z.is_finite() && self.p.is_finite()
    }
}

/// Uniform time grid on [0, T0] with T0 = N dt exactly by construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub t_final: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(t_final: f64, steps: usize) -> TimeGrid {
        assert!(steps >= 1 && t_final > 0.0);
        TimeGrid { t_final, steps }
    }

    pub fn dt(&self) -> f64 {
        self.t_final / self.steps as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    BackwardEuler,
    CrankNicolson,
}

/// Factorized one-step operator for a fixed time step size.
pub struct StepSolver<'a> {
    ops: &'a DiscreteOperators,
    scheme: Scheme,
    dt: f64,
    matrix: CsrMatrix,
    factorization: Factorization,
    b_up_t: CsrMatrix,
    b_zp_t: CsrMatrix,
    dims: [usize; 3],
}

impl<'a> StepSolver<'a> {
    pub fn new(ops: &'a DiscreteOperators, dt: f64, scheme: Scheme) -> Result<StepSolver<'a>> {
        assert!(dt > 0.0, "time step must be positive");
        let nu = ops.a_uu.nrows();
        let nz = ops.a_zz.nrows();
        let np = ops.a_pp.nrows();
        let n = nu + nz + np;
        let b_up_t = ops.b_up.transpose();
        let b_zp_t = ops.b_zp.transpose();
        // Flux-divergence weight: dt for backward Euler, dt/2 for the
        // trapezoidal variant.
        let w = match scheme {
            Scheme::BackwardEuler => dt,
            Scheme::CrankNicolson => 0.5 * dt,
        };
        let matrix = CsrMatrix::from_blocks(
            n,
            n,
            &[
                (0, 0, 1.0, &ops.a_uu),
                (0, nu + nz, -1.0, &b_up_t),
                (nu, nu, 1.0, &ops.a_zz),
                (nu, nu + nz, 1.0, &b_zp_t),
                (nu + nz, 0, 1.0, &ops.b_up),
                (nu + nz, nu, -w, &ops.b_zp),
                (nu + nz, nu + nz, 1.0, &ops.a_pp),
            ],
        );
        let factorization = Factorization::new(&matrix)?;
        Ok(StepSolver {
            ops,
            scheme,
            dt,
            matrix,
            factorization,
            b_up_t,
            b_zp_t,
            dims: [nu, nz, np],
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    fn solve_split(&self, rhs: &DenseVector, t_next: f64) -> Result<SystemState> {
        let x = self.factorization.solve(rhs)?;
        let mut parts = x.split(&self.dims).into_iter();
        Ok(SystemState {
            t: t_next,
            u: parts.next().unwrap(),
            z: parts.next().unwrap(),
            p: parts.next().unwrap(),
        })
    }

    /// One backward Euler step given the loads at the next time level.
    pub fn backward_euler_step(
        &self,
        state: &SystemState,
        f_next: &DenseVector,
        g_next: &DenseVector,
    ) -> Result<SystemState> {
        debug_assert_eq!(self.scheme, Scheme::BackwardEuler);
        let mut rhs_p = self.ops.a_pp.mul_vec(&state.p)?;
        rhs_p.axpy(1.0, &self.ops.b_up.mul_vec(&state.u)?);
        rhs_p.axpy(self.dt, g_next);
        let zero_z = DenseVector::zeros(self.dims[1]);
        let rhs = DenseVector::concat(&[f_next, &zero_z, &rhs_p]);
        self.solve_split(&rhs, state.t + self.dt)
    }

    /// One Crank–Nicolson step given the loads at both time levels.
    pub fn crank_nicolson_step(
        &self,
        state: &SystemState,
        f_curr: &DenseVector,
        f_next: &DenseVector,
        g_curr: &DenseVector,
        g_next: &DenseVector,
    ) -> Result<SystemState> {
        debug_assert_eq!(self.scheme, Scheme::CrankNicolson);
        let mut rhs_u = f_curr.add(f_next);
        rhs_u.axpy(-1.0, &self.ops.a_uu.mul_vec(&state.u)?);
        rhs_u.axpy(1.0, &self.b_up_t.mul_vec(&state.p)?);

        let mut rhs_z = self.ops.a_zz.mul_vec(&state.z)?;
        rhs_z.axpy(1.0, &self.b_zp_t.mul_vec(&state.p)?);
        rhs_z.scale(-1.0);

        let mut rhs_p = self.ops.a_pp.mul_vec(&state.p)?;
        rhs_p.axpy(1.0, &self.ops.b_up.mul_vec(&state.u)?);
        rhs_p.axpy(0.5 * self.dt, &self.ops.b_zp.mul_vec(&state.z)?);
        rhs_p.axpy(0.5 * self.dt, &g_curr.add(g_next));

        let rhs = DenseVector::concat(&[&rhs_u, &rhs_z, &rhs_p]);
        self.solve_split(&rhs, state.t + self.dt)
    }
}

/// Discrete initial data satisfying the two non-evolutionary equations:
/// the pressure is given (as the elementwise projection of the initial
/// pressure), the displacement balances the initial load against it, and the
/// flux balances the pressure gradient.
pub fn compatible_initial_data(
    ops: &DiscreteOperators,
    p0: &DenseVector,
    f0: &DenseVector,
    t0: f64,
) -> Result<SystemState> {
    let b_up_t = ops.b_up.transpose();
    let b_zp_t = ops.b_zp.transpose();

    let mut rhs_u = f0.clone();
    rhs_u.axpy(1.0, &b_up_t.mul_vec(p0)?);
    let u = Factorization::new(&ops.a_uu)?.solve(&rhs_u)?;

    let mut rhs_z = b_zp_t.mul_vec(p0)?;
    rhs_z.scale(-1.0);
    let z = Factorization::new(&ops.a_zz)?.solve(&rhs_z)?;

    Ok(SystemState {
        t: t0,
        u,
        z,
        p: p0.clone(),
    })
}

/// Runs the time loop, returning the initial state followed by one state per
/// step. The factorization is built once and reused.
pub fn run_transient(
    ops: &DiscreteOperators,
    grid: TimeGrid,
    init: SystemState,
    f_at: impl Fn(f64) -> DenseVector,
    g_at: impl Fn(f64) -> DenseVector,
    scheme: Scheme,
) -> Result<Vec<SystemState>> {
    let dt = grid.dt();
    let solver = StepSolver::new(ops, dt, scheme)?;
    let mut states = Vec::with_capacity(grid.steps + 1);
    states.push(init);
    let mut f_curr = match scheme {
        Scheme::CrankNicolson => Some((f_at(states[0].t), g_at(states[0].t))),
        Scheme::BackwardEuler => None,
    };
    for j in 0..grid.steps {
        let prev = states.last().unwrap();
        let t_next = prev.t + dt;
        let f_next = f_at(t_next);
        let g_next = g_at(t_next);
        let next = match scheme {
            Scheme::BackwardEuler => solver.backward_euler_step(prev, &f_next, &g_next),
            Scheme::CrankNicolson => {
                let (fc, gc) = f_curr.as_ref().unwrap();
                solver.crank_nicolson_step(prev, fc, &f_next, gc, &g_next)
            }
        }
        .map_err(|e| Error::StepFailed {
            step: j + 1,
            source: Box::new(e),
        })?;
        if scheme == Scheme::CrankNicolson {
            f_curr = Some((f_next, g_next));
        }
        states.push(next);
    }
    Ok(states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble_load, assemble_source, MaterialParams};
    use crate::elements::{project_p0, Discretization};
    use crate::geometry::Vec2;
    use crate::mesh::BoundarySpec;
    use crate::verify::builtin_case;

    fn setup(n: usize, params: MaterialParams) -> (Discretization, DiscreteOperators) {
        let disc = Discretization::structured(n, &BoundarySpec::default()).unwrap();
        let ops = DiscreteOperators::assemble(&disc, params);
        (disc, ops)
    }

    #[test]
    fn zero_data_zero_state_stays_zero() {
        for c0 in [0.0, 1.0] {
            let (_, ops) = setup(
                2,
                MaterialParams {
                    mu: 1.0,
                    lambda: 1.0,
                    c0,
                },
            );
            let solver = StepSolver::new(&ops, 0.125, Scheme::BackwardEuler).unwrap();
            let state = SystemState::zeros(&ops, 0.0);
            let f = DenseVector::zeros(ops.a_uu.nrows());
            let g = DenseVector::zeros(ops.a_pp.nrows());
            let next = solver.backward_euler_step(&state, &f, &g).unwrap();
            assert!(next.u.norm() <= 1e-12);
            assert!(next.z.norm() <= 1e-12);
            assert!(next.p.norm() <= 1e-12);

            let cn = StepSolver::new(&ops, 0.125, Scheme::CrankNicolson).unwrap();
            let next = cn.crank_nicolson_step(&state, &f, &f, &g, &g).unwrap();
            assert!(next.u.norm() + next.z.norm() + next.p.norm() <= 1e-12);
        }
    }

    #[test]
    fn degenerate_storage_step_is_well_posed() {
        use rand::{RngExt, SeedableRng};
        let (_, ops) = setup(
            2,
            MaterialParams {
                mu: 1.0,
                lambda: 1.0,
                c0: 0.0,
            },
        );
        let dt = 0.25;
        let solver = StepSolver::new(&ops, dt, Scheme::BackwardEuler).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(17);
        let f: DenseVector = (0..ops.a_uu.nrows())
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let g: DenseVector = (0..ops.a_pp.nrows())
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let state = SystemState::zeros(&ops, 0.0);
        let next = solver.backward_euler_step(&state, &f, &g).unwrap();
        assert!(next.is_finite());

        // Residual of the monolithic system, re-checked directly.
        let x = DenseVector::concat(&[&next.u, &next.z, &next.p]);
        let mut rhs_p = ops.a_pp.mul_vec(&state.p).unwrap();
        rhs_p.axpy(1.0, &ops.b_up.mul_vec(&state.u).unwrap());
        rhs_p.axpy(dt, &g);
        let rhs = DenseVector::concat(&[&f, &DenseVector::zeros(ops.a_zz.nrows()), &rhs_p]);
        let residual = rhs.sub(&solver.matrix().mul_vec(&x).unwrap()).norm() / rhs.norm();
        assert!(residual <= 1e-10, "residual {residual}");
    }

    #[test]
    fn single_step_satisfies_discrete_equations() {
        let case = builtin_case("smooth", MaterialParams::default()).unwrap();
        let (disc, ops) = setup(4, case.params);
        let dt = 0.125;
        let p0 = project_p0(&disc, |x| case.pressure(x, 0.0));
        let f0 = assemble_load(&disc, |x| case.body_force(x, 0.0));
        let init = compatible_initial_data(&ops, &p0, &f0, 0.0).unwrap();

        let solver = StepSolver::new(&ops, dt, Scheme::BackwardEuler).unwrap();
        let f1 = assemble_load(&disc, |x| case.body_force(x, dt));
        let g1 = assemble_source(&disc, |x| case.fluid_source(x, dt));
        let next = solver.backward_euler_step(&init, &f1, &g1).unwrap();

        // Re-assemble everything fresh and evaluate the three equations.
        let ops2 = DiscreteOperators::assemble(&disc, case.params);
        let b_up_t = ops2.b_up.transpose();
        let b_zp_t = ops2.b_zp.transpose();

        let mut r1 = ops2.a_uu.mul_vec(&next.u).unwrap();
        r1.axpy(-1.0, &b_up_t.mul_vec(&next.p).unwrap());
        r1.axpy(-1.0, &f1);
        assert!(
            r1.norm() <= 1e-10 * f1.norm().max(1.0),
            "eq1 residual {}",
            r1.norm()
        );

        let mut r2 = ops2.a_zz.mul_vec(&next.z).unwrap();
        r2.axpy(1.0, &b_zp_t.mul_vec(&next.p).unwrap());
        assert!(r2.norm() <= 1e-10, "eq2 residual {}", r2.norm());

        let dp = next.p.sub(&init.p);
        let du = next.u.sub(&init.u);
        let mut r3 = ops2.a_pp.mul_vec(&dp).unwrap();
        r3.axpy(1.0, &ops2.b_up.mul_vec(&du).unwrap());
        r3.axpy(-dt, &ops2.b_zp.mul_vec(&next.z).unwrap());
        r3.axpy(-dt, &g1);
        assert!(r3.norm() <= 1e-10, "eq3 residual {}", r3.norm());
    }

    #[test]
    fn compatible_initial_data_zero_and_residuals() {
        let (_, ops) = setup(2, MaterialParams::default());
        let p0 = DenseVector::zeros(ops.a_pp.nrows());
        let f0 = DenseVector::zeros(ops.a_uu.nrows());
        let state = compatible_initial_data(&ops, &p0, &f0, 0.0).unwrap();
        assert!(state.u.norm() == 0.0 && state.z.norm() == 0.0 && state.p.norm() == 0.0);

        let case = builtin_case("smooth", MaterialParams::default()).unwrap();
        let (disc, ops) = setup(4, case.params);
        let p0 = project_p0(&disc, |x| case.pressure(x, 0.0));
        let f0 = assemble_load(&disc, |x| case.body_force(x, 0.0));
        let state = compatible_initial_data(&ops, &p0, &f0, 0.0).unwrap();
        let b_up_t = ops.b_up.transpose();
        let b_zp_t = ops.b_zp.transpose();
        let mut r1 = ops.a_uu.mul_vec(&state.u).unwrap();
        r1.axpy(-1.0, &b_up_t.mul_vec(&state.p).unwrap());
        r1.axpy(-1.0, &f0);
        assert!(r1.norm() <= 1e-10 * f0.norm().max(1.0));
        let mut r2 = ops.a_zz.mul_vec(&state.z).unwrap();
        r2.axpy(1.0, &b_zp_t.mul_vec(&state.p).unwrap());
        assert!(r2.norm() <= 1e-10);
    }

    #[test]
    fn transient_single_step_equals_direct_step() {
        let case = builtin_case("smooth", MaterialParams::default()).unwrap();
        let (disc, ops) = setup(2, case.params);
        let grid = TimeGrid::new(0.125, 1);
        let init = SystemState::zeros(&ops, 0.0);
        let f_at = |t: f64| assemble_load(&disc, |x| case.body_force(x, t));
        let g_at = |t: f64| assemble_source(&disc, |x| case.fluid_source(x, t));
        let states =
            run_transient(&ops, grid, init.clone(), f_at, g_at, Scheme::BackwardEuler).unwrap();
        assert_eq!(states.len(), 2);
        let solver = StepSolver::new(&ops, grid.dt(), Scheme::BackwardEuler).unwrap();
        let direct = solver
            .backward_euler_step(&init, &f_at(grid.dt()), &g_at(grid.dt()))
            .unwrap();
        assert_eq!(states[1], direct);
    }

    #[test]
    fn trajectories_are_bitwise_deterministic() {
        let case = builtin_case("smooth", MaterialParams::default()).unwrap();
        let (disc, ops) = setup(3, case.params);
        let grid = TimeGrid::new(0.5, 4);
        let p0 = project_p0(&disc, |x| case.pressure(x, 0.0));
        let f0 = assemble_load(&disc, |x| case.body_force(x, 0.0));
        let init = compatible_initial_data(&ops, &p0, &f0, 0.0).unwrap();
        let run = || {
            run_transient(
                &ops,
                grid,
                init.clone(),
                |t| assemble_load(&disc, |x| case.body_force(x, t)),
                |t| assemble_source(&disc, |x| case.fluid_source(x, t)),
                Scheme::BackwardEuler,
            )
            .unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a, b);
    }

    #[test]
    fn constant_data_converges_to_stationary_solution() {
        let case = builtin_case("smooth", MaterialParams::default()).unwrap();
        let (disc, ops) = setup(4, case.params);
        let f = assemble_load(&disc, |x| case.body_force(x, 0.0));
        let g = assemble_source(&disc, |x| case.fluid_source(x, 0.0));

        // Fixed point solved directly: the evolution terms drop out.
        let nu = ops.a_uu.nrows();
        let nz = ops.a_zz.nrows();
        let np = ops.a_pp.nrows();
        let n = nu + nz + np;
        let b_up_t = ops.b_up.transpose();
        let b_zp_t = ops.b_zp.transpose();
        let stationary = CsrMatrix::from_blocks(
            n,
            n,
            &[
                (0, 0, 1.0, &ops.a_uu),
                (0, nu + nz, -1.0, &b_up_t),
                (nu, nu, 1.0, &ops.a_zz),
                (nu, nu + nz, 1.0, &b_zp_t),
                (nu + nz, nu, -1.0, &ops.b_zp),
            ],
        );
        let rhs = DenseVector::concat(&[&f, &DenseVector::zeros(nz), &g]);
        let direct = crate::linalg::solve_direct(&stationary, &rhs).unwrap();
        let parts = direct.split(&[nu, nz, np]);

        let run_to_limit = |dt: f64, steps: usize| {
            let solver = StepSolver::new(&ops, dt, Scheme::BackwardEuler).unwrap();
            let mut state = SystemState::zeros(&ops, 0.0);
            let mut last_diff = f64::INFINITY;
            for _ in 0..steps {
                let next = solver.backward_euler_step(&state, &f, &g).unwrap();
                last_diff = next.u.sub(&state.u).norm()
                    + next.z.sub(&state.z).norm()
                    + next.p.sub(&state.p).norm();
                state = next;
            }
            (state, last_diff)
        };
        let (limit, diff) = run_to_limit(2.0, 400);
        assert!(diff <= 1e-9, "successive difference {diff}");
        assert!(limit.u.sub(&parts[0]).norm() <= 1e-7 * parts[0].norm().max(1.0));
        assert!(limit.z.sub(&parts[1]).norm() <= 1e-7 * parts[1].norm().max(1.0));
        assert!(limit.p.sub(&parts[2]).norm() <= 1e-7 * parts[2].norm().max(1.0));

        // The fixed point does not depend on the step size.
        let (other, _) = run_to_limit(0.7, 1200);
        assert!(limit.u.sub(&other.u).norm() <= 1e-8 * limit.u.norm().max(1.0));
        assert!(limit.p.sub(&other.p).norm() <= 1e-8 * limit.p.norm().max(1.0));
    }

    #[test]
    fn trajectories_superpose_for_zero_initial_data() {
        let case = builtin_case("smooth", MaterialParams::default()).unwrap();
        let (disc, ops) = setup(3, case.params);
        let grid = TimeGrid::new(0.5, 4);
        let f1 = |t: f64| assemble_load(&disc, |x| case.body_force(x, t));
        let g1 = |t: f64| assemble_source(&disc, |x| case.fluid_source(x, t));
        let f2 =
            |t: f64| assemble_load(&disc, |x| Vec2::new((t + x.x).sin(), (2.0 * x.y - t).cos()));
        let g2 = |t: f64| assemble_source(&disc, |x| (x.x * x.y + t).sin());

        let init = SystemState::zeros(&ops, 0.0);
        let run = |f: &dyn Fn(f64) -> DenseVector, g: &dyn Fn(f64) -> DenseVector| {
            run_transient(&ops, grid, init.clone(), f, g, Scheme::BackwardEuler).unwrap()
        };
        let t1 = run(&f1, &g1);
        let t2 = run(&f2, &g2);
        let sum_f = |t: f64| f1(t).add(&f2(t));
        let sum_g = |t: f64| g1(t).add(&g2(t));
        let t12 = run(&sum_f, &sum_g);
        for j in 0..t12.len() {
            let expect_u = t1[j].u.add(&t2[j].u);
            let expect_p = t1[j].p.add(&t2[j].p);
            let du = t12[j].u.sub(&expect_u).norm();
            let dp = t12[j].p.sub(&expect_p).norm();
            let scale = expect_u.norm().max(expect_p.norm()).max(1e-12);
            assert!(du.max(dp) <= 1e-9 * scale, "step {j}: {du} {dp}");
        }
    }
}
