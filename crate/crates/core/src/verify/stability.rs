//! Numerical inf-sup and Korn constants.
//!
//! Each inf-sup constant is the square root of the smallest eigenvalue of
//! the Schur complement B K^{-1} B^T against the pressure mass matrix, with
//! K the Gram matrix of the norm in the denominator. When the clamped part
//! covers the whole boundary, constant pressures are orthogonal to the image
//! of the displacement divergence; such exact-zero modes are deflated and
//! reported, and the constant is taken on the complement.

use crate::assembly::{
    assemble_div_coupling_u, assemble_div_coupling_z, assemble_eps_gram, assemble_grad_gram,
    assemble_pressure_l2_mass, assemble_rt_hdiv_gram,
};
use crate::elements::Discretization;
use crate::error::{Error, Result};
use crate::linalg::{sym_generalized_eigenvalues, CsrMatrix};
use nalgebra::DMatrix;

/// Relative cutoff below which a Schur eigenvalue counts as an exact kernel
/// mode rather than a small inf-sup constant.
const KERNEL_CUTOFF: f64 = 1e-10;

#[derive(Clone, Copy, Debug)]
pub struct InfSupEstimate {
    /// Square root of the smallest non-kernel eigenvalue.
    pub beta: f64,
    /// Number of deflated exact-zero modes.
    pub kernel_dim: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct KornEstimate {
    /// Norm-equivalence constant 1/sqrt(lambda_min).
    pub c_k: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

/// Eigenvalues of B K^{-1} B^T q = lambda M_p q, ascending.
fn schur_eigenvalues(b: &CsrMatrix, k: &CsrMatrix, m_p: &CsrMatrix) -> Result<Vec<f64>> {
    let kd = k.to_dense();
    let chol = kd.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
    let bt = b.transpose().to_dense();
    let x = chol.solve(&bt);
    let s = b.to_dense() * x;
    let s = (&s + s.transpose()) * 0.5;
    sym_generalized_eigenvalues(&s, &m_p.to_dense())
}

fn infsup_from_eigenvalues(eigs: &[f64]) -> Result<InfSupEstimate> {
    let max = eigs.last().copied().unwrap_or(0.0);
    if !(max > 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    let cutoff = max * KERNEL_CUTOFF;
    let kernel_dim = eigs.iter().filter(|&&l| l <= cutoff).count();
    if kernel_dim == eigs.len() {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(InfSupEstimate {
        beta: eigs[kernel_dim].sqrt(),
        kernel_dim,
    })
}

/// Inf-sup constant of the displacement/pressure coupling, measured with
/// the broken H1 seminorm on the displacement space.
pub fn estimate_inf_sup_sigma(disc: &Discretization) -> Result<InfSupEstimate> {
    let b = assemble_div_coupling_u(disc);
    let k = assemble_grad_gram(disc);
    let m_p = assemble_pressure_l2_mass(disc);
    infsup_from_eigenvalues(&schur_eigenvalues(&b, &k, &m_p)?)
}

/// Inf-sup constant of the flux/pressure coupling, measured with the H(div)
/// norm on the flux space.
pub fn estimate_inf_sup_rt(disc: &Discretization) -> Result<InfSupEstimate> {
    let b = assemble_div_coupling_z(disc);
    let k = assemble_rt_hdiv_gram(disc);
    let m_p = assemble_pressure_l2_mass(disc);
    infsup_from_eigenvalues(&schur_eigenvalues(&b, &k, &m_p)?)
}

/// Equivalence constants between the broken H1 seminorm and the broken
/// symmetric-gradient norm on the displacement space.
pub fn korn_constant(disc: &Discretization) -> Result<KornEstimate> {
    let e = assemble_eps_gram(disc);
    let k = assemble_grad_gram(disc);
    let eigs = sym_generalized_eigenvalues(&e.to_dense(), &k.to_dense())?;
    let lambda_min = eigs[0];
    let lambda_max = *eigs.last().unwrap();
    if !(lambda_min > 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(KornEstimate {
        c_k: 1.0 / lambda_min.sqrt(),
        lambda_min,
        lambda_max,
    })
}

/// Independent route for cross-checks: the inf-sup constant as the smallest
/// deflated singular value of M_p^{-1/2} B K^{-1/2}.
pub fn infsup_by_svd(b: &CsrMatrix, k: &CsrMatrix, m_p: &CsrMatrix) -> Result<InfSupEstimate> {
    let kd = k.to_dense();
    let k_half = symmetric_sqrt(&kd)?;
    let k_half_inv = k_half
        .clone()
        .lu()
        .solve(&DMatrix::identity(kd.nrows(), kd.ncols()))
        .ok_or(Error::NotPositiveDefinite)?;
    let mut mp_half_inv = DMatrix::<f64>::zeros(m_p.nrows(), m_p.ncols());
    for i in 0..m_p.nrows() {
        let d = m_p.get(i, i);
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        mp_half_inv[(i, i)] = 1.0 / d.sqrt();
    }
    let core = mp_half_inv * b.to_dense() * k_half_inv;
    let svd = core.svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().cloned().collect();
    sv.sort_by(f64::total_cmp);
    let eigs: Vec<f64> = sv.iter().map(|s| s * s).collect();
    infsup_from_eigenvalues(&eigs)
}

fn symmetric_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    let n = m.nrows();
    let mut d = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        if !(eig.eigenvalues[i] > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        d[(i, i)] = eig.eigenvalues[i].sqrt();
    }
    Ok(&eig.eigenvectors * d * eig.eigenvectors.transpose())
}
