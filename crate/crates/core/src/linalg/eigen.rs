//! Dense symmetric generalized eigenvalue routines.
//!
//! Only used at verification scale, so problems are densified and reduced to
//! a standard symmetric eigenproblem through a Cholesky factor of the mass
//! matrix.

use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, DenseVector};
use nalgebra::DMatrix;

const SYM_TOL_REL: f64 = 1e-10;

/// All eigenvalues of A x = lambda M x for symmetric A and SPD M, ascending.
pub fn sym_generalized_eigenvalues(a: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let w = reduce_to_standard(a, m)?;
    let mut ev: Vec<f64> = nalgebra::SymmetricEigen::new(w)
        .eigenvalues
        .iter()
        .cloned()
        .collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Smallest eigenpair of A x = lambda M x for symmetric A and SPD M.
pub fn eig_min_generalized(a: &CsrMatrix, m: &CsrMatrix) -> Result<(f64, DenseVector)> {
    check_square_pair(a, m)?;
    check_symmetric(a)?;
    check_symmetric(m)?;

    let ad = a.to_dense();
    let md = m.to_dense();
    let chol = md.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l();

    let y = l
        .solve_lower_triangular(&ad)
        .ok_or(Error::NotPositiveDefinite)?;
    let w = l
        .solve_lower_triangular(&y.transpose())
        .ok_or(Error::NotPositiveDefinite)?;
    let w = (&w + w.transpose()) * 0.5;

    let eig = nalgebra::SymmetricEigen::new(w);
    let mut min_idx = 0;
    for i in 1..eig.eigenvalues.len() {
        if eig.eigenvalues[i] < eig.eigenvalues[min_idx] {
            min_idx = i;
        }
    }
    let lambda = eig.eigenvalues[min_idx];
    let yvec = eig.eigenvectors.column(min_idx).into_owned();
    let x = l
        .transpose()
        .solve_upper_triangular(&yvec)
        .ok_or(Error::NotPositiveDefinite)?;
    let x = &x / x.norm();

    // Residual check against the original pencil.
    let r = (&ad * &x - &md * &x * lambda).norm();
    let scale = a.max_abs().max(1e-300);
    let limit = 1e-8 * scale;
    if !(r <= limit) {
        return Err(Error::ResidualTooLarge {
            residual: r / scale,
            limit: 1e-8,
        });
    }

    Ok((lambda, DenseVector::from_vec(x.as_slice().to_vec())))
}

fn reduce_to_standard(a: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if a.nrows() != a.ncols() || m.nrows() != m.ncols() || a.nrows() != m.nrows() {
        return Err(Error::DimensionMismatch {
            context: "generalized eigenproblem",
            expected: a.nrows(),
            got: m.nrows(),
        });
    }
    let chol = m.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l();
    let y = l
        .solve_lower_triangular(a)
        .ok_or(Error::NotPositiveDefinite)?;
    let w = l
        .solve_lower_triangular(&y.transpose())
        .ok_or(Error::NotPositiveDefinite)?;
    Ok((&w + w.transpose()) * 0.5)
}

fn check_square_pair(a: &CsrMatrix, m: &CsrMatrix) -> Result<()> {
    if a.nrows() != a.ncols() || m.nrows() != m.ncols() || a.nrows() != m.nrows() {
        return Err(Error::DimensionMismatch {
            context: "generalized eigenproblem",
            expected: a.nrows(),
            got: m.nrows(),
        });
    }
    Ok(())
}

fn check_symmetric(a: &CsrMatrix) -> Result<()> {
    let asym = a.max_asymmetry();
    if asym > SYM_TOL_REL * a.max_abs().max(f64::MIN_POSITIVE) {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    Ok(())
}
