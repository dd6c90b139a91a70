//! Dense linear-algebra helpers shared by the physics modules.

use faer::Mat;
use nalgebra::DMatrix;

use crate::{Error, Result, C64};

/// Real representation `[[Re U, -Im U], [Im U, Re U]]` of a complex matrix
/// acting on `(q, p)` column vectors.
pub fn real_representation(u: &DMatrix<C64>) -> DMatrix<f64> {
    let (r, c) = u.shape();
    let mut out = DMatrix::zeros(2 * r, 2 * c);
    for j in 0..r {
        for k in 0..c {
            let z = u[(j, k)];
            out[(j, k)] = z.re;
            out[(j, k + c)] = -z.im;
            out[(j + r, k)] = z.im;
            out[(j + r, k + c)] = z.re;
        }
    }
    out
}

/// `[[0, I], [-I, 0]]` for `n` modes.
pub fn symplectic_form(n: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        omega[(j, j + n)] = 1.0;
        omega[(j + n, j)] = -1.0;
    }
    omega
}

pub fn frobenius_norm_c(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `|| U U^dagger - I ||_F`.
pub fn unitarity_residual(u: &DMatrix<C64>) -> f64 {
    let n = u.nrows();
    frobenius_norm_c(&(u * u.adjoint() - DMatrix::<C64>::identity(n, n)))
}

pub(crate) fn to_faer(m: &DMatrix<C64>) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub(crate) fn from_faer(m: faer::MatRef<'_, C64>) -> DMatrix<C64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<C64>) -> Result<Vec<f64>> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(Vec::new());
    }
    let mut s = to_faer(m)
        .singular_values()
        .map_err(|e| Error::Linalg(format!("singular values did not converge: {e:?}")))?;
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Singular values in descending order from the eigenvalues of `M^dagger M`.
/// About twice as fast as the SVD; values below roughly `sqrt(eps)` times the
/// largest lose relative accuracy.
pub fn gram_singular_values(m: &DMatrix<C64>) -> Result<Vec<f64>> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(Vec::new());
    }
    let a = to_faer(m);
    let gram = a.adjoint() * &a;
    let mut s: Vec<f64> = gram
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|e| Error::Linalg(format!("eigenvalues did not converge: {e:?}")))?
        .into_iter()
        .map(|e| e.max(0.0).sqrt())
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}
