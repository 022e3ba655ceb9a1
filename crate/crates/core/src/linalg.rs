//! Dense least-squares helpers shared by the regression code.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Pivot threshold on unit-norm columns. A pivot below this means the
/// column lies within `1e-6` (in norm) of the span of the others, i.e. a
/// squared tolerance of `1e-12`, matching the two-regressor determinant rule.
pub(crate) const RANK_TOL: f64 = 1e-6;

pub(crate) struct LeastSquares {
    /// `k x m` coefficients, one column per right-hand side.
    pub coef: DMatrix<f64>,
    /// `n x m` residuals.
    pub resid: DMatrix<f64>,
    /// `(X'X)^-1`, `k x k`.
    pub xtx_inv: DMatrix<f64>,
}

/// Least squares `min |y - X b|` through a column-pivoted QR of the
/// column-equilibrated design. Rank deficiency is an error.
pub(crate) fn least_squares(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<LeastSquares> {
    let (n, k) = x.shape();
    if y.nrows() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: y.nrows(),
        });
    }
    if k == 0 {
        return Ok(LeastSquares {
            coef: DMatrix::zeros(0, y.ncols()),
            resid: y.clone(),
            xtx_inv: DMatrix::zeros(0, 0),
        });
    }
    if n < k {
        return Err(Error::TooFewObservations { required: k, got: n });
    }

    let norms: Vec<f64> = (0..k).map(|j| x.column(j).norm()).collect();
    if let Some(column) = norms.iter().position(|&s| !(s > 0.0)) {
        return Err(Error::RankDeficient { column });
    }
    let mut scaled = x.clone();
    for (j, s) in norms.iter().enumerate() {
        scaled.column_mut(j).unscale_mut(*s);
    }

    let qr = scaled.clone().col_piv_qr();
    let r = qr.r();
    for i in 0..k {
        if !(r[(i, i)].abs() > RANK_TOL) {
            return Err(Error::RankDeficient { column: i });
        }
    }

    let mut qtb = y.clone();
    qr.q_tr_mul(&mut qtb);
    let r_top = r.view((0, 0), (k, k)).into_owned();
    let mut z = r_top
        .solve_upper_triangular(&qtb.rows(0, k).into_owned())
        .ok_or(Error::RankDeficient { column: k - 1 })?;
    qr.p().inv_permute_rows(&mut z);
    for (j, s) in norms.iter().enumerate() {
        z.row_mut(j).unscale_mut(*s);
    }

    let gram = scaled.transpose() * &scaled;
    let mut xtx_inv = gram
        .cholesky()
        .ok_or_else(|| Error::Singular("normal-equation Gram matrix".into()))?
        .inverse();
    for i in 0..k {
        for j in 0..k {
            xtx_inv[(i, j)] /= norms[i] * norms[j];
        }
    }

    let resid = y - x * &z;
    Ok(LeastSquares {
        coef: z,
        resid,
        xtx_inv,
    })
}

/// Greedy Gram-Schmidt pass over the columns of `x` in the given order,
/// keeping those whose residual norm (relative to their own norm) exceeds
/// `tol`. Returns the kept column indices in visiting order.
pub(crate) fn independent_columns(x: &DMatrix<f64>, order: &[usize], tol: f64) -> Vec<usize> {
    let mut basis: Vec<nalgebra::DVector<f64>> = Vec::new();
    let mut kept = Vec::new();
    for &j in order {
        let col = x.column(j).into_owned();
        let norm = col.norm();
        if !(norm > 0.0) {
            continue;
        }
        let mut v = col;
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for q in &basis {
                let d = q.dot(&v);
                v.axpy(-d, q, 1.0);
            }
        }
        let rn = v.norm();
        if rn > tol * norm {
            basis.push(v / rn);
            kept.push(j);
        }
    }
    kept
}
