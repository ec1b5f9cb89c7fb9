//! Small dense kernels on top of nalgebra.

use nalgebra::DVector;

use crate::data::Matrix;
use crate::error::{Error, Result};

/// Thin SVD with singular values in nonincreasing order.
pub(crate) struct ThinSvd {
    pub u: Matrix,
    pub s: DVector<f64>,
    pub v_t: Matrix,
}

pub(crate) fn thin_svd(a: &Matrix) -> Result<ThinSvd> {
    let svd = a.clone().svd(true, true);
    let (Some(u), Some(v_t)) = (svd.u, svd.v_t) else {
        return Err(Error::Numerical("SVD did not return singular vectors".into()));
    };
    let s = svd.singular_values;
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("SVD produced non-finite singular values".into()));
    }
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));
    if order.iter().enumerate().all(|(i, &o)| i == o) {
        return Ok(ThinSvd { u, s, v_t });
    }
    Ok(ThinSvd {
        u: u.select_columns(&order),
        s: DVector::from_iterator(order.len(), order.iter().map(|&i| s[i])),
        v_t: v_t.select_rows(&order),
    })
}

impl ThinSvd {
    /// `U_r diag(w) V_rᵀ` for the leading `w.len()` triplets.
    pub fn recompose(&self, weights: &[f64]) -> Matrix {
        let r = weights.len();
        let (n, m) = (self.u.nrows(), self.v_t.ncols());
        if r == 0 {
            return Matrix::zeros(n, m);
        }
        let mut us = self.u.columns(0, r).into_owned();
        for (c, &w) in weights.iter().enumerate() {
            us.column_mut(c).scale_mut(w);
        }
        us * self.v_t.rows(0, r)
    }
}

/// Solves the symmetric positive definite system `a x = b`, falling back to
/// an SVD least-squares solve when Cholesky fails.
pub(crate) fn solve_spd(a: Matrix, b: &DVector<f64>) -> Result<DVector<f64>> {
    if let Some(chol) = a.clone().cholesky() {
        return Ok(chol.solve(b));
    }
    a.svd(true, true)
        .solve(b, 1e-12)
        .map_err(|e| Error::Numerical(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recompose_full_rank_reproduces_input() {
        let a = Matrix::from_fn(5, 3, |i, j| ((i + 2 * j) as f64).sin() + i as f64);
        let svd = thin_svd(&a).unwrap();
        assert!(svd.s.as_slice().windows(2).all(|w| w[0] >= w[1]));
        let back = svd.recompose(svd.s.as_slice());
        assert!((back - a).amax() < 1e-12);
    }

    #[test]
    fn spd_solve() {
        let a = Matrix::from_row_slice(2, 2, &[4.0, 1.0, 1.0, 3.0]);
        let x = solve_spd(a.clone(), &DVector::from_vec(vec![1.0, 2.0])).unwrap();
        assert!((a * x - DVector::from_vec(vec![1.0, 2.0])).amax() < 1e-14);
    }
}
