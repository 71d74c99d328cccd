//! Dense floating-point linear algebra on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::scalar::{Coeff, Cq};

pub type CMatrix = DMatrix<Complex64>;

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    hermitian_defect(m) <= tol
}

/// `max |M - M*|` entrywise.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of the Hermitian part `(M + M*)/2`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Spectral norm: `max |λ|` for Hermitian input, the top singular value otherwise.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let scale = m.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    if scale == 0.0 {
        return 0.0;
    }
    if hermitian_defect(m) <= 1e-14 * scale {
        hermitian_eigenvalues(m).iter().fold(0.0f64, |a, l| a.max(l.abs()))
    } else {
        m.clone().singular_values().iter().fold(0.0f64, |a, s| a.max(*s))
    }
}

/// Real least squares `min |A x - b|` via SVD, with the 2-norm condition number of `A`.
pub fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, f64) {
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.iter().fold(0.0f64, |x, s| x.max(*s));
    let smin = sv.iter().fold(f64::INFINITY, |x, s| x.min(*s));
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let x = svd.solve(b, smax * 1e-15).expect("svd with vectors");
    (x, cond)
}

/// Exact solve of a square system over the Gaussian rationals; `None` if singular.
pub fn solve_exact(mut a: Vec<Vec<Cq>>, mut b: Vec<Cq>) -> Option<Vec<Cq>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].inv()?;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] * &inv;
            let (upper, lower) = a.split_at_mut(r);
            for (rc, pc) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                let v = &factor * pc;
                *rc = rc.clone() - v;
            }
            let v = &factor * &b[col];
            b[r] = b[r].clone() - v;
        }
    }
    let mut x = vec![Cq::zero(); n];
    for r in (0..n).rev() {
        let mut acc = b[r].clone();
        for c in r + 1..n {
            acc = acc - &a[r][c] * &x[c];
        }
        x[r] = acc.div(&a[r][r])?;
    }
    Some(x)
}
