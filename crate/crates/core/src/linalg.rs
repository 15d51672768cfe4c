//! Small complex linear-algebra helpers on top of nalgebra.

use nalgebra::{Cholesky, Complex, DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::CMatrix;

/// Eigenvalues below this (in absolute value) are treated as rounding noise
/// when checking positive semidefiniteness.
pub const PSD_TOL: f64 = 1e-9;

pub fn c(re: f64) -> Complex<f64> {
    Complex::new(re, 0.0)
}

/// `(m + m^H) / 2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5)
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted
/// descending and eigenvectors permuted to match.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(hermitize(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    SymmetricEigen::new(hermitize(m))
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Fails with [`Error::NonPsd`] if `m` has an eigenvalue below `-PSD_TOL`.
pub fn check_psd(m: &CMatrix) -> Result<()> {
    let min = min_eigenvalue(m);
    if min < -PSD_TOL {
        return Err(Error::NonPsd {
            min_eigenvalue: min,
        });
    }
    Ok(())
}

/// `ln det(I + s)` for Hermitian PSD `s`.
///
/// Uses Cholesky of `I + s`; falls back to eigenvalues when the factorization
/// fails.
pub fn log_det_identity_plus(s: &CMatrix) -> f64 {
    let n = s.nrows();
    let m = hermitize(s) + CMatrix::identity(n, n);
    match Cholesky::new(m.clone()) {
        Some(ch) => {
            2.0 * ch
                .l_dirty()
                .diagonal()
                .iter()
                .map(|d| d.re.ln())
                .sum::<f64>()
        }
        None => SymmetricEigen::new(m)
            .eigenvalues
            .iter()
            .map(|&v| v.max(f64::MIN_POSITIVE).ln())
            .sum(),
    }
}

/// `h d h^H`.
pub fn sandwich(h: &CMatrix, d: &CMatrix) -> CMatrix {
    h * d * h.adjoint()
}

/// `v diag(p) v^H` using the first `p.len()` columns of `v`.
pub fn from_eigen_powers(v: &CMatrix, powers: &[f64]) -> CMatrix {
    let n = v.nrows();
    let mut out = CMatrix::zeros(n, n);
    for (k, &p) in powers.iter().enumerate() {
        if p > 0.0 {
            let col = v.column(k);
            out += col * col.adjoint() * c(p);
        }
    }
    out
}

pub fn trace_re(m: &CMatrix) -> f64 {
    m.trace().re
}

/// Extends the orthonormal columns of `q` to a full unitary basis.
pub fn complete_unitary(q: &CMatrix) -> CMatrix {
    let n = q.nrows();
    let k = q.ncols();
    if k == n {
        return q.clone();
    }
    let mut aug = CMatrix::zeros(n, k + n);
    aug.view_mut((0, 0), (n, k)).copy_from(q);
    aug.view_mut((0, k), (n, n))
        .copy_from(&CMatrix::identity(n, n));
    let full = nalgebra::QR::new(aug).q();
    let mut out = full.columns(0, n).into_owned();
    out.view_mut((0, 0), (n, k)).copy_from(q);
    out
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn is_unitary(v: &CMatrix, tol: f64) -> bool {
    let n = v.ncols();
    let err = v.adjoint() * v - DMatrix::identity(n, n);
    err.iter().all(|z| z.norm() <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sample(n: usize, seed: u64) -> CMatrix {
        // deterministic filler without pulling the rng here
        let mut x = seed.wrapping_mul(0x9E3779B97F4A7C15) | 1;
        let mut next = || {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        CMatrix::from_fn(n, n, |_, _| Complex::new(next(), next()))
    }

    #[test]
    fn log_det_matches_eigen_sum() {
        for seed in 1..20 {
            let a = sample(4, seed);
            let s = &a * a.adjoint();
            let (vals, _) = hermitian_eigen(&s);
            let oracle: f64 = vals.iter().map(|v| (1.0 + v).ln()).sum();
            assert_relative_eq!(log_det_identity_plus(&s), oracle, epsilon = 1e-10);
        }
    }

    #[test]
    fn eigen_sorted_and_reconstructs() {
        let a = sample(3, 7);
        let s = &a * a.adjoint();
        let (vals, vecs) = hermitian_eigen(&s);
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        assert!(is_unitary(&vecs, 1e-12));
        let rebuilt = from_eigen_powers(&vecs, &vals);
        assert!(frobenius(&(rebuilt - s)) < 1e-12);
    }

    #[test]
    fn completion_is_unitary_and_keeps_columns() {
        let a = sample(4, 3);
        let qr = nalgebra::QR::new(a.columns(0, 2).into_owned());
        let q = qr.q();
        let full = complete_unitary(&q);
        assert_eq!(full.shape(), (4, 4));
        assert!(is_unitary(&full, 1e-12));
        assert!(frobenius(&(full.columns(0, 2) - &q)) == 0.0);
    }

    #[test]
    fn psd_check() {
        let mut m = CMatrix::identity(2, 2);
        assert!(check_psd(&m).is_ok());
        m[(1, 1)] = c(-0.5);
        assert!(matches!(check_psd(&m), Err(Error::NonPsd { .. })));
    }
}
