//! Dense hermitian linear algebra helpers shared by the operator modules.

use crate::{C64, Error, Result};
use nalgebra::{DMatrix, DVector};

/// Eigendecomposition of a hermitian matrix. Eigenvalues ascending.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    let sym = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sym.eigenvalues[a].partial_cmp(&sym.eigenvalues[b]).unwrap());
    let eigs: Vec<f64> = order.iter().map(|&i| sym.eigenvalues[i]).collect();
    let mut vecs = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vecs.set_column(k, &sym.eigenvectors.column(i));
    }
    (eigs, vecs)
}

/// Largest and smallest eigenvalue of a hermitian matrix.
pub fn hermitian_extremes(m: &DMatrix<C64>) -> (f64, f64) {
    let (eigs, _) = hermitian_eigen(m);
    (*eigs.first().unwrap(), *eigs.last().unwrap())
}

/// Operator (spectral) norm via the largest singular value.
pub fn op_norm(m: &DMatrix<C64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let gram = m.adjoint() * m;
    let (eigs, _) = hermitian_eigen(&gram);
    eigs.last().unwrap().max(0.0).sqrt()
}

/// Trace norm (sum of singular values).
pub fn trace_norm(m: &DMatrix<C64>) -> f64 {
    let gram = m.adjoint() * m;
    let (eigs, _) = hermitian_eigen(&gram);
    eigs.iter().map(|e| e.max(0.0).sqrt()).sum()
}

/// Unitary exponential of an antihermitian matrix, via eigendecomposition of
/// the hermitian generator -iB. Falls back to scaling-and-squaring above
/// `DENSE_EIG_LIMIT`.
pub fn exp_antihermitian(b: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    const DENSE_EIG_LIMIT: usize = 2000;
    let n = b.nrows();
    let defect = (b + b.adjoint()).norm();
    if defect > 1e-10 * (1.0 + b.norm()) {
        return Err(Error::Domain(format!(
            "exp_antihermitian: input not antihermitian (defect {defect:.3e})"
        )));
    }
    if n > DENSE_EIG_LIMIT {
        return Ok(exp_squaring(b));
    }
    let h = b.map(|z| z * C64::new(0.0, -1.0)); // hermitian
    let (eigs, vecs) = hermitian_eigen(&h);
    let phases = DVector::from_iterator(n, eigs.iter().map(|&l| C64::new(0.0, l).exp()));
    let mut out = DMatrix::zeros(n, n);
    for k in 0..n {
        let col = vecs.column(k);
        let ph = phases[k];
        // out += phase * |v_k><v_k|
        for i in 0..n {
            let vi = col[i] * ph;
            for j in 0..n {
                out[(i, j)] += vi * col[j].conj();
            }
        }
    }
    Ok(out)
}

/// Scaling-and-squaring Taylor exponential; adequate fallback at large dims.
fn exp_squaring(m: &DMatrix<C64>) -> DMatrix<C64> {
    let norm = m.norm();
    let s = norm.log2().ceil().max(0.0) as u32 + 4;
    let scaled = m.map(|z| z / C64::new(2f64.powi(s as i32), 0.0));
    let n = m.nrows();
    let mut term = DMatrix::<C64>::identity(n, n);
    let mut acc = DMatrix::<C64>::identity(n, n);
    for k in 1..=18 {
        term = (&term * &scaled).map(|z| z / C64::new(k as f64, 0.0));
        acc += &term;
    }
    for _ in 0..s {
        acc = &acc * &acc;
    }
    acc
}

/// Residual of unitarity ||U^* U - Id||_2 (spectral norm).
pub fn unitarity_residual(u: &DMatrix<C64>) -> f64 {
    let n = u.ncols();
    let id = DMatrix::<C64>::identity(n, n);
    op_norm(&(u.adjoint() * u - id))
}

/// Smallest constant `c` with `x <= c * w` in quadratic-form sense, for
/// hermitian `x` and positive definite hermitian `w`: the largest eigenvalue
/// of w^{-1/2} x w^{-1/2}.
pub fn smallest_upper_constant(x: &DMatrix<C64>, w: &DMatrix<C64>) -> Result<f64> {
    let wi = inv_sqrt_posdef(w)?;
    let transformed = &wi * x * &wi;
    let (_, hi) = hermitian_extremes(&transformed);
    Ok(hi)
}

/// Inverse square root of a positive definite hermitian matrix.
pub fn inv_sqrt_posdef(w: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let (eigs, vecs) = hermitian_eigen(w);
    let lo = eigs.first().copied().unwrap_or(0.0);
    if lo <= 0.0 {
        return Err(Error::Domain(format!(
            "inv_sqrt_posdef: matrix not positive definite (min eig {lo:.3e})"
        )));
    }
    let n = w.nrows();
    let mut out = DMatrix::zeros(n, n);
    for k in 0..n {
        let col = vecs.column(k);
        let s = C64::new(1.0 / eigs[k].sqrt(), 0.0);
        for i in 0..n {
            let vi = col[i] * s;
            for j in 0..n {
                out[(i, j)] += vi * col[j].conj();
            }
        }
    }
    Ok(out)
}

/// Check the operator inequality X <= Y given hermitian matrices, as
/// min eig(Y - X) >= -tol_scale * ||Y||. Returns the (signed) margin
/// min eig(Y - X).
pub fn op_leq_margin(x: &DMatrix<C64>, y: &DMatrix<C64>) -> f64 {
    let (lo, _) = hermitian_extremes(&(y - x));
    lo
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_sorted_and_reconstructs() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(2.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), C64::new(3.0, 0.0)],
        );
        let (eigs, vecs) = hermitian_eigen(&m);
        assert!(eigs[0] <= eigs[1]);
        let lam = DMatrix::from_diagonal(&DVector::from_iterator(
            2,
            eigs.iter().map(|&e| C64::new(e, 0.0)),
        ));
        let rec = &vecs * lam * vecs.adjoint();
        assert!((rec - m).norm() < 1e-12);
    }

    #[test]
    fn exp_antihermitian_is_unitary() {
        let b = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.0, 0.3), C64::new(0.5, 0.1), C64::new(-0.5, 0.1), C64::new(0.0, -0.2)],
        );
        let u = exp_antihermitian(&b).unwrap();
        assert!(unitarity_residual(&u) < 1e-12);
    }

    #[test]
    fn squaring_matches_eigen_path() {
        let b = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.0, 0.1), C64::new(0.2, 0.0), C64::new(-0.2, 0.0), C64::new(0.0, 0.0)],
        );
        let u1 = exp_antihermitian(&b).unwrap();
        let u2 = exp_squaring(&b);
        assert!((u1 - u2).norm() < 1e-12);
    }

    #[test]
    fn upper_constant_diagonal_case() {
        let x = DMatrix::from_diagonal(&DVector::from_vec(vec![C64::new(2.0, 0.0), C64::new(1.0, 0.0)]));
        let w = DMatrix::from_diagonal(&DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(4.0, 0.0)]));
        let c = smallest_upper_constant(&x, &w).unwrap();
        assert!((c - 2.0).abs() < 1e-12);
    }
}
