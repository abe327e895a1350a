//! Small dense linear-algebra kernels used by the pair-state and master-equation code.

use num_complex::Complex;

use crate::real::Real;

/// Eigendecomposition of a real symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymmetricEigen<T> {
    /// Eigenvalues in ascending order.
    pub values: Vec<T>,
    /// Column `j` (stored as `vectors[j]`) is the unit eigenvector of `values[j]`.
    pub vectors: Vec<Vec<T>>,
}

/// Cyclic Jacobi diagonalization of a symmetric `n×n` matrix given row-major.
///
/// Returns `None` if the off-diagonal norm has not dropped below the
/// working precision after `max_sweeps` sweeps.
pub fn symmetric_eigen<T: Real>(matrix: &[T], n: usize, max_sweeps: usize) -> Option<SymmetricEigen<T>> {
    assert_eq!(matrix.len(), n * n, "matrix must be n×n");
    let mut a = matrix.to_vec();
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = T::one();
    }
    let scale = a.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    let tiny = (T::epsilon() * scale * T::of_usize(n)).powi(2);

    let off_norm = |a: &[T]| -> T {
        (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p * n + q] * a[p * n + q])
            .sum()
    };
    let mut converged = n < 2 || scale == T::zero();
    for _ in 0..max_sweeps {
        if converged || off_norm(&a) <= tiny {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged && off_norm(&a) > tiny {
        return None;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].partial_cmp(&a[j * n + j]).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors = order
        .iter()
        .map(|&j| (0..n).map(|k| v[k * n + j]).collect())
        .collect();
    Some(SymmetricEigen { values, vectors })
}

/// Row-major complex matrix product `a·b` for square `n×n` operands.
pub fn complex_matmul<T: Real>(a: &[Complex<T>], b: &[Complex<T>], n: usize, out: &mut [Complex<T>]) {
    for x in out.iter_mut() {
        *x = Complex::new(T::zero(), T::zero());
    }
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik.re == T::zero() && aik.im == T::zero() {
                continue;
            }
            let row_b = &b[k * n..(k + 1) * n];
            let row_out = &mut out[i * n..(i + 1) * n];
            for (o, bkj) in row_out.iter_mut().zip(row_b) {
                *o += aik * *bkj;
            }
        }
    }
}

/// Conjugate transpose of a row-major square matrix.
pub fn adjoint<T: Real>(a: &[Complex<T>], n: usize) -> Vec<Complex<T>> {
    let mut out = vec![Complex::new(T::zero(), T::zero()); n * n];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = a[i * n + j].conj();
        }
    }
    out
}

/// Attempts a Cholesky factorization of the Hermitian matrix `a + shift·I`.
///
/// Success certifies that every eigenvalue of `a` is at least `-shift`.
pub fn is_positive_with_shift<T: Real>(a: &[Complex<T>], n: usize, shift: T) -> bool {
    let mut l = vec![Complex::new(T::zero(), T::zero()); n * n];
    for j in 0..n {
        let mut diag = a[j * n + j].re + shift;
        for k in 0..j {
            diag -= l[j * n + k].norm_sqr();
        }
        if !(diag > T::zero()) {
            return false;
        }
        let djj = diag.sqrt();
        l[j * n + j] = Complex::new(djj, T::zero());
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k].conj();
            }
            l[i * n + j] = s / djj;
        }
    }
    true
}
