//! Small dense linear algebra on row-major square matrices.

use thiserror::Error;

use crate::scalar::Scalar;

/// Threshold on `|det|` below which a matrix counts as singular.
pub const SINGULAR_DET: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("singular matrix (|det| = {0:.3e})")]
    Singular(f64),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("matrix shape mismatch")]
    Shape,
}

pub fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

pub fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if x == 0.0 {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += x * b[k * n + j];
            }
        }
    }
    c
}

pub fn transpose(a: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut t = vec![0.0; rows * cols];
    for i in 0..rows {
        for j in 0..cols {
            t[j * rows + i] = a[i * cols + j];
        }
    }
    t
}

pub fn trace(a: &[f64], n: usize) -> f64 {
    (0..n).map(|i| a[i * n + i]).sum()
}

pub fn mat_vec(a: &[f64], v: &[f64], n: usize) -> Vec<f64> {
    (0..n).map(|i| (0..n).map(|j| a[i * n + j] * v[j]).sum()).collect()
}

/// Inverse and determinant by Gauss–Jordan elimination with partial
/// pivoting on the value part.
pub fn inverse_and_det<S: Scalar>(m: &[S], n: usize) -> Result<(Vec<S>, S), LinalgError> {
    if m.len() != n * n {
        return Err(LinalgError::Shape);
    }
    let mut a = m.to_vec();
    let mut inv: Vec<S> = (0..n * n)
        .map(|k| S::from_f64(if k / n == k % n { 1.0 } else { 0.0 }))
        .collect();
    let mut det = S::from_f64(1.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| {
                a[r * n + col]
                    .value()
                    .abs()
                    .total_cmp(&a[s * n + col].value().abs())
            })
            .expect("non-empty range");
        if a[pivot * n + col].value() == 0.0 {
            return Err(LinalgError::Singular(0.0));
        }
        if pivot != col {
            for j in 0..n {
                a.swap(pivot * n + j, col * n + j);
                inv.swap(pivot * n + j, col * n + j);
            }
            det = -det;
        }
        let p = a[col * n + col].clone();
        det = det * p.clone();
        let rp = S::from_f64(1.0) / p;
        for j in 0..n {
            a[col * n + j] = a[col * n + j].mul_ref(&rp);
            inv[col * n + j] = inv[col * n + j].mul_ref(&rp);
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r * n + col].clone();
            if f.is_zero() {
                continue;
            }
            let nf = -f;
            for j in 0..n {
                let (x, y) = (a[col * n + j].clone(), inv[col * n + j].clone());
                a[r * n + j].mul_add_assign(&nf, &x);
                inv[r * n + j].mul_add_assign(&nf, &y);
            }
        }
    }
    if det.value().abs() < SINGULAR_DET {
        return Err(LinalgError::Singular(det.value().abs()));
    }
    Ok((inv, det))
}

pub fn inverse(m: &[f64], n: usize) -> Result<Vec<f64>, LinalgError> {
    inverse_and_det(m, n).map(|(i, _)| i)
}

pub fn determinant(m: &[f64], n: usize) -> f64 {
    match inverse_and_det(m, n) {
        Ok((_, d)) => d,
        Err(LinalgError::Singular(d)) => d,
        Err(_) => 0.0,
    }
}

/// Lower-triangular `L` with `m = L Lᵀ`.
pub fn cholesky(m: &[f64], n: usize) -> Result<Vec<f64>, LinalgError> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = m[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(LinalgError::NotPositiveDefinite);
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Ok(l)
}

fn lower_triangular_inverse(l: &[f64], n: usize) -> Vec<f64> {
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0 / l[i * n + i];
        for j in 0..i {
            let s: f64 = (j..i).map(|k| l[i * n + k] * inv[k * n + j]).sum();
            inv[i * n + j] = -s / l[i * n + i];
        }
    }
    inv
}

/// Eigen-decomposition of a real symmetric matrix by cyclic Jacobi sweeps.
/// Returns eigenvalues sorted descending and the matching unit eigenvectors
/// as columns of a row-major matrix.
pub fn symmetric_eigen(m: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut a = m.to_vec();
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (a[i * n + j] + a[j * n + i]);
            a[i * n + j] = s;
            a[j * n + i] = s;
        }
    }
    let mut v = identity(n);
    let scale = a.iter().fold(0.0_f64, |s, x| s.max(x.abs())).max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
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
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].total_cmp(&a[i * n + i]));
    let vals = order.iter().map(|&i| a[i * n + i]).collect();
    let mut vecs = vec![0.0; n * n];
    for (new, &old) in order.iter().enumerate() {
        for k in 0..n {
            vecs[k * n + new] = v[k * n + old];
        }
    }
    (vals, vecs)
}

/// Eigen-decomposition of an operator `A` that is self-adjoint with respect
/// to a positive definite `g` (so `gA` is symmetric). Eigenvectors are
/// returned as `g`-orthonormal columns.
pub fn g_symmetric_eigen(g: &[f64], a: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>), LinalgError> {
    let l = cholesky(g, n)?;
    let li = lower_triangular_inverse(&l, n);
    let s = matmul(g, a, n);
    let m = matmul(&matmul(&li, &s, n), &transpose(&li, n, n), n);
    let (vals, w) = symmetric_eigen(&m, n);
    let vecs = matmul(&transpose(&li, n, n), &w, n);
    Ok((vals, vecs))
}

/// Coefficients `c_0 = 1, c_1, …, c_n` of `det(t·id − A) = Σ c_k t^(n−k)`.
pub fn faddeev_leverrier(a: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n + 1];
    c[0] = 1.0;
    let mut m = vec![0.0; n * n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{k-1} I
        let mut next = matmul(a, &m, n);
        for i in 0..n {
            next[i * n + i] += c[k - 1];
        }
        m = next;
        let am = matmul(a, &m, n);
        c[k] = -trace(&am, n) / k as f64;
    }
    c
}

/// Singular values of a `rows × cols` matrix, descending, by one-sided
/// Jacobi orthogonalisation of the columns.
pub fn singular_values(a: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    // work on columns stored contiguously
    let mut c = transpose(a, rows, cols);
    let col = |c: &[f64], j: usize| c[j * rows..(j + 1) * rows].to_vec();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let (cp, cq) = (col(&c, p), col(&c, q));
                let alpha: f64 = cp.iter().map(|x| x * x).sum();
                let beta: f64 = cq.iter().map(|x| x * x).sum();
                let gamma: f64 = cp.iter().zip(&cq).map(|(x, y)| x * y).sum();
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for k in 0..rows {
                    c[p * rows + k] = cs * cp[k] - sn * cq[k];
                    c[q * rows + k] = sn * cp[k] + cs * cq[k];
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = (0..cols)
        .map(|j| c[j * rows..(j + 1) * rows].iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Numerical rank: singular values above `rel_tol` times the largest.
pub fn rank(a: &[f64], rows: usize, cols: usize, rel_tol: f64) -> usize {
    let sv = singular_values(a, rows, cols);
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}
