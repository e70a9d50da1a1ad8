//! Small dense kernels for the desk-scale least-squares fits.
//!
//! Matrices are row-major `p × p` slices. Nothing here is meant for large p.

/// Solves `A x = b` for symmetric positive definite `A`. Returns `None` when
/// a pivot is not strictly positive.
pub fn cholesky_solve(a: &[f64], b: &[f64], p: usize) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), p * p);
    debug_assert_eq!(b.len(), p);
    let mut l = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..=i {
            let mut s = a[i * p + j];
            for k in 0..j {
                s -= l[i * p + k] * l[j * p + k];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return None;
                }
                l[i * p + i] = s.sqrt();
            } else {
                l[i * p + j] = s / l[j * p + j];
            }
        }
    }
    // L y = b
    let mut y = vec![0.0; p];
    for i in 0..p {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * p + k] * y[k];
        }
        y[i] = s / l[i * p + i];
    }
    // Lᵀ x = y
    let mut x = vec![0.0; p];
    for i in (0..p).rev() {
        let mut s = y[i];
        for k in i + 1..p {
            s -= l[k * p + i] * x[k];
        }
        x[i] = s / l[i * p + i];
    }
    Some(x)
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching eigenvectors as
/// rows of the second result.
pub fn symmetric_eigen(a: &[f64], p: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut m = a.to_vec();
    let mut v = vec![0.0; p * p];
    for i in 0..p {
        v[i * p + i] = 1.0;
    }
    let scale: f64 = m
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..p)
            .flat_map(|i| (0..p).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * p + j] * m[i * p + j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for q in 0..p {
            for r in q + 1..p {
                let apq = m[q * p + r];
                if apq == 0.0 {
                    continue;
                }
                let app = m[q * p + q];
                let aqq = m[r * p + r];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..p {
                    let mkq = m[k * p + q];
                    let mkr = m[k * p + r];
                    m[k * p + q] = c * mkq - s * mkr;
                    m[k * p + r] = s * mkq + c * mkr;
                }
                for k in 0..p {
                    let mqk = m[q * p + k];
                    let mrk = m[r * p + k];
                    m[q * p + k] = c * mqk - s * mrk;
                    m[r * p + k] = s * mqk + c * mrk;
                }
                for k in 0..p {
                    let vkq = v[k * p + q];
                    let vkr = v[k * p + r];
                    v[k * p + q] = c * vkq - s * vkr;
                    v[k * p + r] = s * vkq + c * vkr;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| m[a * p + a].total_cmp(&m[b * p + b]));
    let values = order.iter().map(|&i| m[i * p + i]).collect();
    let vectors = order
        .iter()
        .map(|&j| (0..p).map(|k| v[k * p + j]).collect())
        .collect();
    (values, vectors)
}
