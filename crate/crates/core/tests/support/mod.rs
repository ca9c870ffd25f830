//! Independent numerical routes for cross-checking the library.
//!
//! Everything here is hand-rolled from textbook algorithms (Jacobi
//! rotations, Cholesky, Gaussian elimination, Gram-Schmidt) on purpose:
//! the point of these tests is that two implementations with no shared
//! code agree, so nothing in this module may call into the library's
//! linear algebra.

#![allow(dead_code)] // each integration target uses a different subset

use alignlab_core::Mat;

/// Singular values by one-sided Jacobi: rotate column pairs until all are
/// mutually orthogonal, then read off the column norms. Descending.
pub fn jacobi_singular_values(m: &Mat) -> Vec<f64> {
    // Work on the taller orientation so columns are what gets orthogonalized.
    let mut a = if m.nrows() >= m.ncols() {
        m.clone()
    } else {
        m.transpose()
    };
    let p = a.ncols();
    let frob = a.norm();
    if frob == 0.0 {
        return vec![0.0; p];
    }
    let eps = 1e-14;
    for _sweep in 0..60 {
        let mut rotated = false;
        for i in 0..p {
            for j in (i + 1)..p {
                let ci = a.column(i);
                let cj = a.column(j);
                let app = ci.dot(&ci);
                let aqq = cj.dot(&cj);
                let apq = ci.dot(&cj);
                if apq.abs() <= eps * (app * aqq).sqrt().max(eps * frob * frob) {
                    continue;
                }
                rotated = true;
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for r in 0..a.nrows() {
                    let vi = a[(r, i)];
                    let vj = a[(r, j)];
                    a[(r, i)] = c * vi - s * vj;
                    a[(r, j)] = s * vi + c * vj;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = (0..p).map(|c| a.column(c).norm()).collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    sv
}

/// Symmetric eigendecomposition by cyclic two-sided Jacobi. Returns values
/// descending with matching orthonormal eigenvector columns.
pub fn jacobi_sym_eig(m: &Mat) -> (Vec<f64>, Mat) {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "jacobi_sym_eig needs a square matrix");
    let mut a = m.clone();
    let mut v = Mat::identity(n, n);
    let off = |a: &Mat| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)] * a[(i, j)];
                }
            }
        }
        s.sqrt()
    };
    let scale = m.norm().max(1e-300);
    for _sweep in 0..60 {
        if off(&a) <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-16 * scale {
                    continue;
                }
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // A <- Jᵀ A J on rows/columns p, q.
                for r in 0..n {
                    let arp = a[(r, p)];
                    let arq = a[(r, q)];
                    a[(r, p)] = c * arp - s * arq;
                    a[(r, q)] = s * arp + c * arq;
                }
                for col in 0..n {
                    let apc = a[(p, col)];
                    let aqc = a[(q, col)];
                    a[(p, col)] = c * apc - s * aqc;
                    a[(q, col)] = s * apc + c * aqc;
                }
                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = c * vrp - s * vrq;
                    v[(r, q)] = s * vrp + c * vrq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].partial_cmp(&a[(i, i)]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = Mat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &v.column(src));
    }
    (values, vectors)
}

/// Lower Cholesky factor of an SPD matrix. Panics on a non-positive pivot,
/// which in these tests means the input was constructed wrong.
pub fn cholesky_lower(b: &Mat) -> Mat {
    let n = b.nrows();
    assert_eq!(n, b.ncols());
    let mut l = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = b[(i, j)];
            for k in 0..j {
                sum -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                assert!(sum > 0.0, "matrix not positive definite at pivot {i}");
                l[(i, j)] = sum.sqrt();
            } else {
                l[(i, j)] = sum / l[(j, j)];
            }
        }
    }
    l
}

/// Solve L x = rhs for lower-triangular L, column by column.
pub fn forward_sub(l: &Mat, rhs: &Mat) -> Mat {
    let n = l.nrows();
    let mut x = rhs.clone();
    for col in 0..rhs.ncols() {
        for i in 0..n {
            let mut s = x[(i, col)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, col)];
            }
            x[(i, col)] = s / l[(i, i)];
        }
    }
    x
}

/// Solve Lᵀ x = rhs for lower-triangular L.
pub fn back_sub_transposed(l: &Mat, rhs: &Mat) -> Mat {
    let n = l.nrows();
    let mut x = rhs.clone();
    for col in 0..rhs.ncols() {
        for i in (0..n).rev() {
            let mut s = x[(i, col)];
            for k in (i + 1)..n {
                s -= l[(k, i)] * x[(k, col)];
            }
            x[(i, col)] = s / l[(i, i)];
        }
    }
    x
}

/// Generalized eigenproblem a x = λ b x for symmetric a and SPD b, by
/// explicit Cholesky whitening. Returns the top-k values (descending) and
/// b-orthonormal eigenvector columns.
pub fn chol_gen_eig(a: &Mat, b: &Mat, k: usize) -> (Vec<f64>, Mat) {
    let l = cholesky_lower(b);
    // C = L⁻¹ a L⁻ᵀ, formed via two triangular solves.
    let la = forward_sub(&l, a);
    let c = forward_sub(&l, &la.transpose());
    let c = (&c + c.transpose()) * 0.5;
    let (values, w) = jacobi_sym_eig(&c);
    let x = back_sub_transposed(&l, &w);
    (values[..k].to_vec(), x.columns(0, k).into_owned())
}

/// Solve a x = rhs by Gaussian elimination with partial pivoting.
pub fn lu_solve(a: &Mat, rhs: &Mat) -> Mat {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let mut m = a.clone();
    let mut x = rhs.clone();
    for col in 0..n {
        let mut piv = col;
        for r in (col + 1)..n {
            if m[(r, col)].abs() > m[(piv, col)].abs() {
                piv = r;
            }
        }
        assert!(m[(piv, col)].abs() > 1e-300, "singular system at column {col}");
        if piv != col {
            m.swap_rows(piv, col);
            x.swap_rows(piv, col);
        }
        for r in (col + 1)..n {
            let f = m[(r, col)] / m[(col, col)];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                m[(r, c)] -= f * m[(col, c)];
            }
            for c in 0..x.ncols() {
                x[(r, c)] -= f * x[(col, c)];
            }
        }
    }
    for col in 0..x.ncols() {
        for i in (0..n).rev() {
            let mut s = x[(i, col)];
            for k in (i + 1)..n {
                s -= m[(i, k)] * x[(k, col)];
            }
            x[(i, col)] = s / m[(i, i)];
        }
    }
    x
}

/// Least squares through the normal equations; needs full column rank.
pub fn normal_eq_lsq(x: &Mat, y: &Mat) -> Mat {
    let xtx = x.transpose() * x;
    let xty = x.transpose() * y;
    lu_solve(&xtx, &xty)
}

/// Ridge route to the pseudoinverse solution: (aᵀa + eps·I)⁻¹ aᵀ rhs.
pub fn ridge_pinv_solve(a: &Mat, rhs: &Mat, eps: f64) -> Mat {
    let mut ata = a.transpose() * a;
    for i in 0..ata.nrows() {
        ata[(i, i)] += eps;
    }
    lu_solve(&ata, &(a.transpose() * rhs))
}

/// Orthonormal basis of the column span by modified Gram-Schmidt with one
/// reorthogonalization pass; columns below the relative cutoff are dropped.
pub fn mgs_basis(m: &Mat) -> Mat {
    let scale = m
        .column_iter()
        .map(|c| c.norm())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let mut q: Vec<nalgebra::DVector<f64>> = Vec::new();
    for c in 0..m.ncols() {
        let mut v = m.column(c).into_owned();
        for _pass in 0..2 {
            for u in &q {
                let proj = u.dot(&v);
                v -= u * proj;
            }
        }
        let nrm = v.norm();
        if nrm > 1e-12 * scale {
            q.push(v / nrm);
        }
    }
    let mut out = Mat::zeros(m.nrows(), q.len());
    for (i, u) in q.iter().enumerate() {
        out.set_column(i, u);
    }
    out
}

/// Sigma informativeness by projection onto a Gram-Schmidt basis, sharing
/// no code with the library's pseudoinverse route.
pub fn brute_sigma(x: &Mat, y: &Mat) -> f64 {
    let q = mgs_basis(x);
    let yhat = &q * (q.transpose() * y);
    let nc = (y.nrows() * y.ncols()) as f64;
    (1.0 - (y - yhat).norm_squared() / nc).clamp(0.0, 1.0)
}

/// Largest absolute entry difference.
pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    assert_eq!(a.shape(), b.shape());
    (a - b).abs().max()
}

/// |a − b| relative to the larger magnitude, safe at zero.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}
