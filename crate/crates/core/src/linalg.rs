//! Dense decompositions with deterministic output conventions.
//!
//! All spectra come back sorted in descending order, and every eigen/singular
//! vector column is sign-fixed so that its largest-magnitude entry (first on
//! ties) is positive. Two runs on the same input produce identical bytes.

use crate::error::{Error, Result};
use crate::tol::Tolerances;
use crate::Mat;

/// Eigendecomposition of a symmetric matrix, values descending.
#[derive(Debug, Clone)]
pub struct SpectralDecomp {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, column j paired with `values[j]`.
    pub vectors: Mat,
}

/// Top-k solution of `a x = lambda b x`, values descending.
#[derive(Debug, Clone)]
pub struct GenEigResult {
    pub values: Vec<f64>,
    /// Columns are b-orthonormal: basisᵀ b basis = I.
    pub basis: Mat,
}

/// Flip column signs in place so each column's largest-magnitude entry
/// (first on ties) is positive. Returns which columns were flipped.
fn fix_signs(m: &mut Mat) -> Vec<bool> {
    let mut flipped = vec![false; m.ncols()];
    for j in 0..m.ncols() {
        let mut best = 0usize;
        let mut best_abs = 0.0f64;
        for (i, v) in m.column(j).iter().enumerate() {
            let a = v.abs();
            if a > best_abs {
                best_abs = a;
                best = i;
            }
        }
        if m[(best, j)] < 0.0 {
            flipped[j] = true;
            for i in 0..m.nrows() {
                m[(i, j)] = -m[(i, j)];
            }
        }
    }
    flipped
}

/// Economy SVD `m = u * diag(s) * vᵀ` with `s` descending and sign-fixed `u`
/// (v columns flipped in tandem so the product is unchanged).
///
/// `u` is nrows x r and `v` is ncols x r with r = min(nrows, ncols).
pub fn svd(m: &Mat) -> (Mat, Vec<f64>, Mat) {
    let dec = m.clone().svd(true, true);
    let mut u = dec.u.expect("svd requested u");
    let mut v = dec.v_t.expect("svd requested v_t").transpose();
    let s: Vec<f64> = dec.singular_values.iter().copied().collect();
    let flipped = fix_signs(&mut u);
    for (j, f) in flipped.iter().enumerate() {
        if *f {
            for i in 0..v.nrows() {
                v[(i, j)] = -v[(i, j)];
            }
        }
    }
    (u, s, v)
}

/// Number of singular values above `rel_cut` times the largest one.
pub fn rank_from_singulars(s: &[f64], rel_cut: f64) -> usize {
    let smax = s.first().copied().unwrap_or(0.0);
    if smax <= 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_cut * smax).count()
}

/// Rank of `m` by truncated SVD.
pub fn rank(m: &Mat, rel_cut: f64) -> usize {
    let (_, s, _) = svd(m);
    rank_from_singulars(&s, rel_cut)
}

/// Smallest relative gap (λ_j − λ_{j+1})/λ_1 over the adjacent pairs that
/// pin down the top-k eigenspace: pairs inside the top k plus the boundary
/// pair (k, k+1) when one exists. Infinite when no pair exists; zero when
/// the leading value is not positive.
///
/// `values` must be sorted descending.
pub fn min_rel_gap_topk(values: &[f64], k: usize) -> f64 {
    if values.is_empty() || k == 0 {
        return f64::INFINITY;
    }
    let top = values[0];
    if top <= 0.0 {
        return 0.0;
    }
    let mut gap = f64::INFINITY;
    for j in 0..k.min(values.len()) {
        if j + 1 < values.len() {
            gap = gap.min((values[j] - values[j + 1]) / top);
        }
    }
    gap
}

/// Eigendecomposition of a symmetric matrix.
///
/// Rejects inputs whose asymmetry exceeds the scaled tolerance rather than
/// silently symmetrizing them.
pub fn sym_eig(m: &Mat, tol: &Tolerances) -> Result<SpectralDecomp> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "sym_eig needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let mut asym = 0.0f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    let sym_tol = tol.symmetry(m.norm());
    if asym > sym_tol {
        return Err(Error::NotSymmetric {
            asym,
            tol: sym_tol,
        });
    }

    let eig = nalgebra::SymmetricEigen::new(m.clone());
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("finite eigenvalues")
    });
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = Mat::zeros(n, n);
    for (j, &src) in order.iter().enumerate() {
        vectors.set_column(j, &eig.eigenvectors.column(src));
    }
    fix_signs(&mut vectors);
    Ok(SpectralDecomp { values, vectors })
}

/// Top-k generalized eigenpairs of `a x = lambda b x` for symmetric `a` and
/// symmetric positive definite `b`, via whitening in the metric `b`.
///
/// The returned basis is b-orthonormal. A metric whose eigenvalue ratio
/// min/max falls under `tol.metric_floor` is rejected as ill-conditioned.
pub fn gen_eig_topk(a: &Mat, b: &Mat, k: usize, tol: &Tolerances) -> Result<GenEigResult> {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "gen_eig_topk: a is {}x{}, b is {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    let n = a.nrows();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, max: n });
    }

    let bd = sym_eig(b, tol)?;
    let max = bd.values[0];
    let min = bd.values[n - 1];
    let ratio = if max > 0.0 { min / max } else { 0.0 };
    if min <= 0.0 || ratio < tol.metric_floor {
        return Err(Error::IllConditionedMetric { ratio });
    }

    // Whitener w maps the problem to an ordinary symmetric one: wᵀ b w = I.
    let mut w = bd.vectors.clone();
    for j in 0..n {
        let s = bd.values[j].sqrt();
        for i in 0..n {
            w[(i, j)] /= s;
        }
    }
    let mut h = w.transpose() * a * &w;
    // The congruence is symmetric in exact arithmetic; remove rounding skew.
    let ht = h.transpose();
    h = (h + ht) * 0.5;
    let hd = sym_eig(&h, tol)?;

    let basis = &w * hd.vectors.columns(0, k);
    Ok(GenEigResult {
        values: hd.values[..k].to_vec(),
        basis,
    })
}

/// Distance between equal-dimension subspaces spanned by the orthonormal
/// columns of `u` and `v`: the sine of the largest principal angle,
/// equivalently sqrt(1 - smin²) for the smallest singular value of uᵀv.
/// Zero iff the spans coincide, one iff some direction of one span is
/// orthogonal to all of the other.
pub fn principal_angle_dist(u: &Mat, v: &Mat) -> Result<f64> {
    if u.ncols() != v.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "principal_angle_dist: {} vs {} columns",
            u.ncols(),
            v.ncols()
        )));
    }
    if u.nrows() != v.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "principal_angle_dist: {} vs {} rows",
            u.nrows(),
            v.nrows()
        )));
    }
    if u.ncols() == 0 {
        return Ok(0.0);
    }
    // Singular values of (I - u·uᵀ)·v are exactly the principal sines.
    // Computing the small quantity directly keeps near-equal spans at the
    // rounding floor instead of at sqrt(eps) from cancellation in 1 - smin².
    let resid = v - u * (u.transpose() * v);
    let (_, s, _) = svd(&resid);
    Ok(s.first().copied().unwrap_or(0.0).min(1.0))
}

/// Minimum-norm least-squares solution of `a x = rhs`, truncated at
/// relative cutoff `rel_cut` (directions whose pivot falls under `rel_cut`
/// times the largest are dropped, the same role the cutoff plays for
/// singular values).
///
/// Implemented as a complete orthogonal decomposition (column-pivoted QR,
/// then QR of the retained rows) rather than through the SVD: the SVD
/// backend loses several digits of subspace accuracy on exactly
/// rank-deficient input, while the Householder route stays at rounding
/// level, and rank-deficient designs are a supported input here.
pub fn pinv_solve(a: &Mat, rhs: &Mat, rel_cut: f64) -> Result<Mat> {
    if a.nrows() != rhs.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "pinv_solve: a has {} rows, rhs has {}",
            a.nrows(),
            rhs.nrows()
        )));
    }
    let qr = a.clone().col_piv_qr();
    let q = qr.q();
    let r = qr.r();
    // Column pivoting keeps |r_ii| non-increasing, so the first diagonal
    // entry plays the role of the largest singular value.
    let rmax = r.get((0, 0)).map(|x| x.abs()).unwrap_or(0.0);
    let mut x = Mat::zeros(a.ncols(), rhs.ncols());
    if rmax <= 0.0 {
        return Ok(x);
    }
    let dmax = r.nrows().min(r.ncols());
    let rank = (0..dmax)
        .take_while(|&i| r[(i, i)].abs() > rel_cut * rmax)
        .count();
    if rank == 0 {
        return Ok(x);
    }
    // Minimal residual needs R₁ z = (Qᵀ rhs)[..rank] with R₁ the retained
    // rows; the minimum-norm z among those lies in R₁'s row space, reached
    // through a second (thin) QR of R₁ᵀ.
    let t = (q.columns(0, rank).transpose() * rhs).rows(0, rank).into_owned();
    let r1t = r.rows(0, rank).transpose().into_owned();
    let qr2 = r1t.qr();
    let q2 = qr2.q();
    let r2 = qr2.r();
    let w = r2
        .transpose()
        .solve_lower_triangular(&t)
        .ok_or(Error::RankDeficient {
            rank,
            dim: dmax,
        })?;
    let mut z = &q2 * w;
    qr.p().inv_permute_rows(&mut z);
    x.copy_from(&z);
    Ok(x)
}
