//! How much of a target block is linearly recoverable from a design matrix.
//!
//! The central quantity is sigma = 1 − ‖Y − Ŷ‖²_F / (N·C) with Ŷ the
//! least-squares prediction; under unit-variance targets this is the mean
//! R² across target columns and lies in [0, 1].

use serde::Serialize;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg;
use crate::solver::ModelParams;
use crate::tol::Tolerances;
use crate::Mat;

/// The sigma quantities of one dataset: the 2×2 cross-modality matrix, the
/// spectral truncation curves, and optionally the representation-level value.
#[derive(Debug, Clone, Serialize)]
pub struct InformativenessReport {
    /// sigma[i][j] = informativeness of modality i+1 for target block j+1.
    pub sigma: [[f64; 2]; 2],
    /// sigma of the top-K spectral truncation of y1, for K = 1..=k.
    pub sigma_k1: Vec<f64>,
    /// Same for y2.
    pub sigma_k2: Vec<f64>,
    /// Informativeness of the learned representation Z₁ = X₁V₁ for y1.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma11_z: Option<f64>,
}

fn require_rows_match(x: &Mat, y: &Mat) -> Result<()> {
    if x.nrows() != y.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "design has {} rows, targets have {}",
            x.nrows(),
            y.nrows()
        )));
    }
    Ok(())
}

fn require_standardized(y: &Mat, tol: &Tolerances) -> Result<()> {
    let n = y.nrows() as f64;
    for c in 0..y.ncols() {
        let col = y.column(c);
        let mean = col.sum() / n;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        if mean.abs() > tol.standardized || (var - 1.0).abs() > tol.standardized {
            return Err(Error::RequiresStandardized { col: c, mean, var });
        }
    }
    Ok(())
}

/// Least-squares prediction of `y` from `x`: the orthogonal projection of
/// `y` onto the column space of `x` (minimum-norm coefficients when `x` is
/// rank deficient).
pub fn ols_predict(x: &Mat, y: &Mat, tol: &Tolerances) -> Result<Mat> {
    require_rows_match(x, y)?;
    let b = linalg::pinv_solve(x, y, tol.rel_cut)?;
    Ok(x * b)
}

/// Clamp rounding noise at the [0, 1] boundaries; anything beyond the slack
/// is a genuine arithmetic failure.
fn clamp_sigma(raw: f64, tol: &Tolerances) -> Result<f64> {
    if raw < -tol.sigma_slack || raw > 1.0 + tol.sigma_slack {
        return Err(Error::SigmaOutOfRange(raw));
    }
    Ok(raw.clamp(0.0, 1.0))
}

/// Fraction of the target Frobenius mass recovered by least squares on `x`.
/// Targets must be standardized; the design need not be.
pub fn sigma_informativeness(x: &Mat, y: &Mat, tol: &Tolerances) -> Result<f64> {
    require_rows_match(x, y)?;
    require_standardized(y, tol)?;
    let yhat = ols_predict(x, y, tol)?;
    let nc = (y.nrows() * y.ncols()) as f64;
    let raw = 1.0 - (y - yhat).norm_squared() / nc;
    clamp_sigma(raw, tol)
}

/// Informativeness of a learned representation for the targets. Identical
/// arithmetic to `sigma_informativeness`; named separately because the
/// design here is a representation, not a raw modality.
pub fn sigma_of_representation(z: &Mat, y: &Mat, tol: &Tolerances) -> Result<f64> {
    sigma_informativeness(z, y, tol)
}

/// Informativeness of the projection of `y` onto the top-k eigenspace of
/// yᵀy, used as its own design. Equals the top-k share of the squared
/// singular values. k = 0 is 0 by convention.
pub fn sigma_topk(y: &Mat, k: usize, tol: &Tolerances) -> Result<f64> {
    require_standardized(y, tol)?;
    let c = y.ncols();
    if k == 0 {
        return Ok(0.0);
    }
    if k > c {
        return Err(Error::InvalidK { k, max: c });
    }
    let mut g = y.transpose() * y;
    let gt = g.transpose();
    g = (g + gt) * 0.5;
    let eig = linalg::sym_eig(&g, tol)?;
    let p = eig.vectors.columns(0, k).into_owned();
    let design = y * &p * p.transpose();
    sigma_of_representation(&design, y, tol)
}

/// Fill the full sigma picture for a dataset; the representation-level entry
/// appears only when model parameters are supplied.
pub fn full_report(
    d: &Dataset,
    params: Option<&ModelParams>,
    k: usize,
    tol: &Tolerances,
) -> Result<InformativenessReport> {
    let sigma = [
        [
            sigma_informativeness(&d.x1, &d.y1, tol)?,
            sigma_informativeness(&d.x1, &d.y2, tol)?,
        ],
        [
            sigma_informativeness(&d.x2, &d.y1, tol)?,
            sigma_informativeness(&d.x2, &d.y2, tol)?,
        ],
    ];
    let mut sigma_k1 = Vec::new();
    for kk in 1..=k.min(d.c1()) {
        sigma_k1.push(sigma_topk(&d.y1, kk, tol)?);
    }
    let mut sigma_k2 = Vec::new();
    for kk in 1..=k.min(d.c2()) {
        sigma_k2.push(sigma_topk(&d.y2, kk, tol)?);
    }
    let sigma11_z = match params {
        Some(p) => {
            let z1 = &d.x1 * &p.v1;
            Some(sigma_of_representation(&z1, &d.y1, tol)?)
        }
        None => None,
    };
    Ok(InformativenessReport {
        sigma,
        sigma_k1,
        sigma_k2,
        sigma11_z,
    })
}
