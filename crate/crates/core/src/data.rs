//! Dataset container, standardization, spectral assumption checks, and the
//! synthetic two-modality generators used by every experiment.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::informativeness;
use crate::linalg;
use crate::rng;
use crate::tol::Tolerances;
use crate::Mat;

/// Two input modalities and their two target blocks, sharing a sample axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x1: Mat,
    pub x2: Mat,
    pub y1: Mat,
    pub y2: Mat,
    /// True when targets are zero-mean unit-variance and inputs zero-mean.
    pub standardized: bool,
}

impl Dataset {
    /// Validating constructor. When `standardized` is claimed, the column
    /// moments are verified rather than trusted.
    pub fn new(x1: Mat, x2: Mat, y1: Mat, y2: Mat, standardized: bool) -> Result<Self> {
        let d = Dataset {
            x1,
            x2,
            y1,
            y2,
            standardized,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn n(&self) -> usize {
        self.x1.nrows()
    }
    pub fn d1(&self) -> usize {
        self.x1.ncols()
    }
    pub fn d2(&self) -> usize {
        self.x2.ncols()
    }
    pub fn c1(&self) -> usize {
        self.y1.ncols()
    }
    pub fn c2(&self) -> usize {
        self.y2.ncols()
    }

    fn validate(&self) -> Result<()> {
        let n = self.n();
        for (name, m) in [
            ("x1", &self.x1),
            ("x2", &self.x2),
            ("y1", &self.y1),
            ("y2", &self.y2),
        ] {
            if m.nrows() != n {
                return Err(Error::InvalidInput(format!(
                    "{name} has {} rows, expected {n}",
                    m.nrows()
                )));
            }
            if m.ncols() == 0 {
                return Err(Error::InvalidInput(format!("{name} has no columns")));
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("{name} has non-finite entries")));
            }
        }
        let dim_max = self.d1().max(self.d2()).max(self.c1()).max(self.c2());
        if n <= dim_max {
            return Err(Error::InvalidInput(format!(
                "need more samples than any feature/target dimension: n = {n}, max dim = {dim_max}"
            )));
        }
        if self.standardized {
            let tol = Tolerances::default();
            for y in [&self.y1, &self.y2] {
                for c in 0..y.ncols() {
                    let (mean, var) = column_moments(y, c);
                    if mean.abs() > tol.standardized || (var - 1.0).abs() > tol.standardized {
                        return Err(Error::RequiresStandardized { col: c, mean, var });
                    }
                }
            }
            for (name, x) in [("x1", &self.x1), ("x2", &self.x2)] {
                for c in 0..x.ncols() {
                    let (mean, _) = column_moments(x, c);
                    if mean.abs() > tol.standardized {
                        return Err(Error::InvalidInput(format!(
                            "{name} column {c} claimed centered but has mean {mean:.3e}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Mean and population (1/N) variance of one column.
fn column_moments(m: &Mat, col: usize) -> (f64, f64) {
    let n = m.nrows() as f64;
    let c = m.column(col);
    let mean = c.sum() / n;
    let var = c.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var)
}

fn center_columns(m: &Mat) -> Mat {
    let mut out = m.clone();
    for c in 0..m.ncols() {
        let (mean, _) = column_moments(m, c);
        for r in 0..m.nrows() {
            out[(r, c)] -= mean;
        }
    }
    out
}

fn standardize_columns(m: &Mat) -> Result<Mat> {
    let mut out = m.clone();
    for c in 0..m.ncols() {
        let (mean, var) = column_moments(m, c);
        if var <= f64::EPSILON {
            return Err(Error::DegenerateTarget { col: c });
        }
        let scale = 1.0 / var.sqrt();
        for r in 0..m.nrows() {
            out[(r, c)] = (out[(r, c)] - mean) * scale;
        }
    }
    Ok(out)
}

/// Standardized copy: targets to zero mean and unit population variance,
/// inputs to zero mean. Idempotent.
pub fn standardize(d: &Dataset) -> Result<Dataset> {
    Dataset::new(
        center_columns(&d.x1),
        center_columns(&d.x2),
        standardize_columns(&d.y1)?,
        standardize_columns(&d.y2)?,
        true,
    )
}

/// The four informativeness quantities Theorem-style regime checks compare.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SigmaEvidence {
    /// Informativeness of the second modality for its own targets.
    pub sigma22: f64,
    /// Top-k truncation level of the second target block.
    pub sigma2k: f64,
    /// Cross informativeness of the second modality for the first targets.
    pub sigma21: f64,
    /// Top-k truncation level of the first target block.
    pub sigma1k: f64,
}

/// Spectral and informativeness preconditions of the linear theory,
/// reported rather than enforced.
#[derive(Debug, Clone, Serialize)]
pub struct AssumptionReport {
    pub rank_x1: usize,
    pub rank_x2: usize,
    pub full_rank_x1: bool,
    pub full_rank_x2: bool,
    /// Smallest relative eigengap among the top-k (and boundary) eigenvalues
    /// of x·xᵀ; multiplicity-one holds iff this exceeds the spectral-gap
    /// tolerance.
    pub topk_gap_x1: f64,
    pub topk_gap_x2: f64,
    /// Whether every target eigenvalue dominates the sum of the ones after it.
    pub dominance_ok_y1: bool,
    pub dominance_ok_y2: bool,
    /// sigma22 >= sigma2k.
    pub thm2_i: bool,
    /// sigma21 < sigma1k.
    pub thm2_ii: bool,
    pub sigma_values: SigmaEvidence,
}

/// Eigenvalues of m·mᵀ above numerical rank, descending (squared singular
/// values of m).
fn gram_eigenvalues(m: &Mat, rel_cut: f64) -> Vec<f64> {
    let (_, s, _) = linalg::svd(m);
    let smax = s.first().copied().unwrap_or(0.0);
    s.iter()
        .take_while(|&&x| x > rel_cut * smax && smax > 0.0)
        .map(|x| x * x)
        .collect()
}

/// λ_j > Σ_{i>j} λ_i for every j.
fn dominance_holds(values: &[f64]) -> bool {
    let mut tail: f64 = values.iter().sum();
    for &v in values {
        tail -= v;
        if v <= tail {
            return false;
        }
    }
    true
}

pub(crate) fn thm2_sigma_evidence(d: &Dataset, k: usize, tol: &Tolerances) -> Result<SigmaEvidence> {
    let sigma22 = informativeness::sigma_informativeness(&d.x2, &d.y2, tol)?;
    let sigma21 = informativeness::sigma_informativeness(&d.x2, &d.y1, tol)?;
    // Truncation saturates at the full spectrum once k reaches the target
    // dimension.
    let sigma2k = informativeness::sigma_topk(&d.y2, k.min(d.c2()), tol)?;
    let sigma1k = informativeness::sigma_topk(&d.y1, k.min(d.c1()), tol)?;
    Ok(SigmaEvidence {
        sigma22,
        sigma2k,
        sigma21,
        sigma1k,
    })
}

/// Measure the spectral assumptions of the linear theory on a standardized
/// dataset. Failures are reported in flags; the only errors are structural
/// (unstandardized targets, k out of range).
pub fn check_assumptions(d: &Dataset, k: usize, tol: &Tolerances) -> Result<AssumptionReport> {
    let dmin = d.d1().min(d.d2());
    if k == 0 || k > dmin {
        return Err(Error::InvalidK { k, max: dmin });
    }

    let rank_x1 = linalg::rank(&d.x1, tol.rel_cut);
    let rank_x2 = linalg::rank(&d.x2, tol.rel_cut);

    let ev_x1 = gram_eigenvalues(&d.x1, tol.rel_cut);
    let ev_x2 = gram_eigenvalues(&d.x2, tol.rel_cut);
    let ev_y1 = gram_eigenvalues(&d.y1, tol.rel_cut);
    let ev_y2 = gram_eigenvalues(&d.y2, tol.rel_cut);

    let sigma_values = thm2_sigma_evidence(d, k, tol)?;

    Ok(AssumptionReport {
        rank_x1,
        rank_x2,
        full_rank_x1: rank_x1 == d.d1(),
        full_rank_x2: rank_x2 == d.d2(),
        topk_gap_x1: linalg::min_rel_gap_topk(&ev_x1, k),
        topk_gap_x2: linalg::min_rel_gap_topk(&ev_x2, k),
        dominance_ok_y1: dominance_holds(&ev_y1),
        dominance_ok_y2: dominance_holds(&ev_y2),
        thm2_i: sigma_values.sigma22 >= sigma_values.sigma2k,
        thm2_ii: sigma_values.sigma21 < sigma_values.sigma1k,
        sigma_values,
    })
}

/// Latent-factor layout and noise levels of the synthetic generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n: usize,
    pub d1: usize,
    pub d2: usize,
    pub c1: usize,
    pub c2: usize,
    /// Latent factors common to both modalities.
    pub k_shared: usize,
    /// Factors private to modality 1 / modality 2.
    pub k_spec1: usize,
    pub k_spec2: usize,
    pub noise_x1: f64,
    pub noise_x2: f64,
    pub noise_y1: f64,
    pub noise_y2: f64,
    /// How much of the modality-2 private factors leaks into the first
    /// target block, in [0, 1].
    pub cross_leak: f64,
    pub nonlinear: bool,
    pub seed: u64,
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let dim_max = self.d1.max(self.d2).max(self.c1).max(self.c2);
        if self.d1 == 0 || self.d2 == 0 || self.c1 == 0 || self.c2 == 0 {
            return Err(Error::InvalidConfig("all dimensions must be >= 1".into()));
        }
        if self.n <= dim_max {
            return Err(Error::InvalidConfig(format!(
                "n = {} must exceed every dimension (max {dim_max})",
                self.n
            )));
        }
        if self.k_shared + self.k_spec1 > self.d1 {
            return Err(Error::InvalidConfig(format!(
                "k_shared + k_spec1 = {} exceeds d1 = {}",
                self.k_shared + self.k_spec1,
                self.d1
            )));
        }
        if self.k_shared + self.k_spec2 > self.d2 {
            return Err(Error::InvalidConfig(format!(
                "k_shared + k_spec2 = {} exceeds d2 = {}",
                self.k_shared + self.k_spec2,
                self.d2
            )));
        }
        for (name, v) in [
            ("noise_x1", self.noise_x1),
            ("noise_x2", self.noise_x2),
            ("noise_y1", self.noise_y1),
            ("noise_y2", self.noise_y2),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidConfig(format!("{name} must be finite and >= 0")));
            }
        }
        if !self.cross_leak.is_finite() || !(0.0..=1.0).contains(&self.cross_leak) {
            return Err(Error::InvalidConfig("cross_leak must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

pub(crate) fn hconcat(parts: &[&Mat]) -> Mat {
    let rows = parts.first().map(|m| m.nrows()).unwrap_or(0);
    let cols = parts.iter().map(|m| m.ncols()).sum();
    let mut out = Mat::zeros(rows, cols);
    let mut off = 0;
    for p in parts {
        out.view_mut((0, off), (rows, p.ncols())).copy_from(*p);
        off += p.ncols();
    }
    out
}

/// Draw a standardized two-modality dataset from the latent-factor model.
/// Identical configs produce bit-identical datasets.
pub fn synth_generate(cfg: &SynthConfig) -> Result<Dataset> {
    cfg.validate()?;
    let seed = cfg.seed;
    let n = cfg.n;

    let s = rng::normal_matrix(seed, "latent.shared", n, cfg.k_shared);
    let u1 = rng::normal_matrix(seed, "latent.spec1", n, cfg.k_spec1);
    let u2 = rng::normal_matrix(seed, "latent.spec2", n, cfg.k_spec2);

    let m1 = rng::normal_matrix(seed, "mix.x1", cfg.k_shared + cfg.k_spec1, cfg.d1);
    let m2 = rng::normal_matrix(seed, "mix.x2", cfg.k_shared + cfg.k_spec2, cfg.d2);
    let b1 = rng::normal_matrix(
        seed,
        "mix.y1",
        cfg.k_shared + cfg.k_spec1 + cfg.k_spec2,
        cfg.c1,
    );
    let b2 = rng::normal_matrix(seed, "mix.y2", cfg.k_shared + cfg.k_spec2, cfg.c2);

    let u2_leak = &u2 * cfg.cross_leak;
    let mut x1 = hconcat(&[&s, &u1]) * m1;
    let mut x2 = hconcat(&[&s, &u2]) * m2;
    let mut y1 = hconcat(&[&s, &u1, &u2_leak]) * b1;
    let mut y2 = hconcat(&[&s, &u2]) * b2;

    if cfg.nonlinear {
        for m in [&mut x1, &mut x2, &mut y1, &mut y2] {
            m.apply(|v| *v = v.tanh());
        }
    }

    x1 += rng::normal_matrix(seed, "noise.x1", n, cfg.d1) * cfg.noise_x1;
    x2 += rng::normal_matrix(seed, "noise.x2", n, cfg.d2) * cfg.noise_x2;
    y1 += rng::normal_matrix(seed, "noise.y1", n, cfg.c1) * cfg.noise_y1;
    y2 += rng::normal_matrix(seed, "noise.y2", n, cfg.c2) * cfg.noise_y2;

    standardize(&Dataset {
        x1,
        x2,
        y1,
        y2,
        standardized: false,
    })
}

/// Nonlinear-variant entry point; honors the flag either way, so the
/// `nonlinear = false` path is identical to `synth_generate`.
pub fn synth_nonlinear(cfg: &SynthConfig) -> Result<Dataset> {
    synth_generate(cfg)
}
