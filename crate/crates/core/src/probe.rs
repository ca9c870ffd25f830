//! Two-layer tanh encoders with linear heads, trained by full-batch
//! gradient descent on the same prediction+alignment objective, to show the
//! trade-off survives nonlinearity.

use nalgebra::DVector;
use serde::Serialize;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::exec;
use crate::rng;
use crate::solver::LossBreakdown;
use crate::Mat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Activation {
    Tanh,
}

/// One hidden layer, tanh, then a linear map to the representation.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpEncoder {
    pub w_in: Mat,
    pub b_in: DVector<f64>,
    pub w_out: Mat,
    pub b_out: DVector<f64>,
    pub activation: Activation,
}

impl MlpEncoder {
    /// Random initialization scaled by fan-in; biases start at zero.
    pub fn init(seed: u64, tag: &str, d: usize, hidden: usize, k: usize) -> Self {
        let w_in = rng::normal_matrix(seed, &format!("{tag}.w_in"), d, hidden) / (d as f64).sqrt();
        let w_out =
            rng::normal_matrix(seed, &format!("{tag}.w_out"), hidden, k) / (hidden as f64).sqrt();
        MlpEncoder {
            w_in,
            b_in: DVector::zeros(hidden),
            w_out,
            b_out: DVector::zeros(k),
            activation: Activation::Tanh,
        }
    }

    pub fn hidden(&self) -> usize {
        self.w_in.ncols()
    }

    pub fn k(&self) -> usize {
        self.w_out.ncols()
    }
}

/// tanh(x·w_in + b_in)·w_out + b_out, biases broadcast across rows.
pub fn forward(enc: &MlpEncoder, x: &Mat) -> Result<Mat> {
    if x.ncols() != enc.w_in.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "input has {} features, encoder expects {}",
            x.ncols(),
            enc.w_in.nrows()
        )));
    }
    let mut t = x * &enc.w_in;
    for r in 0..t.nrows() {
        for c in 0..t.ncols() {
            t[(r, c)] = (t[(r, c)] + enc.b_in[c]).tanh();
        }
    }
    let mut out = &t * &enc.w_out;
    for r in 0..out.nrows() {
        for c in 0..out.ncols() {
            out[(r, c)] += enc.b_out[c];
        }
    }
    Ok(out)
}

/// The nonlinear variant of the objective: encoders replace the linear
/// maps, heads stay linear.
pub fn loss_eq2(
    enc1: &MlpEncoder,
    enc2: &MlpEncoder,
    w1: &Mat,
    w2: &Mat,
    q1: &Mat,
    d: &Dataset,
    lambda: f64,
) -> Result<LossBreakdown> {
    let z1 = forward(enc1, &d.x1)?;
    let z2 = forward(enc2, &d.x2)?;
    if w1.nrows() != z1.ncols() || w2.nrows() != z2.ncols() || q1.nrows() != z1.ncols() {
        return Err(Error::DimensionMismatch("head shapes do not match encoders".into()));
    }
    if w1.ncols() != d.y1.ncols() || w2.ncols() != d.y2.ncols() || q1.ncols() != z2.ncols() {
        return Err(Error::DimensionMismatch("head shapes do not match targets".into()));
    }
    let pred1 = (&z1 * w1 - &d.y1).norm_squared();
    let pred2 = (&z2 * w2 - &d.y2).norm_squared();
    let align = (&z1 * q1 - &z2).norm_squared();
    Ok(LossBreakdown::compose(pred1, pred2, align, lambda))
}

#[derive(Debug, Clone)]
pub struct EncoderGrads {
    pub w_in: Mat,
    pub b_in: DVector<f64>,
    pub w_out: Mat,
    pub b_out: DVector<f64>,
}

#[derive(Debug, Clone)]
pub struct ProbeGrads {
    pub enc1: EncoderGrads,
    pub enc2: EncoderGrads,
    pub w1: Mat,
    pub w2: Mat,
    pub q1: Mat,
}

fn column_sums(m: &Mat) -> DVector<f64> {
    let mut out = DVector::zeros(m.ncols());
    for c in 0..m.ncols() {
        out[c] = m.column(c).sum();
    }
    out
}

/// Backpropagate d(loss)/d(encoder output) through one encoder.
/// `t` is the post-activation hidden matrix from the forward pass.
fn encoder_backward(x: &Mat, t: &Mat, w_out: &Mat, d_z: &Mat) -> EncoderGrads {
    let d_w_out = t.transpose() * d_z;
    let d_b_out = column_sums(d_z);
    let d_t = d_z * w_out.transpose();
    let mut d_a = d_t;
    for r in 0..d_a.nrows() {
        for c in 0..d_a.ncols() {
            let tv = t[(r, c)];
            d_a[(r, c)] *= 1.0 - tv * tv;
        }
    }
    let d_w_in = x.transpose() * &d_a;
    let d_b_in = column_sums(&d_a);
    EncoderGrads {
        w_in: d_w_in,
        b_in: d_b_in,
        w_out: d_w_out,
        b_out: d_b_out,
    }
}

/// Exact analytic gradients of `loss_eq2` for every parameter, plus the
/// loss at the same point (one shared forward pass).
pub fn grad_eq2(
    enc1: &MlpEncoder,
    enc2: &MlpEncoder,
    w1: &Mat,
    w2: &Mat,
    q1: &Mat,
    d: &Dataset,
    lambda: f64,
) -> Result<(ProbeGrads, LossBreakdown)> {
    // Forward, keeping hidden activations for the backward pass.
    let hidden = |enc: &MlpEncoder, x: &Mat| -> Mat {
        let mut t = x * &enc.w_in;
        for r in 0..t.nrows() {
            for c in 0..t.ncols() {
                t[(r, c)] = (t[(r, c)] + enc.b_in[c]).tanh();
            }
        }
        t
    };
    if d.x1.ncols() != enc1.w_in.nrows() || d.x2.ncols() != enc2.w_in.nrows() {
        return Err(Error::DimensionMismatch("encoder input widths do not match data".into()));
    }
    let t1 = hidden(enc1, &d.x1);
    let t2 = hidden(enc2, &d.x2);
    let mut z1 = &t1 * &enc1.w_out;
    for r in 0..z1.nrows() {
        for c in 0..z1.ncols() {
            z1[(r, c)] += enc1.b_out[c];
        }
    }
    let mut z2 = &t2 * &enc2.w_out;
    for r in 0..z2.nrows() {
        for c in 0..z2.ncols() {
            z2[(r, c)] += enc2.b_out[c];
        }
    }

    let r1 = &z1 * w1 - &d.y1;
    let r2 = &z2 * w2 - &d.y2;
    let ra = &z1 * q1 - &z2;
    let pred1 = r1.norm_squared();
    let pred2 = r2.norm_squared();
    let align = ra.norm_squared();

    let d_w1 = z1.transpose() * &r1 * 2.0;
    let d_w2 = z2.transpose() * &r2 * 2.0;
    let d_q1 = z1.transpose() * &ra * (2.0 * lambda);
    let d_z1 = &r1 * w1.transpose() * 2.0 + &ra * q1.transpose() * (2.0 * lambda);
    let d_z2 = &r2 * w2.transpose() * 2.0 - &ra * (2.0 * lambda);

    Ok((
        ProbeGrads {
            enc1: encoder_backward(&d.x1, &t1, &enc1.w_out, &d_z1),
            enc2: encoder_backward(&d.x2, &t2, &enc2.w_out, &d_z2),
            w1: d_w1,
            w2: d_w2,
            q1: d_q1,
        },
        LossBreakdown::compose(pred1, pred2, align, lambda),
    ))
}

/// Width, depth-of-training, and step-size defaults for the probe; all
/// overridable from the command line.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeConfig {
    pub k: usize,
    pub hidden: usize,
    pub steps: usize,
    pub lr: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            k: 3,
            hidden: 32,
            steps: 1500,
            lr: 1e-2,
        }
    }
}

/// Final losses of one (λ, seed) training run.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeRun {
    pub lambda: f64,
    pub seed: u64,
    pub losses: LossBreakdown,
    /// False when the loss left the finite range during training.
    pub converged: bool,
}

/// Best run per λ, selected by the summed prediction losses.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeRunResult {
    pub lambda: f64,
    pub best_pred1: f64,
    pub best_pred2: f64,
    pub align_at_best: f64,
    pub seeds_used: Vec<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeSweep {
    /// Every (λ, seed) run in input order.
    pub runs: Vec<ProbeRun>,
    /// One entry per λ that had at least one convergent run.
    pub summary: Vec<ProbeRunResult>,
}

struct ProbeParams {
    enc1: MlpEncoder,
    enc2: MlpEncoder,
    w1: Mat,
    w2: Mat,
    q1: Mat,
}

fn init_params(d: &Dataset, cfg: &ProbeConfig, lambda_index: usize, seed: u64) -> ProbeParams {
    let k = cfg.k;
    let tag1 = format!("probe.l{lambda_index}.enc1");
    let tag2 = format!("probe.l{lambda_index}.enc2");
    let scale = 1.0 / (k as f64).sqrt();
    ProbeParams {
        enc1: MlpEncoder::init(seed, &tag1, d.d1(), cfg.hidden, k),
        enc2: MlpEncoder::init(seed, &tag2, d.d2(), cfg.hidden, k),
        w1: rng::normal_matrix(seed, &format!("probe.l{lambda_index}.w1"), k, d.c1()) * scale,
        w2: rng::normal_matrix(seed, &format!("probe.l{lambda_index}.w2"), k, d.c2()) * scale,
        q1: rng::normal_matrix(seed, &format!("probe.l{lambda_index}.q1"), k, k) * scale,
    }
}

fn train_one(
    d: &Dataset,
    cfg: &ProbeConfig,
    lambda: f64,
    lambda_index: usize,
    seed: u64,
) -> Result<ProbeRun> {
    let mut p = init_params(d, cfg, lambda_index, seed);
    // Fixed step on gradients of the mean (per-sample) loss, so the usable
    // learning-rate range does not depend on the sample count.
    let step = cfg.lr / d.n() as f64;
    let mut finite = true;
    for _ in 0..cfg.steps {
        let (g, losses) = grad_eq2(&p.enc1, &p.enc2, &p.w1, &p.w2, &p.q1, d, lambda)?;
        if !losses.total.is_finite() {
            finite = false;
            break;
        }
        p.enc1.w_in -= &g.enc1.w_in * step;
        p.enc1.b_in -= &g.enc1.b_in * step;
        p.enc1.w_out -= &g.enc1.w_out * step;
        p.enc1.b_out -= &g.enc1.b_out * step;
        p.enc2.w_in -= &g.enc2.w_in * step;
        p.enc2.b_in -= &g.enc2.b_in * step;
        p.enc2.w_out -= &g.enc2.w_out * step;
        p.enc2.b_out -= &g.enc2.b_out * step;
        p.w1 -= &g.w1 * step;
        p.w2 -= &g.w2 * step;
        p.q1 -= &g.q1 * step;
    }
    let losses = loss_eq2(&p.enc1, &p.enc2, &p.w1, &p.w2, &p.q1, d, lambda)?;
    let converged = finite && losses.total.is_finite();
    Ok(ProbeRun {
        lambda,
        seed,
        losses,
        converged,
    })
}

/// Train every (λ, seed) pair and summarize the best run per λ by summed
/// prediction loss. Identical inputs give bit-identical results regardless
/// of scheduling.
pub fn train_sweep(
    d: &Dataset,
    lambdas: &[f64],
    seeds: &[u64],
    cfg: &ProbeConfig,
) -> Result<ProbeSweep> {
    sweep_with(d, lambdas, seeds, cfg, exec::map_ordered)
}

/// Always-sequential twin of `train_sweep`.
pub fn train_sweep_serial(
    d: &Dataset,
    lambdas: &[f64],
    seeds: &[u64],
    cfg: &ProbeConfig,
) -> Result<ProbeSweep> {
    sweep_with(d, lambdas, seeds, cfg, exec::map_serial)
}

fn sweep_with(
    d: &Dataset,
    lambdas: &[f64],
    seeds: &[u64],
    cfg: &ProbeConfig,
    map: impl Fn(
        Vec<(usize, f64, u64)>,
        &(dyn Fn((usize, f64, u64)) -> Result<ProbeRun> + Sync),
    ) -> Vec<Result<ProbeRun>>,
) -> Result<ProbeSweep> {
    if lambdas.is_empty() || seeds.is_empty() {
        return Err(Error::InvalidInput("need at least one lambda and one seed".into()));
    }
    if lambdas.iter().any(|l| !l.is_finite() || *l < 0.0) {
        return Err(Error::InvalidInput("lambdas must be finite and >= 0".into()));
    }
    if cfg.k == 0 || cfg.hidden == 0 {
        return Err(Error::InvalidInput("probe needs k >= 1 and hidden >= 1".into()));
    }
    let mut tasks = Vec::new();
    for (li, &l) in lambdas.iter().enumerate() {
        for &s in seeds {
            tasks.push((li, l, s));
        }
    }
    let task = |(li, l, s): (usize, f64, u64)| train_one(d, cfg, l, li, s);
    let runs: Vec<ProbeRun> = map(tasks, &task).into_iter().collect::<Result<_>>()?;

    let mut summary = Vec::new();
    for &l in lambdas {
        let group: Vec<&ProbeRun> = runs
            .iter()
            .filter(|r| r.lambda == l && r.converged)
            .collect();
        let Some(best) = group
            .iter()
            .min_by(|a, b| {
                let ka = a.losses.pred1 + a.losses.pred2;
                let kb = b.losses.pred1 + b.losses.pred2;
                ka.partial_cmp(&kb).expect("finite losses")
            })
        else {
            continue;
        };
        summary.push(ProbeRunResult {
            lambda: l,
            best_pred1: best.losses.pred1,
            best_pred2: best.losses.pred2,
            align_at_best: best.losses.align,
            seeds_used: group.iter().map(|r| r.seed).collect(),
        });
    }
    Ok(ProbeSweep { runs, summary })
}
