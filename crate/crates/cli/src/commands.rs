//! One function per subcommand. Commands read from `--data`, write to
//! `--out`, and never touch anything else; every writer in the library goes
//! through a temp-file rename, so a crash cannot leave half-written files.

use std::fs;
use std::path::Path;

use alignlab_core::data::{self, synth_generate, Dataset, SynthConfig};
use alignlab_core::io::{self, DatasetMeta};
use alignlab_core::probe::train_sweep;
use alignlab_core::solver::{oracle_minimize, solve_closed_form};
use alignlab_core::verify::{
    information_loss_probe, lambda_sweep, proof_step_suite, thm2_assumption_check,
};
use alignlab_core::{fixtures, informativeness, Error, Result, Tolerances};
use serde::Serialize;

use crate::config::{pick, FileConfig};

/// Objective agreement required between the two solver routes.
const EQUIV_REL_TOL: f64 = 1e-4;
/// The closed form may not sit above the iterative optimum by more than this.
const EQUIV_ABS_SLACK: f64 = 1e-6;
/// Floating-point slack on the nonnegativity of the information-loss gap.
const GAP_SLACK: f64 = 1e-9;

const DEFAULT_LAMBDA: f64 = 0.0;
const DEFAULT_EQUIV_LAMBDA: f64 = 1.0;
const DEFAULT_RESTARTS: usize = 8;
const DEFAULT_SEED: u64 = 0;

fn prepare_out(out: &Path) -> Result<()> {
    fs::create_dir_all(out).map_err(|e| Error::Io {
        path: out.display().to_string(),
        source: e,
    })
}

fn canon(p: &Path) -> Result<std::path::PathBuf> {
    p.canonicalize().map_err(|e| Error::Io {
        path: p.display().to_string(),
        source: e,
    })
}

/// Read commands must not write into the directory they read from.
fn load_for(data: &Path, out: &Path) -> Result<(Dataset, DatasetMeta)> {
    prepare_out(out)?;
    if canon(data)? == canon(out)? {
        return Err(Error::InvalidInput(
            "output directory must differ from the input directory".into(),
        ));
    }
    io::load_dataset(data)
}

pub fn gen(out: &Path, config: Option<&Path>, seed: Option<u64>) -> Result<()> {
    let mut cfg: SynthConfig = match config {
        Some(p) => io::read_json(p)?,
        None => fixtures::thm2_linear(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let d = synth_generate(&cfg)?;
    let tol = Tolerances::default();
    let report = informativeness::full_report(&d, None, 1, &tol)?;
    prepare_out(out)?;
    io::save_dataset(
        out,
        &d,
        &DatasetMeta {
            config: Some(cfg),
            sigma: report.sigma,
            standardized: d.standardized,
        },
    )
}

pub fn check(data: &Path, out: &Path, k: Option<usize>, config: Option<&Path>) -> Result<()> {
    let fc = FileConfig::load(config)?;
    let tol = fc.tolerances();
    let k = pick(k, &fc.k, fixtures::FIXTURE_K);
    let (d, _) = load_for(data, out)?;
    // Failed assumptions land in the report, not the exit code; only
    // structural problems (unstandardized targets, k out of range) error.
    let assumptions = data::check_assumptions(&d, k, &tol)?;
    io::write_json_sorted(&out.join("assumptions.json"), &assumptions)?;
    let report = informativeness::full_report(&d, None, k, &tol)?;
    io::write_json_sorted(&out.join("report.json"), &report)
}

pub fn solve(
    data: &Path,
    out: &Path,
    k: Option<usize>,
    lambda: Option<f64>,
    config: Option<&Path>,
) -> Result<()> {
    let fc = FileConfig::load(config)?;
    let tol = fc.tolerances();
    let k = pick(k, &fc.k, fixtures::FIXTURE_K);
    let lambda = pick(lambda, &fc.lambda, DEFAULT_LAMBDA);
    let (d, _) = load_for(data, out)?;
    let sol = solve_closed_form(&d, k, lambda, &tol)?;
    io::write_params(out, &sol.params)?;
    io::write_losses_json(&out.join("losses.json"), &sol.losses)?;
    let report = informativeness::full_report(&d, Some(&sol.params), k, &tol)?;
    io::write_json_sorted(&out.join("report.json"), &report)
}

#[allow(clippy::too_many_arguments)]
pub fn oracle(
    data: &Path,
    out: &Path,
    k: Option<usize>,
    lambda: Option<f64>,
    restarts: Option<usize>,
    seed: Option<u64>,
    config: Option<&Path>,
) -> Result<()> {
    let fc = FileConfig::load(config)?;
    let tol = fc.tolerances();
    let k = pick(k, &fc.k, fixtures::FIXTURE_K);
    let lambda = pick(lambda, &fc.lambda, DEFAULT_LAMBDA);
    let restarts = pick(restarts, &fc.restarts, DEFAULT_RESTARTS);
    let seed = pick(seed, &fc.seed, DEFAULT_SEED);
    let (d, _) = load_for(data, out)?;
    let (params, losses, trace) = oracle_minimize(&d, k, lambda, restarts, seed, &tol)?;
    io::write_params(out, &params)?;
    io::write_losses_json(&out.join("losses.json"), &losses)?;
    io::write_trace_csv(&out.join("trace.csv"), &trace)
}

pub fn sweep(
    data: &Path,
    out: &Path,
    k: Option<usize>,
    lambdas: Option<Vec<f64>>,
    svg: bool,
    config: Option<&Path>,
) -> Result<()> {
    let fc = FileConfig::load(config)?;
    let tol = fc.tolerances();
    let k = pick(k, &fc.k, fixtures::FIXTURE_K);
    let lambdas = pick(lambdas, &fc.lambdas, fixtures::sweep_lambdas());
    let svg = svg || fc.svg.unwrap_or(false);
    let (d, _) = load_for(data, out)?;
    let result = lambda_sweep(&d, k, &lambdas, &tol)?;
    io::write_sweep_csv(&out.join("sweep.csv"), &result)?;
    if svg {
        io::write_sweep_svg(&out.join("sweep.svg"), &result)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct EquivalenceReport {
    lambda: f64,
    restarts: usize,
    closed_total: f64,
    oracle_total: f64,
    rel_gap: f64,
    rel_tol: f64,
    closed_not_worse: bool,
    within_rel_tol: bool,
}

#[derive(Serialize)]
struct InfoLossReport {
    lambda: f64,
    sigma11: f64,
    sigma11_z: f64,
    gap: f64,
    gap_nonnegative: bool,
    thm2_i: bool,
    thm2_ii: bool,
    sigma_values: data::SigmaEvidence,
}

#[derive(Serialize)]
struct VerifyReport {
    proof_steps: alignlab_core::verify::ProofStepReport,
    equivalence: EquivalenceReport,
    information_loss: InfoLossReport,
    all_pass: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn verify(
    data: &Path,
    out: &Path,
    k: Option<usize>,
    lambda: Option<f64>,
    lambdas: Option<Vec<f64>>,
    seed: Option<u64>,
    restarts: Option<usize>,
    config: Option<&Path>,
) -> Result<()> {
    let fc = FileConfig::load(config)?;
    let tol = fc.tolerances();
    let k = pick(k, &fc.k, fixtures::FIXTURE_K);
    let lambda = pick(lambda, &fc.lambda, DEFAULT_EQUIV_LAMBDA);
    let lambdas = pick(lambdas, &fc.lambdas, fixtures::sweep_lambdas());
    let seed = pick(seed, &fc.seed, DEFAULT_SEED);
    let restarts = pick(restarts, &fc.restarts, DEFAULT_RESTARTS);
    if lambdas.is_empty() {
        return Err(Error::InvalidInput("empty lambda list".into()));
    }
    let (d, _) = load_for(data, out)?;

    let proof_steps = proof_step_suite(seed, &tol)?;

    let closed = solve_closed_form(&d, k, lambda, &tol)?;
    let (_, oracle_losses, _) = oracle_minimize(&d, k, lambda, restarts, seed, &tol)?;
    let rel_gap =
        (closed.losses.total - oracle_losses.total).abs() / oracle_losses.total.abs().max(1.0);
    let equivalence = EquivalenceReport {
        lambda,
        restarts,
        closed_total: closed.losses.total,
        oracle_total: oracle_losses.total,
        rel_gap,
        rel_tol: EQUIV_REL_TOL,
        closed_not_worse: closed.losses.total <= oracle_losses.total + EQUIV_ABS_SLACK,
        within_rel_tol: rel_gap <= EQUIV_REL_TOL,
    };

    let lambda_max = *lambdas.last().unwrap();
    let (sigma11, sigma11_z, gap) = information_loss_probe(&d, k, lambda_max, &tol)?;
    let (thm2_i, thm2_ii, sigma_values) = thm2_assumption_check(&d, k, &tol)?;
    let information_loss = InfoLossReport {
        lambda: lambda_max,
        sigma11,
        sigma11_z,
        gap,
        gap_nonnegative: gap >= -GAP_SLACK,
        thm2_i,
        thm2_ii,
        sigma_values,
    };

    let all_pass = proof_steps.all_pass
        && equivalence.closed_not_worse
        && equivalence.within_rel_tol
        && information_loss.gap_nonnegative;
    let report = VerifyReport {
        proof_steps,
        equivalence,
        information_loss,
        all_pass,
    };
    io::write_json_sorted(&out.join("verify.json"), &report)
}

pub fn probe(
    data: &Path,
    out: &Path,
    k: Option<usize>,
    lambdas: Option<Vec<f64>>,
    seed: Option<u64>,
    config: Option<&Path>,
) -> Result<()> {
    let fc = FileConfig::load(config)?;
    let pc = fc.probe_config(k);
    let lambdas = pick(lambdas, &fc.lambdas, fixtures::probe_lambdas());
    let seeds = match seed {
        Some(s) => vec![s],
        None => fc.seeds.clone().unwrap_or_else(fixtures::probe_seeds),
    };
    let (d, _) = load_for(data, out)?;
    let sweep = train_sweep(&d, &lambdas, &seeds, &pc)?;
    io::write_probe_csv(&out.join("probe_sweep.csv"), &sweep)?;
    io::write_json_sorted(&out.join("probe_summary.json"), &sweep.summary)
}
