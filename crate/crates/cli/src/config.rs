//! Optional run-config file. Every field mirrors a flag; explicit flags win
//! over file values, which win over built-in defaults.

use std::path::Path;

use alignlab_core::probe::ProbeConfig;
use alignlab_core::{fixtures, io, Result, Tolerances};
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub k: Option<usize>,
    pub lambda: Option<f64>,
    pub lambdas: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub seeds: Option<Vec<u64>>,
    pub restarts: Option<usize>,
    pub svg: Option<bool>,
    pub tol: Option<TolOverride>,
    pub probe: Option<ProbeOverride>,
}

/// Partial tolerance override; unset fields keep their defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolOverride {
    pub ortho: Option<f64>,
    pub resid: Option<f64>,
    pub rel_cut: Option<f64>,
    pub spectral_gap: Option<f64>,
    pub sigma_slack: Option<f64>,
    pub intersect: Option<f64>,
    pub metric_floor: Option<f64>,
    pub standardized: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeOverride {
    pub k: Option<usize>,
    pub hidden: Option<usize>,
    pub steps: Option<usize>,
    pub lr: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<FileConfig> {
        match path {
            None => Ok(FileConfig::default()),
            Some(p) => io::read_json(p),
        }
    }

    pub fn tolerances(&self) -> Tolerances {
        let mut t = Tolerances::default();
        if let Some(o) = &self.tol {
            if let Some(v) = o.ortho {
                t.ortho = v;
            }
            if let Some(v) = o.resid {
                t.resid = v;
            }
            if let Some(v) = o.rel_cut {
                t.rel_cut = v;
            }
            if let Some(v) = o.spectral_gap {
                t.spectral_gap = v;
            }
            if let Some(v) = o.sigma_slack {
                t.sigma_slack = v;
            }
            if let Some(v) = o.intersect {
                t.intersect = v;
            }
            if let Some(v) = o.metric_floor {
                t.metric_floor = v;
            }
            if let Some(v) = o.standardized {
                t.standardized = v;
            }
        }
        t
    }

    /// Probe hyperparameters: frozen defaults, then file, then the flag.
    pub fn probe_config(&self, k_flag: Option<usize>) -> ProbeConfig {
        let mut pc = fixtures::probe_config();
        if let Some(o) = &self.probe {
            if let Some(v) = o.k {
                pc.k = v;
            }
            if let Some(v) = o.hidden {
                pc.hidden = v;
            }
            if let Some(v) = o.steps {
                pc.steps = v;
            }
            if let Some(v) = o.lr {
                pc.lr = v;
            }
        }
        if let Some(v) = k_flag {
            pc.k = v;
        }
        pc
    }
}

/// Flag value, else file value, else default.
pub fn pick<T: Clone>(flag: Option<T>, file: &Option<T>, default: T) -> T {
    flag.or_else(|| file.clone()).unwrap_or(default)
}
