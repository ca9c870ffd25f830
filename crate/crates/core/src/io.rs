//! Stable file formats: matrices as headered CSV at 17 significant digits
//! (enough to round-trip a double exactly), reports as key-sorted pretty
//! JSON, sweeps optionally as a static SVG scatter. Every write lands via a
//! temp file plus rename so a crash never leaves a half-written artifact
//! under the final name.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, SynthConfig};
use crate::error::{Error, Result};
use crate::probe::ProbeSweep;
use crate::solver::{LossBreakdown, ModelParams};
use crate::verify::SweepResult;
use crate::Mat;

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

/// One double at 17 significant digits; parsing this back recovers the
/// exact bit pattern.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write `bytes` under `path` atomically (same-directory temp + rename).
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp_name = path
        .file_name()
        .ok_or_else(|| Error::InvalidInput(format!("not a file path: {}", path_str(path))))?
        .to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, bytes).map_err(|e| Error::io(path_str(&tmp), e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path_str(path), e))
}

/// CSV with header `c0,c1,...` and one row per sample.
pub fn write_matrix_csv(path: &Path, m: &Mat) -> Result<()> {
    let mut out = String::new();
    for c in 0..m.ncols() {
        if c > 0 {
            out.push(',');
        }
        let _ = write!(out, "c{c}");
    }
    out.push('\n');
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if c > 0 {
                out.push(',');
            }
            out.push_str(&format_float(m[(r, c)]));
        }
        out.push('\n');
    }
    atomic_write(path, out.as_bytes())
}

pub fn read_matrix_csv(path: &Path) -> Result<Mat> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path_str(path), e))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::parse(path_str(path), "empty file"))?;
    let ncols = header.split(',').count();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|cell| {
                cell.trim().parse::<f64>().map_err(|_| {
                    Error::parse(path_str(path), format!("row {}: bad number {cell:?}", i + 1))
                })
            })
            .collect::<Result<_>>()?;
        if row.len() != ncols {
            return Err(Error::parse(
                path_str(path),
                format!("row {} has {} cells, header has {ncols}", i + 1, row.len()),
            ));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::parse(path_str(path), "no data rows"));
    }
    let nrows = rows.len();
    Ok(Mat::from_fn(nrows, ncols, |r, c| rows[r][c]))
}

/// Pretty JSON with recursively sorted keys and a trailing newline.
pub fn write_json_sorted<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    // Round-tripping through Value sorts object keys (its map is a BTreeMap).
    let v = serde_json::to_value(value)
        .map_err(|e| Error::parse(path_str(path), format!("serialize: {e}")))?;
    let mut text = serde_json::to_string_pretty(&v)
        .map_err(|e| Error::parse(path_str(path), format!("serialize: {e}")))?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path_str(path), e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(path_str(path), e.to_string()))
}

/// Sidecar for a dataset directory: the generating config when one exists,
/// the measured informativeness matrix, and the standardization flag.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub config: Option<SynthConfig>,
    pub sigma: [[f64; 2]; 2],
    pub standardized: bool,
}

/// Write `x1.csv`, `x2.csv`, `y1.csv`, `y2.csv`, `meta.json` under `dir`.
pub fn save_dataset(dir: &Path, d: &Dataset, meta: &DatasetMeta) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(path_str(dir), e))?;
    write_matrix_csv(&dir.join("x1.csv"), &d.x1)?;
    write_matrix_csv(&dir.join("x2.csv"), &d.x2)?;
    write_matrix_csv(&dir.join("y1.csv"), &d.y1)?;
    write_matrix_csv(&dir.join("y2.csv"), &d.y2)?;
    write_json_sorted(&dir.join("meta.json"), meta)
}

pub fn load_dataset(dir: &Path) -> Result<(Dataset, DatasetMeta)> {
    let meta: DatasetMeta = read_json(&dir.join("meta.json"))?;
    let x1 = read_matrix_csv(&dir.join("x1.csv"))?;
    let x2 = read_matrix_csv(&dir.join("x2.csv"))?;
    let y1 = read_matrix_csv(&dir.join("y1.csv"))?;
    let y2 = read_matrix_csv(&dir.join("y2.csv"))?;
    let d = Dataset::new(x1, x2, y1, y2, meta.standardized)?;
    Ok((d, meta))
}

/// Write `v1.csv`, `v2.csv`, `w1.csv`, `w2.csv`, `q1.csv` under `dir`.
pub fn write_params(dir: &Path, p: &ModelParams) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(path_str(dir), e))?;
    write_matrix_csv(&dir.join("v1.csv"), &p.v1)?;
    write_matrix_csv(&dir.join("v2.csv"), &p.v2)?;
    write_matrix_csv(&dir.join("w1.csv"), &p.w1)?;
    write_matrix_csv(&dir.join("w2.csv"), &p.w2)?;
    write_matrix_csv(&dir.join("q1.csv"), &p.q1)
}

pub fn write_losses_json(path: &Path, losses: &LossBreakdown) -> Result<()> {
    write_json_sorted(path, losses)
}

/// Oracle convergence record, one total per iteration.
pub fn write_trace_csv(path: &Path, trace: &[f64]) -> Result<()> {
    let mut out = String::from("iter,total\n");
    for (i, t) in trace.iter().enumerate() {
        let _ = writeln!(out, "{i},{}", format_float(*t));
    }
    atomic_write(path, out.as_bytes())
}

pub fn write_sweep_csv(path: &Path, sweep: &SweepResult) -> Result<()> {
    let mut out = String::from("lambda,pred1,pred2,align,total,sigma11_z,drift\n");
    for p in &sweep.points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            format_float(p.lambda),
            format_float(p.losses.pred1),
            format_float(p.losses.pred2),
            format_float(p.losses.align),
            format_float(p.losses.total),
            format_float(p.sigma11_z),
            format_float(p.drift),
        );
    }
    atomic_write(path, out.as_bytes())
}

pub fn write_probe_csv(path: &Path, sweep: &ProbeSweep) -> Result<()> {
    let mut out = String::from("lambda,seed,pred1,pred2,align,converged\n");
    for r in &sweep.runs {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            format_float(r.lambda),
            r.seed,
            format_float(r.losses.pred1),
            format_float(r.losses.pred2),
            format_float(r.losses.align),
            r.converged,
        );
    }
    atomic_write(path, out.as_bytes())
}

const SVG_W: f64 = 640.0;
const SVG_H: f64 = 480.0;
const SVG_MARGIN: f64 = 60.0;

fn svg_coord(v: f64, lo: f64, hi: f64, px_lo: f64, px_hi: f64) -> f64 {
    if hi > lo {
        px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo)
    } else {
        (px_lo + px_hi) / 2.0
    }
}

/// Static scatter of (alignment loss, prediction loss 1), one labelled point
/// per swept λ. Plain SVG text, no scripting.
pub fn write_sweep_svg(path: &Path, sweep: &SweepResult) -> Result<()> {
    let xs: Vec<f64> = sweep.points.iter().map(|p| p.losses.align).collect();
    let ys: Vec<f64> = sweep.points.iter().map(|p| p.losses.pred1).collect();
    let (x_lo, x_hi) = bounds(&xs);
    let (y_lo, y_hi) = bounds(&ys);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W}\" height=\"{SVG_H}\" viewBox=\"0 0 {SVG_W} {SVG_H}\">"
    );
    let _ = writeln!(s, "  <rect width=\"{SVG_W}\" height=\"{SVG_H}\" fill=\"white\"/>");
    let x0 = SVG_MARGIN;
    let x1 = SVG_W - SVG_MARGIN;
    let y0 = SVG_H - SVG_MARGIN;
    let y1 = SVG_MARGIN;
    let _ = writeln!(
        s,
        "  <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        s,
        "  <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        s,
        "  <text x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\">alignment loss</text>",
        (x0 + x1) / 2.0,
        SVG_H - 20.0
    );
    let _ = writeln!(
        s,
        "  <text x=\"20\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 20 {})\">prediction loss 1</text>",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
    for p in &sweep.points {
        let px = svg_coord(p.losses.align, x_lo, x_hi, x0, x1);
        let py = svg_coord(p.losses.pred1, y_lo, y_hi, y0, y1);
        let _ = writeln!(
            s,
            "  <circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"4\" fill=\"steelblue\"/>"
        );
        let _ = writeln!(
            s,
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\">λ={}</text>",
            px + 6.0,
            py - 6.0,
            trim_number(p.lambda)
        );
    }
    let _ = writeln!(s, "</svg>");
    atomic_write(path, s.as_bytes())
}

fn bounds(vals: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in vals {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = (hi - lo) * 0.05;
        (lo - pad, hi + pad)
    }
}

/// Short human label for a λ annotation (full precision lives in the CSV).
fn trim_number(x: f64) -> String {
    let s = format!("{x}");
    if s.len() <= 8 {
        s
    } else {
        format!("{x:.3e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data;
    use crate::verify::SweepPoint;
    use tempfile::tempdir;

    fn sample_matrix() -> Mat {
        let mut m = crate::rng::normal_matrix(3, "io.test", 7, 4);
        m[(0, 0)] = 0.1;
        m[(1, 1)] = -1.0 / 3.0;
        m[(2, 2)] = 1e-300;
        m[(3, 3)] = -2.5e17;
        m
    }

    #[test]
    fn matrix_round_trip_is_bit_exact() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let m = sample_matrix();
        write_matrix_csv(&path, &m).unwrap();
        let back = read_matrix_csv(&path).unwrap();
        assert_eq!(back.nrows(), m.nrows());
        assert_eq!(back.ncols(), m.ncols());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                assert_eq!(m[(r, c)].to_bits(), back[(r, c)].to_bits());
            }
        }
    }

    #[test]
    fn header_and_digit_format_are_pinned() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("one.csv");
        let m = Mat::from_row_slice(1, 2, &[0.1, 1.0]);
        write_matrix_csv(&path, &m).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "c0,c1\n1.0000000000000001e-1,1.0000000000000000e0\n");
    }

    #[test]
    fn json_keys_come_out_sorted() {
        #[derive(Serialize)]
        struct Unordered {
            zebra: u32,
            apple: u32,
            mango: u32,
        }
        let dir = tempdir().unwrap();
        let path = dir.path().join("u.json");
        write_json_sorted(
            &path,
            &Unordered {
                zebra: 1,
                apple: 2,
                mango: 3,
            },
        )
        .unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let a = text.find("apple").unwrap();
        let m = text.find("mango").unwrap();
        let z = text.find("zebra").unwrap();
        assert!(a < m && m < z);
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn writes_leave_no_temp_files() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_matrix_csv(&path, &Mat::identity(2, 2)).unwrap();
        let names: Vec<String> = std::fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .collect();
        assert_eq!(names, vec!["t.csv".to_string()]);
    }

    #[test]
    fn missing_file_is_io_error_and_garbage_is_parse_error() {
        let dir = tempdir().unwrap();
        assert!(matches!(
            read_matrix_csv(&dir.path().join("absent.csv")),
            Err(Error::Io { .. })
        ));
        let bad = dir.path().join("bad.csv");
        std::fs::write(&bad, "c0\nnot-a-number\n").unwrap();
        assert!(matches!(read_matrix_csv(&bad), Err(Error::Parse { .. })));
        let ragged = dir.path().join("ragged.csv");
        std::fs::write(&ragged, "c0,c1\n1.0\n").unwrap();
        assert!(matches!(read_matrix_csv(&ragged), Err(Error::Parse { .. })));
    }

    #[test]
    fn dataset_round_trip_preserves_bits_and_flag() {
        let cfg = data::SynthConfig {
            n: 30,
            d1: 4,
            d2: 3,
            c1: 2,
            c2: 2,
            k_shared: 2,
            k_spec1: 1,
            k_spec2: 1,
            noise_x1: 0.1,
            noise_x2: 0.1,
            noise_y1: 0.1,
            noise_y2: 0.1,
            cross_leak: 0.0,
            nonlinear: false,
            seed: 5,
        };
        let d = data::synth_generate(&cfg).unwrap();
        let meta = DatasetMeta {
            config: Some(cfg),
            sigma: [[0.9, 0.5], [0.4, 0.8]],
            standardized: d.standardized,
        };
        let dir = tempdir().unwrap();
        save_dataset(dir.path(), &d, &meta).unwrap();
        let (back, meta_back) = load_dataset(dir.path()).unwrap();
        assert!(back.standardized);
        assert_eq!(meta_back.sigma, meta.sigma);
        assert_eq!(meta_back.config.as_ref(), meta.config.as_ref());
        assert_eq!(d.x1, back.x1);
        assert_eq!(d.x2, back.x2);
        assert_eq!(d.y1, back.y1);
        assert_eq!(d.y2, back.y2);
    }

    #[test]
    fn sweep_files_have_pinned_schema() {
        let sweep = SweepResult {
            points: vec![
                SweepPoint {
                    lambda: 0.0,
                    losses: LossBreakdown::compose(1.0, 2.0, 3.0, 0.0),
                    sigma11_z: 0.75,
                    drift: 0.0,
                },
                SweepPoint {
                    lambda: 2.0,
                    losses: LossBreakdown::compose(1.5, 2.0, 0.5, 2.0),
                    sigma11_z: 0.5,
                    drift: 0.25,
                },
            ],
            degenerate: vec![],
        };
        let dir = tempdir().unwrap();
        let csv = dir.path().join("sweep.csv");
        write_sweep_csv(&csv, &sweep).unwrap();
        let text = std::fs::read_to_string(&csv).unwrap();
        assert!(text.starts_with("lambda,pred1,pred2,align,total,sigma11_z,drift\n"));
        assert_eq!(text.lines().count(), 3);

        let svg = dir.path().join("sweep.svg");
        write_sweep_svg(&svg, &sweep).unwrap();
        let text = std::fs::read_to_string(&svg).unwrap();
        assert!(text.starts_with("<svg"));
        assert_eq!(text.matches("<circle").count(), 2);
        assert!(text.contains("λ=2"));
        assert!(text.contains("alignment loss"));
        assert!(!text.contains("<script"));
    }

    #[test]
    fn trace_csv_is_indexed_from_zero() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("trace.csv");
        write_trace_csv(&path, &[5.0, 4.0, 3.5]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "iter,total");
        assert!(lines[1].starts_with("0,5.0"));
        assert!(lines[3].starts_with("2,3.5"));
    }
}
