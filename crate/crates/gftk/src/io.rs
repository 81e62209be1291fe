//! CSV, basis, and manifest I/O with byte-stable formatting.
//!
//! Numbers are written with Rust's shortest round-trip formatting (17
//! significant digits at most, '.' decimal separator), so identical runs
//! produce byte-identical files. Manifests record what produced an
//! artifact: subcommand, version, seed, resolved configuration, input
//! digests, and the output list. Nothing time-dependent is stored.

use crate::cluster::{ClusterStudyRow, LowpassCurvePoint};
use crate::error::{Error, Result};
use crate::gft::{GftBasis, SolverDiagnostics};
use crate::operators::InnerProduct;
use crate::sensor::{EnergyRow, EnergySummary};
use nalgebra::{DMatrix, DVector};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// Shortest decimal that parses back to exactly `v`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn parse_f64(path: &Path, line_no: usize, token: &str) -> Result<f64> {
    token
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::parse(path, line_no, format!("not a number: {token:?}")))
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text.lines().map(|l| l.to_string()).collect())
}

/// One value per line. A leading non-numeric line is treated as a header.
pub fn read_signal_csv(path: &Path) -> Result<DVector<f64>> {
    let mut values = Vec::new();
    for (i, line) in read_lines(path)?.iter().enumerate() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if values.is_empty() && i == 0 && t.parse::<f64>().is_err() {
            continue;
        }
        values.push(parse_f64(path, i + 1, t)?);
    }
    if values.is_empty() {
        return Err(Error::parse(path, 0, "no values"));
    }
    Ok(DVector::from_vec(values))
}

pub fn write_signal_csv(path: &Path, x: &DVector<f64>) -> Result<()> {
    let mut out = String::new();
    for v in x.iter() {
        out.push_str(&fmt_f64(*v));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn write_points_csv(path: &Path, points: &[[f64; 2]]) -> Result<()> {
    let mut out = String::from("x,y\n");
    for p in points {
        let _ = writeln!(out, "{},{}", fmt_f64(p[0]), fmt_f64(p[1]));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn read_points_csv(path: &Path) -> Result<Vec<[f64; 2]>> {
    let mut points = Vec::new();
    for (i, line) in read_lines(path)?.iter().enumerate() {
        let t = line.trim();
        if t.is_empty() || (i == 0 && t.starts_with(|c: char| c.is_alphabetic())) {
            continue;
        }
        let mut parts = t.split(',');
        let x = parts
            .next()
            .ok_or_else(|| Error::parse(path, i + 1, "missing x"))?;
        let y = parts
            .next()
            .ok_or_else(|| Error::parse(path, i + 1, "missing y"))?;
        if parts.next().is_some() {
            return Err(Error::parse(path, i + 1, "expected two columns"));
        }
        points.push([parse_f64(path, i + 1, x)?, parse_f64(path, i + 1, y)?]);
    }
    if points.is_empty() {
        return Err(Error::parse(path, 0, "no points"));
    }
    Ok(points)
}

/// Dense rows, comma-separated columns.
pub fn write_matrix_csv(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let mut out = String::new();
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if c > 0 {
                out.push(',');
            }
            out.push_str(&fmt_f64(m[(r, c)]));
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn read_matrix_csv(path: &Path) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in read_lines(path)?.iter().enumerate() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        // optional header row
        if i == 0 && rows.is_empty() && t.split(',').any(|tok| tok.trim().parse::<f64>().is_err())
        {
            continue;
        }
        let row: Result<Vec<f64>> =
            t.split(',').map(|tok| parse_f64(path, i + 1, tok)).collect();
        let row = row?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::parse(path, i + 1, "ragged rows"));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::parse(path, 0, "empty matrix"));
    }
    let (nr, nc) = (rows.len(), rows[0].len());
    Ok(DMatrix::from_fn(nr, nc, |r, c| rows[r][c]))
}

/// Diagonal Q as one entry per line; general Q as dense rows.
pub fn write_q_csv(path: &Path, q: &InnerProduct) -> Result<()> {
    match q {
        InnerProduct::Diagonal { q: d, .. } => write_signal_csv(path, d),
        InnerProduct::General { q: m, .. } => write_matrix_csv(path, m),
    }
}

/// Shape-detecting reader: rows with commas mean a full matrix, a single
/// column means a diagonal.
pub fn read_q_csv(path: &Path) -> Result<InnerProduct> {
    let m = read_matrix_csv(path)?;
    if m.ncols() == 1 {
        InnerProduct::custom_diagonal(m.column(0).into_owned())
    } else {
        InnerProduct::general(m)
    }
}

fn read_key_value_lines(path: &Path) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (i, line) in read_lines(path)?.iter().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with('[') {
            continue;
        }
        let (k, v) = t
            .split_once('=')
            .ok_or_else(|| Error::parse(path, i + 1, "expected key=value"))?;
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(pairs)
}

/// key=value config file; later keys override earlier ones.
pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>> {
    read_key_value_lines(path)
}

const BASIS_LAMBDA: &str = "lambda.csv";
const BASIS_MODES: &str = "modes.csv";
const BASIS_Q: &str = "q.csv";
const BASIS_META: &str = "meta.txt";

/// Writes a basis as a directory of lambda.csv (with header), modes.csv,
/// q.csv, and a meta.txt sidecar.
pub fn export_basis(dir: &Path, b: &GftBasis) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut lam = String::from("lambda\n");
    for v in b.freqs().iter() {
        lam.push_str(&fmt_f64(*v));
        lam.push('\n');
    }
    fs::write(dir.join(BASIS_LAMBDA), lam).map_err(|e| Error::io(dir.join(BASIS_LAMBDA), e))?;
    write_matrix_csv(&dir.join(BASIS_MODES), b.modes())?;
    write_q_csv(&dir.join(BASIS_Q), b.q())?;
    let d = b.diagnostics();
    let meta = format!(
        "n={}\nnum_modes={}\nvariation={}\nq_kind={}\nsolver={}\northonormality_residual={}\n",
        b.n(),
        b.num_modes(),
        b.variation(),
        b.q().label(),
        d.solver,
        fmt_f64(d.orthonormality_residual),
    );
    fs::write(dir.join(BASIS_META), meta).map_err(|e| Error::io(dir.join(BASIS_META), e))
}

/// Reads a basis directory back. The analysis operator, orthonormality
/// residual, and degeneracy diagnostics are recomputed from the files.
pub fn import_basis(dir: &Path) -> Result<GftBasis> {
    let lam_path = dir.join(BASIS_LAMBDA);
    let freqs = read_signal_csv(&lam_path)?;
    let modes = read_matrix_csv(&dir.join(BASIS_MODES))?;
    let mut q = read_q_csv(&dir.join(BASIS_Q))?;
    let meta = read_key_value_lines(&dir.join(BASIS_META))?;
    let get = |key: &str| {
        meta.iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.clone())
            .ok_or_else(|| Error::parse(dir.join(BASIS_META), 0, format!("missing key {key}")))
    };
    let n: usize = get("n")?
        .parse()
        .map_err(|_| Error::parse(dir.join(BASIS_META), 0, "bad n"))?;
    let num_modes: usize = get("num_modes")?
        .parse()
        .map_err(|_| Error::parse(dir.join(BASIS_META), 0, "bad num_modes"))?;
    if modes.nrows() != n || modes.ncols() != num_modes || freqs.len() != num_modes {
        return Err(Error::parse(
            dir.join(BASIS_META),
            0,
            format!(
                "meta says {n}×{num_modes}, files hold {}×{} modes and {} frequencies",
                modes.nrows(),
                modes.ncols(),
                freqs.len()
            ),
        ));
    }
    if q.dim() != n {
        return Err(Error::parse(dir.join(BASIS_Q), 0, "inner product size mismatch"));
    }
    if let InnerProduct::Diagonal { label, .. } = &mut q {
        *label = get("q_kind")?;
    }
    let diagnostics = SolverDiagnostics {
        solver: get("solver")?,
        ..SolverDiagnostics::default()
    };
    Ok(GftBasis::assemble(modes, freqs, q, get("variation")?, diagnostics))
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for b in digest {
        let _ = write!(hex, "{b:02x}");
    }
    Ok(hex)
}

/// Everything needed to audit or re-run a CLI invocation. Contains no
/// timestamps, so identical runs write identical manifests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunManifest {
    pub subcommand: String,
    pub version: String,
    pub seed: u64,
    /// Resolved configuration, sorted by key on write.
    pub config: Vec<(String, String)>,
    /// (path, sha256 of the bytes read).
    pub inputs: Vec<(PathBuf, String)>,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(subcommand: impl Into<String>, seed: u64) -> RunManifest {
        RunManifest {
            subcommand: subcommand.into(),
            version: crate::VERSION.to_string(),
            seed,
            config: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.config.push((key.into(), value.into()));
    }

    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        let digest = sha256_file(path)?;
        self.inputs.push((path.to_path_buf(), digest));
        Ok(())
    }

    pub fn add_output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        let _ = writeln!(out, "subcommand={}", self.subcommand);
        let _ = writeln!(out, "version={}", self.version);
        let _ = writeln!(out, "seed={}", self.seed);
        let mut config = self.config.clone();
        config.sort();
        for (k, v) in &config {
            let _ = writeln!(out, "config.{k}={v}");
        }
        for (p, digest) in &self.inputs {
            let _ = writeln!(out, "input={digest} {}", p.display());
        }
        for p in &self.outputs {
            let _ = writeln!(out, "output={}", p.display());
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<RunManifest> {
        let mut m = RunManifest::new("", 0);
        let mut seen_subcommand = false;
        for (i, line) in read_lines(path)?.iter().enumerate() {
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            let (k, v) = t
                .split_once('=')
                .ok_or_else(|| Error::parse(path, i + 1, "expected key=value"))?;
            match k {
                "subcommand" => {
                    m.subcommand = v.to_string();
                    seen_subcommand = true;
                }
                "version" => m.version = v.to_string(),
                "seed" => {
                    m.seed = v
                        .parse()
                        .map_err(|_| Error::parse(path, i + 1, "bad seed"))?;
                }
                "input" => {
                    let (digest, p) = v
                        .split_once(' ')
                        .ok_or_else(|| Error::parse(path, i + 1, "expected 'digest path'"))?;
                    m.inputs.push((PathBuf::from(p), digest.to_string()));
                }
                "output" => m.outputs.push(PathBuf::from(v)),
                other => {
                    let key = other
                        .strip_prefix("config.")
                        .ok_or_else(|| Error::parse(path, i + 1, format!("unknown key {other}")))?;
                    m.config.push((key.to_string(), v.to_string()));
                }
            }
        }
        if !seen_subcommand {
            return Err(Error::parse(path, 0, "missing subcommand"));
        }
        Ok(m)
    }

    /// Re-digests the recorded inputs; returns the paths whose bytes no
    /// longer match.
    pub fn changed_inputs(&self) -> Result<Vec<PathBuf>> {
        let mut changed = Vec::new();
        for (p, recorded) in &self.inputs {
            if &sha256_file(p)? != recorded {
                changed.push(p.clone());
            }
        }
        Ok(changed)
    }
}

pub fn write_cluster_report_csv(path: &Path, rows: &[ClusterStudyRow]) -> Result<()> {
    let mut out = String::from("config,seed,accuracy,f1_sparse,ncut_own,ncut_gtv_I,diagnostics\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.method.label(),
            r.seed,
            fmt_f64(r.accuracy),
            fmt_f64(r.f1_sparse),
            fmt_f64(r.ncut_own),
            fmt_f64(r.ncut_gtv_identity),
            r.diagnostics
        );
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn write_curve_csv(path: &Path, curve: &[LowpassCurvePoint]) -> Result<()> {
    let mut out = String::from("l,lambda_l,qmse,imse\n");
    for p in curve {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            p.l,
            fmt_f64(p.lambda),
            fmt_f64(p.qmse),
            fmt_f64(p.imse)
        );
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn write_energy_rows_csv(path: &Path, rows: &[EnergyRow]) -> Result<()> {
    let mut out = String::from("realization,nu,phi,q_kind,energy\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.realization,
            fmt_f64(r.nu),
            fmt_f64(r.phi),
            r.kind.label(),
            fmt_f64(r.energy)
        );
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn write_energy_summary_csv(path: &Path, rows: &[EnergySummary]) -> Result<()> {
    let mut out = String::from("nu,q_kind,cv,m,mean_energy\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(r.nu),
            r.kind.label(),
            fmt_f64(r.cv),
            fmt_f64(r.m),
            fmt_f64(r.mean_energy)
        );
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}
