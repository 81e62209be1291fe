//! Energy statistics of sampled cosine signals over random sensor layouts.
//!
//! Each realization samples n points in the unit square (uniformly or from
//! a bumpy mixture), builds a k-NN graph, and measures the energy
//! E = ‖s‖²_Q of s_i = cos(2πν·x_i + φ) under Q ∈ {I, D, C}. Across
//! realizations, per (ν, Q):
//!
//! - CV(ν) = max_φ σ(ν;φ)/μ(ν;φ), the worst-phase coefficient of variation
//! - m(ν)  = max_φ |1 − μ(ν;φ)/⟨μ(ν;·)⟩_φ|, the worst-phase mean deviation
//!
//! The Voronoi inner product approximates the continuous signal energy, so
//! its statistics stay flat where the other choices pick up the sampling
//! density.

use crate::error::{Error, Result};
use crate::graph::knn_graph;
use crate::seed::rng;
use crate::voronoi::{voronoi_areas, Rect};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointDistribution {
    Uniform,
    /// 0.5·Uniform + 0.25·N((0.3, 0.3), 0.08²I) + 0.25·N((0.7, 0.65), 0.08²I),
    /// truncated to the open unit square by rejection.
    NonUniformMixture,
}

impl PointDistribution {
    pub fn label(self) -> &'static str {
        match self {
            PointDistribution::Uniform => "uniform",
            PointDistribution::NonUniformMixture => "nonuniform",
        }
    }

    pub fn parse(s: &str) -> Result<PointDistribution> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uniform" => Ok(PointDistribution::Uniform),
            "nonuniform" | "non-uniform" => Ok(PointDistribution::NonUniformMixture),
            other => Err(Error::InvalidParameter(format!(
                "unknown distribution {other:?}"
            ))),
        }
    }

    fn draw(self, r: &mut ChaCha8Rng) -> [f64; 2] {
        loop {
            let p = match self {
                PointDistribution::Uniform => [r.gen::<f64>(), r.gen::<f64>()],
                PointDistribution::NonUniformMixture => {
                    let u = r.gen::<f64>();
                    if u < 0.5 {
                        [r.gen::<f64>(), r.gen::<f64>()]
                    } else {
                        let (cx, cy) = if u < 0.75 { (0.3, 0.3) } else { (0.7, 0.65) };
                        [
                            cx + 0.08 * r.sample::<f64, _>(StandardNormal),
                            cy + 0.08 * r.sample::<f64, _>(StandardNormal),
                        ]
                    }
                }
            };
            if Rect::UNIT.contains_strict(p) {
                return p;
            }
        }
    }
}

/// Samples `n` distinct points strictly inside the unit square.
pub fn sample_points(dist: PointDistribution, n: usize, seed: u64) -> Result<Vec<[f64; 2]>> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one point".into()));
    }
    let mut r = rng(seed);
    let mut points: Vec<[f64; 2]> = Vec::with_capacity(n);
    while points.len() < n {
        let p = dist.draw(&mut r);
        if !points.contains(&p) {
            points.push(p);
        }
    }
    Ok(points)
}

/// s_i = cos(2πν·x_i + φ), a horizontal plane wave sampled at the sensors.
pub fn cosine_signal(points: &[[f64; 2]], nu: f64, phi: f64) -> Vec<f64> {
    points
        .iter()
        .map(|p| (2.0 * PI * nu * p[0] + phi).cos())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnergyKind {
    Identity,
    Degree,
    VoronoiCell,
}

impl EnergyKind {
    pub const ALL: [EnergyKind; 3] = [
        EnergyKind::Identity,
        EnergyKind::Degree,
        EnergyKind::VoronoiCell,
    ];

    pub fn label(self) -> &'static str {
        match self {
            EnergyKind::Identity => "I",
            EnergyKind::Degree => "D",
            EnergyKind::VoronoiCell => "C",
        }
    }

    pub fn parse(s: &str) -> Result<EnergyKind> {
        match s.trim() {
            "I" | "i" | "identity" => Ok(EnergyKind::Identity),
            "D" | "d" | "degree" => Ok(EnergyKind::Degree),
            "C" | "c" | "voronoi" => Ok(EnergyKind::VoronoiCell),
            other => Err(Error::InvalidParameter(format!("unknown energy kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SensorConfig {
    pub distribution: PointDistribution,
    pub n_vertices: usize,
    pub n_realizations: usize,
    pub k: usize,
    pub sigma: f64,
    pub freqs: Vec<f64>,
    pub phases: Vec<f64>,
    pub kinds: Vec<EnergyKind>,
    /// Rescale edge weights to w/(d_i·d_j) before measuring degrees.
    pub prenormalize: bool,
    pub seed: u64,
}

impl Default for SensorConfig {
    fn default() -> Self {
        SensorConfig {
            distribution: PointDistribution::Uniform,
            n_vertices: 1000,
            n_realizations: 500,
            k: 10,
            sigma: 0.3,
            freqs: (1..=16).map(|i| i as f64 * 0.5).collect(),
            phases: (0..8).map(|k| 2.0 * PI * k as f64 / 8.0).collect(),
            kinds: EnergyKind::ALL.to_vec(),
            prenormalize: false,
            seed: 0,
        }
    }
}

impl SensorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_realizations < 2 {
            return Err(Error::InvalidParameter("need at least two realizations".into()));
        }
        if self.freqs.is_empty() || self.freqs.iter().any(|&v| v < 0.0 || !v.is_finite()) {
            return Err(Error::InvalidParameter("frequencies must be nonnegative".into()));
        }
        if self.phases.is_empty()
            || self
                .phases
                .iter()
                .any(|&p| !(0.0..2.0 * PI).contains(&p) || !p.is_finite())
        {
            return Err(Error::InvalidParameter("phases must lie in [0, 2π)".into()));
        }
        if self.kinds.is_empty() {
            return Err(Error::InvalidParameter("no energy kinds selected".into()));
        }
        Ok(())
    }
}

/// One per-realization measurement, long-format.
#[derive(Debug, Clone, Copy)]
pub struct EnergyRow {
    pub realization: usize,
    pub nu: f64,
    pub phi: f64,
    pub kind: EnergyKind,
    pub energy: f64,
}

/// Aggregate per (ν, Q) over all realizations and phases.
#[derive(Debug, Clone, Copy)]
pub struct EnergySummary {
    pub nu: f64,
    pub kind: EnergyKind,
    pub cv: f64,
    pub m: f64,
    /// ⟨μ(ν;·)⟩_φ, the phase-averaged mean energy.
    pub mean_energy: f64,
}

#[derive(Debug, Clone)]
pub struct EnergyStats {
    pub rows: Vec<EnergyRow>,
    pub summary: Vec<EnergySummary>,
    /// Point sets redrawn because the Voronoi construction rejected them.
    pub resampled: usize,
}

/// Runs the full experiment. Per-realization seeds are `seed + index`, so
/// extending `n_realizations` re-uses earlier draws unchanged.
/// One layout draw and its energies, in (freq, phase, kind) order, plus
/// the number of redraws the Voronoi construction forced.
fn run_realization(
    cfg: &SensorConfig,
    real: usize,
    needs_graph: bool,
    needs_cells: bool,
) -> Result<(Vec<EnergyRow>, usize)> {
    let base = cfg.seed.wrapping_add(real as u64);
    // the Voronoi construction can reject a draw (numerically collapsed
    // cell); retry with a perturbed seed and count it
    let mut resampled = 0usize;
    let mut attempt = 0u64;
    let (points, cells) = loop {
        let points =
            sample_points(cfg.distribution, cfg.n_vertices, base.wrapping_add(attempt << 32))?;
        if !needs_cells {
            break (points, Vec::new());
        }
        match voronoi_areas(&points, Rect::UNIT) {
            Ok(cells) => break (points, cells),
            Err(e) => {
                attempt += 1;
                resampled += 1;
                if attempt > 8 {
                    return Err(Error::Experiment(format!(
                        "realization {real}: Voronoi rejected {attempt} draws, last: {e}"
                    )));
                }
            }
        }
    };
    let degrees = if needs_graph {
        let g = knn_graph(&points, cfg.k, cfg.sigma)?;
        let g = if cfg.prenormalize { g.prenormalized()? } else { g };
        Some(g.degrees())
    } else {
        None
    };

    let mut rows = Vec::with_capacity(cfg.freqs.len() * cfg.phases.len() * cfg.kinds.len());
    for &nu in &cfg.freqs {
        for &phi in &cfg.phases {
            let s = cosine_signal(&points, nu, phi);
            for &kind in &cfg.kinds {
                let energy: f64 = match kind {
                    EnergyKind::Identity => s.iter().map(|v| v * v).sum(),
                    EnergyKind::Degree => {
                        let d = degrees.as_ref().expect("graph built for degree energy");
                        s.iter().zip(d.iter()).map(|(v, di)| di * v * v).sum()
                    }
                    EnergyKind::VoronoiCell => {
                        s.iter().zip(cells.iter()).map(|(v, ci)| ci * v * v).sum()
                    }
                };
                rows.push(EnergyRow {
                    realization: real,
                    nu,
                    phi,
                    kind,
                    energy,
                });
            }
        }
    }
    Ok((rows, resampled))
}

pub fn run_energy_experiment(cfg: &SensorConfig) -> Result<EnergyStats> {
    cfg.validate()?;
    let needs_graph = cfg.kinds.contains(&EnergyKind::Degree);
    let needs_cells = cfg.kinds.contains(&EnergyKind::VoronoiCell);

    // realizations are independent; collecting them indexed keeps the
    // output identical whatever the thread schedule
    let per_real: Vec<(Vec<EnergyRow>, usize)> = (0..cfg.n_realizations)
        .into_par_iter()
        .map(|real| run_realization(cfg, real, needs_graph, needs_cells))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(
        cfg.n_realizations * cfg.freqs.len() * cfg.phases.len() * cfg.kinds.len(),
    );
    // energies[f][p][k] over realizations
    let mut energies =
        vec![vec![vec![Vec::with_capacity(cfg.n_realizations); cfg.kinds.len()]; cfg.phases.len()]; cfg.freqs.len()];
    let mut resampled = 0usize;
    for (real_rows, real_resampled) in per_real {
        resampled += real_resampled;
        let mut it = real_rows.iter();
        for per_phase in energies.iter_mut() {
            for per_kind in per_phase.iter_mut() {
                for series in per_kind.iter_mut() {
                    let row = it.next().expect("row per (freq, phase, kind)");
                    series.push(row.energy);
                }
            }
        }
        rows.extend(real_rows);
    }

    let mut summary = Vec::with_capacity(cfg.freqs.len() * cfg.kinds.len());
    for (fi, &nu) in cfg.freqs.iter().enumerate() {
        for (ki, &kind) in cfg.kinds.iter().enumerate() {
            let mut mus = Vec::with_capacity(cfg.phases.len());
            let mut cv = 0.0f64;
            for per_kind in &energies[fi] {
                let e = &per_kind[ki];
                let mu = e.iter().sum::<f64>() / e.len() as f64;
                let var = e.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>()
                    / (e.len() as f64 - 1.0);
                // an identically-zero signal has μ = σ = 0; its phase
                // contributes no spread
                if mu > 0.0 {
                    cv = cv.max(var.sqrt() / mu);
                }
                mus.push(mu);
            }
            let grand = mus.iter().sum::<f64>() / mus.len() as f64;
            let m = if grand > 0.0 {
                mus.iter().map(|mu| (1.0 - mu / grand).abs()).fold(0.0, f64::max)
            } else {
                0.0
            };
            summary.push(EnergySummary {
                nu,
                kind,
                cv,
                m,
                mean_energy: grand,
            });
        }
    }
    Ok(EnergyStats {
        rows,
        summary,
        resampled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::InnerProduct;
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;

    fn small_config() -> SensorConfig {
        SensorConfig {
            n_vertices: 40,
            n_realizations: 4,
            freqs: vec![0.0, 1.0, 2.0],
            phases: vec![0.0, PI / 2.0, PI],
            seed: 11,
            ..SensorConfig::default()
        }
    }

    #[test]
    fn cosine_signal_closed_forms() {
        let pts = vec![[0.25, 0.9], [0.5, 0.1], [0.75, 0.4]];
        let ones = cosine_signal(&pts, 0.0, 0.0);
        assert!(ones.iter().all(|&v| v == 1.0));
        let zeros = cosine_signal(&pts, 0.0, PI / 2.0);
        assert!(zeros.iter().all(|&v| v.abs() < 1e-15));
        // cos(2π·1·0.25) = cos(π/2) = 0
        let s = cosine_signal(&pts, 1.0, 0.0);
        assert!(s[0].abs() < 1e-15);
        assert_abs_diff_eq!(s[1], -1.0, epsilon = 1e-15);
    }

    #[test]
    fn sampling_is_deterministic_and_distinct() {
        let a = sample_points(PointDistribution::Uniform, 100, 3).unwrap();
        let b = sample_points(PointDistribution::Uniform, 100, 3).unwrap();
        assert_eq!(a, b);
        for (i, p) in a.iter().enumerate() {
            assert!(Rect::UNIT.contains_strict(*p));
            for q in &a[..i] {
                assert_ne!(p, q);
            }
        }
    }

    #[test]
    fn uniform_sampling_fills_quadrants() {
        let pts = sample_points(PointDistribution::Uniform, 100_000, 1).unwrap();
        let mut counts = [0usize; 4];
        for p in &pts {
            let qx = usize::from(p[0] >= 0.5);
            let qy = usize::from(p[1] >= 0.5);
            counts[2 * qy + qx] += 1;
        }
        for &c in &counts {
            let frac = c as f64 / pts.len() as f64;
            assert!((frac - 0.25).abs() < 0.01, "quadrant fraction {frac}");
        }
    }

    #[test]
    fn nonuniform_sampling_concentrates_in_bumps() {
        let pts = sample_points(PointDistribution::NonUniformMixture, 20_000, 2).unwrap();
        let near = |c: [f64; 2]| {
            pts.iter()
                .filter(|p| (p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2) < 0.01)
                .count() as f64
                / pts.len() as f64
        };
        // a disc of radius 0.1 holds ~3.1% of a uniform draw
        let uniform_share = PI * 0.01;
        assert!(near([0.3, 0.3]) >= 2.0 * uniform_share);
        assert!(near([0.7, 0.65]) >= 2.0 * uniform_share);
    }

    #[test]
    fn energies_match_inner_product_norms() {
        let cfg = SensorConfig {
            n_vertices: 25,
            n_realizations: 2,
            freqs: vec![1.5],
            phases: vec![0.7],
            seed: 5,
            ..SensorConfig::default()
        };
        let stats = run_energy_experiment(&cfg).unwrap();
        // recompute realization 0 energies through InnerProduct
        let points = sample_points(cfg.distribution, cfg.n_vertices, cfg.seed).unwrap();
        let s = DVector::from_vec(cosine_signal(&points, 1.5, 0.7));
        let g = knn_graph(&points, cfg.k, cfg.sigma).unwrap();
        let q_i = InnerProduct::identity(25);
        let q_d = InnerProduct::degree(&g).unwrap();
        let q_c = InnerProduct::voronoi(&points, Rect::UNIT).unwrap();
        for row in stats.rows.iter().filter(|r| r.realization == 0) {
            let want = match row.kind {
                EnergyKind::Identity => q_i.inner(&s, &s),
                EnergyKind::Degree => q_d.inner(&s, &s),
                EnergyKind::VoronoiCell => q_c.inner(&s, &s),
            };
            assert_abs_diff_eq!(row.energy, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn constant_signal_cell_energy_is_domain_area() {
        let cfg = SensorConfig {
            n_vertices: 30,
            n_realizations: 3,
            freqs: vec![0.0],
            phases: vec![0.0],
            kinds: vec![EnergyKind::VoronoiCell],
            seed: 9,
            ..SensorConfig::default()
        };
        let stats = run_energy_experiment(&cfg).unwrap();
        for row in &stats.rows {
            assert_abs_diff_eq!(row.energy, 1.0, epsilon = 1e-9);
        }
        let s = &stats.summary[0];
        assert!(s.cv < 1e-9);
        assert_eq!(s.m, 0.0);
    }

    #[test]
    fn single_phase_gives_zero_mean_deviation() {
        let cfg = SensorConfig {
            phases: vec![0.3],
            ..small_config()
        };
        let stats = run_energy_experiment(&cfg).unwrap();
        for s in &stats.summary {
            assert_eq!(s.m, 0.0, "nu {} kind {}", s.nu, s.kind.label());
        }
    }

    #[test]
    fn realization_prefix_is_stable_under_extension() {
        let short = run_energy_experiment(&small_config()).unwrap();
        let long = run_energy_experiment(&SensorConfig {
            n_realizations: 8,
            ..small_config()
        })
        .unwrap();
        let shared: Vec<_> = long.rows.iter().filter(|r| r.realization < 4).collect();
        assert_eq!(shared.len(), short.rows.len());
        for (a, b) in short.rows.iter().zip(shared) {
            assert_eq!(a.energy, b.energy);
            assert_eq!(a.nu, b.nu);
            assert_eq!(a.phi, b.phi);
        }
    }

    #[test]
    fn prenormalization_changes_degree_energies() {
        let base = SensorConfig {
            kinds: vec![EnergyKind::Degree],
            ..small_config()
        };
        let plain = run_energy_experiment(&base).unwrap();
        let pre = run_energy_experiment(&SensorConfig {
            prenormalize: true,
            ..base
        })
        .unwrap();
        let diff = plain
            .rows
            .iter()
            .zip(&pre.rows)
            .any(|(a, b)| (a.energy - b.energy).abs() > 1e-9);
        assert!(diff);
    }

    #[test]
    fn config_validation() {
        assert!(SensorConfig {
            n_realizations: 1,
            ..small_config()
        }
        .validate()
        .is_err());
        assert!(SensorConfig {
            freqs: vec![-1.0],
            ..small_config()
        }
        .validate()
        .is_err());
        assert!(SensorConfig {
            phases: vec![7.0],
            ..small_config()
        }
        .validate()
        .is_err());
        assert!(SensorConfig {
            kinds: vec![],
            ..small_config()
        }
        .validate()
        .is_err());
    }
}
