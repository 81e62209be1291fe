//! Acceptance gate: one test per criterion, each printing a
//! "criterion N: PASS" line (visible with --nocapture; the harness line
//! itself carries the per-criterion verdict otherwise).

mod common;

use common::*;
use gftk::bilateral::{bilateral_filter, Image};
use gftk::cluster::{
    lowpass_indicator_study, make_dataset, method_operator, run_clustering_study, ClusterMethod,
    ClusterStudyRow, DatasetParams, KNN_NEIGHBORS, KNN_SIGMA,
};
use gftk::filter::{
    ideal_lowpass_response, q_mse, q_mse_monte_carlo, FilterSpec, NoiseModel,
};
use gftk::gft::{gft_basis, GftBasis};
use gftk::graph::{knn_graph, ring_graph};
use gftk::greedy::{gft_basis_greedy, GreedyOptions};
use gftk::operators::{InnerProduct, VariationOperator};
use gftk::sensor::{run_energy_experiment, EnergyKind, PointDistribution, SensorConfig};
use gftk::voronoi::{voronoi_areas, Rect};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use std::sync::OnceLock;
use std::time::Instant;

fn pass(n: usize, detail: &str) {
    if detail.is_empty() {
        println!("criterion {n}: PASS");
    } else {
        println!("criterion {n}: PASS ({detail})");
    }
}

fn check(n: usize, ok: bool, detail: String) {
    if !ok {
        println!("criterion {n}: FAIL ({detail})");
        panic!("criterion {n}: FAIL ({detail})");
    }
}

#[test]
fn criterion_01_ring8_eigenvalue_oracle() {
    let t0 = Instant::now();
    let g = ring_graph(8).unwrap();
    let op = VariationOperator::laplacian(&g).unwrap();
    let b = gft_basis(&op, &InnerProduct::identity(8)).unwrap();
    let elapsed = t0.elapsed().as_secs_f64();

    let mut expect: Vec<f64> = (0..8)
        .map(|k| 2.0 - 2.0 * (2.0 * std::f64::consts::PI * k as f64 / 8.0).cos())
        .collect();
    expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let err = (0..8)
        .map(|l| (b.freqs()[l] - expect[l]).abs())
        .fold(0.0, f64::max);
    check(1, err <= 1e-10, format!("max eigenvalue error {err:.2e}"));
    check(1, elapsed < 1.0, format!("runtime {elapsed:.3}s"));
    pass(1, &format!("max err {err:.1e}, {elapsed:.3}s"));
}

#[test]
fn criterion_02_two_vertex_generalized_eigenpair() {
    let m = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
    let q = InnerProduct::custom_diagonal(DVector::from_vec(vec![2.0, 1.0])).unwrap();
    let op = VariationOperator::hpsd("laplacian", m).unwrap();
    let b = gft_basis(&op, &q).unwrap();

    let lam_err = (b.freqs()[0] - 0.0).abs().max((b.freqs()[1] - 1.5).abs());
    check(2, lam_err <= 1e-12, format!("eigenvalue error {lam_err:.2e}"));

    let want0 = DVector::from_vec(vec![1.0, 1.0]) / 3.0f64.sqrt();
    let want1 = DVector::from_vec(vec![1.0, -2.0]) / 6.0f64.sqrt();
    for (l, want) in [(0usize, want0), (1usize, want1)] {
        let got = b.modes().column(l).into_owned();
        let d = (&got - &want).abs().max().min((&got + &want).abs().max());
        check(2, d <= 1e-12, format!("mode {l} error {d:.2e}"));
    }
    pass(2, "");
}

#[test]
fn criterion_03_parseval_over_random_instances() {
    let mut r = test_rng(0xACC3);
    let mut worst_ip = 0.0f64;
    let mut worst_inv = 0.0f64;
    for i in 0..200 {
        let n = r.gen_range(4..36);
        let g = random_connected_graph(&mut r, n, 2 * n);
        let q = match i % 4 {
            0 => InnerProduct::identity(n),
            1 => InnerProduct::degree(&g).unwrap(),
            2 => random_diagonal_q(&mut r, n),
            _ => random_general_q(&mut r, n),
        };
        let op = VariationOperator::laplacian(&g).unwrap();
        let b = gft_basis(&op, &q).unwrap();

        let x = random_signal(&mut r, n);
        let y = random_signal(&mut r, n);
        let lhs = q.inner(&x, &y);
        let rhs = b.forward(&x).unwrap().dot(&b.forward(&y).unwrap());
        let tol = 1e-9 * (1.0 + lhs.abs());
        check(
            3,
            (lhs - rhs).abs() <= tol,
            format!("instance {i}: inner-product gap {:.2e}", (lhs - rhs).abs()),
        );
        worst_ip = worst_ip.max((lhs - rhs).abs() / tol);

        let prod = b.analysis() * b.modes();
        let inv_err = (&prod - DMatrix::identity(n, n)).abs().max();
        check(3, inv_err <= 1e-10, format!("instance {i}: F·F⁻¹ error {inv_err:.2e}"));
        worst_inv = worst_inv.max(inv_err);
    }
    pass(3, &format!("worst F·F⁻¹ error {worst_inv:.1e}"));
}

/// Eigenvalue groups of a sorted spectrum, split at relative gaps.
fn degenerate_groups(freqs: &DVector<f64>, tol: f64) -> Vec<(usize, usize)> {
    let n = freqs.len();
    let mut groups = Vec::new();
    let mut start = 0;
    for l in 1..=n {
        if l == n || (freqs[l] - freqs[l - 1]).abs() > tol {
            groups.push((start, l));
            start = l;
        }
    }
    groups
}

#[test]
fn criterion_04_degree_gft_is_conjugated_normalized_gft() {
    let mut r = test_rng(0xACC4);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = r.gen_range(8..=60);
        let g = random_connected_graph(&mut r, n, 2 * n);
        let d = g.degrees();

        let b_ld = gft_basis(
            &VariationOperator::laplacian(&g).unwrap(),
            &InnerProduct::degree(&g).unwrap(),
        )
        .unwrap();
        let b_ni = gft_basis(
            &VariationOperator::normalized_laplacian(&g).unwrap(),
            &InnerProduct::identity(n),
        )
        .unwrap();

        // D^{1/2}·(L,D) modes are I-orthonormal and span the same
        // eigenspaces as the (normalized L, I) modes
        let mut v1 = b_ld.modes().clone();
        for i in 0..n {
            let s = d[i].sqrt();
            for l in 0..n {
                v1[(i, l)] *= s;
            }
        }
        let v2 = b_ni.modes();

        let lam_max = b_ni.freqs()[n - 1].max(1.0);
        for (a, bnd) in degenerate_groups(b_ni.freqs(), 1e-5 * lam_max) {
            let g1 = v1.columns(a, bnd - a);
            let g2 = v2.columns(a, bnd - a);
            let dist = (g1 * g1.transpose() - g2 * g2.transpose()).norm();
            check(4, dist <= 1e-8, format!("n={n}: projector distance {dist:.2e}"));
            worst = worst.max(dist);
        }
    }
    pass(4, &format!("worst projector distance {worst:.1e}"));
}

/// 20-seed six-configuration study, shared between criteria 5 and 6.
static CLUSTER_STUDY: OnceLock<(Vec<ClusterStudyRow>, f64)> = OnceLock::new();

fn cluster_study() -> &'static (Vec<ClusterStudyRow>, f64) {
    CLUSTER_STUDY.get_or_init(|| {
        let seeds: Vec<u64> = (0..20).collect();
        let t0 = Instant::now();
        let rows = run_clustering_study(&DatasetParams::default(), 2, &seeds)
            .expect("clustering study");
        (rows, t0.elapsed().as_secs_f64())
    })
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[test]
fn criterion_05_degree_q_wins_the_clustering_table() {
    let (rows, elapsed) = cluster_study();
    let med = |m: ClusterMethod, f: fn(&ClusterStudyRow) -> f64| {
        median(rows.iter().filter(|r| r.method == m).map(f).collect())
    };
    let mut table = String::new();
    for m in ClusterMethod::ALL {
        let acc = med(m, |r| r.accuracy);
        let f1 = med(m, |r| r.f1_sparse);
        table.push_str(&format!("{}: acc {:.4} f1 {:.4}; ", m.label(), acc, f1));
    }
    println!("medians over 20 seeds: {table}");

    let ld_acc = med(ClusterMethod::CombinatorialDegree, |r| r.accuracy);
    let ld_f1 = med(ClusterMethod::CombinatorialDegree, |r| r.f1_sparse);
    for m in ClusterMethod::ALL {
        if m == ClusterMethod::CombinatorialDegree {
            continue;
        }
        let acc = med(m, |r| r.accuracy);
        let f1 = med(m, |r| r.f1_sparse);
        check(
            5,
            ld_acc >= acc,
            format!("median accuracy: L-D {ld_acc:.4} < {} {acc:.4}", m.label()),
        );
        check(
            5,
            ld_f1 >= f1,
            format!("median sparse-F1: L-D {ld_f1:.4} < {} {f1:.4}", m.label()),
        );
    }
    check(5, ld_acc >= 0.90, format!("L-D median accuracy {ld_acc:.4} < 0.90"));
    check(5, *elapsed < 120.0, format!("study took {elapsed:.1}s"));
    pass(
        5,
        &format!("L-D medians: accuracy {ld_acc:.4}, sparse-F1 {ld_f1:.4}, study {elapsed:.1}s"),
    );
}

#[test]
fn criterion_06_total_variation_clusters_cut_more() {
    let (rows, _) = cluster_study();
    let mut wins = 0;
    for seed in 0..20u64 {
        let get = |m: ClusterMethod| {
            rows.iter()
                .find(|r| r.seed == seed && r.method == m)
                .expect("row per (seed, method)")
                .ncut_gtv_identity
        };
        if get(ClusterMethod::TotalVariationIdentity) > get(ClusterMethod::CombinatorialIdentity) {
            wins += 1;
        }
    }
    check(6, wins >= 15, format!("GTV ncut exceeded (L,I) on {wins}/20 seeds"));
    pass(6, &format!("{wins}/20 seeds"));
}

#[test]
fn criterion_07_voronoi_energies_are_most_stable() {
    let t0 = Instant::now();
    // per-realization seeds are seed + index, so far-apart roots keep the
    // two runs on disjoint realization streams
    for (dist, seed) in [
        (PointDistribution::Uniform, 0u64),
        (PointDistribution::NonUniformMixture, 555_000u64),
    ] {
        let cfg = SensorConfig {
            distribution: dist,
            n_vertices: 300,
            n_realizations: 50,
            seed,
            ..SensorConfig::default()
        };
        let stats = run_energy_experiment(&cfg).unwrap();
        let get = |nu: f64, kind: EnergyKind| {
            stats
                .summary
                .iter()
                .find(|s| s.nu == nu && s.kind == kind)
                .expect("summary row")
        };
        for s in &stats.summary {
            if s.nu > 2.0 + 1e-12 || s.kind != EnergyKind::VoronoiCell {
                continue;
            }
            let ci = get(s.nu, EnergyKind::Identity);
            let cd = get(s.nu, EnergyKind::Degree);
            check(
                7,
                s.cv < ci.cv.min(cd.cv),
                format!(
                    "{} ν={}: CV^C {:.4} !< min(CV^I {:.4}, CV^D {:.4})",
                    dist.label(),
                    s.nu,
                    s.cv,
                    ci.cv,
                    cd.cv
                ),
            );
            if dist == PointDistribution::NonUniformMixture {
                check(
                    7,
                    s.m <= ci.m,
                    format!("nonuniform ν={}: m^C {:.4} > m^I {:.4}", s.nu, s.m, ci.m),
                );
            }
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    check(7, elapsed < 300.0, format!("runtime {elapsed:.1}s"));
    pass(7, &format!("{elapsed:.1}s"));
}

#[test]
fn criterion_08_voronoi_areas_exact_and_normalized() {
    // symmetric configurations with known areas
    let one = voronoi_areas(&[[0.5, 0.5]], Rect::UNIT).unwrap();
    check(8, (one[0] - 1.0).abs() <= 1e-12, format!("1-point area {}", one[0]));

    let two = voronoi_areas(&[[0.25, 0.5], [0.75, 0.5]], Rect::UNIT).unwrap();
    for a in &two {
        check(8, (a - 0.5).abs() <= 1e-12, format!("2-point area {a}"));
    }

    let four = voronoi_areas(
        &[[0.25, 0.25], [0.75, 0.25], [0.25, 0.75], [0.75, 0.75]],
        Rect::UNIT,
    )
    .unwrap();
    for a in &four {
        check(8, (a - 0.25).abs() <= 1e-12, format!("4-point area {a}"));
    }

    let mut r = test_rng(0xACC8);
    for trial in 0..5 {
        let pts: Vec<[f64; 2]> = (0..500)
            .map(|_| [r.gen_range(0.0..1.0), r.gen_range(0.0..1.0)])
            .collect();
        let areas = voronoi_areas(&pts, Rect::UNIT).unwrap();
        let total: f64 = areas.iter().sum();
        check(
            8,
            (total - 1.0).abs() <= 1e-9,
            format!("500-point set {trial}: Σ areas = {total}"),
        );
    }
    pass(8, "");
}

#[test]
fn criterion_09_q_white_noise_has_flat_spectrum() {
    let n = 40;
    let sigma = 1.3f64;
    let draws = 100_000usize;
    let mut r = test_rng(0xACC9);
    let g = random_connected_graph(&mut r, n, 3 * n);
    let q = random_general_q(&mut r, n);
    let b = gft_basis(&VariationOperator::laplacian(&g).unwrap(), &q).unwrap();
    let noise = NoiseModel::new(q, sigma, 0x5EED).unwrap();

    let mut sumsq = DVector::<f64>::zeros(n);
    for t in 0..draws {
        let xhat = b.forward(&noise.sample(t as u64)).unwrap();
        for l in 0..n {
            sumsq[l] += xhat[l] * xhat[l];
        }
    }
    // known-mean variance estimator; SE(σ̂²) = σ²·√(2/N)
    let se = sigma * sigma * (2.0 / draws as f64).sqrt();
    let passing = (0..n)
        .filter(|&l| (sumsq[l] / draws as f64 - sigma * sigma).abs() <= 3.0 * se)
        .count();
    check(
        9,
        passing * 100 >= 95 * n,
        format!("{passing}/{n} modes within 3 SE of σ²"),
    );
    pass(9, &format!("{passing}/{n} modes within 3 SE"));
}

#[test]
fn criterion_10_analytic_q_mse_matches_monte_carlo() {
    let n = 50;
    let mut r = test_rng(0xACC10);
    let g = random_connected_graph(&mut r, n, 2 * n);
    let q = InnerProduct::degree(&g).unwrap();
    let b = gft_basis(&VariationOperator::laplacian(&g).unwrap(), &q).unwrap();
    let x = random_signal(&mut r, n);
    let noise = NoiseModel::new(q.clone(), 0.4, 0xACC10).unwrap();

    for cutoff in [5usize, 20, 35] {
        let spec = FilterSpec::Spectral(ideal_lowpass_response(n, cutoff).unwrap());
        let analytic = q_mse(&b, &spec, &x, Some(&noise)).unwrap().total;
        let mc = q_mse_monte_carlo(&b, &spec, &x, &noise, 10_000).unwrap();
        let rel = (analytic - mc.mean).abs() / analytic;
        check(
            10,
            rel <= 0.05,
            format!("cutoff {cutoff}: analytic {analytic:.5} vs MC {:.5} (rel {rel:.3})", mc.mean),
        );
    }

    // noiseless all-pass: the spectral bias path gives 0 with no rounding
    let allpass = FilterSpec::Spectral(DVector::from_element(n, 1.0));
    let mse = q_mse(&b, &allpass, &x, None).unwrap().total;
    check(10, mse == 0.0, format!("noiseless all-pass MSE = {mse:e}"));
    pass(10, "");
}

#[test]
fn criterion_11_bilateral_matrix_equals_pixel_formula() {
    let mut r = test_rng(0xACC11);
    for (w, h) in [(2usize, 2usize), (16, 16)] {
        let data: Vec<f64> = (0..w * h).map(|_| r.gen_range(0.0..=255.0)).collect();
        let img = Image::new(w, h, 255, data.clone()).unwrap();
        let (radius, sd, si) = (2usize, 1.5f64, 40.0f64);
        let out = bilateral_filter(&img, radius, sd, si, 1).unwrap();

        // direct per-pixel evaluation of the normalized kernel average
        let mut worst = 0.0f64;
        for y in 0..h {
            for x in 0..w {
                let c = data[y * w + x];
                let (mut num, mut den) = (c, 1.0);
                let (yl, yh) = (y.saturating_sub(radius), (y + radius).min(h - 1));
                let (xl, xh) = (x.saturating_sub(radius), (x + radius).min(w - 1));
                for v in yl..=yh {
                    for u in xl..=xh {
                        if (u, v) == (x, y) {
                            continue;
                        }
                        let dd = ((x as f64 - u as f64).powi(2)
                            + (y as f64 - v as f64).powi(2))
                            / (2.0 * sd * sd);
                        let di = (c - data[v * w + u]).powi(2) / (2.0 * si * si);
                        let wgt = (-dd - di).exp();
                        num += wgt * data[v * w + u];
                        den += wgt;
                    }
                }
                worst = worst.max((out.get(x, y) - num / den).abs());
            }
        }
        check(11, worst <= 1e-12, format!("{w}x{h}: max pixel gap {worst:.2e}"));
    }

    let flat = Image::new(16, 16, 255, vec![77.0; 256]).unwrap();
    let out = bilateral_filter(&flat, 2, 1.5, 40.0, 3).unwrap();
    let drift = out.data().iter().map(|v| (v - 77.0).abs()).fold(0.0, f64::max);
    check(11, drift <= 1e-12, format!("constant image drift {drift:.2e}"));
    pass(11, "");
}

#[test]
fn criterion_12_greedy_reaches_the_trace_bound() {
    let mut r = test_rng(0xACC12);
    for run in 0..3 {
        let n = 12 + 2 * run;
        let g = random_connected_graph(&mut r, n, 2 * n);
        let q = random_diagonal_q(&mut r, n);
        let op = VariationOperator::laplacian(&g).unwrap();
        let opts = GreedyOptions {
            seed: run as u64,
            ..GreedyOptions::default()
        };
        let b = gft_basis_greedy(&op, &q, &opts).unwrap();

        // Σ_l Δ(u_l) over a full Q-orthonormal set equals tr(Q^{-1}M)
        let total: f64 = b.freqs().iter().sum();
        let m = op.matrix().unwrap();
        let qinv_m = match q.diagonal() {
            Some(d) => DMatrix::from_fn(n, n, |i, j| m[(i, j)] / d[i]),
            None => unreachable!("diagonal by construction"),
        };
        let rel = (total - qinv_m.trace()).abs() / qinv_m.trace();
        check(12, rel <= 0.01, format!("run {run}: trace gap {:.3}%", rel * 100.0));

        let res = b.diagnostics().orthonormality_residual;
        check(12, res <= 1e-8, format!("run {run}: orthonormality residual {res:.2e}"));
    }
    pass(12, "");
}

#[test]
fn criterion_13_lowpass_error_curves() {
    let (points, truth) = make_dataset(&DatasetParams::default(), 0).unwrap();
    let g = knn_graph(&points, KNN_NEIGHBORS, KNN_SIGMA).unwrap();
    let methods = [
        ClusterMethod::CombinatorialIdentity,
        ClusterMethod::NormalizedIdentity,
        ClusterMethod::CombinatorialDegree,
        ClusterMethod::CombinatorialVoronoi,
    ];
    for m in methods {
        let (op, q) = method_operator(m, &g, &points).unwrap();
        let b: GftBasis = gft_basis(&op, &q).unwrap();
        let curve = lowpass_indicator_study(&b, &truth).unwrap();

        for w in curve.windows(2) {
            check(
                13,
                w[1].qmse <= w[0].qmse + 1e-12,
                format!("{}: Q-MSE rises at l={}", m.label(), w[1].l),
            );
        }
        if m == ClusterMethod::CombinatorialVoronoi {
            let rises = curve
                .windows(2)
                .any(|w| w[1].imse > w[0].imse + 1e-12);
            check(13, rises, "L-C: I-MSE never increases".to_string());
        }
    }
    pass(13, "");
}
