//! Spectral clustering under interchangeable (Δ, Q) pairs, scored on a
//! skewed two-Gaussian dataset.
//!
//! The dataset is a sparse cluster next to a dense one with overlapping
//! support, embedded via the first C modes of a basis, partitioned by
//! C-means, and scored by accuracy, sparse-class F1, and the normalized
//! cut Σ_c Δ(1_c/‖1_c‖_Q). Six configurations are compared:
//!
//! | label            | variation | inner product | features  |
//! |------------------|-----------|---------------|-----------|
//! | L-I              | L         | I             | raw       |
//! | normL-I          | 𝓛         | I             | raw       |
//! | normL-I-featnorm | 𝓛         | I             | row-normalized |
//! | L-D              | L         | D             | raw       |
//! | L-C              | L         | Voronoi areas | raw       |
//! | GTV-I            | GTV       | I             | raw (greedy modes) |

use crate::error::{Error, Result};
use crate::gft::{gft_basis_hpsd, GftBasis};
use crate::graph::{knn_graph, Graph};
use crate::greedy::{gft_basis_greedy, GreedyOptions};
use crate::operators::{InnerProduct, VariationOperator};
use crate::seed::{derive_seed, rng};
use crate::voronoi::Rect;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Neighbor count of the similarity graph.
pub const KNN_NEIGHBORS: usize = 10;
/// Gaussian kernel width of the similarity graph.
pub const KNN_SIGMA: f64 = 0.4;

/// Two isotropic Gaussian clouds; the sparse one comes first in label order.
#[derive(Debug, Clone)]
pub struct DatasetParams {
    pub n_sparse: usize,
    pub n_dense: usize,
    pub mean_sparse: [f64; 2],
    pub mean_dense: [f64; 2],
    pub std_sparse: f64,
    pub std_dense: f64,
}

impl Default for DatasetParams {
    fn default() -> Self {
        DatasetParams {
            n_sparse: 30,
            n_dense: 300,
            mean_sparse: [-1.5, 0.0],
            mean_dense: [1.5, 0.0],
            std_sparse: 0.9,
            std_dense: 0.7,
        }
    }
}

/// Draws the dataset; labels are 0 for sparse points, 1 for dense ones.
/// Exact coordinate duplicates are redrawn so downstream Voronoi and k-NN
/// constructions never see coincident points.
pub fn make_dataset(p: &DatasetParams, seed: u64) -> Result<(Vec<[f64; 2]>, Vec<usize>)> {
    if p.n_sparse == 0 || p.n_dense == 0 {
        return Err(Error::InvalidParameter("both clusters need points".into()));
    }
    if !(p.std_sparse > 0.0 && p.std_sparse.is_finite())
        || !(p.std_dense > 0.0 && p.std_dense.is_finite())
    {
        return Err(Error::InvalidParameter("cluster spreads must be positive".into()));
    }
    let mut r = rng(derive_seed(seed, "cluster/dataset"));
    let mut points: Vec<[f64; 2]> = Vec::with_capacity(p.n_sparse + p.n_dense);
    let mut labels = Vec::with_capacity(p.n_sparse + p.n_dense);
    let groups = [
        (p.n_sparse, p.mean_sparse, p.std_sparse, 0usize),
        (p.n_dense, p.mean_dense, p.std_dense, 1usize),
    ];
    for (count, mean, std, label) in groups {
        for _ in 0..count {
            loop {
                let pt = [
                    mean[0] + std * r.sample::<f64, _>(StandardNormal),
                    mean[1] + std * r.sample::<f64, _>(StandardNormal),
                ];
                if !points.contains(&pt) {
                    points.push(pt);
                    labels.push(label);
                    break;
                }
            }
        }
    }
    Ok((points, labels))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClusterMethod {
    CombinatorialIdentity,
    NormalizedIdentity,
    NormalizedIdentityFeatNorm,
    CombinatorialDegree,
    CombinatorialVoronoi,
    TotalVariationIdentity,
}

impl ClusterMethod {
    pub const ALL: [ClusterMethod; 6] = [
        ClusterMethod::CombinatorialIdentity,
        ClusterMethod::NormalizedIdentity,
        ClusterMethod::NormalizedIdentityFeatNorm,
        ClusterMethod::CombinatorialDegree,
        ClusterMethod::CombinatorialVoronoi,
        ClusterMethod::TotalVariationIdentity,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ClusterMethod::CombinatorialIdentity => "L-I",
            ClusterMethod::NormalizedIdentity => "normL-I",
            ClusterMethod::NormalizedIdentityFeatNorm => "normL-I-featnorm",
            ClusterMethod::CombinatorialDegree => "L-D",
            ClusterMethod::CombinatorialVoronoi => "L-C",
            ClusterMethod::TotalVariationIdentity => "GTV-I",
        }
    }

    /// Accepts the report labels and `Δ,Q` flag forms like `L,D` or `gtv,I`.
    pub fn parse(s: &str) -> Result<ClusterMethod> {
        let canon = s.trim().to_ascii_lowercase().replace([',', '+'], "-");
        let m = match canon.as_str() {
            "l-i" => ClusterMethod::CombinatorialIdentity,
            "norml-i" => ClusterMethod::NormalizedIdentity,
            "norml-i-featnorm" => ClusterMethod::NormalizedIdentityFeatNorm,
            "l-d" => ClusterMethod::CombinatorialDegree,
            "l-c" => ClusterMethod::CombinatorialVoronoi,
            "gtv-i" => ClusterMethod::TotalVariationIdentity,
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "unknown clustering configuration {s:?}"
                )))
            }
        };
        Ok(m)
    }

    pub fn feature_normalize(self) -> bool {
        matches!(self, ClusterMethod::NormalizedIdentityFeatNorm)
    }
}

/// Bounding box of the points padded on every side by the mean
/// nearest-neighbor spacing, so each point is strictly interior and the
/// boundary cells stay comparable to interior ones.
pub fn padded_bbox(points: &[[f64; 2]]) -> Result<Rect> {
    if points.len() < 2 {
        return Err(Error::InvalidParameter("need at least two points".into()));
    }
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    let mut nn_sum = 0.0;
    for (i, p) in points.iter().enumerate() {
        x0 = x0.min(p[0]);
        y0 = y0.min(p[1]);
        x1 = x1.max(p[0]);
        y1 = y1.max(p[1]);
        let mut best = f64::MAX;
        for (j, q) in points.iter().enumerate() {
            if i != j {
                best = best.min((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2));
            }
        }
        nn_sum += best.sqrt();
    }
    let pad = nn_sum / points.len() as f64;
    if pad <= 0.0 || pad.is_nan() {
        return Err(Error::InvalidParameter("degenerate point set".into()));
    }
    Rect::new(x0 - pad, y0 - pad, x1 + pad, y1 + pad)
}

/// The (Δ, Q) pair of a configuration on a given graph and point set.
pub fn method_operator(
    m: ClusterMethod,
    g: &Graph,
    points: &[[f64; 2]],
) -> Result<(VariationOperator, InnerProduct)> {
    let pair = match m {
        ClusterMethod::CombinatorialIdentity => (
            VariationOperator::laplacian(g)?,
            InnerProduct::identity(g.n()),
        ),
        ClusterMethod::NormalizedIdentity | ClusterMethod::NormalizedIdentityFeatNorm => (
            VariationOperator::normalized_laplacian(g)?,
            InnerProduct::identity(g.n()),
        ),
        ClusterMethod::CombinatorialDegree => {
            (VariationOperator::laplacian(g)?, InnerProduct::degree(g)?)
        }
        ClusterMethod::CombinatorialVoronoi => (
            VariationOperator::laplacian(g)?,
            InnerProduct::voronoi(points, padded_bbox(points)?)?,
        ),
        ClusterMethod::TotalVariationIdentity => {
            (VariationOperator::gtv(g)?, InnerProduct::identity(g.n()))
        }
    };
    Ok(pair)
}

/// Solves for the modes a configuration needs: a full quadratic basis, or
/// the first `c` greedy modes for the total-variation configuration.
pub fn method_basis(
    m: ClusterMethod,
    g: &Graph,
    points: &[[f64; 2]],
    c: usize,
    seed: u64,
) -> Result<GftBasis> {
    let (op, q) = method_operator(m, g, points)?;
    solve_basis(&op, &q, c, seed)
}

fn solve_basis(op: &VariationOperator, q: &InnerProduct, c: usize, seed: u64) -> Result<GftBasis> {
    if op.is_hpsd() {
        gft_basis_hpsd(op, q)
    } else {
        let opts = GreedyOptions {
            num_modes: Some(c),
            seed: derive_seed(seed, "cluster/greedy"),
            ..GreedyOptions::default()
        };
        gft_basis_greedy(op, q, &opts)
    }
}

/// The n×C feature matrix whose columns are the first C modes.
pub fn spectral_embed(basis: &GftBasis, c: usize) -> Result<DMatrix<f64>> {
    if c == 0 || c > basis.num_modes() {
        return Err(Error::InvalidParameter(format!(
            "{c} features from {} modes",
            basis.num_modes()
        )));
    }
    Ok(basis.modes().columns(0, c).into_owned())
}

/// Scales every feature row to unit Euclidean norm.
pub fn normalize_features(feats: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let mut out = feats.clone();
    for r in 0..out.nrows() {
        let norm = out.row(r).norm();
        if norm == 0.0 {
            return Err(Error::Experiment(format!("feature row {r} is zero")));
        }
        for c in 0..out.ncols() {
            out[(r, c)] /= norm;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub labels: Vec<usize>,
    pub c: usize,
}

fn row_dist2(feats: &DMatrix<f64>, i: usize, center: &DVector<f64>) -> f64 {
    let mut acc = 0.0;
    for c in 0..feats.ncols() {
        let d = feats[(i, c)] - center[c];
        acc += d * d;
    }
    acc
}

fn lloyd(feats: &DMatrix<f64>, c: usize, r: &mut ChaCha8Rng) -> (Vec<usize>, f64) {
    let n = feats.nrows();
    let dim = feats.ncols();
    // k-means++ seeding
    let mut centers: Vec<DVector<f64>> = Vec::with_capacity(c);
    centers.push(feats.row(r.gen_range(0..n)).transpose());
    let mut d2: Vec<f64> = (0..n).map(|i| row_dist2(feats, i, &centers[0])).collect();
    while centers.len() < c {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let t = r.gen::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = n - 1;
            for (i, &v) in d2.iter().enumerate() {
                acc += v;
                if acc >= t {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            // all points coincide with a center
            r.gen_range(0..n)
        };
        centers.push(feats.row(pick).transpose());
        let newest = centers.last().unwrap();
        for (i, v) in d2.iter_mut().enumerate() {
            *v = v.min(row_dist2(feats, i, newest));
        }
    }

    let mut assign = vec![0usize; n];
    for _ in 0..200 {
        // assignment step; ties go to the lowest cluster index
        let mut next = vec![0usize; n];
        for (i, slot) in next.iter_mut().enumerate() {
            let mut best = (f64::MAX, 0usize);
            for (k, ctr) in centers.iter().enumerate() {
                let d = row_dist2(feats, i, ctr);
                if d < best.0 {
                    best = (d, k);
                }
            }
            *slot = best.1;
        }
        // re-seed empty clusters from the point farthest from its center
        let mut counts = vec![0usize; c];
        for &a in &next {
            counts[a] += 1;
        }
        let mut reseeded = false;
        for k in 0..c {
            if counts[k] == 0 {
                let far = (0..n)
                    .max_by(|&a, &b| {
                        let da = row_dist2(feats, a, &centers[next[a]]);
                        let db = row_dist2(feats, b, &centers[next[b]]);
                        da.partial_cmp(&db).expect("finite features")
                    })
                    .expect("nonempty dataset");
                counts[next[far]] -= 1;
                next[far] = k;
                counts[k] = 1;
                reseeded = true;
            }
        }
        // update step; a cluster emptied by re-seeding keeps its center
        for (k, ctr) in centers.iter_mut().enumerate() {
            if counts[k] == 0 {
                continue;
            }
            let mut mean = DVector::zeros(dim);
            for i in 0..n {
                if next[i] == k {
                    for d in 0..dim {
                        mean[d] += feats[(i, d)];
                    }
                }
            }
            *ctr = mean / counts[k] as f64;
        }
        let converged = !reseeded && next == assign;
        assign = next;
        if converged {
            break;
        }
    }
    let wcss = (0..n).map(|i| row_dist2(feats, i, &centers[assign[i]])).sum();
    (assign, wcss)
}

/// C-means: Lloyd iterations from k-means++ starts, best of `restarts`
/// runs by within-cluster sum of squares (ties keep the earliest restart).
/// An empty cluster is re-seeded from the farthest point rather than
/// reported as an error.
pub fn c_means(feats: &DMatrix<f64>, c: usize, seed: u64, restarts: usize) -> Result<Partition> {
    let n = feats.nrows();
    if c == 0 || c > n {
        return Err(Error::InvalidParameter(format!("{c} clusters for {n} points")));
    }
    if restarts == 0 {
        return Err(Error::InvalidParameter("needs at least one restart".into()));
    }
    if feats.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite feature".into()));
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for t in 0..restarts {
        let mut r = rng(derive_seed(seed, &format!("cmeans/restart{t}")));
        let (assign, wcss) = lloyd(feats, c, &mut r);
        if best.as_ref().is_none_or(|(b, _)| wcss < *b) {
            best = Some((wcss, assign));
        }
    }
    Ok(Partition {
        labels: best.expect("at least one restart").1,
        c,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct Score {
    pub accuracy: f64,
    pub f1_sparse: f64,
}

/// Two-class scoring: cluster ids are matched to truth by the permutation
/// maximizing accuracy, then F1 is computed for class 0 (the sparse one).
pub fn score(partition: &Partition, truth: &[usize]) -> Result<Score> {
    if partition.labels.len() != truth.len() {
        return Err(Error::Experiment(format!(
            "{} labels for {} points",
            partition.labels.len(),
            truth.len()
        )));
    }
    if partition.c != 2 {
        return Err(Error::Experiment("scoring is two-class".into()));
    }
    if truth.iter().any(|&t| t > 1) || partition.labels.iter().any(|&l| l > 1) {
        return Err(Error::Experiment("labels must be 0 or 1".into()));
    }
    let n = truth.len();
    let evaluate = |perm: [usize; 2]| {
        // conf[t][p]: count of truth t predicted (after mapping) as p
        let mut conf = [[0usize; 2]; 2];
        for (&raw, &t) in partition.labels.iter().zip(truth) {
            conf[t][perm[raw]] += 1;
        }
        let correct = conf[0][0] + conf[1][1];
        (correct, conf)
    };
    let (c_id, conf_id) = evaluate([0, 1]);
    let (c_sw, conf_sw) = evaluate([1, 0]);
    let (correct, conf) = if c_sw > c_id {
        (c_sw, conf_sw)
    } else {
        (c_id, conf_id)
    };
    let tp = conf[0][0] as f64;
    let fp = conf[1][0] as f64;
    let fn_ = conf[0][1] as f64;
    let f1 = if tp == 0.0 {
        0.0
    } else {
        2.0 * tp / (2.0 * tp + fp + fn_)
    };
    Ok(Score {
        accuracy: correct as f64 / n as f64,
        f1_sparse: f1,
    })
}

/// Normalized cut Σ_c Δ(1_c/‖1_c‖_Q) of a partition.
///
/// Every term is computed from that definition; for a singleton cluster
/// {i} under (L, I) the own term is d_i while the complement contributes
/// d_i/(n−1), so the total is not 2d_i even though both clusters cut the
/// same edges.
pub fn ncut(partition: &Partition, op: &VariationOperator, q: &InnerProduct) -> Result<f64> {
    let n = partition.labels.len();
    if q.diagonal().is_none() {
        return Err(Error::InvalidParameter(
            "normalized cut needs a diagonal inner product".into(),
        ));
    }
    if op.dim() != n || q.dim() != n {
        return Err(Error::InvalidParameter("partition/operator size mismatch".into()));
    }
    let mut total = 0.0;
    for k in 0..partition.c {
        let ind = DVector::from_fn(n, |i, _| if partition.labels[i] == k { 1.0 } else { 0.0 });
        let norm = q.norm(&ind);
        if norm == 0.0 {
            return Err(Error::Experiment(format!("cluster {k} is empty")));
        }
        total += op.value(&(ind / norm));
    }
    Ok(total)
}

#[derive(Debug, Clone)]
pub struct ClusterStudyRow {
    pub method: ClusterMethod,
    pub seed: u64,
    pub accuracy: f64,
    pub f1_sparse: f64,
    /// ncut under the configuration's own (Δ, Q).
    pub ncut_own: f64,
    /// ncut under (GTV, I), comparable across configurations.
    pub ncut_gtv_identity: f64,
    /// Solver audit trail for non-quadratic paths, empty otherwise.
    pub diagnostics: String,
}

/// Runs the six configurations over the given seeds.
pub fn run_clustering_study(
    p: &DatasetParams,
    c: usize,
    seeds: &[u64],
) -> Result<Vec<ClusterStudyRow>> {
    let mut rows = Vec::new();
    for &seed in seeds {
        let (points, truth) = make_dataset(p, seed)?;
        let g = knn_graph(&points, KNN_NEIGHBORS, KNN_SIGMA)?;
        let gtv_op = VariationOperator::gtv(&g)?;
        let q_id = InnerProduct::identity(g.n());
        for &m in &ClusterMethod::ALL {
            let (op, q) = method_operator(m, &g, &points)?;
            let basis = solve_basis(&op, &q, c, seed)?;
            let mut feats = spectral_embed(&basis, c)?;
            if m.feature_normalize() {
                feats = normalize_features(&feats)?;
            }
            let part = c_means(
                &feats,
                c,
                derive_seed(seed, &format!("cluster/kmeans/{}", m.label())),
                20,
            )?;
            let sc = score(&part, &truth)?;
            let d = basis.diagnostics();
            let diagnostics = if op.is_hpsd() {
                String::new()
            } else {
                format!(
                    "solver={};converged={}/{};orth_residual={:.2e}",
                    d.solver,
                    d.converged.iter().filter(|&&b| b).count(),
                    d.converged.len(),
                    d.orthonormality_residual
                )
            };
            rows.push(ClusterStudyRow {
                method: m,
                seed,
                accuracy: sc.accuracy,
                f1_sparse: sc.f1_sparse,
                ncut_own: ncut(&part, &op, &q)?,
                ncut_gtv_identity: ncut(&part, &gtv_op, &q_id)?,
                diagnostics,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy)]
pub struct LowpassCurvePoint {
    pub l: usize,
    pub lambda: f64,
    /// ‖H_l h − h‖²_Q: tail sum Σ_{k>l} |ĥ(k)|², exactly nonincreasing.
    pub qmse: f64,
    /// ‖H_l h − h‖²_I, evaluated in the vertex domain.
    pub imse: f64,
}

/// Error curves of the ideal low-pass family on the dense-cluster
/// indicator, normalized by the basis's own Q-norm. The cutoff l keeps
/// modes 0..=l.
pub fn lowpass_indicator_study(basis: &GftBasis, truth: &[usize]) -> Result<Vec<LowpassCurvePoint>> {
    if !basis.is_full() {
        return Err(Error::InvalidParameter("needs a full basis".into()));
    }
    let n = basis.n();
    if truth.len() != n {
        return Err(Error::Experiment("truth/basis size mismatch".into()));
    }
    let ind = DVector::from_fn(n, |i, _| if truth[i] == 1 { 1.0 } else { 0.0 });
    let norm = basis.q().norm(&ind);
    if norm == 0.0 {
        return Err(Error::Experiment("dense cluster is empty".into()));
    }
    let h = ind / norm;
    let hhat = basis.forward(&h)?;
    let mut qmse = vec![0.0; n];
    for l in (0..n.saturating_sub(1)).rev() {
        qmse[l] = qmse[l + 1] + hhat[l + 1] * hhat[l + 1];
    }
    let mut y = DVector::zeros(n);
    let mut out = Vec::with_capacity(n);
    for l in 0..n {
        y += basis.mode(l) * hhat[l];
        let d = &y - &h;
        out.push(LowpassCurvePoint {
            l,
            lambda: basis.freqs()[l],
            qmse: qmse[l],
            imse: d.norm_squared(),
        });
    }
    Ok(out)
}
