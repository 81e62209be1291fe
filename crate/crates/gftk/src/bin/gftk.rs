//! Command-line front end: reproducible runs over graph files, signal
//! CSVs, basis directories, and PGM images. Every invocation writes
//! exactly one manifest recording the resolved configuration, input
//! digests, and output list.

use clap::{Args, Parser, Subcommand};
use gftk::bilateral::{bilateral_filter, read_pgm, write_pgm};
use gftk::cluster::{
    lowpass_indicator_study, method_basis, method_operator, run_clustering_study, ClusterMethod,
    DatasetParams,
};
use gftk::error::{Error, Result};
use gftk::filter::{apply_filter, ideal_lowpass_response, FilterSpec};
use gftk::gft::{gft_basis, Fundamental, GftBasis};
use gftk::graph::{knn_graph, read_graph, ring_graph, write_graph, Graph};
use gftk::greedy::{gft_basis_greedy, GreedyOptions};
use gftk::io::{
    export_basis, import_basis, read_config_file, read_points_csv, read_q_csv, read_signal_csv,
    write_cluster_report_csv, write_curve_csv, write_energy_rows_csv, write_energy_summary_csv,
    write_signal_csv, RunManifest,
};
use gftk::operators::{InnerProduct, VariationOperator};
use gftk::sensor::{run_energy_experiment, EnergyKind, PointDistribution, SensorConfig};
use nalgebra::DVector;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(name = "gftk", version, about = "Irregularity-aware graph Fourier toolkit")]
struct Cli {
    /// Root seed (fallback order: this flag, config file, GFTK_SEED, 0).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// key=value file supplying defaults for omitted flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a graph file: a ring or a k-NN graph over a points CSV.
    Graph(GraphArgs),
    /// Compute a basis for (variation, Q) and export it as a directory.
    Gft(GftArgs),
    /// Push a signal through an exported basis (analysis or synthesis).
    Transform(TransformArgs),
    /// Apply a spectral, polynomial, or ideal low-pass filter to a signal.
    Filter(FilterArgs),
    /// Bilateral-filter a PGM image.
    Bilateral(BilateralArgs),
    /// Spectral clustering study over (variation, Q) configurations.
    Cluster(ClusterArgs),
    /// Sensor-network energy statistics over random layouts.
    Sensor(SensorArgs),
    /// Ring-8 walkthrough: three vertex weightings and impulse spectra.
    RingDemo(RingDemoArgs),
}

#[derive(Args)]
struct GraphArgs {
    /// Ring with N vertices (coordinates on a circle).
    #[arg(long, conflicts_with = "knn")]
    ring: Option<usize>,
    /// Points CSV to connect by symmetrized k-nearest neighbors.
    #[arg(long)]
    knn: Option<PathBuf>,
    /// Neighbor count for --knn.
    #[arg(long)]
    k: Option<usize>,
    /// Gaussian kernel width for --knn.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, default_value = "graph.txt")]
    out: PathBuf,
}

#[derive(Args)]
struct GftArgs {
    #[arg(long)]
    graph: PathBuf,
    /// L | normL | gqv | gtv | gdv | gqdv
    #[arg(long)]
    variation: Option<String>,
    /// identity | degree | identity-plus-degree | voronoi | diag:CSV | general:CSV
    #[arg(long)]
    q: Option<String>,
    /// Compute only the first N modes (greedy path only).
    #[arg(long)]
    modes: Option<usize>,
    #[arg(long, default_value = "basis_out")]
    out: PathBuf,
}

#[derive(Args)]
struct TransformArgs {
    /// Basis directory produced by `gft`.
    #[arg(long)]
    basis: PathBuf,
    #[arg(long)]
    signal: PathBuf,
    /// Synthesize from coefficients instead of analyzing a signal.
    #[arg(long)]
    inverse: bool,
    #[arg(long, default_value = "transformed.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct FilterArgs {
    #[arg(long)]
    signal: PathBuf,
    /// Basis directory (spectral filtering).
    #[arg(long)]
    basis: Option<PathBuf>,
    /// Keep modes 0..=N of the basis.
    #[arg(long, conflicts_with_all = ["response", "poly"])]
    ideal_lowpass: Option<usize>,
    /// Single-column CSV with one response value per mode.
    #[arg(long, conflicts_with = "poly")]
    response: Option<PathBuf>,
    /// Polynomial coefficients c0,c1,... applied in the fundamental matrix.
    #[arg(long)]
    poly: Option<String>,
    /// Graph file for the polynomial path without a basis.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    variation: Option<String>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long, default_value = "filtered.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct BilateralArgs {
    #[arg(long)]
    image: PathBuf,
    #[arg(long)]
    sigma_d: Option<f64>,
    #[arg(long)]
    sigma_i: Option<f64>,
    /// Chebyshev window radius in pixels.
    #[arg(long)]
    radius: Option<usize>,
    #[arg(long)]
    passes: Option<usize>,
    #[arg(long, default_value = "bilateral_out.pgm")]
    out: PathBuf,
}

#[derive(Args)]
struct ClusterArgs {
    /// Run all six configurations.
    #[arg(long, conflicts_with = "gft")]
    all_configs: bool,
    /// One configuration, e.g. L,D or gtv,I or normL,I+featnorm.
    #[arg(long)]
    gft: Option<String>,
    /// Comma-separated dataset seeds (default: the root seed).
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    n_sparse: Option<usize>,
    #[arg(long)]
    n_dense: Option<usize>,
    #[arg(long, default_value = "cluster_report.csv")]
    out: PathBuf,
    /// Also write the ideal low-pass error curve of this run's first seed.
    #[arg(long)]
    curve_out: Option<PathBuf>,
}

#[derive(Args)]
struct SensorArgs {
    /// uniform | nonuniform
    #[arg(long)]
    dist: Option<String>,
    /// Vertices per realization.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    /// Comma-separated frequency grid.
    #[arg(long)]
    freqs: Option<String>,
    /// Comma-separated phases in [0, 2π).
    #[arg(long)]
    phases: Option<String>,
    /// Subset of I,D,C.
    #[arg(long)]
    kinds: Option<String>,
    /// Rescale weights to w/(d_i d_j) before measuring degrees.
    #[arg(long)]
    prenormalize: bool,
    #[arg(long, default_value = "sensor_long.csv")]
    out_long: PathBuf,
    #[arg(long, default_value = "sensor_summary.csv")]
    out_summary: PathBuf,
}

#[derive(Args)]
struct RingDemoArgs {
    #[arg(long, default_value = "ring_demo_out")]
    out: PathBuf,
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            // bad flag values are usage errors like clap's own; everything
            // else is a runtime failure
            if matches!(e, Error::InvalidParameter(_)) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

/// Resolved global context: config-file pairs and the root seed.
struct Ctx {
    cfg: BTreeMap<String, String>,
    seed: u64,
}

impl Ctx {
    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.cfg.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                Error::InvalidParameter(format!("config key {key}: cannot parse {raw:?}"))
            }),
        }
    }

    /// Explicit flag wins, then the config file, then the default.
    fn num_or<T: FromStr + Copy>(&self, flag: Option<T>, key: &str, default: T) -> Result<T> {
        Ok(flag.or(self.get(key)?).unwrap_or(default))
    }

    fn str_or(&self, flag: Option<String>, key: &str) -> Option<String> {
        flag.or_else(|| self.cfg.get(key).cloned())
    }

    fn flag_or(&self, flag: bool, key: &str) -> Result<bool> {
        if flag {
            return Ok(true);
        }
        Ok(self.get::<bool>(key)?.unwrap_or(false))
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg: BTreeMap<String, String> = match &cli.config {
        Some(path) => read_config_file(path)?.into_iter().collect(),
        None => BTreeMap::new(),
    };
    let seed = match cli.seed {
        Some(s) => s,
        None => match cfg.get("seed") {
            Some(raw) => raw
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("config seed: {raw:?}")))?,
            None => match std::env::var("GFTK_SEED") {
                Ok(raw) => raw
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("GFTK_SEED: {raw:?}")))?,
                Err(_) => 0,
            },
        },
    };
    let ctx = Ctx { cfg, seed };
    match cli.cmd {
        Cmd::Graph(a) => cmd_graph(&ctx, a),
        Cmd::Gft(a) => cmd_gft(&ctx, a),
        Cmd::Transform(a) => cmd_transform(&ctx, a),
        Cmd::Filter(a) => cmd_filter(&ctx, a),
        Cmd::Bilateral(a) => cmd_bilateral(&ctx, a),
        Cmd::Cluster(a) => cmd_cluster(&ctx, a),
        Cmd::Sensor(a) => cmd_sensor(&ctx, a),
        Cmd::RingDemo(a) => cmd_ring_demo(&ctx, a),
    }
}

/// Builds the variation operator named by a CLI token.
fn parse_variation(token: &str, g: &Graph) -> Result<VariationOperator> {
    match token.trim().to_ascii_lowercase().as_str() {
        "l" | "laplacian" => VariationOperator::laplacian(g),
        "norml" | "normalized-laplacian" => VariationOperator::normalized_laplacian(g),
        "gqv" => VariationOperator::gqv(g),
        "gtv" => VariationOperator::gtv(g),
        "gdv" => Ok(VariationOperator::gdv(g)),
        "gqdv" => Ok(VariationOperator::gqdv(g)),
        other => Err(Error::InvalidParameter(format!(
            "unknown variation {other:?} (expected L, normL, gqv, gtv, gdv, gqdv)"
        ))),
    }
}

/// Builds the inner product named by a CLI token. `voronoi` needs graph
/// coordinates; `diag:`/`general:` load a CSV.
fn parse_q(token: &str, g: &Graph, manifest: &mut RunManifest) -> Result<InnerProduct> {
    let t = token.trim();
    if let Some(path) = t.strip_prefix("diag:").or_else(|| t.strip_prefix("general:")) {
        let path = Path::new(path);
        manifest.add_input(path)?;
        let q = read_q_csv(path)?;
        if q.dim() != g.n() {
            return Err(Error::InvalidParameter(format!(
                "inner product has dimension {} but the graph has {} vertices",
                q.dim(),
                g.n()
            )));
        }
        if t.starts_with("general:") && q.diagonal().is_some() {
            log::warn!("general: file holds a single column; treating it as a diagonal");
        }
        return Ok(q);
    }
    match t.to_ascii_lowercase().as_str() {
        "identity" | "i" => Ok(InnerProduct::identity(g.n())),
        "degree" | "d" => InnerProduct::degree(g),
        "identity-plus-degree" | "i+d" => Ok(InnerProduct::identity_plus_degree(g)),
        "voronoi" | "c" => {
            let coords = g.coords().ok_or_else(|| {
                Error::InvalidParameter("voronoi inner product needs graph coordinates".into())
            })?;
            InnerProduct::voronoi(coords, gftk::cluster::padded_bbox(coords)?)
        }
        other => Err(Error::InvalidParameter(format!(
            "unknown inner product {other:?} (expected identity, degree, identity-plus-degree, voronoi, diag:CSV, general:CSV)"
        ))),
    }
}

fn parse_f64_list(raw: &str, what: &str) -> Result<Vec<f64>> {
    raw.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("{what}: bad entry {t:?}")))
        })
        .collect()
}

fn manifest_path_for(out: &Path, is_dir: bool) -> PathBuf {
    if is_dir {
        out.join("manifest.txt")
    } else {
        let mut name = out.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest");
        out.with_file_name(name)
    }
}

fn cmd_graph(ctx: &Ctx, a: GraphArgs) -> Result<()> {
    let mut manifest = RunManifest::new("graph", ctx.seed);
    let g = if let Some(n) = a.ring {
        manifest.set("ring", n.to_string());
        let coords: Vec<[f64; 2]> = (0..n)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                [0.5 + 0.4 * t.cos(), 0.5 + 0.4 * t.sin()]
            })
            .collect();
        ring_graph(n)?.with_coords(coords)?
    } else if let Some(points_path) = &a.knn {
        let k = ctx.num_or(a.k, "k", 10)?;
        let sigma = ctx.num_or(a.sigma, "sigma", 0.4)?;
        manifest.add_input(points_path)?;
        manifest.set("k", k.to_string());
        manifest.set("sigma", sigma.to_string());
        let points = read_points_csv(points_path)?;
        knn_graph(&points, k, sigma)?
    } else {
        return Err(Error::InvalidParameter(
            "choose a construction: --ring N or --knn points.csv".into(),
        ));
    };
    write_graph(&a.out, &g)?;
    manifest.add_output(&a.out);
    manifest.write(&manifest_path_for(&a.out, false))?;
    println!(
        "graph: {} vertices, {} edges -> {}",
        g.n(),
        g.edges().len(),
        a.out.display()
    );
    Ok(())
}

fn cmd_gft(ctx: &Ctx, a: GftArgs) -> Result<()> {
    let mut manifest = RunManifest::new("gft", ctx.seed);
    manifest.add_input(&a.graph)?;
    let g = read_graph(&a.graph)?;
    let variation = ctx
        .str_or(a.variation, "variation")
        .ok_or_else(|| Error::InvalidParameter("missing --variation".into()))?;
    let q_token = ctx
        .str_or(a.q, "q")
        .ok_or_else(|| Error::InvalidParameter("missing --q".into()))?;
    let op = parse_variation(&variation, &g)?;
    let q = parse_q(&q_token, &g, &mut manifest)?;
    let modes = a.modes.or(ctx.get("modes")?);
    manifest.set("variation", &variation);
    manifest.set("q", &q_token);
    if let Some(m) = modes {
        manifest.set("modes", m.to_string());
    }
    let basis = if op.is_hpsd() {
        if modes.is_some() {
            return Err(Error::InvalidParameter(
                "--modes applies to the greedy path; quadratic variations always yield a full basis"
                    .into(),
            ));
        }
        gft_basis(&op, &q)?
    } else {
        let opts = GreedyOptions {
            num_modes: modes,
            seed: ctx.seed,
            ..GreedyOptions::default()
        };
        gft_basis_greedy(&op, &q, &opts)?
    };
    export_basis(&a.out, &basis)?;
    for f in ["lambda.csv", "modes.csv", "q.csv", "meta.txt"] {
        manifest.add_output(&a.out.join(f));
    }
    manifest.write(&manifest_path_for(&a.out, true))?;
    let d = basis.diagnostics();
    println!(
        "basis: n={} modes={} solver={} orthonormality_residual={:.2e}",
        basis.n(),
        basis.num_modes(),
        d.solver,
        d.orthonormality_residual
    );
    Ok(())
}

fn cmd_transform(ctx: &Ctx, a: TransformArgs) -> Result<()> {
    let mut manifest = RunManifest::new("transform", ctx.seed);
    for f in ["lambda.csv", "modes.csv", "q.csv", "meta.txt"] {
        manifest.add_input(&a.basis.join(f))?;
    }
    manifest.add_input(&a.signal)?;
    manifest.set("inverse", a.inverse.to_string());
    let basis = import_basis(&a.basis)?;
    let x = read_signal_csv(&a.signal)?;
    let y = if a.inverse {
        basis.inverse(&x)?
    } else {
        basis.forward(&x)?
    };
    write_signal_csv(&a.out, &y)?;
    manifest.add_output(&a.out);
    manifest.write(&manifest_path_for(&a.out, false))?;
    println!("transform: {} -> {} coefficients", x.len(), y.len());
    Ok(())
}

fn cmd_filter(ctx: &Ctx, a: FilterArgs) -> Result<()> {
    let mut manifest = RunManifest::new("filter", ctx.seed);
    manifest.add_input(&a.signal)?;
    let x = read_signal_csv(&a.signal)?;

    let basis: Option<GftBasis> = match &a.basis {
        Some(dir) => {
            for f in ["lambda.csv", "modes.csv", "q.csv", "meta.txt"] {
                manifest.add_input(&dir.join(f))?;
            }
            Some(import_basis(dir)?)
        }
        None => None,
    };

    let poly = ctx.str_or(a.poly, "poly");
    let y = if let Some(cutoff) = a.ideal_lowpass {
        let b = basis
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("--ideal-lowpass needs --basis".into()))?;
        manifest.set("ideal-lowpass", cutoff.to_string());
        let resp = ideal_lowpass_response(b.num_modes(), cutoff)?;
        apply_filter(&FilterSpec::Spectral(resp), &x, Some(b), None)?
    } else if let Some(resp_path) = &a.response {
        let b = basis
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("--response needs --basis".into()))?;
        manifest.add_input(resp_path)?;
        let resp = read_signal_csv(resp_path)?;
        apply_filter(&FilterSpec::Spectral(resp), &x, Some(b), None)?
    } else if let Some(coeff_str) = poly {
        let coeffs = parse_f64_list(&coeff_str, "--poly")?;
        manifest.set("poly", &coeff_str);
        if let Some(b) = basis.as_ref() {
            apply_filter(&FilterSpec::Polynomial(coeffs), &x, Some(b), None)?
        } else {
            let graph_path = a
                .graph
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("--poly needs --basis or --graph".into()))?;
            manifest.add_input(graph_path)?;
            let g = read_graph(graph_path)?;
            let variation = ctx
                .str_or(a.variation, "variation")
                .ok_or_else(|| Error::InvalidParameter("missing --variation".into()))?;
            let q_token = ctx
                .str_or(a.q, "q")
                .ok_or_else(|| Error::InvalidParameter("missing --q".into()))?;
            manifest.set("variation", &variation);
            manifest.set("q", &q_token);
            let op = parse_variation(&variation, &g)?;
            let q = parse_q(&q_token, &g, &mut manifest)?;
            let m = op.matrix().ok_or_else(|| {
                Error::InvalidParameter(
                    "polynomial filtering over a graph needs a quadratic variation".into(),
                )
            })?;
            let z = Fundamental::from_dense(m, &q)?;
            apply_filter(&FilterSpec::Polynomial(coeffs), &x, None, Some(&z))?
        }
    } else {
        return Err(Error::InvalidParameter(
            "choose a filter: --ideal-lowpass, --response, or --poly".into(),
        ));
    };

    write_signal_csv(&a.out, &y)?;
    manifest.add_output(&a.out);
    manifest.write(&manifest_path_for(&a.out, false))?;
    println!("filter: wrote {} samples to {}", y.len(), a.out.display());
    Ok(())
}

fn cmd_bilateral(ctx: &Ctx, a: BilateralArgs) -> Result<()> {
    let mut manifest = RunManifest::new("bilateral", ctx.seed);
    manifest.add_input(&a.image)?;
    let sigma_d = ctx.num_or(a.sigma_d, "sigma-d", 2.0)?;
    let sigma_i = ctx.num_or(a.sigma_i, "sigma-i", 30.0)?;
    let radius = ctx.num_or(a.radius, "radius", 2)?;
    let passes = ctx.num_or(a.passes, "passes", 1)?;
    manifest.set("sigma-d", sigma_d.to_string());
    manifest.set("sigma-i", sigma_i.to_string());
    manifest.set("radius", radius.to_string());
    manifest.set("passes", passes.to_string());
    let img = read_pgm(&a.image)?;
    let out = bilateral_filter(&img, radius, sigma_d, sigma_i, passes)?;
    write_pgm(&a.out, &out)?;
    manifest.add_output(&a.out);
    manifest.write(&manifest_path_for(&a.out, false))?;
    println!(
        "bilateral: {}x{} image -> {}",
        img.width(),
        img.height(),
        a.out.display()
    );
    Ok(())
}

fn cmd_cluster(ctx: &Ctx, a: ClusterArgs) -> Result<()> {
    let mut manifest = RunManifest::new("cluster", ctx.seed);
    let seeds: Vec<u64> = match ctx.str_or(a.seeds, "seeds") {
        Some(raw) => raw
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::InvalidParameter(format!("--seeds: bad entry {t:?}")))
            })
            .collect::<Result<Vec<u64>>>()?,
        None => vec![ctx.seed],
    };
    let gft_token = ctx.str_or(a.gft, "gft");
    let methods: Vec<ClusterMethod> = if a.all_configs || gft_token.is_none() {
        ClusterMethod::ALL.to_vec()
    } else {
        vec![ClusterMethod::parse(gft_token.as_deref().unwrap())?]
    };
    let params = DatasetParams {
        n_sparse: ctx.num_or(a.n_sparse, "n-sparse", 30)?,
        n_dense: ctx.num_or(a.n_dense, "n-dense", 300)?,
        ..DatasetParams::default()
    };
    manifest.set("configs", methods.iter().map(|m| m.label()).collect::<Vec<_>>().join("+"));
    manifest.set(
        "seeds",
        seeds.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("+"),
    );
    manifest.set("n-sparse", params.n_sparse.to_string());
    manifest.set("n-dense", params.n_dense.to_string());

    let rows = run_clustering_study(&params, 2, &seeds)?;
    let rows: Vec<_> = rows
        .into_iter()
        .filter(|r| methods.contains(&r.method))
        .collect();
    write_cluster_report_csv(&a.out, &rows)?;
    manifest.add_output(&a.out);

    if let Some(curve_path) = &a.curve_out {
        let method = methods[0];
        let (points, truth) = gftk::cluster::make_dataset(&params, seeds[0])?;
        let g = knn_graph(&points, gftk::cluster::KNN_NEIGHBORS, gftk::cluster::KNN_SIGMA)?;
        // the curve needs every mode, not just the clustering features
        let basis = if matches!(method, ClusterMethod::TotalVariationIdentity) {
            let (op, q) = method_operator(method, &g, &points)?;
            gft_basis_greedy(
                &op,
                &q,
                &GreedyOptions {
                    seed: seeds[0],
                    ..GreedyOptions::default()
                },
            )?
        } else {
            method_basis(method, &g, &points, 2, seeds[0])?
        };
        let curve = lowpass_indicator_study(&basis, &truth)?;
        write_curve_csv(curve_path, &curve)?;
        manifest.add_output(curve_path);
        manifest.set("curve-config", method.label());
    }
    manifest.write(&manifest_path_for(&a.out, false))?;
    let mut summary = String::new();
    for r in &rows {
        let _ = writeln!(
            summary,
            "{:<18} seed={} accuracy={:.4} f1_sparse={:.4} ncut_own={:.4} ncut_gtv_I={:.4}",
            r.method.label(),
            r.seed,
            r.accuracy,
            r.f1_sparse,
            r.ncut_own,
            r.ncut_gtv_identity
        );
    }
    print!("{summary}");
    Ok(())
}

fn cmd_sensor(ctx: &Ctx, a: SensorArgs) -> Result<()> {
    let mut manifest = RunManifest::new("sensor", ctx.seed);
    let dist_token = ctx
        .str_or(a.dist, "dist")
        .ok_or_else(|| Error::InvalidParameter("missing --dist (uniform or nonuniform)".into()))?;
    let defaults = SensorConfig::default();
    let freqs = match ctx.str_or(a.freqs, "freqs") {
        Some(raw) => parse_f64_list(&raw, "--freqs")?,
        None => defaults.freqs.clone(),
    };
    let phases = match ctx.str_or(a.phases, "phases") {
        Some(raw) => parse_f64_list(&raw, "--phases")?,
        None => defaults.phases.clone(),
    };
    let kinds = match ctx.str_or(a.kinds, "kinds") {
        Some(raw) => raw
            .split(',')
            .map(EnergyKind::parse)
            .collect::<Result<Vec<_>>>()?,
        None => defaults.kinds.clone(),
    };
    let cfg = SensorConfig {
        distribution: PointDistribution::parse(&dist_token)?,
        n_vertices: ctx.num_or(a.n, "n", defaults.n_vertices)?,
        n_realizations: ctx.num_or(a.realizations, "realizations", defaults.n_realizations)?,
        k: ctx.num_or(a.k, "k", defaults.k)?,
        sigma: ctx.num_or(a.sigma, "sigma", defaults.sigma)?,
        freqs,
        phases,
        kinds,
        prenormalize: ctx.flag_or(a.prenormalize, "prenormalize")?,
        seed: ctx.seed,
    };
    manifest.set("dist", cfg.distribution.label());
    manifest.set("n", cfg.n_vertices.to_string());
    manifest.set("realizations", cfg.n_realizations.to_string());
    manifest.set("k", cfg.k.to_string());
    manifest.set("sigma", cfg.sigma.to_string());
    manifest.set(
        "freqs",
        cfg.freqs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("+"),
    );
    manifest.set(
        "phases",
        cfg.phases.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("+"),
    );
    manifest.set(
        "kinds",
        cfg.kinds.iter().map(|k| k.label()).collect::<Vec<_>>().join("+"),
    );
    manifest.set("prenormalize", cfg.prenormalize.to_string());

    let stats = run_energy_experiment(&cfg)?;
    if stats.resampled > 0 {
        log::warn!("{} point sets were redrawn for the Voronoi construction", stats.resampled);
    }
    write_energy_rows_csv(&a.out_long, &stats.rows)?;
    write_energy_summary_csv(&a.out_summary, &stats.summary)?;
    manifest.add_output(&a.out_long);
    manifest.add_output(&a.out_summary);
    manifest.write(&manifest_path_for(&a.out_long, false))?;
    println!(
        "sensor: {} realizations, {} rows, {} summary rows",
        cfg.n_realizations,
        stats.rows.len(),
        stats.summary.len()
    );
    Ok(())
}

fn cmd_ring_demo(ctx: &Ctx, a: RingDemoArgs) -> Result<()> {
    let mut manifest = RunManifest::new("ring-demo", ctx.seed);
    let g = ring_graph(8)?;
    let op = VariationOperator::laplacian(&g)?;
    std::fs::create_dir_all(&a.out).map_err(|e| Error::io(&a.out, e))?;
    println!("ring with 8 vertices, combinatorial Laplacian variation");
    println!("impulse at vertex 0, spectra under three vertex weightings:\n");
    for (label, q0) in [("q0.1", 0.1), ("q1", 1.0), ("q10", 10.0)] {
        let mut diag = DVector::from_element(8, 1.0);
        diag[0] = q0;
        let q = InnerProduct::custom_diagonal(diag)?;
        let basis = gft_basis(&op, &q)?;
        let subdir = a.out.join(label);
        export_basis(&subdir, &basis)?;
        let mut delta = DVector::zeros(8);
        delta[0] = 1.0;
        let spectrum = basis.forward(&delta)?;
        let mut csv = String::from("l,lambda,delta_hat\n");
        for l in 0..8 {
            let _ = writeln!(
                csv,
                "{l},{},{}",
                gftk::io::fmt_f64(basis.freqs()[l]),
                gftk::io::fmt_f64(spectrum[l])
            );
        }
        let spath = subdir.join("delta_spectrum.csv");
        std::fs::write(&spath, csv).map_err(|e| Error::io(&spath, e))?;
        for f in ["lambda.csv", "modes.csv", "q.csv", "meta.txt", "delta_spectrum.csv"] {
            manifest.add_output(&subdir.join(f));
        }

        let mut order: Vec<usize> = (0..8).collect();
        order.sort_by(|&i, &j| {
            spectrum[j]
                .abs()
                .partial_cmp(&spectrum[i].abs())
                .expect("finite spectrum")
        });
        println!(
            "  q_0 = {q0:>4}: largest |coefficient| at modes {} and {} ({:.3}, {:.3})",
            order[0],
            order[1],
            spectrum[order[0]].abs(),
            spectrum[order[1]].abs()
        );
    }
    println!("\nsmall q_0 pushes the impulse towards high-variation modes,");
    println!("large q_0 pulls it to the smooth end of the spectrum.");
    manifest.set("q0", "0.1+1+10");
    manifest.write(&manifest_path_for(&a.out, true))?;
    Ok(())
}
