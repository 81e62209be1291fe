//! Weighted undirected graphs and the standard operators built from them.
//!
//! Invariants enforced at construction:
//! - vertex indices in range, `n >= 1`
//! - all edge weights finite and `> 0`
//! - no duplicate unordered vertex pair
//! - self-loops are representable but no constructor here creates one
//!
//! The edge list is the ground truth; dense operators are only materialized
//! for `n <= 4096` and CSR forms are built on demand.

use crate::error::{Error, Result};
use crate::sparse::Csr;
use nalgebra::{DMatrix, DVector};
use std::fmt::Write as _;
use std::path::Path;

/// Largest vertex count for which dense operator matrices may be built.
pub const DENSE_LIMIT: usize = 4096;

/// Undirected weighted graph with optional planar vertex coordinates.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    coords: Option<Vec<[f64; 2]>>,
}

/// Operators derivable from a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Adjacency,
    /// A / μ_max with μ_max the largest-magnitude adjacency eigenvalue.
    NormalizedAdjacency,
    Degree,
    /// L = D − A.
    CombinatorialLaplacian,
    /// 𝓛 = I − D^{−1/2} A D^{−1/2}.
    NormalizedLaplacian,
    /// L_RW = I − D^{−1} A.
    RandomWalkLaplacian,
}

impl Graph {
    /// Builds a graph from an edge list, canonicalizing each pair as (min, max)
    /// and sorting lexicographically.
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> Result<Graph> {
        if n == 0 {
            return Err(Error::Graph("graph needs at least one vertex".into()));
        }
        let mut canon: Vec<(usize, usize, f64)> = Vec::with_capacity(edges.len());
        for (i, j, w) in edges {
            if i >= n || j >= n {
                return Err(Error::Graph(format!(
                    "edge ({i}, {j}) out of range for {n} vertices"
                )));
            }
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::Graph(format!("edge ({i}, {j}) has weight {w}")));
            }
            canon.push((i.min(j), i.max(j), w));
        }
        canon.sort_by_key(|t| (t.0, t.1));
        if canon.windows(2).any(|w| w[0].0 == w[1].0 && w[0].1 == w[1].1) {
            return Err(Error::Graph("duplicate edge".into()));
        }
        Ok(Graph {
            n,
            edges: canon,
            coords: None,
        })
    }

    pub fn with_coords(mut self, coords: Vec<[f64; 2]>) -> Result<Graph> {
        if coords.len() != self.n {
            return Err(Error::Graph(format!(
                "{} coordinates for {} vertices",
                coords.len(),
                self.n
            )));
        }
        if coords.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::Graph("non-finite coordinate".into()));
        }
        self.coords = Some(coords);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn coords(&self) -> Option<&[[f64; 2]]> {
        self.coords.as_deref()
    }

    /// Degree vector d_i = Σ_j w_ij (a self-loop counts its weight once).
    pub fn degrees(&self) -> DVector<f64> {
        let mut d = DVector::zeros(self.n);
        for &(i, j, w) in &self.edges {
            d[i] += w;
            if j != i {
                d[j] += w;
            }
        }
        d
    }

    pub fn adjacency_csr(&self) -> Csr {
        let mut t = Vec::with_capacity(2 * self.edges.len());
        for &(i, j, w) in &self.edges {
            t.push((i, j, w));
            if j != i {
                t.push((j, i, w));
            }
        }
        Csr::from_triplets(self.n, self.n, &t)
    }

    /// Combinatorial Laplacian L = D − A in CSR form.
    pub fn laplacian_csr(&self) -> Csr {
        let d = self.degrees();
        // a self-loop contributes w to both D and A, cancelling in L
        let mut self_w = vec![0.0; self.n];
        for &(i, j, w) in &self.edges {
            if i == j {
                self_w[i] += w;
            }
        }
        let mut t = Vec::with_capacity(2 * self.edges.len() + self.n);
        for i in 0..self.n {
            t.push((i, i, d[i] - self_w[i]));
        }
        for &(i, j, w) in &self.edges {
            if i != j {
                t.push((i, j, -w));
                t.push((j, i, -w));
            }
        }
        Csr::from_triplets(self.n, self.n, &t)
    }

    /// A / μ_max in CSR form.
    pub fn normalized_adjacency_csr(&self) -> Result<Csr> {
        let mu = self.max_adjacency_eigenvalue()?;
        if mu <= 0.0 {
            return Err(Error::Graph(
                "normalized adjacency undefined: graph has no edges".into(),
            ));
        }
        Ok(self.adjacency_csr().scale(1.0 / mu))
    }

    fn check_dense(&self) -> Result<()> {
        if self.n > DENSE_LIMIT {
            return Err(Error::InvalidParameter(format!(
                "dense operator for n = {} exceeds limit {DENSE_LIMIT}",
                self.n
            )));
        }
        Ok(())
    }

    fn positive_degrees(&self) -> Result<DVector<f64>> {
        let d = self.degrees();
        if let Some(i) = (0..self.n).find(|&i| d[i] <= 0.0) {
            return Err(Error::Graph(format!(
                "vertex {i} has zero degree; normalized operators undefined"
            )));
        }
        Ok(d)
    }

    /// Builds the requested operator as a dense matrix (n ≤ 4096).
    pub fn build_operator(&self, kind: OperatorKind) -> Result<DMatrix<f64>> {
        self.check_dense()?;
        match kind {
            OperatorKind::Adjacency => Ok(self.adjacency_csr().to_dense()),
            OperatorKind::NormalizedAdjacency => {
                Ok(self.normalized_adjacency_csr()?.to_dense())
            }
            OperatorKind::Degree => Ok(DMatrix::from_diagonal(&self.degrees())),
            OperatorKind::CombinatorialLaplacian => Ok(self.laplacian_csr().to_dense()),
            OperatorKind::NormalizedLaplacian => {
                let d = self.positive_degrees()?;
                let s = d.map(|v| 1.0 / v.sqrt());
                let mut m = self.laplacian_csr().to_dense();
                for i in 0..self.n {
                    for j in 0..self.n {
                        m[(i, j)] *= s[i] * s[j];
                    }
                }
                Ok(m)
            }
            OperatorKind::RandomWalkLaplacian => {
                let d = self.positive_degrees()?;
                let s = d.map(|v| 1.0 / v);
                Ok(self.laplacian_csr().scale_rows(&s).to_dense())
            }
        }
    }

    /// Largest-magnitude adjacency eigenvalue μ_max.
    ///
    /// Power iteration on A² (squaring makes the bipartite ±μ pair converge)
    /// from the all-ones vector, relative tolerance 1e−10, at most 10000
    /// iterations; on non-convergence a dense eigensolve is used for n ≤ 64.
    pub fn max_adjacency_eigenvalue(&self) -> Result<f64> {
        if self.edges.is_empty() {
            return Ok(0.0);
        }
        let a = self.adjacency_csr();
        let n = self.n;
        let mut x = DVector::from_element(n, 1.0 / (n as f64).sqrt());
        let mut prev = f64::NAN;
        for _ in 0..10_000 {
            let y = a.matvec(&a.matvec(&x)); // A² x
            let mu2 = x.dot(&y); // Rayleigh quotient, ‖x‖ = 1
            let norm = y.norm();
            if norm == 0.0 {
                break; // x in the nullspace of A²; fall back
            }
            x = y / norm;
            if prev.is_finite() && (mu2 - prev).abs() <= 1e-10 * mu2.abs().max(1e-300) {
                return Ok(mu2.max(0.0).sqrt());
            }
            prev = mu2;
        }
        if n <= 64 {
            let dense = self.adjacency_csr().to_dense();
            let eig = nalgebra::SymmetricEigen::new(dense);
            return Ok(eig
                .eigenvalues
                .iter()
                .fold(0.0f64, |acc, &v| acc.max(v.abs())));
        }
        Err(Error::Solver(
            "power iteration for μ_max did not converge".into(),
        ))
    }

    /// Divides every weight by the product of its endpoint degrees,
    /// w'(ij) = w(ij) / (d_i d_j), flattening heavy-degree regions.
    pub fn prenormalized(&self) -> Result<Graph> {
        let d = self.positive_degrees()?;
        let edges = self
            .edges
            .iter()
            .map(|&(i, j, w)| (i, j, w / (d[i] * d[j])))
            .collect();
        Ok(Graph {
            n: self.n,
            edges,
            coords: self.coords.clone(),
        })
    }
}

/// k-nearest-neighbour graph over planar points.
///
/// Neighbours are ranked by Euclidean distance with ties broken by lower
/// vertex index; the directed k-NN relation is symmetrized by union. Edge
/// weights are exp(−d² / (2σ²)). Points at identical coordinates are legal
/// (distance 0, weight 1) but reported through the `log` warning channel.
pub fn knn_graph(points: &[[f64; 2]], k: usize, sigma: f64) -> Result<Graph> {
    let n = points.len();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "k-NN graph needs at least two points".into(),
        ));
    }
    if k == 0 || k >= n {
        return Err(Error::InvalidParameter(format!(
            "k = {k} out of range for {n} points"
        )));
    }
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::InvalidParameter(format!("sigma = {sigma}")));
    }
    if points.iter().flatten().any(|c| !c.is_finite()) {
        return Err(Error::InvalidParameter("non-finite point".into()));
    }

    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(n * k);
    let mut cand: Vec<(f64, usize)> = Vec::with_capacity(n - 1);
    let mut duplicates = 0usize;
    for i in 0..n {
        cand.clear();
        for j in 0..n {
            if j == i {
                continue;
            }
            let dx = points[i][0] - points[j][0];
            let dy = points[i][1] - points[j][1];
            cand.push((dx * dx + dy * dy, j));
        }
        cand.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
        for &(d2, j) in cand.iter().take(k) {
            if d2 == 0.0 {
                duplicates += 1;
            }
            pairs.push((i.min(j), i.max(j)));
        }
    }
    if duplicates > 0 {
        log::warn!("k-NN graph: {duplicates} neighbour pairs at identical coordinates (weight 1)");
    }
    pairs.sort_unstable();
    pairs.dedup();
    let two_sigma2 = 2.0 * sigma * sigma;
    let edges = pairs
        .into_iter()
        .map(|(i, j)| {
            let dx = points[i][0] - points[j][0];
            let dy = points[i][1] - points[j][1];
            (i, j, (-(dx * dx + dy * dy) / two_sigma2).exp())
        })
        .collect();
    Graph::new(n, edges)?.with_coords(points.to_vec())
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

/// Writes the textual graph format:
/// header `N E`, then `E` lines `i j w` with `i < j`, then an optional
/// `coords` section of `N` lines `x y`.
pub fn write_graph(path: &Path, g: &Graph) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", g.n(), g.edges().len());
    for &(i, j, w) in g.edges() {
        if i == j {
            return Err(Error::Graph(format!(
                "self-loop at vertex {i} is not representable in the graph file format"
            )));
        }
        let _ = writeln!(out, "{} {} {}", i, j, fmt(w));
    }
    if let Some(coords) = g.coords() {
        let _ = writeln!(out, "coords");
        for c in coords {
            let _ = writeln!(out, "{} {}", fmt(c[0]), fmt(c[1]));
        }
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Writes a graph followed by a dense `matrix` section (n ≤ 4096), used to
/// ship a variation matrix alongside the graph it was built from.
pub fn write_graph_with_matrix(path: &Path, g: &Graph, m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != g.n() || m.ncols() != g.n() {
        return Err(Error::InvalidParameter(format!(
            "matrix is {}x{} but graph has {} vertices",
            m.nrows(),
            m.ncols(),
            g.n()
        )));
    }
    if g.n() > DENSE_LIMIT {
        return Err(Error::InvalidParameter(format!(
            "matrix section limited to n ≤ {DENSE_LIMIT}"
        )));
    }
    write_graph(path, g)?;
    let mut out = String::from("matrix\n");
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| fmt(m[(r, c)])).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    use std::io::Write as _;
    let mut f = std::fs::OpenOptions::new()
        .append(true)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Reads the textual graph format; a trailing `matrix` section is returned
/// separately when present.
pub fn read_graph_full(path: &Path) -> Result<(Graph, Option<DMatrix<f64>>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();
    let (lno, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "empty file"))?;
    let mut hp = header.split_whitespace();
    let n: usize = hp
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::parse(path, lno + 1, "header must be `N E`"))?;
    let e: usize = hp
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::parse(path, lno + 1, "header must be `N E`"))?;
    if hp.next().is_some() {
        return Err(Error::parse(path, lno + 1, "header must be `N E`"));
    }

    let mut edges = Vec::with_capacity(e);
    for _ in 0..e {
        let (lno, line) = lines
            .next()
            .ok_or_else(|| Error::parse(path, 0, "unexpected end of file in edge list"))?;
        let mut p = line.split_whitespace();
        let (i, j, w): (usize, usize, f64) = match (p.next(), p.next(), p.next(), p.next()) {
            (Some(a), Some(b), Some(c), None) => {
                let i = a
                    .parse()
                    .map_err(|_| Error::parse(path, lno + 1, "bad vertex index"))?;
                let j = b
                    .parse()
                    .map_err(|_| Error::parse(path, lno + 1, "bad vertex index"))?;
                let w = c
                    .parse()
                    .map_err(|_| Error::parse(path, lno + 1, "bad weight"))?;
                (i, j, w)
            }
            _ => return Err(Error::parse(path, lno + 1, "edge line must be `i j w`")),
        };
        if i >= j {
            return Err(Error::parse(
                path,
                lno + 1,
                format!("edge ({i}, {j}) must satisfy i < j"),
            ));
        }
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::parse(path, lno + 1, format!("weight {w} must be > 0")));
        }
        edges.push((i, j, w));
    }
    let mut graph = Graph::new(n, edges)
        .map_err(|err| Error::parse(path, 0, err.to_string()))?;

    let mut matrix = None;
    while let Some((lno, line)) = lines.next() {
        let tag = line.trim();
        if tag.is_empty() {
            continue;
        }
        match tag {
            "coords" => {
                let mut coords = Vec::with_capacity(n);
                for _ in 0..n {
                    let (lno, line) = lines.next().ok_or_else(|| {
                        Error::parse(path, 0, "unexpected end of file in coords section")
                    })?;
                    let vals: Vec<f64> = line
                        .split_whitespace()
                        .map(|t| t.parse::<f64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| Error::parse(path, lno + 1, "bad coordinate"))?;
                    if vals.len() != 2 {
                        return Err(Error::parse(path, lno + 1, "coords line must be `x y`"));
                    }
                    coords.push([vals[0], vals[1]]);
                }
                graph = graph
                    .with_coords(coords)
                    .map_err(|err| Error::parse(path, lno + 1, err.to_string()))?;
            }
            "matrix" => {
                let mut m = DMatrix::zeros(n, n);
                for r in 0..n {
                    let (lno, line) = lines.next().ok_or_else(|| {
                        Error::parse(path, 0, "unexpected end of file in matrix section")
                    })?;
                    let vals: Vec<f64> = line
                        .split_whitespace()
                        .map(|t| t.parse::<f64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| Error::parse(path, lno + 1, "bad matrix entry"))?;
                    if vals.len() != n {
                        return Err(Error::parse(
                            path,
                            lno + 1,
                            format!("matrix row needs {n} entries"),
                        ));
                    }
                    for c in 0..n {
                        m[(r, c)] = vals[c];
                    }
                }
                matrix = Some(m);
            }
            other => {
                return Err(Error::parse(
                    path,
                    lno + 1,
                    format!("unexpected section `{other}`"),
                ))
            }
        }
    }
    Ok((graph, matrix))
}

pub fn read_graph(path: &Path) -> Result<Graph> {
    read_graph_full(path).map(|(g, _)| g)
}

/// Unit-weight cycle graph on n vertices.
pub fn ring_graph(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidParameter("ring needs n ≥ 3".into()));
    }
    let edges = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
    Graph::new(n, edges)
}
