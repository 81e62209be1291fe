//! Generalized graph Fourier bases.
//!
//! A basis is a set of modes u_0 … u_{L−1} that are Q-orthonormal
//! (UᴴQU = I) and ordered by increasing variation. For quadratic
//! variations Δ(x) = xᴴMx the modes solve the generalized eigenproblem
//! M u = λ Q u, reduced here to an ordinary symmetric eigenproblem by a
//! congruence transform; non-quadratic variations go through the greedy
//! descent solver in [`crate::greedy`].
//!
//! The analysis operator is F = UᴴQ and the synthesis operator is U
//! itself, so F U = I and ⟨x, y⟩_Q = ⟨Fx, Fy⟩ whenever the basis is full.
//!
//! Numerical policy for the quadratic path:
//! - eigenvalues below −1e−10·‖M‖_∞ mean M was not positive semidefinite
//!   and produce an error; negatives within that band are clamped to 0
//! - each stored frequency is Δ(u_l) recomputed from the returned mode
//! - each mode is scaled so its largest-magnitude entry is positive,
//!   ties broken by lowest index
//! - near-equal frequencies (gap < 1e−9·max(1, λ_max)) are grouped in the
//!   diagnostics; individual vectors inside such groups are basis-dependent

use crate::error::{Error, Result};
use crate::operators::{InnerProduct, VariationOperator};
use crate::sparse::Csr;
use nalgebra::{DMatrix, DVector};

/// How a basis was computed, plus everything needed to audit it.
#[derive(Debug, Clone, Default)]
pub struct SolverDiagnostics {
    pub solver: String,
    /// Smallest raw eigenvalue before clamping (quadratic path only).
    pub min_raw_eigenvalue: Option<f64>,
    pub clamped_count: usize,
    /// Inclusive index ranges of near-degenerate frequency groups.
    pub degenerate_groups: Vec<(usize, usize)>,
    /// max |UᴴQU − I| over all entries.
    pub orthonormality_residual: f64,
    /// Greedy path: best objective seen per mode per restart.
    pub restart_objectives: Vec<Vec<f64>>,
    /// Greedy path: convergence flag per mode.
    pub converged: Vec<bool>,
    /// Greedy path: descent iterations used per mode (best restart).
    pub iterations: Vec<usize>,
    /// Mode indices l with freqs[l] < freqs[l−1] (greedy order only).
    pub monotone_violations: Vec<usize>,
    /// Mode order sorted by frequency; identity on the quadratic path.
    pub variation_sorted_order: Vec<usize>,
}

/// A computed basis: modes, frequencies, the inner product, and F = UᴴQ.
#[derive(Debug, Clone)]
pub struct GftBasis {
    modes: DMatrix<f64>,
    freqs: DVector<f64>,
    q: InnerProduct,
    analysis: DMatrix<f64>,
    variation: String,
    diagnostics: SolverDiagnostics,
}

impl GftBasis {
    pub(crate) fn assemble(
        modes: DMatrix<f64>,
        freqs: DVector<f64>,
        q: InnerProduct,
        variation: String,
        mut diagnostics: SolverDiagnostics,
    ) -> GftBasis {
        let analysis = match &q {
            InnerProduct::Diagonal { q: d, .. } => {
                let mut f = modes.transpose();
                for c in 0..f.ncols() {
                    for r in 0..f.nrows() {
                        f[(r, c)] *= d[c];
                    }
                }
                f
            }
            InnerProduct::General { q: m, .. } => modes.transpose() * m,
        };
        let gram = &analysis * &modes;
        let mut resid = 0.0f64;
        for r in 0..gram.nrows() {
            for c in 0..gram.ncols() {
                let target = if r == c { 1.0 } else { 0.0 };
                resid = resid.max((gram[(r, c)] - target).abs());
            }
        }
        diagnostics.orthonormality_residual = resid;
        let max_f = freqs.iter().cloned().fold(0.0f64, f64::max);
        let gap = 1e-9 * max_f.max(1.0);
        diagnostics.degenerate_groups = degenerate_groups(&freqs, gap);
        let mut order: Vec<usize> = (0..freqs.len()).collect();
        order.sort_by(|&a, &b| freqs[a].partial_cmp(&freqs[b]).expect("finite frequencies"));
        diagnostics.variation_sorted_order = order;
        diagnostics.monotone_violations = (1..freqs.len())
            .filter(|&l| freqs[l] < freqs[l - 1])
            .collect();
        GftBasis {
            modes,
            freqs,
            q,
            analysis,
            variation,
            diagnostics,
        }
    }

    /// Vertex count.
    pub fn n(&self) -> usize {
        self.modes.nrows()
    }

    /// Number of computed modes (= n unless a truncated greedy basis).
    pub fn num_modes(&self) -> usize {
        self.modes.ncols()
    }

    pub fn is_full(&self) -> bool {
        self.num_modes() == self.n()
    }

    /// Modes as columns.
    pub fn modes(&self) -> &DMatrix<f64> {
        &self.modes
    }

    pub fn mode(&self, l: usize) -> DVector<f64> {
        self.modes.column(l).into_owned()
    }

    /// Graph frequencies λ_l = Δ(u_l).
    pub fn freqs(&self) -> &DVector<f64> {
        &self.freqs
    }

    pub fn q(&self) -> &InnerProduct {
        &self.q
    }

    pub fn variation(&self) -> &str {
        &self.variation
    }

    pub fn diagnostics(&self) -> &SolverDiagnostics {
        &self.diagnostics
    }

    /// Analysis operator F = UᴴQ.
    pub fn analysis(&self) -> &DMatrix<f64> {
        &self.analysis
    }

    /// x̂ = Fx.
    pub fn forward(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.n() {
            return Err(Error::InvalidParameter(format!(
                "signal length {} does not match vertex count {}",
                x.len(),
                self.n()
            )));
        }
        Ok(&self.analysis * x)
    }

    /// x = U x̂.
    pub fn inverse(&self, xhat: &DVector<f64>) -> Result<DVector<f64>> {
        if xhat.len() != self.num_modes() {
            return Err(Error::InvalidParameter(format!(
                "spectrum length {} does not match mode count {}",
                xhat.len(),
                self.num_modes()
            )));
        }
        Ok(&self.modes * xhat)
    }
}

fn degenerate_groups(freqs: &DVector<f64>, gap: f64) -> Vec<(usize, usize)> {
    let mut groups = Vec::new();
    let mut start = 0;
    for l in 1..=freqs.len() {
        let split = l == freqs.len() || (freqs[l] - freqs[l - 1]).abs() >= gap;
        if split {
            if l - start > 1 {
                groups.push((start, l - 1));
            }
            start = l;
        }
    }
    groups
}

/// Applies the deterministic sign convention to one column.
pub(crate) fn fix_sign(u: &mut DVector<f64>) {
    let mut best = 0usize;
    let mut best_abs = -1.0f64;
    for (i, v) in u.iter().enumerate() {
        let a = v.abs();
        if a > best_abs {
            best_abs = a;
            best = i;
        }
    }
    if u[best] < 0.0 {
        u.neg_mut();
    }
}

/// Solves M u = λ Q u for a quadratic variation via congruence reduction.
pub fn gft_basis_hpsd(op: &VariationOperator, q: &InnerProduct) -> Result<GftBasis> {
    let m = op.matrix().ok_or_else(|| {
        Error::InvalidParameter(format!(
            "variation kind `{}` has no matrix; use the greedy solver",
            op.name()
        ))
    })?;
    let n = m.nrows();
    if q.dim() != n {
        return Err(Error::InvalidParameter(format!(
            "Q is {}×{} but M is {n}×{n}",
            q.dim(),
            q.dim()
        )));
    }

    // congruence to an ordinary symmetric problem: B = Q^{−1/2} M Q^{−1/2}
    // (diagonal Q) or B = L⁻¹ M L⁻ᵀ with Q = LLᵀ (general Q)
    let b = match q {
        InnerProduct::Diagonal { q: d, .. } => {
            let s = d.map(|v| 1.0 / v.sqrt());
            let mut b = m.clone();
            for r in 0..n {
                for c in 0..n {
                    b[(r, c)] *= s[r] * s[c];
                }
            }
            b
        }
        InnerProduct::General { chol_l, .. } => {
            let y = chol_l
                .solve_lower_triangular(m)
                .ok_or_else(|| Error::NotPositiveDefinite("singular Cholesky factor".into()))?;
            let yt = y.transpose();
            let z = chol_l
                .solve_lower_triangular(&yt)
                .ok_or_else(|| Error::NotPositiveDefinite("singular Cholesky factor".into()))?;
            z.transpose()
        }
    };
    let b = (&b + b.transpose()) * 0.5;
    let eig = nalgebra::SymmetricEigen::new(b);

    let m_norm = (0..n)
        .map(|r| (0..n).map(|c| m[(r, c)].abs()).sum::<f64>())
        .fold(0.0f64, f64::max);
    let clamp_tol = 1e-10 * m_norm.max(f64::MIN_POSITIVE);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .expect("finite eigenvalues")
    });

    let min_raw = eig.eigenvalues[order[0]];
    if min_raw < -clamp_tol {
        return Err(Error::NotPositiveSemidefinite(format!(
            "smallest generalized eigenvalue {min_raw:.3e} is below the clamp band −{clamp_tol:.3e}"
        )));
    }
    let clamped_count = order
        .iter()
        .filter(|&&k| eig.eigenvalues[k] < 0.0)
        .count();

    let mut modes = DMatrix::zeros(n, n);
    let mut freqs = DVector::zeros(n);
    for (l, &k) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(k).into_owned();
        let mut u = match q {
            InnerProduct::Diagonal { q: d, .. } => v.zip_map(d, |vi, qi| vi / qi.sqrt()),
            InnerProduct::General { chol_l, .. } => chol_l
                .transpose()
                .solve_upper_triangular(&v)
                .ok_or_else(|| Error::NotPositiveDefinite("singular Cholesky factor".into()))?,
        };
        fix_sign(&mut u);
        // the raw spectrum already passed the clamp band check, so any
        // residual negative here is rounding noise
        freqs[l] = op.value(&u).max(0.0);
        modes.set_column(l, &u);
    }

    // recomputed frequencies can swap near-ties; restore monotone order
    let mut perm: Vec<usize> = (0..n).collect();
    perm.sort_by(|&a, &b| freqs[a].partial_cmp(&freqs[b]).expect("finite frequencies"));
    let modes = DMatrix::from_columns(
        &perm.iter().map(|&k| modes.column(k)).collect::<Vec<_>>(),
    );
    let freqs = DVector::from_iterator(n, perm.iter().map(|&k| freqs[k]));

    let diagnostics = SolverDiagnostics {
        solver: "dense-symmetric-congruence".into(),
        min_raw_eigenvalue: Some(min_raw),
        clamped_count,
        ..Default::default()
    };
    Ok(GftBasis::assemble(
        modes,
        freqs,
        q.clone(),
        op.name().to_string(),
        diagnostics,
    ))
}

/// Computes a full basis with the solver suited to the variation operator:
/// dense congruence eigensolve when a quadratic form is available, greedy
/// projected descent otherwise.
pub fn gft_basis(op: &VariationOperator, q: &InnerProduct) -> Result<GftBasis> {
    if op.is_hpsd() {
        gft_basis_hpsd(op, q)
    } else {
        crate::greedy::gft_basis_greedy(op, q, &crate::greedy::GreedyOptions::default())
    }
}

/// The fundamental matrix Z = F⁻¹ Λ F = Q⁻¹M, kept sparse whenever Q is
/// diagonal and M comes in CSR form.
#[derive(Debug, Clone)]
pub enum Fundamental {
    Sparse(Csr),
    Dense(DMatrix<f64>),
}

impl Fundamental {
    /// Z = Q⁻¹M from a sparse quadratic variation matrix.
    pub fn from_csr(m: &Csr, q: &InnerProduct) -> Result<Fundamental> {
        if m.nrows() != q.dim() || m.ncols() != q.dim() {
            return Err(Error::InvalidParameter("dimension mismatch".into()));
        }
        match q {
            InnerProduct::Diagonal { q: d, .. } => {
                let inv = d.map(|v| 1.0 / v);
                Ok(Fundamental::Sparse(m.scale_rows(&inv)))
            }
            InnerProduct::General { .. } => {
                let mut dense = m.to_dense();
                for c in 0..dense.ncols() {
                    let col = q.inv_apply(&dense.column(c).into_owned());
                    dense.set_column(c, &col);
                }
                Ok(Fundamental::Dense(dense))
            }
        }
    }

    /// Z = Q⁻¹M from a dense quadratic variation matrix.
    pub fn from_dense(m: &DMatrix<f64>, q: &InnerProduct) -> Result<Fundamental> {
        if m.nrows() != q.dim() || m.ncols() != q.dim() {
            return Err(Error::InvalidParameter("dimension mismatch".into()));
        }
        let mut dense = m.clone();
        match q {
            InnerProduct::Diagonal { q: d, .. } => {
                for r in 0..dense.nrows() {
                    for c in 0..dense.ncols() {
                        dense[(r, c)] /= d[r];
                    }
                }
            }
            InnerProduct::General { .. } => {
                for c in 0..dense.ncols() {
                    let col = q.inv_apply(&dense.column(c).into_owned());
                    dense.set_column(c, &col);
                }
            }
        }
        Ok(Fundamental::Dense(dense))
    }

    /// Z = U Λ F from a full basis (spectral synthesis form).
    pub fn from_basis(b: &GftBasis) -> Result<Fundamental> {
        if !b.is_full() {
            return Err(Error::InvalidParameter(
                "fundamental matrix needs a full basis".into(),
            ));
        }
        let lam = DMatrix::from_diagonal(b.freqs());
        Ok(Fundamental::Dense(b.modes() * lam * b.analysis()))
    }

    pub fn matvec(&self, x: &DVector<f64>) -> DVector<f64> {
        match self {
            Fundamental::Sparse(m) => m.matvec(x),
            Fundamental::Dense(m) => m * x,
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            Fundamental::Sparse(m) => m.to_dense(),
            Fundamental::Dense(m) => m.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Fundamental::Sparse(m) => m.nrows(),
            Fundamental::Dense(m) => m.nrows(),
        }
    }

    pub fn nnz(&self) -> Option<usize> {
        match self {
            Fundamental::Sparse(m) => Some(m.nnz()),
            Fundamental::Dense(_) => None,
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        match self {
            Fundamental::Sparse(m) => m.frobenius_norm(),
            Fundamental::Dense(m) => m.norm(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ring_graph, Graph, OperatorKind};
    use approx::assert_relative_eq;

    fn ring8_laplacian_identity_basis() -> GftBasis {
        let g = ring_graph(8).unwrap();
        let op = VariationOperator::laplacian(&g).unwrap();
        gft_basis_hpsd(&op, &InnerProduct::identity(8)).unwrap()
    }

    #[test]
    fn ring_eight_frequencies_match_circulant_closed_form() {
        // C8 Laplacian spectrum: 2 − 2cos(2πk/8), k = 0..7
        let mut oracle: Vec<f64> = (0..8)
            .map(|k| 2.0 - 2.0 * (2.0 * std::f64::consts::PI * k as f64 / 8.0).cos())
            .collect();
        oracle.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let b = ring8_laplacian_identity_basis();
        for (l, &want) in oracle.iter().enumerate() {
            assert!(
                (b.freqs()[l] - want).abs() <= 1e-10,
                "λ_{l} = {} but closed form gives {want}",
                b.freqs()[l]
            );
        }
        assert!(b.diagnostics().orthonormality_residual <= 1e-12);
        assert_eq!(b.diagnostics().degenerate_groups, vec![(1, 2), (3, 4), (5, 6)]);
    }

    #[test]
    fn two_by_two_generalized_eigenproblem() {
        // M = [[1, −1], [−1, 1]], Q = diag(2, 1): λ = 0, 3/2 with modes
        // [1, 1]/√3 and ±[1, −2]/√6 (hand-solved)
        let m = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        let q = InnerProduct::custom_diagonal(DVector::from_vec(vec![2.0, 1.0])).unwrap();
        let op = VariationOperator::hpsd("m", m).unwrap();
        let b = gft_basis_hpsd(&op, &q).unwrap();
        assert!(b.freqs()[0].abs() <= 1e-12);
        assert_relative_eq!(b.freqs()[1], 1.5, epsilon = 1e-12);
        let u0 = b.mode(0);
        let u1 = b.mode(1);
        let s3 = 3.0f64.sqrt();
        let s6 = 6.0f64.sqrt();
        assert!((u0[0] - 1.0 / s3).abs() <= 1e-12 && (u0[1] - 1.0 / s3).abs() <= 1e-12);
        let aligned = (u1[0] - 1.0 / s6).abs().max((u1[1] + 2.0 / s6).abs());
        let flipped = (u1[0] + 1.0 / s6).abs().max((u1[1] - 2.0 / s6).abs());
        assert!(aligned.min(flipped) <= 1e-12, "u1 = {u1:?}");
        // sign convention: the largest-magnitude entry of u1 is positive
        assert!(u1[1] > 0.0);
        assert!(q.inner(&u0, &u1).abs() <= 1e-12);
    }

    #[test]
    fn path_two_forward_example() {
        let g = Graph::new(2, vec![(0, 1, 1.0)]).unwrap();
        let op = VariationOperator::laplacian(&g).unwrap();
        let b = gft_basis_hpsd(&op, &InnerProduct::identity(2)).unwrap();
        let s2 = 2.0f64.sqrt();
        // sign convention resolves the λ = 2 mode to [1, −1]/√2 (tie → index 0)
        let u1 = b.mode(1);
        assert_relative_eq!(u1[0], 1.0 / s2, epsilon = 1e-12);
        assert_relative_eq!(u1[1], -1.0 / s2, epsilon = 1e-12);
        let xhat = b.forward(&DVector::from_vec(vec![1.0, 0.0])).unwrap();
        assert_relative_eq!(xhat[0], 1.0 / s2, epsilon = 1e-12);
        assert_relative_eq!(xhat[1], 1.0 / s2, epsilon = 1e-12);
        let back = b.inverse(&xhat).unwrap();
        assert_relative_eq!(back[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(back[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn parseval_and_left_inverse_on_degree_inner_product() {
        use rand::Rng;
        let mut rng = crate::seed::rng(17);
        let pts: Vec<[f64; 2]> = (0..24)
            .map(|_| [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)])
            .collect();
        let g = crate::graph::knn_graph(&pts, 4, 0.25).unwrap();
        let q = InnerProduct::degree(&g).unwrap();
        let op = VariationOperator::laplacian(&g).unwrap();
        let b = gft_basis_hpsd(&op, &q).unwrap();
        let fu = b.analysis() * b.modes();
        assert!((fu - DMatrix::identity(24, 24)).amax() <= 1e-10);
        for _ in 0..10 {
            let x = DVector::from_fn(24, |_, _| rng.gen_range(-1.0..1.0));
            let y = DVector::from_fn(24, |_, _| rng.gen_range(-1.0..1.0));
            let lhs = q.inner(&x, &y);
            let rhs = b.forward(&x).unwrap().dot(&b.forward(&y).unwrap());
            assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn degree_basis_is_conjugated_normalized_identity_basis() {
        let g = Graph::new(
            5,
            vec![(0, 1, 1.0), (1, 2, 2.0), (2, 3, 0.5), (3, 4, 1.5), (0, 4, 1.0), (1, 3, 0.7)],
        )
        .unwrap();
        let bl = gft_basis_hpsd(
            &VariationOperator::laplacian(&g).unwrap(),
            &InnerProduct::degree(&g).unwrap(),
        )
        .unwrap();
        let bn = gft_basis_hpsd(
            &VariationOperator::normalized_laplacian(&g).unwrap(),
            &InnerProduct::identity(5),
        )
        .unwrap();
        for l in 0..5 {
            assert!((bl.freqs()[l] - bn.freqs()[l]).abs() <= 1e-9);
        }
        // no degeneracies on this irregular graph: columns match up to sign
        let d = g.degrees();
        for l in 0..5 {
            let u = bl.mode(l);
            let w = bn.mode(l).zip_map(&d, |vi, di| vi / di.sqrt());
            let diff = (0..5).map(|i| (u[i] - w[i]).abs()).fold(0.0, f64::max);
            let sum = (0..5).map(|i| (u[i] + w[i]).abs()).fold(0.0, f64::max);
            assert!(diff.min(sum) <= 1e-9, "mode {l}: diff {diff}, sum {sum}");
        }
    }

    #[test]
    fn ring_eight_heavy_vertex_keeps_vanishing_modes() {
        // modes of (L, I) that vanish at vertex 0 stay generalized modes
        // after q_0 is changed to 10, with unchanged frequency
        let b = ring8_laplacian_identity_basis();
        let g = ring_graph(8).unwrap();
        let l = g.build_operator(OperatorKind::CombinatorialLaplacian).unwrap();
        let mut qv = DVector::from_element(8, 1.0);
        qv[0] = 10.0;
        let q10 = DMatrix::from_diagonal(&qv);
        for &(a, bb) in &b.diagnostics().degenerate_groups.clone() {
            assert_eq!(bb, a + 1, "ring pairs are two-dimensional");
            let ua = b.mode(a);
            let ub = b.mode(bb);
            // rotate inside the eigenspace so the combination vanishes at 0
            let mut v = &ua * ub[0] - &ub * ua[0];
            let norm = v.norm();
            assert!(norm > 1e-9);
            v /= norm;
            assert!(v[0].abs() <= 1e-12);
            let lam = b.freqs()[a];
            let resid = &l * &v - &q10 * &v * lam;
            assert!(resid.norm() <= 1e-8, "residual {}", resid.norm());
        }
    }

    #[test]
    fn clamp_band_separates_rounding_from_indefiniteness() {
        // L is PSD: raw spectrum stays above −1e−12 and nothing is clamped hard
        let g = ring_graph(12).unwrap();
        let op = VariationOperator::laplacian(&g).unwrap();
        let b = gft_basis_hpsd(&op, &InnerProduct::identity(12)).unwrap();
        let d = b.diagnostics();
        assert!(d.min_raw_eigenvalue.unwrap() >= -1e-12);
        assert!(b.freqs().iter().all(|&f| f >= 0.0));
        // an indefinite matrix must be refused
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let op = VariationOperator::hpsd("indef", m).unwrap();
        assert!(matches!(
            gft_basis_hpsd(&op, &InnerProduct::identity(2)),
            Err(Error::NotPositiveSemidefinite(_))
        ));
    }

    #[test]
    fn fundamental_matrix_example_and_sparsity() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        let q = InnerProduct::custom_diagonal(DVector::from_vec(vec![2.0, 1.0])).unwrap();
        let z = Fundamental::from_dense(&m, &q).unwrap().to_dense();
        let want = DMatrix::from_row_slice(2, 2, &[0.5, -0.5, -1.0, 1.0]);
        assert!((z - want).amax() <= 1e-15);

        // diagonal Q keeps the sparsity pattern of M
        let g = ring_graph(10).unwrap();
        let lcsr = g.laplacian_csr();
        let q = InnerProduct::degree(&g).unwrap();
        let z = Fundamental::from_csr(&lcsr, &q).unwrap();
        assert_eq!(z.nnz(), Some(lcsr.nnz()));

        // spectral synthesis U Λ F equals Q⁻¹M on a full basis
        let op = VariationOperator::laplacian(&g).unwrap();
        let b = gft_basis_hpsd(&op, &q).unwrap();
        let z2 = Fundamental::from_basis(&b).unwrap().to_dense();
        assert!((z.to_dense() - z2).amax() <= 1e-9);
    }

    #[test]
    fn hilbert_map_sends_random_walk_modes_to_normalized_modes() {
        // Remark-1 isometry: if 𝓛 v = λ v then x = D^{−1/2} v satisfies L_RW x = λ x
        let g = ring_graph(6).unwrap();
        let bn = gft_basis_hpsd(
            &VariationOperator::normalized_laplacian(&g).unwrap(),
            &InnerProduct::identity(6),
        )
        .unwrap();
        let lrw = g.build_operator(OperatorKind::RandomWalkLaplacian).unwrap();
        let q = InnerProduct::degree(&g).unwrap();
        for l in 0..6 {
            let v = bn.mode(l);
            let x = q.inv_sqrt_apply(&v);
            let resid = &lrw * &x - &x * bn.freqs()[l];
            assert!(resid.norm() <= 1e-9);
        }
    }

    #[test]
    fn dimension_mismatches_are_rejected() {
        let g = ring_graph(4).unwrap();
        let op = VariationOperator::laplacian(&g).unwrap();
        assert!(gft_basis_hpsd(&op, &InnerProduct::identity(5)).is_err());
        let gtv = VariationOperator::gtv(&g).unwrap();
        assert!(gft_basis_hpsd(&gtv, &InnerProduct::identity(4)).is_err());
    }
}
