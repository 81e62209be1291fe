//! Inner products and variation operators, the two parameters of the
//! generalized graph Fourier transform.
//!
//! An inner product is a Hermitian positive-definite matrix Q defining
//! ⟨x, y⟩_Q = yᴴQx; all built-in kinds are diagonal, and arbitrary HPD
//! matrices are accepted through [`InnerProduct::general`].
//!
//! A variation operator Δ measures how much a signal changes across the
//! graph. Quadratic kinds carry an HPSD matrix M with Δ(x) = xᴴMx; the
//! non-quadratic kinds (total variation, directed variation and their
//! quadratic directed sibling) are kept as functional forms because no
//! matrix reproduces them.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::sparse::Csr;
use crate::voronoi::{voronoi_areas, Rect};
use nalgebra::{DMatrix, DVector};

const SYM_TOL: f64 = 1e-12;

fn check_symmetric(m: &DMatrix<f64>, what: &str) -> Result<()> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "{what}: non-finite entry"
        )));
    }
    let scale = m.amax().max(1.0);
    for r in 0..m.nrows() {
        for c in (r + 1)..m.ncols() {
            if (m[(r, c)] - m[(c, r)]).abs() > SYM_TOL * scale {
                return Err(Error::NotSymmetric(format!(
                    "{what}: entry ({r}, {c}) differs from ({c}, {r}) by {}",
                    (m[(r, c)] - m[(c, r)]).abs()
                )));
            }
        }
    }
    Ok(())
}

/// Hermitian positive-definite inner-product matrix.
#[derive(Debug, Clone)]
pub enum InnerProduct {
    Diagonal { label: String, q: DVector<f64> },
    General { q: DMatrix<f64>, chol_l: DMatrix<f64> },
}

impl InnerProduct {
    pub fn identity(n: usize) -> InnerProduct {
        InnerProduct::Diagonal {
            label: "identity".into(),
            q: DVector::from_element(n, 1.0),
        }
    }

    /// Q = D. Every vertex must have positive degree.
    pub fn degree(g: &Graph) -> Result<InnerProduct> {
        let d = g.degrees();
        if let Some(i) = (0..g.n()).find(|&i| d[i] <= 0.0) {
            return Err(Error::NotPositiveDefinite(format!(
                "degree inner product: vertex {i} has zero degree"
            )));
        }
        Ok(InnerProduct::Diagonal {
            label: "degree".into(),
            q: d,
        })
    }

    /// Q = I + D, positive definite for any weight assignment.
    pub fn identity_plus_degree(g: &Graph) -> InnerProduct {
        InnerProduct::Diagonal {
            label: "identity-plus-degree".into(),
            q: g.degrees().map(|v| 1.0 + v),
        }
    }

    /// Q = diag(Voronoi cell areas) of the graph's coordinates in `domain`.
    pub fn voronoi(points: &[[f64; 2]], domain: Rect) -> Result<InnerProduct> {
        let areas = voronoi_areas(points, domain)?;
        Ok(InnerProduct::Diagonal {
            label: "voronoi".into(),
            q: DVector::from_vec(areas),
        })
    }

    pub fn custom_diagonal(q: DVector<f64>) -> Result<InnerProduct> {
        if q.is_empty() {
            return Err(Error::InvalidParameter("empty diagonal".into()));
        }
        if let Some(i) = (0..q.len()).find(|&i| !(q[i].is_finite() && q[i] > 0.0)) {
            return Err(Error::NotPositiveDefinite(format!(
                "diagonal entry {i} = {}",
                q[i]
            )));
        }
        Ok(InnerProduct::Diagonal {
            label: "diagonal".into(),
            q,
        })
    }

    /// Arbitrary HPD matrix, validated by a symmetry check and a Cholesky
    /// factorization (which doubles as the stored factor Q = LLᵀ).
    pub fn general(q: DMatrix<f64>) -> Result<InnerProduct> {
        if q.nrows() != q.ncols() || q.is_empty() {
            return Err(Error::InvalidParameter("Q must be square".into()));
        }
        check_symmetric(&q, "inner product")?;
        let sym = (&q + q.transpose()) * 0.5;
        let chol = nalgebra::Cholesky::new(sym.clone()).ok_or_else(|| {
            Error::NotPositiveDefinite("Cholesky factorization failed".into())
        })?;
        Ok(InnerProduct::General {
            q: sym,
            chol_l: chol.l(),
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            InnerProduct::Diagonal { q, .. } => q.len(),
            InnerProduct::General { q, .. } => q.nrows(),
        }
    }

    pub fn label(&self) -> &str {
        match self {
            InnerProduct::Diagonal { label, .. } => label,
            InnerProduct::General { .. } => "general",
        }
    }

    pub fn diagonal(&self) -> Option<&DVector<f64>> {
        match self {
            InnerProduct::Diagonal { q, .. } => Some(q),
            InnerProduct::General { .. } => None,
        }
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        match self {
            InnerProduct::Diagonal { q, .. } => DMatrix::from_diagonal(q),
            InnerProduct::General { q, .. } => q.clone(),
        }
    }

    /// Q x.
    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        match self {
            InnerProduct::Diagonal { q, .. } => x.component_mul(q),
            InnerProduct::General { q, .. } => q * x,
        }
    }

    /// Q⁻¹ x.
    pub fn inv_apply(&self, x: &DVector<f64>) -> DVector<f64> {
        match self {
            InnerProduct::Diagonal { q, .. } => x.component_div(q),
            InnerProduct::General { chol_l, .. } => {
                let y = chol_l
                    .solve_lower_triangular(x)
                    .expect("positive-definite factor");
                chol_l
                    .transpose()
                    .solve_upper_triangular(&y)
                    .expect("positive-definite factor")
            }
        }
    }

    /// ⟨x, y⟩_Q = yᵀ Q x.
    pub fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        y.dot(&self.apply(x))
    }

    /// ‖x‖_Q = √⟨x, x⟩_Q.
    pub fn norm(&self, x: &DVector<f64>) -> f64 {
        self.inner(x, x).max(0.0).sqrt()
    }

    /// The Hilbert-space isometry φ(x) = Q^{1/2} x. For general Q the
    /// symmetric square root is computed by eigendecomposition.
    pub fn sqrt_apply(&self, x: &DVector<f64>) -> DVector<f64> {
        match self {
            InnerProduct::Diagonal { q, .. } => x.zip_map(q, |xi, qi| xi * qi.sqrt()),
            InnerProduct::General { q, .. } => self.general_sqrt(q) * x,
        }
    }

    /// φ⁻¹(y) = Q^{−1/2} y.
    pub fn inv_sqrt_apply(&self, x: &DVector<f64>) -> DVector<f64> {
        match self {
            InnerProduct::Diagonal { q, .. } => x.zip_map(q, |xi, qi| xi / qi.sqrt()),
            InnerProduct::General { q, .. } => {
                let s = self.general_sqrt(q);
                nalgebra::Cholesky::new(s)
                    .map(|c| c.solve(x))
                    .expect("positive-definite square root")
            }
        }
    }

    fn general_sqrt(&self, q: &DMatrix<f64>) -> DMatrix<f64> {
        let eig = nalgebra::SymmetricEigen::new(q.clone());
        let sq = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
        &eig.eigenvectors * DMatrix::from_diagonal(&sq) * eig.eigenvectors.transpose()
    }

    /// Lower Cholesky factor of Q (for diagonal Q, diag(√q)).
    pub fn cholesky_l(&self) -> DMatrix<f64> {
        match self {
            InnerProduct::Diagonal { q, .. } => DMatrix::from_diagonal(&q.map(f64::sqrt)),
            InnerProduct::General { chol_l, .. } => chol_l.clone(),
        }
    }

    /// True when both are diagonal with entrywise-equal values (tolerance
    /// 1e−12 relative), used to detect the flat-spectrum noise shortcut.
    pub fn same_as(&self, other: &InnerProduct) -> bool {
        match (self.diagonal(), other.diagonal()) {
            (Some(a), Some(b)) => {
                a.len() == b.len()
                    && a.iter()
                        .zip(b.iter())
                        .all(|(x, y)| (x - y).abs() <= 1e-12 * x.abs().max(1.0))
            }
            _ => {
                let (a, b) = (self.matrix(), other.matrix());
                a.nrows() == b.nrows() && (&a - &b).amax() <= 1e-12 * a.amax().max(1.0)
            }
        }
    }
}

/// Variation kinds. Quadratic forms carry their matrix; the rest stay
/// functional.
#[derive(Debug, Clone)]
pub enum VariationOperator {
    /// Δ(x) = xᴴ M x with M Hermitian positive-semidefinite.
    Hpsd { name: String, m: DMatrix<f64> },
    /// Graph total variation Σ_i |x_i − [A^norm x]_i|.
    Gtv { a_norm: Csr },
    /// Graph directed variation Σ_{(i,j)} w(ij) [x_i − x_j]_+ over ordered pairs.
    Gdv { n: usize, edges: Vec<(usize, usize, f64)> },
    /// Quadratic directed variation Σ_{(i,j)} w(ji) [x_i − x_j]_+².
    Gqdv { n: usize, edges: Vec<(usize, usize, f64)> },
}

impl VariationOperator {
    /// Wraps an explicit HPSD matrix (symmetry validated here; negative
    /// spectrum is caught by the eigensolver's clamp rules).
    pub fn hpsd(name: impl Into<String>, m: DMatrix<f64>) -> Result<VariationOperator> {
        if m.nrows() != m.ncols() || m.is_empty() {
            return Err(Error::InvalidParameter("M must be square".into()));
        }
        check_symmetric(&m, "variation matrix")?;
        Ok(VariationOperator::Hpsd {
            name: name.into(),
            m: (&m + m.transpose()) * 0.5,
        })
    }

    /// Δ(x) = xᵀLx, the classic quadratic form ½ Σ_{ij} w(ij)(x_i − x_j)².
    pub fn laplacian(g: &Graph) -> Result<VariationOperator> {
        Self::hpsd(
            "laplacian",
            g.build_operator(crate::graph::OperatorKind::CombinatorialLaplacian)?,
        )
    }

    /// Δ(x) = xᵀ𝓛x with 𝓛 the symmetric normalized Laplacian.
    pub fn normalized_laplacian(g: &Graph) -> Result<VariationOperator> {
        Self::hpsd(
            "normalized-laplacian",
            g.build_operator(crate::graph::OperatorKind::NormalizedLaplacian)?,
        )
    }

    /// Quadratic variation ‖x − A^norm x‖², i.e. M = (I − A^norm)ᵀ(I − A^norm).
    pub fn gqv(g: &Graph) -> Result<VariationOperator> {
        let an = g.build_operator(crate::graph::OperatorKind::NormalizedAdjacency)?;
        let b = DMatrix::identity(g.n(), g.n()) - an;
        Self::hpsd("gqv", b.transpose() * &b)
    }

    pub fn gtv(g: &Graph) -> Result<VariationOperator> {
        Ok(VariationOperator::Gtv {
            a_norm: g.normalized_adjacency_csr()?,
        })
    }

    pub fn gdv(g: &Graph) -> VariationOperator {
        VariationOperator::Gdv {
            n: g.n(),
            edges: g.edges().to_vec(),
        }
    }

    pub fn gqdv(g: &Graph) -> VariationOperator {
        VariationOperator::Gqdv {
            n: g.n(),
            edges: g.edges().to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            VariationOperator::Hpsd { m, .. } => m.nrows(),
            VariationOperator::Gtv { a_norm } => a_norm.nrows(),
            VariationOperator::Gdv { n, .. } | VariationOperator::Gqdv { n, .. } => *n,
        }
    }

    pub fn is_hpsd(&self) -> bool {
        matches!(self, VariationOperator::Hpsd { .. })
    }

    pub fn name(&self) -> &str {
        match self {
            VariationOperator::Hpsd { name, .. } => name,
            VariationOperator::Gtv { .. } => "gtv",
            VariationOperator::Gdv { .. } => "gdv",
            VariationOperator::Gqdv { .. } => "gqdv",
        }
    }

    pub fn matrix(&self) -> Option<&DMatrix<f64>> {
        match self {
            VariationOperator::Hpsd { m, .. } => Some(m),
            _ => None,
        }
    }

    /// Δ(x). Always ≥ −1e−12 · scale; tiny negative rounding from the
    /// quadratic form is clamped to zero.
    pub fn value(&self, x: &DVector<f64>) -> f64 {
        let v = match self {
            VariationOperator::Hpsd { m, .. } => x.dot(&(m * x)),
            VariationOperator::Gtv { a_norm } => {
                let ax = a_norm.matvec(x);
                (0..x.len()).map(|i| (x[i] - ax[i]).abs()).sum()
            }
            VariationOperator::Gdv { edges, .. } => edges
                .iter()
                .map(|&(i, j, w)| w * ((x[i] - x[j]).max(0.0) + (x[j] - x[i]).max(0.0)))
                .sum(),
            VariationOperator::Gqdv { edges, .. } => edges
                .iter()
                .map(|&(i, j, w)| {
                    w * ((x[i] - x[j]).max(0.0).powi(2) + (x[j] - x[i]).max(0.0).powi(2))
                })
                .sum(),
        };
        if v < 0.0 && v >= -1e-12 * x.norm_squared().max(1.0) * self.scale() {
            return 0.0;
        }
        v
    }

    fn scale(&self) -> f64 {
        match self {
            VariationOperator::Hpsd { m, .. } => m.amax().max(1.0),
            _ => 1.0,
        }
    }

    /// Smoothed value and gradient for the descent solver. |t| is Huber-
    /// smoothed and [t]_+ softplus-smoothed with parameter `tau`; the
    /// quadratic kinds are differentiable and ignore `tau`.
    pub fn smoothed_value_grad(&self, x: &DVector<f64>, tau: f64) -> (f64, DVector<f64>) {
        match self {
            VariationOperator::Hpsd { m, .. } => {
                let mx = m * x;
                (x.dot(&mx), 2.0 * mx)
            }
            VariationOperator::Gtv { a_norm } => {
                let r = x - a_norm.matvec(x);
                let mut f = 0.0;
                let mut dr = DVector::zeros(x.len());
                for i in 0..x.len() {
                    let (hv, hd) = huber(r[i], tau);
                    f += hv;
                    dr[i] = hd;
                }
                // ∇ = (I − A^norm)ᵀ h'(r); A^norm is symmetric here
                let grad = &dr - a_norm.matvec(&dr);
                (f, grad)
            }
            VariationOperator::Gdv { n, edges } => {
                let mut f = 0.0;
                let mut grad = DVector::zeros(*n);
                for &(i, j, w) in edges {
                    for (a, b) in [(i, j), (j, i)] {
                        let t = x[a] - x[b];
                        let (sv, sd) = softplus(t, tau);
                        f += w * sv;
                        grad[a] += w * sd;
                        grad[b] -= w * sd;
                    }
                }
                (f, grad)
            }
            VariationOperator::Gqdv { n, edges } => {
                let mut f = 0.0;
                let mut grad = DVector::zeros(*n);
                for &(i, j, w) in edges {
                    for (a, b) in [(i, j), (j, i)] {
                        let t = (x[a] - x[b]).max(0.0);
                        f += w * t * t;
                        grad[a] += 2.0 * w * t;
                        grad[b] -= 2.0 * w * t;
                    }
                }
                (f, grad)
            }
        }
    }
}

/// Huber smoothing of |t|: value and derivative.
fn huber(t: f64, tau: f64) -> (f64, f64) {
    if t.abs() <= tau {
        (t * t / (2.0 * tau), t / tau)
    } else {
        (t.abs() - tau / 2.0, t.signum())
    }
}

/// Softplus smoothing of [t]_+ = max(t, 0): τ ln(1 + e^{t/τ}) and its
/// derivative, evaluated without overflow.
fn softplus(t: f64, tau: f64) -> (f64, f64) {
    let u = t / tau;
    if u > 35.0 {
        (t, 1.0)
    } else if u < -35.0 {
        (tau * u.exp(), u.exp())
    } else {
        (tau * u.exp().ln_1p(), 1.0 / (1.0 + (-u).exp()))
    }
}

/// ⟨x, y⟩_Q.
pub fn q_inner(q: &InnerProduct, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    q.inner(x, y)
}

/// ‖x‖_Q.
pub fn q_norm(q: &InnerProduct, x: &DVector<f64>) -> f64 {
    q.norm(x)
}
