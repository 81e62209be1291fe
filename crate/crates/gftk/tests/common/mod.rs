//! Shared random instances for the integration suites.

use gftk::graph::Graph;
use gftk::operators::InnerProduct;
use gftk::seed::rng;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Connected weighted graph: random spanning tree plus extra edges.
pub fn random_connected_graph(r: &mut ChaCha8Rng, n: usize, extra: usize) -> Graph {
    assert!(n >= 2);
    let mut edges = Vec::new();
    for v in 1..n {
        let u = r.gen_range(0..v);
        edges.push((u, v, r.gen_range(0.2..2.0)));
    }
    let mut have: std::collections::HashSet<(usize, usize)> =
        edges.iter().map(|&(u, v, _)| (u, v)).collect();
    for _ in 0..extra {
        let u = r.gen_range(0..n);
        let v = r.gen_range(0..n);
        let key = (u.min(v), u.max(v));
        if u != v && !have.contains(&key) {
            have.insert(key);
            edges.push((key.0, key.1, r.gen_range(0.2..2.0)));
        }
    }
    Graph::new(n, edges).expect("valid random graph")
}

pub fn random_diagonal_q(r: &mut ChaCha8Rng, n: usize) -> InnerProduct {
    let d = DVector::from_fn(n, |_, _| r.gen_range(0.2..3.0));
    InnerProduct::custom_diagonal(d).expect("positive diagonal")
}

/// Well-conditioned random SPD matrix.
pub fn random_general_q(r: &mut ChaCha8Rng, n: usize) -> InnerProduct {
    let a = DMatrix::from_fn(n, n, |_, _| r.gen_range(-1.0..1.0) / (n as f64).sqrt());
    let q = &a * a.transpose() + DMatrix::identity(n, n) * 0.5;
    InnerProduct::general(q).expect("SPD by construction")
}

pub fn random_signal(r: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| r.gen_range(-1.0..1.0))
}

pub fn test_rng(seed: u64) -> ChaCha8Rng {
    rng(seed)
}
