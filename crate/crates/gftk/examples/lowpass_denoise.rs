//! Ideal low-pass denoising with the error split into bias and variance.
//!
//! A smooth signal on a random geometric graph is corrupted with white
//! noise under Q. The analytic Q-MSE of an ideal low-pass filter is
//! bias (discarded signal energy) plus variance (kept noise energy);
//! a Monte-Carlo run over fresh noise draws should land within a few
//! standard errors of it at every cutoff.

use gftk::filter::{ideal_lowpass_response, q_mse, q_mse_monte_carlo, FilterSpec, NoiseModel};
use gftk::gft::gft_basis;
use gftk::graph::knn_graph;
use gftk::operators::{InnerProduct, VariationOperator};
use gftk::seed::rng;
use nalgebra::DVector;
use rand::Rng;

fn main() -> gftk::Result<()> {
    let n = 48;
    let mut r = rng(7);
    let points: Vec<[f64; 2]> = (0..n).map(|_| [r.gen(), r.gen()]).collect();
    let g = knn_graph(&points, 6, 0.3)?;

    let q = InnerProduct::degree(&g)?;
    let b = gft_basis(&VariationOperator::laplacian(&g)?, &q)?;

    // band-limited target: energy only in the lowest 6 modes
    let mut xhat = DVector::zeros(n);
    for l in 0..6 {
        xhat[l] = r.gen_range(-1.0..1.0);
    }
    let x = b.inverse(&xhat)?;

    let noise = NoiseModel::new(q.clone(), 0.25, 99)?;
    println!("cutoff      bias  variance  analytic     monte-carlo");
    for cutoff in [2, 6, 12, 24, n - 1] {
        let spec = FilterSpec::Spectral(ideal_lowpass_response(n, cutoff)?);
        let a = q_mse(&b, &spec, &x, Some(&noise))?;
        let mc = q_mse_monte_carlo(&b, &spec, &x, &noise, 2000)?;
        println!(
            "{cutoff:>6}  {:>8.5}  {:>8.5}  {:>8.5}  {:>8.5} ± {:.5}",
            a.bias, a.variance, a.total, mc.mean, mc.std_error
        );
    }

    // keeping every mode reconstructs x exactly, so only noise remains
    let all = FilterSpec::Spectral(DVector::from_element(n, 1.0));
    let clean = q_mse(&b, &all, &x, None)?;
    println!("noiseless all-pass Q-MSE = {} (exact zero)", clean.total);
    Ok(())
}
