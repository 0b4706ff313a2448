//! SO(4) group average with Haar-random rotations: the Monte Carlo projector
//! approaches the exact one at the expected rate.

use gaugefree::models::{so_n_vector_model, PotentialSpec};
use gaugefree::projector::{projector_matrix, HaarQuadrature, ProjectorMethod};

fn main() -> gaugefree::Result<()> {
    let model = so_n_vector_model(4, 4, PotentialSpec::Harmonic)?;
    let exact = projector_matrix(&model, &ProjectorMethod::Nullspace)?;
    for samples in [250, 1000, 4000, 16000] {
        let quad = HaarQuadrature::so_n_montecarlo(4, samples, 11)?;
        let q = projector_matrix(&model, &ProjectorMethod::GroupAverage(quad))?;
        let err = q.operator.max_diff(&exact.operator)?;
        println!("{samples:>6} samples: max deviation {err:.3e}, scaled by sqrt(n) {:.3}", err * (samples as f64).sqrt());
    }
    Ok(())
}
