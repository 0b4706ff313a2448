//! The SO(N) projector kernel: closed-form series against the group average
//! and the truncated matrix, at a few random coherent points.

use gaugefree::fock::kernel_eval;
use gaugefree::models::{so_n_vector_model, PotentialSpec};
use gaugefree::projector::{
    kernel_closed_form_son, kernel_closed_form_son_partial, kernel_group_average, projector_matrix, HaarQuadrature,
    ProjectorMethod,
};
use gaugefree::sampling::random_pair_uv_bounded;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gaugefree::Result<()> {
    let (n, cutoff) = (3, 12);
    let model = so_n_vector_model(n, cutoff, PotentialSpec::Harmonic)?;
    let q = projector_matrix(&model, &ProjectorMethod::Nullspace)?;
    let quad = HaarQuadrature::so3_euler(40, 40)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    println!("{:>10} {:>12} {:>12} {:>12}", "|uv|", "series", "avg-series", "matrix-part");
    for _ in 0..5 {
        let (astar, a) = random_pair_uv_bounded(n, 1.0, &mut rng);
        let uv = (astar.dot(&astar) * a.dot(&a)).norm();
        let full = kernel_closed_form_son(&astar, &a, n)?;
        let avg = kernel_group_average(&astar, &a, &model, &quad)?.value;
        let partial = kernel_closed_form_son_partial(&astar, &a, n, cutoff)?;
        let matrix = kernel_eval(&q.operator, &astar, &a)?;
        println!(
            "{uv:>10.4} {:>12.4e} {:>12.2e} {:>12.2e}",
            full.norm(),
            (avg - full).norm(),
            (matrix - partial).norm()
        );
    }
    Ok(())
}
