//! Sliced projected evolution against the spectral one for the harmonic
//! SO(2) vector model, with fitted global and local orders.

use gaugefree::evolution::convergence_study;
use gaugefree::models::{hamiltonian, so_n_vector_model, PotentialSpec};
use gaugefree::projector::{projector_matrix, ProjectorMethod};

fn main() -> gaugefree::Result<()> {
    let model = so_n_vector_model(2, 4, PotentialSpec::Harmonic)?;
    let h = hamiltonian(&model)?;
    let q = projector_matrix(&model, &ProjectorMethod::Nullspace)?;
    let study = convergence_study(&h, &q, 1.0, &[16, 32, 64, 128])?;
    println!("{:>6} {:>12} {:>14} {:>14} {:>14}", "M", "eps", "global", "local", "exp-slices");
    for ((g, l), e) in study.global.iter().zip(&study.local).zip(&study.exact_slices) {
        println!(
            "{:>6} {:>12.6e} {:>14.6e} {:>14.6e} {:>14.6e}",
            g.slices, g.epsilon, g.defect, l.defect, e.defect
        );
    }
    println!("global order p = {:.4} (C = {:.4})", study.global_fit.order, study.global_fit.constant);
    println!("local order  q = {:.4} (C = {:.4})", study.local_fit.order, study.local_fit.constant);
    Ok(())
}
