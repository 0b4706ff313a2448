//! Degree blocks of the truncated Fock space and the gauge-invariant
//! dimension in each, for the SO(3) vector model.

use gaugefree::models::{constraint_operators, so_n_vector_model, PotentialSpec};
use gaugefree::projector::physical_basis_son;

fn main() -> gaugefree::Result<()> {
    let cutoff = 6;
    let model = so_n_vector_model(3, cutoff, PotentialSpec::Harmonic)?;
    let modes = model.modes();
    let basis = physical_basis_son(3, cutoff)?;
    let constraints = constraint_operators(&model);
    println!("modes = {}, cutoff = {}, dim = {}", modes.num_modes(), cutoff, modes.dim());
    for d in 0..=cutoff {
        println!("degree {d}: {} states", modes.block_size(d));
    }
    println!("invariant monomials: {}", basis.len());
    println!("constraint residual: {:.2e}", basis.max_constraint_residual(&constraints)?);
    println!("gram defect:         {:.2e}", basis.gram_defect());
    Ok(())
}
