//! Physical spectrum of the anharmonic SO(3) vector model as the cutoff
//! grows. Leakage is the weight of each level above the certified band.

use gaugefree::evolution::physical_spectrum;
use gaugefree::models::{hamiltonian, so_n_vector_model, PotentialSpec};
use gaugefree::projector::{projector_matrix, ProjectorMethod};

fn main() -> gaugefree::Result<()> {
    let potential = PotentialSpec::PolynomialInX2 {
        coefficients: vec![0.5, 0.05],
    };
    for cutoff in [8, 10, 12] {
        let model = so_n_vector_model(3, cutoff, potential.clone())?;
        let h = hamiltonian(&model)?;
        let q = projector_matrix(&model, &ProjectorMethod::Nullspace)?;
        let spectrum = physical_spectrum(&h, &q)?;
        println!("cutoff {cutoff} (band {}):", spectrum.band);
        for level in spectrum.levels.iter().take(4) {
            println!(
                "  E = {:.8}  x{}  leakage {:.1e}",
                level.energy, level.degeneracy, level.band_leakage
            );
        }
    }
    Ok(())
}
