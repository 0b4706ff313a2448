//! SU(2) Yang–Mills mechanics: the closed-form kernel against the
//! group average and the truncated projector, degree by degree.

use gaugefree::models::su2_ym_model;
use gaugefree::projector::{projector_matrix, ym_closed_form_audit, HaarQuadrature, ProjectorMethod};
use gaugefree::sampling::random_point;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gaugefree::Result<()> {
    let model = su2_ym_model(4, 1.0)?;
    let q = projector_matrix(&model, &ProjectorMethod::Nullspace)?;
    let quad = HaarQuadrature::exact_for_model(&model)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let points: Vec<_> = (0..5)
        .map(|_| (random_point(9, 0.3, &mut rng), random_point(9, 0.3, &mut rng)))
        .collect();
    let audit = ym_closed_form_audit(&model, &q, &quad, &points, 1e-8)?;
    println!("origin: closed form {:.6}, group average {:.6}", audit.origin_closed_form, audit.origin_group_average);
    for d in &audit.degrees {
        println!(
            "degree {}: physical dim {}, max rel diff {:.3e}",
            d.degree, d.physical_dim, d.max_rel_diff
        );
    }
    println!("agrees: {} (max rel diff {:.3e})", audit.agrees, audit.max_rel_diff);
    Ok(())
}
