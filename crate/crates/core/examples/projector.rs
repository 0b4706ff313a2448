//! The three projector constructions for SO(2) and how far apart they are.

use gaugefree::models::{constraint_operators, so_n_vector_model, PotentialSpec};
use gaugefree::projector::{projector_matrix, HaarQuadrature, ProjectorMethod};

fn main() -> gaugefree::Result<()> {
    let model = so_n_vector_model(2, 8, PotentialSpec::Harmonic)?;
    let constraints = constraint_operators(&model);
    let nullspace = projector_matrix(&model, &ProjectorMethod::Nullspace)?;
    let average = projector_matrix(
        &model,
        &ProjectorMethod::GroupAverage(HaarQuadrature::exact_for_model(&model)?),
    )?;
    let basis = projector_matrix(&model, &ProjectorMethod::ClosedFormBasis)?;

    println!("block dimensions: {:?}", nullspace.block_dimensions());
    for (name, q) in [("nullspace", &nullspace), ("group average", &average), ("monomial basis", &basis)] {
        let laws = q.laws(&constraints);
        println!("{name:>15}: worst law violation {:.2e}", laws.worst());
    }
    println!("nullspace vs average: {:.2e}", nullspace.operator.max_diff(&average.operator)?);
    println!("nullspace vs basis:   {:.2e}", nullspace.operator.max_diff(&basis.operator)?);
    Ok(())
}
