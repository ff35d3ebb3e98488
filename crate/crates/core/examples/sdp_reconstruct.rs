//! Recovers a polytope up to affine maps from its graph, edge lengths and
//! the Wachspress coordinates of an interior point.

use polyrig::fixtures::shapes;
use polyrig::reconstruct::{problem_data, reconstruct, SolverOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> polyrig::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for p in [shapes::cube(), shapes::random_polytope(3, 9, &mut rng)] {
        let (graph, lengths, alpha) = problem_data(&p)?;
        let r = reconstruct(&graph, &lengths, &alpha, Some(&p), SolverOptions::default())?;
        let s = &r.solution;
        println!(
            "n = {}  iterations {}  rank {}  objective {:.9}",
            p.vertex_count(),
            s.iterations,
            r.dimension,
            s.objective
        );
        if let Some(check) = &r.reference {
            println!(
                "  affine residuals {:.1e} / {:.1e}  equivalent {}",
                check.forward_residual, check.backward_residual, check.equivalent
            );
        }
    }
    Ok(())
}
