//! Random perturbations projected back onto the constraint set, counting
//! feasible embeddings that are not congruent to the reference.

use polyrig::expansion::GraphEmbedding;
use polyrig::fixtures::{self, shapes};
use polyrig::rigidity::{local_probe, probe_embedding};

fn main() -> polyrig::Result<()> {
    for (name, p) in [("square", shapes::square()), ("cube", shapes::cube())] {
        let r = local_probe(&p, 200, 1e-2, 8)?;
        println!(
            "{name:>9}: {}/{} feasible, {} violations, max deviation {:.1e}",
            r.feasible, r.trials, r.violations, r.max_gram_deviation
        );
    }
    let (pent, _) = fixtures::pentagon_exterior();
    let r = probe_embedding(&GraphEmbedding::skeleton(&pent), 200, 1e-1, 8);
    println!(" pentagon: {}/{} feasible, {} violations", r.feasible, r.trials, r.violations);
    Ok(())
}
