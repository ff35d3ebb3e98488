//! Congruence from equal edge lengths and vertex norms: the witness search
//! on a centrally symmetric polytope and on a general one.

use polyrig::expansion::{congruence_certificate, CertificateResult, GraphEmbedding};
use polyrig::fixtures::shapes;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> polyrig::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = shapes::random_centrally_symmetric(3, 5, &mut rng);
    let r = shapes::random_rotation(3, &mut rng);
    let q = GraphEmbedding::skeleton(&p).mapped(&r);
    match congruence_certificate(&p, &q)? {
        CertificateResult::Witness { x, gram_deviation, congruent, .. } => {
            println!(
                "symmetric: witness at {:?}, gram deviation {gram_deviation:.1e}, congruent {congruent}",
                x.as_slice()
            )
        }
        CertificateResult::NoWitnessFound { best_value, .. } => {
            println!("symmetric: no witness, best {best_value:.3e}")
        }
    }

    let general = shapes::random_polytope(3, 7, &mut rng);
    let moved = GraphEmbedding::skeleton(&general).mapped(&shapes::random_rotation(3, &mut rng));
    let res = congruence_certificate(&general, &moved)?;
    println!("general: witness {:?}, congruent {}", res.witness().map(|x| x.as_slice().to_vec()), res.is_congruent());
    Ok(())
}
