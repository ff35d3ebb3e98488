//! Expansion comparison between a polytope skeleton and an embedding with
//! shorter edges, lifted into one more dimension.

use polyrig::expansion::{edge_shrunk_embedding, expansion_compare, GraphEmbedding};
use polyrig::fixtures::shapes;
use polyrig::linalg::Point;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> polyrig::Result<()> {
    let p = shapes::cube();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x = Point::from_row_slice(&[0.1, -0.2, 0.05]);

    let q = edge_shrunk_embedding(&p, 4, &mut rng);
    let r = expansion_compare(&p, &x, &q)?;
    println!("shrunk:   |P| = {:.6}  |q| = {:.6}  slack = {:.3e}", r.p_side.expansion, r.q_side.expansion, r.slack);
    println!(
        "          q terms: edge {:.6}  center {:.6}  trace {:.6}",
        r.q_side.edge_term, r.q_side.center_term, r.q_side.trace_term
    );
    println!("          inequality holds: {}", r.inequality_holds);

    let same = expansion_compare(&p, &x, &GraphEmbedding::skeleton(&p))?;
    println!("identical: slack = {:.1e}  equality detected: {}", same.slack, same.equality_detected);
    Ok(())
}
