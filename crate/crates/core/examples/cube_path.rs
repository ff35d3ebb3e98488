//! The cube's graph laid on a great circle of its circumsphere.
//!
//! Every edge keeps its length and every vertex its norm, yet the embedding
//! is not congruent to the cube. The cone condition fails, so the
//! comparison hypotheses are not enough on their own.

use polyrig::expansion::{congruence_certificate, metric_violations};
use polyrig::fixtures;
use polyrig::linalg::gram;
use polyrig::rigidity::cone_condition;

fn main() -> polyrig::Result<()> {
    let (p, q, signs) = fixtures::cube_path();
    println!("arc step {:.6} deg, signs {signs:?}", fixtures::cube_path_step().to_degrees());
    let edge_err = p.edge_lengths().iter().zip(q.edge_lengths()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("max edge length error {edge_err:.1e}");
    println!("metric violations: {:?}", metric_violations(&p, &q));
    println!("gram deviation {:.3}", (gram(p.vertices()) - gram(&q.points)).amax());
    println!("cone failures at {:?}", cone_condition(&q).failing());
    let cert = congruence_certificate(&p, &q)?;
    println!("witness found: {}", cert.witness().is_some());
    Ok(())
}
