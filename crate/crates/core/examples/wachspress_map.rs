//! The Wachspress map from a polytope to another embedding of its graph.

use polyrig::expansion::{wachspress_map, GraphEmbedding};
use polyrig::fixtures;
use polyrig::linalg::Point;

fn main() -> polyrig::Result<()> {
    let (oct, star) = fixtures::octagon();
    let own = GraphEmbedding::skeleton(&oct);
    for x in [[0.0, 0.0], [0.4, 0.1], [-0.2, -0.6]] {
        let x = Point::from_row_slice(&x);
        let to_self = wachspress_map(&oct, &own, &x)?;
        let to_star = wachspress_map(&oct, &star, &x)?;
        println!(
            "({:+.2}, {:+.2}) -> self ({:+.4}, {:+.4})  star ({:+.4}, {:+.4})",
            x[0], x[1], to_self[0], to_self[1], to_star[0], to_star[1]
        );
    }
    Ok(())
}
