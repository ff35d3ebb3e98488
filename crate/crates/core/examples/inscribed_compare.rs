//! Two inscribed polygons with the same combinatorics: shorter edges give a
//! smaller circumradius.

use polyrig::expansion::inscribed_compare;
use polyrig::fixtures::shapes;
use polyrig::linalg::Point;
use polyrig::{Polytope, DEFAULT_TOL};

fn main() -> polyrig::Result<()> {
    let p = shapes::regular_polygon(6, 1.0);
    // Same hexagon pattern on a smaller circle with uneven spacing.
    let angles = [0.0f64, 0.9, 2.0, 3.1, 4.2, 5.2];
    let pts = angles.iter().map(|t| Point::from_row_slice(&[0.8 * t.cos(), 0.8 * t.sin()])).collect();
    let q = Polytope::new(pts, DEFAULT_TOL)?;
    let r = inscribed_compare(&p, &q)?;
    println!("r_P = {:.4}  r_Q = {:.4}", r.radius_p, r.radius_q);
    println!("edges shorter {}  ordering holds {}  congruent {}", r.edges_shorter, r.ordering_holds, r.congruent);
    let same = inscribed_compare(&p, &p)?;
    println!("against itself: equal edges {}  congruent {}", same.equal_edges, same.congruent);
    Ok(())
}
