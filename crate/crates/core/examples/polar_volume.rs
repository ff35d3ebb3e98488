//! Volume of the polar dual and of its facets.
//!
//! The polar of the unit square is the cross-polytope `|x| + |y| <= 1`.

use polyrig::fixtures::shapes;
use polyrig::geometry::{polar, relative_face_volume, volume};

fn main() -> polyrig::Result<()> {
    for (name, p) in [("square", shapes::square()), ("cube", shapes::cube()), ("simplex(4)", shapes::simplex(4))] {
        let h = polar(&p)?;
        let vol = volume(&h)?;
        let facet = relative_face_volume(&h, &[0])?;
        println!("{name:>10}: vol P° = {vol:.12}  facet 0 = {facet:.12}");
    }
    Ok(())
}
