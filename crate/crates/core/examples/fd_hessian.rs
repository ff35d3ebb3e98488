//! Geometric Izmestiev matrix against second differences of the polar volume.
//!
//! For the square the polar stays combinatorially fixed and the differences
//! agree to rounding. The cube's polar is the octahedron, whose vertices are
//! not simple, and the error shrinks only linearly with the step.

use polyrig::fixtures::shapes;
use polyrig::wachspress::{izmestiev, izmestiev_fd};

fn main() -> polyrig::Result<()> {
    for (name, p) in [("square", shapes::square()), ("cube", shapes::cube())] {
        let exact = izmestiev(&p)?.unnormalized;
        for h in [1e-2, 1e-3, 1e-4] {
            let fd = izmestiev_fd(&p, h)?;
            println!("{name:>6} h = {h:.0e}: max |M - M_fd| = {:.3e}", (&exact - fd).amax());
        }
    }
    Ok(())
}
