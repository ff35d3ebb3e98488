//! The equilibrium stress of a polytope tensegrity.

use polyrig::fixtures::shapes;
use polyrig::linalg::min_eigenvalue;
use polyrig::rigidity::stress_matrix;

fn main() -> polyrig::Result<()> {
    for (name, p) in [("square", shapes::square()), ("cube", shapes::cube()), ("simplex(4)", shapes::simplex(4))] {
        let s = stress_matrix(&p)?;
        println!(
            "{name:>10}: size {}  equilibrium residual {:.1e}  min eigenvalue {:+.3e}",
            s.omega.nrows(),
            s.equilibrium_residual,
            min_eigenvalue(&s.omega)
        );
    }
    Ok(())
}
