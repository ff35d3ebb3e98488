//! The Izmestiev matrix of a polytope, its spectrum and the property checks.

use polyrig::fixtures::shapes;
use polyrig::wachspress::{izmestiev, verify_izmestiev};

fn main() -> polyrig::Result<()> {
    for (name, p) in
        [("square", shapes::square()), ("cube", shapes::cube()), ("octagon", shapes::regular_polygon(8, 1.0))]
    {
        let m = izmestiev(&p)?;
        let report = verify_izmestiev(&p, &m);
        println!("{name}: n = {}, {} positive, {} zero", m.n(), m.positive_count(), m.zero_count());
        for (theta, mult) in m.spectrum() {
            println!("  eigenvalue {theta:+.9} x{mult}");
        }
        for c in &report.checks {
            println!("  {:<24} {} ({:.1e})", c.name, if c.passed { "ok" } else { "FAILED" }, c.residual);
        }
    }
    Ok(())
}
