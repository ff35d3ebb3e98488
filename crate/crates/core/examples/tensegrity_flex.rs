//! First-order flexes of polytope tensegrities.
//!
//! Edges are cables and origin struts are struts; swapping the kinds gives
//! the dual tensegrity. The cube and 4-cube twists keep every member length
//! to first order.

use polyrig::fixtures::shapes;
use polyrig::rigidity::{build_tensegrity, check_flex, cube_twist_field, first_order_flex, fourcube_twist_field};

fn main() -> polyrig::Result<()> {
    for (name, p) in [("simplex(3)", shapes::simplex(3)), ("cube", shapes::cube()), ("4-cube", shapes::hypercube(4))] {
        for swapped in [false, true] {
            let t = build_tensegrity(&p, swapped)?;
            let f = first_order_flex(&t);
            println!("{name:>10} swapped={swapped:<5} {:?} (slack {:.2e})", f.classification, f.slack);
        }
    }
    let cube = shapes::cube();
    let c = check_flex(&build_tensegrity(&cube, false)?, &cube_twist_field(&cube));
    println!("cube twist: signs ok {}  nontrivial {}  max rate {:.1e}", c.signs_ok, c.nontrivial, max_abs(&c.rates));
    let four = shapes::hypercube(4);
    let c = check_flex(&build_tensegrity(&four, true)?, &fourcube_twist_field(&four));
    println!("4-cube twist: signs ok {}  nontrivial {}  max rate {:.1e}", c.signs_ok, c.nontrivial, max_abs(&c.rates));
    Ok(())
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
