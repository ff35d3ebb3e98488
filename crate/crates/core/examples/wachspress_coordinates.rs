//! Wachspress coordinates of interior points, and the point they reproduce.

use polyrig::fixtures::shapes;
use polyrig::linalg::Point;
use polyrig::wachspress::wachspress;

fn main() -> polyrig::Result<()> {
    let p = shapes::regular_polygon(5, 1.0);
    for x in [[0.0, 0.0], [0.3, -0.2], [-0.5, 0.1]] {
        let x = Point::from_row_slice(&x);
        let w = wachspress(&p, &x)?;
        let back = w.reproduce(&p);
        let coords: Vec<String> = w.normalized.iter().map(|a| format!("{a:.6}")).collect();
        println!(
            "x = ({:+.2}, {:+.2})  alpha = [{}]  |sum a_i p_i - x| = {:.1e}",
            x[0],
            x[1],
            coords.join(", "),
            (back - &x).norm()
        );
    }
    Ok(())
}
