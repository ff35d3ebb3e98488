//! Polytopes, their face lattices, generalized polar duals and volumes.

mod hpolytope;
mod polytope;

pub use hpolytope::{HPolytope, HVertices};
pub use polytope::{Facet, Polytope, DEFAULT_TOL};

use crate::error::{Error, Result};
use crate::linalg::Point;

/// `{x : <x, p_i> <= c_i}` for the vertices `p_i` of `polytope`. With all
/// offsets equal to one this is the polar dual.
pub fn generalized_polar(polytope: &Polytope, offsets: &[f64]) -> Result<HPolytope> {
    if offsets.len() != polytope.vertex_count() {
        return Err(Error::DimensionMismatch(format!(
            "{} offsets for {} vertices",
            offsets.len(),
            polytope.vertex_count()
        )));
    }
    if let Some((index, &value)) = offsets.iter().enumerate().find(|(_, &c)| c <= 0.0 || c.is_nan()) {
        return Err(Error::NonpositiveOffset { index, value });
    }
    if !polytope.contains_interior(&Point::zeros(polytope.dim())) {
        return Err(Error::OriginNotInterior);
    }
    HPolytope::new(polytope.vertices().to_vec(), offsets.to_vec())
}

pub fn polar(polytope: &Polytope) -> Result<HPolytope> {
    generalized_polar(polytope, &vec![1.0; polytope.vertex_count()])
}

pub fn volume(h: &HPolytope) -> Result<f64> {
    h.volume()
}

pub fn relative_face_volume(h: &HPolytope, active: &[usize]) -> Result<f64> {
    h.relative_face_volume(active)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::shapes;

    #[test]
    fn polar_of_square_is_cross_polytope() {
        let h = polar(&shapes::square()).unwrap();
        let v = h.vertices().unwrap();
        assert_eq!(v.points.len(), 4);
        for p in &v.points {
            assert!((p[0].abs() + p[1].abs() - 1.0).abs() < 1e-12);
            assert!(p[0].abs() < 1e-12 || p[1].abs() < 1e-12);
        }
        assert!((h.volume().unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn polar_of_cube_is_octahedron() {
        let h = polar(&shapes::cube()).unwrap();
        let v = h.vertices().unwrap();
        assert_eq!(v.points.len(), 6);
        for p in &v.points {
            let mut a: Vec<f64> = p.iter().map(|x| x.abs()).collect();
            a.sort_by(f64::total_cmp);
            assert!(a[0] < 1e-12 && a[1] < 1e-12 && (a[2] - 1.0).abs() < 1e-12);
        }
        assert!((h.volume().unwrap() - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn polar_volume_is_homogeneous() {
        for p in [shapes::square(), shapes::cube(), shapes::simplex(3)] {
            let n = p.vertex_count();
            let d = p.dim() as i32;
            let base = generalized_polar(&p, &vec![1.0; n]).unwrap().volume().unwrap();
            for t in [0.5, 2.0] {
                let v = generalized_polar(&p, &vec![t; n]).unwrap().volume().unwrap();
                assert!((v - t.powi(d) * base).abs() < 1e-12 * base.max(1.0));
            }
        }
    }

    #[test]
    fn face_volumes_of_square_and_cube_polars() {
        let sq = shapes::square();
        let i = sq.vertices().iter().position(|p| p[0] > 0.0 && p[1] > 0.0).unwrap();
        let h = polar(&sq).unwrap();
        assert!((h.relative_face_volume(&[i]).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let (a, b) = sq.edges()[0];
        assert_eq!(h.relative_face_volume(&[a, b]).unwrap(), 1.0);

        let cube = shapes::cube();
        let i = cube.vertices().iter().position(|p| p.iter().all(|&x| x > 0.0)).unwrap();
        let h = polar(&cube).unwrap();
        assert!((h.relative_face_volume(&[i]).unwrap() - 3f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn polar_errors() {
        let sq = shapes::square();
        assert!(matches!(
            generalized_polar(&sq, &[1.0, 1.0, 0.0, 1.0]),
            Err(Error::NonpositiveOffset { index: 2, .. })
        ));
        let shifted = sq.translated(&Point::from_vec(vec![1.0, 0.0]));
        assert!(matches!(polar(&shifted), Err(Error::OriginNotInterior)));
        let h = polar(&sq).unwrap();
        // two opposite vertices of the square share no dual face
        let (a, c) = (0..4)
            .flat_map(|a| (0..4).map(move |c| (a, c)))
            .find(|&(a, c)| a < c && !sq.graph().has_edge(a, c))
            .unwrap();
        assert!(matches!(h.relative_face_volume(&[a, c]), Err(Error::EmptyFace)));
    }

    #[test]
    fn half_plane_is_unbounded() {
        let h = HPolytope::new(vec![Point::from_vec(vec![1.0, 0.0]), Point::from_vec(vec![0.0, 1.0])], vec![1.0, 1.0])
            .unwrap();
        assert!(matches!(h.volume(), Err(Error::Unbounded)));
    }
}
