//! Standard polytopes and seeded random generators.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::geometry::{Polytope, DEFAULT_TOL};
use crate::linalg::{centroid, AffineFrame, Point};

fn build(points: Vec<Point>) -> Polytope {
    Polytope::new(points, DEFAULT_TOL).expect("standard shape is a valid polytope")
}

/// The square with vertices `(+-1, +-1)`, listed counter-clockwise from `(1, 1)`.
pub fn square() -> Polytope {
    build(vec![
        Point::from_vec(vec![1.0, 1.0]),
        Point::from_vec(vec![-1.0, 1.0]),
        Point::from_vec(vec![-1.0, -1.0]),
        Point::from_vec(vec![1.0, -1.0]),
    ])
}

/// `[-1, 1]^d`; vertex `k` has coordinate `a` equal to `+1` iff bit `a` of `k` is set.
pub fn hypercube(d: usize) -> Polytope {
    build(hypercube_points(d))
}

pub fn hypercube_points(d: usize) -> Vec<Point> {
    (0..1usize << d)
        .map(|k| Point::from_iterator(d, (0..d).map(|a| if k >> a & 1 == 1 { 1.0 } else { -1.0 })))
        .collect()
}

pub fn cube() -> Polytope {
    hypercube(3)
}

pub fn regular_polygon(k: usize, radius: f64) -> Polytope {
    build(regular_polygon_points(k, radius, 0.0))
}

pub fn regular_polygon_points(k: usize, radius: f64, phase: f64) -> Vec<Point> {
    (0..k)
        .map(|i| {
            let t = phase + std::f64::consts::TAU * i as f64 / k as f64;
            Point::from_vec(vec![radius * t.cos(), radius * t.sin()])
        })
        .collect()
}

pub fn triangle() -> Polytope {
    regular_polygon(3, 1.0)
}

/// Regular simplex in `R^d` with centroid at the origin.
pub fn simplex(d: usize) -> Polytope {
    let lifted: Vec<Point> = (0..=d)
        .map(|i| {
            let mut v = Point::zeros(d + 1);
            v[i] = 1.0;
            v
        })
        .collect();
    let frame = AffineFrame::new(lifted.iter(), 1e-12);
    let pts: Vec<Point> = lifted.iter().map(|p| frame.coordinates(p)).collect();
    let c = centroid(&pts);
    build(pts.into_iter().map(|p| p - &c).collect())
}

pub fn random_unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Point {
    loop {
        let v = Point::from_iterator(d, (0..d).map(|_| StandardNormal.sample(rng)));
        let n = v.norm();
        if n > 1e-3 {
            return v / n;
        }
    }
}

/// Random orthogonal matrix from the QR factorisation of a Gaussian matrix.
pub fn random_rotation<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(d, d, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut q = q;
    for k in 0..d {
        if r[(k, k)] < 0.0 {
            q.column_mut(k).neg_mut();
        }
    }
    q
}

/// Random well-conditioned linear map `I + s G`.
pub fn random_linear_map<R: Rng + ?Sized>(d: usize, spread: f64, rng: &mut R) -> DMatrix<f64> {
    loop {
        let g: DMatrix<f64> = DMatrix::from_fn(d, d, |_, _| StandardNormal.sample(rng));
        let m = DMatrix::identity(d, d) + g * spread;
        let svd = m.clone().svd(false, false);
        if svd.singular_values.min() > 0.3 {
            return m;
        }
    }
}

/// Random polytope with `n` vertices on a random ellipsoid, translated so
/// that a random interior point (well away from the boundary) is the origin.
pub fn random_polytope<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Polytope {
    assert!(n > d, "need more than d points");
    loop {
        let map = random_linear_map(d, 0.3, rng);
        let pts: Vec<Point> = (0..n).map(|_| &map * random_unit_vector(d, rng)).collect();
        let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..1.0)).collect();
        let total: f64 = weights.iter().sum();
        let mut x = Point::zeros(d);
        for (w, p) in weights.iter().zip(&pts) {
            x.axpy(w / total, p, 1.0);
        }
        let pts: Vec<Point> = pts.into_iter().map(|p| p - &x).collect();
        let Ok(poly) = Polytope::new(pts, DEFAULT_TOL) else {
            continue;
        };
        let origin = Point::zeros(d);
        if poly.interior_margin(&origin) > 0.05 * poly.scale() && min_edge(&poly) > 0.02 * poly.scale() {
            return poly;
        }
    }
}

/// Random centrally symmetric polytope with `2k` vertices; vertex `i + k`
/// is the antipode of vertex `i`.
pub fn random_centrally_symmetric<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Polytope {
    loop {
        let map = random_linear_map(d, 0.3, rng);
        let half: Vec<Point> = (0..k).map(|_| &map * random_unit_vector(d, rng)).collect();
        let pts: Vec<Point> = half.iter().cloned().chain(half.iter().map(|p| -p)).collect();
        let Ok(poly) = Polytope::new(pts, DEFAULT_TOL) else {
            continue;
        };
        if min_edge(&poly) > 0.02 * poly.scale() {
            return poly;
        }
    }
}

fn min_edge(p: &Polytope) -> f64 {
    p.edge_lengths().into_iter().fold(f64::INFINITY, f64::min)
}
