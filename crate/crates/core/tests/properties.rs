//! Randomized invariants. Polytopes are drawn from seeds so that every
//! generated case is a valid input.

use nalgebra::DMatrix;
use polyrig::expansion::{edge_shrunk_embedding, expansion_compare, GraphEmbedding};
use polyrig::fixtures::{self, shapes};
use polyrig::geometry::{polar, volume, Polytope};
use polyrig::linalg::{gram, Point};
use polyrig::reconstruct::factor_gram;
use polyrig::rigidity::{build_tensegrity, central_involution, check_flex, first_order_flex};
use polyrig::wachspress::{izmestiev, wachspress};
use polyrig::DEFAULT_TOL;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn polytope(seed: u64, d: usize) -> Polytope {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(d + 1..=d + 7);
    shapes::random_polytope(d, n, &mut rng)
}

fn interior(p: &Polytope, rng: &mut ChaCha8Rng) -> Point {
    let w: Vec<f64> = (0..p.vertex_count()).map(|_| rng.random_range(0.1..1.0)).collect();
    let s: f64 = w.iter().sum();
    p.vertices().iter().zip(&w).fold(Point::zeros(p.dim()), |acc, (v, wi)| acc + v * (wi / s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn euler_characteristic(seed in any::<u64>(), d in 2usize..=4) {
        let p = polytope(seed, d);
        let chi: i64 = p.f_vector().iter().enumerate().map(|(k, &f)| if k % 2 == 0 { f as i64 } else { -(f as i64) }).sum();
        prop_assert_eq!(chi, 1 - (-1i64).pow(d as u32));
    }

    #[test]
    fn wachspress_reproduces_point(seed in any::<u64>(), d in 2usize..=4) {
        let p = polytope(seed, d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let x = interior(&p, &mut rng);
        let w = wachspress(&p, &x).unwrap();
        prop_assert!((w.normalized.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(w.normalized.iter().all(|&a| a > 0.0));
        prop_assert!((w.reproduce(&p) - &x).norm() < 1e-9 * p.scale());
    }

    #[test]
    fn linear_maps_preserve_coordinates(seed in any::<u64>(), d in 2usize..=3) {
        let p = polytope(seed, d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
        let a = shapes::random_linear_map(d, 0.5, &mut rng);
        let q = p.linear_image(&a).unwrap();
        let mp = izmestiev(&p).unwrap();
        let mq = izmestiev(&q).unwrap();
        prop_assert!((&mp.normalized - &mq.normalized).amax() < 1e-9);
        let ap = wachspress(&p, &Point::zeros(d)).unwrap().normalized;
        let aq = wachspress(&q, &Point::zeros(d)).unwrap().normalized;
        prop_assert!(ap.iter().zip(&aq).all(|(x, y)| (x - y).abs() < 1e-10));
    }

    #[test]
    fn rotations_preserve_the_lattice(seed in any::<u64>(), d in 2usize..=4) {
        let p = polytope(seed, d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 3);
        let r = shapes::random_rotation(d, &mut rng);
        let q = Polytope::new(p.vertices().iter().map(|v| &r * v).collect(), DEFAULT_TOL).unwrap();
        prop_assert_eq!(p.f_vector(), q.f_vector());
        prop_assert_eq!(p.edges(), q.edges());
    }

    #[test]
    fn expansion_identity_and_trace_sign(seed in any::<u64>(), d in 2usize..=3) {
        let p = polytope(seed, d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 4);
        let q = edge_shrunk_embedding(&p, d + 1, &mut rng);
        let x = interior(&p, &mut rng);
        let r = expansion_compare(&p, &x, &q).unwrap();
        let scale = p.scale() * p.scale();
        prop_assert!(r.p_side.identity_error() < 1e-10);
        prop_assert!(r.q_side.identity_error() < 1e-10);
        prop_assert!(r.p_side.trace_term.abs() < 1e-9 * scale);
        prop_assert!(r.q_side.trace_term <= 1e-9 * scale);
        prop_assert!(r.inequality_holds);
    }

    #[test]
    fn involution_is_an_involution(seed in any::<u64>(), d in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = shapes::random_centrally_symmetric(d, rng.random_range(d..=d + 3), &mut rng);
        let m = central_involution(&p).expect("centrally symmetric");
        for (i, &j) in m.iter().enumerate() {
            prop_assert_eq!(m[j], i);
            prop_assert!((p.vertex(i) + p.vertex(j)).norm() < 1e-9 * p.scale());
        }
        prop_assert!(central_involution(&polytope(seed, d)).is_none_or(|m| m.iter().enumerate().all(|(i, &j)| m[j] == i)));
    }

    #[test]
    fn gram_factor_keeps_distances(seed in any::<u64>(), n in 3usize..10, e in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Point> = (0..n).map(|_| shapes::random_unit_vector(e, &mut rng) * rng.random_range(0.1..3.0)).collect();
        let emb = factor_gram(&gram(&pts), 1e-9).unwrap();
        prop_assert!(emb.rank <= e.min(n));
        for i in 0..n {
            for j in 0..n {
                let a = (&pts[i] - &pts[j]).norm();
                let b = (&emb.points[i] - &emb.points[j]).norm();
                prop_assert!((a - b).abs() < 1e-7 * (1.0 + a));
            }
            prop_assert!((pts[i].norm() - emb.points[i].norm()).abs() < 1e-7);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn flexes_are_rotation_invariant(seed in any::<u64>(), d in 2usize..=3, swapped in any::<bool>()) {
        let p = polytope(seed, d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 5);
        let r = shapes::random_rotation(d, &mut rng);
        let q = Polytope::new(p.vertices().iter().map(|v| &r * v).collect(), DEFAULT_TOL).unwrap();
        let tp = build_tensegrity(&p, swapped).unwrap();
        let tq = build_tensegrity(&q, swapped).unwrap();
        let fp = first_order_flex(&tp);
        let fq = first_order_flex(&tq);
        prop_assert_eq!(fp.classification, fq.classification);
        // The rotated flex of P is a flex of the rotated tensegrity.
        let moved: Vec<Point> = fp.flex.iter().map(|v| &r * v).collect();
        let c = check_flex(&tq, &moved);
        prop_assert!(c.signs_ok);
        prop_assert_eq!(c.nontrivial, check_flex(&tp, &fp.flex).nontrivial);
    }

    #[test]
    fn polar_volume_matches_monte_carlo(seed in any::<u64>(), d in 2usize..=3) {
        let p = polytope(seed, d);
        let h = polar(&p).unwrap();
        let exact = volume(&h).unwrap();
        // Bounding box of the polar from its vertices.
        let verts = h.vertices().unwrap();
        let pts = &verts.points;
        let lo: Vec<f64> = (0..d).map(|a| pts.iter().map(|x| x[a]).fold(f64::INFINITY, f64::min)).collect();
        let hi: Vec<f64> = (0..d).map(|a| pts.iter().map(|x| x[a]).fold(f64::NEG_INFINITY, f64::max)).collect();
        let box_vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 6);
        let samples = 40_000;
        let inside = (0..samples)
            .filter(|_| {
                let x = Point::from_iterator(d, (0..d).map(|a| rng.random_range(lo[a]..hi[a])));
                p.vertices().iter().all(|v| v.dot(&x) <= 1.0)
            })
            .count();
        let frac = inside as f64 / samples as f64;
        let estimate = frac * box_vol;
        let sigma = box_vol * (frac * (1.0 - frac) / samples as f64).sqrt();
        prop_assert!((estimate - exact).abs() <= 5.0 * sigma + 1e-12, "exact {} estimate {} sigma {}", exact, estimate, sigma);
    }
}

#[test]
fn corpus_is_deterministic() {
    let a = fixtures::random_corpus(12, 99);
    let b = fixtures::random_corpus(12, 99);
    for (p, q) in a.iter().zip(&b) {
        assert_eq!(p.vertices(), q.vertices());
    }
    let texts = |name: &str| fixtures::generate(name).unwrap().files;
    assert_eq!(texts("pentagon-exterior"), texts("pentagon-exterior"));
}

#[test]
fn isometric_copies_have_equal_gram() {
    let p = shapes::cube();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let r = shapes::random_rotation(4, &mut rng);
    let lift = DMatrix::from_fn(4, 3, |i, j| r[(i, j)]);
    let q = GraphEmbedding::skeleton(&p).mapped(&lift);
    assert!((gram(p.vertices()) - gram(&q.points)).amax() < 1e-12);
}
