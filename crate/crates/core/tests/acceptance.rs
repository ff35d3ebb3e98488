//! Acceptance checks, one test per criterion. Each prints a single
//! `criterion N: PASS|FAIL ...` line before asserting.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use polyrig::expansion::{
    congruence_certificate, edge_shrunk_embedding, expansion_compare, CertificateResult, GraphEmbedding,
};
use polyrig::fixtures::{self, shapes};
use polyrig::geometry::{polar, volume, Polytope};
use polyrig::io::{read_embedding, read_polytope};
use polyrig::linalg::Point;
use polyrig::reconstruct::{dual_certificate, problem_data, reconstruct, SolverOptions};
use polyrig::rigidity::{
    build_tensegrity, check_flex, cone_condition, cube_twist_field, first_order_flex, fourcube_twist_field,
    local_probe, FlexClass, MemberKind,
};
use polyrig::wachspress::{izmestiev, izmestiev_fd, verify_izmestiev};
use polyrig::DEFAULT_TOL;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: u32, passed: bool, detail: String) {
    println!("criterion {n}: {} {detail}", if passed { "PASS" } else { "FAIL" });
    assert!(passed, "criterion {n}: {detail}");
}

#[test]
fn criterion_1_izmestiev_properties() {
    let start = Instant::now();
    let mut set = fixtures::random_corpus(200, 7);
    set.extend([shapes::square(), shapes::cube(), shapes::simplex(2), shapes::simplex(3), shapes::simplex(4)]);
    let (mut failures, mut worst) = (Vec::new(), 0.0f64);
    for (k, p) in set.iter().enumerate() {
        assert!((2..=4).contains(&p.dim()) && p.vertex_count() <= 16);
        let r = izmestiev(p).map(|d| verify_izmestiev(p, &d));
        match r {
            Ok(r) if r.all_passed() => worst = worst.max(r.max_residual()),
            _ => failures.push(k),
        }
    }
    let elapsed = start.elapsed();
    let ok = failures.is_empty() && worst <= 1e-8 && elapsed <= Duration::from_secs(60);
    report(
        1,
        ok,
        format!(
            "{} polytopes, failures {failures:?}, max residual {worst:.2e}, {:.2} s",
            set.len(),
            elapsed.as_secs_f64()
        ),
    );
}

/// Second differences lose about `eps * vol / h^2` to rounding; below a
/// generous multiple of that the convergence ratio is noise.
fn rounding_floor(p: &Polytope, h: f64) -> f64 {
    let v = volume(&polar(p).unwrap()).unwrap();
    1e3 * f64::EPSILON * (1.0 + v) / (h * h)
}

#[test]
fn criterion_2_finite_difference_oracle() {
    let mut set: Vec<(String, Polytope)> = vec![
        ("square".into(), shapes::square()),
        ("triangle".into(), shapes::triangle()),
        ("simplex3".into(), shapes::simplex(3)),
        ("cube".into(), shapes::cube()),
        ("octagon".into(), fixtures::octagon().0),
    ];
    for (k, p) in fixtures::random_corpus(24, 2024).into_iter().enumerate() {
        if p.dim() <= 3 {
            set.push((format!("corpus-{k:03}"), p));
        }
    }
    let (h, half) = (1e-3, 5e-4);
    let mut failing = Vec::new();
    for (name, p) in &set {
        let m = izmestiev(p).unwrap().unnormalized;
        let e1 = (izmestiev_fd(p, h).unwrap() - &m).amax();
        let e2 = (izmestiev_fd(p, half).unwrap() - &m).amax();
        let converges = e1 / e2 >= 3.5 || e1.max(e2) <= rounding_floor(p, half);
        if !(e1 <= 1e-5 && converges) {
            failing.push(format!("{name} (err {e1:.2e} at h, {e2:.2e} at h/2, ratio {:.2})", e1 / e2));
        }
    }
    report(2, failing.is_empty(), format!("{} polytopes, failing: {failing:?}", set.len()));
}

#[test]
fn criterion_3_square_closed_form() {
    let sq = shapes::square();
    let d = izmestiev(&sq).unwrap();
    // Vertices run around the cycle, so i and i+1 mod 4 are adjacent.
    let expected = DMatrix::from_fn(4, 4, |i, j| if (i + 1) % 4 == j || (j + 1) % 4 == i { 0.5 } else { 0.0 });
    let m_err = (&d.unnormalized - &expected).amax();
    let eig = nalgebra::SymmetricEigen::new(d.unnormalized.clone()).eigenvalues;
    let mut eig: Vec<f64> = eig.iter().copied().collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    let eig_err = eig.iter().zip([1.0, 0.0, 0.0, -1.0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let alpha = polyrig::wachspress::wachspress(&sq, &Point::zeros(2)).unwrap().normalized;
    let alpha_err = alpha.iter().map(|a| (a - 0.25).abs()).fold(0.0, f64::max);
    let ok = m_err <= 1e-10 && eig_err <= 1e-10 && alpha_err <= 1e-10;
    report(3, ok, format!("matrix err {m_err:.1e}, eigenvalue err {eig_err:.1e}, alpha err {alpha_err:.1e}"));
}

fn interior_point<R: Rng>(p: &Polytope, rng: &mut R) -> Point {
    let w: Vec<f64> = (0..p.vertex_count()).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = w.iter().sum();
    p.vertices().iter().zip(&w).fold(Point::zeros(p.dim()), |acc, (v, wi)| acc + v * (wi / total))
}

#[test]
fn criterion_4_expansion_monotonicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut violations, mut min_slack) = (0, f64::INFINITY);
    for _ in 0..1000 {
        let d = rng.random_range(2..=3);
        let n = rng.random_range(d + 1..=d + 6);
        let p = shapes::random_polytope(d, n, &mut rng);
        let x = interior_point(&p, &mut rng);
        let ambient = d + rng.random_range(0..=1);
        let q = edge_shrunk_embedding(&p, ambient, &mut rng);
        let r = expansion_compare(&p, &x, &q).unwrap();
        assert!(r.edges_dominated);
        min_slack = min_slack.min(r.slack);
        if r.slack < -1e-9 {
            violations += 1;
        }
    }
    let mut missed_equality = 0;
    for _ in 0..100 {
        let d = rng.random_range(2..=3);
        let p = shapes::random_polytope(d, rng.random_range(d + 1..=d + 6), &mut rng);
        let e = d + rng.random_range(0..=1);
        let rot = shapes::random_rotation(e, &mut rng);
        let lift = DMatrix::from_fn(e, d, |r, c| rot[(r, c)]);
        let shift = shapes::random_unit_vector(e, &mut rng) * rng.random_range(0.0..2.0);
        let q = GraphEmbedding::skeleton(&p).mapped(&lift).translated(&shift);
        let r = expansion_compare(&p, &interior_point(&p, &mut rng), &q).unwrap();
        if !(r.equality_detected && r.slack.abs() <= 1e-9) {
            missed_equality += 1;
        }
    }
    let ok = violations == 0 && missed_equality == 0;
    report(
        4,
        ok,
        format!("1000 shrink trials, {violations} violations, min slack {min_slack:.3e}; 100 isometric images, {missed_equality} equalities missed"),
    );
}

#[test]
fn criterion_5_cube_path() {
    let dir = tempfile::tempdir().unwrap();
    fixtures::generate("cube-path").unwrap().write(dir.path()).unwrap();
    let cube = read_polytope(&dir.path().join("cube.json"), DEFAULT_TOL).unwrap();
    let q = read_embedding(&dir.path().join("cube-path.json"), DEFAULT_TOL).unwrap();
    assert_eq!(&q.graph, cube.graph());

    let step = (2.0 * (1.0 / 3f64.sqrt()).asin()).to_degrees();
    let chord = q
        .graph
        .edges()
        .iter()
        .map(|&(i, j)| (q.points[i].dot(&q.points[j]) / 3.0).clamp(-1.0, 1.0).acos().to_degrees())
        .fold(0.0, f64::max);
    let len_err = q.edge_lengths().iter().map(|l| (l - 2.0).abs()).fold(0.0, f64::max);
    let norm_err = q.points.iter().map(|x| (x.norm() - 3f64.sqrt()).abs()).fold(0.0, f64::max);
    // Points on a circle surround the centre iff no angular gap reaches pi.
    let mut angles: Vec<f64> = q.points.iter().map(|x| x[1].atan2(x[0])).collect();
    angles.sort_by(f64::total_cmp);
    let wrap = angles[0] + 2.0 * PI - angles[angles.len() - 1];
    let max_gap = angles.windows(2).map(|w| w[1] - w[0]).fold(wrap, f64::max);
    let failing = cone_condition(&q).failing();
    let ok = (step - 70.5287).abs() <= 1e-4
        && (chord - 70.5287).abs() <= 1e-4
        && len_err <= 1e-9
        && norm_err <= 1e-9
        && max_gap < PI - 1e-9
        && !failing.is_empty();
    report(
        5,
        ok,
        format!(
            "step {step:.6} deg, realised {chord:.6} deg, length err {len_err:.1e}, norm err {norm_err:.1e}, max gap {:.2} deg, cone failures at {failing:?}",
            max_gap.to_degrees()
        ),
    );
}

#[test]
fn criterion_6_dual_certificate() {
    let corpus = fixtures::random_corpus(200, 7);
    let (mut worst_gap, mut worst_eig, mut max_mu, mut bad) = (0.0f64, 0.0f64, 0.0f64, 0);
    for p in &corpus {
        let c = dual_certificate(p).unwrap();
        worst_gap = worst_gap.max(c.gap.abs());
        worst_eig = worst_eig.min(c.min_eigenvalue);
        max_mu = max_mu.max(c.mu);
        if !(c.gap.abs() <= 1e-8 && c.min_eigenvalue >= -1e-9 && c.mu <= 2f64.powi(60)) {
            bad += 1;
        }
    }
    report(
        6,
        bad == 0,
        format!(
            "{} polytopes, {bad} failing, max gap {worst_gap:.1e}, min eigenvalue {worst_eig:.1e}, max mu {max_mu}",
            corpus.len()
        ),
    );
}

#[test]
fn criterion_7_reconstruction() {
    let opts = SolverOptions::default();
    let fixed = [("cube", shapes::cube()), ("triangle", shapes::triangle())].map(|(name, p)| {
        let (g, l, a) = problem_data(&p).unwrap();
        let ok = reconstruct(&g, &l, &a, Some(&p), opts).is_ok_and(|r| r.reference.unwrap().equivalent);
        (name, ok)
    });
    let (mut ok, mut slowest) = (0, Duration::ZERO);
    let mut failed = Vec::new();
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(5..=12);
        let p = shapes::random_polytope(3, n, &mut rng);
        let (g, l, a) = problem_data(&p).unwrap();
        let start = Instant::now();
        let res = reconstruct(&g, &l, &a, Some(&p), opts);
        let t = start.elapsed();
        slowest = slowest.max(t);
        if res.is_ok_and(|r| r.reference.unwrap().equivalent) && t <= Duration::from_secs(10) {
            ok += 1;
        } else {
            failed.push(seed);
        }
    }
    let pass = ok >= 95 && fixed.iter().all(|f| f.1);
    report(
        7,
        pass,
        format!(
            "{ok}/100 recovered (failed seeds {failed:?}), slowest {:.2} s, fixed {fixed:?}",
            slowest.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_8_rigidity_fixtures() {
    let simplex = build_tensegrity(&shapes::simplex(3), false).unwrap();
    let simplex_ok = first_order_flex(&simplex).classification == FlexClass::TrivialOnly;

    let cube = shapes::cube();
    let t = build_tensegrity(&cube, true).unwrap();
    let found = first_order_flex(&t);
    let twist = check_flex(&t, &cube_twist_field(&cube));
    // Struts may only lengthen, cables only shorten.
    let signs = |rates: &[f64]| {
        t.members.iter().zip(rates).all(|(m, r)| match m.kind {
            MemberKind::Strut => *r >= -1e-12,
            MemberKind::Cable => *r <= 1e-12,
            MemberKind::Bar => r.abs() <= 1e-12,
        })
    };
    let cube_ok = found.classification == FlexClass::NontrivialFlex
        && signs(&found.rates)
        && check_flex(&t, &found.flex).nontrivial
        && twist.nontrivial
        && signs(&twist.rates);

    let four = shapes::hypercube(4);
    let t4 = build_tensegrity(&four, true).unwrap();
    let c4 = check_flex(&t4, &fourcube_twist_field(&four));
    let four_ok = c4.signs_ok && c4.nontrivial;

    let probes = [
        ("cube", local_probe(&cube, 1000, 1e-2, 8).unwrap()),
        ("square", local_probe(&shapes::square(), 1000, 1e-2, 8).unwrap()),
    ];
    let probe_ok = probes.iter().all(|(_, r)| r.violations == 0);
    let detail = probes
        .iter()
        .map(|(n, r)| format!("{n} {}/{} feasible, {} violations", r.feasible, r.trials, r.violations))
        .collect::<Vec<_>>()
        .join("; ");
    report(
        8,
        simplex_ok && cube_ok && four_ok && probe_ok,
        format!("simplex trivial {simplex_ok}, cube twist {cube_ok}, 4-cube twist {four_ok}, probes: {detail}"),
    );
}

#[test]
fn criterion_9_centrally_symmetric_congruence() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures = Vec::new();
    for k in 0..50 {
        let d = 2 + k % 2;
        let p = shapes::random_centrally_symmetric(d, rng.random_range(d..=d + 3), &mut rng);
        let e = d + rng.random_range(0..=1);
        let rot = shapes::random_rotation(e, &mut rng);
        let lift = DMatrix::from_fn(e, d, |r, c| rot[(r, c)]);
        let q = GraphEmbedding::skeleton(&p).mapped(&lift);
        match congruence_certificate(&p, &q) {
            Ok(CertificateResult::Witness { x, congruent: true, .. }) if x.norm() <= 1e-12 => {}
            other => failures.push(format!("{k}: {other:?}")),
        }
    }
    report(9, failures.is_empty(), format!("50 instances, failures {failures:?}"));
}
