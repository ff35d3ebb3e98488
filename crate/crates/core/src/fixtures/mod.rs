//! Named fixtures: configurations built from stated geometric constraints,
//! written as JSON files together with a manifest of expected values that
//! [`measure`] recomputes from the files.

pub mod shapes;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expansion::{alpha_expansion, GraphEmbedding};
use crate::geometry::{Polytope, DEFAULT_TOL};
use crate::graph::EdgeGraph;
use crate::io::{self, EmbeddingFile, PolytopeFile, ProblemFile};
use crate::linalg::{affine_rank, gram, max_abs, Point};
use crate::lp::positive_combination_margin;
use crate::rigidity::{
    build_tensegrity, central_involution, check_flex, cone_condition, cube_twist_field, first_order_flex,
    fourcube_twist_field, FlexClass,
};

pub const FIXTURE_NAMES: [&str; 7] =
    ["cube-path", "octagon", "pentagon-exterior", "cube-twist", "fourcube-twist", "pyramid-codim3", "random-corpus"];

/// Arc spanned by a cube edge on the circle of radius `sqrt(3)`.
pub fn cube_path_step() -> f64 {
    2.0 * (1.0 / 3f64.sqrt()).asin()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expected {
    pub quantity: String,
    pub value: f64,
    pub tolerance: f64,
    /// How the value is known: `closed-form`, `construction` or `published`.
    pub basis: String,
}

fn expect(quantity: &str, value: f64, tolerance: f64, basis: &str) -> Expected {
    Expected { quantity: quantity.into(), value, tolerance, basis: basis.into() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub fixture: String,
    pub files: Vec<String>,
    pub expected: Vec<Expected>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlexFile {
    pub swapped: bool,
    pub velocities: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct FixtureSet {
    pub name: String,
    /// File name and contents.
    pub files: Vec<(String, String)>,
    pub expected: Vec<Expected>,
}

impl FixtureSet {
    pub fn manifest(&self) -> Manifest {
        Manifest {
            fixture: self.name.clone(),
            files: self.files.iter().map(|(n, _)| n.clone()).collect(),
            expected: self.expected.clone(),
        }
    }

    /// Writes every file plus `manifest.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        for (name, text) in &self.files {
            let path = dir.join(name);
            std::fs::write(&path, text)?;
            out.push(path);
        }
        let path = dir.join("manifest.json");
        io::write_json(&path, &self.manifest())?;
        out.push(path);
        Ok(out)
    }
}

fn bool_value(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn polytope_text(p: &Polytope) -> Result<String> {
    io::to_json(&PolytopeFile::from_polytope(p))
}

fn embedding_text(q: &GraphEmbedding) -> Result<String> {
    io::to_json(&EmbeddingFile::from_embedding(q))
}

/// The cube `[-1,1]^3` and an embedding of its graph on the circle of radius
/// `sqrt(3)`: vertex `v` sits at angle `beta * sum_a s_a v_a` where `v_a` are
/// the bits of `v`. The sign vector `s` is the first, in lexicographic
/// order, whose points contain the origin in the interior of their hull.
pub fn cube_path() -> (Polytope, GraphEmbedding, [i8; 3]) {
    let cube = shapes::cube();
    let beta = cube_path_step();
    let r = 3f64.sqrt();
    for code in 0..8u8 {
        let s: [i8; 3] = std::array::from_fn(|a| if code >> (2 - a) & 1 == 0 { 1 } else { -1 });
        let points: Vec<Point> = (0..8usize)
            .map(|v| {
                let k: f64 = (0..3).map(|a| s[a] as f64 * ((v >> a) & 1) as f64).sum();
                let t = beta * k;
                Point::from_vec(vec![r * t.cos(), r * t.sin()])
            })
            .collect();
        let zero = Point::zeros(2);
        let inside = affine_rank(&points, 1e-9) == 2
            && positive_combination_margin(&points, &zero, true, 1.0).is_some_and(|m| m > 1e-9);
        if inside {
            let q = GraphEmbedding { graph: cube.graph().clone(), points };
            return (cube, q, s);
        }
    }
    unreachable!("the all-plus signs already surround the origin")
}

/// The regular octagon and the star embedding `q_i` at angle `3 pi i / 4`.
pub fn octagon() -> (Polytope, GraphEmbedding) {
    let p = shapes::regular_polygon(8, 1.0);
    let points = (0..8)
        .map(|i| {
            let t = 3.0 * PI * i as f64 / 4.0;
            Point::from_vec(vec![t.cos(), t.sin()])
        })
        .collect();
    let q = GraphEmbedding { graph: p.graph().clone(), points };
    (p, q)
}

fn polar_point(r: f64, t: f64) -> Point {
    Point::from_vec(vec![r * t.cos(), r * t.sin()])
}

/// Convex polygon whose boundary runs through the points in the given order.
fn convex_in_order(pts: &[Point]) -> bool {
    let n = pts.len();
    let cross = |a: &Point, b: &Point, c: &Point| (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
    let turns: Vec<f64> = (0..n).map(|i| cross(&pts[i], &pts[(i + 1) % n], &pts[(i + 2) % n])).collect();
    let same_sign = turns.iter().all(|&t| t > 1e-3) || turns.iter().all(|&t| t < -1e-3);
    let winding: f64 = (0..n)
        .map(|i| {
            let a = &pts[(i + 1) % n] - &pts[i];
            let b = &pts[(i + 2) % n] - &pts[(i + 1) % n];
            (a[0] * b[1] - a[1] * b[0]).atan2(a.dot(&b))
        })
        .sum();
    same_sign && (winding.abs() - 2.0 * PI).abs() < 1e-6
}

/// Two convex pentagons with the origin outside, equal edge lengths and
/// equal vertex-origin distances, that are not congruent. Vertices are
/// placed by polar coordinates with `theta_2 - theta_1 = theta_3 - theta_4`;
/// rotating `v_2, v_3` about the origin by `-2 (theta_2 - theta_1)` then
/// keeps every edge length. The first seeded sample where both pentagons
/// are convex, exclude the origin and differ is returned.
pub fn pentagon_exterior() -> (Polytope, GraphEmbedding) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    loop {
        let r: Vec<f64> = (0..5).map(|_| rng.random_range(1.0..4.0)).collect();
        let (t0, t1, t3) = (rng.random_range(-0.6..0.6), rng.random_range(-0.6..0.6), rng.random_range(-0.6..0.6));
        let delta = rng.random_range(-0.5..0.5);
        let theta = [t0, t1, t1 + delta, t3, t3 - delta];
        let p: Vec<Point> = (0..5).map(|i| polar_point(r[i], theta[i])).collect();
        let mut theta_q = theta;
        theta_q[2] -= 2.0 * delta;
        theta_q[3] -= 2.0 * delta;
        let q: Vec<Point> = (0..5).map(|i| polar_point(r[i], theta_q[i])).collect();
        if !convex_in_order(&p) || !convex_in_order(&q) {
            continue;
        }
        let zero = Point::zeros(2);
        let outside = |pts: &[Point]| positive_combination_margin(pts, &zero, true, 1.0).is_none();
        if !outside(&p) || !outside(&q) {
            continue;
        }
        if max_abs(&(gram(&p) - gram(&q))) < 0.1 {
            continue;
        }
        let Ok(poly) = Polytope::new(p, DEFAULT_TOL) else { continue };
        let cycle = EdgeGraph::new(5, (0..5).map(|i| (i, (i + 1) % 5))).expect("cycle");
        if *poly.graph() != cycle {
            continue;
        }
        return (poly, GraphEmbedding { graph: cycle, points: q });
    }
}

/// Pyramids over the two exterior-origin pentagons lifted to height one,
/// with apex at the origin.
pub fn pyramid_codim3() -> (Polytope, Polytope) {
    let (p, q) = pentagon_exterior();
    let lift = |pts: &[Point]| -> Vec<Point> {
        let mut out: Vec<Point> = pts.iter().map(|x| Point::from_vec(vec![x[0], x[1], 1.0])).collect();
        out.push(Point::zeros(3));
        out
    };
    let pp = Polytope::new(lift(p.vertices()), DEFAULT_TOL).expect("pyramid");
    let qq = Polytope::new(lift(&q.points), DEFAULT_TOL).expect("pyramid");
    (pp, qq)
}

/// Seeded random polytopes in dimensions 2, 3 and 4 with the origin inside.
pub fn random_corpus(count: usize, seed: u64) -> Vec<Polytope> {
    (0..count)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1_000_003).wrapping_add(k as u64));
            let d = 2 + k % 3;
            let n = rng.random_range(d + 2..=(d + 8).min(14));
            shapes::random_polytope(d, n, &mut rng)
        })
        .collect()
}

fn problem_file(p: &Polytope) -> Result<ProblemFile> {
    let (graph, lengths, alpha) = crate::reconstruct::problem_data(p)?;
    Ok(ProblemFile {
        n: graph.vertex_count(),
        edges: graph.edges().iter().map(|&(i, j)| [i, j]).collect(),
        lengths,
        alpha,
    })
}

const CORPUS_SIZE: usize = 24;

pub fn generate(name: &str) -> Result<FixtureSet> {
    let mut files = Vec::new();
    let mut expected = Vec::new();
    match name {
        "cube-path" => {
            let (cube, q, _) = cube_path();
            files.push(("cube.json".into(), polytope_text(&cube)?));
            files.push(("cube-path.json".into(), embedding_text(&q)?));
            let mean_sq = crate::linalg::centroid(&q.points).norm_squared();
            expected.extend([
                expect("arc_step_degrees", 70.5287, 1e-4, "published"),
                expect("max_edge_length_error", 0.0, 1e-9, "closed-form"),
                expect("max_norm_error", 0.0, 1e-9, "closed-form"),
                expect("origin_in_hull", 1.0, 0.0, "construction"),
                expect("cone_condition_everywhere", 0.0, 0.0, "construction"),
                expect("expansion_sq_polytope", 3.0, 1e-9, "closed-form"),
                expect("expansion_sq_embedding", 3.0 - mean_sq, 1e-9, "construction"),
            ]);
        }
        "octagon" => {
            let (p, q) = octagon();
            files.push(("octagon.json".into(), polytope_text(&p)?));
            files.push(("octagon-star.json".into(), embedding_text(&q)?));
            expected.extend([
                expect("min_edge_gain", 2.0 * (3.0 * PI / 8.0).sin() - 2.0 * (PI / 8.0).sin(), 1e-9, "closed-form"),
                expect("max_norm_difference", 0.0, 1e-9, "closed-form"),
                expect("polytope_centrally_symmetric", 1.0, 0.0, "construction"),
                expect("embedding_centrally_symmetric", 1.0, 0.0, "construction"),
            ]);
        }
        "pentagon-exterior" => {
            let (p, q) = pentagon_exterior();
            files.push(("pentagon-p.json".into(), polytope_text(&p)?));
            files.push(("pentagon-q.json".into(), embedding_text(&q)?));
            expected.extend(pair_expectations());
        }
        "pyramid-codim3" => {
            let (p, q) = pyramid_codim3();
            files.push(("pyramid-p.json".into(), polytope_text(&p)?));
            files.push(("pyramid-q.json".into(), polytope_text(&q)?));
            expected.extend(pair_expectations());
            expected.push(expect("origin_is_vertex", 1.0, 0.0, "construction"));
            expected.push(expect("combinatorially_equivalent", 1.0, 0.0, "construction"));
        }
        "cube-twist" | "fourcube-twist" => {
            let (p, field) = if name == "cube-twist" {
                let c = shapes::cube();
                let f = cube_twist_field(&c);
                (c, f)
            } else {
                let c = shapes::hypercube(4);
                let f = fourcube_twist_field(&c);
                (c, f)
            };
            files.push((format!("{name}-polytope.json"), polytope_text(&p)?));
            let flex =
                FlexFile { swapped: true, velocities: field.iter().map(|v| v.iter().copied().collect()).collect() };
            files.push((format!("{name}-flex.json"), io::to_json(&flex)?));
            expected.extend([
                expect("flex_signs_ok", 1.0, 0.0, "construction"),
                expect("flex_nontrivial", 1.0, 0.0, "construction"),
                expect("max_abs_rate", 0.0, 1e-12, "closed-form"),
                expect("solver_finds_flex", 1.0, 0.0, "construction"),
            ]);
        }
        "random-corpus" => {
            let corpus = random_corpus(CORPUS_SIZE, 2024);
            for (k, p) in corpus.iter().enumerate() {
                files.push((format!("polytope-{k:03}.json"), polytope_text(p)?));
                files.push((format!("problem-{k:03}.json"), io::to_json(&problem_file(p)?)?));
            }
            expected.extend([
                expect("polytope_count", CORPUS_SIZE as f64, 0.0, "construction"),
                expect("izmestiev_failures", 0.0, 0.0, "construction"),
                expect("max_certificate_gap", 0.0, 1e-8, "closed-form"),
            ]);
        }
        other => return Err(Error::UnknownFixture(other.into())),
    }
    Ok(FixtureSet { name: name.into(), files, expected })
}

fn pair_expectations() -> Vec<Expected> {
    vec![
        expect("max_edge_length_difference", 0.0, 1e-9, "construction"),
        expect("max_norm_difference", 0.0, 1e-9, "construction"),
        expect("origin_interior", 0.0, 0.0, "construction"),
        expect("noncongruent", 1.0, 0.0, "construction"),
    ]
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn norms(points: &[Point]) -> Vec<f64> {
    points.iter().map(|x| x.norm()).collect()
}

/// Compares two embeddings of the same graph with respect to the origin.
fn pair_measures(p: &GraphEmbedding, q: &GraphEmbedding, origin_interior: bool, out: &mut BTreeMap<String, f64>) {
    out.insert("max_edge_length_difference".into(), max_diff(&p.edge_lengths(), &q.edge_lengths()));
    out.insert("max_norm_difference".into(), max_diff(&norms(&p.points), &norms(&q.points)));
    out.insert("origin_interior".into(), bool_value(origin_interior));
    out.insert("noncongruent".into(), bool_value(max_abs(&(gram(&p.points) - gram(&q.points))) > 1e-3));
}

/// Recomputes every manifest quantity of fixture `name` from the files in `dir`.
pub fn measure(name: &str, dir: &Path, tol: f64) -> Result<BTreeMap<String, f64>> {
    let poly = |f: &str| io::read_polytope(&dir.join(f), tol);
    let emb = |f: &str| io::read_embedding(&dir.join(f), tol);
    let mut out = BTreeMap::new();
    match name {
        "cube-path" => {
            let p = poly("cube.json")?;
            let q = emb("cube-path.json")?;
            let angles: Vec<f64> = q.points.iter().map(|x| x[1].atan2(x[0])).collect();
            let step = p
                .edges()
                .iter()
                .map(|&(i, j)| {
                    let d = (angles[i] - angles[j]).rem_euclid(2.0 * PI);
                    d.min(2.0 * PI - d)
                })
                .fold(0.0, f64::max);
            out.insert("arc_step_degrees".into(), step.to_degrees());
            out.insert(
                "max_edge_length_error".into(),
                q.edge_lengths().iter().map(|l| (l - 2.0).abs()).fold(0.0, f64::max),
            );
            out.insert(
                "max_norm_error".into(),
                q.points.iter().map(|x| (x.norm() - 3f64.sqrt()).abs()).fold(0.0, f64::max),
            );
            let zero = Point::zeros(q.ambient());
            let inside = positive_combination_margin(&q.points, &zero, true, 1.0).is_some_and(|m| m > 1e-9);
            out.insert("origin_in_hull".into(), bool_value(inside));
            out.insert("cone_condition_everywhere".into(), bool_value(cone_condition(&q).all_hold()));
            let alpha = vec![0.125; 8];
            out.insert("expansion_sq_polytope".into(), alpha_expansion(p.vertices(), &alpha)?.powi(2));
            out.insert("expansion_sq_embedding".into(), alpha_expansion(&q.points, &alpha)?.powi(2));
        }
        "octagon" => {
            let p = poly("octagon.json")?;
            let q = emb("octagon-star.json")?;
            let gain = q.edge_lengths().iter().zip(p.edge_lengths()).map(|(a, b)| a - b).fold(f64::INFINITY, f64::min);
            out.insert("min_edge_gain".into(), gain);
            out.insert("max_norm_difference".into(), max_diff(&norms(p.vertices()), &norms(&q.points)));
            let inv = central_involution(&p);
            out.insert("polytope_centrally_symmetric".into(), bool_value(inv.is_some()));
            let sym =
                inv.is_some_and(|m| m.iter().enumerate().all(|(i, &j)| (&q.points[i] + &q.points[j]).norm() <= 1e-9));
            out.insert("embedding_centrally_symmetric".into(), bool_value(sym));
        }
        "pentagon-exterior" => {
            let p = poly("pentagon-p.json")?;
            let q = emb("pentagon-q.json")?;
            let interior = p.contains_interior(&Point::zeros(2));
            pair_measures(&GraphEmbedding::skeleton(&p), &q, interior, &mut out);
        }
        "pyramid-codim3" => {
            let p = poly("pyramid-p.json")?;
            let q = poly("pyramid-q.json")?;
            let interior = p.contains_interior(&Point::zeros(3));
            pair_measures(&GraphEmbedding::skeleton(&p), &GraphEmbedding::skeleton(&q), interior, &mut out);
            out.insert("origin_is_vertex".into(), bool_value(p.vertices().iter().any(|v| v.norm() <= 1e-12)));
            out.insert("combinatorially_equivalent".into(), bool_value(p.is_comb_equivalent(&q)));
        }
        "cube-twist" | "fourcube-twist" => {
            let p = poly(&format!("{name}-polytope.json"))?;
            let flex: FlexFile = io::read_json(&dir.join(format!("{name}-flex.json")))?;
            let t = build_tensegrity(&p, flex.swapped)?;
            let v: Vec<Point> = flex.velocities.iter().map(|r| Point::from_column_slice(r)).collect();
            if v.len() != t.nodes.len() || v.iter().any(|x| x.len() != p.dim()) {
                return Err(Error::DimensionMismatch("flex does not match the tensegrity".into()));
            }
            let c = check_flex(&t, &v);
            out.insert("flex_signs_ok".into(), bool_value(c.signs_ok));
            out.insert("flex_nontrivial".into(), bool_value(c.nontrivial));
            out.insert("max_abs_rate".into(), c.rates.iter().fold(0.0, |m, r| m.max(r.abs())));
            let found = first_order_flex(&t).classification == FlexClass::NontrivialFlex;
            out.insert("solver_finds_flex".into(), bool_value(found));
        }
        "random-corpus" => {
            let mut count = 0;
            let mut failures = 0;
            let mut gap = 0.0f64;
            while dir.join(format!("polytope-{count:03}.json")).exists() {
                let p = poly(&format!("polytope-{count:03}.json"))?;
                let ok = crate::wachspress::izmestiev(&p)
                    .map(|d| crate::wachspress::verify_izmestiev(&p, &d).all_passed())
                    .unwrap_or(false);
                failures += usize::from(!ok);
                gap = gap.max(crate::reconstruct::dual_certificate(&p)?.gap);
                count += 1;
            }
            out.insert("polytope_count".into(), count as f64);
            out.insert("izmestiev_failures".into(), failures as f64);
            out.insert("max_certificate_gap".into(), gap);
        }
        other => return Err(Error::UnknownFixture(other.into())),
    }
    Ok(out)
}

/// Quantities of the manifest in `dir` that are missing or outside tolerance.
pub fn revalidate(dir: &Path, tol: f64) -> Result<Vec<String>> {
    let manifest: Manifest = io::read_json(&dir.join("manifest.json"))?;
    let got = measure(&manifest.fixture, dir, tol)?;
    Ok(manifest
        .expected
        .iter()
        .filter_map(|e| match got.get(&e.quantity) {
            Some(v) if (v - e.value).abs() <= e.tolerance => None,
            Some(v) => Some(format!("{}: measured {v}, expected {} +- {}", e.quantity, e.value, e.tolerance)),
            None => Some(format!("{}: not measured", e.quantity)),
        })
        .collect())
}
