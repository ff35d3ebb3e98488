//! Wachspress-weighted expansion of graph embeddings, the three-term
//! decomposition behind the maximal-expansion theorem, the Wachspress map
//! and congruence certificates.

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Polytope;
use crate::graph::EdgeGraph;
use crate::linalg::{centroid, gram, max_abs, pinv, rows_matrix, weighted_sum, Point};
use crate::wachspress::{izmestiev, wachspress, IzmestievData};

/// Relative tolerance separating equality from near-equality.
pub const EQUALITY_TOL: f64 = 1e-7;

/// Points indexed by the vertices of a graph, in some `R^e`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphEmbedding {
    pub graph: EdgeGraph,
    pub points: Vec<Point>,
}

impl GraphEmbedding {
    pub fn new(graph: EdgeGraph, points: Vec<Point>) -> Result<Self> {
        if points.len() != graph.vertex_count() {
            return Err(Error::DimensionMismatch(format!(
                "{} points for {} graph vertices",
                points.len(),
                graph.vertex_count()
            )));
        }
        let e = points.first().map_or(0, |p| p.len());
        if e == 0 || points.iter().any(|p| p.len() != e) {
            return Err(Error::DimensionMismatch("points of zero or mixed dimension".into()));
        }
        Ok(GraphEmbedding { graph, points })
    }

    /// The skeleton of a polytope.
    pub fn skeleton(p: &Polytope) -> Self {
        GraphEmbedding { graph: p.graph().clone(), points: p.vertices().to_vec() }
    }

    pub fn ambient(&self) -> usize {
        self.points[0].len()
    }

    pub fn edge_lengths(&self) -> Vec<f64> {
        self.graph.edges().iter().map(|&(i, j)| (&self.points[i] - &self.points[j]).norm()).collect()
    }

    pub fn translated(&self, shift: &Point) -> Self {
        let points = self.points.iter().map(|p| p - shift).collect();
        GraphEmbedding { graph: self.graph.clone(), points }
    }

    pub fn mapped(&self, map: &DMatrix<f64>) -> Self {
        let points = self.points.iter().map(|p| map * p).collect();
        GraphEmbedding { graph: self.graph.clone(), points }
    }

    pub fn scale(&self) -> f64 {
        let c = centroid(&self.points);
        self.points.iter().map(|p| (p - &c).norm()).fold(0.0, f64::max)
    }
}

fn check_weights(n: usize, alpha: &[f64]) -> Result<()> {
    if alpha.len() != n {
        return Err(Error::DimensionMismatch(format!("{} weights for {n} points", alpha.len())));
    }
    Ok(())
}

/// `sqrt(1/2 sum_ij alpha_i alpha_j |x_i - x_j|^2)`.
pub fn alpha_expansion(points: &[Point], alpha: &[f64]) -> Result<f64> {
    check_weights(points.len(), alpha)?;
    let mut s = 0.0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            s += alpha[i] * alpha[j] * (&points[i] - &points[j]).norm_squared();
        }
    }
    Ok(s.sqrt())
}

/// The three terms whose combination `edge - center + trace` equals the
/// squared expansion.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Decomposition {
    pub edge_term: f64,
    pub center_term: f64,
    pub trace_term: f64,
    pub expansion: f64,
}

impl Decomposition {
    pub fn recombined(&self) -> f64 {
        self.edge_term - self.center_term + self.trace_term
    }

    /// Relative error of the identity `edge - center + trace = expansion^2`.
    pub fn identity_error(&self) -> f64 {
        let e2 = self.expansion * self.expansion;
        let size = self.edge_term.abs() + self.center_term.abs() + self.trace_term.abs();
        (self.recombined() - e2).abs() / size.max(f64::MIN_POSITIVE)
    }
}

/// Decomposition of `points` with respect to the matrix `m` (with row sums
/// `alpha`) supported on `graph`.
pub fn decompose(m: &DMatrix<f64>, alpha: &[f64], graph: &EdgeGraph, points: &[Point]) -> Result<Decomposition> {
    check_weights(points.len(), alpha)?;
    let edge_term = graph.edges().iter().map(|&(i, j)| m[(i, j)] * (&points[i] - &points[j]).norm_squared()).sum();
    let center_term = weighted_sum(alpha, points).norm_squared();
    let trace_term = (m.component_mul(&gram(points))).sum();
    let expansion = alpha_expansion(points, alpha)?;
    Ok(Decomposition { edge_term, center_term, trace_term, expansion })
}

#[derive(Debug, Clone, Serialize)]
pub struct AffineFit {
    /// `e x d` matrix of the linear part.
    #[serde(serialize_with = "crate::io::ser_matrix")]
    pub linear: DMatrix<f64>,
    #[serde(serialize_with = "crate::io::ser_point")]
    pub translation: Point,
    /// Largest distance between a fitted and a target point.
    pub residual: f64,
}

/// Least-squares affine map sending `a_i` to `b_i`.
pub fn affine_fit(a: &[Point], b: &[Point]) -> Result<AffineFit> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::DimensionMismatch(format!("{} source vs {} target points", a.len(), b.len())));
    }
    let (ca, cb) = (centroid(a), centroid(b));
    let xa = rows_matrix(&a.iter().map(|p| p - &ca).collect::<Vec<_>>());
    let xb = rows_matrix(&b.iter().map(|p| p - &cb).collect::<Vec<_>>());
    let linear = (pinv(&xa, 1e-12) * xb).transpose();
    let translation = &cb - &linear * &ca;
    let residual = a.iter().zip(b).map(|(p, q)| (&linear * p + &translation - q).norm()).fold(0.0, f64::max);
    Ok(AffineFit { linear, translation, residual })
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub alpha: Vec<f64>,
    pub p_side: Decomposition,
    pub q_side: Decomposition,
    /// Every edge of `q` is at most as long as in `P`.
    pub edges_dominated: bool,
    pub inequality_holds: bool,
    /// `|P|_alpha - |q|_alpha`.
    pub slack: f64,
    pub equality_detected: bool,
    pub affine_witness: Option<AffineFit>,
}

impl ComparisonReport {
    /// Shorter edges together with a larger expansion.
    pub fn violation(&self) -> bool {
        self.edges_dominated && !self.inequality_holds
    }
}

fn check_graph(p: &Polytope, q: &GraphEmbedding) -> Result<()> {
    if q.graph != *p.graph() {
        return Err(Error::GraphMismatch(format!(
            "embedding has {} vertices and {} edges, polytope has {} and {}",
            q.graph.vertex_count(),
            q.graph.edge_count(),
            p.vertex_count(),
            p.graph().edge_count()
        )));
    }
    Ok(())
}

/// Translates `q` so that the Perron-weighted mean of its points is the origin.
pub fn perron_centered(data: &IzmestievData, q: &GraphEmbedding) -> GraphEmbedding {
    let shift = weighted_sum(&data.perron, &q.points);
    q.translated(&shift)
}

pub fn expansion_compare(p: &Polytope, x: &Point, q: &GraphEmbedding) -> Result<ComparisonReport> {
    check_graph(p, q)?;
    let alpha = wachspress(p, x)?.normalized;
    let shifted = p.translated(x);
    let data = izmestiev(&shifted)?;
    let m = &data.normalized;
    let q0 = perron_centered(&data, q);
    let p_side = decompose(m, &alpha, p.graph(), shifted.vertices())?;
    let q_side = decompose(m, &alpha, &q.graph, &q0.points)?;

    let lp = shifted.edge_lengths();
    let lq = q.edge_lengths();
    let scale = shifted.scale();
    let edges_dominated = lp.iter().zip(&lq).all(|(a, b)| *b <= a + 1e-9 * scale);
    let slack = p_side.expansion - q_side.expansion;
    let inequality_holds = slack >= -1e-9 * scale;
    let lengths_equal = lp.iter().zip(&lq).all(|(a, b)| (a - b).abs() <= EQUALITY_TOL * a.max(scale));
    let fit = affine_fit(p.vertices(), &q.points)?;
    let equality_detected = lengths_equal && fit.residual <= EQUALITY_TOL * scale;
    Ok(ComparisonReport {
        alpha,
        p_side,
        q_side,
        edges_dominated,
        inequality_holds,
        slack,
        equality_detected,
        affine_witness: equality_detected.then_some(fit),
    })
}

/// `phi(x) = sum_i alpha_i(x) target_i`.
pub fn wachspress_map(p: &Polytope, target: &GraphEmbedding, x: &Point) -> Result<Point> {
    if target.points.len() != p.vertex_count() {
        return Err(Error::GraphMismatch(format!(
            "target has {} points, polytope {} vertices",
            target.points.len(),
            p.vertex_count()
        )));
    }
    let alpha = wachspress(p, x)?.normalized;
    Ok(weighted_sum(&alpha, &target.points))
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum CertificateResult {
    Witness {
        #[serde(serialize_with = "crate::io::ser_point")]
        x: Point,
        /// `|phi(x)| - |x|`.
        value: f64,
        /// Largest deviation between the Gram matrices of `P` and `q`.
        gram_deviation: f64,
        congruent: bool,
    },
    NoWitnessFound {
        #[serde(serialize_with = "crate::io::ser_point")]
        best_x: Point,
        best_value: f64,
        evaluations: usize,
    },
}

impl CertificateResult {
    pub fn is_congruent(&self) -> bool {
        matches!(self, CertificateResult::Witness { congruent: true, .. })
    }

    pub fn witness(&self) -> Option<&Point> {
        match self {
            CertificateResult::Witness { x, .. } => Some(x),
            CertificateResult::NoWitnessFound { .. } => None,
        }
    }
}

/// Offending edges and vertices for the hypotheses "edges of `q` not longer,
/// vertex norms of `q` not shorter".
pub fn metric_violations(p: &Polytope, q: &GraphEmbedding) -> Vec<String> {
    let tol = 1e-9 * (1.0 + p.scale());
    let mut out = Vec::new();
    for (&(i, j), (lp, lq)) in p.edges().iter().zip(p.edge_lengths().iter().zip(q.edge_lengths())) {
        if lq > lp + tol {
            out.push(format!("edge {i}-{j} longer ({lq} > {lp})"));
        }
    }
    for (i, (a, b)) in p.vertices().iter().zip(&q.points).enumerate() {
        if b.norm() < a.norm() - tol {
            out.push(format!("vertex {i} closer to the origin ({} < {})", b.norm(), a.norm()));
        }
    }
    out
}

/// Searches `int(P)` for `x` with `|phi(x)| <= |x|`; a witness forces `q`
/// to be congruent to the skeleton of `P`.
pub fn congruence_certificate(p: &Polytope, q: &GraphEmbedding) -> Result<CertificateResult> {
    check_graph(p, q)?;
    let violations = metric_violations(p, q);
    if !violations.is_empty() {
        return Err(Error::PreconditionViolated(violations));
    }
    let d = p.dim();
    let scale = p.scale();
    if !p.contains_interior(&Point::zeros(d)) {
        return Err(Error::OriginNotInterior);
    }
    let accept = 1e-9 * scale;
    let margin = 1e-3 * scale;
    let mut evaluations = 0usize;
    let mut f = |x: &Point| -> f64 {
        if p.interior_margin(x) < margin {
            return f64::INFINITY;
        }
        evaluations += 1;
        match wachspress_map(p, q, x) {
            Ok(y) => y.norm() - x.norm(),
            Err(_) => f64::INFINITY,
        }
    };

    let mut candidates = vec![Point::zeros(d), centroid(p.vertices())];
    let cells = (2000f64.powf(1.0 / d as f64).floor() as usize).clamp(2, 10);
    let lo = Point::from_iterator(d, (0..d).map(|k| p.vertices().iter().map(|v| v[k]).fold(f64::INFINITY, f64::min)));
    let hi =
        Point::from_iterator(d, (0..d).map(|k| p.vertices().iter().map(|v| v[k]).fold(f64::NEG_INFINITY, f64::max)));
    let total = cells.pow(d as u32);
    for idx in 0..total {
        let mut rem = idx;
        let x = Point::from_iterator(
            d,
            (0..d).map(|k| {
                let c = rem % cells;
                rem /= cells;
                lo[k] + (hi[k] - lo[k]) * (c as f64 + 0.5) / cells as f64
            }),
        );
        candidates.push(x);
    }

    let mut scored: Vec<(f64, Point)> = Vec::new();
    for x in candidates {
        let v = f(&x);
        if v <= accept {
            return Ok(confirm(p, q, x, v));
        }
        if v.is_finite() {
            scored.push((v, x));
        }
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let step0 = (hi - lo).amax() / cells as f64;
    let mut best = scored.first().cloned().unwrap_or((f64::INFINITY, Point::zeros(d)));
    for (v0, x0) in scored.into_iter().take(5) {
        let (v, x) = pattern_search(&mut f, x0, v0, step0, 1e-6 * step0, accept);
        if v <= accept {
            return Ok(confirm(p, q, x, v));
        }
        if v < best.0 {
            best = (v, x);
        }
    }
    Ok(CertificateResult::NoWitnessFound { best_x: best.1, best_value: best.0, evaluations })
}

fn pattern_search(
    f: &mut impl FnMut(&Point) -> f64,
    mut x: Point,
    mut v: f64,
    mut step: f64,
    min_step: f64,
    accept: f64,
) -> (f64, Point) {
    let d = x.len();
    while step > min_step && v > accept {
        let mut improved = false;
        for k in 0..d {
            for s in [1.0, -1.0] {
                let mut y = x.clone();
                y[k] += s * step;
                let w = f(&y);
                if w < v {
                    x = y;
                    v = w;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (v, x)
}

fn confirm(p: &Polytope, q: &GraphEmbedding, x: Point, value: f64) -> CertificateResult {
    let gram_deviation = max_abs(&(gram(p.vertices()) - gram(&q.points)));
    let congruent = gram_deviation <= EQUALITY_TOL * (1.0 + p.scale().powi(2));
    CertificateResult::Witness { x, value, gram_deviation, congruent }
}

/// Center and radius of the sphere through all vertices, if there is one.
pub fn circumsphere(p: &Polytope) -> Result<(Point, f64)> {
    let v = p.vertices();
    let d = p.dim();
    let a = DMatrix::from_fn(v.len() - 1, d, |r, k| 2.0 * (v[r + 1][k] - v[0][k]));
    let b = Point::from_iterator(v.len() - 1, (1..v.len()).map(|r| v[r].norm_squared() - v[0].norm_squared()));
    let c = pinv(&a, 1e-12) * b;
    let radii: Vec<f64> = v.iter().map(|x| (x - &c).norm()).collect();
    let r = radii.iter().sum::<f64>() / radii.len() as f64;
    let spread = radii.iter().map(|x| (x - r).abs()).fold(0.0, f64::max);
    if spread > EQUALITY_TOL * r {
        return Err(Error::NotInscribed(format!("vertex distances from the best center spread by {spread:e}")));
    }
    Ok((c, r))
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderingReport {
    pub radius_p: f64,
    pub radius_q: f64,
    pub edges_shorter: bool,
    /// `r_P >= r_Q` as implied by shorter edges.
    pub ordering_holds: bool,
    pub equal_edges: bool,
    pub congruent: bool,
}

/// Compares two combinatorially equivalent inscribed polytopes.
pub fn inscribed_compare(p: &Polytope, q: &Polytope) -> Result<OrderingReport> {
    if !p.is_comb_equivalent(q) {
        return Err(Error::NotCombEquivalent);
    }
    let (cp, radius_p) = circumsphere(p)?;
    let (cq, radius_q) = circumsphere(q)?;
    let (p0, q0) = (p.translated(&cp), q.translated(&cq));
    if !q0.contains_interior(&Point::zeros(q.dim())) {
        return Err(Error::PreconditionViolated(vec!["circumcenter of Q is not interior".into()]));
    }
    let tol = 1e-9 * (1.0 + p.scale());
    let (lp, lq) = (p0.edge_lengths(), q0.edge_lengths());
    let edges_shorter = lp.iter().zip(&lq).all(|(a, b)| *b <= a + tol);
    let equal_edges = lp.iter().zip(&lq).all(|(a, b)| (a - b).abs() <= EQUALITY_TOL * a);
    let gram_dev = max_abs(&(gram(p0.vertices()) - gram(q0.vertices())));
    Ok(OrderingReport {
        radius_p,
        radius_q,
        edges_shorter,
        ordering_holds: !edges_shorter || radius_p >= radius_q - tol,
        equal_edges,
        congruent: gram_dev <= EQUALITY_TOL * (1.0 + radius_p * radius_p),
    })
}

/// Random embedding of the skeleton of `P` into `R^ambient` whose edges are
/// all strictly shorter: a random contraction followed by random
/// perturbations, each backtracked until no edge grows.
pub fn edge_shrunk_embedding<R: Rng + ?Sized>(p: &Polytope, ambient: usize, rng: &mut R) -> GraphEmbedding {
    use crate::fixtures::shapes::random_rotation;
    let d = p.dim();
    assert!(ambient >= d, "ambient dimension below polytope dimension");
    let rot = random_rotation(ambient, rng);
    let lift = DMatrix::from_fn(ambient, d, |r, c| rot[(r, c)]);
    let base = p.edge_lengths();
    let s = rng.random_range(0.6..0.98);
    let mut q = GraphEmbedding::skeleton(p).mapped(&(lift * s));
    let spread = 0.3 * p.scale();
    for _ in 0..rng.random_range(1..6usize) {
        let dir: Vec<Point> = (0..q.points.len())
            .map(|_| crate::fixtures::shapes::random_unit_vector(ambient, rng) * rng.random_range(0.0..spread))
            .collect();
        let mut t = 1.0;
        for _ in 0..30 {
            let trial: Vec<Point> = q.points.iter().zip(&dir).map(|(a, b)| a + b * t).collect();
            let cand = GraphEmbedding { graph: q.graph.clone(), points: trial };
            if cand.edge_lengths().iter().zip(&base).all(|(a, b)| a < b) {
                q = cand;
                break;
            }
            t *= 0.5;
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::shapes;

    #[test]
    fn square_expansion_is_sqrt_two() {
        let sq = shapes::square();
        let e = alpha_expansion(sq.vertices(), &[0.25; 4]).unwrap();
        assert!((e * e - 2.0).abs() < 1e-12);
    }

    #[test]
    fn coincident_points_have_zero_expansion() {
        let pts = vec![Point::from_vec(vec![1.0, 2.0]); 3];
        assert_eq!(alpha_expansion(&pts, &[0.2, 0.3, 0.5]).unwrap(), 0.0);
    }

    #[test]
    fn identity_comparison_is_equality() {
        let cube = shapes::cube();
        let r = expansion_compare(&cube, &Point::zeros(3), &GraphEmbedding::skeleton(&cube)).unwrap();
        assert!(r.equality_detected && r.inequality_holds);
        let fit = r.affine_witness.unwrap();
        assert!((fit.linear - DMatrix::identity(3, 3)).amax() < 1e-10);
    }

    #[test]
    fn affine_fit_recovers_rotation() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let cube = shapes::cube();
        let rot = shapes::random_rotation(3, &mut rng);
        let b: Vec<Point> = cube.vertices().iter().map(|p| &rot * p).collect();
        let fit = affine_fit(cube.vertices(), &b).unwrap();
        assert!(fit.residual < 1e-10 && (fit.linear - rot).amax() < 1e-10);
    }

    #[test]
    fn wachspress_map_of_scaled_square() {
        let sq = shapes::square();
        let target = GraphEmbedding::skeleton(&sq).mapped(&(DMatrix::identity(2, 2) * 2.0));
        let y = wachspress_map(&sq, &target, &Point::from_vec(vec![0.3, 0.2])).unwrap();
        assert!((y - Point::from_vec(vec![0.6, 0.4])).norm() < 1e-12);
    }

    #[test]
    fn shrunk_embeddings_have_shorter_edges() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let cube = shapes::cube();
        for ambient in [3, 4] {
            let q = edge_shrunk_embedding(&cube, ambient, &mut rng);
            assert!(q.edge_lengths().iter().zip(cube.edge_lengths()).all(|(a, b)| *a < b));
        }
    }

    use rand::SeedableRng;
}
