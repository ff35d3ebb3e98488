//! Reconstruction of a polytope, up to affine equivalence, from its
//! edge-graph, edge lengths and Wachspress coordinates by semidefinite
//! programming, and the explicit dual certificate built from the Izmestiev
//! matrix.
//!
//! The program maximises `sum_i alpha_i G_ii` over Gram matrices `G >= 0`
//! with `G_ii - 2 G_ij + G_jj <= l_ij^2` on edges and `G alpha = 0`. Writing
//! `G = U Y U^T` for an orthonormal basis `U` of `alpha^perp` makes the
//! centering exact, and the remaining conic program is solved by an
//! alternating-direction method on its dual.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expansion::affine_fit;
use crate::geometry::Polytope;
use crate::graph::EdgeGraph;
use crate::linalg::{centroid, min_eigenvalue, null_space, sym_eigen_desc, Point};
use crate::wachspress::izmestiev;

/// Eigenvalues below `RANK_TOL * theta_max` are treated as solver noise.
pub const RANK_TOL: f64 = 1e-7;
/// Relative tolerance for affine equivalence of reconstructions.
pub const AFFINE_TOL: f64 = 1e-5;

#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub graph: EdgeGraph,
    /// Squared lengths, aligned with `graph.edges()`.
    pub sq_lengths: Vec<f64>,
    pub alpha: Vec<f64>,
}

impl SdpProblem {
    pub fn n(&self) -> usize {
        self.graph.vertex_count()
    }

    /// Edge constraints plus the centering constraint.
    pub fn constraint_count(&self) -> usize {
        self.graph.edge_count() + 1
    }

    pub fn objective(&self, g: &DMatrix<f64>) -> f64 {
        self.alpha.iter().enumerate().map(|(i, a)| a * g[(i, i)]).sum()
    }

    /// Largest excess `G_ii - 2 G_ij + G_jj - l^2` over the edges.
    pub fn edge_violation(&self, g: &DMatrix<f64>) -> f64 {
        self.graph
            .edges()
            .iter()
            .zip(&self.sq_lengths)
            .map(|(&(i, j), l2)| g[(i, i)] - 2.0 * g[(i, j)] + g[(j, j)] - l2)
            .fold(0.0, f64::max)
    }

    pub fn centering(&self, g: &DMatrix<f64>) -> f64 {
        let a = DVector::from_column_slice(&self.alpha);
        a.dot(&(g * &a)).abs()
    }
}

/// Sets up the program for edge lengths (not squared) aligned with `graph.edges()`.
pub fn build_sdp(graph: &EdgeGraph, lengths: &[f64], alpha: &[f64]) -> Result<SdpProblem> {
    if !graph.is_connected() {
        return Err(Error::DisconnectedGraph);
    }
    let n = graph.vertex_count();
    if alpha.len() != n {
        return Err(Error::InvalidWeights(format!("{} weights for {n} vertices", alpha.len())));
    }
    if alpha.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
        return Err(Error::InvalidWeights("weights must be strictly positive".into()));
    }
    let total: f64 = alpha.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidWeights(format!("weights sum to {total}, not 1")));
    }
    if lengths.len() != graph.edge_count() {
        return Err(Error::DimensionMismatch(format!("{} lengths for {} edges", lengths.len(), graph.edge_count())));
    }
    if lengths.iter().any(|&l| !(l >= 0.0) || !l.is_finite()) {
        return Err(Error::Invalid("edge lengths must be finite and nonnegative".into()));
    }
    Ok(SdpProblem { graph: graph.clone(), sq_lengths: lengths.iter().map(|l| l * l).collect(), alpha: alpha.to_vec() })
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { max_iters: 200_000, tol: 1e-10 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Residuals {
    /// Relative residual of the edge equations with slacks.
    pub primal: f64,
    /// Relative residual of the dual equations.
    pub dual: f64,
    /// Relative duality gap.
    pub gap: f64,
    pub edge_violation: f64,
    pub centering: f64,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GramSolution {
    #[serde(serialize_with = "crate::io::ser_matrix")]
    pub gram: DMatrix<f64>,
    pub objective: f64,
    pub residuals: Residuals,
    pub iterations: usize,
    pub converged: bool,
    /// Multipliers of the edge constraints.
    pub edge_weights: Vec<f64>,
    #[serde(serialize_with = "crate::io::ser_points")]
    pub points: Vec<Point>,
    pub rank: usize,
}

struct Data {
    u: DMatrix<f64>,
    /// `U^T (e_i - e_j)` per edge.
    b: Vec<DVector<f64>>,
    /// Scaled cost on `Y`: `-U^T diag(alpha) U / sigma_c`.
    c: DMatrix<f64>,
    rhs: DVector<f64>,
    sigma_b: f64,
    sigma_c: f64,
    chol: Cholesky<f64, Dyn>,
}

impl Data {
    fn new(p: &SdpProblem) -> Data {
        let n = p.n();
        let alpha_row = DMatrix::from_row_slice(1, n, &p.alpha);
        let u = null_space(&alpha_row, 1e-12);
        let b: Vec<DVector<f64>> = p.graph.edges().iter().map(|&(i, j)| (u.row(i) - u.row(j)).transpose()).collect();
        let c_full = u.transpose() * DMatrix::from_diagonal(&DVector::from_column_slice(&p.alpha)) * &u;
        let sigma_c = c_full.amax().max(f64::MIN_POSITIVE);
        let lmax = p.sq_lengths.iter().copied().fold(0.0, f64::max);
        let sigma_b = if lmax > 0.0 { lmax } else { 1.0 };
        let e = b.len();
        let k = DMatrix::from_fn(e, e, |r, s| b[r].dot(&b[s]).powi(2) + if r == s { 1.0 } else { 0.0 });
        Data {
            c: -c_full / sigma_c,
            rhs: DVector::from_iterator(e, p.sq_lengths.iter().map(|l| l / sigma_b)),
            sigma_b,
            sigma_c,
            chol: Cholesky::new(k).expect("A A^T is positive definite"),
            u,
            b,
        }
    }

    /// `A(Y, s)_e = b_e^T Y b_e + s_e`.
    fn apply(&self, y: &DMatrix<f64>, s: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.b.len(), self.b.iter().zip(s.iter()).map(|(b, si)| b.dot(&(y * b)) + si))
    }

    /// `A^T w = (sum_e w_e b_e b_e^T, w)`.
    fn adjoint(&self, w: &DVector<f64>) -> DMatrix<f64> {
        let m = self.u.ncols();
        let mut out = DMatrix::zeros(m, m);
        for (b, &we) in self.b.iter().zip(w.iter()) {
            out.ger(we, b, b, 1.0);
        }
        out
    }
}

fn psd_split(v: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let (vals, vecs) = sym_eigen_desc(v);
    let m = v.nrows();
    let mut pos = DMatrix::zeros(m, m);
    let mut neg = DMatrix::zeros(m, m);
    for (k, &t) in vals.iter().enumerate() {
        let col = vecs.column(k);
        if t > 0.0 {
            pos.ger(t, &col, &col, 1.0);
        } else if t < 0.0 {
            neg.ger(-t, &col, &col, 1.0);
        }
    }
    (pos, neg)
}

/// Dual alternating-direction method with over-relaxation and adaptive
/// penalty. Returns [`Error::NotConverged`] holding the last iterate when
/// the budget runs out.
pub fn solve_sdp(p: &SdpProblem, opts: SolverOptions) -> Result<GramSolution> {
    let data = Data::new(p);
    let m = data.u.ncols();
    let e = data.b.len();
    let rho = 1.6;
    let mut mu = 1.0;
    let mut xy = DMatrix::zeros(m, m);
    let mut xs = DVector::zeros(e);
    let mut sy = DMatrix::zeros(m, m);
    let mut ss = DVector::zeros(e);
    let mut w = DVector::zeros(e);
    let norm_b = 1.0 + data.rhs.norm();
    let norm_c = 1.0 + data.c.norm();
    let (mut pinf, mut dinf, mut gap) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let (mut pcount, mut dcount) = (0usize, 0usize);
    let mut iterations = 0;
    let mut converged = false;

    while iterations < opts.max_iters {
        iterations += 1;
        let rhs = (&data.rhs - data.apply(&xy, &xs)) * mu - data.apply(&(&sy - &data.c), &ss);
        w = data.chol.solve(&rhs);
        let vy = &data.c - data.adjoint(&w) - &xy * mu;
        let vs = -&w - &xs * mu;
        let (pos, neg) = psd_split(&vy);
        sy = pos;
        ss = vs.map(|v| v.max(0.0));
        let ny = neg / mu;
        let ns = vs.map(|v| (-v).max(0.0) / mu);

        // residuals of the unrelaxed update
        let dres = ((&sy - &vy - &xy * mu).norm().powi(2) + (&ss - &vs - &xs * mu).norm_squared()).sqrt();
        dinf = dres / norm_c;
        pinf = (data.apply(&ny, &ns) - &data.rhs).norm() / norm_b;
        let pobj = data.c.component_mul(&ny).sum();
        let dobj = data.rhs.dot(&w);
        gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());

        xy = &xy * (1.0 - rho) + ny * rho;
        xs = &xs * (1.0 - rho) + ns * rho;

        if pinf.max(dinf).max(gap) <= opts.tol {
            converged = true;
            break;
        }
        if pinf > 10.0 * dinf {
            pcount += 1;
            dcount = 0;
        } else if dinf > 10.0 * pinf {
            dcount += 1;
            pcount = 0;
        } else {
            pcount = 0;
            dcount = 0;
        }
        if pcount >= 20 {
            mu = (mu * 2.0).min(1e6);
            pcount = 0;
        } else if dcount >= 20 {
            mu = (mu * 0.5).max(1e-6);
            dcount = 0;
        }
    }

    let (y, _) = psd_split(&xy);
    let y = y * data.sigma_b;
    let g = &data.u * y * data.u.transpose();
    let g = (&g + g.transpose()) * 0.5;
    let objective = p.objective(&g);
    let scale_weights = data.sigma_c / data.sigma_b;
    let edge_weights = w.iter().map(|v| -v * scale_weights).collect();
    let residuals = Residuals {
        primal: pinf,
        dual: dinf,
        gap,
        edge_violation: p.edge_violation(&g),
        centering: p.centering(&g),
        min_eigenvalue: min_eigenvalue(&g),
    };
    let embedding =
        factor_gram(&g, RANK_TOL).unwrap_or_else(|_| Embedding { points: vec![Point::zeros(1); p.n()], rank: 0 });
    let solution = GramSolution {
        gram: g,
        objective,
        residuals,
        iterations,
        converged,
        edge_weights,
        points: embedding.points,
        rank: embedding.rank,
    };
    if converged {
        Ok(solution)
    } else {
        Err(Error::NotConverged(Box::new(solution)))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Embedding {
    #[serde(serialize_with = "crate::io::ser_points")]
    pub points: Vec<Point>,
    pub rank: usize,
}

/// Points whose Gram matrix is `G`, keeping eigenvalues above
/// `tol * theta_max`. Rank-zero input yields points at the origin of `R^1`.
pub fn factor_gram(g: &DMatrix<f64>, tol: f64) -> Result<Embedding> {
    let n = g.nrows();
    let (vals, vecs) = sym_eigen_desc(g);
    let tmax = vals.first().copied().unwrap_or(0.0).max(0.0);
    let tmin = vals.last().copied().unwrap_or(0.0);
    if tmin < -tol * tmax.max(1.0) {
        return Err(Error::NotPsd { min_eigenvalue: tmin });
    }
    let rank = if tmax > 0.0 { vals.iter().take_while(|&&t| t > tol * tmax).count() } else { 0 };
    let dim = rank.max(1);
    let points = (0..n)
        .map(|i| {
            Point::from_iterator(dim, (0..dim).map(|k| if k < rank { vecs[(i, k)] * vals[k].sqrt() } else { 0.0 }))
        })
        .collect();
    Ok(Embedding { points, rank })
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    /// `sum_i alpha_i |p_i|^2`.
    pub primal: f64,
    /// `sum_{ij in E} M_ij |p_i - p_j|^2`.
    pub dual: f64,
    pub gap: f64,
    /// First power of two making the shifted matrix PSD.
    pub mu: f64,
    pub min_eigenvalue: f64,
    pub psd: bool,
}

/// The dual certificate `w = M` for the skeleton of `P` around the origin.
pub fn dual_certificate(p: &Polytope) -> Result<CertificateReport> {
    dual_certificate_with_tol(p, 1e-9)
}

pub fn dual_certificate_with_tol(p: &Polytope, tol: f64) -> Result<CertificateReport> {
    let data = izmestiev(p)?;
    let m = &data.normalized;
    let alpha = data.row_sums();
    let n = p.vertex_count();
    let v = p.vertices();
    let primal: f64 = alpha.iter().zip(v).map(|(a, x)| a * x.norm_squared()).sum();
    let dual: f64 = p.edges().iter().map(|&(i, j)| m[(i, j)] * (&v[i] - &v[j]).norm_squared()).sum();

    let mut base = DMatrix::zeros(n, n);
    for &(i, j) in p.edges() {
        base[(i, j)] -= m[(i, j)];
        base[(j, i)] -= m[(i, j)];
        base[(i, i)] += m[(i, j)];
        base[(j, j)] += m[(i, j)];
    }
    for (i, a) in alpha.iter().enumerate() {
        base[(i, i)] -= a;
    }
    let a = DVector::from_column_slice(&alpha);
    let aa = &a * a.transpose();
    let mut mu = 1.0;
    let mut min_eig = f64::NEG_INFINITY;
    for _ in 0..=60 {
        min_eig = min_eigenvalue(&(&base + &aa * mu));
        if min_eig >= -tol {
            break;
        }
        mu *= 2.0;
    }
    Ok(CertificateReport {
        primal,
        dual,
        gap: (primal - dual).abs(),
        mu,
        min_eigenvalue: min_eig,
        psd: min_eig >= -tol,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AffineCheck {
    /// Reference to reconstruction.
    pub forward_residual: f64,
    /// Reconstruction to reference.
    pub backward_residual: f64,
    pub scale: f64,
    pub max_edge_error: f64,
    pub equivalent: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionReport {
    pub solution: GramSolution,
    pub dimension: usize,
    pub reference: Option<AffineCheck>,
}

/// Compares a reconstruction against a reference configuration.
pub fn affine_check(reference: &[Point], recovered: &[Point], graph: &EdgeGraph) -> Result<AffineCheck> {
    let spread = |pts: &[Point]| {
        let c = centroid(pts);
        pts.iter().map(|p| (p - &c).norm()).fold(0.0, f64::max)
    };
    let scale = spread(reference).max(spread(recovered));
    let forward_residual = affine_fit(reference, recovered)?.residual;
    let backward_residual = affine_fit(recovered, reference)?.residual;
    let max_edge_error = graph
        .edges()
        .iter()
        .map(|&(i, j)| ((&reference[i] - &reference[j]).norm() - (&recovered[i] - &recovered[j]).norm()).abs())
        .fold(0.0, f64::max);
    let tol = AFFINE_TOL * scale.max(f64::MIN_POSITIVE);
    Ok(AffineCheck {
        forward_residual,
        backward_residual,
        scale,
        max_edge_error,
        equivalent: forward_residual <= tol && backward_residual <= tol && max_edge_error <= tol,
    })
}

/// Builds, solves and factors the program; with a reference polytope the
/// result is checked for affine equivalence in both directions.
pub fn reconstruct(
    graph: &EdgeGraph,
    lengths: &[f64],
    alpha: &[f64],
    reference: Option<&Polytope>,
    opts: SolverOptions,
) -> Result<ReconstructionReport> {
    let prob = build_sdp(graph, lengths, alpha)?;
    let solution = solve_sdp(&prob, opts)?;
    let reference = match reference {
        Some(r) => Some(affine_check(r.vertices(), &solution.points, graph)?),
        None => None,
    };
    Ok(ReconstructionReport { dimension: solution.rank, solution, reference })
}

/// Reconstruction data of a polytope: its graph, edge lengths and the
/// Wachspress coordinates of the origin.
pub fn problem_data(p: &Polytope) -> Result<(EdgeGraph, Vec<f64>, Vec<f64>)> {
    let alpha = crate::wachspress::wachspress(p, &Point::zeros(p.dim()))?.normalized;
    Ok((p.graph().clone(), p.edge_lengths(), alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::shapes;
    use crate::linalg::gram;

    #[test]
    fn square_constraint_count() {
        let sq = shapes::square();
        let prob = build_sdp(sq.graph(), &sq.edge_lengths(), &[0.25; 4]).unwrap();
        assert_eq!(prob.constraint_count(), 5);
        assert_eq!(prob.objective(&gram(sq.vertices())), 2.0);
    }

    #[test]
    fn square_reconstruction() {
        let sq = shapes::square();
        let (g, l, a) = problem_data(&sq).unwrap();
        let r = reconstruct(&g, &l, &a, Some(&sq), SolverOptions::default()).unwrap();
        assert!((r.solution.objective - 2.0).abs() < 1e-6, "{}", r.solution.objective);
        assert!(r.reference.unwrap().equivalent);
    }

    #[test]
    fn zero_lengths_give_the_zero_gram() {
        let t = shapes::triangle();
        let r = reconstruct(t.graph(), &[0.0; 3], &[1.0 / 3.0; 3], None, SolverOptions::default()).unwrap();
        assert_eq!(r.dimension, 0);
        assert!(r.solution.objective.abs() < 1e-9);
    }

    #[test]
    fn factor_gram_round_trip() {
        let sq = shapes::square();
        let e = factor_gram(&gram(sq.vertices()), RANK_TOL).unwrap();
        assert_eq!(e.rank, 2);
        assert!((gram(&e.points) - gram(sq.vertices())).amax() < 1e-12);
    }

    #[test]
    fn certificates_of_square_and_cube() {
        let c = dual_certificate(&shapes::square()).unwrap();
        assert!((c.primal - 2.0).abs() < 1e-12 && (c.dual - 2.0).abs() < 1e-12 && c.psd);
        let c = dual_certificate(&shapes::cube()).unwrap();
        assert!((c.primal - 3.0).abs() < 1e-12 && (c.dual - 3.0).abs() < 1e-12 && c.psd);
    }

    #[test]
    fn disconnected_graph_rejected() {
        let g = EdgeGraph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert!(matches!(build_sdp(&g, &[1.0, 1.0], &[0.25; 4]), Err(Error::DisconnectedGraph)));
    }
}
