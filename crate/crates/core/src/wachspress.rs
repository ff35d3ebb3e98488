//! Wachspress coordinates and the Izmestiev matrix, both from face volumes
//! of the (generalized) polar dual, plus a finite-difference oracle.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{generalized_polar, polar, HVertices, Polytope};
use crate::linalg::{max_abs, sym_eigen_desc, weighted_sum, Point};

/// Default tolerance for [`verify_izmestiev`].
pub const VERIFY_TOL: f64 = 1e-8;

/// Default finite-difference step.
pub const FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct WachspressData {
    pub point: Point,
    pub unnormalized: Vec<f64>,
    pub normalized: Vec<f64>,
}

impl WachspressData {
    /// `sum_i alpha_i p_i`, which reproduces the point.
    pub fn reproduce(&self, p: &Polytope) -> Point {
        weighted_sum(&self.normalized, p.vertices())
    }
}

/// Wachspress coordinates of an interior point `x`, computed on `P - x`.
pub fn wachspress(p: &Polytope, x: &Point) -> Result<WachspressData> {
    if !p.contains_interior(x) {
        return Err(Error::PointNotInterior);
    }
    let q = p.translated(x);
    let hv = polar(&q)?.vertices_with_tol(q.tol())?;
    let unnormalized = q
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, v)| Ok(hv.relative_face_volume(&[i])? / v.norm()))
        .collect::<Result<Vec<f64>>>()?;
    let total: f64 = unnormalized.iter().sum();
    let normalized = unnormalized.iter().map(|a| a / total).collect();
    Ok(WachspressData { point: x.clone(), unnormalized, normalized })
}

#[derive(Debug, Clone)]
pub struct IzmestievData {
    pub unnormalized: DMatrix<f64>,
    /// Scaled so that all entries sum to one.
    pub normalized: DMatrix<f64>,
    /// Eigenvalues of the normalized matrix, descending.
    pub eigenvalues: Vec<f64>,
    /// Perron vector scaled into the simplex.
    pub perron: Vec<f64>,
    /// `|theta| <= zero_threshold` counts as a zero eigenvalue.
    pub zero_threshold: f64,
}

impl IzmestievData {
    pub fn from_unnormalized(unnormalized: DMatrix<f64>) -> Self {
        let n = unnormalized.nrows();
        let total = unnormalized.sum();
        let normalized = &unnormalized / total;
        let (eigenvalues, vectors) = sym_eigen_desc(&normalized);
        let norm2 = eigenvalues.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        let mut z: Vec<f64> = vectors.column(0).iter().copied().collect();
        let s: f64 = z.iter().sum();
        z.iter_mut().for_each(|v| *v /= s);
        IzmestievData { unnormalized, normalized, eigenvalues, perron: z, zero_threshold: n as f64 * norm2 * 1e-12 }
    }

    pub fn n(&self) -> usize {
        self.normalized.nrows()
    }

    /// Row sums of the normalized matrix (the Wachspress coordinates of the origin).
    pub fn row_sums(&self) -> Vec<f64> {
        self.normalized.row_iter().map(|r| r.sum()).collect()
    }

    /// Distinct eigenvalues with multiplicities, clustering values closer
    /// than the zero threshold.
    pub fn spectrum(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &t in &self.eigenvalues {
            match out.last_mut() {
                Some((v, k)) if (*v - t).abs() <= self.zero_threshold.max(1e-12 * v.abs()) => *k += 1,
                _ => out.push((if t.abs() <= self.zero_threshold { 0.0 } else { t }, 1)),
            }
        }
        out
    }

    pub fn positive_count(&self) -> usize {
        self.eigenvalues.iter().filter(|&&t| t > self.zero_threshold).count()
    }

    pub fn zero_count(&self) -> usize {
        self.eigenvalues.iter().filter(|&&t| t.abs() <= self.zero_threshold).count()
    }
}

fn polar_vertices(p: &Polytope) -> Result<HVertices> {
    if p.dim() < 2 {
        return Err(Error::DimensionMismatch("Izmestiev matrix needs dimension at least 2".into()));
    }
    polar(p)?.vertices_with_tol(p.tol())
}

/// Izmestiev matrix of `P` with respect to the origin, from relative
/// volumes of the codimension-2 faces of the polar dual.
pub fn izmestiev(p: &Polytope) -> Result<IzmestievData> {
    let hv = polar_vertices(p)?;
    let n = p.vertex_count();
    let verts = p.vertices();
    let mut m = DMatrix::zeros(n, n);
    for &(i, j) in p.edges() {
        let (a, b) = (&verts[i], &verts[j]);
        let cross2 = a.norm_squared() * b.norm_squared() - a.dot(b).powi(2);
        if cross2 <= 1e-24 * a.norm_squared() * b.norm_squared() {
            return Err(Error::OriginNotInterior);
        }
        let v = hv.relative_face_volume(&[i, j])? / cross2.sqrt();
        m[(i, j)] = v;
        m[(j, i)] = v;
    }
    for i in 0..n {
        let mut s = Point::zeros(p.dim());
        let mut size = 0.0;
        for &j in p.graph().neighbors(i) {
            s.axpy(m[(i, j)], &verts[j], 1.0);
            size += m[(i, j)] * verts[j].norm();
        }
        let pi = &verts[i];
        let mii = -pi.dot(&s) / pi.norm_squared();
        m[(i, i)] = mii;
        let residual = (s + pi * mii).norm();
        if residual > 1e3 * p.tol() * size {
            return Err(Error::InconsistentDiagonal { row: i, residual });
        }
    }
    Ok(IzmestievData::from_unnormalized(m))
}

fn polar_volume(p: &Polytope, c: &[f64]) -> Result<f64> {
    generalized_polar(p, c)?.vertices_with_tol(p.tol()).map(|hv| hv.volume())
}

/// Central second differences of `c -> vol(P°(c))` at `c = 1`.
pub fn izmestiev_fd(p: &Polytope, step: f64) -> Result<DMatrix<f64>> {
    if !(step > 0.0 && step <= 0.01) {
        return Err(Error::Invalid(format!("finite-difference step {step} outside (0, 0.01]")));
    }
    let n = p.vertex_count();
    let base = polar_volume(p, &vec![1.0; n])?;
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let h = step;
    let entries = pairs
        .par_iter()
        .map(|&(i, j)| {
            let at = |si: f64, sj: f64| {
                let mut c = vec![1.0; n];
                c[i] += si * h;
                c[j] += sj * h;
                polar_volume(p, &c)
            };
            if i == j {
                Ok((at(0.5, 0.5)? - 2.0 * base + at(-0.5, -0.5)?) / (h * h))
            } else {
                Ok((at(1.0, 1.0)? - at(1.0, -1.0)? - at(-1.0, 1.0)? + at(-1.0, -1.0)?) / (4.0 * h * h))
            }
        })
        .collect::<Vec<Result<f64>>>();
    let mut m = DMatrix::zeros(n, n);
    for (&(i, j), v) in pairs.iter().zip(entries) {
        let v = v?;
        m[(i, j)] = v;
        m[(j, i)] = v;
    }
    Ok(m)
}

/// Finite-difference Hessian with a step-halving error estimate.
#[derive(Debug, Clone)]
pub struct FdHessian {
    pub step: f64,
    pub matrix: DMatrix<f64>,
    /// Richardson extrapolation from steps `h` and `h/2`.
    pub extrapolated: DMatrix<f64>,
    /// Max-norm distance between the two step sizes.
    pub step_change: f64,
}

pub fn izmestiev_fd_checked(p: &Polytope, step: f64) -> Result<FdHessian> {
    let coarse = izmestiev_fd(p, step)?;
    let fine = izmestiev_fd(p, step / 2.0)?;
    let step_change = (&fine - &coarse).amax();
    let extrapolated = (&fine * 4.0 - &coarse) / 3.0;
    Ok(FdHessian { step: step / 2.0, matrix: fine, extrapolated, step_change })
}

#[derive(Debug, Clone, Serialize)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PropertyReport {
    pub checks: Vec<PropertyCheck>,
}

impl PropertyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().filter(|c| c.tolerance > 0.0).map(|c| c.residual).fold(0.0, f64::max)
    }
}

pub fn verify_izmestiev(p: &Polytope, data: &IzmestievData) -> PropertyReport {
    verify_izmestiev_with_tol(p, data, VERIFY_TOL)
}

pub fn verify_izmestiev_with_tol(p: &Polytope, data: &IzmestievData, tol: f64) -> PropertyReport {
    let m = &data.normalized;
    let n = data.n();
    let d = p.dim();
    let mut checks = Vec::new();
    let mut check =
        |name, passed, residual, tolerance| checks.push(PropertyCheck { name, passed, residual, tolerance });

    let min_edge = p.edges().iter().map(|&(i, j)| m[(i, j)]).fold(f64::INFINITY, f64::min);
    check("edge_positivity", min_edge > 0.0, (-min_edge).max(0.0), 0.0);

    let mut non_edge = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i != j && !p.graph().has_edge(i, j) {
                non_edge = non_edge.max(m[(i, j)].abs());
            }
        }
    }
    check("non_edge_zero", non_edge <= tol, non_edge, tol);

    let mut by_size: Vec<f64> = data.eigenvalues.iter().map(|t| t.abs()).collect();
    by_size.sort_by(f64::total_cmp);
    let kernel_res = by_size.get(d.saturating_sub(1)).copied().unwrap_or(0.0);
    check("kernel_dimension", data.zero_count() == d, kernel_res, data.zero_threshold);

    let x = p.coords();
    let kernel = max_abs(&(m * &x)) / (max_abs(m) * max_abs(&x)).max(f64::MIN_POSITIVE);
    check("kernel_contains_coordinates", kernel <= tol, kernel, tol);

    let positives = data.positive_count();
    let negatives = data.eigenvalues.iter().filter(|&&t| t < -data.zero_threshold).count();
    let signature = positives == 1 && data.zero_count() == d && negatives == n - 1 - d;
    check("spectral_signature", signature, 0.0, 0.0);

    let z = Point::from_column_slice(&data.perron);
    let theta = data.eigenvalues[0];
    let perron_res = (m * &z - &z * theta).norm() / z.norm();
    let min_z = data.perron.iter().copied().fold(f64::INFINITY, f64::min);
    check("perron_positive", min_z > 0.0 && perron_res <= tol, perron_res, tol);

    let row_res = match wachspress(p, &Point::zeros(d)) {
        Ok(w) => data.row_sums().iter().zip(&w.normalized).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
        Err(_) => f64::INFINITY,
    };
    check("row_sums_are_wachspress", row_res <= tol, row_res, tol);

    PropertyReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::shapes;

    #[test]
    fn square_matrix_in_closed_form() {
        let data = izmestiev(&shapes::square()).unwrap();
        let sq = shapes::square();
        for i in 0..4 {
            for j in 0..4 {
                let want = if sq.graph().has_edge(i, j) { 0.5 } else { 0.0 };
                assert!((data.unnormalized[(i, j)] - want).abs() < 1e-12);
            }
        }
        assert!(verify_izmestiev(&sq, &data).all_passed());
    }

    #[test]
    fn negated_edge_fails_positivity() {
        let sq = shapes::square();
        let mut m = izmestiev(&sq).unwrap().unnormalized;
        let (i, j) = sq.edges()[0];
        m[(i, j)] = -m[(i, j)];
        m[(j, i)] = -m[(j, i)];
        let report = verify_izmestiev(&sq, &IzmestievData::from_unnormalized(m));
        assert!(!report.get("edge_positivity").unwrap().passed);
    }

    #[test]
    fn triangle_has_equal_entries() {
        let t = shapes::triangle();
        let data = izmestiev(&t).unwrap();
        let m = &data.unnormalized;
        assert!((m[(0, 1)] - m[(1, 2)]).abs() < 1e-12 && (m[(0, 1)] - m[(0, 2)]).abs() < 1e-12);
        assert_eq!(data.zero_count(), 2);
    }

    #[test]
    fn wachspress_of_square_center_is_uniform() {
        let w = wachspress(&shapes::square(), &Point::zeros(2)).unwrap();
        for a in w.normalized {
            assert!((a - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn exterior_point_rejected() {
        let r = wachspress(&shapes::square(), &Point::from_vec(vec![2.0, 0.0]));
        assert!(matches!(r, Err(Error::PointNotInterior)));
    }

    #[test]
    fn fd_hessian_matches_triangle() {
        let t = shapes::triangle();
        let fd = izmestiev_fd_checked(&t, FD_STEP).unwrap();
        let m = izmestiev(&t).unwrap().unnormalized;
        assert!((&fd.extrapolated - &m).amax() < 1e-5);
        assert!(fd.step_change < 1e-5);
    }
}
