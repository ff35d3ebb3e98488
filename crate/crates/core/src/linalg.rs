//! Small dense linear-algebra helpers shared by the geometric modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub type Point = DVector<f64>;

/// Stacks points as the rows of an `n x d` matrix.
pub fn rows_matrix(points: &[Point]) -> DMatrix<f64> {
    let n = points.len();
    let d = points.first().map_or(0, |p| p.len());
    DMatrix::from_fn(n, d, |i, k| points[i][k])
}

pub fn matrix_rows(m: &DMatrix<f64>) -> Vec<Point> {
    (0..m.nrows()).map(|i| m.row(i).transpose()).collect()
}

pub fn centroid(points: &[Point]) -> Point {
    let d = points.first().map_or(0, |p| p.len());
    let mut c = Point::zeros(d);
    for p in points {
        c += p;
    }
    if !points.is_empty() {
        c /= points.len() as f64;
    }
    c
}

pub fn weighted_sum(weights: &[f64], points: &[Point]) -> Point {
    let d = points.first().map_or(0, |p| p.len());
    let mut c = Point::zeros(d);
    for (w, p) in weights.iter().zip(points) {
        c.axpy(*w, p, 1.0);
    }
    c
}

/// Orthonormal frame of the affine hull of a point set.
#[derive(Debug, Clone)]
pub struct AffineFrame {
    pub origin: Point,
    /// Columns form an orthonormal basis of the direction space.
    pub basis: Vec<Point>,
}

impl AffineFrame {
    /// Greedy Gram-Schmidt with pivoting on the largest residual. A direction
    /// is accepted when its residual exceeds `tol` times the spread of the set.
    pub fn new<'a, I>(points: I, tol: f64) -> Self
    where
        I: IntoIterator<Item = &'a Point>,
    {
        let pts: Vec<&Point> = points.into_iter().collect();
        let origin = pts[0].clone();
        let mut residuals: Vec<Point> = pts.iter().map(|p| *p - &origin).collect();
        let scale = residuals.iter().map(|r| r.norm()).fold(0.0, f64::max);
        let mut basis = Vec::new();
        if scale == 0.0 {
            return AffineFrame { origin, basis };
        }
        let dim = origin.len();
        while basis.len() < dim {
            let (best, norm) = residuals.iter().enumerate().map(|(i, r)| (i, r.norm())).fold((0, 0.0), |acc, x| {
                if x.1 > acc.1 {
                    x
                } else {
                    acc
                }
            });
            if norm <= tol * scale {
                break;
            }
            let mut q = &residuals[best] / norm;
            // second pass against earlier directions
            for b in &basis {
                let c = q.dot(b);
                q.axpy(-c, b, 1.0);
            }
            q.normalize_mut();
            for r in residuals.iter_mut() {
                let c = r.dot(&q);
                r.axpy(-c, &q, 1.0);
            }
            basis.push(q);
        }
        AffineFrame { origin, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Euclidean distance from `x` to the affine hull.
    pub fn distance(&self, x: &Point) -> f64 {
        let mut r = x - &self.origin;
        for b in &self.basis {
            let c = r.dot(b);
            r.axpy(-c, b, 1.0);
        }
        r.norm()
    }

    /// Coordinates of `x` in the frame.
    pub fn coordinates(&self, x: &Point) -> Point {
        let r = x - &self.origin;
        Point::from_iterator(self.basis.len(), self.basis.iter().map(|b| r.dot(b)))
    }
}

pub fn affine_rank(points: &[Point], tol: f64) -> usize {
    if points.is_empty() {
        return 0;
    }
    AffineFrame::new(points.iter(), tol).dim()
}

/// Orthonormal basis (as columns) of the null space of `a`.
pub fn null_space(a: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let cols = a.ncols();
    if cols == 0 {
        return DMatrix::zeros(0, 0);
    }
    let rows = a.nrows().max(cols);
    let mut padded = DMatrix::zeros(rows, cols);
    padded.view_mut((0, 0), (a.nrows(), cols)).copy_from(a);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.max();
    let cut = rel_tol * smax.max(f64::MIN_POSITIVE);
    let keep: Vec<usize> = (0..cols).filter(|&k| smax == 0.0 || svd.singular_values[k] <= cut).collect();
    DMatrix::from_fn(cols, keep.len(), |i, j| v_t[(keep[j], i)])
}

/// Eigen-decomposition of a symmetric matrix with eigenvalues in
/// descending order; eigenvectors are the matching columns.
pub fn sym_eigen_desc(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym.clone());
    let (vals, vecs) = jacobi_polish(&sym, eig.eigenvalues.as_slice().to_vec(), eig.eigenvectors);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    let values = order.iter().map(|&k| vals[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| vecs[(i, order[j])]);
    (values, vectors)
}

/// Cyclic Jacobi sweeps on `vᵀ m v`, run only when the QR result has
/// residuals well above roundoff.
fn jacobi_polish(m: &DMatrix<f64>, vals: Vec<f64>, v: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let norm = max_abs(m).max(f64::MIN_POSITIVE);
    let lambda = DMatrix::from_diagonal(&DVector::from_vec(vals.clone()));
    let resid = m * &v - &v * lambda;
    if max_abs(&resid) <= 1e-13 * norm * n as f64 {
        return (vals, v);
    }
    let mut a = v.transpose() * m * &v;
    let mut v = v;
    for _ in 0..30 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(a[(p, q)].abs());
            }
        }
        if off <= 1e-17 * norm {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|k| a[(k, k)]).collect(), v)
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let (vals, _) = sym_eigen_desc(m);
    *vals.last().unwrap()
}

/// Solves the `d x d` system `a x = b` in place by Gaussian elimination
/// with partial pivoting. Returns `None` when a pivot falls below
/// `rel_tol` times the largest row norm.
pub fn solve_small(a: &mut [f64], b: &mut [f64], d: usize, rel_tol: f64) -> Option<()> {
    let mut scale = 0.0f64;
    for i in 0..d {
        let mut s = 0.0;
        for k in 0..d {
            s += a[i * d + k] * a[i * d + k];
        }
        scale = scale.max(s.sqrt());
    }
    if scale == 0.0 {
        return None;
    }
    for col in 0..d {
        let mut piv = col;
        let mut best = a[col * d + col].abs();
        for r in col + 1..d {
            let v = a[r * d + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best <= rel_tol * scale {
            return None;
        }
        if piv != col {
            for k in 0..d {
                a.swap(col * d + k, piv * d + k);
            }
            b.swap(col, piv);
        }
        let p = a[col * d + col];
        for r in col + 1..d {
            let f = a[r * d + col] / p;
            if f != 0.0 {
                for k in col..d {
                    a[r * d + k] -= f * a[col * d + k];
                }
                b[r] -= f * b[col];
            }
        }
    }
    for col in (0..d).rev() {
        let mut s = b[col];
        for k in col + 1..d {
            s -= a[col * d + k] * b[k];
        }
        b[col] = s / a[col * d + col];
    }
    Some(())
}

/// Moore-Penrose pseudo-inverse with a relative singular-value cut.
pub fn pinv(a: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return DMatrix::zeros(a.ncols(), a.nrows());
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let u = svd.u.unwrap();
    let v_t = svd.v_t.unwrap();
    let mut out = DMatrix::zeros(a.ncols(), a.nrows());
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > rel_tol * smax && s > 0.0 {
            out += (v_t.row(k).transpose() * u.column(k).transpose()) / s;
        }
    }
    out
}

/// Orthonormal basis of the skew-symmetric matrices in dimension `d`,
/// i.e. the infinitesimal rotations `E_ab = e_a e_b^T - e_b e_a^T`.
pub fn skew_basis(d: usize) -> Vec<DMatrix<f64>> {
    let mut out = Vec::new();
    for a in 0..d {
        for b in a + 1..d {
            let mut m = DMatrix::zeros(d, d);
            m[(a, b)] = 1.0;
            m[(b, a)] = -1.0;
            out.push(m);
        }
    }
    out
}

pub fn gram(points: &[Point]) -> DMatrix<f64> {
    let n = points.len();
    DMatrix::from_fn(n, n, |i, j| points[i].dot(&points[j]))
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, &b| a.max(b.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_rank_of_coplanar_points() {
        let pts = vec![
            Point::from_vec(vec![0.0, 0.0, 1.0]),
            Point::from_vec(vec![1.0, 0.0, 1.0]),
            Point::from_vec(vec![0.0, 1.0, 1.0]),
            Point::from_vec(vec![1.0, 1.0, 1.0]),
        ];
        assert_eq!(affine_rank(&pts, 1e-9), 2);
        let f = AffineFrame::new(pts.iter(), 1e-9);
        assert!((f.distance(&Point::from_vec(vec![0.3, 0.3, 3.0])) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let a = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let ns = null_space(&a, 1e-12);
        assert_eq!(ns.ncols(), 2);
        assert!((a * ns).norm() < 1e-12);
    }

    #[test]
    fn small_solver_matches_lu() {
        let mut a = vec![2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0];
        let mut b = vec![1.0, 2.0, 3.0];
        let m = DMatrix::from_row_slice(3, 3, &a);
        let x = m.clone().lu().solve(&DVector::from_vec(b.clone())).unwrap();
        solve_small(&mut a, &mut b, 3, 1e-14).unwrap();
        for k in 0..3 {
            assert!((x[k] - b[k]).abs() < 1e-14);
        }
        let mut sing = vec![1.0, 2.0, 2.0, 4.0];
        assert!(solve_small(&mut sing, &mut [1.0, 1.0], 2, 1e-12).is_none());
    }

    #[test]
    fn pinv_recovers_inverse() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0]);
        let p = pinv(&m, 1e-12);
        assert!((p * &m - DMatrix::identity(2, 2)).norm() < 1e-12);
    }
}
