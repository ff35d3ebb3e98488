use std::collections::{HashMap, HashSet};

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::geometry::polytope::DEFAULT_TOL;
use crate::linalg::{centroid, solve_small, AffineFrame, Point};
use crate::lp::positive_combination_margin;

/// Polyhedron `{x : <x, normal_i> <= offset_i}`.
#[derive(Debug, Clone)]
pub struct HPolytope {
    normals: Vec<Point>,
    offsets: Vec<f64>,
}

impl HPolytope {
    pub fn new(normals: Vec<Point>, offsets: Vec<f64>) -> Result<Self> {
        if normals.len() != offsets.len() {
            return Err(Error::DimensionMismatch(format!("{} normals but {} offsets", normals.len(), offsets.len())));
        }
        let dim = normals.first().map_or(0, |p| p.len());
        if dim == 0 || normals.iter().any(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch("normals of mixed or zero dimension".into()));
        }
        Ok(HPolytope { normals, offsets })
    }

    pub fn dim(&self) -> usize {
        self.normals[0].len()
    }

    pub fn constraint_count(&self) -> usize {
        self.normals.len()
    }

    pub fn normals(&self) -> &[Point] {
        &self.normals
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn contains(&self, x: &Point) -> bool {
        self.normals.iter().zip(&self.offsets).all(|(p, c)| p.dot(x) <= *c)
    }

    /// Bounded iff the normals positively span the space, i.e. the origin
    /// is interior to their convex hull.
    pub fn is_bounded(&self) -> bool {
        let dim = self.dim();
        let zero = Point::zeros(dim);
        let spans = AffineFrame::new(std::iter::once(&zero).chain(self.normals.iter()), 1e-12).dim() == dim;
        spans && positive_combination_margin(&self.normals, &zero, true, 1.0).is_some_and(|t| t > 1e-12)
    }

    /// Enumerates vertices by intersecting every `d`-subset of constraint
    /// hyperplanes and keeping the feasible points.
    pub fn vertices(&self) -> Result<HVertices> {
        self.vertices_with_tol(DEFAULT_TOL)
    }

    pub fn vertices_with_tol(&self, tol: f64) -> Result<HVertices> {
        if !self.is_bounded() {
            return Err(Error::Unbounded);
        }
        let d = self.dim();
        let m = self.normals.len();
        let mut points: Vec<Point> = Vec::new();
        let mut a = vec![0.0; d * d];
        let mut b = vec![0.0; d];
        for combo in (0..m).combinations(d) {
            for (r, &i) in combo.iter().enumerate() {
                a[r * d..(r + 1) * d].copy_from_slice(self.normals[i].as_slice());
                b[r] = self.offsets[i];
            }
            if solve_small(&mut a, &mut b, d, 1e-12).is_none() {
                continue;
            }
            let x = Point::from_column_slice(&b);
            if !self.feasible(&x, tol) {
                continue;
            }
            let merge = 10.0 * tol * (1.0 + x.norm());
            if points.iter().all(|y| (y - &x).norm() > merge) {
                points.push(x);
            }
        }
        if points.len() <= d || crate::linalg::affine_rank(&points, 1e-10) < d {
            return Err(Error::EmptyInterior);
        }
        let mut tight = vec![Vec::new(); points.len()];
        let mut by_constraint = vec![Vec::new(); m];
        for (v, x) in points.iter().enumerate() {
            for j in 0..m {
                if self.slack(j, x).abs() <= self.slack_tol(j, x, tol) {
                    tight[v].push(j);
                    by_constraint[j].push(v);
                }
            }
        }
        Ok(HVertices { points, tight, by_constraint })
    }

    fn slack(&self, j: usize, x: &Point) -> f64 {
        self.normals[j].dot(x) - self.offsets[j]
    }

    fn slack_tol(&self, j: usize, x: &Point, tol: f64) -> f64 {
        tol * self.normals[j].norm() * (1.0 + x.norm()).max(self.offsets[j].abs())
    }

    fn feasible(&self, x: &Point, tol: f64) -> bool {
        (0..self.normals.len()).all(|j| self.slack(j, x) <= self.slack_tol(j, x, tol))
    }

    pub fn volume(&self) -> Result<f64> {
        Ok(self.vertices()?.volume())
    }

    /// Relative volume of the face where all constraints in `active` are
    /// tight, measured in its own affine hull (0-faces count as 1).
    pub fn relative_face_volume(&self, active: &[usize]) -> Result<f64> {
        self.vertices()?.relative_face_volume(active)
    }
}

/// Vertex enumeration of an [`HPolytope`] with incidence data.
#[derive(Debug, Clone)]
pub struct HVertices {
    pub points: Vec<Point>,
    /// Tight constraints per vertex.
    pub tight: Vec<Vec<usize>>,
    /// Vertices per constraint.
    pub by_constraint: Vec<Vec<usize>>,
}

impl HVertices {
    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    /// Vertices on which every constraint in `active` is tight.
    pub fn face_vertices(&self, active: &[usize]) -> Vec<usize> {
        let mut iter = active.iter();
        let Some(&first) = iter.next() else {
            return (0..self.points.len()).collect();
        };
        let mut out = self.by_constraint[first].clone();
        for &j in iter {
            out = crate::geometry::polytope::intersect(&out, &self.by_constraint[j]);
        }
        out
    }

    pub fn volume(&self) -> f64 {
        let all: Vec<usize> = (0..self.points.len()).collect();
        let mut memo = HashMap::new();
        self.face_volume(&all, self.dim(), &mut memo)
    }

    pub fn relative_face_volume(&self, active: &[usize]) -> Result<f64> {
        let verts = self.face_vertices(active);
        if verts.is_empty() {
            return Err(Error::EmptyFace);
        }
        let d = self.dim();
        let expected = d
            .checked_sub(active.len())
            .ok_or_else(|| Error::DimensionMismatch(format!("{} active constraints in dimension {d}", active.len())))?;
        let k = self.frame(&verts).dim();
        if k < expected {
            return Ok(0.0);
        }
        if k > expected {
            return Err(Error::DimensionMismatch(format!("face has dimension {k}, expected {expected}")));
        }
        let mut memo = HashMap::new();
        Ok(self.face_volume(&verts, k, &mut memo))
    }

    fn frame(&self, verts: &[usize]) -> AffineFrame {
        AffineFrame::new(verts.iter().map(|&v| &self.points[v]), 1e-9)
    }

    /// k-volume of the face with vertex set `verts`, by coning from the
    /// vertex centroid over its facets.
    fn face_volume(&self, verts: &[usize], k: usize, memo: &mut HashMap<Vec<usize>, f64>) -> f64 {
        if k == 0 {
            return 1.0;
        }
        if let Some(&v) = memo.get(verts) {
            return v;
        }
        let pts: Vec<Point> = verts.iter().map(|&v| self.points[v].clone()).collect();
        let center = centroid(&pts);
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut total = 0.0;
        for members in &self.by_constraint {
            let sub = crate::geometry::polytope::intersect(verts, members);
            if sub.len() < k || sub.len() == verts.len() || !seen.insert(sub.clone()) {
                continue;
            }
            let frame = self.frame(&sub);
            if frame.dim() != k - 1 {
                continue;
            }
            let h = frame.distance(&center);
            total += h / k as f64 * self.face_volume(&sub, k - 1, memo);
        }
        memo.insert(verts.to_vec(), total);
        total
    }
}
