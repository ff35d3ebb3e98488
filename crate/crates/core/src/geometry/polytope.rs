use std::collections::{BTreeSet, HashSet};

use itertools::Itertools;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::EdgeGraph;
use crate::linalg::{affine_rank, centroid, null_space, rows_matrix, AffineFrame, Point};

/// Default relative tolerance for on-hyperplane and interior tests.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Supporting hyperplane `{x : <normal, x> = offset}` of a facet, with
/// `normal` of unit length pointing outward.
#[derive(Debug, Clone)]
pub struct Facet {
    pub vertices: Vec<usize>,
    pub normal: Point,
    pub offset: f64,
}

/// A full-dimensional convex polytope given by its vertices, together
/// with the face lattice and edge-graph derived from facet incidences.
#[derive(Debug, Clone)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Point>,
    facets: Vec<Facet>,
    /// `faces[k]` lists the k-faces as sorted vertex-index sets.
    faces: Vec<Vec<Vec<usize>>>,
    graph: EdgeGraph,
    labels: Option<Vec<String>>,
    tol: f64,
}

fn on_plane_slack(p: &Point, tol: f64) -> f64 {
    tol * (1.0 + p.norm())
}

impl Polytope {
    /// Builds the polytope spanned by `points`, all of which must be
    /// vertices. Facets are found by scanning every hyperplane through `d`
    /// affinely independent input points.
    pub fn new(points: Vec<Point>, tol: f64) -> Result<Self> {
        let dim = check_points(&points, tol)?;
        let facet_sets = scan_facets(&points, dim, tol);
        Self::assemble(dim, points, facet_sets, tol)
    }

    /// Builds the polytope from vertices and a trusted facet list, which is
    /// validated rather than recomputed.
    pub fn with_facets(points: Vec<Point>, facets: Vec<Vec<usize>>, tol: f64) -> Result<Self> {
        let dim = check_points(&points, tol)?;
        let n = points.len();
        let mut sets = Vec::with_capacity(facets.len());
        let mut seen = HashSet::new();
        for f in facets {
            let mut f: Vec<usize> = f.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
            if let Some(&bad) = f.iter().find(|&&i| i >= n) {
                return Err(Error::InvalidFacets(format!("vertex index {bad} out of range")));
            }
            f.shrink_to_fit();
            if !seen.insert(f.clone()) {
                return Err(Error::InvalidFacets(format!("duplicate facet {f:?}")));
            }
            sets.push(f);
        }
        Self::assemble(dim, points, sets, tol)
    }

    fn assemble(dim: usize, vertices: Vec<Point>, facet_sets: Vec<Vec<usize>>, tol: f64) -> Result<Self> {
        let n = vertices.len();
        let center = centroid(&vertices);
        let mut facets = Vec::with_capacity(facet_sets.len());
        for set in facet_sets {
            let facet = fit_facet(&vertices, set, &center, dim, tol)?;
            facets.push(facet);
        }
        if facets.len() < dim + 1 {
            return Err(Error::InvalidFacets(format!("only {} facets", facets.len())));
        }

        // every vertex must be cut out by the facets through it
        for i in 0..n {
            let through: Vec<&Facet> = facets.iter().filter(|f| f.vertices.binary_search(&i).is_ok()).collect();
            if through.is_empty() {
                return Err(Error::RedundantVertex(i));
            }
            let meet = through.iter().skip(1).fold(through[0].vertices.clone(), |acc, f| intersect(&acc, &f.vertices));
            if meet != [i] {
                return Err(Error::RedundantVertex(i));
            }
        }

        let faces = face_lattice(dim, &vertices, &facets, tol);
        if dim >= 2 {
            for ridge in &faces[dim - 2] {
                let count = facets.iter().filter(|f| is_subset(ridge, &f.vertices)).count();
                if count != 2 {
                    return Err(Error::InvalidFacets(format!("ridge {ridge:?} lies in {count} facets")));
                }
            }
        }
        let edges: Vec<(usize, usize)> =
            if dim >= 2 { faces[1].iter().map(|e| (e[0], e[1])).collect() } else { vec![(0, 1)] };
        let graph = EdgeGraph::new(n, edges)?;
        if !graph.is_connected() {
            return Err(Error::InvalidFacets("edge-graph is disconnected".into()));
        }
        Ok(Polytope { dim, vertices, facets, faces, graph, labels: None, tol })
    }

    pub fn with_labels(mut self, labels: Option<Vec<String>>) -> Self {
        self.labels = labels;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &Point {
        &self.vertices[i]
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// The k-faces for `0 <= k < dim`.
    pub fn faces(&self, k: usize) -> &[Vec<usize>] {
        &self.faces[k]
    }

    /// Face counts `f_0, ..., f_{d-1}`.
    pub fn f_vector(&self) -> Vec<usize> {
        self.faces.iter().map(Vec::len).collect()
    }

    pub fn graph(&self) -> &EdgeGraph {
        &self.graph
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        self.graph.edges()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Vertex-coordinate matrix with one row per vertex.
    pub fn coords(&self) -> DMatrix<f64> {
        rows_matrix(&self.vertices)
    }

    pub fn facet_sets(&self) -> Vec<Vec<usize>> {
        self.facets.iter().map(|f| f.vertices.clone()).collect()
    }

    pub fn edge_lengths(&self) -> Vec<f64> {
        self.edges().iter().map(|&(i, j)| (&self.vertices[i] - &self.vertices[j]).norm()).collect()
    }

    /// Largest distance of a vertex from the vertex centroid.
    pub fn scale(&self) -> f64 {
        let c = centroid(&self.vertices);
        self.vertices.iter().map(|p| (p - &c).norm()).fold(0.0, f64::max)
    }

    /// Signed distance of `x` to the boundary: positive inside.
    pub fn interior_margin(&self, x: &Point) -> f64 {
        self.facets.iter().map(|f| f.offset - f.normal.dot(x)).fold(f64::INFINITY, f64::min)
    }

    /// `x` lies in the interior with margin at least `tol * (1 + scale)`.
    pub fn contains_interior(&self, x: &Point) -> bool {
        x.len() == self.dim && self.interior_margin(x) > self.tol * (1.0 + self.scale())
    }

    pub fn translated(&self, shift: &Point) -> Polytope {
        let mut out = self.clone();
        for v in out.vertices.iter_mut() {
            *v -= shift;
        }
        for f in out.facets.iter_mut() {
            f.offset -= f.normal.dot(shift);
        }
        out
    }

    /// Image under an invertible linear map; the combinatorics carry over.
    pub fn linear_image(&self, map: &DMatrix<f64>) -> Result<Polytope> {
        let pts: Vec<Point> = self.vertices.iter().map(|p| map * p).collect();
        let dim = check_points(&pts, self.tol)?;
        Self::assemble(dim, pts, self.facet_sets(), self.tol).map(|p| p.with_labels(self.labels.clone()))
    }

    /// Edge test by facet incidences: `{i, j}` is an edge iff the facets
    /// containing both meet in exactly `{i, j}`.
    pub fn is_edge_by_facets(&self, i: usize, j: usize) -> bool {
        let mut meet: Option<Vec<usize>> = None;
        for f in &self.facets {
            if f.vertices.binary_search(&i).is_ok() && f.vertices.binary_search(&j).is_ok() {
                meet = Some(match meet {
                    None => f.vertices.clone(),
                    Some(m) => intersect(&m, &f.vertices),
                });
            }
        }
        let mut pair = vec![i, j];
        pair.sort_unstable();
        meet.is_some_and(|m| m == pair)
    }

    /// Same vertex count and same labelled facet sets.
    pub fn is_comb_equivalent(&self, other: &Polytope) -> bool {
        if self.dim != other.dim || self.vertex_count() != other.vertex_count() {
            return false;
        }
        let a: HashSet<Vec<usize>> = self.facet_sets().into_iter().collect();
        let b: HashSet<Vec<usize>> = other.facet_sets().into_iter().collect();
        a == b
    }
}

fn check_points(points: &[Point], tol: f64) -> Result<usize> {
    let dim = points.first().map_or(0, |p| p.len());
    if dim == 0 {
        return Err(Error::DegenerateInput { dim, got: points.len() });
    }
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch("points of mixed dimension".into()));
    }
    if points.iter().any(|p| p.iter().any(|x| !x.is_finite())) {
        return Err(Error::Invalid("non-finite coordinate".into()));
    }
    if points.len() <= dim {
        return Err(Error::DegenerateInput { dim, got: points.len() });
    }
    let rank = affine_rank(points, tol);
    if rank < dim {
        return Err(Error::NotFullDimensional { dim, rank });
    }
    Ok(dim)
}

fn scan_facets(points: &[Point], dim: usize, tol: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for combo in (0..n).combinations(dim) {
        let base = &points[combo[0]];
        let normal = if dim == 1 {
            Point::from_element(1, 1.0)
        } else {
            let diffs = DMatrix::from_fn(dim - 1, dim, |r, k| points[combo[r + 1]][k] - base[k]);
            let ns = null_space(&diffs, 1e-10);
            if ns.ncols() != 1 {
                continue;
            }
            ns.column(0).into_owned()
        };
        let offset = normal.dot(base);
        let mut on = Vec::new();
        let (mut above, mut below) = (false, false);
        for (i, p) in points.iter().enumerate() {
            let s = normal.dot(p) - offset;
            let slack = on_plane_slack(p, tol);
            if s.abs() <= slack {
                on.push(i);
            } else if s > 0.0 {
                above = true;
            } else {
                below = true;
            }
            if above && below {
                break;
            }
        }
        if above && below {
            continue;
        }
        if seen.insert(on.clone()) {
            out.push(on);
        }
    }
    out
}

fn fit_facet(points: &[Point], set: Vec<usize>, center: &Point, dim: usize, tol: f64) -> Result<Facet> {
    let pts: Vec<Point> = set.iter().map(|&i| points[i].clone()).collect();
    if set.len() < dim || affine_rank(&pts, tol) != dim - 1 {
        return Err(Error::InvalidFacets(format!("facet {set:?} does not span a hyperplane")));
    }
    let c = centroid(&pts);
    let centered = DMatrix::from_fn(pts.len(), dim, |r, k| pts[r][k] - c[k]);
    // right singular vector of the smallest singular value
    let mut normal = if dim == 1 {
        Point::from_element(1, 1.0)
    } else {
        let rows = centered.nrows().max(dim);
        let mut padded = DMatrix::zeros(rows, dim);
        padded.view_mut((0, 0), (centered.nrows(), dim)).copy_from(&centered);
        let svd = padded.svd(false, true);
        let v_t = svd.v_t.unwrap();
        let k = svd.singular_values.imin();
        v_t.row(k).transpose()
    };
    normal.normalize_mut();
    let mut offset = normal.dot(&c);
    if normal.dot(center) > offset {
        normal = -normal;
        offset = -offset;
    }
    for (i, p) in points.iter().enumerate() {
        let s = normal.dot(p) - offset;
        let slack = on_plane_slack(p, tol);
        let member = set.binary_search(&i).is_ok();
        if member && s.abs() > slack {
            return Err(Error::InvalidFacets(format!("vertex {i} is off its facet plane by {s:e}")));
        }
        if !member && s > -slack {
            return Err(Error::InvalidFacets(format!("vertex {i} is not strictly inside facet {set:?}")));
        }
    }
    Ok(Facet { vertices: set, normal, offset })
}

fn face_lattice(dim: usize, points: &[Point], facets: &[Facet], tol: f64) -> Vec<Vec<Vec<usize>>> {
    let mut all: HashSet<Vec<usize>> = HashSet::new();
    let mut queue: Vec<Vec<usize>> = Vec::new();
    for f in facets {
        if all.insert(f.vertices.clone()) {
            queue.push(f.vertices.clone());
        }
    }
    while let Some(face) = queue.pop() {
        for f in facets {
            let meet = intersect(&face, &f.vertices);
            if !meet.is_empty() && all.insert(meet.clone()) {
                queue.push(meet);
            }
        }
    }
    let mut faces = vec![Vec::new(); dim];
    for face in all {
        let pts: Vec<Point> = face.iter().map(|&i| points[i].clone()).collect();
        let k = AffineFrame::new(pts.iter(), tol).dim();
        if k < dim {
            faces[k].push(face);
        }
    }
    for layer in faces.iter_mut() {
        layer.sort();
    }
    faces
}

pub(crate) fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    small.iter().all(|x| big.binary_search(x).is_ok())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::shapes;

    #[test]
    fn square_combinatorics() {
        let sq = shapes::square();
        assert_eq!(sq.facets().len(), 4);
        assert_eq!(sq.edges().len(), 4);
        for i in 0..4 {
            assert_eq!(sq.graph().neighbors(i).len(), 2);
        }
    }

    #[test]
    fn cube_combinatorics() {
        let c = shapes::cube();
        assert_eq!(c.vertex_count(), 8);
        assert_eq!(c.f_vector(), vec![8, 12, 6]);
        for f in c.facets() {
            assert_eq!(f.vertices.len(), 4);
        }
    }

    #[test]
    fn rejects_interior_point() {
        let mut pts = shapes::square().vertices().to_vec();
        pts.push(Point::from_vec(vec![0.1, 0.2]));
        assert!(matches!(Polytope::new(pts, DEFAULT_TOL), Err(Error::RedundantVertex(4))));
    }

    #[test]
    fn rejects_point_on_edge_and_duplicates() {
        let mut pts = shapes::square().vertices().to_vec();
        pts.push(Point::from_vec(vec![1.0, 0.0]));
        assert!(matches!(Polytope::new(pts, DEFAULT_TOL), Err(Error::RedundantVertex(_))));
        let mut pts = shapes::square().vertices().to_vec();
        pts.push(pts[0].clone());
        assert!(matches!(Polytope::new(pts, DEFAULT_TOL), Err(Error::RedundantVertex(_))));
    }

    #[test]
    fn rejects_flat_and_tiny_inputs() {
        let flat = vec![
            Point::from_vec(vec![0.0, 0.0, 0.0]),
            Point::from_vec(vec![1.0, 0.0, 0.0]),
            Point::from_vec(vec![0.0, 1.0, 0.0]),
            Point::from_vec(vec![1.0, 1.0, 0.0]),
        ];
        assert!(matches!(Polytope::new(flat, DEFAULT_TOL), Err(Error::NotFullDimensional { dim: 3, rank: 2 })));
        let two = vec![Point::from_vec(vec![0.0, 0.0]), Point::from_vec(vec![1.0, 0.0])];
        assert!(matches!(Polytope::new(two, DEFAULT_TOL), Err(Error::DegenerateInput { .. })));
    }

    #[test]
    fn trusted_facets_are_validated() {
        let sq = shapes::square();
        let pts = sq.vertices().to_vec();
        let ok = Polytope::with_facets(pts.clone(), sq.facet_sets(), DEFAULT_TOL).unwrap();
        assert_eq!(ok.edges(), sq.edges());
        // a diagonal is not a facet
        let mut bad = sq.facet_sets();
        bad[0] = vec![0, 3];
        assert!(Polytope::with_facets(pts.clone(), bad, DEFAULT_TOL).is_err());
        let missing = sq.facet_sets()[1..].to_vec();
        assert!(Polytope::with_facets(pts, missing, DEFAULT_TOL).is_err());
    }

    #[test]
    fn translation_keeps_facets_consistent() {
        let c = shapes::cube();
        let shift = Point::from_vec(vec![0.3, -0.2, 0.1]);
        let t = c.translated(&shift);
        for f in t.facets() {
            for &i in &f.vertices {
                assert!((f.normal.dot(t.vertex(i)) - f.offset).abs() < 1e-12);
            }
        }
        assert!(t.contains_interior(&(-shift)));
    }
}
