//! JSON file formats for polytopes, embeddings and reconstruction problems.
//!
//! Numbers are written as shortest round-trip decimals, so reading a file
//! and writing it back reproduces it byte for byte.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::expansion::GraphEmbedding;
use crate::geometry::Polytope;
use crate::graph::EdgeGraph;
use crate::linalg::Point;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolytopeFile {
    pub dimension: usize,
    pub vertices: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facets: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingFile {
    pub n: usize,
    pub ambient: usize,
    pub points: Vec<Vec<f64>>,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    pub lengths: Vec<f64>,
    pub alpha: Vec<f64>,
}

fn to_vecs(points: &[Point]) -> Vec<Vec<f64>> {
    points.iter().map(|p| p.iter().copied().collect()).collect()
}

fn to_points(rows: &[Vec<f64>], dim: usize) -> Result<Vec<Point>> {
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            if r.len() != dim {
                Err(Error::DimensionMismatch(format!("point {i} has {} coordinates, expected {dim}", r.len())))
            } else if r.iter().any(|x| !x.is_finite()) {
                Err(Error::Invalid(format!("point {i} has a non-finite coordinate")))
            } else {
                Ok(Point::from_column_slice(r))
            }
        })
        .collect()
}

impl PolytopeFile {
    pub fn from_polytope(p: &Polytope) -> Self {
        PolytopeFile {
            dimension: p.dim(),
            vertices: to_vecs(p.vertices()),
            facets: Some(p.facet_sets()),
            labels: p.labels().map(<[String]>::to_vec),
        }
    }

    /// Points only, letting the reader recompute the facets.
    pub fn from_points(points: &[Point]) -> Self {
        PolytopeFile {
            dimension: points.first().map_or(0, |p| p.len()),
            vertices: to_vecs(points),
            facets: None,
            labels: None,
        }
    }

    pub fn build(&self, tol: f64) -> Result<Polytope> {
        let pts = to_points(&self.vertices, self.dimension)?;
        let p = match &self.facets {
            Some(f) => Polytope::with_facets(pts, f.clone(), tol)?,
            None => Polytope::new(pts, tol)?,
        };
        if let Some(l) = &self.labels {
            if l.len() != p.vertex_count() {
                return Err(Error::Invalid(format!("{} labels for {} vertices", l.len(), p.vertex_count())));
            }
        }
        Ok(p.with_labels(self.labels.clone()))
    }
}

impl EmbeddingFile {
    pub fn from_embedding(q: &GraphEmbedding) -> Self {
        EmbeddingFile {
            n: q.points.len(),
            ambient: q.ambient(),
            points: to_vecs(&q.points),
            edges: q.graph.edges().iter().map(|&(i, j)| [i, j]).collect(),
        }
    }

    pub fn build(&self) -> Result<GraphEmbedding> {
        let graph = EdgeGraph::new(self.n, self.edges.iter().map(|e| (e[0], e[1])))?;
        GraphEmbedding::new(graph, to_points(&self.points, self.ambient)?)
    }
}

impl ProblemFile {
    pub fn graph(&self) -> Result<EdgeGraph> {
        EdgeGraph::new(self.n, self.edges.iter().map(|e| (e[0], e[1])))
    }

    /// Lengths re-ordered to match the sorted edge list of [`Self::graph`].
    pub fn sorted_lengths(&self, graph: &EdgeGraph) -> Result<Vec<f64>> {
        if self.lengths.len() != self.edges.len() {
            return Err(Error::Invalid(format!("{} lengths for {} edges", self.lengths.len(), self.edges.len())));
        }
        let mut out = vec![f64::NAN; graph.edge_count()];
        for (e, &l) in self.edges.iter().zip(&self.lengths) {
            let k = graph.edge_index(e[0], e[1]).expect("edge present in its own graph");
            out[k] = l;
        }
        Ok(out)
    }
}

/// A file holding either an embedding or a polytope (taken as its skeleton).
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum AnyEmbedding {
    Embedding(EmbeddingFile),
    Polytope(PolytopeFile),
}

impl AnyEmbedding {
    pub fn build(&self, tol: f64) -> Result<GraphEmbedding> {
        match self {
            AnyEmbedding::Embedding(e) => e.build(),
            AnyEmbedding::Polytope(p) => Ok(GraphEmbedding::skeleton(&p.build(tol)?)),
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text =
        fs::read_to_string(path).map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json(value)?)?;
    Ok(())
}

pub fn read_polytope(path: &Path, tol: f64) -> Result<Polytope> {
    read_json::<PolytopeFile>(path)?.build(tol)
}

pub fn read_embedding(path: &Path, tol: f64) -> Result<GraphEmbedding> {
    read_json::<AnyEmbedding>(path)?.build(tol)
}

pub fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn ser_matrix<S: Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    matrix_rows(m).serialize(s)
}

pub fn ser_point<S: Serializer>(p: &Point, s: S) -> std::result::Result<S::Ok, S::Error> {
    p.as_slice().serialize(s)
}

pub fn ser_points<S: Serializer>(p: &[Point], s: S) -> std::result::Result<S::Ok, S::Error> {
    to_vecs(p).serialize(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::shapes;

    #[test]
    fn polytope_round_trip_is_byte_stable() {
        let f = PolytopeFile::from_polytope(&shapes::simplex(3));
        let text = to_json(&f).unwrap();
        let back: PolytopeFile = serde_json::from_str(&text).unwrap();
        assert_eq!(to_json(&back).unwrap(), text);
        let p = back.build(1e-9).unwrap();
        assert_eq!(p.vertex_count(), 4);
    }

    #[test]
    fn polytope_file_without_facets() {
        let text = r#"{"dimension": 2, "vertices": [[1,1],[-1,1],[-1,-1],[1,-1]]}"#;
        let p: PolytopeFile = serde_json::from_str(text).unwrap();
        assert_eq!(p.build(1e-9).unwrap().edges().len(), 4);
    }

    #[test]
    fn problem_lengths_follow_sorted_edges() {
        let f = ProblemFile {
            n: 3,
            edges: vec![[2, 1], [0, 1], [0, 2]],
            lengths: vec![3.0, 1.0, 2.0],
            alpha: vec![1.0 / 3.0; 3],
        };
        let g = f.graph().unwrap();
        assert_eq!(f.sorted_lengths(&g).unwrap(), vec![1.0, 2.0, 3.0]);
    }
}
