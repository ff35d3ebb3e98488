use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Finite simple graph on vertices `0..n`. Edges are stored as sorted
/// pairs `(i, j)` with `i < j`, in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl EdgeGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::Invalid(format!("edge ({a},{b}) out of range for {n} vertices")));
            }
            if a == b {
                return Err(Error::Invalid(format!("loop at vertex {a}")));
            }
            set.insert((a.min(b), a.max(b)));
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for adj in adjacency.iter_mut() {
            adj.sort_unstable();
        }
        Ok(EdgeGraph { n, edges, adjacency })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&j).is_ok()
    }

    /// Position of edge `{i, j}` in [`EdgeGraph::edges`].
    pub fn edge_index(&self, i: usize, j: usize) -> Option<usize> {
        self.edges.binary_search(&(i.min(j), i.max(j))).ok()
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_and_dedupes_edges() {
        let g = EdgeGraph::new(3, [(1, 0), (0, 1), (2, 1)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert!(g.has_edge(2, 1));
        assert_eq!(g.edge_index(2, 1), Some(1));
        assert!(g.is_connected());
    }

    #[test]
    fn detects_disconnected_graph() {
        let g = EdgeGraph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert!(!g.is_connected());
    }

    #[test]
    fn rejects_loops_and_out_of_range() {
        assert!(EdgeGraph::new(2, [(0, 0)]).is_err());
        assert!(EdgeGraph::new(2, [(0, 2)]).is_err());
    }
}
