//! Undirected multigraph with parallel edges and self-loops.
//!
//! Vertex and edge ids are stable: removing an element never renumbers the
//! others, and fresh edge ids are drawn from a high-water mark so an id is
//! never handed out twice within the lifetime of a graph and its descendants.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vertex(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type VertexSet = BTreeSet<Vertex>;

/// A vertex or an edge; the ground set of three-colorings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Element {
    Vertex(Vertex),
    Edge(EdgeId),
}

/// Build a vertex set from raw ids.
pub fn vset<I: IntoIterator<Item = u32>>(ids: I) -> VertexSet {
    ids.into_iter().map(Vertex).collect()
}

#[derive(Clone, Debug, Default)]
pub struct MultiGraph {
    incidence: BTreeMap<Vertex, BTreeSet<EdgeId>>,
    edges: BTreeMap<EdgeId, (Vertex, Vertex)>,
    next_edge: u32,
}

impl PartialEq for MultiGraph {
    fn eq(&self, other: &Self) -> bool {
        self.edges == other.edges && self.incidence.keys().eq(other.incidence.keys())
    }
}

impl Eq for MultiGraph {}

fn ordered(a: Vertex, b: Vertex) -> (Vertex, Vertex) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl MultiGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vertices<I: IntoIterator<Item = Vertex>>(vertices: I) -> Self {
        let mut g = Self::new();
        for v in vertices {
            g.add_vertex(v);
        }
        g
    }

    /// Convenience constructor over raw ids; endpoints are added as vertices.
    pub fn from_edges(n: u32, edges: &[(u32, u32)]) -> Self {
        let mut g = Self::with_vertices((1..=n).map(Vertex));
        for &(a, b) in edges {
            g.add_vertex(Vertex(a));
            g.add_vertex(Vertex(b));
            g.add_edge(Vertex(a), Vertex(b))
                .expect("endpoints were just added");
        }
        g
    }

    pub fn add_vertex(&mut self, v: Vertex) -> bool {
        if self.incidence.contains_key(&v) {
            return false;
        }
        self.incidence.insert(v, BTreeSet::new());
        true
    }

    pub fn add_edge(&mut self, a: Vertex, b: Vertex) -> Result<EdgeId> {
        let id = EdgeId(self.next_edge.max(1));
        self.insert_edge(id, a, b)?;
        Ok(id)
    }

    /// Insert an edge under a caller-chosen id (parsing, trace replay).
    pub fn insert_edge(&mut self, id: EdgeId, a: Vertex, b: Vertex) -> Result<()> {
        if self.edges.contains_key(&id) {
            return Err(Error::domain(format!("edge id {id} already present")));
        }
        for v in [a, b] {
            if !self.incidence.contains_key(&v) {
                return Err(Error::domain(format!("vertex {v} not in graph")));
            }
        }
        self.edges.insert(id, ordered(a, b));
        self.incidence.get_mut(&a).unwrap().insert(id);
        self.incidence.get_mut(&b).unwrap().insert(id);
        self.next_edge = self.next_edge.max(id.0 + 1);
        Ok(())
    }

    pub fn remove_edge(&mut self, id: EdgeId) -> Result<()> {
        let (a, b) = self
            .edges
            .remove(&id)
            .ok_or_else(|| Error::domain(format!("edge {id} not in graph")))?;
        self.incidence.get_mut(&a).unwrap().remove(&id);
        self.incidence.get_mut(&b).unwrap().remove(&id);
        Ok(())
    }

    pub fn remove_vertex(&mut self, v: Vertex) -> Result<()> {
        let incident = self
            .incidence
            .remove(&v)
            .ok_or_else(|| Error::domain(format!("vertex {v} not in graph")))?;
        for e in incident {
            let (a, b) = self.edges.remove(&e).unwrap();
            let other = if a == v { b } else { a };
            if other != v {
                self.incidence.get_mut(&other).unwrap().remove(&e);
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.incidence.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.incidence.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.incidence.keys().copied()
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.vertices().collect()
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, Vertex, Vertex)> + '_ {
        self.edges.iter().map(|(&e, &(a, b))| (e, a, b))
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        self.incidence.contains_key(&v)
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        self.edges.contains_key(&e)
    }

    pub fn endpoints(&self, e: EdgeId) -> Option<(Vertex, Vertex)> {
        self.edges.get(&e).copied()
    }

    /// The id the next `add_edge` call will use.
    pub fn next_edge_id(&self) -> EdgeId {
        EdgeId(self.next_edge.max(1))
    }

    /// Incident edge ids of `v`; a self-loop is listed once.
    pub fn incident(&self, v: Vertex) -> impl Iterator<Item = EdgeId> + '_ {
        self.incidence.get(&v).into_iter().flatten().copied()
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.incident(v)
            .map(|e| {
                let (a, b) = self.edges[&e];
                if a == b {
                    2
                } else {
                    1
                }
            })
            .sum()
    }

    pub fn has_self_loop(&self, v: Vertex) -> bool {
        self.loop_count(v) > 0
    }

    pub fn loop_count(&self, v: Vertex) -> usize {
        self.incident(v)
            .filter(|e| {
                let (a, b) = self.edges[e];
                a == b
            })
            .count()
    }

    /// Neighbours of `v`, excluding `v` itself even when it carries a loop.
    pub fn neighbors(&self, v: Vertex) -> VertexSet {
        self.incident(v)
            .filter_map(|e| {
                let (a, b) = self.edges[&e];
                let other = if a == v { b } else { a };
                (other != v).then_some(other)
            })
            .collect()
    }

    /// `N(X)`: vertices outside `X` adjacent to some member of `X`.
    pub fn set_neighbors(&self, x: &VertexSet) -> VertexSet {
        x.iter()
            .flat_map(|&v| self.neighbors(v))
            .filter(|u| !x.contains(u))
            .collect()
    }

    pub fn edges_between_pair(&self, u: Vertex, v: Vertex) -> Vec<EdgeId> {
        let key = ordered(u, v);
        self.incident(u).filter(|e| self.edges[e] == key).collect()
    }

    pub fn multiplicity(&self, u: Vertex, v: Vertex) -> usize {
        self.edges_between_pair(u, v).len()
    }

    /// `e(X, Y)` for disjoint `X` and `Y`.
    pub fn edges_between(&self, x: &VertexSet, y: &VertexSet) -> Result<usize> {
        if let Some(v) = x.intersection(y).next() {
            return Err(Error::domain(format!("sets overlap at vertex {v}")));
        }
        Ok(self.count_between(x, y))
    }

    pub(crate) fn count_between(&self, x: &VertexSet, y: &VertexSet) -> usize {
        self.edges
            .values()
            .filter(|(a, b)| (x.contains(a) && y.contains(b)) || (x.contains(b) && y.contains(a)))
            .count()
    }

    /// Edges leaving `x` toward `V(G) \ x`.
    pub fn boundary_edges(&self, x: &VertexSet) -> usize {
        x.iter()
            .flat_map(|&v| self.incident(v))
            .filter(|e| {
                let (a, b) = self.edges[e];
                x.contains(&a) != x.contains(&b)
            })
            .count()
    }

    fn check_subset(&self, x: &VertexSet) -> Result<()> {
        match x.iter().find(|v| !self.contains_vertex(**v)) {
            Some(v) => Err(Error::domain(format!("vertex {v} not in graph"))),
            None => Ok(()),
        }
    }

    /// `G[X]`, keeping edge ids.
    pub fn induced_subgraph(&self, x: &VertexSet) -> Result<MultiGraph> {
        self.check_subset(x)?;
        Ok(self.induced_unchecked(x))
    }

    pub(crate) fn induced_unchecked(&self, x: &VertexSet) -> MultiGraph {
        let mut incidence: BTreeMap<Vertex, BTreeSet<EdgeId>> =
            x.iter().map(|&v| (v, BTreeSet::new())).collect();
        let mut edges = BTreeMap::new();
        for &v in x {
            for e in self.incident(v) {
                let (a, b) = self.edges[&e];
                if x.contains(&a) && x.contains(&b) {
                    edges.insert(e, (a, b));
                    incidence.get_mut(&v).unwrap().insert(e);
                }
            }
        }
        MultiGraph {
            incidence,
            edges,
            next_edge: self.next_edge,
        }
    }

    /// `G - Y` for a mixed set of vertices and edges.
    pub fn remove(&self, y: &BTreeSet<Element>) -> Result<MultiGraph> {
        for el in y {
            let known = match *el {
                Element::Vertex(v) => self.contains_vertex(v),
                Element::Edge(e) => self.contains_edge(e),
            };
            if !known {
                return Err(Error::domain(format!("unknown element {el:?}")));
            }
        }
        let mut g = self.clone();
        for el in y {
            match *el {
                Element::Edge(e) => {
                    if g.contains_edge(e) {
                        g.remove_edge(e)?;
                    }
                }
                Element::Vertex(v) => g.remove_vertex(v)?,
            }
        }
        Ok(g)
    }

    /// `G - X` for a vertex set.
    pub fn without(&self, x: &VertexSet) -> MultiGraph {
        let keep: VertexSet = self.vertices().filter(|v| !x.contains(v)).collect();
        self.induced_unchecked(&keep)
    }

    /// Subgraph on `x` that keeps only the edges accepted by `keep_edge`.
    pub fn filtered_subgraph(
        &self,
        x: &VertexSet,
        keep_edge: impl Fn(EdgeId) -> bool,
    ) -> MultiGraph {
        let mut g = self.induced_unchecked(x);
        let drop: Vec<EdgeId> = g.edge_ids().filter(|&e| !keep_edge(e)).collect();
        for e in drop {
            g.remove_edge(e).unwrap();
        }
        g
    }

    pub fn is_acyclic(&self) -> bool {
        let index: BTreeMap<Vertex, usize> =
            self.vertices().enumerate().map(|(i, v)| (v, i)).collect();
        let mut uf = UnionFind::new(index.len());
        self.edges
            .values()
            .all(|(a, b)| uf.union(index[a], index[b]))
    }

    /// Connected components, each as a sorted vertex set, ordered by minimum vertex.
    pub fn components(&self) -> Vec<VertexSet> {
        let mut seen = VertexSet::new();
        let mut out = Vec::new();
        for start in self.vertices() {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = VertexSet::new();
            let mut queue = VecDeque::from([start]);
            seen.insert(start);
            while let Some(v) = queue.pop_front() {
                comp.insert(v);
                for u in self.neighbors(v) {
                    if seen.insert(u) {
                        queue.push_back(u);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    /// Number of vertex pairs (loops included) joined by exactly two edges.
    pub fn double_edge_count(&self) -> usize {
        self.pair_multiplicities()
            .values()
            .filter(|&&k| k == 2)
            .count()
    }

    /// Number of vertex pairs joined by exactly one edge.
    pub fn single_edge_count(&self) -> usize {
        self.pair_multiplicities()
            .values()
            .filter(|&&k| k == 1)
            .count()
    }

    pub fn pair_multiplicities(&self) -> BTreeMap<(Vertex, Vertex), usize> {
        let mut counts = BTreeMap::new();
        for &pair in self.edges.values() {
            *counts.entry(pair).or_insert(0) += 1;
        }
        counts
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already connected.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> MultiGraph {
        MultiGraph::from_edges(3, &[(1, 2), (2, 3), (1, 3)])
    }

    #[test]
    fn induced_keeps_ids() {
        let g = triangle();
        let h = g.induced_subgraph(&vset([1, 2])).unwrap();
        assert_eq!(h.m(), 1);
        assert_eq!(h.endpoints(EdgeId(1)), Some((Vertex(1), Vertex(2))));
        assert_eq!(g.induced_subgraph(&g.vertex_set()).unwrap(), g);
        assert!(g.induced_subgraph(&vset([4])).is_err());
    }

    #[test]
    fn induced_keeps_parallel_pair() {
        let g = MultiGraph::from_edges(3, &[(1, 2), (1, 2)]);
        let h = g.induced_subgraph(&vset([1, 2])).unwrap();
        assert_eq!(h.multiplicity(Vertex(1), Vertex(2)), 2);
    }

    #[test]
    fn remove_mixed() {
        let g = triangle();
        let h = g
            .remove(&BTreeSet::from([Element::Vertex(Vertex(1))]))
            .unwrap();
        assert_eq!(h.m(), 1);
        let h = g
            .remove(&BTreeSet::from([Element::Edge(EdgeId(1))]))
            .unwrap();
        assert!(h.is_acyclic());
        assert_eq!(h.m(), 2);
        assert_eq!(g.remove(&BTreeSet::new()).unwrap(), g);
        assert!(g
            .remove(&BTreeSet::from([Element::Edge(EdgeId(9))]))
            .is_err());
    }

    #[test]
    fn counts_between_sets() {
        let g = triangle();
        assert_eq!(g.edges_between(&vset([1]), &vset([2, 3])).unwrap(), 2);
        let d = MultiGraph::from_edges(2, &[(1, 2), (1, 2)]);
        assert_eq!(d.edges_between(&vset([1]), &vset([2])).unwrap(), 2);
        let two = MultiGraph::from_edges(4, &[(1, 2), (3, 4)]);
        assert_eq!(two.edges_between(&vset([1]), &vset([3, 4])).unwrap(), 0);
        assert!(g.edges_between(&vset([1]), &vset([1])).is_err());
    }

    #[test]
    fn cycle_detection() {
        assert!(!MultiGraph::from_edges(1, &[(1, 1)]).is_acyclic());
        assert!(MultiGraph::from_edges(3, &[(1, 2), (2, 3)]).is_acyclic());
        assert!(!MultiGraph::from_edges(2, &[(1, 2), (1, 2)]).is_acyclic());
        assert!(MultiGraph::new().is_acyclic());
    }

    #[test]
    fn loops_count_twice() {
        let g = MultiGraph::from_edges(2, &[(1, 1), (1, 2)]);
        assert_eq!(g.degree(Vertex(1)), 3);
        assert_eq!(g.neighbors(Vertex(1)), vset([2]));
    }

    #[test]
    fn edge_ids_are_not_reused() {
        let mut g = triangle();
        let last = g.edge_ids().last().unwrap();
        g.remove_edge(last).unwrap();
        let fresh = g.add_edge(Vertex(1), Vertex(3)).unwrap();
        assert!(fresh > last);
        let h = g.without(&vset([1]));
        assert!(h.next_edge_id() > fresh);
    }
}
