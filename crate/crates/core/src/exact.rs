//! Exact feedback vertex set solvers and the v-flower constructor.

use std::collections::{BTreeMap, VecDeque};
use std::sync::OnceLock;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::graph::{MultiGraph, UnionFind, Vertex, VertexSet};

/// Size limits for the exponential oracles.
///
/// Read once from `ANTLER_BRUTEFORCE_CAP`, `ANTLER_ENUMERATE_CAP` and
/// `ANTLER_EXACT_CAP`; unset or malformed values fall back to the defaults.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleCaps {
    pub bruteforce: usize,
    pub enumerate: usize,
    pub exact: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        Self {
            bruteforce: 16,
            enumerate: 9,
            exact: 40,
        }
    }
}

impl OracleCaps {
    pub fn from_env() -> Self {
        let read = |key: &str, fallback: usize| {
            std::env::var(key)
                .ok()
                .and_then(|s| s.trim().parse().ok())
                .unwrap_or(fallback)
        };
        let d = Self::default();
        Self {
            bruteforce: read("ANTLER_BRUTEFORCE_CAP", d.bruteforce),
            enumerate: read("ANTLER_ENUMERATE_CAP", d.enumerate),
            exact: read("ANTLER_EXACT_CAP", d.exact),
        }
    }

    pub fn current() -> Self {
        static CAPS: OnceLock<OracleCaps> = OnceLock::new();
        *CAPS.get_or_init(Self::from_env)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FvsSolution {
    pub size: usize,
    pub witness: VertexSet,
}

/// Vertices and edges renumbered to `0..n`.
struct Dense {
    ids: Vec<Vertex>,
    edges: Vec<(usize, usize)>,
}

impl Dense {
    fn new(g: &MultiGraph) -> Self {
        let ids: Vec<Vertex> = g.vertices().collect();
        let index: BTreeMap<Vertex, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let edges = g.edges().map(|(_, a, b)| (index[&a], index[&b])).collect();
        Self { ids, edges }
    }

    fn acyclic_without(&self, removed: &[bool]) -> bool {
        let mut uf = UnionFind::new(self.ids.len());
        self.edges
            .iter()
            .filter(|(a, b)| !removed[*a] && !removed[*b])
            .all(|&(a, b)| uf.union(a, b))
    }

    fn to_set(&self, idx: &[usize]) -> VertexSet {
        idx.iter().map(|&i| self.ids[i]).collect()
    }
}

/// Minimum FVS by enumerating subsets in increasing size, each size in
/// lexicographic vertex order. Refuses graphs above the brute-force cap.
pub fn fvs_bruteforce(g: &MultiGraph) -> Result<FvsSolution> {
    fvs_bruteforce_capped(g, OracleCaps::current().bruteforce)
}

pub fn fvs_bruteforce_capped(g: &MultiGraph, cap: usize) -> Result<FvsSolution> {
    Error::refuse("vertex count", g.n(), cap)?;
    let dense = Dense::new(g);
    let n = dense.ids.len();
    let mut removed = vec![false; n];
    for size in 0..=n {
        for combo in (0..n).combinations(size) {
            combo.iter().for_each(|&i| removed[i] = true);
            let ok = dense.acyclic_without(&removed);
            combo.iter().for_each(|&i| removed[i] = false);
            if ok {
                return Ok(FvsSolution {
                    size,
                    witness: dense.to_set(&combo),
                });
            }
        }
    }
    unreachable!("removing every vertex leaves an acyclic graph")
}

/// Minimum FVS by shortest-cycle branching with loop, low-degree and
/// degree-two simplification, solved per connected component.
pub fn fvs_exact(g: &MultiGraph) -> FvsSolution {
    fvs_bounded(g, g.n()).expect("the whole vertex set is a feedback vertex set")
}

/// A minimum FVS if its size is at most `limit`.
pub fn fvs_bounded(g: &MultiGraph, limit: usize) -> Option<FvsSolution> {
    let dense = Dense::new(g);
    let work = Work {
        alive: vec![true; dense.ids.len()],
        edges: dense.edges.clone(),
    };
    let sol = min_fvs(work, limit)?;
    Some(FvsSolution {
        size: sol.len(),
        witness: dense.to_set(&sol),
    })
}

/// fvs(G) >= k, decided with a depth-limited search.
pub fn fvs_at_least(g: &MultiGraph, k: usize) -> bool {
    k == 0 || fvs_bounded(g, k - 1).is_none()
}

#[derive(Clone)]
struct Work {
    alive: Vec<bool>,
    edges: Vec<(usize, usize)>,
}

impl Work {
    fn delete(&mut self, v: usize) {
        self.alive[v] = false;
        self.edges.retain(|&(a, b)| a != v && b != v);
    }

    /// Apply the safe rules until none fires; forced vertices go to `taken`.
    /// Returns false once more than `budget` vertices would be forced.
    fn simplify(&mut self, taken: &mut Vec<usize>, budget: &mut usize) -> bool {
        let n = self.alive.len();
        loop {
            let mut deg = vec![0usize; n];
            let mut looped = vec![false; n];
            for &(a, b) in &self.edges {
                deg[a] += 1;
                deg[b] += 1;
                if a == b {
                    looped[a] = true;
                }
            }
            if let Some(v) = (0..n).find(|&v| self.alive[v] && looped[v]) {
                if *budget == 0 {
                    return false;
                }
                *budget -= 1;
                taken.push(v);
                self.delete(v);
                continue;
            }
            let low: Vec<usize> = (0..n).filter(|&v| self.alive[v] && deg[v] <= 1).collect();
            if !low.is_empty() {
                for v in low {
                    self.alive[v] = false;
                }
                let alive = &self.alive;
                self.edges.retain(|&(a, b)| alive[a] && alive[b]);
                continue;
            }
            if let Some(v) = (0..n).find(|&v| self.alive[v] && deg[v] == 2) {
                let ends: Vec<usize> = self
                    .edges
                    .iter()
                    .filter(|&&(a, b)| a == v || b == v)
                    .map(|&(a, b)| if a == v { b } else { a })
                    .collect();
                self.delete(v);
                let (a, b) = (ends[0].min(ends[1]), ends[0].max(ends[1]));
                self.edges.push((a, b));
                continue;
            }
            let mut sorted = self.edges.clone();
            sorted.sort_unstable();
            if let Some(pos) = sorted.windows(3).position(|w| w[0] == w[2]) {
                let dup = sorted[pos];
                let at = self.edges.iter().position(|&e| e == dup).unwrap();
                self.edges.swap_remove(at);
                continue;
            }
            return true;
        }
    }

    fn components(&self) -> Vec<Work> {
        let n = self.alive.len();
        let mut uf = UnionFind::new(n);
        for &(a, b) in &self.edges {
            uf.union(a, b);
        }
        let mut groups: BTreeMap<usize, Work> = BTreeMap::new();
        for &(a, b) in &self.edges {
            let root = uf.find(a);
            let w = groups.entry(root).or_insert_with(|| Work {
                alive: vec![false; n],
                edges: Vec::new(),
            });
            w.alive[a] = true;
            w.alive[b] = true;
            w.edges.push((a, b));
        }
        groups.into_values().collect()
    }

    /// Vertices of a shortest cycle; the graph must contain a cycle and no loops.
    fn shortest_cycle(&self) -> Vec<usize> {
        let mut sorted = self.edges.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return vec![w[0].0, w[0].1];
        }
        let n = self.alive.len();
        let mut adj = vec![Vec::new(); n];
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            adj[a].push((b, i));
            adj[b].push((a, i));
        }
        let mut best: Option<Vec<usize>> = None;
        for (skip, &(a, b)) in self.edges.iter().enumerate() {
            // Shortest a-b path avoiding edge `skip`.
            let mut prev = vec![usize::MAX; n];
            prev[a] = a;
            let mut queue = VecDeque::from([a]);
            while let Some(x) = queue.pop_front() {
                if x == b {
                    break;
                }
                for &(y, e) in &adj[x] {
                    if e != skip && prev[y] == usize::MAX {
                        prev[y] = x;
                        queue.push_back(y);
                    }
                }
            }
            if prev[b] == usize::MAX {
                continue;
            }
            let mut path = vec![b];
            while *path.last().unwrap() != a {
                path.push(prev[*path.last().unwrap()]);
            }
            if best.as_ref().is_none_or(|c| path.len() < c.len()) {
                let done = path.len() == 3;
                best = Some(path);
                if done {
                    break;
                }
            }
        }
        best.expect("caller guarantees a cycle")
    }
}

fn min_fvs(mut work: Work, limit: usize) -> Option<Vec<usize>> {
    let mut taken = Vec::new();
    let mut budget = limit;
    if !work.simplify(&mut taken, &mut budget) {
        return None;
    }
    for comp in work.components() {
        let found = (0..=budget).find_map(|k| branch(comp.clone(), k))?;
        budget -= found.len();
        taken.extend(found);
    }
    Some(taken)
}

/// Some FVS of size at most `budget`, if any.
fn branch(mut work: Work, mut budget: usize) -> Option<Vec<usize>> {
    let mut taken = Vec::new();
    if !work.simplify(&mut taken, &mut budget) {
        return None;
    }
    if work.edges.is_empty() {
        return Some(taken);
    }
    if budget == 0 {
        return None;
    }
    for v in work.shortest_cycle() {
        let mut next = work.clone();
        next.delete(v);
        if let Some(rest) = branch(next, budget - 1) {
            taken.push(v);
            taken.extend(rest);
            return Some(taken);
        }
    }
    None
}

/// A set `hit_set` avoiding the center whose removal leaves the graph acyclic,
/// together with as many cycles through the center, pairwise meeting only there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowerResult {
    pub center: Vertex,
    pub hit_set: VertexSet,
    /// Each petal starts at the center and lists the cycle's vertices in order.
    pub petals: Vec<Vec<Vertex>>,
}

/// Requires `v` without a self-loop and `G - v` acyclic.
pub fn tree_flower(g: &MultiGraph, v: Vertex) -> Result<FlowerResult> {
    if !g.contains_vertex(v) {
        return Err(Error::domain(format!("vertex {v} not in graph")));
    }
    if g.has_self_loop(v) {
        return Err(Error::domain(format!("vertex {v} has a self-loop")));
    }
    let mut rest = g.vertex_set();
    rest.remove(&v);
    if !g.without(&VertexSet::from([v])).is_acyclic() {
        return Err(Error::domain(format!("graph minus {v} has a cycle")));
    }
    let mut result = FlowerResult {
        center: v,
        hit_set: VertexSet::new(),
        petals: Vec::new(),
    };
    loop {
        let mut with_center = rest.clone();
        with_center.insert(v);
        let h = g.induced_unchecked(&with_center);
        let forest = h.without(&VertexSet::from([v]));
        let Some((x, subtree, petal)) = forest
            .components()
            .into_iter()
            .find_map(|tree| deepest_cycle(&h, &forest, v, &tree))
        else {
            return Ok(result);
        };
        result.hit_set.insert(x);
        result.petals.push(petal);
        for u in subtree {
            rest.remove(&u);
        }
    }
}

/// In the rooted tree, the deepest vertex whose subtree closes a cycle with `v`.
fn deepest_cycle(
    h: &MultiGraph,
    forest: &MultiGraph,
    v: Vertex,
    tree: &VertexSet,
) -> Option<(Vertex, VertexSet, Vec<Vertex>)> {
    let root = *tree.first()?;
    let mut order = vec![root];
    let mut parent = BTreeMap::from([(root, root)]);
    let mut depth = BTreeMap::from([(root, 0usize)]);
    let mut i = 0;
    while i < order.len() {
        let x = order[i];
        i += 1;
        for y in forest.neighbors(x) {
            if let std::collections::btree_map::Entry::Vacant(slot) = parent.entry(y) {
                slot.insert(x);
                depth.insert(y, depth[&x] + 1);
                order.push(y);
            }
        }
    }
    let direct: BTreeMap<Vertex, usize> = tree.iter().map(|&x| (x, h.multiplicity(v, x))).collect();
    let mut count = direct.clone();
    for &x in order.iter().rev() {
        if x != root {
            let c = count[&x];
            *count.get_mut(&parent[&x]).unwrap() += c;
        }
    }
    let x = *order
        .iter()
        .filter(|x| count[x] >= 2)
        .max_by(|a, b| depth[a].cmp(&depth[b]).then(b.cmp(a)))?;
    let children: Vec<Vertex> = order
        .iter()
        .copied()
        .filter(|&y| y != root && parent[&y] == x)
        .collect();
    let descend = |start: Vertex| {
        let mut path = vec![start];
        let mut cur = start;
        while direct[&cur] == 0 {
            cur = *children_of(&order, &parent, root, cur)
                .iter()
                .find(|c| count[c] > 0)
                .expect("count says an edge to the center lies below");
            path.push(cur);
        }
        path
    };
    let loaded: Vec<Vertex> = children.iter().copied().filter(|c| count[c] > 0).collect();
    let petal = match direct[&x] {
        0 => {
            let mut left = descend(loaded[0]);
            left.reverse();
            let right = descend(loaded[1]);
            let mut p = vec![v];
            p.extend(left);
            p.push(x);
            p.extend(right);
            p
        }
        1 => {
            let mut p = vec![v, x];
            p.extend(descend(loaded[0]));
            p
        }
        _ => vec![v, x],
    };
    let mut subtree = VertexSet::from([x]);
    for &y in &order {
        if y != root && subtree.contains(&parent[&y]) {
            subtree.insert(y);
        }
    }
    Some((x, subtree, petal))
}

fn children_of(
    order: &[Vertex],
    parent: &BTreeMap<Vertex, Vertex>,
    root: Vertex,
    x: Vertex,
) -> Vec<Vertex> {
    order
        .iter()
        .copied()
        .filter(|&y| y != root && parent[&y] == x)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::vset;

    fn triangle() -> MultiGraph {
        MultiGraph::from_edges(3, &[(1, 2), (2, 3), (1, 3)])
    }

    #[test]
    fn bruteforce_small_cases() {
        let forest = MultiGraph::from_edges(4, &[(1, 2), (2, 3)]);
        assert_eq!(fvs_bruteforce(&forest).unwrap().size, 0);
        let t = fvs_bruteforce(&triangle()).unwrap();
        assert_eq!((t.size, t.witness), (1, vset([1])));
        let k4 = MultiGraph::from_edges(4, &[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]);
        assert_eq!(fvs_bruteforce(&k4).unwrap().size, 2);
    }

    #[test]
    fn bruteforce_refuses_large() {
        let g = MultiGraph::with_vertices((1..=17).map(Vertex));
        assert!(matches!(
            fvs_bruteforce_capped(&g, 16),
            Err(Error::Refusal { .. })
        ));
    }

    #[test]
    fn exact_small_cases() {
        let two = MultiGraph::from_edges(6, &[(1, 2), (2, 3), (1, 3), (4, 5), (5, 6), (4, 6)]);
        assert_eq!(fvs_exact(&two).size, 2);
        let c5 = MultiGraph::from_edges(5, &[(1, 2), (2, 3), (3, 4), (4, 5), (5, 1)]);
        assert_eq!(fvs_exact(&c5).size, 1);
        assert_eq!(fvs_exact(&MultiGraph::new()).size, 0);
    }

    #[test]
    fn bounded_cases() {
        assert!(fvs_bounded(&triangle(), 0).is_none());
        assert_eq!(fvs_bounded(&triangle(), 1).unwrap().size, 1);
        let two = MultiGraph::from_edges(6, &[(1, 2), (2, 3), (1, 3), (4, 5), (5, 6), (4, 6)]);
        assert!(fvs_bounded(&two, 1).is_none());
    }

    #[test]
    fn exact_witness_is_feasible_with_loops_and_parallels() {
        let g =
            MultiGraph::from_edges(5, &[(1, 1), (2, 3), (2, 3), (3, 4), (4, 5), (5, 3), (2, 4)]);
        let sol = fvs_exact(&g);
        assert!(g.without(&sol.witness).is_acyclic());
        assert_eq!(sol.size, fvs_bruteforce(&g).unwrap().size);
    }

    fn check_flower(g: &MultiGraph, f: &FlowerResult) {
        assert_eq!(f.petals.len(), f.hit_set.len());
        assert!(!f.hit_set.contains(&f.center));
        assert!(g.without(&f.hit_set).is_acyclic());
        let mut seen = VertexSet::new();
        for p in &f.petals {
            assert_eq!(p[0], f.center);
            for &x in &p[1..] {
                assert!(seen.insert(x), "petals share {x}");
            }
            let mut closed = p.clone();
            closed.push(f.center);
            for w in closed.windows(2) {
                assert!(g.multiplicity(w[0], w[1]) >= 1);
            }
            if p.len() == 2 {
                assert!(g.multiplicity(p[0], p[1]) >= 2);
            }
        }
    }

    #[test]
    fn flower_cases() {
        let path = MultiGraph::from_edges(3, &[(1, 2), (2, 3)]);
        let f = tree_flower(&path, Vertex(2)).unwrap();
        assert!(f.hit_set.is_empty() && f.petals.is_empty());

        let one = MultiGraph::from_edges(5, &[(1, 2), (2, 3), (3, 1), (3, 4), (4, 5)]);
        let f = tree_flower(&one, Vertex(1)).unwrap();
        assert_eq!(f.hit_set.len(), 1);
        check_flower(&one, &f);

        let three = MultiGraph::from_edges(
            7,
            &[
                (1, 2),
                (2, 3),
                (3, 1),
                (1, 4),
                (4, 5),
                (5, 1),
                (1, 6),
                (6, 7),
                (7, 1),
            ],
        );
        let f = tree_flower(&three, Vertex(1)).unwrap();
        assert_eq!(f.hit_set.len(), 3);
        check_flower(&three, &f);
    }

    #[test]
    fn flower_through_branching_tree() {
        // Center 1 touches the leaves of a spider; every pair of leaves closes a cycle.
        let g = MultiGraph::from_edges(
            8,
            &[
                (2, 3),
                (3, 4),
                (2, 5),
                (5, 6),
                (2, 7),
                (7, 8),
                (1, 4),
                (1, 6),
                (1, 8),
                (1, 3),
            ],
        );
        let f = tree_flower(&g, Vertex(1)).unwrap();
        check_flower(&g, &f);
        assert_eq!(f.hit_set.len(), 2);
    }

    #[test]
    fn flower_rejects_bad_input() {
        let looped = MultiGraph::from_edges(2, &[(1, 1), (1, 2)]);
        assert!(tree_flower(&looped, Vertex(1)).is_err());
        assert!(tree_flower(&triangle(), Vertex(4)).is_err());
        let k4 = MultiGraph::from_edges(4, &[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]);
        assert!(tree_flower(&k4, Vertex(1)).is_err());
    }
}
