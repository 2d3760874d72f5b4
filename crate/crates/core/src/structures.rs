//! Feedback vertex cuts, antlers and their certificates.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{fvs_at_least, tree_flower, OracleCaps};
use crate::graph::{EdgeId, MultiGraph, UnionFind, Vertex, VertexSet};

/// A pair `(C, F)` of vertex sets; validity is checked by [`verify_fvc`].
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Fvc {
    pub cut: VertexSet,
    pub forest: VertexSet,
}

impl Fvc {
    pub fn new(cut: VertexSet, forest: VertexSet) -> Self {
        Self { cut, forest }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn width(&self) -> usize {
        self.cut.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cut.is_empty() && self.forest.is_empty()
    }

    pub fn vertices(&self) -> VertexSet {
        self.cut.union(&self.forest).copied().collect()
    }

    /// Drop the members of `x` from both parts.
    pub fn minus(&self, x: &VertexSet) -> Fvc {
        Fvc {
            cut: self.cut.difference(x).copied().collect(),
            forest: self.forest.difference(x).copied().collect(),
        }
    }

    pub fn union(&self, other: &Fvc) -> Fvc {
        Fvc {
            cut: self.cut.union(&other.cut).copied().collect(),
            forest: self.forest.union(&other.forest).copied().collect(),
        }
    }
}

/// A subgraph of `G[C ∪ F]` given by vertex and edge ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub vertices: VertexSet,
    pub edges: BTreeSet<EdgeId>,
    pub order: usize,
}

impl Certificate {
    /// The certificate as a standalone graph; ids outside `g` are ignored.
    pub fn subgraph(&self, g: &MultiGraph) -> MultiGraph {
        let present: VertexSet = self
            .vertices
            .iter()
            .copied()
            .filter(|&v| g.contains_vertex(v))
            .collect();
        g.filtered_subgraph(&present, |e| self.edges.contains(&e))
    }

    fn from_graph(h: &MultiGraph, order: usize) -> Self {
        Self {
            vertices: h.vertex_set(),
            edges: h.edge_ids().collect(),
            order,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Antler {
    pub base: Fvc,
    pub certificate: Option<Certificate>,
}

pub fn verify_fvc(g: &MultiGraph, f: &Fvc) -> bool {
    if f.cut
        .iter()
        .chain(&f.forest)
        .any(|&v| !g.contains_vertex(v))
    {
        return false;
    }
    if !f.cut.is_disjoint(&f.forest) {
        return false;
    }
    let forest = g.induced_unchecked(&f.forest);
    if !forest.is_acyclic() {
        return false;
    }
    let inside = f.vertices();
    forest.components().iter().all(|tree| {
        let out: usize = tree
            .iter()
            .flat_map(|&v| g.incident(v))
            .filter(|&e| {
                let (a, b) = g.endpoints(e).unwrap();
                !inside.contains(&a) || !inside.contains(&b)
            })
            .count();
        out <= 1
    })
}

/// FVC check plus `fvs(G[C ∪ F]) = |C|`.
pub fn verify_antler(g: &MultiGraph, f: &Fvc) -> Result<bool> {
    Error::refuse("antler width", f.width(), OracleCaps::current().exact)?;
    if !verify_fvc(g, f) {
        return Ok(false);
    }
    Ok(fvs_at_least(&g.induced_unchecked(&f.vertices()), f.width()))
}

/// Whether `cert` is a `cut`-certificate of order `z` inside `g`.
pub fn verify_certificate(
    g: &MultiGraph,
    cut: &VertexSet,
    cert: &Certificate,
    z: usize,
) -> Result<bool> {
    if cert.vertices.iter().any(|&v| !g.contains_vertex(v)) || !cut.is_subset(&cert.vertices) {
        return Ok(false);
    }
    let inside = cert.edges.iter().all(|&e| match g.endpoints(e) {
        Some((a, b)) => cert.vertices.contains(&a) && cert.vertices.contains(&b),
        None => false,
    });
    if !inside {
        return Ok(false);
    }
    let h = cert.subgraph(g);
    if !h.without(cut).is_acyclic() {
        return Ok(false);
    }
    for comp in h.components() {
        let k = comp.intersection(cut).count();
        if k > z {
            return Ok(false);
        }
        Error::refuse("certificate component cut", k, OracleCaps::current().exact)?;
        if !fvs_at_least(&h.induced_unchecked(&comp), k) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A z-antler check against an explicit certificate witness.
pub fn verify_z_antler(g: &MultiGraph, f: &Fvc, cert: &Certificate, z: usize) -> Result<bool> {
    Ok(cert.vertices.is_subset(&f.vertices())
        && verify_antler(g, f)?
        && verify_certificate(g, &f.cut, cert, z)?)
}

/// Upper bound on the number of trees a pruned certificate keeps.
pub fn tree_bound(width: usize, z: usize) -> usize {
    let per_pair = (z * z + 2 * z) as i64 - 1;
    ((width as i64 * per_pair) / 2).max(0) as usize
}

/// Trees of `H - C`, ordered by their smallest vertex.
pub fn certificate_trees(g: &MultiGraph, cut: &VertexSet, cert: &Certificate) -> Vec<VertexSet> {
    cert.subgraph(g).without(cut).components()
}

/// Number of cycles through `v` in `h` that pairwise meet only at `v` and
/// otherwise avoid `blocked`; loops at `v` count as petals.
fn flower_order(h: &MultiGraph, v: Vertex, blocked: &VertexSet) -> usize {
    let mut keep: VertexSet = h.vertices().filter(|u| !blocked.contains(u)).collect();
    keep.insert(v);
    let mut local = h.induced_unchecked(&keep);
    let loops: Vec<EdgeId> = local
        .incident(v)
        .filter(|&e| {
            let (a, b) = local.endpoints(e).unwrap();
            a == b
        })
        .collect();
    for &e in &loops {
        local.remove_edge(e).unwrap();
    }
    let petals = tree_flower(&local, v)
        .map(|f| f.hit_set.len())
        .expect("non-cut part of a certificate is a forest");
    loops.len() + petals
}

/// Repeatedly delete a tree of `H - C` whose removal keeps an order-`z`
/// flower at every cut vertex it closes a cycle with, and whose neighbour
/// pairs are each shared by at least `z + 1` other trees. Trees are tried in
/// id order; the result has at most [`tree_bound`] trees.
pub fn prune_certificate(
    g: &MultiGraph,
    cut: &VertexSet,
    cert: &Certificate,
    z: usize,
) -> Certificate {
    let mut h = cert.subgraph(g);
    'outer: loop {
        let trees = h.without(cut).components();
        let neighbourhoods: Vec<VertexSet> = trees.iter().map(|t| h.set_neighbors(t)).collect();
        for (i, tree) in trees.iter().enumerate() {
            let flowers_survive = neighbourhoods[i].iter().all(|&v| {
                let mut with_v = tree.clone();
                with_v.insert(v);
                if h.induced_unchecked(&with_v).is_acyclic() {
                    return true;
                }
                let mut blocked: VertexSet = cut.iter().copied().filter(|&c| c != v).collect();
                blocked.extend(tree.iter().copied());
                flower_order(&h, v, &blocked) >= z
            });
            let pairs_covered = neighbourhoods[i].iter().tuple_combinations().all(|(u, v)| {
                let others = neighbourhoods
                    .iter()
                    .enumerate()
                    .filter(|&(j, n)| j != i && n.contains(u) && n.contains(v))
                    .count();
                others > z
            });
            if flowers_survive && pairs_covered {
                h = h.without(tree);
                continue 'outer;
            }
        }
        break;
    }
    Certificate::from_graph(&h, z)
}

/// Search for an order-`z` certificate of an antler by trying every split of
/// `C` into blocks of at most `z` vertices and every assignment of `F` to blocks.
pub fn find_certificate(g: &MultiGraph, f: &Fvc, z: usize) -> Result<Option<Certificate>> {
    if !verify_antler(g, f)? {
        return Ok(None);
    }
    let inside = f.vertices();
    if f.cut.len() <= z {
        let h = g.induced_unchecked(&inside);
        return Ok(Some(Certificate::from_graph(&h, z)));
    }
    if z == 0 {
        return Ok(None);
    }
    let cut: Vec<Vertex> = f.cut.iter().copied().collect();
    let forest: Vec<Vertex> = f.forest.iter().copied().collect();
    for blocks in bounded_partitions(&cut, z) {
        let work = (blocks.len() as f64).powi(forest.len() as i32);
        if work > (1u64 << 22) as f64 {
            return Err(Error::Refusal {
                what: "certificate assignments",
                size: work as usize,
                cap: 1 << 22,
            });
        }
        let mut assign = vec![0usize; forest.len()];
        loop {
            let parts: Vec<VertexSet> = (0..blocks.len())
                .map(|b| {
                    let mut s: VertexSet = blocks[b].iter().copied().collect();
                    s.extend(
                        forest
                            .iter()
                            .zip(&assign)
                            .filter(|(_, &a)| a == b)
                            .map(|(&v, _)| v),
                    );
                    s
                })
                .collect();
            let ok = parts
                .iter()
                .zip(&blocks)
                .all(|(p, b)| fvs_at_least(&g.induced_unchecked(p), b.len()));
            if ok {
                let mut cert = Certificate {
                    order: z,
                    ..Default::default()
                };
                for p in &parts {
                    let h = g.induced_unchecked(p);
                    cert.vertices.extend(h.vertices());
                    cert.edges.extend(h.edge_ids());
                }
                return Ok(Some(cert));
            }
            if !advance(&mut assign, blocks.len()) {
                break;
            }
        }
    }
    Ok(None)
}

fn advance(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Set partitions of `items` into blocks of size at most `cap`.
fn bounded_partitions(items: &[Vertex], cap: usize) -> Vec<Vec<Vec<Vertex>>> {
    let Some((&first, rest)) = items.split_first() else {
        return vec![Vec::new()];
    };
    let mut out = Vec::new();
    for size in 0..cap.min(rest.len() + 1) {
        for companions in rest.iter().copied().combinations(size) {
            let remaining: Vec<Vertex> = rest
                .iter()
                .copied()
                .filter(|v| !companions.contains(v))
                .collect();
            let mut block = vec![first];
            block.extend(companions.iter().copied());
            for mut tail in bounded_partitions(&remaining, cap) {
                tail.insert(0, block.clone());
                out.push(tail);
            }
        }
    }
    out
}

/// Bitmask view of a small graph for exhaustive enumeration.
struct MaskGraph {
    ids: Vec<Vertex>,
    edges: Vec<(usize, usize)>,
}

impl MaskGraph {
    fn new(g: &MultiGraph) -> Self {
        let ids: Vec<Vertex> = g.vertices().collect();
        let index: BTreeMap<Vertex, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        Self {
            ids,
            edges: g.edges().map(|(_, a, b)| (index[&a], index[&b])).collect(),
        }
    }

    fn set(&self, mask: u32) -> VertexSet {
        (0..self.ids.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| self.ids[i])
            .collect()
    }

    fn is_fvc(&self, cut: u32, forest: u32) -> bool {
        let n = self.ids.len();
        let mut uf = UnionFind::new(n);
        let inf = |v: usize| forest >> v & 1 == 1;
        let outside = |v: usize| (cut | forest) >> v & 1 == 0;
        for &(a, b) in &self.edges {
            if inf(a) && inf(b) && !uf.union(a, b) {
                return false;
            }
        }
        let mut out = vec![0u32; n];
        for &(a, b) in &self.edges {
            if inf(a) && outside(b) {
                out[uf.find(a)] += 1;
            } else if inf(b) && outside(a) {
                out[uf.find(b)] += 1;
            }
        }
        out.iter().all(|&c| c <= 1)
    }
}

/// Every FVC with width at most `k_max`, in (cut mask, forest mask) order.
pub fn enumerate_fvcs(g: &MultiGraph, k_max: usize) -> Result<Vec<Fvc>> {
    Error::refuse("vertex count", g.n(), OracleCaps::current().enumerate)?;
    let mg = MaskGraph::new(g);
    let n = mg.ids.len();
    let full = (1u32 << n) - 1;
    let mut out = Vec::new();
    for cut in 0..=full {
        if cut.count_ones() as usize > k_max {
            continue;
        }
        let free = full & !cut;
        let mut forest = free;
        // Walk every submask of `free`, empty one included.
        loop {
            if mg.is_fvc(cut, forest) {
                out.push(Fvc::new(mg.set(cut), mg.set(forest)));
            }
            if forest == 0 {
                break;
            }
            forest = (forest - 1) & free;
        }
    }
    out.sort();
    Ok(out)
}

/// Every z-antler of width at most `k_max`, each with a certificate found by
/// exhaustive search.
pub fn enumerate_antlers(g: &MultiGraph, k_max: usize, z: usize) -> Result<Vec<Antler>> {
    let mut out = Vec::new();
    for base in enumerate_fvcs(g, k_max)? {
        if let Some(cert) = find_certificate(g, &base, z)? {
            out.push(Antler {
                base,
                certificate: Some(cert),
            });
        }
    }
    Ok(out)
}
