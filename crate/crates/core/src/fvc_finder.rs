//! Detection of reducible feedback vertex cuts through two-colorings.
//!
//! A coloring marks some vertices as cut candidates; the remaining vertices
//! induce a graph whose tree components are combined into a cut with a large
//! forest, either one tree at a time or as a knapsack-selected bundle sharing
//! a single attachment vertex.

use std::collections::BTreeMap;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{MultiGraph, Vertex, VertexSet};
use crate::structures::{verify_fvc, Fvc};
use crate::universal::{build_universal, UniversalBackend};

/// Two-coloring given by its cut-colored vertices; every other vertex is
/// forest-colored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring2 {
    pub cut_colored: VertexSet,
}

impl Coloring2 {
    pub fn new(cut_colored: VertexSet) -> Self {
        Self { cut_colored }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KnapsackItem {
    pub tree: usize,
    pub weight: usize,
    pub value: usize,
}

/// Forest-size threshold beyond which a cut of width `x` is reducible.
pub fn f_r(x: usize) -> usize {
    let x = x as u64;
    (2 * x * x * x + 3 * x * x - x) as usize
}

pub fn is_reducible(f: &Fvc) -> bool {
    f.forest.len() > f_r(f.width())
}

/// For every capacity `0..=b_max`, the best total value under that weight and
/// the chosen tree ids. Ties favour including lower tree ids.
pub fn knapsack_best_values(items: &[KnapsackItem], b_max: usize) -> Vec<(usize, Vec<usize>)> {
    let mut items = items.to_vec();
    items.sort_by_key(|it| it.tree);
    let n = items.len();
    // best[i][b]: optimum over items[i..] with capacity b.
    let mut best = vec![vec![0usize; b_max + 1]; n + 1];
    for i in (0..n).rev() {
        for b in 0..=b_max {
            let skip = best[i + 1][b];
            let take =
                (items[i].weight <= b).then(|| items[i].value + best[i + 1][b - items[i].weight]);
            best[i][b] = take.map_or(skip, |t| t.max(skip));
        }
    }
    (0..=b_max)
        .map(|b| {
            let mut chosen = Vec::new();
            let mut cap = b;
            for (i, it) in items.iter().enumerate() {
                if it.weight <= cap && it.value + best[i + 1][cap - it.weight] == best[i][cap] {
                    chosen.push(it.tree);
                    cap -= it.weight;
                }
            }
            (best[0][b], chosen)
        })
        .collect()
}

/// Dense multiplicity view reused across colorings of one graph.
struct ColorGraph {
    ids: Vec<Vertex>,
    mult: Vec<Vec<u32>>,
    adj: Vec<Vec<usize>>,
}

struct Tree {
    vertices: Vec<usize>,
    /// Cut-colored neighbours with their edge counts into the tree.
    attach: BTreeMap<usize, u32>,
}

impl ColorGraph {
    fn new(g: &MultiGraph) -> Self {
        let ids: Vec<Vertex> = g.vertices().collect();
        let index: BTreeMap<Vertex, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let n = ids.len();
        let mut mult = vec![vec![0u32; n]; n];
        for (_, a, b) in g.edges() {
            let (i, j) = (index[&a], index[&b]);
            mult[i][j] += 1;
            if i != j {
                mult[j][i] += 1;
            }
        }
        let adj = (0..n)
            .map(|i| (0..n).filter(|&j| j != i && mult[i][j] > 0).collect())
            .collect();
        Self { ids, mult, adj }
    }

    fn index_of(&self, v: Vertex) -> Option<usize> {
        self.ids.binary_search(&v).ok()
    }

    /// Tree components of the forest-colored part, by smallest vertex.
    fn trees(&self, is_cut: &[bool]) -> Vec<Tree> {
        let n = self.ids.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if is_cut[s] || seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut i = 0;
            while i < comp.len() {
                let x = comp[i];
                i += 1;
                for &y in &self.adj[x] {
                    if !is_cut[y] && !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                    }
                }
            }
            let mut inner = 0u32;
            for (p, &x) in comp.iter().enumerate() {
                inner += self.mult[x][x];
                for &y in &comp[p + 1..] {
                    inner += self.mult[x][y];
                }
            }
            if inner as usize + 1 != comp.len() {
                continue;
            }
            comp.sort_unstable();
            let mut attach = BTreeMap::new();
            for u in (0..n).filter(|&u| is_cut[u]) {
                let c: u32 = comp.iter().map(|&x| self.mult[u][x]).sum();
                if c > 0 {
                    attach.insert(u, c);
                }
            }
            out.push(Tree {
                vertices: comp,
                attach,
            });
        }
        out
    }

    fn to_set(&self, idx: impl IntoIterator<Item = usize>) -> VertexSet {
        idx.into_iter().map(|i| self.ids[i]).collect()
    }

    fn search(&self, is_cut: &[bool]) -> Fvc {
        let trees = self.trees(is_cut);
        for t in &trees {
            let single = t.attach.iter().find(|(_, &c)| c == 1).map(|(&u, _)| u);
            let cut: Vec<usize> = t
                .attach
                .keys()
                .copied()
                .filter(|&u| Some(u) != single)
                .collect();
            if t.vertices.len() > f_r(cut.len()) {
                return Fvc::new(self.to_set(cut), self.to_set(t.vertices.iter().copied()));
            }
        }
        for u in (0..self.ids.len()).filter(|&u| is_cut[u]) {
            if let Some(found) = self.bundle_at(u, &trees) {
                return found;
            }
        }
        Fvc::empty()
    }

    /// Bundle of trees each joined to `u` by exactly one edge.
    fn bundle_at(&self, u: usize, trees: &[Tree]) -> Option<Fvc> {
        let hanging: Vec<(usize, &Tree)> = trees
            .iter()
            .enumerate()
            .filter(|(_, t)| t.attach.get(&u) == Some(&1))
            .collect();
        if hanging.is_empty() {
            return None;
        }
        let mut touch: BTreeMap<usize, usize> = BTreeMap::new();
        for (_, t) in &hanging {
            for &x in t.attach.keys().filter(|&&x| x != u) {
                *touch.entry(x).or_insert(0) += 1;
            }
        }
        let shared: Vec<usize> = touch
            .iter()
            .filter(|(_, &c)| c >= 2)
            .map(|(&x, _)| x)
            .collect();
        let known = |x: &usize| *x == u || shared.binary_search(x).is_ok();
        let (closed, open): (Vec<_>, Vec<_>) = hanging
            .into_iter()
            .partition(|(_, t)| t.attach.keys().all(known));
        let closed_size: usize = closed.iter().map(|(_, t)| t.vertices.len()).sum();
        let extra = |t: &Tree| {
            t.attach
                .keys()
                .filter(|x| !known(x))
                .copied()
                .collect::<Vec<_>>()
        };
        let items: Vec<KnapsackItem> = open
            .iter()
            .map(|&(id, t)| KnapsackItem {
                tree: id,
                weight: extra(t).len(),
                value: t.vertices.len(),
            })
            .collect();
        let b_max = open.iter().flat_map(|(_, t)| extra(t)).unique().count();
        let table = knapsack_best_values(&items, b_max);
        for (b, (value, chosen)) in table.iter().enumerate() {
            if closed_size + value > f_r(shared.len() + b) {
                let picked: Vec<&Tree> = chosen.iter().map(|&id| &trees[id]).collect();
                let mut cut: Vec<usize> = shared.clone();
                cut.extend(picked.iter().flat_map(|t| t.attach.keys().copied()));
                let cut = self.to_set(cut.into_iter().filter(|&x| x != u));
                let forest = self.to_set(
                    closed
                        .iter()
                        .map(|&(_, t)| t)
                        .chain(picked)
                        .flat_map(|t| t.vertices.iter().copied()),
                );
                return Some(Fvc::new(cut, forest));
            }
        }
        None
    }

    fn mask(&self, chi: &Coloring2) -> Vec<bool> {
        let mut is_cut = vec![false; self.ids.len()];
        for &v in &chi.cut_colored {
            if let Some(i) = self.index_of(v) {
                is_cut[i] = true;
            }
        }
        is_cut
    }
}

/// A valid, possibly empty FVC read off the coloring; reducible whenever the
/// coloring separates a simple reducible FVC from its neighbourhood.
pub fn find_fvc_colored(g: &MultiGraph, chi: &Coloring2) -> Fvc {
    let cg = ColorGraph::new(g);
    let found = cg.search(&cg.mask(chi));
    debug_assert!(verify_fvc(g, &found));
    found
}

/// Which colorings [`find_reducible_fvc`] iterates over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FvcFamily {
    /// Every vertex set of size at most `k + 1` as the cut-colored part.
    #[default]
    Neighborhood,
    /// An `(n, 2 f_r(k) + k + 1)`-universal family over the vertices.
    Universal(UniversalBackend),
}

/// Set size the universal family must shatter for width `k`.
pub fn universal_parameter(k: usize) -> usize {
    2 * f_r(k) + k + 1
}

/// The first reducible FVC over the chosen coloring family, or the empty FVC.
pub fn find_reducible_fvc(g: &MultiGraph, k: usize, family: FvcFamily, seed: u64) -> Result<Fvc> {
    let cg = ColorGraph::new(g);
    let n = cg.ids.len();
    let try_mask = |is_cut: &[bool]| {
        let f = cg.search(is_cut);
        (!f.is_empty() && is_reducible(&f)).then_some(f)
    };
    match family {
        FvcFamily::Neighborhood => {
            let mut is_cut = vec![false; n];
            for size in 0..=(k + 1).min(n) {
                for q in (0..n).combinations(size) {
                    q.iter().for_each(|&i| is_cut[i] = true);
                    let hit = try_mask(&is_cut);
                    q.iter().for_each(|&i| is_cut[i] = false);
                    if let Some(f) = hit {
                        return Ok(f);
                    }
                }
            }
        }
        FvcFamily::Universal(backend) => {
            let ground: Vec<usize> = (0..n).collect();
            let s = universal_parameter(k).min(n);
            let fam = build_universal(&ground, s, backend, seed)?;
            for set in &fam.sets {
                let is_cut: Vec<bool> = (0..n).map(|i| set.contains(i)).collect();
                if let Some(f) = try_mask(&is_cut) {
                    return Ok(f);
                }
            }
        }
    }
    Ok(Fvc::empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::vset;

    #[test]
    fn threshold_values() {
        assert_eq!(f_r(0), 0);
        assert_eq!(f_r(1), 4);
        assert_eq!(f_r(2), 26);
        assert_eq!(universal_parameter(1), 10);
        assert_eq!(universal_parameter(2), 55);
    }

    #[test]
    fn knapsack_examples() {
        assert!(knapsack_best_values(&[], 3)
            .iter()
            .all(|(v, c)| *v == 0 && c.is_empty()));
        let items = [
            KnapsackItem {
                tree: 0,
                weight: 1,
                value: 3,
            },
            KnapsackItem {
                tree: 1,
                weight: 2,
                value: 5,
            },
        ];
        let t = knapsack_best_values(&items, 3);
        assert_eq!(t[2].0, 5);
        assert_eq!(t[3], (8, vec![0, 1]));
        let free = [KnapsackItem {
            tree: 4,
            weight: 0,
            value: 7,
        }];
        assert!(knapsack_best_values(&free, 2).iter().all(|(v, _)| *v == 7));
    }

    #[test]
    fn knapsack_prefers_low_ids_on_ties() {
        let items = [
            KnapsackItem {
                tree: 2,
                weight: 1,
                value: 4,
            },
            KnapsackItem {
                tree: 1,
                weight: 1,
                value: 4,
            },
        ];
        assert_eq!(knapsack_best_values(&items, 1)[1].1, vec![1]);
    }

    /// Head 1 joined to every vertex of the path 2..6, plus a pendant 7 on 6.
    fn fan() -> MultiGraph {
        MultiGraph::from_edges(
            7,
            &[
                (2, 3),
                (3, 4),
                (4, 5),
                (5, 6),
                (1, 2),
                (1, 3),
                (1, 4),
                (1, 5),
                (1, 6),
                (6, 7),
            ],
        )
    }

    #[test]
    fn all_cut_colored_gives_nothing() {
        let g = fan();
        assert!(find_fvc_colored(&g, &Coloring2::new(g.vertex_set())).is_empty());
    }

    #[test]
    fn single_tree_found() {
        let g = fan();
        let f = find_fvc_colored(&g, &Coloring2::new(vset([1, 7])));
        assert!(verify_fvc(&g, &f));
        assert!(is_reducible(&f));
        assert_eq!(f.width(), 1);
    }

    #[test]
    fn cyclic_component_skipped() {
        let g = MultiGraph::from_edges(3, &[(1, 2), (2, 3), (1, 3)]);
        assert!(find_fvc_colored(&g, &Coloring2::default()).is_empty());
    }

    #[test]
    fn bundle_of_pendant_paths() {
        // Head 1 and attachment 2; five paths of length two hang off both.
        let mut edges = Vec::new();
        for i in 0..5u32 {
            let (a, b) = (3 + 2 * i, 4 + 2 * i);
            edges.extend([(a, b), (1, a), (1, b), (2, b)]);
        }
        edges.push((1, 2));
        let g = MultiGraph::from_edges(12, &edges);
        let f = find_fvc_colored(&g, &Coloring2::new(vset([1, 2])));
        assert!(verify_fvc(&g, &f));
        assert!(is_reducible(&f), "{f:?}");
    }

    #[test]
    fn forest_yields_width_zero_cut() {
        let g = MultiGraph::from_edges(4, &[(1, 2), (2, 3), (3, 4)]);
        let f = find_reducible_fvc(&g, 1, FvcFamily::Neighborhood, 0).unwrap();
        assert!(f.cut.is_empty() && !f.forest.is_empty());
        assert!(verify_fvc(&g, &f));
    }

    #[test]
    fn cycle_without_pendants_has_no_reducible_cut() {
        let c4 = MultiGraph::from_edges(4, &[(1, 2), (2, 3), (3, 4), (4, 1)]);
        assert!(find_reducible_fvc(&c4, 1, FvcFamily::Neighborhood, 0)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn planted_width_one_found_by_both_families() {
        let g = fan();
        for family in [
            FvcFamily::Neighborhood,
            FvcFamily::Universal(UniversalBackend::Exhaustive),
        ] {
            let f = find_reducible_fvc(&g, 1, family, 0).unwrap();
            assert!(is_reducible(&f) && verify_fvc(&g, &f), "{family:?}");
        }
    }
}
