//! Antler search by 3-colorings of vertices and edges, the preprocessing
//! loop built on it, and a solver that climbs the (width, order) grid.

use std::collections::BTreeMap;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::fvs_at_least;
use crate::fvc_finder::{find_reducible_fvc, FvcFamily};
use crate::graph::{EdgeId, Element, MultiGraph, Vertex, VertexSet};
use crate::reducer::{apply_operation, op3_remove_antler, Reduced, ReductionTrace};
use crate::structures::{find_certificate, verify_certificate, Certificate, Fvc};
use crate::universal::{build_universal, UniversalBackend};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Color {
    C,
    F,
    R,
}

/// Colors for vertices and edges. Anything absent reads as [`Color::R`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring3 {
    pub vertices: BTreeMap<Vertex, Color>,
    pub edges: BTreeMap<EdgeId, Color>,
}

impl Coloring3 {
    pub fn uniform(g: &MultiGraph, color: Color) -> Self {
        Self {
            vertices: g.vertices().map(|v| (v, color)).collect(),
            edges: g.edge_ids().map(|e| (e, color)).collect(),
        }
    }

    /// The coloring that puts the cut on C, the forest on F, the
    /// certificate edges on F and everything else on R.
    pub fn proper(g: &MultiGraph, antler: &Fvc, cert: &Certificate) -> Self {
        let vertices = g
            .vertices()
            .map(|v| {
                let c = if antler.cut.contains(&v) {
                    Color::C
                } else if antler.forest.contains(&v) {
                    Color::F
                } else {
                    Color::R
                };
                (v, c)
            })
            .collect();
        let edges = g
            .edge_ids()
            .map(|e| {
                (
                    e,
                    if cert.edges.contains(&e) {
                        Color::F
                    } else {
                        Color::R
                    },
                )
            })
            .collect();
        Self { vertices, edges }
    }

    pub fn vertex(&self, v: Vertex) -> Color {
        self.vertices.get(&v).copied().unwrap_or(Color::R)
    }

    pub fn edge(&self, e: EdgeId) -> Color {
        self.edges.get(&e).copied().unwrap_or(Color::R)
    }

    pub fn element(&self, x: Element) -> Color {
        match x {
            Element::Vertex(v) => self.vertex(v),
            Element::Edge(e) => self.edge(e),
        }
    }

    pub fn vertices_with(&self, color: Color) -> VertexSet {
        self.vertices
            .iter()
            .filter(|(_, &c)| c == color)
            .map(|(&v, _)| v)
            .collect()
    }

    /// Drop entries for elements no longer in `g`.
    pub fn restrict_to(&self, g: &MultiGraph) -> Self {
        Self {
            vertices: self
                .vertices
                .iter()
                .filter(|(v, _)| g.contains_vertex(**v))
                .map(|(&v, &c)| (v, c))
                .collect(),
            edges: self
                .edges
                .iter()
                .filter(|(e, _)| g.contains_edge(**e))
                .map(|(&e, &c)| (e, c))
                .collect(),
        }
    }

    /// An edge survives `G - χ⁻¹(R)` when it and both endpoints avoid R.
    fn keeps(&self, g: &MultiGraph, e: EdgeId) -> bool {
        let (a, b) = g.endpoints(e).expect("edge in graph");
        self.edge(e) != Color::R && self.vertex(a) != Color::R && self.vertex(b) != Color::R
    }
}

/// Whether `chi` colors the z-antler `antler` properly: cut on C, forest
/// on F, the forest's outer neighbours on R, and the non-R part of
/// `G[C ∪ F]` a certificate of order `z`.
pub fn is_properly_colored(
    g: &MultiGraph,
    antler: &Fvc,
    chi: &Coloring3,
    z: usize,
) -> Result<bool> {
    if antler.cut.iter().any(|&v| chi.vertex(v) != Color::C)
        || antler.forest.iter().any(|&v| chi.vertex(v) != Color::F)
    {
        return Ok(false);
    }
    let outer = g.set_neighbors(&antler.forest);
    if outer
        .difference(&antler.cut)
        .any(|&v| chi.vertex(v) != Color::R)
    {
        return Ok(false);
    }
    let vertices = antler.vertices();
    let edges = g
        .induced_unchecked(&vertices)
        .edge_ids()
        .filter(|&e| chi.edge(e) != Color::R)
        .collect();
    let cert = Certificate {
        vertices,
        edges,
        order: z,
    };
    verify_certificate(g, &antler.cut, &cert, z)
}

/// Components of `G[χ⁻¹(F)] - χ⁻¹(R)`, each with its neighbours in `G - χ⁻¹(R)`.
fn forest_parts(g: &MultiGraph, chi: &Coloring3) -> Vec<(VertexSet, VertexSet)> {
    let forest = chi.vertices_with(Color::F);
    let h = g.filtered_subgraph(&forest, |e| chi.keeps(g, e));
    h.components()
        .into_iter()
        .map(|comp| {
            let mut nbrs = VertexSet::new();
            for &v in &comp {
                for e in g.incident(v).filter(|&e| chi.keeps(g, e)) {
                    let (a, b) = g.endpoints(e).unwrap();
                    let u = if a == v { b } else { a };
                    if !comp.contains(&u) {
                        nbrs.insert(u);
                    }
                }
            }
            (comp, nbrs)
        })
        .collect()
}

fn closure(parts: &[(VertexSet, VertexSet)], cut: &VertexSet) -> VertexSet {
    parts
        .iter()
        .filter(|(_, n)| n.is_subset(cut))
        .flat_map(|(comp, _)| comp.iter().copied())
        .collect()
}

/// Forest vertices whose surviving neighbourhood lies inside `cut`.
pub fn w_chi(g: &MultiGraph, chi: &Coloring3, cut: &VertexSet) -> VertexSet {
    closure(&forest_parts(g, chi), cut)
}

/// Result of [`extract_antler`]: the antler and a certificate of the
/// requested order assembled from the sets marked in the final round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extraction {
    pub antler: Fvc,
    pub certificate: Certificate,
    pub rounds: usize,
}

/// Shrink `chi` until the C and F parts form a z-antler, which contains
/// every z-antler that `chi` colors properly.
pub fn extract_antler(g: &MultiGraph, chi: &Coloring3, z: usize) -> Extraction {
    let mut chi = chi.restrict_to(g);
    for v in g.vertices() {
        chi.vertices.entry(v).or_insert(Color::R);
    }
    let mut rounds = 0;
    loop {
        rounds += 1;
        for (e, a, b) in g.edges() {
            if chi.vertex(a) == Color::R || chi.vertex(b) == Color::R {
                chi.edges.insert(e, Color::R);
            }
        }

        let forest = chi.vertices_with(Color::F);
        let r_vertices = chi.vertices_with(Color::R);
        for comp in g.induced_unchecked(&forest).components() {
            let tree = g.induced_unchecked(&comp).is_acyclic();
            if !tree || g.count_between(&comp, &r_vertices) > 1 {
                for &v in &comp {
                    chi.vertices.insert(v, Color::R);
                    for e in g.incident(v) {
                        chi.edges.insert(e, Color::R);
                    }
                }
            }
        }

        let parts = forest_parts(g, &chi);
        let cut_colored: Vec<Vertex> = chi.vertices_with(Color::C).into_iter().collect();
        let mut marked = VertexSet::new();
        let mut accepted: Vec<VertexSet> = Vec::new();
        for size in 1..=z.min(cut_colored.len()) {
            for subset in cut_colored.iter().copied().combinations(size) {
                let d: VertexSet = subset.into_iter().collect();
                let mut keep = closure(&parts, &d);
                keep.extend(d.iter().copied());
                let h = g.filtered_subgraph(&keep, |e| chi.keeps(g, e));
                if fvs_at_least(&h, d.len()) {
                    marked.extend(d.iter().copied());
                    accepted.push(d);
                }
            }
        }

        let unmarked: Vec<Vertex> = cut_colored
            .iter()
            .copied()
            .filter(|v| !marked.contains(v))
            .collect();
        if unmarked.is_empty() {
            let antler = Fvc::new(chi.vertices_with(Color::C), chi.vertices_with(Color::F));
            let certificate = assemble_certificate(g, &chi, &parts, &accepted, z);
            return Extraction {
                antler,
                certificate,
                rounds,
            };
        }
        for v in unmarked {
            chi.vertices.insert(v, Color::R);
        }
    }
}

/// Union over accepted sets `C_i` of `G[D_i ∪ (W(D_{≤i}) \ W(D_{<i}))] - χ⁻¹(R)`
/// where `D_i = C_i \ C_{<i}`.
fn assemble_certificate(
    g: &MultiGraph,
    chi: &Coloring3,
    parts: &[(VertexSet, VertexSet)],
    accepted: &[VertexSet],
    z: usize,
) -> Certificate {
    let mut prefix = VertexSet::new();
    let mut covered = closure(parts, &prefix);
    let mut cert = Certificate {
        order: z,
        ..Default::default()
    };
    for c in accepted {
        let d: VertexSet = c.difference(&prefix).copied().collect();
        prefix.extend(d.iter().copied());
        let grown = closure(parts, &prefix);
        let mut piece: VertexSet = grown.difference(&covered).copied().collect();
        piece.extend(d);
        let h = g.filtered_subgraph(&piece, |e| chi.keeps(g, e));
        cert.edges.extend(h.edge_ids());
        cert.vertices.extend(piece);
        covered = grown;
    }
    cert
}

/// Size of the element sets whose colors decide properness, `26 k^5 z^2`.
pub fn coloring_parameter(k: usize, z: usize) -> usize {
    26 * k.pow(5) * z * z
}

/// Largest number of coloring pairs the universal mode will enumerate.
pub const UNIVERSAL_PAIR_CAP: usize = 1 << 20;

/// Where [`find_and_apply`] gets its colorings from, beyond the
/// reducible-FVC stage that always runs first.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchConfig {
    pub family: FvcFamily,
    pub seed: u64,
    /// A coloring of the input graph; restricted to the current graph each step.
    pub oracle: Option<Coloring3>,
    /// For each vertex set `C` of size at most `k`, color `C` as C, the
    /// part of `G - C` outside its 2-core as F, and the rest as R.
    pub peel_cuts: bool,
    /// Pairs of full exhaustive families over `V ∪ E`; refuses large inputs.
    pub universal_pairs: bool,
    pub random_trials: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            family: FvcFamily::Neighborhood,
            seed: 0,
            oracle: None,
            peel_cuts: true,
            universal_pairs: false,
            random_trials: 16,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub calls: usize,
    pub fvc_operations: usize,
    pub colorings_tried: usize,
    pub antlers_removed: usize,
    /// Chance the last unsuccessful call missed an antler it should have found.
    pub miss_probability: f64,
}

/// Vertices of `G - cut` outside its 2-core.
fn peel(g: &MultiGraph, cut: &VertexSet) -> VertexSet {
    let rest = g.without(cut);
    let mut degree: BTreeMap<Vertex, usize> =
        rest.vertices().map(|v| (v, rest.degree(v))).collect();
    let mut stack: Vec<Vertex> = degree
        .iter()
        .filter(|(_, &d)| d <= 1)
        .map(|(&v, _)| v)
        .collect();
    let mut peeled = VertexSet::new();
    while let Some(v) = stack.pop() {
        if !peeled.insert(v) {
            continue;
        }
        for u in rest.neighbors(v) {
            if peeled.contains(&u) {
                continue;
            }
            let d = degree.get_mut(&u).unwrap();
            *d -= rest.multiplicity(u, v);
            if *d <= 1 {
                stack.push(u);
            }
        }
    }
    peeled
}

fn peel_coloring(g: &MultiGraph, cut: &VertexSet) -> Coloring3 {
    let forest = peel(g, cut);
    let mut chi = Coloring3::uniform(g, Color::F);
    for v in g.vertices() {
        let c = if cut.contains(&v) {
            Color::C
        } else if forest.contains(&v) {
            Color::F
        } else {
            Color::R
        };
        chi.vertices.insert(v, c);
    }
    chi
}

fn random_coloring(g: &MultiGraph, rng: &mut ChaCha8Rng) -> Coloring3 {
    const ALL: [Color; 3] = [Color::C, Color::F, Color::R];
    Coloring3 {
        vertices: g
            .vertices()
            .map(|v| (v, ALL[rng.gen_range(0..3)]))
            .collect(),
        edges: g
            .edge_ids()
            .map(|e| (e, ALL[rng.gen_range(0..3)]))
            .collect(),
    }
}

fn universal_colorings(g: &MultiGraph, k: usize, z: usize, seed: u64) -> Result<Vec<Coloring3>> {
    let ground: Vec<Element> = g
        .vertices()
        .map(Element::Vertex)
        .chain(g.edge_ids().map(Element::Edge))
        .collect();
    let s = coloring_parameter(k, z).min(ground.len());
    let first = build_universal(&ground, s, UniversalBackend::Exhaustive, seed)?;
    let second = build_universal(&ground, s, UniversalBackend::Exhaustive, seed ^ 1)?;
    Error::refuse(
        "universal coloring pairs",
        first.len() * second.len(),
        UNIVERSAL_PAIR_CAP,
    )?;
    let mut out = Vec::with_capacity(first.len() * second.len());
    for a in &first.sets {
        for b in &second.sets {
            let mut chi = Coloring3::default();
            for (i, &x) in ground.iter().enumerate() {
                let c = if a.contains(i) {
                    Color::C
                } else if b.contains(i) {
                    Color::F
                } else {
                    Color::R
                };
                match x {
                    Element::Vertex(v) => chi.vertices.insert(v, c),
                    Element::Edge(e) => chi.edges.insert(e, c),
                };
            }
            out.push(chi);
        }
    }
    Ok(out)
}

/// One reduction step: a reducible FVC with an applicable operation, else
/// the first non-empty antler extracted from the configured colorings.
/// `None` means no step was found.
pub fn find_and_apply(
    g: &MultiGraph,
    k: usize,
    z: usize,
    config: &SearchConfig,
    stats: &mut SearchStats,
) -> Result<Option<Reduced>> {
    if z > k {
        return Err(Error::domain(format!("order {z} exceeds width {k}")));
    }
    stats.calls += 1;
    let fvc = find_reducible_fvc(g, k, config.family, config.seed)?;
    if !fvc.is_empty() {
        match apply_operation(g, &fvc) {
            Ok(r) => {
                stats.fvc_operations += 1;
                return Ok(Some(r));
            }
            Err(Error::NotFound(_)) => {}
            Err(e) => return Err(e),
        }
    }

    let mut try_coloring = |chi: &Coloring3| -> Result<Option<Reduced>> {
        stats.colorings_tried += 1;
        let found = extract_antler(g, chi, z).antler;
        if found.is_empty() {
            return Ok(None);
        }
        op3_remove_antler(g, &found).map(Some)
    };

    if let Some(oracle) = &config.oracle {
        if let Some(r) = try_coloring(&oracle.restrict_to(g))? {
            stats.antlers_removed += 1;
            return Ok(Some(r));
        }
    }
    if config.peel_cuts {
        let vertices: Vec<Vertex> = g.vertices().collect();
        for size in 1..=k.min(vertices.len()) {
            for cut in vertices.iter().copied().combinations(size) {
                let cut: VertexSet = cut.into_iter().collect();
                if let Some(r) = try_coloring(&peel_coloring(g, &cut))? {
                    stats.antlers_removed += 1;
                    return Ok(Some(r));
                }
            }
        }
    }
    if config.universal_pairs {
        for chi in universal_colorings(g, k, z, config.seed)? {
            if let Some(r) = try_coloring(&chi)? {
                stats.antlers_removed += 1;
                return Ok(Some(r));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(stats.calls as u64));
    for _ in 0..config.random_trials {
        if let Some(r) = try_coloring(&random_coloring(g, &mut rng))? {
            stats.antlers_removed += 1;
            return Ok(Some(r));
        }
    }

    stats.miss_probability = if config.universal_pairs || (config.peel_cuts && k <= z) {
        0.0
    } else {
        let relevant = coloring_parameter(k, z).min(g.n() + g.m()) as i32;
        (1.0 - 3f64.powi(-relevant)).powi(config.random_trials as i32)
    };
    Ok(None)
}

/// Output of [`reduce_all`].
#[derive(Clone, Debug)]
pub struct Reduction {
    pub graph: MultiGraph,
    pub solution: VertexSet,
    pub trace: ReductionTrace,
    pub stats: SearchStats,
}

/// Apply [`find_and_apply`] until it finds nothing.
pub fn reduce_all(g: &MultiGraph, k: usize, z: usize, config: &SearchConfig) -> Result<Reduction> {
    let mut graph = g.clone();
    let mut trace = ReductionTrace::default();
    let mut stats = SearchStats::default();
    while let Some(r) = find_and_apply(&graph, k, z, config, &mut stats)? {
        graph = r.graph;
        trace.push(r.step);
    }
    Ok(Reduction {
        solution: trace.accumulated(),
        graph,
        trace,
        stats,
    })
}

/// Output of [`solve_by_antler_complexity`].
#[derive(Clone, Debug)]
pub struct Solved {
    pub solution: VertexSet,
    pub width: usize,
    pub order: usize,
    pub trace: ReductionTrace,
}

/// `(k, z)` pairs with `1 ≤ z ≤ k ≤ cap`, cheapest first under
/// `k^5 z^2 + z log2 n`.
pub fn complexity_grid(cap: usize, n: usize) -> Vec<(usize, usize)> {
    let log_n = (n.max(2) as f64).log2();
    let cost = |k: usize, z: usize| (k.pow(5) * z * z) as f64 + z as f64 * log_n;
    (1..=cap)
        .flat_map(|k| (1..=k).map(move |z| (k, z)))
        .sorted_by(|a, b| cost(a.0, a.1).total_cmp(&cost(b.0, b.1)).then(a.cmp(b)))
        .collect()
}

/// A minimum feedback vertex set, found by running [`reduce_all`] on the
/// grid until the remainder is a forest.
pub fn solve_by_antler_complexity(
    g: &MultiGraph,
    cap: usize,
    config: &SearchConfig,
) -> Result<Solved> {
    for (k, z) in complexity_grid(cap, g.n()) {
        let r = reduce_all(g, k, z, config)?;
        if g.without(&r.solution).is_acyclic() {
            return Ok(Solved {
                solution: r.solution,
                width: k,
                order: z,
                trace: r.trace,
            });
        }
    }
    Err(Error::NotFound(format!(
        "antler complexity exceeds cap {cap}"
    )))
}

/// Antlers removed one after another, each in what the earlier ones left.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AntlerSequence {
    pub antlers: Vec<Fvc>,
    pub order: usize,
}

impl AntlerSequence {
    pub fn width(&self) -> usize {
        self.antlers.iter().map(Fvc::width).max().unwrap_or(0)
    }

    /// `(C_{≤i}, F_{≤i})` for every `i`.
    pub fn prefix_unions(&self) -> Vec<Fvc> {
        self.antlers
            .iter()
            .scan(Fvc::empty(), |acc, a| {
                *acc = acc.union(a);
                Some(acc.clone())
            })
            .collect()
    }

    /// Each entry is a z-antler of the graph left by the entries before it.
    pub fn verify(&self, g: &MultiGraph) -> Result<bool> {
        let mut rest = g.clone();
        for a in &self.antlers {
            if find_certificate(&rest, a, self.order)?.is_none() {
                return Ok(false);
            }
            rest = rest.without(&a.vertices());
        }
        Ok(true)
    }
}
