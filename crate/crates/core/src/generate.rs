//! Seeded instance generators. All randomness comes from `ChaCha8Rng`
//! seeded with the caller's `u64`, so output is identical across platforms.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::fvs_exact;
use crate::graph::{MultiGraph, Vertex, VertexSet};
use crate::structures::{Certificate, Fvc};

/// Sidecar data written next to a generated instance.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub cut: VertexSet,
    pub forest: VertexSet,
    pub order: usize,
    pub certificate: Option<Certificate>,
    pub optimum: Option<usize>,
    /// Planted antlers in removal order; a single entry for one antler.
    #[serde(default)]
    pub sequence: Vec<Fvc>,
    pub seed: u64,
}

impl GroundTruth {
    pub fn antler(&self) -> Fvc {
        Fvc::new(self.cut.clone(), self.forest.clone())
    }
}

#[derive(Clone, Debug)]
pub struct Planted {
    pub graph: MultiGraph,
    pub truth: GroundTruth,
}

/// Optimum recorded in sidecars when the instance is at most this large.
pub const OPTIMUM_CAP: usize = 40;

/// `m` edges on `1..=n`; about one in ten is a loop, parallels arise freely.
pub fn random_multigraph(n: u32, m: usize, seed: u64) -> MultiGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = MultiGraph::with_vertices((1..=n).map(Vertex));
    if n == 0 {
        return g;
    }
    for _ in 0..m {
        let a = rng.gen_range(1..=n);
        let b = if rng.gen_bool(0.1) {
            a
        } else {
            rng.gen_range(1..=n)
        };
        g.add_edge(Vertex(a), Vertex(b)).unwrap();
    }
    g
}

/// A random multigraph topped up until every vertex has degree at least 3.
pub fn random_min_degree3(n: u32, seed: u64) -> MultiGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = random_multigraph(n, n as usize, rng.gen());
    if n < 2 {
        return g;
    }
    loop {
        let low = g.vertices().find(|&v| g.degree(v) < 3);
        let Some(v) = low else { break };
        let u = loop {
            let u = Vertex(rng.gen_range(1..=n));
            if u != v {
                break u;
            }
        };
        g.add_edge(v, u).unwrap();
    }
    g
}

struct Builder {
    g: MultiGraph,
    next: u32,
    rng: ChaCha8Rng,
}

impl Builder {
    fn new(seed: u64) -> Self {
        Self {
            g: MultiGraph::new(),
            next: 1,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn vertex(&mut self) -> Vertex {
        let v = Vertex(self.next);
        self.next += 1;
        self.g.add_vertex(v);
        v
    }

    fn edge(&mut self, a: Vertex, b: Vertex) -> crate::graph::EdgeId {
        self.g.add_edge(a, b).unwrap()
    }

    /// A random tree on `size` fresh vertices.
    fn tree(&mut self, size: usize) -> Vec<Vertex> {
        let mut vs: Vec<Vertex> = Vec::with_capacity(size);
        for i in 0..size {
            let v = self.vertex();
            if i > 0 {
                let p = vs[self.rng.gen_range(0..i)];
                self.edge(p, v);
            }
            vs.push(v);
        }
        vs
    }

    /// A cycle through `head` and a fresh path of 1 to 3 vertices; one
    /// vertex gives a double edge. Returns the path and the cycle's edges.
    fn private_cycle(&mut self, head: Vertex) -> (Vec<Vertex>, Vec<crate::graph::EdgeId>) {
        let len = self.rng.gen_range(1..=3);
        let path: Vec<Vertex> = (0..len).map(|_| self.vertex()).collect();
        let mut edges = vec![self.edge(head, path[0])];
        for w in path.windows(2) {
            edges.push(self.edge(w[0], w[1]));
        }
        edges.push(self.edge(*path.last().unwrap(), head));
        (path, edges)
    }

    /// Heads with private cycles plus `trees_per_head` pendant trees per head.
    /// Returns the antler, its certificate and the pendant trees.
    fn block(
        &mut self,
        width: usize,
        trees_per_head: usize,
    ) -> (Fvc, Certificate, Vec<Vec<Vertex>>) {
        let heads: Vec<Vertex> = (0..width).map(|_| self.vertex()).collect();
        let mut antler = Fvc::new(heads.iter().copied().collect(), VertexSet::new());
        let mut cert = Certificate {
            order: 1,
            ..Default::default()
        };
        let mut trees = Vec::new();
        for &h in &heads {
            let (path, edges) = self.private_cycle(h);
            cert.vertices.insert(h);
            cert.vertices.extend(path.iter().copied());
            cert.edges.extend(edges);
            antler.forest.extend(path);
            for _ in 0..trees_per_head {
                let size = self.rng.gen_range(1..=3);
                let t = self.tree(size);
                let links = self.rng.gen_range(1..=2);
                for _ in 0..links {
                    let x = *t.choose(&mut self.rng).unwrap();
                    self.edge(h, x);
                }
                antler.forest.extend(t.iter().copied());
                trees.push(t);
            }
        }
        (antler, cert, trees)
    }

    /// Connect `rest` into a random connected graph with a few extra edges.
    fn connect(&mut self, rest: &[Vertex]) {
        for i in 1..rest.len() {
            let p = rest[self.rng.gen_range(0..i)];
            self.edge(p, rest[i]);
        }
        for _ in 0..rest.len() {
            let a = *rest.choose(&mut self.rng).unwrap();
            let b = *rest.choose(&mut self.rng).unwrap();
            self.edge(a, b);
        }
    }

    /// Renumber edges in serialized order so ids survive a write and re-read.
    fn finish(self, mut truth: GroundTruth) -> Planted {
        let mut edges: Vec<_> = self.g.edges().map(|(e, a, b)| (a, b, e)).collect();
        edges.sort();
        let mut graph = MultiGraph::with_vertices(self.g.vertices());
        let mut renamed = BTreeMap::new();
        for (a, b, old) in edges {
            renamed.insert(old, graph.add_edge(a, b).unwrap());
        }
        if let Some(cert) = truth.certificate.as_mut() {
            cert.edges = cert.edges.iter().map(|e| renamed[e]).collect();
        }
        if graph.n() <= OPTIMUM_CAP {
            truth.optimum = Some(fvs_exact(&graph).size);
        }
        Planted { graph, truth }
    }
}

/// A width-`width` antler with an order-1 certificate (so also order `z`)
/// attached to a random connected graph on `rest_size` vertices.
///
/// Every head owns a private cycle and `trees_per_head` pendant trees; each
/// pendant tree sends at most one edge into the rest.
pub fn gen_planted(
    width: usize,
    z: usize,
    trees_per_head: usize,
    rest_size: usize,
    seed: u64,
) -> Result<Planted> {
    if z == 0 || z > width {
        return Err(Error::domain(format!(
            "need 1 <= z <= width, got z = {z}, width = {width}"
        )));
    }
    let mut b = Builder::new(seed);
    let (antler, cert, trees) = b.block(width, trees_per_head);
    let rest: Vec<Vertex> = (0..rest_size).map(|_| b.vertex()).collect();
    b.connect(&rest);
    if !rest.is_empty() {
        for t in &trees {
            if b.rng.gen_bool(0.5) {
                let x = *t.choose(&mut b.rng).unwrap();
                let y = *rest.choose(&mut b.rng).unwrap();
                b.edge(x, y);
            }
        }
        for &h in &antler.cut {
            for _ in 0..b.rng.gen_range(1..=2) {
                let y = *rest.choose(&mut b.rng).unwrap();
                b.edge(h, y);
            }
        }
    }
    let truth = GroundTruth {
        cut: antler.cut.clone(),
        forest: antler.forest.clone(),
        order: z,
        certificate: Some(Certificate { order: z, ..cert }),
        optimum: None,
        sequence: vec![antler],
        seed,
    };
    Ok(b.finish(truth))
}

/// Antlers of the given widths where block `i` only becomes removable once
/// the blocks before it are gone: its trees and heads send edges into
/// later blocks. The optimum is the sum of the widths.
pub fn gen_antler_chain(widths: &[usize], trees_per_head: usize, seed: u64) -> Result<Planted> {
    if widths.contains(&0) {
        return Err(Error::domain("chain widths must be positive"));
    }
    let mut b = Builder::new(seed);
    let blocks: Vec<_> = widths.iter().map(|&w| b.block(w, trees_per_head)).collect();
    for (i, (antler, _, trees)) in blocks.iter().enumerate() {
        let later: Vec<Vertex> = blocks[i + 1..]
            .iter()
            .flat_map(|(a, _, _)| a.vertices())
            .collect();
        if later.is_empty() {
            continue;
        }
        for t in trees {
            if b.rng.gen_bool(0.7) {
                let x = *t.choose(&mut b.rng).unwrap();
                let y = *later.choose(&mut b.rng).unwrap();
                b.edge(x, y);
            }
        }
        for &h in &antler.cut {
            let y = *later.choose(&mut b.rng).unwrap();
            b.edge(h, y);
        }
    }
    let sequence: Vec<Fvc> = blocks.iter().map(|(a, _, _)| a.clone()).collect();
    let all = sequence.iter().fold(Fvc::empty(), |acc, a| acc.union(a));
    let mut cert = Certificate {
        order: 1,
        ..Default::default()
    };
    for (_, c, _) in &blocks {
        cert.vertices.extend(c.vertices.iter().copied());
        cert.edges.extend(c.edges.iter().copied());
    }
    let truth = GroundTruth {
        cut: all.cut,
        forest: all.forest,
        order: 1,
        certificate: Some(cert),
        optimum: None,
        sequence,
        seed,
    };
    Ok(b.finish(truth))
}

/// An instance where a cut vertex centres a flower of order `|C| + 1`
/// inside its forest. Returns the graph, the FVC and the centre.
pub fn gen_flower_instance(seed: u64) -> (MultiGraph, Fvc, Vertex) {
    let mut b = Builder::new(seed);
    let width = b.rng.gen_range(1..=2);
    let heads: Vec<Vertex> = (0..width).map(|_| b.vertex()).collect();
    let centre = heads[0];
    let mut fvc = Fvc::new(heads.iter().copied().collect(), VertexSet::new());
    for _ in 0..=width {
        let (path, _) = b.private_cycle(centre);
        fvc.forest.extend(path);
    }
    for &h in &heads[1..] {
        let (path, _) = b.private_cycle(h);
        fvc.forest.extend(path);
    }
    let rest: Vec<Vertex> = (0..b.rng.gen_range(2..=4)).map(|_| b.vertex()).collect();
    b.connect(&rest);
    for &h in &heads {
        let y = *rest.choose(&mut b.rng).unwrap();
        b.edge(h, y);
    }
    (b.g, fvc, centre)
}

/// Ingredients for a valid tree rewiring: graph, FVC, centre, hit set,
/// tree and the tree vertex joined to the centre.
pub struct RewireInstance {
    pub graph: MultiGraph,
    pub fvc: Fvc,
    pub centre: Vertex,
    pub hit_set: VertexSet,
    pub tree: VertexSet,
    pub attach: Vertex,
}

/// Trees that each touch the centre once and every other cut vertex, with
/// enough of them that any one can be rewired.
pub fn gen_rewire_instance(seed: u64) -> RewireInstance {
    let mut b = Builder::new(seed);
    let width = b.rng.gen_range(1..=2);
    let heads: Vec<Vertex> = (0..width).map(|_| b.vertex()).collect();
    let centre = heads[0];
    let mut fvc = Fvc::new(heads.iter().copied().collect(), VertexSet::new());
    let count = width + 2 + b.rng.gen_range(0..=1);
    let mut trees = Vec::new();
    for _ in 0..count {
        let size = b.rng.gen_range(1..=2);
        let t = b.tree(size);
        b.edge(centre, t[0]);
        for &h in &heads[1..] {
            let x = *t.choose(&mut b.rng).unwrap();
            b.edge(h, x);
        }
        fvc.forest.extend(t.iter().copied());
        trees.push(t);
    }
    let rest: Vec<Vertex> = (0..b.rng.gen_range(2..=3)).map(|_| b.vertex()).collect();
    b.connect(&rest);
    for &h in &heads {
        let y = *rest.choose(&mut b.rng).unwrap();
        b.edge(h, y);
        b.edge(h, y);
    }
    let pick = trees.choose(&mut b.rng).unwrap().clone();
    RewireInstance {
        graph: b.g,
        fvc,
        centre,
        hit_set: VertexSet::new(),
        attach: pick[0],
        tree: pick.into_iter().collect(),
    }
}
