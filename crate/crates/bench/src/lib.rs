//! Fixed input sets shared by the benchmarks.

use antler_core::generate::{gen_antler_chain, gen_planted, random_min_degree3, Planted};
use antler_core::{Coloring3, MultiGraph};

/// Minimum-degree-3 graphs with `n` vertices, for the exact solver.
pub fn dense_graphs(n: u32, count: u64) -> Vec<MultiGraph> {
    (0..count).map(|seed| random_min_degree3(n, seed)).collect()
}

/// Single planted antlers of the given width, with order 1.
pub fn planted(width: usize, count: u64) -> Vec<Planted> {
    (0..count)
        .map(|seed| gen_planted(width, 1, 1, 6, seed).expect("valid generator parameters"))
        .collect()
}

/// Chains of antlers, each block of the given widths.
pub fn chains(widths: &[usize], count: u64) -> Vec<Planted> {
    (0..count)
        .map(|seed| gen_antler_chain(widths, 1, seed).expect("valid generator parameters"))
        .collect()
}

/// Planted instances paired with the proper coloring of their antler.
pub fn colored(width: usize, count: u64) -> Vec<(MultiGraph, Coloring3)> {
    planted(width, count)
        .into_iter()
        .filter_map(|p| {
            let cert = p.truth.certificate.as_ref()?;
            let chi = Coloring3::proper(&p.graph, &p.truth.antler(), cert);
            Some((p.graph, chi))
        })
        .collect()
}
