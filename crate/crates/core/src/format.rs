//! Text formats: a DIMACS-style instance file, a coloring file and DOT output.
//!
//! Instance files look like
//!
//! ```text
//! c comment
//! p fvs 3 4
//! e 1 2
//! e 1 2
//! e 2 3
//! e 3 3
//! ```
//!
//! Repeated `e` lines are parallel edges and `e u u` is a loop. Edge ids are
//! assigned from 1 in line order. By default the vertex set is `1..=n`; if
//! any `v <id>` line is present, exactly the declared ids exist. Serialized
//! output sorts edge lines, so serializing twice in a row is stable.

use std::fmt::Write as _;

use crate::antler_finder::{Color, Coloring3};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, MultiGraph, Vertex};
use crate::structures::Fvc;

fn ids<'a>(line: usize, parts: impl Iterator<Item = &'a str>, count: usize) -> Result<Vec<u32>> {
    let out: Vec<u32> = parts
        .map(|p| {
            p.parse::<u32>()
                .map_err(|_| Error::parse(line, format!("bad integer {p:?}")))
        })
        .collect::<Result<_>>()?;
    if out.len() != count {
        return Err(Error::parse(
            line,
            format!("expected {count} integers, found {}", out.len()),
        ));
    }
    Ok(out)
}

fn meaningful(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let parts: Vec<&str> = l.split_whitespace().collect();
        match parts.first() {
            None | Some(&"c") => None,
            Some(_) => Some((i + 1, parts)),
        }
    })
}

pub fn parse_graph(text: &str) -> Result<MultiGraph> {
    let mut lines = meaningful(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing header"))?;
    if header.len() != 4 || header[0] != "p" || header[1] != "fvs" {
        return Err(Error::parse(hline, "header must be `p fvs <n> <m>`"));
    }
    let nm = ids(hline, header[2..].iter().copied(), 2)?;
    let (n, m) = (nm[0], nm[1] as usize);
    let mut declared = Vec::new();
    let mut edges = Vec::new();
    for (line, parts) in lines {
        let in_range = |id: u32| {
            if (1..=n).contains(&id) {
                Ok(Vertex(id))
            } else {
                Err(Error::parse(line, format!("vertex {id} outside 1..={n}")))
            }
        };
        match parts[0] {
            "v" => declared.push((
                line,
                in_range(ids(line, parts[1..].iter().copied(), 1)?[0])?,
            )),
            "e" => {
                let uv = ids(line, parts[1..].iter().copied(), 2)?;
                edges.push((line, in_range(uv[0])?, in_range(uv[1])?));
            }
            other => return Err(Error::parse(line, format!("unknown line type {other:?}"))),
        }
    }
    if edges.len() != m {
        return Err(Error::parse(
            hline,
            format!("header says {m} edges, found {}", edges.len()),
        ));
    }
    let mut g = if declared.is_empty() {
        MultiGraph::with_vertices((1..=n).map(Vertex))
    } else {
        let mut g = MultiGraph::new();
        for (line, v) in declared {
            if !g.add_vertex(v) {
                return Err(Error::parse(line, format!("vertex {v} declared twice")));
            }
        }
        g
    };
    for (line, a, b) in edges {
        g.add_edge(a, b)
            .map_err(|e| Error::parse(line, e.to_string()))?;
    }
    Ok(g)
}

pub fn serialize_graph(g: &MultiGraph) -> String {
    let n = g.vertices().last().map_or(0, |v| v.0);
    let mut out = format!("p fvs {n} {}\n", g.m());
    if g.n() != n as usize {
        for v in g.vertices() {
            writeln!(out, "v {v}").unwrap();
        }
    }
    let mut edges: Vec<(Vertex, Vertex)> = g.edges().map(|(_, a, b)| (a, b)).collect();
    edges.sort();
    for (a, b) in edges {
        writeln!(out, "e {a} {b}").unwrap();
    }
    out
}

fn color_of(line: usize, s: &str) -> Result<Color> {
    match s {
        "C" => Ok(Color::C),
        "F" => Ok(Color::F),
        "R" => Ok(Color::R),
        _ => Err(Error::parse(
            line,
            format!("color must be C, F or R, got {s:?}"),
        )),
    }
}

/// Lines `v <id> C|F|R` and `g <edge-id> C|F|R`; unlisted elements read as R.
pub fn parse_coloring(text: &str) -> Result<Coloring3> {
    let mut chi = Coloring3::default();
    for (line, parts) in meaningful(text) {
        if parts.len() != 3 {
            return Err(Error::parse(line, "expected `<v|g> <id> <color>`"));
        }
        let id = ids(line, parts[1..2].iter().copied(), 1)?[0];
        let color = color_of(line, parts[2])?;
        match parts[0] {
            "v" => chi.vertices.insert(Vertex(id), color),
            "g" => chi.edges.insert(EdgeId(id), color),
            other => return Err(Error::parse(line, format!("unknown line type {other:?}"))),
        };
    }
    Ok(chi)
}

pub fn serialize_coloring(chi: &Coloring3) -> String {
    let name = |c: Color| match c {
        Color::C => "C",
        Color::F => "F",
        Color::R => "R",
    };
    let mut out = String::new();
    for (v, &c) in &chi.vertices {
        writeln!(out, "v {v} {}", name(c)).unwrap();
    }
    for (e, &c) in &chi.edges {
        writeln!(out, "g {e} {}", name(c)).unwrap();
    }
    out
}

/// Graphviz text with one line per edge, so parallel edges and loops show.
/// Cut vertices of `highlight` are boxes, its forest vertices are filled.
pub fn to_dot(g: &MultiGraph, highlight: Option<&Fvc>) -> String {
    let mut out = String::from("graph G {\n");
    for v in g.vertices() {
        let style = match highlight {
            Some(f) if f.cut.contains(&v) => " [shape=box]",
            Some(f) if f.forest.contains(&v) => " [style=filled]",
            _ => "",
        };
        writeln!(out, "  {v}{style};").unwrap();
    }
    for (e, a, b) in g.edges() {
        writeln!(out, "  {a} -- {b} [label=\"{e}\"];").unwrap();
    }
    out.push_str("}\n");
    out
}
