//! The five reduction operations and the driver that picks one given a
//! reducible feedback vertex cut.
//!
//! Every operation maps `G` to `(G', S)` with `fvs(G) = |S| + fvs(G')`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::tree_flower;
use crate::fvc_finder::is_reducible;
use crate::graph::{EdgeId, MultiGraph, Vertex, VertexSet};
use crate::structures::{verify_antler, verify_fvc, Fvc};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OpKind {
    Op1,
    Op2,
    Op3,
    Op4,
    Op5,
}

/// Operation-specific record; holds every id needed to replay the step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum StepDetails {
    TrimMultiplicity {
        u: Vertex,
        v: Vertex,
        removed_edges: Vec<EdgeId>,
    },
    ContractDegreeTwo {
        vertex: Vertex,
        new_edge: EdgeId,
        endpoints: (Vertex, Vertex),
    },
    RemoveAntler {
        cut: VertexSet,
        forest: VertexSet,
    },
    RemoveFlowerCenter {
        vertex: Vertex,
        petals: Vec<Vec<Vertex>>,
    },
    RewireTree {
        center: Vertex,
        hit_set: VertexSet,
        tree: VertexSet,
        attach: Vertex,
        removed_edge: EdgeId,
        added: Vec<(EdgeId, Vertex)>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionStep {
    pub kind: OpKind,
    pub removed: VertexSet,
    pub details: StepDetails,
}

/// Ordered log of applied steps; serializes as a JSON array of steps.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionStep>,
}

impl ReductionTrace {
    pub fn push(&mut self, step: ReductionStep) {
        self.steps.push(step);
    }

    /// Union of the removed sets.
    pub fn accumulated(&self) -> VertexSet {
        self.steps
            .iter()
            .flat_map(|s| s.removed.iter().copied())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Re-apply every step to `g`, reusing the recorded edge ids.
    pub fn replay(&self, g: &MultiGraph) -> Result<MultiGraph> {
        self.steps
            .iter()
            .try_fold(g.clone(), |acc, step| replay_step(&acc, step))
    }
}

pub fn replay_step(g: &MultiGraph, step: &ReductionStep) -> Result<MultiGraph> {
    let mut out = g.clone();
    match &step.details {
        StepDetails::TrimMultiplicity { removed_edges, .. } => {
            for &e in removed_edges {
                out.remove_edge(e)?;
            }
        }
        StepDetails::ContractDegreeTwo {
            vertex,
            new_edge,
            endpoints: (a, b),
        } => {
            out.remove_vertex(*vertex)?;
            out.insert_edge(*new_edge, *a, *b)?;
        }
        StepDetails::RemoveAntler { cut, forest } => {
            for &v in cut.iter().chain(forest) {
                out.remove_vertex(v)?;
            }
        }
        StepDetails::RemoveFlowerCenter { vertex, .. } => out.remove_vertex(*vertex)?,
        StepDetails::RewireTree {
            center,
            removed_edge,
            added,
            ..
        } => {
            out.remove_edge(*removed_edge)?;
            for &(e, u) in added {
                out.insert_edge(e, *center, u)?;
            }
        }
    }
    Ok(out)
}

/// A graph after one operation together with its log entry.
#[derive(Clone, Debug)]
pub struct Reduced {
    pub graph: MultiGraph,
    pub step: ReductionStep,
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain(msg()))
    }
}

/// Keep the two lowest-id edges of a pair joined by three or more.
pub fn op1_trim_multiplicity(g: &MultiGraph, u: Vertex, v: Vertex) -> Result<Reduced> {
    let parallel = g.edges_between_pair(u, v);
    require(parallel.len() >= 3, || {
        format!(
            "{u} and {v} are joined by {} edges, need at least 3",
            parallel.len()
        )
    })?;
    let removed_edges = parallel[2..].to_vec();
    let mut graph = g.clone();
    for &e in &removed_edges {
        graph.remove_edge(e)?;
    }
    Ok(Reduced {
        graph,
        step: ReductionStep {
            kind: OpKind::Op1,
            removed: VertexSet::new(),
            details: StepDetails::TrimMultiplicity {
                u,
                v,
                removed_edges,
            },
        },
    })
}

/// Replace a loop-free degree-two vertex by an edge between its neighbours.
pub fn op2_contract_degree2(g: &MultiGraph, v: Vertex) -> Result<Reduced> {
    require(g.contains_vertex(v), || format!("vertex {v} not in graph"))?;
    require(g.degree(v) == 2 && !g.has_self_loop(v), || {
        format!("vertex {v} must have degree 2 and no loop")
    })?;
    let ends: Vec<Vertex> = g
        .incident(v)
        .map(|e| {
            let (a, b) = g.endpoints(e).unwrap();
            if a == v {
                b
            } else {
                a
            }
        })
        .collect();
    let mut graph = g.clone();
    graph.remove_vertex(v)?;
    let new_edge = graph.add_edge(ends[0], ends[1])?;
    let endpoints = graph.endpoints(new_edge).unwrap();
    Ok(Reduced {
        graph,
        step: ReductionStep {
            kind: OpKind::Op2,
            removed: VertexSet::new(),
            details: StepDetails::ContractDegreeTwo {
                vertex: v,
                new_edge,
                endpoints,
            },
        },
    })
}

/// Delete an antler and put its cut into the solution.
pub fn op3_remove_antler(g: &MultiGraph, antler: &Fvc) -> Result<Reduced> {
    require(verify_antler(g, antler)?, || {
        format!("{antler:?} is not an antler")
    })?;
    Ok(Reduced {
        graph: g.without(&antler.vertices()),
        step: ReductionStep {
            kind: OpKind::Op3,
            removed: antler.cut.clone(),
            details: StepDetails::RemoveAntler {
                cut: antler.cut.clone(),
                forest: antler.forest.clone(),
            },
        },
    })
}

fn check_petals(g: &MultiGraph, fvc: &Fvc, v: Vertex, petals: &[Vec<Vertex>]) -> Result<()> {
    let mut used = VertexSet::new();
    let mut loops_used = 0;
    for p in petals {
        require(p.first() == Some(&v), || {
            format!("petal {p:?} does not start at {v}")
        })?;
        for &x in &p[1..] {
            require(fvc.forest.contains(&x) && used.insert(x), || {
                format!("petal {p:?} leaves the forest or reuses a vertex")
            })?;
        }
        let ok = match p.len() {
            1 => {
                loops_used += 1;
                g.loop_count(v) >= loops_used
            }
            2 => g.multiplicity(v, p[1]) >= 2,
            _ => {
                p.windows(2).all(|w| g.multiplicity(w[0], w[1]) >= 1)
                    && g.multiplicity(*p.last().unwrap(), v) >= 1
            }
        };
        require(ok, || format!("petal {p:?} is not a cycle"))?;
    }
    Ok(())
}

/// All petals through `v` inside `G[F ∪ {v}]`; loops at `v` are one-vertex petals.
pub fn flower_in_forest(g: &MultiGraph, fvc: &Fvc, v: Vertex) -> Result<Vec<Vec<Vertex>>> {
    let mut keep = fvc.forest.clone();
    keep.insert(v);
    let mut local = g.induced_subgraph(&keep)?;
    let loops: Vec<EdgeId> = local
        .incident(v)
        .filter(|&e| {
            let (a, b) = local.endpoints(e).unwrap();
            a == b
        })
        .collect();
    for &e in &loops {
        local.remove_edge(e)?;
    }
    let mut petals: Vec<Vec<Vertex>> = loops.iter().map(|_| vec![v]).collect();
    petals.extend(tree_flower(&local, v)?.petals);
    Ok(petals)
}

/// Remove a cut vertex that centres a flower of order `|C| + 1` inside its forest.
pub fn op4_remove_flower_center(
    g: &MultiGraph,
    fvc: &Fvc,
    v: Vertex,
    witness: Option<&[Vec<Vertex>]>,
) -> Result<Reduced> {
    require(verify_fvc(g, fvc), || format!("{fvc:?} is not an FVC"))?;
    require(fvc.cut.contains(&v), || format!("{v} is not in the cut"))?;
    let need = fvc.width() + 1;
    let mut petals = match witness {
        Some(p) => {
            check_petals(g, fvc, v, p)?;
            p.to_vec()
        }
        None => flower_in_forest(g, fvc, v)?,
    };
    require(petals.len() >= need, || {
        format!("flower at {v} has order {}, need {need}", petals.len())
    })?;
    petals.truncate(need);
    Ok(Reduced {
        graph: g.without(&VertexSet::from([v])),
        step: ReductionStep {
            kind: OpKind::Op4,
            removed: VertexSet::from([v]),
            details: StepDetails::RemoveFlowerCenter { vertex: v, petals },
        },
    })
}

/// Trees of `G[F] - X` with their neighbourhoods in `G`.
fn trees_off(g: &MultiGraph, fvc: &Fvc, hit_set: &VertexSet) -> Vec<(VertexSet, VertexSet)> {
    let rest: VertexSet = fvc.forest.difference(hit_set).copied().collect();
    g.induced_unchecked(&rest)
        .components()
        .into_iter()
        .map(|t| {
            let n = g.set_neighbors(&t);
            (t, n)
        })
        .collect()
}

/// Detach tree `tree` from `v` and compensate with double edges from `v` to
/// the tree's other neighbours.
pub fn op5_rewire_tree(
    g: &MultiGraph,
    fvc: &Fvc,
    v: Vertex,
    hit_set: &VertexSet,
    tree: &VertexSet,
    w: Vertex,
) -> Result<Reduced> {
    require(verify_fvc(g, fvc), || format!("{fvc:?} is not an FVC"))?;
    require(fvc.cut.contains(&v), || format!("{v} is not in the cut"))?;
    require(hit_set.is_subset(&fvc.forest), || {
        "hit set must lie in the forest".into()
    })?;
    let mut keep: VertexSet = fvc.forest.difference(hit_set).copied().collect();
    keep.insert(v);
    require(g.induced_unchecked(&keep).is_acyclic(), || {
        format!("G[F ∪ {{{v}}}] minus the hit set has a cycle")
    })?;
    let trees = trees_off(g, fvc, hit_set);
    let Some(pos) = trees.iter().position(|(t, _)| t == tree) else {
        return Err(Error::domain(
            "tree is not a component of G[F] minus the hit set",
        ));
    };
    require(tree.contains(&w), || format!("{w} is not in the tree"))?;
    let vw = g.edges_between_pair(v, w);
    require(vw.len() == 1, || {
        format!("{v} and {w} must share exactly one edge")
    })?;
    let others: Vec<Vertex> = trees[pos].1.iter().copied().filter(|&u| u != v).collect();
    for &u in &others {
        let support = trees
            .iter()
            .enumerate()
            .filter(|&(j, (_, n))| j != pos && n.contains(&u) && n.contains(&v))
            .count();
        require(support > fvc.width(), || {
            format!("only {support} other trees see both {u} and {v}")
        })?;
    }
    let mut graph = g.clone();
    graph.remove_edge(vw[0])?;
    let mut added = Vec::new();
    for &u in &others {
        for _ in graph.multiplicity(v, u)..2 {
            added.push((graph.add_edge(v, u)?, u));
        }
    }
    Ok(Reduced {
        graph,
        step: ReductionStep {
            kind: OpKind::Op5,
            removed: VertexSet::new(),
            details: StepDetails::RewireTree {
                center: v,
                hit_set: hit_set.clone(),
                tree: tree.clone(),
                attach: w,
                removed_edge: vw[0],
                added,
            },
        },
    })
}

/// Apply one operation, chosen in this order: a looped vertex, a vertex of
/// degree at most one, a degree-two vertex, a pair of multiplicity above
/// two, then a flower removal or tree rewiring around a heavy cut vertex.
///
/// Returns [`Error::NotFound`] when the cut is reducible but no candidate
/// tree meets the rewiring precondition.
pub fn apply_operation(g: &MultiGraph, fvc: &Fvc) -> Result<Reduced> {
    require(verify_fvc(g, fvc), || format!("{fvc:?} is not an FVC"))?;
    require(is_reducible(fvc), || format!("{fvc:?} is not reducible"))?;
    if let Some(v) = g.vertices().find(|&v| g.has_self_loop(v)) {
        return op3_remove_antler(g, &Fvc::new(VertexSet::from([v]), VertexSet::new()));
    }
    if let Some(v) = g.vertices().find(|&v| g.degree(v) <= 1) {
        return op3_remove_antler(g, &Fvc::new(VertexSet::new(), VertexSet::from([v])));
    }
    if let Some(v) = g.vertices().find(|&v| g.degree(v) == 2) {
        return op2_contract_degree2(g, v);
    }
    if let Some((&(u, v), _)) = g.pair_multiplicities().iter().find(|(_, &k)| k > 2) {
        return op1_trim_multiplicity(g, u, v);
    }
    let width = fvc.width();
    let heavy = 2 * width * width + 3 * width - 1;
    let load = |v: Vertex| g.count_between(&VertexSet::from([v]), &fvc.forest);
    let mut centres: Vec<Vertex> = fvc
        .cut
        .iter()
        .copied()
        .filter(|&v| load(v) > heavy)
        .collect();
    centres.extend(fvc.cut.iter().copied().filter(|&v| load(v) <= heavy));
    for v in centres {
        let petals = flower_in_forest(g, fvc, v)?;
        if petals.len() > width {
            return op4_remove_flower_center(g, fvc, v, Some(&petals));
        }
        let mut keep = fvc.forest.clone();
        keep.insert(v);
        let hit_set = tree_flower(&g.induced_unchecked(&keep), v)?.hit_set;
        let trees = trees_off(g, fvc, &hit_set);
        let mut marked = vec![false; trees.len()];
        // Anchors already doubly joined to v need no supporting trees.
        let anchors: VertexSet = hit_set
            .union(&fvc.cut)
            .copied()
            .filter(|&u| u != v && g.multiplicity(u, v) < 2)
            .collect();
        for u in anchors {
            trees
                .iter()
                .enumerate()
                .filter(|(_, (_, n))| n.contains(&u) && n.contains(&v))
                .take(width + 1)
                .for_each(|(j, _)| marked[j] = true);
        }
        for (j, (tree, nbrs)) in trees.iter().enumerate() {
            if marked[j] || !nbrs.contains(&v) {
                continue;
            }
            let w = *tree
                .iter()
                .find(|&&x| g.multiplicity(v, x) > 0)
                .expect("tree neighbours v");
            if let Ok(done) = op5_rewire_tree(g, fvc, v, &hit_set, tree, w) {
                return Ok(done);
            }
        }
    }
    Err(Error::NotFound(format!(
        "no operation applies to reducible cut {fvc:?}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::fvs_bruteforce;
    use crate::graph::vset;

    fn fvs(g: &MultiGraph) -> usize {
        fvs_bruteforce(g).unwrap().size
    }

    fn assert_safe(g: &MultiGraph, r: &Reduced) {
        assert_eq!(fvs(g), r.step.removed.len() + fvs(&r.graph));
        assert_eq!(replay_step(g, &r.step).unwrap(), r.graph);
    }

    #[test]
    fn trim_to_double() {
        for k in [3, 4] {
            let g = MultiGraph::from_edges(2, &vec![(1, 2); k]);
            let r = op1_trim_multiplicity(&g, Vertex(1), Vertex(2)).unwrap();
            assert_eq!(r.graph.multiplicity(Vertex(1), Vertex(2)), 2);
            assert_safe(&g, &r);
        }
        let d = MultiGraph::from_edges(2, &[(1, 2), (1, 2)]);
        assert!(op1_trim_multiplicity(&d, Vertex(1), Vertex(2)).is_err());
    }

    #[test]
    fn contract_path_and_digon() {
        let p = MultiGraph::from_edges(3, &[(1, 2), (2, 3)]);
        let r = op2_contract_degree2(&p, Vertex(2)).unwrap();
        assert_eq!(r.graph.multiplicity(Vertex(1), Vertex(3)), 1);
        let d = MultiGraph::from_edges(2, &[(1, 2), (1, 2)]);
        let r = op2_contract_degree2(&d, Vertex(2)).unwrap();
        assert!(r.graph.has_self_loop(Vertex(1)));
        assert_safe(&d, &r);
        let looped = MultiGraph::from_edges(1, &[(1, 1)]);
        assert!(op2_contract_degree2(&looped, Vertex(1)).is_err());
    }

    #[test]
    fn remove_antlers() {
        let looped = MultiGraph::from_edges(2, &[(1, 1), (1, 2)]);
        let r = op3_remove_antler(&looped, &Fvc::new(vset([1]), vset([]))).unwrap();
        assert_eq!(r.step.removed, vset([1]));
        let tree = MultiGraph::from_edges(3, &[(1, 2), (2, 3)]);
        let r = op3_remove_antler(&tree, &Fvc::new(vset([]), vset([1, 2, 3]))).unwrap();
        assert!(r.graph.is_empty() && r.step.removed.is_empty());
        // Triangle 1,2,3 hanging off a K4 on 4..7 through edge 3-4.
        let g = MultiGraph::from_edges(
            7,
            &[
                (1, 2),
                (2, 3),
                (1, 3),
                (3, 4),
                (4, 5),
                (4, 6),
                (4, 7),
                (5, 6),
                (5, 7),
                (6, 7),
            ],
        );
        let r = op3_remove_antler(&g, &Fvc::new(vset([1]), vset([2, 3]))).unwrap();
        assert_safe(&g, &r);
        assert!(op3_remove_antler(&g, &Fvc::new(vset([4]), vset([1, 2, 3]))).is_err());
    }

    #[test]
    fn flower_center_removal() {
        let g = MultiGraph::from_edges(5, &[(1, 2), (2, 3), (3, 1), (1, 4), (4, 5), (5, 1)]);
        let fvc = Fvc::new(vset([1]), vset([2, 3, 4, 5]));
        let r = op4_remove_flower_center(&g, &fvc, Vertex(1), None).unwrap();
        assert_eq!(r.step.removed, vset([1]));
        assert_safe(&g, &r);
        let one = MultiGraph::from_edges(3, &[(1, 2), (2, 3), (3, 1)]);
        let small = Fvc::new(vset([1]), vset([2, 3]));
        assert!(op4_remove_flower_center(&one, &small, Vertex(1), None).is_err());
        let bogus = vec![vec![Vertex(1), Vertex(2)], vec![Vertex(1), Vertex(3)]];
        assert!(op4_remove_flower_center(&one, &small, Vertex(1), Some(&bogus)).is_err());
    }

    #[test]
    fn rewire_lone_pendant_tree() {
        // 1 has a double edge to 2 and a single edge to leaf 3.
        let g = MultiGraph::from_edges(3, &[(1, 2), (1, 2), (1, 3)]);
        let fvc = Fvc::new(vset([1]), vset([3]));
        let r = op5_rewire_tree(&g, &fvc, Vertex(1), &vset([]), &vset([3]), Vertex(3)).unwrap();
        assert_eq!(r.graph.degree(Vertex(3)), 0);
        assert_eq!(r.graph.m(), 2);
        assert_safe(&g, &r);
    }

    #[test]
    fn rewire_trades_single_pairs() {
        for seed in 0..30 {
            let i = crate::generate::gen_rewire_instance(seed);
            let r =
                op5_rewire_tree(&i.graph, &i.fvc, i.centre, &i.hit_set, &i.tree, i.attach).unwrap();
            assert_eq!(r.graph.n(), i.graph.n());
            assert!(
                r.graph.single_edge_count() < i.graph.single_edge_count(),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn rewire_requires_support() {
        // Trees {3} and {4} both touch 1 and 2; |C| = 1 needs two other trees.
        let g = MultiGraph::from_edges(4, &[(1, 3), (2, 3), (1, 4), (2, 4)]);
        let fvc = Fvc::new(vset([1]), vset([3, 4]));
        assert!(op5_rewire_tree(&g, &fvc, Vertex(1), &vset([]), &vset([3]), Vertex(3)).is_err());
        let g = MultiGraph::from_edges(5, &[(1, 3), (2, 3), (1, 4), (2, 4), (1, 5), (2, 5)]);
        let fvc = Fvc::new(vset([1]), vset([3, 4, 5]));
        let r = op5_rewire_tree(&g, &fvc, Vertex(1), &vset([]), &vset([3]), Vertex(3)).unwrap();
        assert_eq!(r.graph.multiplicity(Vertex(1), Vertex(2)), 2);
        assert_safe(&g, &r);
    }

    #[test]
    fn driver_prefers_simple_rules() {
        let g = MultiGraph::from_edges(3, &[(1, 1), (1, 2), (2, 3)]);
        let fvc = Fvc::new(vset([]), vset([3]));
        let r = apply_operation(&g, &fvc).unwrap();
        assert_eq!(
            (r.step.kind, r.step.removed.clone()),
            (OpKind::Op3, vset([1]))
        );
        let g = MultiGraph::from_edges(3, &[(1, 2), (1, 2), (1, 2), (2, 3)]);
        let r = apply_operation(&g, &Fvc::new(vset([]), vset([3]))).unwrap();
        assert_eq!(
            r.step.details,
            StepDetails::RemoveAntler {
                cut: vset([]),
                forest: vset([3])
            }
        );
    }

    #[test]
    fn driver_rejects_small_cut() {
        let g = MultiGraph::from_edges(3, &[(1, 2), (2, 3), (3, 1)]);
        assert!(apply_operation(&g, &Fvc::new(vset([1]), vset([2, 3]))).is_err());
    }

    #[test]
    fn trace_serializes_as_array() {
        let g = MultiGraph::from_edges(3, &[(1, 2), (2, 3)]);
        let r = op2_contract_degree2(&g, Vertex(2)).unwrap();
        let trace = ReductionTrace {
            steps: vec![r.step],
        };
        let json = serde_json::to_value(&trace).unwrap();
        assert!(json.is_array());
        assert_eq!(json[0]["kind"], "Op2");
        let back: ReductionTrace = serde_json::from_value(json).unwrap();
        assert_eq!(back, trace);
        assert_eq!(trace.replay(&g).unwrap(), r.graph);
    }
}
