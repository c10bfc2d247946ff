//! Instance generators: trees, cycles, grids, boundary models, torus actions.

use crate::action::{Action, CayleyAction, GraphAction};
use crate::boundary::BoundaryModel;
use crate::free::{reduced_words_of_length, FreeWord};
use crate::graph::MetricGraph;

/// Ball of radius `depth` in the Cayley graph of the rank-2 free group with
/// basepoint `e`. Vertex ids are the reduced words, `e` for the identity.
/// `1 + sum 4*3^(k-1)` vertices.
pub fn f2_tree(depth: usize) -> MetricGraph {
    let mut edges = Vec::new();
    let mut frontier = vec![FreeWord::identity()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for w in &frontier {
            for ext in w.extensions(2) {
                edges.push((w.to_string(), ext.to_string(), 1));
                next.push(ext);
            }
        }
        frontier = next;
    }
    MetricGraph::new(&edges, "e").expect("tree is connected")
}

/// Cycle on `n` vertices `v0..v{n-1}`, basepoint `v0`.
pub fn cycle(n: usize) -> MetricGraph {
    assert!(n >= 3);
    let edges: Vec<(String, String, u64)> = (0..n)
        .map(|i| (format!("v{i}"), format!("v{}", (i + 1) % n), 1))
        .collect();
    MetricGraph::new(&edges, "v0").expect("cycle is connected")
}

/// Square grid `side x side`, basepoint at a corner. Ids are zero padded so
/// that id order matches row-major order.
pub fn grid(side: usize) -> MetricGraph {
    assert!(side >= 1 && side <= 100);
    let name = |r: usize, c: usize| format!("g{r:02}x{c:02}");
    let mut edges = Vec::new();
    for r in 0..side {
        for c in 0..side {
            if r + 1 < side {
                edges.push((name(r, c), name(r + 1, c), 1));
            }
            if c + 1 < side {
                edges.push((name(r, c), name(r, c + 1), 1));
            }
        }
    }
    MetricGraph::new(&edges, &name(0, 0)).expect("grid is connected")
}

/// Truncated boundary model of the rank-2 free group.
pub fn f2_boundary(depth: usize, buffer: usize) -> BoundaryModel {
    BoundaryModel::new_f2(depth, buffer).expect("valid parameters")
}

/// The standard action of the free group on its own boundary, generators
/// `a` and `b` acting by left multiplication.
pub fn f2_boundary_action() -> Action {
    Action::Boundary(crate::action::BoundaryAction::standard_f2())
}

/// The free group acting on (the vertex set of) its own Cayley tree by left
/// multiplication; vertices are words, distances are word distances.
pub fn f2_cayley_action() -> Action {
    Action::Cayley(CayleyAction::rank2())
}

/// Discrete torus `side x side` with the two unit translations as generators.
/// With `side` well above twice the enumerated word length this window is
/// indistinguishable from the plane translation action.
pub fn z2_torus_action(side: usize) -> (MetricGraph, Action) {
    let (graph, perms) = z2_torus_parts(side);
    let action = GraphAction::new(&graph, perms).expect("translations are isometries");
    (graph, Action::Graph(action))
}

/// The torus graph together with the raw translation permutations, for
/// writing instance files.
pub fn z2_torus_parts(side: usize) -> (MetricGraph, Vec<(String, Vec<usize>)>) {
    assert!(side >= 3);
    let name = |r: usize, c: usize| format!("t{r:03}x{c:03}");
    let mut edges = Vec::new();
    for r in 0..side {
        for c in 0..side {
            edges.push((name(r, c), name((r + 1) % side, c), 1));
            edges.push((name(r, c), name(r, (c + 1) % side), 1));
        }
    }
    let graph = MetricGraph::new(&edges, &name(0, 0)).expect("torus is connected");
    let perm_of = |dr: usize, dc: usize| -> Vec<usize> {
        let mut p = vec![0; graph.vertex_count()];
        for r in 0..side {
            for c in 0..side {
                let from = graph.id(&name(r, c)).unwrap();
                let to = graph
                    .id(&name((r + dr) % side, (c + dc) % side))
                    .unwrap();
                p[from] = to;
            }
        }
        p
    };
    let perms = vec![
        ("x".to_string(), perm_of(0, 1)),
        ("y".to_string(), perm_of(1, 0)),
    ];
    (graph, perms)
}

/// All reduced words of length exactly `depth`; the visible points of the
/// boundary model in lexicographic order.
pub fn f2_classes(depth: usize) -> Vec<FreeWord> {
    reduced_words_of_length(2, depth)
}
