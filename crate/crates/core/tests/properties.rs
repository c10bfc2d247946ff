//! Structural properties on randomized instances: metric axioms, geodesic
//! determinism, tree exactness, probe monotonicity and the conjugation
//! invariance of violator counts.

use hypact_core::action::{acylindricity_probe, enumerate_elements, Action, Footprint};
use hypact_core::clopen::ClopenSet;
use hypact_core::free::FreeWord;
use hypact_core::graph::{MetricGraph, SampleMode};
use hypact_core::rat::{rat, Rat};
use hypact_core::gen;
use proptest::prelude::*;

/// Random connected weighted graph: a spanning path plus extra edges.
fn arb_graph() -> impl Strategy<Value = MetricGraph> {
    (3usize..10, prop::collection::vec((0usize..10, 0usize..10, 1u64..4), 0..12)).prop_map(
        |(n, extra)| {
            let name = |i: usize| format!("n{i:02}");
            let mut edges: Vec<(String, String, u64)> = (1..n)
                .map(|i| (name(i - 1), name(i), 1 + (i as u64 % 2)))
                .collect();
            for (a, b, w) in extra {
                let (a, b) = (a % n, b % n);
                if a != b {
                    edges.push((name(a), name(b), w));
                }
            }
            MetricGraph::new(&edges, &name(0)).unwrap()
        },
    )
}

/// Random tree on up to 12 vertices.
fn arb_tree() -> impl Strategy<Value = MetricGraph> {
    prop::collection::vec(0usize..6, 1..11).prop_map(|parents| {
        let name = |i: usize| format!("t{i:02}");
        let mut edges = Vec::new();
        for (i, p) in parents.iter().enumerate() {
            let child = i + 1;
            let parent = *p % child;
            edges.push((name(parent), name(child), 1));
        }
        MetricGraph::new(&edges, &name(0)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn metric_axioms_and_geodesics(g in arb_graph()) {
        let n = g.vertex_count();
        for x in 0..n {
            prop_assert_eq!(g.distance(x, x), 0);
            for y in 0..n {
                prop_assert_eq!(g.distance(x, y), g.distance(y, x));
                let geo = g.geodesic(x, y);
                prop_assert_eq!(geo.length, g.distance(x, y));
                prop_assert_eq!(g.geodesic(x, y), geo.clone());
                for w in geo.path.windows(2) {
                    prop_assert!(g
                        .neighbors(w[0])
                        .iter()
                        .any(|&(v, wt)| v == w[1]
                            && g.distance(w[0], w[1]) == wt));
                }
                for z in 0..n {
                    prop_assert!(g.distance(x, z) <= g.distance(x, y) + g.distance(y, z));
                    let p = g.gromov_product(x, y, z);
                    prop_assert!(p >= rat(0));
                    prop_assert!(
                        p <= rat(g.distance(x, z).min(g.distance(y, z)) as i64)
                    );
                }
            }
        }
    }

    #[test]
    fn four_point_inequality_with_measured_delta(g in arb_graph()) {
        let delta = g.measure_delta(SampleMode::Exhaustive).delta_4pt;
        let n = g.vertex_count();
        let e = g.basepoint();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let lhs = g.gromov_product(x, y, e);
                    let rhs = g.gromov_product(x, z, e).min(g.gromov_product(y, z, e))
                        - rat(4) * delta;
                    prop_assert!(lhs >= rhs);
                }
            }
        }
    }

    #[test]
    fn trees_are_exact(t in arb_tree()) {
        let report = t.measure_delta(SampleMode::Exhaustive);
        prop_assert_eq!(report.delta_slim, Rat::from_integer(0));
        prop_assert_eq!(report.delta_4pt, Rat::from_integer(0));
        let e = t.basepoint();
        let n = t.vertex_count();
        for u in 0..n {
            for v in 0..n {
                let d_base = t
                    .geodesic(u, v)
                    .path
                    .iter()
                    .map(|&p| t.distance(e, p))
                    .min()
                    .unwrap();
                prop_assert_eq!(t.gromov_product(u, v, e), rat(d_base as i64));
            }
        }
    }

    #[test]
    fn u_k_sets_shrink(k1 in 0i64..4, k2 in 0i64..4) {
        let (lo, hi) = (k1.min(k2), k1.max(k2));
        let g = gen::f2_tree(3);
        for x in [g.id("aaa").unwrap(), g.id("ab").unwrap()] {
            let big = g.u_k_set(x, rat(lo));
            let small = g.u_k_set(x, rat(hi));
            for v in &small {
                prop_assert!(big.contains(v));
            }
        }
    }
}

#[test]
fn probe_counts_are_monotone() {
    let action = gen::f2_cayley_action();
    let cay = match &action {
        Action::Cayley(c) => c.clone(),
        _ => unreachable!(),
    };
    let elems = enumerate_elements(&action, 8);
    let x = FreeWord::identity();
    let y = FreeWord::parse_f2("aaaa").unwrap();
    let probe = acylindricity_probe(&cay, &elems, rat(2), rat(4), &x, &y, 3).unwrap();
    for w in probe.counts.windows(2) {
        assert!(w[0] <= w[1]);
    }
    assert!(probe.stabilized);
    // Independent count: both conditions pin h to a power of a with
    // |h| <= 2, so exactly e, a, a^-1, a^2, a^-2 qualify.
    let mut oracle = 0u64;
    for e in elems.iter() {
        let h = match &e.footprint {
            Footprint::Word(w) => w.clone(),
            _ => unreachable!(),
        };
        let y_w = FreeWord::parse_f2("aaaa").unwrap();
        if h.len() <= 2 && y_w.inverse().mul(&h).mul(&y_w).len() <= 2 {
            oracle += 1;
        }
    }
    assert_eq!(probe.final_count(), oracle);
    assert_eq!(probe.final_count(), 5);
}

#[test]
fn z2_acylindricity_count_is_small_and_stable() {
    let (_, action) = gen::z2_torus_action(19);
    let graph_action = match &action {
        Action::Graph(a) => a.clone(),
        _ => unreachable!(),
    };
    let elems = enumerate_elements(&action, 8);
    let g = graph_action.graph();
    let x = g.id("t000x000").unwrap();
    let y = g.id("t000x009").unwrap();
    let probe = acylindricity_probe(&graph_action, &elems, rat(1), rat(9), &x, &y, 3).unwrap();
    // Translations displacing every point by at most 1: identity and the
    // four unit steps.
    assert_eq!(probe.final_count(), 5);
    assert!(probe.stabilized);
}

/// Conjugation invariance: translating every set by `h` and conjugating the
/// enumeration window leaves violator counts unchanged.
#[test]
fn violator_counts_are_conjugation_invariant() {
    let action = gen::f2_boundary_action();
    let len = 3usize;
    for h_str in ["a", "b", "ab", "Ba"] {
        let h = FreeWord::parse_f2(h_str).unwrap();
        let wide = enumerate_elements(&action, len + 2 * h.len());
        let cyl = |s: &str| ClopenSet::cylinder(FreeWord::parse_f2(s).unwrap());
        let (u, v, a, b) = (cyl("aa"), cyl("AA"), cyl("bb"), cyl("BB"));
        let cond = |g: &FreeWord, u: &ClopenSet, v: &ClopenSet, a: &ClopenSet, b: &ClopenSet| {
            let ga = a.translate(g);
            let gb = b.translate(g);
            ga.intersects(u) && ga.intersects(v) && gb.intersects(u) && gb.intersects(v)
        };
        let mut plain = 0u64;
        let mut conjugated = 0u64;
        let (hu, hv, ha, hb) = (
            u.translate(&h),
            v.translate(&h),
            a.translate(&h),
            b.translate(&h),
        );
        let hinv = h.inverse();
        for e in wide.iter() {
            let g = match &e.footprint {
                Footprint::Word(w) => w.clone(),
                _ => unreachable!(),
            };
            if g.len() <= len && cond(&g, &u, &v, &a, &b) {
                plain += 1;
            }
            if hinv.mul(&g).mul(&h).len() <= len && cond(&g, &hu, &hv, &ha, &hb) {
                conjugated += 1;
            }
        }
        assert_eq!(plain, conjugated, "h = {h_str}");
    }
}

/// Swapping the roles of the two centers together with the targets leaves
/// counts unchanged for a symmetric condition.
#[test]
fn violator_counts_are_swap_symmetric() {
    let action = gen::f2_boundary_action();
    let elements = enumerate_elements(&action, 4);
    let cyl = |s: &str| ClopenSet::cylinder(FreeWord::parse_f2(s).unwrap());
    let (u, v, a, b) = (cyl("a"), cyl("A"), cyl("b"), cyl("B"));
    let count = |u: &ClopenSet, v: &ClopenSet, a: &ClopenSet, b: &ClopenSet| -> u64 {
        elements
            .iter()
            .filter(|e| {
                let g = match &e.footprint {
                    Footprint::Word(w) => w,
                    _ => unreachable!(),
                };
                let ga = a.translate(g);
                let gb = b.translate(g);
                ga.intersects(u) && ga.intersects(v) && gb.intersects(u) && gb.intersects(v)
            })
            .count() as u64
    };
    assert_eq!(count(&u, &v, &a, &b), count(&v, &u, &b, &a));
}
