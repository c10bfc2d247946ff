//! Diagonal-separation checks.
//!
//! The condition under test: around two distinct points `x, y` there are
//! basis sets `U, V` such that for any tuple of auxiliary points there are
//! basis sets around them making the set of group elements dragging the
//! auxiliary sets across both `U` and `V` finite. The three shapes differ in
//! how the four crossings are distributed:
//!
//!   * two targets `p, q`:   `gA` meets `U` and `V`, `gB` meets `U` and `V`;
//!   * three targets `p, q, r`: `gA` meets `U`, `gB` meets `V`, `gC` meets both;
//!   * four targets `p, q, r, s`: `gA, gB` meet `U`, `gC, gD` meet `V`.
//!
//! Finiteness becomes a stabilization probe over the enumerated element
//! window. Witness sets are searched shallow to deep; the first depth pair
//! whose violator count stabilizes is returned.

use crate::action::{Element, Elements, FinitenessProbe, Footprint};
use crate::boundary::BoundaryModel;
use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use crate::free::FreeWord;
use crate::graph::MetricGraph;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

/// A space with a graded basis of open sets around each point, on which
/// enumerated elements act.
pub trait SeparationSpace {
    type Point: Clone + PartialEq + std::fmt::Debug;
    type Set: Clone;

    /// Basis set around a point; larger `depth` means smaller set. `None`
    /// when the schedule is exhausted.
    fn basis(&self, p: &Self::Point, depth: usize) -> Option<Self::Set>;
    fn max_depth(&self) -> usize;
    fn translate(&self, e: &Element, s: &Self::Set) -> Self::Set;
    fn intersects(&self, a: &Self::Set, b: &Self::Set) -> bool;
    fn points(&self) -> Vec<Self::Point>;
    fn describe_point(&self, p: &Self::Point) -> String;
}

/// Boundary model with cylinder basis sets.
pub struct BoundarySpace<'a> {
    pub model: &'a BoundaryModel,
}

impl<'a> SeparationSpace for BoundarySpace<'a> {
    type Point = FreeWord;
    type Set = ClopenSet;

    fn basis(&self, p: &FreeWord, depth: usize) -> Option<ClopenSet> {
        if depth == 0 || depth > self.model.depth() {
            return None;
        }
        Some(ClopenSet::cylinder(p.prefix(depth)))
    }

    fn max_depth(&self) -> usize {
        self.model.depth()
    }

    fn translate(&self, e: &Element, s: &ClopenSet) -> ClopenSet {
        match &e.footprint {
            Footprint::Word(g) => s.translate(g),
            Footprint::Perm(_) => unreachable!("boundary spaces act by words"),
        }
    }

    fn intersects(&self, a: &ClopenSet, b: &ClopenSet) -> bool {
        a.intersects(b)
    }

    fn points(&self) -> Vec<FreeWord> {
        self.model.points().to_vec()
    }

    fn describe_point(&self, p: &FreeWord) -> String {
        p.to_string()
    }
}

/// Axis-aligned box on the discrete torus, wrap-aware.
#[derive(Clone, Debug)]
pub struct TorusBox {
    pub center: (usize, usize),
    pub radius: usize,
}

/// Torus window with box basis sets; the action's generators must be
/// translations, so a box image is the box around the image of its center.
pub struct TorusSpace<'a> {
    pub graph: &'a MetricGraph,
    pub side: usize,
}

impl<'a> TorusSpace<'a> {
    fn coords(&self, v: usize) -> (usize, usize) {
        // Vertex names are `t{r:03}x{c:03}`; sorted order is row major, so
        // the index already encodes the coordinates.
        (v / self.side, v % self.side)
    }

    fn vertex(&self, r: usize, c: usize) -> usize {
        (r % self.side) * self.side + (c % self.side)
    }

    fn circ_dist(&self, a: usize, b: usize) -> usize {
        let d = a.abs_diff(b);
        d.min(self.side - d)
    }
}

impl<'a> SeparationSpace for TorusSpace<'a> {
    type Point = usize;
    type Set = TorusBox;

    fn basis(&self, p: &usize, depth: usize) -> Option<TorusBox> {
        if depth == 0 || depth > self.max_depth() {
            return None;
        }
        // Radii shrink geometrically and end at a single point.
        let radius = self.side >> (depth + 2);
        Some(TorusBox {
            center: self.coords(*p),
            radius,
        })
    }

    fn max_depth(&self) -> usize {
        let mut d = 1;
        while (self.side >> (d + 2)) > 0 {
            d += 1;
        }
        d
    }

    fn translate(&self, e: &Element, s: &TorusBox) -> TorusBox {
        match &e.footprint {
            Footprint::Perm(perm) => {
                let v = self.vertex(s.center.0, s.center.1);
                TorusBox {
                    center: self.coords(perm[v]),
                    radius: s.radius,
                }
            }
            Footprint::Word(_) => unreachable!("torus spaces act by permutations"),
        }
    }

    fn intersects(&self, a: &TorusBox, b: &TorusBox) -> bool {
        let reach = a.radius + b.radius;
        if 2 * a.radius + 1 >= self.side || 2 * b.radius + 1 >= self.side {
            return true;
        }
        self.circ_dist(a.center.0, b.center.0) <= reach
            && self.circ_dist(a.center.1, b.center.1) <= reach
    }

    fn points(&self) -> Vec<usize> {
        (0..self.side * self.side).collect()
    }

    fn describe_point(&self, p: &usize) -> String {
        let (r, c) = self.coords(*p);
        format!("({r},{c})")
    }
}

/// Which crossing pattern a check used.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConditionKind {
    C1,
    C2,
    C3,
}

impl ConditionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConditionKind::C1 => "c1",
            ConditionKind::C2 => "c2",
            ConditionKind::C3 => "c3",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            ConditionKind::C1 => 2,
            ConditionKind::C2 => 3,
            ConditionKind::C3 => 4,
        }
    }
}

/// Result of one witness search. `found == false` is an explicit failure
/// record: no depth combination in the schedule stabilized.
#[derive(Clone, Debug)]
pub struct ConditionCWitness {
    pub kind: ConditionKind,
    pub uv_depth: usize,
    pub target_depth: usize,
    pub probe: FinitenessProbe,
    pub found: bool,
    pub notes: Vec<String>,
}

fn violator_condition<S: SeparationSpace>(
    space: &S,
    kind: ConditionKind,
    u: &S::Set,
    v: &S::Set,
    targets: &[S::Set],
    h: &Element,
) -> bool {
    let img: Vec<S::Set> = targets.iter().map(|t| space.translate(h, t)).collect();
    match kind {
        ConditionKind::C1 => {
            space.intersects(&img[0], u)
                && space.intersects(&img[0], v)
                && space.intersects(&img[1], u)
                && space.intersects(&img[1], v)
        }
        ConditionKind::C2 => {
            space.intersects(&img[0], u)
                && space.intersects(&img[1], v)
                && space.intersects(&img[2], u)
                && space.intersects(&img[2], v)
        }
        ConditionKind::C3 => {
            space.intersects(&img[0], u)
                && space.intersects(&img[1], u)
                && space.intersects(&img[2], v)
                && space.intersects(&img[3], v)
        }
    }
}

/// Searches the depth schedule for a stabilizing witness for one tuple.
pub fn check_condition<S: SeparationSpace>(
    space: &S,
    elements: &Elements,
    kind: ConditionKind,
    x: &S::Point,
    y: &S::Point,
    targets: &[S::Point],
    tail_window: usize,
) -> Result<ConditionCWitness> {
    if x == y {
        return Err(Error::Precondition("x and y must be distinct".into()));
    }
    if targets.len() != kind.arity() {
        return Err(Error::Precondition(format!(
            "{} expects {} target points",
            kind.as_str(),
            kind.arity()
        )));
    }
    for i in 0..targets.len() {
        for j in (i + 1)..targets.len() {
            if targets[i] == targets[j] {
                return Err(Error::Precondition(
                    "target points must be pairwise distinct".into(),
                ));
            }
        }
    }
    let maxd = space.max_depth();
    let mut notes = Vec::new();
    for uv_depth in 1..=maxd {
        let (u, v) = match (space.basis(x, uv_depth), space.basis(y, uv_depth)) {
            (Some(u), Some(v)) => (u, v),
            _ => continue,
        };
        if space.intersects(&u, &v) {
            continue;
        }
        'target: for target_depth in 1..=maxd {
            let sets: Vec<S::Set> = match targets
                .iter()
                .map(|t| space.basis(t, target_depth))
                .collect::<Option<Vec<_>>>()
            {
                Some(s) => s,
                None => continue,
            };
            for i in 0..sets.len() {
                for j in (i + 1)..sets.len() {
                    if space.intersects(&sets[i], &sets[j]) {
                        continue 'target;
                    }
                }
            }
            let probe = FinitenessProbe::from_condition(
                format!(
                    "{}-violators at uv depth {uv_depth}, target depth {target_depth}",
                    kind.as_str()
                ),
                elements,
                tail_window,
                |h| violator_condition(space, kind, &u, &v, &sets, h),
            );
            if probe.stabilized {
                return Ok(ConditionCWitness {
                    kind,
                    uv_depth,
                    target_depth,
                    probe,
                    found: true,
                    notes,
                });
            }
            notes.push(format!(
                "depth ({uv_depth},{target_depth}) count {} not stabilized",
                probe.final_count()
            ));
        }
    }
    // No witness in the schedule: report the failure explicitly with the
    // deepest probe rerun for the record.
    let u = space.basis(x, maxd);
    let v = space.basis(y, maxd);
    let probe = match (u, v) {
        (Some(u), Some(v)) => {
            let sets: Vec<S::Set> = targets
                .iter()
                .filter_map(|t| space.basis(t, maxd))
                .collect();
            if sets.len() == targets.len() {
                FinitenessProbe::from_condition(
                    format!("{}-violators at the deepest schedule entry", kind.as_str()),
                    elements,
                    tail_window,
                    |h| violator_condition(space, kind, &u, &v, &sets, h),
                )
            } else {
                FinitenessProbe {
                    condition: "schedule exhausted".into(),
                    counts: Vec::new(),
                    tail_window,
                    stabilized: false,
                }
            }
        }
        _ => FinitenessProbe {
            condition: "schedule exhausted".into(),
            counts: Vec::new(),
            tail_window,
            stabilized: false,
        },
    };
    Ok(ConditionCWitness {
        kind,
        uv_depth: maxd,
        target_depth: maxd,
        probe,
        found: false,
        notes,
    })
}

pub fn check_c1<S: SeparationSpace>(
    space: &S,
    elements: &Elements,
    x: &S::Point,
    y: &S::Point,
    p: &S::Point,
    q: &S::Point,
    tail_window: usize,
) -> Result<ConditionCWitness> {
    check_condition(
        space,
        elements,
        ConditionKind::C1,
        x,
        y,
        &[p.clone(), q.clone()],
        tail_window,
    )
}

pub fn check_c2<S: SeparationSpace>(
    space: &S,
    elements: &Elements,
    x: &S::Point,
    y: &S::Point,
    p: &S::Point,
    q: &S::Point,
    r: &S::Point,
    tail_window: usize,
) -> Result<ConditionCWitness> {
    check_condition(
        space,
        elements,
        ConditionKind::C2,
        x,
        y,
        &[p.clone(), q.clone(), r.clone()],
        tail_window,
    )
}

#[allow(clippy::too_many_arguments)]
pub fn check_c3<S: SeparationSpace>(
    space: &S,
    elements: &Elements,
    x: &S::Point,
    y: &S::Point,
    p: &S::Point,
    q: &S::Point,
    r: &S::Point,
    s: &S::Point,
    tail_window: usize,
) -> Result<ConditionCWitness> {
    check_condition(
        space,
        elements,
        ConditionKind::C3,
        x,
        y,
        &[p.clone(), q.clone(), r.clone(), s.clone()],
        tail_window,
    )
}

/// Outcome for one sampled tuple under the final shared witness pair.
#[derive(Clone, Debug)]
pub struct TupleOutcome {
    pub kind: ConditionKind,
    pub targets: Vec<String>,
    pub target_depth: usize,
    pub stabilized: bool,
    pub final_count: u64,
    pub counts: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct ConditionSummary {
    pub x: String,
    pub y: String,
    /// Depth of the single `U, V` pair serving every sampled tuple.
    pub uv_depth: usize,
    pub outcomes: Vec<TupleOutcome>,
    pub all_pass: bool,
    pub tuples_requested: usize,
    pub budget_exhausted: bool,
}

/// Samples target tuples for all three shapes and finds one `U, V` pair that
/// serves them all: the smallest depth at which every sampled tuple admits a
/// stabilizing target witness.
pub fn check_condition_c<S: SeparationSpace>(
    space: &S,
    elements: &Elements,
    x: &S::Point,
    y: &S::Point,
    tuple_budget: usize,
    seed: u64,
    tail_window: usize,
) -> Result<ConditionSummary> {
    if x == y {
        return Err(Error::Precondition("x and y must be distinct".into()));
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let universe = space.points();
    if universe.len() < 4 {
        return Err(Error::Precondition("need at least 4 points".into()));
    }
    let mut tuples: Vec<(ConditionKind, Vec<S::Point>)> = Vec::new();
    let kinds = [ConditionKind::C1, ConditionKind::C2, ConditionKind::C3];
    let mut attempts = 0usize;
    while tuples.len() < tuple_budget && attempts < tuple_budget * 50 {
        attempts += 1;
        let kind = kinds[rng.gen_range(0..3)];
        let mut pick: Vec<S::Point> = Vec::new();
        let mut guard = 0;
        while pick.len() < kind.arity() && guard < 200 {
            guard += 1;
            let cand = universe.choose(&mut rng).unwrap().clone();
            if !pick.contains(&cand) {
                pick.push(cand);
            }
        }
        if pick.len() == kind.arity() {
            tuples.push((kind, pick));
        }
    }
    let budget_exhausted = tuples.len() < tuple_budget;

    let maxd = space.max_depth();
    let mut chosen_depth = None;
    let mut outcomes = Vec::new();
    'depth: for uv_depth in 1..=maxd {
        let (u, v) = match (space.basis(x, uv_depth), space.basis(y, uv_depth)) {
            (Some(u), Some(v)) => (u, v),
            _ => continue,
        };
        if space.intersects(&u, &v) {
            continue;
        }
        let mut trial_outcomes = Vec::with_capacity(tuples.len());
        for (kind, targets) in &tuples {
            let mut served = None;
            'target: for target_depth in 1..=maxd {
                let sets: Vec<S::Set> = match targets
                    .iter()
                    .map(|t| space.basis(t, target_depth))
                    .collect::<Option<Vec<_>>>()
                {
                    Some(s) => s,
                    None => continue,
                };
                for i in 0..sets.len() {
                    for j in (i + 1)..sets.len() {
                        if space.intersects(&sets[i], &sets[j]) {
                            continue 'target;
                        }
                    }
                }
                let probe = FinitenessProbe::from_condition(
                    format!("{}-violators", kind.as_str()),
                    elements,
                    tail_window,
                    |h| violator_condition(space, *kind, &u, &v, &sets, h),
                );
                if probe.stabilized {
                    served = Some(TupleOutcome {
                        kind: *kind,
                        targets: targets.iter().map(|t| space.describe_point(t)).collect(),
                        target_depth,
                        stabilized: true,
                        final_count: probe.final_count(),
                        counts: probe.counts.clone(),
                    });
                    break;
                }
            }
            match served {
                Some(o) => trial_outcomes.push(o),
                None => continue 'depth,
            }
        }
        chosen_depth = Some(uv_depth);
        outcomes = trial_outcomes;
        break;
    }
    let (uv_depth, all_pass) = match chosen_depth {
        Some(d) => (d, true),
        None => (maxd, false),
    };
    Ok(ConditionSummary {
        x: space.describe_point(x),
        y: space.describe_point(y),
        uv_depth,
        outcomes,
        all_pass,
        tuples_requested: tuple_budget,
        budget_exhausted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::enumerate_elements;
    use crate::gen;

    fn w(s: &str) -> FreeWord {
        FreeWord::parse_f2(s).unwrap()
    }

    #[test]
    fn c1_on_the_free_boundary_finds_a_witness() {
        let model = gen::f2_boundary(4, 10);
        let action = gen::f2_boundary_action();
        let elements = enumerate_elements(&action, 6);
        let space = BoundarySpace { model: &model };
        let x = model.point_from_word(&w("a")).unwrap();
        let y = model.point_from_word(&w("A")).unwrap();
        let p = model.point_from_word(&w("b")).unwrap();
        let q = model.point_from_word(&w("B")).unwrap();
        let wit = check_c1(&space, &elements, &x, &y, &p, &q, 3).unwrap();
        assert!(wit.found, "notes: {:?}", wit.notes);
        assert!(wit.probe.stabilized);
        // Counts are monotone.
        for pair in wit.probe.counts.windows(2) {
            assert!(pair[0] <= pair[1]);
        }
    }

    #[test]
    fn c2_and_c3_find_witnesses_on_the_axis() {
        let model = gen::f2_boundary(4, 10);
        let action = gen::f2_boundary_action();
        let elements = enumerate_elements(&action, 6);
        let space = BoundarySpace { model: &model };
        let pt = |s: &str| model.point_from_word(&w(s)).unwrap();
        let (x, y) = (pt("a"), pt("A"));
        let c2 = check_c2(&space, &elements, &x, &y, &pt("b"), &pt("B"), &pt("ab"), 3).unwrap();
        assert!(c2.found, "notes: {:?}", c2.notes);
        let c3 = check_c3(
            &space, &elements, &x, &y, &pt("b"), &pt("B"), &pt("ba"), &pt("Ba"), 3,
        )
        .unwrap();
        assert!(c3.found, "notes: {:?}", c3.notes);

        // Stress case: the first two targets crowd x, the last two crowd y.
        let c3_diag = check_c3(
            &space,
            &elements,
            &x,
            &y,
            &pt("aab"),
            &pt("aaB"),
            &pt("AAb"),
            &pt("AAB"),
            3,
        )
        .unwrap();
        assert!(c3_diag.found, "notes: {:?}", c3_diag.notes);

        // Orbit targets: powers of the element applied to another end.
        let a = w("a");
        let orbit = |k: i64| {
            model
                .point_from_word(&a.pow(k).mul(&model.representative(&pt("b"))))
                .unwrap()
        };
        let c3_orbit = check_c3(
            &space,
            &elements,
            &x,
            &y,
            &orbit(1),
            &orbit(2),
            &pt("B"),
            &pt("bA"),
            3,
        )
        .unwrap();
        assert!(c3_orbit.found, "notes: {:?}", c3_orbit.notes);
    }

    #[test]
    fn degenerate_tuples_are_rejected() {
        let model = gen::f2_boundary(3, 8);
        let action = gen::f2_boundary_action();
        let elements = enumerate_elements(&action, 2);
        let space = BoundarySpace { model: &model };
        let x = model.point_from_word(&w("a")).unwrap();
        let p = model.point_from_word(&w("b")).unwrap();
        assert!(check_c1(&space, &elements, &x, &x, &p, &p, 3).is_err());
        let y = model.point_from_word(&w("A")).unwrap();
        assert!(check_c1(&space, &elements, &x, &y, &p, &p, 3).is_err());
    }

    #[test]
    fn trivial_group_has_at_most_one_violator() {
        let model = gen::f2_boundary(3, 8);
        let action = crate::action::Action::Boundary(crate::action::BoundaryAction::new(vec![]));
        let elements = enumerate_elements(&action, 4);
        let space = BoundarySpace { model: &model };
        let x = model.point_from_word(&w("a")).unwrap();
        let y = model.point_from_word(&w("A")).unwrap();
        let p = model.point_from_word(&w("b")).unwrap();
        let q = model.point_from_word(&w("B")).unwrap();
        let wit = check_c1(&space, &elements, &x, &y, &p, &q, 3).unwrap();
        assert!(wit.found);
        assert!(wit.probe.final_count() <= 1);
    }

    #[test]
    fn shrinking_targets_cannot_increase_counts() {
        let model = gen::f2_boundary(4, 10);
        let action = gen::f2_boundary_action();
        let elements = enumerate_elements(&action, 5);
        let space = BoundarySpace { model: &model };
        let x = model.point_from_word(&w("a")).unwrap();
        let y = model.point_from_word(&w("A")).unwrap();
        let p = model.point_from_word(&w("b")).unwrap();
        let q = model.point_from_word(&w("B")).unwrap();
        let mut prev: Option<u64> = None;
        for depth in 1..=3 {
            let u = space.basis(&x, 2).unwrap();
            let v = space.basis(&y, 2).unwrap();
            let a = space.basis(&p, depth).unwrap();
            let b = space.basis(&q, depth).unwrap();
            let probe = FinitenessProbe::from_condition(
                "shrink".into(),
                &elements,
                3,
                |h| violator_condition(&space, ConditionKind::C1, &u, &v, &[a.clone(), b.clone()], h),
            );
            if let Some(p0) = prev {
                assert!(probe.final_count() <= p0);
            }
            prev = Some(probe.final_count());
        }
    }

    #[test]
    fn torus_space_intersections_wrap() {
        let (graph, _action) = gen::z2_torus_action(16);
        let space = TorusSpace {
            graph: &graph,
            side: 16,
        };
        let a = TorusBox {
            center: (0, 1),
            radius: 2,
        };
        let b = TorusBox {
            center: (15, 15),
            radius: 1,
        };
        assert!(space.intersects(&a, &b)); // wraps across both axes
        let c = TorusBox {
            center: (8, 8),
            radius: 1,
        };
        assert!(!space.intersects(&a, &c));
    }
}
