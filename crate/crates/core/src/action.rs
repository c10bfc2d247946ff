//! Group actions and finiteness probes.
//!
//! Three kinds of action cover the instance zoo:
//!   * `GraphAction`: named vertex permutations of a `MetricGraph` that
//!     preserve the metric exactly (checked at build).
//!   * `BoundaryAction`: generators act on the boundary model by left
//!     multiplication followed by free reduction.
//!   * `CayleyAction`: left multiplication on the vertex set of the free
//!     group's own tree; points are reduced words and the metric is the word
//!     metric, so every element acts as a genuine isometry of the whole
//!     (infinite) space even though probes only ever touch finitely many
//!     points.
//!
//! "Finitely many" claims about the group become stabilization probes: the
//! count `c(l)` of elements of word length at most `l` satisfying a condition
//! is reported for `l = 1..L` together with whether the tail of the sequence
//! has stopped growing.

use crate::error::{Error, Result};
use crate::free::{FreeWord, Letter};
use crate::graph::MetricGraph;
use crate::rat::Rat;
use std::collections::HashMap;

/// A named symmetric generating set acting by vertex permutations.
#[derive(Clone)]
pub struct GraphAction {
    graph: MetricGraph,
    names: Vec<String>,
    /// Permutation per letter (generator at `2i`, inverse at `2i+1`).
    perms: Vec<Vec<usize>>,
}

impl GraphAction {
    /// Builds from generator permutations given in vertex-index order.
    /// Each must be a bijection preserving all pairwise distances.
    pub fn new(graph: &MetricGraph, gens: Vec<(String, Vec<usize>)>) -> Result<Self> {
        let n = graph.vertex_count();
        let mut names = Vec::new();
        let mut perms = Vec::new();
        for (name, p) in gens {
            if p.len() != n {
                return Err(Error::Precondition(format!(
                    "permutation for `{name}` has length {} but the graph has {n} vertices",
                    p.len()
                )));
            }
            let mut seen = vec![false; n];
            for &img in &p {
                if img >= n || seen[img] {
                    return Err(Error::Precondition(format!(
                        "map for `{name}` is not a bijection"
                    )));
                }
                seen[img] = true;
            }
            for u in 0..n {
                for v in 0..n {
                    if graph.distance(p[u], p[v]) != graph.distance(u, v) {
                        return Err(Error::Precondition(format!(
                            "generator `{name}` does not preserve distances"
                        )));
                    }
                }
            }
            let mut inv = vec![0usize; n];
            for (u, &img) in p.iter().enumerate() {
                inv[img] = u;
            }
            names.push(name);
            perms.push(p);
            perms.push(inv);
        }
        Ok(GraphAction {
            graph: graph.clone(),
            names,
            perms,
        })
    }

    pub fn graph(&self) -> &MetricGraph {
        &self.graph
    }

    pub fn generator_count(&self) -> usize {
        self.names.len()
    }

    pub fn perm_of_letter(&self, l: Letter) -> &[usize] {
        &self.perms[l as usize]
    }

    /// Composes the permutation of a word (leftmost letter applied last).
    pub fn perm_of_word(&self, w: &FreeWord) -> Vec<usize> {
        let n = self.graph.vertex_count();
        let mut p: Vec<usize> = (0..n).collect();
        for &l in w.letters().iter().rev() {
            let q = &self.perms[l as usize];
            for slot in p.iter_mut() {
                *slot = q[*slot];
            }
        }
        p
    }
}

/// Generators acting on the boundary by left multiplication.
#[derive(Clone)]
pub struct BoundaryAction {
    names: Vec<String>,
    /// Free-group element per letter.
    words: Vec<FreeWord>,
}

impl BoundaryAction {
    pub fn new(gens: Vec<(String, FreeWord)>) -> Self {
        let mut names = Vec::new();
        let mut words = Vec::new();
        for (name, w) in gens {
            names.push(name);
            words.push(w.clone());
            words.push(w.inverse());
        }
        BoundaryAction { names, words }
    }

    /// `a` and `b` acting as themselves.
    pub fn standard_f2() -> Self {
        BoundaryAction::new(vec![
            ("a".to_string(), FreeWord::parse_f2("a").unwrap()),
            ("b".to_string(), FreeWord::parse_f2("b").unwrap()),
        ])
    }

    pub fn generator_count(&self) -> usize {
        self.names.len()
    }

    /// The free-group element induced by a word over the action's letters.
    pub fn element_of_word(&self, w: &FreeWord) -> FreeWord {
        let mut out = FreeWord::identity();
        for &l in w.letters() {
            out = out.mul(&self.words[l as usize]);
        }
        out
    }
}

/// Left multiplication on the free group's own vertex set.
#[derive(Clone)]
pub struct CayleyAction {
    inner: BoundaryAction,
}

impl CayleyAction {
    pub fn rank2() -> Self {
        CayleyAction {
            inner: BoundaryAction::standard_f2(),
        }
    }

    pub fn from_gens(gens: Vec<(String, FreeWord)>) -> Self {
        CayleyAction {
            inner: BoundaryAction::new(gens),
        }
    }

    pub fn element_of_word(&self, w: &FreeWord) -> FreeWord {
        self.inner.element_of_word(w)
    }

    pub fn apply(&self, element: &FreeWord, p: &FreeWord) -> FreeWord {
        element.mul(p)
    }

    /// Word metric on the free group.
    pub fn dist(&self, p: &FreeWord, q: &FreeWord) -> u64 {
        p.inverse().mul(q).len() as u64
    }
}

#[derive(Clone)]
pub enum Action {
    Graph(GraphAction),
    Boundary(BoundaryAction),
    Cayley(CayleyAction),
}

impl Action {
    pub fn generator_count(&self) -> usize {
        match self {
            Action::Graph(a) => a.generator_count(),
            Action::Boundary(a) => a.generator_count(),
            Action::Cayley(a) => a.inner.generator_count(),
        }
    }

    pub fn as_boundary(&self) -> Option<&BoundaryAction> {
        match self {
            Action::Boundary(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_graph(&self) -> Option<&GraphAction> {
        match self {
            Action::Graph(a) => Some(a),
            _ => None,
        }
    }
}

/// What a word actually does, used to deduplicate words into elements.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Footprint {
    Perm(Vec<usize>),
    Word(FreeWord),
}

/// One group element from the enumerated window.
#[derive(Clone, Debug)]
pub struct Element {
    /// Shortest representative over the action's generator letters.
    pub word: FreeWord,
    pub footprint: Footprint,
}

impl Element {
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }
}

/// All distinct induced maps of word length at most the bound, grouped by
/// the length of their shortest representative.
#[derive(Clone)]
pub struct Elements {
    /// `groups[l]` holds the elements whose shortest word has length `l`.
    pub groups: Vec<Vec<Element>>,
}

impl Elements {
    pub fn max_len(&self) -> usize {
        self.groups.len() - 1
    }

    pub fn iter(&self) -> impl Iterator<Item = &Element> {
        self.groups.iter().flatten()
    }

    pub fn iter_up_to(&self, l: usize) -> impl Iterator<Item = &Element> {
        self.groups.iter().take(l + 1).flatten()
    }

    /// Cumulative element count by word length, `counts[l] = |{h : |h| <= l}|`.
    pub fn cumulative_counts(&self) -> Vec<u64> {
        let mut total = 0;
        self.groups
            .iter()
            .map(|g| {
                total += g.len() as u64;
                total
            })
            .collect()
    }
}

/// Enumerates elements up to word length `max_len`, one representative per
/// distinct induced map. Free reduction is applied while walking; any further
/// relations (a torus action's commutativity, say) are caught by the
/// footprint table.
pub fn enumerate_elements(action: &Action, max_len: usize) -> Elements {
    let footprint_of = |w: &FreeWord| -> Footprint {
        match action {
            Action::Graph(a) => Footprint::Perm(a.perm_of_word(w)),
            Action::Boundary(a) => Footprint::Word(a.element_of_word(w)),
            Action::Cayley(a) => Footprint::Word(a.element_of_word(w)),
        }
    };
    let n_letters = 2 * action.generator_count();
    let mut seen: HashMap<Footprint, ()> = HashMap::new();
    let mut groups: Vec<Vec<Element>> = vec![Vec::new()];
    let id = FreeWord::identity();
    seen.insert(footprint_of(&id), ());
    groups[0].push(Element {
        word: id,
        footprint: footprint_of(&FreeWord::identity()),
    });
    let mut frontier: Vec<FreeWord> = vec![FreeWord::identity()];
    for _len in 1..=max_len {
        let mut next_frontier = Vec::new();
        let mut group = Vec::new();
        for w in &frontier {
            for l in 0..n_letters as Letter {
                let ext = w.push(l);
                if ext.len() != w.len() + 1 {
                    continue; // cancelled, already seen at a shorter length
                }
                let fp = footprint_of(&ext);
                if seen.contains_key(&fp) {
                    continue;
                }
                seen.insert(fp.clone(), ());
                group.push(Element {
                    word: ext.clone(),
                    footprint: fp,
                });
                next_frontier.push(ext);
            }
        }
        groups.push(group);
        frontier = next_frontier;
    }
    Elements { groups }
}

/// Counts-per-length record of a "only finitely many elements" clause.
#[derive(Clone, Debug)]
pub struct FinitenessProbe {
    pub condition: String,
    /// `counts[l]` is the number of elements of word length at most `l`
    /// satisfying the condition, `l = 0..=L`.
    pub counts: Vec<u64>,
    pub tail_window: usize,
    pub stabilized: bool,
}

impl FinitenessProbe {
    pub fn from_condition<F: FnMut(&Element) -> bool>(
        condition: String,
        elements: &Elements,
        tail_window: usize,
        mut pred: F,
    ) -> FinitenessProbe {
        let mut counts = Vec::with_capacity(elements.groups.len());
        let mut total = 0u64;
        for group in &elements.groups {
            for e in group {
                if pred(e) {
                    total += 1;
                }
            }
            counts.push(total);
        }
        let stabilized = is_stabilized(&counts, tail_window);
        FinitenessProbe {
            condition,
            counts,
            tail_window,
            stabilized,
        }
    }

    pub fn final_count(&self) -> u64 {
        *self.counts.last().unwrap_or(&0)
    }
}

/// The last `window` values are present and equal.
pub fn is_stabilized(counts: &[u64], window: usize) -> bool {
    if counts.len() < window || window == 0 {
        return false;
    }
    let tail = &counts[counts.len() - window..];
    tail.iter().all(|&c| c == tail[0])
}

/// A space on which enumerated elements act by isometries, at whatever
/// point granularity the probe needs.
pub trait IsomSpace {
    type Pt: Clone;
    fn apply(&self, e: &Element, p: &Self::Pt) -> Self::Pt;
    fn dist(&self, p: &Self::Pt, q: &Self::Pt) -> u64;
}

impl IsomSpace for GraphAction {
    type Pt = usize;
    fn apply(&self, e: &Element, p: &usize) -> usize {
        match &e.footprint {
            Footprint::Perm(perm) => perm[*p],
            Footprint::Word(_) => unreachable!("graph actions have permutation footprints"),
        }
    }
    fn dist(&self, p: &usize, q: &usize) -> u64 {
        self.graph().distance(*p, *q)
    }
}

impl IsomSpace for CayleyAction {
    type Pt = FreeWord;
    fn apply(&self, e: &Element, p: &FreeWord) -> FreeWord {
        match &e.footprint {
            Footprint::Word(g) => g.mul(p),
            Footprint::Perm(_) => unreachable!("cayley actions have word footprints"),
        }
    }
    fn dist(&self, p: &FreeWord, q: &FreeWord) -> u64 {
        p.inverse().mul(q).len() as u64
    }
}

/// Counts elements moving both probe points by at most `eps`.
///
/// Requires `d(x,y) >= r`; the two points must already be far apart for the
/// count to say anything.
pub fn acylindricity_probe<S: IsomSpace>(
    space: &S,
    elements: &Elements,
    eps: Rat,
    r: Rat,
    x: &S::Pt,
    y: &S::Pt,
    tail_window: usize,
) -> Result<FinitenessProbe> {
    let dxy = Rat::from_integer(space.dist(x, y) as i64);
    if dxy < r {
        return Err(Error::Precondition(format!(
            "probe points are {} apart but at least {} is required",
            crate::rat::fmt_rat(dxy),
            crate::rat::fmt_rat(r)
        )));
    }
    Ok(FinitenessProbe::from_condition(
        format!("d(x,hx)<={e} and d(y,hy)<={e}", e = crate::rat::fmt_rat(eps)),
        elements,
        tail_window,
        |h| {
            let dx = Rat::from_integer(space.dist(x, &space.apply(h, x)) as i64);
            let dy = Rat::from_integer(space.dist(y, &space.apply(h, y)) as i64);
            dx <= eps && dy <= eps
        },
    ))
}

/// Counts elements moving both `s` and `g^k s` by at most `eps`.
pub fn wpd_probe<S: IsomSpace>(
    space: &S,
    elements: &Elements,
    g: &Element,
    s: &S::Pt,
    eps: Rat,
    k: u32,
    tail_window: usize,
) -> FinitenessProbe {
    let mut gk = s.clone();
    for _ in 0..k {
        gk = space.apply(g, &gk);
    }
    FinitenessProbe::from_condition(
        format!(
            "d(s,hs)<={e} and d(g^{k}s,hg^{k}s)<={e}",
            e = crate::rat::fmt_rat(eps)
        ),
        elements,
        tail_window,
        |h| {
            let ds = Rat::from_integer(space.dist(s, &space.apply(h, s)) as i64);
            let dk = Rat::from_integer(space.dist(&gk, &space.apply(h, &gk)) as i64);
            ds <= eps && dk <= eps
        },
    )
}

/// Single-basepoint transfer: a stabilized count at `s0` with slack `eps`
/// bounds the count at `s1` with slack `eps - 2 d(s0,s1)`.
#[derive(Clone, Debug)]
pub struct StarTransfer {
    pub eps: Rat,
    pub eps_shifted: Rat,
    pub count_s0: u64,
    pub count_s1: u64,
    pub holds: bool,
}

pub fn wpd_star_transfer<S: IsomSpace>(
    space: &S,
    elements: &Elements,
    g: &Element,
    s0: &S::Pt,
    s1: &S::Pt,
    eps: Rat,
    k: u32,
    tail_window: usize,
) -> Option<StarTransfer> {
    let shift = Rat::from_integer(2 * space.dist(s0, s1) as i64);
    let eps_shifted = eps - shift;
    if eps_shifted < Rat::from_integer(0) {
        return None;
    }
    let p0 = wpd_probe(space, elements, g, s0, eps, k, tail_window);
    let p1 = wpd_probe(space, elements, g, s1, eps_shifted, k, tail_window);
    Some(StarTransfer {
        eps,
        eps_shifted,
        count_s0: p0.final_count(),
        count_s1: p1.final_count(),
        holds: p1.final_count() <= p0.final_count(),
    })
}
