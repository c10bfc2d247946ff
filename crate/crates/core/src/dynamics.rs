//! Fixed points, north-south behaviour and element classification on the
//! boundary model, plus the triple-space proper-discontinuity probe.
//!
//! Everything set-valued here is exact: images of cylinders are computed by
//! the clopen algebra, so "g^n maps the complement of U into V" is a genuine
//! set inclusion, not a pointwise sample.

use crate::action::{enumerate_elements, Action, Elements, FinitenessProbe, Footprint};
use crate::boundary::BoundaryModel;
use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use crate::free::FreeWord;

/// Outcome kinds for `classify_element`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementKind {
    Elliptic,
    Parabolic,
    Loxodromic,
    Unresolved,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub kind: ElementKind,
    /// Order when finite (graph permutations always are; boundary words only
    /// when trivial).
    pub order: Option<u64>,
    pub fixed_points: usize,
}

/// Fixed visible classes of a free-group element: classes whose cylinder
/// meets its own image. For a cylinder the image is again a union of
/// cylinders and the test is exact.
pub fn fixed_classes(model: &BoundaryModel, g: &FreeWord) -> Vec<FreeWord> {
    model
        .points()
        .iter()
        .filter(|c| {
            let cyl = ClopenSet::cylinder((*c).clone());
            cyl.translate(g).intersects(&cyl)
        })
        .cloned()
        .collect()
}

/// Classifies one element of an action.
///
/// Graph permutations have their exact order computed from cycle lengths.
/// A nontrivial free-group element has infinite order; it is loxodromic when
/// the truncated boundary shows exactly two fixed classes and unresolved
/// otherwise (the truncation was too coarse to separate the axis ends).
pub fn classify_element(action: &Action, model: Option<&BoundaryModel>, g: &FreeWord) -> Classification {
    match action {
        Action::Graph(a) => {
            let perm = a.perm_of_word(g);
            let mut order = 1u64;
            let mut seen = vec![false; perm.len()];
            let mut fixed = 0usize;
            for start in 0..perm.len() {
                if seen[start] {
                    continue;
                }
                let mut len = 0u64;
                let mut cur = start;
                loop {
                    seen[cur] = true;
                    len += 1;
                    cur = perm[cur];
                    if cur == start {
                        break;
                    }
                }
                if len == 1 {
                    fixed += 1;
                }
                order = num_integer::lcm(order, len);
            }
            Classification {
                kind: ElementKind::Elliptic,
                order: Some(order),
                fixed_points: fixed,
            }
        }
        Action::Boundary(a) => {
            let elem = a.element_of_word(g);
            if elem.is_empty() {
                return Classification {
                    kind: ElementKind::Elliptic,
                    order: Some(1),
                    fixed_points: model.map_or(0, |m| m.point_count()),
                };
            }
            let model = model.expect("boundary classification needs the model");
            let fixed = fixed_classes(model, &elem).len();
            let kind = match fixed {
                2 => ElementKind::Loxodromic,
                1 => ElementKind::Parabolic,
                _ => ElementKind::Unresolved,
            };
            Classification {
                kind,
                order: None,
                fixed_points: fixed,
            }
        }
        Action::Cayley(a) => {
            let elem = a.element_of_word(g);
            if elem.is_empty() {
                Classification {
                    kind: ElementKind::Elliptic,
                    order: Some(1),
                    fixed_points: 0,
                }
            } else {
                // Left multiplication on the group itself is fixed-point
                // free; classification happens on the boundary model.
                Classification {
                    kind: ElementKind::Unresolved,
                    order: None,
                    fixed_points: 0,
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DynamicsKind {
    None,
    NorthSouth,
}

/// Per cylinder depth: the least `N` with `g^n(M \ U) subset V` for every
/// tested `n >= N`, where `U`, `V` are the depth-`d` cylinders around the
/// repelling and attracting point.
#[derive(Clone, Debug)]
pub struct PushRecord {
    pub depth: usize,
    pub least_n: Option<u32>,
}

#[derive(Clone, Debug)]
pub struct DynamicsCertificate {
    pub element: FreeWord,
    pub fixed_points: Vec<FreeWord>,
    pub kind: DynamicsKind,
    pub attracting: Option<FreeWord>,
    pub repelling: Option<FreeWord>,
    pub pushes: Vec<PushRecord>,
}

/// Least `N` such that `g^n(M \ U) subset V` for all `n` in `[N, n_max]`,
/// by exact set computation.
pub fn least_push_bound(
    g: &FreeWord,
    u: &ClopenSet,
    v: &ClopenSet,
    n_max: u32,
) -> Option<u32> {
    let complement = u.complement();
    let mut last_failure = 0u32;
    for n in 1..=n_max {
        let image = complement.translate(&g.pow(n as i64));
        if !image.is_subset_of(v) {
            last_failure = n;
        }
    }
    // Least N with the inclusion holding on the whole tested tail [N, n_max].
    if last_failure < n_max {
        Some(last_failure + 1)
    } else {
        None
    }
}

/// Detects north-south behaviour of a nontrivial element on the boundary
/// model: exactly two fixed classes, and for each requested cylinder depth a
/// finite push-in bound.
pub fn detect_north_south(
    model: &BoundaryModel,
    action: &crate::action::BoundaryAction,
    g_word: &FreeWord,
    cylinder_depths: &[usize],
    n_max: u32,
) -> Result<DynamicsCertificate> {
    let g = action.element_of_word(g_word);
    if g.is_empty() {
        return Err(Error::Precondition("element is trivial".into()));
    }
    let fixed = fixed_classes(model, &g);
    if fixed.len() == model.point_count() {
        return Err(Error::TriviallyActing);
    }
    if fixed.len() != 2 {
        return Ok(DynamicsCertificate {
            element: g,
            fixed_points: fixed,
            kind: DynamicsKind::None,
            attracting: None,
            repelling: None,
            pushes: Vec::new(),
        });
    }
    // Try both orientations; the attracting point is the one everything is
    // pushed towards.
    for (att_idx, rep_idx) in [(0usize, 1usize), (1, 0)] {
        let attracting = &fixed[att_idx];
        let repelling = &fixed[rep_idx];
        let mut pushes = Vec::new();
        let mut ok = true;
        for &d in cylinder_depths {
            if d > model.depth() {
                return Err(Error::PrefixTooDeep(format!("depth {d}"), model.depth()));
            }
            let u = ClopenSet::cylinder(repelling.prefix(d));
            let v = ClopenSet::cylinder(attracting.prefix(d));
            let least = least_push_bound(&g, &u, &v, n_max);
            if least.is_none() {
                ok = false;
                break;
            }
            pushes.push(PushRecord {
                depth: d,
                least_n: least,
            });
        }
        if ok {
            return Ok(DynamicsCertificate {
                element: g,
                fixed_points: fixed.clone(),
                kind: DynamicsKind::NorthSouth,
                attracting: Some(attracting.clone()),
                repelling: Some(repelling.clone()),
                pushes,
            });
        }
    }
    Ok(DynamicsCertificate {
        element: g,
        fixed_points: fixed,
        kind: DynamicsKind::None,
        attracting: None,
        repelling: None,
        pushes: Vec::new(),
    })
}

/// Proper-discontinuity probe on the space of distinct triples.
///
/// The compact set is played by `K = { triples with pairwise common prefix
/// <= c }`; the probe counts elements `h` with `hK` meeting `K`, where the
/// class image under `h` is read off the canonical buffered representative.
pub fn proper_discontinuity_probe(
    model: &BoundaryModel,
    action: &Action,
    separation: usize,
    max_len: usize,
    tail_window: usize,
) -> Result<FinitenessProbe> {
    if !matches!(action, Action::Boundary(_)) {
        return Err(Error::Precondition(
            "the triple probe runs on boundary actions".into(),
        ));
    }
    let elements = enumerate_elements(action, max_len);
    proper_discontinuity_counts(model, &elements, separation, tail_window)
}

/// Runs the probe against pre-enumerated elements (saves re-enumeration when
/// several probes share a window).
pub fn proper_discontinuity_counts(
    model: &BoundaryModel,
    elements: &Elements,
    separation: usize,
    tail_window: usize,
) -> Result<FinitenessProbe> {
    if separation >= model.depth() {
        return Err(Error::Precondition(format!(
            "separation {separation} must be below the depth {}",
            model.depth()
        )));
    }
    model.check_buffer(elements.max_len())?;
    let points = model.points();
    let n = points.len();
    let words_per_row = (n + 63) / 64;
    let mut adj = vec![0u64; n * words_per_row];
    for u in 0..n {
        for v in 0..n {
            if u != v && points[u].lcp(&points[v]) <= separation {
                adj[u * words_per_row + v / 64] |= 1 << (v % 64);
            }
        }
    }
    Ok(FinitenessProbe::from_condition(
        format!("hK meets K for the {separation}-separated triple set"),
        elements,
        tail_window,
        |h| {
            let g = match &h.footprint {
                Footprint::Word(w) => w,
                _ => unreachable!(),
            };
            let mut image = vec![0usize; n];
            for (u, p) in points.iter().enumerate() {
                let img = g.mul(&model.representative(p));
                image[u] = points
                    .binary_search(&img.prefix(points[0].len()))
                    .expect("truncation is a point");
            }
            let mut q = vec![0u64; n * words_per_row];
            for u in 0..n {
                for v in 0..n {
                    if u == v || image[u] == image[v] {
                        continue;
                    }
                    let a1 = adj[u * words_per_row + v / 64] >> (v % 64) & 1;
                    let (iu, iv) = (image[u], image[v]);
                    if a1 == 1 && adj[iu * words_per_row + iv / 64] >> (iv % 64) & 1 == 1 {
                        q[u * words_per_row + v / 64] |= 1 << (v % 64);
                    }
                }
            }
            for u in 0..n {
                for v in (u + 1)..n {
                    if q[u * words_per_row + v / 64] >> (v % 64) & 1 == 0 {
                        continue;
                    }
                    for w in 0..words_per_row {
                        if q[u * words_per_row + w] & q[v * words_per_row + w] != 0 {
                            return true;
                        }
                    }
                }
            }
            false
        },
    ))
}
