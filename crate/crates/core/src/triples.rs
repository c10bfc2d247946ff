//! The space of distinct triples, its crossratio quasimetric, the unit-edge
//! graph built from it, and the loxodromic / displacement certificates.
//!
//! Vertices are ordered triples of pairwise distinct visible points. For
//! triples `x`, `y` the quasimetric is
//! `rho(x,y) = max (x_i,x_j | y_k,y_l)` over the unordered coordinate pairs,
//! nine crossratio values per pair of triples. A full pair-set table makes
//! `rho` a lookup; the graph with edges `rho <= s+1` carries the integer path
//! metric whose hyperbolicity constant is measured, not assumed.

use crate::action::{Element, Elements, FinitenessProbe, Footprint};
use crate::annulus::{nests, Annulus, AnnulusSystem, CrossValue};
use crate::boundary::BoundaryModel;
use crate::clopen::ClopenSet;
use crate::dynamics::fixed_classes;
use crate::error::{Error, Result};
use crate::free::FreeWord;
use crate::rat::{clamp0, half, Rat};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[derive(Clone, Copy, Debug)]
pub struct SigmaConfig {
    pub seed: u64,
    /// Override for the edge threshold parameter; `None` selects it from the
    /// sampled geodesic coverage.
    pub s_override: Option<u32>,
    /// Pairs sampled for the edge threshold selection.
    pub s_samples: usize,
    /// Triples sampled for the additive quasimetric defect.
    pub defect_samples: usize,
    /// Sources for path-metric measurements; quadruples are drawn among them.
    pub bfs_sources: usize,
    /// Pairs sampled for the exact invariance check.
    pub equivariance_pairs: usize,
    /// Word length of the elements used in the invariance check.
    pub equivariance_word_len: usize,
}

impl Default for SigmaConfig {
    fn default() -> Self {
        SigmaConfig {
            seed: 1,
            s_override: None,
            s_samples: 200,
            defect_samples: 20_000,
            bfs_sources: 12,
            equivariance_pairs: 100,
            equivariance_word_len: 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SigmaReport {
    pub triple_count: usize,
    pub pair_sets: usize,
    pub s: u32,
    /// Fraction (num, den) of sampled pairs admitting an `s`-geodesic.
    pub coverage: (u64, u64),
    /// Additive defect of the triangle inequality, measured.
    pub r_defect: u32,
    /// Four-point constant of the unit-edge path metric, measured.
    pub delta_4pt: Rat,
    pub diagonal_zero_ok: bool,
    pub symmetry_ok: bool,
    pub components: Vec<usize>,
    pub equivariance_checked: usize,
    pub equivariance_exact: usize,
    pub word_bound: usize,
}

pub struct TripleSpaceGraph {
    classes: Vec<FreeWord>,
    triples: Vec<[u16; 3]>,
    pair_ids: Vec<[u32; 3]>,
    n_pairs: usize,
    table: Vec<u16>,
    s: u32,
}

fn pair_id(n: usize, i: usize, j: usize) -> usize {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

impl TripleSpaceGraph {
    pub fn vertex_count(&self) -> usize {
        self.triples.len()
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn classes(&self) -> &[FreeWord] {
        &self.classes
    }

    pub fn triple(&self, v: usize) -> [u16; 3] {
        self.triples[v]
    }

    /// The quasimetric, by table lookup.
    pub fn rho(&self, x: usize, y: usize) -> u32 {
        let px = &self.pair_ids[x];
        let py = &self.pair_ids[y];
        let mut best = 0u16;
        for &k in px {
            let row = k as usize * self.n_pairs;
            for &l in py {
                let v = self.table[row + l as usize];
                if v > best {
                    best = v;
                }
            }
        }
        best as u32
    }

    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        x != y && self.rho(x, y) <= self.s + 1
    }

    /// Unit-edge path metric distances from a source, `u32::MAX` when
    /// unreachable. Dense-graph BFS: each unvisited vertex is probed against
    /// the current frontier until a neighbor is found.
    pub fn bfs(&self, src: usize) -> Vec<u32> {
        let n = self.vertex_count();
        let mut dist = vec![u32::MAX; n];
        dist[src] = 0;
        let mut frontier = vec![src];
        let mut unvisited: Vec<usize> = (0..n).filter(|&v| v != src).collect();
        let mut level = 0u32;
        while !frontier.is_empty() && !unvisited.is_empty() {
            level += 1;
            let mut next = Vec::new();
            let mut still = Vec::with_capacity(unvisited.len());
            'outer: for &v in &unvisited {
                for &f in &frontier {
                    if self.has_edge(v, f) {
                        dist[v] = level;
                        next.push(v);
                        continue 'outer;
                    }
                }
                still.push(v);
            }
            unvisited = still;
            frontier = next;
        }
        dist
    }

    /// Vertex image under an element, via canonical representatives of the
    /// visible classes. Distinct classes can shift into the same class (the
    /// homeomorphism does not descend to the finite quotient), so the vertex
    /// action is partial: `None` marks a truncation-degenerate image.
    pub fn vertex_image(&self, model: &BoundaryModel, e: &Element, v: usize) -> Option<usize> {
        let g = match &e.footprint {
            Footprint::Word(w) => w,
            _ => unreachable!("triple spaces act by words"),
        };
        let t = self.triples[v];
        let mut img = [0u16; 3];
        for (slot, &c) in img.iter_mut().zip(t.iter()) {
            let moved = g.mul(&model.representative(&self.classes[c as usize]));
            let idx = self
                .classes
                .binary_search(&moved.prefix(self.classes[0].len()))
                .expect("truncations are classes");
            *slot = idx as u16;
        }
        self.triples.binary_search(&img).ok()
    }

    /// Exports the vertex manifest and the edge list, capped; returns
    /// `(manifest, edges, truncated)`.
    pub fn export(&self, max_edges: u64) -> (String, String, bool) {
        let mut manifest = String::new();
        for (i, t) in self.triples.iter().enumerate() {
            manifest.push_str(&format!(
                "{} {} {} {}\n",
                i,
                self.classes[t[0] as usize],
                self.classes[t[1] as usize],
                self.classes[t[2] as usize]
            ));
        }
        let mut edges = String::new();
        let mut count = 0u64;
        let mut truncated = false;
        'outer: for x in 0..self.vertex_count() {
            for y in (x + 1)..self.vertex_count() {
                if self.has_edge(x, y) {
                    count += 1;
                    if count > max_edges {
                        truncated = true;
                        break 'outer;
                    }
                    edges.push_str(&format!("{x} {y}\n"));
                }
            }
        }
        (manifest, edges, truncated)
    }
}

/// Builds the pair-set crossratio table and the graph, measuring the
/// advertised quantities along the way.
pub fn build_triple_graph(
    model: &BoundaryModel,
    system: &AnnulusSystem,
    cfg: &SigmaConfig,
) -> Result<(TripleSpaceGraph, SigmaReport)> {
    let classes = model.points().to_vec();
    let n = classes.len();
    if n > u16::MAX as usize {
        return Err(Error::Precondition("too many visible points".into()));
    }
    let n_pairs = n * (n - 1) / 2;
    let bound = system.word_bound();

    // Pair sets as clopen unions of the two class cylinders.
    let mut pair_sets = Vec::with_capacity(n_pairs);
    for i in 0..n {
        for j in (i + 1)..n {
            pair_sets.push(
                ClopenSet::cylinder(classes[i].clone())
                    .union(&ClopenSet::cylinder(classes[j].clone())),
            );
        }
    }

    // Ends: for each annulus the pair sets lying above it.
    let u = system.len();
    let mut ends_of_annulus: Vec<Vec<u32>> = vec![Vec::new(); u];
    for (pid, ps) in pair_sets.iter().enumerate() {
        for a in 0..u {
            if crate::annulus::set_above(ps, &system.annuli()[a]) {
                ends_of_annulus[a].push(pid as u32);
            }
        }
    }

    let mut table = vec![0u16; n_pairs * n_pairs];
    for (kid, ks) in pair_sets.iter().enumerate() {
        let dp = match system.chain_dp(ks, bound) {
            Some(dp) => dp,
            None => {
                // Cyclic digraph: fall back to the general computation and
                // fail loudly on an actual reachable cycle.
                for (lid, ls) in pair_sets.iter().enumerate() {
                    let cr = system.crossratio_at(ks, ls, bound);
                    match cr.value {
                        CrossValue::Finite(v) => {
                            table[kid * n_pairs + lid] = v as u16;
                        }
                        CrossValue::Infinite(_) => {
                            return Err(Error::Precondition(
                                "nesting cycle reachable between visible pair sets".into(),
                            ))
                        }
                    }
                }
                continue;
            }
        };
        let row = &mut table[kid * n_pairs..(kid + 1) * n_pairs];
        for a in 0..u {
            let v = dp[a];
            if v == 0 {
                continue;
            }
            for &lid in &ends_of_annulus[a] {
                if v as u16 > row[lid as usize] {
                    row[lid as usize] = v as u16;
                }
            }
        }
    }

    // Ordered distinct triples, lexicographic.
    let mut triples = Vec::with_capacity(n * (n - 1) * (n - 2));
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if a != b && b != c && a != c {
                    triples.push([a as u16, b as u16, c as u16]);
                }
            }
        }
    }
    let pair_ids: Vec<[u32; 3]> = triples
        .iter()
        .map(|t| {
            [
                pair_id(n, t[0] as usize, t[1] as usize) as u32,
                pair_id(n, t[0] as usize, t[2] as usize) as u32,
                pair_id(n, t[1] as usize, t[2] as usize) as u32,
            ]
        })
        .collect();

    let mut graph = TripleSpaceGraph {
        classes,
        triples,
        pair_ids,
        n_pairs,
        table,
        s: 0,
    };

    // Symmetry of the table is exact in a symmetric system.
    let mut symmetry_ok = true;
    'sym: for k in 0..n_pairs {
        for l in (k + 1)..n_pairs {
            if graph.table[k * n_pairs + l] != graph.table[l * n_pairs + k] {
                symmetry_ok = false;
                break 'sym;
            }
        }
    }

    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let v = graph.vertex_count();

    let mut diagonal_zero_ok = true;
    for _ in 0..1000.min(v) {
        let x = rng.gen_range(0..v);
        if graph.rho(x, x) != 0 {
            diagonal_zero_ok = false;
        }
    }

    // Additive defect of the triangle inequality.
    let mut r_defect = 0i64;
    for _ in 0..cfg.defect_samples {
        let x = rng.gen_range(0..v);
        let y = rng.gen_range(0..v);
        let z = rng.gen_range(0..v);
        let d = graph.rho(x, y) as i64 - graph.rho(x, z) as i64 - graph.rho(z, y) as i64;
        if d > r_defect {
            r_defect = d;
        }
    }

    // Edge threshold: smallest s with >= 95% of sampled pairs admitting an
    // s-geodesic found by midpoint bisection (pairs at distance <= 6).
    let s = match cfg.s_override {
        Some(s) => s,
        None => {
            let mut devs = Vec::new();
            let mut guard = 0;
            while devs.len() < cfg.s_samples && guard < cfg.s_samples * 40 {
                guard += 1;
                let x = rng.gen_range(0..v);
                let y = rng.gen_range(0..v);
                let r = graph.rho(x, y);
                if (1..=6).contains(&r) {
                    devs.push(geodesic_deviation(&graph, x, y));
                }
            }
            if devs.is_empty() {
                0
            } else {
                devs.sort_unstable();
                let q95 = devs[(devs.len() * 95 / 100).min(devs.len() - 1)];
                q95
            }
        }
    };
    graph.s = s;
    let mut covered = 0u64;
    let mut tested = 0u64;
    let mut guard = 0;
    while tested < cfg.s_samples as u64 && guard < cfg.s_samples * 40 {
        guard += 1;
        let x = rng.gen_range(0..v);
        let y = rng.gen_range(0..v);
        let r = graph.rho(x, y);
        if (1..=6).contains(&r) {
            tested += 1;
            if geodesic_deviation(&graph, x, y) <= s {
                covered += 1;
            }
        }
    }

    // Path-metric structure from a handful of sources.
    let mut sources = Vec::new();
    while sources.len() < cfg.bfs_sources.min(v) {
        let c = rng.gen_range(0..v);
        if !sources.contains(&c) {
            sources.push(c);
        }
    }
    let dists: Vec<Vec<u32>> = sources.iter().map(|&s0| graph.bfs(s0)).collect();
    let mut components = vec![0usize];
    {
        // Component sizes from the first source plus a sweep over leftovers.
        let mut assigned = vec![false; v];
        let mut comps = Vec::new();
        let mut seed_list: Vec<usize> = (0..v).collect();
        while let Some(&start) = seed_list.iter().find(|&&x| !assigned[x]) {
            let d = if Some(&start) == sources.first().map(|s| s).map(|s| s).as_deref() {
                dists[0].clone()
            } else {
                graph.bfs(start)
            };
            let mut size = 0;
            for (i, &di) in d.iter().enumerate() {
                if di != u32::MAX {
                    assigned[i] = true;
                    size += 1;
                }
            }
            comps.push(size);
            seed_list.retain(|&x| !assigned[x]);
        }
        components = comps;
    }

    // Four-point constant of the path metric over source quadruples.
    let mut worst2 = 0i64;
    let idx = |s_i: usize, t: usize| dists[s_i][t];
    for a in 0..sources.len() {
        for b in (a + 1)..sources.len() {
            for c in (b + 1)..sources.len() {
                for d in (c + 1)..sources.len() {
                    let pts = [a, b, c, d];
                    // all pairwise distances finite?
                    let mut dd = [[0i64; 4]; 4];
                    let mut fin = true;
                    for i in 0..4 {
                        for j in 0..4 {
                            let v0 = idx(pts[i], sources[pts[j]]);
                            if v0 == u32::MAX {
                                fin = false;
                            }
                            dd[i][j] = v0 as i64;
                        }
                    }
                    if !fin {
                        continue;
                    }
                    for w in 0..4 {
                        let others: Vec<usize> = (0..4).filter(|&t| t != w).collect();
                        let gp = |p: usize, q: usize| dd[p][w] + dd[q][w] - dd[p][q];
                        let (x, y, z) = (others[0], others[1], others[2]);
                        for (p, q, r) in [(x, y, z), (x, z, y), (y, z, x)] {
                            let d2 = gp(p, r).min(gp(q, r)) - gp(p, q);
                            if d2 > worst2 {
                                worst2 = d2;
                            }
                        }
                    }
                }
            }
        }
    }

    // Exact invariance of rho on sampled vertex pairs: both sides computed
    // from exact set translates in the same realized system.
    let elements = crate::action::enumerate_elements(
        &crate::action::Action::Boundary(crate::action::BoundaryAction::standard_f2()),
        cfg.equivariance_word_len,
    );
    let mut equivariance_checked = 0;
    let mut equivariance_exact = 0;
    let short: Vec<&Element> = elements.iter().filter(|e| !e.is_identity()).collect();
    if !short.is_empty() {
        for _ in 0..cfg.equivariance_pairs {
            let x = rng.gen_range(0..v);
            let y = rng.gen_range(0..v);
            let e = short[rng.gen_range(0..short.len())];
            let g = match &e.footprint {
                Footprint::Word(w) => w,
                _ => unreachable!(),
            };
            let lhs = rho_translated(&graph, system, g, x, y)?;
            let rhs = graph.rho(x, y);
            equivariance_checked += 1;
            if lhs == rhs {
                equivariance_exact += 1;
            }
        }
    }

    let report = SigmaReport {
        triple_count: v,
        pair_sets: n_pairs,
        s,
        coverage: (covered, tested),
        r_defect: r_defect.max(0) as u32,
        delta_4pt: clamp0(half(worst2)),
        diagonal_zero_ok,
        symmetry_ok,
        components,
        equivariance_checked,
        equivariance_exact,
        word_bound: bound,
    };
    Ok((graph, report))
}

/// `rho(gx, gy)` from exact clopen translates of the two triples.
fn rho_translated(
    graph: &TripleSpaceGraph,
    system: &AnnulusSystem,
    g: &FreeWord,
    x: usize,
    y: usize,
) -> Result<u32> {
    let t_sets = |v: usize| -> Vec<ClopenSet> {
        let t = graph.triples[v];
        t.iter()
            .map(|&c| ClopenSet::cylinder(graph.classes[c as usize].clone()).translate(g))
            .collect()
    };
    let xs = t_sets(x);
    let ys = t_sets(y);
    let mut best = 0u32;
    for i in 0..3 {
        for j in (i + 1)..3 {
            let k = xs[i].union(&xs[j]);
            for a in 0..3 {
                for b in (a + 1)..3 {
                    let l = ys[a].union(&ys[b]);
                    match system.crossratio(&k, &l).value {
                        CrossValue::Finite(v) => best = best.max(v),
                        CrossValue::Infinite(_) => {
                            return Err(Error::Precondition(
                                "infinite crossratio in invariance check".into(),
                            ))
                        }
                    }
                }
            }
        }
    }
    Ok(best)
}

/// Greedy bisection deviation: builds a candidate unit-speed sequence and
/// returns the worst deviation `| rho(x_i,x_j) - |i-j| |` over it.
fn geodesic_deviation(graph: &TripleSpaceGraph, x: usize, y: usize) -> u32 {
    let n = graph.rho(x, y) as usize;
    let mut seq = vec![x];
    build_segment(graph, x, y, n, &mut seq);
    let mut worst = 0i64;
    for i in 0..seq.len() {
        for j in (i + 1)..seq.len() {
            let d = graph.rho(seq[i], seq[j]) as i64 - (j - i) as i64;
            worst = worst.max(d.abs());
        }
    }
    worst as u32
}

fn build_segment(graph: &TripleSpaceGraph, x: usize, y: usize, steps: usize, out: &mut Vec<usize>) {
    if steps <= 1 {
        out.push(y);
        return;
    }
    let k = steps / 2;
    let v = graph.vertex_count();
    let mut best_m = x;
    let mut best_score = i64::MAX;
    for m in 0..v {
        let a = graph.rho(x, m) as i64 - k as i64;
        let b = graph.rho(m, y) as i64 - (steps - k) as i64;
        let score = a.abs().max(b.abs());
        if score < best_score {
            best_score = score;
            best_m = m;
        }
    }
    build_segment(graph, x, best_m, k, out);
    build_segment(graph, best_m, y, steps - k, out);
}

/// One row of the displacement table of a power chain.
#[derive(Clone, Debug)]
pub struct LoxRow {
    pub n: u32,
    pub chain_ok: bool,
    pub crossratio: u32,
    pub rho: u32,
    pub bound: u32,
}

#[derive(Clone, Debug)]
pub struct LoxodromicCertificate {
    /// Least power with `g^N(M \ A-) subset A+`.
    pub push_power: u32,
    pub x: FreeWord,
    pub y: FreeWord,
    pub z: FreeWord,
    pub rows: Vec<LoxRow>,
    /// The realizing annulus chain of the deepest row, one description per
    /// rung.
    pub chain_witness: Vec<String>,
    pub all_pass: bool,
}

/// Certifies linear displacement growth along the power chain of `g`.
///
/// The chain for step `n` runs through the rung annuli `g^{iN} A`; the
/// realized system is augmented with exactly those translates so the
/// crossratio witnesses exist whatever the ambient word bound is.
pub fn certify_loxodromic(
    model: &BoundaryModel,
    system: &AnnulusSystem,
    action: &crate::action::BoundaryAction,
    g_word: &FreeWord,
    z_word: &FreeWord,
    n_max: u32,
    push_budget: u32,
) -> Result<LoxodromicCertificate> {
    let g = g_word.clone();
    if g.is_empty() {
        return Err(Error::Precondition("element is trivial".into()));
    }
    let fixed = fixed_classes(model, &g);
    if fixed.len() != 2 {
        return Err(Error::Precondition(format!(
            "expected two fixed classes, found {}",
            fixed.len()
        )));
    }
    let a_minus = system.base().minus().clone();
    let a_plus = system.base().plus().clone();
    let (x, y) = {
        let c0 = ClopenSet::cylinder(fixed[0].clone());
        let c1 = ClopenSet::cylinder(fixed[1].clone());
        if c0.is_subset_of(&a_minus) && c1.is_subset_of(&a_plus) {
            (fixed[0].clone(), fixed[1].clone())
        } else if c1.is_subset_of(&a_minus) && c0.is_subset_of(&a_plus) {
            (fixed[1].clone(), fixed[0].clone())
        } else {
            return Err(Error::Precondition(
                "fixed classes do not sit inside the annulus sides".into(),
            ));
        }
    };
    let z = model.point_from_word(z_word)?;
    let z_set = ClopenSet::cylinder(z.clone());
    if z_set.intersects(&a_minus) || z_set.intersects(&a_plus) {
        return Err(Error::Precondition(
            "the witness point must avoid both annulus sides".into(),
        ));
    }
    // Least N with g^N(M \ A-) subset A+.
    let complement = a_minus.complement();
    let mut push_power = None;
    for n in 1..=push_budget {
        if complement.translate(&g.pow(n as i64)).is_subset_of(&a_plus) {
            push_power = Some(n);
            break;
        }
    }
    let n_push =
        push_power.ok_or_else(|| Error::Precondition("no valid push power in budget".into()))?;
    let step = g.pow(n_push as i64);

    let x_set = ClopenSet::cylinder(x.prefix(model.depth()));
    let y_set = ClopenSet::cylinder(y.prefix(model.depth()));
    let base = system.base().clone();
    let rung_words: Vec<FreeWord> = (1..=n_max as i64).map(|i| step.pow(i)).collect();
    let system =
        AnnulusSystem::build_augmented(base.clone(), action, system.word_bound(), &rung_words);
    let mut rows = Vec::new();
    let mut chain_witness = Vec::new();
    for n in 1..=n_max {
        // Chain facts, each an exact set statement. The fixed points are
        // represented by class cylinders at the bottom of the chain and by
        // their (deeper) exact images at the top, since a depth-D cylinder
        // around y is too coarse to sit inside a rung past depth D.
        let gn = step.pow(n as i64);
        let mut ok = true;
        let a1 = base.translate(&step);
        ok &= x_set.is_subset_of(a1.minus());
        ok &= z_set.is_subset_of(a1.minus());
        ok &= a_minus.translate(&step).union(&a_plus).is_full();
        let mut prev = a1.clone();
        for _i in 2..n as usize {
            let next = prev.translate(&step);
            ok &= nests(&prev, &next);
            prev = next;
        }
        let top = base.translate(&step.pow((n as i64) - 1));
        ok &= z_set.translate(&gn).is_subset_of(top.plus());
        ok &= y_set.translate(&gn).is_subset_of(top.plus());
        // Crossratio lower bound along the axis.
        let k = x_set.union(&z_set);
        let l = z_set.translate(&gn).union(&y_set.translate(&gn));
        let full = system.crossratio(&k, &l);
        let cr = match full.value {
            CrossValue::Finite(v) => v,
            CrossValue::Infinite(_) => {
                return Err(Error::Precondition("infinite crossratio on the axis".into()))
            }
        };
        if n == n_max {
            chain_witness = full
                .chain
                .iter()
                .map(|&i| {
                    let a = &system.annuli()[i];
                    format!("({} , {})", a.minus(), a.plus())
                })
                .collect();
        }
        // Full displacement: the image triple is the exact translate of
        // every coordinate.
        let a_sets = [x_set.clone(), y_set.clone(), z_set.clone()];
        let b_sets = [
            x_set.translate(&gn),
            y_set.translate(&gn),
            z_set.translate(&gn),
        ];
        let rho = rho_of_set_triples(&system, &a_sets, &b_sets)?;
        let bound = n - 1;
        rows.push(LoxRow {
            n,
            chain_ok: ok,
            crossratio: cr,
            rho,
            bound,
        });
    }
    let all_pass = rows
        .iter()
        .all(|r| r.chain_ok && r.crossratio >= r.bound && r.rho >= r.bound);
    Ok(LoxodromicCertificate {
        push_power: n_push,
        x,
        y,
        z,
        rows,
        chain_witness,
        all_pass,
    })
}

/// `rho` between two triples given as exact clopen sets.
pub fn rho_of_set_triples(
    system: &AnnulusSystem,
    a: &[ClopenSet; 3],
    b: &[ClopenSet; 3],
) -> Result<u32> {
    let mut best = 0;
    for i in 0..3 {
        for j in (i + 1)..3 {
            let k = a[i].union(&a[j]);
            for p in 0..3 {
                for q in (p + 1)..3 {
                    let l = b[p].union(&b[q]);
                    match system.crossratio(&k, &l).value {
                        CrossValue::Finite(v) => best = best.max(v),
                        CrossValue::Infinite(_) => {
                            return Err(Error::Precondition("infinite crossratio".into()))
                        }
                    }
                }
            }
        }
    }
    Ok(best)
}

#[derive(Clone, Debug)]
pub struct WpdCertificate {
    pub eps: u32,
    /// Ladder half-length; the ladder has `2 * ladder` rungs.
    pub ladder: u32,
    /// The comparison power `K = (2L+1) N`.
    pub k_power: u32,
    pub chain_ok: bool,
    pub membership_checked: u64,
    pub membership_failures: u64,
    pub probe: FinitenessProbe,
}

/// Displacement-finiteness certificate at a triple basepoint.
///
/// With `L > eps + 2` rungs on each side and `K = (2L+1) N`, a triple at
/// `rho`-distance at most `eps` from the basepoint must park two coordinates
/// in the minus side of the middle rung (and dually at `g^K` of the
/// basepoint), which pins the finiteness count; both facts are checked by
/// direct membership and by the stabilization probe. The system is augmented
/// with every rung translate so the displacement values see the whole
/// ladder; without that, a small word window underestimates `rho` near the
/// far basepoint and the membership implication is tested against the wrong
/// distances.
#[allow(clippy::too_many_arguments)]
pub fn certify_wpd(
    model: &BoundaryModel,
    system: &AnnulusSystem,
    action: &crate::action::BoundaryAction,
    elements: &Elements,
    lox: &LoxodromicCertificate,
    g_word: &FreeWord,
    eps: u32,
    membership_samples: usize,
    seed: u64,
    tail_window: usize,
) -> Result<WpdCertificate> {
    let n_push = lox.push_power;
    let ladder = eps + 3; // the least integer above eps + 2
    let k_power = (2 * ladder + 1) * n_push;
    let g = g_word.clone();
    let step = g.pow(n_push as i64);
    let rung_words: Vec<FreeWord> = (1..=2 * ladder as i64)
        .map(|i| step.pow(i))
        .chain([g.pow(k_power as i64)])
        .collect();
    let system = &AnnulusSystem::build_augmented(
        system.base().clone(),
        action,
        system.word_bound(),
        &rung_words,
    );

    let depth = model.depth();
    let x_set = ClopenSet::cylinder(lox.x.prefix(depth));
    let y_set = ClopenSet::cylinder(lox.y.prefix(depth));
    let z_set = ClopenSet::cylinder(lox.z.prefix(depth));

    // Rungs A_i = g^{iN} A for i = 1..2L and the sandwich chain.
    let rungs: Vec<Annulus> = (1..=2 * ladder)
        .map(|i| system.base().translate(&step.pow(i as i64)))
        .collect();
    let mut chain_ok = x_set.is_subset_of(rungs[0].minus()) && z_set.is_subset_of(rungs[0].minus());
    for w in rungs.windows(2) {
        chain_ok &= nests(&w[0], &w[1]);
    }
    let gk = g.pow(k_power as i64);
    let gkz = z_set.translate(&gk);
    chain_ok &= y_set.translate(&gk).is_subset_of(rungs.last().unwrap().plus());
    chain_ok &= gkz.is_subset_of(rungs.last().unwrap().plus());

    let mid = &rungs[(ladder - 1) as usize]; // A_L, 1-indexed
    let a_sets = [x_set.clone(), y_set.clone(), z_set.clone()];
    let b_sets = [
        x_set.translate(&gk),
        y_set.translate(&gk),
        z_set.translate(&gk),
    ];

    // Membership implication over sampled triples plus all short orbit
    // triples of the basepoint.
    let mut rng = StdRng::seed_from_u64(seed);
    let classes = model.points();
    let n = classes.len();
    let mut membership_checked = 0u64;
    let mut membership_failures = 0u64;
    let mut candidates: Vec<[ClopenSet; 3]> = Vec::new();
    for e in elements.iter().take(64) {
        let h = match &e.footprint {
            Footprint::Word(w) => w,
            _ => unreachable!(),
        };
        candidates.push([
            x_set.translate(h),
            y_set.translate(h),
            z_set.translate(h),
        ]);
    }
    for _ in 0..membership_samples {
        let mut pick = [0usize; 3];
        pick[0] = rng.gen_range(0..n);
        loop {
            pick[1] = rng.gen_range(0..n);
            if pick[1] != pick[0] {
                break;
            }
        }
        loop {
            pick[2] = rng.gen_range(0..n);
            if pick[2] != pick[0] && pick[2] != pick[1] {
                break;
            }
        }
        candidates.push([
            ClopenSet::cylinder(classes[pick[0]].clone()),
            ClopenSet::cylinder(classes[pick[1]].clone()),
            ClopenSet::cylinder(classes[pick[2]].clone()),
        ]);
    }
    for w in &candidates {
        let near_a = rho_of_set_triples(system, &a_sets, w)? <= eps;
        let near_b = rho_of_set_triples(system, &b_sets, w)? <= eps;
        if near_a {
            membership_checked += 1;
            let inside = w
                .iter()
                .filter(|c| c.is_subset_of(mid.minus()))
                .count();
            if inside < 2 {
                membership_failures += 1;
            }
        }
        if near_b {
            membership_checked += 1;
            let inside = w.iter().filter(|c| c.is_subset_of(mid.plus())).count();
            if inside < 2 {
                membership_failures += 1;
            }
        }
    }

    // The finiteness probe itself.
    let probe = FinitenessProbe::from_condition(
        format!("rho(a,ha)<={eps} and rho(g^K a, h g^K a)<={eps}"),
        elements,
        tail_window,
        |h| {
            let hw = match &h.footprint {
                Footprint::Word(w) => w,
                _ => unreachable!(),
            };
            let ha = [
                a_sets[0].translate(hw),
                a_sets[1].translate(hw),
                a_sets[2].translate(hw),
            ];
            let da = rho_of_set_triples(system, &a_sets, &ha).unwrap_or(u32::MAX);
            if da > eps {
                return false;
            }
            let hb = [
                b_sets[0].translate(hw),
                b_sets[1].translate(hw),
                b_sets[2].translate(hw),
            ];
            let db = rho_of_set_triples(system, &b_sets, &hb).unwrap_or(u32::MAX);
            db <= eps
        },
    );

    Ok(WpdCertificate {
        eps,
        ladder,
        k_power,
        chain_ok,
        membership_checked,
        membership_failures,
        probe,
    })
}

/// Displacement-finiteness probe on the unit-edge graph: counts elements
/// moving a vertex and its `g^k` image by path distance at most `eps`.
/// Vertex images go through canonical representatives; elements whose image
/// triple degenerates at the visible depth are excluded and counted in the
/// returned flag tally.
pub fn wpd_probe_path_metric(
    graph: &TripleSpaceGraph,
    model: &BoundaryModel,
    elements: &Elements,
    g: &Element,
    s: usize,
    eps: u32,
    k: u32,
    tail_window: usize,
) -> Result<(FinitenessProbe, u64)> {
    let applied = k as usize * g.word.len() + elements.max_len();
    model.check_buffer(applied)?;
    let mut gks = s;
    for _ in 0..k {
        gks = graph
            .vertex_image(model, g, gks)
            .ok_or(Error::TriviallyActing)?;
    }
    let from_s = graph.bfs(s);
    let from_gks = graph.bfs(gks);
    let mut flagged = 0u64;
    let probe = FinitenessProbe::from_condition(
        format!("path displacement <= {eps} at the base vertex and its power image"),
        elements,
        tail_window,
        |h| {
            match (
                graph.vertex_image(model, h, s),
                graph.vertex_image(model, h, gks),
            ) {
                (Some(hs), Some(hgks)) => {
                    from_s[hs] != u32::MAX
                        && from_s[hs] <= eps
                        && from_gks[hgks] != u32::MAX
                        && from_gks[hgks] <= eps
                }
                _ => {
                    flagged += 1;
                    false
                }
            }
        },
    );
    Ok((probe, flagged))
}

/// Axiom measurements for a realized system over the visible points.
#[derive(Clone, Debug)]
pub struct AxiomReport {
    pub samples: u64,
    pub stable: u64,
    pub infinite: u64,
    pub max_value: u32,
    /// Measured separation constant: the largest `min` of the two crossed
    /// crossratios over the sampled quadruples.
    pub crossing_k: u32,
    pub tail_window: usize,
    pub unstable_examples: Vec<String>,
}

pub fn verify_axioms(
    model: &BoundaryModel,
    system: &AnnulusSystem,
    samples: usize,
    seed: u64,
    tail_window: usize,
) -> AxiomReport {
    let mut rng = StdRng::seed_from_u64(seed);
    let classes = model.points();
    let n = classes.len();
    let bound = system.word_bound();
    let mut stable = 0u64;
    let mut infinite = 0u64;
    let mut max_value = 0u32;
    let mut crossing_k = 0u32;
    let mut unstable_examples = Vec::new();
    for _ in 0..samples {
        let mut pick = [0usize; 4];
        for slot in 0..4 {
            loop {
                let c = rng.gen_range(0..n);
                if !pick[..slot].contains(&c) {
                    pick[slot] = c;
                    break;
                }
            }
        }
        let set = |i: usize| ClopenSet::cylinder(classes[pick[i]].clone());
        let k1 = set(0).union(&set(1));
        let l1 = set(2).union(&set(3));
        // Stability in the word bound over the tail window.
        let mut values = Vec::with_capacity(bound + 1);
        let mut hit_infinite = false;
        for b in 0..=bound {
            match system.crossratio_at(&k1, &l1, b).value {
                CrossValue::Finite(v) => values.push(v as u64),
                CrossValue::Infinite(_) => {
                    hit_infinite = true;
                    break;
                }
            }
        }
        if hit_infinite {
            infinite += 1;
            continue;
        }
        max_value = max_value.max(*values.last().unwrap() as u32);
        if crate::action::is_stabilized(&values, tail_window) {
            stable += 1;
        } else if unstable_examples.len() < 8 {
            unstable_examples.push(format!(
                "({},{}|{},{}) values {:?}",
                classes[pick[0]], classes[pick[1]], classes[pick[2]], classes[pick[3]], values
            ));
        }
        // Crossed value for the separation constant.
        let k2 = set(0).union(&set(2));
        let l2 = set(1).union(&set(3));
        let v1 = *values.last().unwrap() as u32;
        if let CrossValue::Finite(v2) = system.crossratio(&k2, &l2).value {
            crossing_k = crossing_k.max(v1.min(v2));
        }
    }
    AxiomReport {
        samples: samples as u64,
        stable,
        infinite,
        max_value,
        crossing_k,
        tail_window,
        unstable_examples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{enumerate_elements, Action, BoundaryAction};
    use crate::gen;

    fn w(s: &str) -> FreeWord {
        FreeWord::parse_f2(s).unwrap()
    }

    fn standard_system(bound: usize) -> AnnulusSystem {
        let base = Annulus::new(
            ClopenSet::cylinder(w("A")),
            ClopenSet::cylinder(w("a")),
        )
        .unwrap();
        AnnulusSystem::build(base, &BoundaryAction::standard_f2(), bound)
    }

    #[test]
    fn triple_graph_at_depth_two() {
        let model = gen::f2_boundary(2, 6);
        let system = standard_system(3);
        let cfg = SigmaConfig {
            s_samples: 60,
            defect_samples: 2000,
            bfs_sources: 6,
            equivariance_pairs: 20,
            ..Default::default()
        };
        let (graph, report) = build_triple_graph(&model, &system, &cfg).unwrap();
        assert_eq!(graph.vertex_count(), 12 * 11 * 10);
        assert!(report.diagonal_zero_ok);
        assert!(report.symmetry_ok);
        assert_eq!(report.equivariance_checked, report.equivariance_exact);
        // The quasimetric vanishes on the diagonal for every vertex.
        for v in (0..graph.vertex_count()).step_by(97) {
            assert_eq!(graph.rho(v, v), 0);
        }
    }

    #[test]
    fn loxodromic_certificate_for_the_generator() {
        let model = gen::f2_boundary(4, 10);
        let system = standard_system(6);
        let action = BoundaryAction::standard_f2();
        let cert =
            certify_loxodromic(&model, &system, &action, &w("a"), &w("b"), 6, 16).unwrap();
        assert_eq!(cert.push_power, 1);
        assert!(cert.all_pass, "rows: {:?}", cert.rows);
        for row in &cert.rows {
            assert!(row.crossratio >= row.bound);
            assert!(row.rho >= row.crossratio);
        }
    }

    #[test]
    fn loxodromic_certificate_for_a_translation_word() {
        // g = ab with the annulus around its own axis ends.
        let model = gen::f2_boundary(5, 12);
        let action = BoundaryAction::standard_f2();
        let base = Annulus::new(
            ClopenSet::cylinder(w("BA")),
            ClopenSet::cylinder(w("ab")),
        )
        .unwrap();
        let system = AnnulusSystem::build(base, &action, 4);
        let cert =
            certify_loxodromic(&model, &system, &action, &w("ab"), &w("b"), 4, 16).unwrap();
        assert!(cert.all_pass, "rows: {:?}", cert.rows);
        assert_eq!(cert.x, w("BABAB"));
        assert_eq!(cert.y, w("ababa"));
        // Displacement grows along the power chain.
        for pair in cert.rows.windows(2) {
            assert!(pair[1].rho >= pair[0].rho);
        }
    }

    #[test]
    fn wpd_certificate_with_zero_slack() {
        // eps = 0 keeps only elements with vanishing displacement at both
        // basepoints; the ladder shortens to L = 3 and K = 7N.
        let model = gen::f2_boundary(3, 12);
        let system = standard_system(4);
        let action = BoundaryAction::standard_f2();
        let lox = certify_loxodromic(&model, &system, &action, &w("a"), &w("b"), 2, 16).unwrap();
        let elements = enumerate_elements(&Action::Boundary(action.clone()), 4);
        let cert =
            certify_wpd(&model, &system, &action, &elements, &lox, &w("a"), 0, 20, 3, 3).unwrap();
        assert_eq!(cert.ladder, 3);
        assert_eq!(cert.k_power, 7);
        assert!(cert.chain_ok);
        assert_eq!(cert.membership_failures, 0);
        assert!(cert.probe.final_count() <= 3, "counts {:?}", cert.probe.counts);
    }

    #[test]
    fn wpd_certificate_probe_stabilizes() {
        let model = gen::f2_boundary(4, 12);
        let system = standard_system(6);
        let baction = BoundaryAction::standard_f2();
        let lox = certify_loxodromic(&model, &system, &baction, &w("a"), &w("b"), 3, 16).unwrap();
        let action = Action::Boundary(BoundaryAction::standard_f2());
        let elements = enumerate_elements(&action, 6);
        let cert =
            certify_wpd(&model, &system, &baction, &elements, &lox, &w("a"), 1, 40, 7, 3).unwrap();
        assert_eq!(cert.ladder, 4);
        assert_eq!(cert.k_power, 9);
        assert!(cert.chain_ok);
        assert_eq!(cert.membership_failures, 0);
        assert!(cert.probe.stabilized, "counts: {:?}", cert.probe.counts);
    }

    #[test]
    fn path_metric_probe_runs_on_the_triple_graph() {
        let model = gen::f2_boundary(3, 12);
        let system = standard_system(3);
        let cfg = SigmaConfig {
            s_samples: 40,
            defect_samples: 500,
            bfs_sources: 4,
            equivariance_pairs: 5,
            ..Default::default()
        };
        let (graph, _) = build_triple_graph(&model, &system, &cfg).unwrap();
        let action = Action::Boundary(BoundaryAction::standard_f2());
        let elements = enumerate_elements(&action, 3);
        let g = elements
            .iter()
            .find(|e| e.word == w("a"))
            .unwrap()
            .clone();
        // Power images survive truncation only when two coordinates sit in
        // the repelling basin; pick such a vertex explicitly.
        let want: Vec<FreeWord> = vec![w("AAA"), w("AAb"), w("bbb")];
        let s = (0..graph.vertex_count())
            .find(|&v| {
                let t = graph.triple(v);
                (0..3).all(|i| graph.classes()[t[i] as usize] == want[i])
            })
            .unwrap();
        let (probe, flagged) =
            wpd_probe_path_metric(&graph, &model, &elements, &g, s, 1, 4, 3).unwrap();
        for pair in probe.counts.windows(2) {
            assert!(pair[0] <= pair[1]);
        }
        // Truncation-degenerate images exist at this depth and are reported
        // rather than silently miscounted.
        assert!(flagged > 0);
    }

    #[test]
    fn axioms_hold_on_the_standard_system() {
        let model = gen::f2_boundary(3, 9);
        let system = standard_system(4);
        let report = verify_axioms(&model, &system, 60, 11, 3);
        assert_eq!(report.infinite, 0);
        assert_eq!(report.stable, report.samples);
        assert!(report.crossing_k <= report.max_value);
    }
}
