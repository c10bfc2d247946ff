//! The constant-bearing estimate suite for finite geodesic spaces.
//!
//! Boundary points have no finite stand-in, so directions are played by
//! vertices `x != e`, the sets `U_K(x)` by sub-level sets of the Gromov
//! product, and "for points deep enough in the direction of x" by the
//! deepest nonempty cone `{ u : (x.u)_e = d(e,x) }`. Each estimate is then a
//! quantified inequality whose worst defect is measured and compared against
//! a multiple of the measured four-point constant. Two direction vertices
//! are treated as distinct directions only when neither lies on the way to
//! the other, `(x.y)_e < min(d(e,x), d(e,y))`; the separation checks ask for
//! an extra margin in multiples of the measured constant, and instances that
//! fail the margin are skipped and counted, never silently dropped.
//!
//! On a tree every measured defect here is exactly zero.

use crate::boundary::BoundaryModel;
use crate::graph::{DeltaReport, MetricGraph, SampleMode, VertexId};
use crate::rat::{clamp0, half, rat, Rat};
use num_traits::Zero;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

#[derive(Clone, Debug)]
pub struct LemmaRecord {
    pub id: &'static str,
    pub claim: &'static str,
    pub measured: Rat,
    pub bound: Rat,
    /// Instances actually evaluated; zero means the margin left nothing to
    /// check at this hyperbolicity constant.
    pub instances: u64,
    pub pass: bool,
}

impl LemmaRecord {
    fn new(id: &'static str, claim: &'static str, measured: Rat, bound: Rat, instances: u64) -> Self {
        LemmaRecord {
            id,
            claim,
            measured,
            bound,
            instances,
            pass: measured <= bound,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LemmaReport {
    pub delta: DeltaReport,
    pub records: Vec<LemmaRecord>,
}

impl LemmaReport {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }
}

struct Ctx<'a> {
    g: &'a MetricGraph,
    delta: Rat,
    e: VertexId,
    mode: SampleMode,
}

impl<'a> Ctx<'a> {
    fn depth(&self, x: VertexId) -> i64 {
        self.g.distance(self.e, x) as i64
    }

    /// Doubled Gromov product at the basepoint.
    fn gp2(&self, x: VertexId, y: VertexId) -> i64 {
        self.g.gp2_base(x, y)
    }

    fn gp(&self, x: VertexId, y: VertexId) -> Rat {
        half(self.gp2(x, y))
    }

    /// Distinct directions: neither vertex lies on the way to the other.
    fn admissible(&self, x: VertexId, y: VertexId) -> bool {
        x != y
            && x != self.e
            && y != self.e
            && self.gp2(x, y) < 2 * self.depth(x).min(self.depth(y))
    }

    /// Extra separation margin in multiples of delta.
    fn separated(&self, x: VertexId, y: VertexId, margin: i64) -> bool {
        self.admissible(x, y)
            && self.gp(x, y)
                <= rat(self.depth(x).min(self.depth(y))) - rat(margin) * self.delta - half(1)
    }

    /// The deepest nonempty cone in the direction of `x`.
    fn cone(&self, x: VertexId) -> Vec<VertexId> {
        self.g.u_k_set(x, rat(self.depth(x)) - half(1))
    }

    fn dist(&self, u: VertexId, v: VertexId) -> i64 {
        self.g.distance(u, v) as i64
    }

    fn dist_to_base_on(&self, path: &[VertexId]) -> i64 {
        path.iter().map(|&t| self.dist(self.e, t)).min().unwrap()
    }

    fn pairs(&self, rng: &mut StdRng, budget: usize) -> Vec<(VertexId, VertexId)> {
        let n = self.g.vertex_count();
        match self.mode {
            SampleMode::Exhaustive => {
                let mut out = Vec::new();
                for x in 0..n {
                    for y in (x + 1)..n {
                        out.push((x, y));
                    }
                }
                out
            }
            SampleMode::Sampled { .. } => {
                let mut out = Vec::new();
                for _ in 0..budget {
                    let x = rng.gen_range(0..n);
                    let y = rng.gen_range(0..n);
                    if x != y {
                        out.push((x, y));
                    }
                }
                out
            }
        }
    }

    /// Sampled (or full, when exhaustive) subsets of a cone.
    fn cone_sample(&self, rng: &mut StdRng, cone: &[VertexId], cap: usize) -> Vec<VertexId> {
        match self.mode {
            SampleMode::Exhaustive => cone.to_vec(),
            SampleMode::Sampled { .. } => {
                if cone.len() <= cap {
                    cone.to_vec()
                } else {
                    let mut picked: Vec<VertexId> =
                        cone.choose_multiple(rng, cap).copied().collect();
                    picked.sort_unstable();
                    picked.dedup();
                    picked
                }
            }
        }
    }
}

/// Half-integer thresholds from deepest to shallowest, strictly below `top`.
fn threshold_schedule(top: i64) -> Vec<Rat> {
    let mut out = Vec::new();
    let mut i = 2 * top - 1;
    while i >= 0 {
        out.push(half(i));
        i -= 1;
    }
    out
}

/// Runs the full estimate suite. The hyperbolicity constant is measured
/// exhaustively whenever the graph is small enough for that to be exact.
pub fn verify_constant_lemmas(
    g: &MetricGraph,
    mode: SampleMode,
    boundary: Option<&BoundaryModel>,
) -> LemmaReport {
    let delta_mode = if g.vertex_count() <= 200 {
        SampleMode::Exhaustive
    } else {
        mode
    };
    let delta_report = g.measure_delta(delta_mode);
    let delta = delta_report.delta_4pt;
    let seed = match mode {
        SampleMode::Sampled { seed, .. } => seed,
        SampleMode::Exhaustive => 0,
    };
    let budget = match mode {
        SampleMode::Sampled { samples, .. } => samples as usize,
        SampleMode::Exhaustive => usize::MAX,
    };
    let mut rng = StdRng::seed_from_u64(seed);
    let ctx = Ctx {
        g,
        delta,
        e: g.basepoint(),
        mode,
    };
    let mut records = Vec::new();

    records.push(LemmaRecord::new(
        "four-point",
        "min{(x.z)_w,(y.z)_w} - (x.y)_w <= 4d over all quadruples",
        delta_report.delta_4pt,
        rat(4) * delta,
        delta_report.four_point_samples,
    ));

    records.extend(product_vs_geodesic(&ctx, &mut rng, budget));
    records.push(product_along_geodesic(&ctx, &mut rng, budget));
    records.extend(cone_window_checks(&ctx, &mut rng, budget));
    records.push(deep_sets_avoid_ball(&ctx, &mut rng, budget));
    records.push(cone_geodesics_stay_deep(&ctx, &mut rng, budget));
    records.extend(cone_separation_checks(&ctx, &mut rng, budget));
    records.push(geodesic_tracks_cones(&ctx, &mut rng, budget));
    records.push(fellow_traveling(&ctx, &mut rng, budget));
    records.extend(third_direction_checks(&ctx, &mut rng, budget));
    records.push(shallow_window_diameter(&ctx, &mut rng, budget));
    records.push(medians_stable(&ctx, &mut rng, budget));

    if let Some(model) = boundary {
        records.extend(boundary_records(model));
    }

    LemmaReport {
        delta: delta_report,
        records,
    }
}

fn product_vs_geodesic(ctx: &Ctx, rng: &mut StdRng, budget: usize) -> Vec<LemmaRecord> {
    let mut upper2 = 0i64; // (u.v) above the geodesic distance, must stay 0
    let mut gap2 = 0i64;
    let mut count = 0u64;
    for (u, v) in ctx.pairs(rng, budget.min(100_000)) {
        let geo = ctx.g.geodesic(u, v);
        let d_base = ctx.dist_to_base_on(&geo.path);
        let p2 = ctx.gp2(u, v);
        upper2 = upper2.max(p2 - 2 * d_base);
        gap2 = gap2.max(2 * d_base - p2);
        count += 1;
    }
    vec![
        LemmaRecord::new(
            "product-geodesic-upper",
            "(u.v)_e <= d(e,[u,v]) exactly",
            clamp0(half(upper2)),
            Rat::zero(),
            count,
        ),
        LemmaRecord::new(
            "product-geodesic-gap",
            "d(e,[u,v]) - (u.v)_e <= 8d",
            clamp0(half(gap2)),
            rat(8) * ctx.delta,
            count,
        ),
    ]
}

fn product_along_geodesic(ctx: &Ctx, rng: &mut StdRng, budget: usize) -> LemmaRecord {
    let mut worst2 = 0i64;
    let mut count = 0u64;
    for (u, v) in ctx.pairs(rng, budget.min(50_000)) {
        let geo = ctx.g.geodesic(u, v);
        let p2 = ctx.gp2(u, v);
        for &w in &geo.path {
            worst2 = worst2.max(p2 - ctx.gp2(u, w));
            count += 1;
        }
    }
    LemmaRecord::new(
        "product-along-geodesic",
        "(u.w)_e >= (u.v)_e - 8d for w on [u,v]",
        clamp0(half(worst2)),
        rat(8) * ctx.delta,
        count,
    )
}

/// The two window checks: some product threshold pins `(u.v)_e` (and the
/// geodesic's distance to the base) near `(x.y)_e`.
fn cone_window_checks(ctx: &Ctx, rng: &mut StdRng, budget: usize) -> Vec<LemmaRecord> {
    let bound_prod = rat(12) * ctx.delta;
    let bound_geo = rat(20) * ctx.delta;
    let mut worst_prod = Rat::zero();
    let mut worst_geo = Rat::zero();
    let mut worst_near = Rat::zero();
    let mut worst_tail = Rat::zero();
    let mut count = 0u64;
    for (x, y) in ctx.pairs(rng, budget.min(4_000)) {
        if !ctx.admissible(x, y) {
            continue;
        }
        count += 1;
        let top = ctx.depth(x).min(ctx.depth(y));
        let mut best_prod: Option<Rat> = None;
        let mut best_geo: Option<Rat> = None;
        let mut best_near: Option<Rat> = None;
        let mut best_tail: Option<Rat> = None;
        let pxy = ctx.gp(x, y);
        for k in threshold_schedule(top) {
            let ux = ctx.g.u_k_set(x, k);
            let uy = ctx.g.u_k_set(y, k);
            if ux.is_empty() || uy.is_empty() {
                continue;
            }
            let mut dev_prod = Rat::zero();
            let mut dev_geo = Rat::zero();
            let mut dev_near = Rat::zero();
            for &u in &ux {
                for &v in &uy {
                    let puv = ctx.gp(u, v);
                    let diff = if puv >= pxy { puv - pxy } else { pxy - puv };
                    dev_prod = dev_prod.max(diff);
                    let d_base = rat(ctx.dist_to_base_on(&ctx.g.geodesic(u, v).path));
                    let gdiff = if d_base >= pxy {
                        d_base - pxy
                    } else {
                        pxy - d_base
                    };
                    dev_geo = dev_geo.max(gdiff);
                    dev_near = dev_near.max(clamp0(d_base - pxy));
                }
            }
            // Tail persistence: products with y do not drop below (x.y).
            let min_tail = ux
                .iter()
                .map(|&u| ctx.gp(u, y))
                .min()
                .unwrap();
            let dev_tail = clamp0(pxy - min_tail);
            best_prod = Some(best_prod.map_or(dev_prod, |b: Rat| b.min(dev_prod)));
            best_geo = Some(best_geo.map_or(dev_geo, |b: Rat| b.min(dev_geo)));
            best_near = Some(best_near.map_or(dev_near, |b: Rat| b.min(dev_near)));
            best_tail = Some(best_tail.map_or(dev_tail, |b: Rat| b.min(dev_tail)));
            if best_prod.unwrap() <= bound_prod
                && best_geo.unwrap() <= bound_geo
                && best_near.unwrap() <= bound_geo
                && best_tail.unwrap() <= rat(4) * ctx.delta
            {
                break;
            }
        }
        worst_prod = worst_prod.max(best_prod.unwrap_or_default());
        worst_geo = worst_geo.max(best_geo.unwrap_or_default());
        worst_near = worst_near.max(best_near.unwrap_or_default());
        worst_tail = worst_tail.max(best_tail.unwrap_or_default());
    }
    vec![
        LemmaRecord::new(
            "cone-product-window",
            "some K pins |(u.v)_e - (x.y)_e| <= 12d on U_K(x) x U_K(y)",
            worst_prod,
            bound_prod,
            count,
        ),
        LemmaRecord::new(
            "cone-geodesic-window",
            "some K pins |d(e,[u,v]) - (x.y)_e| <= 20d",
            worst_geo,
            bound_geo,
            count,
        ),
        LemmaRecord::new(
            "geodesic-near-base",
            "some K keeps d(e,[u,v]) <= (x.y)_e + 20d",
            worst_near,
            bound_geo,
            count,
        ),
        LemmaRecord::new(
            "tail-product-persistence",
            "some K keeps (u.y)_e >= (x.y)_e - 4d on U_K(x)",
            worst_tail,
            rat(4) * ctx.delta,
            count,
        ),
    ]
}

fn deep_sets_avoid_ball(ctx: &Ctx, rng: &mut StdRng, budget: usize) -> LemmaRecord {
    let mut worst = Rat::zero();
    let mut count = 0u64;
    let n = ctx.g.vertex_count();
    let xs: Vec<VertexId> = match ctx.mode {
        SampleMode::Exhaustive => (0..n).collect(),
        SampleMode::Sampled { .. } => (0..budget.min(500))
            .map(|_| rng.gen_range(0..n))
            .collect(),
    };
    for x in xs {
        if x == ctx.e {
            continue;
        }
        for r in threshold_schedule(ctx.depth(x)) {
            let set = ctx.g.u_k_set(x, r);
            if set.is_empty() {
                continue;
            }
            let min_d = set.iter().map(|&z| ctx.dist(ctx.e, z)).min().unwrap();
            worst = worst.max(clamp0(r + half(1) - rat(min_d)));
            count += 1;
        }
    }
    LemmaRecord::new(
        "deep-sets-avoid-ball",
        "every point of U_R(x) is farther than R from the base",
        worst,
        Rat::zero(),
        count,
    )
}

fn cone_geodesics_stay_deep(ctx: &Ctx, rng: &mut StdRng, budget: usize) -> LemmaRecord {
    let mut worst2 = 0i64;
    let mut count = 0u64;
    let n = ctx.g.vertex_count();
    let xs: Vec<VertexId> = match ctx.mode {
        SampleMode::Exhaustive => (0..n).collect(),
        SampleMode::Sampled { .. } => (0..budget.min(300))
            .map(|_| rng.gen_range(0..n))
            .collect(),
    };
    for x in xs {
        if x == ctx.e {
            continue;
        }
        let cone = ctx.cone(x);
        let pts = ctx.cone_sample(rng, &cone, 6);
        for &u1 in &pts {
            for &u2 in &pts {
                if u1 > u2 {
                    continue;
                }
                let m2 = ctx.gp2(x, u1).min(ctx.gp2(x, u2));
                for &t in &ctx.g.geodesic(u1, u2).path {
                    worst2 = worst2.max(m2 - ctx.gp2(x, t));
                    count += 1;
                }
            }
        }
    }
    LemmaRecord::new(
        "cone-geodesics-stay-deep",
        "(x.t)_e >= min((x.u1)_e,(x.u2)_e) - 17d for t on [u1,u2]",
        clamp0(half(worst2)),
        rat(17) * ctx.delta,
        count,
    )
}

fn cone_separation_checks(ctx: &Ctx, rng: &mut StdRng, budget: usize) -> Vec<LemmaRecord> {
    // Point separation with margin 8, geodesic separation with margin 25.
    let mut worst_pt = Rat::zero();
    let mut count_pt = 0u64;
    let mut worst_geo = Rat::zero();
    let mut count_geo = 0u64;
    for (x, y) in ctx.pairs(rng, budget.min(2_000)) {
        let target = rat(ctx.depth(x) + ctx.depth(y)) - rat(2) * ctx.gp(x, y);
        if ctx.separated(x, y, 8) {
            count_pt += 1;
            let cx = ctx.cone_sample(rng, &ctx.cone(x), 8);
            let cy = ctx.cone_sample(rng, &ctx.cone(y), 8);
            let min_d = cx
                .iter()
                .flat_map(|&u| cy.iter().map(move |&v| ctx.dist(u, v)))
                .min()
                .unwrap();
            worst_pt = worst_pt.max(clamp0(target.clone() - rat(min_d)));
        }
        if ctx.separated(x, y, 25) {
            count_geo += 1;
            let cx = ctx.cone_sample(rng, &ctx.cone(x), 4);
            let cy = ctx.cone_sample(rng, &ctx.cone(y), 4);
            let mut min_d = i64::MAX;
            for &u1 in &cx {
                for &u2 in &cx {
                    let pu = ctx.g.geodesic(u1, u2).path;
                    for &v1 in &cy {
                        for &v2 in &cy {
                            let pv = ctx.g.geodesic(v1, v2).path;
                            for &s in &pu {
                                for &t in &pv {
                                    min_d = min_d.min(ctx.dist(s, t));
                                }
                            }
                        }
                    }
                }
            }
            worst_geo = worst_geo.max(clamp0(target - rat(min_d)));
        }
    }
    vec![
        LemmaRecord::new(
            "separated-cones-diverge",
            "d(u,v) >= d(e,x)+d(e,y)-2(x.y)_e - 16d on 8d-separated cones",
            worst_pt,
            rat(16) * ctx.delta,
            count_pt,
        ),
        LemmaRecord::new(
            "cone-geodesics-separate",
            "d([u1,u2],[v1,v2]) >= d(e,x)+d(e,y)-2(x.y)_e - 50d on 25d-separated cones",
            worst_geo,
            rat(50) * ctx.delta,
            count_geo,
        ),
    ]
}

fn geodesic_tracks_cones(ctx: &Ctx, rng: &mut StdRng, budget: usize) -> LemmaRecord {
    let mut worst = Rat::zero();
    let mut count = 0u64;
    for (x, y) in ctx.pairs(rng, budget.min(2_000)) {
        if !ctx.admissible(x, y) {
            continue;
        }
        let dmin = ctx.depth(x).min(ctx.depth(y));
        let d_xy = ctx.gp(x, y) + rat(20) * ctx.delta + half(1);
        let cx = ctx.cone_sample(rng, &ctx.cone(x), 5);
        let cy = ctx.cone_sample(rng, &ctx.cone(y), 5);
        for &u in &cx {
            for &v in &cy {
                for &t in &ctx.g.geodesic(u, v).path {
                    let dt = ctx.dist(ctx.e, t);
                    if dt > dmin {
                        continue;
                    }
                    let tracked = ctx.gp(t, x).max(ctx.gp(t, y));
                    worst = worst.max(clamp0(rat(dt) - d_xy.clone() - tracked));
                    count += 1;
                }
            }
        }
    }
    LemmaRecord::new(
        "geodesic-tracks-cones",
        "points of [u,v] in the visible window satisfy max((t.x),(t.y)) >= d(e,t) - (x.y) - 20d - 1/2 - 12d",
        worst,
        rat(12) * ctx.delta,
        count,
    )
}

fn fellow_traveling(ctx: &Ctx, rng: &mut StdRng, budget: usize) -> LemmaRecord {
    let mut worst = Rat::zero();
    let mut count = 0u64;
    let six_delta = rat(6) * ctx.delta;
    for (x, y) in ctx.pairs(rng, budget.min(1_000)) {
        if !ctx.admissible(x, y) {
            continue;
        }
        let top = rat(ctx.depth(x).min(ctx.depth(y))) - six_delta.clone() - half(1);
        for k in threshold_schedule(ctx.depth(x).min(ctx.depth(y))) {
            if k > top {
                continue;
            }
            let ux = ctx.g.u_k_set(x, k + six_delta.clone());
            let uy = ctx.g.u_k_set(y, k + six_delta.clone());
            if ux.is_empty() || uy.is_empty() {
                continue;
            }
            let sx = ctx.cone_sample(rng, &ux, 3);
            let sy = ctx.cone_sample(rng, &uy, 3);
            for &u1 in &sx {
                for &u2 in &sx {
                    for &v1 in &sy {
                        for &v2 in &sy {
                            let path1 = ctx.g.geodesic(u1, v1).path;
                            let path2 = ctx.g.geodesic(u2, v2).path;
                            for &t in &path1 {
                                if rat(ctx.dist(ctx.e, t)) >= k {
                                    continue;
                                }
                                let d = path2
                                    .iter()
                                    .map(|&s| ctx.dist(t, s))
                                    .min()
                                    .unwrap();
                                worst = worst.max(rat(d));
                                count += 1;
                            }
                        }
                    }
                }
            }
            break; // one threshold per pair keeps the budget sane
        }
    }
    LemmaRecord::new(
        "fellow-traveling",
        "[u1,v1] inside B(e,K) stays within 2d of [u2,v2] for (K+6d)-deep endpoints",
        worst,
        rat(2) * ctx.delta,
        count,
    )
}

fn third_direction_checks(ctx: &Ctx, rng: &mut StdRng, budget: usize) -> Vec<LemmaRecord> {
    let mut worst_pt = Rat::zero();
    let mut count_pt = 0u64;
    let mut worst_geo = Rat::zero();
    let mut count_geo = 0u64;
    let n = ctx.g.vertex_count();
    let triples: Vec<(VertexId, VertexId, VertexId)> = match ctx.mode {
        SampleMode::Exhaustive => {
            let mut out = Vec::new();
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        out.push((x, y, z));
                    }
                }
            }
            out
        }
        SampleMode::Sampled { .. } => (0..budget.min(1_500))
            .map(|_| {
                (
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                )
            })
            .collect(),
    };
    for (x, y, z) in triples {
        if !(ctx.admissible(x, y) && ctx.admissible(x, z) && ctx.admissible(y, z)) {
            continue;
        }
        let dmin = ctx.depth(x).min(ctx.depth(y)).min(ctx.depth(z));
        let max_z = ctx.gp(x, z).max(ctx.gp(y, z));
        let base_target =
            rat(ctx.depth(z)) - rat(2) * max_z - rat(2) * ctx.gp(x, y) - rat(1);
        let cx = ctx.cone_sample(rng, &ctx.cone(x), 4);
        let cy = ctx.cone_sample(rng, &ctx.cone(y), 4);
        let cz = ctx.cone_sample(rng, &ctx.cone(z), 4);
        count_pt += 1;
        for &u in &cx {
            for &v in &cy {
                let path = ctx.g.geodesic(u, v).path;
                for &t in &path {
                    let dt = ctx.dist(ctx.e, t);
                    if dt > dmin {
                        continue;
                    }
                    let target = base_target.clone() + rat(dt);
                    for &w in &cz {
                        worst_pt = worst_pt.max(clamp0(target.clone() - rat(ctx.dist(w, t))));
                    }
                    count_geo += 1;
                    for &w1 in &cz {
                        for &w2 in &cz {
                            let d = ctx
                                .g
                                .geodesic(w1, w2)
                                .path
                                .iter()
                                .map(|&s| ctx.dist(s, t))
                                .min()
                                .unwrap();
                            worst_geo = worst_geo.max(clamp0(target.clone() - rat(d)));
                        }
                    }
                }
            }
        }
    }
    vec![
        LemmaRecord::new(
            "far-point-clears-geodesic",
            "d(w,t) >= d(e,z)+d(e,t)-2max((x.z),(y.z))-2(x.y)-1 - 80d for t on [u,v]",
            worst_pt,
            rat(80) * ctx.delta,
            count_pt,
        ),
        LemmaRecord::new(
            "far-geodesics-disjoint",
            "d([w1,w2],t) obeys the same target with slack 131d",
            worst_geo,
            rat(131) * ctx.delta,
            count_geo,
        ),
    ]
}

fn shallow_window_diameter(ctx: &Ctx, rng: &mut StdRng, budget: usize) -> LemmaRecord {
    let mut worst2 = 0i64;
    let mut count = 0u64;
    let window = rat(42) * ctx.delta;
    for (u, v) in ctx.pairs(rng, budget.min(50_000)) {
        let path = ctx.g.geodesic(u, v).path;
        let d_base = ctx.dist_to_base_on(&path);
        let cutoff = rat(d_base) + window.clone();
        let shallow: Vec<VertexId> = path
            .iter()
            .copied()
            .filter(|&t| rat(ctx.dist(ctx.e, t)) <= cutoff)
            .collect();
        for &a in &shallow {
            for &b in &shallow {
                worst2 = worst2.max(2 * ctx.dist(a, b));
            }
        }
        count += 1;
    }
    LemmaRecord::new(
        "shallow-window-diameter",
        "the 42d-shallow window of a geodesic has diameter <= 88d",
        clamp0(half(worst2)),
        rat(88) * ctx.delta,
        count,
    )
}

fn medians_stable(ctx: &Ctx, rng: &mut StdRng, budget: usize) -> LemmaRecord {
    let mut worst = Rat::zero();
    let mut count = 0u64;
    let n = ctx.g.vertex_count();
    let quads: Vec<[VertexId; 4]> = match ctx.mode {
        SampleMode::Exhaustive => {
            let mut out = Vec::new();
            for p in 0..n {
                for q in (p + 1)..n {
                    for r in 0..n {
                        for s in (r + 1)..n {
                            out.push([p, q, r, s]);
                        }
                    }
                }
            }
            out
        }
        SampleMode::Sampled { .. } => (0..budget.min(400))
            .map(|_| {
                [
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                ]
            })
            .collect(),
    };
    for [p, q, r, s] in quads {
        let ok = ctx.admissible(p, q)
            && ctx.admissible(r, s)
            && ctx.admissible(p, r)
            && ctx.admissible(p, s)
            && ctx.admissible(q, r)
            && ctx.admissible(q, s);
        if !ok {
            continue;
        }
        count += 1;
        // Two independent choices of deep representatives.
        let median = |up: VertexId, uq: VertexId| -> VertexId {
            let path = ctx.g.geodesic(up, uq).path;
            *path
                .iter()
                .min_by_key(|&&t| (ctx.dist(ctx.e, t), t))
                .unwrap()
        };
        let mut reps: Vec<(VertexId, VertexId)> = Vec::new();
        for _ in 0..2 {
            let pick =
                |c: &[VertexId], rng: &mut StdRng| c[rng.gen_range(0..c.len())];
            let (cp, cq, cr, cs) = (ctx.cone(p), ctx.cone(q), ctx.cone(r), ctx.cone(s));
            let a = median(pick(&cp, rng), pick(&cq, rng));
            let b = median(pick(&cr, rng), pick(&cs, rng));
            reps.push((a, b));
        }
        let (a1, b1) = reps[0];
        let (a2, b2) = reps[1];
        let path1 = ctx.g.geodesic(a1, b1).path;
        let path2 = ctx.g.geodesic(a2, b2).path;
        for &t in &path1 {
            let d = path2.iter().map(|&x| ctx.dist(t, x)).min().unwrap();
            worst = worst.max(rat(d));
        }
        for &t in &path2 {
            let d = path1.iter().map(|&x| ctx.dist(t, x)).min().unwrap();
            worst = worst.max(rat(d));
        }
    }
    LemmaRecord::new(
        "medians-stable",
        "segments between the two median points move by at most 92d across deep choices",
        worst,
        rat(92) * ctx.delta,
        count,
    )
}

fn boundary_records(model: &BoundaryModel) -> Vec<LemmaRecord> {
    // Ultrametric form of the four-point inequality, exact on the word model.
    let pts = model.points();
    let mut worst = 0i64;
    let step = (pts.len() / 24).max(1);
    let mut count = 0u64;
    for i in (0..pts.len()).step_by(step) {
        for j in (0..pts.len()).step_by(step) {
            for k in (0..pts.len()).step_by(step) {
                let st = model.point_product(&pts[i], &pts[j]) as i64;
                let su = model.point_product(&pts[i], &pts[k]) as i64;
                let ut = model.point_product(&pts[k], &pts[j]) as i64;
                worst = worst.max(su.min(ut) - st);
                count += 1;
            }
        }
    }
    let sandwich = model.verify_sandwich();
    let ratio_defect = sandwich
        .min_ratio
        .as_ref()
        .map(|r| {
            // defect below 1/2, as an exact rational clamped at zero
            let num = r.numer();
            let den = r.denom();
            // r >= 1/2  <=>  2 num >= den
            if num * 2 >= den.clone() {
                Rat::zero()
            } else {
                rat(1) // any positive value marks the failure
            }
        })
        .unwrap_or_else(Rat::zero);
    vec![
        LemmaRecord::new(
            "boundary-ultrametric",
            "(s.t) >= min((s.u),(u.t)) exactly on the word model",
            clamp0(half(2 * worst)),
            Rat::zero(),
            count,
        ),
        LemmaRecord::new(
            "boundary-sandwich",
            "d'/2 <= rho <= d' on every visible pair",
            if sandwich.violations.is_empty() {
                ratio_defect
            } else {
                rat(1)
            },
            Rat::zero(),
            sandwich.pairs,
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    #[test]
    fn trees_have_all_defects_zero() {
        let t = gen::f2_tree(3);
        let report = verify_constant_lemmas(
            &t,
            SampleMode::Sampled {
                samples: 400,
                seed: 5,
            },
            None,
        );
        assert_eq!(report.delta.delta_4pt, Rat::zero());
        for r in &report.records {
            assert!(r.pass, "{} failed: {:?}", r.id, r);
            assert_eq!(r.measured, Rat::zero(), "{} nonzero on a tree", r.id);
        }
    }

    #[test]
    fn cycle_passes_exhaustively() {
        let c8 = gen::cycle(8);
        let report = verify_constant_lemmas(&c8, SampleMode::Exhaustive, None);
        assert!(report.delta.delta_4pt > Rat::zero());
        for r in &report.records {
            assert!(r.pass, "{} failed: measured {} bound {}", r.id, r.measured, r.bound);
        }
    }

    #[test]
    fn grid_passes_sampled() {
        let g = gen::grid(6);
        let report = verify_constant_lemmas(
            &g,
            SampleMode::Sampled {
                samples: 300,
                seed: 9,
            },
            None,
        );
        for r in &report.records {
            assert!(r.pass, "{} failed: measured {} bound {}", r.id, r.measured, r.bound);
        }
    }
}
