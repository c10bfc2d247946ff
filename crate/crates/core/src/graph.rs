//! Finite geodesic metric spaces given as weighted graphs.
//!
//! Distances are exact nonnegative integers, geodesics are canonical
//! (lexicographically minimal by vertex id sequence), Gromov products are
//! half-integers. Hyperbolicity is measured, never assumed: the slimness
//! constant over canonical triangles and the four-point defect
//! `min{(x.z)_w,(y.z)_w} - (x.y)_w` are both computed, exhaustively or over a
//! seeded sample.

use crate::error::{Error, Result};
use crate::rat::{clamp0, half, Rat};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::collections::BTreeMap;

pub type VertexId = usize;

/// A connected weighted graph with a basepoint and the shortest-path metric.
///
/// Vertex ids are strings; internally vertices are indexed in sorted id
/// order, which is also the order used for canonical geodesics.
#[derive(Clone)]
pub struct MetricGraph {
    names: Vec<String>,
    index: BTreeMap<String, VertexId>,
    adj: Vec<Vec<(VertexId, u64)>>,
    basepoint: VertexId,
    dist: Vec<Vec<u64>>,
}

impl std::fmt::Debug for MetricGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "MetricGraph({} vertices, base {})",
            self.names.len(),
            self.names[self.basepoint]
        )
    }
}

impl MetricGraph {
    /// Builds from `(u, v, w)` edges. Ids are free-form strings; the edge
    /// relation is symmetrized; weights must be positive.
    pub fn new(edges: &[(String, String, u64)], basepoint: &str) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        for (u, v, w) in edges {
            if *w == 0 {
                return Err(Error::InvalidGraph(format!(
                    "edge {u} {v} has zero weight"
                )));
            }
            names.push(u.clone());
            names.push(v.clone());
        }
        names.push(basepoint.to_string());
        names.sort();
        names.dedup();
        let index: BTreeMap<String, VertexId> =
            names.iter().cloned().zip(0..).collect();
        let mut adj = vec![Vec::new(); names.len()];
        for (u, v, w) in edges {
            let (iu, iv) = (index[u], index[v]);
            if iu == iv {
                continue;
            }
            if !adj[iu].iter().any(|&(x, _)| x == iv) {
                adj[iu].push((iv, *w));
                adj[iv].push((iu, *w));
            }
        }
        for a in &mut adj {
            a.sort();
        }
        let basepoint = index[basepoint];
        let mut g = MetricGraph {
            names,
            index,
            adj,
            basepoint,
            dist: Vec::new(),
        };
        g.dist = g.all_pairs()?;
        Ok(g)
    }

    /// Single-vertex space.
    pub fn singleton(id: &str) -> Self {
        MetricGraph::new(&[], id).expect("singleton is valid")
    }

    fn all_pairs(&self) -> Result<Vec<Vec<u64>>> {
        let n = self.names.len();
        let mut dist = Vec::with_capacity(n);
        for s in 0..n {
            dist.push(self.dijkstra(s)?);
        }
        Ok(dist)
    }

    fn dijkstra(&self, source: VertexId) -> Result<Vec<u64>> {
        use std::cmp::Reverse;
        use std::collections::BinaryHeap;
        let n = self.names.len();
        let mut d = vec![u64::MAX; n];
        let mut heap = BinaryHeap::new();
        d[source] = 0;
        heap.push(Reverse((0u64, source)));
        while let Some(Reverse((du, u))) = heap.pop() {
            if du > d[u] {
                continue;
            }
            for &(v, w) in &self.adj[u] {
                let nd = du + w;
                if nd < d[v] {
                    d[v] = nd;
                    heap.push(Reverse((nd, v)));
                }
            }
        }
        if let Some(i) = d.iter().position(|&x| x == u64::MAX) {
            return Err(Error::Disconnected(
                self.names[i].clone(),
                self.names[source].clone(),
            ));
        }
        Ok(d)
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        0..self.names.len()
    }

    pub fn basepoint(&self) -> VertexId {
        self.basepoint
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v]
    }

    pub fn id(&self, name: &str) -> Result<VertexId> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, u64)] {
        &self.adj[v]
    }

    /// Exact shortest-path distance.
    pub fn distance(&self, u: VertexId, v: VertexId) -> u64 {
        self.dist[u][v]
    }

    pub fn distance_by_name(&self, u: &str, v: &str) -> Result<u64> {
        Ok(self.distance(self.id(u)?, self.id(v)?))
    }

    /// The canonical geodesic: among all shortest paths from `u` to `v`, the
    /// one whose vertex index sequence is lexicographically minimal. Greedy
    /// works: at each step take the smallest next vertex still on a shortest
    /// path.
    pub fn geodesic(&self, u: VertexId, v: VertexId) -> Geodesic {
        let mut path = vec![u];
        let mut cur = u;
        while cur != v {
            let remaining = self.dist[cur][v];
            let next = self.adj[cur]
                .iter()
                .filter(|&&(x, w)| w + self.dist[x][v] == remaining)
                .map(|&(x, _)| x)
                .min()
                .expect("connected graph has a next hop");
            path.push(next);
            cur = next;
        }
        Geodesic {
            length: self.dist[u][v],
            path,
        }
    }

    /// Gromov product `(x.y)_z = (d(x,z) + d(y,z) - d(x,y)) / 2`.
    pub fn gromov_product(&self, x: VertexId, y: VertexId, z: VertexId) -> Rat {
        half(self.dist[x][z] as i64 + self.dist[y][z] as i64 - self.dist[x][y] as i64)
    }

    /// Doubled Gromov product with respect to the basepoint, kept integral
    /// for the hot loops.
    #[inline]
    pub fn gp2_base(&self, x: VertexId, y: VertexId) -> i64 {
        let e = self.basepoint;
        self.dist[x][e] as i64 + self.dist[y][e] as i64 - self.dist[x][y] as i64
    }

    pub fn gromov_product_base(&self, x: VertexId, y: VertexId) -> Rat {
        half(self.gp2_base(x, y))
    }

    /// `U_K(x) = { s : (x.s)_e > K }`.
    pub fn u_k_set(&self, x: VertexId, k: Rat) -> Vec<VertexId> {
        self.vertices()
            .filter(|&s| self.gromov_product_base(x, s) > k)
            .collect()
    }

    /// Distance from a vertex to a vertex set (path), `u64::MAX` on empty.
    pub fn distance_to_set(&self, v: VertexId, set: &[VertexId]) -> u64 {
        set.iter().map(|&s| self.dist[v][s]).min().unwrap_or(u64::MAX)
    }

    /// Measures both hyperbolicity constants.
    pub fn measure_delta(&self, mode: SampleMode) -> DeltaReport {
        let slim = self.measure_delta_slim(mode);
        let four = self.measure_delta_4pt(mode);
        DeltaReport {
            delta_slim: slim.0,
            slim_samples: slim.1,
            delta_4pt: four.0,
            four_point_samples: four.1,
            exhaustive: matches!(mode, SampleMode::Exhaustive),
        }
    }

    fn slimness_defect(&self, x: VertexId, y: VertexId, z: VertexId) -> u64 {
        let sides = [
            self.geodesic(x, y).path,
            self.geodesic(y, z).path,
            self.geodesic(x, z).path,
        ];
        let mut worst = 0u64;
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            for &p in &sides[i] {
                let d1 = self.distance_to_set(p, &sides[j]);
                let d2 = self.distance_to_set(p, &sides[k]);
                worst = worst.max(d1.min(d2));
            }
        }
        worst
    }

    fn measure_delta_slim(&self, mode: SampleMode) -> (Rat, u64) {
        let n = self.vertex_count();
        let mut worst = 0u64;
        let mut count = 0u64;
        match mode {
            SampleMode::Exhaustive => {
                for x in 0..n {
                    for y in (x + 1)..n {
                        for z in (y + 1)..n {
                            worst = worst.max(self.slimness_defect(x, y, z));
                            count += 1;
                        }
                    }
                }
            }
            SampleMode::Sampled { samples, seed } => {
                let mut rng = StdRng::seed_from_u64(seed);
                for _ in 0..samples {
                    let x = rng.gen_range(0..n);
                    let y = rng.gen_range(0..n);
                    let z = rng.gen_range(0..n);
                    worst = worst.max(self.slimness_defect(x, y, z));
                    count += 1;
                }
            }
        }
        (Rat::from_integer(worst as i64), count)
    }

    fn measure_delta_4pt(&self, mode: SampleMode) -> (Rat, u64) {
        let n = self.vertex_count();
        // Doubled defect stays integral.
        let mut worst2 = 0i64;
        let mut count = 0u64;
        let mut consider = |g: &MetricGraph, x: usize, y: usize, z: usize, w: usize| {
            let e = w;
            let gp = |a: usize, b: usize| {
                g.dist[a][e] as i64 + g.dist[b][e] as i64 - g.dist[a][b] as i64
            };
            let d = gp(x, z).min(gp(y, z)) - gp(x, y);
            if d > worst2 {
                worst2 = d;
            }
        };
        match mode {
            SampleMode::Exhaustive => {
                for w in 0..n {
                    for x in 0..n {
                        for y in (x + 1)..n {
                            for z in (y + 1)..n {
                                // The defect is symmetric under permuting
                                // {x,y,z} only partially; try all three
                                // pairings of the unordered triple.
                                consider(self, x, y, z, w);
                                consider(self, x, z, y, w);
                                consider(self, y, z, x, w);
                                count += 1;
                            }
                        }
                    }
                }
            }
            SampleMode::Sampled { samples, seed } => {
                let mut rng = StdRng::seed_from_u64(seed.wrapping_add(1));
                for _ in 0..samples {
                    let x = rng.gen_range(0..n);
                    let y = rng.gen_range(0..n);
                    let z = rng.gen_range(0..n);
                    let w = rng.gen_range(0..n);
                    consider(self, x, y, z, w);
                    count += 1;
                }
            }
        }
        (clamp0(half(worst2)), count)
    }
}

/// How a measurement enumerates its instances.
#[derive(Clone, Copy, Debug)]
pub enum SampleMode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

/// A canonical geodesic: vertex index path plus its length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Geodesic {
    pub path: Vec<VertexId>,
    pub length: u64,
}

impl Geodesic {
    pub fn endpoints(&self) -> (VertexId, VertexId) {
        (self.path[0], *self.path.last().unwrap())
    }
}

/// Measured hyperbolicity constants.
#[derive(Clone, Debug)]
pub struct DeltaReport {
    /// Max slimness defect over (sampled) canonical triangles.
    pub delta_slim: Rat,
    pub slim_samples: u64,
    /// Max clamped four-point defect over (sampled) quadruples.
    pub delta_4pt: Rat,
    pub four_point_samples: u64,
    pub exhaustive: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::rat::rat;

    #[test]
    fn tree_distances_are_word_lengths() {
        let t3 = gen::f2_tree(3);
        assert_eq!(t3.distance_by_name("e", "aba").unwrap(), 3);
        let u = t3.id("ab").unwrap();
        assert_eq!(t3.distance(u, u), 0);
        assert!(t3.id("zz").is_err());
    }

    #[test]
    fn cycle_distance_matches_bfs_oracle() {
        let c8 = gen::cycle(8);
        // Independent oracle: plain BFS over the edge lists.
        let oracle = |g: &MetricGraph, s: usize| -> Vec<u64> {
            let n = g.vertex_count();
            let mut d = vec![u64::MAX; n];
            let mut q = std::collections::VecDeque::new();
            d[s] = 0;
            q.push_back(s);
            while let Some(u) = q.pop_front() {
                for &(v, w) in g.neighbors(u) {
                    assert_eq!(w, 1);
                    if d[v] == u64::MAX {
                        d[v] = d[u] + 1;
                        q.push_back(v);
                    }
                }
            }
            d
        };
        for s in 0..8 {
            let d = oracle(&c8, s);
            for t in 0..8 {
                assert_eq!(c8.distance(s, t), d[t]);
            }
        }
        assert_eq!(c8.distance_by_name("v0", "v5").unwrap(), 3);
    }

    #[test]
    fn geodesics_are_lexicographically_minimal() {
        let t3 = gen::f2_tree(3);
        let g = t3.geodesic(t3.id("e").unwrap(), t3.id("ab").unwrap());
        let names: Vec<&str> = g.path.iter().map(|&v| t3.name(v)).collect();
        assert_eq!(names, vec!["e", "a", "ab"]);
        assert_eq!(g.length, 2);
        let v = t3.id("ab").unwrap();
        assert_eq!(t3.geodesic(v, v).path, vec![v]);

        // C8 antipodal pair: oracle enumerates all shortest paths and takes
        // the lexicographic minimum of the name sequences.
        let c8 = gen::cycle(8);
        let (s, t) = (c8.id("v0").unwrap(), c8.id("v4").unwrap());
        let mut all: Vec<Vec<usize>> = Vec::new();
        fn extend(
            g: &MetricGraph,
            path: &mut Vec<usize>,
            t: usize,
            all: &mut Vec<Vec<usize>>,
        ) {
            let cur = *path.last().unwrap();
            if cur == t {
                all.push(path.clone());
                return;
            }
            for &(x, w) in g.neighbors(cur) {
                if w + g.distance(x, t) == g.distance(cur, t) {
                    path.push(x);
                    extend(g, path, t, all);
                    path.pop();
                }
            }
        }
        extend(&c8, &mut vec![s], t, &mut all);
        assert_eq!(all.len(), 2);
        all.sort();
        assert_eq!(c8.geodesic(s, t).path, all[0]);
        // Deterministic: two calls agree.
        assert_eq!(c8.geodesic(s, t), c8.geodesic(s, t));
    }

    #[test]
    fn gromov_products_on_trees_and_cycles() {
        let t3 = gen::f2_tree(3);
        let e = t3.basepoint();
        let ab = t3.id("ab").unwrap();
        let ab_inv_b = t3.id("aB").unwrap();
        // (x.x)_e = d(e,x)
        assert_eq!(t3.gromov_product(ab, ab, e), rat(2));
        // common prefix depth in a tree
        assert_eq!(t3.gromov_product(ab, ab_inv_b, e), rat(1));

        let c8 = gen::cycle(8);
        let (v2, v6, v0) = (
            c8.id("v2").unwrap(),
            c8.id("v6").unwrap(),
            c8.id("v0").unwrap(),
        );
        // formula oracle: (2 + 2 - 4) / 2 = 0
        assert_eq!(c8.gromov_product(v2, v6, v0), rat(0));
    }

    #[test]
    fn u_k_sets_are_monotone_and_tree_exact() {
        let t3 = gen::f2_tree(3);
        let x = t3.id("aaa").unwrap();
        let u1 = t3.u_k_set(x, rat(1));
        let u2 = t3.u_k_set(x, rat(2));
        for v in &u2 {
            assert!(u1.contains(v));
        }
        // K = 1: exactly the vertices sharing a prefix of depth >= 2 with aaa.
        for v in t3.vertices() {
            let name = t3.name(v);
            let expected = name != "e" && name.starts_with("aa");
            assert_eq!(u1.contains(&v), expected, "vertex {name}");
        }
        // K >= d(e,x) empties the set.
        assert!(t3.u_k_set(x, rat(3)).is_empty());
    }

    #[test]
    fn trees_measure_zero_delta() {
        let t = gen::f2_tree(2);
        let r = t.measure_delta(SampleMode::Exhaustive);
        assert_eq!(r.delta_slim, rat(0));
        assert_eq!(r.delta_4pt, rat(0));
    }

    #[test]
    fn single_vertex_space_is_degenerate_but_valid() {
        let s = MetricGraph::singleton("e");
        assert_eq!(s.distance(0, 0), 0);
        assert_eq!(s.geodesic(0, 0).length, 0);
        let r = s.measure_delta(SampleMode::Exhaustive);
        assert_eq!(r.delta_4pt, rat(0));
    }
}
