//! Truncated symbolic model of the end space of the rank-2 free group.
//!
//! Visible points are the reduced words of length `depth`; each one carries a
//! canonical representative of length `buffer` (the last letter repeated) so
//! that group elements can act without the visible window running dry. Two
//! points are the same point of the model when they agree to `depth`.
//!
//! The gauge metric is `d'(s,t) = exp(-zeta * (s.t))` with `(s.t)` the common
//! prefix length; with `zeta = ln 2` every value is an exact dyadic rational
//! and the whole suite runs tolerance free. The chain metric `rho` is the
//! infimum of `sum d'` over chains inside the model's point set.

use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use crate::free::{reduced_words_of_length, FreeWord};
use crate::rat::Rat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// The exponential gauge parameter.
#[derive(Clone, Debug, PartialEq)]
pub enum Zeta {
    /// `exp(-n ln 2) = 2^-n`, exact.
    Ln2,
    /// Arbitrary positive rational, evaluated to a stated precision.
    Rational(Rat),
}

#[derive(Clone)]
pub struct BoundaryModel {
    depth: usize,
    buffer: usize,
    zeta: Zeta,
    points: Vec<FreeWord>,
}

/// A basis open (and closed) set: all points extending a prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cylinder {
    pub prefix: FreeWord,
}

impl Cylinder {
    pub fn new(prefix: FreeWord) -> Self {
        Cylinder { prefix }
    }

    pub fn as_clopen(&self) -> ClopenSet {
        ClopenSet::cylinder(self.prefix.clone())
    }

    /// `Cyl(p) subset Cyl(q)` iff `q` is a prefix of `p`.
    pub fn is_subset_of(&self, other: &Cylinder) -> bool {
        other.prefix.is_prefix_of(&self.prefix)
    }
}

impl BoundaryModel {
    pub fn new_f2(depth: usize, buffer: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::Precondition("depth must be positive".into()));
        }
        if buffer < depth {
            return Err(Error::BufferTooSmall {
                buffer,
                needed: depth,
                depth,
                word_len: 0,
            });
        }
        Ok(BoundaryModel {
            depth,
            buffer,
            zeta: Zeta::Ln2,
            points: reduced_words_of_length(2, depth),
        })
    }

    pub fn with_zeta(mut self, zeta: Zeta) -> Self {
        self.zeta = zeta;
        self
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn buffer(&self) -> usize {
        self.buffer
    }

    pub fn zeta(&self) -> &Zeta {
        self.zeta_ref()
    }

    fn zeta_ref(&self) -> &Zeta {
        &self.zeta
    }

    /// The visible points, reduced words of length `depth`, in lexicographic
    /// order. `4 * 3^(depth-1)` of them.
    pub fn points(&self) -> &[FreeWord] {
        &self.points
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    pub fn point_index(&self, w: &FreeWord) -> Option<usize> {
        self.points.binary_search(w).ok()
    }

    /// Canonical length-`buffer` representative: the last letter repeated.
    /// Repetition never cancels, so the result stays reduced.
    pub fn representative(&self, visible: &FreeWord) -> FreeWord {
        let mut rep = visible.clone();
        if let Some(last) = visible.last() {
            while rep.len() < self.buffer {
                rep = rep.push(last);
            }
        }
        rep
    }

    /// Truncates a word to the visible depth.
    pub fn visible(&self, w: &FreeWord) -> FreeWord {
        w.prefix(self.depth)
    }

    /// Normalizes an externally supplied point: must be reduced; words
    /// shorter than the depth are extended canonically, longer ones must
    /// stay as given (their visible class is the truncation).
    pub fn point_from_word(&self, w: &FreeWord) -> Result<FreeWord> {
        if w.is_empty() {
            return Err(Error::Precondition(
                "the empty word does not name a boundary point".into(),
            ));
        }
        let mut v = w.clone();
        let last = w.last().unwrap();
        while v.len() < self.depth {
            v = v.push(last);
        }
        Ok(self.visible(&v))
    }

    /// Checks that evaluating a word of length `word_len` keeps at least the
    /// visible depth available.
    pub fn check_buffer(&self, word_len: usize) -> Result<()> {
        if self.buffer < self.depth + word_len {
            return Err(Error::BufferTooSmall {
                buffer: self.buffer,
                needed: self.depth + word_len,
                depth: self.depth,
                word_len,
            });
        }
        Ok(())
    }

    /// Gromov product of two buffered words: common prefix length, saturated
    /// at the shorter length for equal words.
    pub fn gromov_product(&self, s: &FreeWord, t: &FreeWord) -> usize {
        if s == t {
            s.len()
        } else {
            s.lcp(t)
        }
    }

    /// Product of two visible points evaluated on their canonical
    /// representatives; distinct points give the exact common prefix length,
    /// a point with itself saturates at the buffer depth.
    pub fn point_product(&self, s: &FreeWord, t: &FreeWord) -> usize {
        self.gromov_product(&self.representative(s), &self.representative(t))
    }

    /// `d'(s,t) = exp(-zeta * (s.t))`, exact for `zeta = ln 2`.
    pub fn visual_metric(&self, s: &FreeWord, t: &FreeWord) -> BigRational {
        let n = self.point_product(s, t);
        self.gauge(n)
    }

    /// Evaluates `exp(-zeta n)`.
    pub fn gauge(&self, product: usize) -> BigRational {
        match &self.zeta {
            Zeta::Ln2 => {
                let denom = BigInt::one() << product;
                BigRational::new(BigInt::one(), denom)
            }
            Zeta::Rational(z) => {
                let x = BigRational::new(
                    BigInt::from(*z.numer() * product as i64),
                    BigInt::from(*z.denom()),
                );
                exp_neg(&x)
            }
        }
    }

    /// Chain metric: infimum of `sum d'` over chains through the model's
    /// points with at most `max_chain_len` steps. With enough steps this is
    /// the shortest-path distance in the complete graph weighted by `d'`.
    pub fn chain_metric(&self, s: &FreeWord, t: &FreeWord, max_chain_len: usize) -> BigRational {
        assert!(max_chain_len >= 1);
        if self.visible(s) == self.visible(t) {
            return BigRational::zero();
        }
        // Bellman-Ford limited to max_chain_len hops, over visible points
        // plus the two endpoints.
        let mut nodes: Vec<FreeWord> = self.points.to_vec();
        let sv = self.visible(s);
        let tv = self.visible(t);
        let si = nodes.iter().position(|w| *w == sv).unwrap_or_else(|| {
            nodes.push(sv.clone());
            nodes.len() - 1
        });
        let ti = nodes.iter().position(|w| *w == tv).unwrap_or_else(|| {
            nodes.push(tv.clone());
            nodes.len() - 1
        });
        let n = nodes.len();
        let weight: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| self.visual_metric(&nodes[i], &nodes[j]))
                    .collect()
            })
            .collect();
        let mut best: Vec<Option<BigRational>> = vec![None; n];
        best[si] = Some(BigRational::zero());
        let hops = max_chain_len.min(n);
        for _ in 0..hops {
            let mut next = best.clone();
            for i in 0..n {
                if let Some(bi) = best[i].clone() {
                    for j in 0..n {
                        if i == j {
                            continue;
                        }
                        let cand = bi.clone() + weight[i][j].clone();
                        if next[j].as_ref().map_or(true, |cur| cand < *cur) {
                            next[j] = Some(cand);
                        }
                    }
                }
            }
            best = next;
        }
        best[ti].clone().expect("reachable in one hop")
    }

    /// The visible points inside a cylinder.
    pub fn cylinder_members(&self, c: &Cylinder) -> Result<Vec<FreeWord>> {
        if c.prefix.len() > self.depth {
            return Err(Error::PrefixTooDeep(c.prefix.to_string(), self.depth));
        }
        Ok(self
            .points
            .iter()
            .filter(|p| c.prefix.is_prefix_of(p))
            .cloned()
            .collect())
    }

    /// The class cylinder of a visible point, as a clopen set.
    pub fn class_set(&self, p: &FreeWord) -> ClopenSet {
        ClopenSet::cylinder(self.visible(p))
    }
}

/// `exp(-x)` for `x >= 0` as a rational approximation with error below
/// `10^-12`, by Taylor series with an alternating tail bound.
pub fn exp_neg(x: &BigRational) -> BigRational {
    assert!(!x.is_negative());
    let eps = BigRational::new(BigInt::one(), BigInt::from(10u64).pow(13));
    // Range-reduce: exp(-x) = exp(-x/2)^2 keeps the series alternating and
    // quickly convergent.
    if x > &BigRational::one() {
        let half = x / BigInt::from(2);
        let r = exp_neg(&half);
        return &r * &r;
    }
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    let mut k = BigInt::one();
    loop {
        term = -term * x / BigRational::from(k.clone());
        sum += term.clone();
        if term.abs() < eps {
            break;
        }
        k += BigInt::one();
    }
    sum
}

/// Per-pair record of the gauge and chain metric comparison.
#[derive(Clone, Debug)]
pub struct BoundaryPairRecord {
    pub s: FreeWord,
    pub t: FreeWord,
    pub dprime: BigRational,
    pub rho: BigRational,
}

/// Sandwich measurement `d'/2 <= rho <= d'` over point pairs.
#[derive(Clone, Debug)]
pub struct BoundaryMetricReport {
    pub pairs: u64,
    pub violations: Vec<BoundaryPairRecord>,
    /// Minimum of `rho / d'` over the pairs; `1` means the chain metric never
    /// undercuts the gauge.
    pub min_ratio: Option<BigRational>,
}

impl BoundaryModel {
    /// Checks the sandwich inequality on every pair of visible points.
    ///
    /// With the dyadic gauge all weights are `2^-k`, `k <= buffer`, so the
    /// all-pairs chain infimum runs in scaled integers; the general gauge
    /// falls back to rational arithmetic.
    pub fn verify_sandwich(&self) -> BoundaryMetricReport {
        match self.zeta {
            Zeta::Ln2 => self.verify_sandwich_dyadic(),
            Zeta::Rational(_) => self.verify_sandwich_rational(),
        }
    }

    fn verify_sandwich_dyadic(&self) -> BoundaryMetricReport {
        let pts = self.points();
        let n = pts.len();
        let scale_bits = self.buffer as u32;
        assert!(n as u64 * (1u64 << scale_bits) < u64::MAX / 4);
        // weight(i,j) = 2^(buffer - product), exact.
        let mut d: Vec<u64> = vec![0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let p = self.point_product(&pts[i], &pts[j]) as u32;
                let w = 1u64 << (scale_bits - p.min(scale_bits));
                d[i * n + j] = w;
                d[j * n + i] = w;
            }
        }
        for k in 0..n {
            for i in 0..n {
                if i == k {
                    continue;
                }
                let dik = d[i * n + k];
                for j in 0..n {
                    let via = dik + d[k * n + j];
                    if via < d[i * n + j] {
                        d[i * n + j] = via;
                    }
                }
            }
        }
        let mut pairs = 0u64;
        let mut violations = Vec::new();
        let mut min_ratio: Option<BigRational> = None;
        for i in 0..n {
            for j in (i + 1)..n {
                pairs += 1;
                let p = self.point_product(&pts[i], &pts[j]) as u32;
                let gauge = 1u64 << (scale_bits - p.min(scale_bits));
                let rho = d[i * n + j];
                let ratio = BigRational::new(BigInt::from(rho), BigInt::from(gauge));
                if min_ratio.as_ref().map_or(true, |m| ratio < *m) {
                    min_ratio = Some(ratio);
                }
                if rho > gauge || 2 * rho < gauge {
                    violations.push(BoundaryPairRecord {
                        s: pts[i].clone(),
                        t: pts[j].clone(),
                        dprime: self.visual_metric(&pts[i], &pts[j]),
                        rho: BigRational::new(
                            BigInt::from(rho),
                            BigInt::one() << scale_bits as usize,
                        ),
                    });
                }
            }
        }
        BoundaryMetricReport {
            pairs,
            violations,
            min_ratio,
        }
    }

    fn verify_sandwich_rational(&self) -> BoundaryMetricReport {
        let pts = self.points();
        let n = pts.len();
        let mut d: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            BigRational::zero()
                        } else {
                            self.visual_metric(&pts[i], &pts[j])
                        }
                    })
                    .collect()
            })
            .collect();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = &d[i][k] + &d[k][j];
                    if via < d[i][j] {
                        d[i][j] = via;
                    }
                }
            }
        }
        let two = BigRational::from(BigInt::from(2));
        let mut pairs = 0u64;
        let mut violations = Vec::new();
        let mut min_ratio: Option<BigRational> = None;
        for i in 0..n {
            for j in (i + 1)..n {
                pairs += 1;
                let gauge = self.visual_metric(&pts[i], &pts[j]);
                let rho = d[i][j].clone();
                let ratio = &rho / &gauge;
                if min_ratio.as_ref().map_or(true, |m| ratio < *m) {
                    min_ratio = Some(ratio);
                }
                if rho > gauge || &rho * &two < gauge {
                    violations.push(BoundaryPairRecord {
                        s: pts[i].clone(),
                        t: pts[j].clone(),
                        dprime: gauge,
                        rho,
                    });
                }
            }
        }
        BoundaryMetricReport {
            pairs,
            violations,
            min_ratio,
        }
    }
}
