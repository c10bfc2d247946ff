//! Annuli, realized annulus systems, and the crossratio.
//!
//! An annulus is an ordered pair of disjoint closed (here clopen) sets whose
//! union misses something. The system realized from a base annulus `A` is
//! `{ h(A), h(-A) : |h| <= word bound }` after deduplication by set-pair
//! equality; chains count annuli, not group elements. Nesting `A < B` means
//! the plus side of `A` and the minus side of `B` jointly cover everything,
//! which for clopen sets is the exact test `complement(A+) subset B-`.
//!
//! The crossratio `(K|L)` is the longest chain `K < A_1 < ... < A_n < L` in
//! the realized system, computed by longest-path dynamic programming over
//! the nesting digraph restricted to the annuli reachable from the starts
//! and co-reachable from the ends. A reachable cycle in that restriction
//! means the value is infinite and is reported with a witness.

use crate::action::{enumerate_elements, Action, BoundaryAction, Footprint};
use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use crate::free::FreeWord;
use std::collections::HashMap;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Annulus {
    minus: ClopenSet,
    plus: ClopenSet,
}

impl Annulus {
    pub fn new(minus: ClopenSet, plus: ClopenSet) -> Result<Self> {
        if minus.intersects(&plus) {
            return Err(Error::Precondition(
                "annulus sides must be disjoint".into(),
            ));
        }
        if minus.union(&plus).is_full() {
            return Err(Error::Precondition(
                "an annulus must miss part of the space".into(),
            ));
        }
        Ok(Annulus { minus, plus })
    }

    pub fn minus(&self) -> &ClopenSet {
        &self.minus
    }

    pub fn plus(&self) -> &ClopenSet {
        &self.plus
    }

    /// `-A = (A+, A-)`.
    pub fn negate(&self) -> Annulus {
        Annulus {
            minus: self.plus.clone(),
            plus: self.minus.clone(),
        }
    }

    pub fn translate(&self, g: &FreeWord) -> Annulus {
        Annulus {
            minus: self.minus.translate(g),
            plus: self.plus.translate(g),
        }
    }
}

/// `a < b` iff `int a+ u int b- = M`; clopen sets are their own interiors.
pub fn nests(a: &Annulus, b: &Annulus) -> bool {
    a.plus.complement().is_subset_of(&b.minus)
}

/// `K < A` for a set of points.
pub fn set_below(k: &ClopenSet, a: &Annulus) -> bool {
    k.is_subset_of(&a.minus)
}

/// `A < K`.
pub fn set_above(k: &ClopenSet, a: &Annulus) -> bool {
    k.is_subset_of(&a.plus)
}

/// The realized, symmetric, deduplicated system.
pub struct AnnulusSystem {
    base: Annulus,
    annuli: Vec<Annulus>,
    /// Minimal word length of a translate producing each annulus.
    min_len: Vec<usize>,
    word_bound: usize,
    /// Bitset adjacency rows (out-edges) and columns (in-edges).
    adj: Vec<u64>,
    adj_t: Vec<u64>,
    words_per_row: usize,
    /// Topological order of the whole nesting digraph when it is acyclic.
    global_topo: Option<Vec<usize>>,
}

/// A crossratio value with its witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CrossValue {
    Finite(u32),
    /// A nesting cycle reachable between the two sets; the witness lists the
    /// annulus indices on the cycle.
    Infinite(Vec<usize>),
}

#[derive(Clone, Debug)]
pub struct Crossratio {
    pub value: CrossValue,
    /// Realizing chain of annulus indices (empty for value 0 or infinity).
    pub chain: Vec<usize>,
    pub word_bound: usize,
}

impl Crossratio {
    pub fn finite(&self) -> Option<u32> {
        match self.value {
            CrossValue::Finite(n) => Some(n),
            CrossValue::Infinite(_) => None,
        }
    }
}

impl AnnulusSystem {
    /// Realizes `{h(A), h(-A)}` over all enumerated elements of word length
    /// at most `word_bound`.
    pub fn build(base: Annulus, action: &BoundaryAction, word_bound: usize) -> AnnulusSystem {
        AnnulusSystem::build_augmented(base, action, word_bound, &[])
    }

    /// As `build`, but additionally realizes the translates of the given
    /// elements (certificates need specific deep powers without paying for
    /// the whole ball of that radius). The extra translates carry their true
    /// word length, so bound-filtered queries still exclude them.
    pub fn build_augmented(
        base: Annulus,
        action: &BoundaryAction,
        word_bound: usize,
        extra: &[FreeWord],
    ) -> AnnulusSystem {
        let elements = enumerate_elements(&Action::Boundary(action.clone()), word_bound);
        let mut annuli: Vec<Annulus> = Vec::new();
        let mut min_len: Vec<usize> = Vec::new();
        let mut seen: HashMap<Annulus, usize> = HashMap::new();
        let mut declared_bound = word_bound;
        let words: Vec<(FreeWord, usize)> = elements
            .iter()
            .map(|e| {
                let g = match &e.footprint {
                    Footprint::Word(w) => w.clone(),
                    _ => unreachable!("boundary actions act by words"),
                };
                let len = e.len();
                (g, len)
            })
            .chain(extra.iter().map(|g| (g.clone(), g.len())))
            .collect();
        for (g, len) in words {
            declared_bound = declared_bound.max(len);
            for candidate in [base.translate(&g), base.negate().translate(&g)] {
                match seen.get(&candidate) {
                    Some(&idx) => {
                        if len < min_len[idx] {
                            min_len[idx] = len;
                        }
                    }
                    None => {
                        seen.insert(candidate.clone(), annuli.len());
                        min_len.push(len);
                        annuli.push(candidate);
                    }
                }
            }
        }
        let word_bound = declared_bound;
        let n = annuli.len();
        let words_per_row = (n + 63) / 64;
        let co_plus: Vec<ClopenSet> = annuli.iter().map(|a| a.plus.complement()).collect();
        let mut adj = vec![0u64; n * words_per_row];
        let mut adj_t = vec![0u64; n * words_per_row];
        for i in 0..n {
            for j in 0..n {
                if i != j && co_plus[i].is_subset_of(&annuli[j].minus) {
                    adj[i * words_per_row + j / 64] |= 1 << (j % 64);
                    adj_t[j * words_per_row + i / 64] |= 1 << (i % 64);
                }
            }
        }
        let mut sys = AnnulusSystem {
            base,
            annuli,
            min_len,
            word_bound,
            adj,
            adj_t,
            words_per_row,
            global_topo: None,
        };
        sys.global_topo = sys.topo_sort_all();
        sys
    }

    /// Kahn over the full digraph; `None` when a nesting cycle exists.
    fn topo_sort_all(&self) -> Option<Vec<usize>> {
        let n = self.len();
        let mut indeg = vec![0usize; n];
        for j in 0..n {
            let row = &self.adj_t[j * self.words_per_row..(j + 1) * self.words_per_row];
            indeg[j] = row.iter().map(|w| w.count_ones() as usize).sum();
        }
        let mut queue: Vec<usize> = (0..n).filter(|&j| indeg[j] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = queue.pop() {
            order.push(i);
            let row = self.row(i);
            for (b, &word) in row.iter().enumerate() {
                let mut w = word;
                while w != 0 {
                    let j = b * 64 + w.trailing_zeros() as usize;
                    w &= w - 1;
                    indeg[j] -= 1;
                    if indeg[j] == 0 {
                        queue.push(j);
                    }
                }
            }
        }
        if order.len() == n {
            Some(order)
        } else {
            None
        }
    }

    /// Longest-chain DP from `{A : K < A}` over every annulus of word length
    /// at most `len_bound`; `dp[i]` is the annulus count of the longest chain
    /// from a start ending at `i`, zero when unreachable. `None` when the
    /// digraph has a global cycle (fall back to `crossratio_at`).
    pub fn chain_dp(&self, k: &ClopenSet, len_bound: usize) -> Option<Vec<u32>> {
        let order = self.global_topo.as_ref()?;
        let n = self.len();
        let mut dp = vec![0u32; n];
        for i in 0..n {
            if self.min_len[i] <= len_bound && set_below(k, &self.annuli[i]) {
                dp[i] = 1;
            }
        }
        for &i in order {
            if dp[i] == 0 || self.min_len[i] > len_bound {
                continue;
            }
            let row = self.row(i);
            for (b, &word) in row.iter().enumerate() {
                let mut w = word;
                while w != 0 {
                    let j = b * 64 + w.trailing_zeros() as usize;
                    w &= w - 1;
                    if self.min_len[j] <= len_bound && dp[i] + 1 > dp[j] {
                        dp[j] = dp[i] + 1;
                    }
                }
            }
        }
        Some(dp)
    }

    /// `(K|L)` given a precomputed DP for `K`: the best chain ending at an
    /// annulus below `L`.
    pub fn value_against_ends(&self, dp: &[u32], l: &ClopenSet, len_bound: usize) -> u32 {
        let mut best = 0;
        for i in 0..self.len() {
            if dp[i] > best && self.min_len[i] <= len_bound && set_above(l, &self.annuli[i]) {
                best = dp[i];
            }
        }
        best
    }

    pub fn base(&self) -> &Annulus {
        &self.base
    }

    pub fn annuli(&self) -> &[Annulus] {
        &self.annuli
    }

    pub fn len(&self) -> usize {
        self.annuli.len()
    }

    pub fn is_empty(&self) -> bool {
        self.annuli.is_empty()
    }

    pub fn word_bound(&self) -> usize {
        self.word_bound
    }

    pub fn min_len(&self, idx: usize) -> usize {
        self.min_len[idx]
    }

    /// Index of an annulus equal (as a set pair) to the given one.
    pub fn find(&self, a: &Annulus) -> Option<usize> {
        self.annuli.iter().position(|x| x == a)
    }

    #[inline]
    fn edge(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.words_per_row + j / 64] >> (j % 64) & 1 == 1
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.adj[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    /// Annuli with `K < A`, restricted to word length at most `len_bound`.
    pub fn starts(&self, k: &ClopenSet, len_bound: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.min_len[i] <= len_bound && set_below(k, &self.annuli[i]))
            .collect()
    }

    /// Annuli with `A < L`, restricted likewise.
    pub fn ends(&self, l: &ClopenSet, len_bound: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.min_len[i] <= len_bound && set_above(l, &self.annuli[i]))
            .collect()
    }

    /// `(K|L)` at the system's full word bound.
    pub fn crossratio(&self, k: &ClopenSet, l: &ClopenSet) -> Crossratio {
        self.crossratio_at(k, l, self.word_bound)
    }

    /// `(K|L)` using only annuli realized by words of length at most
    /// `len_bound`; monotone nondecreasing in the bound.
    pub fn crossratio_at(&self, k: &ClopenSet, l: &ClopenSet, len_bound: usize) -> Crossratio {
        let starts = self.starts(k, len_bound);
        let ends = self.ends(l, len_bound);
        if starts.is_empty() || ends.is_empty() {
            return Crossratio {
                value: CrossValue::Finite(0),
                chain: Vec::new(),
                word_bound: len_bound,
            };
        }
        let n = self.len();
        let wpr = self.words_per_row;
        let mut active = vec![0u64; wpr];
        for i in 0..n {
            if self.min_len[i] <= len_bound {
                active[i / 64] |= 1 << (i % 64);
            }
        }
        let sweep = |rows: &[u64], seeds: &[usize]| -> Vec<u64> {
            let mut seen = vec![0u64; wpr];
            for &s in seeds {
                seen[s / 64] |= 1 << (s % 64);
            }
            let mut stack: Vec<usize> = seeds.to_vec();
            while let Some(i) = stack.pop() {
                let row = &rows[i * wpr..(i + 1) * wpr];
                for b in 0..wpr {
                    let mut fresh = row[b] & active[b] & !seen[b];
                    seen[b] |= fresh;
                    while fresh != 0 {
                        stack.push(b * 64 + fresh.trailing_zeros() as usize);
                        fresh &= fresh - 1;
                    }
                }
            }
            seen
        };
        let reach = sweep(&self.adj, &starts);
        let coreach = sweep(&self.adj_t, &ends);
        let admissible: Vec<usize> = (0..n)
            .filter(|&i| (reach[i / 64] & coreach[i / 64]) >> (i % 64) & 1 == 1)
            .collect();
        if admissible.is_empty() {
            return Crossratio {
                value: CrossValue::Finite(0),
                chain: Vec::new(),
                word_bound: len_bound,
            };
        }
        // Kahn topological sort of the admissible subgraph; leftovers are a
        // reachable cycle.
        let mut pos = vec![usize::MAX; n];
        for (p, &i) in admissible.iter().enumerate() {
            pos[i] = p;
        }
        let m = admissible.len();
        let mut indeg = vec![0usize; m];
        for &i in &admissible {
            for &j in &admissible {
                if self.edge(i, j) {
                    indeg[pos[j]] += 1;
                }
            }
        }
        let mut order = Vec::with_capacity(m);
        let mut queue: Vec<usize> = (0..m).filter(|&p| indeg[p] == 0).collect();
        while let Some(p) = queue.pop() {
            order.push(p);
            let i = admissible[p];
            for &j in &admissible {
                if self.edge(i, j) {
                    let q = pos[j];
                    indeg[q] -= 1;
                    if indeg[q] == 0 {
                        queue.push(q);
                    }
                }
            }
        }
        if order.len() < m {
            // Extract one cycle among the leftover nodes for the witness.
            let leftover: Vec<usize> = (0..m)
                .filter(|p| !order.contains(p))
                .map(|p| admissible[p])
                .collect();
            let cycle = self.extract_cycle(&leftover);
            return Crossratio {
                value: CrossValue::Infinite(cycle),
                chain: Vec::new(),
                word_bound: len_bound,
            };
        }
        // Longest path over the topological order. dp counts annuli on a
        // chain from some start, so starts begin at 1.
        let mut dp = vec![0u32; m];
        let mut parent = vec![usize::MAX; m];
        for &s in &starts {
            if pos[s] != usize::MAX {
                dp[pos[s]] = 1;
            }
        }
        for &p in &order {
            if dp[p] == 0 {
                continue;
            }
            let i = admissible[p];
            for &j in &admissible {
                if self.edge(i, j) {
                    let q = pos[j];
                    if dp[p] + 1 > dp[q] {
                        dp[q] = dp[p] + 1;
                        parent[q] = p;
                    }
                }
            }
        }
        let mut best = 0u32;
        let mut best_p = usize::MAX;
        for &e in &ends {
            if let Some(p) = admissible.iter().position(|&i| i == e) {
                if dp[p] > best {
                    best = dp[p];
                    best_p = p;
                }
            }
        }
        let mut chain = Vec::new();
        let mut cur = best_p;
        while cur != usize::MAX {
            chain.push(admissible[cur]);
            cur = parent[cur];
        }
        chain.reverse();
        Crossratio {
            value: CrossValue::Finite(best),
            chain,
            word_bound: len_bound,
        }
    }

    fn extract_cycle(&self, nodes: &[usize]) -> Vec<usize> {
        // After Kahn fails every leftover node keeps an incoming edge from a
        // leftover node, so walking predecessors must revisit a node.
        let start = nodes[0];
        let mut path = vec![start];
        let mut cur = start;
        loop {
            let prev = nodes
                .iter()
                .copied()
                .find(|&i| self.edge(i, cur))
                .expect("leftover nodes keep an in-edge inside the leftover set");
            if let Some(pos) = path.iter().position(|&x| x == prev) {
                let mut cycle = path[pos..].to_vec();
                cycle.reverse();
                return cycle;
            }
            path.push(prev);
            cur = prev;
        }
    }

    /// Nesting is equivariant: `a < b` iff `ha < hb`, exactly.
    pub fn check_nest_equivariance(&self, h: &FreeWord, pairs: &[(usize, usize)]) -> bool {
        pairs.iter().all(|&(i, j)| {
            let a = self.annuli[i].translate(h);
            let b = self.annuli[j].translate(h);
            nests(&self.annuli[i], &self.annuli[j]) == nests(&a, &b)
        })
    }
}

/// Brute-force chain search, used as the oracle against the DP in tests:
/// depth-first enumeration of all nesting chains from a start annulus.
pub fn crossratio_bruteforce(
    system: &AnnulusSystem,
    k: &ClopenSet,
    l: &ClopenSet,
    len_bound: usize,
    fuel: &mut u64,
) -> Option<u32> {
    let n = system.len();
    let active: Vec<usize> = (0..n)
        .filter(|&i| system.min_len(i) <= len_bound)
        .collect();
    let starts: Vec<usize> = active
        .iter()
        .copied()
        .filter(|&i| set_below(k, &system.annuli()[i]))
        .collect();
    fn dfs(
        system: &AnnulusSystem,
        l: &ClopenSet,
        active: &[usize],
        cur: usize,
        visited: &mut Vec<usize>,
        fuel: &mut u64,
    ) -> Option<u32> {
        if *fuel == 0 {
            return None;
        }
        *fuel -= 1;
        let mut best = if set_above(l, &system.annuli()[cur]) {
            Some(visited.len() as u32)
        } else {
            Some(0)
        };
        for &j in active {
            if visited.contains(&j) {
                continue;
            }
            if nests(&system.annuli()[cur], &system.annuli()[j]) {
                visited.push(j);
                let sub = dfs(system, l, active, j, visited, fuel)?;
                visited.pop();
                best = Some(best?.max(sub));
            }
        }
        best
    }
    let mut best = 0u32;
    for &s in &starts {
        let mut visited = vec![s];
        best = best.max(dfs(system, l, &active, s, &mut visited, fuel)?);
    }
    Some(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::BoundaryAction;

    fn w(s: &str) -> FreeWord {
        FreeWord::parse_f2(s).unwrap()
    }

    fn cyl(s: &str) -> ClopenSet {
        ClopenSet::cylinder(w(s))
    }

    fn base_annulus() -> Annulus {
        Annulus::new(cyl("A"), cyl("a")).unwrap()
    }

    #[test]
    fn annulus_invariants_are_enforced() {
        assert!(Annulus::new(cyl("a"), cyl("ab")).is_err());
        assert!(Annulus::new(cyl("a"), cyl("a").complement()).is_err());
        assert!(Annulus::new(cyl("a"), cyl("b")).is_ok());
    }

    #[test]
    fn translate_nesting_matches_the_set_oracle() {
        // a . A- = a . Cyl(A) = complement of Cyl(a), so A+ u (aA)- = M.
        let a = base_annulus();
        let ga = a.translate(&w("a"));
        assert_eq!(*ga.minus(), cyl("a").complement());
        assert!(nests(&a, &ga));
        // A < A is impossible.
        assert!(!nests(&a, &a));
        // singleton below: {x} < A iff x's cylinder sits in A-.
        assert!(set_below(&cyl("AA"), &a));
        assert!(!set_below(&cyl("b"), &a));
    }

    #[test]
    fn system_dedups_by_set_pair() {
        let action = BoundaryAction::standard_f2();
        let sys = AnnulusSystem::build(base_annulus(), &action, 2);
        // Dedup: the set of annuli has no duplicates.
        for i in 0..sys.len() {
            for j in (i + 1)..sys.len() {
                assert_ne!(sys.annuli()[i], sys.annuli()[j]);
            }
        }
        // The base and its negation are present at length zero.
        assert_eq!(sys.find(&base_annulus()).map(|i| sys.min_len(i)), Some(0));
        assert_eq!(
            sys.find(&base_annulus().negate()).map(|i| sys.min_len(i)),
            Some(0)
        );
    }

    #[test]
    fn power_chain_gives_linear_crossratio_growth() {
        let action = BoundaryAction::standard_f2();
        let sys = AnnulusSystem::build(base_annulus(), &action, 6);
        // K = {a^-inf, z}, L = {a^n z, a^n . a^inf} with z = b^inf; the
        // attracting end is represented by the exact image of its depth-4
        // neighborhood so that it sits inside the deep rungs.
        let d = 4usize;
        let x = cyl(&"A".repeat(d));
        let y = cyl(&"a".repeat(d));
        let z = cyl(&"b".repeat(d));
        for n in 2..=6u32 {
            let gn = w("a").pow(n as i64);
            let k = x.union(&z);
            let l = z.translate(&gn).union(&y.translate(&gn));
            let cr = sys.crossratio(&k, &l);
            let value = cr.finite().expect("no cycles in the standard system");
            assert!(
                value >= n - 1,
                "n = {n}: value {value} below the chain bound"
            );
        }
    }

    #[test]
    fn dp_matches_bruteforce_oracle() {
        let action = BoundaryAction::standard_f2();
        let sys = AnnulusSystem::build(base_annulus(), &action, 3);
        let sets = [
            cyl("AA").union(&cyl("bb")),
            cyl("aa").union(&cyl("ba")),
            cyl("bb"),
            cyl("BB").union(&cyl("Ab")),
            cyl("aaa"),
        ];
        let mut fuel = 50_000_000u64;
        for k in &sets {
            for l in &sets {
                let dp = sys.crossratio(k, l).finite().unwrap();
                let brute = crossratio_bruteforce(&sys, k, l, 3, &mut fuel)
                    .expect("oracle fuel exhausted");
                assert_eq!(dp, brute, "K={k:?} L={l:?}");
            }
        }
    }

    #[test]
    fn axis_versus_axis_crossratio_is_zero() {
        // ({b-end, B-end} | {a-end, A-end}) at word bound 4: a chain would
        // need an annulus whose minus side swallows both b-cylinders and
        // whose plus side swallows both a-cylinders; translates of the
        // generator annulus have a co-cylinder on at most one side, so no
        // chain starts. Frozen against the brute-force search.
        let action = BoundaryAction::standard_f2();
        let sys = AnnulusSystem::build(base_annulus(), &action, 4);
        let k = cyl("bbbb").union(&cyl("BBBB"));
        let l = cyl("aaaa").union(&cyl("AAAA"));
        let dp = sys.crossratio(&k, &l).finite().unwrap();
        let mut fuel = 100_000_000u64;
        let brute = crossratio_bruteforce(&sys, &k, &l, 4, &mut fuel).unwrap();
        assert_eq!(dp, brute);
        assert_eq!(dp, 0);
    }

    #[test]
    fn crossratio_is_monotone_in_the_word_bound() {
        let action = BoundaryAction::standard_f2();
        let sys = AnnulusSystem::build(base_annulus(), &action, 5);
        let k = cyl("AA").union(&cyl("bb"));
        let l = cyl("aa");
        let mut prev = 0;
        for bound in 0..=5 {
            let v = sys.crossratio_at(&k, &l, bound).finite().unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn crossratio_is_symmetric_in_the_symmetric_system() {
        let action = BoundaryAction::standard_f2();
        let sys = AnnulusSystem::build(base_annulus(), &action, 4);
        let pairs = [
            (cyl("AA").union(&cyl("b")), cyl("aa")),
            (cyl("ab"), cyl("Ba").union(&cyl("bA"))),
        ];
        for (k, l) in &pairs {
            assert_eq!(
                sys.crossratio(k, l).finite(),
                sys.crossratio(l, k).finite()
            );
        }
    }

    #[test]
    fn no_chain_starts_when_k_misses_every_minus_side() {
        let action = BoundaryAction::standard_f2();
        let sys = AnnulusSystem::build(base_annulus(), &action, 2);
        // The full space is contained in no annulus side.
        let cr = sys.crossratio(&ClopenSet::full(), &cyl("a"));
        assert_eq!(cr.finite(), Some(0));
    }

    #[test]
    fn nesting_is_equivariant() {
        let action = BoundaryAction::standard_f2();
        let sys = AnnulusSystem::build(base_annulus(), &action, 3);
        let pairs: Vec<(usize, usize)> = (0..sys.len().min(12))
            .flat_map(|i| (0..sys.len().min(12)).map(move |j| (i, j)))
            .collect();
        for h in ["a", "b", "Ab", "ba"] {
            assert!(sys.check_nest_equivariance(&w(h), &pairs));
        }
    }
}
