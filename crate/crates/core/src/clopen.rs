//! Exact clopen subsets of the space of infinite reduced words.
//!
//! Every clopen subset of the end space of the rank-2 free group is a finite
//! union of cylinders `Cyl(p) = { rays starting with p }`. We store the
//! canonical such union: a sorted antichain of reduced prefixes in which no
//! complete sibling family survives (if all reduced extensions of `q` are
//! present they are merged into `q`). Canonical form makes set equality plain
//! `Vec` equality, which the annulus deduplication relies on.
//!
//! All operations are exact on the infinite space; nothing here truncates.

use crate::free::{inverse_letter, FreeWord, Letter};
use std::fmt;

const RANK: usize = 2;

/// A clopen subset of the boundary, canonical union of cylinders.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ClopenSet {
    /// Sorted antichain of prefixes. `[]` is the empty set, `[e]` everything.
    prefixes: Vec<FreeWord>,
}

impl ClopenSet {
    pub fn empty() -> Self {
        ClopenSet::default()
    }

    pub fn full() -> Self {
        ClopenSet {
            prefixes: vec![FreeWord::identity()],
        }
    }

    pub fn cylinder(prefix: FreeWord) -> Self {
        ClopenSet {
            prefixes: vec![prefix],
        }
    }

    pub fn from_prefixes<I: IntoIterator<Item = FreeWord>>(iter: I) -> Self {
        let mut s = ClopenSet {
            prefixes: iter.into_iter().collect(),
        };
        s.normalize();
        s
    }

    pub fn prefixes(&self) -> &[FreeWord] {
        &self.prefixes
    }

    pub fn is_empty(&self) -> bool {
        self.prefixes.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.prefixes.len() == 1 && self.prefixes[0].is_empty()
    }

    pub fn max_depth(&self) -> usize {
        self.prefixes.iter().map(|p| p.len()).max().unwrap_or(0)
    }

    /// Restores canonical form: drop dominated prefixes, merge complete
    /// sibling families bottom-up.
    fn normalize(&mut self) {
        self.prefixes.sort();
        self.prefixes.dedup();
        // Drop prefixes that already lie inside an ancestor's cylinder.
        let mut kept: Vec<FreeWord> = Vec::with_capacity(self.prefixes.len());
        'outer: for p in std::mem::take(&mut self.prefixes) {
            for q in &kept {
                if q.is_prefix_of(&p) {
                    continue 'outer;
                }
            }
            kept.push(p);
        }
        self.prefixes = kept;
        // Merge complete sibling families until a fixpoint.
        loop {
            let mut merged = false;
            let mut by_len: Vec<usize> = (0..self.prefixes.len()).collect();
            by_len.sort_by_key(|&i| std::cmp::Reverse(self.prefixes[i].len()));
            let mut to_remove: Vec<usize> = Vec::new();
            let mut to_add: Vec<FreeWord> = Vec::new();
            let mut consumed = vec![false; self.prefixes.len()];
            for &i in &by_len {
                if consumed[i] || self.prefixes[i].is_empty() {
                    continue;
                }
                let parent = self.prefixes[i].prefix(self.prefixes[i].len() - 1);
                let family = parent.extensions(RANK);
                let mut members = Vec::with_capacity(family.len());
                let mut all = true;
                for child in &family {
                    match self.prefixes.iter().position(|p| p == child) {
                        Some(j) if !consumed[j] => members.push(j),
                        _ => {
                            all = false;
                            break;
                        }
                    }
                }
                if all {
                    for &j in &members {
                        consumed[j] = true;
                        to_remove.push(j);
                    }
                    to_add.push(parent);
                    merged = true;
                }
            }
            if !merged {
                break;
            }
            to_remove.sort_unstable();
            to_remove.dedup();
            for &j in to_remove.iter().rev() {
                self.prefixes.remove(j);
            }
            self.prefixes.extend(to_add);
            self.prefixes.sort();
            self.prefixes.dedup();
            // A merge can expose a new dominated prefix only via the new
            // parent, and parents of an antichain cannot dominate siblings
            // that were not part of the family, so re-pruning is not needed.
        }
    }

    pub fn union(&self, other: &ClopenSet) -> ClopenSet {
        let mut prefixes = self.prefixes.clone();
        prefixes.extend(other.prefixes.iter().cloned());
        let mut s = ClopenSet { prefixes };
        s.normalize();
        s
    }

    pub fn intersection(&self, other: &ClopenSet) -> ClopenSet {
        let mut prefixes = Vec::new();
        for p in &self.prefixes {
            for q in &other.prefixes {
                if p.is_prefix_of(q) {
                    prefixes.push(q.clone());
                } else if q.is_prefix_of(p) {
                    prefixes.push(p.clone());
                }
            }
        }
        let mut s = ClopenSet { prefixes };
        s.normalize();
        s
    }

    pub fn intersects(&self, other: &ClopenSet) -> bool {
        self.prefixes.iter().any(|p| {
            other
                .prefixes
                .iter()
                .any(|q| p.is_prefix_of(q) || q.is_prefix_of(p))
        })
    }

    pub fn complement(&self) -> ClopenSet {
        let mut prefixes = Vec::new();
        complement_rec(&FreeWord::identity(), &self.prefixes, &mut prefixes);
        let mut s = ClopenSet { prefixes };
        s.normalize();
        s
    }

    /// Does `Cyl(p)` lie inside this set?
    pub fn contains_cylinder(&self, p: &FreeWord) -> bool {
        cyl_subset(p, &self.prefixes)
    }

    pub fn is_subset_of(&self, other: &ClopenSet) -> bool {
        self.prefixes.iter().all(|p| other.contains_cylinder(p))
    }

    /// Exact image under left multiplication by `g`.
    pub fn translate(&self, g: &FreeWord) -> ClopenSet {
        let mut prefixes = Vec::new();
        for p in &self.prefixes {
            translate_cylinder(g, p, &mut prefixes);
        }
        let mut s = ClopenSet { prefixes };
        s.normalize();
        s
    }

    /// Membership of an individual (long enough) reduced word: true when the
    /// word extends one of the prefixes.
    pub fn contains_word(&self, w: &FreeWord) -> bool {
        self.prefixes.iter().any(|p| p.is_prefix_of(w))
    }
}

/// Cylinders of `Cyl(node)` not covered by `cover`, appended to `out`.
fn complement_rec(node: &FreeWord, cover: &[FreeWord], out: &mut Vec<FreeWord>) {
    if cover.iter().any(|p| p.is_prefix_of(node)) {
        return; // fully covered
    }
    if !cover.iter().any(|p| node.is_prefix_of(p)) {
        out.push(node.clone()); // fully outside
        return;
    }
    for child in node.extensions(RANK) {
        complement_rec(&child, cover, out);
    }
}

/// `Cyl(p)` inside the union of `cover`?
fn cyl_subset(p: &FreeWord, cover: &[FreeWord]) -> bool {
    if cover.iter().any(|q| q.is_prefix_of(p)) {
        return true;
    }
    if !cover.iter().any(|q| p.is_prefix_of(q)) {
        return false;
    }
    p.extensions(RANK).iter().all(|c| cyl_subset(c, cover))
}

/// Exact image `g . Cyl(p)` as cylinders, appended to `out`.
///
/// If the cancellation between `g` and `p` stops before `p` is consumed the
/// image is the single cylinder on `reduce(g p)`. If `p` is consumed entirely
/// the image is `g' . (everything not starting with the inverse of the last
/// letter of p)`, handled by recursing on one-letter cylinders.
fn translate_cylinder(g: &FreeWord, p: &FreeWord, out: &mut Vec<FreeWord>) {
    if p.is_empty() {
        out.push(FreeWord::identity());
        return;
    }
    let t = g.cancellation(p);
    if t < p.len() {
        out.push(g.mul(p));
        return;
    }
    // t == p.len() <= g.len(): g swallows all of p.
    let g_rest = g.prefix(g.len() - t);
    let last = p.letters()[p.len() - 1];
    let forbidden = inverse_letter(last);
    for l in 0..(2 * RANK) as Letter {
        if l == forbidden {
            continue;
        }
        translate_cylinder(&g_rest, &FreeWord::letter(l), out);
    }
}

impl fmt::Debug for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self.prefixes.iter().map(|p| format!("{}", p)).collect();
        write!(f, "Cyl[{}]", parts.join(","))
    }
}

impl fmt::Display for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
