//! Letters and freely reduced words.
//!
//! A letter is an index into a rank-`r` symmetric generating set: generator
//! `i` is encoded as `2i`, its inverse as `2i+1`, so `inverse(l) = l ^ 1`.
//! The rank-2 display alphabet is `a, b` with inverses `A, B`.

use crate::error::{Error, Result};
use std::fmt;

pub type Letter = u8;

#[inline]
pub fn inverse_letter(l: Letter) -> Letter {
    l ^ 1
}

/// Display table for the rank-2 alphabet.
const F2_CHARS: [char; 4] = ['a', 'A', 'b', 'B'];

pub fn letter_to_char(l: Letter) -> char {
    F2_CHARS.get(l as usize).copied().unwrap_or('?')
}

pub fn char_to_letter(c: char) -> Result<Letter> {
    match c {
        'a' => Ok(0),
        'A' => Ok(1),
        'b' => Ok(2),
        'B' => Ok(3),
        _ => Err(Error::InvalidLetter(c)),
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FreeWord {
    letters: Vec<Letter>,
}

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord::default()
    }

    pub fn letter(l: Letter) -> Self {
        FreeWord { letters: vec![l] }
    }

    /// Builds from raw letters, reducing adjacent inverse pairs.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in iter {
            if out.last().copied() == Some(inverse_letter(l)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        FreeWord { letters: out }
    }

    /// Accepts only words that are already reduced.
    pub fn from_reduced(letters: Vec<Letter>) -> Result<Self> {
        for i in 1..letters.len() {
            if letters[i] == inverse_letter(letters[i - 1]) {
                return Err(Error::NonReducedWord(i));
            }
        }
        Ok(FreeWord { letters })
    }

    /// Parses a rank-2 word like `abA`. The empty string and `e` denote the
    /// identity.
    pub fn parse_f2(s: &str) -> Result<Self> {
        if s.is_empty() || s == "e" {
            return Ok(FreeWord::identity());
        }
        let mut letters = Vec::with_capacity(s.len());
        for c in s.chars() {
            letters.push(char_to_letter(c)?);
        }
        FreeWord::from_reduced(letters)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    pub fn inverse(&self) -> Self {
        FreeWord {
            letters: self
                .letters
                .iter()
                .rev()
                .map(|&l| inverse_letter(l))
                .collect(),
        }
    }

    /// Concatenation followed by free reduction at the junction.
    pub fn mul(&self, rhs: &FreeWord) -> Self {
        let mut out = self.letters.clone();
        for &l in &rhs.letters {
            if out.last().copied() == Some(inverse_letter(l)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        FreeWord { letters: out }
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = FreeWord::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn push(&self, l: Letter) -> Self {
        let mut out = self.letters.clone();
        if out.last().copied() == Some(inverse_letter(l)) {
            out.pop();
        } else {
            out.push(l);
        }
        FreeWord { letters: out }
    }

    pub fn is_prefix_of(&self, other: &FreeWord) -> bool {
        other.letters.len() >= self.letters.len()
            && other.letters[..self.letters.len()] == self.letters[..]
    }

    pub fn prefix(&self, n: usize) -> FreeWord {
        FreeWord {
            letters: self.letters[..n.min(self.letters.len())].to_vec(),
        }
    }

    /// Length of the longest common prefix.
    pub fn lcp(&self, other: &FreeWord) -> usize {
        self.letters
            .iter()
            .zip(&other.letters)
            .take_while(|(x, y)| x == y)
            .count()
    }

    /// Number of letters cancelled when forming `self * rhs`.
    pub fn cancellation(&self, rhs: &FreeWord) -> usize {
        let max = self.len().min(rhs.len());
        let mut t = 0;
        while t < max && self.letters[self.len() - 1 - t] == inverse_letter(rhs.letters[t]) {
            t += 1;
        }
        t
    }

    /// All reduced one-letter extensions, in letter order. Rank is in letters,
    /// not generators: rank 2 has 4 letters.
    pub fn extensions(&self, rank: usize) -> Vec<FreeWord> {
        let n_letters = 2 * rank;
        let forbidden = self.last().map(inverse_letter);
        (0..n_letters as Letter)
            .filter(|&l| Some(l) != forbidden)
            .map(|l| {
                let mut letters = self.letters.clone();
                letters.push(l);
                FreeWord { letters }
            })
            .collect()
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        for &l in &self.letters {
            write!(f, "{}", letter_to_char(l))?;
        }
        Ok(())
    }
}

impl fmt::Debug for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Enumerates all reduced words of length exactly `n` over `2*rank` letters,
/// in lexicographic letter order.
pub fn reduced_words_of_length(rank: usize, n: usize) -> Vec<FreeWord> {
    let mut out = vec![FreeWord::identity()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * (2 * rank));
        for w in &out {
            for e in w.extensions(rank) {
                next.push(e);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_cancels_inverse_pairs() {
        let w = FreeWord::from_letters([0, 2, 3, 1]); // a b B A
        assert!(w.is_empty());
        let w = FreeWord::parse_f2("abA").unwrap();
        assert_eq!(w.to_string(), "abA");
        assert!(FreeWord::parse_f2("aA").is_err());
    }

    #[test]
    fn multiplication_reduces_at_junction() {
        let u = FreeWord::parse_f2("ab").unwrap();
        let v = FreeWord::parse_f2("Ba").unwrap();
        assert_eq!(u.mul(&v).to_string(), "aa");
        assert_eq!(u.mul(&u.inverse()), FreeWord::identity());
    }

    #[test]
    fn powers_and_cancellation() {
        let g = FreeWord::parse_f2("ab").unwrap();
        assert_eq!(g.pow(3).to_string(), "ababab");
        assert_eq!(g.pow(-1).to_string(), "BA");
        let u = FreeWord::parse_f2("abb").unwrap();
        let v = FreeWord::parse_f2("BBA").unwrap();
        assert_eq!(u.cancellation(&v), 3);
    }

    #[test]
    fn word_counts_match_free_group_growth() {
        // 4 * 3^(n-1) reduced words of length n in rank 2.
        assert_eq!(reduced_words_of_length(2, 1).len(), 4);
        assert_eq!(reduced_words_of_length(2, 2).len(), 12);
        assert_eq!(reduced_words_of_length(2, 3).len(), 36);
        assert_eq!(reduced_words_of_length(2, 4).len(), 108);
    }
}
