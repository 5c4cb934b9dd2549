//! Words in the unital free semigroup on `n` generators and k-tuples of them.
//!
//! Letters are 1-based (`g_1 .. g_n`); the empty word is the identity.
//! The canonical order is graded-lexicographic: shorter words first, then
//! lexicographic by letters.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<usize>) -> Self {
        Word(letters)
    }

    pub fn letter(j: usize) -> Self {
        Word(vec![j])
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when every letter lies in `1..=n`.
    pub fn fits_arity(&self, n: usize) -> bool {
        self.0.iter().all(|&l| l >= 1 && l <= n)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn reverse(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn prepend(&self, j: usize) -> Word {
        let mut v = Vec::with_capacity(self.len() + 1);
        v.push(j);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    pub fn append(&self, j: usize) -> Word {
        let mut v = self.0.clone();
        v.push(j);
        Word(v)
    }

    /// Position of this word in `enumerate_words(n, _)`.
    pub fn graded_index(&self, n: usize) -> usize {
        let mut rank = 0usize;
        for &l in &self.0 {
            rank = rank * n + (l - 1);
        }
        words_below_length(n, self.len()) + rank
    }
}

/// Number of words of length strictly less than `len`.
pub fn words_below_length(n: usize, len: usize) -> usize {
    if n == 1 {
        len
    } else {
        (n.pow(len as u32) - 1) / (n - 1)
    }
}

/// Number of words of length at most `d`.
pub fn word_count(n: usize, d: usize) -> usize {
    words_below_length(n, d + 1)
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        let s: Vec<String> = self.0.iter().map(|l| format!("g{l}")).collect();
        write!(f, "{}", s.join(""))
    }
}

impl From<Vec<usize>> for Word {
    fn from(v: Vec<usize>) -> Self {
        Word(v)
    }
}

/// All words of length `<= d` over `n` letters in graded order.
pub fn enumerate_words(n: usize, d: usize) -> Vec<Word> {
    assert!(n >= 1, "arity must be positive");
    let mut out = Vec::with_capacity(word_count(n, d));
    out.push(Word::empty());
    let mut start = 0;
    for _ in 0..d {
        let end = out.len();
        for idx in start..end {
            for j in 1..=n {
                let w = out[idx].append(j);
                out.push(w);
            }
        }
        start = end;
    }
    out
}

pub fn reverse(w: &Word) -> Word {
    w.reverse()
}

/// Ordered splittings of `w` into `p` nonempty consecutive blocks.
pub fn factorizations(w: &Word, p: usize) -> Vec<Vec<Word>> {
    let len = w.len();
    let mut out = Vec::new();
    if p == 0 || p > len {
        return out;
    }
    let mut cuts = Vec::with_capacity(p + 1);
    fn rec(w: &Word, p: usize, cuts: &mut Vec<usize>, out: &mut Vec<Vec<Word>>) {
        let last = *cuts.last().unwrap();
        let placed = cuts.len() - 1;
        if placed == p - 1 {
            cuts.push(w.len());
            out.push(
                cuts.windows(2)
                    .map(|c| Word(w.0[c[0]..c[1]].to_vec()))
                    .collect(),
            );
            cuts.pop();
            return;
        }
        let remaining = p - 1 - placed;
        for c in last + 1..=w.len() - remaining {
            cuts.push(c);
            rec(w, p, cuts, out);
            cuts.pop();
        }
    }
    cuts.push(0);
    rec(w, p, &mut cuts, &mut out);
    out
}

/// A k-tuple of words, one per factor.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiWord(pub Vec<Word>);

impl MultiWord {
    pub fn identity(k: usize) -> Self {
        MultiWord(vec![Word::empty(); k])
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn parts(&self) -> &[Word] {
        &self.0
    }

    pub fn total_degree(&self) -> usize {
        self.0.iter().map(Word::len).sum()
    }

    pub fn fits(&self, arities: &[usize]) -> bool {
        self.0.len() == arities.len() && self.0.iter().zip(arities).all(|(w, &n)| w.fits_arity(n))
    }
}

/// All multi-words with `|parts[i]| <= d[i]`, first factor major.
pub fn enumerate_multiwords(arities: &[usize], d: &[usize]) -> Vec<MultiWord> {
    let factor: Vec<Vec<Word>> = arities.iter().zip(d).map(|(&n, &di)| enumerate_words(n, di)).collect();
    let mut out = vec![MultiWord(Vec::new())];
    for ws in &factor {
        let mut next = Vec::with_capacity(out.len() * ws.len());
        for mw in &out {
            for w in ws {
                let mut parts = mw.0.clone();
                parts.push(w.clone());
                next.push(MultiWord(parts));
            }
        }
        out = next;
    }
    out
}
