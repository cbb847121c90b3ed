//! Words over the vertices of a Dynkin diagram, occurrence indexing, leftmost
//! subexpressions and the starred periodic word built from a reduced word of `w0`.
//!
//! Positions are 0-based throughout the Rust API; colors are the Dynkin labels `1..=rank`.
//! Serialized forms use 1-based positions.

use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rootdata::{demazure, DynkinData, WeylElement};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word {
    dynkin: Arc<DynkinData>,
    letters: Vec<usize>,
    /// 1-based occurrence number of each position within its color.
    occurrence: Vec<usize>,
    /// For each color, the positions carrying it in increasing order.
    by_color: Vec<Vec<usize>>,
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Word", 2)?;
        st.serialize_field("dynkin", &*self.dynkin)?;
        st.serialize_field("letters", &self.letters)?;
        st.end()
    }
}

/// Which endpoint fixes the color of an interval vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalSide {
    /// `β[a,b}`: color of the left endpoint.
    Left,
    /// `β{a,b]`: color of the right endpoint.
    Right,
}

impl Word {
    pub fn new(dynkin: &Arc<DynkinData>, letters: Vec<usize>) -> Result<Self> {
        dynkin.check_word(&letters)?;
        let mut by_color = vec![Vec::new(); dynkin.rank()];
        let mut occurrence = Vec::with_capacity(letters.len());
        for (k, &c) in letters.iter().enumerate() {
            by_color[c - 1].push(k);
            occurrence.push(by_color[c - 1].len());
        }
        Ok(Word { dynkin: Arc::clone(dynkin), letters, occurrence, by_color })
    }

    pub fn dynkin(&self) -> &Arc<DynkinData> {
        &self.dynkin
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn color(&self, k: usize) -> usize {
        self.letters[k]
    }

    /// `n_j`, the number of letters of color `j`.
    pub fn count(&self, color: usize) -> usize {
        self.by_color[color - 1].len()
    }

    /// Positions of the given color, increasing.
    pub fn positions_of(&self, color: usize) -> &[usize] {
        &self.by_color[color - 1]
    }

    fn check_position(&self, k: usize) -> Result<()> {
        if k >= self.len() {
            return Err(Error::IndexOutOfRange { what: "position", index: k, limit: self.len() });
        }
        Ok(())
    }

    /// `i_k = (j, n)`.
    pub fn occurrence(&self, k: usize) -> Result<(usize, usize)> {
        self.check_position(k)?;
        Ok((self.letters[k], self.occurrence[k]))
    }

    /// The position of the `n`-th (1-based) occurrence of `color`.
    pub fn position(&self, color: usize, n: usize) -> Result<usize> {
        self.dynkin.check_letter(0, color)?;
        let list = &self.by_color[color - 1];
        if n == 0 || n > list.len() {
            return Err(Error::IndexOutOfRange { what: "occurrence", index: n, limit: list.len() });
        }
        Ok(list[n - 1])
    }

    /// `k^+`: next position of the same color.
    pub fn next_same(&self, k: usize) -> Option<usize> {
        let list = &self.by_color[self.letters[k] - 1];
        list.get(self.occurrence[k]).copied()
    }

    /// `k^-`: previous position of the same color.
    pub fn prev_same(&self, k: usize) -> Option<usize> {
        let n = self.occurrence[k];
        (n >= 2).then(|| self.by_color[self.letters[k] - 1][n - 2])
    }

    /// `k^max`: last position of the same color.
    pub fn last_same(&self, k: usize) -> usize {
        *self.by_color[self.letters[k] - 1].last().expect("color of k occurs")
    }

    /// `k^min`: first position of the same color.
    pub fn first_same(&self, k: usize) -> usize {
        self.by_color[self.letters[k] - 1][0]
    }

    /// `k(j)^+`: smallest position of color `j` strictly after `k`.
    pub fn next_of_color(&self, k: usize, color: usize) -> Option<usize> {
        self.by_color[color - 1].iter().copied().find(|&p| p > k)
    }

    /// `k(j)^-`: largest position of color `j` strictly before `k`.
    pub fn prev_of_color(&self, k: usize, color: usize) -> Option<usize> {
        self.by_color[color - 1].iter().rev().copied().find(|&p| p < k)
    }

    /// Indicator of positions in `[a, b]` whose color is that of `a` (left) or `b` (right).
    pub fn interval_vector(&self, a: usize, b: usize, side: IntervalSide) -> Result<Vec<u64>> {
        self.check_position(b)?;
        if a > b {
            return Err(Error::IndexOutOfRange { what: "interval start", index: a, limit: b });
        }
        let color = match side {
            IntervalSide::Left => self.letters[a],
            IntervalSide::Right => self.letters[b],
        };
        Ok((0..self.len()).map(|p| u64::from((a..=b).contains(&p) && self.letters[p] == color)).collect())
    }

    /// `β{1,k]`, the parameter of the initial cluster variable at `k`.
    pub fn d_vector(&self, k: usize) -> Result<Vec<u64>> {
        self.interval_vector(0, k, IntervalSide::Right)
    }

    pub fn demazure(&self) -> (WeylElement, Vec<usize>) {
        demazure(&self.dynkin, &self.letters).expect("letters already validated")
    }
}

/// Bookkeeping for a subexpression `β_v = (i_{p_1}, …, i_{p_m})` of a word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subexpression {
    pub v_word: Vec<usize>,
    pub positions: Vec<usize>,
    /// `a_k`: letters of `β_v` with the color of `p_k` at positions up to `p_k`.
    pub a: Vec<usize>,
    /// `b_k`: letters outside `β_v` with the color of `p_k` at positions up to `p_k`.
    pub b: Vec<usize>,
    /// `alpha[k][j-1]`: letters of color `j` among the first `k` letters of `β_v`, `k = 0..=m`.
    pub alpha: Vec<Vec<usize>>,
}

impl Serialize for Subexpression {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Subexpression", 5)?;
        st.serialize_field("v_word", &self.v_word)?;
        let one_based: Vec<usize> = self.positions.iter().map(|p| p + 1).collect();
        st.serialize_field("positions", &one_based)?;
        st.serialize_field("a", &self.a)?;
        st.serialize_field("b", &self.b)?;
        st.serialize_field("alpha", &self.alpha)?;
        st.end()
    }
}

impl Subexpression {
    /// Computes `a`, `b` and `alpha` for an increasing sequence of positions.
    pub fn from_positions(word: &Word, positions: Vec<usize>) -> Result<Self> {
        if positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("positions must be strictly increasing".into()));
        }
        if let Some(&last) = positions.last() {
            word.check_position(last)?;
        }
        let rank = word.dynkin.rank();
        let v_word: Vec<usize> = positions.iter().map(|&p| word.letters[p]).collect();
        let mut alpha = vec![vec![0; rank]];
        let mut a = Vec::with_capacity(positions.len());
        let mut b = Vec::with_capacity(positions.len());
        for &p in &positions {
            let color = word.letters[p];
            let mut row = alpha.last().expect("alpha starts with a zero row").clone();
            row[color - 1] += 1;
            let taken = row[color - 1];
            a.push(taken);
            b.push(word.occurrence[p] - taken);
            alpha.push(row);
        }
        Ok(Subexpression { v_word, positions, a, b, alpha })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// `α(k, j)`.
    pub fn alpha(&self, k: usize, color: usize) -> usize {
        self.alpha[k][color - 1]
    }

    pub fn contains(&self, position: usize) -> bool {
        self.positions.binary_search(&position).is_ok()
    }
}

fn not_spellable(word: &Word, pattern: &[usize]) -> Error {
    Error::NotSpellable { pattern: pattern.to_vec(), demazure: word.demazure().1 }
}

/// Greedy leftmost occurrence of a fixed reduced word `v_word` as a subword.
pub fn leftmost_subexpression(word: &Word, v_word: &[usize]) -> Result<Subexpression> {
    word.dynkin.check_word(v_word)?;
    if WeylElement::from_word(&word.dynkin, v_word)?.length() != v_word.len() {
        return Err(Error::NotReduced { word: v_word.to_vec() });
    }
    let mut positions = Vec::with_capacity(v_word.len());
    let mut start = 0;
    for &letter in v_word {
        let p = (start..word.len())
            .find(|&p| word.letters[p] == letter)
            .ok_or_else(|| not_spellable(word, v_word))?;
        positions.push(p);
        start = p + 1;
    }
    Subexpression::from_positions(word, positions)
}

/// The lexicographically smallest position sequence spelling some reduced word of `v`.
///
/// This is the greedy match of whichever reduced word of `v` matches earliest, and exists
/// exactly when `v ≤ δ(word)`.
pub fn leftmost_for_element(word: &Word, v: &WeylElement) -> Result<Subexpression> {
    let dynkin = &word.dynkin;
    let fail = || not_spellable(word, &v.reduced_word());
    if !v.bruhat_leq(&word.demazure().0) {
        return Err(fail());
    }
    // suffix_demazure[k] = δ(i_k ⋯ i_r).
    let mut suffix_demazure = vec![WeylElement::identity(dynkin); word.len() + 1];
    for k in (0..word.len()).rev() {
        let next = &suffix_demazure[k + 1];
        let candidate = next.left_mul_simple(word.letters[k]);
        suffix_demazure[k] = if candidate.length() > next.length() { candidate } else { next.clone() };
    }
    let mut remainder = v.clone();
    let mut positions = Vec::with_capacity(v.length());
    for k in 0..word.len() {
        if remainder.is_identity() {
            break;
        }
        let s = word.letters[k];
        if !remainder.has_left_descent(s) {
            continue;
        }
        let rest = remainder.left_mul_simple(s);
        if rest.bruhat_leq(&suffix_demazure[k + 1]) {
            positions.push(k);
            remainder = rest;
        }
    }
    if !remainder.is_identity() {
        return Err(Error::Invariant("lexicographic search failed below the Demazure product".into()));
    }
    Subexpression::from_positions(word, positions)
}

/// Every increasing position sequence whose letters are exactly `pattern`.
pub fn all_spellings(word: &Word, pattern: &[usize]) -> Vec<Vec<usize>> {
    fn rec(word: &Word, pattern: &[usize], start: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let Some((&first, rest)) = pattern.split_first() else {
            out.push(acc.clone());
            return;
        };
        for p in start..word.len() {
            if word.letters[p] == first && word.len() - p > rest.len() {
                acc.push(p);
                rec(word, rest, p + 1, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(word, pattern, 0, &mut Vec::new(), &mut out);
    out
}

/// Every increasing position sequence spelling some reduced word of `v`, in lexicographic order.
pub fn all_reduced_spellings(word: &Word, v: &WeylElement) -> Vec<Vec<usize>> {
    fn rec(word: &Word, rest: &WeylElement, start: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_identity() {
            out.push(acc.clone());
            return;
        }
        for p in start..word.len() {
            let s = word.letters[p];
            if rest.has_left_descent(s) {
                acc.push(p);
                rec(word, &rest.left_mul_simple(s), p + 1, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(word, v, 0, &mut Vec::new(), &mut out);
    out
}

/// `β_v` extended by the deterministic reduced word of `v^{-1} w0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DotWord {
    dynkin: Arc<DynkinData>,
    base: Vec<usize>,
}

impl DotWord {
    pub fn extend_to_w0(dynkin: &Arc<DynkinData>, v_word: &[usize]) -> Result<Self> {
        let v = WeylElement::from_word(dynkin, v_word)?;
        if v.length() != v_word.len() {
            return Err(Error::NotReduced { word: v_word.to_vec() });
        }
        let complement = v.inverse().mul(&WeylElement::longest(dynkin));
        let mut base = v_word.to_vec();
        base.extend(complement.reduced_word());
        Ok(DotWord { dynkin: Arc::clone(dynkin), base })
    }

    pub fn base(&self) -> &[usize] {
        &self.base
    }

    /// The first `len` letters of `(j_1,…,j_ℓ, j_1^*,…,j_ℓ^*, j_1,…)`.
    pub fn window(&self, len: usize) -> Vec<usize> {
        let period = self.base.len();
        if period == 0 {
            return Vec::new();
        }
        (0..len)
            .map(|p| {
                let letter = self.base[p % period];
                if (p / period) % 2 == 1 {
                    self.dynkin.star(letter)
                } else {
                    letter
                }
            })
            .collect()
    }
}
