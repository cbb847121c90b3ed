//! Simply-laced root data and Weyl group arithmetic.
//!
//! Weyl group elements are stored as integer matrices acting on the simple-root basis,
//! so equality is plain matrix equality and no normal form is needed.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num::{BigInt, BigRational, One, Zero};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Series {
    A,
    D,
    E,
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Series::A => "A",
            Series::D => "D",
            Series::E => "E",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Series {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Series::A),
            "D" | "d" => Ok(Series::D),
            "E" | "e" => Ok(Series::E),
            other => Err(Error::UnsupportedType { series: other.to_string(), rank: 0 }),
        }
    }
}

/// Cartan data of a simply-laced Dynkin diagram with vertices labelled `1..=rank`.
///
/// Labels follow Bourbaki: `A_n` is a chain, `D_n` forks at `n-2`, and in `E_n` the vertex 2
/// hangs off 4 while `1-3-4-5-...` is the long chain.
#[derive(Debug, Clone)]
pub struct DynkinData {
    series: Series,
    rank: usize,
    cartan: Vec<Vec<i64>>,
    cartan_inverse: Vec<Vec<BigRational>>,
    positive_roots: Vec<Vec<i64>>,
    w0_word: Vec<usize>,
    star: Vec<usize>,
}

impl PartialEq for DynkinData {
    fn eq(&self, other: &Self) -> bool {
        self.series == other.series && self.rank == other.rank
    }
}

impl Eq for DynkinData {}

impl Serialize for DynkinData {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("DynkinData", 2)?;
        st.serialize_field("series", &self.series)?;
        st.serialize_field("rank", &self.rank)?;
        st.end()
    }
}

fn edges(series: Series, rank: usize) -> Result<Vec<(usize, usize)>> {
    let unsupported = || Error::UnsupportedType { series: series.to_string(), rank };
    match series {
        Series::A if rank >= 1 => Ok((1..rank).map(|i| (i, i + 1)).collect()),
        Series::D if rank >= 4 => {
            let mut e: Vec<_> = (1..rank - 1).map(|i| (i, i + 1)).collect();
            e.push((rank - 2, rank));
            Ok(e)
        }
        Series::E if (6..=8).contains(&rank) => {
            let mut e = vec![(1, 3), (3, 4), (2, 4)];
            e.extend((4..rank).map(|i| (i, i + 1)));
            Ok(e)
        }
        _ => Err(unsupported()),
    }
}

fn rational_inverse(m: &[Vec<i64>]) -> Result<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<BigRational> =
                row.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::Invariant("singular Cartan matrix".into()))?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in 0..2 * n {
                    let delta = &factor * &a[col][c];
                    a[r][c] = &a[r][c] - delta;
                }
            }
        }
    }
    Ok(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

impl DynkinData {
    pub fn new(series: Series, rank: usize) -> Result<Arc<Self>> {
        let edge_list = edges(series, rank)?;
        let mut cartan = vec![vec![0i64; rank]; rank];
        for (i, row) in cartan.iter_mut().enumerate() {
            row[i] = 2;
        }
        for &(i, j) in &edge_list {
            cartan[i - 1][j - 1] = -1;
            cartan[j - 1][i - 1] = -1;
        }
        let cartan_inverse = rational_inverse(&cartan)?;
        let mut data = DynkinData {
            series,
            rank,
            cartan,
            cartan_inverse,
            positive_roots: Vec::new(),
            w0_word: Vec::new(),
            star: Vec::new(),
        };
        data.positive_roots = data.enumerate_positive_roots();
        data.w0_word = data.longest_word();
        data.star = data.star_table();
        Ok(Arc::new(data))
    }

    pub fn series(&self) -> Series {
        self.series
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Cartan entry `c_ij` for labels `i, j` in `1..=rank`.
    pub fn cartan(&self, i: usize, j: usize) -> i64 {
        self.cartan[i - 1][j - 1]
    }

    pub fn cartan_matrix(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    /// Number of edges joining `i` and `j`; zero on the diagonal.
    pub fn adjacency(&self, i: usize, j: usize) -> u8 {
        u8::from(i != j && self.cartan(i, j) == -1)
    }

    pub fn positive_roots(&self) -> &[Vec<i64>] {
        &self.positive_roots
    }

    pub fn w0_word(&self) -> &[usize] {
        &self.w0_word
    }

    /// The label `i*` with `w0 s_i w0 = s_{i*}`.
    pub fn star(&self, i: usize) -> usize {
        self.star[i - 1]
    }

    pub fn check_letter(&self, position: usize, letter: usize) -> Result<()> {
        if letter == 0 || letter > self.rank {
            return Err(Error::LetterOutOfRange { position, letter, rank: self.rank });
        }
        Ok(())
    }

    pub fn check_word(&self, word: &[usize]) -> Result<()> {
        word.iter().enumerate().try_for_each(|(p, &l)| self.check_letter(p + 1, l))
    }

    fn reflect_root(&self, i: usize, root: &mut [i64]) {
        let coeff: i64 = (0..self.rank).map(|j| self.cartan[i - 1][j] * root[j]).sum();
        root[i - 1] -= coeff;
    }

    fn enumerate_positive_roots(&self) -> Vec<Vec<i64>> {
        let mut seen: HashSet<Vec<i64>> = HashSet::new();
        let mut queue: VecDeque<Vec<i64>> = VecDeque::new();
        for i in 0..self.rank {
            let mut e = vec![0; self.rank];
            e[i] = 1;
            seen.insert(e.clone());
            queue.push_back(e);
        }
        while let Some(root) = queue.pop_front() {
            for i in 1..=self.rank {
                let mut image = root.clone();
                self.reflect_root(i, &mut image);
                if image.iter().all(|&x| x >= 0) && seen.insert(image.clone()) {
                    queue.push_back(image);
                }
            }
        }
        let mut roots: Vec<_> = seen.into_iter().collect();
        roots.sort_by_key(|r| (r.iter().sum::<i64>(), r.clone()));
        roots
    }

    fn longest_word(&self) -> Vec<usize> {
        // Right-multiply by any length-increasing reflection until none is left.
        let mut word = Vec::new();
        let mut action = identity_matrix(self.rank);
        loop {
            let next = (1..=self.rank).find(|&i| {
                let col = column(&action, self.rank, i - 1);
                col.iter().all(|&x| x >= 0)
            });
            match next {
                Some(i) => {
                    action = mat_mul(&action, &self.simple_root_action(i), self.rank);
                    word.push(i);
                }
                None => return word,
            }
        }
    }

    fn star_table(&self) -> Vec<usize> {
        let w0 = self.action_of_word(&self.w0_word);
        (0..self.rank)
            .map(|j| {
                let col = column(&w0, self.rank, j);
                let target = col.iter().position(|&x| x == -1).expect("w0 sends simple roots to negative simple roots");
                target + 1
            })
            .collect()
    }

    fn simple_root_action(&self, i: usize) -> Vec<i64> {
        // s_i(α_j) = α_j - c_ij α_i; column j is the image of α_j.
        let n = self.rank;
        let mut m = identity_matrix(n);
        for j in 0..n {
            m[(i - 1) * n + j] -= self.cartan[i - 1][j];
        }
        m
    }

    fn simple_weight_action(&self, i: usize) -> Vec<i64> {
        // s_i(ϖ_j) = ϖ_j - δ_ij α_i, with α_i = Σ_k c_ki ϖ_k.
        let n = self.rank;
        let mut m = identity_matrix(n);
        for k in 0..n {
            m[k * n + (i - 1)] -= self.cartan[k][i - 1];
        }
        m
    }

    fn action_of_word(&self, word: &[usize]) -> Vec<i64> {
        word.iter().fold(identity_matrix(self.rank), |acc, &i| {
            mat_mul(&acc, &self.simple_root_action(i), self.rank)
        })
    }

    /// Converts root-lattice coordinates to fundamental-weight coordinates.
    pub fn root_to_weight(&self, root: &[i64]) -> Weight {
        let coords = (0..self.rank)
            .map(|k| (0..self.rank).map(|j| self.cartan[k][j] * root[j]).sum())
            .collect();
        Weight { coords }
    }

    pub fn simple_root(&self, i: usize) -> Weight {
        let mut root = vec![0; self.rank];
        root[i - 1] = 1;
        self.root_to_weight(&root)
    }

    pub fn fundamental_weight(&self, i: usize) -> Weight {
        let mut coords = vec![0; self.rank];
        coords[i - 1] = 1;
        Weight { coords }
    }

    /// The invariant form on weights, `(ϖ_i, ϖ_j)` being the inverse Cartan entry.
    pub fn pairing(&self, x: &Weight, y: &Weight) -> BigRational {
        let mut total = BigRational::zero();
        for i in 0..self.rank {
            if x.coords[i] == 0 {
                continue;
            }
            for j in 0..self.rank {
                if y.coords[j] == 0 {
                    continue;
                }
                let scale = BigRational::from_integer(BigInt::from(x.coords[i] * y.coords[j]));
                total += &self.cartan_inverse[i][j] * scale;
            }
        }
        total
    }
}

fn identity_matrix(n: usize) -> Vec<i64> {
    let mut m = vec![0; n * n];
    for i in 0..n {
        m[i * n + i] = 1;
    }
    m
}

fn column(m: &[i64], n: usize, j: usize) -> Vec<i64> {
    (0..n).map(|i| m[i * n + j]).collect()
}

fn mat_mul(a: &[i64], b: &[i64], n: usize) -> Vec<i64> {
    let mut out = vec![0; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if x == 0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += x * b[k * n + j];
            }
        }
    }
    out
}

fn mat_vec(a: &[i64], v: &[i64], n: usize) -> Vec<i64> {
    (0..n).map(|i| (0..n).map(|j| a[i * n + j] * v[j]).sum()).collect()
}

/// A weight written in the fundamental-weight basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Weight {
    pub coords: Vec<i64>,
}

impl Weight {
    pub fn zero(rank: usize) -> Self {
        Weight { coords: vec![0; rank] }
    }

    pub fn add(&self, other: &Weight) -> Weight {
        Weight { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Weight) -> Weight {
        Weight { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: i64) -> Weight {
        Weight { coords: self.coords.iter().map(|a| a * c).collect() }
    }
}

/// An element of the Weyl group, stored by its action on simple roots.
#[derive(Clone)]
pub struct WeylElement {
    dynkin: Arc<DynkinData>,
    /// Row-major; column `j` holds the root coordinates of `w(α_j)`.
    action: Vec<i64>,
    /// Row-major action on fundamental-weight coordinates.
    weight_action: Vec<i64>,
    length: usize,
}

impl PartialEq for WeylElement {
    fn eq(&self, other: &Self) -> bool {
        self.action == other.action && self.dynkin == other.dynkin
    }
}

impl Eq for WeylElement {}

impl Hash for WeylElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.action.hash(state);
    }
}

impl fmt::Debug for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeylElement({:?})", self.reduced_word())
    }
}

impl Serialize for WeylElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.simple_root_images().serialize(serializer)
    }
}

impl WeylElement {
    pub fn identity(dynkin: &Arc<DynkinData>) -> Self {
        let n = dynkin.rank;
        WeylElement {
            dynkin: Arc::clone(dynkin),
            action: identity_matrix(n),
            weight_action: identity_matrix(n),
            length: 0,
        }
    }

    pub fn simple(dynkin: &Arc<DynkinData>, i: usize) -> Result<Self> {
        dynkin.check_letter(1, i)?;
        Ok(WeylElement {
            dynkin: Arc::clone(dynkin),
            action: dynkin.simple_root_action(i),
            weight_action: dynkin.simple_weight_action(i),
            length: 1,
        })
    }

    /// The product `s_{i_1} ⋯ s_{i_r}` of a word, reduced or not.
    pub fn from_word(dynkin: &Arc<DynkinData>, word: &[usize]) -> Result<Self> {
        dynkin.check_word(word)?;
        let n = dynkin.rank;
        let mut action = identity_matrix(n);
        let mut weight_action = identity_matrix(n);
        for &i in word {
            action = mat_mul(&action, &dynkin.simple_root_action(i), n);
            weight_action = mat_mul(&weight_action, &dynkin.simple_weight_action(i), n);
        }
        Ok(Self::assemble(dynkin, action, weight_action))
    }

    pub fn longest(dynkin: &Arc<DynkinData>) -> Self {
        Self::from_word(dynkin, &dynkin.w0_word).expect("w0 word uses valid letters")
    }

    fn assemble(dynkin: &Arc<DynkinData>, action: Vec<i64>, weight_action: Vec<i64>) -> Self {
        let n = dynkin.rank;
        let length = dynkin
            .positive_roots
            .iter()
            .filter(|root| mat_vec(&action, root, n).iter().any(|&x| x < 0))
            .count();
        WeylElement { dynkin: Arc::clone(dynkin), action, weight_action, length }
    }

    pub fn dynkin(&self) -> &Arc<DynkinData> {
        &self.dynkin
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn is_identity(&self) -> bool {
        self.length == 0
    }

    pub fn mul(&self, other: &WeylElement) -> WeylElement {
        let n = self.dynkin.rank;
        Self::assemble(
            &self.dynkin,
            mat_mul(&self.action, &other.action, n),
            mat_mul(&self.weight_action, &other.weight_action, n),
        )
    }

    /// `s_i · self`.
    pub fn left_mul_simple(&self, i: usize) -> WeylElement {
        let n = self.dynkin.rank;
        Self::assemble(
            &self.dynkin,
            mat_mul(&self.dynkin.simple_root_action(i), &self.action, n),
            mat_mul(&self.dynkin.simple_weight_action(i), &self.weight_action, n),
        )
    }

    /// `self · s_i`.
    pub fn right_mul_simple(&self, i: usize) -> WeylElement {
        let n = self.dynkin.rank;
        Self::assemble(
            &self.dynkin,
            mat_mul(&self.action, &self.dynkin.simple_root_action(i), n),
            mat_mul(&self.weight_action, &self.dynkin.simple_weight_action(i), n),
        )
    }

    pub fn inverse(&self) -> WeylElement {
        let mut word = self.reduced_word();
        word.reverse();
        Self::from_word(&self.dynkin, &word).expect("letters already validated")
    }

    /// `ℓ(s_i w) < ℓ(w)`.
    pub fn has_left_descent(&self, i: usize) -> bool {
        self.left_mul_simple(i).length < self.length
    }

    /// `ℓ(w s_i) < ℓ(w)`, read off as `w(α_i) < 0`.
    pub fn has_right_descent(&self, i: usize) -> bool {
        let n = self.dynkin.rank;
        (0..n).any(|r| self.action[r * n + (i - 1)] < 0)
    }

    /// Greedy left-descent stripping, always taking the smallest descent.
    pub fn reduced_word(&self) -> Vec<usize> {
        let mut word = Vec::with_capacity(self.length);
        let mut w = self.clone();
        while w.length > 0 {
            let i = (1..=self.dynkin.rank)
                .find(|&i| w.has_left_descent(i))
                .expect("a nontrivial element has a left descent");
            word.push(i);
            w = w.left_mul_simple(i);
        }
        word
    }

    pub fn apply_root(&self, root: &[i64]) -> Vec<i64> {
        mat_vec(&self.action, root, self.dynkin.rank)
    }

    pub fn apply_weight(&self, weight: &Weight) -> Weight {
        Weight { coords: mat_vec(&self.weight_action, &weight.coords, self.dynkin.rank) }
    }

    /// Images of the simple roots, in root coordinates.
    pub fn simple_root_images(&self) -> Vec<Vec<i64>> {
        (0..self.dynkin.rank).map(|j| column(&self.action, self.dynkin.rank, j)).collect()
    }

    /// Bruhat order via the lifting property: peel a reduced word of `w` from the right.
    pub fn bruhat_leq(&self, w: &WeylElement) -> bool {
        if self.length > w.length {
            return false;
        }
        let mut u = self.clone();
        for &s in w.reduced_word().iter().rev() {
            if u.has_right_descent(s) {
                u = u.right_mul_simple(s);
            }
        }
        u.is_identity()
    }

    /// All elements `u ≤ self`, sorted by length then reduced word.
    pub fn lower_interval(&self) -> Vec<WeylElement> {
        let mut seen: HashSet<WeylElement> = HashSet::new();
        let mut queue = VecDeque::new();
        let e = WeylElement::identity(&self.dynkin);
        seen.insert(e.clone());
        queue.push_back(e);
        while let Some(u) = queue.pop_front() {
            for i in 1..=self.dynkin.rank {
                if u.has_right_descent(i) {
                    continue;
                }
                let next = u.right_mul_simple(i);
                if !seen.contains(&next) && next.bruhat_leq(self) {
                    seen.insert(next.clone());
                    queue.push_back(next);
                }
            }
        }
        let mut out: Vec<_> = seen.into_iter().map(|u| (u.length, u.reduced_word(), u)).collect();
        out.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        out.into_iter().map(|(_, _, u)| u).collect()
    }
}

/// The Demazure product `δ(word)` together with the reduced word built by the recursion
/// `δ(s_i b) = max{δ(b), s_i δ(b)}` read from the right.
pub fn demazure(dynkin: &Arc<DynkinData>, word: &[usize]) -> Result<(WeylElement, Vec<usize>)> {
    dynkin.check_word(word)?;
    let mut u = WeylElement::identity(dynkin);
    let mut reduced = VecDeque::new();
    for &i in word.iter().rev() {
        let candidate = u.left_mul_simple(i);
        if candidate.length > u.length {
            u = candidate;
            reduced.push_front(i);
        }
    }
    Ok((u, reduced.into_iter().collect()))
}

/// Whether the word is a reduced expression.
pub fn is_reduced(dynkin: &Arc<DynkinData>, word: &[usize]) -> Result<bool> {
    Ok(WeylElement::from_word(dynkin, word)?.length() == word.len())
}

/// Every element of the Weyl group, sorted by length then reduced word; refuses groups with
/// more than `limit` elements.
pub fn all_elements(dynkin: &Arc<DynkinData>, limit: usize) -> Result<Vec<WeylElement>> {
    let mut seen: HashSet<WeylElement> = HashSet::new();
    let mut queue = VecDeque::new();
    let e = WeylElement::identity(dynkin);
    seen.insert(e.clone());
    queue.push_back(e);
    while let Some(u) = queue.pop_front() {
        for i in 1..=dynkin.rank {
            let next = u.right_mul_simple(i);
            if seen.insert(next.clone()) {
                if seen.len() > limit {
                    return Err(Error::SearchLimit { limit });
                }
                queue.push_back(next);
            }
        }
    }
    let mut out: Vec<_> = seen.into_iter().map(|u| (u.length, u.reduced_word(), u)).collect();
    out.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    Ok(out.into_iter().map(|(_, _, u)| u).collect())
}
