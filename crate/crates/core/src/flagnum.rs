//! Type A matrix models of braid varieties and their twisted versions, with exhaustive
//! point counts over prime fields.
//!
//! `B_i(z)` is the identity except for the block `[[z, −1], [1, 0]]` in rows and columns
//! `i, i+1`. Permutations are 0-based maps `j ↦ w(j)` whose permutation matrix sends `e_j` to
//! `e_{w(j)}`; the simple reflection `s_i` swaps `i−1` and `i`.

use std::collections::HashMap;
use std::fmt::Debug;
use std::sync::Arc;

use num::{BigInt, BigRational, One, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rootdata::{DynkinData, Series, WeylElement};
use crate::words::Word;

/// Default cap on the number of tuples a point count may enumerate.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

pub trait Field: Clone + Send + Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn integer(&self, x: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// `F_p` for a prime `p < 2^32`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p >= 1 << 32 || !is_prime(p) {
            return Err(Error::Domain(format!("field size {p} is not a prime below 2^32")));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            exp >>= 1;
        }
        acc
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1
    }

    fn integer(&self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }

    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }

    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }

    fn inv(&self, a: &u64) -> Option<u64> {
        (*a != 0).then(|| self.pow(*a, self.p - 2))
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
}

/// Exact rational numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn integer(&self, x: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(x))
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
}

/// A square matrix over a field, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FlagMatrix<F: Field> {
    field: F,
    n: usize,
    entries: Vec<F::Elem>,
}

impl<F: Field> FlagMatrix<F> {
    pub fn identity(field: &F, n: usize) -> Self {
        let mut entries = vec![field.zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = field.one();
        }
        FlagMatrix { field: field.clone(), n, entries }
    }

    pub fn from_rows(field: &F, rows: Vec<Vec<F::Elem>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("matrix rows must all have length n".into()));
        }
        Ok(FlagMatrix { field: field.clone(), n, entries: rows.into_iter().flatten().collect() })
    }

    /// The permutation matrix with `e_j ↦ e_{perm[j]}`.
    pub fn permutation(field: &F, perm: &Permutation) -> Self {
        let n = perm.0.len();
        let mut m = FlagMatrix { field: field.clone(), n, entries: vec![field.zero(); n * n] };
        for (j, &i) in perm.0.iter().enumerate() {
            m.entries[i * n + j] = field.one();
        }
        m
    }

    /// `B_i(z)` for `1 ≤ i ≤ n − 1`.
    pub fn b_factor(field: &F, i: usize, z: F::Elem, n: usize) -> Result<Self> {
        if i == 0 || i >= n {
            return Err(Error::IndexOutOfRange { what: "factor index", index: i, limit: n.saturating_sub(1) });
        }
        let mut m = Self::identity(field, n);
        let (a, b) = (i - 1, i);
        m.entries[a * n + a] = z;
        m.entries[a * n + b] = field.integer(-1);
        m.entries[b * n + a] = field.one();
        m.entries[b * n + b] = field.zero();
        Ok(m)
    }

    /// The lift `ṡ_{i_1} ⋯ ṡ_{i_k}` of `w` along its reduced word, with `ṡ_i = B_i(0)`.
    pub fn lift(field: &F, w: &WeylElement) -> Result<Self> {
        let n = type_a_size(w.dynkin())?;
        let mut m = Self::identity(field, n);
        for i in w.reduced_word() {
            m.right_mul_b_factor(i, &field.zero());
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn get(&self, i: usize, j: usize) -> &F::Elem {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: F::Elem) {
        self.entries[i * self.n + j] = x;
    }

    pub fn rows(&self) -> Vec<Vec<F::Elem>> {
        self.entries.chunks(self.n).map(<[F::Elem]>::to_vec).collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let f = &self.field;
        let mut entries = vec![f.zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..n {
                    let t = f.mul(a, &other.entries[k * n + j]);
                    entries[i * n + j] = f.add(&entries[i * n + j], &t);
                }
            }
        }
        FlagMatrix { field: f.clone(), n, entries }
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut entries = self.entries.clone();
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j].clone();
            }
        }
        FlagMatrix { field: self.field.clone(), n, entries }
    }

    /// Right multiplication by `B_i(z)` in place: column `i` becomes `z·col_i + col_{i+1}`
    /// and column `i+1` becomes `−col_i` (columns 1-based).
    pub fn right_mul_b_factor(&mut self, i: usize, z: &F::Elem) {
        let f = &self.field;
        let (a, b) = (i - 1, i);
        for r in 0..self.n {
            let left = self.entries[r * self.n + a].clone();
            let right = self.entries[r * self.n + b].clone();
            self.entries[r * self.n + a] = f.add(&f.mul(z, &left), &right);
            self.entries[r * self.n + b] = f.neg(&left);
        }
    }

    /// Rank of the submatrix on the given rows and columns.
    pub fn rank_of(&self, rows: &[usize], cols: &[usize]) -> usize {
        let f = &self.field;
        let mut m: Vec<Vec<F::Elem>> = rows.iter().map(|&i| cols.iter().map(|&j| self.get(i, j).clone()).collect()).collect();
        let mut rank = 0;
        for c in 0..cols.len() {
            let Some(pivot) = (rank..m.len()).find(|&r| !f.is_zero(&m[r][c])) else {
                continue;
            };
            m.swap(rank, pivot);
            let inv = f.inv(&m[rank][c]).expect("pivot is nonzero");
            for r in (rank + 1)..m.len() {
                let factor = f.mul(&m[r][c], &inv);
                for cc in c..cols.len() {
                    let t = f.mul(&factor, &m[rank][cc]);
                    m[r][cc] = f.sub(&m[r][cc], &t);
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn det(&self) -> F::Elem {
        determinant(&self.field, self.rows())
    }

    /// Whether every entry below the diagonal vanishes.
    pub fn is_upper_triangular(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.field.is_zero(self.get(i, j))))
    }
}

/// Determinant by Gaussian elimination.
pub fn determinant<F: Field>(field: &F, mut m: Vec<Vec<F::Elem>>) -> F::Elem {
    let n = m.len();
    let mut det = field.one();
    for c in 0..n {
        let Some(pivot) = (c..n).find(|&r| !field.is_zero(&m[r][c])) else {
            return field.zero();
        };
        if pivot != c {
            m.swap(pivot, c);
            det = field.neg(&det);
        }
        det = field.mul(&det, &m[c][c]);
        let inv = field.inv(&m[c][c]).expect("pivot is nonzero");
        for r in (c + 1)..n {
            let factor = field.mul(&m[r][c], &inv);
            for cc in c..n {
                let t = field.mul(&factor, &m[c][cc]);
                m[r][cc] = field.sub(&m[r][cc], &t);
            }
        }
    }
    det
}

/// A permutation `j ↦ w(j)` of `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(pub Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// The permutation of the type A Weyl group element `w`.
    pub fn of_element(w: &WeylElement) -> Result<Self> {
        let n = type_a_size(w.dynkin())?;
        let mut perm = Permutation::identity(n);
        // w = s_{i_1} ⋯ s_{i_k} acts as the composite, so apply the letters right to left.
        for i in w.reduced_word().into_iter().rev() {
            for x in perm.0.iter_mut() {
                if *x == i - 1 {
                    *x = i;
                } else if *x == i {
                    *x = i - 1;
                }
            }
        }
        Ok(perm)
    }

    pub fn to_element(&self, dynkin: &Arc<DynkinData>) -> Result<WeylElement> {
        let n = type_a_size(dynkin)?;
        if self.0.len() != n {
            return Err(Error::DimensionMismatch(format!("permutation of {} points in type A{}", self.0.len(), n - 1)));
        }
        // Bubble sort from the left records w = s_{i_1} ⋯ s_{i_k}.
        let mut values = self.0.clone();
        let mut letters = Vec::new();
        while let Some(k) = (0..n - 1).find(|&k| values[k] > values[k + 1]) {
            values.swap(k, k + 1);
            letters.push(k + 1);
        }
        letters.reverse();
        WeylElement::from_word(dynkin, &letters)
    }
}

fn type_a_size(dynkin: &DynkinData) -> Result<usize> {
    if dynkin.series() != Series::A {
        return Err(Error::Domain("matrix models are implemented in type A only".into()));
    }
    Ok(dynkin.rank() + 1)
}

/// Reduces `g` by row operations of the given direction and column operations to the right,
/// choosing in each column the bottommost (`from_bottom`) or topmost nonzero entry.
fn double_coset<F: Field>(g: &FlagMatrix<F>, from_bottom: bool) -> Result<Permutation> {
    let f = &g.field;
    let n = g.n;
    let mut m = g.rows();
    let mut perm = vec![0; n];
    for c in 0..n {
        let nonzero = |r: &usize| !f.is_zero(&m[*r][c]);
        let pivot = if from_bottom { (0..n).rev().find(nonzero) } else { (0..n).find(nonzero) };
        let pivot = pivot.ok_or_else(|| Error::Domain("matrix is singular".into()))?;
        perm[c] = pivot;
        let inv = f.inv(&m[pivot][c]).expect("pivot is nonzero");
        let rows: Vec<usize> = if from_bottom { (0..pivot).collect() } else { (pivot + 1..n).collect() };
        for r in rows {
            let factor = f.mul(&m[r][c], &inv);
            for cc in c..n {
                let t = f.mul(&factor, &m[pivot][cc]);
                m[r][cc] = f.sub(&m[r][cc], &t);
            }
        }
        for cc in (c + 1)..n {
            m[pivot][cc] = f.zero();
        }
    }
    Ok(Permutation(perm))
}

/// The `w` with `g ∈ B⁺ w B⁺`.
pub fn bruhat_pos<F: Field>(g: &FlagMatrix<F>) -> Result<Permutation> {
    double_coset(g, true)
}

/// The `v` with `g ∈ B⁻ v B⁺`.
pub fn opp_pos<F: Field>(g: &FlagMatrix<F>) -> Result<Permutation> {
    double_coset(g, false)
}

/// `bruhat_pos` read off the ranks of the lower-left corner submatrices:
/// `rank g[i.., ..=j] = #{k ≤ j : w(k) ≥ i}`.
pub fn bruhat_pos_by_ranks<F: Field>(g: &FlagMatrix<F>) -> Result<Permutation> {
    let n = g.n;
    let rank = |i: usize, j: usize| -> usize {
        if j == 0 {
            return 0;
        }
        g.rank_of(&(i..n).collect::<Vec<_>>(), &(0..j).collect::<Vec<_>>())
    };
    if rank(0, n) != n {
        return Err(Error::Domain("matrix is singular".into()));
    }
    let mut perm = vec![0; n];
    for j in 0..n {
        perm[j] = (0..n)
            .rev()
            .find(|&i| rank(i, j + 1) > rank(i, j))
            .ok_or_else(|| Error::Invariant("rank table is not a permutation".into()))?;
    }
    Ok(Permutation(perm))
}

/// `Δ_{uϖ_i, vϖ_i}(g) = Δ_{ϖ_i}(ū⁻¹ g v̄)`, the leading principal `i`-minor after translating by the standard lifts.
pub fn generalized_minor<F: Field>(g: &FlagMatrix<F>, i: usize, u: &WeylElement, v: &WeylElement) -> Result<F::Elem> {
    let n = type_a_size(u.dynkin())?;
    if g.n != n || type_a_size(v.dynkin())? != n {
        return Err(Error::DimensionMismatch(format!("matrix of size {} for type A{}", g.n, n - 1)));
    }
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange { what: "minor size", index: i, limit: n });
    }
    // Lifts are signed permutation matrices, so the inverse is the transpose.
    let translated = FlagMatrix::lift(&g.field, u)?.transpose().mul(g).mul(&FlagMatrix::lift(&g.field, v)?);
    let rows = translated.rows();
    Ok(determinant(&g.field, rows[..i].iter().map(|r| r[..i].to_vec()).collect()))
}

/// Determinant of the submatrix of `g` on rows `u({1..i})` and columns `v({1..i})`, both sorted.
pub fn row_column_minor<F: Field>(g: &FlagMatrix<F>, i: usize, u: &Permutation, v: &Permutation) -> F::Elem {
    let mut rows: Vec<usize> = u.0[..i].to_vec();
    let mut cols: Vec<usize> = v.0[..i].to_vec();
    rows.sort_unstable();
    cols.sort_unstable();
    determinant(&g.field, rows.iter().map(|&r| cols.iter().map(|&c| g.get(r, c).clone()).collect()).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointCount {
    pub word: Vec<usize>,
    /// Reduced word of `v` for twisted counts.
    pub v: Option<Vec<usize>>,
    pub q: u64,
    pub count: u64,
}

fn check_budget(q: u64, r: usize, budget: u128) -> Result<()> {
    let needed = (q as u128).checked_pow(r as u32).unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(())
}

/// Folds `leaf` over the products `B_{i_1}(z_1) ⋯ B_{i_r}(z_r)` for all `z ∈ F_q^r`,
/// splitting the work over the first coordinate.
fn fold_products<A, L, M>(word: &Word, q: u64, budget: u128, leaf: L, merge: M) -> Result<A>
where
    A: Default + Send,
    L: Fn(&mut A, &FlagMatrix<PrimeField>) + Sync,
    M: Fn(A, A) -> A + Sync + Send,
{
    let n = type_a_size(word.dynkin())?;
    let field = PrimeField::new(q)?;
    check_budget(q, word.len(), budget)?;
    let letters = word.letters();
    let start = FlagMatrix::identity(&field, n);
    if letters.is_empty() {
        let mut acc = A::default();
        leaf(&mut acc, &start);
        return Ok(acc);
    }

    fn visit<A, L: Fn(&mut A, &FlagMatrix<PrimeField>)>(
        stack: &mut Vec<FlagMatrix<PrimeField>>,
        letters: &[usize],
        depth: usize,
        q: u64,
        acc: &mut A,
        leaf: &L,
    ) {
        if depth == letters.len() {
            leaf(acc, &stack[depth]);
            return;
        }
        for z in 0..q {
            let mut next = stack[depth].clone();
            next.right_mul_b_factor(letters[depth], &z);
            stack[depth + 1] = next;
            visit(stack, letters, depth + 1, q, acc, leaf);
        }
    }

    Ok((0..q)
        .into_par_iter()
        .map(|z| {
            let mut first = start.clone();
            first.right_mul_b_factor(letters[0], &z);
            let mut stack = vec![first; letters.len() + 1];
            let mut acc = A::default();
            visit(&mut stack, letters, 1, q, &mut acc, &leaf);
            acc
        })
        .reduce(A::default, &merge))
}

/// Number of `z ∈ F_q^r` with `B_{i_1}(z_1) ⋯ B_{i_r}(z_r) ∈ δ(β) B⁺`.
pub fn braid_points(word: &Word, q: u64, budget: u128) -> Result<PointCount> {
    let delta = Permutation::of_element(&word.demazure().0)?;
    let count = fold_products(
        word,
        q,
        budget,
        |acc: &mut u64, m| {
            // δ⁻¹·m is upper triangular iff m[δ(i)][j] = 0 for j < i.
            let n = m.size();
            if (0..n).all(|i| (0..i).all(|j| *m.get(delta.0[i], j) == 0)) {
                *acc += 1;
            }
        },
        |a, b| a + b,
    )?;
    Ok(PointCount { word: word.letters().to_vec(), v: None, q, count })
}

/// Numbers of tuples by the position `v` of the product in `B⁻ v B⁺`.
pub fn twisted_histogram(word: &Word, q: u64, budget: u128) -> Result<HashMap<Permutation, u64>> {
    fold_products(
        word,
        q,
        budget,
        |acc: &mut HashMap<Permutation, u64>, m| {
            let v = opp_pos(m).expect("products of B factors are invertible");
            *acc.entry(v).or_default() += 1;
        },
        |mut a, b| {
            for (k, c) in b {
                *a.entry(k).or_default() += c;
            }
            a
        },
    )
}

/// Number of `z ∈ F_q^r` whose product lies in `B⁻ v B⁺`.
pub fn twisted_points(word: &Word, v: &WeylElement, q: u64, budget: u128) -> Result<PointCount> {
    let key = Permutation::of_element(v)?;
    let histogram = twisted_histogram(word, q, budget)?;
    let count = histogram.get(&key).copied().unwrap_or(0);
    Ok(PointCount { word: word.letters().to_vec(), v: Some(v.reduced_word()), q, count })
}

/// Outcome of fitting point counts by a polynomial in `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimFit {
    /// Every count is zero.
    Empty,
    Degree(usize),
    /// No polynomial of degree below the number of samples fits them all.
    NotPolynomial,
}

impl Serialize for DimFit {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DimFit::Empty => serializer.serialize_str("-inf"),
            DimFit::Degree(d) => serializer.serialize_u64(*d as u64),
            DimFit::NotPolynomial => serializer.serialize_str("not_polynomial"),
        }
    }
}

fn lagrange_at(points: &[(BigRational, BigRational)], x: &BigRational) -> BigRational {
    let mut total = BigRational::zero();
    for (k, (xk, yk)) in points.iter().enumerate() {
        let mut term = yk.clone();
        for (m, (xm, _)) in points.iter().enumerate() {
            if m != k {
                term = term * (x - xm) / (xk - xm);
            }
        }
        total += term;
    }
    total
}

/// The smallest `d` such that the interpolant through the first `d + 1` samples predicts the
/// remaining ones. At least one sample must be left over as a check.
pub fn dim_fit(samples: &[(u64, u64)]) -> DimFit {
    if samples.iter().all(|&(_, c)| c == 0) {
        return DimFit::Empty;
    }
    let points: Vec<(BigRational, BigRational)> = samples
        .iter()
        .map(|&(q, c)| (BigRational::from_integer(q.into()), BigRational::from_integer(c.into())))
        .collect();
    for d in 0..points.len().saturating_sub(1) {
        let (fit, rest) = points.split_at(d + 1);
        if rest.iter().all(|(x, y)| lagrange_at(fit, x) == *y) {
            return DimFit::Degree(d);
        }
    }
    DimFit::NotPolynomial
}
