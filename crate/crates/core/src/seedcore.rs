//! Exchange matrices and compatible skew-symmetric matrices attached to a word, their
//! mutation, and the stage-by-stage construction of the seed `s(v, β)`.
//!
//! Vertices are indexed 0-based; a seed keeps the original word position of every vertex so
//! that deletions can reindex the matrices without losing identity.

use num::traits::{CheckedAdd, CheckedMul, CheckedSub, Signed};
use num::{BigInt, ToPrimitive};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rootdata::{Weight, WeylElement};
use crate::words::{Subexpression, Word};

pub type IntMatrix = Vec<Vec<i64>>;
pub type BigMatrix = Vec<Vec<BigInt>>;

/// The identity of a vertex in terms of the word it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VertexLabel {
    /// 0-based position in the word.
    pub position: usize,
    pub color: usize,
    /// 1-based occurrence number within the color.
    pub occurrence: usize,
}

impl Serialize for VertexLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        (self.color.to_string(), self.occurrence).serialize(serializer)
    }
}

/// `B_β` by the closed formula: `b_ij = 1` if `i = j^-` or `j < i < j^+ < i^+` with adjacent
/// colors, `-1` for the transposed conditions, `0` otherwise. Missing `^+` counts as `+∞`.
pub fn exchange_matrix_closed(word: &Word) -> IntMatrix {
    let r = word.len();
    let dynkin = word.dynkin();
    let plus = |k: usize| word.next_same(k).unwrap_or(usize::MAX);
    let mut b = vec![vec![0i64; r]; r];
    for i in 0..r {
        for j in 0..r {
            if i == j {
                continue;
            }
            let adjacent = dynkin.adjacency(word.color(i), word.color(j)) == 1;
            if word.prev_same(j) == Some(i)
                || (adjacent && j < i && i < plus(j) && plus(j) < plus(i))
            {
                b[i][j] = 1;
            } else if word.prev_same(i) == Some(j)
                || (adjacent && i < j && j < plus(i) && plus(i) < plus(j))
            {
                b[i][j] = -1;
            }
        }
    }
    b
}

/// `2·B_β` as the sum of the local contributions `B(i_k)`.
///
/// For each `k`: `ε_{k^-,k} = 1`; `ε_{s,k} = 1/2` when `k^+` exists and `s` is the last
/// position of an adjacent color before `k^+` with `s > k`; `ε_{k^-,t} = -1/2` when `t` is the
/// last position of an adjacent color before `k` with `t > k^-`. Entries are doubled to stay
/// integral and extended antisymmetrically.
pub fn exchange_matrix_local_doubled(word: &Word) -> IntMatrix {
    let r = word.len();
    let dynkin = word.dynkin();
    let mut b2 = vec![vec![0i64; r]; r];
    let mut add = |s: usize, t: usize, value: i64| {
        b2[s][t] += value;
        b2[t][s] -= value;
    };
    for k in 0..r {
        let ck = word.color(k);
        let neighbours: Vec<usize> =
            (1..=dynkin.rank()).filter(|&c| dynkin.adjacency(c, ck) == 1).collect();
        if let Some(km) = word.prev_same(k) {
            add(km, k, 2);
            for &c in &neighbours {
                if let Some(t) = word.prev_of_color(k, c) {
                    if t > km {
                        add(km, t, -1);
                    }
                }
            }
        }
        if let Some(kp) = word.next_same(k) {
            for &c in &neighbours {
                if let Some(s) = word.prev_of_color(kp, c) {
                    if s > k {
                        add(s, k, 1);
                    }
                }
            }
        }
    }
    b2
}

/// `B_β`, cross-checked against the local rule.
pub fn exchange_matrix(word: &Word) -> Result<IntMatrix> {
    let closed = exchange_matrix_closed(word);
    let local = exchange_matrix_local_doubled(word);
    for (i, (row_c, row_l)) in closed.iter().zip(&local).enumerate() {
        for (j, (&c, &l)) in row_c.iter().zip(row_l).enumerate() {
            if 2 * c != l {
                return Err(Error::Invariant(format!(
                    "local rule gives {l}/2 but closed formula gives {c} at ({i},{j})"
                )));
            }
        }
    }
    Ok(closed)
}

/// The last occurrence of every color, which starts out frozen.
pub fn initial_frozen(word: &Word) -> Vec<bool> {
    (0..word.len()).map(|k| word.next_same(k).is_none()).collect()
}

/// `L_β`: `λ_st = (ϖ_{i_s} − w_{≤s}ϖ_{i_s}, ϖ_{i_t} + w_{≤t}ϖ_{i_t})` for `s ≤ t`, skew-extended.
pub fn lambda_matrix(word: &Word) -> Result<IntMatrix> {
    let dynkin = word.dynkin();
    let r = word.len();
    let mut prefix = WeylElement::identity(dynkin);
    let mut lower: Vec<Weight> = Vec::with_capacity(r);
    let mut upper: Vec<Weight> = Vec::with_capacity(r);
    for k in 0..r {
        let c = word.color(k);
        prefix = prefix.right_mul_simple(c);
        let fundamental = dynkin.fundamental_weight(c);
        let moved = prefix.apply_weight(&fundamental);
        lower.push(fundamental.sub(&moved));
        upper.push(fundamental.add(&moved));
    }
    let mut l = vec![vec![0i64; r]; r];
    for s in 0..r {
        for t in s..r {
            let value = dynkin.pairing(&lower[s], &upper[t]);
            if !value.is_integer() {
                return Err(Error::Invariant(format!("λ({s},{t}) = {value} is not an integer")));
            }
            let value = value.to_integer().to_i64().ok_or_else(|| Error::Invariant("λ overflow".into()))?;
            if s == t && value != 0 {
                return Err(Error::Invariant(format!("λ({s},{s}) = {value} is not zero")));
            }
            l[s][t] = value;
            l[t][s] = -value;
        }
    }
    Ok(l)
}

/// Integer types that matrix mutation can run over: `i64` with overflow detection, or
/// `BigInt` for walks whose entries outgrow machine words.
pub trait MatrixEntry: Clone + PartialOrd + Signed + CheckedAdd + CheckedSub + CheckedMul {}

impl<T: Clone + PartialOrd + Signed + CheckedAdd + CheckedSub + CheckedMul> MatrixEntry for T {}

fn overflow(what: &str) -> Error {
    Error::Overflow(what.to_string())
}

fn add<T: MatrixEntry>(x: &T, y: &T, what: &str) -> Result<T> {
    x.checked_add(y).ok_or_else(|| overflow(what))
}

fn mul<T: MatrixEntry>(x: &T, y: &T, what: &str) -> Result<T> {
    x.checked_mul(y).ok_or_else(|| overflow(what))
}

fn neg<T: MatrixEntry>(x: &T, what: &str) -> Result<T> {
    T::zero().checked_sub(x).ok_or_else(|| overflow(what))
}

fn positive_part<T: MatrixEntry>(x: T) -> T {
    if x.is_positive() {
        x
    } else {
        T::zero()
    }
}

/// Pairs `(i, j)`, `j` exchangeable, where `Σ_k λ_ki b_kj ≠ 2δ_ij`.
///
/// The sum runs over the first index of `λ`, i.e. `(Lᵀ B)_{ij}`; with the skew-symmetric
/// `L` this is `-Σ_k λ_ik b_kj`.
pub fn check_compatible<T: MatrixEntry>(l: &[Vec<T>], b: &[Vec<T>], exchangeable: &[usize]) -> Result<Vec<(usize, usize)>> {
    let r = b.len();
    if l.len() != r || l.iter().chain(b.iter()).any(|row| row.len() != r) {
        return Err(Error::DimensionMismatch(format!("L is {}x?, B is {r}x?", l.len())));
    }
    let two = T::one() + T::one();
    let mut violations = Vec::new();
    for i in 0..r {
        for &j in exchangeable {
            let mut total = T::zero();
            for k in 0..r {
                total = add(&total, &mul(&l[k][i], &b[k][j], "the compatibility check")?, "the compatibility check")?;
            }
            let expected = if i == j { two.clone() } else { T::zero() };
            if total != expected {
                violations.push((i, j));
            }
        }
    }
    Ok(violations)
}

/// Matrix mutation `μ_k(B)`.
pub fn mutate_b<T: MatrixEntry>(b: &[Vec<T>], k: usize) -> Result<Vec<Vec<T>>> {
    let what = "exchange matrix mutation";
    let r = b.len();
    let mut out = b.to_vec();
    for i in 0..r {
        for j in 0..r {
            out[i][j] = if i == k || j == k {
                neg(&b[i][j], what)?
            } else {
                let prod = positive_part(mul(&b[i][k], &b[k][j], what)?);
                add(&b[i][j], &mul(&b[i][k].signum(), &prod, what)?, what)?
            };
        }
    }
    Ok(out)
}

/// `μ_k(L)` using the exchange matrix before mutation.
pub fn mutate_lambda<T: MatrixEntry>(l: &[Vec<T>], b: &[Vec<T>], k: usize) -> Result<Vec<Vec<T>>> {
    let what = "compatible matrix mutation";
    let r = l.len();
    let mut out = l.to_vec();
    for j in 0..r {
        if j == k {
            continue;
        }
        let mut value = neg(&l[k][j], what)?;
        for t in 0..r {
            value = add(&value, &mul(&positive_part(neg(&b[t][k], what)?), &l[t][j], what)?, what)?;
        }
        out[j][k] = neg(&value, what)?;
        out[k][j] = value;
    }
    Ok(out)
}

/// Entry-wise conversion to arbitrary precision.
pub fn to_big(m: &IntMatrix) -> BigMatrix {
    m.iter().map(|row| row.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

/// Exchange matrix, optional compatible matrix, frozen flags and vertex labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Seed {
    pub b: IntMatrix,
    pub lambda: Option<IntMatrix>,
    pub frozen: Vec<bool>,
    pub labels: Vec<VertexLabel>,
    pub deleted: Vec<VertexLabel>,
}

impl Serialize for Seed {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Seed", 6)?;
        st.serialize_field("B", &self.b)?;
        st.serialize_field("L", &self.lambda)?;
        let frozen: Vec<usize> = (0..self.len()).filter(|&k| self.frozen[k]).map(|k| k + 1).collect();
        st.serialize_field("frozen", &frozen)?;
        st.serialize_field("labels", &self.labels)?;
        let positions: Vec<usize> = self.labels.iter().map(|l| l.position + 1).collect();
        st.serialize_field("positions", &positions)?;
        st.serialize_field("deleted", &self.deleted)?;
        st.end()
    }
}

impl Seed {
    /// The initial seed `s(β)`.
    pub fn from_word(word: &Word) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::Domain("the word is empty".into()));
        }
        let labels = (0..word.len())
            .map(|k| {
                let (color, occurrence) = word.occurrence(k)?;
                Ok(VertexLabel { position: k, color, occurrence })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Seed {
            b: exchange_matrix(word)?,
            lambda: Some(lambda_matrix(word)?),
            frozen: initial_frozen(word),
            labels,
            deleted: Vec::new(),
        })
    }

    /// A seed from raw matrices; labels are synthetic (color 0).
    pub fn from_matrices(b: IntMatrix, lambda: Option<IntMatrix>, frozen: Vec<bool>) -> Result<Self> {
        let r = b.len();
        let square = |m: &IntMatrix| m.len() == r && m.iter().all(|row| row.len() == r);
        if !square(&b) || frozen.len() != r || lambda.as_ref().is_some_and(|l| !square(l)) {
            return Err(Error::DimensionMismatch("B, L and frozen flags must agree in size".into()));
        }
        for i in 0..r {
            for j in 0..r {
                if b[i][j] != -b[j][i] || lambda.as_ref().is_some_and(|l| l[i][j] != -l[j][i]) {
                    return Err(Error::Domain(format!("matrices are not skew-symmetric at ({i},{j})")));
                }
            }
        }
        let labels = (0..r).map(|k| VertexLabel { position: k, color: 0, occurrence: 0 }).collect();
        Ok(Seed { b, lambda, frozen, labels, deleted: Vec::new() })
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    pub fn exchangeable(&self) -> Vec<usize> {
        (0..self.len()).filter(|&k| !self.frozen[k]).collect()
    }

    /// Arrows `k → j` for `b_kj > 0`, repeated by multiplicity.
    pub fn arrows(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (k, row) in self.b.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                for _ in 0..x.max(0) {
                    out.push((k, j));
                }
            }
        }
        out
    }

    /// Vertices joined to `k` by an arrow in either direction.
    pub fn neighbours(&self, k: usize) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.b[k][j] != 0).collect()
    }

    pub fn index_of_position(&self, position: usize) -> Option<usize> {
        self.labels.iter().position(|l| l.position == position)
    }

    pub fn check_compatible(&self) -> Result<Vec<(usize, usize)>> {
        match &self.lambda {
            Some(l) => check_compatible(l, &self.b, &self.exchangeable()),
            None => Ok(Vec::new()),
        }
    }

    pub fn mutate_in_place(&mut self, k: usize) -> Result<()> {
        if k >= self.len() {
            return Err(Error::IndexOutOfRange { what: "vertex", index: k, limit: self.len() });
        }
        if self.frozen[k] {
            return Err(Error::FrozenVertex(k));
        }
        if let Some(l) = &self.lambda {
            self.lambda = Some(mutate_lambda(l, &self.b, k)?);
        }
        self.b = mutate_b(&self.b, k)?;
        Ok(())
    }

    pub fn mutate(&self, k: usize) -> Result<Seed> {
        let mut next = self.clone();
        next.mutate_in_place(k)?;
        Ok(next)
    }

    /// Removes the given vertices and reindexes the matrices.
    pub fn delete(&mut self, vertices: &[usize]) {
        let keep: Vec<usize> = (0..self.len()).filter(|k| !vertices.contains(k)).collect();
        let restrict = |m: &IntMatrix| -> IntMatrix {
            keep.iter().map(|&i| keep.iter().map(|&j| m[i][j]).collect()).collect()
        };
        self.b = restrict(&self.b);
        if let Some(lambda) = &self.lambda {
            self.lambda = Some(restrict(lambda));
        }
        let mut removed: Vec<VertexLabel> = vertices.iter().map(|&k| self.labels[k]).collect();
        self.deleted.append(&mut removed);
        self.frozen = keep.iter().map(|&k| self.frozen[k]).collect();
        self.labels = keep.iter().map(|&k| self.labels[k]).collect();
    }
}

/// One stage `l` of the construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage {
    /// Color `i_{p_l}`.
    pub color: usize,
    /// Word positions mutated, in the order applied.
    pub mutations: Vec<usize>,
    /// The position of `(i_{p_l}, n_{i_{p_l}} − a_l + 1)`.
    pub target: usize,
    /// Positions adjacent to the target before the stage's mutations.
    pub adjacent_before: Vec<usize>,
    /// Positions adjacent to the target after the stage's mutations.
    pub adjacent_after: Vec<usize>,
    /// Positions that became frozen during this stage.
    pub newly_frozen: Vec<usize>,
    /// Every frozen position once the stage is over.
    pub frozen_after: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionTrace {
    pub stages: Vec<Stage>,
    /// Positions removed at the end, in stage order.
    pub deleted: Vec<usize>,
    /// Surviving positions frozen at the end because they touch a deleted vertex.
    pub final_freezes: Vec<usize>,
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|p| p + 1).collect()
}

impl Serialize for Stage {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Stage", 7)?;
        st.serialize_field("color", &self.color)?;
        st.serialize_field("mutations", &one_based(&self.mutations))?;
        st.serialize_field("target", &(self.target + 1))?;
        st.serialize_field("adjacent_before", &one_based(&self.adjacent_before))?;
        st.serialize_field("adjacent_after", &one_based(&self.adjacent_after))?;
        st.serialize_field("newly_frozen", &one_based(&self.newly_frozen))?;
        st.serialize_field("frozen_after", &one_based(&self.frozen_after))?;
        st.end()
    }
}

impl Serialize for ConstructionTrace {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("ConstructionTrace", 3)?;
        st.serialize_field("stages", &self.stages)?;
        st.serialize_field("deleted", &one_based(&self.deleted))?;
        st.serialize_field("final_freezes", &one_based(&self.final_freezes))?;
        st.end()
    }
}

/// The positions mutated at stage `l` (0-based), in application order:
/// `(i, b_l + 1), …, (i, n_i − a_l)` with `i = i_{p_l}`.
pub fn stage_mutations(word: &Word, sub: &Subexpression, l: usize) -> Result<Vec<usize>> {
    let color = word.color(sub.positions[l]);
    let n = word.count(color);
    let (a, b) = (sub.a[l], sub.b[l]);
    ((b + 1)..=(n - a)).map(|occ| word.position(color, occ)).collect()
}

/// The position of `(i_{p_l}, n_{i_{p_l}} − a_l + 1)`.
pub fn stage_target(word: &Word, sub: &Subexpression, l: usize) -> Result<usize> {
    let color = word.color(sub.positions[l]);
    word.position(color, word.count(color) - sub.a[l] + 1)
}

fn positions_of(seed: &Seed, vertices: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = vertices.iter().map(|&k| seed.labels[k].position).collect();
    out.sort_unstable();
    out
}

/// Drives the construction of `s(v, β)`, calling `on_mutation(seed, vertex)` just before each
/// stage mutation so that callers can carry extra per-vertex data along.
///
/// Stage `l` applies its mutations and freezes its marked vertex `(i_{p_l}, n − a_l + 1)`.
/// After the last stage every vertex adjacent to a marked one is frozen and the marked
/// vertices are deleted.
pub fn construct_seed_with<F>(word: &Word, sub: &Subexpression, mut on_mutation: F) -> Result<(Seed, ConstructionTrace)>
where
    F: FnMut(&Seed, usize) -> Result<()>,
{
    let mut seed = Seed::from_word(word)?;
    let mut stages = Vec::with_capacity(sub.len());
    let mut targets = Vec::with_capacity(sub.len());
    for l in 0..sub.len() {
        let mutations = stage_mutations(word, sub, l)?;
        let target = stage_target(word, sub, l)?;
        let adjacent_before = positions_of(&seed, &seed.neighbours(target));
        for &k in &mutations {
            if seed.frozen[k] {
                return Err(Error::Invariant(format!(
                    "stage {} mutates position {} which is frozen",
                    l + 1,
                    k + 1
                )));
            }
            on_mutation(&seed, k)?;
            seed.mutate_in_place(k)?;
        }
        let adjacent_after = positions_of(&seed, &seed.neighbours(target));
        let newly_frozen: Vec<usize> = std::iter::once(target).filter(|&k| !seed.frozen[k]).collect();
        for &k in &newly_frozen {
            seed.frozen[k] = true;
        }
        let frozen_after = (0..seed.len()).filter(|&k| seed.frozen[k]).collect();
        targets.push(target);
        stages.push(Stage {
            color: word.color(sub.positions[l]),
            mutations,
            target,
            adjacent_before,
            adjacent_after,
            newly_frozen,
            frozen_after,
        });
    }
    let mut final_freezes: Vec<usize> = targets
        .iter()
        .flat_map(|&t| seed.neighbours(t))
        .filter(|k| !targets.contains(k))
        .collect();
    final_freezes.sort_unstable();
    final_freezes.dedup();
    for &k in &final_freezes {
        seed.frozen[k] = true;
    }
    seed.delete(&targets);
    let trace = ConstructionTrace { stages, deleted: targets, final_freezes };
    Ok((seed, trace))
}

/// The seed `s(v, β)` together with its construction trace.
pub fn construct_seed(word: &Word, sub: &Subexpression) -> Result<(Seed, ConstructionTrace)> {
    construct_seed_with(word, sub, |_, _| Ok(()))
}
