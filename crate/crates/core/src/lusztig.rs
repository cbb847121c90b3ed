//! Lusztig parameter vectors attached to a word: the ≺ order, the transition maps for
//! 2- and 3-moves, and parameter tracking through the construction of `s(v, β)`.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::ser::{SerializeSeq, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rootdata::{DynkinData, WeylElement};
use crate::seedcore::{construct_seed_with, mutate_b, stage_mutations, Seed, VertexLabel};
use crate::words::{DotWord, Subexpression, Word};

/// Default cap on the number of words visited by a move search.
pub const MOVE_SEARCH_LIMIT: usize = 1_000_000;

/// A vector in `N^r` indexed by the positions of a word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct ParamVector(pub Vec<u64>);

impl ParamVector {
    pub fn zeros(len: usize) -> Self {
        ParamVector(vec![0; len])
    }

    pub fn unit(len: usize, k: usize) -> Self {
        let mut v = vec![0; len];
        v[k] = 1;
        ParamVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn support(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, &x)| x != 0).map(|(k, _)| k).collect()
    }

    /// The entries at the given positions, in order.
    pub fn restrict(&self, positions: &[usize]) -> Vec<u64> {
        positions.iter().map(|&p| self.0[p]).collect()
    }
}

fn check_lengths(a: &ParamVector, b: &ParamVector) -> Result<()> {
    if a.len() == b.len() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!("parameter vectors of lengths {} and {}", a.len(), b.len())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PrecOrder {
    Less,
    Greater,
    Equal,
    Incomparable,
}

/// `a ≺ b`: the first and last differing entries are distinct indices and `a` is smaller at both.
fn prec_less(a: &[u64], b: &[u64]) -> bool {
    let first = a.iter().zip(b).position(|(x, y)| x != y);
    let last = a.iter().zip(b).rposition(|(x, y)| x != y);
    match (first, last) {
        (Some(k0), Some(k1)) => k0 < k1 && a[k0] < b[k0] && a[k1] < b[k1],
        _ => false,
    }
}

pub fn prec(a: &ParamVector, b: &ParamVector) -> Result<PrecOrder> {
    check_lengths(a, b)?;
    Ok(if a == b {
        PrecOrder::Equal
    } else if prec_less(&a.0, &b.0) {
        PrecOrder::Less
    } else if prec_less(&b.0, &a.0) {
        PrecOrder::Greater
    } else {
        PrecOrder::Incomparable
    })
}

/// Parameter of the leading term of a product of global basis elements.
pub fn product_param(a: &ParamVector, b: &ParamVector) -> Result<ParamVector> {
    check_lengths(a, b)?;
    Ok(ParamVector(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveKind {
    /// Swap of commuting letters at `(k, k+1)`.
    Two,
    /// Braid relation `iji ↔ jij` centred at `k`.
    Three,
}

/// A braid move; `position` is 0-based (the left letter for a 2-move, the middle for a 3-move).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    pub kind: MoveKind,
    pub position: usize,
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            MoveKind::Two => "two",
            MoveKind::Three => "three",
        };
        write!(f, "{kind}@{}", self.position + 1)
    }
}

impl Serialize for Move {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let kind = match self.kind {
            MoveKind::Two => "two",
            MoveKind::Three => "three",
        };
        (kind, self.position + 1).serialize(serializer)
    }
}

impl Move {
    pub fn two(position: usize) -> Self {
        Move { kind: MoveKind::Two, position }
    }

    pub fn three(position: usize) -> Self {
        Move { kind: MoveKind::Three, position }
    }

    pub fn applies_to(&self, dynkin: &DynkinData, letters: &[usize]) -> bool {
        let k = self.position;
        match self.kind {
            MoveKind::Two => {
                k + 1 < letters.len() && letters[k] != letters[k + 1] && dynkin.cartan(letters[k], letters[k + 1]) == 0
            }
            MoveKind::Three => {
                k >= 1
                    && k + 1 < letters.len()
                    && letters[k - 1] == letters[k + 1]
                    && dynkin.cartan(letters[k], letters[k + 1]) == -1
            }
        }
    }

    fn apply_letters(&self, letters: &mut [usize]) {
        let k = self.position;
        match self.kind {
            MoveKind::Two => letters.swap(k, k + 1),
            MoveKind::Three => {
                let (i, j) = (letters[k - 1], letters[k]);
                letters[k - 1] = j;
                letters[k] = i;
                letters[k + 1] = j;
            }
        }
    }

    fn check(&self, word: &Word) -> Result<()> {
        if self.applies_to(word.dynkin(), word.letters()) {
            Ok(())
        } else {
            Err(Error::Domain(format!("move {self} does not apply to {:?}", word.letters())))
        }
    }
}

/// Every move applicable to `letters`.
pub fn applicable_moves(dynkin: &DynkinData, letters: &[usize]) -> Vec<Move> {
    let mut out = Vec::new();
    for k in 0..letters.len() {
        for mv in [Move::two(k), Move::three(k)] {
            if mv.applies_to(dynkin, letters) {
                out.push(mv);
            }
        }
    }
    out
}

pub fn apply_move(word: &Word, mv: Move) -> Result<Word> {
    mv.check(word)?;
    let mut letters = word.letters().to_vec();
    mv.apply_letters(&mut letters);
    Word::new(word.dynkin(), letters)
}

/// The transition map for one move, applied to a parameter vector on `word`.
pub fn psi(word: &Word, mv: Move, a: &ParamVector) -> Result<ParamVector> {
    mv.check(word)?;
    if a.len() != word.len() {
        return Err(Error::DimensionMismatch(format!("parameter of length {} on word of length {}", a.len(), word.len())));
    }
    let mut out = a.clone();
    let k = mv.position;
    match mv.kind {
        MoveKind::Two => out.0.swap(k, k + 1),
        MoveKind::Three => {
            let (x, y, z) = (a.0[k - 1], a.0[k], a.0[k + 1]);
            let p = x.min(z);
            let overflow = || Error::Domain(format!("parameter entries near position {} overflow", k + 1));
            out.0[k - 1] = (y.checked_add(z).ok_or_else(overflow)?) - p;
            out.0[k] = p;
            out.0[k + 1] = (x.checked_add(y).ok_or_else(overflow)?) - p;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MovePath {
    pub start: Vec<usize>,
    pub moves: Vec<Move>,
    pub end: Vec<usize>,
}

fn check_same_shape(from: &Word, to: &Word) -> Result<()> {
    if from.dynkin() != to.dynkin() || from.len() != to.len() {
        return Err(Error::NotEquivalent { from: from.letters().to_vec(), to: to.letters().to_vec() });
    }
    Ok(())
}

/// Shortest-path parent edges keyed by word letters.
type Predecessors = HashMap<Vec<usize>, Vec<(Vec<usize>, Move)>>;

/// Breadth-first layers of the move graph from `from` until `to` is reached, recording every
/// shortest-path predecessor edge.
fn bfs_predecessors(from: &Word, to: &Word, limit: usize) -> Result<Predecessors> {
    check_same_shape(from, to)?;
    let dynkin = from.dynkin();
    let mut depth: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut parents: Predecessors = HashMap::new();
    let mut queue = VecDeque::new();
    depth.insert(from.letters().to_vec(), 0);
    parents.insert(from.letters().to_vec(), Vec::new());
    queue.push_back(from.letters().to_vec());
    let mut target_depth = None;
    while let Some(current) = queue.pop_front() {
        let d = depth[&current];
        if target_depth.is_some_and(|t| d >= t) {
            break;
        }
        for mv in applicable_moves(dynkin, &current) {
            let mut next = current.clone();
            mv.apply_letters(&mut next);
            match depth.get(&next) {
                Some(&dn) if dn == d + 1 => parents.get_mut(&next).expect("visited").push((current.clone(), mv)),
                Some(_) => {}
                None => {
                    if depth.len() >= limit {
                        return Err(Error::SearchLimit { limit });
                    }
                    if next == to.letters() {
                        target_depth = Some(d + 1);
                    }
                    depth.insert(next.clone(), d + 1);
                    parents.insert(next.clone(), vec![(current.clone(), mv)]);
                    queue.push_back(next);
                }
            }
        }
    }
    if !parents.contains_key(to.letters()) {
        return Err(Error::NotEquivalent { from: from.letters().to_vec(), to: to.letters().to_vec() });
    }
    Ok(parents)
}

/// A shortest sequence of moves taking `from` to `to`.
pub fn find_move_path(from: &Word, to: &Word, limit: usize) -> Result<MovePath> {
    let parents = bfs_predecessors(from, to, limit)?;
    let mut moves = Vec::new();
    let mut current = to.letters().to_vec();
    while current != from.letters() {
        let (prev, mv) = parents[&current][0].clone();
        moves.push(mv);
        current = prev;
    }
    moves.reverse();
    Ok(MovePath { start: from.letters().to_vec(), moves, end: to.letters().to_vec() })
}

/// Every shortest move sequence from `from` to `to`, up to `max_paths` of them.
pub fn all_shortest_paths(from: &Word, to: &Word, limit: usize, max_paths: usize) -> Result<Vec<Vec<Move>>> {
    let parents = bfs_predecessors(from, to, limit)?;
    let mut out = Vec::new();
    let mut stack = vec![(to.letters().to_vec(), Vec::new())];
    while let Some((node, suffix)) = stack.pop() {
        if node == from.letters() {
            let mut path: Vec<Move> = suffix;
            path.reverse();
            out.push(path);
            if out.len() >= max_paths {
                break;
            }
            continue;
        }
        for (prev, mv) in &parents[&node] {
            let mut next = suffix.clone();
            next.push(*mv);
            stack.push((prev.clone(), next));
        }
    }
    Ok(out)
}

/// Applies the transition maps along `moves` starting from `word`.
pub fn transport_along(word: &Word, moves: &[Move], a: &ParamVector) -> Result<ParamVector> {
    let mut current = word.clone();
    let mut params = a.clone();
    for &mv in moves {
        params = psi(&current, mv, &params)?;
        current = apply_move(&current, mv)?;
    }
    Ok(params)
}

/// Transports `a` from `from` to `to` along a shortest move path.
pub fn transport(from: &Word, to: &Word, a: &ParamVector) -> Result<ParamVector> {
    let path = find_move_path(from, to, MOVE_SEARCH_LIMIT)?;
    transport_along(from, &path.moves, a)
}

/// `D_k^β = β{1,k]` as a parameter vector.
pub fn d_vector(word: &Word, k: usize) -> Result<ParamVector> {
    word.d_vector(k).map(ParamVector)
}

/// How the exchange term used by the recursion compares with the other term under ≺.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dominance {
    /// The other term is ≺-smaller.
    Confirmed,
    Equal,
    Incomparable,
    /// The other term is ≺-larger.
    Reversed,
}

/// One mutation inside the construction with the parameters before and after.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrackStep {
    /// 0-based stage.
    pub stage: usize,
    pub vertex: usize,
    pub next_same: usize,
    pub prev_same: Option<usize>,
    pub before: ParamVector,
    pub after: ParamVector,
    pub dominance: Dominance,
}

impl Serialize for TrackStep {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("TrackStep", 7)?;
        st.serialize_field("stage", &(self.stage + 1))?;
        st.serialize_field("vertex", &(self.vertex + 1))?;
        st.serialize_field("next_same", &(self.next_same + 1))?;
        st.serialize_field("prev_same", &self.prev_same.map(|p| p + 1))?;
        st.serialize_field("before", &self.before)?;
        st.serialize_field("after", &self.after)?;
        st.serialize_field("dominance", &self.dominance)?;
        st.end()
    }
}

/// Parameters of every cluster variable through the construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrackTable {
    pub labels: Vec<VertexLabel>,
    /// `stages[l][k]`: parameter at position `k` after `l` stages; `stages[0]` holds the D-vectors.
    pub stages: Vec<Vec<ParamVector>>,
    pub steps: Vec<TrackStep>,
    /// The surviving vertices of `s(v, β)` with their parameters.
    pub final_labels: Vec<VertexLabel>,
    pub final_params: Vec<ParamVector>,
}

struct LabelledParams<'a>(&'a [VertexLabel], &'a [ParamVector]);

impl Serialize for LabelledParams<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry<'a> {
            label: &'a VertexLabel,
            position: usize,
            params: &'a ParamVector,
        }
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for (label, params) in self.0.iter().zip(self.1) {
            seq.serialize_element(&Entry { label, position: label.position + 1, params })?;
        }
        seq.end()
    }
}

impl Serialize for TrackTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let stages: Vec<LabelledParams<'_>> = self.stages.iter().map(|s| LabelledParams(&self.labels, s)).collect();
        let mut st = serializer.serialize_struct("TrackTable", 3)?;
        st.serialize_field("stages", &stages)?;
        st.serialize_field("steps", &self.steps)?;
        st.serialize_field("final", &LabelledParams(&self.final_labels, &self.final_params))?;
        st.end()
    }
}

fn weighted_sum(params: &[ParamVector], terms: impl Iterator<Item = (usize, u64)>, len: usize) -> ParamVector {
    let mut out = vec![0u64; len];
    for (t, weight) in terms {
        for (o, x) in out.iter_mut().zip(&params[t].0) {
            *o += weight * x;
        }
    }
    ParamVector(out)
}

/// The parameter update at one mutation of the construction, or an error when the mutation
/// falls outside the recursion that determines the dominant exchange term.
fn track_step(word: &Word, sub: &Subexpression, seed: &Seed, params: &[ParamVector], k: usize, stage: usize) -> Result<TrackStep> {
    let len = word.len();
    let outside = |reason: String| Error::OutsideRecursion { vertex: k + 1, reason };
    let next = word.next_same(k).ok_or_else(|| outside("no later letter of the same color".into()))?;
    let prev = word.prev_same(k);
    let sign = seed.b[next][k].signum();
    if sign == 0 {
        return Err(outside(format!("next letter of the same color, position {}, is not adjacent", next + 1)));
    }
    let column: Vec<(usize, i64)> = (0..len).map(|t| (t, seed.b[t][k])).filter(|&(_, b)| b != 0).collect();
    let dominant = weighted_sum(params, column.iter().filter(|(_, b)| b.signum() == sign).map(|&(t, b)| (t, b.unsigned_abs())), len);
    let other = weighted_sum(params, column.iter().filter(|(_, b)| b.signum() == -sign).map(|&(t, b)| (t, b.unsigned_abs())), len);
    let horizontal = weighted_sum(params, std::iter::once((next, 1)).chain(prev.map(|p| (p, 1))), len);
    if dominant.restrict(&sub.positions) != horizontal.restrict(&sub.positions) {
        return Err(outside(format!(
            "exchange term through position {} differs from the horizontal product on the subexpression",
            next + 1
        )));
    }
    let before = params[k].clone();
    let mut after = Vec::with_capacity(len);
    for (t, (&d, &old)) in dominant.0.iter().zip(&before.0).enumerate() {
        after.push(d.checked_sub(old).ok_or_else(|| {
            Error::Invariant(format!("negative entry at position {} after mutating position {}", t + 1, k + 1))
        })?);
    }
    let dominance = match prec(&other, &dominant)? {
        PrecOrder::Less => Dominance::Confirmed,
        PrecOrder::Equal => Dominance::Equal,
        PrecOrder::Incomparable => Dominance::Incomparable,
        PrecOrder::Greater => Dominance::Reversed,
    };
    Ok(TrackStep { stage, vertex: k, next_same: next, prev_same: prev, before, after: ParamVector(after), dominance })
}

/// Runs the construction of `s(v, β)` carrying parameter vectors along each mutation.
pub fn track_construction(word: &Word, sub: &Subexpression) -> Result<TrackTable> {
    let len = word.len();
    let initial: Vec<ParamVector> = (0..len).map(|k| d_vector(word, k)).collect::<Result<_>>()?;
    let mut schedule = Vec::new();
    for l in 0..sub.len() {
        schedule.extend(stage_mutations(word, sub, l)?.into_iter().map(|k| (l, k)));
    }
    let mut params = initial.clone();
    let mut steps: Vec<TrackStep> = Vec::with_capacity(schedule.len());
    let (seed, _) = construct_seed_with(word, sub, |seed, k| {
        let (stage, expected) = schedule[steps.len()];
        if k != expected {
            return Err(Error::Invariant(format!("construction mutated {} where {} was scheduled", k + 1, expected + 1)));
        }
        let step = track_step(word, sub, seed, &params, k, stage)?;
        params[k] = step.after.clone();
        steps.push(step);
        Ok(())
    })?;

    let mut stages = vec![initial];
    for l in 0..sub.len() {
        let mut snapshot = stages[l].clone();
        for step in steps.iter().filter(|s| s.stage == l) {
            snapshot[step.vertex] = step.after.clone();
        }
        stages.push(snapshot);
    }
    let labels = Seed::from_word(word)?.labels;
    let final_params = seed.labels.iter().map(|l| params[l.position].clone()).collect();
    Ok(TrackTable { labels, stages, steps, final_labels: seed.labels, final_params })
}

/// Positions mutated at a stage whose parameter restricted to the subexpression differs from
/// the staircase `1` at `p_s = (j, t)` with `b_l + 1 + α(l, j) ≤ t ≤ b_l + k + α(l, j)` for the
/// `k`-th mutated vertex `(j, b_l + k)` of stage `l`. Returned as `(stage, position)`, 0-based.
pub fn staircase_failures(word: &Word, sub: &Subexpression, table: &TrackTable) -> Result<Vec<(usize, usize)>> {
    let mut failures = Vec::new();
    for l in 0..sub.len() {
        let color = word.color(sub.positions[l]);
        let alpha = sub.alpha(l + 1, color);
        let b = sub.b[l];
        for (offset, &k) in stage_mutations(word, sub, l)?.iter().enumerate() {
            let reach = b + offset + 1;
            let mut expected = Vec::with_capacity(sub.len());
            for &p in &sub.positions {
                let (c, t) = word.occurrence(p)?;
                expected.push(u64::from(c == color && b + 1 + alpha <= t && t <= reach + alpha));
            }
            if table.stages[l + 1][k].restrict(&sub.positions) != expected {
                failures.push((l, k));
            }
        }
    }
    Ok(failures)
}

/// Vertex sets and arrows of the quivers `Q^0, …, Q^m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuiverSequence {
    pub vertices: Vec<Vec<usize>>,
    pub arrows: Vec<Vec<(usize, usize)>>,
}

impl Serialize for QuiverSequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let one = |v: &Vec<usize>| v.iter().map(|p| p + 1).collect::<Vec<_>>();
        let arrows: Vec<Vec<(usize, usize)>> =
            self.arrows.iter().map(|a| a.iter().map(|&(s, t)| (s + 1, t + 1)).collect()).collect();
        let mut st = serializer.serialize_struct("QuiverSequence", 2)?;
        st.serialize_field("vertices", &self.vertices.iter().map(one).collect::<Vec<_>>())?;
        st.serialize_field("arrows", &arrows)?;
        st.end()
    }
}

/// `Q^0` drops the vertices whose parameter vanishes on the subexpression; `Q^l` is obtained
/// from the mutated `Q^{l-1}` by dropping vanishing vertices and every `(j, n)` with
/// `n > n_j − α(l, j)`. Arrows are those of the full mutated quiver between kept vertices.
pub fn quiver_sequence(word: &Word, sub: &Subexpression, table: &TrackTable) -> Result<QuiverSequence> {
    let vanishes = |stage: usize, k: usize| table.stages[stage][k].restrict(&sub.positions).iter().all(|&x| x == 0);
    let mut b = Seed::from_word(word)?.b;
    let induced = |b: &Vec<Vec<i64>>, keep: &[usize]| {
        let mut arrows = Vec::new();
        for &s in keep {
            for &t in keep {
                for _ in 0..b[s][t].max(0) {
                    arrows.push((s, t));
                }
            }
        }
        arrows
    };
    let mut current: Vec<usize> = (0..word.len()).filter(|&k| !vanishes(0, k)).collect();
    let mut vertices = vec![current.clone()];
    let mut arrows = vec![induced(&b, &current)];
    for l in 0..sub.len() {
        for k in stage_mutations(word, sub, l)? {
            b = mutate_b(&b, k)?;
        }
        let mut kept = Vec::with_capacity(current.len());
        for &k in &current {
            let (color, n) = word.occurrence(k)?;
            if !vanishes(l + 1, k) && n + sub.alpha(l + 1, color) <= word.count(color) {
                kept.push(k);
            }
        }
        current = kept;
        arrows.push(induced(&b, &current));
        vertices.push(current.clone());
    }
    Ok(QuiverSequence { vertices, arrows })
}

/// A surviving cluster variable whose parameter is nonzero on the subexpression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub label: VertexLabel,
    /// 0-based indices `s` with a nonzero entry at `p_s`.
    pub nonzero: Vec<usize>,
}

impl Serialize for Witness {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Witness", 3)?;
        st.serialize_field("label", &self.label)?;
        st.serialize_field("position", &(self.label.position + 1))?;
        st.serialize_field("nonzero", &self.nonzero.iter().map(|s| s + 1).collect::<Vec<_>>())?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VanishingReport {
    pub pass: bool,
    pub witnesses: Vec<Witness>,
    pub error: Option<String>,
    /// Number of recursion steps per dominance outcome: confirmed, equal, incomparable, reversed.
    pub dominance: [usize; 4],
    pub final_quiver_empty: bool,
}

/// Checks that every cluster variable of `s(v, β)` has a parameter vanishing at `p_1, …, p_m`.
pub fn verify_vanishing(word: &Word, sub: &Subexpression) -> VanishingReport {
    let table = match track_construction(word, sub) {
        Ok(table) => table,
        Err(e) => {
            return VanishingReport {
                pass: false,
                witnesses: Vec::new(),
                error: Some(e.to_string()),
                dominance: [0; 4],
                final_quiver_empty: false,
            }
        }
    };
    let witnesses: Vec<Witness> = table
        .final_labels
        .iter()
        .zip(&table.final_params)
        .filter_map(|(label, params)| {
            let nonzero: Vec<usize> =
                params.restrict(&sub.positions).iter().enumerate().filter(|(_, &x)| x != 0).map(|(s, _)| s).collect();
            (!nonzero.is_empty()).then_some(Witness { label: *label, nonzero })
        })
        .collect();
    let mut dominance = [0; 4];
    for step in &table.steps {
        let slot = match step.dominance {
            Dominance::Confirmed => 0,
            Dominance::Equal => 1,
            Dominance::Incomparable => 2,
            Dominance::Reversed => 3,
        };
        dominance[slot] += 1;
    }
    let (final_quiver_empty, error) = match quiver_sequence(word, sub, &table) {
        Ok(q) => (q.vertices.last().is_some_and(Vec::is_empty), None),
        Err(e) => (false, Some(e.to_string())),
    };
    VanishingReport { pass: witnesses.is_empty() && error.is_none(), witnesses, error, dominance, final_quiver_empty }
}

/// For a reduced word `β` and a subexpression for `v`, compares the parameters obtained by
/// transporting each zero-padded `D_k^β` from `β` extended to `w0` onto the word that starts
/// with the subexpression's reduced word of `v`, against the entries `(D_k^β)_{p_i}`.
/// Returns mismatches as `(k, i, direct, transported)`, 0-based.
pub fn dot_word_mismatches(word: &Word, sub: &Subexpression) -> Result<Vec<(usize, usize, u64, u64)>> {
    let dynkin = word.dynkin();
    let (delta, _) = word.demazure();
    if delta.length() != word.len() {
        return Err(Error::NotReduced { word: word.letters().to_vec() });
    }
    let complement = delta.inverse().mul(&WeylElement::longest(dynkin)).reduced_word();
    let mut extended_letters = word.letters().to_vec();
    extended_letters.extend(complement);
    let extended = Word::new(dynkin, extended_letters)?;
    let dot = Word::new(dynkin, DotWord::extend_to_w0(dynkin, &sub.v_word)?.base().to_vec())?;
    let path = find_move_path(&extended, &dot, MOVE_SEARCH_LIMIT)?;
    let mut mismatches = Vec::new();
    for k in 0..word.len() {
        let direct = d_vector(word, k)?;
        let mut padded = direct.0.clone();
        padded.resize(extended.len(), 0);
        let moved = transport_along(&extended, &path.moves, &ParamVector(padded))?;
        for (i, &p) in sub.positions.iter().enumerate() {
            if moved.0[i] != direct.0[p] {
                mismatches.push((k, i, direct.0[p], moved.0[i]));
            }
        }
    }
    Ok(mismatches)
}
