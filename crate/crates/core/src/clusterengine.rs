//! Cluster variables as Laurent polynomials in the initial cluster, classical and quantum.
//!
//! Quantum coefficients live in `Z[q^{±1/2}]` and are stored as maps from a count of
//! `q^{1/2}` units to an integer. Exchange relations are solved by exact sparse division
//! with respect to the lexicographic order on exponent vectors, which is a group order, so
//! leading terms multiply.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::seedcore::{IntMatrix, Seed};

/// Upper bound on long-division steps before a division is declared inexact.
const DIVISION_STEP_LIMIT: usize = 200_000;

fn add_exponents(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub_exponents(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Per-variable exponent bounds that any exact quotient `num / den` must satisfy, since degrees in
/// each variable add under multiplication. `None` when the bounds are contradictory.
fn quotient_box<'a, I, J>(num: I, den: J, nvars: usize) -> Option<(Vec<i64>, Vec<i64>)>
where
    I: Iterator<Item = &'a Vec<i64>> + Clone,
    J: Iterator<Item = &'a Vec<i64>> + Clone,
{
    let mut low = Vec::with_capacity(nvars);
    let mut high = Vec::with_capacity(nvars);
    for i in 0..nvars {
        let (nmin, nmax) = num.clone().fold((i64::MAX, i64::MIN), |(lo, hi), e| (lo.min(e[i]), hi.max(e[i])));
        let (dmin, dmax) = den.clone().fold((i64::MAX, i64::MIN), |(lo, hi), e| (lo.min(e[i]), hi.max(e[i])));
        let (lo, hi) = (nmin - dmin, nmax - dmax);
        if lo > hi {
            return None;
        }
        low.push(lo);
        high.push(hi);
    }
    Some((low, high))
}

fn inside(e: &[i64], bounds: &(Vec<i64>, Vec<i64>)) -> bool {
    e.iter().zip(bounds.0.iter().zip(&bounds.1)).all(|(x, (lo, hi))| lo <= x && x <= hi)
}

fn unit_vector(n: usize, i: usize, value: i64) -> Vec<i64> {
    let mut e = vec![0; n];
    e[i] = value;
    e
}

struct BigIntJson<'a>(&'a BigInt);

impl Serialize for BigIntJson<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(x) => serializer.serialize_i64(x),
            None => serializer.serialize_str(&self.0.to_string()),
        }
    }
}

/// A Laurent polynomial with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<Vec<i64>, BigInt>,
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (e, c) in &self.terms {
            seq.serialize_element(&(e, BigIntJson(c)))?;
        }
        seq.end()
    }
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn monomial(exponent: Vec<i64>, coeff: BigInt) -> Self {
        let nvars = exponent.len();
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exponent, coeff);
        }
        LaurentPoly { nvars, terms }
    }

    pub fn one(nvars: usize) -> Self {
        Self::monomial(vec![0; nvars], BigInt::one())
    }

    /// The initial variable `x_i`.
    pub fn variable(nvars: usize, i: usize) -> Self {
        Self::monomial(unit_vector(nvars, i, 1), BigInt::one())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i64>, BigInt> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, exponent: Vec<i64>, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exponent.clone()).or_insert_with(BigInt::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&exponent);
        }
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(add_exponents(e1, e2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> LaurentPoly {
        (0..n).fold(LaurentPoly::one(self.nvars), |acc, _| acc.mul(self))
    }

    /// The exact quotient `self / divisor`.
    pub fn div_exact(&self, divisor: &LaurentPoly) -> Result<LaurentPoly> {
        let (lead_exp, lead_coeff) = divisor
            .terms
            .iter()
            .next_back()
            .ok_or_else(|| Error::Invariant("division by zero polynomial".into()))?;
        let inexact = || Error::Invariant("Laurent division is not exact".into());
        if self.is_zero() {
            return Ok(LaurentPoly::zero(self.nvars));
        }
        let bounds = quotient_box(self.terms.keys(), divisor.terms.keys(), self.nvars).ok_or_else(inexact)?;
        let mut remainder = self.clone();
        let mut quotient = LaurentPoly::zero(self.nvars);
        for _ in 0..DIVISION_STEP_LIMIT {
            let Some((exp, coeff)) = remainder.terms.iter().next_back() else {
                return Ok(quotient);
            };
            let (c, rem) = coeff.div_rem(lead_coeff);
            let e = sub_exponents(exp, lead_exp);
            if !rem.is_zero() || !inside(&e, &bounds) {
                return Err(inexact());
            }
            let term = LaurentPoly::monomial(e, c);
            remainder = remainder.sub(&term.mul(divisor));
            quotient = quotient.add(&term);
        }
        Err(Error::Invariant("Laurent division did not terminate".into()))
    }

    /// The smallest exponent of each variable over all terms.
    pub fn min_exponents(&self) -> Vec<i64> {
        (0..self.nvars).map(|i| self.terms.keys().map(|e| e[i]).min().unwrap_or(0)).collect()
    }
}

/// An element of `Z[q^{±1/2}]`, keyed by the number of `q^{1/2}` units.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QCoeff(BTreeMap<i64, BigInt>);

impl Serialize for QCoeff {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (h, c) in &self.0 {
            let key = if h % 2 == 0 { (h / 2).to_string() } else { format!("{h}/2") };
            map.serialize_entry(&key, &BigIntJson(c))?;
        }
        map.end()
    }
}

impl QCoeff {
    pub fn zero() -> Self {
        QCoeff(BTreeMap::new())
    }

    /// `c · q^{half/2}`.
    pub fn term(half: i64, c: BigInt) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(half, c);
        }
        QCoeff(m)
    }

    pub fn one() -> Self {
        Self::term(0, BigInt::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<i64, BigInt> {
        &self.0
    }

    fn add_term(&mut self, half: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.0.entry(half).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.0.remove(&half);
        }
    }

    pub fn add(&self, other: &QCoeff) -> QCoeff {
        let mut out = self.clone();
        for (h, c) in &other.0 {
            out.add_term(*h, c.clone());
        }
        out
    }

    pub fn neg(&self) -> QCoeff {
        QCoeff(self.0.iter().map(|(h, c)| (*h, -c)).collect())
    }

    pub fn mul(&self, other: &QCoeff) -> QCoeff {
        let mut out = QCoeff::zero();
        for (h1, c1) in &self.0 {
            for (h2, c2) in &other.0 {
                out.add_term(h1 + h2, c1 * c2);
            }
        }
        out
    }

    /// Multiplication by `q^{half/2}`.
    pub fn shift(&self, half: i64) -> QCoeff {
        QCoeff(self.0.iter().map(|(h, c)| (h + half, c.clone())).collect())
    }

    /// `q^{1/2} ↦ q^{-1/2}`.
    pub fn bar(&self) -> QCoeff {
        QCoeff(self.0.iter().map(|(h, c)| (-h, c.clone())).collect())
    }

    /// Value at `q^{1/2} = 1`.
    pub fn at_one(&self) -> BigInt {
        self.0.values().sum()
    }

    pub fn div_exact(&self, divisor: &QCoeff) -> Result<QCoeff> {
        let inexact = || Error::Invariant("q-coefficient division is not exact".into());
        let (&top_d, lead_d) = divisor.0.iter().next_back().ok_or_else(inexact)?;
        let &bottom_d = divisor.0.keys().next().ok_or_else(inexact)?;
        let Some(&bottom_n) = self.0.keys().next() else {
            return Ok(QCoeff::zero());
        };
        let mut remainder = self.clone();
        let mut quotient = QCoeff::zero();
        while let Some((&top, c)) = remainder.0.iter().next_back() {
            let degree = top - top_d;
            if degree < bottom_n - bottom_d {
                return Err(inexact());
            }
            let (q, rem) = c.div_rem(lead_d);
            if !rem.is_zero() {
                return Err(inexact());
            }
            let term = QCoeff::term(degree, q);
            remainder = remainder.add(&term.mul(divisor).neg());
            quotient = quotient.add(&term);
        }
        Ok(quotient)
    }
}

/// An element of the quantum torus with `X^a X^b = q^{½ aᵀΛb} X^{a+b}`, written in the
/// normalized monomials `X^a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantumLaurent {
    lambda: Arc<IntMatrix>,
    terms: BTreeMap<Vec<i64>, QCoeff>,
}

impl Serialize for QuantumLaurent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (e, c) in &self.terms {
            seq.serialize_element(&(e, c))?;
        }
        seq.end()
    }
}

fn twist(lambda: &IntMatrix, a: &[i64], b: &[i64]) -> i64 {
    let mut total = 0;
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            total += ai * lambda[i][j] * bj;
        }
    }
    total
}

impl QuantumLaurent {
    pub fn zero(lambda: &Arc<IntMatrix>) -> Self {
        QuantumLaurent { lambda: Arc::clone(lambda), terms: BTreeMap::new() }
    }

    /// `c · X^a` for a normalized monomial.
    pub fn monomial(lambda: &Arc<IntMatrix>, exponent: Vec<i64>, coeff: QCoeff) -> Self {
        let mut out = Self::zero(lambda);
        if !coeff.is_zero() {
            out.terms.insert(exponent, coeff);
        }
        out
    }

    pub fn one(lambda: &Arc<IntMatrix>) -> Self {
        Self::monomial(lambda, vec![0; lambda.len()], QCoeff::one())
    }

    pub fn variable(lambda: &Arc<IntMatrix>, i: usize) -> Self {
        Self::monomial(lambda, unit_vector(lambda.len(), i, 1), QCoeff::one())
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i64>, QCoeff> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, exponent: Vec<i64>, coeff: QCoeff) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exponent.clone()).or_default();
        *entry = entry.add(&coeff);
        if entry.is_zero() {
            self.terms.remove(&exponent);
        }
    }

    pub fn add(&self, other: &QuantumLaurent) -> QuantumLaurent {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &QuantumLaurent) -> QuantumLaurent {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.neg());
        }
        out
    }

    pub fn scale(&self, c: &QCoeff) -> QuantumLaurent {
        let mut out = QuantumLaurent::zero(&self.lambda);
        for (e, x) in &self.terms {
            out.add_term(e.clone(), x.mul(c));
        }
        out
    }

    pub fn mul(&self, other: &QuantumLaurent) -> QuantumLaurent {
        let mut out = QuantumLaurent::zero(&self.lambda);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let shift = twist(&self.lambda, e1, e2);
                out.add_term(add_exponents(e1, e2), c1.mul(c2).shift(shift));
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> QuantumLaurent {
        (0..n).fold(QuantumLaurent::one(&self.lambda), |acc, _| acc.mul(self))
    }

    /// The bar involution: coefficients `q^{1/2} ↦ q^{-1/2}`, normalized monomials fixed.
    pub fn bar(&self) -> QuantumLaurent {
        QuantumLaurent {
            lambda: Arc::clone(&self.lambda),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.bar())).collect(),
        }
    }

    pub fn is_bar_invariant(&self) -> bool {
        self.bar() == *self
    }

    /// The `Z` with `Z · divisor = self`.
    pub fn right_div_exact(&self, divisor: &QuantumLaurent) -> Result<QuantumLaurent> {
        let (lead_exp, lead_coeff) = divisor
            .terms
            .iter()
            .next_back()
            .ok_or_else(|| Error::Invariant("division by zero element".into()))?;
        if self.is_zero() {
            return Ok(QuantumLaurent::zero(&self.lambda));
        }
        let bounds = quotient_box(self.terms.keys(), divisor.terms.keys(), self.lambda.len())
            .ok_or_else(|| Error::Invariant("quantum division is not exact".into()))?;
        let mut remainder = self.clone();
        let mut quotient = QuantumLaurent::zero(&self.lambda);
        for _ in 0..DIVISION_STEP_LIMIT {
            let Some((exp, coeff)) = remainder.terms.iter().next_back() else {
                return Ok(quotient);
            };
            let e = sub_exponents(exp, lead_exp);
            if !inside(&e, &bounds) {
                return Err(Error::Invariant("quantum division is not exact".into()));
            }
            let shift = twist(&self.lambda, &e, lead_exp);
            let c = coeff.shift(-shift).div_exact(lead_coeff)?;
            let term = QuantumLaurent::monomial(&self.lambda, e, c);
            remainder = remainder.sub(&term.mul(divisor));
            quotient = quotient.add(&term);
        }
        Err(Error::Invariant("quantum division did not terminate".into()))
    }

    /// Substitutes `q^{1/2} = 1`.
    pub fn specialize_q1(&self) -> LaurentPoly {
        let mut out = LaurentPoly::zero(self.lambda.len());
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.at_one());
        }
        out
    }
}

/// `X^a = q^{½ Σ_{i>j} a_i a_j λ_ij} X_1^{a_1} ⋯ X_r^{a_r}`, built from the ordered product.
pub fn quantum_monomial(lambda: &Arc<IntMatrix>, a: &[i64]) -> Result<QuantumLaurent> {
    if a.len() != lambda.len() {
        return Err(Error::DimensionMismatch(format!("exponent has {} entries, torus has {}", a.len(), lambda.len())));
    }
    let mut product = QuantumLaurent::one(lambda);
    for (i, &ai) in a.iter().enumerate() {
        let factor = QuantumLaurent::monomial(lambda, unit_vector(a.len(), i, ai.signum()), QCoeff::one());
        product = product.mul(&factor.pow(ai.unsigned_abs() as u32));
    }
    let mut half = 0;
    for i in 0..a.len() {
        for j in 0..i {
            half += a[i] * a[j] * lambda[i][j];
        }
    }
    Ok(product.scale(&QCoeff::term(half, BigInt::one())))
}

fn exchange_exponents(seed: &Seed, k: usize) -> (Vec<i64>, Vec<i64>) {
    let r = seed.len();
    let mut plus = vec![0; r];
    let mut minus = vec![0; r];
    for i in 0..r {
        plus[i] = seed.b[i][k].max(0);
        minus[i] = (-seed.b[i][k]).max(0);
    }
    (plus, minus)
}

/// A seed with classical cluster variables written in the initial cluster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalState {
    pub seed: Seed,
    pub variables: Vec<LaurentPoly>,
}

impl ClassicalState {
    pub fn initial(seed: Seed) -> Self {
        let r = seed.len();
        let variables = (0..r).map(|i| LaurentPoly::variable(r, i)).collect();
        ClassicalState { seed, variables }
    }

    /// `x_k' = (x^{a'} + x^{a''}) / x_k` with `a'_i = [b_ik]_+`, `a''_i = [-b_ik]_+`.
    pub fn mutate(&self, k: usize) -> Result<ClassicalState> {
        let seed = self.seed.mutate(k)?;
        let r = self.seed.len();
        let (plus, minus) = exchange_exponents(&self.seed, k);
        let product = |exps: &[i64]| {
            exps.iter().enumerate().fold(LaurentPoly::one(r), |acc, (i, &e)| {
                acc.mul(&self.variables[i].pow(e as u32))
            })
        };
        let numerator = product(&plus).add(&product(&minus));
        let mut variables = self.variables.clone();
        variables[k] = numerator.div_exact(&self.variables[k])?;
        Ok(ClassicalState { seed, variables })
    }
}

/// A seed with quantum cluster variables in the quantum torus of the initial seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantumState {
    pub seed: Seed,
    pub variables: Vec<QuantumLaurent>,
}

impl QuantumState {
    pub fn initial(seed: Seed) -> Result<Self> {
        let lambda = seed
            .lambda
            .clone()
            .ok_or_else(|| Error::Domain("a quantum seed needs a compatible matrix".into()))?;
        let lambda = Arc::new(lambda);
        let variables = (0..seed.len()).map(|i| QuantumLaurent::variable(&lambda, i)).collect();
        Ok(QuantumState { seed, variables })
    }

    fn current_lambda(&self) -> &IntMatrix {
        self.seed.lambda.as_ref().expect("quantum seeds carry a compatible matrix")
    }

    /// `X^a` in the current cluster for `a` whose only negative entry is `a_k = -1`, returned
    /// as `(q-power in halves, ordered product of the nonnegative powers)` so that
    /// `X^a = q^{h/2} · P · X_k^{-1}`.
    fn exchange_term(&self, k: usize, a: &[i64]) -> (i64, QuantumLaurent) {
        let l = self.current_lambda();
        let mut half = 0;
        for i in 0..a.len() {
            for j in 0..i {
                half += a[i] * a[j] * l[i][j];
            }
        }
        // Moving X_k^{-1} rightwards past X_i^{a_i} costs q^{-λ_ki a_i}.
        half -= 2 * ((k + 1)..a.len()).map(|i| l[k][i] * a[i]).sum::<i64>();
        let lambda0 = self.variables[k].lambda.clone();
        let product = a.iter().enumerate().fold(QuantumLaurent::one(&lambda0), |acc, (i, &ai)| {
            if i == k {
                acc
            } else {
                acc.mul(&self.variables[i].pow(ai as u32))
            }
        });
        (half, product)
    }

    /// The quantum exchange `X_k' = X^a + X^{a'}` with `a = ([b_ik]_+)_i - e_k` and
    /// `a' = ([-b_ik]_+)_i - e_k`, computed in the current cluster.
    pub fn mutate(&self, k: usize) -> Result<QuantumState> {
        let seed = self.seed.mutate(k)?;
        let (mut plus, mut minus) = exchange_exponents(&self.seed, k);
        plus[k] = -1;
        minus[k] = -1;
        let (h1, p1) = self.exchange_term(k, &plus);
        let (h2, p2) = self.exchange_term(k, &minus);
        let numerator = p1
            .scale(&QCoeff::term(h1, BigInt::one()))
            .add(&p2.scale(&QCoeff::term(h2, BigInt::one())));
        let mut variables = self.variables.clone();
        variables[k] = numerator.right_div_exact(&self.variables[k])?;
        Ok(QuantumState { seed, variables })
    }

    /// Pairs `(i, j)` whose variables fail `X_i X_j = q^{λ_ij} X_j X_i` for the current `λ`.
    pub fn commutation_failures(&self) -> Vec<(usize, usize)> {
        let l = self.current_lambda();
        let mut out = Vec::new();
        for i in 0..self.variables.len() {
            for j in (i + 1)..self.variables.len() {
                let left = self.variables[i].mul(&self.variables[j]);
                let right = self.variables[j].mul(&self.variables[i]).scale(&QCoeff::term(2 * l[i][j], BigInt::one()));
                if left != right {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn specialize_q1(&self) -> ClassicalState {
        ClassicalState {
            seed: self.seed.clone(),
            variables: self.variables.iter().map(QuantumLaurent::specialize_q1).collect(),
        }
    }
}

/// Whether every coefficient is positive, a quick sanity check on cluster variables.
pub fn has_positive_coefficients(p: &LaurentPoly) -> bool {
    p.terms().values().all(|c| c.is_positive())
}
