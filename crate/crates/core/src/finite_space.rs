//! Finite probability spaces small enough to check exhaustively.
//!
//! Events are bitmasks over outcome indices, so spaces are capped at
//! [`MAX_SPACE_OUTCOMES`] outcomes. Event families are stored in full and are
//! capped at [`MAX_OUTCOMES`] outcomes.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::distribution::DiscreteDist;
use crate::error::{Error, Result};

/// Largest outcome set for σ-algebra generation and power sets.
pub const MAX_OUTCOMES: usize = 20;
pub const MAX_SPACE_OUTCOMES: usize = 64;
/// Tolerance for probability identities.
pub const PROB_TOL: f64 = 1e-12;

/// Subset of outcome indices, bit `i` set iff outcome `i` is in the event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Event(pub u64);

impl Event {
    pub const EMPTY: Event = Event(0);

    pub fn full(n: usize) -> Event {
        if n == 64 {
            Event(u64::MAX)
        } else {
            Event((1u64 << n) - 1)
        }
    }

    pub fn from_indices(n: usize, indices: &[usize]) -> Result<Event> {
        let mut bits = 0u64;
        for &i in indices {
            if i >= n {
                return Err(Error::OutOfRange(format!(
                    "outcome index {i} not below {n}"
                )));
            }
            bits |= 1 << i;
        }
        Ok(Event(bits))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn union(self, other: Event) -> Event {
        Event(self.0 | other.0)
    }

    pub fn intersection(self, other: Event) -> Event {
        Event(self.0 & other.0)
    }

    pub fn complement(self, n: usize) -> Event {
        Event(!self.0 & Event::full(n).0)
    }

    pub fn is_disjoint(self, other: Event) -> bool {
        self.0 & other.0 == 0
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }
}

/// Family of events over `n` outcomes containing ∅ and closed under
/// complement and union.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventFamily {
    n: usize,
    events: BTreeSet<Event>,
}

impl EventFamily {
    /// Validates closure before accepting the family.
    pub fn new(n: usize, events: impl IntoIterator<Item = Event>) -> Result<Self> {
        check_size(n, MAX_OUTCOMES)?;
        let events: BTreeSet<Event> = events.into_iter().collect();
        let full = Event::full(n);
        if let Some(e) = events.iter().find(|e| e.0 & !full.0 != 0) {
            return Err(Error::OutOfRange(format!(
                "event {:#b} exceeds {n} outcomes",
                e.0
            )));
        }
        let family = EventFamily { n, events };
        family.check_closed()?;
        Ok(family)
    }

    pub fn n_outcomes(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn contains(&self, e: Event) -> bool {
        self.events.contains(&e)
    }

    pub fn iter(&self) -> impl Iterator<Item = Event> + '_ {
        self.events.iter().copied()
    }

    fn check_closed(&self) -> Result<()> {
        if !self.contains(Event::EMPTY) {
            return Err(Error::NotSigmaAlgebra("missing the empty set".into()));
        }
        for &e in &self.events {
            if !self.contains(e.complement(self.n)) {
                return Err(Error::NotSigmaAlgebra(format!(
                    "complement of {:#b} missing",
                    e.0
                )));
            }
        }
        for &a in &self.events {
            for &b in &self.events {
                if !self.contains(a.union(b)) {
                    return Err(Error::NotSigmaAlgebra(format!(
                        "union of {:#b} and {:#b} missing",
                        a.0, b.0
                    )));
                }
            }
        }
        Ok(())
    }

    /// Minimal nonempty events; every event is a union of these.
    pub fn blocks(&self) -> Vec<Event> {
        let mut seen = HashSet::new();
        let mut blocks = Vec::new();
        for i in 0..self.n {
            let block = self
                .events
                .iter()
                .filter(|e| e.contains(i))
                .fold(Event::full(self.n), |acc, &e| acc.intersection(e));
            if seen.insert(block) {
                blocks.push(block);
            }
        }
        blocks
    }
}

fn check_size(n: usize, limit: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptyInput(
            "a probability space needs outcomes".into(),
        ));
    }
    if n > limit {
        return Err(Error::SizeLimit(format!(
            "{n} outcomes exceed the limit of {limit}"
        )));
    }
    Ok(())
}

/// Smallest σ-algebra on `{0, …, n-1}` containing the generators.
///
/// Outcomes are grouped by their membership pattern across the generators;
/// the result is every union of those blocks.
pub fn generate_sigma_algebra(n: usize, generators: &[Vec<usize>]) -> Result<EventFamily> {
    check_size(n, MAX_OUTCOMES)?;
    let gens = generators
        .iter()
        .map(|g| Event::from_indices(n, g))
        .collect::<Result<Vec<_>>>()?;
    let mut by_pattern: BTreeMap<Vec<bool>, u64> = BTreeMap::new();
    for i in 0..n {
        let pattern: Vec<bool> = gens.iter().map(|g| g.contains(i)).collect();
        *by_pattern.entry(pattern).or_default() |= 1 << i;
    }
    let blocks: Vec<u64> = by_pattern.into_values().collect();
    let mut events = BTreeSet::new();
    for choice in 0u32..(1 << blocks.len()) {
        let bits = blocks
            .iter()
            .enumerate()
            .filter(|(k, _)| choice >> k & 1 == 1)
            .fold(0, |acc, (_, b)| acc | b);
        events.insert(Event(bits));
    }
    Ok(EventFamily { n, events })
}

/// Outcome labels with nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteProbSpace {
    outcomes: Vec<String>,
    weights: Vec<f64>,
}

impl FiniteProbSpace {
    pub fn new(outcomes: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        check_size(outcomes.len(), MAX_SPACE_OUTCOMES)?;
        if outcomes.len() != weights.len() {
            return Err(Error::InvalidParams(format!(
                "{} outcomes but {} weights",
                outcomes.len(),
                weights.len()
            )));
        }
        let distinct: HashSet<&String> = outcomes.iter().collect();
        if distinct.len() != outcomes.len() {
            return Err(Error::InvalidParams(
                "outcome labels must be distinct".into(),
            ));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParams(format!("weight {w} is negative")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidParams(format!("weights sum to {total}")));
        }
        Ok(FiniteProbSpace { outcomes, weights })
    }

    pub fn uniform(labels: &[&str]) -> Result<Self> {
        let w = 1.0 / labels.len() as f64;
        Self::new(
            labels.iter().map(|s| s.to_string()).collect(),
            vec![w; labels.len()],
        )
    }

    /// Fair die with outcomes labelled "1" to "6".
    pub fn fair_die() -> Self {
        Self::uniform(&["1", "2", "3", "4", "5", "6"]).expect("valid die")
    }

    /// Product space with outcome `(i, j)` at index `i * other.len() + j`.
    pub fn product(&self, other: &FiniteProbSpace) -> Result<Self> {
        let mut outcomes = Vec::with_capacity(self.len() * other.len());
        let mut weights = Vec::with_capacity(self.len() * other.len());
        for (a, wa) in self.outcomes.iter().zip(&self.weights) {
            for (b, wb) in other.outcomes.iter().zip(&other.weights) {
                outcomes.push(format!("({a},{b})"));
                weights.push(wa * wb);
            }
        }
        check_size(outcomes.len(), MAX_SPACE_OUTCOMES)?;
        // products of weights can drift a few ulps from one
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidParams(format!(
                "product weights sum to {total}"
            )));
        }
        Ok(FiniteProbSpace { outcomes, weights })
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Measure induced by the weights.
    pub fn prob(&self, e: Event) -> f64 {
        e.indices()
            .take_while(|&i| i < self.len())
            .map(|i| self.weights[i])
            .sum()
    }

    pub fn powerset(&self) -> Result<EventFamily> {
        let n = self.len();
        check_size(n, MAX_OUTCOMES)?;
        Ok(EventFamily {
            n,
            events: (0..=Event::full(n).0).map(Event).collect(),
        })
    }
}

/// Real random variable given by its value at each outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteRV {
    values: Vec<f64>,
}

impl FiniteRV {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParams(format!("random variable value {v}")));
        }
        Ok(FiniteRV { values })
    }

    pub fn identity_on(space: &FiniteProbSpace) -> Result<Self> {
        let values = space
            .outcomes()
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::InvalidParams(format!("outcome `{s}` is not numeric")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }

    pub fn constant(space: &FiniteProbSpace, c: f64) -> Result<Self> {
        Self::new(vec![c; space.len()])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn check_total(&self, space: &FiniteProbSpace) -> Result<()> {
        if self.values.len() != space.len() {
            return Err(Error::OutOfRange(format!(
                "random variable has {} values for {} outcomes",
                self.values.len(),
                space.len()
            )));
        }
        Ok(())
    }

    /// Preimage of `{v}`.
    pub fn preimage(&self, v: f64) -> Event {
        Event(
            self.values
                .iter()
                .enumerate()
                .filter(|(_, &x)| x == v)
                .fold(0, |acc, (i, _)| acc | 1 << i),
        )
    }

    fn distinct_values(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

/// Why a set function failed to be a probability measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureViolation {
    EmptySetNonzero,
    OutOfUnitInterval,
    TotalMassNotOne,
    NotAdditive,
    OmegaMissing,
}

/// Checks the probability axioms for `mu` on `family`.
///
/// Finite additivity is checked as `mu(A) = Σ mu(B)` over the blocks `B ⊆ A`,
/// which on a finite algebra is equivalent to `mu(A ∪ B) = mu(A) + mu(B)` for
/// all disjoint pairs.
pub fn check_probability_measure(
    space: &FiniteProbSpace,
    family: &EventFamily,
    mu: impl Fn(Event) -> f64,
) -> std::result::Result<(), MeasureViolation> {
    let n = space.len();
    let omega = Event::full(n);
    if family.n_outcomes() != n || !family.contains(omega) {
        return Err(MeasureViolation::OmegaMissing);
    }
    if mu(Event::EMPTY).abs() > PROB_TOL {
        return Err(MeasureViolation::EmptySetNonzero);
    }
    if family
        .iter()
        .any(|e| !(mu(e) >= -PROB_TOL && mu(e) <= 1.0 + PROB_TOL))
    {
        return Err(MeasureViolation::OutOfUnitInterval);
    }
    if (mu(omega) - 1.0).abs() > PROB_TOL {
        return Err(MeasureViolation::TotalMassNotOne);
    }
    let blocks = family.blocks();
    let block_mass: Vec<f64> = blocks.iter().map(|&b| mu(b)).collect();
    for e in family.iter() {
        let parts: f64 = blocks
            .iter()
            .zip(&block_mass)
            .filter(|(b, _)| b.intersection(e) == **b)
            .map(|(_, m)| m)
            .sum();
        if (mu(e) - parts).abs() > PROB_TOL {
            return Err(MeasureViolation::NotAdditive);
        }
    }
    Ok(())
}

pub fn is_probability_measure(
    space: &FiniteProbSpace,
    family: &EventFamily,
    mu: impl Fn(Event) -> f64,
) -> bool {
    check_probability_measure(space, family, mu).is_ok()
}

/// Mutual independence of `rvs`.
///
/// Every choice of a singleton preimage (or the whole space) per variable is
/// tested, which covers every subfamily and every event in the generated
/// σ-algebras.
pub fn are_independent(space: &FiniteProbSpace, rvs: &[FiniteRV]) -> Result<bool> {
    if rvs.is_empty() {
        return Err(Error::EmptyInput("no random variables".into()));
    }
    for rv in rvs {
        rv.check_total(space)?;
    }
    let omega = Event::full(space.len());
    let choices: Vec<Vec<Event>> = rvs
        .iter()
        .map(|rv| {
            let mut events: Vec<Event> = rv
                .distinct_values()
                .into_iter()
                .map(|v| rv.preimage(v))
                .collect();
            events.push(omega);
            events
        })
        .collect();
    let mut cursor = vec![0usize; rvs.len()];
    loop {
        let mut joint = omega;
        let mut product = 1.0;
        for (k, &c) in cursor.iter().enumerate() {
            let e = choices[k][c];
            joint = joint.intersection(e);
            product *= space.prob(e);
        }
        if (space.prob(joint) - product).abs() > PROB_TOL {
            return Ok(false);
        }
        // odometer increment
        let mut k = 0;
        loop {
            if k == cursor.len() {
                return Ok(true);
            }
            cursor[k] += 1;
            if cursor[k] < choices[k].len() {
                break;
            }
            cursor[k] = 0;
            k += 1;
        }
    }
}

/// Checks each listed group of variable indices for mutual independence.
pub fn are_independent_groups(
    space: &FiniteProbSpace,
    rvs: &[FiniteRV],
    groups: &[Vec<usize>],
) -> Result<bool> {
    for group in groups {
        let selected = group
            .iter()
            .map(|&i| {
                rvs.get(i)
                    .cloned()
                    .ok_or_else(|| Error::OutOfRange(format!("random variable index {i}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if !are_independent(space, &selected)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Distribution of `rv`: distinct values weighted by preimage mass.
/// Values whose preimage has zero mass are dropped.
pub fn pushforward(space: &FiniteProbSpace, rv: &FiniteRV) -> Result<DiscreteDist> {
    rv.check_total(space)?;
    let mut pairs: Vec<(f64, f64)> = rv
        .values
        .iter()
        .copied()
        .zip(space.weights.iter().copied())
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut points = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    for (x, w) in pairs {
        if points.last() == Some(&x) {
            *weights.last_mut().unwrap() += w;
        } else {
            points.push(x);
            weights.push(w);
        }
    }
    let atoms = points
        .into_iter()
        .zip(weights)
        .filter(|&(_, w)| w > 0.0)
        .collect();
    DiscreteDist::new(atoms)
}

pub fn expectation(space: &FiniteProbSpace, rv: &FiniteRV) -> Result<f64> {
    rv.check_total(space)?;
    Ok(space
        .weights
        .iter()
        .zip(&rv.values)
        .map(|(w, x)| w * x)
        .sum())
}

pub fn variance(space: &FiniteProbSpace, rv: &FiniteRV) -> Result<f64> {
    let m = expectation(space, rv)?;
    Ok(space
        .weights
        .iter()
        .zip(&rv.values)
        .map(|(w, x)| w * (x - m) * (x - m))
        .sum())
}
