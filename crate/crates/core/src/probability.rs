//! Full conditional probabilities on a finite algebra.
//!
//! A [`ConditionalProbability`] is a layered family of distributions whose
//! supports partition the worlds. `P(a|b)` is read off the first layer that
//! gives `b` positive mass, which yields a conditional probability defined
//! for every `b ≠ ⊥`, including events of unconditional probability zero.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::event::{Event, WorldSpace};
use crate::rational::{self, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProbabilityError {
    #[error("conditioning on the impossible event")]
    BottomCondition,
    #[error("event does not belong to this world space")]
    SpaceMismatch,
    #[error("no layers given")]
    NoLayers,
    #[error("layer {0} is empty")]
    EmptyLayer(usize),
    #[error("layer {layer}: world {world:?} has non-positive weight {weight}")]
    NonPositive { layer: usize, world: String, weight: String },
    #[error("layer {layer}: weights sum to {sum}, expected 1")]
    NotNormalized { layer: usize, sum: String },
    #[error("world {0:?} appears in more than one layer")]
    Overlap(String),
    #[error("world {0:?} is not covered by any layer")]
    Uncovered(String),
    #[error("world index {0} out of range")]
    BadWorld(usize),
}

/// One layer: positive weights on a support, summing to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layer {
    support: Event,
    weights: Vec<Rational>,
}

impl Layer {
    pub fn support(&self) -> Event {
        self.support
    }

    /// Per-world weights, zero off the support.
    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    fn mass(&self, e: &Event) -> Rational {
        e.worlds().fold(Rational::zero(), |acc, w| acc + &self.weights[w])
    }
}

#[derive(Debug, Clone)]
pub struct ConditionalProbability {
    space: WorldSpace,
    layers: Vec<Layer>,
}

impl ConditionalProbability {
    /// Builds a layered conditional probability from `(world index, weight)` lists.
    pub fn new(space: &WorldSpace, layers: Vec<Vec<(usize, Rational)>>) -> Result<Self, ProbabilityError> {
        if layers.is_empty() {
            return Err(ProbabilityError::NoLayers);
        }
        let n = space.len();
        let mut owner: Vec<Option<usize>> = vec![None; n];
        let mut built = Vec::with_capacity(layers.len());
        for (i, entries) in layers.into_iter().enumerate() {
            if entries.is_empty() {
                return Err(ProbabilityError::EmptyLayer(i));
            }
            let mut weights = vec![Rational::zero(); n];
            let mut bits = 0u64;
            let mut sum = Rational::zero();
            for (w, weight) in entries {
                if w >= n {
                    return Err(ProbabilityError::BadWorld(w));
                }
                if !weight.is_positive() {
                    return Err(ProbabilityError::NonPositive {
                        layer: i,
                        world: space.name(w).to_string(),
                        weight: rational::format(&weight),
                    });
                }
                if owner[w].is_some() {
                    return Err(ProbabilityError::Overlap(space.name(w).to_string()));
                }
                owner[w] = Some(i);
                bits |= 1 << w;
                sum += &weight;
                weights[w] = weight;
            }
            if !sum.is_one() {
                return Err(ProbabilityError::NotNormalized { layer: i, sum: rational::format(&sum) });
            }
            let support = space.from_bits(bits).expect("indices checked");
            built.push(Layer { support, weights });
        }
        if let Some(w) = owner.iter().position(Option::is_none) {
            return Err(ProbabilityError::Uncovered(space.name(w).to_string()));
        }
        Ok(ConditionalProbability { space: space.clone(), layers: built })
    }

    /// A single full-support layer.
    pub fn positive(space: &WorldSpace, weights: Vec<Rational>) -> Result<Self, ProbabilityError> {
        Self::new(space, vec![weights.into_iter().enumerate().collect()])
    }

    pub fn uniform(space: &WorldSpace) -> Self {
        let n = space.len() as i64;
        Self::positive(space, vec![rational::ratio(1, n); space.len()]).expect("uniform weights are valid")
    }

    pub fn space(&self) -> &WorldSpace {
        &self.space
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// True when there is exactly one layer, i.e. every world has positive probability.
    pub fn is_positive(&self) -> bool {
        self.layers.len() == 1
    }

    fn check(&self, e: &Event) -> Result<(), ProbabilityError> {
        if self.space.contains(e) {
            Ok(())
        } else {
            Err(ProbabilityError::SpaceMismatch)
        }
    }

    /// Index of the first layer giving `b` positive mass.
    pub fn layer_for(&self, b: &Event) -> Result<usize, ProbabilityError> {
        self.check(b)?;
        if b.is_bottom() {
            return Err(ProbabilityError::BottomCondition);
        }
        Ok(self
            .layers
            .iter()
            .position(|l| l.support.bits() & b.bits() != 0)
            .expect("layers cover every world"))
    }

    pub fn cond_prob(&self, a: &Event, b: &Event) -> Result<Rational, ProbabilityError> {
        self.check(a)?;
        let layer = &self.layers[self.layer_for(b)?];
        let ab = a.conj(b).expect("same space");
        Ok(layer.mass(&ab) / layer.mass(b))
    }

    /// `P(a) = P(a|⊤)`.
    pub fn prob(&self, a: &Event) -> Result<Rational, ProbabilityError> {
        self.cond_prob(a, &self.space.top())
    }

    /// `P({w} | b)` for every world, in declaration order.
    pub fn conditional_weights(&self, b: &Event) -> Result<Vec<Rational>, ProbabilityError> {
        let layer = &self.layers[self.layer_for(b)?];
        let mass = layer.mass(b);
        Ok((0..self.space.len())
            .map(|w| if b.has(w) { &layer.weights[w] / &mass } else { Rational::zero() })
            .collect())
    }
}

/// Anything that assigns a value to every pair `(a, b)` with `b ≠ ⊥`.
pub trait ConditionalAssessment {
    fn space(&self) -> &WorldSpace;
    fn value(&self, a: &Event, b: &Event) -> Rational;
}

impl ConditionalAssessment for ConditionalProbability {
    fn space(&self) -> &WorldSpace {
        &self.space
    }

    fn value(&self, a: &Event, b: &Event) -> Rational {
        self.cond_prob(a, b).expect("validated inputs")
    }
}

/// An explicit table of values, e.g. a hand-built assessment to be validated.
#[derive(Debug, Clone)]
pub struct ExplicitTable {
    space: WorldSpace,
    values: HashMap<(u64, u64), Rational>,
}

impl ExplicitTable {
    pub fn from_fn(space: &WorldSpace, mut f: impl FnMut(&Event, &Event) -> Rational) -> Self {
        let mut values = HashMap::new();
        let events: Vec<Event> = space.all_events().collect();
        for b in events.iter().filter(|b| !b.is_bottom()) {
            for a in &events {
                values.insert((a.bits(), b.bits()), f(a, b));
            }
        }
        ExplicitTable { space: space.clone(), values }
    }

    pub fn set(&mut self, a: &Event, b: &Event, value: Rational) {
        self.values.insert((a.bits(), b.bits()), value);
    }
}

impl ConditionalAssessment for ExplicitTable {
    fn space(&self) -> &WorldSpace {
        &self.space
    }

    fn value(&self, a: &Event, b: &Event) -> Rational {
        self.values[&(a.bits(), b.bits())].clone()
    }
}

/// First failed check found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Range { a: Event, b: Event, value: Rational },
    Total { b: Event, value: Rational },
    Additivity { a: Event, c: Event, b: Event },
    SelfCondition { b: Event, value: Rational },
    Chain { a: Event, b: Event, c: Event, lhs: Rational, rhs: Rational },
}

impl Violation {
    pub fn describe(&self, space: &WorldSpace) -> String {
        let s = |e: &Event| space.show(e);
        let f = rational::format;
        match self {
            Violation::Range { a, b, value } => format!("P({}|{}) = {} outside [0,1]", s(a), s(b), f(value)),
            Violation::Total { b, value } => format!("P(TOP|{}) = {} != 1", s(b), f(value)),
            Violation::Additivity { a, c, b } => {
                format!("P(.|{}) not additive on disjoint {} and {}", s(b), s(a), s(c))
            }
            Violation::SelfCondition { b, value } => format!("P({0}|{0}) = {1} != 1", s(b), f(value)),
            Violation::Chain { a, b, c, lhs, rhs } => format!(
                "P(ab|c) = {} but P(a|bc)P(b|c) = {} for a={}, b={}, c={}",
                f(lhs),
                f(rhs),
                s(a),
                s(b),
                s(c)
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: u64,
    pub violation: Option<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.violation {
            None => write!(f, "pass ({} checks)", self.checks),
            Some(v) => write!(f, "fail after {} checks: {:?}", self.checks, v),
        }
    }
}

/// Exhaustively checks the conditional probability axioms on every event:
///
/// 1. `P(·|b)` is a finitely additive probability for each `b ≠ ⊥`;
/// 2. `P(b|b) = 1`;
/// 3. `P(ab|c) = P(a|bc)·P(b|c)` whenever `bc ≠ ⊥`.
///
/// Cost is `O(8^n)` table lookups.
pub fn validate(p: &impl ConditionalAssessment) -> ValidationReport {
    let space = p.space();
    let events: Vec<Event> = space.all_events().collect();
    let conditions: Vec<&Event> = events.iter().filter(|e| !e.is_bottom()).collect();
    let top = space.top();
    let mut checks = 0u64;
    let fail = |checks, v| ValidationReport { checks, violation: Some(v) };

    for b in &conditions {
        for a in &events {
            checks += 1;
            let value = p.value(a, b);
            if value.is_negative() || value > Rational::one() {
                return fail(checks, Violation::Range { a: *a, b: **b, value });
            }
        }
        checks += 1;
        let total = p.value(&top, b);
        if !total.is_one() {
            return fail(checks, Violation::Total { b: **b, value: total });
        }
        for a in &events {
            let rest = a.neg(space).expect("same space");
            // every c ⊆ ¬a, by submask enumeration
            let mut sub = rest.bits();
            loop {
                let c = space.from_bits(sub).expect("submask");
                let joint = a.disj(&c).expect("same space");
                checks += 1;
                if p.value(&joint, b) != p.value(a, b) + p.value(&c, b) {
                    return fail(checks, Violation::Additivity { a: *a, c, b: **b });
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest.bits();
            }
        }
        checks += 1;
        let own = p.value(b, b);
        if !own.is_one() {
            return fail(checks, Violation::SelfCondition { b: **b, value: own });
        }
    }

    for a in &events {
        for b in &conditions {
            for c in &conditions {
                let bc = b.conj(c).expect("same space");
                if bc.is_bottom() {
                    continue;
                }
                checks += 1;
                let ab = a.conj(b).expect("same space");
                let lhs = p.value(&ab, c);
                let rhs = p.value(a, &bc) * p.value(b, c);
                if lhs != rhs {
                    return fail(checks, Violation::Chain { a: *a, b: **b, c: **c, lhs, rhs });
                }
            }
        }
    }
    ValidationReport { checks, violation: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn space3() -> WorldSpace {
        WorldSpace::numbered(3).unwrap()
    }

    #[test]
    fn uniform_ratio() {
        let s = space3();
        let p = ConditionalProbability::uniform(&s);
        let a = s.event(["w1"]).unwrap();
        let b = s.event(["w1", "w2"]).unwrap();
        assert_eq!(p.cond_prob(&a, &b).unwrap(), ratio(1, 2));
        assert_eq!(p.prob(&b).unwrap(), ratio(2, 3));
        assert_eq!(p.prob(&s.top()).unwrap(), ratio(1, 1));
        assert_eq!(p.prob(&s.bottom()).unwrap(), ratio(0, 1));
        for b in s.all_events().filter(|e| !e.is_bottom()) {
            assert_eq!(p.cond_prob(&b, &b).unwrap(), ratio(1, 1));
        }
    }

    #[test]
    fn second_layer_handles_null_events() {
        let s = space3();
        let p = ConditionalProbability::new(
            &s,
            vec![vec![(0, ratio(1, 2)), (1, ratio(1, 2))], vec![(2, ratio(1, 1))]],
        )
        .unwrap();
        let w3 = s.event(["w3"]).unwrap();
        assert_eq!(p.prob(&w3).unwrap(), ratio(0, 1));
        assert_eq!(p.cond_prob(&w3, &w3).unwrap(), ratio(1, 1));
        assert_eq!(p.layer_for(&w3).unwrap(), 1);
        assert!(!p.is_positive());
        assert!(validate(&p).passed());
    }

    #[test]
    fn bottom_condition_is_a_domain_error() {
        let s = space3();
        let p = ConditionalProbability::uniform(&s);
        assert_eq!(p.cond_prob(&s.top(), &s.bottom()), Err(ProbabilityError::BottomCondition));
    }

    #[test]
    fn construction_errors() {
        let s = space3();
        let h = ratio(1, 2);
        assert_eq!(ConditionalProbability::new(&s, vec![]).unwrap_err(), ProbabilityError::NoLayers);
        assert!(matches!(
            ConditionalProbability::new(&s, vec![vec![(0, h.clone()), (1, h.clone())]]),
            Err(ProbabilityError::Uncovered(_))
        ));
        assert!(matches!(
            ConditionalProbability::new(&s, vec![vec![(0, h.clone()), (1, h.clone()), (2, ratio(0, 1))]]),
            Err(ProbabilityError::NonPositive { .. })
        ));
        assert!(matches!(
            ConditionalProbability::new(&s, vec![vec![(0, h.clone()), (1, h.clone()), (2, h.clone())]]),
            Err(ProbabilityError::NotNormalized { .. })
        ));
        assert!(matches!(
            ConditionalProbability::new(
                &s,
                vec![vec![(0, h.clone()), (1, h.clone())], vec![(1, ratio(1, 2)), (2, ratio(1, 2))]]
            ),
            Err(ProbabilityError::Overlap(_))
        ));
    }

    #[test]
    fn validate_single_layer_uniform() {
        let s = space3();
        let report = validate(&ConditionalProbability::uniform(&s));
        assert!(report.passed(), "{report}");
        assert!(report.checks > 0);
    }

    #[test]
    fn validate_catches_chain_rule_violation() {
        let s = space3();
        let p = ConditionalProbability::uniform(&s);
        let a = s.event(["w1"]).unwrap();
        let b = s.event(["w1", "w2"]).unwrap();
        let not_a = a.neg(&s).unwrap();
        let mut table = ExplicitTable::from_fn(&s, |x, y| p.cond_prob(x, y).unwrap());
        // shift P(·|b) between w1 and w2: still a probability, but P(a|b) != P(ab)/P(b)
        table.set(&a, &b, ratio(2, 3));
        table.set(&not_a.conj(&b).unwrap(), &b, ratio(1, 3));
        table.set(&not_a, &b, ratio(1, 3));
        table.set(&s.event(["w1", "w3"]).unwrap(), &b, ratio(2, 3));
        table.set(&s.event(["w2", "w3"]).unwrap(), &b, ratio(1, 3));
        let report = validate(&table);
        match report.violation {
            Some(Violation::Chain { lhs, rhs, .. }) => assert_ne!(lhs, rhs),
            other => panic!("expected chain violation, got {other:?}"),
        }
    }

    #[test]
    fn validate_catches_non_additive_table() {
        let s = WorldSpace::numbered(2).unwrap();
        let table = ExplicitTable::from_fn(&s, |a, _| if a.is_bottom() { ratio(0, 1) } else { ratio(1, 1) });
        assert!(matches!(validate(&table).violation, Some(Violation::Additivity { .. })));
    }
}
