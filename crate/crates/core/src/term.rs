//! Compound conditional terms and the w-reduct rewriting engine.
//!
//! A [`CondTerm`] is a finite tree over basic conditionals `[a|b]` built with
//! negation, conjunction, disjunction and the constants `0` and `1`. The
//! reduct of a term at a world replaces every basic conditional whose
//! antecedent is true there by its truth value and then absorbs constants.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::event::{Event, WorldSpace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("conditional antecedent is the impossible event")]
    BottomAntecedent,
    #[error("consequent and antecedent belong to different world spaces")]
    SpaceMismatch,
}

/// A basic conditional `(a | b)` with `b ≠ ⊥`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasicConditional {
    consequent: Event,
    antecedent: Event,
}

impl BasicConditional {
    pub fn new(consequent: Event, antecedent: Event) -> Result<Self, TermError> {
        if consequent.space() != antecedent.space() {
            return Err(TermError::SpaceMismatch);
        }
        if antecedent.is_bottom() {
            return Err(TermError::BottomAntecedent);
        }
        Ok(BasicConditional { consequent, antecedent })
    }

    pub fn consequent(&self) -> Event {
        self.consequent
    }

    pub fn antecedent(&self) -> Event {
        self.antecedent
    }

    /// Truth value at `world`: `Some(true)` on `ab`, `Some(false)` on `āb`, `None` (void) off `b`.
    pub fn value_at(&self, world: usize) -> Option<bool> {
        if self.antecedent.has(world) {
            Some(self.consequent.has(world))
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CondTerm {
    Zero,
    One,
    Basic(BasicConditional),
    Not(Box<CondTerm>),
    And(Box<CondTerm>, Box<CondTerm>),
    Or(Box<CondTerm>, Box<CondTerm>),
}

impl CondTerm {
    pub fn basic(consequent: Event, antecedent: Event) -> Result<Self, TermError> {
        BasicConditional::new(consequent, antecedent).map(CondTerm::Basic)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        CondTerm::Not(Box::new(self))
    }

    pub fn and(self, other: CondTerm) -> Self {
        CondTerm::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: CondTerm) -> Self {
        CondTerm::Or(Box::new(self), Box::new(other))
    }

    /// Left-nested conjunction; `One` when empty.
    pub fn conjunction<I: IntoIterator<Item = CondTerm>>(terms: I) -> Self {
        terms.into_iter().reduce(CondTerm::and).unwrap_or(CondTerm::One)
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, CondTerm::Zero | CondTerm::One)
    }

    /// Number of basic-conditional leaf occurrences (with repetition).
    pub fn basic_occurrences(&self) -> usize {
        match self {
            CondTerm::Zero | CondTerm::One => 0,
            CondTerm::Basic(_) => 1,
            CondTerm::Not(t) => t.basic_occurrences(),
            CondTerm::And(l, r) | CondTerm::Or(l, r) => l.basic_occurrences() + r.basic_occurrences(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            CondTerm::Zero | CondTerm::One | CondTerm::Basic(_) => 0,
            CondTerm::Not(t) => 1 + t.depth(),
            CondTerm::And(l, r) | CondTerm::Or(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    /// True when no constant occurs anywhere in the tree.
    pub fn is_constant_free(&self) -> bool {
        match self {
            CondTerm::Zero | CondTerm::One => false,
            CondTerm::Basic(_) => true,
            CondTerm::Not(t) => t.is_constant_free(),
            CondTerm::And(l, r) | CondTerm::Or(l, r) => l.is_constant_free() && r.is_constant_free(),
        }
    }

    fn visit_basics<'a>(&'a self, f: &mut impl FnMut(&'a BasicConditional)) {
        match self {
            CondTerm::Zero | CondTerm::One => {}
            CondTerm::Basic(c) => f(c),
            CondTerm::Not(t) => t.visit_basics(f),
            CondTerm::And(l, r) | CondTerm::Or(l, r) => {
                l.visit_basics(f);
                r.visit_basics(f);
            }
        }
    }

    /// The set of distinct basic conditionals occurring in the term.
    pub fn cond_set(&self) -> BTreeSet<BasicConditional> {
        let mut set = BTreeSet::new();
        self.visit_basics(&mut |c| {
            set.insert(*c);
        });
        set
    }

    /// Disjunction of the antecedents of the term's basic conditionals, or `⊤`
    /// for a term without any.
    pub fn antecedent_disjunction(&self, space: &WorldSpace) -> Event {
        let mut bits = 0u64;
        let mut any = false;
        self.visit_basics(&mut |c| {
            bits |= c.antecedent.bits();
            any = true;
        });
        if any {
            space.from_bits(bits).expect("antecedents belong to the space")
        } else {
            space.top()
        }
    }

    /// Reduct step (1): each basic conditional decided at `world` becomes its truth value.
    pub fn substitute(&self, world: usize) -> CondTerm {
        match self {
            CondTerm::Zero | CondTerm::One => self.clone(),
            CondTerm::Basic(c) => match c.value_at(world) {
                Some(true) => CondTerm::One,
                Some(false) => CondTerm::Zero,
                None => self.clone(),
            },
            CondTerm::Not(t) => t.substitute(world).not(),
            CondTerm::And(l, r) => l.substitute(world).and(r.substitute(world)),
            CondTerm::Or(l, r) => l.substitute(world).or(r.substitute(world)),
        }
    }

    /// Reduct step (2): exhaustive constant absorption.
    ///
    /// Rules: `¬1 → 0`, `¬0 → 1`, `r∧1 → r`, `r∧0 → 0`, `r∨1 → 1`, `r∨0 → r`
    /// (both orientations). Children are simplified first, so one bottom-up
    /// pass reaches the fixpoint. The result is a constant or constant-free.
    pub fn simplify(self) -> CondTerm {
        match self {
            CondTerm::Zero | CondTerm::One | CondTerm::Basic(_) => self,
            CondTerm::Not(t) => match t.simplify() {
                CondTerm::One => CondTerm::Zero,
                CondTerm::Zero => CondTerm::One,
                s => s.not(),
            },
            CondTerm::And(l, r) => match (l.simplify(), r.simplify()) {
                (CondTerm::Zero, _) | (_, CondTerm::Zero) => CondTerm::Zero,
                (CondTerm::One, s) | (s, CondTerm::One) => s,
                (l, r) => l.and(r),
            },
            CondTerm::Or(l, r) => match (l.simplify(), r.simplify()) {
                (CondTerm::One, _) | (_, CondTerm::One) => CondTerm::One,
                (CondTerm::Zero, s) | (s, CondTerm::Zero) => s,
                (l, r) => l.or(r),
            },
        }
    }

    /// The w-reduct of the term.
    pub fn reduce(&self, world: usize) -> CondTerm {
        self.substitute(world).simplify()
    }

    /// Distinct reducts over all worlds, excluding the term itself, in order of
    /// first appearance along the world declaration order.
    pub fn proper_reducts(&self, space: &WorldSpace) -> Vec<CondTerm> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for w in 0..space.len() {
            let r = self.reduce(w);
            if r != *self && seen.insert(r.clone()) {
                out.push(r);
            }
        }
        out
    }

    /// Renders the term in the textual term grammar, naming events with `show`.
    /// Parentheses are inserted so the output parses back to the same tree.
    pub fn render(&self, show: &dyn Fn(&Event) -> String) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0, show);
        out
    }

    fn precedence(&self) -> u8 {
        match self {
            CondTerm::Or(..) => 1,
            CondTerm::And(..) => 2,
            _ => 3,
        }
    }

    fn render_into(&self, out: &mut String, min: u8, show: &dyn Fn(&Event) -> String) {
        let parens = self.precedence() < min;
        if parens {
            out.push('(');
        }
        match self {
            CondTerm::Zero => out.push_str("FALSE"),
            CondTerm::One => out.push_str("TRUE"),
            CondTerm::Basic(c) => {
                out.push('[');
                out.push_str(&show(&c.consequent));
                out.push('|');
                out.push_str(&show(&c.antecedent));
                out.push(']');
            }
            CondTerm::Not(t) => {
                out.push('~');
                t.render_into(out, 3, show);
            }
            CondTerm::And(l, r) => {
                l.render_into(out, 2, show);
                out.push_str(" & ");
                r.render_into(out, 3, show);
            }
            CondTerm::Or(l, r) => {
                l.render_into(out, 1, show);
                out.push_str(" v ");
                r.render_into(out, 2, show);
            }
        }
        if parens {
            out.push(')');
        }
    }
}

impl fmt::Display for CondTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&|e| e.to_string()))
    }
}
