//! The Boolean algebra of conditionals, decided through its atoms.
//!
//! With worlds `α1 … αn`, every ordering of the worlds gives an atom
//! `(β1|⊤) ∧ (β2|¬β1) ∧ … ∧ (β_{n−1}|β_{n−1} ∨ βn)`. A term lies above an
//! atom iff it evaluates to true when each basic conditional `(a|b)` reads
//! the first world of the ordering that belongs to `b`. Equivalence and
//! order between terms are decided by comparing the resulting atom sets.

use std::env;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::event::WorldSpace;
use crate::probability::{ConditionalProbability, ProbabilityError};
use crate::rational::Rational;
use crate::term::CondTerm;

/// Default bound on the number of worlds for atom enumeration (8! = 40320 atoms).
pub const DEFAULT_ATOM_LIMIT: usize = 8;

/// Environment variable overriding [`DEFAULT_ATOM_LIMIT`].
pub const ATOM_LIMIT_ENV: &str = "TRIEVENT_ATOM_LIMIT";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("{worlds} worlds exceed the atom limit of {limit} ({worlds}! atoms); raise --atom-limit or {ATOM_LIMIT_ENV}")]
    AtomLimit { worlds: usize, limit: usize },
    #[error("the canonical measure needs a positive probability (single full-support layer)")]
    NotPositive,
    #[error("term belongs to a different world space")]
    SpaceMismatch,
    #[error(transparent)]
    Probability(#[from] ProbabilityError),
}

/// The atom limit from the environment, falling back to the default.
pub fn atom_limit_from_env() -> usize {
    env::var(ATOM_LIMIT_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_ATOM_LIMIT)
}

/// An ordering of all worlds; the atom is determined by its first `n − 1` entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomSequence {
    order: Vec<usize>,
}

impl AtomSequence {
    /// Builds the atom for `seq`, which lists `n − 1` distinct worlds.
    pub fn new(space: &WorldSpace, seq: &[usize]) -> Option<Self> {
        let n = space.len();
        if seq.len() + 1 != n {
            return None;
        }
        let mut seen = vec![false; n];
        for &w in seq {
            if w >= n || seen[w] {
                return None;
            }
            seen[w] = true;
        }
        let last = seen.iter().position(|s| !s).expect("one world left");
        let mut order = seq.to_vec();
        order.push(last);
        Some(AtomSequence { order })
    }

    /// The `n − 1` listed worlds.
    pub fn seq(&self) -> &[usize] {
        &self.order[..self.order.len() - 1]
    }

    /// The listed worlds followed by the omitted one.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// `⟨w1, w2⟩`
    pub fn show(&self, space: &WorldSpace) -> String {
        let names: Vec<&str> = self.seq().iter().map(|&w| space.name(w)).collect();
        format!("⟨{}⟩", names.join(", "))
    }
}

/// All `n!` atoms, in lexicographic order of world indices.
pub fn enumerate_atoms(space: &WorldSpace, limit: usize) -> Result<Vec<AtomSequence>, AlgebraError> {
    let n = space.len();
    if n > limit {
        return Err(AlgebraError::AtomLimit { worlds: n, limit });
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity((1..=n).product());
    loop {
        out.push(AtomSequence { order: perm.clone() });
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(out)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("pivot has a successor");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// The conjunction `(β1|⊤) ∧ (β2|¬β1) ∧ … ∧ (β_{n−1}|β_{n−1} ∨ βn)`.
pub fn atom_term(space: &WorldSpace, atom: &AtomSequence) -> CondTerm {
    let mut remaining = space.top();
    let mut parts = Vec::with_capacity(atom.seq().len());
    for &w in atom.seq() {
        let beta = space.singleton(w).expect("valid world");
        parts.push(CondTerm::basic(beta, remaining).expect("remaining worlds are non-empty"));
        remaining = remaining.conj(&beta.neg(space).expect("same space")).expect("same space");
    }
    CondTerm::conjunction(parts)
}

/// Truth value of `t` at the atom.
pub fn eval_under_atom(t: &CondTerm, atom: &AtomSequence) -> bool {
    match t {
        CondTerm::Zero => false,
        CondTerm::One => true,
        CondTerm::Basic(c) => {
            let b = c.antecedent();
            let first = atom.order.iter().copied().find(|&w| b.has(w)).expect("antecedent is not bottom");
            c.consequent().has(first)
        }
        CondTerm::Not(s) => !eval_under_atom(s, atom),
        CondTerm::And(l, r) => eval_under_atom(l, atom) && eval_under_atom(r, atom),
        CondTerm::Or(l, r) => eval_under_atom(l, atom) || eval_under_atom(r, atom),
    }
}

/// A set of atoms, as a bitset over the enumeration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AtomSet {
    len: usize,
    blocks: Vec<u64>,
}

impl AtomSet {
    fn empty(len: usize) -> Self {
        AtomSet { len, blocks: vec![0; len.div_ceil(64)] }
    }

    fn insert(&mut self, i: usize) {
        self.blocks[i / 64] |= 1 << (i % 64);
    }

    fn trim(mut self) -> Self {
        if !self.len.is_multiple_of(64) {
            if let Some(last) = self.blocks.last_mut() {
                *last &= (1u64 << (self.len % 64)) - 1;
            }
        }
        self
    }

    pub fn universe(&self) -> usize {
        self.len
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.blocks[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.contains(i))
    }

    pub fn complement(&self) -> AtomSet {
        AtomSet { len: self.len, blocks: self.blocks.iter().map(|b| !b).collect() }.trim()
    }

    pub fn intersection(&self, other: &AtomSet) -> AtomSet {
        AtomSet { len: self.len, blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a & b).collect() }
    }

    pub fn union(&self, other: &AtomSet) -> AtomSet {
        AtomSet { len: self.len, blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a | b).collect() }
    }

    pub fn is_subset(&self, other: &AtomSet) -> bool {
        self.blocks.iter().zip(&other.blocks).all(|(a, b)| a & !b == 0)
    }
}

/// Outcome of comparing two terms atom by atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    Equivalent,
    /// First atom lying below exactly one of the two terms; `in_left` tells which.
    Differ { atom: AtomSequence, in_left: bool },
}

/// The algebra of conditionals over one world space, with its atoms enumerated.
#[derive(Debug, Clone)]
pub struct ConditionalAlgebra {
    space: WorldSpace,
    atoms: Vec<AtomSequence>,
}

impl ConditionalAlgebra {
    pub fn new(space: &WorldSpace, limit: usize) -> Result<Self, AlgebraError> {
        Ok(ConditionalAlgebra { space: space.clone(), atoms: enumerate_atoms(space, limit)? })
    }

    pub fn space(&self) -> &WorldSpace {
        &self.space
    }

    pub fn atoms(&self) -> &[AtomSequence] {
        &self.atoms
    }

    fn check(&self, t: &CondTerm) -> Result<(), AlgebraError> {
        let id = self.space.id();
        if t.cond_set().iter().all(|c| c.antecedent().space() == id && c.consequent().space() == id) {
            Ok(())
        } else {
            Err(AlgebraError::SpaceMismatch)
        }
    }

    pub fn atom_set(&self, t: &CondTerm) -> Result<AtomSet, AlgebraError> {
        self.check(t)?;
        let mut set = AtomSet::empty(self.atoms.len());
        for (i, atom) in self.atoms.iter().enumerate() {
            if eval_under_atom(t, atom) {
                set.insert(i);
            }
        }
        Ok(set)
    }

    pub fn compare(&self, t: &CondTerm, s: &CondTerm) -> Result<Equivalence, AlgebraError> {
        let (x, y) = (self.atom_set(t)?, self.atom_set(s)?);
        match (0..self.atoms.len()).find(|&i| x.contains(i) != y.contains(i)) {
            None => Ok(Equivalence::Equivalent),
            Some(i) => Ok(Equivalence::Differ { atom: self.atoms[i].clone(), in_left: x.contains(i) }),
        }
    }

    pub fn equiv(&self, t: &CondTerm, s: &CondTerm) -> Result<bool, AlgebraError> {
        Ok(self.atom_set(t)? == self.atom_set(s)?)
    }

    /// `[t] ≤ [s]`
    pub fn leq_term(&self, t: &CondTerm, s: &CondTerm) -> Result<bool, AlgebraError> {
        Ok(self.atom_set(t)?.is_subset(&self.atom_set(s)?))
    }

    /// `P(β1)·P(β2|¬β1)·…·P(β_{n−1}|β_{n−1} ∨ βn)`
    pub fn chain_product(&self, atom: &AtomSequence, cp: &ConditionalProbability) -> Result<Rational, AlgebraError> {
        let space = &self.space;
        let mut remaining = space.top();
        let mut product = Rational::one();
        for &w in atom.seq() {
            let beta = space.singleton(w).expect("valid world");
            product *= cp.cond_prob(&beta, &remaining)?;
            if product.is_zero() {
                break;
            }
            remaining = remaining.conj(&beta.neg(space).expect("same space")).expect("same space");
        }
        Ok(product)
    }

    /// The canonical measure of `t` induced by a positive probability: the sum
    /// of the chain products of the atoms below `t`.
    pub fn mu_p(&self, t: &CondTerm, cp: &ConditionalProbability) -> Result<Rational, AlgebraError> {
        if !cp.is_positive() {
            return Err(AlgebraError::NotPositive);
        }
        self.chain_measure(t, cp)
    }

    /// Same sum of chain products without the positivity requirement. For
    /// layered probabilities its agreement with the prevision is not
    /// established; callers should present it as experimental.
    pub fn chain_measure(&self, t: &CondTerm, cp: &ConditionalProbability) -> Result<Rational, AlgebraError> {
        if cp.space() != &self.space {
            return Err(AlgebraError::SpaceMismatch);
        }
        let set = self.atom_set(t)?;
        let mut total = Rational::zero();
        for i in set.iter() {
            total += self.chain_product(&self.atoms[i], cp)?;
        }
        Ok(total)
    }
}

impl fmt::Display for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn space(n: usize) -> WorldSpace {
        WorldSpace::numbered(n).unwrap()
    }

    #[test]
    fn atom_counts() {
        assert_eq!(enumerate_atoms(&space(1), 8).unwrap().len(), 1);
        assert_eq!(enumerate_atoms(&space(2), 8).unwrap().len(), 2);
        assert_eq!(enumerate_atoms(&space(3), 8).unwrap().len(), 6);
        assert_eq!(enumerate_atoms(&space(4), 8).unwrap().len(), 24);
        assert_eq!(
            enumerate_atoms(&space(9), 8).unwrap_err(),
            AlgebraError::AtomLimit { worlds: 9, limit: 8 }
        );
    }

    #[test]
    fn atoms_in_lexicographic_order() {
        let s = space(3);
        let seqs: Vec<Vec<usize>> = enumerate_atoms(&s, 8).unwrap().iter().map(|a| a.seq().to_vec()).collect();
        assert_eq!(seqs, vec![vec![0, 1], vec![0, 2], vec![1, 0], vec![1, 2], vec![2, 0], vec![2, 1]]);
        let s = space(2);
        let atoms = enumerate_atoms(&s, 8).unwrap();
        assert_eq!(atoms[0].show(&s), "⟨w1⟩");
        assert_eq!(atoms[1].show(&s), "⟨w2⟩");
        assert_eq!(enumerate_atoms(&space(1), 8).unwrap()[0].seq(), &[] as &[usize]);
    }

    #[test]
    fn atom_sequence_validation() {
        let s = space(3);
        assert!(AtomSequence::new(&s, &[0, 1]).is_some());
        assert!(AtomSequence::new(&s, &[0, 0]).is_none());
        assert!(AtomSequence::new(&s, &[0]).is_none());
        assert!(AtomSequence::new(&s, &[0, 3]).is_none());
        assert_eq!(AtomSequence::new(&s, &[2, 0]).unwrap().order(), &[2, 0, 1]);
    }

    #[test]
    fn atom_terms() {
        let s = space(3);
        let atom = AtomSequence::new(&s, &[0, 1]).unwrap();
        let expected = CondTerm::basic(s.singleton(0).unwrap(), s.top())
            .unwrap()
            .and(CondTerm::basic(s.singleton(1).unwrap(), s.event(["w2", "w3"]).unwrap()).unwrap());
        assert_eq!(atom_term(&s, &atom), expected);
        let one = space(1);
        assert_eq!(atom_term(&one, &AtomSequence::new(&one, &[]).unwrap()), CondTerm::One);
        let two = space(2);
        assert_eq!(
            atom_term(&two, &AtomSequence::new(&two, &[1]).unwrap()),
            CondTerm::basic(two.singleton(1).unwrap(), two.top()).unwrap()
        );
    }

    #[test]
    fn self_conditional_is_top() {
        let s = space(3);
        let alg = ConditionalAlgebra::new(&s, 8).unwrap();
        for b in s.all_events().filter(|e| !e.is_bottom()) {
            let t = CondTerm::basic(b, b).unwrap();
            assert_eq!(alg.atom_set(&t).unwrap().count(), 6);
        }
        assert_eq!(alg.atom_set(&CondTerm::One).unwrap().count(), 6);
        assert_eq!(alg.atom_set(&CondTerm::Zero).unwrap().count(), 0);
    }

    #[test]
    fn conditional_on_top_reads_first_world() {
        let s = space(3);
        let a = s.event(["w2"]).unwrap();
        let t = CondTerm::basic(a, s.top()).unwrap();
        for atom in enumerate_atoms(&s, 8).unwrap() {
            assert_eq!(eval_under_atom(&t, &atom), atom.order()[0] == 1);
        }
    }

    #[test]
    fn each_atom_is_its_own_singleton() {
        let s = space(4);
        let alg = ConditionalAlgebra::new(&s, 8).unwrap();
        for (i, atom) in alg.atoms().iter().enumerate() {
            let set = alg.atom_set(&atom_term(&s, atom)).unwrap();
            assert_eq!(set.iter().collect::<Vec<_>>(), vec![i]);
        }
    }

    #[test]
    fn consequent_absorbs_antecedent() {
        let s = space(3);
        let alg = ConditionalAlgebra::new(&s, 8).unwrap();
        for a in s.all_events() {
            for b in s.all_events().filter(|e| !e.is_bottom()) {
                let lhs = CondTerm::basic(a.conj(&b).unwrap(), b).unwrap();
                let rhs = CondTerm::basic(a, b).unwrap();
                assert!(alg.equiv(&lhs, &rhs).unwrap());
            }
        }
    }

    #[test]
    fn witness_on_difference() {
        let s = space(2);
        let alg = ConditionalAlgebra::new(&s, 8).unwrap();
        let t = CondTerm::basic(s.singleton(0).unwrap(), s.top()).unwrap();
        match alg.compare(&t, &CondTerm::Zero).unwrap() {
            Equivalence::Differ { atom, in_left } => {
                assert_eq!(atom.seq(), &[0]);
                assert!(in_left);
            }
            Equivalence::Equivalent => panic!("expected a difference"),
        }
        assert!(alg.leq_term(&CondTerm::Zero, &t).unwrap());
        assert!(!alg.leq_term(&t, &CondTerm::Zero).unwrap());
    }

    #[test]
    fn chain_product_uniform() {
        let s = space(3);
        let alg = ConditionalAlgebra::new(&s, 8).unwrap();
        let cp = ConditionalProbability::uniform(&s);
        let atom = AtomSequence::new(&s, &[0, 1]).unwrap();
        assert_eq!(alg.mu_p(&atom_term(&s, &atom), &cp).unwrap(), ratio(1, 6));
        assert_eq!(alg.mu_p(&CondTerm::One, &cp).unwrap(), ratio(1, 1));
        let a = s.event(["w1"]).unwrap();
        let b = s.event(["w1", "w2"]).unwrap();
        assert_eq!(alg.mu_p(&CondTerm::basic(a, b).unwrap(), &cp).unwrap(), ratio(1, 2));
    }

    #[test]
    fn mu_p_requires_positive_probability() {
        let s = space(2);
        let alg = ConditionalAlgebra::new(&s, 8).unwrap();
        let cp = ConditionalProbability::new(&s, vec![vec![(0, ratio(1, 1))], vec![(1, ratio(1, 1))]]).unwrap();
        assert_eq!(alg.mu_p(&CondTerm::One, &cp), Err(AlgebraError::NotPositive));
        assert_eq!(alg.chain_measure(&CondTerm::One, &cp).unwrap(), ratio(1, 1));
    }

    #[test]
    fn atom_set_complement_trims_padding() {
        let s = space(3);
        let alg = ConditionalAlgebra::new(&s, 8).unwrap();
        let none = alg.atom_set(&CondTerm::Zero).unwrap();
        assert_eq!(none.complement().count(), 6);
        assert_eq!(none.complement(), alg.atom_set(&CondTerm::One).unwrap());
    }
}
