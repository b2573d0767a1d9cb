//! Finite Boolean algebra of plain events.
//!
//! A [`WorldSpace`] fixes an ordered list of named possible worlds; an
//! [`Event`] is a subset of those worlds stored as a fixed-width bitset.
//! The declaration order of the worlds is the canonical order used by
//! every enumerator and emitter in the crate.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

/// Largest number of worlds a space can hold (one bit per world).
pub const MAX_WORLDS: usize = 64;

static NEXT_SPACE_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EventError {
    #[error("a world space needs at least one world")]
    Empty,
    #[error("too many worlds: {0} (at most {MAX_WORLDS})")]
    TooMany(usize),
    #[error("invalid world name {0:?}")]
    InvalidName(String),
    #[error("world {0:?} declared twice")]
    Duplicate(String),
    #[error("unknown world {0:?}")]
    UnknownWorld(String),
    #[error("world index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("events belong to different world spaces")]
    SpaceMismatch,
}

/// Identity of a world space. Events remember the space they were built in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpaceId(u64);

#[derive(Debug, Clone)]
pub struct WorldSpace {
    id: SpaceId,
    worlds: Vec<String>,
    index: HashMap<String, usize>,
}

impl WorldSpace {
    pub fn new<I, S>(names: I) -> Result<Self, EventError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let worlds: Vec<String> = names.into_iter().map(Into::into).collect();
        if worlds.is_empty() {
            return Err(EventError::Empty);
        }
        if worlds.len() > MAX_WORLDS {
            return Err(EventError::TooMany(worlds.len()));
        }
        let mut index = HashMap::with_capacity(worlds.len());
        for (i, name) in worlds.iter().enumerate() {
            if name.is_empty() || name.chars().any(|c| c.is_whitespace() || ",{}=".contains(c)) {
                return Err(EventError::InvalidName(name.clone()));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(EventError::Duplicate(name.clone()));
            }
        }
        let id = SpaceId(NEXT_SPACE_ID.fetch_add(1, Ordering::Relaxed));
        Ok(WorldSpace { id, worlds, index })
    }

    /// A space with worlds named `w1 … wn`.
    pub fn numbered(n: usize) -> Result<Self, EventError> {
        Self::new((1..=n).map(|i| format!("w{i}")))
    }

    pub fn id(&self) -> SpaceId {
        self.id
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn name(&self, world: usize) -> &str {
        &self.worlds[world]
    }

    pub fn world(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    fn full_mask(&self) -> u64 {
        if self.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.len()) - 1
        }
    }

    pub fn bottom(&self) -> Event {
        Event { space: self.id, bits: 0 }
    }

    pub fn top(&self) -> Event {
        Event { space: self.id, bits: self.full_mask() }
    }

    pub fn singleton(&self, world: usize) -> Result<Event, EventError> {
        if world >= self.len() {
            return Err(EventError::IndexOutOfRange(world));
        }
        Ok(Event { space: self.id, bits: 1 << world })
    }

    /// Event from a set of world names.
    pub fn event<'a, I>(&self, names: I) -> Result<Event, EventError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut bits = 0u64;
        for name in names {
            let w = self.world(name).ok_or_else(|| EventError::UnknownWorld(name.to_string()))?;
            bits |= 1 << w;
        }
        Ok(Event { space: self.id, bits })
    }

    /// Event from a raw membership mask; bits above the space width are rejected.
    pub fn from_bits(&self, bits: u64) -> Result<Event, EventError> {
        if bits & !self.full_mask() != 0 {
            return Err(EventError::IndexOutOfRange(63 - bits.leading_zeros() as usize));
        }
        Ok(Event { space: self.id, bits })
    }

    /// The atoms of the algebra: one singleton per world, in declaration order.
    pub fn atoms(&self) -> Vec<Event> {
        (0..self.len()).map(|w| Event { space: self.id, bits: 1 << w }).collect()
    }

    /// Every event of the algebra, ordered by membership mask. Only sensible for small spaces.
    pub fn all_events(&self) -> impl Iterator<Item = Event> + '_ {
        (0..=self.full_mask()).map(move |bits| Event { space: self.id, bits })
    }

    pub fn contains(&self, e: &Event) -> bool {
        e.space == self.id
    }

    /// Renders an event as `{w1,w3}`, `TOP` or `BOT`.
    pub fn show(&self, e: &Event) -> String {
        if e.bits == 0 {
            "BOT".to_string()
        } else if e.bits == self.full_mask() {
            "TOP".to_string()
        } else {
            let names: Vec<&str> = e.worlds().map(|w| self.name(w)).collect();
            format!("{{{}}}", names.join(","))
        }
    }
}

impl PartialEq for WorldSpace {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl Eq for WorldSpace {}

/// A subset of the worlds of one [`WorldSpace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event {
    space: SpaceId,
    bits: u64,
}

impl Event {
    pub fn space(&self) -> SpaceId {
        self.space
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn is_bottom(&self) -> bool {
        self.bits == 0
    }

    pub fn has(&self, world: usize) -> bool {
        world < 64 && self.bits >> world & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.bits.count_ones() as usize
    }

    /// Member worlds in ascending index order.
    pub fn worlds(&self) -> impl Iterator<Item = usize> {
        let bits = self.bits;
        (0..64).filter(move |w| bits >> w & 1 == 1)
    }

    fn check(&self, other: &Event) -> Result<(), EventError> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(EventError::SpaceMismatch)
        }
    }

    pub fn conj(&self, other: &Event) -> Result<Event, EventError> {
        self.check(other)?;
        Ok(Event { space: self.space, bits: self.bits & other.bits })
    }

    pub fn disj(&self, other: &Event) -> Result<Event, EventError> {
        self.check(other)?;
        Ok(Event { space: self.space, bits: self.bits | other.bits })
    }

    /// Complement relative to the owning space.
    pub fn neg(&self, space: &WorldSpace) -> Result<Event, EventError> {
        if !space.contains(self) {
            return Err(EventError::SpaceMismatch);
        }
        Ok(Event { space: self.space, bits: !self.bits & space.full_mask() })
    }

    /// Entailment: every world of `self` is a world of `other`.
    pub fn leq(&self, other: &Event) -> Result<bool, EventError> {
        self.check(other)?;
        Ok(self.bits & !other.bits == 0)
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, w) in self.worlds().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "#{w}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space3() -> WorldSpace {
        WorldSpace::numbered(3).unwrap()
    }

    #[test]
    fn set_operations() {
        let s = space3();
        let a = s.event(["w1", "w2"]).unwrap();
        let b = s.event(["w2", "w3"]).unwrap();
        assert_eq!(a.conj(&b).unwrap(), s.event(["w2"]).unwrap());
        assert_eq!(s.top().neg(&s).unwrap(), s.bottom());
        let w1 = s.event(["w1"]).unwrap();
        assert_eq!(w1.disj(&s.bottom()).unwrap(), w1);
    }

    #[test]
    fn entailment() {
        let s = space3();
        let w1 = s.event(["w1"]).unwrap();
        let w12 = s.event(["w1", "w2"]).unwrap();
        let w13 = s.event(["w1", "w3"]).unwrap();
        assert!(w1.leq(&w12).unwrap());
        assert!(s.bottom().leq(&w13).unwrap());
        assert!(!w13.leq(&w12).unwrap());
    }

    #[test]
    fn atoms_are_singletons_in_order() {
        let s = space3();
        let atoms = s.atoms();
        assert_eq!(atoms.len(), 3);
        for (w, atom) in atoms.iter().enumerate() {
            assert_eq!(atom.count(), 1);
            assert!(atom.has(w));
        }
        let one = WorldSpace::numbered(1).unwrap();
        assert_eq!(one.atoms(), vec![one.top()]);
    }

    #[test]
    fn atoms_partition_top() {
        for n in 1..=5 {
            let s = WorldSpace::numbered(n).unwrap();
            let atoms = s.atoms();
            let mut union = s.bottom();
            for (i, x) in atoms.iter().enumerate() {
                for y in &atoms[i + 1..] {
                    assert!(x.conj(y).unwrap().is_bottom());
                }
                union = union.disj(x).unwrap();
            }
            assert_eq!(union, s.top());
        }
    }

    #[test]
    fn boolean_laws_exhaustive() {
        for n in 1..=4 {
            let s = WorldSpace::numbered(n).unwrap();
            let all: Vec<Event> = s.all_events().collect();
            for a in &all {
                assert_eq!(a.conj(a).unwrap(), *a);
                assert_eq!(a.disj(a).unwrap(), *a);
                assert_eq!(a.neg(&s).unwrap().neg(&s).unwrap(), *a);
                for b in &all {
                    let lhs = a.conj(b).unwrap().neg(&s).unwrap();
                    let rhs = a.neg(&s).unwrap().disj(&b.neg(&s).unwrap()).unwrap();
                    assert_eq!(lhs, rhs);
                    for c in &all {
                        let lhs = a.conj(&b.disj(c).unwrap()).unwrap();
                        let rhs = a.conj(b).unwrap().disj(&a.conj(c).unwrap()).unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn mismatched_spaces_are_rejected() {
        let s = space3();
        let t = space3();
        assert_eq!(s.top().conj(&t.top()), Err(EventError::SpaceMismatch));
        assert_eq!(s.top().leq(&t.top()), Err(EventError::SpaceMismatch));
        assert_eq!(s.top().neg(&t), Err(EventError::SpaceMismatch));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(WorldSpace::new(Vec::<String>::new()).unwrap_err(), EventError::Empty);
        assert_eq!(WorldSpace::new(["x", "x"]).unwrap_err(), EventError::Duplicate("x".into()));
        assert!(WorldSpace::numbered(65).is_err());
        assert!(WorldSpace::numbered(64).is_ok());
        let s = space3();
        assert_eq!(s.event(["w9"]), Err(EventError::UnknownWorld("w9".into())));
        assert!(s.from_bits(0b1000).is_err());
    }

    #[test]
    fn show_uses_world_names() {
        let s = space3();
        assert_eq!(s.show(&s.top()), "TOP");
        assert_eq!(s.show(&s.bottom()), "BOT");
        assert_eq!(s.show(&s.event(["w3", "w1"]).unwrap()), "{w1,w3}");
    }
}
