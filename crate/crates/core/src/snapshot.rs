//! Finite equivalence structures stored as partitions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::text::{self, FormatError};
use crate::Element;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SnapshotError {
    #[error("element {0} already belongs to the universe")]
    DuplicateElement(Element),
    #[error("no class with id {0}")]
    UnknownClass(Element),
    #[error("element {0} is not in the universe")]
    UnknownElement(Element),
    #[error("class {0} is empty")]
    EmptyClass(Element),
    #[error("class id {id} is not a member of its own class")]
    IdNotMember { id: Element },
}

/// Read-only access to an equivalence structure, finite or not.
pub trait EquivalenceView {
    fn contains(&self, e: Element) -> bool;
    /// Id of the class holding `e`, if `e` is in the universe.
    fn class_id(&self, e: Element) -> Option<Element>;
    fn class_size(&self, e: Element) -> Option<u64>;

    fn equivalent(&self, a: Element, b: Element) -> bool {
        match (self.class_id(a), self.class_id(b)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }
}

/// A finite equivalence structure: a partition of a finite universe.
///
/// Each class is keyed by a stable id that is a member of the class. Classes
/// built through [`Snapshot::add_new`] keep the founding element as id;
/// [`Snapshot::from_classes`] uses the least member.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Snapshot {
    classes: BTreeMap<Element, BTreeSet<Element>>,
    owner: BTreeMap<Element, Element>,
}

impl Snapshot {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a snapshot from explicit classes; the least member is the id.
    pub fn from_classes<I, C>(classes: I) -> Result<Self, SnapshotError>
    where
        I: IntoIterator<Item = C>,
        C: IntoIterator<Item = Element>,
    {
        let mut snap = Snapshot::new();
        for class in classes {
            let members: BTreeSet<Element> = class.into_iter().collect();
            let Some(&id) = members.first() else {
                return Err(SnapshotError::EmptyClass(0));
            };
            snap.insert_class(id, members)?;
        }
        Ok(snap)
    }

    fn insert_class(&mut self, id: Element, members: BTreeSet<Element>) -> Result<(), SnapshotError> {
        if members.is_empty() {
            return Err(SnapshotError::EmptyClass(id));
        }
        if !members.contains(&id) {
            return Err(SnapshotError::IdNotMember { id });
        }
        for &m in &members {
            if self.owner.contains_key(&m) {
                return Err(SnapshotError::DuplicateElement(m));
            }
        }
        for &m in &members {
            self.owner.insert(m, id);
        }
        self.classes.insert(id, members);
        Ok(())
    }

    /// Adds `e` as a new singleton class with id `e`.
    pub fn add_new(&mut self, e: Element) -> Result<(), SnapshotError> {
        if self.owner.contains_key(&e) {
            return Err(SnapshotError::DuplicateElement(e));
        }
        self.owner.insert(e, e);
        self.classes.insert(e, BTreeSet::from([e]));
        Ok(())
    }

    /// Adds the fresh element `e` to the existing class `class`.
    pub fn join(&mut self, e: Element, class: Element) -> Result<(), SnapshotError> {
        if self.owner.contains_key(&e) {
            return Err(SnapshotError::DuplicateElement(e));
        }
        let members = self
            .classes
            .get_mut(&class)
            .ok_or(SnapshotError::UnknownClass(class))?;
        members.insert(e);
        self.owner.insert(e, class);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn universe(&self) -> impl Iterator<Item = Element> + '_ {
        self.owner.keys().copied()
    }

    /// Classes as `(id, members)` in ascending id order.
    pub fn classes(&self) -> impl Iterator<Item = (Element, &BTreeSet<Element>)> {
        self.classes.iter().map(|(&id, m)| (id, m))
    }

    pub fn class_members(&self, id: Element) -> Option<&BTreeSet<Element>> {
        self.classes.get(&id)
    }

    pub fn members_of(&self, e: Element) -> Option<&BTreeSet<Element>> {
        self.owner.get(&e).and_then(|id| self.classes.get(id))
    }

    /// Multiset of class sizes.
    pub fn census(&self) -> Census {
        Census::from_sizes(self.classes.values().map(|m| m.len() as u64))
    }

    /// The least element of every class, ascending.
    pub fn canonical_transversal(&self) -> Vec<Element> {
        let mut reps: Vec<Element> = self
            .classes
            .values()
            .map(|m| *m.first().expect("classes are nonempty"))
            .collect();
        reps.sort_unstable();
        reps
    }

    /// The substructure formed by the classes of size larger than `l`.
    pub fn restrict_above(&self, l: u64) -> Snapshot {
        let mut out = Snapshot::new();
        for (&id, members) in &self.classes {
            if members.len() as u64 > l {
                out.insert_class(id, members.clone())
                    .expect("classes of a valid snapshot are disjoint");
            }
        }
        out
    }

    /// Relabels every element through `f`, which must be injective.
    pub fn relabel(&self, f: impl Fn(Element) -> Element) -> Snapshot {
        let mut out = Snapshot::new();
        for (&id, members) in &self.classes {
            out.insert_class(f(id), members.iter().map(|&m| f(m)).collect())
                .expect("relabeling must be injective");
        }
        out
    }
}

impl EquivalenceView for Snapshot {
    fn contains(&self, e: Element) -> bool {
        self.owner.contains_key(&e)
    }

    fn class_id(&self, e: Element) -> Option<Element> {
        self.owner.get(&e).copied()
    }

    fn class_size(&self, e: Element) -> Option<u64> {
        self.members_of(e).map(|m| m.len() as u64)
    }
}

impl fmt::Display for Snapshot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SNAPSHOT v1")?;
        for (id, members) in &self.classes {
            write!(f, "class {id}:")?;
            for m in members {
                write!(f, " {m}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for Snapshot {
    type Err = FormatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (header_line, rest) = text::expect_header(s, "SNAPSHOT v1")?;
        if !rest.is_empty() {
            return Err(FormatError::new(header_line, "unexpected tokens after header"));
        }
        let mut snap = Snapshot::new();
        let mut last_id = None;
        for (line, content) in text::content_lines(s).skip(1) {
            let body = content
                .strip_prefix("class ")
                .ok_or_else(|| FormatError::new(line, "expected `class <id>: ...`"))?;
            let (id, members) = body
                .split_once(':')
                .ok_or_else(|| FormatError::new(line, "missing `:` after class id"))?;
            let id = text::parse_u64(line, id.trim())?;
            if last_id.is_some_and(|prev| prev >= id) {
                return Err(FormatError::new(line, "class ids must be ascending"));
            }
            last_id = Some(id);
            let mut set = BTreeSet::new();
            let mut prev = None;
            for tok in members.split_whitespace() {
                let m = text::parse_u64(line, tok)?;
                if prev.is_some_and(|p| p >= m) {
                    return Err(FormatError::new(line, "members must be ascending"));
                }
                prev = Some(m);
                set.insert(m);
            }
            snap.insert_class(id, set)
                .map_err(|e| FormatError::new(line, e.to_string()))?;
        }
        Ok(snap)
    }
}

/// Multiset of class sizes, kept sorted ascending.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Census(Vec<u64>);

impl Census {
    pub fn from_sizes(sizes: impl IntoIterator<Item = u64>) -> Self {
        let mut v: Vec<u64> = sizes.into_iter().collect();
        v.sort_unstable();
        Census(v)
    }

    pub fn sizes(&self) -> &[u64] {
        &self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn max_size(&self) -> Option<u64> {
        self.0.last().copied()
    }

    pub fn count_of(&self, size: u64) -> usize {
        self.0.iter().filter(|&&s| s == size).count()
    }

    /// Multiset union.
    pub fn union(&self, other: &Census) -> Census {
        Census::from_sizes(self.0.iter().chain(other.0.iter()).copied())
    }
}

impl fmt::Display for Census {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}
