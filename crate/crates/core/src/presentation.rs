//! Stage-indexed presentations of equivalence structures.
//!
//! A presentation is an append-only trace of events. `new e` puts `e` into a
//! fresh singleton class; `join e -> c` adds the fresh element `e` to the class
//! with id `c`. Classes never merge, so class ids are stable across stages and
//! every census is monotone.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::snapshot::{Census, Snapshot, SnapshotError};
use crate::text::{self, FormatError};
use crate::{Element, Stage};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("event at stage {stage} is out of order or beyond horizon {horizon}")]
    StageOrder { stage: Stage, horizon: Stage },
    #[error("stage {stage}: {source}")]
    Snapshot {
        stage: Stage,
        #[source]
        source: SnapshotError,
    },
    #[error("element {element} is not in the universe at stage {stage}")]
    UnknownElement { element: Element, stage: Stage },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    New(Element),
    Join { element: Element, class: Element },
}

impl EventKind {
    pub fn element(&self) -> Element {
        match *self {
            EventKind::New(e) => e,
            EventKind::Join { element, .. } => element,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Event {
    pub stage: Stage,
    pub kind: EventKind,
}

/// Birth stage and post-birth growth of one class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassHistory {
    pub birth: Stage,
    /// Stage of every join into the class, in trace order.
    pub joins: Vec<Stage>,
    /// Members in order of arrival, founder first.
    pub members: Vec<Element>,
}

impl ClassHistory {
    pub fn size_at(&self, s: Stage) -> u64 {
        if s < self.birth {
            return 0;
        }
        1 + self.joins.partition_point(|&t| t <= s) as u64
    }

    /// Members present at stage `s`, in order of arrival.
    pub fn members_at(&self, s: Stage) -> &[Element] {
        &self.members[..self.size_at(s) as usize]
    }

    /// Whether the class gained an element at a stage in `(lo, hi]` that is
    /// later than its birth stage.
    pub fn grew_in(&self, lo: Stage, hi: Stage) -> bool {
        let from = self.joins.partition_point(|&t| t <= lo);
        self.joins[from..]
            .iter()
            .take_while(|&&t| t <= hi)
            .any(|&t| t > self.birth)
    }
}

/// A validated, immutable trace together with its horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    horizon: Stage,
    events: Vec<Event>,
    element_index: BTreeMap<Element, (Element, Stage)>,
    history: BTreeMap<Element, ClassHistory>,
}

impl Presentation {
    pub fn empty(horizon: Stage) -> Self {
        Presentation::from_events(horizon, Vec::new()).expect("empty trace is valid")
    }

    pub fn from_events(horizon: Stage, events: Vec<Event>) -> Result<Self, PresentationError> {
        let mut element_index = BTreeMap::new();
        let mut history: BTreeMap<Element, ClassHistory> = BTreeMap::new();
        let mut last_stage = 0;
        for ev in &events {
            if ev.stage < last_stage || ev.stage > horizon {
                return Err(PresentationError::StageOrder {
                    stage: ev.stage,
                    horizon,
                });
            }
            last_stage = ev.stage;
            let snap_err = |source| PresentationError::Snapshot {
                stage: ev.stage,
                source,
            };
            match ev.kind {
                EventKind::New(e) => {
                    if element_index.contains_key(&e) {
                        return Err(snap_err(SnapshotError::DuplicateElement(e)));
                    }
                    element_index.insert(e, (e, ev.stage));
                    history.insert(
                        e,
                        ClassHistory {
                            birth: ev.stage,
                            joins: Vec::new(),
                            members: vec![e],
                        },
                    );
                }
                EventKind::Join { element, class } => {
                    if element_index.contains_key(&element) {
                        return Err(snap_err(SnapshotError::DuplicateElement(element)));
                    }
                    let h = history
                        .get_mut(&class)
                        .ok_or_else(|| snap_err(SnapshotError::UnknownClass(class)))?;
                    h.joins.push(ev.stage);
                    h.members.push(element);
                    element_index.insert(element, (class, ev.stage));
                }
            }
        }
        Ok(Presentation {
            horizon,
            events,
            element_index,
            history,
        })
    }

    pub fn horizon(&self) -> Stage {
        self.horizon
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// Same trace, different horizon (must cover the last event).
    pub fn with_horizon(&self, horizon: Stage) -> Result<Self, PresentationError> {
        Presentation::from_events(horizon, self.events.clone())
    }

    /// Replays every event with stage `<= s`.
    pub fn snapshot_at(&self, s: Stage) -> Snapshot {
        let mut replay = self.replay();
        replay.advance_to(s);
        replay.into_snapshot()
    }

    pub fn final_snapshot(&self) -> Snapshot {
        self.snapshot_at(self.horizon)
    }

    pub fn census_at(&self, s: Stage) -> Census {
        Census::from_sizes(
            self.history
                .values()
                .map(|h| h.size_at(s))
                .filter(|&n| n > 0),
        )
    }

    pub fn replay(&self) -> Replay<'_> {
        Replay {
            events: &self.events,
            next: 0,
            snapshot: Snapshot::new(),
        }
    }

    /// Elements in order of appearance, with the stage each appeared at.
    pub fn enumeration(&self) -> impl Iterator<Item = (Element, Stage)> + '_ {
        self.events.iter().map(|ev| (ev.kind.element(), ev.stage))
    }

    /// Class id and introduction stage of `e`.
    pub fn locate(&self, e: Element) -> Option<(Element, Stage)> {
        self.element_index.get(&e).copied()
    }

    pub fn class_history(&self, class: Element) -> Option<&ClassHistory> {
        self.history.get(&class)
    }

    pub fn class_histories(&self) -> impl Iterator<Item = (Element, &ClassHistory)> {
        self.history.iter().map(|(&id, h)| (id, h))
    }

    fn present_class(&self, a: Element, s: Stage) -> Result<(Element, &ClassHistory), PresentationError> {
        match self.element_index.get(&a) {
            Some(&(class, born)) if born <= s => Ok((class, &self.history[&class])),
            _ => Err(PresentationError::UnknownElement { element: a, stage: s }),
        }
    }

    /// Size of the class of `a` at stage `s`.
    pub fn class_size_at(&self, a: Element, s: Stage) -> Result<u64, PresentationError> {
        self.present_class(a, s).map(|(_, h)| h.size_at(s))
    }

    /// Whether the class of `a` has at least `k` elements at stage `s`.
    pub fn size_at_least(&self, a: Element, k: u64, s: Stage) -> Result<bool, PresentationError> {
        Ok(self.class_size_at(a, s)? >= k)
    }

    /// Stage-`s` guess that the class of `a` is infinite: it gained an element
    /// after its birth stage, at some stage in the window `(⌊s/2⌋, s]`.
    ///
    /// A class that grows at infinitely many stages is guessed infinite at
    /// infinitely many `s`; a class that stops growing at stage `t` is guessed
    /// finite at every `s >= 2t`.
    pub fn inf_guess(&self, a: Element, s: Stage) -> Result<bool, PresentationError> {
        let (_, h) = self.present_class(a, s)?;
        Ok(h.grew_in(s / 2, s))
    }

    /// Checks universe monotonicity, relation monotonicity and no merging
    /// across every pair of consecutive stages by replaying snapshots.
    pub fn check_monotone(&self) -> Result<(), String> {
        let mut replay = self.replay();
        let mut prev = replay.snapshot().clone();
        for s in 0..=self.horizon {
            replay.advance_to(s);
            let cur = replay.snapshot();
            for (id, members) in prev.classes() {
                let Some(now) = cur.members_of(id) else {
                    return Err(format!("stage {s}: class {id} vanished"));
                };
                if !members.is_subset(now) {
                    return Err(format!("stage {s}: class {id} lost elements"));
                }
            }
            let ids: Vec<Element> = prev
                .classes()
                .map(|(id, _)| cur.members_of(id).map(|m| *m.first().unwrap()).unwrap())
                .collect();
            let distinct: std::collections::BTreeSet<_> = ids.iter().collect();
            if distinct.len() != ids.len() {
                return Err(format!("stage {s}: two classes merged"));
            }
            prev = cur.clone();
        }
        Ok(())
    }
}

/// Incremental replay of a trace.
pub struct Replay<'a> {
    events: &'a [Event],
    next: usize,
    snapshot: Snapshot,
}

impl Replay<'_> {
    /// Applies all remaining events with stage `<= s`.
    pub fn advance_to(&mut self, s: Stage) {
        while let Some(ev) = self.events.get(self.next) {
            if ev.stage > s {
                break;
            }
            match ev.kind {
                EventKind::New(e) => self.snapshot.add_new(e),
                EventKind::Join { element, class } => self.snapshot.join(element, class),
            }
            .expect("validated trace");
            self.next += 1;
        }
    }

    pub fn snapshot(&self) -> &Snapshot {
        &self.snapshot
    }

    pub fn into_snapshot(self) -> Snapshot {
        self.snapshot
    }
}

/// Direct sum: `p` relabeled onto even ids, `q` onto odd ids, events merged
/// stage by stage.
pub fn direct_sum(p: &Presentation, q: &Presentation) -> Presentation {
    let relabel = |ev: &Event, f: &dyn Fn(Element) -> Element| Event {
        stage: ev.stage,
        kind: match ev.kind {
            EventKind::New(e) => EventKind::New(f(e)),
            EventKind::Join { element, class } => EventKind::Join {
                element: f(element),
                class: f(class),
            },
        },
    };
    let even = |e: Element| 2 * e;
    let odd = |e: Element| 2 * e + 1;
    let mut events = Vec::with_capacity(p.events.len() + q.events.len());
    let (mut i, mut j) = (0, 0);
    while i < p.events.len() || j < q.events.len() {
        let take_p = match (p.events.get(i), q.events.get(j)) {
            (Some(a), Some(b)) => a.stage <= b.stage,
            (Some(_), None) => true,
            _ => false,
        };
        if take_p {
            events.push(relabel(&p.events[i], &even));
            i += 1;
        } else {
            events.push(relabel(&q.events[j], &odd));
            j += 1;
        }
    }
    Presentation::from_events(p.horizon.max(q.horizon), events)
        .expect("sum of valid traces is valid")
}

/// Accumulates events while tracking the current snapshot.
#[derive(Debug, Clone, Default)]
pub struct PresentationBuilder {
    events: Vec<Event>,
    snapshot: Snapshot,
    stage: Stage,
    max_used: Option<Element>,
}

impl PresentationBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Moves to stage `s`; stages may not decrease.
    pub fn set_stage(&mut self, s: Stage) {
        assert!(s >= self.stage, "stages must not decrease");
        self.stage = s;
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn snapshot(&self) -> &Snapshot {
        &self.snapshot
    }

    pub fn contains(&self, e: Element) -> bool {
        crate::EquivalenceView::contains(&self.snapshot, e)
    }

    fn note(&mut self, e: Element) {
        self.max_used = Some(self.max_used.map_or(e, |m| m.max(e)));
    }

    pub fn add_new(&mut self, e: Element) -> Result<(), SnapshotError> {
        self.snapshot.add_new(e)?;
        self.note(e);
        self.events.push(Event {
            stage: self.stage,
            kind: EventKind::New(e),
        });
        Ok(())
    }

    pub fn join(&mut self, e: Element, class: Element) -> Result<(), SnapshotError> {
        self.snapshot.join(e, class)?;
        self.note(e);
        self.events.push(Event {
            stage: self.stage,
            kind: EventKind::Join { element: e, class },
        });
        Ok(())
    }

    /// Least element numerically larger than every element used so far.
    pub fn fresh(&self) -> Element {
        self.max_used.map_or(0, |m| m + 1)
    }

    pub fn finish(self, horizon: Stage) -> Presentation {
        Presentation::from_events(horizon.max(self.stage), self.events)
            .expect("builder only emits valid events")
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "TRACE v1 horizon={}", self.horizon)?;
        for ev in &self.events {
            match ev.kind {
                EventKind::New(e) => writeln!(f, "s={} new {}", ev.stage, e)?,
                EventKind::Join { element, class } => {
                    writeln!(f, "s={} join {} -> {}", ev.stage, element, class)?
                }
            }
        }
        Ok(())
    }
}

impl FromStr for Presentation {
    type Err = FormatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (header_line, rest) = text::expect_header(s, "TRACE v1")?;
        let [h] = rest.as_slice() else {
            return Err(FormatError::new(header_line, "expected `horizon=<H>`"));
        };
        let horizon = text::keyed_u64(header_line, h, "horizon")?;
        let mut events = Vec::new();
        for (line, content) in text::content_lines(s).skip(1) {
            let toks: Vec<&str> = content.split_whitespace().collect();
            let stage = text::keyed_u64(line, toks.first().copied().unwrap_or(""), "s")?;
            let kind = match toks.as_slice() {
                [_, "new", e] => EventKind::New(text::parse_u64(line, e)?),
                [_, "join", e, "->", c] => EventKind::Join {
                    element: text::parse_u64(line, e)?,
                    class: text::parse_u64(line, c)?,
                },
                _ => return Err(FormatError::new(line, "expected `new <e>` or `join <e> -> <c>`")),
            };
            events.push(Event { stage, kind });
        }
        Presentation::from_events(horizon, events).map_err(|e| FormatError::new(0, e.to_string()))
    }
}
