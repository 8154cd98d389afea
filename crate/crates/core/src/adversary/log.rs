//! Audit logs of stage constructions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::presentation::{EventKind, Presentation};
use crate::text::{self, FormatError};
use crate::{Element, Stage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LogEvent {
    /// Requirement `e` received attention.
    Attend(u64),
    /// Requirement `req` blocked the class `class`.
    Block { req: u64, class: Element },
    Designate(Element),
    Discard(Element),
    Grow { class: Element, element: Element },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LogEntry {
    pub stage: Stage,
    pub event: LogEvent,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstructionLog {
    entries: Vec<LogEntry>,
}

/// Class states after replaying a log.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LogState {
    /// Blocked class -> blocking requirement.
    pub blocked: BTreeMap<Element, u64>,
    /// Designated class -> stage of its latest designation.
    pub designated: BTreeMap<Element, Stage>,
    pub discarded: BTreeSet<Element>,
    /// Largest requirement that has received attention.
    pub max_attended: Option<u64>,
}

impl LogState {
    pub fn apply(&mut self, entry: &LogEntry) {
        match entry.event {
            LogEvent::Attend(e) => {
                self.max_attended = Some(self.max_attended.map_or(e, |m| m.max(e)));
            }
            LogEvent::Block { req, class } => {
                self.designated.remove(&class);
                self.blocked.insert(class, req);
            }
            LogEvent::Designate(class) => {
                self.blocked.remove(&class);
                self.designated.insert(class, entry.stage);
            }
            LogEvent::Discard(class) => {
                self.designated.remove(&class);
                self.discarded.insert(class);
            }
            LogEvent::Grow { .. } => {}
        }
    }
}

impl ConstructionLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, stage: Stage, event: LogEvent) {
        self.entries.push(LogEntry { stage, event });
    }

    pub fn entries(&self) -> &[LogEntry] {
        &self.entries
    }

    pub fn at_stage(&self, s: Stage) -> impl Iterator<Item = &LogEvent> {
        self.entries.iter().filter(move |e| e.stage == s).map(|e| &e.event)
    }

    /// State after every entry with stage `<= s`.
    pub fn state_at(&self, s: Stage) -> LogState {
        let mut st = LogState::default();
        for entry in self.entries.iter().take_while(|e| e.stage <= s) {
            st.apply(entry);
        }
        st
    }

    /// Stages at which each class grew.
    pub fn growth_stages(&self) -> BTreeMap<Element, Vec<Stage>> {
        let mut out: BTreeMap<Element, Vec<Stage>> = BTreeMap::new();
        for e in &self.entries {
            if let LogEvent::Grow { class, .. } = e.event {
                let v = out.entry(class).or_default();
                if v.last() != Some(&e.stage) {
                    v.push(e.stage);
                }
            }
        }
        out
    }

    /// Checks that every growth entry matches a distinct join in the trace
    /// and that no discarded class grows afterwards.
    pub fn check_against(&self, pres: &Presentation) -> Result<(), String> {
        let joins: BTreeSet<(Stage, Element, Element)> = pres
            .events()
            .iter()
            .filter_map(|ev| match ev.kind {
                EventKind::Join { element, class } => Some((ev.stage, element, class)),
                EventKind::New(_) => None,
            })
            .collect();
        let mut seen = BTreeSet::new();
        let mut discarded: BTreeMap<Element, Stage> = BTreeMap::new();
        for entry in &self.entries {
            match entry.event {
                LogEvent::Grow { class, element } => {
                    let key = (entry.stage, element, class);
                    if !joins.contains(&key) {
                        return Err(format!(
                            "stage {}: growth of {class} by {element} has no trace event",
                            entry.stage
                        ));
                    }
                    if !seen.insert(key) {
                        return Err(format!("stage {}: duplicate growth entry", entry.stage));
                    }
                    if let Some(&d) = discarded.get(&class) {
                        return Err(format!(
                            "class {class} discarded at stage {d} grew at stage {}",
                            entry.stage
                        ));
                    }
                }
                LogEvent::Discard(class) => {
                    discarded.insert(class, entry.stage);
                }
                _ => {}
            }
        }
        Ok(())
    }
}

impl fmt::Display for ConstructionLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "LOG v1")?;
        for LogEntry { stage, event } in &self.entries {
            write!(f, "s={stage} ")?;
            match event {
                LogEvent::Attend(e) => writeln!(f, "attend {e}")?,
                LogEvent::Block { req, class } => writeln!(f, "block {req} {class}")?,
                LogEvent::Designate(c) => writeln!(f, "designate {c}")?,
                LogEvent::Discard(c) => writeln!(f, "discard {c}")?,
                LogEvent::Grow { class, element } => writeln!(f, "grow {class} {element}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for ConstructionLog {
    type Err = FormatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (line, rest) = text::expect_header(s, "LOG v1")?;
        if !rest.is_empty() {
            return Err(FormatError::new(line, "unexpected tokens after header"));
        }
        let mut log = ConstructionLog::new();
        let mut last = 0;
        for (line, content) in text::content_lines(s).skip(1) {
            let toks: Vec<&str> = content.split_whitespace().collect();
            let stage = text::keyed_u64(line, toks.first().copied().unwrap_or(""), "s")?;
            if stage < last {
                return Err(FormatError::new(line, "stages must not decrease"));
            }
            last = stage;
            let n = |t: &str| text::parse_u64(line, t);
            let event = match &toks[1..] {
                ["attend", e] => LogEvent::Attend(n(e)?),
                ["block", e, c] => LogEvent::Block {
                    req: n(e)?,
                    class: n(c)?,
                },
                ["designate", c] => LogEvent::Designate(n(c)?),
                ["discard", c] => LogEvent::Discard(n(c)?),
                ["grow", c, e] => LogEvent::Grow {
                    class: n(c)?,
                    element: n(e)?,
                },
                _ => return Err(FormatError::new(line, format!("unknown log event `{content}`"))),
            };
            log.push(stage, event);
        }
        Ok(log)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::PresentationBuilder;

    #[test]
    fn text_roundtrip_and_state() {
        let text = "LOG v1\ns=1 attend 0\ns=1 block 0 30\ns=1 designate 2\ns=1 grow 2 5\n\
                    s=3 designate 30\ns=4 discard 2\n";
        let log: ConstructionLog = text.parse().unwrap();
        assert_eq!(log.to_string(), text);
        let st = log.state_at(1);
        assert_eq!(st.blocked.get(&30), Some(&0));
        assert_eq!(st.designated.get(&2), Some(&1));
        let st = log.state_at(4);
        assert!(st.blocked.is_empty());
        assert!(st.discarded.contains(&2));
        assert_eq!(st.designated.get(&30), Some(&3));
        assert!("LOG v1\ns=2 attend 0\ns=1 attend 1\n".parse::<ConstructionLog>().is_err());
        assert!("LOG v1\ns=2 jump 0\n".parse::<ConstructionLog>().is_err());
    }

    #[test]
    fn growth_must_match_trace() {
        let mut b = PresentationBuilder::new();
        b.add_new(0).unwrap();
        b.set_stage(1);
        b.join(1, 0).unwrap();
        let pres = b.finish(2);
        let mut log = ConstructionLog::new();
        log.push(1, LogEvent::Grow { class: 0, element: 1 });
        assert!(log.check_against(&pres).is_ok());
        log.push(2, LogEvent::Grow { class: 0, element: 2 });
        assert!(log.check_against(&pres).is_err());

        let mut log = ConstructionLog::new();
        log.push(0, LogEvent::Discard(0));
        log.push(1, LogEvent::Grow { class: 0, element: 1 });
        assert!(log.check_against(&pres).is_err());
    }
}
