//! A structure whose finite classes meet every infinite set of a supplied
//! list of Σ₂-approximated sets.

use std::collections::{BTreeMap, BTreeSet};

use super::log::{ConstructionLog, LogEvent, LogState};
use crate::approx::{ApproximationFamily, FamilyError, Semantics};
use crate::snapshot::EquivalenceView;
use crate::{Element, Presentation, PresentationBuilder, Stage};

struct State {
    b: PresentationBuilder,
    log: ConstructionLog,
    frontier: Element,
    designated: BTreeSet<Element>,
    /// Blocked class -> (requirement, witness).
    blocked: BTreeMap<Element, (u64, Element)>,
    attended: BTreeSet<u64>,
}

impl State {
    fn reveal(&mut self) -> Element {
        let e = self.frontier;
        self.b.add_new(e).expect("frontier is fresh");
        self.frontier += 1;
        e
    }

    fn reveal_through(&mut self, x: Element) {
        while self.frontier <= x {
            self.reveal();
        }
    }

    fn class_of(&self, x: Element) -> Element {
        self.b.snapshot().class_id(x).expect("revealed element")
    }

    /// Least revealed singleton that is neither designated nor blocked.
    fn least_fresh(&self) -> Option<Element> {
        self.b.snapshot().classes().find_map(|(id, m)| {
            (m.len() == 1 && !self.designated.contains(&id) && !self.blocked.contains_key(&id))
                .then_some(id)
        })
    }
}

fn members(fam: &ApproximationFamily, s: Stage) -> Vec<u64> {
    fam.declared_inputs()
        .into_iter()
        .filter(|&x| fam.h(x, s) == 1)
        .collect()
}

/// Length of the current run of stages ending at `s` in which `x` is in the
/// approximation, as its starting stage.
fn run_start(fam: &ApproximationFamily, x: u64, s: Stage) -> Stage {
    let mut t = s;
    while t > 0 && fam.h(x, t - 1) == 1 {
        t -= 1;
    }
    t
}

/// Builds the structure in stages. Family `e` plays the set `W_e`; its
/// candidate members are its declared inputs.
///
/// The universe is an initial segment of ω: stage 0 is `{0}` and every later
/// stage reveals the next natural number as a singleton. At stage `s+1` the
/// least `e < s` with no member of `W_{e,s}` blocked and some member above
/// `e³` acts: with `x` the least such member, it blocks the class of `x` if
/// `x > s`, and otherwise the class of the member `y ∈ (e³, s]` that has been
/// in the approximation longest without interruption (ties to the least). On
/// its first action it also designates the least fresh element. Then every
/// designated class grows by the next natural number, and each blocked
/// witness that just left its approximation is designated.
pub fn build_simple_fin(
    families: &[ApproximationFamily],
    horizon: Stage,
) -> Result<(Presentation, ConstructionLog), FamilyError> {
    for f in families {
        if f.semantics() != Semantics::Sigma2 {
            return Err(FamilyError::Semantics {
                expected: Semantics::Sigma2,
                found: f.semantics(),
            });
        }
    }
    let mut st = State {
        b: PresentationBuilder::new(),
        log: ConstructionLog::new(),
        frontier: 0,
        designated: BTreeSet::new(),
        blocked: BTreeMap::new(),
        attended: BTreeSet::new(),
    };
    st.reveal();
    for s in 0..horizon {
        st.b.set_stage(s + 1);
        st.reveal();

        // Step 1.
        let blocked_elems: BTreeSet<Element> = st
            .blocked
            .keys()
            .flat_map(|&c| st.b.snapshot().class_members(c).unwrap().iter().copied())
            .collect();
        let acting = families.iter().enumerate().take(s as usize).find_map(|(e, fam)| {
            let w = members(fam, s);
            let threshold = (e as u64).pow(3);
            if w.iter().any(|x| blocked_elems.contains(x)) {
                return None;
            }
            w.iter().copied().find(|&x| x > threshold).map(|x| (e as u64, x))
        });
        if let Some((e, x)) = acting {
            let fam = &families[e as usize];
            let threshold = e.pow(3);
            let witness = if x <= s {
                members(fam, s)
                    .into_iter()
                    .filter(|&y| y > threshold && y <= s)
                    .min_by_key(|&y| (run_start(fam, y, s), y))
                    .expect("x itself qualifies")
            } else {
                st.reveal_through(x);
                x
            };
            let class = st.class_of(witness);
            st.log.push(s + 1, LogEvent::Attend(e));
            st.designated.remove(&class);
            st.blocked.insert(class, (e, witness));
            st.log.push(s + 1, LogEvent::Block { req: e, class });
            if st.attended.insert(e) {
                let fresh = match st.least_fresh() {
                    Some(f) => f,
                    None => st.reveal(),
                };
                st.designated.insert(fresh);
                st.log.push(s + 1, LogEvent::Designate(fresh));
            }
        }

        // Step 2.
        for class in st.designated.clone() {
            let e = st.frontier;
            st.frontier += 1;
            st.b.join(e, class).expect("frontier is fresh");
            st.log.push(s + 1, LogEvent::Grow { class, element: e });
        }

        // Step 3.
        if s >= 1 {
            let fallen: Vec<Element> = st
                .blocked
                .iter()
                .filter(|(_, &(e, w))| {
                    let fam = &families[e as usize];
                    e < s && fam.h(w, s - 1) == 1 && fam.h(w, s) == 0
                })
                .map(|(&c, _)| c)
                .collect();
            for class in fallen {
                st.blocked.remove(&class);
                st.designated.insert(class);
                st.log.push(s + 1, LogEvent::Designate(class));
            }
        }
    }
    Ok((st.b.finish(horizon), st.log))
}

/// Checks that every class designated at the end of a stage grows at the
/// next stage unless it is blocked there.
pub fn check_designated_growth(log: &ConstructionLog, horizon: Stage) -> Result<(), String> {
    let mut state = LogState::default();
    let mut entries = log.entries().iter().peekable();
    for s in 0..=horizon {
        let before: BTreeSet<Element> = state.designated.keys().copied().collect();
        let mut grown = BTreeSet::new();
        let mut blocked_now = BTreeSet::new();
        while let Some(entry) = entries.next_if(|e| e.stage == s) {
            match entry.event {
                LogEvent::Grow { class, .. } => {
                    grown.insert(class);
                }
                LogEvent::Block { class, .. } => {
                    blocked_now.insert(class);
                }
                _ => {}
            }
            state.apply(entry);
        }
        if let Some(c) = before
            .iter()
            .find(|c| !grown.contains(c) && !blocked_now.contains(c))
        {
            return Err(format!("designated class {c} did not grow at stage {s}"));
        }
    }
    Ok(())
}

/// Checks, at every stage whose largest acting requirement `e` exceeds 2, that
/// at most `e²` blocked and at most `e²` designated classes have their id
/// below `e³`.
pub fn check_accounting(log: &ConstructionLog, horizon: Stage) -> Result<(), String> {
    let mut state = LogState::default();
    let mut entries = log.entries().iter().peekable();
    for s in 0..=horizon {
        while let Some(entry) = entries.next_if(|e| e.stage == s) {
            state.apply(entry);
        }
        let Some(e) = state.max_attended.filter(|&e| e > 2) else {
            continue;
        };
        let cube = e.pow(3);
        let blocked = state.blocked.keys().filter(|&&c| c < cube).count() as u64;
        let designated = state.designated.keys().filter(|&&c| c < cube).count() as u64;
        if blocked > e * e || designated > e * e {
            return Err(format!(
                "stage {s}: {blocked} blocked and {designated} designated below {cube} for e = {e}"
            ));
        }
    }
    Ok(())
}
