//! Embeddings into structures with infinitely many infinite classes, driven by
//! stage guesses at which target classes are infinite.

use std::collections::{BTreeMap, BTreeSet};

use super::map::StagedMap;
use crate::presentation::EventKind;
use crate::{Element, Presentation, Stage};

/// Guess at stage `s` that the target class with the given id is infinite.
pub type InfOracle<'a> = &'a dyn Fn(Element, Stage) -> bool;

/// Maps every class of `A` into a target class currently believed infinite.
///
/// Assignments persist while their guess holds. A class whose guess is
/// withdrawn, and every new class, takes the least-id unused class of `B`
/// believed infinite at that stage. The `k`-th member of a class maps to the
/// `k`-th member of its image class; members with no image yet are deferred.
/// Guesses default to [`Presentation::inf_guess`] on `B`.
pub fn embed_delta3(
    pres_a: &Presentation,
    pres_b: &Presentation,
    horizon: Stage,
    oracle: Option<InfOracle<'_>>,
) -> StagedMap {
    let guess = |class: Element, s: Stage| match oracle {
        Some(f) => f(class, s),
        None => pres_b.inf_guess(class, s).unwrap_or(false),
    };
    let mut assign: BTreeMap<Element, Element> = BTreeMap::new();
    let mut out = StagedMap::new(horizon);
    for s in 0..=horizon {
        let founders: Vec<Element> = pres_a
            .events()
            .iter()
            .take_while(|ev| ev.stage <= s)
            .filter_map(|ev| match ev.kind {
                EventKind::New(e) => Some(e),
                EventKind::Join { .. } => None,
            })
            .collect();
        assign.retain(|_, t| guess(*t, s));
        let mut used: BTreeSet<Element> = assign.values().copied().collect();
        for &class in &founders {
            if assign.contains_key(&class) {
                continue;
            }
            let pick = pres_b
                .class_histories()
                .find(|(id, h)| h.birth <= s && !used.contains(id) && guess(*id, s))
                .map(|(id, _)| id);
            if let Some(t) = pick {
                used.insert(t);
                assign.insert(class, t);
            }
        }
        for &class in &founders {
            let members = pres_a.class_history(class).unwrap().members_at(s);
            let targets: &[Element] = match assign.get(&class) {
                Some(&t) => pres_b.class_history(t).unwrap().members_at(s),
                None => &[],
            };
            for (k, &a) in members.iter().enumerate() {
                let image = targets.get(k).copied();
                if image.is_none() {
                    out.defer(s, a);
                }
                out.record(s, a, image);
            }
        }
    }
    out
}
