//! Limit-computable embeddings for unbounded structures with finitely many
//! infinite classes.

use std::collections::{BTreeMap, BTreeSet};

use super::map::{check_partial_embedding, PartialMap, StagedMap};
use super::EmbedError;
use crate::presentation::EventKind;
use crate::profile::{CharacterProfile, Count};
use crate::{Element, Presentation, Stage};

/// Stage-`s` image class choice for every class of `A` present at `s`.
fn choose_classes(
    pres_a: &Presentation,
    pres_b: &Presentation,
    seed_classes: &BTreeMap<Element, Element>,
    s: Stage,
) -> BTreeMap<Element, Option<Element>> {
    let seed_targets: BTreeSet<Element> = seed_classes.values().copied().collect();
    let mut used: BTreeSet<Element> = BTreeSet::new();
    let mut chosen = BTreeMap::new();
    for ev in pres_a.events().iter().take_while(|ev| ev.stage <= s) {
        let EventKind::New(class) = ev.kind else {
            continue;
        };
        if let Some(&t) = seed_classes.get(&class) {
            let present = pres_b.locate(t).is_some_and(|(_, born)| born <= s);
            chosen.insert(class, present.then_some(t));
            continue;
        }
        let need = pres_a.class_history(class).unwrap().size_at(s);
        let pick = pres_b
            .class_histories()
            .find(|(id, h)| {
                h.birth <= s
                    && !used.contains(id)
                    && !seed_targets.contains(id)
                    && h.size_at(s) >= need
            })
            .map(|(id, _)| id);
        if let Some(t) = pick {
            used.insert(t);
        }
        chosen.insert(class, pick);
    }
    chosen
}

/// Embeds `A` into `B` as a limit of stage maps.
///
/// `transversal_seed` pairs one element of every infinite class of `A` with
/// one element of an infinite class of `B`; its size must equal the declared
/// number of infinite classes of both profiles. At every stage the whole
/// recursion is recomputed from stage-`s` sizes: a seeded class keeps its seed
/// target, and any other new class of `A` takes the least-id unused class of
/// `B` that is at least as large at stage `s`. The `k`-th member of a class
/// maps to the `k`-th member of its image class (in arrival order, skipping
/// seed elements). Elements with no available image are deferred.
pub fn embed_delta2(
    pres_a: &Presentation,
    pres_b: &Presentation,
    profile_a: &CharacterProfile,
    profile_b: &CharacterProfile,
    transversal_seed: &PartialMap,
    horizon: Stage,
) -> Result<StagedMap, EmbedError> {
    let n = match (profile_a.infinite_classes(), profile_b.infinite_classes()) {
        (Count::Finite(x), Count::Finite(y)) if x == y => x,
        (x, y) => {
            return Err(EmbedError::ProfileMismatch(format!(
                "infinite class counts {x} and {y} must be equal and finite"
            )))
        }
    };
    if transversal_seed.len() as u64 != n {
        return Err(EmbedError::InvalidSeed(format!(
            "seed has {} pairs but {n} infinite classes are declared",
            transversal_seed.len()
        )));
    }
    let a_h = pres_a.snapshot_at(horizon);
    let b_h = pres_b.snapshot_at(horizon);
    match check_partial_embedding(transversal_seed, &a_h, &b_h)? {
        Ok(()) => {}
        Err(v) => return Err(EmbedError::InvalidSeed(v.to_string())),
    }
    let seed_classes: BTreeMap<Element, Element> = transversal_seed
        .iter()
        .map(|(&a, &b)| (pres_a.locate(a).unwrap().0, pres_b.locate(b).unwrap().0))
        .collect();
    if seed_classes.len() != transversal_seed.len() {
        return Err(EmbedError::InvalidSeed("two seed elements share a class".into()));
    }
    let seed_values: BTreeSet<Element> = transversal_seed.values().copied().collect();

    let mut out = StagedMap::new(horizon);
    for s in 0..=horizon {
        let chosen = choose_classes(pres_a, pres_b, &seed_classes, s);
        for (&class, &target) in &chosen {
            let members = pres_a.class_history(class).unwrap().members_at(s);
            let targets: Vec<Element> = match target {
                Some(t) => pres_b
                    .class_history(t)
                    .unwrap()
                    .members_at(s)
                    .iter()
                    .copied()
                    .filter(|v| !seed_values.contains(v))
                    .collect(),
                None => Vec::new(),
            };
            let mut k = 0;
            for &a in members {
                let image = if target.is_none() {
                    None
                } else if let Some(&v) = transversal_seed.get(&a) {
                    Some(v)
                } else {
                    k += 1;
                    targets.get(k - 1).copied()
                };
                if image.is_none() {
                    out.defer(s, a);
                }
                out.record(s, a, image);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::verify_partial_embedding;
    use crate::profile::Bound;
    use crate::PresentationBuilder;

    fn unbounded() -> CharacterProfile {
        CharacterProfile::new(Bound::Unbounded, Count::Finite(0), 0, []).unwrap()
    }

    /// Class `i` is created at stage `i` and grown to `sizes[i]` at once.
    fn classes_of(sizes: &[u64]) -> Presentation {
        let mut b = PresentationBuilder::new();
        for (i, &n) in sizes.iter().enumerate() {
            b.set_stage(i as Stage);
            let root = b.fresh();
            b.add_new(root).unwrap();
            for _ in 1..n {
                let e = b.fresh();
                b.join(e, root).unwrap();
            }
        }
        b.finish(sizes.len() as Stage)
    }

    #[test]
    fn identical_traces_identity_like() {
        let a = classes_of(&[1, 2, 3, 4]);
        let p = unbounded();
        let m = embed_delta2(&a, &a, &p, &p, &PartialMap::new(), 8).unwrap();
        assert_eq!(m.total_mind_changes(), 0);
        assert!(m.final_map().iter().all(|(x, y)| x == y));
    }

    #[test]
    fn maps_into_least_large_enough_class() {
        let a = classes_of(&[1, 2, 3, 4]);
        let b = classes_of(&[2, 4, 6, 8]);
        let p = unbounded();
        let m = embed_delta2(&a, &b, &p, &p, &PartialMap::new(), 8).unwrap();
        let f = m.final_map();
        // Class roots: A 0,1,3,6; B 0,2,6,12. Greedy least-id choice.
        assert_eq!(f[&0], 0);
        assert_eq!(f[&1], 2);
        assert_eq!(f[&3], 6);
        assert_eq!(f[&6], 12);
        assert!(verify_partial_embedding(&f, &a.snapshot_at(8), &b.snapshot_at(8)).unwrap());
    }

    #[test]
    fn growth_forces_remap() {
        // A: class 0 grows to size 3 at stage 2. B: classes of sizes 2 and 3.
        let mut ab = PresentationBuilder::new();
        ab.add_new(0).unwrap();
        ab.set_stage(2);
        ab.join(1, 0).unwrap();
        ab.join(2, 0).unwrap();
        let a = ab.finish(4);
        let b = classes_of(&[2, 3]);
        let p = unbounded();
        let m = embed_delta2(&a, &b, &p, &p, &PartialMap::new(), 4).unwrap();
        assert_eq!(m.image_at(0, 0), Some(0));
        assert_eq!(m.image_at(0, 2), Some(2));
        assert_eq!(m.mind_changes(0), vec![2]);
        assert!(m.constant_on(2, 4));
    }

    #[test]
    fn seed_count_must_match() {
        let a = classes_of(&[1]);
        let p = unbounded();
        let q = CharacterProfile::new(Bound::Unbounded, Count::Finite(1), 0, []).unwrap();
        assert!(matches!(
            embed_delta2(&a, &a, &p, &p, &[(0, 0)].into(), 2),
            Err(EmbedError::InvalidSeed(_))
        ));
        assert!(matches!(
            embed_delta2(&a, &a, &p, &q, &PartialMap::new(), 2),
            Err(EmbedError::ProfileMismatch(_))
        ));
    }
}
