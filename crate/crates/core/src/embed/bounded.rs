//! Computable embeddings between structures of bounded character with
//! finitely many infinite classes.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::map::{check_partial_embedding, PartialMap, StagedMap};
use super::EmbedError;
use crate::profile::{CharacterProfile, Count};
use crate::snapshot::EquivalenceView;
use crate::{Element, Presentation, Stage};

fn check_profile(p: &CharacterProfile, which: &str) -> Result<(), EmbedError> {
    if !p.is_bounded() {
        return Err(EmbedError::ProfileMismatch(format!("{which} is not bounded")));
    }
    if p.infinite_classes().is_infinite() {
        return Err(EmbedError::ProfileMismatch(format!(
            "{which} has infinitely many infinite classes"
        )));
    }
    Ok(())
}

/// Embeds `A` into `B` without mind changes.
///
/// `l` is the largest size with infinitely many classes in `A` (0 if none).
/// Classes of `A` above `l` go through `iso_seed`, which must match the
/// classes above `l` of both horizon snapshots one to one. Every other new
/// class of `A` takes the next unused least element of a size-`l` class of
/// `B`. Later members go to the least unused element of the image class.
pub fn embed_bounded(
    pres_a: &Presentation,
    pres_b: &Presentation,
    profile_a: &CharacterProfile,
    profile_b: &CharacterProfile,
    iso_seed: &PartialMap,
    horizon: Stage,
) -> Result<StagedMap, EmbedError> {
    check_profile(profile_a, "source profile")?;
    check_profile(profile_b, "target profile")?;
    let l = profile_a.largest_infinite_multiplicity().unwrap_or(0);
    if l > 0 && profile_b.multiplicity(l) != Some(Count::Infinite) {
        return Err(EmbedError::ProfileMismatch(format!(
            "target does not have infinitely many classes of size {l}"
        )));
    }

    let a_h = pres_a.snapshot_at(horizon);
    let b_h = pres_b.snapshot_at(horizon);
    let a_big = a_h.restrict_above(l);
    let b_big = b_h.restrict_above(l);
    let invalid = |m: String| EmbedError::InvalidSeed(m);
    match check_partial_embedding(iso_seed, &a_big, &b_big) {
        Ok(Ok(())) => {}
        Ok(Err(v)) => return Err(invalid(v.to_string())),
        Err(EmbedError::Dangling { element, side }) => {
            return Err(invalid(format!(
                "{element} is not in a {side} class of size above {l}"
            )))
        }
        Err(e) => return Err(e),
    }
    let mut class_image: BTreeMap<Element, Element> = BTreeMap::new();
    for (&a, &b) in iso_seed {
        class_image.insert(a_big.class_id(a).unwrap(), b_big.class_id(b).unwrap());
    }
    if class_image.len() != a_big.class_count() {
        return Err(invalid(format!("not every class above size {l} is seeded")));
    }
    if class_image.len() != b_big.class_count() {
        return Err(invalid(format!("not every target class above size {l} is hit")));
    }

    let seed_values: BTreeSet<Element> = iso_seed.values().copied().collect();
    let mut small_targets: VecDeque<Element> = b_h
        .classes()
        .filter(|(_, m)| m.len() as u64 == l)
        .map(|(id, _)| id)
        .collect();
    let mut used: BTreeSet<Element> = BTreeSet::new();
    let mut out = StagedMap::new(horizon);

    for (a, s) in pres_a.enumeration() {
        if s > horizon {
            break;
        }
        let (class, _) = pres_a.locate(a).expect("enumerated elements are indexed");
        let target_class = match class_image.get(&class) {
            Some(&t) => t,
            None => {
                let t = small_targets.pop_front().ok_or_else(|| {
                    EmbedError::Exhausted(format!("no unused target class of size {l} for {a}"))
                })?;
                class_image.insert(class, t);
                t
            }
        };
        let image = match iso_seed.get(&a) {
            Some(&v) => v,
            None => *b_h
                .class_members(target_class)
                .expect("target class exists at horizon")
                .iter()
                .find(|v| !used.contains(v) && !seed_values.contains(v))
                .ok_or_else(|| {
                    EmbedError::Exhausted(format!("image class {target_class} of {a} is full"))
                })?,
        };
        used.insert(image);
        out.record(s, a, Some(image));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::verify_partial_embedding;
    use crate::profile::Bound;
    use crate::PresentationBuilder;

    /// One class of size `big` (if nonzero) then one singleton per stage.
    fn big_plus_singletons(big: u64, horizon: Stage) -> Presentation {
        let mut b = PresentationBuilder::new();
        if big > 0 {
            let root = b.fresh();
            b.add_new(root).unwrap();
            for _ in 1..big {
                let e = b.fresh();
                b.join(e, root).unwrap();
            }
        }
        for s in 0..=horizon {
            b.set_stage(s);
            let e = b.fresh();
            b.add_new(e).unwrap();
        }
        b.finish(horizon)
    }

    fn profile(bound: u64, extra: &[(u64, Count)]) -> CharacterProfile {
        let mut m = vec![(1, Count::Infinite)];
        m.extend_from_slice(extra);
        CharacterProfile::new(Bound::Finite(bound), Count::Finite(0), bound, m).unwrap()
    }

    #[test]
    fn singletons_match_in_order() {
        let a = big_plus_singletons(0, 10);
        let p = profile(1, &[]);
        let m = embed_bounded(&a, &a, &p, &p, &PartialMap::new(), 10).unwrap();
        let f = m.final_map();
        assert!(f.iter().all(|(x, y)| x == y));
        assert_eq!(m.total_mind_changes(), 0);
    }

    #[test]
    fn three_class_goes_through_seed() {
        let a = big_plus_singletons(3, 10);
        let p = profile(3, &[(3, Count::Finite(1))]);
        let seed: PartialMap = [(0, 0)].into();
        let m = embed_bounded(&a, &a, &p, &p, &seed, 10).unwrap();
        let f = m.final_map();
        assert_eq!(f.get(&1), Some(&1));
        assert_eq!(f.get(&2), Some(&2));
        assert_eq!(f.get(&3), Some(&3));
        assert!(verify_partial_embedding(&f, &a.snapshot_at(10), &a.snapshot_at(10)).unwrap());
        assert_eq!(m.total_mind_changes(), 0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let a = big_plus_singletons(3, 10);
        let p = profile(3, &[(3, Count::Finite(1))]);
        let unbounded =
            CharacterProfile::new(Bound::Unbounded, Count::Finite(0), 1, [(1, Count::Infinite)]).unwrap();
        assert!(matches!(
            embed_bounded(&a, &a, &unbounded, &p, &PartialMap::new(), 10),
            Err(EmbedError::ProfileMismatch(_))
        ));
        assert!(matches!(
            embed_bounded(&a, &a, &p, &p, &PartialMap::new(), 10),
            Err(EmbedError::InvalidSeed(_))
        ));
        assert!(matches!(
            embed_bounded(&a, &a, &p, &p, &[(3, 3)].into(), 10),
            Err(EmbedError::InvalidSeed(_))
        ));
        let few = big_plus_singletons(3, 4);
        assert!(matches!(
            embed_bounded(&a, &few, &p, &p, &[(0, 0)].into(), 10),
            Err(EmbedError::Exhausted(_))
        ));
    }
}
