//! The structure with exactly one class of every finite size: the class of
//! `⟨i,0⟩` is `{⟨i,n⟩ : n ≤ i}`.

use crate::pairing::{pair, unpair};
use crate::snapshot::EquivalenceView;
use crate::{Element, Presentation, PresentationBuilder, Stage};

/// The full (infinite) triangular structure, queried by element code.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TriangularStructure;

impl EquivalenceView for TriangularStructure {
    fn contains(&self, e: Element) -> bool {
        let (i, n) = unpair(e);
        n <= i
    }

    fn class_id(&self, e: Element) -> Option<Element> {
        let (i, n) = unpair(e);
        (n <= i).then(|| pair(i, 0))
    }

    fn class_size(&self, e: Element) -> Option<u64> {
        let (i, n) = unpair(e);
        (n <= i).then_some(i + 1)
    }
}

/// At stage `s`, column `s` appears complete: `⟨s,0⟩` and then `⟨s,n⟩` for
/// `1 ≤ n ≤ s`.
pub fn canonical_triangular(horizon: Stage) -> Presentation {
    let mut b = PresentationBuilder::new();
    for s in 0..=horizon {
        b.set_stage(s);
        let root = pair(s, 0);
        b.add_new(root).expect("fresh column");
        for n in 1..=s {
            b.join(pair(s, n), root).expect("fresh column");
        }
    }
    b.finish(horizon)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn censuses() {
        let t = canonical_triangular(5);
        assert_eq!(t.census_at(0).sizes(), &[1]);
        assert_eq!(t.census_at(3).sizes(), &[1, 2, 3, 4]);
        assert_eq!(t.snapshot_at(3).restrict_above(2).census().sizes(), &[3, 4]);
        let snap = t.snapshot_at(2);
        assert_eq!(snap.canonical_transversal().len(), 3);
        assert!(snap.equivalent(pair(2, 1), pair(2, 0)));
        t.check_monotone().unwrap();
    }

    #[test]
    fn oracle_agrees_with_snapshots() {
        let snap = canonical_triangular(12).final_snapshot();
        for e in snap.universe() {
            assert_eq!(TriangularStructure.class_id(e), snap.class_id(e));
            assert_eq!(TriangularStructure.class_size(e), snap.class_size(e));
        }
        assert!(!TriangularStructure.contains(pair(2, 3)));
        assert!(TriangularStructure.equivalent(pair(7, 7), pair(7, 0)));
    }
}
