//! The structure `A_f` whose class of `⟨x,0⟩` has size `f(x)` for a
//! limitwise monotonic `f`.

use crate::approx::{ApproximationFamily, FamilyError, Semantics};
use crate::pairing::pair;
use crate::{Presentation, PresentationBuilder, Stage};

/// Column `x` enters at stage `x` as `⟨x,0⟩`; at every stage `s` each column
/// `x ≤ s` is filled with `⟨x,1⟩, ⟨x,2⟩, …` up to size `h_f(x,s)`.
pub fn build_af(f: &ApproximationFamily, horizon: Stage) -> Result<Presentation, FamilyError> {
    if f.semantics() != Semantics::MonotoneLimit {
        return Err(FamilyError::Semantics {
            expected: Semantics::MonotoneLimit,
            found: f.semantics(),
        });
    }
    let mut b = PresentationBuilder::new();
    let mut sizes: Vec<u64> = Vec::new();
    for s in 0..=horizon {
        b.set_stage(s);
        b.add_new(pair(s, 0)).expect("fresh column");
        sizes.push(1);
        for x in 0..=s {
            let want = f.h(x, s);
            let size = &mut sizes[x as usize];
            while *size < want {
                b.join(pair(x, *size), pair(x, 0)).expect("fresh column element");
                *size += 1;
            }
        }
    }
    Ok(b.finish(horizon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::{dominant_f, ClockedProgram, FuelSchedule, Schedule};

    #[test]
    fn constant_one_is_all_singletons() {
        let f = ApproximationFamily::from_rules(Semantics::MonotoneLimit, None, []).unwrap();
        let p = build_af(&f, 8).unwrap();
        assert!(p.census_at(8).sizes().iter().all(|&n| n == 1));
    }

    #[test]
    fn capped_ramp_freezes() {
        let f = ApproximationFamily::from_rules(Semantics::MonotoneLimit, None, [(0, Schedule::Until(3))])
            .unwrap();
        let p = build_af(&f, 10).unwrap();
        let sizes: Vec<u64> = (0..6).map(|s| p.class_size_at(0, s).unwrap()).collect();
        assert_eq!(sizes, vec![1, 2, 3, 3, 3, 3]);
        assert!(!p.inf_guess(0, 10).unwrap());
    }

    #[test]
    fn dominant_identity_column_two() {
        let f = dominant_f(vec![ClockedProgram::identity()], FuelSchedule::default());
        let p = build_af(&f, 10).unwrap();
        assert_eq!(p.class_size_at(pair(2, 0), 10).unwrap(), 3);
        for x in 0..=10 {
            for s in x..=10 {
                assert_eq!(p.class_size_at(pair(x, 0), s).unwrap(), f.h(x, s).max(1));
            }
        }
    }

    #[test]
    fn rejects_set_families() {
        let f = ApproximationFamily::from_rules(Semantics::Sigma2, None, []).unwrap();
        assert!(build_af(&f, 3).is_err());
    }
}
