use std::fmt;
use std::str::FromStr;

use super::IndexSetError;
use crate::{Bound, CharacterProfile, Count};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Degree {
    Zero,
    Jump,
    DoubleJump,
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Degree::Zero => "ZERO",
            Degree::Jump => "JUMP",
            Degree::DoubleJump => "DOUBLE_JUMP",
        })
    }
}

impl FromStr for Degree {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ZERO" => Ok(Degree::Zero),
            "JUMP" => Ok(Degree::Jump),
            "DOUBLE_JUMP" => Ok(Degree::DoubleJump),
            _ => Err(format!("unknown degree `{s}`")),
        }
    }
}

/// Degree of bi-embeddable categoricity read off a profile.
pub fn classify_becat(p: &CharacterProfile) -> Degree {
    match (p.infinite_classes(), p.bound()) {
        (Count::Infinite, _) => Degree::DoubleJump,
        (Count::Finite(_), Bound::Finite(_)) => Degree::Zero,
        (Count::Finite(_), Bound::Unbounded) => Degree::Jump,
    }
}

fn mult(p: &CharacterProfile, m: u64) -> Count {
    match p.bound() {
        Bound::Finite(k) if m > k => Count::Finite(0),
        _ => p.multiplicity(m).unwrap_or(Count::Finite(0)),
    }
}

/// Bi-embeddability of a structure with profile `pb` and one with profile `pa`,
/// where `pa` has bounded character and finitely many infinite classes.
///
/// With `n` the largest size of which `pa` has infinitely many classes (0 if
/// none), the two must agree on the number of infinite classes, on the bound,
/// and on the multiplicity of every size `m ≥ n` up to the bound.
pub fn biemb_test_cbec(pa: &CharacterProfile, pb: &CharacterProfile) -> Result<bool, IndexSetError> {
    let Bound::Finite(k) = pa.bound() else {
        return Err(IndexSetError::OutsideClass("unbounded character".into()));
    };
    if pa.infinite_classes().is_infinite() {
        return Err(IndexSetError::OutsideClass("infinitely many infinite classes".into()));
    }
    if pa.infinite_classes() != pb.infinite_classes() || pa.bound() != pb.bound() {
        return Ok(false);
    }
    let n = pa.largest_infinite_multiplicity().unwrap_or(0).max(1);
    Ok((n..=k).all(|m| mult(pa, m) == mult(pb, m)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(bound: Bound, inf: Count, mults: &[(u64, Count)]) -> CharacterProfile {
        let cutoff = match bound {
            Bound::Finite(k) => k,
            Bound::Unbounded => mults.iter().map(|m| m.0).max().unwrap_or(0),
        };
        CharacterProfile::new(bound, inf, cutoff, mults.iter().copied()).unwrap()
    }

    #[test]
    fn classifier_rows() {
        let zero = profile(Bound::Finite(3), Count::Finite(2), &[]);
        let jump = profile(Bound::Unbounded, Count::Finite(0), &[]);
        let dj = profile(Bound::Finite(1), Count::Infinite, &[]);
        assert_eq!(classify_becat(&zero), Degree::Zero);
        assert_eq!(classify_becat(&jump), Degree::Jump);
        assert_eq!(classify_becat(&dj), Degree::DoubleJump);
        assert_eq!("DOUBLE_JUMP".parse::<Degree>().unwrap().to_string(), "DOUBLE_JUMP");
    }

    #[test]
    fn bi_embeddability_conditions() {
        let a = profile(Bound::Finite(3), Count::Finite(2), &[(1, Count::Infinite)]);
        assert!(biemb_test_cbec(&a, &a).unwrap());
        let b = profile(Bound::Finite(3), Count::Finite(1), &[(1, Count::Infinite)]);
        assert!(!biemb_test_cbec(&a, &b).unwrap());

        let a = profile(
            Bound::Finite(3),
            Count::Finite(0),
            &[(2, Count::Infinite), (3, Count::Finite(3))],
        );
        let b = profile(
            Bound::Finite(3),
            Count::Finite(0),
            &[(2, Count::Infinite), (3, Count::Finite(2))],
        );
        assert!(!biemb_test_cbec(&a, &b).unwrap());

        // Sizes below the largest infinite multiplicity are absorbed.
        let c = profile(
            Bound::Finite(3),
            Count::Finite(0),
            &[(1, Count::Finite(5)), (2, Count::Infinite), (3, Count::Finite(3))],
        );
        assert!(biemb_test_cbec(&a, &c).unwrap());
    }

    #[test]
    fn rejects_outside_class() {
        let u = profile(Bound::Unbounded, Count::Finite(0), &[]);
        assert!(biemb_test_cbec(&u, &u).is_err());
        let i = profile(Bound::Finite(2), Count::Infinite, &[]);
        assert!(biemb_test_cbec(&i, &i).is_err());
    }
}
