//! Character profiles: bound, number of infinite classes, and multiplicities
//! of finite class sizes.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::presentation::Presentation;
use crate::snapshot::Snapshot;
use crate::text::{self, FormatError};
use crate::Stage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bound {
    Finite(u64),
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Count {
    Finite(u64),
    Infinite,
}

impl Count {
    pub fn is_infinite(self) -> bool {
        self == Count::Infinite
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(k) => write!(f, "{k}"),
            Bound::Unbounded => write!(f, "unbounded"),
        }
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Finite(n) => write!(f, "{n}"),
            Count::Infinite => write!(f, "inf"),
        }
    }
}

/// Declared character of a (possibly infinite) equivalence structure.
///
/// Multiplicities are recorded for sizes `1..=cutoff`; unlisted sizes in that
/// range have multiplicity zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterProfile {
    bound: Bound,
    infinite: Count,
    cutoff: u64,
    multiplicities: BTreeMap<u64, Count>,
}

impl CharacterProfile {
    /// Fails if a size above a finite bound has nonzero multiplicity, a size
    /// is zero or above the cutoff.
    pub fn new(
        bound: Bound,
        infinite: Count,
        cutoff: u64,
        multiplicities: impl IntoIterator<Item = (u64, Count)>,
    ) -> Result<Self, String> {
        let mut map = BTreeMap::new();
        for (m, c) in multiplicities {
            if m == 0 || m > cutoff {
                return Err(format!("size {m} outside 1..={cutoff}"));
            }
            if c == Count::Finite(0) {
                continue;
            }
            if let Bound::Finite(k) = bound {
                if m > k {
                    return Err(format!("size {m} exceeds declared bound {k}"));
                }
            }
            map.insert(m, c);
        }
        Ok(CharacterProfile {
            bound,
            infinite,
            cutoff,
            multiplicities: map,
        })
    }

    /// Exact profile of a finite structure (no infinite classes).
    pub fn of_snapshot(snap: &Snapshot) -> Self {
        let census = snap.census();
        let max = census.max_size().unwrap_or(0);
        let mut mult = BTreeMap::new();
        for &m in census.sizes() {
            *mult.entry(m).or_insert(0u64) += 1;
        }
        CharacterProfile::new(
            Bound::Finite(max),
            Count::Finite(0),
            max,
            mult.into_iter().map(|(m, c)| (m, Count::Finite(c))),
        )
        .expect("census sizes are within their max")
    }

    pub fn bound(&self) -> Bound {
        self.bound
    }

    pub fn infinite_classes(&self) -> Count {
        self.infinite
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    /// Multiplicity of size `m`; `None` above the cutoff.
    pub fn multiplicity(&self, m: u64) -> Option<Count> {
        if m == 0 || m > self.cutoff {
            return None;
        }
        Some(self.multiplicities.get(&m).copied().unwrap_or(Count::Finite(0)))
    }

    pub fn multiplicities(&self) -> impl Iterator<Item = (u64, Count)> + '_ {
        self.multiplicities.iter().map(|(&m, &c)| (m, c))
    }

    /// Largest size with infinitely many classes.
    pub fn largest_infinite_multiplicity(&self) -> Option<u64> {
        self.multiplicities
            .iter()
            .rev()
            .find(|(_, c)| c.is_infinite())
            .map(|(&m, _)| m)
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self.bound, Bound::Finite(_))
    }

    /// Checks a presentation against the declared bound: at most the declared
    /// number of classes may ever exceed it.
    pub fn check_against(&self, pres: &Presentation) -> Result<(), String> {
        let Bound::Finite(k) = self.bound else {
            return Ok(());
        };
        let over = pres
            .class_histories()
            .filter(|(_, h)| h.size_at(pres.horizon()) > k)
            .count() as u64;
        match self.infinite {
            Count::Finite(n) if over > n => Err(format!(
                "{over} classes exceed bound {k}, but only {n} are declared infinite"
            )),
            _ => Ok(()),
        }
    }
}

/// Horizon-truncated guess at the profile of a presentation.
///
/// Classes guessed infinite by [`Presentation::inf_guess`] at `horizon` count
/// as infinite. The remaining classes are compared at `horizon` and at
/// `horizon / 2`: a growing maximum finite size reads as unbounded, and a size
/// whose count is still growing reads as infinite multiplicity.
pub fn estimate_profile(pres: &Presentation, horizon: Stage) -> CharacterProfile {
    let half = horizon / 2;
    let mut inf_now = 0u64;
    let mut inf_half = 0u64;
    let mut sizes_now: BTreeMap<u64, u64> = BTreeMap::new();
    let mut sizes_half: BTreeMap<u64, u64> = BTreeMap::new();
    for (id, h) in pres.class_histories() {
        if h.birth > horizon {
            continue;
        }
        if pres.inf_guess(id, horizon).unwrap_or(false) {
            inf_now += 1;
        } else {
            *sizes_now.entry(h.size_at(horizon)).or_default() += 1;
        }
        if h.birth <= half {
            if pres.inf_guess(id, half).unwrap_or(false) {
                inf_half += 1;
            } else {
                *sizes_half.entry(h.size_at(half)).or_default() += 1;
            }
        }
    }
    let max_now = sizes_now.keys().next_back().copied().unwrap_or(0);
    let max_half = sizes_half.keys().next_back().copied().unwrap_or(0);
    let bound = if max_now > max_half {
        Bound::Unbounded
    } else {
        Bound::Finite(max_now)
    };
    let infinite = if inf_now > inf_half && inf_now > 1 {
        Count::Infinite
    } else {
        Count::Finite(inf_now)
    };
    let mult = sizes_now.iter().map(|(&m, &c)| {
        let before = sizes_half.get(&m).copied().unwrap_or(0);
        if c > before && m <= max_half {
            (m, Count::Infinite)
        } else {
            (m, Count::Finite(c))
        }
    });
    CharacterProfile::new(bound, infinite, max_now, mult).expect("sizes within max")
}

impl fmt::Display for CharacterProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "PROFILE v1")?;
        writeln!(f, "bound {}", self.bound)?;
        writeln!(f, "infinite {}", self.infinite)?;
        writeln!(f, "cutoff {}", self.cutoff)?;
        for (m, c) in &self.multiplicities {
            writeln!(f, "size {m} {c}")?;
        }
        Ok(())
    }
}

fn parse_count(line: usize, tok: &str) -> Result<Count, FormatError> {
    if tok == "inf" {
        Ok(Count::Infinite)
    } else {
        text::parse_u64(line, tok).map(Count::Finite)
    }
}

impl FromStr for CharacterProfile {
    type Err = FormatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (header_line, rest) = text::expect_header(s, "PROFILE v1")?;
        if !rest.is_empty() {
            return Err(FormatError::new(header_line, "unexpected tokens after header"));
        }
        let mut bound = None;
        let mut infinite = None;
        let mut cutoff = None;
        let mut mult = Vec::new();
        for (line, content) in text::content_lines(s).skip(1) {
            let toks: Vec<&str> = content.split_whitespace().collect();
            match toks.as_slice() {
                ["bound", "unbounded"] => bound = Some(Bound::Unbounded),
                ["bound", k] => bound = Some(Bound::Finite(text::parse_u64(line, k)?)),
                ["infinite", n] => infinite = Some(parse_count(line, n)?),
                ["cutoff", c] => cutoff = Some(text::parse_u64(line, c)?),
                ["size", m, c] => mult.push((text::parse_u64(line, m)?, parse_count(line, c)?)),
                _ => return Err(FormatError::new(line, format!("unrecognized line `{content}`"))),
            }
        }
        let bound = bound.ok_or_else(|| FormatError::new(header_line, "missing `bound` line"))?;
        let infinite =
            infinite.ok_or_else(|| FormatError::new(header_line, "missing `infinite` line"))?;
        let cutoff = cutoff.unwrap_or_else(|| match bound {
            Bound::Finite(k) => k,
            Bound::Unbounded => mult.iter().map(|&(m, _)| m).max().unwrap_or(0),
        });
        CharacterProfile::new(bound, infinite, cutoff, mult)
            .map_err(|e| FormatError::new(header_line, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::PresentationBuilder;

    #[test]
    fn profile_of_snapshot() {
        let s = Snapshot::from_classes([vec![0], vec![1, 2], vec![3], vec![4, 5, 6]]).unwrap();
        let p = CharacterProfile::of_snapshot(&s);
        assert_eq!(p.bound(), Bound::Finite(3));
        assert_eq!(p.multiplicity(1), Some(Count::Finite(2)));
        assert_eq!(p.multiplicity(3), Some(Count::Finite(1)));
        assert_eq!(p.multiplicity(4), None);
        let empty = CharacterProfile::of_snapshot(&Snapshot::new());
        assert_eq!(empty.bound(), Bound::Finite(0));
    }

    #[test]
    fn rejects_sizes_above_bound() {
        assert!(CharacterProfile::new(Bound::Finite(2), Count::Finite(0), 5, [(3, Count::Finite(1))]).is_err());
        assert!(CharacterProfile::new(Bound::Finite(2), Count::Finite(0), 5, [(3, Count::Finite(0))]).is_ok());
    }

    #[test]
    fn text_roundtrip() {
        let p = CharacterProfile::new(
            Bound::Finite(3),
            Count::Finite(2),
            3,
            [(1, Count::Infinite), (3, Count::Finite(4))],
        )
        .unwrap();
        let text = p.to_string();
        assert_eq!(text, "PROFILE v1\nbound 3\ninfinite 2\ncutoff 3\nsize 1 inf\nsize 3 4\n");
        assert_eq!(text.parse::<CharacterProfile>().unwrap(), p);
        let q: CharacterProfile = "PROFILE v1\nbound unbounded\ninfinite inf\n".parse().unwrap();
        assert_eq!(q.infinite_classes(), Count::Infinite);
        assert!("PROFILE v1\nbound 2\n".parse::<CharacterProfile>().is_err());
    }

    #[test]
    fn estimate_detects_growth_and_unboundedness() {
        // One class growing every stage, plus a new class of size s+1 per stage
        // that freezes immediately.
        let mut b = PresentationBuilder::new();
        b.add_new(0).unwrap();
        for s in 1..=40 {
            b.set_stage(s);
            let e = b.fresh();
            b.join(e, 0).unwrap();
            let root = b.fresh();
            b.add_new(root).unwrap();
            for _ in 0..s {
                let e = b.fresh();
                b.join(e, root).unwrap();
            }
        }
        let p = estimate_profile(&b.finish(40), 40);
        assert_eq!(p.bound(), Bound::Unbounded);
        assert_eq!(p.infinite_classes(), Count::Finite(1));
    }

    #[test]
    fn check_against_counts_oversized_classes() {
        let mut b = PresentationBuilder::new();
        b.add_new(0).unwrap();
        b.join(1, 0).unwrap();
        b.join(2, 0).unwrap();
        let pres = b.finish(1);
        let ok = CharacterProfile::new(Bound::Finite(1), Count::Finite(1), 1, []).unwrap();
        assert!(ok.check_against(&pres).is_ok());
        let bad = CharacterProfile::new(Bound::Finite(1), Count::Finite(0), 1, []).unwrap();
        assert!(bad.check_against(&pres).is_err());
    }
}
