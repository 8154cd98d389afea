//! Reduction fixtures: a `params` line followed by `FAMILY v1` blocks.

use std::fmt;
use std::str::FromStr;

use super::reductions::*;
use super::IndexSetError;
use crate::approx::ApproximationFamily;
use crate::pairing::pair;
use crate::text::{self, FormatError};
use crate::{Presentation, Stage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReductionKind {
    D01,
    Pi02,
    Pi02Inf,
    D03,
    Sigma02,
    Pi04,
    Sigma04,
}

impl ReductionKind {
    pub const ALL: [ReductionKind; 7] = [
        ReductionKind::D01,
        ReductionKind::Pi02,
        ReductionKind::Pi02Inf,
        ReductionKind::D03,
        ReductionKind::Sigma02,
        ReductionKind::Pi04,
        ReductionKind::Sigma04,
    ];

    fn name(self) -> &'static str {
        match self {
            ReductionKind::D01 => "d01",
            ReductionKind::Pi02 => "pi02",
            ReductionKind::Pi02Inf => "pi02-inf",
            ReductionKind::D03 => "d03",
            ReductionKind::Sigma02 => "sigma02",
            ReductionKind::Pi04 => "pi04",
            ReductionKind::Sigma04 => "sigma04",
        }
    }

    /// Number of families the kind reads.
    pub fn family_count(self) -> usize {
        match self {
            ReductionKind::D03 => 2,
            _ => 1,
        }
    }

    pub fn needs_base(self) -> bool {
        matches!(
            self,
            ReductionKind::D01 | ReductionKind::Pi02 | ReductionKind::Pi02Inf | ReductionKind::Sigma04
        )
    }
}

impl fmt::Display for ReductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReductionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ReductionKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown reduction `{s}`"))
    }
}

/// Parsed fixture. `base` is the path as written; resolving it is up to the
/// caller.
///
/// Family inputs per kind:
///
/// - `d01`: input 0 fires `e`, input 1 fires `i`;
/// - `pi02`, `pi02-inf`: input 0 is the firing schedule;
/// - `d03`: family 0 is `R`, family 1 is `T`, both read as `(x, j)`;
/// - `sigma02`: `x ∈ W_s` iff input `x` holds at `s`;
/// - `pi04`, `sigma04`: `pred(x,y,u,v)` iff input `⟨x,y⟩` holds at `⟨u,v⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ReductionFixture {
    pub n: Option<u64>,
    pub k: Option<u64>,
    pub base: Option<String>,
    pub families: Vec<ApproximationFamily>,
}

fn holds(fam: &ApproximationFamily, x: u64, s: Stage) -> bool {
    fam.h(x, s) == 1
}

impl ReductionFixture {
    fn param(v: Option<u64>, name: &str) -> Result<u64, IndexSetError> {
        v.ok_or_else(|| IndexSetError::Fixture(format!("missing parameter `{name}`")))
    }

    pub fn run(
        &self,
        kind: ReductionKind,
        base: Option<&Presentation>,
        horizon: Stage,
    ) -> Result<Presentation, IndexSetError> {
        if self.families.len() < kind.family_count() {
            return Err(IndexSetError::Fixture(format!(
                "{kind} needs {} families, found {}",
                kind.family_count(),
                self.families.len()
            )));
        }
        let base = match (kind.needs_base(), base) {
            (true, None) => return Err(IndexSetError::Fixture(format!("{kind} needs a base"))),
            (_, b) => b,
        };
        let f = &self.families[0];
        Ok(match kind {
            ReductionKind::D01 => reduce_d01(
                &|s| holds(f, 0, s),
                &|s| holds(f, 1, s),
                Self::param(self.n, "n")?,
                base.unwrap(),
                horizon,
            ),
            ReductionKind::Pi02 => {
                reduce_pi02(&|s| holds(f, 0, s), Self::param(self.n, "n")?, base.unwrap(), horizon)?
            }
            ReductionKind::Pi02Inf => reduce_pi02_inf(&|s| holds(f, 0, s), base.unwrap(), horizon),
            ReductionKind::D03 => {
                let t = &self.families[1];
                reduce_d03(
                    &|x, j| holds(f, x, j),
                    &|x, j| holds(t, x, j),
                    Self::param(self.k, "k")?,
                    horizon,
                )
            }
            ReductionKind::Sigma02 => reduce_sigma02(&|x, s| holds(f, x, s), horizon),
            ReductionKind::Pi04 => {
                reduce_pi04(&|x, y, u, v| holds(f, pair(x, y), pair(u, v)), horizon)?
            }
            ReductionKind::Sigma04 => reduce_sigma04(
                &|x, y, u, v| holds(f, pair(x, y), pair(u, v)),
                base.unwrap(),
                horizon,
            )?,
        })
    }
}

impl fmt::Display for ReductionFixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "params")?;
        if let Some(n) = self.n {
            write!(f, " n={n}")?;
        }
        if let Some(k) = self.k {
            write!(f, " k={k}")?;
        }
        if let Some(b) = &self.base {
            write!(f, " base={b}")?;
        }
        writeln!(f)?;
        for fam in &self.families {
            f.write_str(&fam.to_text().ok_or(fmt::Error)?)?;
        }
        Ok(())
    }
}

impl FromStr for ReductionFixture {
    type Err = FormatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (line, rest) = text::expect_header(s, "params")?;
        let mut fx = ReductionFixture::default();
        for tok in &rest {
            match tok.split_once('=') {
                Some(("n", v)) => fx.n = Some(text::parse_u64(line, v)?),
                Some(("k", v)) => fx.k = Some(text::parse_u64(line, v)?),
                Some(("base", v)) => fx.base = Some(v.to_string()),
                _ => return Err(FormatError::new(line, format!("unknown parameter `{tok}`"))),
            }
        }
        let lines: Vec<&str> = s.lines().collect();
        let starts: Vec<usize> = text::content_lines(s)
            .filter(|(_, c)| c.starts_with("FAMILY"))
            .map(|(l, _)| l - 1)
            .collect();
        if let Some((l, c)) = text::content_lines(s)
            .skip(1)
            .take_while(|&(l, _)| starts.first().is_none_or(|&st| l - 1 < st))
            .next()
        {
            return Err(FormatError::new(l, format!("unexpected line `{c}` before FAMILY block")));
        }
        for (i, &start) in starts.iter().enumerate() {
            let end = starts.get(i + 1).copied().unwrap_or(lines.len());
            // Blank out other lines so errors keep file line numbers.
            let block: String = lines
                .iter()
                .enumerate()
                .map(|(j, l)| if (start..end).contains(&j) { *l } else { "" })
                .collect::<Vec<_>>()
                .join("\n");
            fx.families.push(block.parse()?);
        }
        Ok(fx)
    }
}
