//! Clocked partial functions given by closed-form rules with explicit halting
//! times.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::pairing::{try_pair, unpair};
use crate::text::{self, FormatError};
use crate::Stage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Defined(u64),
    Diverged,
}

impl Outcome {
    pub fn value(self) -> Option<u64> {
        match self {
            Outcome::Defined(v) => Some(v),
            Outcome::Diverged => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    Identity,
    Const(u64),
    /// `x + k`.
    Shift(u64),
    /// `a·x + b`.
    Affine(u64, u64),
    /// Halts after `x` steps with value `x`.
    Countdown,
    Never,
    /// `⟨u,v⟩ ↦ ⟨a1·u + b1, a2·v + b2⟩`.
    PairMap { a1: u64, b1: u64, a2: u64, b2: u64 },
    /// Finite graph; diverges off the table.
    Table(BTreeMap<u64, u64>),
}

/// A partial function with a per-input halting time.
///
/// `eval(x, t)` is defined iff `x` is in the domain of the rule, `x >= from`,
/// and `t` is at least the halting time, so evaluation is fuel-monotone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClockedProgram {
    pub rule: Rule,
    pub delay: u64,
    pub from: u64,
}

impl ClockedProgram {
    pub fn new(rule: Rule) -> Self {
        ClockedProgram {
            rule,
            delay: 0,
            from: 0,
        }
    }

    pub fn with_delay(mut self, delay: u64) -> Self {
        self.delay = delay;
        self
    }

    pub fn defined_from(mut self, from: u64) -> Self {
        self.from = from;
        self
    }

    pub fn identity() -> Self {
        Self::new(Rule::Identity)
    }

    pub fn constant(c: u64) -> Self {
        Self::new(Rule::Const(c))
    }

    pub fn never() -> Self {
        Self::new(Rule::Never)
    }

    pub fn countdown() -> Self {
        Self::new(Rule::Countdown)
    }

    /// Value the program eventually returns on `x`, ignoring fuel.
    pub fn limit(&self, x: u64) -> Option<u64> {
        if x < self.from {
            return None;
        }
        match &self.rule {
            Rule::Identity | Rule::Countdown => Some(x),
            Rule::Const(c) => Some(*c),
            Rule::Shift(k) => x.checked_add(*k),
            Rule::Affine(a, b) => a.checked_mul(x).and_then(|v| v.checked_add(*b)),
            Rule::Never => None,
            Rule::PairMap { a1, b1, a2, b2 } => {
                let (u, v) = unpair(x);
                let u = a1.checked_mul(u)?.checked_add(*b1)?;
                let v = a2.checked_mul(v)?.checked_add(*b2)?;
                try_pair(u, v)
            }
            Rule::Table(t) => t.get(&x).copied(),
        }
    }

    /// Least fuel at which `x` halts, if it ever does.
    pub fn halting_time(&self, x: u64) -> Option<Stage> {
        self.limit(x)?;
        let steps = match self.rule {
            Rule::Countdown => x,
            _ => 0,
        };
        Some(self.delay.saturating_add(steps))
    }

    pub fn eval(&self, x: u64, fuel: Stage) -> Outcome {
        match self.halting_time(x) {
            Some(t) if t <= fuel => Outcome::Defined(self.limit(x).expect("halting implies a value")),
            _ => Outcome::Diverged,
        }
    }
}

/// Runs `prog` on `x` with the given fuel.
pub fn eval_clocked(prog: &ClockedProgram, x: u64, fuel: Stage) -> Outcome {
    prog.eval(x, fuel)
}

/// Affine fuel schedule `fuel(s) = scale·s + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FuelSchedule {
    pub scale: u64,
    pub offset: u64,
}

impl Default for FuelSchedule {
    fn default() -> Self {
        FuelSchedule {
            scale: 1,
            offset: 0,
        }
    }
}

impl FuelSchedule {
    pub fn fuel(&self, s: Stage) -> Stage {
        self.scale.saturating_mul(s).saturating_add(self.offset)
    }
}

impl fmt::Display for ClockedProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "prog ")?;
        match &self.rule {
            Rule::Identity => write!(f, "identity")?,
            Rule::Const(c) => write!(f, "const {c}")?,
            Rule::Shift(k) => write!(f, "shift {k}")?,
            Rule::Affine(a, b) => write!(f, "affine {a} {b}")?,
            Rule::Countdown => write!(f, "countdown")?,
            Rule::Never => write!(f, "never")?,
            Rule::PairMap { a1, b1, a2, b2 } => write!(f, "pairmap {a1} {b1} {a2} {b2}")?,
            Rule::Table(t) => {
                write!(f, "table")?;
                for (x, v) in t {
                    write!(f, " {x}:{v}")?;
                }
            }
        }
        if self.delay != 0 {
            write!(f, " delay={}", self.delay)?;
        }
        if self.from != 0 {
            write!(f, " from={}", self.from)?;
        }
        Ok(())
    }
}

fn parse_program(line: usize, content: &str) -> Result<ClockedProgram, FormatError> {
    let mut toks: Vec<&str> = content.split_whitespace().collect();
    if toks.first() != Some(&"prog") {
        return Err(FormatError::new(line, "expected `prog <rule>`"));
    }
    toks.remove(0);
    let mut delay = 0;
    let mut from = 0;
    while let Some(last) = toks.last() {
        if last.starts_with("delay=") {
            delay = text::keyed_u64(line, last, "delay")?;
        } else if last.starts_with("from=") {
            from = text::keyed_u64(line, last, "from")?;
        } else {
            break;
        }
        toks.pop();
    }
    let n = |tok: &str| text::parse_u64(line, tok);
    let rule = match toks.as_slice() {
        ["identity"] => Rule::Identity,
        ["const", c] => Rule::Const(n(c)?),
        ["shift", k] => Rule::Shift(n(k)?),
        ["affine", a, b] => Rule::Affine(n(a)?, n(b)?),
        ["countdown"] => Rule::Countdown,
        ["never"] => Rule::Never,
        ["pairmap", a1, b1, a2, b2] => Rule::PairMap {
            a1: n(a1)?,
            b1: n(b1)?,
            a2: n(a2)?,
            b2: n(b2)?,
        },
        ["table", entries @ ..] => {
            let mut t = BTreeMap::new();
            for entry in entries {
                let (x, v) = entry
                    .split_once(':')
                    .ok_or_else(|| FormatError::new(line, format!("bad table entry `{entry}`")))?;
                if t.insert(n(x)?, n(v)?).is_some() {
                    return Err(FormatError::new(line, format!("duplicate table input {x}")));
                }
            }
            Rule::Table(t)
        }
        _ => return Err(FormatError::new(line, format!("unknown program rule `{content}`"))),
    };
    Ok(ClockedProgram { rule, delay, from })
}

/// Ordered program list; index `e` plays `φ_e`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProgramList(pub Vec<ClockedProgram>);

impl fmt::Display for ProgramList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "PROGRAMS v1")?;
        for p in &self.0 {
            writeln!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for ProgramList {
    type Err = FormatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (line, rest) = text::expect_header(s, "PROGRAMS v1")?;
        if !rest.is_empty() {
            return Err(FormatError::new(line, "unexpected tokens after header"));
        }
        text::content_lines(s)
            .skip(1)
            .map(|(line, content)| parse_program(line, content))
            .collect::<Result<Vec<_>, _>>()
            .map(ProgramList)
    }
}
