//! Stage-approximation families with declared limit semantics.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::program::{ClockedProgram, FuelSchedule, Outcome};
use super::schedule::Schedule;
use crate::text::{self, FormatError};
use crate::Stage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Semantics {
    /// `x` is in the set iff `h(x,s) = 1` for all large `s`.
    Sigma2,
    /// `x` is in the set iff `h(x,s) = 1` for infinitely many `s`.
    Pi2,
    /// The value is `lim_s h(x,s)`.
    Limit,
    /// Like `Limit`, with `h` nondecreasing in `s`.
    MonotoneLimit,
}

impl Semantics {
    fn is_set(self) -> bool {
        matches!(self, Semantics::Sigma2 | Semantics::Pi2)
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semantics::Sigma2 => "SIGMA2",
            Semantics::Pi2 => "PI2",
            Semantics::Limit => "LIMIT",
            Semantics::MonotoneLimit => "MONOTONE_LIMIT",
        })
    }
}

impl FromStr for Semantics {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "SIGMA2" => Ok(Semantics::Sigma2),
            "PI2" => Ok(Semantics::Pi2),
            "LIMIT" => Ok(Semantics::Limit),
            "MONOTONE_LIMIT" => Ok(Semantics::MonotoneLimit),
            _ => Err(format!("unknown semantics `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("expected {expected} semantics, found {found}")]
    Semantics { expected: Semantics, found: Semantics },
    #[error("truth for x={x}: {reason}")]
    Truth { x: u64, reason: String },
    #[error("values for x={x} are not monotone")]
    NotMonotone { x: u64 },
    #[error("duplicate rule for x={0}")]
    Duplicate(u64),
}

/// Where the stage values come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    /// One schedule per input; missing inputs follow `never`.
    ///
    /// Set and `LIMIT` semantics read the schedule as 0/1. `MONOTONE_LIMIT`
    /// reads it as `h(x,s) = 1 + #{t ∈ [1,s] : schedule holds at t}`.
    Rules(BTreeMap<u64, Schedule>),
    /// Explicit stage values; the last value repeats forever. Missing inputs
    /// behave like a `never` rule.
    Table(BTreeMap<u64, Vec<u64>>),
    /// `h(x,s) = 1 + Σ_{i ≤ x, i < n} φ_i(x)` over programs defined at
    /// `fuel(s)`.
    Dominant {
        programs: Vec<ClockedProgram>,
        fuel: FuelSchedule,
    },
}

/// Declared limit value of one input and the stage by which it has settled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Truth {
    pub value: u64,
    pub stable: Stage,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproximationFamily {
    semantics: Semantics,
    horizon: Option<Stage>,
    source: Source,
    truth: BTreeMap<u64, Truth>,
}

impl ApproximationFamily {
    pub fn from_rules(
        semantics: Semantics,
        horizon: Option<Stage>,
        rules: impl IntoIterator<Item = (u64, Schedule)>,
    ) -> Result<Self, FamilyError> {
        let mut map = BTreeMap::new();
        for (x, sch) in rules {
            if map.insert(x, sch).is_some() {
                return Err(FamilyError::Duplicate(x));
            }
        }
        Ok(ApproximationFamily {
            semantics,
            horizon,
            source: Source::Rules(map),
            truth: BTreeMap::new(),
        })
    }

    pub fn from_table(
        semantics: Semantics,
        horizon: Option<Stage>,
        table: impl IntoIterator<Item = (u64, Vec<u64>)>,
    ) -> Result<Self, FamilyError> {
        let mut map = BTreeMap::new();
        for (x, values) in table {
            if semantics == Semantics::MonotoneLimit && values.windows(2).any(|w| w[0] > w[1]) {
                return Err(FamilyError::NotMonotone { x });
            }
            if map.insert(x, values).is_some() {
                return Err(FamilyError::Duplicate(x));
            }
        }
        Ok(ApproximationFamily {
            semantics,
            horizon,
            source: Source::Table(map),
            truth: BTreeMap::new(),
        })
    }

    /// Declares the limit behavior of `x`; rejected unless it matches the
    /// exact limit of the source and the stable stage is late enough.
    pub fn declare_truth(&mut self, x: u64, truth: Truth) -> Result<(), FamilyError> {
        let err = |reason: String| FamilyError::Truth { x, reason };
        if let Some(h) = self.horizon {
            if truth.stable > h {
                return Err(err(format!("stable stage {} beyond horizon {h}", truth.stable)));
            }
        }
        let Some(limit) = self.exact_limit(x) else {
            return Err(err("the approximation has no finite limit".into()));
        };
        if limit != truth.value {
            return Err(err(format!("declared {} but the limit is {limit}", truth.value)));
        }
        if let Some(settle) = self.settle_stage(x) {
            if truth.stable < settle {
                return Err(err(format!(
                    "declared stable at {} but the approximation changes until {settle}",
                    truth.stable
                )));
            }
        }
        self.truth.insert(x, truth);
        Ok(())
    }

    pub fn with_truth(mut self, x: u64, value: u64, stable: Stage) -> Result<Self, FamilyError> {
        self.declare_truth(x, Truth { value, stable })?;
        Ok(self)
    }

    pub fn semantics(&self) -> Semantics {
        self.semantics
    }

    pub fn horizon(&self) -> Option<Stage> {
        self.horizon
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    pub fn truth(&self) -> &BTreeMap<u64, Truth> {
        &self.truth
    }

    /// Schedule of `x` for rule-based families.
    pub fn schedule(&self, x: u64) -> Option<Schedule> {
        match &self.source {
            Source::Rules(r) => Some(r.get(&x).copied().unwrap_or(Schedule::Never)),
            _ => None,
        }
    }

    /// Inputs with an explicit rule or table row.
    pub fn declared_inputs(&self) -> Vec<u64> {
        match &self.source {
            Source::Rules(r) => r.keys().copied().collect(),
            Source::Table(t) => t.keys().copied().collect(),
            Source::Dominant { .. } => Vec::new(),
        }
    }

    fn default_value(&self) -> u64 {
        if self.semantics == Semantics::MonotoneLimit {
            1
        } else {
            0
        }
    }

    /// The stage-`s` value `h(x,s)`.
    pub fn h(&self, x: u64, s: Stage) -> u64 {
        match &self.source {
            Source::Rules(rules) => {
                let sch = rules.get(&x).copied().unwrap_or(Schedule::Never);
                if self.semantics == Semantics::MonotoneLimit {
                    1 + sch.count_in(1, s)
                } else {
                    sch.holds(s) as u64
                }
            }
            Source::Table(t) => match t.get(&x) {
                Some(v) if !v.is_empty() => v[(s as usize).min(v.len() - 1)],
                _ => self.default_value(),
            },
            Source::Dominant { programs, fuel } => {
                let t = fuel.fuel(s);
                programs
                    .iter()
                    .take(x.saturating_add(1).min(programs.len() as u64) as usize)
                    .filter_map(|p| match p.eval(x, t) {
                        Outcome::Defined(v) => Some(v),
                        Outcome::Diverged => None,
                    })
                    .fold(1u64, u64::saturating_add)
            }
        }
    }

    /// True limit of the approximation on `x` (membership as 0/1 for set
    /// semantics); `None` if the values never settle.
    pub fn exact_limit(&self, x: u64) -> Option<u64> {
        match &self.source {
            Source::Rules(rules) => {
                let sch = rules.get(&x).copied().unwrap_or(Schedule::Never);
                match self.semantics {
                    Semantics::Sigma2 => Some(sch.is_cofinite() as u64),
                    Semantics::Pi2 => Some(sch.is_unbounded() as u64),
                    Semantics::Limit => sch.settles_at().map(|t| sch.holds(t) as u64),
                    Semantics::MonotoneLimit => match sch {
                        Schedule::Never => Some(1),
                        Schedule::Until(u) => Some(1 + sch.count_in(1, u)),
                        _ => None,
                    },
                }
            }
            Source::Table(t) => {
                let last = t.get(&x).and_then(|v| v.last().copied());
                let v = last.unwrap_or(self.default_value());
                if self.semantics.is_set() {
                    Some((v == 1) as u64)
                } else {
                    Some(v)
                }
            }
            Source::Dominant { .. } => self.settle_stage(x).map(|s| self.h(x, s)),
        }
    }

    /// Least stage from which `h(x,·)` is constant, if it ever is.
    pub fn settle_stage(&self, x: u64) -> Option<Stage> {
        match &self.source {
            Source::Rules(rules) => {
                let sch = rules.get(&x).copied().unwrap_or(Schedule::Never);
                if self.semantics == Semantics::MonotoneLimit {
                    match sch {
                        Schedule::Never => Some(0),
                        Schedule::Until(u) => Some(u.saturating_sub(1)),
                        _ => None,
                    }
                } else {
                    sch.settles_at()
                }
            }
            Source::Table(t) => {
                let Some(v) = t.get(&x).filter(|v| !v.is_empty()) else {
                    return Some(0);
                };
                let last = *v.last().unwrap();
                let run = v.iter().rev().take_while(|&&y| y == last).count();
                Some((v.len() - run) as Stage)
            }
            Source::Dominant { programs, fuel } => {
                let mut need = 0;
                for p in programs.iter().take(x.saturating_add(1).min(programs.len() as u64) as usize) {
                    if let Some(t) = p.halting_time(x) {
                        need = need.max(first_stage_with_fuel(*fuel, t)?);
                    }
                }
                Some(need)
            }
        }
    }

    /// Membership read off at the horizon: the stage value for `SIGMA2` and
    /// the limit semantics, and "holds somewhere in `(H/2, H]`" for `PI2`.
    pub fn horizon_value(&self, x: u64, horizon: Stage) -> u64 {
        match self.semantics {
            Semantics::Pi2 => ((horizon / 2 + 1)..=horizon).any(|s| self.h(x, s) == 1) as u64,
            _ => self.h(x, horizon),
        }
    }

    fn expect(&self, expected: Semantics) -> Result<(), FamilyError> {
        if self.semantics == expected {
            Ok(())
        } else {
            Err(FamilyError::Semantics {
                expected,
                found: self.semantics,
            })
        }
    }

    /// Serializes rule-based families; other sources have no file form.
    pub fn to_text(&self) -> Option<String> {
        use std::fmt::Write;
        let mut out = String::new();
        write!(out, "FAMILY v1 semantics={}", self.semantics).ok()?;
        if let Some(h) = self.horizon {
            write!(out, " horizon={h}").ok()?;
        }
        out.push('\n');
        match &self.source {
            Source::Rules(rules) => {
                for (x, sch) in rules {
                    writeln!(out, "x={x} schedule={sch}").ok()?;
                }
            }
            Source::Table(t) => {
                for (x, values) in t {
                    write!(out, "x={x} values=").ok()?;
                    let vals: Vec<String> = values.iter().map(u64::to_string).collect();
                    writeln!(out, "{}", vals.join(" ")).ok()?;
                }
            }
            Source::Dominant { .. } => return None,
        }
        for (x, t) in &self.truth {
            writeln!(out, "truth x={x} value={} stable={}", t.value, t.stable).ok()?;
        }
        Some(out)
    }
}

fn first_stage_with_fuel(fuel: FuelSchedule, t: Stage) -> Option<Stage> {
    if t <= fuel.offset {
        return Some(0);
    }
    if fuel.scale == 0 {
        return None;
    }
    Some((t - fuel.offset).div_ceil(fuel.scale))
}

impl FromStr for ApproximationFamily {
    type Err = FormatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (header_line, rest) = text::expect_header(s, "FAMILY v1")?;
        let mut semantics = None;
        let mut horizon = None;
        for tok in &rest {
            if let Ok(v) = text::keyed(header_line, tok, "semantics") {
                semantics = Some(v.parse().map_err(|e: String| FormatError::new(header_line, e))?);
            } else {
                horizon = Some(text::keyed_u64(header_line, tok, "horizon")?);
            }
        }
        let semantics =
            semantics.ok_or_else(|| FormatError::new(header_line, "missing `semantics=`"))?;
        let mut rules = Vec::new();
        let mut table = Vec::new();
        let mut truths = Vec::new();
        for (line, content) in text::content_lines(s).skip(1) {
            if let Some(body) = content.strip_prefix("truth ") {
                let toks: Vec<&str> = body.split_whitespace().collect();
                let [x, v, st] = toks.as_slice() else {
                    return Err(FormatError::new(line, "expected `truth x=<n> value=<v> stable=<s>`"));
                };
                truths.push((
                    line,
                    text::keyed_u64(line, x, "x")?,
                    Truth {
                        value: text::keyed_u64(line, v, "value")?,
                        stable: text::keyed_u64(line, st, "stable")?,
                    },
                ));
                continue;
            }
            let (x_tok, rule) = content
                .split_once(char::is_whitespace)
                .ok_or_else(|| FormatError::new(line, "expected `x=<n> schedule=<expr>`"))?;
            let x = text::keyed_u64(line, x_tok, "x")?;
            let rule = rule.trim();
            if let Some(expr) = rule.strip_prefix("schedule=") {
                rules.push((line, x, Schedule::parse(line, expr)?));
            } else if let Some(vals) = rule.strip_prefix("values=") {
                let values = vals
                    .split_whitespace()
                    .map(|v| text::parse_u64(line, v))
                    .collect::<Result<Vec<_>, _>>()?;
                table.push((line, x, values));
            } else {
                return Err(FormatError::new(line, "expected `schedule=` or `values=`"));
            }
        }
        if !rules.is_empty() && !table.is_empty() {
            return Err(FormatError::new(header_line, "cannot mix `schedule=` and `values=` rules"));
        }
        let err_line = |lines: &[(usize, u64)], e: FamilyError| {
            let line = match &e {
                FamilyError::Duplicate(x) | FamilyError::NotMonotone { x } => lines
                    .iter()
                    .rev()
                    .find(|(_, y)| y == x)
                    .map_or(header_line, |(l, _)| *l),
                _ => header_line,
            };
            FormatError::new(line, e.to_string())
        };
        let mut fam = if table.is_empty() {
            let lines: Vec<(usize, u64)> = rules.iter().map(|(l, x, _)| (*l, *x)).collect();
            ApproximationFamily::from_rules(semantics, horizon, rules.into_iter().map(|(_, x, r)| (x, r)))
                .map_err(|e| err_line(&lines, e))?
        } else {
            let lines: Vec<(usize, u64)> = table.iter().map(|(l, x, _)| (*l, *x)).collect();
            ApproximationFamily::from_table(semantics, horizon, table.into_iter().map(|(_, x, v)| (x, v)))
                .map_err(|e| err_line(&lines, e))?
        };
        for (line, x, t) in truths {
            fam.declare_truth(x, t)
                .map_err(|e| FormatError::new(line, e.to_string()))?;
        }
        Ok(fam)
    }
}

/// `h(x, horizon)` of a monotone-limit family.
pub fn limit_value(fam: &ApproximationFamily, x: u64, horizon: Stage) -> Result<u64, FamilyError> {
    fam.expect(Semantics::MonotoneLimit)?;
    Ok(fam.h(x, horizon))
}

/// The dominant function over a finite program list, as a monotone-limit
/// family.
pub fn dominant_f(programs: Vec<ClockedProgram>, fuel: FuelSchedule) -> ApproximationFamily {
    ApproximationFamily {
        semantics: Semantics::MonotoneLimit,
        horizon: None,
        source: Source::Dominant { programs, fuel },
        truth: BTreeMap::new(),
    }
}

pub fn sigma2_member_at(fam: &ApproximationFamily, x: u64, s: Stage) -> Result<bool, FamilyError> {
    fam.expect(Semantics::Sigma2)?;
    Ok(fam.h(x, s) == 1)
}

pub fn pi2_member_at(fam: &ApproximationFamily, x: u64, s: Stage) -> Result<bool, FamilyError> {
    fam.expect(Semantics::Pi2)?;
    Ok(fam.h(x, s) == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::program::Rule;

    fn rules(sem: Semantics, r: &[(u64, Schedule)]) -> ApproximationFamily {
        ApproximationFamily::from_rules(sem, Some(100), r.iter().copied()).unwrap()
    }

    #[test]
    fn monotone_limit_examples() {
        let c = ApproximationFamily::from_table(Semantics::MonotoneLimit, None, [(0, vec![7])]).unwrap();
        assert_eq!(limit_value(&c, 0, 50).unwrap(), 7);
        let ramp: Vec<u64> = (0..=10).map(|s: u64| s.min(4)).collect();
        let f = ApproximationFamily::from_table(Semantics::MonotoneLimit, None, [(0, ramp)]).unwrap();
        assert_eq!(limit_value(&f, 0, 10).unwrap(), 4);
        assert_eq!(f.settle_stage(0), Some(4));
        let until = rules(Semantics::MonotoneLimit, &[(0, Schedule::Until(3))]);
        let got: Vec<u64> = (0..6).map(|s| until.h(0, s)).collect();
        assert_eq!(got, vec![1, 2, 3, 3, 3, 3]);
        assert_eq!(until.exact_limit(0), Some(3));
        assert_eq!(until.settle_stage(0), Some(2));
        let s2 = rules(Semantics::Sigma2, &[]);
        assert!(matches!(limit_value(&s2, 0, 1), Err(FamilyError::Semantics { .. })));
    }

    #[test]
    fn dominant_examples() {
        let empty = dominant_f(vec![], FuelSchedule::default());
        assert_eq!(empty.h(5, 100), 1);
        let id = dominant_f(vec![ClockedProgram::identity()], FuelSchedule::default());
        assert_eq!(limit_value(&id, 2, 10).unwrap(), 3);
        let two = dominant_f(
            vec![ClockedProgram::identity(), ClockedProgram::never()],
            FuelSchedule::default(),
        );
        assert_eq!(limit_value(&two, 1, 10).unwrap(), 2);
        let slow = dominant_f(
            vec![ClockedProgram::countdown(), ClockedProgram::new(Rule::Const(4)).with_delay(6)],
            FuelSchedule { scale: 2, offset: 0 },
        );
        assert_eq!(slow.settle_stage(5), Some(3));
        assert_eq!(slow.exact_limit(5), Some(10));
        for s in 0..10 {
            assert!(slow.h(5, s) <= slow.h(5, s + 1));
        }
    }

    #[test]
    fn set_membership_examples() {
        let fam = rules(
            Semantics::Sigma2,
            &[(0, Schedule::Always), (2, Schedule::From(5))],
        );
        assert!((0..20).all(|s| sigma2_member_at(&fam, 0, s).unwrap()));
        assert!((0..20).all(|s| !sigma2_member_at(&fam, 1, s).unwrap()));
        assert!(!sigma2_member_at(&fam, 2, 4).unwrap());
        assert!(sigma2_member_at(&fam, 2, 5).unwrap());
        let even = Schedule::Period {
            period: 2,
            offset: 0,
            from: 0,
        };
        let p = rules(Semantics::Pi2, &[(0, even), (1, Schedule::Until(3))]);
        assert!(pi2_member_at(&p, 0, 40).unwrap() && !pi2_member_at(&p, 0, 41).unwrap());
        assert_eq!(p.exact_limit(0), Some(1));
        assert_eq!(p.exact_limit(1), Some(0));
        assert_eq!(p.horizon_value(1, 100), 0);
        assert!(pi2_member_at(&fam, 0, 0).is_err());
    }

    #[test]
    fn truth_validation() {
        let fam = rules(Semantics::Sigma2, &[(2, Schedule::From(5))]);
        assert!(fam.clone().with_truth(2, 1, 5).is_ok());
        assert!(fam.clone().with_truth(2, 1, 4).is_err());
        assert!(fam.clone().with_truth(2, 0, 9).is_err());
        assert!(fam.clone().with_truth(2, 1, 101).is_err());
        let lim = rules(
            Semantics::Limit,
            &[(
                0,
                Schedule::Period {
                    period: 3,
                    offset: 0,
                    from: 0,
                },
            )],
        );
        assert!(lim.with_truth(0, 0, 10).is_err());
    }

    #[test]
    fn family_text_roundtrip() {
        let text = "FAMILY v1 semantics=PI2 horizon=50\nx=0 schedule=period 2 offset 0 from 0\n\
                    x=1 schedule=until 3\ntruth x=0 value=1 stable=0\ntruth x=1 value=0 stable=3\n";
        let fam: ApproximationFamily = text.parse().unwrap();
        assert_eq!(fam.to_text().unwrap(), text);
        let table = "FAMILY v1 semantics=MONOTONE_LIMIT horizon=9\nx=0 values=0 1 2 3 4 4\n";
        let fam: ApproximationFamily = table.parse().unwrap();
        assert_eq!(fam.to_text().unwrap(), table);
        let bad = "FAMILY v1 semantics=MONOTONE_LIMIT horizon=9\nx=0 values=3 1\n";
        assert_eq!(bad.parse::<ApproximationFamily>().unwrap_err().line, 2);
        let wrong_truth = "FAMILY v1 semantics=SIGMA2 horizon=9\nx=0 schedule=never\ntruth x=0 value=1 stable=0\n";
        assert_eq!(wrong_truth.parse::<ApproximationFamily>().unwrap_err().line, 3);
        assert!("FAMILY v1 horizon=3\n".parse::<ApproximationFamily>().is_err());
        let dup = "FAMILY v1 semantics=SIGMA2\nx=0 schedule=never\nx=0 schedule=always\n";
        assert_eq!(dup.parse::<ApproximationFamily>().unwrap_err().line, 3);
    }
}
