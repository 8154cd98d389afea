//! Declared stage schedules: which stages a rule holds at.

use std::fmt;

use crate::text::{self, FormatError};
use crate::Stage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Schedule {
    Always,
    Never,
    /// True at every stage `>= s`.
    From(Stage),
    /// True at every stage `< s`.
    Until(Stage),
    /// True at stages `t >= from` with `t ≡ offset (mod period)`.
    Period {
        period: u64,
        offset: u64,
        from: Stage,
    },
}

impl Schedule {
    pub fn holds(&self, s: Stage) -> bool {
        match *self {
            Schedule::Always => true,
            Schedule::Never => false,
            Schedule::From(t) => s >= t,
            Schedule::Until(t) => s < t,
            Schedule::Period {
                period,
                offset,
                from,
            } => s >= from && s % period == offset % period,
        }
    }

    /// True at infinitely many stages.
    pub fn is_unbounded(&self) -> bool {
        !matches!(self, Schedule::Never | Schedule::Until(_))
    }

    /// True at all sufficiently large stages.
    pub fn is_cofinite(&self) -> bool {
        match *self {
            Schedule::Always | Schedule::From(_) => true,
            Schedule::Period { period, .. } => period == 1,
            Schedule::Never | Schedule::Until(_) => false,
        }
    }

    /// Least stage from which the truth value never changes, if any.
    pub fn settles_at(&self) -> Option<Stage> {
        match *self {
            Schedule::Always | Schedule::Never => Some(0),
            Schedule::From(t) | Schedule::Until(t) => Some(t),
            Schedule::Period { period: 1, from, .. } => Some(from),
            Schedule::Period { .. } => None,
        }
    }

    /// Least stage `>= s` at which the schedule holds.
    pub fn next_true(&self, s: Stage) -> Option<Stage> {
        match *self {
            Schedule::Always => Some(s),
            Schedule::Never => None,
            Schedule::From(t) => Some(s.max(t)),
            Schedule::Until(t) => (s < t).then_some(s),
            Schedule::Period {
                period,
                offset,
                from,
            } => {
                let start = s.max(from);
                let r = offset % period;
                let base = start - start % period + r;
                Some(if base >= start { base } else { base + period })
            }
        }
    }

    /// Number of stages in `lo..=hi` at which the schedule holds.
    pub fn count_in(&self, lo: Stage, hi: Stage) -> u64 {
        if lo > hi {
            return 0;
        }
        let span = |a: Stage, b: Stage| if a > b { 0 } else { b - a + 1 };
        match *self {
            Schedule::Always => span(lo, hi),
            Schedule::Never => 0,
            Schedule::From(t) => span(lo.max(t), hi),
            Schedule::Until(t) => {
                if t == 0 {
                    0
                } else {
                    span(lo, hi.min(t - 1))
                }
            }
            Schedule::Period {
                period,
                offset,
                from,
            } => {
                let r = offset % period;
                // #{t <= n : t ≡ r}
                let upto = |n: Stage| if n < r { 0 } else { (n - r) / period + 1 };
                let lo = lo.max(from);
                if lo > hi {
                    0
                } else if lo == 0 {
                    upto(hi)
                } else {
                    upto(hi) - upto(lo - 1)
                }
            }
        }
    }

    pub(crate) fn parse(line: usize, expr: &str) -> Result<Schedule, FormatError> {
        let toks: Vec<&str> = expr.split_whitespace().collect();
        let n = |tok: &str| text::parse_u64(line, tok);
        match toks.as_slice() {
            ["always"] => Ok(Schedule::Always),
            ["never"] => Ok(Schedule::Never),
            ["from", s] => Ok(Schedule::From(n(s)?)),
            ["until", s] => Ok(Schedule::Until(n(s)?)),
            ["period", p, "offset", o, "from", s] => {
                let period = n(p)?;
                if period == 0 {
                    return Err(FormatError::new(line, "period must be positive"));
                }
                Ok(Schedule::Period {
                    period,
                    offset: n(o)?,
                    from: n(s)?,
                })
            }
            _ => Err(FormatError::new(line, format!("unknown schedule `{expr}`"))),
        }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::Always => write!(f, "always"),
            Schedule::Never => write!(f, "never"),
            Schedule::From(s) => write!(f, "from {s}"),
            Schedule::Until(s) => write!(f, "until {s}"),
            Schedule::Period {
                period,
                offset,
                from,
            } => write!(f, "period {period} offset {offset} from {from}"),
        }
    }
}
