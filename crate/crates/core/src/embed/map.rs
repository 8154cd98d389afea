//! Finite partial maps, their stage histories, and exact verification.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use super::EmbedError;
use crate::snapshot::EquivalenceView;
use crate::text::{self, FormatError};
use crate::{Element, Stage};

/// A finite map between element ids.
pub type PartialMap = BTreeMap<Element, Element>;

/// Why a map fails to be a partial embedding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NotInjective { a: Element, b: Element, image: Element },
    /// Equivalent sources with inequivalent images.
    Split { a: Element, b: Element },
    /// Inequivalent sources with equivalent images.
    Collapse { a: Element, b: Element },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotInjective { a, b, image } => {
                write!(f, "{a} and {b} both map to {image}")
            }
            Violation::Split { a, b } => write!(f, "{a} E {b} but their images are inequivalent"),
            Violation::Collapse { a, b } => {
                write!(f, "{a} and {b} are inequivalent but their images are equivalent")
            }
        }
    }
}

/// Checks injectivity and bi-congruence of `map` from `source` into `target`.
///
/// `Ok(Err(v))` reports the first violation found; `Err` means some mapped
/// element is missing from its structure.
pub fn check_partial_embedding(
    map: &PartialMap,
    source: &impl EquivalenceView,
    target: &impl EquivalenceView,
) -> Result<Result<(), Violation>, EmbedError> {
    let mut image_owner: BTreeMap<Element, Element> = BTreeMap::new();
    // source class id -> (representative, target class id)
    let mut forward: BTreeMap<Element, (Element, Element)> = BTreeMap::new();
    // target class id -> (representative, source class id)
    let mut backward: BTreeMap<Element, (Element, Element)> = BTreeMap::new();
    for (&a, &fa) in map {
        let ca = source
            .class_id(a)
            .ok_or(EmbedError::Dangling { element: a, side: "source" })?;
        let cfa = target
            .class_id(fa)
            .ok_or(EmbedError::Dangling { element: fa, side: "target" })?;
        if let Some(&b) = image_owner.get(&fa) {
            return Ok(Err(Violation::NotInjective { a: b, b: a, image: fa }));
        }
        image_owner.insert(fa, a);
        match forward.get(&ca) {
            Some(&(b, cfb)) if cfb != cfa => return Ok(Err(Violation::Split { a: b, b: a })),
            Some(_) => {}
            None => {
                forward.insert(ca, (a, cfa));
            }
        }
        match backward.get(&cfa) {
            Some(&(b, cb)) if cb != ca => return Ok(Err(Violation::Collapse { a: b, b: a })),
            Some(_) => {}
            None => {
                backward.insert(cfa, (a, ca));
            }
        }
    }
    Ok(Ok(()))
}

/// True iff `map` is injective and bi-congruent.
pub fn verify_partial_embedding(
    map: &PartialMap,
    source: &impl EquivalenceView,
    target: &impl EquivalenceView,
) -> Result<bool, EmbedError> {
    Ok(check_partial_embedding(map, source, target)?.is_ok())
}

/// A map approximated in stages, stored as the change history of each
/// element's image.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StagedMap {
    horizon: Stage,
    history: BTreeMap<Element, Vec<(Stage, Option<Element>)>>,
    deferrals: Vec<(Stage, Element)>,
}

impl StagedMap {
    pub fn new(horizon: Stage) -> Self {
        StagedMap {
            horizon,
            ..Default::default()
        }
    }

    pub fn horizon(&self) -> Stage {
        self.horizon
    }

    /// Sets the image of `e` from stage `s` on; stages must be recorded in
    /// nondecreasing order per element.
    pub fn record(&mut self, s: Stage, e: Element, image: Option<Element>) {
        let h = self.history.entry(e).or_default();
        match h.last() {
            Some(&(_, cur)) if cur == image => {}
            None if image.is_none() => {}
            _ => h.push((s, image)),
        }
    }

    pub fn defer(&mut self, s: Stage, e: Element) {
        self.deferrals.push((s, e));
    }

    pub fn deferrals(&self) -> &[(Stage, Element)] {
        &self.deferrals
    }

    pub fn image_at(&self, e: Element, s: Stage) -> Option<Element> {
        let h = self.history.get(&e)?;
        let i = h.partition_point(|&(t, _)| t <= s);
        if i == 0 {
            None
        } else {
            h[i - 1].1
        }
    }

    /// `ν_s`.
    pub fn at(&self, s: Stage) -> PartialMap {
        self.history
            .keys()
            .filter_map(|&e| self.image_at(e, s).map(|v| (e, v)))
            .collect()
    }

    pub fn final_map(&self) -> PartialMap {
        self.at(self.horizon)
    }

    /// Stages at which a defined image of `e` changed or became undefined.
    pub fn mind_changes(&self, e: Element) -> Vec<Stage> {
        let Some(h) = self.history.get(&e) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        let mut prev = None;
        for &(s, img) in h {
            if prev.is_some() {
                out.push(s);
            }
            prev = img;
        }
        out
    }

    pub fn mind_change_log(&self) -> MindChangeLog {
        MindChangeLog(
            self.history
                .keys()
                .map(|&e| (e, self.mind_changes(e)))
                .filter(|(_, v)| !v.is_empty())
                .collect(),
        )
    }

    pub fn total_mind_changes(&self) -> usize {
        self.history.keys().map(|&e| self.mind_changes(e).len()).sum()
    }

    /// Whether every element's image is the same at all stages in `lo..=hi`
    /// at which the element has an image history entry at or before `lo`.
    pub fn constant_on(&self, lo: Stage, hi: Stage) -> bool {
        self.history.values().all(|h| {
            let first = h.first().map_or(Stage::MAX, |&(t, _)| t);
            let from = lo.max(first);
            h.iter().all(|&(t, _)| t <= from || t > hi)
        })
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        self.history.keys().copied()
    }
}

/// Stages of image changes per element.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MindChangeLog(pub BTreeMap<Element, Vec<Stage>>);

impl fmt::Display for MindChangeLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MC v1")?;
        for (e, stages) in &self.0 {
            write!(f, "{e}:")?;
            for s in stages {
                write!(f, " {s}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for MindChangeLog {
    type Err = FormatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (line, rest) = text::expect_header(s, "MC v1")?;
        if !rest.is_empty() {
            return Err(FormatError::new(line, "unexpected tokens after header"));
        }
        let mut out = BTreeMap::new();
        for (line, content) in text::content_lines(s).skip(1) {
            let (e, stages) = content
                .split_once(':')
                .ok_or_else(|| FormatError::new(line, "expected `<elem>: <stages>`"))?;
            let e = text::parse_u64(line, e.trim())?;
            let stages = stages
                .split_whitespace()
                .map(|t| text::parse_u64(line, t))
                .collect::<Result<Vec<_>, _>>()?;
            if out.insert(e, stages).is_some() {
                return Err(FormatError::new(line, format!("duplicate element {e}")));
            }
        }
        Ok(MindChangeLog(out))
    }
}

/// A map together with the stage it was taken at, in `MAP v1` form.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MapFile {
    pub stage: Stage,
    pub map: PartialMap,
}

impl fmt::Display for MapFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MAP v1 stage={}", self.stage)?;
        for (a, b) in &self.map {
            writeln!(f, "-> {a} {b}")?;
        }
        Ok(())
    }
}

impl FromStr for MapFile {
    type Err = FormatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (line, rest) = text::expect_header(s, "MAP v1")?;
        let [stage] = rest.as_slice() else {
            return Err(FormatError::new(line, "expected `stage=<s>`"));
        };
        let stage = text::keyed_u64(line, stage, "stage")?;
        let mut map = PartialMap::new();
        let mut last = None;
        for (line, content) in text::content_lines(s).skip(1) {
            let toks: Vec<&str> = content.split_whitespace().collect();
            let ["->", a, b] = toks.as_slice() else {
                return Err(FormatError::new(line, "expected `-> <src> <dst>`"));
            };
            let a = text::parse_u64(line, a)?;
            if last.is_some_and(|p| p >= a) {
                return Err(FormatError::new(line, "sources must be ascending"));
            }
            last = Some(a);
            map.insert(a, text::parse_u64(line, b)?);
        }
        Ok(MapFile { stage, map })
    }
}

/// Classes of `source` hit by `map`, with their image classes.
pub fn class_images(
    map: &PartialMap,
    source: &impl EquivalenceView,
    target: &impl EquivalenceView,
) -> BTreeSet<(Element, Element)> {
    map.iter()
        .filter_map(|(&a, &b)| Some((source.class_id(a)?, target.class_id(b)?)))
        .collect()
}
