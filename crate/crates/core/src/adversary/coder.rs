//! A structure coding a Π₂-approximated set into which of its witness classes
//! are infinite, and the transversal decoder.

use std::collections::BTreeMap;

use super::log::{ConstructionLog, LogEvent};
use super::AdversaryError;
use crate::approx::{ApproximationFamily, FamilyError, Semantics};
use crate::pairing::{triple, untriple};
use crate::{Element, Presentation, PresentationBuilder, Stage};

/// The `i`-th binary string in length-lexicographic order: ε, 0, 1, 00, 01, …
pub fn string_at(i: u64) -> Vec<bool> {
    let n = i + 1;
    let len = 63 - n.leading_zeros();
    (0..len).rev().map(|k| (n >> k) & 1 == 1).collect()
}

/// Index of `sigma` in length-lexicographic order.
pub fn index_of(sigma: &[bool]) -> u64 {
    sigma.iter().fold(1u64, |n, &b| (n << 1) | b as u64) - 1
}

/// Number of binary strings of length at most `len`.
pub fn strings_up_to(len: u32) -> u64 {
    (1u64 << (len + 1)) - 1
}

/// Builds the coding structure for the strings `σ_0 … σ_{n-1}`.
///
/// Stage 0 designates `⟨i,0,0⟩` for every `i < n`. At stage `s+1`, for each
/// `i < min(s+1, n)`: if some `x` with `σ_i(x) = 0` is in the stage-`s+1`
/// approximation, the current witness is discarded and `⟨i,s+1,0⟩` is
/// designated; then the designated witness's class grows to
/// `min {#{t ≤ s : x in the approximation at t} : σ_i(x) = 1}` (or `s+1` when
/// `σ_i` has no 1) with elements `⟨i,j,r⟩`, `r > s`.
pub fn build_doublejump_coder(
    fam: &ApproximationFamily,
    n_strings: u64,
    horizon: Stage,
) -> Result<(Presentation, ConstructionLog), AdversaryError> {
    if fam.semantics() != Semantics::Pi2 {
        return Err(FamilyError::Semantics {
            expected: Semantics::Pi2,
            found: fam.semantics(),
        }
        .into());
    }
    let strings: Vec<Vec<bool>> = (0..n_strings).map(string_at).collect();
    let max_len = strings.iter().map(Vec::len).max().unwrap_or(0) as u64;
    let mut b = PresentationBuilder::new();
    let mut log = ConstructionLog::new();
    // i -> (j, current size, last r used)
    let mut witness: Vec<(u64, u64, u64)> = Vec::new();
    for i in 0..n_strings {
        let w = triple(i, 0, 0);
        b.add_new(w).expect("fresh witness");
        log.push(0, LogEvent::Designate(w));
        witness.push((0, 1, 0));
    }
    // counts[x] = #{t ≤ s : x in the approximation at t}
    let mut counts: Vec<u64> = (0..max_len).map(|x| fam.h(x, 0)).collect();
    for s in 0..horizon {
        b.set_stage(s + 1);
        for i in 0..n_strings.min(s + 1) {
            let sigma = &strings[i as usize];
            let (j, _, _) = witness[i as usize];
            let hit = sigma
                .iter()
                .enumerate()
                .any(|(x, &bit)| !bit && fam.h(x as u64, s + 1) == 1);
            if hit {
                let old = triple(i, j, 0);
                log.push(s + 1, LogEvent::Discard(old));
                let w = triple(i, s + 1, 0);
                b.add_new(w).expect("fresh witness");
                log.push(s + 1, LogEvent::Designate(w));
                witness[i as usize] = (s + 1, 1, s + 1);
            }
            let target = sigma
                .iter()
                .enumerate()
                .filter(|(_, &bit)| bit)
                .map(|(x, _)| counts[x])
                .min()
                .unwrap_or(s + 1);
            let (j, size, last_r) = &mut witness[i as usize];
            let root = triple(i, *j, 0);
            while *size < target {
                *last_r = (*last_r).max(s) + 1;
                let e = triple(i, *j, *last_r);
                b.join(e, root).expect("fresh growth element");
                log.push(s + 1, LogEvent::Grow { class: root, element: e });
                *size += 1;
            }
        }
        for (x, c) in counts.iter_mut().enumerate() {
            *c += fam.h(x as u64, s + 1);
        }
    }
    Ok((b.finish(horizon), log))
}

/// Witnesses still designated at `horizon` that were designated by
/// `horizon / 2` and whose class is guessed infinite at `horizon`, keyed by
/// string index.
pub fn surviving_witnesses(
    pres: &Presentation,
    log: &ConstructionLog,
    horizon: Stage,
) -> BTreeMap<u64, Element> {
    let state = log.state_at(horizon);
    let mut out = BTreeMap::new();
    for (&w, &since) in &state.designated {
        if since <= horizon / 2 && pres.inf_guess(w, horizon).unwrap_or(false) {
            let (i, _, _) = untriple(w);
            out.entry(i).or_insert(w);
        }
    }
    out
}

/// Reads bit `x` of the coded set off a surviving witness whose string is
/// longer than `x`: returns `true` iff `x` is in the complement of the
/// approximated set.
pub fn decode_transversal(
    pres: &Presentation,
    log: &ConstructionLog,
    horizon: Stage,
    x: u64,
) -> Result<bool, AdversaryError> {
    surviving_witnesses(pres, log, horizon)
        .keys()
        .map(|&i| string_at(i))
        .find(|sigma| sigma.len() as u64 > x)
        .map(|sigma| !sigma[x as usize])
        .ok_or(AdversaryError::NoWitness(x))
}
