//! A structure of unbounded character with no infinite classes that none of
//! the supplied programs embeds into the triangular structure.

use super::log::{ConstructionLog, LogEvent};
use super::triangular::TriangularStructure;
use crate::approx::{ClockedProgram, FuelSchedule, Outcome};
use crate::embed::{check_partial_embedding, PartialMap};
use crate::pairing::{pair, unpair};
use crate::snapshot::{EquivalenceView, Snapshot};
use crate::{Presentation, PresentationBuilder, Stage};

/// Graph of `prog` at the given fuel, restricted to the universe of `snap`.
pub fn graph_on(prog: &ClockedProgram, snap: &Snapshot, fuel: Stage) -> PartialMap {
    snap.universe()
        .filter_map(|e| match prog.eval(e, fuel) {
            Outcome::Defined(v) => Some((e, v)),
            Outcome::Diverged => None,
        })
        .collect()
}

/// Whether `map` is a nonempty partial embedding of `snap` into the
/// triangular structure. Images outside the structure count as failures.
pub fn is_nonempty_embedding(map: &PartialMap, snap: &Snapshot) -> bool {
    !map.is_empty() && matches!(check_partial_embedding(map, snap, &TriangularStructure), Ok(Ok(())))
}

/// Builds `B` in stages against the programs `φ_0, φ_1, …`.
///
/// `B_0 = {⟨0,0⟩}`. At stage `s+1` the least `e ≤ s` such that `φ_{e,fuel(s)}`
/// restricted to `B_s` is a nonempty partial embedding into the triangular
/// structure and `φ_{e,fuel(s)}(⟨s,0⟩) = ⟨i,n⟩` receives attention: the class
/// of `⟨s,0⟩` grows to size `max(s+2, i+2, m+1)` with elements `⟨s,s+1+j⟩`,
/// where `m` is the size of the previously grown class. Then `⟨s+1,0⟩` is
/// added as a singleton.
pub fn diagonalize_unbounded(
    programs: &[ClockedProgram],
    horizon: Stage,
    fuel: FuelSchedule,
) -> (Presentation, ConstructionLog) {
    let mut b = PresentationBuilder::new();
    let mut log = ConstructionLog::new();
    b.add_new(pair(0, 0)).expect("empty start");
    let mut last_grown = 0u64;
    for s in 0..horizon {
        let t = fuel.fuel(s);
        let witness = pair(s, 0);
        let attending = programs
            .iter()
            .enumerate()
            .take(s as usize + 1)
            .find_map(|(e, p)| {
                let target = p.eval(witness, t).value()?;
                is_nonempty_embedding(&graph_on(p, b.snapshot(), t), b.snapshot())
                    .then_some((e as u64, target))
            });
        b.set_stage(s + 1);
        if let Some((e, target)) = attending {
            let (i, _) = unpair(target);
            let size = (s + 2).max(i + 2).max(last_grown + 1);
            log.push(s + 1, LogEvent::Attend(e));
            for j in 0..size - 1 {
                let elem = pair(s, s + 1 + j);
                b.join(elem, witness).expect("fresh column element");
                log.push(
                    s + 1,
                    LogEvent::Grow {
                        class: witness,
                        element: elem,
                    },
                );
            }
            last_grown = size;
        }
        b.add_new(pair(s + 1, 0)).expect("fresh column");
    }
    (b.finish(horizon), log)
}

/// First stage `s < horizon` at which `φ_{e,fuel(s)}` restricted to `B_s` is
/// a nonempty partial embedding.
pub fn first_embedding_stage(
    prog: &ClockedProgram,
    pres: &Presentation,
    horizon: Stage,
    fuel: FuelSchedule,
) -> Option<Stage> {
    let mut replay = pres.replay();
    for s in 0..horizon {
        replay.advance_to(s);
        let snap = replay.snapshot();
        if is_nonempty_embedding(&graph_on(prog, snap, fuel.fuel(s)), snap) {
            return Some(s);
        }
    }
    None
}

/// Whether the graph of `prog` at `fuel(horizon)` on `B`'s horizon snapshot
/// fails to be a partial embedding into the triangular structure, or maps
/// some class into a strictly smaller one.
pub fn is_defeated(prog: &ClockedProgram, pres: &Presentation, horizon: Stage, fuel: FuelSchedule) -> bool {
    let snap = pres.snapshot_at(horizon);
    let map = graph_on(prog, &snap, fuel.fuel(horizon));
    match check_partial_embedding(&map, &snap, &TriangularStructure) {
        Ok(Ok(())) => map.iter().any(|(&a, &v)| {
            snap.class_size(a).unwrap() > TriangularStructure.class_size(v).unwrap()
        }),
        _ => true,
    }
}
