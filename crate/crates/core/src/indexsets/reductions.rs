//! Structure transformers: each turns stage predicates into a presentation
//! whose character encodes the limit behaviour of the predicates.

use std::collections::BTreeSet;

use super::IndexSetError;
use crate::pairing::{pair, quad, triple};
use crate::presentation::direct_sum;
use crate::{Element, Presentation, PresentationBuilder, Stage};

/// A predicate on stages, read as "fires at stage s".
pub type StagePred<'a> = &'a dyn Fn(Stage) -> bool;

/// A predicate on `(x, s)`.
pub type ColumnPred<'a> = &'a dyn Fn(u64, Stage) -> bool;

/// A predicate on `(x, y, u, v)`.
pub type Pi04Pred<'a> = &'a dyn Fn(u64, u64, u64, u64) -> bool;

fn add_class(b: &mut PresentationBuilder, size: u64) -> Option<Element> {
    if size == 0 {
        return None;
    }
    let root = b.fresh();
    b.add_new(root).expect("fresh root");
    for _ in 1..size {
        let e = b.fresh();
        b.join(e, root).expect("fresh member");
    }
    Some(root)
}

/// `base ⊕ E`, where `E` gains a class of size `n` the first time `e` fires
/// and a class of size `n+1` the first time `i` fires.
pub fn reduce_d01(
    e: StagePred,
    i: StagePred,
    n: u64,
    base: &Presentation,
    horizon: Stage,
) -> Presentation {
    let mut b = PresentationBuilder::new();
    let (mut e_done, mut i_done) = (false, false);
    for s in 0..=horizon {
        b.set_stage(s);
        if !e_done && e(s) {
            add_class(&mut b, n);
            e_done = true;
        }
        if !i_done && i(s) {
            add_class(&mut b, n + 1);
            i_done = true;
        }
    }
    direct_sum(base, &b.finish(horizon))
}

/// `base ⊕ E`, where `E` gains a class of size `n` at every firing of `w`.
/// The `t`-th firing enumerates `t` and must happen at a stage `s > t`.
pub fn reduce_pi02(
    w: StagePred,
    n: u64,
    base: &Presentation,
    horizon: Stage,
) -> Result<Presentation, IndexSetError> {
    let mut b = PresentationBuilder::new();
    let mut t = 0;
    for s in 0..=horizon {
        b.set_stage(s);
        if w(s) {
            if t >= s {
                return Err(IndexSetError::LateEnumeration { x: t, stage: s });
            }
            add_class(&mut b, n);
            t += 1;
        }
    }
    Ok(direct_sum(base, &b.finish(horizon)))
}

/// `base ⊕ E`, where `E` is a single class gaining one element per firing.
pub fn reduce_pi02_inf(w: StagePred, base: &Presentation, horizon: Stage) -> Presentation {
    let mut b = PresentationBuilder::new();
    let mut root = None;
    for s in 0..=horizon {
        b.set_stage(s);
        if w(s) {
            match root {
                None => root = add_class(&mut b, 1),
                Some(r) => {
                    let e = b.fresh();
                    b.join(e, r).expect("fresh member");
                }
            }
        }
    }
    direct_sum(base, &b.finish(horizon))
}

/// Even left columns carry one class of every finite size, odd left columns
/// carry `k` classes each.
///
/// Column `x` enters at stage `x`: `{⟨2x,0,m⟩ : m ≤ x}` and singletons
/// `⟨2x+1,c,0⟩` for `c < k`. At an even stage `2j`, for each `x < j` with
/// `r(x,j)`, `⟨2x,0,j⟩` joins `⟨2x,0,0⟩`. At an odd stage `2j+1`, for each
/// `x < j` with `t(x,j)`, `⟨2x+1,c,j⟩` joins `⟨2x+1,c,0⟩` for every `c < k`.
pub fn reduce_d03(r: ColumnPred, t: ColumnPred, k: u64, horizon: Stage) -> Presentation {
    let mut b = PresentationBuilder::new();
    for s in 0..=horizon {
        b.set_stage(s);
        let root = triple(2 * s, 0, 0);
        b.add_new(root).expect("fresh column");
        for m in 1..=s {
            b.join(triple(2 * s, 0, m), root).expect("fresh column");
        }
        for c in 0..k {
            b.add_new(triple(2 * s + 1, c, 0)).expect("fresh column");
        }
        let j = s / 2;
        for x in 0..j {
            if s % 2 == 0 {
                if r(x, j) {
                    b.join(triple(2 * x, 0, j), triple(2 * x, 0, 0)).expect("fresh element");
                }
            } else if t(x, j) {
                for c in 0..k {
                    b.join(triple(2 * x + 1, c, j), triple(2 * x + 1, c, 0))
                        .expect("fresh element");
                }
            }
        }
    }
    b.finish(horizon)
}

/// A singleton `⟨0,s⟩` at every stage `s`; when `x < s` first satisfies
/// `w(x,s)`, the class `{⟨x+1,s+i⟩ : i ≤ x}` of size `x+1` appears.
pub fn reduce_sigma02(w: ColumnPred, horizon: Stage) -> Presentation {
    let mut b = PresentationBuilder::new();
    let mut entered = BTreeSet::new();
    for s in 0..=horizon {
        b.set_stage(s);
        b.add_new(pair(0, s)).expect("fresh singleton");
        for x in 0..s {
            if !entered.contains(&x) && w(x, s) {
                entered.insert(x);
                let root = pair(x + 1, s);
                b.add_new(root).expect("fresh class");
                for i in 1..=x {
                    b.join(pair(x + 1, s + i), root).expect("fresh class");
                }
            }
        }
    }
    b.finish(horizon)
}

/// Checks, for `x, y ≤ horizon`, that the `(u,v)` with `pred(x,y,u,v)` form
/// an initial segment of the pair codes up to `⟨horizon,horizon⟩`, and that
/// for each `x` at most one `y` is still true at `⟨horizon,horizon⟩`.
pub fn check_pi04_normalization(pred: Pi04Pred, horizon: Stage) -> Result<(), IndexSetError> {
    let top = pair(horizon, horizon);
    for x in 0..=horizon {
        let mut live = None;
        for y in 0..=horizon {
            let at = |c: u64| {
                let (u, v) = crate::pairing::unpair(c);
                pred(x, y, u, v)
            };
            let mut prev = at(1);
            for c in 2..=top {
                let cur = at(c);
                if cur && !prev {
                    return Err(IndexSetError::Normalization(format!(
                        "column ({x},{y}) is not an initial segment at code {c}"
                    )));
                }
                prev = cur;
            }
            if prev {
                if let Some(other) = live.replace(y) {
                    return Err(IndexSetError::Normalization(format!(
                        "x={x} has live columns y={other} and y={y}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Class of `⟨x,y,0,0⟩` at stage `s` is `{⟨x,y,u,v⟩ : u,v ≤ s, pred(x,y,u,v)}`
/// together with the root; roots with `x, y ≤ s` are present at stage `s`.
pub fn reduce_pi04(pred: Pi04Pred, horizon: Stage) -> Result<Presentation, IndexSetError> {
    check_pi04_normalization(pred, horizon)?;
    let mut b = PresentationBuilder::new();
    for s in 0..=horizon {
        b.set_stage(s);
        for x in 0..=s {
            for y in 0..=s {
                let new_column = x.max(y) == s;
                let root = quad(x, y, 0, 0);
                if new_column {
                    b.add_new(root).expect("fresh root");
                }
                for u in 0..=s {
                    for v in 0..=s {
                        if (u, v) == (0, 0) || !(new_column || u.max(v) == s) {
                            continue;
                        }
                        if pred(x, y, u, v) {
                            b.join(quad(x, y, u, v), root).expect("fresh element");
                        }
                    }
                }
            }
        }
    }
    Ok(b.finish(horizon))
}

/// `reduce_pi04(pred) ⊕ base` for an unbounded `base` without infinite
/// classes.
pub fn reduce_sigma04(
    pred: Pi04Pred,
    base: &Presentation,
    horizon: Stage,
) -> Result<Presentation, IndexSetError> {
    Ok(direct_sum(&reduce_pi04(pred, horizon)?, base))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::canonical_triangular;
    use crate::{Census, Snapshot};

    fn finite(classes: &[u64]) -> Presentation {
        let mut b = PresentationBuilder::new();
        for &n in classes {
            add_class(&mut b, n);
        }
        b.finish(0)
    }

    #[test]
    fn d01_cases() {
        let base = finite(&[1, 3]);
        let at3 = |s: Stage| s >= 3;
        let never = |_: Stage| false;
        let census = |e: StagePred, i: StagePred| reduce_d01(e, i, 2, &base, 10).census_at(10);
        assert_eq!(census(&at3, &never), Census::from_sizes([1, 2, 3]));
        assert_eq!(census(&never, &never), Census::from_sizes([1, 3]));
        assert_eq!(census(&at3, &at3), Census::from_sizes([1, 2, 3, 3]));
    }

    #[test]
    fn d01_uses_even_odd_numbering() {
        let base = finite(&[1]);
        let p = reduce_d01(&|_| true, &|_| false, 2, &base, 2);
        let snap = p.final_snapshot();
        assert!(snap.class_members(0).unwrap().len() == 1);
        assert!(snap.universe().filter(|e| e % 2 == 1).count() == 2);
    }

    #[test]
    fn pi02_counts_firings() {
        let base = finite(&[3]);
        let p = reduce_pi02(&|_| false, 2, &base, 20).unwrap();
        assert_eq!(p.census_at(20), Census::from_sizes([3]));
        let three = |s: Stage| (5..8).contains(&s);
        let p = reduce_pi02(&three, 2, &base, 20).unwrap();
        assert_eq!(p.census_at(20).count_of(2), 3);
        let every = |s: Stage| s >= 1;
        let p = reduce_pi02(&every, 2, &base, 20).unwrap();
        assert_eq!(p.census_at(10).count_of(2), 10);
        assert_eq!(p.census_at(20).count_of(2), 20);
        assert_eq!(
            reduce_pi02(&|_| true, 2, &base, 5),
            Err(IndexSetError::LateEnumeration { x: 0, stage: 0 })
        );
    }

    #[test]
    fn pi02_inf_growth() {
        let base = finite(&[1]);
        let p = reduce_pi02_inf(&|_| false, &base, 10);
        assert_eq!(p.final_snapshot().len(), 1);
        let two = |s: Stage| s == 2 || s == 4;
        let p = reduce_pi02_inf(&two, &base, 10);
        assert_eq!(p.census_at(10), Census::from_sizes([1, 2]));
        let even = |s: Stage| s % 2 == 0;
        let p = reduce_pi02_inf(&even, &base, 20);
        assert_eq!(p.census_at(20).max_size(), Some(11));
        assert!(p.inf_guess(1, 20).unwrap());
    }

    #[test]
    fn d03_columns() {
        let never = |_: u64, _: Stage| false;
        let col0 = |x: u64, _: Stage| x == 0;
        let p = reduce_d03(&never, &col0, 2, 40);
        let inf: Vec<Element> = p
            .class_histories()
            .map(|(id, _)| id)
            .filter(|&id| p.inf_guess(id, 40).unwrap())
            .collect();
        assert_eq!(inf, vec![triple(1, 0, 0), triple(1, 1, 0)]);
        let p = reduce_d03(&col0, &col0, 2, 40);
        let count = p
            .class_histories()
            .filter(|&(id, _)| p.inf_guess(id, 40).unwrap())
            .count();
        assert_eq!(count, 3);
        let p = reduce_d03(&never, &never, 2, 10);
        assert_eq!(p.class_size_at(triple(1, 0, 0), 10).unwrap(), 1);
        assert_eq!(p.class_size_at(triple(6, 0, 0), 10).unwrap(), 4);
    }

    #[test]
    fn sigma02_sizes() {
        let p = reduce_sigma02(&|_, _| false, 10);
        assert!(p.census_at(10).sizes().iter().all(|&n| n == 1));
        let one_to_six = |x: u64, s: Stage| (1..=6).contains(&x) && s > x;
        let p = reduce_sigma02(&one_to_six, 10);
        for n in 2..=7 {
            assert_eq!(p.census_at(10).count_of(n), 1);
        }
        let all = |x: u64, s: Stage| x < s;
        let p = reduce_sigma02(&all, 20);
        assert_eq!(p.census_at(10).max_size(), Some(10));
        assert_eq!(p.census_at(20).max_size(), Some(20));
    }

    #[test]
    fn pi04_column_law() {
        let pred = |x: u64, y: u64, u: u64, v: u64| y == 0 && x == 0 && pair(u, v) < 7;
        let p = reduce_pi04(&pred, 6).unwrap();
        for s in 0..=6 {
            let expect = 1 + (0..=s)
                .flat_map(|u| (0..=s).map(move |v| (u, v)))
                .filter(|&(u, v)| (u, v) != (0, 0) && pred(0, 0, u, v))
                .count() as u64;
            assert_eq!(p.class_size_at(quad(0, 0, 0, 0), s).unwrap(), expect);
        }
        let p = reduce_pi04(&|_, _, _, _| false, 5).unwrap();
        assert!(p.census_at(5).sizes().iter().all(|&n| n == 1));
        assert_eq!(p.census_at(5).total(), 36);
    }

    #[test]
    fn pi04_rejects_unnormalized() {
        let gap = |_: u64, _: u64, u: u64, v: u64| pair(u, v) != 3;
        assert!(matches!(
            reduce_pi04(&gap, 4),
            Err(IndexSetError::Normalization(_))
        ));
        let two_live = |_: u64, y: u64, _: u64, _: u64| y < 2;
        assert!(reduce_pi04(&two_live, 4).is_err());
    }

    #[test]
    fn sigma04_with_empty_predicate_keeps_base_census() {
        let base = canonical_triangular(8);
        let p = reduce_sigma04(&|_, _, _, _| false, &base, 8).unwrap();
        let odd: Vec<u64> = {
            let snap: Snapshot = p.final_snapshot();
            let mut sizes: Vec<u64> = snap
                .classes()
                .filter(|(id, _)| id % 2 == 1)
                .map(|(_, m)| m.len() as u64)
                .collect();
            sizes.sort();
            sizes
        };
        assert_eq!(odd, base.census_at(8).sizes());
        let evens = p.final_snapshot().universe().filter(|e| e % 2 == 0).count();
        assert_eq!(evens, 81);
    }
}
