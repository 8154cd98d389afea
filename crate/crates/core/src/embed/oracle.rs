//! Embeddability of finite structures: the size-comparison test and an
//! exhaustive search over injections.

use super::map::PartialMap;
use crate::snapshot::{EquivalenceView, Snapshot};
use crate::Element;

/// Size test: sort class sizes descending and compare pointwise.
pub fn finite_embeds(a: &Snapshot, b: &Snapshot) -> bool {
    let mut sa = a.census().sizes().to_vec();
    let mut sb = b.census().sizes().to_vec();
    sa.reverse();
    sb.reverse();
    sa.len() <= sb.len() && sa.iter().zip(&sb).all(|(x, y)| x <= y)
}

/// Searches all injections of `a`'s universe into `b`'s universe for one that
/// preserves and reflects equivalence.
pub fn brute_force_embedding(a: &Snapshot, b: &Snapshot) -> Option<PartialMap> {
    let src: Vec<Element> = a.universe().collect();
    let dst: Vec<Element> = b.universe().collect();
    if src.len() > dst.len() {
        return None;
    }
    let src_class: Vec<Element> = src.iter().map(|&e| a.class_id(e).unwrap()).collect();
    let dst_class: Vec<Element> = dst.iter().map(|&e| b.class_id(e).unwrap()).collect();
    let mut used = vec![false; dst.len()];
    let mut assign: Vec<usize> = Vec::with_capacity(src.len());
    if search(&src_class, &dst_class, &mut used, &mut assign) {
        Some(
            assign
                .iter()
                .enumerate()
                .map(|(i, &j)| (src[i], dst[j]))
                .collect(),
        )
    } else {
        None
    }
}

fn search(src: &[Element], dst: &[Element], used: &mut [bool], assign: &mut Vec<usize>) -> bool {
    let i = assign.len();
    if i == src.len() {
        return true;
    }
    for j in 0..dst.len() {
        if used[j] {
            continue;
        }
        let ok = assign
            .iter()
            .enumerate()
            .all(|(k, &jk)| (src[k] == src[i]) == (dst[jk] == dst[j]));
        if !ok {
            continue;
        }
        used[j] = true;
        assign.push(j);
        if search(src, dst, used, assign) {
            return true;
        }
        assign.pop();
        used[j] = false;
    }
    false
}

pub fn brute_force_embeds(a: &Snapshot, b: &Snapshot) -> bool {
    brute_force_embedding(a, b).is_some()
}
