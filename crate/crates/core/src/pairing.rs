//! Cantor pairing, used for every coded tuple of elements.
//!
//! `pair(x, y) = (x + y)(x + y + 1)/2 + y`; triples are `pair(x, pair(y, z))`
//! and quadruples `pair(x, triple(y, z, w))`.

/// Cantor pairing of `x` and `y`.
///
/// Panics if the code does not fit in a `u64`.
pub fn pair(x: u64, y: u64) -> u64 {
    let s = x as u128 + y as u128;
    let code = s * (s + 1) / 2 + y as u128;
    u64::try_from(code).expect("pair code overflows u64")
}

/// Like [`pair`], but `None` on overflow.
pub fn try_pair(x: u64, y: u64) -> Option<u64> {
    let s = x as u128 + y as u128;
    u64::try_from(s * (s + 1) / 2 + y as u128).ok()
}

/// Inverse of [`pair`].
pub fn unpair(z: u64) -> (u64, u64) {
    let z = z as u128;
    // w = floor((sqrt(8z + 1) - 1) / 2), corrected for float error.
    let mut w = ((((8 * z + 1) as f64).sqrt() - 1.0) / 2.0) as u128;
    while w * (w + 1) / 2 > z {
        w -= 1;
    }
    while (w + 1) * (w + 2) / 2 <= z {
        w += 1;
    }
    let t = w * (w + 1) / 2;
    let y = z - t;
    let x = w - y;
    (x as u64, y as u64)
}

pub fn triple(x: u64, y: u64, z: u64) -> u64 {
    pair(x, pair(y, z))
}

pub fn untriple(code: u64) -> (u64, u64, u64) {
    let (x, rest) = unpair(code);
    let (y, z) = unpair(rest);
    (x, y, z)
}

pub fn quad(x: u64, y: u64, u: u64, v: u64) -> u64 {
    pair(x, triple(y, u, v))
}

pub fn unquad(code: u64) -> (u64, u64, u64, u64) {
    let (x, rest) = unpair(code);
    let (y, u, v) = untriple(rest);
    (x, y, u, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_codes() {
        // Diagonal enumeration: (0,0) (1,0) (0,1) (2,0) (1,1) (0,2) ...
        let expected = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0)];
        for (code, &(x, y)) in expected.iter().enumerate() {
            assert_eq!(pair(x, y), code as u64);
            assert_eq!(unpair(code as u64), (x, y));
        }
        assert_eq!(pair(2, 1), 7);
        assert_eq!(triple(0, 0, 0), 0);
    }

    proptest! {
        #[test]
        fn pair_roundtrip(x in 0u64..1_000_000, y in 0u64..1_000_000) {
            prop_assert_eq!(unpair(pair(x, y)), (x, y));
        }

        #[test]
        fn quad_roundtrip(x in 0u64..60, y in 0u64..60, u in 0u64..60, v in 0u64..60) {
            prop_assert_eq!(unquad(quad(x, y, u, v)), (x, y, u, v));
        }
    }
}
