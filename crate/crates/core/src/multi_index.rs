//! Strictly increasing multi-indices over {1..n}, stored as bitmasks.
//!
//! Bit `k-1` set means index `k` is present. Canonical order is by length,
//! then lexicographic on the increasing index sequence.

use crate::error::{Error, Result};

pub const MAX_RANK: usize = 8;

pub fn check_rank(n: usize) -> Result<()> {
    if (2..=MAX_RANK).contains(&n) {
        Ok(())
    } else {
        Err(Error::BadRank(n))
    }
}

pub fn indices(mask: u16) -> Vec<usize> {
    (0..16).filter(|b| mask & (1 << b) != 0).map(|b| b + 1).collect()
}

pub fn mask_of(idx: &[usize]) -> u16 {
    idx.iter().fold(0u16, |m, &i| m | (1 << (i - 1)))
}

fn combinations(n: usize, len: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<u16>) {
    if cur.len() == len {
        out.push(mask_of(cur));
        return;
    }
    for i in start..=n {
        cur.push(i);
        combinations(n, len, i + 1, cur, out);
        cur.pop();
    }
}

fn by_parity(n: usize, parity: usize) -> Vec<u16> {
    let mut out = Vec::new();
    let mut len = parity;
    while len <= n {
        combinations(n, len, 1, &mut Vec::new(), &mut out);
        len += 2;
    }
    out
}

/// Even masks in canonical order; position 0 is the empty index.
pub fn even_masks(n: usize) -> Vec<u16> {
    by_parity(n, 0)
}

/// Odd masks in canonical order: singletons first.
pub fn odd_masks(n: usize) -> Vec<u16> {
    by_parity(n, 1)
}

/// Lookup table mask -> position in the canonical list (usize::MAX if absent).
pub fn position_table(masks: &[u16], n: usize) -> Vec<usize> {
    let mut t = vec![usize::MAX; 1 << n];
    for (p, &m) in masks.iter().enumerate() {
        t[m as usize] = p;
    }
    t
}

/// Sorts an index list, returning its mask and the permutation sign.
/// `None` for repeated indices.
pub fn canonical(idx: &[usize]) -> Option<(u16, f64)> {
    let mut v = idx.to_vec();
    let mut sign = 1.0;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            } else if v[j] == v[j + 1] {
                return None;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((mask_of(&v), sign))
}

/// Sign picked up by e_k moving past the indices of `mask` below k.
#[inline]
pub fn pass_sign(mask: u16, k: usize) -> f64 {
    if (mask & ((1u16 << (k - 1)) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn key(mask: u16) -> String {
    indices(mask).iter().map(|i| char::from(b'0' + *i as u8)).collect()
}

pub fn parse_key(s: &str, n: usize) -> Result<(u16, f64)> {
    let mut idx = Vec::new();
    for c in s.chars() {
        let d = c.to_digit(10).ok_or_else(|| Error::BadKey(s.into()))? as usize;
        if d == 0 || d > n {
            return Err(Error::BadKey(s.into()));
        }
        idx.push(d);
    }
    canonical(&idx).ok_or_else(|| Error::BadKey(s.into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_orders() {
        let e: Vec<String> = even_masks(4).into_iter().map(key).collect();
        assert_eq!(e, ["", "12", "13", "14", "23", "24", "34", "1234"]);
        let o: Vec<String> = odd_masks(3).into_iter().map(key).collect();
        assert_eq!(o, ["1", "2", "3", "123"]);
        assert_eq!(even_masks(8).len(), 128);
    }

    #[test]
    fn permutation_signs() {
        assert_eq!(canonical(&[2, 1]), Some((0b11, -1.0)));
        assert_eq!(canonical(&[3, 1, 2]), Some((0b111, 1.0)));
        assert_eq!(canonical(&[1, 1]), None);
        assert_eq!(parse_key("21", 3).unwrap(), (0b11, -1.0));
        assert!(parse_key("14", 3).is_err());
    }

    #[test]
    fn pass_sign_counts_lower_indices() {
        assert_eq!(pass_sign(mask_of(&[1, 2]), 3), 1.0);
        assert_eq!(pass_sign(mask_of(&[1]), 2), -1.0);
        assert_eq!(pass_sign(mask_of(&[2, 3]), 1), 1.0);
    }
}
