//! Sparse ℚ-linear combinations over an ordered basis.
//!
//! Every vector-space object in the crate (divisors, tensors, Bloch-group
//! elements, formal sums) is a `BTreeMap` from basis keys to non-zero rational
//! coefficients. These helpers keep the zero-free invariant in one place.

use crate::Q;
use num_traits::Zero;
use std::collections::BTreeMap;

/// Add `c` to the coefficient of `key`, removing the entry if it cancels.
pub fn add_term<K: Ord>(map: &mut BTreeMap<K, Q>, key: K, c: Q) {
    if c.is_zero() {
        return;
    }
    match map.entry(key) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let sum = e.get().clone() + c;
            if sum.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = sum;
            }
        }
    }
}

/// `dst += scale · src`.
pub fn add_scaled<K: Ord + Clone>(dst: &mut BTreeMap<K, Q>, src: &BTreeMap<K, Q>, scale: &Q) {
    if scale.is_zero() {
        return;
    }
    for (k, v) in src {
        add_term(dst, k.clone(), v * scale);
    }
}

/// Multiply every coefficient by a non-zero scalar in place.
pub fn scale_in_place<K: Ord>(map: &mut BTreeMap<K, Q>, scale: &Q) {
    if scale.is_zero() {
        map.clear();
        return;
    }
    for v in map.values_mut() {
        *v *= scale;
    }
}
