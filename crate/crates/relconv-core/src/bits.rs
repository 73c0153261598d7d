//! Word-sized bitmask helpers.
//!
//! Carriers are capped at 64 elements, so a subset of a carrier is a `u64`
//! and the exhaustive scans in the groupoid layer reduce to word operations.

/// Iterates the set bits of `mask` in increasing order.
pub(crate) fn iter(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            return None;
        }
        let i = mask.trailing_zeros() as usize;
        mask &= mask - 1;
        Some(i)
    })
}

/// Pushes `mask` through an index map: bit `i` of the input sets bit
/// `map[i]` of the output.
pub(crate) fn map_through(mask: u64, map: &[usize]) -> u64 {
    iter(mask).fold(0, |acc, i| acc | 1 << map[i])
}
