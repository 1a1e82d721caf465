//! Small helpers on top of [`FixedBitSet`].

use fixedbitset::FixedBitSet;

/// Builds a bit-set of capacity `len` holding the given indices.
pub fn bitset(len: usize, items: impl IntoIterator<Item = usize>) -> FixedBitSet {
    let mut set = FixedBitSet::with_capacity(len);
    for i in items {
        set.insert(i);
    }
    set
}

/// The full set `{0, .., len-1}`.
pub fn full(len: usize) -> FixedBitSet {
    let mut set = FixedBitSet::with_capacity(len);
    set.insert_range(..);
    set
}

/// Bit-set from the low `len` bits of `mask`.
pub fn from_mask(len: usize, mask: u64) -> FixedBitSet {
    bitset(len, (0..len).filter(|&i| mask >> i & 1 == 1))
}

/// Renders a set as a string of `0`/`1` characters, element 0 first.
pub fn to_bitstring(set: &FixedBitSet) -> String {
    (0..set.len())
        .map(|i| if set.contains(i) { '1' } else { '0' })
        .collect()
}

/// Parses the output of [`to_bitstring`].
pub fn from_bitstring(s: &str) -> Option<FixedBitSet> {
    let mut set = FixedBitSet::with_capacity(s.len());
    for (i, c) in s.chars().enumerate() {
        match c {
            '1' => set.insert(i),
            '0' => {}
            _ => return None,
        }
    }
    Some(set)
}

/// Deterministic order on families of sets: by cardinality, then by the
/// sorted list of members.
pub fn canonical_sort(family: &mut [FixedBitSet]) {
    family.sort_by(|a, b| {
        a.count_ones(..)
            .cmp(&b.count_ones(..))
            .then_with(|| a.ones().cmp(b.ones()))
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitstring_round_trip() {
        let s = bitset(5, [0, 3]);
        assert_eq!(to_bitstring(&s), "10010");
        assert_eq!(from_bitstring("10010"), Some(s));
        assert_eq!(from_bitstring("10x"), None);
    }

    #[test]
    fn canonical_order_is_by_size_then_members() {
        let mut fam = vec![bitset(3, [0, 1]), bitset(3, [2]), bitset(3, []), bitset(3, [1])];
        canonical_sort(&mut fam);
        let lists: Vec<Vec<usize>> = fam.iter().map(|s| s.ones().collect()).collect();
        assert_eq!(lists, vec![vec![], vec![1], vec![2], vec![0, 1]]);
    }
}
