//! Built-in structures used throughout the tests and the CLI.
//!
//! Elements of the symmetric inverse monoid `Iₙ` are listed by the bit-mask
//! of their domain (point `i` is bit `i-1`) and then lexicographically by the
//! tuple of images. For `I₂` this gives
//! `0, e1 (1↦1), a (1↦2), b (2↦1), e2 (2↦2), id, swap`.

use thiserror::Error;

use crate::bimodule::{BiactionTables, BimoduleError, EquivalenceBimodule};
use crate::pseudogroup::{Pseudogroup, PseudogroupError};
use crate::semigroup::{CayleyTable, InverseSemigroup, SemigroupError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("parameter {value} is outside the supported range {min}..={max}")]
    OutOfRange { value: usize, min: usize, max: usize },
    #[error("unknown catalog entry `{0}`")]
    Unknown(String),
    #[error(transparent)]
    Pseudogroup(#[from] PseudogroupError),
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
    #[error(transparent)]
    Bimodule(#[from] BimoduleError),
}

/// A partial injection from `{1..domain}` into `{1..codomain}`, stored
/// zero-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialInjection {
    map: Vec<Option<usize>>,
    codomain: usize,
}

impl PartialInjection {
    pub fn new(map: Vec<Option<usize>>, codomain: usize) -> Option<Self> {
        let mut seen = vec![false; codomain];
        for &y in map.iter().flatten() {
            if y >= codomain || std::mem::replace(&mut seen[y], true) {
                return None;
            }
        }
        Some(PartialInjection { map, codomain })
    }

    /// All partial injections `{1..n} → {1..n}` in canonical order.
    pub fn all(n: usize) -> Vec<Self> {
        Self::all_between(n, n)
    }

    /// All partial injections `{1..domain} → {1..codomain}` in canonical order.
    pub fn all_between(domain: usize, codomain: usize) -> Vec<Self> {
        let mut out = Vec::new();
        for mask in 0u32..(1 << domain) {
            let points: Vec<usize> = (0..domain).filter(|i| mask >> i & 1 == 1).collect();
            let mut images = Vec::new();
            injective_tuples(points.len(), codomain, &mut Vec::new(), &mut images);
            for tuple in images {
                let mut map = vec![None; domain];
                for (&p, &y) in points.iter().zip(&tuple) {
                    map[p] = Some(y);
                }
                out.push(PartialInjection { map, codomain });
            }
        }
        out
    }

    pub fn domain_size(&self) -> usize {
        self.map.len()
    }

    pub fn codomain_size(&self) -> usize {
        self.codomain
    }

    pub fn apply(&self, i: usize) -> Option<usize> {
        self.map.get(i).copied().flatten()
    }

    pub fn rank(&self) -> usize {
        self.map.iter().flatten().count()
    }

    /// `self ∘ g`: apply `g` first.
    pub fn compose(&self, g: &PartialInjection) -> PartialInjection {
        assert_eq!(g.codomain, self.map.len(), "composable maps");
        PartialInjection {
            map: g.map.iter().map(|&y| y.and_then(|y| self.map[y])).collect(),
            codomain: self.codomain,
        }
    }

    pub fn inverse(&self) -> PartialInjection {
        let mut map = vec![None; self.codomain];
        for (x, &y) in self.map.iter().enumerate() {
            if let Some(y) = y {
                map[y] = Some(x);
            }
        }
        PartialInjection { map, codomain: self.map.len() }
    }

    /// Label such as `1>2,2>1`; the empty map is `0`.
    pub fn label(&self) -> String {
        let parts: Vec<String> = self
            .map
            .iter()
            .enumerate()
            .filter_map(|(x, y)| y.map(|y| format!("{}>{}", x + 1, y + 1)))
            .collect();
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(",")
        }
    }
}

fn injective_tuples(len: usize, codomain: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if prefix.len() == len {
        out.push(prefix.clone());
        return;
    }
    for y in 0..codomain {
        if !prefix.contains(&y) {
            prefix.push(y);
            injective_tuples(len, codomain, prefix, out);
            prefix.pop();
        }
    }
}

/// Position of `f` in a canonical list.
pub(crate) fn index_of(list: &[PartialInjection], f: &PartialInjection) -> usize {
    list.iter().position(|g| g == f).expect("closed under the operation")
}

/// Cayley table of `Iₙ` in canonical order.
pub fn symmetric_inverse_table(n: usize) -> Result<CayleyTable, CatalogError> {
    if !(1..=4).contains(&n) {
        return Err(CatalogError::OutOfRange { value: n, min: 1, max: 4 });
    }
    let maps = PartialInjection::all(n);
    let table = CayleyTable::from_fn(maps.len(), |a, b| index_of(&maps, &maps[a].compose(&maps[b])));
    let names = if n == 2 {
        ["0", "e1", "a", "b", "e2", "id", "swap"].iter().map(|s| s.to_string()).collect()
    } else {
        maps.iter().map(PartialInjection::label).collect()
    };
    Ok(table.with_names(names))
}

/// The symmetric inverse monoid `Iₙ` for `1 ≤ n ≤ 4`.
pub fn symmetric_inverse_monoid(n: usize) -> Result<Pseudogroup, CatalogError> {
    Ok(Pseudogroup::from_table(&symmetric_inverse_table(n)?)?)
}

/// Tables of the `(I_m, I_n)`-bimodule of partial injections
/// `{1..n} → {1..m}`: `s·x = s∘x`, `x·t = x∘t`, `⟨x,y⟩ = x∘y⁻¹` and
/// `[x,y] = x⁻¹∘y`. Elements are named by their labels.
pub fn atlas_tables(m: usize, n: usize) -> Result<BiactionTables, CatalogError> {
    for v in [m, n] {
        if !(1..=4).contains(&v) {
            return Err(CatalogError::OutOfRange { value: v, min: 1, max: 4 });
        }
    }
    let xs = PartialInjection::all_between(n, m);
    let sm = PartialInjection::all(m);
    let tn = PartialInjection::all(n);
    Ok(BiactionTables {
        x_size: xs.len(),
        lact: sm.iter().map(|s| xs.iter().map(|x| index_of(&xs, &s.compose(x))).collect()).collect(),
        ract: xs.iter().map(|x| tn.iter().map(|t| index_of(&xs, &x.compose(t))).collect()).collect(),
        inner_s: xs
            .iter()
            .map(|x| xs.iter().map(|y| index_of(&sm, &x.compose(&y.inverse()))).collect())
            .collect(),
        inner_t: xs
            .iter()
            .map(|x| xs.iter().map(|y| index_of(&tn, &x.inverse().compose(y))).collect())
            .collect(),
        names: Some(xs.iter().map(PartialInjection::label).collect()),
    })
}

/// The atlas bimodule between `I_m` and `I_n`, verified.
pub fn atlas_bimodule(m: usize, n: usize) -> Result<EquivalenceBimodule, CatalogError> {
    let tables = atlas_tables(m, n)?;
    let s = symmetric_inverse_monoid(m)?;
    let t = symmetric_inverse_monoid(n)?;
    Ok(EquivalenceBimodule::verify(&s, &t, &tables)?)
}

/// The chain `0 < 1 < .. < k-1` under minimum. For `k = 3` the names are
/// `0, a, 1`.
pub fn chain(k: usize) -> Result<Pseudogroup, CatalogError> {
    if !(1..=64).contains(&k) {
        return Err(CatalogError::OutOfRange { value: k, min: 1, max: 64 });
    }
    let names = match k {
        3 => vec!["0".to_string(), "a".to_string(), "1".to_string()],
        _ => (0..k).map(|i| i.to_string()).collect(),
    };
    Ok(Pseudogroup::from_table(&CayleyTable::from_fn(k, |a, b| a.min(b)).with_names(names))?)
}

/// The Boolean lattice of subsets of `k` atoms under intersection.
pub fn boolean(k: usize) -> Result<Pseudogroup, CatalogError> {
    if k > 6 {
        return Err(CatalogError::OutOfRange { value: k, min: 0, max: 6 });
    }
    Ok(Pseudogroup::from_table(&CayleyTable::from_fn(1 << k, |a, b| a & b))?)
}

/// The cyclic group of order `k` with a zero adjoined; element `0` is the zero
/// and element `i ≥ 1` is `g^(i-1)`.
pub fn cyclic_with_zero(k: usize) -> Result<Pseudogroup, CatalogError> {
    if !(1..=32).contains(&k) {
        return Err(CatalogError::OutOfRange { value: k, min: 1, max: 32 });
    }
    let table = CayleyTable::from_fn(k + 1, |a, b| {
        if a == 0 || b == 0 {
            0
        } else {
            (a - 1 + b - 1) % k + 1
        }
    });
    let names = std::iter::once("0".to_string()).chain((0..k).map(|i| format!("g{i}"))).collect();
    Ok(Pseudogroup::from_table(&table.with_names(names))?)
}

/// The five-element Brandt semigroup `{0, e, f, a, a'}` of 2×2 matrix units.
/// It is inverse but not a pseudogroup.
pub fn brandt_b2() -> Result<InverseSemigroup, CatalogError> {
    // Matrix unit (i, j) for i, j ∈ {0, 1}; index 0 is the zero.
    let units = [(0, 0), (1, 1), (0, 1), (1, 0)];
    let table = CayleyTable::from_fn(5, |a, b| {
        if a == 0 || b == 0 {
            return 0;
        }
        let (i, j) = units[a - 1];
        let (k, l) = units[b - 1];
        if j == k {
            1 + units.iter().position(|&u| u == (i, l)).unwrap()
        } else {
            0
        }
    });
    let names = ["0", "e", "f", "a", "a'"].iter().map(|s| s.to_string()).collect();
    Ok(InverseSemigroup::validate(&table.with_names(names))?)
}

/// Names accepted by [`by_name`].
pub const ENTRY_NAMES: &[&str] = &[
    "I1", "I2", "I3", "I4", "chain2", "chain3", "chain4", "boolean1", "boolean2", "boolean3", "z2-zero",
    "z3-zero", "brandt2",
];

/// Looks up a catalog entry by name and returns its Cayley table.
pub fn by_name(name: &str) -> Result<CayleyTable, CatalogError> {
    let unknown = || CatalogError::Unknown(name.to_string());
    let parse = |prefix: &str| -> Option<usize> { name.strip_prefix(prefix)?.parse().ok() };
    if name == "brandt2" {
        return Ok(brandt_b2()?.to_table());
    }
    if let Some(n) = parse("I") {
        return symmetric_inverse_table(n);
    }
    let s = if let Some(k) = parse("chain") {
        chain(k)?
    } else if let Some(k) = parse("boolean") {
        boolean(k)?
    } else if let Some(k) = name.strip_prefix('z').and_then(|r| r.strip_suffix("-zero")).and_then(|k| k.parse().ok()) {
        cyclic_with_zero(k)?
    } else {
        return Err(unknown());
    };
    Ok(s.to_table())
}

/// The pseudogroups of the catalog with at most `max_size` elements.
pub fn pseudogroups(max_size: usize) -> Vec<(String, Pseudogroup)> {
    ENTRY_NAMES
        .iter()
        .filter_map(|&name| {
            let s = Pseudogroup::from_table(&by_name(name).ok()?).ok()?;
            (s.len() <= max_size).then(|| (name.to_string(), s))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Σₖ C(n,k)²·k!, computed independently of the enumeration.
    fn rook_count(n: u64) -> u64 {
        let binom = |n: u64, k: u64| (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1));
        let fact = |k: u64| (1..=k).product::<u64>();
        (0..=n).map(|k| binom(n, k).pow(2) * fact(k)).sum()
    }

    #[test]
    fn symmetric_inverse_monoid_sizes() {
        for n in 1..=4 {
            let s = symmetric_inverse_monoid(n).unwrap();
            assert_eq!(s.len() as u64, rook_count(n as u64));
            assert_eq!(s.idempotents().len(), 1 << n);
        }
        assert_eq!(rook_count(4), 209);
    }

    #[test]
    fn atlas_bimodules_verify() {
        let rect = |n: u64, m: u64| {
            let binom = |n: u64, k: u64| (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1));
            (0..=n.min(m)).map(|k| binom(n, k) * binom(m, k) * (1..=k).product::<u64>()).sum::<u64>()
        };
        for (m, n) in [(1, 1), (1, 2), (2, 1), (2, 2), (1, 3), (2, 3), (3, 2)] {
            let b = atlas_bimodule(m, n).unwrap();
            assert_eq!(b.len() as u64, rect(n as u64, m as u64), "({m}, {n})");
        }
        let small = atlas_tables(1, 2).unwrap();
        assert_eq!(small.names.unwrap(), ["0", "1>1", "2>1"]);
        assert!(matches!(atlas_tables(5, 1), Err(CatalogError::OutOfRange { .. })));
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(symmetric_inverse_monoid(0), Err(CatalogError::OutOfRange { .. })));
        assert!(matches!(symmetric_inverse_monoid(5), Err(CatalogError::OutOfRange { .. })));
    }

    #[test]
    fn i2_canonical_order() {
        let maps = PartialInjection::all(2);
        let labels: Vec<String> = maps.iter().map(PartialInjection::label).collect();
        assert_eq!(labels, ["0", "1>1", "1>2", "2>1", "2>2", "1>1,2>2", "1>2,2>1"]);
    }

    #[test]
    fn small_pseudogroups() {
        chain(3).unwrap();
        boolean(2).unwrap();
        cyclic_with_zero(2).unwrap();
        assert!(matches!(
            Pseudogroup::new(brandt_b2().unwrap()),
            Err(PseudogroupError::MissingJoin(..))
        ));
    }

    #[test]
    fn lookup_by_name() {
        for name in ENTRY_NAMES {
            by_name(name).unwrap();
        }
        assert_eq!(by_name("I5"), Err(CatalogError::OutOfRange { value: 5, min: 1, max: 4 }));
        assert!(matches!(by_name("nope"), Err(CatalogError::Unknown(_))));
    }
}
