//! Finite inverse semigroups given by Cayley tables.
//!
//! Elements are dense indices `0..n`. Validation checks associativity with the
//! plain cubic loop, computes the inverse table, and caches the natural
//! partial order as bit-matrices. Both textbook characterizations of the order
//! (`a = b·d(a)` and `a = e·b` for an idempotent `e`) and of left/right
//! compatibility are evaluated and required to agree, so a malformed table is
//! caught at construction instead of surfacing as a wrong answer later.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of an element of a finite semigroup.
pub type Element = usize;

/// A raw multiplication table, as read from a Cayley-table file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CayleyTable {
    pub n: usize,
    pub mult: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity: Option<usize>,
}

impl CayleyTable {
    /// Table of `n` elements with `mult[a][b] = f(a, b)`.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> usize) -> Self {
        CayleyTable {
            n,
            mult: (0..n).map(|a| (0..n).map(|b| f(a, b)).collect()).collect(),
            names: None,
            zero: None,
            identity: None,
        }
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        self.names = Some(names);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemigroupError {
    #[error("table is empty")]
    Empty,
    #[error("field `mult`: expected {n} rows, found {rows}")]
    RowCount { n: usize, rows: usize },
    #[error("field `mult`: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("field `mult`: entry [{a}][{b}] = {value} is out of range (n = {n})")]
    OutOfRange { a: usize, b: usize, value: usize, n: usize },
    #[error("field `names`: {got} names for {n} elements")]
    NamesLength { got: usize, n: usize },
    #[error("field `{field}`: element {value} is out of range (n = {n})")]
    DeclaredOutOfRange { field: &'static str, value: usize, n: usize },
    #[error("not associative: ({a}*{b})*{c} = {left} but {a}*({b}*{c}) = {right}")]
    NotAssociative { a: Element, b: Element, c: Element, left: Element, right: Element },
    #[error("not inverse: element {a} has {count} inverses")]
    NotInverse { a: Element, count: usize },
    #[error("declared zero {0} is not a zero")]
    BadZero(Element),
    #[error("declared identity {0} is not an identity")]
    BadIdentity(Element),
    #[error("the two characterizations of the natural order disagree on ({0}, {1})")]
    OrderMismatch(Element, Element),
    #[error("the two characterizations of compatibility disagree on ({0}, {1})")]
    CompatibilityMismatch(Element, Element),
}

/// Result of [`InverseSemigroup::compatible`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Compatibility {
    Left,
    Right,
    Both,
    Neither,
}

impl Compatibility {
    fn from_flags(left: bool, right: bool) -> Self {
        match (left, right) {
            (true, true) => Compatibility::Both,
            (true, false) => Compatibility::Left,
            (false, true) => Compatibility::Right,
            (false, false) => Compatibility::Neither,
        }
    }

    pub fn is_left(self) -> bool {
        matches!(self, Compatibility::Left | Compatibility::Both)
    }

    pub fn is_right(self) -> bool {
        matches!(self, Compatibility::Right | Compatibility::Both)
    }

    pub fn is_both(self) -> bool {
        self == Compatibility::Both
    }
}

/// A validated finite inverse semigroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InverseSemigroup {
    n: usize,
    mult: Vec<Element>,
    inv: Vec<Element>,
    zero: Option<Element>,
    identity: Option<Element>,
    names: Option<Vec<String>>,
    idempotents: FixedBitSet,
    /// `up[a]` = elements `b` with `a <= b`.
    up: Vec<FixedBitSet>,
    /// `down[b]` = elements `a` with `a <= b`.
    down: Vec<FixedBitSet>,
    compat: Vec<Compatibility>,
}

impl InverseSemigroup {
    /// Validates a raw table. Zero and identity are detected when not declared.
    pub fn validate(table: &CayleyTable) -> Result<Self, SemigroupError> {
        let n = table.n;
        if n == 0 {
            return Err(SemigroupError::Empty);
        }
        if table.mult.len() != n {
            return Err(SemigroupError::RowCount { n, rows: table.mult.len() });
        }
        let mut mult = Vec::with_capacity(n * n);
        for (a, row) in table.mult.iter().enumerate() {
            if row.len() != n {
                return Err(SemigroupError::NotSquare { row: a, len: row.len(), n });
            }
            for (b, &value) in row.iter().enumerate() {
                if value >= n {
                    return Err(SemigroupError::OutOfRange { a, b, value, n });
                }
                mult.push(value);
            }
        }
        if let Some(names) = &table.names {
            if names.len() != n {
                return Err(SemigroupError::NamesLength { got: names.len(), n });
            }
        }
        for (field, value) in [("zero", table.zero), ("identity", table.identity)] {
            if let Some(v) = value {
                if v >= n {
                    return Err(SemigroupError::DeclaredOutOfRange { field, value: v, n });
                }
            }
        }

        let m = |a: usize, b: usize| mult[a * n + b];
        for a in 0..n {
            for b in 0..n {
                let ab = m(a, b);
                for c in 0..n {
                    let left = m(ab, c);
                    let right = m(a, m(b, c));
                    if left != right {
                        return Err(SemigroupError::NotAssociative { a, b, c, left, right });
                    }
                }
            }
        }

        let mut inv = vec![0; n];
        for a in 0..n {
            let candidates: Vec<usize> = (0..n)
                .filter(|&b| m(m(a, b), a) == a && m(m(b, a), b) == b)
                .collect();
            if candidates.len() != 1 {
                return Err(SemigroupError::NotInverse { a, count: candidates.len() });
            }
            inv[a] = candidates[0];
        }

        let is_zero = |z: usize| (0..n).all(|a| m(z, a) == z && m(a, z) == z);
        let is_identity = |u: usize| (0..n).all(|a| m(u, a) == a && m(a, u) == a);
        let zero = match table.zero {
            Some(z) if !is_zero(z) => return Err(SemigroupError::BadZero(z)),
            Some(z) => Some(z),
            None => (0..n).find(|&z| is_zero(z)),
        };
        let identity = match table.identity {
            Some(u) if !is_identity(u) => return Err(SemigroupError::BadIdentity(u)),
            Some(u) => Some(u),
            None => (0..n).find(|&u| is_identity(u)),
        };

        let mut idempotents = FixedBitSet::with_capacity(n);
        for a in 0..n {
            if m(a, a) == a {
                idempotents.insert(a);
            }
        }

        let mut up = vec![FixedBitSet::with_capacity(n); n];
        let mut down = vec![FixedBitSet::with_capacity(n); n];
        for a in 0..n {
            let da = m(inv[a], a);
            for b in 0..n {
                let by_domain = m(b, da) == a;
                let by_idempotent = idempotents.ones().any(|e| m(e, b) == a);
                if by_domain != by_idempotent {
                    return Err(SemigroupError::OrderMismatch(a, b));
                }
                if by_domain {
                    up[a].insert(b);
                    down[b].insert(a);
                }
            }
        }

        let mut compat = Vec::with_capacity(n * n);
        for a in 0..n {
            let (da, ra) = (m(inv[a], a), m(a, inv[a]));
            for b in 0..n {
                let (db, rb) = (m(inv[b], b), m(b, inv[b]));
                let left = idempotents.contains(m(inv[a], b));
                let left_eq = m(ra, b) == m(rb, a);
                let right = idempotents.contains(m(a, inv[b]));
                let right_eq = m(b, da) == m(a, db);
                if left != left_eq || right != right_eq {
                    return Err(SemigroupError::CompatibilityMismatch(a, b));
                }
                compat.push(Compatibility::from_flags(left, right));
            }
        }

        Ok(InverseSemigroup {
            n,
            mult,
            inv,
            zero,
            identity,
            names: table.names.clone(),
            idempotents,
            up,
            down,
            compat,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn elements(&self) -> std::ops::Range<Element> {
        0..self.n
    }

    #[inline]
    pub fn mul(&self, a: Element, b: Element) -> Element {
        self.mult[a * self.n + b]
    }

    /// Product of a sequence, left to right. Panics on an empty slice.
    pub fn mul_all(&self, elems: &[Element]) -> Element {
        elems[1..].iter().fold(elems[0], |acc, &x| self.mul(acc, x))
    }

    #[inline]
    pub fn inv(&self, a: Element) -> Element {
        self.inv[a]
    }

    /// `d(a) = a⁻¹a`.
    #[inline]
    pub fn d(&self, a: Element) -> Element {
        self.mul(self.inv[a], a)
    }

    /// `r(a) = aa⁻¹`.
    #[inline]
    pub fn r(&self, a: Element) -> Element {
        self.mul(a, self.inv[a])
    }

    pub fn zero(&self) -> Option<Element> {
        self.zero
    }

    pub fn identity(&self) -> Option<Element> {
        self.identity
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Label of an element: its declared name or its index.
    pub fn name(&self, a: Element) -> String {
        match &self.names {
            Some(names) => names[a].clone(),
            None => a.to_string(),
        }
    }

    /// Looks an element up by its declared name.
    pub fn element_named(&self, name: &str) -> Option<Element> {
        self.names.as_ref()?.iter().position(|s| s == name)
    }

    #[inline]
    pub fn is_idempotent(&self, a: Element) -> bool {
        self.idempotents.contains(a)
    }

    pub fn idempotent_set(&self) -> &FixedBitSet {
        &self.idempotents
    }

    pub fn idempotents(&self) -> Vec<Element> {
        self.idempotents.ones().collect()
    }

    /// The natural partial order, `a <= b` iff `a = b·d(a)`.
    #[inline]
    pub fn natural_leq(&self, a: Element, b: Element) -> bool {
        self.up[a].contains(b)
    }

    /// The second characterization: `a = e·b` for some idempotent `e`.
    pub fn natural_leq_via_idempotent(&self, a: Element, b: Element) -> bool {
        self.idempotents.ones().any(|e| self.mul(e, b) == a)
    }

    /// `a↓` as a bit-set.
    pub fn down_set(&self, a: Element) -> &FixedBitSet {
        &self.down[a]
    }

    /// `a↑` as a bit-set.
    pub fn up_set(&self, a: Element) -> &FixedBitSet {
        &self.up[a]
    }

    /// Left compatibility is `a⁻¹b ∈ E(S)`, right compatibility `ab⁻¹ ∈ E(S)`.
    #[inline]
    pub fn compatible(&self, a: Element, b: Element) -> Compatibility {
        self.compat[a * self.n + b]
    }

    /// Splits `ab` into a reduced product `a'b'` with `d(a') = r(b')`.
    pub fn reduced_product(&self, a: Element, b: Element) -> (Element, Element) {
        (self.mul(a, self.r(b)), self.mul(self.d(a), b))
    }

    /// The 𝒟-classes, each sorted, ordered by their least element.
    ///
    /// Idempotents `e`, `f` are related when some `c` has `d(c) = e` and
    /// `r(c) = f`; an arbitrary element lies in the class of its domain.
    pub fn d_classes(&self) -> Vec<Vec<Element>> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for c in 0..self.n {
            let (a, b) = (find(&mut parent, self.d(c)), find(&mut parent, self.r(c)));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut classes: Vec<Vec<Element>> = Vec::new();
        let mut slot = vec![usize::MAX; self.n];
        for a in 0..self.n {
            let root = find(&mut parent, self.d(a));
            if slot[root] == usize::MAX {
                slot[root] = classes.len();
                classes.push(Vec::new());
            }
            classes[slot[root]].push(a);
        }
        classes
    }

    /// The table this semigroup was validated from, with zero and identity
    /// filled in.
    pub fn to_table(&self) -> CayleyTable {
        CayleyTable {
            n: self.n,
            mult: (0..self.n)
                .map(|a| self.mult[a * self.n..(a + 1) * self.n].to_vec())
                .collect(),
            names: self.names.clone(),
            zero: self.zero,
            identity: self.identity,
        }
    }

    /// The table of the subsemigroup on `elems`, in the given order, or
    /// `None` if `elems` is not closed under multiplication.
    pub fn restrict(&self, elems: &[Element]) -> Option<CayleyTable> {
        let mut position = vec![usize::MAX; self.n];
        for (i, &a) in elems.iter().enumerate() {
            position[a] = i;
        }
        let mut mult = Vec::with_capacity(elems.len());
        for &a in elems {
            let mut row = Vec::with_capacity(elems.len());
            for &b in elems {
                let p = position[self.mul(a, b)];
                if p == usize::MAX {
                    return None;
                }
                row.push(p);
            }
            mult.push(row);
        }
        Some(CayleyTable {
            n: elems.len(),
            mult,
            names: self.names.as_ref().map(|names| elems.iter().map(|&a| names[a].clone()).collect()),
            zero: None,
            identity: None,
        })
    }

    /// Raw row-major multiplication table.
    pub fn mult_table(&self) -> &[Element] {
        &self.mult
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{self, PartialInjection};

    fn i2() -> (InverseSemigroup, impl Fn(&str) -> Element) {
        let s = catalog::symmetric_inverse_monoid(2).unwrap().base().clone();
        let names = s.clone();
        (s, move |label: &str| names.element_named(label).unwrap())
    }

    /// Composes partial injections on {1,2} directly, independent of the table.
    fn brute_i2() -> Vec<PartialInjection> {
        PartialInjection::all(2)
    }

    #[test]
    fn trivial_group() {
        let s = InverseSemigroup::validate(&CayleyTable::from_fn(1, |_, _| 0)).unwrap();
        assert_eq!(s.inv(0), 0);
        assert_eq!(s.zero(), Some(0));
        assert_eq!(s.identity(), Some(0));
        assert_eq!(s.d_classes().len(), 1);
    }

    #[test]
    fn i2_table_matches_composition() {
        let (s, _) = i2();
        let maps = brute_i2();
        assert_eq!(s.len(), 7);
        for (i, f) in maps.iter().enumerate() {
            for (j, g) in maps.iter().enumerate() {
                let fg = f.compose(g);
                assert_eq!(maps[s.mul(i, j)], fg);
            }
            assert_eq!(maps[s.inv(i)], f.inverse());
        }
    }

    #[test]
    fn i2_inverse_of_a_is_b() {
        let (s, e) = i2();
        assert_eq!(s.inv(e("a")), e("b"));
    }

    #[test]
    fn non_associative_table_rejected() {
        // 0*0 = 1, everything else 0: (0*0)*0 = 1*0 = 0, 0*(0*0) = 0*1 = 0;
        // (1*0)*0 = 0*0 = 1 but 1*(0*0) = 1*1 = 0.
        let t = CayleyTable { n: 2, mult: vec![vec![1, 0], vec![0, 0]], names: None, zero: None, identity: None };
        assert!(matches!(
            InverseSemigroup::validate(&t),
            Err(SemigroupError::NotAssociative { .. })
        ));
    }

    #[test]
    fn left_zero_band_is_not_inverse() {
        let t = CayleyTable::from_fn(2, |a, _| a);
        assert!(matches!(
            InverseSemigroup::validate(&t),
            Err(SemigroupError::NotInverse { .. })
        ));
    }

    #[test]
    fn shape_errors() {
        let t = CayleyTable { n: 2, mult: vec![vec![0, 0], vec![0]], names: None, zero: None, identity: None };
        assert!(matches!(InverseSemigroup::validate(&t), Err(SemigroupError::NotSquare { row: 1, .. })));
        let t = CayleyTable { n: 1, mult: vec![vec![3]], names: None, zero: None, identity: None };
        assert!(matches!(InverseSemigroup::validate(&t), Err(SemigroupError::OutOfRange { .. })));
        let mut t = CayleyTable::from_fn(2, |a, b| a.min(b));
        t.zero = Some(1);
        assert_eq!(InverseSemigroup::validate(&t), Err(SemigroupError::BadZero(1)));
        t.zero = None;
        t.identity = Some(0);
        assert_eq!(InverseSemigroup::validate(&t), Err(SemigroupError::BadIdentity(0)));
    }

    #[test]
    fn domain_and_range() {
        let (s, e) = i2();
        assert_eq!(s.d(e("a")), e("e1"));
        assert_eq!(s.r(e("a")), e("e2"));
        assert_eq!(s.d(e("e1")), e("e1"));
        assert_eq!(s.d(e("0")), e("0"));
    }

    #[test]
    fn natural_order_examples() {
        let (s, e) = i2();
        assert!(s.natural_leq(e("e1"), e("id")));
        assert!(s.natural_leq(e("a"), e("a")));
        assert!(!s.natural_leq(e("a"), e("id")));
        for a in s.elements() {
            for b in s.elements() {
                assert_eq!(s.natural_leq(a, b), s.natural_leq_via_idempotent(a, b));
            }
        }
    }

    #[test]
    fn compatibility_examples() {
        let (s, e) = i2();
        assert_eq!(s.compatible(e("e1"), e("e2")), Compatibility::Both);
        assert_eq!(s.compatible(e("a"), e("a")), Compatibility::Both);
        // e1·a⁻¹ = b is not idempotent, while e1⁻¹·a = 0 is.
        let c = s.compatible(e("e1"), e("a"));
        assert!(!c.is_right());
        assert_eq!(c, Compatibility::Left);
    }

    #[test]
    fn d_class_counts() {
        for (n, expected) in [(1, 2), (2, 3), (3, 4)] {
            let s = catalog::symmetric_inverse_monoid(n).unwrap();
            assert_eq!(s.d_classes().len(), expected);
        }
    }
}
