//! Finite pseudogroups: inverse semigroups with joins of compatible sets.
//!
//! In a finite inverse semigroup it is enough to ask for a zero (the empty
//! join) and for joins of compatible pairs. A compatible set `{a₁, .., aₖ}`
//! then has the join `((a₁ ∨ a₂) ∨ ..) ∨ aₖ`: each partial join stays
//! compatible with the remaining elements, because `(a ∨ b)⁻¹c = a⁻¹c ∨ b⁻¹c`
//! is a join of idempotents. Distributivity over the binary joins extends to
//! every finite compatible set by the same induction, so validation only
//! inspects pairs.

use std::ops::Deref;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::lattice::OrderIdealClosure;
use crate::semigroup::{CayleyTable, Element, InverseSemigroup, SemigroupError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PseudogroupError {
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
    #[error("no zero element")]
    NoZero,
    #[error("compatible elements {0} and {1} have no join")]
    MissingJoin(Element, Element),
    #[error("elements {0} and {1} have no meet")]
    MissingMeet(Element, Element),
    #[error("multiplication by {s} on the {side} does not distribute over {a} ∨ {b}")]
    NotDistributive { s: Element, a: Element, b: Element, side: Side },
    #[error("idempotents do not form a distributive lattice at ({0}, {1}, {2})")]
    IdempotentsNotFrame(Element, Element, Element),
    #[error("the join of all idempotents is not an identity")]
    TopNotIdentity,
    #[error("elements {0} and {1} are not compatible")]
    NotCompatible(Element, Element),
    #[error("element {0} is not an idempotent")]
    NotIdempotent(Element),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// A validated finite pseudogroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pseudogroup {
    base: InverseSemigroup,
    /// Row-major; `None` for pairs that are not compatible.
    join: Vec<Option<Element>>,
    meet: Vec<Element>,
    zero: Element,
    top: Element,
}

impl Deref for Pseudogroup {
    type Target = InverseSemigroup;

    fn deref(&self) -> &InverseSemigroup {
        &self.base
    }
}

impl Pseudogroup {
    pub fn from_table(table: &CayleyTable) -> Result<Self, PseudogroupError> {
        Self::new(InverseSemigroup::validate(table)?)
    }

    /// Checks the pseudogroup conditions on a validated inverse semigroup.
    pub fn new(base: InverseSemigroup) -> Result<Self, PseudogroupError> {
        let zero = base.zero().ok_or(PseudogroupError::NoZero)?;
        let n = base.len();

        let mut join = vec![None; n * n];
        for a in 0..n {
            for b in a..n {
                if !base.compatible(a, b).is_both() {
                    continue;
                }
                let mut bounds = base.up_set(a).clone();
                bounds.intersect_with(base.up_set(b));
                let least = bounds
                    .ones()
                    .find(|&u| bounds.is_subset(base.up_set(u)))
                    .ok_or(PseudogroupError::MissingJoin(a, b))?;
                join[a * n + b] = Some(least);
                join[b * n + a] = Some(least);
            }
        }

        for a in 0..n {
            for b in a..n {
                let Some(j) = join[a * n + b] else { continue };
                for s in 0..n {
                    let (sa, sb) = (base.mul(s, a), base.mul(s, b));
                    if join[sa * n + sb] != Some(base.mul(s, j)) {
                        return Err(PseudogroupError::NotDistributive { s, a, b, side: Side::Left });
                    }
                    let (as_, bs) = (base.mul(a, s), base.mul(b, s));
                    if join[as_ * n + bs] != Some(base.mul(j, s)) {
                        return Err(PseudogroupError::NotDistributive { s, a, b, side: Side::Right });
                    }
                }
            }
        }

        let idempotents = base.idempotents();
        for &e in &idempotents {
            for &f in &idempotents {
                for &g in &idempotents {
                    let fg = join[f * n + g].expect("idempotents are compatible");
                    let ef_eg = join[base.mul(e, f) * n + base.mul(e, g)].expect("idempotents are compatible");
                    if base.mul(e, fg) != ef_eg {
                        return Err(PseudogroupError::IdempotentsNotFrame(e, f, g));
                    }
                }
            }
        }
        let top = idempotents
            .iter()
            .fold(zero, |acc, &e| join[acc * n + e].expect("idempotents are compatible"));
        if base.identity() != Some(top) {
            return Err(PseudogroupError::TopNotIdentity);
        }

        let mut meet = vec![zero; n * n];
        for a in 0..n {
            for b in a..n {
                let mut lower = base.down_set(a).clone();
                lower.intersect_with(base.down_set(b));
                let mut m = zero;
                for c in lower.ones() {
                    m = join[m * n + c].ok_or(PseudogroupError::MissingMeet(a, b))?;
                }
                if !lower.contains(m) {
                    return Err(PseudogroupError::MissingMeet(a, b));
                }
                meet[a * n + b] = m;
                meet[b * n + a] = m;
            }
        }

        Ok(Pseudogroup { base, join, meet, zero, top })
    }

    pub fn base(&self) -> &InverseSemigroup {
        &self.base
    }

    pub fn into_base(self) -> InverseSemigroup {
        self.base
    }

    pub fn zero_element(&self) -> Element {
        self.zero
    }

    /// The identity `e_S`, which is also the top of the idempotent frame.
    pub fn top(&self) -> Element {
        self.top
    }

    /// Join of a compatible pair.
    #[inline]
    pub fn join(&self, a: Element, b: Element) -> Option<Element> {
        self.join[a * self.base.len() + b]
    }

    /// Join of a pairwise compatible set; the empty join is the zero.
    pub fn join_of(&self, set: &[Element]) -> Result<Element, PseudogroupError> {
        for (i, &a) in set.iter().enumerate() {
            for &b in &set[i + 1..] {
                if self.join(a, b).is_none() {
                    return Err(PseudogroupError::NotCompatible(a, b));
                }
            }
        }
        Ok(set
            .iter()
            .fold(self.zero, |acc, &a| self.join(acc, a).expect("compatibility checked")))
    }

    /// Join of idempotents, which are always compatible.
    pub fn join_idempotents(&self, set: impl IntoIterator<Item = Element>) -> Element {
        set.into_iter()
            .fold(self.zero, |acc, e| self.join(acc, e).expect("idempotents are compatible"))
    }

    #[inline]
    pub fn meet(&self, a: Element, b: Element) -> Element {
        self.meet[a * self.base.len() + b]
    }

    /// Engine closing subsets under down-closure and compatible joins.
    pub fn ideal_closure(&self) -> OrderIdealClosure {
        let n = self.base.len();
        let down = (0..n).map(|a| self.base.down_set(a).clone()).collect();
        OrderIdealClosure::new(down, self.join.clone(), self.zero)
    }

    /// `X^∨`: all joins of compatible subsets of `subset`.
    pub fn join_closure(&self, subset: &FixedBitSet) -> FixedBitSet {
        let n = self.base.len();
        let mut set = FixedBitSet::with_capacity(n);
        set.insert(self.zero);
        set.union_with(subset);
        let mut members: Vec<Element> = set.ones().collect();
        let mut i = 0;
        while i < members.len() {
            let x = members[i];
            let mut k = 0;
            while k <= i {
                if let Some(j) = self.join(x, members[k]) {
                    if !set.put(j) {
                        members.push(j);
                    }
                }
                k += 1;
            }
            i += 1;
        }
        set
    }

    /// The local pseudogroup `eSe` with its embedding into `S`.
    pub fn local(&self, e: Element) -> Result<(Pseudogroup, Vec<Element>), PseudogroupError> {
        if !self.base.is_idempotent(e) {
            return Err(PseudogroupError::NotIdempotent(e));
        }
        let elems: Vec<Element> =
            self.base.elements().filter(|&s| self.base.mul(self.base.mul(e, s), e) == s).collect();
        let table = self.base.restrict(&elems).expect("eSe is a subsemigroup");
        Ok((Pseudogroup::from_table(&table)?, elems))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits;
    use crate::catalog;

    fn i2() -> Pseudogroup {
        catalog::symmetric_inverse_monoid(2).unwrap()
    }

    fn el(s: &Pseudogroup, name: &str) -> Element {
        s.element_named(name).unwrap()
    }

    #[test]
    fn i2_is_a_pseudogroup() {
        let s = i2();
        assert_eq!(s.top(), el(&s, "id"));
        assert_eq!(s.idempotents().len(), 4);
    }

    #[test]
    fn two_element_semilattice() {
        let s = Pseudogroup::from_table(&CayleyTable::from_fn(2, |a, b| a.min(b))).unwrap();
        assert_eq!(s.top(), 1);
        assert_eq!(s.zero_element(), 0);
    }

    #[test]
    fn brandt_semigroup_lacks_joins() {
        let b2 = catalog::brandt_b2().unwrap();
        let e = b2.element_named("e").unwrap();
        let f = b2.element_named("f").unwrap();
        assert_eq!(Pseudogroup::new(b2), Err(PseudogroupError::MissingJoin(e, f)));
    }

    #[test]
    fn joins_in_i2() {
        let s = i2();
        assert_eq!(s.join_of(&[el(&s, "e1"), el(&s, "e2")]), Ok(el(&s, "id")));
        assert_eq!(s.join_of(&[]), Ok(el(&s, "0")));
        assert_eq!(s.join_of(&[el(&s, "a"), el(&s, "b")]), Ok(el(&s, "swap")));
        assert_eq!(
            s.join_of(&[el(&s, "e1"), el(&s, "a")]),
            Err(PseudogroupError::NotCompatible(el(&s, "e1"), el(&s, "a")))
        );
    }

    #[test]
    fn meets_in_i2() {
        let s = i2();
        assert_eq!(s.meet(el(&s, "id"), el(&s, "swap")), el(&s, "0"));
        assert_eq!(s.meet(el(&s, "a"), el(&s, "a")), el(&s, "a"));
        assert_eq!(s.meet(el(&s, "id"), el(&s, "e1")), el(&s, "e1"));
    }

    #[test]
    fn local_pseudogroup_at_rank_one_idempotent() {
        let s = i2();
        let (local, embedding) = s.local(el(&s, "e1")).unwrap();
        assert_eq!(local.len(), 2);
        assert_eq!(embedding, vec![el(&s, "0"), el(&s, "e1")]);
    }

    #[test]
    fn join_closure_of_atoms() {
        let s = i2();
        let closed = s.join_closure(&bits::bitset(7, [el(&s, "e1"), el(&s, "e2"), el(&s, "a")]));
        let expected = bits::bitset(7, [el(&s, "0"), el(&s, "e1"), el(&s, "e2"), el(&s, "id"), el(&s, "a")]);
        assert_eq!(closed, expected);
    }
}
