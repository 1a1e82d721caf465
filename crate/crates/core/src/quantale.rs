//! The inverse quantal frame `𝒧∨(S)` of a finite pseudogroup.
//!
//! Its elements are the order-ideals of `S` closed under compatible joins.
//! Every such ideal contains the zero. Products are closures of pointwise
//! products and the involution is pointwise inversion. The unit is the set of
//! idempotents, which is already an order-ideal, and the top is `S` itself.

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::bits;
use crate::lattice::{LatticeError, OrderIdealClosure, SetLattice};
use crate::pseudogroup::{Pseudogroup, PseudogroupError};
use crate::semigroup::{CayleyTable, Element};

/// Default bound on carrier size.
pub const DEFAULT_CARRIER_LIMIT: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuantaleError {
    #[error("carrier exceeds the bound {limit}")]
    TooLarge { limit: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("product is not associative at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("the unit fails at {0}")]
    UnitFails(usize),
    #[error("multiplication does not preserve the join of {1} and {2} when multiplied by {0} on the {side}", side = if *.3 { "left" } else { "right" })]
    NotJoinPreserving(usize, usize, usize, bool),
    #[error("the involution fails at ({0}, {1})")]
    InvolutionFails(usize, usize),
    #[error("the involution of {0} leaves the carrier")]
    StarNotInCarrier(usize),
    #[error("not stably Gelfand at {0}")]
    NotStablyGelfand(usize),
    #[error("partial units do not cover the top")]
    CoverFails,
    #[error("the product of partial units {0} and {1} is not a partial unit")]
    PartialUnitsNotClosed(usize, usize),
    #[error("partial units do not form a pseudogroup: {0}")]
    PartialUnits(PseudogroupError),
    #[error("not isomorphic: {0}")]
    NotIsomorphic(String),
}

/// A compatible-join-closed order-ideal, as a bit-set over the pseudogroup.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DownSet(pub FixedBitSet);

impl DownSet {
    pub fn bits(&self) -> &FixedBitSet {
        &self.0
    }

    pub fn contains(&self, s: Element) -> bool {
        self.0.contains(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LccOptions {
    pub limit: usize,
}

impl Default for LccOptions {
    fn default() -> Self {
        LccOptions { limit: DEFAULT_CARRIER_LIMIT }
    }
}

/// `𝒧∨(S)` with all operations tabulated over carrier indices.
#[derive(Debug, Clone)]
pub struct QuantalFrame {
    s: Pseudogroup,
    closure: OrderIdealClosure,
    lattice: SetLattice,
    mult: Vec<usize>,
    star: Vec<usize>,
    unit: usize,
}

/// `𝒧∨(S)` with the default carrier bound.
pub fn lcc(s: &Pseudogroup) -> Result<QuantalFrame, QuantaleError> {
    lcc_with(s, LccOptions::default())
}

pub fn lcc_with(s: &Pseudogroup, options: LccOptions) -> Result<QuantalFrame, QuantaleError> {
    let closure = s.ideal_closure();
    let carrier = closure.enumerate_closed(options.limit).map_err(|e| match e {
        LatticeError::TooLarge { limit, .. } => QuantaleError::TooLarge { limit },
        other => QuantaleError::Lattice(other),
    })?;
    let lattice = SetLattice::new(carrier, |u| closure.close(u))?;
    let m = lattice.len();
    let n = s.len();

    let mut mult = vec![0; m * m];
    let mut product = FixedBitSet::with_capacity(n);
    for a in 0..m {
        let ua: Vec<Element> = lattice.member(a).ones().collect();
        for b in 0..m {
            product.clear();
            for v in lattice.member(b).ones() {
                for &u in &ua {
                    product.insert(s.mul(u, v));
                }
            }
            mult[a * m + b] = lattice.index_of(&closure.close(&product)).expect("closure lands in the carrier");
        }
    }
    let mut star = vec![0; m];
    for a in 0..m {
        let inv = bits::bitset(n, lattice.member(a).ones().map(|u| s.inv(u)));
        star[a] = lattice.index_of(&inv).ok_or(QuantaleError::StarNotInCarrier(a))?;
    }
    let unit = lattice
        .index_of(s.idempotent_set())
        .expect("idempotents form a compatible-join-closed ideal");
    Ok(QuantalFrame { s: s.clone(), closure, lattice, mult, star, unit })
}

/// The partial units `Q_I` as a pseudogroup, with the carrier index of each
/// of its elements.
#[derive(Debug, Clone)]
pub struct PartialUnits {
    pub pseudogroup: Pseudogroup,
    pub members: Vec<usize>,
}

impl QuantalFrame {
    pub fn pseudogroup(&self) -> &Pseudogroup {
        &self.s
    }

    pub fn lattice(&self) -> &SetLattice {
        &self.lattice
    }

    pub fn closure(&self) -> &OrderIdealClosure {
        &self.closure
    }

    pub fn len(&self) -> usize {
        self.lattice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattice.is_empty()
    }

    pub fn element(&self, a: usize) -> DownSet {
        DownSet(self.lattice.member(a).clone())
    }

    pub fn index_of(&self, set: &FixedBitSet) -> Option<usize> {
        self.lattice.index_of(set)
    }

    /// Carrier index of the principal ideal `s↓`.
    pub fn principal(&self, s: Element) -> usize {
        self.lattice.index_of(self.s.down_set(s)).expect("principal ideals are closed")
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.len() + b]
    }

    #[inline]
    pub fn star(&self, a: usize) -> usize {
        self.star[a]
    }

    #[inline]
    pub fn join(&self, a: usize, b: usize) -> usize {
        self.lattice.join(a, b)
    }

    #[inline]
    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.lattice.meet(a, b)
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.lattice.leq(a, b)
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn top(&self) -> usize {
        self.lattice.top()
    }

    pub fn bottom(&self) -> usize {
        self.lattice.bottom()
    }

    /// Whether `a ≤ e`.
    pub fn in_base_locale(&self, a: usize) -> bool {
        self.leq(a, self.unit)
    }

    /// Whether `a·a* ≤ e` and `a*·a ≤ e`.
    pub fn is_partial_unit(&self, a: usize) -> bool {
        let s = self.star(a);
        self.in_base_locale(self.mul(a, s)) && self.in_base_locale(self.mul(s, a))
    }

    /// Verifies the inverse-quantal-frame axioms exhaustively.
    pub fn verify(&self) -> Result<(), QuantaleError> {
        let m = self.len();
        self.lattice.check_distributive()?;
        for a in 0..m {
            if self.mul(self.unit, a) != a || self.mul(a, self.unit) != a {
                return Err(QuantaleError::UnitFails(a));
            }
            let s = self.star(a);
            if self.star(s) != a {
                return Err(QuantaleError::InvolutionFails(a, a));
            }
            let bottom = self.bottom();
            if self.mul(a, bottom) != bottom {
                return Err(QuantaleError::NotJoinPreserving(a, bottom, bottom, true));
            }
            if self.mul(bottom, a) != bottom {
                return Err(QuantaleError::NotJoinPreserving(a, bottom, bottom, false));
            }
            let aa = self.mul(self.mul(a, s), a);
            if self.leq(aa, a) && aa != a {
                return Err(QuantaleError::NotStablyGelfand(a));
            }
        }
        for a in 0..m {
            for b in 0..m {
                let ab = self.mul(a, b);
                if self.star(ab) != self.mul(self.star(b), self.star(a)) {
                    return Err(QuantaleError::InvolutionFails(a, b));
                }
                if self.star(self.join(a, b)) != self.join(self.star(a), self.star(b)) {
                    return Err(QuantaleError::InvolutionFails(a, b));
                }
                for c in 0..m {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return Err(QuantaleError::NotAssociative(a, b, c));
                    }
                }
            }
        }
        for a in 0..m {
            for b in 0..m {
                for c in b + 1..m {
                    let bc = self.join(b, c);
                    if self.mul(a, bc) != self.join(self.mul(a, b), self.mul(a, c)) {
                        return Err(QuantaleError::NotJoinPreserving(a, b, c, true));
                    }
                    if self.mul(bc, a) != self.join(self.mul(b, a), self.mul(c, a)) {
                        return Err(QuantaleError::NotJoinPreserving(a, b, c, false));
                    }
                }
            }
        }
        if self.lattice.join_all((0..m).filter(|&a| self.is_partial_unit(a))) != self.top() {
            return Err(QuantaleError::CoverFails);
        }
        Ok(())
    }

    /// `Q_I` with the inherited multiplication, validated as a pseudogroup.
    pub fn partial_units(&self) -> Result<PartialUnits, QuantaleError> {
        let members: Vec<usize> = (0..self.len()).filter(|&a| self.is_partial_unit(a)).collect();
        if self.lattice.join_all(members.iter().copied()) != self.top() {
            return Err(QuantaleError::CoverFails);
        }
        let mut position = vec![usize::MAX; self.len()];
        for (i, &a) in members.iter().enumerate() {
            position[a] = i;
        }
        for &a in &members {
            for &b in &members {
                if position[self.mul(a, b)] == usize::MAX {
                    return Err(QuantaleError::PartialUnitsNotClosed(a, b));
                }
            }
        }
        let table = CayleyTable::from_fn(members.len(), |i, j| position[self.mul(members[i], members[j])])
            .with_names(members.iter().map(|&a| bits::to_bitstring(self.lattice.member(a))).collect());
        let pseudogroup = Pseudogroup::from_table(&table).map_err(QuantaleError::PartialUnits)?;
        Ok(PartialUnits { pseudogroup, members })
    }
}

/// Checks that `s ↦ s↓` is an isomorphism `S → 𝒧∨(S)_I` preserving
/// multiplication, inverses, the order, and compatible joins, and that it
/// restricts to an order isomorphism `E(S) → Q_0`. Returns the map as
/// carrier indices.
pub fn iso_check(s: &Pseudogroup, q: &QuantalFrame) -> Result<Vec<usize>, QuantaleError> {
    let fail = |msg: String| Err(QuantaleError::NotIsomorphic(msg));
    let units = q.partial_units()?;
    if units.members.len() != s.len() {
        return fail(format!("|S| = {} but |Q_I| = {}", s.len(), units.members.len()));
    }
    let phi: Vec<usize> = s.elements().map(|a| q.principal(a)).collect();
    let mut hit = vec![false; q.len()];
    for (a, &p) in phi.iter().enumerate() {
        if !q.is_partial_unit(p) {
            return fail(format!("{a}↓ is not a partial unit"));
        }
        if std::mem::replace(&mut hit[p], true) {
            return fail(format!("{a}↓ repeats an earlier image"));
        }
    }
    for a in s.elements() {
        if phi[s.inv(a)] != q.star(phi[a]) {
            return fail(format!("inverse of {a}"));
        }
        for b in s.elements() {
            if phi[s.mul(a, b)] != q.mul(phi[a], phi[b]) {
                return fail(format!("product {a}·{b}"));
            }
            if s.natural_leq(a, b) != q.leq(phi[a], phi[b]) {
                return fail(format!("order on ({a}, {b})"));
            }
            if let Some(j) = s.join(a, b) {
                if phi[j] != q.join(phi[a], phi[b]) {
                    return fail(format!("join of {a} and {b}"));
                }
            }
        }
    }
    let base: Vec<usize> = (0..q.len()).filter(|&u| q.in_base_locale(u)).collect();
    let idempotents = s.idempotents();
    if base.len() != idempotents.len() || idempotents.iter().any(|&e| !q.in_base_locale(phi[e])) {
        return fail("Q_0 and E(S) differ".to_string());
    }
    Ok(phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn lcc_i1() {
        let q = lcc(&catalog::symmetric_inverse_monoid(1).unwrap()).unwrap();
        assert_eq!(q.len(), 2);
        q.verify().unwrap();
        assert_eq!(q.partial_units().unwrap().members.len(), 2);
    }

    #[test]
    fn lcc_i2_sizes_and_axioms() {
        let s = catalog::symmetric_inverse_monoid(2).unwrap();
        let q = lcc(&s).unwrap();
        // Oracle: filter all 2⁷ subsets by the defining properties directly.
        let brute = (0u64..128)
            .map(|mask| bits::from_mask(7, mask))
            .filter(|u| {
                u.contains(s.zero_element())
                    && u.ones().all(|a| s.down_set(a).is_subset(u))
                    && u.ones().all(|a| u.ones().all(|b| s.join(a, b).map_or(true, |j| u.contains(j))))
            })
            .count();
        assert_eq!(brute, 16);
        assert_eq!(q.len(), 16);
        q.verify().unwrap();
        assert_eq!(q.partial_units().unwrap().members.len(), 7);
        assert_eq!(iso_check(&s, &q).unwrap().len(), 7);
    }

    #[test]
    fn semilattice_frame() {
        let s = catalog::chain(2).unwrap();
        let q = lcc(&s).unwrap();
        assert_eq!(q.len(), 2);
        assert_eq!(q.unit(), q.top());
        for a in 0..2 {
            for b in 0..2 {
                assert_eq!(q.mul(a, b), q.meet(a, b));
            }
        }
        // Every element lies below e, so every element is a partial unit.
        assert_eq!(q.partial_units().unwrap().members.len(), q.len());
    }

    #[test]
    fn carrier_bound() {
        let s = catalog::symmetric_inverse_monoid(2).unwrap();
        assert_eq!(
            lcc_with(&s, LccOptions { limit: 10 }).unwrap_err(),
            QuantaleError::TooLarge { limit: 10 }
        );
    }
}
