//! Order-ideal closure and finite lattices of sets.
//!
//! Most carriers in this crate are families of order-ideals closed under a
//! partial binary join: the compatible-join-closed downsets of a pseudogroup,
//! their analogues for modules, and the closed sets of a presentation. On a
//! finite poset where the partial join distributes, closing under binary joins
//! of compatible pairs is the same as closing under joins of arbitrary
//! compatible subsets: a compatible subset is joined one element at a time, and
//! the empty join is the bottom, which every closed set contains.

use std::collections::{HashMap, HashSet};

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::bits;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("family has {count} members, above the bound {limit}")]
    TooLarge { count: usize, limit: usize },
    #[error("family is empty")]
    Empty,
    #[error("intersection of members {0} and {1} is not a member")]
    NotIntersectionClosed(usize, usize),
    #[error("closure of the union of members {0} and {1} is not a member")]
    NotJoinClosed(usize, usize),
    #[error("distributivity fails at members ({0}, {1}, {2})")]
    NotDistributive(usize, usize, usize),
    #[error("the relation is not a partial order at ({0}, {1})")]
    NotPartialOrder(usize, usize),
    #[error("elements {0} and {1} have no least upper bound")]
    NoJoin(usize, usize),
    #[error("elements {0} and {1} have no greatest lower bound")]
    NoMeet(usize, usize),
}

/// Closure of subsets of `0..n` under down-closure and a partial binary join.
#[derive(Debug, Clone)]
pub struct OrderIdealClosure {
    n: usize,
    /// `down[b]` = elements below `b`, including `b`.
    down: Vec<FixedBitSet>,
    /// Row-major; `None` where the pair has no join in the relevant sense.
    join: Vec<Option<usize>>,
    bottom: usize,
}

impl OrderIdealClosure {
    pub fn new(down: Vec<FixedBitSet>, join: Vec<Option<usize>>, bottom: usize) -> Self {
        let n = down.len();
        assert_eq!(join.len(), n * n, "join table must be n×n");
        OrderIdealClosure { n, down, join, bottom }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn down(&self, a: usize) -> &FixedBitSet {
        &self.down[a]
    }

    #[inline]
    pub fn join(&self, a: usize, b: usize) -> Option<usize> {
        self.join[a * self.n + b]
    }

    /// The least closed set containing `seed`.
    pub fn close(&self, seed: &FixedBitSet) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(self.n);
        let mut members = Vec::new();
        let mut queue = Vec::new();
        let add = |x: usize, set: &mut FixedBitSet, members: &mut Vec<usize>, queue: &mut Vec<usize>| {
            for y in self.down[x].ones() {
                if !set.put(y) {
                    members.push(y);
                    queue.push(y);
                }
            }
        };
        add(self.bottom, &mut set, &mut members, &mut queue);
        for x in seed.ones() {
            add(x, &mut set, &mut members, &mut queue);
        }
        // Every pair is examined when the later of its two members is popped.
        while let Some(x) = queue.pop() {
            let mut i = 0;
            while i < members.len() {
                let m = members[i];
                if let Some(j) = self.join(x, m) {
                    if !set.contains(j) {
                        add(j, &mut set, &mut members, &mut queue);
                    }
                }
                i += 1;
            }
        }
        set
    }

    pub fn is_closed(&self, set: &FixedBitSet) -> bool {
        if !set.contains(self.bottom) {
            return false;
        }
        let members: Vec<usize> = set.ones().collect();
        for &a in &members {
            if !self.down[a].is_subset(set) {
                return false;
            }
        }
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                if let Some(j) = self.join(a, b) {
                    if !set.contains(j) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// All closed sets, in canonical order.
    ///
    /// Below 17 elements every subset is tested. Above that the family is
    /// generated from the principal closed sets under closure of binary
    /// unions: every closed set is the closure of the union of the principal
    /// ideals of its members, so this reaches all of them.
    pub fn enumerate_closed(&self, limit: usize) -> Result<Vec<FixedBitSet>, LatticeError> {
        let mut family = if self.n <= 16 {
            let mut out = Vec::new();
            for mask in 0u64..(1u64 << self.n) {
                let set = bits::from_mask(self.n, mask);
                if self.is_closed(&set) {
                    out.push(set);
                    if out.len() > limit {
                        return Err(LatticeError::TooLarge { count: out.len(), limit });
                    }
                }
            }
            out
        } else {
            self.generate_closed(limit)?
        };
        bits::canonical_sort(&mut family);
        Ok(family)
    }

    /// Generation strategy of [`enumerate_closed`](Self::enumerate_closed),
    /// exposed so it can be compared against the subset filter.
    pub fn generate_closed(&self, limit: usize) -> Result<Vec<FixedBitSet>, LatticeError> {
        let mut seen: HashSet<FixedBitSet> = HashSet::new();
        let mut family: Vec<FixedBitSet> = Vec::new();
        let mut push = |set: FixedBitSet, family: &mut Vec<FixedBitSet>| -> Result<(), LatticeError> {
            if seen.insert(set.clone()) {
                family.push(set);
                if family.len() > limit {
                    return Err(LatticeError::TooLarge { count: family.len(), limit });
                }
            }
            Ok(())
        };
        push(self.close(&FixedBitSet::with_capacity(self.n)), &mut family)?;
        for a in 0..self.n {
            push(self.close(&self.down[a]), &mut family)?;
        }
        let principal = family.len();
        // Joining with principal ideals alone suffices: a closed set is reached
        // by adding its members' principal ideals one at a time.
        let mut i = 0;
        while i < family.len() {
            for p in 0..principal {
                if family[p].is_subset(&family[i]) {
                    continue;
                }
                let mut union = family[i].clone();
                union.union_with(&family[p]);
                let closed = self.close(&union);
                push(closed, &mut family)?;
            }
            i += 1;
        }
        Ok(family)
    }
}

/// A finite lattice whose members are subsets of a ground set, with meet given
/// by intersection and join by a closure of the union.
#[derive(Debug, Clone)]
pub struct SetLattice {
    members: Vec<FixedBitSet>,
    index: HashMap<FixedBitSet, usize>,
    join: Vec<usize>,
    meet: Vec<usize>,
    bottom: usize,
    top: usize,
}

impl SetLattice {
    /// Builds the lattice from a family closed under intersection and under
    /// `close` applied to unions. Both closure properties are verified.
    pub fn new(
        members: Vec<FixedBitSet>,
        close: impl Fn(&FixedBitSet) -> FixedBitSet,
    ) -> Result<Self, LatticeError> {
        if members.is_empty() {
            return Err(LatticeError::Empty);
        }
        let m = members.len();
        let index: HashMap<FixedBitSet, usize> =
            members.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let mut join = vec![0; m * m];
        let mut meet = vec![0; m * m];
        for i in 0..m {
            for j in i..m {
                let mut inter = members[i].clone();
                inter.intersect_with(&members[j]);
                let k = *index.get(&inter).ok_or(LatticeError::NotIntersectionClosed(i, j))?;
                meet[i * m + j] = k;
                meet[j * m + i] = k;
                let mut union = members[i].clone();
                union.union_with(&members[j]);
                let k = *index.get(&close(&union)).ok_or(LatticeError::NotJoinClosed(i, j))?;
                join[i * m + j] = k;
                join[j * m + i] = k;
            }
        }
        let bottom = (0..m).fold(0, |acc, i| meet[acc * m + i]);
        let top = (0..m).fold(0, |acc, i| join[acc * m + i]);
        Ok(SetLattice { members, index, join, meet, bottom, top })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[FixedBitSet] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &FixedBitSet {
        &self.members[i]
    }

    pub fn index_of(&self, set: &FixedBitSet) -> Option<usize> {
        self.index.get(set).copied()
    }

    #[inline]
    pub fn join(&self, i: usize, j: usize) -> usize {
        self.join[i * self.members.len() + j]
    }

    #[inline]
    pub fn meet(&self, i: usize, j: usize) -> usize {
        self.meet[i * self.members.len() + j]
    }

    pub fn join_all(&self, items: impl IntoIterator<Item = usize>) -> usize {
        items.into_iter().fold(self.bottom, |acc, i| self.join(acc, i))
    }

    #[inline]
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.members[i].is_subset(&self.members[j])
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    /// Exhaustive check of `a ∧ (b ∨ c) = (a ∧ b) ∨ (a ∧ c)`.
    pub fn check_distributive(&self) -> Result<(), LatticeError> {
        let m = self.len();
        for a in 0..m {
            for b in 0..m {
                let ab = self.meet(a, b);
                for c in b..m {
                    if self.meet(a, self.join(b, c)) != self.join(ab, self.meet(a, c)) {
                        return Err(LatticeError::NotDistributive(a, b, c));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A finite lattice given by its order relation on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderLattice {
    n: usize,
    up: Vec<FixedBitSet>,
    join: Vec<usize>,
    meet: Vec<usize>,
    bottom: usize,
    top: usize,
}

impl OrderLattice {
    /// Checks that `leq` is a partial order with all binary joins and meets.
    pub fn from_leq(n: usize, leq: impl Fn(usize, usize) -> bool) -> Result<Self, LatticeError> {
        if n == 0 {
            return Err(LatticeError::Empty);
        }
        let up: Vec<FixedBitSet> = (0..n).map(|a| bits::bitset(n, (0..n).filter(|&b| leq(a, b)))).collect();
        let down: Vec<FixedBitSet> = (0..n).map(|b| bits::bitset(n, (0..n).filter(|&a| leq(a, b)))).collect();
        for a in 0..n {
            if !up[a].contains(a) {
                return Err(LatticeError::NotPartialOrder(a, a));
            }
            for b in up[a].ones() {
                if b != a && up[b].contains(a) {
                    return Err(LatticeError::NotPartialOrder(a, b));
                }
                if !up[b].is_subset(&up[a]) {
                    return Err(LatticeError::NotPartialOrder(a, b));
                }
            }
        }
        let mut join = vec![0; n * n];
        let mut meet = vec![0; n * n];
        for a in 0..n {
            for b in a..n {
                let mut bounds = up[a].clone();
                bounds.intersect_with(&up[b]);
                let j = bounds.ones().find(|&u| bounds.is_subset(&up[u])).ok_or(LatticeError::NoJoin(a, b))?;
                let mut lower = down[a].clone();
                lower.intersect_with(&down[b]);
                let m = lower.ones().find(|&l| lower.is_subset(&down[l])).ok_or(LatticeError::NoMeet(a, b))?;
                join[a * n + b] = j;
                join[b * n + a] = j;
                meet[a * n + b] = m;
                meet[b * n + a] = m;
            }
        }
        let bottom = (0..n).find(|&b| up[b].count_ones(..) == n).ok_or(LatticeError::NoMeet(0, 0))?;
        let top = (0..n).find(|&t| down[t].count_ones(..) == n).ok_or(LatticeError::NoJoin(0, 0))?;
        Ok(OrderLattice { n, up, join, meet, bottom, top })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(b)
    }

    #[inline]
    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.n + b]
    }

    #[inline]
    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.n + b]
    }

    pub fn join_all(&self, items: impl IntoIterator<Item = usize>) -> usize {
        items.into_iter().fold(self.bottom, |acc, i| self.join(acc, i))
    }

    pub fn up_set(&self, a: usize) -> &FixedBitSet {
        &self.up[a]
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    /// Exhaustive check of `a ∧ (b ∨ c) = (a ∧ b) ∨ (a ∧ c)`.
    pub fn check_distributive(&self) -> Result<(), LatticeError> {
        let n = self.n;
        for a in 0..n {
            for b in 0..n {
                let ab = self.meet(a, b);
                for c in b..n {
                    if self.meet(a, self.join(b, c)) != self.join(ab, self.meet(a, c)) {
                        return Err(LatticeError::NotDistributive(a, b, c));
                    }
                }
            }
        }
        Ok(())
    }
}

impl From<&SetLattice> for OrderLattice {
    fn from(l: &SetLattice) -> Self {
        OrderLattice::from_leq(l.len(), |a, b| l.leq(a, b)).expect("a set lattice is a lattice")
    }
}
