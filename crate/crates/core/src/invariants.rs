//! Morita invariant properties of pseudogroups.
//!
//! Being 0-simplifying is decided three ways: by listing sup-ideals, by the
//! pencil preorder, and by two-sided covers `Z` of pairs of idempotents. The
//! routes are independent computations and must agree. Pencils never need a
//! subset search: if any pencil from `e` to `f` exists, then so does the set
//! of all `x` with `d(x) ≤ e` and `r(x) ≤ f`, since its `d`-join is squeezed
//! between `e` and `e`.

use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits;
use crate::pseudogroup::Pseudogroup;
use crate::semigroup::{Element, InverseSemigroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error("the characterizations of 0-simplifying disagree: sup-ideals {ideals}, pencils {pencils}, covers {covers}")]
    EquivalenceMismatch { ideals: bool, pencils: bool, covers: bool },
    #[error("{property} is not invariant: {left} for one side, {right} for the other")]
    InvarianceViolated { property: &'static str, left: bool, right: bool },
    #[error("{0} is not a pencil from {1} to {2}")]
    NotPencil(String, Element, Element),
    #[error("idempotent {0} of the enlarged product has no 𝒟-related idempotent in the local pseudogroup")]
    DRelationFails(Element),
    #[error("element {0} is not an idempotent")]
    NotIdempotent(Element),
    #[error("the closure of the ideal generated by {0} is not a sup-ideal")]
    ClosureNotSupIdeal(Element),
}

/// A witness for `from_e ⪯ to_f`: `⋁ d(x) = from_e` and `⋁ r(x) ≤ to_f`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pencil {
    pub from_e: Element,
    pub to_f: Element,
    pub elements: Vec<Element>,
}

impl Pencil {
    pub fn verify(&self, s: &Pseudogroup) -> Result<(), InvariantError> {
        let d = s.join_idempotents(self.elements.iter().map(|&x| s.d(x)));
        let r = s.join_idempotents(self.elements.iter().map(|&x| s.r(x)));
        if d != self.from_e || !s.natural_leq(r, self.to_f) {
            return Err(InvariantError::NotPencil(format!("{:?}", self.elements), self.from_e, self.to_f));
        }
        Ok(())
    }
}

fn require_idempotent(s: &Pseudogroup, e: Element) -> Result<(), InvariantError> {
    if s.is_idempotent(e) {
        Ok(())
    } else {
        Err(InvariantError::NotIdempotent(e))
    }
}

/// A pencil from `e` to `f`, or `None` when `e ⪯ f` fails. The pencil is
/// pruned: dropping any element changes the `d`-join.
pub fn pencil_preorder(s: &Pseudogroup, e: Element, f: Element) -> Result<Option<Pencil>, InvariantError> {
    require_idempotent(s, e)?;
    require_idempotent(s, f)?;
    let mut elements: Vec<Element> =
        s.elements().filter(|&x| s.natural_leq(s.d(x), e) && s.natural_leq(s.r(x), f)).collect();
    if s.join_idempotents(elements.iter().map(|&x| s.d(x))) != e {
        return Ok(None);
    }
    let mut i = 0;
    while i < elements.len() {
        let rest = elements.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| s.d(x));
        if s.join_idempotents(rest) == e {
            elements.remove(i);
        } else {
            i += 1;
        }
    }
    let pencil = Pencil { from_e: e, to_f: f, elements };
    pencil.verify(s)?;
    Ok(Some(pencil))
}

/// From pencils `X: e ⪯ f` and `Y: f ⪯ g`, the pencil `YX = {yx}` from `e`
/// to `g`. Since `r(x) ≤ f`, the `d`-join over `y` of `d(yx)` is `d(x)`.
pub fn compose_pencils(s: &Pseudogroup, x: &Pencil, y: &Pencil) -> Result<Pencil, InvariantError> {
    if x.to_f != y.from_e {
        return Err(InvariantError::NotPencil(format!("{:?}", y.elements), x.to_f, y.to_f));
    }
    let elements: BTreeSet<Element> =
        x.elements.iter().flat_map(|&a| y.elements.iter().map(move |&b| s.mul(b, a))).collect();
    let pencil = Pencil { from_e: x.from_e, to_f: y.to_f, elements: elements.into_iter().collect() };
    pencil.verify(s)?;
    Ok(pencil)
}

/// `A^∨` for the two-sided ideal generated by `gens`.
fn ideal_closure(s: &Pseudogroup, gens: &FixedBitSet) -> FixedBitSet {
    let mut ideal = FixedBitSet::with_capacity(s.len());
    for a in gens.ones() {
        for u in s.elements() {
            let ua = s.mul(u, a);
            for v in s.elements() {
                ideal.insert(s.mul(ua, v));
            }
        }
    }
    s.join_closure(&ideal)
}

fn is_sup_ideal(s: &Pseudogroup, set: &FixedBitSet) -> bool {
    set.contains(s.zero_element())
        && set.ones().all(|a| s.elements().all(|u| set.contains(s.mul(u, a)) && set.contains(s.mul(a, u))))
        && s.join_closure(set) == *set
}

/// All sup-ideals, in canonical order. Each is the compatible-join closure of
/// a union of principal ideals, so they are generated from `(SaS)^∨`.
pub fn sup_ideals(s: &Pseudogroup) -> Result<Vec<FixedBitSet>, InvariantError> {
    let n = s.len();
    let mut principal = Vec::with_capacity(n);
    for a in s.elements() {
        let closed = ideal_closure(s, &bits::bitset(n, [a]));
        if !is_sup_ideal(s, &closed) {
            return Err(InvariantError::ClosureNotSupIdeal(a));
        }
        principal.push(closed);
    }
    let zero = bits::bitset(n, [s.zero_element()]);
    let mut found = vec![zero.clone()];
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::from([zero.ones().collect()]);
    let mut i = 0;
    while i < found.len() {
        for p in &principal {
            let mut union = found[i].clone();
            union.union_with(p);
            let closed = s.join_closure(&union);
            if seen.insert(closed.ones().collect()) {
                found.push(closed);
            }
        }
        i += 1;
    }
    bits::canonical_sort(&mut found);
    Ok(found)
}

/// The three characterizations of 0-simplifying, each computed on its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplifyingReport {
    /// No sup-ideals besides `{0}` and `S`.
    pub no_proper_sup_ideals: bool,
    /// `⪯` is universal on nonzero idempotents.
    pub pencils_universal: bool,
    /// Every pair of nonzero idempotents has `Z` with `⋁d = e`, `⋁r = f`.
    pub two_sided_covers: bool,
}

impl SimplifyingReport {
    pub fn value(&self) -> bool {
        self.no_proper_sup_ideals
    }
}

fn nonzero_idempotents(s: &Pseudogroup) -> Vec<Element> {
    s.idempotents().into_iter().filter(|&e| e != s.zero_element()).collect()
}

fn has_two_sided_cover(s: &Pseudogroup, e: Element, f: Element) -> bool {
    let z: Vec<Element> = s.elements().filter(|&x| s.natural_leq(s.d(x), e) && s.natural_leq(s.r(x), f)).collect();
    s.join_idempotents(z.iter().map(|&x| s.d(x))) == e && s.join_idempotents(z.iter().map(|&x| s.r(x))) == f
}

pub fn is_zero_simplifying(s: &Pseudogroup) -> Result<SimplifyingReport, InvariantError> {
    let full = bits::full(s.len());
    let zero = bits::bitset(s.len(), [s.zero_element()]);
    let no_proper_sup_ideals = sup_ideals(s)?.iter().all(|i| *i == full || *i == zero);
    let idempotents = nonzero_idempotents(s);
    let mut pencils_universal = true;
    'outer: for &e in &idempotents {
        for &f in &idempotents {
            if pencil_preorder(s, e, f)?.is_none() {
                pencils_universal = false;
                break 'outer;
            }
        }
    }
    let two_sided_covers = idempotents.iter().all(|&e| idempotents.iter().all(|&f| has_two_sided_cover(s, e, f)));
    if no_proper_sup_ideals != pencils_universal || pencils_universal != two_sided_covers {
        return Err(InvariantError::EquivalenceMismatch {
            ideals: no_proper_sup_ideals,
            pencils: pencils_universal,
            covers: two_sided_covers,
        });
    }
    Ok(SimplifyingReport { no_proper_sup_ideals, pencils_universal, two_sided_covers })
}

/// True iff the only elements commuting with every idempotent are idempotents.
pub fn is_fundamental(s: &InverseSemigroup) -> bool {
    let idempotents = s.idempotents();
    s.elements()
        .filter(|&a| idempotents.iter().all(|&e| s.mul(a, e) == s.mul(e, a)))
        .all(|a| s.is_idempotent(a))
}

/// The invariants of one pseudogroup, in the order the CLI prints them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantSummary {
    pub zero_simplifying: bool,
    pub fundamental: bool,
    pub idempotents: usize,
    pub d_classes: usize,
}

pub fn summary(s: &Pseudogroup) -> Result<InvariantSummary, InvariantError> {
    Ok(InvariantSummary {
        zero_simplifying: is_zero_simplifying(s)?.value(),
        fundamental: is_fundamental(s),
        idempotents: s.idempotents().len(),
        d_classes: s.d_classes().len(),
    })
}

/// For an idempotent `g = a·s·b` with `s ∈ eUe`, the element `x = g·a·s` has
/// `r(x) = g` and `d(x) ∈ eUe`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DWitness {
    pub idempotent: Element,
    pub x: Element,
}

/// Witnesses that every idempotent of `U·eUe·U` is 𝒟-related to an
/// idempotent of `eUe`, built from a factorization of each idempotent.
pub fn d_relation_witnesses(u: &Pseudogroup, e: Element) -> Result<Vec<DWitness>, InvariantError> {
    require_idempotent(u, e)?;
    let local: Vec<Element> = u.elements().filter(|&s| u.mul(u.mul(e, s), e) == s).collect();
    let in_local = bits::bitset(u.len(), local.iter().copied());
    let mut factor: Vec<Option<(Element, Element, Element)>> = vec![None; u.len()];
    for a in u.elements() {
        for &s in &local {
            let as_ = u.mul(a, s);
            for b in u.elements() {
                let g = u.mul(as_, b);
                if factor[g].is_none() {
                    factor[g] = Some((a, s, b));
                }
            }
        }
    }
    let mut witnesses = Vec::new();
    for g in u.idempotents() {
        let Some((a, s, b)) = factor[g] else { continue };
        let x = u.mul(u.mul(g, a), s);
        let y = u.mul(u.mul(u.mul(u.inv(s), s), b), g);
        if u.mul(x, y) != g || u.inv(x) != y || !in_local.contains(u.d(x)) {
            return Err(InvariantError::DRelationFails(g));
        }
        witnesses.push(DWitness { idempotent: g, x });
    }
    Ok(witnesses)
}

/// Invariants of both sides of a joint enlargement `U` of `eUe ≅ S` and
/// `fUf ≅ T`, with the 𝒟-class contrast for the underlying inverse semigroups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub s: InvariantSummary,
    pub t: InvariantSummary,
    pub enlargement: InvariantSummary,
    pub d_witnesses_s: usize,
    pub d_witnesses_t: usize,
    pub d_counts_differ: bool,
}

pub fn invariance_report(
    s: &Pseudogroup,
    t: &Pseudogroup,
    u: &Pseudogroup,
    e: Element,
    f: Element,
) -> Result<InvarianceReport, InvariantError> {
    let (ss, ts, us) = (summary(s)?, summary(t)?, summary(u)?);
    for other in [&ts, &us] {
        if ss.zero_simplifying != other.zero_simplifying {
            return Err(InvariantError::InvarianceViolated {
                property: "0-simplifying",
                left: ss.zero_simplifying,
                right: other.zero_simplifying,
            });
        }
        if ss.fundamental != other.fundamental {
            return Err(InvariantError::InvarianceViolated {
                property: "fundamental",
                left: ss.fundamental,
                right: other.fundamental,
            });
        }
    }
    Ok(InvarianceReport {
        d_witnesses_s: d_relation_witnesses(u, e)?.len(),
        d_witnesses_t: d_relation_witnesses(u, f)?.len(),
        d_counts_differ: ss.d_classes != ts.d_classes,
        s: ss,
        t: ts,
        enlargement: us,
    })
}
