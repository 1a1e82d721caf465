//! Sup-lattices and modules presented by generators and relations.
//!
//! A relation `(S, T)` on generators `X` asks that `⋁S = ⋁T`. The presented
//! sup-lattice is realized as the family of subsets `Y ⊆ X` with
//! `S ⊆ Y ⟺ T ⊆ Y` for every relation. That family is closed under
//! intersections, so it comes with a closure operator `k`; joins are `k` of
//! unions and the generator `x` is sent to `k({x})`.

use std::collections::HashSet;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::bits;
use crate::lattice::{LatticeError, SetLattice};
use crate::pseudogroup::Pseudogroup;
use crate::semigroup::InverseSemigroup;

/// Above this many subset-relation checks the carrier is generated instead of
/// filtered.
const FILTER_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("{generators} generators exceed the enumeration bound {limit}")]
    GeneratorSetTooLarge { generators: usize, limit: usize },
    #[error("relation {0} mentions a generator outside the generator set")]
    RelationOutOfRange(usize),
    #[error("relation {0} is not respected: the joins of its two sides differ")]
    RelationsNotRespected(usize),
    #[error("map has {got} entries for {expected} generators")]
    MapLength { got: usize, expected: usize },
    #[error("relation set is not stable: {condition} fails for relation {relation} (multiplier {by:?})")]
    NotStable { condition: StabilityCondition, relation: usize, by: Option<usize> },
    #[error("nucleus law `{law}` fails at subsets {left} and {right}")]
    NucleusLawFailed { law: &'static str, left: String, right: String },
    #[error("module action is not associative at ({0}, {1}, {2})")]
    ActionNotAssociative(usize, usize, usize),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityCondition {
    /// `m·R_M ⊆ R_M`.
    MonoidTranslate,
    /// `R_M* = R_M`.
    MonoidInvolution,
    /// `m·R_X ⊆ R_X`.
    ActionTranslate,
    /// `R_M·x ⊆ R_X`.
    ActionEvaluate,
}

impl std::fmt::Display for StabilityCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StabilityCondition::MonoidTranslate => "m·R_M ⊆ R_M",
            StabilityCondition::MonoidInvolution => "R_M* = R_M",
            StabilityCondition::ActionTranslate => "m·R_X ⊆ R_X",
            StabilityCondition::ActionEvaluate => "R_M·x ⊆ R_X",
        })
    }
}

/// A pair `(S, T)` of generator subsets, stored with the smaller side first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    pub left: FixedBitSet,
    pub right: FixedBitSet,
}

impl Relation {
    pub fn new(a: FixedBitSet, b: FixedBitSet) -> Self {
        let mut pair = [a, b];
        bits::canonical_sort(&mut pair);
        let [left, right] = pair;
        Relation { left, right }
    }

    fn respected_by(&self, y: &FixedBitSet) -> bool {
        self.left.is_subset(y) == self.right.is_subset(y)
    }

    fn map(&self, f: impl Fn(usize) -> usize, len: usize) -> Relation {
        Relation::new(
            bits::bitset(len, self.left.ones().map(&f)),
            bits::bitset(len, self.right.ones().map(&f)),
        )
    }
}

/// Generators `0..generators` and a deduplicated list of relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    generators: usize,
    relations: Vec<Relation>,
}

impl Presentation {
    pub fn new(
        generators: usize,
        relations: impl IntoIterator<Item = (FixedBitSet, FixedBitSet)>,
    ) -> Result<Self, PresentationError> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (i, (a, b)) in relations.into_iter().enumerate() {
            if a.ones().chain(b.ones()).any(|x| x >= generators) {
                return Err(PresentationError::RelationOutOfRange(i));
            }
            let mut a = a;
            let mut b = b;
            a.grow(generators);
            b.grow(generators);
            let r = Relation::new(a, b);
            if r.left != r.right && seen.insert(r.clone()) {
                out.push(r);
            }
        }
        Ok(Presentation { generators, relations: out })
    }

    /// The relations `(C, {⋁C})` for every compatible subset `C` of a
    /// pseudogroup.
    pub fn compatible_joins(s: &Pseudogroup) -> Self {
        let n = s.len();
        let mut relations = Vec::new();
        for_each_clique(n, |a, b| s.join(a, b).is_some(), |clique| {
            let join = s.join_of(clique).expect("clique is compatible");
            relations.push((bits::bitset(n, clique.iter().copied()), bits::bitset(n, [join])));
        });
        Presentation::new(n, relations).expect("indices are in range")
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn is_closed(&self, y: &FixedBitSet) -> bool {
        self.relations.iter().all(|r| r.respected_by(y))
    }

    /// The least member of the carrier containing `y`.
    pub fn closure(&self, y: &FixedBitSet) -> FixedBitSet {
        let mut y = y.clone();
        y.grow(self.generators);
        loop {
            let mut changed = false;
            for r in &self.relations {
                let (l, rt) = (r.left.is_subset(&y), r.right.is_subset(&y));
                if l && !rt {
                    y.union_with(&r.right);
                    changed = true;
                } else if rt && !l {
                    y.union_with(&r.left);
                    changed = true;
                }
            }
            if !changed {
                return y;
            }
        }
    }

    /// Enumerates the carrier. Up to `limit` generators are accepted; all
    /// subsets are filtered when that is cheap, otherwise the carrier is
    /// generated from the generator images under closure of unions.
    pub fn present(&self, limit: usize) -> Result<PresentedSupLattice, PresentationError> {
        if self.generators > limit {
            return Err(PresentationError::GeneratorSetTooLarge { generators: self.generators, limit });
        }
        let n = self.generators;
        let cost = (n < 40).then(|| (1u64 << n).saturating_mul(self.relations.len().max(1) as u64));
        let mut carrier = match cost {
            Some(c) if c <= FILTER_BUDGET => (0u64..1 << n)
                .map(|mask| bits::from_mask(n, mask))
                .filter(|y| self.is_closed(y))
                .collect(),
            _ => self.generate_carrier(),
        };
        bits::canonical_sort(&mut carrier);
        let lattice = SetLattice::new(carrier, |y| self.closure(y))?;
        let eta = (0..n)
            .map(|x| lattice.index_of(&self.closure(&bits::bitset(n, [x]))).expect("closed"))
            .collect();
        Ok(PresentedSupLattice { presentation: self.clone(), lattice, eta })
    }

    /// Carrier as the closure of `{k(∅)} ∪ {k({x})}` under `k(Y ∪ Z)`. Every
    /// closed `Y` equals `k` of the union of its generator images.
    pub fn generate_carrier(&self) -> Vec<FixedBitSet> {
        let n = self.generators;
        let mut seen = HashSet::new();
        let mut family = Vec::new();
        let mut push = |y: FixedBitSet, family: &mut Vec<FixedBitSet>| {
            if seen.insert(y.clone()) {
                family.push(y);
            }
        };
        push(self.closure(&FixedBitSet::with_capacity(n)), &mut family);
        let atoms: Vec<FixedBitSet> = (0..n).map(|x| self.closure(&bits::bitset(n, [x]))).collect();
        for a in &atoms {
            push(a.clone(), &mut family);
        }
        let mut i = 0;
        while i < family.len() {
            for a in &atoms {
                if !a.is_subset(&family[i]) {
                    let mut u = family[i].clone();
                    u.union_with(a);
                    let c = self.closure(&u);
                    push(c, &mut family);
                }
            }
            i += 1;
        }
        family
    }
}

/// Calls `visit` on every clique of the graph `adjacent` on `0..n`, including
/// the empty clique, with members in increasing order.
pub(crate) fn for_each_clique(n: usize, adjacent: impl Fn(usize, usize) -> bool, mut visit: impl FnMut(&[usize])) {
    fn go(
        start: usize,
        n: usize,
        clique: &mut Vec<usize>,
        adjacent: &dyn Fn(usize, usize) -> bool,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        visit(clique);
        for v in start..n {
            if clique.iter().all(|&u| adjacent(u, v)) {
                clique.push(v);
                go(v + 1, n, clique, adjacent, visit);
                clique.pop();
            }
        }
    }
    go(0, n, &mut Vec::new(), &adjacent, &mut visit);
}

/// The carrier of a presentation with its lattice operations.
#[derive(Debug, Clone)]
pub struct PresentedSupLattice {
    presentation: Presentation,
    lattice: SetLattice,
    eta: Vec<usize>,
}

/// A join-preserving map between carriers, given by carrier indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupHom {
    pub map: Vec<usize>,
}

impl PresentedSupLattice {
    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn lattice(&self) -> &SetLattice {
        &self.lattice
    }

    pub fn carrier(&self) -> &[FixedBitSet] {
        self.lattice.members()
    }

    pub fn len(&self) -> usize {
        self.lattice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattice.is_empty()
    }

    /// Carrier index of the image of generator `x`.
    pub fn eta(&self, x: usize) -> usize {
        self.eta[x]
    }

    /// Extends `f` (generator ↦ index in `target`) to `J ↦ ⋁_{x∈J} f(x)`,
    /// after checking that `f` respects the relations. The result is checked
    /// to agree with `f` on generators and to preserve binary and empty joins.
    pub fn extend(&self, f: &[usize], target: &SetLattice) -> Result<SupHom, PresentationError> {
        let n = self.presentation.generators;
        if f.len() != n {
            return Err(PresentationError::MapLength { got: f.len(), expected: n });
        }
        for (i, r) in self.presentation.relations.iter().enumerate() {
            let l = target.join_all(r.left.ones().map(|x| f[x]));
            let rt = target.join_all(r.right.ones().map(|x| f[x]));
            if l != rt {
                return Err(PresentationError::RelationsNotRespected(i));
            }
        }
        let map: Vec<usize> =
            self.carrier().iter().map(|j| target.join_all(j.ones().map(|x| f[x]))).collect();
        for x in 0..n {
            assert_eq!(map[self.eta[x]], f[x], "extension agrees with f on generators");
        }
        assert_eq!(map[self.lattice.bottom()], target.bottom(), "extension preserves the empty join");
        for a in 0..self.len() {
            for b in a..self.len() {
                assert_eq!(
                    map[self.lattice.join(a, b)],
                    target.join(map[a], map[b]),
                    "extension preserves binary joins"
                );
            }
        }
        Ok(SupHom { map })
    }

    /// Every map from the carrier to `target` that preserves all joins and
    /// agrees with `f` on generators. Exhaustive; meant for tiny carriers.
    pub fn join_preserving_extensions(&self, f: &[usize], target: &SetLattice) -> Vec<SupHom> {
        let m = self.len();
        let mut out = Vec::new();
        let mut map = vec![0; m];
        loop {
            let ok = (0..self.presentation.generators).all(|x| map[self.eta[x]] == f[x])
                && map[self.lattice.bottom()] == target.bottom()
                && (0..m).all(|a| (a..m).all(|b| map[self.lattice.join(a, b)] == target.join(map[a], map[b])));
            if ok {
                out.push(SupHom { map: map.clone() });
            }
            // Odometer over target^carrier.
            let mut i = 0;
            loop {
                if i == m {
                    return out;
                }
                map[i] += 1;
                if map[i] < target.len() {
                    break;
                }
                map[i] = 0;
                i += 1;
            }
        }
    }
}

/// A monoid with involution acting on a finite set. The involution is the
/// inverse of the semigroup.
#[derive(Debug, Clone)]
pub struct MonoidAction<'a> {
    pub monoid: &'a InverseSemigroup,
    pub x_size: usize,
    /// `act[m * x_size + x]`.
    pub act: Vec<usize>,
}

impl<'a> MonoidAction<'a> {
    /// The monoid acting on itself by left multiplication.
    pub fn regular(monoid: &'a InverseSemigroup) -> Self {
        let n = monoid.len();
        MonoidAction { monoid, x_size: n, act: monoid.mult_table().to_vec() }
    }

    #[inline]
    pub fn act(&self, m: usize, x: usize) -> usize {
        self.act[m * self.x_size + x]
    }

    /// `A·Y` pointwise.
    pub fn act_sets(&self, a: &FixedBitSet, y: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.x_size);
        for m in a.ones() {
            for x in y.ones() {
                out.insert(self.act(m, x));
            }
        }
        out
    }

    /// `(A\Z, Z/Y)`: the largest `W` with `A·W ⊆ Z` and the largest `B` with
    /// `B·Y ⊆ Z`.
    pub fn residuations(
        &self,
        a: &FixedBitSet,
        y: &FixedBitSet,
        z: &FixedBitSet,
    ) -> (FixedBitSet, FixedBitSet) {
        let left = bits::bitset(
            self.x_size,
            (0..self.x_size).filter(|&x| a.ones().all(|m| z.contains(self.act(m, x)))),
        );
        let right = bits::bitset(
            self.monoid.len(),
            self.monoid.elements().filter(|&m| y.ones().all(|x| z.contains(self.act(m, x)))),
        );
        (left, right)
    }
}

/// Pointwise product of subsets of a monoid.
pub fn mul_sets(m: &InverseSemigroup, a: &FixedBitSet, b: &FixedBitSet) -> FixedBitSet {
    let mut out = FixedBitSet::with_capacity(m.len());
    for x in a.ones() {
        for y in b.ones() {
            out.insert(m.mul(x, y));
        }
    }
    out
}

/// Pointwise involution of a subset.
pub fn star_set(m: &InverseSemigroup, a: &FixedBitSet) -> FixedBitSet {
    bits::bitset(m.len(), a.ones().map(|x| m.inv(x)))
}

/// Relations `R_M` on a monoid and `R_X` on a set it acts on.
#[derive(Debug, Clone)]
pub struct JointlyStablePair<'a> {
    pub action: MonoidAction<'a>,
    pub monoid_relations: Presentation,
    pub action_relations: Presentation,
}

impl<'a> JointlyStablePair<'a> {
    /// Checks the four stability conditions, in the order
    /// `m·R_M`, `R_M*`, `m·R_X`, `R_M·x`.
    pub fn check(&self) -> Result<(), PresentationError> {
        let monoid = self.action.monoid;
        let n = monoid.len();
        let xs = self.action.x_size;
        let rm: HashSet<&Relation> = self.monoid_relations.relations.iter().collect();
        let rx: HashSet<&Relation> = self.action_relations.relations.iter().collect();
        // A relation whose sides coincide is trivially satisfied and never stored.
        let member = |set: &HashSet<&Relation>, r: &Relation| r.left == r.right || set.contains(r);
        for (i, r) in self.monoid_relations.relations.iter().enumerate() {
            for m in 0..n {
                if !member(&rm, &r.map(|x| monoid.mul(m, x), n)) {
                    return Err(PresentationError::NotStable {
                        condition: StabilityCondition::MonoidTranslate,
                        relation: i,
                        by: Some(m),
                    });
                }
            }
            if !member(&rm, &r.map(|x| monoid.inv(x), n)) {
                return Err(PresentationError::NotStable {
                    condition: StabilityCondition::MonoidInvolution,
                    relation: i,
                    by: None,
                });
            }
        }
        for (i, r) in self.action_relations.relations.iter().enumerate() {
            for m in 0..n {
                if !member(&rx, &r.map(|x| self.action.act(m, x), xs)) {
                    return Err(PresentationError::NotStable {
                        condition: StabilityCondition::ActionTranslate,
                        relation: i,
                        by: Some(m),
                    });
                }
            }
        }
        for (i, r) in self.monoid_relations.relations.iter().enumerate() {
            for x in 0..xs {
                if !member(&rx, &r.map(|m| self.action.act(m, x), xs)) {
                    return Err(PresentationError::NotStable {
                        condition: StabilityCondition::ActionEvaluate,
                        relation: i,
                        by: Some(x),
                    });
                }
            }
        }
        Ok(())
    }

    /// Checks that `j` (closure of `R_M`) is a quantic nucleus commuting with
    /// the involution, and that `j(A)·k(Y) ⊆ k(A·Y)` for the closure `k` of
    /// `R_X`. Stability is checked first. Subsets range over all of `P(M)`
    /// and `P(X)` when each has at most 8 points, and otherwise over subsets
    /// of size at most two together with every closed set.
    pub fn verify_nucleus(&self) -> Result<(), PresentationError> {
        self.check()?;
        let monoid = self.action.monoid;
        let j = |a: &FixedBitSet| self.monoid_relations.closure(a);
        let k = |y: &FixedBitSet| self.action_relations.closure(y);
        let subsets_m = test_subsets(monoid.len(), &self.monoid_relations);
        let subsets_x = test_subsets(self.action.x_size, &self.action_relations);
        let show = |s: &FixedBitSet| format!("{{{}}}", s.ones().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
        let closed_m: Vec<FixedBitSet> = subsets_m.iter().map(j).collect();
        for (a, ja) in subsets_m.iter().zip(&closed_m) {
            if j(&star_set(monoid, a)) != star_set(monoid, ja) {
                return Err(PresentationError::NucleusLawFailed {
                    law: "j(A)* = j(A*)",
                    left: show(a),
                    right: show(a),
                });
            }
            for (b, jb) in subsets_m.iter().zip(&closed_m) {
                if !mul_sets(monoid, ja, jb).is_subset(&j(&mul_sets(monoid, a, b))) {
                    return Err(PresentationError::NucleusLawFailed {
                        law: "j(A)j(B) ⊆ j(AB)",
                        left: show(a),
                        right: show(b),
                    });
                }
            }
            for y in &subsets_x {
                if !self.action.act_sets(ja, &k(y)).is_subset(&k(&self.action.act_sets(a, y))) {
                    return Err(PresentationError::NucleusLawFailed {
                        law: "j(A)k(Y) ⊆ k(AY)",
                        left: show(a),
                        right: show(y),
                    });
                }
            }
        }
        Ok(())
    }

    /// The presented module: `⟨X|R_X⟩` with action `U·Y = k(U·Y)` by the
    /// quantale `⟨M|R_M⟩`. Associativity and unitality of the induced
    /// operations are verified exhaustively.
    pub fn presented_module(&self, limit: usize) -> Result<PresentedModule, PresentationError> {
        self.check()?;
        let monoid = self.action.monoid;
        let q = self.monoid_relations.present(limit)?;
        let x = self.action_relations.present(limit)?;
        let (qn, xn) = (q.len(), x.len());
        let mut mult = vec![0; qn * qn];
        for a in 0..qn {
            for b in 0..qn {
                let p = mul_sets(monoid, q.lattice.member(a), q.lattice.member(b));
                mult[a * qn + b] = q.lattice.index_of(&self.monoid_relations.closure(&p)).expect("closed");
            }
        }
        let mut act = vec![0; qn * xn];
        for a in 0..qn {
            for y in 0..xn {
                let p = self.action.act_sets(q.lattice.member(a), x.lattice.member(y));
                act[a * xn + y] = x.lattice.index_of(&self.action_relations.closure(&p)).expect("closed");
            }
        }
        for a in 0..qn {
            for b in 0..qn {
                for y in 0..xn {
                    if act[mult[a * qn + b] * xn + y] != act[a * xn + act[b * xn + y]] {
                        return Err(PresentationError::ActionNotAssociative(a, b, y));
                    }
                }
            }
        }
        Ok(PresentedModule { quantale: q, module: x, mult, act })
    }
}

fn test_subsets(n: usize, p: &Presentation) -> Vec<FixedBitSet> {
    if n <= 8 {
        return (0u64..1 << n).map(|mask| bits::from_mask(n, mask)).collect();
    }
    let mut out = vec![FixedBitSet::with_capacity(n)];
    for a in 0..n {
        for b in a..n {
            out.push(bits::bitset(n, [a, b]));
        }
    }
    out.extend(p.generate_carrier());
    out
}

/// A presented quantale together with a presented module over it.
#[derive(Debug, Clone)]
pub struct PresentedModule {
    pub quantale: PresentedSupLattice,
    pub module: PresentedSupLattice,
    /// Row-major products of quantale carrier indices.
    pub mult: Vec<usize>,
    /// `act[a * |module| + y]`.
    pub act: Vec<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn set(n: usize, items: &[usize]) -> FixedBitSet {
        bits::bitset(n, items.iter().copied())
    }

    fn chain_lattice(k: usize) -> SetLattice {
        let members: Vec<FixedBitSet> = (0..k).map(|i| bits::bitset(k, 0..i)).collect();
        SetLattice::new(members, |s| bits::bitset(k, 0..s.ones().map(|x| x + 1).max().unwrap_or(0))).unwrap()
    }

    #[test]
    fn two_generator_chain() {
        let p = Presentation::new(2, [(set(2, &[0, 1]), set(2, &[1]))]).unwrap();
        let l = p.present(20).unwrap();
        let carrier: Vec<Vec<usize>> = l.carrier().iter().map(|s| s.ones().collect()).collect();
        assert_eq!(carrier, vec![vec![], vec![0], vec![0, 1]]);
    }

    #[test]
    fn no_relations_gives_powerset() {
        let p = Presentation::new(4, []).unwrap();
        assert_eq!(p.present(20).unwrap().len(), 16);
    }

    #[test]
    fn generator_bound() {
        let p = Presentation::new(5, []).unwrap();
        assert_eq!(
            p.present(4).unwrap_err(),
            PresentationError::GeneratorSetTooLarge { generators: 5, limit: 4 }
        );
    }

    #[test]
    fn generated_carrier_matches_filter() {
        let s = catalog::symmetric_inverse_monoid(2).unwrap();
        let p = Presentation::compatible_joins(&s);
        let mut generated = p.generate_carrier();
        bits::canonical_sort(&mut generated);
        assert_eq!(generated, p.present(20).unwrap().carrier());
    }

    #[test]
    fn i2_presentation_has_sixteen_elements() {
        let s = catalog::symmetric_inverse_monoid(2).unwrap();
        assert_eq!(Presentation::compatible_joins(&s).present(20).unwrap().len(), 16);
    }

    #[test]
    fn identity_extension_on_chain() {
        let p = Presentation::new(2, [(set(2, &[0, 1]), set(2, &[1]))]).unwrap();
        let l = p.present(20).unwrap();
        let eta: Vec<usize> = (0..2).map(|x| l.eta(x)).collect();
        let hom = l.extend(&eta, l.lattice()).unwrap();
        assert_eq!(hom.map, (0..l.len()).collect::<Vec<_>>());
    }

    #[test]
    fn relation_violation_detected() {
        let p = Presentation::new(2, [(set(2, &[0, 1]), set(2, &[1]))]).unwrap();
        let l = p.present(20).unwrap();
        let target = chain_lattice(3);
        // f(0) = top, f(1) = middle: ⋁{f0, f1} = top ≠ f1.
        assert_eq!(l.extend(&[2, 1], &target), Err(PresentationError::RelationsNotRespected(0)));
    }

    #[test]
    fn residuation_adjunction_on_i2() {
        let s = catalog::symmetric_inverse_monoid(2).unwrap();
        let act = MonoidAction::regular(&s);
        let n = s.len();
        let e1 = s.element_named("e1").unwrap();
        let z = set(n, &[s.element_named("0").unwrap(), e1]);
        let (left, _) = act.residuations(&set(n, &[e1]), &bits::full(n), &z);
        let brute = bits::bitset(n, (0..n).filter(|&x| z.contains(s.mul(e1, x))));
        assert_eq!(left, brute);
        let (all, _) = act.residuations(&FixedBitSet::with_capacity(n), &bits::full(n), &z);
        assert_eq!(all, bits::full(n));
        let (top, _) = act.residuations(&set(n, &[e1]), &bits::full(n), &bits::full(n));
        assert_eq!(top, bits::full(n));
    }

    #[test]
    fn trivial_nucleus() {
        let s = catalog::symmetric_inverse_monoid(2).unwrap();
        let pair = JointlyStablePair {
            action: MonoidAction::regular(&s),
            monoid_relations: Presentation::new(7, []).unwrap(),
            action_relations: Presentation::new(7, []).unwrap(),
        };
        pair.verify_nucleus().unwrap();
    }

    #[test]
    fn unstable_relation_rejected() {
        let s = catalog::symmetric_inverse_monoid(2).unwrap();
        let n = s.len();
        let e1 = s.element_named("e1").unwrap();
        let e2 = s.element_named("e2").unwrap();
        // ({e1}, {e2}) translated by b yields ({b}, {0}), which is absent.
        let r = Presentation::new(n, [(set(n, &[e1]), set(n, &[e2]))]).unwrap();
        let pair = JointlyStablePair {
            action: MonoidAction::regular(&s),
            monoid_relations: r.clone(),
            action_relations: r,
        };
        assert!(matches!(
            pair.verify_nucleus(),
            Err(PresentationError::NotStable { condition: StabilityCondition::MonoidTranslate, .. })
        ));
    }
}
