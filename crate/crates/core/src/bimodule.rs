//! Biactions with inner products, and equivalence bimodules.
//!
//! A biaction of `(S, T)` on `X` carries a left action, a right action, and
//! the inner products `⟨−,−⟩: X×X → S` and `[−,−]: X×X → T`, all as full
//! tables. Every axiom and each derived identity is checked exhaustively.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{ActionError, SupportedAction};
use crate::bits;
use crate::presentation::for_each_clique;
use crate::pseudogroup::Pseudogroup;
use crate::semigroup::{Element, InverseSemigroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BimoduleError {
    #[error("the set X is empty")]
    EmptyCarrier,
    #[error("field `{field}` has the wrong shape")]
    Shape { field: &'static str },
    #[error("field `{field}`: entry ({row}, {col}) is out of range")]
    OutOfRange { field: &'static str, row: usize, col: usize },
    #[error("the left action is not associative at ({0}, {1}, {2})")]
    LeftNotAction(usize, usize, usize),
    #[error("the right action is not associative at ({0}, {1}, {2})")]
    RightNotAction(usize, usize, usize),
    #[error("the actions do not commute at (s = {0}, x = {1}, t = {2})")]
    ActionsDoNotCommute(usize, usize, usize),
    #[error("axiom BA{axiom} fails at ({a}, {b}, {c})")]
    AxiomFailed { axiom: u8, a: usize, b: usize, c: usize },
    #[error("derived law ({law}) fails at ({a}, {b}, {c})")]
    DerivedLawFailed { law: u8, a: usize, b: usize, c: usize },
    #[error("derived support fails: {0}")]
    Support(ActionError),
    #[error("{0} and {1} have idempotent inner products but are not compatible")]
    IdempotentPairNotCompatible(usize, usize),
    #[error("the image of the {side} inner product is not an ideal")]
    ImageNotIdeal { side: &'static str },
    #[error("the left and right orders on X disagree at ({0}, {1})")]
    OrderMismatch(usize, usize),
    #[error("X has no least element")]
    NoBottom,
    #[error("compatible elements {0} and {1} have no join")]
    JoinMissing(usize, usize),
    #[error("distributivity {kind} fails in law {law} at ({a}, {b}, {c})")]
    DistributivityFails { kind: &'static str, law: u8, a: usize, b: usize, c: usize },
    #[error("covering fails on the left: ⋁p(x) = {got}, expected {expected}")]
    CoveringFailsLeft { got: Element, expected: Element },
    #[error("covering fails on the right: ⋁q(x) = {got}, expected {expected}")]
    CoveringFailsRight { got: Element, expected: Element },
    #[error("the join closure of the {side} inner-product image is not the whole pseudogroup")]
    ImageNotCovering { side: &'static str },
}

/// Raw tables of a biaction, as read from a bimodule file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiactionTables {
    pub x_size: usize,
    /// `lact[s][x]`.
    pub lact: Vec<Vec<usize>>,
    /// `ract[x][t]`.
    pub ract: Vec<Vec<usize>>,
    /// `inner_s[x][y] = ⟨x,y⟩`.
    pub inner_s: Vec<Vec<usize>>,
    /// `inner_t[x][y] = [x,y]`.
    pub inner_t: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

/// A validated `(S, T)`-biaction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Biaction {
    s: InverseSemigroup,
    t: InverseSemigroup,
    x_size: usize,
    lact: Vec<usize>,
    ract: Vec<usize>,
    inner_s: Vec<Element>,
    inner_t: Vec<Element>,
    names: Option<Vec<String>>,
}

fn flatten(
    field: &'static str,
    rows: &[Vec<usize>],
    shape: (usize, usize),
    bound: usize,
) -> Result<Vec<usize>, BimoduleError> {
    if rows.len() != shape.0 || rows.iter().any(|r| r.len() != shape.1) {
        return Err(BimoduleError::Shape { field });
    }
    for (row, r) in rows.iter().enumerate() {
        if let Some(col) = r.iter().position(|&v| v >= bound) {
            return Err(BimoduleError::OutOfRange { field, row, col });
        }
    }
    Ok(rows.iter().flatten().copied().collect())
}

impl Biaction {
    /// Checks the action laws, the seven axioms, the derived laws relating
    /// inner products to the actions, both supports, and the ideal property of
    /// the inner-product images.
    pub fn verify(
        s: &InverseSemigroup,
        t: &InverseSemigroup,
        tables: &BiactionTables,
    ) -> Result<Self, BimoduleError> {
        let xs = tables.x_size;
        if xs == 0 {
            return Err(BimoduleError::EmptyCarrier);
        }
        let b = Biaction {
            s: s.clone(),
            t: t.clone(),
            x_size: xs,
            lact: flatten("lact", &tables.lact, (s.len(), xs), xs)?,
            ract: flatten("ract", &tables.ract, (xs, t.len()), xs)?,
            inner_s: flatten("inner_s", &tables.inner_s, (xs, xs), s.len())?,
            inner_t: flatten("inner_t", &tables.inner_t, (xs, xs), t.len())?,
            names: tables.names.clone(),
        };
        if let Some(names) = &b.names {
            if names.len() != xs {
                return Err(BimoduleError::Shape { field: "names" });
            }
        }
        b.check_actions()?;
        b.check_axioms()?;
        b.check_derived()?;
        Ok(b)
    }

    fn check_actions(&self) -> Result<(), BimoduleError> {
        let (s, t, xs) = (&self.s, &self.t, self.x_size);
        for a in s.elements() {
            for c in s.elements() {
                for x in 0..xs {
                    if self.lact(s.mul(a, c), x) != self.lact(a, self.lact(c, x)) {
                        return Err(BimoduleError::LeftNotAction(a, c, x));
                    }
                }
            }
        }
        for x in 0..xs {
            for a in t.elements() {
                for c in t.elements() {
                    if self.ract(x, t.mul(a, c)) != self.ract(self.ract(x, a), c) {
                        return Err(BimoduleError::RightNotAction(x, a, c));
                    }
                }
            }
        }
        for a in s.elements() {
            for x in 0..xs {
                for c in t.elements() {
                    if self.ract(self.lact(a, x), c) != self.lact(a, self.ract(x, c)) {
                        return Err(BimoduleError::ActionsDoNotCommute(a, x, c));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_axioms(&self) -> Result<(), BimoduleError> {
        let (s, t, xs) = (&self.s, &self.t, self.x_size);
        let fail = |axiom, a, b, c| Err(BimoduleError::AxiomFailed { axiom, a, b, c });
        for x in 0..xs {
            if self.lact(self.inner_s(x, x), x) != x {
                return fail(3, x, x, x);
            }
            if self.ract(x, self.inner_t(x, x)) != x {
                return fail(6, x, x, x);
            }
            for y in 0..xs {
                for a in s.elements() {
                    if self.inner_s(self.lact(a, x), y) != s.mul(a, self.inner_s(x, y)) {
                        return fail(1, a, x, y);
                    }
                }
                if self.inner_s(y, x) != s.inv(self.inner_s(x, y)) {
                    return fail(2, x, y, y);
                }
                for c in t.elements() {
                    if self.inner_t(x, self.ract(y, c)) != t.mul(self.inner_t(x, y), c) {
                        return fail(4, x, y, c);
                    }
                }
                if self.inner_t(y, x) != t.inv(self.inner_t(x, y)) {
                    return fail(5, x, y, y);
                }
                for z in 0..xs {
                    if self.lact(self.inner_s(x, y), z) != self.ract(x, self.inner_t(y, z)) {
                        return fail(7, x, y, z);
                    }
                }
            }
        }
        Ok(())
    }

    fn check_derived(&self) -> Result<(), BimoduleError> {
        let (s, t, xs) = (&self.s, &self.t, self.x_size);
        let fail = |law, a, b, c| Err(BimoduleError::DerivedLawFailed { law, a, b, c });
        for x in 0..xs {
            for y in 0..xs {
                for a in s.elements() {
                    // ⟨x, sy⟩ = ⟨x, y⟩s⁻¹ and [x, sy] = [s⁻¹x, y].
                    if self.inner_s(x, self.lact(a, y)) != s.mul(self.inner_s(x, y), s.inv(a)) {
                        return fail(1, x, y, a);
                    }
                    if self.inner_t(x, self.lact(a, y)) != self.inner_t(self.lact(s.inv(a), x), y) {
                        return fail(4, x, y, a);
                    }
                }
                for c in t.elements() {
                    // [xt, y] = t⁻¹[x, y] and ⟨xt, y⟩ = ⟨x, yt⁻¹⟩.
                    if self.inner_t(self.ract(x, c), y) != t.mul(t.inv(c), self.inner_t(x, y)) {
                        return fail(2, x, y, c);
                    }
                    if self.inner_s(self.ract(x, c), y) != self.inner_s(x, self.ract(y, t.inv(c))) {
                        return fail(3, x, y, c);
                    }
                }
                let (ip, it) = (self.inner_s(x, y), self.inner_t(x, y));
                if s.mul(self.p(x), ip) != ip || s.mul(ip, self.p(y)) != ip {
                    return fail(5, x, y, 0);
                }
                if t.mul(self.q(x), it) != it || t.mul(it, self.q(y)) != it {
                    return fail(6, x, y, 0);
                }
                let both = s.is_idempotent(ip) && t.is_idempotent(it);
                if both && s.mul(ip, ip) != s.mul(self.p(x), self.p(y)) {
                    return fail(7, x, y, 0);
                }
                if both && t.mul(it, it) != t.mul(self.q(x), self.q(y)) {
                    return fail(8, x, y, 0);
                }
                if both && !self.compatible(x, y) {
                    return Err(BimoduleError::IdempotentPairNotCompatible(x, y));
                }
            }
        }
        self.left_action().map_err(BimoduleError::Support)?;
        self.right_action().map_err(BimoduleError::Support)?;
        let image_s = bits::bitset(s.len(), self.inner_s.iter().copied());
        let image_t = bits::bitset(t.len(), self.inner_t.iter().copied());
        let is_ideal = |m: &InverseSemigroup, image: &FixedBitSet| {
            image.ones().all(|i| m.elements().all(|g| image.contains(m.mul(g, i)) && image.contains(m.mul(i, g))))
        };
        if !is_ideal(s, &image_s) {
            return Err(BimoduleError::ImageNotIdeal { side: "left" });
        }
        if !is_ideal(t, &image_t) {
            return Err(BimoduleError::ImageNotIdeal { side: "right" });
        }
        Ok(())
    }

    pub fn left_semigroup(&self) -> &InverseSemigroup {
        &self.s
    }

    pub fn right_semigroup(&self) -> &InverseSemigroup {
        &self.t
    }

    pub fn len(&self) -> usize {
        self.x_size
    }

    pub fn is_empty(&self) -> bool {
        self.x_size == 0
    }

    pub fn name(&self, x: usize) -> String {
        match &self.names {
            Some(names) => names[x].clone(),
            None => x.to_string(),
        }
    }

    pub fn element_named(&self, name: &str) -> Option<usize> {
        self.names.as_ref()?.iter().position(|n| n == name)
    }

    #[inline]
    pub fn lact(&self, s: Element, x: usize) -> usize {
        self.lact[s * self.x_size + x]
    }

    #[inline]
    pub fn ract(&self, x: usize, t: Element) -> usize {
        self.ract[x * self.t.len() + t]
    }

    /// `⟨x, y⟩ ∈ S`.
    #[inline]
    pub fn inner_s(&self, x: usize, y: usize) -> Element {
        self.inner_s[x * self.x_size + y]
    }

    /// `[x, y] ∈ T`.
    #[inline]
    pub fn inner_t(&self, x: usize, y: usize) -> Element {
        self.inner_t[x * self.x_size + y]
    }

    /// `p(x) = ⟨x, x⟩`.
    #[inline]
    pub fn p(&self, x: usize) -> Element {
        self.inner_s(x, x)
    }

    /// `q(x) = [x, x]`.
    #[inline]
    pub fn q(&self, x: usize) -> Element {
        self.inner_t(x, x)
    }

    pub fn left_compatible(&self, x: usize, y: usize) -> bool {
        self.lact(self.p(x), y) == self.lact(self.p(y), x)
    }

    pub fn right_compatible(&self, x: usize, y: usize) -> bool {
        self.ract(x, self.q(y)) == self.ract(y, self.q(x))
    }

    pub fn compatible(&self, x: usize, y: usize) -> bool {
        self.left_compatible(x, y) && self.right_compatible(x, y)
    }

    /// `{x, y, z} = ⟨x, y⟩·z`.
    pub fn heap(&self, x: usize, y: usize, z: usize) -> usize {
        self.lact(self.inner_s(x, y), z)
    }

    /// The underlying supported left `S`-action with support `p`.
    pub fn left_action(&self) -> Result<SupportedAction, ActionError> {
        let support = (0..self.x_size).map(|x| self.p(x)).collect();
        SupportedAction::from_parts(self.s.clone(), self.x_size, self.lact.clone(), support, self.names.clone())
    }

    /// The right `T`-action with support `q`, as the left action `t ⋆ x = x·t⁻¹`.
    pub fn right_action(&self) -> Result<SupportedAction, ActionError> {
        let support = (0..self.x_size).map(|x| self.q(x)).collect();
        SupportedAction::from_right(&self.t, self.x_size, &self.ract, support)
    }

    pub fn to_tables(&self) -> BiactionTables {
        let xs = self.x_size;
        BiactionTables {
            x_size: xs,
            lact: self.s.elements().map(|a| (0..xs).map(|x| self.lact(a, x)).collect()).collect(),
            ract: (0..xs).map(|x| self.t.elements().map(|c| self.ract(x, c)).collect()).collect(),
            inner_s: (0..xs).map(|x| (0..xs).map(|y| self.inner_s(x, y)).collect()).collect(),
            inner_t: (0..xs).map(|x| (0..xs).map(|y| self.inner_t(x, y)).collect()).collect(),
            names: self.names.clone(),
        }
    }

    /// Tables of the `(T, S)`-biaction on `X̄`: `t·x̄ = (x·t⁻¹)‾`,
    /// `x̄·s = (s⁻¹·x)‾`, with the two inner products exchanged.
    pub fn dual_tables(&self) -> BiactionTables {
        let xs = self.x_size;
        let (s, t) = (&self.s, &self.t);
        BiactionTables {
            x_size: xs,
            lact: t.elements().map(|c| (0..xs).map(|x| self.ract(x, t.inv(c))).collect()).collect(),
            ract: (0..xs).map(|x| s.elements().map(|a| self.lact(s.inv(a), x)).collect()).collect(),
            inner_s: (0..xs).map(|x| (0..xs).map(|y| self.inner_t(x, y)).collect()).collect(),
            inner_t: (0..xs).map(|x| (0..xs).map(|y| self.inner_s(x, y)).collect()).collect(),
            names: self.names.clone(),
        }
    }

    /// An isomorphism onto `other` over the same semigroups: a bijection of
    /// carriers commuting with both actions and both inner products. Found
    /// by backtracking, pruned by the supports.
    pub fn isomorphism_to(&self, other: &Biaction) -> Option<Vec<usize>> {
        if self.x_size != other.x_size || self.s.len() != other.s.len() || self.t.len() != other.t.len() {
            return None;
        }
        let n = self.x_size;
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        fn go(b: &Biaction, o: &Biaction, i: usize, map: &mut [usize], used: &mut [bool]) -> bool {
            let n = b.x_size;
            if i == n {
                return (0..n).all(|x| {
                    b.s.elements().all(|a| map[b.lact(a, x)] == o.lact(a, map[x]))
                        && b.t.elements().all(|c| map[b.ract(x, c)] == o.ract(map[x], c))
                });
            }
            for y in 0..n {
                if used[y] || b.p(i) != o.p(y) || b.q(i) != o.q(y) {
                    continue;
                }
                map[i] = y;
                let consistent = (0..=i).all(|x| {
                    o.inner_s(map[x], y) == b.inner_s(x, i)
                        && o.inner_t(map[x], y) == b.inner_t(x, i)
                        && o.inner_s(y, map[x]) == b.inner_s(i, x)
                        && o.inner_t(y, map[x]) == b.inner_t(i, x)
                });
                if consistent {
                    used[y] = true;
                    if go(b, o, i + 1, map, used) {
                        return true;
                    }
                    used[y] = false;
                }
            }
            map[i] = usize::MAX;
            false
        }
        go(self, other, 0, &mut map, &mut used).then_some(map)
    }
}

/// A biaction over pseudogroups with joins of compatible pairs, both
/// distributivity conditions, and both covering conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceBimodule {
    biaction: Biaction,
    s: Pseudogroup,
    t: Pseudogroup,
    join: Vec<Option<usize>>,
    bottom: usize,
}

impl EquivalenceBimodule {
    pub fn verify(s: &Pseudogroup, t: &Pseudogroup, tables: &BiactionTables) -> Result<Self, BimoduleError> {
        let biaction = Biaction::verify(s.base(), t.base(), tables)?;
        Self::from_biaction(s, t, biaction)
    }

    pub fn from_biaction(s: &Pseudogroup, t: &Pseudogroup, b: Biaction) -> Result<Self, BimoduleError> {
        let xs = b.len();
        // x ≤ y as x = p(x)·y, cross-checked with x = y·q(x).
        let mut up = vec![FixedBitSet::with_capacity(xs); xs];
        for x in 0..xs {
            for y in 0..xs {
                let left = b.lact(b.p(x), y) == x;
                if left != (b.ract(y, b.q(x)) == x) {
                    return Err(BimoduleError::OrderMismatch(x, y));
                }
                if left {
                    up[x].insert(y);
                }
            }
        }
        let bottom = (0..xs).find(|&z| up[z].count_ones(..) == xs).ok_or(BimoduleError::NoBottom)?;
        let mut join = vec![None; xs * xs];
        for x in 0..xs {
            for y in x..xs {
                if !b.compatible(x, y) {
                    continue;
                }
                let mut bounds = up[x].clone();
                bounds.intersect_with(&up[y]);
                let least = bounds
                    .ones()
                    .find(|&u| bounds.is_subset(&up[u]))
                    .ok_or(BimoduleError::JoinMissing(x, y))?;
                join[x * xs + y] = Some(least);
                join[y * xs + x] = Some(least);
            }
        }
        let m = EquivalenceBimodule { biaction: b, s: s.clone(), t: t.clone(), join, bottom };
        m.check_distributivity()?;
        m.check_covering()?;
        if xs <= 16 {
            m.check_clique_joins(&up)?;
        }
        Ok(m)
    }

    fn check_distributivity(&self) -> Result<(), BimoduleError> {
        let (b, s, t, xs) = (&self.biaction, &self.s, &self.t, self.len());
        let one = |law, a, bb, c| Err(BimoduleError::DistributivityFails { kind: "I", law, a, b: bb, c });
        let two = |law, a, bb, c| Err(BimoduleError::DistributivityFails { kind: "II", law, a, b: bb, c });
        let z = self.bottom;
        for a in s.elements() {
            if b.lact(a, z) != z {
                return one(1, a, z, z);
            }
        }
        for c in t.elements() {
            if b.ract(z, c) != z {
                return one(3, z, z, c);
            }
        }
        for x in 0..xs {
            if b.lact(s.zero_element(), x) != z {
                return one(2, s.zero_element(), x, x);
            }
            if b.ract(x, t.zero_element()) != z {
                return one(4, x, x, t.zero_element());
            }
            if b.inner_s(z, x) != s.zero_element() {
                return two(1, z, x, x);
            }
            if b.inner_t(x, z) != t.zero_element() {
                return two(2, x, z, z);
            }
        }
        for x in 0..xs {
            for y in x..xs {
                let Some(j) = self.join(x, y) else { continue };
                for a in s.elements() {
                    if self.join(b.lact(a, x), b.lact(a, y)) != Some(b.lact(a, j)) {
                        return one(1, a, x, y);
                    }
                }
                for c in t.elements() {
                    if self.join(b.ract(x, c), b.ract(y, c)) != Some(b.ract(j, c)) {
                        return one(3, x, y, c);
                    }
                }
                for w in 0..xs {
                    if s.join(b.inner_s(x, w), b.inner_s(y, w)) != Some(b.inner_s(j, w)) {
                        return two(1, x, y, w);
                    }
                    if t.join(b.inner_t(w, x), b.inner_t(w, y)) != Some(b.inner_t(w, j)) {
                        return two(2, x, y, w);
                    }
                }
            }
        }
        for a in s.elements() {
            for c in a..s.len() {
                let Some(j) = s.join(a, c) else { continue };
                for x in 0..xs {
                    if self.join(b.lact(a, x), b.lact(c, x)) != Some(b.lact(j, x)) {
                        return one(2, a, c, x);
                    }
                }
            }
        }
        for a in t.elements() {
            for c in a..t.len() {
                let Some(j) = t.join(a, c) else { continue };
                for x in 0..xs {
                    if self.join(b.ract(x, a), b.ract(x, c)) != Some(b.ract(x, j)) {
                        return one(4, x, a, c);
                    }
                }
            }
        }
        Ok(())
    }

    fn check_covering(&self) -> Result<(), BimoduleError> {
        let b = &self.biaction;
        let got = self.s.join_idempotents((0..self.len()).map(|x| b.p(x)));
        if got != self.s.top() {
            return Err(BimoduleError::CoveringFailsLeft { got, expected: self.s.top() });
        }
        let got = self.t.join_idempotents((0..self.len()).map(|x| b.q(x)));
        if got != self.t.top() {
            return Err(BimoduleError::CoveringFailsRight { got, expected: self.t.top() });
        }
        let image_s = bits::bitset(self.s.len(), b.inner_s.iter().copied());
        if self.s.join_closure(&image_s) != bits::full(self.s.len()) {
            return Err(BimoduleError::ImageNotCovering { side: "left" });
        }
        let image_t = bits::bitset(self.t.len(), b.inner_t.iter().copied());
        if self.t.join_closure(&image_t) != bits::full(self.t.len()) {
            return Err(BimoduleError::ImageNotCovering { side: "right" });
        }
        Ok(())
    }

    fn check_clique_joins(&self, up: &[FixedBitSet]) -> Result<(), BimoduleError> {
        let mut failure = None;
        for_each_clique(self.len(), |x, y| self.biaction.compatible(x, y), |clique| {
            if failure.is_some() || clique.len() < 3 {
                return;
            }
            let folded = clique.iter().try_fold(self.bottom, |acc, &x| self.join(acc, x));
            let mut bounds = bits::full(self.len());
            for &x in clique {
                bounds.intersect_with(&up[x]);
            }
            match folded {
                Some(j) if bounds.contains(j) && bounds.is_subset(&up[j]) => {}
                _ => failure = Some(BimoduleError::JoinMissing(clique[0], clique[clique.len() - 1])),
            }
        });
        failure.map_or(Ok(()), Err)
    }

    pub fn biaction(&self) -> &Biaction {
        &self.biaction
    }

    pub fn left(&self) -> &Pseudogroup {
        &self.s
    }

    pub fn right(&self) -> &Pseudogroup {
        &self.t
    }

    pub fn len(&self) -> usize {
        self.biaction.len()
    }

    pub fn is_empty(&self) -> bool {
        self.biaction.is_empty()
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    /// Join of a compatible pair.
    #[inline]
    pub fn join(&self, x: usize, y: usize) -> Option<usize> {
        self.join[x * self.len() + y]
    }

    /// The dual `(T, S)`-equivalence bimodule on `X̄`.
    pub fn dual(&self) -> EquivalenceBimodule {
        let tables = self.biaction.dual_tables();
        EquivalenceBimodule::verify(&self.t, &self.s, &tables).expect("the dual of an equivalence bimodule is one")
    }

    pub fn heap(&self, x: usize, y: usize, z: usize) -> usize {
        self.biaction.heap(x, y, z)
    }
}

impl std::ops::Deref for EquivalenceBimodule {
    type Target = Biaction;

    fn deref(&self) -> &Biaction {
        &self.biaction
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    /// The `(I₁, I₂)` bimodule `{0, e1, b}` built from `I₂` composition:
    /// `S = {0, e1}` acts on the left, `I₂` on the right.
    fn running() -> (Pseudogroup, Pseudogroup, BiactionTables) {
        let i2 = catalog::symmetric_inverse_monoid(2).unwrap();
        let e = |n: &str| i2.element_named(n).unwrap();
        let xs = [e("0"), e("e1"), e("b")];
        let ss = [e("0"), e("e1")];
        let pos = |set: &[usize], v: usize| set.iter().position(|&w| w == v).unwrap();
        let tables = BiactionTables {
            x_size: 3,
            lact: ss.iter().map(|&a| xs.iter().map(|&x| pos(&xs, i2.mul(a, x))).collect()).collect(),
            ract: xs.iter().map(|&x| i2.elements().map(|c| pos(&xs, i2.mul(x, c))).collect()).collect(),
            inner_s: xs
                .iter()
                .map(|&x| xs.iter().map(|&y| pos(&ss, i2.mul(x, i2.inv(y)))).collect())
                .collect(),
            inner_t: xs.iter().map(|&x| xs.iter().map(|&y| i2.mul(i2.inv(x), y)).collect()).collect(),
            names: Some(vec!["0".into(), "e1".into(), "b".into()]),
        };
        let (i1, _) = i2.local(e("e1")).unwrap();
        (i1, i2, tables)
    }

    #[test]
    fn running_bimodule_is_an_equivalence() {
        let (s, t, tables) = running();
        let m = EquivalenceBimodule::verify(&s, &t, &tables).unwrap();
        let x = |n: &str| m.element_named(n).unwrap();
        assert_eq!(m.heap(x("e1"), x("e1"), x("b")), x("b"));
        for y in 0..3 {
            for z in 0..3 {
                assert_eq!(m.heap(x("0"), y, z), x("0"));
            }
            assert_eq!(m.heap(y, y, y), y);
        }
    }

    #[test]
    fn dual_round_trip() {
        let (s, t, tables) = running();
        let m = EquivalenceBimodule::verify(&s, &t, &tables).unwrap();
        let d = m.dual();
        assert_eq!(d.left().len(), 7);
        assert_eq!(d.dual().to_tables(), tables);
    }

    #[test]
    fn one_point_biaction() {
        let s = catalog::symmetric_inverse_monoid(1).unwrap();
        let (z, _) = s.local(s.zero_element()).unwrap();
        let tables = BiactionTables {
            x_size: 1,
            lact: vec![vec![0]],
            ract: vec![vec![0]],
            inner_s: vec![vec![0]],
            inner_t: vec![vec![0]],
            names: None,
        };
        Biaction::verify(&z, &z, &tables).unwrap();
    }

    #[test]
    fn broken_ba7() {
        let (s, t, mut tables) = running();
        // Make ⟨e1, e1⟩ = 0: BA3 survives only if e1 is the zero, so pick a
        // change that breaks only the mixed axiom: swap [e1, b] with [e1, e1].
        tables.inner_t[1][2] = tables.inner_t[1][1];
        let err = Biaction::verify(&s, &t, &tables).unwrap_err();
        assert!(matches!(err, BimoduleError::AxiomFailed { .. }), "{err:?}");
    }

    fn self_tables(s: &InverseSemigroup) -> BiactionTables {
        let rows = |f: &dyn Fn(usize, usize) -> usize| -> Vec<Vec<usize>> {
            s.elements().map(|x| s.elements().map(|y| f(x, y)).collect()).collect()
        };
        BiactionTables {
            x_size: s.len(),
            lact: rows(&|a, x| s.mul(a, x)),
            ract: rows(&|x, c| s.mul(x, c)),
            inner_s: rows(&|x, y| s.mul(x, s.inv(y))),
            inner_t: rows(&|x, y| s.mul(s.inv(x), y)),
            names: None,
        }
    }

    #[test]
    fn self_equivalence_on_i2() {
        let i2 = catalog::symmetric_inverse_monoid(2).unwrap();
        let m = EquivalenceBimodule::verify(&i2, &i2, &self_tables(&i2)).unwrap();
        assert_eq!(m.bottom(), i2.zero_element());
        let d = m.dual();
        assert!(d.isomorphism_to(&m).is_some());
    }

    #[test]
    fn self_dual_over_a_semilattice() {
        let b = catalog::boolean(2).unwrap();
        let m = EquivalenceBimodule::verify(&b, &b, &self_tables(&b)).unwrap();
        assert_eq!(m.dual().to_tables(), m.to_tables());
    }

    #[test]
    fn covering_fails_on_the_right() {
        // X = {0, x} over (I₁, 0 < a < 1) with [x, x] = a.
        let i1 = catalog::symmetric_inverse_monoid(1).unwrap();
        let chain = catalog::chain(3).unwrap();
        let tables = BiactionTables {
            x_size: 2,
            lact: vec![vec![0, 0], vec![0, 1]],
            ract: vec![vec![0, 0, 0], vec![0, 1, 1]],
            inner_s: vec![vec![0, 0], vec![0, 1]],
            inner_t: vec![vec![0, 0], vec![0, 1]],
            names: None,
        };
        let err = EquivalenceBimodule::verify(&i1, &chain, &tables).unwrap_err();
        assert_eq!(err, BimoduleError::CoveringFailsRight { got: 1, expected: 2 });
    }

    #[test]
    fn atlas_reproduces_running_bimodule() {
        let (s, t, tables) = running();
        let m = EquivalenceBimodule::verify(&s, &t, &tables).unwrap();
        let atlas = catalog::atlas_bimodule(1, 2).unwrap();
        assert!(atlas.isomorphism_to(&m).is_some());
    }

    #[test]
    fn atlas_inner_products_are_compositions() {
        let b = catalog::atlas_bimodule(2, 3).unwrap();
        let maps = catalog::PartialInjection::all_between(3, 2);
        let s_maps = catalog::PartialInjection::all(2);
        let t_maps = catalog::PartialInjection::all(3);
        for (x, fx) in maps.iter().enumerate() {
            for (y, fy) in maps.iter().enumerate() {
                assert_eq!(s_maps[b.inner_s(x, y)], fx.compose(&fy.inverse()));
                assert_eq!(t_maps[b.inner_t(x, y)], fx.inverse().compose(fy));
            }
        }
    }
}
