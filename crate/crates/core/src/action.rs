//! Supported actions, pseudogroup modules, and the completion `𝖫(X)`.
//!
//! A supported action carries its order `x ≤ y ⟺ x = p(x)·y` and left
//! compatibility `p(x)·y = p(y)·x` precomputed. A [`PseudoModule`] adds joins of
//! left compatible pairs; as for pseudogroups, the bottom element and binary
//! joins suffice on a finite carrier once the action distributes over them.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits;
use crate::presentation::for_each_clique;
use crate::pseudogroup::Pseudogroup;
use crate::semigroup::{Element, InverseSemigroup};

/// Default bound on the number of left compatible ideals enumerated.
pub const DEFAULT_IDEAL_LIMIT: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("the acted-on set is empty")]
    EmptyCarrier,
    #[error("field `act`: expected {expected} rows, found {got}")]
    ActRows { expected: usize, got: usize },
    #[error("field `act`: row {row} has {got} entries, expected {expected}")]
    ActRowLength { row: usize, expected: usize, got: usize },
    #[error("field `act`: entry [{s}][{x}] = {value} is out of range")]
    ActOutOfRange { s: Element, x: usize, value: usize },
    #[error("field `support`: expected {expected} entries, found {got}")]
    SupportLength { expected: usize, got: usize },
    #[error("field `support`: p({x}) = {value} is not an idempotent")]
    SupportNotIdempotent { x: usize, value: usize },
    #[error("not an action: ({s}·{t})·{x} ≠ {s}·({t}·{x})")]
    NotAction { s: Element, t: Element, x: usize },
    #[error("support law p(x)·x = x fails at x = {x}")]
    SupportLaw1Failed { x: usize },
    #[error("support law p(s·x) = s·p(x)·s⁻¹ fails at s = {s}, x = {x}")]
    SupportLaw2Failed { s: Element, x: usize },
    #[error("the two characterizations of the order disagree on ({0}, {1})")]
    OrderMismatch(usize, usize),
    #[error("left compatibility is not preserved: lemma part {part} fails at ({a}, {b}, {c})")]
    DayFails { part: u8, a: usize, b: usize, c: usize },
    #[error("the action is not pointed")]
    NotPointed,
    #[error("left compatible elements {0} and {1} have no join")]
    MissingJoin(usize, usize),
    #[error("supplied join of {0} and {1} differs from the computed one")]
    JoinMismatch(usize, usize),
    #[error("no least element")]
    NoBottom,
    #[error("the action does not distribute (condition {condition}) at ({a}, {b}, {c})")]
    NotDistributive { condition: u8, a: usize, b: usize, c: usize },
    #[error("support does not preserve the join of {0} and {1}")]
    GrouchoFails(usize, usize),
    #[error("elements {0} and {1} have no meet")]
    MissingMeet(usize, usize),
    #[error("meet with {0} does not distribute over the join of {1} and {2}")]
    ZeppoFails(usize, usize, usize),
    #[error("the identity does not act trivially on {0}")]
    NotUnital(usize),
    #[error("the minimum is not fixed by the action")]
    NotPointedModule,
    #[error("not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("more than {limit} left compatible ideals")]
    TooLarge { limit: usize },
    #[error("s = {s} sends ideal {ideal} outside the carrier")]
    NotClosed { s: Element, ideal: usize },
    #[error("expected a unique extension, found {0}")]
    NotUnique(usize),
    #[error("the semigroups differ in size: {0} vs {1}")]
    SizeMismatch(usize, usize),
}

/// Raw tables of a supported action, as read from an action file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionTables {
    pub x_size: usize,
    /// `act[s][x]`.
    pub act: Vec<Vec<usize>>,
    pub support: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

/// A validated supported left action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportedAction {
    s: InverseSemigroup,
    x_size: usize,
    act: Vec<usize>,
    support: Vec<Element>,
    zero: Option<usize>,
    /// `up[x]` = elements `y` with `x ≤ y`.
    up: Vec<FixedBitSet>,
    down: Vec<FixedBitSet>,
    compatible: Vec<FixedBitSet>,
    names: Option<Vec<String>>,
}

impl SupportedAction {
    /// Validates raw tables: shape, the action law, both support laws, and
    /// the agreement of the two descriptions of the order.
    pub fn validate(s: &InverseSemigroup, tables: &ActionTables) -> Result<Self, ActionError> {
        let xs = tables.x_size;
        if xs == 0 {
            return Err(ActionError::EmptyCarrier);
        }
        if tables.act.len() != s.len() {
            return Err(ActionError::ActRows { expected: s.len(), got: tables.act.len() });
        }
        let mut act = Vec::with_capacity(s.len() * xs);
        for (row, entries) in tables.act.iter().enumerate() {
            if entries.len() != xs {
                return Err(ActionError::ActRowLength { row, expected: xs, got: entries.len() });
            }
            for (x, &value) in entries.iter().enumerate() {
                if value >= xs {
                    return Err(ActionError::ActOutOfRange { s: row, x, value });
                }
                act.push(value);
            }
        }
        if tables.support.len() != xs {
            return Err(ActionError::SupportLength { expected: xs, got: tables.support.len() });
        }
        for (x, &value) in tables.support.iter().enumerate() {
            if value >= s.len() || !s.is_idempotent(value) {
                return Err(ActionError::SupportNotIdempotent { x, value });
            }
        }
        Self::from_parts(s.clone(), xs, act, tables.support.clone(), tables.names.clone())
    }

    pub(crate) fn from_parts(
        s: InverseSemigroup,
        x_size: usize,
        act: Vec<usize>,
        support: Vec<Element>,
        names: Option<Vec<String>>,
    ) -> Result<Self, ActionError> {
        let xs = x_size;
        let a = |g: usize, x: usize| act[g * xs + x];
        for g in s.elements() {
            for h in s.elements() {
                let gh = s.mul(g, h);
                for x in 0..xs {
                    if a(gh, x) != a(g, a(h, x)) {
                        return Err(ActionError::NotAction { s: g, t: h, x });
                    }
                }
            }
        }
        for x in 0..xs {
            if a(support[x], x) != x {
                return Err(ActionError::SupportLaw1Failed { x });
            }
            for g in s.elements() {
                if support[a(g, x)] != s.mul_all(&[g, support[x], s.inv(g)]) {
                    return Err(ActionError::SupportLaw2Failed { s: g, x });
                }
            }
        }
        let idempotents = s.idempotents();
        let mut up = vec![FixedBitSet::with_capacity(xs); xs];
        let mut down = vec![FixedBitSet::with_capacity(xs); xs];
        let mut compatible = vec![FixedBitSet::with_capacity(xs); xs];
        for x in 0..xs {
            for y in 0..xs {
                let by_support = a(support[x], y) == x;
                let by_idempotent = idempotents.iter().any(|&e| a(e, y) == x);
                if by_support != by_idempotent {
                    return Err(ActionError::OrderMismatch(x, y));
                }
                if by_support {
                    up[x].insert(y);
                    down[y].insert(x);
                }
                if a(support[x], y) == a(support[y], x) {
                    compatible[x].insert(y);
                }
            }
        }
        let zero = s.zero().and_then(|z| {
            let candidate = a(z, 0);
            let fixed = (0..xs).all(|x| a(z, x) == candidate) && s.elements().all(|g| a(g, candidate) == candidate);
            (fixed && up[candidate].count_ones(..) == xs).then_some(candidate)
        });
        Ok(SupportedAction { s, x_size, act, support, zero, up, down, compatible, names })
    }

    /// `S` acting on itself by left multiplication with `p(x) = xx⁻¹`.
    pub fn regular(s: &InverseSemigroup) -> Self {
        let n = s.len();
        let support = s.elements().map(|x| s.r(x)).collect();
        Self::from_parts(s.clone(), n, s.mult_table().to_vec(), support, s.names().map(<[String]>::to_vec))
            .expect("left multiplication is a supported action")
    }

    /// Left multiplication on a left ideal, with `p(x) = xx⁻¹`. Returns
    /// `None` if `ideal` is not closed under left multiplication.
    pub fn left_ideal(s: &InverseSemigroup, ideal: &[Element]) -> Option<Self> {
        let mut position = vec![usize::MAX; s.len()];
        for (i, &x) in ideal.iter().enumerate() {
            position[x] = i;
        }
        let mut act = Vec::with_capacity(s.len() * ideal.len());
        for g in s.elements() {
            for &x in ideal {
                let p = position[s.mul(g, x)];
                if p == usize::MAX {
                    return None;
                }
                act.push(p);
            }
        }
        let support = ideal.iter().map(|&x| s.r(x)).collect();
        let names = s.names().map(|names| ideal.iter().map(|&x| names[x].clone()).collect());
        Some(Self::from_parts(s.clone(), ideal.len(), act, support, names).expect("left ideals carry a supported action"))
    }

    /// `E(S)` under conjugation `s·e = ses⁻¹` with `p(e) = e`.
    pub fn conjugation(s: &InverseSemigroup) -> Self {
        let idem = s.idempotents();
        let mut position = vec![usize::MAX; s.len()];
        for (i, &e) in idem.iter().enumerate() {
            position[e] = i;
        }
        let act = s
            .elements()
            .flat_map(|g| idem.iter().map(move |&e| (g, e)))
            .map(|(g, e)| position[s.mul_all(&[g, e, s.inv(g)])])
            .collect();
        let names = s.names().map(|names| idem.iter().map(|&e| names[e].clone()).collect());
        Self::from_parts(s.clone(), idem.len(), act, idem.clone(), names).expect("conjugation is a supported action")
    }

    /// The left action `t ⋆ x = x·t⁻¹` of `T` encoding a right action, with
    /// the given support. The right action is read as `ract[x * |T| + t]`.
    pub fn from_right(
        t: &InverseSemigroup,
        x_size: usize,
        ract: &[usize],
        support: Vec<Element>,
    ) -> Result<Self, ActionError> {
        let n = t.len();
        let act = t
            .elements()
            .flat_map(|g| (0..x_size).map(move |x| (g, x)))
            .map(|(g, x)| ract[x * n + t.inv(g)])
            .collect();
        Self::from_parts(t.clone(), x_size, act, support, None)
    }

    /// The same action viewed over an isomorphic semigroup `target`, where
    /// `phi[g]` is the element of this action's semigroup matching `g`.
    pub fn transport(&self, target: &InverseSemigroup, phi: &[Element]) -> Result<Self, ActionError> {
        if target.len() != self.s.len() || phi.len() != target.len() {
            return Err(ActionError::SizeMismatch(target.len(), self.s.len()));
        }
        let mut inverse = vec![usize::MAX; phi.len()];
        for (g, &h) in phi.iter().enumerate() {
            inverse[h] = g;
        }
        let act = target
            .elements()
            .flat_map(|g| (0..self.x_size).map(move |x| (g, x)))
            .map(|(g, x)| self.act(phi[g], x))
            .collect();
        let support = self.support.iter().map(|&e| inverse[e]).collect();
        Self::from_parts(target.clone(), self.x_size, act, support, self.names.clone())
    }

    pub fn semigroup(&self) -> &InverseSemigroup {
        &self.s
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

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn element_named(&self, name: &str) -> Option<usize> {
        self.names.as_ref()?.iter().position(|n| n == name)
    }

    #[inline]
    pub fn act(&self, s: Element, x: usize) -> usize {
        self.act[s * self.x_size + x]
    }

    #[inline]
    pub fn support(&self, x: usize) -> Element {
        self.support[x]
    }

    /// The minimum element fixed by the action and produced by the zero of
    /// `S`, when there is one.
    pub fn pointed_zero(&self) -> Option<usize> {
        self.zero
    }

    /// `x ≤ y` iff `x = p(x)·y`.
    #[inline]
    pub fn module_order(&self, x: usize, y: usize) -> bool {
        self.up[x].contains(y)
    }

    /// `x ≤ y` iff `x = e·y` for an idempotent `e`.
    pub fn module_order_via_idempotent(&self, x: usize, y: usize) -> bool {
        self.s.idempotent_set().ones().any(|e| self.act(e, y) == x)
    }

    pub fn down_set(&self, x: usize) -> &FixedBitSet {
        &self.down[x]
    }

    pub fn up_set(&self, x: usize) -> &FixedBitSet {
        &self.up[x]
    }

    /// `p(x)·y = p(y)·x`.
    #[inline]
    pub fn left_compatible(&self, x: usize, y: usize) -> bool {
        self.compatible[x].contains(y)
    }

    /// Both parts of the lemma that left compatibility is preserved by the
    /// action: `x ∼ y ⟹ sx ∼ sy` and `s ∼ t ⟹ sx ∼ tx`.
    pub fn check_day(&self) -> Result<(), ActionError> {
        let s = &self.s;
        for x in 0..self.x_size {
            for y in 0..self.x_size {
                if !self.left_compatible(x, y) {
                    continue;
                }
                for g in s.elements() {
                    if !self.left_compatible(self.act(g, x), self.act(g, y)) {
                        return Err(ActionError::DayFails { part: 1, a: x, b: y, c: g });
                    }
                }
            }
        }
        for g in s.elements() {
            for h in s.elements() {
                if !s.compatible(g, h).is_left() {
                    continue;
                }
                for x in 0..self.x_size {
                    if !self.left_compatible(self.act(g, x), self.act(h, x)) {
                        return Err(ActionError::DayFails { part: 2, a: g, b: h, c: x });
                    }
                }
            }
        }
        Ok(())
    }

    /// Checks that `alpha: X → Y` commutes with the actions and supports.
    pub fn check_homomorphism(&self, target: &SupportedAction, alpha: &[usize]) -> Result<(), ActionError> {
        if alpha.len() != self.x_size || alpha.iter().any(|&y| y >= target.len()) {
            return Err(ActionError::NotHomomorphism("map has the wrong shape".to_string()));
        }
        for x in 0..self.x_size {
            if target.support(alpha[x]) != self.support(x) {
                return Err(ActionError::NotHomomorphism(format!("support at {x}")));
            }
            for g in self.s.elements() {
                if alpha[self.act(g, x)] != target.act(g, alpha[x]) {
                    return Err(ActionError::NotHomomorphism(format!("equivariance at ({g}, {x})")));
                }
            }
        }
        Ok(())
    }

    /// Raw tables of this action.
    pub fn to_tables(&self) -> ActionTables {
        ActionTables {
            x_size: self.x_size,
            act: self.s.elements().map(|g| (0..self.x_size).map(|x| self.act(g, x)).collect()).collect(),
            support: self.support.clone(),
            names: self.names.clone(),
        }
    }
}

/// A left module over a pseudogroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoModule {
    action: SupportedAction,
    s: Pseudogroup,
    join: Vec<Option<usize>>,
    meet: Vec<usize>,
    bottom: usize,
}

impl PseudoModule {
    /// Computes the joins of left compatible pairs from the order, compares
    /// them with `supplied` if given, and checks every module law: both
    /// distributivity conditions, pointedness, unitality, support preserving
    /// joins, existence of meets, and meets distributing over joins.
    pub fn new(
        s: &Pseudogroup,
        action: SupportedAction,
        supplied: Option<&[Option<usize>]>,
    ) -> Result<Self, ActionError> {
        let xs = action.len();
        let bottom = (0..xs)
            .find(|&b| action.up_set(b).count_ones(..) == xs)
            .ok_or(ActionError::NoBottom)?;
        let mut join = vec![None; xs * xs];
        for x in 0..xs {
            for y in x..xs {
                if !action.left_compatible(x, y) {
                    continue;
                }
                let mut bounds = action.up_set(x).clone();
                bounds.intersect_with(action.up_set(y));
                let least = bounds
                    .ones()
                    .find(|&u| bounds.is_subset(action.up_set(u)))
                    .ok_or(ActionError::MissingJoin(x, y))?;
                join[x * xs + y] = Some(least);
                join[y * xs + x] = Some(least);
            }
        }
        if let Some(supplied) = supplied {
            for x in 0..xs {
                for y in 0..xs {
                    if supplied.get(x * xs + y).copied().flatten() != join[x * xs + y] {
                        return Err(ActionError::JoinMismatch(x, y));
                    }
                }
            }
        }
        let module = PseudoModule { action, s: s.clone(), join, meet: Vec::new(), bottom };
        module.check_laws()
    }

    fn check_laws(mut self) -> Result<Self, ActionError> {
        let xs = self.len();
        let a = &self.action;
        let s = &self.s;
        a.check_day()?;
        for g in s.elements() {
            if a.act(g, self.bottom) != self.bottom {
                return Err(ActionError::NotPointedModule);
            }
        }
        for x in 0..xs {
            if a.act(s.zero_element(), x) != self.bottom {
                return Err(ActionError::NotPointedModule);
            }
            if a.act(s.top(), x) != x {
                return Err(ActionError::NotUnital(x));
            }
        }
        if a.support(self.bottom) != s.zero_element() {
            return Err(ActionError::GrouchoFails(self.bottom, self.bottom));
        }
        for x in 0..xs {
            for y in x..xs {
                let Some(j) = self.join(x, y) else { continue };
                for g in s.elements() {
                    if self.join(a.act(g, x), a.act(g, y)) != Some(a.act(g, j)) {
                        return Err(ActionError::NotDistributive { condition: 3, a: g, b: x, c: y });
                    }
                }
                if s.join(a.support(x), a.support(y)) != Some(a.support(j)) {
                    return Err(ActionError::GrouchoFails(x, y));
                }
            }
        }
        for g in s.elements() {
            for h in g..s.len() {
                let Some(j) = s.join(g, h) else { continue };
                for x in 0..xs {
                    if self.join(a.act(g, x), a.act(h, x)) != Some(a.act(j, x)) {
                        return Err(ActionError::NotDistributive { condition: 4, a: g, b: h, c: x });
                    }
                }
            }
        }
        let mut meet = vec![self.bottom; xs * xs];
        for x in 0..xs {
            for y in x..xs {
                let mut lower = a.down_set(x).clone();
                lower.intersect_with(a.down_set(y));
                let mut m = self.bottom;
                for z in lower.ones() {
                    m = self.join(m, z).ok_or(ActionError::MissingMeet(x, y))?;
                }
                if !lower.contains(m) {
                    return Err(ActionError::MissingMeet(x, y));
                }
                meet[x * xs + y] = m;
                meet[y * xs + x] = m;
            }
        }
        for x in 0..xs {
            for y in 0..xs {
                for z in y..xs {
                    let Some(j) = self.join(y, z) else { continue };
                    let split = self.join(meet[x * xs + y], meet[x * xs + z]);
                    if split != Some(meet[x * xs + j]) {
                        return Err(ActionError::ZeppoFails(x, y, z));
                    }
                }
            }
        }
        self.meet = meet;
        if xs <= 16 {
            self.check_clique_joins()?;
        }
        Ok(self)
    }

    /// Every left compatible subset has its folded join as least upper bound.
    fn check_clique_joins(&self) -> Result<(), ActionError> {
        let mut failure = None;
        for_each_clique(self.len(), |x, y| self.action.left_compatible(x, y), |clique| {
            if failure.is_some() {
                return;
            }
            let folded = clique.iter().try_fold(self.bottom, |acc, &x| self.join(acc, x));
            let mut bounds = bits::full(self.len());
            for &x in clique {
                bounds.intersect_with(self.action.up_set(x));
            }
            match folded {
                Some(j) if bounds.contains(j) && bounds.is_subset(self.action.up_set(j)) => {}
                _ => failure = Some(ActionError::MissingJoin(clique[0], *clique.last().unwrap_or(&0))),
            }
        });
        failure.map_or(Ok(()), Err)
    }

    pub fn action(&self) -> &SupportedAction {
        &self.action
    }

    pub fn pseudogroup(&self) -> &Pseudogroup {
        &self.s
    }

    pub fn len(&self) -> usize {
        self.action.len()
    }

    pub fn is_empty(&self) -> bool {
        self.action.is_empty()
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    #[inline]
    pub fn act(&self, s: Element, x: usize) -> usize {
        self.action.act(s, x)
    }

    #[inline]
    pub fn support(&self, x: usize) -> Element {
        self.action.support(x)
    }

    #[inline]
    pub fn join(&self, x: usize, y: usize) -> Option<usize> {
        self.join[x * self.len() + y]
    }

    /// Join of a left compatible family; `None` if some pair is incompatible.
    pub fn join_of(&self, items: impl IntoIterator<Item = usize>) -> Option<usize> {
        let items: Vec<usize> = items.into_iter().collect();
        for (i, &x) in items.iter().enumerate() {
            if items[i + 1..].iter().any(|&y| !self.action.left_compatible(x, y)) {
                return None;
            }
        }
        items.iter().try_fold(self.bottom, |acc, &x| self.join(acc, x))
    }

    #[inline]
    pub fn meet(&self, x: usize, y: usize) -> usize {
        self.meet[x * self.len() + y]
    }

    pub fn join_table(&self) -> &[Option<usize>] {
        &self.join
    }

    /// A module homomorphism: equivariant, support preserving, and preserving
    /// the bottom and binary left compatible joins.
    pub fn check_homomorphism(&self, target: &PseudoModule, beta: &[usize]) -> Result<(), ActionError> {
        self.action.check_homomorphism(&target.action, beta)?;
        if beta[self.bottom] != target.bottom {
            return Err(ActionError::NotHomomorphism("bottom".to_string()));
        }
        for x in 0..self.len() {
            for y in x..self.len() {
                if let Some(j) = self.join(x, y) {
                    if target.join(beta[x], beta[y]) != Some(beta[j]) {
                        return Err(ActionError::NotHomomorphism(format!("join of {x} and {y}")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `𝖫(A)` with the principal-ideal map `ι`.
#[derive(Debug, Clone)]
pub struct ScheinCompletion {
    pub module: PseudoModule,
    /// The saturated left compatible order-ideals, indexed as the module's
    /// elements.
    pub ideals: Vec<FixedBitSet>,
    /// `iota[x]` = index of the saturation of `x↓`.
    pub iota: Vec<usize>,
}

/// Builds `𝖫(A)`: the nonempty saturated left compatible order-ideals of a
/// pointed action, acted on elementwise (then saturated), with
/// `p̂(I) = ⋁_{x∈I} p(x)`.
pub fn schein_complete(s: &Pseudogroup, a: &SupportedAction) -> Result<ScheinCompletion, ActionError> {
    schein_complete_with(s, a, DEFAULT_IDEAL_LIMIT)
}

pub fn schein_complete_with(
    s: &Pseudogroup,
    a: &SupportedAction,
    limit: usize,
) -> Result<ScheinCompletion, ActionError> {
    a.pointed_zero().ok_or(ActionError::NotPointed)?;
    let xs = a.len();
    let mut ideals = Vec::new();
    let mut too_large = false;
    for_each_clique(xs, |x, y| a.left_compatible(x, y), |clique| {
        if too_large || clique.is_empty() {
            return;
        }
        let set = bits::bitset(xs, clique.iter().copied());
        if clique.iter().all(|&x| a.down_set(x).is_subset(&set)) && saturate(s, a, &set) == set {
            ideals.push(set);
            too_large = ideals.len() > limit;
        }
    });
    if too_large {
        return Err(ActionError::TooLarge { limit });
    }
    bits::canonical_sort(&mut ideals);
    let index: std::collections::HashMap<FixedBitSet, usize> =
        ideals.iter().enumerate().map(|(i, set)| (set.clone(), i)).collect();
    let m = ideals.len();
    let mut act = Vec::with_capacity(s.len() * m);
    for g in s.elements() {
        for (i, ideal) in ideals.iter().enumerate() {
            let image = saturate(s, a, &bits::bitset(xs, ideal.ones().map(|x| a.act(g, x))));
            act.push(*index.get(&image).ok_or(ActionError::NotClosed { s: g, ideal: i })?);
        }
    }
    let support = ideals.iter().map(|ideal| s.join_idempotents(ideal.ones().map(|x| a.support(x)))).collect();
    let names = Some(ideals.iter().map(|ideal| ideal_name(a, ideal)).collect());
    let action = SupportedAction::from_parts(s.base().clone(), m, act, support, names)?;
    let mut supplied = vec![None; m * m];
    for i in 0..m {
        for j in 0..m {
            if action.left_compatible(i, j) {
                let mut union = ideals[i].clone();
                union.union_with(&ideals[j]);
                supplied[i * m + j] = index.get(&saturate(s, a, &union)).copied();
            }
        }
    }
    let module = PseudoModule::new(s, action, Some(&supplied))?;
    let iota = (0..xs)
        .map(|x| index.get(&saturate(s, a, a.down_set(x))).copied().ok_or(ActionError::NotClosed { s: s.top(), ideal: x }))
        .collect::<Result<Vec<usize>, _>>()?;
    a.check_homomorphism(module.action(), &iota)?;
    Ok(ScheinCompletion { module, ideals, iota })
}

/// Adds every `y` whose support is the join of the supports of the members
/// of `set` below it, until stable. Any module identifies such `y` with the
/// join of those members, so the completion only keeps saturated ideals.
fn saturate(s: &Pseudogroup, a: &SupportedAction, set: &FixedBitSet) -> FixedBitSet {
    let mut current = set.clone();
    loop {
        let next = bits::bitset(
            a.len(),
            (0..a.len()).filter(|&y| {
                let mut below = a.down_set(y).clone();
                below.intersect_with(&current);
                s.join_idempotents(below.ones().map(|z| a.support(z))) == a.support(y)
            }),
        );
        if next == current {
            return current;
        }
        current = next;
    }
}

fn ideal_name(a: &SupportedAction, ideal: &FixedBitSet) -> String {
    let parts: Vec<String> = ideal.ones().map(|x| a.name(x)).collect();
    format!("{{{}}}", parts.join(","))
}

/// Extends a homomorphism `alpha: A → M` along `ι` to
/// `β(I) = ⋁_{x∈I} α(x)` and checks that `β` is a module homomorphism with
/// `β∘ι = α`.
pub fn universal_extend(
    completion: &ScheinCompletion,
    source: &SupportedAction,
    alpha: &[usize],
    target: &PseudoModule,
) -> Result<Vec<usize>, ActionError> {
    source.check_homomorphism(target.action(), alpha)?;
    let beta = completion
        .ideals
        .iter()
        .map(|ideal| {
            target
                .join_of(ideal.ones().map(|x| alpha[x]))
                .ok_or_else(|| ActionError::NotHomomorphism("images are not left compatible".to_string()))
        })
        .collect::<Result<Vec<usize>, _>>()?;
    for (x, &i) in completion.iota.iter().enumerate() {
        if beta[i] != alpha[x] {
            return Err(ActionError::NotHomomorphism(format!("β∘ι differs from α at {x}")));
        }
    }
    completion.module.check_homomorphism(target, &beta)?;
    Ok(beta)
}

/// Every module homomorphism `𝖫(A) → M` with `β∘ι = α`, by exhaustive search.
pub fn extensions_of(completion: &ScheinCompletion, alpha: &[usize], target: &PseudoModule) -> Vec<Vec<usize>> {
    let m = completion.module.len();
    let mut out = Vec::new();
    let mut beta = vec![0; m];
    loop {
        let agrees = completion.iota.iter().enumerate().all(|(x, &i)| beta[i] == alpha[x]);
        if agrees && completion.module.check_homomorphism(target, &beta).is_ok() {
            out.push(beta.clone());
        }
        let mut i = 0;
        loop {
            if i == m {
                return out;
            }
            beta[i] += 1;
            if beta[i] < target.len() {
                break;
            }
            beta[i] = 0;
            i += 1;
        }
    }
}
