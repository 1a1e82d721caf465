//! Sheaves on finite inverse quantal frames.
//!
//! A `Q`-sheaf is a finite distributive lattice `X` with a join-preserving
//! unital left `Q`-action. Its support is not part of the input: it is the
//! least `b ∈ Q_0` with `x ≤ b·1`, and a supplied support is compared against
//! it. Local sections are computed from the support.
//!
//! Right sheaves over `R` are handled as left sheaves for `b ⋆ x = x·b*`.
//! With this convention the right inner product `[x, y]` is a left inner
//! product for `⋆` in the usual sense.

use std::collections::HashMap;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{ActionError, PseudoModule, SupportedAction};
use crate::bimodule::{BiactionTables, BimoduleError, EquivalenceBimodule};
use crate::bits;
use crate::lattice::{LatticeError, OrderIdealClosure, OrderLattice, SetLattice};
use crate::quantale::{QuantalFrame, DEFAULT_CARRIER_LIMIT};
use crate::semigroup::Element;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SheafError {
    #[error("field `{field}` has the wrong shape")]
    Shape { field: &'static str },
    #[error("field `{field}`: entry ({row}, {col}) is out of range")]
    OutOfRange { field: &'static str, row: usize, col: usize },
    #[error("X is not a lattice: {0}")]
    Lattice(LatticeError),
    #[error("X is not a frame: distributivity fails at ({0}, {1}, {2})")]
    NotFrame(usize, usize, usize),
    #[error("module law `{law}` fails at ({a}, {b}, {x})")]
    NotModule { law: &'static str, a: usize, b: usize, x: usize },
    #[error("{x} has no support: no least b in Q_0 with x ≤ b·1")]
    NoSupport { x: usize },
    #[error("supplied support of {x} is {supplied}, computed {computed}")]
    SupportMismatch { x: usize, supplied: usize, computed: usize },
    #[error("Q_0-equivariance fails: spp({b}·{x}) ≠ {b}·spp({x})")]
    NotEquivariant { b: usize, x: usize },
    #[error("support condition fails: spp({x})·{x} ≠ {x}")]
    SupportConditionFails { x: usize },
    #[error("local sections do not cover the top")]
    CoverFails,
    #[error("sections {0} and {1} violate γ ≤ γ' ⟺ γ = spp(γ)·γ'")]
    SectionOrder(usize, usize),
    #[error("spp({s}·{x}) ≠ {s}·spp({x})·{s}* for a partial unit")]
    ConjugationFails { s: usize, x: usize },
    #[error("local sections are not downward closed: {below} ≤ {section}")]
    SectionsNotDownClosed { below: usize, section: usize },
    #[error("b·(x ∧ γ) ≠ x ∧ b·γ at (b = {b}, x = {x}, γ = {gamma})")]
    MeetIdentityFails { b: usize, x: usize, gamma: usize },
    #[error("{s} maps the local section {gamma} outside the local sections")]
    SectionEscape { s: usize, gamma: usize },
    #[error("the support of section {0} is not a principal ideal")]
    SupportNotPrincipal(usize),
    #[error("the join of sections {0} and {1} is not a section")]
    SectionJoinEscape(usize, usize),
    #[error("{0} is not a partial unit")]
    NotPartialUnit(usize),
    #[error("sections are not a module: {0}")]
    NotPseudoModule(ActionError),
    #[error("the module is over a different pseudogroup than the quantale")]
    PseudogroupMismatch,
    #[error("carrier exceeds the bound {limit}")]
    TooLarge { limit: usize },
    #[error("element {0} of the completion is {kind}", kind = if *.1 { "a principal ideal but not a section" } else { "a section but not a principal ideal" })]
    SectionsNotPrincipal(usize, bool),
    #[error("not a sheaf homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("not isomorphic: {0}")]
    NotIsomorphic(String),
    #[error("Hilbert axiom ({axiom}) fails at ({a}, {b}, {c})")]
    HilbertAxiom { axiom: u8, a: usize, b: usize, c: usize },
    #[error("Hilbert sections differ from local sections at {0}")]
    HilbertSectionsDiffer(usize),
    #[error("spp({0}) ≠ ⟨x, x⟩ ∧ e")]
    HilbertSupport(usize),
    #[error("Parseval's identity fails at ({0}, {1})")]
    Parseval(usize, usize),
    #[error("the inner product is degenerate: {0} and {1} are not separated")]
    Degenerate(usize, usize),
    #[error("adding the non-section {0} still gives a Hilbert basis")]
    NotGreatestBasis(usize),
    #[error("the actions do not commute at (a = {0}, x = {1}, b = {2})")]
    NotBimodule(usize, usize, usize),
    #[error("the two sheaf structures have different orders")]
    OrderMismatch,
    #[error("bisection expansion fails at {0}")]
    BisectionExpansionFails(usize),
    #[error("covering fails on the {side}: ⋁ over bisections is {got}, expected {expected}")]
    CoveringFails { side: &'static str, got: usize, expected: usize },
    #[error("inner product associativity fails at ({0}, {1}, {2})")]
    AssociativityFails(usize, usize, usize),
    #[error(transparent)]
    Bimodule(#[from] BimoduleError),
}

/// Raw tables of a sheaf candidate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SheafTables {
    pub x_size: usize,
    /// `leq[x][y]` iff `x ≤ y`.
    pub leq: Vec<Vec<bool>>,
    /// `act[a][x]` for `a` a carrier index of `Q`.
    pub act: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

fn flatten(field: &'static str, rows: &[Vec<usize>], shape: (usize, usize), bound: usize) -> Result<Vec<usize>, SheafError> {
    if rows.len() != shape.0 || rows.iter().any(|r| r.len() != shape.1) {
        return Err(SheafError::Shape { field });
    }
    for (row, r) in rows.iter().enumerate() {
        if let Some(col) = r.iter().position(|&v| v >= bound) {
            return Err(SheafError::OutOfRange { field, row, col });
        }
    }
    Ok(rows.iter().flatten().copied().collect())
}

fn order_lattice(x_size: usize, leq: &[Vec<bool>]) -> Result<OrderLattice, SheafError> {
    if leq.len() != x_size || leq.iter().any(|r| r.len() != x_size) {
        return Err(SheafError::Shape { field: "leq" });
    }
    OrderLattice::from_leq(x_size, |a, b| leq[a][b]).map_err(SheafError::Lattice)
}

/// A verified `Q`-sheaf.
#[derive(Debug, Clone)]
pub struct QSheaf {
    q: Arc<QuantalFrame>,
    lattice: OrderLattice,
    act: Vec<usize>,
    spp: Vec<usize>,
    sections: FixedBitSet,
    names: Option<Vec<String>>,
}

impl QSheaf {
    pub fn verify(q: Arc<QuantalFrame>, tables: &SheafTables) -> Result<Self, SheafError> {
        let xs = tables.x_size;
        let lattice = order_lattice(xs, &tables.leq)?;
        let act = flatten("act", &tables.act, (q.len(), xs), xs)?;
        if let Some(support) = &tables.support {
            if support.len() != xs {
                return Err(SheafError::Shape { field: "support" });
            }
            if let Some(col) = support.iter().position(|&b| b >= q.len()) {
                return Err(SheafError::OutOfRange { field: "support", row: 0, col });
            }
        }
        if tables.names.as_ref().is_some_and(|n| n.len() != xs) {
            return Err(SheafError::Shape { field: "names" });
        }
        Self::from_parts(q, lattice, act, tables.support.as_deref(), tables.names.clone())
    }

    /// `Q` acting on itself by multiplication.
    pub fn regular(q: Arc<QuantalFrame>) -> Result<Self, SheafError> {
        let m = q.len();
        let lattice = OrderLattice::from(q.lattice());
        let act = (0..m).flat_map(|a| (0..m).map(move |b| (a, b))).map(|(a, b)| q.mul(a, b)).collect();
        Self::from_parts(q, lattice, act, None, None)
    }

    pub(crate) fn from_parts(
        q: Arc<QuantalFrame>,
        lattice: OrderLattice,
        act: Vec<usize>,
        supplied: Option<&[usize]>,
        names: Option<Vec<String>>,
    ) -> Result<Self, SheafError> {
        let xs = lattice.len();
        if let Err(LatticeError::NotDistributive(a, b, c)) = lattice.check_distributive() {
            return Err(SheafError::NotFrame(a, b, c));
        }
        let mut sheaf = QSheaf { q, lattice, act, spp: Vec::new(), sections: FixedBitSet::with_capacity(xs), names };
        sheaf.check_module()?;
        sheaf.spp = (0..xs).map(|x| sheaf.adjoint_support(x)).collect::<Result<_, _>>()?;
        if let Some(supplied) = supplied {
            for x in 0..xs {
                if supplied[x] != sheaf.spp[x] {
                    return Err(SheafError::SupportMismatch { x, supplied: supplied[x], computed: sheaf.spp[x] });
                }
            }
        }
        sheaf.check_support()?;
        sheaf.sections = bits::bitset(xs, (0..xs).filter(|&g| sheaf.is_local_section(g)));
        if sheaf.lattice.join_all(sheaf.sections.ones()) != sheaf.lattice.top() {
            return Err(SheafError::CoverFails);
        }
        sheaf.check_section_laws()?;
        Ok(sheaf)
    }

    fn check_module(&self) -> Result<(), SheafError> {
        let (q, l, xs) = (&*self.q, &self.lattice, self.lattice.len());
        let fail = |law, a, b, x| Err(SheafError::NotModule { law, a, b, x });
        for a in 0..q.len() {
            if self.act(a, l.bottom()) != l.bottom() {
                return fail("a·0 = 0", a, 0, l.bottom());
            }
            for x in 0..xs {
                for y in x + 1..xs {
                    if self.act(a, l.join(x, y)) != l.join(self.act(a, x), self.act(a, y)) {
                        return fail("a·(x ∨ y) = a·x ∨ a·y", a, y, x);
                    }
                }
            }
        }
        for x in 0..xs {
            if self.act(q.unit(), x) != x {
                return fail("e·x = x", q.unit(), 0, x);
            }
            if self.act(q.bottom(), x) != l.bottom() {
                return fail("0·x = 0", q.bottom(), 0, x);
            }
        }
        for a in 0..q.len() {
            for b in 0..q.len() {
                let (ab, join) = (q.mul(a, b), q.join(a, b));
                for x in 0..xs {
                    let bx = self.act(b, x);
                    if self.act(ab, x) != self.act(a, bx) {
                        return fail("(ab)·x = a·(b·x)", a, b, x);
                    }
                    if b > a && self.act(join, x) != l.join(self.act(a, x), bx) {
                        return fail("(a ∨ b)·x = a·x ∨ b·x", a, b, x);
                    }
                }
            }
        }
        Ok(())
    }

    /// The least `b ∈ Q_0` with `x ≤ b·1`.
    fn adjoint_support(&self, x: usize) -> Result<usize, SheafError> {
        let (q, top) = (&*self.q, self.lattice.top());
        let candidates: Vec<usize> =
            (0..q.len()).filter(|&b| q.in_base_locale(b) && self.lattice.leq(x, self.act(b, top))).collect();
        let least = candidates.iter().fold(q.unit(), |acc, &b| q.meet(acc, b));
        if candidates.contains(&least) {
            Ok(least)
        } else {
            Err(SheafError::NoSupport { x })
        }
    }

    fn check_support(&self) -> Result<(), SheafError> {
        let q = &*self.q;
        for x in 0..self.len() {
            if self.act(self.spp(x), x) != x {
                return Err(SheafError::SupportConditionFails { x });
            }
            for b in (0..q.len()).filter(|&b| q.in_base_locale(b)) {
                if self.spp(self.act(b, x)) != q.mul(b, self.spp(x)) {
                    return Err(SheafError::NotEquivariant { b, x });
                }
            }
        }
        Ok(())
    }

    fn is_local_section(&self, g: usize) -> bool {
        (0..self.len()).all(|x| self.lattice.leq(self.act(self.spp(self.lattice.meet(x, g)), g), x))
    }

    fn check_section_laws(&self) -> Result<(), SheafError> {
        let (q, l) = (&*self.q, &self.lattice);
        for g in self.sections.ones() {
            for x in 0..self.len() {
                if l.leq(x, g) && !self.sections.contains(x) {
                    return Err(SheafError::SectionsNotDownClosed { below: x, section: g });
                }
            }
            for h in self.sections.ones() {
                if l.leq(g, h) != (self.act(self.spp(g), h) == g) {
                    return Err(SheafError::SectionOrder(g, h));
                }
            }
            for b in (0..q.len()).filter(|&b| q.in_base_locale(b)) {
                for x in 0..self.len() {
                    if self.act(b, l.meet(x, g)) != l.meet(x, self.act(b, g)) {
                        return Err(SheafError::MeetIdentityFails { b, x, gamma: g });
                    }
                }
            }
        }
        for s in (0..q.len()).filter(|&s| q.is_partial_unit(s)) {
            for x in 0..self.len() {
                if self.spp(self.act(s, x)) != q.mul(q.mul(s, self.spp(x)), q.star(s)) {
                    return Err(SheafError::ConjugationFails { s, x });
                }
            }
        }
        Ok(())
    }

    pub fn quantale(&self) -> &Arc<QuantalFrame> {
        &self.q
    }

    pub fn lattice(&self) -> &OrderLattice {
        &self.lattice
    }

    pub fn len(&self) -> usize {
        self.lattice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattice.is_empty()
    }

    #[inline]
    pub fn act(&self, a: usize, x: usize) -> usize {
        self.act[a * self.lattice.len() + x]
    }

    #[inline]
    pub fn spp(&self, x: usize) -> usize {
        self.spp[x]
    }

    pub fn sections(&self) -> &FixedBitSet {
        &self.sections
    }

    pub fn is_section(&self, x: usize) -> bool {
        self.sections.contains(x)
    }

    pub fn name(&self, x: usize) -> String {
        self.names.as_ref().map_or_else(|| x.to_string(), |n| n[x].clone())
    }

    pub fn to_tables(&self) -> SheafTables {
        let xs = self.len();
        SheafTables {
            x_size: xs,
            leq: (0..xs).map(|a| (0..xs).map(|b| self.lattice.leq(a, b)).collect()).collect(),
            act: (0..self.q.len()).map(|a| (0..xs).map(|x| self.act(a, x)).collect()).collect(),
            support: Some(self.spp.clone()),
            names: self.names.clone(),
        }
    }
}

/// Checks that `phi` is a sheaf homomorphism: equivariant, join preserving,
/// support preserving, and sending local sections to local sections.
pub fn check_sheaf_hom(from: &QSheaf, to: &QSheaf, phi: &[usize]) -> Result<(), SheafError> {
    let bad = |what: String| Err(SheafError::NotHomomorphism(what));
    if phi.len() != from.len() || phi.iter().any(|&y| y >= to.len()) || from.q.len() != to.q.len() {
        return bad("shape".to_string());
    }
    if phi[from.lattice.bottom()] != to.lattice.bottom() {
        return bad("bottom".to_string());
    }
    for x in 0..from.len() {
        if to.spp(phi[x]) != from.spp(x) {
            return bad(format!("support at {x}"));
        }
        if from.is_section(x) && !to.is_section(phi[x]) {
            return bad(format!("section {x}"));
        }
        for a in 0..from.q.len() {
            if phi[from.act(a, x)] != to.act(a, phi[x]) {
                return bad(format!("equivariance at ({a}, {x})"));
            }
        }
        for y in x + 1..from.len() {
            if phi[from.lattice.join(x, y)] != to.lattice.join(phi[x], phi[y]) {
                return bad(format!("join of {x} and {y}"));
            }
        }
    }
    Ok(())
}

fn invert(map: &[usize], target: usize) -> Option<Vec<usize>> {
    let mut inv = vec![usize::MAX; target];
    for (x, &y) in map.iter().enumerate() {
        if y >= target || inv[y] != usize::MAX {
            return None;
        }
        inv[y] = x;
    }
    (map.len() == target).then_some(inv)
}

/// The module of local sections over the pseudogroup of `Q`, read through
/// `s ↦ s↓`.
#[derive(Debug, Clone)]
pub struct SectionModule {
    pub module: PseudoModule,
    /// Sheaf index of each module element.
    pub sections: Vec<usize>,
}

/// `Θ(Ξ)`: local sections acted on by partial units.
pub fn theta(xi: &QSheaf) -> Result<SectionModule, SheafError> {
    let q = &*xi.q;
    let s = q.pseudogroup();
    let sections: Vec<usize> = xi.sections.ones().collect();
    let pos: HashMap<usize, usize> = sections.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let n = sections.len();
    let mut act = Vec::with_capacity(s.len() * n);
    for g in s.elements() {
        let unit = q.principal(g);
        for &gamma in &sections {
            let image = xi.act(unit, gamma);
            act.push(*pos.get(&image).ok_or(SheafError::SectionEscape { s: g, gamma })?);
        }
    }
    let by_principal: HashMap<usize, Element> = s.idempotents().iter().map(|&e| (q.principal(e), e)).collect();
    let support = sections
        .iter()
        .map(|&g| by_principal.get(&xi.spp(g)).copied().ok_or(SheafError::SupportNotPrincipal(g)))
        .collect::<Result<Vec<Element>, _>>()?;
    let names = xi.names.as_ref().map(|names| sections.iter().map(|&g| names[g].clone()).collect());
    let action =
        SupportedAction::from_parts(s.base().clone(), n, act, support, names).map_err(SheafError::NotPseudoModule)?;
    let mut joins = vec![None; n * n];
    for i in 0..n {
        for j in 0..n {
            if action.left_compatible(i, j) {
                let join = xi.lattice.join(sections[i], sections[j]);
                joins[i * n + j] = Some(*pos.get(&join).ok_or(SheafError::SectionJoinEscape(sections[i], sections[j]))?);
            }
        }
    }
    let module = PseudoModule::new(s, action, Some(&joins)).map_err(SheafError::NotPseudoModule)?;
    Ok(SectionModule { module, sections })
}

/// Order-ideals of a module or bimodule closed under the given joins, with the
/// names of their members.
fn ideal_carrier(
    down: Vec<FixedBitSet>,
    join: Vec<Option<usize>>,
    bottom: usize,
    limit: usize,
) -> Result<(OrderIdealClosure, SetLattice), SheafError> {
    let closure = OrderIdealClosure::new(down, join, bottom);
    let carrier = closure.enumerate_closed(limit).map_err(|e| match e {
        LatticeError::TooLarge { limit, .. } => SheafError::TooLarge { limit },
        other => SheafError::Lattice(other),
    })?;
    let lattice = SetLattice::new(carrier, |u| closure.close(u)).map_err(SheafError::Lattice)?;
    Ok((closure, lattice))
}

fn set_name(name: impl Fn(usize) -> String, set: &FixedBitSet) -> String {
    let parts: Vec<String> = set.ones().map(name).collect();
    format!("{{{}}}", parts.join(","))
}

/// Closure of `{f(u, z) : u ∈ U, z ∈ J}` as a carrier index.
fn pointwise(
    closure: &OrderIdealClosure,
    lattice: &SetLattice,
    left: &FixedBitSet,
    right: &FixedBitSet,
    n: usize,
    f: impl Fn(usize, usize) -> usize,
) -> usize {
    let mut image = FixedBitSet::with_capacity(n);
    for u in left.ones() {
        for z in right.ones() {
            image.insert(f(u, z));
        }
    }
    lattice.index_of(&closure.close(&image)).expect("closure lands in the carrier")
}

/// `𝒧∨(X)` as a sheaf, with `η(x) = x↓`.
#[derive(Debug, Clone)]
pub struct ModuleSheaf {
    pub sheaf: QSheaf,
    pub ideals: Vec<FixedBitSet>,
    pub eta: Vec<usize>,
}

/// `𝒧∨(X)`: order-ideals of `X` closed under left compatible joins, as an
/// `𝒧∨(S)`-sheaf. Its local sections must be exactly the principal ideals.
pub fn lcc_module(x: &PseudoModule, q: Arc<QuantalFrame>) -> Result<ModuleSheaf, SheafError> {
    lcc_module_with(x, q, DEFAULT_CARRIER_LIMIT)
}

pub fn lcc_module_with(x: &PseudoModule, q: Arc<QuantalFrame>, limit: usize) -> Result<ModuleSheaf, SheafError> {
    if q.pseudogroup() != x.pseudogroup() {
        return Err(SheafError::PseudogroupMismatch);
    }
    let xs = x.len();
    let down = (0..xs).map(|y| x.action().down_set(y).clone()).collect();
    let (closure, sets) = ideal_carrier(down, x.join_table().to_vec(), x.bottom(), limit)?;
    let m = sets.len();
    let mut act = Vec::with_capacity(q.len() * m);
    for a in 0..q.len() {
        let u = q.element(a);
        for j in 0..m {
            act.push(pointwise(&closure, &sets, u.bits(), sets.member(j), xs, |g, z| x.act(g, z)));
        }
    }
    let support: Vec<usize> =
        (0..m).map(|j| q.lattice().join_all(sets.member(j).ones().map(|z| q.principal(x.support(z))))).collect();
    let names = Some(sets.members().iter().map(|set| set_name(|z| x.action().name(z), set)).collect());
    let lattice = OrderLattice::from(&sets);
    let sheaf = QSheaf::from_parts(q, lattice, act, Some(&support), names)?;
    let eta: Vec<usize> = (0..xs).map(|y| sets.index_of(x.action().down_set(y)).expect("principal ideals are closed")).collect();
    let principal = bits::bitset(m, eta.iter().copied());
    for j in 0..m {
        if principal.contains(j) != sheaf.is_section(j) {
            return Err(SheafError::SectionsNotPrincipal(j, principal.contains(j)));
        }
    }
    Ok(ModuleSheaf { sheaf, ideals: sets.members().to_vec(), eta })
}

/// The unit `X → Θ(𝒧∨(X))`, `x ↦ x↓`, checked to be a module isomorphism.
pub fn unit_iso(x: &PseudoModule, completion: &ModuleSheaf) -> Result<Vec<usize>, SheafError> {
    let theta = theta(&completion.sheaf)?;
    let pos: HashMap<usize, usize> = theta.sections.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let map: Vec<usize> = completion.eta.iter().map(|g| pos[g]).collect();
    let inverse = invert(&map, theta.module.len()).ok_or_else(|| SheafError::NotIsomorphic("unit is not a bijection".to_string()))?;
    let iso_err = |e: ActionError| SheafError::NotIsomorphic(e.to_string());
    x.check_homomorphism(&theta.module, &map).map_err(iso_err)?;
    theta.module.check_homomorphism(x, &inverse).map_err(iso_err)?;
    Ok(map)
}

/// The counit `𝒧∨(Θ(Ξ)) → Ξ`, `J ↦ ⋁J`, checked to be a sheaf isomorphism.
pub fn counit_iso(xi: &QSheaf) -> Result<Vec<usize>, SheafError> {
    let theta = theta(xi)?;
    let completion = lcc_module(&theta.module, xi.q.clone())?;
    let map: Vec<usize> = completion
        .ideals
        .iter()
        .map(|ideal| xi.lattice.join_all(ideal.ones().map(|i| theta.sections[i])))
        .collect();
    let inverse = invert(&map, xi.len()).ok_or_else(|| SheafError::NotIsomorphic("counit is not a bijection".to_string()))?;
    check_sheaf_hom(&completion.sheaf, xi, &map)?;
    check_sheaf_hom(xi, &completion.sheaf, &inverse)?;
    Ok(map)
}

/// A verified complete Hilbert structure on a sheaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertStructure {
    x_size: usize,
    inner: Vec<usize>,
    basis: FixedBitSet,
}

impl HilbertStructure {
    #[inline]
    pub fn inner(&self, x: usize, y: usize) -> usize {
        self.inner[x * self.x_size + y]
    }

    /// The Hilbert sections, which form the greatest Hilbert basis.
    pub fn basis(&self) -> &FixedBitSet {
        &self.basis
    }

    /// A local section `γ` with `⟨γ, γ⟩ ∈ Q_0`.
    pub fn is_principal_section(&self, xi: &QSheaf, g: usize) -> bool {
        self.basis.contains(g) && xi.q.in_base_locale(self.inner(g, g))
    }

    /// A Hilbert section `γ` with `⟨γ, γ⟩·γ = γ`.
    pub fn is_regular_section(&self, xi: &QSheaf, g: usize) -> bool {
        self.basis.contains(g) && xi.act(self.inner(g, g), g) == g
    }
}

/// `⟨U, V⟩ = U·V*` on `Q` acting on itself.
pub fn regular_inner(q: &QuantalFrame) -> Vec<Vec<usize>> {
    (0..q.len()).map(|u| (0..q.len()).map(|v| q.mul(u, q.star(v))).collect()).collect()
}

fn expands(xi: &QSheaf, inner: impl Fn(usize, usize) -> usize, basis: &FixedBitSet, x: usize) -> bool {
    xi.lattice.join_all(basis.ones().map(|g| xi.act(inner(x, g), g))) == x
}

/// Checks the Hilbert axioms, the basis expansion over the Hilbert sections,
/// agreement of Hilbert and local sections, `spp(x) = ⟨x,x⟩ ∧ e`, Parseval's
/// identity, non-degeneracy, and maximality of the basis.
pub fn verify_hilbert(xi: &QSheaf, inner: &[Vec<usize>]) -> Result<HilbertStructure, SheafError> {
    let (q, l, xs) = (&*xi.q, &xi.lattice, xi.len());
    let h = HilbertStructure {
        x_size: xs,
        inner: flatten("inner", inner, (xs, xs), q.len())?,
        basis: FixedBitSet::with_capacity(xs),
    };
    let fail = |axiom, a, b, c| Err(SheafError::HilbertAxiom { axiom, a, b, c });
    for x in 0..xs {
        if h.inner(l.bottom(), x) != q.bottom() {
            return fail(2, l.bottom(), l.bottom(), x);
        }
        for y in 0..xs {
            if h.inner(x, y) != q.star(h.inner(y, x)) {
                return fail(3, x, y, 0);
            }
            for a in 0..q.len() {
                if h.inner(xi.act(a, x), y) != q.mul(a, h.inner(x, y)) {
                    return fail(1, a, x, y);
                }
            }
            for z in 0..xs {
                if h.inner(l.join(x, y), z) != q.join(h.inner(x, z), h.inner(y, z)) {
                    return fail(2, x, y, z);
                }
            }
        }
    }
    let basis = bits::bitset(xs, (0..xs).filter(|&g| (0..xs).all(|x| l.leq(xi.act(h.inner(x, g), g), x))));
    if let Some(g) = (0..xs).find(|&g| basis.contains(g) != xi.is_section(g)) {
        return Err(SheafError::HilbertSectionsDiffer(g));
    }
    let h = HilbertStructure { basis, ..h };
    for x in 0..xs {
        if !expands(xi, |a, b| h.inner(a, b), &h.basis, x) {
            return fail(4, x, 0, 0);
        }
        if xi.spp(x) != q.meet(h.inner(x, x), q.unit()) {
            return Err(SheafError::HilbertSupport(x));
        }
        for y in 0..xs {
            let sum = q.lattice().join_all(h.basis.ones().map(|g| q.mul(h.inner(x, g), h.inner(g, y))));
            if sum != h.inner(x, y) {
                return Err(SheafError::Parseval(x, y));
            }
            if x < y && (0..xs).all(|z| h.inner(x, z) == h.inner(y, z)) {
                return Err(SheafError::Degenerate(x, y));
            }
        }
    }
    for extra in (0..xs).filter(|&x| !h.basis.contains(x)) {
        let mut bigger = h.basis.clone();
        bigger.insert(extra);
        if (0..xs).all(|x| expands(xi, |a, b| h.inner(a, b), &bigger, x)) {
            return Err(SheafError::NotGreatestBasis(extra));
        }
    }
    Ok(h)
}

/// Raw tables of a `Q`-`R`-bisheaf candidate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BisheafTables {
    pub x_size: usize,
    pub leq: Vec<Vec<bool>>,
    /// `lact[a][x]`, `a` a carrier index of `Q`.
    pub lact: Vec<Vec<usize>>,
    /// `ract[x][b]`, `b` a carrier index of `R`.
    pub ract: Vec<Vec<usize>>,
    /// `⟨x, y⟩ ∈ Q`.
    pub inner_q: Vec<Vec<usize>>,
    /// `[x, y] ∈ R`.
    pub inner_r: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

/// A verified bisheaf with its local bisections.
#[derive(Debug, Clone)]
pub struct BiSheaf {
    left: QSheaf,
    right: QSheaf,
    left_inner: HilbertStructure,
    right_inner: HilbertStructure,
    bisections: FixedBitSet,
}

pub fn verify_bisheaf(q: Arc<QuantalFrame>, r: Arc<QuantalFrame>, tables: &BisheafTables) -> Result<BiSheaf, SheafError> {
    let xs = tables.x_size;
    let lattice = order_lattice(xs, &tables.leq)?;
    let lact = flatten("lact", &tables.lact, (q.len(), xs), xs)?;
    let ract = flatten("ract", &tables.ract, (xs, r.len()), xs)?;
    if tables.names.as_ref().is_some_and(|n| n.len() != xs) {
        return Err(SheafError::Shape { field: "names" });
    }
    build_bisheaf(q, r, lattice, lact, &ract, &tables.inner_q, &tables.inner_r, tables.names.clone())
}

#[allow(clippy::too_many_arguments)]
fn build_bisheaf(
    q: Arc<QuantalFrame>,
    r: Arc<QuantalFrame>,
    lattice: OrderLattice,
    lact: Vec<usize>,
    ract: &[usize],
    inner_q: &[Vec<usize>],
    inner_r: &[Vec<usize>],
    names: Option<Vec<String>>,
) -> Result<BiSheaf, SheafError> {
    let xs = lattice.len();
    let rn = r.len();
    for a in 0..q.len() {
        for x in 0..xs {
            for b in 0..rn {
                if ract[lact[a * xs + x] * rn + b] != lact[a * xs + ract[x * rn + b]] {
                    return Err(SheafError::NotBimodule(a, x, b));
                }
            }
        }
    }
    let starred: Vec<usize> = (0..rn).flat_map(|b| (0..xs).map(move |x| (b, x))).map(|(b, x)| ract[x * rn + r.star(b)]).collect();
    let left = QSheaf::from_parts(q, lattice.clone(), lact, None, names.clone())?;
    let right = QSheaf::from_parts(r, lattice, starred, None, names)?;
    let left_inner = verify_hilbert(&left, inner_q)?;
    let right_inner = verify_hilbert(&right, inner_r)?;
    let mut bisections = left.sections.clone();
    bisections.intersect_with(&right.sections);
    let b = BiSheaf { left, right, left_inner, right_inner, bisections };
    for x in 0..xs {
        let via_left = expands(&b.left, |u, v| b.left_inner.inner(u, v), &b.bisections, x);
        let via_right = b.left.lattice.join_all(b.bisections.ones().map(|g| b.ract(g, b.right_inner.inner(g, x))));
        if !via_left || via_right != x {
            return Err(SheafError::BisectionExpansionFails(x));
        }
    }
    Ok(b)
}

impl BiSheaf {
    pub fn left(&self) -> &QSheaf {
        &self.left
    }

    pub fn right(&self) -> &QSheaf {
        &self.right
    }

    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    #[inline]
    pub fn lact(&self, a: usize, x: usize) -> usize {
        self.left.act(a, x)
    }

    /// `x·b`.
    #[inline]
    pub fn ract(&self, x: usize, b: usize) -> usize {
        self.right.act(self.right.q.star(b), x)
    }

    pub fn inner_q(&self, x: usize, y: usize) -> usize {
        self.left_inner.inner(x, y)
    }

    pub fn inner_r(&self, x: usize, y: usize) -> usize {
        self.right_inner.inner(x, y)
    }

    pub fn bisections(&self) -> &FixedBitSet {
        &self.bisections
    }
}

/// Facts established by [`verify_biprincipal`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiprincipalReport {
    pub bisections: Vec<usize>,
    /// Bisections that are principal for the left structure.
    pub principal_left: usize,
    /// Bisections that are principal for the right structure.
    pub principal_right: usize,
}

/// Checks both covering conditions and inner product associativity over the
/// local bisections.
pub fn verify_biprincipal(b: &BiSheaf) -> Result<BiprincipalReport, SheafError> {
    let (q, r) = (&*b.left.q, &*b.right.q);
    let got = q.lattice().join_all(b.bisections.ones().map(|g| b.inner_q(g, g)));
    if got != q.unit() {
        return Err(SheafError::CoveringFails { side: "left", got, expected: q.unit() });
    }
    let got = r.lattice().join_all(b.bisections.ones().map(|g| b.inner_r(g, g)));
    if got != r.unit() {
        return Err(SheafError::CoveringFails { side: "right", got, expected: r.unit() });
    }
    for g in b.bisections.ones() {
        for h in b.bisections.ones() {
            for k in b.bisections.ones() {
                if b.lact(b.inner_q(g, h), k) != b.ract(g, b.inner_r(h, k)) {
                    return Err(SheafError::AssociativityFails(g, h, k));
                }
            }
        }
    }
    Ok(BiprincipalReport {
        bisections: b.bisections.ones().collect(),
        principal_left: b.bisections.ones().filter(|&g| b.left_inner.is_principal_section(&b.left, g)).count(),
        principal_right: b.bisections.ones().filter(|&g| b.right_inner.is_principal_section(&b.right, g)).count(),
    })
}

/// The local bisections of a biprincipal bisheaf as an equivalence bimodule
/// over the pseudogroups of `Q` and `R`. Returns the bimodule and the sheaf
/// index of each of its elements.
pub fn bisection_bimodule(b: &BiSheaf) -> Result<(EquivalenceBimodule, Vec<usize>), SheafError> {
    verify_biprincipal(b)?;
    let (q, r) = (&*b.left.q, &*b.right.q);
    let (s, t) = (q.pseudogroup(), r.pseudogroup());
    let sections: Vec<usize> = b.bisections.ones().collect();
    let pos: HashMap<usize, usize> = sections.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let s_of: HashMap<usize, Element> = s.elements().map(|g| (q.principal(g), g)).collect();
    let t_of: HashMap<usize, Element> = t.elements().map(|g| (r.principal(g), g)).collect();
    let lookup = |table: &HashMap<usize, usize>, v: usize, err: SheafError| table.get(&v).copied().ok_or(err);
    let mut tables = BiactionTables {
        x_size: sections.len(),
        lact: Vec::new(),
        ract: Vec::new(),
        inner_s: Vec::new(),
        inner_t: Vec::new(),
        names: b.left.names.as_ref().map(|n| sections.iter().map(|&g| n[g].clone()).collect()),
    };
    for g in s.elements() {
        let row = sections
            .iter()
            .map(|&x| lookup(&pos, b.lact(q.principal(g), x), SheafError::SectionEscape { s: g, gamma: x }))
            .collect::<Result<_, _>>()?;
        tables.lact.push(row);
    }
    for &x in &sections {
        let row = t
            .elements()
            .map(|g| lookup(&pos, b.ract(x, r.principal(g)), SheafError::SectionEscape { s: g, gamma: x }))
            .collect::<Result<_, _>>()?;
        tables.ract.push(row);
        let row_s = sections.iter().map(|&y| lookup(&s_of, b.inner_q(x, y), SheafError::NotPartialUnit(b.inner_q(x, y))));
        tables.inner_s.push(row_s.collect::<Result<_, _>>()?);
        let row_t = sections.iter().map(|&y| lookup(&t_of, b.inner_r(x, y), SheafError::NotPartialUnit(b.inner_r(x, y))));
        tables.inner_t.push(row_t.collect::<Result<_, _>>()?);
    }
    Ok((EquivalenceBimodule::verify(s, t, &tables)?, sections))
}

/// `𝒧∨(X)` of an equivalence bimodule as a bisheaf, with `η(x) = x↓`.
#[derive(Debug, Clone)]
pub struct BimoduleSheaf {
    pub sheaf: BiSheaf,
    pub ideals: Vec<FixedBitSet>,
    pub eta: Vec<usize>,
}

/// `𝒧∨(X)`: order-ideals closed under compatible joins, with both actions
/// and both inner products extended by joins of pointwise values. The local
/// bisections must be exactly the principal ideals.
pub fn lcc_bimodule(
    x: &EquivalenceBimodule,
    q: Arc<QuantalFrame>,
    r: Arc<QuantalFrame>,
) -> Result<BimoduleSheaf, SheafError> {
    if q.pseudogroup() != x.left() || r.pseudogroup() != x.right() {
        return Err(SheafError::PseudogroupMismatch);
    }
    let xs = x.len();
    let down: Vec<FixedBitSet> = (0..xs).map(|y| bits::bitset(xs, (0..xs).filter(|&z| x.lact(x.p(z), y) == z))).collect();
    let joins = (0..xs).flat_map(|a| (0..xs).map(move |b| (a, b))).map(|(a, b)| x.join(a, b)).collect();
    let (closure, sets) = ideal_carrier(down.clone(), joins, x.bottom(), DEFAULT_CARRIER_LIMIT)?;
    let m = sets.len();
    let mut lact = Vec::with_capacity(q.len() * m);
    for a in 0..q.len() {
        let u = q.element(a);
        for j in 0..m {
            lact.push(pointwise(&closure, &sets, u.bits(), sets.member(j), xs, |g, z| x.lact(g, z)));
        }
    }
    let mut ract = Vec::with_capacity(m * r.len());
    for j in 0..m {
        for b in 0..r.len() {
            let v = r.element(b);
            ract.push(pointwise(&closure, &sets, sets.member(j), v.bits(), xs, |z, g| x.ract(z, g)));
        }
    }
    let inner = |f: &dyn Fn(usize, usize) -> usize, frame: &QuantalFrame| -> Vec<Vec<usize>> {
        (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        let values = sets.member(i).ones().flat_map(|y| sets.member(j).ones().map(move |z| (y, z)));
                        frame.lattice().join_all(values.map(|(y, z)| frame.principal(f(y, z))))
                    })
                    .collect()
            })
            .collect()
    };
    let inner_q = inner(&|y, z| x.inner_s(y, z), &q);
    let inner_r = inner(&|y, z| x.inner_t(y, z), &r);
    let names = Some(sets.members().iter().map(|set| set_name(|z| x.name(z), set)).collect());
    let lattice = OrderLattice::from(&sets);
    let sheaf = build_bisheaf(q, r, lattice, lact, &ract, &inner_q, &inner_r, names)?;
    let eta: Vec<usize> = down.iter().map(|d| sets.index_of(d).expect("principal ideals are closed")).collect();
    let principal = bits::bitset(m, eta.iter().copied());
    for j in 0..m {
        if principal.contains(j) != sheaf.bisections.contains(j) {
            return Err(SheafError::SectionsNotPrincipal(j, principal.contains(j)));
        }
    }
    Ok(BimoduleSheaf { sheaf, ideals: sets.members().to_vec(), eta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{schein_complete, SupportedAction};
    use crate::catalog;
    use crate::quantale::lcc;

    fn frame(s: &crate::Pseudogroup) -> Arc<QuantalFrame> {
        Arc::new(lcc(s).unwrap())
    }

    #[test]
    fn quantale_on_itself() {
        for n in 1..=2 {
            let s = catalog::symmetric_inverse_monoid(n).unwrap();
            let q = frame(&s);
            let xi = QSheaf::regular(q.clone()).unwrap();
            for u in 0..q.len() {
                assert_eq!(xi.spp(u), q.meet(q.mul(u, q.star(u)), q.unit()));
            }
            // Sections are the elements with U*·U ≤ e; they include the partial units.
            for u in 0..q.len() {
                assert_eq!(xi.is_section(u), q.in_base_locale(q.mul(q.star(u), u)));
                if q.is_partial_unit(u) {
                    assert!(xi.is_section(u));
                }
            }
            let h = verify_hilbert(&xi, &regular_inner(&q)).unwrap();
            assert_eq!(h.basis(), xi.sections());
        }
    }

    #[test]
    fn frame_acting_on_itself() {
        let q = frame(&catalog::chain(3).unwrap());
        let xi = QSheaf::regular(q.clone()).unwrap();
        for u in 0..q.len() {
            assert_eq!(xi.spp(u), u);
        }
        counit_iso(&xi).unwrap();
    }

    #[test]
    fn supplied_support_must_match() {
        let q = frame(&catalog::symmetric_inverse_monoid(1).unwrap());
        let xi = QSheaf::regular(q.clone()).unwrap();
        let mut tables = xi.to_tables();
        QSheaf::verify(q.clone(), &tables).unwrap();
        tables.support = Some(vec![q.unit(); q.len()]);
        assert!(matches!(QSheaf::verify(q, &tables), Err(SheafError::SupportMismatch { .. })));
    }

    #[test]
    fn degenerate_sheaf() {
        let q = frame(&catalog::symmetric_inverse_monoid(1).unwrap());
        let tables = SheafTables {
            x_size: 1,
            leq: vec![vec![true]],
            act: vec![vec![0]; q.len()],
            support: None,
            names: None,
        };
        let xi = QSheaf::verify(q, &tables).unwrap();
        assert_eq!(xi.sections().count_ones(..), 1);
        verify_hilbert(&xi, &[vec![0]]).unwrap();
        assert_eq!(theta(&xi).unwrap().module.len(), 1);
    }

    #[test]
    fn completion_of_left_ideal_module() {
        let s = catalog::symmetric_inverse_monoid(2).unwrap();
        let ideal = ["0", "e1", "a"].map(|n| s.element_named(n).unwrap());
        let x0 = SupportedAction::left_ideal(&s, &ideal).unwrap();
        let module = schein_complete(&s, &x0).unwrap().module;
        let completion = lcc_module(&module, frame(&s)).unwrap();
        assert_eq!(completion.sheaf.len(), 4);
        let unit = unit_iso(&module, &completion).unwrap();
        assert_eq!(unit.len(), 4);
        counit_iso(&completion.sheaf).unwrap();
    }

    #[test]
    fn theta_of_quantale_is_completed_regular_action() {
        let s = catalog::symmetric_inverse_monoid(2).unwrap();
        let q = frame(&s);
        let xi = QSheaf::regular(q.clone()).unwrap();
        let sections = theta(&xi).unwrap();
        let schein = schein_complete(&s, &SupportedAction::regular(&s)).unwrap();
        assert_eq!(sections.module.len(), schein.module.len());
        // Both are indexed by the same subsets of I₂.
        let map: Vec<usize> = sections
            .sections
            .iter()
            .map(|&u| schein.ideals.iter().position(|i| i == q.element(u).bits()).unwrap())
            .collect();
        sections.module.check_homomorphism(&schein.module, &map).unwrap();
    }

    fn running() -> EquivalenceBimodule {
        let i2 = catalog::symmetric_inverse_monoid(2).unwrap();
        let (i1, _) = i2.local(i2.element_named("e1").unwrap()).unwrap();
        let tables = catalog::atlas_tables(1, 2).unwrap();
        EquivalenceBimodule::verify(&i1, &i2, &tables).unwrap()
    }

    #[test]
    fn running_bimodule_gives_biprincipal_bisheaf() {
        let x = running();
        let (q, r) = (frame(x.left()), frame(x.right()));
        let bs = lcc_bimodule(&x, q, r).unwrap();
        let report = verify_biprincipal(&bs.sheaf).unwrap();
        assert_eq!(report.bisections.len(), x.len());
        assert_eq!(report.principal_left, x.len());
        let (back, _) = bisection_bimodule(&bs.sheaf).unwrap();
        assert!(back.isomorphism_to(&x).is_some());
    }

    #[test]
    fn quantale_as_bisheaf_over_itself() {
        let s = catalog::symmetric_inverse_monoid(2).unwrap();
        let q = frame(&s);
        let m = q.len();
        let tables = BisheafTables {
            x_size: m,
            leq: (0..m).map(|a| (0..m).map(|b| q.leq(a, b)).collect()).collect(),
            lact: (0..m).map(|a| (0..m).map(|x| q.mul(a, x)).collect()).collect(),
            ract: (0..m).map(|x| (0..m).map(|b| q.mul(x, b)).collect()).collect(),
            inner_q: regular_inner(&q),
            inner_r: (0..m).map(|u| (0..m).map(|v| q.mul(q.star(u), v)).collect()).collect(),
            names: None,
        };
        let b = verify_bisheaf(q.clone(), q.clone(), &tables).unwrap();
        let report = verify_biprincipal(&b).unwrap();
        // Bisections of Q over itself are exactly the partial units.
        let units: Vec<usize> = (0..m).filter(|&u| q.is_partial_unit(u)).collect();
        assert_eq!(report.bisections, units);
    }

    #[test]
    fn non_covering_bisheaf() {
        // 𝒧∨ of X = {0, x} over (I₁, 0 < a < 1) with [x, x] = a.
        let q = frame(&catalog::symmetric_inverse_monoid(1).unwrap());
        let r = frame(&catalog::chain(3).unwrap());
        let tables = BisheafTables {
            x_size: 2,
            leq: vec![vec![true, true], vec![false, true]],
            lact: vec![vec![0, 0], vec![0, 1]],
            ract: vec![vec![0, 0, 0], vec![0, 1, 1]],
            inner_q: vec![vec![0, 0], vec![0, 1]],
            inner_r: vec![vec![0, 0], vec![0, 1]],
            names: None,
        };
        let b = verify_bisheaf(q, r, &tables).unwrap();
        assert_eq!(
            verify_biprincipal(&b),
            Err(SheafError::CoveringFails { side: "right", got: 1, expected: 2 })
        );
    }
}
