//! Sup-enlargements and the rook-matrix construction.
//!
//! `U` is a sup-enlargement of `S = eUe` when `S = SUS` and every element of
//! `U` is a join of elements of `USU`. An equivalence bimodule `X` over
//! `(S, T)` produces a joint enlargement of matrices
//!
//! ```text
//! ( s  x )
//! ( ȳ  t )     s⁻¹x = 0,  yt = 0,  sy = 0,  xt⁻¹ = 0
//! ```
//!
//! and a joint enlargement produces the bimodule `eUf` back. Every join used
//! by the matrix product is checked to exist before it is taken.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bimodule::{BiactionTables, BimoduleError, EquivalenceBimodule};
use crate::bits;
use crate::invariants::{invariance_report, InvariantError, InvarianceReport};
use crate::pseudogroup::{Pseudogroup, PseudogroupError};
use crate::semigroup::{CayleyTable, Element};

/// Bound on `|S|·|X|²·|T|`, the number of candidate quadruples.
pub const DEFAULT_QUADRUPLE_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnlargementError {
    #[error("{candidates} candidate quadruples exceed the bound {limit}")]
    TooLarge { candidates: usize, limit: usize },
    #[error("entry {entry} of {left} · {right} is a join of incompatible elements")]
    JoinUndefined { entry: &'static str, left: RookMatrix, right: RookMatrix },
    #[error("{0} violates the rook conditions")]
    RookViolated(RookMatrix),
    #[error("the matrix product disagrees with its expansion in entry {entry} at ({a}, {b}, {c})")]
    ExpansionMismatch { entry: &'static str, a: Element, b: Element, c: Element },
    #[error("{law} fails for the matrix {m}")]
    MatrixLaw { law: &'static str, m: RookMatrix },
    #[error("the diagonal copy of {side} is not its local pseudogroup")]
    EmbeddingFails { side: &'static str },
    #[error("E1 fails: {a}·{b}·{c} = {product} leaves the local pseudogroup")]
    E1Escapes { a: Element, b: Element, c: Element, product: Element },
    #[error("E1 fails: {0} is not a product a·u·c with a, c local")]
    E1Missing(Element),
    #[error("E2 fails: {0} is not a join of elements of U·S·U")]
    E2Fails(Element),
    #[error("{below} ≤ {above} but only {above} is local")]
    NotOrderIdeal { below: Element, above: Element },
    #[error("d({0}) and r({0}) are local but {0} is not")]
    ConjugateEscape(Element),
    #[error("decomposition schema {schema} fails for {m}")]
    Decomposition { schema: u8, m: RookMatrix },
    #[error("element {0} is not an idempotent")]
    NotIdempotent(Element),
    #[error("certificate does not check: {0}")]
    Certificate(String),
    #[error(transparent)]
    Pseudogroup(#[from] PseudogroupError),
    #[error(transparent)]
    Bimodule(#[from] BimoduleError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
}

/// `(s, x, ȳ, t)` with `s ∈ S`, `x, y ∈ X`, `t ∈ T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RookMatrix {
    pub s: Element,
    pub x: usize,
    pub y_bar: usize,
    pub t: Element,
}

impl std::fmt::Display for RookMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{} {} / {}̄ {}]", self.s, self.x, self.y_bar, self.t)
    }
}

/// `U = eUe·U·eUe`-style decomposition of one element of `U`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct E2Witness {
    pub element: Element,
    /// Triples `(a, s, b)` with `s` local; the products join to `element`.
    pub terms: Vec<[Element; 3]>,
}

/// A verified sup-enlargement of a local pseudogroup.
#[derive(Debug, Clone)]
pub struct SupEnlargement {
    pub local: Pseudogroup,
    /// Position in `U` of each element of the local pseudogroup.
    pub embedding: Vec<Element>,
    /// For each local `s`, a triple `(a, u, c)` with `s = a·u·c`.
    pub e1_witnesses: Vec<[Element; 3]>,
    pub e2_witnesses: Vec<E2Witness>,
}

fn local_elements(u: &Pseudogroup, e: Element) -> FixedBitSet {
    bits::bitset(u.len(), u.elements().filter(|&s| u.mul(u.mul(e, s), e) == s))
}

/// Checks E1 and E2 for `S = eUe` by brute force, together with the order
/// ideal and conjugation properties that E1 implies.
pub fn check_sup_enlargement(u: &Pseudogroup, e: Element) -> Result<SupEnlargement, EnlargementError> {
    if !u.is_idempotent(e) {
        return Err(EnlargementError::NotIdempotent(e));
    }
    let (local, embedding) = u.local(e)?;
    let in_s = local_elements(u, e);

    let mut e1_witnesses = Vec::with_capacity(embedding.len());
    let mut found = vec![None; u.len()];
    for &a in &embedding {
        for b in u.elements() {
            let ab = u.mul(a, b);
            for &c in &embedding {
                let product = u.mul(ab, c);
                if !in_s.contains(product) {
                    return Err(EnlargementError::E1Escapes { a, b, c, product });
                }
                found[product].get_or_insert([a, b, c]);
            }
        }
    }
    for &s in &embedding {
        e1_witnesses.push(found[s].ok_or(EnlargementError::E1Missing(s))?);
    }

    for s in in_s.ones() {
        for below in u.down_set(s).ones() {
            if !in_s.contains(below) {
                return Err(EnlargementError::NotOrderIdeal { below, above: s });
            }
        }
    }
    for x in u.elements() {
        if in_s.contains(u.d(x)) && in_s.contains(u.r(x)) && !in_s.contains(x) {
            return Err(EnlargementError::ConjugateEscape(x));
        }
    }

    let mut products: Vec<Option<[Element; 3]>> = vec![None; u.len()];
    for a in u.elements() {
        for &s in &embedding {
            let as_ = u.mul(a, s);
            for b in u.elements() {
                products[u.mul(as_, b)].get_or_insert([a, s, b]);
            }
        }
    }
    let present = bits::bitset(u.len(), u.elements().filter(|&p| products[p].is_some()));
    if u.join_closure(&present) != bits::full(u.len()) {
        let missing = u.elements().find(|&x| !u.join_closure(&present).contains(x)).expect("closure is not full");
        return Err(EnlargementError::E2Fails(missing));
    }
    let mut e2_witnesses = Vec::with_capacity(u.len());
    for x in u.elements() {
        let below: Vec<Element> = u.down_set(x).ones().filter(|&p| present.contains(p)).collect();
        let maximal: Vec<Element> =
            below.iter().copied().filter(|&p| below.iter().all(|&q| q == p || !u.natural_leq(p, q))).collect();
        if u.join_of(&maximal)? != x {
            return Err(EnlargementError::E2Fails(x));
        }
        let terms = maximal.iter().filter(|&&p| p != u.zero_element()).map(|&p| products[p].expect("present")).collect();
        e2_witnesses.push(E2Witness { element: x, terms });
    }
    Ok(SupEnlargement { local, embedding, e1_witnesses, e2_witnesses })
}

/// The bimodule `eUf` extracted from a joint enlargement, with the positions
/// in `U` of the elements of `eUe`, `fUf`, and `X`.
#[derive(Debug, Clone)]
pub struct ExtractedBimodule {
    pub bimodule: EquivalenceBimodule,
    pub s_embedding: Vec<Element>,
    pub t_embedding: Vec<Element>,
    pub x_elements: Vec<Element>,
}

/// `X = eUf` with multiplication actions, `⟨x, y⟩ = xy⁻¹` and
/// `[x, y] = x⁻¹y`, verified as an equivalence bimodule over `(eUe, fUf)`.
pub fn bimodule_from_enlargement(u: &Pseudogroup, e: Element, f: Element) -> Result<ExtractedBimodule, EnlargementError> {
    for g in [e, f] {
        if !u.is_idempotent(g) {
            return Err(EnlargementError::NotIdempotent(g));
        }
    }
    let (s, s_embedding) = u.local(e)?;
    let (t, t_embedding) = u.local(f)?;
    let x_elements: Vec<Element> = u.elements().filter(|&x| u.mul(u.mul(e, x), f) == x).collect();
    let position = |list: &[Element]| {
        let mut pos = vec![usize::MAX; u.len()];
        for (i, &a) in list.iter().enumerate() {
            pos[a] = i;
        }
        pos
    };
    let (spos, tpos, xpos) = (position(&s_embedding), position(&t_embedding), position(&x_elements));
    let tables = BiactionTables {
        x_size: x_elements.len(),
        lact: s_embedding.iter().map(|&a| x_elements.iter().map(|&x| xpos[u.mul(a, x)]).collect()).collect(),
        ract: x_elements.iter().map(|&x| t_embedding.iter().map(|&b| xpos[u.mul(x, b)]).collect()).collect(),
        inner_s: x_elements.iter().map(|&x| x_elements.iter().map(|&y| spos[u.mul(x, u.inv(y))]).collect()).collect(),
        inner_t: x_elements.iter().map(|&x| x_elements.iter().map(|&y| tpos[u.mul(u.inv(x), y)]).collect()).collect(),
        names: u.names().map(|names| x_elements.iter().map(|&x| names[x].clone()).collect()),
    };
    let bimodule = EquivalenceBimodule::verify(&s, &t, &tables)?;
    Ok(ExtractedBimodule { bimodule, s_embedding, t_embedding, x_elements })
}

/// A joint enlargement built from an equivalence bimodule.
#[derive(Debug, Clone)]
pub struct EnlargementWitness {
    pub u: Pseudogroup,
    pub matrices: Vec<RookMatrix>,
    /// `𝐞_S = (e_S, 0, 0̄, 0)`.
    pub e_s: Element,
    /// `𝐞_T = (0, 0, 0̄, e_T)`.
    pub e_t: Element,
    /// `s ↦ (s, 0, 0̄, 0)`.
    pub s_embedding: Vec<Element>,
    /// `t ↦ (0, 0, 0̄, t)`.
    pub t_embedding: Vec<Element>,
    pub s_side: SupEnlargement,
    pub t_side: SupEnlargement,
}

/// Matrix arithmetic over a bimodule, with checked joins.
struct Rook<'a> {
    b: &'a EquivalenceBimodule,
    s: &'a Pseudogroup,
    t: &'a Pseudogroup,
}

impl Rook<'_> {
    fn join_s(&self, terms: &[Element]) -> Option<Element> {
        self.s.join_of(terms).ok()
    }

    fn join_t(&self, terms: &[Element]) -> Option<Element> {
        self.t.join_of(terms).ok()
    }

    fn join_x(&self, terms: &[usize]) -> Option<usize> {
        for (i, &a) in terms.iter().enumerate() {
            if terms[i + 1..].iter().any(|&c| self.b.join(a, c).is_none()) {
                return None;
            }
        }
        Some(terms.iter().fold(self.b.bottom(), |acc, &a| self.b.join(acc, a).expect("compatibility checked")))
    }

    fn is_rook(&self, m: RookMatrix) -> bool {
        let (b, s, t) = (self.b, self.s, self.t);
        let zero = b.bottom();
        b.lact(s.inv(m.s), m.x) == zero
            && b.ract(m.y_bar, m.t) == zero
            && b.lact(m.s, m.y_bar) == zero
            && b.ract(m.x, t.inv(m.t)) == zero
    }

    fn mul(&self, p: RookMatrix, q: RookMatrix) -> Result<RookMatrix, EnlargementError> {
        let (b, s, t) = (self.b, self.s, self.t);
        let undefined = |entry| EnlargementError::JoinUndefined { entry, left: p, right: q };
        Ok(RookMatrix {
            s: self.join_s(&[s.mul(p.s, q.s), b.inner_s(p.x, q.y_bar)]).ok_or_else(|| undefined("s"))?,
            x: self.join_x(&[b.lact(p.s, q.x), b.ract(p.x, q.t)]).ok_or_else(|| undefined("x"))?,
            y_bar: self
                .join_x(&[b.lact(s.inv(q.s), p.y_bar), b.ract(q.y_bar, t.inv(p.t))])
                .ok_or_else(|| undefined("ȳ"))?,
            t: self.join_t(&[b.inner_t(p.y_bar, q.x), t.mul(p.t, q.t)]).ok_or_else(|| undefined("t"))?,
        })
    }

    fn inv(&self, m: RookMatrix) -> RookMatrix {
        RookMatrix { s: self.s.inv(m.s), x: m.y_bar, y_bar: m.x, t: self.t.inv(m.t) }
    }

    /// The triple product with every join fully expanded.
    fn expand(&self, m1: RookMatrix, m2: RookMatrix, m3: RookMatrix) -> Option<RookMatrix> {
        let (b, s, t) = (self.b, self.s, self.t);
        let (s1, x1, y1, t1) = (m1.s, m1.x, m1.y_bar, m1.t);
        let (s2, x2, y2, t2) = (m2.s, m2.x, m2.y_bar, m2.t);
        let (s3, x3, y3, t3) = (m3.s, m3.x, m3.y_bar, m3.t);
        let (si2, si3, ti1, ti2) = (s.inv(s2), s.inv(s3), t.inv(t1), t.inv(t2));
        Some(RookMatrix {
            s: self.join_s(&[
                s.mul(s.mul(s1, s2), s3),
                s.mul(b.inner_s(x1, y2), s3),
                s.mul(s1, b.inner_s(x2, y3)),
                b.inner_s(b.ract(x1, t2), y3),
            ])?,
            x: self.join_x(&[
                b.lact(s.mul(s1, s2), x3),
                b.lact(b.inner_s(x1, y2), x3),
                b.ract(b.lact(s1, x2), t3),
                b.ract(x1, t.mul(t2, t3)),
            ])?,
            y_bar: self.join_x(&[
                b.lact(s.mul(si3, si2), y1),
                b.ract(b.lact(si3, y2), ti1),
                b.ract(y3, b.inner_t(x2, y1)),
                b.ract(y3, t.mul(ti2, ti1)),
            ])?,
            t: self.join_t(&[
                b.inner_t(b.lact(si2, y1), x3),
                b.inner_t(b.ract(y2, ti1), x3),
                t.mul(b.inner_t(y1, x2), t3),
                t.mul(t.mul(t1, t2), t3),
            ])?,
        })
    }
}

/// Builds the rook-matrix enlargement of an equivalence bimodule and checks
/// it: well-defined products, rook inheritance, the fully expanded triple
/// product, inverses and idempotents, componentwise joins, both diagonal
/// embeddings, the four decomposition schemas, and E1/E2 for both corners.
pub fn enlarge_from_bimodule(b: &EquivalenceBimodule, limit: usize) -> Result<EnlargementWitness, EnlargementError> {
    let (s, t) = (b.left(), b.right());
    let xs = b.len();
    let candidates = s.len().saturating_mul(xs).saturating_mul(xs).saturating_mul(t.len());
    if candidates > limit {
        return Err(EnlargementError::TooLarge { candidates, limit });
    }
    let rook = Rook { b, s, t };
    let mut matrices = Vec::new();
    for ms in s.elements() {
        for x in 0..xs {
            for y_bar in 0..xs {
                for mt in t.elements() {
                    let m = RookMatrix { s: ms, x, y_bar, t: mt };
                    if rook.is_rook(m) {
                        matrices.push(m);
                    }
                }
            }
        }
    }
    let index: HashMap<RookMatrix, usize> = matrices.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let n = matrices.len();
    let mut mult = vec![vec![0; n]; n];
    for (i, &p) in matrices.iter().enumerate() {
        for (j, &q) in matrices.iter().enumerate() {
            let pq = rook.mul(p, q)?;
            mult[i][j] = *index.get(&pq).ok_or(EnlargementError::RookViolated(pq))?;
        }
    }
    let names = matrices
        .iter()
        .map(|m| format!("[{} {} / {} {}]", s.name(m.s), b.name(m.x), b.name(m.y_bar), t.name(m.t)))
        .collect();
    let u = Pseudogroup::from_table(&CayleyTable { n, mult, names: Some(names), zero: None, identity: None })?;

    for (i, &m1) in matrices.iter().enumerate() {
        for (j, &m2) in matrices.iter().enumerate() {
            let ij = u.mul(i, j);
            for (k, &m3) in matrices.iter().enumerate() {
                let product = matrices[u.mul(ij, k)];
                let mismatch = |entry| EnlargementError::ExpansionMismatch { entry, a: i, b: j, c: k };
                let expanded = rook.expand(m1, m2, m3).ok_or_else(|| mismatch("join"))?;
                for (entry, l, r) in [
                    ("s", expanded.s, product.s),
                    ("x", expanded.x, product.x),
                    ("ȳ", expanded.y_bar, product.y_bar),
                    ("t", expanded.t, product.t),
                ] {
                    if l != r {
                        return Err(mismatch(entry));
                    }
                }
            }
        }
    }

    let zero_x = b.bottom();
    let diag = |ms, mt| RookMatrix { s: ms, x: zero_x, y_bar: zero_x, t: mt };
    let law = |law, m| EnlargementError::MatrixLaw { law, m };
    for (i, &m) in matrices.iter().enumerate() {
        if matrices[u.inv(i)] != rook.inv(m) {
            return Err(law("(s, x, ȳ, t)⁻¹ = (s⁻¹, y, x̄, t⁻¹)", m));
        }
        let r = matrices[u.r(i)];
        let expected_r = diag(
            s.join(s.r(m.s), b.inner_s(m.x, m.x)).ok_or_else(|| law("ss⁻¹ ∼ ⟨x, x⟩", m))?,
            t.join(b.inner_t(m.y_bar, m.y_bar), t.r(m.t)).ok_or_else(|| law("[y, y] ∼ tt⁻¹", m))?,
        );
        if r != expected_r {
            return Err(law("m·m⁻¹ = (ss⁻¹ ∨ ⟨x, x⟩, 0, 0̄, [y, y] ∨ tt⁻¹)", m));
        }
        let is_diagonal = m.x == zero_x && m.y_bar == zero_x && s.is_idempotent(m.s) && t.is_idempotent(m.t);
        if u.is_idempotent(i) != is_diagonal {
            return Err(law("idempotents are the diagonal (e, 0, 0̄, f)", m));
        }
        for (j, &q) in matrices.iter().enumerate() {
            let Some(join) = u.join(i, j) else { continue };
            let componentwise = RookMatrix {
                s: s.join(m.s, q.s).ok_or_else(|| law("compatible matrices have compatible entries", m))?,
                x: b.join(m.x, q.x).ok_or_else(|| law("compatible matrices have compatible entries", m))?,
                y_bar: b.join(m.y_bar, q.y_bar).ok_or_else(|| law("compatible matrices have compatible entries", m))?,
                t: t.join(m.t, q.t).ok_or_else(|| law("compatible matrices have compatible entries", m))?,
            };
            if matrices[join] != componentwise {
                return Err(law("joins are componentwise", m));
            }
        }
    }
    let identity = diag(s.top(), t.top());
    if u.identity() != Some(index[&identity]) || u.zero_element() != index[&diag(s.zero_element(), t.zero_element())] {
        return Err(law("identity and zero are diagonal", identity));
    }

    let e_s = index[&diag(s.top(), t.zero_element())];
    let e_t = index[&diag(s.zero_element(), t.top())];
    let s_embedding: Vec<Element> = s.elements().map(|a| index[&diag(a, t.zero_element())]).collect();
    let t_embedding: Vec<Element> = t.elements().map(|a| index[&diag(s.zero_element(), a)]).collect();
    let s_side = check_sup_enlargement(&u, e_s)?;
    let t_side = check_sup_enlargement(&u, e_t)?;
    for (side, pg, embedding, report) in [("S", s, &s_embedding, &s_side), ("T", t, &t_embedding, &t_side)] {
        let mut sorted = embedding.clone();
        sorted.sort_unstable();
        let preserves = pg.elements().all(|a| {
            pg.elements().all(|c| u.mul(embedding[a], embedding[c]) == embedding[pg.mul(a, c)])
        });
        if sorted != report.embedding || !preserves {
            return Err(EnlargementError::EmbeddingFails { side });
        }
    }
    let witness = EnlargementWitness { u, matrices, e_s, e_t, s_embedding, t_embedding, s_side, t_side };
    check_decompositions(b, &witness)?;
    Ok(witness)
}

/// Checks that every matrix is the join of its four corners, and that each
/// corner factors through the copy of `S` (schemas 1 to 4) and through the
/// copy of `T` (the mirrored schemas).
fn check_decompositions(b: &EquivalenceBimodule, w: &EnlargementWitness) -> Result<(), EnlargementError> {
    let (s, t, u) = (b.left(), b.right(), &w.u);
    let index: HashMap<RookMatrix, usize> = w.matrices.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let (zs, zx, zt) = (s.zero_element(), b.bottom(), t.zero_element());
    let at = |ms, x, y_bar, mt| index.get(&RookMatrix { s: ms, x, y_bar, t: mt }).copied();
    let mul = |list: &[usize]| u.mul_all(list);
    for (i, &m) in w.matrices.iter().enumerate() {
        let fail = |schema| EnlargementError::Decomposition { schema, m };
        let corners = [at(m.s, zx, zx, zt), at(zs, m.x, zx, zt), at(zs, zx, m.y_bar, zt), at(zs, zx, zx, m.t)];
        let corners: Vec<usize> = corners.into_iter().collect::<Option<_>>().ok_or_else(|| fail(0))?;
        if u.join_of(&corners)? != i {
            return Err(fail(0));
        }
        let s_diag = |a| at(a, zx, zx, zt).expect("diagonal");
        let t_diag = |a| at(zs, zx, zx, a).expect("diagonal");
        let (x_corner, y_corner) = (corners[1], corners[2]);

        // Through S: s = ⋁ ⟨s·z, z⟩ and t = ⋁ [z, z·t] over all z.
        let s_terms: Vec<Element> = (0..b.len()).map(|z| b.inner_s(b.lact(m.s, z), z)).collect();
        if s.join_of(&s_terms)? != m.s {
            return Err(fail(1));
        }
        if y_corner != mul(&[y_corner, s_diag(b.inner_s(m.y_bar, m.y_bar))]) {
            return Err(fail(2));
        }
        if x_corner != mul(&[s_diag(b.inner_s(m.x, m.x)), x_corner]) {
            return Err(fail(3));
        }
        let mut t_terms = Vec::with_capacity(b.len());
        for z in 0..b.len() {
            let v = b.ract(z, m.t);
            let (uz, vz) = (at(zs, zx, z, zt).ok_or_else(|| fail(4))?, at(zs, v, zx, zt).ok_or_else(|| fail(4))?);
            let product = mul(&[uz, s_diag(b.inner_s(z, z)), vz]);
            if w.matrices[product] != (RookMatrix { s: zs, x: zx, y_bar: zx, t: b.inner_t(z, v) }) {
                return Err(fail(4));
            }
            t_terms.push(b.inner_t(z, v));
        }
        if t.join_of(&t_terms)? != m.t {
            return Err(fail(4));
        }

        // Through T, mirrored.
        if x_corner != mul(&[x_corner, t_diag(b.inner_t(m.x, m.x))]) {
            return Err(fail(5));
        }
        if y_corner != mul(&[t_diag(b.inner_t(m.y_bar, m.y_bar)), y_corner]) {
            return Err(fail(6));
        }
        for z in 0..b.len() {
            let v = b.lact(s.inv(m.s), z);
            let (xz, vz) = (at(zs, z, zx, zt).ok_or_else(|| fail(7))?, at(zs, zx, v, zt).ok_or_else(|| fail(7))?);
            let product = mul(&[xz, t_diag(b.inner_t(z, z)), vz]);
            if w.matrices[product] != (RookMatrix { s: b.inner_s(z, v), x: zx, y_bar: zx, t: zt }) {
                return Err(fail(7));
            }
        }
    }
    Ok(())
}

/// Both corners of a joint enlargement, as recorded in a certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SidePair<W> {
    pub s: W,
    pub t: W,
}

/// A machine-checkable record of a Morita equivalence: the enlargement `U`
/// with its two corner idempotents, and the E1/E2 witnesses as indices into
/// `U`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub s: CayleyTable,
    pub t: CayleyTable,
    pub bimodule_hash: String,
    pub u_size: usize,
    pub u: CayleyTable,
    pub e_s: Element,
    pub e_t: Element,
    pub e1_witnesses: SidePair<Vec<[Element; 3]>>,
    pub e2_witnesses: SidePair<Vec<E2Witness>>,
    pub invariants: InvarianceReport,
}

/// SHA-256 of the canonical JSON encoding of the bimodule tables.
pub fn bimodule_hash(tables: &BiactionTables) -> String {
    let json = serde_json::to_vec(tables).expect("tables serialize");
    hex::encode(Sha256::digest(json))
}

/// Verifies the bimodule, builds its enlargement, certifies E1/E2 for both
/// corners, and compares the Morita invariants of the two sides.
pub fn joint_equivalence(
    s: &Pseudogroup,
    t: &Pseudogroup,
    tables: &BiactionTables,
    limit: usize,
) -> Result<Certificate, EnlargementError> {
    let b = EquivalenceBimodule::verify(s, t, tables)?;
    let w = enlarge_from_bimodule(&b, limit)?;
    let invariants = invariance_report(s, t, &w.u, w.e_s, w.e_t)?;
    Ok(Certificate {
        s: s.to_table(),
        t: t.to_table(),
        bimodule_hash: bimodule_hash(tables),
        u_size: w.u.len(),
        u: w.u.to_table(),
        e_s: w.e_s,
        e_t: w.e_t,
        e1_witnesses: SidePair { s: w.s_side.e1_witnesses, t: w.t_side.e1_witnesses },
        e2_witnesses: SidePair { s: w.s_side.e2_witnesses, t: w.t_side.e2_witnesses },
        invariants,
    })
}

/// Re-checks a certificate from its own data: `U` is a pseudogroup, its
/// corners are isomorphic to `S` and `T`, and every witness multiplies out.
pub fn check_certificate(cert: &Certificate) -> Result<(), EnlargementError> {
    let bad = |what: String| Err(EnlargementError::Certificate(what));
    let u = Pseudogroup::from_table(&cert.u)?;
    if u.len() != cert.u_size {
        return bad("u_size".to_string());
    }
    let sides = [
        ("s", &cert.s, cert.e_s, &cert.e1_witnesses.s, &cert.e2_witnesses.s),
        ("t", &cert.t, cert.e_t, &cert.e1_witnesses.t, &cert.e2_witnesses.t),
    ];
    for (side, table, e, e1, e2) in sides {
        if e >= u.len() || !u.is_idempotent(e) {
            return bad(format!("corner {side}"));
        }
        let corner = local_elements(&u, e);
        if corner.count_ones(..) != table.n || Pseudogroup::from_table(table)?.len() != table.n {
            return bad(format!("corner {side} has the wrong size"));
        }
        let in_range = |w: &[Element; 3]| w.iter().all(|&a| a < u.len());
        let mut covered = FixedBitSet::with_capacity(u.len());
        for w in e1 {
            if !in_range(w) || !corner.contains(w[0]) || !corner.contains(w[2]) {
                return bad(format!("E1 witness {w:?} for {side}"));
            }
            covered.insert(u.mul_all(w));
        }
        if covered != corner {
            return bad(format!("E1 witnesses for {side} do not cover the corner"));
        }
        if e2.len() != u.len() {
            return bad(format!("E2 witnesses for {side} do not cover U"));
        }
        for w in e2 {
            let mut products = Vec::with_capacity(w.terms.len());
            for term in &w.terms {
                if !in_range(term) || !corner.contains(term[1]) {
                    return bad(format!("E2 term {term:?} for {side}"));
                }
                products.push(u.mul_all(term));
            }
            if u.join_of(&products).ok() != Some(w.element) {
                return bad(format!("E2 witness for {} on {side}", w.element));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn el(s: &Pseudogroup, name: &str) -> Element {
        s.element_named(name).unwrap()
    }

    #[test]
    fn i2_enlarges_its_corner() {
        let u = catalog::symmetric_inverse_monoid(2).unwrap();
        let report = check_sup_enlargement(&u, el(&u, "e1")).unwrap();
        assert_eq!(report.local.len(), 2);
        // f_{2,2} = f_{2,1}·f_{1,1}·f_{1,2} is one product of U·S·U.
        let e2 = &report.e2_witnesses[el(&u, "e2")];
        assert_eq!(e2.terms.len(), 1);
        assert_eq!(u.mul_all(&e2.terms[0]), el(&u, "e2"));
    }

    #[test]
    fn identity_corner_is_trivial() {
        for (name, u) in catalog::pseudogroups(34) {
            let report = check_sup_enlargement(&u, u.top()).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(report.local.len(), u.len());
        }
    }

    #[test]
    fn zero_corner_fails_e2() {
        let u = catalog::symmetric_inverse_monoid(2).unwrap();
        assert!(matches!(check_sup_enlargement(&u, u.zero_element()), Err(EnlargementError::E2Fails(_))));
    }

    #[test]
    fn extract_running_bimodule() {
        let u = catalog::symmetric_inverse_monoid(2).unwrap();
        let x = bimodule_from_enlargement(&u, el(&u, "e1"), u.top()).unwrap();
        let mut names: Vec<String> = x.x_elements.iter().map(|&a| u.name(a)).collect();
        names.sort();
        assert_eq!(names, ["0", "b", "e1"]);
        let atlas = catalog::atlas_bimodule(1, 2).unwrap();
        assert!(x.bimodule.isomorphism_to(&atlas).is_some());
    }

    #[test]
    fn extract_self_equivalence() {
        let u = catalog::symmetric_inverse_monoid(2).unwrap();
        let x = bimodule_from_enlargement(&u, u.top(), u.top()).unwrap();
        assert_eq!(x.bimodule.len(), u.len());
    }

    #[test]
    fn extract_from_i3() {
        let u = catalog::symmetric_inverse_monoid(3).unwrap();
        let x = bimodule_from_enlargement(&u, el(&u, "1>1"), u.top()).unwrap();
        assert_eq!(x.bimodule.len(), 4);
    }

    #[test]
    fn running_bimodule_enlarges_to_i3_size() {
        let b = catalog::atlas_bimodule(1, 2).unwrap();
        let w = enlarge_from_bimodule(&b, DEFAULT_QUADRUPLE_LIMIT).unwrap();
        assert_eq!(w.u.len(), 34);
        let round = bimodule_from_enlargement(&w.u, w.e_s, w.e_t).unwrap();
        assert!(round.bimodule.isomorphism_to(&b).is_some());
    }

    #[test]
    fn one_point_bimodule_gives_i2() {
        // X = {0, x} over (I₁, I₁) with both inner products of x the identity.
        let b = catalog::atlas_bimodule(1, 1).unwrap();
        let w = enlarge_from_bimodule(&b, DEFAULT_QUADRUPLE_LIMIT).unwrap();
        assert_eq!(w.u.len(), 7);
        let nonzero: Vec<Element> = w.u.idempotents().into_iter().filter(|&e| e != w.u.zero_element()).collect();
        assert_eq!(nonzero.len(), 3);
        assert!(nonzero.contains(&w.e_s) && nonzero.contains(&w.e_t));
    }

    #[test]
    fn size_guard() {
        let b = catalog::atlas_bimodule(1, 2).unwrap();
        assert!(matches!(enlarge_from_bimodule(&b, 10), Err(EnlargementError::TooLarge { .. })));
    }

    #[test]
    fn certificate_checks() {
        let i1 = catalog::symmetric_inverse_monoid(1).unwrap();
        let i2 = catalog::symmetric_inverse_monoid(2).unwrap();
        let tables = catalog::atlas_tables(1, 2).unwrap();
        let mut cert = joint_equivalence(&i1, &i2, &tables, DEFAULT_QUADRUPLE_LIMIT).unwrap();
        check_certificate(&cert).unwrap();
        assert!(cert.invariants.d_counts_differ);
        cert.e2_witnesses.t[5].terms.clear();
        assert!(check_certificate(&cert).is_err());
    }
}
