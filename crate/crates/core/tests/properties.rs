//! Randomized checks of invariants that the unit tests cover only at fixed
//! points.

use std::sync::OnceLock;

use proptest::prelude::*;

use morita::invariants::{compose_pencils, pencil_preorder};
use morita::quantale::{lcc, QuantalFrame};
use morita::semigroup::CayleyTable;
use morita::{bits, catalog, InverseSemigroup, Pseudogroup};

fn i3() -> &'static Pseudogroup {
    static S: OnceLock<Pseudogroup> = OnceLock::new();
    S.get_or_init(|| catalog::symmetric_inverse_monoid(3).unwrap())
}

fn q2() -> &'static QuantalFrame {
    static Q: OnceLock<QuantalFrame> = OnceLock::new();
    Q.get_or_init(|| lcc(&catalog::symmetric_inverse_monoid(2).unwrap()).unwrap())
}

/// The table of `S` with elements renamed by `perm`.
fn relabel(s: &InverseSemigroup, perm: &[usize]) -> CayleyTable {
    let n = s.len();
    let mut inverse = vec![0; n];
    for (a, &p) in perm.iter().enumerate() {
        inverse[p] = a;
    }
    CayleyTable::from_fn(n, |x, y| perm[s.mul(inverse[x], inverse[y])])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn order_two_ways(a in 0..34usize, b in 0..34usize) {
        let s = i3();
        prop_assert_eq!(s.natural_leq(a, b), s.natural_leq_via_idempotent(a, b));
        prop_assert_eq!(s.natural_leq(a, b), s.mul(b, s.d(a)) == a);
    }

    #[test]
    fn join_closure_is_a_closure(mask in any::<u64>()) {
        let s = i3();
        let y = bits::bitset(34, (0..34).filter(|&i| mask >> i & 1 == 1));
        let c = s.join_closure(&y);
        prop_assert!(y.is_subset(&c));
        prop_assert_eq!(s.join_closure(&c), c.clone());
        for a in c.ones() {
            for b in c.ones() {
                if let Some(j) = s.join(a, b) {
                    prop_assert!(c.contains(j));
                }
            }
        }
    }

    #[test]
    fn quantale_laws(a in 0..16usize, b in 0..16usize, c in 0..16usize) {
        let q = q2();
        prop_assert_eq!(q.star(q.mul(a, b)), q.mul(q.star(b), q.star(a)));
        prop_assert_eq!(q.mul(a, q.join(b, c)), q.join(q.mul(a, b), q.mul(a, c)));
        prop_assert_eq!(q.mul(q.join(b, c), a), q.join(q.mul(b, a), q.mul(c, a)));
        prop_assert_eq!(q.mul(q.mul(a, b), c), q.mul(a, q.mul(b, c)));
        prop_assert_eq!(q.meet(a, q.join(b, c)), q.join(q.meet(a, b), q.meet(a, c)));
        // Stably Gelfand: a·a*·a ≤ a whenever a·a* ≤ e.
        if q.leq(q.mul(a, q.star(a)), q.unit()) {
            prop_assert!(q.leq(q.mul(q.mul(a, q.star(a)), a), a));
        }
    }

    #[test]
    fn relabelled_tables_keep_their_invariants(perm in Just((0..7usize).collect::<Vec<_>>()).prop_shuffle()) {
        let s = catalog::symmetric_inverse_monoid(2).unwrap();
        let t = Pseudogroup::from_table(&relabel(&s, &perm)).unwrap();
        prop_assert_eq!(lcc(&t).unwrap().len(), 16);
        prop_assert_eq!(t.idempotents().len(), 4);
        prop_assert_eq!(t.d_classes().len(), 3);
    }

    #[test]
    fn pencils_compose(i in 0..8usize, j in 0..8usize, k in 0..8usize) {
        let s = i3();
        let idem = s.idempotents();
        let (e, f, g) = (idem[i], idem[j], idem[k]);
        if let (Some(x), Some(y)) = (pencil_preorder(s, e, f).unwrap(), pencil_preorder(s, f, g).unwrap()) {
            let z = compose_pencils(s, &x, &y).unwrap();
            z.verify(s).unwrap();
            prop_assert!(pencil_preorder(s, e, g).unwrap().is_some());
        }
    }

    #[test]
    fn atlas_heap_laws(m in 1..=3usize, n in 1..=3usize, seed in any::<[usize; 3]>()) {
        let b = catalog::atlas_bimodule(m, n).unwrap();
        let [x, y, z] = seed.map(|v| v % b.len());
        prop_assert_eq!(b.heap(x, x, x), x);
        prop_assert_eq!(b.lact(b.inner_s(x, y), z), b.ract(x, b.inner_t(y, z)));
        prop_assert_eq!(b.heap(x, y, z), b.lact(b.inner_s(x, y), z));
        let (s, t) = (b.left(), b.right());
        prop_assert_eq!(s.inv(b.inner_s(x, y)), b.inner_s(y, x));
        prop_assert_eq!(t.inv(b.inner_t(x, y)), b.inner_t(y, x));
    }
}
