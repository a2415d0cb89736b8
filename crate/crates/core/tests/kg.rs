//! K_G against a deliberately naive saturation: start from {1} and add
//! products and weak conjugates of every member by every pair until the
//! set stops growing.

use std::collections::BTreeSet;

use krflow_core::fixtures::m1;
use krflow_core::loopable::{kg, kg_all};
use krflow_core::monoid::{cyclic_group, flip_flop, free_semilattice};
use krflow_core::FiniteMonoid;

fn brute_kg(m: &FiniteMonoid, sub: &[usize]) -> BTreeSet<usize> {
    let mut k: BTreeSet<usize> = BTreeSet::from([m.identity()]);
    loop {
        let mut next = k.clone();
        for &s in &k {
            for &t in &k {
                next.insert(m.mul(s, t));
            }
            for &a in sub {
                for &b in sub {
                    if m.mul(m.mul(a, b), a) == a {
                        next.insert(m.mul(m.mul(a, s), b));
                        next.insert(m.mul(m.mul(b, s), a));
                    }
                }
            }
        }
        if next == k {
            return k;
        }
        k = next;
    }
}

fn everything(m: &FiniteMonoid) -> Vec<usize> {
    (0..m.size()).collect()
}

#[test]
fn z2_collapses() {
    let z2 = cyclic_group(2);
    assert_eq!(kg_all(&z2), vec![z2.identity()]);
    assert_eq!(brute_kg(&z2, &everything(&z2)), BTreeSet::from([z2.identity()]));
}

#[test]
fn four_element_semilattice_is_all_of_it() {
    let s = free_semilattice(2);
    assert_eq!(s.size(), 4);
    assert_eq!(kg_all(&s), everything(&s));
    assert_eq!(brute_kg(&s, &everything(&s)), everything(&s).into_iter().collect());
}

#[test]
fn agrees_with_brute_force_elsewhere() {
    for m in [m1(), flip_flop(), cyclic_group(3), free_semilattice(3)] {
        let all = everything(&m);
        assert_eq!(kg_all(&m).into_iter().collect::<BTreeSet<_>>(), brute_kg(&m, &all));
        // and inside the submonoid {1, 0}, when there is a zero
        if let Some(z) = m.zero() {
            let sub = vec![m.identity(), z];
            assert_eq!(kg(&m, &sub).into_iter().collect::<BTreeSet<_>>(), brute_kg(&m, &sub));
        }
    }
}

#[test]
fn m1_kg_holds_idempotents() {
    let m = m1();
    let k = kg_all(&m);
    for e in (0..m.size()).filter(|&e| m.is_idempotent(e)) {
        assert!(k.contains(&e), "{}", m.name(e));
    }
}
