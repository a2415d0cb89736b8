//! Small named instances used by tests, benches and the CLI's self-checks.

use crate::monoid::{cyclic_group, rees_with_identity, FiniteMonoid, ReesElem};

/// ℳ⁰(Z₂, 2, 2, C) ∪ {I} with C = [[1, 1], [1, g]] (rows indexed by b),
/// generated by a = (a0, 1, b0), b = (a1, 1, b1) and the zero z.
///
/// Ten elements: I, 0, then the eight triples in (a, g, b) order.  Its
/// distinguished R-class is the a0 row, so |R| = 4, and its group
/// complexity is 1.
pub fn m1() -> FiniteMonoid {
    rees_with_identity(
        &cyclic_group(2),
        2,
        2,
        &[vec![Some(0), Some(0)], vec![Some(0), Some(1)]],
        &[("a", ReesElem::Triple(0, 0, 0)), ("b", ReesElem::Triple(1, 0, 1)), ("z", ReesElem::Zero)],
    )
    .expect("M1 is a valid monoid")
}
