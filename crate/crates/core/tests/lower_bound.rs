use std::time::{Duration, Instant};

use krflow_core::fixtures::m1;
use krflow_core::loopable::TypeIOracle;
use krflow_core::monoid::cyclic_group;
use krflow_core::states::{lower_bound, Backend, Budgets, Tier};
use krflow_core::Error;

#[test]
fn m1_has_no_bad_pairs() {
    let start = Instant::now();
    let rep = lower_bound(&m1(), "m1", 1, &TypeIOracle::Trivial, Backend::Both, &Budgets::default()).unwrap();
    assert!(start.elapsed() < Duration::from_secs(120));
    assert_eq!(rep.bound, 1);
    assert!(rep.bad_pairs.is_empty());
    assert_eq!(rep.tier, vec![Tier::Exact, Tier::UnderApprox]);
    assert_eq!(rep.levels.len(), 2);
    for l in &rep.levels {
        assert_eq!(l.bad_pairs, 0);
        assert_eq!(l.dominated, Some(true), "level {}", l.level);
        assert_eq!(l.symbolic.as_ref().unwrap().states, l.explicit.as_ref().unwrap().states);
    }
    assert!(!rep.budget_exhausted);
}

#[test]
fn reports_are_deterministic() {
    let run =
        || lower_bound(&m1(), "m1", 1, &TypeIOracle::Trivial, Backend::Both, &Budgets::default()).unwrap().to_json();
    let first = run();
    assert_eq!(first, run());
    assert!(first.contains("\"tool_version\""));
    assert!(first.contains("EXACT-explicit"));
}

#[test]
fn declared_oracle_is_echoed_as_unverified() {
    let m = m1();
    let oracle = TypeIOracle::Declared(vec![(0..m.size()).collect()]);
    let rep = lower_bound(&m, "m1", 1, &oracle, Backend::Symbolic, &Budgets::default()).unwrap();
    assert_eq!(rep.oracle.kind, "DECLARED");
    assert_eq!(rep.oracle.submonoids[0].tag, Some("UNVERIFIED-ASSERTION"));
    assert_eq!(rep.bound, 1);
}

#[test]
fn groups_are_not_group_mapping() {
    let e = lower_bound(&cyclic_group(3), "z3", 0, &TypeIOracle::Trivial, Backend::Symbolic, &Budgets::default());
    assert!(matches!(e, Err(Error::NotGroupMapping(_))));
}
