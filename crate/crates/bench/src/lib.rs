//! Shared setup for the benches under `benches/`.

use krflow_core::explicit::FlowSystem;
use krflow_core::fixtures::m1;
use krflow_core::loopable::TypeIOracle;
use krflow_core::monoid::check_group_mapping;
use krflow_core::sp::MATERIALIZE_BOUND;
use krflow_core::{EvalContext, FlowRelation};

/// The letter flows of M1 over its 52-element lattice.
pub fn m1_system() -> FlowSystem {
    let m = m1();
    let cert = check_group_mapping(&m).expect("m1 is group mapping");
    FlowSystem::from_monoid(&m, &cert, MATERIALIZE_BOUND).expect("|R| = 4 fits")
}

pub fn m1_context() -> EvalContext {
    EvalContext::new(&m1(), 0, &TypeIOracle::Trivial).expect("level 0 needs no oracle")
}

/// ab, a nontrivial flow to feed star and omega.
pub fn ab(sys: &FlowSystem) -> FlowRelation {
    sys.word_flow(&["a", "b"]).expect("a and b are letters")
}
