//! Certified lower bounds for the Krohn–Rhodes group complexity of finite
//! group mapping monoids, via flows on the set-partition lattice.

pub mod error;
pub mod explicit;
pub mod fixtures;
pub mod laws;
pub mod loopable;
pub mod monoid;
pub mod presentation;
pub mod sp;
pub mod states;
pub mod symbolic;

pub use error::{Error, GmReason, Result};
pub use explicit::FlowRelation;
pub use monoid::{FiniteMonoid, GroupMappingCert, PartialAction};
pub use sp::{SetElem, SetPartition};
pub use symbolic::{EvalContext, FlowTerm};
