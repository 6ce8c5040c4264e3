//! Model definitions: the delayed scalar model in a shifting habitat and
//! cooperative systems, their built-in reactions, and hypothesis checks.

mod assumptions;
mod cooperative;
mod equilibrium;
mod reaction;
mod scalar;
mod tabulated;

pub use assumptions::{halton, AssumptionReport, ClauseCheck, ASSUMPTION_TOL};
pub use cooperative::{CooperativeModel, LinearReaction, PairParams, PairReaction};
pub use equilibrium::{bisect_fixed_point, newton_fixed_point, scalar_fixed_point, vector_equilibrium};
pub use reaction::{
    tanh_profile, ClosureReaction, LogisticReaction, RickerReaction, ScalarReaction, Side,
    VectorReaction, FD_STEP,
};
pub use scalar::{LogisticParams, RickerParams, ScalarShiftModel};
pub use tabulated::TabulatedReaction;

pub(crate) use scalar::s_nodes;
