// Negated comparisons are the NaN-rejecting guards used throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec_prob;
pub mod lob;
pub mod market;
pub mod numerics;
pub mod placement;
pub mod rho;
pub mod sim;

pub use error::{Error, Result};
pub use exec_prob::{ConstantRho, ExecKind, ExecProbability, TabulatedRho};
pub use lob::{LobEvent, RateEstimates};
pub use market::{MarketParams, PriceModel};
pub use numerics::{QuadratureSpec, Tolerances};
pub use placement::{BoundaryCase, PlacementSolution, SolverOptions};
pub use rho::{HittingModel, QueueModel, QueueRho, RhoEngine};
pub use sim::{McEstimate, SimConfig};
