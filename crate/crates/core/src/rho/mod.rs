//! Execution probability from a Poisson queue model.

pub mod engine;
pub mod hitting;
pub mod probe;
pub mod queue;
pub mod race;

pub use engine::{rho, rho_0plus_of_t, AlphaTable, QueueRho, RhoEngine, REFILL_TAIL};
pub use hitting::{hitting_density, HittingModel};
pub use probe::{condition_probe, ProbeOptions, ProbePoint, ProbeReport};
pub use queue::{fixed_refill, geometric_refill, QueueModel, DEFAULT_THETA};
pub use race::{
    alpha_infinity, alpha_race, ask_depletion_cdf, ask_depletion_mass, ask_depletion_mass_exact, bid_depletion_cdf,
    cancellations_ahead, depletion_density_ask, depletion_density_bid, rho_limit_0plus,
};
