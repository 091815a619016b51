//! Renormalized Brownian segments near time 0 and the tube event around γ₀.

mod cascade;
mod p0;
mod segment;
mod stress;

pub use cascade::{run_cascade, run_cascades, ExitCheck, RenormConfig, RenormTrace};
pub use p0::{estimate_p0_pde, tube_survival_mc, tube_survival_pde, TubeMonteCarlo, TubeSurvival, P0_RADIUS};
pub use segment::{
    choose_tprime, conditioned_law_check, radial_quantile, renormalized_segment, tprime_constant, LawReport,
    LAW_WINDOW_STEPS,
};
pub use stress::{separation_stress, StressReport};
