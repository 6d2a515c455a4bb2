//! Capacity-region bounds for discrete memoryless two-way channels.
//!
//! Two terminals exchange data over a shared memoryless channel described by
//! its two marginal transition laws. This crate computes:
//!
//! - the random-coding inner bound (grid sweep over independent inputs),
//! - the trivial rectangle outer bound from per-state one-way capacities,
//! - the alpha/beta near-symmetry deviations of the sub-channel families and
//!   the shifted outer bound they generate from the inner sweep,
//! - the epsilon-approximated capacity region,
//! - executable symmetry screens that certify when the inner and outer
//!   Shannon bounds cannot coincide, and
//! - an optional joint-input grid outer bound for cross-checking.
//!
//! The `twcap` binary drives the whole pipeline and emits JSON, CSV, and SVG
//! reports; see the crate README.

pub mod ba;
pub mod bounds;
pub mod channel;
pub mod cli;
pub mod error;
pub mod frontier;
pub mod info;
mod optim;
mod parallel;
pub mod simplex;
mod svg;
pub mod symmetry;

pub use ba::{ba_capacity, ba_capacity_default, max_output_entropy, CapacityResult};
pub use bounds::{
    alpha_star, beta_star, eps_region, full_report, full_report_detailed, inner_bound,
    outer_bound_grid, theorem4_bound, trivial_outer, AlphaStar, BetaStar, BoundsConfig,
    BoundsReport,
};
pub use channel::{
    load_channel, load_channel_with, save_channel, ChannelMatrix, Direction, Distribution,
    TwoWayChannel,
};
pub use error::{Error, Result};
pub use frontier::{hull_frontier, Frontier, RatePair};
pub use info::{
    conditional_mi, conditional_output_entropy, entropy, mutual_information, row_entropy_table,
    JointInput,
};
pub use simplex::{refine_neighborhood, GridSpec};
pub use symmetry::{
    check_condition_a, check_condition_b1, check_thm1, check_thm2, check_thm3,
    search_b2_violation, symmetry_report, SymmetryConfig, SymmetryReport,
};
