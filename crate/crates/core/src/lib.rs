//! Sparse discrete-Laplace and Gaussian locally private channels.
//!
//! A sparse channel draws its output from a small input-dependent support
//! `S(x)` with probability proportional to a kernel of the distance to `x`.
//! This crate evaluates such channels, computes their exact pure and
//! approximate local-privacy guarantees, and calibrates the support size of
//! radius-truncated channels against an `(ε, δ)` target.
//!
//! - [`mechanism`]: kernels, general specs, truncated channels, distortion moments
//! - [`privacy`]: pointwise loss, pure-LDP level, ordered defects, separation defects
//! - [`oracle`]: dense hockey-stick reference computations
//! - [`calibration`]: feasibility, clean-regime bounds, design search, sweeps
//! - [`sampling`]: seeded inverse-CDF sampling
//! - [`cli`]: the `sparse-ldp` command-line tool

pub mod calibration;
pub mod cli;
pub mod document;
pub mod error;
pub mod format;
pub mod mechanism;
pub mod oracle;
pub mod privacy;
pub mod sampling;

pub use calibration::{
    feasibility_min_support, gaussian_clean_bound, gaussian_support_window, laplace_clean_bound,
    laplace_sufficient_support, min_feasible_support, sweep_param, sweep_support, CleanBoundReport,
    DesignResult, SupportWindow, SweepRow,
};
pub use error::{Error, Result};
pub use mechanism::{
    Channel, DistanceModel, DistortionMoments, FamilyKind, KernelFamily, MechanismSpec,
    TruncatedMechanism, TruncatedParams,
};
pub use oracle::{brute_force_defect, max_event_excess};
pub use privacy::{
    gaussian_overlap_threshold, ordered_defect, pointwise_loss, pure_ldp_bound, pure_ldp_epsilon,
    separation_breakdown, separation_defect, separation_defect_gaussian, separation_defect_laplace,
    worst_case_defect, DefectBreakdown, PureLdpResult, Witness, WorstCase,
};
pub use sampling::sample;
