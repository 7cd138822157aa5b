//! Double-slit interference of a massive particle coupled to a thermal
//! oscillator bath.
//!
//! * [`params`]: SI inputs, derived scales and the dimensionless groups.
//! * [`closedform`]: exact and weak-coupling screen distributions, the
//!   electron-plate coupling rate.
//! * [`visibility`]: fringe contrast from the reduced formula and measured
//!   on sampled profiles.
//! * [`oracle`]: characteristics solution of the master equation, used to
//!   validate the closed forms.

pub mod closedform;
pub mod error;
pub mod oracle;
pub mod params;
pub mod profile;
pub mod series;
pub mod visibility;

pub use closedform::{
    envelope_factor, gamma_electron_plate, gamma_electron_plate_gaussian, pattern_exact,
    pattern_exact_for, pattern_weak, pattern_weak_for, ExactPatternParams,
};
pub use error::{Error, Result};
pub use oracle::{
    diagonal_profile, diagonal_profile_run, evolve_point, initial_transform, trace, InitialState,
    MasterEquation, OracleConfig, OracleRun,
};
pub use params::{
    derive_scales, dimensionless, DerivedScales, DimensionlessGroups, PhysicalParams, Scenario,
    SlitGeometry, Warning,
};
pub use profile::{symmetric_grid, PatternProfile, ProfileMeta, Source, Variant};
pub use visibility::{
    fringe_center, fringe_period, visibility_formula, visibility_formula_for, visibility_numeric,
    FringeReading,
};
