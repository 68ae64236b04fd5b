//! Parameter sweeps, CSV output and the acceptance runner. Everything here
//! works in `f64`.

mod acceptance;
mod config;
mod output;
mod sweep;

pub use acceptance::{
    check_acceptance, run_acceptance, AcceptanceOptions, AcceptanceReport, CriterionResult,
};
pub use config::{default_eps_list, SweepConfig};
pub use output::{
    geometry_csv, geometry_key_values, profile_csv, spectrum_csv, sweep_csv, CSV_SCHEMA_LINE,
};
pub use sweep::{
    run_sweep, run_sweep_with, solve_point, PointFailure, PointSolution, RowFlags, SweepOutcome,
    SweepPoint, SweepRow,
};
