//! Instrumented constructive TSP heuristics.
//!
//! Tours are built one move at a time and every move is recorded with its
//! arc count, weight effect and relative change ([`trace`]). Finished tours
//! are compared with exact optima ([`oracle`]) and checked against the
//! harmonic and logarithmic bounds on the performance ratio ([`bounds`]).
//!
//! Data-parallel work (sweeps, Held–Karp layers) uses rayon when the
//! `parallel` feature is enabled and runs sequentially otherwise; see
//! [`exec::Execution`].

#![allow(clippy::needless_range_loop)]

pub mod bounds;
pub mod dsu;
pub mod exec;
pub mod generate;
pub mod heuristics;
pub mod instance;
pub mod json;
pub mod oracle;
pub mod sweep;
pub mod trace;
pub mod tsplib;

pub use bounds::{build_report, harmonic, harmonic_vs_log, pr_sum, BoundReport, HarmonicRow};
pub use exec::Execution;
pub use heuristics::{cheapest_insertion, greedy_edge, nearest_neighbor, Heuristic};
pub use instance::{Arc, Instance, InstanceError, Point, Weight};
pub use json::{report_to_json, trace_from_json, trace_to_json};
pub use oracle::{brute_force_opt, held_karp_opt, optimum, Method, OracleError, OracleResult};
pub use trace::{
    apply_step, check_avarc, step_ratio, validate_trace, AvArcVerdict, ConstructionStep,
    PartialSolution, Trace, Violation,
};
pub use tsplib::{emit_tsplib, emit_tsplib_coords, parse_tsplib};
