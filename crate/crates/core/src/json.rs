//! JSON forms of traces and reports.
//!
//! A trace serializes as
//! `{instance_name, heuristic, n, steps[], final_arcs[], final_weight}` with
//! steps `{i, a_new[], a_old[], m, delta_a, w_before, w_after}` and arcs as
//! `[u, v]`. `r` and `rho` are derived and recomputed on load.

use thiserror::Error;

use crate::bounds::BoundReport;
use crate::trace::Trace;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JsonError {
    #[error("{path}: {message}")]
    Field { path: String, message: String },
    #[error("{path}: {message}")]
    Invariant { path: String, message: String },
}

impl JsonError {
    /// Location of the offending value, e.g. `steps[2].w_after`.
    pub fn path(&self) -> &str {
        match self {
            JsonError::Field { path, .. } | JsonError::Invariant { path, .. } => path,
        }
    }
}

pub fn trace_to_json(trace: &Trace) -> String {
    serde_json::to_string_pretty(trace).expect("traces always serialize")
}

/// Parses a trace and checks the per-step record invariants
/// (`m >= 1`, `m = |a_new| - |a_old|`, `w_after = w_before + delta_a`).
/// Consistency with an instance is [`crate::trace::validate_trace`]'s job.
pub fn trace_from_json(text: &str) -> Result<Trace, JsonError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let mut trace: Trace = serde_path_to_error::deserialize(de).map_err(|err| {
        let mut path = err.path().to_string();
        let message = err.into_inner().to_string();
        // serde reports a missing field at its parent; name the field itself.
        if let Some(field) = message
            .strip_prefix("missing field `")
            .and_then(|rest| rest.split('`').next())
        {
            path = match path.as_str() {
                "." | "" => field.to_string(),
                parent => format!("{parent}.{field}"),
            };
        }
        JsonError::Field { path, message }
    })?;
    for (k, step) in trace.steps.iter_mut().enumerate() {
        let invariant = |field: &str, message: String| JsonError::Invariant {
            path: format!("steps[{k}].{field}"),
            message,
        };
        if step.m < 1 {
            return Err(invariant("m", format!("m = {} violates m >= 1", step.m)));
        }
        if step.a_new.len() != step.a_old.len() + step.m {
            return Err(invariant(
                "m",
                format!(
                    "m = {} but |a_new| - |a_old| = {} - {}",
                    step.m,
                    step.a_new.len(),
                    step.a_old.len()
                ),
            ));
        }
        if step.w_before.checked_add(step.delta_a) != Some(step.w_after) {
            return Err(invariant(
                "w_after",
                format!("{} + {} != {}", step.w_before, step.delta_a, step.w_after),
            ));
        }
        step.refresh_ratios();
    }
    Ok(trace)
}

pub fn report_to_json(report: &BoundReport) -> String {
    serde_json::to_string_pretty(report).expect("reports always serialize")
}
