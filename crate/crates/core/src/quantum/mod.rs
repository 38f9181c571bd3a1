//! Quantum values: see-saw lower bounds on `B_Q`, violation ratios,
//! dimension-witness tables and upper-bound monitors.

pub mod povm;
pub mod report;
pub mod seesaw;

pub use povm::{optimize_povm_input, PovmSolution, POVM_GAP};
pub use report::{
    dimension_witness_report, upper_bound_monitor, violation_report, DimRow, MonitorReport, QuantumReport,
    ViolationReport, WitnessReport, MONITOR_CONSTANT,
};
pub use seesaw::{bell_operator, optimize_state, seesaw, seesaw_with, SeesawConfig, SeesawResult, WarmStart};
