//! Front tracking, verdicts for the long-time limit statements, reaction
//! envelopes, comparison checks and the propagation probe.

mod envelope;
mod front;
mod probe;
mod sandwich;
mod verdict;

pub use envelope::{
    build_majorant, build_minorant, EnvelopeCheck, MajorantSpec, MinorantSpec, ENVELOPE_TOL,
    INF_SCAN_WIDTHS, VALIDATION_N,
};
pub use front::{crossing, estimate_speed, track_front, Direction, FrontTrace, MIN_FIT_POINTS};
pub use probe::{propagation_probe, ProbeConfig, ProbeFrontier, ProbeReport, ProbeSample};
pub use sandwich::{ordering_verdict, sandwich_check, sandwich_with};
pub use verdict::{
    annihilation_verdict, attractivity_verdict, spreading_verdict, system_annihilation_verdict,
    system_attractivity_verdict, system_spreading_verdict, wave_tails_verdict, Clause, Verdict,
    ANNIHILATION_TOL, MONOTONE_SLACK, SANDWICH_TOL, SPREADING_TOL, TAIL_CHECKS,
};
