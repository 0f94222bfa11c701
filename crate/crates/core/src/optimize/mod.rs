//! Floating-point optimization: an SDP solver, NPA relaxations, SOS
//! certificate search, Hessian scans and qubit-family maximization.

pub mod hessian;
pub mod membership;
pub mod npa;
pub mod qubit;
pub mod sdp;
pub mod sos;

pub use hessian::{hessian_fd, hessian_closed_form, hessian_rmax, max_lambda_over_alpha, HessianSource};
pub use membership::{dual_membership, Membership, Witness, WitnessSource};
pub use npa::{moment_structure, npa_bound, npa_solve, MomentStructure, NpaResult};
pub use qubit::{
    classify, face_scan, nullifier_projection_check, qubit_max, qubit_max_seeded, Cluster, FaceScanReport, Maximizer,
    NullifierProjectionReport, PointKind, QubitMaxResult,
};
pub use sdp::{solve_sdp, SdpProblem, SdpSolution, SdpStatus};
pub use sos::{sos_search, sos_search_report, SosBasisKind, SosSearchReport};
