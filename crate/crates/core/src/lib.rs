//! s-parameterized SU(2) quasi-probability distributions (Q, Wigner, P) of
//! two-qubit X-states seen by a uniformly accelerated observer and passed
//! through single-qubit noise.
//!
//! Pipeline: [`XStateParams`] → [`accelerate`] → channel on qubit `a` →
//! kernel trace ([`quasi_distribution`]). The tabulated closed forms live in
//! [`channels`] and [`phasespace`] and are checked against that pipeline.

pub mod algebra;
pub mod analysis;
pub mod channels;
pub mod error;
pub mod export;
pub mod phasespace;
pub mod relativity;
pub mod special;
pub mod states;
pub mod suite;

pub use algebra::ComplexMatrix;
pub use analysis::{
    make_quadrature, min_max, negativity_volume, scan, sign_boundary, Axis, Evaluator, FixedValues, ScanConfig,
    ScanTable, SphereQuadrature, SweepVar,
};
pub use channels::{noisy_accelerated_state, parse_channel, ChannelKind, ChannelSpec};
pub use error::{Error, Result};
pub use phasespace::{
    kernel, psi_values, quasi_distribution, wigner_closed_form, DistributionKind, PhaseSpacePoint, PsiValues, Scenario,
};
pub use relativity::{accelerate, rindler_r_from_physical, AccelerationParam};
pub use states::{x_state, StateSpec, TwoQubitState, XStateParams};
pub use suite::{run_suite, SuiteOptions, SuiteReport};
