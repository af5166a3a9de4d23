//! Shared inputs for the criterion benches.

use std::f64::consts::PI;

use qpd_core::{AccelerationParam, ChannelKind, ChannelSpec, PhaseSpacePoint, TwoQubitState, XStateParams};

pub fn generic_params() -> XStateParams {
    XStateParams::new(0.3, -0.2, 0.1).expect("physical")
}

pub fn accel() -> AccelerationParam {
    AccelerationParam::new(0.6).expect("in range")
}

pub fn damping() -> ChannelSpec {
    ChannelSpec::new(ChannelKind::AmplitudeDamping, 0.4).expect("in range")
}

pub fn noisy_state() -> TwoQubitState {
    qpd_core::noisy_accelerated_state(generic_params(), accel(), Some(damping())).expect("valid pipeline")
}

/// `n` points spread over the sphere, deterministic.
pub fn points(n: usize) -> Vec<PhaseSpacePoint> {
    (0..n)
        .map(|i| {
            let t = (i as f64 + 0.5) / n as f64;
            PhaseSpacePoint::new((1.0 - 2.0 * t).acos(), 2.0 * PI * (i as f64 * 0.618_033_988_75).fract())
                .expect("finite")
        })
        .collect()
}
