//! Unruh degradation of a two-qubit state.
//!
//! A uniformly accelerated observer sees each Minkowski mode split into
//! Rindler regions I and II:
//!
//! ```text
//! |0>  ->  cos r |0>_I |0>_II + sin r |1>_I |1>_II
//! |1>  ->  |1>_I |0>_II
//! ```
//!
//! The observable state is what remains after tracing out region II. The
//! single-mode map is [`rindler_trace_out`]; [`accelerate`] applies it to
//! both factors, which is the transformation whose outcome the closed-form
//! coefficients in [`accelerated_x_coeffs`] describe.

use std::f64::consts::{FRAC_PI_4, PI};

use serde::Serialize;

use crate::algebra::{kron, partial_trace, re, ComplexMatrix};
use crate::error::{Error, Result};
use crate::states::{Qubit, TwoQubitState, XStateParams};

/// Rindler acceleration parameter `r ∈ [0, π/4]`, in radians.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct AccelerationParam(f64);

impl AccelerationParam {
    pub const ZERO: AccelerationParam = AccelerationParam(0.0);
    pub const MAX: AccelerationParam = AccelerationParam(FRAC_PI_4);

    pub fn new(r: f64) -> Result<Self> {
        if !r.is_finite() || !(0.0..=FRAC_PI_4).contains(&r) {
            return Err(Error::validation(format!("acceleration r = {r} is outside [0, pi/4]")));
        }
        Ok(Self(r))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `r = arctan(exp(-π ω c / a))`.
pub fn rindler_r_from_physical(omega: f64, accel: f64, light_speed: f64) -> Result<AccelerationParam> {
    for (name, v) in [("omega", omega), ("acceleration", accel), ("light speed", light_speed)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::validation(format!(
                "{name} must be positive and finite, got {v}"
            )));
        }
    }
    AccelerationParam::new((-PI * omega * light_speed / accel).exp().atan())
}

/// Isometry `C^2 -> C^2_I ⊗ C^2_II` of the single-mode Rindler split.
fn rindler_isometry(r: AccelerationParam) -> ComplexMatrix {
    let (s, c) = r.value().sin_cos();
    let mut v = ComplexMatrix::zeros(4, 2);
    v[(0, 0)] = re(c); // |0_I 0_II>
    v[(3, 0)] = re(s); // |1_I 1_II>
    v[(2, 1)] = re(1.0); // |1_I 0_II>
    v
}

/// Lifts one qubit into its two Rindler regions and traces region II out.
pub fn rindler_trace_out(state: &TwoQubitState, qubit: Qubit, r: AccelerationParam) -> Result<TwoQubitState> {
    let v = rindler_isometry(r);
    let id = ComplexMatrix::identity(2);
    // Factor order of the 8-dim space and which factor is region II.
    let (lift, traced) = match qubit {
        Qubit::A => (kron(&v, &id), 1),
        Qubit::B => (kron(&id, &v), 2),
    };
    let big = lift.conjugate(state.matrix())?;
    TwoQubitState::new(partial_trace(&big, traced, &[2, 2, 2])?)
}

/// Unruh map on both modes of the pair.
pub fn accelerate(state: &TwoQubitState, r: AccelerationParam) -> Result<TwoQubitState> {
    let half = rindler_trace_out(state, Qubit::A, r)?;
    rindler_trace_out(&half, Qubit::B, r)
}

/// Closed-form entries of an accelerated X-state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct AcceleratedCoeffs {
    /// `|00><00|`
    pub A11: f64,
    /// `|01><01|` and `|10><10|`
    pub A22: f64,
    /// `|11><11|`
    pub A33: f64,
    /// `|00><11|`
    pub A14: f64,
    /// `|01><10|`
    pub A23: f64,
}

impl AcceleratedCoeffs {
    /// `A11 + 2 A22 + A33`.
    pub fn trace(&self) -> f64 {
        self.A11 + 2.0 * self.A22 + self.A33
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::diag_real(&[self.A11, self.A22, self.A22, self.A33]);
        m[(0, 3)] = re(self.A14);
        m[(3, 0)] = re(self.A14);
        m[(1, 2)] = re(self.A23);
        m[(2, 1)] = re(self.A23);
        m
    }
}

/// Accelerated X-state coefficients in closed form.
pub fn accelerated_x_coeffs(params: XStateParams, r: AccelerationParam) -> Result<AcceleratedCoeffs> {
    params.check()?;
    let (s, c) = r.value().sin_cos();
    let (s2, c2) = (s * s, c * c);
    let (q11, q22) = (params.rho11(), params.rho22());
    Ok(AcceleratedCoeffs {
        A11: c2 * c2 * q11,
        A22: c2 * (s2 * q11 + q22),
        A33: (s2 * s2 + 1.0) * q11 + 2.0 * s2 * q22,
        A14: c2 * params.rho14(),
        A23: c2 * params.rho23(),
    })
}
