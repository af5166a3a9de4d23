//! Spin-1/2 Stratonovich–Weyl kernels and the s-parameterized two-qubit
//! quasi-distributions built from them.
//!
//! For one qubit the kernel is
//!
//! ```text
//! A^(s)(θ,φ) = sqrt(2π) [ T†_00 Y_00 + (√3)^s Σ_M T†_1M Y_1M ]
//! ```
//!
//! which has unit trace and equals `(I + (√3)^(s+1) n·σ) / 2` for a unit
//! vector `n`. The two-qubit distribution at a pair of points is
//! `Tr[ρ (A(pa) ⊗ A(pb))]`; evaluating both kernels at the same angles gives
//! the single-sphere slice that the closed forms describe.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::ComplexMatrix;
use crate::channels::{
    channel_closed_form, noisy_accelerated_state, ChannelCoeffs, ChannelKind, ChannelSpec, CoeffSource,
};
use crate::error::{Error, Result};
use crate::relativity::{accelerated_x_coeffs, AccelerationParam};
use crate::special::{spherical_harmonic, tensor_operator, HalfInt};
use crate::states::{x_state, TwoQubitState, XStateParams};

/// Largest imaginary part tolerated in a distribution value.
pub const IMAG_TOL: f64 = 1e-12;

/// A point on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpacePoint {
    theta: f64,
    phi: f64,
}

impl PhaseSpacePoint {
    /// Wraps arbitrary finite angles onto `θ ∈ [0, π]`, `φ ∈ [0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::validation(format!(
                "non-finite angle (theta = {theta}, phi = {phi})"
            )));
        }
        let mut theta = theta.rem_euclid(TAU);
        let mut phi = phi;
        if theta > PI {
            theta = TAU - theta;
            phi += PI;
        }
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(Self { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `(x, y, z)` on the unit sphere.
    pub fn cartesian(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// `nθ` inclusive polar samples on `[0, π]` times `nφ` periodic azimuthal samples.
    pub fn grid(n_theta: usize, n_phi: usize) -> Vec<PhaseSpacePoint> {
        let mut out = Vec::with_capacity(n_theta * n_phi);
        for i in 0..n_theta {
            let theta = if n_theta > 1 {
                PI * i as f64 / (n_theta - 1) as f64
            } else {
                0.0
            };
            for j in 0..n_phi {
                out.push(PhaseSpacePoint {
                    theta,
                    phi: TAU * j as f64 / n_phi as f64,
                });
            }
        }
        out
    }
}

impl fmt::Display for PhaseSpacePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(theta={}, phi={})", self.theta, self.phi)
    }
}

/// Member of the s-parameterized family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DistributionKind {
    /// `s = -1`
    Q,
    /// `s = 0`
    Wigner,
    /// `s = +1`
    P,
}

impl DistributionKind {
    pub const ALL: [DistributionKind; 3] = [DistributionKind::Q, DistributionKind::Wigner, DistributionKind::P];

    pub fn s(self) -> i32 {
        match self {
            DistributionKind::Q => -1,
            DistributionKind::Wigner => 0,
            DistributionKind::P => 1,
        }
    }

    pub fn from_s(s: i32) -> Result<Self> {
        match s {
            -1 => Ok(DistributionKind::Q),
            0 => Ok(DistributionKind::Wigner),
            1 => Ok(DistributionKind::P),
            _ => Err(Error::validation(format!(
                "distribution order s = {s} is not one of -1, 0, 1"
            ))),
        }
    }

    /// The member paired with this one by the overlap formula.
    pub fn dual(self) -> Self {
        Self::from_s(-self.s()).expect("closed under negation")
    }

    /// Bloch-vector length of the kernel, `(√3)^(s+1)`.
    pub fn bloch_scale(self) -> f64 {
        3f64.sqrt().powi(self.s() + 1)
    }

    pub fn name(self) -> &'static str {
        match self {
            DistributionKind::Q => "q",
            DistributionKind::Wigner => "wigner",
            DistributionKind::P => "p",
        }
    }
}

impl fmt::Display for DistributionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DistributionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "q" | "Q" => Ok(DistributionKind::Q),
            "wigner" | "w" | "W" => Ok(DistributionKind::Wigner),
            "p" | "P" => Ok(DistributionKind::P),
            other => Err(Error::validation(format!(
                "kind: expected q, wigner or p, got '{other}'"
            ))),
        }
    }
}

/// Deliberate faults for exercising the validation suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Fault {
    /// Flip the sign of `T†_{1,1}`.
    NegateT11,
}

/// The spin-1/2 tensor operators `T†_{L,M}` for `L <= 1`, in the order
/// `(0,0), (1,-1), (1,0), (1,1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSet {
    ops: [ComplexMatrix; 4],
}

impl TensorSet {
    pub const INDICES: [(u32, i32); 4] = [(0, 0), (1, -1), (1, 0), (1, 1)];

    fn build() -> Result<Self> {
        let mut ops = Vec::with_capacity(4);
        for (l, m) in Self::INDICES {
            ops.push(tensor_operator(HalfInt::HALF, l, m)?);
        }
        Ok(Self {
            ops: ops.try_into().expect("four operators"),
        })
    }

    /// Shared copy of the correct operators.
    pub fn standard() -> &'static TensorSet {
        static SET: OnceLock<TensorSet> = OnceLock::new();
        SET.get_or_init(|| Self::build().expect("spin-1/2 tensor operators"))
    }

    pub fn with_fault(fault: Option<Fault>) -> TensorSet {
        let mut set = Self::standard().clone();
        if let Some(Fault::NegateT11) = fault {
            set.ops[3] = set.ops[3].scale_real(-1.0);
        }
        set
    }

    pub fn get(&self, l: u32, m: i32) -> Option<&ComplexMatrix> {
        Self::INDICES
            .iter()
            .position(|&idx| idx == (l, m))
            .map(|i| &self.ops[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = ((u32, i32), &ComplexMatrix)> {
        Self::INDICES.into_iter().zip(self.ops.iter())
    }

    /// Kernel `A^(s)(θ,φ)` assembled from these operators.
    pub fn kernel(&self, kind: DistributionKind, point: PhaseSpacePoint) -> ComplexMatrix {
        let weight = 3f64.sqrt().powi(kind.s());
        let norm = TAU.sqrt();
        let mut k = ComplexMatrix::zeros(2, 2);
        for ((l, m), op) in self.iter() {
            let y = spherical_harmonic(l, m, point.theta, point.phi).expect("rank <= 1");
            let w = if l == 0 { norm } else { norm * weight };
            k = &k + &op.scale(y * w);
        }
        k
    }
}

/// Kernel `A^(s)(θ,φ)` from the standard tensor operators.
pub fn kernel(kind: DistributionKind, point: PhaseSpacePoint) -> ComplexMatrix {
    TensorSet::standard().kernel(kind, point)
}

/// `Tr[ρ (ka ⊗ kb)]` without forming the Kronecker product.
pub fn trace_with_kernels(rho: &ComplexMatrix, ka: &ComplexMatrix, kb: &ComplexMatrix) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..2 {
        for b in 0..2 {
            for ap in 0..2 {
                let kab = ka[(ap, a)];
                for bp in 0..2 {
                    acc += rho[(2 * a + b, 2 * ap + bp)] * kab * kb[(bp, b)];
                }
            }
        }
    }
    acc
}

/// Real part of a distribution value, or a consistency error if the
/// imaginary residual is too large.
pub fn real_value(v: Complex64) -> Result<f64> {
    if v.im.abs() > IMAG_TOL {
        return Err(Error::Consistency(format!(
            "distribution value has imaginary part {:e}",
            v.im
        )));
    }
    Ok(v.re)
}

/// Two-point distribution `Tr[ρ (A(pa) ⊗ A(pb))]`.
pub fn quasi_distribution(
    state: &TwoQubitState,
    kind: DistributionKind,
    pa: PhaseSpacePoint,
    pb: PhaseSpacePoint,
) -> Result<f64> {
    quasi_distribution_with(TensorSet::standard(), state.matrix(), kind, pa, pb)
}

/// Two-point distribution with an explicit operator set and raw matrix.
pub fn quasi_distribution_with(
    set: &TensorSet,
    rho: &ComplexMatrix,
    kind: DistributionKind,
    pa: PhaseSpacePoint,
    pb: PhaseSpacePoint,
) -> Result<f64> {
    let ka = set.kernel(kind, pa);
    let kb = if pa == pb { ka.clone() } else { set.kernel(kind, pb) };
    real_value(trace_with_kernels(rho, &ka, &kb))
}

/// Both kernels at the same point.
pub fn diagonal_slice(state: &TwoQubitState, kind: DistributionKind, point: PhaseSpacePoint) -> Result<f64> {
    quasi_distribution(state, kind, point, point)
}

/// Entries of the `s = 0` kernel divided by `sqrt(2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsiValues {
    pub psi11: f64,
    pub psi22: f64,
    pub psi12: Complex64,
    pub psi21: Complex64,
}

pub fn psi_values(point: PhaseSpacePoint) -> PsiValues {
    let y = |l, m| spherical_harmonic(l, m, point.theta, point.phi).expect("rank <= 1");
    let (y00, y10) = (y(0, 0).re, y(1, 0).re);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    PsiValues {
        psi11: s * (y00 - y10),
        psi22: s * (y00 + y10),
        psi12: -y(1, 1),
        psi21: y(1, -1),
    }
}

/// Population and coherence parts of `2π Σ c Ψ Ψ` for an X-shaped coefficient set.
pub fn psi_expansion(coeffs: &ChannelCoeffs, psi: &PsiValues) -> (f64, f64) {
    let [d11, d22, d33, d44] = coeffs.diag;
    let diag = d11 * psi.psi11 * psi.psi11 + (d22 + d33) * psi.psi11 * psi.psi22 + d44 * psi.psi22 * psi.psi22;
    let off = coeffs.off14 * psi.psi21 * psi.psi21
        + coeffs.off14.conj() * psi.psi12 * psi.psi12
        + coeffs.off23 * psi.psi21 * psi.psi12
        + coeffs.off23.conj() * psi.psi12 * psi.psi21;
    (TAU * diag, TAU * off.re)
}

/// Closed-form Wigner evaluator families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scenario {
    Plain,
    Accelerated,
    AmplitudeDamping,
    BitPhaseFlip,
    BitFlip,
    PhaseFlip,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::Plain,
        Scenario::Accelerated,
        Scenario::AmplitudeDamping,
        Scenario::BitPhaseFlip,
        Scenario::BitFlip,
        Scenario::PhaseFlip,
    ];

    pub fn channel_kind(self) -> Option<ChannelKind> {
        match self {
            Scenario::Plain | Scenario::Accelerated => None,
            Scenario::AmplitudeDamping => Some(ChannelKind::AmplitudeDamping),
            Scenario::BitPhaseFlip => Some(ChannelKind::BitPhaseFlip),
            Scenario::BitFlip => Some(ChannelKind::BitFlip),
            Scenario::PhaseFlip => Some(ChannelKind::PhaseFlip),
        }
    }

    pub fn from_channel(kind: Option<ChannelKind>) -> Self {
        match kind {
            None => Scenario::Accelerated,
            Some(ChannelKind::AmplitudeDamping) => Scenario::AmplitudeDamping,
            Some(ChannelKind::BitPhaseFlip) => Scenario::BitPhaseFlip,
            Some(ChannelKind::BitFlip) => Scenario::BitFlip,
            Some(ChannelKind::PhaseFlip) => Scenario::PhaseFlip,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Plain => "plain",
            Scenario::Accelerated => "accelerated",
            Scenario::AmplitudeDamping => "ad",
            Scenario::BitPhaseFlip => "bpf",
            Scenario::BitFlip => "bf",
            Scenario::PhaseFlip => "pf",
        }
    }

    fn channel(self, p: f64) -> Result<Option<ChannelSpec>> {
        self.channel_kind().map(|k| ChannelSpec::new(k, p)).transpose()
    }

    /// State produced by the generic pipeline for this scenario.
    pub fn oracle_state(self, params: XStateParams, r: AccelerationParam, p: f64) -> Result<TwoQubitState> {
        match self {
            Scenario::Plain => x_state(params),
            _ => noisy_accelerated_state(params, r, self.channel(p)?),
        }
    }

    /// Tabulated coefficient set for this scenario.
    pub fn closed_form_coeffs(self, params: XStateParams, r: AccelerationParam, p: f64) -> Result<ChannelCoeffs> {
        params.check()?;
        let mut coeffs = match self {
            Scenario::Plain => ChannelCoeffs::from_matrix(&params.matrix()),
            Scenario::Accelerated => ChannelCoeffs::from_matrix(&accelerated_x_coeffs(params, r)?.matrix()),
            _ => return channel_closed_form(params, r, self.channel(p)?.expect("channel scenario")),
        };
        coeffs.source = CoeffSource::Tabulated;
        Ok(coeffs)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Closed-form single-sphere Wigner function of a scenario.
pub fn wigner_closed_form(
    scenario: Scenario,
    params: XStateParams,
    r: AccelerationParam,
    p: f64,
    point: PhaseSpacePoint,
) -> Result<f64> {
    let coeffs = scenario.closed_form_coeffs(params, r, p)?;
    let (diag, off) = psi_expansion(&coeffs, &psi_values(point));
    Ok(diag + off)
}

/// Agreement of a closed form with the kernel trace on the pipeline state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleComparison {
    pub max_abs_delta: f64,
    /// Part of the difference carried by the population terms.
    pub max_population_delta: f64,
    /// Part carried by the coherence terms.
    pub max_coherence_delta: f64,
    pub worst_point: Option<PhaseSpacePoint>,
}

pub fn closed_form_vs_oracle(
    scenario: Scenario,
    params: XStateParams,
    r: AccelerationParam,
    p: f64,
    points: &[PhaseSpacePoint],
) -> Result<OracleComparison> {
    let tabulated = scenario.closed_form_coeffs(params, r, p)?;
    let state = scenario.oracle_state(params, r, p)?;
    let oracle_coeffs = ChannelCoeffs::from_matrix(state.matrix());
    let mut out = OracleComparison {
        max_abs_delta: 0.0,
        max_population_delta: 0.0,
        max_coherence_delta: 0.0,
        worst_point: None,
    };
    for &pt in points {
        let psi = psi_values(pt);
        let (d_cf, o_cf) = psi_expansion(&tabulated, &psi);
        let (d_or, o_or) = psi_expansion(&oracle_coeffs, &psi);
        let oracle = diagonal_slice(&state, DistributionKind::Wigner, pt)?;
        let delta = (d_cf + o_cf - oracle).abs();
        if out.worst_point.is_none() || delta > out.max_abs_delta {
            out.max_abs_delta = delta;
            out.worst_point = Some(pt);
        }
        out.max_population_delta = out.max_population_delta.max((d_cf - d_or).abs());
        out.max_coherence_delta = out.max_coherence_delta.max((o_cf - o_or).abs());
    }
    Ok(out)
}
