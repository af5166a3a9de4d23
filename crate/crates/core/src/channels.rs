//! Single-qubit noise on qubit `a`: Kraus sets, the generic Kraus sum, and
//! the tabulated closed-form coefficients with an entrywise comparison
//! against the Kraus-sum result.
//!
//! The closed forms are kept exactly as tabulated, including entries that do
//! not match the Kraus sum. Only the population labels are reconciled: the
//! tabulated `X22` entry belongs to `|01><01|` and `X33` to `|10><10|` in the
//! basis order used here.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{c, kron, re, ComplexMatrix};
use crate::error::{Error, Result};
use crate::relativity::{accelerate, accelerated_x_coeffs, AccelerationParam};
use crate::states::{x_state, TwoQubitState, XStateParams};

/// Coefficients further apart than this are flagged.
pub const DISCREPANCY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ChannelKind {
    AmplitudeDamping,
    BitFlip,
    BitPhaseFlip,
    PhaseFlip,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 4] = [
        ChannelKind::AmplitudeDamping,
        ChannelKind::BitFlip,
        ChannelKind::BitPhaseFlip,
        ChannelKind::PhaseFlip,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            ChannelKind::AmplitudeDamping => "ad",
            ChannelKind::BitFlip => "bf",
            ChannelKind::BitPhaseFlip => "bpf",
            ChannelKind::PhaseFlip => "pf",
        }
    }

    /// Letter of the tabulated coefficient family.
    pub fn family(self) -> &'static str {
        match self {
            ChannelKind::AmplitudeDamping => "B",
            ChannelKind::BitPhaseFlip => "D",
            ChannelKind::BitFlip => "G",
            ChannelKind::PhaseFlip => "A",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A channel family with its strength `p ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelSpec {
    kind: ChannelKind,
    p: f64,
}

impl ChannelSpec {
    pub fn new(kind: ChannelKind, p: f64) -> Result<Self> {
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(Error::validation(format!("channel strength p = {p} is outside [0, 1]")));
        }
        Ok(Self { kind, p })
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn with_p(&self, p: f64) -> Result<Self> {
        Self::new(self.kind, p)
    }
}

impl fmt::Display for ChannelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind, self.p)
    }
}

impl FromStr for ChannelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (tag, p) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::validation(format!("channel: expected <kind>:<p>, got '{s}'")))?;
        let kind = match tag {
            "ad" => ChannelKind::AmplitudeDamping,
            "bf" => ChannelKind::BitFlip,
            "bpf" => ChannelKind::BitPhaseFlip,
            "pf" => ChannelKind::PhaseFlip,
            other => return Err(Error::validation(format!("channel: unknown kind '{other}'"))),
        };
        let p: f64 = p
            .trim()
            .parse()
            .map_err(|_| Error::validation(format!("channel: strength '{p}' is not a number")))?;
        Self::new(kind, p).map_err(|e| Error::validation(format!("channel: {}", e.message())))
    }
}

/// Parses the channel grammar, where `none` means no channel.
pub fn parse_channel(s: &str) -> Result<Option<ChannelSpec>> {
    if s.trim() == "none" {
        Ok(None)
    } else {
        s.parse().map(Some)
    }
}

/// Kraus operators of a single-qubit channel.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    operators: Vec<ComplexMatrix>,
}

impl KrausSet {
    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    /// Largest entry of `Σ E†E - I`.
    pub fn completeness_residual(&self) -> f64 {
        let sum = self
            .operators
            .iter()
            .map(|e| &e.adjoint() * e)
            .fold(ComplexMatrix::zeros(2, 2), |acc, m| &acc + &m);
        sum.max_abs_diff(&ComplexMatrix::identity(2))
    }

    /// `Σ (E ⊗ I) ρ (E ⊗ I)†` on a two-qubit matrix.
    pub fn apply_to_qubit_a(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let id = ComplexMatrix::identity(2);
        let mut out = ComplexMatrix::zeros(4, 4);
        for e in &self.operators {
            out = &out + &kron(e, &id).conjugate(rho)?;
        }
        Ok(out)
    }
}

pub fn kraus_set(spec: ChannelSpec) -> KrausSet {
    let p = spec.p;
    let z = re(0.0);
    let keep = re((1.0 - p / 2.0).sqrt());
    let flip = (p / 2.0).sqrt();
    let mat = |rows: [[Complex64; 2]; 2]| ComplexMatrix::from_rows(&rows).expect("2x2");
    let operators = match spec.kind {
        ChannelKind::AmplitudeDamping => vec![
            ComplexMatrix::diag_real(&[1.0, (1.0 - p).sqrt()]),
            mat([[z, re(p.sqrt())], [z, z]]),
        ],
        ChannelKind::BitPhaseFlip => vec![
            mat([[keep, z], [z, keep]]),
            // -i sqrt(p/2) (|0><1| - |1><0|)
            mat([[z, c(0.0, -flip)], [c(0.0, flip), z]]),
        ],
        ChannelKind::BitFlip => vec![mat([[keep, z], [z, keep]]), mat([[z, re(flip)], [re(flip), z]])],
        ChannelKind::PhaseFlip => vec![mat([[keep, z], [z, keep]]), mat([[re(-flip), z], [z, re(flip)]])],
    };
    KrausSet { operators }
}

pub fn apply_channel_qubit_a(state: &TwoQubitState, spec: ChannelSpec) -> Result<TwoQubitState> {
    TwoQubitState::new(kraus_set(spec).apply_to_qubit_a(state.matrix())?)
}

/// X-state, then acceleration, then (optionally) the channel on qubit `a`.
pub fn noisy_accelerated_state(
    params: XStateParams,
    r: AccelerationParam,
    spec: Option<ChannelSpec>,
) -> Result<TwoQubitState> {
    let accelerated = accelerate(&x_state(params)?, r)?;
    match spec {
        Some(spec) => apply_channel_qubit_a(&accelerated, spec),
        None => Ok(accelerated),
    }
}

/// Matrix element addressed by a coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Element {
    /// Diagonal entry in basis order `|00>, |01>, |10>, |11>`.
    Population(usize),
    /// `<00|ρ|11>`
    Coherence14,
    /// `<01|ρ|10>`
    Coherence23,
}

impl Element {
    pub fn ket_bra(self) -> &'static str {
        match self {
            Element::Population(0) => "|00><00|",
            Element::Population(1) => "|01><01|",
            Element::Population(2) => "|10><10|",
            Element::Population(3) => "|11><11|",
            Element::Population(_) => "?",
            Element::Coherence14 => "|00><11|",
            Element::Coherence23 => "|01><10|",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CoeffSource {
    Tabulated,
    Oracle,
}

/// X-shaped coefficient set of a channel output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelCoeffs {
    pub diag: [f64; 4],
    pub off14: Complex64,
    pub off23: Complex64,
    pub source: CoeffSource,
}

impl ChannelCoeffs {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self {
            diag: [0, 1, 2, 3].map(|i| m[(i, i)].re),
            off14: m[(0, 3)],
            off23: m[(1, 2)],
            source: CoeffSource::Oracle,
        }
    }

    pub fn get(&self, e: Element) -> Complex64 {
        match e {
            Element::Population(i) => re(self.diag[i]),
            Element::Coherence14 => self.off14,
            Element::Coherence23 => self.off23,
        }
    }

    /// X-shaped Hermitian matrix with these entries.
    pub fn matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::diag_real(&self.diag);
        m[(0, 3)] = self.off14;
        m[(3, 0)] = self.off14.conj();
        m[(1, 2)] = self.off23;
        m[(2, 1)] = self.off23.conj();
        m
    }
}

/// One tabulated coefficient and the element it is attached to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TabulatedCoefficient {
    pub name: String,
    pub element: Element,
    pub value: f64,
}

/// The tabulated coefficient table for an accelerated X-state through `spec`.
pub fn tabulated_coefficients(
    params: XStateParams,
    r: AccelerationParam,
    spec: ChannelSpec,
) -> Result<Vec<TabulatedCoefficient>> {
    params.check()?;
    let p = spec.p;
    let (s, co) = r.value().sin_cos();
    let (s2, c2) = (s * s, co * co);
    let t2 = s2 / c2;
    let (q11, q22, q14, q23) = (params.rho11(), params.rho22(), params.rho14(), params.rho23());
    use Element::*;

    let values: [(&str, Element, f64); 6] = match spec.kind {
        ChannelKind::AmplitudeDamping => {
            let off = (1.0 - p).sqrt() * q11 * c2;
            [
                ("11", Population(0), c2 * (p * q22 + (p * s2 + c2) * q11)),
                (
                    "22",
                    Population(1),
                    (p + s2 * c2 + p * s2 * s2) * q11 + (2.0 * p * s2 + c2) * q22,
                ),
                ("33", Population(2), (1.0 - p) * c2 * (q22 + q11 * s2)),
                (
                    "44",
                    Population(3),
                    (1.0 - p) * ((1.0 + s2 * s2) * q11 + 2.0 * s2 * q22),
                ),
                ("14", Coherence14, off),
                ("23", Coherence23, off),
            ]
        }
        ChannelKind::BitPhaseFlip | ChannelKind::BitFlip => {
            let cos2r = (2.0 * r.value()).cos();
            let nu_plus = 1.0 + (1.0 - p) * cos2r;
            let nu_minus = 1.0 - (1.0 - p) * cos2r;
            let d11 = 0.5 * c2 * (p * q22 + nu_plus * q11);
            let d22 = 0.5 * (p * (q11 + nu_plus * q22) + 2.0 * t2 * d11);
            let d33 = 0.5 * c2 * (q11 * nu_minus + (2.0 - p) * q22);
            let d44 = 0.5 * ((2.0 - p) * (q11 + q22 * nu_minus) + 2.0 * t2 * d33);
            let off = if spec.kind == ChannelKind::BitPhaseFlip {
                -0.5 * c2 * (p * q23 + (p - 2.0) * q14)
            } else {
                0.5 * c2 * (p * q23 + (2.0 - p) * q14)
            };
            [
                ("11", Population(0), d11),
                ("22", Population(1), d22),
                ("33", Population(2), d33),
                ("44", Population(3), d44),
                ("14", Coherence14, off),
                ("23", Coherence23, off),
            ]
        }
        ChannelKind::PhaseFlip => {
            let a = accelerated_x_coeffs(params, r)?;
            [
                ("11", Population(0), a.A11),
                ("22", Population(1), a.A22),
                ("22", Population(2), a.A22),
                ("33", Population(3), a.A33),
                ("14", Coherence14, (1.0 - p) * a.A14),
                ("23", Coherence23, (1.0 - p) * a.A23),
            ]
        }
    };
    let family = spec.kind.family();
    let prefix = if spec.kind == ChannelKind::PhaseFlip {
        "(1-p)"
    } else {
        ""
    };
    Ok(values
        .into_iter()
        .map(|(idx, element, value)| {
            let off_diag = !matches!(element, Population(_));
            let name = if off_diag {
                format!("{prefix}{family}{idx}")
            } else {
                format!("{family}{idx}")
            };
            TabulatedCoefficient { name, element, value }
        })
        .collect())
}

/// Tabulated closed-form coefficients, basis labels reconciled, no other correction.
pub fn channel_closed_form(params: XStateParams, r: AccelerationParam, spec: ChannelSpec) -> Result<ChannelCoeffs> {
    let mut out = ChannelCoeffs {
        diag: [0.0; 4],
        off14: re(0.0),
        off23: re(0.0),
        source: CoeffSource::Tabulated,
    };
    for coeff in tabulated_coefficients(params, r, spec)? {
        match coeff.element {
            Element::Population(i) => out.diag[i] = coeff.value,
            Element::Coherence14 => out.off14 = re(coeff.value),
            Element::Coherence23 => out.off23 = re(coeff.value),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientComparison {
    pub name: String,
    pub element: Element,
    pub tabulated: f64,
    pub oracle: f64,
    pub abs_delta: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub params: XStateParams,
    pub r: f64,
    pub channel: ChannelSpec,
    pub entries: Vec<CoefficientComparison>,
}

impl DiscrepancyReport {
    pub fn flagged(&self) -> impl Iterator<Item = &CoefficientComparison> {
        self.entries.iter().filter(|e| e.flagged)
    }

    pub fn flagged_names(&self) -> Vec<&str> {
        self.flagged().map(|e| e.name.as_str()).collect()
    }

    pub fn max_delta_where(&self, pick: impl Fn(Element) -> bool) -> f64 {
        self.entries
            .iter()
            .filter(|e| pick(e.element))
            .map(|e| e.abs_delta)
            .fold(0.0, f64::max)
    }
}

/// Compares every tabulated coefficient against the Kraus-sum pipeline.
pub fn discrepancy_report(params: XStateParams, r: AccelerationParam, spec: ChannelSpec) -> Result<DiscrepancyReport> {
    let oracle = ChannelCoeffs::from_matrix(noisy_accelerated_state(params, r, Some(spec))?.matrix());
    let entries = tabulated_coefficients(params, r, spec)?
        .into_iter()
        .map(|pc| {
            let o = oracle.get(pc.element);
            let abs_delta = (re(pc.value) - o).norm();
            CoefficientComparison {
                name: pc.name,
                element: pc.element,
                tabulated: pc.value,
                oracle: o.re,
                abs_delta,
                flagged: abs_delta > DISCREPANCY_TOL,
            }
        })
        .collect();
    Ok(DiscrepancyReport {
        params,
        r: r.value(),
        channel: spec,
        entries,
    })
}

/// A ledger input with the coefficient names it is known to flag.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub label: &'static str,
    pub params: XStateParams,
    pub r: f64,
    pub channel: ChannelSpec,
    pub expected_flags: &'static [&'static str],
}

/// Documented disagreements between the tabulated coefficients and the Kraus sum.
pub fn ledger() -> Vec<LedgerEntry> {
    let generic = XStateParams::unchecked(0.3, -0.2, 0.1);
    let singlet = XStateParams::singlet();
    let spec = |kind| ChannelSpec { kind, p: 0.4 };
    use ChannelKind::*;
    vec![
        LedgerEntry {
            label: "generic",
            params: generic,
            r: 0.6,
            channel: spec(AmplitudeDamping),
            expected_flags: &["B14", "B23"],
        },
        LedgerEntry {
            label: "generic",
            params: generic,
            r: 0.6,
            channel: spec(BitPhaseFlip),
            expected_flags: &["D22", "D44", "D23"],
        },
        LedgerEntry {
            label: "generic",
            params: generic,
            r: 0.6,
            channel: spec(BitFlip),
            expected_flags: &["G22", "G44", "G23"],
        },
        LedgerEntry {
            label: "generic",
            params: generic,
            r: 0.6,
            channel: spec(PhaseFlip),
            expected_flags: &[],
        },
        LedgerEntry {
            label: "singlet",
            params: singlet,
            r: 0.6,
            channel: spec(AmplitudeDamping),
            expected_flags: &["B23"],
        },
        LedgerEntry {
            label: "singlet",
            params: singlet,
            r: 0.6,
            channel: spec(BitPhaseFlip),
            expected_flags: &["D22", "D44", "D23"],
        },
        LedgerEntry {
            label: "singlet",
            params: singlet,
            r: 0.6,
            channel: spec(BitFlip),
            expected_flags: &["G22", "G44", "G23"],
        },
        LedgerEntry {
            label: "singlet",
            params: singlet,
            r: 0.6,
            channel: spec(PhaseFlip),
            expected_flags: &[],
        },
    ]
}
