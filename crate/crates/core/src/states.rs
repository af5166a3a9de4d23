//! Two-qubit density matrices and the X-state family.
//!
//! Basis order is fixed everywhere to `(|00>, |01>, |10>, |11>)` with qubit
//! `a` the most significant factor.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::algebra::{hermitian_eigenvalues, kron, pauli, re, ComplexMatrix, HERMITIAN_TOL};
use crate::error::{Error, Result};

pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues above `-PSD_TOL` count as non-negative.
pub const PSD_TOL: f64 = 1e-10;

/// Which factor of the two-qubit product a map acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Qubit {
    A,
    B,
}

/// Correlation triple `c_i = Tr(ρ σ_i⊗σ_i)` generating an X-state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XStateParams {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl XStateParams {
    /// Checks range and positivity; the error names the failed inequality.
    pub fn new(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        let p = Self { c1, c2, c3 };
        p.check()?;
        Ok(p)
    }

    /// Builds the triple without any physicality check.
    pub const fn unchecked(c1: f64, c2: f64, c3: f64) -> Self {
        Self { c1, c2, c3 }
    }

    pub const fn singlet() -> Self {
        Self::unchecked(-1.0, -1.0, -1.0)
    }

    /// Uniform draw from the physical region of the correlation cube.
    pub fn random_physical(rng: &mut impl Rng) -> Self {
        loop {
            let mut c = || rng.random_range(-1.0..=1.0);
            let params = Self::unchecked(c(), c(), c());
            if params.check().is_ok() {
                return params;
            }
        }
    }

    pub const fn maximally_mixed() -> Self {
        Self::unchecked(0.0, 0.0, 0.0)
    }

    pub fn check(&self) -> Result<()> {
        const SLACK: f64 = 1e-12;
        for (name, v) in [("c1", self.c1), ("c2", self.c2), ("c3", self.c3)] {
            if !v.is_finite() || v.abs() > 1.0 + SLACK {
                return Err(Error::validation(format!("{name} = {v} is outside [-1, 1]")));
            }
        }
        let (c1, c2, c3) = (self.c1, self.c2, self.c3);
        if (c1 - c2).abs() > 1.0 + c3 + SLACK {
            return Err(Error::validation(format!(
                "|c1 - c2| = {} exceeds 1 + c3 = {}",
                (c1 - c2).abs(),
                1.0 + c3
            )));
        }
        if (c1 + c2).abs() > 1.0 - c3 + SLACK {
            return Err(Error::validation(format!(
                "|c1 + c2| = {} exceeds 1 - c3 = {}",
                (c1 + c2).abs(),
                1.0 - c3
            )));
        }
        Ok(())
    }

    /// `ϱ11 = ϱ44`.
    pub fn rho11(&self) -> f64 {
        (1.0 + self.c3) / 4.0
    }

    /// `ϱ22 = ϱ33`.
    pub fn rho22(&self) -> f64 {
        (1.0 - self.c3) / 4.0
    }

    /// Coherence between `|00>` and `|11>`.
    pub fn rho14(&self) -> f64 {
        (self.c1 - self.c2) / 4.0
    }

    /// Coherence between `|01>` and `|10>`.
    pub fn rho23(&self) -> f64 {
        (self.c1 + self.c2) / 4.0
    }

    /// Closed-form spectrum `{(1+c3 ± |c1-c2|)/4, (1-c3 ± |c1+c2|)/4}`, ascending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let d = (self.c1 - self.c2).abs() / 4.0;
        let s = (self.c1 + self.c2).abs() / 4.0;
        let mut e = [self.rho11() - d, self.rho11() + d, self.rho22() - s, self.rho22() + s];
        e.sort_by(f64::total_cmp);
        e
    }

    /// The X-shaped matrix for these parameters, without validation.
    pub fn matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::diag_real(&[self.rho11(), self.rho22(), self.rho22(), self.rho11()]);
        m[(0, 3)] = re(self.rho14());
        m[(3, 0)] = re(self.rho14());
        m[(1, 2)] = re(self.rho23());
        m[(2, 1)] = re(self.rho23());
        m
    }
}

/// Outcome of checking a candidate density matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub hermiticity_residual: f64,
    pub trace_residual: f64,
    /// `None` when the matrix is too far from Hermitian to be diagonalized.
    pub min_eigenvalue: Option<f64>,
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks Hermiticity, unit trace and positivity of a 4×4 matrix.
pub fn validate(m: &ComplexMatrix) -> ValidationReport {
    let mut failures = Vec::new();
    if m.rows() != 4 || m.cols() != 4 {
        failures.push(format!("expected a 4x4 matrix, got {}x{}", m.rows(), m.cols()));
        return ValidationReport {
            hermiticity_residual: f64::INFINITY,
            trace_residual: f64::INFINITY,
            min_eigenvalue: None,
            failures,
        };
    }
    let hermiticity_residual = m.hermiticity_residual();
    let trace_residual = (m.trace() - re(1.0)).norm();
    if hermiticity_residual > HERMITIAN_TOL {
        failures.push(format!(
            "hermiticity residual {hermiticity_residual:.3e} > {HERMITIAN_TOL:e}"
        ));
    }
    if trace_residual > TRACE_TOL {
        failures.push(format!("trace residual {trace_residual:.3e} > {TRACE_TOL:e}"));
    }
    let min_eigenvalue = hermitian_eigenvalues(m).ok().map(|e| e[0]);
    if let Some(lo) = min_eigenvalue {
        if lo < -PSD_TOL {
            failures.push(format!("minimum eigenvalue {lo:.6e} < -{PSD_TOL:e}"));
        }
    }
    ValidationReport {
        hermiticity_residual,
        trace_residual,
        min_eigenvalue,
        failures,
    }
}

/// A validated two-qubit density operator.
#[derive(Clone, PartialEq)]
pub struct TwoQubitState {
    matrix: ComplexMatrix,
}

impl TwoQubitState {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let report = validate(&matrix);
        if !report.passed() {
            return Err(Error::validation(format!(
                "not a density matrix: {}",
                report.failures.join("; ")
            )));
        }
        Ok(Self { matrix })
    }

    /// X-state of the given correlations.
    pub fn x_state(params: XStateParams) -> Result<Self> {
        params.check()?;
        Self::new(params.matrix())
    }

    pub fn maximally_mixed() -> Self {
        Self {
            matrix: ComplexMatrix::identity(4).scale_real(0.25),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// `Tr[ρ (σ_i ⊗ σ_i)]` for i = x, y, z.
    pub fn correlations(&self) -> [f64; 3] {
        pauli::all().map(|s| (&self.matrix * &kron(&s, &s)).trace().re)
    }

    pub fn overlap(&self, other: &TwoQubitState) -> f64 {
        (&self.matrix * &other.matrix).trace().re
    }
}

impl fmt::Debug for TwoQubitState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwoQubitState").field("matrix", &self.matrix).finish()
    }
}

/// Builds a validated X-state.
pub fn x_state(params: XStateParams) -> Result<TwoQubitState> {
    TwoQubitState::x_state(params)
}

/// Named inputs accepted on the command line.
///
/// Grammar: `singlet`, `mixed`, `bell:phi+|phi-|psi+|psi-`, `werner:c`
/// (the triple `(c, c, c)`), `x:c1,c2,c3`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpec {
    label: String,
    params: XStateParams,
}

impl StateSpec {
    pub fn params(&self) -> XStateParams {
        self.params
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let text = s.trim();
        let parse_num = |t: &str| -> Result<f64> {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::validation(format!("state: '{t}' is not a number")))
        };
        let params = match text.split_once(':') {
            None => match text {
                "singlet" => XStateParams::singlet(),
                "mixed" => XStateParams::maximally_mixed(),
                _ => return Err(Error::validation(format!("state: unknown state '{text}'"))),
            },
            Some(("bell", which)) => match which {
                "phi+" => XStateParams::unchecked(1.0, -1.0, 1.0),
                "phi-" => XStateParams::unchecked(-1.0, 1.0, 1.0),
                "psi+" => XStateParams::unchecked(1.0, 1.0, -1.0),
                "psi-" => XStateParams::singlet(),
                _ => return Err(Error::validation(format!("state: unknown Bell state '{which}'"))),
            },
            Some(("werner", v)) => {
                let c = parse_num(v)?;
                XStateParams::unchecked(c, c, c)
            }
            Some(("x", list)) => {
                let vals = list.split(',').map(parse_num).collect::<Result<Vec<_>>>()?;
                let [c1, c2, c3] = vals[..] else {
                    return Err(Error::validation(format!(
                        "state: x: needs three comma-separated values, got {}",
                        vals.len()
                    )));
                };
                XStateParams::unchecked(c1, c2, c3)
            }
            Some((kind, _)) => return Err(Error::validation(format!("state: unknown family '{kind}'"))),
        };
        params
            .check()
            .map_err(|e| Error::validation(format!("state: {text}: {}", e.message())))?;
        Ok(StateSpec {
            label: text.to_string(),
            params,
        })
    }
}
