//! Sphere quadrature, two-parameter scans of the single-sphere slice,
//! extrema, sign boundaries and the bipartite negativity volume.

use std::f64::consts::{FRAC_PI_4, PI, TAU};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::ComplexMatrix;
use crate::error::{Error, Result};
use crate::phasespace::{
    diagonal_slice, real_value, trace_with_kernels, wigner_closed_form, DistributionKind, PhaseSpacePoint, Scenario,
    TensorSet,
};
use crate::relativity::AccelerationParam;
use crate::states::{TwoQubitState, XStateParams};

/// Bisection stops once the bracket is narrower than this.
pub const CROSSING_TOL: f64 = 1e-9;
/// Successive negativity-volume estimates must agree to this.
pub const VOLUME_TOL: f64 = 1e-6;
const MAX_VOLUME_ORDER: usize = 1024;

/// One node of a product rule on the sphere; weights are in steradians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureNode {
    pub theta: f64,
    pub phi: f64,
    pub weight: f64,
}

impl QuadratureNode {
    pub fn point(&self) -> PhaseSpacePoint {
        PhaseSpacePoint::new(self.theta, self.phi).expect("node angles are in range")
    }
}

/// Gauss–Legendre in `cos θ` times a uniform trapezoid in `φ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereQuadrature {
    order: usize,
    nodes: Vec<QuadratureNode>,
}

impl SphereQuadrature {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[QuadratureNode] {
        &self.nodes
    }

    pub fn total_weight(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }

    pub fn integrate(&self, mut f: impl FnMut(PhaseSpacePoint) -> f64) -> f64 {
        self.nodes.iter().map(|n| n.weight * f(n.point())).sum()
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                (p0, p1) = (p1, ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k);
            }
            if n == 1 {
                (p0, p1) = (1.0, x);
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[i] = (-x, w);
        out[n - 1 - i] = (x, w);
    }
    out
}

pub fn make_quadrature(order: usize) -> Result<SphereQuadrature> {
    if order < 2 {
        return Err(Error::validation(format!(
            "quadrature order must be at least 2, got {order}"
        )));
    }
    let n_phi = 2 * order + 2;
    let dphi = TAU / n_phi as f64;
    let mut nodes = Vec::with_capacity(order * n_phi);
    for (z, w) in gauss_legendre(order) {
        let theta = z.clamp(-1.0, 1.0).acos();
        for j in 0..n_phi {
            nodes.push(QuadratureNode {
                theta,
                phi: dphi * j as f64,
                weight: w * dphi,
            });
        }
    }
    Ok(SphereQuadrature { order, nodes })
}

fn node_kernels(set: &TensorSet, kind: DistributionKind, quad: &SphereQuadrature) -> Vec<ComplexMatrix> {
    quad.nodes.iter().map(|n| set.kernel(kind, n.point())).collect()
}

/// `∫∫ Tr[ρ (A(pa) ⊗ A(pb))] dΩa dΩb`.
pub fn bipartite_integral(
    set: &TensorSet,
    rho: &ComplexMatrix,
    kind: DistributionKind,
    quad: &SphereQuadrature,
) -> Result<f64> {
    let ks = node_kernels(set, kind, quad);
    let mut total = 0.0;
    for (na, ka) in quad.nodes.iter().zip(&ks) {
        for (nb, kb) in quad.nodes.iter().zip(&ks) {
            total += na.weight * nb.weight * real_value(trace_with_kernels(rho, ka, kb))?;
        }
    }
    Ok(total)
}

/// `(1/2π)² ∫∫ F_ρ F'_σ dΩa dΩb` for two members of the family.
pub fn overlap_integral(
    set: &TensorSet,
    rho: (&ComplexMatrix, DistributionKind),
    sigma: (&ComplexMatrix, DistributionKind),
    quad: &SphereQuadrature,
) -> Result<f64> {
    let k1 = node_kernels(set, rho.1, quad);
    let k2 = node_kernels(set, sigma.1, quad);
    let mut total = 0.0;
    for ia in 0..quad.nodes.len() {
        for ib in 0..quad.nodes.len() {
            let w = quad.nodes[ia].weight * quad.nodes[ib].weight;
            let f = real_value(trace_with_kernels(rho.0, &k1[ia], &k1[ib]))?;
            let g = real_value(trace_with_kernels(sigma.0, &k2[ia], &k2[ib]))?;
            total += w * f * g;
        }
    }
    Ok(total / (TAU * TAU))
}

/// `∫ max(0, -(β0 + K u)/2) dΩ` over the unit sphere, `u = cos γ`.
fn negative_cap(beta0: f64, k: f64) -> f64 {
    if k <= beta0.abs() {
        if beta0 >= 0.0 {
            0.0
        } else {
            -TAU * beta0
        }
    } else {
        0.5 * PI * (k - beta0).powi(2) / k
    }
}

fn negativity_at_order(rho: &ComplexMatrix, kind: DistributionKind, order: usize) -> Result<f64> {
    let quad = make_quadrature(order)?;
    let set = TensorSet::standard();
    let scale = kind.bloch_scale();
    let total: f64 = quad
        .nodes
        .par_iter()
        .map(|n| {
            let ka = set.kernel(kind, n.point());
            // Reduced operator on b after contracting a with its kernel.
            let mut b = [[num_complex::Complex64::new(0.0, 0.0); 2]; 2];
            for (bi, row) in b.iter_mut().enumerate() {
                for (bj, cell) in row.iter_mut().enumerate() {
                    for a in 0..2 {
                        for ap in 0..2 {
                            *cell += rho[(2 * a + bi, 2 * ap + bj)] * ka[(ap, a)];
                        }
                    }
                }
            }
            let beta0 = (b[0][0] + b[1][1]).re;
            let bx = (b[0][1] + b[1][0]).re;
            let by = -(b[0][1] - b[1][0]).im;
            let bz = (b[0][0] - b[1][1]).re;
            let k = scale * (bx * bx + by * by + bz * bz).sqrt();
            n.weight * negative_cap(beta0, k)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    Ok(total)
}

/// `∫∫ max(0, -F(pa, pb)) dΩa dΩb`, starting from the given rule and doubling
/// its order until successive estimates agree.
pub fn negativity_volume(state: &TwoQubitState, kind: DistributionKind, quad: &SphereQuadrature) -> Result<f64> {
    let rho = state.matrix();
    let mut order = quad.order();
    let mut last = negativity_at_order(rho, kind, order)?;
    while order < MAX_VOLUME_ORDER {
        order *= 2;
        let next = negativity_at_order(rho, kind, order)?;
        if (next - last).abs() < VOLUME_TOL {
            return Ok(next.max(0.0));
        }
        last = next;
    }
    Err(Error::Consistency(format!(
        "negativity volume did not settle to {VOLUME_TOL:e} by order {MAX_VOLUME_ORDER}"
    )))
}

/// Scan variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVar {
    R,
    P,
    Theta,
    Phi,
}

impl SweepVar {
    pub fn name(self) -> &'static str {
        match self {
            SweepVar::R => "r",
            SweepVar::P => "p",
            SweepVar::Theta => "theta",
            SweepVar::Phi => "phi",
        }
    }

    /// Full domain of the variable.
    pub fn domain(self) -> (f64, f64) {
        match self {
            SweepVar::R => (0.0, FRAC_PI_4),
            SweepVar::P => (0.0, 1.0),
            SweepVar::Theta => (0.0, PI),
            SweepVar::Phi => (0.0, TAU),
        }
    }
}

impl fmt::Display for SweepVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "r" => Ok(SweepVar::R),
            "p" => Ok(SweepVar::P),
            "theta" => Ok(SweepVar::Theta),
            "phi" => Ok(SweepVar::Phi),
            other => Err(Error::validation(format!("sweep: unknown variable '{other}'"))),
        }
    }
}

/// Sample points of one scan axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub var: SweepVar,
    pub values: Vec<f64>,
}

impl Axis {
    /// Validates the range and returns the ends clamped into the domain.
    fn checked(var: SweepVar, start: f64, end: f64, count: usize) -> Result<(f64, f64)> {
        let (lo, hi) = var.domain();
        let slack = 1e-12;
        for v in [start, end] {
            if !v.is_finite() || v < lo - slack || v > hi + slack {
                return Err(Error::validation(format!("{var}: value {v} is outside [{lo}, {hi}]")));
            }
        }
        if count == 0 {
            return Err(Error::validation(format!("{var}: at least one sample is required")));
        }
        Ok((start.clamp(lo, hi), end.clamp(lo, hi)))
    }

    /// `count` evenly spaced samples including both ends.
    pub fn linspace(var: SweepVar, start: f64, end: f64, count: usize) -> Result<Self> {
        let (start, end) = Self::checked(var, start, end, count)?;
        let last = count - 1;
        let values = (0..count)
            .map(|i| match i {
                0 => start,
                i if i == last => end,
                i => start + (end - start) * i as f64 / last as f64,
            })
            .collect();
        Ok(Self { var, values })
    }

    /// `count` evenly spaced samples excluding `end`.
    pub fn periodic(var: SweepVar, start: f64, end: f64, count: usize) -> Result<Self> {
        let (start, end) = Self::checked(var, start, end, count)?;
        let values = (0..count)
            .map(|i| start + (end - start) * i as f64 / count as f64)
            .collect();
        Ok(Self { var, values })
    }

    /// Whole domain; `φ` is sampled periodically, the others inclusively.
    pub fn full(var: SweepVar, count: usize) -> Result<Self> {
        let (lo, hi) = var.domain();
        if var == SweepVar::Phi {
            Self::periodic(var, lo, hi, count)
        } else {
            Self::linspace(var, lo, hi, count)
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Values of the variables that are not swept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedValues {
    pub r: f64,
    pub p: f64,
    pub theta: f64,
    pub phi: f64,
}

impl Default for FixedValues {
    fn default() -> Self {
        Self {
            r: 0.0,
            p: 0.0,
            theta: 0.0,
            phi: 0.0,
        }
    }
}

impl FixedValues {
    fn get(&self, var: SweepVar) -> f64 {
        match var {
            SweepVar::R => self.r,
            SweepVar::P => self.p,
            SweepVar::Theta => self.theta,
            SweepVar::Phi => self.phi,
        }
    }

    fn set(&mut self, var: SweepVar, v: f64) {
        match var {
            SweepVar::R => self.r = v,
            SweepVar::P => self.p = v,
            SweepVar::Theta => self.theta = v,
            SweepVar::Phi => self.phi = v,
        }
    }
}

/// How a scan cell is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Evaluator {
    /// Kernel trace against the pipeline state.
    Oracle,
    /// Tabulated closed-form coefficients (Wigner only).
    ClosedForm,
}

impl Evaluator {
    pub fn name(self) -> &'static str {
        match self {
            Evaluator::Oracle => "oracle",
            Evaluator::ClosedForm => "closed-form",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub scenario: Scenario,
    pub params: XStateParams,
    pub kind: DistributionKind,
    pub evaluator: Evaluator,
    pub axis1: Axis,
    pub axis2: Axis,
    pub fixed: FixedValues,
}

/// Row-major grid of slice values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub axis1: Axis,
    pub axis2: Axis,
    /// Scenario, state and the non-swept variables, in a fixed order.
    pub fixed: Vec<(String, String)>,
    pub kind: DistributionKind,
    pub values: Vec<f64>,
}

impl ScanTable {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.axis2.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.axis2.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn fixed_value(&self, key: &str) -> Option<&str> {
        self.fixed.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

fn evaluate_cell(cfg: &ScanConfig, vals: &FixedValues, state: Option<&TwoQubitState>) -> Result<f64> {
    let r = AccelerationParam::new(vals.r)?;
    let point = PhaseSpacePoint::new(vals.theta, vals.phi)?;
    match cfg.evaluator {
        Evaluator::ClosedForm => wigner_closed_form(cfg.scenario, cfg.params, r, vals.p, point),
        Evaluator::Oracle => match state {
            Some(s) => diagonal_slice(s, cfg.kind, point),
            None => diagonal_slice(&cfg.scenario.oracle_state(cfg.params, r, vals.p)?, cfg.kind, point),
        },
    }
}

fn fmt_fixed(v: f64) -> String {
    format!("{v}")
}

pub fn scan(cfg: &ScanConfig) -> Result<ScanTable> {
    let (v1, v2) = (cfg.axis1.var, cfg.axis2.var);
    if v1 == v2 {
        return Err(Error::validation(format!("sweep: both axes are '{v1}'")));
    }
    for ax in [&cfg.axis1, &cfg.axis2] {
        let lo = ax.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ax.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Axis::checked(ax.var, lo, hi, ax.len())?;
    }
    for var in [SweepVar::R, SweepVar::P, SweepVar::Theta, SweepVar::Phi] {
        if var != v1 && var != v2 {
            let v = cfg.fixed.get(var);
            Axis::checked(var, v, v, 1)?;
        }
    }
    if cfg.evaluator == Evaluator::ClosedForm && cfg.kind != DistributionKind::Wigner {
        return Err(Error::validation(
            "closed-form: closed forms exist only for the Wigner function",
        ));
    }
    cfg.params.check()?;

    let state_varies_in_row = matches!(v2, SweepVar::R | SweepVar::P);
    let rows: Vec<Vec<f64>> = cfg
        .axis1
        .values
        .par_iter()
        .map(|&a| {
            let mut vals = cfg.fixed;
            vals.set(v1, a);
            let row_state = if cfg.evaluator == Evaluator::Oracle && !state_varies_in_row {
                Some(
                    cfg.scenario
                        .oracle_state(cfg.params, AccelerationParam::new(vals.r)?, vals.p)?,
                )
            } else {
                None
            };
            cfg.axis2
                .values
                .iter()
                .map(|&b| {
                    vals.set(v2, b);
                    evaluate_cell(cfg, &vals, row_state.as_ref())
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let values: Vec<f64> = rows.into_iter().flatten().collect();
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Consistency(format!("scan produced non-finite value {bad}")));
    }

    let mut fixed = vec![
        ("scenario".to_string(), cfg.scenario.name().to_string()),
        ("evaluator".to_string(), cfg.evaluator.name().to_string()),
        ("c1".to_string(), fmt_fixed(cfg.params.c1)),
        ("c2".to_string(), fmt_fixed(cfg.params.c2)),
        ("c3".to_string(), fmt_fixed(cfg.params.c3)),
    ];
    for var in [SweepVar::R, SweepVar::P, SweepVar::Theta, SweepVar::Phi] {
        if var != v1 && var != v2 {
            fixed.push((var.name().to_string(), fmt_fixed(cfg.fixed.get(var))));
        }
    }
    Ok(ScanTable {
        axis1: cfg.axis1.clone(),
        axis2: cfg.axis2.clone(),
        fixed,
        kind: cfg.kind,
        values,
    })
}

/// A grid extremum with its coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extremum {
    pub value: f64,
    pub row: usize,
    pub col: usize,
    pub axis1: f64,
    pub axis2: f64,
}

/// Grid minimum and maximum; ties go to the first row-major occurrence.
pub fn min_max(table: &ScanTable) -> Result<(Extremum, Extremum)> {
    if table.values.is_empty() {
        return Err(Error::validation("min_max: empty table"));
    }
    let n = table.axis2.len();
    let (mut lo, mut hi) = (0usize, 0usize);
    for (k, &v) in table.values.iter().enumerate() {
        if v < table.values[lo] {
            lo = k;
        }
        if v > table.values[hi] {
            hi = k;
        }
    }
    let at = |k: usize| Extremum {
        value: table.values[k],
        row: k / n,
        col: k % n,
        axis1: table.axis1.values[k / n],
        axis2: table.axis2.values[k % n],
    };
    Ok((at(lo), at(hi)))
}

/// Roots of `f` on `[lo, hi]`: sign changes between `samples` uniform points,
/// each refined by bisection.
pub fn find_crossings(mut f: impl FnMut(f64) -> Result<f64>, lo: f64, hi: f64, samples: usize) -> Result<Vec<f64>> {
    let samples = samples.max(2);
    let xs: Vec<f64> = (0..samples)
        .map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64)
        .collect();
    let ys = xs.iter().map(|&x| f(x)).collect::<Result<Vec<f64>>>()?;
    let mut roots = Vec::new();
    for i in 0..samples - 1 {
        let (mut a, mut b, mut fa) = (xs[i], xs[i + 1], ys[i]);
        if fa == 0.0 {
            if roots.last() != Some(&a) {
                roots.push(a);
            }
            continue;
        }
        if ys[i + 1] == 0.0 {
            roots.push(b);
            continue;
        }
        if fa.signum() == ys[i + 1].signum() {
            continue;
        }
        while b - a > CROSSING_TOL {
            let m = 0.5 * (a + b);
            let fm = f(m)?;
            if fm == 0.0 {
                a = m;
                b = m;
                break;
            }
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        roots.push(0.5 * (a + b));
    }
    Ok(roots)
}

/// Values of `z = cos θ` on the `φ = π` meridian where the Wigner slice of
/// the pipeline state changes sign, ascending.
pub fn sign_boundary(
    scenario: Scenario,
    params: XStateParams,
    r: AccelerationParam,
    p: f64,
    resolution: usize,
) -> Result<Vec<f64>> {
    let state = scenario.oracle_state(params, r, p)?;
    find_crossings(
        |z| {
            diagonal_slice(
                &state,
                DistributionKind::Wigner,
                PhaseSpacePoint::new(z.clamp(-1.0, 1.0).acos(), PI)?,
            )
        },
        -1.0,
        1.0,
        resolution,
    )
}

/// Channel strengths in `[p_lo, p_hi]` at which the Wigner slice at `point`
/// changes sign.
pub fn strength_crossings(
    scenario: Scenario,
    params: XStateParams,
    r: AccelerationParam,
    point: PhaseSpacePoint,
    (p_lo, p_hi): (f64, f64),
    resolution: usize,
) -> Result<Vec<f64>> {
    find_crossings(
        |p| diagonal_slice(&scenario.oracle_state(params, r, p)?, DistributionKind::Wigner, point),
        p_lo,
        p_hi,
        resolution,
    )
}
