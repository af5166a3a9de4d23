//! Self-check suite run by `qpd validate`.
//!
//! Each group either must pass outright or must reproduce the documented
//! coefficient disagreements exactly.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::algebra::ComplexMatrix;
use crate::analysis::{bipartite_integral, make_quadrature, overlap_integral};
use crate::channels::{discrepancy_report, kraus_set, ledger, noisy_accelerated_state, ChannelKind, ChannelSpec};
use crate::error::Result;
use crate::phasespace::{
    quasi_distribution_with, wigner_closed_form, DistributionKind, Fault, PhaseSpacePoint, Scenario, TensorSet,
};
use crate::relativity::AccelerationParam;
use crate::states::{validate, XStateParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    Pass,
    ReproduceLedger,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupResult {
    pub name: &'static str,
    pub expectation: Expectation,
    pub passed: bool,
    pub checks: usize,
    pub max_residual: f64,
    /// First few failing checks.
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub fault: Option<Fault>,
    pub groups: Vec<GroupResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.groups.iter().all(|g| g.passed)
    }

    pub fn group(&self, name: &str) -> Option<&GroupResult> {
        self.groups.iter().find(|g| g.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub fault: Option<Fault>,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            fault: None,
            seed: 0x5eed,
        }
    }
}

const MAX_LISTED: usize = 8;

struct Group {
    name: &'static str,
    expectation: Expectation,
    checks: usize,
    max_residual: f64,
    failures: Vec<String>,
    failed: usize,
}

impl Group {
    fn new(name: &'static str, expectation: Expectation) -> Self {
        Self {
            name,
            expectation,
            checks: 0,
            max_residual: 0.0,
            failures: Vec::new(),
            failed: 0,
        }
    }

    fn fail(&mut self, msg: String) {
        self.checks += 1;
        self.failed += 1;
        if self.failures.len() < MAX_LISTED {
            self.failures.push(msg);
        }
    }

    fn within(&mut self, residual: f64, tol: f64, what: impl FnOnce() -> String) {
        if residual.is_nan() || residual > tol {
            self.fail(format!("{}: residual {residual:e} > {tol:e}", what()));
        } else {
            self.checks += 1;
        }
        if residual.is_finite() {
            self.max_residual = self.max_residual.max(residual);
        } else {
            self.max_residual = f64::INFINITY;
        }
    }

    fn check_result<T>(&mut self, r: Result<T>, what: impl FnOnce() -> String) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.fail(format!("{}: {e}", what()));
                None
            }
        }
    }

    fn finish(mut self) -> GroupResult {
        if self.failed > self.failures.len() {
            self.failures
                .push(format!("... {} failing checks in total", self.failed));
        }
        GroupResult {
            name: self.name,
            expectation: self.expectation,
            passed: self.failed == 0,
            checks: self.checks,
            max_residual: self.max_residual,
            failures: self.failures,
        }
    }
}

fn random_r(rng: &mut StdRng) -> AccelerationParam {
    AccelerationParam::new(rng.random_range(0.0..=FRAC_PI_4)).expect("in range")
}

fn random_point(rng: &mut StdRng) -> PhaseSpacePoint {
    let z: f64 = rng.random_range(-1.0..=1.0);
    PhaseSpacePoint::new(z.acos(), rng.random_range(0.0..TAU)).expect("in range")
}

fn random_channel(rng: &mut StdRng) -> ChannelSpec {
    let kind = ChannelKind::ALL[rng.random_range(0..ChannelKind::ALL.len())];
    ChannelSpec::new(kind, rng.random_range(0.0..=1.0)).expect("in range")
}

/// A few pipeline outputs plus the named states.
fn sample_states(rng: &mut StdRng, count: usize) -> Vec<(String, ComplexMatrix)> {
    let mut out = vec![
        ("singlet".to_string(), XStateParams::singlet().matrix()),
        ("mixed".to_string(), XStateParams::maximally_mixed().matrix()),
    ];
    for i in 0..count {
        let params = XStateParams::random_physical(rng);
        let (r, ch) = (random_r(rng), random_channel(rng));
        if let Ok(s) = noisy_accelerated_state(params, r, Some(ch)) {
            out.push((format!("random #{i} ({ch}, r={:.3})", r.value()), s.into_matrix()));
        }
    }
    out
}

fn cptp(rng: &mut StdRng) -> GroupResult {
    let mut g = Group::new("cptp", Expectation::Pass);
    for kind in ChannelKind::ALL {
        for k in 0..=20 {
            let spec = ChannelSpec::new(kind, 0.05 * f64::from(k)).expect("grid strength");
            g.within(kraus_set(spec).completeness_residual(), 1e-12, || {
                format!("completeness {spec}")
            });
        }
    }
    for _ in 0..200 {
        let params = XStateParams::random_physical(rng);
        let (r, ch) = (random_r(rng), random_channel(rng));
        let Some(state) = g.check_result(noisy_accelerated_state(params, r, Some(ch)), || {
            format!("pipeline {ch}")
        }) else {
            continue;
        };
        let rep = validate(state.matrix());
        g.within(rep.trace_residual, 1e-12, || format!("trace after {ch}"));
        let neg = rep.min_eigenvalue.map_or(f64::INFINITY, |m| (-m).max(0.0));
        g.within(neg, 1e-10, || format!("positivity after {ch}"));
    }
    g.finish()
}

fn normalization(set: &TensorSet, rng: &mut StdRng) -> GroupResult {
    let mut g = Group::new("normalization", Expectation::Pass);
    let quad = make_quadrature(4).expect("order 4");
    for (label, rho) in sample_states(rng, 6) {
        let want = 4.0 * PI * PI * rho.trace().re;
        for kind in DistributionKind::ALL {
            if let Some(v) = g.check_result(bipartite_integral(set, &rho, kind, &quad), || format!("{label} {kind}")) {
                g.within((v - want).abs(), 1e-10, || format!("{label} {kind}"));
            }
        }
    }
    g.finish()
}

fn overlap(set: &TensorSet, rng: &mut StdRng) -> GroupResult {
    let mut g = Group::new("overlap", Expectation::Pass);
    let quad = make_quadrature(4).expect("order 4");
    let states = sample_states(rng, 4);
    use DistributionKind::{Wigner, P, Q};
    for (la, a) in &states {
        for (lb, b) in &states {
            let want = (a * b).trace().re;
            for (ka, kb) in [(Wigner, Wigner), (P, Q)] {
                let got = overlap_integral(set, (a, ka), (b, kb), &quad);
                if let Some(v) = g.check_result(got, || format!("{la} x {lb} ({ka},{kb})")) {
                    g.within((v - want).abs(), 1e-10, || format!("{la} x {lb} ({ka},{kb})"));
                }
            }
        }
    }
    g.finish()
}

fn q_positivity(set: &TensorSet, rng: &mut StdRng) -> GroupResult {
    let mut g = Group::new("q-positivity", Expectation::Pass);
    let states = sample_states(rng, 98);
    for i in 0..10_000 {
        let (label, rho) = &states[i % states.len()];
        let (pa, pb) = (random_point(rng), random_point(rng));
        let v = quasi_distribution_with(set, rho, DistributionKind::Q, pa, pb);
        if let Some(v) = g.check_result(v, || format!("{label} at {pa} {pb}")) {
            g.within((-v).max(0.0), 1e-12, || format!("{label} at {pa} {pb} = {v:e}"));
        }
    }
    g.finish()
}

fn tensor_orthonormality(set: &TensorSet) -> GroupResult {
    let mut g = Group::new("tensor-orthonormality", Expectation::Pass);
    for ((ia, a), (ja, b)) in set.iter().flat_map(|x| set.iter().map(move |y| (x, y))) {
        let want = if ia == ja { 1.0 } else { 0.0 };
        let got = (&a.adjoint() * b).trace();
        g.within((got.re - want).abs().max(got.im.abs()), 1e-14, || {
            format!("Tr[T{ia:?}† T{ja:?}]")
        });
    }
    for ((l, m), t) in set.iter() {
        let partner = set.get(l, -m).expect("complete rank");
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let residual = t.max_abs_diff(&partner.adjoint().scale_real(sign));
        g.within(residual, 1e-14, || format!("conjugation relation at ({l},{m})"));
    }
    g.finish()
}

fn oracle_agreement(set: &TensorSet, rng: &mut StdRng) -> GroupResult {
    let mut g = Group::new("oracle-agreement", Expectation::Pass);
    let grid = PhaseSpacePoint::grid(16, 16);
    for _ in 0..20 {
        let params = XStateParams::random_physical(rng);
        let r = random_r(rng);
        let p = rng.random_range(0.0..=1.0);
        for scenario in [Scenario::Plain, Scenario::Accelerated, Scenario::PhaseFlip] {
            let Some(state) = g.check_result(scenario.oracle_state(params, r, p), || format!("{scenario} state"))
            else {
                continue;
            };
            let mut worst: f64 = 0.0;
            for &pt in &grid {
                let cf = wigner_closed_form(scenario, params, r, p, pt);
                let or = quasi_distribution_with(set, state.matrix(), DistributionKind::Wigner, pt, pt);
                match (cf, or) {
                    (Ok(a), Ok(b)) => worst = worst.max((a - b).abs()),
                    (Err(e), _) | (_, Err(e)) => {
                        g.fail(format!("{scenario} at {pt}: {e}"));
                        worst = f64::INFINITY;
                        break;
                    }
                }
            }
            g.within(worst, 1e-10, || {
                format!("{scenario} for {params:?}, r={:.4}, p={p:.4}", r.value())
            });
        }
    }
    g.finish()
}

fn discrepancy_ledger() -> GroupResult {
    let mut g = Group::new("discrepancy-ledger", Expectation::ReproduceLedger);
    for entry in ledger() {
        let r = AccelerationParam::new(entry.r).expect("ledger r");
        let what = || format!("{} {}", entry.label, entry.channel);
        let Some(rep) = g.check_result(discrepancy_report(entry.params, r, entry.channel), what) else {
            continue;
        };
        let got = rep.flagged_names();
        if got == entry.expected_flags {
            g.checks += 1;
        } else {
            g.fail(format!(
                "{}: flagged {got:?}, ledger lists {:?}",
                what(),
                entry.expected_flags
            ));
        }
    }
    g.finish()
}

pub const GROUP_NAMES: [&str; 7] = [
    "cptp",
    "normalization",
    "overlap",
    "q-positivity",
    "tensor-orthonormality",
    "oracle-agreement",
    "discrepancy-ledger",
];

pub fn run_suite(opts: SuiteOptions) -> SuiteReport {
    let set = TensorSet::with_fault(opts.fault);
    let mut rng = StdRng::seed_from_u64(opts.seed);
    let groups = vec![
        cptp(&mut rng),
        normalization(&set, &mut rng),
        overlap(&set, &mut rng),
        q_positivity(&set, &mut rng),
        tensor_orthonormality(&set),
        oracle_agreement(&set, &mut rng),
        discrepancy_ledger(),
    ];
    SuiteReport {
        fault: opts.fault,
        groups,
    }
}
