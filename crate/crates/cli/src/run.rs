use std::fmt;
use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use qpd_core::analysis::{scan, Axis, Evaluator, FixedValues, ScanConfig, ScanTable, SweepVar};
use qpd_core::channels::{discrepancy_report, ledger, parse_channel, ChannelSpec};
use qpd_core::export::{format_sci, write_csv, write_json, write_sphere_map_csv, write_sphere_map_json};
use qpd_core::phasespace::{
    quasi_distribution, wigner_closed_form, DistributionKind, Fault, PhaseSpacePoint, Scenario,
};
use qpd_core::relativity::{rindler_r_from_physical, AccelerationParam};
use qpd_core::states::{StateSpec, XStateParams};
use qpd_core::suite::{run_suite, SuiteOptions};
use qpd_core::Error;

use crate::args::{
    EvalArgs, FaultArg, Format, GridArgs, KindArg, LedgerArgs, ScanArgs, SphereMapArgs, StateArgs, ValidateArgs,
};

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_VALIDATION: u8 = 3;
pub const EXIT_IO: u8 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(flag: &str, msg: impl fmt::Display) -> Self {
        Self {
            code: EXIT_USAGE,
            message: format!("{flag}: {msg}"),
        }
    }

    pub fn validation(flag: &str, msg: impl fmt::Display) -> Self {
        Self {
            code: EXIT_VALIDATION,
            message: format!("{flag}: {msg}"),
        }
    }

    pub fn io(flag: &str, msg: impl fmt::Display) -> Self {
        Self {
            code: EXIT_IO,
            message: format!("{flag}: {msg}"),
        }
    }

    fn from_core(flag: &str, e: Error) -> Self {
        match e {
            Error::Io(m) => Self::io(flag, m),
            other => {
                let msg = other.message();
                let own = format!("{}: ", flag.trim_start_matches('-'));
                Self::validation(flag, msg.strip_prefix(&own).unwrap_or(msg))
            }
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

type CliResult<T> = Result<T, CliError>;

fn core<T>(flag: &str, r: qpd_core::Result<T>) -> CliResult<T> {
    r.map_err(|e| CliError::from_core(flag, e))
}

/// Radians, or literals such as `pi`, `-pi/2`, `3pi/4`, `2*pi`.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let t = text.trim();
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    let bad = || format!("'{text}' is not a number or a multiple of pi");
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, d.trim().parse::<f64>().map_err(|_| bad())?),
        None => (body, 1.0),
    };
    let coeff = num.trim().strip_suffix("pi").ok_or_else(bad)?;
    let coeff = coeff.trim().strip_suffix('*').unwrap_or(coeff).trim();
    let coeff = if coeff.is_empty() {
        1.0
    } else {
        coeff.parse::<f64>().map_err(|_| bad())?
    };
    if den == 0.0 {
        return Err(bad());
    }
    let v = coeff * std::f64::consts::PI / den;
    Ok(if neg { -v } else { v })
}

fn angle(flag: &str, text: &str) -> CliResult<f64> {
    parse_angle(text).map_err(|m| CliError::usage(flag, m))
}

fn range(flag: &str, text: &str) -> CliResult<(f64, f64)> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| CliError::usage(flag, format!("expected A:B, got '{text}'")))?;
    Ok((angle(flag, a)?, angle(flag, b)?))
}

/// Twelve significant digits, trailing zeros dropped.
pub fn sig12(v: f64) -> String {
    let rounded: f64 = format!("{v:.11e}").parse().expect("round trip");
    if rounded == 0.0 {
        "0".to_string()
    } else {
        format!("{rounded}")
    }
}

struct Setup {
    params: XStateParams,
    r: Option<AccelerationParam>,
    channel: Option<ChannelSpec>,
    kind: DistributionKind,
    evaluator: Evaluator,
}

impl Setup {
    fn from_args(a: &StateArgs) -> CliResult<Self> {
        let params = core("--state", a.state.parse::<StateSpec>())?.params();
        let r = match (&a.accel, &a.accel_physical) {
            (Some(text), _) => Some(core("--accel", AccelerationParam::new(angle("--accel", text)?))?),
            (None, Some(text)) => {
                let vals: Vec<f64> = text
                    .split(',')
                    .map(|v| v.trim().parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| CliError::usage("--accel-physical", format!("'{text}' is not omega,a,c")))?;
                let [omega, accel, c] = vals[..] else {
                    return Err(CliError::usage("--accel-physical", "expected three values omega,a,c"));
                };
                Some(core("--accel-physical", rindler_r_from_physical(omega, accel, c))?)
            }
            (None, None) => None,
        };
        let channel = core("--channel", parse_channel(&a.channel))?;
        let kind = match a.kind {
            KindArg::Q => DistributionKind::Q,
            KindArg::Wigner => DistributionKind::Wigner,
            KindArg::P => DistributionKind::P,
        };
        let evaluator = if a.closed_form {
            Evaluator::ClosedForm
        } else {
            Evaluator::Oracle
        };
        if evaluator == Evaluator::ClosedForm && kind != DistributionKind::Wigner {
            return Err(CliError::usage(
                "--closed-form",
                "closed forms exist only for --kind wigner",
            ));
        }
        Ok(Self {
            params,
            r,
            channel,
            kind,
            evaluator,
        })
    }

    fn scenario(&self, r_swept: bool) -> Scenario {
        match self.channel {
            Some(spec) => Scenario::from_channel(Some(spec.kind())),
            None if self.r.is_some() || r_swept => Scenario::Accelerated,
            None => Scenario::Plain,
        }
    }

    fn r(&self) -> AccelerationParam {
        self.r.unwrap_or(AccelerationParam::ZERO)
    }

    fn p(&self) -> f64 {
        self.channel.map_or(0.0, |c| c.p())
    }
}

fn point(theta_flag: &str, theta: &str, phi_flag: &str, phi: &str) -> CliResult<PhaseSpacePoint> {
    let t = angle(theta_flag, theta)?;
    let p = angle(phi_flag, phi)?;
    core(theta_flag, PhaseSpacePoint::new(t, p))
}

pub fn cmd_eval(a: &EvalArgs, out: &mut impl Write) -> CliResult<()> {
    let setup = Setup::from_args(&a.common)?;
    let scenario = setup.scenario(false);
    let pa = point("--theta", &a.theta, "--phi", &a.phi)?;
    let pb = point(
        "--theta-b",
        a.theta_b.as_deref().unwrap_or(&a.theta),
        "--phi-b",
        a.phi_b.as_deref().unwrap_or(&a.phi),
    )?;
    let value = match setup.evaluator {
        Evaluator::ClosedForm => {
            if pa != pb {
                return Err(CliError::usage(
                    "--closed-form",
                    "closed forms describe equal angles on both qubits",
                ));
            }
            core(
                "--state",
                wigner_closed_form(scenario, setup.params, setup.r(), setup.p(), pa),
            )?
        }
        Evaluator::Oracle => {
            let state = core("--state", scenario.oracle_state(setup.params, setup.r(), setup.p()))?;
            core("--state", quasi_distribution(&state, setup.kind, pa, pb))?
        }
    };
    writeln!(out, "{}", sig12(value)).map_err(|e| CliError::io("stdout", e))
}

fn parse_points(text: &str) -> CliResult<(usize, usize)> {
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::usage("--points", format!("'{s}' is not a positive integer")))
    };
    match text.split_once(',') {
        Some((a, b)) => Ok((parse(a)?, parse(b)?)),
        None => {
            let n = parse(text)?;
            Ok((n, n))
        }
    }
}

fn range_flag(var: SweepVar) -> &'static str {
    match var {
        SweepVar::R => "--r-range",
        SweepVar::P => "--p-range",
        SweepVar::Theta => "--theta-range",
        SweepVar::Phi => "--phi-range",
    }
}

fn grid_range(grid: &GridArgs, var: SweepVar) -> Option<&str> {
    match var {
        SweepVar::R => grid.r_range.as_deref(),
        SweepVar::P => grid.p_range.as_deref(),
        SweepVar::Theta => grid.theta_range.as_deref(),
        SweepVar::Phi => grid.phi_range.as_deref(),
    }
}

fn build_axis(grid: &GridArgs, var: SweepVar, n: usize) -> CliResult<Axis> {
    let flag = range_flag(var);
    match grid_range(grid, var) {
        Some(text) => {
            let (a, b) = range(flag, text)?;
            core(flag, Axis::linspace(var, a, b, n))
        }
        None => core(flag, Axis::full(var, n)),
    }
}

fn build_scan(
    common: &StateArgs,
    grid: &GridArgs,
    vars: (SweepVar, SweepVar),
    theta: Option<&str>,
    phi: Option<&str>,
) -> CliResult<ScanTable> {
    let setup = Setup::from_args(common)?;
    let (v1, v2) = vars;
    if v1 == v2 {
        return Err(CliError::usage("--sweep", format!("both variables are '{v1}'")));
    }
    let swept = |v| v == v1 || v == v2;
    if swept(SweepVar::R) && (common.accel.is_some() || common.accel_physical.is_some()) {
        return Err(CliError::usage("--accel", "r is swept, so it cannot also be fixed"));
    }
    if swept(SweepVar::P) && setup.channel.is_none() {
        return Err(CliError::usage("--sweep", "sweeping p needs a --channel"));
    }
    if swept(SweepVar::Theta) && theta.is_some() {
        return Err(CliError::usage("--theta", "theta is swept, so it cannot also be fixed"));
    }
    if swept(SweepVar::Phi) && phi.is_some() {
        return Err(CliError::usage("--phi", "phi is swept, so it cannot also be fixed"));
    }
    for var in [SweepVar::R, SweepVar::P, SweepVar::Theta, SweepVar::Phi] {
        if !swept(var) && grid_range(grid, var).is_some() {
            return Err(CliError::usage(range_flag(var), format!("{var} is not swept")));
        }
    }
    let (n1, n2) = parse_points(&grid.points)?;
    let fixed = FixedValues {
        r: setup.r().value(),
        p: setup.p(),
        theta: theta.map(|t| angle("--theta", t)).transpose()?.unwrap_or(0.0),
        phi: phi.map(|t| angle("--phi", t)).transpose()?.unwrap_or(0.0),
    };
    let cfg = ScanConfig {
        scenario: setup.scenario(swept(SweepVar::R)),
        params: setup.params,
        kind: setup.kind,
        evaluator: setup.evaluator,
        axis1: build_axis(grid, v1, n1)?,
        axis2: build_axis(grid, v2, n2)?,
        fixed,
    };
    core("--sweep", scan(&cfg))
}

fn parse_sweep(text: &str) -> CliResult<(SweepVar, SweepVar)> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| CliError::usage("--sweep", format!("expected two variables VAR1,VAR2, got '{text}'")))?;
    let var = |s: &str| s.parse::<SweepVar>().map_err(|e| CliError::usage("--sweep", e));
    Ok((var(a)?, var(b)?))
}

fn emit(
    path: Option<&Path>,
    stdout: &mut impl Write,
    write: impl FnOnce(&mut dyn Write) -> qpd_core::Result<()>,
) -> CliResult<()> {
    match path {
        Some(p) => {
            let mut f = File::create(p).map_err(|e| CliError::io("--out", format!("{}: {e}", p.display())))?;
            write(&mut f).map_err(|e| CliError::io("--out", e))?;
            f.flush().map_err(|e| CliError::io("--out", e))
        }
        None => write(stdout).map_err(|e| CliError::io("stdout", e)),
    }
}

pub fn cmd_scan(a: &ScanArgs, stdout: &mut impl Write) -> CliResult<()> {
    let vars = parse_sweep(&a.sweep)?;
    let table = build_scan(&a.common, &a.grid, vars, a.theta.as_deref(), a.phi.as_deref())?;
    emit(a.grid.out.as_deref(), stdout, |w| match a.grid.format {
        Format::Csv => write_csv(&table, w),
        Format::Json => write_json(&table, w),
    })
}

pub fn cmd_sphere_map(a: &SphereMapArgs, stdout: &mut impl Write) -> CliResult<()> {
    let table = build_scan(&a.common, &a.grid, (SweepVar::Theta, SweepVar::Phi), None, None)?;
    emit(a.grid.out.as_deref(), stdout, |w| match a.grid.format {
        Format::Csv => write_sphere_map_csv(&table, w),
        Format::Json => write_sphere_map_json(&table, w),
    })
}

/// Returns whether every group passed.
pub fn cmd_validate(a: &ValidateArgs, out: &mut impl Write) -> CliResult<bool> {
    let fault = a.inject_fault.map(|f| match f {
        FaultArg::T11Sign => Fault::NegateT11,
    });
    let report = run_suite(SuiteOptions { fault, seed: a.seed });
    let io = |e: io::Error| CliError::io("stdout", e);
    if a.json {
        let doc = serde_json::json!({ "passed": report.passed(), "report": report });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serializable")).map_err(io)?;
    } else {
        for g in &report.groups {
            let tag = if g.passed { "PASS" } else { "FAIL" };
            writeln!(
                out,
                "{tag}  {:<22} checks={:<6} max_residual={:e}",
                g.name, g.checks, g.max_residual
            )
            .map_err(io)?;
            for f in &g.failures {
                writeln!(out, "      {f}").map_err(io)?;
            }
        }
        let failed = report.groups.iter().filter(|g| !g.passed).count();
        if failed == 0 {
            writeln!(out, "validate: all {} groups passed", report.groups.len()).map_err(io)?;
        } else {
            writeln!(out, "validate: {failed} of {} groups failed", report.groups.len()).map_err(io)?;
        }
    }
    Ok(report.passed())
}

pub fn cmd_ledger(a: &LedgerArgs, stdout: &mut impl Write) -> CliResult<()> {
    let mut reports = Vec::new();
    for entry in ledger() {
        let r = core("ledger", AccelerationParam::new(entry.r))?;
        reports.push((
            entry.label,
            core("ledger", discrepancy_report(entry.params, r, entry.channel))?,
        ));
    }
    emit(a.out.as_deref(), stdout, |w| {
        let io = |e: io::Error| Error::Io(e.to_string());
        match a.format {
            Format::Json => {
                let docs: Vec<_> = reports
                    .iter()
                    .map(|(label, rep)| serde_json::json!({ "input": label, "report": rep }))
                    .collect();
                writeln!(w, "{}", serde_json::to_string_pretty(&docs).expect("serializable")).map_err(io)
            }
            Format::Csv => {
                writeln!(
                    w,
                    "input,channel,r,p,coefficient,element,tabulated,oracle,abs_delta,flagged"
                )
                .map_err(io)?;
                for (label, rep) in &reports {
                    for e in &rep.entries {
                        writeln!(
                            w,
                            "{label},{},{},{},{},{},{},{},{},{}",
                            rep.channel.kind(),
                            rep.r,
                            rep.channel.p(),
                            e.name,
                            e.element.ket_bra(),
                            format_sci(e.tabulated),
                            format_sci(e.oracle),
                            format_sci(e.abs_delta),
                            e.flagged
                        )
                        .map_err(io)?;
                    }
                }
                Ok(())
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn angle_literals() {
        assert_eq!(parse_angle("1.5").unwrap(), 1.5);
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("-pi/4").unwrap(), -PI / 4.0);
        assert_eq!(parse_angle("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("2*pi").unwrap(), 2.0 * PI);
        for bad in ["", "tau", "pi/0", "pi/x", "xpi"] {
            assert!(parse_angle(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn significant_digits() {
        assert_eq!(sig12(-0.5), "-0.5");
        assert_eq!(sig12(0.25), "0.25");
        assert_eq!(sig12(0.254_338_912_345_678_9), "0.254338912346");
        assert_eq!(sig12(-1e-17), "-0.00000000000000001");
        assert_eq!(sig12(0.0), "0");
    }

    #[test]
    fn points_grammar() {
        assert_eq!(parse_points("8").unwrap(), (8, 8));
        assert_eq!(parse_points("3,5").unwrap(), (3, 5));
        assert!(parse_points("0").is_err());
        assert!(parse_points("a,2").is_err());
    }
}
