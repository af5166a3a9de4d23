use std::f64::consts::{FRAC_PI_4, PI, TAU};

use proptest::prelude::*;
use qpd_core::channels::{ChannelKind, ChannelSpec};
use qpd_core::phasespace::{diagonal_slice, kernel, psi_values, quasi_distribution_with, TensorSet};
use qpd_core::states::validate;
use qpd_core::{
    noisy_accelerated_state, quasi_distribution, AccelerationParam, DistributionKind, PhaseSpacePoint, Scenario,
    XStateParams,
};

fn physical() -> impl Strategy<Value = XStateParams> {
    (-1.0..=1.0f64, -1.0..=1.0f64, -1.0..=1.0f64)
        .prop_map(|(a, b, c)| XStateParams::unchecked(a, b, c))
        .prop_filter("physical", |p| p.check().is_ok())
}

fn accel() -> impl Strategy<Value = AccelerationParam> {
    (0.0..=FRAC_PI_4).prop_map(|r| AccelerationParam::new(r).unwrap())
}

fn channel() -> impl Strategy<Value = ChannelSpec> {
    (0..4usize, 0.0..=1.0f64).prop_map(|(k, p)| ChannelSpec::new(ChannelKind::ALL[k], p).unwrap())
}

fn point() -> impl Strategy<Value = PhaseSpacePoint> {
    (-1.0..=1.0f64, 0.0..TAU).prop_map(|(z, phi)| PhaseSpacePoint::new(z.acos(), phi).unwrap())
}

fn kind() -> impl Strategy<Value = DistributionKind> {
    (0..3usize).prop_map(|i| DistributionKind::ALL[i])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn pipeline_outputs_are_states(params in physical(), r in accel(), ch in channel()) {
        let s = noisy_accelerated_state(params, r, Some(ch)).unwrap();
        let rep = validate(s.matrix());
        prop_assert!(rep.passed(), "{:?}", rep.failures);
    }

    #[test]
    fn values_are_real_and_bounded(
        params in physical(), r in accel(), ch in channel(), k in kind(), pa in point(), pb in point()
    ) {
        let s = noisy_accelerated_state(params, r, Some(ch)).unwrap();
        // Errors out if the imaginary residual exceeds its tolerance.
        let v = quasi_distribution(&s, k, pa, pb).unwrap();
        let spread = (1.0 + k.bloch_scale()) / 2.0;
        prop_assert!(v.abs() <= spread * spread + 1e-12);
    }

    #[test]
    fn q_function_is_non_negative(params in physical(), r in accel(), ch in channel(), pa in point(), pb in point()) {
        let s = noisy_accelerated_state(params, r, Some(ch)).unwrap();
        prop_assert!(quasi_distribution(&s, DistributionKind::Q, pa, pb).unwrap() >= -1e-12);
    }

    #[test]
    fn wigner_is_frozen_in_phi_without_anti_diagonal_coherence(
        c in -1.0..=1.0f64, c3 in -1.0..=1.0f64, r in accel(), p in 0.0..=1.0f64,
        theta in 0.0..=PI, phi in 0.0..TAU, scenario_idx in 0..4usize
    ) {
        let params = XStateParams::unchecked(c, c, c3);
        prop_assume!(params.check().is_ok());
        // Bit and bit-phase flips feed the 01/10 coherence into 00/11 and are excluded.
        let scenario = [Scenario::Plain, Scenario::Accelerated, Scenario::AmplitudeDamping, Scenario::PhaseFlip][scenario_idx];
        let s = scenario.oracle_state(params, r, p).unwrap();
        let at = |ph| diagonal_slice(&s, DistributionKind::Wigner, PhaseSpacePoint::new(theta, ph).unwrap()).unwrap();
        prop_assert!((at(phi) - at(0.0)).abs() < 1e-12);
    }

    #[test]
    fn kernels_have_unit_trace(k in kind(), p in point()) {
        let m = kernel(k, p);
        prop_assert!(m.hermiticity_residual() < 1e-14);
        prop_assert!((m.trace().re - 1.0).abs() < 1e-14 && m.trace().im.abs() < 1e-14);
    }

    #[test]
    fn psi_sum_is_constant(p in point()) {
        let psi = psi_values(p);
        prop_assert!((psi.psi11 + psi.psi22 - (1.0 / TAU).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn angle_wrapping_is_canonical(theta in -20.0..20.0f64, phi in -20.0..20.0f64) {
        let p = PhaseSpacePoint::new(theta, phi).unwrap();
        prop_assert!((0.0..=PI).contains(&p.theta()));
        prop_assert!((0.0..TAU).contains(&p.phi()));
        // Same direction on the sphere.
        let (st, ct) = theta.sin_cos();
        let want = [st * phi.cos(), st * phi.sin(), ct];
        for (a, b) in p.cartesian().iter().zip(want) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn standard_set_matches_shared_kernel(k in kind(), pa in point(), pb in point(), params in physical()) {
        let rho = params.matrix();
        let a = quasi_distribution_with(TensorSet::standard(), &rho, k, pa, pb).unwrap();
        let b = quasi_distribution(&qpd_core::x_state(params).unwrap(), k, pa, pb).unwrap();
        prop_assert_eq!(a, b);
    }
}
