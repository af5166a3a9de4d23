//! Angular-momentum special functions: Clebsch–Gordan coefficients,
//! low-order spherical harmonics and the irreducible tensor operators that
//! build the phase-space kernel.
//!
//! Conventions: Condon–Shortley phases throughout. Spin-`S` matrices are
//! indexed by `i = m + S`, so for `S = 1/2` row 0 is `m = -1/2` (the
//! computational `|0>`) and row 1 is `m = +1/2` (`|1>`).

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::algebra::{re, ComplexMatrix};
use crate::error::{Error, Result};

/// A half-integer stored as twice its value.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn from_int(n: i32) -> Self {
        HalfInt(2 * n)
    }

    /// Fails unless `x` is an exact multiple of 1/2.
    pub fn from_f64(x: f64) -> Result<Self> {
        let twice = 2.0 * x;
        if !twice.is_finite() || twice.fract() != 0.0 || twice.abs() > i32::MAX as f64 {
            return Err(Error::structural(format!("{x} is not a half-integer")));
        }
        Ok(HalfInt(twice as i32))
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }
}

impl std::ops::Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl std::ops::Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl std::ops::Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Debug for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Tensor rank and projection `(L, M)` with `|M| <= L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AngularIndex {
    l: u32,
    m: i32,
}

impl AngularIndex {
    pub fn new(l: u32, m: i32) -> Result<Self> {
        if m.unsigned_abs() > l {
            return Err(Error::structural(format!("|M| = {} exceeds L = {l}", m.abs())));
        }
        Ok(Self { l, m })
    }

    pub fn l(self) -> u32 {
        self.l
    }

    pub fn m(self) -> i32 {
        self.m
    }

    /// All indices with `L <= max_l`, ordered by `L` then ascending `M`.
    pub fn up_to(max_l: u32) -> Vec<AngularIndex> {
        (0..=max_l)
            .flat_map(|l| (-(l as i32)..=l as i32).map(move |m| AngularIndex { l, m }))
            .collect()
    }
}

fn factorial(n: i32) -> f64 {
    debug_assert!(n >= 0);
    (1..=n).map(f64::from).product()
}

/// `(j - m)` and `(j + m)` must be non-negative integers.
fn projection_ok(j: HalfInt, m: HalfInt) -> Option<bool> {
    if (j.twice() - m.twice()) % 2 != 0 {
        return None;
    }
    Some(m.twice().abs() <= j.twice())
}

/// Clebsch–Gordan coefficient `<j1 m1; j2 m2 | J M>` by the Racah sum.
///
/// Selection-rule violations (projection out of range, `m1 + m2 != M`,
/// triangle inequality) give 0. Mismatched integer/half-integer parity
/// between a `j` and its `m` is a structural error.
pub fn clebsch_gordan(j1: HalfInt, m1: HalfInt, j2: HalfInt, m2: HalfInt, j: HalfInt, m: HalfInt) -> Result<f64> {
    if j1.twice() < 0 || j2.twice() < 0 || j.twice() < 0 {
        return Err(Error::structural("angular momenta must be non-negative"));
    }
    let in_range = [(j1, m1), (j2, m2), (j, m)]
        .into_iter()
        .map(|(jj, mm)| {
            projection_ok(jj, mm)
                .ok_or_else(|| Error::structural(format!("j = {jj} and m = {mm} differ by a non-integer")))
        })
        .collect::<Result<Vec<_>>>()?;
    if in_range.contains(&false) || m1 + m2 != m {
        return Ok(0.0);
    }
    if !(j1 + j2 + j).is_integer() {
        return Err(Error::structural("j1 + j2 + J must be an integer"));
    }
    let lo = (j1 - j2).twice().abs();
    if j.twice() < lo || j.twice() > (j1 + j2).twice() {
        return Ok(0.0);
    }

    // All combinations below are integers; work with them directly.
    let int = |h: HalfInt| h.twice() / 2;
    let a = int(j1 + j2 - j);
    let b = int(j1 - m1);
    let cc = int(j2 + m2);
    let d = int(j - j2 + m1);
    let e = int(j - j1 - m2);

    let prefactor =
        (f64::from(j.twice() + 1) * factorial(int(j + j1 - j2)) * factorial(int(j - j1 + j2)) * factorial(a)
            / factorial(int(j1 + j2 + j) + 1))
        .sqrt();
    let norm = (factorial(int(j + m))
        * factorial(int(j - m))
        * factorial(int(j1 - m1))
        * factorial(int(j1 + m1))
        * factorial(int(j2 - m2))
        * factorial(int(j2 + m2)))
    .sqrt();

    let k_min = 0.max(-d).max(-e);
    let k_max = a.min(b).min(cc);
    let sum: f64 = (k_min..=k_max)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign / (factorial(k)
                * factorial(a - k)
                * factorial(b - k)
                * factorial(cc - k)
                * factorial(d + k)
                * factorial(e + k))
        })
        .sum();
    Ok(prefactor * norm * sum)
}

/// Spherical harmonic `Y_{L,M}(θ, φ)` for `L <= 1`, unit-normalized on the
/// sphere, Condon–Shortley sign for `M = +1`.
pub fn spherical_harmonic(l: u32, m: i32, theta: f64, phi: f64) -> Result<Complex64> {
    let idx = AngularIndex::new(l, m)?;
    match (idx.l(), idx.m()) {
        (0, 0) => Ok(re(0.5 / PI.sqrt())),
        (1, 0) => Ok(re((3.0 / (4.0 * PI)).sqrt() * theta.cos())),
        (1, mm) => {
            let amp = (3.0 / (8.0 * PI)).sqrt() * theta.sin();
            let phase = Complex64::from_polar(1.0, f64::from(mm) * phi);
            Ok(phase * if mm > 0 { -amp } else { amp })
        }
        _ => Err(Error::structural(format!(
            "spherical harmonics are implemented for L <= 1, got L = {l}"
        ))),
    }
}

/// Adjoint irreducible tensor operator `T†_{L,M}` for spin `S`:
///
/// `T†_{L,M} = (-1)^M sqrt((2L+1)/(2S+1)) Σ_{m,m'} <S m; L -M | S m'> |S m'><S m|`.
pub fn tensor_operator(spin: HalfInt, l: u32, m: i32) -> Result<ComplexMatrix> {
    if spin.twice() < 0 {
        return Err(Error::structural("spin must be non-negative"));
    }
    let idx = AngularIndex::new(l, m)?;
    if idx.l() as i32 > spin.twice() {
        return Err(Error::structural(format!(
            "tensor rank L = {l} exceeds 2S = {}",
            spin.twice()
        )));
    }
    let dim = spin.twice() as usize + 1;
    let rank = HalfInt::from_int(l as i32);
    let minus_m = HalfInt::from_int(-m);
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let scale = sign * (f64::from(2 * l + 1) / dim as f64).sqrt();
    let proj = |i: usize| HalfInt::from_twice(2 * i as i32 - spin.twice());

    let mut t = ComplexMatrix::zeros(dim, dim);
    for col in 0..dim {
        for row in 0..dim {
            let cg = clebsch_gordan(spin, proj(col), rank, minus_m, spin, proj(row))?;
            t[(row, col)] = re(scale * cg);
        }
    }
    Ok(t)
}
