//! Sample sizing and acceptance bounds.
//!
//! `sample_size` evaluates the logarithm in fixed point with 60 decimal
//! digits, so the ceiling is exact for every rational input whose quotient
//! is not just above an integer.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::Rational;

const DIGITS: u32 = 60;

/// Quotients within `10^-GUARD_DIGITS` above an integer are taken to be
/// that integer. Inputs converted from binary floating point, such as
/// `1/e`, carry errors near `1e-16`, well inside this guard.
pub const GUARD_DIGITS: u32 = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StatsError {
    #[error("{name} must lie in (0, 1), got {value}")]
    OutOfRange { name: &'static str, value: Rational },
}

fn scale() -> BigInt {
    num_traits::pow(BigInt::from(10u32), DIGITS as usize)
}

/// `atanh(z) * S` for `0 <= z < 1`, with `z` given scaled by `S`.
fn atanh_fixed(z: &BigInt, s: &BigInt) -> BigInt {
    let z2 = z * z / s;
    let mut power = z.clone();
    let mut sum = z.clone();
    let mut k = 1u32;
    loop {
        power = &power * &z2 / s;
        if power.is_zero() {
            break;
        }
        sum += &power / BigInt::from(2 * k + 1);
        k += 1;
    }
    sum
}

fn to_fixed(r: &BigRational, s: &BigInt) -> BigInt {
    (r.numer() * s).div_floor(r.denom())
}

/// `ln(y) * 10^60`, rounded towards minus infinity up to a few units.
fn ln_fixed(y: &BigRational) -> BigInt {
    assert!(y.is_positive(), "logarithm of a non-positive number");
    if y < &BigRational::one() {
        return -ln_fixed(&y.recip());
    }
    let s = scale();
    // y = m * 2^e with 1 <= m < 2
    let mut e = y.numer().bits() as i64 - y.denom().bits() as i64;
    let two = BigRational::from_integer(BigInt::from(2));
    let pow2 = |e: i64| -> BigRational {
        let p = BigRational::from_integer(BigInt::one() << e.unsigned_abs());
        if e >= 0 {
            p
        } else {
            p.recip()
        }
    };
    let mut m = y / pow2(e);
    while m >= two {
        m /= &two;
        e += 1;
    }
    while m < BigRational::one() {
        m *= &two;
        e -= 1;
    }
    let one = BigRational::one();
    let z = (&m - &one) / (&m + &one);
    let ln_m = atanh_fixed(&to_fixed(&z, &s), &s) * 2;
    let third = BigRational::new(BigInt::one(), BigInt::from(3));
    let ln2 = atanh_fixed(&to_fixed(&third, &s), &s) * 2;
    ln_m + ln2 * BigInt::from(e)
}

fn open_unit(name: &'static str, x: &Rational) -> Result<(), StatsError> {
    if x.is_positive() && x < &Rational::one() {
        Ok(())
    } else {
        Err(StatsError::OutOfRange {
            name,
            value: x.clone(),
        })
    }
}

/// `ceil(ln(1/epsilon) / (2 gamma^2))`.
pub fn sample_size(epsilon: &Rational, gamma: &Rational) -> Result<u64, StatsError> {
    open_unit("epsilon", epsilon)?;
    open_unit("gamma", gamma)?;
    let s = scale();
    let ln = ln_fixed(&epsilon.recip().to_big());
    let g = gamma.to_big();
    let x = ln * g.denom() * g.denom() / (BigInt::from(2) * g.numer() * g.numer());
    let (whole, frac) = x.div_mod_floor(&s);
    let guard = BigInt::from(10u32).pow(DIGITS - GUARD_DIGITS);
    let n = if frac <= guard {
        whole
    } else {
        whole + 1
    };
    Ok(n.to_u64().expect("sample size fits in 64 bits"))
}

/// `floor(n (1 - p))`, clamped at 0 for `p >= 1`.
pub fn d_max(n: u64, p: &Rational) -> u64 {
    let slack = &Rational::one() - p;
    if !slack.is_positive() {
        return 0;
    }
    (&Rational::from(BigInt::from(n)) * &slack)
        .floor()
        .to_u64()
        .unwrap_or(u64::MAX)
}

/// Upper confidence bounds reported on acceptance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AcceptBounds {
    /// Bound on the probability that a drawn sequence is not `delta`-stable.
    pub lambda_ub: f64,
    /// Per-class bounds; absent when no sample of that class was checked.
    pub theta_plus_ub: Option<f64>,
    pub theta_minus_ub: Option<f64>,
}

/// `1 - eta^(1/m)`, computed without cancellation. `m = 0` gives the
/// vacuous bound 1.
fn zero_failure_bound(eta: f64, m: u64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    -(eta.ln() / m as f64).exp_m1()
}

/// `lambda <= 1 - eta^(1/n)` and `theta± <= 1 - eta±^(1/m±)` (whenever `m± > 0`).
pub fn accept_bounds(n: u64, m_plus: u64, m_minus: u64, eta: f64, eta_split: (f64, f64)) -> AcceptBounds {
    let class = |m: u64, e: f64| (m > 0).then(|| zero_failure_bound(e, m));
    AcceptBounds {
        lambda_ub: zero_failure_bound(eta, n),
        theta_plus_ub: class(m_plus, eta_split.0),
        theta_minus_ub: class(m_minus, eta_split.1),
    }
}

/// Decimal rendering with 12 significant digits.
pub fn significant(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}
