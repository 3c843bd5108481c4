//! Exact integer roots and logarithms of arbitrary-precision integers.
//!
//! `iroot` returns the floor of the t-th root and verifies the bracket
//! `r^t <= x < (r+1)^t` before returning. The fixed-point logarithm is used
//! to arbitrate near-ties between real-valued ratios of logarithms.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};

/// Floor of the `t`-th root of `x`.
pub fn iroot(x: &BigUint, t: u32) -> Result<BigUint> {
    if t < 2 {
        return invalid(format!("root degree must be >= 2, got {t}"));
    }
    let r = iroot_unchecked(x, t);
    if r.pow(t) > *x || (&r + 1u32).pow(t) <= *x {
        return Err(Error::Internal(format!("iroot bracket failed for degree {t}")));
    }
    Ok(r)
}

pub(crate) fn iroot_unchecked(x: &BigUint, t: u32) -> BigUint {
    if x.is_zero() {
        return BigUint::zero();
    }
    let bits = x.bits();
    if bits <= 100 {
        let v = x.to_u128().unwrap();
        return BigUint::from(iroot_u128(v, t));
    }
    // Newton from above, seeded with a power of two >= the root.
    let t_big = BigUint::from(t);
    let mut r = BigUint::one() << bits.div_ceil(t as u64);
    loop {
        let next = ((&t_big - 1u32) * &r + x / r.pow(t - 1)) / &t_big;
        if next >= r {
            break;
        }
        r = next;
    }
    r
}

/// Floor of the `t`-th root of a machine integer.
pub fn iroot_u128(x: u128, t: u32) -> u128 {
    debug_assert!(t >= 2);
    if x < 2 {
        return x;
    }
    let mut r = (x as f64).powf(1.0 / t as f64) as u128;
    // float estimate is within a couple of units; walk to the exact bracket
    while r > 0 && pow_exceeds(r, t, x) {
        r -= 1;
    }
    while !pow_exceeds(r + 1, t, x) {
        r += 1;
    }
    r
}

/// `base^t > limit`, without overflow.
fn pow_exceeds(base: u128, t: u32, limit: u128) -> bool {
    let mut acc: u128 = 1;
    for _ in 0..t {
        acc = match acc.checked_mul(base) {
            Some(v) => v,
            None => return true,
        };
        if acc > limit {
            return true;
        }
    }
    false
}

/// Natural logarithm of a positive big integer, in double precision.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Nearest-ish double to an exact rational of any size; saturates to
/// infinity or zero outside the double range.
pub fn rational_to_f64(r: &num_rational::BigRational) -> f64 {
    let (n, d) = (r.numer().magnitude(), r.denom().magnitude());
    if n.is_zero() {
        return 0.0;
    }
    // keep about 64 significant bits in the quotient
    let shift = 64 - (n.bits() as i64 - d.bits() as i64);
    let q = if shift >= 0 { (n << shift as u64) / d } else { n / (d << (-shift) as u64) };
    let v = q.to_f64().unwrap() * 2f64.powi(-shift.clamp(-2000, 2000) as i32);
    if r.numer().is_negative() {
        -v
    } else {
        v
    }
}

/// Largest `2^num` materialized directly when deciding `2^(num/den)` questions.
const DIRECT_EXPONENT_BITS: u64 = 1 << 18;

/// Compares `x` with the real number `2^(num/den)` without rounding error.
///
/// Small exponents are decided by exact powering. Otherwise `den * ln x` is
/// compared with `num * ln 2` in 256-bit fixed point; equality is only
/// possible for powers of two, which are decided exactly. Returns a
/// capability error if the logarithms agree to within their error bound.
pub fn cmp_pow2_rational(x: &BigUint, num: &BigUint, den: &BigUint) -> Result<Ordering> {
    assert!(!den.is_zero(), "zero denominator");
    if x.is_zero() {
        return Ok(Ordering::Less);
    }
    let g = num.gcd(den);
    let (num, den) = (num / &g, den / &g);
    let s = x.bits() - 1;
    if x.trailing_zeros() == Some(s) {
        return Ok((BigUint::from(s) * &den).cmp(&num));
    }
    if let (Some(n), Some(d)) = (num.to_u64(), den.to_u32()) {
        if n <= DIRECT_EXPONENT_BITS && s.saturating_mul(d as u64) <= DIRECT_EXPONENT_BITS {
            return Ok(x.pow(d).cmp(&(BigUint::one() << n)));
        }
    }
    const PREC: u32 = 256;
    let lhs = ln_fixed(x, PREC) * BigInt::from(den.clone());
    let rhs = ln2_fixed(PREC) * BigInt::from(num.clone());
    // each fixed-point log is off by a few units; scale that by the multiplier
    let slack = BigInt::from(den.clone().max(num.clone())) << 4u32;
    let diff = &lhs - &rhs;
    if diff.magnitude() <= slack.magnitude() {
        return Err(Error::Capability("2^(num/den) comparison needs more precision".into()));
    }
    Ok(if diff.is_negative() { Ordering::Less } else { Ordering::Greater })
}

/// `floor(2^(num/den))` for a positive rational exponent.
pub fn floor_pow2_rational(num: &BigUint, den: &BigUint) -> Result<BigUint> {
    let g = num.gcd(den);
    let (num, den) = (num / &g, den / &g);
    if let (Some(n), Some(d)) = (num.to_u64(), den.to_u32()) {
        if n <= DIRECT_EXPONENT_BITS {
            let x = BigUint::one() << n;
            return Ok(if d == 1 { x } else { iroot_unchecked(&x, d) });
        }
    }
    let e = num.to_f64().unwrap_or(f64::INFINITY) / den.to_f64().unwrap_or(f64::INFINITY);
    if e.is_nan() || e >= 48.0 {
        return Err(Error::Capability(format!("2^({num}/{den}) is too large to materialize")));
    }
    // f64 puts the floor within a unit or two; settle it exactly
    let mut r = BigUint::from(e.exp2().floor() as u64);
    while !r.is_zero() && cmp_pow2_rational(&r, &num, &den)? == Ordering::Greater {
        r -= 1u32;
    }
    while cmp_pow2_rational(&(&r + 1u32), &num, &den)? != Ordering::Greater {
        r += 1u32;
    }
    Ok(r)
}

/// Fixed-point natural logarithm: returns `round(ln(x) * 2^prec)` up to a
/// few units in the last place. `x` must be positive.
pub fn ln_fixed(x: &BigUint, prec: u32) -> BigInt {
    assert!(!x.is_zero(), "ln of zero");
    let guard = prec + 32;
    // x = m * 2^e with m in [1, 2)
    let e = x.bits() as i64 - 1;
    let m: BigInt = if e as u64 <= guard as u64 {
        BigInt::from(x.clone()) << (guard as i64 - e) as usize
    } else {
        BigInt::from(x >> (e as u64 - guard as u64))
    };
    let one = BigInt::one() << guard as usize;
    let ln_m = atanh_series(&(&m - &one), &(&m + &one), guard) * 2;
    let ln2 = ln2_fixed(guard);
    let total = ln_m + ln2 * e;
    total >> (guard - prec) as usize
}

fn ln2_fixed(prec: u32) -> BigInt {
    // ln 2 = 2 atanh(1/3)
    atanh_series(&BigInt::one(), &BigInt::from(3), prec) * 2
}

/// `atanh(num/den) * 2^prec` for `0 <= num/den <= 1/3`.
fn atanh_series(num: &BigInt, den: &BigInt, prec: u32) -> BigInt {
    let z = (num << prec as usize) / den;
    let z2 = (&z * &z) >> prec as usize;
    let mut term = z.clone();
    let mut sum = BigInt::zero();
    let mut k = 1u64;
    while !term.is_zero() {
        sum += &term / BigInt::from(k);
        term = (&term * &z2) >> prec as usize;
        k += 2;
    }
    debug_assert!(!sum.is_negative());
    sum
}
