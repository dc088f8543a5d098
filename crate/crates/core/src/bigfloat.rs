//! Fixed-point arbitrary-precision real arithmetic over [`num_bigint::BigInt`].
//!
//! A [`Fixed`] holds `mant / 2^bits`. All operands of a binary operation must
//! carry the same `bits`; results keep it. Rounding is round-half-away at each
//! multiplication, so with 192+ bits the accumulated error of the character-sum
//! pipelines stays far below the 1e-20 residual checks.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::HashMap;
use std::sync::Mutex;
use std::sync::OnceLock;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixed {
    pub(crate) mant: BigInt,
    pub(crate) bits: u32,
}

fn shr_round(x: BigInt, k: u32) -> BigInt {
    if k == 0 {
        return x;
    }
    let half = BigInt::from(1) << (k - 1);
    if x.is_negative() {
        -((-x + half) >> k)
    } else {
        (x + half) >> k
    }
}

impl Fixed {
    pub fn zero(bits: u32) -> Self {
        Fixed {
            mant: BigInt::zero(),
            bits,
        }
    }

    pub fn from_i64(v: i64, bits: u32) -> Self {
        Fixed {
            mant: BigInt::from(v) << bits,
            bits,
        }
    }

    pub fn from_ratio(num: i64, den: i64, bits: u32) -> Self {
        assert!(den != 0);
        let scaled = BigInt::from(num) << (bits + 1);
        let q = scaled / BigInt::from(den);
        Fixed {
            mant: shr_round(q, 1),
            bits,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn neg(&self) -> Self {
        Fixed {
            mant: -&self.mant,
            bits: self.bits,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.bits, other.bits);
        Fixed {
            mant: &self.mant + &other.mant,
            bits: self.bits,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.bits, other.bits);
        Fixed {
            mant: &self.mant - &other.mant,
            bits: self.bits,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.bits, other.bits);
        Fixed {
            mant: shr_round(&self.mant * &other.mant, self.bits),
            bits: self.bits,
        }
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        Fixed {
            mant: &self.mant * BigInt::from(k),
            bits: self.bits,
        }
    }

    /// Division, rounded to nearest at working precision.
    pub fn div(&self, other: &Self) -> Self {
        debug_assert_eq!(self.bits, other.bits);
        assert!(!other.mant.is_zero(), "division by zero");
        let num = &self.mant << (self.bits + 1);
        let q = num / &other.mant;
        Fixed {
            mant: shr_round(q, 1),
            bits: self.bits,
        }
    }

    /// Nearest integer together with the distance to it as an `f64`.
    pub fn round_nearest(&self) -> (BigInt, f64) {
        let n = shr_round(self.mant.clone(), self.bits);
        let diff = &self.mant - (&n << self.bits);
        (n, big_to_f64_scaled(&diff, self.bits).abs())
    }

    /// Absolute value as a (possibly underflowing) `f64`.
    pub fn abs_f64(&self) -> f64 {
        big_to_f64_scaled(&self.mant, self.bits).abs()
    }

    pub fn to_f64(&self) -> f64 {
        big_to_f64_scaled(&self.mant, self.bits)
    }

    /// Decimal rendering with `digits` fractional digits, for table dumps.
    pub fn to_decimal_string(&self, digits: u32) -> String {
        let pow10 = BigInt::from(10u32).pow(digits);
        let scaled = shr_round(&self.mant * &pow10, self.bits);
        let neg = scaled.is_negative();
        let abs = scaled.abs();
        let (int, frac) = (abs.clone() / &pow10, abs % &pow10);
        let frac_str = format!("{:0>width$}", frac.to_string(), width = digits as usize);
        format!("{}{}.{}", if neg { "-" } else { "" }, int, frac_str)
    }
}

/// `x / 2^bits` as an `f64`; huge exponents saturate/underflow gracefully.
fn big_to_f64_scaled(x: &BigInt, bits: u32) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let nbits = x.bits() as i64;
    // Keep a 64-bit window so the conversion never overflows f64.
    let drop = (nbits - 64).max(0) as u32;
    let top = (x >> drop).to_f64().unwrap_or(0.0);
    let exp = drop as i32 - bits as i32;
    top * 2f64.powi(exp)
}

const GUARD_BITS: u32 = 32;

static PI_CACHE: OnceLock<Mutex<HashMap<u32, BigInt>>> = OnceLock::new();

/// pi at the given scale, via Machin's formula (cached per precision).
pub fn pi(bits: u32) -> Fixed {
    let cache = PI_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    let mant = guard
        .entry(bits)
        .or_insert_with(|| {
            let work = bits + GUARD_BITS;
            let a = atan_inv(5, work);
            let b = atan_inv(239, work);
            shr_round(a * 16 - b * 4, GUARD_BITS)
        })
        .clone();
    Fixed { mant, bits }
}

/// arctan(1/x) * 2^bits for integer x >= 2.
fn atan_inv(x: i64, bits: u32) -> BigInt {
    let x2 = BigInt::from(x) * BigInt::from(x);
    let mut term = (BigInt::from(1) << bits) / BigInt::from(x);
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !term.is_zero() {
        let contrib = &term / BigInt::from(2 * k + 1);
        if k % 2 == 0 {
            sum += &contrib;
        } else {
            sum -= &contrib;
        }
        term /= &x2;
        k += 1;
    }
    sum
}

/// (cos(2*pi*num/den), sin(2*pi*num/den)) at the given precision.
///
/// The angle is shifted to [-pi, pi) before the Taylor sums so the series
/// converge in ~80 terms at 256 bits.
pub fn cos_sin_2pi(num: i64, den: i64, bits: u32) -> (Fixed, Fixed) {
    assert!(den > 0);
    let f = num.rem_euclid(den);
    let work = bits + GUARD_BITS;
    // theta = 2*pi*f/den - pi = pi*(2f - den)/den, in [-pi, pi)
    let pi_w = pi(work);
    let theta = Fixed {
        mant: (&pi_w.mant * BigInt::from(2 * f - den)) / BigInt::from(den),
        bits: work,
    };
    let (c, s) = cos_sin_taylor(&theta);
    // cos(x + pi) = -cos(x), sin(x + pi) = -sin(x)
    (
        Fixed {
            mant: shr_round(-c.mant, GUARD_BITS),
            bits,
        },
        Fixed {
            mant: shr_round(-s.mant, GUARD_BITS),
            bits,
        },
    )
}

fn cos_sin_taylor(theta: &Fixed) -> (Fixed, Fixed) {
    let bits = theta.bits;
    let t2 = theta.mul(theta);
    let one = Fixed::from_i64(1, bits);
    // cos: sum (-1)^k theta^(2k) / (2k)!
    let mut cos = one.clone();
    let mut term = one;
    let mut k: u64 = 1;
    loop {
        term = term.mul(&t2);
        term = Fixed {
            mant: term.mant / BigInt::from((2 * k - 1) * (2 * k)),
            bits,
        };
        if term.mant.is_zero() {
            break;
        }
        if k % 2 == 1 {
            cos = cos.sub(&term);
        } else {
            cos = cos.add(&term);
        }
        k += 1;
    }
    // sin: theta * sum (-1)^k theta^(2k) / (2k+1)!
    let mut sin = theta.clone();
    let mut term = theta.clone();
    let mut k: u64 = 1;
    loop {
        term = term.mul(&t2);
        term = Fixed {
            mant: term.mant / BigInt::from((2 * k) * (2 * k + 1)),
            bits,
        };
        if term.mant.is_zero() {
            break;
        }
        if k % 2 == 1 {
            sin = sin.sub(&term);
        } else {
            sin = sin.add(&term);
        }
        k += 1;
    }
    (cos, sin)
}
