//! The p-adic hypergeometric function mGm and its parameter builders.
//!
//! mGm takes two lists of m rationals (p not dividing any denominator) and an
//! argument lambda in F_q:
//!
//! ```text
//! mGm[a; b | lambda]_q = -1/(q-1) * sum_{s=0}^{q-2} (-1)^{sm} omega-bar^s(lambda)
//!     * prod_{i,k} G(<(a_i - s/(q-1)) p^k>)/G(<a_i p^k>)
//!                * G(<(-b_i + s/(q-1)) p^k>)/G(<-b_i p^k>)
//!                * (-p)^(-floor(<a_i p^k> - s p^k/(q-1)) - floor(<-b_i p^k> + s p^k/(q-1)))
//! ```
//!
//! with G = Gamma_p, k running over 0..r and <.> the fractional part. The
//! value depends only on the fractional parts of the parameters and not on
//! their order. Floors and fractional parts are computed in exact rational
//! arithmetic; the (-p)-exponents land in the valuation of the result, which
//! per summand may be negative. The gamma table is sized so the returned value
//! is good to the requested absolute precision.

use crate::error::{Error, Result};
use crate::ffield::{FieldCtx, FieldElement};
use crate::padic::{PadicCtx, QqNumber};
use crate::wlattice::{DworkProfile, Ratio64, WeightVector};
use num_rational::Ratio;
use num_traits::Zero;

/// Parameters of one mGm evaluation.
#[derive(Clone, Debug)]
pub struct GParams {
    pub a: Vec<Ratio64>,
    pub b: Vec<Ratio64>,
    pub lambda: FieldElement,
}

impl GParams {
    pub fn m(&self) -> usize {
        self.a.len()
    }
}

fn frac(x: Ratio64) -> Ratio64 {
    x - x.floor()
}

fn ratio_floor_i64(x: Ratio64) -> i64 {
    x.floor().to_integer()
}

/// Precomputed evaluation plan for one mGm call: per-summand (-p)-exponents,
/// gamma arguments, and the extra digits needed to absorb negative-valuation
/// summands.
pub struct GPlan {
    base_a: Vec<Ratio64>,
    base_b: Vec<Ratio64>,
    exps: Vec<i64>,
    args: Vec<Ratio64>,
    e_min: i64,
    slack: u32,
}

impl GPlan {
    /// All gamma-table keys this evaluation reads.
    pub fn gamma_keys(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.args
            .iter()
            .chain(self.base_a.iter())
            .chain(self.base_b.iter())
            .map(|x| (*x.numer(), *x.denom()))
    }

    /// Gamma-table digits needed for the given absolute target precision.
    pub fn work_digits(&self, abs_digits: u32) -> u32 {
        abs_digits + self.slack
    }
}

/// Build the evaluation plan (exact rational pass over all summands).
pub fn plan_g(padic: &PadicCtx, params: &GParams) -> Result<GPlan> {
    if params.a.len() != params.b.len() {
        return Err(Error::ListLengthMismatch(params.a.len(), params.b.len()));
    }
    let p = padic.p() as i64;
    let r = padic.r() as usize;
    let q1 = (padic.q() - 1) as i64;
    let m = params.a.len();

    for x in params.a.iter().chain(params.b.iter()) {
        if *x.denom() % p == 0 {
            return Err(Error::GammaDenominator(*x.denom(), p as u64));
        }
    }

    // s-independent pieces: <a_i p^k> and <-b_i p^k>
    let mut base_a = vec![Ratio64::zero(); m * r];
    let mut base_b = vec![Ratio64::zero(); m * r];
    let mut pk_pow = vec![1i64; r];
    for k in 1..r {
        pk_pow[k] = pk_pow[k - 1] * p;
    }
    for i in 0..m {
        for k in 0..r {
            base_a[i * r + k] = frac(params.a[i] * Ratio::from_integer(pk_pow[k]));
            base_b[i * r + k] = frac(-params.b[i] * Ratio::from_integer(pk_pow[k]));
        }
    }

    // exponents and gamma arguments for every summand
    let mut exps = vec![0i64; q1 as usize];
    let mut args: Vec<Ratio64> = Vec::with_capacity(q1 as usize * 2 * m * r);
    for s in 0..q1 {
        let mut e = 0i64;
        for k in 0..r {
            let shift = Ratio64::new(s * pk_pow[k], q1);
            for i in 0..m {
                let ua = base_a[i * r + k] - shift;
                let ub = base_b[i * r + k] + shift;
                e -= ratio_floor_i64(ua) + ratio_floor_i64(ub);
                args.push(frac(ua));
                args.push(frac(ub));
            }
        }
        exps[s as usize] = e;
    }
    let e_min = exps.iter().copied().min().unwrap_or(0);
    let slack = (-e_min).max(0) as u32;
    Ok(GPlan {
        base_a,
        base_b,
        exps,
        args,
        e_min,
        slack,
    })
}

/// Evaluate mGm; the result is correct mod p^abs_digits (absolute precision).
pub fn evaluate_g(
    field: &FieldCtx,
    padic: &PadicCtx,
    params: &GParams,
    abs_digits: u32,
) -> Result<QqNumber> {
    let plan = plan_g(padic, params)?;
    evaluate_g_planned(field, padic, params, &plan, abs_digits)
}

/// Evaluate with a precomputed plan (gamma keys may have been prepared in a
/// larger batch).
pub fn evaluate_g_planned(
    field: &FieldCtx,
    padic: &PadicCtx,
    params: &GParams,
    plan: &GPlan,
    abs_digits: u32,
) -> Result<QqNumber> {
    if params.lambda.is_zero() {
        return Ok(QqNumber::exact_zero());
    }
    let r = padic.r() as usize;
    let q1 = (padic.q() - 1) as i64;
    let m = params.a.len();
    let GPlan {
        base_a,
        base_b,
        exps,
        args: args_num,
        ..
    } = plan;
    let work = plan.work_digits(abs_digits);
    padic.gamma_prepare(plan.gamma_keys(), work)?;

    let pk = pow_u64(padic.p(), work);
    let gamma_scalar = |x: Ratio64| -> Result<u64> {
        Ok(padic.gamma_p(*x.numer(), *x.denom(), work)?.unit_coeffs()[0])
    };

    // fixed denominator product, inverted once
    let mut den: u64 = 1;
    for x in base_a.iter().chain(base_b.iter()) {
        den = mul_mod(den, gamma_scalar(*x)?, pk);
    }
    let den_inv = inv_mod(den, pk);

    let omega_inv = padic.qq_inv(&padic.teichmuller(field, params.lambda, work)?)?;
    let mut omega_pow = padic.qq_one(work); // omega-bar^s(lambda) at s = 0

    let mut total = QqNumber::exact_zero();
    let mut arg_iter = args_num.iter();
    for s in 0..q1 {
        let mut scalar: u64 = den_inv;
        for _ in 0..(2 * m * r) {
            let x = arg_iter.next().expect("argument list length");
            scalar = mul_mod(scalar, gamma_scalar(*x)?, pk);
        }
        let e = exps[s as usize];
        // (-1)^{sm} and the sign of (-p)^e
        let negative = ((s as i128 * m as i128 + e as i128) % 2 + 2) % 2 == 1;
        if negative {
            scalar = (pk - scalar) % pk;
        }
        let summand = scale_unit(padic, &omega_pow, scalar, e, work);
        total = padic.qq_add(&total, &summand);
        omega_pow = padic.qq_mul(&omega_pow, &omega_inv);
    }

    let minus_inv_q1 = padic.qq_inv(&padic.qq_from_i128(-(q1 as i128), work))?;
    let result = padic.qq_mul(&total, &minus_inv_q1);
    // |value|_p is bounded by the explicit (-p)-exponent range
    if !result.is_exact_zero() && result.known_digits() > 0 && result.valuation() < plan.e_min {
        return Err(Error::Internal(format!(
            "mGm valuation {} below the summand floor {}",
            result.valuation(),
            plan.e_min
        )));
    }
    Ok(result)
}

fn scale_unit(padic: &PadicCtx, unit: &QqNumber, scalar: u64, val: i64, digits: u32) -> QqNumber {
    let s = QqNumber {
        exact_zero: false,
        val,
        digits,
        unit: {
            let mut v = vec![0u64; padic.r() as usize];
            v[0] = scalar;
            v
        },
    };
    padic.qq_mul(unit, &s)
}

fn pow_u64(p: u64, e: u32) -> u64 {
    (0..e).fold(1u64, |acc, _| acc.checked_mul(p).expect("modulus fits u64"))
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn inv_mod(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    old_s.rem_euclid(m as i128) as u64
}

/// Deformation data needed to build mGm parameters for the general family.
pub struct MainParamsInput<'a> {
    pub h: &'a [u32],
    pub d: u32,
    pub t: u32,
}

/// Top/bottom parameter lists of the hypergeometric count for the general family.
///
/// Top line: [w_i/(t h_i) + b/h_i | i = 1..n, b = 0..h_i-1] (d entries);
/// bottom line: [1, 1/d, ..., (d-1)/d]; argument (lambda^d h_1^{h_1} ...
/// h_n^{h_n})^{-1}. The swapped form exchanges the lists (with w replaced by
/// -w in the accompanying C factor) and drops the inversion of the argument.
pub fn build_main_params(
    field: &FieldCtx,
    input: &MainParamsInput,
    w: &WeightVector,
    lambda: FieldElement,
    swapped: bool,
) -> Result<GParams> {
    let d = input.d;
    let t = input.t as i64;
    let mut w_line = Vec::with_capacity(d as usize);
    for (i, &hi) in input.h.iter().enumerate() {
        for b in 0..hi {
            w_line.push(
                Ratio64::new(w.w[i] as i64, t * hi as i64) + Ratio64::new(b as i64, hi as i64),
            );
        }
    }
    let mut cycle = Vec::with_capacity(d as usize);
    cycle.push(Ratio64::new(1, 1));
    for j in 1..d {
        cycle.push(Ratio64::new(j as i64, d as i64));
    }
    let arg = if lambda.is_zero() {
        field.zero()
    } else {
        let mut z = field.pow(lambda, d as i64)?;
        for &hi in input.h {
            z = field.mul(z, field.pow(field.from_uint(hi as u64), hi as i64)?);
        }
        if z.is_zero() {
            return Err(Error::EnginePrecondition(
                "argument lambda^d h_1^{h_1}...h_n^{h_n} vanishes (p divides d h_1...h_n)".into(),
            ));
        }
        if swapped {
            z
        } else {
            field.inv(z)?
        }
    };
    Ok(if swapped {
        GParams {
            a: cycle,
            b: w_line,
            lambda: arg,
        }
    } else {
        GParams {
            a: w_line,
            b: cycle,
            lambda: arg,
        }
    })
}

/// Parameters for the Dwork specialization: top A_w, bottom B_w, argument
/// lambda^n.
pub fn build_dwork_params(
    field: &FieldCtx,
    profile: &DworkProfile,
    n: u32,
    lambda: FieldElement,
) -> Result<GParams> {
    if profile.a_list.len() != profile.b_list.len() {
        return Err(Error::ListLengthMismatch(
            profile.a_list.len(),
            profile.b_list.len(),
        ));
    }
    let arg = if lambda.is_zero() {
        field.zero()
    } else {
        field.pow(lambda, n as i64)?
    };
    Ok(GParams {
        a: profile.a_list.clone(),
        b: profile.b_list.clone(),
        lambda: arg,
    })
}

/// Gamma-table keys read by `c_factor` for this weight vector.
pub fn c_factor_keys(w: &WeightVector, negate: bool, p: u64, r: u32) -> Vec<(i64, i64)> {
    let t = w.t as i64;
    let mut keys = Vec::with_capacity(w.w.len() * r as usize);
    for &wi in &w.w {
        let wi = if negate {
            ((w.t - wi) % w.t) as i64
        } else {
            wi as i64
        };
        let mut pa = 1i64;
        for _ in 0..r {
            let f = frac(Ratio64::new(wi * pa, t));
            keys.push((*f.numer(), *f.denom()));
            pa *= p as i64;
        }
    }
    keys
}

/// C(w) = prod_{i,a} Gamma_p(<(w_i/t) p^a>) (-p)^{<(w_i/t) p^a>}; the total
/// (-p)-exponent is an integer because sum w_i = 0 mod t. With `negate` the
/// factor is computed at -w mod t.
pub fn c_factor(padic: &PadicCtx, w: &WeightVector, negate: bool, digits: u32) -> Result<QqNumber> {
    let keys = c_factor_keys(w, negate, padic.p(), padic.r());
    let mut exponent = Ratio64::zero();
    for &(num, den) in &keys {
        exponent += Ratio64::new(num, den);
    }
    if !exponent.is_integer() {
        return Err(Error::Internal(format!(
            "C(w) exponent {exponent} not an integer; sum w_i = 0 mod t violated"
        )));
    }
    padic.gamma_prepare(keys.iter().copied(), digits)?;
    let mut out = padic.qq_neg_p_pow(exponent.to_integer(), digits);
    for key in keys {
        out = padic.qq_mul(&out, &padic.gamma_p(key.0, key.1, digits)?);
    }
    Ok(out)
}
