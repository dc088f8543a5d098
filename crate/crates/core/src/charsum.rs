//! Multiplicative and additive characters, Gauss sums and (generalized) Jacobi
//! sums over F_q, evaluated in arbitrary-precision complex arithmetic.
//!
//! Conventions follow the counting formulas: the character group is generated
//! by T with T(g) = zeta_{q-1} for the fixed field generator g, every character
//! is extended by chi(0) := 0 (including the trivial one), and the additive
//! character is theta(x) = zeta_p^{Tr(x)}.
//!
//! Individual Gauss and Jacobi values depend on the generator behind T; only
//! the assembled point counts are generator-independent, and that is what the
//! counting tests assert.

use crate::bigfloat::{cos_sin_2pi, Fixed};
use crate::error::{Error, Result};
use crate::ffield::{FieldCtx, FieldElement};
use num_bigint::BigInt;
use std::sync::Mutex;

/// Default working precision for character sums, in bits.
pub const DEFAULT_PREC_BITS: u32 = 192;

/// Floor below which character-sum arithmetic refuses to run.
pub const MIN_PREC_BITS: u32 = 64;

/// Arbitrary-precision complex value (fixed-point mantissas).
#[derive(Clone, Debug)]
pub struct CycValue {
    pub(crate) re: Fixed,
    pub(crate) im: Fixed,
}

impl CycValue {
    pub fn zero(bits: u32) -> Self {
        CycValue {
            re: Fixed::zero(bits),
            im: Fixed::zero(bits),
        }
    }

    pub fn from_i64(v: i64, bits: u32) -> Self {
        CycValue {
            re: Fixed::from_i64(v, bits),
            im: Fixed::zero(bits),
        }
    }

    pub fn from_ratio(num: i64, den: i64, bits: u32) -> Self {
        CycValue {
            re: Fixed::from_ratio(num, den, bits),
            im: Fixed::zero(bits),
        }
    }

    pub fn bits(&self) -> u32 {
        self.re.bits
    }

    pub fn is_exact_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        CycValue {
            re: self.re.add(&o.re),
            im: self.im.add(&o.im),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        CycValue {
            re: self.re.sub(&o.re),
            im: self.im.sub(&o.im),
        }
    }

    pub fn neg(&self) -> Self {
        CycValue {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        CycValue {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        CycValue {
            re: self.re.mul_i64(k),
            im: self.im.mul_i64(k),
        }
    }

    pub fn conj(&self) -> Self {
        CycValue {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    pub fn norm_sqr(&self) -> Fixed {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn div(&self, o: &Self) -> Self {
        let n2 = o.norm_sqr();
        let num = self.mul(&o.conj());
        CycValue {
            re: num.re.div(&n2),
            im: num.im.div(&n2),
        }
    }

    pub fn div_i64(&self, k: i64) -> Self {
        let d = Fixed::from_i64(k, self.bits());
        CycValue {
            re: self.re.div(&d),
            im: self.im.div(&d),
        }
    }

    /// Nearest integer to the real part, with the rounding residual
    /// max(|re - n|, |im|).
    pub fn round_real(&self) -> (BigInt, f64) {
        let (n, r_re) = self.re.round_nearest();
        let r_im = self.im.abs_f64();
        (n, r_re.max(r_im))
    }

    pub fn re_f64(&self) -> f64 {
        self.re.to_f64()
    }

    pub fn im_f64(&self) -> f64 {
        self.im.to_f64()
    }

    pub fn re_string(&self, digits: u32) -> String {
        self.re.to_decimal_string(digits)
    }

    pub fn im_string(&self, digits: u32) -> String {
        self.im.to_decimal_string(digits)
    }
}

/// Index j of the multiplicative character T^j, taken mod q-1; j = 0 is the
/// trivial character.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct CharIndex(pub u64);

impl CharIndex {
    pub fn new(j: i64, q: u64) -> Self {
        CharIndex(j.rem_euclid((q - 1) as i64) as u64)
    }
    pub fn is_trivial(self) -> bool {
        self.0 == 0
    }
}

/// Character-sum evaluator over a fixed field at a fixed precision.
///
/// Root-of-unity tables are built once; Gauss sums are memoized per index
/// (write-once entries behind a mutex, safe for concurrent readers).
pub struct CharTable<'f> {
    field: &'f FieldCtx,
    bits: u32,
    zeta_q1: Vec<CycValue>,
    zeta_p: Vec<CycValue>,
    gauss_memo: Mutex<Vec<Option<CycValue>>>,
}

impl<'f> CharTable<'f> {
    pub fn new(field: &'f FieldCtx, bits: u32) -> Self {
        assert!(
            bits >= MIN_PREC_BITS,
            "working precision below {MIN_PREC_BITS} bits"
        );
        let q1 = (field.q() - 1) as i64;
        let zeta_q1 = (0..q1)
            .map(|k| {
                let (c, s) = cos_sin_2pi(k, q1, bits);
                CycValue { re: c, im: s }
            })
            .collect();
        let zeta_p = (0..field.p() as i64)
            .map(|k| {
                let (c, s) = cos_sin_2pi(k, field.p() as i64, bits);
                CycValue { re: c, im: s }
            })
            .collect();
        CharTable {
            field,
            bits,
            zeta_q1,
            zeta_p,
            gauss_memo: Mutex::new(vec![None; q1 as usize]),
        }
    }

    pub fn field(&self) -> &FieldCtx {
        self.field
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// T^j(x): zeta_{q-1}^{j dlog x} for x != 0, exactly 0 at x = 0.
    pub fn mult_char(&self, j: CharIndex, x: FieldElement) -> CycValue {
        if x.is_zero() {
            return CycValue::zero(self.bits);
        }
        let k = self.field.dlog(x).expect("nonzero");
        let q1 = self.field.q() - 1;
        self.zeta_q1[((j.0 % q1) as u128 * k as u128 % q1 as u128) as usize].clone()
    }

    /// theta(x) = zeta_p^{Tr(x)}.
    pub fn additive_char(&self, x: FieldElement) -> CycValue {
        self.zeta_p[self.field.trace(x) as usize].clone()
    }

    /// Gauss sum g(T^j) = sum_x T^j(x) theta(x); memoized.
    pub fn gauss_sum(&self, j: CharIndex) -> CycValue {
        let q1 = self.field.q() - 1;
        let jj = (j.0 % q1) as usize;
        {
            let memo = self.gauss_memo.lock().unwrap();
            if let Some(v) = &memo[jj] {
                return v.clone();
            }
        }
        // bucket x = g^k by the exponent of zeta_{q-1} and the trace
        let mut counts = vec![0i64; q1 as usize * self.field.p() as usize];
        for k in 0..q1 {
            let x = self.field.gen_pow(k as i64);
            let e = (jj as u128 * k as u128 % q1 as u128) as usize;
            counts[e * self.field.p() as usize + self.field.trace(x) as usize] += 1;
        }
        let mut sum = CycValue::zero(self.bits);
        for e in 0..q1 as usize {
            for t in 0..self.field.p() as usize {
                let c = counts[e * self.field.p() as usize + t];
                if c != 0 {
                    sum = sum.add(&self.zeta_q1[e].mul(&self.zeta_p[t]).mul_i64(c));
                }
            }
        }
        let mut memo = self.gauss_memo.lock().unwrap();
        memo[jj] = Some(sum.clone());
        sum
    }

    /// Jacobi sum J(T^{j_1}, ..., T^{j_k}) over t_1 + ... + t_k = 1, by direct
    /// O((q-1)^{k-1}) summation with the chi(0) = 0 convention.
    pub fn jacobi_sum(&self, js: &[CharIndex]) -> CycValue {
        self.jacobi_general(js, self.field.one())
    }

    /// Generalized Jacobi sum over t_1 + ... + t_k = 0.
    pub fn jacobi_zero_sum(&self, js: &[CharIndex]) -> CycValue {
        self.jacobi_general(js, self.field.zero())
    }

    fn jacobi_general(&self, js: &[CharIndex], target: FieldElement) -> CycValue {
        assert!(!js.is_empty(), "jacobi sum needs at least one character");
        let f = self.field;
        let q1 = f.q() - 1;
        let k = js.len();
        if k == 1 {
            // single character: t_1 = target fixed
            if target.is_zero() {
                return CycValue::zero(self.bits);
            }
            return self.mult_char(js[0], target);
        }
        // terms with any t_i = 0 vanish, so iterate over (F_q^*)^(k-1) and
        // bucket by the zeta_{q-1} exponent
        let mut counts = vec![0i64; q1 as usize];
        // odometer over dlog exponents 0..q-1 for each of the k-1 free slots
        let mut exps = vec![0u64; k - 1];
        loop {
            // compute t_k = target - sum t_i
            let mut s = FieldElement::ZERO;
            for &e in exps.iter() {
                s = f.add(s, f.gen_pow(e as i64));
            }
            let tk = f.sub(target, s);
            if !tk.is_zero() {
                let mut zexp: u128 = 0;
                for (i, &e) in exps.iter().enumerate() {
                    zexp += js[i].0 as u128 * e as u128 % q1 as u128;
                }
                zexp += js[k - 1].0 as u128 * f.dlog(tk).unwrap() as u128 % q1 as u128;
                counts[(zexp % q1 as u128) as usize] += 1;
            }
            // advance odometer
            let mut pos = 0;
            loop {
                if pos == exps.len() {
                    // done
                    let mut sum = CycValue::zero(self.bits);
                    for (e, &c) in counts.iter().enumerate() {
                        if c != 0 {
                            sum = sum.add(&self.zeta_q1[e].mul_i64(c));
                        }
                    }
                    return sum;
                }
                exps[pos] += 1;
                if exps[pos] < q1 {
                    break;
                }
                exps[pos] = 0;
                pos += 1;
            }
        }
    }

    /// Jacobi sum via Gauss-sum ratios (the fast alternative / cross-check):
    /// J = prod g(chi_i) / g(prod chi_i) when the product is nontrivial,
    /// J = -prod g(chi_i) / q when it is trivial. Requires not all trivial.
    pub fn jacobi_sum_via_gauss(&self, js: &[CharIndex]) -> Result<CycValue> {
        if js.iter().all(|j| j.is_trivial()) {
            return Err(Error::EnginePrecondition(
                "gauss-ratio form needs at least one nontrivial character".into(),
            ));
        }
        let q1 = self.field.q() - 1;
        let mut num = CycValue::from_i64(1, self.bits);
        let mut total: u128 = 0;
        for j in js {
            num = num.mul(&self.gauss_sum(*j));
            total += j.0 as u128;
        }
        let prod = CharIndex((total % q1 as u128) as u64);
        if prod.is_trivial() {
            Ok(num.div_i64(-(self.field.q() as i64)))
        } else {
            Ok(num.div(&self.gauss_sum(prod)))
        }
    }
}
