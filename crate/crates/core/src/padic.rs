//! Bounded-precision arithmetic in Q_q (the unramified extension of Q_p with
//! residue field F_q), Teichmuller lifts, and Morita's p-adic gamma function.
//!
//! A [`QqNumber`] is `p^val * unit` with the unit known modulo `p^digits`
//! (absolute precision `val + digits`). Addition aligns valuations and tracks
//! the precision lost to cancellation; reconstruction back to an integer
//! refuses when the remaining precision cannot pin the value inside its bound.
//!
//! Gamma values are produced by a single exact sweep per context. Instead of
//! multiplying all the way to p^N, the sweep runs to p^ceil(N/2) and lifts
//! across aligned blocks with the second-order expansion
//!
//! ```text
//! prod_{0<u<c, p∤u} (Ap^k + u)  =  P(c) * (1 + A p^k H(c))   (mod p^2k),
//! H(c) = sum_{0<u<c, p∤u} u^{-1},
//! ```
//!
//! which follows by expanding the product and dropping the (Ap^k)^2 terms.
//! The naive running product is kept as a test oracle.

use crate::error::{Error, Result};
use crate::ffield::{FieldCtx, FieldElement};
use num_integer::Integer;
use std::collections::HashMap;
use std::sync::Mutex;

/// Default extra digits on top of the minimal reconstruction precision.
pub const DEFAULT_PAD_DIGITS: u32 = 4;

/// Cap on the gamma sweep length p^ceil(digits/2).
const SWEEP_CAP: u64 = 1 << 33;

/// An element of Q_q at bounded precision: `p^val * unit`, with `unit` a unit
/// polynomial (degree < r) known mod `p^digits`. `digits = 0` encodes a value
/// known only to be O(p^val). Exact zeros carry the `exact_zero` flag.
#[derive(Clone, Debug)]
pub struct QqNumber {
    pub(crate) exact_zero: bool,
    pub(crate) val: i64,
    pub(crate) digits: u32,
    pub(crate) unit: Vec<u64>,
}

impl QqNumber {
    pub fn exact_zero() -> Self {
        QqNumber {
            exact_zero: true,
            val: 0,
            digits: 0,
            unit: Vec::new(),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.exact_zero
    }

    pub fn valuation(&self) -> i64 {
        self.val
    }

    pub fn known_digits(&self) -> u32 {
        self.digits
    }

    /// Absolute precision: the value is known mod p^(this).
    pub fn abs_precision(&self) -> i64 {
        self.val + self.digits as i64
    }

    pub fn unit_coeffs(&self) -> &[u64] {
        &self.unit
    }
}

struct GammaStore {
    digits: u32,
    values: HashMap<(i64, i64), u64>,
}

struct TeichStore {
    digits: u32,
    values: HashMap<u32, Vec<u64>>,
}

/// Arithmetic context for Z_q / p^N with gamma and Teichmuller caches.
pub struct PadicCtx {
    p: u64,
    r: u32,
    q: u64,
    n_base: u32,
    bound: u64,
    modulus: Vec<u64>,
    gamma: Mutex<GammaStore>,
    teich: Mutex<TeichStore>,
}

fn pow_u64_checked(p: u64, e: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..e {
        acc = acc.checked_mul(p)?;
    }
    Some(acc)
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    acc
}

fn invmod(a: u64, m: u64) -> u64 {
    // extended Euclid; a must be a unit mod m
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let qt = old_r / r;
        (old_r, r) = (r, old_r - qt * r);
        (old_s, s) = (s, old_s - qt * s);
    }
    debug_assert_eq!(old_r, 1, "invmod of non-unit");
    old_s.rem_euclid(m as i128) as u64
}

impl PadicCtx {
    /// Context sized so integers up to `bound` reconstruct: minimal N with
    /// p^N > 2*bound, plus the default pad of 4 digits.
    pub fn new(field: &FieldCtx, bound: u64) -> Result<PadicCtx> {
        PadicCtx::new_with_extra(field, bound, 0)
    }

    /// Same with `extra` digits on top of the padded default, for the
    /// recompute-at-higher-precision self-checks.
    pub fn new_with_extra(field: &FieldCtx, bound: u64, extra: u32) -> Result<PadicCtx> {
        if field.p() == 2 {
            return Err(Error::EvenCharacteristic(2));
        }
        let p = field.p();
        let mut n_min = 1u32;
        while pow_u64_checked(p, n_min)
            .map(|v| v <= 2 * bound)
            .unwrap_or(false)
        {
            n_min += 1;
        }
        let n_base = n_min + DEFAULT_PAD_DIGITS + extra;
        let ctx = PadicCtx {
            p,
            r: field.r(),
            q: field.q(),
            n_base,
            bound,
            modulus: field.modulus().to_vec(),
            gamma: Mutex::new(GammaStore {
                digits: 0,
                values: HashMap::new(),
            }),
            teich: Mutex::new(TeichStore {
                digits: 0,
                values: HashMap::new(),
            }),
        };
        ctx.pk(n_base)?; // fail early if the padded modulus cannot fit u64
        Ok(ctx)
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn r(&self) -> u32 {
        self.r
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    /// Padded working digits N.
    pub fn base_digits(&self) -> u32 {
        self.n_base
    }
    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// Largest digit count whose modulus p^digits fits in u64.
    pub fn max_digits(&self) -> u32 {
        let mut d = 0u32;
        while pow_u64_checked(self.p, d + 1).is_some() {
            d += 1;
        }
        d
    }

    fn pk(&self, digits: u32) -> Result<u64> {
        pow_u64_checked(self.p, digits).ok_or(Error::PrecisionTooLarge { p: self.p, digits })
    }

    // ---- Z_q polynomial arithmetic mod (modulus, p^digits) ----

    fn zq_mul(&self, a: &[u64], b: &[u64], pk: u64) -> Vec<u64> {
        let r = self.r as usize;
        if r == 1 {
            return vec![mulmod(a[0], b[0], pk)];
        }
        let mut prod = vec![0u128; 2 * r - 1];
        for i in 0..r {
            if a[i] == 0 {
                continue;
            }
            for j in 0..r {
                prod[i + j] += mulmod(a[i], b[j], pk) as u128;
            }
        }
        // reduce by the monic modulus: x^r = -sum m_i x^i
        for k in (r..2 * r - 1).rev() {
            let lead = (prod[k] % pk as u128) as u64;
            prod[k] = 0;
            if lead != 0 {
                for i in 0..r {
                    let sub = mulmod(lead, self.modulus[i], pk);
                    prod[k - r + i] += (pk - sub) as u128;
                }
            }
        }
        prod[..r].iter().map(|&c| (c % pk as u128) as u64).collect()
    }

    fn zq_add(&self, a: &[u64], b: &[u64], pk: u64) -> Vec<u64> {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| ((x as u128 + y as u128) % pk as u128) as u64)
            .collect()
    }

    fn zq_pow(&self, a: &[u64], mut e: u64, pk: u64) -> Vec<u64> {
        let mut acc = self.zq_one();
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.zq_mul(&acc, &base, pk);
            }
            base = self.zq_mul(&base, &base, pk);
            e >>= 1;
        }
        acc
    }

    fn zq_one(&self) -> Vec<u64> {
        let mut v = vec![0u64; self.r as usize];
        v[0] = 1;
        v
    }

    /// Inverse of a unit via an F_q inverse lifted by Newton iteration.
    fn zq_inv(&self, a: &[u64], digits: u32) -> Result<Vec<u64>> {
        let pk = self.pk(digits)?;
        let abar: Vec<u64> = a.iter().map(|&c| c % self.p).collect();
        if abar.iter().all(|&c| c == 0) {
            return Err(Error::ZeroInverse);
        }
        let mut x = self.fq_inverse(&abar)?;
        // x_{k+1} = x_k (2 - a x_k), doubling correct digits each round
        let rounds = 32 - (digits.max(1) - 1).leading_zeros() + 1;
        for _ in 0..rounds {
            let ax = self.zq_mul(a, &x, pk);
            let mut two_minus = vec![0u64; self.r as usize];
            for (i, t) in two_minus.iter_mut().enumerate() {
                let want = if i == 0 { 2u64 % pk } else { 0 };
                *t = ((want as u128 + pk as u128 - ax[i] as u128) % pk as u128) as u64;
            }
            x = self.zq_mul(&x, &two_minus, pk);
        }
        debug_assert!({
            let check = self.zq_mul(a, &x, pk);
            check[0] == 1 && check.iter().skip(1).all(|&c| c == 0)
        });
        Ok(x)
    }

    /// Inverse in F_q = F_p[x]/(modulus) by extended Euclid.
    fn fq_inverse(&self, a: &[u64]) -> Result<Vec<u64>> {
        let p = self.p;
        if self.r == 1 {
            return Ok(vec![invmod(a[0] % p, p)]);
        }
        let trim = |v: &mut Vec<u64>| {
            while v.len() > 1 && *v.last().unwrap() == 0 {
                v.pop();
            }
        };
        let mut r0: Vec<u64> = self.modulus.iter().map(|&c| c % p).collect();
        let mut r1: Vec<u64> = a.iter().map(|&c| c % p).collect();
        trim(&mut r1);
        let mut s0: Vec<u64> = vec![0];
        let mut s1: Vec<u64> = vec![1];
        while !(r1.len() == 1 && r1[0] == 0) {
            // divide r0 by r1
            let mut rem = r0.clone();
            let mut quo = vec![0u64; rem.len().saturating_sub(r1.len()) + 1];
            let lead_inv = invmod(*r1.last().unwrap(), p);
            while rem.len() >= r1.len() && !(rem.len() == 1 && rem[0] == 0) {
                let shift = rem.len() - r1.len();
                let c = mulmod(*rem.last().unwrap(), lead_inv, p);
                quo[shift] = c;
                if c != 0 {
                    for i in 0..r1.len() {
                        let sub = mulmod(c, r1[i], p);
                        rem[shift + i] = (rem[shift + i] + p - sub) % p;
                    }
                }
                rem.pop();
                if rem.is_empty() {
                    rem.push(0);
                    break;
                }
                trim(&mut rem);
                if rem.len() == 1 && rem[0] == 0 {
                    break;
                }
            }
            // s2 = s0 - quo * s1
            let mut qs = vec![0u64; quo.len() + s1.len() - 1];
            for (i, &qc) in quo.iter().enumerate() {
                if qc == 0 {
                    continue;
                }
                for (j, &sc) in s1.iter().enumerate() {
                    qs[i + j] = (qs[i + j] + mulmod(qc, sc, p)) % p;
                }
            }
            let len = s0.len().max(qs.len());
            let mut s2 = vec![0u64; len];
            for i in 0..len {
                let x = if i < s0.len() { s0[i] } else { 0 };
                let y = if i < qs.len() { qs[i] } else { 0 };
                s2[i] = (x + p - y) % p;
            }
            trim(&mut s2);
            r0 = r1;
            r1 = rem;
            s0 = s1;
            s1 = s2;
        }
        if r0.len() != 1 || r0[0] == 0 {
            return Err(Error::Internal("fq_inverse: gcd not a unit".into()));
        }
        let scale = invmod(r0[0], p);
        let mut out = vec![0u64; self.r as usize];
        for (i, &c) in s0.iter().enumerate() {
            if i < out.len() {
                out[i] = mulmod(c, scale, p);
            }
        }
        Ok(out)
    }

    // ---- QqNumber construction and arithmetic ----

    pub fn qq_one(&self, digits: u32) -> QqNumber {
        QqNumber {
            exact_zero: false,
            val: 0,
            digits,
            unit: self.zq_one(),
        }
    }

    pub fn qq_from_i128(&self, v: i128, digits: u32) -> QqNumber {
        if v == 0 {
            return QqNumber::exact_zero();
        }
        let pk = self.pk(digits).expect("digits within u64 range");
        let mut val = 0i64;
        let mut abs = v.unsigned_abs();
        while abs % self.p as u128 == 0 {
            abs /= self.p as u128;
            val += 1;
        }
        let mut c = (abs % pk as u128) as u64;
        if v < 0 {
            c = (pk - c) % pk;
        }
        let mut unit = vec![0u64; self.r as usize];
        unit[0] = c;
        QqNumber {
            exact_zero: false,
            val,
            digits,
            unit,
        }
    }

    /// (-p)^e as an exact unit times p^e.
    pub fn qq_neg_p_pow(&self, e: i64, digits: u32) -> QqNumber {
        let pk = self.pk(digits).expect("digits within u64 range");
        let mut unit = self.zq_one();
        if e.rem_euclid(2) == 1 {
            unit[0] = pk - 1;
        }
        QqNumber {
            exact_zero: false,
            val: e,
            digits,
            unit,
        }
    }

    pub fn qq_neg(&self, a: &QqNumber) -> QqNumber {
        if a.exact_zero || a.digits == 0 {
            return a.clone();
        }
        let pk = self.pk(a.digits).expect("digits tracked");
        let unit = a.unit.iter().map(|&c| (pk - c) % pk).collect();
        QqNumber {
            exact_zero: false,
            val: a.val,
            digits: a.digits,
            unit,
        }
    }

    pub fn qq_mul(&self, a: &QqNumber, b: &QqNumber) -> QqNumber {
        if a.exact_zero || b.exact_zero {
            return QqNumber::exact_zero();
        }
        let digits = a.digits.min(b.digits);
        if digits == 0 {
            // |xy|_p <= p^-(val_x + val_y); nothing more is known
            return QqNumber {
                exact_zero: false,
                val: a.val + b.val,
                digits: 0,
                unit: Vec::new(),
            };
        }
        let pk = self.pk(digits).expect("digits tracked");
        let unit = self
            .zq_mul(&a.unit[..], &b.unit[..], pk)
            .iter()
            .map(|&c| c % pk)
            .collect();
        QqNumber {
            exact_zero: false,
            val: a.val + b.val,
            digits,
            unit,
        }
    }

    pub fn qq_inv(&self, a: &QqNumber) -> Result<QqNumber> {
        if a.exact_zero || a.digits == 0 {
            return Err(Error::ZeroInverse);
        }
        let unit = self.zq_inv(&a.unit, a.digits)?;
        Ok(QqNumber {
            exact_zero: false,
            val: -a.val,
            digits: a.digits,
            unit,
        })
    }

    /// Divide by q = p^r (a valuation shift).
    pub fn qq_div_q(&self, a: &QqNumber) -> QqNumber {
        if a.exact_zero {
            return a.clone();
        }
        let mut out = a.clone();
        out.val -= self.r as i64;
        out
    }

    pub fn qq_add(&self, a: &QqNumber, b: &QqNumber) -> QqNumber {
        if a.exact_zero {
            return b.clone();
        }
        if b.exact_zero {
            return a.clone();
        }
        let abs = a.abs_precision().min(b.abs_precision());
        let vmin = a.val.min(b.val);
        let avail = abs - vmin;
        if avail <= 0 {
            return QqNumber {
                exact_zero: false,
                val: abs,
                digits: 0,
                unit: Vec::new(),
            };
        }
        let digits = avail as u32;
        let pk = self.pk(digits).expect("digits tracked");
        let lift = |x: &QqNumber| -> Vec<u64> {
            let shift = (x.val - vmin) as u32;
            if x.digits == 0 || shift >= digits {
                return vec![0u64; self.r as usize];
            }
            let mult = pow_u64_checked(self.p, shift).expect("shift below digits") % pk;
            x.unit.iter().map(|&c| mulmod(c % pk, mult, pk)).collect()
        };
        let sum = self.zq_add(&lift(a), &lift(b), pk);
        self.normalize(sum, vmin, digits)
    }

    fn normalize(&self, mut coeffs: Vec<u64>, val: i64, digits: u32) -> QqNumber {
        // factor out the largest power of p dividing every coefficient
        let mut extra = 0u32;
        'outer: while extra < digits {
            for &c in &coeffs {
                if c % self.p != 0 {
                    break 'outer;
                }
            }
            for c in coeffs.iter_mut() {
                *c /= self.p;
            }
            extra += 1;
        }
        if extra >= digits {
            // all coefficients vanished at available precision
            return QqNumber {
                exact_zero: false,
                val: val + digits as i64,
                digits: 0,
                unit: Vec::new(),
            };
        }
        let rem = digits - extra;
        let pk = self.pk(rem).expect("digits tracked");
        for c in coeffs.iter_mut() {
            *c %= pk;
        }
        QqNumber {
            exact_zero: false,
            val: val + extra as i64,
            digits: rem,
            unit: coeffs,
        }
    }

    /// Truncate to at most `digits` known digits.
    pub fn qq_reduce(&self, a: &QqNumber, digits: u32) -> QqNumber {
        if a.exact_zero || a.digits <= digits {
            return a.clone();
        }
        let pk = self.pk(digits).expect("digits tracked");
        QqNumber {
            exact_zero: false,
            val: a.val,
            digits,
            unit: a.unit.iter().map(|&c| c % pk).collect(),
        }
    }

    /// a = b mod p^abs_digits?
    pub fn qq_eq_mod(&self, a: &QqNumber, b: &QqNumber, abs_digits: i64) -> bool {
        let diff = self.qq_add(a, &self.qq_neg(b));
        diff.exact_zero || diff.val >= abs_digits
    }

    // ---- Teichmuller lifts ----

    /// The Teichmuller representative of x, exact mod p^digits.
    pub fn teichmuller(&self, field: &FieldCtx, x: FieldElement, digits: u32) -> Result<QqNumber> {
        if x.is_zero() {
            return Ok(QqNumber::exact_zero());
        }
        let mut store = self.teich.lock().unwrap();
        if store.digits < digits {
            store.digits = digits;
            store.values.clear();
        }
        let stored_digits = store.digits;
        if let Some(v) = store.values.get(&x.index()) {
            let full = QqNumber {
                exact_zero: false,
                val: 0,
                digits: stored_digits,
                unit: v.clone(),
            };
            return Ok(self.qq_reduce(&full, digits));
        }
        let pk = self.pk(stored_digits)?;
        let mut y: Vec<u64> = field.coeffs(x);
        // y -> y^q gains one correct digit per step
        let mut steps = 0u32;
        loop {
            let next = self.zq_pow(&y, self.q, pk);
            if next == y {
                break;
            }
            y = next;
            steps += 1;
            if steps > stored_digits + 8 {
                return Err(Error::Internal(
                    "teichmuller iteration did not converge".into(),
                ));
            }
        }
        store.values.insert(x.index(), y.clone());
        let full = QqNumber {
            exact_zero: false,
            val: 0,
            digits: stored_digits,
            unit: y,
        };
        Ok(self.qq_reduce(&full, digits))
    }

    /// omega-bar^s(lambda) = omega(lambda)^{-s}, zero at lambda = 0.
    pub fn teich_char(
        &self,
        field: &FieldCtx,
        s: i64,
        lambda: FieldElement,
        digits: u32,
    ) -> Result<QqNumber> {
        if lambda.is_zero() {
            return Ok(QqNumber::exact_zero());
        }
        let w = self.teichmuller(field, lambda, digits)?;
        let e = (-s).rem_euclid((self.q - 1) as i64) as u64;
        let pk = self.pk(digits)?;
        Ok(QqNumber {
            exact_zero: false,
            val: 0,
            digits,
            unit: self.zq_pow(&w.unit, e, pk),
        })
    }

    // ---- gamma function ----

    /// Make gamma values for all given fractions available at `digits`.
    ///
    /// Fractions are (num, den) with p not dividing den; each is evaluated at
    /// the unique residue num * den^{-1} mod p^digits. One sweep serves the
    /// whole batch.
    pub fn gamma_prepare<I: IntoIterator<Item = (i64, i64)>>(
        &self,
        keys: I,
        digits: u32,
    ) -> Result<()> {
        let mut store = self.gamma.lock().unwrap();
        let mut wanted: Vec<(i64, i64)> = Vec::new();
        for k in keys {
            let k = reduce_key(k.0, k.1);
            if k.1 % self.p as i64 == 0 {
                return Err(Error::GammaDenominator(k.1, self.p));
            }
            wanted.push(k);
        }
        wanted.sort_unstable();
        wanted.dedup();
        if digits > store.digits {
            let mut all: Vec<(i64, i64)> = store.values.keys().copied().collect();
            all.extend(wanted.iter().copied());
            all.sort_unstable();
            all.dedup();
            store.values.clear();
            store.digits = digits;
            self.gamma_sweep(&mut store, &all)?;
        } else {
            let missing: Vec<(i64, i64)> = wanted
                .into_iter()
                .filter(|k| !store.values.contains_key(k))
                .collect();
            if !missing.is_empty() {
                self.gamma_sweep(&mut store, &missing)?;
            }
        }
        Ok(())
    }

    /// Morita's Gamma_p at the rational num/den (denominator prime to p),
    /// evaluated at its residue mod p^digits. The result is a p-adic unit.
    pub fn gamma_p(&self, num: i64, den: i64, digits: u32) -> Result<QqNumber> {
        let key = reduce_key(num, den);
        if key.1 % self.p as i64 == 0 {
            return Err(Error::GammaDenominator(key.1, self.p));
        }
        {
            let store = self.gamma.lock().unwrap();
            if store.digits >= digits {
                if let Some(&v) = store.values.get(&key) {
                    let pk = self.pk(digits)?;
                    let mut unit = vec![0u64; self.r as usize];
                    unit[0] = v % pk;
                    return Ok(QqNumber {
                        exact_zero: false,
                        val: 0,
                        digits,
                        unit,
                    });
                }
            }
        }
        self.gamma_prepare([key], digits)?;
        self.gamma_p(num, den, digits)
    }

    fn gamma_sweep(&self, store: &mut GammaStore, keys: &[(i64, i64)]) -> Result<()> {
        let digits = store.digits;
        let pk = self.pk(digits)?;
        let half = digits.div_ceil(2);
        let m_small = self.pk(half)?;
        if m_small > SWEEP_CAP {
            return Err(Error::PrecisionTooLarge { p: self.p, digits });
        }
        let m_big = self.pk(2 * half)?;

        #[derive(Clone)]
        struct Target {
            key: (i64, i64),
            n: u64,
            block: u64,
            offset: u64,
        }
        let mut targets: Vec<Target> = Vec::with_capacity(keys.len());
        for &key in keys {
            let den_inv = invmod(key.1.rem_euclid(pk as i64) as u64, pk);
            let n = mulmod(key.0.rem_euclid(pk as i64) as u64, den_inv, pk);
            targets.push(Target {
                key,
                n,
                block: n / m_small,
                offset: n % m_small,
            });
        }
        targets.sort_by_key(|t| t.offset);

        // running product of units mod p^(2*half) and harmonic sum mod p^half
        let mut prod: u64 = 1;
        let mut hsum: u64 = 0;
        let mut checkpoints: Vec<(u64, u64)> = vec![(0, 0); targets.len()]; // (P(c), H(c))
        let mut ptr = 0usize;
        while ptr < targets.len() && targets[ptr].offset == 0 {
            checkpoints[ptr] = (1, 0);
            ptr += 1;
        }
        const CHUNK: usize = 4096;
        let mut units: Vec<u64> = Vec::with_capacity(CHUNK);
        let mut invs: Vec<u64> = Vec::with_capacity(CHUNK);
        let mut u = 1u64;
        while u < m_small {
            units.clear();
            let chunk_end = (u + CHUNK as u64).min(m_small);
            for v in u..chunk_end {
                if v % self.p != 0 {
                    units.push(v);
                }
            }
            // batch inversion mod m_small
            invs.clear();
            invs.resize(units.len(), 0);
            if !units.is_empty() {
                let mut acc = 1u64;
                for (i, &v) in units.iter().enumerate() {
                    invs[i] = acc; // prefix product before v
                    acc = mulmod(acc, v % m_small, m_small);
                }
                let mut inv_acc = invmod(acc, m_small);
                for i in (0..units.len()).rev() {
                    let inv_v = mulmod(inv_acc, invs[i], m_small);
                    inv_acc = mulmod(inv_acc, units[i] % m_small, m_small);
                    invs[i] = inv_v;
                }
            }
            let mut unit_idx = 0usize;
            for v in u..chunk_end {
                while ptr < targets.len() && targets[ptr].offset == v {
                    checkpoints[ptr] = (prod, hsum);
                    ptr += 1;
                }
                if v % self.p != 0 {
                    prod = mulmod(prod, v, m_big);
                    hsum = (hsum + invs[unit_idx]) % m_small;
                    unit_idx += 1;
                }
            }
            u = chunk_end;
        }
        debug_assert_eq!(ptr, targets.len(), "all offsets below p^half");
        let pstar = prod;

        for (i, t) in targets.iter().enumerate() {
            let (p_c, h_c) = checkpoints[i];
            // P(n) = P*^A * P(c) * (1 + A p^half H(c)) mod p^(2*half)
            let mut val = mulmod(powmod(pstar, t.block, m_big), p_c, m_big);
            let corr =
                (1 + mulmod(mulmod(t.block % m_big, m_small % m_big, m_big), h_c, m_big)) % m_big;
            val = mulmod(val, corr, m_big);
            if t.n % 2 == 1 {
                val = (m_big - val) % m_big;
            }
            store.values.insert(t.key, val % pk);
        }
        Ok(())
    }

    /// Direct product definition of Gamma_p(n) mod p^digits; test oracle for
    /// the block-lifted sweep.
    pub fn gamma_naive(&self, n: u64, digits: u32) -> Result<u64> {
        let pk = self.pk(digits)?;
        let mut prod = 1u64;
        for j in 1..n {
            if j % self.p != 0 {
                prod = mulmod(prod, j, pk);
            }
        }
        if n % 2 == 1 {
            prod = (pk - prod) % pk;
        }
        Ok(prod)
    }

    // ---- integer reconstruction ----

    /// The unique integer in [0, bound] congruent to v mod p^(abs precision).
    pub fn reconstruct_integer(&self, v: &QqNumber, bound: u64) -> Result<u64> {
        if v.exact_zero {
            return Ok(0);
        }
        let needed = {
            let mut d = 1u32;
            while self.pk(d).map(|m| m <= bound).unwrap_or(false) {
                d += 1;
            }
            d as i64
        };
        if v.digits == 0 {
            // O(p^val): zero if that pins the value inside the bound
            if v.val >= needed {
                return Ok(0);
            }
            return Err(Error::InsufficientPrecision {
                have: v.val,
                need: needed,
            });
        }
        if v.val < 0 {
            return Err(Error::NegativeValuation(v.val));
        }
        if v.unit.iter().skip(1).any(|&c| c != 0) {
            return Err(Error::NonScalar);
        }
        let abs = v.abs_precision();
        if abs < needed {
            return Err(Error::InsufficientPrecision {
                have: abs,
                need: needed,
            });
        }
        let abs = (abs as u32).min(self.max_digits());
        let pk = self.pk(abs)?;
        let shift = pow_u64_checked(self.p, v.val as u32).expect("val below abs");
        let c = mulmod(v.unit[0] % pk, shift % pk, pk);
        if c <= bound {
            Ok(c)
        } else {
            Err(Error::ReconstructOutOfRange {
                residue: c,
                digits: abs,
                bound,
            })
        }
    }

    /// Digit string (base p, least significant first) of the unit part.
    pub fn digit_string(&self, v: &QqNumber) -> String {
        if v.exact_zero {
            return "0".to_string();
        }
        if v.digits == 0 {
            return format!("O(p^{})", v.val);
        }
        let mut c = v.unit.clone();
        let mut cols = Vec::new();
        for _ in 0..v.digits {
            let ds: Vec<String> = c.iter().map(|x| (x % self.p).to_string()).collect();
            cols.push(if self.r == 1 {
                ds[0].clone()
            } else {
                format!("({})", ds.join(","))
            });
            for x in c.iter_mut() {
                *x /= self.p;
            }
        }
        cols.join(":")
    }
}

fn reduce_key(num: i64, den: i64) -> (i64, i64) {
    assert!(den != 0);
    let (mut n, mut d) = (num, den);
    if d < 0 {
        n = -n;
        d = -d;
    }
    let g = n.unsigned_abs().gcd(&d.unsigned_abs()) as i64;
    if g > 1 {
        n /= g;
        d /= g;
    }
    (n, d)
}
