//! The finite field F_q for a prime power q = p^r, with a fixed multiplicative
//! generator, a full discrete-log table, and the absolute trace.
//!
//! Elements are indexed 0..q by their coefficient vector in the power basis of
//! the canonical modulus: index `e` has coefficients `c_i = digit i of e in
//! base p`, representing `c_0 + c_1 x + ... + c_{r-1} x^{r-1}`. The canonical
//! modulus is the first monic irreducible of degree r in lexicographic order
//! of (c_0, ..., c_{r-1}); the canonical generator is the element of smallest
//! index with multiplicative order q - 1. Both choices are arbitrary but fixed,
//! and all point counts downstream are independent of them (tested).

use crate::error::{Error, Result};

/// Default cap on q; a full dlog table is built at construction.
pub const DEFAULT_Q_CAP: u64 = 1 << 20;

/// An element of F_q, stored as its coefficient-vector index.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct FieldElement(pub u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
    pub fn index(self) -> u32 {
        self.0
    }
}

const NO_DLOG: u32 = u32::MAX;

/// A concrete model of F_q with precomputed power, dlog and trace tables.
#[derive(Clone, Debug)]
pub struct FieldCtx {
    p: u64,
    r: u32,
    q: u64,
    modulus: Vec<u64>,
    generator: FieldElement,
    pow_table: Vec<u32>,
    dlog_table: Vec<u32>,
    trace_table: Vec<u64>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// ---- dense polynomial arithmetic over F_p (construction-time only) ----

fn poly_trim(a: &mut Vec<u64>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
}

fn poly_mul_mod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    poly_rem(&mut prod, modulus, p);
    prod
}

/// In-place remainder by a monic modulus.
fn poly_rem(a: &mut Vec<u64>, modulus: &[u64], p: u64) {
    let deg_m = modulus.len() - 1;
    while a.len() > deg_m {
        let lead = *a.last().unwrap();
        let k = a.len() - 1 - deg_m;
        if lead != 0 {
            for i in 0..deg_m {
                let sub = (lead * modulus[i]) % p;
                a[k + i] = (a[k + i] + p - sub) % p;
            }
        }
        a.pop();
    }
    poly_trim(a);
}

fn poly_pow_mod(base: &[u64], mut e: u64, modulus: &[u64], p: u64) -> Vec<u64> {
    let mut result = vec![1u64];
    let mut acc = base.to_vec();
    poly_rem(&mut acc, modulus, p);
    while e > 0 {
        if e & 1 == 1 {
            result = poly_mul_mod(&result, &acc, modulus, p);
        }
        acc = poly_mul_mod(&acc, &acc, modulus, p);
        e >>= 1;
    }
    result
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !(b.len() == 1 && b[0] == 0) {
        let r = poly_mod_general(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn poly_mod_general(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    poly_trim(&mut a);
    let mut b = b.to_vec();
    poly_trim(&mut b);
    let lead_inv = mod_inv(*b.last().unwrap(), p);
    while a.len() >= b.len() && !(a.len() == 1 && a[0] == 0) {
        let shift = a.len() - b.len();
        let coef = (*a.last().unwrap() * lead_inv) % p;
        if coef != 0 {
            for i in 0..b.len() {
                let sub = (coef * b[i]) % p;
                a[shift + i] = (a[shift + i] + p - sub) % p;
            }
        }
        a.pop();
        if a.is_empty() {
            a.push(0);
            break;
        }
        poly_trim(&mut a);
        if a.len() == 1 && a[0] == 0 {
            break;
        }
    }
    a
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // p prime, a != 0
    mod_pow(a, p - 2, p)
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Irreducibility over F_p via x^(p^r) = x and gcd tests at proper divisors.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let r = (f.len() - 1) as u32;
    if r == 1 {
        return true;
    }
    // x^(p^s) mod f, computed by s successive p-th powers
    let frob = |s: u32| -> Vec<u64> {
        let mut t = vec![0u64, 1];
        for _ in 0..s {
            t = poly_pow_mod(&t, p, f, p);
        }
        t
    };
    let xqr = frob(r);
    // x^(p^r) - x must be 0 mod f
    let mut diff = xqr;
    if diff.len() < 2 {
        diff.resize(2, 0);
    }
    diff[1] = (diff[1] + p - 1) % p;
    poly_trim(&mut diff);
    if !(diff.len() == 1 && diff[0] == 0) {
        return false;
    }
    for ell in prime_factors(r as u64) {
        let s = r / ell as u32;
        let mut d = frob(s);
        if d.len() < 2 {
            d.resize(2, 0);
        }
        d[1] = (d[1] + p - 1) % p;
        poly_trim(&mut d);
        let g = poly_gcd(f, &d, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

impl FieldCtx {
    /// Construct F_(p^r) with the canonical modulus and generator.
    pub fn new(p: u64, r: u32) -> Result<FieldCtx> {
        FieldCtx::with_cap(p, r, DEFAULT_Q_CAP)
    }

    pub fn with_cap(p: u64, r: u32, cap: u64) -> Result<FieldCtx> {
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if r < 1 {
            return Err(Error::BadDegree(r));
        }
        let q128 = (p as u128).pow(r);
        if q128 > cap as u128 {
            return Err(Error::FieldTooLarge { q: q128, cap });
        }
        let q = q128 as u64;
        let modulus = canonical_modulus(p, r)?;
        let mut ctx = FieldCtx {
            p,
            r,
            q,
            modulus,
            generator: FieldElement(0),
            pow_table: Vec::new(),
            dlog_table: Vec::new(),
            trace_table: Vec::new(),
        };
        let gen = ctx.nth_generator(0)?;
        ctx.install_generator(gen)?;
        ctx.build_trace_table();
        Ok(ctx)
    }

    /// Rebuild with the k-th element of order q-1 (k = 0 is canonical).
    /// Used to check that final counts do not depend on the generator choice.
    pub fn with_alternative_generator(&self, k: usize) -> Result<FieldCtx> {
        let mut ctx = self.clone();
        let gen = ctx.nth_generator(k)?;
        ctx.install_generator(gen)?;
        ctx.build_trace_table();
        Ok(ctx)
    }

    fn nth_generator(&self, k: usize) -> Result<FieldElement> {
        let factors = prime_factors(self.q - 1);
        let mut seen = 0usize;
        for idx in 1..self.q {
            let cand = FieldElement(idx as u32);
            if self.order_is_full(cand, &factors) {
                if seen == k {
                    return Ok(cand);
                }
                seen += 1;
            }
        }
        Err(Error::Internal(format!(
            "no generator #{k} found in F_{}",
            self.q
        )))
    }

    fn order_is_full(&self, x: FieldElement, factors: &[u64]) -> bool {
        if x.is_zero() {
            return false;
        }
        if self.q == 2 {
            return x.0 == 1;
        }
        let coeffs = self.coeffs(x);
        if poly_pow_is_one(&coeffs, self.q - 1, &self.modulus, self.p) {
            factors
                .iter()
                .all(|&ell| !poly_pow_is_one(&coeffs, (self.q - 1) / ell, &self.modulus, self.p))
        } else {
            false
        }
    }

    fn install_generator(&mut self, gen: FieldElement) -> Result<()> {
        let q = self.q as usize;
        let mut pow_table = vec![0u32; q - 1];
        let mut dlog_table = vec![NO_DLOG; q];
        let gen_coeffs = self.coeffs(gen);
        let mut acc = vec![1u64];
        for (k, slot) in pow_table.iter_mut().enumerate() {
            let idx = self.coeffs_to_index(&acc);
            *slot = idx;
            if dlog_table[idx as usize] != NO_DLOG {
                return Err(Error::Internal("generator order below q-1".into()));
            }
            dlog_table[idx as usize] = k as u32;
            acc = poly_mul_mod(&acc, &gen_coeffs, &self.modulus, self.p);
        }
        if self.coeffs_to_index(&acc) != 1 {
            return Err(Error::Internal("generator^(q-1) != 1".into()));
        }
        self.generator = gen;
        self.pow_table = pow_table;
        self.dlog_table = dlog_table;
        Ok(())
    }

    fn build_trace_table(&mut self) {
        let q = self.q as usize;
        let mut table = vec![0u64; q];
        for (e, slot) in table.iter_mut().enumerate().skip(1) {
            let x = FieldElement(e as u32);
            // sum of Frobenius conjugates x^(p^a)
            let k = self.dlog_table[e] as u128;
            let mut sum = FieldElement::ZERO;
            let mut pa: u128 = 1;
            for _ in 0..self.r {
                let exp = (k * pa % (self.q - 1) as u128) as u64;
                sum = self.add(sum, FieldElement(self.pow_table[exp as usize]));
                pa = pa * self.p as u128 % (self.q - 1) as u128;
            }
            let coeffs = self.coeffs(sum);
            debug_assert!(
                coeffs.iter().skip(1).all(|&c| c == 0),
                "trace of {x:?} not in F_p"
            );
            *slot = coeffs[0];
        }
        self.trace_table = table;
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
    pub fn generator(&self) -> FieldElement {
        self.generator
    }
    /// Monic modulus coefficients, constant term first (length r+1).
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }
    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q as u32).map(FieldElement)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> {
        (1..self.q as u32).map(FieldElement)
    }

    /// Coefficients of x in the power basis, constant first, length r.
    pub fn coeffs(&self, x: FieldElement) -> Vec<u64> {
        let mut e = x.0 as u64;
        let mut out = vec![0u64; self.r as usize];
        for c in out.iter_mut() {
            *c = e % self.p;
            e /= self.p;
        }
        out
    }

    pub fn coeffs_to_index(&self, coeffs: &[u64]) -> u32 {
        let mut idx = 0u64;
        for &c in coeffs.iter().rev() {
            idx = idx * self.p + c % self.p;
        }
        idx as u32
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> FieldElement {
        FieldElement(self.coeffs_to_index(coeffs))
    }

    /// Embed an integer via reduction mod p (the prime subfield).
    pub fn from_uint(&self, v: u64) -> FieldElement {
        FieldElement((v % self.p) as u32)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let mut ea = a.0 as u64;
        let mut eb = b.0 as u64;
        let mut idx = 0u64;
        let mut mult = 1u64;
        for _ in 0..self.r {
            let s = (ea % self.p + eb % self.p) % self.p;
            idx += s * mult;
            mult *= self.p;
            ea /= self.p;
            eb /= self.p;
        }
        FieldElement(idx as u32)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let mut ea = a.0 as u64;
        let mut idx = 0u64;
        let mut mult = 1u64;
        for _ in 0..self.r {
            let c = ea % self.p;
            idx += ((self.p - c) % self.p) * mult;
            mult *= self.p;
            ea /= self.p;
        }
        FieldElement(idx as u32)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.is_zero() || b.is_zero() {
            return FieldElement(0);
        }
        let k = self.dlog_table[a.0 as usize] as u64 + self.dlog_table[b.0 as usize] as u64;
        FieldElement(self.pow_table[(k % (self.q - 1)) as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        let k = self.dlog_table[a.0 as usize] as u64;
        Ok(FieldElement(
            self.pow_table[((self.q - 1 - k) % (self.q - 1)) as usize],
        ))
    }

    /// a^e with e any integer; 0^0 = 1, 0^e = 0 for e > 0, error for e < 0.
    pub fn pow(&self, a: FieldElement, e: i64) -> Result<FieldElement> {
        if a.is_zero() {
            return match e.cmp(&0) {
                std::cmp::Ordering::Greater => Ok(FieldElement(0)),
                std::cmp::Ordering::Equal => Ok(self.one()),
                std::cmp::Ordering::Less => Err(Error::ZeroInverse),
            };
        }
        let m = (self.q - 1) as i128;
        let k = self.dlog_table[a.0 as usize] as i128;
        let exp = (k * e as i128).rem_euclid(m) as usize;
        Ok(FieldElement(self.pow_table[exp]))
    }

    /// Discrete log with respect to the fixed generator.
    pub fn dlog(&self, x: FieldElement) -> Result<u64> {
        if x.is_zero() {
            return Err(Error::DlogOfZero);
        }
        Ok(self.dlog_table[x.0 as usize] as u64)
    }

    /// g^k for any integer k (reduced mod q-1).
    pub fn gen_pow(&self, k: i64) -> FieldElement {
        let m = (self.q - 1) as i64;
        FieldElement(self.pow_table[k.rem_euclid(m) as usize])
    }

    /// Absolute trace down to F_p, as an integer in [0, p).
    pub fn trace(&self, x: FieldElement) -> u64 {
        self.trace_table[x.0 as usize]
    }

    /// -1 as a field element.
    pub fn minus_one(&self) -> FieldElement {
        self.neg(self.one())
    }
}

fn poly_pow_is_one(coeffs: &[u64], e: u64, modulus: &[u64], p: u64) -> bool {
    let r = poly_pow_mod(coeffs, e, modulus, p);
    r.len() == 1 && r[0] == 1
}

fn canonical_modulus(p: u64, r: u32) -> Result<Vec<u64>> {
    if r == 1 {
        // x itself: arithmetic mod x just reduces to constants
        return Ok(vec![0, 1]);
    }
    // lexicographic order on (c_0, ..., c_{r-1}): c_0 most significant
    let total = (p as u128).pow(r) as u64;
    for code in 0..total {
        let mut f = vec![0u64; r as usize + 1];
        f[r as usize] = 1;
        let mut c = code;
        for i in (0..r as usize).rev() {
            f[i] = c % p;
            c /= p;
        }
        if is_irreducible(&f, p) {
            return Ok(f);
        }
    }
    Err(Error::Internal(format!(
        "no irreducible of degree {r} over F_{p}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f7_generator_is_three() {
        let f = FieldCtx::new(7, 1).unwrap();
        assert_eq!(f.generator(), FieldElement(3));
        assert_eq!(f.q(), 7);
    }

    #[test]
    fn f9_modulus_is_x2_plus_1() {
        let f = FieldCtx::new(3, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 0, 1]);
    }

    #[test]
    fn non_prime_p_rejected() {
        assert!(matches!(FieldCtx::new(4, 1), Err(Error::NonPrime(4))));
        assert!(matches!(FieldCtx::new(7, 0), Err(Error::BadDegree(0))));
        assert!(matches!(
            FieldCtx::with_cap(2, 30, DEFAULT_Q_CAP),
            Err(Error::FieldTooLarge { .. })
        ));
    }

    #[test]
    fn f7_dlog_examples() {
        let f = FieldCtx::new(7, 1).unwrap();
        assert_eq!(f.dlog(FieldElement(1)).unwrap(), 0);
        assert_eq!(f.dlog(FieldElement(3)).unwrap(), 1);
        assert_eq!(f.dlog(FieldElement(6)).unwrap(), 3); // 3^3 = 27 = 6 mod 7
        assert!(matches!(f.dlog(FieldElement(0)), Err(Error::DlogOfZero)));
    }

    #[test]
    fn dlog_is_additive() {
        for (p, r) in [(7u64, 1u32), (3, 2), (5, 2)] {
            let f = FieldCtx::new(p, r).unwrap();
            for a in f.nonzero_elements() {
                for b in f.nonzero_elements() {
                    let lhs = f.dlog(f.mul(a, b)).unwrap();
                    let rhs = (f.dlog(a).unwrap() + f.dlog(b).unwrap()) % (f.q() - 1);
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn dlog_table_is_bijective() {
        for (p, r) in [(13u64, 1u32), (3, 3), (2, 4)] {
            let f = FieldCtx::new(p, r).unwrap();
            let mut seen = vec![false; (f.q() - 1) as usize];
            for x in f.nonzero_elements() {
                let k = f.dlog(x).unwrap() as usize;
                assert!(!seen[k]);
                seen[k] = true;
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn trace_examples() {
        let f7 = FieldCtx::new(7, 1).unwrap();
        assert_eq!(f7.trace(FieldElement(5)), 5);
        let f9 = FieldCtx::new(3, 2).unwrap();
        assert_eq!(f9.trace(FieldElement(0)), 0);
        // Tr(x) = x + x^3 for every x in F_9
        for x in f9.elements() {
            let expect = f9.add(x, f9.pow(x, 3).unwrap());
            let coeffs = f9.coeffs(expect);
            assert_eq!(coeffs[1], 0);
            assert_eq!(f9.trace(x), coeffs[0]);
        }
    }

    #[test]
    fn trace_is_linear_and_surjective() {
        for (p, r) in [(3u64, 2u32), (5, 2), (2, 3)] {
            let f = FieldCtx::new(p, r).unwrap();
            let mut hit = vec![false; p as usize];
            for x in f.elements() {
                hit[f.trace(x) as usize] = true;
                for y in f.elements() {
                    let lhs = f.trace(f.add(x, y));
                    let rhs = (f.trace(x) + f.trace(y)) % p;
                    assert_eq!(lhs, rhs);
                }
            }
            assert!(
                hit.iter().all(|&h| h),
                "trace not surjective for q={}",
                f.q()
            );
        }
    }

    #[test]
    fn frobenius_permutes_and_fixes_prime_field() {
        let f = FieldCtx::new(3, 2).unwrap();
        let mut seen = std::collections::HashSet::new();
        for x in f.elements() {
            let fx = f.pow(x, 3).unwrap();
            seen.insert(fx);
            if (x.0 as u64) < f.p() {
                assert_eq!(fx, x);
            }
        }
        assert_eq!(seen.len(), f.q() as usize);
    }

    #[test]
    fn alternative_generators_have_full_order() {
        // F_7 has phi(6) = 2 primitive roots; F_13 has phi(12) = 4
        let f7 = FieldCtx::new(7, 1).unwrap();
        let f7b = f7.with_alternative_generator(1).unwrap();
        assert_ne!(f7.generator(), f7b.generator());
        let f13 = FieldCtx::new(13, 1).unwrap();
        for alt in [&f7b, &f13.with_alternative_generator(2).unwrap()] {
            let g = alt.generator();
            let mut acc = alt.one();
            for k in 1..alt.q() {
                acc = alt.mul(acc, g);
                if k < alt.q() - 1 {
                    assert_ne!(acc, alt.one());
                }
            }
            assert_eq!(acc, alt.one());
        }
        assert!(f7.with_alternative_generator(2).is_err());
    }

    #[test]
    fn deterministic_construction() {
        let a = FieldCtx::new(3, 2).unwrap();
        let b = FieldCtx::new(3, 2).unwrap();
        assert_eq!(a.generator(), b.generator());
        assert_eq!(a.modulus(), b.modulus());
        assert_eq!(a.pow_table, b.pow_table);
    }
}
