//! Parameter-string parsing: lambda specifications, prime powers, rational
//! lists.

use diagdeform::ffield::{FieldCtx, FieldElement};
use diagdeform::wlattice::Ratio64;
use std::str::FromStr;

/// What the user wrote for lambda.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LambdaSpec {
    All,
    GenPow(i64),
    Coeffs(Vec<u64>),
}

impl FromStr for LambdaSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(LambdaSpec::All);
        }
        if let Some(rest) = s.strip_prefix("g^") {
            let k: i64 = rest
                .parse()
                .map_err(|_| format!("bad generator power {rest:?}"))?;
            return Ok(LambdaSpec::GenPow(k));
        }
        let coeffs: Result<Vec<u64>, _> = s.split(',').map(|c| c.trim().parse::<u64>()).collect();
        match coeffs {
            Ok(v) if !v.is_empty() => Ok(LambdaSpec::Coeffs(v)),
            _ => Err(format!(
                "cannot parse lambda {s:?}; use \"g^K\", \"c0,c1,..\" or \"all\""
            )),
        }
    }
}

impl LambdaSpec {
    /// Resolve to one element; `All` is rejected.
    pub fn resolve(&self, field: &FieldCtx) -> Result<FieldElement, String> {
        match self {
            LambdaSpec::All => Err("expected a single lambda, got \"all\"".into()),
            LambdaSpec::GenPow(k) => Ok(field.gen_pow(*k)),
            LambdaSpec::Coeffs(v) => {
                if v.len() > field.r() as usize {
                    return Err(format!(
                        "lambda has {} coefficients but the field has degree {}",
                        v.len(),
                        field.r()
                    ));
                }
                let mut coeffs = vec![0u64; field.r() as usize];
                coeffs[..v.len()].copy_from_slice(v);
                Ok(field.from_coeffs(&coeffs))
            }
        }
    }

    /// Resolve to the list of elements to run; `All` iterates F_q
    /// (zero included; engines whose hypotheses exclude it are skipped).
    pub fn resolve_all(&self, field: &FieldCtx) -> Result<Vec<FieldElement>, String> {
        match self {
            LambdaSpec::All => Ok(field.elements().collect()),
            other => Ok(vec![other.resolve(field)?]),
        }
    }
}

/// Canonical printable form of a field element: "0" or "g^k".
pub fn lambda_label(field: &FieldCtx, x: FieldElement) -> String {
    if x.is_zero() {
        "0".into()
    } else {
        format!("g^{}", field.dlog(x).expect("nonzero"))
    }
}

/// Split q into (p, r) or explain why it is not a prime power.
pub fn factor_prime_power(q: u64) -> Result<(u64, u32), String> {
    if q < 2 {
        return Err(format!("{q} is not a prime power"));
    }
    let mut p = 2u64;
    while p * p <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        p = q; // q itself is prime
    }
    let mut m = q;
    let mut r = 0u32;
    while m > 1 {
        if m % p != 0 {
            return Err(format!("{q} is not a prime power"));
        }
        m /= p;
        r += 1;
    }
    Ok((p, r))
}

/// Parse "1/3,2/3,1" into rationals.
pub fn parse_ratio_list(s: &str) -> Result<Vec<Ratio64>, String> {
    s.split(',')
        .map(|part| {
            let part = part.trim();
            if let Some((num, den)) = part.split_once('/') {
                let n: i64 = num
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad numerator in {part:?}"))?;
                let d: i64 = den
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad denominator in {part:?}"))?;
                if d == 0 {
                    return Err(format!("zero denominator in {part:?}"));
                }
                Ok(Ratio64::new(n, d))
            } else {
                let n: i64 = part.parse().map_err(|_| format!("bad integer {part:?}"))?;
                Ok(Ratio64::new(n, 1))
            }
        })
        .collect()
}
