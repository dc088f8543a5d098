//! Point-count engines for D_{d,lambda,h}: brute-force oracles, the Gauss/
//! Jacobi-sum formulas, and the p-adic hypergeometric formulas. Every engine
//! returns an exact integer count of projective (or all-coordinates-nonzero
//! affine) points, and they all agree with exhaustive enumeration.
//!
//! Engine notes:
//! - The character-sum engines work at a configurable complex precision and
//!   accept a rounding only when the residual is below 1e-6, retrying once at
//!   doubled precision otherwise.
//! - The s-sum rearrangement behind the product-form engines divides by the
//!   trivial-character value at d*lambda, so it is valid only when
//!   d*lambda != 0 in F_q. When d*lambda = 0 (lambda = 0, or p | d, in which
//!   case the deformation term vanishes identically) those engines return the
//!   diagonal (Weil) count, which is what the hypersurface degenerates to.
//! - The p-adic engines require p odd and p not dividing d*h_1*...*h_n, and
//!   reconstruct the count from its residue; a reconstruction failure means a
//!   precision or logic bug, never a silently wrong count.

use crate::charsum::{CharIndex, CharTable, CycValue};
use crate::error::{Error, Result};
use crate::ffield::{FieldCtx, FieldElement};
use crate::hyperg::{
    build_dwork_params, build_main_params, c_factor, c_factor_keys, evaluate_g, evaluate_g_planned,
    plan_g, MainParamsInput,
};
use crate::padic::{PadicCtx, QqNumber};
use crate::wlattice::{build_w_set, dwork_profile, partition_classes, WeightVector};
use num_integer::Integer;
use num_traits::ToPrimitive;
use std::time::Instant;

/// Summation range of a product-form engine: `Short` sums s over
/// [0, (q-1)/t) and all of W; `Long` sums s over [0, q-2] and one
/// representative per equivalence class. The two are equal term groupings of
/// the same sum.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SumMode {
    Short,
    Long,
}

/// Two equivalent shapes of the hypergeometric count: `Main` pairs C(w) with
/// an inverted argument; `Swapped` pairs C(-w) with the un-inverted argument
/// and the parameter lines exchanged.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum MainVariant {
    Main,
    Swapped,
}

/// Identifies an engine in reports and on the command line.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum EngineId {
    Brute,
    BruteAffine,
    Weil,
    WeilAffine,
    JacobiTorus,
    JacobiRatio,
    GaussProductShort,
    GaussProductLong,
    PadicMain,
    PadicSwapped,
    PadicGcd1,
    DworkGaussShort,
    DworkGaussLong,
    DworkPadic,
}

impl EngineId {
    pub fn name(self) -> &'static str {
        match self {
            EngineId::Brute => "brute",
            EngineId::BruteAffine => "brute-affine",
            EngineId::Weil => "weil",
            EngineId::WeilAffine => "weil-affine",
            EngineId::JacobiTorus => "jacobi-torus",
            EngineId::JacobiRatio => "jacobi-ratio",
            EngineId::GaussProductShort => "gauss-product-short",
            EngineId::GaussProductLong => "gauss-product-long",
            EngineId::PadicMain => "padic-main",
            EngineId::PadicSwapped => "padic-swapped",
            EngineId::PadicGcd1 => "padic-gcd1",
            EngineId::DworkGaussShort => "dwork-gauss-short",
            EngineId::DworkGaussLong => "dwork-gauss-long",
            EngineId::DworkPadic => "dwork-padic",
        }
    }

    pub fn all() -> &'static [EngineId] {
        &[
            EngineId::Brute,
            EngineId::BruteAffine,
            EngineId::Weil,
            EngineId::WeilAffine,
            EngineId::JacobiTorus,
            EngineId::JacobiRatio,
            EngineId::GaussProductShort,
            EngineId::GaussProductLong,
            EngineId::PadicMain,
            EngineId::PadicSwapped,
            EngineId::PadicGcd1,
            EngineId::DworkGaussShort,
            EngineId::DworkGaussLong,
            EngineId::DworkPadic,
        ]
    }

    pub fn from_name(s: &str) -> Option<EngineId> {
        EngineId::all().iter().copied().find(|e| e.name() == s)
    }

    /// True for engines counting projective points (the rest count points of
    /// the affine torus).
    pub fn is_projective(self) -> bool {
        !matches!(
            self,
            EngineId::BruteAffine | EngineId::WeilAffine | EngineId::JacobiTorus
        )
    }
}

impl std::fmt::Display for EngineId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One engine run: count plus rounding residual (complex engines) or working
/// precision (p-adic engines) and wall time.
#[derive(Clone, Debug)]
pub struct CountReport {
    pub engine: EngineId,
    pub count: u64,
    pub residual: Option<f64>,
    pub precision: String,
    pub millis: f64,
}

/// The deformation family data: field, exponents h, lambda; d = sum h_i and
/// t = gcd(d, q-1) are derived.
#[derive(Clone, Debug)]
pub struct DeformParams<'f> {
    pub field: &'f FieldCtx,
    pub n: u32,
    pub h: Vec<u32>,
    pub d: u32,
    pub t: u32,
    pub lambda: FieldElement,
}

impl<'f> DeformParams<'f> {
    pub fn new(field: &'f FieldCtx, h: Vec<u32>, lambda: FieldElement) -> Result<Self> {
        if h.len() < 2 {
            return Err(Error::BadDeformParams("need n >= 2 exponents".into()));
        }
        if h.contains(&0) {
            return Err(Error::BadDeformParams("every h_i must be >= 1".into()));
        }
        let g = h.iter().fold(0u64, |acc, &x| acc.gcd(&(x as u64)));
        if g != 1 {
            return Err(Error::HNotCoprime(g));
        }
        let d: u32 = h.iter().sum();
        let t = (d as u64).gcd(&(field.q() - 1)) as u32;
        Ok(DeformParams {
            field,
            n: h.len() as u32,
            h,
            d,
            t,
            lambda,
        })
    }

    /// d * lambda as a field element (zero when p | d).
    pub fn d_lambda(&self) -> FieldElement {
        self.field
            .mul(self.field.from_uint(self.d as u64), self.lambda)
    }

    pub fn is_dwork(&self) -> bool {
        self.h.iter().all(|&x| x == 1)
    }
}

/// Number of points of P^{n-1}(F_q); also the reconstruction bound.
pub fn projective_bound(q: u64, n: u32) -> u64 {
    let mut total = 0u64;
    let mut pw = 1u64;
    for _ in 0..n {
        total += pw;
        pw *= q;
    }
    total
}

fn projective_base(q: u64, n: u32) -> i128 {
    // (q^{n-1} - 1)/(q - 1)
    projective_bound(q, n - 1) as i128
}

/// p-adic context sized for projective counts in P^{n-1}(F_q).
pub fn padic_ctx_for(field: &FieldCtx, n: u32) -> Result<PadicCtx> {
    PadicCtx::new(field, projective_bound(field.q(), n))
}

/// Same, with extra digits for precision self-checks.
pub fn padic_ctx_extra(field: &FieldCtx, n: u32, extra: u32) -> Result<PadicCtx> {
    PadicCtx::new_with_extra(field, projective_bound(field.q(), n), extra)
}

fn odometer(q: u64, len: usize, mut visit: impl FnMut(&[u32])) {
    let mut tuple = vec![0u32; len];
    loop {
        visit(&tuple);
        let mut pos = 0;
        loop {
            if pos == len {
                return;
            }
            tuple[pos] += 1;
            if (tuple[pos] as u64) < q {
                break;
            }
            tuple[pos] = 0;
            pos += 1;
        }
    }
}

// ---- brute-force oracles ----

/// Count projective points by enumerating normalized representatives
/// (first nonzero coordinate = 1).
pub fn brute_projective(dp: &DeformParams) -> CountReport {
    let start = Instant::now();
    let f = dp.field;
    let n = dp.n as usize;
    let powd: Vec<FieldElement> = f
        .elements()
        .map(|x| f.pow(x, dp.d as i64).expect("positive power"))
        .collect();
    let powh: Vec<Vec<FieldElement>> =
        dp.h.iter()
            .map(|&hi| {
                f.elements()
                    .map(|x| f.pow(x, hi as i64).expect("positive power"))
                    .collect()
            })
            .collect();
    let dlam = dp.d_lambda();
    let mut count = 0u64;
    let mut coords = vec![FieldElement::ZERO; n];
    for lead in 0..n {
        for c in coords.iter_mut() {
            *c = FieldElement::ZERO;
        }
        coords[lead] = f.one();
        let free = n - lead - 1;
        odometer(f.q(), free, |tuple| {
            for (i, &v) in tuple.iter().enumerate() {
                coords[lead + 1 + i] = FieldElement(v);
            }
            let mut s = FieldElement::ZERO;
            for &c in coords.iter() {
                s = f.add(s, powd[c.index() as usize]);
            }
            if !dlam.is_zero() {
                let mut mono = f.one();
                for (i, &c) in coords.iter().enumerate() {
                    mono = f.mul(mono, powh[i][c.index() as usize]);
                    if mono.is_zero() {
                        break;
                    }
                }
                s = f.sub(s, f.mul(dlam, mono));
            }
            if s.is_zero() {
                count += 1;
            }
        });
    }
    report(EngineId::Brute, count, None, "exact".into(), start)
}

/// Count points with all coordinates nonzero in affine n-space.
pub fn brute_affine_star(dp: &DeformParams) -> CountReport {
    let start = Instant::now();
    let f = dp.field;
    let n = dp.n as usize;
    let powd: Vec<FieldElement> = f
        .elements()
        .map(|x| f.pow(x, dp.d as i64).expect("positive power"))
        .collect();
    let powh: Vec<Vec<FieldElement>> =
        dp.h.iter()
            .map(|&hi| {
                f.elements()
                    .map(|x| f.pow(x, hi as i64).expect("positive power"))
                    .collect()
            })
            .collect();
    let dlam = dp.d_lambda();
    let mut count = 0u64;
    odometer(f.q() - 1, n, |tuple| {
        // tuple entries index nonzero elements 1..q
        let mut s = FieldElement::ZERO;
        let mut mono = f.one();
        for (i, &v) in tuple.iter().enumerate() {
            let x = FieldElement(v + 1);
            s = f.add(s, powd[x.index() as usize]);
            if !dlam.is_zero() {
                mono = f.mul(mono, powh[i][x.index() as usize]);
            }
        }
        if !dlam.is_zero() {
            s = f.sub(s, f.mul(dlam, mono));
        }
        if s.is_zero() {
            count += 1;
        }
    });
    report(EngineId::BruteAffine, count, None, "exact".into(), start)
}

// ---- complex rounding plumbing ----

fn report(
    engine: EngineId,
    count: u64,
    residual: Option<f64>,
    precision: String,
    start: Instant,
) -> CountReport {
    CountReport {
        engine,
        count,
        residual,
        precision,
        millis: start.elapsed().as_secs_f64() * 1e3,
    }
}

const ROUND_TOL: f64 = 1e-6;

/// base + round(correction) with the 1e-6 gate; retries once at doubled
/// precision before giving up.
fn rounded_count(
    engine: EngineId,
    field: &FieldCtx,
    bits: u32,
    base: i128,
    eval: impl Fn(&CharTable) -> Result<CycValue>,
    start: Instant,
) -> Result<CountReport> {
    let mut cur = bits;
    for attempt in 0..2 {
        let tab = CharTable::new(field, cur);
        let v = eval(&tab)?;
        let (n, residual) = v.round_real();
        if residual < ROUND_TOL {
            let total = base
                + n.to_i128()
                    .ok_or_else(|| Error::Internal("count out of i128 range".into()))?;
            if total < 0 {
                return Err(Error::Internal(format!(
                    "negative count {total} from {engine}"
                )));
            }
            return Ok(report(
                engine,
                total as u64,
                Some(residual),
                format!("{cur}b"),
                start,
            ));
        }
        if attempt == 0 {
            cur *= 2;
        } else {
            return Err(Error::RoundingResidual {
                residual,
                bits: cur,
            });
        }
    }
    unreachable!()
}

fn char_exponents(w: &WeightVector, h: &[u32], step: u64, s: u64, q1: u64) -> Vec<CharIndex> {
    w.w.iter()
        .zip(h)
        .map(|(&wi, &hi)| CharIndex(((wi as u64 * step) % q1 + (hi as u64 * s) % q1) % q1))
        .collect()
}

// ---- diagonal (Weil) engines ----

/// Projective count of the undeformed diagonal x_1^d + ... + x_n^d = 0:
/// (q^{n-1}-1)/(q-1) - sum over interior W of Jacobi sums.
pub fn weil_diagonal_projective(
    field: &FieldCtx,
    n: u32,
    d: u32,
    bits: u32,
) -> Result<CountReport> {
    let start = Instant::now();
    let q1 = field.q() - 1;
    let t = (d as u64).gcd(&q1) as u32;
    let step = q1 / t as u64;
    let base = projective_base(field.q(), n);
    let wset = build_w_set(n, t);
    rounded_count(
        EngineId::Weil,
        field,
        bits,
        base,
        |tab| {
            let mut sum = CycValue::zero(tab.bits());
            for w in wset.iter().filter(|w| w.all_nonzero()) {
                sum =
                    sum.add(&tab.jacobi_sum(&char_exponents(w, &vec![0; n as usize], step, 0, q1)));
            }
            Ok(sum.neg())
        },
        start,
    )
}

/// Count of the undeformed diagonal on the affine torus: sum over all of W
/// of generalized Jacobi sums J_0.
pub fn weil_diagonal_affine_star(
    field: &FieldCtx,
    n: u32,
    d: u32,
    bits: u32,
) -> Result<CountReport> {
    let start = Instant::now();
    let q1 = field.q() - 1;
    let t = (d as u64).gcd(&q1) as u32;
    let step = q1 / t as u64;
    let wset = build_w_set(n, t);
    let rep = rounded_count(
        EngineId::WeilAffine,
        field,
        bits,
        0,
        |tab| {
            let mut sum = CycValue::zero(tab.bits());
            for w in &wset {
                sum = sum.add(&tab.jacobi_zero_sum(&char_exponents(
                    w,
                    &vec![0; n as usize],
                    step,
                    0,
                    q1,
                )));
            }
            Ok(sum)
        },
        start,
    )?;
    Ok(rep)
}

/// Torus count of the deformed family for lambda != 0 via the Jacobi-sum
/// formula. Requires d*lambda != 0 in F_q (the underlying substitution into
/// the nonzero-coefficient hypersurface count needs the deformation
/// coefficient to be a unit).
pub fn jacobi_torus_affine_star(dp: &DeformParams, bits: u32) -> Result<CountReport> {
    let start = Instant::now();
    if dp.lambda.is_zero() {
        return Err(Error::EnginePrecondition(
            "jacobi-torus requires lambda != 0".into(),
        ));
    }
    let dlam = dp.d_lambda();
    if dlam.is_zero() {
        return Err(Error::EnginePrecondition(
            "jacobi-torus requires d*lambda != 0 in F_q (p divides d)".into(),
        ));
    }
    let f = dp.field;
    let q1 = f.q() - 1;
    let step = q1 / dp.t as u64;
    let wset = build_w_set(dp.n, dp.t);
    rounded_count(
        EngineId::JacobiTorus,
        f,
        bits,
        0,
        |tab| {
            let mut sum = CycValue::zero(tab.bits());
            for s in 0..step {
                let ds = CharIndex((dp.d as u64 * s) % q1);
                let chi = tab.mult_char(ds, dlam);
                if chi.is_exact_zero() {
                    continue;
                }
                for w in &wset {
                    let j = tab.jacobi_sum(&char_exponents(w, &dp.h, step, s, q1));
                    sum = sum.add(&j.mul(&chi));
                }
            }
            Ok(sum)
        },
        start,
    )
}

// ---- deformed-family character-sum engines ----

/// The three-term Gauss/Jacobi formula for the projective count. Valid for
/// every lambda: at d*lambda = 0 the character at zero kills the s-sum and
/// the formula reduces to the diagonal count.
pub fn jacobi_ratio_projective(dp: &DeformParams, bits: u32) -> Result<CountReport> {
    let start = Instant::now();
    let f = dp.field;
    let q1 = f.q() - 1;
    let step = q1 / dp.t as u64;
    let base = projective_base(f.q(), dp.n);
    let wset = build_w_set(dp.n, dp.t);
    let dlam = dp.d_lambda();
    rounded_count(
        EngineId::JacobiRatio,
        f,
        bits,
        base,
        |tab| {
            let mut jac = CycValue::zero(tab.bits());
            let zero_h = vec![0u32; dp.n as usize];
            for w in wset.iter().filter(|w| w.all_nonzero()) {
                jac = jac.add(&tab.jacobi_sum(&char_exponents(w, &zero_h, step, 0, q1)));
            }
            let mut ssum = CycValue::zero(tab.bits());
            for s in 0..step {
                let ds = CharIndex((dp.d as u64 * s) % q1);
                let chi = tab.mult_char(ds, dlam);
                if chi.is_exact_zero() {
                    continue;
                }
                let denom = tab.gauss_sum(ds);
                for w in &wset {
                    let mut prod = CycValue::from_i64(1, tab.bits());
                    for j in char_exponents(w, &dp.h, step, s, q1) {
                        prod = prod.mul(&tab.gauss_sum(j));
                    }
                    ssum = ssum.add(&prod.div(&denom).mul(&chi));
                }
            }
            Ok(jac.neg().add(&ssum.div_i64(q1 as i64)))
        },
        start,
    )
}

/// Gauss-product form of the diagonal count: base + (1/q) sum over interior
/// W of the Gauss products. Used by the product-form engines when the
/// deformation term vanishes.
fn weil_gauss_value(tab: &CharTable, n: u32, t: u32) -> CycValue {
    let f = tab.field();
    let q1 = f.q() - 1;
    let step = q1 / t as u64;
    let mut sum = CycValue::zero(tab.bits());
    for w in build_w_set(n, t).iter().filter(|w| w.all_nonzero()) {
        let mut prod = CycValue::from_i64(1, tab.bits());
        for &wi in &w.w {
            prod = prod.mul(&tab.gauss_sum(CharIndex(wi as u64 * step % q1)));
        }
        sum = sum.add(&prod);
    }
    sum.div_i64(f.q() as i64)
}

/// The all-Gauss-product rearrangement of the projective count, in either
/// summation mode. Representative choice in `Long` mode does not change the
/// value (tested); `gauss_product_long_with_reps` exposes the choice.
pub fn gauss_product_projective(
    dp: &DeformParams,
    mode: SumMode,
    bits: u32,
) -> Result<CountReport> {
    let engine = match mode {
        SumMode::Short => EngineId::GaussProductShort,
        SumMode::Long => EngineId::GaussProductLong,
    };
    let reps = match mode {
        SumMode::Short => None,
        SumMode::Long => {
            let wset = build_w_set(dp.n, dp.t);
            let dec = partition_classes(&wset, &dp.h, dp.t)?;
            Some(
                dec.classes
                    .iter()
                    .map(|c| c.representative().clone())
                    .collect::<Vec<_>>(),
            )
        }
    };
    gauss_product_impl(dp, engine, reps.as_deref(), bits)
}

/// Long-mode variant with explicit class representatives.
pub fn gauss_product_long_with_reps(
    dp: &DeformParams,
    reps: &[WeightVector],
    bits: u32,
) -> Result<CountReport> {
    gauss_product_impl(dp, EngineId::GaussProductLong, Some(reps), bits)
}

fn gauss_product_impl(
    dp: &DeformParams,
    engine: EngineId,
    reps: Option<&[WeightVector]>,
    bits: u32,
) -> Result<CountReport> {
    let start = Instant::now();
    let f = dp.field;
    let q = f.q();
    let q1 = q - 1;
    let step = q1 / dp.t as u64;
    let base = projective_base(q, dp.n);
    let dlam = dp.d_lambda();
    let wset = build_w_set(dp.n, dp.t);
    if dlam.is_zero() {
        // deformation term vanishes; the s-rearrangement (which divides by
        // the trivial character at d*lambda) does not apply, and the count
        // is the diagonal one
        return rounded_count(
            engine,
            f,
            bits,
            base,
            |tab| Ok(weil_gauss_value(tab, dp.n, dp.t)),
            start,
        );
    }
    let minus_dlam = f.neg(dlam);
    rounded_count(
        engine,
        f,
        bits,
        base,
        |tab| {
            let mut first = CycValue::zero(tab.bits());
            let zero_h = vec![0u32; dp.n as usize];
            for w in wset.iter().filter(|w| w.has_zero_coordinate()) {
                let mut prod = CycValue::from_i64(1, tab.bits());
                for j in char_exponents(w, &zero_h, step, 0, q1) {
                    prod = prod.mul(&tab.gauss_sum(j));
                }
                first = first.add(&prod);
            }
            let (s_count, vectors): (u64, Vec<&WeightVector>) = match reps {
                None => (step, wset.iter().collect()),
                Some(rs) => (q1, rs.iter().collect()),
            };
            let mut second = CycValue::zero(tab.bits());
            for s in 0..s_count {
                let ds = CharIndex((dp.d as u64 * s) % q1);
                let chi = tab.mult_char(ds, minus_dlam);
                let gneg = tab.gauss_sum(CharIndex((q1 - ds.0 % q1) % q1));
                for w in &vectors {
                    let mut prod = CycValue::from_i64(1, tab.bits());
                    for j in char_exponents(w, &dp.h, step, s, q1) {
                        prod = prod.mul(&tab.gauss_sum(j));
                    }
                    second = second.add(&prod.mul(&gneg).mul(&chi));
                }
            }
            let qi = q as i64;
            Ok(first.div_i64(-qi).add(&second.div_i64(qi * q1 as i64)))
        },
        start,
    )
}

// ---- Dwork specialization, character-sum engine ----

/// The S_w^c-factored Gauss-sum form for the Dwork family (h = 1, d = n),
/// lambda != 0 and p not dividing n.
pub fn dwork_gauss_projective(
    field: &FieldCtx,
    n: u32,
    lambda: FieldElement,
    mode: SumMode,
    bits: u32,
) -> Result<CountReport> {
    let engine = match mode {
        SumMode::Short => EngineId::DworkGaussShort,
        SumMode::Long => EngineId::DworkGaussLong,
    };
    let q1 = field.q() - 1;
    let t = (n as u64).gcd(&q1) as u32;
    let reps = match mode {
        SumMode::Short => None,
        SumMode::Long => {
            let wset = build_w_set(n, t);
            let dec = partition_classes(&wset, &vec![1; n as usize], t)?;
            Some(
                dec.classes
                    .iter()
                    .map(|c| c.representative().clone())
                    .collect::<Vec<_>>(),
            )
        }
    };
    dwork_gauss_impl(field, n, lambda, engine, reps.as_deref(), bits)
}

/// Long-mode Dwork engine with explicit class representatives.
pub fn dwork_gauss_long_with_reps(
    field: &FieldCtx,
    n: u32,
    lambda: FieldElement,
    reps: &[WeightVector],
    bits: u32,
) -> Result<CountReport> {
    dwork_gauss_impl(field, n, lambda, EngineId::DworkGaussLong, Some(reps), bits)
}

fn dwork_gauss_impl(
    field: &FieldCtx,
    n: u32,
    lambda: FieldElement,
    engine: EngineId,
    reps: Option<&[WeightVector]>,
    bits: u32,
) -> Result<CountReport> {
    let start = Instant::now();
    if lambda.is_zero() {
        return Err(Error::EnginePrecondition(
            "dwork engines require lambda != 0".into(),
        ));
    }
    if field.p() == 0 || n as u64 % field.p() == 0 {
        return Err(Error::EnginePrecondition(
            "dwork engines require p not dividing n".into(),
        ));
    }
    let f = field;
    let q = f.q();
    let q1 = q - 1;
    let t = (n as u64).gcd(&q1) as u32;
    let step = q1 / t as u64;
    let base = projective_base(q, n);
    let wset = build_w_set(n, t);
    let minus_nlam = f.neg(f.mul(f.from_uint(n as u64), lambda));
    let profiles: Vec<(WeightVector, Vec<u32>, Vec<u32>)> = match reps {
        None => &wset,
        Some(rs) => rs,
    }
    .iter()
    .map(|w| {
        let prof = dwork_profile(w, n, t).expect("t divides n");
        (w.clone(), prof.s_present.clone(), prof.n_k.clone())
    })
    .collect();
    let s_count = match reps {
        None => step,
        Some(_) => q1,
    };
    rounded_count(
        engine,
        f,
        bits,
        base,
        |tab| {
            let mut total = CycValue::zero(tab.bits());
            for s in 0..s_count {
                let ns = CharIndex((n as u64 * s) % q1);
                let chi = tab.mult_char(ns, minus_nlam);
                if chi.is_exact_zero() {
                    continue;
                }
                let gneg = tab.gauss_sum(CharIndex((q1 - ns.0 % q1) % q1));
                for (_, s_present, n_k) in &profiles {
                    let mut bracket = CycValue::from_i64(1, tab.bits());
                    for &k in s_present {
                        let idx = CharIndex((k as u64 * step + s) % q1);
                        let g = tab.gauss_sum(idx);
                        let mut num = CycValue::from_i64(1, tab.bits());
                        for _ in 1..n_k[k as usize] {
                            num = num.mul(&g);
                        }
                        let den = tab.gauss_sum(CharIndex((q1 - idx.0 % q1) % q1));
                        let sign = tab.mult_char(idx, f.minus_one());
                        bracket = bracket.mul(&num.div(&den)).mul(&sign).mul_i64(q as i64);
                    }
                    total = total.add(&bracket.mul(&gneg).mul(&chi));
                }
            }
            Ok(total.div_i64((q * q1) as i64))
        },
        start,
    )
}

// ---- p-adic engines ----

fn check_padic_preconditions(dp: &DeformParams) -> Result<()> {
    let p = dp.field.p();
    if p == 2 {
        return Err(Error::EvenCharacteristic(2));
    }
    if dp.d as u64 % p == 0 || dp.h.iter().any(|&hi| hi as u64 % p == 0) {
        return Err(Error::EnginePrecondition(format!(
            "p = {p} divides d*h_1*...*h_n; the p-adic formula does not apply"
        )));
    }
    Ok(())
}

/// The p-adic hypergeometric formula for the projective count, in the main
/// (inverted-argument) or swapped form. At lambda = 0 the hypergeometric
/// terms vanish and the count reduces to the diagonal one, assembled from the
/// C factors over interior W.
pub fn main_padic_projective(
    ctx: &PadicCtx,
    dp: &DeformParams,
    variant: MainVariant,
) -> Result<CountReport> {
    let start = Instant::now();
    check_padic_preconditions(dp)?;
    let engine = match variant {
        MainVariant::Main => EngineId::PadicMain,
        MainVariant::Swapped => EngineId::PadicSwapped,
    };
    let f = dp.field;
    let q = f.q();
    let bound = projective_bound(q, dp.n);
    let base = projective_base(q, dp.n);
    let work = ctx.base_digits();
    let gdigits = work + ctx.r() + 1;
    let wset = build_w_set(dp.n, dp.t);

    let bracket: QqNumber = if dp.lambda.is_zero() {
        // diagonal count: base + (-1)^n/q * sum over interior W of C(w)
        let mut sum = QqNumber::exact_zero();
        for w in wset.iter().filter(|w| w.all_nonzero()) {
            sum = ctx.qq_add(&sum, &c_factor(ctx, w, false, gdigits)?);
        }
        sum
    } else {
        let dec = partition_classes(&wset, &dp.h, dp.t)?;
        let input = MainParamsInput {
            h: &dp.h,
            d: dp.d,
            t: dp.t,
        };
        let swapped = variant == MainVariant::Swapped;
        // plan every hypergeometric term first so one gamma sweep serves all
        let mut jobs = Vec::with_capacity(dec.classes.len());
        let mut keys: Vec<(i64, i64)> = Vec::new();
        let mut table_digits = gdigits;
        for class in &dec.classes {
            let w = class.representative();
            let params = build_main_params(f, &input, w, dp.lambda, swapped)?;
            let plan = plan_g(ctx, &params)?;
            table_digits = table_digits.max(plan.work_digits(gdigits));
            keys.extend(plan.gamma_keys());
            keys.extend(c_factor_keys(w, swapped, ctx.p(), ctx.r()));
            jobs.push((w.clone(), params, plan));
        }
        for w in wset.iter().filter(|w| w.has_zero_coordinate()) {
            keys.extend(c_factor_keys(w, false, ctx.p(), ctx.r()));
        }
        ctx.gamma_prepare(keys, table_digits)?;

        let mut sum_zero = QqNumber::exact_zero();
        for w in wset.iter().filter(|w| w.has_zero_coordinate()) {
            sum_zero = ctx.qq_add(&sum_zero, &c_factor(ctx, w, false, gdigits)?);
        }
        let mut sum_g = QqNumber::exact_zero();
        for (w, params, plan) in &jobs {
            let c = c_factor(ctx, w, swapped, gdigits)?;
            let g = evaluate_g_planned(f, ctx, params, plan, gdigits)?;
            sum_g = ctx.qq_add(&sum_g, &ctx.qq_mul(&c, &g));
        }
        ctx.qq_add(&sum_g, &ctx.qq_neg(&sum_zero))
    };
    let mut term = ctx.qq_div_q(&bracket);
    if dp.n % 2 == 1 {
        term = ctx.qq_neg(&term);
    }
    let total = ctx.qq_add(&ctx.qq_from_i128(base, gdigits), &term);
    let count = ctx.reconstruct_integer(&total, bound)?;
    Ok(report(engine, count, None, format!("{work}d"), start))
}

/// The single-hypergeometric-term formula in the gcd(d, q-1) = 1 case.
pub fn gcd1_padic_projective(ctx: &PadicCtx, dp: &DeformParams) -> Result<CountReport> {
    let start = Instant::now();
    check_padic_preconditions(dp)?;
    if dp.t != 1 {
        return Err(Error::EnginePrecondition(format!(
            "gcd1 engine requires gcd(d, q-1) = 1, got t = {}",
            dp.t
        )));
    }
    let f = dp.field;
    let q = f.q();
    let bound = projective_bound(q, dp.n);
    let base = projective_base(q, dp.n);
    let work = ctx.base_digits() + 1;
    // top line: 1/d .. (d-1)/d; bottom: [b/h_i] with exactly one zero removed
    let mut top = Vec::with_capacity(dp.d as usize - 1);
    for j in 1..dp.d {
        top.push(crate::wlattice::Ratio64::new(j as i64, dp.d as i64));
    }
    let mut bottom = Vec::with_capacity(dp.d as usize - 1);
    let mut zero_removed = false;
    for &hi in &dp.h {
        for b in 0..hi {
            if b == 0 && !zero_removed {
                zero_removed = true;
                continue;
            }
            bottom.push(crate::wlattice::Ratio64::new(b as i64, hi as i64));
        }
    }
    let arg = if dp.lambda.is_zero() {
        f.zero()
    } else {
        let mut z = f.pow(dp.lambda, dp.d as i64)?;
        for &hi in &dp.h {
            z = f.mul(z, f.pow(f.from_uint(hi as u64), hi as i64)?);
        }
        z
    };
    let params = crate::hyperg::GParams {
        a: top,
        b: bottom,
        lambda: arg,
    };
    let g = evaluate_g(f, ctx, &params, work)?;
    let signed = if dp.n % 2 == 1 { ctx.qq_neg(&g) } else { g };
    let total = ctx.qq_add(&ctx.qq_from_i128(base, work), &signed);
    let count = ctx.reconstruct_integer(&total, bound)?;
    Ok(report(
        EngineId::PadicGcd1,
        count,
        None,
        format!("{}d", ctx.base_digits()),
        start,
    ))
}

/// The Dwork-family p-adic formula: one hypergeometric term per class at a
/// zero-containing representative.
pub fn dwork_padic_projective(
    ctx: &PadicCtx,
    field: &FieldCtx,
    n: u32,
    lambda: FieldElement,
) -> Result<CountReport> {
    let q1 = field.q() - 1;
    let t = (n as u64).gcd(&q1) as u32;
    let wset = build_w_set(n, t);
    let dec = partition_classes(&wset, &vec![1; n as usize], t)?;
    let reps: Vec<WeightVector> = dec
        .classes
        .iter()
        .map(|c| c.zero_representative().clone())
        .collect();
    dwork_padic_with_zero_reps(ctx, field, n, lambda, &reps)
}

/// Same, with the zero-containing representatives chosen by the caller (the
/// total is representative-independent; per-class terms need not be).
pub fn dwork_padic_with_zero_reps(
    ctx: &PadicCtx,
    field: &FieldCtx,
    n: u32,
    lambda: FieldElement,
    zero_reps: &[WeightVector],
) -> Result<CountReport> {
    let start = Instant::now();
    if field.p() == 2 {
        return Err(Error::EvenCharacteristic(2));
    }
    if lambda.is_zero() {
        return Err(Error::EnginePrecondition(
            "dwork engines require lambda != 0".into(),
        ));
    }
    if n as u64 % field.p() == 0 {
        return Err(Error::EnginePrecondition(
            "dwork engines require p not dividing n".into(),
        ));
    }
    let q = field.q();
    let q1 = q - 1;
    let t = (n as u64).gcd(&q1) as u32;
    let bound = projective_bound(q, n);
    let base = projective_base(q, n);
    let work = ctx.base_digits() + 1;
    let mut jobs = Vec::with_capacity(zero_reps.len());
    let mut keys: Vec<(i64, i64)> = Vec::new();
    let mut table_digits = work;
    for w0 in zero_reps {
        if !w0.has_zero_coordinate() {
            return Err(Error::EnginePrecondition(
                "dwork representative must contain a zero coordinate".into(),
            ));
        }
        let prof = dwork_profile(w0, n, t)?;
        let params = build_dwork_params(field, &prof, n, lambda)?;
        let plan = plan_g(ctx, &params)?;
        table_digits = table_digits.max(plan.work_digits(work));
        keys.extend(plan.gamma_keys());
        keys.extend(c_factor_keys(w0, false, ctx.p(), ctx.r()));
        jobs.push((w0.clone(), params, plan));
    }
    ctx.gamma_prepare(keys, table_digits)?;
    let mut sum = QqNumber::exact_zero();
    for (w0, params, plan) in &jobs {
        let c = c_factor(ctx, w0, false, work)?;
        let g = evaluate_g_planned(field, ctx, params, plan, work)?;
        sum = ctx.qq_add(&sum, &ctx.qq_mul(&c, &g));
    }
    if n % 2 == 1 {
        sum = ctx.qq_neg(&sum);
    }
    let total = ctx.qq_add(&ctx.qq_from_i128(base, work), &sum);
    let count = ctx.reconstruct_integer(&total, bound)?;
    Ok(report(
        EngineId::DworkPadic,
        count,
        None,
        format!("{}d", ctx.base_digits()),
        start,
    ))
}
