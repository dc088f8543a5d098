//! Property tests for the structural invariants that are awkward to pin with
//! single examples.

use diagdeform::charsum::{CharIndex, CharTable};
use diagdeform::counting::projective_bound;
use diagdeform::ffield::{FieldCtx, FieldElement};
use diagdeform::hyperg::{evaluate_g, GParams};
use diagdeform::padic::PadicCtx;
use diagdeform::wlattice::{build_w_set, partition_classes, Ratio64};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dlog_turns_products_into_sums(pr in prop::sample::select(vec![(5u64,1u32),(7,1),(3,2),(11,1)]),
                                     a in 1u32..120, b in 1u32..120) {
        let f = FieldCtx::new(pr.0, pr.1).unwrap();
        let x = FieldElement(1 + a % (f.q() as u32 - 1));
        let y = FieldElement(1 + b % (f.q() as u32 - 1));
        let lhs = f.dlog(f.mul(x, y)).unwrap();
        let rhs = (f.dlog(x).unwrap() + f.dlog(y).unwrap()) % (f.q() - 1);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn jacobi_sum_is_symmetric(js in prop::collection::vec(0u64..6, 2..4), swap in 0usize..3) {
        let f = FieldCtx::new(7, 1).unwrap();
        let tab = CharTable::new(&f, 128);
        let chars: Vec<CharIndex> = js.iter().map(|&j| CharIndex(j)).collect();
        let mut permuted = chars.clone();
        let k = swap % permuted.len();
        permuted.rotate_left(k);
        let a = tab.jacobi_sum(&chars);
        let b = tab.jacobi_sum(&permuted);
        let d = a.sub(&b);
        prop_assert!(d.re_f64().abs() < 1e-25 && d.im_f64().abs() < 1e-25);
    }

    #[test]
    fn g_function_ignores_integer_shifts(nums in prop::collection::vec((0i64..6, 1i64..5, -2i64..3), 1..3),
                                         lam in 1i64..6) {
        // shifting any parameter by an integer leaves mGm unchanged
        let f = FieldCtx::new(7, 1).unwrap();
        let ctx = PadicCtx::new(&f, projective_bound(7, 3)).unwrap();
        let mut a = Vec::new();
        let mut a_shift = Vec::new();
        for &(num, den, shift) in &nums {
            let den = if den % 7 == 0 { den + 1 } else { den };
            a.push(Ratio64::new(num % den, den));
            a_shift.push(Ratio64::new(num % den, den) + Ratio64::new(shift, 1));
        }
        let b = vec![Ratio64::new(1, 1); a.len()];
        let lambda = f.gen_pow(lam);
        let d = ctx.base_digits();
        let x = evaluate_g(&f, &ctx, &GParams { a, b: b.clone(), lambda }, d).unwrap();
        let y = evaluate_g(&f, &ctx, &GParams { a: a_shift, b, lambda }, d).unwrap();
        prop_assert!(ctx.qq_eq_mod(&x, &y, d as i64));
    }

    #[test]
    fn class_partition_covers_w(n in 2u32..5, t in 1u32..5, pad in 0u32..3) {
        // any admissible h (gcd 1, t | sum h_i) partitions W into t-sized
        // classes; all-but-last entries stay 1 so the gcd is always 1
        let mut h = vec![1u32; n as usize];
        h[n as usize - 1] += (t - (n % t)) % t + pad * t;
        let wset = build_w_set(n, t);
        let dec = partition_classes(&wset, &h, t).unwrap();
        let covered: usize = dec.classes.iter().map(|c| c.members.len()).sum();
        prop_assert_eq!(covered, wset.len());
        for c in &dec.classes {
            prop_assert_eq!(c.members.len(), t as usize);
            prop_assert!(c.members.iter().any(|m| m.has_zero_coordinate()));
        }
    }

    #[test]
    fn qq_ring_ops_match_integers(x in -2000i64..2000, y in -2000i64..2000) {
        let f = FieldCtx::new(5, 1).unwrap();
        let ctx = PadicCtx::new(&f, 10_000).unwrap();
        let d = ctx.base_digits();
        let qx = ctx.qq_from_i128(x as i128, d);
        let qy = ctx.qq_from_i128(y as i128, d);
        let sum = ctx.qq_add(&qx, &qy);
        let prod = ctx.qq_mul(&qx, &qy);
        prop_assert!(ctx.qq_eq_mod(&sum, &ctx.qq_from_i128((x + y) as i128, d), d as i64));
        let prod_abs = prod.abs_precision().min(d as i64);
        prop_assert!(ctx.qq_eq_mod(&prod, &ctx.qq_from_i128((x as i128) * (y as i128), d), prod_abs));
    }
}
