//! Engine dispatch and applicability rules.
//!
//! Applicability encodes each formula's stated hypotheses; `verify` and
//! `sweep` record excluded engines as SKIP rather than failures. The two
//! brute-force counts and the diagonal/torus formula engines compare within
//! their own pools (projective vs all-nonzero affine).

use crate::AppResult;
use diagdeform::counting::{
    brute_affine_star, brute_projective, dwork_gauss_projective, dwork_padic_projective,
    gauss_product_projective, gcd1_padic_projective, jacobi_ratio_projective,
    jacobi_torus_affine_star, main_padic_projective, weil_diagonal_affine_star,
    weil_diagonal_projective, CountReport, DeformParams, EngineId, MainVariant, SumMode,
};
use diagdeform::error::Error as CoreError;
use diagdeform::padic::PadicCtx;

pub enum EngineDisposition {
    Run,
    Skip(String),
}

pub fn needs_padic(engine: EngineId) -> bool {
    matches!(
        engine,
        EngineId::PadicMain | EngineId::PadicSwapped | EngineId::PadicGcd1 | EngineId::DworkPadic
    )
}

/// Decide whether an engine's hypotheses admit this parameter point.
pub fn applicable(engine: EngineId, dp: &DeformParams) -> EngineDisposition {
    use EngineDisposition::*;
    let p = dp.field.p();
    let dlam_zero = dp.d_lambda().is_zero();
    let p_ok = p != 2 && dp.d as u64 % p != 0 && dp.h.iter().all(|&hi| hi as u64 % p != 0);
    let dwork_ok = dp.is_dwork() && !dp.lambda.is_zero() && dp.n as u64 % p != 0;
    match engine {
        EngineId::Brute | EngineId::BruteAffine | EngineId::JacobiRatio => Run,
        EngineId::GaussProductShort | EngineId::GaussProductLong => Run,
        EngineId::Weil | EngineId::WeilAffine => {
            if dlam_zero {
                Run // the deformation term vanishes; the variety is diagonal
            } else {
                Skip("diagonal-only engine (needs d*lambda = 0)".into())
            }
        }
        EngineId::JacobiTorus => {
            if dp.lambda.is_zero() {
                Skip("requires lambda != 0".into())
            } else if dlam_zero {
                Skip("requires d*lambda != 0 in F_q".into())
            } else {
                Run
            }
        }
        EngineId::PadicMain | EngineId::PadicSwapped => {
            if p_ok {
                Run
            } else {
                Skip("requires p odd and p not dividing d*h_1*...*h_n".into())
            }
        }
        EngineId::PadicGcd1 => {
            if !p_ok {
                Skip("requires p odd and p not dividing d*h_1*...*h_n".into())
            } else if dp.t != 1 {
                Skip("requires gcd(d, q-1) = 1".into())
            } else {
                Run
            }
        }
        EngineId::DworkGaussShort | EngineId::DworkGaussLong => {
            if dwork_ok {
                Run
            } else {
                Skip("requires h = (1,..,1), lambda != 0, p not dividing n".into())
            }
        }
        EngineId::DworkPadic => {
            if dwork_ok && p != 2 {
                Run
            } else {
                Skip("requires h = (1,..,1), lambda != 0, p odd not dividing n".into())
            }
        }
    }
}

pub fn run_engine(
    engine: EngineId,
    dp: &DeformParams,
    bits: u32,
    ctx: Option<&PadicCtx>,
) -> AppResult<CountReport> {
    let padic = || -> Result<&PadicCtx, CoreError> {
        ctx.ok_or_else(|| CoreError::EnginePrecondition("p-adic context unavailable".into()))
    };
    let rep = match engine {
        EngineId::Brute => brute_projective(dp),
        EngineId::BruteAffine => brute_affine_star(dp),
        EngineId::Weil => weil_diagonal_projective(dp.field, dp.n, dp.d, bits)?,
        EngineId::WeilAffine => weil_diagonal_affine_star(dp.field, dp.n, dp.d, bits)?,
        EngineId::JacobiTorus => jacobi_torus_affine_star(dp, bits)?,
        EngineId::JacobiRatio => jacobi_ratio_projective(dp, bits)?,
        EngineId::GaussProductShort => gauss_product_projective(dp, SumMode::Short, bits)?,
        EngineId::GaussProductLong => gauss_product_projective(dp, SumMode::Long, bits)?,
        EngineId::PadicMain => main_padic_projective(padic()?, dp, MainVariant::Main)?,
        EngineId::PadicSwapped => main_padic_projective(padic()?, dp, MainVariant::Swapped)?,
        EngineId::PadicGcd1 => gcd1_padic_projective(padic()?, dp)?,
        EngineId::DworkGaussShort => {
            dwork_gauss_projective(dp.field, dp.n, dp.lambda, SumMode::Short, bits)?
        }
        EngineId::DworkGaussLong => {
            dwork_gauss_projective(dp.field, dp.n, dp.lambda, SumMode::Long, bits)?
        }
        EngineId::DworkPadic => dwork_padic_projective(padic()?, dp.field, dp.n, dp.lambda)?,
    };
    Ok(rep)
}
