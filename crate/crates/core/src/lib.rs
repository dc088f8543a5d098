//! Exact point counting for the family of diagonal hypersurfaces with monomial
//! deformation
//!
//! ```text
//! D_{d,lambda,h}: x_1^d + x_2^d + ... + x_n^d - d*lambda * x_1^{h_1} ... x_n^{h_n} = 0
//! ```
//!
//! over F_q (q = p^r), where d = h_1 + ... + h_n and gcd(h_1, ..., h_n) = 1.
//!
//! Two independent formula engines compute the number of projective points:
//! one in arbitrary-precision complex arithmetic via Gauss and Jacobi sums,
//! one in bounded-precision p-adic arithmetic via the p-adic gamma function
//! and the hypergeometric function mGm. Both are verified against exhaustive
//! enumeration. See the module docs for the individual pieces:
//!
//! - [`ffield`]: F_q with dlog table and trace
//! - [`charsum`]: characters, Gauss/Jacobi sums over complex values
//! - [`wlattice`]: the weight-vector set W, its classes, Dwork profiles
//! - [`padic`]: Z_q arithmetic, Teichmuller lifts, the p-adic gamma function
//! - [`hyperg`]: the p-adic hypergeometric function mGm and parameter builders
//! - [`counting`]: the brute-force oracles and every formula engine

pub mod bigfloat;
pub mod charsum;
pub mod counting;
pub mod error;
pub mod ffield;
pub mod hyperg;
pub mod padic;
pub mod wlattice;

pub use error::{Error, Result};
