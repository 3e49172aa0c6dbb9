//! Exact p-adic bookkeeping behind the elimination of sub-quotients `F_{2i,2i+1}`
//! in the mod `p` reduction of semi-stable lattices of weight `k = r + 2`.
//!
//! The crate is layered bottom-up:
//!
//! - [`exactnum`]: exact integers/rationals, valuations, binomials, harmonic numbers.
//! - [`combinat`]: Lucas congruences mod `p` and `p^2`, Stirling numbers of the second kind.
//! - [`lambda_solver`]: the interpolation coefficients `λ_i` and their congruences.
//! - [`fp_poly`]: homogeneous polynomials over `F_p` and the shallow kills.
//! - [`congruence`]: the master congruence, its coefficient `*_j`, and the kill audits.
//! - [`eliminator`]: the full elimination and the resulting reduction label.

pub mod combinat;
pub mod congruence;
pub mod eliminator;
pub mod exactnum;
pub mod fp_poly;
pub mod lambda_solver;
