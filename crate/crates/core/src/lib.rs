//! Verifier and calculator for anticyclotomic λ-invariant transfer between
//! residually congruent elliptic curves (or user-supplied eigenforms).
//!
//! The pipeline: check the Heegner and admissibility hypotheses, certify the
//! residual congruence up to the Sturm bound, ingest externally certified
//! facts (rank, Heegner point, Sha, μ = 0), compute the local invariants
//! λ_ℓ = s_ℓ·d_ℓ at the bad primes, and evaluate the transfer identity
//! λ(f₂) = λ(f₁) + 2·Σ_{ℓ|N₁N₂}(λ_ℓ(f₁) − λ_ℓ(f₂)).

pub mod arith;
pub mod congruence;
pub mod curves;
pub mod forms;
pub mod ingest;
pub mod iwasawa;
pub mod quadfield;
pub mod report;
