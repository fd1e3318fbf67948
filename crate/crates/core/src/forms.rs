//! Common interface for objects that supply Hecke-eigenvalue data: elliptic
//! curves over Q (via point counts) and user-supplied eigenform records.

use crate::arith::PrimeFactorization;
use crate::curves::{self, EllipticCurveQ, ReductionType};
use num_bigint::BigInt;

pub trait FormSource {
    /// Level (conductor) as a factored integer.
    fn level(&self) -> PrimeFactorization;

    /// Weight; 2 for elliptic curves.
    fn weight(&self) -> u32;

    /// Local behaviour at ell.
    fn local_kind(&self, ell: u64) -> ReductionType;

    /// L-series coefficient a_ell: the trace of Frobenius at good ell, ±1 at
    /// split/nonsplit multiplicative ell, 0 at additive ell.  `None` when the
    /// source has no coefficient for ell (possible for eigenform records).
    fn a_ell(&self, ell: u64) -> Option<BigInt>;

    fn describe(&self) -> String;
}

impl FormSource for EllipticCurveQ {
    fn level(&self) -> PrimeFactorization {
        curves::conductor(self)
    }

    fn weight(&self) -> u32 {
        2
    }

    fn local_kind(&self, ell: u64) -> ReductionType {
        curves::local_data(self, ell).reduction
    }

    fn a_ell(&self, ell: u64) -> Option<BigInt> {
        Some(BigInt::from(curves::a_ell_any(self, ell)))
    }

    fn describe(&self) -> String {
        match &self.label {
            Some(l) => l.clone(),
            None => format!(
                "[{},{},{},{},{}]",
                self.a1, self.a2, self.a3, self.a4, self.a6
            ),
        }
    }
}
