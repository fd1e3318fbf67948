//! Elliptic curves over Q: Weierstrass invariants, point counts over F_ell,
//! local reduction data, and torsion triviality tests.

mod tate;

pub use tate::local_data;

use crate::arith::{self, factorize, PrimeFactorization};
use crate::quadfield::ImagQuadField;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CurveError {
    #[error("a-invariants define a singular curve (discriminant is zero)")]
    Singular,
    #[error("curve has bad reduction at {0}")]
    BadReduction(u64),
    #[error("fewer than {needed} usable sampling primes below {bound}")]
    InsufficientPrimes { needed: usize, bound: u64 },
}

/// Integral long Weierstrass model y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EllipticCurveQ {
    pub a1: BigInt,
    pub a2: BigInt,
    pub a3: BigInt,
    pub a4: BigInt,
    pub a6: BigInt,
    pub label: Option<String>,
}

impl EllipticCurveQ {
    pub fn new(
        a1: BigInt,
        a2: BigInt,
        a3: BigInt,
        a4: BigInt,
        a6: BigInt,
        label: Option<String>,
    ) -> Result<Self, CurveError> {
        let e = EllipticCurveQ {
            a1,
            a2,
            a3,
            a4,
            a6,
            label,
        };
        if e.discriminant().is_zero() {
            return Err(CurveError::Singular);
        }
        Ok(e)
    }

    pub fn from_i64(ai: [i64; 5], label: Option<&str>) -> Result<Self, CurveError> {
        EllipticCurveQ::new(
            BigInt::from(ai[0]),
            BigInt::from(ai[1]),
            BigInt::from(ai[2]),
            BigInt::from(ai[3]),
            BigInt::from(ai[4]),
            label.map(str::to_owned),
        )
    }

    pub fn ainvs(&self) -> [&BigInt; 5] {
        [&self.a1, &self.a2, &self.a3, &self.a4, &self.a6]
    }

    pub fn b2(&self) -> BigInt {
        &self.a1 * &self.a1 + 4 * &self.a2
    }

    pub fn b4(&self) -> BigInt {
        2 * &self.a4 + &self.a1 * &self.a3
    }

    pub fn b6(&self) -> BigInt {
        &self.a3 * &self.a3 + 4 * &self.a6
    }

    pub fn b8(&self) -> BigInt {
        let (b2, b4, b6) = (self.b2(), self.b4(), self.b6());
        (&b2 * &b6 - &b4 * &b4) / 4
    }

    pub fn c4(&self) -> BigInt {
        let b2 = self.b2();
        &b2 * &b2 - 24 * self.b4()
    }

    pub fn c6(&self) -> BigInt {
        let b2 = self.b2();
        let b4 = self.b4();
        -(&b2 * &b2 * &b2) + 36 * &b2 * &b4 - 216 * self.b6()
    }

    pub fn discriminant(&self) -> BigInt {
        let (b2, b4, b6, b8) = (self.b2(), self.b4(), self.b6(), self.b8());
        -(&b2 * &b2) * &b8 - 8 * (&b4 * &b4 * &b4) - 27 * &b6 * &b6 + 9 * &b2 * &b4 * &b6
    }

    /// Coordinate change x = x' + r, y = y' + s·x' + t (unimodular, u = 1).
    pub(crate) fn translated(&self, r: &BigInt, s: &BigInt, t: &BigInt) -> EllipticCurveQ {
        let a1 = &self.a1 + 2 * s;
        let a2 = &self.a2 - s * &self.a1 + 3 * r - s * s;
        let a3 = &self.a3 + r * &self.a1 + 2 * t;
        let a4 = &self.a4 - s * &self.a3 + 2 * r * &self.a2 - (t + r * s) * &self.a1
            + 3 * r * r
            - 2 * s * t;
        let a6 = &self.a6 + r * &self.a4 + r * r * &self.a2 + r * r * r
            - t * &self.a3
            - t * t
            - r * t * &self.a1;
        EllipticCurveQ {
            a1,
            a2,
            a3,
            a4,
            a6,
            label: self.label.clone(),
        }
    }

    /// Rescale by u = p, assuming p^i | a_i for each i (Tate restart).
    pub(crate) fn rescaled_down(&self, p: u64) -> EllipticCurveQ {
        let p = BigInt::from(p);
        EllipticCurveQ {
            a1: &self.a1 / &p,
            a2: &self.a2 / (&p * &p),
            a3: &self.a3 / (&p * &p * &p),
            a4: &self.a4 / (&p * &p * &p * &p),
            a6: &self.a6 / (&p * &p * &p * &p * &p * &p),
            label: self.label.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionType {
    Good,
    SplitMultiplicative,
    NonsplitMultiplicative,
    Additive,
}

impl ReductionType {
    pub fn is_multiplicative(self) -> bool {
        matches!(
            self,
            ReductionType::SplitMultiplicative | ReductionType::NonsplitMultiplicative
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalReductionData {
    pub ell: u64,
    pub reduction: ReductionType,
    pub conductor_exponent: u32,
    pub tamagawa: u64,
    pub ord_min_disc: u32,
    /// Kodaira symbol, e.g. "I0", "I5", "I2*", "IV", "II*".
    pub kodaira: String,
}

pub(crate) fn vp(n: &BigInt, p: u64) -> u32 {
    arith::valuation(n, p)
}

pub(crate) fn red(n: &BigInt, p: u64) -> u64 {
    n.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

/// Quadratic character of F_ell (ell odd prime): 0 on 0, else ±1.
fn chi(r: u64, ell: u64) -> i64 {
    if r == 0 {
        return 0;
    }
    let e = arith::pow_mod_u64(r, (ell - 1) / 2, ell);
    if e == 1 {
        1
    } else {
        -1
    }
}

fn count_points_mod(e: &EllipticCurveQ, ell: u64) -> u64 {
    let a1 = red(&e.a1, ell);
    let a2 = red(&e.a2, ell);
    let a3 = red(&e.a3, ell);
    let a4 = red(&e.a4, ell);
    let a6 = red(&e.a6, ell);
    if ell == 2 {
        let mut n = 1u64; // point at infinity
        for x in 0..2u64 {
            for y in 0..2u64 {
                let lhs = y * y + a1 * x * y + a3 * y;
                let rhs = x * x * x + a2 * x * x + a4 * x + a6;
                if (lhs + rhs) % 2 == 0 {
                    n += 1;
                }
            }
        }
        return n;
    }
    // Complete the square: (2y + a1 x + a3)² = (a1 x + a3)² + 4 f(x).
    let mut n = ell as i64 + 1;
    for x in 0..ell {
        let lin = (a1 as u128 * x as u128 + a3 as u128) % ell as u128;
        let f = {
            let x = x as u128;
            let m = ell as u128;
            (((x * x % m) * x % m) + a2 as u128 * (x * x % m) % m + a4 as u128 * x % m
                + a6 as u128)
                % m
        };
        let rhs = ((lin * lin) % ell as u128 + 4 * f) % ell as u128;
        n += chi(rhs as u64, ell);
    }
    n as u64
}

/// a_ell = ell + 1 − #E(F_ell) at a prime of good reduction.
///
/// Non-minimal models are minimized at ell first, so a prime dividing the
/// given discriminant but not the minimal one is still accepted.
pub fn trace_of_frobenius(e: &EllipticCurveQ, ell: u64) -> Result<i64, CurveError> {
    let model = if vp(&e.discriminant(), ell) == 0 {
        e.clone()
    } else {
        let (data, minimal) = tate::tate_full(e, ell);
        if data.reduction != ReductionType::Good {
            return Err(CurveError::BadReduction(ell));
        }
        minimal
    };
    Ok(ell as i64 + 1 - count_points_mod(&model, ell) as i64)
}

/// L-series coefficient a_ell at any prime: trace for good reduction,
/// ±1 for split/nonsplit multiplicative, 0 for additive.
pub fn a_ell_any(e: &EllipticCurveQ, ell: u64) -> i64 {
    let data = local_data(e, ell);
    match data.reduction {
        ReductionType::Good => trace_of_frobenius(e, ell).unwrap(),
        ReductionType::SplitMultiplicative => 1,
        ReductionType::NonsplitMultiplicative => -1,
        ReductionType::Additive => 0,
    }
}

/// Conductor as a factored integer: product of ell^f over bad primes.
pub fn conductor(e: &EllipticCurveQ) -> PrimeFactorization {
    let disc = e.discriminant().abs().to_biguint().unwrap();
    let mut n = BigUint::from(1u32);
    for (p, _) in factorize(&disc).factors() {
        let ell = p.to_u64().expect("bad prime exceeds u64");
        let data = local_data(e, ell);
        n *= BigUint::from(ell).pow(data.conductor_exponent);
    }
    factorize(&n)
}

pub fn tamagawa_product(e: &EllipticCurveQ) -> BigUint {
    let disc = e.discriminant().abs().to_biguint().unwrap();
    let mut c = BigUint::from(1u32);
    for (p, _) in factorize(&disc).factors() {
        let ell = p.to_u64().expect("bad prime exceeds u64");
        let data = local_data(e, ell);
        if data.reduction != ReductionType::Good {
            c *= BigUint::from(data.tamagawa);
        }
    }
    c
}

/// #E~(F_q) for q = ell or ell², from the trace at ell.
pub fn reduced_curve_order(e: &EllipticCurveQ, ell: u64, degree: u32) -> Result<BigInt, CurveError> {
    let a = trace_of_frobenius(e, ell)?;
    let ell = BigInt::from(ell);
    match degree {
        1 => Ok(&ell + 1 - a),
        // #E(F_{ell²}) = ell² + 1 − (a² − 2·ell)
        2 => Ok(&ell * &ell + 1 - (BigInt::from(a) * a - 2 * &ell)),
        _ => panic!("only degrees 1 and 2 are supported"),
    }
}

/// True iff p does not divide #E~(F_q), q = ell^degree.
pub fn reduced_curve_p_torsion_trivial(
    e: &EllipticCurveQ,
    ell: u64,
    degree: u32,
    p: u64,
) -> Result<bool, CurveError> {
    let order = reduced_curve_order(e, ell, degree)?;
    Ok(!(order % BigInt::from(p)).is_zero())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TorsionEvidence {
    VerifiedTrivial,
    Inconclusive,
}

/// One-sided test that E(K)[p] = 0 via E(K)[p] ↪ E(Q)[p] ⊕ E^(d)(Q)[p].
///
/// Samples the first 20 good primes q below 1000 with q ∤ 2·p·Δ·disc(K) and
/// accumulates gcds of #E(F_q) and #E^(d)(F_q) (the latter through the
/// twisted trace χ_d(q)·a_q).  If p divides neither gcd the torsion p-part
/// is provably trivial; otherwise the test is inconclusive, never a
/// nontriviality claim.
pub fn torsion_p_trivial_over_k(
    e: &EllipticCurveQ,
    k: &ImagQuadField,
    p: u64,
) -> Result<TorsionEvidence, CurveError> {
    const NEEDED: usize = 20;
    const BOUND: u64 = 1000;
    let disc_e = e.discriminant();
    let disc_k = k.disc();
    let mut gcd_e = BigInt::zero();
    let mut gcd_tw = BigInt::zero();
    let mut used = 0usize;
    for q in 2..BOUND {
        if !arith::is_prime_u64(q) {
            continue;
        }
        let qb = BigInt::from(q);
        if q == 2
            || q == p
            || (&disc_e % &qb).is_zero()
            || (disc_k % &qb).is_zero()
        {
            continue;
        }
        let a = trace_of_frobenius(e, q)?;
        let chi_d = arith::kronecker(disc_k, &qb) as i64;
        gcd_e = gcd_e.gcd(&(&qb + 1 - a));
        gcd_tw = gcd_tw.gcd(&(&qb + 1 - chi_d * a));
        used += 1;
        if used == NEEDED {
            break;
        }
    }
    if used < NEEDED {
        return Err(CurveError::InsufficientPrimes {
            needed: NEEDED,
            bound: BOUND,
        });
    }
    let p = BigInt::from(p);
    if !(gcd_e % &p).is_zero() && !(gcd_tw % &p).is_zero() {
        Ok(TorsionEvidence::VerifiedTrivial)
    } else {
        Ok(TorsionEvidence::Inconclusive)
    }
}

/// Quadratic twist by d, on the short model y² = x³ − 27·c4·d²·x − 54·c6·d³.
/// Isomorphic to E for d = 1; traces at good odd ell ∤ 6d satisfy
/// a_ell(E^d) = (d|ell)·a_ell(E).
pub fn quadratic_twist(e: &EllipticCurveQ, d: i64) -> EllipticCurveQ {
    let d = BigInt::from(d);
    EllipticCurveQ {
        a1: BigInt::zero(),
        a2: BigInt::zero(),
        a3: BigInt::zero(),
        a4: -27 * e.c4() * &d * &d,
        a6: -54 * e.c6() * &d * &d * &d,
        label: None,
    }
}
