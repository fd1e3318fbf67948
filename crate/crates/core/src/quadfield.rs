//! The imaginary quadratic field K = Q(√−D): class number by reduced-form
//! enumeration, prime splitting, exact arithmetic in Z[ω], and the
//! decomposition count s_ell for the anticyclotomic Z_p-extension.

use crate::arith::{factorize, is_prime_u64, kronecker};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QuadFieldError {
    #[error("D must be a squarefree positive integer, got {0}")]
    BadD(u64),
    #[error("discriminant must be negative and ≡ 0 or 1 mod 4, got {0}")]
    BadDiscriminant(i64),
    #[error("order arithmetic requires D ≡ 3 mod 4 (so that ω = (1+√−D)/2)")]
    DNotThreeModFour,
    #[error("{target} is not represented by the principal form of Q(√−{d})")]
    NoRepresentation { d: u64, target: BigUint },
    #[error("degenerate Brink computation: b* = 0 for ell = {0}")]
    DegenerateBstar(u64),
    #[error("ell = {0} is not split in K")]
    NotSplit(u64),
    #[error("p = {p} violates a Brink precondition: {reason}")]
    BadP { p: u64, reason: &'static str },
}

/// Number of primitive reduced forms (a, b, c) of the given negative
/// discriminant: b² − 4ac = disc, |b| ≤ a ≤ c, b ≥ 0 when |b| = a or a = c.
pub fn class_number(disc: i64) -> Result<u64, QuadFieldError> {
    if disc >= 0 || disc.rem_euclid(4) > 1 {
        return Err(QuadFieldError::BadDiscriminant(disc));
    }
    let mut h = 0u64;
    let mut b = disc.rem_euclid(2);
    while b * b <= -disc / 3 {
        let q = (b * b - disc) / 4; // = a·c
        let mut a = if b > 1 { b } else { 1 };
        while a * a <= q {
            if q % a == 0 {
                let c = q / a;
                if gcd3(a, b, c) == 1 {
                    h += 1;
                    // (a, −b, c) is a distinct reduced form unless b = 0,
                    // |b| = a, or a = c.
                    if b > 0 && b != a && a != c {
                        h += 1;
                    }
                }
            }
            a += 1;
        }
        b += 2;
    }
    Ok(h)
}

fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    a.gcd(&b).gcd(&c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplittingType {
    Split,
    Inert,
    Ramified,
}

/// K = Q(√−D), D squarefree.  The class number is computed once at
/// construction; the object is immutable afterwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImagQuadField {
    d: u64,
    disc: BigInt,
    class_number: u64,
}

impl ImagQuadField {
    pub fn new(d: u64) -> Result<Self, QuadFieldError> {
        if d == 0 {
            return Err(QuadFieldError::BadD(d));
        }
        if factorize(&BigUint::from(d)).factors().iter().any(|(_, e)| *e > 1) {
            return Err(QuadFieldError::BadD(d));
        }
        let disc: i64 = if d % 4 == 3 {
            -(d as i64)
        } else {
            -4 * d as i64
        };
        let h = class_number(disc)?;
        Ok(ImagQuadField {
            d,
            disc: BigInt::from(disc),
            class_number: h,
        })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn disc(&self) -> &BigInt {
        &self.disc
    }

    pub fn class_number(&self) -> u64 {
        self.class_number
    }

    /// (D+1)/4, the constant in ω² = ω − (D+1)/4; requires D ≡ 3 mod 4.
    pub fn omega_constant(&self) -> Result<BigInt, QuadFieldError> {
        if self.d % 4 != 3 {
            return Err(QuadFieldError::DNotThreeModFour);
        }
        Ok(BigInt::from((self.d + 1) / 4))
    }

    pub fn splitting_type(&self, ell: u64) -> SplittingType {
        match kronecker(&self.disc, &BigInt::from(ell)) {
            1 => SplittingType::Split,
            -1 => SplittingType::Inert,
            _ => SplittingType::Ramified,
        }
    }

    /// Writes `target = a² + ab + ((D+1)/4)·b²` with gcd(a, b) = 1.
    ///
    /// The form is the norm of a + bω, so a proper (primitive) solution is a
    /// generator datum for a primitive ideal of that norm.  Among solutions
    /// the one with smallest |b| is returned, ties broken by a ≥ 0; when
    /// `avoid_p` is set, solutions with p ∤ b are preferred over all others.
    pub fn norm_form_representation(
        &self,
        target: &BigUint,
        avoid_p: Option<u64>,
    ) -> Result<(BigInt, BigInt), QuadFieldError> {
        self.omega_constant()?;
        let d = BigInt::from(self.d);
        let target = BigInt::from(target.clone());
        // 4·target = (2a + b)² + D·b², so |b| ≤ √(4·target/D).
        let four_t: BigInt = 4 * &target;
        let mut best: Option<(BigInt, BigInt)> = None;
        // Preference order: p ∤ b first (when configured), then smallest |b|,
        // then nonnegative a before negative, then smallest |a|.
        let rank = |a: &BigInt, b: &BigInt| -> (bool, BigInt, bool, BigInt) {
            let p_bad = match avoid_p {
                Some(p) => (b % BigInt::from(p)).is_zero(),
                None => false,
            };
            (p_bad, b.abs(), a.is_negative(), a.abs())
        };
        let mut b = BigInt::zero();
        loop {
            let rem = &four_t - &d * &b * &b;
            if rem.is_negative() {
                break;
            }
            let s = rem.sqrt();
            if &s * &s == rem {
                // 2a + b = ±s
                for sign in [1i64, -1] {
                    let num = sign * &s - &b;
                    if (&num % 2i32).is_zero() {
                        let a: BigInt = num / 2;
                        if a.gcd(&b).is_one() {
                            let cand = (a, b.clone());
                            let better = match &best {
                                None => true,
                                Some((ba, bb)) => rank(&cand.0, &cand.1) < rank(ba, bb),
                            };
                            if better {
                                best = Some(cand);
                            }
                        }
                    }
                }
            }
            if b.is_positive() {
                b = -b;
            } else {
                b = BigInt::one() - b;
            }
        }
        best.ok_or(QuadFieldError::NoRepresentation {
            d: self.d,
            target: target.to_biguint().unwrap(),
        })
    }
}

/// x + yω in the maximal order of K, for D ≡ 3 mod 4 (ω = (1+√−D)/2).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadInt {
    pub x: BigInt,
    pub y: BigInt,
}

impl QuadInt {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>) -> Self {
        QuadInt {
            x: x.into(),
            y: y.into(),
        }
    }

    pub fn one() -> Self {
        QuadInt::new(1, 0)
    }

    /// Product using ω² = ω − c, c = (D+1)/4.
    pub fn mul(&self, other: &QuadInt, k: &ImagQuadField) -> Result<QuadInt, QuadFieldError> {
        let c = k.omega_constant()?;
        let yy = &self.y * &other.y;
        Ok(QuadInt {
            x: &self.x * &other.x - &c * &yy,
            y: &self.x * &other.y + &self.y * &other.x + yy,
        })
    }

    /// N(x + yω) = x² + xy + ((D+1)/4)·y².
    pub fn norm(&self, k: &ImagQuadField) -> Result<BigInt, QuadFieldError> {
        let c = k.omega_constant()?;
        Ok(&self.x * &self.x + &self.x * &self.y + c * &self.y * &self.y)
    }

    /// Exact power by square-and-multiply.
    pub fn pow(&self, n: u64, k: &ImagQuadField) -> Result<QuadInt, QuadFieldError> {
        let mut acc = QuadInt::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base, k)?;
            }
            base = base.mul(&base, k)?;
            n >>= 1;
        }
        Ok(acc)
    }
}

/// Serializes big integers as decimal strings so JSON reports stay
/// readable and stable.
mod bigint_string {
    use num_bigint::BigInt;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(de::Error::custom)
    }

    pub mod pair {
        use super::*;
        use serde::ser::SerializeTuple;

        pub fn serialize<S: Serializer>(
            v: &(BigInt, BigInt),
            s: S,
        ) -> Result<S::Ok, S::Error> {
            let mut t = s.serialize_tuple(2)?;
            t.serialize_element(&v.0.to_string())?;
            t.serialize_element(&v.1.to_string())?;
            t.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<(BigInt, BigInt), D::Error> {
            let (a, b) = <(String, String)>::deserialize(d)?;
            Ok((
                a.parse().map_err(de::Error::custom)?,
                b.parse().map_err(de::Error::custom)?,
            ))
        }
    }
}

/// Brink's recipe output for a split prime ell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrinkResult {
    pub ell: u64,
    /// (a, b) with a² + ab + ((D+1)/4)b² = ell^h_K, gcd(a, b) = 1.
    #[serde(with = "bigint_string::pair")]
    pub rep: (BigInt, BigInt),
    #[serde(with = "bigint_string")]
    pub astar: BigInt,
    #[serde(with = "bigint_string")]
    pub bstar: BigInt,
    /// t = v_p(b*).
    pub t: u32,
    /// s_ell = p^max(0, t−1): the number of primes of K_∞ above ell.
    pub s_ell: u64,
    /// Set when t = 0, a case the recipe does not explicitly cover; the
    /// returned s_ell = 1 is then a best-effort reading, not a certainty.
    pub warning_t_zero: bool,
    /// Set when h_K ≠ 2; the recipe is applied verbatim beyond the class
    /// number it was stated for.
    pub recipe_based: bool,
}

/// Number of primes of the anticyclotomic Z_p-extension above a split ell:
/// write ell^h_K = N(a + bω) primitively, raise to the (p−1)-st power to get
/// a* + b*ω, and set s_ell = p^max(0, v_p(b*)−1).
pub fn brink_s_ell(k: &ImagQuadField, ell: u64, p: u64) -> Result<BrinkResult, QuadFieldError> {
    assert!(is_prime_u64(ell) && is_prime_u64(p));
    if k.splitting_type(ell) != SplittingType::Split {
        return Err(QuadFieldError::NotSplit(ell));
    }
    if k.splitting_type(p) != SplittingType::Split {
        return Err(QuadFieldError::BadP {
            p,
            reason: "p must be split in K",
        });
    }
    if k.class_number() % p == 0 {
        return Err(QuadFieldError::BadP {
            p,
            reason: "p must not divide the class number",
        });
    }
    let h = k
        .class_number()
        .to_u32()
        .expect("class number fits in u32");
    let target = BigUint::from(ell).pow(h);
    let (a, b) = k.norm_form_representation(&target, Some(p))?;
    let z = QuadInt {
        x: a.clone(),
        y: b.clone(),
    };
    let w = z.pow(p - 1, k)?;
    if w.y.is_zero() {
        return Err(QuadFieldError::DegenerateBstar(ell));
    }
    let t = crate::arith::valuation(&w.y, p);
    let s_ell = p.checked_pow(t.saturating_sub(1)).expect("s_ell overflow");
    Ok(BrinkResult {
        ell,
        rep: (a, b),
        astar: w.x.clone(),
        bstar: w.y.clone(),
        t,
        s_ell,
        warning_t_zero: t == 0,
        recipe_based: k.class_number() != 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k51() -> ImagQuadField {
        ImagQuadField::new(51).unwrap()
    }

    #[test]
    fn class_numbers() {
        assert_eq!(class_number(-51).unwrap(), 2);
        assert_eq!(class_number(-3).unwrap(), 1);
        assert_eq!(class_number(-4).unwrap(), 1);
        assert_eq!(class_number(-23).unwrap(), 3);
        assert_eq!(class_number(-47).unwrap(), 5);
        assert_eq!(class_number(-163).unwrap(), 1);
        assert!(class_number(-5).is_err());
        assert!(class_number(5).is_err());
    }

    #[test]
    fn field_construction() {
        let k = k51();
        assert_eq!(k.disc(), &BigInt::from(-51));
        assert_eq!(k.class_number(), 2);
        assert_eq!(k.omega_constant().unwrap(), BigInt::from(13));
        assert!(ImagQuadField::new(12).is_err()); // not squarefree
        let k5 = ImagQuadField::new(5).unwrap();
        assert_eq!(k5.disc(), &BigInt::from(-20));
        assert!(k5.omega_constant().is_err());
    }

    #[test]
    fn splitting() {
        let k = k51();
        assert_eq!(k.splitting_type(5), SplittingType::Split);
        assert_eq!(k.splitting_type(17), SplittingType::Ramified);
        assert_eq!(k.splitting_type(3), SplittingType::Ramified);
        assert_eq!(k.splitting_type(19), SplittingType::Split);
        assert_eq!(k.splitting_type(43), SplittingType::Split);
        assert_eq!(k.splitting_type(2), SplittingType::Inert);
    }

    #[test]
    fn representations() {
        let k = k51();
        assert_eq!(
            k.norm_form_representation(&BigUint::from(1849u32), Some(5))
                .unwrap(),
            (BigInt::from(12), BigInt::from(11))
        );
        assert_eq!(
            k.norm_form_representation(&BigUint::from(13u32), None).unwrap(),
            (BigInt::from(0), BigInt::from(1))
        );
        assert_eq!(
            k.norm_form_representation(&BigUint::from(1u32), None).unwrap(),
            (BigInt::from(1), BigInt::from(0))
        );
        assert!(k
            .norm_form_representation(&BigUint::from(2u32), None)
            .is_err());
    }

    #[test]
    fn quadint_arithmetic() {
        let k = k51();
        let z = QuadInt::new(12, 11);
        let z2 = z.pow(2, &k).unwrap();
        assert_eq!(z2, QuadInt::new(-1429, 385));
        let z4 = z.pow(4, &k).unwrap();
        assert_eq!(z4, QuadInt::new(115116, -952105i64));
        assert_eq!(z.pow(0, &k).unwrap(), QuadInt::one());
        // norm multiplicativity on the same values
        assert_eq!(
            z4.norm(&k).unwrap(),
            z.norm(&k).unwrap().pow(4)
        );
        assert_eq!(z.norm(&k).unwrap(), BigInt::from(1849));
    }

    #[test]
    fn brink_at_43_and_19() {
        let k = k51();
        let r = brink_s_ell(&k, 43, 5).unwrap();
        assert_eq!(r.rep, (BigInt::from(12), BigInt::from(11)));
        assert_eq!(r.bstar, BigInt::from(-952105i64));
        assert_eq!(r.astar, BigInt::from(115116));
        assert_eq!(r.t, 1);
        assert_eq!(r.s_ell, 1);
        assert!(!r.warning_t_zero);
        assert!(!r.recipe_based);

        let r = brink_s_ell(&k, 19, 5).unwrap();
        assert_eq!(r.s_ell, 1);

        assert_eq!(brink_s_ell(&k, 17, 5), Err(QuadFieldError::NotSplit(17)));
        assert!(matches!(
            brink_s_ell(&k, 43, 3),
            Err(QuadFieldError::BadP { p: 3, .. })
        ));
    }
}
