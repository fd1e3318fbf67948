//! Exact integer, modular, and polynomial-over-F_p arithmetic.
//!
//! Everything downstream (Tate's algorithm, class numbers, Euler factors)
//! sits on top of the primitives in this module: deterministic integer
//! factorization, the Kronecker symbol, and dense polynomials over F_p.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use once_cell::sync::Lazy;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArithError {
    #[error("the zero polynomial has no root multiplicity")]
    ZeroPolynomial,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("residue {residue} is not reduced mod {p}")]
    UnreducedResidue { residue: u64, p: u64 },
}

/// Primes below 2^16, enough trial divisors to clear any 32-bit cofactor
/// and to seed Pollard rho for the rest.
static SMALL_PRIMES: Lazy<Vec<u64>> = Lazy::new(|| {
    let bound = 1usize << 16;
    let mut sieve = vec![true; bound];
    sieve[0] = false;
    sieve[1] = false;
    for i in 2..bound {
        if sieve[i] {
            let mut j = i * i;
            while j < bound {
                sieve[j] = false;
                j += i;
            }
        }
    }
    (2..bound).filter(|&i| sieve[i]).map(|i| i as u64).collect()
});

/// A positive integer together with its sorted prime factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeFactorization {
    value: BigUint,
    factors: Vec<(BigUint, u32)>,
}

impl PrimeFactorization {
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    /// Factor list, primes strictly increasing.
    pub fn factors(&self) -> &[(BigUint, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// Prime divisors as machine integers; `None` if any prime exceeds u64.
    pub fn prime_divisors_u64(&self) -> Option<Vec<u64>> {
        self.factors.iter().map(|(p, _)| p.to_u64()).collect()
    }

    /// (prime, exponent) pairs as machine integers; `None` on overflow.
    pub fn factors_u64(&self) -> Option<Vec<(u64, u32)>> {
        self.factors
            .iter()
            .map(|(p, e)| p.to_u64().map(|p| (p, *e)))
            .collect()
    }

    pub fn exponent_of(&self, prime: u64) -> u32 {
        let p = BigUint::from(prime);
        self.factors
            .iter()
            .find(|(q, _)| *q == p)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    /// Rebuild the value from the factor list (used by round-trip tests).
    pub fn reconstruct(&self) -> BigUint {
        let mut acc = BigUint::one();
        for (p, e) in &self.factors {
            acc *= p.pow(*e);
        }
        acc
    }
}

fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod_u64(acc, base, m);
        }
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for u64 (the twelve-base set is exact for
/// anything below 3.3 * 10^24, far past the 64-bit range).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Miller-Rabin with fixed bases. Deterministic for all inputs a desk-scale
/// run can produce; beyond ~3.3e24 it is (extremely reliable) probabilistic.
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    if n.is_even() {
        return false;
    }
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for &a in &[2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let a = BigUint::from(a);
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho_u64(n: u64) -> u64 {
    // Brent's cycle-finding variant with deterministic restarts.
    debug_assert!(n > 1 && !is_prime_u64(n) && n % 2 != 0);
    for c in 1u64.. {
        let f = |x: u64| (mulmod_u64(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!()
}

fn factorize_u64(mut n: u64, out: &mut Vec<(u64, u32)>) {
    for &p in SMALL_PRIMES.iter() {
        if p * p > n {
            break;
        }
        if n % p == 0 {
            let mut e = 0u32;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push((n, 1));
        return;
    }
    // Composite cofactor with no factor below 2^16: split recursively.
    let mut stack = vec![n];
    let mut extra: Vec<u64> = Vec::new();
    while let Some(m) = stack.pop() {
        if is_prime_u64(m) {
            extra.push(m);
            continue;
        }
        let d = pollard_rho_u64(m);
        stack.push(d);
        stack.push(m / d);
    }
    extra.sort_unstable();
    let mut i = 0;
    while i < extra.len() {
        let p = extra[i];
        let mut e = 0u32;
        while i < extra.len() && extra[i] == p {
            e += 1;
            i += 1;
        }
        out.push((p, e));
    }
}

fn pollard_rho_big(n: &BigUint) -> BigUint {
    let one = BigUint::one();
    for c in 1u32.. {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut d = one.clone();
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x >= y { &x - &y } else { &y - &x };
            if diff.is_zero() {
                d = n.clone();
                break;
            }
            d = diff.gcd(n);
        }
        if &d != n {
            return d;
        }
    }
    unreachable!()
}

/// Deterministic factorization: trial division, then Pollard rho with
/// Miller-Rabin certification of every reported prime.
///
/// `factorize(1)` yields the empty factor list.
pub fn factorize(n: &BigUint) -> PrimeFactorization {
    assert!(!n.is_zero(), "factorize requires n >= 1");
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut big_factors: Vec<(BigUint, u32)> = Vec::new();
    if let Some(v) = n.to_u64() {
        factorize_u64(v, &mut factors);
    } else {
        let mut rem = n.clone();
        for &p in SMALL_PRIMES.iter() {
            if rem.is_one() {
                break;
            }
            let pb = BigUint::from(p);
            if (&rem % p).is_zero() {
                let mut e = 0u32;
                while (&rem % p).is_zero() {
                    rem /= &pb;
                    e += 1;
                }
                factors.push((p, e));
            }
        }
        if !rem.is_one() {
            if let Some(v) = rem.to_u64() {
                let mut tail = Vec::new();
                factorize_u64(v, &mut tail);
                factors.extend(tail);
                factors.sort_unstable();
            } else {
                let mut stack = vec![rem];
                let mut primes: Vec<BigUint> = Vec::new();
                while let Some(m) = stack.pop() {
                    if is_prime(&m) {
                        primes.push(m);
                        continue;
                    }
                    let d = pollard_rho_big(&m);
                    let q = &m / &d;
                    stack.push(d);
                    stack.push(q);
                }
                primes.sort();
                let mut i = 0;
                while i < primes.len() {
                    let p = primes[i].clone();
                    let mut e = 0u32;
                    while i < primes.len() && primes[i] == p {
                        e += 1;
                        i += 1;
                    }
                    big_factors.push((p, e));
                }
            }
        }
    }
    let mut all: Vec<(BigUint, u32)> = factors
        .into_iter()
        .map(|(p, e)| (BigUint::from(p), e))
        .collect();
    all.extend(big_factors);
    all.sort_by(|a, b| a.0.cmp(&b.0));
    PrimeFactorization {
        value: n.clone(),
        factors: all,
    }
}

/// Euler totient via the factorization of n.
pub fn euler_phi(n: &BigUint) -> BigUint {
    let f = factorize(n);
    let mut acc = BigUint::one();
    for (p, e) in f.factors() {
        acc *= p.pow(e - 1) * (p - BigUint::one());
    }
    acc
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero(), "valuation of zero is undefined");
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0u32;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// Kronecker symbol (a|n), extending the Jacobi symbol to all integers n.
pub fn kronecker(a: &BigInt, n: &BigInt) -> i32 {
    if n.is_zero() {
        return if a.abs().is_one() { 1 } else { 0 };
    }
    let mut result = 1i32;
    let mut a = a.clone();
    let mut n = n.clone();
    if n.is_negative() {
        n = -n;
        if a.is_negative() {
            result = -result;
        }
    }
    // peel off the even part of n
    let e = n.trailing_zeros().unwrap_or(0);
    n >>= e;
    if e > 0 {
        if a.is_even() {
            return 0;
        }
        if e % 2 == 1 {
            let r = (&a % 8i32 + 8i32) % 8i32;
            let r = r.to_i64().unwrap();
            if r == 3 || r == 5 {
                result = -result;
            }
        }
    }
    // Jacobi loop on odd positive n
    a = a.mod_floor(&n);
    while !a.is_zero() {
        let t = a.trailing_zeros().unwrap_or(0);
        a >>= t;
        if t % 2 == 1 {
            let r = (&n % 8i32).to_i64().unwrap();
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % 4i32).to_i64().unwrap() == 3 && (&n % 4i32).to_i64().unwrap() == 3 {
            result = -result;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

/// Convenience wrapper for machine-sized arguments.
pub fn kronecker_i64(a: i64, n: i64) -> i32 {
    kronecker(&BigInt::from(a), &BigInt::from(n))
}

pub fn inv_mod_u64(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    powmod_u64(a % p, p - 2, p)
}

pub fn pow_mod_u64(base: u64, exp: u64, m: u64) -> u64 {
    powmod_u64(base, exp, m)
}

/// Dense polynomial over F_p, constant term first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyModP {
    p: u64,
    coeffs: Vec<u64>,
}

impl PolyModP {
    /// Build from residues, trimming trailing zeros.
    pub fn new(p: u64, coeffs: Vec<u64>) -> Result<Self, ArithError> {
        if !is_prime_u64(p) {
            return Err(ArithError::NotPrime(p));
        }
        for &c in &coeffs {
            if c >= p {
                return Err(ArithError::UnreducedResidue { residue: c, p });
            }
        }
        let mut coeffs = coeffs;
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Ok(PolyModP { p, coeffs })
    }

    /// Build from signed integers, reducing mod p.
    pub fn from_signed(p: u64, coeffs: &[i64]) -> Result<Self, ArithError> {
        if !is_prime_u64(p) {
            return Err(ArithError::NotPrime(p));
        }
        let reduced = coeffs
            .iter()
            .map(|&c| (c.rem_euclid(p as i64)) as u64)
            .collect();
        PolyModP::new(p, reduced)
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of a nonzero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn eval(&self, x: u64) -> u64 {
        let p = self.p as u128;
        let x = (x % self.p) as u128;
        let mut acc: u128 = 0;
        for &c in self.coeffs.iter().rev() {
            acc = (acc * x + c as u128) % p;
        }
        acc as u64
    }

    pub fn mul(&self, other: &PolyModP) -> PolyModP {
        assert_eq!(self.p, other.p);
        if self.is_zero() || other.is_zero() {
            return PolyModP {
                p: self.p,
                coeffs: vec![],
            };
        }
        let p = self.p as u128;
        let mut out = vec![0u128; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a as u128 * b as u128) % p;
            }
        }
        PolyModP::new(self.p, out.into_iter().map(|c| c as u64).collect()).unwrap()
    }

    /// Synthetic division by (X - x0): returns (quotient, remainder).
    pub fn divide_by_linear(&self, x0: u64) -> (PolyModP, u64) {
        assert!(!self.is_zero());
        let p = self.p as u128;
        let x0 = (x0 % self.p) as u128;
        let mut quotient = vec![0u64; self.coeffs.len() - 1];
        let mut carry: u128 = 0;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            let v = (carry * x0 + c as u128) % p;
            if i == 0 {
                return (
                    PolyModP::new(self.p, quotient).unwrap(),
                    v as u64,
                );
            }
            quotient[i - 1] = v as u64;
            carry = v;
        }
        unreachable!()
    }

    /// Largest m with (X - x0)^m dividing self, by repeated synthetic division.
    pub fn root_multiplicity(&self, x0: u64) -> Result<u32, ArithError> {
        if self.is_zero() {
            return Err(ArithError::ZeroPolynomial);
        }
        let mut m = 0u32;
        let mut cur = self.clone();
        loop {
            if cur.degree().is_none() {
                // nonzero constant
                return Ok(m);
            }
            let (q, r) = cur.divide_by_linear(x0);
            if r != 0 {
                return Ok(m);
            }
            m += 1;
            cur = q;
            if cur.is_zero() {
                return Ok(m);
            }
        }
    }
}
