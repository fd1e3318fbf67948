//! Tate's algorithm: reduction type, conductor exponent, Tamagawa number.
//!
//! The implementation follows the classical step structure, including the
//! I_nu* subprocedure and the non-minimality restart, so inputs need not be
//! minimal at the prime under consideration.  Component counts are derived
//! from rationality of roots of the relevant quadratics/cubic over F_p; all
//! root finding is by direct scan, which is exact in every characteristic
//! (including 2 and 3, where discriminant tests break down).

use super::{red, vp, EllipticCurveQ, LocalReductionData, ReductionType};
use crate::arith::PolyModP;
use num_bigint::BigInt;
use num_traits::Zero;

pub fn local_data(e: &EllipticCurveQ, ell: u64) -> LocalReductionData {
    tate_full(e, ell).0
}

/// Runs Tate's algorithm, restarting on non-minimal models; also returns the
/// model actually classified (minimal at ell, possibly translated).
pub(crate) fn tate_full(e: &EllipticCurveQ, ell: u64) -> (LocalReductionData, EllipticCurveQ) {
    let mut cur = e.clone();
    loop {
        match tate_once(&cur, ell) {
            Step::Done(data) => return (data, cur),
            Step::Restart(smaller) => cur = smaller,
        }
    }
}

enum Step {
    Done(LocalReductionData),
    Restart(EllipticCurveQ),
}

/// Valuation with v(0) treated as +infinity.
fn val0(n: &BigInt, p: u64) -> u32 {
    if n.is_zero() {
        u32::MAX
    } else {
        vp(n, p)
    }
}

fn ppow(p: u64, e: u32) -> BigInt {
    BigInt::from(p).pow(e)
}

fn exdiv(n: &BigInt, p: u64, e: u32) -> BigInt {
    let d = ppow(p, e);
    debug_assert!((n % &d).is_zero());
    n / d
}

/// Distinct rational roots and (if any) the repeated rational root of a
/// polynomial over F_p.  For quadratics and cubics every repeated root in an
/// algebraic closure is already rational, so `repeated == None` certifies
/// separability.
struct RootInfo {
    roots: Vec<u64>,
    repeated: Option<(u64, u32)>,
}

fn analyze_roots(coeffs: Vec<u64>, p: u64) -> RootInfo {
    let f = PolyModP::new(p, coeffs).expect("scan polynomial");
    let mut roots = Vec::new();
    let mut repeated = None;
    for x in 0..p {
        if f.eval(x) == 0 {
            roots.push(x);
            let m = f.root_multiplicity(x).expect("nonzero polynomial");
            if m >= 2 {
                repeated = Some((x, m));
            }
        }
    }
    RootInfo { roots, repeated }
}

/// Singular point of the reduction mod p (requires Delta ≡ 0 mod p).
fn singular_point(e: &EllipticCurveQ, p: u64) -> (u64, u64) {
    let a1 = red(&e.a1, p) as u128;
    let a2 = red(&e.a2, p) as u128;
    let a3 = red(&e.a3, p) as u128;
    let a4 = red(&e.a4, p) as u128;
    let a6 = red(&e.a6, p) as u128;
    let m = p as u128;
    let f = |x: u128, y: u128| -> u128 {
        let rhs = ((x * x % m) * x % m + a2 * (x * x % m) % m + a4 * x % m + a6) % m;
        let lhs = (y * y % m + a1 * x % m * y % m + a3 * y % m) % m;
        (lhs + m - rhs) % m
    };
    if p == 2 {
        for x in 0..2u128 {
            for y in 0..2u128 {
                let fx = (x * x + a4 + a1 * y) % 2; // 3x²+2a2x+a4−a1y mod 2
                let fy = (a1 * x + a3) % 2;
                if f(x, y) == 0 && fx == 0 && fy == 0 {
                    return (x as u64, y as u64);
                }
            }
        }
    } else {
        let inv2 = crate::arith::inv_mod_u64(2, p) as u128;
        for x in 0..p as u128 {
            // F_y = 0 forces y = −(a1 x + a3)/2
            let y = (m - (a1 * x + a3) % m) % m * inv2 % m;
            // F_x = a1 y − 3x² − 2 a2 x − a4
            let fx =
                (a1 * y % m + m - (3 * (x * x % m) % m + 2 * a2 * x % m + a4 % m) % m) % m;
            if f(x, y) == 0 && fx == 0 {
                return (x as u64, y as u64);
            }
        }
    }
    panic!("no singular point mod {p}: reduction is not bad");
}

fn done(
    ell: u64,
    reduction: ReductionType,
    f: u32,
    c: u64,
    n: u32,
    kodaira: String,
) -> Step {
    Step::Done(LocalReductionData {
        ell,
        reduction,
        conductor_exponent: f,
        tamagawa: c,
        ord_min_disc: n,
        kodaira,
    })
}

fn tate_once(e0: &EllipticCurveQ, p: u64) -> Step {
    let n = val0(&e0.discriminant(), p);
    if n == 0 {
        return done(p, ReductionType::Good, 0, 1, 0, "I0".into());
    }

    // Step 2: translate the singular point to the origin.
    let (x0, y0) = singular_point(e0, p);
    let mut e = e0.translated(&BigInt::from(x0), &BigInt::zero(), &BigInt::from(y0));

    if red(&e.b2(), p) != 0 {
        // Multiplicative, type I_n.  Split iff the tangent quadratic
        // T² + a1·T − a2 has its roots in F_p.
        let info = analyze_roots(
            vec![(p - red(&e.a2, p)) % p, red(&e.a1, p), 1],
            p,
        );
        let split = !info.roots.is_empty();
        let (reduction, c) = if split {
            (ReductionType::SplitMultiplicative, n as u64)
        } else {
            (
                ReductionType::NonsplitMultiplicative,
                if n % 2 == 0 { 2 } else { 1 },
            )
        };
        return done(p, reduction, 1, c, n, format!("I{n}"));
    }

    // Step 3: type II.
    if val0(&e.a6, p) < 2 {
        return done(p, ReductionType::Additive, n, 1, n, "II".into());
    }
    // Step 4: type III.
    if val0(&e.b8(), p) < 3 {
        return done(p, ReductionType::Additive, n - 1, 2, n, "III".into());
    }
    // Step 5: type IV; c from Y² + a3/p·Y − a6/p².
    if val0(&e.b6(), p) < 3 {
        let c0 = red(&-exdiv(&e.a6, p, 2), p);
        let info = analyze_roots(vec![c0, red(&exdiv(&e.a3, p, 1), p), 1], p);
        let c = if info.roots.is_empty() { 1 } else { 3 };
        return done(p, ReductionType::Additive, n - 2, c, n, "IV".into());
    }

    // Step 6 normalization: arrange p | a1,a2, p² | a3,a4, p³ | a6.
    if p == 2 {
        let mut found = false;
        'search: for s in 0..2i64 {
            for t in 0..4i64 {
                let cand = e.translated(&BigInt::zero(), &BigInt::from(s), &BigInt::from(t));
                if val0(&cand.a1, 2) >= 1
                    && val0(&cand.a2, 2) >= 1
                    && val0(&cand.a3, 2) >= 2
                    && val0(&cand.a4, 2) >= 2
                    && val0(&cand.a6, 2) >= 3
                {
                    e = cand;
                    found = true;
                    break 'search;
                }
            }
        }
        assert!(found, "step-6 normalization must exist after steps 3-5");
    } else {
        let inv2 = crate::arith::inv_mod_u64(2, p);
        let s = (p - red(&e.a1, p)) % p * inv2 % p;
        e = e.translated(&BigInt::zero(), &BigInt::from(s), &BigInt::zero());
        let p2 = p as u128 * p as u128;
        let inv2_p2 = {
            // inverse of 2 mod p² for odd p is (p²+1)/2
            (p2 + 1) / 2
        };
        let a3_mod = {
            let m = BigInt::from(p2);
            let r = num_integer::Integer::mod_floor(&e.a3, &m);
            num_traits::ToPrimitive::to_u128(&r).unwrap()
        };
        let t = (p2 - a3_mod) % p2 * inv2_p2 % p2;
        e = e.translated(&BigInt::zero(), &BigInt::zero(), &BigInt::from(t));
    }
    debug_assert!(val0(&e.a1, p) >= 1 && val0(&e.a2, p) >= 1);
    debug_assert!(val0(&e.a3, p) >= 2 && val0(&e.a4, p) >= 2 && val0(&e.a6, p) >= 3);

    // Step 7: the cubic P(T) = T³ + a2/p·T² + a4/p²·T + a6/p³ over F_p.
    let cubic = analyze_roots(
        vec![
            red(&exdiv(&e.a6, p, 3), p),
            red(&exdiv(&e.a4, p, 2), p),
            red(&exdiv(&e.a2, p, 1), p),
            1,
        ],
        p,
    );
    match cubic.repeated {
        None => {
            // Separable cubic: type I0*.
            let c = 1 + cubic.roots.len() as u64;
            done(p, ReductionType::Additive, n - 4, c, n, "I0*".into())
        }
        Some((r0, 2)) => {
            // Double root: type I_m* subprocedure.
            e = e.translated(&(BigInt::from(p) * r0), &BigInt::zero(), &BigInt::zero());
            debug_assert_eq!(val0(&e.a2, p), 1);
            let mut m = 1u32;
            let mut xe = 2u32;
            let mut ye = 2u32;
            loop {
                // Y² + a3/p^ye · Y − a6/p^(xe+ye)
                let qy = analyze_roots(
                    vec![
                        (p - red(&exdiv(&e.a6, p, xe + ye), p)) % p,
                        red(&exdiv(&e.a3, p, ye), p),
                        1,
                    ],
                    p,
                );
                match qy.repeated {
                    None => {
                        let c = if qy.roots.is_empty() { 2 } else { 4 };
                        return done(
                            p,
                            ReductionType::Additive,
                            n - m - 4,
                            c,
                            n,
                            format!("I{m}*"),
                        );
                    }
                    Some((yy, _)) => {
                        e = e.translated(
                            &BigInt::zero(),
                            &BigInt::zero(),
                            &(ppow(p, ye) * yy),
                        );
                        m += 1;
                    }
                }
                // a2/p · X² + a4/p^(xe+1) · X + a6/p^(xe+ye+1)
                let qx = analyze_roots(
                    vec![
                        red(&exdiv(&e.a6, p, xe + ye + 1), p),
                        red(&exdiv(&e.a4, p, xe + 1), p),
                        red(&exdiv(&e.a2, p, 1), p),
                    ],
                    p,
                );
                match qx.repeated {
                    None => {
                        let c = if qx.roots.is_empty() { 2 } else { 4 };
                        return done(
                            p,
                            ReductionType::Additive,
                            n - m - 4,
                            c,
                            n,
                            format!("I{m}*"),
                        );
                    }
                    Some((xx, _)) => {
                        e = e.translated(
                            &(ppow(p, xe) * xx),
                            &BigInt::zero(),
                            &BigInt::zero(),
                        );
                        m += 1;
                        xe += 1;
                        ye += 1;
                    }
                }
            }
        }
        Some((r0, _)) => {
            // Triple root: steps 8-11.
            e = e.translated(&(BigInt::from(p) * r0), &BigInt::zero(), &BigInt::zero());
            debug_assert!(val0(&e.a2, p) >= 2 && val0(&e.a4, p) >= 3 && val0(&e.a6, p) >= 4);
            // Step 8: Y² + a3/p²·Y − a6/p⁴.
            let qy = analyze_roots(
                vec![
                    (p - red(&exdiv(&e.a6, p, 4), p)) % p,
                    red(&exdiv(&e.a3, p, 2), p),
                    1,
                ],
                p,
            );
            match qy.repeated {
                None => {
                    let c = if qy.roots.is_empty() { 1 } else { 3 };
                    done(p, ReductionType::Additive, n - 6, c, n, "IV*".into())
                }
                Some((yy, _)) => {
                    e = e.translated(&BigInt::zero(), &BigInt::zero(), &(ppow(p, 2) * yy));
                    // Step 9: type III*.
                    if val0(&e.a4, p) < 4 {
                        return done(p, ReductionType::Additive, n - 7, 2, n, "III*".into());
                    }
                    // Step 10: type II*.
                    if val0(&e.a6, p) < 6 {
                        return done(p, ReductionType::Additive, n - 8, 1, n, "II*".into());
                    }
                    // Step 11: the model was not minimal at p.
                    Step::Restart(e.rescaled_down(p))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{conductor, tamagawa_product, trace_of_frobenius};
    use num_traits::ToPrimitive;

    fn curve(ai: [i64; 5]) -> EllipticCurveQ {
        EllipticCurveQ::from_i64(ai, None).unwrap()
    }

    fn data(ai: [i64; 5], p: u64) -> LocalReductionData {
        local_data(&curve(ai), p)
    }

    #[test]
    fn good_reduction() {
        let d = data([0, 0, 1, -1, 0], 5);
        assert_eq!(d.reduction, ReductionType::Good);
        assert_eq!(d.conductor_exponent, 0);
        assert_eq!(d.tamagawa, 1);
        assert_eq!(d.kodaira, "I0");
    }

    #[test]
    fn multiplicative_types() {
        // 11a1: split multiplicative I5 at 11, c = 5
        let d = data([0, -1, 1, -10, -20], 11);
        assert_eq!(d.reduction, ReductionType::SplitMultiplicative);
        assert_eq!((d.conductor_exponent, d.tamagawa, d.ord_min_disc), (1, 5, 5));
        assert_eq!(d.kodaira, "I5");
        // 11a3: split multiplicative I1 at 11
        let d = data([0, -1, 1, 0, 0], 11);
        assert_eq!(d.reduction, ReductionType::SplitMultiplicative);
        assert_eq!((d.tamagawa, d.ord_min_disc), (1, 1));
        // 37b1: Delta = 37³, split at 37 (tangent slopes ±5), c = 3
        let d = data([0, 1, 1, -23, -50], 37);
        assert_eq!(d.reduction, ReductionType::SplitMultiplicative);
        assert_eq!((d.tamagawa, d.ord_min_disc), (3, 3));
        // 17a1: Delta = −17⁴, ord 4
        let d = data([1, -1, 1, -1, -14], 17);
        assert!(d.reduction.is_multiplicative());
        assert_eq!(d.ord_min_disc, 4);
        if d.reduction == ReductionType::NonsplitMultiplicative {
            assert_eq!(d.tamagawa, 2);
        } else {
            assert_eq!(d.tamagawa, 4);
        }
    }

    #[test]
    fn additive_small_primes() {
        // 27a1: additive at 3, Delta = −3⁹, conductor 27
        let d = data([0, 0, 1, 0, -7], 3);
        assert_eq!(d.reduction, ReductionType::Additive);
        assert_eq!(d.conductor_exponent, 3);
        assert!(d.tamagawa <= 4);
        // 32a: additive at 2, conductor 32
        let d = data([0, 0, 0, -1, 0], 2);
        assert_eq!(d.reduction, ReductionType::Additive);
        assert_eq!(d.conductor_exponent, 5);
        // 14a1: multiplicative at both 2 and 7
        for p in [2u64, 7] {
            assert!(data([1, 0, 1, 4, -6], p).reduction.is_multiplicative());
        }
    }

    #[test]
    fn kodaira_ladder_at_five() {
        // y² = x³ + 5^k walks through the additive ladder at p = 5.
        let expect = [
            (1u32, "II", 2u32),
            (2, "IV", 2),
            (3, "I0*", 2),
            (4, "IV*", 2),
        ];
        for (k, sym, f) in expect {
            let e = EllipticCurveQ::new(
                0.into(),
                0.into(),
                0.into(),
                0.into(),
                BigInt::from(5).pow(k),
                None,
            )
            .unwrap();
            let d = local_data(&e, 5);
            assert_eq!(d.kodaira, sym, "k = {k}");
            assert_eq!(d.conductor_exponent, f, "k = {k}");
        }
        // y² = x³ + 5x: type III; y² = x³ + 125x: type III*
        let d = data([0, 0, 0, 5, 0], 5);
        assert_eq!(d.kodaira, "III");
        let d = data([0, 0, 0, 125, 0], 5);
        assert_eq!(d.kodaira, "III*");
        assert_eq!(d.conductor_exponent, 2);
        // y² = x³ + 5⁵: type II*
        let e = curve([0, 0, 0, 0, 3125]);
        let d = local_data(&e, 5);
        assert_eq!(d.kodaira, "II*");
        // y² = x³ + 5⁶ is non-minimal; restart lands on y² = x³ + 1, good at 5.
        let e = curve([0, 0, 0, 0, 15625]);
        let d = local_data(&e, 5);
        assert_eq!(d.reduction, ReductionType::Good);
    }

    #[test]
    fn i_nu_star_via_twist() {
        // Twisting 11a1 (I5 at 11) by 11 gives I5* at 11: f = 2, ord = 11.
        let e = curve([0, -1, 1, -10, -20]);
        let tw = crate::curves::quadratic_twist(&e, 11);
        let d = local_data(&tw, 11);
        assert_eq!(d.kodaira, "I5*");
        assert_eq!(d.reduction, ReductionType::Additive);
        assert_eq!(d.conductor_exponent, 2);
        assert!(d.tamagawa == 2 || d.tamagawa == 4);
    }

    #[test]
    fn non_minimal_multiplicative_restart() {
        // Scale 11a1 by u = 3: all reduction data must be unchanged.
        let e = curve([0, -1, 1, -10, -20]);
        let u = BigInt::from(3);
        let scaled = EllipticCurveQ::new(
            &e.a1 * &u,
            &e.a2 * &u * &u,
            &e.a3 * &u * &u * &u,
            &e.a4 * &u * &u * &u * &u,
            &e.a6 * &u * &u * &u * &u * &u * &u,
            None,
        )
        .unwrap();
        let d = local_data(&scaled, 3);
        assert_eq!(d.reduction, ReductionType::Good);
        let d = local_data(&scaled, 11);
        assert_eq!((d.tamagawa, d.ord_min_disc), (5, 5));
        // trace at 3 must come from the minimized model
        assert_eq!(
            trace_of_frobenius(&scaled, 3).unwrap(),
            trace_of_frobenius(&e, 3).unwrap()
        );
    }

    #[test]
    fn conductors_of_corpus() {
        let corpus: [([i64; 5], u64); 8] = [
            ([0, -1, 1, -10, -20], 11),
            ([1, 0, 1, 4, -6], 14),
            ([1, 1, 1, -10, -10], 15),
            ([1, -1, 1, -1, -14], 17),
            ([0, 1, 1, -769, -8470], 19),
            ([0, 0, 1, 0, -7], 27),
            ([0, 0, 0, -1, 0], 32),
            ([0, 0, 1, -1, 0], 37),
        ];
        for (ai, want) in corpus {
            let n = conductor(&curve(ai)).value().to_u64().unwrap();
            assert_eq!(n, want, "{ai:?}");
            assert!(n >= 11);
        }
    }

    #[test]
    fn tamagawa_products_of_fixture_curves() {
        assert_eq!(
            tamagawa_product(&curve([0, 1, 1, -769, -8470])).to_u64().unwrap(),
            1
        );
        assert_eq!(
            tamagawa_product(&curve([0, 1, 1, -16649, 821406]))
                .to_u64()
                .unwrap(),
            10
        );
    }
}
