//! Euler factors, local invariants d_ell and lambda_ell = s_ell·d_ell,
//! hypothesis verification, the lambda-transfer identity, and the local
//! cokernel-dimension diagnostic at multiplicative primes.

use crate::arith::{self, PolyModP};
use crate::curves::{
    self, local_data, EllipticCurveQ, ReductionType, TorsionEvidence,
};
use crate::forms::FormSource;
use crate::quadfield::{brink_s_ell, BrinkResult, ImagQuadField, QuadFieldError, SplittingType};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IwasawaError {
    #[error("ell = p = {0} is excluded from local Euler-factor data")]
    EllEqualsP(u64),
    #[error("ell = {0} is not split in K")]
    NotSplit(u64),
    #[error("no coefficient available at ell = {0}")]
    MissingCoefficient(u64),
    #[error("certificate is missing the field `{0}`")]
    MissingCertificate(&'static str),
    #[error("inconsistent invariants: {0}")]
    InconsistentInvariants(String),
    #[error(transparent)]
    Quad(#[from] QuadFieldError),
    #[error(transparent)]
    Curve(#[from] curves::CurveError),
    #[error(transparent)]
    Arith(#[from] arith::ArithError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorKind {
    Good,
    BadMultiplicative,
    BadAdditive,
}

impl FactorKind {
    pub fn from_reduction(r: ReductionType) -> FactorKind {
        match r {
            ReductionType::Good => FactorKind::Good,
            ReductionType::SplitMultiplicative | ReductionType::NonsplitMultiplicative => {
                FactorKind::BadMultiplicative
            }
            ReductionType::Additive => FactorKind::BadAdditive,
        }
    }
}

/// The local Euler factor P_v(f)(X) reduced mod p:
/// 1 − a_ell·X + ell·X² (good), 1 − a_ell·X (multiplicative), 1 (additive).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerFactorData {
    pub ell: u64,
    pub kind: FactorKind,
    pub a_ell: BigInt,
    pub poly: PolyModP,
}

pub fn euler_factor(
    a_ell: &BigInt,
    ell: u64,
    kind: FactorKind,
    p: u64,
) -> Result<EulerFactorData, IwasawaError> {
    if ell == p {
        return Err(IwasawaError::EllEqualsP(ell));
    }
    let neg_a = (-a_ell).mod_floor(&BigInt::from(p)).to_u64().unwrap();
    let coeffs = match kind {
        FactorKind::Good => vec![1 % p, neg_a, ell % p],
        FactorKind::BadMultiplicative => vec![1 % p, neg_a],
        FactorKind::BadAdditive => vec![1 % p],
    };
    Ok(EulerFactorData {
        ell,
        kind,
        a_ell: a_ell.clone(),
        poly: PolyModP::new(p, coeffs)?,
    })
}

/// Multiplicity of X = ell⁻¹ as a root of the reduced Euler factor.
pub fn d_ell(factor: &EulerFactorData, p: u64) -> Result<u32, IwasawaError> {
    if factor.ell == p {
        return Err(IwasawaError::EllEqualsP(p));
    }
    let x0 = arith::inv_mod_u64(factor.ell % p, p);
    Ok(factor.poly.root_multiplicity(x0)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalLambdaData {
    pub ell: u64,
    pub kind: FactorKind,
    pub a_ell: String,
    pub d_ell: u32,
    pub s_ell: u64,
    pub lambda_ell: u64,
    /// Present when the Brink computation actually ran (d_ell > 0, or audit
    /// requested); when absent, s_ell = 1 is a placeholder that cannot
    /// affect lambda_ell = s_ell·d_ell = 0.
    pub brink: Option<BrinkResult>,
}

/// lambda_ell(f) = s_ell·d_ell(f) for a prime ell split in K.
///
/// The s_ell computation is skipped when d_ell = 0 (the product is zero
/// regardless); `audit_brink` forces it for reporting.
pub fn local_lambda(
    f: &dyn FormSource,
    k: &ImagQuadField,
    ell: u64,
    p: u64,
    audit_brink: bool,
) -> Result<LocalLambdaData, IwasawaError> {
    if ell == p {
        return Err(IwasawaError::EllEqualsP(ell));
    }
    if k.splitting_type(ell) != SplittingType::Split {
        return Err(IwasawaError::NotSplit(ell));
    }
    let kind = FactorKind::from_reduction(f.local_kind(ell));
    let a = f.a_ell(ell).ok_or(IwasawaError::MissingCoefficient(ell))?;
    let factor = euler_factor(&a, ell, kind, p)?;
    let d = d_ell(&factor, p)?;
    let brink = if d > 0 || audit_brink {
        Some(brink_s_ell(k, ell, p)?)
    } else {
        None
    };
    let s = brink.as_ref().map(|b| b.s_ell).unwrap_or(1);
    Ok(LocalLambdaData {
        ell,
        kind,
        a_ell: a.to_string(),
        d_ell: d,
        s_ell: s,
        lambda_ell: s * d as u64,
        brink,
    })
}

/// Externally certified facts the tool cannot compute.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct HypothesisCertificate {
    pub rank_one: Option<bool>,
    pub heegner_point_infinite_order: Option<bool>,
    pub heegner_index_equals_tamagawa_p_part: Option<bool>,
    pub sha_p_trivial: Option<bool>,
    pub mu_zero: Option<bool>,
    pub irreducible: Option<bool>,
    pub lambda_known: Option<u64>,
    #[serde(default)]
    pub source: String,
}

impl HypothesisCertificate {
    pub fn validate(&self) -> Result<(), IwasawaError> {
        if self.lambda_known.is_some() && self.mu_zero != Some(true) {
            return Err(IwasawaError::InconsistentInvariants(
                "lambda_known requires mu_zero = true".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl SubCheck {
    fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        SubCheck {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub items: Vec<SubCheck>,
    pub pass: bool,
}

impl CheckReport {
    fn assemble(name: &str, items: Vec<SubCheck>) -> Self {
        let pass = items.iter().all(|i| i.pass);
        CheckReport {
            name: name.into(),
            items,
            pass,
        }
    }
}

/// Every prime dividing the level must split in K.
pub fn check_heegner(f: &dyn FormSource, k: &ImagQuadField) -> CheckReport {
    let mut items = Vec::new();
    for (ell, _) in f.level().factors_u64().expect("level fits in u64") {
        let st = k.splitting_type(ell);
        items.push(SubCheck::new(
            &format!("split_at_{ell}"),
            st == SplittingType::Split,
            format!("{ell} is {st:?} in K"),
        ));
    }
    CheckReport::assemble("heegner", items)
}

/// Admissibility at p for weight 2: p ∤ 6·N·φ(N)·h_K, p split in K,
/// a_p a unit mod p (ordinarity), and a_p² ≢ 1 mod p.
pub fn check_admissibility(
    f: &dyn FormSource,
    k: &ImagQuadField,
    p: u64,
) -> Result<CheckReport, IwasawaError> {
    let n = f.level();
    let phi = arith::euler_phi(n.value());
    let mut items = vec![
        SubCheck::new("p_coprime_6", p != 2 && p != 3, format!("p = {p}")),
        SubCheck::new(
            "p_coprime_level",
            !(n.value() % p).is_zero(),
            format!("N = {}", n.value()),
        ),
        SubCheck::new(
            "p_coprime_phi_level",
            !(&phi % p).is_zero(),
            format!("phi(N) = {phi}"),
        ),
        SubCheck::new(
            "p_coprime_class_number",
            k.class_number() % p != 0,
            format!("h_K = {}", k.class_number()),
        ),
        SubCheck::new(
            "p_split_in_K",
            k.splitting_type(p) == SplittingType::Split,
            format!("({} | {p}) = {:?}", k.disc(), k.splitting_type(p)),
        ),
    ];
    let a_p = f.a_ell(p).ok_or(IwasawaError::MissingCoefficient(p))?;
    let r = a_p.mod_floor(&BigInt::from(p)).to_u64().unwrap();
    items.push(SubCheck::new(
        "ordinary",
        r != 0,
        format!("a_p = {a_p} ≡ {r} (mod {p})"),
    ));
    items.push(SubCheck::new(
        "a_p_squared_not_one",
        r * r % p != 1,
        format!("a_p² ≡ {} (mod {p})", r * r % p),
    ));
    Ok(CheckReport::assemble("admissibility", items))
}

fn require(field: Option<bool>, name: &'static str) -> Result<bool, IwasawaError> {
    field.ok_or(IwasawaError::MissingCertificate(name))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteSubmoduleReport {
    pub report: CheckReport,
    /// "split" (case 1) or "inert" (case 2).
    pub case: String,
}

/// Finite-submodule hypothesis: certified Heegner-point facts plus the
/// computable case split on the behaviour of p in K.
pub fn check_finite_submodule(
    e: &EllipticCurveQ,
    k: &ImagQuadField,
    p: u64,
    cert: &HypothesisCertificate,
) -> Result<FiniteSubmoduleReport, IwasawaError> {
    cert.validate()?;
    let mut items = vec![
        SubCheck::new(
            "heegner_point_infinite_order",
            require(cert.heegner_point_infinite_order, "heegner_point_infinite_order")?,
            format!("certificate: {}", cert.source),
        ),
        SubCheck::new(
            "heegner_index_equals_tamagawa_p_part",
            require(
                cert.heegner_index_equals_tamagawa_p_part,
                "heegner_index_equals_tamagawa_p_part",
            )?,
            format!("certificate: {}", cert.source),
        ),
    ];
    let case = match k.splitting_type(p) {
        SplittingType::Split => {
            items.push(SubCheck::new("case_1_p_split", true, "p splits in K"));
            "split"
        }
        SplittingType::Inert => {
            let trivial = curves::reduced_curve_p_torsion_trivial(e, p, 2, p)?;
            items.push(SubCheck::new(
                "case_2_reduced_torsion_trivial",
                trivial,
                format!("p inert; checked p ∤ #E~(F_q), q = {p}²"),
            ));
            "inert"
        }
        SplittingType::Ramified => {
            items.push(SubCheck::new(
                "p_unramified_in_K",
                false,
                "p ramifies in K; outside both cases",
            ));
            "ramified"
        }
    };
    Ok(FiniteSubmoduleReport {
        report: CheckReport::assemble("finite_submodule", items),
        case: case.into(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaZeroReport {
    pub report: CheckReport,
    /// 0 when all items pass (the Selmer group is co-free), absent otherwise.
    pub lambda: Option<u64>,
}

/// Co-freeness checklist certifying lambda(E) = 0: trivial p-torsion over K,
/// p ∤ N·a_p·(a_p − 1)·∏c_ell, a Heegner point of infinite order, rank one,
/// and trivial p-primary Sha.
pub fn check_mn19_lambda_zero(
    e: &EllipticCurveQ,
    k: &ImagQuadField,
    p: u64,
    cert: &HypothesisCertificate,
) -> Result<LambdaZeroReport, IwasawaError> {
    cert.validate()?;
    let torsion = curves::torsion_p_trivial_over_k(e, k, p)?;
    let n = curves::conductor(e);
    let a_p = curves::trace_of_frobenius(e, p)?;
    let tam = curves::tamagawa_product(e);
    let prod: BigInt = BigInt::from(n.value().clone()) * a_p * (BigInt::from(a_p) - 1)
        * BigInt::from(tam.clone());
    let b_ok = !prod.is_zero() && !(&prod % BigInt::from(p)).is_zero();
    let items = vec![
        SubCheck::new(
            "torsion_trivial_over_K",
            torsion == TorsionEvidence::VerifiedTrivial,
            format!("{torsion:?}"),
        ),
        SubCheck::new(
            "p_coprime_N_ap_apm1_tamagawa",
            b_ok,
            format!("N = {}, a_p = {a_p}, ∏c_ell = {tam}", n.value()),
        ),
        SubCheck::new(
            "heegner_point_infinite_order",
            require(cert.heegner_point_infinite_order, "heegner_point_infinite_order")?,
            format!("certificate: {}", cert.source),
        ),
        SubCheck::new(
            "rank_one",
            require(cert.rank_one, "rank_one")?,
            format!("certificate: {}", cert.source),
        ),
        SubCheck::new(
            "sha_p_trivial",
            require(cert.sha_p_trivial, "sha_p_trivial")?,
            format!("certificate: {}", cert.source),
        ),
    ];
    let report = CheckReport::assemble("lambda_zero", items);
    let lambda = if report.pass { Some(0) } else { None };
    Ok(LambdaZeroReport { report, lambda })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferResult {
    pub lambda_f1: u64,
    /// (ell, lambda_ell(f1), lambda_ell(f2)) for each ell | N1·N2, ascending.
    pub local_table: Vec<(u64, u64, u64)>,
    pub lambda_f2: u64,
    pub formula_trace: String,
}

/// lambda(f2) = lambda(f1) + 2·Σ_{ell | N1N2} (lambda_ell(f1) − lambda_ell(f2)).
pub fn transfer_lambda(
    lambda_f1: u64,
    table: &[(u64, u64, u64)],
) -> Result<TransferResult, IwasawaError> {
    let mut table = table.to_vec();
    table.sort_unstable();
    let sum: i64 = table
        .iter()
        .map(|&(_, l1, l2)| l1 as i64 - l2 as i64)
        .sum();
    let lambda_f2 = lambda_f1 as i64 + 2 * sum;
    if lambda_f2 < 0 {
        return Err(IwasawaError::InconsistentInvariants(format!(
            "transfer formula yields negative lambda(f2) = {lambda_f2}"
        )));
    }
    let terms: Vec<String> = table
        .iter()
        .map(|&(ell, l1, l2)| format!("({l1} − {l2})@{ell}"))
        .collect();
    let formula_trace = format!(
        "λ(f2) = λ(f1) + 2·Σ_{{ℓ|N1N2}} (λ_ℓ(f1) − λ_ℓ(f2)) = {lambda_f1} + 2·[{}] = {lambda_f2}",
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        }
    );
    Ok(TransferResult {
        lambda_f1,
        local_table: table,
        lambda_f2: lambda_f2 as u64,
        formula_trace,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CokerStatus {
    Computed,
    NotComputed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CokerDimDiagnostic {
    pub ell: u64,
    pub dim: Option<u8>,
    pub status: CokerStatus,
}

/// Local cokernel dimension at ell ≠ p: 0 at good primes, at multiplicative
/// primes 1 exactly when p | ord_ell(Δ_min) (Tate uniformization), not
/// computed at additive primes.
pub fn coker_dim_diagnostic(
    e: &EllipticCurveQ,
    ell: u64,
    p: u64,
) -> Result<CokerDimDiagnostic, IwasawaError> {
    if ell == p {
        return Err(IwasawaError::EllEqualsP(ell));
    }
    let data = local_data(e, ell);
    let (dim, status) = match data.reduction {
        ReductionType::Good => (Some(0), CokerStatus::Computed),
        ReductionType::SplitMultiplicative | ReductionType::NonsplitMultiplicative => {
            let d = if u64::from(data.ord_min_disc) % p == 0 {
                1
            } else {
                0
            };
            (Some(d), CokerStatus::Computed)
        }
        ReductionType::Additive => (None, CokerStatus::NotComputed),
    };
    Ok(CokerDimDiagnostic { ell, dim, status })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1() -> EllipticCurveQ {
        EllipticCurveQ::from_i64([0, 1, 1, -769, -8470], Some("19a1")).unwrap()
    }

    fn e2() -> EllipticCurveQ {
        EllipticCurveQ::from_i64([0, 1, 1, -16649, 821406], Some("817b1")).unwrap()
    }

    fn k51() -> ImagQuadField {
        ImagQuadField::new(51).unwrap()
    }

    fn full_cert() -> HypothesisCertificate {
        HypothesisCertificate {
            rank_one: Some(true),
            heegner_point_infinite_order: Some(true),
            heegner_index_equals_tamagawa_p_part: Some(true),
            sha_p_trivial: Some(true),
            mu_zero: Some(true),
            irreducible: Some(true),
            lambda_known: None,
            source: "test".into(),
        }
    }

    #[test]
    fn euler_factor_shapes() {
        let f = euler_factor(&BigInt::from(-1), 43, FactorKind::Good, 5).unwrap();
        assert_eq!(f.poly.coeffs(), &[1, 1, 3]);
        let f = euler_factor(&BigInt::from(1), 19, FactorKind::BadMultiplicative, 5).unwrap();
        assert_eq!(f.poly.coeffs(), &[1, 4]);
        let f = euler_factor(&BigInt::from(0), 7, FactorKind::BadAdditive, 5).unwrap();
        assert_eq!(f.poly.coeffs(), &[1]);
        assert_eq!(
            euler_factor(&BigInt::from(1), 5, FactorKind::Good, 5),
            Err(IwasawaError::EllEqualsP(5))
        );
    }

    #[test]
    fn d_ell_flagship_values() {
        let good43 = euler_factor(&BigInt::from(-1), 43, FactorKind::Good, 5).unwrap();
        assert_eq!(d_ell(&good43, 5).unwrap(), 1);
        let mult19 = euler_factor(&BigInt::from(1), 19, FactorKind::BadMultiplicative, 5).unwrap();
        assert_eq!(d_ell(&mult19, 5).unwrap(), 0);
        let mult43 = euler_factor(&BigInt::from(1), 43, FactorKind::BadMultiplicative, 5).unwrap();
        assert_eq!(d_ell(&mult43, 5).unwrap(), 0);
    }

    #[test]
    fn local_lambdas_for_flagship_pair() {
        let k = k51();
        let l = local_lambda(&e1(), &k, 43, 5, false).unwrap();
        assert_eq!((l.d_ell, l.s_ell, l.lambda_ell), (1, 1, 1));
        assert!(l.brink.is_some());
        let l = local_lambda(&e1(), &k, 19, 5, false).unwrap();
        assert_eq!(l.lambda_ell, 0);
        assert!(l.brink.is_none());
        let l = local_lambda(&e2(), &k, 19, 5, false).unwrap();
        assert_eq!(l.lambda_ell, 0);
        let l = local_lambda(&e2(), &k, 43, 5, true).unwrap();
        assert_eq!(l.lambda_ell, 0);
        assert!(l.brink.is_some());
        assert_eq!(
            local_lambda(&e1(), &k, 17, 5, false),
            Err(IwasawaError::NotSplit(17))
        );
    }

    #[test]
    fn heegner_and_admissibility() {
        let k = k51();
        assert!(check_heegner(&e1(), &k).pass);
        assert!(check_heegner(&e2(), &k).pass);
        assert!(check_admissibility(&e1(), &k, 5).unwrap().pass);
        assert!(check_admissibility(&e2(), &k, 5).unwrap().pass);
        // p = 3 is not coprime to 6
        assert!(!check_admissibility(&e1(), &k, 3).unwrap().pass);
    }

    #[test]
    fn finite_submodule_and_lambda_zero() {
        let k = k51();
        let cert = full_cert();
        let fs = check_finite_submodule(&e2(), &k, 5, &cert).unwrap();
        assert!(fs.report.pass);
        assert_eq!(fs.case, "split");
        let lz = check_mn19_lambda_zero(&e1(), &k, 5, &cert).unwrap();
        assert!(lz.report.pass);
        assert_eq!(lz.lambda, Some(0));

        let mut missing = cert.clone();
        missing.rank_one = None;
        assert_eq!(
            check_mn19_lambda_zero(&e1(), &k, 5, &missing),
            Err(IwasawaError::MissingCertificate("rank_one"))
        );
        let mut bad = cert;
        bad.heegner_point_infinite_order = Some(false);
        assert!(!check_finite_submodule(&e2(), &k, 5, &bad).unwrap().report.pass);
    }

    #[test]
    fn transfer_examples() {
        let r = transfer_lambda(0, &[(19, 0, 0), (43, 1, 0)]).unwrap();
        assert_eq!(r.lambda_f2, 2);
        let r = transfer_lambda(3, &[]).unwrap();
        assert_eq!(r.lambda_f2, 3);
        let r = transfer_lambda(4, &[(7, 1, 1), (11, 2, 2)]).unwrap();
        assert_eq!(r.lambda_f2, 4);
        assert!(transfer_lambda(0, &[(7, 0, 1)]).is_err());
    }

    #[test]
    fn transfer_involution() {
        let table = [(19u64, 0u64, 0u64), (43, 1, 0)];
        let fwd = transfer_lambda(0, &table).unwrap();
        let back_table: Vec<_> = table.iter().map(|&(l, a, b)| (l, b, a)).collect();
        let back = transfer_lambda(fwd.lambda_f2, &back_table).unwrap();
        assert_eq!(back.lambda_f2, 0);
    }

    #[test]
    fn coker_diagnostic() {
        // good prime
        let d = coker_dim_diagnostic(&e1(), 7, 5).unwrap();
        assert_eq!(d.dim, Some(0));
        // split multiplicative at 19, ord Δ = 1, 5 ∤ 1
        let d = coker_dim_diagnostic(&e1(), 19, 5).unwrap();
        assert_eq!(d.dim, Some(0));
        // 817b1 at 43: ord Δ_min = 5 = p, so dim 1
        let d = coker_dim_diagnostic(&e2(), 43, 5).unwrap();
        assert_eq!(d.dim, Some(1));
        // additive: not computed
        let e27 = EllipticCurveQ::from_i64([0, 0, 1, 0, -7], None).unwrap();
        let d = coker_dim_diagnostic(&e27, 3, 5).unwrap();
        assert_eq!(d.status, CokerStatus::NotComputed);
    }
}
