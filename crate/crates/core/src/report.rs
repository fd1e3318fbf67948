//! Pipeline orchestration and deterministic report assembly.
//!
//! Machine output is a single JSON document tagged with `schema =
//! "lambda-transfer/1"`; the text renderers print the same numeric content.

use crate::congruence::{check_congruence, CongruenceReport, LevelChoice, Verdict};
use crate::curves::{self, EllipticCurveQ};
use crate::forms::FormSource;
use crate::ingest::Record;
use crate::iwasawa::{
    self, CheckReport, CokerDimDiagnostic, FiniteSubmoduleReport, HypothesisCertificate,
    IwasawaError, LambdaZeroReport, LocalLambdaData, SubCheck, TransferResult,
};
use crate::quadfield::{ImagQuadField, SplittingType};
use serde::Serialize;
use std::collections::BTreeSet;

pub const SCHEMA: &str = "lambda-transfer/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    HypothesisFailure,
    Inconclusive,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::HypothesisFailure => 1,
            Outcome::Inconclusive => 3,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PipelineOptions {
    pub p: u64,
    pub d: u64,
    pub level_choice: LevelChoice,
    pub strict_congruence: bool,
    pub audit_brink: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FormSummary {
    pub label: String,
    pub kind: &'static str,
    pub level: String,
    pub level_factors: Vec<(u64, u32)>,
    pub weight: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ainvs: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tamagawa_product: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_p: Option<String>,
}

fn summarize(rec: &Record, p: u64) -> FormSummary {
    let rf = resolve_form(rec);
    let f = rf.as_form();
    let level = f.level();
    FormSummary {
        label: f.describe(),
        kind: match rec {
            Record::Curve(_) => "curve",
            Record::Eigenform(_) => "eigenform",
        },
        level: level.value().to_string(),
        level_factors: level.factors_u64().unwrap_or_default(),
        weight: f.weight(),
        ainvs: match rec {
            Record::Curve(c) => Some(c.ainvs.iter().map(|a| a.to_string()).collect()),
            Record::Eigenform(_) => None,
        },
        tamagawa_product: match rec {
            Record::Curve(c) => Some(
                curves::tamagawa_product(&c.curve().expect("validated record")).to_string(),
            ),
            Record::Eigenform(_) => None,
        },
        a_p: f.a_ell(p).map(|a| a.to_string()),
    }
}

/// A record resolved into something implementing `FormSource`; curves are
/// materialized, eigenforms are borrowed.
pub enum ResolvedForm<'a> {
    Curve(EllipticCurveQ),
    Eigenform(&'a crate::ingest::EigenformRecord),
}

impl ResolvedForm<'_> {
    pub fn as_form(&self) -> &dyn FormSource {
        match self {
            ResolvedForm::Curve(c) => c,
            ResolvedForm::Eigenform(f) => *f,
        }
    }
}

pub fn resolve_form(rec: &Record) -> ResolvedForm<'_> {
    match rec {
        Record::Curve(c) => ResolvedForm::Curve(c.curve().expect("validated record")),
        Record::Eigenform(f) => ResolvedForm::Eigenform(f),
    }
}

fn certificate_of(rec: &Record) -> Option<&HypothesisCertificate> {
    match rec {
        Record::Curve(c) => c.certificate.as_ref(),
        Record::Eigenform(f) => f.certificate.as_ref(),
    }
}

fn curve_of(rec: &Record) -> Option<EllipticCurveQ> {
    match rec {
        Record::Curve(c) => Some(c.curve().expect("validated record")),
        Record::Eigenform(_) => None,
    }
}

#[derive(Debug, Serialize)]
pub struct TransferDossier {
    pub schema: &'static str,
    pub p: u64,
    pub d: u64,
    pub disc: String,
    pub class_number: u64,
    pub f1: FormSummary,
    pub f2: FormSummary,
    pub heegner_f1: CheckReport,
    pub heegner_f2: CheckReport,
    pub admissibility_f1: CheckReport,
    pub admissibility_f2: CheckReport,
    pub congruence: CongruenceReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finite_submodule_f1: Option<FiniteSubmoduleReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finite_submodule_f2: Option<FiniteSubmoduleReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_zero_f1: Option<LambdaZeroReport>,
    pub lambda_f1_source: String,
    pub mu_zero_inferred_f1: bool,
    pub mu_zero_inferred_f2: bool,
    pub local_lambdas_f1: Vec<LocalLambdaData>,
    pub local_lambdas_f2: Vec<LocalLambdaData>,
    pub coker_diagnostics_f1: Vec<CokerDimDiagnostic>,
    pub coker_diagnostics_f2: Vec<CokerDimDiagnostic>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transfer: Option<TransferResult>,
    pub failures: Vec<String>,
    pub inconclusive: Vec<String>,
    pub outcome: Outcome,
}

fn bad_primes_union(f1: &dyn FormSource, f2: &dyn FormSource) -> Vec<u64> {
    let mut set = BTreeSet::new();
    for (p, _) in f1.level().factors_u64().unwrap_or_default() {
        set.insert(p);
    }
    for (p, _) in f2.level().factors_u64().unwrap_or_default() {
        set.insert(p);
    }
    set.into_iter().collect()
}

/// Finite-submodule check for a form without a curve model: the certified
/// facts plus case 1 (p split); case 2 needs point counts and is not
/// available for bare eigenforms.
fn finite_submodule_formless(
    k: &ImagQuadField,
    p: u64,
    cert: &HypothesisCertificate,
) -> Result<FiniteSubmoduleReport, IwasawaError> {
    cert.validate()?;
    let hp = cert
        .heegner_point_infinite_order
        .ok_or(IwasawaError::MissingCertificate("heegner_point_infinite_order"))?;
    let hi = cert
        .heegner_index_equals_tamagawa_p_part
        .ok_or(IwasawaError::MissingCertificate(
            "heegner_index_equals_tamagawa_p_part",
        ))?;
    let mut items = vec![
        SubCheck {
            name: "heegner_point_infinite_order".into(),
            pass: hp,
            detail: format!("certificate: {}", cert.source),
        },
        SubCheck {
            name: "heegner_index_equals_tamagawa_p_part".into(),
            pass: hi,
            detail: format!("certificate: {}", cert.source),
        },
    ];
    let case = if k.splitting_type(p) == SplittingType::Split {
        items.push(SubCheck {
            name: "case_1_p_split".into(),
            pass: true,
            detail: "p splits in K".into(),
        });
        "split"
    } else {
        items.push(SubCheck {
            name: "case_2_requires_curve_model".into(),
            pass: false,
            detail: "p not split and no curve model to count points on".into(),
        });
        "inert"
    };
    let pass = items.iter().all(|i| i.pass);
    Ok(FiniteSubmoduleReport {
        report: CheckReport {
            name: "finite_submodule".into(),
            items,
            pass,
        },
        case: case.into(),
    })
}

pub fn run_transfer(
    rec1: &Record,
    rec2: &Record,
    opts: &PipelineOptions,
) -> Result<TransferDossier, String> {
    let k = ImagQuadField::new(opts.d).map_err(|e| e.to_string())?;
    let p = opts.p;
    let rf1 = resolve_form(rec1);
    let rf2 = resolve_form(rec2);
    let f1 = rf1.as_form();
    let f2 = rf2.as_form();
    let mut failures = Vec::new();
    let mut inconclusive = Vec::new();

    let heegner_f1 = iwasawa::check_heegner(f1, &k);
    let heegner_f2 = iwasawa::check_heegner(f2, &k);
    for (name, rep) in [("f1", &heegner_f1), ("f2", &heegner_f2)] {
        if !rep.pass {
            failures.push(format!("(Heeg.) fails for {name}"));
        }
    }
    let admissibility_f1 =
        iwasawa::check_admissibility(f1, &k, p).map_err(|e| e.to_string())?;
    let admissibility_f2 =
        iwasawa::check_admissibility(f2, &k, p).map_err(|e| e.to_string())?;
    for (name, rep) in [("f1", &admissibility_f1), ("f2", &admissibility_f2)] {
        if !rep.pass {
            failures.push(format!("(admiss.) fails for {name}"));
        }
    }
    let congruence =
        check_congruence(f1, f2, p, opts.level_choice).map_err(|e| e.to_string())?;
    match congruence.verdict {
        Verdict::Fail => failures.push("residual congruence fails below the Sturm bound".into()),
        Verdict::PassWithSkips if opts.strict_congruence => {
            failures.push("residual congruence passes only with skipped additive primes".into())
        }
        _ => {}
    }

    let mut check_irreducible = |name: &str, rec: &Record| -> bool {
        match certificate_of(rec).and_then(|c| c.irreducible) {
            Some(true) => true,
            Some(false) => {
                failures.push(format!("(irred.) certified false for {name}"));
                false
            }
            None => {
                inconclusive.push(format!("(irred.) not certified for {name}"));
                false
            }
        }
    };
    let irred1 = check_irreducible("f1", rec1);
    let irred2 = check_irreducible("f2", rec2);
    let strict_pass = congruence.verdict == Verdict::Pass;
    let mu_zero_inferred_f1 =
        heegner_f1.pass && admissibility_f1.pass && strict_pass && irred1;
    let mu_zero_inferred_f2 =
        heegner_f2.pass && admissibility_f2.pass && strict_pass && irred2;

    // Finite-submodule hypothesis for both forms.
    let mut finite_submodule = |name: &str, rec: &Record| -> Option<FiniteSubmoduleReport> {
        let cert = match certificate_of(rec) {
            Some(c) => c.clone(),
            None => {
                inconclusive.push(format!("no certificate supplied for {name}"));
                return None;
            }
        };
        let out = match curve_of(rec) {
            Some(e) => iwasawa::check_finite_submodule(&e, &k, p, &cert),
            None => finite_submodule_formless(&k, p, &cert),
        };
        match out {
            Ok(rep) => {
                if !rep.report.pass {
                    failures.push(format!("finite-submodule hypothesis fails for {name}"));
                }
                Some(rep)
            }
            Err(IwasawaError::MissingCertificate(field)) => {
                inconclusive.push(format!("certificate for {name} is missing `{field}`"));
                None
            }
            Err(e) => {
                failures.push(format!("finite-submodule check errored for {name}: {e}"));
                None
            }
        }
    };
    let finite_submodule_f1 = finite_submodule("f1", rec1);
    let finite_submodule_f2 = finite_submodule("f2", rec2);

    // lambda(f1): co-freeness checklist when a curve model exists, else the
    // certified value.
    let mut lambda_zero_f1 = None;
    let mut lambda_f1_source = String::new();
    let mut lambda_f1: Option<u64> = None;
    if let (Some(e), Some(cert)) = (curve_of(rec1), certificate_of(rec1)) {
        match iwasawa::check_mn19_lambda_zero(&e, &k, p, cert) {
            Ok(rep) => {
                if let Some(l) = rep.lambda {
                    lambda_f1 = Some(l);
                    lambda_f1_source = "computed: co-free Selmer checklist".into();
                }
                lambda_zero_f1 = Some(rep);
            }
            Err(IwasawaError::MissingCertificate(field)) => {
                inconclusive.push(format!("certificate for f1 is missing `{field}`"));
            }
            Err(e) => failures.push(format!("lambda-zero check errored for f1: {e}")),
        }
    }
    if lambda_f1.is_none() {
        if let Some(l) = certificate_of(rec1).and_then(|c| c.lambda_known) {
            lambda_f1 = Some(l);
            lambda_f1_source = "certificate".into();
        }
    }
    if lambda_f1.is_none() {
        inconclusive.push(
            "lambda(f1) could not be established (checklist failed or was unavailable, and no \
             certified value was supplied)"
                .into(),
        );
    }

    // Local invariants at every ell | N1·N2.
    let bad_primes = bad_primes_union(f1, f2);
    let mut local_lambdas_f1 = Vec::new();
    let mut local_lambdas_f2 = Vec::new();
    for &ell in &bad_primes {
        for (name, f, out) in [
            ("f1", f1, &mut local_lambdas_f1),
            ("f2", f2, &mut local_lambdas_f2),
        ] {
            match iwasawa::local_lambda(f, &k, ell, p, opts.audit_brink) {
                Ok(l) => out.push(l),
                Err(e) => failures.push(format!(
                    "local lambda at ell = {ell} failed for {name}: {e}"
                )),
            }
        }
    }
    let coker = |rec: &Record| -> Vec<CokerDimDiagnostic> {
        match curve_of(rec) {
            Some(e) => bad_primes
                .iter()
                .filter(|&&ell| ell != p)
                .filter_map(|&ell| iwasawa::coker_dim_diagnostic(&e, ell, p).ok())
                .collect(),
            None => Vec::new(),
        }
    };
    let coker_diagnostics_f1 = coker(rec1);
    let coker_diagnostics_f2 = coker(rec2);

    let transfer = if failures.is_empty() && inconclusive.is_empty() {
        let table: Vec<(u64, u64, u64)> = bad_primes
            .iter()
            .map(|&ell| {
                let l1 = local_lambdas_f1
                    .iter()
                    .find(|l| l.ell == ell)
                    .map(|l| l.lambda_ell)
                    .unwrap_or(0);
                let l2 = local_lambdas_f2
                    .iter()
                    .find(|l| l.ell == ell)
                    .map(|l| l.lambda_ell)
                    .unwrap_or(0);
                (ell, l1, l2)
            })
            .collect();
        match iwasawa::transfer_lambda(lambda_f1.unwrap(), &table) {
            Ok(t) => Some(t),
            Err(e) => {
                failures.push(format!("transfer formula error: {e}"));
                None
            }
        }
    } else {
        None
    };

    let outcome = if !failures.is_empty() {
        Outcome::HypothesisFailure
    } else if !inconclusive.is_empty() {
        Outcome::Inconclusive
    } else {
        Outcome::Success
    };
    Ok(TransferDossier {
        schema: SCHEMA,
        p,
        d: opts.d,
        disc: k.disc().to_string(),
        class_number: k.class_number(),
        f1: summarize(rec1, p),
        f2: summarize(rec2, p),
        heegner_f1,
        heegner_f2,
        admissibility_f1,
        admissibility_f2,
        congruence,
        finite_submodule_f1,
        finite_submodule_f2,
        lambda_zero_f1,
        lambda_f1_source,
        mu_zero_inferred_f1,
        mu_zero_inferred_f2,
        local_lambdas_f1,
        local_lambdas_f2,
        coker_diagnostics_f1,
        coker_diagnostics_f2,
        transfer,
        failures,
        inconclusive,
        outcome,
    })
}

#[derive(Debug, Serialize)]
pub struct InspectReport {
    pub schema: &'static str,
    pub form: FormSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discriminant: Option<String>,
    pub reduction: Vec<curves::LocalReductionData>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub torsion_p_over_k: Option<String>,
}

pub fn run_inspect(rec: &Record, p: u64, d: Option<u64>) -> Result<InspectReport, String> {
    let form = summarize(rec, p);
    let (discriminant, reduction) = match rec {
        Record::Curve(c) => {
            let e = c.curve().expect("validated record");
            let bad: Vec<_> = form
                .level_factors
                .iter()
                .map(|&(ell, _)| curves::local_data(&e, ell))
                .collect();
            (Some(e.discriminant().to_string()), bad)
        }
        Record::Eigenform(_) => (None, Vec::new()),
    };
    let torsion_p_over_k = match (d, rec) {
        (Some(d), Record::Curve(c)) => {
            let k = ImagQuadField::new(d).map_err(|e| e.to_string())?;
            let e = c.curve().expect("validated record");
            Some(format!(
                "{:?}",
                curves::torsion_p_trivial_over_k(&e, &k, p).map_err(|e| e.to_string())?
            ))
        }
        _ => None,
    };
    Ok(InspectReport {
        schema: SCHEMA,
        form,
        discriminant,
        reduction,
        torsion_p_over_k,
    })
}

#[derive(Debug, Serialize)]
pub struct VerifyDossier {
    pub schema: &'static str,
    pub p: u64,
    pub d: u64,
    pub class_number: u64,
    pub form: FormSummary,
    pub heegner: CheckReport,
    pub admissibility: CheckReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub torsion_p_over_k: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finite_submodule: Option<FiniteSubmoduleReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_zero: Option<LambdaZeroReport>,
    pub failures: Vec<String>,
    pub inconclusive: Vec<String>,
    pub outcome: Outcome,
}

pub fn run_verify(rec: &Record, p: u64, d: u64) -> Result<VerifyDossier, String> {
    let k = ImagQuadField::new(d).map_err(|e| e.to_string())?;
    let rf = resolve_form(rec);
    let f = rf.as_form();
    let mut failures = Vec::new();
    let mut inconclusive = Vec::new();
    let heegner = iwasawa::check_heegner(f, &k);
    if !heegner.pass {
        failures.push("(Heeg.) fails".into());
    }
    let admissibility = iwasawa::check_admissibility(f, &k, p).map_err(|e| e.to_string())?;
    if !admissibility.pass {
        failures.push("(admiss.) fails".into());
    }
    let mut torsion_p_over_k = None;
    let mut finite_submodule = None;
    let mut lambda_zero = None;
    if let Some(e) = curve_of(rec) {
        let torsion = curves::torsion_p_trivial_over_k(&e, &k, p).map_err(|e| e.to_string())?;
        torsion_p_over_k = Some(format!("{torsion:?}"));
        if let Some(cert) = certificate_of(rec) {
            match iwasawa::check_finite_submodule(&e, &k, p, cert) {
                Ok(rep) => {
                    if !rep.report.pass {
                        failures.push("finite-submodule hypothesis fails".into());
                    }
                    finite_submodule = Some(rep);
                }
                Err(IwasawaError::MissingCertificate(field)) => {
                    inconclusive.push(format!("certificate is missing `{field}`"));
                }
                Err(e) => failures.push(e.to_string()),
            }
            match iwasawa::check_mn19_lambda_zero(&e, &k, p, cert) {
                Ok(rep) => lambda_zero = Some(rep),
                Err(IwasawaError::MissingCertificate(field)) => {
                    inconclusive.push(format!("certificate is missing `{field}`"));
                }
                Err(e) => failures.push(e.to_string()),
            }
        } else {
            inconclusive.push("no certificate supplied".into());
        }
    }
    let outcome = if !failures.is_empty() {
        Outcome::HypothesisFailure
    } else if !inconclusive.is_empty() {
        Outcome::Inconclusive
    } else {
        Outcome::Success
    };
    Ok(VerifyDossier {
        schema: SCHEMA,
        p,
        d,
        class_number: k.class_number(),
        form: summarize(rec, p),
        heegner,
        admissibility,
        torsion_p_over_k,
        finite_submodule,
        lambda_zero,
        failures,
        inconclusive,
        outcome,
    })
}

// --- text rendering ------------------------------------------------------

fn render_check(out: &mut String, rep: &CheckReport, label: &str) {
    out.push_str(&format!(
        "{label}: {}\n",
        if rep.pass { "pass" } else { "FAIL" }
    ));
    for item in &rep.items {
        out.push_str(&format!(
            "  [{}] {} — {}\n",
            if item.pass { "ok" } else { "XX" },
            item.name,
            item.detail
        ));
    }
}

pub fn render_transfer_text(d: &TransferDossier) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "lambda transfer: {} -> {}  (p = {}, K = Q(sqrt({})), h_K = {})\n\n",
        d.f1.label, d.f2.label, d.p, d.disc, d.class_number
    ));
    s.push_str(&format!(
        "f1: {} of level {}   f2: {} of level {}\n",
        d.f1.label, d.f1.level, d.f2.label, d.f2.level
    ));
    render_check(&mut s, &d.heegner_f1, "(Heeg.) f1");
    render_check(&mut s, &d.heegner_f2, "(Heeg.) f2");
    render_check(&mut s, &d.admissibility_f1, "(admiss.) f1");
    render_check(&mut s, &d.admissibility_f2, "(admiss.) f2");
    s.push_str(&format!(
        "congruence: {:?} (Sturm bound {} at level {})\n",
        d.congruence.verdict, d.congruence.sturm_bound, d.congruence.level_used
    ));
    for (name, fs) in [("f1", &d.finite_submodule_f1), ("f2", &d.finite_submodule_f2)] {
        if let Some(fs) = fs {
            render_check(&mut s, &fs.report, &format!("finite submodule {name} (case {})", fs.case));
        }
    }
    if let Some(lz) = &d.lambda_zero_f1 {
        render_check(&mut s, &lz.report, "lambda(f1) = 0 checklist");
    }
    s.push_str(&format!("lambda(f1) source: {}\n", d.lambda_f1_source));
    s.push_str(&format!(
        "mu = 0 inferred: f1 {} / f2 {}\n",
        d.mu_zero_inferred_f1, d.mu_zero_inferred_f2
    ));
    s.push_str("\nlocal invariants (ell | N1 N2):\n");
    for (name, table) in [("f1", &d.local_lambdas_f1), ("f2", &d.local_lambdas_f2)] {
        for l in table.iter() {
            s.push_str(&format!(
                "  {name} ell={:<6} kind={:?} a_ell={} d={} s={} lambda={}",
                l.ell, l.kind, l.a_ell, l.d_ell, l.s_ell, l.lambda_ell
            ));
            if let Some(b) = &l.brink {
                s.push_str(&format!(
                    "  [brink: rep=({}, {}), a*={}, b*={}, t={}]",
                    b.rep.0, b.rep.1, b.astar, b.bstar, b.t
                ));
            }
            s.push('\n');
        }
    }
    for msg in &d.failures {
        s.push_str(&format!("FAILURE: {msg}\n"));
    }
    for msg in &d.inconclusive {
        s.push_str(&format!("INCONCLUSIVE: {msg}\n"));
    }
    if let Some(t) = &d.transfer {
        s.push_str(&format!("\n{}\n", t.formula_trace));
        s.push_str(&format!("lambda(f2) = {}\n", t.lambda_f2));
    }
    s.push_str(&format!("outcome: {:?}\n", d.outcome));
    s
}

pub fn render_verify_text(d: &VerifyDossier) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "hypothesis verification for {} (p = {}, D = {})\n",
        d.form.label, d.p, d.d
    ));
    render_check(&mut s, &d.heegner, "(Heeg.)");
    render_check(&mut s, &d.admissibility, "(admiss.)");
    if let Some(t) = &d.torsion_p_over_k {
        s.push_str(&format!("torsion over K: {t}\n"));
    }
    if let Some(fs) = &d.finite_submodule {
        render_check(&mut s, &fs.report, &format!("finite submodule (case {})", fs.case));
    }
    if let Some(lz) = &d.lambda_zero {
        render_check(&mut s, &lz.report, "lambda = 0 checklist");
    }
    for msg in &d.failures {
        s.push_str(&format!("FAILURE: {msg}\n"));
    }
    for msg in &d.inconclusive {
        s.push_str(&format!("INCONCLUSIVE: {msg}\n"));
    }
    s.push_str(&format!("outcome: {:?}\n", d.outcome));
    s
}

pub fn render_inspect_text(r: &InspectReport) -> String {
    let mut s = String::new();
    s.push_str(&format!("{} ({})\n", r.form.label, r.form.kind));
    if let Some(ai) = &r.form.ainvs {
        s.push_str(&format!("a-invariants: [{}]\n", ai.join(", ")));
    }
    if let Some(disc) = &r.discriminant {
        s.push_str(&format!("discriminant: {disc}\n"));
    }
    s.push_str(&format!(
        "conductor: {} = {}\n",
        r.form.level,
        r.form
            .level_factors
            .iter()
            .map(|(p, e)| if *e == 1 {
                p.to_string()
            } else {
                format!("{p}^{e}")
            })
            .collect::<Vec<_>>()
            .join(" · ")
    ));
    for d in &r.reduction {
        s.push_str(&format!(
            "  ell={:<6} {:?} (Kodaira {}, f={}, c={}, ord Δ_min={})\n",
            d.ell, d.reduction, d.kodaira, d.conductor_exponent, d.tamagawa, d.ord_min_disc
        ));
    }
    if let Some(t) = &r.form.tamagawa_product {
        s.push_str(&format!("Tamagawa product: {t}\n"));
    }
    if let Some(a) = &r.form.a_p {
        s.push_str(&format!("a_p: {a}\n"));
    }
    if let Some(t) = &r.torsion_p_over_k {
        s.push_str(&format!("torsion over K: {t}\n"));
    }
    s
}
