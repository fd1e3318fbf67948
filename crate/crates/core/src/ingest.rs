//! Record formats for curves and eigenforms, fixture loading, and the
//! remote curve-database client with a checksummed on-disk cache.

use crate::arith::{factorize, is_prime_u64};
use crate::curves::{EllipticCurveQ, ReductionType};
use crate::forms::FormSource;
use crate::iwasawa::HypothesisCertificate;
use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("io error on {path}: {err}")]
    Io { path: PathBuf, err: std::io::Error },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("network error: {0}")]
    Network(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("cache entry corrupt (checksum mismatch): {0}")]
    CacheCorrupt(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordSource {
    Fixture,
    Remote,
    User,
}

/// An elliptic curve record: label, a-invariants (decimal strings on disk so
/// big integers never pass through floating point), optional certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveRecord {
    pub label: String,
    pub ainvs: [BigInt; 5],
    pub certificate: Option<HypothesisCertificate>,
    pub source: RecordSource,
}

impl CurveRecord {
    pub fn curve(&self) -> Result<EllipticCurveQ, IngestError> {
        EllipticCurveQ::new(
            self.ainvs[0].clone(),
            self.ainvs[1].clone(),
            self.ainvs[2].clone(),
            self.ainvs[3].clone(),
            self.ainvs[4].clone(),
            Some(self.label.clone()),
        )
        .map_err(|e| IngestError::Validation(e.to_string()))
    }
}

/// A generic eigenform record with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenformRecord {
    pub level: u64,
    pub weight: u32,
    pub a_coeffs: BTreeMap<u64, BigInt>,
    pub bad_prime_kinds: BTreeMap<u64, ReductionType>,
    pub certificate: Option<HypothesisCertificate>,
    pub label: String,
}

impl EigenformRecord {
    fn validate(&self) -> Result<(), IngestError> {
        if self.level == 0 {
            return Err(IngestError::Validation("level must be positive".into()));
        }
        if self.weight < 2 || self.weight % 2 != 0 {
            return Err(IngestError::Validation(format!(
                "weight must be an even integer ≥ 2, got {}",
                self.weight
            )));
        }
        for (p, _) in factorize(&BigUint::from(self.level)).factors_u64().unwrap() {
            if !self.bad_prime_kinds.contains_key(&p) {
                return Err(IngestError::Validation(format!(
                    "prime {p} divides the level but has no bad_prime_kinds entry"
                )));
            }
        }
        for (&ell, kind) in &self.bad_prime_kinds {
            if self.level % ell != 0 {
                return Err(IngestError::Validation(format!(
                    "bad_prime_kinds lists {ell}, which does not divide the level"
                )));
            }
            if *kind == ReductionType::Good {
                return Err(IngestError::Validation(format!(
                    "bad_prime_kinds entry for {ell} cannot be `good`"
                )));
            }
        }
        // Hasse-style bound |a_ell|² ≤ 4·ell^(weight−1) at good primes.
        for (&ell, a) in &self.a_coeffs {
            if !is_prime_u64(ell) {
                return Err(IngestError::Validation(format!(
                    "a_coeffs key {ell} is not prime"
                )));
            }
            if self.level % ell != 0 {
                let bound = BigInt::from(4) * BigInt::from(ell).pow(self.weight - 1);
                if a * a > bound {
                    return Err(IngestError::Validation(format!(
                        "a_{ell} = {a} violates the Hasse bound for weight {}",
                        self.weight
                    )));
                }
            }
        }
        Ok(())
    }
}

impl FormSource for EigenformRecord {
    fn level(&self) -> crate::arith::PrimeFactorization {
        factorize(&BigUint::from(self.level))
    }

    fn weight(&self) -> u32 {
        self.weight
    }

    fn local_kind(&self, ell: u64) -> ReductionType {
        self.bad_prime_kinds
            .get(&ell)
            .copied()
            .unwrap_or(ReductionType::Good)
    }

    fn a_ell(&self, ell: u64) -> Option<BigInt> {
        if let Some(a) = self.a_coeffs.get(&ell) {
            return Some(a.clone());
        }
        match self.local_kind(ell) {
            ReductionType::SplitMultiplicative => Some(BigInt::from(1)),
            ReductionType::NonsplitMultiplicative => Some(BigInt::from(-1)),
            ReductionType::Additive => Some(BigInt::zero()),
            ReductionType::Good => None,
        }
    }

    fn describe(&self) -> String {
        self.label.clone()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Record {
    Curve(CurveRecord),
    Eigenform(EigenformRecord),
}

// --- on-disk JSON shapes -------------------------------------------------

#[derive(Serialize, Deserialize)]
struct CurveRecordJson {
    label: String,
    ainvs: Vec<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    conductor: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<HypothesisCertificate>,
}

#[derive(Serialize, Deserialize)]
struct EigenformRecordJson {
    #[serde(default)]
    label: String,
    level: u64,
    weight: u32,
    a_coeffs: BTreeMap<String, serde_json::Value>,
    bad_prime_kinds: BTreeMap<String, ReductionType>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<HypothesisCertificate>,
}

fn value_to_bigint(v: &serde_json::Value) -> Result<BigInt, IngestError> {
    match v {
        serde_json::Value::String(s) => s
            .parse::<BigInt>()
            .map_err(|e| IngestError::Parse(format!("bad integer string {s:?}: {e}"))),
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| IngestError::Parse(format!("non-integer number {n}"))),
        other => Err(IngestError::Parse(format!(
            "expected integer string, got {other}"
        ))),
    }
}

fn curve_from_json(j: CurveRecordJson, source: RecordSource) -> Result<CurveRecord, IngestError> {
    if j.ainvs.len() != 5 {
        return Err(IngestError::Validation(format!(
            "ainvs must have exactly 5 entries, got {}",
            j.ainvs.len()
        )));
    }
    let mut ainvs: Vec<BigInt> = Vec::with_capacity(5);
    for v in &j.ainvs {
        ainvs.push(value_to_bigint(v)?);
    }
    if let Some(cert) = &j.certificate {
        cert.validate()
            .map_err(|e| IngestError::Validation(e.to_string()))?;
    }
    let rec = CurveRecord {
        label: j.label,
        ainvs: [
            ainvs[0].clone(),
            ainvs[1].clone(),
            ainvs[2].clone(),
            ainvs[3].clone(),
            ainvs[4].clone(),
        ],
        certificate: j.certificate,
        source,
    };
    let curve = rec.curve()?; // rejects singular models
    if let Some(n_str) = &j.conductor {
        let claimed: BigUint = n_str
            .parse()
            .map_err(|e| IngestError::Parse(format!("bad conductor string: {e}")))?;
        let computed = crate::curves::conductor(&curve);
        if computed.value() != &claimed {
            return Err(IngestError::Validation(format!(
                "conductor mismatch: record claims {claimed}, Tate's algorithm gives {}",
                computed.value()
            )));
        }
    }
    Ok(rec)
}

fn eigenform_from_json(
    j: EigenformRecordJson,
    _source: RecordSource,
) -> Result<EigenformRecord, IngestError> {
    let mut a_coeffs = BTreeMap::new();
    for (k, v) in &j.a_coeffs {
        let ell: u64 = k
            .parse()
            .map_err(|_| IngestError::Parse(format!("bad prime key {k:?}")))?;
        a_coeffs.insert(ell, value_to_bigint(v)?);
    }
    let mut bad_prime_kinds = BTreeMap::new();
    for (k, v) in &j.bad_prime_kinds {
        let ell: u64 = k
            .parse()
            .map_err(|_| IngestError::Parse(format!("bad prime key {k:?}")))?;
        bad_prime_kinds.insert(ell, *v);
    }
    if let Some(cert) = &j.certificate {
        cert.validate()
            .map_err(|e| IngestError::Validation(e.to_string()))?;
    }
    let label = if j.label.is_empty() {
        format!("eigenform-{}-{}", j.level, j.weight)
    } else {
        j.label
    };
    let rec = EigenformRecord {
        level: j.level,
        weight: j.weight,
        a_coeffs,
        bad_prime_kinds,
        certificate: j.certificate,
        label,
    };
    rec.validate()?;
    Ok(rec)
}

fn record_from_str(text: &str, source: RecordSource) -> Result<Record, IngestError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| IngestError::Parse(e.to_string()))?;
    if value.get("ainvs").is_some() {
        let j: CurveRecordJson = serde_json::from_value(value)
            .map_err(|e| IngestError::Parse(e.to_string()))?;
        Ok(Record::Curve(curve_from_json(j, source)?))
    } else if value.get("level").is_some() {
        let j: EigenformRecordJson = serde_json::from_value(value)
            .map_err(|e| IngestError::Parse(e.to_string()))?;
        Ok(Record::Eigenform(eigenform_from_json(j, source)?))
    } else {
        Err(IngestError::Parse(
            "record has neither `ainvs` (curve) nor `level` (eigenform)".into(),
        ))
    }
}

pub fn load_record(path: &Path) -> Result<Record, IngestError> {
    let text = std::fs::read_to_string(path).map_err(|err| IngestError::Io {
        path: path.to_owned(),
        err,
    })?;
    record_from_str(&text, RecordSource::User)
}

pub fn record_to_json(rec: &Record) -> String {
    match rec {
        Record::Curve(c) => {
            let j = CurveRecordJson {
                label: c.label.clone(),
                ainvs: c
                    .ainvs
                    .iter()
                    .map(|a| serde_json::Value::String(a.to_string()))
                    .collect(),
                conductor: None,
                certificate: c.certificate.clone(),
            };
            serde_json::to_string_pretty(&j).unwrap()
        }
        Record::Eigenform(f) => {
            let j = EigenformRecordJson {
                label: f.label.clone(),
                level: f.level,
                weight: f.weight,
                a_coeffs: f
                    .a_coeffs
                    .iter()
                    .map(|(k, v)| (k.to_string(), serde_json::Value::String(v.to_string())))
                    .collect(),
                bad_prime_kinds: f
                    .bad_prime_kinds
                    .iter()
                    .map(|(k, v)| (k.to_string(), *v))
                    .collect(),
                certificate: f.certificate.clone(),
            };
            serde_json::to_string_pretty(&j).unwrap()
        }
    }
}

pub fn save_record(path: &Path, rec: &Record) -> Result<(), IngestError> {
    std::fs::write(path, record_to_json(rec)).map_err(|err| IngestError::Io {
        path: path.to_owned(),
        err,
    })
}

/// Bundled fixtures, compiled into the binary so offline runs need no paths.
pub fn fixture(label: &str) -> Option<Record> {
    let text = match label {
        "19a1" => include_str!("../fixtures/19a1.json"),
        "817b1" => include_str!("../fixtures/817b1.json"),
        _ => return None,
    };
    let mut rec = record_from_str(text, RecordSource::Fixture).expect("bundled fixture is valid");
    if let Record::Curve(c) = &mut rec {
        c.source = RecordSource::Fixture;
    }
    Some(rec)
}

// --- remote client -------------------------------------------------------

#[derive(Debug, Clone)]
pub struct IngestConfig {
    /// Base URL of a curve database serving GET {base}/{label} as a curve
    /// record JSON document.
    pub base_url: String,
    pub cache_dir: PathBuf,
    pub offline: bool,
    pub timeout: Duration,
}

impl IngestConfig {
    pub fn new(base_url: &str, cache_dir: &Path) -> Self {
        IngestConfig {
            base_url: base_url.trim_end_matches('/').to_string(),
            cache_dir: cache_dir.to_owned(),
            offline: false,
            timeout: Duration::from_secs(10),
        }
    }
}

fn sha256_hex(data: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(data);
    format!("{:x}", h.finalize())
}

struct CacheLock {
    path: PathBuf,
}

impl CacheLock {
    fn acquire(dir: &Path) -> Result<CacheLock, IngestError> {
        let path = dir.join(".lock");
        for _ in 0..100 {
            match std::fs::OpenOptions::new()
                .write(true)
                .create_new(true)
                .open(&path)
            {
                Ok(_) => return Ok(CacheLock { path }),
                Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                    std::thread::sleep(Duration::from_millis(50));
                }
                Err(err) => return Err(IngestError::Io { path, err }),
            }
        }
        Err(IngestError::Network("cache lock busy".into()))
    }
}

impl Drop for CacheLock {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.path);
    }
}

fn cache_paths(config: &IngestConfig, label: &str) -> (PathBuf, PathBuf) {
    let safe: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect();
    (
        config.cache_dir.join(format!("{safe}.json")),
        config.cache_dir.join(format!("{safe}.sha256")),
    )
}

fn read_cache(config: &IngestConfig, label: &str) -> Result<Option<String>, IngestError> {
    let (data_path, sum_path) = cache_paths(config, label);
    if !data_path.exists() {
        return Ok(None);
    }
    let data = std::fs::read(&data_path).map_err(|err| IngestError::Io {
        path: data_path.clone(),
        err,
    })?;
    let recorded = std::fs::read_to_string(&sum_path)
        .map_err(|_| IngestError::CacheCorrupt(data_path.clone()))?;
    if recorded.trim() != sha256_hex(&data) {
        return Err(IngestError::CacheCorrupt(data_path));
    }
    String::from_utf8(data)
        .map(Some)
        .map_err(|_| IngestError::CacheCorrupt(data_path))
}

fn write_cache(config: &IngestConfig, label: &str, body: &str) -> Result<(), IngestError> {
    std::fs::create_dir_all(&config.cache_dir).map_err(|err| IngestError::Io {
        path: config.cache_dir.clone(),
        err,
    })?;
    let _lock = CacheLock::acquire(&config.cache_dir)?;
    let (data_path, sum_path) = cache_paths(config, label);
    std::fs::write(&data_path, body).map_err(|err| IngestError::Io {
        path: data_path.clone(),
        err,
    })?;
    std::fs::write(&sum_path, sha256_hex(body.as_bytes())).map_err(|err| IngestError::Io {
        path: sum_path,
        err,
    })?;
    Ok(())
}

/// Fetches a curve record by label: bundled fixture first, then the local
/// cache, then (unless offline) the configured HTTP database with three
/// retries and exponential backoff.  Remote records pass the same validation
/// as user files.
pub fn fetch_remote(label: &str, config: &IngestConfig) -> Result<CurveRecord, IngestError> {
    if let Some(Record::Curve(c)) = fixture(label) {
        return Ok(c);
    }
    if let Some(body) = read_cache(config, label)? {
        return match record_from_str(&body, RecordSource::Remote)? {
            Record::Curve(c) => Ok(c),
            Record::Eigenform(_) => Err(IngestError::Validation(
                "cached record is not a curve".into(),
            )),
        };
    }
    if config.offline {
        return Err(IngestError::NotFound(format!(
            "{label}: not a fixture and not cached (offline mode)"
        )));
    }
    let url = format!("{}/{}", config.base_url, label);
    let client = reqwest::blocking::Client::builder()
        .timeout(config.timeout)
        .build()
        .map_err(|e| IngestError::Network(e.to_string()))?;
    let mut last_err = String::new();
    let mut body: Option<String> = None;
    for attempt in 0..3u32 {
        if attempt > 0 {
            std::thread::sleep(Duration::from_millis(100 << attempt));
        }
        match client.get(&url).send() {
            Ok(resp) if resp.status() == reqwest::StatusCode::NOT_FOUND => {
                return Err(IngestError::NotFound(label.to_string()));
            }
            Ok(resp) if resp.status().is_success() => match resp.text() {
                Ok(text) => {
                    body = Some(text);
                    break;
                }
                Err(e) => last_err = e.to_string(),
            },
            Ok(resp) => last_err = format!("HTTP {}", resp.status()),
            Err(e) => last_err = e.to_string(),
        }
    }
    let body = body.ok_or(IngestError::Network(last_err))?;
    let rec = match record_from_str(&body, RecordSource::Remote)? {
        Record::Curve(c) => c,
        Record::Eigenform(_) => {
            return Err(IngestError::Validation(
                "remote record is not a curve".into(),
            ))
        }
    };
    if rec.label.is_empty() {
        return Err(IngestError::Validation(
            "remote record has an empty label".into(),
        ));
    }
    write_cache(config, label, &body)?;
    Ok(rec)
}

/// Resolves a CLI input that is either a path to a record file or a label
/// served by fixtures/cache/remote database.
pub fn resolve_input(input: &str, config: &IngestConfig) -> Result<Record, IngestError> {
    let path = Path::new(input);
    if path.exists() {
        return load_record(path);
    }
    fetch_remote(input, config).map(Record::Curve)
}
