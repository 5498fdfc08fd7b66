//! Catalogue of transform pairs and integral identities with executable checks.
//!
//! Each entry carries the printed formula, an optional corrected formula, a
//! parameter box, a status and an optional calibration constant. The shipped
//! catalogue lives in `data/registry.toml` and is embedded at compile time.

mod checks;

pub use checks::{resolvent_residual, table_pair, TablePair};

use crate::error::{Error, Result};
use crate::quad::QuadratureConfig;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Parameter point of one check, keyed by parameter name.
pub type Params = BTreeMap<String, f64>;

const BUILTIN: &str = include_str!("../../data/registry.toml");

/// Number of draws used by the calibration protocol.
pub const CALIBRATION_DRAWS: usize = 5;
/// Largest relative variance of lhs/rhs accepted as a constant ratio.
pub const CALIBRATION_VARIANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Verified,
    Corrected,
    Failed,
    Unverified,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Status::Verified => "verified",
            Status::Corrected => "corrected",
            Status::Failed => "failed",
            Status::Unverified => "unverified",
        };
        f.write_str(s)
    }
}

/// One coordinate of a parameter box. Integer ranges are inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamRange {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub integer: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityEntry {
    pub id: String,
    pub printed_form: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corrected_form: Option<String>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration_constant: Option<f64>,
    pub tolerance: f64,
    #[serde(default)]
    pub params: Vec<ParamRange>,
}

impl IdentityEntry {
    /// Factor applied to the right side before comparison.
    pub fn calibration(&self) -> f64 {
        self.calibration_constant.unwrap_or(1.0)
    }

    /// Deterministic parameter draws inside the box.
    pub fn draw(&self, seed: u64, trials: usize) -> Vec<Params> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(&self.id));
        (0..trials)
            .map(|_| {
                self.params
                    .iter()
                    .map(|r| {
                        let v = if r.integer {
                            rng.gen_range(r.lo as i64..=r.hi as i64) as f64
                        } else {
                            rng.gen_range(r.lo..r.hi)
                        };
                        (r.name.clone(), v)
                    })
                    .collect()
            })
            .collect()
    }

    fn check_invariants(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Domain(format!("registry entry {}: {m}", self.id)));
        if self.status == Status::Corrected && self.corrected_form.is_none() && self.calibration_constant.is_none() {
            return bad("status 'corrected' needs a corrected form or a calibration constant");
        }
        if !(self.tolerance > 0.0) {
            return bad("tolerance must be positive");
        }
        for r in &self.params {
            if !(r.lo <= r.hi) || (!r.integer && r.lo == r.hi) {
                return bad(&format!("empty range for parameter '{}'", r.name));
            }
        }
        Ok(())
    }
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3))
}

/// Outcome of one check at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: String,
    pub trial: usize,
    pub params: Params,
    pub lhs: f64,
    pub rhs: f64,
    pub lhs_im: f64,
    pub rhs_im: f64,
    pub rel_gap: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub evaluations: usize,
    /// Gap of the literal printed form; `None` when it could not be evaluated.
    pub printed_rel_gap: Option<f64>,
    pub calibration: f64,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
struct RegistryFile {
    entry: Vec<IdentityEntry>,
}

/// Immutable collection of identity entries in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct Registry {
    entries: Vec<IdentityEntry>,
}

/// Measured constant ratio lhs/rhs over a set of draws.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    pub id: String,
    pub constant: f64,
    pub constant_im: f64,
    pub rel_variance: f64,
    pub draws: usize,
}

impl Calibration {
    pub fn is_constant(&self) -> bool {
        self.rel_variance < CALIBRATION_VARIANCE
    }
}

fn gap(lhs: Complex64, rhs: Complex64, scale: f64) -> f64 {
    (lhs - rhs).norm() / rhs.norm().max(scale)
}

impl Registry {
    /// The catalogue shipped with the crate.
    pub fn builtin() -> Self {
        Self::parse(BUILTIN).expect("embedded registry is valid")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: RegistryFile = toml::from_str(text).map_err(|e| Error::Domain(format!("registry file: {e}")))?;
        let mut seen = std::collections::HashSet::new();
        for e in &file.entry {
            e.check_invariants()?;
            if !seen.insert(e.id.clone()) {
                return Err(Error::Domain(format!("duplicate registry id {}", e.id)));
            }
        }
        Ok(Self { entries: file.entry })
    }

    /// Registry text in the layout of the shipped file, one `[[entry]]` table per identity.
    pub fn to_toml_string(&self) -> String {
        let q = |s: &str| toml::Value::String(s.to_string()).to_string();
        let mut out = String::from("# Identity registry. Regenerate with `index-transform verify --suite all --update-registry`.\n");
        for e in &self.entries {
            out.push_str(&format!("\n[[entry]]\nid = {}\nprinted_form = {}\n", q(&e.id), q(&e.printed_form)));
            if let Some(c) = &e.corrected_form {
                out.push_str(&format!("corrected_form = {}\n", q(c)));
            }
            out.push_str(&format!("status = {}\n", q(&e.status.to_string())));
            if let Some(c) = e.calibration_constant {
                out.push_str(&format!("calibration_constant = {c:?}\n"));
            }
            out.push_str(&format!("tolerance = {:?}\nparams = [\n", e.tolerance));
            for r in &e.params {
                let int = if r.integer { ", integer = true" } else { "" };
                out.push_str(&format!("  {{ name = {}, lo = {:?}, hi = {:?}{int} }},\n", q(&r.name), r.lo, r.hi));
            }
            out.push_str("]\n");
        }
        out
    }

    pub fn entries(&self) -> &[IdentityEntry] {
        &self.entries
    }

    pub fn ids(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.id.as_str()).collect()
    }

    pub fn get(&self, id: &str) -> Option<&IdentityEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    fn entry(&self, id: &str) -> Result<&IdentityEntry> {
        self.get(id).ok_or_else(|| Error::Unsupported(format!("unknown identity '{id}'")))
    }

    /// Evaluates entry `id` at `params` and compares with the stored calibration.
    pub fn check_identity(&self, id: &str, params: &Params, cfg: &QuadratureConfig) -> Result<CheckReport> {
        let e = self.entry(id)?;
        Ok(self.report(e, 0, params, cfg))
    }

    fn report(&self, e: &IdentityEntry, trial: usize, params: &Params, cfg: &QuadratureConfig) -> CheckReport {
        let cal = e.calibration();
        let mut r = CheckReport {
            id: e.id.clone(),
            trial,
            params: params.clone(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            lhs_im: 0.0,
            rhs_im: 0.0,
            rel_gap: f64::INFINITY,
            tolerance: e.tolerance,
            passed: false,
            evaluations: 0,
            printed_rel_gap: None,
            calibration: cal,
            detail: None,
        };
        match checks::evaluate(&e.id, params, cfg) {
            Ok(ev) => {
                let rhs = ev.rhs * cal;
                r.lhs = ev.lhs.re;
                r.lhs_im = ev.lhs.im;
                r.rhs = rhs.re;
                r.rhs_im = rhs.im;
                r.rel_gap = gap(ev.lhs, rhs, ev.scale);
                r.evaluations = ev.evaluations;
                r.passed = r.rel_gap <= e.tolerance;
                match ev.printed {
                    Some(Ok((pl, pr))) => r.printed_rel_gap = Some(gap(pl, pr, ev.scale)),
                    Some(Err(err)) => r.detail = Some(format!("printed form not evaluable: {err}")),
                    None if cal != 1.0 => r.printed_rel_gap = Some(gap(ev.lhs, ev.rhs, ev.scale)),
                    None => {}
                }
                if !r.rel_gap.is_finite() {
                    r.passed = false;
                    r.detail = Some("non-finite gap".into());
                }
            }
            Err(err) => r.detail = Some(err.to_string()),
        }
        r
    }

    /// Checks every listed entry at `trials` deterministic draws; reports follow the order of `ids`.
    pub fn run_suite(&self, ids: &[&str], seed: u64, trials: usize, cfg: &QuadratureConfig) -> Result<Vec<CheckReport>> {
        let mut out = Vec::new();
        for id in ids {
            let e = self.entry(id)?;
            for (k, p) in e.draw(seed, trials).iter().enumerate() {
                out.push(self.report(e, k, p, cfg));
            }
        }
        Ok(out)
    }

    /// Constant-ratio protocol: weighted mean and relative variance of lhs/rhs over
    /// `CALIBRATION_DRAWS` draws. Entries whose right side vanishes identically yield `None`.
    pub fn calibrate(&self, id: &str, seed: u64, cfg: &QuadratureConfig) -> Result<Option<Calibration>> {
        let e = self.entry(id)?;
        let mut pairs = Vec::new();
        for p in e.draw(seed, CALIBRATION_DRAWS) {
            let ev = checks::evaluate(id, &p, cfg)?;
            pairs.push((ev.lhs, ev.rhs));
        }
        let weight: f64 = pairs.iter().map(|(_, r)| r.norm_sqr()).sum();
        if weight == 0.0 {
            return Ok(None);
        }
        // c minimises Σ|lhs − c·rhs|², i.e. the ratio weighted by |rhs|².
        let num: Complex64 = pairs.iter().map(|(l, r)| l * r.conj()).sum();
        let c = num / weight;
        let var: f64 = pairs.iter().map(|(l, r)| (l - r * c).norm_sqr()).sum::<f64>() / (weight * c.norm_sqr());
        Ok(Some(Calibration { id: id.to_string(), constant: c.re, constant_im: c.im, rel_variance: var, draws: pairs.len() }))
    }

    /// New registry with statuses (and, where given, calibration constants) set from suite outcomes.
    ///
    /// An entry with reports becomes `failed` if any report failed, otherwise
    /// `corrected` when it carries a corrected form or a calibration constant and
    /// `verified` when neither. Entries without reports keep their status.
    pub fn adjudicate(&self, reports: &[CheckReport], calibrations: &[Calibration]) -> Registry {
        let mut entries = self.entries.clone();
        for e in &mut entries {
            if let Some(c) = calibrations.iter().find(|c| c.id == e.id && c.is_constant() && c.constant_im.abs() < 1e-9 * c.constant.abs()) {
                // A ratio within the entry tolerance of 1 is numerical noise, not a normalisation change.
                let rounded = round_sig(c.constant, 9);
                e.calibration_constant = if (rounded - 1.0).abs() <= e.tolerance { None } else { Some(rounded) };
            }
            let mine: Vec<&CheckReport> = reports.iter().filter(|r| r.id == e.id).collect();
            if mine.is_empty() {
                continue;
            }
            e.status = if mine.iter().any(|r| !r.passed) {
                Status::Failed
            } else if e.corrected_form.is_some() || e.calibration_constant.is_some() {
                Status::Corrected
            } else {
                Status::Verified
            };
        }
        Registry { entries }
    }
}

fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let e = x.abs().log10().floor() as i32;
    let m = 10f64.powi(digits - 1 - e);
    (x * m).round() / m
}

/// Entry ids grouped under a CLI suite name; `None` for an unknown name.
pub fn suite_ids(registry: &Registry, suite: &str) -> Option<Vec<String>> {
    let ids: &[&str] = match suite {
        "all" => return Some(registry.ids().iter().map(|s| s.to_string()).collect()),
        "none" => &[],
        "dbw" => &["DBW", "BETA2", "REP3F2", "NUM_GAMMA", "DEN_GAMMA", "DBW_EXT"],
        "nr" => &["NR"],
        "table" => &["T1", "T2", "T3", "T4", "T5", "T6"],
        "wilson" => &["WILSON_JACOBI", "WHIPPLE_TERMINATING", "WILSON_ORTHO"],
        "whipple" => &["WHIPPLE", "WHIPPLE_TERMINATING"],
        "resolvent" => &["GREEN", "RESOLVENT"],
        "operators" => &["OP_D", "OP_P", "OP_H", "BPM"],
        "barnes" => &["INT1", "INT2"],
        _ => return None,
    };
    Some(ids.iter().map(|s| s.to_string()).collect())
}
