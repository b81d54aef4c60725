//! Machine-readable certificates: a serializable record that a specific
//! set was built, sized, exhaustively verified and checked against the
//! exact bounds, with timings per phase.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{main_bound_check, param_window_check};
use crate::construction::{
    exclusion_size, initial_size_formula, layer_exclusion, special_layer_size, Construction,
};
use crate::geometry::{Dim, Line};
use crate::pointset::PointSet;
use crate::verifier::{is_blocking_with, is_line_free_with, Verdict, VerifyOptions};

pub const SCHEMA_VERSION: &str = "1";

/// Default seed for every piece of seeded randomness around the tool
/// (recorded in certificates; the certification pipeline itself is
/// deterministic).
pub const DEFAULT_SEED: u64 = 0x11_5EED;

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error("certification applies to 3-dimensional sets, got dimension {0}")]
    WrongDimension(usize),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct LineRepr {
    pub base: Vec<u32>,
    pub dir: Vec<u32>,
}

impl LineRepr {
    fn from_line(line: &Line) -> LineRepr {
        LineRepr {
            base: line.base().coords().to_vec(),
            dir: line.dir().coords().to_vec(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct VerdictSummary {
    pub ok: bool,
    pub lines_checked: u64,
    pub probes: u64,
    pub witness: Option<LineRepr>,
}

impl VerdictSummary {
    fn from_verdict(v: &Verdict) -> VerdictSummary {
        VerdictSummary {
            ok: v.ok,
            lines_checked: v.lines_checked,
            probes: v.probes,
            witness: v.witness.as_ref().map(LineRepr::from_line),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CertParams {
    pub r: u32,
    pub s: u32,
    pub l: u32,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CertSizes {
    pub hypercube: u64,
    pub s_star: u64,
    pub s: u64,
    /// Deduplicated repair targets (some may already be absent from the
    /// initial set).
    pub removal_targets: u64,
    /// Points actually deleted: s_star of the reference construction
    /// minus the size of its final set.
    pub removed: u64,
    pub complement: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CertChecks {
    pub line_free: VerdictSummary,
    pub complement_blocking: VerdictSummary,
    pub thm3_ok: bool,
    pub param_window_ok: bool,
    pub layer_formula_ok: bool,
    /// Whether the certified set equals the reference construction for
    /// its modulus (always true in build mode; catches corrupt files).
    pub matches_construction: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Durations {
    pub build_secs: f64,
    pub line_free_secs: f64,
    pub complement_blocking_secs: f64,
    pub total_secs: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Provenance {
    pub tool_version: String,
    pub seed: u64,
    pub durations: Durations,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Certificate {
    pub schema_version: String,
    pub p: u64,
    pub params: CertParams,
    pub sizes: CertSizes,
    pub checks: CertChecks,
    pub provenance: Provenance,
}

impl Certificate {
    /// All verdicts and bound checks passed.
    pub fn all_ok(&self) -> bool {
        self.checks.line_free.ok
            && self.checks.complement_blocking.ok
            && self.checks.thm3_ok
            && self.checks.param_window_ok
            && self.checks.layer_formula_ok
            && self.checks.matches_construction
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Certificate> {
        serde_json::from_str(text)
    }
}

/// Every special layer's enumerated sizes agree with the closed forms,
/// and the initial set's enumerated size equals its closed form.
fn layer_formulas_hold(c: &Construction) -> bool {
    if c.initial.cardinality() != initial_size_formula(&c.params) {
        return false;
    }
    for i in c.params.special_layers() {
        let a = layer_exclusion(&c.params, i).expect("i is special");
        if a.cardinality() != exclusion_size(&c.params) {
            return false;
        }
        if c.initial.layer(i).cardinality() != special_layer_size(&c.params) {
            return false;
        }
    }
    true
}

/// Builds the reference construction for `m` and certifies it.
pub fn certify_built(
    m: crate::field::PrimeModulus,
    opts: &VerifyOptions,
    seed: u64,
) -> Certificate {
    let t0 = Instant::now();
    let c = Construction::build(m);
    let build_secs = t0.elapsed().as_secs_f64();
    certify_with(&c, &c.set, true, build_secs, opts, seed)
}

/// Certifies an externally supplied 3-dimensional set against the
/// reference construction for its modulus.
pub fn certify_set(
    set: &PointSet,
    opts: &VerifyOptions,
    seed: u64,
) -> Result<Certificate, CertifyError> {
    if set.dim() != Dim::Three {
        return Err(CertifyError::WrongDimension(set.dim().n()));
    }
    let t0 = Instant::now();
    let c = Construction::build(set.modulus());
    let build_secs = t0.elapsed().as_secs_f64();
    let matches = *set == c.set;
    Ok(certify_with(&c, set, matches, build_secs, opts, seed))
}

fn certify_with(
    c: &Construction,
    set: &PointSet,
    matches_construction: bool,
    build_secs: f64,
    opts: &VerifyOptions,
    seed: u64,
) -> Certificate {
    let m = c.params.modulus();
    let p = m.p() as u64;
    let total0 = Instant::now();

    let t = Instant::now();
    let line_free = is_line_free_with(set, opts);
    let line_free_secs = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let complement_blocking = is_blocking_with(&set.complement(), opts);
    let complement_blocking_secs = t.elapsed().as_secs_f64();

    let size = set.cardinality();
    Certificate {
        schema_version: SCHEMA_VERSION.to_string(),
        p,
        params: CertParams {
            r: c.params.r(),
            s: c.params.s(),
            l: c.params.l(),
            degenerate: c.params.degenerate(),
        },
        sizes: CertSizes {
            hypercube: (p - 1).pow(3),
            s_star: c.initial.cardinality(),
            s: size,
            removal_targets: c.targets.cardinality(),
            removed: c.removed(),
            complement: p.pow(3) - size,
        },
        checks: CertChecks {
            line_free: VerdictSummary::from_verdict(&line_free),
            complement_blocking: VerdictSummary::from_verdict(&complement_blocking),
            thm3_ok: main_bound_check(m, size),
            param_window_ok: param_window_check(&c.params),
            layer_formula_ok: layer_formulas_hold(c),
            matches_construction,
        },
        provenance: Provenance {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            durations: Durations {
                build_secs,
                line_free_secs,
                complement_blocking_secs,
                total_secs: build_secs + total0.elapsed().as_secs_f64(),
            },
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeModulus;
    use crate::geometry::Point;

    fn m(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn built_certificate_passes_and_roundtrips() {
        let cert = certify_built(m(17), &VerifyOptions::default(), DEFAULT_SEED);
        assert!(cert.all_ok());
        assert_eq!(cert.schema_version, "1");
        assert_eq!(cert.sizes.s, 4105);
        assert_eq!(cert.sizes.s + cert.sizes.complement, 17u64.pow(3));
        assert_eq!(cert.sizes.removed, 0);
        assert!(cert.checks.line_free.witness.is_none());

        let back = Certificate::from_json(&cert.to_json()).unwrap();
        assert_eq!(back, cert);
        assert!(main_bound_check(m(17), back.sizes.s) == back.checks.thm3_ok);
    }

    #[test]
    fn degenerate_certificate() {
        let cert = certify_built(m(13), &VerifyOptions::default(), DEFAULT_SEED);
        assert!(cert.all_ok());
        assert!(cert.params.degenerate);
        assert_eq!(cert.sizes.s, 1728);
        assert_eq!(cert.sizes.s_star, 1728);
    }

    #[test]
    fn corrupt_set_is_caught() {
        let mm = m(17);
        let mut bad = crate::construction::line_free_set(mm);
        bad.insert(&Point::new(&[15, 16, 0], mm));
        let cert = certify_set(&bad, &VerifyOptions::default(), DEFAULT_SEED).unwrap();
        assert!(!cert.all_ok());
        assert!(!cert.checks.matches_construction);
        // this particular point restores full lines
        assert!(!cert.checks.line_free.ok);
        assert!(cert.checks.line_free.witness.is_some());
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        let s = PointSet::empty(Dim::Two, m(5));
        assert!(matches!(
            certify_set(&s, &VerifyOptions::default(), DEFAULT_SEED),
            Err(CertifyError::WrongDimension(2))
        ));
    }
}
