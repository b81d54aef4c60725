//! Exact-integer bound checks and the comparison table across the known
//! lower and upper bounds.
//!
//! Every pass/fail decision here is made by integer rearrangement
//! (squaring away the square roots); floating point appears only in
//! display-only reference columns.

use serde::Serialize;

use crate::construction::Construction;
use crate::field::{ModulusError, PrimeModulus};
use crate::construction::ConstructionParams;

/// Exact test of  size >= p^3 - 3p^2 + (1/8)p^(3/2) - (7/16)p.
///
/// Rearranged over the integers: with D = 16*size - 16p^3 + 48p^2 + 7p the
/// inequality is equivalent to D >= 2p^(3/2), i.e. D >= 0 and D^2 >= 4p^3.
pub fn main_bound_check(m: PrimeModulus, size: u64) -> bool {
    let p = m.p() as i128;
    let size = size as i128;
    let d = 16 * size - 16 * p.pow(3) + 48 * p.pow(2) + 7 * p;
    d >= 0
        && d.checked_mul(d).expect("bound check overflow") >= 4 * p.pow(3)
}

/// Exact test of the parameter windows
/// sqrt(p)-1 <= r <= sqrt(p),  sqrt(p)-2 <= s <= sqrt(p)+2,
/// (1/4)sqrt(p)-1 <= l <= (1/4)sqrt(p),
/// each decided by squaring-based integer comparisons.
pub fn param_window_check(params: &ConstructionParams) -> bool {
    let p = params.modulus().p() as u128;
    let (r, s, l) = (
        params.r() as u128,
        params.s() as u128,
        params.l() as u128,
    );
    let r_ok = r * r <= p && p <= (r + 1) * (r + 1);
    let s_hi = s <= 2 || (s - 2) * (s - 2) <= p;
    let s_lo = p <= (s + 2) * (s + 2);
    let l_ok = 16 * l * l <= p && p <= 16 * (l + 1) * (l + 1);
    r_ok && s_hi && s_lo && l_ok
}

/// One table row. Integer columns are exact; `*_ref` columns are
/// double-precision reference values for human comparison only and are
/// never used in a verdict.
#[derive(Debug, Clone, Serialize)]
pub struct BoundsRow {
    pub p: u64,
    pub hypercube: u64,
    pub thm1_ref: f64,
    pub s_star: u64,
    pub s: u64,
    pub removed: u64,
    pub thm3_bound_ref: f64,
    pub thm3_ok: bool,
    pub upper_ref: f64,
    pub complement: u64,
    pub degenerate: bool,
}

impl BoundsRow {
    pub fn from_construction(c: &Construction) -> BoundsRow {
        let m = c.params.modulus();
        let p = m.p() as u64;
        let pf = p as f64;
        let s = c.set.cardinality();
        BoundsRow {
            p,
            hypercube: (p - 1).pow(3),
            thm1_ref: ((p - 1).pow(3) + p) as f64 - 2.0 * pf.sqrt(),
            s_star: c.initial.cardinality(),
            s,
            removed: c.removed(),
            thm3_bound_ref: pf.powi(3) - 3.0 * pf.powi(2) + 0.125 * pf.powf(1.5)
                - (7.0 / 16.0) * pf,
            thm3_ok: main_bound_check(m, s),
            upper_ref: pf.powi(3) - 2.0 * pf.powi(2) - (std::f64::consts::SQRT_2 - 1.0) * pf
                + 2.0,
            complement: p.pow(3) - s,
            degenerate: c.params.degenerate(),
        }
    }
}

/// Builds one row per listed prime. Non-primes are rejected.
pub fn make_table(primes: &[u64]) -> Result<Vec<BoundsRow>, ModulusError> {
    primes
        .iter()
        .map(|&q| {
            let m = PrimeModulus::new(q)?;
            Ok(BoundsRow::from_construction(&Construction::build(m)))
        })
        .collect()
}

pub const CSV_HEADER: &str =
    "p,hypercube,thm1_ref,s_star,s,removed,thm3_bound_ref,thm3_ok,upper_ref,complement,degenerate";

/// CSV rendering: a header row then one row per prime; reference columns
/// rounded to two decimals.
pub fn table_to_csv(rows: &[BoundsRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{:.2},{},{},{},{:.2},{},{:.2},{},{}\n",
            r.p,
            r.hypercube,
            r.thm1_ref,
            r.s_star,
            r.s,
            r.removed,
            r.thm3_bound_ref,
            r.thm3_ok,
            r.upper_ref,
            r.complement,
            r.degenerate,
        ));
    }
    out
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// JSON rendering: an array of row objects, reference columns rounded to
/// two decimals.
pub fn table_to_json(rows: &[BoundsRow]) -> serde_json::Value {
    serde_json::Value::Array(
        rows.iter()
            .map(|r| {
                serde_json::json!({
                    "p": r.p,
                    "hypercube": r.hypercube,
                    "thm1_ref": round2(r.thm1_ref),
                    "s_star": r.s_star,
                    "s": r.s,
                    "removed": r.removed,
                    "thm3_bound_ref": round2(r.thm3_bound_ref),
                    "thm3_ok": r.thm3_ok,
                    "upper_ref": round2(r.upper_ref),
                    "complement": r.complement,
                    "degenerate": r.degenerate,
                })
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::primes_in;

    fn m(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn main_bound_examples() {
        // D = 16*4105 - 16*4913 + 48*289 + 7*17 = 1063; 1063^2 >= 4*4913
        assert!(main_bound_check(m(17), 4105));
        assert!(main_bound_check(m(13), 1728));
        assert!(!main_bound_check(m(17), 4000));
    }

    #[test]
    fn main_bound_is_monotone_in_size() {
        // a single false-to-true transition, located near the real threshold
        for p in primes_in(3, 101) {
            let mm = m(p);
            let pf = p as f64;
            let approx = (pf.powi(3) - 3.0 * pf.powi(2) + 0.125 * pf.powf(1.5)
                - (7.0 / 16.0) * pf)
                .max(0.0) as u64;
            let lo = approx.saturating_sub(10);
            let mut transitions = 0;
            let mut prev = main_bound_check(mm, lo);
            assert!(!prev || lo == 0, "p={p}");
            for size in lo + 1..=approx + 10 {
                let ok = main_bound_check(mm, size);
                if ok != prev {
                    assert!(ok, "p={p} size={size}: monotone means false -> true only");
                    transitions += 1;
                }
                prev = ok;
            }
            assert!(transitions <= 1, "p={p}");
            assert!(main_bound_check(mm, p.pow(3)));
            // the bound is negative only at p = 3, where size 0 already passes
            assert_eq!(main_bound_check(mm, 0), p == 3);
        }
    }

    #[test]
    fn window_examples() {
        use crate::construction::derive_params;
        assert!(param_window_check(&derive_params(m(17))));
        assert!(param_window_check(&derive_params(m(101))));
        assert!(param_window_check(&derive_params(m(5))));
        for p in primes_in(5, 101) {
            assert!(param_window_check(&derive_params(m(p))), "p={p}");
        }
    }

    #[test]
    fn table_rows() {
        let rows = make_table(&[17]).unwrap();
        assert_eq!(rows.len(), 1);
        let r = &rows[0];
        assert_eq!(r.hypercube, 4096);
        assert_eq!(r.s, 4105);
        assert!(r.thm3_ok);
        assert!(!r.degenerate);
        assert_eq!(r.complement + r.s, 17u64.pow(3));

        let rows = make_table(&[3]).unwrap();
        assert_eq!(rows[0].s, 8);
        assert!(rows[0].degenerate);

        assert!(matches!(
            make_table(&[4]),
            Err(ModulusError::NotPrime(4))
        ));
    }

    #[test]
    fn csv_and_json_shape() {
        let primes = primes_in(3, 31);
        assert_eq!(primes.len(), 10);
        let rows = make_table(&primes).unwrap();
        let csv = table_to_csv(&rows);
        assert_eq!(csv.lines().count(), 11); // header + one row per prime
        assert_eq!(csv.lines().next().unwrap(), CSV_HEADER);
        let json = table_to_json(&rows);
        assert_eq!(json.as_array().unwrap().len(), 10);
        assert_eq!(json[0]["p"], 3);
        assert_eq!(json[0]["degenerate"], true);
    }
}
