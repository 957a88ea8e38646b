//! Numeric equivalence of a candidate pair potential with Lennard-Jones.

use serde::Serialize;

use ptgp::dataset::lj_pair;
use ptgp::fitness::{compile, eval_program};
use ptgp::{BoxSpec, ExprTree};

/// Below this reference magnitude (in units of epsilon) the check switches
/// from relative to absolute error.
pub const RELATIVE_FLOOR: f64 = 1e-6;

pub const DEFAULT_SAMPLES: usize = 1001;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub r: f64,
    pub candidate: f64,
    pub reference: f64,
    pub abs_error: f64,
    /// `None` where the reference is below the relative floor.
    pub rel_error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub tree: String,
    pub tolerance: f64,
    pub samples: Vec<Sample>,
    /// Largest relative error over samples above the floor; `None` when a
    /// candidate value is non-finite or no sample is above the floor.
    pub max_rel_error: Option<f64>,
    pub max_abs_error: Option<f64>,
    pub verdict: bool,
    pub diagnostic: Option<String>,
}

/// Samples `n_samples` evenly spaced distances on `[r_lo, r_hi]` (both
/// included) and compares the candidate against `lj_pair`.
///
/// # Panics
///
/// If `n_samples < 2` or `tolerance` is not positive.
pub fn check(tree: &ExprTree, spec: &BoxSpec, n_samples: usize, tolerance: f64) -> EquivalenceReport {
    assert!(n_samples >= 2, "need at least two samples");
    assert!(tolerance > 0.0, "tolerance must be positive");
    let program = compile(tree);
    let step = (spec.r_hi - spec.r_lo) / (n_samples - 1) as f64;
    let mut samples = Vec::with_capacity(n_samples);
    let mut verdict = true;
    let mut diagnostic = None;
    let mut max_rel: Option<f64> = None;
    let mut max_abs: Option<f64> = None;
    for i in 0..n_samples {
        let r = if i == n_samples - 1 { spec.r_hi } else { spec.r_lo + step * i as f64 };
        let candidate = eval_program(&program, r);
        let reference = lj_pair(r, spec);
        let abs_error = (candidate - reference).abs();
        let rel_error = (reference.abs() > RELATIVE_FLOOR * spec.epsilon)
            .then(|| abs_error / reference.abs());
        if !candidate.is_finite() {
            verdict = false;
            diagnostic.get_or_insert_with(|| format!("non-finite candidate value at r = {r}"));
        } else {
            max_abs = Some(max_abs.map_or(abs_error, |m: f64| m.max(abs_error)));
            match rel_error {
                Some(rel) => {
                    max_rel = Some(max_rel.map_or(rel, |m: f64| m.max(rel)));
                    verdict &= rel <= tolerance;
                }
                None => verdict &= abs_error <= tolerance * spec.epsilon,
            }
        }
        samples.push(Sample { r, candidate, reference, abs_error, rel_error });
    }
    if diagnostic.is_some() {
        max_rel = None;
        max_abs = None;
    }
    EquivalenceReport {
        tree: tree.to_infix(),
        tolerance,
        samples,
        max_rel_error: max_rel,
        max_abs_error: max_abs,
        verdict,
        diagnostic,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ptgp::parse_infix;

    fn verdict(text: &str, tol: f64) -> EquivalenceReport {
        check(&parse_infix(text).unwrap(), &BoxSpec::default(), DEFAULT_SAMPLES, tol)
    }

    #[test]
    fn exact_form_passes_tightly() {
        assert!(verdict("4*(1/R^12) - 4*(1/R^6)", 1e-12).verdict);
    }

    #[test]
    fn rearranged_equivalents_pass() {
        assert!(verdict("((R^(-13) - R^(-7))*(R^1 + 19*R))/(abs(0/R) + abs(5)*1)", 1e-9).verdict);
        assert!(verdict("abs((-4)/(R^12)) - abs((-4)/(R^6))", 1e-9).verdict);
    }

    #[test]
    fn zero_fails_with_unit_relative_error() {
        let report = verdict("0", 1e-9);
        assert!(!report.verdict);
        assert_eq!(report.max_rel_error, Some(1.0));
    }

    #[test]
    fn grid_is_inclusive() {
        let report = verdict("R", 1e-9);
        assert_eq!(report.samples.len(), 1001);
        assert_eq!(report.samples[0].r, 0.7);
        assert_eq!(report.samples[1000].r, 2.0);
    }

    #[test]
    fn non_finite_candidate_fails() {
        let report = verdict("1/(R - R)", 1e-9);
        assert!(!report.verdict);
        assert!(report.diagnostic.is_some());
    }

    #[test]
    fn near_miss_is_rejected() {
        let report = verdict("(R^(-12) - R^(-6))*4 + 1/1000", 1e-9);
        assert!(!report.verdict);
    }
}
