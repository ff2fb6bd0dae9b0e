//! Construct-and-certify over every bundle and center up to a size bound.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::mutation::Engine;
use crate::oracle::DiskCache;
use crate::toric::{enumerate_specs, valid_centers, BundleSpec, CenterSpec, FanError};
use crate::verify::{certify, Report};

#[derive(Debug, Clone, Serialize)]
pub struct CaseResult {
    pub spec: BundleSpec,
    pub center: String,
    pub codim: usize,
    pub length: usize,
    pub report: Option<Report>,
    pub error: Option<String>,
    pub seconds: f64,
}

impl CaseResult {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.report.as_ref().is_some_and(Report::all_pass)
    }

    /// One table row: spec, center, length, flags, seconds.
    pub fn row(&self) -> String {
        let flags = match (&self.report, &self.error) {
            (Some(r), _) => format!(
                "exc={} semi={} strong={} gram={} len={}",
                r.exceptional as u8,
                r.semiorthogonal as u8,
                r.strong as u8,
                r.gram_unimodular as u8,
                r.length_ok as u8
            ),
            (None, Some(e)) => format!("error: {e}"),
            (None, None) => String::new(),
        };
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        format!(
            "{verdict}  s={} a={:?}  center={:<10} c={} n={:<3} {flags}  {:.3}s",
            self.spec.s,
            self.spec.fiber_degrees,
            self.center,
            self.codim,
            self.length,
            self.seconds
        )
    }
}

/// Every `(spec, center)` with `s + r <= max_dim`, `a_i <= max_degree` and
/// center codimension in `codims`, in a fixed order. Centers whose center
/// variety would have negative dimension are skipped.
pub fn cases(max_dim: usize, max_degree: i64, codims: &[usize]) -> Vec<(BundleSpec, CenterSpec)> {
    let mut out = Vec::new();
    for spec in enumerate_specs(max_dim, max_degree) {
        for &c in codims {
            for center in valid_centers(&spec, c) {
                match crate::toric::center_geometry(&spec, &center) {
                    Err(FanError::DegenerateCenter { .. }) => continue,
                    _ => out.push((spec.clone(), center)),
                }
            }
        }
    }
    out
}

pub fn run_case(spec: &BundleSpec, center: &CenterSpec, cache: Option<DiskCache>) -> CaseResult {
    let start = Instant::now();
    let mut result = CaseResult {
        spec: spec.clone(),
        center: center.to_string(),
        codim: center.codim(),
        length: 0,
        report: None,
        error: None,
        seconds: 0.0,
    };
    match Engine::with_cache(spec, center, cache) {
        Err(e) => result.error = Some(e.to_string()),
        Ok(engine) => match engine.construct() {
            Err(f) => result.error = Some(f.error.to_string()),
            Ok(col) => {
                result.length = col.len();
                match certify(&engine.oracle, &col, engine.blow.expected_length()) {
                    Ok(r) => result.report = Some(r),
                    Err(e) => result.error = Some(e.to_string()),
                }
            }
        },
    }
    result.seconds = start.elapsed().as_secs_f64();
    result
}

/// Runs all cases in parallel; results keep the enumeration order.
pub fn run(
    max_dim: usize,
    max_degree: i64,
    codims: &[usize],
    cache: Option<DiskCache>,
) -> Vec<CaseResult> {
    cases(max_dim, max_degree, codims)
        .par_iter()
        .map(|(spec, center)| run_case(spec, center, cache.clone()))
        .collect()
}
