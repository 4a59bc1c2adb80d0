//! Run configuration files and the solver comparison sweep.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::solver::{
    approximation_bound, exact_place, greedy_place, location_difference, uniform_place,
    ExactLimits, Parallelism,
};
use crate::venue::Venue;
use crate::FORMAT_VERSION;

/// Contents of a `--params` file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default = "crate::default_format_version")]
    pub format_version: u32,
    #[serde(default)]
    pub params: ChannelParams,
}

impl RunConfig {
    pub fn new(params: ChannelParams) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            params,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        check_version(cfg.format_version)?;
        cfg.params.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

pub fn check_version(v: u32) -> Result<()> {
    if v == FORMAT_VERSION {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "unsupported format_version {v} (expected {FORMAT_VERSION})"
        )))
    }
}

/// One CSV row of a comparison sweep. Empty cells mean "not available".
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    #[serde(rename = "W")]
    pub w: f64,
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "L_greedy")]
    pub l_greedy: Option<usize>,
    #[serde(rename = "L_exact")]
    pub l_exact: Option<usize>,
    pub coverage_greedy: f64,
    pub coverage_exact: Option<f64>,
    pub coverage_uniform: f64,
    /// Empty when unbounded or when no exact solution exists.
    pub analytic_ratio: Option<f64>,
    pub observed_ratio: Option<f64>,
    pub location_diff_pct: Option<f64>,
}

pub struct CompareOptions {
    pub limits: ExactLimits,
    pub parallelism: Parallelism,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            limits: ExactLimits::default(),
            parallelism: Parallelism::Parallel,
        }
    }
}

/// Greedy, exact (when within limits and feasible) and uniform at one operating point.
/// The uniform baseline uses as many APs as greedy.
pub fn compare_point(
    venue: &Venue,
    params: &ChannelParams,
    alpha: f64,
    beta: f64,
    opts: &CompareOptions,
) -> Result<CompareRow> {
    let inst = Instance::with_beta(venue, params, beta)?;
    let greedy = match greedy_place(&inst, alpha, opts.parallelism) {
        Ok((d, t)) => Ok((d, t)),
        Err(Error::Infeasible(inf)) => Err(inf),
        Err(e) => return Err(e),
    };
    let exact = match exact_place(&inst, alpha, opts.limits, opts.parallelism) {
        Ok(d) => Some(d),
        Err(Error::Infeasible(_)) | Err(Error::LimitExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    let (greedy_dep, trace) = match &greedy {
        Ok((d, t)) => (d.clone(), Some(t)),
        Err(inf) => (inf.deployment.clone(), None),
    };
    let n_uniform = greedy_dep.ap_count().clamp(1, inst.num_candidates().max(1));
    let coverage_uniform = if inst.num_candidates() == 0 {
        0.0
    } else {
        uniform_place(&inst, n_uniform)?.normalized_coverage
    };
    let bound = match (trace, &exact) {
        (Some(t), Some(e)) => Some(approximation_bound(venue, t, e)),
        _ => None,
    };
    Ok(CompareRow {
        w: params.ap_beamwidth,
        alpha,
        beta,
        l_greedy: greedy.is_ok().then(|| greedy_dep.ap_count()),
        l_exact: exact.as_ref().map(|e| e.ap_count()),
        coverage_greedy: greedy_dep.normalized_coverage,
        coverage_exact: exact.as_ref().map(|e| e.normalized_coverage),
        coverage_uniform,
        analytic_ratio: bound
            .as_ref()
            .map(|b| b.analytic_ratio)
            .filter(|r| r.is_finite()),
        observed_ratio: bound.as_ref().and_then(|b| b.observed_ratio),
        location_diff_pct: exact
            .as_ref()
            .filter(|_| greedy.is_ok())
            .map(|e| location_difference(&greedy_dep, e)),
    })
}

/// Sweeps beamwidth (outer), then `alpha`, then `beta`.
pub fn compare_sweep(
    venue: &Venue,
    params: &ChannelParams,
    beamwidths: &[f64],
    alphas: &[f64],
    betas: &[f64],
    opts: &CompareOptions,
) -> Result<Vec<CompareRow>> {
    let mut rows = Vec::new();
    for &w in beamwidths {
        let p = ChannelParams {
            ap_beamwidth: w,
            ..params.clone()
        };
        for &alpha in alphas {
            for &beta in betas {
                rows.push(compare_point(venue, &p, alpha, beta, opts)?);
            }
        }
    }
    Ok(rows)
}

pub fn rows_to_csv(rows: &[CompareRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record([
            "W",
            "alpha",
            "beta",
            "L_greedy",
            "L_exact",
            "coverage_greedy",
            "coverage_exact",
            "coverage_uniform",
            "analytic_ratio",
            "observed_ratio",
            "location_diff_pct",
        ])
        .map_err(csv_err)?;
    }
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn rows_from_csv(text: &str) -> Result<Vec<CompareRow>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(csv_err)
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidParameter(format!("csv: {e}"))
}
