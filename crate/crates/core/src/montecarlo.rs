//! Monte Carlo replay of the link chain against the analytic scenario model.
//!
//! Random streams: one `ChaCha20Rng` seeded with `seed_from_u64(seed)`, and GP
//! `m` reads stream number `m` of it. Within a stream each sample draws the
//! orientation first, then one shadowing term per assigned AP in ascending id order.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::channel::{link_profile, ChannelParams, LinkEvaluator, Steering};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::orientation::OrientationDistribution;
use crate::scenarios::{bit, meets, LinkMask, ScenarioPartition};
use crate::solver::{assignment_masks, evaluate_coverage, Deployment, Parallelism};
use crate::venue::Venue;
use crate::FORMAT_VERSION;

pub const RNG_NAME: &str = "ChaCha20Rng::seed_from_u64(seed), stream = GP id";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct McConfig {
    pub n_samples: usize,
    pub seed: u64,
    pub sample_shadowing: bool,
    /// Extra margin on top of the planning fade margin, dB.
    pub fade_margin_db: f64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            n_samples: 100_000,
            seed: 1,
            sample_shadowing: false,
            fade_margin_db: 0.0,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::InvalidParameter(
                "n_samples must be at least 1".into(),
            ));
        }
        if !self.fade_margin_db.is_finite() {
            return Err(Error::InvalidParameter("fade margin must be finite".into()));
        }
        Ok(())
    }
}

/// One orientation draw by inverse CDF.
pub fn sample_orientation<R: Rng + ?Sized>(rng: &mut R, dist: &OrientationDistribution) -> f64 {
    dist.quantile(rng.random::<f64>())
}

fn gp_stream(seed: u64, m: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(m as u64);
    rng
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McConnectivity {
    pub gp: usize,
    pub successes: usize,
    pub n_samples: usize,
    pub empirical_prob: f64,
    pub analytic_prob: f64,
    pub abs_error: f64,
    /// Binomial standard error at the analytic probability.
    pub std_error: f64,
    pub within_3sigma: bool,
}

/// Counts samples in which at least one link of `links` is up.
fn replay(
    params: &ChannelParams,
    mc: &McConfig,
    dist: &OrientationDistribution,
    m: usize,
    links: &[LinkEvaluator],
) -> usize {
    let mut rng = gp_stream(mc.seed, m);
    let replay_params = ChannelParams {
        fade_margin_db: params.fade_margin_db + mc.fade_margin_db,
        ..params.clone()
    };
    let std_normal = Normal::standard();
    let mut successes = 0;
    for _ in 0..mc.n_samples {
        let orientation = sample_orientation(&mut rng, dist);
        let mut up = false;
        // no short-circuit: every sample consumes the same stream length
        for link in links {
            let shadow = if mc.sample_shadowing {
                let sigma = if link.is_los(orientation) {
                    params.sigma_los_db
                } else {
                    params.sigma_nlos_db
                };
                sigma * std_normal.inverse_cdf(rng.sample::<f64, _>(Open01))
            } else {
                0.0
            };
            up |= link.is_active(&replay_params, orientation, shadow);
        }
        successes += usize::from(up);
    }
    successes
}

fn summarize(gp: usize, successes: usize, n: usize, analytic: f64) -> McConnectivity {
    let empirical = successes as f64 / n as f64;
    let std_error = (analytic * (1.0 - analytic) / n as f64).max(0.0).sqrt();
    let abs_error = (empirical - analytic).abs();
    McConnectivity {
        gp,
        successes,
        n_samples: n,
        empirical_prob: empirical,
        analytic_prob: analytic,
        abs_error,
        std_error,
        within_3sigma: abs_error <= 3.0 * std_error + 1e-12,
    }
}

fn partition_for(venue: &Venue, params: &ChannelParams, m: usize) -> Result<ScenarioPartition> {
    let profiles = (0..venue.num_candidates())
        .map(|l| link_profile(venue, params, m, l, None))
        .collect::<Result<Vec<_>>>()?;
    let dist = OrientationDistribution::for_gp(&venue.grid_positions[m]);
    Ok(ScenarioPartition::build(m, &dist, &profiles))
}

/// Empirical connectivity of GP `m` served by APs `links` (main TX lobe assumed).
pub fn monte_carlo_connectivity(
    venue: &Venue,
    params: &ChannelParams,
    m: usize,
    links: &[usize],
    mc: &McConfig,
) -> Result<McConnectivity> {
    mc.validate()?;
    if m >= venue.num_gps() {
        return Err(Error::InvalidParameter(format!("unknown GP {m}")));
    }
    let mut ids: Vec<usize> = links.to_vec();
    ids.sort_unstable();
    ids.dedup();
    let evaluators = ids
        .iter()
        .map(|&l| LinkEvaluator::new(venue, params, m, l, None))
        .collect::<Result<Vec<_>>>()?;
    let mask: LinkMask = ids.iter().fold(0, |acc, &l| acc | bit(l));
    let analytic = partition_for(venue, params, m)?.connectivity(mask);
    let dist = OrientationDistribution::for_gp(&venue.grid_positions[m]);
    let successes = replay(params, mc, &dist, m, &evaluators);
    Ok(summarize(m, successes, mc.n_samples, analytic))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McGpRow {
    pub id: usize,
    pub q: f64,
    pub beta: f64,
    pub assigned: Vec<usize>,
    pub analytic_prob: f64,
    pub empirical_prob: f64,
    pub std_error: f64,
    pub within_3sigma: bool,
    pub analytic_z: bool,
    pub empirical_z: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McCoverageReport {
    pub format_version: u32,
    pub rng: String,
    pub config: McConfig,
    pub per_gp: Vec<McGpRow>,
    pub analytic_coverage: f64,
    pub analytic_normalized: f64,
    pub empirical_coverage: f64,
    pub empirical_normalized: f64,
    /// `Σ q_m p̂_m` with a 3σ half-width.
    pub expected_connected_presence: f64,
    pub expected_connected_ci: f64,
    pub within_3sigma_fraction: f64,
}

impl McCoverageReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Replays a deployment: per-GP empirical probabilities, thresholded `z_m` and coverage.
pub fn monte_carlo_coverage(
    inst: &Instance<'_>,
    deployment: &Deployment,
    mc: &McConfig,
    parallelism: Parallelism,
) -> Result<McCoverageReport> {
    mc.validate()?;
    let analytic = evaluate_coverage(inst, deployment)?;
    let masks = assignment_masks(inst, &deployment.selected);
    let steering_of = |l: usize| {
        deployment
            .selected
            .iter()
            .find(|ap| ap.loc == l)
            .map(|ap| Steering {
                theta: ap.theta,
                phi: ap.phi,
            })
    };
    let row = |m: usize| -> Result<McGpRow> {
        let assigned: Vec<usize> = (0..inst.num_candidates())
            .filter(|&l| masks[m] & bit(l) != 0)
            .collect();
        let evaluators = assigned
            .iter()
            .map(|&l| LinkEvaluator::new(inst.venue, inst.params, m, l, steering_of(l)))
            .collect::<Result<Vec<_>>>()?;
        let dist = OrientationDistribution::for_gp(&inst.venue.grid_positions[m]);
        let successes = if evaluators.is_empty() {
            0
        } else {
            replay(inst.params, mc, &dist, m, &evaluators)
        };
        let status = &analytic.per_gp[m];
        let s = summarize(m, successes, mc.n_samples, status.prob);
        Ok(McGpRow {
            id: m,
            q: inst.q(m),
            beta: inst.betas[m],
            assigned,
            analytic_prob: status.prob,
            empirical_prob: s.empirical_prob,
            std_error: s.std_error,
            within_3sigma: s.within_3sigma,
            analytic_z: status.z,
            empirical_z: meets(s.empirical_prob, inst.betas[m]),
        })
    };
    let per_gp: Vec<McGpRow> = match parallelism {
        Parallelism::Serial => (0..inst.num_gps()).map(row).collect::<Result<_>>()?,
        Parallelism::Parallel => (0..inst.num_gps())
            .into_par_iter()
            .map(row)
            .collect::<Result<_>>()?,
    };
    let empirical_coverage: f64 = per_gp
        .iter()
        .filter(|r| r.empirical_z)
        .map(|r| r.q)
        .fold(0.0, |acc, x| acc + x);
    let expected: f64 = per_gp
        .iter()
        .map(|r| r.q * r.empirical_prob)
        .fold(0.0, |acc, x| acc + x);
    let variance: f64 = per_gp
        .iter()
        .map(|r| r.q * r.q * r.empirical_prob * (1.0 - r.empirical_prob) / mc.n_samples as f64)
        .fold(0.0, |acc, x| acc + x);
    let within = per_gp.iter().filter(|r| r.within_3sigma).count();
    Ok(McCoverageReport {
        format_version: FORMAT_VERSION,
        rng: RNG_NAME.into(),
        config: mc.clone(),
        analytic_coverage: analytic.coverage,
        analytic_normalized: analytic.normalized_coverage,
        empirical_coverage,
        empirical_normalized: inst.normalize(empirical_coverage),
        expected_connected_presence: expected,
        expected_connected_ci: 3.0 * variance.sqrt(),
        within_3sigma_fraction: if per_gp.is_empty() {
            1.0
        } else {
            within as f64 / per_gp.len() as f64
        },
        per_gp,
    })
}
