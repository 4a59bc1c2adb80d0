//! Placement and beam-steering solvers and deployment evaluation.
//!
//! Coverage targets are normalized: a deployment meets `α` when
//! `Σ q_m z_m / Σ q_m ≥ α`.

mod bound;
mod exact;
mod greedy;
mod uniform;

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::{in_beam, Steering};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::scenarios::{bit, LinkMask, PROB_EPS};
use crate::FORMAT_VERSION;

pub use bound::{
    approximation_bound, audit_greedy_prices, AuditReport, BoundReport, IterationPrices,
    PriceViolation,
};
pub use exact::{exact_place, ExactLimits};
pub use greedy::{
    greedy_iteration_best, greedy_place, CoverSet, GreedyState, GreedyStep, GreedyTrace, Score,
};
pub use uniform::uniform_place;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Parallelism {
    Serial,
    #[default]
    Parallel,
}

/// One deployed AP: site, beam steering and assigned GPs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlacedAp {
    pub loc: usize,
    pub theta: f64,
    pub phi: f64,
    pub assigned: Vec<usize>,
}

impl PlacedAp {
    pub fn steering(&self) -> Steering {
        Steering {
            theta: self.theta,
            phi: self.phi,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GpStatus {
    pub id: usize,
    pub prob: f64,
    pub z: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Deployment {
    #[serde(default = "crate::default_format_version")]
    pub format_version: u32,
    /// AP beamwidth the plan was made with (drawn by the renderer).
    pub beamwidth_ap: f64,
    pub selected: Vec<PlacedAp>,
    pub coverage: f64,
    pub normalized_coverage: f64,
    pub per_gp: Vec<GpStatus>,
}

impl Deployment {
    pub fn ap_count(&self) -> usize {
        self.selected.len()
    }

    pub fn selected_ids(&self) -> BTreeSet<usize> {
        self.selected.iter().map(|a| a.loc).collect()
    }

    pub fn satisfied_set(&self) -> BTreeSet<usize> {
        self.per_gp.iter().filter(|g| g.z).map(|g| g.id).collect()
    }

    pub fn from_json(text: &str) -> Result<Deployment> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Deployment> {
        Deployment::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub ap_count: usize,
    pub per_gp: Vec<GpStatus>,
    pub coverage: f64,
    pub normalized_coverage: f64,
    pub total_presence: f64,
}

impl CoverageReport {
    pub fn meets(&self, alpha: f64) -> bool {
        self.normalized_coverage + PROB_EPS >= alpha
    }
}

/// Assigned-AP mask per GP.
pub(crate) fn assignment_masks(inst: &Instance<'_>, selected: &[PlacedAp]) -> Vec<LinkMask> {
    let mut masks = vec![0; inst.num_gps()];
    for ap in selected {
        for &m in &ap.assigned {
            masks[m] |= bit(ap.loc);
        }
    }
    masks
}

fn structural_violations(inst: &Instance<'_>, selected: &[PlacedAp]) -> Vec<String> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    let params = inst.params;
    for ap in selected {
        if ap.loc >= inst.num_candidates() {
            out.push(format!("AP {} is not a candidate location", ap.loc));
            continue;
        }
        if !seen.insert(ap.loc) {
            out.push(format!("candidate {} selected more than once", ap.loc));
        }
        if params.steering_index(ap.steering()).is_none() {
            out.push(format!(
                "AP {}: steering (θ={}, φ={}) is not on the steering grid",
                ap.loc, ap.theta, ap.phi
            ));
        }
        let n = ap.assigned.len();
        if n == 0 || n > params.capacity_per_beam {
            out.push(format!(
                "AP {}: {n} assigned GPs outside [1, {}]",
                ap.loc, params.capacity_per_beam
            ));
        }
        let mut members = BTreeSet::new();
        for &m in &ap.assigned {
            if m >= inst.num_gps() {
                out.push(format!("AP {}: unknown GP {m}", ap.loc));
                continue;
            }
            if !members.insert(m) {
                out.push(format!("AP {}: GP {m} assigned twice", ap.loc));
            }
            match in_beam(inst.venue, ap.loc, m, ap.steering(), params.ap_beamwidth) {
                Ok(true) => {}
                Ok(false) => out.push(format!(
                    "AP {}: GP {m} lies outside the beam footprint",
                    ap.loc
                )),
                Err(e) => out.push(format!("AP {}: GP {m}: {e}", ap.loc)),
            }
        }
    }
    out
}

/// Recomputes per-GP connectivity, `z_m` and coverage from scratch.
pub fn evaluate_coverage(inst: &Instance<'_>, deployment: &Deployment) -> Result<CoverageReport> {
    let violations = structural_violations(inst, &deployment.selected);
    if !violations.is_empty() {
        return Err(Error::InvalidDeployment(violations));
    }
    Ok(coverage_of(inst, &deployment.selected))
}

fn coverage_of(inst: &Instance<'_>, selected: &[PlacedAp]) -> CoverageReport {
    let masks = assignment_masks(inst, selected);
    let per_gp: Vec<GpStatus> = masks
        .iter()
        .enumerate()
        .map(|(m, &mask)| {
            let prob = inst.connectivity(m, mask);
            GpStatus {
                id: m,
                prob,
                z: crate::scenarios::meets(prob, inst.betas[m]),
            }
        })
        .collect();
    let coverage = per_gp
        .iter()
        .filter(|g| g.z)
        .map(|g| inst.q(g.id))
        .fold(0.0, |acc, x| acc + x);
    CoverageReport {
        ap_count: selected.len(),
        per_gp,
        coverage,
        normalized_coverage: inst.normalize(coverage),
        total_presence: inst.total_presence(),
    }
}

/// Builds a deployment record with freshly computed coverage fields.
pub(crate) fn finalize(inst: &Instance<'_>, mut selected: Vec<PlacedAp>) -> Deployment {
    for ap in &mut selected {
        ap.assigned.sort_unstable();
    }
    let report = coverage_of(inst, &selected);
    Deployment {
        format_version: FORMAT_VERSION,
        beamwidth_ap: inst.params.ap_beamwidth,
        selected,
        coverage: report.coverage,
        normalized_coverage: report.normalized_coverage,
        per_gp: report.per_gp,
    }
}

pub fn empty_deployment(inst: &Instance<'_>) -> Deployment {
    finalize(inst, Vec::new())
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "alpha = {alpha} outside [0, 1]"
        )))
    }
}

/// Percentage of AP sites not shared by two deployments (symmetric difference over total).
pub fn location_difference(a: &Deployment, b: &Deployment) -> f64 {
    let (sa, sb) = (a.selected_ids(), b.selected_ids());
    let total = sa.len() + sb.len();
    if total == 0 {
        return 0.0;
    }
    100.0 * sa.symmetric_difference(&sb).count() as f64 / total as f64
}
