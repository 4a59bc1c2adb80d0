//! Orientation scenarios per grid position.
//!
//! The visibility vector of a GP is a function of one random angle, so the
//! circle splits into at most `2·|L_m| + 1` cells on which every link is
//! either up or down. Each cell is one scenario with its probability mass.
//! Cells are linear pieces of `[-π, π]`, cut at the seam and at every
//! effective-interval endpoint.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::angles::{wrap_angle, AngularInterval};
use crate::channel::{LinkClass, LinkProfile};
use crate::orientation::OrientationDistribution;

/// Bitmask over candidate ids.
pub type LinkMask = u64;

/// Slack applied when comparing a connectivity probability with `β`.
pub const PROB_EPS: f64 = 1e-12;

pub fn bit(l: usize) -> LinkMask {
    1u64 << l
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioCell {
    pub lo: f64,
    pub hi: f64,
    pub prob: f64,
    /// Links up for every orientation in the cell.
    pub visible: LinkMask,
}

impl ScenarioCell {
    pub fn interval(&self) -> AngularInterval {
        AngularInterval::from_segment(self.lo, self.hi)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioPartition {
    pub gp: usize,
    pub cells: Vec<ScenarioCell>,
    pub always_on: LinkMask,
    /// Links in `L_m`.
    pub links: LinkMask,
}

impl ScenarioPartition {
    /// Builds the cells from the profiles of GP `gp`; never-on profiles are ignored.
    pub fn build(gp: usize, dist: &OrientationDistribution, profiles: &[LinkProfile]) -> Self {
        let mut always_on = 0;
        let mut links = 0;
        let mut dependent: Vec<(usize, AngularInterval)> = Vec::new();
        let mut cuts = vec![-PI, PI];
        for p in profiles.iter().filter(|p| p.in_lm) {
            debug_assert_eq!(p.gp, gp);
            links |= bit(p.ap);
            match p.class {
                LinkClass::AlwaysOn => always_on |= bit(p.ap),
                LinkClass::OrientationDependent => {
                    let e = p.effective_interval;
                    cuts.extend(e.lo());
                    cuts.extend(e.hi().map(wrap_angle));
                    dependent.push((p.ap, e));
                }
                LinkClass::NeverOn => {}
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let cells = cuts
            .windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                let visible = dependent
                    .iter()
                    .filter(|(_, e)| e.contains(mid))
                    .fold(always_on, |acc, (ap, _)| acc | bit(*ap));
                ScenarioCell {
                    lo: w[0],
                    hi: w[1],
                    prob: dist.segment_mass(w[0], w[1]),
                    visible,
                }
            })
            .collect();
        Self {
            gp,
            cells,
            always_on,
            links,
        }
    }

    /// `Pr{ at least one link of `assigned` is up }`.
    pub fn connectivity(&self, assigned: LinkMask) -> f64 {
        if assigned & self.always_on != 0 {
            return 1.0;
        }
        self.cells
            .iter()
            .filter(|c| c.visible & assigned != 0)
            .map(|c| c.prob)
            .fold(0.0, |acc, x| acc + x)
    }

    /// Chance constraint `Pr{connected} ≥ β`.
    pub fn satisfied(&self, assigned: LinkMask, beta: f64) -> bool {
        meets(self.connectivity(assigned), beta)
    }

    pub fn total_mass(&self) -> f64 {
        self.cells
            .iter()
            .map(|c| c.prob)
            .fold(0.0, |acc, x| acc + x)
    }
}

/// Threshold test shared by every solver and report.
pub fn meets(prob: f64, beta: f64) -> bool {
    prob + PROB_EPS >= beta
}

pub fn connectivity_probability(partition: &ScenarioPartition, assigned: LinkMask) -> f64 {
    partition.connectivity(assigned)
}

pub fn satisfied(partition: &ScenarioPartition, assigned: LinkMask, beta: f64) -> bool {
    partition.satisfied(assigned, beta)
}
