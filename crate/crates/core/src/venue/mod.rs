//! Venue model: seats (grid positions), candidate AP sites and body blockers.

mod generate;

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::angles::AngularInterval;
use crate::error::{Error, Result};
use crate::geometry::{view_angles, BodyPrism, Point3, ViewAngles};
use crate::FORMAT_VERSION;

pub use generate::{generate_venue, random_toy, BodyModel, GeneratorOverrides, VenueKind};

/// Maximum number of candidate sites; link sets are 64-bit masks over candidate ids.
pub const MAX_CANDIDATES: usize = 64;

/// A seat where a user may be present.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPosition {
    pub id: usize,
    /// Location of the mobile device.
    pub pos: Point3,
    /// Mean user orientation (azimuth, radians).
    pub facing: f64,
    /// Constant MD elevation ρ measured from +z.
    pub elevation: f64,
    /// Presence probability.
    pub q: f64,
    pub orientation_std: f64,
    /// Per-seat connectivity requirement overriding the run-wide β.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateLocation {
    pub id: usize,
    pub pos: Point3,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Venue {
    #[serde(default = "default_format_version")]
    pub format_version: u32,
    pub name: String,
    pub grid_positions: Vec<GridPosition>,
    pub candidates: Vec<CandidateLocation>,
    #[serde(default)]
    pub blockers: Vec<BodyPrism>,
}

fn default_format_version() -> u32 {
    FORMAT_VERSION
}

impl Venue {
    pub fn num_gps(&self) -> usize {
        self.grid_positions.len()
    }

    pub fn num_candidates(&self) -> usize {
        self.candidates.len()
    }

    pub fn total_presence(&self) -> f64 {
        self.grid_positions
            .iter()
            .map(|g| g.q)
            .fold(0.0, |acc, x| acc + x)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidVenue(msg));
        if self.grid_positions.is_empty() {
            return bad("venue has no grid positions".into());
        }
        if self.candidates.is_empty() {
            return bad("venue has no candidate locations".into());
        }
        if self.candidates.len() > MAX_CANDIDATES {
            return bad(format!(
                "{} candidates exceed the supported maximum of {MAX_CANDIDATES}",
                self.candidates.len()
            ));
        }
        for (i, gp) in self.grid_positions.iter().enumerate() {
            if gp.id != i {
                return bad(format!("grid position at index {i} has id {}", gp.id));
            }
            if !(0.0..=1.0).contains(&gp.q) {
                return bad(format!("grid position {i}: q = {} outside [0, 1]", gp.q));
            }
            if !(-PI..=PI).contains(&gp.facing) {
                return bad(format!(
                    "grid position {i}: facing {} outside [-π, π]",
                    gp.facing
                ));
            }
            if !(0.0..=FRAC_PI_2).contains(&gp.elevation) {
                return bad(format!(
                    "grid position {i}: elevation {} outside [0, π/2]",
                    gp.elevation
                ));
            }
            if !(gp.orientation_std > 0.0) || !gp.orientation_std.is_finite() {
                return bad(format!(
                    "grid position {i}: orientation_std must be positive, got {}",
                    gp.orientation_std
                ));
            }
            if let Some(b) = gp.beta {
                if !(0.0..=1.0).contains(&b) {
                    return bad(format!("grid position {i}: beta {b} outside [0, 1]"));
                }
            }
        }
        let top = self
            .grid_positions
            .iter()
            .map(|g| g.pos.z)
            .fold(f64::NEG_INFINITY, f64::max);
        for (i, c) in self.candidates.iter().enumerate() {
            if c.id != i {
                return bad(format!("candidate at index {i} has id {}", c.id));
            }
            if c.pos.z <= top {
                return bad(format!(
                    "candidate {i} at z = {} is not above every grid position (max z = {top})",
                    c.pos.z
                ));
            }
        }
        for (k, b) in self.blockers.iter().enumerate() {
            if b.size.iter().any(|&s| !(s > 0.0)) {
                return bad(format!("blocker {k} has non-positive extent {:?}", b.size));
            }
            if let Some(o) = b.owner {
                if o >= self.grid_positions.len() {
                    return bad(format!("blocker {k} owned by unknown grid position {o}"));
                }
            }
        }
        Ok(())
    }

    /// Direction in which AP `l` sees GP `m`.
    pub fn tx_angles(&self, l: usize, m: usize) -> Result<ViewAngles> {
        view_angles(self.candidates[l].pos, self.grid_positions[m].pos)
    }

    /// Direction in which GP `m` sees AP `l`.
    pub fn rx_angles(&self, m: usize, l: usize) -> Result<ViewAngles> {
        view_angles(self.grid_positions[m].pos, self.candidates[l].pos)
    }

    pub fn distance(&self, m: usize, l: usize) -> f64 {
        self.grid_positions[m].pos.distance(&self.candidates[l].pos)
    }

    /// Whether another user's body cuts the MD→AP segment.
    pub fn ray_occluded(&self, m: usize, l: usize) -> bool {
        let a = self.grid_positions[m].pos;
        let b = self.candidates[l].pos;
        self.blockers
            .iter()
            .filter(|p| p.owner != Some(m))
            .any(|p| p.intersects_segment(a, b))
    }

    /// Static LoS azimuth set `B` and elevation set `A` for the pair.
    ///
    /// `B` is the arc of orientations within `self_block_half_angle` of the
    /// direction to the AP; outside it the user's own body is in the way.
    pub fn los_angle_sets(
        &self,
        m: usize,
        l: usize,
        self_block_half_angle: f64,
    ) -> Result<(AngularInterval, AngularInterval)> {
        if self.ray_occluded(m, l) {
            return Ok((AngularInterval::empty(), AngularInterval::empty()));
        }
        let rx = self.rx_angles(m, l)?;
        let b = AngularInterval::centered(rx.azimuth, self_block_half_angle);
        let a = AngularInterval::from_segment(0.0, FRAC_PI_2);
        Ok((b, a))
    }

    pub fn from_json(text: &str) -> Result<Venue> {
        let venue: Venue = serde_json::from_str(text)?;
        venue.validate()?;
        Ok(venue)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Venue> {
        Venue::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}
