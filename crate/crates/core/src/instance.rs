//! Precomputed planning data for one (venue, parameters, β) triple.

use rayon::prelude::*;

use crate::channel::{in_beam, link_profile, ChannelParams, LinkProfile, Steering};
use crate::error::{Error, Result};
use crate::orientation::OrientationDistribution;
use crate::scenarios::{LinkMask, ScenarioPartition};
use crate::venue::Venue;

/// Per-GP connectivity requirements: the run-wide value unless the venue overrides a seat.
pub fn resolve_betas(venue: &Venue, beta: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidParameter(format!(
            "beta = {beta} outside [0, 1]"
        )));
    }
    Ok(venue
        .grid_positions
        .iter()
        .map(|g| g.beta.unwrap_or(beta))
        .collect())
}

pub struct Instance<'a> {
    pub venue: &'a Venue,
    pub params: &'a ChannelParams,
    pub betas: Vec<f64>,
    /// `profiles[m][l]`, main TX lobe assumed.
    profiles: Vec<Vec<LinkProfile>>,
    partitions: Vec<ScenarioPartition>,
    /// `footprints[l][s]`: GP ids inside the main lobe of AP `l` at steering index `s`.
    footprints: Vec<Vec<Vec<usize>>>,
    total_presence: f64,
}

impl<'a> Instance<'a> {
    pub fn new(venue: &'a Venue, params: &'a ChannelParams, betas: Vec<f64>) -> Result<Self> {
        venue.validate()?;
        params.validate()?;
        if betas.len() != venue.num_gps() {
            return Err(Error::InvalidParameter(format!(
                "{} betas for {} grid positions",
                betas.len(),
                venue.num_gps()
            )));
        }
        if let Some(b) = betas.iter().find(|b| !(0.0..=1.0).contains(*b)) {
            return Err(Error::InvalidParameter(format!(
                "beta = {b} outside [0, 1]"
            )));
        }
        let l_count = venue.num_candidates();
        let profiles: Vec<Vec<LinkProfile>> = (0..venue.num_gps())
            .into_par_iter()
            .map(|m| {
                (0..l_count)
                    .map(|l| link_profile(venue, params, m, l, None))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let partitions = profiles
            .par_iter()
            .enumerate()
            .map(|(m, p)| {
                let dist = OrientationDistribution::for_gp(&venue.grid_positions[m]);
                ScenarioPartition::build(m, &dist, p)
            })
            .collect();
        let footprints = (0..l_count)
            .into_par_iter()
            .map(|l| {
                (0..params.steering_count())
                    .map(|s| {
                        let st = params.steering(s);
                        let mut gps = Vec::new();
                        for m in 0..venue.num_gps() {
                            if in_beam(venue, l, m, st, params.ap_beamwidth)? {
                                gps.push(m);
                            }
                        }
                        Ok(gps)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            venue,
            params,
            betas,
            profiles,
            partitions,
            footprints,
            total_presence: venue.total_presence(),
        })
    }

    /// Convenience constructor with a uniform β (venue overrides still apply).
    pub fn with_beta(venue: &'a Venue, params: &'a ChannelParams, beta: f64) -> Result<Self> {
        Self::new(venue, params, resolve_betas(venue, beta)?)
    }

    pub fn num_gps(&self) -> usize {
        self.venue.num_gps()
    }

    pub fn num_candidates(&self) -> usize {
        self.venue.num_candidates()
    }

    pub fn q(&self, m: usize) -> f64 {
        self.venue.grid_positions[m].q
    }

    pub fn total_presence(&self) -> f64 {
        self.total_presence
    }

    pub fn profile(&self, m: usize, l: usize) -> &LinkProfile {
        &self.profiles[m][l]
    }

    pub fn profiles_of(&self, m: usize) -> &[LinkProfile] {
        &self.profiles[m]
    }

    pub fn partition(&self, m: usize) -> &ScenarioPartition {
        &self.partitions[m]
    }

    pub fn partitions(&self) -> &[ScenarioPartition] {
        &self.partitions
    }

    pub fn footprint(&self, l: usize, s: usize) -> &[usize] {
        &self.footprints[l][s]
    }

    pub fn steering(&self, s: usize) -> Steering {
        self.params.steering(s)
    }

    pub fn connectivity(&self, m: usize, assigned: LinkMask) -> f64 {
        self.partitions[m].connectivity(assigned)
    }

    pub fn satisfied(&self, m: usize, assigned: LinkMask) -> bool {
        self.partitions[m].satisfied(assigned, self.betas[m])
    }

    /// Normalized coverage for a raw `Σ q_m z_m`.
    pub fn normalize(&self, coverage: f64) -> f64 {
        if self.total_presence > 0.0 {
            coverage / self.total_presence
        } else {
            0.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::venue::{generate_venue, GeneratorOverrides, VenueKind};

    #[test]
    fn seat_override_wins_over_run_beta() {
        let mut v = generate_venue(VenueKind::Toy, &GeneratorOverrides::default());
        v.grid_positions[2].beta = Some(0.25);
        let b = resolve_betas(&v, 0.8).unwrap();
        assert_eq!(b[2], 0.25);
        assert!(b.iter().enumerate().all(|(m, &x)| m == 2 || x == 0.8));
        assert!(resolve_betas(&v, 1.01).is_err());
        assert!(resolve_betas(&v, f64::NAN).is_err());
    }

    #[test]
    fn wrong_beta_count_is_rejected() {
        let v = generate_venue(VenueKind::Toy, &GeneratorOverrides::default());
        let p = ChannelParams::default();
        assert!(Instance::new(&v, &p, vec![0.5; 5]).is_err());
        assert!(Instance::new(&v, &p, vec![0.5, 0.5, 0.5, 0.5, 0.5, -0.1]).is_err());
    }

    #[test]
    fn footprints_match_beam_test() {
        let v = generate_venue(VenueKind::Toy, &GeneratorOverrides::default());
        let p = ChannelParams::default();
        let inst = Instance::with_beta(&v, &p, 0.7).unwrap();
        for l in 0..v.num_candidates() {
            for s in 0..p.steering_count() {
                let want: Vec<usize> = (0..v.num_gps())
                    .filter(|&m| in_beam(&v, l, m, p.steering(s), p.ap_beamwidth).unwrap())
                    .collect();
                assert_eq!(inst.footprint(l, s), want.as_slice());
            }
        }
        let q: f64 = v.grid_positions.iter().map(|g| g.q).sum();
        assert!((inst.total_presence() - q).abs() < 1e-12);
        assert!((inst.normalize(inst.total_presence()) - 1.0).abs() < 1e-12);
    }
}
