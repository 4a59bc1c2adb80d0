//! Path loss, flat-top antenna gains, SNR and per-link classification.
//!
//! A link is classified once per (GP, AP) pair from the static geometry and
//! the mean link budget (no shadowing). The classification yields the
//! *effective interval*: the set of user orientations for which the link is
//! up. Every piece of that set is an arc centered on the GP→AP azimuth, so the
//! result is always a single arc.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::angles::{angular_distance, AngularInterval, ArcSet, ANGLE_EPS};
use crate::error::{Error, Result};
use crate::venue::Venue;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Link-budget and antenna parameters for a planning run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChannelParams {
    /// Path loss at 1 m, dB.
    pub kappa_db: f64,
    pub alpha_los: f64,
    pub alpha_nlos: f64,
    pub sigma_los_db: f64,
    pub sigma_nlos_db: f64,
    pub tx_power_dbm: f64,
    pub noise_power_dbm: f64,
    pub snr_threshold_db: f64,
    /// AP beamwidth `W`, radians.
    pub ap_beamwidth: f64,
    /// MD beamwidth `w`, radians.
    pub md_beamwidth: f64,
    pub side_lobe_gain_db: f64,
    /// Fixed main-lobe gain; `None` uses the solid-angle value `2/(1-cos(bw/2))`.
    pub main_lobe_gain_db: Option<f64>,
    /// Steering elevations, measured from the downward vertical.
    pub elevation_grid: Vec<f64>,
    pub azimuth_grid: Vec<f64>,
    pub capacity_per_beam: usize,
    /// Half-width of the orientation arc in which the user's own body leaves the LoS open.
    pub self_block_half_angle: f64,
    /// Subtracted from every planning SNR.
    pub fade_margin_db: f64,
    /// Let link budgets through bodies count toward connectivity.
    pub nlos_counts: bool,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            kappa_db: 70.0,
            alpha_los: 2.0,
            alpha_nlos: 4.0,
            sigma_los_db: 5.2,
            sigma_nlos_db: 7.6,
            tx_power_dbm: 30.0,
            noise_power_dbm: -74.0,
            snr_threshold_db: 10.0,
            ap_beamwidth: 2.0 * PI / 3.0,
            md_beamwidth: FRAC_PI_2,
            side_lobe_gain_db: -2.0,
            main_lobe_gain_db: None,
            elevation_grid: (0..3).map(|n| n as f64 * FRAC_PI_4).collect(),
            azimuth_grid: (0..8).map(|n| n as f64 * FRAC_PI_4).collect(),
            capacity_per_beam: 128,
            self_block_half_angle: FRAC_PI_2,
            fade_margin_db: 0.0,
            nlos_counts: false,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        for (name, w) in [
            ("ap_beamwidth", self.ap_beamwidth),
            ("md_beamwidth", self.md_beamwidth),
        ] {
            if !(w > 0.0 && w < 2.0 * PI) {
                return bad(format!("{name} = {w} outside (0, 2π)"));
            }
        }
        if self.alpha_los > self.alpha_nlos {
            return bad(format!(
                "alpha_los = {} exceeds alpha_nlos = {}",
                self.alpha_los, self.alpha_nlos
            ));
        }
        if self.sigma_los_db < 0.0 || self.sigma_nlos_db < 0.0 {
            return bad("shadowing deviations must be non-negative".into());
        }
        if self.capacity_per_beam < 1 {
            return bad("capacity_per_beam must be at least 1".into());
        }
        if self.elevation_grid.is_empty() || self.azimuth_grid.is_empty() {
            return bad("steering grids must be non-empty".into());
        }
        if !(self.self_block_half_angle > 0.0 && self.self_block_half_angle <= PI) {
            return bad(format!(
                "self_block_half_angle = {} outside (0, π]",
                self.self_block_half_angle
            ));
        }
        Ok(())
    }

    /// Main-lobe gain in dB for an antenna of the given beamwidth.
    pub fn main_gain_db(&self, beamwidth: f64) -> f64 {
        self.main_lobe_gain_db
            .unwrap_or_else(|| linear_to_db(main_lobe_gain(beamwidth)))
    }

    pub fn steering_count(&self) -> usize {
        self.elevation_grid.len() * self.azimuth_grid.len()
    }

    /// Steering tuple for flat index `s = θ_index · |Φ| + φ_index`.
    pub fn steering(&self, s: usize) -> Steering {
        let nphi = self.azimuth_grid.len();
        Steering {
            theta: self.elevation_grid[s / nphi],
            phi: self.azimuth_grid[s % nphi],
        }
    }

    /// Flat index of a steering tuple that lies on the grid.
    pub fn steering_index(&self, st: Steering) -> Option<usize> {
        let ti = self
            .elevation_grid
            .iter()
            .position(|&t| (t - st.theta).abs() <= 1e-9)?;
        let pi = self
            .azimuth_grid
            .iter()
            .position(|&p| angular_distance(p, st.phi) <= 1e-9)?;
        Some(ti * self.azimuth_grid.len() + pi)
    }
}

/// Solid-angle normalized main-lobe gain `2 / (1 - cos(bw/2))`, linear.
pub fn main_lobe_gain(beamwidth: f64) -> f64 {
    2.0 / (1.0 - (0.5 * beamwidth).cos())
}

/// Flat-top sectored pattern, linear gain. Main lobe is inclusive at `±bw/2`.
pub fn flat_top_gain(offset_az: f64, offset_el: f64, beamwidth: f64, side_lobe_db: f64) -> f64 {
    let half = 0.5 * beamwidth + ANGLE_EPS;
    let az = crate::angles::wrap_angle(offset_az).abs();
    let el = crate::angles::wrap_angle(offset_el).abs();
    if az <= half && el <= half {
        main_lobe_gain(beamwidth)
    } else {
        db_to_linear(side_lobe_db)
    }
}

/// Beam steering of an AP: elevation from nadir and azimuth from +x.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Steering {
    pub theta: f64,
    pub phi: f64,
}

impl Steering {
    /// A beam along the downward vertical has no meaningful azimuth.
    pub fn is_nadir(&self) -> bool {
        self.theta.abs() <= ANGLE_EPS
    }
}

/// Whether GP `m` falls in the main lobe of AP `l` steered at `st`.
///
/// The elevation offset compares `θ` with the nadir angle `π − ψ_TX`. The
/// azimuth offset is ignored for a nadir beam or a GP straight below the AP.
pub fn in_beam(venue: &Venue, l: usize, m: usize, st: Steering, beamwidth: f64) -> Result<bool> {
    let (az, el) = steering_offsets(venue, l, m, st)?;
    let half = 0.5 * beamwidth + ANGLE_EPS;
    Ok(az <= half && el <= half)
}

/// Absolute (azimuth, elevation) offsets of GP `m` from the beam axis of AP `l`.
pub fn steering_offsets(venue: &Venue, l: usize, m: usize, st: Steering) -> Result<(f64, f64)> {
    let tx = venue.tx_angles(l, m)?;
    let nadir = PI - tx.elevation;
    let az = if st.is_nadir() || tx.vertical {
        0.0
    } else {
        angular_distance(st.phi, tx.azimuth)
    };
    Ok((az, (st.theta - nadir).abs()))
}

/// Positive path loss `κ + α·10·log10(d) + χ`, dB.
pub fn path_loss_db(params: &ChannelParams, d: f64, los: bool, shadowing_db: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::Domain(format!("distance must be positive, got {d}")));
    }
    let alpha = if los {
        params.alpha_los
    } else {
        params.alpha_nlos
    };
    Ok(params.kappa_db + alpha * 10.0 * d.log10() + shadowing_db)
}

pub fn snr_db(
    params: &ChannelParams,
    d: f64,
    tx_gain_db: f64,
    rx_gain_db: f64,
    los: bool,
    shadowing_db: f64,
) -> Result<f64> {
    let loss = path_loss_db(params, d, los, shadowing_db)?;
    Ok(params.tx_power_dbm + tx_gain_db + rx_gain_db - loss - params.noise_power_dbm)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkClass {
    NeverOn,
    AlwaysOn,
    OrientationDependent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkProfile {
    pub gp: usize,
    pub ap: usize,
    pub distance: f64,
    pub class: LinkClass,
    /// Orientations for which the link meets the SNR threshold.
    pub effective_interval: AngularInterval,
    /// Static LoS azimuth set.
    pub los_interval: AngularInterval,
    /// Orientations that put the AP inside the MD main lobe.
    pub rx_window: AngularInterval,
    pub in_lm: bool,
}

/// Geometry shared by the interval classification and the per-angle chain.
struct LinkGeometry {
    distance: f64,
    los: AngularInterval,
    rx_window: AngularInterval,
    tx_gain_db: f64,
}

fn link_geometry(
    venue: &Venue,
    params: &ChannelParams,
    m: usize,
    l: usize,
    steering: Option<Steering>,
) -> Result<LinkGeometry> {
    let rx = venue.rx_angles(m, l)?;
    let (b, a) = venue.los_angle_sets(m, l, params.self_block_half_angle)?;
    let rho = venue.grid_positions[m].elevation;
    let los = if a.contains(rho) {
        b
    } else {
        AngularInterval::empty()
    };
    let half_w = 0.5 * params.md_beamwidth;
    let rx_window = if (rho - rx.elevation).abs() > half_w + ANGLE_EPS {
        AngularInterval::empty()
    } else if rx.vertical {
        AngularInterval::full()
    } else {
        AngularInterval::centered(rx.azimuth, half_w)
    };
    let main_tx = params.main_gain_db(params.ap_beamwidth);
    let tx_gain_db = match steering {
        None => main_tx,
        Some(st) => {
            if in_beam(venue, l, m, st, params.ap_beamwidth)? {
                main_tx
            } else {
                params.side_lobe_gain_db
            }
        }
    };
    Ok(LinkGeometry {
        distance: venue.distance(m, l),
        los,
        rx_window,
        tx_gain_db,
    })
}

/// Classifies the link between GP `m` and AP `l` under mean shadowing.
///
/// With `steering = None` the AP main lobe is assumed to cover the GP.
pub fn link_profile(
    venue: &Venue,
    params: &ChannelParams,
    m: usize,
    l: usize,
    steering: Option<Steering>,
) -> Result<LinkProfile> {
    let g = link_geometry(venue, params, m, l, steering)?;
    let main_rx = params.main_gain_db(params.md_beamwidth);
    let side_rx = params.side_lobe_gain_db;
    let ok = |los: bool, rx_gain: f64| -> Result<bool> {
        let s = snr_db(params, g.distance, g.tx_gain_db, rx_gain, los, 0.0)?;
        Ok(s - params.fade_margin_db >= params.snr_threshold_db)
    };

    let los_set = g.los.to_set();
    let rx_set = g.rx_window.to_set();
    let mut active = ArcSet::empty();
    if !g.los.is_empty() {
        if ok(true, side_rx)? {
            active = active.union(&los_set);
        } else if ok(true, main_rx)? {
            active = active.union(&los_set.intersection(&rx_set));
        }
    }
    if params.nlos_counts {
        // Orientations outside the LoS set see the through-body budget.
        if ok(false, side_rx)? {
            active = ArcSet::full();
        } else if ok(false, main_rx)? {
            active = active.union(&rx_set);
        }
    }
    let effective = active
        .to_interval()
        .expect("effective set is a union of arcs sharing one center");
    let class = if effective.is_empty() {
        LinkClass::NeverOn
    } else if effective.is_full() {
        LinkClass::AlwaysOn
    } else {
        LinkClass::OrientationDependent
    };
    Ok(LinkProfile {
        gp: m,
        ap: l,
        distance: g.distance,
        class,
        effective_interval: effective,
        los_interval: g.los,
        rx_window: g.rx_window,
        in_lm: class != LinkClass::NeverOn,
    })
}

/// Evaluates one orientation sample: SNR and whether the link counts as up.
///
/// This is the pointwise counterpart of [`link_profile`] and is what the
/// Monte Carlo replay uses.
#[derive(Clone, Copy, Debug)]
pub struct LinkEvaluator {
    distance: f64,
    los: AngularInterval,
    rx_window: AngularInterval,
    tx_gain_db: f64,
    main_rx_db: f64,
    side_rx_db: f64,
}

impl LinkEvaluator {
    pub fn new(
        venue: &Venue,
        params: &ChannelParams,
        m: usize,
        l: usize,
        steering: Option<Steering>,
    ) -> Result<Self> {
        let g = link_geometry(venue, params, m, l, steering)?;
        Ok(Self {
            distance: g.distance,
            los: g.los,
            rx_window: g.rx_window,
            tx_gain_db: g.tx_gain_db,
            main_rx_db: params.main_gain_db(params.md_beamwidth),
            side_rx_db: params.side_lobe_gain_db,
        })
    }

    pub fn is_los(&self, orientation: f64) -> bool {
        self.los.contains(orientation)
    }

    pub fn snr_db(&self, params: &ChannelParams, orientation: f64, shadowing_db: f64) -> f64 {
        let rx_gain = if self.rx_window.contains(orientation) {
            self.main_rx_db
        } else {
            self.side_rx_db
        };
        snr_db(
            params,
            self.distance,
            self.tx_gain_db,
            rx_gain,
            self.is_los(orientation),
            shadowing_db,
        )
        .expect("distance validated at construction")
    }

    pub fn is_active(&self, params: &ChannelParams, orientation: f64, shadowing_db: f64) -> bool {
        if !params.nlos_counts && !self.is_los(orientation) {
            return false;
        }
        self.snr_db(params, orientation, shadowing_db) - params.fade_margin_db
            >= params.snr_threshold_db
    }
}
