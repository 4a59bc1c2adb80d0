//! Independent oracles shared by the integration and acceptance tests.
//!
//! Everything here recomputes results from first principles (positions,
//! link budget, enumeration) rather than through the solver internals.

#![allow(dead_code)]

use std::f64::consts::PI;

use mmwave_planner::angles::ArcSet;
use mmwave_planner::channel::{link_profile, LinkClass};
use mmwave_planner::solver::GreedyState;
use mmwave_planner::venue::random_toy;
use mmwave_planner::{ChannelParams, GeneratorOverrides, Instance, OrientationDistribution, Venue};

pub const PROB_SLACK: f64 = 1e-12;

/// Default parameters with the small-instance beam capacity.
pub fn toy_params() -> ChannelParams {
    ChannelParams {
        capacity_per_beam: 3,
        ..ChannelParams::default()
    }
}

pub fn toy_venue(seed: u64) -> Venue {
    random_toy(seed, &GeneratorOverrides::default())
}

pub fn free_blockers(v: &Venue) -> usize {
    v.blockers.iter().filter(|b| b.owner.is_none()).count()
}

pub fn ang_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

pub fn db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Main-lobe membership from raw coordinates.
pub fn geometric_in_beam(v: &Venue, params: &ChannelParams, l: usize, m: usize, s: usize) -> bool {
    let a = v.candidates[l].pos;
    let g = v.grid_positions[m].pos;
    let (dx, dy, dz) = (g.x - a.x, g.y - a.y, g.z - a.z);
    let r = (dx * dx + dy * dy + dz * dz).sqrt();
    let horizontal = dx.hypot(dy);
    let from_nadir = (-dz / r).clamp(-1.0, 1.0).acos();
    let nphi = params.azimuth_grid.len();
    let theta = params.elevation_grid[s / nphi];
    let phi = params.azimuth_grid[s % nphi];
    let half = 0.5 * params.ap_beamwidth + 1e-12;
    let az_ok =
        theta.abs() <= 1e-12 || horizontal <= 1e-9 * r || ang_dist(phi, dy.atan2(dx)) <= half;
    az_ok && (theta - from_nadir).abs() <= half
}

pub fn geometric_footprint(v: &Venue, params: &ChannelParams, l: usize, s: usize) -> u64 {
    (0..v.num_gps())
        .filter(|&m| geometric_in_beam(v, params, l, m, s))
        .fold(0, |acc, m| acc | 1 << m)
}

/// Full per-orientation link chain with the AP main lobe on the GP and no shadowing.
pub fn pointwise_active(v: &Venue, params: &ChannelParams, m: usize, l: usize, phi: f64) -> bool {
    assert!(!params.nlos_counts);
    let gp = &v.grid_positions[m];
    let a = v.candidates[l].pos;
    let (dx, dy, dz) = (a.x - gp.pos.x, a.y - gp.pos.y, a.z - gp.pos.z);
    let d = (dx * dx + dy * dy + dz * dz).sqrt();
    let vertical = dx.hypot(dy) <= 1e-9 * d;
    let az = if vertical { 0.0 } else { dy.atan2(dx) };
    let el = (dz / d).acos();
    let half_self = params.self_block_half_angle;
    let los = !v.ray_occluded(m, l) && (half_self >= PI || ang_dist(phi, az) <= half_self);
    if !los {
        return false;
    }
    let half_w = 0.5 * params.md_beamwidth;
    let rx_main = (gp.elevation - el).abs() <= half_w && (vertical || ang_dist(phi, az) <= half_w);
    let tx = db(2.0 / (1.0 - (0.5 * params.ap_beamwidth).cos()));
    let rx = if rx_main {
        db(2.0 / (1.0 - (0.5 * params.md_beamwidth).cos()))
    } else {
        params.side_lobe_gain_db
    };
    let loss = params.kappa_db + params.alpha_los * 10.0 * d.log10();
    let snr = params.tx_power_dbm + tx + rx - loss - params.noise_power_dbm;
    snr - params.fade_margin_db >= params.snr_threshold_db
}

/// Sweep sample angles, offset by half a step so they avoid grid-aligned endpoints.
pub fn sweep_angles(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| -PI + (k as f64 + 0.5) * 2.0 * PI / n as f64)
}

/// Effective sets of GP `m` per candidate, as arc sets.
pub fn effective_sets(v: &Venue, params: &ChannelParams, m: usize) -> Vec<ArcSet> {
    (0..v.num_candidates())
        .map(|l| {
            let p = link_profile(v, params, m, l, None).unwrap();
            match p.class {
                LinkClass::AlwaysOn => ArcSet::full(),
                _ => p.effective_interval.to_set(),
            }
        })
        .collect()
}

/// Connectivity as the orientation mass of the union of effective sets.
pub fn union_mass(v: &Venue, params: &ChannelParams, m: usize, mask: u64) -> f64 {
    let dist = OrientationDistribution::for_gp(&v.grid_positions[m]);
    let sets = effective_sets(v, params, m);
    let union = (0..sets.len())
        .filter(|&l| mask >> l & 1 == 1)
        .fold(ArcSet::empty(), |acc, l| acc.union(&sets[l]));
    union.measure(|a, b| dist.segment_mass(a, b))
}

/// Connectivity by summing the mass of every visibility pattern that meets `mask`.
pub fn pattern_enumeration(v: &Venue, params: &ChannelParams, m: usize, mask: u64) -> f64 {
    let dist = OrientationDistribution::for_gp(&v.grid_positions[m]);
    let sets = effective_sets(v, params, m);
    let links: Vec<usize> = (0..sets.len()).filter(|&l| !sets[l].is_empty()).collect();
    let mut total = 0.0;
    for pattern in 0u64..(1 << links.len()) {
        let visible: u64 = links
            .iter()
            .enumerate()
            .filter(|(i, _)| pattern >> i & 1 == 1)
            .fold(0, |acc, (_, &l)| acc | 1 << l);
        if visible & mask == 0 {
            continue;
        }
        let cell = links
            .iter()
            .enumerate()
            .fold(ArcSet::full(), |acc, (i, &l)| {
                if pattern >> i & 1 == 1 {
                    acc.intersection(&sets[l])
                } else {
                    acc.intersection(&sets[l].complement())
                }
            });
        total += cell.measure(|a, b| dist.segment_mass(a, b));
    }
    total
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlatOptimum {
    /// Fewest APs reaching the target; `None` when unreachable.
    pub ap_count: Option<usize>,
    /// Best normalized coverage at that count, or over everything when unreachable.
    pub normalized_coverage: f64,
}

fn subsets_up_to(mask: u64, cap: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut sub = mask;
    while sub != 0 {
        if (sub.count_ones() as usize) <= cap {
            out.push(sub);
        }
        sub = (sub - 1) & mask;
    }
    out
}

/// Unpruned enumeration of every site subset and every per-AP assignment that
/// fits inside some steering footprint of that AP, with 1..=T members.
pub fn flat_exact(v: &Venue, params: &ChannelParams, betas: &[f64], alpha: f64) -> FlatOptimum {
    let (l_count, m_count) = (v.num_candidates(), v.num_gps());
    let q: Vec<f64> = v.grid_positions.iter().map(|g| g.q).collect();
    let total: f64 = q.iter().fold(0.0, |a, x| a + x);
    let sat: Vec<Vec<bool>> = (0..m_count)
        .map(|m| {
            (0..1u64 << l_count)
                .map(|mask| union_mass(v, params, m, mask) + PROB_SLACK >= betas[m])
                .collect()
        })
        .collect();
    let options: Vec<Vec<u64>> = (0..l_count)
        .map(|l| {
            let mut opts: Vec<u64> = (0..params.steering_count())
                .flat_map(|s| {
                    subsets_up_to(
                        geometric_footprint(v, params, l, s),
                        params.capacity_per_beam,
                    )
                })
                .collect();
            opts.sort_unstable();
            opts.dedup();
            opts
        })
        .collect();
    let coverage_of = |gp_masks: &[u64]| -> f64 {
        (0..m_count)
            .filter(|&m| sat[m][gp_masks[m] as usize])
            .map(|m| q[m])
            .fold(0.0, |a, x| a + x)
    };
    let mut overall = coverage_of(&vec![0; m_count]);
    if overall / total + PROB_SLACK >= alpha {
        return FlatOptimum {
            ap_count: Some(0),
            normalized_coverage: overall / total,
        };
    }
    for k in 1..=l_count {
        let mut best = f64::NEG_INFINITY;
        for sites in 0u64..1 << l_count {
            if sites.count_ones() as usize != k {
                continue;
            }
            let chosen: Vec<usize> = (0..l_count).filter(|&l| sites >> l & 1 == 1).collect();
            if chosen.iter().any(|&l| options[l].is_empty()) {
                continue;
            }
            let mut idx = vec![0usize; k];
            loop {
                let mut gp_masks = vec![0u64; m_count];
                for (j, &l) in chosen.iter().enumerate() {
                    let members = options[l][idx[j]];
                    for (m, gm) in gp_masks.iter_mut().enumerate() {
                        if members >> m & 1 == 1 {
                            *gm |= 1 << l;
                        }
                    }
                }
                best = best.max(coverage_of(&gp_masks));
                // odometer over the assignment options
                let mut j = 0;
                while j < k {
                    idx[j] += 1;
                    if idx[j] < options[chosen[j]].len() {
                        break;
                    }
                    idx[j] = 0;
                    j += 1;
                }
                if j == k {
                    break;
                }
            }
        }
        overall = overall.max(best);
        if best / total + PROB_SLACK >= alpha {
            return FlatOptimum {
                ap_count: Some(k),
                normalized_coverage: best / total,
            };
        }
    }
    FlatOptimum {
        ap_count: None,
        normalized_coverage: overall / total,
    }
}

/// Best `(candidate, steering, satisfied gain, mass gain)` for one greedy step, by
/// scoring every member subset of size ≤ T of every geometric footprint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BruteChoice {
    pub candidate: usize,
    pub steering_index: usize,
    pub satisfied: f64,
    pub mass: f64,
}

pub fn brute_force_iteration(inst: &Instance<'_>, state: &GreedyState) -> Option<BruteChoice> {
    let v = inst.venue;
    let params = inst.params;
    let tol = 1e-12;
    let mut best: Option<BruteChoice> = None;
    for &l in &state.pool {
        for s in 0..params.steering_count() {
            let fp = geometric_footprint(v, params, l, s);
            let mut subsets = subsets_up_to(fp, params.capacity_per_beam);
            subsets.push(0);
            for sub in subsets {
                let (mut sat, mut mass) = (0.0, 0.0);
                for m in (0..v.num_gps()).filter(|&m| sub >> m & 1 == 1) {
                    if state.satisfied[m] {
                        continue;
                    }
                    let p = inst.connectivity(m, state.assigned[m] | 1 << l);
                    let dp = p - state.prob[m];
                    if dp > 0.0 {
                        mass += inst.q(m) * dp;
                    }
                    if p + PROB_SLACK >= inst.betas[m] {
                        sat += inst.q(m);
                    }
                }
                let better = match best {
                    None => true,
                    Some(b) => {
                        sat > b.satisfied + tol
                            || ((sat - b.satisfied).abs() <= tol && mass > b.mass + tol)
                    }
                };
                if better {
                    best = Some(BruteChoice {
                        candidate: l,
                        steering_index: s,
                        satisfied: sat,
                        mass,
                    });
                }
            }
        }
    }
    best
}

/// Dense point sampling along the open segment `a → b`; true when any sample lies
/// strictly inside a body other than `owner`'s.
pub fn sampled_occlusion(v: &Venue, m: usize, l: usize, samples: usize) -> bool {
    let a = v.grid_positions[m].pos;
    let b = v.candidates[l].pos;
    (0..samples).any(|k| {
        let t = (k as f64 + 0.5) / samples as f64;
        let p = mmwave_planner::Point3::new(
            a.x + t * (b.x - a.x),
            a.y + t * (b.y - a.y),
            a.z + t * (b.z - a.z),
        );
        v.blockers
            .iter()
            .filter(|bp| bp.owner != Some(m))
            .any(|bp| {
                let (lo, hi) = (bp.lower(), bp.upper());
                p.x > lo.x && p.x < hi.x && p.y > lo.y && p.y < hi.y && p.z > lo.z && p.z < hi.z
            })
    })
}

/// Truncated-normal mean by trapezoidal integration over `[-π, π]`.
pub fn truncated_moments(mean: f64, std: f64, steps: usize) -> (f64, f64) {
    let pdf = |x: f64| (-0.5 * ((x - mean) / std).powi(2)).exp();
    let h = 2.0 * PI / steps as f64;
    let (mut z, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for k in 0..=steps {
        let x = -PI + k as f64 * h;
        let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
        let f = pdf(x) * w;
        z += f;
        m1 += f * x;
        m2 += f * x * x;
    }
    let mu = m1 / z;
    (mu, (m2 / z - mu * mu).sqrt())
}
