//! Non-adaptive baseline: evenly spread sites, beams pointed straight down.

use super::{finalize, Deployment, PlacedAp};
use crate::channel::Steering;
use crate::error::{Error, Result};
use crate::instance::Instance;

/// Farthest-point order over candidate sites (horizontal distance), seeded with the
/// site nearest the grid centroid. Ties go to the lowest id.
pub(crate) fn spread_order(inst: &Instance<'_>) -> Vec<usize> {
    let sites = &inst.venue.candidates;
    let n = sites.len() as f64;
    let (cx, cy) = sites
        .iter()
        .fold((0.0, 0.0), |(x, y), c| (x + c.pos.x, y + c.pos.y));
    let (cx, cy) = (cx / n, cy / n);
    let dist = |a: usize, x: f64, y: f64| (sites[a].pos.x - x).hypot(sites[a].pos.y - y);
    let argmax = |score: &dyn Fn(usize) -> f64, remaining: &[usize]| {
        remaining
            .iter()
            .copied()
            .reduce(|a, b| if score(b) > score(a) { b } else { a })
    };
    let mut remaining: Vec<usize> = (0..sites.len()).collect();
    let mut order = Vec::with_capacity(sites.len());
    let Some(first) = argmax(&|l| -dist(l, cx, cy), &remaining) else {
        return order;
    };
    order.push(first);
    remaining.retain(|&l| l != first);
    while let Some(next) = argmax(
        &|l| {
            order
                .iter()
                .map(|&o| dist(l, sites[o].pos.x, sites[o].pos.y))
                .fold(f64::INFINITY, f64::min)
        },
        &remaining,
    ) {
        order.push(next);
        remaining.retain(|&l| l != next);
    }
    order
}

/// Places `n` spread-out APs with nadir beams and assigns by descending presence.
pub fn uniform_place(inst: &Instance<'_>, n: usize) -> Result<Deployment> {
    let l_count = inst.num_candidates();
    if n < 1 || n > l_count {
        return Err(Error::InvalidParameter(format!(
            "uniform AP count {n} outside [1, {l_count}]"
        )));
    }
    let nadir = Steering {
        theta: 0.0,
        phi: 0.0,
    };
    let s = inst.params.steering_index(nadir).ok_or_else(|| {
        Error::InvalidParameter("steering grid lacks the straight-down beam (θ = 0, φ = 0)".into())
    })?;
    let selected = spread_order(inst)
        .into_iter()
        .take(n)
        .filter_map(|l| {
            let mut pool: Vec<usize> = inst.footprint(l, s).to_vec();
            pool.sort_by(|&a, &b| {
                let la = inst.profile(a, l).in_lm;
                let lb = inst.profile(b, l).in_lm;
                lb.cmp(&la)
                    .then(inst.q(b).total_cmp(&inst.q(a)))
                    .then(a.cmp(&b))
            });
            pool.truncate(inst.params.capacity_per_beam);
            (!pool.is_empty()).then_some(PlacedAp {
                loc: l,
                theta: nadir.theta,
                phi: nadir.phi,
                assigned: pool,
            })
        })
        .collect();
    Ok(finalize(inst, selected))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelParams;
    use crate::venue::{generate_venue, GeneratorOverrides, VenueKind};

    #[test]
    fn spread_order_is_a_permutation() {
        let v = generate_venue(VenueKind::Hall, &GeneratorOverrides::default());
        let p = ChannelParams::default();
        let inst = Instance::with_beta(&v, &p, 0.9).unwrap();
        let mut order = spread_order(&inst);
        assert_eq!(order.len(), v.num_candidates());
        // the second pick is as far as possible from the first
        let d = |a: usize, b: usize| {
            let (pa, pb) = (v.candidates[a].pos, v.candidates[b].pos);
            (pa.x - pb.x).hypot(pa.y - pb.y)
        };
        let far = (0..v.num_candidates())
            .map(|l| d(order[0], l))
            .fold(0.0, f64::max);
        assert_eq!(d(order[0], order[1]), far);
        order.sort_unstable();
        assert_eq!(order, (0..v.num_candidates()).collect::<Vec<_>>());
    }

    #[test]
    fn beams_point_down_and_respect_capacity() {
        let v = generate_venue(VenueKind::Hall, &GeneratorOverrides::default());
        let p = ChannelParams {
            capacity_per_beam: 5,
            ..ChannelParams::default()
        };
        let inst = Instance::with_beta(&v, &p, 0.9).unwrap();
        let d = uniform_place(&inst, 8).unwrap();
        assert!(d.ap_count() <= 8);
        for ap in &d.selected {
            assert_eq!((ap.theta, ap.phi), (0.0, 0.0));
            assert!(ap.assigned.len() <= 5);
        }
    }

    #[test]
    fn grid_without_nadir_is_rejected() {
        let v = generate_venue(VenueKind::Toy, &GeneratorOverrides::default());
        let p = ChannelParams {
            elevation_grid: vec![std::f64::consts::FRAC_PI_4],
            ..ChannelParams::default()
        };
        let inst = Instance::with_beta(&v, &p, 0.7).unwrap();
        assert!(matches!(
            uniform_place(&inst, 1),
            Err(Error::InvalidParameter(_))
        ));
    }
}
