//! Deterministic venue generators.
//!
//! Seats are flat-floored or tiered grids; every seat is occupied by one body
//! prism and the MD sits in front of the torso. Candidate sites form a regular
//! grid on the ceiling (or above the stands for the stadium).

use std::f64::consts::{FRAC_PI_4, FRAC_PI_6, PI};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CandidateLocation, GridPosition, Venue};
use crate::error::{Error, Result};
use crate::geometry::{BodyPrism, Point3};
use crate::FORMAT_VERSION;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VenueKind {
    Hall,
    Airport,
    Stadium,
    Toy,
}

impl FromStr for VenueKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hall" => Ok(Self::Hall),
            "airport" => Ok(Self::Airport),
            "stadium" => Ok(Self::Stadium),
            "toy" => Ok(Self::Toy),
            _ => Err(Error::UnknownVenueKind(s.to_string())),
        }
    }
}

/// Seated-body dimensions, meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BodyModel {
    pub width: f64,
    pub depth: f64,
    pub height: f64,
    /// MD offset in front of the torso center.
    pub md_forward: f64,
    /// MD height above the seat base.
    pub md_height: f64,
}

impl Default for BodyModel {
    fn default() -> Self {
        Self {
            width: 0.5,
            depth: 0.3,
            height: 1.3,
            md_forward: 0.3,
            md_height: 0.7,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorOverrides {
    pub orientation_std: f64,
    pub md_elevation: f64,
    pub body: BodyModel,
}

impl Default for GeneratorOverrides {
    fn default() -> Self {
        Self {
            orientation_std: FRAC_PI_6,
            md_elevation: FRAC_PI_4,
            body: BodyModel::default(),
        }
    }
}

struct Builder<'a> {
    ov: &'a GeneratorOverrides,
    gps: Vec<GridPosition>,
    blockers: Vec<BodyPrism>,
}

impl<'a> Builder<'a> {
    fn new(ov: &'a GeneratorOverrides) -> Self {
        Self {
            ov,
            gps: Vec::new(),
            blockers: Vec::new(),
        }
    }

    /// Adds an occupied seat whose floor point is `base`.
    fn seat(&mut self, base: Point3, facing: f64, q: f64) {
        let body = &self.ov.body;
        let id = self.gps.len();
        let (c, s) = (facing.cos(), facing.sin());
        let md = Point3::new(
            base.x + body.md_forward * c,
            base.y + body.md_forward * s,
            base.z + body.md_height,
        );
        let size = if c.abs() >= s.abs() {
            [body.depth, body.width, body.height]
        } else {
            [body.width, body.depth, body.height]
        };
        self.gps.push(GridPosition {
            id,
            pos: md,
            facing,
            elevation: self.ov.md_elevation,
            q,
            orientation_std: self.ov.orientation_std,
            beta: None,
        });
        self.blockers.push(BodyPrism {
            center: Point3::new(base.x, base.y, base.z + 0.5 * body.height),
            size,
            owner: Some(id),
        });
    }

    fn finish(self, name: &str, candidates: Vec<Point3>) -> Venue {
        Venue {
            format_version: FORMAT_VERSION,
            name: name.to_string(),
            grid_positions: self.gps,
            candidates: candidates
                .into_iter()
                .enumerate()
                .map(|(id, pos)| CandidateLocation { id, pos })
                .collect(),
            blockers: self.blockers,
        }
    }
}

fn facing_towards(from_x: f64, from_y: f64, to_x: f64, to_y: f64) -> f64 {
    (to_y - from_y).atan2(to_x - from_x)
}

/// Regular `nx × ny` grid of points spanning `[x0, x1] × [y0, y1]` cell centers.
fn cell_centers(nx: usize, ny: usize, x: (f64, f64), y: (f64, f64)) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            out.push((
                x.0 + (x.1 - x.0) * (i as f64 + 0.5) / nx as f64,
                y.0 + (y.1 - y.0) * (j as f64 + 0.5) / ny as f64,
            ));
        }
    }
    out
}

pub fn generate_venue(kind: VenueKind, overrides: &GeneratorOverrides) -> Venue {
    match kind {
        VenueKind::Hall => hall(overrides),
        VenueKind::Airport => airport(overrides),
        VenueKind::Stadium => stadium(overrides),
        VenueKind::Toy => toy(overrides),
    }
}

const HALL_DEPTH: f64 = 25.0;
const HALL_WIDTH: f64 = 40.0;

/// Meeting hall: 9 rows of 15 seats facing the stage center at `y = 0`.
/// The ceiling rises linearly from 3.40 m at the stage to 4.37 m at the back wall.
fn hall(ov: &GeneratorOverrides) -> Venue {
    let mut b = Builder::new(ov);
    let stage = (HALL_WIDTH / 2.0, 0.0);
    for row in 0..9 {
        let y = 5.0 + 1.2 * row as f64;
        let q = 0.95 - 0.35 * row as f64 / 8.0;
        for col in 0..15 {
            let x = stage.0 + (col as f64 - 7.0) * 0.9;
            b.seat(
                Point3::new(x, y, 0.0),
                facing_towards(x, y, stage.0, stage.1),
                q,
            );
        }
    }
    let ceiling = |y: f64| 3.40 + (4.37 - 3.40) * y / HALL_DEPTH;
    let aps = cell_centers(5, 4, (0.0, HALL_WIDTH), (0.0, HALL_DEPTH))
        .into_iter()
        .map(|(x, y)| Point3::new(x, y, ceiling(y)))
        .collect();
    b.finish("hall", aps)
}

/// Airport gate: four islands of back-to-back rows, 20 seats per row, 10 m ceiling.
fn airport(ov: &GeneratorOverrides) -> Venue {
    let mut b = Builder::new(ov);
    for island in 0..4 {
        let yc = 3.5 + 4.5 * island as f64;
        for (side, facing) in [(-1.0, -PI / 2.0), (1.0, PI / 2.0)] {
            let y = yc + 0.35 * side;
            let row = 2 * island + usize::from(side > 0.0);
            for col in 0..20 {
                let x = 6.3 + 0.65 * col as f64;
                let q = 0.9 - 0.1 * ((col + 2 * row) % 4) as f64;
                b.seat(Point3::new(x, y, 0.0), facing, q);
            }
        }
    }
    let aps = cell_centers(4, 4, (0.0, 25.0), (0.0, 20.0))
        .into_iter()
        .map(|(x, y)| Point3::new(x, y, 10.0))
        .collect();
    b.finish("airport", aps)
}

/// One side of a stadium: 26 tiers of 40 seats from 5 m to 35 m, facing the
/// field center; candidates 45 m up over the stands and the field edge.
fn stadium(ov: &GeneratorOverrides) -> Venue {
    let mut b = Builder::new(ov);
    let field = (0.0, -30.0);
    for tier in 0..26 {
        let y = 1.6 * tier as f64;
        let z = 5.0 + 30.0 * tier as f64 / 25.0;
        let q = 0.95 - 0.4 * tier as f64 / 25.0 - 0.05 * ((tier * 3) % 2) as f64;
        for col in 0..40 {
            let x = (col as f64 - 19.5) * 0.8;
            b.seat(
                Point3::new(x, y, z),
                facing_towards(x, y, field.0, field.1),
                q,
            );
        }
    }
    let aps = cell_centers(4, 4, (-16.0, 16.0), (-12.0, 40.0))
        .into_iter()
        .map(|(x, y)| Point3::new(x, y, 45.0))
        .collect();
    b.finish("stadium", aps)
}

/// Six seats in two rows facing the front wall, four ceiling candidates.
fn toy(ov: &GeneratorOverrides) -> Venue {
    let mut b = Builder::new(ov);
    let q = [0.9, 0.8, 0.9, 0.7, 0.6, 0.75];
    for (k, &qk) in q.iter().enumerate() {
        let (row, col) = (k / 3, k % 3);
        let (x, y) = (2.0 + col as f64, 1.5 + 1.2 * row as f64);
        b.seat(Point3::new(x, y, 0.0), facing_towards(x, y, 3.0, 0.0), qk);
    }
    let aps = vec![
        Point3::new(1.5, 0.5, 3.0),
        Point3::new(4.5, 0.5, 3.0),
        Point3::new(1.5, 3.5, 3.0),
        Point3::new(4.5, 3.5, 3.0),
    ];
    b.finish("toy", aps)
}

/// Randomized 4-candidate, 6-seat room with up to three free-standing blockers.
pub fn random_toy(seed: u64, overrides: &GeneratorOverrides) -> Venue {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = Builder::new(overrides);
    let mut bases: Vec<(f64, f64)> = Vec::new();
    while bases.len() < 6 {
        let p = (rng.random_range(0.8..5.2), rng.random_range(0.8..3.2));
        if bases.iter().all(|o| (o.0 - p.0).hypot(o.1 - p.1) > 0.9) {
            bases.push(p);
        }
    }
    for &(x, y) in &bases {
        let facing = if rng.random_bool(0.7) {
            facing_towards(x, y, 3.0, 0.0)
        } else {
            rng.random_range(-PI..PI)
        };
        b.seat(Point3::new(x, y, 0.0), facing, rng.random_range(0.4..1.0));
    }
    let extra = rng.random_range(0..=3);
    let mut placed = 0;
    while placed < extra {
        let prism = BodyPrism {
            center: Point3::new(rng.random_range(0.5..5.5), rng.random_range(0.5..3.5), 0.9),
            size: [
                rng.random_range(0.3..0.6),
                rng.random_range(0.3..0.6),
                rng.random_range(1.5..1.8),
            ],
            owner: None,
        };
        let prism = BodyPrism {
            center: Point3::new(prism.center.x, prism.center.y, 0.5 * prism.size[2]),
            ..prism
        };
        if b.gps.iter().all(|g| !prism.contains(g.pos))
            && b.blockers.iter().all(|o| !overlaps(o, &prism))
        {
            b.blockers.push(prism);
            placed += 1;
        }
    }
    let aps = (0..4)
        .map(|_| {
            Point3::new(
                rng.random_range(0.0..6.0),
                rng.random_range(0.0..4.0),
                rng.random_range(2.6..3.4),
            )
        })
        .collect();
    b.finish(&format!("toy-{seed}"), aps)
}

fn overlaps(a: &BodyPrism, b: &BodyPrism) -> bool {
    let (alo, ahi, blo, bhi) = (a.lower(), a.upper(), b.lower(), b.upper());
    alo.x < bhi.x && blo.x < ahi.x && alo.y < bhi.y && blo.y < ahi.y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn venue_sizes() {
        let ov = GeneratorOverrides::default();
        for (kind, m, l) in [
            (VenueKind::Hall, 135, 20),
            (VenueKind::Airport, 160, 16),
            (VenueKind::Stadium, 1040, 16),
            (VenueKind::Toy, 6, 4),
        ] {
            let v = generate_venue(kind, &ov);
            assert_eq!(v.num_gps(), m, "{kind:?}");
            assert_eq!(v.num_candidates(), l, "{kind:?}");
            assert_eq!(v.blockers.len(), m, "one body per seat");
            v.validate().unwrap();
        }
    }

    #[test]
    fn hall_ceiling_range() {
        let v = generate_venue(VenueKind::Hall, &GeneratorOverrides::default());
        for c in &v.candidates {
            assert!(c.pos.z >= 3.40 && c.pos.z <= 4.37);
        }
    }

    #[test]
    fn airport_rows_face_opposite_ways() {
        let v = generate_venue(VenueKind::Airport, &GeneratorOverrides::default());
        assert!(v.candidates.iter().all(|c| c.pos.z == 10.0));
        let up = v.grid_positions.iter().filter(|g| g.facing > 0.0).count();
        assert_eq!(up, 80);
    }

    #[test]
    fn stadium_tier_heights() {
        let v = generate_venue(VenueKind::Stadium, &GeneratorOverrides::default());
        let body = BodyModel::default();
        let lo = v
            .grid_positions
            .iter()
            .map(|g| g.pos.z)
            .fold(f64::MAX, f64::min);
        let hi = v
            .grid_positions
            .iter()
            .map(|g| g.pos.z)
            .fold(f64::MIN, f64::max);
        assert!((lo - body.md_height - 5.0).abs() < 1e-9);
        assert!((hi - body.md_height - 35.0).abs() < 1e-9);
        assert!(v.candidates.iter().all(|c| c.pos.z == 45.0));
    }

    #[test]
    fn unknown_kind_rejected() {
        assert!(matches!(
            "arena".parse::<VenueKind>(),
            Err(Error::UnknownVenueKind(_))
        ));
    }

    #[test]
    fn generation_is_deterministic() {
        let ov = GeneratorOverrides::default();
        let a = serde_json::to_string(&generate_venue(VenueKind::Hall, &ov)).unwrap();
        let b = serde_json::to_string(&generate_venue(VenueKind::Hall, &ov)).unwrap();
        assert_eq!(a, b);
        assert_eq!(random_toy(7, &ov), random_toy(7, &ov));
        random_toy(7, &ov).validate().unwrap();
    }
}
