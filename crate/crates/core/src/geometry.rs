//! Points, viewing angles and the segment-vs-prism occlusion test.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cartesian point or displacement in meters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn horizontal_norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(&self, other: &Point3) -> f64 {
        (*other - *self).norm()
    }

    fn axis(&self, i: usize) -> f64 {
        match i {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }
}

impl From<[f64; 3]> for Point3 {
    fn from([x, y, z]: [f64; 3]) -> Self {
        Self { x, y, z }
    }
}

impl From<Point3> for [f64; 3] {
    fn from(p: Point3) -> Self {
        [p.x, p.y, p.z]
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Horizontal separations below this are treated as a vertical ray.
pub const VERTICAL_EPS: f64 = 1e-9;

/// Azimuth from +x and spherical elevation from +z of a viewing direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ViewAngles {
    pub azimuth: f64,
    pub elevation: f64,
    /// True when the direction is (numerically) parallel to the z axis.
    pub vertical: bool,
}

/// Viewing angles of `to` as seen from `from`.
///
/// A vertical ray has no defined azimuth; it is reported as 0.
pub fn view_angles(from: Point3, to: Point3) -> Result<ViewAngles> {
    let d = to - from;
    let r = d.norm();
    if r == 0.0 {
        return Err(Error::DegenerateGeometry(format!(
            "coincident points at ({}, {}, {})",
            from.x, from.y, from.z
        )));
    }
    let vertical = d.horizontal_norm() <= VERTICAL_EPS * r;
    let azimuth = if vertical { 0.0 } else { d.y.atan2(d.x) };
    let elevation = (d.z / r).clamp(-1.0, 1.0).acos();
    Ok(ViewAngles {
        azimuth,
        elevation,
        vertical,
    })
}

/// Axis-aligned box standing in for a seated human body.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BodyPrism {
    pub center: Point3,
    /// Extents along x, y and z.
    pub size: [f64; 3],
    /// Grid position whose user this body belongs to.
    #[serde(default)]
    pub owner: Option<usize>,
}

impl BodyPrism {
    pub fn lower(&self) -> Point3 {
        self.center - Point3::from(self.size) * 0.5
    }

    pub fn upper(&self) -> Point3 {
        self.center + Point3::from(self.size) * 0.5
    }

    /// Strict interior membership.
    pub fn contains(&self, p: Point3) -> bool {
        let (lo, hi) = (self.lower(), self.upper());
        (0..3).all(|i| p.axis(i) > lo.axis(i) && p.axis(i) < hi.axis(i))
    }

    /// Slab test: does the open segment `a → b` pass through the open box?
    ///
    /// Grazing contact with a face, edge or corner is not a hit.
    pub fn intersects_segment(&self, a: Point3, b: Point3) -> bool {
        let (lo, hi) = (self.lower(), self.upper());
        let d = b - a;
        let mut t_enter = 0.0_f64;
        let mut t_exit = 1.0_f64;
        for i in 0..3 {
            let (o, dir, l, h) = (a.axis(i), d.axis(i), lo.axis(i), hi.axis(i));
            if dir == 0.0 {
                if o <= l || o >= h {
                    return false;
                }
                continue;
            }
            let (mut t0, mut t1) = ((l - o) / dir, (h - o) / dir);
            if t0 > t1 {
                std::mem::swap(&mut t0, &mut t1);
            }
            t_enter = t_enter.max(t0);
            t_exit = t_exit.min(t1);
            if t_enter >= t_exit {
                return false;
            }
        }
        true
    }
}
