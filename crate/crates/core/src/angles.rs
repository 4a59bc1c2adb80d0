//! Angles on the circle `[-π, π]`: wrapping, single arcs and finite unions of arcs.
//!
//! [`AngularInterval`] is a single (possibly wrapping) arc, the shape of every
//! LoS and effective azimuth set. [`ArcSet`] is a finite union kept as sorted,
//! disjoint linear segments inside `[-π, π]`; a wrapping arc is stored as the
//! two pieces on either side of the seam.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

/// Tolerance used for inclusive angular boundary tests.
pub const ANGLE_EPS: f64 = 1e-12;

/// Maps any angle onto `[-π, π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let w = theta - TAU * ((theta + PI) / TAU).floor();
    // floor can leave `w == π` through rounding
    if w >= PI {
        w - TAU
    } else {
        w
    }
}

/// Absolute angular distance between two azimuths, in `[0, π]`.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Repr {
    Empty,
    Full,
    /// Counter-clockwise arc from `start` (in `[-π, π)`) of length `len` in `(0, 2π)`.
    Arc {
        start: f64,
        len: f64,
    },
}

/// A single arc of the orientation circle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "IntervalRepr", try_from = "IntervalRepr")]
pub struct AngularInterval(Repr);

impl AngularInterval {
    pub const fn empty() -> Self {
        Self(Repr::Empty)
    }

    pub const fn full() -> Self {
        Self(Repr::Full)
    }

    /// Arc swept counter-clockwise from `lo` to `hi`. Equal endpoints give the empty arc.
    pub fn from_bounds(lo: f64, hi: f64) -> Self {
        let len = (hi - lo).rem_euclid(TAU);
        if len == 0.0 {
            Self::empty()
        } else {
            Self::from_start_len(lo, len)
        }
    }

    /// Arc covering the linear segment `[a, b]`; spans of `2π` or more give the full circle.
    pub fn from_segment(a: f64, b: f64) -> Self {
        if b <= a {
            Self::empty()
        } else {
            Self::from_start_len(a, b - a)
        }
    }

    /// Arc of half-width `half` around `center`.
    pub fn centered(center: f64, half: f64) -> Self {
        if half <= 0.0 {
            Self::empty()
        } else {
            Self::from_start_len(center - half, 2.0 * half)
        }
    }

    fn from_start_len(start: f64, len: f64) -> Self {
        if len >= TAU {
            Self::full()
        } else if len <= 0.0 {
            Self::empty()
        } else {
            Self(Repr::Arc {
                start: wrap_angle(start),
                len,
            })
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self.0, Repr::Empty)
    }

    pub fn is_full(&self) -> bool {
        matches!(self.0, Repr::Full)
    }

    /// Lower (counter-clockwise start) endpoint of a proper arc.
    pub fn lo(&self) -> Option<f64> {
        match self.0 {
            Repr::Arc { start, .. } => Some(start),
            _ => None,
        }
    }

    /// Upper endpoint of a proper arc, wrapped onto `[-π, π)`.
    pub fn hi(&self) -> Option<f64> {
        match self.0 {
            Repr::Arc { start, len } => Some(wrap_angle(start + len)),
            _ => None,
        }
    }

    pub fn length(&self) -> f64 {
        match self.0 {
            Repr::Empty => 0.0,
            Repr::Full => TAU,
            Repr::Arc { len, .. } => len,
        }
    }

    /// Circular midpoint of a proper arc.
    pub fn midpoint(&self) -> Option<f64> {
        match self.0 {
            Repr::Arc { start, len } => Some(wrap_angle(start + 0.5 * len)),
            _ => None,
        }
    }

    /// Inclusive membership test.
    pub fn contains(&self, theta: f64) -> bool {
        match self.0 {
            Repr::Empty => false,
            Repr::Full => true,
            Repr::Arc { start, len } => {
                let offset = (theta - start).rem_euclid(TAU);
                offset <= len || offset >= TAU - ANGLE_EPS
            }
        }
    }

    /// Linear pieces inside `[-π, π]`, ascending. At most two.
    pub fn segments(&self) -> Vec<(f64, f64)> {
        match self.0 {
            Repr::Empty => Vec::new(),
            Repr::Full => vec![(-PI, PI)],
            Repr::Arc { start, len } => {
                let end = start + len;
                if end <= PI {
                    vec![(start, end)]
                } else {
                    vec![(-PI, end - TAU), (start, PI)]
                }
            }
        }
    }

    pub fn to_set(&self) -> ArcSet {
        ArcSet::from_segments(self.segments())
    }

    pub fn intersection(&self, other: &AngularInterval) -> ArcSet {
        self.to_set().intersection(&other.to_set())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum IntervalRepr {
    Empty,
    Full,
    Arc { lo: f64, hi: f64, length: f64 },
}

impl From<AngularInterval> for IntervalRepr {
    fn from(value: AngularInterval) -> Self {
        match value.0 {
            Repr::Empty => IntervalRepr::Empty,
            Repr::Full => IntervalRepr::Full,
            Repr::Arc { start, len } => IntervalRepr::Arc {
                lo: start,
                hi: wrap_angle(start + len),
                length: len,
            },
        }
    }
}

impl TryFrom<IntervalRepr> for AngularInterval {
    type Error = String;

    fn try_from(value: IntervalRepr) -> Result<Self, Self::Error> {
        match value {
            IntervalRepr::Empty => Ok(Self::empty()),
            IntervalRepr::Full => Ok(Self::full()),
            IntervalRepr::Arc { lo, length, .. } => {
                if !(length > 0.0 && length < TAU) || !lo.is_finite() {
                    return Err(format!("arc length {length} outside (0, 2π)"));
                }
                Ok(Self::from_start_len(lo, length))
            }
        }
    }
}

/// Finite union of arcs as sorted, disjoint, non-touching segments of `[-π, π]`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ArcSet {
    segs: Vec<(f64, f64)>,
}

impl ArcSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn full() -> Self {
        Self {
            segs: vec![(-PI, PI)],
        }
    }

    /// Normalizes arbitrary linear segments (clipped to `[-π, π]`).
    pub fn from_segments<I: IntoIterator<Item = (f64, f64)>>(segments: I) -> Self {
        let mut segs: Vec<(f64, f64)> = segments
            .into_iter()
            .map(|(a, b)| (a.max(-PI), b.min(PI)))
            .filter(|(a, b)| b > a)
            .collect();
        segs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(segs.len());
        for (a, b) in segs {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        Self { segs: merged }
    }

    pub fn segments(&self) -> &[(f64, f64)] {
        &self.segs
    }

    pub fn is_empty(&self) -> bool {
        self.segs.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.segs
            .iter()
            .map(|(a, b)| b - a)
            .fold(0.0, |acc, x| acc + x)
    }

    pub fn contains(&self, theta: f64) -> bool {
        let t = wrap_angle(theta);
        self.segs.iter().any(|&(a, b)| {
            (t >= a && t <= b) || (t == -PI && b == PI) // seam
        })
    }

    pub fn union(&self, other: &ArcSet) -> ArcSet {
        Self::from_segments(self.segs.iter().chain(other.segs.iter()).copied())
    }

    pub fn intersection(&self, other: &ArcSet) -> ArcSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.segs.len() && j < other.segs.len() {
            let (a0, a1) = self.segs[i];
            let (b0, b1) = other.segs[j];
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if hi > lo {
                out.push((lo, hi));
            }
            if a1 < b1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::from_segments(out)
    }

    pub fn complement(&self) -> ArcSet {
        let mut out = Vec::new();
        let mut cursor = -PI;
        for &(a, b) in &self.segs {
            if a > cursor {
                out.push((cursor, a));
            }
            cursor = b;
        }
        if cursor < PI {
            out.push((cursor, PI));
        }
        Self::from_segments(out)
    }

    /// `self ⊆ other` up to `tol` radians of total excess.
    pub fn is_subset_of(&self, other: &ArcSet, tol: f64) -> bool {
        self.length() - self.intersection(other).length() <= tol
    }

    /// Sum of `f(a, b)` over the segments; `f` is typically a probability mass.
    pub fn measure<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        self.segs
            .iter()
            .map(|&(a, b)| f(a, b))
            .fold(0.0, |acc, x| acc + x)
    }

    /// Collapses back to one arc when the set is connected on the circle.
    pub fn to_interval(&self) -> Option<AngularInterval> {
        match self.segs.as_slice() {
            [] => Some(AngularInterval::empty()),
            [(a, b)] if *a == -PI && *b == PI => Some(AngularInterval::full()),
            [(a, b)] => Some(AngularInterval::from_segment(*a, *b)),
            [(a0, a1), (b0, b1)] if *a0 == -PI && *b1 == PI => {
                Some(AngularInterval::from_start_len(*b0, (PI - b0) + (a1 + PI)))
            }
            _ => None,
        }
    }
}
