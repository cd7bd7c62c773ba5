//! Anchor layout on the anchor robot and the constructed position measurement.
//!
//! The anchors sit at `q1 = [a, 0]`, `q2 = [0, 0]` and `q3 = [0, a]` in the
//! anchor robot's frame, so the legs `q2 -> q1` and `q2 -> q3` act as virtual
//! x and y axes. A tag at `p` is recovered from its three ranges as signed
//! area ratios:
//!
//! ```text
//! |x| = 2 * A(p, q2, q3) / a        |y| = 2 * A(p, q1, q2) / a
//! sign(x) = sgn(d2^2 + a^2 - d1^2)  sign(y) = sgn(d2^2 + a^2 - d3^2)
//! ```
//!
//! Each sub-area comes from Heron's formula on the side lengths
//! `(d2, d3, a)` and `(d2, d1, a)`. The closed-form radicands that are
//! sometimes quoted for `a = 1` carry a sign error (`p = [1, 1]` yields a
//! negative radicand), so Heron's formula is used throughout; the
//! reconstruction is checked against the forward model in the tests.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec2};

/// Right-triangle anchor geometry with leg length `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct AnchorLayout {
    a: f64,
}

impl AnchorLayout {
    pub fn leg(&self) -> f64 {
        self.a
    }

    pub fn q1(&self) -> Vec2 {
        Vec2::new(self.a, 0.0)
    }

    pub fn q2(&self) -> Vec2 {
        Vec2::zeros()
    }

    pub fn q3(&self) -> Vec2 {
        Vec2::new(0.0, self.a)
    }

    pub fn anchors(&self) -> [Vec2; 3] {
        [self.q1(), self.q2(), self.q3()]
    }

    /// Area of the anchor triangle, `a^2 / 2`.
    pub fn area(&self) -> f64 {
        0.5 * self.a * self.a
    }
}

impl TryFrom<f64> for AnchorLayout {
    type Error = Error;

    fn try_from(a: f64) -> Result<Self> {
        anchor_positions(a)
    }
}

impl From<AnchorLayout> for f64 {
    fn from(layout: AnchorLayout) -> f64 {
        layout.a
    }
}

/// Builds the anchor layout for leg length `a`.
pub fn anchor_positions(a: f64) -> Result<AnchorLayout> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::param("a", format!("leg length must be positive, got {a}")));
    }
    Ok(AnchorLayout { a })
}

/// One epoch of anchor-to-tag distances `(d1, d2, d3)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeTriple {
    pub d: [f64; 3],
    pub step: usize,
}

impl RangeTriple {
    pub fn new(d: [f64; 3], step: usize) -> Self {
        RangeTriple { d, step }
    }

    pub fn d1(&self) -> f64 {
        self.d[0]
    }

    pub fn d2(&self) -> f64 {
        self.d[1]
    }

    pub fn d3(&self) -> f64 {
        self.d[2]
    }
}

/// Noiseless ranges from the tag at `p_rel` to each anchor.
pub fn true_ranges(p_rel: &Vec2, layout: &AnchorLayout) -> RangeTriple {
    let d = layout.anchors().map(|q| (p_rel - q).norm());
    RangeTriple { d, step: 0 }
}

/// Relative position rebuilt from three ranges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstructedMeasurement {
    pub r_meas: Vec2,
    pub lambda1: f64,
    pub lambda3: f64,
    /// `[x side (d2, d3, a), y side (d2, d1, a)]`: set when the side lengths
    /// violate the triangle inequality and the squared area was clamped to 0.
    pub degenerate: [bool; 2],
}

/// Triangle area from its side lengths (numerically stable Heron form).
///
/// Returns the area and whether the squared area had to be clamped at 0.
fn heron_area(s0: f64, s1: f64, s2: f64) -> (f64, bool) {
    let mut s = [s0, s1, s2];
    s.sort_by(|x, y| y.total_cmp(x));
    let [a, b, c] = s;
    let prod = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    if prod < 0.0 {
        (0.0, true)
    } else {
        (0.25 * prod.sqrt(), false)
    }
}

fn sign(v: f64) -> f64 {
    if v < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Maps a range triple to a planar position in the anchor frame.
pub fn construct_measurement(
    ranges: &RangeTriple,
    layout: &AnchorLayout,
) -> Result<ConstructedMeasurement> {
    if let Some(bad) = ranges.d.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
        return Err(Error::InvalidInput(format!(
            "ranges must be finite and nonnegative, got {bad}"
        )));
    }
    let a = layout.leg();
    let [d1, d2, d3] = ranges.d;

    let (area_x, clamped_x) = heron_area(d2, d3, a);
    let (area_y, clamped_y) = heron_area(d2, d1, a);

    let s1 = sign(d2 * d2 + a * a - d1 * d1);
    let s3 = sign(d2 * d2 + a * a - d3 * d3);

    let lambda1 = s1 * area_x / layout.area();
    let lambda3 = s3 * area_y / layout.area();

    Ok(ConstructedMeasurement {
        r_meas: Vec2::new(lambda1 * a, lambda3 * a),
        lambda1,
        lambda3,
        degenerate: [clamped_x, clamped_y],
    })
}
