//! Azimuth/elevation/axis-rotation parameterization of a gripper frame.
//!
//! The approach vector is
//! `n = (cos θ2 cos θ1, cos θ2 sin θ1, -sin θ2)`, so `θ2 = π/2` points straight
//! down at the table. The grasp axis is `r = normalize(cos θ3, sin θ3, κ)` with
//! `κ` chosen so that `n · r = 0`; its projection on the X-Y plane therefore
//! makes angle `θ3` with the X axis.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use super::{UnitVec3, Vec3};
use crate::{Error, Result};

/// Angular slack accepted at the closed range ends.
const ANGLE_SLACK: f64 = 1e-12;
/// `|n_z|` below this counts as a horizontal approach.
const HORIZONTAL_EPS: f64 = 1e-12;
/// Horizontal extent below this counts as a vertical vector.
const VERTICAL_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationAngles {
    /// Azimuth in `[0, 2π)`.
    pub theta1: f64,
    /// Elevation below the X-Y plane in `[0, π/2]`.
    pub theta2: f64,
    /// Axis rotation in `[-π, π]`.
    pub theta3: f64,
}

impl RotationAngles {
    pub fn new(theta1: f64, theta2: f64, theta3: f64) -> Result<Self> {
        let a = Self {
            theta1,
            theta2,
            theta3,
        };
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<()> {
        check_range("theta1", self.theta1, 0.0, TAU, true)?;
        check_range("theta2", self.theta2, 0.0, FRAC_PI_2, false)?;
        check_range("theta3", self.theta3, -PI, PI, false)?;
        Ok(())
    }
}

fn check_range(param: &str, value: f64, lo: f64, hi: f64, open_hi: bool) -> Result<()> {
    let above = if open_hi { value >= hi } else { value > hi + ANGLE_SLACK };
    if !value.is_finite() || value < lo - ANGLE_SLACK || above {
        return Err(Error::Range {
            param: param.into(),
            value,
            lo,
            hi,
        });
    }
    Ok(())
}

/// Approach vector `n` and grasp axis `r` for the given angles.
///
/// For an exactly horizontal approach (`θ2 = 0`) the constraint `n · r = 0`
/// leaves the vertical component free: `r` is horizontal when `θ3` is
/// perpendicular to the azimuth and otherwise degenerates to `±Z` (the limit
/// as `θ2 → 0⁺`).
pub fn angles_to_frame(a: &RotationAngles) -> Result<(UnitVec3, UnitVec3)> {
    a.validate()?;
    let (s1, c1) = a.theta1.sin_cos();
    let (s2, c2) = a.theta2.sin_cos();
    let (s3, c3) = a.theta3.sin_cos();
    let n = Vec3::new(c2 * c1, c2 * s1, -s2);
    let along = n.x * c3 + n.y * s3;
    let r = if a.theta2 >= FRAC_PI_2 {
        Vec3::new(c3, s3, 0.0)
    } else if n.z.abs() < HORIZONTAL_EPS {
        if along.abs() < HORIZONTAL_EPS {
            Vec3::new(c3, s3, 0.0)
        } else {
            Vec3::new(0.0, 0.0, along.signum())
        }
    } else {
        Vec3::new(c3, s3, -along / n.z)
    };
    Ok((UnitVec3::new_normalize(n), UnitVec3::new_normalize(r)))
}

/// Inverse of [`angles_to_frame`].
///
/// A vertical `n` has no azimuth; `θ1 = 0` is returned. A vertical `r` has no
/// X-Y projection; `θ3` then takes the azimuth direction.
pub fn frame_to_angles(n: &UnitVec3, r: &UnitVec3) -> Result<RotationAngles> {
    let dot = n.dot(r);
    if dot.abs() > 1e-6 {
        return Err(Error::Validation(format!(
            "approach and axis not orthogonal (n·r = {dot:e})"
        )));
    }
    if n.z > 1e-9 {
        return Err(Error::Range {
            param: "theta2".into(),
            value: -(n.z.clamp(-1.0, 1.0)).asin(),
            lo: 0.0,
            hi: FRAC_PI_2,
        });
    }
    let horiz = n.x.hypot(n.y);
    let theta2 = (-n.z).atan2(horiz).clamp(0.0, FRAC_PI_2);
    let theta1 = if horiz < VERTICAL_EPS {
        0.0
    } else {
        wrap_tau(n.y.atan2(n.x))
    };
    let theta3 = if r.x.hypot(r.y) < VERTICAL_EPS {
        wrap_pi(theta1)
    } else {
        r.y.atan2(r.x)
    };
    Ok(RotationAngles {
        theta1,
        theta2,
        theta3,
    })
}

/// Azimuth and elevation `(θ1, θ2)` of an approach vector.
pub fn approach_angles(n: &UnitVec3) -> Result<(f64, f64)> {
    if n.z > 1e-9 {
        return Err(Error::Range {
            param: "theta2".into(),
            value: -(n.z.clamp(-1.0, 1.0)).asin(),
            lo: 0.0,
            hi: FRAC_PI_2,
        });
    }
    let horiz = n.x.hypot(n.y);
    let theta2 = (-n.z).atan2(horiz).clamp(0.0, FRAC_PI_2);
    let theta1 = if horiz < VERTICAL_EPS {
        0.0
    } else {
        wrap_tau(n.y.atan2(n.x))
    };
    Ok((theta1, theta2))
}

/// Maps any angle into `[0, 2π)`.
pub fn wrap_tau(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Maps any angle into `(-π, π]`.
pub fn wrap_pi(a: f64) -> f64 {
    let w = wrap_tau(a);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Smallest absolute difference between two angles.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    wrap_pi(a - b).abs()
}
