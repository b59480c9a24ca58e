use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, PI};

use serde::{Deserialize, Serialize};

use super::bins::{decode_param, encode_param, BinSpec, EncodedParam};
use crate::geometry::{Point3, RotationAngles};
use crate::{Error, Result};

/// Maximum opening of the parallel-jaw gripper, meters.
pub const GRIPPER_MAX_WIDTH: f64 = 0.05;

/// The seven regressed grasp parameters, in encoding order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    X,
    Y,
    Z,
    W,
    Theta1,
    Theta2,
    Theta3,
}

impl Param {
    pub const GRASP: [Param; 7] = [
        Param::X,
        Param::Y,
        Param::Z,
        Param::W,
        Param::Theta1,
        Param::Theta2,
        Param::Theta3,
    ];
    pub const SUCTION: [Param; 3] = [Param::Theta1, Param::Theta2, Param::Theta3];

    pub fn name(self) -> &'static str {
        match self {
            Param::X => "x",
            Param::Y => "y",
            Param::Z => "z",
            Param::W => "w",
            Param::Theta1 => "theta1",
            Param::Theta2 => "theta2",
            Param::Theta3 => "theta3",
        }
    }
}

/// Bin layout for every parameter. The `x`, `y`, `z` starts are offsets from
/// the reference contact point that proposed the grasp.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinSpecSet {
    pub x: BinSpec,
    pub y: BinSpec,
    pub z: BinSpec,
    pub w: BinSpec,
    pub theta1: BinSpec,
    pub theta2: BinSpec,
    pub theta3: BinSpec,
}

impl Default for BinSpecSet {
    /// 1 cm center bins centered on the reference point, 1 cm width bins over
    /// the gripper stroke, 30° angle bins.
    fn default() -> Self {
        let linear = BinSpec {
            start: -0.05,
            bin_size: 0.01,
            bin_count: 10,
        };
        Self {
            x: linear,
            y: linear,
            z: linear,
            w: BinSpec {
                start: 0.0,
                bin_size: 0.01,
                bin_count: 5,
            },
            theta1: BinSpec {
                start: 0.0,
                bin_size: FRAC_PI_6,
                bin_count: 12,
            },
            theta2: BinSpec {
                start: 0.0,
                bin_size: FRAC_PI_6,
                bin_count: 3,
            },
            theta3: BinSpec {
                start: -PI,
                bin_size: FRAC_PI_6,
                bin_count: 12,
            },
        }
    }
}

impl BinSpecSet {
    /// Center bins starting exactly at the reference point, so offsets are
    /// measured as `u - u_ref` with no shift.
    pub fn anchored_at_reference() -> Self {
        let mut s = Self::default();
        for spec in [&mut s.x, &mut s.y, &mut s.z] {
            spec.start = 0.0;
        }
        s
    }

    pub fn get(&self, p: Param) -> &BinSpec {
        match p {
            Param::X => &self.x,
            Param::Y => &self.y,
            Param::Z => &self.z,
            Param::W => &self.w,
            Param::Theta1 => &self.theta1,
            Param::Theta2 => &self.theta2,
            Param::Theta3 => &self.theta3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for p in Param::GRASP {
            self.get(p)
                .validate()
                .map_err(|e| Error::Config(format!("{} bins: {e}", p.name())))?;
        }
        let covers = |spec: &BinSpec, lo: f64, hi: f64| spec.start <= lo + 1e-12 && spec.end() >= hi - 1e-12;
        if !covers(&self.theta1, 0.0, 2.0 * PI)
            || !covers(&self.theta2, 0.0, FRAC_PI_2)
            || !covers(&self.theta3, -PI, PI)
        {
            return Err(Error::Config("angle bins must cover the full angle ranges".into()));
        }
        if !covers(&self.w, 0.0, GRIPPER_MAX_WIDTH) {
            return Err(Error::Config("width bins must cover [0, max opening]".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraspConfig {
    pub center: Point3,
    pub angles: RotationAngles,
    /// Jaw opening, meters.
    pub width: f64,
    pub score: f64,
}

impl GraspConfig {
    pub fn validate(&self) -> Result<()> {
        self.angles.validate()?;
        if !(0.0..=GRIPPER_MAX_WIDTH).contains(&self.width) {
            return Err(Error::Range {
                param: "w".into(),
                value: self.width,
                lo: 0.0,
                hi: GRIPPER_MAX_WIDTH,
            });
        }
        check_score(self.score)
    }
}

/// Suction center on the contact surface plus the approach direction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuctionConfig {
    pub contact: Point3,
    pub angles: RotationAngles,
    pub score: f64,
}

impl SuctionConfig {
    pub fn validate(&self) -> Result<()> {
        self.angles.validate()?;
        check_score(self.score)
    }
}

fn check_score(score: f64) -> Result<()> {
    if (0.0..=1.0).contains(&score) {
        Ok(())
    } else {
        Err(Error::Range {
            param: "score".into(),
            value: score,
            lo: 0.0,
            hi: 1.0,
        })
    }
}

fn encode_named(p: Param, value: f64, spec: &BinSpec) -> Result<EncodedParam> {
    encode_param(value, spec).map_err(|e| match e {
        Error::Range { value, lo, hi, .. } => Error::Range {
            param: p.name().into(),
            value,
            lo,
            hi,
        },
        other => other,
    })
}

/// Encodes `(x, y, z, w, θ1, θ2, θ3)` with the center taken relative to
/// `reference`.
pub fn encode_grasp(g: &GraspConfig, reference: &Point3, specs: &BinSpecSet) -> Result<[EncodedParam; 7]> {
    let rel = g.center - reference;
    let values = [
        rel.x,
        rel.y,
        rel.z,
        g.width,
        g.angles.theta1,
        g.angles.theta2,
        g.angles.theta3,
    ];
    let mut out = [EncodedParam {
        bin_index: 0,
        residual: 0.0,
    }; 7];
    for (k, p) in Param::GRASP.into_iter().enumerate() {
        out[k] = encode_named(p, values[k], specs.get(p))?;
    }
    Ok(out)
}

pub fn decode_grasp(
    enc: &[EncodedParam; 7],
    reference: &Point3,
    specs: &BinSpecSet,
    score: f64,
) -> Result<GraspConfig> {
    let mut v = [0.0; 7];
    for (k, p) in Param::GRASP.into_iter().enumerate() {
        v[k] = decode_param(&enc[k], specs.get(p))?;
    }
    Ok(GraspConfig {
        center: reference + nalgebra::Vector3::new(v[0], v[1], v[2]),
        width: v[3],
        angles: RotationAngles {
            theta1: v[4],
            theta2: v[5],
            theta3: v[6],
        },
        score,
    })
}

/// Suction proposals are point-wise: only the three angles are encoded.
pub fn encode_suction(s: &SuctionConfig, specs: &BinSpecSet) -> Result<[EncodedParam; 3]> {
    let a = &s.angles;
    Ok([
        encode_named(Param::Theta1, a.theta1, &specs.theta1)?,
        encode_named(Param::Theta2, a.theta2, &specs.theta2)?,
        encode_named(Param::Theta3, a.theta3, &specs.theta3)?,
    ])
}

pub fn decode_suction(enc: &[EncodedParam; 3], contact: Point3, specs: &BinSpecSet, score: f64) -> Result<SuctionConfig> {
    Ok(SuctionConfig {
        contact,
        angles: RotationAngles {
            theta1: decode_param(&enc[0], &specs.theta1)?,
            theta2: decode_param(&enc[1], &specs.theta2)?,
            theta3: decode_param(&enc[2], &specs.theta3)?,
        },
        score,
    })
}
