use pgs_core::geometry::{OrganizedCloud, Point3, Vec3};
use pgs_core::pose_codec::{grasp_loss, prehensile_loss, suction_loss, BranchLoss, FocalParams, PointPrediction, PointTarget};
use pgs_core::segmentation::{center_offset_loss, foreground_loss, nonpre_loss, InstanceMap, LossWeights, VoteField};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const FIXTURE_FORMAT: &str = "pgs-loss-fixture";

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchFixture {
    pub predictions: Vec<PointPrediction>,
    pub targets: Vec<PointTarget>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForegroundFixture {
    pub probs: Vec<f64>,
    pub labels: Vec<bool>,
}

/// Pixels in scanline order; `null` points mark missing depth.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CenterOffsetFixture {
    pub points: Vec<Option<[f64; 3]>>,
    pub votes: Vec<[f64; 3]>,
    pub labels: Vec<u32>,
    pub centers: Vec<[f64; 3]>,
    pub delta: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossFixture {
    pub format: String,
    pub version: u32,
    pub focal: FocalParams,
    pub grasp: BranchFixture,
    pub suction: BranchFixture,
    pub foreground: ForegroundFixture,
    pub center_offset: CenterOffsetFixture,
    pub weights: LossWeights,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossReport {
    pub grasp: BranchLoss,
    pub suction: BranchLoss,
    pub prehensile: f64,
    pub foreground: f64,
    pub center_offset: f64,
    pub nonprehensile: f64,
}

pub fn parse_fixture(text: &str) -> Result<LossFixture, CliError> {
    let f: LossFixture = serde_json::from_str(text).map_err(|e| CliError::Validation(format!("loss fixture: {e}")))?;
    if f.format != FIXTURE_FORMAT || f.version != 1 {
        return Err(CliError::Validation(format!(
            "loss fixture: expected format `{FIXTURE_FORMAT}` version 1"
        )));
    }
    Ok(f)
}

pub fn evaluate(f: &LossFixture) -> Result<LossReport, CliError> {
    let grasp = grasp_loss(&f.grasp.predictions, &f.grasp.targets, f.focal)?;
    let suction = suction_loss(&f.suction.predictions, &f.suction.targets, f.focal)?;
    let prehensile = prehensile_loss(grasp.total, suction.total)?;
    let foreground = foreground_loss(&f.foreground.probs, &f.foreground.labels)?;

    let co = &f.center_offset;
    let n = co.labels.len();
    if co.points.len() != n || co.votes.len() != n {
        return Err(CliError::Validation(
            "loss fixture: center_offset points, votes and labels differ in length".into(),
        ));
    }
    let width = n as u32;
    let cloud = OrganizedCloud {
        width,
        height: 1,
        grid: co.points.iter().map(|p| p.map(Point3::from)).collect(),
    };
    let votes = VoteField::new(width, 1, co.votes.iter().map(|v| Vec3::from(*v)).collect())?;
    let gt = InstanceMap {
        width,
        height: 1,
        labels: co.labels.clone(),
    };
    gt.validate()?;
    let centers: Vec<Point3> = co.centers.iter().map(|c| Point3::from(*c)).collect();
    let center_offset = center_offset_loss(&cloud, &votes, &gt, &centers, co.delta)?;
    let nonprehensile = nonpre_loss(foreground, center_offset, &f.weights)?;
    Ok(LossReport {
        grasp,
        suction,
        prehensile,
        foreground,
        center_offset,
        nonprehensile,
    })
}

/// Largest absolute difference between matching numeric leaves of the
/// report and a golden document with the same layout. Missing golden keys
/// are errors.
pub fn max_deviation(report: &LossReport, golden: &serde_json::Value) -> Result<f64, CliError> {
    fn walk(a: &serde_json::Value, g: &serde_json::Value, path: &str, worst: &mut f64) -> Result<(), CliError> {
        match g {
            serde_json::Value::Object(map) => {
                for (k, gv) in map {
                    let sub = format!("{path}.{k}");
                    let av = a
                        .get(k)
                        .ok_or_else(|| CliError::Validation(format!("golden key `{sub}` is not in the report")))?;
                    walk(av, gv, &sub, worst)?;
                }
                Ok(())
            }
            serde_json::Value::Number(n) => {
                let (x, y) = (a.as_f64(), n.as_f64());
                match (x, y) {
                    (Some(x), Some(y)) => {
                        *worst = worst.max((x - y).abs());
                        Ok(())
                    }
                    _ => Err(CliError::Validation(format!("golden value `{path}` is not comparable"))),
                }
            }
            other => {
                if a == other {
                    Ok(())
                } else {
                    Err(CliError::Runtime(format!("golden value `{path}` differs")))
                }
            }
        }
    }
    let value = serde_json::to_value(report)?;
    let mut worst = 0.0;
    walk(&value, golden, "", &mut worst)?;
    Ok(worst)
}
