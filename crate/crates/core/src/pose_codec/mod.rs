//! Bin-based encoding of grasp and suction configurations and the reference
//! losses of the prehensile branch.

mod bins;
mod config;
mod loss;

pub use bins::{decode_param, encode_param, BinSpec, EncodedParam, RESIDUAL_CEILING};
pub use config::{
    decode_grasp, decode_suction, encode_grasp, encode_suction, BinSpecSet, GraspConfig, Param,
    SuctionConfig, GRIPPER_MAX_WIDTH,
};
pub use loss::{
    bin_loss, focal_loss, grasp_loss, prehensile_loss, suction_loss, BranchLoss, FocalParams,
    PointPrediction, PointTarget, PredictedParam, PROB_EPS,
};
