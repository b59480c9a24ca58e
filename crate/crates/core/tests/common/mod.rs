#![allow(dead_code)]

pub mod grasp;
