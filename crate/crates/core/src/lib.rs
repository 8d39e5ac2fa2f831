//! Robust adaptive unscented Kalman filtering for power system dynamic state
//! estimation: case-file ingestion, a quasi-steady-state system model,
//! mixture-entropy filter criteria, the adaptive filter engine, noise
//! scenario generators, a metaheuristic coefficient tuner, and a Monte Carlo
//! experiment harness.

pub mod casefile;
pub mod config;
pub mod criteria;
pub mod filters;
pub mod harness;
pub mod isga;
pub mod noisegen;
pub mod psmodel;
pub mod unscented;
