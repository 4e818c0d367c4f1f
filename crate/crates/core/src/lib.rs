//! Bistatic space-air-ground sensing: a LEO satellite illuminates a cluster of
//! aircraft and a multi-antenna ground station filters the echoes. The crate
//! synthesises the channels, maximises the target echo SINR by alternating
//! closed-form transmit and receive updates, and runs Monte-Carlo sweeps that
//! compare the joint design against simpler strategies.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod harness;
pub mod numerics;
pub mod optimizer;
pub mod sensing;
