//! Discrete-time simulator for a point-mass swarm that splits into groups to
//! pass obstacles and then restores its formation.

pub mod avoidance;
pub mod energy;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod grouping;
pub mod io;
pub mod kinematics;
pub mod reformation;
pub mod sensing;
