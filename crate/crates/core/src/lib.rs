//! Maximal admissible sets and a reference governor with a dynamic
//! overshoot constraint for discrete-time LTI plants.

pub mod governor;
pub mod mas;
pub mod numerics;
pub mod simkit;
