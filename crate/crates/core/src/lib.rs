//! Multi-drone coverage with charging on a moving rover.

pub mod cacer;
pub mod maps;
pub mod model;
pub mod modes;
pub mod policy;
pub mod scheduler;
pub mod sim;
