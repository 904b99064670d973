pub mod bench;
pub mod explain;
pub mod metrics;
pub mod rank;
pub mod stability;
