pub mod linalg;
pub mod quad;
pub mod rng;
