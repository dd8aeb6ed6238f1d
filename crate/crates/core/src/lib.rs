//! Trade-off robust optimization: a convex blend of the sample-average and
//! worst-case objectives over shape-parameter ambiguity sets, with set
//! analysis tools and an experiment harness for the inventory and portfolio
//! studies.

pub mod ambiguity;
pub mod distributions;
pub mod harness;
pub mod error;
pub mod linalg;
pub mod lp;
pub mod objective;
pub mod reformulations;
pub mod rng;
pub mod set_analysis;
pub mod solvers;
pub mod special;
pub mod stats;
pub mod transport;

pub use error::{Result, TroError};
