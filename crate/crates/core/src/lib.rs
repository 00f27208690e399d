pub mod cf_core;
pub mod cli;
pub mod dual_mobius;
pub mod farey_cf;
pub mod geodesics;
pub mod lehner;
pub mod natext;
pub mod error;
pub mod numeric;

pub use error::{Error, Result};
pub use numeric::{ExactReal, UnimodularMap};
