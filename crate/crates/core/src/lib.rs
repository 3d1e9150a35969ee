pub mod bigcount;
pub mod cli;
pub mod counting;
pub mod error;
pub mod fluctuation;
pub mod grid;
pub mod identities;
pub mod oracles;
pub mod partition;
pub mod path;
pub mod quadrature;
pub mod sampler;
pub mod stats;

pub use bigcount::BigCount;
pub use error::{Error, Result};
pub use grid::TimeGrid;
