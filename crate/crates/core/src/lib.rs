pub mod capacities;
pub mod cli;
pub mod channels;
pub mod error;
pub mod ls_family;
pub mod matcore;
pub mod optim;
pub mod protocols;
pub mod sdp;
pub mod state;

pub use error::{Error, Result};
