//! Tunneling splittings in asymmetric double-well potentials.

pub mod config;
pub mod dynamics;
pub mod error;
pub mod exact_vd;
pub mod logspace;
pub mod oracle;
pub mod pcf;
pub mod potential;
pub mod quad;
pub mod special;
pub mod wkb;

pub use error::{Error, Result};
