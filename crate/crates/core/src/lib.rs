//! Quantum cohomology of Grassmannians as explicit ℤ₊-rings, with
//! Frobenius–Perron dimensions computed spectrally and in closed form.

pub mod cache;
pub mod closed_form;
pub mod error;
pub mod filtration;
pub mod lr;
pub mod output;
pub mod partition;
pub mod quantum;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use partition::{GrContext, Partition};
