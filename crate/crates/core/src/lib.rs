pub mod error;
pub mod numerics;
pub mod random;
pub mod system;
pub mod structfact;
pub mod paramspace;
pub mod spectral;
pub mod forward;
pub mod fixtures;
pub mod iep;
pub mod mup;
pub mod analysis;
pub mod io;
pub mod cli;
pub mod batch;
