//! Finite classical polar space engine and m-ovoid toolkit.
//!
//! Builds the polar spaces Q^-(2r+1,q), W(2r-1,q) and H(2r,q) over small
//! finite fields, validates and searches for (weighted) m-ovoids, verifies
//! the counting identities these objects satisfy, and evaluates the known
//! lower-bound formulas on m with exact integer arithmetic.

pub mod bounds;
pub mod cli;
pub mod config;
pub mod exact;
pub mod gf;
pub mod ovoid;
pub mod polar;
pub mod projgeom;
pub mod search;

pub use cli::run;
pub use config::Config;
pub use gf::{factor_prime_power, Field};
pub use polar::{PolarSpace, SpaceKind};
pub use projgeom::{ProjGeometry, Subspace};
