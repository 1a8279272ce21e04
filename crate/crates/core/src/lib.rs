//! Numerical toolkit for Seneta norming constants of supercritical
//! Bellman-Harris branching processes.
//!
//! The pipeline: parse an offspring law {pi_k} and a lifetime law G, solve
//! the Malthusian parameter beta, build the tilted lifetime G_beta and its
//! renewal table, solve the limit Laplace-transform fixed point R, and
//! derive the norming series X(t), sigma(t) and the asymptote Y(t). A
//! discrete-time oracle (iterated inverse PGFs) and a Monte Carlo simulator
//! cross-check the continuous-time path.

pub mod error;
pub mod gw;
pub mod laplace;
pub mod lifetime;
pub mod numeric;
pub mod offspring;
pub mod renewal;
pub mod sim;

pub use error::{Error, Result};
pub use lifetime::{LatticeClass, LifetimeLaw, TiltedLifetime};
pub use offspring::{OffspringLaw, XLogXClass};
