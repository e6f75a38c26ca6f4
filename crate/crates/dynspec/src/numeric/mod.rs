//! Exact arithmetic: rationals, rational intervals, quadratic surds and Möbius maps.

pub mod expr;
pub mod mobius;
pub mod poly;
pub mod rational;
pub mod surd;

pub use expr::parse_surd;
pub use mobius::Mobius;
pub use poly::Poly2;
pub use rational::{Rat, RatInterval};
pub use surd::{QuadSurd, SurdSum};
