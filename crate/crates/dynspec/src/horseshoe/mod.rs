//! Affine horseshoes modelled as products of a stable and an unstable Cantor set.

pub mod demo;
pub mod geometric;
pub mod model;

pub use model::{ProductDimension, ProductHorseshoe};
pub use geometric::{check_h_phi, GeometricPullback, HPhiReport, MaxBox, Verdict, Witness};
pub use demo::{load_presentation, main_theorem_demo, DemoConfig, DemoReport, StageReport};
