//! Regular Cantor sets given by contracting inverse branches over a subshift of finite type.

pub mod branch;
pub mod cf;
pub mod cover;
pub mod interval_union;
pub mod limit_geometry;
pub mod presentation;
pub mod thickness;

pub use branch::{BranchMap, CertifiedMap, Composite, PiecewiseLinear};
pub use cf::{cf_digits_value, cf_value, Side};
pub use cover::{build_cover, build_cover_from, cylinder, word_map, word_maps, Cell, CoverCell, CylinderCover};
pub use interval_union::IntervalUnion;
pub use limit_geometry::{limit_geometry, LimitGeometryApprox};
pub use presentation::{preset, AffinePiece, Branch, CantorPresentation, PresentationKind};
pub use thickness::{thickness, thickness_of_cover, Thickness};
