//! Planar primitives: rasterized sets, dilation, connectivity, paths and the
//! separation test.

mod edt;
mod flood;
mod path;
mod point;
mod raster;
mod separation;
pub mod shapes;

pub use edt::{dilate, distance_to_set, squared_distance_transform};
pub use flood::{boundary_of_unbounded_component, components4, unbounded_complement, Components};
pub use path::{gamma0, gamma0_at, sup_distance, PathSample, GAMMA0_VERTICES};
pub use point::Point2;
pub use raster::{Grid, RasterSet};
pub use separation::{rasterize_polyline, separates_origin, winding_number};
