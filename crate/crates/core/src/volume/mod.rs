//! Radiance-field stand-in: density/radiance grids, the emission-absorption
//! integrators that march them, and signed distance grids for collision.

mod grid;
pub mod io;
mod lattice;
mod march;
pub mod presets;
mod sdf;

pub use grid::{GridError, Medium, RadianceGrid};
pub use lattice::Lattice;
pub use march::{march_segment, substeps, transmittance, MarchResult};
pub use sdf::{
    bake_sdf_from_field, bake_sdf_from_mesh, density_isosurface_points, SdfGrid, SdfSample,
};
