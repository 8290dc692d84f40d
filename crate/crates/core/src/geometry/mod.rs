//! Torus geometry, spectral calculus, the periodic Green's function and the
//! singular background fields.

pub mod green;
pub mod grid;
pub mod io;
pub mod spectral;
pub mod vortex;

pub use green::{background_fields, discrete_delta, green_function, Background, GreenTable, TorusGreen};
pub use grid::{Field, TorusGrid, MIN_GRID_SIZE};
pub use io::{FieldFile, Form};
pub use spectral::{gradient, interpolate, laplacian, poisson_solve, shifted_solve, PoissonSolution};
pub use vortex::{Site, Vortex, VortexSet};
