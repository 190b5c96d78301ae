//! Structure-preserving discrete exterior calculus for barotropic flow on
//! periodic Delaunay-Voronoi meshes.

pub mod dec_ops;
pub mod diagnostics;
pub mod dynamics;
pub mod geom;
pub mod harness;
pub mod mesh;
pub mod sparse;
pub mod thermo;

pub use dec_ops::{Cochain, Dec, HodgeStars, Reconstruction, Side};
pub use thermo::{EquationOfState, ThermoError};
pub use mesh::{CellComplex, MeshError, RegularityReport};
pub use dynamics::{DynError, FluxKind, Integrator, Scheme, SchemeConfig, State, ViscositySpec};
