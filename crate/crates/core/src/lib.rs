//! Three-field mixed finite element solver for Biot's consolidation model
//! on triangulations of the unit square.
//!
//! The displacement is discretized with the Mardal–Tai–Winther element, the
//! Darcy flux with lowest-order Raviart–Thomas, and the pore pressure with
//! piecewise constants. Time stepping is backward Euler (with an optional
//! Crank–Nicolson variant), and the crate ships a verification harness that
//! measures convergence rates, inf-sup and Korn constants, and robustness of
//! the scheme for vanishing storage coefficient and large Lamé parameter.

pub mod assembly;
pub mod elements;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod mesh;
pub mod timestep;
pub mod verify;

pub use assembly::{DiscreteOperators, MaterialParams};
pub use elements::{Discretization, DofMap, MtwLocalBasis, QuadRule, Rt0LocalBasis};
pub use error::{Error, Result};
pub use geometry::{Mat2, Vec2};
pub use linalg::{CsrMatrix, DenseVector, Factorization};
pub use mesh::{BoundarySpec, BoundaryTags, Mesh, Side};
pub use timestep::{Scheme, StepSolver, SystemState, TimeGrid};
pub use verify::{ConvergenceReport, ManufacturedCase};
