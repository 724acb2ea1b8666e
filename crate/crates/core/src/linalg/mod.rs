//! Dense Hermitian eigensolver, tensor lattices and the sparse solver stack
//! used by the Dirichlet module.

pub mod csr;
pub mod dense;
pub mod gmres;
pub mod herm;
pub mod lattice;
pub mod multigrid;
pub mod stencil;

pub use csr::{Csr, CsrBuilder};
pub use gmres::{gmres, GmresOptions, GmresStats};
pub use herm::{Eigh, HermMatrix};
pub use lattice::{Axis, Lattice};
pub use multigrid::{Multigrid, MultigridWork};
pub use stencil::Coefficients;
