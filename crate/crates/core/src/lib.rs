//! Operators, Bethe equations and Bethe eigenvectors of the inhomogeneous
//! higher-spin XYZ chain and of its quasiclassical limit, the XYZ Gaudin model.
//!
//! Layers, bottom up:
//!
//! * [`elliptic`]: theta functions, Weierstrass `zeta`/`p`, structure functions `w_a`.
//! * [`sklyanin`]: spin-`ell` representations of the Sklyanin algebra on theta-function spaces.
//! * [`lattice`]: R-matrix, L-operators, monodromy, transfer matrix, quantum determinant.
//! * [`gaudin`]: classical L-operators, `tau_hat(u)` and the Gaudin Hamiltonians.
//! * [`bethe`]: Bethe equations of both models, Newton solvers, eigenvalue formulas.
//! * [`vectors`]: gauge matrices, pseudovacua and Bethe vectors for both models.

pub mod bethe;
pub mod elliptic;
pub mod error;
pub mod gaudin;
pub mod lattice;
pub mod linalg;
pub mod sklyanin;
pub mod vectors;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Dense complex matrix used for every operator.
pub type CMatrix = nalgebra::DMatrix<Complex64>;
/// Dense complex vector used for every state.
pub type CVector = nalgebra::DVector<Complex64>;
