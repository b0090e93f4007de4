//! Complex Hermitian matrix primitives, tensor-product bookkeeping and
//! numerically tolerant positivity / normalization checks.
//!
//! All values are immutable after construction and every operation is a pure
//! function, so the module is safe to use from multiple threads.
//!
//! ```
//! # extern crate rescat_core;
//! use rescat_core::qmat::{DensityMatrix, tensor, partial_trace, trace_distance};
//!
//! // a qutrit system S and a qubit catalyst C
//! let rho = DensityMatrix::from_probs(&[0.5, 0.3, 0.2], "S")?;
//! let tau = DensityMatrix::from_probs(&[5.0 / 13.0, 8.0 / 13.0], "C")?;
//!
//! let joint = tensor(&rho, &tau)?;
//! assert_eq!(joint.labels(), &["S".to_string(), "C".to_string()]);
//!
//! // marginals recover the factors exactly
//! let back = partial_trace(&joint, &["C"])?;
//! assert!(trace_distance(&back, &tau)? < 1e-12);
//! # Ok::<(), rescat_core::Error>(())
//! ```

pub mod density;
pub mod eig;
pub mod fact;
pub mod json;
pub mod matrix;

pub use density::{
    is_psd, partial_trace, partial_trace_mat, product_on_positions, tensor, trace_distance,
    trace_norm, DensityMatrix, DEFAULT_TOL,
};
pub use eig::{eigh, min_eigenvalue, HermitianEig};
pub use fact::Factorization;
pub use json::{MatrixJson, RawMatrixJson};
pub use matrix::{basis_ket, is_unitary, outer, projector, Complex64, ComplexMatrix};
