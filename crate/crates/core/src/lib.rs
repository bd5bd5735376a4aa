//! Jacobi n-point trace functions on the torus for small free-field vertex
//! operator (super)algebras.
//!
//! Every n-point function can be computed two ways: by a direct truncated
//! Fock-space trace ([`voa::npoint_oracle`]) and by Zhu-type reduction down
//! to the partition function ([`reduction::reduce_full`]). The special
//! functions appearing as reduction coefficients live in [`specfun`].
//!
//! # Conventions
//!
//! All nomes use `q_x = exp(2πi x)`. Insertion points are given in this
//! additive coordinate `w`, so the multiplicative vertex-operator argument is
//! `e(w) = exp(2πi w)`; formulas written with `q_i = exp(z_i)` map through
//! `z = 2πi w`.
//!
//! | quantity | library argument | nome |
//! |---|---|---|
//! | modular parameter | `tau` | `q = e(tau)` |
//! | elliptic argument | `w` | `q_w = e(w)` |
//! | Jacobi variable | `z` | `ζ = e(z)` |
//! | insertion point | `w_i` | `x_i = e(w_i)` |

pub mod cli;
pub mod error;
pub mod reduction;
pub mod specfun;
pub mod voa;

pub use error::{Error, Result};
pub use num_complex::Complex64;
