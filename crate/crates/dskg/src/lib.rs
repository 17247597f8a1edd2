//! Klein–Gordon equation u_tt − e^(−2t)Δu + M²u = f in de Sitter spacetime
//! (Hubble constant normalized to 1).
//!
//! The crate evaluates the closed-form fundamental solution E and the Cauchy
//! kernels K₀, K₁ built from the Gauss hypergeometric function, solves the
//! Cauchy problem by quadrature of the resulting representation formulas in
//! one, two and three space dimensions, and carries independent reference
//! solvers plus Lp–Lq decay measurements used to check all of it.

// Range checks are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

pub mod cauchy;
pub mod dd;
pub mod error;
pub mod estimates;
pub mod hypergeom;
pub mod io;
pub mod kernels;
pub mod oracle;
pub mod presets;
pub mod quad;
pub mod spherical;

pub use error::{Error, Result};
pub use kernels::CurvedMass;
