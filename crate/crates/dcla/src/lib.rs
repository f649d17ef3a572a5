//! Langevin samplers for potentials `V = f + r1 - r2` whose regularizer is a
//! difference of convex functions.
//!
//! The smooth term `f` is gradient-friendly; the nonsmooth, generally
//! non-convex regularizer `r = r1 - r2` is handled through the Moreau
//! envelopes of its convex components, turning every transition into a
//! composition of a gradient step and closed-form (or bisection) proximal
//! maps. The crate provides:
//!
//! * proximal/Moreau calculus ([`prox`], [`moreau`]);
//! * a catalog of DC regularizers with their Lipschitz metadata
//!   ([`regularizers`]);
//! * target potentials with dissipativity and step-size calculators
//!   ([`potentials`]);
//! * five transition kernels and a reproducible multi-chain runner
//!   ([`samplers`]);
//! * binned-KL diagnostics against quadrature-normalized 2D targets
//!   ([`diagnostics`]);
//! * a JSON-configured experiment harness ([`harness`]), also exposed by the
//!   `dcla` binary.
//!
//! Every run is keyed by `(seed, chain index)` and replays bit for bit.
//! Start with the `examples/` directory: each file exercises one capability
//! end to end.

pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod moreau;
pub mod oracle;
pub mod point;
pub mod potentials;
pub mod prox;
pub mod quadrature;
pub mod regularizers;
pub mod rng;
pub mod samplers;

pub use error::{DiagnosticsError, ModelError, PotentialError, ProxError, SamplerError, StepError};
pub use point::Point;
pub use rng::{draw_normal, RandomStream};
