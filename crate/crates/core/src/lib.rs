//! Quantum Fisher information of optical phase estimation under phase
//! diffusion.
//!
//! Three independent routes to the QFI of a dephased probe:
//!
//! * the symmetric-logarithmic-derivative formula on the reduced state
//!   ([`qfi::qfi_sld_oracle`]),
//! * the variational route: start from any purification on `S⊗E`, solve
//!   the anticommutator equation `(ĥρ_E + ρ_Eĥ)/2 = Tr_S D[ρ_{S,E}]` for the
//!   optimal environment generator and subtract `4 Var(ĥ_opt)` from the
//!   purification's QFI ([`qfi::optimal_h`]),
//! * the closed-form parametric and Gaussian bounds ([`bounds`]).
//!
//! Probe states live in a truncated Fock basis ([`probe`]); the channel and
//! its purifications are in [`channel`]. [`scan`] drives grid scans and
//! [`validate`] runs the invariant suite behind the `validate` subcommand.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod channel;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod output;
pub mod probe;
pub mod qfi;
pub mod report;
pub mod scan;
pub mod validate;

pub use error::{Error, Result};
