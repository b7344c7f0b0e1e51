//! Loop-trace local invariants of multi-qubit states.
//!
//! Every pair of qubits `a`, `b` defines a real 4×4 *link matrix*
//! `S(b,a)_{ji} = ½⟨σ_i ⊗ σ_j⟩`, which maps the Pauli vector of an operator
//! on `a` to the (sub-normalized) collapsed operator on `b`. Multiplying link
//! matrices around a closed path of sites and taking the trace gives a
//! quantity that is unchanged by any local unitary on any qubit. Inserting the
//! Minkowski metric `η = diag(1,-1,-1,-1)` at every site of the path (a spin
//! flip) lifts the invariance to local `SL(2,C)` operations.
//!
//! The crate is `no_std` (with `alloc`) and split into:
//!
//! - [`qstate`]: pure states, density matrices, partial traces, Pauli
//!   expansions and seeded random sampling of states and local operations.
//! - [`linkspace`]: link matrices, adjoint representations, the spin-flip
//!   metric and loop products.
//! - [`invariants`]: the named catalogue for three qubits (purities, Kempe
//!   invariant, three-tangle, flipped pairs, link determinants, tangle
//!   reconstruction) plus a Wootters concurrence oracle.
//! - [`verify`]: numerical certification suites (invariance, identities,
//!   finite-difference independence, Monte Carlo average fidelity).
//!
//! Sites are numbered from 0 and site 0 is the most significant bit of a
//! computational-basis index.
#![no_std]
// `!(x <= tol)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
pub mod invariants;
pub mod linkspace;
pub mod qstate;
pub mod rng;
pub mod tol;
pub mod verify;

pub use error::{Error, Result};
pub use invariants::{InvariantReport, TangleSet};
pub use linkspace::{AdjointMatrix, LinkMatrix, LoopSpec, LoopStep};
pub use qstate::{DensityMatrix, GroupClass, LocalOperation, PauliVector, PureState, C64};
