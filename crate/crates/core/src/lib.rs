//! Infinitesimal rigidity of planar frameworks with cyclic rotational symmetry.
//!
//! A symmetric framework is encoded by a `Z_k`-gain graph ([`gain_graph`]).
//! Each irreducible representation `rho_j` of `Z_k` gets a combinatorial count
//! ([`sparsity`], built on [`classify`]) and a numeric orbit-matrix rank
//! ([`rigidity`]) on realisations sampled by [`lifting`]. Recursive
//! constructions live in [`henneberg`], and [`cli`] drives everything.

pub mod classify;
pub mod cli;
pub mod cyclic;
mod error;
pub mod gain_graph;
pub mod henneberg;
pub mod lifting;
pub mod rigidity;
pub mod sparsity;

pub use error::{Error, Result};
