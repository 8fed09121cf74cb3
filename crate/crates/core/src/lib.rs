//! Construction and verification of Kochen-Specker (KS) and generalized
//! Kochen-Specker (GKS) proofs.
//!
//! - [`algebra`]: exact rational projectors and a complex floating backend.
//! - [`rays`]: the 24-cell, its dual, the Peres 24-ray set, the 18-ray set
//!   and the qubit hexagon, plus the ray text format.
//! - [`structures`]: orthogonality graphs, basis enumeration, KS and POVM
//!   covers, parity certificates.
//! - [`coloring`]: exactly-one search, exhaustive oracle, criticality, DIMACS.
//! - [`spin`]: spin-j constructions over arbitrary directions.

pub mod algebra;
pub mod builtin;
pub mod coloring;
pub mod rays;
pub mod spin;
pub mod structures;
