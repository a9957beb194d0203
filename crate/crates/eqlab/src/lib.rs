//! Exact-arithmetic toolkit for equiangular line systems and the
//! combinatorial designs behind them.
//!
//! The crate certifies, with no floating point anywhere:
//! - the classical maximal line systems in dimensions 2, 3, 6, 7 and 23,
//!   built from block sets (pair sets, a Steiner triple system of order 15,
//!   the unique 2-(6,3,2) design, the S(4,7,23) Golay heptads);
//! - the absolute, relative, Neumann-parity and incoherence bounds;
//! - regular two-graph parameters and the 2-design structures they carry;
//! - the quasi-symmetric design living on a maximal incoherent subset,
//!   with Taylor's partition, vector and set-sum identities;
//! - tight spherical 5-designs via exact moment sums;
//! - feasible quasi-symmetric parameter tuples (the full scan tables),
//!   Calderbank-type nonexistence filters, and the integer-point search on
//!   y² = x³ − x² − 5x + 6;
//! - the extraction of the E8 root system from the 276 lines in R²³ and the
//!   descent chain 28 → 16 → 10 → 6 → 3 matching the del Pezzo counts.

pub mod designkit;
pub mod e8bridge;
pub mod exactarith;
pub mod linesys;
pub mod paramscan;
pub mod twograph;

pub use designkit::{BlockSet, DesignCertificate, DesignError};
pub use exactarith::{ExactMatrix, QuadScalar, Rat};
pub use linesys::{IncoherentWitness, LineSysError, LineSystem};
pub use twograph::{Graph, Regularity, RegularityParams, TwoGraph};
