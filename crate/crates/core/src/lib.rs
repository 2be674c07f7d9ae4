//! Core algebra for the tetrahedral sieve: linear algebra over F_p and Z,
//! explicit SL(2, Z/3^n) groups, F_3[A_4]-modules, group cohomology and the
//! Selmer dimension ledger.

pub mod linalg;
pub mod arith;
pub mod group;
pub mod rep;
pub mod cohomology;
pub mod selmer;
