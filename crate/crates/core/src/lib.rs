//! Residue generator construction kit for the conjugate moduli `2^n - 1` and
//! `2^n + 1`.
//!
//! The crate builds gate-level netlists (full adders, half adders, inverters
//! and constants) for four circuit families:
//!
//! * classic generators mod `2^n - 1` and mod `2^n + 1` built from periodicity
//!   of `|2^k|` and carry-save reduction with (inverted) end-around carry,
//! * a universal generator mod `2^n + 1` whose output is produced directly in
//!   diminished-1 form for any input width `p`, and
//! * a bi-residue generator that shares one front-end reduction between both
//!   conjugate moduli.
//!
//! Every netlist can be simulated bit-exactly, costed (FA/HA/inverter counts
//! and logic depth), exported to JSON or structural HDL, and checked against
//! an arithmetic oracle by exhaustive or seeded random sweeps.

pub mod csa;
pub mod export;
pub mod generators;
pub mod modmath;
pub mod netlist;
pub mod verify;

mod error;

pub use error::{Error, Result};
pub use generators::{BuildReport, Family, Generated, GeneratorSpec};
pub use modmath::{d1_decode, d1_encode, oracle_residue, BitWeight, D1Value, ModKind, Modulus};
pub use netlist::{compose, CostReport, Gate, GateKind, Netlist, OutputPort, PortValue, Signal};
pub use verify::{SweepMode, SweepPlan, Verdict};
