//! Simulation of a QPSK wireless link whose transmitter is a programmable
//! metasurface.
//!
//! The crate is organised along the signal path:
//!
//! * [`circuit`]: varactor-loaded unit cell, reflection coefficient and the
//!   voltage to reflection lookup table.
//! * [`array`]: aggregation of unit-cell reflections over an activation mask.
//! * [`txchain`]: bit mapping, frame assembly and waveform synthesis.
//! * [`channel`]: gain, multipath, carrier frequency offset, timing offset and
//!   AWGN.
//! * [`rxchain`]: frame sync, CP-based CFO correction, LS channel estimation,
//!   zero-forcing SC-FDE and QPSK demodulation.
//! * [`harness`]: configuration, Monte-Carlo sweeps and IQ/bit file I/O.

pub mod array;
pub mod channel;
pub mod circuit;
pub mod dsp;
pub mod error;
pub mod exec;
pub mod harness;
pub mod rxchain;
pub mod txchain;

pub use error::{Error, Result};
pub use exec::Execution;
pub use num_complex::Complex64;
