//! Transmit side: bits → QPSK indices → frame → reflection sequence → samples.

mod constellation;
mod frame;
mod synth;

pub use constellation::{
    bits_for_index, index_for_bits, map_bits_to_symbols, metasurface_constellation, symbols_to_bits,
    Constellation, SymbolIndex,
};
pub use frame::{
    build_frame, build_pilot_sequence, build_sync_sequence, pilot_spectrum_guard, Frame, FrameLayout,
    DEFAULT_PILOT_SEED, SYNC_CHIP_MINUS, SYNC_CHIP_PLUS,
};
pub use synth::{
    modulate_carrier, synthesize_baseband, synthesize_passband, synthesize_symbols, BasebandSignal,
    PassbandConfig, DEFAULT_SYMBOL_RATE,
};
