use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::constellation::{map_bits_to_symbols, Constellation, SymbolIndex};
use crate::dsp;
use crate::error::{Error, Result};

/// Symbol that carries a `+1` sync chip (P1).
pub const SYNC_CHIP_PLUS: SymbolIndex = 0;
/// Symbol that carries a `-1` sync chip (P3, 180° away from P1).
pub const SYNC_CHIP_MINUS: SymbolIndex = 2;

/// Pilot seed whose spectrum has no bin below a tenth of the mean magnitude.
/// Found with `cargo run --release --example pilot_seed_search`.
pub const DEFAULT_PILOT_SEED: u64 = 700_317;

/// Sync + pilot subframe + data subframes, each subframe prefixed by a CP.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameLayout {
    pub sync_len: usize,
    pub fft_len: usize,
    pub cp_len: usize,
    pub data_subframes: usize,
    pub pilot_subframes: usize,
}

impl Default for FrameLayout {
    fn default() -> Self {
        FrameLayout {
            sync_len: 420,
            fft_len: 2048,
            cp_len: 160,
            data_subframes: 9,
            pilot_subframes: 1,
        }
    }
}

impl FrameLayout {
    pub const FRAME_SYMBOLS: usize = 22500;
    pub const PAYLOAD_BITS: usize = 36864;

    /// Pilot and data subframes.
    pub fn blocks(&self) -> usize {
        self.pilot_subframes + self.data_subframes
    }

    pub fn block_len(&self) -> usize {
        self.fft_len + self.cp_len
    }

    pub fn total_symbols(&self) -> usize {
        self.sync_len + self.blocks() * self.block_len()
    }

    pub fn payload_bits(&self) -> usize {
        self.data_subframes * self.fft_len * 2
    }

    /// Offset of the CP of block `i` (0 = pilot) from the frame start.
    pub fn cp_start(&self, block: usize) -> usize {
        self.sync_len + block * self.block_len()
    }

    /// Offset of the body of block `i` from the frame start.
    pub fn body_start(&self, block: usize) -> usize {
        self.cp_start(block) + self.cp_len
    }

    pub fn frame_duration_s(&self, symbol_rate: f64) -> f64 {
        self.total_symbols() as f64 / symbol_rate
    }

    pub fn throughput_bps(&self, symbol_rate: f64) -> f64 {
        self.payload_bits() as f64 * symbol_rate / self.total_symbols() as f64
    }
}

const BARKER_5: [i8; 5] = [1, 1, 1, -1, 1];
const BARKER_7: [i8; 7] = [1, 1, 1, -1, -1, 1, -1];
const BARKER_13: [i8; 13] = [1, 1, 1, 1, 1, -1, -1, 1, 1, -1, 1, -1, 1];

fn kron(a: &[i8], b: &[i8]) -> Vec<i8> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

/// 420-chip extended Barker sequence: Barker-5 ⊗ Barker-13 ⊗ Barker-7
/// (455 chips) truncated to 420. Its aperiodic autocorrelation peak is seven
/// times the largest sidelobe.
pub fn build_sync_sequence() -> Vec<i8> {
    let mut s = kron(&kron(&BARKER_5, &BARKER_13), &BARKER_7);
    s.truncate(420);
    s
}

/// Pseudo-random QPSK pilot indices, `len` long, derived from `seed`.
pub fn build_pilot_sequence(seed: u64, len: usize) -> Vec<SymbolIndex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| (rng.next_u32() >> 30) as SymbolIndex).collect()
}

/// Ratio of the smallest pilot DFT magnitude to the mean magnitude, with the
/// pilot mapped onto the ideal constellation.
pub fn pilot_spectrum_guard(pilot: &[SymbolIndex]) -> f64 {
    let c = Constellation::ideal();
    let x: Vec<Complex64> = pilot.iter().map(|&i| c.point(i)).collect();
    let mags: Vec<f64> = dsp::fft(&x).iter().map(|v| v.norm()).collect();
    let mean = mags.iter().sum::<f64>() / mags.len() as f64;
    mags.iter().cloned().fold(f64::INFINITY, f64::min) / mean
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub sync: Vec<i8>,
    pub pilot: Vec<SymbolIndex>,
    pub data: Vec<Vec<SymbolIndex>>,
    pub payload_bits: Vec<u8>,
}

/// Assembles one frame. Payload bits fill the data subframes in order, two
/// bits per symbol.
pub fn build_frame(payload: &[u8], layout: &FrameLayout, pilot_seed: u64) -> Result<Frame> {
    if payload.len() != layout.payload_bits() {
        return Err(Error::Framing(format!(
            "payload has {} bits, frame carries {}",
            payload.len(),
            layout.payload_bits()
        )));
    }
    let sync = build_sync_sequence();
    if layout.sync_len != sync.len() {
        return Err(Error::Framing(format!("layout sync length {} unsupported", layout.sync_len)));
    }
    let symbols = map_bits_to_symbols(payload)?;
    Ok(Frame {
        sync,
        pilot: build_pilot_sequence(pilot_seed, layout.fft_len),
        data: symbols.chunks(layout.fft_len).map(<[_]>::to_vec).collect(),
        payload_bits: payload.to_vec(),
    })
}

impl Frame {
    /// Symbol indices on air: sync chips, then each subframe preceded by a
    /// copy of its last `cp_len` symbols.
    pub fn serialize(&self, layout: &FrameLayout) -> Vec<SymbolIndex> {
        let mut out = Vec::with_capacity(layout.total_symbols());
        out.extend(
            self.sync
                .iter()
                .map(|&c| if c > 0 { SYNC_CHIP_PLUS } else { SYNC_CHIP_MINUS }),
        );
        for block in std::iter::once(&self.pilot).chain(&self.data) {
            out.extend_from_slice(&block[block.len() - layout.cp_len..]);
            out.extend_from_slice(block);
        }
        out
    }
}
