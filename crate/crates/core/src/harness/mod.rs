//! Experiment engine: configuration, Monte-Carlo sweeps, file streaming and
//! result output.

mod config;
mod experiment;
mod iqfile;
mod output;
mod theory;

pub use config::{parse_complex, parse_list, ConstellationSource, ExperimentConfig, Mode};
pub use experiment::{
    cluster_energies, compare_architectures, data_indices, gap_db, random_payload, run_ber_sweep, run_seed,
    run_sweep, snr_at_ber, BerRecord, Comparison, FrameRun, Link, PointSummary,
};
pub use iqfile::{
    bits_to_bytes, bytes_to_bits, header_path, read_iq, receive_bits, receive_file, transmit_bits, transmit_file,
    write_iq, StreamHeader,
};
pub use output::{write_ber_csv, write_constellation_csv, BER_CSV_HEADER, CONSTELLATION_CSV_HEADER};
pub use theory::{ebn0_to_esn0_db, esn0_to_ebn0_db, theoretical_qpsk_ber, QPSK_ES_OVER_EB_DB};
