//! CSV writers for sweep results and constellation dumps.

use std::io::{self, Write};

use num_complex::Complex64;

use super::experiment::BerRecord;

pub const BER_CSV_HEADER: &str = "snr_db,bits,errors,ber";
pub const CONSTELLATION_CSV_HEADER: &str = "re,im";

pub fn write_ber_csv<W: Write>(mut w: W, records: &[BerRecord]) -> io::Result<()> {
    writeln!(w, "{BER_CSV_HEADER}")?;
    for r in records {
        writeln!(w, "{},{},{},{:e}", r.snr_db, r.bits_simulated, r.bit_errors, r.ber)?;
    }
    Ok(())
}

pub fn write_constellation_csv<W: Write>(mut w: W, symbols: &[Complex64]) -> io::Result<()> {
    writeln!(w, "{CONSTELLATION_CSV_HEADER}")?;
    for s in symbols {
        writeln!(w, "{},{}", s.re, s.im)?;
    }
    Ok(())
}
