/// `10·log10(2)`: Es/N0 of QPSK exceeds Eb/N0 by this many dB.
pub const QPSK_ES_OVER_EB_DB: f64 = 3.010_299_956_639_812;

/// Gray-coded QPSK bit error rate in AWGN, `Q(sqrt(2·Eb/N0))`.
pub fn theoretical_qpsk_ber(ebn0_db: f64) -> f64 {
    if ebn0_db == f64::INFINITY {
        return 0.0;
    }
    if ebn0_db == f64::NEG_INFINITY {
        return 0.5;
    }
    0.5 * libm::erfc(10f64.powf(ebn0_db / 20.0))
}

pub fn ebn0_to_esn0_db(ebn0_db: f64) -> f64 {
    ebn0_db + QPSK_ES_OVER_EB_DB
}

pub fn esn0_to_ebn0_db(esn0_db: f64) -> f64 {
    esn0_db - QPSK_ES_OVER_EB_DB
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn closed_form_values() {
        // Q(sqrt 2) from the Gaussian tail.
        assert_relative_eq!(theoretical_qpsk_ber(0.0), 0.078_649_603_525_142_58, max_relative = 1e-12);
        assert_eq!(theoretical_qpsk_ber(f64::INFINITY), 0.0);
        assert_eq!(theoretical_qpsk_ber(f64::NEG_INFINITY), 0.5);
        assert!(theoretical_qpsk_ber(-200.0) > 0.4999);
        assert_relative_eq!(theoretical_qpsk_ber(9.6), 1.0e-5, max_relative = 0.05);
        assert_relative_eq!(ebn0_to_esn0_db(esn0_to_ebn0_db(7.0)), 7.0);
    }
}
