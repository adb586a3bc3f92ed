//! Experiment configuration and its `key = value` text format.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;

use crate::array::{aggregate_reflection, ArrayConfig, Mask, Normalization, DEFAULT_COLS, DEFAULT_ROWS};
use crate::channel::ChannelConfig;
use crate::circuit::{
    build_gamma_lut, select_control_voltages, voltage_grid, CircuitParams, GammaLut, VaractorModel,
    DEFAULT_FREQUENCY_HZ,
};
use crate::error::{Error, Result};
use crate::rxchain::{RxConfig, DEFAULT_SYNC_THRESHOLD};
use crate::txchain::{Constellation, FrameLayout, DEFAULT_PILOT_SEED, DEFAULT_SYMBOL_RATE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Transmitter with an ideal QPSK modulator.
    Conventional,
    /// Metasurface transmitter driven by the circuit model.
    Metasurface,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "conventional" => Ok(Mode::Conventional),
            "metasurface" => Ok(Mode::Metasurface),
            other => Err(Error::domain(format!("unknown mode {other:?}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Conventional => "conventional",
            Mode::Metasurface => "metasurface",
        })
    }
}

/// Where the four transmitted reflection states come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConstellationSource {
    Ideal,
    /// LUT voltages nearest to four relative target phases (degrees).
    LutTargets([f64; 4]),
    /// Four explicit control voltages.
    LutVoltages([f64; 4]),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    /// Es/N0 points in dB.
    pub snr_db: Vec<f64>,
    pub frames_per_point: usize,
    pub base_seed: u64,
    pub sps: usize,
    pub pilot_seed: u64,
    pub symbol_rate_hz: f64,
    pub constellation: ConstellationSource,
    /// Blend from the LUT magnitudes (0) to equal magnitudes (1).
    pub amplitude_equalization: f64,
    /// Bias held on inactive cells.
    pub hold_voltage_v: f64,
    pub mask: Mask,
    pub normalization: Normalization,
    pub circuit: CircuitParams,
    pub varactor: VaractorModel,
    pub frequency_hz: f64,
    pub voltage_start_v: f64,
    pub voltage_stop_v: f64,
    pub voltage_step_v: f64,
    /// Channel template; SNR and seed are set per run.
    pub channel: ChannelConfig,
    /// SNR used by `transmit`.
    pub link_snr_db: f64,
    pub sync_threshold: f64,
    pub target_ber: f64,
}

impl ExperimentConfig {
    pub fn conventional() -> Self {
        ExperimentConfig {
            mode: Mode::Conventional,
            snr_db: vec![5.0, 7.0, 9.0, 11.0, 13.0],
            frames_per_point: 100,
            base_seed: 1,
            sps: 1,
            pilot_seed: DEFAULT_PILOT_SEED,
            symbol_rate_hz: DEFAULT_SYMBOL_RATE,
            constellation: ConstellationSource::Ideal,
            amplitude_equalization: 0.0,
            hold_voltage_v: 0.0,
            mask: Mask::full(DEFAULT_ROWS, DEFAULT_COLS),
            normalization: Normalization::FullArrayUnity,
            circuit: CircuitParams::default(),
            varactor: VaractorModel::default(),
            frequency_hz: DEFAULT_FREQUENCY_HZ,
            voltage_start_v: 0.0,
            voltage_stop_v: 20.0,
            voltage_step_v: 0.05,
            channel: ChannelConfig::default(),
            link_snr_db: f64::INFINITY,
            sync_threshold: DEFAULT_SYNC_THRESHOLD,
            target_ber: 1e-4,
        }
    }

    pub fn metasurface() -> Self {
        ExperimentConfig {
            mode: Mode::Metasurface,
            sps: 8,
            constellation: ConstellationSource::LutTargets([0.0, 85.0, 170.0, 255.0]),
            ..Self::conventional()
        }
    }

    pub fn for_mode(mode: Mode) -> Self {
        match mode {
            Mode::Conventional => Self::conventional(),
            Mode::Metasurface => Self::metasurface(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.snr_db.is_empty() {
            return Err(Error::domain("SNR list is empty"));
        }
        if self.snr_db.iter().any(|s| s.is_nan()) {
            return Err(Error::domain("SNR list contains NaN"));
        }
        if self.frames_per_point == 0 {
            return Err(Error::domain("frames_per_point must be >= 1"));
        }
        if self.sps == 0 {
            return Err(Error::domain("sps must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.amplitude_equalization) {
            return Err(Error::domain("amplitude_equalization must be in [0, 1]"));
        }
        if !(self.target_ber > 0.0 && self.target_ber < 0.5) {
            return Err(Error::domain("target_ber must be in (0, 0.5)"));
        }
        self.channel.validate()
    }

    pub fn layout(&self) -> FrameLayout {
        FrameLayout::default()
    }

    pub fn gamma_lut(&self) -> Result<GammaLut> {
        build_gamma_lut(
            &self.varactor,
            &self.circuit,
            self.frequency_hz,
            &voltage_grid(self.voltage_start_v, self.voltage_stop_v, self.voltage_step_v),
        )
    }

    /// Four control voltages, when the constellation comes from the LUT.
    pub fn control_voltages(&self, lut: &GammaLut) -> Result<Option<[f64; 4]>> {
        Ok(match self.constellation {
            ConstellationSource::Ideal => None,
            ConstellationSource::LutTargets(t) => Some(select_control_voltages(lut, t)?.voltages),
            ConstellationSource::LutVoltages(v) => Some(v),
        })
    }

    /// Per-cell constellation (unit mean power) and the matching reflection
    /// of inactive cells on the same scale.
    pub fn cell_states(&self) -> Result<(Constellation, Complex64)> {
        if self.constellation == ConstellationSource::Ideal {
            return Ok((Constellation::ideal(), Complex64::new(0.0, 0.0)));
        }
        let lut = self.gamma_lut()?;
        let volts = self.control_voltages(&lut)?.expect("LUT source");
        let mut raw = [Complex64::new(0.0, 0.0); 4];
        for (p, &v) in raw.iter_mut().zip(&volts) {
            *p = lut.gamma_at(v)?;
        }
        let t = self.amplitude_equalization;
        let mean_mag = raw.iter().map(|p| p.norm()).sum::<f64>() / 4.0;
        let raw = Constellation::new(raw)?.map(|p| p * (((1.0 - t) * p.norm() + t * mean_mag) / p.norm()))?;
        let scale = raw.normalization_scale();
        let stat = lut.gamma_at(self.hold_voltage_v)? * scale;
        Ok((raw.normalized(), stat))
    }

    pub fn array(&self, gamma_static: Complex64) -> ArrayConfig {
        ArrayConfig {
            mask: self.mask.clone(),
            gamma_static,
            normalization: self.normalization,
        }
    }

    /// Constellation seen at boresight after array aggregation.
    pub fn transmit_constellation(&self) -> Result<Constellation> {
        let (cells, stat) = self.cell_states()?;
        let array = self.array(stat);
        cells.map(|p| aggregate_reflection(p, &array))
    }

    pub fn rx_config(&self) -> RxConfig {
        RxConfig {
            layout: self.layout(),
            pilot_seed: self.pilot_seed,
            sync_threshold: self.sync_threshold,
            ..Default::default()
        }
    }

    /// Loads a config file. A `mode` key selects that mode's defaults before
    /// the remaining keys are applied, wherever it appears.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        text.parse()
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "mode" => self.mode = v.parse()?,
            "snr_db" => self.snr_db = parse_list(v)?,
            "frames_per_point" => self.frames_per_point = parse(v)?,
            "base_seed" => self.base_seed = parse(v)?,
            "sps" | "samples_per_symbol" => self.sps = parse(v)?,
            "pilot_seed" => self.pilot_seed = parse(v)?,
            "symbol_rate_hz" => self.symbol_rate_hz = parse(v)?,
            "constellation" => {
                self.constellation = match v {
                    "ideal" => ConstellationSource::Ideal,
                    "lut" => match self.constellation {
                        ConstellationSource::Ideal => ConstellationSource::LutTargets([0.0, 85.0, 170.0, 255.0]),
                        other => other,
                    },
                    other => return Err(Error::domain(format!("unknown constellation source {other:?}"))),
                }
            }
            "target_phases_deg" => self.constellation = ConstellationSource::LutTargets(parse_four(v)?),
            "control_voltages" => self.constellation = ConstellationSource::LutVoltages(parse_four(v)?),
            "amplitude_equalization" => self.amplitude_equalization = parse(v)?,
            "hold_voltage_v" => self.hold_voltage_v = parse(v)?,
            "mask" => self.mask = Mask::parse(v, self.mask.rows(), self.mask.cols())?,
            "rows" => self.mask = resize(&self.mask, parse(v)?, self.mask.cols()),
            "cols" => self.mask = resize(&self.mask, self.mask.rows(), parse(v)?),
            "normalization" => self.normalization = v.parse()?,
            "r_series" => self.circuit.r_series = parse(v)?,
            "l_top" => self.circuit.l_top = parse(v)?,
            "l_bottom" => self.circuit.l_bottom = parse(v)?,
            "z_air" => self.circuit.z_air = parse(v)?,
            "c_zero" => self.varactor.c_zero = parse(v)?,
            "v_junction" => self.varactor.v_junction = parse(v)?,
            "exponent" => self.varactor.exponent = parse(v)?,
            "c_min" => self.varactor.c_min = parse(v)?,
            "frequency_hz" => self.frequency_hz = parse(v)?,
            "voltage_start_v" => self.voltage_start_v = parse(v)?,
            "voltage_stop_v" => self.voltage_stop_v = parse(v)?,
            "voltage_step_v" => self.voltage_step_v = parse(v)?,
            "cfo_normalized" => self.channel.cfo_normalized = parse(v)?,
            "timing_offset" => self.channel.timing_offset = parse(v)?,
            "complex_gain" => self.channel.complex_gain = parse_complex(v)?,
            "fir_taps" => {
                self.channel.fir_taps = v.split(',').map(parse_complex).collect::<Result<_>>()?;
            }
            "reference_power" => self.channel.reference_power = parse(v)?,
            "link_snr_db" => self.link_snr_db = parse(v)?,
            "sync_threshold" => self.sync_threshold = parse(v)?,
            "target_ber" => self.target_ber = parse(v)?,
            other => return Err(Error::domain(format!("unknown key {other:?}"))),
        }
        Ok(())
    }
}

impl FromStr for ExperimentConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Config {
                line: i + 1,
                msg: format!("expected `key = value`, got {line:?}"),
            })?;
            entries.push((i + 1, k.trim().to_string(), v.trim().to_string()));
        }
        let mode = match entries.iter().rev().find(|(_, k, _)| k == "mode") {
            Some((line, _, v)) => v.parse().map_err(|e: Error| Error::Config {
                line: *line,
                msg: e.to_string(),
            })?,
            None => Mode::Conventional,
        };
        let mut cfg = ExperimentConfig::for_mode(mode);
        // Grid dimensions first so a mask literal is read at the final size.
        entries.sort_by_key(|(_, k, _)| !matches!(k.as_str(), "rows" | "cols"));
        for (line, k, v) in &entries {
            cfg.set(k, v).map_err(|e| Error::Config {
                line: *line,
                msg: e.to_string(),
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn resize(mask: &Mask, rows: usize, cols: usize) -> Mask {
    if mask.active() == mask.total() {
        Mask::full(rows, cols)
    } else {
        Mask::new(rows, cols, vec![false; rows * cols]).expect("consistent size")
    }
}

fn parse<T: FromStr>(v: &str) -> Result<T> {
    let v = v.trim();
    match v {
        "inf" | "+inf" | "infinity" => "inf".parse::<T>(),
        _ => v.parse::<T>(),
    }
    .map_err(|_| Error::domain(format!("cannot parse {v:?}")))
}

pub fn parse_list(v: &str) -> Result<Vec<f64>> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(parse).collect()
}

fn parse_four(v: &str) -> Result<[f64; 4]> {
    let l = parse_list(v)?;
    l.try_into().map_err(|l: Vec<f64>| Error::domain(format!("expected 4 values, got {}", l.len())))
}

/// Parses `a`, `bj`, `a+bj` or `a-bj` (`i` also accepted).
pub fn parse_complex(v: &str) -> Result<Complex64> {
    let s: String = v.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::domain(format!("cannot parse complex value {v:?}"));
    let Some(body) = s.strip_suffix('j').or_else(|| s.strip_suffix('i')) else {
        return Ok(Complex64::new(s.parse().map_err(|_| bad())?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        x => x,
    };
    Ok(Complex64::new(re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?))
}
