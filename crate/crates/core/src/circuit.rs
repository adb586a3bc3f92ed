//! Equivalent-circuit model of a varactor-loaded unit cell.
//!
//! The cell is a parallel tank: the bottom inductance `L2` shunts a series
//! branch made of the top inductance `L1`, the varactor capacitance `C` and
//! the loss resistance `R`. The bias voltage sets `C`, which moves the tank
//! resonance and hence the phase of the reflected wave.

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Free-space wave impedance in ohms.
pub const FREE_SPACE_IMPEDANCE: f64 = 376.730313668;

/// Relative cancellation below which the tank denominator is treated as a pole.
const POLE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitParams {
    /// Loss resistance `R` in ohms.
    pub r_series: f64,
    /// Inductance `L1` on the top of the cell, henries.
    pub l_top: f64,
    /// Inductance `L2` at the bottom of the cell, henries.
    pub l_bottom: f64,
    /// Characteristic impedance `Z0` of the incidence medium, ohms.
    pub z_air: f64,
}

impl Default for CircuitParams {
    fn default() -> Self {
        CircuitParams {
            r_series: 10.0,
            l_top: 1e-9,
            l_bottom: 4e-9,
            z_air: FREE_SPACE_IMPEDANCE,
        }
    }
}

impl CircuitParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_series >= 0.0) {
            return Err(Error::domain("r_series must be >= 0"));
        }
        if !(self.l_top > 0.0 && self.l_bottom > 0.0) {
            return Err(Error::domain("inductances must be > 0"));
        }
        if !(self.z_air > 0.0) {
            return Err(Error::domain("z_air must be > 0"));
        }
        Ok(())
    }
}

/// Junction capacitance law `C(v) = c_zero / (1 + v/v_junction)^exponent`,
/// clamped below at `c_min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VaractorModel {
    pub c_zero: f64,
    pub v_junction: f64,
    pub exponent: f64,
    pub c_min: f64,
}

impl Default for VaractorModel {
    fn default() -> Self {
        VaractorModel {
            c_zero: 1e-12,
            v_junction: 1.0,
            exponent: 0.5,
            c_min: 0.22e-12,
        }
    }
}

impl VaractorModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.c_min > 0.0 && self.c_zero > self.c_min) {
            return Err(Error::domain("varactor needs c_zero > c_min > 0"));
        }
        if !(self.v_junction > 0.0 && self.exponent > 0.0) {
            return Err(Error::domain("varactor needs v_junction > 0 and exponent > 0"));
        }
        Ok(())
    }

    /// Bias voltage at which the capacitance reaches the `c_min` clamp.
    pub fn saturation_voltage(&self) -> f64 {
        self.v_junction * ((self.c_zero / self.c_min).powf(1.0 / self.exponent) - 1.0)
    }
}

pub fn varactor_capacitance(v: f64, model: &VaractorModel) -> Result<f64> {
    if !(v >= 0.0) {
        return Err(Error::domain(format!("bias voltage {v} V must be >= 0")));
    }
    let c = model.c_zero / (1.0 + v / model.v_junction).powf(model.exponent);
    Ok(c.max(model.c_min))
}

/// Load impedance of the unit cell: `jωL2 ∥ (jωL1 + 1/(jωC) + R)`.
pub fn load_impedance(c: f64, params: &CircuitParams, f: f64) -> Result<Complex64> {
    if !(c > 0.0) {
        return Err(Error::domain(format!("capacitance {c} F must be > 0")));
    }
    if !(f > 0.0) {
        return Err(Error::domain(format!("frequency {f} Hz must be > 0")));
    }
    let w = 2.0 * PI * f;
    let shunt = Complex64::new(0.0, w * params.l_bottom);
    let branch = Complex64::new(params.r_series, w * params.l_top - 1.0 / (w * c));
    let den = shunt + branch;
    let scale = w * params.l_bottom + w * params.l_top + 1.0 / (w * c) + params.r_series;
    if den.norm() < POLE_TOLERANCE * scale {
        return Err(Error::Singularity(format!(
            "tank resonance at C = {c:e} F, f = {f:e} Hz"
        )));
    }
    Ok(shunt * branch / den)
}

pub fn reflection_coefficient(z_load: Complex64, z_air: f64) -> Result<Complex64> {
    let den = z_load + z_air;
    if den.norm() <= f64::EPSILON * (z_load.norm() + z_air.abs()) {
        return Err(Error::Singularity(format!(
            "load {z_load} cancels the source impedance {z_air}"
        )));
    }
    Ok((z_load - z_air) / den)
}

/// Quadrant-aware phase of `gamma` in degrees, mapped into `[0, 360)`.
pub fn reflection_phase(gamma: Complex64) -> Result<f64> {
    if gamma.re == 0.0 && gamma.im == 0.0 {
        return Err(Error::UndefinedPhase);
    }
    let deg = gamma.im.atan2(gamma.re).to_degrees().rem_euclid(360.0);
    // rem_euclid can round a tiny negative angle up to exactly 360.
    Ok(if deg >= 360.0 { 0.0 } else { deg })
}

/// Reflection of one bias point. `magnitude` and `phase_deg` are derived from
/// `gamma`; `phase_deg` is `NaN` only if `gamma` is exactly zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaPoint {
    pub voltage: f64,
    pub gamma: Complex64,
    pub phase_deg: f64,
    pub magnitude: f64,
}

impl GammaPoint {
    pub fn new(voltage: f64, gamma: Complex64) -> Self {
        GammaPoint {
            voltage,
            gamma,
            phase_deg: reflection_phase(gamma).unwrap_or(f64::NAN),
            magnitude: gamma.norm(),
        }
    }
}

/// Voltage → reflection lookup curve at a single frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaLut {
    frequency: f64,
    points: Vec<GammaPoint>,
}

pub const LUT_CSV_HEADER: &str = "voltage_v,re_gamma,im_gamma,mag,phase_deg";

impl GammaLut {
    pub fn new(frequency: f64, points: Vec<GammaPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::domain("LUT must have at least one point"));
        }
        if points.windows(2).any(|w| !(w[1].voltage > w[0].voltage)) {
            return Err(Error::domain("LUT voltages must be strictly increasing"));
        }
        Ok(GammaLut { frequency, points })
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn points(&self) -> &[GammaPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Phase of every point unwrapped along the voltage axis and referenced to
    /// the lowest-voltage point, in degrees.
    pub fn relative_phases(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.points.len());
        let mut acc = 0.0;
        let mut prev = self.points[0].gamma.arg();
        out.push(0.0);
        for p in &self.points[1..] {
            let cur = p.gamma.arg();
            let mut d = cur - prev;
            if d > PI {
                d -= 2.0 * PI;
            } else if d < -PI {
                d += 2.0 * PI;
            }
            acc += d;
            prev = cur;
            out.push(acc.to_degrees());
        }
        out
    }

    /// Width of the unwrapped phase range covered by the curve, degrees.
    pub fn phase_span_deg(&self) -> f64 {
        let rel = self.relative_phases();
        let (lo, hi) = rel
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| {
                (lo.min(p), hi.max(p))
            });
        hi - lo
    }

    /// Reflection at `v`, linearly interpolated between grid points.
    pub fn gamma_at(&self, v: f64) -> Result<Complex64> {
        let first = self.points[0].voltage;
        let last = self.points[self.points.len() - 1].voltage;
        if !(v >= first && v <= last) {
            return Err(Error::domain(format!(
                "voltage {v} V outside LUT range [{first}, {last}] V"
            )));
        }
        let idx = self.points.partition_point(|p| p.voltage < v);
        let hi = &self.points[idx];
        if hi.voltage == v || idx == 0 {
            return Ok(hi.gamma);
        }
        let lo = &self.points[idx - 1];
        let t = (v - lo.voltage) / (hi.voltage - lo.voltage);
        Ok(lo.gamma + (hi.gamma - lo.gamma) * t)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{LUT_CSV_HEADER}")?;
        for p in &self.points {
            writeln!(
                w,
                "{},{},{},{},{}",
                p.voltage, p.gamma.re, p.gamma.im, p.magnitude, p.phase_deg
            )?;
        }
        Ok(())
    }

    /// Reads a curve written by [`GammaLut::write_csv`]. Magnitude and phase
    /// columns are recomputed from the complex value.
    pub fn read_csv<R: BufRead>(r: R, frequency: f64) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let bad = |line: usize, msg: &str| Error::Config {
            line: line + 1,
            msg: msg.to_string(),
        };
        match lines.next() {
            Some((_, Ok(h))) if h.trim() == LUT_CSV_HEADER => {}
            _ => return Err(bad(0, "missing gamma-curve CSV header")),
        }
        let mut points = Vec::new();
        for (i, line) in lines {
            let line = line.map_err(|e| bad(i, &e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| bad(i, &e.to_string()))?;
            if cols.len() != 5 {
                return Err(bad(i, "expected 5 columns"));
            }
            points.push(GammaPoint::new(cols[0], Complex64::new(cols[1], cols[2])));
        }
        GammaLut::new(frequency, points)
    }
}

/// Evenly spaced voltage grid from `start` to `stop` inclusive.
pub fn voltage_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..n).map(|i| start + i as f64 * step).collect()
}

/// Default sweep used for the metasurface curve: 0 to 20 V in 50 mV steps.
pub fn default_voltage_grid() -> Vec<f64> {
    voltage_grid(0.0, 20.0, 0.05)
}

pub const DEFAULT_FREQUENCY_HZ: f64 = 4e9;

pub fn build_gamma_lut(
    model: &VaractorModel,
    params: &CircuitParams,
    f: f64,
    voltages: &[f64],
) -> Result<GammaLut> {
    if voltages.is_empty() {
        return Err(Error::domain("voltage grid is empty"));
    }
    if voltages.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("voltage grid must be strictly increasing"));
    }
    let points = voltages
        .iter()
        .map(|&v| {
            let c = varactor_capacitance(v, model)?;
            let z = load_impedance(c, params, f)?;
            let g = reflection_coefficient(z, params.z_air)?;
            Ok(GammaPoint::new(v, g))
        })
        .collect::<Result<Vec<_>>>()?;
    GammaLut::new(f, points)
}

/// The curve produced by the default circuit, varactor and voltage grid.
pub fn default_gamma_lut() -> GammaLut {
    build_gamma_lut(
        &VaractorModel::default(),
        &CircuitParams::default(),
        DEFAULT_FREQUENCY_HZ,
        &default_voltage_grid(),
    )
    .expect("default circuit parameters are valid")
}

/// Four control voltages with their reflection coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlSelection {
    pub voltages: [f64; 4],
    pub gammas: [Complex64; 4],
    /// Relative LUT phase actually reached for each target, degrees.
    pub phases_deg: [f64; 4],
}

/// Picks, for each target phase, the LUT voltage whose relative phase is
/// nearest. Ties go to the lower voltage.
pub fn select_control_voltages(lut: &GammaLut, target_phases: [f64; 4]) -> Result<ControlSelection> {
    let rel = lut.relative_phases();
    let span = lut.phase_span_deg();
    let (tlo, thi) = target_phases
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| {
            (lo.min(p), hi.max(p))
        });
    if thi - tlo > span + 1e-9 {
        return Err(Error::Infeasible(format!(
            "target phase spread {:.2} deg exceeds LUT span {:.2} deg",
            thi - tlo,
            span
        )));
    }
    let mut sel = ControlSelection {
        voltages: [0.0; 4],
        gammas: [Complex64::new(0.0, 0.0); 4],
        phases_deg: [0.0; 4],
    };
    for (k, &target) in target_phases.iter().enumerate() {
        let mut best = 0;
        let mut best_err = f64::INFINITY;
        for (i, &p) in rel.iter().enumerate() {
            let err = (p - target).abs();
            if err < best_err {
                best = i;
                best_err = err;
            }
        }
        sel.voltages[k] = lut.points[best].voltage;
        sel.gammas[k] = lut.points[best].gamma;
        sel.phases_deg[k] = rel[best];
    }
    Ok(sel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn j() -> Complex64 {
        Complex64::new(0.0, 1.0)
    }

    #[test]
    fn capacitance_examples() {
        let m = VaractorModel {
            c_zero: 2e-12,
            v_junction: 0.7,
            exponent: 1.0,
            c_min: 0.1e-12,
        };
        assert_eq!(varactor_capacitance(0.0, &m).unwrap(), 2e-12);
        assert_relative_eq!(varactor_capacitance(0.7, &m).unwrap(), 1e-12, max_relative = 1e-15);
        let m = VaractorModel {
            c_zero: 2e-12,
            v_junction: 0.5,
            exponent: 0.5,
            c_min: 0.1e-12,
        };
        assert_relative_eq!(varactor_capacitance(1.5, &m).unwrap(), 1e-12, max_relative = 1e-15);
        assert!(matches!(varactor_capacitance(-0.1, &m), Err(Error::Domain(_))));
    }

    #[test]
    fn capacitance_clamps() {
        let m = VaractorModel::default();
        let vs = m.saturation_voltage();
        assert_eq!(varactor_capacitance(vs + 1.0, &m).unwrap(), m.c_min);
        assert!(varactor_capacitance(vs * 0.9, &m).unwrap() > m.c_min);
    }

    #[test]
    fn load_impedance_matches_term_by_term_oracle() {
        // Frozen from an arbitrary-precision term-by-term evaluation.
        let p = CircuitParams {
            r_series: 1.0,
            l_top: 2e-9,
            l_bottom: 0.5e-9,
            z_air: FREE_SPACE_IMPEDANCE,
        };
        let z = load_impedance(1e-12, &p, 4e9).unwrap();
        assert_relative_eq!(z.re, 0.296838434859938999, max_relative = 1e-12);
        assert_relative_eq!(z.im, 5.72628774108285605, max_relative = 1e-12);
    }

    #[test]
    fn lossless_load_is_reactive() {
        let p = CircuitParams {
            r_series: 0.0,
            ..CircuitParams::default()
        };
        for c in [0.3e-12, 0.5e-12, 1e-12, 2e-12] {
            let z = load_impedance(c, &p, 4e9).unwrap();
            assert_eq!(z.re, 0.0, "c = {c}");
        }
    }

    #[test]
    fn branch_resonance_is_signalled() {
        let p = CircuitParams {
            r_series: 0.0,
            l_top: 2e-9,
            l_bottom: 0.5e-9,
            z_air: FREE_SPACE_IMPEDANCE,
        };
        let c = 1e-12;
        // jωL1 + 1/(jωC) = -jωL2  <=>  ω² = 1/((L1+L2)C)
        let f = 1.0 / (2.0 * PI * ((p.l_top + p.l_bottom) * c).sqrt());
        assert!(matches!(load_impedance(c, &p, f), Err(Error::Singularity(_))));
        assert!(matches!(load_impedance(0.0, &p, f), Err(Error::Domain(_))));
        assert!(matches!(load_impedance(c, &p, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn reflection_examples() {
        let z0 = 377.0;
        assert_eq!(reflection_coefficient(Complex64::new(z0, 0.0), z0).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(reflection_coefficient(Complex64::new(0.0, 0.0), z0).unwrap(), Complex64::new(-1.0, 0.0));
        let g = reflection_coefficient(j() * z0, z0).unwrap();
        assert!((g - j()).norm() < 1e-15);
        assert_relative_eq!(reflection_phase(g).unwrap(), 90.0, epsilon = 1e-12);
        assert!(matches!(
            reflection_coefficient(Complex64::new(-z0, 0.0), z0),
            Err(Error::Singularity(_))
        ));
    }

    #[test]
    fn phase_examples() {
        assert_eq!(reflection_phase(Complex64::new(1.0, 0.0)).unwrap(), 0.0);
        assert_eq!(reflection_phase(j()).unwrap(), 90.0);
        assert_relative_eq!(reflection_phase(Complex64::new(-1.0, -1.0)).unwrap(), 225.0, epsilon = 1e-12);
        assert!(matches!(reflection_phase(Complex64::new(0.0, 0.0)), Err(Error::UndefinedPhase)));
        // Tiny negative angle must not round to 360.
        let p = reflection_phase(Complex64::new(1.0, -1e-300)).unwrap();
        assert!((0.0..360.0).contains(&p));
    }

    #[test]
    fn single_point_lut() {
        let lut = build_gamma_lut(&VaractorModel::default(), &CircuitParams::default(), 4e9, &[3.0]).unwrap();
        assert_eq!(lut.len(), 1);
        let p = lut.points()[0];
        assert_eq!(p.magnitude, p.gamma.norm());
        assert_eq!(p.phase_deg, reflection_phase(p.gamma).unwrap());
        assert_eq!(lut.phase_span_deg(), 0.0);
    }

    #[test]
    fn lut_rejects_bad_grid() {
        let m = VaractorModel::default();
        let p = CircuitParams::default();
        assert!(build_gamma_lut(&m, &p, 4e9, &[]).is_err());
        assert!(build_gamma_lut(&m, &p, 4e9, &[1.0, 1.0]).is_err());
        assert!(build_gamma_lut(&m, &p, 4e9, &[2.0, 1.0]).is_err());
        assert!(build_gamma_lut(&m, &p, 4e9, &[-1.0, 1.0]).is_err());
    }

    #[test]
    fn default_lut_spans_255_degrees() {
        let lut = default_gamma_lut();
        let span = lut.phase_span_deg();
        assert!(span >= 255.0, "span {span}");
        assert!(span >= 270.0, "span {span} must leave room for the 270 deg sweep");
    }

    #[test]
    fn default_lut_is_monotone_then_flat() {
        // Successive-difference sweep over the grid.
        let lut = default_gamma_lut();
        let rel = lut.relative_phases();
        let vsat = VaractorModel::default().saturation_voltage();
        let mut saw_flat = false;
        for (w, pts) in rel.windows(2).zip(lut.points().windows(2)) {
            let d = w[1] - w[0];
            if pts[1].voltage <= vsat {
                assert!(d > 0.0, "phase must rise below saturation at {} V", pts[1].voltage);
            } else if pts[0].voltage >= vsat {
                assert!(d.abs() < 1e-9);
                saw_flat = true;
            }
        }
        assert!(saw_flat);
        // Saturating shape: the last quarter of the sweep adds little phase.
        let q = rel.len() * 3 / 4;
        assert!((rel[rel.len() - 1] - rel[q]) < 0.1 * lut.phase_span_deg());
    }

    #[test]
    fn selection_exact_phases() {
        let lut = default_gamma_lut();
        let rel = lut.relative_phases();
        let idx = [0usize, 50, 120, 250];
        let targets = idx.map(|i| rel[i]);
        let sel = select_control_voltages(&lut, targets).unwrap();
        for (k, &i) in idx.iter().enumerate() {
            assert_eq!(sel.voltages[k], lut.points()[i].voltage);
            assert_eq!(sel.gammas[k], lut.points()[i].gamma);
        }
    }

    #[test]
    fn selection_default_targets_match_exhaustive_search() {
        let lut = default_gamma_lut();
        let rel = lut.relative_phases();
        let targets = [0.0, 85.0, 170.0, 255.0];
        let sel = select_control_voltages(&lut, targets).unwrap();
        let max_step = rel.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
        for (k, &t) in targets.iter().enumerate() {
            // Independent scan: minimum error over all grid points.
            let best = rel.iter().map(|p| (p - t).abs()).fold(f64::INFINITY, f64::min);
            assert_eq!((sel.phases_deg[k] - t).abs(), best);
            assert!(best < max_step, "error {best} vs grid resolution {max_step}");
        }
        assert!(sel.voltages.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn selection_ties_prefer_lower_voltage() {
        let pts = vec![
            GammaPoint::new(0.0, Complex64::from_polar(1.0, 0.0)),
            GammaPoint::new(1.0, Complex64::from_polar(1.0, 10f64.to_radians())),
            GammaPoint::new(2.0, Complex64::from_polar(1.0, 20f64.to_radians())),
        ];
        let lut = GammaLut::new(4e9, pts).unwrap();
        let sel = select_control_voltages(&lut, [5.0, 15.0, 0.0, 20.0]).unwrap();
        assert_eq!(sel.voltages, [0.0, 1.0, 0.0, 2.0]);
    }

    #[test]
    fn selection_infeasible_when_span_too_small() {
        // Synthetic curve spanning exactly 255 degrees.
        let pts = (0..=255)
            .map(|d| GammaPoint::new(d as f64 * 0.1, Complex64::from_polar(1.0, (d as f64).to_radians())))
            .collect();
        let lut = GammaLut::new(4e9, pts).unwrap();
        assert_relative_eq!(lut.phase_span_deg(), 255.0, epsilon = 1e-9);
        assert!(matches!(
            select_control_voltages(&lut, [0.0, 90.0, 180.0, 270.0]),
            Err(Error::Infeasible(_))
        ));
        assert!(select_control_voltages(&lut, [0.0, 85.0, 170.0, 255.0]).is_ok());
    }

    #[test]
    fn lut_csv_roundtrip() {
        let lut = build_gamma_lut(
            &VaractorModel::default(),
            &CircuitParams::default(),
            4e9,
            &voltage_grid(0.0, 5.0, 0.5),
        )
        .unwrap();
        let mut buf = Vec::new();
        lut.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("voltage_v,re_gamma,im_gamma,mag,phase_deg\n"));
        let back = GammaLut::read_csv(&buf[..], 4e9).unwrap();
        assert_eq!(back, lut);
    }

    #[test]
    fn gamma_at_interpolates() {
        let lut = default_gamma_lut();
        let p = lut.points();
        assert_eq!(lut.gamma_at(p[10].voltage).unwrap(), p[10].gamma);
        let mid = lut.gamma_at(0.5 * (p[10].voltage + p[11].voltage)).unwrap();
        assert!((mid - 0.5 * (p[10].gamma + p[11].gamma)).norm() < 1e-12);
        assert!(lut.gamma_at(-0.1).is_err());
        assert!(lut.gamma_at(20.5).is_err());
    }

    proptest! {
        #[test]
        fn passive_cell_never_amplifies(
            v in 0.0f64..30.0,
            r in 0.0f64..50.0,
            l1 in 0.1e-9f64..10e-9,
            l2 in 0.1e-9f64..10e-9,
        ) {
            let params = CircuitParams { r_series: r, l_top: l1, l_bottom: l2, z_air: FREE_SPACE_IMPEDANCE };
            let c = varactor_capacitance(v, &VaractorModel::default()).unwrap();
            if let Ok(z) = load_impedance(c, &params, 4e9) {
                prop_assert!(z.re >= -1e-9 * z.norm());
                let g = reflection_coefficient(z, params.z_air).unwrap();
                prop_assert!(g.norm() <= 1.0 + 1e-12);
            }
        }

        #[test]
        fn lossless_cell_reflects_fully(v in 0.0f64..30.0) {
            let params = CircuitParams { r_series: 0.0, ..CircuitParams::default() };
            let c = varactor_capacitance(v, &VaractorModel::default()).unwrap();
            if let Ok(z) = load_impedance(c, &params, 4e9) {
                let g = reflection_coefficient(z, params.z_air).unwrap();
                prop_assert!((g.norm() - 1.0).abs() < 1e-9);
            }
        }

        #[test]
        fn phase_wraps_and_mirrors(re in -10.0f64..10.0, im in -10.0f64..10.0) {
            prop_assume!(im.abs() > 1e-9);
            let g = Complex64::new(re, im);
            let p = reflection_phase(g).unwrap();
            prop_assert!((0.0..360.0).contains(&p));
            let q = reflection_phase(g.conj()).unwrap();
            prop_assert!((q - (360.0 - p)).abs() < 1e-9);
        }

        #[test]
        fn capacitance_non_increasing(v in 0.0f64..40.0, dv in 0.0f64..5.0) {
            let m = VaractorModel::default();
            let a = varactor_capacitance(v, &m).unwrap();
            let b = varactor_capacitance(v + dv, &m).unwrap();
            prop_assert!(b <= a);
            if dv > 0.0 && v + dv < m.saturation_voltage() {
                prop_assert!(b < a);
            }
        }
    }

    #[test]
    fn lut_is_deterministic() {
        let a = default_gamma_lut();
        let b = default_gamma_lut();
        for (p, q) in a.points().iter().zip(b.points()) {
            assert_eq!(p.gamma.re.to_bits(), q.gamma.re.to_bits());
            assert_eq!(p.gamma.im.to_bits(), q.gamma.im.to_bits());
        }
    }
}
