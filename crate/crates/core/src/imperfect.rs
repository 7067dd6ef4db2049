//! Detection and timing imperfections, and the parameter sweeps they drive.
//!
//! Detection errors are misidentification probabilities of the two-level
//! readout: `p` is the chance of reporting 0 on a `|1>` atom and `q` the
//! chance of reporting 1 on a `|0>` atom. The tabulated source defines the
//! symbols both ways round; this crate fixes `p = p(0|1)`, `q = p(1|0)` and
//! every sweep accepts a flag that swaps the reading.
//!
//! Timing errors enter through the entry delay of the second atom in each
//! cavity ([`crate::pulses::delayed_tavis_cummings`]). Delay sweeps express
//! the delay as a fraction of a reference interaction time; the default
//! reference is the longer of the two cavity interactions in the seven-step
//! program.

use rayon::prelude::*;
use serde::Serialize;

use crate::pom::{noisy_projective_pom, Pom};
use crate::pulses::compile;
use crate::qmat::{fidelity, StateVector};
use crate::superadd::{
    self, mutual_information, single_channel_capacity, sqcg, trine_pair_channel, DecoderKind,
};
use crate::{Error, Result};

/// Misidentification pair: `p = p(0|1)`, `q = p(1|0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionNoise {
    pub p: f64,
    pub q: f64,
}

impl DetectionNoise {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        for value in [p, q] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidProbability(value));
            }
        }
        Ok(Self { p, q })
    }

    /// The opposite reading of the two symbols.
    pub fn swapped(&self) -> Self {
        Self { p: self.q, q: self.p }
    }
}

/// The noisy two-level readout POM with outcomes "0" and "1":
/// `pi_0 = (1-q) P_0 + p P_1`, `pi_1 = (1-p) P_1 + q P_0`.
pub fn noisy_two_level_pom(noise: &DetectionNoise) -> Result<Pom> {
    let p0 = StateVector::basis(2, 0).projector();
    let p1 = StateVector::basis(2, 1).projector();
    noisy_projective_pom(
        &[p0, p1],
        &["0", "1"],
        &[vec![1.0 - noise.q, noise.p], vec![noise.q, 1.0 - noise.p]],
    )
}

/// The four-outcome POM for reading both atoms: tensor products of the
/// noisy two-level effects, labelled "00", "01", "10", "11".
pub fn noisy_detection_pom(noise: &DetectionNoise) -> Result<Pom> {
    let two_level = noisy_two_level_pom(noise)?;
    let mut effects = Vec::with_capacity(4);
    for (la, ea) in two_level.effects() {
        for (lb, eb) in two_level.effects() {
            effects.push((format!("{la}{lb}"), ea.tensor(eb)?));
        }
    }
    Pom::new(effects)
}

/// Reference time against which a delay fraction is resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DelayReference {
    /// The first cavity interaction, `t_1 = 3 pi / (4 phi_c)`.
    T1,
    /// The second cavity interaction, `t_2 = gamma / (2 phi_c)`.
    T2,
    /// The longer of the two (equals `t_1` here); the default.
    #[default]
    Max,
}

impl DelayReference {
    /// The reference duration at unit coupling rate.
    pub fn duration(&self) -> f64 {
        let t1 = superadd::first_cavity_area();
        let t2 = superadd::second_cavity_area();
        match self {
            DelayReference::T1 => t1,
            DelayReference::T2 => t2,
            DelayReference::Max => t1.max(t2),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            DelayReference::T1 => "t1",
            DelayReference::T2 => "t2",
            DelayReference::Max => "max",
        }
    }
}

/// One evaluated point of a detection sweep.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DetectionPoint {
    pub p: f64,
    pub q: f64,
    pub i2: f64,
    pub c1: f64,
    /// Actual gain `I2/2 (p,q) - C1(p,q)`.
    pub g: f64,
    /// Gain against the ideal single channel, `I2/2 (p,q) - C1(0,0)`.
    pub g0: f64,
}

/// Detection sweep over a rectangular (p, q) grid, row-major with `p` as
/// the slow axis.
#[derive(Debug, Clone, Serialize)]
pub struct DetectionSweep {
    pub decoder: String,
    pub swapped_convention: bool,
    pub points: Vec<DetectionPoint>,
}

/// Evaluate the superadditive gain on one noise point.
pub fn gain_at(decoder: DecoderKind, noise: &DetectionNoise, swapped: bool) -> Result<DetectionPoint> {
    let effective = if swapped { noise.swapped() } else { *noise };
    let unitary = decoder.unitary()?;
    let detection = noisy_detection_pom(&effective)?;
    let channel = trine_pair_channel(&unitary, &detection)?;
    let i2 = mutual_information(&channel);
    let c1 = single_channel_capacity(effective.p, effective.q)?;
    let c1_ideal = single_channel_capacity(0.0, 0.0)?;
    Ok(DetectionPoint {
        p: noise.p,
        q: noise.q,
        i2,
        c1,
        g: sqcg(i2, c1),
        g0: sqcg(i2, c1_ideal),
    })
}

/// Evenly spaced grid including both endpoints.
pub fn linspace(max: f64, steps: usize) -> Vec<f64> {
    if steps <= 1 {
        return vec![0.0];
    }
    (0..steps)
        .map(|i| max * i as f64 / (steps - 1) as f64)
        .collect()
}

/// Sweep the detection-noise plane; grid points evaluate independently and
/// assemble in row-major order.
pub fn detection_sweep(
    decoder: DecoderKind,
    p_values: &[f64],
    q_values: &[f64],
    swapped: bool,
) -> Result<DetectionSweep> {
    let grid: Vec<(f64, f64)> = p_values
        .iter()
        .flat_map(|&p| q_values.iter().map(move |&q| (p, q)))
        .collect();
    let points = grid
        .par_iter()
        .map(|&(p, q)| gain_at(decoder, &DetectionNoise::new(p, q)?, swapped))
        .collect::<Result<Vec<_>>>()?;
    Ok(DetectionSweep {
        decoder: decoder.as_str().to_string(),
        swapped_convention: swapped,
        points,
    })
}

/// One evaluated point of a delay sweep.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DelayPoint {
    pub delta: f64,
    pub sqcg: f64,
}

/// Delay sweep of the seven-step decoder with ideal detection.
#[derive(Debug, Clone, Serialize)]
pub struct DelaySweep {
    pub reference: String,
    pub points: Vec<DelayPoint>,
}

/// Apply the same entry delay to both cavity interactions of the seven-step
/// program and recompute the gain with ideal detection. Fails before any
/// computation if a requested delay exceeds a cavity interaction time.
pub fn delay_sweep(deltas: &[f64], reference: DelayReference) -> Result<DelaySweep> {
    let base = superadd::seven_step_sequence();
    let reference_time = reference.duration();
    let shortest = superadd::second_cavity_area();
    for &delta in deltas {
        if delta < 0.0 {
            return Err(Error::InvalidArgument(format!("negative delay fraction {delta}")));
        }
        let delay = delta * reference_time;
        if delay > shortest + 1e-15 {
            return Err(Error::DelayExceedsDuration {
                gate: "second cavity interaction (t_2 = gamma / (2 phi_c))",
                delay,
                duration: shortest,
            });
        }
    }
    let detection = Pom::computational(4, Some(2));
    let c1 = single_channel_capacity(0.0, 0.0)?;
    let points = deltas
        .par_iter()
        .map(|&delta| {
            let delayed = base.with_tavis_cummings_delay(delta * reference_time)?;
            let unitary = compile(&delayed)?;
            let channel = trine_pair_channel(&unitary, &detection)?;
            Ok(DelayPoint { delta, sqcg: sqcg(mutual_information(&channel), c1) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DelaySweep { reference: reference.as_str().to_string(), points })
}

/// Fidelity between the ideal two-atom entangling pulse (area `pi/4` from
/// `|eg>`) and the same pulse with an entry delay of the given fraction of
/// the pulse time.
pub fn epr_fidelity(delay_fraction: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&delay_fraction) {
        return Err(Error::InvalidProbability(delay_fraction));
    }
    let area = std::f64::consts::FRAC_PI_4;
    let input = StateVector::basis(4, 2);
    let ideal_gate =
        crate::pulses::tavis_cummings(crate::pulses::TavisCummingsGate::new(area, 1.0)?)?;
    let delayed_gate = crate::pulses::delayed_tavis_cummings(
        crate::pulses::TavisCummingsGate::with_delay(area, 1.0, delay_fraction * area)?,
    )?;
    let ideal = ideal_gate.apply(&input)?;
    let delayed = delayed_gate.apply(&input)?;
    fidelity(&ideal, &delayed)
}

/// Format a float with six significant digits, trimming trailing zeros the
/// way `%.6g` does.
pub fn sig6(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    let magnitude = value.abs().log10().floor() as i32;
    if (-4..6).contains(&magnitude) {
        let decimals = (5 - magnitude).max(0) as usize;
        let s = format!("{value:.decimals$}");
        if s.contains('.') {
            let trimmed = s.trim_end_matches('0').trim_end_matches('.');
            trimmed.to_string()
        } else {
            s
        }
    } else {
        let s = format!("{value:.5e}");
        // Normalize the exponent form: strip trailing zeros in the mantissa.
        let (mantissa, exponent) = s.split_once('e').expect("exponent");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{exponent}")
    }
}

/// CSV rows `p,q,I2,C1,G,G0`, six significant digits, row-major grid order.
pub fn write_detection_csv(sweep: &DetectionSweep, out: &mut impl std::io::Write) -> std::io::Result<()> {
    writeln!(out, "p,q,I2,C1,G,G0")?;
    for point in &sweep.points {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            sig6(point.p),
            sig6(point.q),
            sig6(point.i2),
            sig6(point.c1),
            sig6(point.g),
            sig6(point.g0)
        )?;
    }
    Ok(())
}

/// CSV rows `delta,sqcg`, six significant digits.
pub fn write_delay_csv(sweep: &DelaySweep, out: &mut impl std::io::Write) -> std::io::Result<()> {
    writeln!(out, "delta,sqcg")?;
    for point in &sweep.points {
        writeln!(out, "{},{}", sig6(point.delta), sig6(point.sqcg))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn zero_noise_is_projective() {
        let pom = noisy_detection_pom(&DetectionNoise::new(0.0, 0.0).unwrap()).unwrap();
        let reference = Pom::computational(4, Some(2));
        for ((la, ea), (lb, eb)) in pom.effects().iter().zip(reference.effects()) {
            assert_eq!(la, lb);
            assert!(ea.max_abs_diff(eb) < 1e-15);
        }
    }

    #[test]
    fn full_flip_relabels_the_projectors() {
        let pom = noisy_detection_pom(&DetectionNoise::new(1.0, 1.0).unwrap()).unwrap();
        // Effect "00" becomes the projector onto |11>, and so on.
        let reference = Pom::computational(4, Some(2));
        for (k, (_, effect)) in pom.effects().iter().enumerate() {
            let (_, mirrored) = &reference.effects()[3 - k];
            assert!(effect.max_abs_diff(mirrored) < 1e-15);
        }
    }

    #[test]
    fn random_noise_always_validates() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(19);
        for _ in 0..200 {
            let noise = DetectionNoise::new(rng.gen(), rng.gen()).unwrap();
            assert!(noisy_detection_pom(&noise).unwrap().validate().is_valid());
        }
    }

    #[test]
    fn gain_at_reference_points() {
        let ideal = gain_at(DecoderKind::Usa, &DetectionNoise::new(0.0, 0.0).unwrap(), false)
            .unwrap();
        assert!((ideal.g - 0.039113114).abs() < 1e-7);
        assert!((ideal.g0 - ideal.g).abs() < 1e-12);

        let blind = gain_at(DecoderKind::Usa, &DetectionNoise::new(0.5, 0.5).unwrap(), false)
            .unwrap();
        assert!(blind.i2.abs() < 1e-12);
        assert!(blind.g <= 1e-12);

        // Frozen regression values for the asymmetric probe points.
        let hi_p = gain_at(
            DecoderKind::UsaPrime,
            &DetectionNoise::new(0.1, 0.02).unwrap(),
            false,
        )
        .unwrap();
        let hi_q = gain_at(
            DecoderKind::UsaPrime,
            &DetectionNoise::new(0.02, 0.1).unwrap(),
            false,
        )
        .unwrap();
        assert!((hi_p.g - -0.004662880).abs() < 1e-7);
        assert!((hi_q.g - 0.015422247).abs() < 1e-7);
        // Under the swapped symbol reading the two points trade places.
        let swapped = gain_at(
            DecoderKind::UsaPrime,
            &DetectionNoise::new(0.1, 0.02).unwrap(),
            true,
        )
        .unwrap();
        assert!((swapped.g - hi_q.g).abs() < 1e-12);
    }

    #[test]
    fn detection_sweep_grid_order_and_symmetry() {
        let values = linspace(0.5, 6);
        let sweep = detection_sweep(DecoderKind::Usa, &values, &values, false).unwrap();
        assert_eq!(sweep.points.len(), 36);
        // Row-major: p constant across each block of q values.
        assert_eq!(sweep.points[0].p, 0.0);
        assert_eq!(sweep.points[5].p, 0.0);
        assert_eq!(sweep.points[6].p, 0.1);

        // The direct-rotation decoder is exactly p<->q symmetric.
        let mut max_asymmetry = 0.0f64;
        for i in 0..6 {
            for j in 0..6 {
                let a = sweep.points[i * 6 + j].g;
                let b = sweep.points[j * 6 + i].g;
                max_asymmetry = max_asymmetry.max((a - b).abs());
            }
        }
        assert!(max_asymmetry <= 1e-12);
    }

    #[test]
    fn sweep_values_finite_and_g0_dominates() {
        let values = linspace(0.5, 6);
        for decoder in [DecoderKind::Usa, DecoderKind::UsaPrime] {
            let sweep = detection_sweep(decoder, &values, &values, false).unwrap();
            let c1_ideal = single_channel_capacity(0.0, 0.0).unwrap();
            for point in &sweep.points {
                assert!(point.g.is_finite() && point.g0.is_finite());
                assert!(point.g >= -1.0 && point.g0 >= -1.0);
                // Noise can only lower the single-use capacity here, so the
                // gain against the ideal baseline is the smaller one.
                assert!(point.c1 <= c1_ideal + 1e-12);
                assert!(point.g0 <= point.g + 1e-12);
            }
        }
    }

    #[test]
    fn information_is_continuous_in_the_noise() {
        let base = gain_at(DecoderKind::Usa, &DetectionNoise::new(0.2, 0.1).unwrap(), false)
            .unwrap();
        let nudged = gain_at(
            DecoderKind::Usa,
            &DetectionNoise::new(0.2 + 1e-4, 0.1).unwrap(),
            false,
        )
        .unwrap();
        assert!((base.i2 - nudged.i2).abs() < 1e-2);
    }

    #[test]
    fn delay_sweep_reference_points() {
        let sweep = delay_sweep(&[0.0, 0.05], DelayReference::Max).unwrap();
        assert!((sweep.points[0].sqcg - 0.039113114).abs() < 1e-7);
        assert!((sweep.points[1].sqcg - 0.013219988).abs() < 1e-7);
    }

    #[test]
    fn delay_sweep_is_monotone_on_the_default_reference() {
        let deltas = linspace(0.07, 15);
        let sweep = delay_sweep(&deltas, DelayReference::Max).unwrap();
        for pair in sweep.points.windows(2) {
            assert!(pair[1].sqcg <= pair[0].sqcg + 1e-12);
        }
    }

    #[test]
    fn delay_sweep_rejects_overlong_delays() {
        let err = delay_sweep(&[0.2], DelayReference::Max);
        match err {
            Err(Error::DelayExceedsDuration { gate, .. }) => {
                assert!(gate.contains("second cavity"));
            }
            other => panic!("expected delay error, got {other:?}"),
        }
        // The same fraction against the short reference is fine.
        assert!(delay_sweep(&[0.2], DelayReference::T2).is_ok());
    }

    #[test]
    fn epr_fidelity_anchors() {
        assert!((epr_fidelity(0.0).unwrap() - 1.0).abs() < 1e-15);
        // Frozen model value; the degradation of a 1% entry delay within
        // the effective two-atom description.
        assert!((epr_fidelity(0.01).unwrap() - 0.999922897).abs() < 1e-7);

        let mut previous = 1.0;
        for i in 0..=20 {
            let fraction = 0.2 * i as f64 / 20.0;
            let fid = epr_fidelity(fraction).unwrap();
            assert!(fid <= previous + 1e-12);
            previous = fid;
        }
    }

    #[test]
    fn channel_columns_stay_stochastic_under_noise_and_delay() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        for _ in 0..50 {
            let noise = DetectionNoise::new(rng.gen(), rng.gen()).unwrap();
            let delta: f64 = rng.gen_range(0.0..0.07);
            let sequence = superadd::seven_step_sequence()
                .with_tavis_cummings_delay(delta * DelayReference::Max.duration())
                .unwrap();
            let unitary = compile(&sequence).unwrap();
            let detection = noisy_detection_pom(&noise).unwrap();
            let channel = trine_pair_channel(&unitary, &detection).unwrap();
            for x in 0..3 {
                let sum: f64 = (0..4).map(|y| channel.conditional[y][x]).sum();
                assert!((sum - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn six_significant_digit_format() {
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(0.5), "0.5");
        assert_eq!(sig6(0.039113114), "0.0391131");
        assert_eq!(sig6(1.369068423), "1.36907");
        assert_eq!(sig6(-0.004662880), "-0.00466288");
        assert_eq!(sig6(1e-7), "1e-7");
    }

    #[test]
    fn csv_output_is_deterministic() {
        let sweep = delay_sweep(&linspace(0.05, 3), DelayReference::Max).unwrap();
        let mut first = Vec::new();
        write_delay_csv(&sweep, &mut first).unwrap();
        let mut second = Vec::new();
        write_delay_csv(&sweep, &mut second).unwrap();
        assert_eq!(first, second);
        let text = String::from_utf8(first).unwrap();
        assert!(text.starts_with("delta,sqcg\n"));
        assert_eq!(text.lines().count(), 4);
    }
}
