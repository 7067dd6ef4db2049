//! Reference checks: every headline number and structural property of the
//! two measurements, evaluated against its tabulated expectation.
//!
//! Each check reports the measured value, the expected value with its
//! tolerance, and a note where the comparison needs context. Three checks
//! are currently red and are kept red on purpose; their notes and the
//! project README explain what was measured instead and why the tabulated
//! targets are unreachable from the defining equations.

use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::imperfect::{
    delay_sweep, detection_sweep, epr_fidelity, gain_at, linspace, noisy_detection_pom,
    DelayReference, DetectionNoise,
};
use crate::pom::{outcome_probs, Pom};
use crate::pulses::{compile, matches_up_to_relabel, ramsey, TavisCummingsGate};
use crate::qmat::{c64, global_phase_deviation, vectors_equal_up_to_phase, Operator, StateVector};
use crate::superadd::{
    bell_reference_unitary, bell_sequence, bell_states, codewords, mutual_information,
    seven_step_sequence, single_channel_capacity, single_tc_insufficient, sqcg,
    sqrt_measurement, sqrt_measurement_closed_form, trine_pair_channel, u_sa, u_sa_prime,
    Channel, DecoderKind,
};
use crate::{idp, Result};

/// Outcome of one reference check.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub id: &'static str,
    pub name: &'static str,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn against(id: &'static str, name: &'static str, measured: f64, expected: f64, tolerance: f64) -> Self {
        Self {
            id,
            name,
            measured,
            expected,
            tolerance,
            passed: (measured - expected).abs() <= tolerance,
            note: None,
        }
    }

    fn bound(id: &'static str, name: &'static str, measured: f64, bound: f64) -> Self {
        Self {
            id,
            name,
            measured,
            expected: bound,
            tolerance: bound,
            passed: measured <= bound,
            note: None,
        }
    }

    fn with_note(mut self, note: String) -> Self {
        self.note = Some(note);
        self
    }

    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut line = format!(
            "{:<6} {:<58} measured {:>14.9}  expected {:>12.9} +- {:.1e}  {}",
            self.id, self.name, self.measured, self.expected, self.tolerance, status
        );
        if let Some(note) = &self.note {
            line.push_str(&format!("\n       note: {note}"));
        }
        line
    }
}

fn ideal_detection() -> Pom {
    Pom::computational(4, Some(2))
}

/// C1 at zero noise equals the tabulated single-use capacity.
pub fn check_single_capacity() -> Result<Check> {
    let measured = single_channel_capacity(0.0, 0.0)?;
    Ok(Check::against("AC1", "single-use capacity C1(0,0)", measured, 0.6454, 5e-5))
}

/// I2 of the trine pair channel against the tabulated 1.3690.
pub fn check_pair_information_value() -> Result<Check> {
    let i2 = mutual_information(&trine_pair_channel(&u_sa(), &ideal_detection())?);
    Ok(
        Check::against("AC2a", "pair mutual information I2 (tabulated 1.3690)", i2, 1.3690, 5e-5)
            .with_note(
                "computed value is 1.3690684; the tabulated 1.3690 is a truncation \
                 (it rounds to 1.3691), so this check cannot pass at +-5e-5 and is \
                 kept red rather than widened"
                    .into(),
            ),
    )
}

/// The four computation routes agree with each other to 1e-6.
pub fn check_pair_information_consistency() -> Result<Check> {
    let ideal = ideal_detection();
    let reference = mutual_information(&trine_pair_channel(&u_sa(), &ideal)?);
    let mut max_diff = 0.0f64;
    for kind in [DecoderKind::UsaPrime, DecoderKind::Pulse] {
        let i2 = mutual_information(&trine_pair_channel(&kind.unitary()?, &ideal)?);
        max_diff = max_diff.max((i2 - reference).abs());
    }
    let m = sqrt_measurement()?;
    let via_basis = crate::superadd::channel_matrix(
        &Operator::identity(4),
        &codewords().codewords,
        &[1.0 / 3.0; 3],
        &m.pom(),
    )?;
    max_diff = max_diff.max((mutual_information(&via_basis) - reference).abs());
    Ok(Check::bound(
        "AC2b",
        "I2 route spread (basis vs rotations vs compiled pulses)",
        max_diff,
        1e-6,
    ))
}

/// The ideal coding gain.
pub fn check_ideal_gain() -> Result<Check> {
    let i2 = mutual_information(&trine_pair_channel(&u_sa(), &ideal_detection())?);
    let c1 = single_channel_capacity(0.0, 0.0)?;
    Ok(Check::against("AC3", "ideal coding gain I2/2 - C1", sqcg(i2, c1), 0.0391, 5e-5))
}

/// The compiled seven-step program against the tabulated target matrix.
pub fn check_seven_step_compilation() -> Result<Check> {
    let compiled = compile(&seven_step_sequence())?;
    let deviation = global_phase_deviation(&compiled, &u_sa_prime())?;

    let mut magnitude_dev = 0.0f64;
    let target = u_sa_prime();
    for i in 0..4 {
        for j in 0..4 {
            magnitude_dev =
                magnitude_dev.max((compiled.get(i, j).norm() - target.get(i, j).norm()).abs());
        }
    }
    let ideal = ideal_detection();
    let channel_dev = channel_spread(
        &trine_pair_channel(&compiled, &ideal)?,
        &trine_pair_channel(&target, &ideal)?,
    );
    Ok(Check::bound(
        "AC4",
        "seven-step compilation matches the tabulated matrix (global phase)",
        deviation,
        1e-9,
    )
    .with_note(format!(
        "the tabulated matrix is not the product of its own step list: no sign or \
         ordering convention reproduces its phases (1024 variants scanned), though \
         entry magnitudes agree to {magnitude_dev:.1e} and the induced channels to \
         {channel_dev:.1e}; the discrepancy sits in internal phases of the two rows \
         that read the degenerate outcome pair, so every statistic is unaffected; \
         kept red as a faithful comparison"
    )))
}

fn channel_spread(a: &Channel, b: &Channel) -> f64 {
    let mut spread = 0.0f64;
    for (row_a, row_b) in a.conditional.iter().zip(&b.conditional) {
        for (pa, pb) in row_a.iter().zip(row_b) {
            spread = spread.max((pa - pb).abs());
        }
    }
    spread
}

/// The Bell program sends each Bell state to one detector outcome.
pub fn check_bell_sequence() -> Result<Check> {
    let u = compile(&bell_sequence())?;
    let [phi_p, psi_p, psi_m, phi_m] = bell_states();
    let assignments = [(phi_p, 0usize), (psi_p, 1), (psi_m, 2), (phi_m, 3)];
    let mut min_probability = 1.0f64;
    for (state, target) in &assignments {
        let image = u.apply(state)?;
        min_probability = min_probability.min(image.amp(*target).norm_sqr());
    }
    let relabel_ok = matches_up_to_relabel(&u, &bell_reference_unitary(), 1e-9)?.is_some();
    let check = Check {
        id: "AC5",
        name: "bell sequence: deterministic detection of every bell state",
        measured: min_probability,
        expected: 1.0,
        tolerance: 1e-9,
        passed: (min_probability - 1.0).abs() <= 1e-9 && relabel_ok,
        note: Some(
            "detection map phi+ -> 00, psi+ -> 01, psi- -> 10, phi- -> 11; a row \
             permutation of the reference bell detector (any permutation is an \
             equally valid assignment of detector outcomes)"
                .into(),
        ),
    };
    Ok(check)
}

/// Unambiguous discrimination over a 50-point theta grid, through the POM
/// and through the compiled pulses.
pub fn check_idp_grid() -> Result<Check> {
    let mut max_error = 0.0f64;
    let mut max_inconclusive_dev = 0.0f64;
    for i in 1..=50 {
        let theta = std::f64::consts::FRAC_PI_4 * i as f64 / 51.0;
        let expected_inconclusive = (2.0 * theta).cos();

        let problem = idp::IdpProblem::new(theta, 0.5)?;
        let stats = idp::idp_statistics(&problem)?;
        max_error = max_error.max(stats.max_error);
        max_inconclusive_dev =
            max_inconclusive_dev.max((stats.avg_inconclusive - expected_inconclusive).abs());

        let pulse = idp::pulse_statistics(theta)?;
        max_error = max_error.max(pulse[0][1]).max(pulse[1][0]);
        let avg = 0.5 * (pulse[0][2] + pulse[1][2]);
        max_inconclusive_dev = max_inconclusive_dev.max((avg - expected_inconclusive).abs());
    }
    let passed = max_error <= 1e-12 && max_inconclusive_dev <= 1e-9;
    Ok(Check {
        id: "AC6",
        name: "unambiguous discrimination: zero error, p(?) = cos(2 theta)",
        measured: max_error.max(max_inconclusive_dev),
        expected: 0.0,
        tolerance: 1e-9,
        passed,
        note: None,
    })
}

/// The advantage interval against a bisected brute-force comparison.
pub fn check_advantage_interval() -> Result<Check> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(97);
    let mut max_dev = 0.0f64;
    for _ in 0..20 {
        let theta = rng.gen_range(0.05..std::f64::consts::FRAC_PI_4 - 0.05);
        let overlap = (2.0 * theta).cos();
        let (lo, hi) = idp::advantage_interval(theta)?;

        // Brute force: bisect the prior where the fixed measurement's p(?)
        // crosses the best projective baseline.
        let crossing = |target_low: bool| -> f64 {
            let mut lo_p = if target_low { 0.0 } else { 0.5 };
            let mut hi_p = if target_low { 0.5 } else { 1.0 };
            for _ in 0..60 {
                let mid = 0.5 * (lo_p + hi_p);
                let problem = idp::IdpProblem::new(theta, mid).expect("valid prior");
                let advantage = overlap < idp::projective_baseline(&problem);
                if target_low {
                    if advantage {
                        hi_p = mid;
                    } else {
                        lo_p = mid;
                    }
                } else if advantage {
                    lo_p = mid;
                } else {
                    hi_p = mid;
                }
            }
            0.5 * (lo_p + hi_p)
        };
        max_dev = max_dev.max((crossing(true) - lo).abs());
        max_dev = max_dev.max((crossing(false) - hi).abs());
    }
    Ok(Check::bound(
        "AC7",
        "advantage interval (c/(1+c), 1/(1+c)) vs brute-force crossing",
        max_dev,
        1e-6,
    )
    .with_note(
        "the tabulated closed-form bounds are reported verbatim alongside \
         (cli: paper_interval); they match this interval only near theta = pi/8 \
         and are inverted or empty elsewhere"
            .into(),
    ))
}

/// The square-root measurement basis and the silent singlet outcome.
pub fn check_sqrt_measurement() -> Result<Check> {
    let m = sqrt_measurement()?;
    let reference = sqrt_measurement_closed_form();
    let mut phase_ok = true;
    for (got, want) in m.basis.iter().zip(&reference) {
        phase_ok &= vectors_equal_up_to_phase(got, want, 1e-9)?;
    }
    let pom = m.pom();
    let mut max_singlet = 0.0f64;
    for codeword in &codewords().codewords {
        let dist = outcome_probs(codeword, &pom)?;
        max_singlet = max_singlet.max(dist.probability_of("A").expect("label"));
    }
    let passed = phase_ok && max_singlet <= 1e-12;
    Ok(Check {
        id: "AC8",
        name: "square-root measurement basis and silent fourth outcome",
        measured: max_singlet,
        expected: 0.0,
        tolerance: 1e-12,
        passed,
        note: None,
    })
}

/// Entangling-pulse fidelity under a 1% entry delay.
pub fn check_delay_fidelity_anchor() -> Result<Check> {
    let measured = epr_fidelity(0.01)?;
    Ok(Check::against("AC9a", "entangling-pulse fidelity at 1% delay", measured, 0.99, 5e-3)
        .with_note(
            "within the effective two-atom model a 1% timing slip costs only \
             O(1e-4) fidelity (measured 0.9999229, frozen as a regression value); \
             the tabulated 0.99 evidently includes photon-exchange corrections that \
             the effective description excludes by construction, so this anchor is \
             kept red; the same delay model passes the coding-gain anchor AC9b"
                .into(),
        ))
}

/// Coding gain at a 5% delay of the longest cavity interaction.
pub fn check_delay_gain_anchor() -> Result<Check> {
    let sweep = delay_sweep(&[0.05], DelayReference::Max)?;
    let measured = sweep.points[0].sqcg;
    Ok(
        Check::against("AC9b", "coding gain at 5% delay (default reference)", measured, 0.011, 3e-3)
            .with_note("frozen regression value 0.0132200".into()),
    )
}

/// Detection-error surfaces: ideal corner, depolarized center, favoured
/// asymmetry direction and the exact symmetry of the direct decoder.
pub fn check_detection_surfaces() -> Result<Vec<Check>> {
    let mut checks = Vec::new();

    let ideal_usa = gain_at(DecoderKind::Usa, &DetectionNoise::new(0.0, 0.0)?, false)?;
    checks.push(Check::against("AC10a", "G(0,0) for the direct decoder", ideal_usa.g, 0.0391, 5e-5));
    let ideal_prime = gain_at(DecoderKind::UsaPrime, &DetectionNoise::new(0.0, 0.0)?, false)?;
    checks.push(Check::against(
        "AC10b",
        "G'(0,0) for the seven-step target",
        ideal_prime.g,
        0.0391,
        5e-5,
    ));

    let blind = gain_at(DecoderKind::Usa, &DetectionNoise::new(0.5, 0.5)?, false)?;
    checks.push(
        Check::bound("AC10c", "G(1/2,1/2) non-positive", blind.g, 1e-12)
            .with_note("exact value 0; tolerance is pure roundoff headroom".into()),
    );

    // The favoured asymmetry direction of the seven-step decoder, read in
    // the convention of the surface plots (swap flag set): more error on
    // the outcome written first is the benign direction.
    let favoured = gain_at(DecoderKind::UsaPrime, &DetectionNoise::new(0.1, 0.02)?, true)?;
    let unfavoured = gain_at(DecoderKind::UsaPrime, &DetectionNoise::new(0.02, 0.1)?, true)?;
    let margin = favoured.g - unfavoured.g;
    checks.push(Check {
        id: "AC10d",
        name: "seven-step decoder favours one error direction (ordering)",
        measured: margin,
        expected: 0.0,
        tolerance: 0.0,
        passed: margin > 0.0,
        note: Some(
            "evaluated under the swapped symbol reading, which matches the \
             tabulated surface plots; under the crate's default reading the \
             same surface is mirrored, so the inequality flips with the flag \
             (margin 0.0200851)"
                .into(),
        ),
    });

    // Exact p<->q symmetry of the direct decoder on the pinned grid,
    // frozen from the first full run.
    let values = linspace(0.5, 21);
    let sweep = detection_sweep(DecoderKind::Usa, &values, &values, false)?;
    let n = values.len();
    let mut asymmetry = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let a = sweep.points[i * n + j].g;
            let b = sweep.points[j * n + i].g;
            asymmetry = asymmetry.max((a - b).abs());
        }
    }
    checks.push(
        Check::bound("AC10e", "direct-decoder surface asymmetry max|G(p,q)-G(q,p)|", asymmetry, 1e-12)
            .with_note("frozen regression bound; the first full run measured 2.2e-16".into()),
    );

    Ok(checks)
}

/// No single cavity interaction is locally equivalent to either decoder.
pub fn check_single_interaction_insufficient() -> Result<Check> {
    let insufficient = single_tc_insufficient()?;
    Ok(Check {
        id: "AC11",
        name: "one cavity interaction cannot build the decoder (invariants)",
        measured: if insufficient { 1.0 } else { 0.0 },
        expected: 1.0,
        tolerance: 0.0,
        passed: insufficient,
        note: Some("invariant distance over the 4096-point family stays above 0.14".into()),
    })
}

/// Randomized suites, 1000 instances per property: POM validity, gate
/// unitarity, channel stochasticity and mutual-information bounds.
pub fn check_random_suites() -> Result<Check> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12021);
    let mut failures = 0usize;

    for _ in 0..1000 {
        let noise = DetectionNoise::new(rng.gen(), rng.gen())?;
        if !noisy_detection_pom(&noise)?.validate().is_valid() {
            failures += 1;
        }
    }

    for _ in 0..1000 {
        let theta = rng.gen_range(-10.0..10.0);
        let phi = rng.gen_range(-10.0..10.0);
        if !ramsey(theta, phi).is_unitary(1e-10) {
            failures += 1;
        }
        let gate = TavisCummingsGate::new(rng.gen_range(0.0..10.0), rng.gen_range(0.1..2.0))?;
        if !crate::pulses::tavis_cummings(gate)?.is_unitary(1e-10) {
            failures += 1;
        }
    }

    for _ in 0..1000 {
        let noise = DetectionNoise::new(rng.gen(), rng.gen())?;
        let detection = noisy_detection_pom(&noise)?;
        let channel = trine_pair_channel(&DecoderKind::Usa.unitary()?, &detection)?;
        for x in 0..channel.inputs() {
            let sum: f64 = (0..channel.outputs()).map(|y| channel.conditional[y][x]).sum();
            if (sum - 1.0).abs() > 1e-9 {
                failures += 1;
            }
        }
        let information = mutual_information(&channel);
        if !(-1e-12..=2.0).contains(&information) {
            failures += 1;
        }
    }

    // Random pure states against a fixed three-outcome measurement.
    let pom = idp::idp_pom(0.5)?;
    for _ in 0..1000 {
        let amps = vec![
            c64(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5),
            c64(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5),
        ];
        let state = StateVector::new(amps)?.normalized()?;
        let dist = outcome_probs(&state, &pom)?;
        let sum: f64 = dist.probabilities().iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            failures += 1;
        }
    }

    Ok(Check {
        id: "AC12",
        name: "randomized framework suites (1000 instances per property)",
        measured: failures as f64,
        expected: 0.0,
        tolerance: 0.0,
        passed: failures == 0,
        note: None,
    })
}

/// Run every reference check in order.
pub fn run_all() -> Result<Vec<Check>> {
    let mut checks = vec![
        check_single_capacity()?,
        check_pair_information_value()?,
        check_pair_information_consistency()?,
        check_ideal_gain()?,
        check_seven_step_compilation()?,
        check_bell_sequence()?,
        check_idp_grid()?,
        check_advantage_interval()?,
        check_sqrt_measurement()?,
        check_delay_fidelity_anchor()?,
        check_delay_gain_anchor()?,
    ];
    checks.extend(check_detection_surfaces()?);
    checks.push(check_single_interaction_insufficient()?);
    checks.push(check_random_suites()?);
    Ok(checks)
}
