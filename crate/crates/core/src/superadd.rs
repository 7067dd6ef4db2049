//! Superadditive decoding of the length-two trine code.
//!
//! Three symmetric qubit letters with pairwise overlap `-1/2` are used in
//! repetition pairs `|psi_xx> = |psi_x> (x) |psi_x>`. The collective
//! square-root measurement on the pair retrieves more than twice the
//! single-use capacity:
//!
//! ```text
//! I_2 ~= 1.3691 bits   vs   2 C_1 ~= 1.2908 bits,
//! ```
//!
//! a superadditive coding gain of `I_2/2 - C_1 ~= 0.0391` bits per use.
//!
//! The decoder is expressed three ways: as the abstract measurement basis
//! ([`sqrt_measurement`]), as the rotate-then-detect unitaries [`u_sa`] /
//! [`u_sa_prime`], and as a seven-step cavity pulse program
//! ([`seven_step_sequence`]). A four-step Bell-detection warm-up
//! ([`bell_sequence`]) exercises the same machinery. [`makhlin_invariants`]
//! supplies the local-equivalence test showing one cavity interaction alone
//! cannot produce the decoder.

use serde::Serialize;

use crate::pom::Pom;
use crate::pulses::{PulseSequence, PulseStep, RamseyPulse, TavisCummingsGate};
use crate::qmat::{c64, Operator, StateVector, C64};
use crate::{Error, Result};

/// `cos(gamma/2) = (sqrt(2)+1)/sqrt(6)`; the decoder angle is carried by
/// its exact sine/cosine pair rather than a rounded angle.
pub fn gamma_half_cos() -> f64 {
    (2.0f64.sqrt() + 1.0) / 6.0f64.sqrt()
}

/// `sin(gamma/2) = (sqrt(2)-1)/sqrt(6)`.
pub fn gamma_half_sin() -> f64 {
    (2.0f64.sqrt() - 1.0) / 6.0f64.sqrt()
}

/// The decoder angle `gamma` itself (radians).
pub fn gamma() -> f64 {
    2.0 * gamma_half_sin().atan2(gamma_half_cos())
}

/// The three trine letters with their uniform priors.
#[derive(Debug, Clone)]
pub struct TrineEnsemble {
    pub letters: [StateVector; 3],
    pub priors: [f64; 3],
}

/// `|psi_0> = |0>`, `|psi_1> = -(|0> + sqrt(3)|1>)/2`,
/// `|psi_2> = -(|0> - sqrt(3)|1>)/2`; pairwise overlaps are exactly `-1/2`.
pub fn trine() -> TrineEnsemble {
    let s3 = 0.75f64.sqrt();
    TrineEnsemble {
        letters: [
            StateVector::from_real(&[1.0, 0.0]).expect("finite"),
            StateVector::from_real(&[-0.5, -s3]).expect("finite"),
            StateVector::from_real(&[-0.5, s3]).expect("finite"),
        ],
        priors: [1.0 / 3.0; 3],
    }
}

/// The three two-letter codewords.
#[derive(Debug, Clone)]
pub struct CodewordSet {
    pub codewords: [StateVector; 3],
}

/// Codewords built strictly as tensor squares of the letters.
pub fn codewords() -> CodewordSet {
    let ensemble = trine();
    let build = |x: usize| {
        ensemble.letters[x]
            .tensor(&ensemble.letters[x])
            .expect("dim 4")
    };
    CodewordSet { codewords: [build(0), build(1), build(2)] }
}

/// The antisymmetric completion `|A> = (|01> - |10>)/sqrt(2)`, orthogonal
/// to every codeword.
pub fn singlet() -> StateVector {
    let inv = 0.5f64.sqrt();
    StateVector::from_real(&[0.0, inv, -inv, 0.0]).expect("finite")
}

/// The square-root measurement basis over the codeword pair space.
#[derive(Debug, Clone)]
pub struct SqrtMeasurement {
    /// Orthonormal basis in outcome order `Pi_00, Pi_11, Pi_22, A`.
    pub basis: [StateVector; 4],
    /// The decoder angle gamma.
    pub gamma: f64,
}

impl SqrtMeasurement {
    /// Projective POM with outcome labels `00`, `11`, `22`, `A`.
    pub fn pom(&self) -> Pom {
        Pom::projective(&self.basis, &["00", "11", "22", "A"]).expect("orthonormal basis")
    }
}

/// Build the measurement from the codeword Gram operator:
/// `|Pi_yy> = (sum_x |psi_xx><psi_xx|)^{-1/2} |psi_yy>`, completed by the
/// singlet.
pub fn sqrt_measurement() -> Result<SqrtMeasurement> {
    let set = codewords();
    let mut gram = Operator::zeros(4);
    for codeword in &set.codewords {
        gram = gram.add(&codeword.projector())?;
    }
    let root = gram.inv_sqrt_on_support()?;
    let mut basis = Vec::with_capacity(4);
    for codeword in &set.codewords {
        basis.push(root.apply(codeword)?.normalized()?);
    }
    basis.push(singlet());
    let basis: [StateVector; 4] = basis.try_into().expect("four vectors");
    Ok(SqrtMeasurement { basis, gamma: gamma() })
}

/// The closed-form measurement basis, in the same outcome order.
pub fn sqrt_measurement_closed_form() -> [StateVector; 4] {
    let (c, s) = (gamma_half_cos(), gamma_half_sin());
    let inv = 0.5f64.sqrt();
    [
        StateVector::from_real(&[c, 0.0, 0.0, -s]).expect("finite"),
        StateVector::from_real(&[s * inv, 0.5, 0.5, c * inv]).expect("finite"),
        StateVector::from_real(&[s * inv, -0.5, -0.5, c * inv]).expect("finite"),
        singlet(),
    ]
}

/// The decoding unitary that sends the measurement basis to the
/// computational basis: rows are `<Pi_00|, <Pi_11|, <A|, <Pi_22|`.
pub fn u_sa() -> Operator {
    let basis = sqrt_measurement_closed_form();
    let order = [0usize, 1, 3, 2];
    let rows: Vec<Vec<C64>> = order
        .iter()
        .map(|&k| basis[k].amps().iter().map(|z| z.conj()).collect())
        .collect();
    Operator::from_rows(&rows).expect("square")
}

/// The tabulated seven-step target unitary, built from gamma. Its rows send
/// `Pi_22 -> |10>` and `Pi_11 -> |11>` while `Pi_00` and the singlet land
/// on superpositions of the remaining outcomes.
pub fn u_sa_prime() -> Operator {
    let (c, s) = (gamma_half_cos(), gamma_half_sin());
    let g = gamma();
    let pref = c64(0.0, -g / 4.0).exp() * 0.5;
    let em = c64(0.0, -g / 2.0).exp();
    let ep = c64(0.0, g / 2.0).exp();
    let r2 = 2.0f64.sqrt();
    let rows = vec![
        vec![-em * (r2 * c), -ep, ep, em * (r2 * s)],
        vec![-em * (r2 * c), ep, -ep, em * (r2 * s)],
        vec![c64(-r2 * s, 0.0), C64::ONE, C64::ONE, c64(-r2 * c, 0.0)],
        vec![c64(r2 * s, 0.0), C64::ONE, C64::ONE, c64(r2 * c, 0.0)],
    ];
    Operator::from_rows(&rows)
        .expect("square")
        .scale(pref)
}

/// Pulse area of the first cavity interaction, `t_1 phi_c = 3 pi / 4`.
pub fn first_cavity_area() -> f64 {
    3.0 * std::f64::consts::PI / 4.0
}

/// Pulse area of the second cavity interaction, `t_2 phi_c = gamma / 2`.
pub fn second_cavity_area() -> f64 {
    gamma() / 2.0
}

fn r2_step(theta: f64, phi: f64) -> PulseStep {
    PulseStep::RamseyOnAtom {
        atom: 2,
        pulse: RamseyPulse::new(theta, phi).expect("finite"),
    }
}

fn tc_step(area: f64) -> PulseStep {
    // Unit coupling rate; only the dimensionless area enters the gate.
    PulseStep::TavisCummings(TavisCummingsGate::new(area, 1.0).expect("non-negative"))
}

/// The seven-step realization of the decoder: five atom-2 Ramsey pulses
/// around two cavity interactions.
pub fn seven_step_sequence() -> PulseSequence {
    use std::f64::consts::PI;
    let g = gamma();
    PulseSequence::new(
        4,
        vec![
            r2_step(PI, PI),
            r2_step(PI, 3.0 * PI / 4.0),
            tc_step(first_cavity_area()),
            r2_step(PI, PI / 2.0),
            tc_step(second_cavity_area()),
            r2_step(PI, (g - PI / 2.0) / 4.0),
            r2_step(PI / 2.0, 0.0),
        ],
    )
    .expect("dimension 4 steps")
}

/// The four-step Bell-detection sequence: each Bell state lands on a
/// distinct computational basis state.
pub fn bell_sequence() -> PulseSequence {
    use std::f64::consts::PI;
    PulseSequence::new(
        4,
        vec![
            r2_step(PI, 3.0 * PI / 4.0),
            tc_step(first_cavity_area()),
            r2_step(PI, 0.0),
            tc_step(first_cavity_area()),
        ],
    )
    .expect("dimension 4 steps")
}

/// The four Bell states in the order `Phi+, Psi+, Psi-, Phi-`.
pub fn bell_states() -> [StateVector; 4] {
    let inv = 0.5f64.sqrt();
    [
        StateVector::from_real(&[inv, 0.0, 0.0, inv]).expect("finite"),
        StateVector::from_real(&[0.0, inv, inv, 0.0]).expect("finite"),
        StateVector::from_real(&[0.0, inv, -inv, 0.0]).expect("finite"),
        StateVector::from_real(&[inv, 0.0, 0.0, -inv]).expect("finite"),
    ]
}

/// The reference Bell-detection unitary
/// `|00><Psi+| + |01><Phi+| + |10><Psi-| + |11><Phi-|`.
pub fn bell_reference_unitary() -> Operator {
    let [phi_p, psi_p, psi_m, phi_m] = bell_states();
    let order = [&psi_p, &phi_p, &psi_m, &phi_m];
    let rows: Vec<Vec<C64>> = order
        .iter()
        .map(|s| s.amps().iter().map(|z| z.conj()).collect())
        .collect();
    Operator::from_rows(&rows).expect("square")
}

/// A discrete memoryless channel: input priors and the column-stochastic
/// conditional matrix `conditional[y][x] = P(y|x)`.
#[derive(Debug, Clone, Serialize)]
pub struct Channel {
    pub priors: Vec<f64>,
    pub conditional: Vec<Vec<f64>>,
}

impl Channel {
    pub fn new(priors: Vec<f64>, conditional: Vec<Vec<f64>>) -> Result<Self> {
        let prior_sum: f64 = priors.iter().sum();
        if priors.iter().any(|&p| p < 0.0) || (prior_sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidPriors(prior_sum));
        }
        let inputs = priors.len();
        for row in &conditional {
            if row.len() != inputs {
                return Err(Error::DimensionMismatch { left: row.len(), right: inputs });
            }
        }
        for x in 0..inputs {
            let sum: f64 = conditional.iter().map(|row| row[x]).sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::NonStochastic { column: x, sum });
            }
        }
        Ok(Self { priors, conditional })
    }

    pub fn outputs(&self) -> usize {
        self.conditional.len()
    }

    pub fn inputs(&self) -> usize {
        self.priors.len()
    }
}

/// Channel matrix of rotate-then-detect decoding:
/// `P(y|x) = Tr(U rho_x U^dag M_y)`.
pub fn channel_matrix(
    unitary: &Operator,
    inputs: &[StateVector],
    priors: &[f64],
    detection: &Pom,
) -> Result<Channel> {
    if priors.len() != inputs.len() {
        return Err(Error::DimensionMismatch { left: priors.len(), right: inputs.len() });
    }
    let mut conditional = vec![vec![0.0; inputs.len()]; detection.effects().len()];
    for (x, state) in inputs.iter().enumerate() {
        let rotated = unitary.apply(state)?;
        let dist = crate::pom::outcome_probs(&rotated, detection)?;
        for (y, &p) in dist.probabilities().iter().enumerate() {
            conditional[y][x] = p;
        }
    }
    Channel::new(priors.to_vec(), conditional)
}

/// Shannon mutual information of the channel in bits, with `0 log 0 = 0`.
pub fn mutual_information(channel: &Channel) -> f64 {
    let outputs = channel.outputs();
    let output_marginal: Vec<f64> = (0..outputs)
        .map(|y| {
            channel
                .priors
                .iter()
                .enumerate()
                .map(|(x, &px)| px * channel.conditional[y][x])
                .sum()
        })
        .collect();
    let mut total = 0.0;
    for (x, &px) in channel.priors.iter().enumerate() {
        if px == 0.0 {
            continue;
        }
        for (row, &py) in channel.conditional.iter().zip(&output_marginal) {
            let pyx = row[x];
            if pyx > 0.0 && py > 0.0 {
                total += px * pyx * (pyx / py).log2();
            }
        }
    }
    total
}

/// The minimum-error (Helstrom) basis for two equiprobable pure states:
/// eigenvectors of `rho_1 - rho_2`, ordered so the first indicates state 1.
fn helstrom_basis(a: &StateVector, b: &StateVector) -> Result<(StateVector, StateVector)> {
    let delta = a.projector().sub(&b.projector())?;
    let eigen = delta.hermitian_eigen()?;
    // Ascending eigenvalues: the last eigenvector carries the positive
    // eigenvalue and so points toward state 1.
    let positive = eigen.vectors.last().expect("dim 2").clone();
    let negative = eigen.vectors.first().expect("dim 2").clone();
    Ok((positive, negative))
}

/// Closed-form Helstrom error for two equiprobable pure states.
pub fn helstrom_error(a: &StateVector, b: &StateVector) -> Result<f64> {
    let overlap = a.inner(b)?.norm_sqr();
    Ok((1.0 - (1.0 - overlap).sqrt()) / 2.0)
}

/// Capacity of a single channel use: two trine letters with equal priors,
/// decoded by rotating the Helstrom basis onto the detector and reading the
/// (possibly noisy) two-level detector.
pub fn single_channel_capacity(p: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidProbability(q));
    }
    let ensemble = trine();
    let (first, second) = (&ensemble.letters[1], &ensemble.letters[2]);
    let (h1, h2) = helstrom_basis(first, second)?;
    let rotate = Operator::from_rows(&[
        h1.amps().iter().map(|z| z.conj()).collect(),
        h2.amps().iter().map(|z| z.conj()).collect(),
    ])?;
    let detector = crate::imperfect::noisy_two_level_pom(&crate::imperfect::DetectionNoise::new(p, q)?)?;
    let channel = channel_matrix(
        &rotate,
        &[first.clone(), second.clone()],
        &[0.5, 0.5],
        &detector,
    )?;
    Ok(mutual_information(&channel))
}

/// Superadditive quantum coding gain per channel use.
pub fn sqcg(i2: f64, c1: f64) -> f64 {
    i2 / 2.0 - c1
}

/// The trine-pair channel for a given decoding unitary and detection POM.
pub fn trine_pair_channel(unitary: &Operator, detection: &Pom) -> Result<Channel> {
    let set = codewords();
    channel_matrix(unitary, &set.codewords, &[1.0 / 3.0; 3], detection)
}

const MAGIC_BASIS: [[(f64, f64); 4]; 4] = [
    [(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 1.0)],
    [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (0.0, 0.0)],
    [(0.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, 0.0)],
    [(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, -1.0)],
];

fn magic_basis() -> Operator {
    let inv = 0.5f64.sqrt();
    let rows: Vec<Vec<C64>> = MAGIC_BASIS
        .iter()
        .map(|row| row.iter().map(|&(re, im)| c64(re * inv, im * inv)).collect())
        .collect();
    Operator::from_rows(&rows).expect("square")
}

/// Local-equivalence invariants of a two-qubit unitary: `(G1, G2)` computed
/// in the magic basis after normalizing the determinant to 1. Two unitaries
/// can be locally equivalent only if both invariants agree.
pub fn makhlin_invariants(u: &Operator) -> Result<(C64, f64)> {
    if u.dim() != 4 {
        return Err(Error::DimensionMismatch { left: u.dim(), right: 4 });
    }
    if !u.is_unitary(1e-8) {
        return Err(Error::InvalidArgument("makhlin invariants need a unitary".into()));
    }
    let det = u.determinant();
    let root = det.powf(0.25);
    let normalized = u.scale(C64::ONE / root);
    let q = magic_basis();
    let in_magic = q.dagger().mul(&normalized)?.mul(&q)?;
    let m = in_magic.transpose().mul(&in_magic)?;
    let trace = m.trace();
    let g1 = trace * trace / 16.0;
    let g2 = (trace * trace - m.mul(&m)?.trace()) / 4.0;
    Ok((g1, g2.re))
}

/// Number of grid points scanned over one period of the cavity pulse area.
pub const TC_SCAN_POINTS: usize = 4096;

/// True when no single cavity interaction is locally equivalent to either
/// decoder unitary: the invariants of the whole one-parameter family stay
/// bounded away from both targets.
pub fn single_tc_insufficient() -> Result<bool> {
    let targets = [makhlin_invariants(&u_sa())?, makhlin_invariants(&u_sa_prime())?];
    let mut min_distance = f64::INFINITY;
    for k in 0..TC_SCAN_POINTS {
        let area = 2.0 * std::f64::consts::PI * k as f64 / TC_SCAN_POINTS as f64;
        let gate = crate::pulses::tavis_cummings(TavisCummingsGate::new(area, 1.0)?)?;
        let (g1, g2) = makhlin_invariants(&gate)?;
        for (t1, t2) in &targets {
            let distance = (g1 - t1).norm().max((g2 - t2).abs());
            min_distance = min_distance.min(distance);
        }
    }
    Ok(min_distance > 1e-6)
}

/// Which realization of the decoder to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderKind {
    /// The direct basis-rotation unitary.
    Usa,
    /// The tabulated seven-step target unitary.
    UsaPrime,
    /// The compiled seven-step pulse sequence.
    Pulse,
}

impl DecoderKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DecoderKind::Usa => "usa",
            DecoderKind::UsaPrime => "usa_prime",
            DecoderKind::Pulse => "pulse",
        }
    }

    pub fn unitary(&self) -> Result<Operator> {
        match self {
            DecoderKind::Usa => Ok(u_sa()),
            DecoderKind::UsaPrime => Ok(u_sa_prime()),
            DecoderKind::Pulse => crate::pulses::compile(&seven_step_sequence()),
        }
    }
}

/// JSON report of one decoder evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct SuperaddReport {
    pub priors: Vec<f64>,
    pub conditional: Vec<Vec<f64>>,
    #[serde(rename = "I2")]
    pub i2: f64,
    #[serde(rename = "C1")]
    pub c1: f64,
    pub sqcg: f64,
    #[serde(rename = "impl")]
    pub decoder: String,
}
