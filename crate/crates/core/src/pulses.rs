//! The cavity-QED gate set and sequence compiler.
//!
//! Three gate families cover everything the measurements need:
//!
//! - [`ramsey`]: a resonant classical pulse on one two-level atom,
//!   `R(theta, phi) = [[cos(t/2), -e^{-i phi} sin(t/2)], [e^{i phi} sin(t/2), cos(t/2)]]`;
//! - [`embed_three_level`]: the same rotation acting on a chosen pair of
//!   levels of a three-level atom;
//! - [`tavis_cummings`]: two atoms passing together through a far-detuned
//!   cavity, which exchanges excitation between `|ge>` and `|eg>` at the
//!   effective rate `phi_c = g^2 / Delta` while leaving `|gg>` and `|ee>`
//!   untouched.
//!
//! [`delayed_tavis_cummings`] degrades the two-atom gate when one atom
//! enters the cavity a time `t_d` after the other: the overlap shrinks to
//! `t - t_d` and each atom picks up the single-atom vacuum Stark phase
//! `e^{+i phi_c t_d}` on `|e>` for the stretch it spends alone (atom 1
//! before the overlap, atom 2 after it).
//!
//! [`compile`] multiplies a [`PulseSequence`] into a single unitary, later
//! steps on the left.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::qmat::{c64, equal_up_to_global_phase, Operator, C64};
use crate::{Error, Result};

/// Rotation angle and field phase of a resonant Ramsey pulse (radians).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RamseyPulse {
    pub theta: f64,
    pub phi: f64,
}

impl RamseyPulse {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::NonFinite("ramsey pulse angles"));
        }
        Ok(Self { theta, phi })
    }
}

/// A detuned two-atom cavity interaction of the given duration, with an
/// effective coupling rate `phi_c = g^2 / Delta` and an optional entry
/// delay of the second atom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TavisCummingsGate {
    /// Time each atom spends in the cavity (s).
    pub duration: f64,
    /// Effective coupling rate `g^2 / Delta` (1/s).
    pub coupling: f64,
    /// Entry delay of the second atom (s); 0 for the ideal gate.
    #[serde(default)]
    pub delay: f64,
}

impl TavisCummingsGate {
    pub fn new(duration: f64, coupling: f64) -> Result<Self> {
        Self::with_delay(duration, coupling, 0.0)
    }

    pub fn with_delay(duration: f64, coupling: f64, delay: f64) -> Result<Self> {
        if duration < 0.0 {
            return Err(Error::NegativeDuration(duration));
        }
        if !(duration.is_finite() && coupling.is_finite() && delay.is_finite()) {
            return Err(Error::NonFinite("tavis-cummings gate parameters"));
        }
        if delay < 0.0 || delay > duration {
            return Err(Error::DelayExceedsDuration {
                gate: "tavis-cummings",
                delay,
                duration,
            });
        }
        Ok(Self { duration, coupling, delay })
    }

    /// Dimensionless pulse area `duration * coupling`.
    pub fn area(&self) -> f64 {
        self.duration * self.coupling
    }
}

/// One step of a pulse sequence.
#[derive(Debug, Clone, PartialEq)]
pub enum PulseStep {
    /// Ramsey pulse on atom 1 or 2 of a two-atom register (dimension 4).
    RamseyOnAtom { atom: u8, pulse: RamseyPulse },
    /// Two-atom cavity interaction (dimension 4).
    TavisCummings(TavisCummingsGate),
    /// Ramsey pulse between levels `a < b` of a three-level atom
    /// (dimension 3).
    ThreeLevelCoupling { a: u8, b: u8, pulse: RamseyPulse },
}

impl PulseStep {
    pub fn dim(&self) -> usize {
        match self {
            PulseStep::ThreeLevelCoupling { .. } => 3,
            _ => 4,
        }
    }

    pub fn operator(&self) -> Result<Operator> {
        match self {
            PulseStep::RamseyOnAtom { atom, pulse } => ramsey_on_atom(*atom, *pulse),
            PulseStep::TavisCummings(gate) => delayed_tavis_cummings(*gate),
            PulseStep::ThreeLevelCoupling { a, b, pulse } => {
                embed_three_level(*a, *b, *pulse)
            }
        }
    }
}

/// An ordered list of pulse steps, applied left to right in time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SequenceDoc", into = "SequenceDoc")]
pub struct PulseSequence {
    dim: usize,
    steps: Vec<PulseStep>,
}

impl PulseSequence {
    pub fn new(dim: usize, steps: Vec<PulseStep>) -> Result<Self> {
        if dim != 3 && dim != 4 {
            return Err(Error::InvalidArgument(format!(
                "pulse sequences exist in dimension 3 or 4, not {dim}"
            )));
        }
        for step in &steps {
            if step.dim() != dim {
                return Err(Error::MixedDimensions { step: step.dim(), sequence: dim });
            }
        }
        Ok(Self { dim, steps })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn steps(&self) -> &[PulseStep] {
        &self.steps
    }

    /// Copy of the sequence with every Tavis-Cummings step given the entry
    /// delay `t_d`; fails (naming the gate) if `t_d` exceeds a duration.
    pub fn with_tavis_cummings_delay(&self, delay: f64) -> Result<Self> {
        let steps = self
            .steps
            .iter()
            .map(|step| match step {
                PulseStep::TavisCummings(gate) => {
                    TavisCummingsGate::with_delay(gate.duration, gate.coupling, delay)
                        .map(PulseStep::TavisCummings)
                }
                other => Ok(other.clone()),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { dim: self.dim, steps })
    }
}

/// JSON document form of a pulse sequence:
/// `{dim, steps: [{type, atom?, levels?, theta?, phi?, duration?, coupling?, delay?}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct SequenceDoc {
    dim: usize,
    steps: Vec<StepDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct StepDoc {
    #[serde(rename = "type")]
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    atom: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    levels: Option<(u8, u8)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    duration: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coupling: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delay: Option<f64>,
}

impl From<PulseSequence> for SequenceDoc {
    fn from(seq: PulseSequence) -> Self {
        let steps = seq
            .steps
            .into_iter()
            .map(|step| match step {
                PulseStep::RamseyOnAtom { atom, pulse } => StepDoc {
                    kind: "ramsey".into(),
                    atom: Some(atom),
                    levels: None,
                    theta: Some(pulse.theta),
                    phi: Some(pulse.phi),
                    duration: None,
                    coupling: None,
                    delay: None,
                },
                PulseStep::TavisCummings(gate) => StepDoc {
                    kind: "tavis_cummings".into(),
                    atom: None,
                    levels: None,
                    theta: None,
                    phi: None,
                    duration: Some(gate.duration),
                    coupling: Some(gate.coupling),
                    delay: if gate.delay != 0.0 { Some(gate.delay) } else { None },
                },
                PulseStep::ThreeLevelCoupling { a, b, pulse } => StepDoc {
                    kind: "three_level_coupling".into(),
                    atom: None,
                    levels: Some((a, b)),
                    theta: Some(pulse.theta),
                    phi: Some(pulse.phi),
                    duration: None,
                    coupling: None,
                    delay: None,
                },
            })
            .collect();
        SequenceDoc { dim: seq.dim, steps }
    }
}

impl TryFrom<SequenceDoc> for PulseSequence {
    type Error = Error;

    fn try_from(doc: SequenceDoc) -> Result<Self> {
        let missing =
            |field: &str, kind: &str| Error::InvalidArgument(format!("{kind} step missing {field}"));
        let steps = doc
            .steps
            .into_iter()
            .map(|s| match s.kind.as_str() {
                "ramsey" => Ok(PulseStep::RamseyOnAtom {
                    atom: s.atom.ok_or_else(|| missing("atom", "ramsey"))?,
                    pulse: RamseyPulse::new(
                        s.theta.ok_or_else(|| missing("theta", "ramsey"))?,
                        s.phi.ok_or_else(|| missing("phi", "ramsey"))?,
                    )?,
                }),
                "tavis_cummings" => Ok(PulseStep::TavisCummings(TavisCummingsGate::with_delay(
                    s.duration.ok_or_else(|| missing("duration", "tavis_cummings"))?,
                    s.coupling.ok_or_else(|| missing("coupling", "tavis_cummings"))?,
                    s.delay.unwrap_or(0.0),
                )?)),
                "three_level_coupling" => {
                    let (a, b) = s.levels.ok_or_else(|| missing("levels", "three_level_coupling"))?;
                    Ok(PulseStep::ThreeLevelCoupling {
                        a,
                        b,
                        pulse: RamseyPulse::new(
                            s.theta.ok_or_else(|| missing("theta", "three_level_coupling"))?,
                            s.phi.ok_or_else(|| missing("phi", "three_level_coupling"))?,
                        )?,
                    })
                }
                other => Err(Error::InvalidArgument(format!("unknown step type {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        PulseSequence::new(doc.dim, steps)
    }
}

/// The 2x2 resonant Ramsey rotation.
pub fn ramsey(theta: f64, phi: f64) -> Operator {
    let c = c64((theta / 2.0).cos(), 0.0);
    let s = (theta / 2.0).sin();
    let phase = c64(0.0, phi).exp();
    Operator::from_rows(&[
        vec![c, -phase.conj() * s],
        vec![phase * s, c],
    ])
    .expect("fixed shape")
}

/// Identity on a three-level atom except for a Ramsey block on levels
/// `a < b` (1-based).
pub fn embed_three_level(a: u8, b: u8, pulse: RamseyPulse) -> Result<Operator> {
    if !(1..=3).contains(&a) || !(1..=3).contains(&b) || a >= b {
        return Err(Error::InvalidLevels(a, b));
    }
    let block = ramsey(pulse.theta, pulse.phi);
    let (i, j) = ((a - 1) as usize, (b - 1) as usize);
    let mut op = Operator::identity(3);
    op.set(i, i, block.get(0, 0));
    op.set(i, j, block.get(0, 1));
    op.set(j, i, block.get(1, 0));
    op.set(j, j, block.get(1, 1));
    Ok(op)
}

/// Ramsey pulse on one atom of a two-atom register: `R (x) I` for atom 1,
/// `I (x) R` for atom 2.
pub fn ramsey_on_atom(atom: u8, pulse: RamseyPulse) -> Result<Operator> {
    let r = ramsey(pulse.theta, pulse.phi);
    let i = Operator::identity(2);
    match atom {
        1 => r.tensor(&i),
        2 => i.tensor(&r),
        other => Err(Error::InvalidAtom(other)),
    }
}

/// The ideal detuned Tavis-Cummings unitary. Requires `delay = 0`; the
/// degraded gate lives in [`delayed_tavis_cummings`].
pub fn tavis_cummings(gate: TavisCummingsGate) -> Result<Operator> {
    if gate.delay != 0.0 {
        return Err(Error::InvalidArgument(
            "ideal tavis_cummings requires delay = 0".into(),
        ));
    }
    Ok(tc_block(gate.area()))
}

fn tc_block(area: f64) -> Operator {
    let e = c64(0.0, -area).exp();
    let (c, s) = (area.cos(), area.sin());
    let mut op = Operator::identity(4);
    op.set(1, 1, e * c);
    op.set(2, 2, e * c);
    op.set(1, 2, -Complex64::i() * e * s);
    op.set(2, 1, -Complex64::i() * e * s);
    op
}

/// Single-atom vacuum Stark phase `e^{+i phi_c tau}` on `|e>` of one atom,
/// picked up while that atom sits alone in the detuned cavity.
fn lone_atom_phase(atom: u8, area: f64) -> Result<Operator> {
    let phase = Operator::diagonal(&[C64::ONE, c64(0.0, area).exp()]);
    let i = Operator::identity(2);
    match atom {
        1 => phase.tensor(&i),
        2 => i.tensor(&phase),
        other => Err(Error::InvalidAtom(other)),
    }
}

/// Tavis-Cummings gate with atom 2 entering a time `t_d` late: atom 1 alone
/// for `t_d`, both atoms for `t - t_d`, atom 2 alone for `t_d`.
pub fn delayed_tavis_cummings(gate: TavisCummingsGate) -> Result<Operator> {
    if gate.duration < 0.0 {
        return Err(Error::NegativeDuration(gate.duration));
    }
    if gate.delay < 0.0 || gate.delay > gate.duration {
        return Err(Error::DelayExceedsDuration {
            gate: "tavis-cummings",
            delay: gate.delay,
            duration: gate.duration,
        });
    }
    let delay_area = gate.delay * gate.coupling;
    let overlap_area = (gate.duration - gate.delay) * gate.coupling;
    let before = lone_atom_phase(1, delay_area)?;
    let after = lone_atom_phase(2, delay_area)?;
    after.mul(&tc_block(overlap_area))?.mul(&before)
}

/// Ordered product of a sequence; later steps multiply on the left.
pub fn compile(seq: &PulseSequence) -> Result<Operator> {
    let mut u = Operator::identity(seq.dim);
    for step in &seq.steps {
        u = step.operator()?.mul(&u)?;
    }
    Ok(u)
}

/// Witness that `u = P D target`: the permutation (as the image row of each
/// target row) and the unimodular phases.
#[derive(Debug, Clone, PartialEq)]
pub struct RelabelWitness {
    pub permutation: Vec<usize>,
    pub phases: Vec<C64>,
}

/// Search all row permutations and phase diagonals for `u = P D target`.
pub fn matches_up_to_relabel(
    u: &Operator,
    target: &Operator,
    tol: f64,
) -> Result<Option<RelabelWitness>> {
    if u.dim() != target.dim() {
        return Err(Error::DimensionMismatch { left: u.dim(), right: target.dim() });
    }
    let d = target.dim();
    let mut permutation = vec![usize::MAX; d];
    let mut phases = vec![C64::ONE; d];
    // u = P D target means row k of target appears, phased, as some row
    // sigma(k) of u; rows are orthogonal so the assignment is greedy.
    let mut used = vec![false; d];
    for k in 0..d {
        let (ref_col, ref_mag) = target
            .row(k)
            .iter()
            .map(|z| z.norm())
            .enumerate()
            .fold((0, 0.0), |acc, (i, m)| if m > acc.1 { (i, m) } else { acc });
        if ref_mag < 1e-12 {
            return Err(Error::ZeroPhaseReference);
        }
        let mut found = false;
        #[allow(clippy::needless_range_loop)]
        for row in 0..d {
            if used[row] {
                continue;
            }
            let mut phase = u.get(row, ref_col) / target.get(k, ref_col);
            let norm = phase.norm();
            if (norm - 1.0).abs() > tol.max(1e-9) {
                continue;
            }
            phase /= norm;
            let max_diff = (0..d)
                .map(|j| (u.get(row, j) - phase * target.get(k, j)).norm())
                .fold(0.0, f64::max);
            if max_diff <= tol {
                permutation[k] = row;
                phases[k] = phase;
                used[row] = true;
                found = true;
                break;
            }
        }
        if !found {
            return Ok(None);
        }
    }
    Ok(Some(RelabelWitness { permutation, phases }))
}

/// Convenience wrapper: equality up to one global phase at the default
/// analytic tolerance.
pub fn compiles_to(seq: &PulseSequence, target: &Operator, tol: f64) -> Result<bool> {
    let u = compile(seq)?;
    equal_up_to_global_phase(&u, target, tol)
}
