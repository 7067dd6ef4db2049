//! Probability operator measures: effect validation, the trace rule,
//! outcome sampling, and noisy liftings of projective detection.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::qmat::{Operator, StateVector};
use crate::{Error, Result, TOL_COMPLETE, TOL_POSITIVE};

/// Probability below which a negative outcome probability is treated as
/// roundoff and clamped to zero; anything more negative is a broken effect.
const NEGATIVE_CLAMP: f64 = 1e-12;

/// An ordered set of labelled effects on a fixed Hilbert space.
///
/// Construction only enforces shape; completeness and positivity are
/// reported by [`Pom::validate`] so that deliberately broken measurements
/// can still be inspected.
#[derive(Debug, Clone)]
pub struct Pom {
    dim: usize,
    effects: Vec<(String, Operator)>,
}

impl Pom {
    pub fn new(effects: Vec<(String, Operator)>) -> Result<Self> {
        let dim = effects
            .first()
            .map(|(_, op)| op.dim())
            .ok_or(Error::Empty("pom requires at least one effect"))?;
        for (_, op) in &effects {
            if op.dim() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: op.dim() });
            }
        }
        Ok(Self { dim, effects })
    }

    /// Projective measurement onto the given orthonormal states.
    pub fn projective(states: &[StateVector], labels: &[&str]) -> Result<Self> {
        assert_eq!(states.len(), labels.len());
        Self::new(
            states
                .iter()
                .zip(labels)
                .map(|(s, l)| (l.to_string(), s.projector()))
                .collect(),
        )
    }

    /// Computational-basis detection with labels "0", "1", ... or bitstring
    /// labels when `dim` is a power of two and `bits` is set.
    pub fn computational(dim: usize, bits: Option<usize>) -> Self {
        let effects = (0..dim)
            .map(|i| {
                let label = match bits {
                    Some(n) => format!("{i:0n$b}"),
                    None => i.to_string(),
                };
                (label, StateVector::basis(dim, i).projector())
            })
            .collect();
        Self { dim, effects }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn effects(&self) -> &[(String, Operator)] {
        &self.effects
    }

    pub fn labels(&self) -> Vec<&str> {
        self.effects.iter().map(|(l, _)| l.as_str()).collect()
    }

    /// Diagnostics for the two defining properties: completeness of the
    /// effect sum and positivity of each effect.
    pub fn validate(&self) -> PomDiagnostics {
        let mut sum = Operator::zeros(self.dim);
        for (_, op) in &self.effects {
            sum = sum.add(op).expect("dims checked at construction");
        }
        let completeness_defect = sum.max_abs_diff(&Operator::identity(self.dim));

        let mut min_eigenvalues = Vec::with_capacity(self.effects.len());
        let mut max_hermiticity_defect = 0.0f64;
        for (_, op) in &self.effects {
            max_hermiticity_defect = max_hermiticity_defect.max(op.hermiticity_defect());
            let min = op
                .hermitian_eigen()
                .map(|e| e.values[0])
                .unwrap_or(f64::NEG_INFINITY);
            min_eigenvalues.push(min);
        }
        PomDiagnostics {
            completeness_defect,
            min_eigenvalues,
            max_hermiticity_defect,
        }
    }
}

/// Report from [`Pom::validate`].
#[derive(Debug, Clone)]
pub struct PomDiagnostics {
    /// Max entry of `|sum of effects - identity|`.
    pub completeness_defect: f64,
    /// Smallest eigenvalue of each effect, in effect order.
    pub min_eigenvalues: Vec<f64>,
    /// Max Hermiticity defect over the effects.
    pub max_hermiticity_defect: f64,
}

impl PomDiagnostics {
    pub fn is_valid(&self) -> bool {
        self.completeness_defect <= TOL_COMPLETE
            && self.max_hermiticity_defect <= TOL_POSITIVE
            && self.min_eigenvalues.iter().all(|&v| v >= -TOL_POSITIVE)
    }
}

/// Labelled outcome probabilities; clamped to `[0, 1]` at construction.
#[derive(Debug, Clone)]
pub struct OutcomeDistribution {
    labels: Vec<String>,
    probabilities: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn new(labels: Vec<String>, raw: Vec<f64>) -> Result<Self> {
        let mut probabilities = Vec::with_capacity(raw.len());
        for p in raw {
            if p < -NEGATIVE_CLAMP {
                return Err(Error::NegativeProbability(p));
            }
            if p > 1.0 + NEGATIVE_CLAMP {
                return Err(Error::InvalidProbability(p));
            }
            probabilities.push(p.clamp(0.0, 1.0));
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidPriors(sum));
        }
        Ok(Self { labels, probabilities })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn probability_of(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.probabilities[i])
    }
}

/// Trace-rule probabilities `p(j) = <psi| Pi_j |psi>` for a pure state.
pub fn outcome_probs(state: &StateVector, pom: &Pom) -> Result<OutcomeDistribution> {
    if state.dim() != pom.dim {
        return Err(Error::DimensionMismatch { left: state.dim(), right: pom.dim });
    }
    let raw = pom
        .effects
        .iter()
        .map(|(_, op)| {
            let image = op.apply(state)?;
            Ok(state.inner(&image)?.re)
        })
        .collect::<Result<Vec<f64>>>()?;
    OutcomeDistribution::new(pom.labels().iter().map(|s| s.to_string()).collect(), raw)
}

/// Trace-rule probabilities `p(j) = Tr(rho Pi_j)` for a density operator.
pub fn outcome_probs_density(rho: &Operator, pom: &Pom) -> Result<OutcomeDistribution> {
    if rho.dim() != pom.dim {
        return Err(Error::DimensionMismatch { left: rho.dim(), right: pom.dim });
    }
    let raw = pom
        .effects
        .iter()
        .map(|(_, op)| Ok(rho.mul(op)?.trace().re))
        .collect::<Result<Vec<f64>>>()?;
    OutcomeDistribution::new(pom.labels().iter().map(|s| s.to_string()).collect(), raw)
}

/// Multinomial sample of `n` outcomes; reproducible for a fixed seed.
pub fn sample(dist: &OutcomeDistribution, n: u64, seed: u64) -> Vec<(String, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; dist.probabilities.len()];
    let total: f64 = dist.probabilities.iter().sum();
    for _ in 0..n {
        let mut r = rng.gen::<f64>() * total;
        let mut chosen = dist.probabilities.len() - 1;
        for (i, p) in dist.probabilities.iter().enumerate() {
            if r < *p {
                chosen = i;
                break;
            }
            r -= p;
        }
        counts[chosen] += 1;
    }
    dist.labels
        .iter()
        .cloned()
        .zip(counts)
        .collect()
}

/// Mix projectors through a column-stochastic confusion matrix:
/// `effect_k = sum_j confusion[k][j] * P_j` where `confusion[k][j]` is the
/// probability of reporting `k` when the true outcome is `j`.
pub fn noisy_projective_pom(
    projectors: &[Operator],
    labels: &[&str],
    confusion: &[Vec<f64>],
) -> Result<Pom> {
    let n = projectors.len();
    if n == 0 {
        return Err(Error::Empty("noisy pom requires projectors"));
    }
    if confusion.len() != n || labels.len() != n {
        return Err(Error::Empty("confusion matrix and labels must match projector count"));
    }
    for column in 0..n {
        let mut sum = 0.0;
        for row in confusion {
            if row.len() != n {
                return Err(Error::Empty("confusion matrix must be square"));
            }
            let entry = row[column];
            if !(-1e-12..=1.0 + 1e-12).contains(&entry) {
                return Err(Error::InvalidProbability(entry));
            }
            sum += entry;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::NonStochastic { column, sum });
        }
    }

    let dim = projectors[0].dim();
    let mut effects = Vec::with_capacity(n);
    for (k, label) in labels.iter().enumerate() {
        let mut effect = Operator::zeros(dim);
        for (j, proj) in projectors.iter().enumerate() {
            effect = effect.add(&proj.scale(crate::qmat::c64(confusion[k][j], 0.0)))?;
        }
        effects.push((label.to_string(), effect));
    }
    Pom::new(effects)
}
