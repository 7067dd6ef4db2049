//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Everything in the crate runs through the two carriers defined here:
//! [`StateVector`] for kets and [`Operator`] for square matrices, both over
//! `Complex64` and sized for dimensions 2-4 (tensor products up to 16).
//! The Hermitian eigensolver is a cyclic Jacobi sweep, which is exact enough
//! at these sizes that the rest of the crate can treat eigendecomposition as
//! a primitive.
//!
//! Conventions fixed once for the whole crate: the left tensor factor owns
//! the most significant index, `|g> = |0> = [1, 0]^T`, and row-major entry
//! storage.

use num_complex::Complex64;

use crate::{Error, Result, MAX_DIM};

pub type C64 = Complex64;

/// Convenience constructor for a complex scalar.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn check_finite(values: &[C64], what: &'static str) -> Result<()> {
    if values.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// A ket in a `dim`-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    dim: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::Empty("state vector"));
        }
        check_finite(&amps, "state vector")?;
        Ok(Self { dim: amps.len(), amps })
    }

    /// State with real amplitudes.
    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&x| c64(x, 0.0)).collect())
    }

    /// Computational basis state `|index>`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index out of range");
        let mut amps = vec![C64::ZERO; dim];
        amps[index] = C64::ONE;
        Self { dim, amps }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn amp(&self, i: usize) -> C64 {
        self.amps[i]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Norm-squared within `eps` of 1.
    pub fn is_normalized(&self, eps: f64) -> bool {
        let n2 = self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>();
        (n2 - 1.0).abs() <= eps
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::Empty("cannot normalize the zero vector"));
        }
        Ok(self.scale(c64(1.0 / n, 0.0)))
    }

    /// Inner product `<self|other>` (conjugate-linear in `self`).
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Kronecker product; `self` owns the most significant index.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let dim = self.dim * other.dim;
        if dim > MAX_DIM {
            return Err(Error::DimensionOverflow(dim));
        }
        let mut amps = Vec::with_capacity(dim);
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(Self { dim, amps })
    }

    /// Zero-pad into a larger space, keeping existing amplitudes in place.
    pub fn embed(&self, dim: usize) -> Result<Self> {
        if dim < self.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: dim });
        }
        let mut amps = self.amps.clone();
        amps.resize(dim, C64::ZERO);
        Ok(Self { dim, amps })
    }

    /// Rank-one operator `|self><other|`.
    pub fn outer(&self, other: &Self) -> Result<Operator> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        let d = self.dim;
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                entries.push(self.amps[i] * other.amps[j].conj());
            }
        }
        Ok(Operator { dim: d, entries })
    }

    /// Projector `|self><self|`.
    pub fn projector(&self) -> Operator {
        self.outer(self).expect("same vector")
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            amps: self.amps.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        Ok(Self {
            dim: self.dim,
            amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Overlap probability `|<a|b>|^2`; assumes normalized inputs.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    let ov = a.inner(b)?;
    Ok(ov.norm_sqr().min(1.0))
}

/// `true` when `a = e^{i phase} b` entrywise within `tol`, with the phase
/// read off the largest-magnitude amplitude of `b`.
pub fn vectors_equal_up_to_phase(a: &StateVector, b: &StateVector, tol: f64) -> Result<bool> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { left: a.dim, right: b.dim });
    }
    let (idx, mag) = b
        .amps
        .iter()
        .map(|z| z.norm())
        .enumerate()
        .fold((0, 0.0), |acc, (i, m)| if m > acc.1 { (i, m) } else { acc });
    if mag < 1e-12 {
        return Err(Error::ZeroPhaseReference);
    }
    let mut phase = a.amps[idx] / b.amps[idx];
    let pnorm = phase.norm();
    phase = if pnorm > 0.0 { phase / pnorm } else { C64::ONE };
    Ok(a.max_abs_diff(&b.scale(phase)) <= tol)
}

/// A dense square matrix on a `dim`-dimensional Hilbert space (row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<C64>,
}

impl Operator {
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::Empty("operator entries must form a dim x dim grid"));
        }
        check_finite(&entries, "operator")?;
        Ok(Self { dim, entries })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::Empty("operator rows must be square"));
            }
            entries.extend_from_slice(row);
        }
        Self::new(dim, entries)
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![C64::ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = C64::ONE;
        }
        Self { dim, entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: vec![C64::ZERO; dim * dim] }
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let dim = values.len();
        let mut m = Self::zeros(dim);
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn row(&self, row: usize) -> &[C64] {
        &self.entries[row * self.dim..(row + 1) * self.dim]
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        let d = self.dim;
        let mut entries = vec![C64::ZERO; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.entries[i * d + k];
                if a == C64::ZERO {
                    continue;
                }
                for j in 0..d {
                    entries[i * d + j] += a * other.entries[k * d + j];
                }
            }
        }
        Ok(Self { dim: d, entries })
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if self.dim != state.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: state.dim });
        }
        let d = self.dim;
        let amps = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| self.entries[i * d + j] * state.amps[j])
                    .sum()
            })
            .collect();
        Ok(StateVector { dim: d, amps })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        Ok(Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let d = self.dim;
        let mut entries = vec![C64::ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                entries[j * d + i] = self.entries[i * d + j].conj();
            }
        }
        Self { dim: d, entries }
    }

    /// Transpose without conjugation.
    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut entries = vec![C64::ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                entries[j * d + i] = self.entries[i * d + j];
            }
        }
        Self { dim: d, entries }
    }

    /// Kronecker product; `self` owns the most significant index.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let dim = self.dim * other.dim;
        if dim > MAX_DIM {
            return Err(Error::DimensionOverflow(dim));
        }
        let (da, db) = (self.dim, other.dim);
        let mut entries = vec![C64::ZERO; dim * dim];
        for i in 0..da {
            for j in 0..da {
                let a = self.entries[i * da + j];
                for k in 0..db {
                    for l in 0..db {
                        entries[(i * db + k) * dim + (j * db + l)] = a * other.entries[k * db + l];
                    }
                }
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i]).sum()
    }

    /// Determinant by LU elimination with partial pivoting.
    pub fn determinant(&self) -> C64 {
        let d = self.dim;
        let mut m = self.entries.clone();
        let mut det = C64::ONE;
        for col in 0..d {
            let pivot = (col..d)
                .max_by(|&a, &b| {
                    m[a * d + col]
                        .norm()
                        .partial_cmp(&m[b * d + col].norm())
                        .unwrap()
                })
                .unwrap();
            if m[pivot * d + col].norm() == 0.0 {
                return C64::ZERO;
            }
            if pivot != col {
                for j in 0..d {
                    m.swap(col * d + j, pivot * d + j);
                }
                det = -det;
            }
            let p = m[col * d + col];
            det *= p;
            for row in col + 1..d {
                let factor = m[row * d + col] / p;
                for j in col..d {
                    let v = m[col * d + j];
                    m[row * d + j] -= factor * v;
                }
            }
        }
        det
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |(U^dag U - I)_{ij}| <= tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        let gram = self.dagger().mul(self).expect("same dim");
        gram.max_abs_diff(&Self::identity(self.dim)) <= tol
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.dagger())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Hermitian within `tol` and min eigenvalue `>= -tol`.
    pub fn is_positive(&self, tol: f64) -> bool {
        if !self.is_hermitian(tol) {
            return false;
        }
        match self.hermitian_eigen() {
            Ok(eigen) => eigen.values.iter().all(|&v| v >= -tol),
            Err(_) => false,
        }
    }

    /// Eigendecomposition of a Hermitian operator via cyclic Jacobi sweeps.
    ///
    /// Returns eigenvalues in ascending order with matching eigenvectors.
    /// The input is symmetrized as `(A + A^dag)/2` first; callers that need a
    /// strict Hermiticity contract check it themselves.
    pub fn hermitian_eigen(&self) -> Result<HermitianEigen> {
        let d = self.dim;
        // Work on the symmetrized matrix so roundoff in callers cannot feed
        // the solver a slightly non-Hermitian input.
        let mut a: Vec<C64> = self
            .entries
            .iter()
            .zip(self.dagger().entries.iter())
            .map(|(x, y)| (x + y) * 0.5)
            .collect();
        let mut v = Operator::identity(d).entries;

        let scale = self.max_abs().max(1.0);
        let eps = 1e-15 * scale;
        for _sweep in 0..60 {
            let mut off = 0.0f64;
            for p in 0..d {
                for q in p + 1..d {
                    off = off.max(a[p * d + q].norm());
                }
            }
            if off <= eps {
                break;
            }
            for p in 0..d {
                for q in p + 1..d {
                    let apq = a[p * d + q];
                    let r = apq.norm();
                    if r <= eps {
                        continue;
                    }
                    let phase = apq / r;
                    let app = a[p * d + p].re;
                    let aqq = a[q * d + q].re;
                    // Rotation angle zeroing the (p, q) entry.
                    let theta = 0.5 * (2.0 * r).atan2(app - aqq);
                    let c = theta.cos();
                    let s = theta.sin();
                    // Column rotation: new_p = c*p + s*conj(phase)*q is folded
                    // into the standard two-sided update below.
                    for k in 0..d {
                        let akp = a[k * d + p];
                        let akq = a[k * d + q];
                        a[k * d + p] = akp * c + akq * phase.conj() * s;
                        a[k * d + q] = -akp * phase * s + akq * c;
                    }
                    for k in 0..d {
                        let apk = a[p * d + k];
                        let aqk = a[q * d + k];
                        a[p * d + k] = apk * c + aqk * phase * s;
                        a[q * d + k] = -apk * phase.conj() * s + aqk * c;
                    }
                    for k in 0..d {
                        let vkp = v[k * d + p];
                        let vkq = v[k * d + q];
                        v[k * d + p] = vkp * c + vkq * phase.conj() * s;
                        v[k * d + q] = -vkp * phase * s + vkq * c;
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&i, &j| a[i * d + i].re.partial_cmp(&a[j * d + j].re).unwrap());
        let values: Vec<f64> = order.iter().map(|&i| a[i * d + i].re).collect();
        let vectors: Vec<StateVector> = order
            .iter()
            .map(|&col| StateVector {
                dim: d,
                amps: (0..d).map(|row| v[row * d + col]).collect(),
            })
            .collect();
        Ok(HermitianEigen { values, vectors })
    }

    /// Pseudo-inverse square root on the support of a Hermitian PSD operator.
    ///
    /// Eigenvalues above the relative cutoff `1e-10 * lambda_max` map to
    /// `lambda^{-1/2}`; the rest map to zero, so `h * r * r` is the projector
    /// onto the support of `h`.
    pub fn inv_sqrt_on_support(&self) -> Result<Self> {
        let defect = self.hermiticity_defect();
        if defect > 1e-10 * self.max_abs().max(1.0) {
            return Err(Error::NotHermitian { defect, tol: 1e-10 });
        }
        let eigen = self.hermitian_eigen()?;
        let lambda_max = eigen.values.iter().cloned().fold(0.0, f64::max);
        let cutoff = 1e-10 * lambda_max;
        // Eigenvalues come back ascending, so the first one is the minimum.
        let min_eigenvalue = eigen.values[0];
        if min_eigenvalue < -cutoff.max(1e-10) {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        let mut result = Operator::zeros(self.dim);
        for (value, vector) in eigen.values.iter().zip(&eigen.vectors) {
            if *value > cutoff {
                let proj = vector.projector().scale(c64(1.0 / value.sqrt(), 0.0));
                result = result.add(&proj)?;
            }
        }
        Ok(result)
    }
}

/// Result of [`Operator::hermitian_eigen`]: ascending eigenvalues with
/// matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<StateVector>,
}

/// `true` when `a = e^{i phase} b` entrywise within `tol`, with the phase
/// read off the largest-magnitude entry of `b`.
pub fn equal_up_to_global_phase(a: &Operator, b: &Operator, tol: f64) -> Result<bool> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { left: a.dim, right: b.dim });
    }
    let (idx, mag) = b
        .entries
        .iter()
        .map(|z| z.norm())
        .enumerate()
        .fold((0, 0.0), |acc, (i, m)| if m > acc.1 { (i, m) } else { acc });
    if mag < 1e-12 {
        return Err(Error::ZeroPhaseReference);
    }
    let mut phase = a.entries[idx] / b.entries[idx];
    let pnorm = phase.norm();
    phase = if pnorm > 0.0 { phase / pnorm } else { C64::ONE };
    Ok(a.max_abs_diff(&b.scale(phase)) <= tol)
}

/// Max entry deviation after removing the global phase read off the
/// largest-magnitude entry of `b`; diagnostic companion to
/// [`equal_up_to_global_phase`].
pub fn global_phase_deviation(a: &Operator, b: &Operator) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { left: a.dim, right: b.dim });
    }
    let (idx, mag) = b
        .entries
        .iter()
        .map(|z| z.norm())
        .enumerate()
        .fold((0, 0.0), |acc, (i, m)| if m > acc.1 { (i, m) } else { acc });
    if mag < 1e-12 {
        return Err(Error::ZeroPhaseReference);
    }
    let mut phase = a.entries[idx] / b.entries[idx];
    let pnorm = phase.norm();
    phase = if pnorm > 0.0 { phase / pnorm } else { C64::ONE };
    Ok(a.max_abs_diff(&b.scale(phase)))
}
