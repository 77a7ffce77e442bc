//! Two-qubit density matrices, classical-classical states at fixed purity
//! and random state sampling.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, hermitian_eigenvalues, tensor, Complex64, ComplexMatrix, HERMITIAN_TOL};

/// Tolerance on `|tr rho - 1|`.
pub const TRACE_TOL: f64 = 1e-9;
/// Eigenvalues in `[-POSITIVITY_TOL, 0)` are treated as zero; anything lower is rejected.
pub const POSITIVITY_TOL: f64 = 1e-9;
/// Tolerance on `|sum p - 1|` for classical probability vectors.
pub const PROBABILITY_TOL: f64 = 1e-12;

/// A physical two-qubit state: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl std::fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DensityMatrix {:?}", self.mat)
    }
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        validate_density(&mat, 4)?;
        Ok(Self { mat })
    }

    /// Skips validation. Callers guarantee physicality, e.g. for `U rho U^dagger`.
    pub(crate) fn new_unchecked(mat: ComplexMatrix) -> Self {
        debug_assert_eq!(mat.dim(), 4);
        Self { mat }
    }

    pub fn maximally_mixed() -> Self {
        Self { mat: ComplexMatrix::identity(4).unwrap().scale_real(0.25) }
    }

    /// `|psi><psi|` for a normalized 4-component state vector.
    pub fn pure(psi: &[Complex64; 4]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::OutOfRange("zero state vector".into()));
        }
        let unit: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::projector(&unit)?)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn purity(&self) -> f64 {
        purity(&self.mat)
    }

    /// Clipped eigenvalues, descending, summing to one.
    pub fn spectrum(&self) -> Vec<f64> {
        clipped_spectrum(&self.mat).expect("validated density matrix")
    }

    /// Number of eigenvalues above [`POSITIVITY_TOL`].
    pub fn rank(&self) -> usize {
        self.spectrum().iter().filter(|&&l| l > POSITIVITY_TOL).count()
    }

    pub fn entropy(&self) -> f64 {
        von_neumann_entropy(&self.mat).expect("validated density matrix")
    }

    pub fn reduced(&self, traced: crate::linalg::Subsystem) -> ComplexMatrix {
        crate::linalg::partial_trace(&self.mat, traced).unwrap()
    }

    /// `U rho U^dagger` for a 4x4 unitary `u`.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<Self> {
        let err = u.unitarity_error();
        if !(err <= crate::linalg::UNITARY_TOL) {
            return Err(Error::NotUnitary(err));
        }
        Ok(Self { mat: self.mat.conjugate_by(u)? })
    }
}

fn validate_density(mat: &ComplexMatrix, dim: usize) -> Result<()> {
    if mat.dim() != dim {
        return Err(Error::DimensionMismatch { left: mat.dim(), right: dim });
    }
    if !mat.is_finite() {
        return Err(Error::OutOfRange("non-finite matrix entry".into()));
    }
    let herm = mat.hermiticity_error();
    if herm > HERMITIAN_TOL {
        return Err(Error::NotHermitian(herm));
    }
    let tr = mat.trace().re;
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(Error::BadTrace(tr));
    }
    let min = hermitian_eigenvalues(mat)?.into_iter().fold(f64::INFINITY, f64::min);
    if min < -POSITIVITY_TOL {
        return Err(Error::NegativeEigenvalue(min));
    }
    Ok(())
}

/// `tr(rho^2)`, computed as the squared Frobenius norm of a Hermitian matrix.
pub fn purity(m: &ComplexMatrix) -> f64 {
    let f = m.frobenius_norm();
    f * f
}

/// Eigenvalues with numerical negatives clipped to zero and the trace renormalized.
pub fn clipped_spectrum(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let mut ev = hermitian_eigenvalues(m)?;
    clip_spectrum(&mut ev)?;
    Ok(ev)
}

pub(crate) fn clip_spectrum(ev: &mut [f64]) -> Result<()> {
    for l in ev.iter_mut() {
        if *l < -POSITIVITY_TOL {
            return Err(Error::NegativeEigenvalue(*l));
        }
        if *l < 0.0 {
            *l = 0.0;
        }
    }
    let total: f64 = ev.iter().sum();
    if total > 0.0 {
        for l in ev.iter_mut() {
            *l /= total;
        }
    }
    Ok(())
}

/// Shannon entropy in bits of a probability vector, `0 log 0 = 0`.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

/// Entropy in bits of a qubit state with Bloch vector length `r`.
#[inline]
pub fn qubit_entropy(r: f64) -> f64 {
    let r = r.min(1.0);
    let lo = 0.5 * (1.0 - r);
    let hi = 0.5 * (1.0 + r);
    let mut s = 0.0;
    if lo > 0.0 {
        s -= lo * lo.log2();
    }
    if hi > 0.0 {
        s -= hi * hi.log2();
    }
    s
}

/// `S[rho] = -tr rho log2 rho` for a 2x2 or 4x4 density operator.
pub fn von_neumann_entropy(m: &ComplexMatrix) -> Result<f64> {
    let ev = clipped_spectrum(m)?;
    Ok(shannon_entropy(&ev))
}

/// Orthonormal qubit basis whose first column is the Bloch direction
/// `(sin t cos p, sin t sin p, cos t)`.
pub fn qubit_basis(theta: f64, phi: f64) -> ComplexMatrix {
    let (s, c) = (0.5 * theta).sin_cos();
    let e = Complex64::from_polar(1.0, phi);
    ComplexMatrix::from_rows(&[[c64(c, 0.0), -e.conj() * s], [e * s, c64(c, 0.0)]]).unwrap()
}

/// Parameters of a classical-classical state
/// `sum_{r,s} p_{rs} |a_r><a_r| ⊗ |b_s><b_s|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalStateSpec {
    /// `p_{rs}` stored at index `2r + s`.
    pub probs: [f64; 4],
    /// Columns are `|a_0>, |a_1>`.
    pub basis_a: ComplexMatrix,
    /// Columns are `|b_0>, |b_1>`.
    pub basis_b: ComplexMatrix,
}

impl ClassicalStateSpec {
    pub fn new(probs: [f64; 4], basis_a: ComplexMatrix, basis_b: ComplexMatrix) -> Result<Self> {
        validate_probabilities(&probs)?;
        for b in [&basis_a, &basis_b] {
            if b.dim() != 2 {
                return Err(Error::DimensionMismatch { left: b.dim(), right: 2 });
            }
            let err = b.unitarity_error();
            if err > crate::linalg::UNITARY_TOL {
                return Err(Error::NotUnitary(err));
            }
        }
        Ok(Self { probs, basis_a, basis_b })
    }

    /// Spec in the computational basis of both qubits.
    pub fn logical(probs: [f64; 4]) -> Result<Self> {
        let id = ComplexMatrix::identity(2)?;
        Self::new(probs, id, id)
    }

    /// Spec with both bases given by Bloch angles `[theta_a, phi_a, theta_b, phi_b]`.
    pub fn from_angles(probs: [f64; 4], angles: [f64; 4]) -> Result<Self> {
        Self::new(probs, qubit_basis(angles[0], angles[1]), qubit_basis(angles[2], angles[3]))
    }

    pub fn purity(&self) -> f64 {
        self.probs.iter().map(|p| p * p).sum()
    }

    /// `K_A ⊗ K_B`, the unitary carrying the logical basis onto the product basis.
    pub fn local_frame(&self) -> ComplexMatrix {
        tensor(&self.basis_a, &self.basis_b).unwrap()
    }
}

pub fn validate_probabilities(p: &[f64; 4]) -> Result<()> {
    if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidProbabilities(format!("negative or non-finite entry in {p:?}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > PROBABILITY_TOL {
        return Err(Error::InvalidProbabilities(format!("entries sum to {total}")));
    }
    Ok(())
}

/// Builds the classical-classical density matrix described by `spec`.
pub fn make_classical(spec: &ClassicalStateSpec) -> DensityMatrix {
    let frame = spec.local_frame();
    DensityMatrix::new_unchecked(classical_from_frame(&spec.probs, &frame))
}

/// `sum_k p_k |w_k><w_k|` with `w_k` the columns of `frame`.
pub(crate) fn classical_from_frame(probs: &[f64; 4], frame: &ComplexMatrix) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4).unwrap();
    for (k, &p) in probs.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        for i in 0..4 {
            let wi = frame[(i, k)] * p;
            for j in 0..4 {
                m[(i, j)] += wi * frame[(j, k)].conj();
            }
        }
    }
    m
}

/// Settings for random state clouds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomStateConfig {
    pub rank: usize,
    pub sample_count: usize,
    pub seed: u64,
}

impl RandomStateConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=4).contains(&self.rank) {
            return Err(Error::OutOfRange(format!("rank {} not in 1..=4", self.rank)));
        }
        if self.sample_count == 0 {
            return Err(Error::OutOfRange("sample count must be positive".into()));
        }
        Ok(())
    }
}

/// Ginibre sampler: `rho = G G^dagger / tr(G G^dagger)` with `G` a 4 x rank
/// matrix of complex standard normals.
///
/// The stream is ChaCha8 seeded from `seed`; entries are drawn row-major,
/// real part before imaginary part, one sample after another. For rank 4 this
/// is the Hilbert-Schmidt measure.
pub struct GinibreSampler {
    rank: usize,
    rng: ChaCha8Rng,
}

impl GinibreSampler {
    pub fn new(rank: usize, seed: u64) -> Result<Self> {
        RandomStateConfig { rank, sample_count: 1, seed }.validate()?;
        Ok(Self { rank, rng: ChaCha8Rng::seed_from_u64(seed) })
    }

    pub fn sample(&mut self) -> DensityMatrix {
        let mut g = [[Complex64::new(0.0, 0.0); 4]; 4];
        for row in g.iter_mut() {
            for z in row.iter_mut().take(self.rank) {
                let re: f64 = StandardNormal.sample(&mut self.rng);
                let im: f64 = StandardNormal.sample(&mut self.rng);
                *z = c64(re, im);
            }
        }
        let mut m = ComplexMatrix::from_fn(4, |i, j| (0..self.rank).map(|k| g[i][k] * g[j][k].conj()).sum())
            .unwrap();
        let tr = m.trace().re;
        m = m.scale_real(1.0 / tr);
        // exact Hermiticity
        let m = ComplexMatrix::from_fn(4, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5).unwrap();
        DensityMatrix::new_unchecked(m)
    }
}

impl Iterator for GinibreSampler {
    type Item = DensityMatrix;
    fn next(&mut self) -> Option<DensityMatrix> {
        Some(self.sample())
    }
}

pub fn sample_random_states(cfg: &RandomStateConfig) -> Result<Vec<DensityMatrix>> {
    cfg.validate()?;
    Ok(GinibreSampler::new(cfg.rank, cfg.seed)?.take(cfg.sample_count).collect())
}

/// On-disk matrix format: `{"dim":4,"re":[[...]],"im":[[...]]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let rows = m.rows();
        Self {
            dim: m.dim(),
            re: rows.iter().map(|r| r.iter().map(|z| z.re).collect()).collect(),
            im: rows.iter().map(|r| r.iter().map(|z| z.im).collect()).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == self.dim && rows.iter().all(|r| r.len() == self.dim);
        if !shape_ok(&self.re) || !shape_ok(&self.im) {
            return Err(Error::Format(format!("expected {0}x{0} `re` and `im` arrays", self.dim)));
        }
        ComplexMatrix::from_fn(self.dim, |i, j| c64(self.re[i][j], self.im[i][j]))
    }

    pub fn parse(text: &str) -> Result<ComplexMatrix> {
        let file: MatrixFile = serde_json::from_str(text)?;
        file.to_matrix()
    }

    pub fn to_json(m: &ComplexMatrix) -> String {
        serde_json::to_string_pretty(&Self::from_matrix(m)).expect("plain data serializes")
    }
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<ComplexMatrix> {
    MatrixFile::parse(&std::fs::read_to_string(path)?)
}

/// Reads a state file and validates density-matrix invariants.
pub fn read_density_matrix(path: impl AsRef<Path>) -> Result<DensityMatrix> {
    let m = read_matrix(path)?;
    if m.dim() != 4 {
        return Err(Error::Format(format!("state file must be 4x4, got {0}x{0}", m.dim())));
    }
    DensityMatrix::new(m)
}

pub fn write_matrix(path: impl AsRef<Path>, m: &ComplexMatrix) -> Result<()> {
    std::fs::write(path, MatrixFile::to_json(m))?;
    Ok(())
}
