//! Dense complex linear algebra for the 2x2 and 4x4 operators of a
//! two-qubit system.
//!
//! Basis ordering is `{|00>, |01>, |10>, |11>}` with qubit A as the left
//! tensor factor. Every other module relies on this convention.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

pub use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on `max |A - A^dagger|` accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-9;
/// Tolerance on `max |U^dagger U - I|` accepted as unitary.
pub const UNITARY_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Which qubit of the pair an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Subsystem {
    A,
    B,
}

impl Subsystem {
    pub fn other(self) -> Self {
        match self {
            Subsystem::A => Subsystem::B,
            Subsystem::B => Subsystem::A,
        }
    }
}

/// Square complex matrix of dimension 2 or 4, stored inline row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: [Complex64; 16],
}

impl ComplexMatrix {
    fn check_dim(dim: usize) -> Result<()> {
        if dim == 2 || dim == 4 {
            Ok(())
        } else {
            Err(Error::UnsupportedDimension(dim))
        }
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::check_dim(dim)?;
        Ok(Self { dim, data: [ZERO; 16] })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        Ok(m)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        Ok(m)
    }

    pub fn from_rows<R: AsRef<[Complex64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.len();
        Self::check_dim(dim)?;
        for r in rows {
            if r.as_ref().len() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: r.as_ref().len() });
            }
        }
        Self::from_fn(dim, |i, j| rows[i].as_ref()[j])
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.len();
        Self::check_dim(dim)?;
        for r in rows {
            if r.as_ref().len() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: r.as_ref().len() });
            }
        }
        Self::from_fn(dim, |i, j| c64(rows[i].as_ref()[j], 0.0))
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        Self::from_fn(values.len(), |i, j| if i == j { c64(values[i], 0.0) } else { ZERO })
    }

    /// Outer product `|v><v|` of a 2- or 4-component vector.
    pub fn projector(v: &[Complex64]) -> Result<Self> {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self[(i, j)]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self[(i, j)]).collect()).collect()
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { left: self.dim, right: other.dim })
        }
    }

    pub fn try_matmul(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(self.matmul_unchecked(other))
    }

    fn matmul_unchecked(&self, other: &Self) -> Self {
        let n = self.dim;
        let mut out = Self { dim: n, data: [ZERO; 16] };
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let mut out = *self;
        for (o, b) in out.data.iter_mut().zip(other.data.iter()) {
            *o += b;
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let mut out = *self;
        for (o, b) in out.data.iter_mut().zip(other.data.iter()) {
            *o -= b;
        }
        Ok(out)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = *self;
        for v in out.data.iter_mut() {
            *v *= s;
        }
        out
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c64(s, 0.0))
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = *self;
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = self.data[j * n + i].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut out = *self;
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = self.data[j * n + i];
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = *self;
        for v in out.data.iter_mut() {
            *v = v.conj();
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn frobenius_distance(&self, other: &Self) -> Result<f64> {
        Ok(self.try_sub(other)?.frobenius_norm())
    }

    /// Largest entry modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.try_sub(other)?.entries().iter().map(|z| z.norm()).fold(0.0, f64::max))
    }

    fn entries(&self) -> &[Complex64] {
        &self.data[..self.dim * self.dim]
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.adjoint()).unwrap_or(f64::INFINITY)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// `max |U^dagger U - I|`.
    pub fn unitarity_error(&self) -> f64 {
        let id = Self::identity(self.dim).expect("dim validated at construction");
        (self.adjoint() * *self).max_abs_diff(&id).unwrap_or(f64::INFINITY)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    /// Determinant by Laplace expansion; only used on 2x2 and 4x4 inputs.
    pub fn determinant(&self) -> Complex64 {
        let m = |i: usize, j: usize| self[(i, j)];
        let det2 = |a: Complex64, b: Complex64, c: Complex64, d: Complex64| a * d - b * c;
        if self.dim == 2 {
            return det2(m(0, 0), m(0, 1), m(1, 0), m(1, 1));
        }
        // expansion by 2x2 minors of the first two rows
        let mut det = ZERO;
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        for &(a, b) in &pairs {
            let (c, d) = complement(a, b);
            let sign = if (a + b) % 2 == 1 { 1.0 } else { -1.0 };
            let top = det2(m(0, a), m(0, b), m(1, a), m(1, b));
            let bottom = det2(m(2, c), m(2, d), m(3, c), m(3, d));
            det += top * bottom * sign;
        }
        det
    }

    /// `U rho U^dagger`.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        Ok(u.try_matmul(self)?.try_matmul(&u.adjoint())?)
    }
}

fn complement(a: usize, b: usize) -> (usize, usize) {
    let mut rest = (0..4).filter(|&k| k != a && k != b);
    (rest.next().unwrap(), rest.next().unwrap())
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(i < self.dim && j < self.dim, "index ({i},{j}) out of range for dim {}", self.dim);
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(i < self.dim && j < self.dim, "index ({i},{j}) out of range for dim {}", self.dim);
        &mut self.data[i * self.dim + j]
    }
}

/// Panics on dimension mismatch; use [`ComplexMatrix::try_matmul`] for a checked product.
impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> Self {
        self.try_matmul(&rhs).expect("matrix dimensions must agree")
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> Self {
        self.try_add(&rhs).expect("matrix dimensions must agree")
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> Self {
        self.try_sub(&rhs).expect("matrix dimensions must agree")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:>10.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product `a ⊗ b` of two 2x2 matrices, qubit A major.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.dim != 2 || b.dim != 2 {
        return Err(Error::DimensionMismatch { left: a.dim, right: b.dim });
    }
    ComplexMatrix::from_fn(4, |i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

/// Traces out `traced` and returns the reduced 2x2 operator of the other qubit.
pub fn partial_trace(m: &ComplexMatrix, traced: Subsystem) -> Result<ComplexMatrix> {
    if m.dim != 4 {
        return Err(Error::DimensionMismatch { left: m.dim, right: 4 });
    }
    ComplexMatrix::from_fn(2, |i, j| match traced {
        Subsystem::A => m[(i, j)] + m[(2 + i, 2 + j)],
        Subsystem::B => m[(2 * i, 2 * j)] + m[(2 * i + 1, 2 * j + 1)],
    })
}

pub mod pauli {
    use super::*;

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(2).unwrap()
    }

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap()
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[[ZERO, c64(0.0, -1.0)], [c64(0.0, 1.0), ZERO]]).unwrap()
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[[1.0, 0.0], [0.0, -1.0]]).unwrap()
    }

    /// `[X, Y, Z]`.
    pub fn xyz() -> [ComplexMatrix; 3] {
        [x(), y(), z()]
    }
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    /// Sorted in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, matching `values`.
    pub vectors: ComplexMatrix,
}

impl EigenSystem {
    /// `V diag(values) V^dagger`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = ComplexMatrix::diagonal(&self.values).unwrap();
        self.vectors * d * self.vectors.adjoint()
    }
}

const JACOBI_MAX_SWEEPS: usize = 64;

/// Eigen-decomposes a Hermitian 2x2 or 4x4 matrix with cyclic complex Jacobi
/// rotations. Rejects inputs whose Hermiticity error exceeds [`HERMITIAN_TOL`].
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<EigenSystem> {
    let err = m.hermiticity_error();
    if !(err <= HERMITIAN_TOL) {
        return Err(Error::NotHermitian(err));
    }
    let n = m.dim;
    // symmetrize so the rotations act on an exactly Hermitian matrix
    let mut a = ComplexMatrix::from_fn(n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)?;
    let mut v = ComplexMatrix::identity(n)?;
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])])?;
    Ok(EigenSystem { values, vectors })
}

/// Eigenvalues only, descending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(m)?.values)
}

fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = apq / mag;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let n = a.dim;
    // columns: V = D R with D = diag(1, conj(phase)) on the (p, q) block
    let pc = phase.conj();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * pc * s;
        a[(k, q)] = akp * s + akq * pc * c;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * pc * s;
        v[(k, q)] = vkp * s + vkq * pc * c;
    }
    // rows: V^dagger A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * c;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = c64(a[(p, p)].re, 0.0);
    a[(q, q)] = c64(a[(q, q)].re, 0.0);
}

/// Eigenvalues of a normal (e.g. unitary) matrix via a Hermitian pencil
/// `(M + M^dagger)/2 + k (M - M^dagger)/(2i)` sharing its eigenvectors.
pub fn normal_eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let herm = (*m + m.adjoint()).scale_real(0.5);
    let anti = (*m - m.adjoint()).scale(c64(0.0, -0.5));
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    for k in [0.618_033_988_749_894_9, 1.324_717_957_244_746, 2.718_281_828_459_045, 0.153_209_898_764] {
        let pencil = herm + anti.scale_real(k);
        let eig = hermitian_eigen(&pencil)?;
        let mut residual = 0.0_f64;
        let mut vals = Vec::with_capacity(m.dim);
        for j in 0..m.dim {
            let col = eig.vectors.column(j);
            let mv: Vec<Complex64> =
                (0..m.dim).map(|i| (0..m.dim).map(|l| m[(i, l)] * col[l]).sum()).collect();
            let lambda: Complex64 = col.iter().zip(&mv).map(|(c, x)| c.conj() * x).sum();
            let r: f64 = mv.iter().zip(&col).map(|(x, c)| (x - lambda * c).norm_sqr()).sum();
            residual = residual.max(r.sqrt());
            vals.push(lambda);
        }
        if residual < 1e-10 {
            return Ok(vals);
        }
        if best.as_ref().map_or(true, |(r, _)| residual < *r) {
            best = Some((residual, vals));
        }
    }
    Ok(best.expect("at least one pencil evaluated").1)
}
