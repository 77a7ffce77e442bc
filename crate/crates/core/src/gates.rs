//! Cartan kernels `exp(-i sum_j theta_j σ_j⊗σ_j)`, extraction of canonical
//! coordinates from arbitrary two-qubit unitaries, and a small gate catalog.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_1_SQRT_2};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, normal_eigenvalues, pauli, tensor, Complex64, ComplexMatrix, UNITARY_TOL};
use crate::states::DensityMatrix;

/// Unitarity tolerance for inputs to [`canonical_coordinates`].
pub const EXTRACTION_UNITARY_TOL: f64 = 1e-8;

/// Angles `(theta_x, theta_y, theta_z)` of a Cartan kernel, in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartanCoordinates {
    pub theta_x: f64,
    pub theta_y: f64,
    pub theta_z: f64,
}

impl CartanCoordinates {
    pub const fn new(theta_x: f64, theta_y: f64, theta_z: f64) -> Self {
        Self { theta_x, theta_y, theta_z }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.theta_x, self.theta_y, self.theta_z]
    }

    /// Representative in the chamber `0 <= theta_z <= theta_y <= theta_x <= pi/4`.
    ///
    /// Uses the period `pi/2` of every angle, pairwise sign flips and axis
    /// relabelings, all of which are local-unitary equivalences. The sign of
    /// the smallest angle is dropped as well, which identifies a kernel with
    /// its complex conjugate; discord-based quantities do not distinguish the two.
    pub fn normalized(&self) -> Self {
        let mut v = self.as_array().map(|t| {
            let mut r = t.rem_euclid(FRAC_PI_2);
            if r > FRAC_PI_4 {
                r -= FRAC_PI_2;
            }
            r.abs()
        });
        v.sort_by(|a, b| b.total_cmp(a));
        Self::new(v[0], v[1], v[2])
    }

    pub fn in_chamber(&self, tol: f64) -> bool {
        -tol <= self.theta_z
            && self.theta_z <= self.theta_y + tol
            && self.theta_y <= self.theta_x + tol
            && self.theta_x <= FRAC_PI_4 + tol
    }

    /// Largest absolute coordinate difference.
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.as_array().iter().zip(other.as_array()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

impl fmt::Display for CartanCoordinates {
    /// Multiples of pi, e.g. `(0.25π, 0, 0)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |t: f64| {
            let m = t / std::f64::consts::PI;
            if m.abs() < 1e-12 {
                "0".to_string()
            } else {
                let s = format!("{m:.6}");
                let s = s.trim_end_matches('0').trim_end_matches('.');
                format!("{s}π")
            }
        };
        write!(f, "({}, {}, {})", show(self.theta_x), show(self.theta_y), show(self.theta_z))
    }
}

/// `exp(-i (theta_x XX + theta_y YY + theta_z ZZ))`.
///
/// The three generators commute, so this is the product of
/// `cos(theta_j) I - i sin(theta_j) σ_j⊗σ_j`.
pub fn cartan_kernel(coords: &CartanCoordinates) -> ComplexMatrix {
    let id = ComplexMatrix::identity(4).unwrap();
    coords
        .as_array()
        .iter()
        .zip(pauli::xyz())
        .map(|(&theta, p)| {
            let pp = tensor(&p, &p).unwrap();
            id.scale_real(theta.cos()) + pp.scale(c64(0.0, -theta.sin()))
        })
        .fold(id, |acc, factor| acc * factor)
}

/// Magic basis; local `SU(2)⊗SU(2)` becomes real orthogonal in it.
fn magic_basis() -> ComplexMatrix {
    let s = FRAC_1_SQRT_2;
    let z = c64(0.0, 0.0);
    let r = c64(s, 0.0);
    let i = c64(0.0, s);
    ComplexMatrix::from_rows(&[[r, z, z, i], [z, i, r, z], [z, i, -r, z], [r, z, z, -i]]).unwrap()
}

/// Canonical Cartan coordinates of a two-qubit unitary.
///
/// The determinant is normalized to one, `U` is moved to the magic basis,
/// and the eigenphases `exp(-2i lambda_k)` of `U_B^T U_B` give
/// `theta_x = (l1 + l3)/2`, `theta_y = (l2 + l3)/2`, `theta_z = (l1 + l2)/2`
/// up to symmetries that [`CartanCoordinates::normalized`] removes. Only the
/// coordinates are returned; local factors are not reconstructed.
pub fn canonical_coordinates(u: &ComplexMatrix) -> Result<CartanCoordinates> {
    if u.dim() != 4 {
        return Err(Error::DimensionMismatch { left: u.dim(), right: 4 });
    }
    let err = u.unitarity_error();
    if !(err <= EXTRACTION_UNITARY_TOL) {
        return Err(Error::NotUnitary(err));
    }
    let det = u.determinant();
    let root = Complex64::from_polar(1.0, -det.arg() / 4.0);
    let special = u.scale(root);
    let magic = magic_basis();
    let ub = magic.adjoint() * special * magic;
    let m2 = ub.transpose() * ub;
    let lambdas: Vec<f64> = normal_eigenvalues(&m2)?.iter().map(|z| -z.arg() / 2.0).collect();
    let (l1, l2, l3) = (lambdas[0], lambdas[1], lambdas[2]);
    Ok(CartanCoordinates::new((l1 + l3) / 2.0, (l2 + l3) / 2.0, (l1 + l2) / 2.0).normalized())
}

/// Pair of single-qubit unitaries acting as `a ⊗ b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalPair {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
}

impl LocalPair {
    pub fn new(a: ComplexMatrix, b: ComplexMatrix) -> Result<Self> {
        for m in [&a, &b] {
            if m.dim() != 2 {
                return Err(Error::DimensionMismatch { left: m.dim(), right: 2 });
            }
            let err = m.unitarity_error();
            if err > UNITARY_TOL {
                return Err(Error::NotUnitary(err));
            }
        }
        Ok(Self { a, b })
    }

    pub fn matrix(&self) -> ComplexMatrix {
        tensor(&self.a, &self.b).unwrap()
    }
}

/// `U = (L1⊗L2) U_c(theta) (L3⊗L4)`; absent factors are identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartanGate {
    pub coords: CartanCoordinates,
    /// `L3⊗L4`, applied first.
    pub pre: Option<LocalPair>,
    /// `L1⊗L2`, applied last.
    pub post: Option<LocalPair>,
}

impl CartanGate {
    pub fn kernel(coords: CartanCoordinates) -> Self {
        Self { coords, pre: None, post: None }
    }

    pub fn with_locals(coords: CartanCoordinates, pre: LocalPair, post: LocalPair) -> Self {
        Self { coords, pre: Some(pre), post: Some(post) }
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let mut u = cartan_kernel(&self.coords);
        if let Some(pre) = &self.pre {
            u = u * pre.matrix();
        }
        if let Some(post) = &self.post {
            u = post.matrix() * u;
        }
        u
    }

    pub fn kernel_matrix(&self) -> ComplexMatrix {
        cartan_kernel(&self.coords)
    }

    /// `U rho U^dagger`.
    pub fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        DensityMatrix::new_unchecked(rho.matrix().conjugate_by(&self.matrix()).unwrap())
    }
}

/// `U rho U^dagger` for a Cartan gate.
pub fn apply(gate: &CartanGate, rho: &DensityMatrix) -> DensityMatrix {
    gate.apply(rho)
}

/// Named two-qubit gates with their standard matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedGate {
    Identity,
    Cnot,
    Swap,
    SqrtSwap,
    Cz,
    Iswap,
}

impl NamedGate {
    pub const ALL: [NamedGate; 6] =
        [NamedGate::Identity, NamedGate::Cnot, NamedGate::Swap, NamedGate::SqrtSwap, NamedGate::Cz, NamedGate::Iswap];

    pub fn name(&self) -> &'static str {
        match self {
            NamedGate::Identity => "identity",
            NamedGate::Cnot => "cnot",
            NamedGate::Swap => "swap",
            NamedGate::SqrtSwap => "sqrt_swap",
            NamedGate::Cz => "cz",
            NamedGate::Iswap => "iswap",
        }
    }

    /// Standard matrix; CNOT is controlled on qubit A.
    pub fn matrix(&self) -> ComplexMatrix {
        let o = c64(0.0, 0.0);
        let l = c64(1.0, 0.0);
        let i = c64(0.0, 1.0);
        let rows = match self {
            NamedGate::Identity => return ComplexMatrix::identity(4).unwrap(),
            NamedGate::Cnot => [[l, o, o, o], [o, l, o, o], [o, o, o, l], [o, o, l, o]],
            NamedGate::Swap => [[l, o, o, o], [o, o, l, o], [o, l, o, o], [o, o, o, l]],
            NamedGate::SqrtSwap => {
                let p = c64(0.5, 0.5);
                let m = c64(0.5, -0.5);
                [[l, o, o, o], [o, p, m, o], [o, m, p, o], [o, o, o, l]]
            }
            NamedGate::Cz => [[l, o, o, o], [o, l, o, o], [o, o, l, o], [o, o, o, -l]],
            NamedGate::Iswap => [[l, o, o, o], [o, o, i, o], [o, i, o, o], [o, o, o, l]],
        };
        ComplexMatrix::from_rows(&rows).unwrap()
    }
}

impl FromStr for NamedGate {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Ok(match key.as_str() {
            "identity" | "id" | "i" => NamedGate::Identity,
            "cnot" | "cx" => NamedGate::Cnot,
            "swap" => NamedGate::Swap,
            "sqrt_swap" | "sqrtswap" => NamedGate::SqrtSwap,
            "cz" => NamedGate::Cz,
            "iswap" => NamedGate::Iswap,
            _ => return Err(Error::UnknownGate(s.to_string())),
        })
    }
}

impl fmt::Display for NamedGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A catalog gate: its standard matrix and the kernel it is equivalent to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatalogGate {
    pub name: NamedGate,
    pub matrix: ComplexMatrix,
    pub cartan: CartanGate,
}

pub fn named_gate(name: &str) -> Result<CatalogGate> {
    let gate: NamedGate = name.parse()?;
    let matrix = gate.matrix();
    let coords = canonical_coordinates(&matrix)?;
    Ok(CatalogGate { name: gate, matrix, cartan: CartanGate::kernel(coords) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_8, PI};

    const PI4: f64 = FRAC_PI_4;

    fn coords(x: f64, y: f64, z: f64) -> CartanCoordinates {
        CartanCoordinates::new(x, y, z)
    }

    #[test]
    fn identity_kernel() {
        assert_eq!(cartan_kernel(&coords(0.0, 0.0, 0.0)), ComplexMatrix::identity(4).unwrap());
    }

    #[test]
    fn kernels_are_unitary() {
        for c in [coords(0.3, -1.2, 2.0), coords(PI4, PI4, PI4), coords(7.0, 0.1, -0.2)] {
            assert!(cartan_kernel(&c).unitarity_error() < 1e-14);
        }
    }

    #[test]
    fn swap_is_kernel_up_to_phase() {
        // (XX + YY + ZZ) = 2 SWAP - I, so the (pi/4, pi/4, pi/4) kernel is
        // exp(i pi/4) exp(-i pi/2 SWAP) = -i exp(i pi/4) SWAP.
        let k = cartan_kernel(&coords(PI4, PI4, PI4));
        let phase = c64(0.0, -1.0) * Complex64::from_polar(1.0, PI4);
        let expected = NamedGate::Swap.matrix().scale(phase);
        assert!(k.max_abs_diff(&expected).unwrap() < 1e-14);
    }

    #[test]
    fn catalog_coordinates() {
        let expect = [
            (NamedGate::Identity, coords(0.0, 0.0, 0.0)),
            (NamedGate::Cnot, coords(PI4, 0.0, 0.0)),
            (NamedGate::Cz, coords(PI4, 0.0, 0.0)),
            (NamedGate::Swap, coords(PI4, PI4, PI4)),
            (NamedGate::SqrtSwap, coords(FRAC_PI_8, FRAC_PI_8, FRAC_PI_8)),
            (NamedGate::Iswap, coords(PI4, PI4, 0.0)),
        ];
        for (gate, want) in expect {
            let got = named_gate(gate.name()).unwrap().cartan.coords;
            assert!(got.max_diff(&want) < 1e-9, "{gate}: {got:?}");
        }
    }

    #[test]
    fn unknown_gate() {
        assert!(matches!(named_gate("toffoli"), Err(Error::UnknownGate(_))));
        assert_eq!("CX".parse::<NamedGate>().unwrap(), NamedGate::Cnot);
    }

    #[test]
    fn non_unitary_rejected() {
        let m = ComplexMatrix::diagonal(&[1.0, 1.0, 1.0, 0.5]).unwrap();
        assert!(matches!(canonical_coordinates(&m), Err(Error::NotUnitary(_))));
        assert!(canonical_coordinates(&pauli::x()).is_err());
    }

    #[test]
    fn global_phase_is_ignored() {
        let u = NamedGate::SqrtSwap.matrix().scale(Complex64::from_polar(1.0, 0.77));
        let got = canonical_coordinates(&u).unwrap();
        assert!(got.max_diff(&coords(FRAC_PI_8, FRAC_PI_8, FRAC_PI_8)) < 1e-9);
    }

    #[test]
    fn normalization_examples() {
        let n = coords(PI / 2.0 + 0.1, -0.3, 0.2).normalized();
        assert!(n.max_diff(&coords(0.3, 0.2, 0.1)) < 1e-15);
        assert!(coords(PI4 + 0.05, 0.0, 0.0).normalized().max_diff(&coords(PI4 - 0.05, 0.0, 0.0)) < 1e-15);
        assert!(coords(0.1, 0.2, 0.3).normalized().in_chamber(0.0));
    }

    #[test]
    fn commuting_factors() {
        let c = coords(0.37, -0.21, 0.9);
        let product = cartan_kernel(&coords(c.theta_x, 0.0, 0.0))
            * cartan_kernel(&coords(0.0, c.theta_y, 0.0))
            * cartan_kernel(&coords(0.0, 0.0, c.theta_z));
        assert!(product.max_abs_diff(&cartan_kernel(&c)).unwrap() < 1e-12);
    }

    #[test]
    fn display_in_units_of_pi() {
        assert_eq!(coords(PI4, 0.0, 0.0).to_string(), "(0.25π, 0, 0)");
    }

    #[test]
    fn identity_gate_leaves_state() {
        let rho = DensityMatrix::new(ComplexMatrix::diagonal(&[0.1, 0.2, 0.3, 0.4]).unwrap()).unwrap();
        let out = apply(&CartanGate::kernel(coords(0.0, 0.0, 0.0)), &rho);
        assert_eq!(out, rho);
    }
}
