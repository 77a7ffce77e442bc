//! Self-checks: exact gate identities that map diagonal classical states to
//! maximally discordant states, plus a quick pass over library invariants.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::discord::{discord, symmetric_discord, DiscordSettings};
use crate::gates::{canonical_coordinates, cartan_kernel, named_gate, CartanCoordinates, NamedGate};
use crate::linalg::{c64, tensor, Complex64, ComplexMatrix};
use crate::mdms::{classical_preimage, rank_family, werner, BellState, Preimage};
use crate::states::{make_classical, qubit_basis, ClassicalStateSpec, DensityMatrix};

/// Frobenius tolerance of the identity checks.
pub const IDENTITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }

    fn within(name: impl Into<String>, error: f64, tol: f64) -> Self {
        Self::new(name, error <= tol, format!("error {error:.3e} (tol {tol:.0e})"))
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

fn image(coords: CartanCoordinates, spec: &ClassicalStateSpec) -> ComplexMatrix {
    make_classical(spec).matrix().conjugate_by(&cartan_kernel(&coords)).unwrap()
}

fn distance(a: &ComplexMatrix, b: &DensityMatrix) -> f64 {
    a.frobenius_distance(b.matrix()).unwrap()
}

/// `U_c(pi/4,0,0)` takes the Werner-spectrum diagonal state to a Werner
/// state on `(|00> + i|11>)/sqrt2`.
pub fn cnot_kernel_werner(w: f64) -> Check {
    let spec = classical_preimage(Preimage::R4 { w }).unwrap();
    let got = image(CartanCoordinates::new(FRAC_PI_4, 0.0, 0.0), &spec);
    let err = distance(&got, &werner(w, BellState::PhiPlusI).unwrap());
    Check::within(format!("cnot kernel maps R4 diagonal to Werner, w = {w:.4}"), err, IDENTITY_TOL)
}

/// `U_c(pi/8,pi/8,gamma)` takes the `σx⊗I`-rotated Werner-spectrum state to
/// a Werner state on `(|01> - i|10>)/sqrt2`.
pub fn sqrt_swap_family_werner(w: f64, gamma: f64) -> Check {
    let spec = classical_preimage(Preimage::R4Rotated { w }).unwrap();
    let got = image(CartanCoordinates::new(FRAC_PI_8, FRAC_PI_8, gamma), &spec);
    let err = distance(&got, &werner(w, BellState::PsiMinusI).unwrap());
    Check::within(
        format!("(pi/8, pi/8, {:.4}) kernel maps rotated R4 diagonal to Werner, w = {w:.4}", gamma),
        err,
        IDENTITY_TOL,
    )
}

/// `U_c(pi/8,pi/8,gamma) diag((1-a+b)/2, 0, a, (1-a-b)/2) U_c† = rho(a, b, pi/2)`.
pub fn sqrt_swap_family_rank3(a: f64, b: f64, gamma: f64) -> Check {
    let spec = classical_preimage(Preimage::R3 { a, b }).unwrap();
    let got = image(CartanCoordinates::new(FRAC_PI_8, FRAC_PI_8, gamma), &spec);
    let err = distance(&got, &rank_family(a, b, PI / 2.0).unwrap());
    Check::within(
        format!("(pi/8, pi/8, {:.4}) kernel maps R3 diagonal to rho(a, b, pi/2), (a, b) = ({a}, {b})", gamma),
        err,
        IDENTITY_TOL,
    )
}

/// The analytic identities at machine precision.
pub fn identity_suite() -> Vec<Check> {
    let mut out = Vec::new();
    for w in [-1.0 / 3.0, -0.2, 0.0, 0.5] {
        out.push(cnot_kernel_werner(w));
    }
    for gamma in [0.0, FRAC_PI_8] {
        for w in [-1.0 / 3.0, -0.2, 0.0, 0.5] {
            out.push(sqrt_swap_family_werner(w, gamma));
        }
    }
    for gamma in [0.0, FRAC_PI_8] {
        for (a, b) in [(0.6, 0.2), (0.8, 0.2), (0.5, 0.5)] {
            out.push(sqrt_swap_family_rank3(a, b, gamma));
        }
    }
    let sqrt_swap = named_gate("sqrt_swap").unwrap().cartan.coords;
    let err = sqrt_swap.max_diff(&CartanCoordinates::new(FRAC_PI_8, FRAC_PI_8, FRAC_PI_8));
    out.push(Check::within("sqrt_swap belongs to the (pi/8, pi/8, gamma) family", err, IDENTITY_TOL));
    out
}

fn random_unit(rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let (t, p, chi): (f64, f64, f64) = (rng.random::<f64>() * PI, rng.random::<f64>() * 2.0 * PI, rng.random::<f64>() * 2.0 * PI);
    let phase = ComplexMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 0) => c64(1.0, 0.0),
        (1, 1) => Complex64::from_polar(1.0, chi),
        _ => c64(0.0, 0.0),
    })
    .unwrap();
    qubit_basis(t, p) * phase
}

fn random_probs(rng: &mut ChaCha8Rng) -> [f64; 4] {
    let g: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>() + 1e-3);
    let total: f64 = g.iter().sum();
    g.map(|x| x / total)
}

/// A fast sample of the library invariants.
pub fn property_suite(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let screening = DiscordSettings::screening();

    let mut worst = 0.0f64;
    for _ in 0..50 {
        let angles: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>() * PI);
        let spec = ClassicalStateSpec::from_angles(random_probs(&mut rng), angles).unwrap();
        worst = worst.max(discord(&make_classical(&spec)).symmetric.abs());
    }
    out.push(Check::within("classical states carry no discord (50 specs)", worst, 1e-6));

    let mut worst = 0.0f64;
    for _ in 0..10 {
        let rho = crate::states::GinibreSampler::new(4, rng.random()).unwrap().sample();
        let local = tensor(&random_unit(&mut rng), &random_unit(&mut rng)).unwrap();
        let moved = DensityMatrix::new_unchecked(rho.matrix().conjugate_by(&local).unwrap());
        let d = (discord(&rho).symmetric - discord(&moved).symmetric).abs();
        worst = worst.max(d);
    }
    out.push(Check::within("discord is invariant under local unitaries (10 states)", worst, 1e-4));

    let mut worst = 0.0f64;
    let mut outside = 0usize;
    for _ in 0..100 {
        let c = CartanCoordinates::new(rng.random::<f64>() * PI, rng.random::<f64>() * PI, rng.random::<f64>() * PI);
        let pre = tensor(&random_unit(&mut rng), &random_unit(&mut rng)).unwrap();
        let post = tensor(&random_unit(&mut rng), &random_unit(&mut rng)).unwrap();
        let u = post * cartan_kernel(&c) * pre;
        let got = canonical_coordinates(&u).unwrap();
        if !got.in_chamber(1e-9) {
            outside += 1;
        }
        let again = canonical_coordinates(&cartan_kernel(&got)).unwrap();
        worst = worst.max(again.max_diff(&got));
    }
    out.push(Check::new("canonical coordinates land in the chamber (100 gates)", outside == 0, format!("{outside} outside")));
    out.push(Check::within("canonical coordinates are idempotent (100 gates)", worst, 1e-6));

    let expected = [
        (NamedGate::Cnot, CartanCoordinates::new(FRAC_PI_4, 0.0, 0.0)),
        (NamedGate::Swap, CartanCoordinates::new(FRAC_PI_4, FRAC_PI_4, FRAC_PI_4)),
        (NamedGate::Iswap, CartanCoordinates::new(FRAC_PI_4, FRAC_PI_4, 0.0)),
    ];
    let worst = expected
        .iter()
        .map(|(g, c)| canonical_coordinates(&g.matrix()).unwrap().max_diff(c))
        .fold(0.0, f64::max);
    out.push(Check::within("catalog gates have the expected coordinates", worst, 1e-9));

    let mut low = 0.0f64;
    for _ in 0..20 {
        let rho = crate::states::GinibreSampler::new(4, rng.random()).unwrap().sample();
        low = low.min(symmetric_discord(&rho, &screening));
    }
    out.push(Check::new("discord is nonnegative (20 states)", low >= -1e-12, format!("minimum {low:.3e}")));
    out
}
