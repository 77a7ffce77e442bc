//! Mutual information, classical correlations under projective
//! measurements, one-way and symmetric discord, and concurrence.
//!
//! Entropies are in bits. `discord_ab` is the discord obtained by measuring
//! qubit A and inferring qubit B: `I - C^{AB}` with
//! `C^{AB} = S[rho_B] - min_M sum_k p_k S[rho_B^k]`.
//!
//! Internally a state is handled through its correlation form
//! `rho = 1/4 (I⊗I + a.σ⊗I + I⊗b.σ + sum T_ij σ_i⊗σ_j)`: measuring A along
//! `±n` leaves B with Bloch vector `(b ± T^T n) / (1 ± a.n)` and probability
//! `(1 ± a.n)/2`, so each objective evaluation is a handful of flops.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::linalg::{hermitian_eigen, pauli, tensor, ComplexMatrix, Subsystem};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::states::{qubit_entropy, shannon_entropy, DensityMatrix};

/// Branches with probability below this contribute nothing.
pub const BRANCH_PROBABILITY_CUTOFF: f64 = 1e-12;

/// Rank-1 projective qubit measurement along `±(sin t cos p, sin t sin p, cos t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveMeasurement {
    pub theta: f64,
    pub phi: f64,
}

impl ProjectiveMeasurement {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    pub fn z() -> Self {
        Self::new(0.0, 0.0)
    }

    pub fn direction(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// `(Π+, Π-)` with `Π± = (I ± n.σ)/2`.
    pub fn projectors(&self) -> (ComplexMatrix, ComplexMatrix) {
        let n = self.direction();
        let [x, y, z] = pauli::xyz();
        let ndots = x.scale_real(n[0]) + y.scale_real(n[1]) + z.scale_real(n[2]);
        let id = pauli::identity();
        ((id + ndots).scale_real(0.5), (id - ndots).scale_real(0.5))
    }

    /// Same measurement folded into `theta in [0, pi]`, `phi in [0, 2pi)`.
    pub fn normalized(&self) -> Self {
        let n = self.direction();
        let theta = n[2].clamp(-1.0, 1.0).acos();
        let phi = n[1].atan2(n[0]).rem_euclid(2.0 * PI);
        Self { theta, phi }
    }
}

/// Measurement minimizer settings: a `(theta, phi)` grid on the hemisphere
/// followed by Nelder-Mead from the best grid points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscordSettings {
    /// Polar steps over `[0, pi/2]`; the grid holds `theta_steps + 1` rows.
    pub theta_steps: usize,
    /// Azimuthal points over `[0, 2pi)`.
    pub phi_steps: usize,
    /// Number of best grid points refined; zero disables refinement.
    pub refine_starts: usize,
    /// Nelder-Mead stops when the simplex diameter drops below this.
    pub refine_tol: f64,
    pub refine_max_evals: usize,
}

impl Default for DiscordSettings {
    fn default() -> Self {
        Self { theta_steps: 24, phi_steps: 48, refine_starts: 3, refine_tol: 1e-8, refine_max_evals: 400 }
    }
}

impl DiscordSettings {
    /// Cheap settings for ranking many candidates. Discord estimates from an
    /// incomplete minimization can only err upwards.
    pub fn screening() -> Self {
        Self { theta_steps: 6, phi_steps: 12, refine_starts: 1, refine_tol: 1e-6, refine_max_evals: 120 }
    }

    pub fn grid_only(theta_steps: usize, phi_steps: usize) -> Self {
        Self { theta_steps, phi_steps, refine_starts: 0, ..Self::default() }
    }

    fn grid(&self) -> impl Iterator<Item = ProjectiveMeasurement> + '_ {
        let dt = FRAC_PI_2 / self.theta_steps.max(1) as f64;
        let dp = 2.0 * PI / self.phi_steps.max(1) as f64;
        (0..=self.theta_steps).flat_map(move |i| {
            let count = if i == 0 { 1 } else { self.phi_steps.max(1) };
            (0..count).map(move |j| ProjectiveMeasurement::new(i as f64 * dt, j as f64 * dp))
        })
    }
}

/// Local Bloch vectors and correlation tensor of a two-qubit operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationForm {
    pub a: [f64; 3],
    pub b: [f64; 3],
    /// `t[i][j] = tr(rho σ_i⊗σ_j)`.
    pub t: [[f64; 3]; 3],
}

fn pauli_products() -> &'static [[ComplexMatrix; 4]; 4] {
    static CELL: OnceLock<[[ComplexMatrix; 4]; 4]> = OnceLock::new();
    CELL.get_or_init(|| {
        let p = [pauli::identity(), pauli::x(), pauli::y(), pauli::z()];
        std::array::from_fn(|i| std::array::from_fn(|j| tensor(&p[i], &p[j]).unwrap()))
    })
}

impl CorrelationForm {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let prods = pauli_products();
        let coef = |i: usize, j: usize| -> f64 {
            let p = &prods[i][j];
            let mut s = 0.0;
            for r in 0..4 {
                for c in 0..4 {
                    let pc = p[(c, r)];
                    if pc.re != 0.0 || pc.im != 0.0 {
                        s += (m[(r, c)] * pc).re;
                    }
                }
            }
            s
        };
        Self {
            a: std::array::from_fn(|i| coef(i + 1, 0)),
            b: std::array::from_fn(|j| coef(0, j + 1)),
            t: std::array::from_fn(|i| std::array::from_fn(|j| coef(i + 1, j + 1))),
        }
    }

    /// Form of the state with the qubits exchanged.
    pub fn swapped(&self) -> Self {
        Self { a: self.b, b: self.a, t: std::array::from_fn(|i| std::array::from_fn(|j| self.t[j][i])) }
    }

    pub fn local_entropy(&self, side: Subsystem) -> f64 {
        let v = match side {
            Subsystem::A => self.a,
            Subsystem::B => self.b,
        };
        qubit_entropy(norm3(v))
    }

    /// Average entropy left on the unmeasured qubit after measuring `side` along `n`.
    #[inline]
    pub fn conditional_entropy(&self, side: Subsystem, n: [f64; 3]) -> f64 {
        let (local, other) = match side {
            Subsystem::A => (self.a, self.b),
            Subsystem::B => (self.b, self.a),
        };
        let an = dot3(local, n);
        let mut tn = [0.0; 3];
        for (k, out) in tn.iter_mut().enumerate() {
            *out = match side {
                Subsystem::A => self.t[0][k] * n[0] + self.t[1][k] * n[1] + self.t[2][k] * n[2],
                Subsystem::B => self.t[k][0] * n[0] + self.t[k][1] * n[1] + self.t[k][2] * n[2],
            };
        }
        let mut s = 0.0;
        for sign in [1.0, -1.0] {
            let weight = 1.0 + sign * an;
            let p = 0.5 * weight;
            if p < BRANCH_PROBABILITY_CUTOFF {
                continue;
            }
            let v = [other[0] + sign * tn[0], other[1] + sign * tn[1], other[2] + sign * tn[2]];
            s += p * qubit_entropy(norm3(v) / weight);
        }
        s
    }
}

#[inline]
fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

fn joint_entropy(m: &ComplexMatrix) -> f64 {
    let mut ev = hermitian_eigen(m).map(|e| e.values).unwrap_or_else(|_| vec![0.25; 4]);
    for l in ev.iter_mut() {
        if *l < 0.0 {
            *l = 0.0;
        }
    }
    let total: f64 = ev.iter().sum();
    let ev: Vec<f64> = ev.iter().map(|l| l / total).collect();
    shannon_entropy(&ev)
}

/// `I = S[rho_A] + S[rho_B] - S[rho_AB]`.
pub fn mutual_information(rho: &DensityMatrix) -> f64 {
    let form = CorrelationForm::from_matrix(rho.matrix());
    form.local_entropy(Subsystem::A) + form.local_entropy(Subsystem::B) - joint_entropy(rho.matrix())
}

/// `sum_k p_k S[rho_other^k]` after measuring `side` with `m`.
pub fn conditional_entropy_after_measurement(
    rho: &DensityMatrix,
    side: Subsystem,
    m: &ProjectiveMeasurement,
) -> f64 {
    CorrelationForm::from_matrix(rho.matrix()).conditional_entropy(side, m.direction())
}

/// Minimized conditional entropy for one measured side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementMinimum {
    pub conditional_entropy: f64,
    pub measurement: ProjectiveMeasurement,
    pub evaluations: usize,
}

/// Minimizes the post-measurement conditional entropy over projective
/// measurements on `side`. The returned value never exceeds the value at any
/// grid point.
pub fn minimize_conditional_entropy(
    form: &CorrelationForm,
    side: Subsystem,
    settings: &DiscordSettings,
) -> MeasurementMinimum {
    let objective = |m: &ProjectiveMeasurement| form.conditional_entropy(side, m.direction());
    let mut evaluations = 0usize;
    let starts = settings.refine_starts;
    // best `starts` grid points, ties broken by grid order
    let mut best: Vec<(f64, ProjectiveMeasurement)> = Vec::with_capacity(starts + 1);
    let mut overall = (f64::INFINITY, ProjectiveMeasurement::z());
    for m in settings.grid() {
        let v = objective(&m);
        evaluations += 1;
        if v < overall.0 {
            overall = (v, m);
        }
        if starts > 0 && (best.len() < starts || v < best[best.len() - 1].0) {
            let pos = best.iter().position(|(bv, _)| v < *bv).unwrap_or(best.len());
            best.insert(pos, (v, m));
            best.truncate(starts);
        }
    }

    if starts > 0 {
        let opts = NelderMeadOptions {
            initial_step: 0.5 * FRAC_PI_2 / settings.theta_steps.max(1) as f64,
            diameter_tol: settings.refine_tol,
            max_evaluations: settings.refine_max_evals,
        };
        for (_, start) in best {
            let res = nelder_mead(
                |x| objective(&ProjectiveMeasurement::new(x[0], x[1])),
                &[start.theta, start.phi],
                &opts,
            );
            evaluations += res.evaluations;
            if res.value < overall.0 {
                overall = (res.value, ProjectiveMeasurement::new(res.x[0], res.x[1]).normalized());
            }
        }
    }
    MeasurementMinimum { conditional_entropy: overall.0, measurement: overall.1, evaluations }
}

/// Classical correlation with one qubit measured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalCorrelation {
    pub value: f64,
    pub measured: Subsystem,
    pub minimum: MeasurementMinimum,
}

pub fn classical_correlation(rho: &DensityMatrix, measured: Subsystem) -> ClassicalCorrelation {
    classical_correlation_with(rho, measured, &DiscordSettings::default())
}

pub fn classical_correlation_with(
    rho: &DensityMatrix,
    measured: Subsystem,
    settings: &DiscordSettings,
) -> ClassicalCorrelation {
    let form = CorrelationForm::from_matrix(rho.matrix());
    let minimum = minimize_conditional_entropy(&form, measured, settings);
    ClassicalCorrelation {
        value: form.local_entropy(measured.other()) - minimum.conditional_entropy,
        measured,
        minimum,
    }
}

/// Full discord breakdown of a two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscordReport {
    pub mutual_information: f64,
    /// `C^{AB}`: qubit A measured.
    pub classical_ab: f64,
    /// `C^{BA}`: qubit B measured.
    pub classical_ba: f64,
    pub discord_ab: f64,
    pub discord_ba: f64,
    /// `(discord_ab + discord_ba) / 2`.
    pub symmetric: f64,
    pub measurement_ab: ProjectiveMeasurement,
    pub measurement_ba: ProjectiveMeasurement,
}

pub fn discord(rho: &DensityMatrix) -> DiscordReport {
    discord_with(rho, &DiscordSettings::default())
}

pub fn discord_with(rho: &DensityMatrix, settings: &DiscordSettings) -> DiscordReport {
    discord_of_matrix(rho.matrix(), settings)
}

pub(crate) fn discord_of_matrix(m: &ComplexMatrix, settings: &DiscordSettings) -> DiscordReport {
    discord_with_joint_entropy(m, joint_entropy(m), settings)
}

/// Discord of `m` when `S[rho_AB]` is already known, e.g. from the spectrum
/// of a unitarily evolved state.
pub(crate) fn discord_with_joint_entropy(m: &ComplexMatrix, s_ab: f64, settings: &DiscordSettings) -> DiscordReport {
    let form = CorrelationForm::from_matrix(m);
    let s_a = form.local_entropy(Subsystem::A);
    let s_b = form.local_entropy(Subsystem::B);
    let mutual = s_a + s_b - s_ab;
    let min_ab = minimize_conditional_entropy(&form, Subsystem::A, settings);
    let min_ba = minimize_conditional_entropy(&form, Subsystem::B, settings);
    let classical_ab = s_b - min_ab.conditional_entropy;
    let classical_ba = s_a - min_ba.conditional_entropy;
    let discord_ab = mutual - classical_ab;
    let discord_ba = mutual - classical_ba;
    DiscordReport {
        mutual_information: mutual,
        classical_ab,
        classical_ba,
        discord_ab,
        discord_ba,
        symmetric: 0.5 * (discord_ab + discord_ba),
        measurement_ab: min_ab.measurement,
        measurement_ba: min_ba.measurement,
    }
}

/// Symmetric discord only.
pub fn symmetric_discord(rho: &DensityMatrix, settings: &DiscordSettings) -> f64 {
    discord_of_matrix(rho.matrix(), settings).symmetric
}

/// Wootters concurrence `max(0, l1 - l2 - l3 - l4)` with `l_i` the
/// descending square roots of the spectrum of `sqrt(rho) rho~ sqrt(rho)`,
/// `rho~ = (Y⊗Y) rho* (Y⊗Y)`.
pub fn concurrence(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let yy = tensor(&pauli::y(), &pauli::y()).unwrap();
    let flipped = yy * m.conj() * yy;
    let eig = hermitian_eigen(m).expect("density matrix is Hermitian");
    let roots: Vec<f64> = eig.values.iter().map(|l| l.max(0.0).sqrt()).collect();
    let sqrt_rho = eig.vectors * ComplexMatrix::diagonal(&roots).unwrap() * eig.vectors.adjoint();
    let r = sqrt_rho * flipped * sqrt_rho;
    let r = ComplexMatrix::from_fn(4, |i, j| (r[(i, j)] + r[(j, i)].conj()) * 0.5).unwrap();
    let mut l: Vec<f64> = hermitian_eigen(&r).expect("Hermitian by construction").values;
    for v in l.iter_mut() {
        *v = v.max(0.0).sqrt();
    }
    (l[0] - l[1] - l[2] - l[3]).max(0.0).min(1.0)
}
