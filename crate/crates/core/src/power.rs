//! Discording power: the largest symmetric discord a Cartan kernel produces
//! from classical-classical states of a fixed purity.
//!
//! The search runs in stages over candidate states
//! `U_c (K_A⊗K_B) diag(p) (K_A⊗K_B)† U_c†`:
//!
//! 1. every probability assignment in the logical basis,
//! 2. the best few assignments against every pair of grid bases,
//! 3. the best few basis pairs against every assignment,
//!
//! all ranked with cheap screening discord. The best candidates are then
//! re-scored with full discord settings and optionally polished by
//! Nelder-Mead, first over the four basis angles and then over the angles and
//! the probability vector on its purity sphere.

use std::cmp::Ordering;
use std::f64::consts::{FRAC_PI_4, PI};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discord::{concurrence, discord_with_joint_entropy, DiscordSettings};
use crate::error::{Error, Result};
use crate::gates::{canonical_coordinates, cartan_kernel, CartanCoordinates};
use crate::linalg::{c64, tensor, ComplexMatrix};
use crate::mdms::best_rank3;
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::states::{classical_from_frame, qubit_basis, shannon_entropy, ClassicalStateSpec, DensityMatrix};

/// Frobenius residual below which a classical preimage counts as found.
pub const PREIMAGE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSearchConfig {
    /// Purity `mu = sum p^2` of the input classical states.
    pub purity: f64,
    /// Step of the basis-angle grid; must divide `pi`.
    pub angle_step: f64,
    /// Number of probability spectra, extremal patterns included.
    pub prob_samples: usize,
    pub refine: bool,
    pub seed: u64,
    /// Assignments carried from stage 1 into the basis scan, one per
    /// relabelling orbit.
    pub top_assignments: usize,
    /// Basis pairs carried from stage 2 into the assignment scan.
    pub top_bases: usize,
    /// Candidates re-scored with full discord settings.
    pub finalists: usize,
    /// Finalists polished by Nelder-Mead when `refine` is set.
    pub refine_starts: usize,
    /// Extra polish starts taken from distinct local maxima of the basis scan.
    pub basin_starts: usize,
    pub refine_max_evals: usize,
    pub screening: DiscordSettings,
    pub discord: DiscordSettings,
}

impl PowerSearchConfig {
    /// Desk-scale defaults, roughly `10^5` candidate states per call.
    pub fn new(purity: f64) -> Self {
        Self {
            purity,
            angle_step: 0.1 * PI,
            prob_samples: 500,
            refine: true,
            seed: 0,
            top_assignments: 3,
            top_bases: 2,
            finalists: 16,
            refine_starts: 4,
            basin_starts: 4,
            refine_max_evals: 400,
            screening: DiscordSettings::screening(),
            discord: DiscordSettings::default(),
        }
    }

    /// Large preset of roughly `8·10^6` screened candidates.
    pub fn full(purity: f64) -> Self {
        Self { top_assignments: 240, top_bases: 64, finalists: 64, refine_starts: 16, basin_starts: 16, ..Self::new(purity) }
    }

    /// Nominal number of screened candidates, counting 24 assignments per spectrum.
    pub fn candidate_budget(&self) -> usize {
        let dirs = basis_directions(self.angle_step).len();
        let assigns = 24 * self.prob_samples;
        assigns * (1 + self.top_bases) + self.top_assignments * dirs * dirs
    }

    pub fn with_purity(&self, purity: f64) -> Self {
        Self { purity, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.25..=1.0).contains(&self.purity) {
            return Err(Error::OutOfRange(format!("purity {} outside [1/4, 1]", self.purity)));
        }
        let cells = PI / self.angle_step;
        if !(self.angle_step > 0.0 && self.angle_step <= PI) || (cells - cells.round()).abs() > 1e-9 {
            return Err(Error::OutOfRange(format!("angle step {} does not divide pi", self.angle_step)));
        }
        let counts = [
            ("prob_samples", self.prob_samples),
            ("top_assignments", self.top_assignments),
            ("top_bases", self.top_bases),
            ("finalists", self.finalists),
        ];
        for (name, n) in counts {
            if n == 0 {
                return Err(Error::OutOfRange(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }
}

/// Outcome of a discording-power search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerResult {
    pub coords: CartanCoordinates,
    pub purity: f64,
    /// Discording power in bits.
    pub dp: f64,
    /// Probabilities `p_{rs}` of the achieving classical state, index `2r + s`.
    pub probs: [f64; 4],
    /// Bloch angles `[theta_a, phi_a, theta_b, phi_b]` of the achieving bases.
    pub angles: [f64; 4],
    /// Candidate states evaluated, screening and refinement included.
    pub evaluations: usize,
}

impl PowerResult {
    pub fn spec(&self) -> ClassicalStateSpec {
        ClassicalStateSpec::from_angles(self.probs, self.angles).expect("stored spec is valid")
    }

    /// Re-evaluates the achieving state with `settings`.
    pub fn replay(&self, settings: &DiscordSettings) -> f64 {
        evaluate_spec(&self.coords, &self.spec(), settings)
    }
}

/// Symmetric discord of `U_c rho_cl U_c†`, clamped at zero.
pub fn evaluate_spec(coords: &CartanCoordinates, spec: &ClassicalStateSpec, settings: &DiscordSettings) -> f64 {
    let kernel = cartan_kernel(coords);
    evaluate(&kernel, &spec.probs, &spec.basis_a, &spec.basis_b, settings)
}

fn evaluate(
    kernel: &ComplexMatrix,
    probs: &[f64; 4],
    basis_a: &ComplexMatrix,
    basis_b: &ComplexMatrix,
    settings: &DiscordSettings,
) -> f64 {
    let frame = *kernel * tensor(basis_a, basis_b).unwrap();
    let m = classical_from_frame(probs, &frame);
    discord_with_joint_entropy(&m, shannon_entropy(probs), settings).symmetric.max(0.0)
}

/// Bloch directions `(theta, phi)` on a grid of spacing `step`, each pole once.
pub fn basis_directions(step: f64) -> Vec<(f64, f64)> {
    let n_theta = (PI / step).round().max(1.0) as usize;
    let n_phi = 2 * n_theta;
    let mut dirs = vec![(0.0, 0.0)];
    for i in 1..n_theta {
        for j in 0..n_phi {
            dirs.push((i as f64 * step, j as f64 * step));
        }
    }
    dirs.push((PI, 0.0));
    dirs
}

/// Deterministic spectra at purity `mu`: two-level, three-level with a
/// repeated entry, `(x, x, y, y)`, both Werner spectra, and the best
/// rank-3 family spectrum when one exists. Sorted descending.
pub fn extremal_spectra(mu: f64) -> Vec<[f64; 4]> {
    let mut out = Vec::new();
    if mu >= 0.5 {
        let x = (1.0 + (2.0 * mu - 1.0).max(0.0).sqrt()) / 2.0;
        out.push([x, 1.0 - x, 0.0, 0.0]);
    }
    if mu >= 1.0 / 3.0 {
        // (1 - 2y, y, y, 0): 6y^2 - 4y + 1 - mu = 0
        let r = (6.0 * mu - 2.0).max(0.0).sqrt();
        for y in [(2.0 - r) / 6.0, (2.0 + r) / 6.0] {
            if (0.0..=0.5).contains(&y) {
                out.push([1.0 - 2.0 * y, y, y, 0.0]);
            }
        }
    }
    if mu <= 0.5 {
        let e = (mu - 0.25).max(0.0).sqrt() / 2.0;
        out.push([0.25 + e, 0.25 + e, 0.25 - e, 0.25 - e]);
    }
    let w = ((4.0 * mu - 1.0).max(0.0) / 3.0).sqrt();
    for w in [w, -w] {
        if w >= -1.0 / 3.0 {
            out.push([(1.0 + 3.0 * w) / 4.0, (1.0 - w) / 4.0, (1.0 - w) / 4.0, (1.0 - w) / 4.0]);
        }
    }
    if let Some((_, a, b)) = best_rank3(mu, &DiscordSettings::default()) {
        out.push([(1.0 - a + b) / 2.0, 0.0, a, (1.0 - a - b) / 2.0]);
    }
    out.into_iter().map(|p| sorted_desc(clean(p))).collect()
}

/// Uniformly oriented spectra at purity `mu`: a Dirichlet(1,1,1,1) point
/// `x` fixes the ray `u + t (x - u)` from the uniform distribution `u`,
/// and `t` is chosen so that `sum p^2 = mu`. Rays that leave the simplex
/// first are rejected; after `100 * count` attempts the sampler gives up.
pub fn sample_spectra(mu: f64, count: usize, rng: &mut ChaCha8Rng) -> Vec<[f64; 4]> {
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count && attempts < 100 * count.max(1) {
        attempts += 1;
        let g: [f64; 4] = std::array::from_fn(|_| Exp1.sample(rng));
        let total: f64 = g.iter().sum();
        let d: [f64; 4] = std::array::from_fn(|k| g[k] / total - 0.25);
        let d2: f64 = d.iter().map(|x| x * x).sum();
        if d2 == 0.0 {
            continue;
        }
        let t = ((mu - 0.25) / d2).sqrt();
        let p: [f64; 4] = std::array::from_fn(|k| 0.25 + t * d[k]);
        if p.iter().all(|&x| x >= -1e-12) {
            out.push(sorted_desc(clean(p)));
        }
    }
    out
}

/// The spectra used for a search: extremal patterns first, then random
/// samples up to `count` in total, duplicates removed.
pub fn probability_spectra(mu: f64, count: usize, seed: u64) -> Vec<[f64; 4]> {
    let mut spectra = extremal_spectra(mu);
    spectra.truncate(count);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let missing = count - spectra.len();
    spectra.extend(sample_spectra(mu, missing, &mut rng));
    dedup_exact(spectra)
}

/// All distinct orderings of each spectrum over the four basis slots.
pub fn assignments(spectra: &[[f64; 4]]) -> Vec<[f64; 4]> {
    let mut out = Vec::with_capacity(24 * spectra.len());
    for p in spectra {
        for perm in PERMUTATIONS {
            out.push(perm.map(|k| p[k]));
        }
    }
    dedup_exact(out)
}

const PERMUTATIONS: [[usize; 4]; 24] = [
    [0, 1, 2, 3], [0, 1, 3, 2], [0, 2, 1, 3], [0, 2, 3, 1], [0, 3, 1, 2], [0, 3, 2, 1],
    [1, 0, 2, 3], [1, 0, 3, 2], [1, 2, 0, 3], [1, 2, 3, 0], [1, 3, 0, 2], [1, 3, 2, 0],
    [2, 0, 1, 3], [2, 0, 3, 1], [2, 1, 0, 3], [2, 1, 3, 0], [2, 3, 0, 1], [2, 3, 1, 0],
    [3, 0, 1, 2], [3, 0, 2, 1], [3, 1, 0, 2], [3, 1, 2, 0], [3, 2, 0, 1], [3, 2, 1, 0],
];

fn dedup_exact(v: Vec<[f64; 4]>) -> Vec<[f64; 4]> {
    let mut seen = std::collections::HashSet::new();
    v.into_iter().filter(|p| seen.insert(p.map(f64::to_bits))).collect()
}

fn sorted_desc(mut p: [f64; 4]) -> [f64; 4] {
    p.sort_by(|a, b| b.total_cmp(a));
    p
}

/// Clips round-off negatives and renormalizes.
fn clean(p: [f64; 4]) -> [f64; 4] {
    let p = p.map(|x| x.max(0.0));
    let total: f64 = p.iter().sum();
    p.map(|x| x / total)
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    value: f64,
    probs: [f64; 4],
    angles: [f64; 4],
}

impl Candidate {
    /// Larger value first, then lexicographic on probabilities and angles.
    fn rank(&self, other: &Self) -> Ordering {
        other
            .value
            .total_cmp(&self.value)
            .then_with(|| cmp_slices(&self.probs, &other.probs))
            .then_with(|| cmp_slices(&self.angles, &other.angles))
    }

    fn same_state(&self, other: &Self) -> bool {
        self.probs == other.probs && self.angles == other.angles
    }
}

fn cmp_slices(a: &[f64], b: &[f64]) -> Ordering {
    a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
}

fn sort_candidates(v: &mut [Candidate]) {
    v.sort_by(Candidate::rank);
}

struct Search<'a> {
    kernel: ComplexMatrix,
    cfg: &'a PowerSearchConfig,
}

impl Search<'_> {
    fn score(&self, probs: &[f64; 4], a: &ComplexMatrix, b: &ComplexMatrix, settings: &DiscordSettings) -> f64 {
        evaluate(&self.kernel, probs, a, b, settings)
    }

    fn score_angles(&self, probs: &[f64; 4], x: &[f64], settings: &DiscordSettings) -> f64 {
        self.score(probs, &qubit_basis(x[0], x[1]), &qubit_basis(x[2], x[3]), settings)
    }

    fn run(&self) -> (Candidate, usize) {
        let cfg = self.cfg;
        let spectra = probability_spectra(cfg.purity, cfg.prob_samples, cfg.seed);
        let assigns = assignments(&spectra);
        let dirs = basis_directions(cfg.angle_step);
        let bases: Vec<ComplexMatrix> = dirs.iter().map(|&(t, p)| qubit_basis(t, p)).collect();
        let screen = &cfg.screening;
        let mut evaluations = 0usize;

        // stage 1: logical basis
        let mut stage1: Vec<Candidate> = assigns
            .par_iter()
            .map(|p| Candidate { value: self.score(p, &bases[0], &bases[0], screen), probs: *p, angles: [0.0; 4] })
            .collect();
        evaluations += stage1.len();
        sort_candidates(&mut stage1);

        // stage 2: best assignments against all basis pairs; flipping a basis
        // relabels outcomes by XOR, so one assignment per orbit suffices.
        // Every orbit of the leading spectrum goes first.
        let mut carried: Vec<(Candidate, [f64; 4])> = Vec::with_capacity(cfg.top_assignments);
        let lead = sorted_desc(stage1[0].probs);
        let leading = stage1.iter().filter(|c| sorted_desc(c.probs) == lead);
        for c in leading.chain(&stage1) {
            if carried.len() == cfg.top_assignments {
                break;
            }
            let key = flip_orbit_key(&c.probs);
            if !carried.iter().any(|(_, k)| *k == key) {
                carried.push((*c, key));
            }
        }
        let pairs = dirs.len() * dirs.len();
        let mut stage2: Vec<Candidate> = carried
            .iter()
            .map(|(c, _)| c)
            .flat_map(|c| {
                (0..pairs).into_par_iter().map(|k| {
                    let (i, j) = (k / dirs.len(), k % dirs.len());
                    Candidate {
                        value: self.score(&c.probs, &bases[i], &bases[j], screen),
                        probs: c.probs,
                        angles: [dirs[i].0, dirs[i].1, dirs[j].0, dirs[j].1],
                    }
                })
                .collect::<Vec<_>>()
            })
            .collect();
        evaluations += stage2.len();
        let basins = if cfg.refine { local_maxima(&stage2, &dirs, cfg.angle_step, cfg.basin_starts) } else { Vec::new() };
        sort_candidates(&mut stage2);

        // stage 3: best basis pairs against all assignments
        let mut top_pairs: Vec<[f64; 4]> = Vec::new();
        for c in &stage2 {
            if top_pairs.len() == cfg.top_bases {
                break;
            }
            if !top_pairs.contains(&c.angles) {
                top_pairs.push(c.angles);
            }
        }
        let mut stage3: Vec<Candidate> = top_pairs
            .iter()
            .flat_map(|angles| {
                let (a, b) = (qubit_basis(angles[0], angles[1]), qubit_basis(angles[2], angles[3]));
                assigns
                    .par_iter()
                    .map(|p| Candidate { value: self.score(p, &a, &b, screen), probs: *p, angles: *angles })
                    .collect::<Vec<_>>()
            })
            .collect();
        evaluations += stage3.len();
        sort_candidates(&mut stage3);

        // finalists, re-scored with full settings
        let mut pool: Vec<Candidate> = Vec::new();
        for stage in [&stage1, &stage2, &stage3] {
            pool.extend(stage.iter().take(cfg.finalists));
        }
        sort_candidates(&mut pool);
        let mut finalists: Vec<Candidate> = Vec::with_capacity(cfg.finalists);
        for c in pool {
            if finalists.len() == cfg.finalists {
                break;
            }
            if !finalists.iter().any(|f| f.same_state(&c)) {
                finalists.push(c);
            }
        }
        let mut finalists: Vec<Candidate> = finalists
            .par_iter()
            .map(|c| Candidate { value: self.score_angles(&c.probs, &c.angles, &cfg.discord), ..*c })
            .collect();
        evaluations += finalists.len();
        sort_candidates(&mut finalists);

        let mut best = finalists[0];
        if cfg.refine {
            let mut starts: Vec<Candidate> = finalists.iter().take(cfg.refine_starts).copied().collect();
            for b in basins {
                if !starts.iter().any(|s| s.same_state(&b)) {
                    starts.push(Candidate { value: self.score_angles(&b.probs, &b.angles, &cfg.discord), ..b });
                    evaluations += 1;
                }
            }
            let refined: Vec<(Candidate, usize)> = starts.par_iter().map(|c| self.refine(c)).collect();
            for (c, n) in refined {
                evaluations += n;
                if c.rank(&best).is_lt() {
                    best = c;
                }
            }
        }
        (best, evaluations)
    }

    /// Nelder-Mead over the basis angles, then over angles and probabilities.
    fn refine(&self, start: &Candidate) -> (Candidate, usize) {
        let cfg = self.cfg;
        let opts = NelderMeadOptions {
            initial_step: 0.5 * cfg.angle_step,
            diameter_tol: 1e-7,
            max_evaluations: cfg.refine_max_evals,
        };
        let mut best = *start;
        let probs = start.probs;
        let res = nelder_mead(|x| -self.score_angles(&probs, x, &cfg.discord), &start.angles, &opts);
        let mut evaluations = res.evaluations;
        let angles: [f64; 4] = [res.x[0], res.x[1], res.x[2], res.x[3]];
        let value = self.score_angles(&probs, &angles, &cfg.discord);
        evaluations += 1;
        let candidate = Candidate { value, probs, angles };
        if candidate.rank(&best).is_lt() {
            best = candidate;
        }

        let sphere = PuritySphere::new(cfg.purity);
        if let Some(sphere) = sphere {
            let (alpha, beta) = sphere.angles_of(&best.probs);
            let x0 = [best.angles[0], best.angles[1], best.angles[2], best.angles[3], alpha, beta];
            let objective = |x: &[f64]| match sphere.point(x[4], x[5]) {
                Some(p) => -self.score_angles(&p, x, &cfg.discord),
                None => f64::INFINITY,
            };
            let res = nelder_mead(objective, &x0, &opts);
            evaluations += res.evaluations;
            if let Some(p) = sphere.point(res.x[4], res.x[5]) {
                let angles = [res.x[0], res.x[1], res.x[2], res.x[3]];
                let value = self.score_angles(&p, &angles, &cfg.discord);
                evaluations += 1;
                let candidate = Candidate { value, probs: p, angles };
                if candidate.rank(&best).is_lt() {
                    best = candidate;
                }
            }
        }
        (best, evaluations)
    }
}

/// Smallest relabelling of `p` under `k -> k ^ g`, which is what swapping the
/// two vectors of either local basis does to the outcome labels.
fn flip_orbit_key(p: &[f64; 4]) -> [f64; 4] {
    (0..4)
        .map(|g| std::array::from_fn(|k| p[k ^ g]))
        .min_by(|a: &[f64; 4], b: &[f64; 4]| cmp_slices(a, b))
        .expect("four relabellings")
}

/// Best `count` basis-scan candidates that beat every grid neighbour of
/// either basis direction, one per distinct screening value so that
/// relabelled copies of a basin are skipped. `scan` holds consecutive blocks
/// of `dirs.len()^2` pairs, one block per assignment.
fn local_maxima(scan: &[Candidate], dirs: &[(f64, f64)], step: f64, count: usize) -> Vec<Candidate> {
    let bloch: Vec<[f64; 3]> = dirs.iter().map(|&(t, p)| [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()]).collect();
    let reach = (1.5 * step).cos();
    let neighbours: Vec<Vec<usize>> = bloch
        .iter()
        .enumerate()
        .map(|(i, a)| {
            (0..bloch.len())
                .filter(|&j| j != i && a.iter().zip(&bloch[j]).map(|(x, y)| x * y).sum::<f64>() >= reach)
                .collect()
        })
        .collect();
    let n = dirs.len();
    let mut maxima: Vec<Candidate> = scan
        .par_chunks(n * n)
        .flat_map_iter(|block| {
            let neighbours = &neighbours;
            (0..n * n).filter_map(move |k| {
                let (i, j) = (k / n, k % n);
                let v = block[k].value;
                let dominated = neighbours[i].iter().any(|&a| block[a * n + j].value > v)
                    || neighbours[j].iter().any(|&b| block[i * n + b].value > v);
                (!dominated).then_some(block[k])
            })
        })
        .collect();
    sort_candidates(&mut maxima);
    let mut out: Vec<Candidate> = Vec::with_capacity(count);
    for c in maxima {
        if out.len() == count {
            break;
        }
        if !out.iter().any(|o| (o.value - c.value).abs() < 1e-9) {
            out.push(c);
        }
    }
    out
}

/// Probability vectors of fixed purity written as
/// `u + r (sin a cos b e1 + sin a sin b e2 + cos a e3)` with `u` uniform and
/// `e_k` an orthonormal basis of the sum-zero hyperplane.
struct PuritySphere {
    radius: f64,
}

const SUM_ZERO_BASIS: [[f64; 4]; 3] = [[0.5, 0.5, -0.5, -0.5], [0.5, -0.5, 0.5, -0.5], [0.5, -0.5, -0.5, 0.5]];

impl PuritySphere {
    fn new(mu: f64) -> Option<Self> {
        let radius = (mu - 0.25).max(0.0).sqrt();
        (radius > 1e-9).then_some(Self { radius })
    }

    fn point(&self, alpha: f64, beta: f64) -> Option<[f64; 4]> {
        let v = [alpha.sin() * beta.cos(), alpha.sin() * beta.sin(), alpha.cos()];
        let p: [f64; 4] = std::array::from_fn(|k| {
            0.25 + self.radius * (0..3).map(|j| v[j] * SUM_ZERO_BASIS[j][k]).sum::<f64>()
        });
        if p.iter().any(|&x| x < -1e-12) {
            return None;
        }
        Some(clean(p))
    }

    fn angles_of(&self, p: &[f64; 4]) -> (f64, f64) {
        let v: [f64; 3] = std::array::from_fn(|j| (0..4).map(|k| (p[k] - 0.25) * SUM_ZERO_BASIS[j][k]).sum::<f64>() / self.radius);
        (v[2].clamp(-1.0, 1.0).acos(), v[1].atan2(v[0]))
    }
}

/// `DP_mu` of the kernel with coordinates `coords`.
pub fn discording_power(coords: &CartanCoordinates, cfg: &PowerSearchConfig) -> Result<PowerResult> {
    cfg.validate()?;
    let search = Search { kernel: cartan_kernel(coords), cfg };
    let (best, evaluations) = search.run();
    let spec = ClassicalStateSpec::from_angles(best.probs, best.angles)?;
    let dp = evaluate_spec(coords, &spec, &cfg.discord);
    Ok(PowerResult { coords: *coords, purity: cfg.purity, dp, probs: best.probs, angles: best.angles, evaluations })
}

/// `DP_mu` of an arbitrary two-qubit unitary, through its canonical coordinates.
pub fn discording_power_of_unitary(u: &ComplexMatrix, cfg: &PowerSearchConfig) -> Result<PowerResult> {
    discording_power(&canonical_coordinates(u)?, cfg)
}

/// One search per purity in `mu_grid`, all other settings shared.
pub fn power_curve(coords: &CartanCoordinates, mu_grid: &[f64], cfg: &PowerSearchConfig) -> Result<Vec<PowerResult>> {
    for &mu in mu_grid {
        cfg.with_purity(mu).validate()?;
    }
    mu_grid.iter().map(|&mu| discording_power(coords, &cfg.with_purity(mu))).collect()
}

/// One-parameter gate families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateFamily {
    /// `(alpha, 0, 0)`
    SingleAxis,
    /// `(alpha, alpha, 0)`
    DoubleAxis,
}

impl GateFamily {
    pub fn coords(&self, alpha: f64) -> CartanCoordinates {
        match self {
            GateFamily::SingleAxis => CartanCoordinates::new(alpha, 0.0, 0.0),
            GateFamily::DoubleAxis => CartanCoordinates::new(alpha, alpha, 0.0),
        }
    }
}

/// `(alpha, DP)` along a gate family at the purity of `cfg`.
pub fn angle_sweep(family: GateFamily, alphas: &[f64], cfg: &PowerSearchConfig) -> Result<Vec<(f64, PowerResult)>> {
    if let Some(a) = alphas.iter().find(|a| !(-1e-12..=FRAC_PI_4 + 1e-12).contains(*a)) {
        return Err(Error::OutOfRange(format!("angle {a} outside [0, pi/4]")));
    }
    alphas.iter().map(|&a| Ok((a, discording_power(&family.coords(a), cfg)?))).collect()
}

/// Result of looking for a classical state that a kernel maps onto a target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PreimageWitness {
    Found {
        probs: [f64; 4],
        angles: [f64; 4],
        residual: f64,
    },
    NotFound {
        /// Smallest Frobenius distance to a classical state reached by the search.
        best_residual: f64,
        /// Smallest concurrence of `U†(V⊗W) target (V⊗W)†U` over the sampled locals.
        min_concurrence: f64,
    },
}

/// Searches local bases `K_A⊗K_B` that diagonalize `U_c† target U_c`. On
/// failure the minimum concurrence over local rotations of the target serves
/// as an entanglement witness: a positive value rules out a classical
/// preimage up to the resolution of the search.
pub fn preimage_witness(coords: &CartanCoordinates, target: &DensityMatrix, angle_step: f64) -> Result<PreimageWitness> {
    let u = cartan_kernel(coords);
    let sigma = target.matrix().conjugate_by(&u.adjoint())?;
    let off_diagonal = |x: &[f64]| -> f64 {
        let frame = tensor(&qubit_basis(x[0], x[1]), &qubit_basis(x[2], x[3])).unwrap();
        let d = frame.adjoint() * sigma * frame;
        let mut s = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    s += d[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };
    let dirs = basis_directions(angle_step);
    let mut grid: Vec<(f64, [f64; 4])> = (0..dirs.len() * dirs.len())
        .into_par_iter()
        .map(|k| {
            let (a, b) = (dirs[k / dirs.len()], dirs[k % dirs.len()]);
            let x = [a.0, a.1, b.0, b.1];
            (off_diagonal(&x), x)
        })
        .collect();
    grid.sort_by(|p, q| p.0.total_cmp(&q.0).then_with(|| cmp_slices(&p.1, &q.1)));
    let opts = NelderMeadOptions { initial_step: 0.25 * angle_step, diameter_tol: 1e-12, max_evaluations: 4000 };
    let mut best = grid[0];
    for (_, x0) in grid.iter().take(4) {
        let res = nelder_mead(off_diagonal, x0, &opts);
        if res.value < best.0 {
            best = (res.value, [res.x[0], res.x[1], res.x[2], res.x[3]]);
        }
    }

    if best.0 <= PREIMAGE_TOL {
        let x = best.1;
        let frame = tensor(&qubit_basis(x[0], x[1]), &qubit_basis(x[2], x[3]))?;
        let d = frame.adjoint() * sigma * frame;
        let probs = clean(std::array::from_fn(|k| d[(k, k)].re));
        return Ok(PreimageWitness::Found { probs, angles: x, residual: best.0 });
    }
    Ok(PreimageWitness::NotFound { best_residual: best.0, min_concurrence: min_local_concurrence(&u, target)? })
}

/// `min_{V,W} C(U†(V⊗W) rho (V⊗W)†U)` from a `pi/4` grid over both local
/// unitaries followed by Nelder-Mead.
fn min_local_concurrence(u: &ComplexMatrix, rho: &DensityMatrix) -> Result<f64> {
    let local = |t: f64, p: f64, chi: f64| {
        qubit_basis(t, p) * ComplexMatrix::from_rows(&[[c64(1.0, 0.0), c64(0.0, 0.0)], [c64(0.0, 0.0), c64(chi.cos(), chi.sin())]]).unwrap()
    };
    let ud = u.adjoint();
    let objective = |x: &[f64]| -> f64 {
        let l = tensor(&local(x[0], x[1], x[2]), &local(x[3], x[4], x[5])).unwrap();
        let w = ud * l;
        let m = rho.matrix().conjugate_by(&w).unwrap();
        concurrence(&DensityMatrix::new_unchecked(m))
    };
    let step = FRAC_PI_4;
    let singles: Vec<[f64; 3]> = basis_directions(step)
        .into_iter()
        .flat_map(|(t, p)| (0..8).map(move |k| [t, p, k as f64 * step]))
        .collect();
    let mut grid: Vec<(f64, [f64; 6])> = (0..singles.len() * singles.len())
        .into_par_iter()
        .map(|k| {
            let (a, b) = (singles[k / singles.len()], singles[k % singles.len()]);
            let x = [a[0], a[1], a[2], b[0], b[1], b[2]];
            (objective(&x), x)
        })
        .collect();
    grid.sort_by(|p, q| p.0.total_cmp(&q.0).then_with(|| cmp_slices(&p.1, &q.1)));
    let opts = NelderMeadOptions { initial_step: 0.25 * step, diameter_tol: 1e-8, max_evaluations: 1500 };
    let mut best = grid[0].0;
    for (_, x0) in grid.iter().take(4) {
        best = best.min(nelder_mead(objective, x0, &opts).value);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discord::discord;
    use crate::gates::CartanGate;
    use crate::mdms::{rank_family, werner, BellState};
    use crate::states::make_classical;

    #[test]
    fn flip_orbits() {
        let (x, y) = (0.8, 0.2);
        let key = flip_orbit_key(&[0.0, x, y, 0.0]);
        assert_eq!(key, flip_orbit_key(&[x, 0.0, 0.0, y]));
        assert_eq!(key, flip_orbit_key(&[0.0, y, x, 0.0]));
        assert_ne!(key, flip_orbit_key(&[x, y, 0.0, 0.0]));
        assert_ne!(key, flip_orbit_key(&[x, 0.0, y, 0.0]));
        let orbits: std::collections::BTreeSet<[u64; 4]> = assignments(&[[0.4, 0.3, 0.2, 0.1]])
            .iter()
            .map(|p| flip_orbit_key(p).map(f64::to_bits))
            .collect();
        assert_eq!(orbits.len(), 6);
    }

    fn quick(mu: f64) -> PowerSearchConfig {
        PowerSearchConfig {
            angle_step: 0.25 * PI,
            prob_samples: 40,
            finalists: 4,
            refine_starts: 2,
            refine_max_evals: 120,
            ..PowerSearchConfig::new(mu)
        }
    }

    #[test]
    fn config_validation() {
        assert!(PowerSearchConfig::new(0.7).validate().is_ok());
        assert!(PowerSearchConfig::new(0.2).validate().is_err());
        assert!(PowerSearchConfig { angle_step: 0.3, ..PowerSearchConfig::new(0.7) }.validate().is_err());
        assert!(PowerSearchConfig { prob_samples: 0, ..PowerSearchConfig::new(0.7) }.validate().is_err());
    }

    #[test]
    fn direction_grid_size() {
        assert_eq!(basis_directions(0.1 * PI).len(), 9 * 20 + 2);
        assert_eq!(basis_directions(0.5 * PI).len(), 4 + 2);
    }

    #[test]
    fn spectra_have_requested_purity() {
        for mu in [0.25, 0.3, 0.5, 0.7, 0.95, 1.0] {
            let spectra = probability_spectra(mu, 60, 3);
            assert!(!spectra.is_empty());
            for p in &spectra {
                let purity: f64 = p.iter().map(|x| x * x).sum();
                assert!((purity - mu).abs() < 1e-9, "mu={mu} p={p:?}");
                assert!(p.iter().all(|&x| x >= 0.0));
                assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn extremal_patterns_present() {
        let s = extremal_spectra(0.7);
        let x = (1.0 + 0.4f64.sqrt()) / 2.0;
        assert!(s.iter().any(|p| (p[0] - x).abs() < 1e-12 && p[2] == 0.0));
        let s = extremal_spectra(1.0 / 3.0);
        assert!(s.iter().any(|p| p.iter().zip([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0]).all(|(a, b)| (a - b).abs() < 1e-9)));
    }

    #[test]
    fn permutations_are_distinct() {
        assert_eq!(assignments(&[[0.4, 0.3, 0.2, 0.1]]).len(), 24);
        assert_eq!(assignments(&[[0.5, 0.5, 0.0, 0.0]]).len(), 6);
        assert_eq!(assignments(&[[0.25; 4]]).len(), 1);
    }

    #[test]
    fn purity_sphere_round_trip() {
        let sphere = PuritySphere::new(0.36).unwrap();
        let p = [0.5, 0.3, 0.1, 0.1];
        let (a, b) = sphere.angles_of(&p);
        let q = sphere.point(a, b).unwrap();
        assert!(p.iter().zip(q).all(|(x, y)| (x - y).abs() < 1e-12), "{q:?}");
    }

    #[test]
    fn identity_gate_has_no_power() {
        let r = discording_power(&CartanCoordinates::new(0.0, 0.0, 0.0), &quick(0.7)).unwrap();
        assert!(r.dp < 1e-6, "{r:?}");
    }

    #[test]
    fn replay_is_exact() {
        let coords = CartanCoordinates::new(PI / 8.0, PI / 8.0, 0.0);
        let cfg = quick(0.6);
        let r = discording_power(&coords, &cfg).unwrap();
        assert_eq!(r.replay(&cfg.discord), r.dp);
        let rho = CartanGate::kernel(coords).apply(&make_classical(&r.spec()));
        assert!((discord(&rho).symmetric - r.dp).abs() < 1e-9);
        assert!((r.spec().purity() - 0.6).abs() < 1e-9);
    }

    #[test]
    fn seeded_runs_repeat() {
        let coords = CartanCoordinates::new(0.3, 0.1, 0.05);
        let cfg = PowerSearchConfig { seed: 11, ..quick(0.5) };
        let a = discording_power(&coords, &cfg).unwrap();
        let b = discording_power(&coords, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn refinement_never_lowers_power() {
        let coords = CartanCoordinates::new(0.5, 0.2, 0.0);
        let cfg = quick(0.55);
        let off = discording_power(&coords, &PowerSearchConfig { refine: false, ..cfg }).unwrap();
        let on = discording_power(&coords, &cfg).unwrap();
        assert!(on.dp >= off.dp - 1e-9, "{} < {}", on.dp, off.dp);
    }

    #[test]
    fn preimage_of_rank3_target() {
        let coords = CartanCoordinates::new(PI / 8.0, PI / 8.0, 0.0);
        let target = rank_family(0.7, 0.3, PI / 2.0).unwrap();
        match preimage_witness(&coords, &target, 0.1 * PI).unwrap() {
            PreimageWitness::Found { probs, residual, .. } => {
                assert!(residual < 1e-6);
                let mut got = probs;
                got.sort_by(|a, b| b.total_cmp(a));
                let want = [0.7, 0.3, 0.0, 0.0];
                assert!(got.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-6), "{probs:?}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn preimage_of_werner_target() {
        let coords = CartanCoordinates::new(FRAC_PI_4, 0.0, 0.0);
        let target = werner(-1.0 / 3.0, BellState::PhiPlusI).unwrap();
        match preimage_witness(&coords, &target, 0.1 * PI).unwrap() {
            PreimageWitness::Found { probs, .. } => {
                let mut got = probs;
                got.sort_by(|a, b| b.total_cmp(a));
                let t = 1.0 / 3.0;
                assert!(got.iter().zip([t, t, t, 0.0]).all(|(a, b)| (a - b).abs() < 1e-6), "{probs:?}");
            }
            other => panic!("{other:?}"),
        }
    }
}
