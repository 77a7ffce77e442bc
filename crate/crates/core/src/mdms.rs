//! Maximally discordant mixed states: the Werner and `rho(a, b, phi)`
//! families, and the upper boundary `delta_max(mu)` of symmetric discord at
//! fixed purity.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discord::{symmetric_discord, DiscordSettings};
use crate::error::{Error, Result};
use crate::linalg::{c64, Complex64, ComplexMatrix};
use crate::optimize::golden_section;
use crate::states::{ClassicalStateSpec, DensityMatrix};

const PARAM_TOL: f64 = 1e-12;
/// Scan resolution of the rank-3 search in `a`.
pub const RANK3_SCAN_STEP: f64 = 1e-3;

/// Maximally entangled two-qubit states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellState {
    /// `(|00> + |11>)/sqrt2`
    PhiPlus,
    /// `(|00> - |11>)/sqrt2`
    PhiMinus,
    /// `(|01> + |10>)/sqrt2`
    PsiPlus,
    /// `(|01> - |10>)/sqrt2`
    PsiMinus,
    /// `(|00> + i|11>)/sqrt2`
    PhiPlusI,
    /// `(|01> + i|10>)/sqrt2`
    PsiPlusI,
    /// `(|01> - i|10>)/sqrt2`
    PsiMinusI,
}

impl BellState {
    pub fn vector(&self) -> [Complex64; 4] {
        let s = FRAC_1_SQRT_2;
        let o = c64(0.0, 0.0);
        let r = c64(s, 0.0);
        let i = c64(0.0, s);
        match self {
            BellState::PhiPlus => [r, o, o, r],
            BellState::PhiMinus => [r, o, o, -r],
            BellState::PsiPlus => [o, r, r, o],
            BellState::PsiMinus => [o, r, -r, o],
            BellState::PhiPlusI => [r, o, o, i],
            BellState::PsiPlusI => [o, r, i, o],
            BellState::PsiMinusI => [o, r, -i, o],
        }
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::projector(&self.vector()).unwrap()
    }
}

/// `(1-w)/4 I + w |psi><psi|` for `w in [-1/3, 1]`.
pub fn werner(w: f64, bell: BellState) -> Result<DensityMatrix> {
    if !(-1.0 / 3.0 - PARAM_TOL..=1.0 + PARAM_TOL).contains(&w) {
        return Err(Error::OutOfRange(format!("Werner parameter {w} outside [-1/3, 1]")));
    }
    let m = ComplexMatrix::identity(4)?.scale_real((1.0 - w) / 4.0) + bell.projector().scale_real(w);
    DensityMatrix::new(m)
}

/// Purity of a Werner state, `(1 + 3w^2)/4`.
pub fn werner_purity(w: f64) -> f64 {
    (1.0 + 3.0 * w * w) / 4.0
}

/// Negative Werner parameter with purity `mu`, `-sqrt((4mu - 1)/3)`; defined for `mu in [1/4, 1/3]`.
pub fn werner_boundary_parameter(mu: f64) -> Result<f64> {
    if !(0.25 - PARAM_TOL..=1.0 / 3.0 + PARAM_TOL).contains(&mu) {
        return Err(Error::OutOfRange(format!("purity {mu} outside the Werner branch [1/4, 1/3]")));
    }
    Ok(-((4.0 * mu - 1.0).max(0.0) / 3.0).sqrt())
}

/// The family
/// ```text
///            | 1-a+b   0       0        0     |
/// rho = 1/2  | 0       a       a e^-ip  0     |
///            | 0       a e^ip  a        0     |
///            | 0       0       0        1-a-b |
/// ```
/// with `a in [0, 1]`, `|b| <= 1 - a`.
pub fn rank_family(a: f64, b: f64, phi: f64) -> Result<DensityMatrix> {
    check_family(a, b)?;
    let mut m = ComplexMatrix::zeros(4)?;
    m[(0, 0)] = c64((1.0 - a + b) / 2.0, 0.0);
    m[(1, 1)] = c64(a / 2.0, 0.0);
    m[(2, 2)] = c64(a / 2.0, 0.0);
    m[(1, 2)] = Complex64::from_polar(a / 2.0, -phi);
    m[(2, 1)] = Complex64::from_polar(a / 2.0, phi);
    m[(3, 3)] = c64(((1.0 - a - b) / 2.0).max(0.0), 0.0);
    DensityMatrix::new(m)
}

fn check_family(a: f64, b: f64) -> Result<()> {
    if !(-PARAM_TOL..=1.0 + PARAM_TOL).contains(&a) || b.abs() > 1.0 - a + PARAM_TOL {
        return Err(Error::OutOfRange(format!("need a in [0,1] and |b| <= 1-a, got a={a}, b={b}")));
    }
    Ok(())
}

/// `((1-a)^2 + b^2)/2 + a^2`.
pub fn rank_family_purity(a: f64, b: f64) -> f64 {
    ((1.0 - a).powi(2) + b * b) / 2.0 + a * a
}

/// `a(mu) = (1 + sqrt(2mu - 1))/2`, the rank-2 member (`b = 1 - a`, `a >= 1/2`) with purity `mu >= 1/2`.
pub fn rank2_parameter(mu: f64) -> Result<f64> {
    if !(0.5 - PARAM_TOL..=1.0 + PARAM_TOL).contains(&mu) {
        return Err(Error::OutOfRange(format!("purity {mu} outside the rank-2 range [1/2, 1]")));
    }
    Ok((1.0 + (2.0 * mu - 1.0).max(0.0).sqrt()) / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    R4,
    R3,
    R2,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::R4 => "R4",
            Branch::R3 => "R3",
            Branch::R2 => "R2",
        })
    }
}

/// One point of the discord-purity boundary and the state attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub mu: f64,
    pub delta_max: f64,
    pub branch: Branch,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub w: Option<f64>,
}

impl BoundaryPoint {
    /// The boundary state itself (with `phi = 0`, Werner states built on `|Phi+>`).
    pub fn state(&self) -> Result<DensityMatrix> {
        match (self.w, self.a, self.b) {
            (Some(w), _, _) => werner(w, BellState::PhiPlus),
            (None, Some(a), Some(b)) => rank_family(a, b, 0.0),
            _ => Err(Error::OutOfRange("boundary point carries no state parameters".into())),
        }
    }
}

fn check_purity(mu: f64) -> Result<()> {
    if !(0.25 - PARAM_TOL..=1.0 + PARAM_TOL).contains(&mu) || !mu.is_finite() {
        return Err(Error::OutOfRange(format!("purity {mu} outside [1/4, 1]")));
    }
    Ok(())
}

/// Intervals of `a` where `rho(a, b, .)` with `b >= 0` has purity `mu`.
fn rank3_intervals(mu: f64) -> Vec<(f64, f64)> {
    // b^2 = 2(mu - a^2) - (1-a)^2 >= 0  <=>  3a^2 - 2a + 1 <= 2mu
    let disc = 6.0 * mu - 2.0;
    if disc < 0.0 {
        return Vec::new();
    }
    let (lo, hi) = (((1.0 - disc.sqrt()) / 3.0).max(0.0), ((1.0 + disc.sqrt()) / 3.0).min(1.0));
    // b <= 1 - a  <=>  2a^2 - 2a + 1 >= mu
    if mu <= 0.5 {
        return vec![(lo, hi)];
    }
    let r = (2.0 * mu - 1.0).sqrt();
    let (gap_lo, gap_hi) = ((1.0 - r) / 2.0, (1.0 + r) / 2.0);
    [(lo, hi.min(gap_lo)), (lo.max(gap_hi), hi)].into_iter().filter(|(l, h)| h >= l).collect()
}

/// `b >= 0` completing `a` to purity `mu`, clamped onto `[0, 1 - a]`.
fn rank3_b(mu: f64, a: f64) -> f64 {
    let b2 = 2.0 * (mu - a * a) - (1.0 - a).powi(2);
    b2.max(0.0).sqrt().min(1.0 - a)
}

/// Best member of the `rho(a, b, .)` family at purity `mu`: scan `a` on a
/// [`RANK3_SCAN_STEP`] grid within each feasible interval, then golden-section
/// refinement around the best grid point. Returns `(delta, a, b)`.
pub fn best_rank3(mu: f64, settings: &DiscordSettings) -> Option<(f64, f64, f64)> {
    let eval = |a: f64| -> f64 {
        let b = rank3_b(mu, a);
        rank_family(a, b, 0.0).map(|rho| symmetric_discord(&rho, settings)).unwrap_or(f64::NEG_INFINITY)
    };
    let mut best: Option<(f64, f64, f64)> = None;
    for (lo, hi) in rank3_intervals(mu) {
        let steps = ((hi - lo) / RANK3_SCAN_STEP).ceil().max(1.0) as usize;
        let grid: Vec<f64> = (0..=steps).map(|k| lo + (hi - lo) * k as f64 / steps as f64).collect();
        let values: Vec<f64> = grid.iter().map(|&a| eval(a)).collect();
        let (k, _) = values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (k, &v)| if v > acc.1 { (k, v) } else { acc });
        let mut cand = (values[k], grid[k]);
        if steps > 1 {
            let l = grid[k.saturating_sub(1)];
            let h = grid[(k + 1).min(steps)];
            let (a, neg) = golden_section(|a| -eval(a), l, h, 1e-7);
            if -neg > cand.0 {
                cand = (-neg, a);
            }
        }
        if best.map_or(true, |(d, _, _)| cand.0 > d) {
            best = Some((cand.0, cand.1, rank3_b(mu, cand.1)));
        }
    }
    best
}

/// Largest symmetric discord at purity `mu`, taken as the pointwise maximum
/// over the Werner states (both signs of `w`), the rank-2 family and the
/// rank-3 search. Ties keep the earlier branch in that order.
pub fn boundary_point(mu: f64, settings: &DiscordSettings) -> Result<BoundaryPoint> {
    check_purity(mu)?;
    let mu = mu.clamp(0.25, 1.0);
    let mut best: Option<BoundaryPoint> = None;
    let mut offer = |p: BoundaryPoint| {
        if best.map_or(true, |b| p.delta_max > b.delta_max) {
            best = Some(p);
        }
    };
    let werner_point = |w: f64| -> Result<BoundaryPoint> {
        let delta = symmetric_discord(&werner(w, BellState::PhiPlus)?, settings);
        Ok(BoundaryPoint { mu, delta_max: delta, branch: Branch::R4, a: None, b: None, w: Some(w) })
    };

    if mu <= 1.0 / 3.0 + PARAM_TOL {
        offer(werner_point(werner_boundary_parameter(mu)?)?);
    }
    if mu >= 0.5 {
        let a = rank2_parameter(mu)?;
        let delta = symmetric_discord(&rank_family(a, 1.0 - a, 0.0)?, settings);
        offer(BoundaryPoint { mu, delta_max: delta, branch: Branch::R2, a: Some(a), b: Some(1.0 - a), w: None });
    }
    if let Some((delta, a, b)) = best_rank3(mu, settings) {
        let branch = if (1.0 - a - b).abs() < 1e-9 { Branch::R2 } else { Branch::R3 };
        offer(BoundaryPoint { mu, delta_max: delta, branch, a: Some(a), b: Some(b), w: None });
    }
    offer(werner_point(((4.0 * mu - 1.0).max(0.0) / 3.0).sqrt())?);
    Ok(best.expect("the positive Werner branch always exists"))
}

/// `delta_max(mu)` with default discord settings.
pub fn max_discord(mu: f64) -> Result<f64> {
    Ok(boundary_point(mu, &DiscordSettings::default())?.delta_max)
}

/// Boundary over a purity grid, evaluated point by point in parallel.
pub fn boundary_curve(mu_grid: &[f64]) -> Result<Vec<BoundaryPoint>> {
    boundary_curve_with(mu_grid, &DiscordSettings::default())
}

pub fn boundary_curve_with(mu_grid: &[f64], settings: &DiscordSettings) -> Result<Vec<BoundaryPoint>> {
    for &mu in mu_grid {
        check_purity(mu)?;
    }
    mu_grid.par_iter().map(|&mu| boundary_point(mu, settings)).collect()
}

/// Diagonal classical states whose images under suitable kernels are boundary states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Preimage {
    /// `diag((1-w)/4, (1-w)/4, (1-w)/4, (1+3w)/4)`.
    R4 { w: f64 },
    /// The `R4` state conjugated by `σx⊗I`.
    R4Rotated { w: f64 },
    /// `diag((1-a+b)/2, 0, a, (1-a-b)/2)`.
    R3 { a: f64, b: f64 },
}

pub fn classical_preimage(kind: Preimage) -> Result<ClassicalStateSpec> {
    let probs = match kind {
        Preimage::R4 { w } | Preimage::R4Rotated { w } => {
            if !(-1.0 / 3.0 - PARAM_TOL..=1.0 + PARAM_TOL).contains(&w) {
                return Err(Error::OutOfRange(format!("Werner parameter {w} outside [-1/3, 1]")));
            }
            let (lo, hi) = ((1.0 - w) / 4.0, ((1.0 + 3.0 * w) / 4.0).max(0.0));
            if matches!(kind, Preimage::R4 { .. }) {
                [lo, lo, lo, hi]
            } else {
                // σx on qubit A maps slot 2r + s to 2(1 - r) + s
                [lo, hi, lo, lo]
            }
        }
        Preimage::R3 { a, b } => {
            check_family(a, b)?;
            [(1.0 - a + b) / 2.0, 0.0, a, ((1.0 - a - b) / 2.0).max(0.0)]
        }
    };
    ClassicalStateSpec::logical(probs)
}
