//! Seeded randomized verification of the ball and mixing-threshold results,
//! plus a Hilbert–Schmidt estimate of ball volume fractions.
//!
//! Every trial draws from its own substream keyed by (master seed, stream id,
//! trial index), so results do not depend on how rayon schedules the work.

use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::operator::{is_ppt_all_cuts, DensityMatrix, HermitianOperator, HilbertStructure, PSD_TOL};
use crate::robustness::{mixture_tau, radius_y0, BallCenter, LineFamily, RadiusInputs, RadiusMode};
use crate::scalar::Real;
use crate::streams::{complex_gaussian, random_unit_vector, substream};
use crate::upb::ProductState;
use crate::witness::{witness_value, UpbWitness};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub master_seed: u64,
    /// Trials per configuration point.
    pub trials: usize,
    pub stream_id: u64,
}

impl SamplerConfig {
    pub fn new(master_seed: u64, trials: usize, stream_id: u64) -> Self {
        Self { master_seed, trials, stream_id }
    }

    pub fn rng(&self, trial: u64) -> rand_chacha::ChaCha8Rng {
        substream(self.master_seed, self.stream_id, trial)
    }
}

/// G·G†/Tr(G·G†) for a complex Gaussian D×D matrix G.
pub fn sample_hs_density<T: Real, R: Rng + ?Sized>(structure: &HilbertStructure, rng: &mut R) -> DensityMatrix<T> {
    let d = structure.total_dim();
    let g = CMatrix::from_fn(d, |_, _| complex_gaussian::<T, R>(rng));
    let gg = &g * &g.adjoint();
    let trace = gg.trace().re;
    DensityMatrix::new_unchecked(HermitianOperator::from_hermitian_part(&gg.scale(T::one() / trace)), structure.clone())
}

/// Haar-random fully product pure state.
pub fn sample_product_state<T: Real, R: Rng + ?Sized>(structure: &HilbertStructure, rng: &mut R) -> ProductState<T> {
    let locals = structure.local_dims().iter().map(|&d| random_unit_vector(d, rng)).collect();
    ProductState::normalized(locals).expect("random unit vectors")
}

/// Convex mixture of `terms` random product projectors with flat-Dirichlet weights.
pub fn sample_random_product_separable<T: Real, R: Rng + ?Sized>(
    structure: &HilbertStructure,
    terms: usize,
    rng: &mut R,
) -> Result<DensityMatrix<T>> {
    if terms == 0 {
        return Err(Error::OutOfRange { name: "mixture_terms", value: 0.0, range: "[1, inf)" });
    }
    let d = structure.total_dim();
    let raw: Vec<f64> = (0..terms).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    let mut acc = CMatrix::zeros(d);
    for w in raw {
        let v = sample_product_state::<T, R>(structure, rng).full_vector();
        acc = acc.combine(T::one(), &CMatrix::outer(&v), T::lit(w / total));
    }
    let trace = acc.trace().re;
    Ok(DensityMatrix::new_unchecked(
        HermitianOperator::from_hermitian_part(&acc.scale(T::one() / trace)),
        structure.clone(),
    ))
}

/// Counts of a verification run. `worst_margin` is the minimum over trials of
/// min(PT min-eigenvalue + psd_tol, −witness value); positive means every
/// trial passed both checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationOutcome {
    pub check: String,
    pub upb_name: String,
    pub config: SamplerConfig,
    pub trials: usize,
    pub ppt_violations: usize,
    pub witness_violations: usize,
    pub worst_margin: f64,
    /// Substream indices of failing trials.
    pub seeds_of_failures: Vec<u64>,
    pub parameters: CheckParameters,
}

impl VerificationOutcome {
    pub fn passed(&self) -> bool {
        self.ppt_violations == 0 && self.witness_violations == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CheckParameters {
    Ball { x_grid: Vec<f64>, y_fraction: f64, mode: RadiusMode },
    SeparableMixing { z_fraction: f64, z: f64, mixture_terms: usize },
}

struct TrialResult {
    index: u64,
    ppt_ok: bool,
    witness_ok: bool,
    margin: f64,
}

fn aggregate(
    check: &str,
    upb_name: &str,
    cfg: &SamplerConfig,
    parameters: CheckParameters,
    results: Vec<TrialResult>,
) -> VerificationOutcome {
    let mut outcome = VerificationOutcome {
        check: check.to_string(),
        upb_name: upb_name.to_string(),
        config: *cfg,
        trials: results.len(),
        ppt_violations: 0,
        witness_violations: 0,
        worst_margin: f64::INFINITY,
        seeds_of_failures: Vec::new(),
        parameters,
    };
    for r in results {
        outcome.ppt_violations += usize::from(!r.ppt_ok);
        outcome.witness_violations += usize::from(!r.witness_ok);
        outcome.worst_margin = outcome.worst_margin.min(r.margin);
        if !(r.ppt_ok && r.witness_ok) {
            outcome.seeds_of_failures.push(r.index);
        }
    }
    outcome
}

fn judge(index: u64, state: &DensityMatrix<f64>, uw: &UpbWitness<f64>) -> Result<TrialResult> {
    let ppt = is_ppt_all_cuts(state, PSD_TOL)?;
    let value = witness_value(&uw.witness, state)?;
    let min_pt = ppt.min_eigenvalue();
    Ok(TrialResult { index, ppt_ok: ppt.ppt, witness_ok: value < 0.0, margin: (min_pt + PSD_TOL).min(-value) })
}

/// For each x of the grid and each trial: σ Hilbert–Schmidt random,
/// y = y_fraction·y₀(x), τ = yσ + (1−y)Ω_x must be PPT on every cut and
/// witness-negative.
pub fn verify_ball(
    upb_name: &str,
    omega: &DensityMatrix<f64>,
    uw: &UpbWitness<f64>,
    x_grid: &[f64],
    y_fraction: f64,
    mode: RadiusMode,
    cfg: &SamplerConfig,
) -> Result<VerificationOutcome> {
    if y_fraction.is_nan() || y_fraction < 0.0 {
        return Err(Error::OutOfRange { name: "y_fraction", value: y_fraction, range: "[0, inf)" });
    }
    let fam = LineFamily::new(omega.clone());
    let inputs = RadiusInputs::from_upb(uw);
    let ys = x_grid
        .iter()
        .map(|&x| {
            let y = y_fraction * radius_y0(&inputs, x, mode)?;
            if y >= 1.0 {
                return Err(Error::OutOfRange { name: "y", value: y, range: "[0, 1)" });
            }
            Ok(y)
        })
        .collect::<Result<Vec<_>>>()?;

    let total = x_grid.len() * cfg.trials;
    let results = (0..total as u64)
        .into_par_iter()
        .map(|index| {
            let point = index as usize / cfg.trials.max(1);
            let mut rng = cfg.rng(index);
            let sigma = sample_hs_density::<f64, _>(omega.structure(), &mut rng);
            let (tau, _) = mixture_tau(&fam, &sigma, x_grid[point], ys[point])?;
            judge(index, &tau, uw)
        })
        .collect::<Result<Vec<_>>>()?;

    let parameters = CheckParameters::Ball { x_grid: x_grid.to_vec(), y_fraction, mode };
    Ok(aggregate("ball", upb_name, cfg, parameters, results))
}

/// zσ + (1−z)Ω with z = z_fraction·λ and σ a random separable mixture must be
/// PPT on every cut and witness-negative.
pub fn verify_separable_mixing(
    upb_name: &str,
    omega: &DensityMatrix<f64>,
    uw: &UpbWitness<f64>,
    z_fraction: f64,
    mixture_terms: usize,
    cfg: &SamplerConfig,
) -> Result<VerificationOutcome> {
    if !(z_fraction >= 0.0 && z_fraction < 1.0 / uw.lambda) {
        return Err(Error::OutOfRange { name: "z_fraction", value: z_fraction, range: "[0, 1/lambda)" });
    }
    let z = z_fraction * uw.lambda;
    let results = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|index| {
            let mut rng = cfg.rng(index);
            let sigma = sample_random_product_separable::<f64, _>(omega.structure(), mixture_terms, &mut rng)?;
            let mixed = sigma.mix(omega, z)?;
            judge(index, &mixed, uw)
        })
        .collect::<Result<Vec<_>>>()?;
    let parameters = CheckParameters::SeparableMixing { z_fraction, z, mixture_terms };
    Ok(aggregate("separable_mixing", upb_name, cfg, parameters, results))
}

/// Fraction of Hilbert–Schmidt samples inside B(center; radius), with a 95%
/// Wilson score interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionEstimate {
    pub config: SamplerConfig,
    pub radius: f64,
    pub hits: usize,
    pub trials: usize,
    pub fraction: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

pub fn ball_fraction_estimate(
    center: &DensityMatrix<f64>,
    radius: f64,
    cfg: &SamplerConfig,
) -> Result<FractionEstimate> {
    let ball = BallCenter::new(center.clone())?;
    let inside = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|index| {
            let mut rng = cfg.rng(index);
            let tau = sample_hs_density::<f64, _>(center.structure(), &mut rng);
            ball.contains(&tau, radius)
        })
        .collect::<Result<Vec<bool>>>()?;
    let hits = inside.iter().filter(|&&b| b).count();
    let (ci_low, ci_high) = wilson_interval(hits, cfg.trials, 1.959_963_984_540_054);
    Ok(FractionEstimate {
        config: *cfg,
        radius,
        hits,
        trials: cfg.trials,
        fraction: if cfg.trials == 0 { 0.0 } else { hits as f64 / cfg.trials as f64 },
        ci_low,
        ci_high,
    })
}

fn wilson_interval(hits: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    let low = if hits == 0 { 0.0 } else { (center - half).max(0.0) };
    let high = if hits == trials { 1.0 } else { (center + half).min(1.0) };
    (low, high)
}
