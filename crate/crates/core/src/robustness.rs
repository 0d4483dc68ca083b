//! Robustness of PPT entangled states along the depolarizing line
//! ρ_x = xρ + (1−x)I/D: entanglement thresholds, the radius y₀(x) of a ball of
//! PPT entangled states around ρ_x, ball membership, and the mixing thresholds
//! of BE-UPB states with separable or PPT noise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cholesky, lower_triangular_inverse, CMatrix};
use crate::operator::{is_ppt_all_cuts, purity, DensityMatrix, HermitianOperator, HilbertStructure, PSD_TOL};
use crate::scalar::Real;
use crate::upb::ProductState;
use crate::witness::{witness_value, UpbWitness, Witness};

/// Tolerance of the algebraic identities checked at runtime.
pub const IDENTITY_TOL: f64 = 1e-12;

/// The segment x ↦ x·base + (1−x)·I/D.
#[derive(Clone, Debug)]
pub struct LineFamily<T> {
    base: DensityMatrix<T>,
    mixed: DensityMatrix<T>,
}

impl<T: Real> LineFamily<T> {
    pub fn new(base: DensityMatrix<T>) -> Self {
        let mixed = DensityMatrix::maximally_mixed(base.structure());
        Self { base, mixed }
    }

    pub fn base(&self) -> &DensityMatrix<T> {
        &self.base
    }

    pub fn structure(&self) -> &HilbertStructure {
        self.base.structure()
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn member(&self, x: T) -> Result<DensityMatrix<T>> {
        if !(x >= T::zero() && x <= T::one()) {
            return Err(Error::OutOfRange { name: "x", value: x.as_f64(), range: "[0, 1]" });
        }
        self.base.mix(&self.mixed, x)
    }
}

pub fn family_member<T: Real>(fam: &LineFamily<T>, x: T) -> Result<DensityMatrix<T>> {
    fam.member(x)
}

/// x* = 1/(1 + Dλ_ρ): ρ_x is witnessed as entangled for every x in (x*, 1].
pub fn entanglement_threshold<T: Real>(lambda_rho: T, dim: usize) -> Result<T> {
    if lambda_rho.is_nan() || lambda_rho <= T::zero() {
        return Err(Error::OutOfRange { name: "lambda_rho", value: lambda_rho.as_f64(), range: "(0, inf)" });
    }
    Ok(T::one() / (T::one() + T::lit(dim as f64) * lambda_rho))
}

/// Threshold of a BE-UPB line computed both ways.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UpbThreshold<T> {
    /// 1/(1 + Dλ_Ω).
    pub x_star: T,
    /// 1 − λD/n.
    pub closed_form: T,
    pub residual: T,
}

pub fn entanglement_threshold_upb<T: Real>(uw: &UpbWitness<T>) -> Result<UpbThreshold<T>> {
    let x_star = entanglement_threshold(uw.lambda_omega(), uw.dim)?;
    let closed_form = T::one() - uw.lambda * T::lit(uw.dim as f64) / T::lit(uw.n as f64);
    Ok(UpbThreshold { x_star, closed_form, residual: (x_star - closed_form).abs() })
}

/// Which bound on max_σ Tr(Wσ) enters the witness branch of y₀.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadiusMode {
    /// Tr(W⁺)/p(W). Only a valid bound when the positive spectrum is flat.
    Averaged,
    /// Largest positive eigenvalue of W, valid for every witness.
    #[default]
    Tight,
}

/// Everything y₀(x) depends on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadiusInputs<T> {
    pub lambda_rho: T,
    pub dim: usize,
    pub pos_part_trace: T,
    pub p_count: usize,
    pub max_pos_eigenvalue: T,
}

impl<T: Real> RadiusInputs<T> {
    pub fn from_witness(w: &Witness<T>, lambda_rho: T, dim: usize) -> Self {
        Self {
            lambda_rho,
            dim,
            pos_part_trace: w.pos_part_trace,
            p_count: w.p_count,
            max_pos_eigenvalue: w.max_pos_eigenvalue,
        }
    }

    pub fn from_upb(uw: &UpbWitness<T>) -> Self {
        Self::from_witness(&uw.witness, uw.lambda_omega(), uw.dim)
    }

    pub fn x_star(&self) -> Result<T> {
        entanglement_threshold(self.lambda_rho, self.dim)
    }

    fn sigma_bound(&self, mode: RadiusMode) -> T {
        match mode {
            RadiusMode::Averaged => self.pos_part_trace / T::lit(self.p_count.max(1) as f64),
            RadiusMode::Tight => self.max_pos_eigenvalue,
        }
    }

    /// (1−x)/(D−1−x): the largest weight keeping the noise inside the separable
    /// purity ball around I/D.
    pub fn purity_branch(&self, x: T) -> T {
        let d = T::lit(self.dim as f64);
        (T::one() - x) / (d - T::one() - x)
    }

    /// c/(M + c) with c = (x(1+Dλ_ρ) − 1)/D and M the bound on Tr(Wσ).
    pub fn witness_branch(&self, x: T, mode: RadiusMode) -> T {
        let d = T::lit(self.dim as f64);
        let c = (x * (T::one() + d * self.lambda_rho) - T::one()) / d;
        c / (self.sigma_bound(mode) + c)
    }

    /// min of both branches on the closed interval [x*, 1], clamped at zero.
    pub fn radius_closed(&self, x: T, mode: RadiusMode) -> T {
        self.purity_branch(x).min(self.witness_branch(x, mode)).max(T::zero())
    }
}

/// y₀(x) for x strictly inside (x*, 1).
pub fn radius_y0<T: Real>(inputs: &RadiusInputs<T>, x: T, mode: RadiusMode) -> Result<T> {
    let x_star = inputs.x_star()?;
    if !(x > x_star && x < T::one()) {
        return Err(Error::OutOfRange { name: "x", value: x.as_f64(), range: "(x*, 1)" });
    }
    Ok(inputs.radius_closed(x, mode))
}

/// (1−x)/(D−1−x).
pub fn upb_purity_branch<T: Real>(dim: usize, x: T) -> T {
    let d = T::lit(dim as f64);
    (T::one() - x) / (d - T::one() - x)
}

/// (nx − n + λD)/(nx − n + D), the witness branch specialized to W_Ω.
pub fn upb_witness_branch<T: Real>(n: usize, dim: usize, lambda: T, x: T) -> T {
    let (n, d) = (T::lit(n as f64), T::lit(dim as f64));
    (n * x - n + lambda * d) / (n * x - n + d)
}

/// Where the two branches of the UPB radius meet.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CrossingReport {
    pub x_star: f64,
    pub root: f64,
    /// |purity branch − witness branch| at the root.
    pub residual: f64,
    pub purity_branch: f64,
    pub witness_branch: f64,
    /// The closed form (n(D−2) + D(1 − λ(D−1))) / (n(D−2)D(1−λ)). Reported for
    /// comparison only; it does not satisfy the branch equation.
    pub formula: f64,
}

/// Bisection for the unique x ∈ (x*, 1) where the purity branch (decreasing)
/// meets the witness branch (increasing).
pub fn crossing_x0(n: usize, dim: usize, lambda: f64) -> Result<CrossingReport> {
    let (nf, d) = (n as f64, dim as f64);
    if !(lambda > 0.0 && lambda < nf / d) {
        return Err(Error::WitnessNormalization { lambda, bound: nf / d });
    }
    let x_star = 1.0 - lambda * d / nf;
    let gap = |x: f64| upb_purity_branch(dim, x) - upb_witness_branch(n, dim, lambda, x);
    let (mut lo, mut hi) = (x_star, 1.0);
    if !(gap(lo) > 0.0 && gap(hi) < 0.0) {
        return Err(Error::NoCrossing { lower: lo, upper: hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g = gap(mid);
        if g == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if g > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = if gap(lo).abs() <= gap(hi).abs() { lo } else { hi };
    let formula = (nf * (d - 2.0) + d * (1.0 - lambda * (d - 1.0))) / (nf * (d - 2.0) * d * (1.0 - lambda));
    Ok(CrossingReport {
        x_star,
        root,
        residual: gap(root).abs(),
        purity_branch: upb_purity_branch(dim, root),
        witness_branch: upb_witness_branch(n, dim, lambda, root),
        formula,
    })
}

/// τ = s(tσ + (1−t)I/D) + (1−s)ρ with s = 1 − x(1−y), t = y/s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MixtureDecomposition<T> {
    pub s: T,
    pub t: T,
    /// Max-entry distance between yσ + (1−y)ρ_x and the (s, t) form.
    pub residual: T,
}

/// τ = yσ + (1−y)ρ_x together with its (s, t) decomposition.
pub fn mixture_tau<T: Real>(
    fam: &LineFamily<T>,
    sigma: &DensityMatrix<T>,
    x: T,
    y: T,
) -> Result<(DensityMatrix<T>, MixtureDecomposition<T>)> {
    if !(x > T::zero() && x < T::one()) {
        return Err(Error::OutOfRange { name: "x", value: x.as_f64(), range: "(0, 1)" });
    }
    if !(y >= T::zero() && y < T::one()) {
        return Err(Error::OutOfRange { name: "y", value: y.as_f64(), range: "[0, 1)" });
    }
    let rho_x = fam.member(x)?;
    let tau = sigma.mix(&rho_x, y)?;

    let s = T::one() - x * (T::one() - y);
    let t = y / s;
    let inner = sigma.mix(&fam.mixed, t)?;
    let rebuilt = inner.op().combine(s, fam.base().op(), T::one() - s);
    let residual = rebuilt.max_abs_diff(tau.op());
    Ok((tau, MixtureDecomposition { s, t, residual }))
}

/// Sufficient separability test: Tr(ρ²) < 1/(D−1).
pub fn in_gurvits_ball<T: Real>(rho: &DensityMatrix<T>) -> bool {
    let d = T::lit(rho.dim() as f64);
    purity(rho) < T::one() / (d - T::one())
}

/// A full-rank ball center C with the inverse of its Cholesky factor cached.
#[derive(Clone, Debug)]
pub struct BallCenter<T> {
    center: DensityMatrix<T>,
    inv_factor: CMatrix<T>,
}

const RANK_TOL: f64 = 1e-12;

impl<T: Real> BallCenter<T> {
    pub fn new(center: DensityMatrix<T>) -> Result<Self> {
        let eig = center.op().eigen();
        if eig.min() <= T::tolerance(RANK_TOL) {
            return Err(Error::RankDeficientCenter { min_eigenvalue: eig.min().as_f64() });
        }
        let factor =
            cholesky(center.op().matrix()).ok_or(Error::RankDeficientCenter { min_eigenvalue: eig.min().as_f64() })?;
        let inv_factor = lower_triangular_inverse(&factor);
        Ok(Self { center, inv_factor })
    }

    pub fn center(&self) -> &DensityMatrix<T> {
        &self.center
    }

    /// Smallest μ with τ = μρ′ + (1−μ)·center for some state ρ′:
    /// μ* = 1 − λ_min(C^{−1/2} τ C^{−1/2}), clamped to [0, 1]. With C = LL† the
    /// congruent L^{−1} τ L^{−†} has the same spectrum and is evaluated instead.
    pub fn membership(&self, tau: &DensityMatrix<T>) -> Result<T> {
        if tau.dim() != self.center.dim() {
            return Err(Error::DimensionMismatch { expected: self.center.dim(), found: tau.dim() });
        }
        let sandwiched = &(&self.inv_factor * tau.op().matrix()) * &self.inv_factor.adjoint();
        let min = HermitianOperator::from_hermitian_part(&sandwiched).min_eigenvalue();
        Ok((T::one() - min).max(T::zero()).min(T::one()))
    }

    /// τ ∈ B(center; radius) iff μ* < radius.
    pub fn contains(&self, tau: &DensityMatrix<T>, radius: T) -> Result<bool> {
        Ok(self.membership(tau)? < radius)
    }
}

pub fn ball_membership<T: Real>(tau: &DensityMatrix<T>, center: &DensityMatrix<T>) -> Result<T> {
    BallCenter::new(center.clone())?.membership(tau)
}

/// λ recovered from the witness spectrum as λ_Ω p / (Tr W⁺ + λ_Ω p).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeparableMixingThreshold<T> {
    pub lambda: T,
    pub from_spectrum: T,
    pub residual: T,
}

/// zσ + (1−z)Ω stays witness-negative for every separable σ when z < λ.
pub fn separable_mixing_threshold<T: Real>(uw: &UpbWitness<T>) -> SeparableMixingThreshold<T> {
    let lo = uw.lambda_omega();
    let p = T::lit(uw.witness.p_count as f64);
    let from_spectrum = lo * p / (uw.witness.pos_part_trace + lo * p);
    SeparableMixingThreshold { lambda: uw.lambda, from_spectrum, residual: (from_spectrum - uw.lambda).abs() }
}

/// λ_Ω/(λ_Ω + Tr(Wσ)) for a PPT σ with Tr(Wσ) ≥ 0.
pub fn ppt_mixing_threshold<T: Real>(w: &Witness<T>, lambda_omega: T, sigma: &DensityMatrix<T>) -> Result<T> {
    let value = witness_value(w, sigma)?;
    if value < -T::tolerance(IDENTITY_TOL) {
        return Err(Error::OutOfDomain(format!("Tr(Wσ) = {value} is negative")));
    }
    let ppt = is_ppt_all_cuts(sigma, T::tolerance(PSD_TOL))?;
    if !ppt.ppt {
        return Err(Error::OutOfDomain(format!(
            "σ is not PPT (min partial-transpose eigenvalue {})",
            ppt.min_eigenvalue()
        )));
    }
    Ok(lambda_omega / (lambda_omega + value.max(T::zero())))
}

/// Uniform mixture of product-state projectors.
pub fn product_mixture<T: Real>(states: &[ProductState<T>], structure: &HilbertStructure) -> Result<DensityMatrix<T>> {
    if states.is_empty() {
        return Err(Error::Degenerate("no product states to mix".into()));
    }
    let d = structure.total_dim();
    let mut acc = HermitianOperator::from_real_diagonal(&vec![T::zero(); d]);
    let w = T::one() / T::lit(states.len() as f64);
    for s in states {
        let v = s.full_vector();
        if v.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: v.len() });
        }
        acc = acc.combine(T::one(), &HermitianOperator::projector(&v), w);
    }
    DensityMatrix::new(acc, structure.clone())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaximalRobustnessPoint<T> {
    pub z: T,
    pub min_pt_eigenvalue: T,
    pub witness_value: T,
    pub ppt: bool,
    pub witness_negative: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaximalRobustnessReport<T> {
    pub x: T,
    pub points: Vec<MaximalRobustnessPoint<T>>,
    pub all_passed: bool,
}

/// Checks zσ + (1−z)ρ_x for every z of the grid: PPT on all cuts and
/// witness-negative. Failures are recorded in the report.
pub fn verify_maximal_robustness<T: Real>(
    fam: &LineFamily<T>,
    x: T,
    witness: &Witness<T>,
    sigma_dir: &DensityMatrix<T>,
    grid: &[T],
) -> Result<MaximalRobustnessReport<T>> {
    let rho_x = fam.member(x)?;
    let tol = T::tolerance(PSD_TOL);
    let mut points = Vec::with_capacity(grid.len());
    for &z in grid {
        if !(z >= T::zero() && z < T::one()) {
            return Err(Error::OutOfRange { name: "z", value: z.as_f64(), range: "[0, 1)" });
        }
        let mixed = sigma_dir.mix(&rho_x, z)?;
        let ppt = is_ppt_all_cuts(&mixed, tol)?;
        let value = witness_value(witness, &mixed)?;
        points.push(MaximalRobustnessPoint {
            z,
            min_pt_eigenvalue: ppt.min_eigenvalue(),
            witness_value: value,
            ppt: ppt.ppt,
            witness_negative: value < T::zero(),
        });
    }
    let all_passed = points.iter().all(|p| p.ppt && p.witness_negative);
    Ok(MaximalRobustnessReport { x, points, all_passed })
}

/// One sample of the radius curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusSample {
    pub x: f64,
    pub y0_tight: f64,
    pub y0_averaged: f64,
}

/// Closed-form robustness summary of a BE-UPB line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustnessProfile {
    pub upb_name: String,
    pub lambda: f64,
    pub lambda_omega: f64,
    pub x_star: f64,
    pub x0_root: f64,
    pub x0_formula: f64,
    pub radius_samples: Vec<RadiusSample>,
    pub mixing_threshold: f64,
}

/// Samples y₀ at `grid_size` evenly spaced points of [x*, 1] (both ends
/// included, where the radius vanishes).
pub fn build_profile(upb_name: &str, uw: &UpbWitness<f64>, grid_size: usize) -> Result<RobustnessProfile> {
    if grid_size < 2 {
        return Err(Error::OutOfRange { name: "grid_size", value: grid_size as f64, range: "[2, inf)" });
    }
    let inputs = RadiusInputs::from_upb(uw);
    let x_star = inputs.x_star()?;
    let crossing = crossing_x0(uw.n, uw.dim, uw.lambda)?;
    let radius_samples = (0..grid_size)
        .map(|k| {
            let x = if k + 1 == grid_size { 1.0 } else { x_star + (1.0 - x_star) * k as f64 / (grid_size - 1) as f64 };
            RadiusSample {
                x,
                y0_tight: inputs.radius_closed(x, RadiusMode::Tight),
                y0_averaged: inputs.radius_closed(x, RadiusMode::Averaged),
            }
        })
        .collect();
    Ok(RobustnessProfile {
        upb_name: upb_name.to_string(),
        lambda: uw.lambda,
        lambda_omega: uw.lambda_omega(),
        x_star,
        x0_root: crossing.root,
        x0_formula: crossing.formula,
        radius_samples,
        mixing_threshold: separable_mixing_threshold(uw).from_spectrum,
    })
}

/// `count` points strictly inside (x*, 1): x_k = x* + (1−x*)k/(count+1).
pub fn interior_grid(x_star: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|k| x_star + (1.0 - x_star) * k as f64 / (count + 1) as f64).collect()
}
