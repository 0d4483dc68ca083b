//! Minimum product-state overlap λ = min ⟨φ|P_S|φ⟩ by alternating (see-saw)
//! minimization, the normalized UPB witness W_Ω = (P_S − λI)/(n − λD), and the
//! spectral quantities of general witnesses.

use num_complex::Complex;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, EigenDecomposition};
use crate::operator::{DensityMatrix, HermitianOperator, HilbertStructure};
use crate::scalar::Real;
use crate::streams::{random_unit_vector, substream};
use crate::upb::{ProductState, UpbSet};

/// Eigenvalues with magnitude at most this are counted as neither positive nor negative.
pub const ZERO_EIGENVALUE_TOL: f64 = 1e-10;
/// Two minimizers are the same state when their fidelity exceeds 1 − this.
pub const DISTINCT_FIDELITY_GAP: f64 = 1e-6;
/// Restarts whose value is within this of the best are kept as co-minimizers.
const MINIMIZER_VALUE_TOL: f64 = 1e-9;
const SEESAW_STREAM: u64 = 0x5EE5_A300;

/// Multi-start see-saw settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeesawConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// A restart converges once a full sweep improves the objective by less than this.
    pub tol: f64,
    pub seed: u64,
}

impl Default for SeesawConfig {
    fn default() -> Self {
        Self { restarts: 200, max_iters: 500, tol: 1e-12, seed: 0 }
    }
}

/// Outcome of a λ minimization.
#[derive(Clone, Debug)]
pub struct LambdaResult<T> {
    pub lambda: T,
    pub minimizer: ProductState<T>,
    pub restarts_used: usize,
    /// Whether the winning restart met the tolerance within `max_iters`.
    pub converged: bool,
    /// Pairwise distinct product states attaining λ (within 1e-9), first found first.
    pub minimizers: Vec<ProductState<T>>,
}

struct Run<T> {
    value: T,
    state: ProductState<T>,
    converged: bool,
    history: Vec<T>,
}

/// The d_k × d_k operator ⟨φ_rest|P|φ_rest⟩ obtained by contracting every
/// party except `party` with its current local vector.
fn reduced_operator<T: Real>(
    projector: &CMatrix<T>,
    structure: &HilbertStructure,
    digits: &[Vec<usize>],
    locals: &[Vec<Complex<T>>],
    party: usize,
) -> CMatrix<T> {
    let weights: Vec<Complex<T>> = digits
        .iter()
        .map(|dg| {
            dg.iter().enumerate().filter(|&(m, _)| m != party).fold(Complex::one(), |acc, (m, &i)| acc * locals[m][i])
        })
        .collect();
    let mut out = CMatrix::zeros(structure.local_dims()[party]);
    for (i, wi) in weights.iter().enumerate() {
        if wi.is_zero() {
            continue;
        }
        let wi = wi.conj();
        for (j, wj) in weights.iter().enumerate() {
            if wj.is_zero() {
                continue;
            }
            let (a, b) = (digits[i][party], digits[j][party]);
            out[(a, b)] = out[(a, b)] + wi * projector[(i, j)] * wj;
        }
    }
    out
}

fn objective<T: Real>(projector: &HermitianOperator<T>, state: &ProductState<T>) -> T {
    projector.expectation(&state.full_vector())
}

fn run_seesaw<T: Real>(upb: &UpbSet<T>, init: ProductState<T>, cfg: &SeesawConfig) -> Run<T> {
    let structure = upb.structure();
    let projector = upb.projector();
    let digits: Vec<Vec<usize>> = (0..structure.total_dim()).map(|i| structure.split_index(i)).collect();
    let mut locals = init.locals().to_vec();
    let mut value = objective(projector, &init);
    let mut history = vec![value];
    let tol = T::lit(cfg.tol);
    let mut converged = false;

    for _ in 0..cfg.max_iters {
        let start = value;
        for party in 0..structure.parties() {
            let reduced = reduced_operator(projector.matrix(), structure, &digits, &locals, party);
            let eig = crate::linalg::jacobi_eigen(&reduced);
            locals[party] = eig.vector(0);
            // Objective at the updated point, clamped to [0, previous value].
            value = eig.min().max(T::zero()).min(value);
            history.push(value);
        }
        if start - value < tol {
            converged = true;
            break;
        }
    }

    let state = ProductState::normalized(locals).expect("eigenvectors are unit vectors");
    let value = objective(projector, &state);
    Run { value, state, converged, history }
}

fn random_product<T: Real>(structure: &HilbertStructure, seed: u64, restart: usize) -> ProductState<T> {
    let mut rng = substream(seed, SEESAW_STREAM, restart as u64);
    let locals = structure.local_dims().iter().map(|&d| random_unit_vector(d, &mut rng)).collect();
    ProductState::normalized(locals).expect("random unit vectors")
}

fn multi_start<T: Real>(upb: &UpbSet<T>, cfg: &SeesawConfig) -> Result<LambdaResult<T>> {
    if cfg.restarts == 0 {
        return Err(Error::OutOfRange { name: "restarts", value: 0.0, range: "[1, inf)" });
    }
    let runs: Vec<Run<T>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| run_seesaw(upb, random_product(upb.structure(), cfg.seed, r), cfg))
        .collect();

    let best = runs.iter().enumerate().fold(0, |best, (i, run)| if run.value < runs[best].value { i } else { best });
    let lambda = runs[best].value;

    let mut minimizers: Vec<ProductState<T>> = Vec::new();
    let gap = T::lit(DISTINCT_FIDELITY_GAP);
    let near = T::lit(MINIMIZER_VALUE_TOL);
    for run in runs.iter().filter(|run| run.value - lambda <= near) {
        if minimizers.iter().all(|m| m.fidelity(&run.state) < T::one() - gap) {
            minimizers.push(run.state.clone());
        }
    }
    // The winner goes first even when an equal-valued earlier restart was kept.
    if let Some(pos) = minimizers.iter().position(|m| m.fidelity(&runs[best].state) >= T::one() - gap) {
        let first = minimizers.remove(pos);
        minimizers.insert(0, first);
    }

    Ok(LambdaResult {
        lambda,
        minimizer: runs[best].state.clone(),
        restarts_used: cfg.restarts,
        converged: runs[best].converged,
        minimizers,
    })
}

/// λ for a bipartite product set.
pub fn compute_lambda<T: Real>(upb: &UpbSet<T>, cfg: &SeesawConfig) -> Result<LambdaResult<T>> {
    if upb.structure().parties() != 2 {
        return Err(Error::InvalidStructure(format!(
            "compute_lambda needs 2 parties, got {}",
            upb.structure().parties()
        )));
    }
    multi_start(upb, cfg)
}

/// λ over fully product states of an n ≥ 3 party set (cyclic see-saw).
pub fn compute_lambda_multipartite<T: Real>(upb: &UpbSet<T>, cfg: &SeesawConfig) -> Result<LambdaResult<T>> {
    if upb.structure().parties() < 3 {
        return Err(Error::InvalidStructure(format!(
            "compute_lambda_multipartite needs at least 3 parties, got {}",
            upb.structure().parties()
        )));
    }
    multi_start(upb, cfg)
}

/// Dispatches on the number of parties.
pub fn compute_lambda_any<T: Real>(upb: &UpbSet<T>, cfg: &SeesawConfig) -> Result<LambdaResult<T>> {
    multi_start(upb, cfg)
}

/// One see-saw descent from a given product state.
pub fn seesaw_from<T: Real>(upb: &UpbSet<T>, init: &ProductState<T>, cfg: &SeesawConfig) -> Result<LambdaResult<T>> {
    if init.local_dims() != upb.structure().local_dims() {
        return Err(Error::InvalidStructure("initial state does not match the set's structure".into()));
    }
    let run = run_seesaw(upb, init.clone(), cfg);
    Ok(LambdaResult {
        lambda: run.value,
        minimizer: run.state.clone(),
        restarts_used: 1,
        converged: run.converged,
        minimizers: vec![run.state],
    })
}

/// Objective value after the initial point and after every half-step
/// (one local update) of a single descent.
pub fn seesaw_history<T: Real>(upb: &UpbSet<T>, init: &ProductState<T>, cfg: &SeesawConfig) -> Vec<T> {
    run_seesaw(upb, init.clone(), cfg).history
}

/// Returns λ when it certifies unextendibility (λ > 1e-8), an error otherwise.
pub fn certify_unextendible<T: Real>(upb: &UpbSet<T>, cfg: &SeesawConfig) -> Result<T> {
    let lam = compute_lambda_any(upb, cfg)?;
    if lam.lambda > T::lit(1e-8) {
        Ok(lam.lambda)
    } else {
        Err(Error::Degenerate(format!("{} is extendible: a product state is orthogonal to every member", upb.name())))
    }
}

/// Unit-trace Hermitian operator with its spectral summary.
#[derive(Clone, Debug)]
pub struct Witness<T> {
    op: HermitianOperator<T>,
    eigen: EigenDecomposition<T>,
    pub pos_part_trace: T,
    pub neg_part_trace: T,
    pub p_count: usize,
    pub n_neg_count: usize,
    pub max_pos_eigenvalue: T,
}

impl<T: Real> Witness<T> {
    /// Diagonalizes `op` and caches the positive/negative split. Requires Tr = 1.
    pub fn new(op: HermitianOperator<T>) -> Result<Self> {
        let trace = op.trace();
        let tolerance = T::tolerance(crate::operator::TRACE_TOL);
        if (trace - T::one()).abs() > tolerance {
            return Err(Error::NotNormalized { trace: trace.as_f64(), tolerance: tolerance.as_f64() });
        }
        let eigen = op.eigen();
        let zero = T::tolerance(ZERO_EIGENVALUE_TOL);
        let positive: Vec<T> = eigen.values.iter().copied().filter(|&x| x > zero).collect();
        let negative: Vec<T> = eigen.values.iter().copied().filter(|&x| x < -zero).collect();
        Ok(Self {
            pos_part_trace: positive.iter().copied().sum(),
            neg_part_trace: -negative.iter().copied().sum::<T>(),
            p_count: positive.len(),
            n_neg_count: negative.len(),
            max_pos_eigenvalue: positive.last().copied().unwrap_or_else(T::zero),
            op,
            eigen,
        })
    }

    pub fn op(&self) -> &HermitianOperator<T> {
        &self.op
    }

    pub fn eigen(&self) -> &EigenDecomposition<T> {
        &self.eigen
    }

    /// [−Tr W⁻, Tr W⁺], the range of Tr(Wπ) over density matrices π.
    pub fn value_bounds(&self) -> (T, T) {
        (-self.neg_part_trace, self.pos_part_trace)
    }

    /// Tr(W⁺)/p, the averaged bound on Tr(Wσ).
    pub fn averaged_positive_bound(&self) -> T {
        self.pos_part_trace / T::lit(self.p_count.max(1) as f64)
    }
}

/// W = W⁺ − W⁻ with W± ≥ 0 on orthogonal supports.
#[derive(Clone, Debug)]
pub struct SpectralSplit<T> {
    pub positive: HermitianOperator<T>,
    pub negative: HermitianOperator<T>,
    pub values: Vec<T>,
}

pub fn spectral_split<T: Real>(w: &Witness<T>) -> SpectralSplit<T> {
    let zero = T::tolerance(ZERO_EIGENVALUE_TOL);
    let positive = w.eigen.reconstruct_with(|x| if x > zero { x } else { T::zero() });
    let negative = w.eigen.reconstruct_with(|x| if x < -zero { -x } else { T::zero() });
    SpectralSplit {
        positive: HermitianOperator::from_hermitian_part(&positive),
        negative: HermitianOperator::from_hermitian_part(&negative),
        values: w.eigen.values.clone(),
    }
}

/// Tr(W·ρ).
pub fn witness_value<T: Real>(w: &Witness<T>, rho: &DensityMatrix<T>) -> Result<T> {
    if w.op.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: w.op.dim(), found: rho.dim() });
    }
    Ok(w.op.trace_with(rho.op()))
}

/// The normalized UPB witness together with the scalars it was built from.
#[derive(Clone, Debug)]
pub struct UpbWitness<T> {
    pub witness: Witness<T>,
    pub lambda: T,
    pub n: usize,
    pub dim: usize,
}

impl<T: Real> UpbWitness<T> {
    /// n − λD.
    pub fn normalizer(&self) -> T {
        T::lit(self.n as f64) - self.lambda * T::lit(self.dim as f64)
    }

    /// λ_Ω = λ/(n − λD) = −Tr(W_Ω Ω).
    pub fn lambda_omega(&self) -> T {
        self.lambda / self.normalizer()
    }

    /// Closed form n(1 − λ)/(n − λD) of Tr(W_Ω⁺).
    pub fn positive_trace_closed_form(&self) -> T {
        T::lit(self.n as f64) * (T::one() - self.lambda) / self.normalizer()
    }
}

/// W_Ω = (P_S − λI)/(n − λD).
pub fn build_witness<T: Real>(upb: &UpbSet<T>, lam: &LambdaResult<T>) -> Result<UpbWitness<T>> {
    build_witness_from_lambda(upb, lam.lambda)
}

pub fn build_witness_from_lambda<T: Real>(upb: &UpbSet<T>, lambda: T) -> Result<UpbWitness<T>> {
    let n = upb.len();
    let dim = upb.total_dim();
    let bound = T::lit(n as f64) / T::lit(dim as f64);
    if !(lambda > T::zero() && lambda < bound) {
        return Err(Error::WitnessNormalization { lambda: lambda.as_f64(), bound: bound.as_f64() });
    }
    let normalizer = T::lit(n as f64) - lambda * T::lit(dim as f64);
    let op = upb.projector().combine(T::one(), &HermitianOperator::identity(dim), -lambda).scale(T::one() / normalizer);
    Ok(UpbWitness { witness: Witness::new(op)?, lambda, n, dim })
}
