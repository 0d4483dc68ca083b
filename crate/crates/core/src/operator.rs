//! Hermitian operators and density matrices on composite Hilbert spaces,
//! partial transposition over arbitrary bipartitions, and the PPT test.
//!
//! Composite basis vectors |i₁⟩⊗…⊗|iₙ⟩ are indexed lexicographically, first
//! party most significant: for two parties |i⟩_A⊗|j⟩_B sits at `i*d₂ + j`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{jacobi_eigen, CMatrix, EigenDecomposition};
use crate::scalar::Real;

/// Entry-wise Hermiticity tolerance.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Unit-trace tolerance for density matrices.
pub const TRACE_TOL: f64 = 1e-10;
/// Absolute tolerance on eigenvalues when testing positivity.
pub const PSD_TOL: f64 = 1e-9;

/// Ordered local dimensions d₁,…,dₙ of a composite system.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HilbertStructure {
    local_dims: Vec<usize>,
}

impl HilbertStructure {
    pub fn new(local_dims: Vec<usize>) -> Result<Self> {
        if local_dims.is_empty() {
            return Err(Error::InvalidStructure("no subsystems".into()));
        }
        if let Some(d) = local_dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidStructure(format!("local dimension {d} < 2")));
        }
        Ok(Self { local_dims })
    }

    pub fn bipartite(d1: usize, d2: usize) -> Result<Self> {
        Self::new(vec![d1, d2])
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.local_dims
    }

    pub fn parties(&self) -> usize {
        self.local_dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.local_dims.iter().product()
    }

    /// Splits a composite index into per-party indices.
    pub fn split_index(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.local_dims.len()];
        for (slot, &d) in digits.iter_mut().zip(&self.local_dims).rev() {
            *slot = index % d;
            index /= d;
        }
        digits
    }

    pub fn join_index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.local_dims).fold(0, |acc, (&i, &d)| acc * d + i)
    }
}

/// The set of parties transposed by a partial transpose. Always a nonempty
/// proper subset of the party indices, stored sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bipartition {
    transposed: Vec<usize>,
}

impl Bipartition {
    pub fn new(structure: &HilbertStructure, mut transposed: Vec<usize>) -> Result<Self> {
        transposed.sort_unstable();
        transposed.dedup();
        let n = structure.parties();
        if transposed.is_empty() {
            return Err(Error::InvalidCut("transposed side is empty".into()));
        }
        if let Some(&k) = transposed.iter().find(|&&k| k >= n) {
            return Err(Error::InvalidCut(format!("party {k} out of range for {n} parties")));
        }
        if transposed.len() == n {
            return Err(Error::InvalidCut("transposed side covers every party".into()));
        }
        Ok(Self { transposed })
    }

    /// The A|B cut of a bipartite system with B transposed.
    pub fn standard(structure: &HilbertStructure) -> Result<Self> {
        Self::new(structure, vec![structure.parties().saturating_sub(1)])
    }

    /// All 2^(n−1) − 1 inequivalent cuts. A subset and its complement give
    /// partial transposes related by a full transpose, so only subsets that
    /// leave party 0 untransposed are listed.
    pub fn all(structure: &HilbertStructure) -> Vec<Self> {
        let n = structure.parties();
        if n < 2 {
            return Vec::new();
        }
        (1..(1usize << (n - 1)))
            .map(|mask| Self { transposed: (1..n).filter(|k| mask & (1 << (k - 1)) != 0).collect() })
            .collect()
    }

    pub fn transposed(&self) -> &[usize] {
        &self.transposed
    }

    fn check(&self, structure: &HilbertStructure) -> Result<()> {
        Self::new(structure, self.transposed.clone()).map(|_| ())
    }
}

/// Complex square matrix equal to its adjoint within [`HERMITIAN_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator<T> {
    matrix: CMatrix<T>,
}

impl<T: Real> HermitianOperator<T> {
    /// Validates Hermiticity and symmetrizes away the residual rounding.
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        if matrix.dim() == 0 {
            return Err(Error::InvalidStructure("empty operator".into()));
        }
        let tolerance = T::tolerance(HERMITIAN_TOL);
        let deviation = matrix.hermitian_deviation();
        if deviation > tolerance {
            return Err(Error::NotHermitian { deviation: deviation.as_f64(), tolerance: tolerance.as_f64() });
        }
        Ok(Self { matrix: matrix.hermitian_part() })
    }

    /// Wraps the Hermitian part of `matrix`, for values Hermitian by construction.
    pub(crate) fn from_hermitian_part(matrix: &CMatrix<T>) -> Self {
        Self { matrix: matrix.hermitian_part() }
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: CMatrix::identity(dim) }
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        Self { matrix: CMatrix::from_real_diagonal(diag) }
    }

    pub fn projector(v: &[Complex<T>]) -> Self {
        Self::from_hermitian_part(&CMatrix::outer(v))
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    /// Tr(A·B); real for Hermitian A and B.
    pub fn trace_with(&self, other: &Self) -> T {
        self.matrix.trace_product(&other.matrix).re
    }

    pub fn scale(&self, factor: T) -> Self {
        Self { matrix: self.matrix.scale(factor) }
    }

    /// a·self + b·other.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Self {
        Self { matrix: self.matrix.combine(a, &other.matrix, b) }
    }

    pub fn eigen(&self) -> EigenDecomposition<T> {
        eig_hermitian(self)
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigen().min()
    }

    /// ⟨v|A|v⟩.
    pub fn expectation(&self, v: &[Complex<T>]) -> T {
        self.matrix.expectation(v).re
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.matrix.max_abs_diff(&other.matrix)
    }
}

/// Eigendecomposition of a Hermitian operator: ascending eigenvalues with an
/// orthonormal eigenbasis. Vectors inside a degenerate cluster are an
/// arbitrary orthonormal basis of that cluster.
pub fn eig_hermitian<T: Real>(op: &HermitianOperator<T>) -> EigenDecomposition<T> {
    jacobi_eigen(op.matrix())
}

/// Validates Hermiticity of a raw matrix and diagonalizes it.
pub fn eig_hermitian_checked<T: Real>(matrix: &CMatrix<T>) -> Result<EigenDecomposition<T>> {
    HermitianOperator::new(matrix.clone()).map(|op| eig_hermitian(&op))
}

/// Unit-trace positive semidefinite operator attached to a Hilbert structure.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    op: HermitianOperator<T>,
    structure: HilbertStructure,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(op: HermitianOperator<T>, structure: HilbertStructure) -> Result<Self> {
        if op.dim() != structure.total_dim() {
            return Err(Error::DimensionMismatch { expected: structure.total_dim(), found: op.dim() });
        }
        let trace = op.trace();
        let tolerance = T::tolerance(TRACE_TOL);
        if (trace - T::one()).abs() > tolerance {
            return Err(Error::NotNormalized { trace: trace.as_f64(), tolerance: tolerance.as_f64() });
        }
        let min_eigenvalue = op.min_eigenvalue();
        if min_eigenvalue < -T::tolerance(PSD_TOL) {
            return Err(Error::NotPositive { min_eigenvalue: min_eigenvalue.as_f64() });
        }
        Ok(Self { op, structure })
    }

    /// Skips validation for states that are valid by construction
    /// (convex combinations, normalized Gram products).
    pub(crate) fn new_unchecked(op: HermitianOperator<T>, structure: HilbertStructure) -> Self {
        debug_assert_eq!(op.dim(), structure.total_dim());
        Self { op, structure }
    }

    /// I/D.
    pub fn maximally_mixed(structure: &HilbertStructure) -> Self {
        let d = structure.total_dim();
        Self::new_unchecked(HermitianOperator::identity(d).scale(T::one() / T::lit(d as f64)), structure.clone())
    }

    /// |ψ⟩⟨ψ|/⟨ψ|ψ⟩.
    pub fn pure(v: &[Complex<T>], structure: &HilbertStructure) -> Result<Self> {
        if v.len() != structure.total_dim() {
            return Err(Error::DimensionMismatch { expected: structure.total_dim(), found: v.len() });
        }
        let norm = crate::linalg::norm(v);
        if norm <= T::min_positive_value() {
            return Err(Error::Degenerate("zero vector".into()));
        }
        let unit: Vec<_> = v.iter().map(|z| z / norm).collect();
        Ok(Self::new_unchecked(HermitianOperator::projector(&unit), structure.clone()))
    }

    /// w·self + (1−w)·other, for w ∈ [0, 1].
    pub fn mix(&self, other: &Self, w: T) -> Result<Self> {
        if self.structure != other.structure {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        if !(w >= T::zero() && w <= T::one()) {
            return Err(Error::OutOfRange { name: "weight", value: w.as_f64(), range: "[0, 1]" });
        }
        Ok(Self::new_unchecked(self.op.combine(w, &other.op, T::one() - w), self.structure.clone()))
    }

    pub fn op(&self) -> &HermitianOperator<T> {
        &self.op
    }

    pub fn structure(&self) -> &HilbertStructure {
        &self.structure
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn partial_transpose(&self, cut: &Bipartition) -> Result<HermitianOperator<T>> {
        partial_transpose(self, cut)
    }
}

/// Transposes the indices of the parties in `cut`:
/// ⟨i|ρ^Γ|j⟩ = ⟨i'|ρ|j'⟩ where i', j' swap the transposed-party digits of i and j.
pub fn partial_transpose<T: Real>(rho: &DensityMatrix<T>, cut: &Bipartition) -> Result<HermitianOperator<T>> {
    partial_transpose_operator(rho.op(), rho.structure(), cut)
}

/// Partial transpose of an arbitrary operator on `structure`.
pub fn partial_transpose_operator<T: Real>(
    op: &HermitianOperator<T>,
    structure: &HilbertStructure,
    cut: &Bipartition,
) -> Result<HermitianOperator<T>> {
    cut.check(structure)?;
    if op.dim() != structure.total_dim() {
        return Err(Error::DimensionMismatch { expected: structure.total_dim(), found: op.dim() });
    }
    let d = op.dim();
    let digits: Vec<Vec<usize>> = (0..d).map(|i| structure.split_index(i)).collect();
    let src = op.matrix();
    let mut out = CMatrix::zeros(d);
    let mut row = vec![0; structure.parties()];
    let mut col = vec![0; structure.parties()];
    for i in 0..d {
        for j in 0..d {
            row.copy_from_slice(&digits[i]);
            col.copy_from_slice(&digits[j]);
            for &k in cut.transposed() {
                std::mem::swap(&mut row[k], &mut col[k]);
            }
            out[(i, j)] = src[(structure.join_index(&row), structure.join_index(&col))];
        }
    }
    Ok(HermitianOperator { matrix: out })
}

/// Outcome of a PPT test on one cut.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PptReport<T> {
    pub ppt: bool,
    pub min_eigenvalue: T,
}

/// Positivity of the partial transpose: min eigenvalue ≥ −tol.
pub fn is_ppt<T: Real>(rho: &DensityMatrix<T>, cut: &Bipartition, tol: T) -> Result<PptReport<T>> {
    let min_eigenvalue = partial_transpose(rho, cut)?.min_eigenvalue();
    Ok(PptReport { ppt: min_eigenvalue >= -tol, min_eigenvalue })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AllCutsReport<T> {
    pub ppt: bool,
    pub cuts: Vec<(Bipartition, PptReport<T>)>,
}

impl<T: Real> AllCutsReport<T> {
    /// Smallest partial-transpose eigenvalue across all cuts.
    pub fn min_eigenvalue(&self) -> T {
        self.cuts.iter().map(|(_, r)| r.min_eigenvalue).fold(T::infinity(), T::min)
    }
}

/// PPT test across every inequivalent bipartition.
pub fn is_ppt_all_cuts<T: Real>(rho: &DensityMatrix<T>, tol: T) -> Result<AllCutsReport<T>> {
    let cuts = Bipartition::all(rho.structure());
    if cuts.is_empty() {
        return Err(Error::InvalidStructure("PPT needs at least two parties".into()));
    }
    let cuts = cuts.into_iter().map(|cut| is_ppt(rho, &cut, tol).map(|r| (cut, r))).collect::<Result<Vec<_>>>()?;
    Ok(AllCutsReport { ppt: cuts.iter().all(|(_, r)| r.ppt), cuts })
}

/// Tr(ρ²).
pub fn purity<T: Real>(rho: &DensityMatrix<T>) -> T {
    rho.op().matrix().as_slice().iter().map(|z| z.norm_sqr()).sum()
}

/// Kronecker product of local operators in party order.
pub fn tensor<T: Real>(factors: &[CMatrix<T>]) -> CMatrix<T> {
    factors.iter().skip(1).fold(factors[0].clone(), |acc, f| acc.kron(f))
}
