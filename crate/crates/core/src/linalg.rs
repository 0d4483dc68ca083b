//! Dense complex matrices and the cyclic Jacobi eigensolver for Hermitian input.
//!
//! Everything in this crate works in dimensions of at most a few dozen, so the
//! storage is a plain row-major `Vec` and products are naive triple loops.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::Real;

/// Square complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { Complex::one() } else { Complex::zero() })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major entries. Panics if the length is not a square.
    pub fn from_row_major(dim: usize, data: Vec<Complex<T>>) -> Self {
        assert_eq!(data.len(), dim * dim, "row-major data must hold dim*dim entries");
        Self { dim, data }
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        Self::from_fn(diag.len(), |i, j| if i == j { Complex::new(diag[i], T::zero()) } else { Complex::zero() })
    }

    /// Rank-one projector |v⟩⟨v|.
    pub fn outer(v: &[Complex<T>]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, factor: T) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * factor).collect() }
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).map(|i| self[(i, i)]).fold(Complex::zero(), |acc, z| acc + z)
    }

    /// Tr(A·B) without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex<T> {
        assert_eq!(self.dim, other.dim);
        let mut acc = Complex::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc = acc + self[(i, j)] * other[(j, i)];
            }
        }
        acc
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(T::zero(), T::max)
    }

    /// Largest |A_ij − conj(A_ji)|.
    pub fn hermitian_deviation(&self) -> T {
        let mut dev = T::zero();
        for i in 0..self.dim {
            for j in i..self.dim {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// (A + A†)/2.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * half)
    }

    pub fn kron(&self, other: &Self) -> Self {
        let d = other.dim;
        Self::from_fn(self.dim * d, |i, j| self[(i / d, j / d)] * other[(i % d, j % d)])
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim).map(|i| (0..self.dim).fold(Complex::zero(), |acc, j| acc + self[(i, j)] * v[j])).collect()
    }

    /// ⟨v|A|v⟩.
    pub fn expectation(&self, v: &[Complex<T>]) -> Complex<T> {
        let av = self.mul_vec(v);
        v.iter().zip(&av).fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b)
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    /// Real linear combination a·self + b·other.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Self {
        assert_eq!(self.dim, other.dim);
        Self { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(x, y)| x * a + y * b).collect() }
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;

    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.dim + j]
    }
}

impl<'a, T: Real> Mul<&'a CMatrix<T>> for &'a CMatrix<T> {
    type Output = CMatrix<T>;

    fn mul(self, rhs: &'a CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] = out.data[i * n + j] + a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl<'a, T: Real> Add<&'a CMatrix<T>> for &'a CMatrix<T> {
    type Output = CMatrix<T>;

    fn add(self, rhs: &'a CMatrix<T>) -> CMatrix<T> {
        self.combine(T::one(), rhs, T::one())
    }
}

impl<'a, T: Real> Sub<&'a CMatrix<T>> for &'a CMatrix<T> {
    type Output = CMatrix<T>;

    fn sub(self, rhs: &'a CMatrix<T>) -> CMatrix<T> {
        self.combine(T::one(), rhs, -T::one())
    }
}

/// Inner product ⟨a|b⟩ (conjugate-linear in the first argument).
pub fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Complex::zero(), |acc, (x, y)| acc + x.conj() * y)
}

pub fn norm<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// Kronecker product of vectors, first factor most significant.
pub fn kron_vec<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Lower-triangular L with L·L† = A, or `None` when A is not numerically
/// positive definite.
pub fn cholesky<T: Real>(a: &CMatrix<T>) -> Option<CMatrix<T>> {
    let n = a.dim();
    let mut l = CMatrix::zeros(n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d = d - l[(j, k)].norm_sqr();
        }
        if d.is_nan() || d <= T::zero() {
            return None;
        }
        let d = d.sqrt();
        l[(j, j)] = Complex::new(d, T::zero());
        for i in (j + 1)..n {
            let mut acc = a[(i, j)];
            for k in 0..j {
                acc = acc - l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = acc / d;
        }
    }
    Some(l)
}

/// Inverse of a lower-triangular matrix with nonzero diagonal, by forward substitution.
pub fn lower_triangular_inverse<T: Real>(l: &CMatrix<T>) -> CMatrix<T> {
    let n = l.dim();
    let mut inv = CMatrix::zeros(n);
    for col in 0..n {
        for i in col..n {
            let mut acc: Complex<T> = if i == col { Complex::one() } else { Complex::zero() };
            for k in col..i {
                acc = acc - l[(i, k)] * inv[(k, col)];
            }
            inv[(i, col)] = acc / l[(i, i)];
        }
    }
    inv
}

/// Spectrum of a Hermitian matrix: ascending eigenvalues and eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct EigenDecomposition<T> {
    pub values: Vec<T>,
    pub vectors: CMatrix<T>,
}

impl<T: Real> EigenDecomposition<T> {
    pub fn min(&self) -> T {
        self.values[0]
    }

    pub fn max(&self) -> T {
        *self.values.last().expect("non-empty spectrum")
    }

    pub fn vector(&self, k: usize) -> Vec<Complex<T>> {
        self.vectors.column(k)
    }

    /// V·diag(λ)·V†.
    pub fn reconstruct(&self) -> CMatrix<T> {
        self.reconstruct_with(|x| x)
    }

    /// V·diag(f(λ))·V†.
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> CMatrix<T> {
        let n = self.vectors.dim();
        let mapped: Vec<T> = self.values.iter().map(|&x| f(x)).collect();
        CMatrix::from_fn(n, |i, j| {
            (0..n).fold(Complex::zero(), |acc, k| acc + self.vectors[(i, k)] * self.vectors[(j, k)].conj() * mapped[k])
        })
    }

    /// Largest deviation of V†V from the identity.
    pub fn orthonormality_defect(&self) -> T {
        let gram = &self.vectors.adjoint() * &self.vectors;
        gram.max_abs_diff(&CMatrix::identity(gram.dim()))
    }
}

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigensolver. The input is assumed Hermitian; only the upper
/// triangle steers the rotations, the full matrix is updated.
///
/// Sweeps stop once the off-diagonal Frobenius norm falls below
/// `max(1e-12, 64 eps) * max(1, ‖A‖_F)`.
pub fn jacobi_eigen<T: Real>(input: &CMatrix<T>) -> EigenDecomposition<T> {
    let n = input.dim();
    let mut a = input.hermitian_part();
    let mut v = CMatrix::identity(n);
    let threshold = T::tolerance(1e-12) * input.frobenius_norm().max(T::one());

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) < threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).expect("finite eigenvalues"));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = CMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    EigenDecomposition { values, vectors }
}

fn off_diagonal_norm<T: Real>(a: &CMatrix<T>) -> T {
    let n = a.dim();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc = acc + a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Annihilates a[p][q] with the unitary U = diag(1, e^{-iφ}) · [[c, s], [-s, c]]
/// acting on the (p, q) plane, where a[p][q] = |a[p][q]| e^{iφ}.
fn rotate<T: Real>(a: &mut CMatrix<T>, v: &mut CMatrix<T>, p: usize, q: usize) {
    let n = a.dim();
    let apq = a[(p, q)];
    let magnitude = apq.norm();
    if magnitude <= T::min_positive_value() {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip entries already negligible against both diagonal entries.
    let small = T::epsilon() * T::lit(0.01);
    if magnitude <= small * app.abs() && magnitude <= small * aqq.abs() {
        a[(p, q)] = Complex::zero();
        a[(q, p)] = Complex::zero();
        return;
    }

    let phase = apq / magnitude;
    let phase_conj = phase.conj();
    let theta = (aqq - app) / (T::lit(2.0) * magnitude);
    let t = {
        let t = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
        if theta < T::zero() {
            -t
        } else {
            t
        }
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;

    // A ← A·U
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * phase_conj * s;
        a[(k, q)] = akp * s + akq * phase_conj * c;
    }
    // A ← U†·A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * c;
    }
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
    a[(p, p)] = Complex::new(app - t * magnitude, T::zero());
    a[(q, q)] = Complex::new(aqq + t * magnitude, T::zero());

    // V ← V·U
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * phase_conj * s;
        v[(k, q)] = vkp * s + vkq * phase_conj * c;
    }
}
