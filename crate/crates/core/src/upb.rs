//! Orthonormal product-vector sets, the built-in catalog (Tiles, Pyramid,
//! Shifts, complete computational bases) and the bound entangled state
//! Ω = (I − P_S)/(D − n) each unextendible set generates.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inner, kron_vec, norm, CMatrix};
use crate::operator::{DensityMatrix, HermitianOperator, HilbertStructure};
use crate::scalar::Real;

/// Gram-matrix and projector-trace tolerance for catalog validation.
pub const ORTHONORMAL_TOL: f64 = 1e-10;
const UNIT_NORM_TOL: f64 = 1e-12;

/// A fully product pure state |φ₁⟩⊗…⊗|φₙ⟩ given by its unit local vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductState<T> {
    locals: Vec<Vec<Complex<T>>>,
}

impl<T: Real> ProductState<T> {
    pub fn new(locals: Vec<Vec<Complex<T>>>) -> Result<Self> {
        Self::check_locals(&locals, 0)?;
        Ok(Self { locals })
    }

    /// Normalizes every local vector; fails on a zero vector.
    pub fn normalized(locals: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let locals = locals
            .into_iter()
            .enumerate()
            .map(|(k, v)| {
                let n = norm(&v);
                if n <= T::min_positive_value() {
                    Err(Error::NotUnitVector { member: 0, index: k, norm: 0.0 })
                } else {
                    Ok(v.iter().map(|z| z / n).collect())
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { locals })
    }

    fn check_locals(locals: &[Vec<Complex<T>>], member: usize) -> Result<()> {
        for (index, v) in locals.iter().enumerate() {
            let n = norm(v);
            if (n - T::one()).abs() > T::tolerance(UNIT_NORM_TOL) {
                return Err(Error::NotUnitVector { member, index, norm: n.as_f64() });
            }
        }
        Ok(())
    }

    pub fn locals(&self) -> &[Vec<Complex<T>>] {
        &self.locals
    }

    pub fn local_dims(&self) -> Vec<usize> {
        self.locals.iter().map(Vec::len).collect()
    }

    /// The full vector in the lexicographic composite basis.
    pub fn full_vector(&self) -> Vec<Complex<T>> {
        self.locals.iter().skip(1).fold(self.locals[0].clone(), |acc, v| kron_vec(&acc, v))
    }

    /// |⟨self|other⟩|², computed factor by factor.
    pub fn fidelity(&self, other: &Self) -> T {
        self.locals.iter().zip(&other.locals).map(|(a, b)| inner(a, b).norm_sqr()).fold(T::one(), |acc, f| acc * f)
    }

    pub fn density(&self, structure: &HilbertStructure) -> Result<DensityMatrix<T>> {
        DensityMatrix::pure(&self.full_vector(), structure)
    }
}

/// A named set of mutually orthonormal product vectors with its projector P_S.
#[derive(Clone, Debug)]
pub struct UpbSet<T> {
    name: String,
    structure: HilbertStructure,
    members: Vec<ProductState<T>>,
    projector: HermitianOperator<T>,
}

impl<T: Real> UpbSet<T> {
    /// Validates local dimensions, unit norms, Gram identity and Tr(P_S) = n.
    ///
    /// Unextendibility is a separate, costlier certificate: see
    /// [`crate::witness::compute_lambda`] and [`crate::witness::certify_unextendible`].
    pub fn new(name: impl Into<String>, structure: HilbertStructure, members: Vec<ProductState<T>>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Degenerate("empty product set".into()));
        }
        for (i, m) in members.iter().enumerate() {
            if m.local_dims() != structure.local_dims() {
                return Err(Error::InvalidStructure(format!(
                    "member {i} has local dims {:?}, expected {:?}",
                    m.local_dims(),
                    structure.local_dims()
                )));
            }
            ProductState::check_locals(&m.locals, i)?;
        }

        let vectors: Vec<_> = members.iter().map(ProductState::full_vector).collect();
        let n = vectors.len();
        let mut deviation = T::zero();
        for i in 0..n {
            for j in 0..n {
                let expected = if i == j { Complex::one() } else { Complex::zero() };
                deviation = deviation.max((inner(&vectors[i], &vectors[j]) - expected).norm());
            }
        }
        if deviation > T::tolerance(ORTHONORMAL_TOL) {
            return Err(Error::NotOrthonormal { deviation: deviation.as_f64() });
        }

        let d = structure.total_dim();
        let mut acc = CMatrix::zeros(d);
        for v in &vectors {
            acc = &acc + &CMatrix::outer(v);
        }
        let projector = HermitianOperator::from_hermitian_part(&acc);
        let trace = projector.trace();
        if (trace - T::lit(n as f64)).abs() > T::tolerance(ORTHONORMAL_TOL) {
            return Err(Error::NotOrthonormal { deviation: (trace - T::lit(n as f64)).abs().as_f64() });
        }

        Ok(Self { name: name.into(), structure, members, projector })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn structure(&self) -> &HilbertStructure {
        &self.structure
    }

    pub fn members(&self) -> &[ProductState<T>] {
        &self.members
    }

    /// Cardinality n.
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn projector(&self) -> &HermitianOperator<T> {
        &self.projector
    }

    pub fn total_dim(&self) -> usize {
        self.structure.total_dim()
    }

    pub fn to_export(&self) -> UpbExport {
        UpbExport {
            name: self.name.clone(),
            dims: self.structure.local_dims().to_vec(),
            vectors: self
                .members
                .iter()
                .map(|m| m.locals.iter().map(|v| v.iter().map(|z| [z.re.as_f64(), z.im.as_f64()]).collect()).collect())
                .collect(),
        }
    }

    /// Rebuilds and revalidates a set from its exported form.
    pub fn from_export(export: &UpbExport) -> Result<Self> {
        let structure = HilbertStructure::new(export.dims.clone())?;
        let members = export
            .vectors
            .iter()
            .map(|m| {
                ProductState::new(
                    m.iter()
                        .map(|v| v.iter().map(|&[re, im]| Complex::new(T::lit(re), T::lit(im))).collect())
                        .collect(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(export.name.clone(), structure, members)
    }
}

/// Serialized product set: each member is a list of local vectors, each
/// vector a list of `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpbExport {
    pub name: String,
    pub dims: Vec<usize>,
    pub vectors: Vec<Vec<Vec<[f64; 2]>>>,
}

/// Ω = (I − P_S)/(D − n).
pub fn omega_state<T: Real>(upb: &UpbSet<T>) -> Result<DensityMatrix<T>> {
    let d = upb.total_dim();
    let n = upb.len();
    if n >= d {
        return Err(Error::Degenerate(format!("set of {n} vectors spans the whole {d}-dimensional space")));
    }
    let complement = HermitianOperator::identity(d).combine(T::one(), upb.projector(), -T::one());
    Ok(DensityMatrix::new_unchecked(complement.scale(T::one() / T::lit((d - n) as f64)), upb.structure().clone()))
}

fn real<T: Real>(values: &[f64]) -> Vec<Complex<T>> {
    values.iter().map(|&x| Complex::new(T::lit(x), T::zero())).collect()
}

fn unit<T: Real>(values: &[f64]) -> Vec<Complex<T>> {
    let v = real::<T>(values);
    let n = norm(&v);
    v.iter().map(|z| z / n).collect()
}

fn product<T: Real>(locals: &[&[f64]]) -> ProductState<T> {
    ProductState { locals: locals.iter().map(|v| unit(v)).collect() }
}

/// Tiles UPB in 3⊗3 (n = 5).
pub fn build_tiles<T: Real>() -> UpbSet<T> {
    let members = vec![
        product(&[&[1.0, 0.0, 0.0], &[1.0, -1.0, 0.0]]),
        product(&[&[0.0, 0.0, 1.0], &[0.0, 1.0, -1.0]]),
        product(&[&[1.0, -1.0, 0.0], &[0.0, 0.0, 1.0]]),
        product(&[&[0.0, 1.0, -1.0], &[1.0, 0.0, 0.0]]),
        product(&[&[1.0, 1.0, 1.0], &[1.0, 1.0, 1.0]]),
    ];
    UpbSet::new("tiles", HilbertStructure::bipartite(3, 3).expect("3x3"), members).expect("tiles is orthonormal")
}

/// The five Pyramid apex vectors v_j ∝ (cos 2πj/5, sin 2πj/5, h) with
/// h² = −cos(4π/5), so that ⟨v_j|v_{j±2}⟩ = 0.
pub fn pyramid_vectors<T: Real>() -> Vec<Vec<Complex<T>>> {
    let h = (-(4.0 * std::f64::consts::PI / 5.0).cos()).sqrt();
    (0..5)
        .map(|j| {
            let angle = 2.0 * std::f64::consts::PI * j as f64 / 5.0;
            unit(&[angle.cos(), angle.sin(), h])
        })
        .collect()
}

/// Pyramid UPB in 3⊗3 (n = 5): members v_j ⊗ v_{2j mod 5}.
pub fn build_pyramid<T: Real>() -> UpbSet<T> {
    let v = pyramid_vectors::<T>();
    let members = (0..5).map(|j| ProductState { locals: vec![v[j].clone(), v[(2 * j) % 5].clone()] }).collect();
    UpbSet::new("pyramid", HilbertStructure::bipartite(3, 3).expect("3x3"), members).expect("pyramid is orthonormal")
}

/// Shifts UPB in 2⊗2⊗2 (n = 4): |0,1,+⟩, |1,+,0⟩, |+,0,1⟩, |−,−,−⟩.
pub fn build_shifts<T: Real>() -> UpbSet<T> {
    let zero: &[f64] = &[1.0, 0.0];
    let one: &[f64] = &[0.0, 1.0];
    let plus: &[f64] = &[1.0, 1.0];
    let minus: &[f64] = &[1.0, -1.0];
    let members = vec![
        product(&[zero, one, plus]),
        product(&[one, plus, zero]),
        product(&[plus, zero, one]),
        product(&[minus, minus, minus]),
    ];
    UpbSet::new("shifts", HilbertStructure::new(vec![2, 2, 2]).expect("2x2x2"), members).expect("shifts is orthonormal")
}

/// Computational product basis of `structure`. Complete, hence extendible
/// in no direction but also not a UPB: P_S = I and Ω does not exist.
pub fn build_complete_basis<T: Real>(structure: &HilbertStructure) -> UpbSet<T> {
    let members = (0..structure.total_dim())
        .map(|index| {
            let digits = structure.split_index(index);
            ProductState {
                locals: digits
                    .iter()
                    .zip(structure.local_dims())
                    .map(|(&i, &d)| {
                        let mut v = vec![Complex::zero(); d];
                        v[i] = Complex::one();
                        v
                    })
                    .collect(),
            }
        })
        .collect();
    let name =
        format!("complete-{}", structure.local_dims().iter().map(usize::to_string).collect::<Vec<_>>().join("x"));
    UpbSet::new(name, structure.clone(), members).expect("computational basis is orthonormal")
}

/// Names accepted by [`by_name`].
pub const CATALOG: &[&str] = &["tiles", "pyramid", "shifts", "complete-2x2", "complete-2x2x2"];

pub fn by_name<T: Real>(name: &str) -> Result<UpbSet<T>> {
    match name {
        "tiles" => Ok(build_tiles()),
        "pyramid" => Ok(build_pyramid()),
        "shifts" => Ok(build_shifts()),
        "complete-2x2" => Ok(build_complete_basis(&HilbertStructure::bipartite(2, 2)?)),
        "complete-2x2x2" => Ok(build_complete_basis(&HilbertStructure::new(vec![2, 2, 2])?)),
        other => Err(Error::UnknownUpb(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{is_ppt_all_cuts, PSD_TOL};

    /// Gram matrix from the raw full vectors, independent of the constructor's check.
    fn gram_defect(upb: &UpbSet<f64>) -> f64 {
        let vs: Vec<_> = upb.members().iter().map(|m| m.full_vector()).collect();
        let mut worst: f64 = 0.0;
        for (i, a) in vs.iter().enumerate() {
            for (j, b) in vs.iter().enumerate() {
                let ip: Complex<f64> = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((ip - target).norm());
            }
        }
        worst
    }

    #[test]
    fn catalog_gram_identities() {
        assert!(gram_defect(&build_tiles()) < 1e-10);
        assert!(gram_defect(&build_pyramid()) < 1e-10);
        assert!(gram_defect(&build_shifts()) < 1e-12);
    }

    #[test]
    fn catalog_projector_traces_and_idempotence() {
        for name in CATALOG {
            let upb = by_name::<f64>(name).unwrap();
            let p = upb.projector();
            assert!((p.trace() - upb.len() as f64).abs() < 1e-10, "{name}");
            let p2 = p.matrix() * p.matrix();
            assert!(p2.max_abs_diff(p.matrix()) < 1e-10, "{name}");
        }
    }

    #[test]
    fn pyramid_apex_orthogonality() {
        let v = pyramid_vectors::<f64>();
        for j in 0..5 {
            assert!(inner(&v[j], &v[(j + 2) % 5]).norm() < 1e-12);
        }
    }

    #[test]
    fn omega_spectrum_and_overlaps() {
        let upb = build_tiles::<f64>();
        let omega = omega_state(&upb).unwrap();
        assert!((omega.op().trace() - 1.0).abs() < 1e-12);
        let e = omega.op().eigen();
        for (k, &x) in e.values.iter().enumerate() {
            let expected = if k < 5 { 0.0 } else { 0.25 };
            assert!((x - expected).abs() < 1e-10, "eigenvalue {k} = {x}");
        }
        for m in upb.members() {
            assert!(omega.op().expectation(&m.full_vector()).abs() < 1e-12);
        }
    }

    #[test]
    fn omega_is_ppt_everywhere() {
        for upb in [build_tiles::<f64>(), build_pyramid(), build_shifts()] {
            let r = is_ppt_all_cuts(&omega_state(&upb).unwrap(), PSD_TOL).unwrap();
            assert!(r.ppt, "{}: {:?}", upb.name(), r);
        }
    }

    #[test]
    fn complete_basis_has_no_omega() {
        let upb = by_name::<f64>("complete-2x2").unwrap();
        assert_eq!(upb.len(), 4);
        assert!(matches!(omega_state(&upb), Err(Error::Degenerate(_))));
    }

    #[test]
    fn constructor_rejects_non_orthogonal_members() {
        let s = HilbertStructure::bipartite(2, 2).unwrap();
        let members = vec![product::<f64>(&[&[1.0, 0.0], &[1.0, 0.0]]), product(&[&[1.0, 0.0], &[1.0, 1.0]])];
        assert!(matches!(UpbSet::new("bad", s.clone(), members), Err(Error::NotOrthonormal { .. })));
        let wrong_dims = vec![product::<f64>(&[&[1.0, 0.0, 0.0], &[1.0, 0.0]])];
        assert!(matches!(UpbSet::new("bad", s, wrong_dims), Err(Error::InvalidStructure(_))));
    }

    #[test]
    fn unnormalized_local_vector_rejected() {
        let v = vec![vec![Complex::new(1.0, 0.0), Complex::new(1.0, 0.0)]];
        assert!(matches!(ProductState::<f64>::new(v), Err(Error::NotUnitVector { .. })));
    }

    #[test]
    fn export_roundtrip() {
        let upb = build_pyramid::<f64>();
        let back = UpbSet::<f64>::from_export(&upb.to_export()).unwrap();
        assert!(back.projector().max_abs_diff(upb.projector()) < 1e-15);
        assert_eq!(back.name(), "pyramid");
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(by_name::<f64>("nope"), Err(Error::UnknownUpb(_))));
    }

    #[test]
    fn f32_catalog_builds() {
        let upb = build_tiles::<f32>();
        assert!((upb.projector().trace() - 5.0).abs() < 1e-5);
    }
}
