//! Finite-dimensional von Neumann algebras modelled as direct sums `M_{n_1} ⊕ … ⊕ M_{n_K}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, TolerancePolicy, C64};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct VNAlgebra {
    block_dims: Vec<usize>,
}

impl TryFrom<Vec<usize>> for VNAlgebra {
    type Error = Error;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        VNAlgebra::new(dims)
    }
}

impl From<VNAlgebra> for Vec<usize> {
    fn from(a: VNAlgebra) -> Self {
        a.block_dims
    }
}

impl VNAlgebra {
    pub fn new(block_dims: Vec<usize>) -> Result<Self> {
        if block_dims.is_empty() {
            return Err(Error::InvalidAlgebra("at least one block is required".into()));
        }
        if block_dims.contains(&0) {
            return Err(Error::InvalidAlgebra("block dimensions must be positive".into()));
        }
        Ok(Self { block_dims })
    }

    /// The full matrix algebra `M_n`.
    pub fn full(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn num_blocks(&self) -> usize {
        self.block_dims.len()
    }

    pub fn has_abelian_summand(&self) -> bool {
        self.block_dims.contains(&1)
    }

    pub fn max_block(&self) -> usize {
        self.block_dims.iter().copied().max().unwrap_or(0)
    }

    /// Sum of block dimensions (dimension of the underlying Hilbert space).
    pub fn total_dim(&self) -> usize {
        self.block_dims.iter().sum()
    }

    pub fn zero(&self) -> AlgElem {
        self.from_block_fn(|n| CMatrix::zeros(n, n))
    }

    pub fn identity(&self) -> AlgElem {
        self.from_block_fn(CMatrix::identity)
    }

    pub fn scalar(&self, alpha: C64) -> AlgElem {
        self.from_block_fn(|n| CMatrix::identity(n).scale(alpha))
    }

    fn from_block_fn(&self, f: impl Fn(usize) -> CMatrix) -> AlgElem {
        AlgElem { algebra: self.clone(), blocks: self.block_dims.iter().map(|&n| f(n)).collect() }
    }

    /// Element equal to `m` in block `k` and zero elsewhere.
    pub fn embed(&self, k: usize, m: CMatrix) -> Result<AlgElem> {
        self.check_index(k)?;
        let n = self.block_dims[k];
        if m.shape() != (n, n) {
            return Err(Error::ShapeMismatch(format!("block {k} is {n}x{n}, got {:?}", m.shape())));
        }
        let mut e = self.zero();
        e.blocks[k] = m;
        Ok(e)
    }

    pub fn element(&self, blocks: Vec<CMatrix>) -> Result<AlgElem> {
        AlgElem::new(self.clone(), blocks)
    }

    /// Indicator of block `k` (a minimal central projection).
    pub fn block_identity(&self, k: usize) -> Result<AlgElem> {
        self.check_index(k)?;
        self.embed(k, CMatrix::identity(self.block_dims[k]))
    }

    /// Canonical basis of the center: the block indicators.
    pub fn center_basis(&self) -> Vec<AlgElem> {
        (0..self.num_blocks()).map(|k| self.block_identity(k).expect("index in range")).collect()
    }

    /// Central projection given by a block mask.
    pub fn central_projection(&self, mask: &[bool]) -> Result<AlgElem> {
        if mask.len() != self.num_blocks() {
            return Err(Error::ShapeMismatch(format!("mask has {} entries for {} blocks", mask.len(), self.num_blocks())));
        }
        Ok(self.from_block_fn_indexed(|k, n| if mask[k] { CMatrix::identity(n) } else { CMatrix::zeros(n, n) }))
    }

    fn from_block_fn_indexed(&self, f: impl Fn(usize, usize) -> CMatrix) -> AlgElem {
        AlgElem {
            algebra: self.clone(),
            blocks: self.block_dims.iter().enumerate().map(|(k, &n)| f(k, n)).collect(),
        }
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k >= self.num_blocks() {
            return Err(Error::BadIndex { index: k, blocks: self.num_blocks() });
        }
        Ok(())
    }
}

/// Element of a [`VNAlgebra`]: one square matrix per block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ElemRepr", into = "ElemRepr")]
pub struct AlgElem {
    algebra: VNAlgebra,
    blocks: Vec<CMatrix>,
}

#[derive(Serialize, Deserialize)]
struct ElemRepr {
    block_dims: Vec<usize>,
    blocks: Vec<CMatrix>,
}

impl TryFrom<ElemRepr> for AlgElem {
    type Error = Error;

    fn try_from(r: ElemRepr) -> Result<Self> {
        AlgElem::new(VNAlgebra::new(r.block_dims)?, r.blocks)
    }
}

impl From<AlgElem> for ElemRepr {
    fn from(e: AlgElem) -> Self {
        ElemRepr { block_dims: e.algebra.block_dims, blocks: e.blocks }
    }
}

impl AlgElem {
    pub fn new(algebra: VNAlgebra, blocks: Vec<CMatrix>) -> Result<Self> {
        if blocks.len() != algebra.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "{} blocks given for algebra {:?}",
                blocks.len(),
                algebra.block_dims
            )));
        }
        for (k, (b, &n)) in blocks.iter().zip(&algebra.block_dims).enumerate() {
            if b.shape() != (n, n) {
                return Err(Error::ShapeMismatch(format!("block {k} must be {n}x{n}, got {:?}", b.shape())));
            }
        }
        Ok(Self { algebra, blocks })
    }

    /// Element of `M_n` (single block).
    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
        }
        Ok(Self { algebra: VNAlgebra::full(m.rows())?, blocks: vec![m] })
    }

    pub fn algebra(&self) -> &VNAlgebra {
        &self.algebra
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &CMatrix {
        &self.blocks[k]
    }

    pub fn into_blocks(self) -> Vec<CMatrix> {
        self.blocks
    }

    /// Applies `f` to every block; `f` must preserve block shapes.
    pub fn map_blocks(&self, f: impl Fn(&CMatrix) -> CMatrix) -> AlgElem {
        let blocks: Vec<CMatrix> = self.blocks.iter().map(f).collect();
        debug_assert!(blocks.iter().zip(&self.blocks).all(|(a, b)| a.shape() == b.shape()));
        AlgElem { algebra: self.algebra.clone(), blocks }
    }

    pub fn try_map_blocks(&self, f: impl Fn(&CMatrix) -> Result<CMatrix>) -> Result<AlgElem> {
        let blocks = self.blocks.iter().map(f).collect::<Result<Vec<_>>>()?;
        AlgElem::new(self.algebra.clone(), blocks)
    }

    fn zip_blocks(&self, other: &AlgElem, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Result<AlgElem> {
        self.same_algebra(other)?;
        Ok(AlgElem {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn same_algebra(&self, other: &AlgElem) -> Result<()> {
        if self.algebra != other.algebra {
            return Err(Error::AlgebraMismatch(self.algebra.block_dims.clone(), other.algebra.block_dims.clone()));
        }
        Ok(())
    }

    pub fn mul(&self, other: &AlgElem) -> Result<AlgElem> {
        self.zip_blocks(other, |a, b| a * b)
    }

    pub fn add(&self, other: &AlgElem) -> Result<AlgElem> {
        self.zip_blocks(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &AlgElem) -> Result<AlgElem> {
        self.zip_blocks(other, |a, b| a - b)
    }

    pub fn scale(&self, alpha: C64) -> AlgElem {
        self.map_blocks(|b| b.scale(alpha))
    }

    pub fn neg(&self) -> AlgElem {
        self.map_blocks(|b| -b)
    }

    pub fn adjoint(&self) -> AlgElem {
        self.map_blocks(CMatrix::adjoint)
    }

    /// Jordan product `a ∘ b = (ab + ba) / 2`.
    pub fn jordan(&self, other: &AlgElem) -> Result<AlgElem> {
        self.zip_blocks(other, |a, b| (&(a * b) + &(b * a)).scale_real(0.5))
    }

    /// Triple product `{a, b, c} = (a b* c + c b* a) / 2`.
    pub fn triple(&self, b: &AlgElem, c: &AlgElem) -> Result<AlgElem> {
        self.same_algebra(b)?;
        self.same_algebra(c)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&b.blocks)
            .zip(&c.blocks)
            .map(|((x, y), z)| {
                let ys = y.adjoint();
                (&(&(x * &ys) * z) + &(&(z * &ys) * x)).scale_real(0.5)
            })
            .collect();
        Ok(AlgElem { algebra: self.algebra.clone(), blocks })
    }

    pub fn fro_norm(&self) -> f64 {
        self.blocks.iter().map(|b| b.fro_norm().powi(2)).sum::<f64>().sqrt()
    }

    /// Relative Frobenius distance; infinite across algebras.
    pub fn rel_dist(&self, other: &AlgElem) -> f64 {
        if self.algebra != other.algebra {
            return f64::INFINITY;
        }
        let diff: f64 = self.blocks.iter().zip(&other.blocks).map(|(a, b)| (a - b).fro_norm().powi(2)).sum::<f64>().sqrt();
        diff / 1f64.max(self.fro_norm()).max(other.fro_norm())
    }

    pub fn approx_eq(&self, other: &AlgElem, tol: &TolerancePolicy) -> bool {
        self.rel_dist(other) <= tol.eq_tol
    }

    pub fn is_zero(&self, tol: &TolerancePolicy) -> bool {
        self.fro_norm() <= tol.eq_tol
    }

    pub fn is_hermitian(&self, tol: &TolerancePolicy) -> bool {
        self.approx_eq(&self.adjoint(), tol)
    }

    pub fn is_unitary(&self, tol: &TolerancePolicy) -> bool {
        let one = self.algebra.identity();
        self.blocks.iter().zip(&one.blocks).all(|(u, i)| tol.close(&(&u.adjoint() * u), i) && tol.close(&(u * &u.adjoint()), i))
    }

    /// `(x, y)` with `self = x + i y`, both hermitian.
    pub fn hermitian_part(&self) -> (AlgElem, AlgElem) {
        let x = self.map_blocks(|b| b.hermitian_part());
        let y = self.map_blocks(|b| (b - &b.adjoint()).scale(C64::new(0.0, -0.5)));
        (x, y)
    }

    pub fn trace(&self) -> C64 {
        self.blocks.iter().map(CMatrix::trace).sum()
    }

    // ---- projections ----

    pub fn is_projection(&self, tol: &TolerancePolicy) -> bool {
        self.is_hermitian(tol) && self.approx_eq(&self.mul(self).expect("same algebra"), tol)
    }

    fn require_projection(&self, tol: &TolerancePolicy) -> Result<()> {
        if self.is_projection(tol) {
            Ok(())
        } else {
            Err(Error::NotProjection)
        }
    }

    /// `p ≤ q` iff `pq = p`.
    pub fn proj_leq(&self, q: &AlgElem, tol: &TolerancePolicy) -> Result<bool> {
        self.same_algebra(q)?;
        self.require_projection(tol)?;
        q.require_projection(tol)?;
        Ok(self.mul(q)?.approx_eq(self, tol))
    }

    /// `p ⊥ q` iff `pq = 0`.
    pub fn proj_orthogonal(&self, q: &AlgElem, tol: &TolerancePolicy) -> Result<bool> {
        self.same_algebra(q)?;
        self.require_projection(tol)?;
        q.require_projection(tol)?;
        Ok(self.mul(q)?.is_zero(tol))
    }

    /// Rank-one inside exactly one block and zero elsewhere, i.e. `pAp = ℂp`.
    pub fn is_minimal_projection(&self, tol: &TolerancePolicy) -> bool {
        if !self.is_projection(tol) {
            return false;
        }
        let mut support = self.blocks.iter().filter(|b| b.fro_norm() > tol.eq_tol.sqrt());
        match (support.next(), support.next()) {
            (Some(b), None) => (b.trace().re - 1.0).abs() < 0.5,
            _ => false,
        }
    }

    /// Index of the block supporting a minimal projection.
    pub fn minimal_block(&self, tol: &TolerancePolicy) -> Result<usize> {
        if !self.is_minimal_projection(tol) {
            return Err(Error::NotMinimal);
        }
        Ok(self.blocks.iter().position(|b| b.fro_norm() > tol.eq_tol.sqrt()).expect("minimal projection is nonzero"))
    }

    // ---- partial isometries ----

    pub fn is_partial_isometry(&self, tol: &TolerancePolicy) -> bool {
        let e = self;
        let eee = e.mul(&e.adjoint()).and_then(|x| x.mul(e)).expect("same algebra");
        eee.approx_eq(e, tol)
    }

    fn require_partial_isometry(&self, tol: &TolerancePolicy) -> Result<()> {
        if self.is_partial_isometry(tol) {
            Ok(())
        } else {
            Err(Error::NotPartialIsometry)
        }
    }

    /// Orthogonality of elements: `a b* = b* a = 0` (no partial-isometry requirement).
    pub fn elem_orthogonal(&self, b: &AlgElem, tol: &TolerancePolicy) -> Result<bool> {
        let bs = b.adjoint();
        Ok(self.mul(&bs)?.is_zero(tol) && bs.mul(self)?.is_zero(tol))
    }

    pub fn pi_orthogonal(&self, v: &AlgElem, tol: &TolerancePolicy) -> Result<bool> {
        self.same_algebra(v)?;
        self.require_partial_isometry(tol)?;
        v.require_partial_isometry(tol)?;
        self.elem_orthogonal(v, tol)
    }

    /// `e ≤ v` iff `v − e` is a partial isometry orthogonal to `e`.
    pub fn pi_leq(&self, v: &AlgElem, tol: &TolerancePolicy) -> Result<bool> {
        self.same_algebra(v)?;
        self.require_partial_isometry(tol)?;
        v.require_partial_isometry(tol)?;
        let rest = v.sub(self)?;
        Ok(rest.is_partial_isometry(tol) && rest.elem_orthogonal(self, tol)?)
    }

    /// Cross-check of [`pi_leq`](Self::pi_leq) through `ee* ≤ vv*`, `e*e ≤ v*v` and
    /// `e = ee* v`. The two projection inequalities alone do not suffice: `e = E₁₂`,
    /// `v = 1` satisfies both while `1 − E₁₂` is not a partial isometry.
    pub fn pi_leq_via_projections(&self, v: &AlgElem, tol: &TolerancePolicy) -> Result<bool> {
        self.same_algebra(v)?;
        self.require_partial_isometry(tol)?;
        v.require_partial_isometry(tol)?;
        let (es, vs) = (self.adjoint(), v.adjoint());
        let range = self.mul(&es)?;
        let left = range.proj_leq(&v.mul(&vs)?, tol)?;
        let right = es.mul(self)?.proj_leq(&vs.mul(v)?, tol)?;
        let factor = range.mul(v)?.approx_eq(self, tol);
        Ok(left && right && factor)
    }

    // ---- center ----

    /// Every block is a scalar multiple of its identity.
    pub fn is_central(&self, tol: &TolerancePolicy) -> bool {
        self.blocks.iter().all(|b| {
            let n = b.rows() as f64;
            let s = b.trace() / n;
            tol.close(b, &CMatrix::identity(b.rows()).scale(s))
        })
    }

    /// Hermitian `a, b` operator-commute iff `ab = ba`.
    pub fn operator_commute(&self, b: &AlgElem, tol: &TolerancePolicy) -> Result<bool> {
        self.same_algebra(b)?;
        for x in [self, b] {
            if !x.is_hermitian(tol) {
                return Err(Error::NotHermitian(x.rel_dist(&x.adjoint())));
            }
        }
        Ok(self.mul(b)?.approx_eq(&b.mul(self)?, tol))
    }

    /// Checks `(a∘x)∘b = a∘(x∘b)` on every supplied `x`; the Jordan-operator form of
    /// commutation.
    pub fn operator_commute_jordan(&self, b: &AlgElem, samples: &[AlgElem], tol: &TolerancePolicy) -> Result<bool> {
        for x in samples {
            let lhs = self.jordan(x)?.jordan(b)?;
            let rhs = self.jordan(&x.jordan(b)?)?;
            if !lhs.approx_eq(&rhs, tol) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Standard matrix units `E_ij` of one block.
#[derive(Debug, Clone)]
pub struct MatrixUnitSystem {
    pub block_index: usize,
    pub n: usize,
    units: Vec<AlgElem>,
}

impl MatrixUnitSystem {
    pub fn unit(&self, i: usize, j: usize) -> &AlgElem {
        &self.units[i * self.n + j]
    }
}

pub fn matrix_units(alg: &VNAlgebra, block_index: usize) -> Result<MatrixUnitSystem> {
    alg.check_index(block_index)?;
    let n = alg.block_dims[block_index];
    let mut units = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            units.push(alg.embed(block_index, CMatrix::unit(n, i, j))?);
        }
    }
    Ok(MatrixUnitSystem { block_index, n, units })
}
