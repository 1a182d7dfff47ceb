use serde::{Deserialize, Serialize};

use crate::algebra::{AlgElem, VNAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, TolerancePolicy, C64};

/// Anything that can be evaluated on algebra elements. Checkers accept this rather
/// than [`PreserverMap`] so arbitrary bijections can be probed.
pub trait AlgebraMap: Sync {
    fn apply(&self, a: &AlgElem) -> Result<AlgElem>;
}

impl<F> AlgebraMap for F
where
    F: Fn(&AlgElem) -> Result<AlgElem> + Sync,
{
    fn apply(&self, a: &AlgElem) -> Result<AlgElem> {
        self(a)
    }
}

/// Which trace the exceptional `M₂` map subtracts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceNormalization {
    /// `Tr(1₂) = 2`.
    #[default]
    Usual,
    /// `tr(1₂) = 1`.
    Normalized,
}

/// The named map classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PreserverMap {
    /// `a ↦ v a v*`.
    UnitaryConj { v: AlgElem },
    /// `a ↦ v ā v*`, entrywise conjugate.
    ConjLinearConj { v: AlgElem },
    /// `a ↦ v aᵗ v*`, or `v a* v*` when `conjugate` is set.
    TransposeConj { v: AlgElem, conjugate: bool },
    /// `a ↦ c (v aᵗ v* − τ(a) 1)` on `M₂`.
    ExceptionalI2 {
        c: C64,
        v: AlgElem,
        #[serde(default)]
        trace: TraceNormalization,
    },
    ScalarMultiple { c: C64, inner: Box<PreserverMap> },
    /// `linear_part` on the blocks where `p_c` is the identity, `conj_part` elsewhere.
    CentralSplit { p_c: AlgElem, linear_part: Box<PreserverMap>, conj_part: Box<PreserverMap> },
    /// `z ↦ z⁻¹` (`0 ↦ 0`) on one-dimensional blocks, identity on the others.
    AbelianInverse,
    /// `z ↦ z|z|` on one-dimensional blocks, identity on the others.
    #[serde(rename = "abelian_zabsz")]
    AbelianZAbsZ,
    /// Applied left to right.
    Composed { maps: Vec<PreserverMap> },
}

fn require_unitary(v: &AlgElem, tol: &TolerancePolicy) -> Result<()> {
    if v.is_unitary(tol) {
        Ok(())
    } else {
        Err(Error::NotUnitary)
    }
}

fn require_nonzero(c: C64) -> Result<()> {
    if c.norm() > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("scalar {c} must be finite and nonzero")))
    }
}

fn m2() -> VNAlgebra {
    VNAlgebra::full(2).expect("valid shape")
}

impl PreserverMap {
    pub fn unitary_conj(v: AlgElem, tol: &TolerancePolicy) -> Result<Self> {
        require_unitary(&v, tol)?;
        Ok(Self::UnitaryConj { v })
    }

    pub fn conj_linear_conj(v: AlgElem, tol: &TolerancePolicy) -> Result<Self> {
        require_unitary(&v, tol)?;
        Ok(Self::ConjLinearConj { v })
    }

    pub fn transpose_conj(v: AlgElem, conjugate: bool, tol: &TolerancePolicy) -> Result<Self> {
        require_unitary(&v, tol)?;
        Ok(Self::TransposeConj { v, conjugate })
    }

    pub fn exceptional_i2(c: C64, v: AlgElem, trace: TraceNormalization, tol: &TolerancePolicy) -> Result<Self> {
        require_nonzero(c)?;
        if v.algebra() != &m2() {
            return Err(Error::AlgebraMismatch(v.algebra().block_dims().to_vec(), vec![2]));
        }
        require_unitary(&v, tol)?;
        Ok(Self::ExceptionalI2 { c, v, trace })
    }

    pub fn scalar_multiple(c: C64, inner: PreserverMap) -> Result<Self> {
        require_nonzero(c)?;
        Ok(Self::ScalarMultiple { c, inner: Box::new(inner) })
    }

    pub fn central_split(
        p_c: AlgElem,
        linear_part: PreserverMap,
        conj_part: PreserverMap,
        tol: &TolerancePolicy,
    ) -> Result<Self> {
        central_mask(&p_c, tol)?;
        for part in [&linear_part, &conj_part] {
            if let Some(dom) = part.domain() {
                if &dom != p_c.algebra() {
                    return Err(Error::AlgebraMismatch(dom.block_dims().to_vec(), p_c.algebra().block_dims().to_vec()));
                }
            }
        }
        Ok(Self::CentralSplit { p_c, linear_part: Box::new(linear_part), conj_part: Box::new(conj_part) })
    }

    pub fn composed(maps: Vec<PreserverMap>) -> Self {
        Self::Composed { maps }
    }

    /// Short name used in property ids.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::UnitaryConj { .. } => "unitary_conj",
            Self::ConjLinearConj { .. } => "conj_linear_conj",
            Self::TransposeConj { .. } => "transpose_conj",
            Self::ExceptionalI2 { .. } => "exceptional_i2",
            Self::ScalarMultiple { .. } => "scalar_multiple",
            Self::CentralSplit { .. } => "central_split",
            Self::AbelianInverse => "abelian_inverse",
            Self::AbelianZAbsZ => "abelian_zabsz",
            Self::Composed { .. } => "composed",
        }
    }

    /// The algebra the map is pinned to, if any. Abelian maps act on every algebra.
    pub fn domain(&self) -> Option<VNAlgebra> {
        match self {
            Self::UnitaryConj { v } | Self::ConjLinearConj { v } | Self::TransposeConj { v, .. } => {
                Some(v.algebra().clone())
            }
            Self::ExceptionalI2 { .. } => Some(m2()),
            Self::ScalarMultiple { inner, .. } => inner.domain(),
            Self::CentralSplit { p_c, .. } => Some(p_c.algebra().clone()),
            Self::AbelianInverse | Self::AbelianZAbsZ => None,
            Self::Composed { maps } => maps.iter().find_map(|m| m.domain()),
        }
    }

    /// Re-runs the constructor checks, e.g. after deserialization.
    pub fn validate(&self, tol: &TolerancePolicy) -> Result<()> {
        match self {
            Self::UnitaryConj { v } | Self::ConjLinearConj { v } | Self::TransposeConj { v, .. } => {
                require_unitary(v, tol)
            }
            Self::ExceptionalI2 { c, v, trace } => Self::exceptional_i2(*c, v.clone(), *trace, tol).map(|_| ()),
            Self::ScalarMultiple { c, inner } => {
                require_nonzero(*c)?;
                inner.validate(tol)
            }
            Self::CentralSplit { p_c, linear_part, conj_part } => {
                linear_part.validate(tol)?;
                conj_part.validate(tol)?;
                Self::central_split(p_c.clone(), (**linear_part).clone(), (**conj_part).clone(), tol).map(|_| ())
            }
            Self::AbelianInverse | Self::AbelianZAbsZ => Ok(()),
            Self::Composed { maps } => maps.iter().try_for_each(|m| m.validate(tol)),
        }
    }

    /// Bijectivity read off the formula.
    ///
    /// Conjugations, transposes and the abelian maps are invertible blockwise and
    /// nonzero scalings preserve that. The exceptional map with the usual trace is
    /// `−c · Ad(vJ)` for `J = [[0,1],[−1,0]]`, hence bijective; with the normalized
    /// trace it sends both `0` and `1` to `0`.
    pub fn is_bijective(&self) -> bool {
        match self {
            Self::ExceptionalI2 { trace, .. } => *trace == TraceNormalization::Usual,
            Self::ScalarMultiple { inner, .. } => inner.is_bijective(),
            Self::CentralSplit { linear_part, conj_part, .. } => linear_part.is_bijective() && conj_part.is_bijective(),
            Self::Composed { maps } => maps.iter().all(|m| m.is_bijective()),
            _ => true,
        }
    }

    pub fn apply(&self, a: &AlgElem) -> Result<AlgElem> {
        match self {
            Self::UnitaryConj { v } => conjugate_by(v, a, |b| b.clone()),
            Self::ConjLinearConj { v } => conjugate_by(v, a, |b| b.conj()),
            Self::TransposeConj { v, conjugate } => {
                if *conjugate {
                    conjugate_by(v, a, |b| b.adjoint())
                } else {
                    conjugate_by(v, a, |b| b.transpose())
                }
            }
            Self::ExceptionalI2 { c, v, trace } => {
                let twisted = conjugate_by(v, a, |b| b.transpose())?;
                let tr = match trace {
                    TraceNormalization::Usual => a.trace(),
                    TraceNormalization::Normalized => a.trace() / 2.0,
                };
                Ok(twisted.sub(&a.algebra().scalar(tr))?.scale(*c))
            }
            Self::ScalarMultiple { c, inner } => Ok(inner.apply(a)?.scale(*c)),
            Self::CentralSplit { p_c, linear_part, conj_part } => {
                a.same_algebra(p_c)?;
                let lin = linear_part.apply(a)?;
                let conj = conj_part.apply(a)?;
                let mask = central_mask(p_c, &TolerancePolicy::default())?;
                let blocks = mask
                    .iter()
                    .enumerate()
                    .map(|(k, &linear)| if linear { lin.block(k).clone() } else { conj.block(k).clone() })
                    .collect();
                lin.algebra().element(blocks)
            }
            Self::AbelianInverse => Ok(abelian_map(a, |z| if z.norm() == 0.0 { z } else { z.inv() })),
            Self::AbelianZAbsZ => Ok(abelian_map(a, |z| z * z.norm())),
            Self::Composed { maps } => maps.iter().try_fold(a.clone(), |acc, m| m.apply(&acc)),
        }
    }
}

impl AlgebraMap for PreserverMap {
    fn apply(&self, a: &AlgElem) -> Result<AlgElem> {
        PreserverMap::apply(self, a)
    }
}

fn conjugate_by(v: &AlgElem, a: &AlgElem, inner: impl Fn(&CMatrix) -> CMatrix) -> Result<AlgElem> {
    a.same_algebra(v)?;
    let blocks = v.blocks().iter().zip(a.blocks()).map(|(vb, ab)| &(vb * &inner(ab)) * &vb.adjoint()).collect();
    a.algebra().element(blocks)
}

fn abelian_map(a: &AlgElem, f: impl Fn(C64) -> C64) -> AlgElem {
    a.map_blocks(|b| if b.rows() == 1 { b.map(&f) } else { b.clone() })
}

/// Per-block flags of a central projection: `true` where it is the block identity.
pub fn central_mask(p: &AlgElem, tol: &TolerancePolicy) -> Result<Vec<bool>> {
    if !p.is_projection(tol) || !p.is_central(tol) {
        return Err(Error::NotCentralProjection);
    }
    Ok(p.blocks().iter().map(|b| b.trace().re > 0.5 * b.rows() as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{I, ONE};

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn m2_elem(rows: &[&[C64]]) -> AlgElem {
        AlgElem::from_matrix(CMatrix::from_rows(rows)).unwrap()
    }

    #[test]
    fn identity_conjugation_is_identity() {
        let alg = VNAlgebra::new(vec![2, 1]).unwrap();
        let map = PreserverMap::unitary_conj(alg.identity(), &tol()).unwrap();
        let a = alg
            .element(vec![CMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]), CMatrix::from_real_rows(&[&[5.0]])])
            .unwrap();
        assert_eq!(map.apply(&a).unwrap(), a);
    }

    #[test]
    fn exceptional_map_sends_unit_to_minus_unit() {
        let one = m2().identity();
        let map = PreserverMap::exceptional_i2(ONE, one.clone(), TraceNormalization::Usual, &tol()).unwrap();
        assert_eq!(map.apply(&one).unwrap(), one.neg());
        let half = PreserverMap::exceptional_i2(ONE, one.clone(), TraceNormalization::Normalized, &tol()).unwrap();
        assert!(half.apply(&one).unwrap().is_zero(&tol()));
        assert!(map.is_bijective() && !half.is_bijective());
    }

    #[test]
    fn exceptional_map_is_a_twisted_conjugation() {
        // aᵗ − Tr(a)1 = −J a J⁻¹ with J = [[0,1],[−1,0]]
        let a = m2_elem(&[&[C64::new(1.0, 2.0), C64::new(-3.0, 0.5)], &[I, C64::new(4.0, -1.0)]]);
        let map = PreserverMap::exceptional_i2(ONE, m2().identity(), TraceNormalization::Usual, &tol()).unwrap();
        let j = CMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let expected = (&(&j * a.block(0)) * &j.adjoint()).scale(C64::new(-1.0, 0.0));
        assert!(map.apply(&a).unwrap().block(0).rel_dist(&expected) < 1e-15);
    }

    #[test]
    fn abelian_maps_on_scalars() {
        let alg = VNAlgebra::new(vec![1, 1]).unwrap();
        let z = alg
            .element(vec![CMatrix::from_rows(&[&[C64::new(3.0, 4.0)]]), CMatrix::zeros(1, 1)])
            .unwrap();
        let w = PreserverMap::AbelianZAbsZ.apply(&z).unwrap();
        assert_eq!(w.block(0)[(0, 0)], C64::new(15.0, 20.0));
        let inv = PreserverMap::AbelianInverse.apply(&z).unwrap();
        assert!((inv.block(0)[(0, 0)] - C64::new(0.12, -0.16)).norm() < 1e-16);
        assert_eq!(inv.block(1)[(0, 0)], C64::new(0.0, 0.0));
    }

    #[test]
    fn constructors_validate() {
        let alg = VNAlgebra::new(vec![2]).unwrap();
        let not_unitary = alg.scalar(C64::new(2.0, 0.0));
        assert_eq!(PreserverMap::unitary_conj(not_unitary, &tol()), Err(Error::NotUnitary));
        assert!(PreserverMap::scalar_multiple(C64::new(0.0, 0.0), PreserverMap::AbelianInverse).is_err());
        let wrong = VNAlgebra::new(vec![3]).unwrap().identity();
        assert!(PreserverMap::exceptional_i2(ONE, wrong, TraceNormalization::Usual, &tol()).is_err());
        let two = VNAlgebra::new(vec![2, 2]).unwrap();
        let half = two.scalar(C64::new(0.5, 0.0));
        let lin = PreserverMap::unitary_conj(two.identity(), &tol()).unwrap();
        assert_eq!(
            PreserverMap::central_split(half, lin.clone(), lin, &tol()),
            Err(Error::NotCentralProjection)
        );
    }

    #[test]
    fn central_split_picks_branch_per_block() {
        let two = VNAlgebra::new(vec![1, 1]).unwrap();
        let p_c = two.central_projection(&[true, false]).unwrap();
        let lin = PreserverMap::unitary_conj(two.identity(), &tol()).unwrap();
        let conj = PreserverMap::conj_linear_conj(two.identity(), &tol()).unwrap();
        let map = PreserverMap::central_split(p_c, lin, conj, &tol()).unwrap();
        let out = map.apply(&two.scalar(I)).unwrap();
        assert_eq!(out.block(0)[(0, 0)], I);
        assert_eq!(out.block(1)[(0, 0)], -I);
    }

    #[test]
    fn json_form_is_tagged() {
        let map = PreserverMap::unitary_conj(m2().identity(), &tol()).unwrap();
        let json = serde_json::to_value(&map).unwrap();
        assert_eq!(json["kind"], "unitary_conj");
        assert_eq!(json["v"]["block_dims"], serde_json::json!([2]));
        let back: PreserverMap = serde_json::from_value(json).unwrap();
        assert_eq!(back, map);
        let ex = PreserverMap::exceptional_i2(I, m2().identity(), TraceNormalization::Normalized, &tol()).unwrap();
        let json = serde_json::to_value(&ex).unwrap();
        assert_eq!(json["c"], serde_json::json!([0.0, 1.0]));
        assert_eq!(json["trace"], "normalized");
        let parsed: PreserverMap = serde_json::from_str(r#"{"kind":"abelian_zabsz"}"#).unwrap();
        assert_eq!(parsed, PreserverMap::AbelianZAbsZ);
    }
}
