//! The λ-Aluthge transform `Δ_λ(a) = |a|^λ u |a|^{1−λ}` and executable checks for the
//! identities it satisfies.

use serde::{Deserialize, Serialize};

use crate::algebra::AlgElem;
use crate::error::{Error, Result};
use crate::linalg::{inner, svd, vec_norm, CMatrix, TolerancePolicy, C64};

/// Exponent of the transform, validated to lie in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Lambda(f64);

impl Lambda {
    pub const ZERO: Lambda = Lambda(0.0);
    pub const HALF: Lambda = Lambda(0.5);
    pub const ONE: Lambda = Lambda(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::BadLambda(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    fn require_positive(self) -> Result<()> {
        if self.0 > 0.0 {
            Ok(())
        } else {
            Err(Error::BadLambda(self.0))
        }
    }
}

impl TryFrom<f64> for Lambda {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        Lambda::new(v)
    }
}

impl From<Lambda> for f64 {
    fn from(l: Lambda) -> f64 {
        l.0
    }
}

/// `Δ_λ` of a single square matrix.
///
/// With `a = U Σ V*` truncated to the numerical rank `k`, `|a|^t = V_k Σ_k^t V_k*` and
/// `u = U_k V_k*`, so `Δ_λ(a) = V_k Σ_k^λ (V_k* U_k) Σ_k^{1−λ} V_k*`. At `λ = 1` the right
/// factor is the range projection of `|a|`, giving `|a| u`.
pub fn aluthge_matrix(a: &CMatrix, lambda: Lambda, tol: &TolerancePolicy) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    if lambda.0 == 0.0 {
        return Ok(a.clone());
    }
    let n = a.rows();
    let s = svd(a, tol)?;
    let k = s.rank;
    if k == 0 {
        return Ok(CMatrix::zeros(n, n));
    }
    let left: Vec<f64> = s.sigma[..k].iter().map(|x| x.powf(lambda.0)).collect();
    let right: Vec<f64> = s.sigma[..k].iter().map(|x| x.powf(1.0 - lambda.0)).collect();
    // core = Σ^λ (V_k* U_k) Σ^{1−λ}
    let core = CMatrix::from_fn(k, k, |i, j| {
        let w: C64 = (0..n).map(|r| s.v[(r, i)].conj() * s.u[(r, j)]).sum();
        w * left[i] * right[j]
    });
    let vk = CMatrix::from_fn(n, k, |r, c| s.v[(r, c)]);
    Ok(&(&vk * &core) * &vk.adjoint())
}

/// Blockwise `Δ_λ`. `λ = 0` returns the input unchanged.
pub fn aluthge(a: &AlgElem, lambda: Lambda, tol: &TolerancePolicy) -> Result<AlgElem> {
    if lambda.0 == 0.0 {
        return Ok(a.clone());
    }
    a.try_map_blocks(|b| aluthge_matrix(b, lambda, tol))
}

/// `||a(a*a) − (a*a)a||_F / max(1, ||a||_F^3)`.
pub fn quasinormal_residual(a: &AlgElem) -> f64 {
    let num: f64 = a
        .blocks()
        .iter()
        .map(|b| {
            let bb = &b.adjoint() * b;
            (&(b * &bb) - &(&bb * b)).fro_norm().powi(2)
        })
        .sum::<f64>()
        .sqrt();
    num / 1f64.max(a.fro_norm().powi(3))
}

pub fn is_quasinormal(a: &AlgElem, tol: &TolerancePolicy) -> bool {
    quasinormal_residual(a) <= tol.eq_tol
}

/// Outcome of evaluating one instance of an implication or equivalence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheck {
    /// The statement held on this instance.
    pub holds: bool,
    /// The premise of an implication was false, so the instance carries no evidence.
    pub vacuous: bool,
    /// Named numeric quantities behind the decision.
    pub residuals: Vec<(String, f64)>,
}

impl LemmaCheck {
    fn new(holds: bool, vacuous: bool, residuals: &[(&str, f64)]) -> Self {
        Self { holds, vacuous, residuals: residuals.iter().map(|(k, v)| (k.to_string(), *v)).collect() }
    }

    /// Largest residual recorded for this instance.
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|(_, v)| *v).fold(0.0, f64::max)
    }
}

/// Quasi-normal ⟺ `Δ_λ(a) = a`, for `λ ∈ (0, 1]`.
pub fn check_fixed_point_lemma(a: &AlgElem, lambda: Lambda, tol: &TolerancePolicy) -> Result<LemmaCheck> {
    lambda.require_positive()?;
    let qn = quasinormal_residual(a);
    let fixed = aluthge(a, lambda, tol)?.rel_dist(a);
    let holds = (qn <= tol.eq_tol) == (fixed <= tol.eq_tol);
    Ok(LemmaCheck::new(holds, false, &[("quasinormal", qn), ("fixed", fixed)]))
}

/// `Δ_λ(ap) = a` ⟺ (`a = pa = ap` and `a` quasi-normal), for a projection `p`.
pub fn check_ap_lemma(a: &AlgElem, p: &AlgElem, lambda: Lambda, tol: &TolerancePolicy) -> Result<LemmaCheck> {
    lambda.require_positive()?;
    if !p.is_projection(tol) {
        return Err(Error::NotProjection);
    }
    let ap = a.mul(p)?;
    let transform = aluthge(&ap, lambda, tol)?.rel_dist(a);
    let left_support = p.mul(a)?.rel_dist(a);
    let right_support = ap.rel_dist(a);
    let qn = quasinormal_residual(a);
    let lhs = transform <= tol.eq_tol;
    let rhs = left_support <= tol.eq_tol && right_support <= tol.eq_tol && qn <= tol.eq_tol;
    Ok(LemmaCheck::new(
        lhs == rhs,
        false,
        &[("transform", transform), ("pa", left_support), ("ap", right_support), ("quasinormal", qn)],
    ))
}

/// `Δ_λ(a) = 1` ⟹ `a = 1`, plus `Δ_λ(1) = 1`.
pub fn check_identity_lemma(a: &AlgElem, lambda: Lambda, tol: &TolerancePolicy) -> Result<LemmaCheck> {
    let one = a.algebra().identity();
    let unit = aluthge(&one, lambda, tol)?.rel_dist(&one);
    let to_one = aluthge(a, lambda, tol)?.rel_dist(&one);
    let is_one = a.rel_dist(&one);
    let premise = to_one <= tol.eq_tol;
    let holds = unit <= tol.eq_tol && (!premise || is_one <= 10.0 * tol.eq_tol);
    Ok(LemmaCheck::new(holds, !premise, &[("unit", unit), ("transform_to_one", to_one), ("distance_to_one", is_one)]))
}

/// For quasi-normal `a`: `Δ_λ(a*) = a` ⟹ `a* = a`.
pub fn check_qnormal_adjoint_lemma(a: &AlgElem, lambda: Lambda, tol: &TolerancePolicy) -> Result<LemmaCheck> {
    if !is_quasinormal(a, tol) {
        return Err(Error::NotQuasiNormal);
    }
    let adj = a.adjoint();
    let premise_res = aluthge(&adj, lambda, tol)?.rel_dist(a);
    let sym = adj.rel_dist(a);
    let premise = premise_res <= tol.eq_tol;
    let holds = !premise || sym <= 10.0 * tol.eq_tol;
    Ok(LemmaCheck::new(holds, !premise, &[("premise", premise_res), ("asymmetry", sym)]))
}

/// `Δ_λ(a) = 0` ⟺ `a² = 0`, for `λ ∈ (0, 1]`.
pub fn check_kernel_lemma(a: &AlgElem, lambda: Lambda, tol: &TolerancePolicy) -> Result<LemmaCheck> {
    lambda.require_positive()?;
    let scale = a.fro_norm();
    let transform = aluthge(a, lambda, tol)?.fro_norm() / scale.max(f64::MIN_POSITIVE);
    let square = a.mul(a)?.fro_norm() / (scale * scale).max(f64::MIN_POSITIVE);
    let holds = scale == 0.0 || (transform <= tol.eq_tol) == (square <= tol.eq_tol);
    Ok(LemmaCheck::new(holds, false, &[("transform", transform), ("square", square)]))
}

/// Closed form `Δ_λ(x ⊗ y) = (⟨x|y⟩ / ||y||²) y ⊗ y` for `λ ∈ (0, 1]`; `λ = 0` gives
/// `x ⊗ y` itself.
pub fn rank_one_aluthge(x: &[C64], y: &[C64], lambda: Lambda) -> Result<CMatrix> {
    if x.len() != y.len() {
        return Err(Error::ShapeMismatch(format!("vectors of length {} and {}", x.len(), y.len())));
    }
    let ny = vec_norm(y);
    if ny == 0.0 {
        return Err(Error::ZeroVector);
    }
    if lambda.0 == 0.0 {
        return Ok(CMatrix::outer(x, y));
    }
    let coeff = inner(x, y) / (ny * ny);
    Ok(CMatrix::outer(y, y).scale(coeff))
}

/// `||Δ_λ((x ⊗ y)*) − Δ_λ(x ⊗ y)*||_F`, computed through the general transform.
pub fn adjoint_gap(x: &[C64], y: &[C64], lambda: Lambda, tol: &TolerancePolicy) -> Result<f64> {
    let a = CMatrix::outer(x, y);
    let of_adjoint = aluthge_matrix(&a.adjoint(), lambda, tol)?;
    let adjoint_of = aluthge_matrix(&a, lambda, tol)?.adjoint();
    Ok((&of_adjoint - &adjoint_of).fro_norm())
}

/// `[a, Δ_λ(a), Δ_λ²(a), …]` with `steps + 1` entries.
pub fn aluthge_orbit(a: &AlgElem, lambda: Lambda, steps: usize, tol: &TolerancePolicy) -> Result<Vec<AlgElem>> {
    let mut orbit = Vec::with_capacity(steps + 1);
    orbit.push(a.clone());
    for _ in 0..steps {
        let next = aluthge(orbit.last().expect("nonempty"), lambda, tol)?;
        orbit.push(next);
    }
    Ok(orbit)
}

/// Per-step `(quasi-normality residual, relative distance to the previous iterate)`.
pub fn orbit_profile(orbit: &[AlgElem]) -> Vec<(f64, f64)> {
    orbit
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let prev = if i == 0 { 0.0 } else { x.rel_dist(&orbit[i - 1]) };
            (quasinormal_residual(x), prev)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::VNAlgebra;
    use crate::linalg::{I, ONE, ZERO};

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn elem(rows: &[&[f64]]) -> AlgElem {
        AlgElem::from_matrix(CMatrix::from_real_rows(rows)).unwrap()
    }

    fn lambdas() -> [Lambda; 4] {
        [0.25, 0.5, 0.75, 1.0].map(|l| Lambda::new(l).unwrap())
    }

    #[test]
    fn lambda_range() {
        assert!(Lambda::new(-0.1).is_err());
        assert!(Lambda::new(1.5).is_err());
        assert!(Lambda::new(f64::NAN).is_err());
        assert_eq!(serde_json::from_str::<Lambda>("0.5").unwrap(), Lambda::HALF);
        assert!(serde_json::from_str::<Lambda>("2.0").is_err());
    }

    #[test]
    fn normal_matrix_is_fixed() {
        let a = elem(&[&[2.0, 0.0], &[0.0, -3.0]]);
        for l in lambdas() {
            assert!(aluthge(&a, l, &tol()).unwrap().rel_dist(&a) < 1e-14);
        }
    }

    #[test]
    fn nilpotent_goes_to_zero() {
        let a = elem(&[&[0.0, 1.0], &[0.0, 0.0]]);
        for l in lambdas() {
            assert!(aluthge(&a, l, &tol()).unwrap().fro_norm() < 1e-15);
        }
    }

    #[test]
    fn rank_one_example() {
        let a = elem(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let expected = elem(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let d = aluthge(&a, Lambda::HALF, &tol()).unwrap();
        assert!(d.rel_dist(&expected) < 1e-14, "{d:?}");
        let r = rank_one_aluthge(&[ONE, ZERO], &[ONE, ONE], Lambda::HALF).unwrap();
        assert!(r.rel_dist(expected.block(0)) < 1e-15);
    }

    #[test]
    fn rank_one_special_cases() {
        let y = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let r = rank_one_aluthge(&y, &y, Lambda::HALF).unwrap();
        assert!(r.rel_dist(&CMatrix::outer(&y, &y)) < 1e-15);
        let x = [C64::new(0.8, 0.0), C64::new(0.0, -0.6)];
        // ⟨x|y⟩ = 0.48 + (−0.6i)(−0.8i) = 0
        assert!(inner(&x, &y).norm() < 1e-15);
        assert!(rank_one_aluthge(&x, &y, Lambda::ONE).unwrap().fro_norm() < 1e-15);
        assert_eq!(rank_one_aluthge(&x, &[ZERO, ZERO], Lambda::ONE), Err(Error::ZeroVector));
        assert_eq!(rank_one_aluthge(&x, &y, Lambda::ZERO).unwrap(), CMatrix::outer(&x, &y));
    }

    #[test]
    fn lambda_zero_is_bit_exact_identity() {
        let a = AlgElem::from_matrix(CMatrix::from_rows(&[&[C64::new(0.1, 0.3), I], &[ONE, C64::new(-2.0, 1e-300)]])).unwrap();
        assert_eq!(aluthge(&a, Lambda::ZERO, &tol()).unwrap(), a);
    }

    #[test]
    fn quasinormal_examples() {
        let tol = tol();
        assert!(is_quasinormal(&elem(&[&[2.0, 0.0], &[0.0, -3.0]]), &tol));
        assert!(!is_quasinormal(&elem(&[&[1.0, 1.0], &[0.0, 0.0]]), &tol));
        // u|a| with u a non-unitary partial isometry commuting with |a|
        let a = elem(&[&[0.0, 2.0, 0.0], &[2.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]);
        assert!(is_quasinormal(&a, &tol));
    }

    #[test]
    fn fixed_point_lemma_instances() {
        let tol = tol();
        let zero = VNAlgebra::full(2).unwrap().zero();
        assert!(check_fixed_point_lemma(&zero, Lambda::HALF, &tol).unwrap().holds);
        let a = elem(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let c = check_fixed_point_lemma(&a, Lambda::HALF, &tol).unwrap();
        assert!(c.holds);
        assert!(c.residuals[1].1 > 0.1);
        assert!(check_fixed_point_lemma(&a, Lambda::ZERO, &tol).is_err());
    }

    #[test]
    fn ap_lemma_instances() {
        let tol = tol();
        let p = elem(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let c = check_ap_lemma(&p, &p, Lambda::HALF, &tol).unwrap();
        assert!(c.holds && c.residuals[0].1 < 1e-14);
        let a = elem(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let c = check_ap_lemma(&a, &p, Lambda::ONE, &tol).unwrap();
        assert!(c.holds && c.residuals[0].1 > 0.1);
        assert_eq!(check_ap_lemma(&a, &a, Lambda::ONE, &tol), Err(Error::NotProjection));
    }

    #[test]
    fn identity_lemma_instances() {
        let tol = tol();
        let one = VNAlgebra::full(2).unwrap().identity();
        let c = check_identity_lemma(&one, Lambda::HALF, &tol).unwrap();
        assert!(c.holds && !c.vacuous);
        let d = elem(&[&[1.0, 0.0], &[0.0, 2.0]]);
        let c = check_identity_lemma(&d, Lambda::HALF, &tol).unwrap();
        assert!(c.holds && c.vacuous);
    }

    #[test]
    fn qnormal_adjoint_instances() {
        let tol = tol();
        let h = elem(&[&[1.0, 2.0], &[2.0, 0.0]]);
        let c = check_qnormal_adjoint_lemma(&h, Lambda::HALF, &tol).unwrap();
        assert!(c.holds && !c.vacuous);
        let ip = AlgElem::from_matrix(CMatrix::from_rows(&[&[I, ZERO], &[ZERO, ZERO]])).unwrap();
        let c = check_qnormal_adjoint_lemma(&ip, Lambda::HALF, &tol).unwrap();
        assert!(c.holds && c.vacuous);
        let nq = elem(&[&[1.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(check_qnormal_adjoint_lemma(&nq, Lambda::HALF, &tol), Err(Error::NotQuasiNormal));
    }

    #[test]
    fn orbit_of_nilpotent_and_normal() {
        let tol = tol();
        let n = elem(&[&[0.0, 3.0], &[0.0, 0.0]]);
        let orbit = aluthge_orbit(&n, Lambda::HALF, 3, &tol).unwrap();
        assert_eq!(orbit.len(), 4);
        assert!(orbit[1..].iter().all(|x| x.fro_norm() < 1e-15));
        let d = elem(&[&[1.0, 0.0], &[0.0, 2.0]]);
        let orbit = aluthge_orbit(&d, Lambda::HALF, 5, &tol).unwrap();
        assert!(orbit_profile(&orbit).iter().all(|&(q, step)| q < 1e-15 && step < 1e-15));
    }
}
