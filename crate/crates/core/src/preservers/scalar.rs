use serde::{Deserialize, Serialize};
use serde_json::json;

use super::checks::scalar_payload;
use super::maps::AlgebraMap;
use super::report::{payload, residual, Tally, TrialReport};
use crate::algebra::{AlgElem, VNAlgebra};
use crate::aluthge::{aluthge_matrix, Lambda, LemmaCheck};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, TolerancePolicy, C64, ONE, ZERO};
use crate::sampling::Sampler;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarClass {
    Identity,
    Conjugation,
    Other,
}

/// The function `h` with `Φ(α1) = h(α)1`, sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarMap {
    pub samples: Vec<(C64, C64)>,
    pub classification: ScalarClass,
}

impl ScalarMap {
    /// `h(α)` from the closed form when classified, otherwise from the grid.
    pub fn eval(&self, alpha: C64) -> Option<C64> {
        match self.classification {
            ScalarClass::Identity => Some(alpha),
            ScalarClass::Conjugation => Some(alpha.conj()),
            ScalarClass::Other => self.samples.iter().find(|(a, _)| *a == alpha).map(|(_, h)| *h),
        }
    }
}

/// Sixteen points covering the axes, both half planes and several moduli.
pub fn default_grid() -> Vec<C64> {
    let c = C64::new;
    let third = std::f64::consts::FRAC_PI_3;
    vec![
        c(0.0, 0.0),
        c(1.0, 0.0),
        c(-1.0, 0.0),
        c(0.0, 1.0),
        c(0.0, -1.0),
        c(2.0, 0.0),
        c(0.0, -3.0),
        c(1.0, 1.0),
        c(0.5, -2.0),
        c(-1.5, 0.25),
        c(3.0, 4.0),
        c(-2.0, -2.0),
        c(0.0, 0.1),
        c(10.0, 0.0),
        c(-0.75, 1.25),
        c(third.cos(), third.sin()),
    ]
}

/// The scalar `h(α)` with `Φ(α1) = h(α)1`, or `NotScalar`.
pub fn scalar_image(map: &dyn AlgebraMap, alg: &VNAlgebra, alpha: C64, tol: &TolerancePolicy) -> Result<C64> {
    let image = map.apply(&alg.scalar(alpha))?;
    let h = image.trace() / image.algebra().total_dim() as f64;
    if image.rel_dist(&image.algebra().scalar(h)) > tol.eq_tol {
        return Err(Error::NotScalar);
    }
    Ok(h)
}

pub fn extract_scalar_map(map: &dyn AlgebraMap, alg: &VNAlgebra, grid: &[C64], tol: &TolerancePolicy) -> Result<ScalarMap> {
    let samples = grid.iter().map(|&a| scalar_image(map, alg, a, tol).map(|h| (a, h))).collect::<Result<Vec<_>>>()?;
    let close = |x: C64, y: C64| (x - y).norm() <= tol.eq_tol * x.norm().max(1.0);
    let classification = if samples.iter().all(|&(a, h)| close(a, h)) {
        ScalarClass::Identity
    } else if samples.iter().all(|&(a, h)| close(a.conj(), h)) {
        ScalarClass::Conjugation
    } else {
        ScalarClass::Other
    };
    Ok(ScalarMap { samples, classification })
}

/// The scalar `φ` with `p a p = φ p` for a minimal projection `p`; for `p = ξ ⊗ ξ`
/// this is `⟨aξ|ξ⟩`.
pub fn pure_state_value(p: &AlgElem, a: &AlgElem, tol: &TolerancePolicy) -> Result<C64> {
    p.same_algebra(a)?;
    let k = p.minimal_block(tol)?;
    Ok((p.block(k) * a.block(k)).trace())
}

/// `Φ(p)Φ(a)Φ(p) = h(φ_p(a)) Φ(p)` over sampled minimal `p` and elements `a`.
pub fn check_compression_identity(
    map: &dyn AlgebraMap,
    sampler: &mut Sampler,
    n_trials: usize,
    tol: &TolerancePolicy,
) -> TrialReport {
    let seed = sampler.seed();
    let alg = sampler.algebra().clone();
    let h = match extract_scalar_map(map, &alg, &default_grid(), tol) {
        Ok(h) => h,
        Err(e) => return TrialReport::errored("compression_identity", seed, &e),
    };
    let mut t = Tally::new(tol);
    for _ in 0..n_trials {
        let p = sampler.minimal_projection();
        let a = sampler.element();
        let r = (|| {
            let phi = pure_state_value(&p, &a, tol)?;
            let hphi = match h.eval(phi) {
                Some(v) => v,
                None => scalar_image(map, &alg, phi, tol)?,
            };
            let fp = map.apply(&p)?;
            Ok(residual(&fp.mul(&map.apply(&a)?)?.mul(&fp)?, &fp.scale(hphi)))
        })();
        t.record_result(r, || payload(&[("p", &p), ("a", &a)]));
    }
    t.finish("compression_identity", seed).with_detail(json!({ "h": h.classification }))
}

/// `Φ(αp + βq) = Φ(αp) + Φ(βq)` on orthogonal minimal pairs, and `Φ(αp) = h_p(α)Φ(p)`
/// with `h_p(α)` read off as the pure-state value of `Φ(αp)` at `Φ(p)`. When the map
/// has a global `h` (identity or conjugation on scalars) `h_p` must agree with it.
pub fn check_orthogonal_scalar_additivity(
    map: &dyn AlgebraMap,
    sampler: &mut Sampler,
    n_trials: usize,
    tol: &TolerancePolicy,
) -> TrialReport {
    let seed = sampler.seed();
    let alg = sampler.algebra().clone();
    let global = extract_scalar_map(map, &alg, &default_grid(), tol).ok().filter(|h| h.classification != ScalarClass::Other);
    let mut t = Tally::new(tol);
    if alg.total_dim() < 2 {
        return TrialReport::errored(
            "orthogonal_scalar_additivity",
            seed,
            &Error::InvalidAlgebra("needs two orthogonal minimal projections".into()),
        );
    }
    for i in 0..n_trials {
        let (p, q) = sampler.orthogonal_minimal_pair().expect("dimension checked");
        let (alpha, beta) = if i == 0 { (C64::new(2.0, 0.0), C64::new(0.0, -3.0)) } else { (sampler.scalar(), sampler.scalar()) };
        let r = (|| {
            let (ap, bq) = (p.scale(alpha), q.scale(beta));
            let (fap, fbq) = (map.apply(&ap)?, map.apply(&bq)?);
            let mut r = residual(&map.apply(&ap.add(&bq)?)?, &fap.add(&fbq)?);
            for (proj, scalar, image) in [(&p, alpha, &fap), (&q, beta, &fbq)] {
                let fp = map.apply(proj)?;
                let hp = pure_state_value(&fp, image, tol)?;
                r = r.max(residual(image, &fp.scale(hp)));
                if let Some(h) = &global {
                    let expected = h.eval(scalar).expect("classified");
                    r = r.max((hp - expected).norm() / expected.norm().max(1.0));
                }
            }
            Ok(r)
        })();
        t.record_result(r, || {
            let mut v = payload(&[("p", &p), ("q", &q)]);
            if let (serde_json::Value::Object(m), serde_json::Value::Object(s)) =
                (&mut v, scalar_payload(&[("alpha", alpha), ("beta", beta)]))
            {
                m.extend(s);
            }
            v
        });
    }
    t.finish("orthogonal_scalar_additivity", seed)
}

/// The `M₂` lemma: if `Δ_λ(a(1−p̂)) = μ(1−p̂)` and `Δ_λ((1−p̂)a*) = μ̄(1−p̂)` for a
/// minimal projection `p̂` and `μ ≠ 0`, then `p̂ a (1−p̂) = 0`.
///
/// Premises use relative Frobenius distance against `eq_tol`; the conclusion allows
/// `10·eq_tol·max(1, ||a||)`. A false premise makes the instance vacuous.
pub fn check_m2_lemma(a: &CMatrix, p_hat: &CMatrix, mu: C64, lambda: Lambda, tol: &TolerancePolicy) -> Result<LemmaCheck> {
    if a.shape() != (2, 2) || p_hat.shape() != (2, 2) {
        return Err(Error::ShapeMismatch("the lemma lives in 2x2 matrices".into()));
    }
    if lambda.value() <= 0.0 {
        return Err(Error::BadLambda(lambda.value()));
    }
    if mu.norm() == 0.0 {
        return Err(Error::InvalidArgument("mu must be nonzero".into()));
    }
    let p = AlgElem::from_matrix(p_hat.clone())?;
    if !p.is_minimal_projection(tol) {
        return Err(Error::NotMinimal);
    }
    let rest = &CMatrix::identity(2) - p_hat;
    let first = aluthge_matrix(&(a * &rest), lambda, tol)?.rel_dist(&rest.scale(mu));
    let second = aluthge_matrix(&(&rest * &a.adjoint()), lambda, tol)?.rel_dist(&rest.scale(mu.conj()));
    let corner = (&(p_hat * a) * &rest).fro_norm();
    let premise = first <= tol.eq_tol && second <= tol.eq_tol;
    let holds = !premise || corner <= 10.0 * tol.eq_tol * a.fro_norm().max(1.0);
    Ok(LemmaCheck {
        holds,
        vacuous: !premise,
        residuals: vec![("first_premise".into(), first), ("second_premise".into(), second), ("off_corner".into(), corner)],
    })
}

/// Instance of the lemma's family: `w [[x, 0], [y, μ]] w*` with `p̂ = w E₁₁ w*`,
/// optionally with an off-corner entry `ε` in position `(1, 2)`.
pub fn m2_instance(w: &CMatrix, x: C64, y: C64, mu: C64, eps: C64) -> (CMatrix, CMatrix) {
    let core = CMatrix::from_rows(&[&[x, eps], &[y, mu]]);
    let e11 = CMatrix::from_rows(&[&[ONE, ZERO], &[ZERO, ZERO]]);
    (&(w * &core) * &w.adjoint(), &(w * &e11) * &w.adjoint())
}
