use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::maps::AlgebraMap;
use super::report::{payload, residual, Tally, TrialReport};
use crate::algebra::AlgElem;
use crate::aluthge::{aluthge, Lambda};
use crate::error::{Error, Result};
use crate::linalg::{TolerancePolicy, C64, I};
use crate::sampling::Sampler;

/// The product hypotheses a map may intertwine with `Δ_λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    /// `Φ(Δ(ab)) = Δ(Φ(a)Φ(b))` and `Φ(a*) = Φ(a)*`.
    H1,
    /// `Φ(Δ(a∘b)) = Δ(Φ(a)∘Φ(b))` and `Φ(a*) = Φ(a)*`.
    H2,
    /// `Φ(Δ(ab*)) = Δ(Φ(a)Φ(b)*)`.
    H3,
    /// `Φ(Δ(a∘b*)) = Δ(Φ(a)∘Φ(b)*)`.
    H4,
}

impl Hypothesis {
    pub const ALL: [Hypothesis; 4] = [Self::H1, Self::H2, Self::H3, Self::H4];

    pub fn id(self) -> &'static str {
        match self {
            Self::H1 => "h1",
            Self::H2 => "h2",
            Self::H3 => "h3",
            Self::H4 => "h4",
        }
    }

    fn jordan(self) -> bool {
        matches!(self, Self::H2 | Self::H4)
    }

    fn starred(self) -> bool {
        matches!(self, Self::H3 | Self::H4)
    }

    fn needs_adjoint(self) -> bool {
        matches!(self, Self::H1 | Self::H2)
    }

    /// The product the hypothesis is built on: `ab`, `a∘b`, `ab*` or `a∘b*`.
    pub fn product(self, a: &AlgElem, b: &AlgElem) -> Result<AlgElem> {
        let b = if self.starred() { b.adjoint() } else { b.clone() };
        if self.jordan() {
            a.jordan(&b)
        } else {
            a.mul(&b)
        }
    }
}

fn hypothesis_residual(
    map: &dyn AlgebraMap,
    which: Hypothesis,
    lambda: Lambda,
    a: &AlgElem,
    b: &AlgElem,
    tol: &TolerancePolicy,
) -> Result<f64> {
    let lhs = map.apply(&aluthge(&which.product(a, b)?, lambda, tol)?)?;
    let (fa, fb) = (map.apply(a)?, map.apply(b)?);
    let rhs = aluthge(&which.product(&fa, &fb)?, lambda, tol)?;
    let mut r = residual(&lhs, &rhs);
    if which.needs_adjoint() {
        r = r.max(residual(&map.apply(&a.adjoint())?, &fa.adjoint()));
    }
    Ok(r)
}

/// Samples `(a, b)` and measures the chosen hypothesis. The first trial is always
/// `a = b = 1`, which is where unital failures show up.
pub fn check_hypothesis(
    map: &dyn AlgebraMap,
    which: Hypothesis,
    lambda: Lambda,
    sampler: &mut Sampler,
    n_trials: usize,
    tol: &TolerancePolicy,
) -> TrialReport {
    let mut tally = Tally::new(tol);
    let one = sampler.algebra().identity();
    for t in 0..n_trials {
        let (a, b) = match t {
            0 => (one.clone(), one.clone()),
            1 => (one.clone(), sampler.element()),
            _ if t % 7 == 3 => (sampler.nilpotent(), sampler.unitary()),
            _ => (sampler.element(), sampler.element()),
        };
        let r = hypothesis_residual(map, which, lambda, &a, &b, tol);
        tally.record_result(r, || payload(&[("a", &a), ("b", &b)]));
    }
    tally.finish(which.id(), sampler.seed()).with_detail(json!({ "lambda": lambda.value() }))
}

/// The linear intertwining `Φ(Δ_λ(a)) = Δ_λ(Φ(a))`.
pub fn check_aluthge_commutation(
    map: &dyn AlgebraMap,
    lambda: Lambda,
    sampler: &mut Sampler,
    n_trials: usize,
    tol: &TolerancePolicy,
) -> TrialReport {
    let mut tally = Tally::new(tol);
    for t in 0..n_trials {
        let a = match t {
            0 => sampler.algebra().identity(),
            _ if t % 5 == 2 => sampler.nilpotent(),
            _ => sampler.element(),
        };
        let r = (|| Ok(residual(&map.apply(&aluthge(&a, lambda, tol)?)?, &aluthge(&map.apply(&a)?, lambda, tol)?)))();
        tally.record_result(r, || payload(&[("a", &a)]));
    }
    tally.finish("aluthge_commutation", sampler.seed()).with_detail(json!({ "lambda": lambda.value() }))
}

/// `Φ(a + b) = Φ(a) + Φ(b)`, starting from the witness `a = b = 1`.
pub fn check_additivity(map: &dyn AlgebraMap, sampler: &mut Sampler, n_trials: usize, tol: &TolerancePolicy) -> TrialReport {
    let mut tally = Tally::new(tol);
    let one = sampler.algebra().identity();
    for t in 0..n_trials {
        let (a, b) = if t == 0 { (one.clone(), one.clone()) } else { (sampler.element(), sampler.element()) };
        let r = (|| Ok(residual(&map.apply(&a.add(&b)?)?, &map.apply(&a)?.add(&map.apply(&b)?)?)))();
        tally.record_result(r, || payload(&[("a", &a), ("b", &b)]));
    }
    tally.finish("additivity", sampler.seed())
}

fn mismatch(expected: bool, got: bool) -> f64 {
    if expected == got {
        0.0
    } else {
        1.0
    }
}

/// Consequences (a)–(k) of the product hypotheses, one report per item. `which`
/// selects the product form used for item (b): `H3`/`H1` use `aa*`, `H4`/`H2` the
/// Jordan square `a∘a*`.
pub fn check_basic_properties(
    map: &dyn AlgebraMap,
    which: Hypothesis,
    lambda: Lambda,
    sampler: &mut Sampler,
    n_trials: usize,
    tol: &TolerancePolicy,
) -> Vec<TrialReport> {
    let seed = sampler.seed();
    let alg = sampler.algebra().clone();
    let mut reports = Vec::with_capacity(11);

    let mut t = Tally::new(tol);
    let zero = alg.zero();
    t.record_result(map.apply(&zero).map(|z| z.fro_norm()), || json!({}));
    reports.push(t.finish("a_zero", seed));

    let mut t = Tally::new(tol);
    for _ in 0..n_trials {
        let a = sampler.element();
        let r = (|| {
            let fa = map.apply(&a)?;
            if which.jordan() {
                Ok(residual(&map.apply(&a.jordan(&a.adjoint())?)?, &fa.jordan(&fa.adjoint())?))
            } else {
                Ok(residual(&map.apply(&a.mul(&a.adjoint())?)?, &fa.mul(&fa.adjoint())?))
            }
        })();
        t.record_result(r, || payload(&[("a", &a)]));
    }
    reports.push(t.finish("b_positive", seed));

    let mut t = Tally::new(tol);
    for _ in 0..n_trials {
        let p = sampler.projection();
        let r = map.apply(&p).map(|x| {
            let sym = residual(&x, &x.adjoint());
            let idem = x.mul(&x).map(|xx| residual(&x, &xx)).unwrap_or(f64::INFINITY);
            sym.max(idem)
        });
        t.record_result(r, || payload(&[("p", &p)]));
    }
    reports.push(t.finish("c_projections", seed));

    let mut t = Tally::new(tol);
    for _ in 0..n_trials {
        let (p, q) = sampler.leq_pair();
        let r = (|| {
            let (fp, fq) = (map.apply(&p)?, map.apply(&q)?);
            Ok(residual(&fp.mul(&fq)?, &fp))
        })();
        t.record_result(r, || payload(&[("p", &p), ("q", &q)]));
        let (p, q) = (sampler.projection(), sampler.projection());
        let r = (|| {
            let (fp, fq) = (map.apply(&p)?, map.apply(&q)?);
            Ok(mismatch(p.proj_leq(&q, tol)?, fp.proj_leq(&fq, tol)?))
        })();
        t.record_result(r, || payload(&[("p", &p), ("q", &q)]));
    }
    reports.push(t.finish("d_order", seed));

    let mut t = Tally::new(tol);
    let one = alg.identity();
    t.record_result(map.apply(&one).map(|x| residual(&x, &one)), || json!({}));
    reports.push(t.finish("e_unit", seed));

    let mut t = Tally::new(tol);
    for _ in 0..n_trials {
        let fam = sampler.orthogonal_family(2);
        let (p, q) = (&fam[0], &fam[1]);
        let r = (|| Ok(map.apply(p)?.mul(&map.apply(q)?)?.fro_norm()))();
        t.record_result(r, || payload(&[("p", p), ("q", q)]));
        let (p, q) = (sampler.projection(), sampler.projection());
        let r = (|| {
            let (fp, fq) = (map.apply(&p)?, map.apply(&q)?);
            Ok(mismatch(p.proj_orthogonal(&q, tol)?, fp.proj_orthogonal(&fq, tol)?))
        })();
        t.record_result(r, || payload(&[("p", &p), ("q", &q)]));
    }
    reports.push(t.finish("f_orthogonality", seed));

    let mut t = Tally::new(tol);
    for _ in 0..n_trials {
        let p = sampler.minimal_projection();
        let r = map.apply(&p).map(|x| mismatch(true, x.is_minimal_projection(tol)));
        t.record_result(r, || payload(&[("p", &p)]));
        let q = sampler.projection();
        let r = map.apply(&q).map(|x| mismatch(q.is_minimal_projection(tol), x.is_minimal_projection(tol)));
        t.record_result(r, || payload(&[("p", &q)]));
    }
    reports.push(t.finish("g_minimal", seed));

    let mut t = Tally::new(tol);
    for _ in 0..n_trials {
        let fam = sampler.orthogonal_family(3);
        let r = (|| {
            let sum = fam[1..].iter().try_fold(fam[0].clone(), |acc, p| acc.add(p))?;
            let images = fam.iter().map(|p| map.apply(p)).collect::<Result<Vec<_>>>()?;
            let image_sum = images[1..].iter().try_fold(images[0].clone(), |acc, p| acc.add(p))?;
            Ok(residual(&map.apply(&sum)?, &image_sum))
        })();
        t.record_result(r, || payload(&[("p1", &fam[0]), ("p2", &fam[1]), ("p3", &fam[2])]));
    }
    reports.push(t.finish("h_orthogonal_additivity", seed));

    let mut t = Tally::new(tol);
    for _ in 0..n_trials {
        let (p, q) = sampler.leq_pair();
        let r = (|| Ok(residual(&map.apply(&q.sub(&p)?)?, &map.apply(&q)?.sub(&map.apply(&p)?)?)))();
        t.record_result(r, || payload(&[("p", &p), ("q", &q)]));
    }
    reports.push(t.finish("i_difference", seed));

    let mut t = Tally::new(tol);
    for _ in 0..n_trials {
        let a = sampler.element();
        let r = (|| Ok(residual(&map.apply(&aluthge(&a, lambda, tol)?)?, &aluthge(&map.apply(&a)?, lambda, tol)?)))();
        t.record_result(r, || payload(&[("a", &a)]));
    }
    reports.push(t.finish("j_aluthge_commutation", seed));

    let mut t = Tally::new(tol);
    for _ in 0..n_trials {
        let a = sampler.element();
        let r = (|| {
            Ok(residual(&map.apply(&aluthge(&a.adjoint(), lambda, tol)?)?, &aluthge(&map.apply(&a)?.adjoint(), lambda, tol)?))
        })();
        t.record_result(r, || payload(&[("a", &a)]));
    }
    reports.push(t.finish("k_adjoint_aluthge", seed));

    let detail = json!({ "lambda": lambda.value(), "hypothesis": which.id() });
    reports.into_iter().map(|r| r.with_detail(detail.clone())).collect()
}

/// Per block: does `Φ` act complex-linearly (`Φ(i z_k) = i Φ(z_k)`) or
/// conjugate-linearly (`−i`) on the block identity `z_k`?
pub fn detect_linear_blocks(map: &dyn AlgebraMap, alg: &crate::algebra::VNAlgebra, tol: &TolerancePolicy) -> Result<Vec<bool>> {
    (0..alg.num_blocks())
        .map(|k| {
            let z = alg.block_identity(k)?;
            let base = map.apply(&z)?;
            let rotated = map.apply(&z.scale(I))?;
            if rotated.approx_eq(&base.scale(I), tol) {
                Ok(true)
            } else if rotated.approx_eq(&base.scale(-I), tol) {
                Ok(false)
            } else {
                Err(Error::InvalidArgument(format!("map is neither linear nor conjugate-linear on block {k}")))
            }
        })
        .collect()
}

/// Consequences for hermitian and skew-hermitian elements, the center, and the
/// splitting into linear and conjugate-linear summands.
pub fn check_hermitian_consequences(
    map: &dyn AlgebraMap,
    sampler: &mut Sampler,
    n_trials: usize,
    tol: &TolerancePolicy,
) -> Vec<TrialReport> {
    let seed = sampler.seed();
    let alg = sampler.algebra().clone();
    let mut reports = Vec::with_capacity(7);

    let mut t = Tally::new(tol);
    for _ in 0..n_trials {
        let x = sampler.hermitian();
        let r = map.apply(&x).map(|y| residual(&y, &y.adjoint()));
        t.record_result(r, || payload(&[("x", &x)]));
    }
    reports.push(t.finish("hermitian_preservation", seed));

    let mut t = Tally::new(tol);
    for _ in 0..n_trials {
        let (x, y) = (sampler.hermitian(), sampler.hermitian());
        let r = (|| Ok(residual(&map.apply(&x.jordan(&y)?)?, &map.apply(&x)?.jordan(&map.apply(&y)?)?)))();
        t.record_result(r, || payload(&[("x", &x), ("y", &y)]));
    }
    reports.push(t.finish("jordan_hermitian", seed));

    let mut t = Tally::new(tol);
    for i in 0..n_trials {
        let x = if i % 2 == 0 { sampler.hermitian() } else { sampler.skew_hermitian() };
        let r = (|| Ok(residual(&map.apply(&x.neg())?, &map.apply(&x)?.neg())))();
        t.record_result(r, || payload(&[("x", &x)]));
    }
    reports.push(t.finish("odd", seed));

    let mut t = Tally::new(tol);
    for i in 0..n_trials {
        let p = sampler.projection();
        let b = if i % 2 == 0 { sampler.hermitian() } else { sampler.skew_hermitian() };
        let r = (|| {
            let fp = map.apply(&p)?;
            Ok(residual(&map.apply(&p.mul(&b)?.mul(&p)?)?, &fp.mul(&map.apply(&b)?)?.mul(&fp)?))
        })();
        t.record_result(r, || payload(&[("p", &p), ("b", &b)]));
    }
    reports.push(t.finish("compression", seed));

    let mut t = Tally::new(tol);
    for _ in 0..n_trials {
        let z = sampler.central_element();
        let r = map.apply(&z).map(|w| central_defect(&w));
        t.record_result(r, || payload(&[("z", &z)]));
    }
    reports.push(t.finish("center", seed));

    let mut t = Tally::new(tol);
    for _ in 0..n_trials {
        let (a, b) = sampler.commuting_hermitian_pair();
        let r = (|| {
            let (fa, fb) = (map.apply(&a)?, map.apply(&b)?);
            Ok(residual(&fa.mul(&fb)?, &fb.mul(&fa)?))
        })();
        t.record_result(r, || payload(&[("a", &a), ("b", &b)]));
    }
    reports.push(t.finish("operator_commute", seed));

    let mut t = Tally::new(tol);
    let report = match detect_linear_blocks(map, &alg, tol) {
        Ok(mask) => {
            for _ in 0..n_trials {
                let x = sampler.hermitian();
                for (k, &linear) in mask.iter().enumerate() {
                    let sign = if linear { I } else { -I };
                    let r = (|| {
                        let xk = alg.block_identity(k)?.mul(&x)?;
                        Ok(residual(&map.apply(&xk.scale(I))?, &map.apply(&xk)?.scale(sign)))
                    })();
                    t.record_result(r, || payload(&[("x", &x)]));
                }
            }
            t.finish("imaginary_unit", seed).with_detail(json!({ "p_c": mask }))
        }
        Err(e) => TrialReport::errored("imaginary_unit", seed, &e),
    };
    reports.push(report);
    reports
}

/// `Σ_k ||b_k − (tr b_k / n_k) 1||_F / max(1, ||w||_F)`: zero exactly for central `w`.
pub fn central_defect(w: &AlgElem) -> f64 {
    let num: f64 = w
        .blocks()
        .iter()
        .map(|b| {
            let mean = b.trace() / b.rows() as f64;
            let mut d = b.clone();
            for i in 0..b.rows() {
                d[(i, i)] -= mean;
            }
            d.fro_norm().powi(2)
        })
        .sum::<f64>()
        .sqrt();
    num / w.fro_norm().max(1.0)
}

pub(crate) fn scalar_payload(values: &[(&str, C64)]) -> Value {
    Value::Object(values.iter().map(|(k, v)| (k.to_string(), json!([v.re, v.im]))).collect())
}
