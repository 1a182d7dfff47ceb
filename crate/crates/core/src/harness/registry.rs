use serde_json::json;

use super::{Instance, SuiteConfig};
use crate::algebra::{matrix_units, AlgElem, VNAlgebra};
use crate::aluthge::{
    adjoint_gap, aluthge, aluthge_matrix, check_ap_lemma, check_fixed_point_lemma, check_identity_lemma,
    check_kernel_lemma, check_qnormal_adjoint_lemma, is_quasinormal, rank_one_aluthge, Lambda,
};
use crate::error::Result;
use crate::linalg::{inner, polar_decompose, range_projection, vec_norm, CMatrix, TolerancePolicy, C64};
use crate::preservers::{
    check_additivity, check_aluthge_commutation, check_basic_properties, check_compression_identity,
    check_hermitian_consequences, check_hypothesis, check_m2_lemma, check_orthogonal_scalar_additivity,
    default_grid, extract_scalar_map, m2_instance, payload, residual, Expectation, Hypothesis, PreserverMap,
    ScalarClass, Tally, TraceNormalization, TrialReport,
};
use crate::sampling::Sampler;

/// Which exponents a property is evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaUse {
    /// The property does not involve `λ`, or draws its own.
    Free,
    Grid,
    /// Grid points in `(0, 1]`.
    Positive,
    /// Grid points in `(0, 1)`.
    Interior,
}

impl LambdaUse {
    pub(super) fn resolve(self, grid: &[f64]) -> Vec<Option<Lambda>> {
        let keep = |l: f64| match self {
            LambdaUse::Free => false,
            LambdaUse::Grid => true,
            LambdaUse::Positive => l > 0.0,
            LambdaUse::Interior => l > 0.0 && l < 1.0,
        };
        if self == LambdaUse::Free {
            return vec![None];
        }
        let picked: Vec<Option<Lambda>> =
            grid.iter().filter(|&&l| keep(l)).map(|&l| Some(Lambda::new(l).expect("validated grid"))).collect();
        if picked.is_empty() {
            vec![Some(Lambda::HALF)]
        } else {
            picked
        }
    }
}

/// Which algebras a property is evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileUse {
    /// Works on raw matrices of its own sizes.
    Free,
    /// Every configured profile.
    Any,
    /// Configured profiles with a block of at least this size.
    MinBlock(usize),
    /// Configured profiles of at least this total dimension.
    MinDim(usize),
    /// Always this one profile.
    Fixed(&'static [usize]),
}

const CANONICAL: &[usize] = &[2];

impl ProfileUse {
    pub(super) fn resolve(self, configured: &[VNAlgebra]) -> Vec<Option<VNAlgebra>> {
        let filtered: Vec<VNAlgebra> = match self {
            ProfileUse::Free => return vec![None],
            ProfileUse::Fixed(dims) => return vec![Some(VNAlgebra::new(dims.to_vec()).expect("static shape"))],
            ProfileUse::Any => configured.to_vec(),
            ProfileUse::MinBlock(n) => configured.iter().filter(|a| a.max_block() >= n).cloned().collect(),
            ProfileUse::MinDim(n) => configured.iter().filter(|a| a.total_dim() >= n).cloned().collect(),
        };
        if filtered.is_empty() {
            vec![Some(VNAlgebra::new(CANONICAL.to_vec()).expect("static shape"))]
        } else {
            filtered.into_iter().map(Some).collect()
        }
    }
}

pub struct PropertySpec {
    pub id: &'static str,
    pub expectation: Expectation,
    pub description: &'static str,
    pub lambdas: LambdaUse,
    pub profiles: ProfileUse,
    run: fn(&Ctx) -> Vec<TrialReport>,
}

impl std::fmt::Debug for PropertySpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PropertySpec").field("id", &self.id).field("expectation", &self.expectation).finish()
    }
}

struct Ctx<'a> {
    lambda: Lambda,
    algebra: VNAlgebra,
    seed: u64,
    trials: usize,
    tol: &'a TolerancePolicy,
}

impl Ctx<'_> {
    fn sampler(&self) -> Sampler {
        Sampler::new(self.algebra.clone(), self.seed).with_tolerance(*self.tol)
    }
}

pub(super) fn run_instance(inst: &Instance, config: &SuiteConfig) -> Vec<TrialReport> {
    let ctx = Ctx {
        lambda: inst.lambda.unwrap_or(Lambda::HALF),
        algebra: inst.algebra.clone().unwrap_or_else(|| VNAlgebra::new(CANONICAL.to_vec()).expect("static shape")),
        seed: inst.seed,
        trials: config.trials_per_property,
        tol: &config.tolerance,
    };
    let reports = (inst.spec.run)(&ctx);
    let single = reports.len() == 1;
    reports
        .into_iter()
        .map(|r| {
            let id = if single { inst.label.clone() } else { format!("{}/{}", inst.label, r.property) };
            r.with_property(id).with_expectation(inst.spec.expectation)
        })
        .collect()
}

fn mismatch(ok: bool) -> f64 {
    if ok {
        0.0
    } else {
        1.0
    }
}

macro_rules! spec {
    ($id:expr, $exp:ident, $lam:expr, $prof:expr, $run:expr, $desc:expr) => {
        PropertySpec {
            id: $id,
            expectation: Expectation::$exp,
            description: $desc,
            lambdas: $lam,
            profiles: $prof,
            run: $run,
        }
    };
}

static PROPERTIES: &[PropertySpec] = &[
    spec!("polar_reconstruction", Holds, LambdaUse::Free, ProfileUse::Free, run_polar,
        "u|a| = a and u*u = range projection of |a| for random square matrices of sizes 2..6"),
    spec!("fixed_point", Holds, LambdaUse::Positive, ProfileUse::Any, run_fixed_point,
        "a is quasi-normal iff the transform fixes a"),
    spec!("kernel", Holds, LambdaUse::Positive, ProfileUse::Any, run_kernel,
        "the transform vanishes iff a^2 = 0"),
    spec!("ap_lemma", Holds, LambdaUse::Positive, ProfileUse::Any, run_ap,
        "transform(ap) = a iff a = pa = ap and a is quasi-normal"),
    spec!("identity_lemma", Holds, LambdaUse::Grid, ProfileUse::Any, run_identity,
        "the transform sends only the unit to the unit"),
    spec!("qnormal_adjoint", Holds, LambdaUse::Grid, ProfileUse::Any, run_qnormal_adjoint,
        "quasi-normal a with transform(a*) = a is hermitian"),
    spec!("rank_one", Holds, LambdaUse::Free, ProfileUse::Free, run_rank_one,
        "closed form of the transform on x (x) y against the general computation"),
    spec!("unitary_covariance", Holds, LambdaUse::Grid, ProfileUse::Any, run_covariance,
        "transform(v a v*) = v transform(a) v* for unitary v"),
    spec!("m2_lemma", Holds, LambdaUse::Free, ProfileUse::Free, run_m2_lemma,
        "2x2 lemma: both premises force the off-corner p a (1-p) to vanish"),
    spec!("m2_witness", Holds, LambdaUse::Free, ProfileUse::Free, run_m2_witness,
        "a with nonzero (1,2) and (2,2) entries always violates a premise of the 2x2 lemma"),
    spec!("adjoint_witness", Holds, LambdaUse::Interior, ProfileUse::Free, run_adjoint_witness,
        "transform(a*) differs from transform(a)* on rank-one a built from non-orthogonal independent unit vectors"),
    spec!("matrix_units", Holds, LambdaUse::Free, ProfileUse::Any, run_matrix_units,
        "standard matrix units satisfy the adjoint, multiplication and partition-of-unity rules"),
    spec!("projection_order", Holds, LambdaUse::Free, ProfileUse::Any, run_projection_order,
        "p <= q agrees with range inclusion"),
    spec!("pi_order", Holds, LambdaUse::Free, ProfileUse::Any, run_pi_order,
        "partial-isometry order agrees with its projection characterisation"),
    spec!("operator_commute", Holds, LambdaUse::Free, ProfileUse::Any, run_operator_commute,
        "hermitian elements commute iff they operator-commute in the Jordan sense"),
    spec!("jordan_identities", Holds, LambdaUse::Free, ProfileUse::Any, run_jordan_identities,
        "{p, x, 1-p} = (2 p o x) o (1-p) and unit identities for the Jordan and triple products"),
    spec!("h1:unitary_conj", Holds, LambdaUse::Grid, ProfileUse::Any, run_h1_unitary, "unitary conjugation under h.1"),
    spec!("h2:unitary_conj", Holds, LambdaUse::Grid, ProfileUse::Any, run_h2_unitary, "unitary conjugation under h.2"),
    spec!("h3:unitary_conj", Holds, LambdaUse::Grid, ProfileUse::Any, run_h3_unitary, "unitary conjugation under h.3"),
    spec!("h4:unitary_conj", Holds, LambdaUse::Grid, ProfileUse::Any, run_h4_unitary, "unitary conjugation under h.4"),
    spec!("h1:conj_linear_conj", Holds, LambdaUse::Grid, ProfileUse::Any, run_h1_conj,
        "conjugate-linear conjugation under h.1"),
    spec!("h2:conj_linear_conj", Holds, LambdaUse::Grid, ProfileUse::Any, run_h2_conj,
        "conjugate-linear conjugation under h.2"),
    spec!("h3:conj_linear_conj", Holds, LambdaUse::Grid, ProfileUse::Any, run_h3_conj,
        "conjugate-linear conjugation under h.3"),
    spec!("h4:conj_linear_conj", Holds, LambdaUse::Grid, ProfileUse::Any, run_h4_conj,
        "conjugate-linear conjugation under h.4"),
    spec!("h1:central_split", Holds, LambdaUse::Grid, ProfileUse::Any, run_h1_split,
        "linear on even blocks, conjugate-linear on odd blocks, under h.1"),
    spec!("h2:central_split", Holds, LambdaUse::Grid, ProfileUse::Any, run_h2_split, "central split map under h.2"),
    spec!("h3:central_split", Holds, LambdaUse::Grid, ProfileUse::Any, run_h3_split, "central split map under h.3"),
    spec!("h4:central_split", Holds, LambdaUse::Grid, ProfileUse::Any, run_h4_split, "central split map under h.4"),
    spec!("h3:transpose_conj", Fails, LambdaUse::Grid, ProfileUse::MinBlock(2), run_h3_transpose,
        "transpose conjugation is an anti-automorphism and breaks h.3"),
    spec!("h3:exceptional_i2", Fails, LambdaUse::Grid, ProfileUse::Fixed(&[2]), run_h3_exceptional,
        "c(v a^t v* - Tr(a) 1) on M2 is not unital and breaks h.3 at a = b = 1"),
    spec!("commutation:exceptional_i2", Holds, LambdaUse::Grid, ProfileUse::Fixed(&[2]), run_commutation_exceptional,
        "the exceptional M2 map commutes with the transform"),
    spec!("trace_normalization:exceptional_i2", Holds, LambdaUse::Grid, ProfileUse::Fixed(&[2]), run_trace_normalization,
        "which trace normalization of the exceptional M2 map commutes with the transform"),
    spec!("h3:scalar_multiple", Fails, LambdaUse::Grid, ProfileUse::Any, run_h3_scalar,
        "2i times a unitary conjugation breaks h.3 at a = b = 1"),
    spec!("commutation:scalar_multiple", Holds, LambdaUse::Grid, ProfileUse::Any, run_commutation_scalar,
        "2i times a unitary conjugation commutes with the transform"),
    spec!("h3:abelian_inverse", Holds, LambdaUse::Grid, ProfileUse::Fixed(&[1]), run_h3_inverse,
        "z -> 1/z on C satisfies h.3"),
    spec!("h3:abelian_zabsz", Holds, LambdaUse::Grid, ProfileUse::Fixed(&[1]), run_h3_zabsz,
        "z -> z|z| on C satisfies h.3"),
    spec!("additivity:abelian_inverse", Fails, LambdaUse::Free, ProfileUse::Fixed(&[1]), run_add_inverse,
        "z -> 1/z is not additive (witness a = b = 1)"),
    spec!("additivity:abelian_zabsz", Fails, LambdaUse::Free, ProfileUse::Fixed(&[1]), run_add_zabsz,
        "z -> z|z| is not additive (witness a = b = 1)"),
    spec!("basic:unitary_conj", Holds, LambdaUse::Grid, ProfileUse::Any, run_basic_unitary,
        "consequences (a)-(k) of h.3 for unitary conjugation"),
    spec!("basic:conj_linear_conj", Holds, LambdaUse::Grid, ProfileUse::Any, run_basic_conj,
        "consequences (a)-(k) of h.3 for conjugate-linear conjugation"),
    spec!("basic:central_split", Holds, LambdaUse::Grid, ProfileUse::Any, run_basic_split,
        "consequences (a)-(k) of h.4 for the central split map"),
    spec!("hermitian:unitary_conj", Holds, LambdaUse::Free, ProfileUse::Any, run_herm_unitary,
        "hermitian, Jordan, compression, center and imaginary-unit consequences for unitary conjugation"),
    spec!("hermitian:conj_linear_conj", Holds, LambdaUse::Free, ProfileUse::Any, run_herm_conj,
        "the same consequences for conjugate-linear conjugation"),
    spec!("hermitian:central_split", Holds, LambdaUse::Free, ProfileUse::Any, run_herm_split,
        "the same consequences for the central split map"),
    spec!("scalar_map:unitary_conj", Holds, LambdaUse::Free, ProfileUse::MinBlock(2), run_scalar_unitary,
        "h is the identity for unitary conjugation"),
    spec!("scalar_map:conj_linear_conj", Holds, LambdaUse::Free, ProfileUse::MinBlock(2), run_scalar_conj,
        "h is complex conjugation for conjugate-linear conjugation"),
    spec!("scalar_map:abelian_zabsz", Holds, LambdaUse::Free, ProfileUse::Fixed(&[1]), run_scalar_zabsz,
        "h(z) = z|z| is neither identity nor conjugation on C"),
    spec!("scalar_map:invariance", Holds, LambdaUse::Free, ProfileUse::MinBlock(2), run_scalar_invariance,
        "the classification of h survives composing with a unitary conjugation"),
    spec!("compression:unitary_conj", Holds, LambdaUse::Free, ProfileUse::MinBlock(2), run_compression_unitary,
        "f(p)f(a)f(p) = h(pure state of a at p) f(p) for unitary conjugation"),
    spec!("compression:conj_linear_conj", Holds, LambdaUse::Free, ProfileUse::MinBlock(2), run_compression_conj,
        "the compression identity for conjugate-linear conjugation"),
    spec!("orth_additivity:unitary_conj", Holds, LambdaUse::Free, ProfileUse::MinDim(2), run_orth_unitary,
        "f(ap + bq) = f(ap) + f(bq) on orthogonal minimal projections, unitary conjugation"),
    spec!("orth_additivity:conj_linear_conj", Holds, LambdaUse::Free, ProfileUse::MinDim(2), run_orth_conj,
        "orthogonal scalar additivity for conjugate-linear conjugation"),
    spec!("orth_additivity:central_split", Holds, LambdaUse::Free, ProfileUse::MinDim(2), run_orth_split,
        "orthogonal scalar additivity for the central split map"),
];

pub fn properties() -> &'static [PropertySpec] {
    PROPERTIES
}

// ---- linear algebra and transform lemmas ----

fn run_polar(ctx: &Ctx) -> Vec<TrialReport> {
    let mut s = ctx.sampler();
    let mut t = Tally::new(ctx.tol);
    let per_size = (ctx.trials * 5).div_ceil(2);
    for n in 2..=6 {
        for i in 0..per_size {
            let a = if i % 10 == 9 {
                let k = 1 + s.rng().index(n - 1);
                &s.gaussian_matrix(n, k) * &s.gaussian_matrix(k, n)
            } else {
                s.gaussian_matrix(n, n)
            };
            let r = (|| {
                let p = polar_decompose(&a, ctx.tol)?;
                let rec = (&p.u * &p.modulus).rel_dist(&a);
                let support = (&p.u.adjoint() * &p.u).rel_dist(&range_projection(&p.modulus, ctx.tol)?);
                Ok(rec.max(support))
            })();
            t.record_result(r, || json!({ "a": a }));
        }
    }
    vec![t.finish("polar_reconstruction", ctx.seed)]
}

fn run_fixed_point(ctx: &Ctx) -> Vec<TrialReport> {
    let mut s = ctx.sampler();
    let mut t = Tally::new(ctx.tol);
    let mut min_gap = f64::INFINITY;
    for i in 0..2 * ctx.trials {
        let constructed = i % 2 == 0;
        let a = if constructed { s.quasinormal_element() } else { s.element() };
        let r = (|| {
            let c = check_fixed_point_lemma(&a, ctx.lambda, ctx.tol)?;
            let fixed = c.residuals[1].1;
            let mut r = mismatch(c.holds);
            if constructed {
                r = r.max(fixed);
            } else if !is_quasinormal(&a, ctx.tol) {
                min_gap = min_gap.min(fixed);
                if fixed <= 1e-6 {
                    r = 1.0;
                }
            }
            Ok(r)
        })();
        t.record_result(r, || payload(&[("a", &a)]));
    }
    vec![t.finish("fixed_point", ctx.seed).with_detail(json!({ "min_non_quasinormal_distance": finite(min_gap) }))]
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn run_kernel(ctx: &Ctx) -> Vec<TrialReport> {
    let mut s = ctx.sampler();
    let mut t = Tally::new(ctx.tol);
    for i in 0..10 * ctx.trials {
        let nil = i % 2 == 0;
        let a = if nil { s.nilpotent() } else { s.element() };
        let r = (|| {
            let c = check_kernel_lemma(&a, ctx.lambda, ctx.tol)?;
            let (transform, square) = (c.residuals[0].1, c.residuals[1].1);
            let mut r = mismatch(c.holds);
            if nil {
                r = r.max(transform);
            } else if square > 1e-4 && transform <= 1e-6 {
                r = 1.0;
            }
            Ok(r)
        })();
        t.record_result(r, || payload(&[("a", &a)]));
    }
    vec![t.finish("kernel", ctx.seed)]
}

fn run_ap(ctx: &Ctx) -> Vec<TrialReport> {
    let mut s = ctx.sampler();
    let mut t = Tally::new(ctx.tol);
    for i in 0..2 * ctx.trials {
        let (a, p) = if i % 2 == 0 {
            let a = s.quasinormal_element();
            let sym = a.adjoint().mul(&a).and_then(|x| x.add(&a.mul(&a.adjoint())?)).expect("same algebra");
            let p = sym.try_map_blocks(|b| range_projection(b, ctx.tol)).expect("psd");
            (a, p)
        } else {
            (s.element(), s.projection())
        };
        let r = check_ap_lemma(&a, &p, ctx.lambda, ctx.tol).map(|c| mismatch(c.holds));
        t.record_result(r, || payload(&[("a", &a), ("p", &p)]));
    }
    vec![t.finish("ap_lemma", ctx.seed)]
}

fn run_identity(ctx: &Ctx) -> Vec<TrialReport> {
    let mut s = ctx.sampler();
    let mut t = Tally::new(ctx.tol);
    for i in 0..ctx.trials {
        let a = match i % 4 {
            0 if i == 0 => s.algebra().identity(),
            0 => s.unitary(),
            1 => s.algebra().identity().add(&s.nilpotent().scale(C64::new(0.1, 0.0))).expect("same algebra"),
            2 => s.hermitian(),
            _ => s.element(),
        };
        match check_identity_lemma(&a, ctx.lambda, ctx.tol) {
            Ok(c) if c.vacuous && c.holds => t.vacuous(),
            r => t.record_result(r.map(|c| mismatch(c.holds)), || payload(&[("a", &a)])),
        }
    }
    vec![t.finish("identity_lemma", ctx.seed)]
}

fn run_qnormal_adjoint(ctx: &Ctx) -> Vec<TrialReport> {
    let mut s = ctx.sampler();
    let mut t = Tally::new(ctx.tol);
    for i in 0..ctx.trials {
        let a = match i % 3 {
            0 => s.hermitian(),
            1 => s.quasinormal_element(),
            _ => s.normal_element(),
        };
        match check_qnormal_adjoint_lemma(&a, ctx.lambda, ctx.tol) {
            Ok(c) if c.vacuous && c.holds => t.vacuous(),
            r => t.record_result(r.map(|c| mismatch(c.holds)), || payload(&[("a", &a)])),
        }
    }
    vec![t.finish("qnormal_adjoint", ctx.seed)]
}

fn run_rank_one(ctx: &Ctx) -> Vec<TrialReport> {
    let mut s = ctx.sampler();
    let mut t = Tally::new(ctx.tol);
    for i in 0..ctx.trials {
        let n = 2 + s.rng().index(4);
        let y = s.unit_vector(n).into_iter().map(|z| z * (0.5 + s.rng().uniform() * 2.0)).collect::<Vec<_>>();
        let mut x: Vec<C64> = (0..n).map(|_| s.scalar()).collect();
        if i % 5 == 0 {
            let c = inner(&x, &y) / vec_norm(&y).powi(2);
            for (xi, yi) in x.iter_mut().zip(&y) {
                *xi -= c * yi;
            }
        }
        let lambda = Lambda::new(s.rng().uniform()).expect("in range");
        let r = (|| {
            let closed = rank_one_aluthge(&x, &y, lambda)?;
            let general = aluthge_matrix(&CMatrix::outer(&x, &y), lambda, ctx.tol)?;
            Ok(general.rel_dist(&closed))
        })();
        t.record_result(r, || json!({ "x": CMatrix::column_vector(&x), "y": CMatrix::column_vector(&y), "lambda": lambda }));
    }
    vec![t.finish("rank_one", ctx.seed)]
}

fn run_covariance(ctx: &Ctx) -> Vec<TrialReport> {
    let mut s = ctx.sampler();
    let mut t = Tally::new(ctx.tol);
    for _ in 0..ctx.trials {
        let (v, a) = (s.unitary(), s.element());
        let r = (|| {
            let vav = v.mul(&a)?.mul(&v.adjoint())?;
            Ok(residual(&aluthge(&vav, ctx.lambda, ctx.tol)?, &v.mul(&aluthge(&a, ctx.lambda, ctx.tol)?)?.mul(&v.adjoint())?))
        })();
        t.record_result(r, || payload(&[("v", &v), ("a", &a)]));
    }
    vec![t.finish("unitary_covariance", ctx.seed)]
}

fn run_m2_lemma(ctx: &Ctx) -> Vec<TrialReport> {
    let mut s = Sampler::new(VNAlgebra::full(2).expect("static"), ctx.seed).with_tolerance(*ctx.tol);
    let mut t = Tally::new(ctx.tol);
    let mut non_vacuous = 0usize;
    let mut worst_corner = 0.0f64;
    for i in 0..50 * ctx.trials {
        let lambda = Lambda::new(1.0 - s.rng().uniform()).expect("in (0, 1]");
        let mu = s.scalar();
        let (a, p) = match i % 4 {
            0 | 1 => {
                let w = s.unitary_matrix(2);
                m2_instance(&w, s.scalar(), s.scalar(), mu, C64::new(0.0, 0.0))
            }
            2 => {
                let w = s.unitary_matrix(2);
                let k = 1 + s.rng().index(12);
                let eps = s.unit_vector(1)[0] * 10f64.powi(-(k as i32));
                m2_instance(&w, s.scalar(), s.scalar(), mu, eps)
            }
            _ => {
                let xi = s.unit_vector(2);
                (s.gaussian_matrix(2, 2), CMatrix::outer(&xi, &xi))
            }
        };
        match check_m2_lemma(&a, &p, mu, lambda, ctx.tol) {
            Ok(c) if c.vacuous => t.vacuous(),
            Ok(c) => {
                non_vacuous += 1;
                let corner = c.residuals[2].1;
                worst_corner = worst_corner.max(corner);
                let r = if c.holds { corner / a.fro_norm().max(1.0) } else { 1.0 };
                t.record(r, || json!({ "a": a, "p_hat": p, "mu": [mu.re, mu.im], "lambda": lambda }));
            }
            Err(e) => t.record_result(Err(e), || json!({ "a": a, "p_hat": p })),
        }
    }
    vec![t.finish("m2_lemma", ctx.seed).with_detail(json!({ "non_vacuous": non_vacuous, "max_off_corner": worst_corner }))]
}

fn run_m2_witness(ctx: &Ctx) -> Vec<TrialReport> {
    let mut s = Sampler::new(VNAlgebra::full(2).expect("static"), ctx.seed).with_tolerance(*ctx.tol);
    let mut t = Tally::new(ctx.tol);
    let mut min_violation = f64::INFINITY;
    let identity = CMatrix::identity(2);
    for _ in 0..ctx.trials {
        let lambda = Lambda::new(1.0 - s.rng().uniform()).expect("in (0, 1]");
        let mu = s.scalar();
        let (a, p) = m2_instance(&identity, s.scalar(), s.scalar(), mu, s.scalar());
        let r = check_m2_lemma(&a, &p, mu, lambda, ctx.tol).map(|c| {
            let violation = c.residuals[0].1.max(c.residuals[1].1);
            min_violation = min_violation.min(violation);
            mismatch(c.vacuous)
        });
        t.record_result(r, || json!({ "a": a, "mu": [mu.re, mu.im], "lambda": lambda }));
    }
    vec![t.finish("m2_witness", ctx.seed).with_detail(json!({ "min_premise_violation": finite(min_violation) }))]
}

/// Unit vectors with `0.05 ≤ |⟨ξ|η⟩| ≤ 0.95`, which keeps them independent and non-orthogonal.
pub(crate) fn witness_pair(s: &mut Sampler, n: usize) -> (Vec<C64>, Vec<C64>) {
    loop {
        let xi = s.unit_vector(n);
        let eta = s.unit_vector(n);
        let overlap = inner(&xi, &eta).norm();
        if (0.05..=0.95).contains(&overlap) {
            return (xi, eta);
        }
    }
}

fn run_adjoint_witness(ctx: &Ctx) -> Vec<TrialReport> {
    let mut s = ctx.sampler();
    let mut t = Tally::new(ctx.tol);
    let mut min_gap = f64::INFINITY;
    for _ in 0..ctx.trials.div_ceil(4) {
        let n = 2 + s.rng().index(3);
        let (xi, eta) = witness_pair(&mut s, n);
        let r = adjoint_gap(&xi, &eta, ctx.lambda, ctx.tol).map(|g| {
            min_gap = min_gap.min(g);
            mismatch(g > 1e-3)
        });
        t.record_result(r, || json!({ "xi": CMatrix::column_vector(&xi), "eta": CMatrix::column_vector(&eta) }));
    }
    vec![t.finish("adjoint_witness", ctx.seed).with_detail(json!({ "min_gap": finite(min_gap) }))]
}

// ---- algebra invariants ----

fn run_matrix_units(ctx: &Ctx) -> Vec<TrialReport> {
    let mut t = Tally::new(ctx.tol);
    for k in 0..ctx.algebra.num_blocks() {
        let r = (|| {
            let mu = matrix_units(&ctx.algebra, k)?;
            let n = mu.n;
            let mut worst = 0.0f64;
            let mut sum = ctx.algebra.zero();
            for i in 0..n {
                sum = sum.add(mu.unit(i, i))?;
                for j in 0..n {
                    worst = worst.max(residual(&mu.unit(i, j).adjoint(), mu.unit(j, i)));
                    for l in 0..n {
                        for m in 0..n {
                            let prod = mu.unit(i, j).mul(mu.unit(l, m))?;
                            let expected = if j == l { mu.unit(i, m).clone() } else { ctx.algebra.zero() };
                            worst = worst.max(residual(&prod, &expected));
                        }
                    }
                }
            }
            Ok(worst.max(residual(&sum, &ctx.algebra.block_identity(k)?)))
        })();
        t.record_result(r, || json!({ "block": k }));
    }
    vec![t.finish("matrix_units", ctx.seed)]
}

fn run_projection_order(ctx: &Ctx) -> Vec<TrialReport> {
    let mut s = ctx.sampler();
    let mut t = Tally::new(ctx.tol);
    for i in 0..ctx.trials {
        let (p, q) = if i % 2 == 0 { s.leq_pair() } else { (s.projection(), s.projection()) };
        let r = (|| {
            let join = p.add(&q)?.try_map_blocks(|b| range_projection(b, ctx.tol))?;
            Ok(mismatch(p.proj_leq(&q, ctx.tol)? == join.approx_eq(&q, ctx.tol)))
        })();
        t.record_result(r, || payload(&[("p", &p), ("q", &q)]));
    }
    vec![t.finish("projection_order", ctx.seed)]
}

fn run_pi_order(ctx: &Ctx) -> Vec<TrialReport> {
    let mut s = ctx.sampler();
    let mut t = Tally::new(ctx.tol);
    for i in 0..ctx.trials {
        let (sub, support) = s.leq_pair();
        let u = s.unitary();
        let v = u.mul(&support).expect("same algebra");
        let e = if i % 2 == 0 { v.mul(&sub).expect("same algebra") } else { s.unitary().mul(&s.projection()).expect("same algebra") };
        let r = (|| {
            let direct = e.pi_leq(&v, ctx.tol)?;
            let via = e.pi_leq_via_projections(&v, ctx.tol)?;
            Ok(mismatch(direct == via && (i % 2 == 1 || direct)))
        })();
        t.record_result(r, || payload(&[("e", &e), ("v", &v)]));
    }
    vec![t.finish("pi_order", ctx.seed)]
}

fn run_operator_commute(ctx: &Ctx) -> Vec<TrialReport> {
    let mut s = ctx.sampler();
    let mut t = Tally::new(ctx.tol);
    for i in 0..ctx.trials {
        let (a, b) = if i % 2 == 0 { s.commuting_hermitian_pair() } else { (s.hermitian(), s.hermitian()) };
        let probes: Vec<AlgElem> = (0..20).map(|_| s.element()).collect();
        let r = (|| {
            let plain = a.operator_commute(&b, ctx.tol)?;
            let jordan = a.operator_commute_jordan(&b, &probes, ctx.tol)?;
            let expected = i % 2 == 0 || ctx.algebra.max_block() == 1;
            Ok(mismatch(plain == jordan && plain == expected))
        })();
        t.record_result(r, || payload(&[("a", &a), ("b", &b)]));
    }
    vec![t.finish("operator_commute", ctx.seed)]
}

fn run_jordan_identities(ctx: &Ctx) -> Vec<TrialReport> {
    let mut s = ctx.sampler();
    let mut t = Tally::new(ctx.tol);
    let one = ctx.algebra.identity();
    t.record_result(one.triple(&one, &one).map(|x| residual(&x, &one)), || json!({}));
    for _ in 0..ctx.trials {
        let (p, x, a) = (s.projection(), s.hermitian(), s.element());
        let r = (|| {
            let rest = one.sub(&p)?;
            let lhs = p.triple(&x, &rest)?;
            let rhs = p.jordan(&x)?.scale(C64::new(2.0, 0.0)).jordan(&rest)?;
            Ok(residual(&lhs, &rhs).max(residual(&a.jordan(&one)?, &a)))
        })();
        t.record_result(r, || payload(&[("p", &p), ("x", &x), ("a", &a)]));
    }
    vec![t.finish("jordan_identities", ctx.seed)]
}

// ---- preserver maps ----

fn unitary_map(s: &mut Sampler, tol: &TolerancePolicy) -> PreserverMap {
    PreserverMap::unitary_conj(s.unitary(), tol).expect("sampled unitary")
}

fn conj_map(s: &mut Sampler, tol: &TolerancePolicy) -> PreserverMap {
    PreserverMap::conj_linear_conj(s.unitary(), tol).expect("sampled unitary")
}

/// Linear on even-indexed blocks, conjugate-linear on odd ones.
fn split_map(s: &mut Sampler, tol: &TolerancePolicy) -> PreserverMap {
    let alg = s.algebra().clone();
    let mask: Vec<bool> = (0..alg.num_blocks()).map(|k| k % 2 == 0).collect();
    let p_c = alg.central_projection(&mask).expect("mask length");
    let lin = unitary_map(s, tol);
    let conj = conj_map(s, tol);
    PreserverMap::central_split(p_c, lin, conj, tol).expect("valid parts")
}

fn exceptional_map(s: &mut Sampler, trace: TraceNormalization, tol: &TolerancePolicy) -> PreserverMap {
    PreserverMap::exceptional_i2(C64::new(1.0, 0.0), s.unitary(), trace, tol).expect("M2 unitary")
}

fn scalar_map(s: &mut Sampler, tol: &TolerancePolicy) -> PreserverMap {
    PreserverMap::scalar_multiple(C64::new(0.0, 2.0), unitary_map(s, tol)).expect("nonzero")
}

type MapMaker = fn(&mut Sampler, &TolerancePolicy) -> PreserverMap;

fn hyp(ctx: &Ctx, which: Hypothesis, make: MapMaker) -> Vec<TrialReport> {
    let mut s = ctx.sampler();
    let map = make(&mut s, ctx.tol);
    vec![check_hypothesis(&map, which, ctx.lambda, &mut s, ctx.trials, ctx.tol)]
}

fn run_h1_unitary(ctx: &Ctx) -> Vec<TrialReport> {
    hyp(ctx, Hypothesis::H1, unitary_map)
}
fn run_h2_unitary(ctx: &Ctx) -> Vec<TrialReport> {
    hyp(ctx, Hypothesis::H2, unitary_map)
}
fn run_h3_unitary(ctx: &Ctx) -> Vec<TrialReport> {
    hyp(ctx, Hypothesis::H3, unitary_map)
}
fn run_h4_unitary(ctx: &Ctx) -> Vec<TrialReport> {
    hyp(ctx, Hypothesis::H4, unitary_map)
}
fn run_h1_conj(ctx: &Ctx) -> Vec<TrialReport> {
    hyp(ctx, Hypothesis::H1, conj_map)
}
fn run_h2_conj(ctx: &Ctx) -> Vec<TrialReport> {
    hyp(ctx, Hypothesis::H2, conj_map)
}
fn run_h3_conj(ctx: &Ctx) -> Vec<TrialReport> {
    hyp(ctx, Hypothesis::H3, conj_map)
}
fn run_h4_conj(ctx: &Ctx) -> Vec<TrialReport> {
    hyp(ctx, Hypothesis::H4, conj_map)
}
fn run_h1_split(ctx: &Ctx) -> Vec<TrialReport> {
    hyp(ctx, Hypothesis::H1, split_map)
}
fn run_h2_split(ctx: &Ctx) -> Vec<TrialReport> {
    hyp(ctx, Hypothesis::H2, split_map)
}
fn run_h3_split(ctx: &Ctx) -> Vec<TrialReport> {
    hyp(ctx, Hypothesis::H3, split_map)
}
fn run_h4_split(ctx: &Ctx) -> Vec<TrialReport> {
    hyp(ctx, Hypothesis::H4, split_map)
}
fn run_h3_transpose(ctx: &Ctx) -> Vec<TrialReport> {
    hyp(ctx, Hypothesis::H3, |s, tol| PreserverMap::transpose_conj(s.unitary(), false, tol).expect("sampled unitary"))
}
fn run_h3_exceptional(ctx: &Ctx) -> Vec<TrialReport> {
    hyp(ctx, Hypothesis::H3, |s, tol| exceptional_map(s, TraceNormalization::Usual, tol))
}
fn run_h3_scalar(ctx: &Ctx) -> Vec<TrialReport> {
    hyp(ctx, Hypothesis::H3, scalar_map)
}
fn run_h3_inverse(ctx: &Ctx) -> Vec<TrialReport> {
    hyp(ctx, Hypothesis::H3, |_, _| PreserverMap::AbelianInverse)
}
fn run_h3_zabsz(ctx: &Ctx) -> Vec<TrialReport> {
    hyp(ctx, Hypothesis::H3, |_, _| PreserverMap::AbelianZAbsZ)
}

fn commutation(ctx: &Ctx, make: MapMaker) -> Vec<TrialReport> {
    let mut s = ctx.sampler();
    let map = make(&mut s, ctx.tol);
    vec![check_aluthge_commutation(&map, ctx.lambda, &mut s, ctx.trials, ctx.tol)]
}

fn run_commutation_exceptional(ctx: &Ctx) -> Vec<TrialReport> {
    commutation(ctx, |s, tol| exceptional_map(s, TraceNormalization::Usual, tol))
}
fn run_commutation_scalar(ctx: &Ctx) -> Vec<TrialReport> {
    commutation(ctx, scalar_map)
}

fn run_trace_normalization(ctx: &Ctx) -> Vec<TrialReport> {
    let mut s = ctx.sampler();
    let v = s.unitary();
    let mut results = Vec::new();
    for trace in [TraceNormalization::Usual, TraceNormalization::Normalized] {
        let map = PreserverMap::exceptional_i2(C64::new(1.0, 0.0), v.clone(), trace, ctx.tol).expect("M2 unitary");
        let mut sub = Sampler::new(ctx.algebra.clone(), ctx.seed ^ 1).with_tolerance(*ctx.tol);
        results.push(check_aluthge_commutation(&map, ctx.lambda, &mut sub, ctx.trials, ctx.tol));
    }
    let (usual, normalized) = (&results[0], &results[1]);
    let validated = match (usual.holds, normalized.holds) {
        (true, true) => "both",
        (true, false) => "usual",
        (false, true) => "normalized",
        (false, false) => "none",
    };
    let mut t = Tally::new(ctx.tol);
    t.record(usual.max_residual, || json!({ "usual": usual.counterexample }));
    let report = t.finish("trace_normalization", ctx.seed).with_detail(json!({
        "validated": validated,
        "usual_max_residual": finite(usual.max_residual),
        "normalized_max_residual": finite(normalized.max_residual),
        "normalized_counterexample": normalized.counterexample,
    }));
    vec![report]
}

fn additivity(ctx: &Ctx, map: PreserverMap) -> Vec<TrialReport> {
    let mut s = ctx.sampler();
    vec![check_additivity(&map, &mut s, ctx.trials, ctx.tol)]
}

fn run_add_inverse(ctx: &Ctx) -> Vec<TrialReport> {
    additivity(ctx, PreserverMap::AbelianInverse)
}
fn run_add_zabsz(ctx: &Ctx) -> Vec<TrialReport> {
    additivity(ctx, PreserverMap::AbelianZAbsZ)
}

fn basic(ctx: &Ctx, which: Hypothesis, make: MapMaker) -> Vec<TrialReport> {
    let mut s = ctx.sampler();
    let map = make(&mut s, ctx.tol);
    check_basic_properties(&map, which, ctx.lambda, &mut s, ctx.trials, ctx.tol)
}

fn run_basic_unitary(ctx: &Ctx) -> Vec<TrialReport> {
    basic(ctx, Hypothesis::H3, unitary_map)
}
fn run_basic_conj(ctx: &Ctx) -> Vec<TrialReport> {
    basic(ctx, Hypothesis::H3, conj_map)
}
fn run_basic_split(ctx: &Ctx) -> Vec<TrialReport> {
    basic(ctx, Hypothesis::H4, split_map)
}

fn hermitian(ctx: &Ctx, make: MapMaker) -> Vec<TrialReport> {
    let mut s = ctx.sampler();
    let map = make(&mut s, ctx.tol);
    check_hermitian_consequences(&map, &mut s, ctx.trials, ctx.tol)
}

fn run_herm_unitary(ctx: &Ctx) -> Vec<TrialReport> {
    hermitian(ctx, unitary_map)
}
fn run_herm_conj(ctx: &Ctx) -> Vec<TrialReport> {
    hermitian(ctx, conj_map)
}
fn run_herm_split(ctx: &Ctx) -> Vec<TrialReport> {
    hermitian(ctx, split_map)
}

fn classify(ctx: &Ctx, map: &PreserverMap, expected: ScalarClass, id: &str) -> TrialReport {
    let mut t = Tally::new(ctx.tol);
    let r = extract_scalar_map(map, &ctx.algebra, &default_grid(), ctx.tol).map(|h| {
        let deviation = h
            .samples
            .iter()
            .map(|&(a, v)| match expected {
                ScalarClass::Identity => (v - a).norm() / a.norm().max(1.0),
                ScalarClass::Conjugation => (v - a.conj()).norm() / a.norm().max(1.0),
                ScalarClass::Other => 0.0,
            })
            .fold(0.0, f64::max);
        deviation.max(mismatch(h.classification == expected))
    });
    t.record_result(r, || json!({ "map": map }));
    t.finish(id, ctx.seed).with_detail(json!({ "expected": expected }))
}

fn run_scalar_unitary(ctx: &Ctx) -> Vec<TrialReport> {
    let map = unitary_map(&mut ctx.sampler(), ctx.tol);
    vec![classify(ctx, &map, ScalarClass::Identity, "scalar_map")]
}
fn run_scalar_conj(ctx: &Ctx) -> Vec<TrialReport> {
    let map = conj_map(&mut ctx.sampler(), ctx.tol);
    vec![classify(ctx, &map, ScalarClass::Conjugation, "scalar_map")]
}
fn run_scalar_zabsz(ctx: &Ctx) -> Vec<TrialReport> {
    vec![classify(ctx, &PreserverMap::AbelianZAbsZ, ScalarClass::Other, "scalar_map")]
}

fn run_scalar_invariance(ctx: &Ctx) -> Vec<TrialReport> {
    let mut s = ctx.sampler();
    let mut t = Tally::new(ctx.tol);
    for i in 0..ctx.trials.div_ceil(10) {
        let base = if i % 2 == 0 { unitary_map(&mut s, ctx.tol) } else { conj_map(&mut s, ctx.tol) };
        let w = unitary_map(&mut s, ctx.tol);
        let r: Result<f64> = (|| {
            let grid = default_grid();
            let h0 = extract_scalar_map(&base, &ctx.algebra, &grid, ctx.tol)?;
            let h1 = extract_scalar_map(&PreserverMap::composed(vec![base.clone(), w.clone()]), &ctx.algebra, &grid, ctx.tol)?;
            let h2 = extract_scalar_map(&PreserverMap::composed(vec![w.clone(), base.clone()]), &ctx.algebra, &grid, ctx.tol)?;
            Ok(mismatch(h0.classification == h1.classification && h0.classification == h2.classification))
        })();
        t.record_result(r, || json!({ "map": base, "w": w }));
    }
    vec![t.finish("scalar_map_invariance", ctx.seed)]
}

fn compression(ctx: &Ctx, make: MapMaker) -> Vec<TrialReport> {
    let mut s = ctx.sampler();
    let map = make(&mut s, ctx.tol);
    vec![check_compression_identity(&map, &mut s, ctx.trials, ctx.tol)]
}

fn run_compression_unitary(ctx: &Ctx) -> Vec<TrialReport> {
    compression(ctx, unitary_map)
}
fn run_compression_conj(ctx: &Ctx) -> Vec<TrialReport> {
    compression(ctx, conj_map)
}

fn orth(ctx: &Ctx, make: MapMaker) -> Vec<TrialReport> {
    let mut s = ctx.sampler();
    let map = make(&mut s, ctx.tol);
    vec![check_orthogonal_scalar_additivity(&map, &mut s, ctx.trials, ctx.tol)]
}

fn run_orth_unitary(ctx: &Ctx) -> Vec<TrialReport> {
    orth(ctx, unitary_map)
}
fn run_orth_conj(ctx: &Ctx) -> Vec<TrialReport> {
    orth(ctx, conj_map)
}
fn run_orth_split(ctx: &Ctx) -> Vec<TrialReport> {
    orth(ctx, split_map)
}
