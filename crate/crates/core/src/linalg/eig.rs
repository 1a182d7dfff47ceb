//! Cyclic complex Jacobi eigensolver and the spectral functions built on it.

use super::matrix::{CMatrix, TolerancePolicy, C64, ZERO};
use crate::error::{Error, Result};

/// Eigendecomposition `m = V diag(values) V*` of a hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermEig {
    /// Descending; ties keep the order in which the solver produced them.
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermEig {
    pub fn reconstruct(&self) -> CMatrix {
        spectral_sum(&self.vectors, self.values.iter().map(|&v| C64::new(v, 0.0)))
    }
}

/// `Σ_i w_i v_i v_i*` over the columns `v_i` of `vectors`; zero weights are skipped.
pub(crate) fn spectral_sum(vectors: &CMatrix, weights: impl IntoIterator<Item = C64>) -> CMatrix {
    let n = vectors.rows();
    let mut out = CMatrix::zeros(n, n);
    for (k, w) in weights.into_iter().enumerate() {
        if w == ZERO {
            continue;
        }
        for i in 0..n {
            let vi = w * vectors[(i, k)];
            if vi == ZERO {
                continue;
            }
            for j in 0..n {
                out[(i, j)] += vi * vectors[(j, k)].conj();
            }
        }
    }
    out
}

/// One Jacobi rotation `J` annihilating the `(p, q)` entry of the hermitian 2x2
/// `[[app, apq], [conj(apq), aqq]]` via `J* A J`. Returns `(J_pp, J_pq, J_qp, J_qq)`.
pub(crate) fn jacobi_rotation(app: f64, aqq: f64, apq: C64) -> (C64, C64, C64, C64) {
    let g = apq.norm();
    let phase = apq / g;
    let theta = (aqq - app) / (2.0 * g);
    let t = if theta >= 0.0 {
        1.0 / (theta + theta.hypot(1.0))
    } else {
        -1.0 / (-theta + theta.hypot(1.0))
    };
    let c = 1.0 / t.hypot(1.0);
    let s = t * c;
    let back = phase.conj();
    (C64::new(c, 0.0), C64::new(s, 0.0), back * (-s), back * c)
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Hermitian eigendecomposition by cyclic Jacobi sweeps in row order.
pub fn herm_eig(m: &CMatrix, tol: &TolerancePolicy) -> Result<HermEig> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let defect = m.hermitian_defect();
    if defect > tol.eq_tol {
        return Err(Error::NotHermitian(defect));
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = CMatrix::identity(n);
    let scale = a.fro_norm();
    let max_sweeps = (100 * n * n).max(1);

    let mut converged = scale == 0.0;
    for _ in 0..max_sweeps {
        if converged || off_diagonal_norm(&a) <= f64::EPSILON * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.norm() == 0.0 {
                    continue;
                }
                let (jpp, jpq, jqp, jqq) = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, apq);
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * jpp + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * jqq;
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > f64::EPSILON * scale {
        return Err(Error::NoConvergence(max_sweeps));
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal eigenvalues keep solver index order
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermEig { values, vectors })
}

/// Eigendecomposition of a nominally PSD matrix with small negatives clamped to zero.
fn psd_eig(m: &CMatrix, tol: &TolerancePolicy) -> Result<HermEig> {
    let mut eig = herm_eig(m, tol)?;
    let norm = eig.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    for v in eig.values.iter_mut() {
        if *v < 0.0 {
            if *v < -tol.psd_clip * norm {
                return Err(Error::NotPsd(*v));
            }
            *v = 0.0;
        }
    }
    Ok(eig)
}

/// `m^t` for PSD `m` and `t ∈ [0, 1]`, with `0^t := 0` for every `t`.
///
/// Eigenvalues at or below `rank_tol * λ_max` are treated as zero, so `m^0` is the
/// range projection of `m`.
pub fn psd_power(m: &CMatrix, t: f64, tol: &TolerancePolicy) -> Result<CMatrix> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("exponent {t} outside [0, 1]")));
    }
    let eig = psd_eig(m, tol)?;
    let cutoff = tol.rank_tol * eig.values.first().copied().unwrap_or(0.0);
    let weights = eig.values.iter().map(|&v| {
        if v > cutoff && v > 0.0 {
            C64::new(if t == 0.0 { 1.0 } else { v.powf(t) }, 0.0)
        } else {
            ZERO
        }
    });
    Ok(spectral_sum(&eig.vectors, weights))
}

/// Orthogonal projection onto the range of a PSD matrix.
pub fn range_projection(m: &CMatrix, tol: &TolerancePolicy) -> Result<CMatrix> {
    psd_power(m, 0.0, tol)
}
