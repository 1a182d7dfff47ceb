use super::eig::jacobi_rotation;
use super::matrix::{CMatrix, TolerancePolicy, C64, ZERO};
use crate::error::{Error, Result};

/// Thin singular value decomposition `m = U diag(sigma) V*`.
///
/// Columns of `U` belonging to singular values at or below the rank cutoff are zero.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v: CMatrix,
    /// Number of singular values above `rank_tol * sigma_max`.
    pub rank: usize,
}

impl Svd {
    pub fn reconstruct(&self) -> CMatrix {
        let (m, n) = (self.u.rows(), self.v.rows());
        CMatrix::from_fn(m, n, |i, j| {
            (0..self.sigma.len()).map(|k| self.u[(i, k)] * self.sigma[k] * self.v[(j, k)].conj()).sum()
        })
    }
}

/// One-sided (Hestenes) Jacobi: rotates column pairs of `m` until they are mutually
/// orthogonal, which implicitly diagonalizes `m* m` with the same rotations the
/// two-sided solver would use, without squaring the condition number.
pub fn svd(m: &CMatrix, tol: &TolerancePolicy) -> Result<Svd> {
    let (rows, n) = m.shape();
    let mut g = m.clone();
    let mut v = CMatrix::identity(n);
    let max_sweeps = (100 * n * n).max(1);
    let threshold = f64::EPSILON * (rows.max(1) as f64);
    // columns this small sit far below any rank cutoff; rotating them never settles
    let negligible = (f64::EPSILON * m.fro_norm()).powi(2);

    let mut converged = false;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, ZERO);
                for k in 0..rows {
                    let (gp, gq) = (g[(k, p)], g[(k, q)]);
                    alpha += gp.norm_sqr();
                    beta += gq.norm_sqr();
                    gamma += gp.conj() * gq;
                }
                if gamma.norm() <= threshold * (alpha * beta).sqrt() || alpha.min(beta) <= negligible {
                    continue;
                }
                rotated = true;
                let (jpp, jpq, jqp, jqq) = jacobi_rotation(alpha, beta, gamma);
                for k in 0..rows {
                    let (gp, gq) = (g[(k, p)], g[(k, q)]);
                    g[(k, p)] = gp * jpp + gq * jqp;
                    g[(k, q)] = gp * jpq + gq * jqq;
                }
                for k in 0..n {
                    let (vp, vq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vp * jpp + vq * jqp;
                    v[(k, q)] = vp * jpq + vq * jqq;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence(max_sweeps));
    }

    let norms: Vec<f64> = (0..n).map(|j| (0..rows).map(|k| g[(k, j)].norm_sqr()).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let sigma: Vec<f64> = order.iter().map(|&i| norms[i]).collect();
    let cutoff = tol.rank_tol * sigma.first().copied().unwrap_or(0.0);
    let rank = sigma.iter().filter(|&&s| s > cutoff && s > 0.0).count();

    let mut u = CMatrix::zeros(rows, n);
    for (c, &src) in order.iter().enumerate().take(rank) {
        let inv = 1.0 / sigma[c];
        for k in 0..rows {
            u[(k, c)] = g[(k, src)] * inv;
        }
    }
    let v = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(Svd { u, sigma, v, rank })
}

/// Polar decomposition `a = u |a|` with `u*u` the range projection of `|a|`.
#[derive(Debug, Clone)]
pub struct PolarParts {
    /// Partial isometry, not extended to a unitary on the kernel of `a`.
    pub u: CMatrix,
    /// `|a| = (a* a)^{1/2}`.
    pub modulus: CMatrix,
}

pub fn polar_decompose(a: &CMatrix, tol: &TolerancePolicy) -> Result<PolarParts> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let s = svd(a, tol)?;
    let n = a.rows();
    let u = CMatrix::from_fn(n, n, |i, j| (0..s.rank).map(|k| s.u[(i, k)] * s.v[(j, k)].conj()).sum());
    let modulus = super::eig::spectral_sum(&s.v, s.sigma.iter().map(|&x| C64::new(x, 0.0)));
    Ok(PolarParts { u, modulus })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eig::range_projection;

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    #[test]
    fn zero_matrix_has_zero_spectrum() {
        let s = svd(&CMatrix::zeros(3, 3), &tol()).unwrap();
        assert_eq!(s.sigma, vec![0.0; 3]);
        assert_eq!(s.rank, 0);
        assert_eq!(s.u, CMatrix::zeros(3, 3));
    }

    #[test]
    fn nilpotent_singular_values() {
        // a*a = diag(0, 4)
        let s = svd(&CMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]), &tol()).unwrap();
        assert!((s.sigma[0] - 2.0).abs() < 1e-15 && s.sigma[1] == 0.0);
        assert_eq!(s.rank, 1);
    }

    #[test]
    fn polar_of_normal_diagonal() {
        let p = polar_decompose(&CMatrix::diag_real(&[2.0, -3.0]), &tol()).unwrap();
        assert!(p.u.rel_dist(&CMatrix::diag_real(&[1.0, -1.0])) < 1e-15);
        assert!(p.modulus.rel_dist(&CMatrix::diag_real(&[2.0, 3.0])) < 1e-15);
    }

    #[test]
    fn polar_of_nilpotent_is_partial_isometry() {
        let a = CMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]);
        let p = polar_decompose(&a, &tol()).unwrap();
        assert!(p.u.rel_dist(&CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]])) < 1e-15);
        assert!(p.modulus.rel_dist(&CMatrix::diag_real(&[0.0, 2.0])) < 1e-15);
        let uu = &p.u.adjoint() * &p.u;
        assert!(uu.rel_dist(&range_projection(&p.modulus, &tol()).unwrap()) < 1e-15);
    }

    #[test]
    fn rectangular_input() {
        let m = CMatrix::from_real_rows(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]);
        let s = svd(&m, &tol()).unwrap();
        assert_eq!(s.rank, 2);
        assert!(s.reconstruct().rel_dist(&m) < 1e-14);
        assert!(polar_decompose(&m, &tol()).is_err());
    }
}
