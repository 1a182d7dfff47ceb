//! Reproducible random streams and samplers for algebra elements.
//!
//! # Stream definition
//!
//! The generator is SplitMix64 used as a counter-based stream: the `k`-th output
//! (`k = 1, 2, …`) for seed `s` is `mix(s + k·0x9E3779B97F4A7C15)` with wrapping
//! arithmetic and
//!
//! ```text
//! mix(z): z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!         z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!         return z ^ (z >> 31)
//! ```
//!
//! Derived quantities, in the order they consume outputs:
//!
//! * uniform `[0, 1)`: `(next >> 11) · 2^-53` (one output);
//! * index in `0..n`: `next % n` (one output);
//! * standard normal: Box–Muller cosine branch, `sqrt(-2 ln(1 − u1)) · cos(2π u2)` with
//!   `u1`, `u2` uniform in that order (two outputs);
//! * standard complex Gaussian: `(x + i y) / √2` with `x`, `y` standard normals.
//!
//! Sub-seeds for a named property are `mix(seed ^ fnv1a64(label))`, where `fnv1a64` is
//! the 64-bit FNV-1a hash of the UTF-8 label.

use crate::algebra::{AlgElem, VNAlgebra};
use crate::linalg::{range_projection, vec_norm, CMatrix, TolerancePolicy, C64, ZERO};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Seed for the stream attached to `label` under the master `seed`.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    mix64(seed ^ fnv1a64(label.as_bytes()))
}

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0, "empty range");
        (self.next_u64() % n as u64) as usize
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * (1.0 - u1).ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn complex_gaussian(&mut self) -> C64 {
        let x = self.normal();
        let y = self.normal();
        C64::new(x, y) * std::f64::consts::FRAC_1_SQRT_2
    }
}

/// Draws elements, unitaries and projections of one algebra from a seeded stream.
#[derive(Debug, Clone)]
pub struct Sampler {
    algebra: VNAlgebra,
    rng: SplitMix64,
    seed: u64,
    tol: TolerancePolicy,
}

impl Sampler {
    pub fn new(algebra: VNAlgebra, seed: u64) -> Self {
        Self { algebra, rng: SplitMix64::new(seed), seed, tol: TolerancePolicy::default() }
    }

    pub fn with_tolerance(mut self, tol: TolerancePolicy) -> Self {
        self.tol = tol;
        self
    }

    pub fn algebra(&self) -> &VNAlgebra {
        &self.algebra
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rng(&mut self) -> &mut SplitMix64 {
        &mut self.rng
    }

    pub fn scalar(&mut self) -> C64 {
        self.rng.complex_gaussian()
    }

    pub fn real(&mut self) -> f64 {
        self.rng.normal()
    }

    pub fn gaussian_matrix(&mut self, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| self.rng.complex_gaussian())
    }

    pub fn unit_vector(&mut self, n: usize) -> Vec<C64> {
        loop {
            let v: Vec<C64> = (0..n).map(|_| self.rng.complex_gaussian()).collect();
            let norm = vec_norm(&v);
            if norm > 1e-8 {
                return v.into_iter().map(|z| z / norm).collect();
            }
        }
    }

    /// Gram–Schmidt on a Gaussian matrix, then each column's first nonzero entry is
    /// rotated to the positive real axis.
    pub fn unitary_matrix(&mut self, n: usize) -> CMatrix {
        loop {
            let g = self.gaussian_matrix(n, n);
            if let Some(q) = orthonormalize_columns(&g) {
                return q;
            }
        }
    }

    fn per_block(&mut self, mut f: impl FnMut(&mut Self, usize) -> CMatrix) -> AlgElem {
        let dims = self.algebra.block_dims().to_vec();
        let blocks = dims.into_iter().map(|n| f(self, n)).collect();
        self.algebra.element(blocks).expect("sampler builds blocks of the right shape")
    }

    pub fn element(&mut self) -> AlgElem {
        self.per_block(|s, n| s.gaussian_matrix(n, n))
    }

    pub fn hermitian(&mut self) -> AlgElem {
        self.per_block(|s, n| s.gaussian_matrix(n, n).hermitian_part())
    }

    pub fn skew_hermitian(&mut self) -> AlgElem {
        self.hermitian().scale(C64::new(0.0, 1.0))
    }

    pub fn unitary(&mut self) -> AlgElem {
        self.per_block(|s, n| s.unitary_matrix(n))
    }

    /// Normal element `W D W*` with complex Gaussian spectrum.
    pub fn normal_element(&mut self) -> AlgElem {
        self.per_block(|s, n| {
            let w = s.unitary_matrix(n);
            let d: Vec<C64> = (0..n).map(|_| s.rng.complex_gaussian()).collect();
            &(&w * &CMatrix::diag(&d)) * &w.adjoint()
        })
    }

    /// `u |a|` with `u` a partial isometry commuting with `|a|` and `u*u` the range
    /// projection of `|a|`. Eigenvalues of `|a|` come in repeated groups and the last
    /// group is zero whenever the block has dimension at least two, so `u` is not
    /// unitary there.
    pub fn quasinormal_element(&mut self) -> AlgElem {
        self.per_block(|s, n| {
            let w = s.unitary_matrix(n);
            let mut modulus = vec![0.0; n];
            let mut phase = CMatrix::zeros(n, n);
            let live = if n >= 2 { n - 1 - s.rng.index(n - 1) } else { 1 };
            let mut start = 0;
            while start < live {
                let len = 1 + s.rng.index(live - start);
                let value = 0.5 + 2.0 * s.rng.uniform();
                let block_u = s.unitary_matrix(len);
                for i in 0..len {
                    modulus[start + i] = value;
                    for j in 0..len {
                        phase[(start + i, start + j)] = block_u[(i, j)];
                    }
                }
                start += len;
            }
            let abs = &(&w * &CMatrix::diag_real(&modulus)) * &w.adjoint();
            let u = &(&w * &phase) * &w.adjoint();
            &u * &abs
        })
    }

    /// `R B K*` with `R`, `K` orthonormal column sets spanning orthogonal subspaces,
    /// so the square vanishes. Blocks of size one are zero.
    pub fn nilpotent(&mut self) -> AlgElem {
        self.per_block(|s, n| {
            if n < 2 {
                return CMatrix::zeros(n, n);
            }
            let w = s.unitary_matrix(n);
            let k = 1 + s.rng.index(n / 2);
            let k2 = 1 + s.rng.index(n - k);
            let r = CMatrix::from_fn(n, k, |i, j| w[(i, j)]);
            let kk = CMatrix::from_fn(n, k2, |i, j| w[(i, k + j)]);
            let b = s.gaussian_matrix(k, k2);
            &(&r * &b) * &kk.adjoint()
        })
    }

    fn range_of(&self, g: &CMatrix) -> CMatrix {
        let n = g.rows();
        if g.cols() == 0 {
            return CMatrix::zeros(n, n);
        }
        range_projection(&(g * &g.adjoint()), &self.tol).expect("G G* is PSD")
    }

    /// Range projection of `G G*` for a Gaussian `n × k` matrix, `k` uniform in `0..=n`.
    pub fn projection(&mut self) -> AlgElem {
        self.per_block(|s, n| {
            let k = s.rng.index(n + 1);
            let g = s.gaussian_matrix(n, k);
            s.range_of(&g)
        })
    }

    /// Pair `(p, q)` with `p ≤ q`.
    pub fn leq_pair(&mut self) -> (AlgElem, AlgElem) {
        let dims = self.algebra.block_dims().to_vec();
        let mut ps = Vec::new();
        let mut qs = Vec::new();
        for n in dims {
            let k = self.rng.index(n + 1);
            let g = self.gaussian_matrix(n, k);
            let j = self.rng.index(k + 1);
            let b = self.gaussian_matrix(k, j);
            ps.push(self.range_of(&(&g * &b)));
            qs.push(self.range_of(&g));
        }
        (self.algebra.element(ps).expect("shape"), self.algebra.element(qs).expect("shape"))
    }

    /// `parts` mutually orthogonal projections carved from one unitary per block.
    pub fn orthogonal_family(&mut self, parts: usize) -> Vec<AlgElem> {
        let dims = self.algebra.block_dims().to_vec();
        let mut family: Vec<Vec<CMatrix>> = vec![Vec::new(); parts];
        for n in dims {
            let w = self.unitary_matrix(n);
            let labels: Vec<usize> = (0..n).map(|_| self.rng.index(parts + 1)).collect();
            for (part, blocks) in family.iter_mut().enumerate() {
                let cols: Vec<usize> = (0..n).filter(|&c| labels[c] == part).collect();
                let g = CMatrix::from_fn(n, cols.len(), |i, j| w[(i, cols[j])]);
                blocks.push(&g * &g.adjoint());
            }
        }
        family.into_iter().map(|b| self.algebra.element(b).expect("shape")).collect()
    }

    /// Rank-one projection inside a uniformly chosen block.
    pub fn minimal_projection(&mut self) -> AlgElem {
        let k = self.rng.index(self.algebra.num_blocks());
        let n = self.algebra.block_dims()[k];
        let xi = self.unit_vector(n);
        self.algebra.embed(k, CMatrix::outer(&xi, &xi)).expect("block in range")
    }

    /// Two orthogonal minimal projections, or `None` when the algebra is one-dimensional.
    pub fn orthogonal_minimal_pair(&mut self) -> Option<(AlgElem, AlgElem)> {
        if self.algebra.total_dim() < 2 {
            return None;
        }
        // flatten (block, column) slots and draw two distinct ones
        let slots: Vec<(usize, usize)> =
            self.algebra.block_dims().iter().enumerate().flat_map(|(k, &n)| (0..n).map(move |c| (k, c))).collect();
        let first = self.rng.index(slots.len());
        let mut second = self.rng.index(slots.len() - 1);
        if second >= first {
            second += 1;
        }
        let unitaries: Vec<CMatrix> = self.algebra.block_dims().to_vec().into_iter().map(|n| self.unitary_matrix(n)).collect();
        let make = |(k, c): (usize, usize)| {
            let col = unitaries[k].column(c);
            self.algebra.embed(k, CMatrix::outer(&col, &col)).expect("block in range")
        };
        Some((make(slots[first]), make(slots[second])))
    }

    /// Central element with complex Gaussian scalars per block.
    pub fn central_element(&mut self) -> AlgElem {
        self.per_block(|s, n| CMatrix::identity(n).scale(s.rng.complex_gaussian()))
    }

    /// Two hermitian polynomials (degree ≤ 2, real coefficients) in one hermitian element.
    pub fn commuting_hermitian_pair(&mut self) -> (AlgElem, AlgElem) {
        let h = self.hermitian();
        let h2 = h.mul(&h).expect("same algebra");
        let one = self.algebra.identity();
        let poly = |s: &mut Self| {
            let c: Vec<f64> = (0..3).map(|_| s.rng.normal()).collect();
            one.scale(C64::new(c[0], 0.0))
                .add(&h.scale(C64::new(c[1], 0.0)))
                .and_then(|x| x.add(&h2.scale(C64::new(c[2], 0.0))))
                .expect("same algebra")
        };
        let a = poly(self);
        let b = poly(self);
        (a, b)
    }
}

/// Modified Gram–Schmidt over the columns with the phase convention; `None` if the
/// columns are numerically dependent.
pub fn orthonormalize_columns(g: &CMatrix) -> Option<CMatrix> {
    let (rows, cols) = g.shape();
    let mut q = g.clone();
    for j in 0..cols {
        let mut v = q.column(j);
        for i in 0..j {
            let qi = q.column(i);
            let proj: C64 = qi.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(&qi) {
                *x -= proj * y;
            }
        }
        let norm = vec_norm(&v);
        if norm < 1e-10 {
            return None;
        }
        let lead = v.iter().copied().find(|z| z.norm() > 1e-14).unwrap_or(ZERO);
        let phase = if lead == ZERO { C64::new(1.0, 0.0) } else { lead.conj() / lead.norm() };
        for x in v.iter_mut() {
            *x = *x * phase / norm;
        }
        q.set_column(j, &v);
    }
    debug_assert_eq!(q.rows(), rows);
    Some(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aluthge::{is_quasinormal, quasinormal_residual};

    #[test]
    fn splitmix_reference_values() {
        // Reference outputs of SplitMix64 seeded with 0 and 1234567.
        let mut r = SplitMix64::new(0);
        assert_eq!(r.next_u64(), 0xe220_a839_7b1d_cdaf);
        assert_eq!(r.next_u64(), 0x6e78_9e6a_a1b9_65f4);
        let mut r = SplitMix64::new(1_234_567);
        assert_eq!(r.next_u64(), 6_457_827_717_110_365_317);
        assert_eq!(r.next_u64(), 3_203_168_211_198_807_973);
    }

    #[test]
    fn derived_seeds_differ_by_label() {
        assert_ne!(derive_seed(42, "kernel"), derive_seed(42, "fixed_point"));
        assert_eq!(derive_seed(42, "kernel"), derive_seed(42, "kernel"));
        assert_eq!(fnv1a64(b""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv1a64(b"a"), 0xaf63_dc4c_8601_ec8c);
    }

    #[test]
    fn uniform_and_normal_ranges() {
        let mut r = SplitMix64::new(7);
        let mut sum = 0.0;
        let mut sq = 0.0;
        let n = 20_000;
        for _ in 0..n {
            let u = r.uniform();
            assert!((0.0..1.0).contains(&u));
            let z = r.normal();
            sum += z;
            sq += z * z;
        }
        let mean = sum / n as f64;
        let var = sq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.05 && (var - 1.0).abs() < 0.05, "mean {mean} var {var}");
    }

    #[test]
    fn sampled_structures_have_their_properties() {
        let tol = TolerancePolicy::default();
        let alg = VNAlgebra::new(vec![1, 3, 2]).unwrap();
        let mut s = Sampler::new(alg.clone(), 99);
        for _ in 0..20 {
            assert!(s.unitary().is_unitary(&tol));
            assert!(s.projection().is_projection(&tol));
            let (p, q) = s.leq_pair();
            assert!(p.proj_leq(&q, &tol).unwrap());
            let fam = s.orthogonal_family(3);
            for i in 0..3 {
                for j in i + 1..3 {
                    assert!(fam[i].proj_orthogonal(&fam[j], &tol).unwrap());
                }
            }
            assert!(s.minimal_projection().is_minimal_projection(&tol));
            let (p, q) = s.orthogonal_minimal_pair().unwrap();
            assert!(p.proj_orthogonal(&q, &tol).unwrap());
            let nil = s.nilpotent();
            assert!(nil.mul(&nil).unwrap().fro_norm() < 1e-12 * (1.0 + nil.fro_norm()));
            let qn = s.quasinormal_element();
            assert!(is_quasinormal(&qn, &tol), "{}", quasinormal_residual(&qn));
            assert!(s.central_element().is_central(&tol));
            let (a, b) = s.commuting_hermitian_pair();
            assert!(a.operator_commute(&b, &tol).unwrap());
        }
    }

    #[test]
    fn same_seed_same_stream() {
        let alg = VNAlgebra::new(vec![2, 2]).unwrap();
        let a = Sampler::new(alg.clone(), 5).element();
        let b = Sampler::new(alg, 5).element();
        assert_eq!(a, b);
    }
}
