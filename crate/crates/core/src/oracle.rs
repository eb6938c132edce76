//! Seeded random instances and brute-force reference routines for tests and
//! property sweeps.

use std::f64::consts::TAU;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::circuit::PhaseConfig;
use crate::linalg::DenseMatrix;
use crate::state::{canonicalize, Space, StateVector, Statistics};
use crate::{Error, Result, C64};

/// Name of the RNG recorded in reports.
pub const ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.9), seed_from_u64 + per-task stream";

/// Reproducible random source. Task streams split off a seed share the key
/// and differ in the ChaCha stream id.
#[derive(Clone, Debug)]
pub struct SeededGenerator {
    seed: u64,
    rng: ChaCha8Rng,
}

impl SeededGenerator {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent generator for task `index` under `seed`.
    pub fn split(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index.wrapping_add(1));
        Self { seed, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn algorithm(&self) -> &'static str {
        ALGORITHM
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Standard complex Gaussian (unit variance per component).
    pub fn complex_normal(&mut self) -> C64 {
        C64::new(self.normal(), self.normal())
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }
}

/// Haar-random unit vector of length `n` via a normalized Gaussian vector.
pub fn random_unit_vector(gen: &mut SeededGenerator, n: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n).map(|_| gen.complex_normal()).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-300 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Haar-random pure three-qubit state, amplitudes indexed `4a + 2b + c`.
pub fn random_pure_three_qubit(gen: &mut SeededGenerator) -> Vec<C64> {
    random_unit_vector(gen, 8)
}

/// Matrix with i.i.d. complex Gaussian entries.
pub fn random_complex_matrix(gen: &mut SeededGenerator, n: usize) -> DenseMatrix {
    DenseMatrix::from_vec(n, n, (0..n * n).map(|_| gen.complex_normal()).collect()).expect("n x n")
}

/// Random density matrix `G G^dag / Tr` of full rank.
pub fn random_density(gen: &mut SeededGenerator, n: usize) -> DenseMatrix {
    let g = random_complex_matrix(gen, n);
    let p = &g * &g.adjoint();
    let t = p.trace();
    p.scale(C64::new(1.0, 0.0) / t)
}

/// Haar-ish random unitary from Gram-Schmidt on a Gaussian matrix.
pub fn random_unitary(gen: &mut SeededGenerator, n: usize) -> DenseMatrix {
    let g = random_complex_matrix(gen, n);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v: Vec<C64> = (0..n).map(|i| g[(i, j)]).collect();
        for q in &cols {
            let proj: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= proj * qi;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    let mut u = DenseMatrix::zeros(n, n);
    for (j, col) in cols.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            u[(i, j)] = *z;
        }
    }
    u
}

/// Four phases uniform in `[0, 2 pi)`.
pub fn random_phases(gen: &mut SeededGenerator) -> PhaseConfig {
    PhaseConfig::new(
        gen.uniform(0.0, TAU),
        gen.uniform(0.0, TAU),
        gen.uniform(0.0, TAU),
        gen.uniform(0.0, TAU),
    )
}

/// Random normalized state: each allowed canonical ket is kept with
/// probability 1/2 and given a complex Gaussian amplitude.
pub fn random_two_particle_state(
    gen: &mut SeededGenerator,
    space: &Arc<Space>,
    statistics: Statistics,
) -> StateVector {
    let basis = space.basis(None);
    loop {
        let mut s = StateVector::new(statistics, space.clone());
        for (i, a) in basis.iter().enumerate() {
            for b in &basis[i..] {
                if canonicalize(a.clone(), b.clone(), statistics).is_some() && gen.coin(0.5) {
                    s.add_term(a.clone(), b.clone(), gen.complex_normal())
                        .expect("basis labels are valid");
                }
            }
        }
        if let Ok(n) = s.normalized() {
            return n;
        }
    }
}

/// Random normalized state with exactly one particle at `loc_a` and one at
/// `loc_b`, dense over all DoF values.
pub fn random_one_per_location_state(
    gen: &mut SeededGenerator,
    space: &Arc<Space>,
    statistics: Statistics,
    loc_a: usize,
    loc_b: usize,
) -> StateVector {
    let mut s = StateVector::new(statistics, space.clone());
    for a in space.basis(Some(loc_a)) {
        for b in space.basis(Some(loc_b)) {
            s.add_term(a.clone(), b, gen.complex_normal())
                .expect("basis labels are valid");
        }
    }
    s.normalized()
        .expect("Gaussian amplitudes are almost surely nonzero")
}

/// Reduced matrix over the factors in `keep` (ascending, each listed once)
/// by explicit nested-loop contraction over the discarded factors. `dims`
/// lists every tensor factor, most significant first.
pub fn brute_force_reduced(
    full: &DenseMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<DenseMatrix> {
    let total: usize = dims.iter().product();
    if full.rows() != total || full.cols() != total {
        return Err(Error::Shape(format!(
            "matrix is {}x{}, factors give {total}",
            full.rows(),
            full.cols()
        )));
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::Shape("keep must be ascending factor indices".into()));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|f| !keep.contains(f)).collect();
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&t| dims[t]).collect();
    let n: usize = kept_dims.iter().product();
    let nt: usize = traced_dims.iter().product();

    let digits = |mut x: usize, ds: &[usize]| -> Vec<usize> {
        let mut out = vec![0; ds.len()];
        for k in (0..ds.len()).rev() {
            out[k] = x % ds[k];
            x /= ds[k];
        }
        out
    };
    let compose = |kept: &[usize], tr: &[usize]| -> usize {
        let mut full_digits = vec![0; dims.len()];
        for (p, &f) in keep.iter().enumerate() {
            full_digits[f] = kept[p];
        }
        for (p, &f) in traced.iter().enumerate() {
            full_digits[f] = tr[p];
        }
        full_digits
            .iter()
            .zip(dims)
            .fold(0, |acc, (&d, &q)| acc * q + d)
    };

    let mut out = DenseMatrix::zeros(n, n);
    for i in 0..n {
        let di = digits(i, &kept_dims);
        for j in 0..n {
            let dj = digits(j, &kept_dims);
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..nt {
                let dt = digits(t, &traced_dims);
                acc += full[(compose(&di, &dt), compose(&dj, &dt))];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::trace_out_factor;

    #[test]
    fn unit_norm_and_determinism() {
        let a = random_pure_three_qubit(&mut SeededGenerator::new(42));
        let b = random_pure_three_qubit(&mut SeededGenerator::new(42));
        assert_eq!(a, b);
        let n: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        assert!((n - 1.0).abs() < 1e-12);
        let c = random_pure_three_qubit(&mut SeededGenerator::split(42, 0));
        let d = random_pure_three_qubit(&mut SeededGenerator::split(42, 1));
        assert_ne!(c, d);
        assert_ne!(a, c);
    }

    #[test]
    fn haar_mean_weight() {
        let mut g = SeededGenerator::new(7);
        let mut acc = [0.0; 8];
        let n = 10_000;
        for _ in 0..n {
            for (s, z) in acc.iter_mut().zip(random_pure_three_qubit(&mut g)) {
                *s += z.norm_sqr();
            }
        }
        for s in acc {
            assert!((s / n as f64 - 0.125).abs() < 0.01);
        }
    }

    #[test]
    fn random_states_are_normalized_and_cover_same_location() {
        let space = crate::circuit::li_space();
        let mut g = SeededGenerator::new(3);
        let mut same = 0;
        for _ in 0..100 {
            let f = random_two_particle_state(&mut g, &space, Statistics::Fermion);
            assert!((f.norm() - 1.0).abs() < 1e-10);
            assert!(f.iter().all(|(k, _)| !k.is_doubly_occupied()));
            let b = random_two_particle_state(&mut g, &space, Statistics::Boson);
            if b.iter()
                .any(|(k, _)| k.first().location() == k.second().location())
            {
                same += 1;
            }
        }
        assert!(same > 0);
    }

    #[test]
    fn brute_force_reduction_cases() {
        let mut g = SeededGenerator::new(11);
        let rho = random_density(&mut g, 16);
        let all = brute_force_reduced(&rho, &[2, 2, 2, 2], &[0, 1, 2, 3]).unwrap();
        assert_eq!(all, rho);
        let none = brute_force_reduced(&rho, &[2, 2, 2, 2], &[]).unwrap();
        assert!((none[(0, 0)] - rho.trace()).norm() < 1e-13);
        let first = brute_force_reduced(&rho, &[4, 4], &[0]).unwrap();
        let fast = trace_out_factor(&rho, &[4, 4], 1).unwrap();
        assert!(first.max_abs_diff(&fast) < 1e-12);
        assert!(brute_force_reduced(&rho, &[2, 2], &[0]).is_err());
    }

    #[test]
    fn brute_force_hand_case() {
        // diag(0.7, 0.3) (x) diag(0.5, 0.5), keep first factor
        let d = |v: &[f64]| {
            DenseMatrix::diagonal(&v.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
        };
        let rho = d(&[0.7, 0.3]).kron(&d(&[0.5, 0.5]));
        let r = brute_force_reduced(&rho, &[2, 2], &[0]).unwrap();
        assert!(r.max_abs_diff(&d(&[0.7, 0.3])) < 1e-15);
    }

    #[test]
    fn unitary_is_unitary() {
        let u = random_unitary(&mut SeededGenerator::new(5), 4);
        assert!((&u.adjoint() * &u).max_abs_diff(&DenseMatrix::identity(4)) < 1e-12);
    }
}
