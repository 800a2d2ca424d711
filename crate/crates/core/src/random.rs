//! Seeded random states and local unitaries.
//!
//! Every sampler takes an explicit generator. Parallel campaigns derive one
//! independent stream per task with [`stream`], so results do not depend on
//! how tasks are distributed over threads.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::quantum::{DensityMatrix, Matrix2c, Matrix8, PureState, QubitLabel, C64, DIM, ZERO};

/// Generator for task `task` of a campaign seeded with `master`.
pub fn stream(master: u64, task: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(task);
    rng
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn gaussian_vector<R: Rng + ?Sized, const N: usize>(rng: &mut R) -> [C64; N] {
    std::array::from_fn(|_| complex_gaussian(rng))
}

fn normalized<const N: usize>(mut v: [C64; N]) -> [C64; N] {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z /= n;
    }
    v
}

/// Unitarily invariant random ket (normalized complex Gaussian vector).
pub fn haar_random_pure<R: Rng + ?Sized>(rng: &mut R) -> PureState {
    loop {
        if let Ok(psi) = PureState::normalize(gaussian_vector::<R, DIM>(rng)) {
            return psi;
        }
    }
}

/// Haar random single-qubit ket.
pub fn haar_qubit<R: Rng + ?Sized>(rng: &mut R) -> [C64; 2] {
    normalized(gaussian_vector::<R, 2>(rng))
}

/// Haar random two-qubit ket, indexed `2·b + c`.
pub fn haar_two_qubit<R: Rng + ?Sized>(rng: &mut R) -> [C64; 4] {
    normalized(gaussian_vector::<R, 4>(rng))
}

/// Induced-measure mixed state of rank at most `k`: `G G† / tr(G G†)` for an
/// 8×k complex Ginibre matrix `G`, i.e. the marginal of a Haar random pure
/// state on the system and a `k`-dimensional ancilla.
pub fn random_mixed_of_rank<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<DensityMatrix> {
    if !(1..=DIM).contains(&k) {
        return Err(Error::Domain(format!("rank {k} outside 1..=8")));
    }
    let g = DMatrix::<C64>::from_fn(DIM, k, |_, _| complex_gaussian(rng));
    let gg = &g * g.adjoint();
    let tr = gg.trace().re;
    let m = Matrix8::from_fn(|i, j| gg[(i, j)] / tr);
    // symmetrize rounding so the Hermiticity check is exact
    Ok(DensityMatrix::from_trusted(
        (m + m.adjoint()) * C64::new(0.5, 0.0),
    ))
}

/// Rank for task `task` of a mixed-rank schedule cycling through 1..=8.
pub fn scheduled_rank(task: u64) -> usize {
    (task % DIM as u64) as usize + 1
}

/// Haar random element of SU(2), from a uniformly random unit quaternion.
pub fn random_local_unitary<R: Rng + ?Sized>(rng: &mut R) -> Matrix2c {
    let q: [f64; 4] = loop {
        let v: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            break v.map(|x| x / n);
        }
    };
    let a = C64::new(q[0], q[1]);
    let b = C64::new(q[2], q[3]);
    Matrix2c::new(a, b, -b.conj(), a.conj())
}

/// `|a⟩ ⊗ |b⟩ ⊗ |c⟩` with independent Haar qubits.
pub fn random_product_state<R: Rng + ?Sized>(rng: &mut R) -> PureState {
    let (a, b, c) = (haar_qubit(rng), haar_qubit(rng), haar_qubit(rng));
    PureState::product(a, b, c).expect("product of unit vectors")
}

/// Haar qubit on `single` times a Haar two-qubit state on the rest.
pub fn random_biseparable_pure<R: Rng + ?Sized>(single: QubitLabel, rng: &mut R) -> PureState {
    let (x, pair) = (haar_qubit(rng), haar_two_qubit(rng));
    PureState::bipartite_product(single, x, pair).expect("product of unit vectors")
}

/// Uniform weights on the probability simplex.
pub fn dirichlet_weights<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n)
        .map(|_| rng.sample::<f64, _>(Exp1) + 1e-300)
        .collect();
    let total: f64 = w.iter().sum();
    for v in w.iter_mut() {
        *v /= total;
    }
    w
}

/// Maximum number of pure terms in the constructed separable mixtures.
pub const MAX_TERMS: usize = 16;

fn mixture_of<R, F>(rng: &mut R, mut term: F) -> DensityMatrix
where
    R: Rng + ?Sized,
    F: FnMut(&mut R) -> PureState,
{
    let n = rng.random_range(1..=MAX_TERMS);
    let weights = dirichlet_weights(n, rng);
    let mut m = Matrix8::from_element(ZERO);
    for w in weights {
        m += term(rng).density().into_matrix() * C64::new(w, 0.0);
    }
    let tr = m.trace().re;
    m /= C64::new(tr, 0.0);
    DensityMatrix::from_trusted(m)
}

/// Mixture of up to [`MAX_TERMS`] random product states.
pub fn random_fully_separable<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix {
    mixture_of(rng, |r| random_product_state(r))
}

/// Mixture of up to [`MAX_TERMS`] random pure states product across `single | rest`.
pub fn random_biseparable<R: Rng + ?Sized>(single: QubitLabel, rng: &mut R) -> DensityMatrix {
    mixture_of(rng, |r| random_biseparable_pure(single, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::sector_coordinates;
    use crate::quantum::{numeric_rank, partial_trace};

    #[test]
    fn haar_pure_is_normalized_and_deterministic() {
        let a = haar_random_pure(&mut stream(7, 3));
        let b = haar_random_pure(&mut stream(7, 3));
        assert_eq!(a, b);
        assert!((a.norm_sqr() - 1.0).abs() < 1e-12);
        assert_ne!(a, haar_random_pure(&mut stream(7, 4)));
    }

    #[test]
    fn haar_two_body_means_are_permutation_symmetric() {
        let n = 10_000;
        let mut sums = [[0.0f64; 3]; 2];
        let mut rng = stream(11, 0);
        for _ in 0..n {
            let c = sector_coordinates(&haar_random_pure(&mut rng).density());
            for (k, v) in c.two_body().iter().enumerate() {
                sums[0][k] += v;
                sums[1][k] += v * v;
            }
        }
        let mean: Vec<f64> = sums[0].iter().map(|s| s / n as f64).collect();
        let se: Vec<f64> = (0..3)
            .map(|k| ((sums[1][k] / n as f64 - mean[k] * mean[k]) / n as f64).sqrt())
            .collect();
        for i in 0..3 {
            for j in i + 1..3 {
                let pooled = (se[i] * se[i] + se[j] * se[j]).sqrt();
                assert!((mean[i] - mean[j]).abs() < 3.0 * pooled, "{mean:?} {se:?}");
            }
        }
    }

    #[test]
    fn mixed_rank_examples() {
        let mut rng = stream(5, 0);
        let pure = random_mixed_of_rank(1, &mut rng).unwrap();
        assert!((pure.purity() - 1.0).abs() < 1e-10);
        for _ in 0..100 {
            assert_eq!(numeric_rank(&random_mixed_of_rank(8, &mut rng).unwrap()), 8);
        }
        for _ in 0..200 {
            let c = sector_coordinates(&random_mixed_of_rank(2, &mut rng).unwrap());
            assert!(c.s2_total() >= 1.0 - 1e-9);
        }
        assert!(matches!(
            random_mixed_of_rank(0, &mut rng),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            random_mixed_of_rank(9, &mut rng),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn local_unitary_is_special_unitary() {
        let mut rng = stream(1, 1);
        for _ in 0..20 {
            let u = random_local_unitary(&mut rng);
            assert!((u.adjoint() * u - Matrix2c::identity()).norm() < 1e-12);
            assert!((u.determinant() - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn biseparable_pure_has_pure_single_marginal() {
        let mut rng = stream(2, 0);
        for q in QubitLabel::ALL {
            let psi = random_biseparable_pure(q, &mut rng).density();
            let m = partial_trace(&psi, &[q]).unwrap();
            let purity: f64 = m.iter().map(|z| z.norm_sqr()).sum();
            assert!((purity - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn separable_constructions_are_valid() {
        let mut rng = stream(3, 0);
        for _ in 0..20 {
            assert!(random_fully_separable(&mut rng).validation().valid);
            assert!(
                random_biseparable(QubitLabel::B, &mut rng)
                    .validation()
                    .valid
            );
        }
    }
}
