//! Pauli-basis (Bloch tensor) decomposition.

use crate::quantum::{DensityMatrix, Matrix8, C64, DIM, I, ONE, ZERO};

/// All 64 Pauli expectations `⟨σ_i ⊗ σ_j ⊗ σ_k⟩`, index 0 meaning identity.
///
/// `t[0][0][0] = 1`; the one-body vectors, two-body matrices and the
/// three-body tensor are slices of this array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochTensors {
    t: [[[f64; 4]; 4]; 4],
}

/// A Pauli string acts as `P|x⟩ = phase(x)|x ⊕ flip⟩`.
#[derive(Debug, Clone, Copy)]
struct SparsePauli {
    flip: usize,
    phase: [C64; DIM],
}

impl SparsePauli {
    fn new(ops: [usize; 3]) -> Self {
        let mut flip = 0;
        for (q, &op) in ops.iter().enumerate() {
            if op == 1 || op == 2 {
                flip |= 1 << (2 - q);
            }
        }
        let mut phase = [ONE; DIM];
        for (x, ph) in phase.iter_mut().enumerate() {
            for (q, &op) in ops.iter().enumerate() {
                let bit = (x >> (2 - q)) & 1;
                *ph *= match (op, bit) {
                    (2, 0) => I,
                    (2, _) => -I,
                    (3, 1) => -ONE,
                    _ => ONE,
                };
            }
        }
        Self { flip, phase }
    }

    /// `tr(ρ P) = Σ_x ρ[x, x⊕flip] · phase(x)`.
    fn expectation(&self, m: &Matrix8) -> f64 {
        (0..DIM)
            .map(|x| m[(x, x ^ self.flip)] * self.phase[x])
            .sum::<C64>()
            .re
    }
}

fn sparse_table() -> &'static [[[SparsePauli; 4]; 4]; 4] {
    use std::sync::OnceLock;
    static TABLE: OnceLock<[[[SparsePauli; 4]; 4]; 4]> = OnceLock::new();
    TABLE.get_or_init(|| {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| std::array::from_fn(|k| SparsePauli::new([i, j, k])))
        })
    })
}

impl BlochTensors {
    /// Expectations of an arbitrary 8×8 matrix, without validation.
    pub fn of_matrix(m: &Matrix8) -> Self {
        let table = sparse_table();
        let mut t = [[[0.0; 4]; 4]; 4];
        for (i, plane) in t.iter_mut().enumerate() {
            for (j, row) in plane.iter_mut().enumerate() {
                for (k, v) in row.iter_mut().enumerate() {
                    *v = table[i][j][k].expectation(m);
                }
            }
        }
        Self { t }
    }

    pub fn expectation(&self, i: usize, j: usize, k: usize) -> f64 {
        self.t[i][j][k]
    }

    pub fn raw(&self) -> &[[[f64; 4]; 4]; 4] {
        &self.t
    }

    pub fn t_a(&self) -> [f64; 3] {
        std::array::from_fn(|i| self.t[i + 1][0][0])
    }

    pub fn t_b(&self) -> [f64; 3] {
        std::array::from_fn(|i| self.t[0][i + 1][0])
    }

    pub fn t_c(&self) -> [f64; 3] {
        std::array::from_fn(|i| self.t[0][0][i + 1])
    }

    /// `[i][j] = ⟨σ_i^A σ_j^B⟩`.
    pub fn t_ab(&self) -> [[f64; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.t[i + 1][j + 1][0]))
    }

    /// `[i][j] = ⟨σ_i^B σ_j^C⟩`.
    pub fn t_bc(&self) -> [[f64; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.t[0][i + 1][j + 1]))
    }

    /// `[i][j] = ⟨σ_i^C σ_j^A⟩`.
    pub fn t_ca(&self) -> [[f64; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.t[j + 1][0][i + 1]))
    }

    pub fn t_abc(&self) -> [[[f64; 3]; 3]; 3] {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| std::array::from_fn(|k| self.t[i + 1][j + 1][k + 1]))
        })
    }

    /// `(1/8) Σ t_ijk σ_i ⊗ σ_j ⊗ σ_k`.
    pub fn resynthesize(&self) -> Matrix8 {
        let table = sparse_table();
        let mut m = Matrix8::from_element(ZERO);
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    let p = &table[i][j][k];
                    let c = self.t[i][j][k] / DIM as f64;
                    if c == 0.0 {
                        continue;
                    }
                    for x in 0..DIM {
                        m[(x ^ p.flip, x)] += p.phase[x] * c;
                    }
                }
            }
        }
        m
    }
}

/// Bloch tensors of a (validated) density matrix.
pub fn bloch_decompose(rho: &DensityMatrix) -> BlochTensors {
    BlochTensors::of_matrix(rho.matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{pauli_string, PureState};
    use crate::zoo;

    #[test]
    fn sparse_expectation_matches_dense_trace() {
        let rho = zoo::xi(2, 0.37).unwrap().density();
        let t = bloch_decompose(&rho);
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    let dense = (rho.matrix() * pauli_string(i, j, k)).trace();
                    assert!(dense.im.abs() < 1e-14);
                    assert!((dense.re - t.expectation(i, j, k)).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn maximally_mixed_has_zero_tensors() {
        let t = bloch_decompose(&DensityMatrix::maximally_mixed());
        assert!((t.expectation(0, 0, 0) - 1.0).abs() < 1e-15);
        let nontrivial: f64 = t
            .raw()
            .iter()
            .flatten()
            .flatten()
            .map(|v| v.abs())
            .sum::<f64>()
            - 1.0;
        assert!(nontrivial.abs() < 1e-15);
    }

    #[test]
    fn ghz_tensor_pattern() {
        let t = bloch_decompose(&zoo::ghz().density());
        let ab = t.t_ab();
        for (i, row) in ab.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let expect = if i == 2 && j == 2 { 1.0 } else { 0.0 };
                assert!((v - expect).abs() < 1e-14);
            }
        }
        assert!((t.t_abc()[0][0][0] - 1.0).abs() < 1e-14);
        // XYY, YXY, YYX carry −1
        assert!((t.t_abc()[0][1][1] + 1.0).abs() < 1e-14);
        assert!(t.t_a().iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn all_zero_product_state() {
        let t = bloch_decompose(&PureState::basis(0).density());
        for v in [t.t_a(), t.t_b(), t.t_c()] {
            assert_eq!(v, [0.0, 0.0, 1.0]);
        }
        for m in [t.t_ab(), t.t_bc(), t.t_ca()] {
            for (i, row) in m.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    assert_eq!(*v, if i == 2 && j == 2 { 1.0 } else { 0.0 });
                }
            }
        }
    }

    #[test]
    fn resynthesis_reproduces_state() {
        let rho = zoo::bisep_mixture_counterexample();
        let back = bloch_decompose(&rho).resynthesize();
        assert!((back - rho.matrix()).camax() < 1e-14);
    }

    #[test]
    fn ca_tensor_is_c_major() {
        // |0⟩_A (|0⟩+|1⟩)/√2 ... only C carries X: ⟨X^C Z^A⟩ = 1
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = PureState::from_real([s, s, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let t = bloch_decompose(&psi.density());
        assert!((t.t_ca()[0][2] - 1.0).abs() < 1e-14);
        assert!(t.t_ca()[2][0].abs() < 1e-14);
    }
}
