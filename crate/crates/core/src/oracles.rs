//! Independent numerical checks of the identities behind the separability
//! bounds.

use serde::Serialize;

use crate::bloch::{bloch_decompose, BlochTensors};
use crate::error::{Error, Result};
use crate::invariants::{direct_purities, sector_coordinates};
use crate::quantum::{
    hermitian_eigenvalues, local_operator, partial_trace, partial_transpose, pauli, pauli_string,
    DensityMatrix, Matrix8, PureState, QubitLabel, C64, DIM,
};
use crate::zoo;

/// Two-body correlation matrices of a pure state, `[a][b] = ⟨σ_a σ_b⟩` for
/// the pairs AB, CA (C first) and BC.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossTermRecord {
    pub alpha_ab: [[f64; 3]; 3],
    pub alpha_ca: [[f64; 3]; 3],
    pub alpha_bc: [[f64; 3]; 3],
}

impl CrossTermRecord {
    pub fn of(t: &BlochTensors) -> Self {
        Self {
            alpha_ab: t.t_ab(),
            alpha_ca: t.t_ca(),
            alpha_bc: t.t_bc(),
        }
    }

    /// `Σ_ab 3α^AB_ab β^AB_ab − α^CA_ab β^CA_ab + α^BC_ab β^BC_ab`.
    pub fn contract(&self, other: &CrossTermRecord) -> f64 {
        let dot = |x: &[[f64; 3]; 3], y: &[[f64; 3]; 3]| -> f64 {
            x.iter()
                .flatten()
                .zip(y.iter().flatten())
                .map(|(a, b)| a * b)
                .sum()
        };
        3.0 * dot(&self.alpha_ab, &other.alpha_ab) - dot(&self.alpha_ca, &other.alpha_ca)
            + dot(&self.alpha_bc, &other.alpha_bc)
    }

    /// `M = Σ_ab 3α^AB_ab σ_a^A σ_b^B − α^CA_ab σ_a^C σ_b^A + α^BC_ab σ_a^B σ_b^C`.
    pub fn operator(&self) -> Matrix8 {
        let mut m = Matrix8::zeros();
        for a in 1..4 {
            for b in 1..4 {
                let (i, j) = (a - 1, b - 1);
                m += pauli_string(a, b, 0) * C64::new(3.0 * self.alpha_ab[i][j], 0.0);
                m -= pauli_string(b, 0, a) * C64::new(self.alpha_ca[i][j], 0.0);
                m += pauli_string(0, a, b) * C64::new(self.alpha_bc[i][j], 0.0);
            }
        }
        m
    }
}

/// Marginal purity of qubit A above which a pure state counts as product
/// across A|BC.
pub const BISEP_PURITY: f64 = 1.0 - 1e-9;

fn require_a_bc_product(psi: &PureState, name: &str) -> Result<()> {
    let marginal = partial_trace(&psi.density(), &[QubitLabel::A])?;
    let purity: f64 = marginal.iter().map(|z| z.norm_sqr()).sum();
    if purity < BISEP_PURITY {
        return Err(Error::Precondition(format!(
            "{name} is not product across A|BC (marginal purity {purity})"
        )));
    }
    Ok(())
}

/// Cross term `g_ij` of two pure states that are product across A|BC.
pub fn g_cross_term(psi_i: &PureState, psi_j: &PureState) -> Result<f64> {
    require_a_bc_product(psi_i, "first state")?;
    require_a_bc_product(psi_j, "second state")?;
    let ri = CrossTermRecord::of(&bloch_decompose(&psi_i.density()));
    let rj = CrossTermRecord::of(&bloch_decompose(&psi_j.density()));
    Ok(ri.contract(&rj))
}

/// `⟨ψ_j| M_i |ψ_j⟩`, the operator form of [`g_cross_term`].
pub fn g_cross_term_operator(psi_i: &PureState, psi_j: &PureState) -> f64 {
    let m = CrossTermRecord::of(&bloch_decompose(&psi_i.density())).operator();
    (m * psi_j.density().matrix()).trace().re
}

/// `M_i` for `|ψ_i⟩ = |0⟩ ⊗ (cos θ|00⟩ + sin θ|11⟩)`.
pub fn m_operator(theta: f64) -> Matrix8 {
    let psi = zoo::bisep_pure(QubitLabel::A, theta);
    CrossTermRecord::of(&bloch_decompose(&psi.density())).operator()
}

pub fn m_operator_max_eigenvalue(theta: f64) -> f64 {
    hermitian_eigenvalues(&m_operator(theta))[DIM - 1]
}

/// Traces against the two σ_y-conjugated partial transposes and the
/// matching sector-length expressions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PptTraces {
    /// `tr(ρ ρ₁)` and `tr(ρ ρ₂)` with `ρ₁ = σ_y^A ρ^{T_A} σ_y^A` and
    /// `ρ₂ = σ_y^B σ_y^C ρ^{T_BC} σ_y^B σ_y^C`.
    pub operator: [f64; 2],
    /// `1 − S₁ᴬ + S₁ᴮ + S₁ᶜ − S₂ᴬᴮ − S₂ᶜᴬ + S₂ᴮᶜ − S₃` and
    /// `1 + S₁ᴬ − S₁ᴮ − S₁ᶜ − S₂ᴬᴮ − S₂ᶜᴬ + S₂ᴮᶜ + S₃`.
    pub sector: [f64; 2],
}

/// `tr(ρ ρ_k) = sector_k / 8`.
pub const PPT_NORMALIZATION: f64 = 8.0;

impl PptTraces {
    pub fn identity_defect(&self) -> f64 {
        (0..2)
            .map(|k| (PPT_NORMALIZATION * self.operator[k] - self.sector[k]).abs())
            .fold(0.0, f64::max)
    }
}

pub fn ppt_trace_expressions(rho: &DensityMatrix) -> PptTraces {
    let id = pauli(0);
    let y = pauli(2);
    let ya = local_operator(&y, &id, &id);
    let ybc = local_operator(&id, &y, &y);
    let pt_a = partial_transpose(rho, &[QubitLabel::A]).expect("A is a strict subset");
    let pt_bc =
        partial_transpose(rho, &[QubitLabel::B, QubitLabel::C]).expect("BC is a strict subset");
    let rho1 = ya * pt_a * ya;
    let rho2 = ybc * pt_bc * ybc;
    let m = rho.matrix();
    let c = sector_coordinates(rho);
    let two = -c.s2ab - c.s2ca + c.s2bc;
    PptTraces {
        operator: [(m * rho1).trace().re, (m * rho2).trace().re],
        sector: [
            1.0 - c.s1a + c.s1b + c.s1c + two - c.s3,
            1.0 + c.s1a - c.s1b - c.s1c + two + c.s3,
        ],
    }
}

/// Slacks of the two A|BC biseparability bounds with mixed coefficients,
/// once from marginal purities and once from sector lengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PurityReformulation {
    /// `tr ρ_CA² + tr ρ_A² + 2 tr ρ_B² − 3 tr ρ_AB² − tr ρ_BC²` and
    /// `tr ρ_AB² + tr ρ_A² + 2 tr ρ_C² − 3 tr ρ_CA² − tr ρ_BC²`.
    pub purity_slacks: [f64; 2],
    /// `3 − (3S₂ᴬᴮ − S₂ᶜᴬ + S₂ᴮᶜ)` and `3 − (−S₂ᴬᴮ + 3S₂ᶜᴬ + S₂ᴮᶜ)`.
    pub sector_slacks: [f64; 2],
}

/// `sector slack = 4 · purity slack`.
pub const PURITY_SCALE: f64 = 4.0;

impl PurityReformulation {
    pub fn residual(&self) -> f64 {
        (0..2)
            .map(|k| (PURITY_SCALE * self.purity_slacks[k] - self.sector_slacks[k]).abs())
            .fold(0.0, f64::max)
    }
}

pub fn purity_reformulation_check(rho: &DensityMatrix) -> PurityReformulation {
    let p = direct_purities(rho);
    let c = sector_coordinates(rho);
    PurityReformulation {
        purity_slacks: [
            p.ca + p.a + 2.0 * p.b - 3.0 * p.ab - p.bc,
            p.ab + p.a + 2.0 * p.c - 3.0 * p.ca - p.bc,
        ],
        sector_slacks: [
            3.0 - (3.0 * c.s2ab - c.s2ca + c.s2bc),
            3.0 - (-c.s2ab + 3.0 * c.s2ca + c.s2bc),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_biseparable_pure, stream};

    #[test]
    fn self_cross_term_is_three() {
        for k in 0..=10 {
            let psi = zoo::bisep_pure(QubitLabel::A, 0.157 * k as f64);
            assert!((g_cross_term(&psi, &psi).unwrap() - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn contraction_matches_operator_form() {
        let a = PureState::basis(0b000);
        let b = PureState::basis(0b011);
        let g = g_cross_term(&a, &b).unwrap();
        assert!((g - g_cross_term_operator(&a, &b)).abs() < 1e-12);
        // only ZZ correlations: 3·(1·−1) − (1·−1) + (1·1)
        assert!((g + 1.0).abs() < 1e-12);

        let mut rng = stream(4, 0);
        for _ in 0..50 {
            let x = random_biseparable_pure(QubitLabel::A, &mut rng);
            let y = random_biseparable_pure(QubitLabel::A, &mut rng);
            let g = g_cross_term(&x, &y).unwrap();
            assert!((g - g_cross_term_operator(&x, &y)).abs() < 1e-12);
            assert!(g <= 3.0 + 1e-9);
        }
    }

    #[test]
    fn entangled_input_rejected() {
        let ghz = zoo::ghz();
        assert!(matches!(
            g_cross_term(&ghz, &PureState::basis(0)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn m_operator_spectrum() {
        assert!((m_operator_max_eigenvalue(0.0) - 3.0).abs() < 1e-9);
        assert!((m_operator_max_eigenvalue(std::f64::consts::FRAC_PI_4) - 3.0).abs() < 1e-9);
        let m = m_operator(0.4);
        assert!((m - m.adjoint()).norm() < 1e-12);
    }

    #[test]
    fn ppt_examples() {
        let mm = ppt_trace_expressions(&DensityMatrix::maximally_mixed());
        for k in 0..2 {
            assert!((mm.sector[k] - 1.0).abs() < 1e-15);
            assert!((mm.operator[k] - 0.125).abs() < 1e-15);
        }
        let g = ppt_trace_expressions(&zoo::ghz().density());
        // S₁ = 0, S₂ˣʸ = 1, S₃ = 4
        assert!((g.sector[0] + 4.0).abs() < 1e-12);
        assert!(g.identity_defect() < 1e-12);
    }

    #[test]
    fn purity_reformulation_examples() {
        let b = purity_reformulation_check(
            &zoo::bisep_pure(QubitLabel::A, std::f64::consts::FRAC_PI_3).density(),
        );
        for k in 0..2 {
            assert!(b.purity_slacks[k].abs() < 1e-12);
            assert!(b.sector_slacks[k].abs() < 1e-12);
        }
        let mm = purity_reformulation_check(&DensityMatrix::maximally_mixed());
        assert!(mm.residual() < 1e-15);
        assert!(mm.sector_slacks.iter().all(|s| (s - 3.0).abs() < 1e-15));
    }
}
