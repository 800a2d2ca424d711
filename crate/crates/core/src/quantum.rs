//! Dense three-qubit state algebra.
//!
//! States live in the 8-dimensional space spanned by `|q_A q_B q_C⟩`, where
//! the basis index is `4·q_A + 2·q_B + q_C`. Every matrix in the crate uses
//! this layout.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, Matrix2, SMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances;

pub type C64 = Complex64;
pub type Matrix8 = SMatrix<C64, 8, 8>;
pub type Matrix2c = Matrix2<C64>;

pub const DIM: usize = 8;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// One of the three qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QubitLabel {
    A,
    B,
    C,
}

impl QubitLabel {
    pub const ALL: [QubitLabel; 3] = [QubitLabel::A, QubitLabel::B, QubitLabel::C];

    pub fn index(self) -> usize {
        match self {
            QubitLabel::A => 0,
            QubitLabel::B => 1,
            QubitLabel::C => 2,
        }
    }

    /// Bit position of this qubit inside a basis index.
    pub fn shift(self) -> usize {
        2 - self.index()
    }

    pub(crate) fn mask(self) -> usize {
        1 << self.shift()
    }

    /// The other two qubits in cyclic order: A → (B, C), B → (C, A), C → (A, B).
    pub fn cyclic_rest(self) -> (QubitLabel, QubitLabel) {
        match self {
            QubitLabel::A => (QubitLabel::B, QubitLabel::C),
            QubitLabel::B => (QubitLabel::C, QubitLabel::A),
            QubitLabel::C => (QubitLabel::A, QubitLabel::B),
        }
    }
}

impl fmt::Display for QubitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            QubitLabel::A => "A",
            QubitLabel::B => "B",
            QubitLabel::C => "C",
        };
        f.write_str(s)
    }
}

impl FromStr for QubitLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(QubitLabel::A),
            "B" | "b" => Ok(QubitLabel::B),
            "C" | "c" => Ok(QubitLabel::C),
            other => Err(Error::Domain(format!("unknown qubit label `{other}`"))),
        }
    }
}

/// Sorted, deduplicated qubit set that must be a nonempty strict subset.
fn strict_subset(labels: &[QubitLabel]) -> Result<Vec<QubitLabel>> {
    let mut set = labels.to_vec();
    set.sort();
    set.dedup();
    if set.is_empty() || set.len() == 3 {
        return Err(Error::Domain(format!(
            "qubit set must be a nonempty strict subset of {{A,B,C}}, got {set:?}"
        )));
    }
    Ok(set)
}

/// Normalized three-qubit ket.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: [C64; DIM],
}

impl PureState {
    /// Accepts amplitudes whose squared norm is within `1e-9` of one and
    /// renormalizes them exactly.
    pub fn new(amps: [C64; DIM]) -> Result<Self> {
        let n2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !n2.is_finite() || (n2 - 1.0).abs() > tolerances::PURE_NORM {
            return Err(Error::InvalidState(format!(
                "squared norm {n2} deviates from 1 by more than {}",
                tolerances::PURE_NORM
            )));
        }
        Ok(Self::scaled(amps, n2))
    }

    pub fn from_real(amps: [f64; DIM]) -> Result<Self> {
        Self::new(amps.map(|a| C64::new(a, 0.0)))
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalize(amps: [C64; DIM]) -> Result<Self> {
        let n2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !(n2.is_finite() && n2 > 1e-300) {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Ok(Self::scaled(amps, n2))
    }

    fn scaled(amps: [C64; DIM], n2: f64) -> Self {
        let s = 1.0 / n2.sqrt();
        Self {
            amps: amps.map(|a| a * s),
        }
    }

    /// Computational basis ket `|index⟩`.
    pub fn basis(index: usize) -> Self {
        assert!(index < DIM, "basis index {index} out of range");
        let mut amps = [ZERO; DIM];
        amps[index] = ONE;
        Self { amps }
    }

    /// `|a⟩_A ⊗ |b⟩_B ⊗ |c⟩_C` from normalized single-qubit kets.
    pub fn product(a: [C64; 2], b: [C64; 2], c: [C64; 2]) -> Result<Self> {
        let mut amps = [ZERO; DIM];
        for (idx, amp) in amps.iter_mut().enumerate() {
            *amp = a[(idx >> 2) & 1] * b[(idx >> 1) & 1] * c[idx & 1];
        }
        Self::new(amps)
    }

    /// `|x⟩_single ⊗ |pair⟩` where `pair` is indexed `2·b + c` over the other
    /// two qubits taken in A, B, C order.
    pub fn bipartite_product(single: QubitLabel, x: [C64; 2], pair: [C64; 4]) -> Result<Self> {
        let rest: Vec<QubitLabel> = QubitLabel::ALL
            .into_iter()
            .filter(|&q| q != single)
            .collect();
        let mut amps = [ZERO; DIM];
        for (idx, amp) in amps.iter_mut().enumerate() {
            let bit = |q: QubitLabel| (idx >> q.shift()) & 1;
            *amp = x[bit(single)] * pair[2 * bit(rest[0]) + bit(rest[1])];
        }
        Self::new(amps)
    }

    pub fn amplitudes(&self) -> &[C64; DIM] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn density(&self) -> DensityMatrix {
        density_from_pure(self)
    }
}

/// `|ψ⟩⟨ψ|`.
pub fn density_from_pure(psi: &PureState) -> DensityMatrix {
    let a = psi.amplitudes();
    let m = Matrix8::from_fn(|i, j| a[i] * a[j].conj());
    DensityMatrix { m }
}

/// Hermitian, unit-trace, positive semidefinite 8×8 matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: Matrix8,
}

/// Outcome of [`validate`]; the defects are reported even when the matrix is valid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationReport {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
    pub valid: bool,
}

/// Checks Hermiticity, trace and positivity against the crate tolerances.
///
/// The minimum eigenvalue is taken from the Hermitian part `(M + M†)/2`.
pub fn validate(m: &Matrix8) -> ValidationReport {
    let mut hermiticity_defect: f64 = 0.0;
    for i in 0..DIM {
        for j in 0..DIM {
            hermiticity_defect = hermiticity_defect.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    let trace_defect = (m.trace() - ONE).norm();
    let min_eigenvalue = hermitian_eigenvalues(&hermitize(m))[0];
    let valid = hermiticity_defect.is_finite()
        && hermiticity_defect < tolerances::HERMITICITY
        && trace_defect <= tolerances::TRACE
        && min_eigenvalue >= tolerances::MIN_EIGENVALUE;
    ValidationReport {
        hermiticity_defect,
        trace_defect,
        min_eigenvalue,
        valid,
    }
}

/// `(M + M†)/2`, for ingesting matrices with small asymmetric noise.
pub fn hermitize(m: &Matrix8) -> Matrix8 {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Ascending eigenvalues of a Hermitian 8×8 matrix (lower triangle is used).
pub fn hermitian_eigenvalues(m: &Matrix8) -> [f64; DIM] {
    let ev = m.symmetric_eigenvalues();
    let mut out = [0.0; DIM];
    for (o, e) in out.iter_mut().zip(ev.iter()) {
        *o = *e;
    }
    out.sort_by(f64::total_cmp);
    out
}

impl DensityMatrix {
    /// Validates and wraps `m`. Never symmetrizes; use [`hermitize`] first
    /// for noisy input.
    pub fn new(m: Matrix8) -> Result<Self> {
        let report = validate(&m);
        if !report.valid {
            return Err(Error::InvalidState(format!(
                "hermiticity defect {:.3e}, trace defect {:.3e}, min eigenvalue {:.3e}",
                report.hermiticity_defect, report.trace_defect, report.min_eigenvalue
            )));
        }
        Ok(Self { m })
    }

    /// Wraps a matrix that is valid by construction (convex mixtures,
    /// unitary conjugation, partial traces of valid states).
    pub(crate) fn from_trusted(m: Matrix8) -> Self {
        debug_assert!(
            validate(&m).valid,
            "trusted construction produced {:?}",
            validate(&m)
        );
        Self { m }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            m: Matrix8::identity() * C64::new(1.0 / DIM as f64, 0.0),
        }
    }

    /// Convex combination `Σ wᵢ ρᵢ`; weights must be nonnegative and sum to one.
    pub fn mixture(terms: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let total: f64 = terms.iter().map(|(w, _)| *w).sum();
        if terms.iter().any(|(w, _)| !(*w >= 0.0)) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "mixture weights must be nonnegative and sum to 1 (sum = {total})"
            )));
        }
        let mut m = Matrix8::zeros();
        for (w, rho) in terms {
            m += rho.m * C64::new(*w, 0.0);
        }
        Ok(Self { m })
    }

    pub fn matrix(&self) -> &Matrix8 {
        &self.m
    }

    pub fn into_matrix(self) -> Matrix8 {
        self.m
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        let mut p = 0.0;
        for i in 0..DIM {
            for j in 0..DIM {
                p += self.m[(i, j)].norm_sqr();
            }
        }
        p
    }

    pub fn eigenvalues(&self) -> [f64; DIM] {
        hermitian_eigenvalues(&self.m)
    }

    pub fn validation(&self) -> ValidationReport {
        validate(&self.m)
    }
}

/// Count of eigenvalues above `1e-10`.
pub fn numeric_rank(rho: &DensityMatrix) -> usize {
    rho.eigenvalues()
        .iter()
        .filter(|&&e| e > tolerances::RANK)
        .count()
}

/// Reduced state on `keep`, ordered with A before B before C (4×4 or 2×2).
pub fn partial_trace(rho: &DensityMatrix, keep: &[QubitLabel]) -> Result<DMatrix<C64>> {
    let keep = strict_subset(keep)?;
    let keep_mask: usize = keep.iter().map(|q| q.mask()).sum();
    let traced_mask = 7 & !keep_mask;
    let reduced_index = |full: usize| -> usize {
        keep.iter()
            .fold(0, |acc, q| (acc << 1) | ((full >> q.shift()) & 1))
    };
    let n = 1 << keep.len();
    let mut out = DMatrix::from_element(n, n, ZERO);
    for i in 0..DIM {
        for j in 0..DIM {
            if i & traced_mask == j & traced_mask {
                out[(reduced_index(i), reduced_index(j))] += rho.m[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Transposes the indices of the qubits in `subsystem`. The result is
/// Hermitian with unit trace but need not be positive.
pub fn partial_transpose(rho: &DensityMatrix, subsystem: &[QubitLabel]) -> Result<Matrix8> {
    let set = strict_subset(subsystem)?;
    let mask: usize = set.iter().map(|q| q.mask()).sum();
    Ok(Matrix8::from_fn(|i, j| {
        let ii = (i & !mask) | (j & mask);
        let jj = (j & !mask) | (i & mask);
        rho.m[(ii, jj)]
    }))
}

fn is_unitary(u: &Matrix2c) -> bool {
    let d = u.adjoint() * u - Matrix2c::identity();
    d.iter().all(|z| z.norm() <= tolerances::UNITARITY)
}

/// `U_A ⊗ U_B ⊗ U_C` as an 8×8 matrix.
pub fn local_operator(ua: &Matrix2c, ub: &Matrix2c, uc: &Matrix2c) -> Matrix8 {
    Matrix8::from_fn(|i, j| {
        ua[((i >> 2) & 1, (j >> 2) & 1)] * ub[((i >> 1) & 1, (j >> 1) & 1)] * uc[(i & 1, j & 1)]
    })
}

/// `(U_A ⊗ U_B ⊗ U_C) ρ (U_A ⊗ U_B ⊗ U_C)†`.
pub fn apply_local_unitary(
    rho: &DensityMatrix,
    ua: &Matrix2c,
    ub: &Matrix2c,
    uc: &Matrix2c,
) -> Result<DensityMatrix> {
    for (label, u) in [("A", ua), ("B", ub), ("C", uc)] {
        if !is_unitary(u) {
            return Err(Error::Domain(format!(
                "local factor on qubit {label} is not unitary"
            )));
        }
    }
    let u = local_operator(ua, ub, uc);
    Ok(DensityMatrix::from_trusted(u * rho.m * u.adjoint()))
}

/// Applies local unitaries to a ket.
pub fn apply_local_unitary_pure(
    psi: &PureState,
    ua: &Matrix2c,
    ub: &Matrix2c,
    uc: &Matrix2c,
) -> PureState {
    let u = local_operator(ua, ub, uc);
    let mut out = [ZERO; DIM];
    for (i, o) in out.iter_mut().enumerate() {
        *o = (0..DIM).map(|j| u[(i, j)] * psi.amps[j]).sum();
    }
    PureState::normalize(out).expect("unitary image of a unit vector is nonzero")
}

fn swap_bits(index: usize, x: QubitLabel, y: QubitLabel) -> usize {
    let bx = (index >> x.shift()) & 1;
    let by = (index >> y.shift()) & 1;
    let cleared = index & !(x.mask() | y.mask());
    cleared | (by << x.shift()) | (bx << y.shift())
}

/// Conjugation by the flip operator exchanging qubits `x` and `y`.
pub fn swap_qubits(rho: &DensityMatrix, x: QubitLabel, y: QubitLabel) -> Result<DensityMatrix> {
    if x == y {
        return Err(Error::Domain(format!("cannot swap qubit {x} with itself")));
    }
    let mut m = Matrix8::zeros();
    for i in 0..DIM {
        for j in 0..DIM {
            m[(swap_bits(i, x, y), swap_bits(j, x, y))] = rho.m[(i, j)];
        }
    }
    Ok(DensityMatrix { m })
}

/// Pauli matrix `σ_i` with `σ₀ = 1`, `σ₁ = X`, `σ₂ = Y`, `σ₃ = Z`.
pub fn pauli(i: usize) -> Matrix2c {
    match i {
        0 => Matrix2c::identity(),
        1 => Matrix2c::new(ZERO, ONE, ONE, ZERO),
        2 => Matrix2c::new(ZERO, -I, I, ZERO),
        3 => Matrix2c::new(ONE, ZERO, ZERO, -ONE),
        _ => panic!("Pauli index {i} out of range 0..=3"),
    }
}

/// `σ_i ⊗ σ_j ⊗ σ_k`.
pub fn pauli_string(i: usize, j: usize, k: usize) -> Matrix8 {
    local_operator(&pauli(i), &pauli(j), &pauli(k))
}

/// `R_z(β) R_y(γ) R_z(δ)` with `R_z(φ) = diag(e^{−iφ/2}, e^{iφ/2})` and
/// `R_y(γ) = exp(−iγσ_y/2)`.
pub fn zyz_unitary(beta: f64, gamma: f64, delta: f64) -> Matrix2c {
    let (c, s) = ((gamma / 2.0).cos(), (gamma / 2.0).sin());
    let sum = (beta + delta) / 2.0;
    let diff = (beta - delta) / 2.0;
    Matrix2c::new(
        C64::from_polar(c, -sum),
        -C64::from_polar(s, -diff),
        C64::from_polar(s, diff),
        C64::from_polar(c, sum),
    )
}

/// Angles `(β, γ, δ)` with `zyz_unitary(β, γ, δ) = e^{iα} u` for some global
/// phase `α`.
pub fn zyz_angles(u: &Matrix2c) -> [f64; 3] {
    let su = u / u.determinant().sqrt();
    let (a, b) = (su[(0, 0)], su[(0, 1)]);
    let gamma = 2.0 * b.norm().atan2(a.norm());
    let sum = if a.norm() > 1e-14 {
        -2.0 * a.arg()
    } else {
        0.0
    };
    let diff = if b.norm() > 1e-14 {
        -2.0 * (-b).arg()
    } else {
        0.0
    };
    [(sum + diff) / 2.0, gamma, (sum - diff) / 2.0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;

    fn ghz() -> DensityMatrix {
        zoo::ghz().density()
    }

    #[test]
    fn basis_projector() {
        let rho = PureState::basis(0).density();
        for i in 0..DIM {
            for j in 0..DIM {
                let expect = if i == 0 && j == 0 { 1.0 } else { 0.0 };
                assert!((rho.matrix()[(i, j)] - C64::new(expect, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn ghz_outer_product_has_four_halves() {
        let rho = ghz();
        let nonzero: Vec<_> = rho.matrix().iter().filter(|z| z.norm() > 1e-12).collect();
        assert_eq!(nonzero.len(), 4);
        assert!(nonzero
            .iter()
            .all(|z| (**z - C64::new(0.5, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn w_purity_is_one() {
        assert!((zoo::w().density().purity() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn unnormalized_amplitudes_rejected() {
        let mut a = [ZERO; DIM];
        a[0] = C64::new(1.0 + 1e-6, 0.0);
        assert!(matches!(PureState::new(a), Err(Error::InvalidState(_))));
    }

    #[test]
    fn validate_reference_states() {
        assert!(validate(DensityMatrix::maximally_mixed().matrix()).valid);
        assert!(validate(ghz().matrix()).valid);
    }

    #[test]
    fn validate_rejects_one_sided_sign_flip() {
        let mut m = *ghz().matrix();
        m[(0, 7)] = -m[(0, 7)];
        let report = validate(&m);
        assert!(!report.valid);
        assert!((report.hermiticity_defect - 1.0).abs() < 1e-12);
    }

    #[test]
    fn validate_reports_negative_eigenvalue() {
        let mut m = *ghz().matrix();
        m[(0, 7)] = C64::new(0.6, 0.0);
        m[(7, 0)] = C64::new(0.6, 0.0);
        let report = validate(&m);
        assert!(!report.valid);
        assert!((report.min_eigenvalue + 0.1).abs() < 1e-12);
        assert!(report.hermiticity_defect < 1e-15);
    }

    #[test]
    fn ghz_marginal_on_ab() {
        let r = partial_trace(&ghz(), &[QubitLabel::A, QubitLabel::B]).unwrap();
        assert_eq!(r.nrows(), 4);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j && (i == 0 || i == 3) {
                    0.5
                } else {
                    0.0
                };
                assert!((r[(i, j)] - C64::new(expect, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn product_marginal_is_maximally_mixed() {
        let zero = [ONE, ZERO];
        let half = DensityMatrix::mixture(&[
            (
                0.25,
                &PureState::product(zero, [ONE, ZERO], [ONE, ZERO])
                    .unwrap()
                    .density(),
            ),
            (
                0.25,
                &PureState::product(zero, [ONE, ZERO], [ZERO, ONE])
                    .unwrap()
                    .density(),
            ),
            (
                0.25,
                &PureState::product(zero, [ZERO, ONE], [ONE, ZERO])
                    .unwrap()
                    .density(),
            ),
            (
                0.25,
                &PureState::product(zero, [ZERO, ONE], [ZERO, ONE])
                    .unwrap()
                    .density(),
            ),
        ])
        .unwrap();
        let r = partial_trace(&half, &[QubitLabel::C, QubitLabel::B]).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 0.25 } else { 0.0 };
                assert!((r[(i, j)] - C64::new(expect, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn xi1_at_zero_marginal_is_bell_projector() {
        let rho = zoo::xi(1, 0.0).unwrap().density();
        let r = partial_trace(&rho, &[QubitLabel::A, QubitLabel::B]).unwrap();
        // Direct contraction over the C index of the 8×8 matrix.
        let m = rho.matrix();
        for i in 0..4 {
            for j in 0..4 {
                let direct = m[(2 * i, 2 * j)] + m[(2 * i + 1, 2 * j + 1)];
                assert!((r[(i, j)] - direct).norm() < 1e-15);
                let bell = if (i == 1 || i == 2) && (j == 1 || j == 2) {
                    0.5
                } else {
                    0.0
                };
                assert!((r[(i, j)] - C64::new(bell, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn partial_trace_rejects_bad_sets() {
        assert!(matches!(partial_trace(&ghz(), &[]), Err(Error::Domain(_))));
        assert!(matches!(
            partial_trace(&ghz(), &QubitLabel::ALL),
            Err(Error::Domain(_))
        ));
        assert!(partial_transpose(&ghz(), &[]).is_err());
    }

    #[test]
    fn two_step_trace_matches_one_step() {
        let rho = zoo::w().density();
        let ab = partial_trace(&rho, &[QubitLabel::A, QubitLabel::B]).unwrap();
        let a_direct = partial_trace(&rho, &[QubitLabel::A]).unwrap();
        // trace B out of the AB marginal
        for i in 0..2 {
            for j in 0..2 {
                let two_step = ab[(2 * i, 2 * j)] + ab[(2 * i + 1, 2 * j + 1)];
                assert!((two_step - a_direct[(i, j)]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn maximally_mixed_partial_transpose_unchanged() {
        let mm = DensityMatrix::maximally_mixed();
        for sub in [vec![QubitLabel::A], vec![QubitLabel::B, QubitLabel::C]] {
            let pt = partial_transpose(&mm, &sub).unwrap();
            assert!((pt - mm.matrix()).norm() < 1e-15);
        }
    }

    #[test]
    fn ghz_partial_transpose_min_eigenvalue() {
        let pt = partial_transpose(&ghz(), &[QubitLabel::A]).unwrap();
        let ev = hermitian_eigenvalues(&pt);
        assert!((ev[0] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn separable_extremal_state_is_ppt() {
        let rho = zoo::fs_extremal(
            zoo::FsVariant::PlusPlusMinus,
            0.5,
            std::f64::consts::FRAC_PI_2,
        )
        .unwrap();
        for q in QubitLabel::ALL {
            let pt = partial_transpose(&rho, &[q]).unwrap();
            assert!(hermitian_eigenvalues(&pt)[0] >= -1e-10);
        }
    }

    #[test]
    fn rank_of_reference_states() {
        assert_eq!(numeric_rank(&ghz()), 1);
        assert_eq!(numeric_rank(&DensityMatrix::maximally_mixed()), 8);
        assert_eq!(numeric_rank(&zoo::eta()), 4);
    }

    #[test]
    fn pauli_x_on_a_flips_first_qubit() {
        let rho = PureState::basis(0).density();
        let out = apply_local_unitary(&rho, &pauli(1), &pauli(0), &pauli(0)).unwrap();
        assert!((out.matrix() - PureState::basis(4).density().matrix()).norm() < 1e-15);
    }

    #[test]
    fn identities_leave_state_unchanged() {
        let rho = zoo::w().density();
        let id = Matrix2c::identity();
        let out = apply_local_unitary(&rho, &id, &id, &id).unwrap();
        assert_eq!(out, rho);
    }

    #[test]
    fn non_unitary_factor_rejected() {
        let rho = ghz();
        let bad = Matrix2c::new(ONE, ONE, ZERO, ONE);
        let id = Matrix2c::identity();
        assert!(matches!(
            apply_local_unitary(&rho, &id, &bad, &id),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn swap_examples() {
        let w = zoo::w().density();
        let swapped = swap_qubits(&w, QubitLabel::A, QubitLabel::B).unwrap();
        assert!((swapped.matrix() - w.matrix()).norm() < 1e-12);

        let one = PureState::basis(0b001).density();
        let out = swap_qubits(&one, QubitLabel::A, QubitLabel::C).unwrap();
        assert!((out.matrix() - PureState::basis(0b100).density().matrix()).norm() < 1e-15);

        assert!(matches!(
            swap_qubits(&w, QubitLabel::B, QubitLabel::B),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn qubit_label_roundtrip() {
        for q in QubitLabel::ALL {
            assert_eq!(q.to_string().parse::<QubitLabel>().unwrap(), q);
        }
        assert!("D".parse::<QubitLabel>().is_err());
    }

    #[test]
    fn zyz_round_trip() {
        let mut rng = crate::random::stream(21, 0);
        for _ in 0..50 {
            let phase = C64::from_polar(1.0, 0.7);
            let u = crate::random::random_local_unitary(&mut rng) * phase;
            let [b, g, d] = zyz_angles(&u);
            let v = zyz_unitary(b, g, d);
            // equal up to a global phase
            let overlap = (v.adjoint() * u).trace().norm() / 2.0;
            assert!((overlap - 1.0).abs() < 1e-12);
        }
        let z = pauli(3);
        let v = zyz_unitary(zyz_angles(&z)[0], zyz_angles(&z)[1], zyz_angles(&z)[2]);
        assert!(((v.adjoint() * z).trace().norm() / 2.0 - 1.0).abs() < 1e-12);
    }
}
