//! Sector-length coordinates and the purity identities tying them together.

use serde::{Deserialize, Serialize};

use crate::bloch::{bloch_decompose, BlochTensors};
use crate::quantum::{partial_trace, DensityMatrix, QubitLabel};

/// The seven local-unitary invariants of a three-qubit state.
///
/// `s1x = Σᵢ ⟨σᵢ^X⟩²`, `s2xy = Σᵢⱼ ⟨σᵢ^X σⱼ^Y⟩²`, `s3 = Σᵢⱼₖ ⟨σᵢσⱼσₖ⟩²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorCoordinates {
    pub s1a: f64,
    pub s1b: f64,
    pub s1c: f64,
    pub s2ab: f64,
    pub s2bc: f64,
    pub s2ca: f64,
    pub s3: f64,
}

fn sq(v: f64) -> f64 {
    v * v
}

impl SectorCoordinates {
    pub fn from_tensors(t: &BlochTensors) -> Self {
        let raw = t.raw();
        let mut c = SectorCoordinates {
            s1a: 0.0,
            s1b: 0.0,
            s1c: 0.0,
            s2ab: 0.0,
            s2bc: 0.0,
            s2ca: 0.0,
            s3: 0.0,
        };
        for i in 1..4 {
            c.s1a += sq(raw[i][0][0]);
            c.s1b += sq(raw[0][i][0]);
            c.s1c += sq(raw[0][0][i]);
            for j in 1..4 {
                c.s2ab += sq(raw[i][j][0]);
                c.s2bc += sq(raw[0][i][j]);
                c.s2ca += sq(raw[i][0][j]);
                for k in 1..4 {
                    c.s3 += sq(raw[i][j][k]);
                }
            }
        }
        c
    }

    /// Coordinates with only two-body parts set; the one- and three-body
    /// entries are zero.
    pub fn two_body_only(s2ab: f64, s2bc: f64, s2ca: f64) -> Self {
        SectorCoordinates {
            s1a: 0.0,
            s1b: 0.0,
            s1c: 0.0,
            s2ab,
            s2bc,
            s2ca,
            s3: 0.0,
        }
    }

    pub fn s1_total(&self) -> f64 {
        self.s1a + self.s1b + self.s1c
    }

    pub fn s2_total(&self) -> f64 {
        self.s2ab + self.s2bc + self.s2ca
    }

    /// `Δ = 3 − S₃`.
    pub fn delta(&self) -> f64 {
        3.0 - self.s3
    }

    pub fn s1(&self, q: QubitLabel) -> f64 {
        match q {
            QubitLabel::A => self.s1a,
            QubitLabel::B => self.s1b,
            QubitLabel::C => self.s1c,
        }
    }

    /// Two-body sector length of an unordered pair. Panics if `x == y`.
    pub fn s2(&self, x: QubitLabel, y: QubitLabel) -> f64 {
        use QubitLabel::*;
        match (x, y) {
            (A, B) | (B, A) => self.s2ab,
            (B, C) | (C, B) => self.s2bc,
            (C, A) | (A, C) => self.s2ca,
            _ => panic!("two-body sector needs two distinct qubits, got {x}{y}"),
        }
    }

    /// `(S₂ᴬᴮ, S₂ᴮᶜ, S₂ᶜᴬ)`.
    pub fn two_body(&self) -> [f64; 3] {
        [self.s2ab, self.s2bc, self.s2ca]
    }

    /// Coordinates after relabeling qubits `x ↔ y`.
    pub fn relabeled(&self, x: QubitLabel, y: QubitLabel) -> Self {
        let map = |q: QubitLabel| {
            if q == x {
                y
            } else if q == y {
                x
            } else {
                q
            }
        };
        use QubitLabel::*;
        SectorCoordinates {
            s1a: self.s1(map(A)),
            s1b: self.s1(map(B)),
            s1c: self.s1(map(C)),
            s2ab: self.s2(map(A), map(B)),
            s2bc: self.s2(map(B), map(C)),
            s2ca: self.s2(map(C), map(A)),
            s3: self.s3,
        }
    }

    /// Coordinates of `w ρ + (1−w) 𝟙/8`: every Bloch entry scales by `w`.
    pub fn with_white_noise(&self, w: f64) -> Self {
        let f = w * w;
        SectorCoordinates {
            s1a: self.s1a * f,
            s1b: self.s1b * f,
            s1c: self.s1c * f,
            s2ab: self.s2ab * f,
            s2bc: self.s2bc * f,
            s2ca: self.s2ca * f,
            s3: self.s3 * f,
        }
    }

    pub fn as_array(&self) -> [f64; 7] {
        [
            self.s1a, self.s1b, self.s1c, self.s2ab, self.s2bc, self.s2ca, self.s3,
        ]
    }
}

pub fn sector_coordinates(rho: &DensityMatrix) -> SectorCoordinates {
    SectorCoordinates::from_tensors(&bloch_decompose(rho))
}

/// Total and marginal purities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Purities {
    pub total: f64,
    pub ab: f64,
    pub bc: f64,
    pub ca: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Purities {
    pub fn max_abs_difference(&self, other: &Purities) -> f64 {
        [
            self.total - other.total,
            self.ab - other.ab,
            self.bc - other.bc,
            self.ca - other.ca,
            self.a - other.a,
            self.b - other.b,
            self.c - other.c,
        ]
        .iter()
        .fold(0.0, |m, d| m.max(d.abs()))
    }
}

/// Purities from sector lengths:
/// `tr ρ² = (1+S₁+S₂+S₃)/8`, `tr ρ_XY² = (1+S₁ˣ+S₁ʸ+S₂ˣʸ)/4`, `tr ρ_X² = (1+S₁ˣ)/2`.
pub fn purity_from_sectors(c: &SectorCoordinates) -> Purities {
    Purities {
        total: (1.0 + c.s1_total() + c.s2_total() + c.s3) / 8.0,
        ab: (1.0 + c.s1a + c.s1b + c.s2ab) / 4.0,
        bc: (1.0 + c.s1b + c.s1c + c.s2bc) / 4.0,
        ca: (1.0 + c.s1c + c.s1a + c.s2ca) / 4.0,
        a: (1.0 + c.s1a) / 2.0,
        b: (1.0 + c.s1b) / 2.0,
        c: (1.0 + c.s1c) / 2.0,
    }
}

/// Purities computed from the matrix and its partial traces.
pub fn direct_purities(rho: &DensityMatrix) -> Purities {
    use QubitLabel::*;
    let p = |keep: &[QubitLabel]| -> f64 {
        partial_trace(rho, keep)
            .expect("strict subsets are valid")
            .iter()
            .map(|z| z.norm_sqr())
            .sum()
    };
    Purities {
        total: rho.purity(),
        ab: p(&[A, B]),
        bc: p(&[B, C]),
        ca: p(&[C, A]),
        a: p(&[A]),
        b: p(&[B]),
        c: p(&[C]),
    }
}

/// Deviations from the identities every pure state satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PureResiduals {
    /// `|S₂ − 3|`
    pub s2_sum: f64,
    /// `|S₁ + S₃ − 4|`
    pub s1_s3_sum: f64,
    /// `max_X |S₁ˣ − 1 − S₂ʸᶻ/3 + S₃/3|`
    pub single_body: f64,
}

impl PureResiduals {
    pub fn max(&self) -> f64 {
        self.s2_sum.max(self.s1_s3_sum).max(self.single_body)
    }
}

pub fn pure_state_relations(c: &SectorCoordinates) -> PureResiduals {
    let single_body = QubitLabel::ALL
        .iter()
        .map(|&x| {
            let (y, z) = x.cyclic_rest();
            (c.s1(x) - 1.0 - c.s2(y, z) / 3.0 + c.s3 / 3.0).abs()
        })
        .fold(0.0, f64::max);
    PureResiduals {
        s2_sum: (c.s2_total() - 3.0).abs(),
        s1_s3_sum: (c.s1_total() + c.s3 - 4.0).abs(),
        single_body,
    }
}

/// Slacks `1 − (√S₁ˣ + √S₁ʸ − √S₁ᶻ)` for Z = C, B, A (the negative term).
/// Nonnegative for every pure state.
pub fn single_body_pure_slacks(c: &SectorCoordinates) -> [f64; 3] {
    let r = |v: f64| v.max(0.0).sqrt();
    let (a, b, cc) = (r(c.s1a), r(c.s1b), r(c.s1c));
    [1.0 - (a + b - cc), 1.0 - (a - b + cc), 1.0 - (-a + b + cc)]
}

/// `1 − S₁ + S₂ − S₃`, nonnegative for every three-qubit state.
pub fn rank_bound_expression(c: &SectorCoordinates) -> f64 {
    1.0 - c.s1_total() + c.s2_total() - c.s3
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;

    const EXACT: f64 = 1e-12;

    #[test]
    fn maximally_mixed_at_origin() {
        let c = sector_coordinates(&DensityMatrix::maximally_mixed());
        assert!(c.as_array().iter().all(|v| v.abs() < EXACT));
    }

    #[test]
    fn ghz_and_w_coordinates() {
        let g = sector_coordinates(&zoo::ghz().density());
        for (v, e) in g.two_body().iter().zip([1.0, 1.0, 1.0]) {
            assert!((v - e).abs() < EXACT);
        }
        assert!((g.s3 - 4.0).abs() < EXACT);

        let w = sector_coordinates(&zoo::w().density());
        for v in w.two_body() {
            assert!((v - 1.0).abs() < EXACT);
        }
        assert!((w.s3 - 11.0 / 3.0).abs() < EXACT);
    }

    #[test]
    fn bell_times_identity_is_three_zero_zero() {
        let c = sector_coordinates(&zoo::bell_ab_maximally_mixed_c());
        for (v, e) in c.two_body().iter().zip([3.0, 0.0, 0.0]) {
            assert!((v - e).abs() < EXACT);
        }
    }

    #[test]
    fn purities_of_reference_states() {
        let g = purity_from_sectors(&sector_coordinates(&zoo::ghz().density()));
        assert!((g.total - 1.0).abs() < EXACT);

        let m = purity_from_sectors(&sector_coordinates(&DensityMatrix::maximally_mixed()));
        assert!((m.total - 0.125).abs() < EXACT);
        for v in [m.ab, m.bc, m.ca] {
            assert!((v - 0.25).abs() < EXACT);
        }
        for v in [m.a, m.b, m.c] {
            assert!((v - 0.5).abs() < EXACT);
        }
    }

    #[test]
    fn eta_purity_matches_direct_trace() {
        let eta = zoo::eta();
        let direct = eta.purity();
        assert!((direct - 0.25).abs() < EXACT);
        let from_sectors = purity_from_sectors(&sector_coordinates(&eta)).total;
        assert!((from_sectors - direct).abs() < EXACT);
    }

    #[test]
    fn residuals_flag_non_purity() {
        let g = pure_state_relations(&sector_coordinates(&zoo::ghz().density()));
        assert!(g.max() < EXACT);
        let m = pure_state_relations(&sector_coordinates(&DensityMatrix::maximally_mixed()));
        assert!((m.s2_sum - 3.0).abs() < EXACT);
    }

    #[test]
    fn relabeling_swaps_the_right_entries() {
        let c = SectorCoordinates {
            s1a: 0.1,
            s1b: 0.2,
            s1c: 0.3,
            s2ab: 1.0,
            s2bc: 2.0,
            s2ca: 3.0,
            s3: 0.5,
        };
        let r = c.relabeled(QubitLabel::B, QubitLabel::C);
        assert_eq!((r.s1a, r.s1b, r.s1c), (0.1, 0.3, 0.2));
        assert_eq!((r.s2ab, r.s2bc, r.s2ca), (3.0, 2.0, 1.0));
    }
}
