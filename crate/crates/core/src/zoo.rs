//! Named states and parametric families.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantum::{DensityMatrix, Matrix8, PureState, QubitLabel, C64, DIM, ONE, ZERO};

/// Slack allowed when a parameter sits on the closed end of its range.
const RANGE_SLACK: f64 = 1e-12;

fn ket(entries: &[(usize, f64)]) -> [C64; DIM] {
    let mut a = [ZERO; DIM];
    for &(idx, v) in entries {
        a[idx] = C64::new(v, 0.0);
    }
    a
}

fn check_range(name: &str, v: f64, lo: f64, hi: f64) -> Result<f64> {
    if !(v >= lo - RANGE_SLACK && v <= hi + RANGE_SLACK) {
        return Err(Error::Domain(format!("{name} = {v} outside [{lo}, {hi}]")));
    }
    Ok(v.clamp(lo, hi))
}

/// `(|000⟩ + |111⟩)/√2`.
pub fn ghz() -> PureState {
    generalized_ghz(0.5).expect("p = 1/2 is in range")
}

/// `(|001⟩ + |010⟩ + |100⟩)/√3`.
pub fn w() -> PureState {
    generalized_w(1.0 / 3.0, 1.0 / 3.0).expect("q = r = 1/3 is in range")
}

/// `√p|000⟩ + √(1−p)|111⟩`, `p ∈ [0, 1]`.
pub fn generalized_ghz(p: f64) -> Result<PureState> {
    let p = check_range("p", p, 0.0, 1.0)?;
    PureState::new(ket(&[(0b000, p.sqrt()), (0b111, (1.0 - p).sqrt())]))
}

/// `√q|001⟩ + √r|010⟩ + √(1−q−r)|100⟩`, with `q, r ≥ 0` and `q + r ≤ 1`.
pub fn generalized_w(q: f64, r: f64) -> Result<PureState> {
    let (q, r) = w_params(q, r)?;
    PureState::new(ket(&[
        (0b001, q.sqrt()),
        (0b010, r.sqrt()),
        (0b100, (1.0 - q - r).max(0.0).sqrt()),
    ]))
}

pub(crate) fn w_params(q: f64, r: f64) -> Result<(f64, f64)> {
    let q = check_range("q", q, 0.0, 1.0)?;
    let r = check_range("r", r, 0.0, 1.0)?;
    if q + r > 1.0 + RANGE_SLACK {
        return Err(Error::Domain(format!("q + r = {} exceeds 1", q + r)));
    }
    Ok((q, r))
}

/// Bell state `(|00⟩+|11⟩)/√2` on AB with C maximally mixed.
pub fn bell_ab_maximally_mixed_c() -> DensityMatrix {
    let h = 0.5 * 0.5;
    let mut m = Matrix8::zeros();
    for c in 0..2 {
        for (i, j) in [
            (0b000, 0b000),
            (0b000, 0b110),
            (0b110, 0b000),
            (0b110, 0b110),
        ] {
            m[(i | c, j | c)] = C64::new(h, 0.0);
        }
    }
    DensityMatrix::from_trusted(m)
}

fn f_pm(p: f64) -> (f64, f64) {
    let root = (2.0 - 3.0 * p * p).max(0.0).sqrt();
    ((root + p) / 2.0, (root - p) / 2.0)
}

/// W-class states saturating the `k`-th pure-state two-body bound:
///
/// * `k = 1`: `p|001⟩ + f⁺|010⟩ + f⁻|100⟩`
/// * `k = 2`: `p|010⟩ + f⁺|100⟩ + f⁻|001⟩`
/// * `k = 3`: `p|100⟩ + f⁺|001⟩ + f⁻|010⟩`
///
/// with `f^± = (√(2−3p²) ± p)/2` and `p ∈ [0, 1/√2]`.
pub fn xi(k: u8, p: f64) -> Result<PureState> {
    let p = check_range("p", p, 0.0, FRAC_1_SQRT_2)?;
    let (fp, fm) = f_pm(p);
    let idx = match k {
        1 => [0b001, 0b010, 0b100],
        2 => [0b010, 0b100, 0b001],
        3 => [0b100, 0b001, 0b010],
        _ => {
            return Err(Error::Domain(format!(
                "family index k = {k} must be 1, 2 or 3"
            )))
        }
    };
    PureState::new(ket(&[(idx[0], p), (idx[1], fp), (idx[2], fm)]))
}

/// `q|ξₖ(p)⟩⟨ξₖ(p)| + (1−q)|ξₖ(1−p)⟩⟨ξₖ(1−p)|`; needs both `p` and `1 − p`
/// in `[0, 1/√2]`.
pub fn kappa(k: u8, p: f64, q: f64) -> Result<DensityMatrix> {
    let q = check_range("q", q, 0.0, 1.0)?;
    let a = xi(k, p)?.density();
    let b = xi(k, 1.0 - p)?.density();
    DensityMatrix::mixture(&[(q, &a), (1.0 - q, &b)])
}

/// `|0⟩_X ⊗ (cos θ|00⟩ + sin θ|11⟩)` on the other two qubits.
pub fn bisep_pure(single: QubitLabel, theta: f64) -> PureState {
    let (c, s) = (theta.cos(), theta.sin());
    let pair_mask = 7 & !single.mask();
    PureState::new(ket(&[(0, c), (pair_mask, s)])).expect("cos² + sin² = 1")
}

/// Boundary family of the three-dimensional pure-state region:
/// `√((x−y)/2)|001⟩ + √((1+y)/2)|010⟩ + √((1−x)/2)|100⟩` on `−1 < y ≤ x < 1`.
pub fn xi_boundary_3d(x: f64, y: f64) -> Result<PureState> {
    if !(y > -1.0 && y <= x && x < 1.0) {
        return Err(Error::Domain(format!(
            "(x, y) = ({x}, {y}) outside −1 < y ≤ x < 1"
        )));
    }
    PureState::new(ket(&[
        (0b001, ((x - y) / 2.0).sqrt()),
        (0b010, ((1.0 + y) / 2.0).sqrt()),
        (0b100, ((1.0 - x) / 2.0).sqrt()),
    ]))
}

/// Which qubit carries `|θ⟩` in [`fs_extremal`]; the name gives the signs
/// of `(S₂ᴬᴮ, S₂ᴮᶜ, S₂ᶜᴬ)` in the tight linear bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FsVariant {
    /// `|01θ⟩`
    PlusPlusMinus,
    /// `|0θ1⟩`
    PlusMinusPlus,
    /// `|θ01⟩`
    MinusPlusPlus,
}

impl FsVariant {
    pub const ALL: [FsVariant; 3] = [
        FsVariant::PlusPlusMinus,
        FsVariant::PlusMinusPlus,
        FsVariant::MinusPlusPlus,
    ];
}

/// `p|000⟩⟨000| + (1−p)|v⟩⟨v|` with `|v⟩` per [`FsVariant`] and
/// `|θ⟩ = cos θ|0⟩ + sin θ|1⟩`.
pub fn fs_extremal(variant: FsVariant, p: f64, theta: f64) -> Result<DensityMatrix> {
    let p = check_range("p", p, 0.0, 1.0)?;
    let zero = [ONE, ZERO];
    let one = [ZERO, ONE];
    let th = [C64::new(theta.cos(), 0.0), C64::new(theta.sin(), 0.0)];
    let v = match variant {
        FsVariant::PlusPlusMinus => PureState::product(zero, one, th),
        FsVariant::PlusMinusPlus => PureState::product(zero, th, one),
        FsVariant::MinusPlusPlus => PureState::product(th, zero, one),
    }?;
    DensityMatrix::mixture(&[(p, &PureState::basis(0).density()), (1.0 - p, &v.density())])
}

/// `g|G(p)⟩⟨G(p)| + w|W(q,r)⟩⟨W(q,r)| + (1−g−w)𝟙/8`.
pub fn noisy_gw(g: f64, w: f64, p: f64, q: f64, r: f64) -> Result<DensityMatrix> {
    let g = check_range("g", g, 0.0, 1.0)?;
    let w = check_range("w", w, 0.0, 1.0)?;
    if g + w > 1.0 + RANGE_SLACK {
        return Err(Error::Domain(format!("g + w = {} exceeds 1", g + w)));
    }
    let rest = (1.0 - g - w).max(0.0);
    let gs = generalized_ghz(p)?.density();
    let ws = generalized_w(q, r)?.density();
    DensityMatrix::mixture(&[
        (g, &gs),
        (w, &ws),
        (rest, &DensityMatrix::maximally_mixed()),
    ])
}

/// `(|000⟩⟨000| + |100⟩⟨100| + |101⟩⟨101| + |110⟩⟨110|)/4`: rank 4 with no
/// two-body correlations.
pub fn eta() -> DensityMatrix {
    let mut m = Matrix8::zeros();
    for idx in [0b000, 0b100, 0b101, 0b110] {
        m[(idx, idx)] = C64::new(0.25, 0.0);
    }
    DensityMatrix::from_trusted(m)
}

/// Acín canonical form
/// `λ₀|000⟩ + λ₁e^{iφ}|100⟩ + λ₂|101⟩ + λ₃|110⟩ + λ₄|111⟩`.
pub fn acin_pure(lambdas: [f64; 5], phi: f64) -> Result<PureState> {
    if lambdas.iter().any(|l| !(*l >= 0.0)) {
        return Err(Error::Domain(format!(
            "Acín coefficients must be nonnegative: {lambdas:?}"
        )));
    }
    let n2: f64 = lambdas.iter().map(|l| l * l).sum();
    if (n2 - 1.0).abs() > crate::tolerances::PURE_NORM {
        return Err(Error::Domain(format!("Σλ² = {n2} differs from 1")));
    }
    Ok(acin_unchecked(lambdas, phi))
}

fn acin_unchecked(lambdas: [f64; 5], phi: f64) -> PureState {
    let mut a = [ZERO; DIM];
    a[0b000] = C64::new(lambdas[0], 0.0);
    a[0b100] = C64::from_polar(lambdas[1], phi);
    a[0b101] = C64::new(lambdas[2], 0.0);
    a[0b110] = C64::new(lambdas[3], 0.0);
    a[0b111] = C64::new(lambdas[4], 0.0);
    PureState::normalize(a).expect("caller provides a nonzero vector")
}

/// Raw parameter count of [`rank2_general`].
pub const RANK2_PARAMS: usize = 22;

/// `p|ψ(λ, φ)⟩⟨ψ| + (1−p)|Ψ(a, φ⃗)⟩⟨Ψ|`, a total map from unconstrained
/// parameters.
///
/// Layout: `λ₀..λ₄` (0..5), `φ` (5), `a₀..a₇` (6..14), `φ₁..φ₇` (14..21),
/// `p` (21). The `λ` and `a` blocks are taken in absolute value and divided
/// by their norm (an all-zero block maps to `|000⟩`); `p` is clamped to
/// `[0, 1]`.
pub fn rank2_general(params: &[f64; RANK2_PARAMS]) -> DensityMatrix {
    let mut lambdas = [0.0; 5];
    for (l, v) in lambdas.iter_mut().zip(&params[0..5]) {
        *l = v.abs();
    }
    if lambdas.iter().all(|l| *l == 0.0) {
        lambdas[0] = 1.0;
    }
    let psi = acin_unchecked(lambdas, params[5]);

    let mut amps = [ZERO; DIM];
    amps[0] = C64::new(params[6].abs(), 0.0);
    for k in 1..DIM {
        amps[k] = C64::from_polar(params[6 + k].abs(), params[13 + k]);
    }
    let big_psi = PureState::normalize(amps).unwrap_or_else(|_| PureState::basis(0));

    let p = params[21].clamp(0.0, 1.0);
    DensityMatrix::mixture(&[(p, &psi.density()), (1.0 - p, &big_psi.density())])
        .expect("clamped weights")
}

/// `0.65|χ_{A|BC}⟩⟨·| + 0.35|χ_{C|AB}⟩⟨·|` with
/// `|χ_{A|BC}⟩ = √0.97|000⟩ + √0.03|011⟩` and
/// `|χ_{C|AB}⟩ = −0.97|000⟩ − 0.127|100⟩ + √(1 − 0.97² − 0.127²)|110⟩`.
pub fn bisep_mixture_counterexample() -> DensityMatrix {
    let (a, c) = counterexample_components();
    DensityMatrix::mixture(&[(0.65, &a.density()), (0.35, &c.density())]).expect("fixed weights")
}

/// The two pure components of [`bisep_mixture_counterexample`].
pub fn counterexample_components() -> (PureState, PureState) {
    let a = PureState::new(ket(&[(0b000, 0.97f64.sqrt()), (0b011, 0.03f64.sqrt())]))
        .expect("normalized");
    let c = PureState::new(ket(&[
        (0b000, -0.97),
        (0b100, -0.127),
        (0b110, (1.0 - 0.97f64.powi(2) - 0.127f64.powi(2)).sqrt()),
    ]))
    .expect("normalized");
    (a, c)
}

/// A realized family member.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl State {
    pub fn density(&self) -> DensityMatrix {
        match self {
            State::Pure(p) => p.density(),
            State::Mixed(m) => m.clone(),
        }
    }
}

/// State families addressable by a stable string id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Ghz,
    W,
    MaximallyMixed,
    Eta,
    GeneralizedGhz,
    GeneralizedW,
    BellMixed,
    Xi(u8),
    Kappa(u8),
    BisepPure(QubitLabel),
    XiBoundary,
    FsExtremal(FsVariant),
    NoisyGw,
    Acin,
    Rank2,
    BisepMixture,
}

impl Family {
    pub fn all() -> Vec<Family> {
        let mut v = vec![
            Family::Ghz,
            Family::W,
            Family::MaximallyMixed,
            Family::Eta,
            Family::GeneralizedGhz,
            Family::GeneralizedW,
            Family::BellMixed,
        ];
        v.extend((1..=3).map(Family::Xi));
        v.extend((1..=3).map(Family::Kappa));
        v.extend(QubitLabel::ALL.map(Family::BisepPure));
        v.push(Family::XiBoundary);
        v.extend(FsVariant::ALL.map(Family::FsExtremal));
        v.extend([
            Family::NoisyGw,
            Family::Acin,
            Family::Rank2,
            Family::BisepMixture,
        ]);
        v
    }

    pub fn param_names(&self) -> Vec<&'static str> {
        match self {
            Family::Ghz
            | Family::W
            | Family::MaximallyMixed
            | Family::Eta
            | Family::BellMixed
            | Family::BisepMixture => vec![],
            Family::GeneralizedGhz | Family::Xi(_) => vec!["p"],
            Family::GeneralizedW => vec!["q", "r"],
            Family::Kappa(_) => vec!["p", "q"],
            Family::BisepPure(_) => vec!["theta"],
            Family::XiBoundary => vec!["x", "y"],
            Family::FsExtremal(_) => vec!["p", "theta"],
            Family::NoisyGw => vec!["g", "w", "p", "q", "r"],
            Family::Acin => vec!["l0", "l1", "l2", "l3", "l4", "phi"],
            Family::Rank2 => vec![
                "l0", "l1", "l2", "l3", "l4", "phi", "a0", "a1", "a2", "a3", "a4", "a5", "a6",
                "a7", "phi1", "phi2", "phi3", "phi4", "phi5", "phi6", "phi7", "p",
            ],
        }
    }

    pub fn realize(&self, params: &[f64]) -> Result<State> {
        let expected = self.param_names().len();
        if params.len() != expected {
            return Err(Error::Domain(format!(
                "family {self} takes {expected} parameters, got {}",
                params.len()
            )));
        }
        let p = params;
        Ok(match *self {
            Family::Ghz => State::Pure(ghz()),
            Family::W => State::Pure(w()),
            Family::MaximallyMixed => State::Mixed(DensityMatrix::maximally_mixed()),
            Family::Eta => State::Mixed(eta()),
            Family::GeneralizedGhz => State::Pure(generalized_ghz(p[0])?),
            Family::GeneralizedW => State::Pure(generalized_w(p[0], p[1])?),
            Family::BellMixed => State::Mixed(bell_ab_maximally_mixed_c()),
            Family::Xi(k) => State::Pure(xi(k, p[0])?),
            Family::Kappa(k) => State::Mixed(kappa(k, p[0], p[1])?),
            Family::BisepPure(x) => State::Pure(bisep_pure(x, p[0])),
            Family::XiBoundary => State::Pure(xi_boundary_3d(p[0], p[1])?),
            Family::FsExtremal(v) => State::Mixed(fs_extremal(v, p[0], p[1])?),
            Family::NoisyGw => State::Mixed(noisy_gw(p[0], p[1], p[2], p[3], p[4])?),
            Family::Acin => State::Pure(acin_pure([p[0], p[1], p[2], p[3], p[4]], p[5])?),
            Family::Rank2 => {
                let mut raw = [0.0; RANK2_PARAMS];
                raw.copy_from_slice(p);
                State::Mixed(rank2_general(&raw))
            }
            Family::BisepMixture => State::Mixed(bisep_mixture_counterexample()),
        })
    }

    pub fn point(&self, params: &[f64]) -> Result<FamilyPoint> {
        Ok(FamilyPoint {
            family: *self,
            params: params.to_vec(),
            state: self.realize(params)?,
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Ghz => f.write_str("ghz"),
            Family::W => f.write_str("w"),
            Family::MaximallyMixed => f.write_str("mm"),
            Family::Eta => f.write_str("eta"),
            Family::GeneralizedGhz => f.write_str("ghz-p"),
            Family::GeneralizedW => f.write_str("w-qr"),
            Family::BellMixed => f.write_str("bell-mm"),
            Family::Xi(k) => write!(f, "xi{k}"),
            Family::Kappa(k) => write!(f, "kappa{k}"),
            Family::BisepPure(x) => write!(f, "bisep-{x}"),
            Family::XiBoundary => f.write_str("xi-boundary"),
            Family::FsExtremal(FsVariant::PlusPlusMinus) => f.write_str("fs-ppm"),
            Family::FsExtremal(FsVariant::PlusMinusPlus) => f.write_str("fs-pmp"),
            Family::FsExtremal(FsVariant::MinusPlusPlus) => f.write_str("fs-mpp"),
            Family::NoisyGw => f.write_str("noisy-gw"),
            Family::Acin => f.write_str("acin"),
            Family::Rank2 => f.write_str("rank2"),
            Family::BisepMixture => f.write_str("bisep-mix"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::all()
            .into_iter()
            .find(|f| f.to_string() == s)
            .ok_or_else(|| Error::Domain(format!("unknown family id {s:?}")))
    }
}

impl Serialize for Family {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A family member together with the parameters that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyPoint {
    pub family: Family,
    pub params: Vec<f64>,
    pub state: State,
}
