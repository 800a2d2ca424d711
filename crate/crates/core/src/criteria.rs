//! Bounds and entanglement criteria on sector coordinates.
//!
//! Every criterion is a list of inequalities `lhs ≤ bound` (or `≥` for the
//! rank bound); the report keeps each left-hand side, bound and slack so
//! callers can apply their own tolerance. Within a family of three
//! permutations the k-th inequality carries the minus sign on `S₂ᶜᴬ`,
//! `S₂ᴮᶜ`, `S₂ᴬᴮ` respectively.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariants::SectorCoordinates;
use crate::quantum::QubitLabel;
use crate::tolerances;

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CriterionId {
    /// Pure-state two-body bounds (sum rule plus three square-root bounds).
    Obs1,
    /// Pure-state bounds including the three-body sector.
    Obs2,
    /// Conjectured square-root bounds for mixed states.
    Conj1,
    /// Linear full-separability bounds.
    Obs3,
    /// Full-separability bounds using one- and three-body sectors.
    FsStronger,
    /// Bounds for states separable across `X | rest`.
    Obs4(QubitLabel),
    /// Union of the three fixed-partition biseparable sets.
    Union,
    Fs1,
    Fs2,
    Fs2Alt,
    Bs1,
    Bs2,
    Bs2Alt,
    /// Rank-conditioned lower bound on `S₂`.
    Rank,
}

impl CriterionId {
    pub const ALL: [CriterionId; 16] = [
        CriterionId::Obs1,
        CriterionId::Obs2,
        CriterionId::Conj1,
        CriterionId::Obs3,
        CriterionId::FsStronger,
        CriterionId::Obs4(QubitLabel::A),
        CriterionId::Obs4(QubitLabel::B),
        CriterionId::Obs4(QubitLabel::C),
        CriterionId::Union,
        CriterionId::Fs1,
        CriterionId::Fs2,
        CriterionId::Fs2Alt,
        CriterionId::Bs1,
        CriterionId::Bs2,
        CriterionId::Bs2Alt,
        CriterionId::Rank,
    ];
}

impl fmt::Display for CriterionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CriterionId::Obs1 => f.write_str("obs1"),
            CriterionId::Obs2 => f.write_str("obs2"),
            CriterionId::Conj1 => f.write_str("conj1"),
            CriterionId::Obs3 => f.write_str("obs3"),
            CriterionId::FsStronger => f.write_str("fs-stronger"),
            CriterionId::Obs4(x) => write!(f, "obs4-{x}"),
            CriterionId::Union => f.write_str("union"),
            CriterionId::Fs1 => f.write_str("fs1"),
            CriterionId::Fs2 => f.write_str("fs2"),
            CriterionId::Fs2Alt => f.write_str("fs2-alt"),
            CriterionId::Bs1 => f.write_str("bs1"),
            CriterionId::Bs2 => f.write_str("bs2"),
            CriterionId::Bs2Alt => f.write_str("bs2-alt"),
            CriterionId::Rank => f.write_str("rank"),
        }
    }
}

impl FromStr for CriterionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CriterionId::ALL
            .into_iter()
            .find(|c| c.to_string() == s)
            .ok_or_else(|| Error::Domain(format!("unknown criterion id {s:?}")))
    }
}

impl Serialize for CriterionId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sense {
    AtMost,
    AtLeast,
}

/// One inequality evaluated at a point. `slack ≥ 0` means satisfied.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Inequality {
    pub label: String,
    pub lhs: f64,
    pub bound: f64,
    pub sense: Sense,
    pub slack: f64,
}

impl Inequality {
    pub fn at_most(label: impl Into<String>, lhs: f64, bound: f64) -> Self {
        Self {
            label: label.into(),
            lhs,
            bound,
            sense: Sense::AtMost,
            slack: bound - lhs,
        }
    }

    pub fn at_least(label: impl Into<String>, lhs: f64, bound: f64) -> Self {
        Self {
            label: label.into(),
            lhs,
            bound,
            sense: Sense::AtLeast,
            slack: lhs - bound,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Satisfied,
    Violated,
    /// A square-root bound met a negative radicand beyond tolerance.
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: CriterionId,
    pub inequalities: Vec<Inequality>,
    /// Deviation from an equality constraint, where the criterion has one.
    pub equality_residual: Option<f64>,
    /// Auxiliary values reported alongside the inequalities.
    pub details: Vec<(String, f64)>,
    pub infeasible: bool,
    pub tolerance: f64,
    pub verdict: Verdict,
}

impl CriterionReport {
    fn new(id: CriterionId, inequalities: Vec<Inequality>, tolerance: f64) -> Self {
        let mut r = Self {
            id,
            inequalities,
            equality_residual: None,
            details: Vec::new(),
            infeasible: false,
            tolerance,
            verdict: Verdict::Satisfied,
        };
        r.refresh_verdict();
        r
    }

    fn with_equality(mut self, residual: f64) -> Self {
        self.equality_residual = Some(residual);
        self.refresh_verdict();
        self
    }

    fn refresh_verdict(&mut self) {
        self.verdict = if self.infeasible {
            Verdict::Infeasible
        } else if self.min_slack() < -self.tolerance
            || self.equality_residual.is_some_and(|r| r > self.tolerance)
        {
            Verdict::Violated
        } else {
            Verdict::Satisfied
        };
    }

    /// Smallest slack, `+∞` for an empty report.
    pub fn min_slack(&self) -> f64 {
        self.inequalities
            .iter()
            .map(|i| i.slack)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn slack(&self, label: &str) -> Option<f64> {
        self.inequalities
            .iter()
            .find(|i| i.label == label)
            .map(|i| i.slack)
    }

    pub fn is_violated(&self) -> bool {
        self.verdict == Verdict::Violated
    }
}

fn root(v: f64) -> f64 {
    v.max(0.0).sqrt()
}

/// `[+ + −, + − +, − + +]` combinations of `(ab, bc, ca)`.
fn signed_triples(ab: f64, bc: f64, ca: f64) -> [(&'static str, f64); 3] {
    [
        ("AB+BC-CA", ab + bc - ca),
        ("AB-BC+CA", ab - bc + ca),
        ("-AB+BC+CA", -ab + bc + ca),
    ]
}

fn sqrt_bounds(c: &SectorCoordinates, shift: f64) -> [(&'static str, f64); 3] {
    signed_triples(
        root(c.s2ab + shift),
        root(c.s2bc + shift),
        root(c.s2ca + shift),
    )
}

/// Pure-state bounds: `S₂ = 3` and `√S₂ᴬᴮ + √S₂ᴮᶜ − √S₂ᶜᴬ ≤ √3` with permutations.
pub fn pure_bounds(c: &SectorCoordinates, tol: f64) -> CriterionReport {
    let ineq = sqrt_bounds(c, 0.0)
        .into_iter()
        .map(|(l, v)| Inequality::at_most(l, v, SQRT3))
        .collect();
    CriterionReport::new(CriterionId::Obs1, ineq, tol).with_equality((c.s2_total() - 3.0).abs())
}

/// Pure-state bounds with `Δ = 3 − S₃`: `S₃ ≤ 3 + min S₂ˣʸ` and
/// `√(S₂ᴬᴮ+Δ) + √(S₂ᴮᶜ+Δ) − √(S₂ᶜᴬ+Δ) ≤ √3` with permutations.
pub fn pure_bounds_3d(c: &SectorCoordinates, tol: f64) -> CriterionReport {
    let delta = c.delta();
    let min2 = c.s2ab.min(c.s2bc).min(c.s2ca);
    let mut ineq = vec![Inequality::at_most("S3<=3+minS2", c.s3, 3.0 + min2)];
    ineq.extend(
        sqrt_bounds(c, delta)
            .into_iter()
            .map(|(l, v)| Inequality::at_most(l, v, SQRT3)),
    );
    let mut r = CriterionReport::new(CriterionId::Obs2, ineq, tol);
    r.infeasible = min2 + delta < -tol;
    r.refresh_verdict();
    r
}

/// Conjectured mixed-state version of [`pure_bounds`] without the equality.
pub fn conjecture_mixed(c: &SectorCoordinates, tol: f64) -> CriterionReport {
    let ineq = sqrt_bounds(c, 0.0)
        .into_iter()
        .map(|(l, v)| Inequality::at_most(l, v, SQRT3))
        .collect();
    CriterionReport::new(CriterionId::Conj1, ineq, tol)
}

/// Fully separable states obey `S₂ᴬᴮ + S₂ᴮᶜ − S₂ᶜᴬ ≤ 1` and permutations.
pub fn full_separability(c: &SectorCoordinates, tol: f64) -> CriterionReport {
    let ineq = signed_triples(c.s2ab, c.s2bc, c.s2ca)
        .into_iter()
        .map(|(l, v)| Inequality::at_most(l, v, 1.0))
        .collect();
    CriterionReport::new(CriterionId::Obs3, ineq, tol)
}

/// Sharper full-separability bounds, one per qubit `X`: the two-body pair
/// not touching `X` enters with a minus sign, plus `|S₃ ± S₁ᴬ ± S₁ᴮ ± S₁ᶜ|`
/// with `+` on `X`.
pub fn full_separability_stronger(c: &SectorCoordinates, tol: f64) -> CriterionReport {
    let ineq = vec![
        Inequality::at_most(
            "A",
            c.s2ab + c.s2ca - c.s2bc + (c.s3 + c.s1a - c.s1b - c.s1c).abs(),
            1.0,
        ),
        Inequality::at_most(
            "B",
            c.s2ab + c.s2bc - c.s2ca + (c.s3 - c.s1a + c.s1b - c.s1c).abs(),
            1.0,
        ),
        Inequality::at_most(
            "C",
            c.s2ca + c.s2bc - c.s2ab + (c.s3 - c.s1a - c.s1b + c.s1c).abs(),
            1.0,
        ),
    ];
    CriterionReport::new(CriterionId::FsStronger, ineq, tol)
}

/// Bounds for states separable across `X | YZ`, with `(Y, Z)` the cyclic
/// successors of `X`.
pub fn biseparability_fixed(
    c: &SectorCoordinates,
    single: QubitLabel,
    tol: f64,
) -> CriterionReport {
    let x = single;
    let (y, z) = x.cyclic_rest();
    let (xy, zx, yz) = (c.s2(x, y), c.s2(z, x), c.s2(y, z));
    let ineq = vec![
        Inequality::at_most(format!("{x}{y}+{z}{x}-{y}{z}"), xy + zx - yz, 1.0),
        Inequality::at_most(format!("{x}{y}"), xy, 1.0),
        Inequality::at_most(format!("{z}{x}"), zx, 1.0),
        Inequality::at_most(format!("3{x}{y}-{z}{x}+{y}{z}"), 3.0 * xy - zx + yz, 3.0),
        Inequality::at_most(format!("-{x}{y}+3{z}{x}+{y}{z}"), -xy + 3.0 * zx + yz, 3.0),
    ];
    CriterionReport::new(CriterionId::Obs4(single), ineq, tol)
}

/// Values of the union-of-biseparable-sets test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnionValue {
    /// `min_Y max(2|S₂ˣʸ − S₂ʸᶻ| + S₂ − 3, S₂ˣʸ + S₂ʸᶻ − S₂ˣᶻ − 1)`; positive
    /// means the point lies outside every fixed-partition set.
    pub value: f64,
    /// Same expression with the inner `max` replaced by `min`.
    pub min_min: f64,
    /// `min_Y (2|S₂ˣʸ − S₂ʸᶻ| + S₂)`, the first branch without the offset.
    pub first_branch: f64,
}

/// Evaluates the union test; `Y` runs over the qubits and `X, Z` are the others.
pub fn biseparability_union(c: &SectorCoordinates) -> UnionValue {
    let s2 = c.s2_total();
    let mut out = UnionValue {
        value: f64::INFINITY,
        min_min: f64::INFINITY,
        first_branch: f64::INFINITY,
    };
    for y in QubitLabel::ALL {
        let (z, x) = y.cyclic_rest();
        let (xy, yz, xz) = (c.s2(x, y), c.s2(y, z), c.s2(x, z));
        let first = 2.0 * (xy - yz).abs() + s2;
        let b1 = first - 3.0;
        let b2 = xy + yz - xz - 1.0;
        out.value = out.value.min(b1.max(b2));
        out.min_min = out.min_min.min(b1.min(b2));
        out.first_branch = out.first_branch.min(first);
    }
    out
}

fn union_report(c: &SectorCoordinates, tol: f64) -> CriterionReport {
    let u = biseparability_union(c);
    let mut r = CriterionReport::new(
        CriterionId::Union,
        vec![Inequality::at_most("min-max", u.value, 0.0)],
        tol,
    );
    r.details = vec![
        ("min-min".into(), u.min_min),
        ("first-branch".into(), u.first_branch),
    ];
    r
}

/// Single prior criterion as one inequality.
fn prior(id: CriterionId, c: &SectorCoordinates) -> Inequality {
    let (s1, s2, s3) = (c.s1_total(), c.s2_total(), c.s3);
    match id {
        CriterionId::Fs1 => Inequality::at_most("FS1", s3, 1.0),
        CriterionId::Fs2 => Inequality::at_most("FS2", s2 + 3.0 * s3, 3.0 + s1),
        CriterionId::Fs2Alt => Inequality::at_most("FS2-alt", s2 + s3, 3.0 + s1),
        CriterionId::Bs1 => Inequality::at_most("BS1", s3, 3.0),
        CriterionId::Bs2 => Inequality::at_most("BS2", s2 + s3, 3.0 + 3.0 * s1),
        CriterionId::Bs2Alt => Inequality::at_most("BS2-alt", s2 + 3.0 * s3, 3.0 + 3.0 * s1),
        _ => unreachable!("{id} is not a prior criterion"),
    }
}

const PRIOR: [CriterionId; 6] = [
    CriterionId::Fs1,
    CriterionId::Fs2,
    CriterionId::Fs2Alt,
    CriterionId::Bs1,
    CriterionId::Bs2,
    CriterionId::Bs2Alt,
];

/// The earlier full-separability (`FS1`, `FS2`) and biseparability (`BS1`,
/// `BS2`) criteria together with the alternative coefficient variants.
pub fn prior_criteria(c: &SectorCoordinates) -> Vec<Inequality> {
    PRIOR.iter().map(|&id| prior(id, c)).collect()
}

/// Lower bound on `S₂` implied by the rank: `S₂ ≥ 4/rank − 1` for rank ≤ 3
/// (an equality `S₂ = 3` for rank one) and `S₂ ≥ 0` otherwise.
pub fn rank_bound(c: &SectorCoordinates, rank: usize, tol: f64) -> Result<CriterionReport> {
    if !(1..=8).contains(&rank) {
        return Err(Error::Domain(format!("rank {rank} outside 1..=8")));
    }
    let bound = if rank <= 3 {
        4.0 / rank as f64 - 1.0
    } else {
        0.0
    };
    let r = CriterionReport::new(
        CriterionId::Rank,
        vec![Inequality::at_least(
            format!("rank{rank}"),
            c.s2_total(),
            bound,
        )],
        tol,
    );
    Ok(if rank == 1 {
        r.with_equality((c.s2_total() - 3.0).abs())
    } else {
        r
    })
}

/// Evaluates any criterion; `rank` is required for [`CriterionId::Rank`].
pub fn evaluate(
    id: CriterionId,
    c: &SectorCoordinates,
    rank: Option<usize>,
    tol: f64,
) -> Result<CriterionReport> {
    Ok(match id {
        CriterionId::Obs1 => pure_bounds(c, tol),
        CriterionId::Obs2 => pure_bounds_3d(c, tol),
        CriterionId::Conj1 => conjecture_mixed(c, tol),
        CriterionId::Obs3 => full_separability(c, tol),
        CriterionId::FsStronger => full_separability_stronger(c, tol),
        CriterionId::Obs4(x) => biseparability_fixed(c, x, tol),
        CriterionId::Union => union_report(c, tol),
        CriterionId::Rank => {
            let rank = rank.ok_or_else(|| {
                Error::Precondition("the rank criterion needs the state's rank".into())
            })?;
            rank_bound(c, rank, tol)?
        }
        prior_id => CriterionReport::new(prior_id, vec![prior(prior_id, c)], tol),
    })
}

/// [`evaluate`] with the default tolerance.
pub fn evaluate_default(
    id: CriterionId,
    c: &SectorCoordinates,
    rank: Option<usize>,
) -> Result<CriterionReport> {
    evaluate(id, c, rank, tolerances::CRITERION)
}

/// Whether the criterion flags the point (violation beyond `tol`).
pub fn detects(id: CriterionId, c: &SectorCoordinates, tol: f64) -> bool {
    match id {
        CriterionId::Union => biseparability_union(c).value > tol,
        _ => evaluate(id, c, None, tol).is_ok_and(|r| r.is_violated()),
    }
}

/// Named regions of coordinate space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    PureSurface,
    ConjectureBody,
    FsPolytope,
    BisepSet(QubitLabel),
}

impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pure-surface" => Ok(Region::PureSurface),
            "conjecture-body" => Ok(Region::ConjectureBody),
            "fs-polytope" => Ok(Region::FsPolytope),
            other => match other.strip_prefix("bisep-") {
                Some(q) => Ok(Region::BisepSet(q.parse()?)),
                None => Err(Error::Domain(format!("unknown region {other:?}"))),
            },
        }
    }
}

/// Smallest slack of the region's inequalities; for the pure surface the
/// negated equality residual also enters. `≥ 0` means inside or on the
/// boundary.
pub fn region_membership(c: &SectorCoordinates, region: Region) -> f64 {
    let tol = tolerances::CRITERION;
    match region {
        Region::PureSurface => {
            let r = pure_bounds(c, tol);
            r.min_slack().min(-r.equality_residual.unwrap_or(0.0))
        }
        Region::ConjectureBody => conjecture_mixed(c, tol).min_slack(),
        Region::FsPolytope => full_separability(c, tol).min_slack(),
        Region::BisepSet(x) => biseparability_fixed(c, x, tol).min_slack(),
    }
}
