//! White-noise detection thresholds: closed forms for the generalized W
//! family and a bisection solver for arbitrary curves.
//!
//! Mixing a pure state with white noise at visibility `w` scales every
//! sector length by `w²`, so each linear criterion turns into a bound on
//! `w²`. A threshold is the smallest visibility at which the criterion
//! reports a violation; `1` means "never detected for w ≤ 1".

use serde::Serialize;

use crate::criteria::{detects, CriterionId};
use crate::error::{Error, Result};
use crate::invariants::{sector_coordinates, SectorCoordinates};
use crate::tolerances;
use crate::zoo::{noisy_gw, w_params};

/// `1/d` for `d > 0`; a nonpositive denominator means the bound never binds.
fn inv(d: f64) -> f64 {
    if d > 0.0 {
        1.0 / d
    } else {
        f64::INFINITY
    }
}

/// `S₃(W(q,r)) = 1 + 8X` with `X = q + r − q² − r² − qr`.
fn w_cross(q: f64, r: f64) -> f64 {
    q + r - q * q - r * r - q * r
}

/// Full-separability thresholds `[η₁, η₂, η₃, η₄]` of `w|W(q,r)⟩⟨·| + (1−w)𝟙/8`
/// for FS1, FS2, the linear bounds and the stronger bounds.
pub fn eta_thresholds(q: f64, r: f64) -> Result<[f64; 4]> {
    let (q, r) = w_params(q, r)?;
    let x = w_cross(q, r);
    let e1 = inv(1.0 + 8.0 * x).min(1.0);
    let e2 = (3.0 * inv(3.0 + 32.0 * x)).min(1.0);
    let e3 = inv(1.0 + 16.0 * q * q + 16.0 * q * (r - 1.0) - 8.0 * (r - 1.0) * r)
        .min(inv(
            1.0 + 8.0 * r - 8.0 * ((q - 1.0) * q + 4.0 * q * r + r * r)
        ))
        .min(inv(1.0 - 8.0 * q * q
            + 16.0 * (r - 1.0) * r
            + 8.0 * q * (1.0 + 2.0 * r)))
        .min(1.0);
    let e4 = inv(1.0 + 16.0 * r - 16.0 * (q * (q - 1.0) + 2.0 * q * r + r * r))
        .min(inv(1.0 - 16.0 * r * (r - 1.0)))
        .min(inv(1.0 - 16.0 * q * (q - 1.0)))
        .min(1.0);
    Ok([e1, e2, e3, e4].map(f64::sqrt))
}

/// Biseparability thresholds `[Ξ₁, Ξ₂, Ξ₃]` of the same family for BS1, BS2
/// and the union test.
pub fn xi_thresholds(q: f64, r: f64) -> Result<[f64; 3]> {
    let (q, r) = w_params(q, r)?;
    let x = w_cross(q, r);
    let x1 = (3.0 * inv(1.0 + 8.0 * x)).min(1.0);
    let x2 = (3.0 * inv(32.0 * x - 5.0)).min(1.0);
    let phi1 = inv(1.0 + 8.0 * q * (2.0 * r + q - 1.0).abs()).min(inv(1.0 - 8.0 * q * q
        + 16.0 * (r - 1.0) * r
        + 8.0 * q * (1.0 + 2.0 * r)));
    let phi2 = inv(1.0 + 8.0 * r * (2.0 * q + r - 1.0).abs())
        .min(inv(
            1.0 + 16.0 * q * q + 16.0 * q * (r - 1.0) - 8.0 * (r - 1.0) * r
        ));
    let phi3 = inv(1.0 + 8.0 * ((q - r) * (r + q - 1.0)).abs()).min(inv(
        1.0 + 8.0 * r - 8.0 * ((q - 1.0) * q + 4.0 * q * r + r * r)
    ));
    let x3 = phi1.max(phi2).max(phi3).min(1.0);
    Ok([x1, x2, x3].map(f64::sqrt))
}

/// Criteria matching `[η₁, η₂, η₃, η₄]`.
pub const ETA_CRITERIA: [CriterionId; 4] = [
    CriterionId::Fs1,
    CriterionId::Fs2,
    CriterionId::Obs3,
    CriterionId::FsStronger,
];

/// Criteria matching `[Ξ₁, Ξ₂, Ξ₃]`.
pub const XI_CRITERIA: [CriterionId; 3] = [CriterionId::Bs1, CriterionId::Bs2, CriterionId::Union];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum Threshold {
    /// Smallest parameter at which the criterion is violated.
    At(f64),
    /// Violated already at the start of the range.
    WholeRange,
    /// Never violated in the range.
    NoneInRange,
}

impl Threshold {
    /// The threshold as a visibility in `[lo, hi]`: the start for
    /// [`Threshold::WholeRange`], the end for [`Threshold::NoneInRange`].
    pub fn visibility(&self, lo: f64, hi: f64) -> f64 {
        match *self {
            Threshold::At(t) => t,
            Threshold::WholeRange => lo,
            Threshold::NoneInRange => hi,
        }
    }
}

/// Points of the monotonicity scan.
pub const SCAN_POINTS: usize = 101;

/// Smallest `t ∈ [lo, hi]` at which `violated(t)` holds, assuming the
/// violation region is an upper interval. A coarse scan checks that
/// assumption first.
pub fn bisect_violation<F>(violated: F, lo: f64, hi: f64) -> Result<Threshold>
where
    F: Fn(f64) -> Result<bool>,
{
    if !(lo < hi) {
        return Err(Error::Domain(format!("empty range [{lo}, {hi}]")));
    }
    let at = |k: usize| lo + (hi - lo) * k as f64 / (SCAN_POINTS - 1) as f64;
    let mut first = None;
    for k in 0..SCAN_POINTS {
        let t = at(k);
        let v = violated(t)?;
        match (first, v) {
            (None, true) => first = Some(k),
            (Some(f), false) => {
                return Err(Error::NonMonotone {
                    violated_at: at(f),
                    recovered_at: t,
                })
            }
            _ => {}
        }
    }
    let Some(first) = first else {
        return Ok(Threshold::NoneInRange);
    };
    if first == 0 {
        return Ok(Threshold::WholeRange);
    }
    let (mut a, mut b) = (at(first - 1), at(first));
    while b - a > tolerances::BISECTION {
        let m = 0.5 * (a + b);
        if violated(m)? {
            b = m;
        } else {
            a = m;
        }
    }
    Ok(Threshold::At(b))
}

/// Threshold of `criterion` along a curve of coordinates.
pub fn threshold_by_bisection<F>(
    criterion: CriterionId,
    curve: F,
    lo: f64,
    hi: f64,
) -> Result<Threshold>
where
    F: Fn(f64) -> Result<SectorCoordinates>,
{
    bisect_violation(
        |t| Ok(detects(criterion, &curve(t)?, tolerances::CRITERION)),
        lo,
        hi,
    )
}

/// Visibility threshold on the noisy generalized W curve `w ↦ noisy_gw(0, w, ·, q, r)`,
/// computed from the density matrices.
pub fn noisy_w_threshold(criterion: CriterionId, q: f64, r: f64) -> Result<Threshold> {
    w_params(q, r)?;
    threshold_by_bisection(
        criterion,
        |w| Ok(sector_coordinates(&noisy_gw(0.0, w, 0.5, q, r)?)),
        0.0,
        1.0,
    )
}

/// Visibility threshold on the noisy GHZ curve `g ↦ noisy_gw(g, 0, 1/2, ·, ·)`.
pub fn noisy_ghz_threshold(criterion: CriterionId) -> Result<Threshold> {
    threshold_by_bisection(
        criterion,
        |g| Ok(sector_coordinates(&noisy_gw(g, 0.0, 0.5, 0.0, 0.0)?)),
        0.0,
        1.0,
    )
}

/// Threshold along the GHZ–W line `g ↦ noisy_gw(g, 1−g, 1/2, 1/3, 1/3)`.
pub fn ghz_w_line_threshold(criterion: CriterionId) -> Result<Threshold> {
    threshold_by_bisection(
        criterion,
        |g| {
            Ok(sector_coordinates(&noisy_gw(
                g,
                1.0 - g,
                0.5,
                1.0 / 3.0,
                1.0 / 3.0,
            )?))
        },
        0.0,
        1.0,
    )
}

/// Whether a closed-form visibility (with `1` meaning never detected) agrees
/// with a bisection result.
pub fn agrees(closed_form: f64, numeric: Threshold, tol: f64) -> bool {
    match numeric {
        Threshold::At(t) => (t - closed_form).abs() <= tol,
        Threshold::NoneInRange => closed_form >= 1.0 - tol,
        Threshold::WholeRange => closed_form <= tol,
    }
}

/// One row of a threshold table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub row: String,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub criterion: CriterionId,
    pub closed_form: Option<f64>,
    pub bisection: Threshold,
    /// Tabulated reference value, where the row has one (`None` inside means
    /// "never detected").
    pub reference: Option<Option<f64>>,
}

impl ThresholdRow {
    pub fn agreement(&self, tol: f64) -> Option<bool> {
        self.closed_form.map(|c| agrees(c, self.bisection, tol))
    }

    pub fn matches_reference(&self, tol: f64) -> Option<bool> {
        self.reference.map(|r| match r {
            Some(v) => agrees(v, self.bisection, tol),
            None => self.bisection == Threshold::NoneInRange,
        })
    }
}

const FULL_SEP_COLUMNS: [CriterionId; 6] = [
    CriterionId::Fs1,
    CriterionId::Fs2,
    CriterionId::Fs2Alt,
    CriterionId::Obs3,
    CriterionId::FsStronger,
    CriterionId::Bs2Alt,
];

fn eta_for(criterion: CriterionId, eta: &[f64; 4]) -> Option<f64> {
    ETA_CRITERIA
        .iter()
        .position(|&c| c == criterion)
        .map(|i| eta[i])
}

/// Rows of the full-separability comparison: noisy GHZ, noisy W, the GHZ–W
/// line and the noisy Bell state `W(0, 1/2)`, including the coefficient
/// variants.
pub fn full_separability_table() -> Result<Vec<ThresholdRow>> {
    let s = f64::sqrt;
    let mut rows = Vec::new();
    let third = 1.0 / 3.0;

    for c in FULL_SEP_COLUMNS {
        let reference = match c {
            CriterionId::Fs1 => Some(Some(0.5)),
            CriterionId::Fs2 | CriterionId::FsStronger => Some(Some(1.0 / s(5.0))),
            CriterionId::Obs3 => Some(None),
            _ => None,
        };
        rows.push(ThresholdRow {
            row: "noisy-ghz".into(),
            p: 0.5,
            q: f64::NAN,
            r: f64::NAN,
            criterion: c,
            closed_form: None,
            bisection: noisy_ghz_threshold(c)?,
            reference,
        });
    }

    let curves: [(&str, f64, f64, [Option<Option<f64>>; 4]); 2] = [
        (
            "noisy-w",
            third,
            third,
            [
                Some(Some(s(3.0 / 11.0))),
                Some(Some(3.0 / s(41.0))),
                Some(None),
                Some(Some(3.0 / s(41.0))),
            ],
        ),
        (
            "noisy-bell-ab",
            0.0,
            0.5,
            [
                Some(Some(1.0 / s(3.0))),
                Some(Some(s(3.0) / s(11.0))),
                Some(Some(1.0 / s(3.0))),
                Some(Some(1.0 / s(7.0))),
            ],
        ),
    ];
    for (name, q, r, refs) in curves {
        let eta = eta_thresholds(q, r)?;
        for c in FULL_SEP_COLUMNS {
            rows.push(ThresholdRow {
                row: name.into(),
                p: f64::NAN,
                q,
                r,
                criterion: c,
                closed_form: eta_for(c, &eta),
                bisection: noisy_w_threshold(c, q, r)?,
                reference: ETA_CRITERIA
                    .iter()
                    .position(|&e| e == c)
                    .and_then(|i| refs[i]),
            });
        }
    }

    for c in ETA_CRITERIA {
        rows.push(ThresholdRow {
            row: "ghz-w-line".into(),
            p: 0.5,
            q: third,
            r: third,
            criterion: c,
            closed_form: None,
            bisection: ghz_w_line_threshold(c)?,
            reference: None,
        });
    }
    Ok(rows)
}

/// Feasible points `(i/(n−1), j/(n−1))` with `i + j ≤ n − 1`.
pub fn feasible_grid(n: usize) -> Vec<(f64, f64)> {
    let d = (n - 1) as f64;
    (0..n)
        .flat_map(|i| (0..n - i).map(move |j| (i as f64 / d, j as f64 / d)))
        .collect()
}

/// Closed-form and bisection thresholds for every feasible `(q, r)` grid
/// point and every criterion with a closed form, plus the coefficient variants.
pub fn noisy_w_grid(n: usize) -> Result<Vec<ThresholdRow>> {
    use rayon::prelude::*;
    let grid = feasible_grid(n);
    let per_point: Vec<Result<Vec<ThresholdRow>>> = grid
        .par_iter()
        .map(|&(q, r)| {
            let eta = eta_thresholds(q, r)?;
            let xi = xi_thresholds(q, r)?;
            let mut closed: Vec<(CriterionId, Option<f64>)> = ETA_CRITERIA
                .iter()
                .zip(eta)
                .map(|(&c, v)| (c, Some(v)))
                .collect();
            closed.extend(XI_CRITERIA.iter().zip(xi).map(|(&c, v)| (c, Some(v))));
            closed.push((CriterionId::Fs2Alt, None));
            closed.push((CriterionId::Bs2Alt, None));
            closed
                .into_iter()
                .map(|(c, cf)| {
                    Ok(ThresholdRow {
                        row: "noisy-w-grid".into(),
                        p: f64::NAN,
                        q,
                        r,
                        criterion: c,
                        closed_form: cf,
                        bisection: noisy_w_threshold(c, q, r)?,
                        reference: None,
                    })
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_point {
        rows.extend(r?);
    }
    Ok(rows)
}
