//! Sampling campaigns, parameter scans and optimization searches over the
//! sector-length coordinates.
//!
//! Every random task draws from its own stream `stream(seed, task)`, so the
//! output of a campaign depends only on the seed and not on the number of
//! worker threads. Summaries are reduced with associative, commutative
//! operations (max with index tie-break, integer sums).

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{
    biseparability_union, conjecture_mixed, evaluate, pure_bounds, pure_bounds_3d, rank_bound,
    CriterionId, SQRT3,
};
use crate::error::{Error, Result};
use crate::invariants::{
    pure_state_relations, rank_bound_expression, sector_coordinates, SectorCoordinates,
};
use crate::optimize::{multistart_minimize, MultiStartOptions};
use crate::quantum::{
    apply_local_unitary_pure, numeric_rank, zyz_angles, zyz_unitary, DensityMatrix, Matrix2c,
    PureState, QubitLabel, C64, DIM,
};
use crate::random::{haar_random_pure, random_mixed_of_rank, scheduled_rank, stream};
use crate::thresholds::noisy_w_threshold;
use crate::tolerances;
use crate::zoo::{self, Family, RANK2_PARAMS};

/// Source of the states in a campaign.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    HaarPure,
    /// Induced-measure states of rank `k`.
    MixedRank(usize),
    /// Ranks cycling through 1..=8 with the task index.
    MixedSchedule,
    FamilyGrid {
        family: Family,
        grid: Vec<Vec<f64>>,
    },
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::HaarPure => f.write_str("haar-pure"),
            Generator::MixedRank(k) => write!(f, "mixed-rank-{k}"),
            Generator::MixedSchedule => f.write_str("mixed-schedule"),
            Generator::FamilyGrid { family, .. } => write!(f, "{family}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleCampaign {
    pub generator: Generator,
    /// Number of samples; ignored for family grids, which use every grid point.
    pub count: usize,
    pub seed: u64,
    /// Worker threads; `0` uses the global pool.
    pub workers: usize,
}

impl SampleCampaign {
    pub fn new(generator: Generator, count: usize, seed: u64) -> Self {
        Self {
            generator,
            count,
            seed,
            workers: 0,
        }
    }

    fn tasks(&self) -> usize {
        match &self.generator {
            Generator::FamilyGrid { grid, .. } => grid.len(),
            _ => self.count,
        }
    }

    /// Generator id with the seed appended for random generators.
    pub fn provenance(&self) -> String {
        match self.generator {
            Generator::FamilyGrid { .. } => self.generator.to_string(),
            _ => format!("{}/seed={}", self.generator, self.seed),
        }
    }
}

/// One sampled point. For random generators `params` is `[task]` or
/// `[task, rank]`; for family grids it is the family parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleRecord {
    pub generator: String,
    pub task: u64,
    pub params: Vec<f64>,
    pub rank: Option<usize>,
    pub coords: SectorCoordinates,
}

struct Sample {
    params: Vec<f64>,
    rank: Option<usize>,
    coords: SectorCoordinates,
}

fn draw(generator: &Generator, seed: u64, task: u64) -> Result<Sample> {
    let mut rng = stream(seed, task);
    Ok(match generator {
        Generator::HaarPure => Sample {
            params: vec![task as f64],
            rank: Some(1),
            coords: sector_coordinates(&haar_random_pure(&mut rng).density()),
        },
        Generator::MixedRank(k) => Sample {
            params: vec![task as f64, *k as f64],
            rank: Some(*k),
            coords: sector_coordinates(&random_mixed_of_rank(*k, &mut rng)?),
        },
        Generator::MixedSchedule => {
            let k = scheduled_rank(task);
            Sample {
                params: vec![task as f64, k as f64],
                rank: Some(k),
                coords: sector_coordinates(&random_mixed_of_rank(k, &mut rng)?),
            }
        }
        Generator::FamilyGrid { family, grid } => {
            let params = grid[task as usize].clone();
            let rho = family.realize(&params)?.density();
            Sample {
                params,
                rank: None,
                coords: sector_coordinates(&rho),
            }
        }
    })
}

fn validate_campaign(c: &SampleCampaign) -> Result<()> {
    if let Generator::MixedRank(k) = c.generator {
        if !(1..=DIM).contains(&k) {
            return Err(Error::Domain(format!("rank {k} outside 1..=8")));
        }
    }
    Ok(())
}

/// Runs `f` on a pool with `workers` threads, or on the global pool for `0`.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Domain(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

/// All records of a campaign, in task order.
pub fn sample_coordinates(campaign: &SampleCampaign) -> Result<Vec<SampleRecord>> {
    validate_campaign(campaign)?;
    let generator = campaign.provenance();
    let out: Vec<Result<SampleRecord>> = with_workers(campaign.workers, || {
        (0..campaign.tasks() as u64)
            .into_par_iter()
            .map(|task| {
                let s = draw(&campaign.generator, campaign.seed, task)?;
                Ok(SampleRecord {
                    generator: generator.clone(),
                    task,
                    params: s.params,
                    rank: s.rank,
                    coords: s.coords,
                })
            })
            .collect()
    })?;
    out.into_iter().collect()
}

/// Worst excess of one bound over a campaign. Positive excess is a violation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub name: String,
    pub worst_excess: f64,
    pub worst_task: Option<u64>,
    pub violations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub generator: String,
    pub count: u64,
    pub tolerance: f64,
    pub checks: Vec<CheckSummary>,
}

impl CampaignSummary {
    pub fn total_violations(&self) -> u64 {
        self.checks.iter().map(|c| c.violations).sum()
    }

    pub fn check(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.name == name)
    }
}

const PURE_CHECKS: [&str; 5] = [
    "pure-s2-sum",
    "pure-s1-s3-sum",
    "pure-single-body",
    "obs1",
    "obs2",
];
const MIXED_CHECKS: [&str; 4] = ["s2<=3", "rank-bound-expression", "conj1", "obs5"];

fn check_names(generator: &Generator) -> Vec<&'static str> {
    let mut names = MIXED_CHECKS.to_vec();
    if *generator == Generator::HaarPure {
        names.extend(PURE_CHECKS);
    }
    names
}

/// Excess per check, in [`check_names`] order; `−∞` marks "not applicable".
fn excesses(generator: &Generator, c: &SectorCoordinates, rank: Option<usize>) -> Vec<f64> {
    let tol = tolerances::CRITERION;
    let obs5 = match rank {
        Some(k) if k <= 3 => {
            let r = rank_bound(c, k, tol).expect("rank in range");
            (-r.min_slack()).max(r.equality_residual.unwrap_or(f64::NEG_INFINITY))
        }
        _ => f64::NEG_INFINITY,
    };
    let mut v = vec![
        c.s2_total() - 3.0,
        -rank_bound_expression(c),
        -conjecture_mixed(c, tol).min_slack(),
        obs5,
    ];
    if *generator == Generator::HaarPure {
        let res = pure_state_relations(c);
        v.extend([
            res.s2_sum,
            res.s1_s3_sum,
            res.single_body,
            -pure_bounds(c, tol).min_slack(),
            -pure_bounds_3d(c, tol).min_slack(),
        ]);
    }
    v
}

#[derive(Clone)]
struct Acc {
    worst: f64,
    task: Option<u64>,
    violations: u64,
}

impl Acc {
    const EMPTY: Acc = Acc {
        worst: f64::NEG_INFINITY,
        task: None,
        violations: 0,
    };

    fn merge(self, other: Acc) -> Acc {
        let take_other = match (self.task, other.task) {
            (_, None) => false,
            (None, Some(_)) => true,
            (Some(a), Some(b)) => other.worst > self.worst || (other.worst == self.worst && b < a),
        };
        let violations = self.violations + other.violations;
        let mut out = if take_other { other } else { self };
        out.violations = violations;
        out
    }
}

/// Streams a campaign through the bound checks without keeping the records.
pub fn summarize_campaign(campaign: &SampleCampaign) -> Result<CampaignSummary> {
    validate_campaign(campaign)?;
    let names = check_names(&campaign.generator);
    let n = names.len();
    let tol = tolerances::CRITERION;
    let accs: Result<Vec<Acc>> = with_workers(campaign.workers, || {
        (0..campaign.tasks() as u64)
            .into_par_iter()
            .map(|task| -> Result<Vec<Acc>> {
                let s = draw(&campaign.generator, campaign.seed, task)?;
                Ok(excesses(&campaign.generator, &s.coords, s.rank)
                    .into_iter()
                    .map(|e| {
                        if e == f64::NEG_INFINITY {
                            Acc::EMPTY
                        } else {
                            Acc {
                                worst: e,
                                task: Some(task),
                                violations: u64::from(e > tol || e.is_nan()),
                            }
                        }
                    })
                    .collect())
            })
            .try_reduce(
                || vec![Acc::EMPTY; n],
                |a, b| Ok(a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect()),
            )
    })?;
    let checks = names
        .iter()
        .zip(accs?)
        .map(|(name, a)| CheckSummary {
            name: name.to_string(),
            worst_excess: a.worst,
            worst_task: a.task,
            violations: a.violations,
        })
        .collect();
    Ok(CampaignSummary {
        generator: campaign.provenance(),
        count: campaign.tasks() as u64,
        tolerance: tol,
        checks,
    })
}

/// Outcome of a maximization search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub objective: String,
    pub seed: u64,
    pub best_value: f64,
    pub best_params: Vec<f64>,
    pub evaluations: u64,
    pub starts: u64,
    /// The best local run stopped on its budget.
    pub truncated: bool,
    /// Value the search is compared against.
    pub bound: f64,
    pub exceeds_bound: bool,
}

/// Excess over `√3` that flags a conjecture-violation candidate.
pub const CONJECTURE_SLACK: f64 = 1e-6;
/// Largest value of the union expression reported in the literature search.
pub const UNION_REFERENCE: f64 = 3.05;

/// Left-hand side `which ∈ 1..=3` of the mixed-state square-root bounds.
pub fn conjecture_lhs(which: usize, c: &SectorCoordinates) -> Result<f64> {
    if !(1..=3).contains(&which) {
        return Err(Error::Domain(format!(
            "conjecture inequality {which} outside 1..=3"
        )));
    }
    Ok(conjecture_mixed(c, tolerances::CRITERION).inequalities[which - 1].lhs)
}

fn rank2_objective(which: usize, x: &[f64]) -> f64 {
    let mut raw = [0.0; RANK2_PARAMS];
    raw.copy_from_slice(x);
    let c = sector_coordinates(&zoo::rank2_general(&raw));
    conjecture_mixed(&c, tolerances::CRITERION).inequalities[which - 1].lhs
}

fn rank2_start(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let tau = std::f64::consts::TAU;
    let mut x = Vec::with_capacity(RANK2_PARAMS);
    x.extend((0..5).map(|_| rng.sample::<f64, _>(StandardNormal).abs()));
    x.push(rng.random_range(0.0..tau));
    x.extend((0..8).map(|_| rng.sample::<f64, _>(StandardNormal).abs()));
    x.extend((0..7).map(|_| rng.random_range(0.0..tau)));
    x.push(rng.random::<f64>());
    x
}

/// Maximizes one mixed-state square-root bound over all rank-≤2 states.
pub fn maximize_conjecture_lhs(
    which: usize,
    starts: usize,
    budget: usize,
    seed: u64,
) -> Result<SearchResult> {
    conjecture_lhs(which, &SectorCoordinates::two_body_only(0.0, 0.0, 0.0))?;
    let opts = MultiStartOptions::new(starts, budget, seed);
    let r = multistart_minimize(&|x: &[f64]| -rank2_objective(which, x), rank2_start, &opts);
    let best_value = -r.best_value;
    Ok(SearchResult {
        objective: format!("conj1-{which}"),
        seed,
        best_value,
        best_params: r.best_x,
        evaluations: r.evaluations as u64,
        starts: r.starts as u64,
        truncated: r.truncated,
        bound: SQRT3,
        exceeds_bound: best_value > SQRT3 + CONJECTURE_SLACK,
    })
}

/// Parameters of one Schmidt-form component: `θ` then ZYZ angles for A, B, C.
pub const COMPONENT_PARAMS: usize = 10;
/// Two components (A|BC, then C|AB) and the weight of the first.
pub const UNION_PARAMS: usize = 2 * COMPONENT_PARAMS + 1;

fn angles_unitary(a: &[f64]) -> Matrix2c {
    zyz_unitary(a[0], a[1], a[2])
}

/// `(U_A ⊗ U_B ⊗ U_C)(|0⟩_single ⊗ (cos θ|00⟩ + sin θ|11⟩))`.
pub fn schmidt_component(single: QubitLabel, params: &[f64]) -> Result<PureState> {
    if params.len() != COMPONENT_PARAMS {
        return Err(Error::Domain(format!(
            "component takes {COMPONENT_PARAMS} parameters, got {}",
            params.len()
        )));
    }
    let base = zoo::bisep_pure(single, params[0]);
    Ok(apply_local_unitary_pure(
        &base,
        &angles_unitary(&params[1..4]),
        &angles_unitary(&params[4..7]),
        &angles_unitary(&params[7..10]),
    ))
}

/// Inverse of [`schmidt_component`] up to a global phase; fails unless the
/// state is product across `single | rest`.
pub fn schmidt_parameters(psi: &PureState, single: QubitLabel) -> Result<[f64; COMPONENT_PARAMS]> {
    let rest: Vec<QubitLabel> = QubitLabel::ALL
        .into_iter()
        .filter(|&q| q != single)
        .collect();
    let amps = psi.amplitudes();
    let index = |x: usize, i: usize, j: usize| {
        (x << single.shift()) | (i << rest[0].shift()) | (j << rest[1].shift())
    };
    let amp = |x: usize, k: usize| amps[index(x, k >> 1, k & 1)];

    // single-qubit factor from the heaviest pair column
    let k = (0..4)
        .max_by(|&a, &b| {
            let w = |k| amp(0, k).norm_sqr() + amp(1, k).norm_sqr();
            w(a).total_cmp(&w(b))
        })
        .expect("four columns");
    let n = (amp(0, k).norm_sqr() + amp(1, k).norm_sqr()).sqrt();
    let (a0, a1) = (amp(0, k) / n, amp(1, k) / n);
    let pair: Vec<C64> = (0..4)
        .map(|k| a0.conj() * amp(0, k) + a1.conj() * amp(1, k))
        .collect();
    let defect: f64 = (0..4)
        .map(|k| (amp(0, k) - a0 * pair[k]).norm_sqr() + (amp(1, k) - a1 * pair[k]).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if defect > 1e-9 {
        return Err(Error::Precondition(format!(
            "state is not product across {single}|rest (defect {defect:e})"
        )));
    }
    let u_single = Matrix2c::new(a0, -a1.conj(), a1, a0.conj());

    let m = Matrix2c::new(pair[0], pair[1], pair[2], pair[3]);
    let svd = m.svd(true, true);
    let (mut u, v_t) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let mut v = v_t.transpose();
    let mut s = [svd.singular_values[0], svd.singular_values[1]];
    if s[1] > s[0] {
        s.swap(0, 1);
        u.swap_columns(0, 1);
        v.swap_columns(0, 1);
    }
    let theta = s[1].atan2(s[0]);

    let mut unitaries = [Matrix2c::identity(); 3];
    unitaries[single.index()] = u_single;
    unitaries[rest[0].index()] = u;
    unitaries[rest[1].index()] = v;
    let mut out = [0.0; COMPONENT_PARAMS];
    out[0] = theta;
    for (q, unitary) in unitaries.iter().enumerate() {
        out[1 + 3 * q..4 + 3 * q].copy_from_slice(&zyz_angles(unitary));
    }
    Ok(out)
}

/// `p|χ_{A|BC}⟩⟨·| + (1−p)|χ_{C|AB}⟩⟨·|` from [`UNION_PARAMS`] raw parameters;
/// `p` is clamped to `[0, 1]`.
pub fn union_mixture(params: &[f64]) -> Result<DensityMatrix> {
    if params.len() != UNION_PARAMS {
        return Err(Error::Domain(format!(
            "mixture takes {UNION_PARAMS} parameters, got {}",
            params.len()
        )));
    }
    let a = schmidt_component(QubitLabel::A, &params[..COMPONENT_PARAMS])?;
    let c = schmidt_component(
        QubitLabel::C,
        &params[COMPONENT_PARAMS..2 * COMPONENT_PARAMS],
    )?;
    let p = params[2 * COMPONENT_PARAMS].clamp(0.0, 1.0);
    DensityMatrix::mixture(&[(p, &a.density()), (1.0 - p, &c.density())])
}

/// `min_Y (2|S₂ˣʸ − S₂ʸᶻ| + S₂)` of [`union_mixture`].
pub fn union_objective(params: &[f64]) -> Result<f64> {
    Ok(biseparability_union(&sector_coordinates(&union_mixture(params)?)).first_branch)
}

/// Raw parameters of the published mixture `0.65 χ_{A|BC} + 0.35 χ_{C|AB}`.
pub fn published_union_parameters() -> Vec<f64> {
    let (a, c) = zoo::counterexample_components();
    let mut x = Vec::with_capacity(UNION_PARAMS);
    x.extend(schmidt_parameters(&a, QubitLabel::A).expect("product across A|BC"));
    x.extend(schmidt_parameters(&c, QubitLabel::C).expect("product across C|AB"));
    x.push(0.65);
    x
}

fn union_start(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let tau = std::f64::consts::TAU;
    let mut x = Vec::with_capacity(UNION_PARAMS);
    for _ in 0..2 {
        x.push(rng.random_range(0.0..std::f64::consts::FRAC_PI_4));
        x.extend((0..9).map(|_| rng.random_range(0.0..tau)));
    }
    x.push(rng.random::<f64>());
    x
}

/// Maximizes the first branch of the union test over two-partition mixtures.
pub fn maximize_union_violation(starts: usize, budget: usize, seed: u64) -> Result<SearchResult> {
    let opts = MultiStartOptions::new(starts, budget, seed);
    let f = |x: &[f64]| -union_objective(x).expect("fixed parameter count");
    let r = multistart_minimize(&f, union_start, &opts);
    let best_value = -r.best_value;
    Ok(SearchResult {
        objective: "union-first-branch".into(),
        seed,
        best_value,
        best_params: r.best_x,
        evaluations: r.evaluations as u64,
        starts: r.starts as u64,
        truncated: r.truncated,
        bound: UNION_REFERENCE,
        exceeds_bound: best_value > UNION_REFERENCE,
    })
}

/// One point of a family scan; `coords` is `None` for infeasible parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub params: Vec<f64>,
    pub coords: Option<SectorCoordinates>,
    /// Smallest slack per requested criterion (`NaN` when infeasible).
    pub slacks: Vec<f64>,
}

/// Coordinates and criterion slacks along a parameter grid.
pub fn scan_family(
    family: Family,
    grid: &[Vec<f64>],
    criteria: &[CriterionId],
) -> Result<Vec<ScanRow>> {
    let arity = family.param_names().len();
    if let Some(bad) = grid.iter().find(|p| p.len() != arity) {
        return Err(Error::Domain(format!(
            "family {family} takes {arity} parameters, got {}",
            bad.len()
        )));
    }
    grid.par_iter()
        .map(|params| {
            let rho = match family.realize(params) {
                Ok(s) => s.density(),
                Err(Error::Domain(_)) => {
                    return Ok(ScanRow {
                        params: params.clone(),
                        coords: None,
                        slacks: vec![f64::NAN; criteria.len()],
                    })
                }
                Err(e) => return Err(e),
            };
            let c = sector_coordinates(&rho);
            let rank = criteria
                .contains(&CriterionId::Rank)
                .then(|| numeric_rank(&rho));
            let slacks = criteria
                .iter()
                .map(|&id| Ok(evaluate(id, &c, rank, tolerances::CRITERION)?.min_slack()))
                .collect::<Result<Vec<f64>>>()?;
            Ok(ScanRow {
                params: params.clone(),
                coords: Some(c),
                slacks,
            })
        })
        .collect()
}

/// Visibility thresholds of the noisy generalized W state at one `(q, r)`
/// cell; `None` marks `q + r > 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatmapCell {
    pub q: f64,
    pub r: f64,
    pub thresholds: Option<Vec<f64>>,
}

/// Threshold heat map on the full `n × n` grid over `[0, 1]²`.
pub fn noisy_w_heatmap(n: usize, criteria: &[CriterionId]) -> Result<Vec<HeatmapCell>> {
    if n < 2 {
        return Err(Error::Domain(format!("heat map needs n ≥ 2, got {n}")));
    }
    let d = (n - 1) as f64;
    let cells: Vec<(f64, f64)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i as f64 / d, j as f64 / d)))
        .collect();
    cells
        .par_iter()
        .map(|&(q, r)| {
            if zoo::w_params(q, r).is_err() {
                return Ok(HeatmapCell {
                    q,
                    r,
                    thresholds: None,
                });
            }
            let t = criteria
                .iter()
                .map(|&c| Ok(noisy_w_threshold(c, q, r)?.visibility(0.0, 1.0)))
                .collect::<Result<Vec<f64>>>()?;
            Ok(HeatmapCell {
                q,
                r,
                thresholds: Some(t),
            })
        })
        .collect()
}

/// Uniform grid of `n` points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}
