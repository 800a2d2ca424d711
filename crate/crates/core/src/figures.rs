//! Figure data and threshold tables as CSV tables.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;

use crate::criteria::{evaluate, CriterionId};
use crate::error::{Error, Result};
use crate::explorer::{linspace, noisy_w_heatmap, sample_coordinates, Generator, SampleCampaign};
use crate::invariants::{sector_coordinates, SectorCoordinates};
use crate::io::{format_float, PointCloud, PointRow, Table};
use crate::quantum::QubitLabel;
use crate::random::{random_fully_separable, stream};
use crate::thresholds::{full_separability_table, noisy_w_grid, Threshold, ThresholdRow};
use crate::tolerances;
use crate::zoo::{Family, FsVariant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    /// Pure-state two-body region: boundary curves, biseparable lines, samples.
    Fig1,
    /// Pure-state region with the three-body coordinate.
    Fig2,
    /// Conjectured mixed-state body.
    Fig3,
    /// Fully separable polytope and fixed-partition biseparable sets.
    Fig4,
    /// Visibility thresholds of noisy generalized W states over `(q, r)`.
    Heatmaps,
}

impl FigureId {
    pub const ALL: [FigureId; 5] = [
        FigureId::Fig1,
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Heatmaps,
    ];
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Heatmaps => "heatmaps",
        })
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.to_string() == s)
            .ok_or_else(|| Error::Domain(format!("unknown figure id {s:?}")))
    }
}

/// Sizes of the sampled and meshed parts of the figure data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureOptions {
    pub seed: u64,
    pub cloud: usize,
    pub curve_points: usize,
    pub mesh: usize,
    pub heatmap: usize,
}

impl FigureOptions {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            cloud: 2000,
            curve_points: 50,
            mesh: 30,
            heatmap: 21,
        }
    }
}

fn slacks(c: &SectorCoordinates, criteria: &[CriterionId]) -> Vec<f64> {
    criteria
        .iter()
        .map(|&id| {
            evaluate(id, c, None, tolerances::CRITERION)
                .map(|r| r.min_slack())
                .unwrap_or(f64::NAN)
        })
        .collect()
}

fn family_rows(
    family: Family,
    grid: &[Vec<f64>],
    criteria: &[CriterionId],
) -> Result<Vec<PointRow>> {
    grid.par_iter()
        .map(|p| {
            let c = sector_coordinates(&family.realize(p)?.density());
            Ok(PointRow::new(
                family.to_string(),
                p.clone(),
                Some(&c),
                slacks(&c, criteria),
            ))
        })
        .collect()
}

fn campaign_rows(campaign: &SampleCampaign, criteria: &[CriterionId]) -> Result<Vec<PointRow>> {
    Ok(sample_coordinates(campaign)?
        .into_iter()
        .map(|r| {
            let s = slacks(&r.coords, criteria);
            PointRow::new(r.generator, r.params, Some(&r.coords), s)
        })
        .collect())
}

fn cloud(criteria: &[CriterionId], rows: Vec<PointRow>) -> Table {
    PointCloud {
        criteria: criteria.iter().map(|c| c.to_string()).collect(),
        rows,
    }
    .to_table()
}

fn one_param(values: Vec<f64>) -> Vec<Vec<f64>> {
    values.into_iter().map(|v| vec![v]).collect()
}

fn fig1(o: &FigureOptions) -> Result<Vec<(String, Table)>> {
    let crit = [CriterionId::Obs1];
    let mut curves = Vec::new();
    let p_grid = one_param(linspace(
        0.0,
        std::f64::consts::FRAC_1_SQRT_2,
        o.curve_points,
    ));
    for k in 1..=3 {
        curves.extend(family_rows(Family::Xi(k), &p_grid, &crit)?);
    }
    let theta_grid = one_param(linspace(0.0, std::f64::consts::FRAC_PI_4, o.curve_points));
    for q in QubitLabel::ALL {
        curves.extend(family_rows(Family::BisepPure(q), &theta_grid, &crit)?);
    }
    let samples = campaign_rows(
        &SampleCampaign::new(Generator::HaarPure, o.cloud, o.seed),
        &crit,
    )?;
    Ok(vec![
        ("fig1_curves.csv".into(), cloud(&crit, curves)),
        ("fig1_cloud.csv".into(), cloud(&crit, samples)),
    ])
}

/// Interior mesh of `−1 < y ≤ x < 1` with `n` points per axis.
fn xi_boundary_mesh(n: usize) -> Vec<Vec<f64>> {
    let axis: Vec<f64> = (0..n)
        .map(|k| -1.0 + 2.0 * (k as f64 + 0.5) / n as f64)
        .collect();
    axis.iter()
        .flat_map(|&x| {
            axis.iter()
                .filter(move |&&y| y <= x)
                .map(move |&y| vec![x, y])
        })
        .collect()
}

fn fig2(o: &FigureOptions) -> Result<Vec<(String, Table)>> {
    let crit = [CriterionId::Obs2];
    let mesh = family_rows(Family::XiBoundary, &xi_boundary_mesh(o.mesh), &crit)?;
    let samples = campaign_rows(
        &SampleCampaign::new(Generator::HaarPure, o.cloud, o.seed),
        &crit,
    )?;
    Ok(vec![
        ("fig2_mesh.csv".into(), cloud(&crit, mesh)),
        ("fig2_cloud.csv".into(), cloud(&crit, samples)),
    ])
}

/// `(p, q)` grid of the κ families: `p ∈ [1 − 1/√2, 1/√2]`, `q ∈ [0, 1]`.
pub fn kappa_grid(n: usize) -> Vec<Vec<f64>> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let ps = linspace(1.0 - h, h, n);
    let qs = linspace(0.0, 1.0, n);
    ps.iter()
        .flat_map(|&p| qs.iter().map(move |&q| vec![p, q]))
        .collect()
}

fn fig3(o: &FigureOptions) -> Result<Vec<(String, Table)>> {
    let crit = [CriterionId::Conj1];
    let grid = kappa_grid(o.mesh.min(20));
    let mut mesh = Vec::new();
    for k in 1..=3 {
        mesh.extend(family_rows(Family::Kappa(k), &grid, &crit)?);
    }
    let samples = campaign_rows(
        &SampleCampaign::new(Generator::MixedSchedule, o.cloud, o.seed),
        &crit,
    )?;
    Ok(vec![
        ("fig3_mesh.csv".into(), cloud(&crit, mesh)),
        ("fig3_cloud.csv".into(), cloud(&crit, samples)),
    ])
}

/// A linear inequality `a · (S₂ᴬᴮ, S₂ᴮᶜ, S₂ᶜᴬ) ≤ b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub label: String,
    pub normal: [f64; 3],
    pub bound: f64,
}

/// Facets of a criterion that only involves two-body coordinates, read off
/// by evaluating it at the origin and the unit vectors.
pub fn linear_facets(id: CriterionId) -> Result<Vec<Facet>> {
    let at = |ab, bc, ca| evaluate(id, &SectorCoordinates::two_body_only(ab, bc, ca), None, 0.0);
    let origin = at(0.0, 0.0, 0.0)?;
    let units = [at(1.0, 0.0, 0.0)?, at(0.0, 1.0, 0.0)?, at(0.0, 0.0, 1.0)?];
    Ok(origin
        .inequalities
        .iter()
        .enumerate()
        .map(|(i, ineq)| Facet {
            label: ineq.label.clone(),
            normal: std::array::from_fn(|k| units[k].inequalities[i].lhs - ineq.lhs),
            bound: ineq.bound - ineq.lhs,
        })
        .collect())
}

/// Vertices of `{x ≥ 0} ∩ facets`, by intersecting every triple of planes.
pub fn polytope_vertices(facets: &[Facet]) -> Vec<[f64; 3]> {
    let mut planes: Vec<([f64; 3], f64)> = facets.iter().map(|f| (f.normal, f.bound)).collect();
    for k in 0..3 {
        let mut n = [0.0; 3];
        n[k] = -1.0;
        planes.push((n, 0.0));
    }
    let inside = |v: &[f64; 3]| {
        planes
            .iter()
            .all(|(n, b)| n[0] * v[0] + n[1] * v[1] + n[2] * v[2] <= b + 1e-9)
    };
    let mut out: Vec<[f64; 3]> = Vec::new();
    for i in 0..planes.len() {
        for j in i + 1..planes.len() {
            for k in j + 1..planes.len() {
                let rows = [planes[i], planes[j], planes[k]];
                let m = Matrix3::from_fn(|r, c| rows[r].0[c]);
                let rhs = Vector3::new(rows[0].1, rows[1].1, rows[2].1);
                let Some(v) = m.lu().solve(&rhs) else {
                    continue;
                };
                let v = [v[0], v[1], v[2]];
                if v.iter().all(|x| x.is_finite())
                    && inside(&v)
                    && !out
                        .iter()
                        .any(|w| (0..3).all(|t| (w[t] - v[t]).abs() < 1e-9))
                {
                    out.push(v);
                }
            }
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite vertices"));
    out
}

fn polytope_table() -> Result<Table> {
    let mut t = Table::new(["region", "facet", "s2AB", "s2BC", "s2CA"]);
    let mut regions = vec![("fs-polytope".to_string(), CriterionId::Obs3)];
    regions.extend(QubitLabel::ALL.map(|q| (format!("bisep-{q}"), CriterionId::Obs4(q))));
    for (region, id) in regions {
        let facets = linear_facets(id)?;
        let vertices = polytope_vertices(&facets);
        for v in &vertices {
            t.push(vec![
                region.clone(),
                "vertex".into(),
                format_float(v[0]),
                format_float(v[1]),
                format_float(v[2]),
            ]);
        }
        for f in &facets {
            for v in vertices.iter().filter(|v| {
                (f.normal[0] * v[0] + f.normal[1] * v[1] + f.normal[2] * v[2] - f.bound).abs()
                    < 1e-9
            }) {
                t.push(vec![
                    region.clone(),
                    f.label.clone(),
                    format_float(v[0]),
                    format_float(v[1]),
                    format_float(v[2]),
                ]);
            }
        }
    }
    Ok(t)
}

fn fig4(o: &FigureOptions) -> Result<Vec<(String, Table)>> {
    let crit = [CriterionId::Obs3, CriterionId::FsStronger];
    let n = o.mesh.min(20);
    let grid: Vec<Vec<f64>> = linspace(0.0, 1.0, n)
        .into_iter()
        .flat_map(|p| {
            linspace(0.0, std::f64::consts::PI, n)
                .into_iter()
                .map(move |t| vec![p, t])
        })
        .collect();
    let mut facets = Vec::new();
    for v in FsVariant::ALL {
        facets.extend(family_rows(Family::FsExtremal(v), &grid, &crit)?);
    }
    let generator = format!("fully-separable/seed={}", o.seed);
    let samples: Vec<PointRow> = (0..o.cloud as u64)
        .into_par_iter()
        .map(|task| {
            let c = sector_coordinates(&random_fully_separable(&mut stream(o.seed, task)));
            PointRow::new(
                generator.clone(),
                vec![task as f64],
                Some(&c),
                slacks(&c, &crit),
            )
        })
        .collect();
    Ok(vec![
        ("fig4_polytopes.csv".into(), polytope_table()?),
        ("fig4_extremal.csv".into(), cloud(&crit, facets)),
        ("fig4_cloud.csv".into(), cloud(&crit, samples)),
    ])
}

/// Criteria shown in the heat maps.
pub const HEATMAP_CRITERIA: [CriterionId; 9] = [
    CriterionId::Fs1,
    CriterionId::Fs2,
    CriterionId::Fs2Alt,
    CriterionId::Obs3,
    CriterionId::FsStronger,
    CriterionId::Bs1,
    CriterionId::Bs2,
    CriterionId::Bs2Alt,
    CriterionId::Union,
];

/// `q, r, feasible, w_<criterion>...`; infeasible cells carry `NaN`.
pub fn heatmap_table(n: usize) -> Result<Table> {
    let mut header = vec!["q".to_string(), "r".into(), "feasible".into()];
    header.extend(HEATMAP_CRITERIA.iter().map(|c| format!("w_{c}")));
    let mut t = Table::new(header);
    for cell in noisy_w_heatmap(n, &HEATMAP_CRITERIA)? {
        let mut row = vec![format_float(cell.q), format_float(cell.r)];
        match cell.thresholds {
            Some(ts) => {
                row.push("true".into());
                row.extend(ts.into_iter().map(format_float));
            }
            None => {
                row.push("false".into());
                row.extend(HEATMAP_CRITERIA.iter().map(|_| format_float(f64::NAN)));
            }
        }
        t.push(row);
    }
    Ok(t)
}

/// CSV files of one figure, as `(file name, table)`.
pub fn figure_data(id: FigureId, opts: &FigureOptions) -> Result<Vec<(String, Table)>> {
    match id {
        FigureId::Fig1 => fig1(opts),
        FigureId::Fig2 => fig2(opts),
        FigureId::Fig3 => fig3(opts),
        FigureId::Fig4 => fig4(opts),
        FigureId::Heatmaps => Ok(vec![("heatmaps.csv".into(), heatmap_table(opts.heatmap)?)]),
    }
}

fn threshold_cells(t: Threshold) -> [String; 2] {
    match t {
        Threshold::At(v) => ["at".into(), format_float(v)],
        Threshold::WholeRange => ["whole-range".into(), format_float(0.0)],
        Threshold::NoneInRange => ["none-in-range".into(), format_float(1.0)],
    }
}

fn flag(b: Option<bool>) -> String {
    b.map_or(String::new(), |b| b.to_string())
}

/// Agreement tolerance between closed forms, bisection and reference values.
pub const TABLE_TOLERANCE: f64 = 1e-6;

/// Threshold rows with closed-form, bisection, agreement and reference columns.
pub fn threshold_table(rows: &[ThresholdRow]) -> Table {
    let mut t = Table::new([
        "row",
        "p",
        "q",
        "r",
        "criterion",
        "closed_form",
        "bisection_kind",
        "bisection",
        "agreement",
        "reference",
        "reference_match",
    ]);
    for r in rows {
        let [kind, value] = threshold_cells(r.bisection);
        t.push(vec![
            r.row.clone(),
            format_float(r.p),
            format_float(r.q),
            format_float(r.r),
            r.criterion.to_string(),
            r.closed_form.map_or(String::new(), format_float),
            kind,
            value,
            flag(r.agreement(TABLE_TOLERANCE)),
            match r.reference {
                None => String::new(),
                Some(None) => "none".into(),
                Some(Some(v)) => format_float(v),
            },
            flag(r.matches_reference(TABLE_TOLERANCE)),
        ]);
    }
    t
}

/// The comparison table rows followed by the noisy-W grid with `n` points per axis.
pub fn tables(grid: usize) -> Result<Table> {
    let mut rows = full_separability_table()?;
    rows.extend(noisy_w_grid(grid)?);
    Ok(threshold_table(&rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_ids_round_trip() {
        for f in FigureId::ALL {
            assert_eq!(f.to_string().parse::<FigureId>().unwrap(), f);
        }
        assert!("fig9".parse::<FigureId>().is_err());
    }

    #[test]
    fn fs_polytope_vertices() {
        let v = polytope_vertices(&linear_facets(CriterionId::Obs3).unwrap());
        let expected = [
            [0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 1.0, 0.0],
            [1.0, 0.0, 0.0],
            [1.0, 1.0, 1.0],
        ];
        assert_eq!(v.len(), expected.len());
        for (a, b) in v.iter().zip(&expected) {
            assert!((0..3).all(|k| (a[k] - b[k]).abs() < 1e-12), "{v:?}");
        }
    }

    #[test]
    fn bisep_set_contains_its_corner() {
        // the A|BC set reaches the Bell point on BC
        let v = polytope_vertices(&linear_facets(CriterionId::Obs4(QubitLabel::A)).unwrap());
        assert!(
            v.iter()
                .any(|w| (w[0]).abs() < 1e-12 && (w[1] - 3.0).abs() < 1e-12 && w[2].abs() < 1e-12),
            "{v:?}"
        );
    }

    #[test]
    fn fig1_lines_end_at_corners() {
        let mut o = FigureOptions::new(1);
        o.cloud = 10;
        let files = figure_data(FigureId::Fig1, &o).unwrap();
        let curves = PointCloud::from_table(&files[0].1).unwrap();
        let ends: Vec<[f64; 3]> = curves
            .rows
            .iter()
            .filter(|r| r.generator.starts_with("bisep-"))
            .map(|r| [r.coords[3], r.coords[4], r.coords[5]])
            .collect();
        for corner in [
            [3.0, 0.0, 0.0],
            [0.0, 3.0, 0.0],
            [0.0, 0.0, 3.0],
            [1.0, 1.0, 1.0],
        ] {
            assert!(
                ends.iter()
                    .any(|e| (0..3).all(|k| (e[k] - corner[k]).abs() < 1e-9)),
                "missing {corner:?}"
            );
        }
    }

    #[test]
    fn figure_data_is_deterministic() {
        let mut o = FigureOptions::new(4);
        o.cloud = 50;
        o.mesh = 6;
        let a = figure_data(FigureId::Fig3, &o).unwrap();
        let b = figure_data(FigureId::Fig3, &o).unwrap();
        assert_eq!(a, b);
    }
}
