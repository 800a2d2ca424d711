use sectorscope::criteria::{CriterionId, SQRT3};
use sectorscope::explorer::{
    maximize_conjecture_lhs, maximize_union_violation, published_union_parameters,
    sample_coordinates, summarize_campaign, union_mixture, union_objective, Generator,
    SampleCampaign,
};
use sectorscope::figures::{figure_data, tables, FigureId, FigureOptions};
use sectorscope::io::{PointCloud, PointRow, Table};
use sectorscope::thresholds::{noisy_w_grid, Threshold};
use sectorscope::zoo::Family;

fn cloud_bytes(c: &SampleCampaign) -> Vec<u8> {
    let rows = sample_coordinates(c)
        .unwrap()
        .into_iter()
        .map(|r| PointRow::new(r.generator, r.params, Some(&r.coords), vec![]))
        .collect();
    PointCloud {
        criteria: vec![],
        rows,
    }
    .to_csv()
    .unwrap()
}

#[test]
fn campaign_csv_is_byte_identical_across_runs_and_workers() {
    for generator in [
        Generator::HaarPure,
        Generator::MixedRank(3),
        Generator::MixedSchedule,
    ] {
        let mut c = SampleCampaign::new(generator, 500, 99);
        c.workers = 1;
        let one = cloud_bytes(&c);
        c.workers = 4;
        assert_eq!(one, cloud_bytes(&c));
        c.workers = 0;
        assert_eq!(one, cloud_bytes(&c));
        let s = serde_json::to_string(&summarize_campaign(&c).unwrap()).unwrap();
        c.workers = 2;
        assert_eq!(
            s,
            serde_json::to_string(&summarize_campaign(&c).unwrap()).unwrap()
        );
    }
}

#[test]
fn rank_conditioned_campaigns_respect_lower_bounds() {
    for (k, bound) in [(2, 1.0), (3, 1.0 / 3.0)] {
        let c = SampleCampaign::new(Generator::MixedRank(k), 20_000, 7);
        for r in sample_coordinates(&c).unwrap() {
            assert!(r.coords.s2_total() >= bound - 1e-9);
        }
        assert_eq!(summarize_campaign(&c).unwrap().total_violations(), 0);
    }
}

#[test]
fn family_grid_campaign() {
    let grid: Vec<Vec<f64>> = (0..50)
        .map(|k| vec![k as f64 / 49.0 * std::f64::consts::FRAC_1_SQRT_2])
        .collect();
    let c = SampleCampaign::new(
        Generator::FamilyGrid {
            family: Family::Xi(1),
            grid: grid.clone(),
        },
        0,
        0,
    );
    let rec = sample_coordinates(&c).unwrap();
    assert_eq!(
        rec.iter().map(|r| r.params.clone()).collect::<Vec<_>>(),
        grid
    );
}

#[test]
fn conjecture_search_reaches_but_does_not_exceed_the_bound() {
    let a = maximize_conjecture_lhs(2, 200, 200_000, 11).unwrap();
    assert!(a.best_value >= SQRT3 - 1e-4, "{}", a.best_value);
    assert!(a.best_value <= SQRT3 + 1e-6, "{}", a.best_value);
    assert!(!a.exceeds_bound);
    assert!(a.evaluations <= 200_000);
    let b = maximize_conjecture_lhs(2, 200, 200_000, 11).unwrap();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
}

#[test]
fn union_search_contains_the_published_point() {
    let x = published_union_parameters();
    assert!((union_objective(&x).unwrap() - 3.02214).abs() < 5e-5);
    assert!(union_mixture(&x).unwrap().validation().valid);

    let r = maximize_union_violation(200, 200_000, 5).unwrap();
    assert!(r.best_value >= 3.02214 - 5e-5, "{}", r.best_value);
    assert!((union_objective(&r.best_params).unwrap() - r.best_value).abs() < 1e-12);
    let again = maximize_union_violation(200, 200_000, 5).unwrap();
    assert_eq!(r, again);
}

#[test]
fn stronger_bound_is_never_weaker_than_fs2() {
    let rows = noisy_w_grid(21).unwrap();
    let at = |q: f64, r: f64, c: CriterionId| {
        rows.iter()
            .find(|x| x.q == q && x.r == r && x.criterion == c)
            .map(|x| x.bisection.visibility(0.0, 1.0))
            .unwrap()
    };
    for row in rows
        .iter()
        .filter(|x| x.criterion == CriterionId::FsStronger)
    {
        assert!(
            at(row.q, row.r, CriterionId::FsStronger) <= at(row.q, row.r, CriterionId::Fs2) + 1e-6
        );
    }
    for row in &rows {
        if let Some(ok) = row.agreement(1e-6) {
            assert!(ok, "{row:?}");
        }
        assert!(!matches!(row.bisection, Threshold::WholeRange), "{row:?}");
    }
}

#[test]
fn threshold_table_round_trips() {
    let t = tables(5).unwrap();
    let back = Table::from_csv(t.to_csv().unwrap().as_slice()).unwrap();
    assert_eq!(t, back);
    let crit = t.column("criterion").unwrap();
    let row = t.column("row").unwrap();
    let value = t.column("bisection").unwrap();
    let ghz_fs1 = t
        .rows
        .iter()
        .find(|r| r[row] == "noisy-ghz" && r[crit] == "fs1")
        .unwrap();
    assert!((ghz_fs1[value].parse::<f64>().unwrap() - 0.5).abs() < 1e-6);
}

#[test]
fn figure_data_round_trips_and_is_deterministic() {
    let mut o = FigureOptions::new(3);
    o.cloud = 200;
    o.mesh = 8;
    o.heatmap = 5;
    for id in FigureId::ALL {
        let a = figure_data(id, &o).unwrap();
        let b = figure_data(id, &o).unwrap();
        assert_eq!(a, b);
        for (name, t) in &a {
            let bytes = t.to_csv().unwrap();
            assert_eq!(Table::from_csv(bytes.as_slice()).unwrap(), *t, "{name}");
            if t.header.first().map(String::as_str) == Some("generator") {
                let cloud = PointCloud::from_table(t).unwrap();
                assert_eq!(cloud.to_csv().unwrap(), bytes, "{name}");
            }
        }
    }
}
