use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use sectorscope::criteria::{evaluate, CriterionId, Verdict};
use sectorscope::explorer::{
    maximize_conjecture_lhs, maximize_union_violation, published_union_parameters,
    sample_coordinates, summarize_campaign, union_objective, Generator, SampleCampaign,
    SearchResult,
};
use sectorscope::figures::{figure_data, tables, FigureId, FigureOptions};
use sectorscope::invariants::{
    direct_purities, pure_state_relations, purity_from_sectors, sector_coordinates,
};
use sectorscope::io::{atomic_write, read_state_file, PointCloud, PointRow};
use sectorscope::quantum::numeric_rank;
use sectorscope::tolerances;
use sectorscope::zoo::{self, Family, State};
use sectorscope::{DensityMatrix, Error};

const EXIT_DETECTED: u8 = 1;
const EXIT_INVALID_STATE: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_USAGE: u8 = 4;
const EXIT_IO: u8 = 5;

/// Sector-length coordinates and entanglement bounds for three-qubit states.
#[derive(Parser)]
#[command(name = "sectorscope", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the seven sector-length coordinates and the purity cross-check.
    Invariants {
        #[command(flatten)]
        input: StateInput,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate criteria; exits 1 if any criterion detects the state.
    Criteria {
        #[command(flatten)]
        input: StateInput,
        /// Criterion ids (comma separated); all criteria if omitted.
        #[arg(long = "criterion", short = 'c', value_delimiter = ',')]
        criteria: Vec<String>,
        /// Rank used by the rank criterion; computed numerically if omitted.
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Threshold tables with closed-form, bisection and agreement columns.
    Tables {
        /// Output CSV; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Points per axis of the (q, r) grid.
        #[arg(long, default_value_t = 21)]
        grid: usize,
    },
    /// Write the CSV data behind a figure into a directory.
    FigureData {
        /// fig1, fig2, fig3, fig4 or heatmaps.
        figure: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, env = "SECTORSCOPE_SEED", default_value_t = 0)]
        seed: u64,
        /// Sampled points per cloud.
        #[arg(long, default_value_t = 2000)]
        cloud: usize,
    },
    /// Sample states and check the coordinate bounds; exits 1 on a violation.
    Sample {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        /// Sample induced-measure states of this rank instead of pure states.
        #[arg(long, conflicts_with = "schedule")]
        rank: Option<usize>,
        /// Cycle the rank through 1..=8.
        #[arg(long)]
        schedule: bool,
        #[arg(long, env = "SECTORSCOPE_SEED", default_value_t = 0)]
        seed: u64,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Point cloud CSV; only the summary is produced if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Slack columns of the point cloud (comma separated).
        #[arg(long, value_delimiter = ',', default_value = "conj1")]
        criteria: Vec<String>,
        /// Summary JSON; standard output if omitted.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Maximize one mixed-state square-root bound over rank-2 states.
    ConjectureSearch {
        #[arg(long, default_value_t = 1)]
        which: usize,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Maximize the union-test expression over two-partition biseparable mixtures.
    UnionSearch {
        #[command(flatten)]
        search: SearchArgs,
        /// Evaluate the published mixture instead of searching.
        #[arg(long)]
        published: bool,
    },
}

#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true).args(["file", "state", "family"])))]
struct StateInput {
    /// State file in JSON.
    file: Option<PathBuf>,
    /// Built-in state.
    #[arg(long, value_enum)]
    state: Option<NamedState>,
    /// Family id, realized with --params.
    #[arg(long)]
    family: Option<String>,
    #[arg(
        long,
        requires = "family",
        value_delimiter = ',',
        allow_negative_numbers = true
    )]
    params: Vec<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum NamedState {
    Ghz,
    W,
    Eta,
    Mm,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 200)]
    starts: usize,
    #[arg(long, default_value_t = 200_000)]
    budget: usize,
    #[arg(long, env = "SECTORSCOPE_SEED", default_value_t = 0)]
    seed: u64,
    /// Result JSON; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load_state(input: &StateInput) -> anyhow::Result<State> {
    if let Some(path) = &input.file {
        let (state, _) =
            read_state_file(path).with_context(|| format!("reading {}", path.display()))?;
        return Ok(state);
    }
    if let Some(named) = input.state {
        return Ok(match named {
            NamedState::Ghz => State::Pure(zoo::ghz()),
            NamedState::W => State::Pure(zoo::w()),
            NamedState::Eta => State::Mixed(zoo::eta()),
            NamedState::Mm => State::Mixed(DensityMatrix::maximally_mixed()),
        });
    }
    let family: Family = input
        .family
        .as_deref()
        .expect("clap enforces one source")
        .parse()?;
    Ok(family.realize(&input.params)?)
}

/// Compact decimal rendering for terminal output.
fn num(x: f64) -> String {
    let s = format!("{:.10}", x);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> anyhow::Result<()> {
    match out {
        Some(p) => atomic_write(p, bytes).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout().write_all(bytes).map_err(Error::Io)?,
    }
    Ok(())
}

fn cmd_invariants(input: &StateInput, as_json: bool) -> anyhow::Result<u8> {
    let state = load_state(input)?;
    let rho = state.density();
    let c = sector_coordinates(&rho);
    let residual = purity_from_sectors(&c).max_abs_difference(&direct_purities(&rho));
    let pure = matches!(state, State::Pure(_)).then(|| pure_state_relations(&c));
    if as_json {
        let v = json!({
            "coordinates": c,
            "s1": c.s1_total(),
            "s2": c.s2_total(),
            "delta": c.delta(),
            "purity_residual": residual,
            "pure_relations": pure,
        });
        println!("{}", serde_json::to_string_pretty(&v)?);
        return Ok(0);
    }
    println!(
        "S1 (A,B,C) = ({},{},{})",
        num(c.s1a),
        num(c.s1b),
        num(c.s1c)
    );
    println!(
        "({},{},{}) S3={}",
        num(c.s2ab),
        num(c.s2bc),
        num(c.s2ca),
        num(c.s3)
    );
    println!(
        "S1={} S2={} Delta={}",
        num(c.s1_total()),
        num(c.s2_total()),
        num(c.delta())
    );
    println!("purity identity residual {residual:.3e}");
    if let Some(p) = pure {
        println!("pure-state relations residual {:.3e}", p.max());
    }
    Ok(0)
}

fn cmd_criteria(
    input: &StateInput,
    ids: &[String],
    rank: Option<usize>,
    as_json: bool,
) -> anyhow::Result<u8> {
    let ids: Vec<CriterionId> = if ids.is_empty() {
        CriterionId::ALL.to_vec()
    } else {
        ids.iter().map(|s| s.parse()).collect::<Result<_, _>>()?
    };
    let rho = load_state(input)?.density();
    let c = sector_coordinates(&rho);
    let rank = rank.or_else(|| ids.contains(&CriterionId::Rank).then(|| numeric_rank(&rho)));
    let reports = ids
        .iter()
        .map(|&id| evaluate(id, &c, rank, tolerances::CRITERION))
        .collect::<Result<Vec<_>, _>>()?;
    let detected = reports.iter().any(|r| r.verdict != Verdict::Satisfied);
    if as_json {
        println!("{}", serde_json::to_string_pretty(&reports)?);
    } else {
        for r in &reports {
            let verdict = match r.verdict {
                Verdict::Satisfied => "satisfied",
                Verdict::Violated => "VIOLATED",
                Verdict::Infeasible => "INFEASIBLE",
            };
            println!(
                "{:<12} {verdict:<10} min slack {}",
                r.id.to_string(),
                num(r.min_slack())
            );
            for i in &r.inequalities {
                println!(
                    "    {:<22} lhs {:<14} bound {:<6} slack {}",
                    i.label,
                    num(i.lhs),
                    num(i.bound),
                    num(i.slack)
                );
            }
            if let Some(e) = r.equality_residual {
                println!("    equality residual {e:.3e}");
            }
            for (k, v) in &r.details {
                println!("    {k} {}", num(*v));
            }
        }
    }
    Ok(if detected { EXIT_DETECTED } else { 0 })
}

fn cmd_figure_data(figure: &str, out: &Path, seed: u64, cloud: usize) -> anyhow::Result<u8> {
    let id: FigureId = figure.parse()?;
    let mut opts = FigureOptions::new(seed);
    opts.cloud = cloud;
    let files = figure_data(id, &opts)?;
    fs::create_dir_all(out)
        .map_err(Error::Io)
        .with_context(|| format!("creating {}", out.display()))?;
    for (name, table) in files {
        let path = out.join(&name);
        table
            .write(&path)
            .with_context(|| format!("writing {}", path.display()))?;
        println!("{}", path.display());
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sample(
    n: usize,
    rank: Option<usize>,
    schedule: bool,
    seed: u64,
    workers: usize,
    out: Option<&Path>,
    criteria: &[String],
    summary_path: Option<&Path>,
) -> anyhow::Result<u8> {
    let generator = match (rank, schedule) {
        (Some(k), _) => Generator::MixedRank(k),
        (None, true) => Generator::MixedSchedule,
        (None, false) => Generator::HaarPure,
    };
    let ids: Vec<CriterionId> = criteria
        .iter()
        .map(|s| s.parse())
        .collect::<Result<_, _>>()?;
    let mut campaign = SampleCampaign::new(generator, n, seed);
    campaign.workers = workers;
    let summary = summarize_campaign(&campaign)?;
    if let Some(path) = out {
        let rows = sample_coordinates(&campaign)?
            .into_iter()
            .map(|r| {
                let slacks = ids
                    .iter()
                    .map(|&id| {
                        Ok(evaluate(id, &r.coords, r.rank, tolerances::CRITERION)?.min_slack())
                    })
                    .collect::<Result<Vec<f64>, Error>>()?;
                Ok(PointRow::new(
                    r.generator,
                    r.params,
                    Some(&r.coords),
                    slacks,
                ))
            })
            .collect::<Result<Vec<_>, Error>>()?;
        let cloud = PointCloud {
            criteria: ids.iter().map(|c| c.to_string()).collect(),
            rows,
        };
        emit(Some(path), &cloud.to_csv()?)?;
    }
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    emit(summary_path, text.as_bytes())?;
    Ok(if summary.total_violations() > 0 {
        EXIT_DETECTED
    } else {
        0
    })
}

fn finish_search(result: &SearchResult, out: Option<&Path>) -> anyhow::Result<u8> {
    let mut text = serde_json::to_string_pretty(result)?;
    text.push('\n');
    emit(out, text.as_bytes())?;
    if result.exceeds_bound {
        eprintln!(
            "best value {} exceeds {} (parameters in the result)",
            result.best_value, result.bound
        );
        return Ok(EXIT_DETECTED);
    }
    Ok(0)
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Invariants { input, json } => cmd_invariants(&input, json),
        Command::Criteria {
            input,
            criteria,
            rank,
            json,
        } => cmd_criteria(&input, &criteria, rank, json),
        Command::Tables { out, grid } => {
            emit(out.as_deref(), &tables(grid)?.to_csv()?)?;
            Ok(0)
        }
        Command::FigureData {
            figure,
            out,
            seed,
            cloud,
        } => cmd_figure_data(&figure, &out, seed, cloud),
        Command::Sample {
            n,
            rank,
            schedule,
            seed,
            workers,
            out,
            criteria,
            summary,
        } => cmd_sample(
            n,
            rank,
            schedule,
            seed,
            workers,
            out.as_deref(),
            &criteria,
            summary.as_deref(),
        ),
        Command::ConjectureSearch { which, search } => {
            let r = maximize_conjecture_lhs(which, search.starts, search.budget, search.seed)?;
            finish_search(&r, search.out.as_deref())
        }
        Command::UnionSearch { search, published } => {
            if published {
                let params = published_union_parameters();
                let value = union_objective(&params)?;
                let v =
                    json!({ "objective": "union-first-branch", "value": value, "params": params });
                let mut text = serde_json::to_string_pretty(&v)?;
                text.push('\n');
                emit(search.out.as_deref(), text.as_bytes())?;
                return Ok(0);
            }
            let r = maximize_union_violation(search.starts, search.budget, search.seed)?;
            finish_search(&r, search.out.as_deref())
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::InvalidState(_)) => EXIT_INVALID_STATE,
        Some(Error::Parse(_) | Error::Json(_)) => EXIT_PARSE,
        Some(Error::Csv(e)) if !e.is_io_error() => EXIT_PARSE,
        Some(Error::Io(_) | Error::Csv(_)) => EXIT_IO,
        Some(Error::Domain(_) | Error::Precondition(_)) => EXIT_USAGE,
        Some(Error::NonMonotone { .. }) => EXIT_DETECTED,
        None if err.chain().any(|e| e.is::<std::io::Error>()) => EXIT_IO,
        None => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
