//! `blockstab` command-line tool.
//!
//! Exit status: 0 on success, 1 when a certificate fails, 2 on bad input.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use blockstab::blocks::{bottleneck_block, find_matching_block};
use blockstab::extension::{extend_barcode, zz_bottleneck};
use blockstab::grid2d::{directional_coker_triviality, freeness_defects, interpolant, koszul_xi1, Axis};
use blockstab::intervals::bottleneck_1d;
use blockstab::levelset::{interlevel_blocks, level_barcode, perturb, reeb_lower_bound, verify_pointwise};
use blockstab::linalg::check_prime;
use blockstab::value::parse_q;
use blockstab::witness::{verify_witness, witness_from_matching};
use blockstab::zigzag::{alternating, decompose_zz};
use blockstab::{
    Barcode1D, Block, BlockBarcode, Ext, GridModule2D, GridMorphism2D, Interval1D, Matching, PLGraph, ZigzagBarcode, ZigzagInterval,
    ZigzagModule, Q,
};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

const SCHEMA_VERSION: &str = "1";

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("certificate failed: {0}")]
    Certificate(String),
}

impl From<blockstab::Error> for CliError {
    fn from(e: blockstab::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    #[value(name = "1d")]
    OneD,
    Block,
    Zigzag,
}

#[derive(Parser, Debug)]
#[command(name = "blockstab", version, about = "Exact zigzag and block persistence: barcodes, distances, certificates")]
struct Cli {
    /// Prime characteristic of the coefficient field.
    #[arg(long, global = true, default_value_t = 2)]
    field: u32,
    /// Seed for every random choice; trial `k` uses stream `k`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Zigzag module → barcode of position ranges.
    Decompose { input: PathBuf },
    /// Zigzag barcode → block barcode.
    Extend {
        input: PathBuf,
        /// Zigzag length; defaults to the last position used.
        #[arg(long)]
        length: Option<usize>,
    },
    /// Bottleneck distance between two barcodes or two zigzag modules.
    Bottleneck {
        #[arg(long, value_enum)]
        kind: Kind,
        a: PathBuf,
        b: PathBuf,
    },
    /// Interlevel blocks and level-set barcode of a graph, with certificate.
    Levelset {
        #[arg(long, default_value_t = 0)]
        degree: usize,
        input: PathBuf,
    },
    /// Stability experiment: random perturbations of a graph.
    Perturb {
        #[arg(long, value_parser = parse_rational)]
        delta: Q,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        input: PathBuf,
    },
    /// Witness for an ε-matching of two block barcodes, verified.
    Witness {
        #[arg(long, value_parser = parse_rational)]
        eps: Q,
        a: PathBuf,
        b: PathBuf,
        /// Matching `{"pairs": [[i, j], …]}`; found automatically if absent.
        #[arg(long)]
        matching: Option<PathBuf>,
    },
    /// First Koszul Betti number of a grid module at a point.
    Betti {
        input: PathBuf,
        /// Point as `x,y`.
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        at: (i64, i64),
    },
    /// Interpolant of a grid morphism, with freeness certificate.
    Interpolant {
        input: PathBuf,
        #[arg(long, value_parser = parse_rational)]
        eps: Q,
    },
    /// Lower bound on the Reeb interleaving distance of two graphs.
    ReebBound {
        a: PathBuf,
        b: PathBuf,
        /// Use the sharper constant 2 in place of 5.
        #[arg(long)]
        tight: bool,
    },
    /// Version of the JSON report formats.
    SchemaVersion {
        /// Wrap the version in a JSON object.
        #[arg(long)]
        json: bool,
    },
}

fn parse_rational(s: &str) -> Result<Q, String> {
    let v = parse_q(s).map_err(|e| e.to_string())?;
    if v < Q::from_integer(0) {
        return Err(format!("{s} is negative"));
    }
    Ok(v)
}

fn parse_point(s: &str) -> Result<(i64, i64), String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected x,y, got {s:?}"))?;
    let p = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("{t:?}: {e}"));
    Ok((p(x)?, p(y)?))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// A barcode file: the structured form, or a list of strings like `"[0,1)"`.
fn read_list<T, S>(path: &Path, wrap: impl Fn(Vec<T>) -> S) -> CliResult<S>
where
    T: std::str::FromStr<Err = blockstab::Error>,
    S: DeserializeOwned,
{
    let v: Value = read_json(path)?;
    if let Value::Array(items) = &v {
        if items.iter().all(Value::is_string) {
            let parsed = items
                .iter()
                .enumerate()
                .map(|(k, s)| s.as_str().unwrap().parse::<T>().map_err(|e| CliError::Input(format!("{}: entry {k}: {e}", path.display()))))
                .collect::<CliResult<Vec<_>>>()?;
            return Ok(wrap(parsed));
        }
    }
    serde_json::from_value(v).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn read_barcode(path: &Path) -> CliResult<Barcode1D> {
    read_list::<Interval1D, _>(path, Barcode1D::new)
}

fn read_blocks(path: &Path) -> CliResult<BlockBarcode> {
    read_list::<Block, _>(path, BlockBarcode::new)
}

/// Zigzag barcode file: `[[first, last], …]` or `{"intervals": [...]}`.
fn read_zz_barcode(path: &Path) -> CliResult<ZigzagBarcode> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Pairs(Vec<(usize, usize)>),
        Full(ZigzagBarcode),
    }
    match read_json::<Raw>(path)? {
        Raw::Pairs(ps) => {
            Ok(ZigzagBarcode { intervals: ps.into_iter().map(|(a, b)| ZigzagInterval::new(a, b)).collect::<Result<_, _>>()? })
        }
        Raw::Full(z) => Ok(z),
    }
}

fn strings<T: Display>(xs: impl IntoIterator<Item = T>) -> Vec<String> {
    xs.into_iter().map(|x| x.to_string()).collect()
}

struct Report {
    json: Value,
    tsv: String,
    /// Reason the certificate failed, if it did.
    failure: Option<String>,
}

impl Report {
    fn ok(json: Value, tsv: String) -> Self {
        Report { json, tsv, failure: None }
    }

    fn scalar(v: impl Display) -> Self {
        let s = v.to_string();
        Report::ok(Value::String(s.clone()), s + "\n")
    }
}

#[derive(Serialize)]
struct TrialReport {
    trial: usize,
    #[serde(with = "blockstab::value::serde_q")]
    d_inf: Q,
    /// Block distance in degrees 0 and 1.
    d_blocks: [Ext; 2],
    /// Level-set distance in degrees 0 and 1.
    d_level: [Ext; 2],
    pass: bool,
}

fn run_perturb(g: &PLGraph, delta: &Q, trials: usize, seed: u64) -> CliResult<Vec<TrialReport>> {
    let base_b = [interlevel_blocks(g, 0)?, interlevel_blocks(g, 1)?];
    let base_l = [level_barcode(g, 0)?, level_barcode(g, 1)?];
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let p = perturb(g, delta, &mut rng)?;
            let mut d_blocks = [Ext::int(0); 2];
            let mut d_level = [Ext::int(0); 2];
            for i in 0..2 {
                d_blocks[i] = bottleneck_block(&base_b[i], &interlevel_blocks(&p.graph, i)?);
                d_level[i] = bottleneck_1d(&base_l[i], &level_barcode(&p.graph, i)?);
            }
            let bound = Ext::Fin(p.d_inf);
            let pass = d_blocks.iter().chain(&d_level).all(|d| *d <= bound);
            Ok(TrialReport { trial, d_inf: p.d_inf, d_blocks, d_level, pass })
        })
        .collect::<Result<Vec<_>, blockstab::Error>>()
        .map_err(CliError::from)
}

fn require_integer(eps: &Q) -> CliResult<i64> {
    if !eps.is_integer() {
        return Err(CliError::Input(format!("grid shifts must be integers, got {eps}")));
    }
    i64::try_from(*eps.numer()).map_err(|_| CliError::Input(format!("{eps} is out of range")))
}

fn run(cli: &Cli) -> CliResult<Report> {
    check_prime(cli.field)?;
    let report = match &cli.command {
        Command::Decompose { input } => {
            let v: ZigzagModule = read_json(input)?;
            let bc = decompose_zz(&v).sorted();
            let pairs: Vec<[usize; 2]> = bc.intervals.iter().map(|j| [j.first, j.last]).collect();
            let tsv = pairs.iter().map(|[a, b]| format!("{a}\t{b}\n")).collect();
            Report::ok(json!(pairs), tsv)
        }
        Command::Extend { input, length } => {
            let bc = read_zz_barcode(input)?;
            let n = length.unwrap_or_else(|| bc.intervals.iter().map(|j| j.last).max().unwrap_or(1));
            let blocks = extend_barcode(&bc, &alternating(n))?.sorted();
            let tsv = blocks.blocks.iter().map(|b| format!("{b}\n")).collect();
            Report::ok(json!(strings(&blocks.blocks)), tsv)
        }
        Command::Bottleneck { kind, a, b } => {
            let d = match kind {
                Kind::OneD => bottleneck_1d(&read_barcode(a)?, &read_barcode(b)?),
                Kind::Block => bottleneck_block(&read_blocks(a)?, &read_blocks(b)?),
                Kind::Zigzag => zz_bottleneck(&read_json(a)?, &read_json(b)?)?,
            };
            Report::scalar(d)
        }
        Command::Levelset { degree, input } => {
            let g: PLGraph = read_json(input)?;
            let blocks = interlevel_blocks(&g, *degree)?;
            let level = level_barcode(&g, *degree)?;
            let ok = verify_pointwise(&g, *degree, &blocks);
            let mut tsv = String::new();
            for b in &blocks.blocks {
                tsv += &format!("block\t{b}\n");
            }
            for j in &level.intervals {
                tsv += &format!("level\t{j}\n");
            }
            tsv += &format!("certificate\t{ok}\n");
            Report {
                json: json!({
                    "degree": degree,
                    "blocks": strings(&blocks.blocks),
                    "level": strings(&level.intervals),
                    "certificate": ok,
                }),
                tsv,
                failure: (!ok).then(|| "block counts disagree with preimage homology".to_string()),
            }
        }
        Command::Perturb { delta, trials, input } => {
            if *trials == 0 {
                return Err(CliError::Input("--trials must be at least 1".into()));
            }
            let g: PLGraph = read_json(input)?;
            let rows = run_perturb(&g, delta, *trials, cli.seed)?;
            let failed = rows.iter().filter(|r| !r.pass).count();
            let mut tsv = String::from("trial\td_inf\td_b0\td_b1\td_l0\td_l1\tpass\n");
            for r in &rows {
                tsv += &format!(
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                    r.trial,
                    Ext::Fin(r.d_inf),
                    r.d_blocks[0],
                    r.d_blocks[1],
                    r.d_level[0],
                    r.d_level[1],
                    r.pass
                );
            }
            Report {
                json: serde_json::to_value(&rows).expect("reports serialize"),
                tsv,
                failure: (failed > 0).then(|| format!("{failed} trials exceed the perturbation size")),
            }
        }
        Command::Witness { eps, a, b, matching } => {
            let (x, y) = (read_blocks(a)?, read_blocks(b)?);
            let sigma = match matching {
                Some(p) => read_json::<Matching>(p)?,
                None => match find_matching_block(&x, &y, eps)? {
                    Some(m) => m,
                    None => {
                        return Ok(Report {
                            json: json!({ "eps": Ext::Fin(*eps), "verified": false, "reason": "no ε-matching exists" }),
                            tsv: "verified\tfalse\n".into(),
                            failure: Some(format!("no {eps}-matching exists")),
                        })
                    }
                },
            };
            let w = witness_from_matching(&sigma, &x, &y, eps)?;
            let ok = verify_witness(&w, &[]);
            Report {
                json: json!({ "witness": w, "verified": ok }),
                tsv: format!("verified\t{ok}\n"),
                failure: (!ok).then(|| "interleaving equations fail on the grid".to_string()),
            }
        }
        Command::Betti { input, at } => {
            let m: GridModule2D = read_json(input)?;
            Report::scalar(koszul_xi1(&m, *at)?)
        }
        Command::Interpolant { input, eps } => {
            let f: GridMorphism2D = read_json(input)?;
            let k = require_integer(eps)?;
            let l = interpolant(&f, k)?;
            let defects = freeness_defects(&l.module);
            let free = defects.is_empty();
            let c1 = directional_coker_triviality(&l.image_into, Axis::X);
            let c2 = directional_coker_triviality(&l.into_target, Axis::Y);
            let defect_rows: Vec<[i64; 3]> = defects.iter().map(|&((x, y), v)| [x, y, v as i64]).collect();
            Report {
                json: json!({
                    "module": l.module,
                    "free": free,
                    "defects": defect_rows,
                    "image_coker_axis1": c1,
                    "target_coker_axis2": c2,
                }),
                tsv: format!("free\t{free}\nimage_coker_axis1\t{c1}\ntarget_coker_axis2\t{c2}\n"),
                failure: (!free).then(|| format!("ξ₁ nonzero at {defect_rows:?}")),
            }
        }
        Command::ReebBound { a, b, tight } => Report::scalar(reeb_lower_bound(&read_json(a)?, &read_json(b)?, *tight)?),
        Command::SchemaVersion { json: true } => Report::ok(json!({ "schema_version": SCHEMA_VERSION }), SCHEMA_VERSION.into()),
        Command::SchemaVersion { json: false } => Report::scalar(SCHEMA_VERSION),
    };
    Ok(report)
}

fn print(report: &Report, format: Format) {
    match format {
        Format::Tsv => print!("{}", report.tsv),
        // scalar answers print bare so they read the same in both formats
        Format::Json => match &report.json {
            Value::String(s) => println!("{s}"),
            v => println!("{}", serde_json::to_string_pretty(v).expect("values serialize")),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            print(&report, cli.format);
            match report.failure {
                Some(why) => {
                    eprintln!("{}", CliError::Certificate(why));
                    ExitCode::from(1)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
