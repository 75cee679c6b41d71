//! Subcommands: argument types and their execution to a rendered output string.

use clap::{Parser, Subcommand, ValueEnum};
use mcmullen_core::derivative::{derivative_step, rank_trace, TargetSet};
use mcmullen_core::game::{perfect_set_extract, play_match, strategy_by_tag, ExtractionError, MatchConfig, Outcome};
use mcmullen_core::{generators, svg, BodySpec, ConvexBody, Error, Homothet, Player, Vector};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(name = "mcmullen", version, about = "Workbench for the no-beta McMullen game")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Svg,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build and validate a body from a JSON file or a generator name.
    Body {
        #[arg(long)]
        body: String,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Build and validate a target from a JSON file or a generator name.
    Target {
        #[arg(long)]
        target: String,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Chord-direction constant at a boundary point, or its global infimum.
    Delta {
        #[arg(long)]
        body: String,
        /// Boundary point as a JSON array; omit for the global value.
        #[arg(long)]
        point: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Minimal enclosing copy of a point list.
    Minhull {
        #[arg(long)]
        body: String,
        /// Points as a JSON array of arrays.
        #[arg(long)]
        points: String,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Longest chord in a direction.
    Maxchord {
        #[arg(long)]
        body: String,
        #[arg(long)]
        direction: String,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// One derivative step with its certificates.
    Derive {
        #[arg(long)]
        body: String,
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 1e-6)]
        eta: f64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Iterate the derivative to its fixpoint.
    Rank {
        #[arg(long)]
        body: String,
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 1e-6)]
        eta: f64,
        #[arg(long, default_value_t = 32)]
        stages: usize,
        /// Print the full trace instead of the summary.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Play a match and print its run record.
    Play {
        #[arg(long = "pI")]
        p_i: String,
        #[arg(long = "pII")]
        p_ii: String,
        #[arg(long)]
        horizon: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "disk")]
        body: String,
        #[arg(long, default_value = "circle-200")]
        target: String,
        /// Play this many matches with seeds `seed, seed+1, ...` and print a summary.
        #[arg(long)]
        tournament: Option<u64>,
    },
    /// Extract the binary tree of disjoint I-moves from a player-I strategy.
    Extract {
        #[arg(long = "pI")]
        p_i: String,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "disk")]
        body: String,
        #[arg(long, default_value = "circle-200")]
        target: String,
    },
    /// Serve game sessions over HTTP.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
        /// Directory for session snapshots; sessions are memory-only without it.
        #[arg(long)]
        data_dir: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub enum CliError {
    /// Bad input: exit code 2.
    Validation(String),
    /// Resource limit: exit code 3.
    Resource(String),
    /// Anything else: exit code 1.
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Other(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Resource(m) | CliError::Other(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::ResourceLimit(_) => CliError::Resource(e.to_string()),
            Error::Numerical(_) => CliError::Other(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Parse JSON, naming the offending field on failure.
pub fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> CliResult<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Validation(format!("malformed {what} at '{path}': {}", e.inner()))
    })
}

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))
}

fn stochastic(name: &str) -> bool {
    name.starts_with("random-polytope") || name.starts_with("scatter")
}

fn need_seed(name: &str, seed: Option<u64>) -> CliResult<u64> {
    match seed {
        Some(s) => Ok(s),
        None if stochastic(name) => Err(CliError::Validation(format!("generator '{name}' needs --seed"))),
        None => Ok(0),
    }
}

/// A body from a JSON file (if `arg` names one) or a generator.
pub fn load_body(arg: &str, seed: Option<u64>) -> CliResult<ConvexBody> {
    let p = Path::new(arg);
    if p.is_file() {
        let spec: BodySpec = parse_json(&read_file(p)?, "body")?;
        return Ok(ConvexBody::from_spec(&spec)?);
    }
    Ok(generators::body_by_name(arg, need_seed(arg, seed)?)?)
}

pub fn load_target(arg: &str, seed: Option<u64>) -> CliResult<TargetSet> {
    let p = Path::new(arg);
    if p.is_file() {
        let t: TargetSet = parse_json(&read_file(p)?, "target")?;
        t.validate()?;
        return Ok(t);
    }
    Ok(generators::target_by_name(arg, need_seed(arg, seed)?)?)
}

fn parse_vector(text: &str, what: &str) -> CliResult<Vector> {
    let v: Vec<f64> = parse_json(text, what)?;
    Ok(Vector::from_vec(v))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("outputs serialize");
    s.push('\n');
    s
}

/// One-line JSON for short summaries.
fn to_line<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("outputs serialize");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct MinHull {
    center: Vec<f64>,
    scale: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct RankSummary {
    rank: usize,
    fixpoint_size: usize,
    /// Present (and false) only when the stage cap was hit.
    #[serde(skip_serializing_if = "Option::is_none")]
    complete: Option<bool>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct MatchRow {
    seed: u64,
    certified_round: Option<usize>,
    survivors: usize,
    forfeits: usize,
    aborted: bool,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Tournament {
    matches: u64,
    ii_certified: usize,
    results: Vec<MatchRow>,
}

fn unsupported(format: Format, cmd: &str) -> CliError {
    CliError::Validation(format!("format {format:?} is not available for {cmd}").to_lowercase())
}

fn svg_scene(body: &ConvexBody, target: Option<&TargetSet>, copies: &[Homothet]) -> CliResult<String> {
    Ok(svg::render_scene(body, target, copies)?)
}

/// Run a non-serving command and render its output.
pub fn execute(cmd: &Command, format: Format) -> CliResult<String> {
    match cmd {
        Command::Body { body, seed } => {
            let b = load_body(body, *seed)?;
            match format {
                Format::Json => Ok(to_json(&b.to_spec())),
                Format::Svg => svg_scene(&b, None, &[Homothet::identity(b.dim())]),
                Format::Text => Ok(format!(
                    "{} ({:?}, dim {}): {} vertices, {} facets, inradius {:.6}, diameter {:.6}\n",
                    b.name(),
                    b.kind(),
                    b.dim(),
                    b.vertices().len(),
                    b.facets().len(),
                    b.inradius(),
                    b.diameter()
                )),
            }
        }
        Command::Target { target, seed } => {
            let t = load_target(target, *seed)?;
            match format {
                Format::Json => Ok(to_json(&t)),
                Format::Svg => {
                    let disk = generators::disk();
                    if t.dim() != Some(2) {
                        return Err(CliError::Validation("SVG output needs a planar target".into()));
                    }
                    svg_scene(&disk, Some(&t), &[])
                }
                Format::Text => Ok(format!("{}: {} points, eps {}\n", t.generator, t.len(), t.eps)),
            }
        }
        Command::Delta { body, point, seed } => {
            let b = load_body(body, *seed)?;
            let report = match point {
                Some(p) => b.delta_at(&parse_vector(p, "point")?)?,
                None => b.delta_global()?,
            };
            match format {
                Format::Json => Ok(to_json(&report)),
                Format::Text => Ok(format!("{}\n", report.value)),
                Format::Svg => Err(unsupported(format, "delta")),
            }
        }
        Command::Minhull { body, points, seed } => {
            let b = load_body(body, *seed)?;
            let pts: Vec<Vec<f64>> = parse_json(points, "points")?;
            let pts: Vec<Vector> = pts.into_iter().map(Vector::from_vec).collect();
            let h = b.min_enclosing_homothet(&pts)?;
            match format {
                Format::Json => Ok(to_line(&MinHull {
                    center: h.center.as_slice().to_vec(),
                    scale: h.scale,
                })),
                Format::Svg => {
                    let t = TargetSet::new(pts, 1.0, "points")?;
                    svg_scene(&b, Some(&t), &[h])
                }
                Format::Text => Ok(format!("{:?} {}\n", h.center.as_slice(), h.scale)),
            }
        }
        Command::Maxchord { body, direction, seed } => {
            let b = load_body(body, *seed)?;
            let (len, seg) = b.max_chord(&parse_vector(direction, "direction")?)?;
            match format {
                Format::Json => Ok(to_json(&json!({"length": len, "segment": seg}))),
                Format::Text => Ok(format!("{len}\n")),
                Format::Svg => Err(unsupported(format, "maxchord")),
            }
        }
        Command::Derive {
            body,
            target,
            eta,
            seed,
        } => {
            let b = load_body(body, *seed)?;
            let t = load_target(target, *seed)?;
            let (next, step) = derivative_step(&b, &t, *eta)?;
            match format {
                Format::Json => Ok(to_json(&json!({"derivative": next, "step": step}))),
                Format::Text => Ok(format!(
                    "kept {} of {}, removed {}\n",
                    step.kept.len(),
                    t.len(),
                    step.removed.len()
                )),
                Format::Svg => Err(unsupported(format, "derive")),
            }
        }
        Command::Rank {
            body,
            target,
            eta,
            stages,
            trace,
            seed,
        } => {
            let b = load_body(body, *seed)?;
            let t = load_target(target, *seed)?;
            let tr = rank_trace(&b, &t, *eta, *stages)?;
            match format {
                Format::Json if *trace => Ok(to_json(&tr)),
                Format::Json => Ok(to_line(&RankSummary {
                    rank: tr.rank(),
                    fixpoint_size: tr.fixpoint().len(),
                    complete: (!tr.complete).then_some(false),
                })),
                Format::Text => Ok(format!(
                    "rank {} fixpoint {} of {}{}\n",
                    tr.rank(),
                    tr.fixpoint().len(),
                    t.len(),
                    if tr.complete { "" } else { " (stage cap hit)" }
                )),
                Format::Svg => Err(unsupported(format, "rank")),
            }
        }
        Command::Play {
            p_i,
            p_ii,
            horizon,
            seed,
            body,
            target,
            tournament,
        } => {
            let b = load_body(body, Some(*seed))?;
            let t = load_target(target, Some(*seed))?;
            let si = strategy_by_tag(p_i, Player::I, &b, &t)?;
            let sii = strategy_by_tag(p_ii, Player::II, &b, &t)?;
            if let Some(n) = tournament {
                if format != Format::Json {
                    return Err(unsupported(format, "play --tournament"));
                }
                let results: Vec<_> = (0..*n)
                    .into_par_iter()
                    .map(|k| {
                        let cfg = MatchConfig {
                            horizon: *horizon,
                            seed: seed + k,
                        };
                        play_match(si.as_ref(), sii.as_ref(), &b, &t, cfg).map(|r| {
                            let (certified_round, survivors) = match &r.outcome {
                                Outcome::IiCertified { round } => (Some(*round), 0),
                                Outcome::Ongoing { survivors } | Outcome::HorizonReached { survivors } => {
                                    (None, survivors.len())
                                }
                            };
                            MatchRow {
                                seed: cfg.seed,
                                certified_round,
                                survivors,
                                forfeits: r.moves.iter().filter(|m| m.forfeit.is_some()).count(),
                                aborted: r.aborted.is_some(),
                            }
                        })
                    })
                    .collect::<Result<_, _>>()?;
                let certified = results.iter().filter(|r| r.certified_round.is_some()).count();
                return Ok(to_json(&Tournament {
                    matches: *n,
                    ii_certified: certified,
                    results,
                }));
            }
            let r = play_match(
                si.as_ref(),
                sii.as_ref(),
                &b,
                &t,
                MatchConfig {
                    horizon: *horizon,
                    seed: *seed,
                },
            )?;
            match format {
                Format::Json => Ok(r.to_json() + "\n"),
                Format::Svg => Ok(svg::render_game(&r.replay()?)?),
                Format::Text => Ok(format!(
                    "{} vs {}: {} after {} moves; survivors {:?}\n",
                    r.strategy_i,
                    r.strategy_ii,
                    match &r.outcome {
                        Outcome::IiCertified { round } => format!("II certified in round {round}"),
                        Outcome::Ongoing { survivors } | Outcome::HorizonReached { survivors } =>
                            format!("{} survivors at the horizon", survivors.len()),
                    },
                    r.moves.len(),
                    r.survivors_timeline
                )),
            }
        }
        Command::Extract {
            p_i,
            depth,
            seed,
            body,
            target,
        } => {
            let b = load_body(body, Some(*seed))?;
            let t = load_target(target, Some(*seed))?;
            let si = strategy_by_tag(p_i, Player::I, &b, &t)?;
            let tree = perfect_set_extract(si.as_ref(), &b, &t, *depth, *seed).map_err(|e| match e {
                ExtractionError::Invalid(e) => CliError::from(e),
                aborted @ ExtractionError::Aborted { .. } => CliError::Validation(aborted.to_string()),
            })?;
            match format {
                Format::Json => Ok(to_json(&tree)),
                Format::Svg => {
                    let mut copies = vec![tree.root.copy.clone()];
                    copies.extend(tree.leaves().into_iter().cloned());
                    svg_scene(&b, Some(&t), &copies)
                }
                Format::Text => Err(unsupported(format, "extract")),
            }
        }
        Command::Serve { .. } => Err(CliError::Other("serve is not a batch command".into())),
    }
}
