//! The `tgame` command line: every subcommand reads a game file and prints
//! a single JSON document (or Graphviz text for `export-dot`).
//!
//! Exit status is 0 on success, 2 for bad input and 3 when a well-formed
//! request cannot be computed. Errors are printed as
//! `{"code": ..., "message": ..., "context": ...}`.

pub mod dot;
pub mod format;
mod locate;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tgame::analysis::{self, Change, KeyPlayerMetric};
use tgame::equilibrium::{self, DEFAULT_BRUTE_MAX_AGENTS, DEFAULT_CORE_MAX_AGENTS};
use tgame::kcore::{max_complement_cohesive_within, max_q_cohesive_within};
use tgame::{
    ActionProfile, AgentId, AgentSet, LinearQuadraticParams, Network, Peel, Rational, TiePolicy,
};

use format::{number_json, render, Diagnostic, GameFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "tgame", version, about = "Equilibria and cores of threshold games on networks")]
pub struct Cli {
    /// Game file (JSON).
    #[arg(long, global = true)]
    pub game: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum On {
    #[value(name = "G")]
    G,
    #[value(name = "H")]
    H,
    #[value(name = "Htilde")]
    Htilde,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PeelOn {
    #[value(name = "G")]
    G,
    #[value(name = "H")]
    H,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Core,
    Brute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Ties {
    #[value(name = "0")]
    Zero,
    #[value(name = "1")]
    One,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Cascade,
    Intercentrality,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Highlight {
    MaxEq,
    MinEq,
    Core,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the file and report basic structure.
    Validate,
    /// The adjusted network with its shadow agent.
    Transform {
        #[arg(long, default_value = "1")]
        eta: String,
    },
    /// k-core with its deletion trace.
    Kcore {
        #[arg(long)]
        k: String,
        #[arg(long, value_enum, default_value = "G")]
        on: On,
    },
    /// Peeling value of every agent.
    Peel {
        #[arg(long, value_enum, default_value = "H")]
        on: PeelOn,
    },
    /// Maximal equilibrium.
    MaxEq,
    /// Minimal equilibrium.
    MinEq,
    /// Synchronous best-response dynamics.
    Dynamics {
        /// `zeros`, `ones`, or a profile file `{id: 0|1}`.
        #[arg(long, default_value = "zeros")]
        from: String,
        #[arg(long, value_enum, default_value = "0")]
        ties: Ties,
        #[arg(long)]
        trace: bool,
    },
    /// Every pure Nash equilibrium.
    AllEq {
        #[arg(long, value_enum, default_value = "core")]
        method: MethodArg,
        #[arg(long)]
        max_n: Option<usize>,
    },
    /// Agents with negative thresholds.
    Seeds,
    /// Agents with the largest removal effect.
    KeyPlayer {
        #[arg(long, value_enum, default_value = "cascade")]
        metric: MetricArg,
        /// Linear-quadratic parameters `{"a": {..}, "c": {..}, "phi": {..}}`.
        #[arg(long)]
        lq: Option<PathBuf>,
    },
    /// Peeling values, Bonacich centrality, cascade numbers and
    /// inter-centrality.
    Centrality {
        #[arg(long, conflicts_with = "lq")]
        phi: Option<String>,
        #[arg(long, conflicts_with = "lq")]
        a: Option<String>,
        #[arg(long)]
        lq: Option<PathBuf>,
    },
    /// Largest q-cohesive set, optionally inside a region.
    Cohesive {
        #[arg(long)]
        q: String,
        /// Comma-separated agent ids; defaults to every agent.
        #[arg(long)]
        within: Option<String>,
    },
    /// Extremal equilibria before and after a single change.
    Perturb {
        /// `SRC,DST,DELTA`
        #[arg(long, conflicts_with = "threshold", allow_hyphen_values = true)]
        edge: Option<String>,
        /// `ID,DELTA`
        #[arg(long, allow_hyphen_values = true)]
        threshold: Option<String>,
    },
    /// Graphviz text.
    ExportDot {
        #[arg(long, value_enum)]
        highlight: Option<Highlight>,
        /// Threshold of the core shown by `--highlight core`.
        #[arg(long, default_value = "1")]
        k: String,
    },
}

/// A failure ready to print.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub exit: i32,
    pub code: String,
    pub message: String,
    pub context: Value,
}

impl Failure {
    fn input(code: &str, message: impl Into<String>, context: Value) -> Self {
        Failure {
            exit: EXIT_INPUT,
            code: code.into(),
            message: message.into(),
            context,
        }
    }

    fn diagnostics(file: &Path, diags: Vec<Diagnostic>) -> Self {
        let first = diags.first().map(|d| d.message.clone()).unwrap_or_default();
        let code = diags.first().map(|d| d.code).unwrap_or("ParseError");
        Failure::input(
            code,
            format!("{}: {first}", file.display()),
            json!({
                "file": file.display().to_string(),
                "diagnostics": diags.iter().map(Diagnostic::to_json).collect::<Vec<_>>(),
            }),
        )
    }

    pub fn to_json(&self) -> Value {
        json!({"code": self.code, "message": self.message, "context": self.context})
    }
}

impl From<tgame::Error> for Failure {
    fn from(e: tgame::Error) -> Self {
        let context = match &e {
            tgame::Error::IndifferencePresent { agent, threshold } => json!({"agent": agent, "threshold": threshold}),
            tgame::Error::TooLarge { n, max } => json!({"n": n, "max": max}),
            tgame::Error::NonConvergent { rounds } => json!({"rounds": rounds}),
            _ => json!({}),
        };
        Failure {
            exit: if e.is_input_error() { EXIT_INPUT } else { EXIT_COMPUTE },
            code: e.code().into(),
            message: e.to_string(),
            context,
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| {
        Failure::input(
            "Io",
            format!("cannot read {}: {e}", path.display()),
            json!({"file": path.display().to_string()}),
        )
    })
}

pub fn load_game(path: &Path) -> Outcome<GameFile> {
    format::parse_game(&read(path)?).map_err(|d| Failure::diagnostics(path, d))
}

fn load_lq(path: &Path, net: &Network) -> Outcome<LinearQuadraticParams> {
    format::parse_lq(&read(path)?, net).map_err(|d| Failure::diagnostics(path, d))
}

fn rational(flag: &str, text: &str) -> Outcome<Rational> {
    text.parse().map_err(|e| {
        Failure::input(
            "BadNumber",
            format!("--{flag}: {e}"),
            json!({"flag": flag, "value": text}),
        )
    })
}

fn agent(net: &Network, label: &str) -> Outcome<AgentId> {
    net.agent(label.trim()).map_err(Failure::from)
}

fn labels(net: &Network, set: impl IntoIterator<Item = AgentId>) -> Value {
    Value::Array(set.into_iter().map(|i| Value::String(net.label(i).to_string())).collect())
}

fn active(net: &Network, x: &ActionProfile) -> Value {
    labels(net, x.active())
}

fn by_label<T>(net: &Network, values: impl IntoIterator<Item = T>, f: impl Fn(T) -> Value) -> Value {
    let map: BTreeMap<String, Value> = net.labels().iter().cloned().zip(values.into_iter().map(f)).collect();
    json!(map)
}

fn peel_json(p: &Peel) -> Value {
    Value::String(p.to_string())
}

fn extremal_json(net: &Network, e: &analysis::Extremal) -> Value {
    json!({"minimal": active(net, &e.minimal), "maximal": active(net, &e.maximal)})
}

fn split_args<'a>(flag: &str, text: &'a str, parts: usize) -> Outcome<Vec<&'a str>> {
    let v: Vec<&str> = text.splitn(parts, ',').collect();
    if v.len() != parts {
        return Err(Failure::input(
            "Usage",
            format!("--{flag} expects {parts} comma-separated values, got {text:?}"),
            json!({"flag": flag, "value": text}),
        ));
    }
    Ok(v)
}

fn parse_change(net: &Network, edge: Option<&str>, threshold: Option<&str>) -> Outcome<Change> {
    match (edge, threshold) {
        (Some(e), None) => {
            let v = split_args("edge", e, 3)?;
            Ok(Change::Edge {
                src: agent(net, v[0])?,
                dst: agent(net, v[1])?,
                delta: rational("edge", v[2])?,
            })
        }
        (None, Some(t)) => {
            let v = split_args("threshold", t, 2)?;
            Ok(Change::Threshold {
                agent: agent(net, v[0])?,
                delta: rational("threshold", v[1])?,
            })
        }
        _ => Err(Failure::input("Usage", "perturb needs exactly one of --edge or --threshold", json!({}))),
    }
}

fn change_json(net: &Network, c: &Change) -> Value {
    match c {
        Change::Edge { src, dst, delta } => {
            json!({"kind": "edge", "src": net.label(*src), "dst": net.label(*dst), "delta": number_json(delta)})
        }
        Change::Threshold { agent, delta } => {
            json!({"kind": "threshold", "agent": net.label(*agent), "delta": number_json(delta)})
        }
    }
}

/// Runs one command against an already loaded game.
pub fn execute(command: &Command, file: &GameFile) -> Outcome<String> {
    let game = &file.game;
    let net = game.network();
    let doc = match command {
        Command::Validate => {
            let indifference = equilibrium::find_indifference(game).map(|ind| {
                json!({
                    "agent": net.label(ind.agent),
                    "witness": ind.witness.map(|w| labels(net, w)),
                })
            });
            json!({
                "valid": true,
                "agents": game.len(),
                "edges": net.edge_count(),
                "strongly_connected": net.is_strongly_connected(),
                "seeds": labels(net, analysis::endogenous_seeds(game)),
                "indifference": indifference,
            })
        }
        Command::Transform { eta } => {
            let h = tgame::adjust(game, &rational("eta", eta)?)?;
            let hn = h.network();
            let nodes: Vec<Value> = hn
                .agents()
                .map(|i| {
                    let mut node = json!({"id": hn.label(i), "threshold": "1"});
                    if i == h.shadow() {
                        node["shadow"] = json!(true);
                    }
                    node
                })
                .collect();
            json!({
                "version": format::FORMAT_VERSION,
                "nodes": nodes,
                "edges": format::edges_json(hn),
                "metadata": {"shadow": hn.label(h.shadow()), "eta": number_json(h.eta())},
            })
        }
        Command::Kcore { k, on } => {
            let k = rational("k", k)?;
            let (target, protected) = match on {
                On::G => (net.clone(), AgentSet::new()),
                On::H | On::Htilde => {
                    let g = if *on == On::H { game.clone() } else { game.complementary() };
                    let h = tgame::adjust_default(&g)?;
                    let s = h.shadow();
                    (h.network().clone(), [s].into())
                }
            };
            let core = tgame::k_core(&target, &k, &protected);
            json!({
                "k": number_json(&k),
                "on": format!("{on:?}"),
                "members": labels(&target, core.members.iter().copied()),
                "trace": core.trace.iter().map(|r| labels(&target, r.iter().copied())).collect::<Vec<_>>(),
            })
        }
        Command::Peel { on } => {
            let peel = match on {
                PeelOn::G => tgame::peeling_values(net, &AgentSet::new()),
                PeelOn::H => {
                    let h = tgame::adjust_default(game)?;
                    tgame::peeling_values(h.network(), &[h.shadow()].into())
                }
            };
            json!({
                "on": format!("{on:?}"),
                "peel": by_label(net, &peel.as_slice()[..game.len()], peel_json),
            })
        }
        Command::MaxEq => json!({"active": active(net, &tgame::maximal_equilibrium(game)?)}),
        Command::MinEq => json!({"active": active(net, &tgame::minimal_equilibrium(game)?)}),
        Command::Dynamics { from, ties, trace } => {
            let start = match from.as_str() {
                "zeros" => ActionProfile::zeros(game.len()),
                "ones" => ActionProfile::ones(game.len()),
                path => {
                    let p = Path::new(path);
                    format::parse_profile(&read(p)?, net).map_err(|d| Failure::diagnostics(p, d))?
                }
            };
            let policy = match ties {
                Ties::Zero => TiePolicy::TiesTo0,
                Ties::One => TiePolicy::TiesTo1,
            };
            let t = tgame::br_dynamics(game, &start, policy)?;
            let mut doc = json!({"active": active(net, t.fixed_point()), "rounds": t.converged_at});
            if *trace {
                doc["trace"] = t.states.iter().map(|x| active(net, x)).collect();
            }
            doc
        }
        Command::AllEq { method, max_n } => {
            let eqs = match method {
                MethodArg::Core => tgame::all_equilibria_core(game, max_n.unwrap_or(DEFAULT_CORE_MAX_AGENTS))?,
                MethodArg::Brute => tgame::all_equilibria_brute(game, max_n.unwrap_or(DEFAULT_BRUTE_MAX_AGENTS))?,
            };
            json!({
                "count": eqs.len(),
                "equilibria": eqs.profiles.iter().map(|x| active(net, x)).collect::<Vec<_>>(),
                "minimal": eqs.minimum().map(|x| active(net, x)),
                "maximal": eqs.maximum().map(|x| active(net, x)),
            })
        }
        Command::Seeds => json!({"seeds": labels(net, analysis::endogenous_seeds(game))}),
        Command::KeyPlayer { metric, lq } => {
            let lq = lq.as_deref().map(|p| load_lq(p, net)).transpose()?;
            let (metric, values) = match metric {
                MetricArg::Cascade => (
                    KeyPlayerMetric::Cascade,
                    by_label(net, analysis::cascade_numbers(game)?, |v| json!(v)),
                ),
                MetricArg::Intercentrality => {
                    let lq = lq.as_ref().ok_or_else(|| {
                        Failure::from(tgame::Error::InvalidParams(
                            "--metric intercentrality needs --lq".into(),
                        ))
                    })?;
                    let c = analysis::intercentrality(net, &lq.phi, &lq.a)?;
                    (KeyPlayerMetric::Intercentrality, by_label(net, c.iter(), number_json))
                }
            };
            let keys = analysis::key_players(game, metric, lq.as_ref())?;
            json!({
                "metric": format!("{metric:?}").to_lowercase(),
                "key_players": labels(net, keys),
                "values": values,
            })
        }
        Command::Centrality { phi, a, lq } => {
            let n = game.len();
            let (phi, a) = match lq {
                Some(p) => {
                    let lq = load_lq(p, net)?;
                    (lq.phi, lq.a)
                }
                None => {
                    let phi = rational("phi", phi.as_deref().unwrap_or("0"))?;
                    let a = rational("a", a.as_deref().unwrap_or("1"))?;
                    (vec![phi; n], vec![a; n])
                }
            };
            let r = analysis::centrality_report(game, &phi, &a)?;
            json!({
                "peel": by_label(net, r.peel.iter(), number_json),
                "bonacich": by_label(net, r.bonacich.iter(), number_json),
                "cascade_number": by_label(net, r.cascade_number.iter(), |v| json!(v)),
                "intercentrality": by_label(net, r.intercentrality.iter(), number_json),
                "spectral_radius": r.spectral_radius,
            })
        }
        Command::Cohesive { q, within } => {
            let q = rational("q", q)?;
            let region: AgentSet = match within {
                Some(list) => list
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|l| agent(net, l))
                    .collect::<Outcome<_>>()?,
                None => net.agents().collect(),
            };
            json!({
                "q": number_json(&q),
                "within": labels(net, region.iter().copied()),
                "cohesive": labels(net, max_q_cohesive_within(net, &q, &region)?),
                "complement_cohesive": labels(net, max_complement_cohesive_within(net, &q, &region)?),
            })
        }
        Command::Perturb { edge, threshold } => {
            let change = parse_change(net, edge.as_deref(), threshold.as_deref())?;
            let r = analysis::perturb(game, change)?;
            json!({
                "change": change_json(net, &r.change),
                "before": extremal_json(net, &r.before),
                "after": extremal_json(net, &r.after),
                "affected": labels(net, r.affected.iter().copied()),
                "monotone": r.monotone,
            })
        }
        Command::ExportDot { highlight, k } => {
            let set = match highlight {
                None => None,
                Some(Highlight::MaxEq) => Some(tgame::maximal_equilibrium(game)?.active()),
                Some(Highlight::MinEq) => Some(tgame::minimal_equilibrium(game)?.active()),
                Some(Highlight::Core) => Some(tgame::k_core(net, &rational("k", k)?, &AgentSet::new()).members),
            };
            return Ok(dot::to_dot(net, set.as_ref()));
        }
    };
    Ok(render(&doc))
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the exit status and everything meant for standard output.
pub fn run<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return (EXIT_OK, e.to_string());
            }
            let f = Failure::input("Usage", e.kind().to_string(), json!({"detail": e.to_string()}));
            return (f.exit, render(&f.to_json()));
        }
    };
    let result = match &cli.game {
        None => Err(Failure::input("Usage", "--game is required", json!({}))),
        Some(path) => load_game(path).and_then(|file| execute(&cli.command, &file)),
    };
    match result {
        Ok(out) => (EXIT_OK, out),
        Err(f) => (f.exit, render(&f.to_json())),
    }
}
