//! `berklocus` command-line front end.
//!
//! Exit codes: 0 success, 1 parse or usage error, 2 the field extension or
//! precision budget was exhausted, 3 a check failed or an internal error
//! occurred.

mod dot;
mod input;
mod report;
mod verify;

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use berklocus::berkmap::{identification_check, reduce_at};
use berklocus::exactfield::Q;
use berklocus::fixlocus::{classical_fixed_points, explore, ExploreConfig, FixLocus};
use berklocus::oracle::{fixtures, random_split_map};
use berklocus::residue::holomorphic_index_check;
use berklocus::{Error, RationalMapK, TypeIIPoint};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use input::{parse_center, parse_map, parse_rational, MapInput, ParseError};
use verify::{all_pass, Check, Status};

#[derive(Parser)]
#[command(name = "berklocus", version, about = "Fixed-point loci of rational maps on the Berkovich line")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Output format; `tree` defaults to dot, everything else to text.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Largest ramification index the explorer may move to.
    #[arg(long, global = true)]
    n_max: Option<usize>,
    /// Largest unramified degree the explorer may move to.
    #[arg(long, global = true)]
    k_max: Option<usize>,
    /// Cap on analysed rays per exploration.
    #[arg(long, global = true)]
    ray_budget: Option<usize>,
    /// Starting precision (in valuation units) for approximate roots.
    #[arg(long, global = true)]
    precision: Option<String>,
    /// Seed for randomized suites.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Parameter override `name=value`, repeatable.
    #[arg(long = "param", global = true, value_parser = param_kv)]
    params: Vec<(String, String)>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Cmd {
    /// Full analysis: classical points, components, weights, checks.
    Analyze(InputArgs),
    /// Reduction of the map at a type II point.
    ReduceAt(PointArgs),
    /// Tangent map at a type II point with per-direction checks.
    Tangent(PointArgs),
    /// The annotated skeleton of the locus.
    Tree(InputArgs),
    /// Crucial points and their weights.
    Weights(InputArgs),
    /// Run the invariant suite on one map or on the built-in fixtures.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Map description file, `-` for stdin.
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
struct PointArgs {
    #[arg(long)]
    input: PathBuf,
    /// Centre of the point, as a coefficient expression.
    #[arg(long, allow_hyphen_values = true)]
    center: String,
    /// `s = -log_p(radius)`, a rational.
    #[arg(long, allow_hyphen_values = true)]
    s: String,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, required_unless_present = "suite", conflicts_with = "suite")]
    input: Option<PathBuf>,
    /// Run the built-in fixture suite instead of one map.
    #[arg(long)]
    suite: bool,
}

fn param_kv(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or("expected name=value")?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

enum Failure {
    Parse(String),
    Budget(String),
    Internal(String),
    /// Output already printed; some check failed.
    Checks,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 1,
            Failure::Budget(_) => 2,
            Failure::Internal(_) | Failure::Checks => 3,
        }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Parse(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NeedsExtension { .. } | Error::ExplorationIncomplete(_) => Failure::Budget(e.to_string()),
            e => Failure::Internal(e.to_string()),
        }
    }
}

/// Defaults from the file named by `BERKLOCUS_CONFIG`, overridden by flags.
struct Settings {
    explore: ExploreConfig,
    seed: u64,
    format: Option<Format>,
    params: Vec<(String, String)>,
}

fn settings(cli: &Cli) -> Result<Settings, Failure> {
    let mut cfg = ExploreConfig::default();
    let mut seed = 0u64;
    let mut format = None;
    if let Ok(path) = std::env::var("BERKLOCUS_CONFIG") {
        let text = std::fs::read_to_string(&path).map_err(|e| Failure::Parse(format!("{path}: {e}")))?;
        let config_err = |l: usize, k: &str, m: String| Failure::Parse(format!("{path}: line {l}, field `{k}`: {m}"));
        for (l, k, v) in input::key_values(&text).map_err(|e| Failure::Parse(format!("{path}: {e}")))? {
            let int = || v.parse::<usize>().map_err(|_| config_err(l, &k, format!("`{v}` is not an integer")));
            match k.as_str() {
                "n_max" => cfg.n_max = int()?,
                "k_max" => cfg.k_max = int()?,
                "ray_budget" => cfg.ray_budget = int()?,
                "precision_rounds" => cfg.precision_rounds = int()?,
                "seed" => seed = int()? as u64,
                "precision" => cfg.precision = parse_rational(&v).map_err(|m| config_err(l, &k, m))?,
                "format" => {
                    format = Some(Format::from_str(&v, true).map_err(|m| config_err(l, &k, m))?);
                }
                _ => return Err(config_err(l, &k, "unknown setting".into())),
            }
        }
    }
    if let Some(n) = cli.n_max {
        cfg.n_max = n;
    }
    if let Some(k) = cli.k_max {
        cfg.k_max = k;
    }
    if let Some(r) = cli.ray_budget {
        cfg.ray_budget = r;
    }
    if let Some(p) = &cli.precision {
        cfg.precision = parse_rational(p).map_err(|m| Failure::Parse(format!("--precision: {m}")))?;
    }
    Ok(Settings {
        explore: cfg,
        seed: cli.seed.unwrap_or(seed),
        format: cli.format.or(format),
        params: cli.params.clone(),
    })
}

fn read_input(path: &PathBuf, st: &Settings) -> Result<MapInput, Failure> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::Parse(format!("stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?
    };
    parse_map(&text, &st.params).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

/// Writes to stdout, ignoring a closed pipe.
fn out(s: &str) {
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}

fn emit(format: Format, command: &str, body: Value, text: String) -> Result<(), Failure> {
    match format {
        Format::Json => out(&format!("{}\n", serde_json::to_string_pretty(&report::envelope(command, body)).expect("serializable"))),
        Format::Text => out(&text),
        Format::Dot => return Err(Failure::Parse(format!("--format dot is only available for `tree`, not `{command}`"))),
    }
    Ok(())
}

/// Exploration with the failure rendered as a report diagnostic.
fn explore_or_report(f: &RationalMapK, st: &Settings, command: &str, format: Format) -> Result<Option<FixLocus>, Failure> {
    match explore(f, &st.explore) {
        Ok(l) => Ok(Some(l)),
        Err(Error::IdentityMap) => {
            let msg = "the map is the identity: every point is fixed";
            emit(
                format,
                command,
                json!({ "map": report::map_json(f), "identity": true, "diagnostics": [msg] }),
                format!("{msg}\n"),
            )?;
            Ok(None)
        }
        Err(e) => {
            let failure = Failure::from(e.clone());
            if let Failure::Budget(msg) = &failure {
                let classical = classical_fixed_points(f, &st.explore.precision)
                    .map(|v| v.iter().map(report::classical_json).collect::<Vec<_>>())
                    .ok();
                let diag = match &e {
                    Error::NeedsExtension { n, k } => json!({ "error": "needs_extension", "n": n, "k": k, "message": msg }),
                    _ => json!({ "error": "exploration_incomplete", "message": msg }),
                };
                if format == Format::Json {
                    emit(format, command, json!({ "map": report::map_json(f), "classical": classical, "diagnostics": [diag] }), String::new())?;
                }
            }
            Err(failure)
        }
    }
}

fn point_of(m: &MapInput, a: &PointArgs) -> Result<TypeIIPoint, Failure> {
    let center = parse_center(&m.ctx, &m.params, &a.center)?;
    let s: Q = parse_rational(&a.s).map_err(|e| Failure::Parse(format!("--s: {e}")))?;
    Ok(TypeIIPoint::new(center, s))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let st = settings(&cli)?;
    let fmt = |default: Format| st.format.unwrap_or(default);
    match &cli.cmd {
        Cmd::Analyze(a) => {
            let m = read_input(&a.input, &st)?;
            let format = fmt(Format::Text);
            let Some(l) = explore_or_report(&m.map, &st, "analyze", format)? else { return Ok(()) };
            let checks = verify::locus_checks(&l);
            let mut body = report::locus_json(&l, &checks);
            body["map"] = report::map_json(&m.map);
            let text = format!("map {}\n{}", m.map, report::locus_text(&l, &checks));
            emit(format, "analyze", body, text)?;
        }
        Cmd::ReduceAt(a) => {
            let m = read_input(&a.input, &st)?;
            let x = point_of(&m, a)?;
            let ld = reduce_at(&m.map, &x)?;
            let body = json!({ "map": report::map_json(&m.map), "local_data": report::local_data_json(&ld) });
            emit(fmt(Format::Text), "reduce-at", body, report::local_data_text(&ld))?;
        }
        Cmd::Tangent(a) => {
            let m = read_input(&a.input, &st)?;
            let x = point_of(&m, a)?;
            let ld = reduce_at(&m.map, &x)?;
            let mut checks = Vec::new();
            if ld.is_fixed && !ld.is_identity() {
                for d in &ld.directions {
                    let ok = identification_check(&m.map, &x, &d.location);
                    checks.push(Check {
                        name: "identification".into(),
                        status: if ok == Ok(true) { Status::Pass } else { Status::Fail },
                        detail: format!("direction {}: {ok:?}", d.location),
                    });
                }
            }
            if let Some(r) = &ld.reduced_map {
                let (status, detail) = match holomorphic_index_check(r) {
                    Ok(true) => (Status::Pass, "index sum is 1".to_string()),
                    Ok(false) => (Status::Fail, "index sum is not 1".to_string()),
                    Err(e) => (Status::Skipped, format!("skipped (precondition): {e}")),
                };
                checks.push(Check { name: "index-formula".into(), status, detail });
            }
            let body = json!({
                "map": report::map_json(&m.map),
                "local_data": report::local_data_json(&ld),
                "checks": report::checks_json(&checks),
            });
            let text = format!("{}checks:\n{}", report::local_data_text(&ld), report::checks_text(&checks));
            emit(fmt(Format::Text), "tangent", body, text)?;
            if !all_pass(&checks) {
                return Err(Failure::Checks);
            }
        }
        Cmd::Tree(a) => {
            let m = read_input(&a.input, &st)?;
            let format = fmt(Format::Dot);
            let Some(l) = explore_or_report(&m.map, &st, "tree", if format == Format::Dot { Format::Text } else { format })?
            else {
                return Ok(());
            };
            match format {
                Format::Dot => out(&dot::render(&l)),
                _ => {
                    let g = dot::graph(&l);
                    let body = json!({
                        "map": report::map_json(&m.map),
                        "nodes": g.nodes.iter().map(|n| json!({ "id": n.id, "label": n.label, "class": n.class })).collect::<Vec<_>>(),
                        "edges": g.edges.iter().map(|e| json!({ "from": e.from, "to": e.to, "label": e.label, "class": e.class })).collect::<Vec<_>>(),
                    });
                    let mut text: String = g.nodes.iter().map(|n| format!("{} {} [{}]\n", n.id, n.label, n.class)).collect();
                    text.extend(g.edges.iter().map(|e| format!("{} -- {} {} [{}]\n", e.from, e.to, e.label, e.class)));
                    emit(format, "tree", body, text)?;
                }
            }
        }
        Cmd::Weights(a) => {
            let m = read_input(&a.input, &st)?;
            let format = fmt(Format::Text);
            let Some(l) = explore_or_report(&m.map, &st, "weights", format)? else { return Ok(()) };
            emit(format, "weights", json!({ "map": report::map_json(&m.map), "weights": report::weights_json(&l) }), report::weights_text(&l))?;
        }
        Cmd::Verify(v) => return verify_cmd(v, &st, fmt(Format::Text)),
    }
    Ok(())
}

/// Every check on one map; `Err` carries a budget or internal failure.
fn verify_map(f: &RationalMapK, st: &Settings) -> Result<(Option<FixLocus>, Vec<Check>), Error> {
    let locus = match explore(f, &st.explore) {
        Ok(l) => Some(l),
        Err(Error::IdentityMap) => None,
        Err(e) => return Err(e),
    };
    let mut checks = Vec::new();
    if let Some(l) = &locus {
        checks.extend(verify::locus_checks(l));
        checks.extend(verify::local_checks(l));
    }
    if f.degree() == 1 {
        checks.extend(verify::moebius_checks(f, locus.as_ref()));
    }
    Ok((locus, checks))
}

fn verify_cmd(v: &VerifyArgs, st: &Settings, format: Format) -> Result<(), Failure> {
    if let Some(path) = &v.input {
        let m = read_input(path, st)?;
        let (_, checks) = verify_map(&m.map, st)?;
        let ok = all_pass(&checks);
        let body = json!({ "map": report::map_json(&m.map), "passed": ok, "checks": report::checks_json(&checks) });
        let text = format!("{}{}\n", report::checks_text(&checks), if ok { "PASS" } else { "FAIL" });
        emit(format, "verify", body, text)?;
        return if ok { Ok(()) } else { Err(Failure::Checks) };
    }
    let mut rows = Vec::new();
    let mut text = String::new();
    let mut all_ok = true;
    let mut record = |name: String, ok: bool, detail: String, checks: &[Check]| {
        all_ok &= ok;
        text.push_str(&format!("{} {name}: {detail}\n", if ok { "PASS" } else { "FAIL" }));
        rows.push(json!({ "name": name, "passed": ok, "detail": detail, "checks": report::checks_json(checks) }));
    };
    for fx in fixtures() {
        let f = fx.map().map_err(|e| Failure::Internal(format!("fixture {}: {e}", fx.name)))?;
        let x = &fx.expected;
        match verify_map(&f, st) {
            Err(Error::NeedsExtension { n, k }) if x.needs_extension => {
                record(fx.name.clone(), true, format!("needs extension n = {n}, k = {k}, as expected"), &[])
            }
            Ok((None, checks)) if x.identity => {
                let ok = all_pass(&checks);
                record(fx.name.clone(), ok, "identity map".into(), &checks)
            }
            Ok((Some(l), checks)) => {
                let mism = x.mismatches(&l);
                let ok = all_pass(&checks) && mism.is_empty();
                let detail = if mism.is_empty() { format!("{} checks", checks.len()) } else { mism.join("; ") };
                record(fx.name.clone(), ok, detail, &checks)
            }
            r => record(fx.name.clone(), false, format!("unexpected outcome {:?}", r.err()), &[]),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(st.seed);
    for i in 0..20 {
        let p = [5u64, 7, 11][i % 3];
        let f = random_split_map(&mut rng, p, 2 + i % 3);
        match verify_map(&f, st) {
            Ok((_, checks)) => {
                let ok = all_pass(&checks);
                record(format!("random {i} [{f}] p = {p}"), ok, format!("{} checks", checks.len()), &checks)
            }
            Err(e) => record(format!("random {i} [{f}] p = {p}"), false, e.to_string(), &[]),
        }
    }
    let body = json!({ "suite": rows, "seed": st.seed.to_string(), "passed": all_ok });
    emit(format, "verify", body, format!("{text}{}\n", if all_ok { "ALL PASS" } else { "FAILURES" }))?;
    if all_ok {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Parse(m) => eprintln!("parse error: {m}"),
                Failure::Budget(m) => eprintln!("{m}"),
                Failure::Internal(m) => eprintln!("internal error: {m}"),
                Failure::Checks => eprintln!("some checks failed"),
            }
            ExitCode::from(f.code())
        }
    }
}
