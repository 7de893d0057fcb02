//! Command-line front end.
//!
//! Every run resolves its parameters from the command line, then an optional
//! `key = value` config file, then built-in defaults, and echoes the resolved
//! raw strings back in the output header. Exit codes: 0 success, 1 usage,
//! 2 computation error, 3 verification failure.
//!
//! If `SINGLIFT_CACHE_DIR` is set, successful `lift` and `decompose`
//! results are stored there and reused for identical parameters.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::classical::{delta, eisenstein, j_invariant, miller_basis, weakly_holomorphic};
use crate::error::Error;
use crate::hilbert::{decompose_lift, PipelineConfig};
use crate::lift::lift_unimodular;
use crate::opcalc::{run_suite, Report};
use crate::rat::{parse_q, Q};

pub const CACHE_ENV: &str = "SINGLIFT_CACHE_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_COMPUTE: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "singlift", version, about = "Singular theta lifts: q-expansions, pole clearing and operator identity checks")]
struct Cli {
    /// text file of `key = value` lines overriding the defaults
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// text or json
    #[arg(long, global = true)]
    format: Option<String>,
    /// write the output here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// q-expansions of classical forms: eis, delta, j, wh, basis
    Forms(FormsArgs),
    /// Fourier expansion of the lift
    Lift {
        #[command(subcommand)]
        kind: LiftKind,
    },
    /// lift, clear poles and decompose in the tensor basis
    Decompose(DecomposeArgs),
    /// run operator identity suites
    Verify(VerifyArgs),
}

#[derive(Subcommand, Debug)]
enum LiftKind {
    /// the unimodular signature (2,2) case
    Unimodular(LiftArgs),
}

#[derive(Args, Debug)]
struct FormsArgs {
    kind: String,
    #[arg(long, allow_hyphen_values = true)]
    weight: Option<String>,
    #[arg(long)]
    prec: Option<String>,
    /// comma separated d:c pairs, c the coefficient of q^-d
    #[arg(long)]
    principal: Option<String>,
}

#[derive(Args, Debug)]
struct LiftArgs {
    #[arg(long, allow_hyphen_values = true)]
    m: Option<String>,
    #[arg(long)]
    principal: Option<String>,
    /// exponent bounds NQ NP of the regular part
    #[arg(long = "box", num_args = 2, allow_hyphen_values = true)]
    bx: Option<Vec<String>>,
}

#[derive(Args, Debug)]
struct DecomposeArgs {
    #[arg(long, allow_hyphen_values = true)]
    m: Option<String>,
    #[arg(long)]
    principal: Option<String>,
    #[arg(long = "delta-power")]
    delta_power: Option<String>,
    #[arg(long)]
    guard: Option<String>,
    /// side of the certified box
    #[arg(long = "box")]
    bx: Option<String>,
    /// debug: starve the input form of this many coefficients
    #[arg(long = "debug-guard")]
    debug_guard: Option<String>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    suite: Option<String>,
    /// comma separated list of b
    #[arg(long)]
    b: Option<String>,
    /// comma separated list or inclusive range lo..hi
    #[arg(long, allow_hyphen_values = true)]
    m: Option<String>,
}

#[derive(Debug)]
enum Fail {
    Usage(String),
    Compute(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidWeight(_) => Fail::Usage(e.to_string()),
            e => Fail::Compute(e),
        }
    }
}

type CliResult<T> = std::result::Result<T, Fail>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(Fail::Usage(msg.into()))
}

/// Parsed `key = value` file. Blank lines and `#` comments are skipped;
/// underscores in keys count as dashes.
pub fn parse_config(text: &str) -> std::result::Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(format!("config line {}: expected key = value", i + 1));
        };
        let k = k.trim().replace('_', "-");
        if k.is_empty() {
            return Err(format!("config line {}: empty key", i + 1));
        }
        out.insert(k, v.trim().to_string());
    }
    Ok(out)
}

/// Principal part "d:c,d:c" as d -> c.
pub fn parse_principal(s: &str) -> std::result::Result<BTreeMap<i64, Q>, String> {
    let mut out = BTreeMap::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (d, c) = part.split_once(':').ok_or_else(|| format!("principal part entry {part:?} is not d:c"))?;
        let d: i64 = d.trim().parse().map_err(|_| format!("bad index {d:?} in principal part"))?;
        let c = parse_q(c).ok_or_else(|| format!("bad coefficient {c:?} in principal part"))?;
        if out.insert(d, c).is_some() {
            return Err(format!("index {d} repeated in principal part"));
        }
    }
    Ok(out)
}

/// "2,3,4" or "-2..4" (inclusive).
pub fn parse_int_list(s: &str) -> std::result::Result<Vec<i64>, String> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let a: i64 = a.trim().parse().map_err(|_| format!("bad range {s:?}"))?;
        let b: i64 = b.trim().trim_start_matches('=').parse().map_err(|_| format!("bad range {s:?}"))?;
        if a > b {
            return Err(format!("empty range {s:?}"));
        }
        return Ok((a..=b).collect());
    }
    let v: std::result::Result<Vec<i64>, _> = s.split(',').map(|x| x.trim().parse::<i64>()).collect();
    match v {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(format!("bad integer list {s:?}")),
    }
}

/// Resolution of parameters against the config file, in the order the
/// command asks for them.
struct Resolver {
    config: BTreeMap<String, String>,
    used: Vec<(String, String)>,
}

impl Resolver {
    fn get(&mut self, key: &str, cli: Option<String>, default: Option<&str>) -> CliResult<String> {
        let v = cli.or_else(|| self.config.get(key).cloned()).or_else(|| default.map(str::to_string));
        match v {
            Some(v) => {
                self.used.push((key.to_string(), v.clone()));
                Ok(v)
            }
            None => usage(format!("missing required parameter --{key}")),
        }
    }

    fn opt(&mut self, key: &str, cli: Option<String>) -> Option<String> {
        let v = cli.or_else(|| self.config.get(key).cloned());
        if let Some(v) = &v {
            self.used.push((key.to_string(), v.clone()));
        }
        v
    }

    fn int(&mut self, key: &str, cli: Option<String>, default: Option<&str>) -> CliResult<i64> {
        let v = self.get(key, cli, default)?;
        v.trim().parse().or_else(|_| usage(format!("--{key} expects an integer, got {v:?}")))
    }

    fn opt_int(&mut self, key: &str, cli: Option<String>) -> CliResult<Option<i64>> {
        match self.opt(key, cli) {
            Some(v) => v.trim().parse().map(Some).or_else(|_| usage(format!("--{key} expects an integer, got {v:?}"))),
            None => Ok(None),
        }
    }

    fn principal(&mut self, cli: Option<String>) -> CliResult<BTreeMap<i64, Q>> {
        let v = self.get("principal", cli, None)?;
        parse_principal(&v).map_err(Fail::Usage)
    }

    /// Keys in the config file the command never asked for.
    fn unused_config(&self, allowed: &[&str]) -> Option<String> {
        self.config.keys().find(|k| !allowed.contains(&k.as_str()) && !self.used.iter().any(|(u, _)| u == *k)).cloned()
    }
}

struct Outcome {
    command: String,
    result: Value,
    text: String,
    verified: bool,
}

fn positive(key: &str, v: i64) -> CliResult<i64> {
    if v < 1 {
        usage(format!("--{key} must be at least 1, got {v}"))
    } else {
        Ok(v)
    }
}

fn cmd_forms(a: FormsArgs, r: &mut Resolver) -> CliResult<Outcome> {
    r.used.push(("kind".into(), a.kind.clone()));
    let prec = positive("prec", r.int("prec", a.prec, Some("10"))?)?;
    let series = match a.kind.as_str() {
        "eis" => vec![eisenstein(r.int("weight", a.weight, None)?, prec)?.series],
        "delta" => vec![delta(prec).series],
        "j" => vec![j_invariant(prec).series],
        "wh" => {
            let w = r.int("weight", a.weight, None)?;
            let p = r.principal(a.principal)?;
            vec![weakly_holomorphic(w, &p, prec)?.series]
        }
        "basis" => miller_basis(r.int("weight", a.weight, None)?, prec)?,
        other => return usage(format!("unknown form kind {other:?}; expected eis, delta, j, wh or basis")),
    };
    let text = series.iter().map(|s| s.render("q")).collect::<Vec<_>>().join("\n");
    let result = if a.kind == "basis" {
        json!({ "basis": series.iter().map(|s| s.to_json()).collect::<Vec<_>>() })
    } else {
        json!({ "series": series[0].to_json(), "rendered": series[0].render("q") })
    };
    Ok(Outcome { command: format!("forms {}", a.kind), result, text, verified: true })
}

fn check_m(m: i64) -> CliResult<i64> {
    if m < 0 {
        return Err(Fail::Compute(Error::NegativeM(m)));
    }
    if m % 2 != 0 {
        return Err(Fail::Compute(Error::OddM(m)));
    }
    Ok(m)
}

fn cmd_lift(a: LiftArgs, r: &mut Resolver) -> CliResult<Outcome> {
    let m = check_m(r.int("m", a.m, None)?)?;
    let p = r.principal(a.principal)?;
    let bx = r.get("box", a.bx.map(|v| v.join(" ")), Some("8 8"))?;
    let dims: Vec<i64> = match bx.split_whitespace().map(str::parse).collect::<std::result::Result<Vec<i64>, _>>() {
        Ok(v) if v.len() == 2 => v,
        _ => return usage(format!("--box expects two integers, got {bx:?}")),
    };
    let (nq, np) = (positive("box", dims[0])?, positive("box", dims[1])?);
    cached("lift", r, || {
        let f = weakly_holomorphic(-m, &p, (nq - 1) * (np - 1) + 1)?;
        let e = lift_unimodular(&f, m, nq, np)?;
        let sing: Vec<String> = e.singular_terms.iter().map(|t| format!("({},{},{},{})", t.d, t.k, t.l, t.coefficient)).collect();
        let mut text = format!("singular: [{}]\nregular (a b coefficient):", sing.join(", "));
        for ((i, j), c) in e.regular.terms() {
            text.push_str(&format!("\n{i} {j} {c}"));
        }
        Ok((e.to_json(), text))
    })
    .map(|(result, text)| Outcome { command: "lift unimodular".into(), result, text, verified: true })
}

fn cmd_decompose(a: DecomposeArgs, r: &mut Resolver) -> CliResult<Outcome> {
    let m = check_m(r.int("m", a.m, None)?)?;
    let p = r.principal(a.principal)?;
    let dp = r.int("delta-power", a.delta_power, None)?;
    if dp < 0 {
        return usage("--delta-power must be non-negative");
    }
    let mut cfg = PipelineConfig::new(m, p, dp as u32);
    cfg.guard = r.opt_int("guard", a.guard)?;
    cfg.box_size = r.opt_int("box", a.bx)?.map(|b| positive("box", b)).transpose()?;
    cfg.input_deficit = r.opt_int("debug-guard", a.debug_guard)?;
    cached("decompose", r, || {
        let c = decompose_lift(&cfg)?;
        let table = c.decomposition.render();
        let mut result = c.to_json();
        result["table"] = json!(table);
        let text = format!("{table}\n(weight {}, certified at guards {} and {} on a {}x{} box)", cfg.weight(), c.guards.0, c.guards.1, c.final_box, c.final_box);
        Ok((result, text))
    })
    .map(|(result, text)| Outcome { command: "decompose".into(), result, text, verified: true })
}

fn cmd_verify(a: VerifyArgs, r: &mut Resolver) -> CliResult<Outcome> {
    let suite = r.get("suite", a.suite, Some("all"))?;
    if suite != "all" && !crate::opcalc::suites::SUITES.contains(&suite.as_str()) {
        return usage(format!("unknown suite {suite:?}; expected all or one of {}", crate::opcalc::suites::SUITES.join(", ")));
    }
    let bs = parse_int_list(&r.get("b", a.b, Some("2,3,4"))?).map_err(Fail::Usage)?;
    if let Some(b) = bs.iter().find(|b| !(1..=8).contains(*b)) {
        return usage(format!("b = {b} outside 1..8"));
    }
    let bs: Vec<usize> = bs.into_iter().map(|b| b as usize).collect();
    let ms = parse_int_list(&r.get("m", a.m, Some("-2..4"))?).map_err(Fail::Usage)?;
    let reports = run_suite(&suite, &bs, &ms)?;
    let passed = reports.iter().all(Report::passed);
    let mut text = String::new();
    for rep in &reports {
        for c in &rep.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            text.push_str(&format!("{status} {}/{} [{}] {} cases", rep.suite, c.id, c.params, c.cases));
            if let Some(ce) = &c.counterexample {
                text.push_str(&format!(": {ce}"));
            }
            text.push('\n');
        }
    }
    let total: usize = reports.iter().map(Report::total_cases).sum();
    text.push_str(&format!("{} ({total} cases)", if passed { "all identities hold" } else { "some identities fail" }));
    let result = json!({ "passed": passed, "cases": total, "reports": reports });
    Ok(Outcome { command: "verify".into(), result, text, verified: passed })
}

fn cache_path(command: &str, r: &Resolver) -> Option<PathBuf> {
    let dir = std::env::var_os(CACHE_ENV)?;
    let key: String = std::iter::once(command.to_string())
        .chain(r.used.iter().map(|(k, v)| format!("{k}={v}")))
        .collect::<Vec<_>>()
        .join("_")
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '=' || c == '-' { c } else { '_' })
        .collect();
    Some(Path::new(&dir).join(format!("{key}.json")))
}

fn cached(command: &str, r: &Resolver, run: impl FnOnce() -> CliResult<(Value, String)>) -> CliResult<(Value, String)> {
    let path = cache_path(command, r);
    if let Some(p) = &path {
        if let Some(hit) = std::fs::read_to_string(p).ok().and_then(|s| serde_json::from_str::<Value>(&s).ok()) {
            if let (Some(res), Some(text)) = (hit.get("result"), hit.get("text").and_then(Value::as_str)) {
                return Ok((res.clone(), text.to_string()));
            }
        }
    }
    let (result, text) = run()?;
    if let Some(p) = &path {
        // a cache that cannot be written is not an error
        let _ = std::fs::create_dir_all(p.parent().unwrap_or(Path::new(".")));
        let _ = std::fs::write(p, serde_json::to_string(&json!({ "result": result, "text": text })).unwrap_or_default());
    }
    Ok((result, text))
}

fn render(out: &Outcome, used: &[(String, String)], json_format: bool) -> String {
    if json_format {
        let params: serde_json::Map<String, Value> = used.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let doc = json!({ "command": out.command, "parameters": params, "result": out.result });
        serde_json::to_string_pretty(&doc).unwrap() + "\n"
    } else {
        let mut s = format!("# singlift {}\n", out.command);
        for (k, v) in used {
            s.push_str(&format!("# {k} = {v}\n"));
        }
        s + &out.text + "\n"
    }
}

fn run(cli: Cli) -> CliResult<bool> {
    let config = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).or_else(|e| usage(format!("cannot read config {}: {e}", p.display())))?;
            parse_config(&text).map_err(Fail::Usage)?
        }
        None => BTreeMap::new(),
    };
    let mut r = Resolver { config, used: Vec::new() };
    let format = cli.format.or_else(|| r.config.get("format").cloned()).unwrap_or_else(|| "text".into());
    let json_format = match format.as_str() {
        "json" => true,
        "text" => false,
        f => return usage(format!("unknown format {f:?}; expected text or json")),
    };
    let output = cli.output.or_else(|| r.config.get("output").map(PathBuf::from));
    let out = match cli.cmd {
        Cmd::Forms(a) => cmd_forms(a, &mut r)?,
        Cmd::Lift { kind: LiftKind::Unimodular(a) } => cmd_lift(a, &mut r)?,
        Cmd::Decompose(a) => cmd_decompose(a, &mut r)?,
        Cmd::Verify(a) => cmd_verify(a, &mut r)?,
    };
    if let Some(k) = r.unused_config(&["format", "output"]) {
        return usage(format!("config key {k:?} does not apply to {}", out.command));
    }
    let s = render(&out, &r.used, json_format);
    match output {
        Some(p) => std::fs::write(&p, s).or_else(|e| usage(format!("cannot write {}: {e}", p.display())))?,
        None => print!("{s}"),
    }
    Ok(out.verified)
}

/// Entry point taking the full argument vector (program name first);
/// returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VERIFY,
        Err(Fail::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(Fail::Compute(e)) => {
            eprintln!("error: {e}");
            EXIT_COMPUTE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{qi, qr};

    #[test]
    fn principal_parts() {
        let p = parse_principal("1:1, 2:-3/2").unwrap();
        assert_eq!(p.get(&1), Some(&qi(1)));
        assert_eq!(p.get(&2), Some(&qr(-3, 2)));
        assert!(parse_principal("1:1,1:2").is_err());
        assert!(parse_principal("x").is_err());
    }

    #[test]
    fn lists_and_config() {
        assert_eq!(parse_int_list("-2..1").unwrap(), vec![-2, -1, 0, 1]);
        assert_eq!(parse_int_list("2, 4").unwrap(), vec![2, 4]);
        assert!(parse_int_list("3..1").is_err());
        let c = parse_config("# run\nm = 2\ndelta_power = 3\n\n").unwrap();
        assert_eq!(c.get("delta-power").map(String::as_str), Some("3"));
        assert!(parse_config("m 2").is_err());
    }

    #[test]
    fn usage_errors() {
        assert_eq!(main_with_args(["singlift", "forms", "delta", "--prec", "0"]), EXIT_USAGE);
        assert_eq!(main_with_args(["singlift", "verify", "--suite", "nosuch"]), EXIT_USAGE);
        assert_eq!(main_with_args(["singlift", "frobnicate"]), EXIT_USAGE);
        assert_eq!(main_with_args(["singlift", "lift", "unimodular", "--m", "3", "--principal", "1:1"]), EXIT_COMPUTE);
    }
}
