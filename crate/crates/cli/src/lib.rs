//! Command line front end: argument parsing, configuration, output formatting
//! and cache handling around the `cosetvir` engine.

pub mod config;

use std::path::{Path, PathBuf};
use std::ffi::OsString;

use clap::{Args, Parser, Subcommand};
use cosetvir::affine::gko_branch;
use cosetvir::arith::{rational_json, Cyclotomic};
use cosetvir::braiding::{braiding_matrix_P, braiding_matrix_Q, BraidingMatrix, RKey, RMatrix, Side};
use cosetvir::certify::{certify, Branch, Certificate, CertifyOptions};
use cosetvir::kac::{central_charge, enumerate_modules, label_weight, virasoro_fusion, KacLabel};
use cosetvir::tower::{build_tower, coset_p};
use cosetvir::{Error, Result};
use serde_json::{json, Value};

use config::{Config, Output, CACHE_ENV};

#[derive(Parser, Debug)]
#[command(name = "cosetvir", version, about = "Exact computations for minimal models, coset towers and braiding certificates")]
struct Cli {
    /// Output format (overrides the config file).
    #[arg(long, global = true, value_enum)]
    output: Option<Output>,
    /// TOML config file with max_k, max_precision_bits, cache_path and output.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Largest tower index accepted (default 8).
    #[arg(long, global = true)]
    max_k: Option<u32>,
    /// Precision cap in bits for sign decisions.
    #[arg(long, global = true)]
    max_precision: Option<u32>,
    /// Directory for r-matrix cache files.
    #[arg(long, global = true, env = CACHE_ENV)]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Kac tables.
    Kac {
        #[command(subcommand)]
        command: KacCommand,
    },
    /// Fusion product of two Kac labels, e.g. `fuse --p 7 1,3 1,5`.
    Fuse {
        /// Minimal model M(p, p+1).
        #[arg(long)]
        p: u32,
        #[arg(value_parser = parse_pair)]
        a: (u32, u32),
        #[arg(value_parser = parse_pair)]
        b: (u32, u32),
    },
    /// One GKO branching step L(1,eps) x L(m,n).
    Gko {
        /// Affine level of the second factor.
        #[arg(long)]
        m: u32,
        /// Weight of the level-1 factor, 0 or 1.
        #[arg(long)]
        eps: u32,
        /// Integrable weight of the second factor, 0..=m.
        #[arg(long)]
        n: u32,
    },
    /// Iterated coset decompositions.
    Tower {
        #[command(subcommand)]
        command: TowerCommand,
    },
    /// r-matrix entries and braiding matrices.
    Braid {
        #[command(subcommand)]
        command: BraidCommand,
    },
    /// Uniqueness certificate for tower k (exit 0 when UNIQUE, 2 when INCONCLUSIVE).
    Certify(CertifyArgs),
    /// Cache maintenance.
    Cache {
        #[command(subcommand)]
        command: CacheCommand,
    },
}

#[derive(Subcommand, Debug)]
enum KacCommand {
    /// Highest weights of all modules of the minimal model p.
    Weights {
        /// Minimal model M(p, p+1).
        #[arg(long)]
        p: u32,
    },
}

#[derive(Subcommand, Debug)]
enum TowerCommand {
    Build {
        /// Tower index.
        #[arg(long)]
        k: u32,
        /// List every branching path (large for k > 4).
        #[arg(long)]
        paths: bool,
    },
}

#[derive(Subcommand, Debug)]
enum BraidCommand {
    /// r(a,m,n,c)_{b,d} with --key a,m,n,c,b,d.
    R {
        /// Minimal model M(p, p+1).
        #[arg(long)]
        p: u32,
        /// Labels a,m,n,c,b,d.
        #[arg(long, value_parser = parse_list::<6>)]
        key: [u32; 6],
        /// Use the y-side (labels up to p) instead of the x-side.
        #[arg(long)]
        primed: bool,
        /// Bits for the numeric preview.
        #[arg(long, default_value_t = 64)]
        precision: u32,
    },
    /// Braiding matrix for the coset family with externals a4,a3,a2,a1.
    Matrix {
        /// Tower index.
        #[arg(long)]
        k: u32,
        /// External labels a4,a3,a2,a1.
        #[arg(long, value_parser = parse_list::<4>)]
        ext: [u32; 4],
        /// Bits for the numeric preview.
        #[arg(long, default_value_t = 64)]
        precision: u32,
    },
}

#[derive(Args, Debug)]
struct CertifyArgs {
    /// Tower index.
    #[arg(long)]
    k: u32,
    /// Also write the JSON certificate to this file.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Replace the required element a,b,c by zero (negative control).
    #[arg(long = "zero-element", value_parser = parse_list::<3>)]
    zero: Vec<[u32; 3]>,
    /// Replace the element with key a,m,n,c,b,d by zero.
    #[arg(long = "zero-key", value_parser = parse_list::<6>)]
    zero_key: Vec<[u32; 6]>,
}

#[derive(Subcommand, Debug)]
enum CacheCommand {
    /// List cache files.
    Info,
    /// Delete cache files.
    Clear,
}

fn parse_list<const N: usize>(s: &str) -> std::result::Result<[u32; N], String> {
    let v: Vec<u32> = s.split(',').map(|x| x.trim().parse::<u32>().map_err(|e| format!("{x:?}: {e}"))).collect::<std::result::Result<_, _>>()?;
    v.try_into().map_err(|v: Vec<u32>| format!("expected {N} comma-separated integers, got {}", v.len()))
}

fn parse_pair(s: &str) -> std::result::Result<(u32, u32), String> {
    parse_list::<2>(s).map(|[a, b]| (a, b))
}

struct Ctx {
    config: Config,
}

/// Result of a command: the document to print and the exit status.
struct Report {
    json: Value,
    table: String,
    code: u8,
}

impl Report {
    fn ok(json: Value, table: String) -> Self {
        Report { json, table, code: 0 }
    }
}

/// Captured result of one invocation.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            return Outcome { stdout: e.to_string(), stderr: String::new(), code: 0 };
        }
        Err(e) => {
            let stderr = format!("error [parse]: {}\n", e.render().to_string().trim_end());
            return Outcome { stdout: String::new(), stderr, code: 1 };
        }
    };
    let output_flag = cli.output;
    match execute(cli) {
        Ok((report, output)) => {
            let stdout = match output {
                Output::Json => serde_json::to_string_pretty(&report.json).expect("serializable") + "\n",
                Output::Table => report.table,
            };
            Outcome { stdout, stderr: String::new(), code: report.code }
        }
        Err(e) => {
            let stderr = match output_flag {
                Some(Output::Json) => format!("{}\n", json!({"error": {"category": e.category(), "message": e.to_string()}})),
                _ => format!("error [{}]: {e}\n", e.category()),
            };
            Outcome { stdout: String::new(), stderr, code: 1 }
        }
    }
}

fn execute(cli: Cli) -> Result<(Report, Output)> {
    let mut config = match &cli.config {
        Some(path) => Config::from_file(path)?,
        None => Config::default(),
    };
    if let Some(o) = cli.output {
        config.output = o;
    }
    if let Some(k) = cli.max_k {
        config.max_k = k;
    }
    if let Some(b) = cli.max_precision {
        config.max_precision_bits = b;
    }
    if cli.cache_dir.is_some() {
        config.cache_path = cli.cache_dir.clone();
    }
    let ctx = Ctx { config: config.validate()? };
    let report = match cli.command {
        Command::Kac { command: KacCommand::Weights { p } } => cmd_kac(p)?,
        Command::Fuse { p, a, b } => cmd_fuse(p, a.into(), b.into())?,
        Command::Gko { m, eps, n } => cmd_gko(m, eps, n)?,
        Command::Tower { command: TowerCommand::Build { k, paths } } => cmd_tower(&ctx, k, paths)?,
        Command::Braid { command: BraidCommand::R { p, key, primed, precision } } => cmd_braid_r(&ctx, p, key, primed, precision)?,
        Command::Braid { command: BraidCommand::Matrix { k, ext, precision } } => cmd_braid_matrix(&ctx, k, ext, precision)?,
        Command::Certify(args) => cmd_certify(&ctx, &args)?,
        Command::Cache { command } => cmd_cache(&ctx, command)?,
    };
    Ok((report, ctx.config.output))
}

fn cmd_kac(p: u32) -> Result<Report> {
    let c = central_charge(p)?;
    let mut rows = Vec::new();
    let mut table = format!("p = {p}, c = {c}\n");
    for l in enumerate_modules(p)? {
        let h = label_weight(p, l)?;
        table.push_str(&format!("{l:<8} {h}\n"));
        rows.push(json!({"label": l, "h": rational_json(&h)}));
    }
    let json = json!({"schema": "cosetvir/kac-weights/v1", "p": p, "central_charge": rational_json(&c), "weights": rows});
    Ok(Report::ok(json, table))
}

fn cmd_fuse(p: u32, a: KacLabel, b: KacLabel) -> Result<Report> {
    let s = virasoro_fusion(p, a, b)?;
    let json = json!({"schema": "cosetvir/fusion/v1", "p": p, "a": a, "b": b, "product": s});
    Ok(Report::ok(json, format!("{a} x {b} = {s}\n")))
}

fn cmd_gko(m: u32, eps: u32, n: u32) -> Result<Report> {
    let entries = gko_branch(m, eps, n)?;
    let terms: Vec<String> = entries.iter().map(|e| format!("L(c_{}, {}) x {}", m + 2, e.weight, e.label)).collect();
    let json = json!({
        "schema": "cosetvir/gko/v1",
        "m": m, "eps": eps, "n": n,
        "summands": entries.iter().map(|e| e.to_json()).collect::<Vec<_>>(),
    });
    Ok(Report::ok(json, format!("L(1,{eps}) x L({m},{n}) = {}\n", terms.join(" + "))))
}

fn cmd_tower(ctx: &Ctx, k: u32, paths: bool) -> Result<Report> {
    let t = build_tower(k, ctx.config.max_k)?;
    let mut table = t.to_string();
    if paths {
        for i in t.sectors() {
            for path in t.paths(i) {
                let labels: Vec<String> = std::iter::once(path.seed).chain(path.labels.iter().copied()).map(|l| l.to_string()).collect();
                table.push_str(&format!("  {i}: {} h = {}\n", labels.join(" -> "), path.last_weight()));
            }
        }
    }
    Ok(Report::ok(t.to_json(paths), table))
}

fn cache_file(ctx: &Ctx, p: u32, side: Side) -> Option<PathBuf> {
    let name = match side {
        Side::Unprimed => format!("rcache-p{p}.json"),
        Side::Primed => format!("rcache-p{p}-primed.json"),
    };
    ctx.config.cache_path.as_ref().map(|d| d.join(name))
}

/// Shared engine, warmed from the cache file when one is usable.
fn engine(ctx: &Ctx, p: u32, side: Side) -> Result<std::sync::Arc<RMatrix>> {
    let e = RMatrix::shared(p, side)?;
    if let Some(path) = cache_file(ctx, p, side).filter(|f| f.exists()) {
        if let Err(err) = e.load_cache(&path) {
            eprintln!("warning [{}]: ignoring {}: {err}", err.category(), path.display());
        }
    }
    Ok(e)
}

fn store(ctx: &Ctx, e: &RMatrix) {
    if let Some(path) = cache_file(ctx, e.p(), e.side()) {
        let res = std::fs::create_dir_all(path.parent().unwrap_or(Path::new("."))).map_err(|x| Error::Cache(x.to_string()));
        if let Err(err) = res.and_then(|_| e.save_cache(&path)) {
            eprintln!("warning [{}]: {err}", err.category());
        }
    }
}

fn preview(v: &Cyclotomic, bits: u32) -> Value {
    let r = v.embed(bits);
    json!({"bits": bits, "re": [r.re.lo_f64(), r.re.hi_f64()], "im": [r.im.lo_f64(), r.im.hi_f64()]})
}

fn short(v: &Cyclotomic) -> String {
    let (re, im) = v.to_f64_pair();
    let clean = |x: f64| if x.abs() < 5e-7 { 0.0 } else { x };
    format!("{:+.6}{:+.6}i", clean(re), clean(im))
}

fn cmd_braid_r(ctx: &Ctx, p: u32, key: [u32; 6], primed: bool, precision: u32) -> Result<Report> {
    let side = if primed { Side::Primed } else { Side::Unprimed };
    let e = engine(ctx, p, side)?;
    let key = RKey::from(key);
    let v = e.value(&key)?;
    store(ctx, &e);
    let json = json!({
        "schema": "cosetvir/braid-r/v1",
        "p": p,
        "side": side,
        "key": key,
        "value": v,
        "preview": preview(&v, precision),
    });
    let name = if primed { "r'" } else { "r" };
    let table = format!("{name}{} at p = {p}\n  exact:   {v}\n  numeric: {}\n", &key.to_string()[1..], short(&v));
    Ok(Report::ok(json, table))
}

fn matrix_table(title: &str, m: &BraidingMatrix) -> String {
    let mut s = format!("{title} rows {:?} cols {:?}\n", m.rows, m.cols);
    for i in 0..m.entries.rows() {
        let cells: Vec<String> = m.entries.row(i).iter().map(short).collect();
        s.push_str(&format!("  {:>3}: {}\n", m.rows[i], cells.join("  ")));
    }
    s
}

fn cmd_braid_matrix(ctx: &Ctx, k: u32, ext: [u32; 4], precision: u32) -> Result<Report> {
    if k > ctx.config.max_k {
        return Err(Error::BoundExceeded { k, max: ctx.config.max_k });
    }
    let e = engine(ctx, coset_p(k), Side::Unprimed)?;
    let [a4, a3, a2, a1] = ext;
    let q = braiding_matrix_Q(k, a4, a3, a2, a1)?;
    store(ctx, &e);
    let p = braiding_matrix_P(&q)?;
    let previews: Vec<Vec<Value>> =
        (0..q.entries.rows()).map(|i| q.entries.row(i).iter().map(|v| preview(v, precision)).collect()).collect();
    let json = json!({"schema": "cosetvir/braid-matrix/v1", "k": k, "q": q.to_json(), "p_side": p.to_json(), "preview": previews});
    let table = format!("{}{}", matrix_table("Q", &q), matrix_table("P", &p));
    Ok(Report::ok(json, table))
}

fn sign_char(s: Option<i8>) -> &'static str {
    match s {
        Some(1) => "+",
        Some(-1) => "-",
        Some(_) => "0",
        None => "?",
    }
}

fn certificate_table(c: &Certificate) -> String {
    let mut s = format!("k = {}, p = {}, t = {}\n", c.k, c.p, c.t);
    s.push_str(&format!("modules: {:?}\n", c.modules));
    match &c.propagation {
        Ok(p) => {
            let nz = p.triples.len() - p.undecided().len();
            s.push_str(&format!(
                "m = {} ({} branch), {} derivation steps, {}/{} triples nonzero, rank rule {}\n",
                p.m,
                if p.branch == Branch::Odd { "odd" } else { "even" },
                p.log.len(),
                nz,
                p.triples.len(),
                if p.rank_check { "ok" } else { "violated" }
            ));
        }
        Err(e) => s.push_str(&format!("propagation failed: {e}\n")),
    }
    s.push_str("required elements:\n");
    for e in c.elements.iter().chain(&c.supplementary) {
        let label = match e.requirement.triple {
            Some([a, b, cc]) => format!("({a},{b},{cc})"),
            None => format!("{}", e.requirement.key),
        };
        s.push_str(&format!(
            "  {label:<20} {:<28} re {} im {}{}\n",
            short(&e.value),
            sign_char(e.sign_re),
            sign_char(e.sign_im),
            if e.is_zero { "  ZERO" } else { "" }
        ));
    }
    s.push_str(&format!("verdict: {}\n", c.verdict.label()));
    if let cosetvir::certify::Verdict::Inconclusive(reasons) = &c.verdict {
        for r in reasons {
            s.push_str(&format!("  - {r}\n"));
        }
    }
    s
}

fn cmd_certify(ctx: &Ctx, args: &CertifyArgs) -> Result<Report> {
    if args.k > ctx.config.max_k {
        return Err(Error::BoundExceeded { k: args.k, max: ctx.config.max_k });
    }
    let e = engine(ctx, coset_p(args.k), Side::Unprimed)?;
    let opts = CertifyOptions {
        max_k: ctx.config.max_k,
        max_precision_bits: ctx.config.max_precision_bits,
        zeroed: args.zero.to_vec(),
        zeroed_keys: args.zero_key.iter().map(|&k| RKey::from(k)).collect(),
    };
    let cert = certify(args.k, &opts)?;
    store(ctx, &e);
    let json = cert.to_json();
    if let Some(path) = &args.json {
        let text = serde_json::to_string_pretty(&json).expect("serializable");
        std::fs::write(path, text + "\n").map_err(|x| Error::InvalidConfig(format!("{}: {x}", path.display())))?;
    }
    let code = if cert.verdict.is_unique() { 0 } else { 2 };
    Ok(Report { table: certificate_table(&cert), json, code })
}

fn cmd_cache(ctx: &Ctx, command: CacheCommand) -> Result<Report> {
    let Some(dir) = &ctx.config.cache_path else {
        return Err(Error::Cache(format!("no cache directory configured (set --cache-dir or {CACHE_ENV})")));
    };
    let mut files: Vec<PathBuf> = match std::fs::read_dir(dir) {
        Ok(rd) => rd
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with("rcache-") && n.ends_with(".json")))
            .collect(),
        Err(_) => Vec::new(),
    };
    files.sort();
    if matches!(command, CacheCommand::Clear) {
        for f in &files {
            std::fs::remove_file(f).map_err(|e| Error::Cache(format!("{}: {e}", f.display())))?;
        }
    }
    let names: Vec<String> = files.iter().map(|f| f.display().to_string()).collect();
    let verb = if matches!(command, CacheCommand::Clear) { "removed" } else { "found" };
    let table = format!("{verb} {} cache files in {}\n{}", names.len(), dir.display(), names.iter().map(|n| format!("  {n}\n")).collect::<String>());
    let mut json = json!({"schema": "cosetvir/cache/v1"});
    json[verb] = json!(names);
    Ok(Report::ok(json, table))
}
