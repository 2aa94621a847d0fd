//! Command-line front end: dimension queries, ghost valuations, polygon and
//! slope computations, verification sweeps, figure emission, and the original
//! table-driven recursion.
//!
//! Output is deterministic: identical invocations produce identical bytes,
//! with slopes always serialized as exact numerator/denominator pairs.

use crate::arith::Valuation;
use crate::context::Ctx;
use crate::dims::{self, CharIndex, GhostParams};
use crate::ghost;
use crate::newton;
use crate::slopes_algo::{self, CompatFlags, DimProvider, TableDims};
use crate::verify::{self, CheckReport, Suite, SweepConfig};
use crate::{Error, Rat, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Np,
    Recursive,
    Both,
}

#[derive(Debug, Parser)]
#[command(name = "ghost-slopes", about = "Slope sequences via ghost-series Newton polygons")]
pub struct Cli {
    /// Flat key=value file supplying defaults; explicit flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    #[arg(long)]
    pub p: Option<i64>,
    #[arg(long)]
    pub a: Option<i64>,
    #[arg(long)]
    pub b: Option<i64>,
    #[arg(long = "s-eps")]
    pub s_eps: Option<i64>,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Dimensions ur/iw/new at a weight.
    Dims {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        k: Option<i64>,
    },
    /// Valuation of the ghost coefficient g_n at an integer weight point.
    Ghost {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        n: u64,
        /// Evaluation weight k'.
        #[arg(long)]
        k: Option<i64>,
    },
    /// Newton-polygon slopes of the ghost series at an evaluation weight.
    Np {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        k: Option<i64>,
        #[arg(long)]
        count: Option<u64>,
    },
    /// Slope sequence at a weight, by either or both methods.
    Slopes {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        k: Option<i64>,
        /// Defaults to dim_ur(k).
        #[arg(long)]
        count: Option<u64>,
        #[arg(long, value_enum)]
        method: Option<Method>,
        /// Slope-memo persistence file; missing file is fine.
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Check under the printed case-3 constant instead of the corrected one.
        #[arg(long, default_value_t = false)]
        printed_case3: bool,
    },
    /// Run verification suites over a parameter grid.
    Verify {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        suite: Option<String>,
        #[arg(long = "k-max")]
        k_max: Option<i64>,
        /// Comma-separated primes; overrides --p.
        #[arg(long = "p-list")]
        p_list: Option<String>,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, default_value_t = false)]
        printed_case3: bool,
    },
    /// Emit an SVG figure of the ghost Newton polygon with its
    /// near-Steinberg ranges.
    Plot {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        k: Option<i64>,
        /// x-extent of the figure; defaults to dim_iw(k) in-class, else 20.
        #[arg(long)]
        upto: Option<i64>,
    },
    /// The original recursion over an external dimension table.
    Buzzard {
        #[arg(long)]
        p: Option<i64>,
        #[arg(long)]
        k: Option<i64>,
        #[arg(long = "dims-file")]
        dims_file: PathBuf,
    },
}

/// Flat key=value defaults file; `#` comments allowed.
fn load_config(path: &Path) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Parse(format!("config line {}: expected key=value", lineno + 1))
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

struct Resolver {
    file: HashMap<String, String>,
}

impl Resolver {
    fn new(path: Option<&Path>) -> Result<Self> {
        Ok(Resolver {
            file: match path {
                Some(p) => load_config(p)?,
                None => HashMap::new(),
            },
        })
    }

    fn int(&self, flag: Option<i64>, key: &str) -> Option<i64> {
        flag.or_else(|| self.file.get(key).and_then(|v| v.parse().ok()))
    }

    fn uint(&self, flag: Option<u64>, key: &str) -> Option<u64> {
        flag.or_else(|| self.file.get(key).and_then(|v| v.parse().ok()))
    }

    fn str(&self, flag: Option<String>, key: &str) -> Option<String> {
        flag.or_else(|| self.file.get(key).cloned())
    }

    fn require(&self, flag: Option<i64>, key: &str) -> Result<i64> {
        self.int(flag, key)
            .ok_or_else(|| Error::InvalidParam(format!("--{key} is required")))
    }

    fn params(&self, args: &ParamArgs) -> Result<(GhostParams, CharIndex)> {
        let p = self.require(args.p, "p")?;
        let a = self.require(args.a, "a")?;
        let b = self.int(args.b, "b").unwrap_or(0);
        let params = GhostParams::new(p, a, b)?;
        let s_eps = self.int(args.s_eps, "s-eps").unwrap_or(0);
        let char = CharIndex::new(&params, s_eps)?;
        Ok((params, char))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub p: i64,
    pub a: i64,
    pub b: i64,
    pub s_eps: i64,
    pub query: serde_json::Value,
    pub method: String,
    pub payload: serde_json::Value,
}

pub fn rat_pair(r: Rat) -> (i64, i64) {
    (*r.numer(), *r.denom())
}

fn slopes_json(v: &[Rat]) -> serde_json::Value {
    serde_json::json!(v.iter().map(|&r| rat_pair(r)).collect::<Vec<_>>())
}

fn val_json(v: Valuation) -> serde_json::Value {
    match v {
        Valuation::Finite(x) => serde_json::json!(x),
        Valuation::Infinity => serde_json::json!("inf"),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn record_text(format: Format, rec: &OutputRecord) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(rec).expect("record serializes");
            s.push('\n');
            s
        }
        Format::Csv => record_csv(rec),
    }
}

fn record_csv(rec: &OutputRecord) -> String {
    let mut out = String::new();
    out.push_str("key,value\n");
    out.push_str(&format!("p,{}\na,{}\nb,{}\ns_eps,{}\n", rec.p, rec.a, rec.b, rec.s_eps));
    out.push_str(&format!("method,{}\n", rec.method));
    if let Some(obj) = rec.query.as_object() {
        for (k, v) in obj {
            out.push_str(&format!("query.{k},{v}\n"));
        }
    }
    flatten_csv("payload", &rec.payload, &mut out);
    out
}

fn flatten_csv(prefix: &str, value: &serde_json::Value, out: &mut String) {
    match value {
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                flatten_csv(&format!("{prefix}.{k}"), v, out);
            }
        }
        serde_json::Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten_csv(&format!("{prefix}.{i}"), v, out);
            }
        }
        other => out.push_str(&format!("{prefix},{other}\n")),
    }
}

const CACHE_HEADER: &str = "# ghost-slopes-cache v1";

#[derive(Serialize, Deserialize)]
struct CacheLine {
    s_eps: i64,
    k: i64,
    slopes: Vec<(i64, i64)>,
}

fn load_cache(ctx: &Ctx, path: &Path) -> Result<()> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(()),
        Err(e) => return Err(e.into()),
    };
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    let expected = format!(
        "{CACHE_HEADER} p={} a={} flags={}{}",
        ctx.params.p, ctx.params.a, ctx.flags.case3_printed_b as u8, ctx.flags.case3_branch_a_printed as u8
    );
    if header != expected {
        eprintln!("ignoring cache {}: header mismatch", path.display());
        return Ok(());
    }
    let mut entries = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let rec: CacheLine = serde_json::from_str(line)
            .map_err(|e| Error::Parse(format!("cache line: {e}")))?;
        let seq: Vec<Rat> = rec.slopes.iter().map(|&(n, d)| Rat::new(n, d)).collect();
        entries.push(((rec.s_eps, rec.k), seq));
    }
    ctx.preload_slope_memo(entries);
    Ok(())
}

fn save_cache(ctx: &Ctx, path: &Path) -> Result<()> {
    let mut out = format!(
        "{CACHE_HEADER} p={} a={} flags={}{}\n",
        ctx.params.p, ctx.params.a, ctx.flags.case3_printed_b as u8, ctx.flags.case3_branch_a_printed as u8
    );
    for ((s_eps, k), slopes) in ctx.slope_memo_entries() {
        let line = CacheLine {
            s_eps,
            k,
            slopes: slopes.iter().map(|&r| rat_pair(r)).collect(),
        };
        out.push_str(&serde_json::to_string(&line).expect("cache line serializes"));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Run the CLI on the given arguments; returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return 2;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            1
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    let resolver = Resolver::new(cli.config.as_deref())?;
    let format = cli.format.unwrap_or(Format::Json);
    match cli.cmd {
        Cmd::Dims { params, k } => {
            let (gp, char) = resolver.params(&params)?;
            let k = resolver.require(k, "k")?;
            let triple = dims::dim_triple(&gp, char, k)?;
            let rec = OutputRecord {
                p: gp.p,
                a: gp.a,
                b: gp.b,
                s_eps: char.s_eps,
                query: serde_json::json!({ "k": k }),
                method: "dims".into(),
                payload: serde_json::json!({
                    "ur": triple.ur,
                    "iw": triple.iw,
                    "new": triple.new,
                }),
            };
            emit(&cli.out, &record_text(format, &rec))?;
            Ok(0)
        }
        Cmd::Ghost { params, n, k } => {
            let (gp, char) = resolver.params(&params)?;
            let k = resolver.require(k, "k")?;
            let ctx = Ctx::new(gp);
            let v = ghost::ghost_val(&ctx, char, n, k)?;
            let rec = OutputRecord {
                p: gp.p,
                a: gp.a,
                b: gp.b,
                s_eps: char.s_eps,
                query: serde_json::json!({ "n": n, "k": k }),
                method: "ghost".into(),
                payload: serde_json::json!({ "valuation": val_json(v) }),
            };
            emit(&cli.out, &record_text(format, &rec))?;
            Ok(0)
        }
        Cmd::Np { params, k, count } => {
            let (gp, char) = resolver.params(&params)?;
            let k = resolver.require(k, "k")?;
            let count = resolver
                .uint(count, "count")
                .ok_or_else(|| Error::InvalidParam("--count is required".into()))?;
            let ctx = Ctx::new(gp);
            let slopes = newton::np_slopes(&ctx, char, k, count)?;
            let rec = OutputRecord {
                p: gp.p,
                a: gp.a,
                b: gp.b,
                s_eps: char.s_eps,
                query: serde_json::json!({ "k": k, "count": count }),
                method: "np".into(),
                payload: serde_json::json!({ "slopes": slopes_json(&slopes.0) }),
            };
            emit(&cli.out, &record_text(format, &rec))?;
            Ok(0)
        }
        Cmd::Slopes {
            params,
            k,
            count,
            method,
            cache,
            printed_case3,
        } => {
            let (gp, char) = resolver.params(&params)?;
            let k = resolver.require(k, "k")?;
            let method = method
                .or_else(|| match resolver.str(None, "method").as_deref() {
                    Some("np") => Some(Method::Np),
                    Some("recursive") => Some(Method::Recursive),
                    Some("both") => Some(Method::Both),
                    _ => None,
                })
                .unwrap_or(Method::Both);
            let flags = CompatFlags {
                case3_printed_b: printed_case3,
                ..CompatFlags::default()
            };
            let ctx = Ctx::with_flags(gp, flags);
            if let Some(path) = &cache {
                load_cache(&ctx, path)?;
            }
            let ur = dims::dim_ur(&gp, char, k)?;
            let count = resolver.uint(count, "count").unwrap_or(ur);
            let mut payload = serde_json::Map::new();
            let mut mismatch = false;
            let recursive = if matches!(method, Method::Recursive | Method::Both) {
                let v = slopes_algo::variant_slopes(&ctx, char, k)?;
                let truncated: Vec<Rat> =
                    v.0.iter().take(count.min(ur) as usize).copied().collect();
                payload.insert("recursive".into(), slopes_json(&truncated));
                Some(truncated)
            } else {
                None
            };
            let polygon = if matches!(method, Method::Np | Method::Both) {
                let v = if count == 0 {
                    Vec::new()
                } else {
                    newton::np_slopes(&ctx, char, k, count)?.0
                };
                payload.insert("np".into(), slopes_json(&v));
                Some(v)
            } else {
                None
            };
            if let (Some(r), Some(np)) = (&recursive, &polygon) {
                let matches = r[..] == np[..r.len().min(np.len())];
                mismatch = !matches;
                payload.insert("match".into(), serde_json::json!(matches));
            }
            if let Some(path) = &cache {
                save_cache(&ctx, path)?;
            }
            let rec = OutputRecord {
                p: gp.p,
                a: gp.a,
                b: gp.b,
                s_eps: char.s_eps,
                query: serde_json::json!({ "k": k, "count": count }),
                method: match method {
                    Method::Np => "np",
                    Method::Recursive => "recursive",
                    Method::Both => "both",
                }
                .into(),
                payload: serde_json::Value::Object(payload),
            };
            emit(&cli.out, &record_text(format, &rec))?;
            Ok(if mismatch { 1 } else { 0 })
        }
        Cmd::Verify {
            params,
            suite,
            k_max,
            p_list,
            jobs,
            printed_case3,
        } => {
            let suites: Vec<Suite> = match resolver.str(suite, "suite").as_deref() {
                None | Some("all") => Suite::ALL.to_vec(),
                Some(name) => vec![name.parse()?],
            };
            let p_list: Vec<i64> = match resolver.str(p_list, "p-list") {
                Some(csv) => csv
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad prime {s:?} in p-list")))
                    })
                    .collect::<Result<_>>()?,
                None => vec![resolver.require(params.p, "p")?],
            };
            let cfg = SweepConfig {
                p_list,
                a_list: resolver.int(params.a, "a").map(|a| vec![a]).unwrap_or_default(),
                b_list: resolver.int(params.b, "b").map(|b| vec![b]).unwrap_or_default(),
                k_max: resolver.int(k_max, "k-max").unwrap_or(100),
                suites,
                jobs: jobs
                    .or_else(|| resolver.file.get("jobs").and_then(|v| v.parse().ok()))
                    .unwrap_or(0),
                flags: CompatFlags {
                    case3_printed_b: printed_case3,
                    ..CompatFlags::default()
                },
                theta_count: 10,
            };
            let reports = verify::sweep(&cfg);
            let text = render_reports(format, &reports);
            emit(&cli.out, &text)?;
            Ok(if reports.iter().any(CheckReport::is_fail) {
                1
            } else {
                0
            })
        }
        Cmd::Plot { params, k, upto } => {
            let (gp, char) = resolver.params(&params)?;
            let k = resolver.require(k, "k")?;
            let ctx = Ctx::new(gp);
            let upto = match resolver.int(upto, "upto") {
                Some(u) => u,
                None => {
                    if dims::in_class(&gp, char, k) && k >= 2 {
                        dims::dim_iw(&gp, char, k)? as i64
                    } else {
                        20
                    }
                }
            };
            let svg = render_svg(&ctx, char, k, upto.max(1))?;
            emit(&cli.out, &svg)?;
            Ok(0)
        }
        Cmd::Buzzard { p, k, dims_file } => {
            let p = resolver.require(p, "p")?;
            let k = resolver.require(k, "k")?;
            let table = TableDims::parse(&std::fs::read_to_string(&dims_file)?)?;
            let slopes = slopes_algo::buzzard_original(&table, p, k)?;
            let rec = OutputRecord {
                p,
                a: 0,
                b: 0,
                s_eps: 0,
                query: serde_json::json!({ "k": k, "dims_file": dims_file.display().to_string(), "cusps": table.cusps() }),
                method: "buzzard".into(),
                payload: serde_json::json!({ "slopes": slopes_json(&slopes.0) }),
            };
            emit(&cli.out, &record_text(format, &rec))?;
            Ok(0)
        }
    }
}

fn render_reports(format: Format, reports: &[CheckReport]) -> String {
    let mut out = String::new();
    match format {
        Format::Json => {
            for rep in reports {
                out.push_str(&rep.to_json_line());
                out.push('\n');
            }
        }
        Format::Csv => {
            out.push_str("suite,tuple,status,witness\n");
            for rep in reports {
                let (status, extra) = match &rep.status {
                    verify::Status::Pass => ("pass", String::new()),
                    verify::Status::Fail => ("fail", String::new()),
                    verify::Status::Skipped { reason } => ("skipped", reason.clone()),
                };
                let witness = rep.witness.clone().unwrap_or(extra);
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    rep.suite,
                    rep.tuple,
                    status,
                    witness.replace(',', ";")
                ));
            }
        }
    }
    let pass = reports.iter().filter(|r| r.is_pass()).count();
    let fail = reports.iter().filter(|r| r.is_fail()).count();
    let skipped = reports.len() - pass - fail;
    out.push_str(&format!(
        "# summary: {pass} pass, {fail} fail, {skipped} skipped\n"
    ));
    out
}

/// SVG figure: ghost points, the certified polygon prefix, its vertices, and
/// the near-Steinberg ranges as shaded bands.
fn render_svg(ctx: &Ctx, char: CharIndex, eval_weight: i64, upto: i64) -> Result<String> {
    let intervals = newton::ns_intervals(ctx, char, eval_weight, upto)?;
    let mut points = Vec::new();
    let mut y_max = 1f64;
    for n in 0..=upto {
        let v = ghost::ghost_val(ctx, char, n as u64, eval_weight)?;
        if let Some(y) = v.finite() {
            y_max = y_max.max(y as f64);
            points.push((n, Some(y)));
        } else {
            points.push((n, None));
        }
    }
    let finite: Vec<(i64, Valuation)> = (0..=upto)
        .map(|n| {
            points[n as usize]
                .1
                .map(Valuation::Finite)
                .map(|v| (n, v))
                .unwrap_or((n, Valuation::Infinity))
        })
        .collect();
    let hull = newton::lower_hull(&finite)?;

    let (w, h, m) = (800f64, 560f64, 50f64);
    let sx = |x: i64| m + (x as f64) * (w - 2.0 * m) / (upto.max(1) as f64);
    let sy = |y: f64| h - m - y * (h - 2.0 * m) / y_max;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    ));
    svg.push_str(&format!(
        "<title>ghost Newton polygon, p={} a={} s_eps={} at w_{eval_weight}</title>\n",
        ctx.params.p, ctx.params.a, char.s_eps
    ));
    for &(lo, hi) in &intervals {
        let x0 = sx(lo.max(0));
        let x1 = sx(hi.min(upto));
        svg.push_str(&format!(
            "<rect x=\"{x0:.1}\" y=\"{m:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"#f4c2c2\" opacity=\"0.5\"><desc>near-Steinberg ({lo},{hi})</desc></rect>\n",
            x1 - x0,
            h - 2.0 * m
        ));
    }
    // axes
    svg.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"black\"/>\n<line x1=\"{m}\" y1=\"{m}\" x2=\"{m}\" y2=\"{0}\" stroke=\"black\"/>\n",
        h - m,
        w - m
    ));
    // polygon
    let path: Vec<String> = hull
        .vertices
        .iter()
        .map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(rat_f64(y))))
        .collect();
    svg.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"2\"/>\n",
        path.join(" ")
    ));
    for &(x, y) in &hull.vertices {
        svg.push_str(&format!(
            "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"4\" fill=\"#1f6fb2\"><desc>vertex ({x},{y})</desc></circle>\n",
            sx(x),
            sy(rat_f64(y))
        ));
    }
    for (x, y) in &points {
        match y {
            Some(y) => svg.push_str(&format!(
                "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"2.5\" fill=\"#333\"/>\n",
                sx(*x),
                sy(*y as f64)
            )),
            None => svg.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\" fill=\"#999\">inf</text>\n",
                sx(*x) - 6.0,
                m + 12.0
            )),
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn rat_f64(r: Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
