//! `carleman`: command-line front end for the weight, bump, sparse, Cantor,
//! envelope and polynomial modules.
//!
//! Every subcommand writes a JSON report (stdout unless `--out` is given)
//! echoing its inputs, the tool version and the seed. Exit status is 0 when
//! the checked property holds, 1 when it fails, 2 on usage errors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use carleman_core::envelope::{check_membership, fit_envelope, measure_norms, DerivativeNormProfile, NormSource};
use carleman_core::flat::{end_value, make_bump, make_transition, DEFAULT_K_MAX};
use carleman_core::poly::{pigeonhole_refine, random_instance};
use carleman_core::sparse::{build_core, sparseness_report, AtomRegistry, Halving, DEFAULT_DEPTH};
use carleman_core::weights::{classify, log_convexify, WeightRegistry, WeightSequence};
use carleman_core::wetzel::{
    build_flat_on_cantor, distinct_windows, equalizer_demo, lookup, sample_family, two_value_check, unit_grid,
    window_count,
};
use carleman_core::Error as CoreError;
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "carleman", version, about = "Denjoy-Carleman classes, flat functions and sparse systems")]
struct Cli {
    /// Weight registry JSON; the bundled registry is used when unset.
    #[arg(long, global = true, env = "CARLEMAN_WEIGHTS")]
    registry: Option<PathBuf>,
    /// Seed for randomized subcommands; recorded in every report.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Carleman verdict for a weight family.
    Classify(SeqArgs),
    /// Log-convex minorant of a weight family.
    Convexify(SeqArgs),
    /// Certified flat bump on an interval.
    Bump(BumpArgs),
    /// Monotone transition function on [0, Δ].
    Transition(TransitionArgs),
    #[command(subcommand)]
    Sparse(SparseCommand),
    #[command(subcommand)]
    Wetzel(WetzelCommand),
    #[command(subcommand)]
    Envelope(EnvelopeCommand),
    /// Pigeonhole refinement on random polynomial families.
    RefutePoly(RefuteArgs),
}

#[derive(Args, Debug, Clone)]
struct SeqArgs {
    /// Weight family name from the registry.
    #[arg(long, default_value = "gevrey2")]
    seq: String,
    /// Override the materialized length K.
    #[arg(long = "K")]
    max_index: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BumpArgs {
    #[arg(long, default_value = "gevrey2")]
    seq: String,
    /// Support `a,b`.
    #[arg(long, default_value = "0,1", value_parser = parse_pair)]
    interval: (f64, f64),
    #[arg(long, default_value_t = 1.0)]
    epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    k_max: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV of `x, b(x), b'(x)`.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value_t = 201)]
    samples: usize,
}

#[derive(Args, Debug)]
struct TransitionArgs {
    #[arg(long, default_value = "gevrey2")]
    seq: String,
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// Flatness index, `ε = 1/i`.
    #[arg(long, default_value_t = 1)]
    i: u32,
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    k_max: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV of `x, s(x), s'(x)`.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value_t = 201)]
    samples: usize,
}

#[derive(Args, Debug, Clone)]
struct SparseOpts {
    #[arg(long, default_value = "gevrey2")]
    seq: String,
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    k_max: usize,
    #[arg(long, default_value_t = DEFAULT_DEPTH)]
    depth: u32,
}

#[derive(Subcommand, Debug)]
enum SparseCommand {
    /// Build the core atoms around a point.
    Build {
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        point: (f64, f64),
        #[command(flatten)]
        opts: SparseOpts,
        #[arg(long)]
        out: Option<PathBuf>,
        /// CSV of `u, h(u), provenanceIndex`.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Sample range `lo,hi` for the CSV; defaults to `x ± 2`.
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        range: Option<(f64, f64)>,
        #[arg(long, default_value_t = 401)]
        samples: usize,
    },
    /// Evaluate `h_P` at one or more abscissae.
    Eval {
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        point: (f64, f64),
        /// Comma-separated abscissae.
        #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
        u: List,
        #[command(flatten)]
        opts: SparseOpts,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Provenance table for every point and query over one shared registry.
    Report {
        /// JSON array of `[x, y]` pairs, or one `x,y` per line.
        #[arg(long)]
        points: PathBuf,
        /// JSON array of numbers, or one number per line.
        #[arg(long)]
        queries: PathBuf,
        #[command(flatten)]
        opts: SparseOpts,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum WetzelCommand {
    /// Flat function on a Cantor approximation and its two-valued family.
    Family {
        #[arg(long, default_value = "gevrey2")]
        seq: String,
        #[arg(long, default_value_t = 4)]
        level: u32,
        #[arg(long, default_value_t = DEFAULT_K_MAX)]
        k_max: usize,
        /// Grid size for the two-value check on [0, 1].
        #[arg(long, default_value_t = 1001)]
        check_grid: usize,
        /// Sample at most this many members (seeded).
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// CSV of `x, g(x)`.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Equalizer sets of analytic functions.
    Equalizer {
        #[arg(long, default_value = "sin,cos,sin-shift", value_delimiter = ',')]
        fns: Vec<String>,
        #[arg(long, default_value = "0,6.283185307179586", value_parser = parse_pair, allow_hyphen_values = true)]
        interval: (f64, f64),
        #[arg(long, default_value_t = 4001)]
        grid: usize,
        /// Minimum separation required between merged equalizer points.
        #[arg(long, default_value_t = 1e-6)]
        delta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
struct ProfileArgs {
    /// Norm profile: JSON `{"norms": [...], "interval": [a, b]}`, a JSON
    /// array, or one number per line.
    #[arg(long, conflicts_with = "measure")]
    profile: Option<PathBuf>,
    /// Measure the profile of an analytic function (`sin`, ...) or `bump`.
    #[arg(long)]
    measure: Option<String>,
    /// Highest order when measuring.
    #[arg(long, default_value_t = 6)]
    order: usize,
    #[arg(long, default_value = "gevrey2")]
    seq: String,
}

#[derive(Subcommand, Debug)]
enum EnvelopeCommand {
    /// Minimal β over a grid of B.
    Fit {
        #[command(flatten)]
        profile: ProfileArgs,
        /// `start:stop:step`.
        #[arg(long = "B-grid", default_value = "0.5:4:0.1", value_parser = parse_grid)]
        b_grid: Grid,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Membership for one `(β, B)`.
    Check {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long)]
        beta: f64,
        #[arg(long = "B")]
        big_b: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct RefuteArgs {
    #[arg(long, default_value_t = 2)]
    degree: usize,
    #[arg(long, default_value_t = 3)]
    per_column: usize,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        let usage = matches!(
            e.downcast_ref::<CoreError>(),
            Some(CoreError::InvalidArgument(_) | CoreError::Registry(_) | CoreError::InvalidSchedule(_))
        ) || e.downcast_ref::<std::io::Error>().is_some()
            || e.downcast_ref::<UsageError>().is_some();
        if usage {
            Failure::Usage(e)
        } else {
            Failure::Runtime(e)
        }
    }
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected 'a,b', got '{s}'"))?;
    let a = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let b = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((a, b))
}

#[derive(Debug, Clone)]
struct Grid(Vec<f64>);

#[derive(Debug, Clone)]
struct List(Vec<f64>);

fn parse_list(s: &str) -> Result<List, String> {
    s.split(',').map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}"))).collect::<Result<_, _>>().map(List)
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(format!("expected 'start:stop:step', got '{s}'"));
    };
    if !(step > 0.0) || !(stop >= start) || !(start > 0.0) {
        return Err(format!("need 0 < start ≤ stop and step > 0, got '{s}'"));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok(Grid((0..=n).map(|j| start + j as f64 * step).collect()))
}

struct Ctx {
    registry: WeightRegistry,
    registry_source: String,
    seed: u64,
}

impl Ctx {
    fn new(path: Option<&Path>, seed: u64) -> anyhow::Result<Self> {
        let (registry, registry_source) = match path {
            Some(p) => (WeightRegistry::from_path(p)?, p.display().to_string()),
            None => (WeightRegistry::builtin(), "builtin".to_string()),
        };
        Ok(Ctx { registry, registry_source, seed })
    }

    fn sequence(&self, name: &str, max_index: Option<usize>) -> anyhow::Result<WeightSequence<f64>> {
        let entry = self.registry.get(name)?;
        Ok(match max_index {
            Some(k) => entry.to_sequence_with(k)?,
            None => entry.to_sequence()?,
        })
    }

    /// Sequence long enough for order `k_max` work.
    fn sequence_at_least(&self, name: &str, k_max: usize) -> anyhow::Result<WeightSequence<f64>> {
        let seq = self.sequence(name, None)?;
        Ok(if seq.max_index() < k_max + 1 { seq.with_max_index(k_max + 1)? } else { seq })
    }

    fn report(&self, command: &str, inputs: Value, pass: bool, results: impl Serialize) -> anyhow::Result<Value> {
        Ok(json!({
            "command": command,
            "version": env!("CARGO_PKG_VERSION"),
            "seed": self.seed,
            "registry": self.registry_source,
            "inputs": inputs,
            "pass": pass,
            "results": serde_json::to_value(results)?,
        }))
    }
}

struct Outcome {
    report: Value,
    out: Option<PathBuf>,
    pass: bool,
}

fn emit(o: &Outcome) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(&o.report)? + "\n";
    match &o.out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn write_csv<R: Serialize>(path: &Path, rows: impl IntoIterator<Item = R>) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn read_text(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn parse_points(text: &str) -> anyhow::Result<Vec<(f64, f64)>> {
    if let Ok(v) = serde_json::from_str::<Vec<(f64, f64)>>(text) {
        return Ok(v);
    }
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| parse_pair(l).map_err(usage))
        .collect()
}

fn parse_numbers(text: &str) -> anyhow::Result<Vec<f64>> {
    if let Ok(v) = serde_json::from_str::<Vec<f64>>(text) {
        return Ok(v);
    }
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.parse::<f64>().map_err(|e| usage(format!("bad number '{l}': {e}"))))
        .collect()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![lo];
    }
    (0..n).map(|j| if j == n - 1 { hi } else { lo + (hi - lo) * j as f64 / (n - 1) as f64 }).collect()
}

fn classify_cmd(ctx: &Ctx, a: &SeqArgs) -> anyhow::Result<Outcome> {
    let seq = ctx.sequence(&a.seq, a.max_index)?;
    let v = classify(&seq);
    let inputs = json!({ "seq": a.seq, "K": seq.max_index() });
    Ok(Outcome { report: ctx.report("classify", inputs, true, v)?, out: a.out.clone(), pass: true })
}

fn convexify_cmd(ctx: &Ctx, a: &SeqArgs) -> anyhow::Result<Outcome> {
    let seq = ctx.sequence(&a.seq, a.max_index)?;
    let conv = log_convexify(&seq);
    let again = log_convexify(&conv.to_sequence()?);
    let idempotent = conv
        .log_minorant()
        .iter()
        .zip(again.log_minorant())
        .all(|(x, y)| (x - y).abs() <= 1e-12 * x.abs().max(1.0));
    let below = seq.log_values().iter().zip(conv.log_minorant()).all(|(m, c)| *c <= m + 1e-12 * m.abs().max(1.0));
    let pass = idempotent && below;
    let results = json!({
        "hullVertices": conv.hull_vertices(),
        "logMinorant": conv.log_minorant(),
        "idempotent": idempotent,
        "minorantBelowSource": below,
    });
    let inputs = json!({ "seq": a.seq, "K": seq.max_index() });
    Ok(Outcome { report: ctx.report("convexify", inputs, pass, results)?, out: a.out.clone(), pass })
}

fn bump_cmd(ctx: &Ctx, a: &BumpArgs) -> anyhow::Result<Outcome> {
    let seq = ctx.sequence_at_least(&a.seq, a.k_max)?;
    let b = make_bump(a.interval, a.epsilon, &seq, a.k_max)?;
    if let Some(path) = &a.csv {
        let rows = linspace(a.interval.0, a.interval.1, a.samples)
            .into_iter()
            .map(|x| Ok((x, b.eval(x, 0)?, b.eval(x, 1)?)))
            .collect::<Result<Vec<_>, CoreError>>()?;
        let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
        w.write_record(["x", "b", "b1"])?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
    }
    let pass = b.is_certified();
    let inputs = json!({ "seq": a.seq, "interval": a.interval, "epsilon": a.epsilon, "kMax": a.k_max });
    Ok(Outcome { report: ctx.report("bump", inputs, pass, b.certificate_report())?, out: a.out.clone(), pass })
}

fn transition_cmd(ctx: &Ctx, a: &TransitionArgs) -> anyhow::Result<Outcome> {
    let seq = ctx.sequence_at_least(&a.seq, a.k_max)?;
    let t = make_transition(a.delta, a.i, &seq, a.k_max)?;
    let norms = t.certified_norms();
    let within = norms
        .iter()
        .zip(t.bound_table())
        .skip(1)
        .all(|(n, b)| *n <= b * (1.0 + 1e-12));
    if let Some(path) = &a.csv {
        let rows = linspace(0.0, a.delta, a.samples)
            .into_iter()
            .map(|x| Ok((x, t.eval(x, 0)?, t.eval(x, 1)?)))
            .collect::<Result<Vec<_>, CoreError>>()?;
        let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
        w.write_record(["x", "s", "s1"])?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
    }
    let results = json!({
        "endValue": end_value(&t),
        "rawEndValue": t.raw_end_value(),
        "aFactor": t.a_factor(),
        "rescale": t.rescale(),
        "flatIndex": t.flat_index(),
        "certifiedNorms": norms,
        "boundTable": t.bound_table(),
        "withinBounds": within,
    });
    let inputs = json!({ "seq": a.seq, "delta": a.delta, "i": a.i, "kMax": a.k_max });
    Ok(Outcome { report: ctx.report("transition", inputs, within, results)?, out: a.out.clone(), pass: within })
}

fn atom_registry(ctx: &Ctx, o: &SparseOpts) -> anyhow::Result<Arc<AtomRegistry>> {
    let seq = ctx.sequence_at_least(&o.seq, o.k_max)?;
    Ok(AtomRegistry::shared(&seq, o.k_max)?)
}

fn sparse_cmd(ctx: &Ctx, c: &SparseCommand) -> anyhow::Result<Outcome> {
    match c {
        SparseCommand::Build { point, opts, out, csv, range, samples } => {
            let reg = atom_registry(ctx, opts)?;
            let map = build_core(&reg, *point, &Halving, opts.depth)?;
            let (lo, hi) = range.unwrap_or((point.0 - 2.0, point.0 + 2.0));
            if let Some(path) = csv {
                let rows = map.samples(lo, hi, *samples)?;
                let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
                w.write_record(["u", "h", "provenanceIndex"])?;
                for s in rows {
                    let idx = s.provenance.atom().map(|i| i.to_string()).unwrap_or_default();
                    w.write_record([s.u.to_string(), s.value.to_string(), idx])?;
                }
                w.flush()?;
            }
            let junctions: Vec<(f64, f64)> = map.junctions().iter().map(|(x, y)| (x.to_f64(), y.to_f64())).collect();
            let results = json!({
                "atoms": reg.len(),
                "transitionsCached": reg.transitions_cached(),
                "unitRise": map.unit_rise(),
                "junctions": junctions,
            });
            let inputs = json!({ "point": point, "seq": opts.seq, "kMax": opts.k_max, "depth": opts.depth });
            Ok(Outcome { report: ctx.report("sparse build", inputs, true, results)?, out: out.clone(), pass: true })
        }
        SparseCommand::Eval { point, u, opts, out } => {
            let reg = atom_registry(ctx, opts)?;
            let map = build_core(&reg, *point, &Halving, opts.depth)?;
            let mut rows = Vec::with_capacity(u.0.len());
            for &x in &u.0 {
                let e = map.eval_with_provenance(x)?;
                rows.push(json!({
                    "u": x,
                    "value": e.value.to_f64(),
                    "provenance": e.provenance,
                    "gapBound": e.gap_bound,
                }));
            }
            let inputs = json!({ "point": point, "u": u.0, "seq": opts.seq, "kMax": opts.k_max, "depth": opts.depth });
            Ok(Outcome { report: ctx.report("sparse eval", inputs, true, rows)?, out: out.clone(), pass: true })
        }
        SparseCommand::Report { points, queries, opts, out } => {
            let pts = parse_points(&read_text(points)?)?;
            let qs = parse_numbers(&read_text(queries)?)?;
            if pts.is_empty() || qs.is_empty() {
                bail!(usage("points and queries must be nonempty"));
            }
            let reg = atom_registry(ctx, opts)?;
            let rep = sparseness_report(&reg, &pts, &qs, &Halving, opts.depth)?;
            let pass = rep.all_resolved;
            let inputs = json!({
                "points": pts,
                "queries": qs,
                "seq": opts.seq,
                "kMax": opts.k_max,
                "depth": opts.depth,
            });
            Ok(Outcome { report: ctx.report("sparse report", inputs, pass, rep)?, out: out.clone(), pass })
        }
    }
}

fn wetzel_cmd(ctx: &Ctx, c: &WetzelCommand) -> anyhow::Result<Outcome> {
    match c {
        WetzelCommand::Family { seq, level, k_max, check_grid, limit, out, csv } => {
            let s = ctx.sequence_at_least(seq, *k_max)?;
            let g = build_flat_on_cantor(&s, *level, *k_max)?;
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
            let family = sample_family(&g, *limit, &mut rng);
            let grid = unit_grid(*check_grid);
            let check = two_value_check(&g, &family, &grid);
            if let Some(path) = csv {
                write_csv(path, grid.iter().map(|&x| GSample { x, g: g.value(x) }))?;
            }
            let results = json!({
                "windowCount": window_count(*level),
                "distinctMembers": distinct_windows(g.cantor()).len(),
                "checkedMembers": family.len(),
                "envelope": g.envelope(),
                "boundTable": g.bound_table(),
                "twoValue": check,
            });
            let pass = check.pass;
            let inputs = json!({ "seq": seq, "level": level, "kMax": k_max, "checkGrid": check_grid, "limit": limit });
            Ok(Outcome { report: ctx.report("wetzel family", inputs, pass, results)?, out: out.clone(), pass })
        }
        WetzelCommand::Equalizer { fns, interval, grid, delta, out } => {
            let list = fns.iter().map(|n| lookup(n)).collect::<Result<Vec<_>, _>>()?;
            let rep = equalizer_demo(&list, *interval, *grid, *delta)?;
            let pass = rep.discrete;
            let inputs = json!({ "fns": fns, "interval": interval, "grid": grid, "delta": delta });
            Ok(Outcome { report: ctx.report("wetzel equalizer", inputs, pass, rep)?, out: out.clone(), pass })
        }
    }
}

#[derive(Serialize)]
struct GSample {
    x: f64,
    g: f64,
}

fn load_profile(ctx: &Ctx, p: &ProfileArgs) -> anyhow::Result<(DerivativeNormProfile<f64>, Value)> {
    match (&p.profile, &p.measure) {
        (Some(path), None) => {
            let text = read_text(path)?;
            let (norms, interval) = match serde_json::from_str::<Value>(&text) {
                Ok(Value::Object(o)) => {
                    let norms: Vec<f64> = serde_json::from_value(o.get("norms").cloned().unwrap_or(Value::Null))
                        .map_err(|e| usage(format!("profile 'norms': {e}")))?;
                    let interval: (f64, f64) = match o.get("interval") {
                        Some(v) => serde_json::from_value(v.clone()).map_err(|e| usage(format!("profile 'interval': {e}")))?,
                        None => (0.0, 1.0),
                    };
                    (norms, interval)
                }
                _ => (parse_numbers(&text)?, (0.0, 1.0)),
            };
            let prof = DerivativeNormProfile::new(norms, interval, NormSource::SampledGrid)?;
            Ok((prof, json!({ "profile": path.display().to_string() })))
        }
        (None, Some(name)) => {
            let measured = if name == "bump" {
                let seq = ctx.sequence_at_least(&p.seq, p.order.max(DEFAULT_K_MAX))?;
                let b = make_bump((0.0, 1.0), 1.0, &seq, p.order.max(DEFAULT_K_MAX))?;
                measure_norms(&b, (0.0, 1.0), p.order, 2001)?
            } else {
                measure_norms(&lookup(name)?, (0.0, std::f64::consts::TAU), p.order, 2001)?
            };
            Ok((measured.profile, json!({ "measure": name, "order": p.order, "converged": measured.converged })))
        }
        _ => Err(usage("give exactly one of --profile or --measure")),
    }
}

fn envelope_cmd(ctx: &Ctx, c: &EnvelopeCommand) -> anyhow::Result<Outcome> {
    match c {
        EnvelopeCommand::Fit { profile, b_grid, out } => {
            let (prof, source) = load_profile(ctx, profile)?;
            let seq = ctx.sequence_at_least(&profile.seq, prof.order())?;
            let fits = fit_envelope(&prof, &seq, &b_grid.0)?;
            let pass = fits.iter().all(|f| f.feasible);
            let best = fits.iter().min_by(|a, b| a.beta.total_cmp(&b.beta)).copied();
            let results = json!({ "norms": prof.norms(), "fits": fits, "smallestBeta": best });
            let inputs = json!({ "source": source, "seq": profile.seq, "bGrid": b_grid.0 });
            Ok(Outcome { report: ctx.report("envelope fit", inputs, pass, results)?, out: out.clone(), pass })
        }
        EnvelopeCommand::Check { profile, beta, big_b, out } => {
            let (prof, source) = load_profile(ctx, profile)?;
            let seq = ctx.sequence_at_least(&profile.seq, prof.order())?;
            let fit = check_membership(&prof, &seq, *beta, *big_b)?;
            let inputs = json!({ "source": source, "seq": profile.seq, "beta": beta, "B": big_b });
            let pass = fit.feasible;
            Ok(Outcome { report: ctx.report("envelope check", inputs, pass, fit)?, out: out.clone(), pass })
        }
    }
}

fn refute_cmd(ctx: &Ctx, a: &RefuteArgs) -> anyhow::Result<Outcome> {
    if a.degree == 0 || a.per_column == 0 || a.trials == 0 {
        bail!(usage("degree, per-column and trials must be positive"));
    }
    let bound = (a.per_column as u128)
        .checked_pow(a.degree as u32 + 1)
        .filter(|b| *b <= 4096)
        .ok_or_else(|| usage("per-column^(degree+1) must stay at most 4096"))? as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut trials = Vec::with_capacity(a.trials);
    let mut pass = true;
    for _ in 0..a.trials {
        let size = rng.gen_range(1..=bound);
        let (fam, cols) = random_instance(&mut rng, a.degree, a.per_column, size)?;
        match pigeonhole_refine(&fam, &cols, a.per_column) {
            Ok(chain) => {
                let ok = chain.sizes.last() == Some(&1) && fam.len() as u128 <= chain.bound;
                pass &= ok;
                trials.push(json!({ "size": size, "chain": chain, "ok": ok }));
            }
            Err(e) => {
                pass = false;
                trials.push(json!({ "size": size, "error": e.to_string(), "ok": false }));
            }
        }
    }
    let inputs = json!({ "degree": a.degree, "perColumn": a.per_column, "trials": a.trials });
    let results = json!({ "bound": bound, "trials": trials });
    Ok(Outcome { report: ctx.report("refute-poly", inputs, pass, results)?, out: a.out.clone(), pass })
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    let ctx = Ctx::new(cli.registry.as_deref(), cli.seed)?;
    let outcome = match &cli.command {
        Command::Classify(a) => classify_cmd(&ctx, a),
        Command::Convexify(a) => convexify_cmd(&ctx, a),
        Command::Bump(a) => bump_cmd(&ctx, a),
        Command::Transition(a) => transition_cmd(&ctx, a),
        Command::Sparse(c) => sparse_cmd(&ctx, c),
        Command::Wetzel(c) => wetzel_cmd(&ctx, c),
        Command::Envelope(c) => envelope_cmd(&ctx, c),
        Command::RefutePoly(a) => refute_cmd(&ctx, a),
    }?;
    emit(&outcome)?;
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spec() {
        let g = parse_grid("0.5:4:0.1").unwrap().0;
        assert_eq!(g.len(), 36);
        assert!((g[35] - 4.0).abs() < 1e-12);
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("1:2").is_err());
    }

    #[test]
    fn point_files() {
        assert_eq!(parse_points("[[1, 2], [3.5, -1]]").unwrap(), vec![(1.0, 2.0), (3.5, -1.0)]);
        assert_eq!(parse_points("1,2\n# c\n\n3.5, -1\n").unwrap(), vec![(1.0, 2.0), (3.5, -1.0)]);
        assert_eq!(parse_numbers("0.5\n-2\n").unwrap(), vec![0.5, -2.0]);
        assert!(parse_numbers("x").is_err());
    }

    #[test]
    fn cli_shape() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
