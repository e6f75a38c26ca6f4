mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dynspec::cantor::{build_cover, preset, CantorPresentation};
use dynspec::dimension::dimension_bounds_with;
use dynspec::horseshoe::{main_theorem_demo, DemoConfig};
use dynspec::numeric::rational::{self, to_f64};
use dynspec::numeric::{parse_surd, QuadSurd};
use dynspec::spectra::{spectrum_scan, verify_limsup_identity, verify_sup_identity, ShiftObservable, SurgeryContext};
use dynspec::sumsets::{
    auto_interval_op, certify_op, cover_contains, image_cover, measure_upper_bound, self_similar_cover, Certification, SumOp,
};
use dynspec::symbolic::{random_eventually_periodic, SymbolicSequence, TransitionMatrix};
use dynspec::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use svg::{bounds_chart, RowPlot};

/// Certified dimension bounds, dynamical spectra, surgery checks and Cantor sumsets.
#[derive(Parser, Debug)]
#[command(name = "dynspec", version)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Hausdorff dimension bounds of a regular Cantor set.
    Dimension(DimensionArgs),
    /// Markov and Lagrange spectra of an observable over a subshift.
    #[command(subcommand)]
    Spectrum(SpectrumCmd),
    /// Sup and limsup identities of the splice construction (same as `spectrum surgery-check`).
    SurgeryCheck(SurgeryArgs),
    /// Covers and interval certificates for K + K' or K - K'.
    Sumset(SumsetArgs),
    #[command(subcommand)]
    Demo(DemoCmd),
}

#[derive(Args, Debug)]
struct SetSource {
    /// Preset: c<N>, kalpha:<alpha>.
    #[arg(long, conflicts_with = "file")]
    preset: Option<String>,
    /// Presentation JSON file.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DimensionArgs {
    #[command(flatten)]
    set: SetSource,
    #[arg(long, default_value_t = 8)]
    depth: usize,
    /// Constant C of the pressure equation.
    #[arg(long, default_value = "1")]
    constant_c: String,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Report every depth from 1 and plot the convergence.
    #[arg(long)]
    sweep: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum SpectrumCmd {
    /// Markov values of all periodic orbits up to a period.
    Scan(ScanArgs),
    SurgeryCheck(SurgeryArgs),
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// full<digits> (e.g. full12) or golden.
    #[arg(long, conflicts_with = "sft")]
    preset: Option<String>,
    /// Transition matrix JSON file.
    #[arg(long)]
    sft: Option<PathBuf>,
    /// `cf` or an observable JSON file.
    #[arg(long, default_value = "cf")]
    observable: String,
    /// Continued-fraction digit of each letter, comma separated (default 1, 2, ...).
    #[arg(long)]
    digits: Option<String>,
    #[arg(long, default_value_t = 6)]
    max_period: usize,
    #[arg(long, default_value_t = 5)]
    gaps: usize,
    /// `.csv` for value rows, otherwise JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SurgeryArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Op {
    Plus,
    Minus,
}

#[derive(Args, Debug)]
struct SumsetArgs {
    /// Preset for both operands.
    #[arg(long, conflicts_with_all = ["left", "right"])]
    preset: Option<String>,
    /// Left operand: preset name or presentation JSON file.
    #[arg(long)]
    left: Option<String>,
    /// Right operand: preset name or presentation JSON file.
    #[arg(long)]
    right: Option<String>,
    #[arg(long, value_enum, default_value_t = Op::Plus)]
    op: Op,
    #[arg(long, default_value_t = 5)]
    depth: usize,
    /// `auto` or `lo,hi` (surd expressions).
    #[arg(long)]
    certify: Option<String>,
    /// Fraction of the hull trimmed at each end by `--certify auto`.
    #[arg(long, default_value = "1/1000")]
    margin: String,
    /// Explicit cover depth used as the base of a self-similar cover beyond it.
    #[arg(long, default_value_t = 8)]
    explicit_max: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum DemoCmd {
    /// The splice pipeline on a product horseshoe, stage by stage.
    MainTheorem(DemoArgs),
}

#[derive(Args, Debug)]
struct DemoArgs {
    /// Config JSON file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in config: demo or kalpha04.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Fail {
    Usage(String),
    Compute(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::Input(m) => Fail::Usage(m),
            e => Fail::Compute(e),
        }
    }
}

type Res<T> = Result<T, Fail>;

fn out_path(p: &Path) -> PathBuf {
    match std::env::var_os("DYNSPEC_OUT_DIR") {
        Some(d) if p.is_relative() => Path::new(&d).join(p),
        _ => p.to_path_buf(),
    }
}

fn write(p: &Path, body: &str) -> Res<()> {
    let p = out_path(p);
    if let Some(d) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(d).map_err(|e| Fail::Usage(format!("{}: {e}", d.display())))?;
    }
    std::fs::write(&p, body).map_err(|e| Fail::Usage(format!("{}: {e}", p.display())))
}

fn emit(out: &Option<PathBuf>, v: &Value) -> Res<()> {
    let s = serde_json::to_string_pretty(v).unwrap() + "\n";
    match out {
        Some(p) => write(p, &s),
        None => {
            print!("{s}");
            Ok(())
        }
    }
}

fn read_json(p: &Path) -> Res<Value> {
    let s = std::fs::read_to_string(p).map_err(|e| Fail::Usage(format!("{}: {e}", p.display())))?;
    serde_json::from_str(&s).map_err(|e| Fail::Usage(format!("{}: {e}", p.display())))
}

fn load_set(src: &SetSource) -> Res<CantorPresentation> {
    match (&src.preset, &src.file) {
        (Some(p), _) => Ok(preset(p)?),
        (None, Some(f)) => Ok(CantorPresentation::from_json(&read_json(f)?)?),
        _ => Err(Fail::Usage("give --preset or --file".into())),
    }
}

fn load_named(s: &str) -> Res<CantorPresentation> {
    let p = Path::new(s);
    if p.extension().is_some_and(|e| e == "json") {
        Ok(CantorPresentation::from_json(&read_json(p)?)?)
    } else {
        Ok(preset(s)?)
    }
}

/// `full<digits>` (letter i carries the i-th digit) or `golden`.
fn sft_preset(name: &str) -> Res<(TransitionMatrix, Option<Vec<u64>>)> {
    if name == "golden" {
        return Ok((TransitionMatrix::golden_mean(), None));
    }
    if let Some(d) = name.strip_prefix("full").filter(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit())) {
        let digits: Vec<u64> = d.chars().map(|c| c.to_digit(10).unwrap() as u64).collect();
        if digits.contains(&0) {
            return Err(Fail::Usage("digits must be positive".into()));
        }
        return Ok((TransitionMatrix::full(digits.len()), Some(digits)));
    }
    Err(Fail::Usage(format!("unknown SFT preset {name:?}")))
}

fn dimension(a: &DimensionArgs) -> Res<Value> {
    let k = load_set(&a.set)?;
    if a.depth == 0 {
        return Err(Fail::Usage("depth must be at least 1".into()));
    }
    let c = rational::parse(&a.constant_c)?;
    let depths: Vec<usize> = if a.sweep || a.svg.is_some() { (1..=a.depth).collect() } else { vec![a.depth] };
    let rows = depths.iter().map(|&n| dimension_bounds_with(&k, n, &c, a.tol)).collect::<Result<Vec<_>, _>>()?;
    if let Some(p) = &a.svg {
        let pts: Vec<_> = rows.iter().map(|b| (b.depth, b.alpha, b.beta)).collect();
        write(p, &bounds_chart(&format!("dimension bounds of {}", k.name), &pts))?;
    }
    let last = rows.last().unwrap();
    Ok(json!({
        "set": k.name,
        "depth": a.depth,
        "enclosure": {"lower": last.alpha, "upper": last.beta},
        "bounds": last,
        "sweep": if rows.len() > 1 { json!(rows) } else { Value::Null },
    }))
}

fn scan(a: &ScanArgs) -> Res<Value> {
    let (b, preset_digits) = match (&a.preset, &a.sft) {
        (Some(p), _) => sft_preset(p)?,
        (None, Some(f)) => (TransitionMatrix::from_json(&read_json(f)?)?, None),
        _ => return Err(Fail::Usage("give --preset or --sft".into())),
    };
    let f = if a.observable == "cf" {
        let digits = match &a.digits {
            Some(d) => d
                .split(',')
                .map(|x| x.trim().parse::<u64>().map_err(|_| Fail::Usage(format!("bad digit {x:?}"))))
                .collect::<Res<Vec<_>>>()?,
            None => preset_digits.unwrap_or_else(|| (1..=b.size() as u64).collect()),
        };
        if digits.len() != b.size() {
            return Err(Fail::Usage("one digit per letter".into()));
        }
        ShiftObservable::continued_fraction(digits)?
    } else {
        ShiftObservable::from_json(&read_json(Path::new(&a.observable))?, &b)?
    };
    let s = spectrum_scan(&f, &b, a.max_period, a.gaps)?;
    if let Some(p) = &a.svg {
        let vals: Vec<f64> = s.values.iter().map(|v| v.value.to_f64()).collect();
        let plot = RowPlot::new(&format!("Markov values of periodic orbits, period <= {}", a.max_period)).ticks("values", vals, "#236");
        write(p, &plot.render())?;
    }
    let v = json!({
        "observable": f.to_json(),
        "matrix": b.to_json(),
        "max_period": s.max_period,
        "orbits": s.orbits,
        "min": s.values.first().map(|v| json!({"exact": v.value.to_string(), "decimal": v.decimal})),
        "max": s.values.last().map(|v| json!({"exact": v.value.to_string(), "decimal": v.decimal})),
        "scan": s,
    });
    if let Some(p) = a.out.as_ref().filter(|p| p.extension().is_some_and(|e| e == "csv")) {
        write(p, &s.to_csv())?;
        return Ok(Value::Null);
    }
    Ok(v)
}

/// Config: `sft` (matrix JSON) or `preset`, `observable`, `context`, `points`,
/// optional `random: {count, seed, max_core, max_period}` and `horizons`.
fn surgery(a: &SurgeryArgs) -> Res<Value> {
    let cfg = read_json(&a.config)?;
    let (b, digits) = match (cfg.get("preset").and_then(Value::as_str), cfg.get("sft")) {
        (Some(p), _) => sft_preset(p)?,
        (None, Some(m)) => (TransitionMatrix::from_json(m)?, None),
        _ => return Err(Fail::Usage("surgery config needs `sft` or `preset`".into())),
    };
    let f = match cfg.get("observable") {
        Some(Value::String(s)) if s == "cf" => {
            ShiftObservable::continued_fraction(digits.unwrap_or_else(|| (1..=b.size() as u64).collect()))?
        }
        Some(v) => ShiftObservable::from_json(v, &b)?,
        None => return Err(Fail::Usage("surgery config needs `observable`".into())),
    };
    let ctx = SurgeryContext::from_json(cfg.get("context").ok_or_else(|| Fail::Usage("missing `context`".into()))?, &b)?;
    let mut points: Vec<SymbolicSequence> = match cfg.get("points").and_then(Value::as_array) {
        Some(ps) => ps.iter().map(SymbolicSequence::from_json).collect::<Result<_, _>>()?,
        None => vec![],
    };
    if let Some(r) = cfg.get("random") {
        let n = r.get("count").and_then(Value::as_u64).unwrap_or(100) as usize;
        let seed = r.get("seed").and_then(Value::as_u64).unwrap_or(0);
        let mc = r.get("max_core").and_then(Value::as_u64).unwrap_or(6) as usize;
        let mp = r.get("max_period").and_then(Value::as_u64).unwrap_or(3) as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        points.extend((0..n).map(|_| random_eventually_periodic(&mut rng, &b, mc, mp)));
    }
    if points.is_empty() {
        return Err(Fail::Usage("no points: give `points` or `random`".into()));
    }
    let horizons: Vec<usize> = match cfg.get("horizons") {
        Some(h) => serde_json::from_value(h.clone()).map_err(|e| Fail::Usage(format!("horizons: {e}")))?,
        None => vec![2, 4, 8],
    };
    let mut rows = Vec::new();
    let (mut sup_ok, mut lim_ok) = (0, 0);
    for x in &points {
        let s = verify_sup_identity(&f, x, &ctx)?;
        let l = verify_limsup_identity(&f, x, &ctx, &horizons)?;
        sup_ok += s.holds as usize;
        lim_ok += l.holds as usize;
        rows.push(json!({"x": x, "sup": s, "limsup": l}));
    }
    Ok(json!({
        "context": ctx,
        "observable": f.to_json(),
        "instances": points.len(),
        "sup_holds": sup_ok,
        "limsup_holds": lim_ok,
        "all_hold": sup_ok == points.len() && lim_ok == points.len(),
        "results": rows,
    }))
}

fn sumset(a: &SumsetArgs) -> Res<Value> {
    let (k, k2) = match (&a.preset, &a.left, &a.right) {
        (Some(p), _, _) => (load_named(p)?, load_named(p)?),
        (None, Some(l), Some(r)) => (load_named(l)?, load_named(r)?),
        _ => return Err(Fail::Usage("give --preset, or --left and --right".into())),
    };
    if a.depth == 0 {
        return Err(Fail::Usage("depth must be at least 1".into()));
    }
    let op = match a.op {
        Op::Plus => SumOp::Plus,
        Op::Minus => SumOp::Minus,
    };
    let cover = if a.depth > a.explicit_max {
        self_similar_cover(&k, &k2, op, a.explicit_max, a.depth).unwrap_or_else(|_| image_cover(&op.poly(), &k, &k2, a.depth))
    } else {
        image_cover(&op.poly(), &k, &k2, a.depth)
    };
    let measure = measure_upper_bound(&cover);
    let mut v = json!({
        "left": k.name,
        "right": k2.name,
        "op": op,
        "depth": a.depth,
        "kind": cover.kind,
        "components": cover.union.len(),
        "measure_upper_bound": {"exact": measure.to_string(), "decimal": to_f64(&measure)},
        "hull": cover.union.hull().map(|h| json!([h.lo.to_string(), h.hi.to_string()])),
    });
    if let Some(p) = &a.csv {
        write(p, &cover.union.to_csv())?;
    }
    if let Some(p) = &a.svg {
        let title = format!("{} {} {} at depth {}", k.name, if a.op as u8 == 0 { "+" } else { "-" }, k2.name, cover.depth);
        let mut plot = RowPlot::new(&title);
        let base = a.depth.min(a.explicit_max).min(6);
        plot = plot.intervals(&k.name, build_cover(&k, base).outer_intervals().iter().map(|i| i.to_f64_pair()).collect(), "#555");
        plot = plot.intervals(&k2.name, build_cover(&k2, base).outer_intervals().iter().map(|i| i.to_f64_pair()).collect(), "#555");
        plot = plot.intervals("cover", cover.union.to_f64_pairs(), "#236");
        write(p, &plot.render())?;
    }
    if let Some(c) = &a.certify {
        let (lo, hi) = if c == "auto" {
            let m = rational::parse(&a.margin)?;
            auto_interval_op(&k, &k2, op, &m).ok_or_else(|| Fail::Usage("no exact hull for --certify auto".into()))?
        } else {
            let parts: Vec<&str> = c.split(',').collect();
            if parts.len() != 2 {
                return Err(Fail::Usage("--certify takes auto or lo,hi".into()));
            }
            (parse_surd(parts[0])?, parse_surd(parts[1])?)
        };
        let cert = certify_op(&k, &k2, op, &lo, &hi, a.depth.min(a.explicit_max));
        let covered = cover.is_explicit().then(|| cover_contains(&cover, &lo, &hi));
        v["certificate"] = json!(cert);
        v["certified"] = json!(matches!(cert, Certification::Certified(_)));
        v["interval"] = json!({"lo": surd_json(&lo), "hi": surd_json(&hi)});
        v["cover_has_no_gap_inside"] = json!(covered);
    }
    Ok(v)
}

fn surd_json(x: &QuadSurd) -> Value {
    let e = x.enclose(64);
    json!({"exact": x.to_string(), "enclosure": [e.lo.to_string(), e.hi.to_string()]})
}

fn demo(a: &DemoArgs) -> Res<Value> {
    let cfg = match (&a.config, a.preset.as_deref()) {
        (Some(p), _) => DemoConfig::from_json(&read_json(p)?)?,
        (None, Some("demo") | None) => DemoConfig::demo(),
        (None, Some("kalpha04")) => DemoConfig::kalpha04(),
        (None, Some(other)) => return Err(Fail::Usage(format!("unknown demo preset {other:?}"))),
    };
    let r = main_theorem_demo(&cfg)?;
    let stem = cfg.name.clone();
    let dir = a.out.as_ref().and_then(|p| p.parent().map(Path::to_path_buf)).unwrap_or_default();
    let mut files = vec![];
    for s in &r.stages {
        let p = dir.join(format!("{stem}-stage{}.json", s.stage));
        write(&p, &(serde_json::to_string_pretty(s).unwrap() + "\n"))?;
        files.push(p.display().to_string());
    }
    let mut plot = RowPlot::new(&format!("{}: image of f along the splice", cfg.name));
    if let Some((cs, cu)) = &r.artifacts.factor_covers {
        for (name, c) in [("stable", cs), ("unstable", cu)] {
            let p = dir.join(format!("{stem}-{name}-cover.csv"));
            let mut body = String::from("lo,hi\n");
            for iv in c.outer_intervals() {
                body.push_str(&format!("{},{}\n", iv.lo, iv.hi));
            }
            write(&p, &body)?;
            files.push(p.display().to_string());
        }
    }
    if let Some(img) = &r.artifacts.image {
        let p = dir.join(format!("{stem}-image-cover.csv"));
        write(&p, &img.union.to_csv())?;
        files.push(p.display().to_string());
        plot = plot.intervals("image cover", img.union.to_f64_pairs(), "#236");
    }
    if let Some((lo, hi)) = &r.interval {
        let (lo, hi) = (lo.parse::<f64>().unwrap_or(0.0), hi.parse::<f64>().unwrap_or(0.0));
        plot = plot.intervals("certified", vec![(lo, hi)], "#2a6");
    }
    if !r.artifacts.sampled_values.is_empty() {
        plot = plot.ticks("sampled", r.artifacts.sampled_values.iter().map(to_f64).collect(), "#c33");
    }
    if r.artifacts.image.is_some() {
        let p = dir.join(format!("{stem}-overview.svg"));
        write(&p, &plot.render())?;
        files.push(p.display().to_string());
    }
    let mut v = serde_json::to_value(&r).unwrap();
    v["artifacts"] = json!(files);
    Ok(v)
}

fn run(cli: &Cli) -> Res<()> {
    match &cli.cmd {
        Cmd::Dimension(a) => emit(&a.out, &dimension(a)?),
        Cmd::Spectrum(SpectrumCmd::Scan(a)) => {
            let v = scan(a)?;
            if v.is_null() {
                Ok(())
            } else {
                emit(&a.out, &v)
            }
        }
        Cmd::Spectrum(SpectrumCmd::SurgeryCheck(a)) | Cmd::SurgeryCheck(a) => emit(&a.out, &surgery(a)?),
        Cmd::Sumset(a) => emit(&a.out, &sumset(a)?),
        Cmd::Demo(DemoCmd::MainTheorem(a)) => emit(&a.out, &demo(a)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 || rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("{}", json!({"error": "usage", "message": "--threads must be positive"}));
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Usage(m)) => {
            eprintln!("{}", json!({"error": "usage", "message": m}));
            ExitCode::from(2)
        }
        Err(Fail::Compute(e)) => {
            eprintln!("{}", json!({"error": "computation", "message": e.to_string()}));
            ExitCode::from(1)
        }
    }
}
