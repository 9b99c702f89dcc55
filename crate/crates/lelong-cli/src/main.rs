//! Command-line front end over the `lelong` crate: parse inputs,
//! dispatch one operation, print one report. Reports are plain text by
//! default and JSON under `--json`; either form is byte-stable for
//! fixed inputs and seeds. Exit code 0 means the run succeeded and any
//! requested check passed, 1 means a check ran and failed, 2 means the
//! input was rejected.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use lelong::fixtures::{gen_example, random_current, ExampleParams, Fact, RandomSpec};
use lelong::geom::{m_invariant, Line, LocatedPoint, PointConfig, ProjPoint};
use lelong::green::{
    certify_zero_locus, check_prop21, construct_lemma22, construct_pencil, construct_prop23,
    construct_prop24, estimate_gamma, GreenFunction, Prop24Outcome,
};
use lelong::poly::is_coprime;
use lelong::theorems::{check_prop310, check_thm11, check_thm12, check_thm38, classify_level_set};
use lelong::{Current, GaussianRational, Rational, Shape};

#[derive(Parser)]
#[command(
    name = "lelong-cli",
    version,
    about = "Exact reports over divisor currents, their level sets and Green functions"
)]
struct Cli {
    /// Emit the report as JSON instead of plain text.
    #[arg(long, global = true)]
    json: bool,

    /// Working precision in bits for points that need numeric
    /// refinement (default 256).
    #[arg(long, global = true, value_name = "BITS")]
    precision_bits: Option<u32>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Total and residual mass of a current with its component list.
    Mass {
        /// Path to a current in JSON form.
        #[arg(long, value_name = "FILE")]
        current: PathBuf,
    },

    /// Exact Lelong number bracket at one projective point.
    Lelong {
        #[arg(long, value_name = "FILE")]
        current: PathBuf,
        /// Point as a JSON coordinate array, e.g. "[0,0,1]".
        #[arg(long, value_name = "JSON")]
        point: String,
    },

    /// Upper level set of the Lelong numbers at a threshold.
    Levelset {
        #[arg(long, value_name = "FILE")]
        current: PathBuf,
        /// Threshold, an exact rational like "2/5" or an integer.
        #[arg(long, value_name = "RAT")]
        alpha: String,
        /// Require strictly larger Lelong numbers (default: at least).
        #[arg(long)]
        strict: bool,
        /// Also emit floating-point coordinates for external tools.
        #[arg(long)]
        dump_points: bool,
    },

    /// Classify the strict upper level set against the theorem shapes.
    Classify {
        #[arg(long, value_name = "FILE")]
        current: PathBuf,
        #[arg(long, value_name = "RAT")]
        alpha: String,
    },

    /// Collinearity and conic counts of a point configuration.
    Invariants {
        /// Projective points as a JSON array of coordinate arrays,
        /// inline or a path to a file holding the same.
        #[arg(long, value_name = "JSON|FILE")]
        points: String,
        /// Restrict to curves of one degree (1 or 2).
        #[arg(long, value_name = "J")]
        degree: Option<u32>,
    },

    /// Run one of the Green-function constructions over affine points.
    Green {
        #[arg(long, value_enum, value_name = "KIND")]
        construct: ConstructKind,
        /// Affine points as a JSON array of coordinate arrays, inline
        /// or a path to a file.
        #[arg(long, value_name = "JSON|FILE")]
        points: String,
        /// Extra affine point for the eight-point construction.
        #[arg(long, value_name = "JSON")]
        extra: Option<String>,
        /// Radii for a growth-rate estimate, comma separated and
        /// increasing, e.g. "1e4,1e6".
        #[arg(long, value_name = "R1,R2,..")]
        radii: Option<String>,
        /// Sample directions for the growth-rate estimate.
        #[arg(long, default_value_t = 8, value_name = "N")]
        directions: usize,
        /// Seed for direction sampling (required with --radii).
        #[arg(long, value_name = "SEED")]
        seed: Option<u64>,
    },

    /// Print a worked example and optionally re-check its facts.
    Example {
        /// Identifier between "3.2" and "3.9".
        #[arg(long, value_name = "ID")]
        id: String,
        /// Number of pencil lines, for the families that take one.
        #[arg(long, value_name = "M")]
        m: Option<u32>,
        /// Represented terms, for the convergent family.
        #[arg(long, value_name = "K")]
        truncation: Option<u32>,
        /// Re-check every stated fact; exit 1 if any fails.
        #[arg(long)]
        check: bool,
        /// Also emit floating-point coordinates for external tools.
        #[arg(long)]
        dump_points: bool,
    },

    /// Check one of the structure statements, on a given current or on
    /// seeded random ones.
    VerifyTheorem {
        /// Which statement: 1.1, 1.2, 3.8 or 3.10.
        #[arg(long, value_name = "ID")]
        which: String,
        /// Threshold; defaults per statement when fuzzing.
        #[arg(long, value_name = "RAT")]
        alpha: Option<String>,
        /// Path to a current for a single check.
        #[arg(long, value_name = "FILE")]
        current: Option<PathBuf>,
        /// First distinguished point for 3.8, as a JSON array.
        #[arg(long, value_name = "JSON")]
        q1: Option<String>,
        /// Second distinguished point for 3.8, as a JSON array.
        #[arg(long, value_name = "JSON")]
        q2: Option<String>,
        /// Collinear triple for 3.10, as a JSON array of three points.
        #[arg(long, value_name = "JSON")]
        triple: Option<String>,
        /// Number of seeded random currents (1.1 and 1.2 only).
        #[arg(long, value_name = "N")]
        fuzz: Option<u64>,
        /// Seed for the random currents (required with --fuzz).
        #[arg(long, value_name = "SEED")]
        seed: Option<u64>,
        /// Ambient dimension for fuzzing: 2 (with conics) or, for 1.1,
        /// 3 (lines only).
        #[arg(long, default_value_t = 2, value_name = "DIM")]
        ambient: usize,
    },

    /// Check the pole-weight inequality for a current against a
    /// constructed Green function.
    Prop21 {
        #[arg(long, value_name = "FILE")]
        current: PathBuf,
        /// Path to a Green function in JSON form, as emitted by the
        /// green subcommand under "green".
        #[arg(long, value_name = "FILE")]
        green: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstructKind {
    /// Independent linear forms through points in general position in
    /// dimension at least 3.
    Spatial,
    /// Conic pencil through three or four plane points.
    Pencil,
    /// Quartic pair for seven plane points, five of them on a conic.
    SevenPoint,
    /// Cubic or quartic family for seven plane points plus one more.
    EightPoint,
}

/// One run's output: the echoed command line, a digest of every input,
/// the results with exact values as rational strings, the certificates
/// that were genuinely re-checked, and any warnings about inexactness.
#[derive(Serialize)]
struct Report {
    command: String,
    inputs: BTreeMap<String, String>,
    results: Value,
    certificates: Vec<String>,
    warnings: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    let bits = cli.precision_bits.unwrap_or(lelong::DEFAULT_PRECISION_BITS);
    let mut report = Report {
        command: std::env::args().skip(1).collect::<Vec<_>>().join(" "),
        inputs: BTreeMap::new(),
        results: Value::Null,
        certificates: Vec::new(),
        warnings: Vec::new(),
    };
    let pass = match &cli.command {
        Command::Mass { current } => cmd_mass(&mut report, current),
        Command::Lelong { current, point } => cmd_lelong(&mut report, current, point),
        Command::Levelset { current, alpha, strict, dump_points } => {
            cmd_levelset(&mut report, current, alpha, *strict, *dump_points, bits)
        }
        Command::Classify { current, alpha } => cmd_classify(&mut report, current, alpha, bits),
        Command::Invariants { points, degree } => cmd_invariants(&mut report, points, *degree),
        Command::Green { construct, points, extra, radii, directions, seed } => cmd_green(
            &mut report,
            *construct,
            points,
            extra.as_deref(),
            radii.as_deref(),
            *directions,
            *seed,
        ),
        Command::Example { id, m, truncation, check, dump_points } => {
            cmd_example(&mut report, id, *m, *truncation, *check, *dump_points)
        }
        Command::VerifyTheorem { which, alpha, current, q1, q2, triple, fuzz, seed, ambient } => {
            cmd_verify(
                &mut report,
                which,
                alpha.as_deref(),
                current.as_deref(),
                q1.as_deref(),
                q2.as_deref(),
                triple.as_deref(),
                *fuzz,
                *seed,
                *ambient,
            )
        }
        Command::Prop21 { current, green } => cmd_prop21(&mut report, current, green),
    }?;
    if cli.json {
        let body = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
        println!("{body}");
    } else {
        print!("{}", render_text(&report));
    }
    Ok(pass)
}

// ---------------------------------------------------------------- inputs

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn read_file(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn record_file(report: &mut Report, key: &str, path: &Path, bytes: &[u8]) {
    report
        .inputs
        .insert(key.into(), format!("{} (fnv1a64 {:016x})", path.display(), fnv1a64(bytes)));
}

fn record_inline(report: &mut Report, key: &str, text: &str) {
    report.inputs.insert(key.into(), text.into());
}

fn load_current(report: &mut Report, path: &Path) -> Result<Current, String> {
    let text = read_file(path)?;
    record_file(report, "current", path, text.as_bytes());
    serde_json::from_str(&text).map_err(|e| format!("malformed current in {}: {e}", path.display()))
}

/// Inline JSON when the argument starts with a bracket, otherwise the
/// contents of the file it names.
fn inline_or_file(report: &mut Report, key: &str, arg: &str) -> Result<String, String> {
    let t = arg.trim();
    if t.starts_with('[') || t.starts_with('{') {
        record_inline(report, key, t);
        Ok(t.to_string())
    } else {
        let path = Path::new(t);
        let text = read_file(path)?;
        record_file(report, key, path, text.as_bytes());
        Ok(text)
    }
}

fn parse_rational(text: &str) -> Result<Rational, String> {
    let s = text.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| format!("not a rational: {text:?}"))?;
    let den: BigInt = den.parse().map_err(|_| format!("not a rational: {text:?}"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in {text:?}"));
    }
    Ok(Rational::new(num, den))
}

fn parse_point(text: &str) -> Result<ProjPoint, String> {
    serde_json::from_str(text).map_err(|e| format!("malformed point {text:?}: {e}"))
}

fn es(e: lelong::Error) -> String {
    e.to_string()
}

fn jv<T: Serialize>(v: &T) -> Result<Value, String> {
    serde_json::to_value(v).map_err(|e| e.to_string())
}

// ---------------------------------------------------------------- output

fn scalar_text(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("null".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(_) | Value::Object(_) => None,
    }
}

fn push_value(out: &mut String, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                if let Some(s) = scalar_text(val) {
                    let _ = writeln!(out, "{pad}{k}: {s}");
                } else if matches!(val, Value::Array(a) if a.iter().all(|x| scalar_text(x).is_some()))
                {
                    let _ = writeln!(out, "{pad}{k}: {}", compact(val));
                } else {
                    let _ = writeln!(out, "{pad}{k}:");
                    push_value(out, val, depth + 1);
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                if let Some(s) = scalar_text(item) {
                    let _ = writeln!(out, "{pad}- {s}");
                } else {
                    let _ = writeln!(out, "{pad}- {}", compact(item));
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", scalar_text(other).unwrap_or_default());
        }
    }
}

fn compact(v: &Value) -> String {
    serde_json::to_string(v).unwrap_or_default()
}

fn render_text(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "command: {}", report.command);
    if !report.inputs.is_empty() {
        let _ = writeln!(out, "inputs:");
        for (k, v) in &report.inputs {
            let _ = writeln!(out, "  {k}: {v}");
        }
    }
    let _ = writeln!(out, "results:");
    push_value(&mut out, &report.results, 1);
    if !report.certificates.is_empty() {
        let _ = writeln!(out, "certificates:");
        for c in &report.certificates {
            let _ = writeln!(out, "  - {c}");
        }
    }
    if !report.warnings.is_empty() {
        let _ = writeln!(out, "warnings:");
        for w in &report.warnings {
            let _ = writeln!(out, "  - {w}");
        }
    }
    out
}

fn located_text(p: &LocatedPoint) -> String {
    let coords: Vec<String> = p.coords().iter().map(|c| c.to_string()).collect();
    if p.is_exact() {
        format!("[{}]", coords.join(", "))
    } else {
        format!("[{}] (within 2^{})", coords.join(", "), p.err_bound().to_f64().map_or_else(
            || "?".to_string(),
            |e| format!("{:.0}", e.log2()),
        ))
    }
}

fn coord_floats(p: &LocatedPoint) -> Value {
    let coords: Vec<Value> = p
        .coords()
        .iter()
        .map(|c| {
            json!([c.re.to_f64().unwrap_or(f64::NAN), c.im.to_f64().unwrap_or(f64::NAN)])
        })
        .collect();
    Value::Array(coords)
}

// ------------------------------------------------------------- commands

fn cmd_mass(report: &mut Report, path: &Path) -> Result<bool, String> {
    let t = load_current(report, path)?;
    let mut components = Vec::new();
    for (w, c) in t.terms() {
        components.push(json!({
            "weight": w.to_string(),
            "degree": c.degree(),
            "component": c.to_string(),
        }));
    }
    report.results = json!({
        "ambient_dim": t.ambient_dim(),
        "components": components,
        "mass": t.mass().to_string(),
        "residual_mass": t.residual_mass().to_string(),
    });
    Ok(true)
}

fn cmd_lelong(report: &mut Report, path: &Path, point: &str) -> Result<bool, String> {
    let t = load_current(report, path)?;
    record_inline(report, "point", point);
    let p = parse_point(point)?;
    if p.ambient_dim() != t.ambient_dim() {
        return Err(format!(
            "the point has ambient dimension {}, the current {}",
            p.ambient_dim(),
            t.ambient_dim()
        ));
    }
    let interval = t.lelong_at(&p);
    let exact = interval.lower == interval.upper;
    report.results = json!({
        "point": jv(&p)?,
        "lower": interval.lower.to_string(),
        "upper": interval.upper.to_string(),
        "exact": exact,
    });
    if !exact {
        report.warnings.push(
            "residual mass widens the bracket; the lower bound is exact for the represented part"
                .into(),
        );
    }
    Ok(true)
}

fn cmd_levelset(
    report: &mut Report,
    path: &Path,
    alpha: &str,
    strict: bool,
    dump_points: bool,
    bits: u32,
) -> Result<bool, String> {
    let t = load_current(report, path)?;
    record_inline(report, "alpha", alpha);
    let alpha = parse_rational(alpha)?;
    let ls = t.upper_level_set_bits(&alpha, strict, bits).map_err(es)?;
    let points_in: Vec<&lelong::current::IsolatedPoint> = ls.points_in().collect();
    let unknown: Vec<&lelong::current::IsolatedPoint> = ls.points_unknown().collect();
    let mut results = json!({
        "threshold": ls.threshold.to_string(),
        "strict": ls.strict,
        "curve_components": jv(&ls.curve_components)?,
        "points": jv(&ls.isolated_points)?,
        "counts": {
            "curves": ls.curve_components.len(),
            "points_in": points_in.len(),
            "points_unknown": unknown.len(),
        },
    });
    if dump_points {
        let dump: Vec<Value> = points_in.iter().map(|ip| coord_floats(&ip.point)).collect();
        results["dump"] = Value::Array(dump);
    }
    report.results = results;
    for ip in &unknown {
        report.warnings.push(format!(
            "membership undecided at {}: the bracket straddles the threshold",
            located_text(&ip.point)
        ));
    }
    for ip in &points_in {
        if !ip.certified {
            report
                .warnings
                .push(format!("membership at {} decided at tolerance", located_text(&ip.point)));
        }
    }
    Ok(true)
}

fn cmd_classify(report: &mut Report, path: &Path, alpha: &str, bits: u32) -> Result<bool, String> {
    let t = load_current(report, path)?;
    record_inline(report, "alpha", alpha);
    let alpha = parse_rational(alpha)?;
    let ls = t.upper_level_set_bits(&alpha, true, bits).map_err(es)?;
    if ls.points_unknown().next().is_some() {
        return Err("residual mass straddles the threshold; memberships are undecided".into());
    }
    let c = classify_level_set(&t, &ls).map_err(es)?;
    let verified = c.verify();
    report.results = json!({
        "shape": c.shape.name(),
        "classification": jv(&c)?,
        "verified": verified,
    });
    if verified && !matches!(c.shape, Shape::Unclassified { .. }) {
        report.certificates.push(
            "every incidence in the classification certificate was re-checked".into(),
        );
    }
    if c.truncated {
        report.warnings.push(
            "residual mass present; the classification covers the represented part".into(),
        );
    }
    if c.tolerance_qualified {
        report
            .warnings
            .push("at least one incidence was decided at tolerance rather than exactly".into());
    }
    Ok(verified)
}

fn cmd_invariants(report: &mut Report, points: &str, degree: Option<u32>) -> Result<bool, String> {
    let text = inline_or_file(report, "points", points)?;
    let pts: Vec<ProjPoint> =
        serde_json::from_str(&text).map_err(|e| format!("malformed point list: {e}"))?;
    let n = pts.len();
    let dim = pts.first().map(ProjPoint::ambient_dim);
    let config = PointConfig::new(pts).map_err(es)?;
    let mut results = json!({ "points": n });
    if let Some(d) = dim {
        results["ambient_dim"] = json!(d);
    }
    match degree {
        Some(j @ (1 | 2)) => {
            results[format!("m{j}")] = json!(m_invariant(&config, j).map_err(es)?);
        }
        Some(j) => return Err(format!("degree must be 1 or 2, got {j}")),
        None => {
            results["m1"] = json!(m_invariant(&config, 1).map_err(es)?);
            if dim == Some(2) {
                results["m2"] = json!(m_invariant(&config, 2).map_err(es)?);
            }
        }
    }
    report.results = results;
    Ok(true)
}

fn cmd_green(
    report: &mut Report,
    kind: ConstructKind,
    points: &str,
    extra: Option<&str>,
    radii: Option<&str>,
    directions: usize,
    seed: Option<u64>,
) -> Result<bool, String> {
    let text = inline_or_file(report, "points", points)?;
    let pts: Vec<Vec<GaussianRational>> =
        serde_json::from_str(&text).map_err(|e| format!("malformed affine point list: {e}"))?;
    let mut results = json!({});
    let (u, label) = match kind {
        ConstructKind::Spatial => (construct_lemma22(&pts).map_err(es)?, "spatial"),
        ConstructKind::Pencil => (construct_pencil(&pts).map_err(es)?, "pencil"),
        ConstructKind::SevenPoint => (construct_prop23(&pts).map_err(es)?, "seven-point"),
        ConstructKind::EightPoint => {
            let extra = extra.ok_or("--extra is required for the eight-point construction")?;
            record_inline(report, "extra", extra);
            let q: Vec<GaussianRational> = serde_json::from_str(extra)
                .map_err(|e| format!("malformed extra point {extra:?}: {e}"))?;
            match construct_prop24(&pts, &q).map_err(es)? {
                Prop24Outcome::FullSet { green, extra_zeros } => {
                    results["extra_zeros"] =
                        Value::Array(extra_zeros.iter().map(|p| jv(p)).collect::<Result<_, _>>()?);
                    (green, "eight-point, full set")
                }
                Prop24Outcome::Subset { points, green } => {
                    results["selected_points"] = jv(&points)?;
                    report.warnings.push(
                        "four points were collinear; the function covers a seven-point subset"
                            .into(),
                    );
                    (green, "eight-point, subset")
                }
            }
        }
    };

    results["construction"] = json!(label);
    results["gamma"] = json!(u.gamma());
    results["pole_weights"] = jv(&u.pole_weights())?;
    results["poles"] = jv(&u.pole_points())?;
    results["degrees"] =
        jv(&u.polys().iter().map(|p| p.degree().unwrap_or(0)).collect::<Vec<_>>())?;
    results["green"] = jv(&u)?;

    let orders_ok = u.pole_points().iter().zip(u.pole_weights()).all(|(pt, &w)| {
        u.polys().iter().filter_map(|p| p.order_at(pt)).min() == Some(w)
    });
    if orders_ok {
        report.certificates.push(
            "pole orders re-verified: the family vanishes to exactly the stated weight at every pole"
                .into(),
        );
    } else {
        report.warnings.push("pole-order re-verification failed".into());
    }
    let mut pass = orders_ok;

    if u.polys().len() == 2 && u.num_vars() == 2 {
        let [p1, p2] = u.polys() else { unreachable!() };
        let coprime = is_coprime(p1, p2).map_err(es)?;
        if coprime {
            report.certificates.push("the defining pair is coprime".into());
            let bezout = certify_zero_locus(p1, p2, u.pole_points(), u.pole_weights());
            match bezout {
                Ok(true) => {
                    let product =
                        p1.degree().unwrap_or(0) * p2.degree().unwrap_or(0);
                    report.certificates.push(format!(
                        "zero locus certified: local intersection numbers at the poles sum to {product}"
                    ));
                }
                Ok(false) => report.warnings.push(
                    "the poles do not exhaust the common zero locus of the defining pair".into(),
                ),
                Err(e) => report.warnings.push(format!("zero-locus certification skipped: {e}")),
            }
        } else {
            report.warnings.push("the defining pair shares a factor".into());
            pass = false;
        }
    }

    if let Some(radii) = radii {
        record_inline(report, "radii", radii);
        let radii: Vec<f64> = radii
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|e| format!("bad radius {s:?}: {e}")))
            .collect::<Result<_, _>>()?;
        let seed = seed.ok_or("--seed is required with --radii")?;
        record_inline(report, "seed", &seed.to_string());
        let value = estimate_gamma(&u, &radii, directions, seed).map_err(es)?;
        results["estimate"] = json!({
            "directions": directions,
            "radii": radii,
            "value": value,
            "gamma_error": (value - f64::from(u.gamma())).abs(),
        });
    }

    report.results = results;
    Ok(pass)
}

fn fact_points(fact: &Fact) -> Vec<&ProjPoint> {
    match fact {
        Fact::Mass { .. } | Fact::LevelSetCurve { .. } | Fact::PointsInOnComponent { .. } => vec![],
        Fact::LelongAt { point, .. } | Fact::LevelSetExcludes { point, .. } => vec![point],
        Fact::LevelSetPoints { points, .. }
        | Fact::LevelSetContains { points, .. }
        | Fact::MaxOnLine { points, .. }
        | Fact::MaxOnConic { points, .. } => points.iter().collect(),
    }
}

fn cmd_example(
    report: &mut Report,
    id: &str,
    m: Option<u32>,
    truncation: Option<u32>,
    check: bool,
    dump_points: bool,
) -> Result<bool, String> {
    record_inline(report, "id", id);
    if let Some(m) = m {
        record_inline(report, "m", &m.to_string());
    }
    if let Some(k) = truncation {
        record_inline(report, "truncation", &k.to_string());
    }
    let data = gen_example(id, &ExampleParams { m, truncation }).map_err(es)?;
    let mut facts = Vec::new();
    let mut failures: Vec<String> = Vec::new();
    for f in &data.facts {
        let mut entry = json!({ "fact": f.describe() });
        if check {
            let ok = f.check(&data.current).map_err(es)?;
            entry["pass"] = json!(ok);
            if !ok {
                failures.push(f.describe());
            }
        }
        facts.push(entry);
    }
    let mut results = json!({
        "id": data.id,
        "current": jv(&data.current)?,
        "display": data.current.to_string(),
        "mass": data.current.mass().to_string(),
        "facts": facts,
    });
    if check {
        results["failures"] = jv(&failures)?;
        if failures.is_empty() {
            report
                .certificates
                .push(format!("all {} stated facts re-checked", data.facts.len()));
        }
    }
    if dump_points {
        let mut dump = Vec::new();
        for f in &data.facts {
            for p in fact_points(f) {
                dump.push(coord_floats(&LocatedPoint::Exact(p.clone())));
            }
        }
        results["dump"] = Value::Array(dump);
    }
    if !data.current.residual_mass().is_zero() {
        report
            .warnings
            .push("the current carries residual mass beyond the represented components".into());
    }
    report.results = results;
    Ok(!check || failures.is_empty())
}

fn default_alphas(which: &str) -> Vec<Rational> {
    let halves = |pairs: &[(i64, i64)]| {
        pairs.iter().map(|&(n, d)| Rational::new(BigInt::from(n), BigInt::from(d))).collect()
    };
    match which {
        "1.1" => halves(&[(1, 2), (3, 5), (2, 3), (3, 4)]),
        _ => halves(&[(2, 5), (9, 20)]),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    report: &mut Report,
    which: &str,
    alpha: Option<&str>,
    current: Option<&Path>,
    q1: Option<&str>,
    q2: Option<&str>,
    triple: Option<&str>,
    fuzz: Option<u64>,
    seed: Option<u64>,
    ambient: usize,
) -> Result<bool, String> {
    record_inline(report, "which", which);
    if !matches!(which, "1.1" | "1.2" | "3.8" | "3.10") {
        return Err(format!("unknown statement {which:?}; expected 1.1, 1.2, 3.8 or 3.10"));
    }

    if let Some(runs) = fuzz {
        if current.is_some() {
            return Err("choose either --fuzz or --current, not both".into());
        }
        if !matches!(which, "1.1" | "1.2") {
            return Err(format!(
                "fuzzing covers 1.1 and 1.2; {which} needs --current with its point data"
            ));
        }
        let seed = seed.ok_or("--seed is required with --fuzz")?;
        record_inline(report, "seed", &seed.to_string());
        let alphas = match alpha {
            Some(a) => {
                record_inline(report, "alpha", a);
                vec![parse_rational(a)?]
            }
            None => default_alphas(which),
        };
        if which == "1.2" && ambient != 2 {
            return Err("statement 1.2 concerns the projective plane; use --ambient 2".into());
        }
        if !matches!(ambient, 2 | 3) {
            return Err(format!("fuzzing supports ambient dimension 2 or 3, got {ambient}"));
        }
        let spec = RandomSpec {
            ambient_dim: ambient,
            max_components: 4,
            allow_conics: ambient == 2,
            total_mass: Rational::new(BigInt::from(1), BigInt::from(1)),
        };
        let mut checks = 0u64;
        let mut failures = Vec::new();
        for k in 0..runs {
            let t = random_current(seed.wrapping_add(k), &spec).map_err(es)?;
            for a in &alphas {
                let rep = match which {
                    "1.1" => check_thm11(&t, a).map_err(es)?,
                    _ => check_thm12(&t, a).map_err(es)?,
                };
                checks += 1;
                if !rep.pass {
                    failures.push(json!({
                        "seed": seed.wrapping_add(k),
                        "alpha": a.to_string(),
                        "shape": rep.classification.shape.name(),
                        "violations": rep.violations.len(),
                    }));
                }
            }
        }
        let pass = failures.is_empty();
        report.results = json!({
            "which": which,
            "mode": "fuzz",
            "ambient_dim": ambient,
            "alphas": alphas.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "currents": runs,
            "checks": checks,
            "failures": failures,
            "pass": pass,
        });
        if pass {
            report
                .certificates
                .push(format!("{checks} level-set classifications checked, none violated"));
        }
        return Ok(pass);
    }

    let Some(path) = current else {
        return Err("pass --current for a single check, or --fuzz N --seed s".into());
    };
    let t = load_current(report, path)?;
    let alpha_text = alpha.ok_or("--alpha is required with --current")?;
    record_inline(report, "alpha", alpha_text);
    let a = parse_rational(alpha_text)?;
    let (pass, detail) = match which {
        "1.1" => {
            let rep = check_thm11(&t, &a).map_err(es)?;
            (rep.pass, jv(&rep)?)
        }
        "1.2" => {
            let rep = check_thm12(&t, &a).map_err(es)?;
            (rep.pass, jv(&rep)?)
        }
        "3.8" => {
            let q1 = q1.ok_or("--q1 and --q2 are required for 3.8")?;
            let q2 = q2.ok_or("--q1 and --q2 are required for 3.8")?;
            record_inline(report, "q1", q1);
            record_inline(report, "q2", q2);
            let rep =
                check_thm38(&t, &a, &parse_point(q1)?, &parse_point(q2)?).map_err(es)?;
            (rep.pass, jv(&rep)?)
        }
        _ => {
            let triple = triple.ok_or("--triple is required for 3.10")?;
            record_inline(report, "triple", triple);
            let pts: Vec<ProjPoint> = serde_json::from_str(triple)
                .map_err(|e| format!("malformed triple {triple:?}: {e}"))?;
            let [p0, p1, p2]: [ProjPoint; 3] =
                pts.try_into().map_err(|_| "the triple must hold exactly three points")?;
            let l = Line::through(&p0, &p1).map_err(es)?;
            if !l.contains(&p2) {
                return Err("the three points of the triple must be collinear".into());
            }
            let rep = check_prop310(&t, &a, &[p0, p1, p2], &l).map_err(es)?;
            (rep.pass, jv(&rep)?)
        }
    };
    report.results = json!({
        "which": which,
        "mode": "single",
        "alpha": a.to_string(),
        "report": detail,
        "pass": pass,
    });
    Ok(pass)
}

fn cmd_prop21(report: &mut Report, current: &Path, green: &Path) -> Result<bool, String> {
    let t = load_current(report, current)?;
    let text = read_file(green)?;
    record_file(report, "green", green, text.as_bytes());
    let u: GreenFunction = serde_json::from_str(&text)
        .map_err(|e| format!("malformed Green function in {}: {e}", green.display()))?;
    let rep = check_prop21(&t, &u).map_err(es)?;
    report.results = json!({
        "lhs": rep.lhs.to_string(),
        "rhs": rep.rhs.to_string(),
        "holds": rep.holds,
        "gamma": u.gamma(),
        "mass": t.mass().to_string(),
        "poles": u.pole_points().len(),
    });
    report
        .certificates
        .push("both sides computed in exact rational arithmetic".into());
    Ok(rep.holds)
}
