mod input;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use log::{info, warn};
use num::traits::ToPrimitive;
use serde_json::{json, Value};

use pentakin::archsing::{classify_arch, validate_assumptions};
use pentakin::bonds::necessity_verdict;
use pentakin::dirkin::{max_real_solutions, solve_dk_exact};
use pentakin::kinmap::{displacement, Pentapod, PARAM_NAMES};
use pentakin::polyalg::scalar::rat_to_f64;
use pentakin::rearrange::{classify_type, PentapodType};
use pentakin::selfmotion::{
    duporcq_for_class, real_legs_from_design, reality, synth_from_pentapod, trace_pentapod,
    track_point, LegParams,
};
use pentakin::{Error, GaussRat, Rat, C64};

use input::{leg_json, parse_geometry, parse_lengths, parse_rational, Geometry, InputError};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Command {
    /// Type of the leg-replacement locus and architectural singularity.
    Classify,
    /// Direct kinematics for given leg lengths.
    Dk,
    /// Bonds and the two necessary conditions for a self-motion.
    Bonds,
    /// Leg parameters that give the design a self-motion.
    Synth,
    /// Sample the configuration curve to CSV.
    Trace,
    /// Upper bound on real assembly modes.
    Maxreal,
    /// Check the anchor-point assumptions.
    Validate,
}

/// Kinematics of pentapods with a linear platform.
#[derive(Debug, Parser)]
#[command(name = "pentakin", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Geometry file (JSON).
    file: PathBuf,
    /// Leg lengths r1,...,r5; override the file.
    #[arg(long, value_delimiter = ',')]
    lengths: Option<Vec<String>>,
    /// Report exact rational coefficients.
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Platform coordinates to follow along a trace, or to generate legs at
    /// in synth.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    track: Vec<String>,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Squared length of the origin leg for synth.
    #[arg(long)]
    r1_sq: Option<String>,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        let code = match e {
            InputError::Malformed(_) => 1,
            InputError::Invalid(_) => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::AssumptionViolated { .. }
            | Error::InvalidPentapod(_)
            | Error::InvalidArgument(_) => 2,
            Error::ArchitecturallySingular(_)
            | Error::DependentConstraints(_)
            | Error::Degenerate(_) => 3,
            _ => 4,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<(Output, u8), Failure>;

enum Output {
    Json(Value),
    Csv(Vec<u8>),
}

fn c64(z: &C64) -> Value {
    json!({"re": z.re, "im": z.im})
}

fn gauss_json(z: &GaussRat) -> Value {
    json!({"re": z.re.to_string(), "im": z.im.to_string()})
}

fn rats(v: &[Rat]) -> Vec<String> {
    v.iter().map(|r| r.to_string()).collect()
}

fn params_json(c: &[f64; 9]) -> Value {
    Value::Object(
        PARAM_NAMES
            .iter()
            .zip(c)
            .map(|(n, v)| (n.to_string(), json!(v)))
            .collect(),
    )
}

fn lengths(g: &Geometry, cli: &Cli) -> Result<Pentapod<Rat>, Failure> {
    if let Some(l) = &cli.lengths {
        return Ok(g.pentapod.with_r2(&parse_lengths(l)?));
    }
    g.with_lengths().ok_or_else(|| Failure {
        code: 2,
        message: "leg lengths missing: pass --lengths or set them in the file".into(),
    })
}

fn track_values(cli: &Cli) -> Result<Vec<(String, Rat)>, Failure> {
    cli.track
        .iter()
        .map(|s| {
            parse_rational(s)
                .map(|r| (s.trim().to_string(), r))
                .ok_or_else(|| Failure {
                    code: 1,
                    message: format!("--track: cannot read \"{s}\""),
                })
        })
        .collect()
}

fn validate(g: &Geometry) -> Outcome {
    match validate_assumptions(&g.pentapod) {
        Ok(()) => Ok((
            Output::Json(
                json!({"valid": true, "assumptions": {"i": true, "ii": true, "iii": true}}),
            ),
            0,
        )),
        Err(Error::AssumptionViolated { item, detail }) => {
            eprintln!("assumption ({item}) violated: {detail}");
            let flags: Vec<(String, Value)> = ["i", "ii", "iii"]
                .iter()
                .map(|k| {
                    (
                        k.to_string(),
                        if *k == item {
                            json!(false)
                        } else {
                            Value::Null
                        },
                    )
                })
                .collect();
            Ok((
                Output::Json(json!({
                    "valid": false,
                    "violated": item,
                    "message": format!("assumption ({item}) violated: {detail}"),
                    "assumptions": Value::Object(flags.into_iter().collect()),
                })),
                2,
            ))
        }
        Err(e) => Err(e.into()),
    }
}

fn classify(g: &Geometry) -> Outcome {
    let p = &g.pentapod;
    validate_assumptions(p)?;
    let arch = classify_arch(p)?;
    if arch.singular {
        let witness = arch
            .witness
            .as_ref()
            .map(|w| json!({"perm": w.perm.map(|k| k + 1), "condition": w.condition}));
        let report =
            json!({"type": null, "archSingular": true, "archCase": arch.case, "witness": witness});
        return Ok((Output::Json(report), 3));
    }
    let class = classify_type(p)?;
    let exceptional: Vec<Value> = class
        .exceptional
        .iter()
        .map(|e| {
            json!({
                "a": c64(&e.a),
                "exact": e.exact_a.as_ref().map(|r| r.to_string()),
                "line": e.line.map(|(pt, dir)| json!({"point": pt, "direction": dir})),
            })
        })
        .collect();
    let duporcq = match class.kind {
        PentapodType::Type1 | PentapodType::Type2 | PentapodType::Type5 => {
            duporcq_for_class(&class).ok().map(|d| format!("{d:?}"))
        }
        _ => None,
    };
    let report = json!({
        "type": class.kind.name(),
        "archSingular": false,
        "complexLines": class.complex_lines,
        "vertex": class.vertex.as_ref().map(|v| rats(&v.0)),
        "exceptional": exceptional,
        "darbouxPoints": class.darboux.iter().map(c64).collect::<Vec<_>>(),
        "duporcq": duporcq,
    });
    Ok((Output::Json(report), 0))
}

fn maxreal(g: &Geometry) -> Outcome {
    validate_assumptions(&g.pentapod)?;
    let n = max_real_solutions(&g.pentapod)?;
    Ok((Output::Json(json!({"maxReal": n})), 0))
}

fn dk(g: &Geometry, cli: &Cli) -> Outcome {
    let p = lengths(g, cli)?;
    validate_assumptions(&p)?;
    let res = solve_dk_exact(&p)?;
    let ints = res.integer_coeffs();
    let coefficients: Vec<Value> = if cli.exact {
        ints.iter().map(|c| json!(c.to_string())).collect()
    } else {
        ints.iter()
            .map(|c| json!(c.to_f64().unwrap_or(f64::NAN)))
            .collect()
    };
    let platform = p.platform().map(|a| rat_to_f64(&a));
    let solutions: Vec<Value> = res
        .solutions
        .iter()
        .map(|s| {
            let pose: Vec<[f64; 3]> = platform
                .iter()
                .filter_map(|a| displacement(&s.params, a).ok())
                .collect();
            let residual = s.max_residual();
            if residual > cli.tol {
                warn!("solution with residual {residual:e} above --tol");
            }
            json!({
                "params": params_json(&s.params.to_array()),
                "platformPoints": pose,
                "residual": residual,
                "withinTol": residual <= cli.tol,
            })
        })
        .collect();
    info!("elimination order {:?}, rotated {}", res.order, res.rotated);
    let report = json!({
        "variable": PARAM_NAMES[res.variable],
        "order": res.order.map(|k| PARAM_NAMES[k]),
        "rotated": res.rotated,
        "degree": res.degree(),
        "coefficients": coefficients,
        "solutions": solutions,
    });
    Ok((Output::Json(report), 0))
}

fn bonds(g: &Geometry) -> Outcome {
    let v = necessity_verdict(&g.pentapod)?;
    let list: Vec<Value> = v
        .bonds
        .iter()
        .map(|b| {
            let names = PARAM_NAMES.iter().zip(b.params.to_array()).map(|(n, z)| (n.to_string(), c64(&z)));
            json!({
                "params": Value::Object(names.collect()),
                "exact": b.exact.as_ref().map(|e| e.to_array().iter().map(gauss_json).collect::<Vec<_>>()),
                "multiplicity": b.multiplicity,
                "conjugate": b.conjugate,
            })
        })
        .collect();
    let report = json!({
        "hasBond": v.has_bond,
        "tangencyRankDeficient": v.tangency_rank_deficient,
        "tangencyRank": v.jacobian_rank,
        "bonds": list,
    });
    Ok((Output::Json(report), 0))
}

fn synth(g: &Geometry, cli: &Cli) -> Outcome {
    let p = &g.pentapod;
    validate_assumptions(p)?;
    let r1_sq = match &cli.r1_sq {
        Some(s) => Some(rat_to_f64(&parse_rational(s).ok_or_else(|| Failure {
            code: 1,
            message: format!("--r1-sq: cannot read \"{s}\""),
        })?)),
        None => None,
    };
    let base = g.with_lengths().unwrap_or_else(|| p.clone());
    let d = synth_from_pentapod(&base, r1_sq)?;
    let geo = &d.geometry;
    let params = match &d.params {
        LegParams::Darboux { p2, p3, p4, p5 } => {
            json!({"p2": gauss_json(p2), "p3": gauss_json(p3), "p4": p4.to_string(), "p5": p5.to_string()})
        }
        LegParams::Angle { p2, p3, w, r5_sq } => {
            json!({"p2": gauss_json(p2), "p3": gauss_json(p3), "w": w.to_string(), "r5Squared": r5_sq.to_string()})
        }
    };
    // Legs at the input platform points unless others are requested.
    let mut at: Vec<Rat> = track_values(cli)?.into_iter().map(|(_, r)| r).collect();
    if at.is_empty() {
        at = p.platform().to_vec();
    }
    let shift = num::BigRational::from_float(d.frame.platform_shift).unwrap_or_default();
    let canonical: Vec<Rat> = at.iter().map(|a| a - &shift).collect();
    let legs: Vec<Value> = real_legs_from_design(&d, &canonical)
        .into_iter()
        .zip(&at)
        .map(|(l, a)| match l {
            Ok(leg) => {
                let user = d.to_user(&leg);
                json!({"a": a.to_string(), "base": user.base, "lengthSquared": user.r2, "canonical": leg_json(&leg)})
            }
            Err(e) => json!({"a": a.to_string(), "error": e.to_string()}),
        })
        .collect();
    let real = reality(&d)
        .map(|v| json!({"reality": format!("{:?}", v.reality), "empirical": v.empirical}));
    let report = json!({
        "type": geo.kind.name(),
        "geometry": {
            "a2": gauss_json(&geo.a2),
            "aLast": geo.a_last.to_string(),
            "m5": rats(&geo.m5),
            "r1Squared": geo.r1_sq.to_string(),
        },
        "params": params,
        "relationsHold": d.satisfies_relations(),
        "frame": {
            "rotation": d.frame.rotation,
            "translation": d.frame.translation,
            "platformShift": d.frame.platform_shift,
        },
        "reality": real.unwrap_or_else(|e| json!({"error": e.to_string()})),
        "legs": legs,
    });
    Ok((Output::Json(report), 0))
}

/// Fixed 17 significant digits; `-0` is written as `0`.
fn fmt17(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}

fn trace(g: &Geometry, cli: &Cli) -> Outcome {
    let p = lengths(g, cli)?;
    validate_assumptions(&p)?;
    let tracked = track_values(cli)?;
    let tr = trace_pentapod(&p, cli.samples)?;
    info!(
        "curve parameter {}, intervals {:?}, {:?}",
        PARAM_NAMES[tr.parameter], tr.intervals, tr.reality
    );
    if tr.samples.is_empty() {
        warn!("no real configurations on the curve");
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let mut header: Vec<String> = ["t", "x1", "x2", "x3", "y1", "y2", "y3"]
        .map(String::from)
        .to_vec();
    for (name, _) in &tracked {
        header.extend(["px", "py", "pz"].map(|c| format!("{c}_{name}")));
    }
    let fail = |e: csv::Error| Failure {
        code: 4,
        message: e.to_string(),
    };
    w.write_record(&header).map_err(fail)?;
    for s in &tr.samples {
        let m = &s.params;
        let mut row: Vec<String> = [s.t, m.x[1], m.x[2], m.x[3], m.y[1], m.y[2], m.y[3]]
            .map(fmt17)
            .to_vec();
        for (_, a) in &tracked {
            row.extend(track_point(s, rat_to_f64(a))?.map(fmt17));
        }
        w.write_record(&row).map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure {
        code: 4,
        message: e.to_string(),
    })?;
    Ok((Output::Csv(bytes), 0))
}

fn run(cli: &Cli) -> Outcome {
    let text = fs::read_to_string(&cli.file).map_err(|e| Failure {
        code: 1,
        message: format!("{}: {e}", cli.file.display()),
    })?;
    let g = parse_geometry(&text, cli.tol)?;
    match cli.command {
        Command::Validate => validate(&g),
        Command::Classify => classify(&g),
        Command::Maxreal => maxreal(&g),
        Command::Dk => dk(&g, cli),
        Command::Bonds => bonds(&g),
        Command::Synth => synth(&g, cli),
        Command::Trace => trace(&g, cli),
    }
}

fn emit(out: Output, path: Option<&PathBuf>) -> std::io::Result<()> {
    let bytes = match out {
        Output::Json(v) => {
            let mut s = serde_json::to_string_pretty(&v).expect("serializable report");
            s.push('\n');
            s.into_bytes()
        }
        Output::Csv(b) => b,
    };
    match path {
        Some(p) => fs::write(p, bytes),
        None => std::io::stdout().write_all(&bytes),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("PENTAKIN_LOG")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok((out, code)) => {
            if let Err(e) = emit(out, cli.out.as_ref()) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
