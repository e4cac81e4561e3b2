//! JSON front end. Every subcommand reads JSON inputs, runs the library, and
//! writes one report object: {command, version, timestamp, config, results}
//! on success or {.., error: {name, message}} on failure. Identical argv and
//! files give byte-identical config and results; only the timestamp moves.
//!
//! Exit codes: 0 success, 1 I/O or parse errors, 2 domain errors.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use nalgebra::DVector;
use serde_json::{json, Value};

use ipspace::characterizations::{classify_space, ClassificationReport, Condition, Verdict, Witness};
use ipspace::distance_geometry::{cm_determinant, is_affinely_dependent, trilaterate};
use ipspace::extension::{
    certify_nonextendable_flip, check_complex_linearity, extend_isometry, Correspondence,
};
use ipspace::json::{
    matrix_to_rows, parse_distance_matrix, parse_point_set, JsonError, PointSetJson, SpaceJson,
};
use ipspace::locus::{build_isosceles_config, strict_convexity_search, trace_locus};
use ipspace::spaces::{NormedSpace, PointConfig, ScalarField};
use ipspace::Tolerances;

#[derive(Parser)]
#[command(name = "ipspace", version, about = "Inner-product structure detection and isometry extension over JSON")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for every randomized search.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Sample budget for searches.
    #[arg(long, global = true, default_value_t = 4096)]
    budget: usize,
    #[arg(long = "tol-residual", global = true, default_value_t = 1e-9)]
    tol_residual: f64,
    #[arg(long = "tol-rank", global = true, default_value_t = 1e-9)]
    tol_rank: f64,
    #[arg(long = "tol-locus", global = true, default_value_t = 1e-10)]
    tol_locus: f64,
    /// Residual above which a witness counts as a violation.
    #[arg(long = "violation-threshold", global = true, default_value_t = 1e-6)]
    violation_threshold: f64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full battery of inner-product conditions against a space.
    Classify { space: PathBuf },
    /// Extend a finite isometry between point sets to an orthogonal affine map.
    Extend {
        source: PathBuf,
        target: PathBuf,
        /// Source-to-target index pairing, comma-separated. Falls back to the
        /// target file's "pairing" field, then the source's, then in-order.
        #[arg(long, value_delimiter = ',')]
        pairing: Option<Vec<usize>>,
    },
    /// Recover a point from its distances to anchors (first anchor must be 0).
    Trilaterate {
        anchors: PathBuf,
        /// Distances to the anchors, comma-separated, in anchor order.
        #[arg(long, value_delimiter = ',', required = true)]
        dists: Vec<f64>,
    },
    /// Cayley-Menger determinant and affine-dependence verdict of a distance matrix.
    Cm { dm: PathBuf },
    /// Sample well-separated points equidistant from --f and --g.
    Locus {
        space: PathBuf,
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        f: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        g: Vec<f64>,
        #[arg(long, default_value_t = 3)]
        count: usize,
    },
    /// Certify that some two-point swap admits no isometric extension.
    CertifyFlip {
        space: PathBuf,
        /// Scaling coefficient of the swap identity; outside {0, 1, -1}.
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        gamma: f64,
    },
    /// Build {0, f', g', h_i} whose f' <-> g' flip is an isometry of the set.
    Isosceles {
        space: PathBuf,
        /// Total number of points, at least 3.
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Defaults to e1 normalized.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        f: Option<Vec<f64>>,
        /// Defaults to e2 normalized.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        g: Option<Vec<f64>>,
    },
    /// Search for a unit pair with additive norm and independent directions.
    StrictConvexity { space: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::Extend { .. } => "extend",
            Command::Trilaterate { .. } => "trilaterate",
            Command::Cm { .. } => "cm",
            Command::Locus { .. } => "locus",
            Command::CertifyFlip { .. } => "certify-flip",
            Command::Isosceles { .. } => "isosceles",
            Command::StrictConvexity { .. } => "strict-convexity",
        }
    }
}

struct Failure {
    exit: u8,
    name: String,
    message: String,
}

impl Failure {
    fn parse(message: impl Into<String>) -> Self {
        Failure { exit: 1, name: "ParseError".into(), message: message.into() }
    }

    fn io(path: &PathBuf, err: std::io::Error) -> Self {
        Failure { exit: 1, name: "IoError".into(), message: format!("{}: {err}", path.display()) }
    }

    fn domain(name: &str, message: impl Into<String>) -> Self {
        Failure { exit: 2, name: name.into(), message: message.into() }
    }

    fn from_json_error(err: JsonError) -> Self {
        match &err {
            JsonError::Parse(_) | JsonError::Structure(_) => {
                Failure { exit: 1, name: err.name().into(), message: err.to_string() }
            }
            _ => Failure::domain(err.name(), err.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not errors
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    run(cli)
}

fn run(cli: Cli) -> ExitCode {
    let tolerances = Tolerances {
        residual_tol: cli.tol_residual,
        rank_tol: cli.tol_rank,
        locus_tol: cli.tol_locus,
        violation_threshold: cli.violation_threshold,
    };
    let command_name = cli.command.name();
    let base_config = json!({
        "seed": cli.seed,
        "budget": cli.budget,
        "tolerances": {
            "residual_tol": tolerances.residual_tol,
            "rank_tol": tolerances.rank_tol,
            "locus_tol": tolerances.locus_tol,
            "violation_threshold": tolerances.violation_threshold,
        },
    });

    let outcome = match tolerances.validate() {
        Err(msg) => Err(Failure::domain("InvalidParameters", msg)),
        Ok(()) => execute(&cli, &tolerances),
    };

    let timestamp =
        SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let mut report = serde_json::Map::new();
    report.insert("command".into(), json!(command_name));
    report.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    report.insert("timestamp".into(), json!(timestamp));
    let (exit, config, body) = match outcome {
        Ok((inputs, results)) => {
            let mut config = base_config;
            config["inputs"] = inputs;
            (ExitCode::SUCCESS, config, ("results", results))
        }
        Err(f) => (
            ExitCode::from(f.exit),
            base_config,
            ("error", json!({"name": f.name, "message": f.message})),
        ),
    };
    report.insert("config".into(), config);
    report.insert(body.0.into(), body.1);

    let text = serde_json::to_string_pretty(&Value::Object(report)).expect("report is valid JSON");
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text + "\n") {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => println!("{text}"),
    }
    exit
}

fn execute(cli: &Cli, tol: &Tolerances<f64>) -> Result<(Value, Value), Failure> {
    match &cli.command {
        Command::Classify { space } => {
            let (spec, sp) = load_space(space)?;
            let report = classify_space(&sp, cli.budget, cli.seed, tol)
                .map_err(|e| Failure::domain(e.name(), e.to_string()))?;
            Ok((json!({"space": spec_value(&spec)}), classification_value(&report)))
        }
        Command::Extend { source, target, pairing } => {
            let src = load_point_set(source)?;
            let tgt = load_point_set(target)?;
            let pairing = pairing
                .clone()
                .or_else(|| tgt.pairing.clone())
                .or_else(|| src.pairing.clone());
            let inputs = json!({
                "source": point_set_value(&src),
                "target": point_set_value(&tgt),
                "pairing": pairing,
            });
            let src_cfg = src.to_config().map_err(Failure::from_json_error)?;
            let tgt_cfg = tgt.to_config().map_err(Failure::from_json_error)?;
            // Complex spaces extend through their realification; storage is
            // already interleaved real coordinates, so points carry over.
            let complex = src_cfg.space.field() == ScalarField::Complex;
            let (src_cfg, tgt_cfg, j) = if complex {
                let (real_space, j) =
                    src_cfg.space.realify().map_err(|e| Failure::domain(e.name(), e.to_string()))?;
                let s = PointConfig::new(real_space.clone(), src_cfg.points.clone())
                    .map_err(|e| Failure::domain(e.name(), e.to_string()))?;
                let t = PointConfig::new(real_space, tgt_cfg.points.clone())
                    .map_err(|e| Failure::domain(e.name(), e.to_string()))?;
                (s, t, Some(j))
            } else {
                (src_cfg, tgt_cfg, None)
            };
            let corr = match pairing {
                Some(p) => Correspondence::new(src_cfg, tgt_cfg, p),
                None => Correspondence::in_order(src_cfg, tgt_cfg),
            }
            .map_err(|e| Failure::domain(e.name(), e.to_string()))?;
            let ext = extend_isometry(&corr, tol)
                .map_err(|e| Failure::domain(e.name(), e.to_string()))?;
            let complex_linearity = match &j {
                Some(j) => {
                    let c = check_complex_linearity(&ext, j)
                        .map_err(|e| Failure::domain(e.name(), e.to_string()))?;
                    json!({
                        "commutator_max": c.commutator_max,
                        "anticommutator_max": c.anticommutator_max,
                    })
                }
                None => Value::Null,
            };
            let results = json!({
                "Q": matrix_to_rows(&ext.q),
                "euclidean_factor": matrix_to_rows(&ext.euclidean_factor),
                "pre_translation": vector_value(&ext.pre_translation),
                "post_translation": vector_value(&ext.post_translation),
                "max_defect": ext.max_defect,
                "complex_linearity": complex_linearity,
            });
            Ok((inputs, results))
        }
        Command::Trilaterate { anchors, dists } => {
            let ps = load_point_set(anchors)?;
            let cfg = ps.to_config().map_err(Failure::from_json_error)?;
            let sol = trilaterate(&cfg, dists, tol)
                .map_err(|e| Failure::domain(e.name(), e.to_string()))?;
            let inputs = json!({"anchors": point_set_value(&ps), "dists": dists});
            let results = json!({
                "point": vector_value(&sol.point),
                "out_of_span_residual": sol.out_of_span_residual,
                "unique": sol.unique,
                "system_residual": sol.system_residual,
            });
            Ok((inputs, results))
        }
        Command::Cm { dm } => {
            let text = read_file(dm)?;
            let matrix = parse_distance_matrix(&text).map_err(Failure::from_json_error)?;
            let det = cm_determinant(&matrix);
            let dep = is_affinely_dependent(&matrix, tol)
                .map_err(|e| Failure::domain(e.name(), e.to_string()))?;
            let inputs = json!({"n": matrix.len(), "d": matrix_to_rows(matrix.entries())});
            let results = json!({
                "determinant": {
                    "normalized": det.normalized,
                    "raw": det.raw,
                    "scale": det.scale,
                },
                "affinely_dependent": dep.dependent,
                "gram_min_eigenvalue": dep.gram_min_eigenvalue,
            });
            Ok((inputs, results))
        }
        Command::Locus { space, f, g, count } => {
            let (spec, sp) = load_space(space)?;
            let fv = DVector::from_vec(f.clone());
            let gv = DVector::from_vec(g.clone());
            let pts = trace_locus(&sp, &fv, &gv, *count, cli.seed, tol)
                .map_err(|e| Failure::domain(e.name(), e.to_string()))?;
            let inputs = json!({"space": spec_value(&spec), "f": f, "g": g, "count": count});
            let results = json!({
                "points": pts
                    .iter()
                    .map(|p| json!({"h": vector_value(&p.h), "phi": p.phi_value}))
                    .collect::<Vec<_>>(),
            });
            Ok((inputs, results))
        }
        Command::CertifyFlip { space, gamma } => {
            let (spec, sp) = load_space(space)?;
            let cert = certify_nonextendable_flip(&sp, *gamma, cli.budget, cli.seed, tol)
                .map_err(|e| Failure::domain(e.name(), e.to_string()))?;
            let inputs = json!({"space": spec_value(&spec), "gamma": gamma});
            let results = match cert {
                None => json!({
                    "certificate": Value::Null,
                    "note": "no scaled-swap violation found at this budget; \
                             consistent with every two-point flip being extendable",
                }),
                Some(c) => json!({
                    "certificate": {
                        "f_prime": vector_value(&c.f_prime),
                        "g_prime": vector_value(&c.g_prime),
                        "gamma_prime": c.gamma_prime,
                        "residual": c.residual,
                        "norm_gap": c.norm_gap,
                        "flip_defect": c.flip_defect,
                        "triangle": point_set_value(&PointSetJson::from_config(
                            &c.triangle,
                            Some(vec![0, 2, 1]),
                        )),
                        "witness": witness_value(&c.witness),
                        "explanation": c.explanation,
                    },
                }),
            };
            Ok((inputs, results))
        }
        Command::Isosceles { space, n, f, g } => {
            let (spec, sp) = load_space(space)?;
            let dim = sp.real_dim();
            let (fv, gv) = match (f, g) {
                (Some(f), Some(g)) => (DVector::from_vec(f.clone()), DVector::from_vec(g.clone())),
                (None, None) => default_pair(&sp)?,
                _ => {
                    return Err(Failure::parse("--f and --g must be given together"));
                }
            };
            if fv.len() != dim || gv.len() != dim {
                return Err(Failure::domain(
                    "DimensionMismatch",
                    format!("--f/--g must have {dim} real coordinates"),
                ));
            }
            let cfg = build_isosceles_config(&sp, &fv, &gv, *n, cli.seed, tol)
                .map_err(|e| Failure::domain(e.name(), e.to_string()))?;
            let inputs = json!({
                "space": spec_value(&spec),
                "n": n,
                "f": vector_value(&fv),
                "g": vector_value(&gv),
            });
            let results = json!({
                "config": point_set_value(&PointSetJson::from_config(
                    &cfg.config,
                    Some(cfg.flip_pairing.clone()),
                )),
                "flip_defect": cfg.flip_defect,
                "locus_values": cfg.locus_values,
            });
            Ok((inputs, results))
        }
        Command::StrictConvexity { space } => {
            let (spec, sp) = load_space(space)?;
            let witness = strict_convexity_search(&sp, cli.budget, cli.seed, tol)
                .map_err(|e| Failure::domain(e.name(), e.to_string()))?;
            let inputs = json!({"space": spec_value(&spec)});
            let results = match witness {
                None => json!({"witness": Value::Null}),
                Some(w) => json!({
                    "witness": {
                        "a": vector_value(&w.a),
                        "b": vector_value(&w.b),
                        "defect": w.defect,
                        "independence": w.independence,
                    },
                }),
            };
            Ok((inputs, results))
        }
    }
}

/// Unit-normalized first and second coordinate directions; equal norms in any
/// space, independent whenever the dimension allows.
fn default_pair(space: &NormedSpace<f64>) -> Result<(DVector<f64>, DVector<f64>), Failure> {
    let dim = space.real_dim();
    if dim < 2 {
        return Err(Failure::domain("DependentInputs", "space has real dimension < 2"));
    }
    let mut f = DVector::zeros(dim);
    f[0] = 1.0;
    let mut g = DVector::zeros(dim);
    g[1] = 1.0;
    for v in [&mut f, &mut g] {
        let n = space.norm(v).map_err(|e| Failure::domain(e.name(), e.to_string()))?;
        *v /= n;
    }
    Ok((f, g))
}

fn read_file(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn load_space(path: &PathBuf) -> Result<(SpaceJson, NormedSpace<f64>), Failure> {
    let text = read_file(path)?;
    let spec: SpaceJson = serde_json::from_str(&text)
        .map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    let space = spec.to_space().map_err(Failure::from_json_error)?;
    Ok((spec, space))
}

fn load_point_set(path: &PathBuf) -> Result<PointSetJson, Failure> {
    let text = read_file(path)?;
    parse_point_set(&text).map_err(|e| match e {
        JsonError::Parse(msg) => Failure::parse(format!("{}: {msg}", path.display())),
        other => Failure::from_json_error(other),
    })
}

fn vector_value(v: &DVector<f64>) -> Value {
    json!(v.iter().copied().collect::<Vec<f64>>())
}

fn spec_value(spec: &SpaceJson) -> Value {
    serde_json::to_value(spec).expect("space spec serializes")
}

fn point_set_value(ps: &PointSetJson) -> Value {
    serde_json::to_value(ps).expect("point set serializes")
}

fn witness_value(w: &Witness<f64>) -> Value {
    json!({
        "vectors": w.vectors.iter().map(vector_value).collect::<Vec<_>>(),
        "scalars": w.scalars,
        "residual": w.residual,
        "signed_defect": w.signed_defect,
    })
}

fn condition_params(c: &Condition<f64>) -> Value {
    match c {
        Condition::Parallelogram
        | Condition::Rhombus
        | Condition::Isosceles
        | Condition::Quadrilateral
        | Condition::CrossTerm => json!({}),
        Condition::NormSwap { pairs } => json!({"pairs": pairs}),
        Condition::BirkhoffJamesSymmetry(p) => json!({
            "grid_limit": p.grid_limit,
            "grid_points": p.grid_points,
            "refine_tol": p.refine_tol,
        }),
        Condition::ScaledSwap { gamma } | Condition::SignFlip { gamma } => json!({"gamma": gamma}),
        Condition::ProductScaling { alphas } => json!({"alphas": alphas}),
        Condition::DistanceSum { n } => {
            let (used, ordered) = c.distance_sum_constants().expect("distance-sum constants");
            json!({"n": n, "constant_used": used, "ordered_pairs_constant": ordered})
        }
    }
}

fn classification_value(report: &ClassificationReport<f64>) -> Value {
    let verdict = match report.verdict {
        Verdict::InnerProductLike => "inner_product_like",
        Verdict::NotInnerProduct => "not_inner_product",
    };
    let conditions: Vec<Value> = report
        .outcomes
        .iter()
        .map(|o| {
            json!({
                "condition": o.condition.tag(),
                "params": condition_params(&o.condition),
                "max_residual": o.max_residual,
                "signed_defect": o.signed_defect,
                "witness": o.witness.as_ref().map(witness_value),
                "samples_evaluated": o.samples_evaluated,
                "informative_only": o.informative_only,
            })
        })
        .collect();
    let complex_checks = report.complex_checks.as_ref().map(|c| {
        json!({
            "conjugate_symmetry_max": c.conjugate_symmetry_max,
            "i_linearity_max": c.i_linearity_max,
            "samples": c.samples,
        })
    });
    json!({
        "verdict": verdict,
        "conditions": conditions,
        "complex_checks": complex_checks,
    })
}
