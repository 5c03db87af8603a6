//! Command-line front end.
//!
//! Four commands, all emitting line-oriented JSON on stdout:
//!
//! * `verify` — seeded verification suites for the two chain complexes and
//!   the move relations; one report line per trial plus a summary line.
//! * `homology` — dimension, rank and homology reports for one complex.
//! * `export` — the complex matrices and weight expansions as JSON files.
//! * `explore24` — the exploratory two-to-four assembly; reports residuals
//!   and never fails on a nonzero one.
//!
//! Exit codes: 0 when every check passes, 1 when an identity is violated,
//! 2 on input or configuration errors. The `PG_THREADS` environment variable
//! caps the worker pool; trials are reported in trial order regardless of
//! scheduling.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::complex::{
    build_f_complex, build_g_complex, gauge_f3, gauge_f4, homology_dims, ExactMatrix,
};
use crate::field::FieldTag;
use crate::pachner::{
    explore_24, random_tet_chain, random_xchain, side_integral, verify_33, verify_d1, MoveSide,
    WChoice,
};
use crate::triangulation::{Triangulation, VertexCoordinates, BUILTIN_NAMES};
use crate::weights::{weight, xchain_from_tet_chain};

/// Primes at or below this bound are rejected for randomized verification;
/// identities of low-degree rational functions need room to avoid accidental
/// roots.
const MIN_VERIFICATION_PRIME: u64 = 10_000;

const DEFAULT_FIELD: FieldTag = FieldTag::PrimeField(1_000_003);

#[derive(Parser)]
#[command(
    name = "pg",
    version,
    about = "Exact verification of Grassmann-weight move relations on triangulated clusters"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded verification suite; one JSON report line per trial.
    Verify {
        /// Which identity family to verify.
        #[arg(value_enum)]
        what: VerifyWhat,
        /// Triangulation for the complex verifications: a built-in name or a
        /// JSON file (default boundary_delta5). The move verifications run on
        /// their built-in clusters and do not accept this flag.
        #[arg(long)]
        tri: Option<String>,
        /// Scalar field: `q` or `gf:P` for an odd prime P above 10000.
        #[arg(long)]
        field: Option<String>,
        /// Base seed; trial k runs with seed + k.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of independent trials.
        #[arg(long, default_value_t = 10)]
        trials: u64,
        /// Append per-trial elapsed milliseconds to each report line (makes
        /// the output bytes timing-dependent).
        #[arg(long)]
        timings: bool,
    },
    /// Print dimensions, ranks and homology of one complex as JSON.
    Homology {
        /// Which complex to eliminate.
        #[arg(value_enum)]
        which: ComplexKind,
        /// Triangulation: a built-in name or a JSON file.
        #[arg(long)]
        tri: String,
        /// Scalar field for the coordinate draw: `q` or `gf:P`.
        #[arg(long)]
        field: Option<String>,
        /// Seed for the coordinate draw (ignored when the file pins zeta).
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write complex matrices and weight expansions as JSON files.
    Export {
        /// Triangulation: a built-in name or a JSON file.
        #[arg(long)]
        tri: String,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
        /// Scalar field for the coordinate draw: `q` or `gf:P`.
        #[arg(long)]
        field: Option<String>,
        /// Seed for the coordinate draw (ignored when the file pins zeta).
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Evaluate the exploratory two-to-four assembly and report residuals.
    Explore24 {
        /// Scalar field: `q` or `gf:P` for an odd prime P above 10000.
        #[arg(long)]
        field: Option<String>,
        /// Base seed; trial k runs with seed + k.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of independent trials.
        #[arg(long, default_value_t = 10)]
        trials: u64,
        /// Deformation drawn per trial: none, a chain on the common boundary
        /// tetrahedra, or that plus random inner-tetrahedron images per side.
        #[arg(long, value_enum, default_value_t = DeformMode::None)]
        deform: DeformMode,
        /// Append per-trial elapsed milliseconds to each report line.
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VerifyWhat {
    /// The three compositions of the first complex vanish.
    #[value(name = "f-complex")]
    FComplex,
    /// The three compositions of the second complex vanish.
    #[value(name = "g-complex")]
    GComplex,
    /// The undeformed three-to-three relation.
    #[value(name = "pachner33")]
    Pachner33,
    /// The relation deformed by common boundary-tetrahedron chains.
    #[value(name = "theorem-d1")]
    TheoremD1,
    /// Invariance of each side under inner-tetrahedron images.
    #[value(name = "theorem-b")]
    TheoremB,
}

#[derive(Clone, Copy, ValueEnum)]
enum ComplexKind {
    F,
    G,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DeformMode {
    None,
    Boundary,
    Random,
}

/// A failure with the exit code it maps to (2 = input/config, 1 = identity).
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Failure {
        input_error(e.to_string())
    }
}

/// Parses arguments, runs the command, prints reports, returns the exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // Usage problems exit 2; --help and --version exit 0.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, Failure> {
    match cli.command {
        Command::Verify {
            what,
            tri,
            field,
            seed,
            trials,
            timings,
        } => cmd_verify(what, tri, field, seed, trials, timings),
        Command::Homology {
            which,
            tri,
            field,
            seed,
        } => cmd_homology(which, &tri, field, seed),
        Command::Export {
            tri,
            out,
            field,
            seed,
        } => cmd_export(&tri, &out, field, seed),
        Command::Explore24 {
            field,
            seed,
            trials,
            deform,
            timings,
        } => cmd_explore24(field, seed, trials, deform, timings),
    }
}

fn parse_field(flag: Option<&str>) -> Result<FieldTag, Failure> {
    match flag {
        None => Ok(DEFAULT_FIELD),
        Some(text) => text
            .parse()
            .map_err(|e| input_error(format!("bad --field {text:?}: {e}"))),
    }
}

/// Random verification draws need a large prime (or the rationals).
fn check_verification_field(field: FieldTag) -> Result<(), Failure> {
    if let FieldTag::PrimeField(p) = field {
        if p <= MIN_VERIFICATION_PRIME {
            return Err(input_error(format!(
                "randomized verification needs gf:P with P > {MIN_VERIFICATION_PRIME} (got gf:{p}); use a larger prime or q"
            )));
        }
    }
    Ok(())
}

/// Loads a triangulation from a built-in name or a JSON file.
fn load_triangulation(
    name_or_path: &str,
) -> Result<(Triangulation, Option<VertexCoordinates>), Failure> {
    if BUILTIN_NAMES.contains(&name_or_path) {
        return Ok((Triangulation::builtin(name_or_path)?, None));
    }
    let text = std::fs::read_to_string(name_or_path)
        .map_err(|e| input_error(format!("cannot read {name_or_path:?}: {e}")))?;
    Ok(Triangulation::from_json(&text)?)
}

/// The worker pool, sized by `PG_THREADS` when set.
fn thread_pool() -> Result<rayon::ThreadPool, Failure> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(text) = std::env::var("PG_THREADS") {
        let n: usize = text
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| input_error(format!("PG_THREADS must be a positive integer, got {text:?}")))?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| input_error(format!("cannot build worker pool: {e}")))
}

struct TrialOutcome {
    equal: bool,
    residual_terms: usize,
    elapsed_ms: u128,
}

fn report_line(
    theorem: &str,
    seed: u64,
    field: FieldTag,
    outcome: &TrialOutcome,
    timings: bool,
) -> String {
    let mut line = format!(
        "{{\"theorem\":\"{theorem}\",\"seed\":{seed},\"field\":\"{field}\",\"equal\":{},\"residual_terms\":{}",
        outcome.equal, outcome.residual_terms
    );
    if timings {
        let _ = write!(line, ",\"elapsed_ms\":{}", outcome.elapsed_ms);
    }
    line.push('}');
    line
}

fn summary_line(theorem: &str, field: FieldTag, trials: u64, passed: u64) -> String {
    format!(
        "{{\"theorem\":\"{theorem}\",\"summary\":true,\"field\":\"{field}\",\"trials\":{trials},\"passed\":{passed},\"all_equal\":{}}}",
        passed == trials
    )
}

/// Runs seeded trials on the pool and prints reports in trial order.
/// Returns the number of passing trials.
fn run_trials<F>(
    theorem: &str,
    field: FieldTag,
    seed: u64,
    trials: u64,
    timings: bool,
    body: F,
) -> Result<u64, Failure>
where
    F: Fn(u64, &mut ChaCha8Rng) -> Result<(bool, usize), Failure> + Sync,
{
    if trials == 0 {
        return Err(input_error("--trials must be at least 1"));
    }
    let pool = thread_pool()?;
    let outcomes: Result<Vec<TrialOutcome>, Failure> = pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|k| {
                let trial_seed = seed.wrapping_add(k);
                let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
                let start = Instant::now();
                let (equal, residual_terms) = body(trial_seed, &mut rng)?;
                Ok(TrialOutcome {
                    equal,
                    residual_terms,
                    elapsed_ms: start.elapsed().as_millis(),
                })
            })
            .collect()
    });
    let outcomes = outcomes?;
    let mut passed = 0;
    for (k, outcome) in outcomes.iter().enumerate() {
        if outcome.equal {
            passed += 1;
        }
        println!(
            "{}",
            report_line(theorem, seed.wrapping_add(k as u64), field, outcome, timings)
        );
    }
    println!("{}", summary_line(theorem, field, trials, passed));
    Ok(passed)
}

/// Coordinates for a trial: the file's pinned zeta if any, else a draw keyed
/// off the trial's generator.
fn trial_coordinates(
    tri: &Triangulation,
    pinned: &Option<VertexCoordinates>,
    field: FieldTag,
    rng: &mut ChaCha8Rng,
) -> Result<VertexCoordinates, Failure> {
    match pinned {
        Some(zeta) => Ok(zeta.clone()),
        None => Ok(tri.random_coordinates(field, rng.gen())?),
    }
}

/// When a file pins zeta, an explicit conflicting --field is a config error.
fn resolve_field_with_pinned(
    flag: Option<&str>,
    pinned: &Option<VertexCoordinates>,
) -> Result<FieldTag, Failure> {
    match (pinned, flag) {
        (Some(zeta), Some(text)) => {
            let requested = parse_field(Some(text))?;
            if requested != zeta.field_tag() {
                return Err(input_error(format!(
                    "--field {requested} conflicts with the file's coordinates over {}",
                    zeta.field_tag()
                )));
            }
            Ok(requested)
        }
        (Some(zeta), None) => Ok(zeta.field_tag()),
        (None, flag) => parse_field(flag),
    }
}

fn cmd_verify(
    what: VerifyWhat,
    tri: Option<String>,
    field: Option<String>,
    seed: u64,
    trials: u64,
    timings: bool,
) -> Result<i32, Failure> {
    let complex_verify = matches!(what, VerifyWhat::FComplex | VerifyWhat::GComplex);
    if !complex_verify && tri.is_some() {
        return Err(input_error(
            "this verification runs on its built-in move sides; --tri is not accepted",
        ));
    }
    let passed = if complex_verify {
        let source = tri.as_deref().unwrap_or("boundary_delta5");
        let (tri, pinned) = load_triangulation(source)?;
        let field = resolve_field_with_pinned(field.as_deref(), &pinned)?;
        if pinned.is_none() {
            check_verification_field(field)?;
        }
        let lat = tri.lattice()?;
        let theorem = match what {
            VerifyWhat::FComplex => "cf",
            _ => "cg",
        };
        run_trials(theorem, field, seed, trials, timings, |_, rng| {
            let zeta = trial_coordinates(&tri, &pinned, field, rng)?;
            let composites: Vec<ExactMatrix> = match what {
                VerifyWhat::FComplex => {
                    let f = build_f_complex(&tri, &lat, &zeta);
                    vec![
                        f.f3.matmul(&f.f2),
                        f.f4.matmul(&f.f3),
                        f.f5.matmul(&f.f4),
                    ]
                }
                _ => {
                    let g = build_g_complex(&tri, &lat, &zeta);
                    vec![
                        g.g3.matmul(&g.g2),
                        g.g4.matmul(&g.g3),
                        g.g5.matmul(&g.g4),
                    ]
                }
            };
            let residual: usize = composites.iter().map(|m| m.iter_entries().count()).sum();
            Ok((residual == 0, residual))
        })?
    } else {
        let field = parse_field(field.as_deref())?;
        check_verification_field(field)?;
        let reference = Triangulation::builtin("pachner33_lhs")?;
        match what {
            VerifyWhat::Pachner33 => {
                run_trials("33", field, seed, trials, timings, |_, rng| {
                    let zeta = reference.random_coordinates(field, rng.gen())?;
                    let report = verify_33(&zeta, &WChoice::Auto, &WChoice::Auto)?;
                    Ok((report.equal, report.residual_terms()))
                })?
            }
            VerifyWhat::TheoremD1 => {
                let common = common_tets_33()?;
                run_trials("d1", field, seed, trials, timings, |_, rng| {
                    let zeta = reference.random_coordinates(field, rng.gen())?;
                    let chain = random_tet_chain(&common, field, rng);
                    let report = verify_d1(&zeta, &chain)?;
                    Ok((report.equal, report.residual_terms()))
                })?
            }
            _ => {
                run_trials("b", field, seed, trials, timings, |_, rng| {
                    let zeta = reference.random_coordinates(field, rng.gen())?;
                    let mut equal = true;
                    let mut residual = 0;
                    for name in ["pachner33_lhs", "pachner33_rhs"] {
                        let side = MoveSide::builtin(name, zeta.clone())?;
                        let base =
                            random_xchain(side.triangulation().simplices(), field, rng);
                        let chain = random_tet_chain(side.inner_tetrahedra(), field, rng);
                        let shift =
                            xchain_from_tet_chain(side.lattice(), &chain, field, false)?;
                        let before = side_integral(&side, Some(&base), &WChoice::Auto)?;
                        let after =
                            side_integral(&side, Some(&base.add(&shift)?), &WChoice::Auto)?;
                        let diff = before.gr_sub(&after)?;
                        equal &= diff.is_zero();
                        residual += diff.term_count();
                    }
                    Ok((equal, residual))
                })?
            }
        }
    };
    Ok(if passed == trials { 0 } else { 1 })
}

/// The boundary tetrahedra shared by the two three-to-three sides.
fn common_tets_33() -> Result<Vec<[u32; 4]>, Failure> {
    let lhs = Triangulation::builtin("pachner33_lhs")?.lattice()?;
    let rhs = Triangulation::builtin("pachner33_rhs")?.lattice()?;
    let other = rhs.boundary_tetrahedra();
    Ok(lhs
        .boundary_tetrahedra()
        .into_iter()
        .filter(|t| other.contains(t))
        .collect())
}

/// The boundary tetrahedra shared by the two two-to-four sides.
fn common_tets_24() -> Result<Vec<[u32; 4]>, Failure> {
    let lhs = Triangulation::builtin("pachner24_lhs")?.lattice()?;
    let rhs = Triangulation::builtin("pachner24_rhs")?.lattice()?;
    let other = rhs.boundary_tetrahedra();
    Ok(lhs
        .boundary_tetrahedra()
        .into_iter()
        .filter(|t| other.contains(t))
        .collect())
}

fn cmd_explore24(
    field: Option<String>,
    seed: u64,
    trials: u64,
    deform: DeformMode,
    timings: bool,
) -> Result<i32, Failure> {
    let field = parse_field(field.as_deref())?;
    check_verification_field(field)?;
    let reference = Triangulation::builtin("pachner24_lhs")?;
    let common = common_tets_24()?;
    let lhs_lat = Triangulation::builtin("pachner24_lhs")?.lattice()?;
    let rhs_lat = Triangulation::builtin("pachner24_rhs")?.lattice()?;
    run_trials("24", field, seed, trials, timings, |_, rng| {
        let zeta = reference.random_coordinates(field, rng.gen())?;
        let report = match deform {
            DeformMode::None => {
                explore_24(&zeta, None, None, &WChoice::Auto, &WChoice::Auto)?
            }
            _ => {
                let chain = random_tet_chain(&common, field, rng);
                let mut x_lhs = xchain_from_tet_chain(&lhs_lat, &chain, field, true)?;
                let mut x_rhs = xchain_from_tet_chain(&rhs_lat, &chain, field, true)?;
                if deform == DeformMode::Random {
                    let inner_l = random_tet_chain(&lhs_lat.inner_tetrahedra(), field, rng);
                    x_lhs = x_lhs.add(&xchain_from_tet_chain(&lhs_lat, &inner_l, field, false)?)?;
                    let inner_r = random_tet_chain(&rhs_lat.inner_tetrahedra(), field, rng);
                    x_rhs = x_rhs.add(&xchain_from_tet_chain(&rhs_lat, &inner_r, field, false)?)?;
                }
                explore_24(
                    &zeta,
                    Some(&x_lhs),
                    Some(&x_rhs),
                    &WChoice::Auto,
                    &WChoice::Auto,
                )?
            }
        };
        Ok((report.equal, report.residual_terms()))
    })?;
    // Exploration never fails on a residual.
    Ok(0)
}

fn json_string(text: &str) -> String {
    serde_json::to_string(text).expect("strings serialize")
}

fn cmd_homology(
    which: ComplexKind,
    tri_source: &str,
    field: Option<String>,
    seed: u64,
) -> Result<i32, Failure> {
    let (tri, pinned) = load_triangulation(tri_source)?;
    let field = resolve_field_with_pinned(field.as_deref(), &pinned)?;
    let lat = tri.lattice()?;
    let (zeta, drawn) = match &pinned {
        Some(zeta) => (zeta.clone(), false),
        None => (tri.random_coordinates(field, seed)?, true),
    };
    let (name, dims, maps): (&str, Vec<usize>, Vec<ExactMatrix>) = match which {
        ComplexKind::F => {
            let f = build_f_complex(&tri, &lat, &zeta);
            if lat.inner_vertices().is_empty() {
                // The complex shortens to its three middle spaces.
                let dims = vec![f.f3.ncols(), f.f4.ncols(), f.f4.nrows()];
                ("f", dims, vec![f.f3, f.f4])
            } else {
                ("f", f.dims().to_vec(), vec![f.f2, f.f3, f.f4, f.f5])
            }
        }
        ComplexKind::G => {
            let g = build_g_complex(&tri, &lat, &zeta);
            ("g", g.dims().to_vec(), vec![g.g2, g.g3, g.g4, g.g5])
        }
    };
    let ranks: Vec<usize> = maps.iter().map(ExactMatrix::rank).collect();
    let map_refs: Vec<&ExactMatrix> = maps.iter().collect();
    let homology = homology_dims(&dims, &map_refs).map_err(|e| Failure {
        code: 1,
        message: e.to_string(),
    })?;
    let mut line = format!(
        "{{\"complex\":\"{name}\",\"tri\":{},\"field\":\"{field}\"",
        json_string(tri_source)
    );
    if drawn {
        let _ = write!(line, ",\"seed\":{seed}");
    }
    let _ = write!(
        line,
        ",\"dims\":{:?},\"ranks\":{:?},\"homology\":{:?}}}",
        dims, ranks, homology
    );
    println!("{line}");
    Ok(0)
}

fn cmd_export(
    tri_source: &str,
    out: &std::path::Path,
    field: Option<String>,
    seed: u64,
) -> Result<i32, Failure> {
    let (tri, pinned) = load_triangulation(tri_source)?;
    let field = resolve_field_with_pinned(field.as_deref(), &pinned)?;
    let lat = tri.lattice()?;
    let (zeta, drawn) = match &pinned {
        Some(zeta) => (zeta.clone(), false),
        None => (tri.random_coordinates(field, seed)?, true),
    };
    std::fs::create_dir_all(out)
        .map_err(|e| input_error(format!("cannot create {}: {e}", out.display())))?;
    let f = build_f_complex(&tri, &lat, &zeta);
    let g = build_g_complex(&tri, &lat, &zeta);
    let mut files: Vec<(&str, Value)> = Vec::new();
    let has_inner_vertices = !lat.inner_vertices().is_empty();
    if has_inner_vertices {
        files.push(("f2.json", f.f2.to_json()));
    }
    files.push(("f3.json", f.f3.to_json()));
    files.push(("f4.json", f.f4.to_json()));
    if has_inner_vertices {
        files.push(("f5.json", f.f5.to_json()));
    } else {
        // The gauge transform is defined on clusters without inner vertices.
        files.push(("f3_tilde.json", gauge_f3(&f.f3, &zeta).to_json()));
        files.push(("f4_tilde.json", gauge_f4(&f.f4, &zeta).to_json()));
    }
    files.push(("g2.json", g.g2.to_json()));
    files.push(("g3.json", g.g3.to_json()));
    files.push(("g4.json", g.g4.to_json()));
    files.push(("g5.json", g.g5.to_json()));
    files.push(("weights.json", weights_json(&tri, &zeta, drawn.then_some(seed))));
    for (name, value) in files {
        let path = out.join(name);
        let text = format!("{value}\n");
        std::fs::write(&path, text)
            .map_err(|e| input_error(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(0)
}

/// The weight expansion of every 4-simplex, with the coordinates used.
fn weights_json(tri: &Triangulation, zeta: &VertexCoordinates, seed: Option<u64>) -> Value {
    let zeta_entries: Vec<Value> = zeta
        .vertices()
        .map(|v| json!([v, zeta.get(v).to_string()]))
        .collect();
    let weights: Vec<Value> = tri
        .simplices()
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let w = weight(u, zeta);
            let terms: Vec<Value> = w
                .terms()
                .map(|(m, c)| json!([m.to_string(), c.to_string()]))
                .collect();
            json!({
                "simplex": u.to_vec(),
                "epsilon": tri.epsilon_by_index(i),
                "terms": terms,
            })
        })
        .collect();
    match seed {
        Some(seed) => json!({
            "field": zeta.field_tag().to_string(),
            "seed": seed,
            "zeta": zeta_entries,
            "weights": weights,
        }),
        None => json!({
            "field": zeta.field_tag().to_string(),
            "zeta": zeta_entries,
            "weights": weights,
        }),
    }
}
