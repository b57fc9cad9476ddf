use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mrwtv::decompose_l1::solve_l1;
use mrwtv::decompose_l2::{multiscale, solve_rof};
use mrwtv::geometry::{
    cheeger, coarea_profile, curvature, integral, is_calibrable, lambda_ratio, measure_of,
    median_interval, perimeter, total_variation,
};
use mrwtv::io::{self, function_json, set_json, SCHEMA_VERSION};
use mrwtv::mincut::{solve_geometric, Select};
use mrwtv::repro::{self, ReproReport};
use mrwtv::thresholds::{minimizer_thresholds, Transition, Witnessed};
use mrwtv::tvflow::{decay_report, simulate, Fidelity};
use mrwtv::{Error, NodeSet, RandomWalkSpace, Rational, Scalar};
use serde_json::{json, Value};

const EXIT_VALIDATION: u8 = 2;
const EXIT_VERIFICATION: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "mrwtv",
    version,
    about = "Total-variation decompositions on finite random walk spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Use exact rational arithmetic instead of f64.
    #[arg(long, global = true)]
    exact: bool,

    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Write the main output to a file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Worker threads for independent solves.
    #[arg(long, global = true, value_name = "K")]
    jobs: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct SpaceSource {
    /// Edge list `x y [w]`.
    #[arg(long, value_name = "PATH", value_parser = existing_path,
          conflicts_with_all = ["kernel_grid", "points", "space"],
          required_unless_present_any = ["kernel_grid", "points", "space"])]
    edges: Option<PathBuf>,

    /// Kernel grid configuration (JSON).
    #[arg(long = "kernel-grid", value_name = "PATH", value_parser = existing_path,
          conflicts_with_all = ["points", "space"])]
    kernel_grid: Option<PathBuf>,

    /// Point cloud `id c_1 ... c_d mass`; needs --eps.
    #[arg(long, value_name = "PATH", value_parser = existing_path,
          requires = "eps", conflicts_with = "space")]
    points: Option<PathBuf>,

    /// Ball radius for point clouds.
    #[arg(long, value_name = "EPS")]
    eps: Option<f64>,

    /// Serialized space (JSON).
    #[arg(long, value_name = "PATH", value_parser = existing_path)]
    space: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check stochasticity, reversibility and connectivity of a space.
    Validate {
        #[command(flatten)]
        source: SpaceSource,
    },
    /// Summarize a space, and optionally a function and a set on it.
    Analyze {
        #[command(flatten)]
        source: SpaceSource,
        /// Function CSV `state,value`.
        #[arg(long, value_name = "PATH", value_parser = existing_path)]
        signal: Option<PathBuf>,
        /// Set file with state names.
        #[arg(long, value_name = "PATH", value_parser = existing_path)]
        set: Option<PathBuf>,
        /// Also serialize the space to this JSON file.
        #[arg(long = "write-space", value_name = "PATH")]
        write_space: Option<PathBuf>,
    },
    /// Minimize P(A) + lambda nu(A xor F) over sets A.
    GeoSolve {
        #[command(flatten)]
        source: SpaceSource,
        #[arg(long, value_name = "PATH", value_parser = existing_path)]
        set: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        /// Report the maximal minimizer instead of the minimal one.
        #[arg(long)]
        maximal: bool,
    },
    /// L1 or L2 decomposition f = u + v.
    Decompose {
        #[command(flatten)]
        source: SpaceSource,
        /// Fidelity exponent.
        #[arg(long, value_parser = ["1", "2"])]
        p: String,
        #[arg(long, required_unless_present = "multiscale", allow_hyphen_values = true)]
        lambda: Option<String>,
        #[arg(long, value_name = "PATH", value_parser = existing_path)]
        signal: PathBuf,
        /// Increasing lambda schedule for iterated L2 decompositions.
        #[arg(long, value_name = "L1,L2,...", value_delimiter = ',')]
        multiscale: Option<Vec<String>>,
    },
    /// Thresholding parameters of the indicator of a set.
    Thresholds {
        #[command(flatten)]
        source: SpaceSource,
        #[arg(long, value_name = "PATH", value_parser = existing_path)]
        set: PathBuf,
    },
    /// Implicit Euler gradient flow.
    Flow {
        #[command(flatten)]
        source: SpaceSource,
        #[arg(long, value_parser = ["l1", "l2"])]
        fidelity: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, allow_hyphen_values = true)]
        dt: String,
        /// Final time.
        #[arg(long = "T", value_name = "T", allow_hyphen_values = true)]
        t_final: String,
        #[arg(long, value_name = "PATH", value_parser = existing_path)]
        v0: PathBuf,
        #[arg(long, value_name = "PATH", value_parser = existing_path)]
        signal: PathBuf,
        /// Store every k-th state.
        #[arg(long, default_value_t = 1)]
        stride: usize,
        /// Also write the trajectory CSV here.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Reproduce the built-in worked examples.
    Repro {
        #[command(subcommand)]
        example: Example,
    },
}

#[derive(Subcommand, Debug)]
enum Example {
    /// Six-state weighted chain.
    Chain6 {
        /// Loop weight at state 4; runs the loop-bound check.
        #[arg(long = "loop", value_name = "ALPHA")]
        loop_weight: Option<String>,
        /// Run the chain checks on another six-state edge list.
        #[arg(long, value_name = "PATH", value_parser = existing_path)]
        edges: Option<PathBuf>,
    },
    /// Two rectangles on a lattice merging into one square.
    Grid {
        /// Free cells around the rectangles.
        #[arg(long, default_value_t = 2)]
        margin: usize,
    },
}

fn existing_path(s: &str) -> Result<PathBuf, String> {
    let p = PathBuf::from(s);
    if p.exists() {
        Ok(p)
    } else {
        Err(format!("no such file: {s}"))
    }
}

/// Rendered result of a subcommand.
struct Output {
    text: String,
    json: Value,
    /// False when a verification inside the command failed.
    verified: bool,
}

impl Output {
    fn ok(text: String, json: Value) -> Self {
        Output {
            text,
            json,
            verified: true,
        }
    }
}

enum Failure {
    Validation(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(_) => Failure::Verification(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

type Run = Result<Output, Failure>;

fn with_schema(mut v: Value) -> Value {
    if let Value::Object(map) = &mut v {
        map.insert("schema".into(), json!(SCHEMA_VERSION));
    }
    v
}

fn load_space<S: Scalar>(src: &SpaceSource, require_ergodic: bool) -> Result<RandomWalkSpace<S>, Error> {
    let space = if let Some(p) = &src.edges {
        RandomWalkSpace::graph_space(&io::read_edge_list::<S>(p)?)?
    } else if let Some(p) = &src.kernel_grid {
        RandomWalkSpace::from_kernel_grid(&io::read_kernel_grid(p)?)?
    } else if let Some(p) = &src.points {
        let cloud = io::read_point_cloud::<S>(p)?;
        let eps = src.eps.expect("clap requires --eps with --points");
        RandomWalkSpace::from_point_cloud(cloud.ids, &cloud.coords, cloud.masses, eps)?
    } else if let Some(p) = &src.space {
        io::read_space::<S>(p)?
    } else {
        unreachable!("clap requires a space source")
    };
    if require_ergodic {
        space.require_ergodic()?;
        let report = space.validate();
        if !report.passed() {
            return Err(Error::Invalid(format!(
                "space fails validation: stochastic={}, reversible={}, measure positive={}",
                report.stochastic, report.reversible, report.measure_positive
            )));
        }
    }
    log::info!("loaded space with {} states", space.n());
    Ok(space)
}

fn parse<S: Scalar>(name: &str, value: &str) -> Result<S, Error> {
    S::parse_value(value).map_err(|_| Error::Parse(format!("--{name}: cannot parse `{value}`")))
}

fn names<S: Scalar>(space: &RandomWalkSpace<S>, set: &NodeSet) -> String {
    format!("{{{}}}", set.names(space).join(","))
}

fn validate<S: Scalar>(src: &SpaceSource) -> Run {
    let space: RandomWalkSpace<S> = load_space(src, false)?;
    let report = space.validate();
    let mut text = String::new();
    let _ = writeln!(text, "states: {}", report.states);
    let _ = writeln!(text, "stochastic: {} (residual {:e})", report.stochastic, report.stochasticity_residual);
    let _ = writeln!(text, "reversible: {} (residual {:e})", report.reversible, report.balance_residual);
    let _ = writeln!(text, "measure positive: {} (min {})", report.measure_positive, report.min_measure);
    let _ = writeln!(text, "ergodic: {}", report.ergodic);
    let mut v = serde_json::to_value(&report).map_err(Error::from)?;
    v["passed"] = json!(report.passed());
    v["provenance"] = serde_json::to_value(space.provenance()).map_err(Error::from)?;
    if report.passed() {
        Ok(Output::ok(text, with_schema(v)))
    } else {
        Err(Failure::Validation(format!("space fails validation\n{text}")))
    }
}

fn analyze<S: Scalar>(
    src: &SpaceSource,
    signal: Option<&Path>,
    set: Option<&Path>,
    write_space: Option<&Path>,
) -> Run {
    let space: RandomWalkSpace<S> = load_space(src, true)?;
    if let Some(p) = write_space {
        io::write_space(&space, p)?;
    }
    let mut text = String::new();
    let _ = writeln!(text, "states: {}", space.n());
    let _ = writeln!(text, "total measure: {}", space.total_measure());
    let _ = writeln!(text, "pairs: {}", space.pairs().len());
    let mut out = json!({
        "states": space.states(),
        "measure": function_json(space.measure()),
        "total_measure": space.total_measure().to_json(),
        "pairs": space.pairs().len(),
        "provenance": space.provenance(),
    });
    if let Some(p) = signal {
        let u = io::read_node_function(&space, p)?;
        let tv = total_variation(&space, &u);
        let profile = coarea_profile(&space, &u);
        let (lo, hi) = median_interval(&space, &u);
        let mean = integral(&space, &u) / space.total_measure();
        let _ = writeln!(text, "TV: {tv}");
        let _ = writeln!(text, "coarea integral: {}", profile.integral);
        let _ = writeln!(text, "mean: {mean}");
        let _ = writeln!(text, "median interval: [{lo}, {hi}]");
        out["signal"] = json!({
            "tv": tv.to_json(),
            "coarea_integral": profile.integral.to_json(),
            "levels": function_json(&profile.levels),
            "perimeters": function_json(&profile.perimeters),
            "mean": mean.to_json(),
            "median": [lo.to_json(), hi.to_json()],
        });
    }
    if let Some(p) = set {
        let e = io::read_node_set(&space, p)?;
        let per = perimeter(&space, &e);
        let m = measure_of(&space, &e);
        let h = curvature(&space, &e);
        let _ = writeln!(text, "set: {}", names(&space, &e));
        let _ = writeln!(text, "perimeter: {per}");
        let _ = writeln!(text, "measure: {m}");
        let mut set_out = json!({
            "set": set_json(&space, &e),
            "perimeter": per.to_json(),
            "measure": m.to_json(),
            "curvature": function_json(&h),
        });
        if !e.is_empty() {
            let ratio = lambda_ratio(&space, &e)?;
            let ch = cheeger(&space, &e)?;
            let calibrable = is_calibrable(&space, &e)?;
            let _ = writeln!(text, "P/nu: {ratio}");
            let _ = writeln!(text, "Cheeger constant: {} at {}", ch.value, names(&space, &ch.set));
            let _ = writeln!(text, "calibrable: {calibrable}");
            set_out["lambda_ratio"] = ratio.to_json();
            set_out["cheeger"] = json!({"value": ch.value.to_json(), "set": set_json(&space, &ch.set)});
            set_out["calibrable"] = json!(calibrable);
        }
        out["set"] = set_out;
    }
    Ok(Output::ok(text, with_schema(out)))
}

fn geo_solve<S: Scalar>(src: &SpaceSource, set: &Path, lambda: &str, maximal: bool) -> Run {
    let space: RandomWalkSpace<S> = load_space(src, true)?;
    let f = io::read_node_set(&space, set)?;
    let lambda: S = parse("lambda", lambda)?;
    let sol = solve_geometric(&space, &f, &lambda)?;
    let select = if maximal { Select::Maximal } else { Select::Minimal };
    let chosen = sol.selected(select);
    let text = format!(
        "set: {}\nenergy: {}\nunique: {}\n",
        names(&space, chosen),
        sol.energy,
        sol.unique
    );
    let json = json!({
        "set": set_json(&space, chosen),
        "energy": sol.energy.to_json(),
        "unique": sol.unique,
        "minimal": set_json(&space, &sol.minimal),
        "maximal": set_json(&space, &sol.maximal),
        "lambda": lambda.to_json(),
    });
    Ok(Output::ok(text, with_schema(json)))
}

fn columns_csv<S: Scalar>(space: &RandomWalkSpace<S>, header: &[&str], cols: &[&[S]]) -> String {
    let mut out = format!("state,{}\n", header.join(","));
    for (x, name) in space.states().iter().enumerate() {
        let row: Vec<String> = cols.iter().map(|c| c[x].to_string()).collect();
        let _ = writeln!(out, "{name},{}", row.join(","));
    }
    out
}

fn decompose<S: Scalar>(
    src: &SpaceSource,
    p: &str,
    lambda: Option<&str>,
    signal: &Path,
    schedule: Option<&[String]>,
) -> Run {
    let space: RandomWalkSpace<S> = load_space(src, true)?;
    let f = io::read_node_function(&space, signal)?;
    if let Some(schedule) = schedule {
        if p != "2" {
            return Err(Failure::Validation("--multiscale needs --p 2".into()));
        }
        let lambdas = schedule
            .iter()
            .map(|v| parse::<S>("multiscale", v.trim()))
            .collect::<Result<Vec<_>, _>>()?;
        let steps = multiscale(&space, &f, &lambdas)?;
        let mut text = String::new();
        let mut entries = Vec::new();
        let mut verified = true;
        for (lambda, step) in lambdas.iter().zip(&steps) {
            let cert = step.certificate.as_ref().is_some_and(|c| c.feasible);
            verified &= cert;
            let _ = writeln!(text, "lambda {lambda}: energy {}, certificate {cert}", step.energy);
            entries.push(json!({
                "lambda": lambda.to_json(),
                "u": function_json(&step.u),
                "v": function_json(&step.v),
                "energy": step.energy.to_json(),
                "certificate_ok": cert,
            }));
        }
        let mut sum = vec![S::zero(); space.n()];
        for step in &steps {
            for (a, b) in sum.iter_mut().zip(&step.u) {
                *a = a.clone() + b.clone();
            }
        }
        let residual = &steps.last().expect("nonempty schedule").v;
        text.push_str(&columns_csv(&space, &["sum_u", "residual"], &[&sum, residual]));
        let json = json!({ "steps": entries, "sum_u": function_json(&sum), "residual": function_json(residual) });
        return Ok(Output {
            text,
            json: with_schema(json),
            verified,
        });
    }
    let lambda: S = parse("lambda", lambda.expect("clap requires --lambda"))?;
    if p == "2" {
        let r = solve_rof(&space, &f, &lambda)?;
        let cert = r.certificate.as_ref().is_some_and(|c| c.feasible);
        let json = json!({
            "u": function_json(&r.u),
            "v": function_json(&r.v),
            "energy": r.energy.to_json(),
            "mean_in": r.diagnostics.mean_in,
            "mean_out": r.diagnostics.mean_out,
            "certificate_ok": cert,
            "breakpoints": r.diagnostics.breakpoints,
            "cut_solves": r.diagnostics.iterations,
        });
        Ok(Output {
            text: columns_csv(&space, &["u", "v"], &[&r.u, &r.v]),
            json: with_schema(json),
            verified: cert,
        })
    } else {
        let r = solve_l1(&space, &f, &lambda)?;
        let cert = r.certificate.as_ref().is_some_and(|c| c.feasible);
        let json = json!({
            "u_min": function_json(&r.minimal_u),
            "u_max": function_json(&r.maximal_u),
            "energy": r.energy.to_json(),
            "unique": r.unique,
            "certificate_ok": cert,
            "levels": r.levels,
        });
        Ok(Output {
            text: columns_csv(&space, &["u_min", "u_max"], &[&r.minimal_u, &r.maximal_u]),
            json: with_schema(json),
            verified: cert,
        })
    }
}

fn witnessed<S: Scalar>(space: &RandomWalkSpace<S>, w: &Witnessed<S>) -> Value {
    json!({ "value": w.value.to_json(), "witness": set_json(space, &w.witness) })
}

fn transition<S: Scalar>(space: &RandomWalkSpace<S>, t: &Transition<S>) -> Value {
    json!({
        "lambda": t.lambda.to_json(),
        "below": set_json(space, &t.below),
        "above": set_json(space, &t.above),
        "minimal": set_json(space, &t.minimal),
        "maximal": set_json(space, &t.maximal),
    })
}

fn thresholds<S: Scalar>(src: &SpaceSource, set: &Path) -> Run {
    let space: RandomWalkSpace<S> = load_space(src, true)?;
    let omega = io::read_node_set(&space, set)?;
    let t = minimizer_thresholds(&space, &omega)?;
    let mut text = String::new();
    let rows = [
        ("P/nu", t.lambda_ratio.to_string()),
        ("P/nu of complement", t.lambda_ratio_complement.to_string()),
        ("lambda(Omega)", format!("{} via {}", t.lambda_omega.value, names(&space, &t.lambda_omega.witness))),
        ("lambda0(Omega)", format!("{} via {}", t.lambda0.value, names(&space, &t.lambda0.witness))),
        ("lambda1(Omega)", format!("{} via {}", t.lambda1.value, names(&space, &t.lambda1.witness))),
        ("lambda*(Omega)", t.lambda_star.to_string()),
        ("Cheeger constant", format!("{} at {}", t.cheeger.value, names(&space, &t.cheeger.witness))),
        ("eigenpair", t.eigenpair.to_string()),
    ];
    for (k, v) in rows {
        let _ = writeln!(text, "{k:<22} {v}");
    }
    let mut prev = String::from("0");
    for tr in &t.scale_space {
        let _ = writeln!(text, "({prev}, {})  {}", tr.lambda, names(&space, &tr.below));
        prev = tr.lambda.to_string();
    }
    if let Some(last) = t.scale_space.last() {
        let _ = writeln!(text, "({prev}, inf)  {}", names(&space, &last.above));
    }
    let json = json!({
        "set": set_json(&space, &omega),
        "lambda_ratio": t.lambda_ratio.to_json(),
        "lambda_ratio_complement": t.lambda_ratio_complement.to_json(),
        "lambda_omega": witnessed(&space, &t.lambda_omega),
        "lambda0": witnessed(&space, &t.lambda0),
        "lambda0_attained": t.lambda0_attained,
        "lambda1": witnessed(&space, &t.lambda1),
        "lambda1_attained": t.lambda1_attained,
        "lambda_star": t.lambda_star.to_json(),
        "cheeger": witnessed(&space, &t.cheeger),
        "cheeger_complement": witnessed(&space, &t.cheeger_complement),
        "eigenpair": t.eigenpair,
        "scale_space": t.scale_space.iter().map(|tr| transition(&space, tr)).collect::<Vec<_>>(),
    });
    Ok(Output::ok(text, with_schema(json)))
}

#[allow(clippy::too_many_arguments)]
fn flow<S: Scalar>(
    src: &SpaceSource,
    fidelity: &str,
    lambda: &str,
    dt: &str,
    t_final: &str,
    v0: &Path,
    signal: &Path,
    stride: usize,
    csv: Option<&Path>,
) -> Run {
    let space: RandomWalkSpace<S> = load_space(src, true)?;
    let fidelity: Fidelity = fidelity.parse()?;
    let lambda: S = parse("lambda", lambda)?;
    let dt: S = parse("dt", dt)?;
    let t_final: S = parse("T", t_final)?;
    let v0 = io::read_node_function(&space, v0)?;
    let f = io::read_node_function(&space, signal)?;
    let mut traj = simulate(&space, &v0, &f, &lambda, &t_final, &dt, fidelity, stride)?;
    traj.target = Some(match fidelity {
        Fidelity::L2 => solve_rof(&space, &f, &lambda)?.u,
        Fidelity::L1 => solve_l1(&space, &f, &lambda)?.u,
    });
    let decay = decay_report(&space, &traj)?;
    let mut table = format!("t,{}\n", space.states().join(","));
    for (t, v) in traj.times.iter().zip(&traj.states) {
        let row: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(table, "{t},{}", row.join(","));
    }
    if let Some(p) = csv {
        fs::write(p, &table).map_err(Error::from)?;
    }
    let json = json!({
        "fidelity": fidelity,
        "steps": traj.steps,
        "stride": traj.stride,
        "times": function_json(&traj.times),
        "energy_series": function_json(&traj.energy_series),
        "mass_series": function_json(&traj.mass_series),
        "energy_nonincreasing": traj.energy_nonincreasing,
        "decay_ratios": decay.ratios,
        "distances": decay.distances,
        "max_ratio": decay.max_ratio,
        "ratio_bound": decay.ratio_bound,
        "terminal_distance": decay.terminal_distance,
        "final": function_json(traj.states.last().expect("initial state stored")),
    });
    Ok(Output {
        text: table,
        json: with_schema(json),
        verified: traj.energy_nonincreasing,
    })
}

fn repro_output(report: ReproReport) -> Run {
    let json = with_schema(serde_json::to_value(&report).map_err(Error::from)?);
    Ok(Output {
        text: report.render(),
        verified: report.passed(),
        json,
    })
}

fn repro_run(example: &Example) -> Run {
    match example {
        Example::Chain6 {
            loop_weight: Some(alpha),
            ..
        } => {
            let alpha: Rational = parse("loop", alpha)?;
            repro_output(repro::chain6_loop_report(&alpha, &mrwtv::rat(1, 1000))?)
        }
        Example::Chain6 {
            loop_weight: None,
            edges: Some(path),
        } => {
            let space = RandomWalkSpace::from_weighted_graph(&io::read_edge_list::<Rational>(path)?)?;
            repro_output(repro::chain6_report_for(&space)?)
        }
        Example::Chain6 { .. } => repro_output(repro::chain6_report()?),
        Example::Grid { margin } => repro_output(repro::lattice_merge_report(*margin)?),
    }
}

fn run_typed<S: Scalar>(cmd: &Command) -> Run {
    match cmd {
        Command::Validate { source } => validate::<S>(source),
        Command::Analyze {
            source,
            signal,
            set,
            write_space,
        } => analyze::<S>(source, signal.as_deref(), set.as_deref(), write_space.as_deref()),
        Command::GeoSolve {
            source,
            set,
            lambda,
            maximal,
        } => geo_solve::<S>(source, set, lambda, *maximal),
        Command::Decompose {
            source,
            p,
            lambda,
            signal,
            multiscale,
        } => decompose::<S>(source, p, lambda.as_deref(), signal, multiscale.as_deref()),
        Command::Thresholds { source, set } => thresholds::<S>(source, set),
        Command::Flow {
            source,
            fidelity,
            lambda,
            dt,
            t_final,
            v0,
            signal,
            stride,
            csv,
        } => flow::<S>(source, fidelity, lambda, dt, t_final, v0, signal, *stride, csv.as_deref()),
        Command::Repro { example } => repro_run(example),
    }
}

fn emit(cli: &Cli, output: &Output) -> Result<(), Error> {
    let body = if cli.json {
        let mut s = serde_json::to_string_pretty(&output.json)?;
        s.push('\n');
        s
    } else {
        output.text.clone()
    };
    match &cli.out {
        Some(p) => fs::write(p, body)?,
        None => print!("{body}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("MRWTV_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(k) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            log::warn!("cannot set thread count: {e}");
        }
    }
    let result = if cli.exact {
        run_typed::<Rational>(&cli.command)
    } else {
        run_typed::<f64>(&cli.command)
    };
    match result {
        Ok(output) => {
            if let Err(e) = emit(&cli, &output) {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_VALIDATION);
            }
            if output.verified {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: verification failed");
                ExitCode::from(EXIT_VERIFICATION)
            }
        }
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VERIFICATION)
        }
    }
}
