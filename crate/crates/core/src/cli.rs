//! The `entgrowth` command line: one subcommand per module, JSON documents
//! in, canonical JSON or tidy CSV out.
//!
//! Exit codes: 0 success, 2 parse/schema/argument error, 3 numeric failure,
//! 64 unknown or missing subcommand.

use crate::efun::FiniteOrderFunction;
use crate::error::Error;
use crate::growth::{indicators, CircleQuadrature};
use crate::laplace::{
    moment_identity_residual, obstruction_conditions, support_params, zeros_in_disk, Kernel, TransformZeroData,
};
use crate::potential::{beta_exponent, capacity_estimate, wiener_partial_sums, PointCloud};
use crate::report::{csv_table, ext_real, fmt_f64, to_canonical_json};
use crate::schema::{CloudJson, KernelJson, SeqSpecJson, ZeroData};
use crate::seqlab::{
    dichotomy_classify, finite_order_reduce, growth_bound_check, hypothesis_flags, ring_constants, tail_sums,
    ClassifierConfig, RegionParams,
};
use crate::series::{convergence_region, partial_sum, pointwise_to_uniform_check, CheckConfig, RegionRadius};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use std::ffi::OsString;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Run settings after merging defaults, flags and the config file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Circle quadrature nodes, a power of two `>= 64`.
    pub nodes: usize,
    pub tol: f64,
    pub seed: u64,
    pub out_path: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            nodes: 4096,
            tol: 1e-10,
            seed: 0,
            out_path: None,
            format: Format::Json,
        }
    }
}

/// Config file contents; every present key overrides the matching flag.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    nodes: Option<usize>,
    tol: Option<f64>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<Format>,
}

#[derive(Debug, Parser)]
#[command(
    name = "entgrowth",
    version,
    about = "Growth indicators and zero statistics for entire functions"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Circle quadrature nodes (power of two, at least 64).
    #[arg(long, global = true)]
    nodes: Option<usize>,
    /// Numerical tolerance (quadrature, zero search, support cut-off).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed recorded in the report.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// JSON config file; its keys take precedence over flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Degree, zero counts and values of one function (zerodata-v1).
    Efun {
        input: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
        radii: Vec<f64>,
        /// Absorb zeros of modulus below this cut into a finite-order remainder.
        #[arg(long)]
        reduce: Option<f64>,
    },
    /// Circle indicators C(f,R), ||f||_R and eta(f,R) (zerodata-v1).
    Growth {
        input: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
        radii: Vec<f64>,
        #[arg(long, default_value_t = 1024)]
        sup_samples: usize,
    },
    /// Sequence statistics, tail sums and the tail classifier (seqspec-v1).
    Seq {
        input: PathBuf,
        #[arg(long, default_value_t = 4)]
        m_max: u32,
        /// Capacity growth exponent for the bound check.
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        #[arg(long, default_value_t = 0.0)]
        tau: f64,
        /// Constant C0 for the bound check (defaults to the estimated one).
        #[arg(long)]
        c0: Option<f64>,
    },
    /// Capacity of a cloud (cloud-v1), a radius family or a dyadic family.
    Cap {
        input: PathBuf,
        /// Leja points used (defaults to a size-based choice).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Truncated Laplace transform of a kernel (kernel-v1).
    Laplace {
        input: PathBuf,
        /// Truncation length (defaults to the kernel's extent).
        #[arg(long)]
        n: Option<f64>,
        /// Zero-search radius.
        #[arg(long, default_value_t = 20.0)]
        radius: f64,
        /// Truncation radii for the first-moment identity.
        #[arg(long, value_delimiter = ',')]
        trunc: Vec<f64>,
        /// Exponents s for int e^{s t} |phi|.
        #[arg(long, value_delimiter = ',')]
        s_grid: Vec<f64>,
        /// Truncation lengths for the zero-tail conditions.
        #[arg(long, value_delimiter = ',')]
        n_seq: Vec<f64>,
        #[arg(long, default_value_t = 1.5)]
        q: f64,
        /// Radii for the zero-tail conditions.
        #[arg(long, value_delimiter = ',', default_value = "2,4,8")]
        radii: Vec<f64>,
    },
    /// Partial sums, convergence region and uniformity check (seqspec-v1 with a series block).
    Series {
        input: PathBuf,
        /// Number of terms summed (all by default).
        #[arg(long)]
        terms: Option<usize>,
    },
    /// Flattens a report into a tidy CSV table.
    Plotdata { report: PathBuf },
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Numeric { op: &'static str, err: Error },
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::Numeric { .. } => EXIT_NUMERIC,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Input(msg) => write!(f, "{msg}"),
            Failure::Numeric { op, err } => write!(f, "numeric failure in {op}: {err}"),
        }
    }
}

type Out<T> = std::result::Result<T, Failure>;

fn ctx<T>(r: crate::Result<T>, op: &'static str) -> Out<T> {
    r.map_err(|err| {
        if err.is_numeric() {
            Failure::Numeric { op, err }
        } else {
            Failure::Input(format!("{op}: {err}"))
        }
    })
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// exit code. Diagnostics go to stderr.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                ErrorKind::InvalidSubcommand
                | ErrorKind::MissingSubcommand
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => EXIT_USAGE,
                _ => EXIT_INPUT,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("entgrowth: {f}");
            f.code()
        }
    }
}

fn resolve_config(g: &GlobalArgs) -> Out<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(n) = g.nodes {
        cfg.nodes = n;
    }
    if let Some(t) = g.tol {
        cfg.tol = t;
    }
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    cfg.out_path = g.out.clone();
    if let Some(f) = g.format {
        cfg.format = f;
    }
    if let Some(path) = &g.config {
        let file: ConfigFile = parse_json(path)?;
        if let Some(n) = file.nodes {
            cfg.nodes = n;
        }
        if let Some(t) = file.tol {
            cfg.tol = t;
        }
        if let Some(s) = file.seed {
            cfg.seed = s;
        }
        if file.out.is_some() {
            cfg.out_path = file.out;
        }
        if let Some(f) = file.format {
            cfg.format = f;
        }
    }
    if !(cfg.tol.is_finite() && cfg.tol > 0.0) {
        return Err(Failure::Input(format!("tol must be positive, got {}", cfg.tol)));
    }
    ctx(CircleQuadrature::new(cfg.nodes), "config")?;
    Ok(cfg)
}

fn read_text(path: &Path) -> Out<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> Out<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn execute(cli: Cli) -> Out<()> {
    let cfg = resolve_config(&cli.global)?;
    let quad = ctx(
        CircleQuadrature::new(cfg.nodes).and_then(|q| q.with_tolerance(cfg.tol.max(1e-15))),
        "config",
    )?;
    let report = match &cli.command {
        Command::Efun { input, radii, reduce } => efun_report(input, radii, *reduce)?,
        Command::Growth {
            input,
            radii,
            sup_samples,
        } => growth_report(input, radii, &quad, *sup_samples)?,
        Command::Seq {
            input,
            m_max,
            beta,
            gamma,
            tau,
            c0,
        } => seq_report(input, *m_max, *beta, *gamma, *tau, *c0, &quad)?,
        Command::Cap { input, n } => cap_report(input, *n)?,
        Command::Laplace {
            input,
            n,
            radius,
            trunc,
            s_grid,
            n_seq,
            q,
            radii,
        } => laplace_report(input, *n, *radius, trunc, s_grid, n_seq, *q, radii, cfg.tol)?,
        Command::Series { input, terms } => series_report(input, *terms, &quad)?,
        Command::Plotdata { report } => {
            let text = read_text(report)?;
            let value: Value =
                serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", report.display())))?;
            return write_output(&cfg, &plot_table(&value)?);
        }
    };
    let mut report = report;
    if let Value::Object(map) = &mut report {
        map.insert(
            "config".into(),
            json!({"nodes": cfg.nodes, "tol": ext_real(cfg.tol), "seed": cfg.seed}),
        );
    }
    let text = match cfg.format {
        Format::Json => to_canonical_json(&report),
        Format::Csv => plot_table(&report)?,
    };
    write_output(&cfg, &text)
}

fn write_output(cfg: &RunConfig, text: &str) -> Out<()> {
    match &cfg.out_path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cx(z: Complex64) -> Value {
    json!({"re": ext_real(z.re), "im": ext_real(z.im)})
}

fn opt_real(x: Option<f64>) -> Value {
    x.map_or(Value::Null, ext_real)
}

fn zerodata_value(f: &FiniteOrderFunction) -> Out<Value> {
    serde_json::to_value(ZeroData::from_function(f)).map_err(|e| Failure::Input(format!("serialising zero data: {e}")))
}

fn load_function(input: &Path) -> Out<FiniteOrderFunction> {
    let doc: ZeroData = parse_json(input)?;
    ctx(doc.to_function(), "zerodata-v1")
}

fn efun_report(input: &Path, radii: &[f64], reduce: Option<f64>) -> Out<Value> {
    let f = load_function(input)?;
    check_radii(radii)?;
    let rows: Vec<Value> = radii
        .iter()
        .map(|&r| {
            let e = f.eval(Complex64::new(r, 0.0));
            json!({"R": ext_real(r), "eta": f.zero_count(r), "log_abs": ext_real(e.log_abs), "arg": ext_real(e.arg)})
        })
        .collect();
    let reduced = match reduce {
        Some(cut) => zerodata_value(&ctx(finite_order_reduce(&f, cut), "finite_order_reduce")?)?,
        None => Value::Null,
    };
    Ok(json!({
        "kind": "efun-report-v1",
        "genus": f.genus(),
        "origin_mult": f.origin_mult(),
        "total_multiplicity": f.total_multiplicity(),
        "hadamard_degree": ext_real(f.hadamard_degree()),
        "rows": rows,
        "reduced": reduced,
    }))
}

fn check_radii(radii: &[f64]) -> Out<()> {
    if radii.is_empty() || radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Failure::Input("radii must be a nonempty list of positive reals".into()));
    }
    Ok(())
}

fn growth_report(input: &Path, radii: &[f64], q: &CircleQuadrature, sup_samples: usize) -> Out<Value> {
    let f = load_function(input)?;
    check_radii(radii)?;
    let rows: Vec<Value> = radii
        .iter()
        .map(|&r| {
            let g = ctx(indicators(&f, r, q, sup_samples), "growth_indicators")?;
            Ok(json!({
                "R": ext_real(g.radius),
                "log_mean": ext_real(g.log_mean),
                "sup_norm": ext_real(g.sup_norm),
                "eta": g.zero_count,
            }))
        })
        .collect::<Out<_>>()?;
    Ok(json!({"kind": "growth-report-v1", "rows": rows}))
}

fn seq_report(
    input: &Path,
    m_max: u32,
    beta: Option<f64>,
    gamma: f64,
    tau: f64,
    c0: Option<f64>,
    q: &CircleQuadrature,
) -> Out<Value> {
    let doc: SeqSpecJson = parse_json(input)?;
    let s = ctx(doc.to_spec(), "seqspec-v1")?;
    let cfg = ClassifierConfig::default();
    let stats = ctx(ring_constants(&s, q), "ring_constants")?;
    let tails = ctx(tail_sums(&s, m_max), "tail_sums")?;
    let mut tail_rows = Vec::new();
    for (ni, per_r) in tails.s.iter().enumerate() {
        for (ri, per_m) in per_r.iter().enumerate() {
            for (mi, sv) in per_m.iter().enumerate() {
                tail_rows.push(json!({
                    "n": ni + 1,
                    "R": ext_real(tails.r_grid[ri]),
                    "m": mi + 1,
                    "S": ext_real(*sv),
                    "T": ext_real(tails.t[ni][ri][mi]),
                }));
            }
        }
    }
    let beta_rows: Vec<Value> = tails
        .beta
        .iter()
        .enumerate()
        .flat_map(|(ni, bs)| {
            let radius = tails.beta_radius[ni];
            bs.iter().enumerate().map(move |(li, b)| {
                json!({"n": ni + 1, "l": li + 1, "R": ext_real(radius),
                       "magnitude": ext_real(b.magnitude), "argument": ext_real(b.argument)})
            })
        })
        .collect();
    let dichotomy = match dichotomy_classify(&s, m_max, &cfg) {
        Ok(v) => json!({
            "alternative": v.alternative.as_str(),
            "witness_m": v.witness_m,
            "signed_decay": v.signed_decay,
            "evidence": v.evidence.iter().map(|t| json!({
                "R": ext_real(t.radius), "m": t.power, "window_max": ext_real(t.window_max),
                "exponent": ext_real(t.exponent), "extrapolated": ext_real(t.extrapolated),
                "monotone_growth": t.monotone_growth,
            })).collect::<Vec<_>>(),
            "caveat": v.caveat,
        }),
        Err(e @ Error::Invalid(_)) => json!({"skipped": e.to_string()}),
        Err(err) => {
            return Err(Failure::Numeric {
                op: "dichotomy_classify",
                err,
            })
        }
    };
    let flags = ctx(hypothesis_flags(&s, &cfg), "hypothesis_flags")?;
    let bound = match beta {
        Some(b) => {
            let params = ctx(RegionParams::new(b, gamma, tau), "growth_bound_check")?;
            let r = ctx(
                growth_bound_check(&s, &params, c0.unwrap_or(stats.c0_est)),
                "growth_bound_check",
            )?;
            json!({
                "rows": r.rows.iter().map(|row| json!({
                    "R": ext_real(row.radius), "bound": ext_real(row.bound),
                    "empirical": ext_real(row.empirical), "margin": ext_real(row.margin),
                })).collect::<Vec<_>>(),
                "caveat": r.caveat,
            })
        }
        None => Value::Null,
    };
    Ok(json!({
        "kind": "seq-report-v1",
        "N": s.len(),
        "ring": {
            "C0": ext_real(stats.c0_est),
            "C0_star": ext_real(stats.c0_star_est),
            "eta_scaled": stats.eta_scaled.iter().map(|(r, v)| json!({"R": ext_real(*r), "value": ext_real(*v)})).collect::<Vec<_>>(),
            "note": stats.note,
        },
        "tails": tail_rows,
        "beta": beta_rows,
        "dichotomy": dichotomy,
        "hypotheses": {
            "degree_dominated": flags.degree_dominated,
            "first_moment_tail_vanishes": flags.first_moment_tail_vanishes,
            "witness_count_bounded": flags.witness_count_bounded,
            "absolute_tail_vanishes": flags.absolute_tail_vanishes,
            "supported": flags.supported(),
        },
        "growth_bound": bound,
    }))
}

/// `{"beta_family": [{"R": r, "cloud": cloud-v1 | null}, ...]}`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BetaFamilyJson {
    #[serde(default)]
    schema: Option<String>,
    beta_family: Vec<BetaMember>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BetaMember {
    #[serde(rename = "R")]
    r: f64,
    cloud: Option<CloudJson>,
}

/// `{"wiener_family": [cloud-v1 | null, ...]}`; entry `k - 1` is the piece at depth `k`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WienerFamilyJson {
    #[serde(default)]
    schema: Option<String>,
    wiener_family: Vec<Option<CloudJson>>,
    #[serde(default)]
    depth_max: Option<u32>,
}

fn cloud_of(c: &CloudJson, field: String) -> Out<PointCloud> {
    c.to_cloud()
        .map_err(|e| Failure::Input(format!("field `{field}`: {e}")))
}

fn cap_report(input: &Path, n: Option<usize>) -> Out<Value> {
    let text = read_text(input)?;
    let parse_err = |e: serde_json::Error| Failure::Input(format!("{}: {e}", input.display()));
    let probe: Value = serde_json::from_str(&text).map_err(parse_err)?;
    let has = |k: &str| probe.get(k).is_some();
    if has("beta_family") {
        let doc: BetaFamilyJson = serde_json::from_str(&text).map_err(parse_err)?;
        let _ = doc.schema;
        let family = doc
            .beta_family
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let cloud = m
                    .cloud
                    .as_ref()
                    .map(|c| cloud_of(c, format!("beta_family[{i}].cloud")))
                    .transpose()?;
                Ok((m.r, cloud))
            })
            .collect::<Out<Vec<_>>>()?;
        let est = ctx(
            beta_exponent(&family, n.unwrap_or(crate::potential::DEFAULT_MAX_N)),
            "beta_exponent",
        )?;
        return Ok(json!({
            "kind": "cap-family-report-v1",
            "beta": ext_real(est.beta),
            "max_ratio": ext_real(est.max_ratio),
            "rows": est.rows.iter().map(|r| json!({
                "R": ext_real(r.radius), "cap": opt_real(r.cap), "log_ratio": opt_real(r.ratio),
            })).collect::<Vec<_>>(),
            "skipped": est.skipped.iter().map(|r| ext_real(*r)).collect::<Vec<_>>(),
        }));
    }
    if has("wiener_family") {
        let doc: WienerFamilyJson = serde_json::from_str(&text).map_err(parse_err)?;
        let _ = doc.schema;
        let pieces = doc
            .wiener_family
            .iter()
            .enumerate()
            .map(|(i, c)| {
                c.as_ref()
                    .map(|c| cloud_of(c, format!("wiener_family[{i}]")))
                    .transpose()
            })
            .collect::<Out<Vec<_>>>()?;
        let depth_max = doc.depth_max.unwrap_or(pieces.len() as u32);
        let rep = ctx(wiener_partial_sums(&pieces, depth_max), "wiener_partial_sums")?;
        return Ok(json!({
            "kind": "thinness-report-v1",
            "verdict": rep.verdict.as_str(),
            "growth_exponent": opt_real(rep.growth_exponent),
            "terms": rep.partial_sums.iter().map(|t| json!({
                "depth": t.depth, "cap": ext_real(t.cap), "term": ext_real(t.term), "cumulative": ext_real(t.cumulative),
            })).collect::<Vec<_>>(),
        }));
    }
    let doc: CloudJson = serde_json::from_str(&text).map_err(parse_err)?;
    let cloud = cloud_of(&doc, "points".into())?;
    let n = n.unwrap_or_else(|| cloud.default_n());
    let est = ctx(capacity_estimate(&cloud, n), "capacity_estimate")?;
    Ok(json!({
        "kind": "cap-report-v1",
        "label": cloud.label(),
        "n_used": est.n_used,
        "diameter": ext_real(est.diameter),
        "cap": ext_real(est.cap),
        "leja_points": est.leja_points.iter().map(|&p| cx(p)).collect::<Vec<_>>(),
    }))
}

#[allow(clippy::too_many_arguments)]
fn laplace_report(
    input: &Path,
    n: Option<f64>,
    radius: f64,
    trunc: &[f64],
    s_grid: &[f64],
    n_seq: &[f64],
    q: f64,
    radii: &[f64],
    tol: f64,
) -> Out<Value> {
    let doc: KernelJson = parse_json(input)?;
    let kernel: Kernel = ctx(doc.to_kernel(), "kernel-v1")?;
    let n = n.unwrap_or_else(|| kernel.extent());
    let support = ctx(support_params(&kernel, n, tol), "support_params")?;
    let transform_at_zero = ctx(kernel.transform(Complex64::new(0.0, 0.0), n), "transform_eval")?;
    let zeros = ctx(zeros_in_disk(&kernel, n, radius, tol), "zeros_in_disk")?;
    let zero_fn = ctx(zeros.to_function(), "zeros_in_disk")?;
    let moments = if trunc.is_empty() {
        Value::Null
    } else {
        match trunc
            .iter()
            .map(|&r| moment_identity_residual(&kernel, r))
            .collect::<crate::Result<Vec<_>>>()
        {
            Ok(rows) => Value::Array(
                trunc
                    .iter()
                    .zip(rows)
                    .map(|(r, m)| {
                        json!({"R_trunc": ext_real(*r), "lhs": cx(m.lhs), "rhs": cx(m.rhs),
                               "residual": ext_real(m.residual), "zeros_used": m.zeros_used})
                    })
                    .collect(),
            ),
            Err(e @ Error::Degenerate(_)) => json!({"skipped": e.to_string()}),
            Err(err) => {
                return Err(Failure::Numeric {
                    op: "moment_identity_residual",
                    err,
                })
            }
        }
    };
    let exp_moments: Vec<Value> = s_grid
        .iter()
        .map(|&s| json!({"s": ext_real(s), "value": ext_real(kernel.exponential_moment_abs(s, n))}))
        .collect();
    let obstruction = if n_seq.is_empty() {
        Value::Null
    } else {
        if radii.iter().any(|&r| r > radius) {
            return Err(Failure::Input(
                "obstruction radii must not exceed the search radius".into(),
            ));
        }
        let mut seq: Vec<TransformZeroData> = Vec::with_capacity(n_seq.len());
        let mut mu = Vec::with_capacity(n_seq.len());
        for &m in n_seq {
            mu.push(ctx(support_params(&kernel, m, tol), "support_params")?.mu_n);
            seq.push(ctx(zeros_in_disk(&kernel, m, radius, tol), "zeros_in_disk")?);
        }
        let rep = ctx(
            obstruction_conditions(&seq, &mu, q, radii, &ClassifierConfig::default()),
            "obstruction_conditions",
        )?;
        json!({
            "q": ext_real(rep.q),
            "rows": rep.rows.iter().map(|r| json!({
                "n": ext_real(n_seq[r.n - 1]), "R": ext_real(r.radius),
                "cond1": ext_real(r.cond1), "cond2": ext_real(r.cond2), "cond3": ext_real(r.cond3),
            })).collect::<Vec<_>>(),
            "cond1_bounded": rep.cond1_bounded,
            "cond2_vanishes": rep.cond2_vanishes,
            "cond3_bounded": rep.cond3_bounded,
            "pattern_holds": rep.pattern_holds,
            "caveat": rep.caveat,
        })
    };
    Ok(json!({
        "kind": "laplace-report-v1",
        "n": ext_real(n),
        "sigma": ext_real(support.sigma),
        "mu_n": ext_real(support.mu_n),
        "transform_at_zero": cx(transform_at_zero),
        "search_radius": ext_real(zeros.radius),
        "alpha_n": zeros.alpha_n,
        "C_n": cx(zeros.c_n),
        "centre": ext_real(zeros.centre),
        "zeros": zeros.zeros.iter().map(|z| json!({
            "re": ext_real(z.location().re), "im": ext_real(z.location().im), "mult": z.multiplicity(),
        })).collect::<Vec<_>>(),
        "zerodata": zerodata_value(&zero_fn)?,
        "moment_identity": moments,
        "exponential_moments": exp_moments,
        "obstruction": obstruction,
    }))
}

fn series_report(input: &Path, terms: Option<usize>, q: &CircleQuadrature) -> Out<Value> {
    let doc: SeqSpecJson = parse_json(input)?;
    let s = ctx(doc.to_series(), "seqspec-v1")?;
    let block = doc.series.as_ref().expect("to_series checked the block");
    let samples: Vec<Complex64> = block.e_samples.iter().map(|&z| z.into()).collect();
    let n_terms = terms.unwrap_or(s.len());
    let sums: Vec<Value> = samples
        .iter()
        .map(|&z| {
            let p = ctx(partial_sum(&s, z, n_terms), "partial_sum")?;
            Ok(json!({
                "z": cx(z),
                "value": p.value.map_or(Value::Null, cx),
                "overflow": p.overflow,
                "divergence": p.divergence,
                "tail_trend": p.tail_trend.iter().map(|&m| ext_real(m)).collect::<Vec<_>>(),
            }))
        })
        .collect::<Out<_>>()?;
    let region = match &block.region {
        Some(r) => {
            let reg = ctx(
                convergence_region(r.c, r.beta, r.gamma, r.z0.into(), r.rho0),
                "convergence_region",
            )?;
            let radius = match reg.radius {
                RegionRadius::Finite(x) => ext_real(x),
                RegionRadius::Infinite => ext_real(f64::INFINITY),
                RegionRadius::Empty => Value::String("empty".into()),
            };
            json!({"center": cx(reg.center), "radius": radius})
        }
        None => Value::Null,
    };
    let check = if samples.is_empty() || s.len() < 8 {
        Value::Null
    } else {
        let r = ctx(
            pointwise_to_uniform_check(&s, &samples, q, None, &CheckConfig::default()),
            "pointwise_to_uniform_check",
        )?;
        json!({
            "stage_a": r.stage_a,
            "stage_b": r.stage_b,
            "stage_c": r.stage_c,
            "e_sample_insufficient": r.e_sample_insufficient,
            "first_moment_tail": ext_real(r.first_moment_tail),
            "eta_ratio": ext_real(r.eta_ratio),
            "samples": r.samples.iter().map(|e| json!({
                "z": cx(e.z), "root_max": ext_real(e.root_max),
                "cauchy_gap": ext_real(e.cauchy_gap), "converges": e.converges,
            })).collect::<Vec<_>>(),
            "degrees": r.degrees.iter().map(|d| json!({
                "n": d.n, "k": d.k, "d_star": ext_real(d.d_star), "ok": d.ok,
            })).collect::<Vec<_>>(),
            "uniform": r.uniform.iter().map(|u| json!({
                "n": u.n, "R": ext_real(u.radius), "p_root": ext_real(u.p_root),
                "bound": ext_real(u.bound), "q_root": ext_real(u.q_root), "ok": u.ok,
            })).collect::<Vec<_>>(),
            "caveat": r.caveat,
        })
    };
    Ok(json!({
        "kind": "series-report-v1",
        "terms": n_terms,
        "partial_sums": sums,
        "region": region,
        "check": check,
    }))
}

/// Renders a JSON scalar for a CSV cell.
fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.to_string(),
            (_, Some(u)) => u.to_string(),
            _ => fmt_f64(n.as_f64().unwrap_or(f64::NAN)),
        },
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// `(report kind, array path, [(column, field)])`.
type TableSpec = (
    &'static str,
    &'static [&'static str],
    &'static [(&'static str, &'static str)],
);

/// Every tidy table `plotdata` can emit.
const TABLES: &[TableSpec] = &[
    (
        "seq-report-v1",
        &["tails"],
        &[("n", "n"), ("R", "R"), ("m", "m"), ("S_value", "S")],
    ),
    (
        "cap-family-report-v1",
        &["rows"],
        &[("R", "R"), ("cap", "cap"), ("log_ratio", "log_ratio")],
    ),
    ("cap-report-v1", &["leja_points"], &[("re", "re"), ("im", "im")]),
    (
        "thinness-report-v1",
        &["terms"],
        &[
            ("depth", "depth"),
            ("cap", "cap"),
            ("term", "term"),
            ("cumulative", "cumulative"),
        ],
    ),
    (
        "growth-report-v1",
        &["rows"],
        &[
            ("R", "R"),
            ("log_mean", "log_mean"),
            ("sup_norm", "sup_norm"),
            ("eta", "eta"),
        ],
    ),
    (
        "efun-report-v1",
        &["rows"],
        &[("R", "R"), ("eta", "eta"), ("log_abs", "log_abs"), ("arg", "arg")],
    ),
    (
        "laplace-report-v1",
        &["zeros"],
        &[("re", "re"), ("im", "im"), ("mult", "mult")],
    ),
    (
        "series-report-v1",
        &["check", "uniform"],
        &[
            ("n", "n"),
            ("R", "R"),
            ("p_root", "p_root"),
            ("bound", "bound"),
            ("q_root", "q_root"),
        ],
    ),
];

/// Flattens the evidence table of a report into CSV; absent evidence gives
/// a header-only table.
pub fn plot_table(report: &Value) -> std::result::Result<String, String> {
    let kind = report
        .get("kind")
        .and_then(Value::as_str)
        .ok_or("report has no `kind` field")?;
    let (_, path, cols) = TABLES
        .iter()
        .find(|(k, _, _)| *k == kind)
        .ok_or_else(|| format!("no table for report kind `{kind}`"))?;
    let header: Vec<&str> = cols.iter().map(|(c, _)| *c).collect();
    let mut node = Some(report);
    for key in *path {
        node = node.and_then(|v| v.get(*key));
    }
    let empty = Vec::new();
    let items = node.and_then(Value::as_array).unwrap_or(&empty);
    let rows: Vec<Vec<String>> = items
        .iter()
        .map(|item| {
            let obj = item.as_object().cloned().unwrap_or_else(Map::new);
            cols.iter()
                .map(|(_, field)| obj.get(*field).map(cell).unwrap_or_default())
                .collect()
        })
        .collect();
    Ok(csv_table(&header, &rows))
}

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure::Input(s)
    }
}

impl From<&str> for Failure {
    fn from(s: &str) -> Self {
        Failure::Input(s.to_string())
    }
}
