//! The `roughcc` command line.
//!
//! Exit codes: 0 success, 1 failed check, 2 usage or malformed input,
//! 3 file system error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::{hom_norm, GroupElem, HomNorms};
use crate::error::Error;
use crate::flows::{default_lattice, wong_zakai_table, FieldBasis};
use crate::io::{
    self, fmt_f64, parse_json, parse_schatten, read_json, read_pl_csv, read_text, table_csv, to_json, write_text,
    GroupElemDoc, IoError, RoughPathDoc,
};
use crate::paths::{connect, geodesic_endpoint, geodesic_path, pl_signature, polygonize, GeodesicParams};
use crate::rough::{check_raw, convergence_study, mesh_partition, project_roughpath, synth, RoughPath, SynthKind};
use crate::spectral::{cc_norm, schatten, triple_norm};

/// Default weak-geometricity tolerance for ingested rough paths.
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "roughcc", version, about = "Step-2 rough paths: signatures, CC geometry, approximation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Args)]
pub struct Opts {
    /// Dimension of generated data.
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Schatten exponent of the level-2 norm, a number ≥ 1 or `inf`.
    #[arg(long, global = true, value_parser = parse_p)]
    pub p: Option<f64>,
    /// Hölder exponent, overriding the input file.
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Exponent of the comparison metric `d_β`.
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Comma-separated, strictly decreasing meshes.
    #[arg(long, global = true, value_delimiter = ',')]
    pub meshes: Option<Vec<f64>>,
    /// Seed for randomized generators.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Polygon resolution `K` for spirals.
    #[arg(long = "polygon-k", global = true, default_value_t = 12)]
    pub polygon_k: usize,
    /// Output file (directory for `approx`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Fill the `seconds` column with wall-clock times; zero otherwise.
    #[arg(long, global = true)]
    pub timings: bool,
}

fn parse_p(s: &str) -> Result<f64, String> {
    let p = parse_schatten(s).map_err(|e| e.to_string())?;
    HomNorms::new(p).map(|n| n.p()).map_err(|e| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Signature of piecewise-linear paths given as `t,x1,..,xd` CSV; several
    /// files are concatenated.
    Sig {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Weak geometricity and Hölder quotients of a rough path JSON.
    Check {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Homogeneous norms and CC distance bounds of a group element JSON.
    Dist { input: PathBuf },
    /// Geodesic endpoint from `{"u0","Lambda"}`, or the connecting control of
    /// a group element `{"dim","a","A"}`.
    Geodesic {
        input: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Vertices of the sampled geodesic written to `--out`.
        #[arg(long, default_value_t = 256)]
        samples: usize,
    },
    /// Geodesic interpolation study over a list of meshes.
    Approx { input: PathBuf },
    /// Projection onto partition-adapted subspaces.
    Project {
        input: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = vec![1usize, 2, 4, 8])]
        ranks: Vec<usize>,
    },
    /// Wong-Zakai table for a flow configuration.
    Wz { config: PathBuf },
    /// Generate a synthetic rough path.
    Synth {
        /// JSON generator description; overrides `--kind`.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, value_enum)]
        kind: Option<SynthChoice>,
        /// Plane strengths for `pure-area`.
        #[arg(long, value_delimiter = ',', default_values_t = vec![1.0])]
        sigmas: Vec<f64>,
        /// Spectral decay for `random-wg`.
        #[arg(long, default_value_t = 2.0)]
        decay: f64,
        #[arg(long, default_value_t = 256)]
        steps: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthChoice {
    PureArea,
    RandomWg,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    CheckFailed(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Model(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::CheckFailed(_) => 1,
            CliError::Io(IoError::File { .. }) => 3,
            _ => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Flow configuration for `wz`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WzConfig {
    pub driver: DriverSpec,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub basis: FieldBasis,
    /// Initial points; defaults to the lattice `{-r, 0, r}^m`.
    #[serde(default)]
    pub y0: Option<Vec<Vec<f64>>>,
    #[serde(default = "default_radius")]
    pub lattice_radius: f64,
}

/// Either a rough path file (relative to the config) or a generator.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DriverSpec {
    File { file: PathBuf },
    Synth(SynthKind),
}

fn default_steps() -> usize {
    256
}

fn default_alpha() -> f64 {
    0.5
}

fn default_radius() -> f64 {
    0.5
}

fn dyadic(from: i32, to: i32) -> Vec<f64> {
    (from..=to).map(|k| 2f64.powi(-k)).collect()
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => write_text(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn norms(opts: &Opts, fallback: HomNorms) -> CliResult<HomNorms> {
    Ok(match opts.p {
        Some(p) => HomNorms::new(p)?,
        None => fallback,
    })
}

fn load_rough(path: &Path, opts: &Opts) -> CliResult<RoughPath> {
    let doc: RoughPathDoc = read_json(path)?;
    let mut doc = doc;
    if let Some(a) = opts.alpha {
        doc.alpha = a;
    }
    if let Some(p) = opts.p {
        doc.p = io::SchattenDoc::new(p);
    }
    Ok(doc.to_rough(DEFAULT_TOL)?)
}

fn meshes(opts: &Opts, default: Vec<f64>) -> CliResult<Vec<f64>> {
    let m = opts.meshes.clone().unwrap_or(default);
    if m.is_empty() || m.iter().any(|v| !(v.is_finite() && *v > 0.0)) || m.windows(2).any(|w| w[1] >= w[0]) {
        return Err(CliError::Usage("--meshes must be positive and strictly decreasing".into()));
    }
    Ok(m)
}

fn cmd_sig(paths: &[PathBuf], opts: &Opts) -> CliResult<()> {
    let mut g: Option<GroupElem> = None;
    for p in paths {
        let s = pl_signature(&read_pl_csv(p)?);
        g = Some(match g {
            None => s,
            Some(acc) => acc.mul(&s)?,
        });
    }
    let g = g.expect("clap requires at least one path");
    emit(opts.out.as_deref(), &to_json(&GroupElemDoc::from(&g)))
}

#[derive(Serialize)]
struct CheckOut {
    defect: f64,
    tol: f64,
    holder: f64,
    holder_level1: f64,
    holder_level2: f64,
}

fn cmd_check(input: &Path, tol: f64, opts: &Opts) -> CliResult<()> {
    let doc: RoughPathDoc = read_json(input)?;
    let raw = doc.raw()?;
    let alpha = opts.alpha.unwrap_or(doc.alpha);
    let norms = norms(opts, doc.norms()?)?;
    let r = check_raw(&raw, alpha, &norms);
    let out = CheckOut {
        defect: r.defect,
        tol,
        holder: r.holder,
        holder_level1: r.holder_level1,
        holder_level2: r.holder_level2,
    };
    emit(opts.out.as_deref(), &to_json(&out))?;
    if r.defect < tol {
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!(
            "not weakly geometric: defect {} ≥ tolerance {}",
            fmt_f64(r.defect),
            fmt_f64(tol)
        )))
    }
}

#[derive(Serialize)]
struct DistOut {
    p: io::SchattenDoc,
    hom_norm: f64,
    triple_norm: f64,
    lower: f64,
    upper: f64,
    connect_length: f64,
    cc_norm: f64,
    schatten_1: f64,
    schatten_2: f64,
    schatten_inf: f64,
}

fn cmd_dist(input: &Path, opts: &Opts) -> CliResult<()> {
    let doc: GroupElemDoc = read_json(input)?;
    let g = doc.to_group()?;
    let norms = norms(opts, HomNorms::default())?;
    let tn = triple_norm(&g);
    let a = g.area();
    let out = DistOut {
        p: io::SchattenDoc::new(norms.p()),
        hom_norm: hom_norm(&g, &norms),
        triple_norm: tn,
        lower: tn,
        upper: 3.0 * tn,
        connect_length: connect(&g)?.l1_length(),
        cc_norm: cc_norm(a)?,
        schatten_1: schatten(a, 1.0)?,
        schatten_2: schatten(a, 2.0)?,
        schatten_inf: schatten(a, f64::INFINITY)?,
    };
    emit(opts.out.as_deref(), &to_json(&out))
}

fn cmd_geodesic(input: &Path, t: f64, samples: usize, opts: &Opts) -> CliResult<()> {
    let text = read_text(input)?;
    let value: Value = parse_json(&text, input)?;
    if value.get("u0").is_some() {
        let gp: GeodesicParams = parse_json(&text, input)?;
        let end = geodesic_endpoint(&gp, t)?;
        if let Some(out) = &opts.out {
            write_text(out, &io::pl_csv(&geodesic_path(&gp, samples)?))?;
        }
        print!("{}", to_json(&GroupElemDoc::from(&end)));
    } else {
        let doc: GroupElemDoc = parse_json(&text, input)?;
        let control = connect(&doc.to_group()?)?;
        if let Some(out) = &opts.out {
            write_text(out, &io::pl_csv(&polygonize(&control, opts.polygon_k)?))?;
        }
        print!("{}", to_json(&control));
    }
    Ok(())
}

fn seconds(opts: &Opts, s: f64) -> String {
    fmt_f64(if opts.timings { s } else { 0.0 })
}

fn cmd_approx(input: &Path, opts: &Opts) -> CliResult<()> {
    let x = load_rough(input, opts)?;
    let beta = opts
        .beta
        .ok_or_else(|| CliError::Usage("approx needs --beta".into()))?;
    if !(beta > 1.0 / 3.0 && beta < x.alpha()) {
        return Err(CliError::Usage(format!(
            "--beta {beta} must lie in (1/3, α = {})",
            x.alpha()
        )));
    }
    let meshes = meshes(opts, dyadic(2, 9))?;
    let report = convergence_study(&x, beta, &meshes, opts.polygon_k)?;
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.mesh),
                r.param.to_string(),
                fmt_f64(r.d_beta),
                fmt_f64(r.sup_d),
                seconds(opts, r.seconds),
            ]
        })
        .collect();
    let csv = table_csv(&["mesh", "param", "d_beta", "sup_d", "seconds"], &rows);
    match &opts.out {
        None => print!("{csv}"),
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|source| IoError::File {
                path: dir.clone(),
                source,
            })?;
            write_text(&dir.join("report.csv"), &csv)?;
            for (i, &m) in meshes.iter().enumerate() {
                let pi = mesh_partition(&x, m)?;
                let path = crate::rough::geodesic_interpolation(&x, &pi, opts.polygon_k)?;
                write_text(&dir.join(format!("approx_{i}.csv")), &io::pl_csv(&path))?;
            }
        }
    }
    Ok(())
}

fn cmd_project(input: &Path, ranks: &[usize], opts: &Opts) -> CliResult<()> {
    let x = load_rough(input, opts)?;
    let meshes = meshes(opts, dyadic(1, 4))?;
    let mut rows = Vec::new();
    for &m in &meshes {
        let pi = mesh_partition(&x, m)?;
        for &n in ranks {
            let r = project_roughpath(&x, n, &pi)?;
            rows.push(vec![
                fmt_f64(m),
                n.to_string(),
                r.subspace.rank().to_string(),
                fmt_f64(r.tail),
                fmt_f64(r.oscillation),
                fmt_f64(r.bound),
                fmt_f64(r.realized),
            ]);
        }
    }
    let csv = table_csv(
        &["mesh", "n", "rank", "tail", "oscillation", "bound", "realized"],
        &rows,
    );
    emit(opts.out.as_deref(), &csv)
}

fn cmd_wz(config: &Path, opts: &Opts) -> CliResult<()> {
    let cfg: WzConfig = read_json(config)?;
    let x = match &cfg.driver {
        DriverSpec::Synth(kind) => synth(kind, cfg.steps, opts.alpha.unwrap_or(cfg.alpha), norms(opts, HomNorms::default())?)?,
        DriverSpec::File { file } => {
            let path = config.parent().unwrap_or(Path::new(".")).join(file);
            load_rough(&path, opts)?
        }
    };
    cfg.basis.validate()?;
    let m = cfg.basis.state_dim();
    let y0s = match &cfg.y0 {
        Some(v) => v.iter().map(|y| DVector::from_column_slice(y)).collect(),
        None => default_lattice(m, cfg.lattice_radius),
    };
    let meshes = meshes(opts, dyadic(2, 6))?;
    let report = wong_zakai_table(&x, &cfg.basis, &y0s, &meshes, opts.polygon_k)?;
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| vec![fmt_f64(r.mesh), r.y0_index.to_string(), fmt_f64(r.sup_err)])
        .collect();
    emit(opts.out.as_deref(), &table_csv(&["mesh", "y0_index", "sup_err"], &rows))
}

fn cmd_synth(
    spec: Option<&Path>,
    kind: Option<SynthChoice>,
    sigmas: &[f64],
    decay: f64,
    steps: usize,
    opts: &Opts,
) -> CliResult<()> {
    let kind = match (spec, kind) {
        (Some(path), _) => read_json::<SynthKind>(path)?,
        (None, Some(SynthChoice::PureArea)) => SynthKind::PureArea {
            sigmas: sigmas.to_vec(),
            dim: opts.dim,
        },
        (None, Some(SynthChoice::RandomWg)) => SynthKind::RandomWg {
            dim: opts
                .dim
                .ok_or_else(|| CliError::Usage("random-wg needs --dim".into()))?,
            seed: opts
                .seed
                .ok_or_else(|| CliError::Usage("random-wg needs --seed".into()))?,
            decay,
            modes: 4,
            area_scale: 1.0,
        },
        (None, None) => return Err(CliError::Usage("synth needs --spec or --kind".into())),
    };
    let default_alpha = match kind {
        SynthKind::RandomWg { .. } => 0.45,
        _ => 0.5,
    };
    let x = synth(
        &kind,
        steps,
        opts.alpha.unwrap_or(default_alpha),
        norms(opts, HomNorms::default())?,
    )?;
    emit(opts.out.as_deref(), &to_json(&RoughPathDoc::from(&x)))
}

pub fn run(cli: &Cli) -> CliResult<()> {
    let opts = &cli.opts;
    match &cli.command {
        Command::Sig { paths } => cmd_sig(paths, opts),
        Command::Check { input, tol } => cmd_check(input, *tol, opts),
        Command::Dist { input } => cmd_dist(input, opts),
        Command::Geodesic { input, t, samples } => cmd_geodesic(input, *t, *samples, opts),
        Command::Approx { input } => cmd_approx(input, opts),
        Command::Project { input, ranks } => cmd_project(input, ranks, opts),
        Command::Wz { config } => cmd_wz(config, opts),
        Command::Synth {
            spec,
            kind,
            sigmas,
            decay,
            steps,
        } => cmd_synth(spec.as_deref(), *kind, sigmas, *decay, *steps, opts),
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("ROUGHCC_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("ROUGHCC_THREADS={v:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

/// Parses arguments, runs, and maps errors to exit codes.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match configure_threads().and_then(|_| run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("roughcc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
