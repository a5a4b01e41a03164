//! Command-line surface for the kravchuk crate: discrete transforms,
//! exact two-mode interference statistics, seeded Monte-Carlo experiment
//! runs, the KT-vs-FFT imaging benchmark, and reflectivity sweeps.
//!
//! Every invocation that writes files also writes `<first output>.manifest.json`
//! recording the command, the fully resolved configuration, the seed, the
//! tool version, all output paths, and the wall-clock time — enough to
//! reproduce the run byte-for-byte.
//!
//! Exit codes: 0 success, 2 usage, 3 domain/config errors, 4 I/O and
//! malformed-file errors.

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use kravchuk::experiment::{estimate_statistics, run_experiment, ExperimentConfig};
use kravchuk::homsim::{
    dicke_qfunction, photon_statistics, BeamSplitterSpec, SphereGrid, TwoModeFockState,
};
use kravchuk::imaging::{
    add_kspace_noise, forward_to_kspace, phantom, quality, read_kspace_raw, read_pgm,
    reconstruct, write_kspace_raw, write_pgm, ImageGrid, Method, QualityReport,
};
use kravchuk::io::{
    histogram_sidecar_json, read_sequence, write_histogram_csv, write_qfunction_csv,
    write_statistics, write_transform_output,
};
use kravchuk::transforms::{dfrft_kernel, dft_kernel, kt_kernel};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

#[derive(Parser)]
#[command(
    name = "kravchuk",
    version,
    about = "Fractional Kravchuk transform toolkit: transforms, interference, \
             Monte-Carlo experiments, and imaging benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply a discrete transform to a sequence file
    Transform(TransformArgs),
    /// Exact photon statistics of two-mode interference on a beam splitter
    Hom(HomArgs),
    /// Seeded Monte-Carlo run of the four-detector counting experiment
    Experiment(ExperimentArgs),
    /// Round-trip an image through k-space with optional noise injection
    Image(ImageArgs),
    /// Emit one statistics file per point of a reflectivity grid
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Kt,
    Dft,
    Dfrft,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConventionArg {
    /// Splitter phase fixed so the balanced device realizes the KT kernel
    Kt,
    /// The +pi/2 phase convention
    Main,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Kt,
    Fft,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DepthArg {
    #[value(name = "8")]
    Eight,
    #[value(name = "16")]
    Sixteen,
}

#[derive(Args)]
struct TransformArgs {
    /// Input sequence CSV (`index,re,im`); the transform order is the row
    /// count minus one
    #[arg(long)]
    input: PathBuf,
    /// Transform family
    #[arg(long, value_enum, default_value_t = KindArg::Kt)]
    kind: KindArg,
    /// Fractional order (KT: [0,4]; DFRFT: (0,1]; ignored by the DFT)
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Output CSV (`k,re,im,abs2`)
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
#[command(group(ArgGroup::new("input_state").required(true).args(["order", "superposition"])))]
struct HomArgs {
    /// Total photon number S of the Fock input |l, S-l>
    #[arg(long, requires = "photons")]
    order: Option<usize>,
    /// Photon count l in the first input mode
    #[arg(long, requires = "order")]
    photons: Option<usize>,
    /// Sequence CSV of amplitudes over l = 0..=S, replacing --order/--photons
    #[arg(long)]
    superposition: Option<PathBuf>,
    /// Beam-splitter reflectivity in [0,1]
    #[arg(long)]
    reflectivity: f64,
    /// Beam-splitter phase convention
    #[arg(long, value_enum, default_value_t = ConventionArg::Kt)]
    convention: ConventionArg,
    /// Output statistics CSV (`k,probability,error`)
    #[arg(long)]
    output: PathBuf,
    /// Also dump the input state's sphere Q-function to this CSV
    #[arg(long)]
    qfunction: Option<PathBuf>,
    /// Q-function grid as THETAxPHI midpoint counts
    #[arg(long, default_value = "64x128", value_name = "TxP")]
    q_grid: String,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment configuration JSON
    #[arg(long)]
    config: PathBuf,
    /// Override the config's shot count
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    shots: Option<u64>,
    /// Override the config's RNG seed
    #[arg(long)]
    seed: Option<u64>,
    /// Herald counts (n1, n4) selecting a sector for estimated statistics
    #[arg(long, num_args = 2, value_names = ["N1", "N4"], requires = "stats")]
    select: Option<Vec<usize>>,
    /// Output path for the post-selected statistics CSV (requires --select)
    #[arg(long, requires = "select")]
    stats: Option<PathBuf>,
    /// Output histogram CSV; a JSON sidecar is written to <output>.json
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true).args(["input", "phantom"])))]
struct ImageArgs {
    /// Input file: PGM (P5) real-space image, or raw k-space
    /// (JSON header + little-endian float32 re/im pairs)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Use the bundled N-by-N synthetic phantom instead of a file
    #[arg(long, value_name = "N")]
    phantom: Option<usize>,
    /// Transform method for the round trip
    #[arg(long, value_enum, default_value_t = MethodArg::Kt)]
    method: MethodArg,
    /// Fractional KT order (the FFT path ignores it)
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// k-space noise level as a fraction of the signal RMS
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Noise RNG seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run both methods on the same input and report both quality scores
    #[arg(long)]
    compare: bool,
    /// Reconstruction PGM; with --compare, `.kt`/`.fft` variants are written
    #[arg(long)]
    output: PathBuf,
    /// Report JSON path (default: <output>.report.json)
    #[arg(long)]
    report: Option<PathBuf>,
    /// PGM bit depth for reconstruction outputs
    #[arg(long, value_enum, default_value_t = DepthArg::Sixteen)]
    depth: DepthArg,
    /// Also dump the primary method's (noisy) k-space in raw format
    #[arg(long)]
    save_kspace: Option<PathBuf>,
}

#[derive(Args)]
#[command(group(ArgGroup::new("gridspec").required(true).args(["grid", "points"])))]
struct SweepArgs {
    /// Total photon number S of the Fock input |l, S-l>
    #[arg(long)]
    order: usize,
    /// Photon count l in the first input mode
    #[arg(long)]
    photons: usize,
    /// Comma-separated reflectivity values
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    /// Uniform grid of this many reflectivities spanning [0,1]
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    points: Option<u64>,
    /// Beam-splitter phase convention
    #[arg(long, value_enum, default_value_t = ConventionArg::Kt)]
    convention: ConventionArg,
    /// Directory receiving one statistics CSV per grid point
    #[arg(long)]
    output_dir: PathBuf,
    /// Output filename prefix
    #[arg(long, default_value = "stats")]
    prefix: String,
}

/// A failed run: message for stderr plus the process exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn io(message: impl Into<String>) -> Self {
        Failure { code: 4, message: message.into() }
    }
}

impl From<kravchuk::Error> for Failure {
    fn from(e: kravchuk::Error) -> Self {
        let code = match &e {
            kravchuk::Error::Io(_)
            | kravchuk::Error::Parse { .. }
            | kravchuk::Error::Format { .. } => 4,
            _ => 3,
        };
        Failure { code, message: e.to_string() }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display())))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes)
        .map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))
}

/// What a command produced, for the manifest.
struct RunOutputs {
    config: serde_json::Value,
    seed: Option<u64>,
    outputs: Vec<PathBuf>,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    command: &'a str,
    argv: Vec<String>,
    config: &'a serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    tool_version: &'a str,
    outputs: Vec<String>,
    started_unix: f64,
    wall_clock_seconds: f64,
}

fn write_manifest(
    command: &str,
    run: &RunOutputs,
    started_unix: f64,
    wall_clock_seconds: f64,
) -> Result<(), Failure> {
    let first = run.outputs.first().expect("every command writes at least one file");
    let path = PathBuf::from(format!("{}.manifest.json", first.display()));
    let manifest = RunManifest {
        command,
        argv: std::env::args().skip(1).collect(),
        config: &run.config,
        seed: run.seed,
        tool_version: env!("CARGO_PKG_VERSION"),
        outputs: run.outputs.iter().map(|p| p.display().to_string()).collect(),
        started_unix,
        wall_clock_seconds,
    };
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serialization");
    text.push('\n');
    write_file(&path, text.as_bytes())
}

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    if let Err(failure) = run(&cli) {
        eprintln!("error: {}", failure.message);
        std::process::exit(failure.code);
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let started_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0);
    let clock = Instant::now();
    let (name, outputs) = match &cli.command {
        Command::Transform(args) => ("transform", cmd_transform(args)?),
        Command::Hom(args) => ("hom", cmd_hom(args)?),
        Command::Experiment(args) => ("experiment", cmd_experiment(args)?),
        Command::Image(args) => ("image", cmd_image(args)?),
        Command::Sweep(args) => ("sweep", cmd_sweep(args)?),
    };
    write_manifest(name, &outputs, started_unix, clock.elapsed().as_secs_f64())
}

fn cmd_transform(args: &TransformArgs) -> Result<RunOutputs, Failure> {
    let seq = read_sequence(&read_text(&args.input)?)?;
    let order = seq.len() - 1;
    let kernel = match args.kind {
        KindArg::Kt => kt_kernel(order, args.alpha)?,
        KindArg::Dft => dft_kernel(order),
        KindArg::Dfrft => dfrft_kernel(order, args.alpha)?,
    };
    let transformed = kernel.apply(&seq)?;
    write_file(&args.output, write_transform_output(&transformed).as_bytes())?;
    Ok(RunOutputs {
        config: serde_json::json!({
            "input": args.input.display().to_string(),
            "kind": kind_name(args.kind),
            "alpha": args.alpha,
            "order": order,
        }),
        seed: None,
        outputs: vec![args.output.clone()],
    })
}

fn kind_name(kind: KindArg) -> &'static str {
    match kind {
        KindArg::Kt => "kt",
        KindArg::Dft => "dft",
        KindArg::Dfrft => "dfrft",
    }
}

fn splitter(convention: ConventionArg, r: f64) -> kravchuk::Result<BeamSplitterSpec> {
    match convention {
        ConventionArg::Kt => BeamSplitterSpec::kt(r),
        ConventionArg::Main => BeamSplitterSpec::main_text(r),
    }
}

fn cmd_hom(args: &HomArgs) -> Result<RunOutputs, Failure> {
    let state = if let Some(path) = &args.superposition {
        TwoModeFockState::new(read_sequence(&read_text(path)?)?)?
    } else {
        // clap guarantees both are present when --superposition is absent
        TwoModeFockState::fock(args.order.unwrap(), args.photons.unwrap())?
    };
    let bs = splitter(args.convention, args.reflectivity)?;
    let stats = photon_statistics(&state, &bs)?;

    let mut outputs = vec![args.output.clone()];
    write_file(&args.output, write_statistics(&stats).as_bytes())?;
    if let Some(qpath) = &args.qfunction {
        let (n_theta, n_phi) = parse_grid_spec(&args.q_grid)?;
        let grid = SphereGrid::new(n_theta, n_phi)?;
        let values = dicke_qfunction(&state, &grid)?;
        write_file(qpath, write_qfunction_csv(&grid, &values)?.as_bytes())?;
        outputs.push(qpath.clone());
    }
    Ok(RunOutputs {
        config: serde_json::json!({
            "order": state.s(),
            "photons": args.photons,
            "superposition": args.superposition.as_ref().map(|p| p.display().to_string()),
            "reflectivity": args.reflectivity,
            "convention": convention_name(args.convention),
            "phi": bs.phi(),
            "q_grid": args.qfunction.as_ref().map(|_| args.q_grid.clone()),
        }),
        seed: None,
        outputs,
    })
}

fn convention_name(convention: ConventionArg) -> &'static str {
    match convention {
        ConventionArg::Kt => "kt",
        ConventionArg::Main => "main",
    }
}

fn parse_grid_spec(spec: &str) -> Result<(usize, usize), Failure> {
    let parts: Vec<&str> = spec.split('x').collect();
    let bad = || Failure::usage(format!("--q-grid wants THETAxPHI, e.g. 64x128, got {spec:?}"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let n_theta: usize = parts[0].parse().map_err(|_| bad())?;
    let n_phi: usize = parts[1].parse().map_err(|_| bad())?;
    if n_theta == 0 || n_phi == 0 {
        return Err(bad());
    }
    Ok((n_theta, n_phi))
}

fn cmd_experiment(args: &ExperimentArgs) -> Result<RunOutputs, Failure> {
    let text = read_text(&args.config)?;
    let mut config: ExperimentConfig = serde_json::from_str(&text)
        .map_err(|e| Failure::io(format!("bad config {}: {e}", args.config.display())))?;
    if let Some(shots) = args.shots {
        config.shots = shots;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let histogram = run_experiment(&config)?;

    write_file(&args.output, write_histogram_csv(&histogram).as_bytes())?;
    let sidecar = PathBuf::from(format!("{}.json", args.output.display()));
    write_file(&sidecar, histogram_sidecar_json(&histogram).as_bytes())?;
    let mut outputs = vec![args.output.clone(), sidecar];

    if let Some(select) = &args.select {
        let (n1, n4) = (select[0], select[1]);
        let stats = estimate_statistics(&histogram, n1, n4)?;
        let path = args.stats.as_ref().expect("clap ties --select to --stats");
        write_file(path, write_statistics(&stats).as_bytes())?;
        outputs.push(path.clone());
    }
    Ok(RunOutputs {
        config: serde_json::to_value(&config).expect("config serialization"),
        seed: Some(config.seed),
        outputs,
    })
}

/// `base.ext` -> `base.tag.ext` (or `base.tag` when there is no extension).
fn variant_path(base: &Path, tag: &str) -> PathBuf {
    match base.extension().and_then(|e| e.to_str()) {
        Some(ext) => base.with_extension(format!("{tag}.{ext}")),
        None => base.with_extension(tag),
    }
}

#[derive(Serialize)]
struct MethodReport {
    output: String,
    imaginary_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    quality: Option<QualityReport>,
}

#[derive(Serialize)]
struct ImageReport {
    source: String,
    method: &'static str,
    alpha: f64,
    noise: f64,
    seed: u64,
    results: serde_json::Map<String, serde_json::Value>,
}

fn method_name(method: MethodArg) -> &'static str {
    match method {
        MethodArg::Kt => "kt",
        MethodArg::Fft => "fft",
    }
}

fn cmd_image(args: &ImageArgs) -> Result<RunOutputs, Failure> {
    let depth = match args.depth {
        DepthArg::Eight => 255u16,
        DepthArg::Sixteen => 65535,
    };
    let (source_name, source) = load_image_source(args)?;
    let primary = match args.method {
        MethodArg::Kt => Method::Kt,
        MethodArg::Fft => Method::Fft,
    };

    let mut outputs = Vec::new();
    let mut results = serde_json::Map::new();
    let mut primary_kspace: Option<ImageGrid> = None;

    match &source {
        ImageSource::Real(original) => {
            let methods: Vec<(Method, &str)> = if args.compare {
                vec![(Method::Kt, "kt"), (Method::Fft, "fft")]
            } else {
                vec![(primary, method_name(args.method))]
            };
            for (method, tag) in methods {
                let k = forward_to_kspace(original, method, args.alpha)?;
                let noisy = add_kspace_noise(&k, args.noise, args.seed)?;
                let rec = reconstruct(&noisy, method, args.alpha)?;
                let score = quality(original, &rec.image)?;
                let out_path = if args.compare {
                    variant_path(&args.output, tag)
                } else {
                    args.output.clone()
                };
                write_file(&out_path, &write_pgm(&rec.image, depth)?)?;
                if method == primary {
                    primary_kspace = Some(noisy);
                }
                results.insert(
                    tag.to_string(),
                    serde_json::to_value(MethodReport {
                        output: out_path.display().to_string(),
                        imaginary_residual: rec.imaginary_residual,
                        quality: Some(score),
                    })
                    .expect("report serialization"),
                );
                outputs.push(out_path);
            }
        }
        ImageSource::KSpace(k) => {
            if args.compare {
                return Err(kravchuk::Error::Domain(
                    "--compare needs a real-space input to score against".into(),
                )
                .into());
            }
            let noisy = add_kspace_noise(k, args.noise, args.seed)?;
            let rec = reconstruct(&noisy, primary, args.alpha)?;
            write_file(&args.output, &write_pgm(&rec.image, depth)?)?;
            results.insert(
                method_name(args.method).to_string(),
                serde_json::to_value(MethodReport {
                    output: args.output.display().to_string(),
                    imaginary_residual: rec.imaginary_residual,
                    quality: None,
                })
                .expect("report serialization"),
            );
            primary_kspace = Some(noisy);
            outputs.push(args.output.clone());
        }
    }

    let report = ImageReport {
        source: source_name.clone(),
        method: method_name(args.method),
        alpha: args.alpha,
        noise: args.noise,
        seed: args.seed,
        results,
    };
    let report_path = args
        .report
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.report.json", args.output.display())));
    let mut text = serde_json::to_string_pretty(&report).expect("report serialization");
    text.push('\n');
    write_file(&report_path, text.as_bytes())?;
    outputs.push(report_path);

    if let Some(kpath) = &args.save_kspace {
        let k = primary_kspace.expect("primary method always runs");
        write_file(kpath, &write_kspace_raw(&k)?)?;
        outputs.push(kpath.clone());
    }

    Ok(RunOutputs {
        config: serde_json::json!({
            "source": source_name,
            "method": method_name(args.method),
            "alpha": args.alpha,
            "noise": args.noise,
            "seed": args.seed,
            "compare": args.compare,
            "depth": if depth == 255 { 8 } else { 16 },
        }),
        seed: Some(args.seed),
        outputs,
    })
}

enum ImageSource {
    Real(ImageGrid),
    KSpace(ImageGrid),
}

fn load_image_source(args: &ImageArgs) -> Result<(String, ImageSource), Failure> {
    if let Some(n) = args.phantom {
        return Ok((format!("phantom-{n}"), ImageSource::Real(phantom(n)?)));
    }
    let path = args.input.as_ref().expect("clap requires --input or --phantom");
    let bytes = read_bytes(path)?;
    let name = path.display().to_string();
    // PGM data starts with the P5 magic; everything else is treated as the
    // raw k-space container, whose parser names the offending byte offset
    if bytes.first() == Some(&b'P') {
        Ok((name, ImageSource::Real(read_pgm(&bytes)?)))
    } else {
        Ok((name, ImageSource::KSpace(read_kspace_raw(&bytes)?)))
    }
}

fn cmd_sweep(args: &SweepArgs) -> Result<RunOutputs, Failure> {
    let grid: Vec<f64> = if let Some(values) = &args.grid {
        values.clone()
    } else {
        let n = args.points.expect("clap requires --grid or --points") as usize;
        (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
    };
    if grid.is_empty() {
        return Err(Failure::usage("--grid needs at least one reflectivity"));
    }
    let state = TwoModeFockState::fock(args.order, args.photons)?;
    std::fs::create_dir_all(&args.output_dir).map_err(|e| {
        Failure::io(format!("cannot create {}: {e}", args.output_dir.display()))
    })?;

    let mut outputs = Vec::with_capacity(grid.len());
    for (i, &r) in grid.iter().enumerate() {
        let bs = splitter(args.convention, r)?;
        let stats = photon_statistics(&state, &bs)?;
        let path = args.output_dir.join(format!("{}_{i:03}_r{r:.4}.csv", args.prefix));
        write_file(&path, write_statistics(&stats).as_bytes())?;
        outputs.push(path);
    }
    Ok(RunOutputs {
        config: serde_json::json!({
            "order": args.order,
            "photons": args.photons,
            "grid": grid,
            "convention": convention_name(args.convention),
            "prefix": args.prefix,
        }),
        seed: None,
        outputs,
    })
}
