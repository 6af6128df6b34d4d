mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tactograph::datagen::gen_dataset_with;
use tactograph::ingest::{parse_spec, serialize_spec, spec_from_csv};
use tactograph::layout::style_phrase;
use tactograph::model::{ChartSpec, ChartType, Encoding, ValidationReport};
use tactograph::model_client::{extract_metadata, media_type_for, ExtractError, Mode};
use tactograph::pipeline::{compile, convert, convert_visual};
use tactograph::validate::validate_svg;

use config::CliConfig;

#[derive(Parser)]
#[command(name = "tactograph", version, about = "Tactile chart compiler and validator")]
struct Cli {
    /// JSON config file with a `config` root.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a spec document or CSV table into tactile SVG.
    Convert(ConvertArgs),
    /// Check an SVG against the tactile guideline rules.
    Validate(ValidateArgs),
    /// Generate a seeded synthetic dataset.
    GenDataset(GenArgs),
    /// Extract a spec from a chart image through the model endpoint.
    Extract(ExtractArgs),
    /// Summarise how a spec would be compiled.
    Inspect(InspectArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Spec document (.json) or data table (.csv).
    input: PathBuf,
    /// Chart type for CSV input.
    #[arg(long = "type", value_parser = parse_tag::<ChartType>, default_value = "line")]
    chart_type: ChartType,
    #[arg(long, value_parser = parse_tag::<Encoding>, default_value = "float")]
    x_encoding: Encoding,
    #[arg(long, value_parser = parse_tag::<Encoding>, default_value = "float")]
    y_encoding: Encoding,
    /// Chart title for CSV input; defaults to the file stem.
    #[arg(long)]
    title: Option<String>,
    /// Chaikin smoothing iterations for line charts (0 disables).
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=3))]
    smooth: Option<u8>,
}

#[derive(Args)]
struct ConvertArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Output path; defaults to the input path with an .svg extension.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write the conventional visual rendering next to the output.
    #[arg(long)]
    visual: bool,
    /// Validate the output and exit 1 on error findings.
    #[arg(long)]
    check: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct ValidateArgs {
    svg: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct GenArgs {
    /// Samples per category.
    #[arg(short = 'n', value_parser = clap::value_parser!(u64).range(1..))]
    n: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated chart types.
    #[arg(long, value_delimiter = ',', value_parser = parse_tag::<ChartType>)]
    categories: Option<Vec<ChartType>>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct ExtractArgs {
    image: PathBuf,
    #[arg(long)]
    endpoint: Option<String>,
    /// Replay recorded responses from this directory instead of calling the endpoint.
    #[arg(long)]
    fixtures: Option<PathBuf>,
    /// Request timeout in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    /// Spec output path; defaults to `<image stem>.spec.json` next to the image.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also compile the extracted spec to tactile SVG.
    #[arg(long)]
    convert: bool,
}

#[derive(Args)]
struct InspectArgs {
    #[command(flatten)]
    input: InputArgs,
}

fn parse_tag<T: std::str::FromStr>(s: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    s.parse::<T>().map_err(|e| e.to_string())
}

/// A fatal error, printed as one line.
struct Fatal {
    kind: &'static str,
    message: String,
}

impl Fatal {
    fn new(kind: &'static str, message: impl std::fmt::Display) -> Self {
        Self {
            kind,
            message: message.to_string(),
        }
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Fatal + '_ {
    move |e| Fatal::new("io", format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<Vec<u8>, Fatal> {
    fs::read(path).map_err(io_err(path))
}

fn write(path: &Path, contents: &str) -> Result<(), Fatal> {
    fs::write(path, contents).map_err(io_err(path))
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn load_spec(args: &InputArgs) -> Result<ChartSpec, Fatal> {
    let bytes = read(&args.input)?;
    if is_csv(&args.input) {
        let title = args.title.clone().unwrap_or_else(|| {
            args.input
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
        });
        spec_from_csv(&bytes, args.chart_type, args.x_encoding, args.y_encoding, &title)
            .map_err(|e| Fatal::new("csv", e))
    } else {
        parse_spec(&bytes).map_err(|e| Fatal::new("spec", e))
    }
}

fn apply_input_flags(cfg: &mut CliConfig, args: &InputArgs) {
    if let Some(n) = args.smooth {
        cfg.pipeline.simplify.smoothing = config::smoothing(n);
    }
}

fn print_report(report: &ValidationReport, format: Format) {
    match format {
        Format::Json => {
            println!("{}", serde_json::to_string_pretty(report).expect("report serializes"));
        }
        Format::Text => {
            for f in &report.findings {
                println!("{f}");
            }
        }
    }
}

fn cmd_convert(mut cfg: CliConfig, args: ConvertArgs) -> Result<ExitCode, Fatal> {
    apply_input_flags(&mut cfg, &args.input);
    cfg.check().map_err(|e| Fatal::new("config", e))?;
    let spec = load_spec(&args.input)?;
    let svg = convert(&spec, &cfg.pipeline).map_err(|e| Fatal::new("pipeline", e))?;
    let out = args.output.unwrap_or_else(|| args.input.input.with_extension("svg"));
    write(&out, &svg)?;
    println!("{}", out.display());
    if args.visual {
        let visual = convert_visual(&spec, &cfg.pipeline).map_err(|e| Fatal::new("pipeline", e))?;
        let path = out.with_extension("visual.svg");
        write(&path, &visual)?;
        println!("{}", path.display());
    }
    if args.check {
        let report = validate_svg(&svg, &cfg.rules);
        for f in &report.findings {
            eprintln!("{f}");
        }
        if report.has_errors() {
            return Ok(ExitCode::from(1));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(cfg: CliConfig, args: ValidateArgs) -> Result<ExitCode, Fatal> {
    let bytes = read(&args.svg)?;
    let text = String::from_utf8(bytes).map_err(|_| Fatal::new("xml", "document is not UTF-8"))?;
    let report = validate_svg(&text, &cfg.rules);
    if report.is_fatal() {
        let f = &report.findings[0];
        return Err(Fatal::new("xml", &f.message));
    }
    print_report(&report, args.format);
    Ok(if report.has_errors() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_gen_dataset(mut cfg: CliConfig, args: GenArgs) -> Result<ExitCode, Fatal> {
    if let Some(n) = args.n {
        cfg.gen.n_per_category = n as usize;
    }
    if let Some(s) = args.seed {
        cfg.gen.seed = s;
    }
    if let Some(c) = args.categories {
        cfg.gen.categories = c;
    }
    cfg.check().map_err(|e| Fatal::new("config", e))?;
    let started = Instant::now();
    let manifest =
        gen_dataset_with(&cfg.gen, &cfg.pipeline, &cfg.rules, &args.output).map_err(|e| Fatal::new("datagen", e))?;
    log::info!(
        "{} samples in {:.1} s",
        manifest.entries.len(),
        started.elapsed().as_secs_f64()
    );
    println!("{}", args.output.join("manifest.json").display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_extract(mut cfg: CliConfig, args: ExtractArgs) -> Result<ExitCode, Fatal> {
    if let Some(url) = args.endpoint {
        cfg.endpoint.base_url = url;
        cfg.endpoint.mode = Mode::Live;
    }
    if let Some(dir) = args.fixtures {
        cfg.endpoint.mode = Mode::Fixture(dir);
    }
    if let Some(t) = args.timeout {
        cfg.endpoint.timeout_s = t;
    }
    cfg.check().map_err(|e| Fatal::new("config", e))?;
    let image = read(&args.image)?;
    let result = extract_metadata(&image, media_type_for(&args.image), &cfg.endpoint).map_err(|e| {
        if let Some(raw) = e.raw_response() {
            log::debug!("raw response: {raw}");
        }
        let kind = match e {
            ExtractError::Transport(_) => "transport",
            ExtractError::Timeout(_) => "timeout",
            ExtractError::Status { .. } => "status",
            ExtractError::Parse { .. } => "parse",
            ExtractError::Config(_) | ExtractError::EmptyImage => "config",
            ExtractError::FixtureMissing { .. } => "fixture",
            ExtractError::Io { .. } => "io",
        };
        Fatal::new(kind, e)
    })?;
    let stem = args.image.with_extension("");
    let spec_path = args
        .output
        .unwrap_or_else(|| PathBuf::from(format!("{}.spec.json", stem.display())));
    write(&spec_path, &serialize_spec(&result.spec))?;
    println!("{}", spec_path.display());
    if args.convert {
        let svg = convert(&result.spec, &cfg.pipeline).map_err(|e| Fatal::new("pipeline", e))?;
        let svg_path = PathBuf::from(format!("{}.svg", stem.display()));
        write(&svg_path, &svg)?;
        println!("{}", svg_path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_inspect(mut cfg: CliConfig, args: InspectArgs) -> Result<ExitCode, Fatal> {
    apply_input_flags(&mut cfg, &args.input);
    cfg.check().map_err(|e| Fatal::new("config", e))?;
    let spec = load_spec(&args.input)?;
    let c = compile(&spec, &cfg.pipeline).map_err(|e| Fatal::new("pipeline", e))?;
    let mut out = String::new();
    let _ = writeln!(out, "type: {}", spec.chart_type());
    let _ = writeln!(out, "title: {}", spec.title());
    for (name, axis, ticks) in [("x", spec.x_axis(), &c.ticks.x), ("y", spec.y_axis(), &c.ticks.y)] {
        let labels: Vec<&str> = ticks.iter().map(|t| t.label_text.as_str()).collect();
        let _ = writeln!(
            out,
            "{name} axis: \"{}\" ({}), ticks: {}",
            axis.title(),
            axis.encoding().tag(),
            labels.join(", ")
        );
    }
    let intervals = c.ticks.x.len().saturating_sub(1);
    for (k, s) in spec.series().iter().enumerate() {
        let kept = c.selected[k].as_ref().map_or(s.points.len(), Vec::len);
        let _ = writeln!(
            out,
            "series {k} \"{}\": {} points, {kept} drawn; style: {}",
            s.name,
            s.points.len(),
            style_phrase(spec.chart_type(), &c.styles[k])
        );
    }
    if spec.chart_type() == ChartType::Scatter {
        let cap = cfg.pipeline.simplify.points_per_label_unit as usize * intervals;
        let _ = writeln!(out, "decimation: at most {cap} markers per series over {intervals} label intervals");
    }
    print!("{out}");
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let cfg = match CliConfig::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error[config]: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Convert(a) => cmd_convert(cfg, a),
        Command::Validate(a) => cmd_validate(cfg, a),
        Command::GenDataset(a) => cmd_gen_dataset(cfg, a),
        Command::Extract(a) => cmd_extract(cfg, a),
        Command::Inspect(a) => cmd_inspect(cfg, a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let msg = f.message.replace(['\n', '\r'], " ");
            eprintln!("error[{}]: {msg}", f.kind);
            ExitCode::from(2)
        }
    }
}
