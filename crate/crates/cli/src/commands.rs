use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use drift_gauntlet::adversary::{
    binarize_profile, difference_nullspace, solve_nullspace, uniform_grid, verify_function_limiting, verify_profile,
    AdversarialFunction, AdversarialProfile, LimitingReport, ProfileRecord, VerifyReport,
};
use drift_gauntlet::data::{read_stream, sample_stream, two_squares, write_stream};
use drift_gauntlet::detector::{run_detector, Bandwidth, DetectionReport, KernelSpec};
use drift_gauntlet::experiment::{render_table, run_experiment, ExperimentConfig, TableFormat};
use drift_gauntlet::rng::derive_seed;
use drift_gauntlet::windowing::{build_weight_matrix, union_scheme, ContinuousScheme, WindowScheme};
use serde::Serialize;

use crate::specs::{parse_scheme, Family};
use crate::{Cli, Command, DetectArgs, Format, KernelArgs, KernelKind, Preset, EXIT_ALERT, EXIT_BELOW_FLOOR};

/// Largest mean difference accepted as satisfying the window identities.
const LIMIT_TOLERANCE: f64 = 1e-8;

const PROFILE_KEY: u64 = 1;
const STREAM_KEY: u64 = 2;

pub struct RunContext {
    pub seed: u64,
    /// Whether the seed came from the command line or the environment.
    pub seed_explicit: bool,
    pub config: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

impl RunContext {
    fn emit(&self, text: &str) -> Result<()> {
        match &self.output {
            Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn emit_json<T: Serialize>(&self, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.emit(&text)
    }
}

pub fn run(cli: Cli, seed_explicit: bool) -> Result<u8> {
    let ctx = RunContext {
        seed: cli.seed,
        seed_explicit,
        config: cli.config,
        output: cli.output,
        format: cli.format,
    };
    match cli.command {
        Command::Generate {
            scheme,
            family,
            n,
            intensity,
            stride,
            binarize,
        } => generate(
            &ctx,
            scheme.as_deref(),
            family.as_deref(),
            n,
            intensity,
            stride,
            binarize,
        ),
        Command::Detect { args, scheme } => {
            let scheme = parse_scheme(&scheme, args.stride)?;
            detect(&ctx, &args, &scheme)
        }
        Command::Combine { args, schemes } => {
            let members: Vec<WindowScheme> = schemes
                .iter()
                .map(|s| parse_scheme(s, args.stride))
                .collect::<Result<_>>()?;
            detect(&ctx, &args, &union_scheme(&members)?)
        }
        Command::Verify {
            profile,
            function,
            scheme,
            stride,
            span,
            grid_points,
            panels,
        } => {
            let scheme = parse_scheme(&scheme, stride)?;
            match (profile, function) {
                (Some(path), _) => verify_profile_file(&ctx, &path, &scheme),
                (None, Some(path)) => verify_function_file(&ctx, &path, &scheme, span, grid_points, panels),
                (None, None) => bail!("verify needs --profile or --function"),
            }
        }
        Command::Nullspace { scheme, n, stride } => nullspace(&ctx, &parse_scheme(&scheme, stride)?, n),
        Command::Experiment {
            preset,
            runs,
            permutations,
            stride,
            intensity,
            theta,
            json,
        } => {
            let mut config = match &ctx.config {
                Some(path) => {
                    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                    ExperimentConfig::from_json(&text).with_context(|| format!("parsing {}", path.display()))?
                }
                None => match preset {
                    Preset::Desk => ExperimentConfig::desk(),
                    Preset::Paper => ExperimentConfig::paper(),
                },
            };
            if ctx.config.is_none() || ctx.seed_explicit {
                config.seed = ctx.seed;
            }
            config.runs = runs.unwrap_or(config.runs);
            config.permutations = permutations.unwrap_or(config.permutations);
            config.stride = stride.unwrap_or(config.stride);
            config.intensity = intensity.unwrap_or(config.intensity);
            config.theta = theta.unwrap_or(config.theta);
            experiment(&ctx, &config, json.as_deref())
        }
    }
}

fn generate(
    ctx: &RunContext,
    scheme: Option<&str>,
    family: Option<&str>,
    n: usize,
    intensity: f64,
    stride: Option<usize>,
    binarize: bool,
) -> Result<u8> {
    let Some(output) = &ctx.output else {
        bail!("generate writes a stream file and a profile sidecar; pass --output");
    };
    let scheme = scheme.map(|s| parse_scheme(s, stride)).transpose()?;
    let profile_seed = derive_seed(ctx.seed, &[PROFILE_KEY]);
    let (profile, certify_with) = match family {
        Some(family) => {
            let family = Family::parse(family)?;
            let profile = family.generate::<f64>(n, profile_seed)?;
            let scheme = scheme.unwrap_or_else(|| match stride {
                Some(s) => family.natural_scheme().with_stride(s),
                None => family.natural_scheme(),
            });
            (profile, scheme)
        }
        None => {
            let scheme = scheme.expect("clap requires --scheme without --family");
            let w = build_weight_matrix::<f64>(&scheme, n)?;
            let mut profile = solve_nullspace(&w)?;
            if binarize {
                profile = binarize_profile(&profile, &w)?;
            }
            (profile, scheme)
        }
    };
    let certificate = verify_profile(&profile, &certify_with, n)?;
    let stream = sample_stream(&profile, &two_squares(intensity)?, derive_seed(ctx.seed, &[STREAM_KEY]))?;
    write_stream(output, &stream).with_context(|| format!("writing {}", output.display()))?;

    let sidecar = sidecar_path(output);
    let mut record = serde_json::to_string_pretty(&profile.to_record(Some(certificate.clone())))?;
    record.push('\n');
    fs::write(&sidecar, record).with_context(|| format!("writing {}", sidecar.display()))?;
    eprintln!(
        "wrote {} samples to {} and the profile to {} ({}: {})",
        n,
        output.display(),
        sidecar.display(),
        certify_with.label(),
        verdict(&certificate)
    );
    Ok(0)
}

/// `<stream>.profile.json`, next to the stream file.
pub fn sidecar_path(stream: &Path) -> PathBuf {
    let mut name = stream.as_os_str().to_owned();
    name.push(".profile.json");
    PathBuf::from(name)
}

fn kernel_spec(args: &KernelArgs) -> KernelSpec {
    match (args.kernel, args.bandwidth) {
        (KernelKind::Linear, _) => KernelSpec::Linear,
        (KernelKind::Rbf, Some(h)) => KernelSpec::Rbf {
            bandwidth: Bandwidth::Fixed(h),
        },
        (KernelKind::Rbf, None) => KernelSpec::default(),
    }
}

fn detect(ctx: &RunContext, args: &DetectArgs, scheme: &WindowScheme) -> Result<u8> {
    let stream = read_stream(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let report: DetectionReport = run_detector::<f64, _>(
        &stream.points(),
        scheme,
        args.theta,
        &kernel_spec(&args.kernel),
        args.permutations,
        ctx.seed,
    )?;
    match ctx.format.unwrap_or(Format::Json) {
        Format::Csv => ctx.emit(&report.to_csv())?,
        Format::Json => ctx.emit(&(report.to_json() + "\n"))?,
        Format::Markdown => bail!("detection reports are written as json or csv"),
    }
    eprintln!(
        "{} pairs tested, min p = {}, {} alarms",
        report.results.len(),
        report.min_p,
        report.alarms.len()
    );
    Ok(if report.alerted() { EXIT_ALERT } else { 0 })
}

fn verdict(report: &VerifyReport) -> &'static str {
    if !report.is_nonconstant {
        "improper (no drift)"
    } else if report.is_adversarial {
        "adversarial"
    } else {
        "detected"
    }
}

#[derive(Serialize)]
struct ProfileVerdict<'a> {
    verdict: &'a str,
    report: VerifyReport,
}

fn load_profile(path: &Path) -> Result<AdversarialProfile<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let first = text.lines().next().unwrap_or_default();
    // Stream files start with a one-line header; profile files are a
    // single (pretty-printed) JSON object.
    if text.lines().count() > 1 && serde_json::from_str::<serde_json::Value>(first).is_ok() {
        let stream = read_stream(path)?;
        let v = stream.samples.iter().map(|s| s.v).collect();
        return Ok(AdversarialProfile::new(v, stream.meta.provenance)?);
    }
    let record: ProfileRecord =
        serde_json::from_str(&text).with_context(|| format!("parsing profile {}", path.display()))?;
    Ok(record.into_profile()?)
}

fn verify_profile_file(ctx: &RunContext, path: &Path, scheme: &WindowScheme) -> Result<u8> {
    let profile = load_profile(path)?;
    let report = verify_profile(&profile, scheme, profile.n())?;
    let verdict = verdict(&report);
    eprintln!("{}: max residual {:e}, {verdict}", report.scheme, report.max_residual);
    ctx.emit_json(&ProfileVerdict { verdict, report })?;
    Ok(0)
}

#[derive(Serialize)]
struct FunctionVerdict<'a> {
    verdict: &'a str,
    family: &'a str,
    span: (f64, f64),
    report: LimitingReport,
}

fn verify_function_file(
    ctx: &RunContext,
    path: &Path,
    scheme: &WindowScheme,
    span: Option<Vec<f64>>,
    grid_points: usize,
    panels: usize,
) -> Result<u8> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let f: AdversarialFunction =
        serde_json::from_str(&text).with_context(|| format!("parsing function {}", path.display()))?;
    let continuous = ContinuousScheme::try_from(scheme)?;
    let (t0, t1) = match span.as_deref() {
        Some([t0, t1]) => (*t0, *t1),
        _ => {
            let l = continuous.test_length();
            let t0 = continuous.first_time().unwrap_or(l);
            (t0, t0 + 9.0 * l)
        }
    };
    let report = verify_function_limiting(&f, &continuous, &uniform_grid(t0, t1, grid_points), panels)?;
    let verdict = match (report.max_violation <= LIMIT_TOLERANCE, report.range_ok) {
        (true, true) => "kernel member",
        (true, false) => "kernel member, range violated",
        (false, _) => "not a kernel member",
    };
    eprintln!("{}: max violation {:e}, {verdict}", f.name(), report.max_violation);
    ctx.emit_json(&FunctionVerdict {
        verdict,
        family: f.name(),
        span: (t0, t1),
        report,
    })?;
    Ok(0)
}

#[derive(Serialize)]
struct NullspaceOutput {
    scheme: String,
    n: usize,
    dimension: usize,
    has_nonconstant: bool,
    basis: Vec<Vec<f64>>,
}

fn nullspace(ctx: &RunContext, scheme: &WindowScheme, n: usize) -> Result<u8> {
    let w = build_weight_matrix::<f64>(scheme, n)?;
    let s = difference_nullspace(&w);
    match ctx.format.unwrap_or(Format::Json) {
        Format::Json => ctx.emit_json(&NullspaceOutput {
            scheme: scheme.label(),
            n,
            dimension: s.dimension,
            has_nonconstant: s.has_nonconstant,
            basis: s.basis,
        })?,
        Format::Csv => {
            let text: String = s
                .basis
                .iter()
                .map(|b| b.iter().map(f64::to_string).collect::<Vec<_>>().join(",") + "\n")
                .collect();
            ctx.emit(&text)?
        }
        Format::Markdown => bail!("null-space bases are written as json or csv"),
    }
    eprintln!("{} on n = {n}: dimension {}", scheme.label(), s.dimension);
    Ok(0)
}

fn experiment(ctx: &RunContext, config: &ExperimentConfig, json: Option<&Path>) -> Result<u8> {
    let table = run_experiment(config)?;
    let text = match ctx.format.unwrap_or(Format::Markdown) {
        Format::Markdown => render_table(&table, TableFormat::Markdown),
        Format::Csv => render_table(&table, TableFormat::Csv),
        Format::Json => table.to_json() + "\n",
    };
    ctx.emit(&text)?;
    if let Some(path) = json {
        fs::write(path, table.to_json() + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    let mismatches = table.mismatches();
    eprintln!(
        "{} of {} cells match the theoretical mask",
        table.matches(),
        table.cell_count()
    );
    for m in &mismatches {
        eprintln!(
            "  mismatch: {} / {}: expected {:?}, observed {:?}",
            m.dataset, m.scheme, m.mask, m.classification
        );
    }
    Ok(if table.meets_floor() { 0 } else { EXIT_BELOW_FLOOR })
}
