//! Command line front end for `rsgt`.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use rsgt::io::{format_curve_csv, read_image, write_image};
use rsgt::pipeline::apply_document;
use rsgt::{
    augment_image, deserialize, dice, invert, BinaryMask, InvertMode, Lut, Modality,
    NormalizationPolicy, PipelineConfig, SampledTransform, TransformDocument, TransformSpec,
    DEFAULT_LUT_SIZE,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

/// Caps the worker count of the global thread pool.
pub const THREADS_ENV: &str = "RSGT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "rsgt", version, about = "Random smooth gray value transformations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw a transform and emit its JSON document.
    Sample {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        seed: Option<u64>,
        /// Write here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Apply a transform document to an image.
    ///
    /// Documents written by `augment` carry a pipeline block; the raw input is
    /// then normalized (and inverted) exactly as recorded. Otherwise the input
    /// must already lie in [0, 1].
    Apply {
        #[arg(short, long)]
        transform: PathBuf,
        #[arg(long, default_value_t = DEFAULT_LUT_SIZE)]
        lut_size: usize,
        input: PathBuf,
        output: PathBuf,
    },
    /// Normalize, optionally invert, and randomly transform images in batch.
    Augment(AugmentArgs),
    /// Export the rescaled transform curve as `x,y` CSV.
    Curve {
        #[arg(short, long)]
        transform: PathBuf,
        #[arg(long, default_value_t = DEFAULT_LUT_SIZE)]
        size: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Replace each voxel v of a normalized image by 1 - v.
    Invert { input: PathBuf, output: PathBuf },
    /// Map raw intensities into [0, 1].
    Normalize {
        #[command(flatten)]
        window: WindowArgs,
        input: PathBuf,
        output: PathBuf,
    },
    /// Dice overlap of two masks (voxels > 0 are foreground).
    Dice { a: PathBuf, b: PathBuf },
}

#[derive(Debug, Args)]
struct FamilyArgs {
    /// Number of sines.
    #[arg(long = "n", default_value_t = rsgt::transform::DEFAULT_N_SINES)]
    n_sines: usize,
    #[arg(long, default_value_t = rsgt::transform::DEFAULT_F_MIN)]
    fmin: f64,
    #[arg(long, default_value_t = rsgt::transform::DEFAULT_F_MAX)]
    fmax: f64,
}

#[derive(Debug, Args)]
struct WindowArgs {
    #[arg(long, value_enum)]
    modality: ModalityArg,
    /// Window start: intensity for CT, percentile for MR.
    #[arg(long, allow_negative_numbers = true)]
    lo: Option<f64>,
    /// Window end: intensity for CT, percentile for MR.
    #[arg(long, allow_negative_numbers = true)]
    hi: Option<f64>,
}

impl WindowArgs {
    fn modality(&self) -> Modality {
        match self.modality {
            ModalityArg::Ct => Modality::Ct,
            ModalityArg::Mr => Modality::Mr,
        }
    }

    fn policy(&self) -> NormalizationPolicy {
        let mut p = self.modality().default_window();
        match &mut p {
            NormalizationPolicy::FixedWindow { lo, hi }
            | NormalizationPolicy::PercentileWindow { lo, hi } => {
                *lo = self.lo.unwrap_or(*lo);
                *hi = self.hi.unwrap_or(*hi);
            }
        }
        p
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModalityArg {
    Ct,
    Mr,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InvertArg {
    /// Bernoulli with --invert-probability (default 0.5).
    Random,
    /// Invert odd draw indices.
    EveryOther,
}

#[derive(Debug, Args)]
struct AugmentArgs {
    #[command(flatten)]
    window: WindowArgs,
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long)]
    seed: Option<u64>,
    /// Outputs per input image.
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, value_enum)]
    invert: Option<InvertArg>,
    #[arg(long)]
    invert_probability: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_LUT_SIZE)]
    lut_size: usize,
    /// Draw index of the first output; input i, copy k uses
    /// first_index + i * count + k.
    #[arg(long, default_value_t = 0)]
    first_index: u64,
    /// Debug: use the identity table instead of a random transform.
    #[arg(long)]
    identity_transform: bool,
    #[arg(short = 'o', long)]
    out_dir: PathBuf,
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
}

impl AugmentArgs {
    fn config(&self, seed: u64) -> PipelineConfig {
        let mut cfg = PipelineConfig::new(self.window.modality(), seed);
        cfg.window = self.window.policy();
        cfg.transform_spec = TransformSpec {
            n_sines: self.family.n_sines,
            f_min: self.family.fmin,
            f_max: self.family.fmax,
            seed,
        };
        cfg.invert = match (self.invert, self.invert_probability) {
            (Some(InvertArg::EveryOther), _) => InvertMode::EveryOther,
            (Some(InvertArg::Random), p) => InvertMode::Bernoulli {
                probability: p.unwrap_or(0.5),
            },
            (None, p) => InvertMode::Bernoulli {
                probability: p.unwrap_or(0.0),
            },
        };
        cfg.count = self.count;
        cfg.lut_size = self.lut_size;
        cfg.identity_transform = self.identity_transform;
        cfg
    }
}

type CmdResult = Result<(), Box<dyn std::error::Error + Send + Sync>>;

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    configure_threads();
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_DATA
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // Already initialized when run() is called twice in one process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn seed_or_random(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        eprintln!("seed: {s}");
        s
    })
}

fn read_document(path: &Path) -> Result<TransformDocument, Box<dyn std::error::Error + Send + Sync>> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let decoded = deserialize::<f64>(&text)?;
    for w in &decoded.warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(decoded.document)
}

fn emit(text: &str, output: Option<&Path>) -> CmdResult {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display()).into()),
        None => write_stdout(text),
    }
}

fn write_stdout(text: &str) -> CmdResult {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn dispatch(cmd: Command) -> CmdResult {
    match cmd {
        Command::Sample {
            family,
            seed,
            output,
        } => {
            let spec = TransformSpec::new(family.n_sines, family.fmin, family.fmax, seed_or_random(seed))?;
            let t = SampledTransform::sample(&spec)?;
            let doc = TransformDocument::from_transform(&t).with_spec(&spec);
            emit(&doc.to_json(), output.as_deref())
        }
        Command::Apply {
            transform,
            lut_size,
            input,
            output,
        } => {
            let doc = read_document(&transform)?;
            let image = read_image(&input)?;
            write_image(&apply_document(&image, &doc, lut_size)?, &output)?;
            Ok(())
        }
        Command::Augment(args) => augment(&args),
        Command::Curve {
            transform,
            size,
            output,
        } => {
            let t = read_document(&transform)?.transform::<f64>()?;
            let (xs, ys) = Lut::build(&t, size)?.curve();
            emit(&format_curve_csv(&xs, &ys)?, output.as_deref())
        }
        Command::Invert { input, output } => {
            write_image(&invert(&read_image(&input)?)?, &output)?;
            Ok(())
        }
        Command::Normalize {
            window,
            input,
            output,
        } => {
            let image = read_image(&input)?;
            write_image(&window.policy().apply(&image)?, &output)?;
            Ok(())
        }
        Command::Dice { a, b } => {
            let a = BinaryMask::from_image(&read_image(&a)?);
            let b = BinaryMask::from_image(&read_image(&b)?);
            write_stdout(&format!("{:.4}\n", dice(&a, &b)?))
        }
    }
}

/// `<stem>_aug<index>.<ext>` and the matching `.json` sidecar.
fn output_paths(out_dir: &Path, input: &Path, draw_index: u64) -> (PathBuf, PathBuf) {
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".into());
    let ext = input
        .extension()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "mha".into());
    let base = format!("{stem}_aug{draw_index:04}");
    (
        out_dir.join(format!("{base}.{ext}")),
        out_dir.join(format!("{base}.json")),
    )
}

fn augment(args: &AugmentArgs) -> CmdResult {
    let cfg = args.config(seed_or_random(args.seed));
    cfg.validate()?;
    fs::create_dir_all(&args.out_dir)
        .map_err(|e| format!("{}: {e}", args.out_dir.display()))?;

    let jobs: Vec<(usize, u64)> = (0..args.inputs.len())
        .flat_map(|i| {
            (0..cfg.count as u64).map(move |k| (i, args.first_index + (i * cfg.count) as u64 + k))
        })
        .collect();
    let images = args
        .inputs
        .iter()
        .map(|p| read_image(p))
        .collect::<Result<Vec<_>, _>>()?;

    jobs.par_iter().try_for_each(|&(i, draw_index)| -> CmdResult {
        let out = augment_image(&images[i], &cfg, draw_index)?;
        let (img_path, doc_path) = output_paths(&args.out_dir, &args.inputs[i], draw_index);
        write_image(&out.image, &img_path)?;
        if let Some(doc) = out.document() {
            fs::write(&doc_path, doc.to_json()).map_err(|e| format!("{}: {e}", doc_path.display()))?;
        }
        if out.record.resamples > 0 {
            eprintln!(
                "note: draw {draw_index} resampled {} degenerate transform(s)",
                out.record.resamples
            );
        }
        Ok(())
    })
}
