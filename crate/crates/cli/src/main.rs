use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{ArgAction, Args, Parser, Subcommand};

use wcec_core::bench::{format_table, run_bench, write_csv};
use wcec_core::codec::decode_with_stats;
use wcec_core::frame::{emit_pgm, load_sequence, mosaic, parse_pgm, parse_ppm};
use wcec_core::synth::{translating_sequence, TextureParams};
use wcec_core::{encode_sequence, BayerPattern, CodecParams, Threshold};

#[derive(Parser, Debug)]
#[command(
    name = "wcec",
    version,
    about = "Lossless inter-frame codec for capsule-endoscopy CFA sequences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compress a sequence of CFA PGM frames into a WCEC container
    Encode {
        /// Glob (or directory) of PGM frames, taken in sorted path order
        #[arg(long)]
        input: String,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        codec: CodecArgs,
        /// Bayer phase of the input frames
        #[arg(long, default_value = "rggb")]
        pattern: BayerPattern,
    },
    /// Decode a container into frame_NNNN.pgm files
    Decode {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Directory of original PGMs to compare against
        #[arg(long)]
        verify: Option<PathBuf>,
    },
    /// Convert RGB PPM frames to single-channel CFA PGMs
    Mosaic {
        /// Glob (or directory) of PPM frames
        #[arg(long)]
        input: String,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value = "rggb")]
        pattern: BayerPattern,
    },
    /// Run every codec configuration plus the intra baseline and report CR
    Bench {
        /// Glob (or directory) of PGM frames
        #[arg(long)]
        input: String,
        /// Write the results as CSV
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        codec: CodecArgs,
        #[arg(long, default_value = "rggb")]
        pattern: BayerPattern,
    },
    /// Write a synthetic translating tissue-like sequence as CFA PGMs
    Synth {
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 10)]
        frames: usize,
        #[arg(long, default_value_t = 480)]
        width: usize,
        #[arg(long, default_value_t = 480)]
        height: usize,
        /// Horizontal shift per frame, in pixels
        #[arg(long, default_value_t = 2)]
        step_x: usize,
        /// Vertical shift per frame, in pixels
        #[arg(long, default_value_t = 0)]
        step_y: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "rggb")]
        pattern: BayerPattern,
    },
}

#[derive(Args, Debug)]
struct CodecArgs {
    #[arg(long, default_value_t = 5)]
    block_size: usize,
    #[arg(long, default_value_t = 3)]
    search_radius: usize,
    /// Mean Sobel magnitude below which a block is smooth
    #[arg(long, default_value_t = 10.0)]
    threshold: f64,
    /// DPCM-code smooth blocks (`--smooth=false` sends every block through motion search)
    #[arg(long, action = ArgAction::Set, num_args = 0..=1, default_value_t = true, default_missing_value = "true")]
    smooth: bool,
    /// Search only Bayer-phase-preserving (even) offsets
    #[arg(long)]
    cfa_phase: bool,
    /// MED-predict inter residuals before entropy coding
    #[arg(long)]
    recode_residuals: bool,
}

impl CodecArgs {
    fn params(&self) -> Result<CodecParams, UsageError> {
        let threshold = Threshold::from_f64(self.threshold)
            .ok_or_else(|| UsageError(format!("invalid threshold {}", self.threshold)))?;
        let params = CodecParams {
            block_size: self.block_size,
            search_radius: self.search_radius,
            threshold,
            smooth: self.smooth,
            cfa_phase: self.cfa_phase,
            recode_residuals: self.recode_residuals,
        };
        params.validate().map_err(|e| UsageError(e.to_string()))?;
        Ok(params)
    }
}

/// Bad invocation; exits with status 2 like clap's own errors.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn expand_input(pattern: &str, ext: &str) -> Result<Vec<PathBuf>> {
    let pattern = if Path::new(pattern).is_dir() {
        format!("{}/*.{ext}", pattern.trim_end_matches('/'))
    } else {
        pattern.to_string()
    };
    let mut paths = glob::glob(&pattern)
        .map_err(|e| UsageError(format!("bad glob {pattern:?}: {e}")))?
        .collect::<Result<Vec<_>, _>>()?;
    paths.sort();
    if paths.is_empty() {
        return Err(UsageError(format!("no files match {pattern:?}")).into());
    }
    Ok(paths)
}

fn frame_name(i: usize) -> String {
    format!("frame_{i:04}.pgm")
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Encode {
            input,
            output,
            codec,
            pattern,
        } => {
            let params = codec.params()?;
            let paths = expand_input(&input, "pgm")?;
            let frames = load_sequence(&paths, pattern)?;
            let bytes = encode_sequence(&frames, &params)?;
            std::fs::write(&output, &bytes)
                .with_context(|| format!("writing {}", output.display()))?;
            let (_, stats) = decode_with_stats(&bytes)?;
            println!("{}: {}", output.display(), stats.summary());
        }
        Command::Decode {
            input,
            output,
            verify,
        } => {
            let bytes =
                std::fs::read(&input).with_context(|| format!("reading {}", input.display()))?;
            let (frames, stats) = decode_with_stats(&bytes)
                .with_context(|| format!("decoding {}", input.display()))?;
            std::fs::create_dir_all(&output)?;
            for (i, f) in frames.iter().enumerate() {
                std::fs::write(output.join(frame_name(i)), emit_pgm(f))?;
            }
            println!("{}: {}", input.display(), stats.summary());
            if let Some(dir) = verify {
                let originals = expand_input(&dir.to_string_lossy(), "pgm")?;
                if originals.len() != frames.len() {
                    bail!(
                        "verify: {} frames decoded but {} originals in {}",
                        frames.len(),
                        originals.len(),
                        dir.display()
                    );
                }
                for (i, (decoded, path)) in frames.iter().zip(&originals).enumerate() {
                    let original = parse_pgm(&std::fs::read(path)?)
                        .with_context(|| format!("parsing {}", path.display()))?;
                    if (original.width(), original.height()) != (decoded.width(), decoded.height())
                    {
                        bail!(
                            "verify: frame {i} is {}x{}, original {} is {}x{}",
                            decoded.width(),
                            decoded.height(),
                            path.display(),
                            original.width(),
                            original.height()
                        );
                    }
                    if let Some(p) = original
                        .samples()
                        .iter()
                        .zip(decoded.samples())
                        .position(|(a, b)| a != b)
                    {
                        let w = original.width();
                        bail!(
                            "verify: frame {i} differs from {} at pixel (row {}, col {}): {} != {}",
                            path.display(),
                            p / w,
                            p % w,
                            decoded.samples()[p],
                            original.samples()[p]
                        );
                    }
                }
                println!("OK, 0 mismatches");
            }
        }
        Command::Mosaic {
            input,
            output,
            pattern,
        } => {
            let paths = expand_input(&input, "ppm")?;
            std::fs::create_dir_all(&output)?;
            for path in &paths {
                let rgb = parse_ppm(&std::fs::read(path)?)
                    .with_context(|| format!("parsing {}", path.display()))?;
                let cfa = mosaic(&rgb, pattern)
                    .with_context(|| format!("mosaicing {}", path.display()))?;
                let name = path
                    .file_stem()
                    .unwrap_or_default()
                    .to_string_lossy()
                    .into_owned()
                    + ".pgm";
                std::fs::write(output.join(name), emit_pgm(&cfa))?;
            }
            println!("mosaiced {} frames with {pattern}", paths.len());
        }
        Command::Bench {
            input,
            csv,
            codec,
            pattern,
        } => {
            let params = codec.params()?;
            let paths = expand_input(&input, "pgm")?;
            let frames = load_sequence(&paths, pattern)?;
            let rows = run_bench(&frames, &params)?;
            print!("{}", format_table(&rows));
            if let Some(path) = csv {
                let file = std::fs::File::create(&path)
                    .with_context(|| format!("creating {}", path.display()))?;
                write_csv(&rows, file)?;
            }
            if let Some(bad) = rows.iter().find(|r| !r.lossless) {
                bail!("configuration {} failed its round trip", bad.config);
            }
        }
        Command::Synth {
            output,
            frames,
            width,
            height,
            step_x,
            step_y,
            seed,
            pattern,
        } => {
            if width % 2 != 0 || height % 2 != 0 || frames == 0 {
                return Err(UsageError(
                    "synth needs even dimensions and at least one frame".into(),
                )
                .into());
            }
            let seq = translating_sequence(
                width,
                height,
                frames,
                (step_x, step_y),
                pattern,
                TextureParams::default(),
                seed,
            );
            std::fs::create_dir_all(&output)?;
            for (i, f) in seq.iter().enumerate() {
                std::fs::write(output.join(frame_name(i)), emit_pgm(f))?;
            }
            println!("wrote {frames} frames to {}", output.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<UsageError>() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
