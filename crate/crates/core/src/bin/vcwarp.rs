//! `vcwarp` command-line tool.
//!
//! Exit codes: 0 success, 2 usage error, 3 input error, 4 numerical error.
//! Failures print a one-line JSON object `{"error": kind, "message": ...}`
//! on stderr.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;
use vcwarp::audio_io::{read_features, read_wav, resample_linear, write_features, write_wav, Waveform, FEATURE_MAGIC};
use vcwarp::dsp::InitPhase;
use vcwarp::features::{estimate_f0, extract_mel_cepstra, MelCepstra};
use vcwarp::metrics::{evaluate_pair, EvalReport};
use vcwarp::pipeline::{run_pipeline, PipelineOptions};
use vcwarp::testkit::{gen_warped_pair, SynthSpec};
use vcwarp::warp::{apply_warp, learn_warp, ApplyOptions, Basis, LearnOptions, WarpMode, WarpModel};
use vcwarp::{Error, Profile};

#[derive(Parser)]
#[command(
    name = "vcwarp",
    version,
    about = "Learned frequency warping and evaluation for voice conversion output"
)]
struct Cli {
    /// Analysis profile (warp80 or mcd36). Each subcommand has its own
    /// default when neither this flag nor VCWARP_PROFILE is set.
    #[arg(long, global = true, env = "VCWARP_PROFILE")]
    profile: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mel cepstra of a WAV file, written as a VCF1 feature file.
    Extract {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Number of coefficients (defaults to the profile's).
        #[arg(long)]
        n_coeffs: Option<usize>,
    },
    /// F0 contour of a WAV file as a two-column VCF1 file (f0 Hz, voiced).
    F0 {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Learn a warp taking converted speech towards reference speech.
    LearnWarp {
        /// Converted speech: WAV or VCF1 cepstra.
        converted: PathBuf,
        /// Reference speech: WAV or VCF1 cepstra.
        reference: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        learn: LearnArgs,
    },
    /// Apply a learned warp to a WAV file.
    ApplyWarp {
        model: PathBuf,
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        synth: SynthArgs,
    },
    /// MCD and normalised F0 RMSE of converted against reference speech.
    Evaluate {
        converted: Option<PathBuf>,
        reference: Option<PathBuf>,
        /// File with one `converted reference` pair per line.
        #[arg(long, conflicts_with_all = ["converted", "reference"])]
        list: Option<PathBuf>,
        /// Emit CSV instead of JSON.
        #[arg(long)]
        csv: bool,
        /// Write the report here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Synthesise a source/target pair with a planted warp.
    GenTest {
        /// Synthesis spec (JSON).
        spec: PathBuf,
        /// Planted warp factor.
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        /// Output prefix: writes PREFIX_source.wav, PREFIX_target.wav and
        /// PREFIX_alpha.json.
        #[arg(short, long)]
        output: PathBuf,
        /// Noise seed, overriding the spec's.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Learn, apply and evaluate in one go.
    Pipeline {
        converted: PathBuf,
        reference: PathBuf,
        /// Warped WAV output.
        #[arg(short, long)]
        output: PathBuf,
        /// Report JSON output (stdout when omitted).
        #[arg(long)]
        report: Option<PathBuf>,
        /// Optional warp JSON output.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value = "warp80")]
        warp_profile: String,
        #[arg(long, default_value = "mcd36")]
        eval_profile: String,
        #[command(flatten)]
        learn: LearnArgs,
        #[command(flatten)]
        synth: SynthArgs,
    },
}

#[derive(Args)]
struct LearnArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Scalar)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = BasisArg::MelAxis)]
    basis: BasisArg,
    #[arg(long, default_value_t = 50)]
    max_sweeps: usize,
}

#[derive(Args)]
struct SynthArgs {
    /// Griffin-Lim iterations (defaults to the profile's).
    #[arg(long)]
    gl_iters: Option<usize>,
    /// Start Griffin-Lim from seeded random phase; requires --seed.
    #[arg(long, requires = "gl_seed")]
    random_phase: bool,
    /// Seed for the random initial phase.
    #[arg(long = "seed", id = "gl_seed", value_name = "SEED")]
    gl_seed: Option<u64>,
    /// Resynthesise the warped envelope alone, dropping the fine structure.
    #[arg(long)]
    envelope_only: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Scalar,
    PerBand,
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    MelAxis,
    BandCenter,
}

impl LearnArgs {
    fn options(&self) -> LearnOptions {
        LearnOptions {
            mode: match self.mode {
                ModeArg::Scalar => WarpMode::Scalar,
                ModeArg::PerBand => WarpMode::PerBand,
            },
            basis: match self.basis {
                BasisArg::MelAxis => Basis::MelAxis,
                BasisArg::BandCenter => Basis::BandCenter,
            },
            max_sweeps: self.max_sweeps,
        }
    }
}

impl SynthArgs {
    fn init(&self) -> InitPhase {
        match (self.random_phase, self.gl_seed) {
            (true, Some(seed)) => InitPhase::Random { seed },
            _ => InitPhase::Zero,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let line = json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{line}");
            ExitCode::from(if e.is_numerical() { 4 } else { 3 })
        }
    }
}

fn profile(cli_choice: &Option<String>, fallback: &str) -> vcwarp::Result<Profile> {
    let p = Profile::from_name(cli_choice.as_deref().unwrap_or(fallback))?;
    p.validate()?;
    Ok(p)
}

fn load_audio(path: &Path, p: &Profile) -> vcwarp::Result<Waveform> {
    resample_linear(&read_wav(path)?, p.sample_rate_hz)
}

fn write_text(path: &Path, text: &str) -> vcwarp::Result<()> {
    fs::write(path, text)?;
    Ok(())
}

fn is_feature_file(path: &Path) -> vcwarp::Result<bool> {
    let bytes = fs::read(path)?;
    Ok(bytes.starts_with(&FEATURE_MAGIC))
}

fn load_cepstra(path: &Path, p: &Profile) -> vcwarp::Result<MelCepstra> {
    if is_feature_file(path)? {
        MelCepstra::from_feature_file(&read_features(path)?, p.stft_config())
    } else {
        extract_mel_cepstra(&load_audio(path, p)?, p.n_coeffs, &p.stft_config())
    }
}

fn run(cli: Cli) -> vcwarp::Result<()> {
    match &cli.command {
        Command::Extract {
            input,
            output,
            n_coeffs,
        } => {
            let p = profile(&cli.profile, "mcd36")?;
            let w = load_audio(input, &p)?;
            let c = extract_mel_cepstra(&w, n_coeffs.unwrap_or(p.n_coeffs), &p.stft_config())?;
            write_features(&c.to_feature_file(), output)
        }
        Command::F0 { input, output } => {
            let p = profile(&cli.profile, "mcd36")?;
            let w = load_audio(input, &p)?;
            let f0 = estimate_f0(&w, p.f0_range(), &p.stft_config())?;
            write_features(&f0.to_feature_file(w.sample_rate_hz()), output)
        }
        Command::LearnWarp {
            converted,
            reference,
            output,
            learn,
        } => {
            let p = profile(&cli.profile, "warp80")?;
            let conv = load_cepstra(converted, &p)?;
            let reference = load_cepstra(reference, &p)?;
            learn_warp(&conv, &reference, &learn.options())?.save(output)
        }
        Command::ApplyWarp {
            model,
            input,
            output,
            synth,
        } => {
            let p = profile(&cli.profile, "warp80")?;
            let model = WarpModel::load(model)?;
            let w = resample_linear(&read_wav(input)?, model.geometry().sample_rate_hz)?;
            let opts = ApplyOptions {
                gl_iters: synth.gl_iters.unwrap_or(p.gl_iters),
                init: synth.init(),
                fine_structure: !synth.envelope_only,
            };
            write_wav(&apply_warp(&model, &w, &opts)?, output)
        }
        Command::Evaluate {
            converted,
            reference,
            list,
            csv,
            output,
        } => {
            let p = profile(&cli.profile, "mcd36")?;
            let pairs = match (list, converted, reference) {
                (Some(list), _, _) => read_pair_list(list)?,
                (None, Some(a), Some(b)) => vec![(a.clone(), b.clone())],
                _ => {
                    return Err(Error::InvalidArgument(
                        "evaluate needs CONVERTED and REFERENCE, or --list".into(),
                    ))
                }
            };
            let reports = pairs
                .par_iter()
                .map(|(a, b)| {
                    let report = evaluate_pair(&read_wav(a)?, &read_wav(b)?, &p)?;
                    Ok(report.with_paths(a.display().to_string(), b.display().to_string()))
                })
                .collect::<vcwarp::Result<Vec<EvalReport>>>()?;
            let text = if *csv {
                let mut text = format!("{}\n", EvalReport::CSV_HEADER);
                for r in &reports {
                    text.push_str(&r.csv_line());
                    text.push('\n');
                }
                text
            } else if list.is_some() {
                let mut text = serde_json::to_string_pretty(&reports)?;
                text.push('\n');
                text
            } else {
                reports[0].to_json()
            };
            emit(output.as_deref(), &text)
        }
        Command::GenTest {
            spec,
            alpha,
            output,
            seed,
        } => {
            let mut spec: SynthSpec = serde_json::from_str(&fs::read_to_string(spec)?)?;
            if let Some(seed) = seed {
                spec.seed = *seed;
            }
            let pair = gen_warped_pair(&spec, *alpha)?;
            let prefix = output.display().to_string();
            write_wav(&pair.source, format!("{prefix}_source.wav"))?;
            write_wav(&pair.target, format!("{prefix}_target.wav"))?;
            let sidecar = json!({
                "alpha_star": pair.alpha_star,
                "source_spec": spec,
                "target_spec": pair.target_spec,
            });
            let mut text = serde_json::to_string_pretty(&sidecar)?;
            text.push('\n');
            write_text(Path::new(&format!("{prefix}_alpha.json")), &text)
        }
        Command::Pipeline {
            converted,
            reference,
            output,
            report,
            model,
            warp_profile,
            eval_profile,
            learn,
            synth,
        } => {
            let mut warp_profile = Profile::from_name(warp_profile)?;
            if let Some(n) = synth.gl_iters {
                warp_profile.gl_iters = n;
            }
            let opts = PipelineOptions {
                warp_profile,
                eval_profile: Profile::from_name(eval_profile)?,
                learn: learn.options(),
                init: synth.init(),
                fine_structure: !synth.envelope_only,
            };
            let out = run_pipeline(&read_wav(converted)?, &read_wav(reference)?, &opts)?;
            write_wav(&out.warped, output)?;
            if let Some(path) = model {
                out.model.save(path)?;
            }
            emit(report.as_deref(), &out.report.to_json())
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> vcwarp::Result<()> {
    match path {
        Some(path) => write_text(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

/// Pairs from a list file: two paths per line separated by whitespace or a
/// comma; blank lines and `#` comments are skipped. Relative paths resolve
/// against the list file's directory.
fn read_pair_list(list: &Path) -> vcwarp::Result<Vec<(PathBuf, PathBuf)>> {
    let base = list.parent().unwrap_or(Path::new(""));
    let mut pairs = Vec::new();
    for (n, line) in fs::read_to_string(list)?.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        let [a, b] = fields[..] else {
            return Err(Error::InvalidArgument(format!(
                "{}:{}: expected two paths, found {}",
                list.display(),
                n + 1,
                fields.len()
            )));
        };
        pairs.push((base.join(a), base.join(b)));
    }
    if pairs.is_empty() {
        return Err(Error::EmptySequence("evaluation list"));
    }
    Ok(pairs)
}
