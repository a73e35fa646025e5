//! `jazznet` command-line front end.
//!
//! Exit codes: 0 success, 1 runtime or I/O failure (including a failed
//! verification), 2 usage or configuration error.

mod config;

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};

use clap::{Args, Parser, Subcommand};

use jazznet::catalog::{parse_progression, Mode, PatternMode, PatternType};
use jazznet::dataset::{
    self, build, build_modes, read_manifest, sample_subset, split, write_manifest, BuildOptions,
    BuildReport, DatasetError, SubsetSize, VerifyOptions, MANIFEST_FILE,
};
use jazznet::par::{self, Parallelism};
use jazznet::{Catalog, DistanceVector};

use crate::config::{ConfigFile, Settings};

#[derive(Debug, Parser)]
#[command(
    name = "jazznet",
    version,
    about = "Generate and verify jazz piano pattern datasets"
)]
struct Cli {
    /// key=value configuration file; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Generate MIDI clips and metadata.csv
    Generate {
        #[command(flatten)]
        gen: GenArgs,
        /// Comma-separated: chords,arpeggios,scales,progressions (or "all")
        #[arg(long)]
        types: Option<String>,
        /// small, medium, large or full
        #[arg(long)]
        subset: Option<String>,
    },
    /// Recount a built tree against the published statistics
    Verify {
        #[arg(long, env = "JAZZNET_OUT")]
        dir: Option<PathBuf>,
        /// Decode every Nth clip for the duration check
        #[arg(long, default_value_t = 1)]
        sample_every: usize,
        #[arg(long)]
        short_final_chord: bool,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Write subset_<size>.csv from a full manifest
    Subset {
        #[arg(long, env = "JAZZNET_OUT")]
        dir: Option<PathBuf>,
        #[arg(long)]
        size: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Output file (default <dir>/subset_<size>.csv)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Assign train/valid/test splits to a manifest
    Split {
        #[arg(long, env = "JAZZNET_OUT")]
        dir: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Manifest to read (default <dir>/metadata.csv)
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Output file (default: overwrite the input manifest)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the mode taxonomy
    Describe,
    /// Generate a user-defined pattern from its semitone distances
    NewPattern {
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long)]
        name: String,
        /// Comma-separated semitone distances, e.g. 4,3
        #[arg(long)]
        distances: String,
        /// chord, arpeggio or scale
        #[arg(long = "type")]
        pattern_type: String,
    },
    /// Generate a Roman-numeral progression in every key and inversion
    Progression {
        #[command(flatten)]
        gen: GenArgs,
        /// e.g. ii-V-I, I-vi-ii-V7, ii-triV-I
        #[arg(long)]
        spec: String,
    },
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, env = "JAZZNET_OUT")]
    out: Option<PathBuf>,
    #[arg(long)]
    tempo: Option<u32>,
    #[arg(long)]
    velocity: Option<u8>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Shell command run per clip; {input} and {output} are replaced
    #[arg(long)]
    render_cmd: Option<String>,
    /// Hold the last chord of 3-chord progressions one beat (7 s clips)
    #[arg(long)]
    short_final_chord: bool,
}

enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        match e {
            DatasetError::EmptySelection | DatasetError::ManifestMissing(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p).map_err(CliError::Usage)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Cmd::Generate { gen, types, subset } => {
            let settings = Settings::resolve(&file, &gen_overrides(&gen))?;
            let types = parse_types(types.as_deref().or(file.get("types")).unwrap_or("all"))?;
            let subset = match subset.as_deref().or(file.get("subset")) {
                None | Some("full") => None,
                Some(s) => Some(s.parse::<SubsetSize>().map_err(|e| usage("--subset", &e))?),
            };
            let options = BuildOptions {
                types,
                subset,
                ..settings.build_options()
            };
            let report = build(&settings.out_dir, &Catalog::builtin(), &options)?;
            print_report(&report);
            render(&settings, &report)?;
        }
        Cmd::Verify {
            dir,
            sample_every,
            short_final_chord,
            jobs,
        } => {
            let dir = resolve_dir(dir, &file)?;
            let options = VerifyOptions {
                short_final_chord: short_final_chord || file.flag("short_final_chord"),
                sample_every,
                parallelism: Parallelism::from_jobs(jobs),
            };
            let report = dataset::verify(&dir, &Catalog::builtin(), &options)?;
            print!("{report}");
            if !report.all_pass() {
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::Subset {
            dir,
            size,
            seed,
            out,
        } => {
            let dir = resolve_dir(dir, &file)?;
            let size: SubsetSize = size.parse().map_err(|e: String| usage("--size", &e))?;
            let seed = resolve_seed(seed, &file)?;
            let records = read_manifest(&dir.join(MANIFEST_FILE))?;
            let subset = split(&sample_subset(&records, size.spec(), seed)?, seed);
            let out = out.unwrap_or_else(|| dir.join(size.file_name()));
            write_manifest(&out, &subset)?;
            println!("{size}: {} records -> {}", subset.len(), out.display());
        }
        Cmd::Split {
            dir,
            seed,
            manifest,
            out,
        } => {
            let seed = resolve_seed(seed, &file)?;
            let input = match manifest {
                Some(m) => m,
                None => resolve_dir(dir, &file)?.join(MANIFEST_FILE),
            };
            let records = split(&read_manifest(&input)?, seed);
            let out = out.unwrap_or(input);
            write_manifest(&out, &records)?;
            for s in [
                dataset::Split::Train,
                dataset::Split::Valid,
                dataset::Split::Test,
            ] {
                let n = records.iter().filter(|r| r.split == Some(s)).count();
                println!("{:<6} {n}", s.as_str());
            }
        }
        Cmd::Describe => describe(&Catalog::builtin()),
        Cmd::NewPattern {
            gen,
            name,
            distances,
            pattern_type,
        } => {
            let settings = Settings::resolve(&file, &gen_overrides(&gen))?;
            let ty: PatternType = pattern_type.parse().map_err(|_| {
                usage(
                    "--type",
                    &format!("{pattern_type:?} is not chord, arpeggio or scale"),
                )
            })?;
            if ty == PatternType::Progression {
                return Err(usage(
                    "--type",
                    "use the progression command for progressions",
                ));
            }
            if name.is_empty()
                || !name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || "_-".contains(c))
            {
                return Err(usage("--name", "use letters, digits, '_' or '-'"));
            }
            let catalog = Catalog::builtin();
            if catalog.modes().iter().any(|m| m.name() == name) {
                return Err(usage(
                    "--name",
                    &format!("NameCollision: {name:?} is a builtin mode"),
                ));
            }
            let distances: DistanceVector = distances
                .parse()
                .map_err(|e| usage("--distances", &format!("InvalidDistance: {e}")))?;
            if distances.is_empty() || distances.span() > 24 {
                return Err(usage(
                    "--distances",
                    "InvalidDistance: pattern must have 1-11 distances spanning at most 24 semitones",
                ));
            }
            let mode = Mode::Pattern(PatternMode::custom(&name, ty, distances));
            let options = BuildOptions {
                manifest_name: format!("metadata_{}_{}.csv", ty, mode.slug()),
                ..settings.build_options()
            };
            let report = build_modes(&settings.out_dir, &[&mode], &options)?;
            print_report(&report);
            render(&settings, &report)?;
        }
        Cmd::Progression { gen, spec } => {
            let settings = Settings::resolve(&file, &gen_overrides(&gen))?;
            let prog = parse_progression(&spec).map_err(|e| usage("--spec", &e.to_string()))?;
            let mode = Mode::Progression(prog);
            let options = BuildOptions {
                manifest_name: format!("metadata_progression_{}.csv", mode.slug()),
                ..settings.build_options()
            };
            let report = build_modes(&settings.out_dir, &[&mode], &options)?;
            print_report(&report);
            render(&settings, &report)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn usage(flag: &str, msg: &str) -> CliError {
    CliError::Usage(format!("{flag}: {msg}"))
}

fn gen_overrides(g: &GenArgs) -> config::Overrides {
    config::Overrides {
        out_dir: g.out.clone(),
        tempo_bpm: g.tempo,
        velocity: g.velocity,
        seed: g.seed,
        jobs: g.jobs,
        render_cmd: g.render_cmd.clone(),
        short_final_chord: g.short_final_chord,
    }
}

fn resolve_dir(dir: Option<PathBuf>, file: &ConfigFile) -> CliResult<PathBuf> {
    dir.or_else(|| file.get("out_dir").map(PathBuf::from))
        .ok_or_else(|| {
            usage(
                "--dir",
                "no dataset directory given (flag, config out_dir, or JAZZNET_OUT)",
            )
        })
}

fn resolve_seed(seed: Option<u64>, file: &ConfigFile) -> CliResult<u64> {
    match seed {
        Some(s) => Ok(s),
        None => file.parse_or("seed", 0).map_err(|e| usage("--seed", &e)),
    }
}

fn parse_types(s: &str) -> CliResult<Vec<PatternType>> {
    let s = s.trim();
    if s == "all" {
        return Ok(PatternType::ALL.to_vec());
    }
    let mut out = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let t = part
            .parse::<PatternType>()
            .map_err(|e| usage("--types", &e.to_string()))?;
        if !out.contains(&t) {
            out.push(t);
        }
    }
    if out.is_empty() {
        return Err(usage("--types", "no pattern types selected"));
    }
    Ok(out)
}

fn print_report(report: &BuildReport) {
    for (t, n) in &report.counts {
        println!("{:<12} {n:>7}", t.dir_name());
    }
    println!("{:<12} {:>7}", "total", report.total());
    println!(
        "wrote {} files ({} unchanged); manifest {}",
        report.written,
        report.unchanged,
        report.manifest.display()
    );
}

/// Runs the render template once per clip listed in the build manifest.
fn render(settings: &Settings, report: &BuildReport) -> CliResult {
    let Some(template) = &settings.render_cmd else {
        return Ok(());
    };
    let records = read_manifest(&report.manifest)?;
    let root = &settings.out_dir;
    par::try_for_each(&records, settings.parallelism(), |r| {
        let input = root.join(&r.filename);
        let output = input.with_extension("wav");
        let cmd = template
            .replace("{input}", &shell_quote(&input))
            .replace("{output}", &shell_quote(&output));
        let status = Command::new("sh")
            .arg("-c")
            .arg(&cmd)
            .status()
            .map_err(|e| CliError::Runtime(format!("--render-cmd: {e}")))?;
        if status.success() {
            Ok(())
        } else {
            Err(CliError::Runtime(format!(
                "--render-cmd failed ({status}) for {}",
                input.display()
            )))
        }
    })
}

fn shell_quote(p: &Path) -> String {
    format!("'{}'", p.display().to_string().replace('\'', r"'\''"))
}

fn describe(catalog: &Catalog) {
    println!(
        "{:<12} {:<11} {:<14} {:<34} {:>5} {:>7}",
        "TYPE", "CATEGORY", "MODE", "STRUCTURE", "FORMS", "CLIPS"
    );
    let mut clips = 0;
    for mode in catalog.modes() {
        let (category, structure) = match mode {
            Mode::Pattern(m) => (m.category.as_str().to_string(), m.distances.to_string()),
            Mode::Progression(p) => (
                format!("{}-chord", p.chords.len()),
                p.chords
                    .iter()
                    .map(|c| format!("{}:{}", c.label, c.quality.as_str()))
                    .collect::<Vec<_>>()
                    .join(" "),
            ),
        };
        clips += mode.n_instances();
        println!(
            "{:<12} {:<11} {:<14} {:<34} {:>5} {:>7}",
            mode.pattern_type().as_str(),
            category,
            mode.name(),
            structure,
            mode.forms_per_base(),
            mode.n_instances()
        );
    }
    println!("{} modes, {clips} clips", catalog.modes().len());
}
