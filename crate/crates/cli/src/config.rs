//! `key=value` configuration files.
//!
//! ```text
//! # comments start with '#'
//! out_dir = /data/jazznet
//! types = chords,scales
//! tempo_bpm = 60
//! velocity = 90
//! seed = 7
//! jobs = 8
//! short_final_chord = false
//! render_cmd = timidity {input} -Ow -o {output}
//! ```
//!
//! Command-line flags override file values; `JAZZNET_OUT` supplies the
//! output directory when neither is given.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use jazznet::dataset::BuildOptions;
use jazznet::generator::{DEFAULT_TEMPO_BPM, DEFAULT_VELOCITY};
use jazznet::par::Parallelism;
use jazznet::GeneratorConfig;

use crate::CliError;

const KEYS: [&str; 9] = [
    "out_dir",
    "types",
    "subset",
    "tempo_bpm",
    "velocity",
    "seed",
    "jobs",
    "render_cmd",
    "short_final_chord",
];

#[derive(Debug, Default)]
pub struct ConfigFile {
    values: HashMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text =
            fs::read_to_string(path).map_err(|e| format!("--config {}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("--config {}: {e}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = HashMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key=value", n + 1))?;
            let k = k.trim();
            if !KEYS.contains(&k) {
                return Err(format!("line {}: unknown key {k:?}", n + 1));
            }
            values.insert(k.to_string(), v.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn flag(&self, key: &str) -> bool {
        self.get(key) == Some("true")
    }

    pub fn parse_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, String> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| format!("config {key}: cannot parse {v:?}")),
        }
    }
}

#[derive(Debug, Default)]
pub struct Overrides {
    pub out_dir: Option<PathBuf>,
    pub tempo_bpm: Option<u32>,
    pub velocity: Option<u8>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub render_cmd: Option<String>,
    pub short_final_chord: bool,
}

#[derive(Debug)]
pub struct Settings {
    pub out_dir: PathBuf,
    pub generator: GeneratorConfig,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub render_cmd: Option<String>,
}

impl Settings {
    pub fn resolve(file: &ConfigFile, flags: &Overrides) -> Result<Self, CliError> {
        let bad = |flag: &str, e: String| CliError::Usage(format!("{flag}: {e}"));
        let out_dir = flags
            .out_dir
            .clone()
            .or_else(|| file.get("out_dir").map(PathBuf::from))
            .ok_or_else(|| {
                bad(
                    "--out",
                    "no output directory (flag, config out_dir, or JAZZNET_OUT)".into(),
                )
            })?;
        let tempo_bpm = match flags.tempo_bpm {
            Some(t) => t,
            None => file
                .parse_or("tempo_bpm", DEFAULT_TEMPO_BPM)
                .map_err(|e| bad("--tempo", e))?,
        };
        if tempo_bpm == 0 {
            return Err(bad("--tempo", "must be at least 1".into()));
        }
        let velocity = match flags.velocity {
            Some(v) => v,
            None => file
                .parse_or("velocity", DEFAULT_VELOCITY)
                .map_err(|e| bad("--velocity", e))?,
        };
        if !(1..=127).contains(&velocity) {
            return Err(bad("--velocity", "must be 1-127".into()));
        }
        let seed = match flags.seed {
            Some(s) => s,
            None => file.parse_or("seed", 0).map_err(|e| bad("--seed", e))?,
        };
        let jobs = match flags.jobs {
            Some(j) => Some(j),
            None => file
                .get("jobs")
                .map(|v| {
                    v.parse()
                        .map_err(|_| bad("--jobs", format!("cannot parse {v:?}")))
                })
                .transpose()?,
        };
        if jobs == Some(0) {
            return Err(bad("--jobs", "must be at least 1".into()));
        }
        Ok(Settings {
            out_dir,
            generator: GeneratorConfig {
                tempo_bpm,
                velocity,
                short_final_chord: flags.short_final_chord || file.flag("short_final_chord"),
            },
            seed,
            jobs,
            render_cmd: flags
                .render_cmd
                .clone()
                .or_else(|| file.get("render_cmd").map(String::from)),
        })
    }

    pub fn parallelism(&self) -> Parallelism {
        Parallelism::from_jobs(self.jobs)
    }

    pub fn build_options(&self) -> BuildOptions {
        BuildOptions {
            generator: self.generator,
            seed: self.seed,
            parallelism: self.parallelism(),
            ..BuildOptions::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_overrides() {
        let file =
            ConfigFile::parse("# c\nout_dir = /tmp/x\ntempo_bpm=120\nvelocity = 100\n").unwrap();
        let s = Settings::resolve(
            &file,
            &Overrides {
                velocity: Some(64),
                ..Default::default()
            },
        )
        .ok()
        .unwrap();
        assert_eq!(s.out_dir, PathBuf::from("/tmp/x"));
        assert_eq!(s.generator.tempo_bpm, 120);
        assert_eq!(s.generator.velocity, 64);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(ConfigFile::parse("nonsense").is_err());
        assert!(ConfigFile::parse("colour = red").is_err());
        let file = ConfigFile::parse("out_dir=/x\nvelocity = 0").unwrap();
        assert!(Settings::resolve(&file, &Overrides::default()).is_err());
    }
}
