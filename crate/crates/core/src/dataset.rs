//! Dataset assembly: directory layout, manifests, count verification,
//! subset sampling and train/valid/test splitting.
//!
//! Layout of a built tree:
//!
//! ```text
//! <out>/metadata.csv
//! <out>/chords/<mode>/<root>-<mode>-<form>.mid
//! <out>/arpeggios/...
//! <out>/scales/...
//! <out>/progressions/<mode>/<root>-<mode>-<i0>-<i1>-<i2>.mid
//! ```
//!
//! While a build runs, `<out>/.build_state` holds a config fingerprint and
//! one `done=<type>` line per finished pattern type. Rerunning the same
//! build skips finished types and any file whose bytes already match; the
//! state file is removed once the manifest is written.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;
use walkdir::WalkDir;

use crate::catalog::{enumerate_instances, Catalog, Category, Mode, PatternInstance, PatternType};
use crate::generator::{clip_duration_seconds, realize_clip, GeneratorConfig};
use crate::midi::{decode, encode, MidiError};
use crate::par::{self, Parallelism};
use crate::rng::{fnv1a64, largest_remainder, shuffle, SplitMix64};

pub const MANIFEST_FILE: &str = "metadata.csv";
pub const STATE_FILE: &str = ".build_state";

/// Published totals per pattern type.
pub const EXPECTED_CHORDS: usize = 5525;
pub const EXPECTED_ARPEGGIOS: usize = 5525;
pub const EXPECTED_SCALES: usize = 4590;
pub const EXPECTED_PROGRESSIONS: usize = 146_880;
pub const EXPECTED_TOTAL: usize = 162_520;
pub const NON_PROGRESSION_CLIPS: usize = 15_640;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: {source}")]
    Midi { path: PathBuf, source: MidiError },
    #[error("no pattern types selected")]
    EmptySelection,
    #[error("manifest not found at {0}")]
    ManifestMissing(PathBuf),
    #[error("mode {mode} has {available} records but {needed} were requested")]
    InsufficientPopulation {
        mode: String,
        needed: usize,
        available: usize,
    },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Valid,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Valid => "valid",
            Split::Test => "test",
        }
    }
}

/// One labeled clip. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub filename: String,
    pub pattern_type: PatternType,
    pub mode: String,
    pub root_name: String,
    pub root_midi: u8,
    pub octave: i32,
    /// Inversion index, or dash-joined indices for progressions.
    pub inversion: String,
    #[serde(serialize_with = "plain_number")]
    pub duration_s: f64,
    pub split: Option<Split>,
}

fn plain_number<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl ManifestRecord {
    pub fn for_instance(inst: &PatternInstance<'_>, config: &GeneratorConfig) -> Self {
        let slug = inst.mode.slug();
        let root_name = inst.base.name();
        let form = inst.form.to_string();
        ManifestRecord {
            filename: format!(
                "{}/{slug}/{root_name}-{slug}-{form}.mid",
                inst.mode.pattern_type().dir_name()
            ),
            pattern_type: inst.mode.pattern_type(),
            mode: inst.mode.name().to_string(),
            root_name,
            root_midi: inst.base.value(),
            octave: inst.base.octave(),
            inversion: form,
            duration_s: clip_duration_seconds(inst, config),
            split: None,
        }
    }

    fn stratum(&self) -> String {
        format!("{}/{}", self.pattern_type, self.mode)
    }
}

pub fn write_manifest(path: &Path, records: &[ManifestRecord]) -> Result<(), DatasetError> {
    let csv_err = |source| DatasetError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let tmp = path.with_extension("csv.tmp");
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(&tmp)
            .map_err(csv_err)?;
        for r in records {
            w.serialize(r).map_err(csv_err)?;
        }
        w.flush().map_err(io_err(&tmp))?;
    }
    fs::rename(&tmp, path).map_err(io_err(path))
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRecord>, DatasetError> {
    if !path.is_file() {
        return Err(DatasetError::ManifestMissing(path.to_path_buf()));
    }
    let csv_err = |source| DatasetError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    r.deserialize()
        .collect::<Result<Vec<_>, _>>()
        .map_err(csv_err)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubsetSize {
    Small,
    Medium,
    Large,
}

impl SubsetSize {
    pub const ALL: [SubsetSize; 3] = [SubsetSize::Small, SubsetSize::Medium, SubsetSize::Large];

    pub fn as_str(self) -> &'static str {
        match self {
            SubsetSize::Small => "small",
            SubsetSize::Medium => "medium",
            SubsetSize::Large => "large",
        }
    }

    pub fn spec(self) -> SubsetSpec {
        let n_progressions = match self {
            SubsetSize::Small => 5876,
            SubsetSize::Medium => 14_688,
            SubsetSize::Large => 36_720,
        };
        SubsetSpec {
            name: self,
            n_progressions,
        }
    }

    pub fn file_name(self) -> String {
        format!("subset_{}.csv", self.as_str())
    }
}

impl fmt::Display for SubsetSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SubsetSize {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SubsetSize::ALL
            .into_iter()
            .find(|z| z.as_str() == s)
            .ok_or_else(|| format!("unknown subset size {s:?} (small, medium, large)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubsetSpec {
    pub name: SubsetSize,
    pub n_progressions: usize,
}

/// Keeps every non-progression record and a per-mode stratified sample of
/// `spec.n_progressions` progression records.
///
/// Quotas are proportional to mode sizes (largest remainder, ties to the
/// earlier mode). Within a mode the records are shuffled by a SplitMix64
/// stream seeded with `seed ^ fnv1a64(mode)` and the quota is taken as a
/// prefix, so smaller subsets are contained in larger ones for one seed.
pub fn sample_subset(
    records: &[ManifestRecord],
    spec: SubsetSpec,
    seed: u64,
) -> Result<Vec<ManifestRecord>, DatasetError> {
    let mut modes: Vec<&str> = Vec::new();
    let mut members: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, r) in records.iter().enumerate() {
        if r.pattern_type == PatternType::Progression {
            let list = members.entry(&r.mode).or_insert_with(|| {
                modes.push(&r.mode);
                Vec::new()
            });
            list.push(i);
        }
    }
    let sizes: Vec<u64> = modes.iter().map(|m| members[m].len() as u64).collect();
    let available: u64 = sizes.iter().sum();
    if spec.n_progressions as u64 > available {
        return Err(DatasetError::InsufficientPopulation {
            mode: "progressions".into(),
            needed: spec.n_progressions,
            available: available as usize,
        });
    }
    let quotas = largest_remainder(spec.n_progressions as u64, &sizes);
    let mut keep = vec![false; records.len()];
    for (mode, &quota) in modes.iter().zip(&quotas) {
        let mut order = members[mode].clone();
        if quota as usize > order.len() {
            return Err(DatasetError::InsufficientPopulation {
                mode: mode.to_string(),
                needed: quota as usize,
                available: order.len(),
            });
        }
        shuffle(&mut order, &mut SplitMix64::for_stream(seed, mode));
        for &i in &order[..quota as usize] {
            keep[i] = true;
        }
    }
    Ok(records
        .iter()
        .zip(keep)
        .filter(|(r, k)| *k || r.pattern_type != PatternType::Progression)
        .map(|(r, _)| r.clone())
        .collect())
}

/// Assigns train/valid/test per (type, mode) stratum at 80/10/10.
///
/// Counts use the largest-remainder rule with ties resolved train, valid,
/// test. Records are shuffled by the stream `seed ^ fnv1a64("split:" +
/// type + "/" + mode)` and assigned in shuffled order.
pub fn split(records: &[ManifestRecord], seed: u64) -> Vec<ManifestRecord> {
    let mut strata: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        strata.entry(r.stratum()).or_default().push(i);
    }
    let mut out = records.to_vec();
    for (key, mut idx) in strata {
        let counts = largest_remainder(idx.len() as u64, &[8, 1, 1]);
        shuffle(
            &mut idx,
            &mut SplitMix64::for_stream(seed, &format!("split:{key}")),
        );
        let n_train = counts[0] as usize;
        let n_valid = counts[1] as usize;
        for (pos, &i) in idx.iter().enumerate() {
            out[i].split = Some(if pos < n_train {
                Split::Train
            } else if pos < n_train + n_valid {
                Split::Valid
            } else {
                Split::Test
            });
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub types: Vec<PatternType>,
    pub generator: GeneratorConfig,
    pub subset: Option<SubsetSize>,
    pub seed: u64,
    pub parallelism: Parallelism,
    /// Manifest file name inside the output directory.
    pub manifest_name: String,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            types: PatternType::ALL.to_vec(),
            generator: GeneratorConfig::default(),
            subset: None,
            seed: 0,
            parallelism: Parallelism::default(),
            manifest_name: MANIFEST_FILE.to_string(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BuildReport {
    pub counts: BTreeMap<PatternType, usize>,
    pub written: usize,
    pub unchanged: usize,
    pub resumed_types: Vec<PatternType>,
    pub manifest: PathBuf,
}

impl BuildReport {
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }
}

/// Builds the catalog modes of the selected types.
pub fn build(
    out_dir: &Path,
    catalog: &Catalog,
    options: &BuildOptions,
) -> Result<BuildReport, DatasetError> {
    if options.types.is_empty() {
        return Err(DatasetError::EmptySelection);
    }
    let modes: Vec<&Mode> = PatternType::ALL
        .into_iter()
        .filter(|t| options.types.contains(t))
        .flat_map(|t| catalog.of_type(t))
        .collect();
    build_modes(out_dir, &modes, options)
}

/// Builds an arbitrary list of modes (used for user-defined patterns).
pub fn build_modes(
    out_dir: &Path,
    modes: &[&Mode],
    options: &BuildOptions,
) -> Result<BuildReport, DatasetError> {
    if modes.is_empty() {
        return Err(DatasetError::EmptySelection);
    }
    let config = &options.generator;
    let instances: Vec<PatternInstance<'_>> =
        modes.iter().flat_map(|m| enumerate_instances(m)).collect();
    let records: Vec<ManifestRecord> = par::map(&instances, options.parallelism, |i| {
        ManifestRecord::for_instance(i, config)
    });

    let selected: Vec<bool> = match options.subset {
        None => vec![true; records.len()],
        Some(size) => {
            let subset = sample_subset(&records, size.spec(), options.seed)?;
            let names: std::collections::HashSet<&str> =
                subset.iter().map(|r| r.filename.as_str()).collect();
            records
                .iter()
                .map(|r| names.contains(r.filename.as_str()))
                .collect()
        }
    };
    let jobs: Vec<(&PatternInstance<'_>, &ManifestRecord)> = instances
        .iter()
        .zip(&records)
        .zip(&selected)
        .filter(|(_, &s)| s)
        .map(|(pair, _)| pair)
        .collect();

    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let state_path = out_dir.join(STATE_FILE);
    let fingerprint = fingerprint(modes, options);
    let done = read_state(&state_path, &fingerprint);
    write_state(&state_path, &fingerprint, &done)?;

    let mut report = BuildReport::default();
    let mut finished = done.clone();
    for ty in PatternType::ALL {
        let batch: Vec<_> = jobs.iter().filter(|(_, r)| r.pattern_type == ty).collect();
        if batch.is_empty() {
            continue;
        }
        report.counts.insert(ty, batch.len());
        if done.contains(&ty) {
            report.resumed_types.push(ty);
            continue;
        }
        let mut dirs: Vec<&str> = batch
            .iter()
            .map(|(_, r)| r.filename.rsplit_once('/').map_or("", |(d, _)| d))
            .collect();
        dirs.dedup();
        for d in dirs {
            let p = out_dir.join(d);
            fs::create_dir_all(&p).map_err(io_err(&p))?;
        }
        let outcomes = par::map(&batch, options.parallelism, |(inst, rec)| {
            let bytes = encode(&realize_clip(inst, config));
            write_if_changed(&out_dir.join(&rec.filename), &bytes)
        });
        for o in outcomes {
            if o? {
                report.written += 1;
            } else {
                report.unchanged += 1;
            }
        }
        finished.push(ty);
        write_state(&state_path, &fingerprint, &finished)?;
    }

    let kept: Vec<ManifestRecord> = records
        .into_iter()
        .zip(selected)
        .filter(|(_, s)| *s)
        .map(|(r, _)| r)
        .collect();
    let manifest = out_dir.join(&options.manifest_name);
    write_manifest(&manifest, &split(&kept, options.seed))?;
    fs::remove_file(&state_path).map_err(io_err(&state_path))?;
    report.manifest = manifest;
    Ok(report)
}

/// Returns whether the file was (re)written.
fn write_if_changed(path: &Path, bytes: &[u8]) -> Result<bool, DatasetError> {
    if let Ok(existing) = fs::read(path) {
        if existing == bytes {
            return Ok(false);
        }
    }
    fs::write(path, bytes).map_err(io_err(path))?;
    Ok(true)
}

fn fingerprint(modes: &[&Mode], options: &BuildOptions) -> String {
    let g = &options.generator;
    let names: Vec<String> = modes
        .iter()
        .map(|m| format!("{}/{}", m.pattern_type(), m.name()))
        .collect();
    let desc = format!(
        "tempo={};velocity={};short_final_chord={};subset={:?};seed={};manifest={};modes={}",
        g.tempo_bpm,
        g.velocity,
        g.short_final_chord,
        options.subset.map(SubsetSize::as_str),
        options.seed,
        options.manifest_name,
        names.join(",")
    );
    format!("{:016x}", fnv1a64(desc.as_bytes()))
}

fn read_state(path: &Path, fingerprint: &str) -> Vec<PatternType> {
    let Ok(text) = fs::read_to_string(path) else {
        return Vec::new();
    };
    let mut lines = text.lines();
    if lines.next() != Some(&format!("fingerprint={fingerprint}")) {
        return Vec::new();
    }
    lines
        .filter_map(|l| l.strip_prefix("done="))
        .filter_map(|t| t.parse().ok())
        .collect()
}

fn write_state(path: &Path, fingerprint: &str, done: &[PatternType]) -> Result<(), DatasetError> {
    let mut text = format!("fingerprint={fingerprint}\n");
    for t in done {
        text.push_str(&format!("done={t}\n"));
    }
    fs::write(path, text).map_err(io_err(path))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Section {
    Counts,
    Modes,
    Durations,
    Manifest,
}

impl Section {
    pub fn as_str(self) -> &'static str {
        match self {
            Section::Counts => "counts",
            Section::Modes => "modes",
            Section::Durations => "durations",
            Section::Manifest => "manifest",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyRow {
    pub section: Section,
    pub label: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub rows: Vec<VerifyRow>,
}

impl VerifyReport {
    pub fn section(&self, s: Section) -> impl Iterator<Item = &VerifyRow> {
        self.rows.iter().filter(move |r| r.section == s)
    }

    /// (passed, total) rows in a section.
    pub fn tally(&self, s: Section) -> (usize, usize) {
        let rows: Vec<_> = self.section(s).collect();
        (rows.iter().filter(|r| r.pass).count(), rows.len())
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn row(&self, s: Section, label: &str) -> Option<&VerifyRow> {
        self.section(s).find(|r| r.label == label)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in [
            Section::Counts,
            Section::Durations,
            Section::Modes,
            Section::Manifest,
        ] {
            for r in self.section(s) {
                if s != Section::Modes || !r.pass {
                    writeln!(
                        f,
                        "{:<10} {:<24} expected {:>10}  actual {:>10}  {}",
                        s.as_str(),
                        r.label,
                        r.expected,
                        r.actual,
                        if r.pass { "PASS" } else { "FAIL" }
                    )?;
                }
            }
        }
        for s in [
            Section::Counts,
            Section::Durations,
            Section::Modes,
            Section::Manifest,
        ] {
            let (pass, total) = self.tally(s);
            writeln!(f, "{}: {pass}/{total} rows PASS", s.as_str())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub short_final_chord: bool,
    /// Decode every Nth manifest entry for the duration check.
    pub sample_every: usize,
    pub parallelism: Parallelism,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            short_final_chord: false,
            sample_every: 1,
            parallelism: Parallelism::default(),
        }
    }
}

/// Expected number of files for a builtin mode, from the published form
/// counts: dyads 2 (octave 1), triads 3, tetrads 4, diatonic scales 7,
/// pentatonic 5, progressions 4 per chord.
fn expected_mode_files(mode: &Mode) -> usize {
    let forms = match mode {
        Mode::Pattern(m) => match m.category {
            Category::Dyad if m.distances.as_slice() == [12] => 1,
            Category::Dyad => 2,
            Category::Triad => 3,
            Category::Tetrad => 4,
            Category::Diatonic => 7,
            Category::Pentatonic => 5,
            Category::Custom => m.distances.len() + 1,
        },
        Mode::Progression(p) => 4usize.pow(p.chords.len() as u32),
    };
    forms * 85
}

/// Published clip length in seconds at 60 bpm.
fn expected_seconds(mode: &Mode, short_final_chord: bool) -> f64 {
    match mode {
        Mode::Pattern(m) => match (m.pattern_type, m.category) {
            (PatternType::Chord, _) => 3.0,
            (_, Category::Dyad) => 4.0,
            (_, Category::Triad) => 5.0,
            (_, Category::Tetrad) => 6.0,
            (_, Category::Pentatonic) => 7.0,
            (_, Category::Diatonic) => 9.0,
            _ => m.distances.len() as f64 + 3.0,
        },
        Mode::Progression(p) => match (p.chords.len(), short_final_chord) {
            (3, true) => 7.0,
            (3, false) => 8.0,
            (4, _) => 10.0,
            (n, _) => 2.0 * n as f64 + 2.0,
        },
    }
}

fn count_mid_files(dir: &Path) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for entry in WalkDir::new(dir)
        .min_depth(2)
        .max_depth(2)
        .into_iter()
        .flatten()
    {
        let p = entry.path();
        if entry.file_type().is_file() && p.extension().is_some_and(|e| e == "mid") {
            if let Some(mode) = p.parent().and_then(|d| d.file_name()) {
                *out.entry(mode.to_string_lossy().into_owned()).or_default() += 1;
            }
        }
    }
    out
}

/// Recounts files on disk and decodes clips to compare against the
/// published statistics. Mismatches become failing rows, not errors.
pub fn verify(
    dir: &Path,
    catalog: &Catalog,
    options: &VerifyOptions,
) -> Result<VerifyReport, DatasetError> {
    let manifest = read_manifest(&dir.join(MANIFEST_FILE))?;
    let mut report = VerifyReport::default();
    let mut row = |section, label: &str, expected: String, actual: String| {
        let pass = expected == actual;
        report.rows.push(VerifyRow {
            section,
            label: label.to_string(),
            expected,
            actual,
            pass,
        });
    };

    let per_type: BTreeMap<PatternType, BTreeMap<String, usize>> = PatternType::ALL
        .into_iter()
        .map(|t| (t, count_mid_files(&dir.join(t.dir_name()))))
        .collect();
    let type_total = |t: PatternType| per_type[&t].values().sum::<usize>();
    let targets = [
        (PatternType::Chord, EXPECTED_CHORDS),
        (PatternType::Arpeggio, EXPECTED_ARPEGGIOS),
        (PatternType::Scale, EXPECTED_SCALES),
        (PatternType::Progression, EXPECTED_PROGRESSIONS),
    ];
    let mut total = 0;
    for (t, expected) in targets {
        let n = type_total(t);
        total += n;
        row(
            Section::Counts,
            t.dir_name(),
            expected.to_string(),
            n.to_string(),
        );
    }
    row(
        Section::Counts,
        "total",
        EXPECTED_TOTAL.to_string(),
        total.to_string(),
    );

    for mode in catalog.modes() {
        let t = mode.pattern_type();
        let n = per_type[&t].get(&mode.slug()).copied().unwrap_or(0);
        let label = format!("{}/{}", t.dir_name(), mode.slug());
        row(
            Section::Modes,
            &label,
            expected_mode_files(mode).to_string(),
            n.to_string(),
        );
    }

    row(
        Section::Manifest,
        "rows",
        total.to_string(),
        manifest.len().to_string(),
    );
    let missing = manifest
        .iter()
        .filter(|r| !dir.join(&r.filename).is_file())
        .count();
    row(
        Section::Manifest,
        "missing files",
        "0".into(),
        missing.to_string(),
    );

    let step = options.sample_every.max(1);
    let sampled: Vec<&ManifestRecord> = manifest.iter().step_by(step).collect();
    let checks = par::map(&sampled, options.parallelism, |rec| {
        let want = catalog
            .find(rec.pattern_type, &rec.mode)
            .map(|m| expected_seconds(m, options.short_final_chord));
        let got = fs::read(dir.join(&rec.filename))
            .ok()
            .and_then(|bytes| decode(&bytes).ok())
            .map(|doc| doc.duration_seconds());
        let ok = match (want, got) {
            (Some(want), Some(got)) => {
                (got - want).abs() < 1e-9 && (rec.duration_s - want).abs() < 1e-9
            }
            _ => false,
        };
        (rec.pattern_type, ok)
    });
    let mut checked: BTreeMap<PatternType, (usize, usize)> = BTreeMap::new();
    for (t, ok) in checks {
        let e = checked.entry(t).or_default();
        e.1 += 1;
        if !ok {
            e.0 += 1;
        }
    }
    for t in PatternType::ALL {
        let (bad, n) = checked.get(&t).copied().unwrap_or_default();
        row(
            Section::Durations,
            t.dir_name(),
            format!("{n}/{n}"),
            format!("{}/{n}", n - bad),
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(ty: PatternType, mode: &str, i: usize) -> ManifestRecord {
        ManifestRecord {
            filename: format!("{}/{mode}/{i}.mid", ty.dir_name()),
            pattern_type: ty,
            mode: mode.into(),
            root_name: "C4".into(),
            root_midi: 60,
            octave: 4,
            inversion: "0".into(),
            duration_s: 3.0,
            split: None,
        }
    }

    #[test]
    fn split_of_85_is_68_9_8() {
        let records: Vec<_> = (0..85)
            .map(|i| record(PatternType::Chord, "maj", i))
            .collect();
        let out = split(&records, 3);
        let count = |s| out.iter().filter(|r| r.split == Some(s)).count();
        assert_eq!(
            (count(Split::Train), count(Split::Valid), count(Split::Test)),
            (68, 9, 8)
        );
    }

    #[test]
    fn split_is_seeded() {
        let records: Vec<_> = (0..200)
            .map(|i| record(PatternType::Scale, "dorian", i))
            .collect();
        assert_eq!(split(&records, 1), split(&records, 1));
        assert_ne!(split(&records, 1), split(&records, 2));
    }

    #[test]
    fn subset_takes_prefixes() {
        let mut records: Vec<_> = (0..10)
            .map(|i| record(PatternType::Chord, "maj", i))
            .collect();
        for m in ["a", "b", "c"] {
            records.extend((0..100).map(|i| record(PatternType::Progression, m, i)));
        }
        let spec = |n| SubsetSpec {
            name: SubsetSize::Small,
            n_progressions: n,
        };
        let small = sample_subset(&records, spec(30), 9).unwrap();
        let large = sample_subset(&records, spec(90), 9).unwrap();
        assert_eq!(small.len(), 40);
        assert_eq!(large.len(), 100);
        assert!(small.iter().all(|r| large.contains(r)));
        assert!(matches!(
            sample_subset(&records, spec(301), 9),
            Err(DatasetError::InsufficientPopulation { .. })
        ));
    }

    #[test]
    fn manifest_round_trip_and_format() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let mut recs = vec![
            record(PatternType::Chord, "maj", 0),
            record(PatternType::Progression, "ii-V-I", 1),
        ];
        recs[1].split = Some(Split::Valid);
        recs[1].duration_s = 1.5;
        write_manifest(&path, &recs).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "filename,pattern_type,mode,root_name,root_midi,octave,inversion,duration_s,split"
        );
        assert_eq!(
            lines.next().unwrap(),
            "chords/maj/0.mid,chord,maj,C4,60,4,0,3,"
        );
        assert_eq!(
            lines.next().unwrap(),
            "progressions/ii-V-I/1.mid,progression,ii-V-I,C4,60,4,0,1.5,valid"
        );
        assert!(!text.contains('\r'));
        assert_eq!(read_manifest(&path).unwrap(), recs);
    }

    #[test]
    fn missing_manifest() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            verify(dir.path(), &Catalog::builtin(), &VerifyOptions::default()),
            Err(DatasetError::ManifestMissing(_))
        ));
    }

    #[test]
    fn empty_selection() {
        let dir = tempfile::tempdir().unwrap();
        let opts = BuildOptions {
            types: vec![],
            ..Default::default()
        };
        assert!(matches!(
            build(dir.path(), &Catalog::builtin(), &opts),
            Err(DatasetError::EmptySelection)
        ));
    }

    #[test]
    fn record_labels() {
        let catalog = Catalog::builtin();
        let mode = catalog
            .find(PatternType::Progression, "ii#-V#-ii-V")
            .unwrap();
        let inst = &enumerate_instances(mode)[6];
        let r = ManifestRecord::for_instance(inst, &GeneratorConfig::default());
        assert_eq!(
            r.filename,
            "progressions/iis-Vs-ii-V/C1-iis-Vs-ii-V-0-0-1-2.mid"
        );
        assert_eq!(r.mode, "ii#-V#-ii-V");
        assert_eq!((r.root_midi, r.octave), (24, 1));
        assert_eq!(r.duration_s, 10.0);
    }
}
