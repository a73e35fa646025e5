//! The fixed mode tables and the Roman-numeral progression grammar.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::theory::{
    apply_alteration, apply_extension, invert, realize, Alteration, DistanceVector, Extension,
    Pitch, PitchSet,
};

/// Base (or reference) pitches every pattern is generated from.
pub const BASE_PITCHES: RangeInclusive<u8> = 24..=108;
pub const N_BASE_PITCHES: usize = 85;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternType {
    Chord,
    Arpeggio,
    Scale,
    Progression,
}

impl PatternType {
    pub const ALL: [PatternType; 4] = [
        PatternType::Chord,
        PatternType::Arpeggio,
        PatternType::Scale,
        PatternType::Progression,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PatternType::Chord => "chord",
            PatternType::Arpeggio => "arpeggio",
            PatternType::Scale => "scale",
            PatternType::Progression => "progression",
        }
    }

    /// Top-level directory name in a dataset tree.
    pub fn dir_name(self) -> &'static str {
        match self {
            PatternType::Chord => "chords",
            PatternType::Arpeggio => "arpeggios",
            PatternType::Scale => "scales",
            PatternType::Progression => "progressions",
        }
    }
}

impl fmt::Display for PatternType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown pattern type {0:?}")]
pub struct UnknownPatternType(pub String);

impl FromStr for PatternType {
    type Err = UnknownPatternType;

    /// Accepts singular or plural forms.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        PatternType::ALL
            .into_iter()
            .find(|p| t == p.as_str() || t == p.dir_name())
            .ok_or_else(|| UnknownPatternType(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Category {
    Dyad,
    Triad,
    Tetrad,
    Diatonic,
    Pentatonic,
    /// User-defined pattern outside the builtin families.
    Custom,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::Dyad => "dyad",
            Category::Triad => "triad",
            Category::Tetrad => "tetrad",
            Category::Diatonic => "diatonic",
            Category::Pentatonic => "pentatonic",
            Category::Custom => "custom",
        }
    }

    pub fn n_inversions(self) -> usize {
        match self {
            Category::Dyad => 1,
            Category::Triad => 2,
            Category::Tetrad => 3,
            Category::Diatonic => 6,
            Category::Pentatonic => 4,
            Category::Custom => 0,
        }
    }
}

/// A chord, arpeggio or scale family defined by its distance vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternMode {
    pub name: String,
    pub pattern_type: PatternType,
    pub category: Category,
    pub distances: DistanceVector,
    /// Count of non-root forms, including any that turn out degenerate.
    pub n_inversions: usize,
}

impl PatternMode {
    /// A user-defined pattern offered in root position and every inversion.
    pub fn custom(name: &str, pattern_type: PatternType, distances: DistanceVector) -> Self {
        let category = match (pattern_type, distances.len()) {
            (PatternType::Chord | PatternType::Arpeggio, 1) => Category::Dyad,
            (PatternType::Chord | PatternType::Arpeggio, 2) => Category::Triad,
            (PatternType::Chord | PatternType::Arpeggio, 3) => Category::Tetrad,
            (PatternType::Scale, 4) => Category::Pentatonic,
            (PatternType::Scale, 6) => Category::Diatonic,
            _ => Category::Custom,
        };
        PatternMode {
            name: name.to_string(),
            pattern_type,
            category,
            n_inversions: distances.len(),
            distances,
        }
    }

    /// Form indices (0 = root position) that yield a valid pitch set.
    pub fn valid_forms(&self) -> Vec<usize> {
        let Ok(root) = realize(Pitch::new(0).unwrap(), &self.distances) else {
            return Vec::new();
        };
        (0..=self.n_inversions)
            .filter(|&k| invert(&root, k).is_ok())
            .collect()
    }
}

/// Chord qualities available inside progressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quality {
    Maj7,
    Min7,
    Dom7,
    Min7b5,
    Dim7,
    Maj,
    Min,
}

impl Quality {
    pub fn as_str(self) -> &'static str {
        match self {
            Quality::Maj7 => "maj7",
            Quality::Min7 => "min7",
            Quality::Dom7 => "dom7",
            Quality::Min7b5 => "min7b5",
            Quality::Dim7 => "dim7",
            Quality::Maj => "maj",
            Quality::Min => "min",
        }
    }

    /// Distance vector as listed in the chord tables.
    pub fn distances(self) -> DistanceVector {
        let d: &[u8] = match self {
            Quality::Maj7 => &[4, 3, 4],
            Quality::Min7 => &[3, 4, 3],
            Quality::Dom7 => &[4, 3, 3],
            Quality::Min7b5 => &[3, 3, 4],
            Quality::Dim7 => &[3, 3, 3],
            Quality::Maj => &[4, 3],
            Quality::Min => &[3, 4],
        };
        DistanceVector::new(d.iter().copied()).unwrap()
    }

    /// Builds the chord on `root` from a triad plus extension/alteration
    /// rewrites.
    pub fn build(self, root: Pitch) -> crate::theory::Result<PitchSet> {
        let major = realize(root, &Quality::Maj.distances())?;
        let minor = realize(root, &Quality::Min.distances())?;
        match self {
            Quality::Maj => Ok(major),
            Quality::Min => Ok(minor),
            Quality::Maj7 => apply_extension(&major, Extension::Maj7),
            Quality::Dom7 => apply_extension(&major, Extension::Dom7),
            Quality::Min7 => apply_extension(&minor, Extension::Dom7),
            Quality::Min7b5 => apply_extension(
                &apply_alteration(&minor, Alteration::Flat5)?,
                Extension::Maj7,
            ),
            Quality::Dim7 => apply_extension(
                &apply_alteration(&minor, Alteration::Flat5)?,
                Extension::Dom7,
            ),
        }
    }

    pub fn n_notes(self) -> usize {
        self.distances().len() + 1
    }
}

/// One chord of a progression, positioned relative to the reference key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChordTemplate {
    /// Semitones above the reference, already reduced mod 12.
    pub degree_offset: u8,
    pub quality: Quality,
    /// Roman-numeral token, normalized (`#` for sharps).
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgressionMode {
    pub name: String,
    pub chords: Vec<ChordTemplate>,
}

impl ProgressionMode {
    /// Forms available to each chord (root position plus inversions).
    pub fn forms_per_chord(&self) -> Vec<usize> {
        self.chords.iter().map(|c| c.quality.n_notes()).collect()
    }

    pub fn n_combinations(&self) -> usize {
        self.forms_per_chord().iter().product()
    }

    pub fn offsets(&self) -> Vec<u8> {
        self.chords.iter().map(|c| c.degree_offset).collect()
    }

    pub fn qualities(&self) -> Vec<Quality> {
        self.chords.iter().map(|c| c.quality).collect()
    }

    /// Renders the progression back into grammar form.
    pub fn format(&self) -> String {
        self.chords
            .iter()
            .map(|c| c.label.as_str())
            .collect::<Vec<_>>()
            .join("-")
    }
}

impl fmt::Display for ProgressionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl FromStr for ProgressionMode {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_progression(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    EmptyToken,
    UnknownNumeral,
    DanglingSuffix(String),
    UnsupportedQuality,
    ChordCount(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse progression at token {position} ({token:?}): {}", describe_kind(.kind))]
pub struct ParseError {
    pub position: usize,
    pub token: String,
    pub kind: ParseErrorKind,
}

fn describe_kind(kind: &ParseErrorKind) -> String {
    match kind {
        ParseErrorKind::EmptyToken => "empty token".into(),
        ParseErrorKind::UnknownNumeral => "unknown Roman numeral".into(),
        ParseErrorKind::DanglingSuffix(rest) => format!("unexpected suffix {rest:?}"),
        ParseErrorKind::UnsupportedQuality => "suffix not supported on this numeral".into(),
        ParseErrorKind::ChordCount(n) => format!(
            "{n} chords; progressions need {}-{}",
            MIN_PROGRESSION_CHORDS, MAX_PROGRESSION_CHORDS
        ),
    }
}

pub const MIN_PROGRESSION_CHORDS: usize = 2;
pub const MAX_PROGRESSION_CHORDS: usize = 6;

const NUMERALS: [(&str, u8); 7] = [
    ("I", 0),
    ("II", 2),
    ("III", 4),
    ("IV", 5),
    ("V", 7),
    ("VI", 9),
    ("VII", 11),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Suffix {
    None,
    Seven,
    Maj7,
    Flat5,
}

#[derive(Debug)]
struct Token<'a> {
    tritone: bool,
    numeral: &'a str,
    upper: bool,
    degree: u8,
    sharp: bool,
    suffix: Suffix,
}

fn lex_token(position: usize, raw: &str) -> Result<Token<'_>, ParseError> {
    let err = |kind| ParseError {
        position,
        token: raw.to_string(),
        kind,
    };
    if raw.is_empty() {
        return Err(err(ParseErrorKind::EmptyToken));
    }
    let (tritone, rest) = match raw.strip_prefix("tri") {
        Some(rest) => (true, rest),
        None => (false, raw),
    };
    let len = rest
        .find(|c: char| !matches!(c, 'I' | 'V' | 'i' | 'v'))
        .unwrap_or(rest.len());
    let (numeral, rest) = rest.split_at(len);
    let upper = numeral.chars().all(|c| c.is_ascii_uppercase());
    let lower = numeral.chars().all(|c| c.is_ascii_lowercase());
    let degree = NUMERALS
        .iter()
        .find(|(n, _)| numeral.eq_ignore_ascii_case(n))
        .map(|&(_, d)| d)
        .filter(|_| upper != lower)
        .ok_or_else(|| err(ParseErrorKind::UnknownNumeral))?;
    let (sharp, rest) = match rest.strip_prefix(['#', 's']) {
        Some(rest) => (true, rest),
        None => (false, rest),
    };
    let (suffix, rest) = if let Some(r) = rest.strip_prefix("maj7") {
        (Suffix::Maj7, r)
    } else if let Some(r) = rest.strip_prefix('7') {
        (Suffix::Seven, r)
    } else if let Some(r) = rest.strip_prefix("b5") {
        (Suffix::Flat5, r)
    } else {
        (Suffix::None, rest)
    };
    if !rest.is_empty() {
        return Err(err(ParseErrorKind::DanglingSuffix(rest.to_string())));
    }
    Ok(Token {
        tritone,
        numeral,
        upper,
        degree,
        sharp,
        suffix,
    })
}

impl Token<'_> {
    fn label(&self) -> String {
        let mut s = String::new();
        if self.tritone {
            s.push_str("tri");
        }
        s.push_str(self.numeral);
        if self.sharp {
            s.push('#');
        }
        s.push_str(match self.suffix {
            Suffix::None => "",
            Suffix::Seven => "7",
            Suffix::Maj7 => "maj7",
            Suffix::Flat5 => "b5",
        });
        s
    }

    fn is_dominant_numeral(&self) -> bool {
        self.upper && self.numeral == "V"
    }
}

/// Parses a dash-separated Roman-numeral progression such as `ii-V-I`.
///
/// Quality inference: lowercase numerals are min7 and uppercase maj7;
/// `7` on an uppercase numeral makes it dom7 and `b5` on a lowercase one
/// min7b5. Uppercase V and any tritone substitute are always dom7. In a
/// progression resolving to a bare lowercase `i`, bare `ii` becomes
/// min7b5, and in four-chord progressions `i#` is dim7.
pub fn parse_progression(spec: &str) -> Result<ProgressionMode, ParseError> {
    let raw: Vec<&str> = spec.trim().split('-').collect();
    let tokens = raw
        .iter()
        .enumerate()
        .map(|(i, t)| lex_token(i, t.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    let n = tokens.len();
    if !(MIN_PROGRESSION_CHORDS..=MAX_PROGRESSION_CHORDS).contains(&n) {
        return Err(ParseError {
            position: 0,
            token: spec.to_string(),
            kind: ParseErrorKind::ChordCount(n),
        });
    }
    let minor_tonic = tokens
        .last()
        .is_some_and(|t| t.numeral == "i" && !t.sharp && !t.tritone && t.suffix == Suffix::None);

    let mut chords = Vec::with_capacity(n);
    for (position, t) in tokens.iter().enumerate() {
        let unsupported = || ParseError {
            position,
            token: raw[position].to_string(),
            kind: ParseErrorKind::UnsupportedQuality,
        };
        let quality = if t.tritone || t.is_dominant_numeral() {
            match t.suffix {
                Suffix::None | Suffix::Seven => Quality::Dom7,
                Suffix::Maj7 if !t.tritone => Quality::Maj7,
                _ => return Err(unsupported()),
            }
        } else if t.upper {
            match t.suffix {
                Suffix::None | Suffix::Maj7 => Quality::Maj7,
                Suffix::Seven => Quality::Dom7,
                Suffix::Flat5 => return Err(unsupported()),
            }
        } else {
            match t.suffix {
                Suffix::Flat5 => Quality::Min7b5,
                Suffix::Maj7 => return Err(unsupported()),
                Suffix::None if n == 4 && t.numeral == "i" && t.sharp => Quality::Dim7,
                Suffix::None
                    if minor_tonic && position + 1 < n && t.numeral == "ii" && !t.sharp =>
                {
                    Quality::Min7b5
                }
                Suffix::None | Suffix::Seven => Quality::Min7,
            }
        };
        let offset = t.degree + u8::from(t.sharp) + if t.tritone { 6 } else { 0 };
        chords.push(ChordTemplate {
            degree_offset: offset % 12,
            quality,
            label: t.label(),
        });
    }
    let name = chords
        .iter()
        .map(|c| c.label.as_str())
        .collect::<Vec<_>>()
        .join("-");
    Ok(ProgressionMode { name, chords })
}

/// Any mode in the catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode {
    Pattern(PatternMode),
    Progression(ProgressionMode),
}

impl Mode {
    pub fn name(&self) -> &str {
        match self {
            Mode::Pattern(m) => &m.name,
            Mode::Progression(p) => &p.name,
        }
    }

    /// Name safe for use in paths (`#` written as `s`).
    pub fn slug(&self) -> String {
        self.name().replace('#', "s")
    }

    pub fn pattern_type(&self) -> PatternType {
        match self {
            Mode::Pattern(m) => m.pattern_type,
            Mode::Progression(_) => PatternType::Progression,
        }
    }

    /// Number of distinct forms per base pitch.
    pub fn forms_per_base(&self) -> usize {
        match self {
            Mode::Pattern(m) => m.valid_forms().len(),
            Mode::Progression(p) => p.n_combinations(),
        }
    }

    pub fn n_instances(&self) -> usize {
        self.forms_per_base() * N_BASE_PITCHES
    }
}

const DYADS: [&str; 12] = [
    "min2", "maj2", "min3", "maj3", "perf4", "tritone", "perf5", "min6", "maj6", "aug6", "maj7_2",
    "octave",
];

const TRIADS: [(&str, [u8; 2]); 6] = [
    ("maj", [4, 3]),
    ("min", [3, 4]),
    ("aug", [4, 4]),
    ("dim", [3, 3]),
    ("sus2", [2, 5]),
    ("sus4", [5, 2]),
];

const TETRADS: [(&str, [u8; 3]); 6] = [
    ("dim7", [3, 3, 3]),
    ("maj7", [4, 3, 4]),
    ("min7", [3, 4, 3]),
    ("min7b5", [3, 3, 4]),
    ("seventh", [4, 3, 3]),
    ("sixth", [4, 3, 2]),
];

const SCALES: [(&str, &[u8]); 8] = [
    ("ionian", &[2, 2, 1, 2, 2, 2]),
    ("dorian", &[2, 1, 2, 2, 2, 1]),
    ("phrygian", &[1, 2, 2, 2, 1, 2]),
    ("lydian", &[2, 2, 2, 1, 2, 2]),
    ("mixolydian", &[2, 2, 1, 2, 2, 1]),
    ("aeolian", &[2, 1, 2, 2, 1, 2]),
    ("locrian", &[1, 2, 2, 1, 2, 2]),
    ("pentatonic", &[2, 2, 3, 2]),
];

pub const BUILTIN_PROGRESSIONS: [&str; 9] = [
    "ii-V-I",
    "ii-V-i",
    "ii-triV-I",
    "I-VI-ii-V",
    "i-vi-ii-V",
    "iii-VI-ii-V",
    "I-i#-ii-V",
    "I-IV7-iii-VI7",
    "ii#-V#-ii-V",
];

fn mode(name: &str, pattern_type: PatternType, category: Category, d: &[u8]) -> PatternMode {
    PatternMode {
        name: name.to_string(),
        pattern_type,
        category,
        distances: DistanceVector::new(d.iter().copied()).expect("catalog distances are valid"),
        n_inversions: category.n_inversions(),
    }
}

/// The 24 chord, 24 arpeggio and 8 scale modes.
pub fn builtin_modes() -> Vec<PatternMode> {
    let mut out = Vec::with_capacity(56);
    for ty in [PatternType::Chord, PatternType::Arpeggio] {
        for (i, name) in DYADS.iter().enumerate() {
            out.push(mode(name, ty, Category::Dyad, &[i as u8 + 1]));
        }
        for (name, d) in TRIADS {
            out.push(mode(name, ty, Category::Triad, &d));
        }
        for (name, d) in TETRADS {
            out.push(mode(name, ty, Category::Tetrad, &d));
        }
    }
    for (name, d) in SCALES {
        let category = if d.len() == 6 {
            Category::Diatonic
        } else {
            Category::Pentatonic
        };
        out.push(mode(name, PatternType::Scale, category, d));
    }
    out
}

pub fn builtin_progressions() -> Vec<ProgressionMode> {
    BUILTIN_PROGRESSIONS
        .iter()
        .map(|s| parse_progression(s).expect("builtin progressions parse"))
        .collect()
}

/// All 65 builtin modes in canonical order: chords, arpeggios, scales,
/// progressions.
#[derive(Debug, Clone)]
pub struct Catalog {
    modes: Vec<Mode>,
}

impl Catalog {
    pub fn builtin() -> Self {
        let mut modes: Vec<Mode> = builtin_modes().into_iter().map(Mode::Pattern).collect();
        modes.extend(builtin_progressions().into_iter().map(Mode::Progression));
        Catalog { modes }
    }

    pub fn from_modes(modes: Vec<Mode>) -> Self {
        Catalog { modes }
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn of_type(&self, ty: PatternType) -> impl Iterator<Item = &Mode> {
        self.modes.iter().filter(move |m| m.pattern_type() == ty)
    }

    pub fn find(&self, ty: PatternType, name: &str) -> Option<&Mode> {
        self.of_type(ty)
            .find(|m| m.name() == name || m.slug() == name)
    }
}

/// Which form of a mode an instance plays.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Form {
    /// Inversion index; 0 is root position.
    Single(u8),
    /// One inversion index per chord of a progression.
    Combination(Vec<u8>),
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Form::Single(k) => write!(f, "{k}"),
            Form::Combination(ks) => {
                let parts: Vec<String> = ks.iter().map(u8::to_string).collect();
                f.write_str(&parts.join("-"))
            }
        }
    }
}

/// One concrete clip: a mode played from a base pitch in one form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternInstance<'a> {
    pub mode: &'a Mode,
    pub base: Pitch,
    pub form: Form,
}

/// Every instance of `mode`, ordered by base pitch and then form.
pub fn enumerate_instances(mode: &Mode) -> Vec<PatternInstance<'_>> {
    let forms: Vec<Form> = match mode {
        Mode::Pattern(m) => m
            .valid_forms()
            .into_iter()
            .map(|k| Form::Single(k as u8))
            .collect(),
        Mode::Progression(p) => combinations(&p.forms_per_chord())
            .into_iter()
            .map(Form::Combination)
            .collect(),
    };
    let mut out = Vec::with_capacity(forms.len() * N_BASE_PITCHES);
    for base in BASE_PITCHES {
        let base = Pitch::new(base as i32).unwrap();
        for form in &forms {
            out.push(PatternInstance {
                mode,
                base,
                form: form.clone(),
            });
        }
    }
    out
}

/// Mixed-radix counting, first position most significant.
fn combinations(radices: &[usize]) -> Vec<Vec<u8>> {
    let total: usize = radices.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut digits = vec![0u8; radices.len()];
    for _ in 0..total {
        out.push(digits.clone());
        for pos in (0..digits.len()).rev() {
            digits[pos] += 1;
            if (digits[pos] as usize) < radices[pos] {
                break;
            }
            digits[pos] = 0;
        }
    }
    out
}
