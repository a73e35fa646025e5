//! Pitch arithmetic and distance-based pattern realization.
//!
//! A pattern is described by the semitone distances between successive
//! notes. Realizing it from a base pitch is a prefix sum; inversions lift
//! the lowest notes by an octave.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub const MAX_PITCH: u8 = 127;
pub const OCTAVE: u8 = 12;

const NOTE_NAMES: [&str; 12] = [
    "C", "Cs", "D", "Ds", "E", "F", "Fs", "G", "Gs", "A", "As", "B",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error("pitch {0} is outside the MIDI range 0-127")]
    RangeExceeded(i32),
    #[error("invalid distance {value} at index {index}: distances must be at least 1")]
    InvalidDistance { index: usize, value: i32 },
    #[error("distance vector has {0} entries; at most 11 are allowed")]
    TooManyDistances(usize),
    #[error("pitches must be strictly ascending (violated at index {0})")]
    OrderingViolated(usize),
    #[error("inversion {inversion} duplicates a pitch")]
    DegenerateInversion { inversion: usize },
    #[error("inversion {inversion} is out of range for a {len}-note set")]
    InversionOutOfRange { inversion: usize, len: usize },
    #[error("alteration needs at least {needed} notes, got {got}")]
    TooFewNotes { needed: usize, got: usize },
    #[error("empty pitch set")]
    Empty,
    #[error("cannot parse note name {0:?}")]
    BadNoteName(String),
}

pub type Result<T, E = TheoryError> = std::result::Result<T, E>;

/// A MIDI pitch number, 0-127. Middle C (C4) is 60.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pitch(u8);

impl Pitch {
    pub fn new(value: i32) -> Result<Self> {
        if (0..=MAX_PITCH as i32).contains(&value) {
            Ok(Pitch(value as u8))
        } else {
            Err(TheoryError::RangeExceeded(value))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    /// Scientific octave number; C4 = 60, so MIDI 0 is in octave -1.
    pub fn octave(self) -> i32 {
        self.0 as i32 / 12 - 1
    }

    pub fn pitch_class(self) -> u8 {
        self.0 % 12
    }

    /// Sharps-only, filesystem-safe name: 60 -> "C4", 61 -> "Cs4".
    pub fn name(self) -> String {
        format!(
            "{}{}",
            NOTE_NAMES[self.pitch_class() as usize],
            self.octave()
        )
    }

    pub fn transpose(self, semitones: i32) -> Result<Self> {
        Pitch::new(self.0 as i32 + semitones)
    }
}

/// Free-function form of [`Pitch::name`].
pub fn note_name(p: Pitch) -> String {
    p.name()
}

impl fmt::Display for Pitch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Pitch {
    type Err = TheoryError;

    /// Parses names produced by [`Pitch::name`]. `#` is accepted as a
    /// synonym for `s`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || TheoryError::BadNoteName(s.to_string());
        let split = s
            .char_indices()
            .find(|&(_, c)| c == '-' || c.is_ascii_digit())
            .map(|(i, _)| i)
            .ok_or_else(bad)?;
        let (letter, octave) = s.split_at(split);
        let letter = letter.replace('#', "s");
        let class = NOTE_NAMES
            .iter()
            .position(|&n| n == letter)
            .ok_or_else(bad)?;
        let octave: i32 = octave.parse().map_err(|_| bad())?;
        Pitch::new((octave + 1) * 12 + class as i32).map_err(|_| bad())
    }
}

/// Ascending semitone distances between successive notes of a pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DistanceVector(Vec<u8>);

impl DistanceVector {
    pub const MAX_LEN: usize = 11;

    pub fn new<I>(distances: I) -> Result<Self>
    where
        I: IntoIterator,
        I::Item: Into<i32>,
    {
        let mut out = Vec::new();
        for (index, d) in distances.into_iter().enumerate() {
            let value = d.into();
            if !(1..=MAX_PITCH as i32).contains(&value) {
                return Err(TheoryError::InvalidDistance { index, value });
            }
            out.push(value as u8);
        }
        if out.len() > Self::MAX_LEN {
            return Err(TheoryError::TooManyDistances(out.len()));
        }
        Ok(DistanceVector(out))
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total span from the lowest to the highest note.
    pub fn span(&self) -> u32 {
        self.0.iter().map(|&d| d as u32).sum()
    }
}

impl fmt::Display for DistanceVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u8::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl FromStr for DistanceVector {
    type Err = TheoryError;

    /// Comma-separated integers, e.g. `4,3`.
    fn from_str(s: &str) -> Result<Self> {
        let mut values = Vec::new();
        for (index, part) in s.split(',').enumerate() {
            let value: i32 = part
                .trim()
                .parse()
                .map_err(|_| TheoryError::InvalidDistance { index, value: 0 })?;
            values.push(value);
        }
        DistanceVector::new(values)
    }
}

/// A strictly ascending, non-empty set of pitches.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PitchSet(Vec<Pitch>);

impl PitchSet {
    pub fn new(pitches: Vec<Pitch>) -> Result<Self> {
        if pitches.is_empty() {
            return Err(TheoryError::Empty);
        }
        if let Some(i) = pitches.windows(2).position(|w| w[0] >= w[1]) {
            return Err(TheoryError::OrderingViolated(i + 1));
        }
        Ok(PitchSet(pitches))
    }

    pub fn pitches(&self) -> &[Pitch] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn lowest(&self) -> Pitch {
        self.0[0]
    }

    pub fn highest(&self) -> Pitch {
        self.0[self.0.len() - 1]
    }

    pub fn transpose(&self, semitones: i32) -> Result<Self> {
        let pitches = self
            .0
            .iter()
            .map(|p| p.transpose(semitones))
            .collect::<Result<Vec<_>>>()?;
        Ok(PitchSet(pitches))
    }

    pub fn into_vec(self) -> Vec<Pitch> {
        self.0
    }
}

/// Builds `[base, base+d0, base+d0+d1, ...]`.
pub fn realize(base: Pitch, distances: &DistanceVector) -> Result<PitchSet> {
    let mut pitches = Vec::with_capacity(distances.len() + 1);
    let mut current = base;
    pitches.push(current);
    for &d in distances.as_slice() {
        current = current.transpose(d as i32)?;
        pitches.push(current);
    }
    Ok(PitchSet(pitches))
}

/// Inversion `k`: the lowest `k` notes are lifted an octave and moved to the top.
///
/// Lifting that lands on an existing pitch (the octave dyad) is rejected as
/// degenerate, and so is any result that is no longer ascending.
pub fn invert(set: &PitchSet, k: usize) -> Result<PitchSet> {
    let len = set.len();
    if k >= len {
        return Err(TheoryError::InversionOutOfRange { inversion: k, len });
    }
    if k == 0 {
        return Ok(set.clone());
    }
    let mut pitches = Vec::with_capacity(len);
    pitches.extend_from_slice(&set.0[k..]);
    for p in &set.0[..k] {
        pitches.push(p.transpose(OCTAVE as i32)?);
    }
    let mut seen = [false; 128];
    for p in &pitches {
        if std::mem::replace(&mut seen[p.value() as usize], true) {
            return Err(TheoryError::DegenerateInversion { inversion: k });
        }
    }
    PitchSet::new(pitches)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Extension {
    /// Adds a note three semitones above the third note.
    Dom7,
    /// Adds a note four semitones above the third note.
    Maj7,
}

impl Extension {
    fn interval(self) -> i32 {
        match self {
            Extension::Dom7 => 3,
            Extension::Maj7 => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Alteration {
    /// Lowers the third note (the fifth of a triad) by a semitone.
    Flat5,
}

pub fn apply_extension(set: &PitchSet, ext: Extension) -> Result<PitchSet> {
    if set.len() < 3 {
        return Err(TheoryError::TooFewNotes {
            needed: 3,
            got: set.len(),
        });
    }
    let added = set.0[2].transpose(ext.interval())?;
    let mut pitches = set.0.clone();
    pitches.push(added);
    PitchSet::new(pitches)
}

pub fn apply_alteration(set: &PitchSet, alt: Alteration) -> Result<PitchSet> {
    match alt {
        Alteration::Flat5 => {
            if set.len() < 3 {
                return Err(TheoryError::TooFewNotes {
                    needed: 3,
                    got: set.len(),
                });
            }
            let mut pitches = set.0.clone();
            pitches[2] = pitches[2].transpose(-1)?;
            PitchSet::new(pitches)
        }
    }
}
