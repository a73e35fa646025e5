//! Timed realization of pattern instances.
//!
//! Chords sound all notes together for one beat. Arpeggios and scales play
//! one note per beat. Progressions play two chords per measure, each held
//! for two beats. Every clip ends with two beats of decay.

use crate::catalog::{Form, Mode, PatternInstance, PatternType};
use crate::theory::{invert, realize, Pitch, PitchSet, MAX_PITCH, OCTAVE};

pub const TICKS_PER_BEAT: u32 = 480;
pub const DECAY_BEATS: u32 = 2;
pub const DEFAULT_TEMPO_BPM: u32 = 60;
pub const DEFAULT_VELOCITY: u8 = 90;

/// A time position or length in beats, stored exactly as 1/480 beat ticks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Beats(u32);

impl Beats {
    pub const fn whole(beats: u32) -> Self {
        Beats(beats * TICKS_PER_BEAT)
    }

    pub const fn from_ticks(ticks: u32) -> Self {
        Beats(ticks)
    }

    pub const fn ticks(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / TICKS_PER_BEAT as f64
    }
}

impl std::ops::Add for Beats {
    type Output = Beats;

    fn add(self, rhs: Beats) -> Beats {
        Beats(self.0 + rhs.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NoteEvent {
    pub pitch: Pitch,
    pub onset: Beats,
    pub duration: Beats,
    pub velocity: u8,
}

impl NoteEvent {
    pub fn end(&self) -> Beats {
        self.onset + self.duration
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub tempo_bpm: u32,
    pub velocity: u8,
    /// Hold the last chord of a three-chord progression for one beat
    /// instead of two (7 s clips instead of 8 s).
    pub short_final_chord: bool,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            tempo_bpm: DEFAULT_TEMPO_BPM,
            velocity: DEFAULT_VELOCITY,
            short_final_chord: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clip {
    /// Sorted by onset, then pitch.
    pub events: Vec<NoteEvent>,
    pub total_beats: Beats,
    pub tempo_bpm: u32,
}

impl Clip {
    pub fn duration_seconds(&self) -> f64 {
        self.total_beats.as_f64() * 60.0 / self.tempo_bpm as f64
    }
}

/// Places a shape built on pitch 0 at `root`, dropping whole octaves when the
/// top note would leave the MIDI range.
pub fn place_shape(shape: &PitchSet, root: u8) -> Vec<Pitch> {
    let top = shape.highest().value() as i32;
    let mut shift = root as i32;
    while top + shift > MAX_PITCH as i32 {
        shift -= OCTAVE as i32;
    }
    shape
        .pitches()
        .iter()
        .map(|p| p.transpose(shift).expect("shape fits after octave folding"))
        .collect()
}

fn zero() -> Pitch {
    Pitch::new(0).unwrap()
}

/// Pitches of a chord/arpeggio/scale form, or of each chord in a progression.
pub fn instance_voicings(inst: &PatternInstance<'_>) -> Vec<Vec<Pitch>> {
    match (inst.mode, &inst.form) {
        (Mode::Pattern(m), Form::Single(k)) => {
            let root = realize(zero(), &m.distances).expect("catalog shapes fit from pitch 0");
            let shape = invert(&root, *k as usize).expect("enumerated forms are valid");
            vec![place_shape(&shape, inst.base.value())]
        }
        (Mode::Progression(p), Form::Combination(ks)) => p
            .chords
            .iter()
            .zip(ks)
            .map(|(chord, &k)| {
                let root = chord
                    .quality
                    .build(zero())
                    .expect("chord shapes fit from pitch 0");
                let shape = invert(&root, k as usize).expect("tetrad inversions are valid");
                place_shape(&shape, inst.base.value() + chord.degree_offset)
            })
            .collect(),
        _ => panic!("form does not match mode kind"),
    }
}

pub fn realize_clip(inst: &PatternInstance<'_>, config: &GeneratorConfig) -> Clip {
    let voicings = instance_voicings(inst);
    let velocity = config.velocity;
    let note = |pitch, onset, duration| NoteEvent {
        pitch,
        onset: Beats::whole(onset),
        duration: Beats::whole(duration),
        velocity,
    };
    let mut events = Vec::new();
    match inst.mode.pattern_type() {
        PatternType::Chord => {
            events.extend(voicings[0].iter().map(|&p| note(p, 0, 1)));
        }
        PatternType::Arpeggio | PatternType::Scale => {
            events.extend(
                voicings[0]
                    .iter()
                    .enumerate()
                    .map(|(i, &p)| note(p, i as u32, 1)),
            );
        }
        PatternType::Progression => {
            let n = voicings.len();
            for (j, chord) in voicings.iter().enumerate() {
                let hold = if j + 1 == n && short_final(n, config) {
                    1
                } else {
                    2
                };
                events.extend(chord.iter().map(|&p| note(p, 2 * j as u32, hold)));
            }
        }
    }
    let last = events.iter().map(NoteEvent::end).max().unwrap_or_default();
    Clip {
        events,
        total_beats: last + Beats::whole(DECAY_BEATS),
        tempo_bpm: config.tempo_bpm,
    }
}

fn short_final(n_chords: usize, config: &GeneratorConfig) -> bool {
    config.short_final_chord && n_chords == 3
}

/// Clip length in seconds, from the instance's category alone.
pub fn clip_duration_seconds(inst: &PatternInstance<'_>, config: &GeneratorConfig) -> f64 {
    let beats = match inst.mode {
        Mode::Pattern(m) => match m.pattern_type {
            PatternType::Chord => 1,
            _ => m.distances.len() as u32 + 1,
        },
        Mode::Progression(p) => {
            let n = p.chords.len() as u32;
            if short_final(p.chords.len(), config) {
                2 * n - 1
            } else {
                2 * n
            }
        }
    } + DECAY_BEATS;
    beats as f64 * 60.0 / config.tempo_bpm as f64
}
