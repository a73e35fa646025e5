//! Deterministic generation of fundamental jazz piano patterns.
//!
//! Patterns (chords, arpeggios, scales and Roman-numeral progressions) are
//! described by the semitone distances between their notes, realized in
//! every key and inversion, and written out as Standard MIDI Files with a
//! labeled CSV manifest.

pub mod catalog;
pub mod dataset;
pub mod generator;
pub mod midi;
pub mod par;
pub mod rng;
pub mod theory;

pub use catalog::{
    builtin_modes, builtin_progressions, enumerate_instances, parse_progression, Catalog, Form,
    Mode, PatternInstance, PatternMode, PatternType, ProgressionMode, Quality,
};
pub use generator::{realize_clip, Clip, GeneratorConfig, NoteEvent};
pub use midi::{decode, encode, SmfDocument};
pub use theory::{invert, realize, DistanceVector, Pitch, PitchSet};
