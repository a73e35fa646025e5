use std::collections::HashMap;

use jazznet::generator::instance_voicings;
use jazznet::{
    decode, encode, enumerate_instances, realize_clip, Catalog, Form, GeneratorConfig, Mode,
    PatternType, Pitch,
};
use proptest::prelude::*;

const HEADER: [u8; 14] = [b'M', b'T', b'h', b'd', 0, 0, 0, 6, 0, 0, 0, 1, 0x01, 0xE0];
const PRELUDE: [u8; 10] = [0x00, 0xFF, 0x51, 0x03, 0x0F, 0x42, 0x40, 0x00, 0xC0, 0x00];
const EOT: [u8; 3] = [0xFF, 0x2F, 0x00];
const ON: u8 = 0x90;
const OFF: u8 = 0x80;

/// Wraps literal track events into a complete file.
fn smf(events: &[&[u8]]) -> Vec<u8> {
    let mut track = PRELUDE.to_vec();
    for e in events {
        track.extend_from_slice(e);
    }
    let mut out = HEADER.to_vec();
    out.extend_from_slice(b"MTrk");
    out.extend_from_slice(&(track.len() as u32).to_be_bytes());
    out.extend(track);
    out
}

fn clip_bytes(
    ty: PatternType,
    mode: &str,
    base: i32,
    form: Form,
    config: &GeneratorConfig,
) -> Vec<u8> {
    let catalog = Catalog::builtin();
    let mode = catalog.find(ty, mode).unwrap();
    let inst = enumerate_instances(mode)
        .into_iter()
        .find(|i| i.base == Pitch::new(base).unwrap() && i.form == form)
        .unwrap();
    encode(&realize_clip(&inst, config))
}

#[test]
fn golden_chord() {
    let got = clip_bytes(
        PatternType::Chord,
        "maj",
        60,
        Form::Single(0),
        &GeneratorConfig::default(),
    );
    let want = smf(&[
        &[0x00, ON, 60, 90],
        &[0x00, ON, 64, 90],
        &[0x00, ON, 67, 90],
        &[0x83, 0x60, OFF, 60, 0],
        &[0x00, OFF, 64, 0],
        &[0x00, OFF, 67, 0],
        &[0x87, 0x40],
        &EOT,
    ]);
    assert_eq!(got, want);
}

#[test]
fn golden_chord_first_inversion() {
    let got = clip_bytes(
        PatternType::Chord,
        "maj",
        60,
        Form::Single(1),
        &GeneratorConfig::default(),
    );
    let want = smf(&[
        &[0x00, ON, 64, 90],
        &[0x00, ON, 67, 90],
        &[0x00, ON, 72, 90],
        &[0x83, 0x60, OFF, 64, 0],
        &[0x00, OFF, 67, 0],
        &[0x00, OFF, 72, 0],
        &[0x87, 0x40],
        &EOT,
    ]);
    assert_eq!(got, want);
}

#[test]
fn golden_arpeggio() {
    let got = clip_bytes(
        PatternType::Arpeggio,
        "maj",
        60,
        Form::Single(0),
        &GeneratorConfig::default(),
    );
    let want = smf(&[
        &[0x00, ON, 60, 90],
        &[0x83, 0x60, OFF, 60, 0],
        &[0x00, ON, 64, 90],
        &[0x83, 0x60, OFF, 64, 0],
        &[0x00, ON, 67, 90],
        &[0x83, 0x60, OFF, 67, 0],
        &[0x87, 0x40],
        &EOT,
    ]);
    assert_eq!(got, want);
}

#[test]
fn golden_scale() {
    let got = clip_bytes(
        PatternType::Scale,
        "pentatonic",
        60,
        Form::Single(0),
        &GeneratorConfig::default(),
    );
    let want = smf(&[
        &[0x00, ON, 60, 90],
        &[0x83, 0x60, OFF, 60, 0],
        &[0x00, ON, 62, 90],
        &[0x83, 0x60, OFF, 62, 0],
        &[0x00, ON, 64, 90],
        &[0x83, 0x60, OFF, 64, 0],
        &[0x00, ON, 67, 90],
        &[0x83, 0x60, OFF, 67, 0],
        &[0x00, ON, 69, 90],
        &[0x83, 0x60, OFF, 69, 0],
        &[0x87, 0x40],
        &EOT,
    ]);
    assert_eq!(got, want);
}

#[test]
fn golden_progression() {
    let form = Form::Combination(vec![0, 0, 0]);
    let got = clip_bytes(
        PatternType::Progression,
        "ii-V-I",
        60,
        form.clone(),
        &GeneratorConfig::default(),
    );
    // Dm7, G7, Cmaj7, two beats each, then two beats of decay
    let want = smf(&[
        &[0x00, ON, 62, 90],
        &[0x00, ON, 65, 90],
        &[0x00, ON, 69, 90],
        &[0x00, ON, 72, 90],
        &[0x87, 0x40, OFF, 62, 0],
        &[0x00, OFF, 65, 0],
        &[0x00, OFF, 69, 0],
        &[0x00, OFF, 72, 0],
        &[0x00, ON, 67, 90],
        &[0x00, ON, 71, 90],
        &[0x00, ON, 74, 90],
        &[0x00, ON, 77, 90],
        &[0x87, 0x40, OFF, 67, 0],
        &[0x00, OFF, 71, 0],
        &[0x00, OFF, 74, 0],
        &[0x00, OFF, 77, 0],
        &[0x00, ON, 60, 90],
        &[0x00, ON, 64, 90],
        &[0x00, ON, 67, 90],
        &[0x00, ON, 71, 90],
        &[0x87, 0x40, OFF, 60, 0],
        &[0x00, OFF, 64, 0],
        &[0x00, OFF, 67, 0],
        &[0x00, OFF, 71, 0],
        &[0x87, 0x40],
        &EOT,
    ]);
    assert_eq!(got, want);

    // with a one-beat final chord the last offs and the end move 480 ticks earlier
    let short = GeneratorConfig {
        short_final_chord: true,
        ..GeneratorConfig::default()
    };
    let doc = decode(&clip_bytes(
        PatternType::Progression,
        "ii-V-I",
        60,
        form,
        &short,
    ))
    .unwrap();
    assert_eq!(doc.end_tick(), Some(3360));
    assert_eq!(doc.duration_seconds(), 7.0);
}

#[test]
fn tempo_follows_config() {
    let config = GeneratorConfig {
        tempo_bpm: 120,
        ..GeneratorConfig::default()
    };
    let doc = decode(&clip_bytes(
        PatternType::Chord,
        "maj",
        60,
        Form::Single(0),
        &config,
    ))
    .unwrap();
    assert_eq!(doc.tempo(), Some(500_000));
    assert_eq!(doc.duration_seconds(), 1.5);
}

fn all_instances(catalog: &Catalog) -> Vec<jazznet::PatternInstance<'_>> {
    catalog
        .modes()
        .iter()
        .flat_map(enumerate_instances)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn decode_inverts_encode(pick in any::<prop::sample::Index>(), tempo in 20u32..=300, velocity in 1u8..=127, short in any::<bool>()) {
        let catalog = Catalog::builtin();
        let instances = all_instances(&catalog);
        let inst = &instances[pick.index(instances.len())];
        let config = GeneratorConfig { tempo_bpm: tempo, velocity, short_final_chord: short };
        let clip = realize_clip(inst, &config);
        let doc = decode(&encode(&clip)).unwrap();
        prop_assert_eq!(doc.to_clip().unwrap(), clip.clone());
        prop_assert_eq!(doc.to_bytes(), encode(&clip));
    }
}

/// Distinct clips never share bytes. Distinct catalog instances can still
/// produce the same clip: rotations of one diatonic scale are other modes,
/// dyad inversions are complementary dyads, dim7 and aug are symmetric, and
/// octave folding at the top of the range merges some progressions.
#[test]
fn encoding_separates_distinct_clips() {
    let catalog = Catalog::builtin();
    let config = GeneratorConfig::default();
    let mut seen: HashMap<Vec<u8>, jazznet::Clip> = HashMap::new();
    let mut instances = 0;
    for inst in all_instances(&catalog) {
        instances += 1;
        let clip = realize_clip(&inst, &config);
        let bytes = encode(&clip);
        if let Some(prev) = seen.get(&bytes) {
            assert_eq!(prev, &clip, "{} {}", inst.mode.name(), inst.form);
        } else {
            seen.insert(bytes, clip);
        }
    }
    assert_eq!(instances, 162_520);
    assert!(seen.len() < instances);
}

#[test]
fn known_coincident_instances() {
    let config = GeneratorConfig::default();
    let bytes = |ty, mode, base, k| clip_bytes(ty, mode, base, Form::Single(k), &config);
    // C ionian from its second degree is D dorian
    assert_eq!(
        bytes(PatternType::Scale, "ionian", 60, 1),
        bytes(PatternType::Scale, "dorian", 62, 0)
    );
    // the first inversion of a minor second is a major seventh
    assert_eq!(
        bytes(PatternType::Chord, "min2", 60, 1),
        bytes(PatternType::Chord, "maj7_2", 61, 0)
    );
}

#[test]
fn chord_and_arpeggio_share_pitches() {
    let catalog = Catalog::builtin();
    let config = GeneratorConfig::default();
    for chord in catalog.of_type(PatternType::Chord) {
        let arp = catalog.find(PatternType::Arpeggio, chord.name()).unwrap();
        let a = enumerate_instances(chord);
        let b = enumerate_instances(arp);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            let mut px: Vec<Pitch> = realize_clip(x, &config)
                .events
                .iter()
                .map(|e| e.pitch)
                .collect();
            let mut py: Vec<Pitch> = realize_clip(y, &config)
                .events
                .iter()
                .map(|e| e.pitch)
                .collect();
            px.sort();
            py.sort();
            assert_eq!(px, py, "{} {}", chord.name(), x.form);
        }
    }
}

#[test]
fn no_same_pitch_overlap_and_in_range() {
    let catalog = Catalog::builtin();
    let config = GeneratorConfig::default();
    for inst in all_instances(&catalog) {
        let clip = realize_clip(&inst, &config);
        let mut by_pitch: HashMap<Pitch, Vec<(u32, u32)>> = HashMap::new();
        for e in &clip.events {
            assert!(e.pitch.value() <= 127);
            by_pitch
                .entry(e.pitch)
                .or_default()
                .push((e.onset.ticks(), e.end().ticks()));
        }
        for spans in by_pitch.values_mut() {
            spans.sort();
            assert!(
                spans.windows(2).all(|w| w[0].1 <= w[1].0),
                "{} {}",
                inst.mode.name(),
                inst.form
            );
        }
    }
}

#[test]
fn folding_keeps_shape_and_only_drops_octaves() {
    let catalog = Catalog::builtin();
    let mode = catalog.find(PatternType::Scale, "ionian").unwrap();
    let inst = enumerate_instances(mode)
        .into_iter()
        .find(|i| i.base.value() == 108 && i.form == Form::Single(6))
        .unwrap();
    let got: Vec<u8> = instance_voicings(&inst)[0]
        .iter()
        .map(|p| p.value())
        .collect();
    assert_eq!(got, [107, 108, 110, 112, 113, 115, 117]);
    for m in catalog
        .modes()
        .iter()
        .filter(|m| matches!(m, Mode::Progression(_)))
    {
        for inst in enumerate_instances(m)
            .iter()
            .filter(|i| i.base.value() >= 100)
        {
            for chord in instance_voicings(inst) {
                assert!(chord.last().unwrap().value() <= 127);
            }
        }
    }
}
