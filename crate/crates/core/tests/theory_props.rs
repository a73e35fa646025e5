use jazznet::theory::{apply_extension, note_name, Extension, TheoryError};
use jazznet::{invert, realize, DistanceVector, Pitch, PitchSet};
use proptest::prelude::*;

/// Independent prefix-sum model of a realized pattern.
fn oracle(base: i32, distances: &[u8]) -> Option<Vec<u8>> {
    let mut out = vec![base];
    let mut acc = base;
    for &d in distances {
        acc += d as i32;
        out.push(acc);
    }
    if out.iter().all(|&p| (0..=127).contains(&p)) {
        Some(out.into_iter().map(|p| p as u8).collect())
    } else {
        None
    }
}

fn values(s: &PitchSet) -> Vec<u8> {
    s.pitches().iter().map(|p| p.value()).collect()
}

fn distances() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(1u8..=12, 0..=11)
}

/// Patterns narrower than an octave, where every rotation stays ascending.
fn compact() -> impl Strategy<Value = (u8, Vec<u8>)> {
    prop::collection::vec(1u8..=5, 1..=6)
        .prop_filter("span below an octave", |d| {
            d.iter().map(|&x| x as u32).sum::<u32>() < 12
        })
        .prop_flat_map(|d| (0u8..=100, Just(d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn realize_matches_prefix_sums(base in 0u8..=127, d in distances()) {
        let dv = DistanceVector::new(d.iter().copied()).unwrap();
        let got = realize(Pitch::new(base as i32).unwrap(), &dv);
        match oracle(base as i32, &d) {
            Some(want) => prop_assert_eq!(values(&got.unwrap()), want),
            None => prop_assert!(matches!(got, Err(TheoryError::RangeExceeded(_)))),
        }
    }

    #[test]
    fn inversion_keeps_length_and_order((base, d) in compact(), pick in 0usize..16) {
        let set = realize(Pitch::new(base as i32).unwrap(), &DistanceVector::new(d).unwrap()).unwrap();
        let k = pick % set.len();
        let inv = invert(&set, k).unwrap();
        prop_assert_eq!(inv.len(), set.len());
        prop_assert!(inv.pitches().windows(2).all(|w| w[0] < w[1]));
        let mut classes: Vec<u8> = inv.pitches().iter().map(|p| p.pitch_class()).collect();
        let mut original: Vec<u8> = set.pitches().iter().map(|p| p.pitch_class()).collect();
        classes.sort();
        original.sort();
        prop_assert_eq!(classes, original);
    }

    #[test]
    fn inversion_k_is_k_first_inversions((base, d) in compact(), pick in 0usize..16) {
        let set = realize(Pitch::new(base as i32).unwrap(), &DistanceVector::new(d).unwrap()).unwrap();
        let k = pick % set.len();
        let mut step = set.clone();
        for _ in 0..k {
            step = invert(&step, 1).unwrap();
        }
        prop_assert_eq!(invert(&set, k).unwrap(), step);
    }

    #[test]
    fn full_cycle_lifts_an_octave((base, d) in compact()) {
        let set = realize(Pitch::new(base as i32).unwrap(), &DistanceVector::new(d).unwrap()).unwrap();
        let mut step = set.clone();
        for _ in 0..set.len() {
            step = invert(&step, 1).unwrap();
        }
        prop_assert_eq!(step, set.transpose(12).unwrap());
    }

    #[test]
    fn extension_then_drop_top_is_identity(base in 0u8..=100, d in prop::collection::vec(1u8..=6, 2..=4), dom in any::<bool>()) {
        let set = realize(Pitch::new(base as i32).unwrap(), &DistanceVector::new(d).unwrap()).unwrap();
        let ext = if dom { Extension::Dom7 } else { Extension::Maj7 };
        if let Ok(extended) = apply_extension(&set, ext) {
            prop_assert_eq!(extended.len(), set.len() + 1);
            let mut pitches = extended.into_vec();
            pitches.pop();
            prop_assert_eq!(PitchSet::new(pitches).unwrap(), set);
        }
    }

    #[test]
    fn distance_vectors_reject_zero(d in prop::collection::vec(0u8..=3, 1..=11)) {
        let ok = DistanceVector::new(d.iter().copied()).is_ok();
        prop_assert_eq!(ok, !d.contains(&0));
    }
}

#[test]
fn note_names_round_trip() {
    for v in 0..=127 {
        let p = Pitch::new(v).unwrap();
        let name = note_name(p);
        assert_eq!(name.parse::<Pitch>().unwrap(), p, "{name}");
        assert_eq!(
            name.replace('s', "#").parse::<Pitch>().unwrap(),
            p,
            "{name}"
        );
    }
    assert_eq!(note_name(Pitch::new(60).unwrap()), "C4");
    assert_eq!(note_name(Pitch::new(61).unwrap()), "Cs4");
    assert_eq!(note_name(Pitch::new(0).unwrap()), "C-1");
}

#[test]
fn octave_dyad_has_no_inversion() {
    let octave = realize(Pitch::new(60).unwrap(), &"12".parse().unwrap()).unwrap();
    assert!(matches!(
        invert(&octave, 1),
        Err(TheoryError::DegenerateInversion { inversion: 1 })
    ));
}
