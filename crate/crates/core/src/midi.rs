//! Standard MIDI File encoding and decoding.
//!
//! Output is pinned: format 0, one track, 480 ticks per quarter note, a
//! tempo meta event and a program change at tick 0, explicit status bytes
//! on every event, and end-of-track two beats after the last note-off.

use thiserror::Error;

use crate::generator::{Beats, Clip, NoteEvent, TICKS_PER_BEAT};
use crate::theory::Pitch;

pub const DIVISION: u16 = TICKS_PER_BEAT as u16;
pub const CHANNEL: u8 = 0;
pub const PROGRAM: u8 = 0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MidiError {
    #[error("malformed header at byte {offset}")]
    MalformedHeader { offset: usize },
    #[error("truncated track at byte {offset}")]
    TruncatedTrack { offset: usize },
    #[error("invalid variable-length quantity at byte {offset}")]
    InvalidVlq { offset: usize },
    #[error("data byte without running status at byte {offset}")]
    MissingStatus { offset: usize },
    #[error("expected exactly one track, found {0}")]
    TrackCount(u16),
    #[error("note-on for key {key} at tick {tick} is never released")]
    UnmatchedNote { key: u8, tick: u32 },
    #[error("data byte {value:#04x} has its high bit set at byte {offset}")]
    DataByte { offset: usize, value: u8 },
    #[error("unsupported division {0}")]
    Division(u16),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventKind {
    /// Microseconds per quarter note.
    Tempo(u32),
    EndOfTrack,
    Meta {
        kind: u8,
        data: Vec<u8>,
    },
    ProgramChange {
        channel: u8,
        program: u8,
    },
    NoteOn {
        channel: u8,
        key: u8,
        velocity: u8,
    },
    NoteOff {
        channel: u8,
        key: u8,
        velocity: u8,
    },
    /// Any other channel voice message.
    Channel {
        status: u8,
        data: Vec<u8>,
    },
    SysEx {
        status: u8,
        data: Vec<u8>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrackEvent {
    /// Absolute tick.
    pub tick: u32,
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmfDocument {
    pub format: u16,
    pub division: u16,
    pub track: Vec<TrackEvent>,
}

pub fn tempo_micros(bpm: u32) -> u32 {
    60_000_000 / bpm
}

impl SmfDocument {
    pub fn from_clip(clip: &Clip) -> Self {
        let mut notes: Vec<(u32, u8, u8, EventKind)> = Vec::with_capacity(clip.events.len() * 2);
        for e in &clip.events {
            let key = e.pitch.value();
            notes.push((
                e.onset.ticks(),
                1,
                key,
                EventKind::NoteOn {
                    channel: CHANNEL,
                    key,
                    velocity: e.velocity,
                },
            ));
            notes.push((
                e.end().ticks(),
                0,
                key,
                EventKind::NoteOff {
                    channel: CHANNEL,
                    key,
                    velocity: 0,
                },
            ));
        }
        // at equal ticks: note-offs first, then ascending pitch
        notes.sort_by_key(|&(tick, order, key, _)| (tick, order, key));

        let mut track = Vec::with_capacity(notes.len() + 3);
        track.push(TrackEvent {
            tick: 0,
            kind: EventKind::Tempo(tempo_micros(clip.tempo_bpm)),
        });
        track.push(TrackEvent {
            tick: 0,
            kind: EventKind::ProgramChange {
                channel: CHANNEL,
                program: PROGRAM,
            },
        });
        track.extend(
            notes
                .into_iter()
                .map(|(tick, _, _, kind)| TrackEvent { tick, kind }),
        );
        track.push(TrackEvent {
            tick: clip.total_beats.ticks(),
            kind: EventKind::EndOfTrack,
        });
        SmfDocument {
            format: 0,
            division: DIVISION,
            track,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut body = Vec::with_capacity(self.track.len() * 5);
        let mut last = 0;
        for ev in &self.track {
            write_vlq(&mut body, ev.tick - last);
            last = ev.tick;
            match &ev.kind {
                EventKind::Tempo(us) => {
                    body.extend([0xFF, 0x51, 0x03]);
                    body.extend(&us.to_be_bytes()[1..]);
                }
                EventKind::EndOfTrack => body.extend([0xFF, 0x2F, 0x00]),
                EventKind::Meta { kind, data } => {
                    body.extend([0xFF, *kind]);
                    write_vlq(&mut body, data.len() as u32);
                    body.extend(data);
                }
                EventKind::ProgramChange { channel, program } => {
                    body.extend([0xC0 | channel, *program])
                }
                EventKind::NoteOn {
                    channel,
                    key,
                    velocity,
                } => body.extend([0x90 | channel, *key, *velocity]),
                EventKind::NoteOff {
                    channel,
                    key,
                    velocity,
                } => body.extend([0x80 | channel, *key, *velocity]),
                EventKind::Channel { status, data } => {
                    body.push(*status);
                    body.extend(data);
                }
                EventKind::SysEx { status, data } => {
                    body.push(*status);
                    write_vlq(&mut body, data.len() as u32);
                    body.extend(data);
                }
            }
        }
        let mut out = Vec::with_capacity(22 + body.len());
        out.extend(b"MThd");
        out.extend(6u32.to_be_bytes());
        out.extend(self.format.to_be_bytes());
        out.extend(1u16.to_be_bytes());
        out.extend(self.division.to_be_bytes());
        out.extend(b"MTrk");
        out.extend((body.len() as u32).to_be_bytes());
        out.extend(body);
        out
    }

    pub fn tempo(&self) -> Option<u32> {
        self.track.iter().find_map(|e| match e.kind {
            EventKind::Tempo(us) => Some(us),
            _ => None,
        })
    }

    pub fn end_tick(&self) -> Option<u32> {
        self.track
            .iter()
            .find(|e| e.kind == EventKind::EndOfTrack)
            .map(|e| e.tick)
    }

    /// Length up to end-of-track, using the first tempo event (120 bpm if none).
    pub fn duration_seconds(&self) -> f64 {
        let ticks = self
            .end_tick()
            .unwrap_or_else(|| self.track.last().map_or(0, |e| e.tick));
        let us = self.tempo().unwrap_or(500_000);
        ticks as f64 / self.division as f64 * us as f64 / 1e6
    }

    /// Pairs note-ons with their releases. A note-on with velocity 0 counts
    /// as a release.
    pub fn note_events(&self) -> Result<Vec<NoteEvent>, MidiError> {
        if self.division as u32 != TICKS_PER_BEAT {
            return Err(MidiError::Division(self.division));
        }
        let mut open: Vec<(u8, u8, u32, u8)> = Vec::new();
        let mut out = Vec::new();
        for ev in &self.track {
            let (channel, key) = match ev.kind {
                EventKind::NoteOn {
                    channel,
                    key,
                    velocity,
                } if velocity > 0 => {
                    open.push((channel, key, ev.tick, velocity));
                    continue;
                }
                EventKind::NoteOn { channel, key, .. }
                | EventKind::NoteOff { channel, key, .. } => (channel, key),
                _ => continue,
            };
            if let Some(i) = open
                .iter()
                .position(|&(c, k, _, _)| c == channel && k == key)
            {
                let (_, key, onset, velocity) = open.remove(i);
                out.push(NoteEvent {
                    pitch: Pitch::new(key as i32).expect("data bytes are below 128"),
                    onset: Beats::from_ticks(onset),
                    duration: Beats::from_ticks(ev.tick - onset),
                    velocity,
                });
            }
        }
        if let Some(&(_, key, tick, _)) = open.first() {
            return Err(MidiError::UnmatchedNote { key, tick });
        }
        out.sort_by_key(|e| (e.onset, e.pitch));
        Ok(out)
    }

    /// Rebuilds the clip this document encodes.
    pub fn to_clip(&self) -> Result<Clip, MidiError> {
        let events = self.note_events()?;
        let us = self.tempo().unwrap_or(500_000);
        Ok(Clip {
            events,
            total_beats: Beats::from_ticks(self.end_tick().unwrap_or(0)),
            tempo_bpm: 60_000_000 / us,
        })
    }
}

pub fn encode(clip: &Clip) -> Vec<u8> {
    SmfDocument::from_clip(clip).to_bytes()
}

pub fn write_vlq(buf: &mut Vec<u8>, value: u32) {
    debug_assert!(value < 1 << 28);
    let mut started = false;
    for shift in [21u32, 14, 7] {
        let group = ((value >> shift) & 0x7F) as u8;
        if started || group != 0 {
            buf.push(group | 0x80);
            started = true;
        }
    }
    buf.push((value & 0x7F) as u8);
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    end: usize,
}

impl Reader<'_> {
    fn byte(&mut self) -> Result<u8, MidiError> {
        if self.pos >= self.end {
            return Err(MidiError::TruncatedTrack { offset: self.pos });
        }
        let b = self.bytes[self.pos];
        self.pos += 1;
        Ok(b)
    }

    fn take(&mut self, n: usize) -> Result<&[u8], MidiError> {
        if self.end - self.pos < n {
            return Err(MidiError::TruncatedTrack { offset: self.end });
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn vlq(&mut self) -> Result<u32, MidiError> {
        let start = self.pos;
        let mut value = 0u32;
        for _ in 0..4 {
            let b = self.byte()?;
            value = (value << 7) | (b & 0x7F) as u32;
            if b & 0x80 == 0 {
                return Ok(value);
            }
        }
        Err(MidiError::InvalidVlq { offset: start })
    }
}

fn be_u16(b: &[u8]) -> u16 {
    u16::from_be_bytes([b[0], b[1]])
}

fn be_u32(b: &[u8]) -> u32 {
    u32::from_be_bytes([b[0], b[1], b[2], b[3]])
}

/// Parses a single-track SMF. Running status is accepted on input.
pub fn decode(bytes: &[u8]) -> Result<SmfDocument, MidiError> {
    if bytes.len() < 14 || &bytes[0..4] != b"MThd" {
        return Err(MidiError::MalformedHeader { offset: 0 });
    }
    let header_len = be_u32(&bytes[4..8]) as usize;
    if header_len < 6 || bytes.len() < 8 + header_len {
        return Err(MidiError::MalformedHeader { offset: 4 });
    }
    let format = be_u16(&bytes[8..10]);
    let ntracks = be_u16(&bytes[10..12]);
    let division = be_u16(&bytes[12..14]);
    if format > 2 {
        return Err(MidiError::MalformedHeader { offset: 8 });
    }
    if ntracks != 1 {
        return Err(MidiError::TrackCount(ntracks));
    }
    let mut pos = 8 + header_len;
    // skip foreign chunks until the track
    loop {
        if bytes.len() < pos + 8 {
            return Err(MidiError::TruncatedTrack { offset: pos });
        }
        let len = be_u32(&bytes[pos + 4..pos + 8]) as usize;
        if &bytes[pos..pos + 4] == b"MTrk" {
            break;
        }
        pos += 8 + len;
    }
    let len = be_u32(&bytes[pos + 4..pos + 8]) as usize;
    let start = pos + 8;
    if bytes.len() < start + len {
        return Err(MidiError::TruncatedTrack {
            offset: bytes.len(),
        });
    }
    let mut r = Reader {
        bytes,
        pos: start,
        end: start + len,
    };
    let mut track = Vec::new();
    let mut tick = 0u32;
    let mut running: Option<u8> = None;
    while r.pos < r.end {
        tick += r.vlq()?;
        let status_pos = r.pos;
        let first = r.byte()?;
        let (status, first_data) = if first & 0x80 != 0 {
            (first, None)
        } else {
            match running {
                Some(s) => (s, Some(first)),
                None => return Err(MidiError::MissingStatus { offset: status_pos }),
            }
        };
        let kind = match status {
            0xFF => {
                running = None;
                let kind = r.byte()?;
                let n = r.vlq()? as usize;
                let data = r.take(n)?.to_vec();
                match (kind, data.len()) {
                    (0x51, 3) => EventKind::Tempo(be_u32(&[0, data[0], data[1], data[2]])),
                    (0x2F, 0) => EventKind::EndOfTrack,
                    _ => EventKind::Meta { kind, data },
                }
            }
            0xF0 | 0xF7 => {
                running = None;
                let n = r.vlq()? as usize;
                EventKind::SysEx {
                    status,
                    data: r.take(n)?.to_vec(),
                }
            }
            0x80..=0xEF => {
                running = Some(status);
                let n = if matches!(status & 0xF0, 0xC0 | 0xD0) {
                    1
                } else {
                    2
                };
                let mut data = Vec::with_capacity(2);
                if let Some(b) = first_data {
                    data.push(b);
                }
                while data.len() < n {
                    let offset = r.pos;
                    let b = r.byte()?;
                    if b & 0x80 != 0 {
                        return Err(MidiError::DataByte { offset, value: b });
                    }
                    data.push(b);
                }
                let channel = status & 0x0F;
                match status & 0xF0 {
                    0x90 => EventKind::NoteOn {
                        channel,
                        key: data[0],
                        velocity: data[1],
                    },
                    0x80 => EventKind::NoteOff {
                        channel,
                        key: data[0],
                        velocity: data[1],
                    },
                    0xC0 => EventKind::ProgramChange {
                        channel,
                        program: data[0],
                    },
                    _ => EventKind::Channel { status, data },
                }
            }
            _ => return Err(MidiError::MissingStatus { offset: status_pos }),
        };
        let done = kind == EventKind::EndOfTrack;
        track.push(TrackEvent { tick, kind });
        if done {
            break;
        }
    }
    Ok(SmfDocument {
        format,
        division,
        track,
    })
}
