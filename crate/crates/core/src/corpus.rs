//! CSV file formats and corpus loading.
//!
//! | file                | header                                   |
//! |---------------------|------------------------------------------|
//! | manifest            | `clip_id,label,identity,source_video,n_frames` |
//! | visual states       | `clip_id,frame_index,state`              |
//! | audio states        | `clip_id,segment_index,state`            |
//! | auxiliary block     | `clip_id,<name>_0,...,<name>_{d-1}`      |
//! | fused features      | `clip_id,label,f_0,...,f_{D-1}`          |
//!
//! Output is UTF-8 with LF line endings, rows sorted by clip id, and floats
//! printed with the shortest representation that round-trips.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::emotion::{parse_state, EmotionState, EmotionTrack, Modality};
use crate::error::{Error, Result};
use crate::fusion::{FeatureBlock, FeatureRecord, Label};

pub const MANIFEST_HEADER: [&str; 5] = ["clip_id", "label", "identity", "source_video", "n_frames"];
pub const VISUAL_HEADER: [&str; 3] = ["clip_id", "frame_index", "state"];
pub const AUDIO_HEADER: [&str; 3] = ["clip_id", "segment_index", "state"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub clip_id: String,
    pub label: Label,
    pub identity: String,
    pub source_video: String,
    pub n_frames: usize,
}

/// Post-split clip inventory. Entries are kept sorted by clip id.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CorpusManifest {
    entries: Vec<ManifestEntry>,
}

impl CorpusManifest {
    pub fn new(mut entries: Vec<ManifestEntry>) -> Result<Self> {
        entries.sort_by(|a, b| a.clip_id.cmp(&b.clip_id));
        for pair in entries.windows(2) {
            if pair[0].clip_id == pair[1].clip_id {
                return Err(Error::InvalidConfig(format!(
                    "duplicate clip id `{}`",
                    pair[0].clip_id
                )));
            }
        }
        if let Some(e) = entries.iter().find(|e| e.n_frames == 0) {
            return Err(Error::InvalidConfig(format!(
                "clip `{}` has zero frames",
                e.clip_id
            )));
        }
        Ok(CorpusManifest { entries })
    }

    pub fn entries(&self) -> &[ManifestEntry] {
        &self.entries
    }

    pub fn get(&self, clip_id: &str) -> Option<&ManifestEntry> {
        self.entries
            .binary_search_by(|e| e.clip_id.as_str().cmp(clip_id))
            .ok()
            .map(|i| &self.entries[i])
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub manifest: CorpusManifest,
    pub visual: BTreeMap<String, EmotionTrack>,
    pub audio: BTreeMap<String, EmotionTrack>,
    pub blocks: Vec<FeatureBlock>,
}

impl Corpus {
    pub fn block(&self, name: &str) -> Option<&FeatureBlock> {
        self.blocks.iter().find(|b| b.name == name)
    }
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader)
}

fn csv_error(path: &Path, err: csv::Error) -> Error {
    let line = err.position().map_or(0, |p| p.line());
    Error::parse(path, line, err.to_string())
}

fn check_header<R: Read>(rdr: &mut csv::Reader<R>, path: &Path, expected: &[&str]) -> Result<()> {
    let header = rdr.headers().map_err(|e| csv_error(path, e))?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(Error::parse(
            path,
            1,
            format!(
                "expected header `{}`, found `{}`",
                expected.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    Ok(())
}

fn open(path: &Path) -> Result<fs::File> {
    fs::File::open(path).map_err(|e| Error::io(path, e))
}

pub fn parse_manifest<R: Read>(reader: R, path: &Path) -> Result<CorpusManifest> {
    let mut rdr = csv_reader(reader);
    check_header(&mut rdr, path, &MANIFEST_HEADER)?;
    let mut entries = Vec::new();
    let mut seen = HashSet::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let clip_id = record[0].to_string();
        if clip_id.is_empty() {
            return Err(Error::parse(path, line, "empty clip_id"));
        }
        let label = Label::parse(&record[1]).ok_or_else(|| {
            Error::parse(
                path,
                line,
                format!(
                    "label must be deceptive or truthful, found `{}`",
                    &record[1]
                ),
            )
        })?;
        let n_frames: usize = record[4]
            .parse()
            .map_err(|_| Error::parse(path, line, format!("invalid n_frames `{}`", &record[4])))?;
        if n_frames == 0 {
            return Err(Error::parse(path, line, "n_frames must be at least 1"));
        }
        if !seen.insert(clip_id.clone()) {
            return Err(Error::parse(
                path,
                line,
                format!("duplicate clip_id `{clip_id}`"),
            ));
        }
        entries.push(ManifestEntry {
            clip_id,
            label,
            identity: record[2].to_string(),
            source_video: record[3].to_string(),
            n_frames,
        });
    }
    CorpusManifest::new(entries)
}

/// Parses a visual or audio states file into one track per clip.
pub fn parse_tracks<R: Read>(
    reader: R,
    path: &Path,
    modality: Modality,
) -> Result<BTreeMap<String, EmotionTrack>> {
    let header = match modality {
        Modality::Visual => &VISUAL_HEADER,
        Modality::Audio => &AUDIO_HEADER,
    };
    let mut rdr = csv_reader(reader);
    check_header(&mut rdr, path, header)?;

    let mut raw: BTreeMap<String, Vec<(usize, EmotionState, u64)>> = BTreeMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let index: usize = record[1].parse().map_err(|_| {
            Error::parse(
                path,
                line,
                format!("invalid {} `{}`", header[1], &record[1]),
            )
        })?;
        let state = parse_state(&record[2]).map_err(|e| Error::parse(path, line, e.to_string()))?;
        raw.entry(record[0].to_string())
            .or_default()
            .push((index, state, line));
    }

    let mut tracks = BTreeMap::new();
    for (clip_id, mut rows) in raw {
        rows.sort_by_key(|&(idx, _, line)| (idx, line));
        let mut states = Vec::with_capacity(rows.len());
        for (expected, &(idx, state, line)) in rows.iter().enumerate() {
            if idx != expected {
                return Err(Error::parse(
                    path,
                    line,
                    format!("clip `{clip_id}`: {} {idx} breaks the dense 0-based sequence (expected {expected})", header[1]),
                ));
            }
            states.push(state);
        }
        let track = match modality {
            Modality::Visual => EmotionTrack::visual(clip_id.clone(), states),
            Modality::Audio => EmotionTrack::audio(clip_id.clone(), states),
        };
        tracks.insert(clip_id, track);
    }
    Ok(tracks)
}

/// Parses an auxiliary block. The dimension comes from the header width.
pub fn parse_block<R: Read>(reader: R, path: &Path, name: &str) -> Result<FeatureBlock> {
    let mut rdr = csv_reader(reader);
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.get(0) != Some("clip_id") || header.len() < 2 {
        return Err(Error::parse(
            path,
            1,
            "expected header `clip_id,<name>_0,...`",
        ));
    }
    let mut block = FeatureBlock::new(name, header.len() - 1);
    let mut seen = HashSet::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let clip_id = &record[0];
        if !seen.insert(clip_id.to_string()) {
            return Err(Error::parse(
                path,
                line,
                format!("duplicate clip_id `{clip_id}`"),
            ));
        }
        let row = parse_floats(record.iter().skip(1), path, line)?;
        block.insert(clip_id, row)?;
    }
    Ok(block)
}

fn parse_floats<'a>(
    fields: impl Iterator<Item = &'a str>,
    path: &Path,
    line: u64,
) -> Result<Vec<f64>> {
    fields
        .map(|f| match f.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(Error::parse(
                path,
                line,
                format!("expected a finite number, found `{f}`"),
            )),
        })
        .collect()
}

/// Parses a fused-features file. Identities are not stored there and come
/// back empty; join with the manifest to restore them.
pub fn parse_fused<R: Read>(reader: R, path: &Path) -> Result<Vec<FeatureRecord>> {
    let mut rdr = csv_reader(reader);
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.get(0) != Some("clip_id") || header.get(1) != Some("label") {
        return Err(Error::parse(
            path,
            1,
            "expected header `clip_id,label,f_0,...`",
        ));
    }
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let label = match &record[1] {
            "1" => Label::Deceptive,
            "0" => Label::Truthful,
            other => {
                return Err(Error::parse(
                    path,
                    line,
                    format!("label must be 0 or 1, found `{other}`"),
                ))
            }
        };
        if !seen.insert(record[0].to_string()) {
            return Err(Error::parse(
                path,
                line,
                format!("duplicate clip_id `{}`", &record[0]),
            ));
        }
        records.push(FeatureRecord {
            clip_id: record[0].to_string(),
            label,
            identity: String::new(),
            features: parse_floats(record.iter().skip(2), path, line)?,
        });
    }
    records.sort_by(|a, b| a.clip_id.cmp(&b.clip_id));
    Ok(records)
}

pub fn read_manifest(path: &Path) -> Result<CorpusManifest> {
    parse_manifest(open(path)?, path)
}

pub fn read_tracks(path: &Path, modality: Modality) -> Result<BTreeMap<String, EmotionTrack>> {
    parse_tracks(open(path)?, path, modality)
}

pub fn read_block(path: &Path, name: &str) -> Result<FeatureBlock> {
    parse_block(open(path)?, path, name)
}

pub fn read_fused(path: &Path) -> Result<Vec<FeatureRecord>> {
    parse_fused(open(path)?, path)
}

/// Loads and cross-validates a corpus. Each file is parsed on its own thread.
pub fn load_corpus(
    manifest_path: &Path,
    visual_path: &Path,
    audio_path: Option<&Path>,
    aux_paths: &[(String, PathBuf)],
) -> Result<Corpus> {
    let (manifest, visual, audio, blocks) = std::thread::scope(|scope| {
        let manifest = scope.spawn(|| read_manifest(manifest_path));
        let visual = scope.spawn(|| read_tracks(visual_path, Modality::Visual));
        let audio = scope.spawn(|| {
            audio_path
                .map(|p| read_tracks(p, Modality::Audio))
                .transpose()
        });
        let blocks: Vec<_> = aux_paths
            .iter()
            .map(|(name, path)| scope.spawn(move || read_block(path, name)))
            .collect();
        (
            manifest.join().expect("manifest reader panicked"),
            visual.join().expect("visual reader panicked"),
            audio.join().expect("audio reader panicked"),
            blocks
                .into_iter()
                .map(|h| h.join().expect("block reader panicked"))
                .collect::<Vec<_>>(),
        )
    });
    let manifest = manifest?;
    let mut visual = visual?;
    let mut audio = audio?.unwrap_or_default();
    let blocks = blocks.into_iter().collect::<Result<Vec<_>>>()?;

    for entry in manifest.entries() {
        let track = visual
            .get(&entry.clip_id)
            .ok_or_else(|| Error::MissingClip {
                clip_id: entry.clip_id.clone(),
                source_name: visual_path.display().to_string(),
            })?;
        if track.len() != entry.n_frames {
            return Err(Error::LengthMismatch {
                clip_id: entry.clip_id.clone(),
                expected: entry.n_frames,
                found: track.len(),
            });
        }
    }
    for block in &blocks {
        for entry in manifest.entries() {
            if block.row(&entry.clip_id).is_none() {
                return Err(Error::MissingClip {
                    clip_id: entry.clip_id.clone(),
                    source_name: format!("feature block `{}`", block.name),
                });
            }
        }
    }
    visual.retain(|id, _| manifest.get(id).is_some());
    audio.retain(|id, _| manifest.get(id).is_some());

    Ok(Corpus {
        manifest,
        visual,
        audio,
        blocks,
    })
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(wtr: csv::Writer<Vec<u8>>) -> String {
    let bytes = wtr.into_inner().expect("in-memory csv writer");
    String::from_utf8(bytes).expect("csv output is utf-8")
}

/// Shortest decimal representation that parses back to the same value.
pub fn format_f64(v: f64) -> String {
    format!("{v}")
}

pub fn manifest_csv(manifest: &CorpusManifest) -> String {
    let mut wtr = csv_writer();
    wtr.write_record(MANIFEST_HEADER).expect("in-memory write");
    for e in manifest.entries() {
        wtr.write_record([
            e.clip_id.as_str(),
            e.label.name(),
            e.identity.as_str(),
            e.source_video.as_str(),
            &e.n_frames.to_string(),
        ])
        .expect("in-memory write");
    }
    finish(wtr)
}

pub fn tracks_csv<'a>(
    tracks: impl IntoIterator<Item = &'a EmotionTrack>,
    modality: Modality,
) -> String {
    let mut wtr = csv_writer();
    wtr.write_record(match modality {
        Modality::Visual => VISUAL_HEADER,
        Modality::Audio => AUDIO_HEADER,
    })
    .expect("in-memory write");
    let mut tracks: Vec<_> = tracks.into_iter().collect();
    tracks.sort_by(|a, b| a.clip_id.cmp(&b.clip_id));
    for track in tracks {
        for (i, s) in track.states.iter().enumerate() {
            wtr.write_record([track.clip_id.as_str(), &i.to_string(), s.name()])
                .expect("in-memory write");
        }
    }
    finish(wtr)
}

pub fn block_csv(block: &FeatureBlock) -> String {
    let mut wtr = csv_writer();
    let mut header = vec!["clip_id".to_string()];
    header.extend(block.column_names());
    wtr.write_record(&header).expect("in-memory write");
    for (clip_id, row) in block.rows() {
        let mut fields = vec![clip_id.to_string()];
        fields.extend(row.iter().map(|&v| format_f64(v)));
        wtr.write_record(&fields).expect("in-memory write");
    }
    finish(wtr)
}

pub fn fused_csv(records: &[FeatureRecord]) -> String {
    let mut wtr = csv_writer();
    let dim = records.first().map_or(0, |r| r.features.len());
    let mut header = vec!["clip_id".to_string(), "label".to_string()];
    header.extend((0..dim).map(|i| format!("f_{i}")));
    wtr.write_record(&header).expect("in-memory write");
    let mut sorted: Vec<&FeatureRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.clip_id.cmp(&b.clip_id));
    for r in sorted {
        let mut fields = vec![r.clip_id.clone(), r.label.as_u8().to_string()];
        fields.extend(r.features.iter().map(|&v| format_f64(v)));
        wtr.write_record(&fields).expect("in-memory write");
    }
    finish(wtr)
}

/// Writes via a temporary file in the same directory and renames it into
/// place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(contents)
        .map_err(|e| Error::io(tmp.path(), e))?;
    tmp.flush().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Writes `manifest.csv`, `visual_states.csv` and, when there is any audio,
/// `audio_states.csv` into `dir`.
pub fn write_corpus_files(dir: &Path, corpus: &Corpus) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let manifest_path = dir.join("manifest.csv");
    write_atomic(&manifest_path, manifest_csv(&corpus.manifest).as_bytes())?;
    written.push(manifest_path);
    let visual_path = dir.join("visual_states.csv");
    write_atomic(
        &visual_path,
        tracks_csv(corpus.visual.values(), Modality::Visual).as_bytes(),
    )?;
    written.push(visual_path);
    if !corpus.audio.is_empty() {
        let audio_path = dir.join("audio_states.csv");
        write_atomic(
            &audio_path,
            tracks_csv(corpus.audio.values(), Modality::Audio).as_bytes(),
        )?;
        written.push(audio_path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emotion::EmotionState::*;

    const MANIFEST: &str = "clip_id,label,identity,source_video,n_frames\n\
                            c2,truthful,bob,v2.mp4,2\n\
                            c1,deceptive,alice,v1.mp4,3\n";
    const VISUAL: &str = "clip_id,frame_index,state\n\
                          c1,0,sad\nc1,1,Sad\nc1,2,FEAR\n\
                          c2,1,happy\nc2,0,neutral\n";
    const AUDIO: &str = "clip_id,segment_index,state\nc1,0,Sad\n";

    fn p() -> &'static Path {
        Path::new("test.csv")
    }

    #[test]
    fn parses_fixture() {
        let m = parse_manifest(MANIFEST.as_bytes(), p()).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.entries()[0].clip_id, "c1");
        assert_eq!(m.get("c2").unwrap().label, Label::Truthful);

        let v = parse_tracks(VISUAL.as_bytes(), p(), Modality::Visual).unwrap();
        assert_eq!(v["c1"].states, vec![Sad, Sad, Fear]);
        assert_eq!(v["c2"].states, vec![Neutral, Happy]);
        let a = parse_tracks(AUDIO.as_bytes(), p(), Modality::Audio).unwrap();
        assert_eq!(a["c1"].modality, Modality::Audio);
    }

    #[test]
    fn manifest_errors() {
        let bad_label = "clip_id,label,identity,source_video,n_frames\nc,maybe,a,v,3\n";
        assert!(matches!(
            parse_manifest(bad_label.as_bytes(), p()),
            Err(Error::Parse { line: 2, .. })
        ));
        let zero = "clip_id,label,identity,source_video,n_frames\nc,truthful,a,v,0\n";
        assert!(matches!(
            parse_manifest(zero.as_bytes(), p()),
            Err(Error::Parse { line: 2, .. })
        ));
        let dup =
            "clip_id,label,identity,source_video,n_frames\nc,truthful,a,v,1\nc,truthful,a,v,1\n";
        assert!(matches!(
            parse_manifest(dup.as_bytes(), p()),
            Err(Error::Parse { line: 3, .. })
        ));
        let header = "id,label\nc,truthful\n";
        assert!(matches!(
            parse_manifest(header.as_bytes(), p()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn unknown_state_reports_line() {
        let bad = "clip_id,segment_index,state\nc1,0,Sad\nc1,1,bored\n";
        match parse_tracks(bad.as_bytes(), p(), Modality::Audio) {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 3);
                assert!(message.contains("bored"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sparse_indices_rejected() {
        let gap = "clip_id,frame_index,state\nc1,0,Sad\nc1,2,Sad\n";
        assert!(matches!(
            parse_tracks(gap.as_bytes(), p(), Modality::Visual),
            Err(Error::Parse { line: 3, .. })
        ));
        let dup = "clip_id,frame_index,state\nc1,0,Sad\nc1,0,Fear\n";
        assert!(parse_tracks(dup.as_bytes(), p(), Modality::Visual).is_err());
    }

    #[test]
    fn block_parsing() {
        let csv = "clip_id,me_0,me_1\nc1,1.5,-2\nc2,0,1e-3\n";
        let b = parse_block(csv.as_bytes(), p(), "me").unwrap();
        assert_eq!(b.dimension(), 2);
        assert_eq!(b.row("c2").unwrap(), &[0.0, 0.001]);
        let nan = "clip_id,me_0\nc1,NaN\n";
        assert!(matches!(
            parse_block(nan.as_bytes(), p(), "me"),
            Err(Error::Parse { line: 2, .. })
        ));
        let ragged = "clip_id,me_0,me_1\nc1,1\n";
        assert!(matches!(
            parse_block(ragged.as_bytes(), p(), "me"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn float_formatting_round_trips() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 1e21, 0.0, 123456789.12345679] {
            assert_eq!(format_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn fused_round_trip() {
        let records = vec![
            FeatureRecord {
                clip_id: "b".into(),
                label: Label::Truthful,
                identity: String::new(),
                features: vec![0.1, 2.0],
            },
            FeatureRecord {
                clip_id: "a".into(),
                label: Label::Deceptive,
                identity: String::new(),
                features: vec![1.0 / 3.0, -4.0],
            },
        ];
        let text = fused_csv(&records);
        assert!(text.starts_with("clip_id,label,f_0,f_1\na,1,"));
        let back = parse_fused(text.as_bytes(), p()).unwrap();
        assert_eq!(back[0], records[1]);
        assert_eq!(back[1], records[0]);
    }

    #[test]
    fn load_validates_lengths() {
        let dir = tempfile::tempdir().unwrap();
        let m = dir.path().join("manifest.csv");
        let v = dir.path().join("visual.csv");
        let a = dir.path().join("audio.csv");
        fs::write(&m, MANIFEST).unwrap();
        fs::write(&v, VISUAL).unwrap();
        fs::write(&a, AUDIO).unwrap();
        let corpus = load_corpus(&m, &v, Some(&a), &[]).unwrap();
        assert_eq!(corpus.visual.len(), 2);
        assert_eq!(corpus.audio.len(), 1);

        fs::write(
            &m,
            "clip_id,label,identity,source_video,n_frames\nc1,deceptive,a,v,4\n",
        )
        .unwrap();
        assert!(matches!(
            load_corpus(&m, &v, None, &[]),
            Err(Error::LengthMismatch {
                found: 3,
                expected: 4,
                ..
            })
        ));

        fs::write(
            &m,
            "clip_id,label,identity,source_video,n_frames\nc9,deceptive,a,v,4\n",
        )
        .unwrap();
        assert!(matches!(
            load_corpus(&m, &v, None, &[]),
            Err(Error::MissingClip { .. })
        ));
    }

    #[test]
    fn write_then_load_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = parse_manifest(MANIFEST.as_bytes(), p()).unwrap();
        let visual = parse_tracks(VISUAL.as_bytes(), p(), Modality::Visual).unwrap();
        let audio = parse_tracks(AUDIO.as_bytes(), p(), Modality::Audio).unwrap();
        let corpus = Corpus {
            manifest,
            visual,
            audio,
            blocks: vec![],
        };
        write_corpus_files(dir.path(), &corpus).unwrap();
        let back = load_corpus(
            &dir.path().join("manifest.csv"),
            &dir.path().join("visual_states.csv"),
            Some(&dir.path().join("audio_states.csv")),
            &[],
        )
        .unwrap();
        assert_eq!(back, corpus);
    }
}
