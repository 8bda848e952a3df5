//! Dataset manifests and annotation files.
//!
//! A manifest is a JSON file listing the class vocabulary and one entry per
//! clip: an id, a WAV path, and a CSV annotation path. Paths may be
//! relative, in which case they resolve against the manifest's directory,
//! so a dataset directory can be moved as a unit. Annotations are CSV with
//! a required `onset,offset,label` header, times in seconds with `.` as the
//! decimal separator.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};

use mrpcen_core::eval::{Event, EventList, Vocabulary};

/// One clip of a dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub clip_id: String,
    pub audio: PathBuf,
    pub annotations: PathBuf,
}

/// A dataset: class vocabulary plus clip entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub vocabulary: Vec<String>,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    /// Reads and validates a manifest, resolving relative paths against the
    /// manifest's directory.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading manifest {}", path.display()))?;
        let mut manifest: Manifest = serde_json::from_str(&text)
            .with_context(|| format!("parsing manifest {}", path.display()))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        for entry in &mut manifest.entries {
            entry.audio = resolve(base, &entry.audio);
            entry.annotations = resolve(base, &entry.annotations);
        }
        manifest.validate()?;
        Ok(manifest)
    }

    /// Writes the manifest, relativizing any paths that sit under the
    /// manifest's directory so the dataset stays relocatable.
    pub fn save(&self, path: &Path) -> anyhow::Result<()> {
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let mut portable = self.clone();
        for entry in &mut portable.entries {
            entry.audio = relativize(base, &entry.audio);
            entry.annotations = relativize(base, &entry.annotations);
        }
        let mut text = serde_json::to_string_pretty(&portable)?;
        text.push('\n');
        std::fs::write(path, text).with_context(|| format!("writing manifest {}", path.display()))
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for entry in &self.entries {
            if entry.clip_id.is_empty() {
                anyhow::bail!("manifest contains an empty clip_id");
            }
            if entry.clip_id.contains(['/', '\\']) {
                anyhow::bail!("clip_id {:?} must not contain path separators", entry.clip_id);
            }
            if !seen.insert(&entry.clip_id) {
                anyhow::bail!("duplicate clip_id {:?}", entry.clip_id);
            }
        }
        Ok(())
    }

    /// The class vocabulary as the evaluation module's canonical type.
    pub fn eval_vocabulary(&self) -> anyhow::Result<Vocabulary> {
        Ok(Vocabulary::new(self.vocabulary.iter().cloned())
            .context("manifest vocabulary is empty")?)
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn relativize(base: &Path, p: &Path) -> PathBuf {
    p.strip_prefix(base).map(Path::to_path_buf).unwrap_or_else(|_| p.to_path_buf())
}

// ===== annotation CSV =====

/// One annotation row: `onset,offset,label` in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationRow {
    pub onset: f64,
    pub offset: f64,
    pub label: String,
}

/// Reads an annotation CSV. The `onset,offset,label` header is mandatory.
pub fn read_annotation_rows(path: &Path) -> anyhow::Result<Vec<AnnotationRow>> {
    let mut reader = csv::Reader::from_path(path)
        .with_context(|| format!("opening annotations {}", path.display()))?;
    let headers = reader
        .headers()
        .with_context(|| format!("reading header of {}", path.display()))?;
    if headers != vec!["onset", "offset", "label"] {
        anyhow::bail!(
            "{}: expected header onset,offset,label, found {:?}",
            path.display(),
            headers
        );
    }
    let mut rows = Vec::new();
    for record in reader.deserialize() {
        let row: AnnotationRow =
            record.with_context(|| format!("parsing annotations {}", path.display()))?;
        rows.push(row);
    }
    Ok(rows)
}

/// Writes annotation rows with the standard header. The header is written
/// explicitly so empty row sets still produce a parseable file.
pub fn write_annotation_rows(path: &Path, rows: &[AnnotationRow]) -> anyhow::Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .with_context(|| format!("creating annotations {}", path.display()))?;
    writer.write_record(["onset", "offset", "label"])?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Builds an event list from annotation rows for a clip of known duration.
pub fn event_list(
    rows: &[AnnotationRow],
    duration: f64,
    vocabulary: &Vocabulary,
) -> anyhow::Result<EventList> {
    let mut events = Vec::with_capacity(rows.len());
    for row in rows {
        events.push(Event::new(row.onset, row.offset, row.label.clone())?);
    }
    Ok(EventList::new(events, duration, vocabulary.clone())?)
}

/// Flattens an event list back into CSV rows.
pub fn annotation_rows(events: &EventList) -> Vec<AnnotationRow> {
    events
        .events()
        .iter()
        .map(|e| AnnotationRow {
            onset: e.onset(),
            offset: e.offset(),
            label: e.label().to_string(),
        })
        .collect()
}
