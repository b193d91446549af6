//! Dataset directory indexing. Traces are stored as
//! `<root>/<scene>/user<digits>_<scene>.csv`, one directory per scene.

use std::path::{Path, PathBuf};

use super::FormatError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetEntry {
    pub user_id: String,
    pub scene_id: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone, Default)]
pub struct DatasetIndex {
    /// Entries sorted by (scene, user) for deterministic processing order.
    pub entries: Vec<DatasetEntry>,
    /// Files and directories that did not match the expected layout.
    pub warnings: Vec<String>,
}

impl DatasetIndex {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Splits `user<digits>_<scene>.csv` into (user token, scene), accepting any
/// number of digits in the user id. Used both by the dataset walker and to
/// infer identities for single files named the standard way.
pub fn parse_trace_filename(name: &str) -> Option<(String, String)> {
    let stem = name.strip_suffix(".csv")?;
    let rest = stem.strip_prefix("user")?;
    let digits_end = rest.find(|c: char| !c.is_ascii_digit())?;
    if digits_end == 0 {
        return None;
    }
    let scene = rest[digits_end..].strip_prefix('_')?;
    if scene.is_empty() {
        return None;
    }
    Some((format!("user{}", &rest[..digits_end]), scene.to_string()))
}

/// Walks a dataset root and indexes every conforming trace file. Files that
/// do not match the naming scheme, or whose embedded scene disagrees with
/// the directory they sit in, are skipped with a warning.
pub fn scan_dataset(root: &Path) -> Result<DatasetIndex, FormatError> {
    let mut index = DatasetIndex::default();
    for scene_entry in std::fs::read_dir(root)? {
        let scene_entry = scene_entry?;
        let scene_path = scene_entry.path();
        if !scene_path.is_dir() {
            index
                .warnings
                .push(format!("skipping non-directory {}", scene_path.display()));
            continue;
        }
        let scene_dir = scene_entry.file_name().to_string_lossy().to_string();
        for file_entry in std::fs::read_dir(&scene_path)? {
            let file_entry = file_entry?;
            let path = file_entry.path();
            let name = file_entry.file_name().to_string_lossy().to_string();
            match parse_trace_filename(&name) {
                Some((user_id, scene_id)) if scene_id == scene_dir => {
                    index.entries.push(DatasetEntry {
                        user_id,
                        scene_id,
                        path,
                    });
                }
                Some((_, scene_id)) => index.warnings.push(format!(
                    "skipping {}: file names scene \"{scene_id}\" but sits in \"{scene_dir}\"",
                    path.display()
                )),
                None => index
                    .warnings
                    .push(format!("skipping non-trace file {}", path.display())),
            }
        }
    }
    index
        .entries
        .sort_by(|a, b| (&a.scene_id, &a.user_id).cmp(&(&b.scene_id, &b.user_id)));
    Ok(index)
}
