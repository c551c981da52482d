use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{CorpusError, Dataset, Platform, RawRecords, Result, SourceNames};

pub const MANIFEST_FILE_NAME: &str = "manifest.json";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordCounts {
    pub identities: usize,
    pub edges: usize,
    pub posts: usize,
    pub ground_truth: usize,
}

/// Dataset manifest: names the record files (relative to the manifest's
/// directory) and declares each platform's edge directedness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub name: String,
    pub platforms: Vec<Platform>,
    pub identities: PathBuf,
    pub edges: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub posts: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<PathBuf>,
    /// Optional on input; always filled in with verified counts after a load.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<RecordCounts>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn read_ndjson<T: DeserializeOwned>(path: &Path) -> Result<Vec<(usize, T)>> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| CorpusError::MalformedRecord {
            file: path.display().to_string(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push((i + 1, record));
    }
    Ok(out)
}

pub(crate) fn write_ndjson<'a, T: Serialize + 'a>(
    path: &Path,
    records: impl IntoIterator<Item = &'a T>,
) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    for record in records {
        serde_json::to_writer(&mut w, record).expect("records serialize");
        w.write_all(b"\n").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Loads and validates the dataset described by the manifest at `manifest_path`.
pub fn load_dataset(manifest_path: &Path) -> Result<(DatasetManifest, Dataset)> {
    let text = fs::read_to_string(manifest_path).map_err(io_err(manifest_path))?;
    let mut manifest: DatasetManifest =
        serde_json::from_str(&text).map_err(|e| CorpusError::MalformedRecord {
            file: manifest_path.display().to_string(),
            line: e.line(),
            message: e.to_string(),
        })?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let resolve = |p: &Path| base.join(p);

    let identities_path = resolve(&manifest.identities);
    let edges_path = resolve(&manifest.edges);
    let posts_path = manifest.posts.as_deref().map(resolve);
    let truth_path = manifest.ground_truth.as_deref().map(resolve);

    let raw = RawRecords {
        identities: read_ndjson(&identities_path)?,
        edges: read_ndjson(&edges_path)?,
        posts: match &posts_path {
            Some(p) => read_ndjson(p)?,
            None => Vec::new(),
        },
        ground_truth: match &truth_path {
            Some(p) => read_ndjson(p)?,
            None => Vec::new(),
        },
    };
    let display = |p: Option<&PathBuf>, fallback: &str| {
        p.map(|p| p.display().to_string())
            .unwrap_or_else(|| fallback.to_string())
    };
    let names = SourceNames {
        identities: identities_path.display().to_string(),
        edges: edges_path.display().to_string(),
        posts: display(posts_path.as_ref(), "posts"),
        ground_truth: display(truth_path.as_ref(), "ground_truth"),
    };

    let dataset = Dataset::from_raw(
        manifest.name.clone(),
        manifest.platforms.clone(),
        raw,
        &names,
    )?;
    let actual = dataset.counts();
    if let Some(declared) = manifest.counts {
        let pairs = [
            ("identities", declared.identities, actual.identities),
            ("edges", declared.edges, actual.edges),
            ("posts", declared.posts, actual.posts),
            ("ground-truth links", declared.ground_truth, actual.ground_truth),
        ];
        for (kind, declared, actual) in pairs {
            if declared != actual {
                return Err(CorpusError::CountMismatch {
                    kind,
                    declared,
                    actual,
                });
            }
        }
    }
    manifest.counts = Some(actual);
    Ok((manifest, dataset))
}

/// Writes the dataset into `dir` as a manifest plus four NDJSON files.
///
/// Records are written in dataset order, so loading the result and exporting
/// it again produces identical bytes.
pub fn export_dataset(dataset: &Dataset, dir: &Path) -> Result<DatasetManifest> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let manifest = DatasetManifest {
        name: dataset.name().to_string(),
        platforms: dataset.platforms().to_vec(),
        identities: "identities.ndjson".into(),
        edges: "edges.ndjson".into(),
        posts: Some("posts.ndjson".into()),
        ground_truth: Some("ground_truth.ndjson".into()),
        counts: Some(dataset.counts()),
    };
    write_ndjson(&dir.join("identities.ndjson"), dataset.identities())?;
    write_ndjson(&dir.join("edges.ndjson"), dataset.edges())?;
    write_ndjson(&dir.join("posts.ndjson"), dataset.posts())?;
    write_ndjson(&dir.join("ground_truth.ndjson"), dataset.ground_truth())?;
    let path = dir.join(MANIFEST_FILE_NAME);
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    fs::write(&path, text).map_err(io_err(&path))?;
    Ok(manifest)
}
