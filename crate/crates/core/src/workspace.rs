//! A dataset plus the solutions stored against it, optionally persisted in a
//! data directory:
//!
//! ```text
//! <root>/dataset/manifest.json (+ NDJSON record files)
//! <root>/solutions/<method_id>.ndjson
//! <root>/reports/<method_id>.json
//! ```
//!
//! A `Workspace` value is a snapshot. Mutating methods take `&mut self`;
//! callers that share a workspace between readers clone it, mutate the clone,
//! and publish the clone.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;

use crate::corpus::{self, CorpusError, Dataset, DatasetManifest, GroundTruthLink};
use crate::evaluation::{self, Criterion, DiffReport, EvalError, EvaluationReport, ReportSummary};
use crate::linkage::{self, ImportOptions, LinkageError, MethodDescriptor, Solution};
use crate::vizprep::{self, LinkMap, PairView, VizError, VizOptions};

#[derive(Debug, thiserror::Error)]
pub enum WorkspaceError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Linkage(#[from] LinkageError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Viz(#[from] VizError),
    #[error("unknown method `{0}`")]
    UnknownMethod(String),
    #[error("no dataset has been ingested into {0}")]
    NotInitialized(PathBuf),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = WorkspaceError> = std::result::Result<T, E>;

#[derive(Debug)]
pub struct StoredSolution {
    pub solution: Solution,
    /// `None` when the dataset has no ground truth for the platform pair.
    pub report: Option<EvaluationReport>,
    pub link_map: LinkMap,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSummary {
    #[serde(flatten)]
    pub method: MethodDescriptor,
    pub source_platform: String,
    pub target_platform: String,
    pub report: Option<ReportSummary>,
}

#[derive(Debug, Clone)]
pub struct Workspace {
    root: Option<PathBuf>,
    dataset: Arc<Dataset>,
    solutions: BTreeMap<String, Arc<StoredSolution>>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> WorkspaceError + '_ {
    move |source| WorkspaceError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes through a temporary file so a crash never leaves a half-written file.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

impl Workspace {
    pub fn in_memory(dataset: Dataset) -> Self {
        Self {
            root: None,
            dataset: Arc::new(dataset),
            solutions: BTreeMap::new(),
        }
    }

    fn dataset_dir(root: &Path) -> PathBuf {
        root.join("dataset")
    }

    fn solutions_dir(root: &Path) -> PathBuf {
        root.join("solutions")
    }

    fn reports_dir(root: &Path) -> PathBuf {
        root.join("reports")
    }

    /// Loads the dataset behind `manifest_path` and stores it under `root`,
    /// replacing any previous dataset and discarding its solutions.
    pub fn ingest(root: &Path, manifest_path: &Path) -> Result<(Self, DatasetManifest)> {
        let (manifest, dataset) = corpus::load_dataset(manifest_path)?;
        for dir in [Self::solutions_dir(root), Self::reports_dir(root)] {
            if dir.exists() {
                fs::remove_dir_all(&dir).map_err(io_err(&dir))?;
            }
        }
        corpus::export_dataset(&dataset, &Self::dataset_dir(root))?;
        let ws = Self {
            root: Some(root.to_path_buf()),
            dataset: Arc::new(dataset),
            solutions: BTreeMap::new(),
        };
        Ok((ws, manifest))
    }

    pub fn is_initialized(root: &Path) -> bool {
        Self::dataset_dir(root).join(corpus::MANIFEST_FILE_NAME).is_file()
    }

    pub fn open(root: &Path) -> Result<Self> {
        let manifest = Self::dataset_dir(root).join(corpus::MANIFEST_FILE_NAME);
        if !manifest.is_file() {
            return Err(WorkspaceError::NotInitialized(root.to_path_buf()));
        }
        let (_, dataset) = corpus::load_dataset(&manifest)?;
        let mut ws = Self {
            root: Some(root.to_path_buf()),
            dataset: Arc::new(dataset),
            solutions: BTreeMap::new(),
        };
        let dir = Self::solutions_dir(root);
        if dir.is_dir() {
            let mut files: Vec<PathBuf> = fs::read_dir(&dir)
                .map_err(io_err(&dir))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|e| e == "ndjson"))
                .collect();
            files.sort();
            let stored = ImportOptions {
                k_stored: usize::MAX,
                min_score: None,
            };
            for file in files {
                let solution = linkage::import_solution(&file, &ws.dataset, &stored)?;
                ws.insert(solution);
            }
        }
        Ok(ws)
    }

    pub fn root(&self) -> Option<&Path> {
        self.root.as_deref()
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn dataset_dir_path(&self) -> Option<PathBuf> {
        self.root.as_deref().map(Self::dataset_dir)
    }

    pub fn solution(&self, method_id: &str) -> Option<&StoredSolution> {
        self.solutions.get(method_id).map(Arc::as_ref)
    }

    fn require(&self, method_id: &str) -> Result<&StoredSolution> {
        self.solution(method_id)
            .ok_or_else(|| WorkspaceError::UnknownMethod(method_id.to_string()))
    }

    pub fn method_ids(&self) -> impl Iterator<Item = &str> {
        self.solutions.keys().map(String::as_str)
    }

    fn insert(&mut self, solution: Solution) -> Arc<StoredSolution> {
        let report = evaluation::evaluate(&solution, self.dataset.ground_truth()).ok();
        let link_map = LinkMap::for_solution(&self.dataset, &solution);
        let stored = Arc::new(StoredSolution {
            solution,
            report,
            link_map,
        });
        self.solutions
            .insert(stored.solution.method.method_id.clone(), stored.clone());
        stored
    }

    fn persist(&self, stored: &StoredSolution) -> Result<()> {
        let Some(root) = &self.root else {
            return Ok(());
        };
        let id = &stored.solution.method.method_id;
        let sol_dir = Self::solutions_dir(root);
        fs::create_dir_all(&sol_dir).map_err(io_err(&sol_dir))?;
        write_atomic(
            &sol_dir.join(format!("{id}.ndjson")),
            &linkage::solution_to_string(&stored.solution),
        )?;
        let rep_dir = Self::reports_dir(root);
        let rep_path = rep_dir.join(format!("{id}.json"));
        match &stored.report {
            Some(report) => {
                fs::create_dir_all(&rep_dir).map_err(io_err(&rep_dir))?;
                write_atomic(&rep_path, &report.to_export_string())?;
            }
            None if rep_path.exists() => fs::remove_file(&rep_path).map_err(io_err(&rep_path))?,
            None => {}
        }
        Ok(())
    }

    /// Stores a solution, evaluating it against the dataset's ground truth.
    pub fn add_solution(&mut self, solution: Solution, replace: bool) -> Result<&StoredSolution> {
        let id = solution.method.method_id.clone();
        if !replace && self.solutions.contains_key(&id) {
            return Err(LinkageError::DuplicateMethodId(id).into());
        }
        let stored = self.insert(solution);
        self.persist(&stored)?;
        Ok(self.solutions[&id].as_ref())
    }

    pub fn import_text(
        &mut self,
        text: &str,
        options: &ImportOptions,
        replace: bool,
    ) -> Result<&StoredSolution> {
        let solution = linkage::parse_solution(text, &self.dataset, options)?;
        self.add_solution(solution, replace)
    }

    pub fn import_file(
        &mut self,
        path: &Path,
        options: &ImportOptions,
        replace: bool,
    ) -> Result<&StoredSolution> {
        let solution = linkage::import_solution(path, &self.dataset, options)?;
        self.add_solution(solution, replace)
    }

    /// Runs the username baseline and stores it, replacing an earlier run
    /// with the same gram length.
    pub fn run_baseline(
        &mut self,
        source_platform: &str,
        target_platform: &str,
        n: usize,
        k: usize,
    ) -> Result<&StoredSolution> {
        let solution = linkage::run_baseline(&self.dataset, source_platform, target_platform, n, k)?;
        self.add_solution(solution, true)
    }

    pub fn remove_solution(&mut self, method_id: &str) -> Result<()> {
        self.solutions
            .remove(method_id)
            .ok_or_else(|| WorkspaceError::UnknownMethod(method_id.to_string()))?;
        if let Some(root) = &self.root {
            for path in [
                Self::solutions_dir(root).join(format!("{method_id}.ndjson")),
                Self::reports_dir(root).join(format!("{method_id}.json")),
            ] {
                if path.exists() {
                    fs::remove_file(&path).map_err(io_err(&path))?;
                }
            }
        }
        Ok(())
    }

    /// Appends ground-truth links (e.g. extracted from bios) and re-evaluates
    /// every stored solution. Returns the number of links added.
    pub fn add_ground_truth(&mut self, links: Vec<GroundTruthLink>) -> Result<usize> {
        let (dataset, added) = self.dataset.with_additional_ground_truth(links)?;
        if let Some(root) = &self.root {
            corpus::export_dataset(&dataset, &Self::dataset_dir(root))?;
        }
        self.dataset = Arc::new(dataset);
        let solutions: Vec<Solution> = self
            .solutions
            .values()
            .map(|s| s.solution.clone())
            .collect();
        for solution in solutions {
            let stored = self.insert(solution);
            self.persist(&stored)?;
        }
        Ok(added)
    }

    /// One entry per stored solution, sorted by method id.
    pub fn list_methods(&self) -> Vec<MethodSummary> {
        self.solutions
            .values()
            .map(|s| MethodSummary {
                method: s.solution.method.clone(),
                source_platform: s.solution.source_platform.clone(),
                target_platform: s.solution.target_platform.clone(),
                report: s.report.as_ref().map(EvaluationReport::summary),
            })
            .collect()
    }

    pub fn evaluate(&self, method_id: &str) -> Result<EvaluationReport> {
        let stored = self.require(method_id)?;
        Ok(evaluation::evaluate(&stored.solution, self.dataset.ground_truth())?)
    }

    pub fn diff(&self, method_a: &str, method_b: &str, criterion: Criterion) -> Result<DiffReport> {
        let a = self.require(method_a)?;
        let b = self.require(method_b)?;
        Ok(evaluation::diff(
            &a.solution,
            &b.solution,
            self.dataset.ground_truth(),
            criterion,
        )?)
    }

    pub fn export_solution(&self, method_id: &str, path: &Path) -> Result<()> {
        Ok(linkage::export_solution(&self.require(method_id)?.solution, path)?)
    }

    pub fn pair_view(
        &self,
        method_id: &str,
        source_id: &str,
        k: usize,
        options: &VizOptions,
    ) -> Result<PairView> {
        let stored = self
            .solution(method_id)
            .ok_or_else(|| VizError::UnknownMethod(method_id.to_string()))?;
        Ok(vizprep::pair_view(
            &self.dataset,
            &stored.solution,
            &stored.link_map,
            source_id,
            k,
            options,
        )?)
    }
}
