use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use linky_core::evaluation::Criterion;
use linky_core::linkage::DEFAULT_K_STORED;
use linky_core::ngram::DEFAULT_GRAM_LEN;

#[derive(Debug, Parser)]
#[command(name = "linky", version, about = "Cross-network user identity linkage workbench")]
pub struct Cli {
    /// Workspace directory holding the ingested dataset, solutions and reports.
    #[arg(long, global = true, env = "LINKY_DATA_DIR", value_name = "DIR")]
    pub data_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load and validate a dataset manifest into the workspace, discarding
    /// any earlier dataset and its solutions.
    Ingest {
        /// Path to the dataset manifest (JSON).
        #[arg(long, value_name = "PATH")]
        manifest: PathBuf,
    },
    /// Run the username n-gram baseline and store it as `baseline-<n>gram`.
    Baseline {
        /// Platform whose identities are queried.
        #[arg(long, value_name = "PLATFORM")]
        source: String,
        /// Platform whose identities are ranked as candidates.
        #[arg(long, value_name = "PLATFORM")]
        target: String,
        /// Gram length.
        #[arg(long, default_value_t = DEFAULT_GRAM_LEN)]
        n: usize,
        /// Candidates kept per source identity.
        #[arg(long, default_value_t = DEFAULT_K_STORED)]
        k: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Import a solution file produced by an external linkage method.
    Import {
        /// Solution file (header line, then one line per source identity).
        path: PathBuf,
        /// Overwrite a stored solution with the same method id.
        #[arg(long)]
        replace: bool,
        /// Candidates kept per source identity.
        #[arg(long, default_value_t = DEFAULT_K_STORED)]
        k_stored: usize,
        /// Drop candidates scoring below this value.
        #[arg(long, value_name = "SCORE")]
        min_score: Option<f64>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Write a stored solution in the solution file format.
    Export {
        #[arg(long, value_name = "METHOD_ID")]
        method: String,
        /// Output file; standard output when omitted.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Print the Prec@1 / MRR report of a stored solution.
    Evaluate {
        #[arg(long, value_name = "METHOD_ID")]
        method: String,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// List sources that method A gets right and method B does not, one
    /// username per line.
    Diff {
        method_a: String,
        method_b: String,
        /// `rank1`, or `topk:K` to accept the true target anywhere in the top K.
        #[arg(long, default_value_t = Criterion::Rank1)]
        criterion: Criterion,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// List stored solutions with their metrics.
    List {
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Write a seeded two-platform synthetic dataset with planted links.
    Generate(GenerateArgs),
    /// Add ground-truth links declared in source-platform bios.
    ExtractTruth {
        #[arg(long, value_name = "PLATFORM")]
        source: String,
        #[arg(long, value_name = "PLATFORM")]
        target: String,
        /// Regular expression locating a declared handle; capture group 1
        /// (or the whole match) is the handle. Repeatable. Defaults to
        /// `(?i)<target>:\s*@?(\S+)`.
        #[arg(long = "pattern", value_name = "REGEX")]
        patterns: Vec<String>,
    },
    /// Serve the HTTP API until interrupted.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_name = "N")]
    pub n_users: usize,
    /// Probability that a person's two usernames differ.
    #[arg(long, default_value_t = 0.0)]
    pub mutation_rate: f64,
    /// Probability that a follow edge is mirrored on the other platform.
    #[arg(long, default_value_t = 0.5)]
    pub neighbor_overlap: f64,
    /// Probability that a post word comes from the person's own topics.
    #[arg(long, default_value_t = 0.5)]
    pub content_overlap: f64,
    /// Probability that a source bio declares the counterpart handle.
    #[arg(long, default_value_t = 0.5)]
    pub declare_rate: f64,
    #[arg(long, default_value_t = 4)]
    pub avg_out_degree: usize,
    #[arg(long, default_value_t = 3)]
    pub posts_per_user: usize,
    /// Directory that receives the manifest and record files.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = "LINKY_PORT", default_value_t = linky_service::DEFAULT_PORT)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// Stopword file for word clouds (one word per line, `#` comments).
    /// A built-in English list is used when omitted.
    #[arg(long, value_name = "PATH")]
    pub stopwords: Option<PathBuf>,
    /// Candidate tabs per pair view when the request gives no `k`.
    #[arg(long, default_value_t = linky_service::DEFAULT_TOPK)]
    pub topk_default: usize,
    /// Allowed browser origin for CORS (repeatable; `*` allows any).
    #[arg(long = "cors-origin", value_name = "ORIGIN")]
    pub cors_origins: Vec<String>,
    /// Directory that relative profile image references resolve against.
    /// Defaults to the data directory.
    #[arg(long, value_name = "DIR")]
    pub image_root: Option<PathBuf>,
    /// Maximum number of terms per word cloud.
    #[arg(long, default_value_t = linky_core::vizprep::DEFAULT_TOP_N)]
    pub cloud_terms: usize,
}
