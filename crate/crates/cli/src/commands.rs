use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::json;

use linky_core::corpus::{self, SyntheticParams};
use linky_core::evaluation::EvaluationReport;
use linky_core::linkage::{self, ImportOptions};
use linky_core::vizprep::{Stopwords, VizOptions};
use linky_core::workspace::{MethodSummary, Workspace};
use linky_service::{AppState, ServiceConfig};

use crate::args::{Cli, Command, Format, GenerateArgs, ServeArgs};
use crate::failure::Failure;

type Outcome = Result<(), Failure>;

pub fn run(cli: Cli) -> Outcome {
    let data_dir = cli.data_dir;
    let need_dir = || {
        data_dir.clone().ok_or_else(|| {
            Failure::Usage("--data-dir (or LINKY_DATA_DIR) is required for this command".into())
        })
    };
    match cli.command {
        Command::Generate(args) => generate(args),
        Command::Ingest { manifest } => ingest(&need_dir()?, &manifest),
        Command::Baseline {
            source,
            target,
            n,
            k,
            format,
        } => {
            let mut ws = open(&need_dir()?)?;
            let stored = ws.run_baseline(&source, &target, n, k)?;
            emit_report(&stored.solution.method.method_id, stored.report.as_ref(), format)
        }
        Command::Import {
            path,
            replace,
            k_stored,
            min_score,
            format,
        } => {
            let mut ws = open(&need_dir()?)?;
            let options = ImportOptions { k_stored, min_score };
            let stored = ws.import_file(&path, &options, replace)?;
            emit_report(&stored.solution.method.method_id, stored.report.as_ref(), format)
        }
        Command::Export { method, out } => {
            let ws = open(&need_dir()?)?;
            match out {
                Some(path) => Ok(ws.export_solution(&method, &path)?),
                None => {
                    let stored = ws
                        .solution(&method)
                        .ok_or_else(|| Failure::Data(format!("unknown method `{method}`")))?;
                    print_raw(&linkage::solution_to_string(&stored.solution))
                }
            }
        }
        Command::Evaluate { method, format } => {
            let ws = open(&need_dir()?)?;
            let report = ws.evaluate(&method)?;
            match format {
                Format::Json => print_raw(&report.to_export_string()),
                Format::Text => emit_report(&method, Some(&report), Format::Text),
            }
        }
        Command::Diff {
            method_a,
            method_b,
            criterion,
            format,
        } => {
            let ws = open(&need_dir()?)?;
            let report = ws.diff(&method_a, &method_b, criterion)?;
            let source_platform = ws
                .solution(&method_a)
                .map(|s| s.solution.source_platform.clone())
                .unwrap_or_default();
            let usernames: Vec<String> = report
                .correct_in_a_not_b
                .iter()
                .map(|id| {
                    ws.dataset()
                        .lookup(&source_platform, id)
                        .map(|u| u.username.clone())
                        .unwrap_or_else(|| id.clone())
                })
                .collect();
            match format {
                Format::Text => {
                    let mut text = String::new();
                    for name in &usernames {
                        text.push_str(name);
                        text.push('\n');
                    }
                    print_raw(&text)
                }
                Format::Json => {
                    let entries: Vec<_> = report
                        .correct_in_a_not_b
                        .iter()
                        .zip(&usernames)
                        .map(|(id, name)| json!({ "source_id": id, "username": name }))
                        .collect();
                    print_json(&json!({
                        "method_a": report.method_a,
                        "method_b": report.method_b,
                        "criterion": report.criterion,
                        "correct_in_a_not_b": report.correct_in_a_not_b,
                        "entries": entries,
                    }))
                }
            }
        }
        Command::List { format } => {
            let ws = open(&need_dir()?)?;
            list(&ws.list_methods(), format)
        }
        Command::ExtractTruth {
            source,
            target,
            patterns,
        } => {
            let mut ws = open(&need_dir()?)?;
            let patterns = if patterns.is_empty() {
                vec![format!(r"(?i){target}:\s*@?(\S+)")]
            } else {
                patterns
            };
            let links = corpus::extract_ground_truth(ws.dataset(), &source, &target, &patterns)?;
            let found = links.len();
            let added = ws.add_ground_truth(links)?;
            println!("declared links found: {found}");
            println!("ground-truth links added: {added}");
            println!("ground-truth links total: {}", ws.dataset().ground_truth().len());
            Ok(())
        }
        Command::Serve(args) => serve(data_dir, args),
    }
}

fn open(dir: &Path) -> Result<Workspace, Failure> {
    Ok(Workspace::open(dir)?)
}

fn ingest(dir: &Path, manifest: &Path) -> Outcome {
    let (ws, manifest) = Workspace::ingest(dir, manifest)?;
    let counts = ws.dataset().counts();
    println!("dataset: {}", manifest.name);
    let platforms: Vec<&str> = ws.dataset().platforms().iter().map(|p| p.id.as_str()).collect();
    println!("platforms: {}", platforms.join(", "));
    println!("identities: {}", counts.identities);
    println!("edges: {}", counts.edges);
    println!("posts: {}", counts.posts);
    println!("ground_truth: {}", counts.ground_truth);
    Ok(())
}

fn generate(args: GenerateArgs) -> Outcome {
    let mut params = SyntheticParams::new(args.seed, args.n_users).mutation_rate(args.mutation_rate);
    params.neighbor_overlap = args.neighbor_overlap;
    params.content_overlap = args.content_overlap;
    params.declare_rate = args.declare_rate;
    params.avg_out_degree = args.avg_out_degree;
    params.posts_per_user = args.posts_per_user;
    let (dataset, ledger) = corpus::generate_synthetic_dataset(&params)?;
    corpus::export_dataset(&dataset, &args.out)?;
    let counts = dataset.counts();
    println!("wrote {}", args.out.join(corpus::MANIFEST_FILE_NAME).display());
    println!("identities: {}", counts.identities);
    println!("edges: {}", counts.edges);
    println!("posts: {}", counts.posts);
    println!("ground_truth: {}", counts.ground_truth);
    println!("declared in bios: {}", ledger.declared.len());
    Ok(())
}

fn emit_report(method_id: &str, report: Option<&EvaluationReport>, format: Format) -> Outcome {
    match format {
        Format::Json => print_json(&json!({
            "method_id": method_id,
            "report": report.map(EvaluationReport::summary),
        })),
        Format::Text => {
            println!("method_id: {method_id}");
            match report {
                Some(r) => {
                    println!("n_evaluated: {}", r.n_evaluated);
                    println!("prec@1: {:.3}", r.prec_at_1);
                    println!("mrr: {:.3}", r.mrr);
                }
                None => println!("no ground truth for this platform pair; not evaluated"),
            }
            Ok(())
        }
    }
}

fn list(methods: &[MethodSummary], format: Format) -> Outcome {
    match format {
        Format::Json => print_json(&json!({ "solutions": methods })),
        Format::Text => {
            for m in methods {
                let metrics = match &m.report {
                    Some(r) => format!(
                        "n={} prec@1={:.3} mrr={:.3}",
                        r.n_evaluated, r.prec_at_1, r.mrr
                    ),
                    None => "not evaluated".to_string(),
                };
                println!(
                    "{}\t{} -> {}\t{}",
                    m.method.method_id, m.source_platform, m.target_platform, metrics
                );
            }
            Ok(())
        }
    }
}

fn serve(data_dir: Option<PathBuf>, args: ServeArgs) -> Outcome {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
        )
        .with_writer(std::io::stderr)
        .init();

    let stopwords = match &args.stopwords {
        Some(path) => Stopwords::from_file(path)
            .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?,
        None => Stopwords::english(),
    };
    let config = ServiceConfig {
        viz: VizOptions {
            stopwords,
            top_n: args.cloud_terms,
            image_root: args.image_root.or_else(|| data_dir.clone()),
        },
        data_dir,
        topk_default: args.topk_default,
        cors_origins: args.cors_origins,
    };
    let state = AppState::open(config).map_err(|e| Failure::Data(e.to_string()))?;
    let runtime = tokio::runtime::Runtime::new()
        .map_err(|e| Failure::Internal(format!("cannot start runtime: {e}")))?;
    runtime.block_on(async {
        let addr = format!("{}:{}", args.host, args.port);
        let listener = tokio::net::TcpListener::bind(&addr)
            .await
            .map_err(|e| Failure::Internal(format!("cannot bind {addr}: {e}")))?;
        linky_service::serve(listener, state, linky_service::shutdown_signal())
            .await
            .map_err(|e| Failure::Internal(format!("server error: {e}")))
    })
}

fn print_json(value: &serde_json::Value) -> Outcome {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::Internal(e.to_string()))?;
    text.push('\n');
    print_raw(&text)
}

fn print_raw(text: &str) -> Outcome {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(Failure::Internal(e.to_string())),
    }
}
