use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use scmetrics::corpus::{
    dataset_digest, export_metrics, ingest_with_jobs, load_manifest, CorpusDiagnostic, CorpusError, CorpusManifest,
    ExportFormat, Ingested,
};
use scmetrics::frontend::parse_source;
use scmetrics::metrics::{measure_files, MetricId};
use scmetrics::pipeline::{
    self, render_rq1, render_rq2, render_rq3, render_rq4, render_tables, AnalysisConfig, DatasetRecord, ReportFormat,
    RunManifest, TableFile,
};
use scmetrics::with_jobs;

/// Exit status when every input was used.
const EXIT_OK: u8 = 0;
const EXIT_FAILURE: u8 = 1;
/// Results were produced but some inputs were skipped.
const EXIT_PARTIAL: u8 = 2;

#[derive(Parser)]
#[command(name = "scmetrics", version, about = "Complexity metrics for Solidity contracts and their link to vulnerabilities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the metric vector of every contract in the given files as CSV.
    Metrics {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Run all four analyses and write the full report.
    Analyze(RunArgs),
    /// Metric redundancy: per-group correlation matrices.
    Rq1(RunArgs),
    /// Correlation of each metric with the vulnerability label.
    Rq2(RunArgs),
    /// Paired t-tests between vulnerable and size-matched neutral contracts.
    Rq3(RunArgs),
    /// Confidence intervals of each metric per group.
    Rq4(RunArgs),
    /// Write the labeled metric table.
    Export(ExportArgs),
}

#[derive(Args)]
struct DataArgs {
    /// Manifest CSV with header `file,contract,label,type`.
    #[arg(long)]
    manifest: PathBuf,
    /// Directory the manifest's file paths are relative to (default: the manifest's directory).
    #[arg(long)]
    root: Option<PathBuf>,
    /// Worker threads (default: available processors).
    #[arg(long)]
    jobs: Option<usize>,
}

impl DataArgs {
    fn root(&self) -> PathBuf {
        self.root.clone().unwrap_or_else(|| self.manifest.parent().map(Path::to_path_buf).unwrap_or_default())
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 0.95)]
    ci_level: f64,
    #[arg(long, default_value_t = 0.9)]
    redundancy_threshold: f64,
    #[arg(long, default_value_t = 0.05)]
    significance: f64,
    /// Table formats, comma separated: csv, json, md.
    #[arg(long, value_delimiter = ',', default_value = "csv,json,md")]
    format: Vec<ReportFormat>,
}

impl RunArgs {
    fn config(&self) -> AnalysisConfig {
        AnalysisConfig {
            seed: self.seed,
            ci_level: self.ci_level,
            redundancy_threshold: self.redundancy_threshold,
            significance: self.significance,
        }
    }

    fn formats(&self) -> Vec<ReportFormat> {
        let mut f = self.format.clone();
        f.sort();
        f.dedup();
        f
    }
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Output file.
    #[arg(long)]
    out: PathBuf,
    /// csv or json.
    #[arg(long, default_value = "csv")]
    format: ExportFormat,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_FAILURE } else { EXIT_OK });
        }
    };
    let result = match &cli.command {
        Command::Metrics { paths } => cmd_metrics(paths),
        Command::Analyze(args) => cmd_run(args, Runner::All),
        Command::Rq1(args) => cmd_run(args, Runner::Rq1),
        Command::Rq2(args) => cmd_run(args, Runner::Rq2),
        Command::Rq3(args) => cmd_run(args, Runner::Rq3),
        Command::Rq4(args) => cmd_run(args, Runner::Rq4),
        Command::Export(args) => cmd_export(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}

fn cmd_metrics(paths: &[PathBuf]) -> Result<u8> {
    let mut seen = std::collections::BTreeSet::new();
    let mut parsed = Vec::new();
    let mut problems = 0usize;
    for path in paths {
        let name = path.display().to_string();
        if !seen.insert(name.clone()) {
            continue;
        }
        let source = match fs::read(path) {
            Ok(bytes) => String::from_utf8_lossy(&bytes).into_owned(),
            Err(e) => {
                eprintln!("{name}: {e}");
                problems += 1;
                continue;
            }
        };
        match parse_source(&source, &name) {
            Ok(file) => {
                for d in &file.diagnostics {
                    eprintln!("{d}");
                }
                problems += file.diagnostics.len();
                parsed.push(file);
            }
            Err(e) => {
                eprintln!("{name}:{}: {}", e.line, e.message);
                problems += 1;
            }
        }
    }
    let rows = measure_files(&parsed)?;
    if rows.is_empty() {
        bail!("no parsable contract in the given files");
    }

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let header: Vec<&str> = ["file", "contract"].into_iter().chain(MetricId::ALL.iter().map(|m| m.key())).collect();
    writeln!(out, "{}", header.join(","))?;
    for (id, m) in &rows {
        writeln!(out, "{},{},{}", id.file, id.name, m.csv_fields().join(","))?;
    }
    Ok(if problems == 0 { EXIT_OK } else { EXIT_PARTIAL })
}

/// Loads and ingests the corpus, printing diagnostics. `Ok(None)` means the
/// corpus was unusable and the caller should exit with failure.
fn load_corpus(data: &DataArgs) -> Result<Option<(CorpusManifest, Ingested)>> {
    let manifest = load_manifest(&data.manifest).with_context(|| format!("loading {}", data.manifest.display()))?;
    match ingest_with_jobs(&manifest, &data.root(), data.jobs) {
        Ok(ingested) => {
            for d in &ingested.diagnostics {
                eprintln!("{d}");
            }
            Ok(Some((manifest, ingested)))
        }
        Err(CorpusError::Unusable { skipped, total, diagnostics }) => {
            for d in &diagnostics {
                eprintln!("{d}");
            }
            eprintln!("error: corpus unusable: {skipped} of {total} entries skipped");
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Runner {
    All,
    Rq1,
    Rq2,
    Rq3,
    Rq4,
}

impl Runner {
    fn name(self) -> &'static str {
        match self {
            Runner::All => "analyze",
            Runner::Rq1 => "rq1",
            Runner::Rq2 => "rq2",
            Runner::Rq3 => "rq3",
            Runner::Rq4 => "rq4",
        }
    }
}

fn cmd_run(args: &RunArgs, runner: Runner) -> Result<u8> {
    let config = args.config();
    config.validate()?;
    let formats = args.formats();
    let Some((manifest, ingested)) = load_corpus(&args.data)? else { return Ok(EXIT_FAILURE) };
    let set = &ingested.set;

    let files: Vec<TableFile> = with_jobs(args.data.jobs, || -> Result<Vec<TableFile>> {
        let each = |render: &dyn Fn(ReportFormat) -> Vec<TableFile>| formats.iter().flat_map(|&f| render(f)).collect::<Vec<_>>();
        Ok(match runner {
            Runner::All => {
                let report = pipeline::analyze(set, &config)?;
                let mut files = vec![TableFile { name: "report.json".into(), contents: report.to_json() }];
                files.extend(render_tables(&report, &formats));
                files
            }
            Runner::Rq1 => {
                let s = pipeline::rq1_redundancy(set, config.redundancy_threshold, config.significance)?;
                each(&|f| render_rq1(&s, f))
            }
            Runner::Rq2 => {
                let s = pipeline::rq2_metric_vs_vulnerability(set, config.significance)?;
                each(&|f| render_rq2(&s, f))
            }
            Runner::Rq3 => {
                let s = pipeline::rq3_discriminative(set, config.seed, config.significance)?;
                each(&|f| render_rq3(&s, f))
            }
            Runner::Rq4 => {
                let s = pipeline::rq4_interval_comparison(set, config.ci_level)?;
                each(&|f| render_rq4(&s, f))
            }
        })
    })
    .map_err(anyhow::Error::msg)??;

    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let mut run = RunManifest::new(
        runner.name(),
        config,
        formats.iter().map(|f| f.extension().to_string()).collect(),
        dataset_record(&args.data, &manifest, &ingested),
    );
    let mut write = |name: &str, contents: &str| -> Result<()> {
        let path = args.out.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        run.record(name, contents);
        Ok(())
    };
    for file in &files {
        write(&file.name, &file.contents)?;
    }
    write("diagnostics.txt", &diagnostics_text(&ingested.diagnostics))?;
    let run_json = run.to_json();
    fs::write(args.out.join("run_manifest.json"), run_json).context("writing run manifest")?;

    println!(
        "{}: {} rows ({} vulnerable, {} neutral), {} diagnostics, {} files written to {}",
        runner.name(),
        set.len(),
        set.n_vulnerable,
        set.n_neutral,
        ingested.diagnostics.len(),
        files.len() + 2,
        args.out.display()
    );
    Ok(if ingested.diagnostics.is_empty() { EXIT_OK } else { EXIT_PARTIAL })
}

fn cmd_export(args: &ExportArgs) -> Result<u8> {
    let Some((_, ingested)) = load_corpus(&args.data)? else { return Ok(EXIT_FAILURE) };
    let mut buf = Vec::new();
    export_metrics(&ingested.set, args.format, &mut buf)?;
    fs::write(&args.out, buf).with_context(|| format!("writing {}", args.out.display()))?;
    Ok(if ingested.diagnostics.is_empty() { EXIT_OK } else { EXIT_PARTIAL })
}

fn dataset_record(data: &DataArgs, manifest: &CorpusManifest, ingested: &Ingested) -> DatasetRecord {
    let root = data.root();
    let provenance = manifest.provenance.clone().expect("loaded manifests carry provenance");
    DatasetRecord {
        manifest_path: provenance.manifest_path,
        manifest_sha256: provenance.manifest_sha256,
        source_root: root.display().to_string(),
        sources_sha256: dataset_digest(manifest, &root),
        entries: manifest.len(),
        rows: ingested.set.len(),
        diagnostics: ingested.diagnostics.len(),
    }
}

fn diagnostics_text(diagnostics: &[CorpusDiagnostic]) -> String {
    diagnostics.iter().map(|d| format!("{d}\n")).collect()
}
