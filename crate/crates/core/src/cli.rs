//! `krongraph design | generate | verify`.
//!
//! Reports go to `stdout` as `key\tvalue` lines with exact decimal numbers;
//! diagnostics and timing go to `stderr`. Exit status: 0 success, 1 a
//! verification or consistency failure, 2 a usage, configuration or I/O error.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::config::DesignConfig;
use crate::design::{self, DesignReport};
use crate::generator::{self, GenerateOptions, IncidenceOptions, PlanOptions};
use crate::verifier;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "krongraph", version, about = "Design, generate and verify power-law Kronecker graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the exact predicted properties of a design.
    Design(DesignArgs),
    /// Write the graph as one edge shard per worker plus a manifest.
    Generate(GenerateArgs),
    /// Measure generated shards and compare them with the prediction.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    /// Design file (`star <m> [none|center|leaf]` lines and options).
    pub config: PathBuf,
    /// Write the predicted degree distribution as `degree\tcount` lines.
    #[arg(long)]
    pub distribution: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Design file.
    pub config: PathBuf,
    /// Logical workers, one shard each; defaults to the number of cores.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Number of leading factors forming B.
    #[arg(long)]
    pub split: Option<usize>,
    /// Shard directory; defaults to the config's `out` or `shards`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write 1-based vertex ids.
    #[arg(long)]
    pub one_based: bool,
    /// Per-worker memory limit in bytes for the materialized chunk.
    #[arg(long)]
    pub memory_budget: Option<u64>,
    /// Physical threads; defaults to the number of cores.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Also write out- and in-incidence shards.
    #[arg(long)]
    pub incidence: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Design file the shards were generated from.
    pub config: PathBuf,
    /// Directory holding the shards and manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also measure the triangle count.
    #[arg(long)]
    pub triangles: bool,
}

type CmdResult = Result<i32, Box<dyn std::error::Error>>;

pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Design(args) => cmd_design(&args, stdout),
        Command::Generate(args) => cmd_generate(&args, stdout, stderr),
        Command::Verify(args) => cmd_verify(&args, stdout),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn write_report(cfg: &DesignConfig, r: &DesignReport, out: &mut dyn Write) -> std::io::Result<()> {
    let d = &cfg.design;
    let m: Vec<String> = d.m_hats().iter().map(u64::to_string).collect();
    let loops: Vec<String> = d.factors().iter().map(|f| f.placement().to_string()).collect();
    writeln!(out, "factors\t{}", m.join(","))?;
    writeln!(out, "loops\t{}", loops.join(","))?;
    writeln!(out, "remove_loop\t{}", d.remove_loop())?;
    writeln!(out, "vertices\t{}", r.vertices)?;
    writeln!(out, "edges\t{}", r.edges)?;
    writeln!(out, "triangles\t{}", r.triangles)?;
    writeln!(out, "distribution_entries\t{}", r.distribution.len())?;
    if let Some(dmax) = r.distribution.max_degree() {
        writeln!(out, "max_degree\t{dmax}")?;
    }
    match &r.loop_vertex_degree {
        Some(dv) => writeln!(out, "loop_vertex_degree\t{dv}")?,
        None => writeln!(out, "loop_vertex_degree\tnone")?,
    }
    match &r.alpha {
        Some(a) => {
            writeln!(out, "alpha_n1\t{}", a.n1)?;
            writeln!(out, "alpha_dmax\t{}", a.d_max)?;
            writeln!(out, "alpha_exactly_one\t{}", a.is_exactly_one())?;
            writeln!(out, "alpha_approx\t{:.6}", a.value)?;
        }
        None => writeln!(out, "alpha\tundefined")?,
    }
    writeln!(
        out,
        "subset_products_unique\t{}",
        r.power_law.subset_products_unique
    )?;
    writeln!(out, "power_law_valid\t{}", r.power_law_valid())
}

pub fn cmd_design(args: &DesignArgs, stdout: &mut dyn Write) -> CmdResult {
    let cfg = DesignConfig::from_path(&args.config)?;
    let report = design::design_report(&cfg.design)?;
    write_report(&cfg, &report, stdout)?;
    if let Some(path) = &args.distribution {
        let file = File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
        report.distribution.write_tsv(BufWriter::new(file))?;
        writeln!(stdout, "distribution_file\t{}", path.display())?;
    }
    Ok(EXIT_OK)
}

fn shard_dir(cli_out: &Option<PathBuf>, cfg: &DesignConfig) -> PathBuf {
    cli_out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("shards"))
}

pub fn cmd_generate(args: &GenerateArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    let cfg = DesignConfig::from_path(&args.config)?;
    let design = &cfg.design;
    let memory_budget = args.memory_budget.or(cfg.memory_budget);
    let split = args
        .split
        .or(cfg.split)
        .unwrap_or_else(|| generator::default_split(design, memory_budget));
    let workers = args.workers.or(cfg.workers).unwrap_or_else(|| {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    });
    let threads = args.threads.or(cfg.threads);
    let one_based = args.one_based || cfg.one_based;
    let out = shard_dir(&args.out, &cfg);

    let plan = generator::plan(design, split, workers, &PlanOptions { memory_budget })?;
    let start = Instant::now();
    let manifest = generator::generate_all(&plan, &out, &GenerateOptions { threads, one_based })?;
    let elapsed = start.elapsed().as_secs_f64();

    writeln!(stdout, "out\t{}", out.display())?;
    writeln!(stdout, "split\t{split}")?;
    writeln!(stdout, "workers\t{}", manifest.workers)?;
    for s in &manifest.shards {
        writeln!(stdout, "shard\t{}\t{}", s.file, s.edges)?;
    }
    writeln!(stdout, "total_edges\t{}", manifest.total_edges)?;
    writeln!(stdout, "loop_removed\t{}", manifest.loop_removed)?;
    if let Some(owner) = manifest.loop_owner {
        writeln!(stdout, "loop_owner\t{owner}")?;
    }
    writeln!(
        stderr,
        "generated {} edges in {elapsed:.3} s ({:.3e} edges/s)",
        manifest.total_edges,
        manifest.total_edges as f64 / elapsed.max(1e-9)
    )?;

    if args.incidence {
        let inc = generator::generate_incidence(
            &plan,
            &out,
            &IncidenceOptions {
                one_based,
                ..IncidenceOptions::default()
            },
        )?;
        writeln!(stdout, "incidence_edges\t{}", inc.total_edges)?;
    }

    let predicted = design::predict_edges(design)?;
    if predicted != manifest.total_edges.into() {
        writeln!(
            stderr,
            "error: emitted {} edges but the design predicts {predicted}",
            manifest.total_edges
        )?;
        return Ok(EXIT_FAIL);
    }
    Ok(EXIT_OK)
}

pub fn cmd_verify(args: &VerifyArgs, stdout: &mut dyn Write) -> CmdResult {
    let cfg = DesignConfig::from_path(&args.config)?;
    let dir = shard_dir(&args.out, &cfg);
    let predicted = design::design_report(&cfg.design)?;
    let (_, measured) = verifier::measure_run(&cfg.design, &dir, args.triangles)?;
    let report = verifier::diff(&predicted, &measured);
    write!(stdout, "{report}")?;
    Ok(if report.pass() { EXIT_OK } else { EXIT_FAIL })
}

/// Parses `args` (program name first) and runs the command.
pub fn run_from_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, stdout, stderr),
        Err(e) if e.use_stderr() => {
            let _ = write!(stderr, "{e}");
            EXIT_ERROR
        }
        Err(e) => {
            let _ = write!(stdout, "{e}");
            EXIT_OK
        }
    }
}

