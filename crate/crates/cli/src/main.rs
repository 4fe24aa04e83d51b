//! `ponvm`: generate instances, place VMs exactly or heuristically, export
//! the program for an external solver, run sweeps and check solutions.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ponvm_core::eepiv::{run_eepiv, CandidateOrder, EepivOptions};
use ponvm_core::experiments::{
    describe_failures, run_sweep, savings_summary, Aggregation, Engine, InstanceScale, SweepSpec,
};
use ponvm_core::milp::{
    build_model, export_solution, import_solution, solve_exact, validate_solution, write_model_files, ModelFormat,
    SearchLimits,
};
use ponvm_core::settings::{Scale, Settings};
use ponvm_core::topology::{build_instance, RequestAssignment};
use ponvm_core::{Error, NetworkInstance, PlacementSolution, PowerReport, Result, Scenario};

/// `println!` that ends the process quietly when stdout is a closed pipe.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        if let Err(e) = writeln!(std::io::stdout().lock(), $($arg)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
        }
    }};
}

#[derive(Parser, Debug)]
#[command(name = "ponvm", version, about = "Energy-aware VM and cloudlet placement over IoT and PON networks")]
struct Cli {
    /// TOML configuration; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "PONVM_OUT", default_value = "ponvm-out")]
    out: PathBuf,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Print a JSON summary instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the instance as nodes.csv and edges.csv.
    Generate(InstanceArgs),
    /// Solve to optimality with the exact engine.
    Solve {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Branch-and-bound node budget.
        #[arg(long)]
        max_nodes: Option<u64>,
        /// Largest candidate count per network the search accepts.
        #[arg(long)]
        max_candidates: Option<usize>,
    },
    /// Run the greedy heuristic.
    Heuristic {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Report the unweighted total without OLT processing.
        #[arg(long)]
        literal_tpc: bool,
        #[arg(long, value_enum, default_value_t = Order::BottomUp)]
        order: Order,
    },
    /// Write the mixed integer program for an external solver.
    ExportLp {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = Format::Lp)]
        format: Format,
    },
    /// Sweep scenarios, reductions, engines and seeds.
    Sweep(SweepArgs),
    /// Check a `variable value` solution file against an instance.
    Validate {
        #[arg(long)]
        solution: PathBuf,
        /// Directory holding nodes.csv and edges.csv.
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Order {
    BottomUp,
    TopDown,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Lp,
    Mps,
}

impl From<Format> for ModelFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Lp => ModelFormat::Lp,
            Format::Mps => ModelFormat::Mps,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ScaleArg {
    Paper,
    Reduced,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Assign {
    RoundRobin,
    SeededUniform,
}

#[derive(Args, Debug, Default)]
struct InstanceArgs {
    #[arg(long, value_enum)]
    scale: Option<ScaleArg>,
    /// Seed for object positions and requests.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    networks: Option<usize>,
    /// Objects per network.
    #[arg(long)]
    objects: Option<usize>,
    /// Relays per network.
    #[arg(long)]
    relays: Option<usize>,
    #[arg(long)]
    vm_types: Option<usize>,
    #[arg(long, value_enum)]
    requests: Option<Assign>,
}

impl InstanceArgs {
    fn apply(&self, s: &mut Settings) {
        let t = &mut s.topology;
        if let Some(scale) = self.scale {
            t.scale = match scale {
                ScaleArg::Paper => Scale::Paper,
                ScaleArg::Reduced => Scale::Reduced,
            };
        }
        set(&mut t.seed, self.seed);
        set(&mut t.networks, self.networks);
        set(&mut t.objects_per_network, self.objects);
        set(&mut t.relays_per_network, self.relays);
        set(&mut t.vm_types, self.vm_types);
        if let Some(a) = self.requests {
            t.request_assignment = Some(match a {
                Assign::RoundRobin => RequestAssignment::RoundRobin,
                Assign::SeededUniform => RequestAssignment::SeededUniform,
            });
        }
    }
}

#[derive(Args, Debug, Default)]
struct ModelArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    scenario: Option<u8>,
    /// Fraction of traffic removed by processing, in [0, 1).
    #[arg(long, value_parser = parse_reduction)]
    reduction: Option<f64>,
    /// Per-object demand in bps.
    #[arg(long)]
    demand: Option<f64>,
    /// Drop the one-CPU capacity rows.
    #[arg(long)]
    no_capacity: bool,
}

impl ModelArgs {
    fn apply(&self, s: &mut Settings) {
        let m = &mut s.model;
        set(&mut m.scenario, self.scenario);
        set(&mut m.reduction, self.reduction);
        set(&mut m.demand_bps, self.demand);
        if self.no_capacity {
            m.capacity_enforced = Some(false);
        }
    }
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Comma-separated scenario numbers.
    #[arg(long, default_value = "1,2,3", value_delimiter = ',', value_parser = parse_scenario)]
    scenarios: Vec<Scenario>,
    /// Comma-separated reductions.
    #[arg(long, default_value = "0.1,0.3,0.5,0.7,0.9", value_delimiter = ',', value_parser = parse_reduction)]
    reductions: Vec<f64>,
    /// Comma-separated engines: exact, eepiv, lp-export.
    #[arg(long = "engine", default_value = "eepiv", value_delimiter = ',')]
    engines: Vec<Engine>,
    /// Seeds as a list and/or inclusive ranges, e.g. `1..10` or `1,4,9`.
    #[arg(long, default_value = "7", value_delimiter = ',', value_parser = parse_seeds)]
    seeds: Vec<SeedSpan>,
    #[arg(long, value_enum, default_value_t = ScaleArg::Paper)]
    scale: ScaleArg,
    /// Relays per network at reduced scale.
    #[arg(long, default_value_t = 4)]
    relays: usize,
    /// Objects per network at reduced scale.
    #[arg(long, default_value_t = 24)]
    objects: usize,
    #[arg(long, default_value_t = 4)]
    vm_types: usize,
    #[arg(long)]
    no_capacity: bool,
    #[arg(long)]
    literal_tpc: bool,
    #[arg(long, value_enum, default_value_t = Format::Lp)]
    format: Format,
}

fn set<T>(slot: &mut Option<T>, value: Option<T>) {
    if value.is_some() {
        *slot = value;
    }
}

fn parse_reduction(s: &str) -> std::result::Result<f64, String> {
    let r: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..1.0).contains(&r) {
        Ok(r)
    } else {
        Err(format!("reduction {r} outside [0, 1)"))
    }
}

fn parse_scenario(s: &str) -> std::result::Result<Scenario, String> {
    let n: u8 = s.trim().parse().map_err(|_| format!("`{s}` is not a scenario number"))?;
    Scenario::from_number(n).map_err(|e| e.to_string())
}

/// One seed or an inclusive `a..b` range.
#[derive(Clone, Debug)]
struct SeedSpan(u64, u64);

fn parse_seeds(s: &str) -> std::result::Result<SeedSpan, String> {
    let num = |x: &str| x.trim().parse::<u64>().map_err(|_| format!("`{x}` is not a seed"));
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty seed range {s}"));
            }
            Ok(SeedSpan(a, b))
        }
        None => num(s).map(|n| SeedSpan(n, n)),
    }
}

fn load_settings(cli: &Cli) -> Result<Settings> {
    match &cli.config {
        Some(path) => Settings::load(path),
        None => Ok(Settings::default()),
    }
}

fn instance_from(settings: &Settings) -> Result<NetworkInstance> {
    build_instance(&settings.topology_config::<f64>())
}

/// Records the model settings of a run so `validate --config` can reuse them.
fn write_run_config(dir: &Path, settings: &Settings) -> Result<PathBuf> {
    let m = &settings.model;
    let mut text = String::from("[model]\n");
    text.push_str(&format!("scenario = {}\n", settings.scenario()?.number()));
    text.push_str(&format!("reduction = {}\n", settings.reduction()));
    if let Some(v) = m.capacity_enforced {
        text.push_str(&format!("capacity_enforced = {v}\n"));
    }
    if let Some(v) = m.demand_bps {
        text.push_str(&format!("demand_bps = {v}\n"));
    }
    let path = dir.join("run.toml");
    fs::write(&path, text)?;
    Ok(path)
}

fn placement_lines(instance: &NetworkInstance, solution: &PlacementSolution) -> Vec<String> {
    solution
        .hosted(instance)
        .into_iter()
        .map(|(layer, network, vm, node)| {
            let net = network.map_or("olt".to_string(), |n| n.to_string());
            format!("{layer} {net} {vm} {node}")
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn report_run(
    cli: &Cli,
    engine: &str,
    settings: &Settings,
    instance: &NetworkInstance,
    solution: &PlacementSolution,
    report: &PowerReport,
    extra: serde_json::Value,
    files: &[PathBuf],
) -> Result<()> {
    let scenario = settings.scenario()?;
    let placement = placement_lines(instance, solution);
    if cli.json {
        let value = json!({
            "engine": engine,
            "scenario": scenario.number(),
            "reduction": settings.reduction(),
            "total_w": report.total_w,
            "processing_w": report.processing_total(),
            "traffic_w": report.traffic_total(),
            "vms": solution.vm_count(),
            "cloudlets": solution.cloudlet_count(),
            "placement": placement,
            "extra": extra,
            "files": files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        });
        out!("{value}");
    } else {
        out!(
            "{engine} scenario={} reduction={} total_w={} processing_w={} traffic_w={} vms={} cloudlets={}",
            scenario,
            settings.reduction(),
            report.total_w,
            report.processing_total(),
            report.traffic_total(),
            solution.vm_count(),
            solution.cloudlet_count()
        );
        if let serde_json::Value::Object(map) = &extra {
            for (k, v) in map {
                out!("{k}={v}");
            }
        }
        out!("layer network vm_type node");
        for line in placement {
            out!("{line}");
        }
        for f in files {
            out!("wrote {}", f.display());
        }
    }
    Ok(())
}

fn write_report(dir: &Path, report: &PowerReport, scenario: Scenario, reduction: f64) -> Result<PathBuf> {
    let path = dir.join("report.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(ponvm_core::power::REPORT_CSV_HEADER)?;
    report.write_csv_rows(&mut w, scenario, reduction)?;
    w.flush()?;
    Ok(path)
}

fn run(cli: &Cli) -> Result<()> {
    let mut settings = load_settings(cli)?;
    match &cli.command {
        Command::Generate(args) => {
            args.apply(&mut settings);
            let instance = instance_from(&settings)?;
            instance.write_csv(&cli.out)?;
            if cli.json {
                out!(
                    "{}",
                    json!({"nodes": instance.nodes().len(), "links": instance.links().len(), "candidates": instance.candidates().len(), "dir": cli.out.display().to_string()})
                );
            } else {
                out!(
                    "nodes={} links={} candidates={} dir={}",
                    instance.nodes().len(),
                    instance.links().len(),
                    instance.candidates().len(),
                    cli.out.display()
                );
            }
            Ok(())
        }
        Command::Solve { instance: iargs, model, max_nodes, max_candidates } => {
            iargs.apply(&mut settings);
            model.apply(&mut settings);
            let scenario = settings.scenario()?;
            let params = settings.model_params::<f64>(scenario, settings.reduction())?;
            let instance = instance_from(&settings)?;
            let mut limits = SearchLimits::default();
            set_value(&mut limits.max_nodes, *max_nodes);
            set_value(&mut limits.max_candidates_per_network, *max_candidates);
            let out = solve_exact(&instance, &params, &limits)?;
            let files = write_solution_dir(&cli.out, &settings, &instance, &out.solution, &out.flows, &out.report)?;
            report_run(
                cli,
                "exact",
                &settings,
                &instance,
                &out.solution,
                &out.report,
                json!({"nodes_visited": out.nodes_visited}),
                &files,
            )
        }
        Command::Heuristic { instance: iargs, model, literal_tpc, order } => {
            iargs.apply(&mut settings);
            model.apply(&mut settings);
            let scenario = settings.scenario()?;
            let params = settings.model_params::<f64>(scenario, settings.reduction())?;
            let instance = instance_from(&settings)?;
            let options = EepivOptions {
                order: match order {
                    Order::BottomUp => CandidateOrder::BottomUp,
                    Order::TopDown => CandidateOrder::TopDown,
                },
                literal_tpc: *literal_tpc,
            };
            let out = run_eepiv(&instance, &params, &options)?;
            let files = write_solution_dir(&cli.out, &settings, &instance, &out.solution, &out.flows, &out.report)?;
            report_run(
                cli,
                "eepiv",
                &settings,
                &instance,
                &out.solution,
                &out.report,
                json!({"served": out.served_count, "objects": instance.objects().len(), "tpc_w": out.tpc}),
                &files,
            )
        }
        Command::ExportLp { instance: iargs, model, format } => {
            iargs.apply(&mut settings);
            model.apply(&mut settings);
            let scenario = settings.scenario()?;
            let params = settings.model_params::<f64>(scenario, settings.reduction())?;
            let instance = instance_from(&settings)?;
            let milp = build_model(&instance, &params)?;
            let (model_path, names) = write_model_files(&milp, &cli.out, (*format).into())?;
            instance.write_csv(&cli.out.join("instance"))?;
            let counts = milp.counts();
            if cli.json {
                out!(
                    "{}",
                    json!({"variables": milp.vars.len(), "binaries": counts.binaries, "rows": counts.rows, "model": model_path.display().to_string(), "names": names.display().to_string()})
                );
            } else {
                out!("variables={} binaries={} rows={}", milp.vars.len(), counts.binaries, counts.rows);
                out!("wrote {}", model_path.display());
                out!("wrote {}", names.display());
            }
            Ok(())
        }
        Command::Sweep(args) => {
            if args.no_capacity {
                settings.model.capacity_enforced = Some(false);
            }
            let spec = SweepSpec {
                scenarios: args.scenarios.clone(),
                reductions: args.reductions.clone(),
                engines: args.engines.clone(),
                seeds: args.seeds.iter().flat_map(|s| s.0..=s.1).collect(),
                scale: match args.scale {
                    ScaleArg::Paper => InstanceScale::Paper,
                    ScaleArg::Reduced => {
                        InstanceScale::Reduced { relays: args.relays, objects: args.objects, vm_types: args.vm_types }
                    }
                },
                settings,
                eepiv: EepivOptions { literal_tpc: args.literal_tpc, ..Default::default() },
                export_dir: Some(cli.out.join("models")),
                export_format: args.format.into(),
                jobs: cli.jobs,
                ..Default::default()
            };
            let result = run_sweep(&spec)?;
            let files = result.write_outputs(&cli.out)?;
            let failures = describe_failures(&result);
            let savings = savings_summary(&result).ok();
            if cli.json {
                let rows: Vec<serde_json::Value> = savings
                    .iter()
                    .flat_map(|t| t.rows.iter())
                    .filter(|r| r.aggregation == Aggregation::Summed)
                    .map(|r| json!({"engine": r.engine.name(), "versus": r.versus.number(), "saving": r.saving, "reference": r.reference}))
                    .collect();
                out!(
                    "{}",
                    json!({"cells": result.cells.len(), "failed": failures, "savings": rows, "files": files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>()})
                );
            } else {
                out!("cells={} failed={}", result.cells.len(), failures.len());
                for f in &failures {
                    out!("failed {f}");
                }
                for r in savings.iter().flat_map(|t| t.rows.iter()).filter(|r| r.aggregation == Aggregation::Summed) {
                    let reference = r.reference.map_or(String::new(), |p| format!(" reference={:.0}%", 100.0 * p));
                    out!(
                        "saving {} vs scenario {}: {:.2}% (seeds {:.2}%..{:.2}%){reference}",
                        r.engine,
                        r.versus,
                        100.0 * r.saving,
                        100.0 * r.seed_min,
                        100.0 * r.seed_max
                    );
                }
                for f in &files {
                    out!("wrote {}", f.display());
                }
            }
            Ok(())
        }
        Command::Validate { solution, instance, model } => {
            model.apply(&mut settings);
            let scenario = settings.scenario()?;
            let params = settings.model_params::<f64>(scenario, settings.reduction())?;
            let inst = NetworkInstance::read_csv(instance, 1)?;
            let text = fs::read_to_string(solution)?;
            let (sol, flows) = import_solution(&inst, &text)?;
            let report = validate_solution(&sol, &flows, &inst, &params);
            fs::create_dir_all(&cli.out)?;
            let path = cli.out.join("validation.csv");
            report.write_csv(fs::File::create(&path)?)?;
            if cli.json {
                out!(
                    "{}",
                    json!({"violations": report.violations.len(), "by_family": report.by_family(), "objective_w": report.objective, "file": path.display().to_string()})
                );
            } else {
                out!("violations={} objective_w={}", report.violations.len(), report.objective);
                for (family, n) in report.by_family() {
                    out!("{family} {n}");
                }
                out!("wrote {}", path.display());
            }
            if report.is_clean() {
                Ok(())
            } else {
                Err(Error::Validation(format!("{} violated rows", report.violations.len())))
            }
        }
    }
}

fn set_value<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn write_solution_dir(
    dir: &Path,
    settings: &Settings,
    instance: &NetworkInstance,
    solution: &PlacementSolution,
    flows: &ponvm_core::FlowAssignment,
    report: &PowerReport,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let inst_dir = dir.join("instance");
    instance.write_csv(&inst_dir)?;
    let sol = dir.join("solution.txt");
    fs::write(&sol, export_solution(instance, solution, flows))?;
    let rep = write_report(dir, report, settings.scenario()?, settings.reduction())?;
    let run = write_run_config(dir, settings)?;
    Ok(vec![inst_dir, sol, rep, run])
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {e}", e.kind());
            ExitCode::from(1)
        }
    }
}
