//! Scenario sweeps and the savings summary.
//!
//! A sweep runs every (scenario, reduction, engine, seed) cell, in parallel,
//! and keeps results in cell order so output never depends on scheduling.
//! Sweeps work in `f64`.

use std::fmt;
use std::fs::{self, File};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::eepiv::{run_eepiv, EepivOptions};
use crate::error::{Error, Result};
use crate::milp::{build_model, solve_exact, write_model_files, ModelFormat, SearchLimits};
use crate::power::{format_pct, PowerReport, Scenario, REPORT_CSV_HEADER};
use crate::settings::{Scale, Settings};
use crate::topology::{build_instance, LayerKind, NetworkInstance};

/// Reduction percentages of the evaluation.
pub const DEFAULT_REDUCTIONS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Engine {
    Exact,
    Eepiv,
    LpExport,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Exact => "exact",
            Engine::Eepiv => "eepiv",
            Engine::LpExport => "lp-export",
        }
    }

    /// Reference savings of scenario 1 against scenarios 2 and 3.
    pub fn reference_savings(self) -> Option<[f64; 2]> {
        match self {
            Engine::Exact => Some([0.17, 0.19]),
            Engine::Eepiv => Some([0.17, 0.17]),
            Engine::LpExport => None,
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Engine::Exact),
            "eepiv" => Ok(Engine::Eepiv),
            "lp-export" | "lp" => Ok(Engine::LpExport),
            other => Err(Error::Config(format!("unknown engine `{other}` (exact, eepiv, lp-export)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InstanceScale {
    Paper,
    Reduced { relays: usize, objects: usize, vm_types: usize },
}

impl InstanceScale {
    pub fn reduced() -> Self {
        InstanceScale::Reduced { relays: 4, objects: 24, vm_types: 4 }
    }
}

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub scenarios: Vec<Scenario>,
    pub reductions: Vec<f64>,
    pub engines: Vec<Engine>,
    pub seeds: Vec<u64>,
    pub scale: InstanceScale,
    /// Further topology and model overrides; its scale and seed are replaced
    /// by the fields above.
    pub settings: Settings,
    pub limits: SearchLimits,
    pub eepiv: EepivOptions,
    /// Where `lp-export` cells write their models.
    pub export_dir: Option<PathBuf>,
    pub export_format: ModelFormat,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            scenarios: Scenario::ALL.to_vec(),
            reductions: DEFAULT_REDUCTIONS.to_vec(),
            engines: vec![Engine::Eepiv],
            seeds: vec![7],
            scale: InstanceScale::Paper,
            settings: Settings::default(),
            limits: SearchLimits::default(),
            eepiv: EepivOptions::default(),
            export_dir: None,
            export_format: ModelFormat::Lp,
            jobs: None,
        }
    }
}

impl SweepSpec {
    fn validate(&self) -> Result<()> {
        let empty = [
            ("scenarios", self.scenarios.is_empty()),
            ("reductions", self.reductions.is_empty()),
            ("engines", self.engines.is_empty()),
            ("seeds", self.seeds.is_empty()),
        ];
        if let Some((name, _)) = empty.iter().find(|(_, e)| *e) {
            return Err(Error::Config(format!("sweep needs at least one entry in {name}")));
        }
        if let Some(r) = self.reductions.iter().find(|r| !(**r >= 0.0 && **r < 1.0)) {
            return Err(Error::Config(format!("reduction {r} outside [0, 1)")));
        }
        if self.engines.contains(&Engine::LpExport) && self.export_dir.is_none() {
            return Err(Error::Config("lp-export cells need an output directory".into()));
        }
        Ok(())
    }

    fn settings_for(&self, seed: u64) -> Settings {
        let mut s = self.settings.clone();
        s.topology.seed = Some(seed);
        match self.scale {
            InstanceScale::Paper => s.topology.scale = Scale::Paper,
            InstanceScale::Reduced { relays, objects, vm_types } => {
                s.topology.scale = Scale::Reduced;
                s.topology.relays_per_network = Some(relays);
                s.topology.objects_per_network = Some(objects);
                s.topology.vm_types = Some(vm_types);
            }
        }
        s
    }
}

/// Instances hosted per (layer, network, VM type).
#[derive(Clone, Debug, PartialEq)]
pub struct PlacementRow {
    pub layer: LayerKind,
    pub network: Option<usize>,
    pub vm_type: usize,
    pub hosted: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CellOutcome {
    Solved {
        report: PowerReport<f64>,
        placements: Vec<PlacementRow>,
        served_count: usize,
        objects: usize,
        vm_count: usize,
        cloudlets: usize,
    },
    Exported {
        path: PathBuf,
        variables: usize,
        rows: usize,
    },
    Failed {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub scenario: Scenario,
    pub reduction: f64,
    pub engine: Engine,
    pub seed: u64,
    pub outcome: CellOutcome,
    pub wall_ms: f64,
}

impl Cell {
    pub fn report(&self) -> Option<&PowerReport<f64>> {
        match &self.outcome {
            CellOutcome::Solved { report, .. } => Some(report),
            _ => None,
        }
    }

    fn key(&self) -> String {
        format!("scenario {} r={} {} seed {}", self.scenario, format_pct(self.reduction), self.engine, self.seed)
    }
}

/// Mean, min and max of the total over seeds for one (scenario, r, engine).
#[derive(Clone, Debug, PartialEq)]
pub struct Aggregate {
    pub scenario: Scenario,
    pub reduction: f64,
    pub engine: Engine,
    pub seeds: usize,
    pub mean_total: f64,
    pub min_total: f64,
    pub max_total: f64,
    pub mean_processing: f64,
    pub mean_traffic: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub cells: Vec<Cell>,
}

fn placement_rows(hosted: &[(LayerKind, Option<usize>, usize, usize)]) -> Vec<PlacementRow> {
    let mut rows: Vec<PlacementRow> = Vec::new();
    for &(layer, network, vm_type, _) in hosted {
        match rows.iter_mut().find(|r| r.layer == layer && r.network == network && r.vm_type == vm_type) {
            Some(r) => r.hosted += 1,
            None => rows.push(PlacementRow { layer, network, vm_type, hosted: 1 }),
        }
    }
    rows.sort_by_key(|r| (r.layer.index(), r.network.map_or(usize::MAX, |n| n), r.vm_type));
    rows
}

fn run_cell(
    spec: &SweepSpec,
    settings: &Settings,
    instance: &NetworkInstance<f64>,
    scenario: Scenario,
    reduction: f64,
    engine: Engine,
    seed: u64,
) -> CellOutcome {
    let fail = |e: Error| {
        let mut reason = e.to_string();
        if matches!(e, Error::Budget(_)) {
            reason.push_str(" (run the exact engine at reduced scale)");
        }
        CellOutcome::Failed { reason }
    };
    let params = match settings.model_params::<f64>(scenario, reduction) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let solved = |solution: &crate::solution::PlacementSolution<f64>, report: PowerReport<f64>, served| {
        CellOutcome::Solved {
            placements: placement_rows(&solution.hosted(instance)),
            served_count: served,
            objects: instance.objects().len(),
            vm_count: solution.vm_count(),
            cloudlets: solution.cloudlet_count(),
            report,
        }
    };
    match engine {
        Engine::Exact => match solve_exact(instance, &params, &spec.limits) {
            Ok(out) => solved(&out.solution, out.report, instance.objects().len()),
            Err(e) => fail(e),
        },
        Engine::Eepiv => match run_eepiv(instance, &params, &spec.eepiv) {
            Ok(out) => solved(&out.solution, out.report, out.served_count),
            Err(e) => fail(e),
        },
        Engine::LpExport => {
            let dir = spec
                .export_dir
                .as_ref()
                .expect("validated")
                .join(format!("s{}_r{}_seed{seed}", scenario, format_pct(reduction)));
            let result = build_model(instance, &params).and_then(|model| {
                let counts = model.counts();
                let (path, _) = write_model_files(&model, &dir, spec.export_format)?;
                Ok(CellOutcome::Exported { path, variables: model.vars.len(), rows: counts.rows })
            });
            result.unwrap_or_else(fail)
        }
    }
}

/// Runs every cell of `spec`.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let run = || -> Result<SweepResult> {
        let instances: Vec<(Settings, Result<NetworkInstance<f64>>)> = spec
            .seeds
            .par_iter()
            .map(|&seed| {
                let settings = spec.settings_for(seed);
                let instance = build_instance(&settings.topology_config::<f64>());
                (settings, instance)
            })
            .collect();
        let mut keys = Vec::new();
        for &scenario in &spec.scenarios {
            for &reduction in &spec.reductions {
                for &engine in &spec.engines {
                    for (i, &seed) in spec.seeds.iter().enumerate() {
                        keys.push((scenario, reduction, engine, seed, i));
                    }
                }
            }
        }
        let cells = keys
            .par_iter()
            .map(|&(scenario, reduction, engine, seed, i)| {
                let start = Instant::now();
                let (settings, instance) = &instances[i];
                let outcome = match instance {
                    Ok(inst) => run_cell(spec, settings, inst, scenario, reduction, engine, seed),
                    Err(e) => CellOutcome::Failed { reason: e.to_string() },
                };
                Cell { scenario, reduction, engine, seed, outcome, wall_ms: start.elapsed().as_secs_f64() * 1e3 }
            })
            .collect();
        Ok(SweepResult { cells })
    };
    match spec.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(run),
        None => run(),
    }
}

impl SweepResult {
    pub fn failed(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(|c| matches!(c.outcome, CellOutcome::Failed { .. }))
    }

    pub fn find(&self, scenario: Scenario, reduction: f64, engine: Engine, seed: u64) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.scenario == scenario && c.reduction == reduction && c.engine == engine && c.seed == seed)
    }

    /// Seed statistics per (scenario, r, engine) over solved cells.
    pub fn aggregate(&self) -> Vec<Aggregate> {
        let mut out: Vec<Aggregate> = Vec::new();
        for cell in &self.cells {
            let Some(report) = cell.report() else { continue };
            let total = report.total_w;
            match out
                .iter_mut()
                .find(|a| a.scenario == cell.scenario && a.reduction == cell.reduction && a.engine == cell.engine)
            {
                Some(a) => {
                    a.seeds += 1;
                    a.mean_total += total;
                    a.min_total = a.min_total.min(total);
                    a.max_total = a.max_total.max(total);
                    a.mean_processing += report.processing_total();
                    a.mean_traffic += report.traffic_total();
                }
                None => out.push(Aggregate {
                    scenario: cell.scenario,
                    reduction: cell.reduction,
                    engine: cell.engine,
                    seeds: 1,
                    mean_total: total,
                    min_total: total,
                    max_total: total,
                    mean_processing: report.processing_total(),
                    mean_traffic: report.traffic_total(),
                }),
            }
        }
        for a in &mut out {
            let n = a.seeds as f64;
            a.mean_total /= n;
            a.mean_processing /= n;
            a.mean_traffic /= n;
        }
        out
    }

    /// Writes `sweep.csv`, `placements.csv` and `cells.csv`, plus
    /// `savings.csv` when the result supports a summary.
    pub fn write_outputs(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();

        let path = dir.join("sweep.csv");
        let mut w = csv::Writer::from_path(&path)?;
        let mut header: Vec<&str> = REPORT_CSV_HEADER.to_vec();
        header.extend(["engine", "seed"]);
        w.write_record(&header)?;
        for cell in &self.cells {
            let Some(report) = cell.report() else { continue };
            for record in report.csv_records(cell.scenario, cell.reduction) {
                let mut row = record.to_vec();
                row.extend([cell.engine.to_string(), cell.seed.to_string()]);
                w.write_record(&row)?;
            }
        }
        w.flush()?;
        written.push(path);

        let path = dir.join("placements.csv");
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["scenario", "reduction_pct", "engine", "seed", "layer", "network", "vm_type", "hosted"])?;
        for cell in &self.cells {
            let CellOutcome::Solved { placements, .. } = &cell.outcome else { continue };
            for p in placements {
                w.write_record([
                    cell.scenario.to_string(),
                    format_pct(cell.reduction),
                    cell.engine.to_string(),
                    cell.seed.to_string(),
                    p.layer.name().to_string(),
                    p.network.map_or("olt".to_string(), |n| n.to_string()),
                    p.vm_type.to_string(),
                    p.hosted.to_string(),
                ])?;
            }
        }
        w.flush()?;
        written.push(path);

        let path = dir.join("cells.csv");
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record([
            "scenario", "reduction_pct", "engine", "seed", "status", "total_w", "served", "objects", "vms",
            "cloudlets", "wall_ms", "detail",
        ])?;
        for cell in &self.cells {
            let base = [cell.scenario.to_string(), format_pct(cell.reduction), cell.engine.to_string(), cell.seed.to_string()];
            let rest: [String; 8] = match &cell.outcome {
                CellOutcome::Solved { report, served_count, objects, vm_count, cloudlets, .. } => [
                    "solved".into(),
                    report.total_w.to_string(),
                    served_count.to_string(),
                    objects.to_string(),
                    vm_count.to_string(),
                    cloudlets.to_string(),
                    format!("{:.3}", cell.wall_ms),
                    String::new(),
                ],
                CellOutcome::Exported { path, variables, rows } => [
                    "exported".into(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    format!("{:.3}", cell.wall_ms),
                    format!("{} ({variables} variables, {rows} rows)", path.display()),
                ],
                CellOutcome::Failed { reason } => [
                    "failed".into(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    format!("{:.3}", cell.wall_ms),
                    reason.clone(),
                ],
            };
            let row: Vec<String> = base.into_iter().chain(rest).collect();
            w.write_record(&row)?;
        }
        w.flush()?;
        written.push(path);

        if let Ok(summary) = savings_summary(self) {
            let path = dir.join("savings.csv");
            summary.write_csv(File::create(&path)?)?;
            written.push(path);
        }
        Ok(written)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Aggregation {
    /// Totals summed over every reduction, then compared.
    Summed,
    /// Per-reduction savings, averaged.
    PerReductionMean,
    /// The saving at one reduction.
    AtReduction(f64),
}

impl Aggregation {
    fn label(&self) -> (&'static str, String) {
        match self {
            Aggregation::Summed => ("summed", String::new()),
            Aggregation::PerReductionMean => ("per_r_mean", String::new()),
            Aggregation::AtReduction(r) => ("per_r", format_pct(*r)),
        }
    }
}

/// Relative saving `(S_k - S_1) / S_k` of scenario 1 against scenario `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SavingsRow {
    pub engine: Engine,
    pub versus: Scenario,
    pub aggregation: Aggregation,
    /// From seed-averaged totals.
    pub saving: f64,
    /// Spread of the same figure computed seed by seed.
    pub seed_min: f64,
    pub seed_max: f64,
    /// Reference value to compare against, when one exists.
    pub reference: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SavingsTable {
    pub rows: Vec<SavingsRow>,
}

impl SavingsTable {
    pub fn get(&self, engine: Engine, versus: Scenario, aggregation: Aggregation) -> Option<&SavingsRow> {
        self.rows.iter().find(|r| r.engine == engine && r.versus == versus && r.aggregation == aggregation)
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(w);
        w.write_record([
            "engine", "versus_scenario", "aggregation", "reduction_pct", "saving_pct", "seed_min_pct", "seed_max_pct",
            "reference_pct",
        ])?;
        let pct = |x: f64| format!("{:.4}", 100.0 * x);
        for r in &self.rows {
            let (agg, red) = r.aggregation.label();
            w.write_record([
                r.engine.to_string(),
                r.versus.to_string(),
                agg.to_string(),
                red,
                pct(r.saving),
                pct(r.seed_min),
                pct(r.seed_max),
                r.reference.map(pct).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn saving(base: f64, other: f64) -> f64 {
    (other - base) / other
}

/// Savings of scenario 1 against each other scenario, per solving engine.
pub fn savings_summary(result: &SweepResult) -> Result<SavingsTable> {
    let mut engines: Vec<Engine> = result.cells.iter().map(|c| c.engine).filter(|e| *e != Engine::LpExport).collect();
    engines.sort();
    engines.dedup();
    if engines.is_empty() {
        return Err(Error::MissingCells("no solved engine in the result".into()));
    }
    let mut rows = Vec::new();
    for engine in engines {
        let cells: Vec<&Cell> = result.cells.iter().filter(|c| c.engine == engine).collect();
        let mut reductions: Vec<f64> = cells.iter().map(|c| c.reduction).collect();
        reductions.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        reductions.dedup();
        let mut seeds: Vec<u64> = cells.iter().map(|c| c.seed).collect();
        seeds.sort_unstable();
        seeds.dedup();
        let others: Vec<Scenario> = [Scenario::Two, Scenario::Three]
            .into_iter()
            .filter(|s| cells.iter().any(|c| c.scenario == *s))
            .collect();
        if others.is_empty() || !cells.iter().any(|c| c.scenario == Scenario::One) {
            return Err(Error::MissingCells(format!(
                "{engine}: savings need scenario 1 and at least one of scenarios 2 and 3"
            )));
        }

        let mut missing = Vec::new();
        let mut total = |s: Scenario, r: f64, seed: u64| -> f64 {
            match cells.iter().find(|c| c.scenario == s && c.reduction == r && c.seed == seed).and_then(|c| c.report()) {
                Some(rep) => rep.total_w,
                None => {
                    missing.push(format!("scenario {s} r={} {engine} seed {seed}", format_pct(r)));
                    f64::NAN
                }
            }
        };
        // totals[s][r][seed]
        let mut grid = Vec::new();
        for s in std::iter::once(Scenario::One).chain(others.iter().copied()) {
            let per_r: Vec<Vec<f64>> =
                reductions.iter().map(|&r| seeds.iter().map(|&seed| total(s, r, seed)).collect()).collect();
            grid.push((s, per_r));
        }
        if !missing.is_empty() {
            return Err(Error::MissingCells(missing.join(", ")));
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let base = &grid[0].1;
        for (versus, other) in grid.iter().skip(1) {
            let reference = engine.reference_savings().map(|p| p[if *versus == Scenario::Two { 0 } else { 1 }]);
            let spread = |f: &dyn Fn(usize) -> f64| {
                let v: Vec<f64> = (0..seeds.len()).map(f).collect();
                (v.iter().copied().fold(f64::INFINITY, f64::min), v.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            };

            let summed = |g: &Vec<Vec<f64>>, seed: Option<usize>| -> f64 {
                g.iter().map(|per_seed| seed.map_or_else(|| mean(per_seed), |i| per_seed[i])).sum()
            };
            let (lo, hi) = spread(&|i| saving(summed(base, Some(i)), summed(other, Some(i))));
            rows.push(SavingsRow {
                engine,
                versus: *versus,
                aggregation: Aggregation::Summed,
                saving: saving(summed(base, None), summed(other, None)),
                seed_min: lo,
                seed_max: hi,
                reference,
            });

            let per_r_mean = |seed: Option<usize>| -> f64 {
                let v: Vec<f64> = (0..reductions.len())
                    .map(|j| {
                        let pick = |g: &Vec<Vec<f64>>| seed.map_or_else(|| mean(&g[j]), |i| g[j][i]);
                        saving(pick(base), pick(other))
                    })
                    .collect();
                mean(&v)
            };
            let (lo, hi) = spread(&|i| per_r_mean(Some(i)));
            rows.push(SavingsRow {
                engine,
                versus: *versus,
                aggregation: Aggregation::PerReductionMean,
                saving: per_r_mean(None),
                seed_min: lo,
                seed_max: hi,
                reference,
            });

            for (j, &r) in reductions.iter().enumerate() {
                let (lo, hi) = spread(&|i| saving(base[j][i], other[j][i]));
                rows.push(SavingsRow {
                    engine,
                    versus: *versus,
                    aggregation: Aggregation::AtReduction(r),
                    saving: saving(mean(&base[j]), mean(&other[j])),
                    seed_min: lo,
                    seed_max: hi,
                    reference: None,
                });
            }
        }
    }
    Ok(SavingsTable { rows })
}

/// Keys of cells that did not produce a report, for error messages.
pub fn describe_failures(result: &SweepResult) -> Vec<String> {
    result
        .failed()
        .map(|c| match &c.outcome {
            CellOutcome::Failed { reason } => format!("{}: {reason}", c.key()),
            _ => unreachable!(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::power::LayerMap;

    fn fake(scenario: Scenario, reduction: f64, total: f64) -> Cell {
        let mut report = PowerReport::zero();
        report.processing_w = LayerMap([0.0, total, 0.0, 0.0, 0.0, 0.0]);
        report.total_w = total;
        Cell {
            scenario,
            reduction,
            engine: Engine::Eepiv,
            seed: 1,
            outcome: CellOutcome::Solved {
                report,
                placements: Vec::new(),
                served_count: 0,
                objects: 0,
                vm_count: 0,
                cloudlets: 0,
            },
            wall_ms: 0.0,
        }
    }

    #[test]
    fn saving_definition() {
        let result = SweepResult { cells: vec![fake(Scenario::One, 0.5, 81.0), fake(Scenario::Two, 0.5, 100.0)] };
        let table = savings_summary(&result).unwrap();
        let row = table.get(Engine::Eepiv, Scenario::Two, Aggregation::Summed).unwrap();
        assert!((row.saving - 0.19).abs() < 1e-12);
        assert_eq!(row.reference, Some(0.17));
    }

    #[test]
    fn single_scenario_is_an_error() {
        let result = SweepResult { cells: vec![fake(Scenario::One, 0.5, 81.0)] };
        assert_eq!(savings_summary(&result).unwrap_err().kind(), "missing_cells");
    }

    #[test]
    fn missing_cells_are_named() {
        let result = SweepResult {
            cells: vec![fake(Scenario::One, 0.5, 81.0), fake(Scenario::Two, 0.5, 100.0), fake(Scenario::Two, 0.1, 90.0)],
        };
        let err = savings_summary(&result).unwrap_err();
        assert!(err.to_string().contains("scenario 1 r=10"), "{err}");
    }

    #[test]
    fn empty_reductions_rejected() {
        let spec = SweepSpec { reductions: vec![], ..Default::default() };
        assert_eq!(run_sweep(&spec).unwrap_err().kind(), "config");
    }

    #[test]
    fn full_scale_heuristic_sweep() {
        let result = run_sweep(&SweepSpec::default()).unwrap();
        assert_eq!(result.cells.len(), 15);
        for cell in &result.cells {
            let CellOutcome::Solved { placements, .. } = &cell.outcome else { panic!("{cell:?}") };
            if cell.reduction >= 0.5 {
                assert!(placements.iter().all(|p| p.layer == LayerKind::Relay));
            }
        }
    }

    #[test]
    fn processing_power_orders_the_scenarios_at_low_reduction() {
        for (engine, scale) in [(Engine::Eepiv, InstanceScale::Paper), (Engine::Exact, InstanceScale::reduced())] {
            let spec = SweepSpec { reductions: vec![0.1], engines: vec![engine], scale, ..Default::default() };
            let agg = run_sweep(&spec).unwrap().aggregate();
            let p: Vec<f64> = Scenario::ALL
                .iter()
                .map(|&s| agg.iter().find(|a| a.scenario == s).unwrap().mean_processing)
                .collect();
            assert!(p[0] <= p[1] + 1e-12 && p[1] <= p[2] + 1e-12, "{engine}: {p:?}");
        }
    }

    #[test]
    fn reduced_exact_consolidates_at_the_olt() {
        let spec = SweepSpec {
            scenarios: vec![Scenario::Two],
            reductions: vec![0.1],
            engines: vec![Engine::Exact],
            scale: InstanceScale::reduced(),
            ..Default::default()
        };
        let result = run_sweep(&spec).unwrap();
        let CellOutcome::Solved { placements, .. } = &result.cells[0].outcome else { panic!() };
        assert!(placements.iter().any(|p| p.layer == LayerKind::Olt));
    }

    #[test]
    fn exact_at_full_scale_fails_with_guidance() {
        let spec = SweepSpec {
            scenarios: vec![Scenario::One],
            reductions: vec![0.5],
            engines: vec![Engine::Exact],
            ..Default::default()
        };
        let result = run_sweep(&spec).unwrap();
        let CellOutcome::Failed { reason } = &result.cells[0].outcome else { panic!() };
        assert!(reason.contains("reduced scale"));
    }

    #[test]
    fn job_count_does_not_change_results() {
        let spec = SweepSpec { scale: InstanceScale::reduced(), engines: vec![Engine::Exact, Engine::Eepiv], ..Default::default() };
        let strip = |r: SweepResult| r.cells.into_iter().map(|c| (c.key(), c.outcome)).collect::<Vec<_>>();
        let one = strip(run_sweep(&SweepSpec { jobs: Some(1), ..spec.clone() }).unwrap());
        let four = strip(run_sweep(&SweepSpec { jobs: Some(4), ..spec }).unwrap());
        assert_eq!(one, four);
    }

    #[test]
    fn outputs_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let spec = SweepSpec {
            scale: InstanceScale::Reduced { relays: 1, objects: 4, vm_types: 2 },
            engines: vec![Engine::Eepiv, Engine::LpExport],
            reductions: vec![0.5],
            export_dir: Some(dir.path().join("models")),
            ..Default::default()
        };
        let result = run_sweep(&spec).unwrap();
        let files = result.write_outputs(dir.path()).unwrap();
        let names: Vec<String> = files.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect();
        assert_eq!(names, ["sweep.csv", "placements.csv", "cells.csv", "savings.csv"]);
        let sweep = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
        assert_eq!(sweep.lines().count(), 1 + 3 * 7);
        assert!(dir.path().join("models/s2_r50_seed7/model.lp").exists());
    }
}
