use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, Context};
use serde::Serialize;

use sc2_core::cacer::{train, Checkpoint};
use sc2_core::maps::to_pgm_rect;
use sc2_core::model::MissionConfig;
use sc2_core::policy::{Policy, ScriptedPolicy};
use sc2_core::scheduler::{brute_force, solve, AllocationInstance, ScheduleError};
use sc2_core::sim::{median, run_mission, sweep_fleet, write_csv, MissionError, MissionOptions, MissionStats, MetricsReport, Scenario, SweepRow, ValueSource};

use crate::manifest::{config_digest, input_file, InputFile, RunManifest, CONFIG_FILE, MANIFEST_FILE};
use crate::{Command, ConfigArgs, PolicyArgs, ReplayArgs, ScheduleCheckArgs, SimulateArgs, SweepArgs, TrainArgs};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Code {
    Failure = 1,
    Config = 2,
    Checkpoint = 3,
    Infeasible = 4,
    Audit = 5,
}

#[derive(Debug)]
pub struct CliError {
    pub code: Code,
    pub error: anyhow::Error,
}

impl From<anyhow::Error> for CliError {
    fn from(error: anyhow::Error) -> Self {
        Self { code: Code::Failure, error }
    }
}

trait WithCode<T> {
    fn code(self, code: Code) -> Result<T, CliError>;
}

impl<T, E: Into<anyhow::Error>> WithCode<T> for Result<T, E> {
    fn code(self, code: Code) -> Result<T, CliError> {
        self.map_err(|e| CliError { code, error: e.into() })
    }
}

fn fail(code: Code, error: anyhow::Error) -> CliError {
    CliError { code, error }
}

fn mission_error(e: MissionError) -> CliError {
    let code = match e {
        MissionError::Path(_) | MissionError::Map(_) => Code::Config,
        MissionError::Audit { .. } | MissionError::Schedule { .. } | MissionError::Mode { .. } => Code::Audit,
    };
    fail(code, e.into())
}

pub fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Train(a) => cmd_train(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::ScheduleCheck(a) => cmd_schedule_check(a),
        Command::Replay(a) => cmd_replay(a),
    }
}

fn absolute(path: &Path, code: Code) -> Result<PathBuf, CliError> {
    fs::canonicalize(path).with_context(|| format!("cannot open {}", path.display())).code(code)
}

/// Loaded config plus the bookkeeping every artifact-writing command shares.
struct Run {
    cfg: MissionConfig,
    out: PathBuf,
    inputs: Vec<InputFile>,
    outputs: Vec<String>,
    started: Instant,
}

impl Run {
    fn start(common: &mut ConfigArgs) -> Result<Self, CliError> {
        let started = Instant::now();
        let mut inputs = Vec::new();
        let cfg = match &common.config {
            Some(path) => {
                let cfg = MissionConfig::load(path).code(Code::Config)?;
                let abs = absolute(path, Code::Config)?;
                inputs.push(input_file(&abs).code(Code::Config)?);
                common.config = Some(abs);
                cfg
            }
            None => MissionConfig::default(),
        };
        fs::create_dir_all(&common.out).with_context(|| format!("creating {}", common.out.display()))?;
        let mut run = Self {
            cfg,
            out: common.out.clone(),
            inputs,
            outputs: Vec::new(),
            started,
        };
        let text = serde_json::to_string_pretty(&run.cfg).context("serializing config")?;
        run.write(CONFIG_FILE, (text + "\n").as_bytes())?;
        Ok(run)
    }

    fn input(&mut self, path: &mut PathBuf, code: Code) -> Result<(), CliError> {
        let abs = absolute(path, code)?;
        self.inputs.push(input_file(&abs).code(code)?);
        *path = abs;
        Ok(())
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.out.join(name);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(value).context("serializing output")?;
        self.write(name, (text + "\n").as_bytes())
    }

    fn write_csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<(), CliError> {
        let mut buf = Vec::new();
        write_csv(rows, &mut buf).context("formatting csv")?;
        self.write(name, &buf)
    }

    fn finish(self, command: Command, seeds: Vec<u64>) -> Result<(), CliError> {
        let manifest = RunManifest {
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            config_digest: config_digest(&self.cfg),
            seeds,
            command,
            inputs: self.inputs,
            outputs: self.outputs,
            wall_clock_secs: self.started.elapsed().as_secs_f64(),
        };
        manifest.write(&self.out)?;
        Ok(())
    }
}

fn load_policy(args: &mut PolicyArgs, run: &mut Run) -> Result<Box<dyn Policy>, CliError> {
    match &mut args.checkpoint {
        Some(path) => {
            run.input(path, Code::Checkpoint)?;
            let ck = Checkpoint::load(path).code(Code::Checkpoint)?;
            Ok(Box::new(ck.to_agent(&run.cfg).code(Code::Checkpoint)?))
        }
        None => Ok(Box::new(ScriptedPolicy::default())),
    }
}

fn load_scenario(spec: &mut String, run: &mut Run) -> Result<Scenario, CliError> {
    if let Some(s) = Scenario::preset(spec, &run.cfg) {
        return Ok(s);
    }
    let mut path = PathBuf::from(&*spec);
    let text = fs::read_to_string(&path)
        .with_context(|| format!("`{spec}` is neither a preset nor a readable scenario file"))
        .code(Code::Config)?;
    let sc: Scenario = serde_json::from_str(&text).with_context(|| format!("parsing scenario {spec}")).code(Code::Config)?;
    run.input(&mut path, Code::Config)?;
    *spec = path.display().to_string();
    Ok(sc)
}

/// Reject fleet sizes the slot lattice cannot serve.
fn check_fleet(n: usize, cfg: &MissionConfig) -> Result<(), CliError> {
    MissionConfig { n, ..cfg.clone() }.validate().code(Code::Config)
}

fn cmd_train(mut a: TrainArgs) -> Result<(), CliError> {
    let mut run = Run::start(&mut a.common)?;
    let start = match &mut a.checkpoint {
        Some(path) => {
            run.input(path, Code::Checkpoint)?;
            let ck = Checkpoint::load(path).code(Code::Checkpoint)?;
            Some((ck.to_agent(&run.cfg).code(Code::Checkpoint)?, ck.episode))
        }
        None => None,
    };
    let outcome = train(&run.cfg, start);
    let ck = Checkpoint::new(&outcome.agent, outcome.episode, run.cfg.seed);
    run.write("checkpoint.json", (ck.to_json() + "\n").as_bytes())?;
    run.write_csv("curve.csv", &outcome.curve)?;
    if let (Some(first), Some(last)) = (outcome.curve.first(), outcome.curve.last()) {
        println!(
            "trained episodes {}..{}: mean reward {:.3} -> {:.3}",
            first.episode, last.episode, first.mean_reward, last.mean_reward
        );
    } else {
        println!("no episodes to run; checkpoint holds episode {}", outcome.episode);
    }
    let seeds = vec![run.cfg.seed];
    run.finish(Command::Train(a), seeds)
}

#[derive(Serialize)]
struct SimulationSummary<'a> {
    scenario: &'a str,
    n: usize,
    metrics: &'a MetricsReport,
    stats: &'a MissionStats,
}

fn cmd_simulate(mut a: SimulateArgs) -> Result<(), CliError> {
    let mut run = Run::start(&mut a.common)?;
    let policy = load_policy(&mut a.policy, &mut run)?;
    let mut sc = load_scenario(&mut a.scenario, &mut run)?;
    if let Some(steps) = a.steps {
        sc.steps = steps;
    }
    if let Some(n) = a.n {
        sc.n = Some(n);
    }
    if let Some(path) = &mut a.value_map {
        run.input(path, Code::Config)?;
        sc.value_map = Some(ValueSource::File { path: path.clone() });
    }
    let n = sc.fleet_size(&run.cfg);
    check_fleet(n, &run.cfg)?;
    let opts = MissionOptions {
        snapshot_every: a.snapshot_every,
    };
    let out = run_mission(policy.as_ref(), &sc, &run.cfg, &opts).map_err(mission_error)?;

    run.write_json(
        "metrics.json",
        &SimulationSummary {
            scenario: &sc.name,
            n,
            metrics: &out.metrics,
            stats: &out.stats,
        },
    )?;
    run.write_csv("log.csv", &out.log)?;
    run.write_csv("events.csv", &out.events)?;
    let rm = &out.running_max;
    run.write("coverage.pgm", &to_pgm_rect(&rm.values, rm.width, rm.height, run.cfg.m_a))?;
    for snap in &out.snapshots {
        let side = snap.geom.side;
        let obstacle: Vec<f64> = snap.obstacle.iter().map(|&o| o as f64).collect();
        run.write(&format!("snapshots/perception_{:05}.pgm", snap.step), &to_pgm_rect(&snap.perception, side, side, run.cfg.m_a))?;
        run.write(&format!("snapshots/obstacle_{:05}.pgm", snap.step), &to_pgm_rect(&obstacle, side, side, 1.0))?;
    }
    println!(
        "{}: n={} steps={} gamma_cum={:.4} gamma_avg={:.4} collisions={} battery_deaths={}",
        sc.name, n, out.metrics.steps, out.metrics.gamma_cum, out.metrics.gamma_avg, out.stats.collisions, out.stats.battery_deaths
    );
    let seeds = vec![run.cfg.seed];
    run.finish(Command::Simulate(a), seeds)
}

/// `"2..10"` (inclusive), `"2,4,6"` or `"6"`.
fn parse_fleet_sizes(spec: &str) -> anyhow::Result<Vec<usize>> {
    let ns: Vec<usize> = if let Some((lo, hi)) = spec.split_once("..") {
        let lo: usize = lo.trim().parse()?;
        let hi: usize = hi.trim().parse()?;
        (lo..=hi).collect()
    } else {
        spec.split(',').map(|s| s.trim().parse()).collect::<Result<_, _>>()?
    };
    if ns.is_empty() || ns.contains(&0) {
        return Err(anyhow!("fleet sizes must be positive, got `{spec}`"));
    }
    Ok(ns)
}

#[derive(Serialize)]
struct SweepCsvRow {
    kind: &'static str,
    n: usize,
    seed: Option<u64>,
    /// Median over seeds on summary rows.
    gamma_cum: f64,
    gamma_avg: f64,
    effective_coverage: f64,
    collisions: Option<usize>,
    battery_deaths: Option<usize>,
    relaxed_solves: Option<usize>,
    gamma_cum_min: Option<f64>,
    gamma_cum_max: Option<f64>,
    gamma_avg_min: Option<f64>,
    gamma_avg_max: Option<f64>,
}

fn summarize(n: usize, rows: &[&SweepRow]) -> SweepCsvRow {
    let cum: Vec<f64> = rows.iter().map(|r| r.gamma_cum).collect();
    let avg: Vec<f64> = rows.iter().map(|r| r.gamma_avg).collect();
    let eff: Vec<f64> = rows.iter().map(|r| r.effective_coverage).collect();
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    SweepCsvRow {
        kind: "summary",
        n,
        seed: None,
        gamma_cum: median(&cum),
        gamma_avg: median(&avg),
        effective_coverage: median(&eff),
        collisions: None,
        battery_deaths: None,
        relaxed_solves: None,
        gamma_cum_min: Some(min(&cum)),
        gamma_cum_max: Some(max(&cum)),
        gamma_avg_min: Some(min(&avg)),
        gamma_avg_max: Some(max(&avg)),
    }
}

fn cmd_sweep(mut a: SweepArgs) -> Result<(), CliError> {
    let ns = parse_fleet_sizes(&a.n).code(Code::Config)?;
    if a.seeds == 0 {
        return Err(fail(Code::Config, anyhow!("--seeds must be at least 1")));
    }
    let mut run = Run::start(&mut a.common)?;
    for &n in &ns {
        check_fleet(n, &run.cfg)?;
    }
    let policy = load_policy(&mut a.policy, &mut run)?;
    let mut sc = load_scenario(&mut a.scenario, &mut run)?;
    if let Some(steps) = a.steps {
        sc.steps = steps;
    }
    let seeds: Vec<u64> = (0..a.seeds).map(|k| run.cfg.seed.wrapping_add(k)).collect();
    let rows = sweep_fleet(policy.as_ref(), &sc, &run.cfg, &ns, &seeds).map_err(mission_error)?;

    let mut table = Vec::new();
    for &n in &ns {
        let group: Vec<&SweepRow> = rows.iter().filter(|r| r.n == n).collect();
        for r in &group {
            table.push(SweepCsvRow {
                kind: "run",
                n,
                seed: Some(r.seed),
                gamma_cum: r.gamma_cum,
                gamma_avg: r.gamma_avg,
                effective_coverage: r.effective_coverage,
                collisions: Some(r.collisions),
                battery_deaths: Some(r.battery_deaths),
                relaxed_solves: Some(r.relaxed_solves),
                gamma_cum_min: None,
                gamma_cum_max: None,
                gamma_avg_min: None,
                gamma_avg_max: None,
            });
        }
        let s = summarize(n, &group);
        println!(
            "n={n:>2}  gamma_cum median {:.4} [{:.4}, {:.4}]  gamma_avg median {:.4} [{:.4}, {:.4}]",
            s.gamma_cum,
            s.gamma_cum_min.unwrap_or_default(),
            s.gamma_cum_max.unwrap_or_default(),
            s.gamma_avg,
            s.gamma_avg_min.unwrap_or_default(),
            s.gamma_avg_max.unwrap_or_default()
        );
        table.push(s);
    }
    run.write_csv("sweep.csv", &table)?;
    run.finish(Command::Sweep(a), seeds)
}

fn cmd_schedule_check(a: ScheduleCheckArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&a.instance)
        .with_context(|| format!("cannot read instance {}", a.instance.display()))
        .code(Code::Config)?;
    let inst: AllocationInstance = serde_json::from_str(&text)
        .with_context(|| format!("parsing instance {}", a.instance.display()))
        .code(Code::Config)?;
    let inst = inst.normalized().code(Code::Config)?;
    let assignment = match solve(&inst) {
        Ok(asg) => asg,
        Err(e @ ScheduleError::Infeasible { .. }) => return Err(fail(Code::Infeasible, e.into())),
        Err(e) => return Err(fail(Code::Config, e.into())),
    };
    if inst.is_empty() {
        println!("empty instance: nothing to assign");
    }
    for (drone, slot) in &assignment.pairs {
        println!("drone {drone} -> slot {}", slot.0);
    }
    println!("z={}", assignment.z);
    if inst.rows() <= 6 && inst.cols() <= 10 {
        match brute_force(&inst) {
            Some((z, cols)) if z == assignment.z && cols == assignment.columns => println!("oracle agrees"),
            other => {
                return Err(anyhow!("oracle disagrees: solver z={} columns {:?}, enumeration {:?}", assignment.z, assignment.columns, other).into());
            }
        }
    } else {
        println!("instance too large for the enumeration cross-check");
    }
    Ok(())
}

fn cmd_replay(a: ReplayArgs) -> Result<(), CliError> {
    let manifest = RunManifest::load(&a.manifest).code(Code::Config)?;
    let dir = a.manifest.parent().unwrap_or(Path::new(".")).to_path_buf();
    let config = dir.join(CONFIG_FILE);
    let cfg = MissionConfig::load(&config).code(Code::Config)?;
    if config_digest(&cfg) != manifest.config_digest {
        return Err(fail(Code::Config, anyhow!("{} does not match the manifest digest", config.display())));
    }
    let recorded_config = match &manifest.command {
        Command::Train(t) => t.common.config.clone(),
        Command::Simulate(s) => s.common.config.clone(),
        Command::Sweep(s) => s.common.config.clone(),
        _ => None,
    };
    for input in &manifest.inputs {
        if Some(&input.path) == recorded_config.as_ref() {
            continue;
        }
        let now = input_file(&input.path).code(Code::Config)?;
        if now.sha256 != input.sha256 {
            return Err(fail(Code::Config, anyhow!("input {} changed since the recorded run", input.path.display())));
        }
    }
    let retarget = |common: &mut ConfigArgs| {
        common.config = Some(config.clone());
        common.out = a.out.clone();
    };
    let cmd = match manifest.command.clone() {
        Command::Train(mut t) => {
            retarget(&mut t.common);
            Command::Train(t)
        }
        Command::Simulate(mut s) => {
            retarget(&mut s.common);
            Command::Simulate(s)
        }
        Command::Sweep(mut s) => {
            retarget(&mut s.common);
            Command::Sweep(s)
        }
        other => return Err(fail(Code::Config, anyhow!("manifest records a command without outputs: {other:?}"))),
    };
    run(cmd)?;

    let mut differing = Vec::new();
    for name in &manifest.outputs {
        let old = fs::read(dir.join(name)).with_context(|| format!("reading recorded {name}"))?;
        let new = fs::read(a.out.join(name)).with_context(|| format!("reading replayed {name}"))?;
        if old != new {
            differing.push(name.as_str());
        }
    }
    if !differing.is_empty() {
        return Err(anyhow!("replay differs from the recorded run in {differing:?}").into());
    }
    println!("replay matches: {} outputs byte-identical (manifest {})", manifest.outputs.len(), MANIFEST_FILE);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fleet_size_lists() {
        assert_eq!(parse_fleet_sizes("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_fleet_sizes("2, 6,10").unwrap(), vec![2, 6, 10]);
        assert_eq!(parse_fleet_sizes("6").unwrap(), vec![6]);
        assert!(parse_fleet_sizes("0,2").is_err());
        assert!(parse_fleet_sizes("x").is_err());
    }
}
