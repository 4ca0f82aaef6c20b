use std::path::{Path, PathBuf};

use tandem_paoi::numerics::{binomial_z, dkw_bound, ks_distance, CdfTable, EmpiricalDistribution};
use tandem_paoi::sim::{simulate_tandem, CaseSplit, SimConfig};
use tandem_paoi::{par, CaseLabel, Execution, PacketRecord, Tandem, TandemParams};

use crate::config::{ExperimentConfig, Mode, TandemKind};
use crate::error::CliError;
use crate::figures;
use crate::output::{default_out_dir, Cell, Table};

/// KS thresholds never drop below the DKW radius at this level.
pub const DKW_ALPHA: f64 = 1e-3;
pub const KS_OVERALL: f64 = 0.005;
pub const KS_CASE: f64 = 0.01;
pub const Z_LIMIT: f64 = 4.0;
pub const MEAN_REL: f64 = 0.01;

/// Files written and whether every pass/fail flag passed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub passed: bool,
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Analytic => "analytic",
        Mode::Simulate => "simulate",
        Mode::Compare => "compare",
        Mode::Sweep => "sweep",
        Mode::Reproduce => "reproduce",
    }
}

fn tandem_name(kind: TandemKind) -> &'static str {
    match kind {
        TandemKind::Md1 => "md1",
        TandemKind::Mm1 => "mm1",
    }
}

/// Where `config` writes when `--out` is absent.
pub fn default_out(config: &ExperimentConfig) -> PathBuf {
    let dir = default_out_dir();
    match (config.mode, config.figure) {
        (Mode::Reproduce, Some(f)) => dir.join(f.id()),
        _ => dir.join(format!(
            "{}_{}.{}",
            mode_name(config.mode),
            tandem_name(config.tandem),
            config.format.extension()
        )),
    }
}

/// Validate, run and write `config`.
pub fn execute(config: &ExperimentConfig) -> Result<RunSummary, CliError> {
    config.validate()?;
    let out = config.out.clone().unwrap_or_else(|| default_out(config));
    if config.mode == Mode::Reproduce {
        let files = run_reproduce(config, &out)?;
        return Ok(RunSummary {
            files,
            passed: true,
        });
    }
    let (table, passed) = match config.mode {
        Mode::Analytic => (run_analytic(config)?, true),
        Mode::Simulate => (run_simulate(config)?, true),
        Mode::Compare => run_compare(config)?,
        Mode::Sweep => (run_sweep(config)?, true),
        Mode::Reproduce => unreachable!("handled above"),
    };
    table.write(&out, config)?;
    Ok(RunSummary {
        files: vec![out],
        passed,
    })
}

fn common_meta(table: &mut Table, config: &ExperimentConfig) {
    table.meta("mode", mode_name(config.mode));
    table.meta("tandem", tandem_name(config.tandem));
    if let Some(f) = config.figure {
        table.meta("figure", f.id());
    }
    if let Some(label) = &config.label {
        table.meta("label", label);
    }
}

struct AnalyticTables {
    tandem: Tandem,
    overall: CdfTable,
    cases: Vec<CdfTable>,
}

fn analytic_tables(config: &ExperimentConfig) -> Result<AnalyticTables, CliError> {
    let tandem = Tandem::new(&config.params()?)?;
    let mut built = par::map_indexed(Execution::Parallel, 5, |k| match k {
        0 => tandem.cdf_table_with(Execution::Sequential),
        _ => tandem.case_table_with(CaseLabel::ALL[k - 1], Execution::Sequential),
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let overall = built.remove(0);
    Ok(AnalyticTables {
        tandem,
        overall,
        cases: built,
    })
}

/// PDF and CDF on the τ grid, overall and per case.
pub fn run_analytic(config: &ExperimentConfig) -> Result<Table, CliError> {
    let t = analytic_tables(config)?;
    let mut columns = vec!["tau".to_string(), "pdf_total".into(), "cdf_total".into()];
    columns.extend(CaseLabel::ALL.iter().map(|c| format!("pdf_{c}")));
    columns.extend(CaseLabel::ALL.iter().map(|c| format!("cdf_{c}")));
    let mut table = Table::new(columns);
    common_meta(&mut table, config);
    let probs = t.tandem.probabilities();
    for case in CaseLabel::ALL {
        table.meta(&format!("p_{case}"), probs.get(case));
    }
    table.meta("support_lower", t.tandem.support_lower());
    table.meta("mean", t.overall.mean());
    let rows = par::map_slice(Execution::Parallel, &config.tau_grid(), |&tau| {
        let mut row: Vec<Cell> = vec![
            tau.into(),
            t.tandem.pdf(tau).into(),
            t.overall.cdf(tau).into(),
        ];
        row.extend(
            CaseLabel::ALL
                .iter()
                .map(|&c| Cell::Num(t.tandem.case_pdf(c, tau))),
        );
        row.extend(t.cases.iter().map(|c| Cell::Num(c.cdf(tau))));
        row
    });
    for row in rows {
        table.push(row);
    }
    Ok(table)
}

/// Outcome of one simulation run. `split` is `None` when no packet
/// survived the warm-up.
pub struct Simulated {
    pub split: Option<CaseSplit>,
    pub stable: bool,
    pub config: SimConfig,
}

const RAW_HEADER: [&str; 11] = [
    "index", "g", "y", "s1", "s2", "omega1", "omega2", "t1", "t2", "delta", "case",
];

fn raw_row(r: &PacketRecord) -> [String; 11] {
    [
        r.index.to_string(),
        r.g.to_string(),
        r.y.to_string(),
        r.s1.to_string(),
        r.s2.to_string(),
        r.omega1.to_string(),
        r.omega2.to_string(),
        r.t1.to_string(),
        r.t2.to_string(),
        r.delta.to_string(),
        r.case.to_string(),
    ]
}

/// Run the simulator, optionally dumping every record to `raw`.
pub fn simulate(config: &ExperimentConfig, raw: Option<&Path>) -> Result<Simulated, CliError> {
    let sim_config = SimConfig::new(
        config.sim_params()?,
        config.packets,
        config.warmup,
        config.seed,
    )?;
    let sim = simulate_tandem(&sim_config)?;
    let stable = sim.is_stable();
    let csv_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Csv {
            path: path.clone(),
            source,
        }
    };
    let mut writer = match raw {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
                    path: dir.to_path_buf(),
                    source,
                })?;
            }
            let mut w = csv::Writer::from_path(p).map_err(csv_err(p))?;
            w.write_record(RAW_HEADER).map_err(csv_err(p))?;
            Some((w, p))
        }
        None => None,
    };
    let mut all = Vec::new();
    let mut parts: [Vec<f64>; 4] = Default::default();
    for r in sim {
        let r = r?;
        if let Some((w, p)) = writer.as_mut() {
            w.write_record(raw_row(&r)).map_err(csv_err(p))?;
        }
        all.push(r.delta);
        parts[r.case.index()].push(r.delta);
    }
    if let Some((mut w, p)) = writer {
        w.flush().map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        })?;
    }
    let split = if all.is_empty() {
        None
    } else {
        let counts = [0, 1, 2, 3].map(|i| parts[i].len());
        Some(CaseSplit {
            overall: EmpiricalDistribution::new(all)?,
            by_case: parts.map(|p| EmpiricalDistribution::new(p).ok()),
            counts,
        })
    };
    Ok(Simulated {
        split,
        stable,
        config: sim_config,
    })
}

fn sim_meta(table: &mut Table, sim: &Simulated) {
    let c = &sim.config;
    table.meta("sim_lambda", c.params.lambda());
    table.meta("emitted_packets", c.emitted());
    if !sim.stable {
        table.meta(
            "warning",
            "simulated parameters are unstable; queues grow without bound",
        );
    }
    match &sim.split {
        Some(s) => {
            for case in CaseLabel::ALL {
                table.meta(&format!("count_{case}"), s.counts[case.index()]);
            }
            table.meta("sample_mean", s.overall.mean());
            table.meta("sample_min", s.overall.min());
        }
        None => table.meta("notice", "no packets after warm-up; the ECDF is empty"),
    }
}

/// ECDF on the τ grid, overall and per case.
pub fn run_simulate(config: &ExperimentConfig) -> Result<Table, CliError> {
    let sim = simulate(config, config.raw_out.as_deref())?;
    let mut columns = vec!["tau".to_string(), "ecdf_total".into()];
    columns.extend(CaseLabel::ALL.iter().map(|c| format!("ecdf_{c}")));
    let mut table = Table::new(columns);
    common_meta(&mut table, config);
    sim_meta(&mut table, &sim);
    if let Some(split) = &sim.split {
        for tau in config.tau_grid() {
            let mut row: Vec<Cell> = vec![tau.into(), split.overall.ecdf(tau).into()];
            row.extend(CaseLabel::ALL.iter().map(|&c| match split.case(c) {
                Some(e) => Cell::Num(e.ecdf(tau)),
                None => Cell::Missing,
            }));
            table.push(row);
        }
    }
    Ok(table)
}

/// Analytic-vs-simulation report. The flag is true when every check passes.
pub fn run_compare(config: &ExperimentConfig) -> Result<(Table, bool), CliError> {
    let t = analytic_tables(config)?;
    let sim = simulate(config, config.raw_out.as_deref())?;
    let mut table = Table::new(["metric", "value", "threshold", "pass"]);
    common_meta(&mut table, config);
    sim_meta(&mut table, &sim);
    let Some(split) = &sim.split else {
        table.push(vec![
            "samples".into(),
            Cell::Int(0),
            Cell::Missing,
            false.into(),
        ]);
        return Ok((table, false));
    };
    let mut all_pass = true;
    let mut check = |table: &mut Table, name: String, value: f64, threshold: f64| {
        let pass = value.is_finite() && value.abs() < threshold;
        all_pass &= pass;
        table.push(vec![
            name.as_str().into(),
            value.into(),
            threshold.into(),
            pass.into(),
        ]);
    };
    let n = split.total();
    let ks = ks_distance(|x| t.overall.cdf_interp(x), &split.overall);
    check(
        &mut table,
        "ks_overall".into(),
        ks,
        KS_OVERALL.max(dkw_bound(n, DKW_ALPHA)),
    );
    let probs = t.tandem.probabilities();
    for case in CaseLabel::ALL {
        let i = case.index();
        let (value, threshold) = match split.case(case) {
            Some(e) => (
                ks_distance(|x| t.cases[i].cdf_interp(x), e),
                KS_CASE.max(dkw_bound(e.len(), DKW_ALPHA)),
            ),
            None => (f64::NAN, KS_CASE),
        };
        check(&mut table, format!("ks_{case}"), value, threshold);
    }
    for case in CaseLabel::ALL {
        let z = binomial_z(split.counts[case.index()], n, probs.get(case));
        check(&mut table, format!("z_{case}"), z, Z_LIMIT);
    }
    let analytic_mean = t.overall.mean();
    let sample_mean = split.overall.mean();
    let rel = (sample_mean - analytic_mean) / analytic_mean;
    let rel_tol = MEAN_REL.max(Z_LIMIT * split.overall.mean_std_error() / analytic_mean);
    check(&mut table, "mean_rel_error".into(), rel, rel_tol);
    table.push(vec![
        "mean_analytic".into(),
        analytic_mean.into(),
        Cell::Missing,
        Cell::Missing,
    ]);
    table.push(vec![
        "mean_simulated".into(),
        sample_mean.into(),
        Cell::Missing,
        Cell::Missing,
    ]);
    table.meta("overall", if all_pass { "pass" } else { "fail" });
    Ok((table, all_pass))
}

fn percentile_column(p: f64) -> String {
    let pct = (p * 1e8).round() / 1e6;
    format!("p{pct}")
}

/// Percentiles and mean at every sweep value. Unstable points become
/// marked rows.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Table, CliError> {
    let mut columns = vec![config.sweep_param.column().to_string(), "status".into()];
    columns.extend(config.percentiles.iter().map(|&p| percentile_column(p)));
    columns.push("mean".into());
    let mut table = Table::new(columns);
    common_meta(&mut table, config);
    table.meta("sweep_param", config.sweep_param.column());
    let rows = par::map_slice(Execution::Parallel, &config.sweep_values, |&v| {
        sweep_point(config, v)
    });
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}

fn sweep_point(config: &ExperimentConfig, value: f64) -> Result<Vec<Cell>, CliError> {
    let point = config.with_sweep_value(value);
    let width = config.percentiles.len() + 1;
    let params = TandemParams::allow_unstable(point.lambda, point.mu1, point.second_server())?;
    if !params.is_stable() {
        let mut row = vec![value.into(), "unstable".into()];
        row.extend(std::iter::repeat_n(Cell::Missing, width));
        return Ok(row);
    }
    let table = Tandem::new(&params)?.cdf_table_with(Execution::Sequential)?;
    let mut row = vec![value.into(), "ok".into()];
    for &p in &config.percentiles {
        row.push(table.quantile(p)?.into());
    }
    row.push(table.mean().into());
    Ok(row)
}

/// Write every data file of one figure under `dir`.
pub fn run_reproduce(config: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let figure = config.figure.expect("validated");
    let plan = figures::plan(figure, config);
    let written = par::map_slice(Execution::Parallel, &plan, |(stem, sub)| {
        let path = dir.join(format!("{stem}.{}", sub.format.extension()));
        let mut sub = sub.clone();
        sub.out = Some(path.clone());
        execute(&sub).map(|_| path)
    });
    written.into_iter().collect()
}
